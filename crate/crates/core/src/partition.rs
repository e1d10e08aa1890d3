//! Enumeration of set partitions of `{0..K-1}` into exactly `M` nonempty
//! blocks, encoded as restricted-growth strings.
//!
//! A restricted-growth string `a` satisfies `a[0] = 0` and
//! `a[i] <= 1 + max(a[0..i])`. Each partition has exactly one such string,
//! and the strings are produced here in lexicographic order, which is the
//! tie-break order used by every argmax/argmin search in the crate.

use crate::error::{Error, Result};
use crate::model::DeterministicEncoder;

/// Upper limit on how many partitions an exhaustive search may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_partitions: u64,
}

impl SearchBudget {
    pub fn new(max_partitions: u64) -> Result<Self> {
        if max_partitions == 0 {
            return Err(Error::Parameter("search budget must be at least 1".into()));
        }
        Ok(SearchBudget { max_partitions })
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_partitions: 1_000_000,
        }
    }
}

/// Stirling number of the second kind `S(n, k)`, saturating at `u128::MAX`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128)
                .saturating_mul(row[j])
                .saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// Lexicographic generator of restricted-growth strings with exactly `m` blocks.
#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    labels: Vec<usize>,
    m: usize,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if m == 0 || m > k {
            return Err(Error::Parameter(format!(
                "need 1 <= M <= K for a partition, got M={m}, K={k}"
            )));
        }
        let mut labels = vec![0; k];
        fill_suffix(&mut labels, 0, m);
        Ok(RestrictedGrowth {
            labels,
            m,
            started: false,
            done: false,
        })
    }

    /// Moves to the next string; returns `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let k = self.labels.len();
        // prefix_max[i] = max(labels[0..i]) + 1, i.e. blocks used before i.
        let mut prefix_blocks = vec![0usize; k];
        let mut used = 0;
        for i in 0..k {
            prefix_blocks[i] = used;
            used = used.max(self.labels[i] + 1);
        }
        for i in (1..k).rev() {
            let cap = prefix_blocks[i].min(self.m - 1);
            if self.labels[i] < cap {
                self.labels[i] += 1;
                fill_suffix(&mut self.labels, i, self.m);
                return true;
            }
        }
        self.done = true;
        false
    }

    /// Current 0-based labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn encoder(&self) -> DeterministicEncoder {
        DeterministicEncoder::new(self.labels.clone(), self.m)
            .expect("restricted-growth strings always use every block")
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.labels.clone())
    }
}

/// Fills `labels[i+1..]` with the lexicographically smallest completion that
/// still reaches exactly `m` blocks.
fn fill_suffix(labels: &mut [usize], i: usize, m: usize) {
    let k = labels.len();
    let mut blocks = labels[..=i].iter().max().map_or(0, |v| v + 1);
    for j in i + 1..k {
        let remaining = k - j;
        if remaining > m - blocks {
            labels[j] = 0;
        } else {
            labels[j] = blocks;
            blocks += 1;
        }
    }
}

/// Checks `S(k, m)` against the budget, then returns the generator.
pub fn partitions(k: usize, m: usize, budget: SearchBudget) -> Result<RestrictedGrowth> {
    let gen = RestrictedGrowth::new(k, m)?;
    let count = stirling2(k, m);
    if count > u128::from(budget.max_partitions) {
        return Err(Error::BudgetExceeded {
            k,
            m,
            count,
            budget: budget.max_partitions,
        });
    }
    Ok(gen)
}

/// Runs `visit` on every `m`-block partition and keeps the first strict
/// maximiser of `score`.
pub(crate) fn argmax_partition<F>(
    k: usize,
    m: usize,
    budget: SearchBudget,
    mut score: F,
) -> Result<(f64, DeterministicEncoder)>
where
    F: FnMut(&DeterministicEncoder) -> f64,
{
    let mut gen = partitions(k, m, budget)?;
    let mut best: Option<(f64, DeterministicEncoder)> = None;
    while gen.advance() {
        let enc = gen.encoder();
        let v = score(&enc);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, enc));
        }
    }
    Ok(best.expect("at least one partition exists for 1 <= M <= K"))
}
