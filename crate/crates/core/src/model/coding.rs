use std::fmt;

use super::PROB_TOL;
use crate::error::{Error, Result};

/// A deterministic scalar encoder `f: {0..K-1} -> {0..M-1}` whose cells
/// `A_z = {x : f(x) = z}` are all nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicEncoder {
    map: Vec<usize>,
    cells: usize,
}

impl DeterministicEncoder {
    /// `map[x]` is the 0-based cell index of symbol `x`.
    pub fn new(map: Vec<usize>, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::Parameter("encoder needs at least one cell".into()));
        }
        let mut seen = vec![false; cells];
        for (x, &z) in map.iter().enumerate() {
            if z >= cells {
                return Err(Error::Parameter(format!(
                    "symbol {} mapped to cell {} but M = {cells}",
                    x + 1,
                    z + 1
                )));
            }
            seen[z] = true;
        }
        if let Some(z) = seen.iter().position(|s| !s) {
            return Err(Error::Parameter(format!("cell {} is empty", z + 1)));
        }
        Ok(DeterministicEncoder { map, cells })
    }

    /// Builds from 1-based labels, the external convention.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::Parameter("1-based labels must be >= 1".into()));
        }
        let cells = labels.iter().copied().max().unwrap_or(0);
        DeterministicEncoder::new(labels.iter().map(|&z| z - 1).collect(), cells)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&z| z + 1).collect()
    }

    /// Single cell containing every symbol.
    pub fn constant(k: usize) -> Self {
        DeterministicEncoder {
            map: vec![0; k],
            cells: 1,
        }
    }

    pub fn identity(k: usize) -> Self {
        DeterministicEncoder {
            map: (0..k).collect(),
            cells: k,
        }
    }

    /// Consecutive cells of sizes `sizes[0], sizes[1], ..`.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut map = Vec::with_capacity(sizes.iter().sum());
        for (z, &n) in sizes.iter().enumerate() {
            map.extend(std::iter::repeat(z).take(n));
        }
        DeterministicEncoder::new(map, sizes.len())
    }

    pub fn source_size(&self) -> usize {
        self.map.len()
    }

    /// `M`, the number of cells.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn cell_of(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn cell_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cells];
        for (x, &z) in self.map.iter().enumerate() {
            out[z].push(x);
        }
        out
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.cells];
        for &z in &self.map {
            out[z] += 1;
        }
        out
    }

    /// Rate `log2 M` in bits.
    pub fn rate_bits(&self) -> f64 {
        (self.cells as f64).log2()
    }
}

impl fmt::Display for DeterministicEncoder {
    /// 1-based labels separated by spaces, e.g. `2 3 1 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|z| (z + 1).to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A randomised encoder `p(z|x)`, stored as a `K x M` row-stochastic matrix.
/// Column `z` is the vector `p_z`; the columns sum to the all-ones vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticEncoder {
    rows: Vec<Vec<f64>>,
}

impl StochasticEncoder {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::Parameter("stochastic encoder needs at least one cell".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            super::check_pmf(row, &format!("encoder row {}", x + 1))?;
        }
        Ok(StochasticEncoder { rows })
    }

    pub fn from_deterministic(enc: &DeterministicEncoder) -> Self {
        let m = enc.cells();
        StochasticEncoder {
            rows: enc
                .map()
                .iter()
                .map(|&z| (0..m).map(|c| if c == z { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.rows.len()
    }

    pub fn cells(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `p(z|x)`.
    #[inline]
    pub fn prob(&self, x: usize, z: usize) -> f64 {
        self.rows[x][z]
    }

    /// The vector `p_z = [p(z|x), x = 0..K-1]`.
    pub fn column(&self, z: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[z]).collect()
    }

    /// The deterministic encoder this one coincides with, if every entry is 0 or 1.
    pub fn as_deterministic(&self) -> Option<DeterministicEncoder> {
        let map: Option<Vec<usize>> = self
            .rows
            .iter()
            .map(|r| {
                let ones: Vec<usize> = r
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| (v - 1.0).abs() <= PROB_TOL)
                    .map(|(z, _)| z)
                    .collect();
                (ones.len() == 1).then(|| ones[0])
            })
            .collect();
        DeterministicEncoder::new(map?, self.cells()).ok()
    }
}

/// A decoder table `g(z, y)` with entries in `{0..K-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoder {
    table: Vec<Vec<usize>>,
}

impl Decoder {
    /// `table[z][y]` is the reconstruction for cell `z` and side information `y`.
    pub fn new(table: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::Parameter("decoder needs at least one row".into()));
        }
        for row in &table {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= k) {
                return Err(Error::Parameter(format!(
                    "decoder output {} outside alphabet of size {k}",
                    bad + 1
                )));
            }
        }
        Ok(Decoder { table })
    }

    pub fn cells(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn decode(&self, z: usize, y: usize) -> usize {
        self.table[z][y]
    }

    #[cfg(test)]
    pub(crate) fn set(&mut self, z: usize, y: usize, xhat: usize) {
        self.table[z][y] = xhat;
    }
}
