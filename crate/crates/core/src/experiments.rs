//! Experiment runner behind the command-line tool.
//!
//! Every experiment produces a [`CsvBundle`]: named bound curves, code
//! tables and Wyner–Ziv curves that serialize to CSV. Row order is fixed by
//! the `M` list, and all randomness is seeded, so reruns with the same
//! config give byte-identical CSV.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{brute_force_optimal_code, modular_code, write_codes_csv, CodePerformance};
use crate::error::{Error, Result};
use crate::model::{Channel, DistortionMeasure, Source};
use crate::partition::SearchBudget;
use crate::rd::{
    classical_dpt_distortion_bound, convex_envelope, distortion_lower_bound, AlphaGrid,
    BoundCurve, CapacityMethod, CurvePoint,
};
use crate::wz::{d_bar_line, wz_rd_curve, WzCurve, WzOptions, WZ_MAX_ALPHABET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig2,
    Fig3,
    LargeGaussian,
    LargeCircular,
    Custom,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::LargeGaussian => "large_gaussian",
            ExperimentKind::LargeCircular => "large_circular",
            ExperimentKind::Custom => "custom",
        })
    }
}

/// Side-information channel of a custom run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Symmetric { mu: f64 },
    Circular { l: usize },
    Gaussian { sigma: f64 },
    Identity,
    Matrix { rows: Vec<Vec<f64>> },
}

impl ChannelSpec {
    pub fn build(&self, k: usize) -> Result<Channel> {
        match self {
            ChannelSpec::Symmetric { mu } => Channel::symmetric(k, *mu),
            ChannelSpec::Circular { l } => Channel::circular(k, *l),
            ChannelSpec::Gaussian { sigma } => Channel::gaussian_like(k, *sigma),
            ChannelSpec::Identity => Channel::identity(k),
            ChannelSpec::Matrix { rows } => {
                if rows.len() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        got: rows.len(),
                    });
                }
                Channel::new(rows.clone())
            }
        }
    }
}

/// Curves a custom run can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    /// Generalized bound with exhaustive `C^Q`.
    BruteForce,
    Holder,
    SymmetricClosedForm,
    CircularClosedForm,
    ClassicalDpt,
    ModularCode,
    OptimalCode,
    Wz,
}

impl MethodSpec {
    fn is_lower_bound(self) -> bool {
        !matches!(self, MethodSpec::ModularCode | MethodSpec::OptimalCode | MethodSpec::Wz)
    }
}

/// Run parameters. Every field is optional; unset fields take the defaults
/// of the chosen experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<AlphaGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest number of partitions an exhaustive search may visit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wz_restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn budget(&self) -> Result<SearchBudget> {
        self.budget.map_or(Ok(SearchBudget::default()), SearchBudget::new)
    }

    fn grid(&self) -> Result<AlphaGrid> {
        let g = self.alpha_grid.unwrap_or_default();
        g.validate()?;
        Ok(g)
    }

    fn wz_options(&self) -> WzOptions {
        let mut o = WzOptions {
            seed: self.seed.unwrap_or(0),
            ..WzOptions::default()
        };
        if let Some(r) = self.wz_restarts {
            o.restarts = r;
        }
        o
    }

    fn m_list(&self, k: usize, default: Vec<usize>) -> Result<Vec<usize>> {
        let ms = self.m_list.clone().unwrap_or(default);
        if ms.is_empty() {
            return Err(Error::Parameter("M list is empty".into()));
        }
        if ms.iter().any(|&m| m == 0 || m > k) {
            return Err(Error::Parameter(format!("every M must lie in [1, {k}], got {ms:?}")));
        }
        if ms.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(format!("M list must be strictly increasing, got {ms:?}")));
        }
        Ok(ms)
    }

    fn reject(&self, fields: &[(&str, bool)], kind: ExperimentKind) -> Result<()> {
        for (name, set) in fields {
            if *set {
                return Err(Error::Parameter(format!("field `{name}` does not apply to {kind}")));
            }
        }
        Ok(())
    }
}

/// One output file of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    /// Distortion lower bounds; checked against every achievable point.
    LowerBound(BoundCurve),
    /// A reference line in the bound schema that is not a lower bound.
    Reference(BoundCurve),
    /// Achievable codes with their method tag.
    Codes(Vec<(CodePerformance, String)>),
    Wz(WzCurve),
}

/// Named artifacts of one run, written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvBundle {
    pub experiment: ExperimentKind,
    pub artifacts: Vec<(String, Artifact)>,
}

impl CsvBundle {
    fn new(experiment: ExperimentKind) -> Self {
        CsvBundle {
            experiment,
            artifacts: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, a: Artifact) {
        self.artifacts.push((name.to_string(), a));
    }

    pub fn get(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    /// The named curve, lower bound or reference.
    pub fn curve(&self, name: &str) -> Option<&BoundCurve> {
        match self.get(name)? {
            Artifact::LowerBound(c) | Artifact::Reference(c) => Some(c),
            _ => None,
        }
    }

    pub fn codes(&self, name: &str) -> Option<&[(CodePerformance, String)]> {
        match self.get(name)? {
            Artifact::Codes(c) => Some(c),
            _ => None,
        }
    }

    /// `(file name, contents)` in artifact order.
    pub fn render(&self) -> Result<Vec<(String, Vec<u8>)>> {
        self.artifacts
            .iter()
            .map(|(name, a)| {
                let mut buf = Vec::new();
                match a {
                    Artifact::LowerBound(c) | Artifact::Reference(c) => c.write_csv(&mut buf)?,
                    Artifact::Codes(rows) => {
                        let refs: Vec<(&CodePerformance, &str)> =
                            rows.iter().map(|(c, m)| (c, m.as_str())).collect();
                        write_codes_csv(&mut buf, &refs)?
                    }
                    Artifact::Wz(w) => w.write_csv(&mut buf)?,
                }
                Ok((format!("{name}.csv"), buf))
            })
            .collect()
    }

    /// Pairs where a lower bound exceeds an achievable distortion at the
    /// same rate by more than `tol`, as `(bound, code, rate, gap)`.
    pub fn soundness_violations(&self, tol: f64) -> Vec<(String, String, f64, f64)> {
        let mut out = Vec::new();
        for (bn, a) in &self.artifacts {
            let Artifact::LowerBound(curve) = a else { continue };
            for (cn, b) in &self.artifacts {
                let Artifact::Codes(rows) = b else { continue };
                for (code, _) in rows {
                    for p in curve.points() {
                        if (p.rate_bits - code.rate_bits).abs() < 1e-12
                            && p.distortion > code.distortion + tol
                        {
                            out.push((bn.clone(), cn.clone(), p.rate_bits, p.distortion - code.distortion));
                        }
                    }
                }
            }
        }
        out
    }

    /// Writes every CSV and `manifest.json` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path, config: &ExperimentConfig, wall: Duration) -> Result<()> {
        fs::create_dir_all(dir)?;
        let files = self.render()?;
        for (name, bytes) in &files {
            fs::write(dir.join(name), bytes)?;
        }
        let manifest = serde_json::json!({
            "experiment": self.experiment,
            "config": config,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_time_seconds": wall.as_secs_f64(),
            "files": files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        });
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }
}

fn rate(m: usize) -> f64 {
    (m as f64).log2()
}

fn point(m: usize, distortion: f64, method: &str, alpha: Option<f64>) -> CurvePoint {
    CurvePoint {
        rate_bits: rate(m),
        distortion,
        method: method.to_string(),
        alpha,
    }
}

fn generalized_curve(
    source: &Source,
    channel: &Channel,
    ms: &[usize],
    method: CapacityMethod,
    grid: &AlphaGrid,
) -> Result<BoundCurve> {
    let pts = ms
        .par_iter()
        .map(|&m| {
            let b = distortion_lower_bound(source, channel, m, &method, grid)?;
            Ok(point(m, b.distortion, method.tag(), Some(b.alpha)))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundCurve::new(pts)
}

fn classical_curve(
    source: &Source,
    channel: &Channel,
    ms: &[usize],
    budget: SearchBudget,
) -> Result<BoundCurve> {
    let pts = ms
        .iter()
        .map(|&m| {
            let d = classical_dpt_distortion_bound(source, channel, m, budget)?;
            Ok(point(m, d, "classical_dpt", None))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundCurve::new(pts)
}

fn code_rows(
    ms: &[usize],
    tag: &str,
    make: impl Fn(usize) -> Result<CodePerformance> + Sync,
) -> Result<Artifact> {
    let rows = ms
        .par_iter()
        .map(|&m| Ok((make(m)?, tag.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Artifact::Codes(rows))
}

/// `D_WZ(log2 M)` read off the computed Wyner–Ziv curve.
fn wz_trivial_curve(wz: &WzCurve, ms: &[usize]) -> Result<BoundCurve> {
    BoundCurve::new(
        ms.iter()
            .map(|&m| point(m, wz.distortion_at_rate(rate(m)), "wz_trivial", None))
            .collect(),
    )
}

fn envelope_curve(lower: &[&BoundCurve], ms: &[usize]) -> Result<BoundCurve> {
    let best: Vec<(f64, f64)> = ms
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let d = lower.iter().map(|c| c.points()[i].distortion).fold(0.0, f64::max);
            (rate(m), d)
        })
        .collect();
    let env = convex_envelope(&best)?;
    BoundCurve::new(
        best.iter()
            .map(|&(r, _)| CurvePoint {
                rate_bits: r,
                distortion: env.eval(r),
                method: "envelope".into(),
                alpha: None,
            })
            .collect(),
    )
}

/// Uniform source on four symbols through the symmetric channel.
pub fn run_fig2(config: &ExperimentConfig) -> Result<CsvBundle> {
    let kind = ExperimentKind::Fig2;
    config.reject(
        &[
            ("l", config.l.is_some()),
            ("sigma", config.sigma.is_some()),
            ("channel", config.channel.is_some()),
            ("methods", config.methods.is_some()),
        ],
        kind,
    )?;
    let k = config.k.unwrap_or(4);
    let mu = config.mu.unwrap_or(0.7);
    let source = Source::uniform(k)?;
    let channel = Channel::symmetric(k, mu)?;
    let hamming = DistortionMeasure::hamming(k)?;
    let ms = config.m_list(k, (1..=k).collect())?;
    let grid = config.grid()?;
    let budget = config.budget()?;

    let mut b = CsvBundle::new(kind);
    b.push(
        "generalized_dpt",
        Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::SymmetricClosedForm { mu }, &grid)?),
    );
    b.push("classical_dpt", Artifact::LowerBound(classical_curve(&source, &channel, &ms, budget)?));
    b.push(
        "holder",
        Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::Holder, &grid)?),
    );
    b.push(
        "exact_optimum",
        code_rows(&ms, "brute_force_optimal", |m| {
            brute_force_optimal_code(&source, &channel, &hamming, m, budget)
        })?,
    );
    if k <= WZ_MAX_ALPHABET {
        let wz = wz_rd_curve(&source, &channel, &hamming, &config.wz_options())?;
        b.push("wz_trivial", Artifact::LowerBound(wz_trivial_curve(&wz, &ms)?));
        b.push("wz_curve", Artifact::Wz(wz));
    }
    Ok(b)
}

/// Uniform source on four symbols through the circular channel.
pub fn run_fig3(config: &ExperimentConfig) -> Result<CsvBundle> {
    let kind = ExperimentKind::Fig3;
    config.reject(
        &[
            ("mu", config.mu.is_some()),
            ("sigma", config.sigma.is_some()),
            ("channel", config.channel.is_some()),
            ("methods", config.methods.is_some()),
        ],
        kind,
    )?;
    let k = config.k.unwrap_or(4);
    let l = config.l.unwrap_or(3);
    let source = Source::uniform(k)?;
    let channel = Channel::circular(k, l)?;
    let hamming = DistortionMeasure::hamming(k)?;
    let ms = config.m_list(k, (1..=k).collect())?;
    let grid = config.grid()?;
    let budget = config.budget()?;

    let mut b = CsvBundle::new(kind);
    b.push(
        "generalized_dpt",
        Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::CircularClosedForm { l }, &grid)?),
    );
    b.push(
        "holder",
        Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::Holder, &grid)?),
    );
    b.push("classical_dpt", Artifact::LowerBound(classical_curve(&source, &channel, &ms, budget)?));
    b.push(
        "modular_code",
        code_rows(&ms, "modular", |m| modular_code(&source, &channel, &hamming, m))?,
    );
    b.push(
        "exact_optimum",
        code_rows(&ms, "brute_force_optimal", |m| {
            brute_force_optimal_code(&source, &channel, &hamming, m, budget)
        })?,
    );
    if k <= WZ_MAX_ALPHABET {
        let wz = wz_rd_curve(&source, &channel, &hamming, &config.wz_options())?;
        b.push("wz_trivial", Artifact::LowerBound(wz_trivial_curve(&wz, &ms)?));
        b.push("wz_curve", Artifact::Wz(wz));
    }
    Ok(b)
}

const LARGE_ALPHABETS: [usize; 3] = [64, 128, 256];

/// Large alphabet with the Gaussian-like or circular channel, using only
/// the Hölder capacity bound.
pub fn run_large_alphabet(kind: ExperimentKind, config: &ExperimentConfig) -> Result<CsvBundle> {
    let k = config.k.unwrap_or(64);
    if !LARGE_ALPHABETS.contains(&k) {
        return Err(Error::Parameter(format!(
            "large-alphabet runs take K in {LARGE_ALPHABETS:?}, got {k}"
        )));
    }
    let channel = match kind {
        ExperimentKind::LargeGaussian => {
            config.reject(&[("mu", config.mu.is_some()), ("l", config.l.is_some())], kind)?;
            Channel::gaussian_like(k, config.sigma.unwrap_or(0.5))?
        }
        ExperimentKind::LargeCircular => {
            config.reject(&[("mu", config.mu.is_some()), ("sigma", config.sigma.is_some())], kind)?;
            Channel::circular(k, config.l.unwrap_or(k / 4))?
        }
        other => {
            return Err(Error::Parameter(format!("{other} is not a large-alphabet experiment")))
        }
    };
    config.reject(&[("channel", config.channel.is_some())], kind)?;
    if let Some(ms) = &config.methods {
        if ms.iter().any(|m| *m != MethodSpec::Holder) {
            return Err(Error::Parameter(
                "large-alphabet runs support only the holder method".into(),
            ));
        }
    }
    let source = Source::uniform(k)?;
    let hamming = DistortionMeasure::hamming(k)?;
    let powers = (0..=k.trailing_zeros()).map(|i| 1usize << i).collect();
    let ms = config.m_list(k, powers)?;
    let grid = config.grid()?;

    let holder = generalized_curve(&source, &channel, &ms, CapacityMethod::Holder, &grid)?;
    let line = d_bar_line(&source, &channel, &hamming)?;
    let d_bar = BoundCurve::new(ms.iter().map(|&m| point(m, line.eval(rate(m)), "d_bar", None)).collect())?;
    let envelope = envelope_curve(&[&holder], &ms)?;

    let mut b = CsvBundle::new(kind);
    b.push("holder", Artifact::LowerBound(holder));
    b.push("envelope", Artifact::LowerBound(envelope));
    b.push("d_bar", Artifact::Reference(d_bar));
    b.push(
        "modular_code",
        code_rows(&ms, "modular", |m| modular_code(&source, &channel, &hamming, m))?,
    );
    Ok(b)
}

/// Any channel, method list and `M` list, with the time-sharing envelope of
/// the best lower bound at each rate.
pub fn run_custom(config: &ExperimentConfig) -> Result<CsvBundle> {
    let k = config
        .k
        .ok_or_else(|| Error::Parameter("custom runs need `K`".into()))?;
    let spec = match (&config.channel, config.mu, config.l, config.sigma) {
        (Some(c), None, None, None) => c.clone(),
        (None, Some(mu), None, None) => ChannelSpec::Symmetric { mu },
        (None, None, Some(l), None) => ChannelSpec::Circular { l },
        (None, None, None, Some(sigma)) => ChannelSpec::Gaussian { sigma },
        _ => {
            return Err(Error::Parameter(
                "custom runs need exactly one of `channel`, `mu`, `l`, `sigma`".into(),
            ))
        }
    };
    let channel = spec.build(k)?;
    let source = Source::uniform(k)?;
    let hamming = DistortionMeasure::hamming(k)?;
    let ms = config.m_list(k, (1..=k).collect())?;
    let grid = config.grid()?;
    let budget = config.budget()?;
    let methods = config.methods.clone().unwrap_or(vec![
        MethodSpec::Holder,
        MethodSpec::ClassicalDpt,
        MethodSpec::ModularCode,
    ]);
    if methods.is_empty() {
        return Err(Error::Parameter("method list is empty".into()));
    }

    let mut b = CsvBundle::new(ExperimentKind::Custom);
    let mut lower = Vec::new();
    for &method in &methods {
        let (name, artifact) = match method {
            MethodSpec::BruteForce => (
                "brute_force",
                Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::BruteForce(budget), &grid)?),
            ),
            MethodSpec::Holder => (
                "holder",
                Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::Holder, &grid)?),
            ),
            MethodSpec::SymmetricClosedForm => {
                let ChannelSpec::Symmetric { mu } = spec else {
                    return Err(Error::Parameter(
                        "symmetric_closed_form needs the symmetric channel".into(),
                    ));
                };
                (
                    "symmetric_closed_form",
                    Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::SymmetricClosedForm { mu }, &grid)?),
                )
            }
            MethodSpec::CircularClosedForm => {
                let ChannelSpec::Circular { l } = spec else {
                    return Err(Error::Parameter(
                        "circular_closed_form needs the circular channel".into(),
                    ));
                };
                (
                    "circular_closed_form",
                    Artifact::LowerBound(generalized_curve(&source, &channel, &ms, CapacityMethod::CircularClosedForm { l }, &grid)?),
                )
            }
            MethodSpec::ClassicalDpt => (
                "classical_dpt",
                Artifact::LowerBound(classical_curve(&source, &channel, &ms, budget)?),
            ),
            MethodSpec::ModularCode => (
                "modular_code",
                code_rows(&ms, "modular", |m| modular_code(&source, &channel, &hamming, m))?,
            ),
            MethodSpec::OptimalCode => (
                "optimal_code",
                code_rows(&ms, "brute_force_optimal", |m| {
                    brute_force_optimal_code(&source, &channel, &hamming, m, budget)
                })?,
            ),
            MethodSpec::Wz => (
                "wz_curve",
                Artifact::Wz(wz_rd_curve(&source, &channel, &hamming, &config.wz_options())?),
            ),
        };
        if b.get(name).is_some() {
            return Err(Error::Parameter(format!("method `{name}` listed twice")));
        }
        if method.is_lower_bound() {
            lower.push(name);
        }
        b.push(name, artifact);
    }
    if !lower.is_empty() {
        let curves: Vec<&BoundCurve> = lower.iter().filter_map(|n| b.curve(n)).collect();
        let env = envelope_curve(&curves, &ms)?;
        b.push("envelope", Artifact::LowerBound(env));
    }
    Ok(b)
}

/// Runs `kind`. A config that names a different experiment is rejected.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<CsvBundle> {
    if let Some(named) = config.experiment {
        if named != kind {
            return Err(Error::Parameter(format!(
                "config is for {named} but {kind} was requested"
            )));
        }
    }
    match kind {
        ExperimentKind::Fig2 => run_fig2(config),
        ExperimentKind::Fig3 => run_fig3(config),
        ExperimentKind::LargeGaussian | ExperimentKind::LargeCircular => {
            run_large_alphabet(kind, config)
        }
        ExperimentKind::Custom => run_custom(config),
    }
}

/// Reads a JSON config from `path`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_json(&fs::read_to_string(path)?)
}

/// Rendered CSV text keyed by file name.
pub fn render_map(bundle: &CsvBundle) -> Result<BTreeMap<String, String>> {
    Ok(bundle
        .render()?
        .into_iter()
        .map(|(n, b)| (n, String::from_utf8(b).expect("CSV output is UTF-8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_wz() -> ExperimentConfig {
        ExperimentConfig {
            wz_restarts: Some(4),
            ..ExperimentConfig::default()
        }
    }

    fn distortions(c: &BoundCurve) -> Vec<f64> {
        c.points().iter().map(|p| p.distortion).collect()
    }

    #[test]
    fn fig2_columns() {
        let b = run_fig2(&quick_wz()).unwrap();
        let exact: Vec<f64> = b.codes("exact_optimum").unwrap().iter().map(|(c, _)| c.distortion).collect();
        for (got, want) in exact.iter().zip([0.3, 0.2, 0.1, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(b.soundness_violations(1e-9).is_empty());
        let g = distortions(b.curve("generalized_dpt").unwrap());
        let w = distortions(b.curve("wz_trivial").unwrap());
        assert!(g[1] >= w[1] && g[2] >= w[2], "{g:?} vs {w:?}");
        assert_eq!(b.render().unwrap().len(), 6);
    }

    #[test]
    fn fig3_columns() {
        let b = run_fig3(&quick_wz()).unwrap();
        let g = distortions(b.curve("generalized_dpt").unwrap());
        let h = distortions(b.curve("holder").unwrap());
        let c = distortions(b.curve("classical_dpt").unwrap());
        assert_eq!(g[2], 0.0);
        assert!(g.iter().zip(&h).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(g.iter().zip(&c).any(|(a, b)| b < a));
        assert!(b.soundness_violations(1e-9).is_empty());
        let modular: Vec<f64> = b.codes("modular_code").unwrap().iter().map(|(c, _)| c.distortion).collect();
        assert!((modular[2] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn config_errors() {
        let bad = ExperimentConfig { l: Some(3), ..Default::default() };
        assert!(matches!(run_fig2(&bad), Err(Error::Parameter(_))));
        let bad = ExperimentConfig { m_list: Some(vec![2, 1]), ..Default::default() };
        assert!(run_fig3(&bad).is_err());
        let bad = ExperimentConfig { k: Some(32), ..Default::default() };
        assert!(run_large_alphabet(ExperimentKind::LargeGaussian, &bad).is_err());
        let bad = ExperimentConfig { experiment: Some(ExperimentKind::Fig3), ..Default::default() };
        assert!(run(ExperimentKind::Fig2, &bad).is_err());
        assert!(run_custom(&ExperimentConfig::default()).is_err());
        assert!(ExperimentConfig::from_json(r#"{"K": 4, "bogus": 1}"#).is_err());
    }

    #[test]
    fn custom_budget_error() {
        let cfg = ExperimentConfig::from_json(
            r#"{"K": 8, "mu": 0.5, "M": [3], "methods": ["brute_force"], "budget": 100}"#,
        )
        .unwrap();
        assert!(matches!(run_custom(&cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn custom_envelope_is_convex() {
        let cfg = ExperimentConfig::from_json(
            r#"{"K": 5, "channel": {"kind": "gaussian", "sigma": 0.8},
                "methods": ["holder", "brute_force", "classical_dpt", "optimal_code"]}"#,
        )
        .unwrap();
        let b = run_custom(&cfg).unwrap();
        let env = b.curve("envelope").unwrap();
        let pts = env.pairs();
        for w in pts.windows(3) {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            assert!(s2 - s1 >= -1e-12);
        }
        assert!(b.soundness_violations(1e-9).is_empty());
    }

    #[test]
    fn reruns_are_identical() {
        let cfg = ExperimentConfig::from_json(r#"{"K": 4, "mu": 0.6, "methods": ["holder", "wz"], "wz_restarts": 3, "seed": 9}"#)
            .unwrap();
        let a = render_map(&run_custom(&cfg).unwrap()).unwrap();
        let b = render_map(&run_custom(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_roundtrip() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "custom", "K": 4, "channel": {"kind": "circular", "l": 2},
                "M": [1, 2], "alpha_grid": {"start": 1.1, "end": 1.9, "points": 9},
                "methods": ["circular_closed_form"], "seed": 3}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
