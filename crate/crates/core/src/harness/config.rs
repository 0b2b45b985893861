//! Run configuration: parsing, defaults, eager validation and the
//! canonical text the experiment hash is taken over.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::FrontModel;
use crate::nonlinearity::{Nonlinearity, NonlinearityError, NonlinearityKind};
use crate::numerics::Quadrature;
use crate::sim1d::{CompareWindow, GapSetup, Shape1D, Sim1DConfig};
use crate::sim2d::{GridSpec2D, Sim2DConfig, WideningFamily, WideningParameter};
use crate::wave::{rate_constraint_bound, WaveGrid, WaveSolveOptions};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveBlock {
    pub xi_min: f64,
    pub xi_max: f64,
    pub h: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for WaveBlock {
    fn default() -> Self {
        Self { xi_min: -40.0, xi_max: 40.0, h: 0.01, tol: 1e-10, max_iterations: 50 }
    }
}

impl WaveBlock {
    pub fn grid(&self) -> Result<WaveGrid, HarnessError> {
        WaveGrid::with_spacing(self.xi_min, self.xi_max, self.h).map_err(|e| HarnessError::validation("wave", e))
    }

    pub fn options(&self) -> WaveSolveOptions {
        WaveSolveOptions { tol: self.tol, max_iterations: self.max_iterations, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralBlock {
    /// Spacing for the gap computation; the wave grid's when absent.
    pub h: Option<f64>,
    pub quadrature: Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsBlock {
    pub directory: String,
    /// Time between field dumps; no dumps when absent.
    pub cadence: Option<f64>,
}

impl Default for OutputsBlock {
    fn default() -> Self {
        Self { directory: "out".into(), cadence: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayBlock {
    pub t_from: f64,
    /// The fit stops at `fraction * M / c`.
    pub fraction: f64,
    pub min_r_squared: f64,
}

impl Default for DecayBlock {
    fn default() -> Self {
        Self { t_from: 5.0, fraction: 0.8, min_r_squared: 0.95 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntireBlock {
    pub n_list: Vec<u32>,
    pub window: CompareWindow,
}

impl Default for EntireBlock {
    fn default() -> Self {
        Self { n_list: vec![10, 20, 30, 40, 50], window: CompareWindow { t0: 5.0, x_lo: -10.0, x_hi: 10.0 } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdParameter {
    Amplitude,
    Width,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdBlock {
    pub vary: ThresholdParameter,
    /// Plateau height when the width is swept.
    pub amplitude: f64,
    /// Plateau length when the amplitude is swept.
    pub width: f64,
    pub values: Vec<f64>,
    pub gap: GapSetup,
    pub t_end: f64,
    pub snapshot_dt: f64,
}

impl Default for ThresholdBlock {
    fn default() -> Self {
        Self {
            vary: ThresholdParameter::Width,
            amplitude: -1.0,
            width: 30.0,
            values: vec![1.0, 2.0, 5.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0],
            gap: GapSetup::default(),
            t_end: 800.0,
            snapshot_dt: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockingBlock {
    pub family: WideningFamily,
    pub values: Vec<f64>,
    pub grid: GridSpec2D,
    #[serde(rename = "M")]
    pub m: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
    /// Sliding-sphere parameter for the family; small, the walls bend hard.
    pub r_ball: f64,
}

impl Default for BlockingBlock {
    fn default() -> Self {
        Self {
            family: WideningFamily { vary: WideningParameter::Rate, ratio: 10.0, rate: 2.0, center: 0.0 },
            values: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            grid: GridSpec2D { x_min: -40.0, x_max: 30.0, hx: 0.05, nz: 21 },
            m: 20.0,
            dt: 0.05,
            t_end: 300.0,
            snapshot_dt: 2.0,
            r_ball: 0.0005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupersolBlock {
    pub r: f64,
    /// Overrides of the derived parameters.
    pub alpha: Option<f64>,
    pub a: Option<f64>,
    pub epsilon: Option<f64>,
    pub t: f64,
    pub grid: GridSpec2D,
}

impl Default for SupersolBlock {
    fn default() -> Self {
        Self { r: 0.2, alpha: None, a: None, epsilon: None, t: 0.0, grid: GridSpec2D { x_min: 0.0, x_max: 20.0, hx: 0.05, nz: 41 } }
    }
}

/// Settings of the experiments that are families of runs rather than one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentsBlock {
    pub decay: DecayBlock,
    pub entire: EntireBlock,
    pub threshold: ThresholdBlock,
    pub blocking: BlockingBlock,
    pub supersol: SupersolBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nonlinearity: NonlinearityKind,
    pub wave: WaveBlock,
    pub spectral: SpectralBlock,
    pub sim1d: Sim1DConfig,
    pub sim2d: Sim2DConfig,
    pub outputs: OutputsBlock,
    pub experiments: ExperimentsBlock,
    pub seed: u64,
}

/// A validated configuration with the model it describes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub model: FrontModel,
    pub canonical: String,
    pub hash: String,
}

impl RunConfig {
    /// Pretty JSON with every default written out; fixed field order.
    pub fn canonical(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serialises");
        text.push('\n');
        text
    }

    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical().as_bytes()))
    }

    /// Checks every block and solves the wave the simulations depend on.
    pub fn validate(&self) -> Result<FrontModel, HarnessError> {
        let f = self.nonlinearity()?;
        let grid = self.wave.grid()?;
        let model = FrontModel::solve(f, grid, &self.wave.options(), self.spectral.quadrature)
            .map_err(|e| HarnessError::from_model("wave", e))?;

        if let Some(h) = self.spectral.h {
            if !(h > 0.0) {
                return Err(HarnessError::validation("spectral.h", format!("must be positive, got {h}")));
            }
            WaveGrid::with_spacing(self.wave.xi_min, self.wave.xi_max, h)
                .map_err(|e| HarnessError::validation("spectral.h", e))?;
        }

        let het = &self.sim1d.heterogeneity;
        het.validate().map_err(|e| HarnessError::validation("sim1d.heterogeneity", e))?;
        if let Shape1D::Sigmoid { kappa, .. } = het.shape {
            let bound = rate_constraint_bound(&model.wave);
            if !(kappa > 0.0 && kappa < bound) {
                return Err(HarnessError::validation(
                    "sim1d.heterogeneity.shape.kappa",
                    format!("kappa = {kappa} violates 0 < kappa < -lambda - c/2 = {bound:.4}"),
                ));
            }
        }
        self.sim1d.validate(&model).map_err(|e| HarnessError::validation("sim1d", e))?;
        self.sim2d.validate(&model).map_err(|e| HarnessError::validation("sim2d", e))?;

        if let Some(c) = self.outputs.cadence {
            if !(c > 0.0) {
                return Err(HarnessError::validation("outputs.cadence", format!("must be positive, got {c}")));
            }
        }
        if self.outputs.directory.is_empty() {
            return Err(HarnessError::validation("outputs.directory", "must not be empty"));
        }
        self.validate_experiments()?;
        Ok(model)
    }

    fn nonlinearity(&self) -> Result<Nonlinearity, HarnessError> {
        let path = match self.nonlinearity {
            NonlinearityKind::Cubic { .. } => "nonlinearity.theta",
            NonlinearityKind::Tabulated { .. } => "nonlinearity.knots",
        };
        let f = Nonlinearity::from_kind(self.nonlinearity.clone()).map_err(|e| HarnessError::validation(path, e))?;
        f.validated().map_err(|e| {
            let msg = match e {
                NonlinearityError::NotInvading(v) => {
                    format!("requires integral of f over [0, 1] > 0 so that 1 invades 0, got {v:.6e}")
                }
                other => other.to_string(),
            };
            HarnessError::validation(path, msg)
        })
    }

    fn validate_experiments(&self) -> Result<(), HarnessError> {
        let e = &self.experiments;
        let bad = |path: &str, msg: String| Err(HarnessError::validation(path, msg));
        if !(e.decay.fraction > 0.0 && e.decay.min_r_squared <= 1.0) {
            return bad("experiments.decay", format!("need fraction > 0 and min_r_squared <= 1, got {:?}", e.decay));
        }
        if e.entire.n_list.is_empty() || e.entire.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return bad("experiments.entire.n_list", "must be non-empty and strictly increasing".into());
        }
        if e.entire.n_list.iter().any(|&n| (n as f64) < e.entire.window.t0) {
            return bad("experiments.entire.n_list", "every n must be at least window.t0".into());
        }
        if !(e.entire.window.x_lo < e.entire.window.x_hi && e.entire.window.t0 >= 0.0) {
            return bad("experiments.entire.window", format!("need x_lo < x_hi and t0 >= 0, got {:?}", e.entire.window));
        }
        let t = &e.threshold;
        if t.values.is_empty() || !(t.t_end > 0.0 && t.snapshot_dt > 0.0) {
            return bad("experiments.threshold", "needs values, t_end > 0 and snapshot_dt > 0".into());
        }
        if t.vary == ThresholdParameter::Width && t.values.iter().any(|&w| !(w > 0.0)) {
            return bad("experiments.threshold.values", "widths must be positive".into());
        }
        let b = &e.blocking;
        if b.values.is_empty() || !(b.dt > 0.0 && b.t_end > 0.0 && b.snapshot_dt >= b.dt) {
            return bad("experiments.blocking", "needs values, dt > 0, t_end > 0 and snapshot_dt >= dt".into());
        }
        let positive_ratio = b.family.vary == WideningParameter::Ratio || b.family.ratio > 0.0;
        let positive_rate = b.family.vary == WideningParameter::Rate || b.family.rate > 0.0;
        if !(positive_ratio && positive_rate && b.values.iter().all(|&v| v > 0.0)) {
            return bad("experiments.blocking.family", "ratios and rates must be positive".into());
        }
        b.grid.validate().map_err(|err| HarnessError::validation("experiments.blocking.grid", err))?;
        let s = &e.supersol;
        if !(s.r > 0.0) {
            return bad("experiments.supersol.r", format!("must be positive, got {}", s.r));
        }
        s.grid.validate().map_err(|err| HarnessError::validation("experiments.supersol.grid", err))?;
        Ok(())
    }
}

/// Parses, fills defaults and validates.
pub fn parse_config(text: &str) -> Result<LoadedConfig, HarnessError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
        line: e.line(),
        column: e.column(),
        // serde_json appends the position itself
        message: {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            full.strip_suffix(&suffix).unwrap_or(&full).to_string()
        },
    })?;
    LoadedConfig::new(config)
}

impl LoadedConfig {
    pub fn new(config: RunConfig) -> Result<Self, HarnessError> {
        let model = config.validate()?;
        let canonical = config.canonical();
        let hash = config.hash();
        Ok(LoadedConfig { config, model, canonical, hash })
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        let l = parse_config("{}").unwrap();
        assert_eq!(l.config, RunConfig::default());
        assert_eq!(l.config.wave.h, 0.01);
        assert!((l.model.c() - 2f64.sqrt() / 4.0).abs() < 1e-5);
    }

    #[test]
    fn non_invading_theta_is_rejected() {
        let e = parse_config(r#"{"nonlinearity": {"kind": "cubic", "theta": 0.6}}"#).unwrap_err();
        match e {
            HarnessError::Validation { path, message } => {
                assert_eq!(path, "nonlinearity.theta");
                assert!(message.contains("integral of f over [0, 1] > 0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn steep_heterogeneity_is_rejected() {
        let text = r#"{"sim1d": {"heterogeneity": {"shape": {"kind": "sigmoid", "amplitude": 0.5, "kappa": 0.9}, "M": 20}}}"#;
        match parse_config(text).unwrap_err() {
            HarnessError::Validation { path, message } => {
                assert_eq!(path, "sim1d.heterogeneity.shape.kappa");
                assert!(message.contains("0.5303"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        for text in [r#"{"sim1d": {"dtt": 0.1}}"#, r#"{"colour": 1}"#, "{\n  \"nonlinearity\": {\"kind\": \"cubic\", \"theta\": 0.25, \"x\": 1}}"] {
            assert!(matches!(parse_config(text), Err(HarnessError::Parse { .. })), "{text}");
        }
        match parse_config("{\n  \"seed\": }") {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn downstream_errors_carry_the_block() {
        let e = parse_config(r#"{"sim2d": {"dt": 5.0}}"#).unwrap_err();
        assert!(matches!(e, HarnessError::Validation { ref path, .. } if path == "sim2d"), "{e:?}");
        let e = parse_config(r#"{"experiments": {"entire": {"n_list": [20, 10]}}}"#).unwrap_err();
        assert!(matches!(e, HarnessError::Validation { ref path, .. } if path == "experiments.entire.n_list"));
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let text = r#"{"seed": 7, "sim1d": {"dt": 0.02}, "nonlinearity": {"theta": 0.3, "kind": "cubic"}}"#;
        let a = parse_config(text).unwrap();
        let b = parse_config(&a.canonical).unwrap();
        assert_eq!(a.canonical, b.canonical);
        assert_eq!(a.hash, b.hash);
        assert_eq!(a.hash.len(), 64);
        let c = parse_config(r#"{"seed": 8}"#).unwrap();
        assert_ne!(a.hash, c.hash);
    }
}
