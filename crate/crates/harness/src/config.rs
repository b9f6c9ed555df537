//! Experiment configuration read from TOML.
//!
//! Every section has defaults, so a file containing only `experiment = "sir"`
//! is a complete configuration. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use afdm_core::baselines::BaselineConfig;
use afdm_core::papr::PaprSearchConfig;
use afdm_core::pso::PsoConfig;
use afdm_core::sir::{AdamConfig, BlockStart, SirOptConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Papr,
    Sir,
    Crlb,
    Sensitivity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Papr => "papr",
            ExperimentKind::Sir => "sir",
            ExperimentKind::Crlb => "crlb",
            ExperimentKind::Sensitivity => "sensitivity",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Modulation {
    /// Circular complex Gaussian symbols.
    Gaussian,
    /// Uniform points of a square (even bits) or rectangular (odd bits) QAM.
    Qam { order: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSpec {
    /// Integer tap delays in samples.
    pub delays: Vec<usize>,
    /// Normalized Doppler per tap.
    pub dopplers: Vec<f64>,
    /// Mean power of each Rayleigh tap.
    pub powers: Vec<f64>,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self {
            delays: vec![1, 4, 5],
            dopplers: vec![0.1, 0.4, 0.7],
            powers: vec![1.0, 0.2, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaprSection {
    /// Users sharing the band; each gets a contiguous run of `n / users` subcarriers.
    pub users: usize,
    pub oversample: usize,
    /// Coarse grid steps per unit of `c2`.
    pub coarse_steps: u32,
    /// Fine grid steps per unit of `c2`; a multiple of `coarse_steps`.
    pub fine_steps: u32,
    pub eval_budget: usize,
    pub clipping_ratio: f64,
    pub slm_candidates: usize,
    pub pts_subblocks: usize,
    /// `c2` used by the fixed-parameter AFDM column.
    pub static_c2: f64,
}

impl Default for PaprSection {
    fn default() -> Self {
        Self {
            users: 8,
            oversample: 10,
            coarse_steps: 80,
            fine_steps: 3120,
            eval_budget: 128,
            clipping_ratio: 2.0,
            slm_candidates: 128,
            pts_subblocks: 4,
            static_c2: 0.1,
        }
    }
}

impl PaprSection {
    pub fn search(&self) -> PaprSearchConfig {
        PaprSearchConfig {
            coarse_step: 1.0 / f64::from(self.coarse_steps),
            fine_step: 1.0 / f64::from(self.fine_steps),
            eval_budget: self.eval_budget,
            oversample: self.oversample,
        }
    }

    pub fn baselines(&self) -> BaselineConfig {
        BaselineConfig {
            clipping_ratio: self.clipping_ratio,
            slm_candidates: self.slm_candidates,
            pts_subblocks: self.pts_subblocks,
            eval_budget: self.eval_budget,
            oversample: self.oversample,
            ..BaselineConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartPoint {
    Corner,
    Center,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SirSection {
    /// Parameter blocks per axis.
    pub param_blocks: usize,
    pub start: StartPoint,
    pub tolerance: f64,
    pub max_iters: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub fd_step: f64,
    pub delta: f64,
    /// Points per axis of the static-parameter grid.
    pub static_grid: usize,
    /// Bin width of the emitted CDF table.
    pub cdf_step_db: f64,
}

impl Default for SirSection {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            param_blocks: 4,
            start: StartPoint::Corner,
            tolerance: 1e-6,
            max_iters: 50,
            learning_rate: adam.lr,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.eps,
            fd_step: 1e-6,
            delta: afdm_core::sir::DEFAULT_DELTA,
            static_grid: 100,
            cdf_step_db: 0.1,
        }
    }
}

impl SirSection {
    pub fn optimizer(&self) -> SirOptConfig {
        SirOptConfig {
            blocks: self.param_blocks,
            start: match self.start {
                StartPoint::Corner => BlockStart::Corner,
                StartPoint::Center => BlockStart::Center,
            },
            tolerance: self.tolerance,
            max_outer: self.max_iters,
            max_inner: self.max_iters,
            adam: AdamConfig {
                lr: self.learning_rate,
                beta1: self.beta1,
                beta2: self.beta2,
                eps: self.epsilon,
            },
            fd_step: self.fd_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrlbSection {
    pub snr_db: f64,
    /// Target delays of the improvement grid, in samples.
    pub delays: Vec<f64>,
    /// Target Dopplers of the improvement grid.
    pub dopplers: Vec<f64>,
    /// Points per axis of the static-parameter grid.
    pub static_grid: usize,
    pub jacobian_step: f64,
}

impl Default for CrlbSection {
    fn default() -> Self {
        Self {
            snr_db: 20.0,
            delays: vec![1.0, 3.0, 5.0, 7.0],
            dopplers: vec![0.1, 0.5, 0.9],
            static_grid: 100,
            jacobian_step: afdm_core::crlb::DEFAULT_JACOBIAN_STEP,
        }
    }
}

impl CrlbSection {
    pub fn snr(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSection {
    pub particles: usize,
    pub max_iters: usize,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub cognitive: f64,
    pub social: f64,
    pub tolerance: f64,
    pub patience: usize,
}

impl Default for PsoSection {
    fn default() -> Self {
        let d = PsoConfig::default();
        Self {
            particles: d.particles,
            max_iters: d.max_iters,
            inertia_start: d.inertia_start,
            inertia_end: d.inertia_end,
            cognitive: d.cognitive,
            social: d.social,
            tolerance: d.tolerance,
            patience: d.patience,
        }
    }
}

impl PsoSection {
    pub fn optimizer(&self) -> PsoConfig {
        PsoConfig {
            particles: self.particles,
            max_iters: self.max_iters,
            inertia_start: self.inertia_start,
            inertia_end: self.inertia_end,
            cognitive: self.cognitive,
            social: self.social,
            tolerance: self.tolerance,
            patience: self.patience,
            ..PsoConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivitySection {
    pub delay: f64,
    pub doppler: f64,
    /// Points per axis of the `(c1, c2)` grid.
    pub grid: usize,
    /// Quantile above which grid values are dropped for the clipped statistics.
    pub clip_quantile: f64,
}

impl Default for SensitivitySection {
    fn default() -> Self {
        Self {
            delay: 4.0,
            doppler: 0.3,
            grid: 100,
            clip_quantile: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Data blocks (trials for `sensitivity`); defaults depend on the experiment.
    #[serde(default)]
    pub blocks: Option<usize>,
    #[serde(default)]
    pub modulation: Option<Modulation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default)]
    pub papr: PaprSection,
    #[serde(default)]
    pub sir: SirSection,
    #[serde(default)]
    pub crlb: CrlbSection,
    #[serde(default)]
    pub pso: PsoSection,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_n() -> usize {
    64
}

/// A validation failure tied to the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn fail(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn core_fail(section: &str, e: afdm_core::Error) -> ConfigError {
    match e {
        afdm_core::Error::InvalidParameter { name, reason } => {
            fail(&format!("{section}.{name}"), reason)
        }
        other => fail(section, other.to_string()),
    }
}

impl ExperimentConfig {
    /// Defaults for `kind`, with `blocks` and `modulation` filled in.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            seed: default_seed(),
            n: default_n(),
            blocks: None,
            modulation: None,
            output: None,
            channel: ChannelSpec::default(),
            papr: PaprSection::default(),
            sir: SirSection::default(),
            crlb: CrlbSection::default(),
            pso: PsoSection::default(),
            sensitivity: SensitivitySection::default(),
        }
        .resolved()
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e
                .span()
                .map(|s| key_path_at(text, s.start))
                .unwrap_or_default();
            fail(
                if path.is_empty() { "<root>" } else { &path },
                e.message().trim().to_string(),
            )
        })?;
        let cfg = cfg.resolved();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration is always representable as TOML")
    }

    /// Fills experiment-dependent defaults.
    pub fn resolved(mut self) -> Self {
        if self.blocks.is_none() {
            self.blocks = Some(match self.experiment {
                ExperimentKind::Papr => 10_000,
                ExperimentKind::Sir => 100,
                ExperimentKind::Crlb => 32,
                ExperimentKind::Sensitivity => 100,
            });
        }
        if self.modulation.is_none() {
            self.modulation = Some(match self.experiment {
                ExperimentKind::Sir => Modulation::Qam { order: 4 },
                _ => Modulation::Gaussian,
            });
        }
        self
    }

    pub fn block_count(&self) -> usize {
        self.blocks.unwrap_or(0)
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation.unwrap_or(Modulation::Gaussian)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from("results").join(self.experiment.name()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 || self.n % 2 != 0 {
            return Err(fail("n", "must be a positive even integer"));
        }
        if self.block_count() == 0 {
            return Err(fail("blocks", "must be at least 1"));
        }
        if let Modulation::Qam { order } = self.modulation() {
            if order < 2 || !order.is_power_of_two() {
                return Err(fail("modulation.order", "must be a power of two, at least 2"));
            }
        }
        match self.experiment {
            ExperimentKind::Papr => self.validate_papr(),
            ExperimentKind::Sir => self.validate_sir(),
            ExperimentKind::Crlb => self.validate_crlb(),
            ExperimentKind::Sensitivity => self.validate_sensitivity(),
        }
    }

    fn validate_papr(&self) -> Result<(), ConfigError> {
        let p = &self.papr;
        if p.users == 0 || self.n % p.users != 0 {
            return Err(fail("papr.users", format!("must divide n = {}", self.n)));
        }
        if p.coarse_steps == 0 || p.fine_steps % p.coarse_steps != 0 || p.coarse_steps % 2 != 0 {
            return Err(fail(
                "papr.fine_steps",
                "coarse_steps must be even and divide fine_steps",
            ));
        }
        if (self.n / p.users) % p.pts_subblocks.max(1) != 0 || p.pts_subblocks == 0 {
            return Err(fail(
                "papr.pts_subblocks",
                "must divide the per-user subcarrier count",
            ));
        }
        if p.slm_candidates > p.eval_budget {
            return Err(fail("papr.slm_candidates", "exceeds eval_budget"));
        }
        if !p.static_c2.is_finite() {
            return Err(fail("papr.static_c2", "must be finite"));
        }
        p.search().grid().map_err(|e| core_fail("papr", e))?;
        p.baselines().validate().map_err(|e| core_fail("papr", e))?;
        Ok(())
    }

    fn validate_channel(&self) -> Result<(), ConfigError> {
        let c = &self.channel;
        if c.delays.is_empty() {
            return Err(fail("channel.delays", "must not be empty"));
        }
        if c.dopplers.len() != c.delays.len() {
            return Err(fail("channel.dopplers", "must have one entry per delay"));
        }
        if c.powers.len() != c.delays.len() {
            return Err(fail("channel.powers", "must have one entry per delay"));
        }
        if c.dopplers.iter().any(|v| !v.is_finite()) {
            return Err(fail("channel.dopplers", "must be finite"));
        }
        if c.powers.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(fail("channel.powers", "must be finite and non-negative"));
        }
        if c.delays.iter().any(|&d| d >= self.n) {
            return Err(fail("channel.delays", "must be shorter than the block"));
        }
        Ok(())
    }

    fn validate_sir(&self) -> Result<(), ConfigError> {
        self.validate_channel()?;
        let s = &self.sir;
        if !(s.delta > 0.0) {
            return Err(fail("sir.delta", "must be positive"));
        }
        if s.static_grid == 0 {
            return Err(fail("sir.static_grid", "must be at least 1"));
        }
        if !(s.cdf_step_db > 0.0) {
            return Err(fail("sir.cdf_step_db", "must be positive"));
        }
        s.optimizer().validate().map_err(|e| core_fail("sir", e))
    }

    fn validate_sensing(&self) -> Result<(), ConfigError> {
        let c = &self.crlb;
        if !c.snr_db.is_finite() {
            return Err(fail("crlb.snr_db", "must be finite"));
        }
        if !(c.jacobian_step > 0.0) {
            return Err(fail("crlb.jacobian_step", "must be positive"));
        }
        if c.static_grid == 0 {
            return Err(fail("crlb.static_grid", "must be at least 1"));
        }
        Ok(())
    }

    fn validate_crlb(&self) -> Result<(), ConfigError> {
        self.validate_sensing()?;
        let c = &self.crlb;
        if c.delays.is_empty() || c.delays.iter().any(|v| !v.is_finite()) {
            return Err(fail("crlb.delays", "must be a non-empty list of finite values"));
        }
        if c.dopplers.is_empty() || c.dopplers.iter().any(|v| !v.is_finite()) {
            return Err(fail("crlb.dopplers", "must be a non-empty list of finite values"));
        }
        self.pso.optimizer().validate().map_err(|e| core_fail("pso", e))
    }

    fn validate_sensitivity(&self) -> Result<(), ConfigError> {
        self.validate_sensing()?;
        let s = &self.sensitivity;
        if !s.delay.is_finite() || !s.doppler.is_finite() {
            return Err(fail("sensitivity", "target must be finite"));
        }
        if s.grid < 2 {
            return Err(fail("sensitivity.grid", "must be at least 2"));
        }
        if !(s.clip_quantile > 0.0 && s.clip_quantile <= 1.0) {
            return Err(fail("sensitivity.clip_quantile", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Dotted key path of the table entry that contains byte `offset`.
fn key_path_at(text: &str, offset: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut pos = 0;
    for line in text.split_inclusive('\n') {
        pos += line.len();
        let t = line.trim();
        if t.starts_with('[') {
            table = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = t.split_once('=') {
            if !t.starts_with('#') {
                key = k.trim().trim_matches('"').to_string();
            }
        }
        if offset < pos {
            break;
        }
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
