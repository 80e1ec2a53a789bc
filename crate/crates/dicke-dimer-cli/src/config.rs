//! Run configuration: one TOML document mirrored one-to-one by flags.
//!
//! Every run resolves defaults, then the config file, then command-line
//! flags into a fully concrete [`RunConfig`] and writes that back out as
//! `effective-config.toml` next to the artifacts. Feeding the echo back in
//! with `--config` and no flags reproduces the run byte for byte, because
//! the echo carries every knob as a literal value and TOML floats print in
//! round-trip-exact form.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use dicke_dimer::dynamics::{
    DEFAULT_RAMP_K, DEFAULT_RAMP_T_F, DEFAULT_SAMPLE_DT, DEFAULT_SEED_EPS, DEFAULT_T_MAX,
};
use dicke_dimer::model::{CavityParams, DimerParams};
use dicke_dimer::ode::SolverOpts;
use dicke_dimer::phasemap::{AxisName, GridAxis, DEFAULT_BOUNDARY_RESOLUTION};
use dicke_dimer::stability::DEFAULT_EPSILON_MARGIN;
use dicke_dimer::steadystate::{SrpSign, SrpSymmetry, DEFAULT_NEWTON_TOL};

/// Artifact format choice where a command offers one (the sweep diagram).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Physical parameters of the dimer. The per-cavity keys are what the file
/// stores; the `--lambda`, `--kappa`, `--chi` shorthands fan out to both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega_c: f64,
    pub omega_a: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub hopping: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            omega_c: 1.0,
            omega_a: 1.0,
            lambda1: 0.5,
            lambda2: 0.5,
            kappa1: 0.2,
            kappa2: 0.2,
            chi1: 0.0,
            chi2: 0.0,
            hopping: 0.2,
        }
    }
}

impl ParamsConfig {
    pub fn build(&self) -> anyhow::Result<DimerParams> {
        let c1 = CavityParams::new(self.omega_c, self.omega_a, self.lambda1, self.kappa1, self.chi1)
            .context("cavity 1")?;
        let c2 = CavityParams::new(self.omega_c, self.omega_a, self.lambda2, self.kappa2, self.chi2)
            .context("cavity 2")?;
        Ok(DimerParams::new(c1, c2, self.hopping)?)
    }
}

/// Numerical tolerances: `rel`/`abs` drive the integrator, `steady` the
/// quiet-window detector, `newton` the root polish, and `margin` the neutral
/// eigenvalue band of stability verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancesConfig {
    pub rel: f64,
    pub abs: f64,
    pub steady: f64,
    pub newton: f64,
    pub margin: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        let solver = SolverOpts::default();
        Self {
            rel: solver.rtol,
            abs: solver.atol,
            steady: solver.steady_tol,
            newton: DEFAULT_NEWTON_TOL,
            margin: DEFAULT_EPSILON_MARGIN,
        }
    }
}

impl TolerancesConfig {
    pub fn solver_opts(&self) -> SolverOpts {
        SolverOpts {
            rtol: self.rel,
            atol: self.abs,
            steady_tol: self.steady,
            ..SolverOpts::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: ".".into(),
            format: OutputFormat::Csv,
        }
    }
}

/// Knobs of `steady` that go beyond the shared parameter set: asymmetric
/// dimers have no closed-form branches, so roots are hunted by relaxing the
/// canonical seeds for `t_max` and polishing the endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyConfig {
    pub t_max: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self { t_max: 2000.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    /// One of all | np | ssrp+ | ssrp- | asrp+ | asrp-.
    pub branch: String,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            branch: "all".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchConfig {
    pub j_initial: f64,
    /// Hopping the system relaxes at; inherits `params.hopping` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_final: Option<f64>,
    pub start: String,
    pub seed_signs: String,
    pub seed_eps: f64,
    pub t_max: f64,
    pub sample_dt: f64,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self {
            j_initial: 0.0,
            j_final: None,
            start: "np,np".into(),
            seed_signs: "+-".into(),
            seed_eps: DEFAULT_SEED_EPS,
            t_max: DEFAULT_T_MAX,
            sample_dt: DEFAULT_SAMPLE_DT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RampConfig {
    pub j_initial: f64,
    pub j_final: f64,
    pub k: f64,
    pub t_f: f64,
    pub start: String,
    pub seed_signs: String,
    pub seed_eps: f64,
    /// Branch the tracking error compares against: auto | symmetric | antisymmetric.
    pub track: String,
    pub sample_dt: f64,
}

impl Default for RampConfig {
    fn default() -> Self {
        Self {
            j_initial: 0.2,
            j_final: 0.4,
            k: DEFAULT_RAMP_K,
            t_f: DEFAULT_RAMP_T_F,
            start: "np,np".into(),
            seed_signs: "+-".into(),
            seed_eps: DEFAULT_SEED_EPS,
            track: "auto".into(),
            sample_dt: DEFAULT_SAMPLE_DT,
        }
    }
}

/// One sweep axis, the file form of `--axis name:lo:hi:n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisConfig {
    pub fn build(&self) -> anyhow::Result<GridAxis> {
        let name: AxisName = self.name.parse()?;
        Ok(GridAxis::linspace(name, self.lo, self.hi, self.n)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// analytic | basin.
    pub strategy: String,
    /// Worker threads for the grid; 0 keeps the library's default pool.
    pub workers: usize,
    /// Relaxation horizon per basin seed.
    pub basin_t_max: f64,
    pub axis: Vec<AxisConfig>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            strategy: "analytic".into(),
            workers: 0,
            basin_t_max: 5000.0,
            axis: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    /// np-asrp | ssrp | multistable.
    pub kind: String,
    /// Parameter swept along the curve.
    pub scan: String,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Axis bisected at each scan value (multistable kind only).
    pub bisect: String,
    pub bisect_lo: f64,
    pub bisect_hi: f64,
    pub resolution: f64,
    /// Classification strategy behind the multistable kind: analytic | basin.
    pub strategy: String,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            kind: "np-asrp".into(),
            scan: "lambda".into(),
            lo: 0.2,
            hi: 1.0,
            points: 101,
            bisect: "hopping".into(),
            bisect_lo: 0.0,
            bisect_hi: 0.5,
            resolution: DEFAULT_BOUNDARY_RESOLUTION,
            strategy: "analytic".into(),
        }
    }
}

/// The whole run: physical parameters, tolerances, output plumbing, and one
/// block per subcommand. Unknown keys are parse errors, so typos surface as
/// configuration diagnostics instead of silently falling back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub tolerances: TolerancesConfig,
    pub output: OutputConfig,
    pub steady: SteadyConfig,
    pub stability: StabilityConfig,
    pub quench: QuenchConfig,
    pub ramp: RampConfig,
    pub sweep: SweepConfig,
    pub boundary: BoundaryConfig,
}

impl RunConfig {
    /// Defaults overlaid with the file: absent keys keep their default value.
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse config file {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        toml::to_string_pretty(self).context("cannot serialize effective configuration")
    }
}

pub fn parse_seed_signs(s: &str) -> anyhow::Result<(SrpSign, SrpSign)> {
    let sign = |c: char| match c {
        '+' => Ok(SrpSign::Plus),
        '-' => Ok(SrpSign::Minus),
        other => Err(anyhow!("seed sign must be + or -, got '{other}'")),
    };
    let chars: Vec<char> = s.trim().chars().collect();
    if chars.len() != 2 {
        bail!("seed signs must be two characters like +- or ++, got '{s}'");
    }
    Ok((sign(chars[0])?, sign(chars[1])?))
}

pub fn parse_track(s: &str) -> anyhow::Result<Option<SrpSymmetry>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(None),
        "symmetric" | "ssrp" => Ok(Some(SrpSymmetry::Symmetric)),
        "antisymmetric" | "asrp" => Ok(Some(SrpSymmetry::Antisymmetric)),
        other => Err(anyhow!(
            "track must be auto, symmetric or antisymmetric, got '{other}'"
        )),
    }
}

/// Parses one `--axis` occurrence, `name:lo:hi:n`.
pub fn parse_axis_flag(s: &str) -> anyhow::Result<AxisConfig> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        bail!("axis must look like name:lo:hi:n, got '{s}'");
    }
    let axis = AxisConfig {
        name: parts[0].trim().to_string(),
        lo: parts[1].trim().parse().context("axis lo")?,
        hi: parts[2].trim().parse().context("axis hi")?,
        n: parts[3].trim().parse().context("axis n")?,
    };
    axis.build()?;
    Ok(axis)
}
