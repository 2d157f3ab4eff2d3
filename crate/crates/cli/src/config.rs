use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use wavepos::fd_oracle::{PowerSign, Rhs};
use wavepos::focusing_solver::{Direction, PlusData, Soliton};
use wavepos::freewave::RadialCauchyData;
use wavepos::null_solver::ProbeSet;
use wavepos::radial::io::read_csv;
use wavepos::radial::{Parity, RadialField, RadialGrid, RadialProfile};
use wavepos::transforms::{NonlinearityProfile, ProfileSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Scenario files shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("constant-null", include_str!("../scenarios/constant-null.toml")),
    ("blowup-gaussian-f1", include_str!("../scenarios/blowup-gaussian-f1.toml")),
    ("passing-gaussian-f1", include_str!("../scenarios/passing-gaussian-f1.toml")),
    ("soliton-iteration", include_str!("../scenarios/soliton-iteration.toml")),
    ("threshold-window", include_str!("../scenarios/threshold-window.toml")),
];

/// Invalid configuration; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<wavepos::Error> for ConfigError {
    fn from(e: wavepos::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub fn config_error<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<Scenario>,
    /// Directory that relative paths in the scenarios refer to.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub equation: Equation,
    pub data: DataSpec,
    /// Required unless the data are tabulated.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    pub horizon: f64,
    #[serde(default)]
    pub probes: ProbeSpec,
    /// Commands run by `verify-all` and `sweep`; empty means the equation's
    /// defaults.
    #[serde(default)]
    pub checks: Vec<Command>,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub iterate: IterateSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Solve,
    Blowup,
    Iterate,
    Oracle,
    Window,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Solve => "solve",
            Command::Blowup => "blowup",
            Command::Iterate => "iterate",
            Command::Oracle => "oracle",
            Command::Window => "window",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Equation {
    /// `u_tt - Δu = f(u)(u_t² - |∇u|²)`.
    NullForm { f: ProfileSpec },
    /// `u_tt - Δu = ±|u|^N u`.
    Focusing {
        n: f64,
        #[serde(default = "focusing_sign")]
        sign: PowerSign,
    },
}

fn focusing_sign() -> PowerSign {
    PowerSign::Focusing
}

impl Equation {
    pub fn rhs(&self) -> Rhs {
        match self {
            Equation::NullForm { f } => Rhs::NullForm { f: f.clone() },
            Equation::Focusing { n, sign } => Rhs::Power { n: *n, sign: *sign },
        }
    }

    pub fn default_checks(&self) -> Vec<Command> {
        match self {
            Equation::NullForm { .. } => vec![Command::Classify, Command::Solve],
            Equation::Focusing { .. } => vec![Command::Classify, Command::Iterate, Command::Oracle],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    /// `u0 = value`, `u1 = velocity`.
    Constant {
        value: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// `u0 = amplitude e^{-r²/width²}`, `u1 = velocity r e^{-r²/width²}`.
    Gaussian {
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        velocity: f64,
    },
    /// `u0 = amplitude Q`, `r u1 = momentum (rQ)'` for the ground state `Q`.
    Soliton {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        momentum: f64,
    },
    /// Threshold data `(0, (1∓ε)(Q_r + Q/r))`, or `((1+ε)Q, 0)` for the
    /// displacement variant of the plus side.
    Window {
        epsilon: f64,
        direction: Direction,
        #[serde(default)]
        plus_data: PlusData,
    },
    /// CSV files with columns `r,value` on a common grid.
    Tabulated {
        u0: PathBuf,
        #[serde(default)]
        u1: Option<PathBuf>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Sinh grading (with `n`), denser near the origin.
    #[serde(default)]
    pub stretch: Option<f64>,
    /// Explicit nodes; must start at 0 and increase.
    #[serde(default)]
    pub nodes: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid<f64>, ConfigError> {
        if let Some(nodes) = &self.nodes {
            if self.r_max.is_some() || self.n.is_some() || self.spacing.is_some() {
                return config_error("grid: `nodes` excludes r_max, n and spacing");
            }
            return Ok(RadialGrid::from_nodes(nodes.clone())?);
        }
        let Some(r_max) = self.r_max else {
            return config_error("grid: r_max is required");
        };
        Ok(match (self.n, self.spacing, self.stretch) {
            (Some(n), None, None) => RadialGrid::uniform(r_max, n)?,
            (Some(n), None, Some(s)) => RadialGrid::sinh(r_max, n, s)?,
            (None, Some(h), None) => RadialGrid::with_spacing(h, r_max)?,
            _ => return config_error("grid: give exactly one of n or spacing (stretch needs n)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSpec {
    /// Probe times spread over `[-horizon, horizon]`.
    pub times: usize,
    pub radii: Option<Vec<f64>>,
    /// Output stride for lattice CSV snapshots.
    pub lattice_stride: usize,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            times: 17,
            radii: None,
            lattice_stride: 4,
        }
    }
}

impl ProbeSpec {
    pub fn set(&self, horizon: f64) -> ProbeSet {
        let mut p = ProbeSet::tensor(horizon, self.times);
        p.radii = self.radii.clone();
        p
    }
}

/// Expected outcomes; each one present becomes an assertion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Expect {
    /// Verdict of the scenario's primary criterion.
    pub holds: Option<bool>,
    /// The exact solution exists on `[-horizon, horizon]`.
    pub global: Option<bool>,
    /// `t0` of the blow-up report lies in `(lo, hi]`.
    pub t0: Option<[f64; 2]>,
    /// The finite-difference run crosses its blow-up threshold.
    pub blowup: Option<bool>,
    pub converged: Option<bool>,
    /// Largest sup-norm difference between the oracle and the exact solver.
    pub max_error: Option<f64>,
    /// Largest relative drift of the conserved energy.
    pub max_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    pub h: f64,
    pub cfl: f64,
    pub r_max: Option<f64>,
    pub threshold: f64,
    pub snapshots: Vec<f64>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            h: 0.02,
            cfl: 0.5,
            r_max: None,
            threshold: 1e8,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterateSpec {
    pub h: f64,
    pub r_max: Option<f64>,
    pub cap: f64,
    pub tol: f64,
    pub n_max: usize,
}

impl Default for IterateSpec {
    fn default() -> Self {
        IterateSpec {
            h: 0.05,
            r_max: None,
            cap: 1e6,
            tol: 1e-10,
            n_max: 200,
        }
    }
}

/// A scenario with its data and profile built.
pub struct Built {
    pub data: RadialCauchyData<f64>,
    pub profile: Option<Arc<NonlinearityProfile<f64>>>,
}

impl Scenario {
    pub fn checks(&self) -> Vec<Command> {
        if self.checks.is_empty() {
            self.equation.default_checks()
        } else {
            self.checks.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let ctx = |m: String| ConfigError(format!("scenario {:?}: {m}", self.name));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(ctx("name must be nonempty and use [A-Za-z0-9_-]".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(ctx(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.probes.times < 2 {
            return Err(ctx("probes.times must be at least 2".into()));
        }
        if let Equation::Focusing { n, .. } = self.equation {
            if !(n >= 0.0) {
                return Err(ctx(format!("power N must be nonnegative, got {n}")));
            }
        }
        match (&self.data, &self.grid) {
            (DataSpec::Tabulated { .. }, Some(_)) => {
                return Err(ctx("tabulated data carry their own grid; drop [grid]".into()))
            }
            (DataSpec::Tabulated { .. }, None) => {}
            (_, None) => return Err(ctx("a [grid] table is required".into())),
            (_, Some(_)) => {}
        }
        if let DataSpec::Window { epsilon, .. } = self.data {
            if !matches!(self.equation, Equation::Focusing { n, .. } if n == 4.0) {
                return Err(ctx("window data need the focusing equation with N = 4".into()));
            }
            if !(0.0..=0.5).contains(&epsilon) {
                return Err(ctx(format!("epsilon must lie in [0, 0.5], got {epsilon}")));
            }
        }
        for c in self.checks() {
            self.supports(c).map_err(|e| ctx(e.0))?;
        }
        Ok(())
    }

    /// Whether `command` applies to this scenario's equation and data.
    pub fn supports(&self, command: Command) -> Result<(), ConfigError> {
        let null = matches!(self.equation, Equation::NullForm { .. });
        let ok = match command {
            Command::Classify | Command::Oracle => true,
            Command::Solve | Command::Blowup => null,
            Command::Iterate => !null && matches!(self.equation, Equation::Focusing { sign: PowerSign::Focusing, .. }),
            Command::Window => matches!(self.data, DataSpec::Window { .. }),
        };
        if ok {
            Ok(())
        } else {
            config_error(format!("{} does not apply to this equation/data", command.name()))
        }
    }

    pub fn build(&self, base: &Path) -> Result<Built, ConfigError> {
        let ctx = |e: ConfigError| ConfigError(format!("scenario {:?}: {}", self.name, e.0));
        let data = self.build_data(base).map_err(ctx)?;
        let profile = match &self.equation {
            Equation::NullForm { f } => Some(Arc::new(NonlinearityProfile::from_spec(f).map_err(|e| ctx(e.into()))?)),
            Equation::Focusing { .. } => None,
        };
        Ok(Built { data, profile })
    }

    fn build_data(&self, base: &Path) -> Result<RadialCauchyData<f64>, ConfigError> {
        if let DataSpec::Tabulated { u0, u1 } = &self.data {
            let read = |p: &PathBuf| -> Result<RadialField<f64>, ConfigError> {
                let path = base.join(p);
                let file = std::fs::File::open(&path)
                    .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                read_csv(file, Parity::Even).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
            };
            let f0 = read(u0)?;
            let f1 = match u1 {
                Some(p) => read(p)?,
                None => RadialField::zeros(f0.grid().clone()),
            };
            return Ok(RadialCauchyData::new(f0, f1)?);
        }
        let grid = Arc::new(self.grid.as_ref().expect("validated").build()?);
        let q = Soliton::<f64>::ground();
        Ok(match self.data {
            DataSpec::Constant { value, velocity } => RadialCauchyData::from_fns(grid, move |_| value, move |_| velocity)?,
            DataSpec::Gaussian {
                amplitude,
                width,
                velocity,
            } => {
                if !(width > 0.0) {
                    return config_error(format!("gaussian width must be positive, got {width}"));
                }
                let g = move |r: f64| (-r * r / (width * width)).exp();
                RadialCauchyData::from_fns(grid, move |r| amplitude * g(r), move |r| velocity * r * g(r))?
            }
            DataSpec::Soliton { amplitude, momentum } => RadialCauchyData::from_weighted_fns(
                grid,
                move |r| amplitude * q.value(r),
                move |r| momentum * q.t_transform(r),
                Parity::Even,
            )?,
            DataSpec::Window {
                epsilon,
                direction,
                plus_data,
            } => match direction {
                Direction::Plus if plus_data == PlusData::Displacement => {
                    RadialCauchyData::from_fns(grid, move |r| (1.0 + epsilon) * q.value(r), |_| 0.0)?
                }
                _ => {
                    let a = if direction == Direction::Plus { 1.0 + epsilon } else { 1.0 - epsilon };
                    RadialCauchyData::from_weighted_fns(grid, |_| 0.0, move |r| a * q.t_transform(r), Parity::Even)?
                }
            },
            DataSpec::Tabulated { .. } => unreachable!(),
        })
    }
}

impl Config {
    pub fn parse(text: &str, base: PathBuf) -> Result<Config, ConfigError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))?;
        cfg.base = base;
        if cfg.schema_version != SCHEMA_VERSION {
            return config_error(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            ));
        }
        if cfg.scenarios.is_empty() {
            return config_error("config holds no [[scenario]] tables");
        }
        let mut names: Vec<&str> = cfg.scenarios.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return config_error(format!("duplicate scenario name {:?}", w[0]));
        }
        for s in &cfg.scenarios {
            s.validate()?;
        }
        Ok(cfg)
    }

    /// Reads a config file, or a bundled scenario when `spec` names one and
    /// no such file exists.
    pub fn load(spec: &str) -> Result<Config, ConfigError> {
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{spec}: {e}")))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            return Config::parse(&text, base);
        }
        match BUNDLED.iter().find(|(name, _)| *name == spec) {
            Some((_, text)) => Config::parse(text, PathBuf::from(".")),
            None => config_error(format!(
                "{spec}: no such file or bundled scenario (bundled: {})",
                BUNDLED.iter().map(|b| b.0).collect::<Vec<_>>().join(", ")
            )),
        }
    }

    pub fn bundled() -> Result<Config, ConfigError> {
        let mut all = Vec::new();
        for (name, text) in BUNDLED {
            let cfg = Config::parse(text, PathBuf::from(".")).map_err(|e| ConfigError(format!("bundled {name}: {e}")))?;
            all.extend(cfg.scenarios);
        }
        Ok(Config {
            schema_version: SCHEMA_VERSION,
            scenarios: all,
            base: PathBuf::from("."),
        })
    }

    pub fn select(mut self, name: Option<&str>) -> Result<Config, ConfigError> {
        if let Some(name) = name {
            self.scenarios.retain(|s| s.name == name);
            if self.scenarios.is_empty() {
                return config_error(format!("no scenario named {name:?}"));
            }
        }
        Ok(self)
    }
}
