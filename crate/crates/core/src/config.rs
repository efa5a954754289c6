//! Run configuration: TOML with dotted sections, plus `key=value` overrides.
//!
//! ```toml
//! seed = 1
//!
//! [model]
//! mass = 1.0              # default 1
//! omega = 0.03
//! omega0 = "0.15*omega"   # numbers or "<factor>*omega"
//! beta = 0.2              # default 0 (decoupled, warns)
//!
//! [initial]
//! state = "bell_plus"     # or coefficients = [[re, im], [re, im], [re, im], [re, im]]
//! x0 = 0.0
//! p0 = 1.0
//!
//! [schedule]              # default kind = "constant"
//! kind = "gaussian-pulse"
//! amplitude = 10.0
//! center = 1e4
//! sigma = 1000.0
//!
//! [perturbation]
//! kind = "two-qubit"      # or "single-qubit"
//! omega1 = 0.0
//! omega2 = 0.0
//! omega3 = "0.015*omega"
//!
//! [integration]
//! t_max = 2e4
//! dt = 0.01               # default 0.01
//! stride = 100            # default 100
//!
//! [ensemble]
//! trajectories = 100
//! x_mean = 0.0
//! p_mean = 10.0
//! sigma = 1.0             # or sigma_x / sigma_p separately
//! stderr = false
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;
use toml::{Table, Value};

use crate::dynamics::{CouplingSchedule, HybridSystem, IntegrationControls};
use crate::error::{Error, Result};
use crate::model::{named_state, HybridState, ModelParams, QuantumAmplitudes};
use crate::perturbations::{PerturbationKind, PerturbationMatrix};
use crate::protocols::EnsembleSpec;

pub const DEFAULT_MASS: f64 = 1.0;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_STRIDE: usize = 100;
pub const DEFAULT_T_MAX: f64 = 2e4;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Simulate,
    Ensemble,
    Cool,
    Perturb,
    Check,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Ensemble => "ensemble",
            Experiment::Cool => "cool",
            Experiment::Perturb => "perturb",
            Experiment::Check => "check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Experiment::Simulate,
            "ensemble" => Experiment::Ensemble,
            "cool" => Experiment::Cool,
            "perturb" => Experiment::Perturb,
            "check" => Experiment::Check,
            other => return Err(Error::invalid("experiment", other, "simulate, ensemble, cool, perturb or check")),
        })
    }
}

/// A number, or a multiple of ω written as `"0.15*omega"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Expr(String),
}

impl Scalar {
    fn resolve(&self, key: &str, omega: f64) -> Result<f64> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expr(s) => {
                let mut acc = 1.0;
                for factor in s.split('*').map(str::trim) {
                    acc *= match factor {
                        "omega" => omega,
                        f => f.parse::<f64>().map_err(|_| {
                            Error::invalid(key, s, "expected a number or a product with `omega`, e.g. \"0.15*omega\"")
                        })?,
                    };
                }
                Ok(acc)
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    model: Option<RawModel>,
    initial: Option<RawInitial>,
    schedule: Option<RawSchedule>,
    perturbation: Option<RawPerturbation>,
    integration: Option<RawIntegration>,
    ensemble: Option<RawEnsemble>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    mass: Option<f64>,
    omega: Option<f64>,
    omega0: Option<Scalar>,
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    state: Option<String>,
    coefficients: Option<Vec<[f64; 2]>>,
    x0: Option<f64>,
    p0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    kind: Option<String>,
    amplitude: Option<f64>,
    center: Option<f64>,
    sigma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    kind: PerturbationKind,
    omega1: Option<Scalar>,
    omega2: Option<Scalar>,
    omega3: Option<Scalar>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    t_max: Option<f64>,
    dt: Option<f64>,
    stride: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    trajectories: Option<usize>,
    x_mean: Option<f64>,
    p_mean: Option<f64>,
    sigma: Option<f64>,
    sigma_x: Option<f64>,
    sigma_p: Option<f64>,
    stderr: Option<bool>,
}

/// Initial state as configured.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    /// Catalog name, if the state came from the catalog.
    pub name: Option<String>,
    pub amplitudes: QuantumAmplitudes,
    pub x0: f64,
    pub p0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSettings {
    pub trajectories: usize,
    pub x_mean: f64,
    pub p_mean: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub stderr: bool,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: ModelParams,
    pub initial: InitialCondition,
    pub schedule: CouplingSchedule,
    pub perturbation: Option<PerturbationMatrix>,
    pub controls: IntegrationControls,
    pub ensemble: Option<EnsembleSettings>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Non-fatal notes produced while resolving defaults.
    pub warnings: Vec<String>,
}

fn section_err(section: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Config(format!("[{section}] {e}"))
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
}

/// Sets `path` (dot separated) in `table`, creating intermediate tables.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let (path, raw) = (path.trim(), raw.trim());
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("malformed key `{path}`")));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{k}` in `{path}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parses a file (if any), applies overrides in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        // Re-serialize so type errors carry the offending key and position.
        let normalized = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        let raw: RawConfig = toml::from_str(&normalized).map_err(|e| Error::Config(e.to_string()))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let mut warnings = Vec::new();

        let model = required(raw.model, "model")?;
        let omega = required(model.omega, "model.omega")?;
        let omega0 = required(model.omega0, "model.omega0")?.resolve("model.omega0", omega)?;
        let beta = model.beta.unwrap_or_else(|| {
            warnings.push("model.beta not set; using 0 (oscillator and q-bits decoupled)".to_string());
            0.0
        });
        let params = ModelParams::new(model.mass.unwrap_or(DEFAULT_MASS), omega, omega0, beta)
            .map_err(section_err("model"))?;

        let initial = required(raw.initial, "initial")?;
        let (name, amplitudes) = match (initial.state, initial.coefficients) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("[initial] give either `state` or `coefficients`, not both".into()))
            }
            (Some(name), None) => {
                let q = named_state(&name).map_err(section_err("initial"))?;
                (Some(name), q)
            }
            (None, Some(c)) => {
                if c.len() != 4 {
                    return Err(Error::Config(format!(
                        "[initial] `coefficients` needs 4 [re, im] pairs, got {}",
                        c.len()
                    )));
                }
                let c: [Complex64; 4] = std::array::from_fn(|k| Complex64::new(c[k][0], c[k][1]));
                (None, QuantumAmplitudes::new(c).map_err(section_err("initial"))?)
            }
            (None, None) => return Err(Error::Config("missing required key `initial.state`".into())),
        };
        let initial = InitialCondition {
            name,
            amplitudes,
            x0: initial.x0.unwrap_or(0.0),
            p0: initial.p0.unwrap_or(0.0),
        };
        HybridState::new(0.0, initial.x0, initial.p0, initial.amplitudes).map_err(section_err("initial"))?;

        let schedule = match raw.schedule {
            None => CouplingSchedule::Constant,
            Some(s) => match s.kind.as_deref().unwrap_or("constant") {
                "constant" => {
                    if s.amplitude.is_some() || s.center.is_some() || s.sigma.is_some() {
                        return Err(Error::Config(
                            "[schedule] amplitude/center/sigma only apply to kind = \"gaussian-pulse\"".into(),
                        ));
                    }
                    CouplingSchedule::Constant
                }
                "gaussian-pulse" => CouplingSchedule::gaussian_pulse(
                    required(s.amplitude, "schedule.amplitude")?,
                    required(s.center, "schedule.center")?,
                    required(s.sigma, "schedule.sigma")?,
                )
                .map_err(section_err("schedule"))?,
                other => {
                    return Err(Error::Config(format!(
                        "[schedule] unknown kind `{other}`; expected \"constant\" or \"gaussian-pulse\""
                    )))
                }
            },
        };

        let perturbation = match raw.perturbation {
            None => None,
            Some(p) => {
                let w = |s: Option<Scalar>, key: &str| s.map_or(Ok(0.0), |s| s.resolve(key, omega));
                let weights = [
                    w(p.omega1, "perturbation.omega1")?,
                    w(p.omega2, "perturbation.omega2")?,
                    w(p.omega3, "perturbation.omega3")?,
                ];
                Some(PerturbationMatrix::new(p.kind, weights).map_err(section_err("perturbation"))?)
            }
        };

        let integration = raw.integration.unwrap_or(RawIntegration {
            t_max: None,
            dt: None,
            stride: None,
        });
        let controls = IntegrationControls::new(
            integration.t_max.unwrap_or(DEFAULT_T_MAX),
            integration.dt.unwrap_or(DEFAULT_DT),
            integration.stride.unwrap_or(DEFAULT_STRIDE),
        )
        .map_err(section_err("integration"))?;

        let ensemble = match raw.ensemble {
            None => None,
            Some(e) => {
                let name = |specific: &Option<f64>, key: &'static str| if specific.is_some() { key } else { "sigma" };
                let keys = [name(&e.sigma_x, "sigma_x"), name(&e.sigma_p, "sigma_p")];
                let sigma_x = e.sigma_x.or(e.sigma);
                let sigma_p = e.sigma_p.or(e.sigma);
                let settings = EnsembleSettings {
                    trajectories: required(e.trajectories, "ensemble.trajectories")?,
                    x_mean: e.x_mean.unwrap_or(0.0),
                    p_mean: e.p_mean.unwrap_or(0.0),
                    sigma_x: required(sigma_x, "ensemble.sigma")?,
                    sigma_p: required(sigma_p, "ensemble.sigma")?,
                    stderr: e.stderr.unwrap_or(false),
                };
                if settings.trajectories == 0 {
                    return Err(Error::Config("[ensemble] invalid value for `trajectories` (0): must be >= 1".into()));
                }
                for (key, v) in keys.into_iter().zip([settings.sigma_x, settings.sigma_p]) {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::Config(format!(
                            "[ensemble] invalid value for `{key}` ({v}): must be finite and > 0"
                        )));
                    }
                }
                Some(settings)
            }
        };

        let experiment = raw.experiment.unwrap_or(Experiment::Simulate);
        let config = RunConfig {
            experiment,
            params,
            initial,
            schedule,
            perturbation,
            controls,
            ensemble,
            out: raw.out,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            warnings,
        };
        config.check_experiment()?;
        Ok(config)
    }

    /// Replaces the experiment kind and re-checks what it requires.
    pub fn with_experiment(mut self, experiment: Experiment) -> Result<Self> {
        self.experiment = experiment;
        self.check_experiment()?;
        Ok(self)
    }

    fn check_experiment(&self) -> Result<()> {
        match self.experiment {
            Experiment::Ensemble if self.ensemble.is_none() => {
                Err(Error::Config("the ensemble experiment needs an [ensemble] section".into()))
            }
            Experiment::Cool if self.schedule.is_constant() => {
                Err(Error::Config("the cool experiment needs schedule.kind = \"gaussian-pulse\"".into()))
            }
            Experiment::Perturb if self.perturbation.is_none() => {
                Err(Error::Config("the perturb experiment needs a [perturbation] section".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn system(&self) -> HybridSystem {
        HybridSystem::new(self.params)
            .with_schedule(self.schedule)
            .with_perturbation(self.perturbation.clone())
    }

    pub fn initial_state(&self) -> HybridState {
        HybridState {
            t: 0.0,
            x: self.initial.x0,
            p: self.initial.p0,
            q: self.initial.amplitudes,
        }
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec> {
        let e = self
            .ensemble
            .ok_or_else(|| Error::Config("no [ensemble] section configured".into()))?;
        Ok(EnsembleSpec {
            trajectories: e.trajectories,
            x_mean: e.x_mean,
            p_mean: e.p_mean,
            sigma_x: e.sigma_x,
            sigma_p: e.sigma_p,
            seed: self.seed,
            initial: self.initial.amplitudes,
            system: self.system(),
            controls: self.controls,
            with_stderr: e.stderr,
        })
    }

    /// The resolved configuration as a TOML table; parsing it back yields
    /// an identical `RunConfig` (expressions appear as their values).
    pub fn to_table(&self) -> Table {
        let mut root = Table::new();
        root.insert("experiment".into(), self.experiment.as_str().into());
        root.insert("seed".into(), Value::Integer(self.seed as i64));
        if let Some(out) = &self.out {
            root.insert("out".into(), out.display().to_string().into());
        }

        let mut model = Table::new();
        model.insert("mass".into(), self.params.mass().into());
        model.insert("omega".into(), self.params.omega().into());
        model.insert("omega0".into(), self.params.omega0().into());
        model.insert("beta".into(), self.params.beta().into());
        root.insert("model".into(), model.into());

        let mut initial = Table::new();
        match &self.initial.name {
            Some(name) => {
                initial.insert("state".into(), name.clone().into());
            }
            None => {
                let coeffs: Vec<Value> = self
                    .initial
                    .amplitudes
                    .components()
                    .iter()
                    .map(|z| Value::Array(vec![z.re.into(), z.im.into()]))
                    .collect();
                initial.insert("coefficients".into(), coeffs.into());
            }
        }
        initial.insert("x0".into(), self.initial.x0.into());
        initial.insert("p0".into(), self.initial.p0.into());
        root.insert("initial".into(), initial.into());

        let mut schedule = Table::new();
        match self.schedule {
            CouplingSchedule::Constant => {
                schedule.insert("kind".into(), "constant".into());
            }
            CouplingSchedule::GaussianPulse { amplitude, center, width } => {
                schedule.insert("kind".into(), "gaussian-pulse".into());
                schedule.insert("amplitude".into(), amplitude.into());
                schedule.insert("center".into(), center.into());
                schedule.insert("sigma".into(), width.into());
            }
        }
        root.insert("schedule".into(), schedule.into());

        if let Some(p) = &self.perturbation {
            let mut t = Table::new();
            let kind = match p.kind {
                PerturbationKind::SingleQubit => "single-qubit",
                PerturbationKind::TwoQubit => "two-qubit",
            };
            t.insert("kind".into(), kind.into());
            for (k, w) in ["omega1", "omega2", "omega3"].iter().zip(p.weights) {
                t.insert((*k).into(), w.into());
            }
            root.insert("perturbation".into(), t.into());
        }

        let mut integration = Table::new();
        integration.insert("t_max".into(), self.controls.t_max.into());
        integration.insert("dt".into(), self.controls.dt.into());
        integration.insert("stride".into(), Value::Integer(self.controls.stride as i64));
        root.insert("integration".into(), integration.into());

        if let Some(e) = &self.ensemble {
            let mut t = Table::new();
            t.insert("trajectories".into(), Value::Integer(e.trajectories as i64));
            t.insert("x_mean".into(), e.x_mean.into());
            t.insert("p_mean".into(), e.p_mean.into());
            t.insert("sigma_x".into(), e.sigma_x.into());
            t.insert("sigma_p".into(), e.sigma_p.into());
            t.insert("stderr".into(), e.stderr.into());
            root.insert("ensemble".into(), t.into());
        }
        root
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).expect("config tables always serialize")
    }
}
