//! TOML model configuration (`schema = 1`).

use serde::Deserialize;
use std::path::Path;

use super::presets;
use crate::bath::{BathCoupling, LowFrequencyLaw, SpectralDensity};
use crate::diagnostics::Thresholds;
use crate::error::{Error, Result};
use crate::qops::{self, CMat, HermitianOperator};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema: u32,
    pub system: Option<SystemConfig>,
    pub coupling: Option<CouplingConfig>,
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub diagnostics: Thresholds,
    #[serde(default)]
    pub toy: ToyConfig,
    #[serde(default)]
    pub photonic: PhotonicConfig,
    #[serde(default)]
    pub kondo: KondoConfig,
    #[serde(default)]
    pub thermalization: ThermalizationConfig,
}

/// Real part and optional imaginary part of a square matrix, row-major.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixConfig {
    pub fn to_matrix(&self, what: &str) -> Result<CMat> {
        let d = self.re.len();
        let bad = |msg: String| Error::Config(format!("{what}: {msg}"));
        if d == 0 || self.re.iter().any(|r| r.len() != d) {
            return Err(bad("`re` must be a non-empty square matrix".into()));
        }
        if let Some(im) = &self.im {
            if im.len() != d || im.iter().any(|r| r.len() != d) {
                return Err(bad("`im` must have the same shape as `re`".into()));
            }
        }
        Ok(CMat::from_fn(d, d, |i, j| {
            qops::c(self.re[i][j], self.im.as_ref().map_or(0.0, |m| m[i][j]))
        }))
    }

    fn hermitian(&self, what: &str) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix(what)?).map_err(|e| Error::Config(format!("{what}: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    TwoLevel {
        delta: f64,
    },
    VSystem {
        delta1: f64,
        delta2: f64,
    },
    #[serde(rename = "lattice_1d")]
    Lattice1d {
        sites: usize,
        #[serde(default = "one")]
        hopping: f64,
        #[serde(default = "three")]
        offset: f64,
    },
    Custom {
        hamiltonian: MatrixConfig,
    },
}

fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}

impl SystemConfig {
    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        Ok(match self {
            SystemConfig::TwoLevel { delta } => presets::two_level(*delta),
            SystemConfig::VSystem { delta1, delta2 } => presets::v_system(*delta1, *delta2),
            SystemConfig::Lattice1d { sites, hopping, offset } => presets::lattice_1d(*sites, *hopping, *offset)?,
            SystemConfig::Custom { hamiltonian } => hamiltonian.hermitian("system.hamiltonian")?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingConfig {
    SigmaX,
    SigmaPm,
    SpinVector,
    GroundDipole,
    SiteLoss,
    Entries {
        operators: Vec<MatrixConfig>,
        #[serde(default)]
        weights: Option<MatrixConfig>,
        /// One bath per operator instead of a shared bath.
        #[serde(default)]
        independent: bool,
    },
}

/// Coupling operators with the weight matrix of a shared bath, or `None`
/// for independent baths.
pub struct CouplingSpec {
    pub operators: Vec<HermitianOperator>,
    pub weights: Option<CMat>,
}

impl CouplingConfig {
    pub fn build(&self, d: usize) -> Result<CouplingSpec> {
        let shared = |ops: Vec<HermitianOperator>| {
            let n = ops.len();
            CouplingSpec { operators: ops, weights: Some(qops::identity(n)) }
        };
        let needs = |dim: usize, name: &str| -> Result<()> {
            if d != dim {
                return Err(Error::Config(format!("coupling preset `{name}` needs a {dim}-level system, got d = {d}")));
            }
            Ok(())
        };
        Ok(match self {
            CouplingConfig::SigmaX => {
                needs(2, "sigma_x")?;
                shared(presets::sigma_x())
            }
            CouplingConfig::SigmaPm => {
                needs(2, "sigma_pm")?;
                let (ops, w) = presets::sigma_pm();
                CouplingSpec { operators: ops, weights: Some(w) }
            }
            CouplingConfig::SpinVector => {
                needs(2, "spin_vector")?;
                shared(presets::spin_vector())
            }
            CouplingConfig::GroundDipole => shared(presets::ground_dipole(d)),
            CouplingConfig::SiteLoss => {
                if d < 3 {
                    return Err(Error::Config("coupling preset `site_loss` needs a lattice_1d system".into()));
                }
                shared(presets::site_loss(d - 1))
            }
            CouplingConfig::Entries { operators, weights, independent } => {
                if operators.is_empty() {
                    return Err(Error::Config("coupling.operators must not be empty".into()));
                }
                let ops = operators
                    .iter()
                    .enumerate()
                    .map(|(k, m)| m.hermitian(&format!("coupling.operators[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(o) = ops.iter().find(|o| o.dim() != d) {
                    return Err(Error::Config(format!("coupling operator is {0}x{0} but the system has d = {d}", o.dim())));
                }
                let n = ops.len();
                let w = match (weights, independent) {
                    (Some(_), true) => {
                        return Err(Error::Config("coupling.weights cannot be combined with independent = true".into()))
                    }
                    (_, true) => None,
                    (Some(w), false) => {
                        let w = w.to_matrix("coupling.weights")?;
                        if w.nrows() != n {
                            return Err(Error::Config(format!("coupling.weights must be {n}x{n}")));
                        }
                        Some(w)
                    }
                    (None, false) => Some(qops::identity(n)),
                };
                CouplingSpec { operators: ops, weights: w }
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    Flat {
        level: f64,
        cutoff: f64,
    },
    Ohmic {
        eta: f64,
        #[serde(default = "one")]
        alpha: f64,
        cutoff: f64,
        #[serde(default)]
        temperature: f64,
    },
    Photonic {
        eta: f64,
        omega_plus: f64,
        cutoff: f64,
        #[serde(default)]
        temperature: f64,
    },
    FermionicBand {
        rho_max: f64,
        half_bandwidth: f64,
        #[serde(default)]
        temperature: f64,
    },
    Kondo {
        jk: f64,
        #[serde(default = "one")]
        rho_f: f64,
        #[serde(default = "one")]
        half_bandwidth: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default)]
        temperature: f64,
    },
    Tabulated {
        #[serde(default)]
        file: Option<String>,
        #[serde(default)]
        omega: Option<Vec<f64>>,
        #[serde(default)]
        values: Option<Vec<f64>>,
        #[serde(default)]
        low_frequency: Option<LowFrequencyLaw>,
        #[serde(default)]
        temperature: f64,
    },
}

impl BathConfig {
    pub fn temperature(&self) -> f64 {
        match self {
            BathConfig::Flat { .. } => 0.0,
            BathConfig::Ohmic { temperature, .. }
            | BathConfig::Photonic { temperature, .. }
            | BathConfig::FermionicBand { temperature, .. }
            | BathConfig::Kondo { temperature, .. }
            | BathConfig::Tabulated { temperature, .. } => *temperature,
        }
    }

    /// Density at the configured temperature; `base_dir` resolves table files.
    pub fn density(&self, base_dir: &Path) -> Result<SpectralDensity> {
        self.density_at(self.temperature(), base_dir)
    }

    /// Density of the same family at another temperature.
    pub fn density_at(&self, temperature: f64, base_dir: &Path) -> Result<SpectralDensity> {
        let thermal = |base: SpectralDensity| -> Result<SpectralDensity> {
            if temperature == 0.0 {
                Ok(base)
            } else {
                SpectralDensity::bosonic_thermal(base, temperature)
            }
        };
        let j = match self {
            BathConfig::Flat { level, cutoff } => {
                if temperature != 0.0 {
                    return Err(Error::Config("bath family `flat` has no temperature".into()));
                }
                SpectralDensity::flat(*level, *cutoff)
            }
            BathConfig::Ohmic { eta, alpha, cutoff, .. } => thermal(SpectralDensity::ohmic(*eta, *alpha, *cutoff)?),
            BathConfig::Photonic { eta, omega_plus, cutoff, .. } => {
                thermal(SpectralDensity::photonic(*eta, *omega_plus, *cutoff)?)
            }
            BathConfig::FermionicBand { rho_max, half_bandwidth, .. } => {
                SpectralDensity::fermionic_band(*rho_max, *half_bandwidth, temperature)
            }
            BathConfig::Kondo { jk, rho_f, half_bandwidth, mu, .. } => {
                SpectralDensity::kondo(*jk, *rho_f, *half_bandwidth, *mu, temperature)
            }
            BathConfig::Tabulated { file, omega, values, low_frequency, .. } => {
                let (w, v) = match (file, omega, values) {
                    (Some(f), None, None) => {
                        let path = base_dir.join(f);
                        let text = std::fs::read_to_string(&path)
                            .map_err(|e| Error::Config(format!("bath.file {}: {e}", path.display())))?;
                        SpectralDensity::parse_table(&text)?
                    }
                    (None, Some(w), Some(v)) => (w.clone(), v.clone()),
                    _ => {
                        return Err(Error::Config(
                            "tabulated bath needs either `file` or both `omega` and `values`".into(),
                        ))
                    }
                };
                thermal(SpectralDensity::tabulated(w, v, *low_frequency)?)
            }
        };
        j.map_err(|e| Error::Config(format!("bath: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Lindblad,
    Redfield,
    /// Redfield with the finite-time coefficients `Γ(Ω, t)`.
    RedfieldTimeDependent,
    Born,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Lowest eigenstate of `H_S`.
    Ground,
    /// Highest eigenstate of `H_S`.
    #[default]
    Excited,
    MaximallyMixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendConfig {
    #[default]
    Auto,
    Spectral,
    Stepper,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub t_end: f64,
    /// Output spacing, and the step of the fixed-step solvers.
    pub dt: f64,
    pub initial: InitialState,
    pub backend: BackendConfig,
    pub degeneracy_tol: Option<f64>,
    pub out_dir: Option<String>,
    /// Temperatures for `spectral`; the bath temperature when empty.
    pub temperatures: Vec<f64>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Lindblad,
            t_end: 10.0,
            dt: 0.1,
            initial: InitialState::Excited,
            backend: BackendConfig::Auto,
            degeneracy_tol: None,
            out_dir: None,
            temperatures: Vec::new(),
            omega_min: -3.0,
            omega_max: 3.0,
            points: 601,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyConfig {
    pub omega0: f64,
    /// Volterra step; `None` picks 0.01 in units of the bath scale.
    pub dt: Option<f64>,
    /// End of the overlay; `None` uses 1.5 t_NM.
    pub t_end: Option<f64>,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self { omega0: 0.7, dt: None, t_end: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhotonicConfig {
    pub eta: f64,
    pub omega_plus: f64,
    pub cutoff: f64,
    pub ratios: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for PhotonicConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            omega_plus: 1.0,
            cutoff: 2.0,
            ratios: vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 2.0],
            t_end: 100.0,
            dt: 0.01,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KondoConfig {
    pub jk: f64,
    pub rho_f: f64,
    pub half_bandwidth: f64,
    pub mu: f64,
    /// Low-temperature sweep for the rate.
    pub temperatures: Vec<f64>,
    /// Temperature of the Lindblad reference trajectory.
    pub lindblad_temperature: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for KondoConfig {
    fn default() -> Self {
        Self {
            jk: 0.1,
            rho_f: 1.0,
            half_bandwidth: 1.0,
            mu: 0.0,
            temperatures: vec![0.0, 0.002, 0.004, 0.006, 0.008, 0.01],
            lindblad_temperature: 0.2,
            t_end: 100.0,
            dt: 0.05,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalizationConfig {
    pub delta: f64,
    pub h: f64,
    pub gamma: f64,
}

impl Default for ThermalizationConfig {
    fn default() -> Self {
        Self { delta: 1.0, h: 0.3, gamma: 0.05 }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Offset of the line inside `span` that the message points at. Tagged enums
/// report the span of the whole table, so look for the named field or the
/// quoted literal.
fn refine(text: &str, span: std::ops::Range<usize>, msg: &str) -> usize {
    let region = &text[span.start.min(text.len())..span.end.min(text.len())];
    let token = |open: char, close: char| -> Option<&str> {
        let a = msg.find(open)? + open.len_utf8();
        let b = msg[a..].find(close)? + a;
        (b > a).then(|| &msg[a..b])
    };
    let mut offset = 0;
    for line in region.split_inclusive('\n') {
        let t = line.trim_start();
        let hit = if msg.starts_with("unknown field") || msg.starts_with("missing field") {
            token('`', '`').is_some_and(|k| t.starts_with(k) && t[k.len()..].trim_start().starts_with('='))
        } else if let Some(lit) = token('"', '"') {
            t.contains(&format!("\"{lit}\""))
        } else if let Some(lit) = token('`', '`') {
            t.split_once('=').is_some_and(|(_, v)| v.trim() == lit)
        } else {
            false
        };
        if hit {
            return span.start + offset;
        }
        offset += line.len();
    }
    span.start
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let msg = e.message().trim().to_string();
    match e.span() {
        Some(span) => Error::Config(format!("line {}: {msg}", line_of(text, refine(text, span, &msg)))),
        None => Error::Config(msg),
    }
}

/// Set `a.b.c = value` in a table, creating intermediate tables.
fn apply_override(root: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) =
        spec.split_once('=').ok_or_else(|| Error::Config(format!("override `{spec}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override `{spec}` has an empty key")));
    }
    let value: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut table = root;
    for p in &parts[..parts.len() - 1] {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ModelConfig {
    /// Parse a config text and apply `key=value` overrides.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let cfg: ModelConfig = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        let cfg = if overrides.is_empty() {
            cfg
        } else {
            let mut table: toml::Table = text.parse().map_err(|e| toml_error(text, e))?;
            for o in overrides {
                apply_override(&mut table, o)?;
            }
            ModelConfig::deserialize(toml::Value::Table(table))
                .map_err(|e| Error::Config(format!("after overrides: {}", e.message().trim())))?
        };
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (this build reads schema = {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        cfg.diagnostics.validate().map_err(|e| Error::Config(format!("diagnostics: {e}")))?;
        Ok(cfg)
    }

    /// Defaults only, as if the file contained just `schema = 1`.
    pub fn empty(overrides: &[String]) -> Result<Self> {
        Self::parse("schema = 1\n", overrides)
    }

    pub fn system(&self) -> Result<&SystemConfig> {
        self.system.as_ref().ok_or_else(|| Error::Config("missing [system] block".into()))
    }

    pub fn bath(&self) -> Result<&BathConfig> {
        self.bath.as_ref().ok_or_else(|| Error::Config("missing [bath] block".into()))
    }

    pub fn coupling(&self) -> Result<&CouplingConfig> {
        self.coupling.as_ref().ok_or_else(|| Error::Config("missing [coupling] block".into()))
    }

    /// Full model: `H_S`, coupling operators and the bath coupling.
    pub fn model(&self, base_dir: &Path) -> Result<(HermitianOperator, Vec<HermitianOperator>, BathCoupling)> {
        let h = self.system()?.hamiltonian()?;
        let spec = self.coupling()?.build(h.dim())?;
        let density = self.bath()?.density(base_dir)?;
        let coupling = match spec.weights {
            Some(weights) => BathCoupling::Shared { density, weights },
            None => BathCoupling::Independent(vec![density; spec.operators.len()]),
        };
        Ok((h, spec.operators, coupling))
    }
}
