//! Scenario configuration files.
//!
//! The format is TOML with four sections:
//!
//! ```toml
//! scenario = "stabilize"
//!
//! [system]
//! kerr = 1.12e-6
//! eps2 = 2.25e-6
//! kappa1 = 1.71e-6
//!
//! [drive]
//! kind = "constant"
//!
//! [run]
//! t_final = 1.0e5
//! dt = 50.0
//! ```
//!
//! Reservoirs are given as `[[collision.reservoir]]` tables. Parsing fills
//! every default in explicitly, so [`render_config`] writes a complete file and
//! `parse_config(render_config(c)) == c`.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::classifier::DetectorSettings;
use crate::collision::{CollisionParams, Mixing, ReservoirModel, ReservoirSpec};
use crate::dynamics::{DriveKind, DriveSchedule, SystemParams, DEFAULT_OMEGA_SCALE};
use crate::error::{Error, Result};
use crate::states::required_dim;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Stabilize,
    Ramp,
    Homogenize,
    Classify,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Stabilize => "stabilize",
            Scenario::Ramp => "ramp",
            Scenario::Homogenize => "homogenize",
            Scenario::Classify => "classify",
        }
    }

    pub fn uses_collisions(self) -> bool {
        matches!(self, Scenario::Homogenize | Scenario::Classify)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stabilize" => Ok(Scenario::Stabilize),
            "ramp" => Ok(Scenario::Ramp),
            "homogenize" => Ok(Scenario::Homogenize),
            "classify" => Ok(Scenario::Classify),
            other => Err(Error::param(
                "scenario",
                format!("unknown scenario `{other}` (stabilize, ramp, homogenize, classify)"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kerr: f64,
    pub eps2: f64,
    #[serde(default)]
    pub delta_ar: f64,
    /// Defaults to `delta_ar`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_ir: Option<f64>,
    #[serde(default)]
    pub kappa1: f64,
    #[serde(default)]
    pub kappa2: f64,
    #[serde(default = "default_omega")]
    pub omega_scale: f64,
}

fn default_omega() -> f64 {
    DEFAULT_OMEGA_SCALE
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DriveKindCfg {
    #[default]
    Constant,
    Ramp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default)]
    pub kind: DriveKindCfg,
    /// Drive target; defaults to `system.eps2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2_0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ramp: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MixingCfg {
    #[default]
    RoundRobin,
    SeededRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelCfg {
    #[default]
    Logical,
    Fock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirCfg {
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionSection {
    #[serde(default = "default_eps_x")]
    pub eps_x: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_collisions")]
    pub n_collisions: usize,
    #[serde(default)]
    pub mixing: MixingCfg,
    #[serde(default)]
    pub model: ModelCfg,
    #[serde(default = "default_true")]
    pub probe_dissipation: bool,
    #[serde(rename = "reservoir")]
    pub reservoirs: Vec<ReservoirCfg>,
}

fn default_eps_x() -> f64 {
    1e-3
}

fn default_tau() -> f64 {
    113.01
}

fn default_collisions() -> usize {
    5000
}

fn default_true() -> bool {
    true
}

/// Fock truncation: a fixed dimension or sized from `α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DimSetting {
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for DimSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DimSetting::Auto => s.serialize_str("auto"),
            DimSetting::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for DimSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DimVisitor;

        impl Visitor<'_> for DimVisitor {
            type Value = DimSetting;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer or \"auto\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<DimSetting, E> {
                usize::try_from(v)
                    .map(DimSetting::Fixed)
                    .map_err(|_| E::custom("dim must be a positive integer or \"auto\""))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<DimSetting, E> {
                Ok(DimSetting::Fixed(v as usize))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<DimSetting, E> {
                if v == "auto" {
                    Ok(DimSetting::Auto)
                } else {
                    Err(E::custom(format!("dim must be an integer or \"auto\", got \"{v}\"")))
                }
            }
        }

        d.deserialize_any(DimVisitor)
    }
}

/// Initial probe state for trajectory scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    CPlus,
    CMinus,
    Plus,
    Vacuum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub dim: DimSetting,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    /// Integration step; for collision scenarios defaults to `τ/6`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults per scenario: `c_plus` (stabilize), `vacuum` (ramp), `plus`
    /// (collision scenarios).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
}

fn default_record_every() -> usize {
    1
}

fn default_window() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub system: SystemSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision: Option<CollisionSection>,
    pub run: RunSection,
}

/// Parses, fills in defaults and validates.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::ConfigParse {
            line,
            message: e.message().to_string(),
        }
    })?;
    cfg.resolve_defaults();
    cfg.validate()?;
    Ok(cfg)
}

/// Complete TOML text for `cfg`; parsing it gives `cfg` back.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("config is always serializable")
}

impl ScenarioConfig {
    fn resolve_defaults(&mut self) {
        if self.system.delta_ir.is_none() {
            self.system.delta_ir = Some(self.system.delta_ar);
        }
        if self.drive.eps2_0.is_none() {
            self.drive.eps2_0 = Some(self.system.eps2);
        }
        if self.run.dt.is_none() {
            if let Some(c) = &self.collision {
                self.run.dt = Some(c.tau / 6.0);
            }
        }
        if self.run.initial.is_none() {
            self.run.initial = Some(match self.scenario {
                Scenario::Stabilize => InitialState::CPlus,
                Scenario::Ramp => InitialState::Vacuum,
                Scenario::Homogenize | Scenario::Classify => InitialState::Plus,
            });
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system_params()?.validate()?;
        let schedule = self.drive_schedule()?;
        schedule.validate()?;
        if schedule.eps2_0 <= 0.0 || self.system.eps2 <= 0.0 {
            return Err(Error::param("eps2", "stabilization requires eps2 > 0"));
        }
        if let DimSetting::Fixed(d) = self.run.dim {
            if d < 2 {
                return Err(Error::param("dim", "must be >= 2"));
            }
        }
        if self.run.record_every == 0 {
            return Err(Error::param("record_every", "must be >= 1"));
        }
        self.detector().validate()?;
        match self.run.dt {
            Some(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::param("dt", "must be > 0"))
            }
            None => return Err(Error::param("dt", "is required")),
            _ => {}
        }
        match self.scenario {
            Scenario::Stabilize | Scenario::Ramp => {
                match self.run.t_final {
                    Some(t) if t > 0.0 && t.is_finite() => {}
                    _ => return Err(Error::param("t_final", "is required and must be > 0")),
                }
                if self.scenario == Scenario::Ramp && self.drive.kind != DriveKindCfg::Ramp {
                    return Err(Error::param("drive.kind", "the ramp scenario needs kind = \"ramp\""));
                }
            }
            Scenario::Homogenize | Scenario::Classify => {
                if self.collision.is_none() {
                    return Err(Error::param("collision", "section is required for this scenario"));
                }
                self.collision_params()?.validate()?;
                if self.drive.kind != DriveKindCfg::Constant {
                    return Err(Error::param("drive.kind", "collision scenarios use a constant drive"));
                }
                if self.scenario == Scenario::Classify && self.run.initial != Some(InitialState::Plus) {
                    return Err(Error::param("initial", "the classifier always starts from plus"));
                }
            }
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let s = &self.system;
        Ok(SystemParams {
            kerr: s.kerr,
            eps2: s.eps2,
            delta_ar: s.delta_ar,
            delta_ir: s.delta_ir.unwrap_or(s.delta_ar),
            kappa1: s.kappa1,
            kappa2: s.kappa2,
            omega_scale: s.omega_scale,
        })
    }

    pub fn drive_schedule(&self) -> Result<DriveSchedule> {
        let eps2_0 = self.drive.eps2_0.unwrap_or(self.system.eps2);
        Ok(match self.drive.kind {
            DriveKindCfg::Constant => DriveSchedule::constant(eps2_0),
            DriveKindCfg::Ramp => DriveSchedule {
                kind: DriveKind::Ramp,
                eps2_0,
                tau_ramp: self
                    .drive
                    .tau_ramp
                    .ok_or_else(|| Error::param("tau_ramp", "is required for a ramp"))?,
            },
        })
    }

    pub fn collision_params(&self) -> Result<CollisionParams> {
        let c = self
            .collision
            .as_ref()
            .ok_or_else(|| Error::param("collision", "section is missing"))?;
        Ok(CollisionParams {
            eps_x: c.eps_x,
            tau: c.tau,
            dt: self.run.dt.unwrap_or(c.tau / 6.0),
            n_collisions: c.n_collisions,
            reservoirs: c
                .reservoirs
                .iter()
                .map(|r| ReservoirSpec::new(r.theta, r.phi, r.weight))
                .collect(),
            mixing: match c.mixing {
                MixingCfg::RoundRobin => Mixing::RoundRobin,
                MixingCfg::SeededRandom => Mixing::SeededRandom,
            },
            seed: self.run.seed,
            model: match c.model {
                ModelCfg::Logical => ReservoirModel::Logical,
                ModelCfg::Fock => ReservoirModel::Fock,
            },
            probe_dissipation: c.probe_dissipation,
        })
    }

    pub fn detector(&self) -> DetectorSettings {
        DetectorSettings {
            window: self.run.window,
            tol: self.run.tol,
        }
    }

    /// Cat amplitude at the drive target.
    pub fn alpha(&self) -> f64 {
        (self.drive.eps2_0.unwrap_or(self.system.eps2) / self.system.kerr).sqrt()
    }

    pub fn resolved_dim(&self) -> usize {
        match self.run.dim {
            DimSetting::Auto => required_dim(self.alpha()),
            DimSetting::Fixed(d) => d,
        }
    }
}
