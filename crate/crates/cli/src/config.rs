//! Sweep specifications, presets and layered configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use spinarrival_core::{
    AsymmetricPacket, ComponentSelector, Detector, Packet, PacketError, QuadratureConfig, SymmetricPacket, Vec3,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("u_min ({u_min}) must be below u_max ({u_max})")]
    EmptyRange { u_min: f64, u_max: f64 },
    #[error("n_points must be at least 2, got {0}")]
    TooFewPoints(usize),
    #[error("log spacing needs u_min > 0, got {0}")]
    LogSpacingNonPositive(f64),
    #[error("at least one selector is required")]
    NoSelectors,
    #[error("detector position must be finite")]
    Detector,
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error("invalid quadrature settings: {0}")]
    Quadrature(&'static str),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
}

/// Which of `tau`, `tau_i`, `tau_s` a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selectors {
    pub tau: bool,
    pub tau_i: bool,
    pub tau_s: bool,
}

impl Selectors {
    pub const ALL: Selectors = Selectors {
        tau: true,
        tau_i: true,
        tau_s: true,
    };

    pub fn contains(&self, sel: ComponentSelector) -> bool {
        match sel {
            ComponentSelector::Total => self.tau,
            ComponentSelector::SpinIndependent => self.tau_i,
            ComponentSelector::SpinOnly => self.tau_s,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ComponentSelector> + '_ {
        ComponentSelector::ALL.into_iter().filter(|&s| self.contains(s))
    }

    pub fn is_empty(&self) -> bool {
        !(self.tau || self.tau_i || self.tau_s)
    }
}

fn bad(what: &str, s: &str) -> String {
    format!("unrecognised {what} `{s}`")
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(Family::Symmetric),
            "asymmetric" | "asym" => Ok(Family::Asymmetric),
            _ => Err(bad("family", s)),
        }
    }
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(bad("spacing", s)),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            _ => Err(bad("preset", s)),
        }
    }
}

impl FromStr for Selectors {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Selectors {
            tau: false,
            tau_i: false,
            tau_s: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "tau" => out.tau = true,
                "tau_i" => out.tau_i = true,
                "tau_s" => out.tau_s = true,
                "all" => out = Selectors::ALL,
                _ => return Err(bad("selector", part)),
            }
        }
        if out.is_empty() {
            return Err("no selectors given".into());
        }
        Ok(out)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
        })
    }
}

/// A comma separated triple such as `1,2,1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub Vec3);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma separated numbers, got `{s}`"));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        }
        Ok(Triple(v.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub sigma0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x1: f64,
    pub detector: Vec3,
    pub u_min: f64,
    pub u_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    pub selectors: Selectors,
    pub quadrature: QuadratureConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            family: Family::Symmetric,
            sigma0: 0.01,
            a: 0.001,
            b: 0.4,
            c: 0.01,
            x1: 0.0,
            detector: Vec3::new(1.0, 1.0, 1.0),
            u_min: 0.5,
            u_max: 10.0,
            n_points: 40,
            spacing: Spacing::Linear,
            selectors: Selectors::ALL,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl SweepSpec {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Fig1 => SweepSpec {
                family: Family::Symmetric,
                sigma0: 0.01,
                detector: Vec3::new(1.0, 1.0, 1.0),
                selectors: Selectors {
                    tau: false,
                    tau_i: false,
                    tau_s: true,
                },
                ..SweepSpec::default()
            },
            Preset::Fig2 => SweepSpec {
                family: Family::Asymmetric,
                a: 0.001,
                b: 0.4,
                c: 0.01,
                x1: 0.0,
                detector: Vec3::new(1.0, 2.0, 1.0),
                selectors: Selectors {
                    tau: true,
                    tau_i: true,
                    tau_s: false,
                },
                ..SweepSpec::default()
            },
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.u_min < self.u_max) {
            return Err(SpecError::EmptyRange {
                u_min: self.u_min,
                u_max: self.u_max,
            });
        }
        if self.n_points < 2 {
            return Err(SpecError::TooFewPoints(self.n_points));
        }
        if self.spacing == Spacing::Log && !(self.u_min > 0.0) {
            return Err(SpecError::LogSpacingNonPositive(self.u_min));
        }
        if self.selectors.is_empty() {
            return Err(SpecError::NoSelectors);
        }
        self.detector()?;
        self.packet(self.u_min)?;
        self.quadrature.validate().map_err(|e| match e {
            spinarrival_core::QuadratureError::InvalidConfig(m) => SpecError::Quadrature(m),
            _ => SpecError::Quadrature("invalid"),
        })
    }

    pub fn detector(&self) -> Result<Detector, SpecError> {
        Detector::new(self.detector).ok_or(SpecError::Detector)
    }

    pub fn packet(&self, u: f64) -> Result<Packet, PacketError> {
        Ok(match self.family {
            Family::Symmetric => SymmetricPacket::new(self.sigma0, u)?.into(),
            Family::Asymmetric => AsymmetricPacket::new(self.a, self.b, self.c, self.x1, u)?.into(),
        })
    }

    /// The sweep velocities, endpoints included exactly.
    pub fn velocities(&self) -> Vec<f64> {
        let n = self.n_points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.u_min;
                }
                if i == n - 1 {
                    return self.u_max;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.u_min + (self.u_max - self.u_min) * f,
                    Spacing::Log => self.u_min * (self.u_max / self.u_min).powf(f),
                }
            })
            .collect()
    }
}

/// Optional settings from one configuration layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub family: Option<Family>,
    pub sigma0: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub x1: Option<f64>,
    pub detector: Option<Vec3>,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub n_points: Option<usize>,
    pub spacing: Option<Spacing>,
    pub selectors: Option<Selectors>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub t_initial: Option<f64>,
    pub max_doublings: Option<u32>,
    pub tail_fraction: Option<f64>,
    pub max_panels: Option<usize>,
}

macro_rules! set_if {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

impl Overrides {
    pub fn apply(&self, spec: &mut SweepSpec) {
        set_if!(spec.family, self.family);
        set_if!(spec.sigma0, self.sigma0);
        set_if!(spec.a, self.a);
        set_if!(spec.b, self.b);
        set_if!(spec.c, self.c);
        set_if!(spec.x1, self.x1);
        set_if!(spec.detector, self.detector);
        set_if!(spec.u_min, self.u_min);
        set_if!(spec.u_max, self.u_max);
        set_if!(spec.n_points, self.n_points);
        set_if!(spec.spacing, self.spacing);
        set_if!(spec.selectors, self.selectors);
        let q = &mut spec.quadrature;
        set_if!(q.rel_tol, self.rel_tol);
        set_if!(q.abs_tol, self.abs_tol);
        set_if!(q.t_initial, self.t_initial);
        set_if!(q.max_doublings, self.max_doublings);
        set_if!(q.tail_fraction, self.tail_fraction);
        set_if!(q.max_panels, self.max_panels);
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Self, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            o.set(key, value).map_err(|e| match e {
                SetError::Unknown => ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                },
                SetError::Value(message) => ConfigError::Value {
                    line,
                    key: key.to_string(),
                    message,
                },
            })?;
        }
        Ok(o)
    }

    pub fn load_config(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_config(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        fn p<T: FromStr>(v: &str) -> Result<Option<T>, SetError>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map(Some).map_err(|e| SetError::Value(e.to_string()))
        }
        match key {
            "preset" => self.preset = p(value)?,
            "family" => self.family = p(value)?,
            "sigma0" => self.sigma0 = p(value)?,
            "a" => self.a = p(value)?,
            "b" => self.b = p(value)?,
            "c" => self.c = p(value)?,
            "x1" => self.x1 = p(value)?,
            "detector" => self.detector = p::<Triple>(value)?.map(|t| t.0),
            "u_min" => self.u_min = p(value)?,
            "u_max" => self.u_max = p(value)?,
            "n_points" => self.n_points = p(value)?,
            "spacing" => self.spacing = p(value)?,
            "selectors" => self.selectors = p(value)?,
            "rel_tol" => self.rel_tol = p(value)?,
            "abs_tol" => self.abs_tol = p(value)?,
            "t_initial" => self.t_initial = p(value)?,
            "max_doublings" => self.max_doublings = p(value)?,
            "tail_fraction" => self.tail_fraction = p(value)?,
            "max_panels" => self.max_panels = p(value)?,
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }
}

enum SetError {
    Unknown,
    Value(String),
}

/// Built-in defaults (or the chosen preset), then the config file, then flags.
pub fn resolve(config: &Overrides, flags: &Overrides) -> Result<SweepSpec, SpecError> {
    let mut spec = match flags.preset.or(config.preset) {
        Some(p) => SweepSpec::preset(p),
        None => SweepSpec::default(),
    };
    config.apply(&mut spec);
    flags.apply(&mut spec);
    spec.validate()?;
    Ok(spec)
}
