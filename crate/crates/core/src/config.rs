//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown keys are rejected. Missing keys take the defaults of
//! [`ProblemConfig::default`]: a `K = 2` spherical annulus over
//! `R ∈ [0.2, 1.0]` on a sphere of curvature `k = 0.5`.
//!
//! | key | default |
//! |-----|---------|
//! | `body.kind`, `body.curvature` | `spherical`, `2` |
//! | `space.kind`, `space.curvature` | `spherical`, `0.5` |
//! | `grid.r_min`, `grid.r_max`, `grid.n` | `0.2`, `1.0`, `401` |
//! | `dt` | `auto` |
//! | `t_end` | `10` |
//! | `mass_growth_rate` | `0` |
//! | `perturbation.amplitude`, `perturbation.mode` | `0.01`, `1` |
//! | `output.interval`, `output.snapshot_every` | `0.01`, `100` |
//! | `geodesic.r0`, `geodesic.theta0` | `1.0`, `0` |
//! | `geodesic.vr0`, `geodesic.vtheta0`, `geodesic.mass` | `0.3`, `0.5`, `1` |
//! | `geodesic.dt`, `geodesic.steps` | `0.001`, `10000` |
//! | `check.samples`, `check.seed` | `100`, `0` |

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureKind, CurvatureProfile};
use crate::solver::{Perturbation, ProblemConfig, RadialGrid, TimeStep};

/// Initial condition and step settings for the `geodesic` run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicConfig {
    pub r0: f64,
    pub theta0: f64,
    pub vr0: f64,
    pub vtheta0: f64,
    pub mass: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self {
            r0: 1.0,
            theta0: 0.0,
            vr0: 0.3,
            vtheta0: 0.5,
            mass: 1.0,
            dt: 1e-3,
            steps: 10_000,
        }
    }
}

/// Settings for the `check-gradients` run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { samples: 100, seed: 0 }
    }
}

/// Everything a configuration file can set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunDocument {
    pub problem: ProblemConfig,
    pub geodesic: GeodesicConfig,
    pub check: CheckConfig,
}

/// Parses a configuration document into the radial problem settings.
pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    Ok(parse_document(text)?.problem)
}

pub fn parse_document(text: &str) -> Result<RunDocument> {
    parse_with_overrides(text, &[])
}

/// Parses `text`, then applies `key=value` overrides in order.
pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<RunDocument> {
    let mut builder = Builder::default();
    for (i, raw) in text.lines().enumerate() {
        let location = format!("line {}", i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            location: location.clone(),
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        builder.set(key.trim(), value.trim(), &location)?;
    }
    for (key, value) in overrides {
        builder.set(key.trim(), value.trim(), &format!("--set {}", key.trim()))?;
    }
    builder.finish()
}

/// Splits a `key=value` command-line override.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    arg.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config {
            location: format!("--set {arg}"),
            message: "expected key=value".into(),
        })
}

/// Writes every key, so that `parse_document(&serialize(d)) == d`.
pub fn serialize(doc: &RunDocument) -> String {
    let p = &doc.problem;
    let g = &doc.geodesic;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("body.kind", p.body.kind().as_str().into());
    put("body.curvature", format!("{:?}", p.body.curvature()));
    put("space.kind", p.space.kind().as_str().into());
    put("space.curvature", format!("{:?}", p.space.curvature()));
    put("grid.r_min", format!("{:?}", p.grid.r_min()));
    put("grid.r_max", format!("{:?}", p.grid.r_max()));
    put("grid.n", p.grid.n().to_string());
    put(
        "dt",
        match p.dt {
            TimeStep::Auto => "auto".into(),
            TimeStep::Fixed(dt) => format!("{dt:?}"),
        },
    );
    put("t_end", format!("{:?}", p.t_end));
    put("mass_growth_rate", format!("{:?}", p.mass_growth_rate));
    put("perturbation.amplitude", format!("{:?}", p.perturbation.amplitude));
    put("perturbation.mode", p.perturbation.mode.to_string());
    put("output.interval", format!("{:?}", p.output_interval));
    put("output.snapshot_every", p.snapshot_every.to_string());
    put("geodesic.r0", format!("{:?}", g.r0));
    put("geodesic.theta0", format!("{:?}", g.theta0));
    put("geodesic.vr0", format!("{:?}", g.vr0));
    put("geodesic.vtheta0", format!("{:?}", g.vtheta0));
    put("geodesic.mass", format!("{:?}", g.mass));
    put("geodesic.dt", format!("{:?}", g.dt));
    put("geodesic.steps", g.steps.to_string());
    put("check.samples", doc.check.samples.to_string());
    put("check.seed", doc.check.seed.to_string());
    out
}

/// A value together with where it was set.
#[derive(Debug, Clone)]
struct Slot<T> {
    value: T,
    location: Option<String>,
}

impl<T> Slot<T> {
    fn new(value: T) -> Self {
        Self { value, location: None }
    }

    fn err(&self, key: &str, message: impl std::fmt::Display) -> Error {
        Error::Config {
            location: self.location.clone().unwrap_or_else(|| "config".into()),
            message: format!("{key}: {message}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Builder {
    body_kind: Slot<CurvatureKind>,
    body_curvature: Slot<f64>,
    space_kind: Slot<CurvatureKind>,
    space_curvature: Slot<f64>,
    r_min: Slot<f64>,
    r_max: Slot<f64>,
    n: Slot<usize>,
    dt: Slot<TimeStep>,
    t_end: Slot<f64>,
    mass_growth_rate: Slot<f64>,
    amplitude: Slot<f64>,
    mode: Slot<u32>,
    interval: Slot<f64>,
    snapshot_every: Slot<usize>,
    geodesic: GeodesicConfig,
    check: CheckConfig,
}

impl Default for Builder {
    fn default() -> Self {
        let p = ProblemConfig::default();
        Self {
            body_kind: Slot::new(p.body.kind()),
            body_curvature: Slot::new(p.body.curvature()),
            space_kind: Slot::new(p.space.kind()),
            space_curvature: Slot::new(p.space.curvature()),
            r_min: Slot::new(p.grid.r_min()),
            r_max: Slot::new(p.grid.r_max()),
            n: Slot::new(p.grid.n()),
            dt: Slot::new(p.dt),
            t_end: Slot::new(p.t_end),
            mass_growth_rate: Slot::new(p.mass_growth_rate),
            amplitude: Slot::new(p.perturbation.amplitude),
            mode: Slot::new(p.perturbation.mode),
            interval: Slot::new(p.output_interval),
            snapshot_every: Slot::new(p.snapshot_every),
            geodesic: GeodesicConfig::default(),
            check: CheckConfig::default(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, location: &str, what: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        location: location.to_string(),
        message: format!("{key}: expected {what}, got `{value}`"),
    })
}

fn assign<T: FromStr>(slot: &mut Slot<T>, key: &str, value: &str, location: &str, what: &str) -> Result<()> {
    slot.value = parse_value(key, value, location, what)?;
    slot.location = Some(location.to_string());
    Ok(())
}

impl Builder {
    fn set(&mut self, key: &str, value: &str, location: &str) -> Result<()> {
        const NUM: &str = "a number";
        const INT: &str = "a non-negative integer";
        let num = |v: &str| parse_value::<f64>(key, v, location, NUM);
        match key {
            "body.kind" => assign(&mut self.body_kind, key, value, location, "spherical|hyperbolic|flat"),
            "body.curvature" => assign(&mut self.body_curvature, key, value, location, NUM),
            "space.kind" => assign(&mut self.space_kind, key, value, location, "spherical|hyperbolic|flat"),
            "space.curvature" => assign(&mut self.space_curvature, key, value, location, NUM),
            "grid.r_min" => assign(&mut self.r_min, key, value, location, NUM),
            "grid.r_max" => assign(&mut self.r_max, key, value, location, NUM),
            "grid.n" => assign(&mut self.n, key, value, location, INT),
            "dt" => {
                self.dt.value = if value.eq_ignore_ascii_case("auto") {
                    TimeStep::Auto
                } else {
                    TimeStep::Fixed(parse_value(key, value, location, "a number or `auto`")?)
                };
                self.dt.location = Some(location.to_string());
                Ok(())
            }
            "t_end" => assign(&mut self.t_end, key, value, location, NUM),
            "mass_growth_rate" => assign(&mut self.mass_growth_rate, key, value, location, NUM),
            "perturbation.amplitude" => assign(&mut self.amplitude, key, value, location, NUM),
            "perturbation.mode" => assign(&mut self.mode, key, value, location, INT),
            "output.interval" => assign(&mut self.interval, key, value, location, NUM),
            "output.snapshot_every" => assign(&mut self.snapshot_every, key, value, location, INT),
            "geodesic.r0" => num(value).map(|v| self.geodesic.r0 = v),
            "geodesic.theta0" => num(value).map(|v| self.geodesic.theta0 = v),
            "geodesic.vr0" => num(value).map(|v| self.geodesic.vr0 = v),
            "geodesic.vtheta0" => num(value).map(|v| self.geodesic.vtheta0 = v),
            "geodesic.mass" => num(value).map(|v| self.geodesic.mass = v),
            "geodesic.dt" => num(value).map(|v| self.geodesic.dt = v),
            "geodesic.steps" => parse_value(key, value, location, INT).map(|v| self.geodesic.steps = v),
            "check.samples" => parse_value(key, value, location, INT).map(|v| self.check.samples = v),
            "check.seed" => parse_value(key, value, location, INT).map(|v| self.check.seed = v),
            _ => Err(Error::Config {
                location: location.to_string(),
                message: format!("unknown key `{key}`"),
            }),
        }
    }

    fn finish(self) -> Result<RunDocument> {
        let body = CurvatureProfile::new(self.body_kind.value, self.body_curvature.value)
            .map_err(|e| self.body_curvature.err("body.curvature", e))?;
        let space = CurvatureProfile::new(self.space_kind.value, self.space_curvature.value)
            .map_err(|e| self.space_curvature.err("space.curvature", e))?;
        if self.n.value < 3 {
            return Err(self.n.err("grid.n", format!("must be >= 3, got {}", self.n.value)));
        }
        if !(self.r_min.value > 0.0) {
            return Err(self.r_min.err("grid.r_min", "must be positive"));
        }
        let grid = RadialGrid::new(self.r_min.value, self.r_max.value, self.n.value)
            .map_err(|e| self.r_max.err("grid.r_max", e))?;
        if body.check_domain(grid.r_max()).is_err() {
            return Err(self.r_max.err("grid.r_max", "beyond the pole of the spherical body"));
        }
        if let TimeStep::Fixed(dt) = self.dt.value {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(self.dt.err("dt", "must be positive or `auto`"));
            }
        }
        if !(self.t_end.value.is_finite() && self.t_end.value > 0.0) {
            return Err(self.t_end.err("t_end", "must be positive"));
        }
        if !(self.mass_growth_rate.value.is_finite() && self.mass_growth_rate.value >= 0.0) {
            return Err(self.mass_growth_rate.err("mass_growth_rate", "must be >= 0"));
        }
        if !self.amplitude.value.is_finite() {
            return Err(self.amplitude.err("perturbation.amplitude", "must be finite"));
        }
        if self.mode.value == 0 {
            return Err(self.mode.err("perturbation.mode", "must be >= 1"));
        }
        if !(self.interval.value.is_finite() && self.interval.value > 0.0) {
            return Err(self.interval.err("output.interval", "must be positive"));
        }
        let problem = ProblemConfig {
            body,
            space,
            grid,
            dt: self.dt.value,
            t_end: self.t_end.value,
            mass_growth_rate: self.mass_growth_rate.value,
            perturbation: Perturbation {
                amplitude: self.amplitude.value,
                mode: self.mode.value,
            },
            output_interval: self.interval.value,
            snapshot_every: self.snapshot_every.value,
        };
        problem.validate().map_err(|e| Error::Config {
            location: "config".into(),
            message: e.to_string(),
        })?;
        Ok(RunDocument {
            problem,
            geodesic: self.geodesic,
            check: self.check,
        })
    }
}
