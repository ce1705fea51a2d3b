//! Flat `key = value` run configuration.
//!
//! One pair per line; `#` starts a comment. Unknown and duplicate keys are
//! errors, so a typo never silently falls back to a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use timofrac_core::memory::KernelReport;
use timofrac_core::{BeamConfig, KernelSpec};

use crate::error::{HarnessError, Result};

pub const REQUIRED_KEYS: [&str; 13] = [
    "beam.rho1",
    "beam.rho2",
    "beam.kappa1",
    "beam.kappa2",
    "beam.length",
    "time.horizon",
    "frac.alpha",
    "grid.n_cells",
    "grid.n_steps",
    "kernel.kind",
    "scenario.name",
    "output.dir",
    "seed",
];

pub const OPTIONAL_KEYS: [&str; 13] = [
    "kernel.m0",
    "kernel.lambda",
    "flags.classical_limit",
    "flags.plot_script",
    "scenario.amplitude",
    "scenario.time_power",
    "scenario.perturb_scale",
    "scenario.draw",
    "scenario.draws",
    "scenario.modes",
    "output.snapshots",
    "converge.n_cells_fine",
    "converge.n_steps_fine",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    Zero,
    ManufacturedPoly,
    RandomSmooth,
    ClassicalLimit,
    PerturbPair,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::Zero,
        ScenarioName::ManufacturedPoly,
        ScenarioName::RandomSmooth,
        ScenarioName::ClassicalLimit,
        ScenarioName::PerturbPair,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Zero => "zero",
            ScenarioName::ManufacturedPoly => "manufactured_poly",
            ScenarioName::RandomSmooth => "random_smooth",
            ScenarioName::ClassicalLimit => "classical_limit",
            ScenarioName::PerturbPair => "perturb_pair",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or(())
    }
}

/// Scenario selector and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    /// Overall scale of the generated data.
    pub amplitude: f64,
    /// Exponent `q` of the manufactured solution `t^q p(x)`.
    pub time_power: u32,
    /// Size of perturbations relative to the base data.
    pub perturb_scale: f64,
    /// Index of the random draw used by single runs.
    pub draw: u64,
    /// Number of draws in randomized suites.
    pub draws: u64,
    /// Number of Fourier modes in random data.
    pub modes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub classical_limit: bool,
    pub plot_script: bool,
}

/// Grids for the convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvergeOptions {
    /// Spatial resolution held fixed during the temporal study.
    pub n_cells_fine: usize,
    /// Time resolution held fixed during the spatial study.
    pub n_steps_fine: usize,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub beam: BeamConfig,
    pub kernel_report: KernelReport,
    pub scenario: ScenarioSpec,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub flags: Flags,
    /// Number of evenly spaced time levels written to `solution.csv`.
    pub snapshots: usize,
    pub converge: ConvergeOptions,
}

impl RunConfig {
    /// Copy with a different grid, re-validated.
    pub fn with_grid(&self, n_cells: usize, n_steps: usize) -> Result<RunConfig> {
        let mut c = self.clone();
        c.beam.n_cells = n_cells;
        c.beam.n_steps = n_steps;
        c.kernel_report = validate_beam(&c.beam)?;
        Ok(c)
    }
}

struct Pairs {
    map: BTreeMap<String, (usize, String)>,
}

impl Pairs {
    fn parse(text: &str) -> Result<Pairs> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::config(format!("line {line_no}"), "expected `key = value`")
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(HarnessError::config(format!("line {line_no}"), "empty key"));
            }
            if !REQUIRED_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
                return Err(HarnessError::config(key, "unknown key"));
            }
            if map
                .insert(key.to_string(), (line_no, value.to_string()))
                .is_some()
            {
                return Err(HarnessError::config(key, "given more than once"));
            }
        }
        for key in REQUIRED_KEYS {
            if !map.contains_key(key) {
                return Err(HarnessError::config(key, "missing required key"));
            }
        }
        Ok(Pairs { map })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                HarnessError::config(
                    key,
                    format!("cannot parse `{v}` as {}", short_type::<T>()),
                )
            }),
        }
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| HarnessError::config(key, "missing required key"))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

fn short_type<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    name.rsplit("::").next().unwrap_or(name)
}

fn validate_beam(beam: &BeamConfig) -> Result<KernelReport> {
    use timofrac_core::Error;
    beam.validate().map_err(|e| match e {
        Error::InvalidConfig { field, reason } => HarnessError::config(field, reason),
        Error::Admissibility { condition, value } => HarnessError::config(
            "kernel.kind",
            format!("kernel not admissible: {condition} (value {value:e})"),
        ),
        other => HarnessError::config("kernel.kind", other.to_string()),
    })
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(HarnessError::config(key, "must be positive and finite"))
    }
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let p = Pairs::parse(text)?;

    let kernel = match p.raw("kernel.kind").unwrap_or("") {
        "zero" => {
            for k in ["kernel.m0", "kernel.lambda"] {
                if p.raw(k).is_some() {
                    return Err(HarnessError::config(k, "not used by the zero kernel"));
                }
            }
            KernelSpec::Zero
        }
        "exponential" => {
            let m0 = positive("kernel.m0", p.req("kernel.m0")?)?;
            let lambda = positive("kernel.lambda", p.req("kernel.lambda")?)?;
            KernelSpec::Exponential { m0, lambda }
        }
        other => {
            return Err(HarnessError::config(
                "kernel.kind",
                format!("`{other}` is not one of zero, exponential"),
            ))
        }
    };

    let flags = Flags {
        classical_limit: p.or("flags.classical_limit", false)?,
        plot_script: p.or("flags.plot_script", false)?,
    };

    let beam = BeamConfig {
        rho1: p.req("beam.rho1")?,
        rho2: p.req("beam.rho2")?,
        kappa1: p.req("beam.kappa1")?,
        kappa2: p.req("beam.kappa2")?,
        length: p.req("beam.length")?,
        horizon: p.req("time.horizon")?,
        alpha: p.req("frac.alpha")?,
        n_cells: p.req("grid.n_cells")?,
        n_steps: p.req("grid.n_steps")?,
        kernel,
        classical_limit: flags.classical_limit,
    };
    let kernel_report = validate_beam(&beam)?;

    let name_raw: String = p.req("scenario.name")?;
    let name = name_raw.parse::<ScenarioName>().map_err(|_| {
        HarnessError::config(
            "scenario.name",
            format!(
                "`{name_raw}` is not one of zero, manufactured_poly, random_smooth, classical_limit, perturb_pair"
            ),
        )
    })?;
    let scenario = ScenarioSpec {
        name,
        amplitude: p.or("scenario.amplitude", 1.0)?,
        time_power: p.or("scenario.time_power", 2)?,
        perturb_scale: p.or("scenario.perturb_scale", 0.01)?,
        draw: p.or("scenario.draw", 0)?,
        draws: p.or("scenario.draws", 20)?,
        modes: p.or("scenario.modes", 3)?,
    };
    if !scenario.amplitude.is_finite() {
        return Err(HarnessError::config("scenario.amplitude", "must be finite"));
    }
    if !(2..=3).contains(&scenario.time_power) {
        return Err(HarnessError::config("scenario.time_power", "must be 2 or 3"));
    }
    positive("scenario.perturb_scale", scenario.perturb_scale)?;
    if scenario.draws == 0 {
        return Err(HarnessError::config("scenario.draws", "must be at least 1"));
    }
    if !(1..=16).contains(&scenario.modes) {
        return Err(HarnessError::config("scenario.modes", "must lie in 1..=16"));
    }
    if name == ScenarioName::ClassicalLimit {
        if !(beam.alpha == 1.0 && flags.classical_limit) {
            return Err(HarnessError::config(
                "frac.alpha",
                "classical_limit needs alpha = 1 and flags.classical_limit = true",
            ));
        }
        if !beam.kernel.is_zero() {
            return Err(HarnessError::config(
                "kernel.kind",
                "classical_limit is defined for the zero kernel",
            ));
        }
    }

    let output_dir: String = p.req("output.dir")?;
    if output_dir.is_empty() {
        return Err(HarnessError::config("output.dir", "must not be empty"));
    }
    let snapshots = p.or("output.snapshots", 11usize)?;
    if snapshots < 2 {
        return Err(HarnessError::config("output.snapshots", "must be at least 2"));
    }
    let converge = ConvergeOptions {
        n_cells_fine: p.or("converge.n_cells_fine", 256)?,
        n_steps_fine: p.or("converge.n_steps_fine", 4096)?,
    };
    if converge.n_cells_fine < 8 {
        return Err(HarnessError::config("converge.n_cells_fine", "must be at least 8"));
    }
    if converge.n_steps_fine < 2 {
        return Err(HarnessError::config("converge.n_steps_fine", "must be at least 2"));
    }

    Ok(RunConfig {
        beam,
        kernel_report,
        scenario,
        output_dir: PathBuf::from(output_dir),
        seed: p.req("seed")?,
        flags,
        snapshots,
        converge,
    })
}

/// Reads and parses a config file; unreadable files are config errors.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}
