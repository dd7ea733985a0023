//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! experiment = conserve
//! seed = 7
//! output = runs/conserve
//!
//! [grid]
//! directions = torus, torus, torus
//! periods = 6.283185307179586
//! modes = 32
//!
//! [physics]
//! s = 0.85
//! n = 8
//!
//! [numerics]
//! dt = 1e-3
//! t = 2
//! ```
//!
//! Top-level keys: `experiment`, `seed`, `output`. Lists are comma
//! separated; a single value in `periods` or `modes` applies to every axis.
//! A relative `output` is resolved against the directory of the config
//! file. Every key not listed in [`KEYS`] is rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::Serialize;
use wgnls::dynamics::default_dt;
use wgnls::probes::drift::MAX_N_FRACTION;
use wgnls::probes::schedule::parse_exponent;
use wgnls::{Direction, EvolutionConfig, Grid};

use crate::error::{CliError, CliResult};

/// Accepted keys per section (`""` is the top level).
pub const KEYS: [(&str, &[&str]); 4] = [
    ("", &["experiment", "seed", "output"]),
    ("grid", &["d", "directions", "periods", "modes"]),
    ("physics", &["s", "n", "n_list", "n2", "lambda", "delta", "a", "decay", "cutoff", "rms"]),
    ("numerics", &["dt", "t", "stride", "dealias", "boundary_threshold", "trials"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Conserve,
    Bilinear,
    Strichartz,
    AlmostI,
    AlmostD,
    Growth,
    Schedule,
    Scaling,
}

impl Experiment {
    const ALL: [(&'static str, Experiment); 8] = [
        ("conserve", Experiment::Conserve),
        ("bilinear", Experiment::Bilinear),
        ("strichartz", Experiment::Strichartz),
        ("almost_i", Experiment::AlmostI),
        ("almost_d", Experiment::AlmostD),
        ("growth", Experiment::Growth),
        ("schedule", Experiment::Schedule),
        ("scaling", Experiment::Scaling),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, e)| *e == self).map(|(n, _)| *n).expect("listed")
    }

    fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == text).map(|(_, e)| *e)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub directions: Vec<&'static str>,
    pub periods: Vec<f64>,
    pub modes: Vec<usize>,
}

impl GridConfig {
    pub fn build(&self) -> CliResult<Grid> {
        let dirs = self
            .directions
            .iter()
            .zip(&self.periods)
            .map(|(&k, &p)| if k == "torus" { Direction::torus(p) } else { Direction::euclidean(p) })
            .collect();
        Grid::new(dirs, self.modes.clone()).map_err(invalid)
    }
}

/// Core errors met while validating are config errors, except those with
/// their own exit code.
fn invalid(e: wgnls::Error) -> CliError {
    match e {
        wgnls::Error::UnderResolved { .. } => CliError::Core(e),
        other => CliError::Validation(other.to_string()),
    }
}

/// Fully resolved configuration: every default is filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(skip)]
    pub output: PathBuf,
    pub grid: Option<GridConfig>,
    /// Regularity as written, kept exact for the schedule.
    pub s: Option<String>,
    pub n_list: Vec<f64>,
    pub n2: f64,
    pub lambda: f64,
    pub delta: f64,
    pub a: f64,
    pub decay: f64,
    pub cutoff: f64,
    pub rms: f64,
    pub dt: f64,
    pub t: f64,
    pub stride: usize,
    pub dealias: bool,
    pub boundary_threshold: f64,
    pub trials: usize,
}

impl RunConfig {
    pub fn s_value(&self) -> Option<f64> {
        self.s.as_deref().map(|s| {
            let r = parse_exponent(s).expect("validated");
            *r.numer() as f64 / *r.denom() as f64
        })
    }

    pub fn s_exact(&self) -> Option<Ratio<i64>> {
        self.s.as_deref().map(|s| parse_exponent(s).expect("validated"))
    }

    pub fn evolution(&self) -> EvolutionConfig {
        let mut cfg = EvolutionConfig::new(self.dt, self.t).with_stride(self.stride).with_dealias(self.dealias);
        cfg.boundary_mass_threshold = self.boundary_threshold;
        cfg
    }

    pub fn output_dir(&self) -> &Path {
        &self.output
    }
}

type Entries = BTreeMap<(String, String), (usize, String)>;

fn parse_entries(text: &str) -> CliResult<Entries> {
    let mut section = String::new();
    let mut entries = Entries::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::Parse { line, message: format!("malformed section header {content:?}") })?
                .trim();
            if name.is_empty() || !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(CliError::Parse { line, message: format!("unknown section [{name}]") });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::Parse { line, message: format!("expected `key = value`, got {content:?}") })?;
        let (key, value) = (key.trim(), value.trim());
        let allowed = KEYS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            let place = if section.is_empty() { "top level".to_string() } else { format!("[{section}]") };
            return Err(CliError::Parse { line, message: format!("unknown key `{key}` in {place}") });
        }
        if value.is_empty() {
            return Err(CliError::Parse { line, message: format!("empty value for `{key}`") });
        }
        if entries.insert((section.clone(), key.to_string()), (line, value.to_string())).is_some() {
            return Err(CliError::Parse { line, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(entries)
}

struct Reader {
    entries: Entries,
}

impl Reader {
    fn raw(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn get<V: std::str::FromStr>(&self, section: &str, key: &str) -> CliResult<Option<V>> {
        self.list(section, key).and_then(|v| match v {
            None => Ok(None),
            Some(mut items) if items.len() == 1 => Ok(items.pop()),
            Some(_) => {
                let line = self.raw(section, key).map_or(0, |r| r.0);
                Err(CliError::Parse { line, message: format!("`{key}` takes a single value") })
            }
        })
    }

    fn list<V: std::str::FromStr>(&self, section: &str, key: &str) -> CliResult<Option<Vec<V>>> {
        let Some((line, value)) = self.raw(section, key) else { return Ok(None) };
        value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<V>()
                    .map_err(|_| CliError::Parse { line: *line, message: format!("cannot parse {item:?} for `{key}`") })
            })
            .collect::<CliResult<Vec<V>>>()
            .map(Some)
    }

    fn string(&self, section: &str, key: &str) -> Option<String> {
        self.raw(section, key).map(|r| r.1.clone())
    }
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("{name} = {v} must be positive and finite")))
    }
}

fn broadcast<V: Clone>(name: &str, values: Vec<V>, d: usize) -> CliResult<Vec<V>> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); d]),
        n if n == d => Ok(values),
        n => Err(CliError::Validation(format!("{name} lists {n} values for d = {d}"))),
    }
}

fn parse_grid(r: &Reader) -> CliResult<GridConfig> {
    let directions: Vec<String> = r.list("grid", "directions")?.unwrap_or_else(|| vec!["torus".into(); 3]);
    let d: usize = r.get("grid", "d")?.unwrap_or(directions.len());
    if d != 3 {
        return Err(CliError::Validation(format!("d = {d}: the equation is posed in three dimensions")));
    }
    let directions = broadcast("directions", directions, d)?
        .iter()
        .map(|k| match k.as_str() {
            "torus" => Ok("torus"),
            "euclidean" => Ok("euclidean"),
            other => Err(CliError::Validation(format!("direction {other:?} is neither torus nor euclidean"))),
        })
        .collect::<CliResult<Vec<_>>>()?;
    let periods = broadcast("periods", r.list("grid", "periods")?.unwrap_or(vec![std::f64::consts::TAU]), d)?;
    for &p in &periods {
        positive("period", p)?;
    }
    let modes = broadcast("modes", r.list("grid", "modes")?.unwrap_or(vec![32usize]), d)?;
    for (axis, &m) in modes.iter().enumerate() {
        if m % 2 == 1 {
            return Err(CliError::OddModeCount { axis, modes: m });
        }
        if m < wgnls::grid::MIN_DYNAMICS_MODES {
            return Err(CliError::Validation(format!("modes = {m} along axis {axis} is below 8")));
        }
    }
    Ok(GridConfig { directions, periods, modes })
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

pub fn parse_config_str(text: &str, base: &Path) -> CliResult<RunConfig> {
    use Experiment::*;
    let r = Reader { entries: parse_entries(text)? };
    let experiment = match r.raw("", "experiment") {
        None => return Err(CliError::Validation("missing `experiment`".into())),
        Some((line, name)) => Experiment::parse(name)
            .ok_or_else(|| CliError::Parse { line: *line, message: format!("unknown experiment {name:?}") })?,
    };
    let seed: u64 = r.get("", "seed")?.unwrap_or(0);
    let output = base.join(r.string("", "output").unwrap_or_else(|| "output".into()));

    let has_grid_keys = r.entries.keys().any(|(s, _)| s == "grid");
    let grid = match experiment {
        Schedule if has_grid_keys => {
            return Err(CliError::Validation("the schedule experiment takes no [grid]".into()));
        }
        Schedule => None,
        _ => Some(parse_grid(&r)?),
    };

    let s = r.string("physics", "s");
    if let Some(text) = &s {
        let exact = parse_exponent(text).map_err(|e| CliError::Validation(e.to_string()))?;
        if exact > Ratio::from_integer(1) || exact <= Ratio::new(1, 2) {
            return Err(CliError::Validation(format!("s = {text} outside (1/2, 1]")));
        }
        if matches!(experiment, Schedule | AlmostI) && exact <= Ratio::new(5, 6) {
            return Err(CliError::SubThreshold(text.clone()));
        }
    }
    let s = match (experiment, s) {
        (AlmostI, None) => Some("0.85".to_string()),
        (Schedule, None) => return Err(CliError::Validation("schedule needs `s`".into())),
        (_, s) => s,
    };

    let n_single: Option<f64> = r.get("physics", "n")?;
    let n_list: Option<Vec<f64>> = r.list("physics", "n_list")?;
    let n_list = match (n_single, n_list) {
        (Some(_), Some(_)) => return Err(CliError::Validation("give either `n` or `n_list`".into())),
        (Some(n), None) => vec![n],
        (None, Some(l)) => l,
        (None, None) => match experiment {
            Bilinear => vec![8.0, 16.0, 32.0],
            Strichartz => vec![2.0, 4.0, 8.0],
            _ => vec![4.0, 8.0, 16.0, 32.0],
        },
    };
    for &n in &n_list {
        if !(n >= 1.0 && n.is_finite()) {
            return Err(CliError::Validation(format!("N = {n} below 1")));
        }
    }
    let top = n_list.iter().copied().fold(0.0, f64::max);

    let s_value = s.as_deref().map(|t| {
        let r = parse_exponent(t).expect("checked");
        *r.numer() as f64 / *r.denom() as f64
    });
    let default_decay = match experiment {
        AlmostI | AlmostD => s_value.unwrap_or(0.85) + 1.51,
        _ => 3.0,
    };
    let default_cutoff = match experiment {
        AlmostI | AlmostD => 4.0 * top,
        _ => 4.0,
    };
    let default_t = match experiment {
        Conserve => 1.0,
        Bilinear | Strichartz => wgnls::probes::bilinear::DEFAULT_T,
        AlmostI | AlmostD | Scaling => 0.5,
        Growth => 50.0,
        Schedule => 0.0,
    };

    let mut cfg = RunConfig {
        experiment,
        seed,
        output,
        grid,
        s,
        n_list,
        n2: r.get("physics", "n2")?.unwrap_or(4.0),
        lambda: r.get("physics", "lambda")?.unwrap_or(2.0),
        delta: r.get("physics", "delta")?.unwrap_or(0.1),
        a: r.get("physics", "a")?.unwrap_or(1.0),
        decay: r.get("physics", "decay")?.unwrap_or(default_decay),
        cutoff: r.get("physics", "cutoff")?.unwrap_or(default_cutoff),
        rms: r.get("physics", "rms")?.unwrap_or(0.5),
        dt: 0.0,
        t: r.get("numerics", "t")?.unwrap_or(default_t),
        stride: r.get("numerics", "stride")?.unwrap_or(1),
        dealias: r.get("numerics", "dealias")?.unwrap_or(true),
        boundary_threshold: r
            .get("numerics", "boundary_threshold")?
            .unwrap_or(wgnls::dynamics::DEFAULT_BOUNDARY_MASS_THRESHOLD),
        trials: r.get("numerics", "trials")?.unwrap_or(8),
    };
    let explicit_dt: Option<f64> = r.get("numerics", "dt")?;
    validate(&mut cfg, explicit_dt)?;
    Ok(cfg)
}

fn validate(cfg: &mut RunConfig, explicit_dt: Option<f64>) -> CliResult<()> {
    use Experiment::*;
    for (name, v) in [("n2", cfg.n2), ("lambda", cfg.lambda), ("a", cfg.a), ("rms", cfg.rms), ("cutoff", cfg.cutoff)] {
        positive(name, v)?;
    }
    if !(cfg.delta >= 0.0 && cfg.decay >= 0.0) {
        return Err(CliError::Validation("delta and decay must be non-negative".into()));
    }
    if cfg.stride == 0 || cfg.trials == 0 {
        return Err(CliError::Validation("stride and trials must be positive".into()));
    }
    positive("boundary_threshold", cfg.boundary_threshold)?;
    let Some(gc) = &cfg.grid else {
        return Ok(());
    };
    if cfg.experiment != Schedule {
        positive("t", cfg.t)?;
    }
    let grid = gc.build()?;
    let available = grid.min_nyquist();
    let top = cfg.n_list.iter().copied().fold(0.0, f64::max);
    match cfg.experiment {
        Bilinear => {
            if cfg.n2 > cfg.n_list.iter().copied().fold(f64::INFINITY, f64::min) {
                return Err(CliError::Validation(format!("N2 = {} exceeds the smallest N1", cfg.n2)));
            }
            if cfg.t >= 1.0 {
                return Err(CliError::Validation(format!("T = {} outside (0, 1)", cfg.t)));
            }
            if available < 2.0 * top {
                return Err(wgnls::Error::UnderResolved { required: 2.0 * top, available }.into());
            }
        }
        Strichartz if available < 2.0 * top => {
            return Err(wgnls::Error::UnderResolved { required: 2.0 * top, available }.into());
        }
        AlmostI | AlmostD => {
            let dyadic = cfg.n_list.windows(2).all(|w| (w[1] / w[0] - 2.0).abs() < 1e-12);
            if !dyadic {
                return Err(CliError::Validation(format!("N list {:?} is not dyadic", cfg.n_list)));
            }
            if top > MAX_N_FRACTION * available {
                return Err(wgnls::Error::UnderResolved { required: top / MAX_N_FRACTION, available }.into());
            }
        }
        _ => {}
    }
    if matches!(cfg.experiment, Conserve | AlmostI | AlmostD | Growth | Scaling) {
        cfg.dt = match explicit_dt {
            Some(dt) => positive("dt", dt)?,
            None => {
                let dt = default_dt(&grid);
                let steps = (cfg.t / dt).ceil() as usize;
                let steps = steps.div_ceil(cfg.stride) * cfg.stride;
                cfg.t / steps as f64
            }
        };
        if cfg.experiment != Scaling {
            cfg.evolution().steps().map_err(invalid)?;
        }
    } else if let Some(dt) = explicit_dt {
        cfg.dt = positive("dt", dt)?;
    }
    if cfg.experiment == Scaling {
        let steps = (cfg.t / cfg.dt).round();
        if steps < 1.0 || (steps * cfg.dt - cfg.t).abs() > 1e-9 * cfg.t {
            return Err(CliError::Validation(format!("t = {} is not a multiple of dt = {}", cfg.t, cfg.dt)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<RunConfig> {
        parse_config_str(text, Path::new("/tmp"))
    }

    #[test]
    fn minimal_conserve_gets_defaults() {
        let c = parse("experiment = conserve\n").unwrap();
        assert_eq!(c.experiment, Experiment::Conserve);
        let g = c.grid.as_ref().unwrap();
        assert_eq!(g.modes, vec![32, 32, 32]);
        assert_eq!(g.directions, vec!["torus"; 3]);
        assert_eq!(c.t, 1.0);
        assert!(c.dealias);
        assert_eq!(c.stride, 1);
        assert_eq!(c.output, Path::new("/tmp/output"));
        // default dt divides T
        let steps = c.t / c.dt;
        assert!((steps - steps.round()).abs() < 1e-9);
    }

    #[test]
    fn schedule_below_threshold_is_rejected() {
        let e = parse("experiment = schedule\n[physics]\ns = 0.8\n").unwrap_err();
        assert!(matches!(e, CliError::SubThreshold(_)), "{e}");
        assert_eq!(e.exit_code(), 2);
        let e = parse("experiment = schedule\n[physics]\ns = 5/6\n").unwrap_err();
        assert!(matches!(e, CliError::SubThreshold(_)));
        assert!(parse("experiment = schedule\n[physics]\ns = 11/12\n").is_ok());
    }

    #[test]
    fn odd_modes_are_rejected() {
        let e = parse("experiment = conserve\n[grid]\nmodes = 31\n").unwrap_err();
        assert!(matches!(e, CliError::OddModeCount { modes: 31, .. }), "{e}");
        assert!(e.to_string().contains("OddModeCount"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("experiment = conserve\n\n[grid]\nmodez = 32\n", 4),
            ("experiment = conserve\n[physics]\ns = 0.9\ns = 0.95\n", 4),
            ("experiment = conserve\n[nonsense]\n", 2),
            ("experiment = conserve\njust words\n", 2),
            ("experiment = conserve\n[numerics]\ndt = fast\n", 3),
            ("experiment = teleport\n", 1),
            ("experiment = conserve\ns = 0.9\n", 2),
        ];
        for (text, want) in cases {
            match parse(text) {
                Err(CliError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn resolution_is_checked_before_compute() {
        let e = parse("experiment = bilinear\n[grid]\nmodes = 16\n[physics]\nn_list = 8, 16\n").unwrap_err();
        assert_eq!(e.exit_code(), 5);
        let e = parse("experiment = almost_i\n[grid]\nmodes = 16\n").unwrap_err();
        assert_eq!(e.exit_code(), 5);
    }

    #[test]
    fn validation_errors() {
        for text in [
            "experiment = conserve\n[grid]\nperiods = -1\n",
            "experiment = conserve\n[grid]\nmodes = 32, 32\n",
            "experiment = conserve\n[grid]\nd = 2\ndirections = torus, torus\n",
            "experiment = conserve\n[numerics]\ndt = 0.3\nt = 1\n",
            "experiment = almost_i\n[grid]\nmodes = 64\nperiods = 1.5\n[physics]\nn_list = 4, 8, 12\n",
            "experiment = schedule\n[grid]\nmodes = 8\n[physics]\ns = 0.9\n",
            "experiment = schedule\n",
            "experiment = bilinear\n[physics]\nn_list = 8\nn2 = 16\n",
        ] {
            let e = parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text:?}: {e}");
        }
    }

    #[test]
    fn lists_and_broadcast() {
        let c = parse(
            "experiment = bilinear\n[grid]\ndirections = euclidean, torus, torus\nperiods = 8, 1, 1\nmodes = 256, 32, 32\n",
        )
        .unwrap();
        let g = c.grid.unwrap();
        assert_eq!(g.directions, vec!["euclidean", "torus", "torus"]);
        assert_eq!(g.periods, vec![8.0, 1.0, 1.0]);
        assert_eq!(c.n_list, vec![8.0, 16.0, 32.0]);
        assert_eq!(c.t, 0.99);
    }
}
