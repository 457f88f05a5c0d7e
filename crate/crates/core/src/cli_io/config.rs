//! `key = value` run configuration.
//!
//! ```text
//! dim = 2
//! n = 32
//! r = 4
//! mu0 = 1
//! mu1 = 1
//! alpha1 = 0.1
//! t_end = 1
//! ic = random_band 1 4 1.0      # kmin kmax amplitude [seed]
//! forcing = steady_mode 0 2 0.5 # k... amplitude
//! dt = auto
//! ```
//!
//! `ic` is one of `taylor_green [amplitude]`, `shear`, `random_band kmin kmax amplitude [seed]`
//! or `file <path>`; `forcing` is `none`, `steady_mode k₁ … k_d amplitude` or `manufactured`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::constitutive::ConstitutiveLaw;
use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid};
use crate::init::{Forcing, InitialCondition};
use crate::stepper::{Scheme, SimParams};

const REQUIRED: [&str; 8] = ["dim", "n", "r", "mu0", "mu1", "alpha1", "t_end", "ic"];
const OPTIONAL: [&str; 7] = [
    "dt",
    "scheme",
    "forcing",
    "seed",
    "output_dir",
    "snapshot_every",
    "records_file",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub r: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub alpha1: f64,
    /// `None` for `dt = auto`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub scheme: Scheme,
    pub ic: InitialCondition,
    pub forcing: Forcing,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub snapshot_every: u64,
    pub records_file: PathBuf,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn law(&self) -> Result<ConstitutiveLaw> {
        ConstitutiveLaw::new(self.mu0, self.mu1, self.r)
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.dim, self.n)
    }

    pub fn params(&self) -> Result<SimParams> {
        let mut p = SimParams::new(self.law()?, self.alpha1, self.t_end, self.ic.clone());
        p.dt = self.dt;
        p.scheme = self.scheme;
        p.forcing = self.forcing.clone();
        p.seed = self.seed;
        p.snapshot_every = self.snapshot_every;
        Ok(p)
    }

    pub fn records_path(&self) -> PathBuf {
        self.output_dir.join(&self.records_file)
    }

    /// Resolves relative `output_dir` and snapshot paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
        if let InitialCondition::File(p) = &mut self.ic {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| err(line, format!("cannot parse {key} = {value:?}")))
}

fn parse_ic(line: usize, value: &str) -> Result<InitialCondition> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    let nums = |from: usize| -> Result<Vec<f64>> { tokens[from..].iter().map(|t| number(line, "ic", t)).collect() };
    match tokens.first().copied() {
        Some("taylor_green") => {
            let a = nums(1)?;
            match a.as_slice() {
                [] => Ok(InitialCondition::TaylorGreen { amplitude: 1.0 }),
                [amp] => Ok(InitialCondition::TaylorGreen { amplitude: *amp }),
                _ => Err(err(line, "taylor_green takes at most one amplitude")),
            }
        }
        Some("shear") if tokens.len() == 1 => Ok(InitialCondition::Shear),
        Some("random_band") => {
            if !(tokens.len() == 4 || tokens.len() == 5) {
                return Err(err(line, "random_band needs kmin kmax amplitude [seed]"));
            }
            let kmin: f64 = number(line, "ic", tokens[1])?;
            let kmax: f64 = number(line, "ic", tokens[2])?;
            let amplitude: f64 = number(line, "ic", tokens[3])?;
            let seed = match tokens.get(4) {
                Some(s) => Some(number::<u64>(line, "ic", s)?),
                None => None,
            };
            if !(kmin >= 0.0 && kmax >= kmin) {
                return Err(err(
                    line,
                    format!("random_band needs 0 <= kmin <= kmax, got {kmin}, {kmax}"),
                ));
            }
            Ok(InitialCondition::RandomBand {
                kmin,
                kmax,
                amplitude,
                seed,
            })
        }
        Some("file") if tokens.len() == 2 => Ok(InitialCondition::File(PathBuf::from(tokens[1]))),
        _ => Err(err(
            line,
            format!("unknown initial condition {value:?}; expected taylor_green, shear, random_band or file"),
        )),
    }
}

fn parse_forcing(line: usize, value: &str, dim: Option<usize>) -> Result<Forcing> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    match tokens.first().copied() {
        Some("none") if tokens.len() == 1 => Ok(Forcing::None),
        Some("manufactured") if tokens.len() == 1 => Ok(Forcing::Manufactured),
        Some("steady_mode") if tokens.len() >= 3 => {
            let k: Vec<i64> = tokens[1..tokens.len() - 1]
                .iter()
                .map(|t| number(line, "forcing", t))
                .collect::<Result<_>>()?;
            if let Some(d) = dim {
                if k.len() != d {
                    return Err(err(
                        line,
                        format!("steady_mode wavevector needs {d} entries, got {}", k.len()),
                    ));
                }
            }
            let amplitude = number(line, "forcing", tokens[tokens.len() - 1])?;
            Ok(Forcing::SteadyMode { k, amplitude })
        }
        _ => Err(err(
            line,
            format!("unknown forcing {value:?}; expected none, steady_mode or manufactured"),
        )),
    }
}

/// Parses and validates a configuration. Relative paths are kept as written.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(err(line, format!("unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(err(line, format!("missing value for {key}")));
        }
        if let Some((first, _)) = entries.insert(key, (line, value)) {
            return Err(err(line, format!("duplicate key {key:?} (first set on line {first})")));
        }
    }
    let missing: Vec<String> = REQUIRED
        .iter()
        .filter(|k| !entries.contains_key(*k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing));
    }
    let get = |k: &str| entries[k];
    let mut warnings = Vec::new();

    let (l, v) = get("dim");
    let dim: usize = number(l, "dim", v)?;
    if !(dim == 2 || dim == 3) {
        return Err(err(l, format!("dim must be 2 or 3, got {dim}")));
    }
    let (l, v) = get("n");
    let n: usize = number(l, "n", v)?;
    if n % 2 != 0 || n < 8 {
        return Err(err(l, format!("n must be even and at least 8, got {n}")));
    }
    let positive = |key: &str, allow_zero: bool| -> Result<f64> {
        let (l, v) = get(key);
        let x: f64 = number(l, key, v)?;
        let ok = x.is_finite() && if allow_zero { x >= 0.0 } else { x > 0.0 };
        if !ok {
            let bound = if allow_zero { ">= 0" } else { "> 0" };
            return Err(err(l, format!("{key} must be {bound}, got {x}")));
        }
        Ok(x)
    };
    let mu0 = positive("mu0", false)?;
    let mu1 = positive("mu1", true)?;
    let alpha1 = positive("alpha1", true)?;
    let t_end = positive("t_end", false)?;
    let (l, v) = get("r");
    let r: f64 = number(l, "r", v)?;
    if !(r >= 2.0 && r.is_finite()) {
        return Err(err(l, format!("r must be >= 2, got {r}")));
    }
    if r < 3.0 {
        warnings.push(format!(
            "line {l}: r = {r} is outside the theorem regime r >= 3; results are exploratory"
        ));
    }
    let (l, v) = get("ic");
    let ic = parse_ic(l, v)?;

    let dt = match entries.get("dt") {
        None => None,
        Some(&(_, "auto")) => None,
        Some(&(l, v)) => {
            let dt: f64 = number(l, "dt", v)?;
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(err(l, format!("dt must be positive, got {dt}")));
            }
            if t_end < dt {
                return Err(err(l, format!("dt = {dt} exceeds t_end = {t_end}")));
            }
            Some(dt)
        }
    };
    let scheme = match entries.get("scheme") {
        None => Scheme::Rk4,
        Some(&(_, "rk4")) => Scheme::Rk4,
        Some(&(_, "imex")) => Scheme::Imex,
        Some(&(l, v)) => return Err(err(l, format!("scheme must be rk4 or imex, got {v:?}"))),
    };
    let forcing = match entries.get("forcing") {
        None => Forcing::None,
        Some(&(l, v)) => parse_forcing(l, v, Some(dim))?,
    };
    let seed = match entries.get("seed") {
        None => 0,
        Some(&(l, v)) => number(l, "seed", v)?,
    };
    let snapshot_every = match entries.get("snapshot_every") {
        None => 0,
        Some(&(l, v)) => number(l, "snapshot_every", v)?,
    };
    let output_dir = entries
        .get("output_dir")
        .map_or(PathBuf::from("."), |(_, v)| PathBuf::from(v));
    let records_file = entries
        .get("records_file")
        .map_or(PathBuf::from("records.csv"), |(_, v)| PathBuf::from(v));

    Ok(RunConfig {
        dim,
        n,
        r,
        mu0,
        mu1,
        alpha1,
        dt,
        t_end,
        scheme,
        ic,
        forcing,
        seed,
        output_dir,
        snapshot_every,
        records_file,
        warnings,
    })
}

/// Reads and parses a configuration file, resolving relative paths against its directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.rebase(base);
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "dim = 2\nn = 16\nr = 4\nmu0 = 1\nmu1 = 1\nalpha1 = 0.1\nt_end = 0.5\nic = taylor_green\n";

    #[test]
    fn missing_keys_are_listed() {
        match parse_config("") {
            Err(Error::MissingKeys(keys)) => assert_eq!(keys.len(), 8),
            other => panic!("{other:?}"),
        }
        match parse_config("dim = 2\n# comment\n") {
            Err(Error::MissingKeys(keys)) => assert!(!keys.contains(&"dim".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults_applied() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scheme, Scheme::Rk4);
        assert_eq!(c.dt, None);
        assert_eq!(c.forcing, Forcing::None);
        assert_eq!((c.seed, c.snapshot_every), (0, 0));
        assert_eq!(c.output_dir, PathBuf::from("."));
        assert_eq!(c.records_file, PathBuf::from("records.csv"));
        assert_eq!(c.ic, InitialCondition::TaylorGreen { amplitude: 1.0 });
        assert!(c.warnings.is_empty());
        assert!(c.params().is_ok());
    }

    #[test]
    fn full_config() {
        let text = format!(
            "{MINIMAL}dt = 0.01 # fixed\nscheme = imex\nforcing = steady_mode 0 2 0.5\nseed = 9\n\
             output_dir = out\nsnapshot_every = 10\nrecords_file = r.csv\n"
        )
        .replace("ic = taylor_green", "ic = random_band 1 4 0.5 3");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.dt, Some(0.01));
        assert_eq!(c.scheme, Scheme::Imex);
        assert_eq!(
            c.forcing,
            Forcing::SteadyMode {
                k: vec![0, 2],
                amplitude: 0.5
            }
        );
        assert_eq!(
            c.ic,
            InitialCondition::RandomBand {
                kmin: 1.0,
                kmax: 4.0,
                amplitude: 0.5,
                seed: Some(3)
            }
        );
        assert_eq!(c.records_path(), PathBuf::from("out/r.csv"));
    }

    #[test]
    fn r_below_three_warns() {
        let c = parse_config(&MINIMAL.replace("r = 4", "r = 2.5")).unwrap();
        assert_eq!(c.r, 2.5);
        assert!(c.warnings[0].contains("outside the theorem regime"));
    }

    #[test]
    fn errors_name_the_line() {
        let line_of = |text: &str| match parse_config(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of(&format!("{MINIMAL}colour = red\n")), 9);
        assert_eq!(line_of(&MINIMAL.replace("n = 16", "n = 15")), 2);
        assert_eq!(line_of(&MINIMAL.replace("mu0 = 1", "mu0 = -1")), 4);
        assert_eq!(line_of(&MINIMAL.replace("r = 4", "r = four")), 3);
        assert_eq!(line_of(&format!("{MINIMAL}dt = 2\n")), 9);
        assert_eq!(line_of(&format!("{MINIMAL}scheme = euler\n")), 9);
        assert_eq!(line_of(&format!("{MINIMAL}forcing = steady_mode 1 0 0 1\n")), 9);
        assert_eq!(line_of(&MINIMAL.replace("ic = taylor_green", "ic = vortex")), 8);
        assert_eq!(line_of(&format!("{MINIMAL}dim = 3\n")), 9);
        assert_eq!(line_of(&format!("{MINIMAL}just words\n")), 9);
    }
}
