//! Flat `key = value` run configuration.

use std::fmt::Write;

use ucfem::analysis::{optimal_alpha, HarmonicMonomial, HminPolicy, Part, StudyConfig};
use ucfem::mesh::Geometry;
use ucfem::solver::{ExactSolution, PerturbationMode, PerturbationSpec};
use ucfem::Exec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactKind {
    Monomial,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub k: usize,
    pub sectors: usize,
    pub levels: Vec<usize>,
    /// Level used by the single-solve commands.
    pub level: usize,
    pub exact_kind: ExactKind,
    pub exact_n: u32,
    pub exact_part: Part,
    pub mode: PerturbationMode,
    pub epsilon: f64,
    pub kappa: f64,
    pub seed: u64,
    pub hmin: HminPolicy,
    pub rate_window: (usize, usize),
    pub csv: String,
    pub json: String,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub three_ball_n_max: u32,
    pub three_ball_alphas: Vec<f64>,
    pub three_ball_dim: usize,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            r1: 0.25,
            r2: 0.5,
            r3: 1.0,
            k: 1,
            sectors: 8,
            levels: (1..=5).collect(),
            level: 3,
            exact_kind: ExactKind::Monomial,
            exact_n: 3,
            exact_part: Part::Re,
            mode: PerturbationMode::None,
            epsilon: 0.0,
            kappa: 10.0,
            seed: 0,
            hmin: HminPolicy::Auto,
            rate_window: (2, 5),
            csv: "report.csv".into(),
            json: "report.json".into(),
            alpha1: None,
            alpha2: None,
            three_ball_n_max: 50,
            three_ball_alphas: vec![0.5, 0.55, 0.6],
            three_ball_dim: 2,
            exec: Exec::Parallel,
        }
    }
}

/// Every accepted key, in the order used by [`to_text`].
pub const KEYS: [&str; 24] = [
    "geometry.r1",
    "geometry.r2",
    "geometry.r3",
    "k",
    "sectors",
    "levels",
    "level",
    "exact.kind",
    "exact.n",
    "exact.part",
    "perturbation.mode",
    "perturbation.epsilon",
    "perturbation.kappa",
    "perturbation.seed",
    "hmin",
    "rate_window",
    "output.csv",
    "output.json",
    "exponents.alpha1",
    "exponents.alpha2",
    "three_ball.n_max",
    "three_ball.alphas",
    "three_ball.dim",
    "exec",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::invalid(key, format!("cannot parse `{v}`")))
}

fn range(key: &str, v: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = v.split_once("..").ok_or_else(|| CliError::invalid(key, format!("expected `a..b`, got `{v}`")))?;
    Ok((num(key, a.trim())?, num(key, b.trim())?))
}

fn levels(key: &str, v: &str) -> Result<Vec<usize>, CliError> {
    if v.contains("..") {
        let (a, b) = range(key, v)?;
        return Ok((a..=b).collect());
    }
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn float_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn part_name(p: Part) -> &'static str {
    match p {
        Part::Re => "re",
        Part::Im => "im",
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "geometry.r1" => self.r1 = num(key, v)?,
            "geometry.r2" => self.r2 = num(key, v)?,
            "geometry.r3" => self.r3 = num(key, v)?,
            "k" => self.k = num(key, v)?,
            "sectors" => self.sectors = num(key, v)?,
            "levels" => self.levels = levels(key, v)?,
            "level" => self.level = num(key, v)?,
            "exact.kind" => {
                self.exact_kind = match v {
                    "monomial" => ExactKind::Monomial,
                    "zero" => ExactKind::Zero,
                    _ => return Err(CliError::invalid(key, "expected `monomial` or `zero`")),
                }
            }
            "exact.n" => self.exact_n = num(key, v)?,
            "exact.part" => {
                self.exact_part = match v.to_ascii_lowercase().as_str() {
                    "re" => Part::Re,
                    "im" => Part::Im,
                    _ => return Err(CliError::invalid(key, "expected `re` or `im`")),
                }
            }
            "perturbation.mode" => {
                self.mode = PerturbationMode::from_name(v)
                    .ok_or_else(|| CliError::invalid(key, "expected `none`, `oscillatory` or `nodal_noise`"))?
            }
            "perturbation.epsilon" => self.epsilon = num(key, v)?,
            "perturbation.kappa" => self.kappa = num(key, v)?,
            "perturbation.seed" => self.seed = num(key, v)?,
            "hmin" => {
                self.hmin = match v {
                    "auto" => HminPolicy::Auto,
                    "off" => HminPolicy::Off,
                    _ => HminPolicy::Value(num(key, v)?),
                }
            }
            "rate_window" => self.rate_window = range(key, v)?,
            "output.csv" => self.csv = v.to_string(),
            "output.json" => self.json = v.to_string(),
            "exponents.alpha1" => self.alpha1 = Some(num(key, v)?),
            "exponents.alpha2" => self.alpha2 = Some(num(key, v)?),
            "three_ball.n_max" => self.three_ball_n_max = num(key, v)?,
            "three_ball.alphas" => self.three_ball_alphas = float_list(key, v)?,
            "three_ball.dim" => self.three_ball_dim = num(key, v)?,
            "exec" => {
                self.exec = match v {
                    "parallel" => Exec::Parallel,
                    "sequential" => Exec::Sequential,
                    _ => return Err(CliError::invalid(key, "expected `parallel` or `sequential`")),
                }
            }
            _ => return Err(CliError::invalid(key, "unknown key")),
        }
        Ok(())
    }

    /// Re-checks every invariant, naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let geom = |msg: &str| CliError::invalid("geometry", msg);
        if !(self.r1 > 0.0) {
            return Err(geom("0 < r1 violated"));
        }
        if !(self.r1 < self.r2) {
            return Err(geom("r1 < r2 violated"));
        }
        if !(self.r2 < self.r3) {
            return Err(geom("r2 < r3 violated"));
        }
        if !(self.r3.is_finite()) {
            return Err(geom("r3 must be finite"));
        }
        if !(self.k == 1 || self.k == 2) {
            return Err(CliError::invalid("k", "must be 1 or 2"));
        }
        if self.sectors < 6 || !self.sectors.is_multiple_of(2) {
            return Err(CliError::invalid("sectors", "must be even and >= 6"));
        }
        if self.levels.is_empty() || self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::invalid("levels", "must be a nonempty increasing list"));
        }
        if self.exact_n < 1 {
            return Err(CliError::invalid("exact.n", "must be >= 1"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::invalid("perturbation.epsilon", "must be finite and >= 0"));
        }
        if self.mode == PerturbationMode::None && self.epsilon > 0.0 {
            return Err(CliError::invalid("perturbation.mode", "`none` conflicts with epsilon > 0"));
        }
        if self.mode == PerturbationMode::Oscillatory && self.epsilon > 0.0 && !(self.kappa > 0.0) {
            return Err(CliError::invalid("perturbation.kappa", "must be > 0"));
        }
        if let HminPolicy::Value(v) = self.hmin {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::invalid("hmin", "must be `auto`, `off` or a positive number"));
            }
        }
        if self.rate_window.0 > self.rate_window.1 {
            return Err(CliError::invalid("rate_window", "lower end exceeds upper end"));
        }
        for (key, a) in [("exponents.alpha1", self.alpha1), ("exponents.alpha2", self.alpha2)] {
            if let Some(a) = a {
                if !(a > 0.0 && a < 1.0) {
                    return Err(CliError::invalid(key, "must lie in (0, 1)"));
                }
            }
        }
        if self.alpha1.is_some() != self.alpha2.is_some() {
            return Err(CliError::invalid("exponents", "alpha1 and alpha2 must be given together"));
        }
        if self.three_ball_n_max < 1 {
            return Err(CliError::invalid("three_ball.n_max", "must be >= 1"));
        }
        if self.three_ball_alphas.is_empty() || self.three_ball_alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(CliError::invalid("three_ball.alphas", "values must lie in (0, 1)"));
        }
        if !(self.three_ball_dim == 2 || self.three_ball_dim == 3) {
            return Err(CliError::invalid("three_ball.dim", "must be 2 or 3"));
        }
        if self.csv.is_empty() || self.json.is_empty() {
            return Err(CliError::invalid("output", "file names must be nonempty"));
        }
        optimal_alpha(self.r1, self.r2, self.r3).map_err(|e| geom(&e.to_string()))?;
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        Geometry { r1: self.r1, r2: self.r2, r3: self.r3, dim: 2 }
    }

    pub fn exact(&self) -> ExactSolution {
        match self.exact_kind {
            ExactKind::Zero => ExactSolution::Zero,
            ExactKind::Monomial => ExactSolution::Monomial(HarmonicMonomial::new(self.exact_n, self.exact_part)),
        }
    }

    pub fn perturbation(&self) -> PerturbationSpec {
        PerturbationSpec { mode: self.mode, epsilon: self.epsilon, kappa: self.kappa, seed: self.seed }
    }

    pub fn study(&self) -> StudyConfig {
        StudyConfig {
            geometry: self.geometry(),
            k: self.k,
            sectors: self.sectors,
            levels: self.levels.clone(),
            exact: self.exact(),
            perturbation: self.perturbation(),
            hmin: self.hmin,
            rate_window: self.rate_window,
            exec: self.exec,
        }
    }

    /// Canonical text form; `parse_config(&c.to_text()) == Ok(c)`.
    pub fn to_text(&self) -> String {
        let f = |v: f64| format!("{v:?}");
        let levels = if self.levels.windows(2).all(|w| w[1] == w[0] + 1) {
            format!("{}..{}", self.levels[0], self.levels[self.levels.len() - 1])
        } else {
            self.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        };
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("geometry.r1", f(self.r1));
        kv("geometry.r2", f(self.r2));
        kv("geometry.r3", f(self.r3));
        kv("k", self.k.to_string());
        kv("sectors", self.sectors.to_string());
        kv("levels", levels);
        kv("level", self.level.to_string());
        kv("exact.kind", match self.exact_kind {
            ExactKind::Monomial => "monomial".into(),
            ExactKind::Zero => "zero".into(),
        });
        kv("exact.n", self.exact_n.to_string());
        kv("exact.part", part_name(self.exact_part).into());
        kv("perturbation.mode", self.mode.name().into());
        kv("perturbation.epsilon", f(self.epsilon));
        kv("perturbation.kappa", f(self.kappa));
        kv("perturbation.seed", self.seed.to_string());
        kv("hmin", match self.hmin {
            HminPolicy::Auto => "auto".into(),
            HminPolicy::Off => "off".into(),
            HminPolicy::Value(v) => f(v),
        });
        kv("rate_window", format!("{}..{}", self.rate_window.0, self.rate_window.1));
        kv("output.csv", self.csv.clone());
        kv("output.json", self.json.clone());
        if let (Some(a1), Some(a2)) = (self.alpha1, self.alpha2) {
            kv("exponents.alpha1", f(a1));
            kv("exponents.alpha2", f(a2));
        }
        kv("three_ball.n_max", self.three_ball_n_max.to_string());
        kv("three_ball.alphas", self.three_ball_alphas.iter().map(|a| f(*a)).collect::<Vec<_>>().join(","));
        kv("three_ball.dim", self.three_ball_dim.to_string());
        kv("exec", match self.exec {
            Exec::Parallel => "parallel".into(),
            Exec::Sequential => "sequential".into(),
        });
        out
    }
}

/// Splits one line into key and value; `None` for blank and comment lines.
fn split_line(raw: &str, line: usize) -> Result<Option<(&str, &str)>, CliError> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CliError::Parse { line, msg: format!("expected `key = value`, got `{text}`") })?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(CliError::Parse { line, msg: "empty key or value".into() });
    }
    Ok(Some((k, v)))
}

/// Parses `text` into `(line, key, value)` assignments, rejecting duplicates.
fn assignments(text: &str) -> Result<Vec<(usize, String, String)>, CliError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some((k, v)) = split_line(raw, line)? else { continue };
        if out.iter().any(|(_, key, _)| key == k) {
            return Err(CliError::Parse { line, msg: format!("duplicate key `{k}`") });
        }
        out.push((line, k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Parses and validates a configuration, filling unspecified keys with defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_with_overrides(text, &[])
}

/// Like [`parse_config`], with `key=value` overrides applied after the text.
pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut items = assignments(text)?;
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::invalid(o, "override must read `key=value`"))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        items.retain(|(_, key, _)| *key != k);
        items.push((0, k, v));
    }
    let mut c = RunConfig::default();
    for (line, k, v) in &items {
        c.set(k, v).map_err(|e| match (e, *line) {
            (CliError::Invalid { key, msg }, l) if l > 0 => CliError::Parse { line: l, msg: format!("{key}: {msg}") },
            (e, _) => e,
        })?;
    }
    // an amplitude without an explicit mode means oscillatory data noise
    if c.epsilon > 0.0 && !items.iter().any(|(_, k, _)| k == "perturbation.mode") {
        c.mode = PerturbationMode::Oscillatory;
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!((c.r1, c.r2, c.r3, c.k, c.sectors), (0.25, 0.5, 1.0, 1, 8));
        assert_eq!(c.levels, vec![1, 2, 3, 4, 5]);
        assert_eq!((c.exact_n, c.exact_part, c.epsilon), (3, Part::Re, 0.0));
    }

    #[test]
    fn ordering_violation_names_the_constraint() {
        let e = parse_config("geometry.r2 = 2.0").unwrap_err();
        assert!(e.to_string().contains("r2 < r3 violated"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn epsilon_switches_on_oscillatory_defaults() {
        let c = parse_config("perturbation.epsilon = 1e-3").unwrap();
        assert_eq!(c.mode, PerturbationMode::Oscillatory);
        assert_eq!((c.kappa, c.seed), (10.0, 0));
    }

    #[test]
    fn comments_and_line_numbers() {
        let c = parse_config("# header\n\nk = 2   # quadratic\nlevels = 1,3,4\n").unwrap();
        assert_eq!(c.k, 2);
        assert_eq!(c.levels, vec![1, 3, 4]);
        match parse_config("k = 1\nbogus = 3\n").unwrap_err() {
            CliError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("unknown key"));
            }
            e => panic!("{e}"),
        }
        assert!(matches!(parse_config("k 1").unwrap_err(), CliError::Parse { line: 1, .. }));
        assert!(matches!(parse_config("k = 1\nk = 2").unwrap_err(), CliError::Parse { line: 2, .. }));
        assert!(matches!(parse_config("sectors = seven").unwrap_err(), CliError::Parse { line: 1, .. }));
    }

    #[test]
    fn validation_errors() {
        for text in [
            "k = 3",
            "sectors = 7",
            "levels = 3,2",
            "exact.n = 0",
            "perturbation.mode = none\nperturbation.epsilon = 1e-3",
            "hmin = -1",
            "rate_window = 4..2",
            "exponents.alpha1 = 0.5",
            "three_ball.alphas = 0.5,1.5",
            "three_ball.dim = 4",
        ] {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{text}: {e}");
        }
    }

    #[test]
    fn text_round_trip() {
        let texts = [
            "",
            "geometry.r1 = 0.1\ngeometry.r2 = 0.3\nlevels = 0,2,5\nperturbation.mode = nodal_noise\nperturbation.epsilon = 0.001\nperturbation.seed = 9",
            "hmin = 0.05\nexponents.alpha1 = 0.6\nexponents.alpha2 = 0.5\nexec = sequential\nexact.kind = zero",
        ];
        for t in texts {
            let c = parse_config(t).unwrap();
            assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        }
        let echoed = RunConfig::default().to_text();
        for key in KEYS.iter().filter(|k| !k.starts_with("exponents")) {
            assert!(echoed.contains(&format!("{key} = ")), "{key}");
        }
    }
}
