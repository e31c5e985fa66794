//! Flat `key=value` experiment configuration. List-valued settings repeat
//! their key, one value per line. `#` starts a comment.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::HostSpec;
use crate::lemmas::LemmaId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    ExactThreshold,
    Pipeline,
    Lemma,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::ExactThreshold => "exact_threshold",
            Mode::Pipeline => "pipeline",
            Mode::Lemma => "lemma",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "exact_threshold" => Ok(Mode::ExactThreshold),
            "pipeline" => Ok(Mode::Pipeline),
            "lemma" => Ok(Mode::Lemma),
            _ => Err(Error::Parameter(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HostFamily {
    Complete,
    Circulant,
    RandomRegular,
}

impl fmt::Display for HostFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HostFamily::Complete => "complete",
            HostFamily::Circulant => "circulant",
            HostFamily::RandomRegular => "random-regular",
        })
    }
}

impl FromStr for HostFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<HostFamily> {
        match s {
            "complete" => Ok(HostFamily::Complete),
            "circulant" => Ok(HostFamily::Circulant),
            "random-regular" => Ok(HostFamily::RandomRegular),
            _ => Err(Error::Parameter(format!("unknown host family {s:?}"))),
        }
    }
}

/// Host degree, either absolute (`degree=128`) or a fraction of n
/// (`degree=0.5n`, rounded to the nearest integer).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DegreeRule {
    Absolute(usize),
    Fraction(f64),
}

impl DegreeRule {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            DegreeRule::Absolute(d) => d,
            DegreeRule::Fraction(f) => (f * n as f64).round() as usize,
        }
    }
}

impl fmt::Display for DegreeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeRule::Absolute(d) => write!(f, "{d}"),
            DegreeRule::Fraction(x) => write!(f, "{x}n"),
        }
    }
}

impl FromStr for DegreeRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<DegreeRule> {
        let bad = || Error::Parameter(format!("bad degree {s:?}"));
        match s.strip_suffix('n') {
            Some(frac) => frac.parse().map(DegreeRule::Fraction).map_err(|_| bad()),
            None => s.parse().map(DegreeRule::Absolute).map_err(|_| bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PalettePolicy {
    NMinus1,
    Fixed(u32),
}

impl PalettePolicy {
    pub fn resolve(&self, n: usize) -> u32 {
        match *self {
            PalettePolicy::NMinus1 => (n - 1) as u32,
            PalettePolicy::Fixed(k) => k,
        }
    }
}

impl fmt::Display for PalettePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PalettePolicy::NMinus1 => f.write_str("n_minus_1"),
            PalettePolicy::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for PalettePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<PalettePolicy> {
        if s == "n_minus_1" {
            return Ok(PalettePolicy::NMinus1);
        }
        s.parse()
            .map(PalettePolicy::Fixed)
            .map_err(|_| Error::Parameter(format!("bad palette {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub host: HostFamily,
    pub degree: Option<DegreeRule>,
    pub n_list: Vec<usize>,
    /// `c` in exact-threshold mode, `epsilon` otherwise.
    pub coeff_list: Vec<f64>,
    pub palette: PalettePolicy,
    pub trials: usize,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Lemma mode: which checkers to run.
    pub lemmas: Vec<LemmaId>,
    /// Lemma mode: the free function value omega in the color-hit check.
    pub omega: f64,
    /// Lemma mode: sampled bipartitions per trial.
    pub cut_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::ExactThreshold,
            host: HostFamily::Complete,
            degree: None,
            n_list: Vec::new(),
            coeff_list: Vec::new(),
            palette: PalettePolicy::NMinus1,
            trials: 1,
            master_seed: 0,
            output_path: None,
            lemmas: vec![LemmaId::CutSparsity, LemmaId::Straddle, LemmaId::ColorHit],
            omega: 3.0,
            cut_samples: 100,
        }
    }
}

fn parse_lemma(s: &str) -> Result<LemmaId> {
    match s {
        "cuts" => Ok(LemmaId::CutSparsity),
        "straddle" => Ok(LemmaId::Straddle),
        "colorhit" => Ok(LemmaId::ColorHit),
        _ => Err(Error::Parameter(format!("unknown lemma {s:?}"))),
    }
}

impl ExperimentConfig {
    fn coeff_key(&self) -> &'static str {
        match self.mode {
            Mode::ExactThreshold => "c",
            _ => "epsilon",
        }
    }

    pub fn host_spec(&self, n: usize) -> Result<HostSpec> {
        let degree = |what: &str| {
            self.degree
                .map(|r| r.resolve(n))
                .ok_or_else(|| Error::Parameter(format!("{what} host needs a degree")))
        };
        match self.host {
            HostFamily::Complete => Ok(HostSpec::Complete { n }),
            HostFamily::Circulant => HostSpec::circulant_with_degree(n, degree("circulant")?),
            HostFamily::RandomRegular => Ok(HostSpec::RandomRegular {
                n,
                d: degree("random-regular")?,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.coeff_list.is_empty() {
            return Err(Error::Parameter("need at least one n and one coefficient".into()));
        }
        for &c in &self.coeff_list {
            let ok = match self.mode {
                Mode::ExactThreshold => c >= 0.0 && c.is_finite(),
                _ => c > 0.0 && c.is_finite(),
            };
            if !ok {
                return Err(Error::Parameter(format!(
                    "{} = {c} out of range",
                    self.coeff_key()
                )));
            }
        }
        if !(self.omega > 0.0) || self.cut_samples == 0 {
            return Err(Error::Parameter("omega and cut_samples must be positive".into()));
        }
        for &n in &self.n_list {
            self.host_spec(n)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig {
            lemmas: Vec::new(),
            ..ExperimentConfig::default()
        };
        let mut lemmas_given = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let wrap = |e: Error| Error::parse(line_no, e.to_string());
            let num_err = || Error::parse(line_no, format!("bad value for {key}: {value:?}"));
            let float = |v: &str| v.parse::<f64>().map_err(|_| num_err());
            match key {
                "mode" => cfg.mode = value.parse().map_err(wrap)?,
                "host" => cfg.host = value.parse().map_err(wrap)?,
                "degree" => cfg.degree = Some(value.parse().map_err(wrap)?),
                "n" => cfg.n_list.push(value.parse().map_err(|_| num_err())?),
                "c" | "epsilon" => cfg.coeff_list.push(float(value)?),
                "palette" => cfg.palette = value.parse().map_err(wrap)?,
                "trials" => cfg.trials = value.parse().map_err(|_| num_err())?,
                "seed" => cfg.master_seed = value.parse().map_err(|_| num_err())?,
                "output" => cfg.output_path = Some(PathBuf::from(value)),
                "lemma" => {
                    lemmas_given = true;
                    if value == "all" {
                        cfg.lemmas = ExperimentConfig::default().lemmas;
                    } else {
                        cfg.lemmas.push(parse_lemma(value).map_err(wrap)?);
                    }
                }
                "omega" => cfg.omega = float(value)?,
                "cut_samples" => cfg.cut_samples = value.parse().map_err(|_| num_err())?,
                _ => return Err(Error::parse(line_no, format!("unknown key {key:?}"))),
            }
        }
        if !lemmas_given {
            cfg.lemmas = ExperimentConfig::default().lemmas;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Canonical form; `parse` reads it back to an equal config.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# logarithms are natural")?;
        writeln!(f, "mode={}", self.mode)?;
        writeln!(f, "host={}", self.host)?;
        if let Some(d) = self.degree {
            writeln!(f, "degree={d}")?;
        }
        for n in &self.n_list {
            writeln!(f, "n={n}")?;
        }
        for c in &self.coeff_list {
            writeln!(f, "{}={c}", self.coeff_key())?;
        }
        writeln!(f, "palette={}", self.palette)?;
        writeln!(f, "trials={}", self.trials)?;
        writeln!(f, "seed={}", self.master_seed)?;
        if let Some(p) = &self.output_path {
            writeln!(f, "output={}", p.display())?;
        }
        for l in &self.lemmas {
            writeln!(f, "lemma={l}")?;
        }
        writeln!(f, "omega={}", self.omega)?;
        writeln!(f, "cut_samples={}", self.cut_samples)
    }
}
