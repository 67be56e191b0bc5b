//! Function-spec files: flat `key = value` records.
//!
//! ```text
//! # comments start with '#'
//! function = spiral-koebe:0.5
//! kind = spiral
//! alpha = 0.5
//! ```
//!
//! Recognised keys: `function`, `coeffs`, `g`, `h_coeffs`, `kind`, `variant`,
//! `alpha`, `beta`, `c`, `order`. Unknown keys and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use loewner_core::chains::ChainVariant;
use loewner_core::criteria::{CriterionKind, Subject};
use loewner_core::report::fmt_complex;
use loewner_core::series::DEFAULT_ORDER;
use loewner_core::{AnalyticFunction, LoewnerChain, PowerSeries};
use num_complex::Complex64;

const KEYS: [&str; 10] = [
    "function", "coeffs", "g", "h_coeffs", "kind", "variant", "alpha", "beta", "c", "order",
];

/// A function named on the command line or in a spec file.
#[derive(Debug, Clone, PartialEq)]
pub enum FnSpec {
    Identity,
    Koebe,
    HalfPlane,
    SpiralKoebe(f64),
    /// Coefficients from `z^0` upward; must start `0, 1`.
    Polynomial(Vec<Complex64>),
    /// Taylor coefficients of a series-backed function.
    Series(Vec<Complex64>),
}

impl FnSpec {
    /// Parses `name[:params]`, e.g. `koebe`, `spiral-koebe:0.5`,
    /// `polynomial:0,1,1.5`, `series:0,1,0.5i`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, param) = match text.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (text, None),
        };
        let no_param = |f: FnSpec| match param {
            None => Ok(f),
            Some(p) => Err(anyhow!("function '{name}' takes no parameter (got '{p}')")),
        };
        match name {
            "identity" => no_param(FnSpec::Identity),
            "koebe" => no_param(FnSpec::Koebe),
            "half-plane" | "halfplane" => no_param(FnSpec::HalfPlane),
            "spiral-koebe" => {
                let p = param.ok_or_else(|| anyhow!("spiral-koebe needs an angle, e.g. spiral-koebe:0.5"))?;
                Ok(FnSpec::SpiralKoebe(parse_real(p)?))
            }
            "polynomial" | "poly" => Ok(FnSpec::Polynomial(parse_list(
                param.ok_or_else(|| anyhow!("polynomial needs coefficients, e.g. polynomial:0,1,1.5"))?,
            )?)),
            "series" => Ok(FnSpec::Series(parse_list(
                param.ok_or_else(|| anyhow!("series needs coefficients, e.g. series:0,1,0.5"))?,
            )?)),
            other => bail!(
                "unknown function '{other}' (expected identity, koebe, half-plane, spiral-koebe:α, polynomial:…, series:…)"
            ),
        }
    }

    pub fn build(&self, order: usize) -> Result<AnalyticFunction> {
        Ok(match self {
            FnSpec::Identity => AnalyticFunction::identity(),
            FnSpec::Koebe => AnalyticFunction::koebe(),
            FnSpec::HalfPlane => AnalyticFunction::half_plane(),
            FnSpec::SpiralKoebe(a) => AnalyticFunction::spiral_koebe(*a)?,
            FnSpec::Polynomial(c) => AnalyticFunction::polynomial(c.clone())?,
            FnSpec::Series(c) => AnalyticFunction::from_series(padded_series(c, order)?)?,
        })
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Identity => write!(f, "identity"),
            FnSpec::Koebe => write!(f, "koebe"),
            FnSpec::HalfPlane => write!(f, "half-plane"),
            FnSpec::SpiralKoebe(a) => write!(f, "spiral-koebe:{a}"),
            FnSpec::Polynomial(c) => write!(f, "polynomial:{}", join(c)),
            FnSpec::Series(c) => write!(f, "series:{}", join(c)),
        }
    }
}

fn join(c: &[Complex64]) -> String {
    c.iter()
        .map(|z| fmt_complex(*z))
        .collect::<Vec<_>>()
        .join(",")
}

fn padded_series(c: &[Complex64], order: usize) -> Result<PowerSeries> {
    if c.len() > order + 1 {
        bail!(
            "{} coefficients exceed the truncation order {order}",
            c.len()
        );
    }
    let mut coeffs = c.to_vec();
    coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
    Ok(PowerSeries::new(coeffs)?)
}

/// Parses `1`, `-0.5`, `2i`, `i`, `-i`, `0.3-1.2i`, `1e-3+2e-2i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty number");
    }
    let bad = || anyhow!("cannot parse '{text}' as a complex number");
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    // The split is the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| bad())?,
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse().map_err(|_| bad())?
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_real(text: &str) -> Result<f64> {
    let z = parse_complex(text)?;
    if z.im != 0.0 {
        bail!("expected a real number, found '{text}'");
    }
    Ok(z.re)
}

pub fn parse_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_kind(name: &str, alpha: f64, beta: f64) -> Result<CriterionKind> {
    let kind = match name.trim() {
        "convexity" | "convex" => CriterionKind::Convexity,
        "spirallike" => CriterionKind::Spirallike { alpha },
        "spiral" | "spiral-uk" => CriterionKind::SpiralUk { alpha },
        "starlike" | "starlike-tilted" => CriterionKind::StarlikeTilted { alpha },
        "bazilevic1" => CriterionKind::Bazilevic1 { alpha, beta },
        "bazilevic2" => CriterionKind::Bazilevic2 { alpha, beta },
        "sheil-small" => CriterionKind::SheilSmallHalfPlane { alpha, beta },
        other => bail!(
            "unknown criterion kind '{other}' (expected convexity, spirallike, spiral, starlike, bazilevic1, bazilevic2, sheil-small)"
        ),
    };
    kind.validate()?;
    Ok(kind)
}

/// Raw key/value pairs, either read from a file or assembled from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    values: BTreeMap<String, String>,
}

impl Record {
    pub fn parse(text: &str) -> Result<Self> {
        let mut rec = Record::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", n + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key '{key}'", n + 1);
            }
            if rec
                .values
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                bail!("line {}: key '{key}' given twice", n + 1);
            }
        }
        Ok(rec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Sets `key`, replacing any value from the file.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key.to_string(), value.into());
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `key = value` lines in a fixed key order.
    pub fn render(&self) -> String {
        KEYS.iter()
            .filter_map(|k| self.values.get(*k).map(|v| format!("{k} = {v}\n")))
            .collect()
    }
}

/// A fully interpreted spec.
#[derive(Debug, Clone)]
pub struct Spec {
    pub record: Record,
    pub subject: Subject,
    pub kind: Option<CriterionKind>,
    pub order: usize,
    variant: Option<String>,
}

impl Spec {
    pub fn from_record(record: Record) -> Result<Self> {
        let order = match record.get("order") {
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| anyhow!("order must be a positive integer, found '{v}'"))?,
            None => DEFAULT_ORDER,
        };
        if order == 0 {
            bail!("order must be positive");
        }
        let alpha = record.get("alpha").map(parse_complex).transpose()?;
        let beta = record
            .get("beta")
            .map(parse_real)
            .transpose()?
            .unwrap_or(0.0);
        let real_alpha = || -> Result<f64> {
            match alpha {
                Some(a) if a.im != 0.0 => {
                    bail!("alpha must be real here, found {}", fmt_complex(a))
                }
                Some(a) => Ok(a.re),
                None => Ok(0.0),
            }
        };
        let kind = record
            .get("kind")
            .map(|k| parse_kind(k, real_alpha()?, beta))
            .transpose()?;

        let function = record.get("function").map(FnSpec::parse).transpose()?;
        let function = match (function, record.get("coeffs")) {
            (Some(_), Some(_)) => bail!("give either 'function' or 'coeffs', not both"),
            (None, Some(c)) => Some(FnSpec::Polynomial(parse_list(c)?)),
            (f, None) => f,
        };
        let pair = record.get("g").is_some() || record.get("h_coeffs").is_some();
        let subject = match (function, pair) {
            (Some(_), true) => bail!("give either a function or a (g, h_coeffs) pair, not both"),
            (Some(f), false) => Subject::Function(f.build(order)?),
            (None, true) => {
                let g = FnSpec::parse(record.get("g").unwrap_or("identity"))?.build(order)?;
                let h = match record.get("h_coeffs") {
                    Some(c) => padded_series(&parse_list(c)?, order)?,
                    None => PowerSeries::one(order),
                };
                Subject::Pair { g, h }
            }
            (None, false) => {
                bail!("no function given (use 'function', 'coeffs', or 'g'/'h_coeffs')")
            }
        };
        let variant = record.get("variant").map(str::to_string);
        let spec = Spec {
            record,
            subject,
            kind,
            order,
            variant,
        };
        // Surface chain parameter errors at parse time.
        if spec.variant.is_some() {
            spec.chain()?;
        }
        Ok(spec)
    }

    pub fn criterion(&self) -> Result<CriterionKind> {
        self.kind
            .ok_or_else(|| anyhow!("no criterion kind given (use 'kind' or --kind)"))
    }

    /// The chain named by `variant`, or failing that the chain matched to
    /// the criterion kind.
    pub fn chain(&self) -> Result<LoewnerChain> {
        let Some(name) = &self.variant else {
            let kind = self
                .criterion()
                .context("no chain variant given and no criterion to derive one from")?;
            return LoewnerChain::for_criterion(&kind, &self.subject, self.order)?.ok_or_else(
                || {
                    anyhow!(
                        "criterion '{}' has no matching chain; give 'variant'",
                        kind.name()
                    )
                },
            );
        };
        let alpha = self.record.get("alpha").map(parse_complex).transpose()?;
        let beta = self
            .record
            .get("beta")
            .map(parse_real)
            .transpose()?
            .unwrap_or(0.0);
        let real = |a: Option<Complex64>| -> Result<f64> {
            match a {
                Some(a) if a.im != 0.0 => bail!("alpha must be real for variant '{name}'"),
                Some(a) => Ok(a.re),
                None => bail!("variant '{name}' needs alpha"),
            }
        };
        let function = || -> Result<AnalyticFunction> {
            match &self.subject {
                Subject::Function(f) => Ok(f.clone()),
                Subject::Pair { .. } => bail!("variant '{name}' needs a single function"),
            }
        };
        let variant = match name.as_str() {
            "convex-combination" => ChainVariant::ConvexCombination {
                f: function()?,
                alpha: alpha.ok_or_else(|| anyhow!("variant '{name}' needs alpha"))?,
            },
            "spirallike" | "spirallike-standard" => ChainVariant::SpirallikeStandard {
                f: function()?,
                alpha: real(alpha)?,
            },
            "exponential" => {
                let c = match (self.record.get("c"), alpha) {
                    (Some(c), _) => parse_complex(c)?,
                    (None, Some(a)) if a.im == 0.0 => Complex64::from_polar(1.0, -a.re),
                    (None, Some(_)) => bail!("alpha must be real for variant 'exponential'"),
                    (None, None) => Complex64::new(1.0, 0.0),
                };
                ChainVariant::Exponential { f: function()?, c }
            }
            "sheil-small" => ChainVariant::SheilSmall {
                f: function()?,
                alpha: real(alpha)?,
                beta,
            },
            "bazilevic-integral" => {
                let Subject::Pair { g, h } = &self.subject else {
                    bail!("variant 'bazilevic-integral' needs 'g' and 'h_coeffs'");
                };
                ChainVariant::BazilevicIntegral {
                    g: g.clone(),
                    h: h.clone(),
                    alpha: real(alpha)?,
                    beta,
                    order: self.order,
                }
            }
            other => bail!(
                "unknown chain variant '{other}' (expected convex-combination, spirallike, exponential, sheil-small, bazilevic-integral)"
            ),
        };
        Ok(LoewnerChain::new(variant)?)
    }
}
