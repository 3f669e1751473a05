//! Dimension sweeps with CSV/JSON records and log-log slopes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::bounds::{sep_lower_evr_estimate, sep_upper_two_norm};
use super::companion::companion_space;
use crate::error::{Error, Result};
use crate::estimate::{loglog_slope, MonteCarloEstimate};
use crate::geometry::psi::maxproj;
use crate::geometry::surface::{iq, iq_closed_form};
use crate::geometry::volume::volume_any;
use crate::optimize::DEFAULT_RESTARTS;
use crate::partition::{separation_bracket, separation_prob_mc};
use crate::geometry::psi::psi;
use crate::rng::derive_seed;
use crate::space::{Exponent, NormedSpace, SpaceDescriptor};

/// An exponent that may depend on the dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentSpec {
    Fixed(Exponent),
    /// p = ln n (at least 1).
    LogN,
}

impl ExponentSpec {
    pub fn at(self, n: usize) -> Exponent {
        match self {
            ExponentSpec::Fixed(p) => p,
            ExponentSpec::LogN => Exponent::Finite((n as f64).ln().max(1.0)),
        }
    }
}

impl Serialize for ExponentSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExponentSpec::Fixed(p) => p.serialize(s),
            ExponentSpec::LogN => s.serialize_str("log"),
        }
    }
}

impl<'de> Deserialize<'de> for ExponentSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if v.as_str() == Some("log") {
            return Ok(ExponentSpec::LogN);
        }
        Exponent::deserialize(v).map(ExponentSpec::Fixed).map_err(serde::de::Error::custom)
    }
}

/// The swept family: ℓ_p^n, or ℓ_p^{n/m}(ℓ_q^m) with fixed inner dimension m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Lp { p: ExponentSpec },
    LpLq { p: Exponent, q: Exponent, m: usize },
}

impl Family {
    pub fn descriptor(&self, n: usize) -> Result<SpaceDescriptor> {
        match self {
            Family::Lp { p } => Ok(SpaceDescriptor::lp(n, p.at(n))),
            Family::LpLq { p, q, m } => {
                if *m == 0 || n % m != 0 {
                    return Err(Error::input("/dims", format!("dimension {n} is not a multiple of m = {m}")));
                }
                Ok(SpaceDescriptor::block_lp(*p, vec![SpaceDescriptor::lp(*m, *q); n / m]))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// The volume-ratio lower bound on SEP.
    SepLower,
    /// Two-norm upper bound with the companion space as Y.
    SepUpper,
    /// Two-norm upper bound with Y = X.
    SepUpperSelf,
    Iq,
    /// MaxProj(B_X)/vol(B_X).
    MaxprojRatio,
    /// Δ·Pr[sep(0, v)]/‖v‖_X at Δ = 2, ‖v‖_X = 1/2 along e₁, bracketed by ψ.
    SepProb,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::SepLower => "sep_lower",
            Quantity::SepUpper => "sep_upper",
            Quantity::SepUpperSelf => "sep_upper_self",
            Quantity::Iq => "iq",
            Quantity::MaxprojRatio => "maxproj_ratio",
            Quantity::SepProb => "sep_prob",
        }
    }
}

fn default_psi_samples() -> usize {
    100_000
}
fn default_partition_samples() -> usize {
    10_000
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}
fn default_quantities() -> Vec<Quantity> {
    vec![Quantity::SepLower, Quantity::SepUpper]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    pub dims: Vec<usize>,
    #[serde(default = "default_quantities")]
    pub quantities: Vec<Quantity>,
    #[serde(default = "default_psi_samples")]
    pub psi_samples: usize,
    #[serde(default = "default_partition_samples")]
    pub partition_samples: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SweepConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input("/", e.to_string()))
    }
}

/// One row of a sweep. CSV columns: kind,n,p,q,beta,quantity,value,stderr,lower,upper,seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub kind: String,
    pub n: usize,
    pub p: Option<Exponent>,
    pub q: Option<Exponent>,
    pub beta: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub stderr: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub seed: u64,
}

impl SweepRecord {
    /// lower ≤ value + kσ and value − kσ ≤ upper where present.
    pub fn consistent(&self, k: f64) -> bool {
        let lo = self.lower.is_none_or(|l| l <= self.value + k * self.stderr);
        let hi = self.upper.is_none_or(|u| self.value - k * self.stderr <= u);
        lo && hi
    }
}

struct Row<'a> {
    family: &'a Family,
    n: usize,
    seed: u64,
}

impl Row<'_> {
    fn record(&self, quantity: Quantity, est: MonteCarloEstimate, beta: Option<f64>) -> SweepRecord {
        let (kind, p, q) = match self.family {
            Family::Lp { p } => ("lp", p.at(self.n), None),
            Family::LpLq { p, q, .. } => ("block_lp", *p, Some(*q)),
        };
        SweepRecord {
            kind: kind.into(),
            n: self.n,
            p: Some(p),
            q,
            beta,
            quantity: quantity.as_str().into(),
            value: est.value,
            stderr: est.stderr,
            lower: None,
            upper: None,
            seed: self.seed,
        }
    }
}

/// Evaluate every configured quantity at every dimension, in config order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if config.dims.is_empty() {
        return Err(Error::input("/dims", "at least one dimension is required"));
    }
    let mut out = Vec::new();
    for (i, &n) in config.dims.iter().enumerate() {
        if n < 2 {
            return Err(Error::input(format!("/dims/{i}"), "dimensions must be at least 2"));
        }
        let x = NormedSpace::new(config.family.descriptor(n)?)?;
        let base = derive_seed(config.seed, i as u64);
        let mut lower = None;
        let mut upper = None;
        let mut rows = Vec::new();
        for (j, &qty) in config.quantities.iter().enumerate() {
            let seed = derive_seed(base, j as u64);
            let row = Row {
                family: &config.family,
                n,
                seed,
            };
            let rec = match qty {
                Quantity::SepLower => {
                    let l = sep_lower_evr_estimate(&x, config.psi_samples, seed)?;
                    lower = Some(l.value.value);
                    row.record(qty, l.value, None)
                }
                Quantity::SepUpper | Quantity::SepUpperSelf => {
                    let (y, beta) = if qty == Quantity::SepUpper {
                        let c = companion_space(&x)?;
                        (c.space(), c.beta)
                    } else {
                        (x.clone(), None)
                    };
                    let u = sep_upper_two_norm(&x, &y, config.restarts, config.psi_samples, seed)?;
                    let est = u.value;
                    if qty == Quantity::SepUpper || upper.is_none() {
                        upper = Some(est.value + 3.0 * est.stderr);
                    }
                    row.record(qty, est, beta)
                }
                Quantity::Iq => {
                    let est = match iq_closed_form(&x) {
                        Some(v) => MonteCarloEstimate::exact(v),
                        None => iq(&x, config.psi_samples, seed)?,
                    };
                    row.record(qty, est, None)
                }
                Quantity::MaxprojRatio => {
                    let mp = maxproj(&x, config.restarts, config.psi_samples, seed)?;
                    let vol = volume_any(&x, config.psi_samples, derive_seed(seed, 7))?;
                    row.record(qty, mp.value.scale(1.0 / vol.value), None)
                }
                Quantity::SepProb => {
                    let mut v = vec![0.0; n];
                    v[0] = 0.5 / x.norm(&{
                        let mut e = vec![0.0; n];
                        e[0] = 1.0;
                        e
                    });
                    let u = vec![0.0; n];
                    let pr = separation_prob_mc(&x, &u, &v, 2.0, config.partition_samples, seed)?;
                    let ps = psi(&x, &v, config.psi_samples, derive_seed(seed, 9))?;
                    let (lo, hi) = separation_bracket(ps.value);
                    // Δ/‖v‖_X = 4.
                    let mut r = row.record(qty, pr.scale(4.0), None);
                    r.lower = Some(4.0 * lo);
                    r.upper = Some(4.0 * hi);
                    r
                }
            };
            rows.push(rec);
        }
        for r in &mut rows {
            match r.quantity.as_str() {
                "sep_lower" => r.upper = upper,
                "sep_upper" | "sep_upper_self" => r.lower = lower,
                _ => {}
            }
        }
        out.extend(rows);
    }
    Ok(out)
}

/// Least-squares log-log slope of value against n, per quantity.
pub fn slopes(records: &[SweepRecord]) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let g = groups.entry(r.quantity.clone()).or_default();
        g.0.push(r.n as f64);
        g.1.push(r.value);
    }
    groups
        .into_iter()
        .filter(|(_, (x, _))| x.len() >= 2)
        .map(|(k, (x, y))| (k, loglog_slope(&x, &y)))
        .collect()
}

pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r).map_err(|e| Error::Diagnostic(e.to_string()))?;
    }
    wr.flush().map_err(|e| Error::Diagnostic(e.to_string()))
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::input(format!("/{i}"), e.to_string())))
        .collect()
}

pub fn to_json(records: &[SweepRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<SweepRecord> {
        vec![
            SweepRecord {
                kind: "lp".into(),
                n: 4,
                p: Some(Exponent::Inf),
                q: None,
                beta: Some(1.5),
                quantity: "sep_upper".into(),
                value: 0.1 + 0.2,
                stderr: 1e-17,
                lower: Some(std::f64::consts::PI),
                upper: None,
                seed: u64::MAX,
            },
            SweepRecord {
                kind: "block_lp".into(),
                n: 6,
                p: Some(Exponent::Finite(2.5)),
                q: Some(Exponent::Finite(1.0)),
                beta: None,
                quantity: "iq".into(),
                value: 1.0 / 3.0,
                stderr: 0.0,
                lower: None,
                upper: Some(5e-324),
                seed: 0,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let recs = sample_records();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("kind,n,p,q,beta,quantity,value,stderr,lower,upper,seed\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn config_defaults() {
        let c = SweepConfig::from_json(r#"{"family":{"kind":"lp","p":"log"},"dims":[4,8]}"#).unwrap();
        assert_eq!(c.psi_samples, 100_000);
        assert_eq!(c.family, Family::Lp { p: ExponentSpec::LogN });
        assert!(SweepConfig::from_json(r#"{"family":{"kind":"lp","p":1},"dims":[4],"bogus":1}"#).is_err());
    }

    #[test]
    fn euclidean_rows_do_not_cross() {
        let c = SweepConfig {
            family: Family::Lp {
                p: ExponentSpec::Fixed(Exponent::Finite(2.0)),
            },
            dims: vec![2, 4],
            quantities: vec![Quantity::SepLower, Quantity::SepUpper],
            psi_samples: 1000,
            partition_samples: 100,
            restarts: 2,
            seed: 1,
        };
        let recs = sweep(&c).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.consistent(3.0)));
    }
}
