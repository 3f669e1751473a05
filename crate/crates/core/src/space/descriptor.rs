//! Serializable description of a normed space.
//!
//! The JSON grammar has exactly the keys `kind, n, p, blocks, beta, base, r`;
//! `p` is a number or the string `"inf"`.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// An exponent in `[1, ∞]`. Infinity is a distinct variant, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Inf,
}

impl Exponent {
    pub fn is_inf(self) -> bool {
        matches!(self, Exponent::Inf)
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Inf => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Inf => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExponentVisitor)
    }
}

/// Accepts the JSON forms and also text cells, where `inf` may arrive as an infinite float.
struct ExponentVisitor;

impl de::Visitor<'_> for ExponentVisitor {
    type Value = Exponent;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number in [1, inf) or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, p: f64) -> std::result::Result<Exponent, E> {
        if p == f64::INFINITY {
            return Ok(Exponent::Inf);
        }
        parse_exponent(&Value::from(p), "").map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, p: u64) -> std::result::Result<Exponent, E> {
        self.visit_f64(p as f64)
    }

    fn visit_i64<E: de::Error>(self, p: i64) -> std::result::Result<Exponent, E> {
        self.visit_f64(p as f64)
    }

    fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Exponent, E> {
        parse_exponent(&Value::from(s), "").map_err(E::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Lp,
    BlockLp,
    OrliczBeta,
    Schatten,
    IntersectBall,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Lp => "lp",
            Kind::BlockLp => "block_lp",
            Kind::OrliczBeta => "orlicz_beta",
            Kind::Schatten => "schatten",
            Kind::IntersectBall => "intersect_ball",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        Some(match s {
            "lp" => Kind::Lp,
            "block_lp" => Kind::BlockLp,
            "orlicz_beta" => Kind::OrliczBeta,
            "schatten" => Kind::Schatten,
            "intersect_ball" => Kind::IntersectBall,
            _ => return None,
        })
    }
}

/// A tree describing a normed space on ℝⁿ.
///
/// * `lp`: `n`, `p`.
/// * `block_lp`: outer exponent `p` over `blocks` whose dimensions sum to `n`.
/// * `orlicz_beta`: `n`, `beta > 0`; the Luxemburg norm of ψ_β(t) = −ln(1−t)/β.
/// * `schatten`: `n = k²` entries of a square k×k matrix in row-major order, `p`.
/// * `intersect_ball`: `max(‖x‖_base, ‖x‖₂/r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceDescriptor {
    pub kind: Kind,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<SpaceDescriptor>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<SpaceDescriptor>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl<'de> Deserialize<'de> for SpaceDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        SpaceDescriptor::from_value(&v).map_err(de::Error::custom)
    }
}

const KEYS: [&str; 7] = ["kind", "n", "p", "blocks", "beta", "base", "r"];

fn parse_exponent(v: &Value, path: &str) -> Result<Exponent> {
    let p = match v {
        Value::String(s) if s == "inf" => return Ok(Exponent::Inf),
        Value::Number(x) => x
            .as_f64()
            .ok_or_else(|| Error::input(path, "p is not a finite number"))?,
        _ => return Err(Error::input(path, "p must be a number or \"inf\"")),
    };
    if !p.is_finite() || p < 1.0 {
        return Err(Error::input(path, format!("p must be in [1, inf], got {p}")));
    }
    Ok(Exponent::Finite(p))
}

fn positive_real(v: &Value, path: &str, name: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::input(path, format!("{name} must be a number")))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::input(path, format!("{name} must be positive, got {x}")));
    }
    Ok(x)
}

impl SpaceDescriptor {
    pub fn lp(n: usize, p: Exponent) -> Self {
        SpaceDescriptor {
            kind: Kind::Lp,
            n,
            p: Some(p),
            blocks: None,
            beta: None,
            base: None,
            r: None,
        }
    }

    pub fn block_lp(p: Exponent, blocks: Vec<SpaceDescriptor>) -> Self {
        SpaceDescriptor {
            kind: Kind::BlockLp,
            n: blocks.iter().map(|b| b.n).sum(),
            p: Some(p),
            blocks: Some(blocks),
            beta: None,
            base: None,
            r: None,
        }
    }

    pub fn orlicz(n: usize, beta: f64) -> Self {
        SpaceDescriptor {
            kind: Kind::OrliczBeta,
            n,
            p: None,
            blocks: None,
            beta: Some(beta),
            base: None,
            r: None,
        }
    }

    /// Schatten class on k×k matrices (`n = k²`).
    pub fn schatten(k: usize, p: Exponent) -> Self {
        SpaceDescriptor {
            kind: Kind::Schatten,
            n: k * k,
            p: Some(p),
            blocks: None,
            beta: None,
            base: None,
            r: None,
        }
    }

    pub fn intersect_ball(base: SpaceDescriptor, r: f64) -> Self {
        SpaceDescriptor {
            kind: Kind::IntersectBall,
            n: base.n,
            p: None,
            blocks: None,
            beta: None,
            base: Some(Box::new(base)),
            r: Some(r),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::input("", e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization is infallible")
    }

    /// Parse and validate, reporting the JSON pointer of the first offending field.
    pub fn from_value(v: &Value) -> Result<Self> {
        Self::from_value_at(v, "")
    }

    fn from_value_at(v: &Value, path: &str) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::input(path, "descriptor must be a JSON object"))?;
        for key in obj.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::input(format!("{path}/{key}"), "unknown key"));
            }
        }
        let at = |k: &str| format!("{path}/{k}");
        let kind_v = obj
            .get("kind")
            .ok_or_else(|| Error::input(at("kind"), "missing"))?;
        let kind = kind_v
            .as_str()
            .and_then(Kind::parse)
            .ok_or_else(|| Error::input(at("kind"), format!("unknown kind {kind_v}")))?;
        let n_v = obj.get("n").ok_or_else(|| Error::input(at("n"), "missing"))?;
        let n = n_v
            .as_u64()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::input(at("n"), "n must be a positive integer"))?
            as usize;

        let allowed: &[&str] = match kind {
            Kind::Lp | Kind::Schatten => &["p"],
            Kind::BlockLp => &["p", "blocks"],
            Kind::OrliczBeta => &["beta"],
            Kind::IntersectBall => &["base", "r"],
        };
        for key in ["p", "blocks", "beta", "base", "r"] {
            if obj.contains_key(key) && !allowed.contains(&key) {
                return Err(Error::input(
                    at(key),
                    format!("not a field of kind {}", kind.as_str()),
                ));
            }
        }
        let require = |k: &str| obj.get(k).ok_or_else(|| Error::input(at(k), "missing"));

        let mut d = SpaceDescriptor {
            kind,
            n,
            p: None,
            blocks: None,
            beta: None,
            base: None,
            r: None,
        };
        match kind {
            Kind::Lp => d.p = Some(parse_exponent(require("p")?, &at("p"))?),
            Kind::Schatten => {
                d.p = Some(parse_exponent(require("p")?, &at("p"))?);
                let k = (n as f64).sqrt().round() as usize;
                if k * k != n {
                    return Err(Error::input(
                        at("n"),
                        format!("schatten needs a square matrix, n = {n} is not a perfect square"),
                    ));
                }
            }
            Kind::BlockLp => {
                d.p = Some(parse_exponent(require("p")?, &at("p"))?);
                let arr = require("blocks")?
                    .as_array()
                    .ok_or_else(|| Error::input(at("blocks"), "blocks must be an array"))?;
                if arr.is_empty() {
                    return Err(Error::input(at("blocks"), "blocks must be nonempty"));
                }
                let mut blocks = Vec::with_capacity(arr.len());
                for (i, b) in arr.iter().enumerate() {
                    blocks.push(Self::from_value_at(b, &format!("{path}/blocks/{i}"))?);
                }
                let total: usize = blocks.iter().map(|b| b.n).sum();
                if total != n {
                    return Err(Error::input(
                        at("n"),
                        format!("block dimensions sum to {total}, expected n = {n}"),
                    ));
                }
                d.blocks = Some(blocks);
            }
            Kind::OrliczBeta => d.beta = Some(positive_real(require("beta")?, &at("beta"), "beta")?),
            Kind::IntersectBall => {
                let base = Self::from_value_at(require("base")?, &at("base"))?;
                if base.n != n {
                    return Err(Error::input(
                        at("n"),
                        format!("base dimension {} differs from n = {n}", base.n),
                    ));
                }
                d.base = Some(Box::new(base));
                d.r = Some(positive_real(require("r")?, &at("r"), "r")?);
            }
        }
        Ok(d)
    }
}
