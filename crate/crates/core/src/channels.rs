//! Binary-input memoryless symmetric channels: BSC, BI-AWGN, and BEC, with
//! log-likelihood ratios and physical-degradation composition.
//!
//! Bit-to-symbol mapping is 0 -> +1, 1 -> -1 throughout, so a positive LLR
//! favors bit 0. Infinite LLRs at parameter boundaries are clamped to
//! `LLR_CLAMP`, which keeps tanh-domain message passing finite.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Saturation magnitude for otherwise-infinite LLRs.
pub const LLR_CLAMP: f64 = 50.0;

pub fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// A binary-input memoryless symmetric channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum ChannelModel {
    /// Binary symmetric channel with crossover probability p in [0, 1/2).
    Bsc(f64),
    /// Binary-input AWGN channel with noise deviation sigma > 0.
    BiAwgn(f64),
    /// Binary erasure channel with erasure probability eps in [0, 1).
    Bec(f64),
}

/// One channel output symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "sym", content = "value", rename_all = "lowercase")]
pub enum Observation {
    Bit(u8),
    Real(f64),
    Erased,
}

impl ChannelModel {
    /// The uninformative endpoint p = 1/2 is allowed; it is the exact-tie
    /// reference case in the error-rate experiments.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParameter(format!("BSC crossover {p} not in [0, 0.5]")));
        }
        Ok(ChannelModel::Bsc(p))
    }

    pub fn biawgn(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("BI-AWGN sigma {sigma} must be > 0")));
        }
        Ok(ChannelModel::BiAwgn(sigma))
    }

    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("BEC erasure prob {eps} not in [0, 1)")));
        }
        Ok(ChannelModel::Bec(eps))
    }

    /// Draw one output symbol for input bit `x`.
    pub fn sample(&self, x: u8, rng: &mut impl Rng) -> Observation {
        debug_assert!(x <= 1);
        match *self {
            ChannelModel::Bsc(p) => {
                let flip = rng.gen_bool(p);
                Observation::Bit(x ^ flip as u8)
            }
            ChannelModel::BiAwgn(sigma) => {
                let s = if x == 0 { 1.0 } else { -1.0 };
                let noise: f64 = StandardNormal.sample(rng);
                Observation::Real(s + sigma * noise)
            }
            ChannelModel::Bec(eps) => {
                if rng.gen_bool(eps) {
                    Observation::Erased
                } else {
                    Observation::Bit(x)
                }
            }
        }
    }

    /// ln P(y | x=0) / P(y | x=1), clamped to the saturation magnitude.
    pub fn llr(&self, y: Observation) -> Result<f64> {
        match (*self, y) {
            (ChannelModel::Bsc(p), Observation::Bit(b)) => {
                let mag = if p == 0.0 { LLR_CLAMP } else { clamp_llr(((1.0 - p) / p).ln()) };
                Ok(if b == 0 { mag } else { -mag })
            }
            (ChannelModel::BiAwgn(sigma), Observation::Real(y)) => {
                Ok(clamp_llr(2.0 * y / (sigma * sigma)))
            }
            (ChannelModel::Bec(_), Observation::Erased) => Ok(0.0),
            (ChannelModel::Bec(_), Observation::Bit(b)) => {
                Ok(if b == 0 { LLR_CLAMP } else { -LLR_CLAMP })
            }
            _ => Err(Error::ObservationMismatch),
        }
    }

    /// ln P(y | x) for one symbol. Can be -inf (BEC sees the flipped bit).
    pub fn log_prob(&self, y: Observation, x: u8) -> Result<f64> {
        match (*self, y) {
            (ChannelModel::Bsc(p), Observation::Bit(b)) => {
                Ok(if b == x { (1.0 - p).ln() } else { p.ln() })
            }
            (ChannelModel::BiAwgn(sigma), Observation::Real(y)) => {
                let s = if x == 0 { 1.0 } else { -1.0 };
                let d = y - s;
                Ok(-d * d / (2.0 * sigma * sigma) - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln())
            }
            (ChannelModel::Bec(eps), Observation::Erased) => Ok(eps.ln()),
            (ChannelModel::Bec(eps), Observation::Bit(b)) => {
                Ok(if b == x { (1.0 - eps).ln() } else { f64::NEG_INFINITY })
            }
            _ => Err(Error::ObservationMismatch),
        }
    }

    /// Compose with an auxiliary stage: the physically degraded channel.
    pub fn degrade(&self, q: f64) -> Result<ChannelModel> {
        match *self {
            // the composite flips iff exactly one stage flips
            ChannelModel::Bsc(p) => {
                if !(0.0..=0.5).contains(&q) {
                    return Err(Error::InvalidParameter(format!("auxiliary flip prob {q}")));
                }
                ChannelModel::bsc(p * (1.0 - q) + q * (1.0 - p))
            }
            ChannelModel::BiAwgn(sigma) => {
                if q < 0.0 {
                    return Err(Error::InvalidParameter(format!("extra deviation {q}")));
                }
                ChannelModel::biawgn((sigma * sigma + q * q).sqrt())
            }
            // the symbol survives iff both stages pass it
            ChannelModel::Bec(eps) => {
                if !(0.0..1.0).contains(&q) {
                    return Err(Error::InvalidParameter(format!("extra erasure prob {q}")));
                }
                ChannelModel::bec(eps + (1.0 - eps) * q)
            }
        }
    }

    /// Log-likelihood of an observation vector given a bit vector.
    pub fn likelihood(&self, ys: &[Observation], xs: &[u8]) -> Result<f64> {
        if ys.len() != xs.len() {
            return Err(Error::LengthMismatch { expected: ys.len(), got: xs.len() });
        }
        let mut total = 0.0;
        for (&y, &x) in ys.iter().zip(xs) {
            total += self.log_prob(y, x)?;
        }
        Ok(total)
    }

    /// The finite output alphabet with per-input probabilities, or `None` for
    /// a continuous channel. Entries are `(symbol, P(symbol | 0), P(symbol | 1))`.
    pub fn finite_outputs(&self) -> Option<Vec<(Observation, f64, f64)>> {
        match *self {
            ChannelModel::Bsc(p) => Some(vec![
                (Observation::Bit(0), 1.0 - p, p),
                (Observation::Bit(1), p, 1.0 - p),
            ]),
            ChannelModel::Bec(eps) => Some(vec![
                (Observation::Bit(0), 1.0 - eps, 0.0),
                (Observation::Bit(1), 0.0, 1.0 - eps),
                (Observation::Erased, eps, eps),
            ]),
            ChannelModel::BiAwgn(_) => None,
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChannelModel::Bsc(p) => write!(f, "bsc:{p}"),
            ChannelModel::BiAwgn(s) => write!(f, "biawgn:{s}"),
            ChannelModel::Bec(e) => write!(f, "bec:{e}"),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    /// Parse "bsc:0.05", "biawgn:0.8", or "bec:0.3".
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("bad channel spec {s:?}, expected kind:param")))?;
        let value: f64 = param
            .parse()
            .map_err(|_| Error::Config(format!("bad channel parameter {param:?} in {s:?}")))?;
        match kind {
            "bsc" => ChannelModel::bsc(value),
            "biawgn" => ChannelModel::biawgn(value),
            "bec" => ChannelModel::bec(value),
            _ => Err(Error::Config(format!("unknown channel kind {kind:?} in {s:?}"))),
        }
    }
}
