//! Exact bitwise estimators by brute-force marginalization: local ML over
//! the true sub-codebook, local ML over the tree-only code, and global
//! bitwise MAP.
//!
//! Scores are log-sums of per-word likelihoods, accumulated with a running
//! log-sum-exp. The candidate prior is uniform over the enumerated word set
//! (fiber uniformity makes this exact for projected sub-codebooks), so the
//! constant prior factor cancels from the comparison. An empty candidate set
//! scores negative infinity and the verdict goes to the other side.

use serde::Serialize;

use crate::bp::Sign;
use crate::channels::{ChannelModel, Observation};
use crate::error::{Error, Result};
use crate::gf2::{enumerate_codewords_bounded, project, BitMatrix, Codebook, SubCodebook};

/// Absolute tolerance on log scores below which a comparison is a tie.
/// Exact ties do occur on rational BSC patterns and must stay ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Outcome of one bitwise estimation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Decision {
    pub verdict: Sign,
    pub log_score_0: f64,
    pub log_score_1: f64,
}

impl Decision {
    fn from_scores(log_score_0: f64, log_score_1: f64) -> Decision {
        let verdict = if log_score_0 == f64::NEG_INFINITY && log_score_1 == f64::NEG_INFINITY {
            Sign::Tie
        } else if log_score_0 == f64::NEG_INFINITY {
            Sign::OneBit
        } else if log_score_1 == f64::NEG_INFINITY {
            Sign::ZeroBit
        } else {
            Sign::of_with_tolerance(log_score_0 - log_score_1, TIE_TOLERANCE)
        };
        Decision { verdict, log_score_0, log_score_1 }
    }
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Marginalize the target bit over an explicit word set of width `width`.
fn marginalize(
    words: &[u64],
    width: usize,
    target_pos: usize,
    ys: &[Observation],
    ch: &ChannelModel,
) -> Result<Decision> {
    if ys.len() != width {
        return Err(Error::LengthMismatch { expected: width, got: ys.len() });
    }
    if target_pos >= width {
        return Err(Error::IndexOutOfRange { index: target_pos, len: width });
    }
    let mut scores = [LogSum::new(), LogSum::new()];
    let mut bits = vec![0u8; width];
    for &w in words {
        for (j, b) in bits.iter_mut().enumerate() {
            *b = ((w >> j) & 1) as u8;
        }
        let ll = ch.likelihood(ys, &bits)?;
        scores[((w >> target_pos) & 1) as usize].add(ll);
    }
    Ok(Decision::from_scores(scores[0].value(), scores[1].value()))
}

/// Bitwise ML over an already-projected sub-codebook; `target_pos` indexes
/// into the sub-codebook's coordinate order.
pub fn sub_codebook_ml(
    s: &SubCodebook,
    y_i: &[Observation],
    ch: &ChannelModel,
    target_pos: usize,
) -> Result<Decision> {
    marginalize(s.words(), s.width(), target_pos, y_i, ch)
}

/// Bitwise ML of variable `target` from the local observation `y_i`, over the
/// true sub-codebook `C_I` of the full code.
pub fn local_ml(
    c: &Codebook,
    index_set: &[usize],
    y_i: &[Observation],
    ch: &ChannelModel,
    target: usize,
) -> Result<Decision> {
    let target_pos = index_set
        .iter()
        .position(|&i| i == target)
        .ok_or(Error::IndexOutOfRange { index: target, len: index_set.len() })?;
    let s = project(c, index_set)?;
    sub_codebook_ml(&s, y_i, ch, target_pos)
}

/// Bitwise ML over the tree-local code: the null space of the in-neighborhood
/// checks alone, with a uniform word prior.
pub fn tree_local_ml(
    local_checks: &BitMatrix,
    y_i: &[Observation],
    ch: &ChannelModel,
    target_pos: usize,
) -> Result<Decision> {
    let code = enumerate_codewords_bounded(local_checks, crate::gf2::ENUMERATION_BOUND)?;
    marginalize(code.words(), local_checks.cols(), target_pos, y_i, ch)
}

/// Bitwise MAP of `target` over the full code from a full-length observation.
pub fn global_map(
    c: &Codebook,
    y: &[Observation],
    ch: &ChannelModel,
    target: usize,
) -> Result<Decision> {
    if target >= c.n() {
        return Err(Error::IndexOutOfRange { index: target, len: c.n() });
    }
    marginalize(c.words(), c.n(), target, y, ch)
}
