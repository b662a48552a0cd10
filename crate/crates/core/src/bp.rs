//! Sum-product belief propagation with a flooding schedule, on Tanner graphs
//! and on standalone computation trees.
//!
//! Message convention: `v2c[0]` is the channel LLR on every edge; for
//! iteration l >= 1,
//!
//! ```text
//! c2v[l](c->v) = 2 atanh( prod_{v' in c, v' != v} tanh(v2c[l-1](v'->c) / 2) )
//! v2c[l](v->c) = llr(v) + sum_{c' in v, c' != c} c2v[l](c'->v)
//! ```
//!
//! so the message on edge (v, c) at iteration l is a function of exactly the
//! depth-2l directed neighborhood of that edge. The tree evaluator reuses the
//! same update expressions in the same operand order, which lets equivalence
//! tests demand bit-exact equality between the two paths.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::channels::clamp_llr;
use crate::error::{Error, Result};
use crate::tanner::{ComputationTree, DirectedEdge, NodeKind, TannerGraph};

/// Three-way sign of an LLR; exact zero is preserved as a tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    ZeroBit,
    OneBit,
    Tie,
}

impl Sign {
    pub fn of(llr: f64) -> Sign {
        if llr > 0.0 {
            Sign::ZeroBit
        } else if llr < 0.0 {
            Sign::OneBit
        } else {
            Sign::Tie
        }
    }

    /// Sign with a tie window, for comparisons against log-domain oracles
    /// whose ties are only exact up to rounding.
    pub fn of_with_tolerance(llr: f64, tol: f64) -> Sign {
        if llr.abs() <= tol {
            Sign::Tie
        } else if llr > 0.0 {
            Sign::ZeroBit
        } else {
            Sign::OneBit
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sign::ZeroBit => "zero-bit",
            Sign::OneBit => "one-bit",
            Sign::Tie => "tie",
        };
        f.write_str(s)
    }
}

/// Check-node update over the incoming messages, clamped.
///
/// Shared verbatim by the graph decoder and the tree evaluator; operand order
/// must be identical in both callers. The sign is tracked outside the product
/// because `atanh` in libm is not bitwise odd; this keeps the update an exact
/// odd function of the product of the incoming tanh factors.
#[inline]
pub fn check_update(incoming: impl Iterator<Item = f64>) -> f64 {
    let mut sign = 1.0;
    let mut mag = 1.0;
    for m in incoming {
        let t = (m / 2.0).tanh();
        if t < 0.0 {
            sign = -sign;
        }
        mag *= t.abs();
    }
    clamp_llr(sign * (2.0 * mag.atanh()))
}

/// Per-edge, per-iteration message values of one decoding run.
#[derive(Clone, Debug)]
pub struct MessageTrace {
    iterations: usize,
    edges: Vec<(usize, usize)>,
    edge_idx: HashMap<(usize, usize), usize>,
    /// `v2c[l][edge]` for l in 0..=iterations.
    v2c: Vec<Vec<f64>>,
    /// `c2v[l - 1][edge]` for l in 1..=iterations.
    c2v: Vec<Vec<f64>>,
    /// `marginals[l - 1][var]` for l in 1..=iterations.
    marginals: Vec<Vec<f64>>,
}

impl MessageTrace {
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn v2c(&self, l: usize, e: DirectedEdge) -> Result<f64> {
        let idx = self.index(e)?;
        self.v2c
            .get(l)
            .map(|row| row[idx])
            .ok_or_else(|| Error::InvalidParameter(format!("iteration {l} beyond trace")))
    }

    pub fn c2v(&self, l: usize, e: DirectedEdge) -> Result<f64> {
        let idx = self.index(e)?;
        if l == 0 {
            return Err(Error::InvalidParameter("c2v messages start at iteration 1".into()));
        }
        self.c2v
            .get(l - 1)
            .map(|row| row[idx])
            .ok_or_else(|| Error::InvalidParameter(format!("iteration {l} beyond trace")))
    }

    pub fn marginal(&self, l: usize, var: usize) -> Result<f64> {
        if l == 0 || l > self.iterations {
            return Err(Error::InvalidParameter(format!("iteration {l} beyond trace")));
        }
        Ok(self.marginals[l - 1][var])
    }

    fn index(&self, e: DirectedEdge) -> Result<usize> {
        self.edge_idx
            .get(&(e.var, e.check))
            .copied()
            .ok_or(Error::EdgeNotInGraph { var: e.var, check: e.check })
    }

    /// CSV rows: iteration, var, check, direction, value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,var,check,direction,value\n");
        for (l, row) in self.v2c.iter().enumerate() {
            for (i, &(v, c)) in self.edges.iter().enumerate() {
                out.push_str(&format!("{l},{v},{c},v2c,{}\n", row[i]));
            }
        }
        for (l0, row) in self.c2v.iter().enumerate() {
            for (i, &(v, c)) in self.edges.iter().enumerate() {
                out.push_str(&format!("{},{v},{c},c2v,{}\n", l0 + 1, row[i]));
            }
        }
        out
    }
}

/// Flooding-schedule sum-product decoding for `iterations` rounds.
pub fn run_bp(g: &TannerGraph, channel_llrs: &[f64], iterations: usize) -> Result<MessageTrace> {
    if channel_llrs.len() != g.n_vars() {
        return Err(Error::LengthMismatch { expected: g.n_vars(), got: channel_llrs.len() });
    }
    if iterations == 0 {
        return Err(Error::InvalidParameter("iteration count must be >= 1".into()));
    }
    let edges = g.edges().to_vec();
    let edge_idx: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let ne = edges.len();

    let mut v2c: Vec<Vec<f64>> = Vec::with_capacity(iterations + 1);
    let mut c2v: Vec<Vec<f64>> = Vec::with_capacity(iterations);
    let mut marginals: Vec<Vec<f64>> = Vec::with_capacity(iterations);

    let init: Vec<f64> = edges.iter().map(|&(v, _)| channel_llrs[v]).collect();
    v2c.push(init);

    for l in 1..=iterations {
        let prev = &v2c[l - 1];
        let mut c2v_l = vec![0.0; ne];
        for (i, &(v, c)) in edges.iter().enumerate() {
            c2v_l[i] = check_update(
                g.check_vars(c)
                    .iter()
                    .filter(|&&v2| v2 != v)
                    .map(|&v2| prev[edge_idx[&(v2, c)]]),
            );
        }
        let mut v2c_l = vec![0.0; ne];
        for (i, &(v, c)) in edges.iter().enumerate() {
            let mut s = channel_llrs[v];
            for &c2 in g.var_checks(v) {
                if c2 != c {
                    s += c2v_l[edge_idx[&(v, c2)]];
                }
            }
            v2c_l[i] = s;
        }
        let mut marg = vec![0.0; g.n_vars()];
        for (v, m) in marg.iter_mut().enumerate() {
            let mut s = channel_llrs[v];
            for &c in g.var_checks(v) {
                s += c2v_l[edge_idx[&(v, c)]];
            }
            *m = s;
        }
        c2v.push(c2v_l);
        v2c.push(v2c_l);
        marginals.push(marg);
    }
    Ok(MessageTrace { iterations, edges, edge_idx, v2c, c2v, marginals })
}

/// Three-way sign of the variable-to-check message on `e` at iteration `l`.
pub fn message_sign(trace: &MessageTrace, e: DirectedEdge, l: usize) -> Result<Sign> {
    Ok(Sign::of(trace.v2c(l, e)?))
}

/// Single upward sweep over a standalone computation tree; returns the
/// message the root variable sends toward the excluded root check.
///
/// `llrs` maps original variable indices to their channel LLRs. Equals the
/// graph decoder's `v2c[depth / 2]` on the root edge bit-exactly whenever the
/// neighborhood is tree-like.
pub fn run_bp_on_tree(t: &ComputationTree, llrs: &HashMap<usize, f64>) -> Result<f64> {
    fn upward(t: &ComputationTree, llrs: &HashMap<usize, f64>, node: usize) -> Result<f64> {
        let n = &t.nodes[node];
        match n.kind {
            NodeKind::Variable => {
                let mut s = *llrs.get(&n.origin).ok_or(Error::MissingLlr { var: n.origin })?;
                for &child in &n.children {
                    s += upward(t, llrs, child)?;
                }
                Ok(s)
            }
            NodeKind::Check => {
                let incoming: Vec<f64> = n
                    .children
                    .iter()
                    .map(|&child| upward(t, llrs, child))
                    .collect::<Result<_>>()?;
                Ok(check_update(incoming.into_iter()))
            }
        }
    }
    upward(t, llrs, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::tanner::unroll;
    use proptest::prelude::*;

    fn graph(rows: Vec<u64>, cols: usize) -> TannerGraph {
        TannerGraph::from_matrix(&BitMatrix::from_rows(cols, rows))
    }

    #[test]
    fn all_zero_inputs_stay_zero() {
        let g = graph(vec![0b0111, 0b1101], 4);
        let trace = run_bp(&g, &[0.0; 4], 3).unwrap();
        for l in 1..=3 {
            for &(v, c) in g.edges() {
                let e = DirectedEdge::new(v, c);
                assert_eq!(trace.v2c(l, e).unwrap(), 0.0);
                assert_eq!(trace.c2v(l, e).unwrap(), 0.0);
                assert_eq!(message_sign(&trace, e, l).unwrap(), Sign::Tie);
            }
        }
    }

    #[test]
    fn isolated_variable_keeps_channel_llr() {
        let g = graph(vec![0b011], 3); // variable 2 touches no check
        let trace = run_bp(&g, &[1.0, -2.0, 0.7], 4).unwrap();
        for l in 1..=4 {
            assert_eq!(trace.marginal(l, 2).unwrap(), 0.7);
        }
    }

    #[test]
    fn single_factor_check_passes_tanh_rule() {
        let g = graph(vec![0b11], 2);
        let llrs = [1.5, -0.9];
        let trace = run_bp(&g, &llrs, 1).unwrap();
        let expected = -(2.0 * ((-0.9f64 / 2.0).tanh().abs()).atanh());
        assert_eq!(trace.c2v(1, DirectedEdge::new(0, 0)).unwrap(), expected);
    }

    #[test]
    fn llr_length_mismatch_is_rejected() {
        let g = graph(vec![0b11], 2);
        assert!(run_bp(&g, &[0.0; 3], 1).is_err());
    }

    #[test]
    fn negating_inputs_negates_every_message() {
        // even-weight checks only: a c2v message over an even number of
        // incoming factors is invariant, not odd, under global negation
        use rand::{Rng, SeedableRng};
        let g = graph(vec![0b001111, 0b111100, 0b110011], 6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let llrs: Vec<f64> = (0..6).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let neg: Vec<f64> = llrs.iter().map(|x| -x).collect();
            let a = run_bp(&g, &llrs, 3).unwrap();
            let b = run_bp(&g, &neg, 3).unwrap();
            for l in 1..=3 {
                for &(v, c) in g.edges() {
                    let e = DirectedEdge::new(v, c);
                    assert_eq!(a.v2c(l, e).unwrap().to_bits(), (-b.v2c(l, e).unwrap()).to_bits());
                }
            }
        }
    }

    #[test]
    fn locality_of_messages() {
        // perturbing a variable outside the depth-2 neighborhood leaves the
        // iteration-1 message untouched, bit for bit
        let code = crate::counterexamples::build_section2_code();
        let g = TannerGraph::from_matrix(&code.h);
        let t = unroll(&g, code.edge, 2).unwrap();
        let inside: std::collections::HashSet<usize> =
            crate::tanner::variable_index_set(&t).into_iter().collect();
        let base_llrs: Vec<f64> = (0..g.n_vars()).map(|v| 0.3 * v as f64 - 2.0).collect();
        let base = run_bp(&g, &base_llrs, 1).unwrap().v2c(1, code.edge).unwrap();
        for v in 0..g.n_vars() {
            if inside.contains(&v) {
                continue;
            }
            let mut llrs = base_llrs.clone();
            llrs[v] += 5.0;
            let msg = run_bp(&g, &llrs, 1).unwrap().v2c(1, code.edge).unwrap();
            assert_eq!(msg.to_bits(), base.to_bits());
        }
    }

    #[test]
    fn tree_with_zero_leaves_returns_root_llr() {
        let code = crate::counterexamples::build_section2_code();
        let g = TannerGraph::from_matrix(&code.h);
        let t = unroll(&g, code.edge, 2).unwrap();
        let mut llrs: HashMap<usize, f64> =
            crate::tanner::variable_index_set(&t).into_iter().map(|v| (v, 0.0)).collect();
        llrs.insert(code.edge.var, 1.25);
        assert_eq!(run_bp_on_tree(&t, &llrs).unwrap(), 1.25);
    }

    #[test]
    fn section2_tree_closed_form() {
        // all leaves at +a: root message = a + 2 * (2 atanh(tanh(a/2)^5))
        let code = crate::counterexamples::build_section2_code();
        let g = TannerGraph::from_matrix(&code.h);
        let t = unroll(&g, code.edge, 2).unwrap();
        let a = 1.3;
        let llrs: HashMap<usize, f64> =
            crate::tanner::variable_index_set(&t).into_iter().map(|v| (v, a)).collect();
        let got = run_bp_on_tree(&t, &llrs).unwrap();
        let expected = a + 2.0 * (2.0 * ((a / 2.0f64).tanh().powi(5)).atanh());
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn tree_missing_llr_is_an_error() {
        let code = crate::counterexamples::build_section3_code();
        let g = TannerGraph::from_matrix(&code.h);
        let t = unroll(&g, code.edge, 2).unwrap();
        let llrs = HashMap::from([(code.edge.var, 0.5)]);
        assert!(matches!(run_bp_on_tree(&t, &llrs), Err(Error::MissingLlr { .. })));
    }

    #[test]
    fn tree_matches_graph_message_bit_exactly() {
        use rand::{Rng, SeedableRng};
        for code in [
            crate::counterexamples::build_section2_code(),
            crate::counterexamples::build_section3_code(),
        ] {
            let g = TannerGraph::from_matrix(&code.h);
            let t = unroll(&g, code.edge, 2).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
            for _ in 0..200 {
                let llrs: Vec<f64> =
                    (0..g.n_vars()).map(|_| rng.gen_range(-6.0..6.0)).collect();
                let graph_msg = run_bp(&g, &llrs, 1).unwrap().v2c(1, code.edge).unwrap();
                let map: HashMap<usize, f64> = llrs.iter().copied().enumerate().collect();
                let tree_msg = run_bp_on_tree(&t, &map).unwrap();
                assert_eq!(graph_msg.to_bits(), tree_msg.to_bits());
            }
        }
    }

    #[test]
    fn csv_export_has_all_edges() {
        let g = graph(vec![0b111], 3);
        let trace = run_bp(&g, &[0.5, -0.5, 1.0], 2).unwrap();
        let csv = trace.to_csv();
        // 3 edges * (3 v2c iterations incl. 0 + 2 c2v iterations) + header
        assert_eq!(csv.lines().count(), 1 + 3 * 3 + 3 * 2);
    }

    proptest! {
        #[test]
        fn check_update_is_odd(ms in proptest::collection::vec(-10.0f64..10.0, 1..5)) {
            let a = check_update(ms.iter().copied());
            let b = check_update(ms.iter().map(|x| -x));
            if ms.len() % 2 == 1 {
                prop_assert_eq!(a.to_bits(), (-b).to_bits());
            } else {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn messages_stay_finite(llrs in proptest::collection::vec(-50.0f64..50.0, 6)) {
            let g = graph(vec![0b001110, 0b110010, 0b101101], 6);
            let trace = run_bp(&g, &llrs, 4).unwrap();
            for l in 1..=4 {
                for &(v, c) in g.edges() {
                    prop_assert!(trace.v2c(l, DirectedEdge::new(v, c)).unwrap().is_finite());
                }
            }
        }
    }
}
