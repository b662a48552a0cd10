//! Verification experiments for the corrected monotonicity proof chain:
//! embedded/standalone-tree equivalence, codeword independence under channel
//! symmetry, and error-rate monotonicity under physical degradation, by
//! exact expectation where the observation space is enumerable and by
//! Monte Carlo otherwise.
//!
//! An "incorrect message" is a variable-to-check message whose sign disagrees
//! with the transmitted bit at the edge's variable node; an exact-zero
//! message counts as half an error, so BSC(1/2) yields exactly 1/2.

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::bp::{run_bp, run_bp_on_tree, Sign};
use crate::channels::{ChannelModel, Observation};
use crate::counterexamples::{
    build_section2_code, build_section3_code, find_witness, SearchMode,
};
use crate::error::{Error, Result};
use crate::gf2::{enumerate_codewords, project_word};
use crate::tanner::{unroll, variable_index_set, DirectedEdge, TannerGraph};

/// Largest index-set size for which exact pattern enumeration is attempted.
pub const EXACT_PATTERN_BOUND: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// A message-error probability, exact or estimated.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorEstimate {
    pub p_hat: f64,
    pub trials: u64,
    /// Normal-approximation 3-sigma half width; zero in exact mode.
    pub ci_half_width: f64,
    pub mode: EstimateMode,
}

impl ErrorEstimate {
    /// Combine two Monte Carlo estimates; the pooled mean is the
    /// trial-weighted average.
    pub fn pool(&self, other: &ErrorEstimate) -> ErrorEstimate {
        let trials = self.trials + other.trials;
        let p_hat =
            (self.p_hat * self.trials as f64 + other.p_hat * other.trials as f64) / trials as f64;
        ErrorEstimate {
            p_hat,
            trials,
            ci_half_width: 3.0 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            mode: EstimateMode::MonteCarlo,
        }
    }
}

fn error_weight(message: f64, transmitted_bit: u8) -> f64 {
    match (Sign::of(message), transmitted_bit) {
        (Sign::Tie, _) => 0.5,
        (Sign::OneBit, 0) | (Sign::ZeroBit, 1) => 1.0,
        _ => 0.0,
    }
}

/// Mixed-radix scan over per-symbol outcome lists; calls `f` with the
/// current choice indices. Root digit (position 0) is most significant.
fn for_each_pattern(radix: usize, width: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; width];
    loop {
        f(&digits);
        let mut j = width;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < radix {
                break;
            }
            digits[j] = 0;
        }
    }
}

/// Exact expected fraction of incorrect messages on `e` at iteration `l`,
/// all-zero codeword, by enumerating every channel-output pattern on the
/// neighborhood index set.
pub fn message_error_exact(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    ch: &ChannelModel,
) -> Result<ErrorEstimate> {
    let t = unroll(g, e, 2 * l)?;
    if !t.is_tree_like {
        return Err(Error::NotTreeLike);
    }
    let index_set = variable_index_set(&t);
    if index_set.len() > EXACT_PATTERN_BOUND {
        return Err(Error::DimensionTooLarge { dim: index_set.len(), bound: EXACT_PATTERN_BOUND });
    }
    let outputs = ch.finite_outputs().ok_or(Error::ContinuousChannel)?;
    // outcomes impossible under the all-zero word contribute nothing
    let outputs: Vec<(Observation, f64)> =
        outputs.into_iter().filter(|&(_, p0, _)| p0 > 0.0).map(|(o, p0, _)| (o, p0)).collect();
    let llrs_per_output: Vec<f64> =
        outputs.iter().map(|&(o, _)| ch.llr(o)).collect::<Result<_>>()?;

    let mut total = 0.0;
    let mut err = Ok(());
    for_each_pattern(outputs.len(), index_set.len(), |digits| {
        if err.is_err() {
            return;
        }
        let mut prob = 1.0;
        let mut llrs = vec![0.0; g.n_vars()];
        for (j, &d) in digits.iter().enumerate() {
            prob *= outputs[d].1;
            llrs[index_set[j]] = llrs_per_output[d];
        }
        match run_bp(g, &llrs, l).and_then(|tr| tr.v2c(l, e)) {
            Ok(msg) => total += prob * error_weight(msg, 0),
            Err(e) => err = Err(e),
        }
    });
    err?;
    Ok(ErrorEstimate { p_hat: total, trials: 0, ci_half_width: 0.0, mode: EstimateMode::Exact })
}

/// Monte Carlo estimate of the same quantity: i.i.d. all-zero-codeword
/// channel realizations, deterministic given the seed.
pub fn message_error_mc(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    ch: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    let mut llrs = vec![0.0; g.n_vars()];
    for _ in 0..trials {
        for slot in llrs.iter_mut() {
            *slot = ch.llr(ch.sample(0, &mut rng))?;
        }
        let msg = run_bp(g, &llrs, l)?.v2c(l, e)?;
        total += error_weight(msg, 0);
    }
    let p_hat = total / trials as f64;
    Ok(ErrorEstimate {
        p_hat,
        trials,
        ci_half_width: 3.0 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        mode: EstimateMode::MonteCarlo,
    })
}

/// Pass the observation through the auxiliary stage that realizes
/// `ch.degrade(q)` as a physical composition.
fn degrade_observation(
    ch: &ChannelModel,
    q: f64,
    y: Observation,
    rng: &mut ChaCha8Rng,
) -> Observation {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};
    match (ch, y) {
        (ChannelModel::Bsc(_), Observation::Bit(b)) => Observation::Bit(b ^ rng.gen_bool(q) as u8),
        (ChannelModel::Bec(_), Observation::Bit(b)) => {
            if rng.gen_bool(q) {
                Observation::Erased
            } else {
                Observation::Bit(b)
            }
        }
        (ChannelModel::Bec(_), Observation::Erased) => Observation::Erased,
        (ChannelModel::BiAwgn(_), Observation::Real(v)) => {
            let noise: f64 = StandardNormal.sample(rng);
            Observation::Real(v + q * noise)
        }
        _ => y,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub base: ErrorEstimate,
    pub degraded: ErrorEstimate,
    /// `degraded.p_hat - base.p_hat`.
    pub margin: f64,
    pub pass: bool,
}

/// Compare message-error rates on channel `w` and its degradation by `q`.
///
/// Exact expectation when the channel has finite outputs and the index set
/// is small enough; otherwise coupled Monte Carlo, where the degraded
/// observation is the base observation passed through the auxiliary stage.
pub fn check_monotonicity(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    w: &ChannelModel,
    q: f64,
    mc: Option<(u64, u64)>,
) -> Result<MonotonicityReport> {
    let w_prime = w.degrade(q)?;
    let t = unroll(g, e, 2 * l)?;
    let index_set = variable_index_set(&t);
    let exact_possible = t.is_tree_like
        && index_set.len() <= EXACT_PATTERN_BOUND
        && w.finite_outputs().is_some()
        && mc.is_none();

    if exact_possible {
        let base = message_error_exact(g, e, l, w)?;
        let degraded = message_error_exact(g, e, l, &w_prime)?;
        let margin = degraded.p_hat - base.p_hat;
        return Ok(MonotonicityReport { base, degraded, margin, pass: base.p_hat <= degraded.p_hat });
    }

    let (trials, seed) =
        mc.ok_or_else(|| Error::Config("exact mode impossible and no trial budget given".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base_total = 0.0;
    let mut deg_total = 0.0;
    let mut llrs = vec![0.0; g.n_vars()];
    let mut llrs_deg = vec![0.0; g.n_vars()];
    for _ in 0..trials {
        for v in 0..g.n_vars() {
            let y = w.sample(0, &mut rng);
            let y_deg = degrade_observation(w, q, y, &mut rng);
            llrs[v] = w.llr(y)?;
            llrs_deg[v] = w_prime.llr(y_deg)?;
        }
        base_total += error_weight(run_bp(g, &llrs, l)?.v2c(l, e)?, 0);
        deg_total += error_weight(run_bp(g, &llrs_deg, l)?.v2c(l, e)?, 0);
    }
    let to_est = |total: f64| {
        let p_hat = total / trials as f64;
        ErrorEstimate {
            p_hat,
            trials,
            ci_half_width: 3.0 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            mode: EstimateMode::MonteCarlo,
        }
    };
    let base = to_est(base_total);
    let degraded = to_est(deg_total);
    let combined = (base.ci_half_width.powi(2) + degraded.ci_half_width.powi(2)).sqrt();
    Ok(MonotonicityReport {
        base,
        degraded,
        margin: degraded.p_hat - base.p_hat,
        pass: base.p_hat <= degraded.p_hat + combined,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub channel_param: f64,
    pub degraded_param: f64,
    pub p_base: f64,
    pub p_degraded: f64,
}

/// Exact base/degraded error-rate columns over a BSC parameter sweep.
pub fn monotonicity_sweep(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    params: &[f64],
    q: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(params.len());
    for &p in params {
        let w = ChannelModel::bsc(p)?;
        let ChannelModel::Bsc(p_deg) = w.degrade(q)? else { unreachable!() };
        rows.push(SweepRow {
            channel_param: p,
            degraded_param: p_deg,
            p_base: message_error_exact(g, e, l, &w)?.p_hat,
            p_degraded: message_error_exact(g, e, l, &w.degrade(q)?)?.p_hat,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub matches: u64,
    pub total: u64,
}

/// Run full-graph BP and standalone-tree BP on identical realizations and
/// count bit-exact agreements of the edge message at iteration `l`.
pub fn embedded_vs_tree_equivalence(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    ch: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let t = unroll(g, e, 2 * l)?;
    if !t.is_tree_like {
        return Err(Error::NotTreeLike);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0u64;
    let mut llrs = vec![0.0; g.n_vars()];
    for _ in 0..trials {
        for slot in llrs.iter_mut() {
            *slot = ch.llr(ch.sample(0, &mut rng))?;
        }
        let graph_msg = run_bp(g, &llrs, l)?.v2c(l, e)?;
        let map: HashMap<usize, f64> = llrs.iter().copied().enumerate().collect();
        let tree_msg = run_bp_on_tree(&t, &map)?;
        if graph_msg.to_bits() == tree_msg.to_bits() {
            matches += 1;
        }
    }
    Ok(EquivalenceReport { matches, total: trials })
}

/// One output symbol of a binary-input test law: its decoder LLR and its
/// probability under each input bit. Lets tests inject an asymmetric law.
#[derive(Clone, Copy, Debug)]
pub struct LawOutput {
    pub llr: f64,
    pub p_given_0: f64,
    pub p_given_1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodewordIndependenceReport {
    /// Per projected-word class: (projected word, conditional error
    /// probability, number of codewords in the class).
    pub classes: Vec<(u64, f64, u64)>,
    pub codewords: u64,
    pub max_pairwise_diff: f64,
}

/// Exact conditional message-error probability for every codeword of the
/// full code, grouped by the projection onto the neighborhood index set
/// (the message and its error depend on nothing else).
pub fn codeword_independence(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    h: &crate::gf2::BitMatrix,
    ch: &ChannelModel,
) -> Result<CodewordIndependenceReport> {
    let ChannelModel::Bsc(p) = *ch else {
        return Err(Error::InvalidParameter("codeword independence check expects a BSC".into()));
    };
    let a = ch.llr(Observation::Bit(0))?;
    let law = [
        LawOutput { llr: a, p_given_0: 1.0 - p, p_given_1: p },
        LawOutput { llr: -a, p_given_0: p, p_given_1: 1.0 - p },
    ];
    codeword_independence_with_law(g, e, l, h, &law)
}

/// Generic version over an explicit finite output law.
pub fn codeword_independence_with_law(
    g: &TannerGraph,
    e: DirectedEdge,
    l: usize,
    h: &crate::gf2::BitMatrix,
    law: &[LawOutput],
) -> Result<CodewordIndependenceReport> {
    let t = unroll(g, e, 2 * l)?;
    if !t.is_tree_like {
        return Err(Error::NotTreeLike);
    }
    let index_set = variable_index_set(&t);
    if index_set.len() > EXACT_PATTERN_BOUND {
        return Err(Error::DimensionTooLarge { dim: index_set.len(), bound: EXACT_PATTERN_BOUND });
    }
    let code = enumerate_codewords(h)?;

    // message sign per pattern, independent of the transmitted word
    let mut signs: Vec<Sign> = Vec::new();
    let mut bp_err = Ok(());
    for_each_pattern(law.len(), index_set.len(), |digits| {
        if bp_err.is_err() {
            return;
        }
        let mut llrs = vec![0.0; g.n_vars()];
        for (j, &d) in digits.iter().enumerate() {
            llrs[index_set[j]] = law[d].llr;
        }
        match run_bp(g, &llrs, l).and_then(|tr| tr.v2c(l, e)) {
            Ok(msg) => signs.push(Sign::of(msg)),
            Err(e) => bp_err = Err(e),
        }
    });
    bp_err?;

    // group codewords by their projection; error probability is a function
    // of the projected word alone
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &w in code.words() {
        *counts.entry(project_word(w, &index_set)).or_insert(0) += 1;
    }
    let mut classes: Vec<(u64, f64, u64)> = Vec::with_capacity(counts.len());
    for (&x_i, &count) in &counts {
        let v_bit = (x_i & 1) as u8; // index 0 of the set is the root variable
        let mut p_err = 0.0;
        let mut pattern_idx = 0usize;
        for_each_pattern(law.len(), index_set.len(), |digits| {
            let mut prob = 1.0;
            for (j, &d) in digits.iter().enumerate() {
                let bit = ((x_i >> j) & 1) as u8;
                prob *= if bit == 0 { law[d].p_given_0 } else { law[d].p_given_1 };
            }
            let weight = match (signs[pattern_idx], v_bit) {
                (Sign::Tie, _) => 0.5,
                (Sign::OneBit, 0) | (Sign::ZeroBit, 1) => 1.0,
                _ => 0.0,
            };
            p_err += prob * weight;
            pattern_idx += 1;
        });
        classes.push((x_i, p_err, count));
    }
    classes.sort_by_key(|&(x_i, _, _)| x_i);
    let min = classes.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let max = classes.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(CodewordIndependenceReport {
        classes,
        codewords: code.len() as u64,
        max_pairwise_diff: max - min,
    })
}

/// Suite configuration; the defaults mirror the demos' standing parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Channel for the witness searches.
    pub witness_channel: ChannelModel,
    /// Finite-output channel for the exact independence and monotonicity runs.
    pub exact_channel: ChannelModel,
    /// Auxiliary degradation parameter for the monotonicity check.
    pub degrade_q: f64,
    /// Channel for the embedded/standalone equivalence runs.
    pub equivalence_channel: ChannelModel,
    pub trials: u64,
    pub seed: u64,
    pub iterations: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            witness_channel: ChannelModel::Bsc(0.1),
            exact_channel: ChannelModel::Bsc(0.05),
            // chosen so BSC(0.05) degrades to BSC(0.08)
            degrade_q: 0.03 / 0.90,
            equivalence_channel: ChannelModel::BiAwgn(0.8),
            trials: 10_000,
            seed: 7,
            iterations: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub checks: Vec<CheckOutcome>,
    pub all_passed: bool,
}

fn outcome(name: &str, run: impl FnOnce() -> Result<(bool, serde_json::Value)>) -> CheckOutcome {
    match run() {
        Ok((passed, details)) => CheckOutcome { name: name.into(), passed, details },
        Err(e) => {
            CheckOutcome { name: name.into(), passed: false, details: json!({"error": e.to_string()}) }
        }
    }
}

/// Run every demo and proof-chain check; sub-failures are recorded and the
/// suite continues.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteSummary {
    let codes = [build_section2_code(), build_section3_code()];
    let mut checks = Vec::new();

    for code in &codes {
        checks.push(outcome(&format!("{}-construction", code.name), || {
            code.certify()?;
            Ok((true, json!({"n": code.h.cols(), "checks": code.h.rows()})))
        }));
    }

    checks.push(outcome("section3-witness", || {
        let code = &codes[1];
        let w = find_witness(code, &cfg.witness_channel, SearchMode::Exhaustive)?;
        let found = w.is_some();
        Ok((found, serde_json::to_value(&w)?))
    }));

    checks.push(outcome("section2-witness-scan", || {
        // either outcome is informative; the scan itself must complete
        let code = &codes[0];
        let w = find_witness(code, &cfg.witness_channel, SearchMode::Exhaustive)?;
        Ok((true, json!({"witness_found": w.is_some()})))
    }));

    for code in &codes {
        checks.push(outcome(&format!("{}-embedded-tree-equivalence", code.name), || {
            let g = code.graph();
            let rep = embedded_vs_tree_equivalence(
                &g,
                code.edge,
                cfg.iterations,
                &cfg.equivalence_channel,
                cfg.trials,
                cfg.seed,
            )?;
            Ok((rep.matches == rep.total, serde_json::to_value(&rep)?))
        }));
    }

    checks.push(outcome("section3-codeword-independence", || {
        let code = &codes[1];
        let g = code.graph();
        let rep = codeword_independence(&g, code.edge, cfg.iterations, &code.h, &cfg.exact_channel)?;
        Ok((rep.max_pairwise_diff <= 1e-12, serde_json::to_value(&rep)?))
    }));

    for code in &codes {
        checks.push(outcome(&format!("{}-monotonicity", code.name), || {
            let g = code.graph();
            let rep =
                check_monotonicity(&g, code.edge, cfg.iterations, &cfg.exact_channel, cfg.degrade_q, None)?;
            Ok((rep.pass, serde_json::to_value(&rep)?))
        }));
    }

    let all_passed = checks.iter().all(|c| c.passed);
    SuiteSummary { config: cfg.clone(), checks, all_passed }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("channel_param,degraded_param,p_base,p_degraded\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.channel_param, r.degraded_param, r.p_base, r.p_degraded
        ));
    }
    out
}

/// Write `summary.json` and per-code `table_monotonicity_*.csv` to `dir`.
pub fn write_suite_outputs(summary: &SuiteSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    let params: Vec<f64> = (1..=10).map(|i| i as f64 / 100.0).collect();
    for code in [build_section2_code(), build_section3_code()] {
        let g = code.graph();
        let rows = monotonicity_sweep(&g, code.edge, 1, &params, 0.02)?;
        std::fs::write(dir.join(format!("table_monotonicity_{}.csv", code.name)), sweep_csv(&rows))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::CounterexampleCode;

    fn section3() -> (CounterexampleCode, TannerGraph) {
        let code = build_section3_code();
        let g = code.graph();
        (code, g)
    }

    #[test]
    fn noiseless_channel_has_no_errors() {
        let (code, g) = section3();
        let ch = ChannelModel::bsc(0.0).unwrap();
        let est = message_error_exact(&g, code.edge, 1, &ch).unwrap();
        assert_eq!(est.p_hat, 0.0);
        let mc = message_error_mc(&g, code.edge, 1, &ch, 1000, 3).unwrap();
        assert_eq!(mc.p_hat, 0.0);
    }

    #[test]
    fn uninformative_channel_is_half() {
        // every LLR is exactly 0, every message ties, each tie counts 1/2
        let (code, g) = section3();
        let ch = ChannelModel::bsc(0.5).unwrap();
        let est = message_error_exact(&g, code.edge, 1, &ch).unwrap();
        assert_eq!(est.p_hat, 0.5);
    }

    #[test]
    fn section3_exact_error_matches_frozen_oracle() {
        // value frozen from an independent brute-force enumeration of the
        // 512 patterns before this module was written
        let (code, g) = section3();
        let ch = ChannelModel::bsc(0.05).unwrap();
        let est = message_error_exact(&g, code.edge, 1, &ch).unwrap();
        assert!((est.p_hat - 0.043805122249999905).abs() < 1e-12, "got {}", est.p_hat);
    }

    #[test]
    fn mc_agrees_with_exact_within_band() {
        let (code, g) = section3();
        let ch = ChannelModel::bsc(0.05).unwrap();
        let exact = message_error_exact(&g, code.edge, 1, &ch).unwrap();
        let mc = message_error_mc(&g, code.edge, 1, &ch, 100_000, 11).unwrap();
        assert!((mc.p_hat - exact.p_hat).abs() <= mc.ci_half_width);
    }

    #[test]
    fn pooling_is_the_weighted_average() {
        let a = ErrorEstimate {
            p_hat: 0.04,
            trials: 1000,
            ci_half_width: 0.01,
            mode: EstimateMode::MonteCarlo,
        };
        let b = ErrorEstimate {
            p_hat: 0.05,
            trials: 3000,
            ci_half_width: 0.01,
            mode: EstimateMode::MonteCarlo,
        };
        let pooled = a.pool(&b);
        assert_eq!(pooled.trials, 4000);
        assert!((pooled.p_hat - (0.04 * 1000.0 + 0.05 * 3000.0) / 4000.0).abs() < 1e-15);
    }

    #[test]
    fn identity_degradation_changes_nothing() {
        let (code, g) = section3();
        let w = ChannelModel::bsc(0.05).unwrap();
        let rep = check_monotonicity(&g, code.edge, 1, &w, 0.0, None).unwrap();
        assert_eq!(rep.base.p_hat, rep.degraded.p_hat);
        assert!(rep.pass);
    }

    #[test]
    fn exact_monotonicity_is_strict_on_both_codes() {
        let q = 0.03 / 0.90;
        for code in [build_section2_code(), build_section3_code()] {
            let g = code.graph();
            let w = ChannelModel::bsc(0.05).unwrap();
            let rep = check_monotonicity(&g, code.edge, 1, &w, q, None).unwrap();
            assert!(rep.pass);
            assert!(rep.margin > 0.0, "{}: margin {}", code.name, rep.margin);
        }
    }

    #[test]
    fn coupled_mc_monotonicity_on_awgn() {
        let (code, g) = section3();
        // sigma 0.8 degraded to sigma 1.0: q = sqrt(1 - 0.64)
        let w = ChannelModel::biawgn(0.8).unwrap();
        let q = (1.0f64 - 0.64).sqrt();
        let rep = check_monotonicity(&g, code.edge, 1, &w, q, Some((100_000, 5))).unwrap();
        assert!(rep.pass, "base {} degraded {}", rep.base.p_hat, rep.degraded.p_hat);
        let ChannelModel::BiAwgn(s) = w.degrade(q).unwrap() else { unreachable!() };
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equivalence_is_bit_exact() {
        let (code, g) = section3();
        let ch = ChannelModel::biawgn(0.8).unwrap();
        let rep = embedded_vs_tree_equivalence(&g, code.edge, 1, &ch, 2000, 13).unwrap();
        assert_eq!(rep.matches, rep.total);
    }

    #[test]
    fn all_zero_llrs_match_trivially() {
        let (code, g) = section3();
        let t = unroll(&g, code.edge, 2).unwrap();
        let llrs = vec![0.0; g.n_vars()];
        let graph_msg = run_bp(&g, &llrs, 1).unwrap().v2c(1, code.edge).unwrap();
        let map: HashMap<usize, f64> = llrs.iter().copied().enumerate().collect();
        assert_eq!(graph_msg, run_bp_on_tree(&t, &map).unwrap());
        assert_eq!(graph_msg, 0.0);
    }

    #[test]
    fn codeword_independence_holds_on_section3() {
        let (code, g) = section3();
        let ch = ChannelModel::bsc(0.05).unwrap();
        let rep = codeword_independence(&g, code.edge, 1, &code.h, &ch).unwrap();
        assert_eq!(rep.codewords, 1 << 19);
        assert!(rep.max_pairwise_diff <= 1e-12, "diff {}", rep.max_pairwise_diff);
    }

    #[test]
    fn single_codeword_code_is_trivially_independent() {
        // a degree-one check plus a chain pins everything to zero
        use crate::gf2::BitMatrix;
        let h = BitMatrix::from_rows(3, vec![0b011, 0b110, 0b001]);
        let g = TannerGraph::from_matrix(&h);
        let ch = ChannelModel::bsc(0.1).unwrap();
        let rep = codeword_independence(&g, DirectedEdge::new(0, 0), 1, &h, &ch).unwrap();
        assert_eq!(rep.codewords, 1);
        assert_eq!(rep.max_pairwise_diff, 0.0);
    }

    #[test]
    fn asymmetric_law_is_detected() {
        // validates the power of the test: a biased flip law breaks the
        // equality across codeword classes
        let (code, g) = section3();
        let a = ChannelModel::bsc(0.05).unwrap().llr(Observation::Bit(0)).unwrap();
        let law = [
            LawOutput { llr: a, p_given_0: 0.95, p_given_1: 0.20 },
            LawOutput { llr: -a, p_given_0: 0.05, p_given_1: 0.80 },
        ];
        let rep = codeword_independence_with_law(&g, code.edge, 1, &code.h, &law).unwrap();
        assert!(rep.max_pairwise_diff > 1e-6, "diff {}", rep.max_pairwise_diff);
    }

    #[test]
    fn sweep_columns_dominate_pointwise() {
        let (code, g) = section3();
        let params: Vec<f64> = (1..=10).map(|i| i as f64 / 100.0).collect();
        let rows = monotonicity_sweep(&g, code.edge, 1, &params, 0.02).unwrap();
        for win in rows.windows(2) {
            assert!(win[0].p_degraded <= win[1].p_degraded);
        }
        for r in &rows {
            assert!(r.p_base <= r.p_degraded);
        }
    }

    #[test]
    fn suite_runs_green_and_deterministically() {
        let cfg = SuiteConfig { trials: 500, ..SuiteConfig::default() };
        let a = run_suite(&cfg);
        assert!(a.all_passed, "{}", serde_json::to_string_pretty(&a).unwrap());
        let b = run_suite(&cfg);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let witness =
            a.checks.iter().find(|c| c.name == "section3-witness").unwrap();
        assert!(witness.passed);
        assert!(!witness.details.is_null());
    }
}
