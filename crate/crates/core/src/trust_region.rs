//! LSA-TR: trust-region minimization with local submodular approximations.
//!
//! At the current labeling `S_t` the supermodular pairs are replaced by
//! their first-order Taylor expansion, giving the submodular model
//! `E_t(S) = E_sub(S) + Sᵀ U_t + const` that agrees with `E` at `S_t`. The
//! trust region is enforced softly by minimizing
//! `L_t(S) = E_t(S) + λ_t·hamming(S, S_t)` exactly with a max-flow. The
//! candidate is accepted when the actual reduction `R = E(S_t) - E(S*)` is
//! large enough relative to the predicted reduction
//! `P = E_t(S_t) - E_t(S*)`, and `λ` shrinks or grows depending on the same
//! ratio.

use alloc::vec::Vec;

use crate::energy::{hamming_unaries, BinaryEnergy, Decomposition, Labeling, Pair};
use crate::error::{Error, Result};
use crate::maxflow::minimize_submodular;
use crate::trace::{Clock, NoClock, SolverTrace, Termination, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionParams {
    /// Initial Hamming multiplier `λ_0 > 0`.
    pub lambda0: f64,
    /// Factor `> 1` by which `λ` is divided after a good step and
    /// multiplied otherwise.
    pub lambda_mult: f64,
    /// Candidate accepted when `R/P` exceeds this (`τ1`).
    pub accept_ratio: f64,
    /// `λ` decreases when `R/P` exceeds this (`τ2`).
    pub expand_ratio: f64,
    pub max_iters: usize,
    /// Stop once a rejected step would push `λ` above this.
    pub lambda_max: f64,
}

impl Default for TrustRegionParams {
    fn default() -> Self {
        TrustRegionParams {
            lambda0: 1.0,
            lambda_mult: 2.0,
            accept_ratio: 0.0,
            expand_ratio: 0.25,
            max_iters: 1000,
            lambda_max: 1e6,
        }
    }
}

impl TrustRegionParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name, reason| if ok { Ok(()) } else { Err(Error::Parameter { name, reason }) };
        check(self.lambda0 > 0.0 && self.lambda0.is_finite(), "lambda0", "must be positive and finite")?;
        check(self.lambda_mult > 1.0 && self.lambda_mult.is_finite(), "lambda_mult", "must be greater than 1")?;
        check(self.accept_ratio <= self.expand_ratio, "accept_ratio", "must not exceed expand_ratio")?;
        check(self.lambda_max > self.lambda0, "lambda_max", "must exceed lambda0")?;
        check(self.max_iters > 0, "max_iters", "must be positive")
    }
}

/// First-order Taylor expansion of `Σ w·s_p·s_q` over `pairs` around `s_t`:
/// returns `(U, c)` with `U[p] += w·s_t[q]`, `U[q] += w·s_t[p]` and
/// `c = -Σ w·s_t[p]·s_t[q]`. The plane matches each product term at `s_t`
/// and at the two configurations that differ from it in one coordinate.
pub fn taylor_linearize(pairs: &[Pair], s_t: &Labeling) -> Result<(Vec<f64>, f64)> {
    let n = s_t.len();
    let mut u = alloc::vec![0.0; n];
    let mut c = 0.0;
    for pair in pairs {
        if pair.q >= n {
            return Err(Error::Dimension { expected: pair.q + 1, found: n });
        }
        let (xp, xq) = (s_t.value(pair.p), s_t.value(pair.q));
        u[pair.p] += pair.w * xq;
        u[pair.q] += pair.w * xp;
        c -= pair.w * xp * xq;
    }
    Ok((u, c))
}

/// Taylor linearization of the supermodular part of `dec` at `s_t`.
pub fn taylor_linearize_sup(dec: &Decomposition, s_t: &Labeling) -> Result<(Vec<f64>, f64)> {
    dec.sub.check_len(s_t.len())?;
    taylor_linearize(&dec.sup_pairs, s_t)
}

/// The local model `E_t(S) = E_sub(S) + Sᵀ U_t + const_t`.
pub fn build_approximation(dec: &Decomposition, unary_t: &[f64], const_t: f64) -> Result<BinaryEnergy> {
    dec.sub.check_len(unary_t.len())?;
    let unary = dec.sub.unary().iter().zip(unary_t).map(|(a, b)| a + b).collect();
    BinaryEnergy::new(unary, dec.sub.pairs().to_vec(), dec.sub.constant() + const_t)
}

/// The trust-region Lagrangian `L_t(S) = E_t(S) + λ·hamming(S, s_t)`.
/// Its pairwise terms are those of `dec.sub`, so it is submodular.
pub fn build_lagrangian(
    dec: &Decomposition,
    unary_t: &[f64],
    const_t: f64,
    s_t: &Labeling,
    lambda: f64,
) -> Result<BinaryEnergy> {
    dec.sub.check_len(unary_t.len())?;
    dec.sub.check_len(s_t.len())?;
    let (dist_unary, dist_const) = hamming_unaries(s_t, lambda)?;
    let unary = dec.sub.unary().iter().zip(unary_t).zip(&dist_unary).map(|((a, b), d)| a + b + d).collect();
    BinaryEnergy::new(unary, dec.sub.pairs().to_vec(), dec.sub.constant() + const_t + dist_const)
}

/// Runs LSA-TR from `init`.
pub fn lsa_tr_solve(e: &BinaryEnergy, params: &TrustRegionParams, init: &Labeling) -> Result<SolverTrace> {
    lsa_tr_solve_with_clock(e, params, init, &NoClock)
}

pub fn lsa_tr_solve_with_clock(
    e: &BinaryEnergy,
    params: &TrustRegionParams,
    init: &Labeling,
    clock: &dyn Clock,
) -> Result<SolverTrace> {
    trust_region_loop(e, &e.decompose(), params, init, clock)
}

/// Trust-region iterations where the pairs in `split.sup_pairs` are
/// linearized and `split.sub` is kept exactly. `split` must reconstruct `e`.
pub(crate) fn trust_region_loop(
    e: &BinaryEnergy,
    split: &Decomposition,
    params: &TrustRegionParams,
    init: &Labeling,
    clock: &dyn Clock,
) -> Result<SolverTrace> {
    params.validate()?;
    e.check_len(init.len())?;

    let mut current = init.clone();
    let mut energy = e.eval_unchecked(&current);
    let mut lambda = params.lambda0;
    let mut records = Vec::new();

    for iter in 0..params.max_iters {
        let (unary_t, const_t) = taylor_linearize(&split.sup_pairs, &current)?;
        let model = build_approximation(split, &unary_t, const_t)?;
        let lagrangian = build_lagrangian(split, &unary_t, const_t, &current, lambda)?;
        let (candidate, _) = minimize_submodular(&lagrangian)?;

        let predicted = model.eval_unchecked(&current) - model.eval_unchecked(&candidate);
        let candidate_energy = e.eval_unchecked(&candidate);
        let actual = energy - candidate_energy;

        // P ≤ 0 counts as a rejection with λ growth
        let ratio = if predicted > 0.0 { Some(actual / predicted) } else { None };
        let accepted = ratio.is_some_and(|r| r > params.accept_ratio);
        let expand = ratio.is_some_and(|r| r > params.expand_ratio);

        let null_step = candidate == current;
        if accepted {
            current = candidate;
            energy = candidate_energy;
        }
        records.push(TraceRecord { iter, lambda, energy, predicted, actual, accepted, wall_ms: clock.elapsed_ms() });

        let next_lambda = if expand { lambda / params.lambda_mult } else { lambda * params.lambda_mult };
        if !accepted && next_lambda > params.lambda_max {
            let termination = if null_step { Termination::Converged } else { Termination::LambdaLimit };
            return Ok(SolverTrace { records, labeling: current, energy, termination });
        }
        lambda = next_lambda;
    }
    Ok(SolverTrace { records, labeling: current, energy, termination: Termination::MaxIters })
}
