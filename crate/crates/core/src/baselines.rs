//! Reference and comparison solvers.

use alloc::vec;
use alloc::vec::Vec;

use crate::energy::{BinaryEnergy, Decomposition, Labeling};
use crate::error::{Error, Result};
use crate::maxflow::minimize_submodular;
use crate::trace::{Clock, NoClock, SolverTrace, Termination, TraceRecord};
use crate::trust_region::{trust_region_loop, TrustRegionParams};

/// Largest instance [`brute_force_min`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Exact minimum by enumeration; ties go to the lexicographically smallest
/// labeling (compared from variable 0).
///
/// Labelings are visited in lexicographic order while a running energy is
/// updated incrementally; a candidate is re-evaluated exactly with
/// [`BinaryEnergy::eval`] before it may replace the incumbent.
pub fn brute_force_min(e: &BinaryEnergy) -> Result<(Labeling, f64)> {
    let n = e.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: BRUTE_FORCE_LIMIT });
    }
    let neighbours = e.neighbours();
    let scale = e.constant().abs()
        + e.unary().iter().map(|u| u.abs()).sum::<f64>()
        + e.pairs().iter().map(|p| p.w.abs()).sum::<f64>();
    let slack = 1e-9 * (1.0 + scale);

    let mut s = Labeling::zeros(n);
    let mut running = e.constant();
    let mut best = s.clone();
    let mut best_value = running;
    for _ in 1..(1u64 << n) {
        // lexicographic successor: clear trailing ones from the back, set the next zero
        let mut p = n;
        while p > 0 && s.get(p - 1) {
            p -= 1;
            running -= flip_delta(e, &neighbours, &s, p);
            s.set(p, false);
        }
        let p = p - 1;
        running += flip_delta(e, &neighbours, &s, p);
        s.set(p, true);

        if running < best_value + slack {
            let exact = e.eval_unchecked(&s);
            if exact < best_value {
                best_value = exact;
                best = s.clone();
            }
        }
    }
    Ok((best, best_value))
}

/// Energy change from setting `p` to 1, all other variables as in `s`.
fn flip_delta(e: &BinaryEnergy, neighbours: &[Vec<(usize, f64)>], s: &Labeling, p: usize) -> f64 {
    e.unary()[p] + neighbours[p].iter().filter(|(q, _)| s.get(*q)).map(|(_, w)| w).sum::<f64>()
}

/// Drops every positive pairwise term.
pub fn truncate(e: &BinaryEnergy) -> BinaryEnergy {
    e.decompose().sub
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    pub labeling: Labeling,
    /// Energy of `labeling` under the original energy.
    pub energy: f64,
    /// Energy of `labeling` under the truncated energy (its minimum).
    pub model_energy: f64,
}

/// Minimizes the truncated energy exactly.
pub fn truncation_solve(e: &BinaryEnergy) -> Result<TruncationResult> {
    let (labeling, model_energy) = minimize_submodular(&truncate(e))?;
    let energy = e.eval_unchecked(&labeling);
    Ok(TruncationResult { labeling, energy, model_energy })
}

/// LSA-TR-L: trust region where every pairwise term, submodular or not, is
/// Taylor-linearized. The subproblem is unary plus Hamming.
pub fn lsa_tr_l_solve(e: &BinaryEnergy, params: &TrustRegionParams, init: &Labeling) -> Result<SolverTrace> {
    lsa_tr_l_solve_with_clock(e, params, init, &NoClock)
}

pub fn lsa_tr_l_solve_with_clock(
    e: &BinaryEnergy,
    params: &TrustRegionParams,
    init: &Labeling,
    clock: &dyn Clock,
) -> Result<SolverTrace> {
    let split = Decomposition {
        sub: BinaryEnergy::new(e.unary().to_vec(), Vec::new(), e.constant())?,
        sup_pairs: e.pairs().to_vec(),
    };
    trust_region_loop(e, &split, params, init, clock)
}

/// Gradient of the multilinear extension at `x`: `u_p + Σ_q w_pq·x_q`.
fn gradient(e: &BinaryEnergy, x: &[f64]) -> Vec<f64> {
    let mut g = e.unary().to_vec();
    for pair in e.pairs() {
        g[pair.p] += pair.w * x[pair.q];
        g[pair.q] += pair.w * x[pair.p];
    }
    g
}

/// One parallel ICM step: the integer minimizer of the Taylor
/// linearization at `s_t`. A zero coefficient keeps the current label.
pub fn parallel_icm_step(e: &BinaryEnergy, s_t: &Labeling) -> Result<Labeling> {
    e.check_len(s_t.len())?;
    let x: Vec<f64> = (0..s_t.len()).map(|p| s_t.value(p)).collect();
    let g = gradient(e, &x);
    Ok(Labeling::from_bools(
        g.iter()
            .zip(s_t.bits())
            .map(|(&gp, &cur)| {
                if gp < 0.0 {
                    true
                } else if gp > 0.0 {
                    false
                } else {
                    cur
                }
            })
            .collect(),
    ))
}

/// Iterates [`parallel_icm_step`] until a fixed point, a two-cycle, or
/// `max_iters`. Returns the lowest-energy labeling visited (the first one
/// among equals).
pub fn parallel_icm_solve(e: &BinaryEnergy, init: &Labeling, max_iters: usize) -> Result<SolverTrace> {
    parallel_icm_solve_with_clock(e, init, max_iters, &NoClock)
}

pub fn parallel_icm_solve_with_clock(
    e: &BinaryEnergy,
    init: &Labeling,
    max_iters: usize,
    clock: &dyn Clock,
) -> Result<SolverTrace> {
    e.check_len(init.len())?;
    let mut previous: Option<Labeling> = None;
    let mut current = init.clone();
    let mut energy = e.eval_unchecked(&current);
    let mut best = (current.clone(), energy);
    let mut records = Vec::new();

    for iter in 0..max_iters {
        let next = parallel_icm_step(e, &current)?;
        let next_energy = e.eval_unchecked(&next);
        let x: Vec<f64> = (0..current.len()).map(|p| current.value(p)).collect();
        let predicted = -gradient(e, &x).iter().enumerate().map(|(p, g)| g * (next.value(p) - x[p])).sum::<f64>();
        records.push(TraceRecord {
            iter,
            lambda: 0.0,
            energy: next_energy,
            predicted,
            actual: energy - next_energy,
            accepted: true,
            wall_ms: clock.elapsed_ms(),
        });
        if next_energy < best.1 {
            best = (next.clone(), next_energy);
        }
        let termination = if next == current {
            Some(Termination::Converged)
        } else if previous.as_ref() == Some(&next) {
            Some(Termination::Stalled)
        } else {
            None
        };
        if let Some(termination) = termination {
            return Ok(SolverTrace { records, labeling: best.0, energy: best.1, termination });
        }
        previous = Some(core::mem::replace(&mut current, next));
        energy = next_energy;
    }
    Ok(SolverTrace { records, labeling: best.0, energy: best.1, termination: Termination::MaxIters })
}

/// Relaxed labeling in `[0, 1]^n` used by IPFP.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPoint(Vec<f64>);

impl RelaxedPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().all(|v| (0.0..=1.0).contains(v)) {
            Ok(RelaxedPoint(values))
        } else {
            Err(Error::Parameter { name: "relaxed point", reason: "components must lie in [0, 1]" })
        }
    }

    pub fn from_labeling(s: &Labeling) -> Self {
        RelaxedPoint((0..s.len()).map(|p| s.value(p)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Rounds at 0.5; exactly 0.5 goes to 0.
    pub fn round(&self) -> Labeling {
        Labeling::from_bools(self.0.iter().map(|&v| v > 0.5).collect())
    }
}

/// Multilinear extension `c + Σ u_p·x_p + Σ w_pq·x_p·x_q`, summed in
/// canonical order.
pub fn eval_relaxed(e: &BinaryEnergy, x: &RelaxedPoint) -> Result<f64> {
    e.check_len(x.0.len())?;
    let mut acc = e.constant();
    for (u, v) in e.unary().iter().zip(&x.0) {
        acc += u * v;
    }
    for pair in e.pairs() {
        acc += pair.w * x.0[pair.p] * x.0[pair.q];
    }
    Ok(acc)
}

/// Minimizer over `t ∈ [0, 1]` of `E(x + t·(target - x))` for the
/// multilinear extension. Along the segment the energy is
/// `E(x) + b·t + a·t²`, which is minimized in closed form.
pub fn segment_line_search(e: &BinaryEnergy, x: &RelaxedPoint, target: &RelaxedPoint) -> Result<f64> {
    e.check_len(x.0.len())?;
    e.check_len(target.0.len())?;
    let d: Vec<f64> = target.0.iter().zip(&x.0).map(|(t, v)| t - v).collect();
    let g = gradient(e, &x.0);
    let b: f64 = g.iter().zip(&d).map(|(g, d)| g * d).sum();
    let a: f64 = e.pairs().iter().map(|pair| pair.w * d[pair.p] * d[pair.q]).sum();
    Ok(if a > 0.0 {
        (-b / (2.0 * a)).clamp(0.0, 1.0)
    } else if a + b < 0.0 {
        1.0
    } else {
        0.0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpfpResult {
    /// Final relaxed iterate.
    pub relaxed: RelaxedPoint,
    /// Trace of relaxed energies; `labeling`/`energy` are the rounded
    /// solution and its exact energy.
    pub trace: SolverTrace,
}

/// Moves below this (infinity norm) end IPFP.
pub const IPFP_MIN_STEP: f64 = 1e-9;

/// IPFP: alternate an integer minimizer of the linearization at the
/// relaxed point with an exact line search towards it.
pub fn ipfp_solve(e: &BinaryEnergy, init: &Labeling, max_iters: usize) -> Result<IpfpResult> {
    ipfp_solve_with_clock(e, init, max_iters, &NoClock)
}

pub fn ipfp_solve_with_clock(
    e: &BinaryEnergy,
    init: &Labeling,
    max_iters: usize,
    clock: &dyn Clock,
) -> Result<IpfpResult> {
    e.check_len(init.len())?;
    let n = init.len();
    let mut x = RelaxedPoint::from_labeling(init);
    let mut relaxed_energy = eval_relaxed(e, &x)?;
    let mut records = Vec::new();
    let mut termination = Termination::MaxIters;

    for iter in 0..max_iters {
        let g = gradient(e, &x.0);
        let target = RelaxedPoint(
            g.iter()
                .zip(&x.0)
                .map(|(&gp, &xp)| {
                    if gp < 0.0 {
                        1.0
                    } else if gp > 0.0 {
                        0.0
                    } else if xp > 0.5 {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        );
        let t = segment_line_search(e, &x, &target)?;
        let step: Vec<f64> = target.0.iter().zip(&x.0).map(|(s, v)| t * (s - v)).collect();
        let move_norm = step.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if t == 0.0 || move_norm < IPFP_MIN_STEP {
            termination = Termination::Converged;
            break;
        }
        let predicted = -g.iter().zip(&step).map(|(g, d)| g * d).sum::<f64>();
        let next = RelaxedPoint(
            x.0.iter()
                .zip(&step)
                .zip(&target.0)
                .map(|((v, d), s)| if t == 1.0 { *s } else { (v + d).clamp(0.0, 1.0) })
                .collect(),
        );
        let next_energy = eval_relaxed(e, &next)?;
        records.push(TraceRecord {
            iter,
            lambda: 0.0,
            energy: next_energy,
            predicted,
            actual: relaxed_energy - next_energy,
            accepted: true,
            wall_ms: clock.elapsed_ms(),
        });
        x = next;
        relaxed_energy = next_energy;
    }
    debug_assert_eq!(x.0.len(), n);
    let labeling = x.round();
    let energy = e.eval_unchecked(&labeling);
    Ok(IpfpResult { relaxed: x, trace: SolverTrace { records, labeling, energy, termination } })
}

/// Energy of every labeling, indexed by [`Labeling::from_code`] order.
/// Test helper for small instances.
pub fn enumerate_energies(e: &BinaryEnergy) -> Result<Vec<f64>> {
    let n = e.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut out = vec![0.0; 1 << n];
    for (code, slot) in out.iter_mut().enumerate() {
        *slot = e.eval_unchecked(&Labeling::from_code(code as u64, n));
    }
    Ok(out)
}
