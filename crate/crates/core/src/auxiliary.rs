//! LSA-AUX: majorize-minimize with linear upper bounds on supermodular pairs.
//!
//! Every positive pair `w·x·y` is bounded above by a plane that touches it
//! at the current configuration `(x_t, y_t)` and at `(0, 0)`:
//!
//! | `(x_t, y_t)` | bound             | plane  |
//! |--------------|-------------------|--------|
//! | (0,0)        | `w/2·x + w/2·y`   | purple |
//! | (0,1)        | `w·x`             | green  |
//! | (1,0)        | `w·y`             | orange |
//! | (1,1)        | `w/2·x + w/2·y`   | purple |
//!
//! Equivalently the coefficient given to `p` is `w/2·(1 + y_t - x_t)`. The
//! permutation variant replaces the purple plane at (0,0) and (1,1) by a
//! coin flip between green and orange. Summing the planes with the exact
//! submodular part gives a submodular auxiliary function `A_t ≥ E` with
//! `A_t(S_t) = E(S_t)`, so each exact minimization of `A_t` cannot increase
//! the energy.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{BinaryEnergy, Decomposition, Labeling};
use crate::error::{Error, Result};
use crate::maxflow::minimize_submodular;
use crate::trace::{Clock, NoClock, SolverTrace, Termination, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// Purple plane for (0,0) and (1,1); deterministic.
    Standard,
    /// Random green/orange plane for (0,0) and (1,1), reproducible from
    /// `seed`. With `redraw` the coins are drawn afresh every iteration,
    /// otherwise the iteration-0 draw is reused.
    Permutation { seed: u64, redraw: bool },
}

/// Which plane bounds a pair at an ambiguous state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// `w/2·x + w/2·y`
    Purple,
    /// `w·x`
    Green,
    /// `w·y`
    Orange,
}

impl Plane {
    /// Coefficients `(a, b)` of the bound `a·x + b·y` for `w·x·y`.
    pub fn coefficients(self, w: f64) -> (f64, f64) {
        match self {
            Plane::Purple => (0.5 * w, 0.5 * w),
            Plane::Green => (w, 0.0),
            Plane::Orange => (0.0, w),
        }
    }
}

/// Plane used for a pair at state `(x_t, y_t)`. `coin` decides the
/// ambiguous states (0,0) and (1,1): `None` is purple, `Some(true)` green,
/// `Some(false)` orange.
pub fn select_plane(x_t: bool, y_t: bool, coin: Option<bool>) -> Plane {
    match (x_t, y_t) {
        (false, true) => Plane::Green,
        (true, false) => Plane::Orange,
        _ => match coin {
            None => Plane::Purple,
            Some(true) => Plane::Green,
            Some(false) => Plane::Orange,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub max_iters: usize,
    /// Permutation variant: stop after this many consecutive iterations
    /// without a strict decrease.
    pub max_stall: usize,
    /// A decrease must exceed this to count as strict.
    pub tolerance: f64,
}

impl Default for AuxParams {
    fn default() -> Self {
        AuxParams { max_iters: 1000, max_stall: 5, tolerance: 1e-10 }
    }
}

impl AuxParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Parameter { name: "max_iters", reason: "must be positive" });
        }
        if self.max_stall == 0 {
            return Err(Error::Parameter { name: "max_stall", reason: "must be positive" });
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Parameter { name: "tolerance", reason: "must be nonnegative" });
        }
        Ok(())
    }
}

/// Unary vector `U_t` with `Σ w⁺·s_p·s_q ≤ Sᵀ U_t` for every `S`, tight at
/// `s_t`. `iteration` selects the coin stream of the permutation variant.
pub fn aux_bound_unaries(
    dec: &Decomposition,
    s_t: &Labeling,
    variant: BoundVariant,
    iteration: usize,
) -> Result<Vec<f64>> {
    dec.sub.check_len(s_t.len())?;
    let mut coins = match variant {
        BoundVariant::Standard => None,
        BoundVariant::Permutation { seed, redraw } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(if redraw { iteration as u64 } else { 0 });
            Some(rng)
        }
    };
    let mut u = alloc::vec![0.0; s_t.len()];
    for pair in &dec.sup_pairs {
        let (x_t, y_t) = (s_t.get(pair.p), s_t.get(pair.q));
        let coin = match coins.as_mut() {
            Some(rng) if x_t == y_t => Some(rng.random::<bool>()),
            _ => None,
        };
        let (a, b) = select_plane(x_t, y_t, coin).coefficients(pair.w);
        u[pair.p] += a;
        u[pair.q] += b;
    }
    Ok(u)
}

/// `A_t(S) = Sᵀ U_t + E_sub(S)`; submodular by construction.
pub fn build_auxiliary(dec: &Decomposition, unary_t: &[f64]) -> Result<BinaryEnergy> {
    dec.sub.check_len(unary_t.len())?;
    let unary = dec.sub.unary().iter().zip(unary_t).map(|(a, b)| a + b).collect();
    BinaryEnergy::new(unary, dec.sub.pairs().to_vec(), dec.sub.constant())
}

/// Runs LSA-AUX (or LSA-AUX-P) from `init`.
pub fn lsa_aux_solve(
    e: &BinaryEnergy,
    variant: BoundVariant,
    init: &Labeling,
    params: &AuxParams,
) -> Result<SolverTrace> {
    lsa_aux_solve_with_clock(e, variant, init, params, &NoClock)
}

pub fn lsa_aux_solve_with_clock(
    e: &BinaryEnergy,
    variant: BoundVariant,
    init: &Labeling,
    params: &AuxParams,
    clock: &dyn Clock,
) -> Result<SolverTrace> {
    params.validate()?;
    e.check_len(init.len())?;
    let dec = e.decompose();

    let mut current = init.clone();
    let mut energy = e.eval_unchecked(&current);
    let mut stall = 0;
    let mut records = Vec::new();

    for iter in 0..params.max_iters {
        let unary_t = aux_bound_unaries(&dec, &current, variant, iter)?;
        let aux = build_auxiliary(&dec, &unary_t)?;
        let (candidate, aux_at_candidate) = minimize_submodular(&aux)?;
        let predicted = aux.eval_unchecked(&current) - aux_at_candidate;
        let candidate_energy = e.eval_unchecked(&candidate);
        let actual = energy - candidate_energy;

        // only round-off can make the candidate worse; never step uphill
        if candidate_energy <= energy {
            current = candidate;
            energy = candidate_energy;
        }
        records.push(TraceRecord {
            iter,
            lambda: 0.0,
            energy,
            predicted,
            actual,
            accepted: true,
            wall_ms: clock.elapsed_ms(),
        });

        let improved = actual > params.tolerance;
        match variant {
            BoundVariant::Standard if !improved => {
                return Ok(SolverTrace { records, labeling: current, energy, termination: Termination::Converged });
            }
            BoundVariant::Permutation { .. } => {
                stall = if improved { 0 } else { stall + 1 };
                if stall >= params.max_stall {
                    return Ok(SolverTrace { records, labeling: current, energy, termination: Termination::Stalled });
                }
            }
            _ => {}
        }
    }
    Ok(SolverTrace { records, labeling: current, energy, termination: Termination::MaxIters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Pair;
    use alloc::vec;

    fn energy(unary: &[f64], pairs: &[(usize, usize, f64)], c: f64) -> BinaryEnergy {
        BinaryEnergy::new(unary.to_vec(), pairs.iter().map(|&(p, q, w)| Pair::new(p, q, w)).collect(), c).unwrap()
    }

    fn bound_values(plane: Plane, w: f64) -> [f64; 4] {
        let (a, b) = plane.coefficients(w);
        // order: (0,0), (0,1), (1,0), (1,1) as (x, y)
        [0.0, b, a, a + b]
    }

    #[test]
    fn green_plane_at_zero_one() {
        let alpha = 3.0;
        let plane = select_plane(false, true, None);
        assert_eq!(plane, Plane::Green);
        assert_eq!(bound_values(plane, alpha), [0.0, 0.0, alpha, alpha]);
        let f = [0.0, 0.0, 0.0, alpha];
        for (b, f) in bound_values(plane, alpha).iter().zip(f) {
            assert!(*b >= f);
        }
        assert_eq!(bound_values(plane, alpha)[1], f[1]);
    }

    #[test]
    fn purple_plane_at_one_one() {
        let plane = select_plane(true, true, None);
        assert_eq!(plane, Plane::Purple);
        assert_eq!(bound_values(plane, 2.0)[3], 2.0);
    }

    #[test]
    fn permutation_coin_green_at_zero_zero() {
        let plane = select_plane(false, false, Some(true));
        assert_eq!(bound_values(plane, 1.5), [0.0, 0.0, 1.5, 1.5]);
    }

    #[test]
    fn closed_form_matches_table() {
        // coefficient to p is w/2·(1 + y_t - x_t)
        for (x_t, y_t) in [(false, false), (false, true), (true, false), (true, true)] {
            let w = 4.0;
            let (a, b) = select_plane(x_t, y_t, None).coefficients(w);
            let (x, y) = (x_t as u8 as f64, y_t as u8 as f64);
            assert_eq!(a, w / 2.0 * (1.0 + y - x));
            assert_eq!(b, w / 2.0 * (1.0 + x - y));
        }
    }

    #[test]
    fn every_plane_bounds_and_touches() {
        let w = 2.5;
        let f = [0.0, 0.0, 0.0, w];
        for (k, (x_t, y_t)) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
            for coin in [None, Some(true), Some(false)] {
                let values = bound_values(select_plane(x_t, y_t, coin), w);
                assert!(values.iter().zip(f).all(|(b, f)| *b >= f));
                assert_eq!(values[k], f[k]);
                assert_eq!(values[0], 0.0);
            }
        }
    }

    #[test]
    fn no_sup_pairs_gives_original() {
        let e = energy(&[1.0, -2.0], &[(0, 1, -1.0)], 0.5);
        let dec = e.decompose();
        let u = aux_bound_unaries(&dec, &Labeling::ones(2), BoundVariant::Standard, 0).unwrap();
        assert_eq!(build_auxiliary(&dec, &u).unwrap(), e);
    }

    #[test]
    fn single_pair_auxiliary() {
        let e = energy(&[0.0, 0.0], &[(0, 1, 4.0)], 0.0);
        let dec = e.decompose();
        let s_t = Labeling::ones(2);
        let u = aux_bound_unaries(&dec, &s_t, BoundVariant::Standard, 0).unwrap();
        assert_eq!(u, vec![2.0, 2.0]);
        let aux = build_auxiliary(&dec, &u).unwrap();
        assert_eq!(aux.eval(&s_t).unwrap(), 4.0);
        for code in 0..4 {
            let s = Labeling::from_code(code, 2);
            assert!(aux.eval(&s).unwrap() >= e.eval(&s).unwrap());
        }
    }

    #[test]
    fn stalls_above_optimum() {
        let e = energy(&[-1.0, -1.0], &[(0, 1, 3.0)], 0.0);
        let dec = e.decompose();
        let u = aux_bound_unaries(&dec, &Labeling::ones(2), BoundVariant::Standard, 0).unwrap();
        assert_eq!(u, vec![1.5, 1.5]);
        let trace = lsa_aux_solve(&e, BoundVariant::Standard, &Labeling::ones(2), &AuxParams::default()).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert_eq!(trace.records[0].energy, 0.0);
        assert_eq!(trace.labeling, Labeling::zeros(2));
        assert_eq!(trace.energy, 0.0);
        assert_eq!(trace.termination, Termination::Converged);
    }

    #[test]
    fn submodular_energy_one_iteration() {
        let e = energy(&[1.0, 1.0, -2.5], &[(0, 1, -3.0), (1, 2, -0.5)], 0.0);
        let (_, optimum) = minimize_submodular(&e).unwrap();
        let trace = lsa_aux_solve(&e, BoundVariant::Standard, &Labeling::zeros(3), &AuxParams::default()).unwrap();
        assert_eq!(trace.records[0].energy, optimum);
        assert_eq!(trace.energy, optimum);
    }

    #[test]
    fn fixed_point_init_terminates_immediately() {
        let e = energy(&[-1.0, -1.0], &[(0, 1, 3.0)], 0.0);
        let init = Labeling::zeros(2);
        let trace = lsa_aux_solve(&e, BoundVariant::Standard, &init, &AuxParams::default()).unwrap();
        assert_eq!(trace.iterations(), 1);
        assert_eq!(trace.labeling, init);
        assert_eq!(trace.records[0].actual, 0.0);
    }

    #[test]
    fn permutation_is_reproducible_and_stalls() {
        let e = energy(&[-1.0, -1.0, 0.5], &[(0, 1, 3.0), (1, 2, 2.0), (0, 2, 1.0)], 0.0);
        let variant = BoundVariant::Permutation { seed: 7, redraw: true };
        let params = AuxParams::default();
        let a = lsa_aux_solve(&e, variant, &Labeling::ones(3), &params).unwrap();
        let b = lsa_aux_solve(&e, variant, &Labeling::ones(3), &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.termination, Termination::Stalled);
        assert!(a.records.iter().rev().take(params.max_stall).all(|r| r.actual <= params.tolerance));
    }

    #[test]
    fn permutation_without_redraw_reuses_coins() {
        let e = energy(&[0.0; 4], &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)], 0.0);
        let dec = e.decompose();
        let s = Labeling::ones(4);
        let fixed = BoundVariant::Permutation { seed: 3, redraw: false };
        assert_eq!(aux_bound_unaries(&dec, &s, fixed, 0).unwrap(), aux_bound_unaries(&dec, &s, fixed, 9).unwrap());
    }
}
