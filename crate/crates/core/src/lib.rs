//! Local submodular approximation (LSA) solvers for binary pairwise energies.
//!
//! The crate minimizes `E(S) = c + Σ u_p·s_p + Σ w_pq·s_p·s_q` over binary
//! labelings, where some `w_pq` may be positive (supermodular, which makes
//! the problem NP-hard in general). Two families of solvers keep the
//! submodular terms intact and replace the supermodular ones by linear
//! terms around the current labeling, then solve the resulting submodular
//! problem exactly with a max-flow:
//!
//! * [`trust_region`]: Taylor linearization plus a Hamming-distance
//!   Lagrangian whose weight is adapted from the actual/predicted reduction
//!   ratio (LSA-TR).
//! * [`auxiliary`]: tight linear upper bounds, giving a majorize-minimize
//!   scheme with guaranteed descent (LSA-AUX and its randomized variant).
//!
//! [`baselines`] holds the exhaustive oracle and comparison methods, and
//! [`problems`] builds benchmark energies. The crate is `no_std` and only
//! needs `alloc`; file formats and the command-line tool live in `lsa-cli`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod auxiliary;
pub mod baselines;
pub mod energy;
pub mod error;
pub mod maxflow;
pub mod problems;
pub mod trace;
pub mod trust_region;

pub use auxiliary::{lsa_aux_solve, AuxParams, BoundVariant};
pub use energy::{hamming, hamming_unaries, BinaryEnergy, Decomposition, EnergyBuilder, Labeling, Pair};
pub use error::{Error, Result};
pub use maxflow::{minimize_submodular, FlowNetwork};
pub use trace::{Clock, NoClock, SolverTrace, Termination, TraceRecord};
pub use trust_region::{lsa_tr_solve, TrustRegionParams};
