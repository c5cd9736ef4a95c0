//! Iterative solution of linear algebraic equations `Y_d = G·U_d` by an
//! observer-style update `U_{k+1} = U_k + F·(Y_d − G·U_k)`, for any matrix
//! `G` — solvable or unsolvable, any rank.
//!
//! The gain matrix `F` plays the role of an observer correction gain and is
//! what makes the iteration steerable:
//!
//! * `F = σ·Gᵀ` with `σ ∈ (0, 2/tr(G·Gᵀ))` converges monotonically to a
//!   (least-squares) solution ([`solver::LaeProblem::sigma_gain`]);
//! * a rank-factorization gain built from `G = H·Ĝ` makes `I − Ĝ·F·H`
//!   nilpotent and the iteration terminate exactly after at most `rank(G)`
//!   steps ([`solver::LaeProblem::deadbeat_gain`]);
//! * for any gain with property (P) — `span(Fᵀ) ⊆ span(G)` — the full
//!   solution set is available in closed form ([`solver::LaeProblem::solution_set`]).
//!
//! The [`ilc`] module lifts a finite-horizon discrete-time LTI plant into one
//! such equation and runs the same update as an iterative-learning-control
//! law, achieving perfect tracking without rank assumptions on the first
//! Markov parameter. The [`oracle`] module provides an independent
//! minimum-norm least-squares reference used by tests and `--verify`.
//!
//! All arithmetic uses strictly sequential left-to-right accumulation so that
//! iteration counts are reproducible across platforms.

pub mod ilc;
pub mod lalg;
pub mod oracle;
pub mod rng;
pub mod solver;

pub use lalg::{Matrix, RankFactorization, Vector};
pub use solver::{
    Certificate, Gain, GainSpec, IterationTrace, LaeProblem, SolutionSet, Solvability,
    SolveOutcome, SolverConfig,
};
