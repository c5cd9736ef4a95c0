//! Independent ground truth for tests and `--verify`: minimum-norm
//! least-squares solutions computed by ridge regularization with Richardson
//! extrapolation — a route that shares no code with the solver's iteration or
//! the rank-factorization machinery. The only shared dependency is plain
//! Gaussian elimination.
//!
//! The module deliberately never touches `solver`; keeping the dependency
//! direction oracle → lalg is what makes the cross-checks meaningful.

use crate::lalg::{gaussian_solve, LalgError, Matrix, Vector};
use crate::rng::Lcg64;
use std::fmt;

/// Regularization rungs solved before extrapolating toward λ → 0.
pub const LAMBDA_LADDER: [f64; 3] = [1e-6, 1e-8, 1e-10];

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    Lalg(LalgError),
    /// Extrapolants across the ladder disagree — conditioning is too poor
    /// for the oracle to vouch for a solution.
    IllConditioned {
        spread: f64,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Lalg(e) => write!(f, "{e}"),
            OracleError::IllConditioned { spread } => {
                write!(f, "ridge ladder disagrees by {spread:.3e} relative")
            }
        }
    }
}

impl std::error::Error for OracleError {}

impl From<LalgError> for OracleError {
    fn from(e: LalgError) -> Self {
        OracleError::Lalg(e)
    }
}

/// Minimum-norm least-squares solution and its residual.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub solution: Vector,
    pub residual: f64,
    pub lambda_ladder: [f64; 3],
}

/// Computes the minimum-norm least-squares solution of `y ≈ G·x` by solving
/// `(GᵀG + λI)x = Gᵀy` down the ladder and Richardson-extrapolating in λ.
///
/// `G` and `y` are first divided by the largest magnitude entry of `G`; the
/// minimizer is unchanged and the ladder then works on an O(1) Gram matrix,
/// which keeps the stated accuracy over the whole well-scaled input range
/// (entries within ±1e3).
///
/// The reported solution is the extrapolant of the two larger rungs; the
/// extrapolant of the two smaller rungs serves as a consistency probe (the
/// smallest rung amplifies rounding noise in null directions by `1/λ`, so it
/// is better at detecting trouble than at being the answer). Accuracy is
/// about 1e-6 relative.
pub fn min_norm_least_squares(g: &Matrix, y: &Vector) -> Result<OracleResult, OracleError> {
    let scale = g.max_abs();
    if scale == 0.0 {
        return Err(OracleError::Lalg(LalgError::ZeroMatrix));
    }
    let g_scaled = g.scale(1.0 / scale)?;
    let y_scaled = y.scale(1.0 / scale)?;
    let gt = g_scaled.transpose();
    let gram = gt.matmul(&g_scaled)?;
    let rhs = gt.matvec(&y_scaled)?;
    let n = gram.rows();

    let mut rungs = Vec::with_capacity(LAMBDA_LADDER.len());
    for lambda in LAMBDA_LADDER {
        let mut shifted = gram.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) + lambda);
        }
        let x = gaussian_solve(&shifted, &rhs).map_err(|e| match e {
            LalgError::SingularMatrix => OracleError::IllConditioned {
                spread: f64::INFINITY,
            },
            other => OracleError::Lalg(other),
        })?;
        rungs.push(x);
    }

    let primary = richardson(&rungs[0], LAMBDA_LADDER[0], &rungs[1], LAMBDA_LADDER[1])?;
    let probe = richardson(&rungs[1], LAMBDA_LADDER[1], &rungs[2], LAMBDA_LADDER[2])?;
    let spread = primary.sub(&probe)?.norm2() / primary.norm2().max(1.0);
    if spread > 1e-4 {
        return Err(OracleError::IllConditioned { spread });
    }

    let residual = y.sub(&g.matvec(&primary)?)?.norm2();
    Ok(OracleResult {
        solution: primary,
        residual,
        lambda_ladder: LAMBDA_LADDER,
    })
}

/// Linear extrapolation to λ = 0 from two rungs: x(λ) ≈ x* − λ·c.
fn richardson(x1: &Vector, l1: f64, x2: &Vector, l2: f64) -> Result<Vector, LalgError> {
    // (l1·x2 − l2·x1) / (l1 − l2)
    x2.scale(l1 / (l1 - l2))?.sub(&x1.scale(l2 / (l1 - l2))?)
}

/// Probes whether `candidate` already minimizes `‖y − G·x‖₂`: tries `trials`
/// random perturbations of norm `1e-3·max(1, ‖candidate‖₂)` and reports
/// whether none reduces the residual by more than 1e-9. Deterministic: the
/// perturbation stream is seeded internally.
pub fn residual_is_minimal(g: &Matrix, y: &Vector, candidate: &Vector, trials: usize) -> bool {
    assert!(trials >= 1, "at least one trial required");
    let base = match g.matvec(candidate).and_then(|gc| y.sub(&gc)) {
        Ok(r) => r.norm2(),
        Err(_) => return false,
    };
    let scale = 1e-3 * candidate.norm2().max(1.0);
    let mut rng = Lcg64::new(0x5EED_CAB1E);
    for _ in 0..trials {
        let mut delta = rng.vector(candidate.dim());
        let norm = delta.norm2();
        if norm == 0.0 {
            continue;
        }
        delta = delta.scale(scale / norm).expect("finite");
        let perturbed = candidate.add(&delta).expect("dims match");
        let residual = match g.matvec(&perturbed).and_then(|gp| y.sub(&gp)) {
            Ok(r) => r.norm2(),
            Err(_) => return false,
        };
        if residual < base - 1e-9 {
            return false;
        }
    }
    true
}
