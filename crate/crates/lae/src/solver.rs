//! Observer-style iterative solver for `Y_d = G·U_d`: gain synthesis and
//! validation, the fixed-point iteration itself, convergence classification,
//! and closed-form solution sets.
//!
//! The update is `U_{k+1} = U_k + F·(Y_d − G·U_k)` — a state-observer
//! correction applied to the constant "system" whose output map is `G`. Three
//! gain families are built in:
//!
//! * the σ-rule `F = σ·Gᵀ` (monotone convergence for `σ < 2/tr(G·Gᵀ)`),
//! * deadbeat gains from the full-rank factorization `G = H·Ĝ` that make
//!   `I − Ĝ·F·H` nilpotent and the iteration exact after ≤ `rank(G)` steps,
//! * arbitrary user gains, validated numerically.
//!
//! Property (P) — every column of `Fᵀ` lies in `span(G)` — is what guarantees
//! the limit is a least-squares solution when the equation is unsolvable. It
//! is checked as a rank-augmentation test, never by building a generalized
//! inverse.

use crate::lalg::{
    self, full_rank_factorization, gaussian_solve, nilpotency_degree, rref, solve_matrix,
    spectral_radius_estimate, LalgError, Matrix, RankFactorization, Vector, DEFAULT_TOL,
};
use std::fmt;

/// Error type for problem construction, gain synthesis, and solving.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    Lalg(LalgError),
    /// σ outside the open interval `(0, 2/tr(G·Gᵀ))`.
    SigmaOutOfRange {
        sigma: f64,
        upper: f64,
    },
    /// The right-hand side vector is zero.
    ZeroVector,
    /// Gain shape is not `q × p`.
    GainShape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// The gain lacks property (P) where least-squares semantics need it.
    PropertyPViolated,
    /// The gain carries no monotone or nilpotent convergence certificate.
    NoCertificate,
    /// An iterate left the finite range — the iteration diverges.
    NonFinite {
        iteration: usize,
    },
    /// A configuration field is out of range.
    InvalidConfig {
        detail: &'static str,
    },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Lalg(e) => write!(f, "{e}"),
            SolverError::SigmaOutOfRange { sigma, upper } => {
                write!(f, "sigma {sigma} outside (0, {upper})")
            }
            SolverError::ZeroVector => write!(f, "right-hand side must be nonzero"),
            SolverError::GainShape { expected, got } => write!(
                f,
                "gain must be {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            SolverError::PropertyPViolated => {
                write!(
                    f,
                    "gain violates property (P): span(F^T) not within span(G)"
                )
            }
            SolverError::NoCertificate => {
                write!(f, "gain carries no monotone or nilpotent certificate")
            }
            SolverError::NonFinite { iteration } => {
                write!(f, "iterate became non-finite at iteration {iteration}")
            }
            SolverError::InvalidConfig { detail } => write!(f, "invalid config: {detail}"),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<LalgError> for SolverError {
    fn from(e: LalgError) -> Self {
        SolverError::Lalg(e)
    }
}

/// Whether `Y_d` lies in the column span of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solvability {
    Solvable,
    Unsolvable,
}

impl fmt::Display for Solvability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solvability::Solvable => write!(f, "solvable"),
            Solvability::Unsolvable => write!(f, "unsolvable"),
        }
    }
}

/// The equation `Y_d = G·U_d` together with its rank factorization.
#[derive(Debug, Clone)]
pub struct LaeProblem {
    g: Matrix,
    y_d: Vector,
    factorization: RankFactorization,
    tol: f64,
}

impl LaeProblem {
    /// Builds a problem from a nonzero `G` (p×q) and nonzero `Y_d` (p),
    /// computing the full-rank factorization up front.
    pub fn new(g: Matrix, y_d: Vector) -> Result<Self, SolverError> {
        Self::with_tol(g, y_d, DEFAULT_TOL)
    }

    /// Same as [`LaeProblem::new`] with an explicit rank threshold.
    pub fn with_tol(g: Matrix, y_d: Vector, tol: f64) -> Result<Self, SolverError> {
        if tol <= 0.0 {
            return Err(SolverError::InvalidConfig {
                detail: "rank tolerance must be positive",
            });
        }
        if g.rows() != y_d.dim() {
            return Err(SolverError::Lalg(LalgError::DimensionMismatch {
                op: "problem",
                left: (g.rows(), g.cols()),
                right: (y_d.dim(), 1),
            }));
        }
        if y_d.max_abs() == 0.0 {
            return Err(SolverError::ZeroVector);
        }
        let factorization = full_rank_factorization(&g, tol)?;
        Ok(Self {
            g,
            y_d,
            factorization,
            tol,
        })
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn y_d(&self) -> &Vector {
        &self.y_d
    }

    pub fn factorization(&self) -> &RankFactorization {
        &self.factorization
    }

    pub fn rank(&self) -> usize {
        self.factorization.rank
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Output dimension `p`.
    pub fn output_dim(&self) -> usize {
        self.g.rows()
    }

    /// Unknown dimension `q`.
    pub fn unknown_dim(&self) -> usize {
        self.g.cols()
    }

    /// Rouché–Capelli test: solvable iff `rank([G | Y_d]) == rank(G)`.
    pub fn classify_solvability(&self) -> Solvability {
        let augmented = self
            .g
            .hconcat(&self.y_d.as_column())
            .expect("rows match by construction");
        if rref(&augmented, self.tol).rank == self.rank() {
            Solvability::Solvable
        } else {
            Solvability::Unsolvable
        }
    }

    /// Orthogonal projection of `Y_d` onto `span(G)`: `H(HᵀH)⁻¹HᵀY_d`. This
    /// is the value the output sequence `G·U_k` converges to; it equals `Y_d`
    /// exactly when the problem is solvable.
    pub fn projected_target(&self) -> Vector {
        let h = &self.factorization.h;
        let ht = h.transpose();
        let hth = ht.matmul(h).expect("shapes fixed");
        let hty = ht.matvec(&self.y_d).expect("shapes fixed");
        let z = gaussian_solve(&hth, &hty).expect("HᵀH nonsingular for full-column-rank H");
        h.matvec(&z).expect("shapes fixed")
    }

    /// Builds the σ-rule gain `F = σ·Gᵀ` (default `σ = 1/tr(G·Gᵀ)`).
    ///
    /// Any σ in the open interval `(0, 2/tr(G·Gᵀ))` yields a monotone
    /// contraction with property (P); values outside are rejected.
    pub fn sigma_gain(&self, sigma: Option<f64>) -> Result<Gain, SolverError> {
        let trace = self.g.gram_trace();
        let upper = 2.0 / trace;
        let sigma = sigma.unwrap_or(1.0 / trace);
        if !(sigma > 0.0 && sigma < upper) {
            return Err(SolverError::SigmaOutOfRange { sigma, upper });
        }
        let f = self.g.transpose().scale(sigma)?;
        Ok(Gain {
            f,
            property_p: true,
            certificate: Certificate::MonotoneContraction,
        })
    }

    /// Builds the deadbeat gain `F = Ĝᵀ(ĜĜᵀ)⁻¹(I − F̃)(HᵀH)⁻¹Hᵀ` with `F̃`
    /// nilpotent, so `I − Ĝ·F·H` is nilpotent and the iteration reaches its
    /// limit in exactly `ν` steps (`ν = 1` for the zero kind, `ν = rank` for
    /// the shift kind).
    pub fn deadbeat_gain(&self, kind: NilpotentKind) -> Result<Gain, SolverError> {
        let m = self.rank();
        let h = &self.factorization.h;
        let ghat = &self.factorization.ghat;
        let ftilde = match kind {
            NilpotentKind::Zero => Matrix::zeros(m, m),
            NilpotentKind::Shift => {
                let mut s = Matrix::zeros(m, m);
                for i in 0..m.saturating_sub(1) {
                    s.set(i, i + 1, 1.0);
                }
                s
            }
        };
        let target = Matrix::identity(m).sub(&ftilde)?;

        let ht = h.transpose();
        let ghat_t = ghat.transpose();
        let hth = ht.matmul(h)?;
        let ggt = ghat.matmul(&ghat_t)?;
        // X = Ĝᵀ(ĜĜᵀ)⁻¹ (right inverse of Ĝ), Y = (HᵀH)⁻¹Hᵀ (left inverse of H)
        let x = ghat_t.matmul(&lalg::invert(&ggt)?)?;
        let y = solve_matrix(&hth, &ht)?;
        let mut f = x.matmul(&target.matmul(&y)?)?;
        // Correction passes keep ‖Ĝ·F·H − (I − F̃)‖ at machine level even when
        // κ(HᵀH) eats digits; each correction X·E·Y stays in the same span,
        // so property (P) is untouched.
        for _ in 0..2 {
            let gap = target.sub(&ghat.matmul(&f.matmul(h)?)?)?;
            f = f.add(&x.matmul(&gap.matmul(&y)?)?)?;
        }

        let gain = self.validate_gain(f)?;
        if !gain.property_p {
            return Err(SolverError::PropertyPViolated);
        }
        match gain.certificate {
            Certificate::Nilpotent(_) => Ok(gain),
            _ => Err(SolverError::Lalg(LalgError::FactorizationFailed {
                detail: "deadbeat construction did not certify nilpotent",
            })),
        }
    }

    /// Validates an arbitrary `q × p` gain: property (P) by the
    /// rank-augmentation test, and a convergence certificate from the
    /// nilpotency test on `I − Ĝ·F·H`, falling back to the Gelfand spectral
    /// estimate.
    pub fn validate_gain(&self, f: Matrix) -> Result<Gain, SolverError> {
        validate_gain_matrix(&self.g, &self.factorization, f, self.tol)
    }

    /// Builds a gain from a [`GainSpec`].
    pub fn gain(&self, spec: &GainSpec) -> Result<Gain, SolverError> {
        match spec {
            GainSpec::SigmaTranspose { sigma } => self.sigma_gain(*sigma),
            GainSpec::Deadbeat { kind } => self.deadbeat_gain(*kind),
            GainSpec::Custom { f } => self.validate_gain(f.clone()),
        }
    }

    /// One application of the update `U + F·(Y_d − G·U)`. Pure.
    pub fn iterate_once(&self, f: &Matrix, u: &Vector) -> Result<Vector, SolverError> {
        let residual = self.y_d.sub(&self.g.matvec(u)?)?;
        Ok(u.add(&f.matvec(&residual)?)?)
    }

    /// Runs the iteration from `config.u0` until the step norm
    /// `‖U_k − U_{k−1}‖₂` drops below `config.epsilon` (reported
    /// `iterations` is that first `k`, and `u_inf = U_k`), the gain's
    /// nilpotency degree `ν` is reached (the limit is then exact;
    /// `final_step_norm` is measured as the `ν → ν+1` step), or `max_iters`
    /// runs out (`converged = false`).
    pub fn solve(&self, gain: &Gain, config: &SolverConfig) -> Result<SolveOutcome, SolverError> {
        config.validate()?;
        let q = self.unknown_dim();
        let (p_gain, q_gain) = (gain.f.cols(), gain.f.rows());
        if q_gain != q || p_gain != self.output_dim() {
            return Err(SolverError::GainShape {
                expected: (q, self.output_dim()),
                got: (q_gain, p_gain),
            });
        }
        let u0 = match &config.u0 {
            Some(u) => {
                if u.dim() != q {
                    return Err(SolverError::Lalg(LalgError::DimensionMismatch {
                        op: "u0",
                        left: (q, 1),
                        right: (u.dim(), 1),
                    }));
                }
                u.clone()
            }
            None => Vector::zeros(q),
        };
        let solvability = self.classify_solvability();
        // U_ν is the exact limit only where the finite-termination theory
        // applies: solvable problems, or property-(P) gains. Without (P) on
        // an unsolvable problem the iterate drifts forever and only the
        // step-norm rule (or max_iters) may stop it.
        let deadbeat_at = match gain.certificate {
            Certificate::Nilpotent(nu)
                if gain.property_p || solvability == Solvability::Solvable =>
            {
                Some(nu)
            }
            _ => None,
        };

        // overflow anywhere in an update means the iteration diverges
        let diverged = |e: LalgError, k: usize| match e {
            LalgError::NonFinite => SolverError::NonFinite { iteration: k },
            other => SolverError::Lalg(other),
        };

        let mut trace = config.record_trace.then(Vec::new);
        let mut u_prev = u0;
        let mut residual_prev = self
            .y_d
            .sub(&self.g.matvec(&u_prev)?)
            .map_err(|e| diverged(e, 0))?;
        let mut k = 0usize;
        loop {
            let u_next = gain
                .f
                .matvec(&residual_prev)
                .and_then(|d| u_prev.add(&d))
                .map_err(|e| diverged(e, k + 1))?;
            k += 1;
            let step = u_next.sub(&u_prev)?.norm2();
            let residual_next = self
                .g
                .matvec(&u_next)
                .and_then(|gu| self.y_d.sub(&gu))
                .map_err(|e| diverged(e, k))?;
            let residual_norm = residual_next.norm2();
            if let Some(rows) = trace.as_mut() {
                rows.push(TraceRow {
                    k,
                    step_norm: step,
                    residual_norm,
                });
            }

            if step < config.epsilon {
                return Ok(SolveOutcome {
                    u_inf: u_next,
                    iterations: k,
                    final_step_norm: step,
                    final_residual: residual_norm,
                    solvability,
                    converged: true,
                    trace: trace.map(|rows| IterationTrace { rows }),
                });
            }
            if deadbeat_at == Some(k) {
                // Nilpotency makes U_k the exact limit; the would-be next
                // step is pure rounding noise and becomes the final step
                // norm, keeping `converged => final_step_norm < epsilon`.
                let u_after = u_next.add(&gain.f.matvec(&residual_next)?)?;
                let final_step = u_after.sub(&u_next)?.norm2();
                return Ok(SolveOutcome {
                    u_inf: u_next,
                    iterations: k,
                    final_step_norm: final_step,
                    final_residual: residual_norm,
                    solvability,
                    converged: final_step < config.epsilon,
                    trace: trace.map(|rows| IterationTrace { rows }),
                });
            }
            if k >= config.max_iters {
                return Ok(SolveOutcome {
                    u_inf: u_next,
                    iterations: k,
                    final_step_norm: step,
                    final_residual: residual_norm,
                    solvability,
                    converged: false,
                    trace: trace.map(|rows| IterationTrace { rows }),
                });
            }
            u_prev = u_next;
            residual_prev = residual_next;
        }
    }

    /// Closed-form description of every limit the iteration can reach:
    /// `U_∞ = null_projector·U_0 + particular`. For solvable problems this
    /// sweeps all solutions; otherwise all least-squares solutions.
    ///
    /// Requires property (P) and a monotone or nilpotent certificate.
    pub fn solution_set(&self, gain: &Gain) -> Result<SolutionSet, SolverError> {
        self.solution_set_with_factorization(gain, &self.factorization)
    }

    /// [`LaeProblem::solution_set`] evaluated through an explicit rank
    /// factorization of `G`. Any valid factorization yields the same set;
    /// exposing the choice lets that independence be verified directly.
    pub fn solution_set_with_factorization(
        &self,
        gain: &Gain,
        factorization: &RankFactorization,
    ) -> Result<SolutionSet, SolverError> {
        if !gain.property_p {
            return Err(SolverError::PropertyPViolated);
        }
        match gain.certificate {
            Certificate::MonotoneContraction | Certificate::Nilpotent(_) => {}
            _ => return Err(SolverError::NoCertificate),
        }
        let h = &factorization.h;
        let ht = h.transpose();
        let fh = gain.f.matmul(h)?;
        // core = HᵀG·F·H, the m×m system behind both terms of Eq-style limits
        let core = ht.matmul(&self.g.matmul(&fh)?)?;
        let fh_core_inv = fh.matmul(&lalg::invert(&core)?)?;
        let particular = fh_core_inv.matvec(&ht.matvec(&self.y_d)?)?;
        let null_projector =
            Matrix::identity(self.unknown_dim()).sub(&fh_core_inv.matmul(&ht.matmul(&self.g)?)?)?;

        // basis of the projector's column span = pivot columns of the projector
        let reduced = rref(&null_projector, self.tol);
        let null_basis: Vec<Vector> = reduced
            .pivot_cols
            .iter()
            .map(|&c| null_projector.column(c))
            .collect();

        Ok(SolutionSet {
            particular,
            null_projector,
            null_basis,
            is_least_squares: self.classify_solvability() == Solvability::Unsolvable,
        })
    }
}

/// Gain validation against a map and its factorization; needs no right-hand
/// side, since property (P) and the convergence certificate are properties of
/// `(G, F)` alone.
pub fn validate_gain_matrix(
    g: &Matrix,
    factorization: &RankFactorization,
    f: Matrix,
    tol: f64,
) -> Result<Gain, SolverError> {
    let (p, q) = (g.rows(), g.cols());
    if f.rows() != q || f.cols() != p {
        return Err(SolverError::GainShape {
            expected: (q, p),
            got: (f.rows(), f.cols()),
        });
    }
    // property (P): rank([G | Fᵀ]) == rank(G)
    let augmented = g.hconcat(&f.transpose())?;
    let property_p = rref(&augmented, tol).rank == factorization.rank;

    let iter_core = Matrix::identity(factorization.rank)
        .sub(&factorization.ghat.matmul(&f.matmul(&factorization.h)?)?)?;
    let certificate = match nilpotency_degree(&iter_core, tol)? {
        Some(nu) => Certificate::Nilpotent(nu),
        None => Certificate::SpectralEstimate(spectral_radius_estimate(&iter_core)?),
    };
    Ok(Gain {
        f,
        property_p,
        certificate,
    })
}

/// How the iteration gain is chosen.
#[derive(Debug, Clone)]
pub enum GainSpec {
    /// `F = σ·Gᵀ`; σ defaults to `1/tr(G·Gᵀ)`.
    SigmaTranspose { sigma: Option<f64> },
    /// Factorization-based gain making `I − Ĝ·F·H` nilpotent.
    Deadbeat { kind: NilpotentKind },
    /// User-supplied `q × p` matrix, validated on construction.
    Custom { f: Matrix },
}

/// Shape of the nilpotent core `F̃` in the deadbeat construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilpotentKind {
    /// `F̃ = 0`: convergence in a single step.
    Zero,
    /// Superdiagonal shift: convergence in exactly `rank(G)` steps.
    Shift,
}

/// What the solver can promise about a gain's convergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certificate {
    /// `‖U_{k+1} − U_∞‖₂ ≤ ‖U_k − U_∞‖₂` for every step (σ-rule gains).
    MonotoneContraction,
    /// `(I − Ĝ·F·H)^ν = 0`: the limit is reached exactly at iteration ν.
    Nilpotent(usize),
    /// Gelfand estimate of `ρ(I − Ĝ·F·H)`; diagnostic only.
    SpectralEstimate(f64),
    /// Nothing verified.
    Unverified,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::MonotoneContraction => write!(f, "monotone-contraction"),
            Certificate::Nilpotent(nu) => write!(f, "nilpotent(nu={nu})"),
            Certificate::SpectralEstimate(rho) => write!(f, "spectral-estimate(rho~{rho:.6})"),
            Certificate::Unverified => write!(f, "unverified"),
        }
    }
}

/// A gain matrix with its property-(P) flag and convergence certificate.
#[derive(Debug, Clone)]
pub struct Gain {
    f: Matrix,
    property_p: bool,
    certificate: Certificate,
}

impl Gain {
    /// Wraps a raw gain matrix without validating anything. The solver then
    /// applies only the plain step-norm stopping rule.
    pub fn unverified(f: Matrix) -> Self {
        Gain {
            f,
            property_p: false,
            certificate: Certificate::Unverified,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.f
    }

    pub fn property_p(&self) -> bool {
        self.property_p
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    /// True when the spectral estimate suggests divergence (`ρ̂ ≥ 1 + 1e-3`).
    /// A warning, not an error: Gelfand estimates are approximate.
    pub fn diverging(&self) -> bool {
        matches!(self.certificate, Certificate::SpectralEstimate(rho) if rho >= 1.0 + 1e-3)
    }
}

/// Stopping and recording knobs for [`LaeProblem::solve`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Step-difference stopping tolerance ε.
    pub epsilon: f64,
    /// Residual probe ε̃ used by callers to sanity-check solvability.
    pub residual_epsilon: f64,
    pub max_iters: usize,
    /// Initial iterate; zero if absent (which makes σ-rule limits the
    /// minimum-norm least-squares solution).
    pub u0: Option<Vector>,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            residual_epsilon: 1e-3,
            max_iters: 1_000_000,
            u0: None,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolverError> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(SolverError::InvalidConfig {
                detail: "epsilon must be positive",
            });
        }
        if !self.residual_epsilon.is_finite() || self.residual_epsilon <= 0.0 {
            return Err(SolverError::InvalidConfig {
                detail: "residual_epsilon must be positive",
            });
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig {
                detail: "max_iters must be positive",
            });
        }
        Ok(())
    }
}

/// One recorded iteration: step norm and residual norm at step `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub step_norm: f64,
    pub residual_norm: f64,
}

/// Per-iteration history of a solve.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

/// Result of a solve run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u_inf: Vector,
    pub iterations: usize,
    pub final_step_norm: f64,
    pub final_residual: f64,
    pub solvability: Solvability,
    pub converged: bool,
    pub trace: Option<IterationTrace>,
}

/// Closed-form solution set: `particular + span(null_projector)`.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    /// `F·H·(HᵀG·F·H)⁻¹·Hᵀ·Y_d`, a particular (least-squares) solution.
    pub particular: Vector,
    /// `I − F·H·(HᵀG·F·H)⁻¹·Hᵀ·G`; its column span is `null(G)`.
    pub null_projector: Matrix,
    /// Basis of the projector's column span (`q − rank(G)` vectors).
    pub null_basis: Vec<Vector>,
    /// True when the problem is unsolvable, i.e. the set collects
    /// least-squares solutions rather than exact ones.
    pub is_least_squares: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example1_g() -> Matrix {
        Matrix::from_rows(&[
            vec![1.0, 3.0, 5.0, 7.0, 2.0],
            vec![2.0, 4.0, 6.0, 1.0, 5.0],
            vec![1.0, 2.0, 5.0, 3.0, 3.0],
            vec![1.0, 2.0, 1.0, -2.0, 2.0],
        ])
        .unwrap()
    }

    fn example1_case1() -> LaeProblem {
        LaeProblem::new(
            example1_g(),
            Vector::new(vec![1.0, 0.0, 2.0, -2.0]).unwrap(),
        )
        .unwrap()
    }

    fn example1_case2() -> LaeProblem {
        LaeProblem::new(example1_g(), Vector::new(vec![1.0, 1.0, 2.0, 2.0]).unwrap()).unwrap()
    }

    fn benchmark_config() -> SolverConfig {
        SolverConfig {
            u0: Some(Vector::new(vec![1.0, 1.0, 0.0, 0.0, 0.0]).unwrap()),
            record_trace: true,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn sigma_accepts_benchmark_gain() {
        let problem = example1_case1();
        // 1/120 is inside (0, 2/232)
        let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
        assert!(gain.property_p());
        assert_eq!(gain.certificate(), Certificate::MonotoneContraction);
    }

    #[test]
    fn sigma_default_on_identity() {
        let problem =
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        // tr = 2 → σ = 1/2
        assert_eq!(gain.matrix().get(0, 0), 0.5);
        assert_eq!(gain.matrix().get(1, 1), 0.5);
    }

    #[test]
    fn sigma_out_of_range_rejected() {
        let problem = example1_case1();
        // 1/100 > 2/232
        let err = problem.sigma_gain(Some(0.01)).unwrap_err();
        assert!(matches!(err, SolverError::SigmaOutOfRange { .. }));
    }

    #[test]
    fn deadbeat_zero_on_identity_is_identity_gain() {
        let problem =
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![3.0, 4.0]).unwrap()).unwrap();
        let gain = problem.deadbeat_gain(NilpotentKind::Zero).unwrap();
        let err = gain.matrix().sub(&Matrix::identity(2)).unwrap().max_abs();
        assert!(err < 1e-12);
        assert_eq!(gain.certificate(), Certificate::Nilpotent(1));
    }

    #[test]
    fn deadbeat_zero_converges_in_one_iteration() {
        let problem = example1_case1();
        let gain = problem.deadbeat_gain(NilpotentKind::Zero).unwrap();
        let config = benchmark_config();
        let outcome = problem.solve(&gain, &config).unwrap();
        assert_eq!(outcome.iterations, 1);
        assert!(outcome.converged);
        assert!(outcome.final_step_norm < 1e-9);
    }

    #[test]
    fn deadbeat_shift_degree_is_rank() {
        let problem = example1_case1();
        let gain = problem.deadbeat_gain(NilpotentKind::Shift).unwrap();
        assert_eq!(gain.certificate(), Certificate::Nilpotent(3));
        let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
        assert_eq!(outcome.iterations, 3);
    }

    #[test]
    fn validate_sigma_transpose_has_property_p() {
        let problem = example1_case1();
        let f = problem.g().transpose().scale(0.004).unwrap();
        let gain = problem.validate_gain(f).unwrap();
        assert!(gain.property_p());
    }

    #[test]
    fn validate_detects_property_p_violation() {
        // G the column [1,0,0]ᵀ; a gain row [0,1,0] reaches outside span(G),
        // so the augmented rank increases.
        let problem = LaeProblem::new(
            Matrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap(),
            Vector::new(vec![1.0, 1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let f = Matrix::from_rows(&[vec![0.0, 1.0, 0.0]]).unwrap();
        let gain = problem.validate_gain(f).unwrap();
        assert!(!gain.property_p());
    }

    #[test]
    fn iterate_once_identity_fixed_point() {
        let problem =
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![1.0, 2.0]).unwrap()).unwrap();
        let f = Matrix::identity(2);
        let u1 = problem.iterate_once(&f, &Vector::zeros(2)).unwrap();
        assert_eq!(u1.entries(), &[1.0, 2.0]);
        // a solution is a fixed point
        let u2 = problem.iterate_once(&f, &u1).unwrap();
        assert_eq!(u2.entries(), u1.entries());
    }

    #[test]
    fn iterate_once_matches_hand_computation() {
        // one σ-rule step on the benchmark system from U0 = [1,1,0,0,0]:
        // G·U0 = [4,6,3,3], residual = [-3,-6,-1,-5],
        // Gᵀ·residual = [-21,-45,-61,-20,-49]
        let problem = example1_case1();
        let f = problem.g().transpose().scale(1.0 / 120.0).unwrap();
        let u0 = Vector::new(vec![1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let u1 = problem.iterate_once(&f, &u0).unwrap();
        let expected = [
            1.0 - 21.0 / 120.0,
            1.0 - 45.0 / 120.0,
            -61.0 / 120.0,
            -20.0 / 120.0,
            -49.0 / 120.0,
        ];
        for (got, want) in u1.entries().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
        }
    }

    #[test]
    fn benchmark_solvable_iteration_count_and_residual() {
        let problem = example1_case1();
        let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
        let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
        assert!(outcome.converged);
        assert_eq!(outcome.solvability, Solvability::Solvable);
        assert!(
            (585..=589).contains(&outcome.iterations),
            "iterations = {}",
            outcome.iterations
        );
        assert!(
            (outcome.final_residual - 9.1018e-4).abs() < 1e-5,
            "residual = {}",
            outcome.final_residual
        );
    }

    #[test]
    fn benchmark_unsolvable_iteration_count_and_residual() {
        let problem = example1_case2();
        let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
        let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
        assert_eq!(outcome.solvability, Solvability::Unsolvable);
        assert!(
            (502..=506).contains(&outcome.iterations),
            "iterations = {}",
            outcome.iterations
        );
        assert!((outcome.final_residual - 1.7321).abs() < 1e-3);
    }

    #[test]
    fn trivial_identity_solve_takes_two_steps() {
        // With an unverified gain the plain step-norm rule applies: U1 jumps
        // to the solution, U2 repeats it, step norm 0 < ε at k = 2.
        let problem =
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![3.0, 4.0]).unwrap()).unwrap();
        let gain = Gain::unverified(Matrix::identity(2));
        let outcome = problem.solve(&gain, &SolverConfig::default()).unwrap();
        assert_eq!(outcome.iterations, 2);
        assert_eq!(outcome.u_inf.entries(), &[3.0, 4.0]);
        assert!(outcome.converged);
    }

    #[test]
    fn divergent_gain_reports_non_finite() {
        let problem =
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        // F = -40·I gives ρ(I - FG) = 41 — explosive
        let gain = Gain::unverified(Matrix::identity(2).scale(-40.0).unwrap());
        let err = problem.solve(&gain, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, SolverError::NonFinite { .. }));
    }

    #[test]
    fn nilpotent_certificate_without_property_p_cannot_stop_early() {
        // G annihilates e2 and Y_d has mass there: the iterate drifts along
        // null(G) forever even though I − Ĝ·F·H is nilpotent, so the
        // certificate stop must stay disabled.
        let problem = LaeProblem::new(
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            Vector::new(vec![0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let gain = problem.validate_gain(Matrix::identity(2)).unwrap();
        assert_eq!(gain.certificate(), Certificate::Nilpotent(1));
        assert!(!gain.property_p());
        let outcome = problem
            .solve(
                &gain,
                &SolverConfig {
                    max_iters: 50,
                    ..SolverConfig::default()
                },
            )
            .unwrap();
        assert!(!outcome.converged);
        assert_eq!(outcome.iterations, 50);
        // every step moves by exactly the null-space drift
        assert!((outcome.final_step_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_constructed_consistent_system() {
        let g = example1_g();
        let u = Vector::new(vec![0.3, -1.2, 0.5, 2.0, -0.7]).unwrap();
        let y = g.matvec(&u).unwrap();
        let problem = LaeProblem::new(g, y).unwrap();
        assert_eq!(problem.classify_solvability(), Solvability::Solvable);
    }

    #[test]
    fn classify_benchmark_cases() {
        assert_eq!(
            example1_case1().classify_solvability(),
            Solvability::Solvable
        );
        assert_eq!(
            example1_case2().classify_solvability(),
            Solvability::Unsolvable
        );
    }

    #[test]
    fn projected_target_fixes_solvable_rhs() {
        let problem = example1_case1();
        let y_inf = problem.projected_target();
        let gap = y_inf.sub(problem.y_d()).unwrap().norm2();
        assert!(gap < 1e-8, "gap = {gap}");
    }

    #[test]
    fn projected_target_on_column_matrix() {
        let problem = LaeProblem::new(
            Matrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap(),
            Vector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let y_inf = problem.projected_target();
        assert!((y_inf.get(0) - 1.0).abs() < 1e-14);
        assert!(y_inf.get(1).abs() < 1e-14);
    }

    #[test]
    fn benchmark_unsolvable_projection_distance_is_least_squares_norm() {
        let problem = example1_case2();
        let y_inf = problem.projected_target();
        let dist = problem.y_d().sub(&y_inf).unwrap().norm2();
        assert!((dist - 1351.0 / 780.0).abs() < 1e-6, "dist = {dist}");
    }

    #[test]
    fn solution_set_minimum_norm_example() {
        let g = Matrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let problem = LaeProblem::new(g, Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let set = problem.solution_set(&gain).unwrap();
        let expected = [1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        for (got, want) in set.particular.entries().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        assert_eq!(set.null_basis.len(), 1);
        let b = &set.null_basis[0];
        // proportional to [-1, -1, 1]
        let scale = b.get(2);
        assert!(scale.abs() > 1e-12);
        assert!((b.get(0) / scale + 1.0).abs() < 1e-10);
        assert!((b.get(1) / scale + 1.0).abs() < 1e-10);
        assert!(!set.is_least_squares);
    }

    #[test]
    fn solution_set_identity_is_trivial() {
        let problem = LaeProblem::new(
            Matrix::identity(3),
            Vector::new(vec![1.0, 2.0, 3.0]).unwrap(),
        )
        .unwrap();
        let gain = problem.sigma_gain(None).unwrap();
        let set = problem.solution_set(&gain).unwrap();
        assert!(set.null_projector.max_abs() < 1e-12);
        assert!(set.null_basis.is_empty());
        for (got, want) in set.particular.entries().iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn solution_set_benchmark_unsolvable_residual() {
        let problem = example1_case2();
        let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
        let set = problem.solution_set(&gain).unwrap();
        assert!(set.is_least_squares);
        let residual = problem
            .y_d()
            .sub(&problem.g().matvec(&set.particular).unwrap())
            .unwrap()
            .norm2();
        // the printed fraction is a decimal re-encoding of √3, good to ~5e-7
        assert!(
            (residual - 1351.0 / 780.0).abs() < 1e-5,
            "residual = {residual}"
        );
        // G·particular equals the projected target
        let gap = problem
            .g()
            .matvec(&set.particular)
            .unwrap()
            .sub(&problem.projected_target())
            .unwrap()
            .norm2();
        assert!(gap < 1e-8);
        // projector idempotent
        let p = &set.null_projector;
        let idem_gap = p.matmul(p).unwrap().sub(p).unwrap().frobenius_norm();
        assert!(idem_gap < 1e-8);
    }

    #[test]
    fn solution_set_requires_property_p_and_certificate() {
        let problem = example1_case1();
        let raw = Gain::unverified(problem.g().transpose().scale(1.0 / 232.0).unwrap());
        assert!(matches!(
            problem.solution_set(&raw),
            Err(SolverError::PropertyPViolated)
        ));
        // property (P) true but only a spectral certificate
        let validated = problem
            .validate_gain(problem.g().transpose().scale(1.0 / 232.0).unwrap())
            .unwrap();
        assert!(validated.property_p());
        assert!(matches!(
            problem.solution_set(&validated),
            Err(SolverError::NoCertificate)
        ));
    }

    #[test]
    fn zero_rhs_rejected() {
        assert!(matches!(
            LaeProblem::new(Matrix::identity(2), Vector::new(vec![0.0, 0.0]).unwrap()),
            Err(SolverError::ZeroVector)
        ));
    }

    #[test]
    fn monotone_steps_on_benchmark_cases() {
        for problem in [example1_case1(), example1_case2()] {
            let gain = problem.sigma_gain(Some(1.0 / 120.0)).unwrap();
            let outcome = problem.solve(&gain, &benchmark_config()).unwrap();
            let rows = &outcome.trace.as_ref().unwrap().rows;
            for pair in rows.windows(2) {
                assert!(
                    pair[1].step_norm <= pair[0].step_norm + 1e-12,
                    "step norm increased at k={}",
                    pair[1].k
                );
            }
        }
    }
}
