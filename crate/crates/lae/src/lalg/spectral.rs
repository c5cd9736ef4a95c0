use super::matrix::{LalgError, Matrix};

/// Gelfand estimate of the spectral radius, `ρ ≈ ‖A^(2^j)‖_F^(1/2^j)`, by
/// repeated squaring with per-step rescaling against overflow/underflow.
///
/// Squaring stops after 30 doublings or once the estimate moves by less than
/// 1e-4. Accuracy is about ±1e-3 — this is a diagnostic, never used to decide
/// correctness. An exactly vanishing power short-circuits to 0 (nilpotent
/// input).
pub fn spectral_radius_estimate(a: &Matrix) -> Result<f64, LalgError> {
    if !a.is_square() {
        return Err(LalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm0 = a.frobenius_norm();
    if norm0 == 0.0 {
        return Ok(0.0);
    }
    // scaled = A^(2^j) / exp(log_scale); ‖scaled‖_F == 1 after each rescale
    let mut scaled = a.scale(1.0 / norm0)?;
    let mut log_scale = norm0.ln();
    let mut estimate = norm0;

    for j in 1..=30u32 {
        let squared = scaled.matmul(&scaled)?;
        let norm = squared.frobenius_norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        scaled = squared.scale(1.0 / norm)?;
        log_scale = 2.0 * log_scale + norm.ln();
        let next = (log_scale / f64::from(1u32 << j)).exp();
        let done = (next - estimate).abs() < 1e-4;
        estimate = next;
        if done {
            break;
        }
    }
    Ok(estimate)
}

/// Degree of nilpotency: the smallest `ν ∈ [1, n]` such that the largest
/// entry of `A^ν` falls to `tol` relative to `max(1, ‖A^(ν−1)‖_max)`.
/// Returns `None` when no power up to `n` vanishes.
pub fn nilpotency_degree(a: &Matrix, tol: f64) -> Result<Option<usize>, LalgError> {
    if !a.is_square() {
        return Err(LalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut prev_max = 1.0f64; // ‖A^0‖_max = ‖I‖_max
    let mut power = a.clone();
    for nu in 1..=n {
        let max = power.max_abs();
        if max <= tol * prev_max.max(1.0) {
            return Ok(Some(nu));
        }
        prev_max = max;
        if nu < n {
            power = power.matmul(a)?;
        }
    }
    Ok(None)
}
