use super::matrix::{LalgError, Matrix, Vector};

/// Result of a reduced-row-echelon reduction.
#[derive(Debug, Clone)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
}

/// Reduced row-echelon form via Gaussian elimination with partial pivoting.
///
/// A pivot is accepted iff its magnitude exceeds `tol` times the largest
/// absolute entry of the *original* matrix, so the rank decision is relative
/// to the input's scale. The zero matrix reduces to rank 0 without error.
pub fn rref(a: &Matrix, tol: f64) -> Rref {
    assert!(tol > 0.0, "rref tolerance must be positive");
    let rows = a.rows();
    let cols = a.cols();
    let mut m = a.clone();
    let threshold = tol * a.max_abs();
    let mut pivot_cols = Vec::new();
    let mut rr = 0usize;

    for c in 0..cols {
        if rr >= rows {
            break;
        }
        // partial pivoting: largest magnitude in column c at or below row rr
        let mut best_row = rr;
        let mut best = m.get(rr, c).abs();
        for i in (rr + 1)..rows {
            let v = m.get(i, c).abs();
            if v > best {
                best = v;
                best_row = i;
            }
        }
        if best <= threshold {
            continue;
        }
        if best_row != rr {
            for j in 0..cols {
                let tmp = m.get(rr, j);
                m.set(rr, j, m.get(best_row, j));
                m.set(best_row, j, tmp);
            }
        }
        let pivot = m.get(rr, c);
        for j in 0..cols {
            m.set(rr, j, m.get(rr, j) / pivot);
        }
        m.set(rr, c, 1.0);
        for i in 0..rows {
            if i == rr {
                continue;
            }
            let factor = m.get(i, c);
            if factor != 0.0 {
                for j in 0..cols {
                    m.set(i, j, m.get(i, j) - factor * m.get(rr, j));
                }
                m.set(i, c, 0.0);
            }
        }
        pivot_cols.push(c);
        rr += 1;
    }

    Rref {
        reduced: m,
        rank: pivot_cols.len(),
        pivot_cols,
    }
}

/// Full-rank factorization `G = H·Ĝ` with `H` the pivot columns of `G` and
/// `Ĝ` the nonzero rows of the RREF (the textbook construction).
#[derive(Debug, Clone)]
pub struct RankFactorization {
    /// `p × m`, full column rank; the pivot columns of the source matrix.
    pub h: Matrix,
    /// `m × q`, full row rank; the nonzero RREF rows.
    pub ghat: Matrix,
    /// Shared rank `m`.
    pub rank: usize,
    /// Column indices of the source matrix that form `h`.
    pub pivot_cols: Vec<usize>,
}

pub fn full_rank_factorization(g: &Matrix, tol: f64) -> Result<RankFactorization, LalgError> {
    factorize_columns(g, None, tol)
}

/// Same factorization computed after permuting the columns of `g`, then
/// mapped back to a factorization of `g` itself. Exercises the fact that
/// downstream results are independent of the factorization choice.
pub fn full_rank_factorization_with_column_order(
    g: &Matrix,
    order: &[usize],
    tol: f64,
) -> Result<RankFactorization, LalgError> {
    if order.len() != g.cols() {
        return Err(LalgError::InvalidLength {
            expected: g.cols(),
            got: order.len(),
        });
    }
    factorize_columns(g, Some(order), tol)
}

fn factorize_columns(
    g: &Matrix,
    order: Option<&[usize]>,
    tol: f64,
) -> Result<RankFactorization, LalgError> {
    let permuted = match order {
        Some(ord) => g.select_columns(ord),
        None => g.clone(),
    };
    let red = rref(&permuted, tol);
    if red.rank == 0 {
        return Err(LalgError::ZeroMatrix);
    }
    let m = red.rank;

    // H = pivot columns of the (permuted) source; Ĝ = nonzero RREF rows,
    // columns mapped back to the original ordering.
    let src_pivots: Vec<usize> = match order {
        Some(ord) => red.pivot_cols.iter().map(|&c| ord[c]).collect(),
        None => red.pivot_cols.clone(),
    };
    let h = g.select_columns(&src_pivots);
    let mut ghat = Matrix::zeros(m, g.cols());
    for i in 0..m {
        for j in 0..permuted.cols() {
            let dst = match order {
                Some(ord) => ord[j],
                None => j,
            };
            ghat.set(i, dst, red.reduced.get(i, j));
        }
    }

    let fact = RankFactorization {
        h,
        ghat,
        rank: m,
        pivot_cols: src_pivots,
    };
    fact.verify(g, tol)?;
    Ok(fact)
}

impl RankFactorization {
    /// Re-checks the reconstruction and the factor ranks; both fail only on
    /// numerical breakdown of the elimination.
    fn verify(&self, g: &Matrix, tol: f64) -> Result<(), LalgError> {
        let recon = self.h.matmul(&self.ghat)?;
        let err = recon.sub(g)?.frobenius_norm();
        if err > 1e-10 * g.frobenius_norm().max(1.0) {
            return Err(LalgError::FactorizationFailed {
                detail: "reconstruction residual above tolerance",
            });
        }
        if rref(&self.h, tol).rank != self.rank || rref(&self.ghat, tol).rank != self.rank {
            return Err(LalgError::FactorizationFailed {
                detail: "factor rank differs from source rank",
            });
        }
        Ok(())
    }
}

/// Threshold below which an elimination pivot is treated as exactly zero.
/// This is a solve-breakdown guard near machine precision, deliberately far
/// smaller than the rank threshold: ridge systems with tiny but genuine
/// diagonal shifts must still factor.
const SOLVE_PIVOT_TOL: f64 = 1e-14;

/// Solves the square system `a·x = b` by Gaussian elimination with partial
/// pivoting.
pub fn gaussian_solve(a: &Matrix, b: &Vector) -> Result<Vector, LalgError> {
    let x = solve_matrix(a, &b.as_column())?;
    Ok(x.column(0))
}

/// Solves `a·X = B` for a matrix right-hand side, sharing one elimination.
pub fn solve_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix, LalgError> {
    if !a.is_square() {
        return Err(LalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.rows() != n {
        return Err(LalgError::DimensionMismatch {
            op: "solve",
            left: (n, n),
            right: (b.rows(), b.cols()),
        });
    }
    let nrhs = b.cols();
    let mut m = a.clone();
    let mut rhs = b.clone();
    let threshold = SOLVE_PIVOT_TOL * a.max_abs().max(1.0);

    for c in 0..n {
        let mut best_row = c;
        let mut best = m.get(c, c).abs();
        for i in (c + 1)..n {
            let v = m.get(i, c).abs();
            if v > best {
                best = v;
                best_row = i;
            }
        }
        if best <= threshold {
            return Err(LalgError::SingularMatrix);
        }
        if best_row != c {
            for j in 0..n {
                let tmp = m.get(c, j);
                m.set(c, j, m.get(best_row, j));
                m.set(best_row, j, tmp);
            }
            for j in 0..nrhs {
                let tmp = rhs.get(c, j);
                rhs.set(c, j, rhs.get(best_row, j));
                rhs.set(best_row, j, tmp);
            }
        }
        let pivot = m.get(c, c);
        for i in (c + 1)..n {
            let factor = m.get(i, c) / pivot;
            if factor != 0.0 {
                for j in c..n {
                    m.set(i, j, m.get(i, j) - factor * m.get(c, j));
                }
                for j in 0..nrhs {
                    rhs.set(i, j, rhs.get(i, j) - factor * rhs.get(c, j));
                }
            }
        }
    }

    // back substitution
    let mut x = Matrix::zeros(n, nrhs);
    for j in 0..nrhs {
        for i in (0..n).rev() {
            let mut acc = rhs.get(i, j);
            for k in (i + 1)..n {
                acc -= m.get(i, k) * x.get(k, j);
            }
            x.set(i, j, acc / m.get(i, i));
        }
    }
    if !x.entries().iter().all(|v| v.is_finite()) {
        return Err(LalgError::NonFinite);
    }
    Ok(x)
}

/// Inverse of a small square matrix via `solve_matrix` against the identity.
pub fn invert(a: &Matrix) -> Result<Matrix, LalgError> {
    solve_matrix(a, &Matrix::identity(a.rows()))
}
