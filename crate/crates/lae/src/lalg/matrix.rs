use std::fmt;

/// Error type for dense linear algebra operations.
#[derive(Debug, Clone, PartialEq)]
pub enum LalgError {
    /// Operand shapes are incompatible.
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Entry data length does not match `rows × cols`.
    InvalidLength { expected: usize, got: usize },
    /// Zero rows or columns requested.
    EmptyShape,
    /// A NaN or infinity appeared where a finite value is required.
    NonFinite,
    /// All entries of the matrix fall below the rank threshold.
    ZeroMatrix,
    /// Elimination hit a pivot below the singularity threshold.
    SingularMatrix,
    /// A factorization failed its reconstruction or rank re-check.
    FactorizationFailed { detail: &'static str },
}

impl fmt::Display for LalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LalgError::DimensionMismatch { op, left, right } => write!(
                f,
                "{op}: dimension mismatch {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            LalgError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            LalgError::InvalidLength { expected, got } => {
                write!(f, "entry length mismatch: expected {expected}, got {got}")
            }
            LalgError::EmptyShape => write!(f, "matrix dimensions must be positive"),
            LalgError::NonFinite => write!(f, "non-finite entry (NaN or infinity)"),
            LalgError::ZeroMatrix => write!(f, "matrix is zero at the rank threshold"),
            LalgError::SingularMatrix => write!(f, "matrix is singular at the solve threshold"),
            LalgError::FactorizationFailed { detail } => {
                write!(f, "factorization failed: {detail}")
            }
        }
    }
}

impl std::error::Error for LalgError {}

/// Dense row-major matrix of `f64` with all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting shape/length mismatches
    /// and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LalgError> {
        if rows == 0 || cols == 0 {
            return Err(LalgError::EmptyShape);
        }
        if data.len() != rows * cols {
            return Err(LalgError::InvalidLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(LalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LalgError> {
        if rows.is_empty() {
            return Err(LalgError::EmptyShape);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LalgError::InvalidLength {
                expected: cols,
                got: rows.iter().map(Vec::len).find(|&l| l != cols).unwrap_or(0),
            });
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
    }

    /// Internal constructor for values already known finite and shaped.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_raw(n, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix::from_raw(self.cols, self.rows, data)
    }

    pub fn scale(&self, s: f64) -> Result<Matrix, LalgError> {
        let data: Vec<f64> = self.data.iter().map(|v| s * v).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Matrix, LalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LalgError::DimensionMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    /// Matrix product. Inner accumulation is strictly sequential left to
    /// right; that ordering is a contract, not an implementation detail.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LalgError> {
        if self.cols != other.rows {
            return Err(LalgError::DimensionMismatch {
                op: "matmul",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let lhs = self.row(i);
            for j in 0..other.cols {
                let mut acc = 0.0;
                for (k, &l) in lhs.iter().enumerate() {
                    acc += l * other.get(k, j);
                }
                data[i * other.cols + j] = acc;
            }
        }
        Matrix::new(self.rows, other.cols, data)
    }

    /// Matrix–vector product with sequential accumulation.
    pub fn matvec(&self, v: &Vector) -> Result<Vector, LalgError> {
        if self.cols != v.dim() {
            return Err(LalgError::DimensionMismatch {
                op: "matvec",
                left: (self.rows, self.cols),
                right: (v.dim(), 1),
            });
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for (a, x) in self.row(i).iter().zip(v.entries()) {
                acc += a * x;
            }
            out.push(acc);
        }
        Vector::new(out)
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        let n = self.rows.min(self.cols);
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.get(i, i);
        }
        acc
    }

    /// `tr(A·Aᵀ)`, i.e. the squared Frobenius norm, accumulated in row-major
    /// order. Used for the σ-rule gain bound.
    pub fn gram_trace(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.data {
            acc += v * v;
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.gram_trace().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix, LalgError> {
        if self.rows != other.rows {
            return Err(LalgError::DimensionMismatch {
                op: "hconcat",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix::from_raw(self.rows, cols, data))
    }

    /// Copies the listed columns, in order, into a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &c in cols {
                data.push(self.get(i, c));
            }
        }
        Matrix::from_raw(self.rows, cols.len(), data)
    }

    pub fn column(&self, j: usize) -> Vector {
        let data: Vec<f64> = (0..self.rows).map(|i| self.get(i, j)).collect();
        Vector::from_raw(data)
    }
}

/// Dense column vector of `f64` with all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self, LalgError> {
        if data.is_empty() {
            return Err(LalgError::EmptyShape);
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(LalgError::NonFinite);
        }
        Ok(Self { data })
    }

    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn add(&self, other: &Vector) -> Result<Vector, LalgError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector, LalgError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Result<Vector, LalgError> {
        Vector::new(self.data.iter().map(|v| s * v).collect())
    }

    fn zip_with(
        &self,
        other: &Vector,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Vector, LalgError> {
        if self.dim() != other.dim() {
            return Err(LalgError::DimensionMismatch {
                op,
                left: (self.dim(), 1),
                right: (other.dim(), 1),
            });
        }
        Vector::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )
    }

    /// Euclidean norm, squares accumulated sequentially.
    pub fn norm2(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.data {
            acc += v * v;
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Dot product with sequential accumulation.
    pub fn dot(&self, other: &Vector) -> Result<f64, LalgError> {
        if self.dim() != other.dim() {
            return Err(LalgError::DimensionMismatch {
                op: "dot",
                left: (self.dim(), 1),
                right: (other.dim(), 1),
            });
        }
        let mut acc = 0.0;
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a * b;
        }
        Ok(acc)
    }

    /// Stacks vectors into one long vector (supervector construction).
    pub fn stack(parts: &[Vector]) -> Vector {
        let mut data = Vec::new();
        for p in parts {
            data.extend_from_slice(p.entries());
        }
        Vector::from_raw(data)
    }

    /// Interprets the vector as a single-column matrix.
    pub fn as_column(&self) -> Matrix {
        Matrix::from_raw(self.data.len(), 1, self.data.clone())
    }
}
