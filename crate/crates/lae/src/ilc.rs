//! Iterative learning control over a finite horizon, as an application of
//! the observer-style equation solver.
//!
//! A discrete-time LTI plant `x(t+1) = A·x(t) + B·u(t) + w(t)`,
//! `y(t) = C·x(t) + v(t)` repeated over trials with a fixed initial state is
//! lifted into supervectors: stacking inputs over `t = 0 … N−1` and outputs
//! over `t = r … r+N−1` (with `r` the relative degree) gives
//! `Y = G·U + X₀ + D·W + V`, where `G` is block lower-triangular Toeplitz in
//! the Markov parameters `Gᵢ = C·A^{i+r−1}·B`. Perfect tracking of a
//! reference is then exactly the solving of `Ỹ_d = G·U_d` with
//! `Ỹ_d = Y_d − X₀ − D·W − V`, and the ILC updating law
//! `U_{k+1} = U_k + F·(Y_d − Y_k)` is the solver's iteration in disguise.
//!
//! [`LtiPlant::run_ilc`] deliberately simulates in the time domain rather
//! than through the lifted matrices, so the lifted/time-domain equivalence
//! stays a genuine cross-check in tests.

use crate::lalg::{LalgError, Matrix, Vector, DEFAULT_TOL};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum IlcError {
    Lalg(LalgError),
    /// Every Markov parameter up to the state dimension vanishes — the input
    /// never reaches the output.
    ZeroTransfer,
    /// Supplied sequence has the wrong length.
    SequenceLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// An ILC iterate left the finite range.
    NonFinite {
        iteration: usize,
    },
}

impl fmt::Display for IlcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IlcError::Lalg(e) => write!(f, "{e}"),
            IlcError::ZeroTransfer => {
                write!(
                    f,
                    "zero transfer: no nonzero Markov parameter within the state dimension"
                )
            }
            IlcError::SequenceLength {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected {expected} entries, got {got}"),
            IlcError::NonFinite { iteration } => {
                write!(f, "ILC iterate became non-finite at iteration {iteration}")
            }
        }
    }
}

impl std::error::Error for IlcError {}

impl From<LalgError> for IlcError {
    fn from(e: LalgError) -> Self {
        IlcError::Lalg(e)
    }
}

/// Discrete-time LTI plant with iteration-invariant disturbances, repeated
/// over a finite horizon of `N` input steps.
#[derive(Debug, Clone)]
pub struct LtiPlant {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    x0: Vector,
    horizon: usize,
    /// State disturbance `w(t)`, `t = 0 … N+r−2`; empty means zero.
    w: Vec<Vector>,
    /// Output disturbance `v(t)` over the output window `t = r … r+N−1`;
    /// empty means zero.
    v: Vec<Vector>,
}

impl LtiPlant {
    pub fn new(
        a: Matrix,
        b: Matrix,
        c: Matrix,
        x0: Vector,
        horizon: usize,
    ) -> Result<Self, IlcError> {
        if !a.is_square() {
            return Err(IlcError::Lalg(LalgError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            }));
        }
        let n_s = a.rows();
        if b.rows() != n_s {
            return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                op: "plant B",
                left: (n_s, n_s),
                right: (b.rows(), b.cols()),
            }));
        }
        if c.cols() != n_s {
            return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                op: "plant C",
                left: (n_s, n_s),
                right: (c.rows(), c.cols()),
            }));
        }
        if x0.dim() != n_s {
            return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                op: "plant x0",
                left: (n_s, 1),
                right: (x0.dim(), 1),
            }));
        }
        if horizon == 0 {
            return Err(IlcError::Lalg(LalgError::EmptyShape));
        }
        Ok(Self {
            a,
            b,
            c,
            x0,
            horizon,
            w: Vec::new(),
            v: Vec::new(),
        })
    }

    /// Attaches iteration-invariant disturbance sequences. Lengths are
    /// validated against the relative degree at simulation/lift time.
    pub fn with_disturbances(mut self, w: Vec<Vector>, v: Vec<Vector>) -> Self {
        self.w = w;
        self.v = v;
        self
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    /// State disturbance sequence; empty means identically zero.
    pub fn w(&self) -> &[Vector] {
        &self.w
    }

    /// Output-window disturbance sequence; empty means identically zero.
    pub fn v(&self) -> &[Vector] {
        &self.v
    }

    /// Markov parameter `C·A^j·B`.
    fn markov(&self, j: usize) -> Result<Matrix, LalgError> {
        let mut power = Matrix::identity(self.state_dim());
        for _ in 0..j {
            power = power.matmul(&self.a)?;
        }
        self.c.matmul(&power.matmul(&self.b)?)
    }

    /// Relative degree: the smallest `r ≥ 1` with `C·A^{r−1}·B ≠ 0`. The
    /// search stops at the state dimension — if every Markov parameter up to
    /// there vanishes they all do. The zero test is relative to the scale of
    /// the factors actually multiplied.
    pub fn relative_degree(&self) -> Result<usize, IlcError> {
        let base = self.c.max_abs() * self.b.max_abs();
        let mut power = Matrix::identity(self.state_dim());
        for j in 0..self.state_dim() {
            let markov = self.c.matmul(&power.matmul(&self.b)?)?;
            let scale = (base * power.max_abs()).max(1.0);
            if markov.max_abs() > DEFAULT_TOL * scale {
                return Ok(j + 1);
            }
            power = power.matmul(&self.a)?;
        }
        Err(IlcError::ZeroTransfer)
    }

    /// Simulates one trial: `x(t+1) = A·x(t) + B·u(t) + w(t)` from `x(0) =
    /// x0`, returning outputs `y(t) = C·x(t) + v(t)` over the window
    /// `t = r … r+N−1`. Inputs beyond the horizon are zero where the window
    /// needs them.
    pub fn simulate_time_domain(&self, u: &[Vector]) -> Result<Vec<Vector>, IlcError> {
        let r = self.relative_degree()?;
        let n = self.horizon;
        self.check_inputs(u)?;
        self.check_disturbances(r)?;

        let zero_u = Vector::zeros(self.input_dim());
        let mut x = self.x0.clone();
        let mut outputs = Vec::with_capacity(n);
        for t in 0..(r + n) {
            if t >= r {
                let mut y = self.c.matvec(&x)?;
                if !self.v.is_empty() {
                    y = y.add(&self.v[t - r])?;
                }
                outputs.push(y);
                if outputs.len() == n {
                    break;
                }
            }
            let u_t = u.get(t).unwrap_or(&zero_u);
            let mut next = self.a.matvec(&x)?.add(&self.b.matvec(u_t)?)?;
            if !self.w.is_empty() {
                next = next.add(&self.w[t])?;
            }
            x = next;
        }
        Ok(outputs)
    }

    fn check_inputs(&self, u: &[Vector]) -> Result<(), IlcError> {
        if u.len() != self.horizon {
            return Err(IlcError::SequenceLength {
                what: "input sequence",
                expected: self.horizon,
                got: u.len(),
            });
        }
        for v in u {
            if v.dim() != self.input_dim() {
                return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                    op: "input sample",
                    left: (self.input_dim(), 1),
                    right: (v.dim(), 1),
                }));
            }
        }
        Ok(())
    }

    fn check_disturbances(&self, r: usize) -> Result<(), IlcError> {
        if !self.w.is_empty() && self.w.len() != self.horizon + r - 1 {
            return Err(IlcError::SequenceLength {
                what: "state disturbance w",
                expected: self.horizon + r - 1,
                got: self.w.len(),
            });
        }
        if !self.v.is_empty() && self.v.len() != self.horizon {
            return Err(IlcError::SequenceLength {
                what: "output disturbance v",
                expected: self.horizon,
                got: self.v.len(),
            });
        }
        Ok(())
    }

    /// Lifts the plant and a reference into the supervector equation
    /// `Ỹ_d = G·U_d`.
    pub fn lift(&self, y_d: &[Vector]) -> Result<LiftedSystem, IlcError> {
        let r = self.relative_degree()?;
        let n = self.horizon;
        self.check_disturbances(r)?;
        if y_d.len() != n {
            return Err(IlcError::SequenceLength {
                what: "reference",
                expected: n,
                got: y_d.len(),
            });
        }
        let (n_i, n_o, n_s) = (self.input_dim(), self.output_dim(), self.state_dim());
        for y in y_d {
            if y.dim() != n_o {
                return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                    op: "reference sample",
                    left: (n_o, 1),
                    right: (y.dim(), 1),
                }));
            }
        }

        // Markov blocks G_0 … G_{N-1} and the output maps C·A^j
        let mut markov = Vec::with_capacity(n);
        for i in 0..n {
            markov.push(self.markov(i + r - 1)?);
        }
        let mut g = Matrix::zeros(n * n_o, n * n_i);
        for bi in 0..n {
            for bj in 0..=bi {
                let block = &markov[bi - bj];
                for a in 0..n_o {
                    for b in 0..n_i {
                        g.set(bi * n_o + a, bj * n_i + b, block.get(a, b));
                    }
                }
            }
        }

        // C·A^j for j = 0 … r+N−1, shared by X₀ and D
        let mut c_apow = Vec::with_capacity(r + n);
        let mut power = Matrix::identity(n_s);
        for _ in 0..(r + n) {
            c_apow.push(self.c.matmul(&power)?);
            power = power.matmul(&self.a)?;
        }

        let x0_term = {
            let mut parts = Vec::with_capacity(n);
            for t in 0..n {
                parts.push(c_apow[r + t].matvec(&self.x0)?);
            }
            Vector::stack(&parts)
        };

        // D block (i, j) = C·A^{r−1+i−j} for j ≤ r−1+i
        let n_wcols = n + r - 1;
        let mut d = Matrix::zeros(n * n_o, n_wcols * n_s);
        for bi in 0..n {
            for bj in 0..n_wcols {
                if bj > r - 1 + bi {
                    continue;
                }
                let block = &c_apow[r - 1 + bi - bj];
                for a in 0..n_o {
                    for b in 0..n_s {
                        d.set(bi * n_o + a, bj * n_s + b, block.get(a, b));
                    }
                }
            }
        }

        let w_super = if self.w.is_empty() {
            Vector::zeros(n_wcols * n_s)
        } else {
            Vector::stack(&self.w)
        };
        let v_super = if self.v.is_empty() {
            Vector::zeros(n * n_o)
        } else {
            Vector::stack(&self.v)
        };
        let y_tilde_d = Vector::stack(y_d)
            .sub(&x0_term)?
            .sub(&d.matvec(&w_super)?)?
            .sub(&v_super)?;

        Ok(LiftedSystem {
            relative_degree: r,
            g,
            d,
            x0_term,
            y_tilde_d,
        })
    }

    /// Runs `iters` trials of the updating law `U_{k+1} = U_k + F·(Y_d −
    /// Y_k)`, measuring each trial in the time domain. Records input and
    /// output supervectors and the tracking error
    /// `e_k = max_t ‖y_d(t) − y_k(t)‖₂` for `k = 0 … iters`.
    pub fn run_ilc(
        &self,
        y_d: &[Vector],
        f: &Matrix,
        u0: &[Vector],
        iters: usize,
    ) -> Result<IlcRun, IlcError> {
        let n = self.horizon;
        let (n_i, n_o) = (self.input_dim(), self.output_dim());
        self.check_inputs(u0)?;
        if y_d.len() != n {
            return Err(IlcError::SequenceLength {
                what: "reference",
                expected: n,
                got: y_d.len(),
            });
        }
        if f.rows() != n * n_i || f.cols() != n * n_o {
            return Err(IlcError::Lalg(LalgError::DimensionMismatch {
                op: "ilc gain",
                left: (n * n_i, n * n_o),
                right: (f.rows(), f.cols()),
            }));
        }

        let y_d_super = Vector::stack(y_d);
        let mut u: Vec<Vector> = u0.to_vec();
        let mut inputs = Vec::with_capacity(iters + 1);
        let mut outputs = Vec::with_capacity(iters + 1);
        let mut errors = Vec::with_capacity(iters + 1);

        // overflow inside a trial or an update means the law diverges
        let diverged = |e: IlcError, k: usize| match e {
            IlcError::Lalg(LalgError::NonFinite) => IlcError::NonFinite { iteration: k },
            other => other,
        };

        for k in 0..=iters {
            let y = self.simulate_time_domain(&u).map_err(|e| diverged(e, k))?;
            let mut err: f64 = 0.0;
            for (yt, yd_t) in y.iter().zip(y_d) {
                err = err.max(yd_t.sub(yt)?.norm2());
            }
            let y_super = Vector::stack(&y);
            inputs.push(Vector::stack(&u));
            outputs.push(y_super.clone());
            errors.push(err);
            if k == iters {
                break;
            }
            let update = f
                .matvec(&y_d_super.sub(&y_super)?)
                .map_err(|e| diverged(e.into(), k + 1))?;
            let mut next = Vec::with_capacity(n);
            for (t, u_t) in u.iter().enumerate() {
                let slice: Vec<f64> = (0..n_i).map(|i| update.get(t * n_i + i)).collect();
                let u_next = u_t
                    .add(&Vector::from_raw(slice))
                    .map_err(|e| diverged(e.into(), k + 1))?;
                next.push(u_next);
            }
            u = next;
        }

        Ok(IlcRun {
            inputs,
            outputs,
            tracking_errors: errors,
            iterations: iters,
        })
    }
}

/// Supervector form of a plant over its horizon.
#[derive(Debug, Clone)]
pub struct LiftedSystem {
    pub relative_degree: usize,
    /// `N·n_o × N·n_i` block lower-triangular Toeplitz of Markov parameters.
    pub g: Matrix,
    /// Disturbance-to-output map (`N·n_o × (N+r−1)·n_s`).
    pub d: Matrix,
    /// Stacked `C·A^{r+t}·x0`.
    pub x0_term: Vector,
    /// `Y_d − X₀ − D·W − V`: the right-hand side of the lifted equation.
    pub y_tilde_d: Vector,
}

/// Record of an ILC run: supervectors and tracking errors per iteration
/// (index 0 is the initial input before any update).
#[derive(Debug, Clone)]
pub struct IlcRun {
    pub inputs: Vec<Vector>,
    pub outputs: Vec<Vector>,
    pub tracking_errors: Vec<f64>,
    pub iterations: usize,
}

/// Block-diagonal Kronecker lift `I_N ⊗ F₀` of a per-step gain.
pub fn ptype_gain(f0: &Matrix, n: usize) -> Matrix {
    let (r, c) = (f0.rows(), f0.cols());
    let mut f = Matrix::zeros(n * r, n * c);
    for t in 0..n {
        for i in 0..r {
            for j in 0..c {
                f.set(t * r + i, t * c + j, f0.get(i, j));
            }
        }
    }
    f
}

/// A ready-made tracking experiment: an unstable chain plant with
/// sinusoidal disturbance and reference over a 30-step horizon.
pub fn example_plant() -> (LtiPlant, Vec<Vector>) {
    let a = Matrix::from_rows(&[
        vec![1.0, 1.0, 0.0],
        vec![0.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0],
    ])
    .unwrap();
    let b = Matrix::from_rows(&[vec![1.0, -1.0], vec![2.0, -2.0], vec![0.0, 0.0]]).unwrap();
    let c = Matrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0]]).unwrap();
    let x0 = Vector::new(vec![1.0, 0.0, 0.0]).unwrap();
    let n = 30usize;
    // relative degree is 1: windows are t = 1 … 30 for v and y_d,
    // t = 0 … 29 for w
    let w = (0..n).map(|_| Vector::zeros(3)).collect();
    let v = (1..=n)
        .map(|t| {
            let t = t as f64;
            Vector::new(vec![
                2.0 * (0.2 * t + 1.0).sin() - 1.0,
                2.0 * (0.2 * t).sin(),
            ])
            .unwrap()
        })
        .collect();
    let y_d = (1..=n)
        .map(|t| {
            let t = t as f64;
            Vector::new(vec![2.0 * (0.2 * t + 1.0).sin(), 2.0 * (0.2 * t).sin()]).unwrap()
        })
        .collect();
    let plant = LtiPlant::new(a, b, c, x0, n)
        .unwrap()
        .with_disturbances(w, v);
    (plant, y_d)
}
