//! Seeded randomness for benchmarks and test-problem generation.
//!
//! The generator is a plain 64-bit linear-congruential generator so that any
//! implementation, in any language, can reproduce the exact same problem
//! stream from a seed:
//!
//! ```text
//! state ← state × 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! ```
//!
//! Doubles are drawn as `(state >> 11) / 2^53 ∈ [0, 1)`; symmetric draws map
//! that to `[-1, 1)`.

use crate::lalg::{rref, Matrix, Vector, DEFAULT_TOL};

const LCG_MUL: u64 = 6364136223846793005;
const LCG_INC: u64 = 1442695040888963407;

/// 64-bit linear-congruential generator (Knuth's MMIX constants).
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_INC);
        self.state
    }

    /// Uniform draw from `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform draw from `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn next_range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(hi >= lo);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.next_symmetric()).collect();
        Matrix::new(rows, cols, data).expect("finite by construction")
    }

    pub fn vector(&mut self, dim: usize) -> Vector {
        Vector::new((0..dim).map(|_| self.next_symmetric()).collect()).expect("finite")
    }
}

/// Rank structure of a generated test problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankClass {
    FullColumn,
    FullRow,
    Deficient,
}

impl RankClass {
    pub fn parse(s: &str) -> Option<RankClass> {
        match s {
            "full-col" => Some(RankClass::FullColumn),
            "full-row" => Some(RankClass::FullRow),
            "deficient" => Some(RankClass::Deficient),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RankClass::FullColumn => "full-col",
            RankClass::FullRow => "full-row",
            RankClass::Deficient => "deficient",
        }
    }
}

/// Draws a `p × q` matrix of exact rank `m ≤ min(p, q)`, re-drawing
/// (deterministically) in the measure-zero event that the numerical rank
/// misses the target. Rank-deficient targets are built as products of
/// full-rank factors.
pub fn random_matrix_with_rank(rng: &mut Lcg64, p: usize, q: usize, m: usize) -> Matrix {
    assert!(m >= 1 && m <= p.min(q), "rank must be in [1, min(p, q)]");
    loop {
        let g = if m == p.min(q) {
            rng.matrix(p, q)
        } else {
            let left = rng.matrix(p, m);
            let right = rng.matrix(m, q);
            left.matmul(&right).expect("shapes match")
        };
        if rref(&g, DEFAULT_TOL).rank == m {
            return g;
        }
    }
}

/// Draws a random matrix of the requested rank class with side lengths in
/// `[2, max_dim]`. Returns the matrix and its rank.
pub fn random_problem_matrix(rng: &mut Lcg64, class: RankClass, max_dim: usize) -> (Matrix, usize) {
    assert!(max_dim >= 3, "need room for distinct side lengths");
    let mut p = rng.next_range(2, max_dim);
    let mut q = rng.next_range(2, max_dim);
    let m = match class {
        RankClass::FullColumn => {
            if p < q {
                std::mem::swap(&mut p, &mut q);
            }
            if p == q {
                p += 1;
            }
            q
        }
        RankClass::FullRow => {
            if q < p {
                std::mem::swap(&mut p, &mut q);
            }
            if q == p {
                q += 1;
            }
            p
        }
        RankClass::Deficient => {
            let lo = p.min(q);
            if lo > 1 {
                rng.next_range(1, lo - 1)
            } else {
                1
            }
        }
    };
    (random_matrix_with_rank(rng, p, q, m), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_deterministic() {
        let mut a = Lcg64::new(7);
        let mut b = Lcg64::new(7);
        for _ in 0..32 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn doubles_stay_in_range() {
        let mut rng = Lcg64::new(123);
        for _ in 0..1000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            let s = rng.next_symmetric();
            assert!((-1.0..1.0).contains(&s));
        }
    }

    #[test]
    fn rank_classes_hit_their_targets() {
        let mut rng = Lcg64::new(42);
        for class in [
            RankClass::FullColumn,
            RankClass::FullRow,
            RankClass::Deficient,
        ] {
            for _ in 0..10 {
                let (g, m) = random_problem_matrix(&mut rng, class, 12);
                assert_eq!(rref(&g, DEFAULT_TOL).rank, m);
                match class {
                    RankClass::FullColumn => assert_eq!(m, g.cols()),
                    RankClass::FullRow => assert_eq!(m, g.rows()),
                    RankClass::Deficient => assert!(m < g.rows().min(g.cols())),
                }
            }
        }
    }
}
