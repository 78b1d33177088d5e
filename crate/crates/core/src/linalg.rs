//! Small exact linear algebra over `Q` and `Z`.
//!
//! Sizes here are tiny (ambient ranks up to ~10), so everything is
//! straightforward elimination. The integer routines work with a
//! column-style Hermite echelon form `H = A * U` with `U` unimodular,
//! which gives integer kernels, integer system solving and lattice
//! membership in one place.

use crate::rational::Rat;
use num::{BigInt, One, Signed, Zero};

// ---------------------------------------------------------------------------
// rational matrices (row-major Vec<Vec<Rat>>)
// ---------------------------------------------------------------------------

pub fn q_identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn q_mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let (m, k) = (a.len(), b.len());
    let n = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Rat::zero(); n]; m];
    for i in 0..m {
        debug_assert_eq!(a[i].len(), k);
        for (l, b_row) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                let t = &a[i][l] * &b_row[j];
                out[i][j] += t;
            }
        }
    }
    out
}

pub fn q_mat_vec(a: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), v.len());
            row.iter()
                .zip(v)
                .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn q_rref(a: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn q_rank(a: &[Vec<Rat>]) -> usize {
    let mut w = a.to_vec();
    q_rref(&mut w).len()
}

/// A particular rational solution of `A x = b`, if the system is consistent.
pub fn q_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = q_rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of the rational kernel of `A` (as column vectors of length `cols`).
pub fn q_kernel(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut w = a.to_vec();
    let pivots = q_rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square rational matrix.
pub fn q_det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut w = a.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            w.swap(c, p);
            det = -det;
        }
        det *= w[c][c].clone();
        let inv = w[c][c].clone();
        for i in c + 1..n {
            if !w[i][c].is_zero() {
                let f = &w[i][c] / &inv;
                for j in c..n {
                    let t = &f * &w[c][j];
                    w[i][j] -= t;
                }
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// integer matrices (row-major Vec<Vec<BigInt>>)
// ---------------------------------------------------------------------------

pub fn i_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn addmul_col(a: &mut [Vec<BigInt>], dst: usize, src: usize, f: &BigInt) {
    for row in a.iter_mut() {
        let t = &row[src] * f;
        row[dst] += t;
    }
}

fn negate_col(a: &mut [Vec<BigInt>], j: usize) {
    for row in a.iter_mut() {
        let v = -row[j].clone();
        row[j] = v;
    }
}

/// `(h, u, pivots)` as produced by [`col_echelon`].
pub type ColEchelon = (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<(usize, usize)>);

/// Column echelon form of an integer matrix.
///
/// Returns `(h, u, pivots)` with `h = a * u`, `u` unimodular, and
/// `pivots[k] = (row, col)` the staircase positions of `h` (positive
/// pivot entries, zero to their right in the pivot row).
pub fn col_echelon(a: &[Vec<BigInt>]) -> ColEchelon {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut h = a.to_vec();
    let mut u = i_identity(cols);
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..rows {
        if c >= cols {
            break;
        }
        // gcd loop: clear row r to a single entry at column c
        loop {
            let mut best: Option<usize> = None;
            for j in c..cols {
                if !h[r][j].is_zero()
                    && best.is_none_or(|b| h[r][j].magnitude() < h[r][b].magnitude())
                {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            if b != c {
                swap_cols(&mut h, c, b);
                swap_cols(&mut u, c, b);
            }
            let mut done = true;
            for j in c + 1..cols {
                if h[r][j].is_zero() {
                    continue;
                }
                let q = div_round(&h[r][j], &h[r][c]);
                if !q.is_zero() {
                    let f = -q;
                    addmul_col(&mut h, j, c, &f);
                    addmul_col(&mut u, j, c, &f);
                }
                if !h[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[r][c].is_zero() {
            if h[r][c].is_negative() {
                negate_col(&mut h, c);
                negate_col(&mut u, c);
            }
            pivots.push((r, c));
            c += 1;
        }
    }
    (h, u, pivots)
}

/// Integer division rounded toward the nearest quotient (ties toward zero);
/// keeps remainders small during the gcd loop.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = num::Integer::div_rem(n, d);
    let two_r = num::BigUint::from(2u32) * r.magnitude();
    if &two_r > d.magnitude() {
        if (n.is_negative()) ^ (d.is_negative()) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Basis of the integer kernel `{ x : A x = 0 }` (column vectors).
pub fn i_kernel(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let (_, u, pivots) = col_echelon(a);
    let first_free = pivots.len();
    (first_free..cols)
        .map(|j| (0..cols).map(|i| u[i][j].clone()).collect())
        .collect()
}

/// Reusable integer-system solver: factor once, solve many right sides.
pub struct EchelonSolver {
    h: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    pivots: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
}

impl EchelonSolver {
    pub fn new(a: &[Vec<BigInt>]) -> Self {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let (h, u, pivots) = col_echelon(a);
        EchelonSolver {
            h,
            u,
            pivots,
            rows,
            cols,
        }
    }

    /// An integer solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(self.rows, b.len());
        let mut residual = b.to_vec();
        let mut y = vec![BigInt::zero(); self.cols];
        let mut pi = 0;
        for r in 0..self.rows {
            if pi < self.pivots.len() && self.pivots[pi].0 == r {
                let c = self.pivots[pi].1;
                let (q, rem) = num::Integer::div_rem(&residual[r], &self.h[r][c]);
                if !rem.is_zero() {
                    return None;
                }
                for (i, res) in residual.iter_mut().enumerate() {
                    let t = &q * &self.h[i][c];
                    *res -= t;
                }
                y[c] = q;
                pi += 1;
            } else if !residual[r].is_zero() {
                return None;
            }
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return None;
        }
        // x = U y
        let x = (0..self.cols)
            .map(|i| {
                (0..self.cols)
                    .map(|j| &self.u[i][j] * &y[j])
                    .fold(BigInt::zero(), |acc, t| acc + t)
            })
            .collect();
        Some(x)
    }
}

/// An integer solution of `A x = b`, if one exists.
pub fn i_solve(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    EchelonSolver::new(a).solve(b)
}

/// Completes a basis of a saturated sublattice to a basis of `Z^n`.
///
/// `basis` holds the sublattice basis as column vectors of length `n`.
/// Preference is given to the lexicographically first subset of the
/// ambient basis vectors `e_j` that yields a unimodular completion; if no
/// ambient subset works, the completion is read off the echelon transform.
pub fn complete_lattice_basis(basis: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = basis.len();
    if k == n {
        return Vec::new();
    }
    let want = n - k;
    // try ambient subsets in lexicographic order
    let mut choice: Vec<usize> = (0..want).collect();
    loop {
        let mut m: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
        for (j, col) in basis.iter().enumerate() {
            for i in 0..n {
                m[i][j] = Rat::from_integer(col[i].clone());
            }
        }
        for (j, &e) in choice.iter().enumerate() {
            m[e][k + j] = Rat::one();
        }
        let d = q_det(&m);
        if d.numer().magnitude().is_one() && d.denom().is_one() {
            return choice
                .iter()
                .map(|&e| {
                    (0..n)
                        .map(|i| {
                            if i == e {
                                BigInt::one()
                            } else {
                                BigInt::zero()
                            }
                        })
                        .collect()
                })
                .collect();
        }
        // next subset
        let mut pos = want;
        loop {
            if pos == 0 {
                // fall back: echelon transform of the transposed basis
                return complete_via_echelon(basis, n);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] <= n - (want - pos) {
                for p in pos + 1..want {
                    choice[p] = choice[p - 1] + 1;
                }
                break;
            }
        }
    }
}

fn complete_via_echelon(basis: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    // Row-reduce transpose(B): V * B^T ... equivalently run col_echelon on the
    // matrix whose rows are indexed by ambient coordinates. With B saturated,
    // [B | C] is unimodular where C collects the non-pivot columns of the
    // inverse transform; we recover C by solving over Q and clearing to Z.
    let k = basis.len();
    let b_mat: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..k).map(|j| basis[j][i].clone()).collect())
        .collect();
    let (h, _u, pivots) = col_echelon(&b_mat);
    debug_assert_eq!(pivots.len(), k);
    // rows without a pivot in H are the coordinates not reached; the ambient
    // vectors at those rows complete the basis whenever H's pivots are 1,
    // which holds for saturated sublattices. Assert and use them.
    for &(r, c) in &pivots {
        assert!(
            h[r][c].is_one(),
            "sublattice is not saturated; cannot complete basis"
        );
    }
    let pivot_rows: Vec<usize> = pivots.iter().map(|p| p.0).collect();
    (0..n)
        .filter(|r| !pivot_rows.contains(r))
        .map(|r| {
            (0..n)
                .map(|i| {
                    if i == r {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}
