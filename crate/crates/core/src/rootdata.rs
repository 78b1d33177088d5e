//! Kac-Moody matrices, root generating systems and coweight arithmetic.
//!
//! A root generating system fixes a Kac-Moody matrix `C`, an ambient
//! lattice `Y = Z^n` of cocharacters, simple roots `alpha_i` (integer
//! linear forms on `Y`) and simple coroots `alpha_i_vee in Y`, compatible
//! via `alpha_j(alpha_i_vee) = c_{i,j}`. Everything downstream — Weyl
//! orbits, Hecke paths, monoid bases, series monomials — computes inside
//! `V = Y tensor R` with exact rational coordinates.
//!
//! The module also houses the derived sublattices: the coroot span with
//! its dominance preorders, the inessential subspace
//! `V_in = cap ker alpha_i`, and the canonical splitting of `Y + V_in`
//! used by translation arguments.

use crate::linalg;
use crate::rational::{format_rat, is_integer, Rat};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Errors raised while loading or computing with root data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootDataError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("diagonal entry c[{index}][{index}] must be 2")]
    BadDiagonal { index: usize },
    #[error("off-diagonal entry c[{row}][{col}] must be <= 0")]
    PositiveOffDiagonal { row: usize, col: usize },
    #[error("exactly one of c[{row}][{col}] and c[{col}][{row}] is zero")]
    BrokenZeroSymmetry { row: usize, col: usize },
    #[error("{what} has wrong dimensions")]
    DimensionMismatch { what: &'static str },
    #[error("pairing alpha_{j}(alpha_{i}_vee) = {got}, expected c[{i}][{j}] = {want}")]
    IncompatiblePairing {
        i: usize,
        j: usize,
        got: i64,
        want: i64,
    },
    #[error("the simple roots are linearly dependent")]
    DependentRoots,
    #[error("the simple coroots are linearly dependent")]
    DependentCoroots,
    #[error("vector is not in the rational span of the simple coroots")]
    NotInQveeSpan,
    #[error("vector is not in Y + V_in")]
    NotInYPlusVin,
    #[error("malformed root datum JSON: {0}")]
    Json(String),
}

/// A generalized Cartan matrix: `2` on the diagonal, nonpositive
/// off-diagonal entries, symmetric vanishing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KacMoodyMatrix {
    entries: Vec<Vec<i64>>,
}

impl KacMoodyMatrix {
    /// Validates the three axioms; the error names the first violation.
    pub fn validate(entries: Vec<Vec<i64>>) -> Result<Self, RootDataError> {
        let k = entries.len();
        if entries.iter().any(|row| row.len() != k) {
            return Err(RootDataError::NotSquare);
        }
        for i in 0..k {
            if entries[i][i] != 2 {
                return Err(RootDataError::BadDiagonal { index: i });
            }
        }
        for i in 0..k {
            for j in 0..k {
                if i != j && entries[i][j] > 0 {
                    return Err(RootDataError::PositiveOffDiagonal { row: i, col: j });
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                if (entries[i][j] == 0) != (entries[j][i] == 0) {
                    return Err(RootDataError::BrokenZeroSymmetry { row: i, col: j });
                }
            }
        }
        Ok(KacMoodyMatrix { entries })
    }

    /// Number of indices (size of `I`).
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Connected components of the Coxeter graph (indices linked when
    /// `c_{i,j} != 0`). A component of size >= 2 is an indecomposable
    /// block of rank >= 2.
    pub fn indecomposable_components(&self) -> Vec<Vec<usize>> {
        let k = self.size();
        let mut seen = vec![false; k];
        let mut comps = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for j in 0..k {
                    if !seen[j] && i != j && self.entries[i][j] != 0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

/// A point of `V = Y tensor R`, held with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoweightVector {
    coords: Vec<Rat>,
}

impl CoweightVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        CoweightVector { coords }
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        CoweightVector {
            coords: xs.iter().map(|&x| crate::rational::rat_int(x)).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        CoweightVector {
            coords: vec![Rat::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// True when every coordinate is an integer, i.e. the point lies in `Y`.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(is_integer)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        CoweightVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        CoweightVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CoweightVector {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, f: &Rat) -> Self {
        CoweightVector {
            coords: self.coords.iter().map(|a| a * f).collect(),
        }
    }
}

impl fmt::Display for CoweightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rat).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Which cone the dominance comparison uses: the integer cone
/// `Q_vee_+ = sum N alpha_i_vee` or its rational relaxation
/// `Q_vee_{R+} = sum R_+ alpha_i_vee`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceFlavor {
    IntegerCone,
    RationalCone,
}

/// Wire format for a root datum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootDatumJson {
    pub matrix: Vec<Vec<i64>>,
    pub ambient_rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
}

/// A validated root generating system together with its derived lattices.
#[derive(Debug, Clone)]
pub struct RootGeneratingSystem {
    matrix: KacMoodyMatrix,
    ambient_rank: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    /// Z-basis of `Y_in = Y cap V_in`; also a Q-basis of `V_in`.
    yin_basis: Vec<Vec<BigInt>>,
    /// Completes `yin_basis` to a Z-basis of `Y`.
    yin_complement: Vec<Vec<BigInt>>,
}

impl RootGeneratingSystem {
    /// Builds and validates a system from raw data.
    pub fn new(
        matrix: KacMoodyMatrix,
        ambient_rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    ) -> Result<Self, RootDataError> {
        let k = matrix.size();
        if simple_roots.len() != k || simple_roots.iter().any(|r| r.len() != ambient_rank) {
            return Err(RootDataError::DimensionMismatch {
                what: "simple_roots",
            });
        }
        if simple_coroots.len() != k || simple_coroots.iter().any(|r| r.len() != ambient_rank) {
            return Err(RootDataError::DimensionMismatch {
                what: "simple_coroots",
            });
        }
        for i in 0..k {
            for j in 0..k {
                let got: i64 = (0..ambient_rank)
                    .map(|l| simple_roots[j][l] * simple_coroots[i][l])
                    .sum();
                if got != matrix.entry(i, j) {
                    return Err(RootDataError::IncompatiblePairing {
                        i,
                        j,
                        got,
                        want: matrix.entry(i, j),
                    });
                }
            }
        }
        let root_mat: Vec<Vec<Rat>> = simple_roots
            .iter()
            .map(|r| r.iter().map(|&x| crate::rational::rat_int(x)).collect())
            .collect();
        if linalg::q_rank(&root_mat) != k {
            return Err(RootDataError::DependentRoots);
        }
        let coroot_mat: Vec<Vec<Rat>> = simple_coroots
            .iter()
            .map(|r| r.iter().map(|&x| crate::rational::rat_int(x)).collect())
            .collect();
        if linalg::q_rank(&coroot_mat) != k {
            return Err(RootDataError::DependentCoroots);
        }

        // Y_in = integer kernel of the root matrix (rows = forms).
        let root_mat_int: Vec<Vec<BigInt>> = simple_roots
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let yin_basis = linalg::i_kernel(&root_mat_int);
        let yin_complement = linalg::complete_lattice_basis(&yin_basis, ambient_rank);

        Ok(RootGeneratingSystem {
            matrix,
            ambient_rank,
            simple_roots,
            simple_coroots,
            yin_basis,
            yin_complement,
        })
    }

    /// The canonical system attached to a Kac-Moody matrix: ambient rank
    /// `2k`, `alpha_i` the i-th coordinate form, and
    /// `alpha_i_vee = sum_j c_{i,j} e_j + e_{i+k}`. For this system
    /// `P_vee = Y + V_in`.
    pub fn canonical(matrix: KacMoodyMatrix) -> Self {
        let k = matrix.size();
        let n = 2 * k;
        let simple_roots: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..n).map(|l| if l == i { 1 } else { 0 }).collect())
            .collect();
        let simple_coroots: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..n)
                    .map(|l| {
                        if l < k {
                            matrix.entry(i, l)
                        } else if l == k + i {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(matrix, n, simple_roots, simple_coroots)
            .expect("canonical datum always satisfies the axioms")
    }

    pub fn from_json(json: &RootDatumJson) -> Result<Self, RootDataError> {
        let matrix = KacMoodyMatrix::validate(json.matrix.clone())?;
        Self::new(
            matrix,
            json.ambient_rank,
            json.simple_roots.clone(),
            json.simple_coroots.clone(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self, RootDataError> {
        let json: RootDatumJson =
            serde_json::from_str(s).map_err(|e| RootDataError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> RootDatumJson {
        RootDatumJson {
            matrix: self.matrix.entries().to_vec(),
            ambient_rank: self.ambient_rank,
            simple_roots: self.simple_roots.clone(),
            simple_coroots: self.simple_coroots.clone(),
        }
    }

    pub fn matrix(&self) -> &KacMoodyMatrix {
        &self.matrix
    }

    /// Size of the index set `I`.
    pub fn index_count(&self) -> usize {
        self.matrix.size()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn simple_root_form(&self, i: usize) -> &[i64] {
        &self.simple_roots[i]
    }

    /// The simple coroot `alpha_i_vee` as a point of `V`.
    pub fn simple_coroot(&self, i: usize) -> CoweightVector {
        CoweightVector::from_ints(&self.simple_coroots[i])
    }

    /// `alpha_i(v)`.
    pub fn root_value(&self, i: usize, v: &CoweightVector) -> Rat {
        assert_eq!(v.dim(), self.ambient_rank);
        self.simple_roots[i]
            .iter()
            .zip(v.coords())
            .fold(Rat::zero(), |acc, (&a, x)| {
                acc + x * crate::rational::rat_int(a)
            })
    }

    /// The tuple `(alpha_i(v))_{i in I}`.
    pub fn alpha_values(&self, v: &CoweightVector) -> Vec<Rat> {
        (0..self.index_count())
            .map(|i| self.root_value(i, v))
            .collect()
    }

    /// Evaluates an integer combination of simple roots on `v`.
    pub fn form_value(&self, form_coeffs: &[i64], v: &CoweightVector) -> Rat {
        form_coeffs
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (i, &c)| {
                if c == 0 {
                    acc
                } else {
                    acc + self.root_value(i, v) * crate::rational::rat_int(c)
                }
            })
    }

    /// Dimension of `V_in = cap ker alpha_i` (equals the rank of `Y_in`).
    pub fn inessential_dim(&self) -> usize {
        self.yin_basis.len()
    }

    /// Z-basis of `Y_in` as coweight vectors.
    pub fn yin_basis(&self) -> Vec<CoweightVector> {
        self.yin_basis
            .iter()
            .map(|b| CoweightVector::new(b.iter().map(|x| Rat::from_integer(x.clone())).collect()))
            .collect()
    }

    /// Is `v` in the coweight "lattice" `P_vee` (all `alpha_i(v)` integral)?
    pub fn in_pvee(&self, v: &CoweightVector) -> bool {
        (0..self.index_count()).all(|i| is_integer(&self.root_value(i, v)))
    }

    /// Solves `v = sum_i x_i alpha_i_vee` exactly over `Q`.
    pub fn qvee_decompose(&self, v: &CoweightVector) -> Result<Vec<Rat>, RootDataError> {
        assert_eq!(v.dim(), self.ambient_rank);
        // columns = coroots
        let a: Vec<Vec<Rat>> = (0..self.ambient_rank)
            .map(|l| {
                (0..self.index_count())
                    .map(|i| crate::rational::rat_int(self.simple_coroots[i][l]))
                    .collect()
            })
            .collect();
        linalg::q_solve(&a, v.coords()).ok_or(RootDataError::NotInQveeSpan)
    }

    /// Height `h(v) = sum of coroot coordinates`, defined on the coroot span.
    pub fn height(&self, v: &CoweightVector) -> Result<Rat, RootDataError> {
        Ok(self
            .qvee_decompose(v)?
            .into_iter()
            .fold(Rat::zero(), |acc, x| acc + x))
    }

    /// Dominance `x <= y` iff `y - x` lies in the chosen positive cone.
    /// Returns `false` when `y - x` is not even in the coroot span.
    pub fn qvee_leq(
        &self,
        x: &CoweightVector,
        y: &CoweightVector,
        flavor: DominanceFlavor,
    ) -> bool {
        match self.qvee_decompose(&y.sub(x)) {
            Err(_) => false,
            Ok(coeffs) => coeffs.iter().all(|c| {
                !c.is_negative()
                    && match flavor {
                        DominanceFlavor::RationalCone => true,
                        DominanceFlavor::IntegerCone => is_integer(c),
                    }
            }),
        }
    }

    /// Builds `sum_i coeffs_i alpha_i_vee` as a point of `V`.
    pub fn coweight_from_coroot_coords(&self, coeffs: &[Rat]) -> CoweightVector {
        assert_eq!(coeffs.len(), self.index_count());
        let mut out = CoweightVector::zero(self.ambient_rank);
        for (i, c) in coeffs.iter().enumerate() {
            out = out.add(&self.simple_coroot(i).scale(c));
        }
        out
    }

    pub fn coweight_from_coroot_ints(&self, coeffs: &[i64]) -> CoweightVector {
        let rs: Vec<Rat> = coeffs
            .iter()
            .map(|&c| crate::rational::rat_int(c))
            .collect();
        self.coweight_from_coroot_coords(&rs)
    }

    /// Membership in `Y + V_in`.
    pub fn in_y_plus_vin(&self, v: &CoweightVector) -> bool {
        self.integral_alpha_match(v).is_some()
    }

    /// Finds `y in Y` with `alpha(y) = alpha(v)`, when the alpha values are
    /// integral and an integral solution exists.
    fn integral_alpha_match(&self, v: &CoweightVector) -> Option<Vec<BigInt>> {
        let t: Option<Vec<BigInt>> = self
            .alpha_values(v)
            .into_iter()
            .map(|x| {
                if is_integer(&x) {
                    Some(x.to_integer())
                } else {
                    None
                }
            })
            .collect();
        let a: Vec<Vec<BigInt>> = self
            .simple_roots
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        linalg::i_solve(&a, &t?)
    }

    /// Splits `lambda in Y + V_in` as `lambda = lambda_in + Lambda` with
    /// `lambda_in in V_in` and `Lambda in Y`.
    ///
    /// The splitting is made canonical by reducing the inessential part
    /// into the fundamental box `[0,1)^k` of `Y_in` in its computed basis;
    /// in particular integral `lambda` returns `(0, lambda)`.
    pub fn inessential_decompose(
        &self,
        lambda: &CoweightVector,
    ) -> Result<(CoweightVector, CoweightVector), RootDataError> {
        let y = self
            .integral_alpha_match(lambda)
            .ok_or(RootDataError::NotInYPlusVin)?;
        let y = CoweightVector::new(y.iter().map(|x| Rat::from_integer(x.clone())).collect());
        let v0 = lambda.sub(&y); // in V_in
        if self.yin_basis.is_empty() {
            debug_assert!(v0.is_zero());
            return Ok((CoweightVector::zero(self.ambient_rank), y));
        }
        // coordinates of v0 over the Y_in basis
        let a: Vec<Vec<Rat>> = (0..self.ambient_rank)
            .map(|l| {
                self.yin_basis
                    .iter()
                    .map(|b| Rat::from_integer(b[l].clone()))
                    .collect()
            })
            .collect();
        let coords = linalg::q_solve(&a, v0.coords()).expect("v0 lies in V_in by construction");
        let mut lambda_in = CoweightVector::zero(self.ambient_rank);
        for (c, b) in coords.iter().zip(&self.yin_basis) {
            let frac = c - c.floor();
            if frac.is_zero() {
                continue;
            }
            let bv = CoweightVector::new(b.iter().map(|x| Rat::from_integer(x.clone())).collect());
            lambda_in = lambda_in.add(&bv.scale(&frac));
        }
        let big = lambda.sub(&lambda_in);
        debug_assert!(big.is_integral());
        Ok((lambda_in, big))
    }

    /// Canonical representative of `y + Y_in` inside the fixed lattice
    /// complement of `Y_in` in `Y`. Input must be integral.
    pub fn reduce_mod_yin(&self, y: &CoweightVector) -> CoweightVector {
        assert!(y.is_integral());
        if self.yin_basis.is_empty() {
            return y.clone();
        }
        // coordinates over [yin_basis | complement]
        let full: Vec<&Vec<BigInt>> = self.yin_basis.iter().chain(&self.yin_complement).collect();
        let a: Vec<Vec<Rat>> = (0..self.ambient_rank)
            .map(|l| {
                full.iter()
                    .map(|b| Rat::from_integer(b[l].clone()))
                    .collect()
            })
            .collect();
        let coords = linalg::q_solve(&a, y.coords()).expect("full basis of V");
        let mut out = CoweightVector::zero(self.ambient_rank);
        for (c, b) in coords
            .iter()
            .skip(self.yin_basis.len())
            .zip(&self.yin_complement)
        {
            debug_assert!(is_integer(c), "integral point over a Z-basis");
            let bv = CoweightVector::new(b.iter().map(|x| Rat::from_integer(x.clone())).collect());
            out = out.add(&bv.scale(c));
        }
        out
    }

    /// Cartan pairing `alpha_j(alpha_i_vee)` read back from the stored data.
    pub fn pairing(&self, i: usize, j: usize) -> i64 {
        (0..self.ambient_rank)
            .map(|l| self.simple_roots[j][l] * self.simple_coroots[i][l])
            .sum()
    }

    /// True when every `alpha_i(v) >= 0`.
    pub fn is_dominant(&self, v: &CoweightVector) -> bool {
        (0..self.index_count()).all(|i| !self.root_value(i, v).is_negative())
    }
}

/// Convenience constructors for the small systems used throughout the
/// test suites and the command line examples.
pub mod presets {
    use super::*;

    /// Simply-connected SL2: `Y = Z alpha_vee`, `alpha(alpha_vee) = 2`.
    pub fn sl2_simply_connected() -> RootGeneratingSystem {
        let m = KacMoodyMatrix::validate(vec![vec![2]]).unwrap();
        RootGeneratingSystem::new(m, 1, vec![vec![2]], vec![vec![1]]).unwrap()
    }

    /// Simply-connected A1 x A1: `Y = Z^2`, coroots the unit vectors.
    pub fn a1xa1_simply_connected() -> RootGeneratingSystem {
        let m = KacMoodyMatrix::validate(vec![vec![2, 0], vec![0, 2]]).unwrap();
        RootGeneratingSystem::new(
            m,
            2,
            vec![vec![2, 0], vec![0, 2]],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap()
    }

    /// Simply-connected A2: coroots the unit vectors of `Z^2`.
    pub fn a2_simply_connected() -> RootGeneratingSystem {
        let m = KacMoodyMatrix::validate(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        RootGeneratingSystem::new(
            m,
            2,
            vec![vec![2, -1], vec![-1, 2]],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap()
    }

    /// Canonical datum of the affine matrix of sl2-hat.
    pub fn sl2_affine_canonical() -> RootGeneratingSystem {
        let m = KacMoodyMatrix::validate(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        RootGeneratingSystem::canonical(m)
    }
}

/// Decimal value of a rational that is known to fit an `i64`.
pub fn rat_to_i64(x: &Rat) -> Option<i64> {
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}
