//! The dominant-coweight monoid `Y^{++} = Y cap closure(C_f^v)` and its
//! finite generating set.
//!
//! `Y^{++}` splits into the inessential lattice `Y_in = Y cap V_in`
//! (generated as a monoid by a lattice basis and its negatives) and the
//! strictly dominant part, whose indecomposables have a finite set of
//! `alpha`-images by the antichain argument: distinct indecomposables
//! have incomparable images, and every antichain of `N^I` is finite.
//! Saturating a growing `alpha`-value box certifies a bound `B` inside
//! which the computed generators span everything.

use crate::linalg::EchelonSolver;
use crate::rootdata::{CoweightVector, RootGeneratingSystem};
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonoidError {
    #[error("saturation not certified within the bound ceiling {ceiling}")]
    BoundExceeded { ceiling: u32 },
    #[error(
        "element does not decompose over the basis within the certified bound (raise the bound)"
    )]
    NotDecomposable,
    #[error("element is not an integral dominant coweight")]
    NotDominantIntegral,
}

/// Componentwise-minimal elements of a finite subset of `N^l`.
///
/// The result is an antichain for the strict componentwise order, and
/// every input element dominates some returned element.
pub fn dickson_minimals(points: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    for p in points {
        if points
            .iter()
            .any(|q| q != p && q.iter().zip(p).all(|(a, b)| a <= b))
        {
            continue;
        }
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out.sort();
    out
}

/// One strictly dominant generator with its `alpha`-image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictGenerator {
    pub rep: Vec<i64>,
    pub alpha_image: Vec<u64>,
}

/// Finite monoid basis of `Y^{++}`, with the box bound under which the
/// span was certified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidBasis {
    /// `E_1`: a lattice basis of `Y_in` and its negatives.
    pub inessential_gens: Vec<Vec<i64>>,
    /// `E_2`: one representative per minimal `alpha`-image, sorted by image.
    pub strict_gens: Vec<StrictGenerator>,
    /// Inside the box `[0, B]^I` of `alpha`-values the span is exact.
    pub certification_bound: u32,
}

impl MonoidBasis {
    /// All generators as coweight vectors: strict generators first, then
    /// the inessential ones.
    pub fn generators(&self) -> Vec<CoweightVector> {
        self.strict_gens
            .iter()
            .map(|g| CoweightVector::from_ints(&g.rep))
            .chain(
                self.inessential_gens
                    .iter()
                    .map(|g| CoweightVector::from_ints(g)),
            )
            .collect()
    }
}

fn big_to_u64(x: &BigInt) -> u64 {
    use num::ToPrimitive;
    x.to_u64().expect("alpha value fits u64")
}

struct ImageLattice {
    solver: EchelonSolver,
}

impl ImageLattice {
    fn new(sys: &RootGeneratingSystem) -> Self {
        let a: Vec<Vec<BigInt>> = (0..sys.index_count())
            .map(|i| {
                sys.simple_root_form(i)
                    .iter()
                    .map(|&x| BigInt::from(x))
                    .collect()
            })
            .collect();
        ImageLattice {
            solver: EchelonSolver::new(&a),
        }
    }

    /// Some `y in Y` with `alpha(y) = target`, if the image is attained.
    fn preimage(&self, target: &[u64]) -> Option<Vec<BigInt>> {
        let b: Vec<BigInt> = target.iter().map(|&x| BigInt::from(x)).collect();
        self.solver.solve(&b)
    }

    fn contains(&self, target: &[u64]) -> bool {
        self.preimage(target).is_some()
    }
}

/// Odometer over `[0, bound]^len`.
fn for_each_box_point(len: usize, bound: u64, mut f: impl FnMut(&[u64])) {
    let mut cur = vec![0u64; len];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if cur[i] < bound {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Greedy decomposition of an `alpha`-image over the minimal images,
/// taken in ascending lexicographic order with maximal coefficients.
/// Returns the coefficients, or `None` when a nonzero remainder is left.
fn greedy_image_decompose(target: &[u64], minimals: &[Vec<u64>]) -> Option<Vec<u64>> {
    let mut rem = target.to_vec();
    let mut coeffs = vec![0u64; minimals.len()];
    for (k, m) in minimals.iter().enumerate() {
        let mut take = u64::MAX;
        for (r, g) in rem.iter().zip(m) {
            if *g > 0 {
                take = take.min(r / g);
            }
        }
        debug_assert!(take < u64::MAX, "minimal images are nonzero");
        if take > 0 {
            for (r, g) in rem.iter_mut().zip(m) {
                *r -= take * g;
            }
            coeffs[k] = take;
        }
    }
    if rem.iter().all(|&r| r == 0) {
        Some(coeffs)
    } else {
        None
    }
}

/// Computes the monoid basis of `Y^{++}`, growing the search box from
/// `initial_bound` until saturation is certified or `ceiling` is hit.
///
/// Certification: the bound exceeds every coordinate of every minimal
/// image, the next shell contributes no new minimal image, and every
/// image in the box decomposes greedily over the minimals found.
pub fn hilbert_basis(
    sys: &RootGeneratingSystem,
    initial_bound: u32,
    ceiling: u32,
) -> Result<MonoidBasis, MonoidError> {
    let lattice = ImageLattice::new(sys);
    let k = sys.index_count();
    let mut bound = initial_bound.max(1);
    while bound <= ceiling {
        // images of Y^{++} inside the box, except 0
        let mut images: Vec<Vec<u64>> = Vec::new();
        for_each_box_point(k, bound as u64, |p| {
            if p.iter().any(|&x| x > 0) && lattice.contains(p) {
                images.push(p.to_vec());
            }
        });
        let minimals = dickson_minimals(&images);
        let max_coord = minimals
            .iter()
            .flat_map(|m| m.iter())
            .copied()
            .max()
            .unwrap_or(0);
        if (bound as u64) < max_coord + 1 {
            bound += 1;
            continue;
        }
        // shell check: no new minimal in [0, bound+1]^I outside [0, bound]^I
        let mut shell_new = false;
        for_each_box_point(k, bound as u64 + 1, |p| {
            if shell_new || p.iter().all(|&x| x <= bound as u64) {
                return;
            }
            if p.iter().any(|&x| x > 0) && lattice.contains(p) {
                let dominated = minimals
                    .iter()
                    .any(|m| m.iter().zip(p).all(|(a, b)| a <= b));
                if !dominated {
                    shell_new = true;
                }
            }
        });
        if shell_new {
            bound += 1;
            continue;
        }
        // every box image decomposes greedily
        let all_decompose = images
            .iter()
            .all(|img| greedy_image_decompose(img, &minimals).is_some());
        if !all_decompose {
            bound += 1;
            continue;
        }
        // assemble generators
        let strict_gens = minimals
            .iter()
            .map(|m| {
                let pre = lattice.preimage(m).expect("image seen in enumeration");
                let coords: Vec<crate::rational::Rat> = pre
                    .iter()
                    .map(|x| crate::rational::Rat::from_integer(x.clone()))
                    .collect();
                let canon = sys.reduce_mod_yin(&CoweightVector::new(coords));
                StrictGenerator {
                    rep: canon
                        .coords()
                        .iter()
                        .map(|c| crate::rootdata::rat_to_i64(c).expect("integral representative"))
                        .collect(),
                    alpha_image: m.clone(),
                }
            })
            .collect();
        let mut inessential_gens: Vec<Vec<i64>> = Vec::new();
        for b in sys.yin_basis() {
            let as_ints: Vec<i64> = b
                .coords()
                .iter()
                .map(|c| crate::rootdata::rat_to_i64(c).expect("integral basis"))
                .collect();
            inessential_gens.push(as_ints.iter().map(|&x| -x).collect());
            inessential_gens.push(as_ints);
        }
        inessential_gens.sort();
        return Ok(MonoidBasis {
            inessential_gens,
            strict_gens,
            certification_bound: bound,
        });
    }
    Err(MonoidError::BoundExceeded { ceiling })
}

/// Nonnegative integer coefficients writing `lambda` over the basis
/// generators, aligned with [`MonoidBasis::generators`]. Greedy on the
/// strict generators in image order, then the inessential remainder is
/// solved exactly over `E_1`.
pub fn decompose_in_basis(
    sys: &RootGeneratingSystem,
    lambda: &CoweightVector,
    basis: &MonoidBasis,
) -> Result<Vec<u64>, MonoidError> {
    if !lambda.is_integral() || !sys.is_dominant(lambda) {
        return Err(MonoidError::NotDominantIntegral);
    }
    let alpha: Vec<u64> = sys
        .alpha_values(lambda)
        .iter()
        .map(|x| big_to_u64(&x.to_integer()))
        .collect();
    if alpha.iter().any(|&x| x > basis.certification_bound as u64) {
        return Err(MonoidError::NotDecomposable);
    }
    let minimals: Vec<Vec<u64>> = basis
        .strict_gens
        .iter()
        .map(|g| g.alpha_image.clone())
        .collect();
    let strict_coeffs =
        greedy_image_decompose(&alpha, &minimals).ok_or(MonoidError::NotDecomposable)?;
    // inessential remainder
    let mut rem = lambda.clone();
    for (c, g) in strict_coeffs.iter().zip(&basis.strict_gens) {
        if *c > 0 {
            rem = rem.sub(
                &CoweightVector::from_ints(&g.rep).scale(&crate::rational::rat_int(*c as i64)),
            );
        }
    }
    debug_assert!(sys.alpha_values(&rem).iter().all(|x| x.is_zero()));
    let mut out = strict_coeffs;
    let mut iness = vec![0u64; basis.inessential_gens.len()];
    if !rem.is_zero() {
        // coordinates of the remainder over the Y_in lattice basis,
        // dispatched onto the matching signed generator
        let yin = sys.yin_basis();
        let cols: Vec<Vec<crate::rational::Rat>> = (0..sys.ambient_rank())
            .map(|l| yin.iter().map(|b| b.coords()[l].clone()).collect())
            .collect();
        let sol =
            crate::linalg::q_solve(&cols, rem.coords()).ok_or(MonoidError::NotDecomposable)?;
        for (c, b) in sol.iter().zip(&yin) {
            if c.is_zero() {
                continue;
            }
            if !c.denom().is_one() {
                return Err(MonoidError::NotDecomposable);
            }
            let signed = if c.is_negative() { b.neg() } else { b.clone() };
            let as_ints: Vec<i64> = signed
                .coords()
                .iter()
                .map(|x| crate::rootdata::rat_to_i64(x).expect("integral generator"))
                .collect();
            let j = basis
                .inessential_gens
                .iter()
                .position(|g| *g == as_ints)
                .ok_or(MonoidError::NotDecomposable)?;
            let mag: BigInt = c.to_integer().abs();
            iness[j] += big_to_u64(&mag);
        }
    }
    out.extend(iness);
    Ok(out)
}

/// Re-sums a decomposition; used to verify round trips.
pub fn resum(basis: &MonoidBasis, coeffs: &[u64]) -> CoweightVector {
    let gens = basis.generators();
    assert_eq!(gens.len(), coeffs.len());
    let dim = gens.first().map(|g| g.dim()).unwrap_or(0);
    let mut out = CoweightVector::zero(dim);
    for (g, &c) in gens.iter().zip(coeffs) {
        if c > 0 {
            out = out.add(&g.scale(&crate::rational::rat_int(c as i64)));
        }
    }
    out
}

/// Monoid-span equality of two bases: every generator of each side
/// decomposes over the other.
pub fn spans_equal(sys: &RootGeneratingSystem, a: &MonoidBasis, b: &MonoidBasis) -> bool {
    let fwd = a
        .generators()
        .iter()
        .all(|g| decompose_in_basis(sys, g, b).is_ok());
    let bwd = b
        .generators()
        .iter()
        .all(|g| decompose_in_basis(sys, g, a).is_ok());
    fwd && bwd
}
