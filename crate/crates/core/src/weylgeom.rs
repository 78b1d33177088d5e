//! Weyl group action on `V`, real roots, vectorial faces and the Tits cone.
//!
//! Weyl elements are stored as words in the simple reflections together
//! with a cached matrix of the action on `V`; equality is matrix equality
//! (the action on `V` is faithful for the systems handled here). Real
//! roots `w . alpha_i` carry their coefficient vector over the simple
//! roots, their coroot `w . alpha_i_vee`, and the witness pair `(w, i)`.

use crate::linalg;
use crate::rational::{rat_int, Rat};
use crate::rootdata::{CoweightVector, RootGeneratingSystem};
use num::{Signed, Zero};
use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeylError {
    #[error("no dominant representative found within {budget} reflections; the point may lie outside the Tits cone")]
    NotDominantable { budget: usize },
}

/// Element of the Weyl group: a word over `I` plus the cached action on `V`.
#[derive(Debug, Clone)]
pub struct WeylElement {
    word: Vec<usize>,
    matrix: Vec<Vec<Rat>>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}
impl Eq for WeylElement {}

impl WeylElement {
    pub fn identity(sys: &RootGeneratingSystem) -> Self {
        WeylElement {
            word: Vec::new(),
            matrix: linalg::q_identity(sys.ambient_rank()),
        }
    }

    /// Matrix of the simple reflection `r_i(v) = v - alpha_i(v) alpha_i_vee`.
    fn reflection_matrix(sys: &RootGeneratingSystem, i: usize) -> Vec<Vec<Rat>> {
        let n = sys.ambient_rank();
        let mut m = linalg::q_identity(n);
        let coroot = sys.simple_coroot(i);
        let form = sys.simple_root_form(i);
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry -= coroot.coords()[r].clone() * rat_int(form[c]);
            }
        }
        m
    }

    pub fn simple(sys: &RootGeneratingSystem, i: usize) -> Self {
        WeylElement {
            word: vec![i],
            matrix: Self::reflection_matrix(sys, i),
        }
    }

    /// The element of the given word, `word[0]` applied last.
    pub fn from_word(sys: &RootGeneratingSystem, word: &[usize]) -> Self {
        let mut m = linalg::q_identity(sys.ambient_rank());
        for &i in word.iter().rev() {
            m = linalg::q_mat_mul(&Self::reflection_matrix(sys, i), &m);
        }
        WeylElement {
            word: word.to_vec(),
            matrix: m,
        }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn apply(&self, v: &CoweightVector) -> CoweightVector {
        CoweightVector::new(linalg::q_mat_vec(&self.matrix, v.coords()))
    }

    /// Left-multiplies by `r_i`.
    pub fn prepend_simple(&self, sys: &RootGeneratingSystem, i: usize) -> Self {
        let mut word = vec![i];
        word.extend_from_slice(&self.word);
        WeylElement {
            word,
            matrix: linalg::q_mat_mul(&Self::reflection_matrix(sys, i), &self.matrix),
        }
    }

    /// Inverse: simple reflections are involutions, so reverse the word.
    pub fn inverse(&self, sys: &RootGeneratingSystem) -> Self {
        let word: Vec<usize> = self.word.iter().rev().copied().collect();
        Self::from_word(sys, &word)
    }
}

/// A real root `w . alpha_i` with its coroot and positivity data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealRoot {
    /// Coefficients over the simple roots; all of one sign.
    form: Vec<i64>,
    coroot: CoweightVector,
    positive: bool,
    witness_word: Vec<usize>,
    witness_index: usize,
}

impl RealRoot {
    pub fn simple(sys: &RootGeneratingSystem, i: usize) -> Self {
        let mut form = vec![0i64; sys.index_count()];
        form[i] = 1;
        RealRoot {
            form,
            coroot: sys.simple_coroot(i),
            positive: true,
            witness_word: Vec::new(),
            witness_index: i,
        }
    }

    pub fn form_coeffs(&self) -> &[i64] {
        &self.form
    }

    pub fn coroot(&self) -> &CoweightVector {
        &self.coroot
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn witness(&self) -> (&[usize], usize) {
        (&self.witness_word, self.witness_index)
    }

    /// Coefficient-sum height of the root.
    pub fn height(&self) -> i64 {
        self.form.iter().map(|c| c.abs()).sum()
    }

    /// Coefficient-sum height of the coroot (used by series truncations).
    pub fn coroot_height(&self, sys: &RootGeneratingSystem) -> Rat {
        sys.height(&self.coroot)
            .expect("coroot lies in the coroot span")
    }

    /// `beta(v)` for this root `beta`.
    pub fn value(&self, sys: &RootGeneratingSystem, v: &CoweightVector) -> Rat {
        sys.form_value(&self.form, v)
    }

    /// Reflection `r_beta(v) = v - beta(v) beta_vee`.
    pub fn reflect(&self, sys: &RootGeneratingSystem, v: &CoweightVector) -> CoweightVector {
        let t = self.value(sys, v);
        v.sub(&self.coroot.scale(&t))
    }

    pub fn negated(&self) -> Self {
        RealRoot {
            form: self.form.iter().map(|c| -c).collect(),
            coroot: self.coroot.neg(),
            positive: !self.positive,
            witness_word: self.witness_word.clone(),
            witness_index: self.witness_index,
        }
    }

    /// Image under the simple reflection `r_j` (dual action on forms,
    /// direct action on coroots).
    fn reflected_by_simple(&self, sys: &RootGeneratingSystem, j: usize) -> Self {
        // alpha_i(alpha_j_vee) = c_{j,i}
        let pairing: i64 = self
            .form
            .iter()
            .enumerate()
            .map(|(i, &c)| c * sys.matrix().entry(j, i))
            .sum();
        let mut form = self.form.clone();
        form[j] -= pairing;
        let coroot_j = sys.simple_coroot(j);
        let t = sys.root_value(j, &self.coroot);
        let coroot = self.coroot.sub(&coroot_j.scale(&t));
        let mut witness_word = vec![j];
        witness_word.extend_from_slice(&self.witness_word);
        let positive = form.iter().all(|&c| c >= 0);
        debug_assert!(positive || form.iter().all(|&c| c <= 0));
        RealRoot {
            form,
            coroot,
            positive,
            witness_word,
            witness_index: self.witness_index,
        }
    }
}

/// The half-space `D(beta, k) = { v : beta(v) + k >= 0 }` attached to a
/// real root and an integer level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpace {
    pub root: RealRoot,
    pub level: i64,
}

impl HalfSpace {
    pub fn new(root: RealRoot, level: i64) -> Self {
        HalfSpace { root, level }
    }

    pub fn contains(&self, sys: &RootGeneratingSystem, v: &CoweightVector) -> bool {
        !(self.root.value(sys, v) + rat_int(self.level)).is_negative()
    }

    /// True on the wall itself: `beta(v) + k = 0`.
    pub fn on_boundary(&self, sys: &RootGeneratingSystem, v: &CoweightVector) -> bool {
        (self.root.value(sys, v) + rat_int(self.level)).is_zero()
    }
}

/// All positive real roots of coefficient-sum height `<= n`.
///
/// Saturation of the reflection orbit of the simple roots, pruned at the
/// height bound: every positive real root admits a height-decreasing
/// chain of simple reflections down to a simple root, so the pruned
/// search is complete for the returned range. Results are sorted by
/// `(height, coefficients)`.
pub fn real_roots_up_to_height(sys: &RootGeneratingSystem, n: i64) -> Vec<RealRoot> {
    assert!(n >= 1);
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut out: Vec<RealRoot> = Vec::new();
    let mut queue: VecDeque<RealRoot> = VecDeque::new();
    for i in 0..sys.index_count() {
        let r = RealRoot::simple(sys, i);
        if r.height() <= n && seen.insert(r.form.clone()) {
            queue.push_back(r.clone());
            out.push(r);
        }
    }
    while let Some(r) = queue.pop_front() {
        for j in 0..sys.index_count() {
            let img = r.reflected_by_simple(sys, j);
            if !img.positive || img.height() > n {
                continue;
            }
            if seen.insert(img.form.clone()) {
                queue.push_back(img.clone());
                out.push(img);
            }
        }
    }
    out.sort_by(|a, b| (a.height(), &a.form).cmp(&(b.height(), &b.form)));
    out
}

/// Simple reflection `r_i(v) = v - alpha_i(v) alpha_i_vee`.
pub fn reflect(sys: &RootGeneratingSystem, i: usize, v: &CoweightVector) -> CoweightVector {
    let t = sys.root_value(i, v);
    v.sub(&sys.simple_coroot(i).scale(&t))
}

/// Dominant representative `v^{++}` of `v`, with the word that maps `v`
/// to it. Repeatedly reflects at the smallest index with `alpha_i(v) < 0`,
/// so runs are deterministic. Gives up after `budget` reflections.
pub fn dominant_representative(
    sys: &RootGeneratingSystem,
    v: &CoweightVector,
    budget: usize,
) -> Result<(CoweightVector, Vec<usize>), WeylError> {
    let mut cur = v.clone();
    let mut word: Vec<usize> = Vec::new();
    for _ in 0..=budget {
        match (0..sys.index_count()).find(|&i| sys.root_value(i, &cur).is_negative()) {
            None => {
                word.reverse(); // applied first-to-last maps v to cur
                return Ok((cur, word));
            }
            Some(i) => {
                cur = reflect(sys, i, &cur);
                word.push(i);
            }
        }
    }
    Err(WeylError::NotDominantable { budget })
}

/// Answer of the bounded Tits-cone membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TitsConeAnswer {
    Yes,
    No,
    Unknown,
}

/// Bounded test for `v in T = union of w . closure(C_f^v)`.
///
/// `Yes` when a dominant representative is found within budget. `No`
/// only under a certificate: either a W-invariant nonnegative form is
/// negative on `v`, or the full (finite) orbit of `v` was exhausted
/// without meeting the closed fundamental chamber. Otherwise `Unknown` —
/// the Tits-cone boundary is not decidable by bounded search.
pub fn in_tits_cone(
    sys: &RootGeneratingSystem,
    v: &CoweightVector,
    budget: usize,
) -> TitsConeAnswer {
    if dominant_representative(sys, v, budget).is_ok() {
        return TitsConeAnswer::Yes;
    }
    // invariant-form certificate: phi = sum m_j alpha_j with C m = 0,
    // m >= 0; then phi is W-invariant and nonnegative on the Tits cone.
    if let Some(m) = nonneg_cartan_kernel_vector(sys) {
        // re-verify invariance: phi(alpha_i_vee) = 0 for all i
        let phi = |x: &CoweightVector| -> Rat {
            m.iter()
                .enumerate()
                .fold(Rat::zero(), |acc, (j, c)| acc + sys.root_value(j, x) * c)
        };
        let invariant = (0..sys.index_count()).all(|i| phi(&sys.simple_coroot(i)).is_zero());
        if invariant && phi(v).is_negative() {
            return TitsConeAnswer::No;
        }
    }
    // orbit exhaustion certificate
    let mut seen: BTreeSet<CoweightVector> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(v.clone());
    queue.push_back(v.clone());
    while let Some(x) = queue.pop_front() {
        if seen.len() > budget {
            return TitsConeAnswer::Unknown;
        }
        if sys.is_dominant(&x) {
            return TitsConeAnswer::Yes;
        }
        for i in 0..sys.index_count() {
            let y = reflect(sys, i, &x);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    TitsConeAnswer::No
}

/// A componentwise-nonnegative nonzero vector in `ker C`, if one is found
/// among signed kernel basis vectors and their sum.
fn nonneg_cartan_kernel_vector(sys: &RootGeneratingSystem) -> Option<Vec<Rat>> {
    let k = sys.index_count();
    let c: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| rat_int(sys.matrix().entry(i, j))).collect())
        .collect();
    let kernel = linalg::q_kernel(&c);
    let mut candidates: Vec<Vec<Rat>> = Vec::new();
    for b in &kernel {
        candidates.push(b.clone());
        candidates.push(b.iter().map(|x| -x).collect());
    }
    if kernel.len() > 1 {
        let mut s = vec![Rat::zero(); k];
        for b in &kernel {
            for (i, x) in b.iter().enumerate() {
                s[i] += x;
            }
        }
        candidates.push(s.iter().map(|x| -x).collect());
        candidates.push(s);
    }
    candidates
        .into_iter()
        .find(|cand| cand.iter().all(|x| !x.is_negative()) && cand.iter().any(|x| !x.is_zero()))
}

/// Sign partition of `I` by the values `alpha_i(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSignature {
    pub zero: Vec<usize>,
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

pub fn face_signature(sys: &RootGeneratingSystem, v: &CoweightVector) -> FaceSignature {
    let mut sig = FaceSignature {
        zero: Vec::new(),
        positive: Vec::new(),
        negative: Vec::new(),
    };
    for i in 0..sys.index_count() {
        let x = sys.root_value(i, v);
        if x.is_zero() {
            sig.zero.push(i);
        } else if x.is_positive() {
            sig.positive.push(i);
        } else {
            sig.negative.push(i);
        }
    }
    sig
}

/// Wire format for a real root: integer coefficient arrays over the
/// simple roots and simple coroots.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RealRootJson {
    pub root: Vec<i64>,
    pub coroot: Vec<i64>,
    pub height: i64,
    pub positive: bool,
}

impl RealRoot {
    pub fn to_json(&self, sys: &RootGeneratingSystem) -> RealRootJson {
        let coroot_coeffs = sys
            .qvee_decompose(&self.coroot)
            .expect("real coroots lie in the coroot span");
        RealRootJson {
            root: self.form.clone(),
            coroot: coroot_coeffs
                .iter()
                .map(|c| crate::rootdata::rat_to_i64(c).expect("integer coroot coefficients"))
                .collect(),
            height: self.height(),
            positive: self.positive,
        }
    }
}
