//! Piecewise-linear paths with directions in a Weyl orbit, Hecke chain
//! certificates, path enumeration by folding, and the deficit/threshold
//! arithmetic attached to them.
//!
//! A path of shape `lambda` moves with derivatives in `W . lambda`. It
//! is a Hecke path (with respect to the negative chamber germ) when each
//! direction change at an interior breakpoint is certified by a chain:
//! a sequence of reflections in positive real roots `beta_i`, each with
//! `beta_i(xi_{i-1}) < 0` and a wall through the breakpoint
//! (`beta_i(pi(t)) in Z`). Every chain step adds a positive coroot
//! multiple, so directions increase toward dominance along the path;
//! this is what all the pruning below leans on.

use crate::rational::{format_rat, is_integer, parse_rat, rat_int, Rat};
use crate::rootdata::{CoweightVector, DominanceFlavor, RootGeneratingSystem};
use crate::weylgeom::{real_roots_up_to_height, RealRoot, WeylElement};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeckeError {
    #[error("path shape must be a dominant coweight")]
    ShapeNotDominant,
    #[error("breakpoint times must run strictly from 0 to 1")]
    BadBreakpoints,
    #[error("segment {segment}: direction is not the witnessed Weyl image of the shape")]
    DirectionWitnessBroken { segment: usize },
    #[error("path data inconsistent: {0}")]
    Inconsistent(String),
    #[error("argument outside the stated cone: {0}")]
    OutsideCone(&'static str),
    #[error("malformed path JSON: {0}")]
    Json(String),
}

/// One segment direction: a Weyl image of the shape with its witness word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    pub vector: CoweightVector,
    pub witness: Vec<usize>,
}

/// A lambda-path: piecewise linear, with per-segment directions in
/// `W . shape`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaPath {
    shape: CoweightVector,
    start: CoweightVector,
    /// `0 = t_0 < t_1 < ... < t_n = 1`; one more entry than segments.
    times: Vec<Rat>,
    directions: Vec<Direction>,
}

impl LambdaPath {
    pub fn new(
        sys: &RootGeneratingSystem,
        shape: CoweightVector,
        start: CoweightVector,
        times: Vec<Rat>,
        directions: Vec<Direction>,
    ) -> Result<Self, HeckeError> {
        if !sys.is_dominant(&shape) {
            return Err(HeckeError::ShapeNotDominant);
        }
        if times.len() < 2
            || times[0] != Rat::zero()
            || *times.last().unwrap() != Rat::one()
            || times.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(HeckeError::BadBreakpoints);
        }
        if directions.len() + 1 != times.len() {
            return Err(HeckeError::Inconsistent(
                "times and directions lengths disagree".into(),
            ));
        }
        for (k, d) in directions.iter().enumerate() {
            let w = WeylElement::from_word(sys, &d.witness);
            if w.apply(&shape) != d.vector {
                return Err(HeckeError::DirectionWitnessBroken { segment: k });
            }
        }
        Ok(LambdaPath {
            shape,
            start,
            times,
            directions,
        })
    }

    pub fn shape(&self) -> &CoweightVector {
        &self.shape
    }

    pub fn start(&self) -> &CoweightVector {
        &self.start
    }

    pub fn times(&self) -> &[Rat] {
        &self.times
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn segment_count(&self) -> usize {
        self.directions.len()
    }

    pub fn endpoint(&self) -> CoweightVector {
        let mut p = self.start.clone();
        for (k, d) in self.directions.iter().enumerate() {
            let dt = &self.times[k + 1] - &self.times[k];
            p = p.add(&d.vector.scale(&dt));
        }
        p
    }

    /// The point `pi(t)`.
    pub fn point_at(&self, t: &Rat) -> CoweightVector {
        assert!(*t >= Rat::zero() && *t <= Rat::one());
        let mut p = self.start.clone();
        for (k, d) in self.directions.iter().enumerate() {
            if *t <= self.times[k] {
                break;
            }
            let seg_end = if *t < self.times[k + 1] {
                t.clone()
            } else {
                self.times[k + 1].clone()
            };
            let dt = seg_end - &self.times[k];
            p = p.add(&d.vector.scale(&dt));
        }
        p
    }

    /// Merges consecutive segments with equal direction vectors and
    /// reduces breakpoints; the canonical representative for set
    /// comparisons.
    pub fn normal_form(&self) -> LambdaPath {
        let mut times = vec![self.times[0].clone()];
        let mut directions: Vec<Direction> = Vec::new();
        for (k, d) in self.directions.iter().enumerate() {
            match directions.last() {
                Some(last) if last.vector == d.vector => {
                    // extend the previous segment
                }
                _ => {
                    if !directions.is_empty() {
                        times.push(self.times[k].clone());
                    }
                    directions.push(d.clone());
                }
            }
        }
        times.push(Rat::one());
        LambdaPath {
            shape: self.shape.clone(),
            start: self.start.clone(),
            times,
            directions,
        }
    }

    /// Ordering key for canonical result lists.
    fn sort_key(&self) -> (Vec<Rat>, Vec<CoweightVector>) {
        (
            self.times.clone(),
            self.directions.iter().map(|d| d.vector.clone()).collect(),
        )
    }
}

/// A certified chain at one breakpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeChain {
    pub time: Rat,
    /// `xi_0 = pi'_-(t), ..., xi_s = pi'_+(t)`.
    pub xis: Vec<CoweightVector>,
    /// The reflecting positive roots, one per step.
    pub betas: Vec<RealRoot>,
}

/// One chain per interior breakpoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeckeCertificate {
    pub chains: Vec<HeckeChain>,
}

/// Outcome of Hecke validation at a root-height cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid(HeckeCertificate),
    /// No chain exists using positive roots within the cutoff.
    Invalid {
        breakpoint: usize,
    },
    /// The search budget bit before the question was settled.
    Inconclusive {
        cutoff: i64,
    },
}

const CHAIN_STATE_BUDGET: usize = 20_000;

/// The vectors and reflecting roots of one discovered chain.
type ChainSteps = (Vec<CoweightVector>, Vec<RealRoot>);

/// Searches for a chain from `from` to `to` through reflections at
/// positive roots (height `<= cutoff`) whose walls pass through `point`.
/// Each step goes strictly up in the rational dominance order, so the
/// state space between `from` and `to` is finite.
fn find_chain(
    sys: &RootGeneratingSystem,
    point: &CoweightVector,
    from: &CoweightVector,
    to: &CoweightVector,
    cutoff: i64,
) -> Result<Option<ChainSteps>, usize> {
    if from == to {
        return Ok(Some((vec![from.clone()], Vec::new())));
    }
    let admissible: Vec<RealRoot> = real_roots_up_to_height(sys, cutoff)
        .into_iter()
        .filter(|b| is_integer(&b.value(sys, point)))
        .collect();
    let mut parents: BTreeMap<CoweightVector, (CoweightVector, RealRoot)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(from.clone());
    let mut visited = BTreeSet::new();
    visited.insert(from.clone());
    let mut states = 0usize;
    while let Some(xi) = queue.pop_front() {
        states += 1;
        if states > CHAIN_STATE_BUDGET {
            return Err(states);
        }
        for beta in &admissible {
            if !beta.value(sys, &xi).is_negative() {
                continue;
            }
            let next = beta.reflect(sys, &xi);
            // stay weakly below the target in the rational cone
            if !sys.qvee_leq(&next, to, DominanceFlavor::RationalCone) {
                continue;
            }
            if !visited.insert(next.clone()) {
                continue;
            }
            parents.insert(next.clone(), (xi.clone(), beta.clone()));
            if &next == to {
                // reconstruct
                let mut xis = vec![next.clone()];
                let mut betas = Vec::new();
                let mut cur = next;
                while let Some((prev, b)) = parents.get(&cur) {
                    betas.push(b.clone());
                    xis.push(prev.clone());
                    cur = prev.clone();
                    if &cur == from {
                        break;
                    }
                }
                xis.reverse();
                betas.reverse();
                return Ok(Some((xis, betas)));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Validates the Hecke condition at every interior breakpoint, searching
/// chains over positive real roots of height `<= root_height_cutoff`.
/// `Invalid` is relative to that cutoff: no chain exists within it.
pub fn validate_hecke(
    sys: &RootGeneratingSystem,
    path: &LambdaPath,
    root_height_cutoff: i64,
) -> Validation {
    let mut chains = Vec::new();
    for k in 1..path.times.len() - 1 {
        let t = &path.times[k];
        let from = &path.directions[k - 1].vector;
        let to = &path.directions[k].vector;
        let point = path.point_at(t);
        match find_chain(sys, &point, from, to, root_height_cutoff) {
            Err(_) => {
                return Validation::Inconclusive {
                    cutoff: root_height_cutoff,
                }
            }
            Ok(None) => return Validation::Invalid { breakpoint: k },
            Ok(Some((xis, betas))) => chains.push(HeckeChain {
                time: t.clone(),
                xis,
                betas,
            }),
        }
    }
    Validation::Valid(HeckeCertificate { chains })
}

/// The deficit `mu` with `endpoint = start + shape - mu`, and whether it
/// lies in the rational positive coroot cone (it must, for every valid
/// Hecke path).
pub fn deficit(sys: &RootGeneratingSystem, path: &LambdaPath) -> (CoweightVector, bool) {
    let mu = path.start.add(&path.shape).sub(&path.endpoint());
    let flag = sys.qvee_leq(
        &CoweightVector::zero(mu.dim()),
        &mu,
        DominanceFlavor::RationalCone,
    );
    (mu, flag)
}

/// Smallest `t*` such that the derivative equals the shape on `(t*, 1]`,
/// or `None` when the final direction differs from the shape.
pub fn final_direction_time(path: &LambdaPath) -> Option<Rat> {
    let mut k = path.directions.len();
    while k > 0 && path.directions[k - 1].vector == path.shape {
        k -= 1;
    }
    if k == path.directions.len() {
        None
    } else {
        Some(path.times[k].clone())
    }
}

/// Once a segment direction is dominant, all later directions must equal
/// it.
pub fn dominance_monotonicity_check(sys: &RootGeneratingSystem, path: &LambdaPath) -> bool {
    let mut seen_dominant: Option<&CoweightVector> = None;
    for d in &path.directions {
        match seen_dominant {
            Some(v) => {
                if &d.vector != v {
                    return false;
                }
            }
            None => {
                if sys.is_dominant(&d.vector) {
                    seen_dominant = Some(&d.vector);
                }
            }
        }
    }
    true
}

/// Per-index thresholds `b_i = h(-mu) * alpha_i(nu)`: any `lambda` with
/// `alpha_i(lambda) > b_i` for all `i` keeps the segment
/// `lambda - [0, h(-mu)] nu` strictly inside the fundamental chamber.
pub fn sufficiently_dominant_bound(
    sys: &RootGeneratingSystem,
    mu: &CoweightVector,
    nu: &CoweightVector,
) -> Result<Vec<Rat>, HeckeError> {
    let zero = CoweightVector::zero(mu.dim());
    if !sys.qvee_leq(mu, &zero, DominanceFlavor::RationalCone) {
        return Err(HeckeError::OutsideCone("mu must lie in -Q_vee_{R+}"));
    }
    if !nu.is_integral() || !(0..sys.index_count()).all(|i| sys.root_value(i, nu).is_positive()) {
        return Err(HeckeError::OutsideCone(
            "nu must be an integral strictly dominant coweight",
        ));
    }
    let h_neg_mu = sys.height(&mu.neg()).expect("mu lies in the coroot span");
    Ok((0..sys.index_count())
        .map(|i| &h_neg_mu * sys.root_value(i, nu))
        .collect())
}

/// Ball decomposition of `lambda = sum lambda_e e` against the deficit
/// cap `H = -h(mu) + 1`: the generators with coefficient `>= H` are
/// clipped to `H`, the rest stay; `center + shape = lambda` and the
/// shape coefficients are `min(lambda_e, H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingBall {
    pub cap: u64,
    pub center_coeffs: Vec<u64>,
    pub shape_coeffs: Vec<u64>,
    pub center: CoweightVector,
    pub shape: CoweightVector,
}

pub fn bounding_ball(
    sys: &RootGeneratingSystem,
    basis: &crate::coweight_monoid::MonoidBasis,
    lambda_coeffs: &[u64],
    mu: &CoweightVector,
) -> Result<BoundingBall, HeckeError> {
    let zero = CoweightVector::zero(mu.dim());
    if !sys.qvee_leq(mu, &zero, DominanceFlavor::IntegerCone) {
        return Err(HeckeError::OutsideCone("mu must lie in Q_vee_-"));
    }
    let h_mu = sys.height(mu).expect("mu lies in the coroot span");
    let cap_rat = rat_int(1) - h_mu;
    let cap = crate::rootdata::rat_to_i64(&cap_rat).expect("integral height") as u64;
    let gens = basis.generators();
    assert_eq!(gens.len(), lambda_coeffs.len());
    let shape_coeffs: Vec<u64> = lambda_coeffs.iter().map(|&c| c.min(cap)).collect();
    let center_coeffs: Vec<u64> = lambda_coeffs
        .iter()
        .zip(&shape_coeffs)
        .map(|(&c, &s)| c - s)
        .collect();
    let accumulate = |coeffs: &[u64]| {
        let dim = gens.first().map(|g| g.dim()).unwrap_or(0);
        let mut out = CoweightVector::zero(dim);
        for (g, &c) in gens.iter().zip(coeffs) {
            if c > 0 {
                out = out.add(&g.scale(&rat_int(c as i64)));
            }
        }
        out
    };
    Ok(BoundingBall {
        cap,
        center: accumulate(&center_coeffs),
        shape: accumulate(&shape_coeffs),
        center_coeffs,
        shape_coeffs,
    })
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

/// Cutoffs declaring the finite search space of `enumerate_hecke`;
/// results are complete relative to them.
#[derive(Debug, Clone)]
pub struct EnumerationCutoffs {
    /// Positive real roots searched for walls and chains.
    pub root_height: i64,
    /// Breakpoint times keep denominators `<= max_denominator`.
    pub max_denominator: u64,
    /// Directions `xi` explored have `h(shape - xi)` at most this.
    pub direction_height_cap: Rat,
}

impl EnumerationCutoffs {
    /// Defaults derived from the problem: wall hit times of a segment of
    /// shape `lambda` against roots of height `<= n` have denominators
    /// dividing `|beta(xi)|`, and with denominators capped at `D` any
    /// segment lasts at least `1/D^2`, which bounds how far below the
    /// shape a useful direction can sit.
    pub fn for_problem(
        sys: &RootGeneratingSystem,
        shape: &CoweightVector,
        mu_target: &CoweightVector,
        root_height: i64,
    ) -> Self {
        let mut max_pairing: i64 = 1;
        for beta in real_roots_up_to_height(sys, root_height) {
            let v = beta.value(sys, shape);
            if let Some(x) = crate::rootdata::rat_to_i64(&v) {
                max_pairing = max_pairing.max(x.abs());
            }
        }
        let max_denominator = (4 * max_pairing * max_pairing) as u64;
        let h = sys
            .height(mu_target)
            .unwrap_or_else(|_| Rat::zero())
            .max(Rat::zero());
        let direction_height_cap = h * rat_int((max_denominator * max_denominator) as i64);
        EnumerationCutoffs {
            root_height,
            max_denominator,
            direction_height_cap,
        }
    }
}

/// Paths found by `enumerate_hecke` with the advisory flag set when some
/// branch was dropped at a declared cutoff.
#[derive(Debug)]
pub struct Enumeration {
    pub paths: Vec<(LambdaPath, HeckeCertificate)>,
    /// Set when the search frontier was non-empty at a cutoff
    /// (denominator or direction cap): results may be incomplete.
    pub cutoff_advisory: bool,
}

/// All Hecke paths of the given integral dominant shape from `start` to
/// `end`, complete relative to the cutoffs. The search extends segments
/// forward and branches on admissible foldings at wall incidences;
/// directions only move up in the dominance order, which bounds the
/// recursion.
pub fn enumerate_hecke(
    sys: &RootGeneratingSystem,
    shape: &CoweightVector,
    start: &CoweightVector,
    end: &CoweightVector,
    cutoffs: &EnumerationCutoffs,
) -> Result<Enumeration, HeckeError> {
    if !sys.is_dominant(shape) || !shape.is_integral() {
        return Err(HeckeError::ShapeNotDominant);
    }
    let mut advisory = false;

    // necessary condition: the deficit lands in the rational cone
    let mu_target = start.add(shape).sub(end);
    let zero = CoweightVector::zero(shape.dim());
    if !sys.qvee_leq(&zero, &mu_target, DominanceFlavor::RationalCone) {
        return Ok(Enumeration {
            paths: Vec::new(),
            cutoff_advisory: false,
        });
    }

    // direction set: orbit points within the height cap, with witnesses
    let mut directions: BTreeMap<CoweightVector, Vec<usize>> = BTreeMap::new();
    {
        let mut queue = VecDeque::new();
        directions.insert(shape.clone(), Vec::new());
        queue.push_back(shape.clone());
        while let Some(xi) = queue.pop_front() {
            for i in 0..sys.index_count() {
                let img = crate::weylgeom::reflect(sys, i, &xi);
                if directions.contains_key(&img) {
                    continue;
                }
                let gap = shape.sub(&img);
                let ok = sys.qvee_leq(&zero, &gap, DominanceFlavor::RationalCone)
                    && sys
                        .height(&gap)
                        .is_ok_and(|h| h <= cutoffs.direction_height_cap);
                if !ok {
                    if sys.qvee_leq(&zero, &gap, DominanceFlavor::RationalCone) {
                        advisory = true; // dropped by the height cap
                    }
                    continue;
                }
                let mut word = vec![i];
                word.extend_from_slice(&directions[&xi]);
                directions.insert(img.clone(), word);
                queue.push_back(img);
            }
        }
    }

    let roots = real_roots_up_to_height(sys, cutoffs.root_height);

    struct Frame {
        t: Rat,
        pos: CoweightVector,
        dir: CoweightVector,
        times: Vec<Rat>,
        dirs: Vec<Direction>,
    }

    let mut raw_paths: Vec<LambdaPath> = Vec::new();
    let mut stack = vec![Frame {
        t: Rat::zero(),
        pos: start.clone(),
        dir: CoweightVector::zero(0), // replaced below per initial direction
        times: vec![Rat::zero()],
        dirs: Vec::new(),
    }];
    stack.clear();
    for (vector, witness) in &directions {
        stack.push(Frame {
            t: Rat::zero(),
            pos: start.clone(),
            dir: vector.clone(),
            times: vec![Rat::zero()],
            dirs: vec![Direction {
                vector: vector.clone(),
                witness: witness.clone(),
            }],
        });
    }

    while let Some(f) = stack.pop() {
        let remaining = Rat::one() - &f.t;
        // interval prune: the endpoint is wedged between "never fold
        // again" and "fold straight to the shape now"
        let lo = f.pos.add(&f.dir.scale(&remaining));
        let hi = f.pos.add(&shape.scale(&remaining));
        if !sys.qvee_leq(&lo, end, DominanceFlavor::RationalCone)
            || !sys.qvee_leq(end, &hi, DominanceFlavor::RationalCone)
        {
            continue;
        }
        // option 1: run straight to t = 1
        if &lo == end {
            let mut times = f.times.clone();
            times.push(Rat::one());
            let path = LambdaPath::new(sys, shape.clone(), start.clone(), times, f.dirs.clone())
                .expect("constructed segments are consistent");
            raw_paths.push(path.normal_form());
        }
        // option 2: fold at a wall incidence
        let mut fold_times: BTreeSet<Rat> = BTreeSet::new();
        for beta in &roots {
            let rate = beta.value(sys, &f.dir);
            if !rate.is_negative() {
                continue;
            }
            let at_pos = beta.value(sys, &f.pos);
            // beta(pos + s dir) = m for integers m strictly inside the
            // remaining open time interval
            let end_val = &at_pos + &rate * &remaining;
            let mut m = at_pos.floor();
            if m == at_pos {
                m -= Rat::one();
            }
            while m > end_val {
                let s = (&m - &at_pos) / &rate;
                let t_new = &f.t + &s;
                if t_new < Rat::one() {
                    if t_new.denom() <= &num::BigInt::from(cutoffs.max_denominator) {
                        fold_times.insert(t_new);
                    } else {
                        advisory = true;
                    }
                }
                m -= Rat::one();
            }
        }
        for t_new in fold_times {
            let s = &t_new - &f.t;
            let point = f.pos.add(&f.dir.scale(&s));
            // all directions reachable by a chain at this point
            for (target, witness) in &directions {
                if target == &f.dir {
                    continue;
                }
                if !sys.qvee_leq(&f.dir, target, DominanceFlavor::RationalCone) {
                    continue;
                }
                match find_chain(sys, &point, &f.dir, target, cutoffs.root_height) {
                    Err(_) => {
                        advisory = true;
                    }
                    Ok(None) => {}
                    Ok(Some(_)) => {
                        let mut times = f.times.clone();
                        times.push(t_new.clone());
                        let mut dirs = f.dirs.clone();
                        dirs.push(Direction {
                            vector: target.clone(),
                            witness: witness.clone(),
                        });
                        stack.push(Frame {
                            t: t_new.clone(),
                            pos: point.clone(),
                            dir: target.clone(),
                            times,
                            dirs,
                        });
                    }
                }
            }
        }
    }

    // canonicalize, dedupe, certify
    raw_paths.sort_by_key(|p| p.sort_key());
    raw_paths.dedup_by(|a, b| a.sort_key() == b.sort_key());
    let mut paths = Vec::new();
    for p in raw_paths {
        match validate_hecke(sys, &p, cutoffs.root_height) {
            Validation::Valid(cert) => paths.push((p, cert)),
            Validation::Invalid { breakpoint } => {
                return Err(HeckeError::Inconsistent(format!(
                    "enumerated path failed validation at breakpoint {breakpoint}"
                )))
            }
            Validation::Inconclusive { .. } => {
                advisory = true;
            }
        }
    }
    Ok(Enumeration {
        paths,
        cutoff_advisory: advisory,
    })
}

// ---------------------------------------------------------------------------
// wire format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionJson {
    pub vector: Vec<String>,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainJson {
    pub t: String,
    pub xis: Vec<Vec<String>>,
    /// Coefficient arrays of the reflecting roots over the simple roots.
    pub betas: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathJson {
    pub shape: Vec<String>,
    pub start: Vec<String>,
    pub breakpoints: Vec<String>,
    pub directions: Vec<DirectionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<ChainJson>>,
}

fn vec_to_strings(v: &CoweightVector) -> Vec<String> {
    v.coords().iter().map(format_rat).collect()
}

fn strings_to_vec(v: &[String]) -> Result<CoweightVector, HeckeError> {
    let coords: Result<Vec<Rat>, _> = v.iter().map(|s| parse_rat(s)).collect();
    Ok(CoweightVector::new(
        coords.map_err(|e| HeckeError::Json(e.to_string()))?,
    ))
}

pub fn path_to_json(path: &LambdaPath, cert: Option<&HeckeCertificate>) -> PathJson {
    PathJson {
        shape: vec_to_strings(&path.shape),
        start: vec_to_strings(&path.start),
        breakpoints: path.times.iter().map(format_rat).collect(),
        directions: path
            .directions
            .iter()
            .map(|d| DirectionJson {
                vector: vec_to_strings(&d.vector),
                witness: d.witness.clone(),
            })
            .collect(),
        certificate: cert.map(|c| {
            c.chains
                .iter()
                .map(|ch| ChainJson {
                    t: format_rat(&ch.time),
                    xis: ch.xis.iter().map(vec_to_strings).collect(),
                    betas: ch.betas.iter().map(|b| b.form_coeffs().to_vec()).collect(),
                })
                .collect()
        }),
    }
}

pub fn path_from_json(
    sys: &RootGeneratingSystem,
    json: &PathJson,
) -> Result<LambdaPath, HeckeError> {
    let shape = strings_to_vec(&json.shape)?;
    let start = strings_to_vec(&json.start)?;
    let times: Result<Vec<Rat>, _> = json.breakpoints.iter().map(|s| parse_rat(s)).collect();
    let times = times.map_err(|e| HeckeError::Json(e.to_string()))?;
    let directions: Result<Vec<Direction>, HeckeError> = json
        .directions
        .iter()
        .map(|d| {
            Ok(Direction {
                vector: strings_to_vec(&d.vector)?,
                witness: d.witness.clone(),
            })
        })
        .collect();
    LambdaPath::new(sys, shape, start, times, directions?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rootdata::presets;

    fn sl2() -> RootGeneratingSystem {
        presets::sl2_simply_connected()
    }

    /// Straight path of the given shape.
    fn straight(sys: &RootGeneratingSystem, shape: &[i64], start: &[i64]) -> LambdaPath {
        let shape = CoweightVector::from_ints(shape);
        LambdaPath::new(
            sys,
            shape.clone(),
            CoweightVector::from_ints(start),
            vec![Rat::zero(), Rat::one()],
            vec![Direction {
                vector: shape,
                witness: vec![],
            }],
        )
        .unwrap()
    }

    /// The single-fold rank-one path of shape `alpha_vee` from 0 to 0.
    fn folded_01(sys: &RootGeneratingSystem) -> LambdaPath {
        LambdaPath::new(
            sys,
            CoweightVector::from_ints(&[1]),
            CoweightVector::from_ints(&[0]),
            vec![Rat::zero(), rat(1, 2), Rat::one()],
            vec![
                Direction {
                    vector: CoweightVector::from_ints(&[-1]),
                    witness: vec![0],
                },
                Direction {
                    vector: CoweightVector::from_ints(&[1]),
                    witness: vec![],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn straight_path_validates_with_empty_certificate() {
        let sys = sl2();
        let p = straight(&sys, &[1], &[0]);
        match validate_hecke(&sys, &p, 5) {
            Validation::Valid(cert) => assert!(cert.chains.is_empty()),
            other => panic!("expected valid, got {other:?}"),
        }
    }

    #[test]
    fn folded_path_chain() {
        let sys = sl2();
        let p = folded_01(&sys);
        assert_eq!(p.endpoint(), CoweightVector::from_ints(&[0]));
        match validate_hecke(&sys, &p, 5) {
            Validation::Valid(cert) => {
                assert_eq!(cert.chains.len(), 1);
                let ch = &cert.chains[0];
                assert_eq!(ch.time, rat(1, 2));
                assert_eq!(ch.betas.len(), 1);
                assert_eq!(ch.betas[0].form_coeffs(), &[1]);
                assert_eq!(
                    ch.xis,
                    vec![
                        CoweightVector::from_ints(&[-1]),
                        CoweightVector::from_ints(&[1])
                    ]
                );
            }
            other => panic!("expected valid, got {other:?}"),
        }
    }

    #[test]
    fn fold_off_wall_is_invalid() {
        let sys = sl2();
        // fold at t = 3/4: the fold point -3/4 alpha_vee has alpha value
        // -3/2, not an integer
        let p = LambdaPath::new(
            &sys,
            CoweightVector::from_ints(&[1]),
            CoweightVector::from_ints(&[0]),
            vec![Rat::zero(), rat(3, 4), Rat::one()],
            vec![
                Direction {
                    vector: CoweightVector::from_ints(&[-1]),
                    witness: vec![0],
                },
                Direction {
                    vector: CoweightVector::from_ints(&[1]),
                    witness: vec![],
                },
            ],
        )
        .unwrap();
        assert_eq!(
            validate_hecke(&sys, &p, 5),
            Validation::Invalid { breakpoint: 1 }
        );
    }

    #[test]
    fn fold_at_nonintegral_wall_a2_invalid() {
        let sys = presets::a2_simply_connected();
        let rho = CoweightVector::from_ints(&[1, 1]);
        // descend with w0.rho = -rho, then fold back at an off-wall time
        let p = LambdaPath::new(
            &sys,
            rho.clone(),
            CoweightVector::zero(2),
            vec![Rat::zero(), rat(1, 3), Rat::one()],
            vec![
                Direction {
                    vector: rho.neg(),
                    witness: vec![0, 1, 0],
                },
                Direction {
                    vector: rho.clone(),
                    witness: vec![],
                },
            ],
        )
        .unwrap();
        assert_eq!(
            validate_hecke(&sys, &p, 6),
            Validation::Invalid { breakpoint: 1 }
        );
    }

    #[test]
    fn deficit_examples() {
        let sys = sl2();
        let (mu, ok) = deficit(&sys, &straight(&sys, &[1], &[0]));
        assert!(mu.is_zero() && ok);

        let (mu, ok) = deficit(&sys, &folded_01(&sys));
        assert_eq!(mu, CoweightVector::from_ints(&[1]));
        assert!(ok);

        // straight negative path of shape alpha_vee from 0 to -alpha_vee
        let p = LambdaPath::new(
            &sys,
            CoweightVector::from_ints(&[1]),
            CoweightVector::from_ints(&[0]),
            vec![Rat::zero(), Rat::one()],
            vec![Direction {
                vector: CoweightVector::from_ints(&[-1]),
                witness: vec![0],
            }],
        )
        .unwrap();
        let (mu, ok) = deficit(&sys, &p);
        assert_eq!(mu, CoweightVector::from_ints(&[2]));
        assert!(ok);
    }

    #[test]
    fn final_time_examples() {
        let sys = sl2();
        assert_eq!(
            final_direction_time(&straight(&sys, &[1], &[0])),
            Some(Rat::zero())
        );
        let p = folded_01(&sys);
        let t_star = final_direction_time(&p).unwrap();
        assert_eq!(t_star, rat(1, 2));
        // bound: with scale T = 1 and deficit height 1, t* <= 1
        let (mu, _) = deficit(&sys, &p);
        let h = sys.height(&mu).unwrap();
        assert!(t_star <= h);
    }

    #[test]
    fn monotonicity_check() {
        let sys = sl2();
        assert!(dominance_monotonicity_check(
            &sys,
            &straight(&sys, &[1], &[0])
        ));
        assert!(dominance_monotonicity_check(&sys, &folded_01(&sys)));
        // dominant middle segment followed by a different direction
        let bad = LambdaPath::new(
            &sys,
            CoweightVector::from_ints(&[1]),
            CoweightVector::from_ints(&[0]),
            vec![Rat::zero(), rat(1, 4), rat(1, 2), Rat::one()],
            vec![
                Direction {
                    vector: CoweightVector::from_ints(&[-1]),
                    witness: vec![0],
                },
                Direction {
                    vector: CoweightVector::from_ints(&[1]),
                    witness: vec![],
                },
                Direction {
                    vector: CoweightVector::from_ints(&[-1]),
                    witness: vec![0],
                },
            ],
        )
        .unwrap();
        assert!(!dominance_monotonicity_check(&sys, &bad));
        assert!(matches!(
            validate_hecke(&sys, &bad, 5),
            Validation::Invalid { .. }
        ));
    }

    #[test]
    fn enumerate_rank_one_examples() {
        let sys = sl2();
        let shape = CoweightVector::from_ints(&[1]);
        let zero = CoweightVector::from_ints(&[0]);
        let cutoffs = EnumerationCutoffs::for_problem(&sys, &shape, &shape, 3);

        // 0 -> alpha_vee: only the straight path
        let e = enumerate_hecke(&sys, &shape, &zero, &shape, &cutoffs).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert_eq!(e.paths[0].0.segment_count(), 1);

        // 0 -> 0: exactly the single fold at t = 1/2
        let e = enumerate_hecke(&sys, &shape, &zero, &zero, &cutoffs).unwrap();
        assert_eq!(e.paths.len(), 1);
        let p = &e.paths[0].0;
        assert_eq!(p.times()[1], rat(1, 2));
        assert_eq!(p.directions()[0].vector, CoweightVector::from_ints(&[-1]));

        // 0 -> -alpha_vee: the straight negative path
        let neg = CoweightVector::from_ints(&[-1]);
        let e = enumerate_hecke(&sys, &shape, &zero, &neg, &cutoffs).unwrap();
        assert_eq!(e.paths.len(), 1);
        assert_eq!(e.paths[0].0.segment_count(), 1);
        assert_eq!(e.paths[0].0.directions()[0].vector, neg);

        // unreachable endpoint
        let far = CoweightVector::from_ints(&[2]);
        let e = enumerate_hecke(&sys, &shape, &zero, &far, &cutoffs).unwrap();
        assert!(e.paths.is_empty());
    }

    /// Rank-one brute-force oracle: straight paths plus single folds at
    /// integer-unit wall positions (in units of alpha_vee / 2).
    fn rank_one_oracle(n: i64, start_units: i64, end_units: i64) -> Vec<(i64, Option<i64>)> {
        // returns (fold_wall_units, Some(fold numerator of time in 1/(2n)))
        // or straight paths encoded with fold = None
        let mut out = Vec::new();
        if end_units == start_units + 2 * n {
            out.push((i64::MAX, None)); // straight positive
        }
        if end_units == start_units - 2 * n {
            out.push((i64::MIN, None)); // straight negative
        }
        for u in 1..(2 * n) {
            // fold after u steps down at a wall position
            let wall = start_units - u;
            let end = start_units - u + (2 * n - u);
            if end == end_units {
                out.push((wall, Some(u)));
            }
        }
        out
    }

    #[test]
    fn enumerate_matches_rank_one_oracle() {
        let sys = sl2();
        for n in 1..=4i64 {
            let shape = CoweightVector::from_ints(&[n]);
            for end in -4..=4i64 {
                let b = CoweightVector::from_ints(&[end]);
                let zero = CoweightVector::from_ints(&[0]);
                let mu_target = shape.sub(&b);
                let cutoffs = EnumerationCutoffs::for_problem(&sys, &shape, &mu_target, 3);
                let found = enumerate_hecke(&sys, &shape, &zero, &b, &cutoffs).unwrap();
                let oracle = rank_one_oracle(n, 0, 2 * end);
                assert_eq!(
                    found.paths.len(),
                    oracle.len(),
                    "shape {n} alpha_vee, end {end} alpha_vee"
                );
                for (p, _) in &found.paths {
                    let (mu, ok) = deficit(&sys, p);
                    assert!(ok, "deficit flag");
                    // final-time bound with factorization T = n, nu = alpha_vee
                    let h = sys.height(&mu).unwrap();
                    if rat_int(n) > h {
                        let t_star = final_direction_time(p).expect("t* exists when T > h(mu)");
                        assert!(t_star <= h / rat_int(n));
                    }
                    assert!(dominance_monotonicity_check(&sys, p));
                }
            }
        }
    }

    #[test]
    fn enumerate_a2_properties() {
        let sys = presets::a2_simply_connected();
        let rho = CoweightVector::from_ints(&[1, 1]);
        for scale in [1i64, 2] {
            let shape = rho.scale(&rat_int(scale));
            let shape = CoweightVector::new(shape.coords().to_vec());
            for (e1, e2) in [(1, 1), (0, 0), (1, 0), (0, 1), (-1, -1), (2, 2)] {
                let b = CoweightVector::from_ints(&[e1, e2]);
                let zero = CoweightVector::zero(2);
                let mu_target = shape.sub(&b);
                let cutoffs = EnumerationCutoffs::for_problem(&sys, &shape, &mu_target, 6);
                let found = match enumerate_hecke(&sys, &shape, &zero, &b, &cutoffs) {
                    Ok(f) => f,
                    Err(e) => panic!("enumeration failed: {e}"),
                };
                for (p, _) in &found.paths {
                    assert_eq!(p.endpoint(), b);
                    let (mu, ok) = deficit(&sys, p);
                    assert!(ok);
                    assert!(dominance_monotonicity_check(&sys, p));
                    let h = sys.height(&mu).unwrap();
                    let t_scale = rat_int(scale);
                    if t_scale > h {
                        let t_star = final_direction_time(p).expect("t* exists");
                        assert!(t_star <= h / t_scale);
                    }
                    // round trip through JSON
                    let js = path_to_json(p, None);
                    let back = path_from_json(&sys, &js).unwrap();
                    assert_eq!(&back, p);
                }
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let sys = sl2();
        let zero = CoweightVector::zero(1);
        let alpha_vee = CoweightVector::from_ints(&[1]);
        let b = sufficiently_dominant_bound(&sys, &zero, &alpha_vee).unwrap();
        assert_eq!(b, vec![Rat::zero()]);
        let b = sufficiently_dominant_bound(&sys, &alpha_vee.neg(), &alpha_vee).unwrap();
        assert_eq!(b, vec![rat_int(2)]);

        let a2 = presets::a2_simply_connected();
        let rho = CoweightVector::from_ints(&[1, 1]);
        let b = sufficiently_dominant_bound(&a2, &rho.neg(), &rho).unwrap();
        assert_eq!(b, vec![rat_int(2), rat_int(2)]);

        // cone checks
        assert!(sufficiently_dominant_bound(&sys, &alpha_vee, &alpha_vee).is_err());
        assert!(
            sufficiently_dominant_bound(&a2, &rho.neg(), &CoweightVector::from_ints(&[1, 0]))
                .is_err()
        );
    }

    #[test]
    fn bounding_ball_examples() {
        let sys = sl2();
        let basis = crate::coweight_monoid::hilbert_basis(&sys, 12, 32).unwrap();
        let mu = CoweightVector::from_ints(&[-1]); // H = 2
        let ball = bounding_ball(&sys, &basis, &[5], &mu).unwrap();
        assert_eq!(ball.cap, 2);
        assert_eq!(ball.center, CoweightVector::from_ints(&[3]));
        assert_eq!(ball.shape, CoweightVector::from_ints(&[2]));

        let ball = bounding_ball(&sys, &basis, &[1], &mu).unwrap();
        assert_eq!(ball.center, CoweightVector::from_ints(&[0]));
        assert_eq!(ball.shape, CoweightVector::from_ints(&[1]));

        let a11 = presets::a1xa1_simply_connected();
        let basis = crate::coweight_monoid::hilbert_basis(&a11, 12, 32).unwrap();
        // mu = -alpha_1_vee - 2 alpha_2_vee: H = 4
        let mu = CoweightVector::from_ints(&[-1, -2]);
        // lambda = 6 e_1 + 3 e_2; generators sort as [e_2, e_1]
        let lam = CoweightVector::from_ints(&[6, 3]);
        let coeffs = crate::coweight_monoid::decompose_in_basis(&a11, &lam, &basis).unwrap();
        let ball = bounding_ball(&a11, &basis, &coeffs, &mu).unwrap();
        assert_eq!(ball.cap, 4);
        assert_eq!(ball.center, CoweightVector::from_ints(&[2, 0]));
        assert_eq!(ball.shape, CoweightVector::from_ints(&[4, 3]));
        assert_eq!(ball.center.add(&ball.shape), lam);

        // rational mu is rejected for the integer-cone operation
        let half = CoweightVector::new(vec![rat(-1, 2), rat_int(0)]);
        assert!(bounding_ball(&a11, &basis, &coeffs, &half).is_err());
    }
}
