//! Exact rank-one masure oracle: the `(q+1)`-regular tree with a marked
//! apartment, and products of two such trees.
//!
//! Positions on the marked apartment are integers in units of
//! `alpha_vee / 2` (one tree edge), so the walls of the rank-one system
//! sit exactly at the integer positions and type-0 vertices are the even
//! ones. A vertex off the apartment is addressed by its gate (the
//! apartment position where its geodesic meets the apartment) and the
//! child path of its branch; parent/children links are computed, never
//! stored, so a `build` is cheap and counting in a fiber touches only
//! that fiber's region. Full scans respect a resource guard instead of
//! materializing `q^depth` nodes.
//!
//! Retractions fold geodesics: a vertex with gate `p` at branch depth `d`
//! retracts to `p + d` seen from `-infinity` and to `p - d` seen from
//! `+infinity`. This sign convention makes the retraction difference
//! `rho_minus - rho_plus = d * alpha_vee` a nonnegative coroot multiple.

use crate::rational::{rat, Rat};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MasureError {
    #[error("invalid tree parameters: {0}")]
    BadParams(String),
    #[error("vertex does not belong to the built tree")]
    InvalidVertex,
    #[error("operation needs radius {needed} but the tree was built to depth {available}")]
    DepthExceeded { needed: i64, available: i64 },
    #[error("enumeration of {size} vertices exceeds the scan limit {limit}")]
    ResourceGuard { size: u128, limit: u128 },
}

/// A vertex: apartment position (empty branch) or an off-apartment node
/// addressed by gate and child path. The first branch step picks one of
/// the `q - 1` non-apartment edges at the gate, later steps one of the
/// `q` forward edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Vertex {
    pub gate: i64,
    pub branch: Vec<u8>,
}

impl Vertex {
    pub fn apartment(pos: i64) -> Self {
        Vertex {
            gate: pos,
            branch: Vec::new(),
        }
    }

    /// Graph distance to the apartment.
    pub fn branch_depth(&self) -> i64 {
        self.branch.len() as i64
    }

    pub fn on_apartment(&self) -> bool {
        self.branch.is_empty()
    }

    /// Type-0 vertices are the even apartment positions and the vertices
    /// retracting onto them.
    pub fn is_type0(&self) -> bool {
        (self.gate + self.branch_depth()).rem_euclid(2) == 0
    }
}

/// The `(q+1)`-regular tree built around the apartment segment
/// `[-depth, depth]`, holding every vertex within graph distance
/// `depth` of that segment.
#[derive(Debug, Clone)]
pub struct TreeMasure {
    q: u64,
    depth: i64,
    scan_limit: u128,
}

pub const DEFAULT_SCAN_LIMIT: u128 = 40_000_000;

impl TreeMasure {
    pub fn build(q: u64, depth: i64) -> Result<Self, MasureError> {
        if q < 2 {
            return Err(MasureError::BadParams(format!(
                "thickness parameter q = {q} must be at least 2"
            )));
        }
        if q > 64 {
            return Err(MasureError::BadParams(format!(
                "q = {q} exceeds the supported branching limit 64"
            )));
        }
        if !(1..=64).contains(&depth) {
            return Err(MasureError::BadParams(format!(
                "depth = {depth} must lie in 1..=64"
            )));
        }
        Ok(TreeMasure {
            q,
            depth,
            scan_limit: DEFAULT_SCAN_LIMIT,
        })
    }

    pub fn with_scan_limit(mut self, limit: u128) -> Self {
        self.scan_limit = limit;
        self
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    /// Number of off-apartment vertices gated at one apartment vertex
    /// with branch depth exactly `d > 0`: `(q-1) q^(d-1)`. For `d = 0`
    /// the gate itself.
    pub fn fiber_size(&self, d: i64) -> u128 {
        if d == 0 {
            return 1;
        }
        (self.q as u128 - 1) * (self.q as u128).pow(d as u32 - 1)
    }

    /// Total vertex count `(2 depth + 1) * q^depth`.
    pub fn vertex_count(&self) -> u128 {
        let mut per_gate: u128 = 0;
        for d in 0..=self.depth {
            per_gate += self.fiber_size(d);
        }
        (2 * self.depth as u128 + 1) * per_gate
    }

    /// Checks that a vertex belongs to the built tree.
    pub fn contains(&self, v: &Vertex) -> bool {
        if v.gate.abs() > self.depth || v.branch_depth() > self.depth {
            return false;
        }
        if let Some((&first, rest)) = v.branch.split_first() {
            if u64::from(first) >= self.q - 1 {
                return false;
            }
            if rest.iter().any(|&c| u64::from(c) >= self.q) {
                return false;
            }
        }
        true
    }

    fn check(&self, v: &Vertex) -> Result<(), MasureError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(MasureError::InvalidVertex)
        }
    }

    /// Retraction centred at the sector germ `+infinity`.
    pub fn rho_plus(&self, v: &Vertex) -> i64 {
        v.gate - v.branch_depth()
    }

    /// Retraction centred at the sector germ `-infinity`.
    pub fn rho_minus(&self, v: &Vertex) -> i64 {
        v.gate + v.branch_depth()
    }

    /// Graph distance between two vertices.
    pub fn dist(&self, x: &Vertex, y: &Vertex) -> i64 {
        if x.gate != y.gate {
            return x.branch_depth() + (x.gate - y.gate).abs() + y.branch_depth();
        }
        let common = x
            .branch
            .iter()
            .zip(&y.branch)
            .take_while(|(a, b)| a == b)
            .count() as i64;
        x.branch_depth() + y.branch_depth() - 2 * common
    }

    /// Vectorial distance in units of `alpha_vee / 2`. In rank one the
    /// Tits cone is the whole line, so every pair is comparable and the
    /// distance is always defined (it equals the graph distance).
    pub fn dv_units(&self, x: &Vertex, y: &Vertex) -> i64 {
        self.dist(x, y)
    }

    /// Neighbors inside the built tree.
    pub fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        if v.on_apartment() {
            if v.gate > -self.depth {
                out.push(Vertex::apartment(v.gate - 1));
            }
            if v.gate < self.depth {
                out.push(Vertex::apartment(v.gate + 1));
            }
            if self.depth >= 1 {
                for c in 0..(self.q - 1) as u8 {
                    out.push(Vertex {
                        gate: v.gate,
                        branch: vec![c],
                    });
                }
            }
        } else {
            let mut parent = v.clone();
            parent.branch.pop();
            out.push(parent);
            if v.branch_depth() < self.depth {
                for c in 0..self.q as u8 {
                    let mut child = v.clone();
                    child.branch.push(c);
                    out.push(child);
                }
            }
        }
        out
    }

    /// Visits every vertex of the built tree once. Refuses when the full
    /// enumeration would exceed the scan limit.
    pub fn for_each_vertex(&self, mut f: impl FnMut(&Vertex)) -> Result<(), MasureError> {
        let size = self.vertex_count();
        if size > self.scan_limit {
            return Err(MasureError::ResourceGuard {
                size,
                limit: self.scan_limit,
            });
        }
        for gate in -self.depth..=self.depth {
            self.for_each_in_fiber(gate, self.depth, &mut f);
        }
        Ok(())
    }

    /// Visits every vertex gated at `gate` with branch depth `<= max_depth`
    /// (including the apartment vertex itself).
    fn for_each_in_fiber(&self, gate: i64, max_depth: i64, f: &mut impl FnMut(&Vertex)) {
        let mut v = Vertex::apartment(gate);
        f(&v);
        if max_depth == 0 {
            return;
        }
        // iterative depth-first over child paths
        v.branch.push(0);
        loop {
            let top = *v.branch.last().unwrap() as u64;
            let width = if v.branch.len() == 1 {
                self.q - 1
            } else {
                self.q
            };
            if top >= width {
                v.branch.pop();
                match v.branch.last_mut() {
                    None => return,
                    Some(last) => *last += 1,
                }
                continue;
            }
            f(&v);
            if (v.branch.len() as i64) < max_depth {
                v.branch.push(0);
            } else {
                *v.branch.last_mut().unwrap() += 1;
            }
        }
    }

    /// All vertices of the built tree (small trees only).
    pub fn collect_vertices(&self) -> Result<Vec<Vertex>, MasureError> {
        let mut out = Vec::new();
        self.for_each_vertex(|v| out.push(v.clone()))?;
        Ok(out)
    }

    /// Projection data onto the apartment along the ray toward
    /// `+infinity`: the first apartment point `y` of the ray, and
    /// `T` with `y = rho_plus(x) + T alpha_vee`. In the tree both rays
    /// from `x` enter the apartment at the gate, so `y` is the gate and
    /// `T = d / 2` where `d` is the branch depth.
    pub fn y_t_plus(&self, v: &Vertex) -> Result<(i64, Rat), MasureError> {
        self.check(v)?;
        Ok((v.gate, rat(v.branch_depth(), 2)))
    }

    /// Projection along the ray toward `-infinity`: `y` with
    /// `rho_minus(x) = y + T alpha_vee`.
    pub fn y_t_minus(&self, v: &Vertex) -> Result<(i64, Rat), MasureError> {
        self.check(v)?;
        Ok((v.gate, rat(v.branch_depth(), 2)))
    }

    /// The sphere `S^v(a, m)`: vertices at vectorial distance `m` units
    /// from `a`. The whole ball of radius `m` around `a` must fit in the
    /// built tree.
    pub fn sphere(&self, a: &Vertex, m: i64) -> Result<Vec<Vertex>, MasureError> {
        self.check(a)?;
        if m < 0 {
            return Ok(Vec::new());
        }
        if m == 0 {
            return Ok(vec![a.clone()]);
        }
        let needed = (a.gate.abs() + m).max(a.branch_depth() + m);
        if needed > self.depth {
            return Err(MasureError::DepthExceeded {
                needed,
                available: self.depth,
            });
        }
        let size = (self.q as u128 + 1) * (self.q as u128).pow(m as u32 - 1);
        if size > self.scan_limit {
            return Err(MasureError::ResourceGuard {
                size,
                limit: self.scan_limit,
            });
        }
        // BFS by levels; in a tree the only revisit risk is the immediate
        // predecessor, so carry it along
        let mut frontier: Vec<(Vertex, Option<Vertex>)> = vec![(a.clone(), None)];
        for _ in 0..m {
            let mut next = Vec::new();
            for (v, pred) in &frontier {
                for n in self.neighbors(v) {
                    if Some(&n) != pred.as_ref() {
                        next.push((n, Some(v.clone())));
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Vertex> = frontier.into_iter().map(|(v, _)| v).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The apartment translation by `m * alpha_vee` (2m units), applied
    /// to a vertex. Fails when the image leaves the built tree.
    pub fn translate_vertex(&self, m: i64, v: &Vertex) -> Result<Vertex, MasureError> {
        self.check(v)?;
        let img = Vertex {
            gate: v.gate + 2 * m,
            branch: v.branch.clone(),
        };
        self.check(&img).map_err(|_| MasureError::DepthExceeded {
            needed: img.gate.abs(),
            available: self.depth,
        })?;
        Ok(img)
    }

    /// Exact count of the bi-retraction fiber
    /// `rho_minus^{-1}(lambda) cap rho_plus^{-1}(lambda + mu)`, positions
    /// in units of `alpha_vee / 2`.
    ///
    /// The count scans the region that could contain the fiber (gates
    /// within the needed radius of `lambda`, branch depth up to that
    /// radius) and tests both retraction values on each vertex; the
    /// certificate records the radius argument.
    pub fn count_bi_retraction_units(
        &self,
        lambda: i64,
        mu: i64,
    ) -> Result<CountCertificate, MasureError> {
        // retraction differences are even and nonnegative, so a positive
        // or odd mu empties the fiber with no scan needed
        if mu > 0 || mu.rem_euclid(2) == 1 {
            return Ok(CountCertificate {
                lambda_units: lambda,
                mu_units: mu,
                count: 0,
                radius_needed: 0,
                depth_available: self.depth,
                empty_by_sign: true,
            });
        }
        let d = -mu / 2;
        let radius_needed = (lambda - d).abs().max(d);
        if radius_needed > self.depth {
            return Err(MasureError::DepthExceeded {
                needed: radius_needed,
                available: self.depth,
            });
        }
        let mut count: u128 = 0;
        for gate in (lambda - d)..=lambda {
            if gate.abs() > self.depth {
                continue;
            }
            self.for_each_in_fiber(gate, d.min(self.depth), &mut |v: &Vertex| {
                if self.rho_minus(v) == lambda && self.rho_plus(v) == lambda + mu {
                    count += 1;
                }
            });
        }
        Ok(CountCertificate {
            lambda_units: lambda,
            mu_units: mu,
            count,
            radius_needed,
            depth_available: self.depth,
            empty_by_sign: false,
        })
    }

    /// Same count with `lambda`, `mu` given as coroot multiples
    /// (type-0 data).
    pub fn count_bi_retraction(
        &self,
        lambda_coroot: i64,
        mu_coroot: i64,
    ) -> Result<CountCertificate, MasureError> {
        self.count_bi_retraction_units(2 * lambda_coroot, 2 * mu_coroot)
    }

    /// Vertices of the bi-retraction fiber (for set-level comparisons).
    pub fn bi_retraction_fiber(&self, lambda: i64, mu: i64) -> Result<Vec<Vertex>, MasureError> {
        let mut out = Vec::new();
        if mu > 0 || mu.rem_euclid(2) == 1 {
            return Ok(out);
        }
        let d = -mu / 2;
        let radius_needed = (lambda - d).abs().max(d);
        if radius_needed > self.depth {
            return Err(MasureError::DepthExceeded {
                needed: radius_needed,
                available: self.depth,
            });
        }
        for gate in (lambda - d)..=lambda {
            if gate.abs() > self.depth {
                continue;
            }
            self.for_each_in_fiber(gate, d.min(self.depth), &mut |v: &Vertex| {
                if self.rho_minus(v) == lambda && self.rho_plus(v) == lambda + mu {
                    out.push(v.clone());
                }
            });
        }
        out.sort();
        Ok(out)
    }

    /// Members of `S^v(0, lambda) cap rho_plus^{-1}(lambda + mu)`
    /// (positions in units). An anti-dominant `lambda` has an empty
    /// sphere.
    pub fn sphere_retraction_fiber(
        &self,
        lambda: i64,
        mu: i64,
    ) -> Result<Vec<Vertex>, MasureError> {
        if lambda < 0 {
            return Ok(Vec::new());
        }
        let origin = Vertex::apartment(0);
        let sphere = self.sphere(&origin, lambda)?;
        Ok(sphere
            .into_iter()
            .filter(|v| self.rho_plus(v) == lambda + mu)
            .collect())
    }

    /// Per-`lambda` equality of bi-retraction counts with the count at
    /// `lambda = 0` (both in coroot multiples).
    pub fn verify_invariance(
        &self,
        mu_coroot: i64,
        lambda_range: std::ops::RangeInclusive<i64>,
    ) -> Result<InvarianceReport, MasureError> {
        let base = self.count_bi_retraction(0, mu_coroot)?;
        let mut rows = Vec::new();
        let mut all_equal = true;
        for l in lambda_range {
            let c = self.count_bi_retraction(l, mu_coroot)?;
            all_equal &= c.count == base.count;
            rows.push(InvarianceRow {
                lambda_coroot: l,
                count: c.count,
            });
        }
        Ok(InvarianceReport {
            q: self.q,
            mu_coroot,
            base_count: base.count,
            rows,
            all_equal,
        })
    }

    /// Inclusion and equality of the bi-retraction fiber against the
    /// sphere fiber, per `lambda` (coroot multiples). The caller supplies
    /// the dominance threshold (in coroot multiples) above which the
    /// inclusion is expected to hold.
    pub fn verify_inclusion_equality(
        &self,
        mu_coroot: i64,
        lambda_range: std::ops::RangeInclusive<i64>,
        threshold_coroot: i64,
    ) -> Result<InclusionReport, MasureError> {
        let mut rows = Vec::new();
        for l in lambda_range {
            let a = self.bi_retraction_fiber(2 * l, 2 * mu_coroot)?;
            let b = self.sphere_retraction_fiber(2 * l, 2 * mu_coroot)?;
            let included = a.iter().all(|v| b.binary_search(v).is_ok());
            let equal = included && a.len() == b.len();
            rows.push(InclusionRow {
                lambda_coroot: l,
                fiber_size: a.len(),
                sphere_fiber_size: b.len(),
                included,
                equal,
            });
        }
        let min_included_onward = stable_onset(&rows, |r| r.included);
        let min_equal_onward = stable_onset(&rows, |r| r.equal);
        let inclusion_holds_from_threshold = rows
            .iter()
            .filter(|r| r.lambda_coroot >= threshold_coroot)
            .all(|r| r.included);
        Ok(InclusionReport {
            q: self.q,
            mu_coroot,
            threshold_coroot,
            rows,
            min_lambda_included_onward: min_included_onward,
            min_lambda_equal_onward: min_equal_onward,
            inclusion_holds_from_threshold,
        })
    }
}

/// Smallest `lambda` in the tested range from which the predicate holds
/// for every later row.
fn stable_onset(rows: &[InclusionRow], pred: impl Fn(&InclusionRow) -> bool) -> Option<i64> {
    let mut onset = None;
    for r in rows {
        if pred(r) {
            onset.get_or_insert(r.lambda_coroot);
        } else {
            onset = None;
        }
    }
    onset
}

/// Result of a bi-retraction count with its depth-sufficiency data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountCertificate {
    pub lambda_units: i64,
    pub mu_units: i64,
    pub count: u128,
    pub radius_needed: i64,
    pub depth_available: i64,
    pub empty_by_sign: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceRow {
    pub lambda_coroot: i64,
    pub count: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub q: u64,
    pub mu_coroot: i64,
    pub base_count: u128,
    pub rows: Vec<InvarianceRow>,
    pub all_equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionRow {
    pub lambda_coroot: i64,
    pub fiber_size: usize,
    pub sphere_fiber_size: usize,
    pub included: bool,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub q: u64,
    pub mu_coroot: i64,
    pub threshold_coroot: i64,
    pub rows: Vec<InclusionRow>,
    pub min_lambda_included_onward: Option<i64>,
    pub min_lambda_equal_onward: Option<i64>,
    pub inclusion_holds_from_threshold: bool,
}

// ---------------------------------------------------------------------------
// product of two rank-one oracles
// ---------------------------------------------------------------------------

/// Product of two tree oracles, with optional inessential coordinates
/// carried along as exact rationals. Retractions, projections and
/// translations act componentwise and fix the inessential part, so
/// counts over the product multiply.
#[derive(Debug, Clone)]
pub struct ProductMasure {
    pub left: TreeMasure,
    pub right: TreeMasure,
    pub inessential_dim: usize,
}

/// A point of the product masure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductVertex {
    pub left: Vertex,
    pub right: Vertex,
    pub inessential: Vec<Rat>,
}

/// A point of the product apartment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductPoint {
    pub left: i64,
    pub right: i64,
    pub inessential: Vec<Rat>,
}

impl ProductMasure {
    pub fn new(left: TreeMasure, right: TreeMasure, inessential_dim: usize) -> Self {
        ProductMasure {
            left,
            right,
            inessential_dim,
        }
    }

    fn check(&self, v: &ProductVertex) -> Result<(), MasureError> {
        if v.inessential.len() != self.inessential_dim {
            return Err(MasureError::InvalidVertex);
        }
        self.left.check(&v.left)?;
        self.right.check(&v.right)
    }

    pub fn rho_plus(&self, v: &ProductVertex) -> ProductPoint {
        ProductPoint {
            left: self.left.rho_plus(&v.left),
            right: self.right.rho_plus(&v.right),
            inessential: v.inessential.clone(),
        }
    }

    pub fn rho_minus(&self, v: &ProductVertex) -> ProductPoint {
        ProductPoint {
            left: self.left.rho_minus(&v.left),
            right: self.right.rho_minus(&v.right),
            inessential: v.inessential.clone(),
        }
    }

    /// Componentwise projection toward `-infinity`; the inessential part
    /// is untouched.
    pub fn y_t_minus(&self, v: &ProductVertex) -> Result<(ProductPoint, (Rat, Rat)), MasureError> {
        self.check(v)?;
        let (y1, t1) = self.left.y_t_minus(&v.left)?;
        let (y2, t2) = self.right.y_t_minus(&v.right)?;
        Ok((
            ProductPoint {
                left: y1,
                right: y2,
                inessential: v.inessential.clone(),
            },
            (t1, t2),
        ))
    }

    /// Translation by coroot multiples `(m1, m2)` plus an inessential
    /// shift.
    pub fn translate_vertex(
        &self,
        m: (i64, i64),
        shift: &[Rat],
        v: &ProductVertex,
    ) -> Result<ProductVertex, MasureError> {
        self.check(v)?;
        assert_eq!(shift.len(), self.inessential_dim);
        Ok(ProductVertex {
            left: self.left.translate_vertex(m.0, &v.left)?,
            right: self.right.translate_vertex(m.1, &v.right)?,
            inessential: v
                .inessential
                .iter()
                .zip(shift)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn translate_point(&self, m: (i64, i64), shift: &[Rat], p: &ProductPoint) -> ProductPoint {
        ProductPoint {
            left: p.left + 2 * m.0,
            right: p.right + 2 * m.1,
            inessential: p
                .inessential
                .iter()
                .zip(shift)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Count of the product bi-retraction fiber over apartment points
    /// with matching inessential part: the product of the component
    /// counts. The inessential coordinates are fixed by retractions, so a
    /// nonzero inessential offset in `mu` empties the fiber.
    pub fn count_bi_retraction(
        &self,
        lambda: (i64, i64),
        mu: (i64, i64),
        mu_inessential_is_zero: bool,
    ) -> Result<u128, MasureError> {
        if !mu_inessential_is_zero {
            return Ok(0);
        }
        let a = self.left.count_bi_retraction(lambda.0, mu.0)?;
        let b = self.right.count_bi_retraction(lambda.1, mu.1)?;
        Ok(a.count * b.count)
    }

    /// The same count by explicit enumeration of vertex pairs.
    pub fn count_bi_retraction_pairs(
        &self,
        lambda: (i64, i64),
        mu: (i64, i64),
    ) -> Result<u128, MasureError> {
        let fa = self.left.bi_retraction_fiber(2 * lambda.0, 2 * mu.0)?;
        let fb = self.right.bi_retraction_fiber(2 * lambda.1, 2 * mu.1)?;
        Ok(fa.len() as u128 * fb.len() as u128)
    }
}
