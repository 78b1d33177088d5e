//! Truncated formal series over coweight monomials `e^mu`, `mu` in the
//! negative coroot cone, with coefficients that are rational Laurent
//! polynomials in `q`.
//!
//! Keeping `q` symbolic makes the series identities exact: the right
//! side of the Gindikin-Karpelevich identity is a finite product of
//! geometric factors `(1 - q^{-1} e^{-alpha_vee}) / (1 - e^{-alpha_vee})`
//! expanded to the truncation order, and the left side collects
//! bi-retraction counts weighted by `q^{h(mu)}`. Comparison is
//! coefficientwise, either symbolically or evaluated at an exact
//! rational `q`.

use crate::rational::{format_rat, parse_rat, rat_int, Rat};
use crate::rootdata::{rat_to_i64, CoweightVector, RootGeneratingSystem};
use crate::weylgeom::{real_roots_up_to_height, RealRoot};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series have different truncations or ranks")]
    ShapeMismatch,
    #[error("normalization factor is not invertible (leading coefficient must be a unit)")]
    NotInvertible,
    #[error("missing multiplicity for the positive root with coefficients {root:?}")]
    MissingMultiplicity { root: Vec<i64> },
    #[error("counter failed: {0}")]
    Counter(String),
}

/// A Laurent polynomial in `q` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QLaurent {
    /// exponent -> coefficient; zero coefficients are never stored
    coeffs: BTreeMap<i64, Rat>,
}

impl QLaurent {
    pub fn zero() -> Self {
        QLaurent::default()
    }

    pub fn one() -> Self {
        QLaurent::monomial(0, rat_int(1))
    }

    pub fn monomial(exp: i64, coeff: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        QLaurent { coeffs }
    }

    pub fn from_integer(n: i64) -> Self {
        QLaurent::monomial(0, rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exp: i64) -> Rat {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let entry = out.entry(*e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                out.remove(e);
            }
        }
        QLaurent { coeffs: out }
    }

    pub fn neg(&self) -> Self {
        QLaurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, Rat> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let entry = out.entry(e1 + e2).or_insert_with(Rat::zero);
                *entry += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        QLaurent { coeffs: out }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = QLaurent::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Inverse of a unit monomial `c q^k`; `None` otherwise.
    pub fn invert_monomial(&self) -> Option<Self> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (e, c) = self.coeffs.iter().next().unwrap();
        Some(QLaurent::monomial(-e, Rat::one() / c))
    }

    /// Exact evaluation at a rational `q != 0`.
    pub fn eval(&self, q: &Rat) -> Rat {
        assert!(!q.is_zero());
        let mut acc = Rat::zero();
        for (e, c) in &self.coeffs {
            let mut p = Rat::one();
            for _ in 0..e.unsigned_abs() {
                p *= q;
            }
            if *e < 0 {
                p = p.recip();
            }
            acc += c * p;
        }
        acc
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let unit_coeff = mag.is_one();
            match (*e, unit_coeff) {
                (0, _) => write!(f, "{}", format_rat(&mag))?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{}*q", format_rat(&mag))?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{}*q^{e}", format_rat(&mag))?,
            }
        }
        Ok(())
    }
}

/// Monomial keys: integer coefficient tuples over the simple coroots,
/// nonpositive in every entry for the supported cone.
pub type MonomialKey = Vec<i64>;

fn key_height(key: &[i64]) -> i64 {
    key.iter().sum()
}

/// All nonpositive keys of the given rank with `|h| <= truncation`,
/// sorted by `(-h, lex)`.
pub fn nonpositive_keys(rank: usize, truncation: u32) -> Vec<MonomialKey> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn rec(cur: &mut Vec<i64>, idx: usize, left: i64, out: &mut Vec<MonomialKey>) {
        if idx == cur.len() {
            out.push(cur.clone());
            return;
        }
        for n in 0..=left {
            cur[idx] = -n;
            rec(cur, idx + 1, left - n, out);
        }
        cur[idx] = 0;
    }
    rec(&mut cur, 0, truncation as i64, &mut out);
    out.sort_by_key(|k| (-key_height(k), k.clone()));
    out
}

/// A truncated series over coweight monomials with `QLaurent`
/// coefficients; support inside the negative coroot cone with
/// `h(mu) >= -truncation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoweightSeries {
    rank: usize,
    truncation: u32,
    coeffs: BTreeMap<MonomialKey, QLaurent>,
}

impl CoweightSeries {
    pub fn zero(rank: usize, truncation: u32) -> Self {
        CoweightSeries {
            rank,
            truncation,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, truncation: u32) -> Self {
        let mut s = Self::zero(rank, truncation);
        s.set(vec![0; rank], QLaurent::one());
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    fn admissible(&self, key: &[i64]) -> bool {
        key.len() == self.rank
            && key.iter().all(|&x| x <= 0)
            && -key_height(key) <= self.truncation as i64
    }

    pub fn set(&mut self, key: MonomialKey, value: QLaurent) {
        assert!(self.admissible(&key), "monomial key outside the truncation");
        if value.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, value);
        }
    }

    pub fn coeff(&self, key: &[i64]) -> QLaurent {
        self.coeffs.get(key).cloned().unwrap_or_else(QLaurent::zero)
    }

    /// Entries sorted by `(-h(mu), lex)`.
    pub fn entries_sorted(&self) -> Vec<(&MonomialKey, &QLaurent)> {
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by_key(|(k, _)| (-key_height(k), (*k).clone()));
        v
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.rank != other.rank || self.truncation != other.truncation {
            return Err(SeriesError::ShapeMismatch);
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            let sum = out.coeff(k).add(v);
            out.set(k.clone(), sum);
        }
        Ok(out)
    }

    /// Truncated product: keys beyond the truncation order drop out.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.rank != other.rank || self.truncation != other.truncation {
            return Err(SeriesError::ShapeMismatch);
        }
        let mut out = Self::zero(self.rank, self.truncation);
        for (k1, v1) in &self.coeffs {
            for (k2, v2) in &other.coeffs {
                let key: MonomialKey = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                if -key_height(&key) > self.truncation as i64 {
                    continue;
                }
                let acc = out.coeff(&key).add(&v1.mul(v2));
                out.set(key, acc);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse, defined when the constant coefficient is
    /// a unit monomial in `q`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let zero_key = vec![0i64; self.rank];
        let lead = self.coeff(&zero_key);
        let lead_inv = lead.invert_monomial().ok_or(SeriesError::NotInvertible)?;
        let mut inv = Self::zero(self.rank, self.truncation);
        inv.set(zero_key.clone(), lead_inv.clone());
        for key in nonpositive_keys(self.rank, self.truncation) {
            if key == zero_key {
                continue;
            }
            // inv[key] = -lead^{-1} * sum_{nu + rho = key, nu != 0} s[nu] inv[rho]
            let mut acc = QLaurent::zero();
            for (nu, s_nu) in &self.coeffs {
                if nu == &zero_key {
                    continue;
                }
                let rho: MonomialKey = key.iter().zip(nu).map(|(k, n)| k - n).collect();
                if rho.iter().any(|&x| x > 0) {
                    continue;
                }
                let inv_rho = inv.coeff(&rho);
                if !inv_rho.is_zero() {
                    acc = acc.add(&s_nu.mul(&inv_rho));
                }
            }
            let val = lead_inv.mul(&acc).neg();
            inv.set(key, val);
        }
        Ok(inv)
    }

    /// Coefficientwise difference report; empty means equal. With an
    /// evaluation point the Laurent coefficients are compared as exact
    /// rationals at that `q`.
    pub fn compare(&self, other: &Self, at: Option<&Rat>) -> Result<Vec<DiffEntry>, SeriesError> {
        if self.rank != other.rank || self.truncation != other.truncation {
            return Err(SeriesError::ShapeMismatch);
        }
        let mut keys: Vec<MonomialKey> = self.coeffs.keys().cloned().collect();
        keys.extend(other.coeffs.keys().cloned());
        keys.sort_by_key(|k| (-key_height(k), k.clone()));
        keys.dedup();
        let mut diffs = Vec::new();
        for k in keys {
            let a = self.coeff(&k);
            let b = other.coeff(&k);
            let differ = match at {
                None => a != b,
                Some(q) => a.eval(q) != b.eval(q),
            };
            if differ {
                diffs.push(DiffEntry {
                    mu: k,
                    left: a,
                    right: b,
                });
            }
        }
        Ok(diffs)
    }
}

/// One coefficient disagreement between two series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffEntry {
    pub mu: MonomialKey,
    pub left: QLaurent,
    pub right: QLaurent,
}

// ---------------------------------------------------------------------------
// the two sides of the identity
// ---------------------------------------------------------------------------

/// Positive real roots whose coroot height is at most the truncation;
/// these are exactly the factors that touch the truncated product. Roots
/// are searched up to a root-height ceiling derived from the truncation.
pub fn required_roots(sys: &RootGeneratingSystem, truncation: u32) -> Vec<RealRoot> {
    let ceiling = 3 * truncation as i64 + 3;
    real_roots_up_to_height(sys, ceiling)
        .into_iter()
        .filter(|r| {
            let h = r.coroot_height(sys);
            h <= rat_int(truncation as i64)
        })
        .collect()
}

/// All required roots with multiplicity one (the reductive default).
pub fn default_multiplicities(sys: &RootGeneratingSystem, truncation: u32) -> Vec<(RealRoot, u32)> {
    required_roots(sys, truncation)
        .into_iter()
        .map(|r| (r, 1))
        .collect()
}

/// The truncated product side
/// `(1/H_0) prod_alpha ((1 - q^{-1} e^{-alpha_vee}) / (1 - e^{-alpha_vee}))^{m_alpha}`.
///
/// Every positive real root of coroot height within the truncation must
/// carry a supplied multiplicity; `h0` must be invertible.
pub fn rhs_product(
    sys: &RootGeneratingSystem,
    truncation: u32,
    multiplicities: &[(RealRoot, u32)],
    h0: &CoweightSeries,
) -> Result<CoweightSeries, SeriesError> {
    let rank = sys.index_count();
    for needed in required_roots(sys, truncation) {
        if !multiplicities
            .iter()
            .any(|(r, _)| r.form_coeffs() == needed.form_coeffs())
        {
            return Err(SeriesError::MissingMultiplicity {
                root: needed.form_coeffs().to_vec(),
            });
        }
    }
    let mut out = h0.inverse()?;
    for (root, mult) in multiplicities {
        let coroot_key: MonomialKey = sys
            .qvee_decompose(root.coroot())
            .expect("real coroots lie in the coroot span")
            .iter()
            .map(|c| rat_to_i64(c).expect("integer coroot coefficients"))
            .collect();
        let step = key_height(&coroot_key); // = h(alpha_vee) > 0
        if step > truncation as i64 {
            continue; // factor is 1 within the truncation
        }
        // factor = 1 + (1 - q^{-1}) (x + x^2 + ...), x = e^{-alpha_vee}
        let mut factor = CoweightSeries::one(rank, truncation);
        let fringe = QLaurent::one().sub(&QLaurent::monomial(-1, Rat::one()));
        let mut k = 1i64;
        while k * step <= truncation as i64 {
            let key: MonomialKey = coroot_key.iter().map(|c| -c * k).collect();
            factor.set(key, fringe.clone());
            k += 1;
        }
        for _ in 0..*mult {
            out = out.mul(&factor)?;
        }
    }
    Ok(out)
}

/// The counting side: `sum_mu counter(mu) q^{h(mu)} e^mu` over the
/// monomials within the truncation. The counter receives `mu` as
/// nonpositive coroot coefficients.
pub fn lhs_from_counts(
    rank: usize,
    truncation: u32,
    mut counter: impl FnMut(&[i64]) -> Result<u128, SeriesError>,
) -> Result<CoweightSeries, SeriesError> {
    let mut out = CoweightSeries::zero(rank, truncation);
    for key in nonpositive_keys(rank, truncation) {
        let n = counter(&key)?;
        if n == 0 {
            continue;
        }
        let h = key_height(&key);
        let coeff = QLaurent::monomial(h, rat_int(n as i64));
        out.set(key, coeff);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// path-weight model
// ---------------------------------------------------------------------------

/// Weighted path count for the fiber reached by Hecke paths of the given
/// shape ending at `end`. The weight model is calibrated against the
/// rank-one tree oracle: `(q-1)` per chain fold step and per terminal
/// negative wall incidence, `q` per transversal negative wall crossing.
/// For indecomposable systems of rank at least two the output is flagged
/// experimental: no oracle validates it there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountEstimate {
    pub weight: QLaurent,
    pub path_count: usize,
    pub experimental: bool,
}

pub fn path_count_estimate(
    sys: &RootGeneratingSystem,
    shape: &CoweightVector,
    end: &CoweightVector,
    root_height_cutoff: i64,
) -> Result<PathCountEstimate, crate::hecke_paths::HeckeError> {
    let start = CoweightVector::zero(shape.dim());
    let mu_target = shape.sub(end);
    let cutoffs = crate::hecke_paths::EnumerationCutoffs::for_problem(
        sys,
        shape,
        &mu_target,
        root_height_cutoff,
    );
    let found = crate::hecke_paths::enumerate_hecke(sys, shape, &start, end, &cutoffs)?;
    let roots = real_roots_up_to_height(sys, root_height_cutoff);
    let mut total = QLaurent::zero();
    for (path, cert) in &found.paths {
        total = total.add(&path_weight(sys, path, cert, &roots));
    }
    let experimental = sys
        .matrix()
        .indecomposable_components()
        .iter()
        .any(|c| c.len() >= 2);
    Ok(PathCountEstimate {
        weight: total,
        path_count: found.paths.len(),
        experimental,
    })
}

fn path_weight(
    sys: &RootGeneratingSystem,
    path: &crate::hecke_paths::LambdaPath,
    cert: &crate::hecke_paths::HeckeCertificate,
    roots: &[RealRoot],
) -> QLaurent {
    use crate::rational::is_integer;
    let times = path.times();
    let dirs = path.directions();
    let mut q_pow: i64 = 0; // transversal negative crossings
    let mut qm1_pow: u32 = 0; // fold steps and terminal incidences
    for ch in &cert.chains {
        qm1_pow += ch.betas.len() as u32;
    }
    for beta in roots {
        for (k, d) in dirs.iter().enumerate() {
            let rate = beta.value(sys, &d.vector);
            if !rate.is_negative() {
                continue;
            }
            let v0 = beta.value(sys, &path.point_at(&times[k]));
            let v1 = beta.value(sys, &path.point_at(&times[k + 1]));
            // integers strictly between v1 and v0 cross transversally
            let mut m = v0.floor();
            if m == v0 {
                m -= Rat::one();
            }
            while m > v1 {
                q_pow += 1;
                m -= Rat::one();
            }
            let at_end = is_integer(&v1);
            if !at_end {
                continue;
            }
            if k + 1 == dirs.len() {
                // path terminates on this wall moving negatively
                qm1_pow += 1;
            } else {
                // pass-through at a breakpoint without folding at beta
                let next_rate = beta.value(sys, &dirs[k + 1].vector);
                if next_rate.is_negative() {
                    q_pow += 1;
                }
            }
        }
    }
    let q_minus_one = QLaurent::monomial(1, Rat::one()).sub(&QLaurent::one());
    QLaurent::monomial(q_pow, Rat::one()).mul(&q_minus_one.pow(qm1_pow))
}

// ---------------------------------------------------------------------------
// wire format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesEntryJson {
    pub mu: Vec<i64>,
    /// exponent (as a string key) -> rational coefficient "p/q"
    pub coeff: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub rank: usize,
    pub truncation: u32,
    pub entries: Vec<SeriesEntryJson>,
}

pub fn series_to_json(s: &CoweightSeries) -> SeriesJson {
    SeriesJson {
        rank: s.rank(),
        truncation: s.truncation(),
        entries: s
            .entries_sorted()
            .into_iter()
            .map(|(k, v)| SeriesEntryJson {
                mu: k.clone(),
                coeff: v
                    .terms()
                    .map(|(e, c)| (e.to_string(), format_rat(c)))
                    .collect(),
            })
            .collect(),
    }
}

pub fn series_from_json(json: &SeriesJson) -> Result<CoweightSeries, SeriesError> {
    let mut out = CoweightSeries::zero(json.rank, json.truncation);
    for e in &json.entries {
        let mut poly = QLaurent::zero();
        for (exp, c) in &e.coeff {
            let exp: i64 = exp
                .parse()
                .map_err(|_| SeriesError::Counter(format!("bad exponent {exp}")))?;
            let c = parse_rat(c).map_err(|e| SeriesError::Counter(e.to_string()))?;
            poly = poly.add(&QLaurent::monomial(exp, c));
        }
        out.set(e.mu.clone(), poly);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rootdata::presets;
    use crate::tree_masure::TreeMasure;

    #[test]
    fn laurent_arithmetic() {
        let a = QLaurent::monomial(1, rat_int(1)).add(&QLaurent::from_integer(-1)); // q - 1
        let b = QLaurent::monomial(-1, rat_int(1)); // q^{-1}
        let prod = a.mul(&b); // 1 - q^{-1}
        assert_eq!(prod.coeff(0), rat_int(1));
        assert_eq!(prod.coeff(-1), rat_int(-1));
        assert_eq!(prod.eval(&rat_int(2)), rat(1, 2));
        assert_eq!(format!("{prod}"), "1 - q^-1");
        assert_eq!(format!("{}", QLaurent::zero()), "0");
        // cancellation keeps the form canonical
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn rhs_rank_one_coefficients() {
        let sys = presets::sl2_simply_connected();
        let mults = default_multiplicities(&sys, 6);
        assert_eq!(mults.len(), 1);
        let h0 = CoweightSeries::one(1, 6);
        let rhs = rhs_product(&sys, 6, &mults, &h0).unwrap();
        assert_eq!(rhs.coeff(&[0]), QLaurent::one());
        let expect = QLaurent::one().sub(&QLaurent::monomial(-1, rat_int(1)));
        for n in 1..=6i64 {
            assert_eq!(rhs.coeff(&[-n]), expect, "coefficient at -{n} alpha_vee");
        }
    }

    #[test]
    fn rhs_product_of_factors() {
        let sys = presets::a1xa1_simply_connected();
        let mults = default_multiplicities(&sys, 4);
        assert_eq!(mults.len(), 2);
        let h0 = CoweightSeries::one(2, 4);
        let rhs = rhs_product(&sys, 4, &mults, &h0).unwrap();
        let fringe = QLaurent::one().sub(&QLaurent::monomial(-1, rat_int(1)));
        assert_eq!(rhs.coeff(&[-1, -1]), fringe.mul(&fringe));
        // direct-sum factorization: each factor alone
        let sl2 = presets::sl2_simply_connected();
        let rhs1 = rhs_product(
            &sl2,
            4,
            &default_multiplicities(&sl2, 4),
            &CoweightSeries::one(1, 4),
        )
        .unwrap();
        for n in 0..=4i64 {
            for m in 0..=(4 - n) {
                assert_eq!(
                    rhs.coeff(&[-n, -m]),
                    rhs1.coeff(&[-n]).mul(&rhs1.coeff(&[-m])),
                );
            }
        }
    }

    #[test]
    fn rhs_empty_root_list() {
        // a system with no roots inside the truncation window behaves as 1
        let sys = presets::sl2_simply_connected();
        let h0 = CoweightSeries::one(1, 0);
        let rhs = rhs_product(&sys, 0, &[], &h0).unwrap();
        assert_eq!(rhs, CoweightSeries::one(1, 0));
    }

    #[test]
    fn missing_multiplicity_is_reported() {
        let sys = presets::a1xa1_simply_connected();
        let mults = default_multiplicities(&sys, 4);
        let h0 = CoweightSeries::one(2, 4);
        let partial = &mults[..1];
        assert!(matches!(
            rhs_product(&sys, 4, partial, &h0),
            Err(SeriesError::MissingMultiplicity { .. })
        ));
    }

    #[test]
    fn h0_must_be_invertible() {
        let sys = presets::sl2_simply_connected();
        let mut h0 = CoweightSeries::zero(1, 2);
        h0.set(vec![0], QLaurent::one().add(&QLaurent::one())); // 2 is a unit
        assert!(rhs_product(&sys, 2, &default_multiplicities(&sys, 2), &h0).is_ok());
        let mut h0 = CoweightSeries::zero(1, 2);
        h0.set(
            vec![0],
            QLaurent::one().add(&QLaurent::monomial(1, rat_int(1))),
        );
        assert!(matches!(
            rhs_product(&sys, 2, &default_multiplicities(&sys, 2), &h0),
            Err(SeriesError::NotInvertible)
        ));
    }

    #[test]
    fn inverse_roundtrip() {
        let sys = presets::sl2_simply_connected();
        let mults = default_multiplicities(&sys, 5);
        let h0 = CoweightSeries::one(1, 5);
        let rhs = rhs_product(&sys, 5, &mults, &h0).unwrap();
        let inv = rhs.inverse().unwrap();
        let prod = rhs.mul(&inv).unwrap();
        assert!(prod
            .compare(&CoweightSeries::one(1, 5), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lhs_from_tree_counts() {
        let tree = TreeMasure::build(2, 8).unwrap();
        let lhs = lhs_from_counts(1, 6, |mu| {
            let n = -mu[0];
            Ok(tree
                .count_bi_retraction(0, -n)
                .map_err(|e| SeriesError::Counter(e.to_string()))?
                .count)
        })
        .unwrap();
        // coefficient at -alpha_vee: count (q-1) = 1 times q^{-1}
        assert_eq!(lhs.coeff(&[-1]), QLaurent::monomial(-1, rat_int(1)));
        assert_eq!(lhs.coeff(&[-1]).eval(&rat_int(2)), rat(1, 2));
        // trivial counter
        let one = lhs_from_counts(1, 6, |mu| Ok(u128::from(mu.iter().all(|&x| x == 0)))).unwrap();
        assert!(one
            .compare(&CoweightSeries::one(1, 6), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn identity_rank_one_at_small_q() {
        let sys = presets::sl2_simply_connected();
        for q in [2u64, 3] {
            let tree = TreeMasure::build(q, 8).unwrap();
            let lhs = lhs_from_counts(1, 6, |mu| {
                Ok(tree
                    .count_bi_retraction(0, mu[0])
                    .map_err(|e| SeriesError::Counter(e.to_string()))?
                    .count)
            })
            .unwrap();
            let rhs = rhs_product(
                &sys,
                6,
                &default_multiplicities(&sys, 6),
                &CoweightSeries::one(1, 6),
            )
            .unwrap();
            let qv = rat_int(q as i64);
            let diff = lhs.compare(&rhs, Some(&qv)).unwrap();
            assert!(diff.is_empty(), "q = {q}: {diff:?}");
            // a perturbed coefficient shows up as a single diff entry
            let mut bad = lhs.clone();
            bad.set(vec![-2], QLaurent::one());
            let diff = bad.compare(&rhs, Some(&qv)).unwrap();
            assert_eq!(diff.len(), 1);
            assert_eq!(diff[0].mu, vec![-2]);
        }
    }

    #[test]
    fn product_counter_factorizes() {
        // the counting series of the product oracle is the product of the
        // component series, coefficient by coefficient
        use crate::tree_masure::ProductMasure;
        let p = ProductMasure::new(
            TreeMasure::build(2, 6).unwrap(),
            TreeMasure::build(2, 6).unwrap(),
            0,
        );
        let joint = lhs_from_counts(2, 4, |mu| {
            p.count_bi_retraction((0, 0), (mu[0], mu[1]), true)
                .map_err(|e| SeriesError::Counter(e.to_string()))
        })
        .unwrap();
        let single = lhs_from_counts(1, 4, |mu| {
            Ok(p.left
                .count_bi_retraction(0, mu[0])
                .map_err(|e| SeriesError::Counter(e.to_string()))?
                .count)
        })
        .unwrap();
        for n1 in 0..=4i64 {
            for n2 in 0..=(4 - n1) {
                assert_eq!(
                    joint.coeff(&[-n1, -n2]),
                    single.coeff(&[-n1]).mul(&single.coeff(&[-n2])),
                    "mu = (-{n1}, -{n2})"
                );
            }
        }
    }

    #[test]
    fn series_json_roundtrip() {
        let sys = presets::sl2_simply_connected();
        let rhs = rhs_product(
            &sys,
            4,
            &default_multiplicities(&sys, 4),
            &CoweightSeries::one(1, 4),
        )
        .unwrap();
        let js = series_to_json(&rhs);
        // sorted by decreasing height, then lex
        let hs: Vec<i64> = js
            .entries
            .iter()
            .map(|e| -e.mu.iter().sum::<i64>())
            .collect();
        let mut sorted = hs.clone();
        sorted.sort();
        assert_eq!(hs, sorted);
        let back = series_from_json(&js).unwrap();
        assert!(back.compare(&rhs, None).unwrap().is_empty());
    }

    #[test]
    fn path_weights_match_tree_counts_rank_one() {
        let sys = presets::sl2_simply_connected();
        for q in [2u64, 3] {
            let tree = TreeMasure::build(q, 14).unwrap();
            let qv = rat_int(q as i64);
            for n in 1..=3i64 {
                let shape = CoweightVector::from_ints(&[n]);
                for m in -n..=n {
                    let end = CoweightVector::from_ints(&[m]);
                    let est = path_count_estimate(&sys, &shape, &end, 3).unwrap();
                    assert!(!est.experimental);
                    let mu = m - n;
                    let count = tree.count_bi_retraction(0, mu).unwrap().count;
                    assert_eq!(
                        est.weight.eval(&qv),
                        rat_int(count as i64),
                        "q={q} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn path_weight_examples() {
        let sys = presets::sl2_simply_connected();
        let shape = CoweightVector::from_ints(&[1]);
        // straight path: weight 1
        let est = path_count_estimate(&sys, &shape, &shape, 3).unwrap();
        assert_eq!(est.weight, QLaurent::one());
        // single fold to 0: weight q - 1
        let est = path_count_estimate(&sys, &shape, &CoweightVector::zero(1), 3).unwrap();
        let qm1 = QLaurent::monomial(1, rat_int(1)).sub(&QLaurent::one());
        assert_eq!(est.weight, qm1);
        // straight negative: weight (q-1) q
        let est = path_count_estimate(&sys, &shape, &shape.neg(), 3).unwrap();
        assert_eq!(est.weight, qm1.mul(&QLaurent::monomial(1, rat_int(1))));
    }

    #[test]
    fn experimental_flag_for_indecomposable_rank_two() {
        let a2 = presets::a2_simply_connected();
        let rho = CoweightVector::from_ints(&[1, 1]);
        let est = path_count_estimate(&a2, &rho, &rho, 6).unwrap();
        assert!(est.experimental);
        assert_eq!(est.weight, QLaurent::one());

        let a11 = presets::a1xa1_simply_connected();
        let est = path_count_estimate(
            &a11,
            &CoweightVector::from_ints(&[1, 1]),
            &CoweightVector::from_ints(&[1, 1]),
            3,
        )
        .unwrap();
        assert!(!est.experimental);
    }

    #[test]
    fn product_weights_multiply() {
        // A1 x A1: the weight of a product endpoint is the product of the
        // component weights
        let a11 = presets::a1xa1_simply_connected();
        let sl2 = presets::sl2_simply_connected();
        for (m1, m2) in [(1i64, 1i64), (0, 1), (0, 0), (-1, 0)] {
            let est = path_count_estimate(
                &a11,
                &CoweightVector::from_ints(&[1, 1]),
                &CoweightVector::from_ints(&[m1, m2]),
                3,
            )
            .unwrap();
            let e1 = path_count_estimate(
                &sl2,
                &CoweightVector::from_ints(&[1]),
                &CoweightVector::from_ints(&[m1]),
                3,
            )
            .unwrap();
            let e2 = path_count_estimate(
                &sl2,
                &CoweightVector::from_ints(&[1]),
                &CoweightVector::from_ints(&[m2]),
                3,
            )
            .unwrap();
            assert_eq!(est.weight, e1.weight.mul(&e2.weight), "({m1},{m2})");
        }
    }
}
