//! Diversity decomposition of star-sized families and the statistics built on it.
//!
//! A family `F` of `C(n-1,k-1)` k-sets is written `F = A ∪ (K_x \ B)` where `x`
//! is the smallest element minimising `|F \ K_x|`, `A = F \ K_x` and
//! `B = K_x \ F`; `a = |A| = |B|` is the diversity.

use serde::Serialize;

use crate::combinatorics::{
    all_ksets, binomial, binomial_f64, edges_between, edges_within, star, subsets_of, Family, KSet, Params,
};
use crate::error::{Error, Result};
use crate::thresholds::p0;
use crate::union_find::UnionFind;

/// Relative tolerance for boundary cases of the real-valued inequalities.
pub const TOLERANCE: f64 = 1e-9;

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + TOLERANCE * rhs.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversityDecomposition {
    pub x: u32,
    /// `A_F = F \ K_x`.
    pub a_family: Family,
    /// `B_F = K_x \ F`.
    pub b_family: Family,
    pub a: usize,
    #[serde(skip)]
    source: Family,
}

impl DiversityDecomposition {
    pub fn params(&self) -> &Params {
        self.source.params()
    }

    pub fn family(&self) -> &Family {
        &self.source
    }

    /// `A ∪ (K_x \ B)`.
    pub fn reconstruct(&self) -> Family {
        let kx = star(self.params(), self.x).expect("x is a valid element");
        self.a_family.union(&kx.difference(&self.b_family))
    }

    /// `B̄ = K_x ∩ F`.
    pub fn b_bar(&self) -> Family {
        self.source.filter(|s| s.contains(self.x))
    }

    /// `Ā = C([n] \ {x}, k) \ A`.
    pub fn a_bar(&self) -> Family {
        let p = *self.params();
        let members = all_ksets(p.n(), p.k()).filter(|s| !s.contains(self.x) && !self.a_family.contains(s)).collect();
        Family::from_sorted_unchecked(p, members)
    }
}

/// `|F \ K_y|` for every `y` in `1..=n` (index `y - 1`).
pub fn distances_to_stars(f: &Family) -> Vec<usize> {
    (1..=f.params().n()).map(|y| f.iter().filter(|s| !s.contains(y)).count()).collect()
}

fn check_star_size(f: &Family) -> Result<()> {
    let expected = f.params().star_size();
    if f.len() as u64 != expected {
        return Err(Error::WrongFamilySize { got: f.len(), expected });
    }
    Ok(())
}

pub fn decompose(f: &Family) -> Result<DiversityDecomposition> {
    check_star_size(f)?;
    let dist = distances_to_stars(f);
    let (idx, &a) = dist.iter().enumerate().min_by_key(|&(i, &d)| (d, i)).expect("n >= 1");
    let x = idx as u32 + 1;
    let a_family = f.filter(|s| !s.contains(x));
    let b_family = star(f.params(), x)?.filter(|s| !f.contains(s));
    debug_assert_eq!(a_family.len(), a);
    debug_assert_eq!(b_family.len(), a);
    Ok(DiversityDecomposition { x, a_family, b_family, a, source: f.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeStats {
    /// `e(F)`.
    pub e_f: u64,
    /// `e(A)`.
    pub e_a: u64,
    /// `e(A, B̄)`.
    pub e_a_bbar: u64,
    /// `e(Ā, B)`.
    pub e_abar_b: u64,
}

impl EdgeStats {
    /// `e(F) = e(A) + e(A, B̄)`.
    pub fn partition_holds(&self) -> bool {
        self.e_f == self.e_a + self.e_a_bbar
    }

    /// `e(Ā, B) = C(n-k-1, k) a + e(A, B̄)`.
    pub fn identity_holds(&self, params: &Params, a: usize) -> bool {
        let c = binomial((params.n() - params.k() - 1) as u64, params.k() as u64);
        self.e_abar_b == c * a as u64 + self.e_a_bbar
    }
}

/// All four counts by direct enumeration in the full Kneser graph.
pub fn edge_stats(d: &DiversityDecomposition) -> EdgeStats {
    let p = *d.params();
    let b_bar = d.b_bar();
    // Ā–B edges: every Kneser neighbour of B ∈ K_x avoids x
    let e_abar_b = d
        .b_family
        .iter()
        .map(|b| subsets_of(b.complement(p.n()), p.k()).filter(|t| !d.a_family.contains(t)).count() as u64)
        .sum();
    EdgeStats {
        e_f: edges_within(d.family()),
        e_a: edges_within(&d.a_family),
        e_a_bbar: edges_between(&d.a_family, &b_bar),
        e_abar_b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSplit {
    pub side: Side,
    pub threshold: f64,
    pub high: Family,
    pub low: Family,
}

/// A-side: `d(A, B_F) >= δ C(n-k-1, k-1)`; B-side: `d(B, A_F) >= δ C(n-k, k)`.
pub fn degree_split(d: &DiversityDecomposition, side: Side, delta: f64) -> Result<DegreeSplit> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::OutOfRange(format!("threshold {delta} not in (0,1]")));
    }
    let p = d.params();
    let (source, other, full_degree) = match side {
        Side::A => (&d.a_family, &d.b_family, p.star_degree()),
        Side::B => (&d.b_family, &d.a_family, p.degree()),
    };
    let cut = delta * full_degree as f64;
    let is_high = |s: &KSet| {
        let deg = other.neighbours_of(s).count() as f64;
        deg >= cut - TOLERANCE * cut.max(1.0)
    };
    Ok(DegreeSplit { side, threshold: delta, high: source.filter(is_high), low: source.filter(|s| !is_high(s)) })
}

/// Connected components of `J_x[A]` (adjacency `|S ∪ T| <= n-k`), each sorted,
/// ordered by their smallest member.
pub fn two_linked_components(params: &Params, a: &Family, x: u32) -> Result<Vec<Family>> {
    params.check_element(x)?;
    if let Some(s) = a.iter().find(|s| s.contains(x)) {
        return Err(Error::Precondition(format!("{s} contains {x}")));
    }
    let m = a.members();
    let limit = params.n() - params.k();
    let mut uf = UnionFind::new(m.len());
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i].union(&m[j]).len() <= limit {
                uf.union(i, j);
            }
        }
    }
    // members are visited in rank order, so components come out ordered by smallest member
    let mut slot = vec![usize::MAX; m.len()];
    let mut comps: Vec<Vec<KSet>> = Vec::new();
    for (i, s) in m.iter().enumerate() {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(*s);
    }
    Ok(comps.into_iter().map(|c| Family::from_sorted_unchecked(*params, c)).collect())
}

/// Upper limit on the number of subsets `count_two_linked_sets` enumerates.
pub const TWO_LINKED_GUARD: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLinkedCount {
    pub count: u64,
    /// `C(2k, k) (e k^2)^a`.
    pub bound: f64,
}

impl TwoLinkedCount {
    pub fn within_bound(&self) -> bool {
        self.count as f64 <= self.bound
    }
}

/// Exact number of `a`-subsets of `C([n] \ {x}, k)` inducing a connected subgraph of `J_x`.
pub fn count_two_linked_sets(params: &Params, x: u32, a: usize) -> Result<TwoLinkedCount> {
    params.check_element(x)?;
    if !params.is_tight() {
        return Err(Error::Precondition("two-linked counting needs n = 2k+1".into()));
    }
    let pool: Vec<KSet> = all_ksets(params.n(), params.k()).filter(|s| !s.contains(x)).collect();
    let subsets = binomial_f64(pool.len() as u64, a as u64);
    if subsets > TWO_LINKED_GUARD {
        return Err(Error::LimitExceeded { what: "subset count", value: subsets as u64, limit: TWO_LINKED_GUARD as u64 });
    }
    let k = params.k() as f64;
    let bound = binomial(2 * params.k() as u64, params.k() as u64) as f64 * (std::f64::consts::E * k * k).powi(a as i32);
    if a == 0 {
        return Ok(TwoLinkedCount { count: 0, bound });
    }
    let limit = params.n() - params.k();
    let adj: Vec<Vec<bool>> = pool
        .iter()
        .map(|s| pool.iter().map(|t| s != t && s.union(t).len() <= limit).collect())
        .collect();
    let mut chosen = Vec::with_capacity(a);
    let mut count = 0u64;
    count_connected(&adj, 0, a, &mut chosen, &mut count);
    Ok(TwoLinkedCount { count, bound })
}

fn count_connected(adj: &[Vec<bool>], start: usize, a: usize, chosen: &mut Vec<usize>, count: &mut u64) {
    if chosen.len() == a {
        if is_connected(adj, chosen) {
            *count += 1;
        }
        return;
    }
    for v in start..adj.len() {
        if adj.len() - v < a - chosen.len() {
            break;
        }
        chosen.push(v);
        count_connected(adj, v + 1, a, chosen, count);
        chosen.pop();
    }
}

fn is_connected(adj: &[Vec<bool>], vs: &[usize]) -> bool {
    let mut seen = vec![false; vs.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = stack.pop() {
        for j in 0..vs.len() {
            if !seen[j] && adj[vs[i]][vs[j]] {
                seen[j] = true;
                reached += 1;
                stack.push(j);
            }
        }
    }
    reached == vs.len()
}

/// `5/p0 · a ln(C(n-1,k)/a)`, the edge budget of `T¹`.
pub fn t1_bound(params: &Params, a: usize) -> f64 {
    let a = a as f64;
    5.0 / p0(params).p0 * a * (params.off_star_count() as f64 / a).ln()
}

/// `e(F) <= 5/p0 · a ln(C(n-1,k)/a)` for a non-star decomposition.
pub fn in_t1(d: &DiversityDecomposition) -> bool {
    d.a > 0 && le(edges_within(d.family()) as f64, t1_bound(d.params(), d.a))
}

/// `A ∪ (K_x \ B)` with `A` a uniform `a`-subset of `C([n] \ {x}, k)` and `B` a
/// uniform `a`-subset of `K_x`. The decomposition of the result need not use `x`.
pub fn sample_family<R: rand::Rng + ?Sized>(params: &Params, x: u32, a: usize, rng: &mut R) -> Result<Family> {
    use rand::seq::IteratorRandom;
    params.check_element(x)?;
    let off: Vec<KSet> = all_ksets(params.n(), params.k()).filter(|s| !s.contains(x)).collect();
    let on: Vec<KSet> = all_ksets(params.n(), params.k()).filter(|s| s.contains(x)).collect();
    if a > off.len() || a > on.len() {
        return Err(Error::OutOfRange(format!("diversity {a} too large for {params}")));
    }
    let a_part = off.into_iter().choose_multiple(rng, a);
    let b_part: Vec<KSet> = on.iter().copied().choose_multiple(rng, a);
    let members = a_part.into_iter().chain(on.into_iter().filter(|s| !b_part.contains(s))).collect();
    Ok(Family::from_unsorted_unchecked(*params, members))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationRatios {
    /// `e(F) p0 / (a ln(C(n-1,k)/a))`; its minimum over samples estimates the feasible θ.
    pub log_ratio: f64,
    /// `e(F) p0 n / (a (n-2k) ln C(n-1,k))`.
    pub linear_ratio: f64,
    /// `e(F)` and the `T¹` right-hand side `5/p0 · a ln(C(n-1,k)/a)`.
    pub e_f: u64,
    pub t1_bound: f64,
    /// `|A^{<1/√k}|` and its `T⁴` bound `a / max(ln ln k, 0.1)`, when `k >= 3`.
    pub low_degree_count: Option<usize>,
    pub t4_bound: Option<f64>,
    /// The `T⁴` denominator after the guard.
    pub loglog_k: Option<f64>,
    pub e_a: u64,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyClassification {
    pub x: u32,
    pub a: usize,
    pub theta: f64,
    pub in_t: bool,
    pub in_t1: bool,
    pub in_t2: bool,
    pub in_t3: bool,
    /// `None` when `k < 3` (the `T⁴` predicate is not applicable).
    pub in_t4: Option<bool>,
    pub in_t5: Option<bool>,
    /// For members of `T¹`: `θ/5 · (n-2k)/n · ln C(n-1,k) <= ln(C(n-1,k)/a)`.
    pub diversity_bound_holds: Option<bool>,
    pub ratios: ClassificationRatios,
}

impl FamilyClassification {
    pub fn nesting_holds(&self) -> bool {
        let t4 = self.in_t4.unwrap_or(false);
        let t5 = self.in_t5.unwrap_or(false);
        (!t5 || t4) && (!t4 || self.in_t1) && (!self.in_t3 || self.in_t2) && (!self.in_t2 || self.in_t1)
    }
}

/// Evaluates the `T¹..T⁵` membership predicates of a non-star family of star size.
pub fn classify_family(f: &Family, theta: f64) -> Result<FamilyClassification> {
    if !(theta > 0.0) {
        return Err(Error::OutOfRange(format!("theta must be positive, got {theta}")));
    }
    let d = decompose(f)?;
    if d.a == 0 {
        return Err(Error::StarFamily);
    }
    let p = *f.params();
    let (n, k) = (p.n() as f64, p.k() as f64);
    let a = d.a as f64;
    let p0 = p0(&p).p0;
    let off = p.off_star_count() as f64;
    let ln_off = off.ln();
    let ln_ratio = (off / a).ln();
    let stats = edge_stats(&d);
    let e_f = stats.e_f as f64;

    let t1_bound = t1_bound(&p, d.a);
    let in_t1 = le(e_f, t1_bound);
    let b_covered = d.b_family.iter().all(|b| d.a_family.neighbours_of(b).next().is_some());
    let in_t2 = in_t1 && b_covered;
    let comps = two_linked_components(&p, &d.a_family, d.x)?;
    let in_t3 = in_t2 && comps.len() == 1;

    let (in_t4, in_t5, low_count, t4_bound, loglog) = if p.k() >= 3 {
        let guard = k.ln().ln().max(0.1);
        let low = degree_split(&d, Side::A, 1.0 / k.sqrt())?.low.len();
        let bound = a / guard;
        let t4 = in_t1 && le(low as f64, bound);
        let t5 = t4 && le(stats.e_a as f64, 0.5 * e_f);
        (Some(t4), Some(t5), Some(low), Some(bound), Some(guard))
    } else {
        (None, None, None, None, None)
    };

    let diversity_bound_holds = in_t1.then(|| le(theta / 5.0 * (n - 2.0 * k) / n * ln_off, ln_ratio));

    Ok(FamilyClassification {
        x: d.x,
        a: d.a,
        theta,
        in_t: true,
        in_t1,
        in_t2,
        in_t3,
        in_t4,
        in_t5,
        diversity_bound_holds,
        ratios: ClassificationRatios {
            log_ratio: e_f * p0 / (a * ln_ratio),
            linear_ratio: e_f * p0 * n / (a * (n - 2.0 * k) * ln_off),
            e_f: stats.e_f,
            t1_bound,
            low_degree_count: low_count,
            t4_bound,
            loglog_k: loglog,
            e_a: stats.e_a,
            components: comps.len(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn pass(name: &'static str) -> Self {
        CheckOutcome { name, passed: true, witness: None }
    }

    fn fail(name: &'static str, witness: String) -> Self {
        CheckOutcome { name, passed: false, witness: Some(witness) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationReport {
    pub diversity_bound: CheckOutcome,
    pub far_from_other_stars: CheckOutcome,
    pub edge_identity: CheckOutcome,
}

impl ObservationReport {
    pub fn all_passed(&self) -> bool {
        self.diversity_bound.passed && self.far_from_other_stars.passed && self.edge_identity.passed
    }

    pub fn outcomes(&self) -> [&CheckOutcome; 3] {
        [&self.diversity_bound, &self.far_from_other_stars, &self.edge_identity]
    }
}

/// Verifies, on one family: `a <= (n-k)/n C(n-1,k-1)`;
/// `|F \ K_y| >= C(n-2,k-1) - a` for every `y != x`; and
/// `e(Ā,B) = C(n-k-1,k) a + e(A,B̄)` with both sides counted directly.
pub fn check_observations(f: &Family) -> Result<ObservationReport> {
    check_observations_with(f, 0)
}

/// As [`check_observations`], with `fault` added to the measured `e(Ā,B)`
/// (a mutation hook for exercising the failure path).
pub fn check_observations_with(f: &Family, fault: i64) -> Result<ObservationReport> {
    let d = decompose(f)?;
    if d.a == 0 {
        return Err(Error::StarFamily);
    }
    let p = *f.params();
    let (n, k) = (p.n() as u64, p.k() as u64);

    // a <= (n-k)/n * C(n-1,k-1), compared without division
    let diversity_bound = if n * d.a as u64 <= (n - k) * p.star_size() {
        CheckOutcome::pass("diversity-bound")
    } else {
        CheckOutcome::fail("diversity-bound", format!("a={} exceeds ({n}-{k})/{n}*{}", d.a, p.star_size()))
    };

    let need = binomial(n - 2, k - 1) as i64 - d.a as i64;
    let dist = distances_to_stars(f);
    let far = match (1..=p.n()).filter(|&y| y != d.x).find(|&y| (dist[y as usize - 1] as i64) < need) {
        None => CheckOutcome::pass("far-from-other-stars"),
        Some(y) => CheckOutcome::fail(
            "far-from-other-stars",
            format!("|F \\ K_{y}| = {} < C({},{}) - a = {need}", dist[y as usize - 1], n - 2, k - 1),
        ),
    };

    let stats = edge_stats(&d);
    let measured = stats.e_abar_b as i64 + fault;
    let predicted = (binomial(n - k - 1, k) * d.a as u64 + stats.e_a_bbar) as i64;
    let identity = if measured == predicted && stats.partition_holds() {
        CheckOutcome::pass("edge-identity")
    } else {
        CheckOutcome::fail(
            "edge-identity",
            format!(
                "x={} A={:?} B={:?}: e(Abar,B)={measured}, C(n-k-1,k)*a+e(A,Bbar)={predicted}, e(F)={} e(A)={} e(A,Bbar)={}",
                d.x, d.a_family, d.b_family, stats.e_f, stats.e_a, stats.e_a_bbar
            ),
        )
    };

    Ok(ObservationReport { diversity_bound, far_from_other_stars: far, edge_identity: identity })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetryCheck {
    pub size: usize,
    /// `|N(A) ∩ K_x|`.
    pub boundary: usize,
    pub passed: bool,
}

/// `|N(A) ∩ K_x|` for `A ⊆ C([n] \ {x}, k)`, checked against `|A|`; only
/// meaningful for nonempty `A` with `|A| < C(n-2,k-1)`.
pub fn check_isoperimetry(params: &Params, a: &Family, x: u32) -> Result<IsoperimetryCheck> {
    params.check_element(x)?;
    if a.is_empty() || a.len() as u64 >= binomial(params.n() as u64 - 2, params.k() as u64 - 1) {
        return Err(Error::Precondition(format!("need 0 < |A| < C(n-2,k-1), got {}", a.len())));
    }
    if a.iter().any(|s| s.contains(x)) {
        return Err(Error::Precondition(format!("A meets the star at {x}")));
    }
    let boundary = star_neighbourhood(params, a, x).len();
    Ok(IsoperimetryCheck { size: a.len(), boundary, passed: boundary > a.len() })
}

/// `N(A) ∩ K_x` in the full Kneser graph.
pub fn star_neighbourhood(params: &Params, a: &Family, x: u32) -> Family {
    let members = a.iter().flat_map(|s| crate::combinatorics::star_neighbours(params, *s, x)).collect();
    Family::from_unsorted_unchecked(*params, members)
}
