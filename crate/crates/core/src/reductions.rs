//! Edge-shrinking reductions of star-sized families and the sampled
//! certificates from which the high-degree part of one side can be rebuilt.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, edges_within, star, Family, KSet, Params};
use crate::diversity::{
    decompose, degree_split, in_t1, star_neighbourhood, two_linked_components, DiversityDecomposition, Side,
};
use crate::error::{Error, Result};
use crate::thresholds::p0;

/// A reduced family together with the facts its construction promises.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub family: Family,
    pub x: u32,
    /// The `A` part carried over.
    pub a_family: Family,
    /// The members of `K_x` left out.
    pub b_family: Family,
    /// Every edge inside the output is an edge inside the input.
    pub edges_contained: bool,
    /// Re-decomposing the output yields the same `x`.
    pub x_preserved: bool,
    /// Re-decomposing the output yields `a_family` as its `A` part.
    pub a_preserved: bool,
}

impl Reduction {
    pub fn postconditions_hold(&self) -> bool {
        self.edges_contained && self.x_preserved && self.a_preserved
    }
}

fn non_star(f: &Family) -> Result<DiversityDecomposition> {
    let d = decompose(f)?;
    if d.a == 0 {
        return Err(Error::StarFamily);
    }
    Ok(d)
}

/// `N(A) ∩ B`, filled up to `target` members with the lowest-ranked sets of
/// `(N(A) ∩ K_x) \ B`.
fn fill_b_prime(params: &Params, a: &Family, b: &Family, x: u32, target: usize) -> Result<Family> {
    let reach = star_neighbourhood(params, a, x);
    let kept = reach.intersection(b);
    if kept.len() > target {
        return Err(Error::Precondition(format!(
            "|N(A) ∩ B| = {} exceeds |A| = {target}",
            kept.len()
        )));
    }
    let extra: Vec<KSet> = reach.difference(b).iter().copied().take(target - kept.len()).collect();
    if kept.len() + extra.len() < target {
        return Err(Error::Precondition(format!("|N(A) ∩ K_x| = {} is below |A| = {target}", reach.len())));
    }
    Ok(kept.union(&Family::from_sorted_unchecked(*params, extra)))
}

fn finish(input: &Family, x: u32, a_family: Family, b_family: Family) -> Result<Reduction> {
    let params = *input.params();
    let family = a_family.union(&star(&params, x)?.difference(&b_family));
    let edges_contained = edge_set_contained(&family, input);
    let d = decompose(&family)?;
    Ok(Reduction {
        x_preserved: d.x == x,
        a_preserved: d.a_family == a_family,
        family,
        x,
        a_family,
        b_family,
        edges_contained,
    })
}

/// Every Kneser edge inside `inner` also lies inside `outer`, checked pair by pair.
pub fn edge_set_contained(inner: &Family, outer: &Family) -> bool {
    let m = inner.members();
    (0..m.len()).all(|i| {
        (i + 1..m.len()).all(|j| !m[i].is_disjoint(&m[j]) || (outer.contains(&m[i]) && outer.contains(&m[j])))
    })
}

/// Replaces `B` by `B' ⊆ N(A) ∩ K_x` keeping `N(A) ∩ B`, so the output lies in `T²`
/// with the same `x` and `A` and no new edges.
/// Requires `F ∈ T¹` and `3a < C(n-2,k-1)`.
pub fn reduce_to_t2(f: &Family) -> Result<Reduction> {
    let d = non_star(f)?;
    let p = *f.params();
    let limit = binomial(p.n() as u64 - 2, p.k() as u64 - 1);
    if 3 * d.a as u64 >= limit {
        return Err(Error::Precondition(format!("a = {} is not below C(n-2,k-1)/3 = {limit}/3", d.a)));
    }
    if !in_t1(&d) {
        return Err(Error::Precondition("family is not in T1".into()));
    }
    let b_prime = fill_b_prime(&p, &d.a_family, &d.b_family, d.x, d.a)?;
    finish(f, d.x, d.a_family.clone(), b_prime)
}

/// `F'' = A_i ∪ (K_x \ B')` for the 2-linked component `A_i` of `A` at
/// `component`, with `N(A_i) ∩ B ⊆ B' ⊆ N(A_i) ∩ K_x` and `|B'| = |A_i|`.
/// Requires `F ∈ T²`, `4a < C(n-2,k-1)` and `|N(A_i) ∩ B| <= |A_i|`.
pub fn component_reduce(f: &Family, component: usize) -> Result<Reduction> {
    let d = non_star(f)?;
    let p = *f.params();
    let limit = binomial(p.n() as u64 - 2, p.k() as u64 - 1);
    if 4 * d.a as u64 >= limit {
        return Err(Error::Precondition(format!("a = {} is not below C(n-2,k-1)/4 = {limit}/4", d.a)));
    }
    if !in_t1(&d) || !d.b_family.iter().all(|b| d.a_family.neighbours_of(b).next().is_some()) {
        return Err(Error::Precondition("family is not in T2".into()));
    }
    let comps = two_linked_components(&p, &d.a_family, d.x)?;
    let Some(ai) = comps.into_iter().nth(component) else {
        return Err(Error::OutOfRange(format!("component index {component} out of range")));
    };
    let b_prime = fill_b_prime(&p, &ai, &d.b_family, d.x, ai.len())?;
    finish(f, d.x, ai, b_prime)
}

/// Sizes the certificate builder accepts and the randomness it uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateConfig {
    pub delta: f64,
    /// `None` selects `min(0.5, 10/(δD))`.
    pub p1: Option<f64>,
    pub max_tries: usize,
    pub seed: u64,
    pub theta: f64,
    /// Bound on the uncovered part, as a fraction of `a`.
    pub sigma: f64,
    /// Multiplier on the first-part budget.
    pub slack: f64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig { delta: 0.25, p1: None, max_tries: 50, seed: 0, theta: 0.01, sigma: 0.5, slack: 3.0 }
    }
}

impl CertificateConfig {
    /// The sampling probability for `side` on `params`.
    pub fn resolved_p1(&self, params: &Params, side: Side) -> f64 {
        self.p1.unwrap_or_else(|| {
            let d = match side {
                Side::A => params.star_degree(),
                Side::B => params.degree(),
            };
            (10.0 / (self.delta * d as f64)).min(0.5)
        })
    }
}

/// `(Y, P1, P2, P3)`: a sample `Y` of the opposite side, the spurious part
/// of `N(Y)`, the low-degree part of `N(Y)` on this side, and the high-degree
/// sets `Y` missed. For side A, `Y ⊆ B` and the target is `A^{≥δ}`; for side
/// B, `Y ⊆ A` and the target is `B^{≥δ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub side: Side,
    pub x: u32,
    pub delta: f64,
    pub p1: f64,
    pub y: Family,
    pub part1: Family,
    pub part2: Family,
    pub part3: Family,
    /// 1-based try that produced it.
    pub tries: usize,
    pub config: CertificateConfig,
}

impl Certificate {
    /// `(N(Y) ∩ side \ (P1 ∪ P2)) ∪ P3`, where `N(Y)` is restricted to the
    /// sets avoiding `x` (side A) or containing it (side B).
    pub fn reconstruct(&self, params: &Params) -> Family {
        neighbourhood_on_side(params, &self.y, self.x, self.side)
            .difference(&self.part1.union(&self.part2))
            .union(&self.part3)
    }
}

fn neighbourhood_on_side(params: &Params, y: &Family, x: u32, side: Side) -> Family {
    let members = y
        .iter()
        .flat_map(|s| crate::combinatorics::kneser_neighbours(params, *s))
        .filter(|t| t.contains(x) == (side == Side::B))
        .collect();
    Family::from_unsorted_unchecked(*params, members)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub name: &'static str,
    pub measured: f64,
    pub budget: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub reconstruction_ok: bool,
    /// A set on which the reconstruction and the target differ.
    pub witness: Option<String>,
    pub membership_ok: bool,
    pub budgets: Vec<BudgetCheck>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.reconstruction_ok && self.membership_ok && self.budgets.iter().all(|b| b.passed)
    }

    pub fn budgets_ok(&self) -> bool {
        self.budgets.iter().all(|b| b.passed)
    }
}

fn check_config(cfg: &CertificateConfig, p1: f64) -> Result<()> {
    if !(cfg.delta > 0.0 && cfg.delta <= 0.5) {
        return Err(Error::OutOfRange(format!("delta {} not in (0, 1/2]", cfg.delta)));
    }
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(Error::OutOfRange(format!("p1 {p1} not in (0, 1]")));
    }
    if cfg.max_tries == 0 {
        return Err(Error::OutOfRange("max_tries must be positive".into()));
    }
    Ok(())
}

struct Parts {
    own: Family,
    other: Family,
    high: Family,
    low: Family,
}

fn side_parts(d: &DiversityDecomposition, side: Side, delta: f64) -> Result<Parts> {
    let split = degree_split(d, side, delta)?;
    let (own, other) = match side {
        Side::A => (d.a_family.clone(), d.b_family.clone()),
        Side::B => (d.b_family.clone(), d.a_family.clone()),
    };
    Ok(Parts { own, other, high: split.high, low: split.low })
}

fn assemble(params: &Params, d: &DiversityDecomposition, parts: &Parts, y: Family, side: Side) -> [Family; 4] {
    let ny = neighbourhood_on_side(params, &y, d.x, side);
    let part1 = ny.difference(&parts.own);
    let part2 = ny.intersection(&parts.own).intersection(&parts.low);
    let part3 = parts.high.difference(&ny);
    [y, part1, part2, part3]
}

/// Samples `Y` from the opposite side with probability `p1` per member until
/// every size budget holds; fails with `TriesExhausted` otherwise.
pub fn build_certificate(f: &Family, side: Side, cfg: &CertificateConfig) -> Result<Certificate> {
    let d = decompose(f)?;
    if d.a == 0 {
        return Err(Error::StarFamily);
    }
    if !in_t1(&d) {
        return Err(Error::Precondition("family is not in T1".into()));
    }
    let params = *f.params();
    let p1 = cfg.resolved_p1(&params, side);
    check_config(cfg, p1)?;
    let parts = side_parts(&d, side, cfg.delta)?;
    for attempt in 0..cfg.max_tries {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(attempt as u64);
        let y = parts.other.filter(|_| rng.gen::<f64>() < p1);
        let [y, part1, part2, part3] = assemble(&params, &d, &parts, y, side);
        let cert = Certificate {
            side,
            x: d.x,
            delta: cfg.delta,
            p1,
            y,
            part1,
            part2,
            part3,
            tries: attempt + 1,
            config: *cfg,
        };
        if budget_checks(&cert, &d).iter().all(|b| b.passed) {
            return Ok(cert);
        }
    }
    Err(Error::TriesExhausted { tries: cfg.max_tries as u32 })
}

fn budget_checks(c: &Certificate, d: &DiversityDecomposition) -> Vec<BudgetCheck> {
    let params = d.params();
    let (n, k) = (params.n() as f64, params.k() as f64);
    let a = d.a as f64;
    let off = params.off_star_count() as f64;
    let cfg = &c.config;
    let check = |name, measured: usize, budget: f64| BudgetCheck {
        name,
        measured: measured as f64,
        budget,
        passed: measured as f64 <= budget * (1.0 + 1e-9),
    };
    let ny = neighbourhood_on_side(params, &c.y, c.x, c.side);
    let part1_budget = match c.side {
        Side::A => cfg.slack * c.p1 / p0(params).p0 * (30.0 * n / (cfg.theta * k)) * a * (off / a).ln(),
        Side::B => {
            let e_a_bbar = crate::combinatorics::edges_between(&d.a_family, &d.b_bar()) as f64;
            cfg.slack * c.p1 * e_a_bbar
        }
    };
    let part2_budget = match c.side {
        Side::A => 10.0 / off.ln() * a * (off / a).ln(),
        Side::B => {
            let e_abar_b: usize = d
                .b_family
                .iter()
                .map(|b| params.degree() as usize - d.a_family.neighbours_of(b).count())
                .sum();
            2.0 * e_abar_b as f64 / params.degree() as f64
        }
    };
    vec![
        check("sample", c.y.len(), 3.0 * a * c.p1),
        check("spurious", c.part1.len(), part1_budget),
        check("kept", ny.difference(&c.part1).len(), a),
        check("low-degree", c.part2.len(), part2_budget),
        check("missed", c.part3.len(), cfg.sigma * a),
    ]
}

/// Checks containment of every part, exact reconstruction of the target and
/// every size budget under the certificate's own configuration.
pub fn check_certificate(c: &Certificate, f: &Family) -> Result<CertificateReport> {
    let d = decompose(f)?;
    let params = *f.params();
    let parts = side_parts(&d, c.side, c.delta)?;
    let ny = neighbourhood_on_side(&params, &c.y, c.x, c.side);
    let membership_ok = c.x == d.x
        && c.y.is_subset(&parts.other)
        && c.part1.is_subset(&ny)
        && c.part2.is_subset(&ny.difference(&c.part1))
        && c.part3.is_subset(&parts.own);
    let rebuilt = c.reconstruct(&params);
    let witness = rebuilt
        .difference(&parts.high)
        .iter()
        .map(|s| format!("{s} reconstructed but not high-degree"))
        .chain(parts.high.difference(&rebuilt).iter().map(|s| format!("{s} high-degree but not reconstructed")))
        .next();
    Ok(CertificateReport {
        reconstruction_ok: witness.is_none(),
        witness,
        membership_ok,
        budgets: budget_checks(c, &d),
    })
}

/// `e(F)` of a reduction input and output, for reporting.
pub fn edge_counts(r: &Reduction, input: &Family) -> (u64, u64) {
    (edges_within(input), edges_within(&r.family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::near_star;

    fn set(xs: &[u32]) -> KSet {
        KSet::from_elements(xs).unwrap()
    }

    #[test]
    fn replaces_unreachable_b() {
        let q = Params::new(7, 3).unwrap();
        let f = near_star(&q, 1, set(&[2, 3, 4]), set(&[1, 2, 3])).unwrap();
        let r = reduce_to_t2(&f).unwrap();
        assert_eq!(r.b_family.members(), &[set(&[1, 5, 6])]);
        assert!(r.postconditions_hold());
        let (before, after) = edge_counts(&r, &f);
        assert_eq!((before, after), (3, 2));
    }

    #[test]
    fn t2_input_is_unchanged() {
        let q = Params::new(7, 3).unwrap();
        let f = near_star(&q, 1, set(&[2, 3, 4]), set(&[1, 5, 6])).unwrap();
        assert_eq!(reduce_to_t2(&f).unwrap().family, f);
        let c = component_reduce(&f, 0).unwrap();
        assert_eq!(c.family, f);
        assert!(component_reduce(&f, 1).is_err());
    }

    #[test]
    fn petersen_is_below_the_size_limit() {
        let q = Params::new(5, 2).unwrap();
        let f = near_star(&q, 1, set(&[2, 3]), set(&[1, 4])).unwrap();
        assert!(matches!(reduce_to_t2(&f), Err(Error::Precondition(_))));
        assert_eq!(reduce_to_t2(&star(&q, 1).unwrap()), Err(Error::StarFamily));
    }

    #[test]
    fn deterministic_certificate() {
        let q = Params::new(5, 2).unwrap();
        let f = near_star(&q, 1, set(&[2, 3]), set(&[1, 4])).unwrap();
        let cfg = CertificateConfig { delta: 0.5, p1: Some(1.0), ..Default::default() };
        let c = build_certificate(&f, Side::A, &cfg).unwrap();
        assert_eq!(c.y.members(), &[set(&[1, 4])]);
        assert_eq!(c.part1.members(), &[set(&[2, 5]), set(&[3, 5])]);
        assert!(c.part2.is_empty() && c.part3.is_empty());
        assert_eq!(c.reconstruct(&q).members(), &[set(&[2, 3])]);
        assert!(check_certificate(&c, &f).unwrap().passed());

        let mut bad = c.clone();
        bad.part3 = Family::new(q, [set(&[2, 4])]).unwrap();
        let r = check_certificate(&bad, &f).unwrap();
        assert!(!r.reconstruction_ok);
        assert!(r.witness.unwrap().contains("{2,4}"));
    }

    #[test]
    fn certificate_argument_checks() {
        let q = Params::new(5, 2).unwrap();
        let f = near_star(&q, 1, set(&[2, 3]), set(&[1, 4])).unwrap();
        let cfg = CertificateConfig { delta: 0.75, ..Default::default() };
        assert!(build_certificate(&f, Side::A, &cfg).is_err());
        let cfg = CertificateConfig { p1: Some(0.0), ..Default::default() };
        assert!(build_certificate(&f, Side::A, &cfg).is_err());
        assert_eq!(build_certificate(&star(&q, 2).unwrap(), Side::A, &Default::default()), Err(Error::StarFamily));
    }

    #[test]
    fn b_side_deterministic() {
        let q = Params::new(5, 2).unwrap();
        let f = near_star(&q, 1, set(&[2, 3]), set(&[1, 4])).unwrap();
        let cfg = CertificateConfig { delta: 0.5, p1: Some(1.0), ..Default::default() };
        let c = build_certificate(&f, Side::B, &cfg).unwrap();
        // d({1,4}, A) = 1 of C(3,2) = 3 neighbours, below δ, so the target is empty
        assert!(c.reconstruct(&q).is_empty());
        assert!(check_certificate(&c, &f).unwrap().passed());
    }
}
