//! Threshold and expectation formulas, Chernoff bounds, and exact event
//! probabilities by enumerating every edge subset of a small Kneser graph.

use serde::Serialize;

use crate::combinatorics::Params;
use crate::error::{Error, Result};
use crate::kneser::KneserGraph;
use crate::process::min_star_degree;
use crate::solver::{independent_set_larger_than, is_ekr, SampleGraph};

/// Largest edge count the exhaustive oracle accepts.
pub const MAX_EXACT_EDGES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// `min(raw, 1)`.
    pub p0: f64,
    /// Unclamped threshold value.
    pub raw: f64,
    pub clamped: bool,
    /// `C(n-k-1, k-1)`.
    pub star_degree: u64,
}

/// The superstar threshold: `3/4` when `n = 2k+1`, otherwise
/// `ln(n C(n-1,k)) / C(n-k-1,k-1)`.
pub fn p0(params: &Params) -> ThresholdReport {
    let d = params.star_degree();
    let raw = if params.is_tight() {
        0.75
    } else {
        ((params.n() as f64) * params.off_star_count() as f64).ln() / d as f64
    };
    ThresholdReport { p0: raw.min(1.0), raw, clamped: raw > 1.0, star_degree: d }
}

fn check_prob(prob: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::OutOfRange(format!("probability {prob} not in [0,1]")));
    }
    Ok(())
}

/// Expected number of independent superstars in `K_p(n,k)`:
/// `n C(n-1,k) (1-p)^D`.
pub fn expected_superstars(params: &Params, prob: f64) -> Result<f64> {
    check_prob(prob)?;
    let d = params.star_degree() as i32;
    Ok(params.n() as f64 * params.off_star_count() as f64 * (1.0 - prob).powi(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearStarExpectation {
    /// Independent maximal near-stars (the outside set and the removed star member are disjoint).
    pub maximal_near_stars: f64,
    /// Superstars plus maximal near-stars.
    pub combined: f64,
}

/// `n C(n-1,k) D p (1-p)^(D-1)` and the combined
/// `n C(n-1,k) [(1-p)^D + D p (1-p)^(D-1)]`.
pub fn expected_maximal_nearstars(params: &Params, prob: f64) -> Result<NearStarExpectation> {
    check_prob(prob)?;
    let d = params.star_degree() as i32;
    let pairs = params.n() as f64 * params.off_star_count() as f64;
    let near = pairs * d as f64 * prob * (1.0 - prob).powi(d - 1);
    Ok(NearStarExpectation { maximal_near_stars: near, combined: pairs * (1.0 - prob).powi(d) + near })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBound {
    pub strong: f64,
    pub weak: f64,
}

/// `P(X <= a mu) <= exp(-(1 - a + a ln a) mu) <= exp(-(1 - 2 sqrt a) mu)`.
pub fn chernoff_lower(mu: f64, a: f64) -> Result<ChernoffBound> {
    if !(mu >= 0.0) || !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange(format!("lower tail needs mu >= 0 and 0 <= a <= 1 (mu={mu}, a={a})")));
    }
    let a_ln_a = if a == 0.0 { 0.0 } else { a * a.ln() };
    Ok(ChernoffBound {
        strong: (-(1.0 - a + a_ln_a) * mu).exp(),
        weak: (-(1.0 - 2.0 * a.sqrt()) * mu).exp(),
    })
}

/// `P(X >= b mu) <= exp(-(1 - b + b ln b) mu) <= exp(-mu b ln(b/e))`.
pub fn chernoff_upper(mu: f64, b: f64) -> Result<ChernoffBound> {
    if !(mu >= 0.0) || !(b > 1.0) || !b.is_finite() {
        return Err(Error::OutOfRange(format!("upper tail needs mu >= 0 and b > 1 (mu={mu}, b={b})")));
    }
    Ok(ChernoffBound {
        strong: (-(1.0 - b + b * b.ln()) * mu).exp(),
        weak: (-mu * b * (b.ln() - 1.0)).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Event {
    NoIndependentSuperstar,
    NoIndependentNearStar,
    Ekr,
    AlphaEqualsStarSize,
}

impl Event {
    pub const ALL: [Event; 4] =
        [Event::NoIndependentSuperstar, Event::NoIndependentNearStar, Event::Ekr, Event::AlphaEqualsStarSize];

    pub fn name(&self) -> &'static str {
        match self {
            Event::NoIndependentSuperstar => "no-independent-superstar",
            Event::NoIndependentNearStar => "no-independent-near-star",
            Event::Ekr => "ekr",
            Event::AlphaEqualsStarSize => "alpha-equals-star-size",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }

    /// Evaluates the event on one graph: degree tests for the star events,
    /// the exact solver for the other two.
    pub fn holds(&self, g: &SampleGraph) -> Result<bool> {
        let params = g.graph().params();
        Ok(match self {
            Event::NoIndependentSuperstar => min_star_degree(g) >= 1,
            Event::NoIndependentNearStar => min_star_degree(g) >= 2,
            Event::Ekr => is_ekr(g)?,
            Event::AlphaEqualsStarSize => independent_set_larger_than(g, params.star_size() as usize)?.is_none(),
        })
    }
}

impl std::str::FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Event::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown event {s}")))
    }
}

/// For every event and every `s`, the number of `s`-edge subgraphs on which the event holds.
/// Any edge probability is then a polynomial evaluation.
#[derive(Debug, Clone)]
pub struct EventTable {
    edge_count: usize,
    counts: [Vec<u64>; 4],
}

impl EventTable {
    /// Enumerates all `2^|E|` spanning subgraphs.
    pub fn build(graph: &std::sync::Arc<KneserGraph>) -> Result<Self> {
        let m = graph.edge_count();
        if m > MAX_EXACT_EDGES {
            return Err(Error::LimitExceeded { what: "edge count", value: m as u64, limit: MAX_EXACT_EDGES as u64 });
        }
        let mut counts: [Vec<u64>; 4] = std::array::from_fn(|_| vec![0u64; m + 1]);
        for subset in 0u64..(1u64 << m) {
            let g = SampleGraph::from_edges(graph.clone(), (0..m).filter(|&e| subset >> e & 1 == 1));
            let s = subset.count_ones() as usize;
            let min_deg = min_star_degree(&g);
            if min_deg >= 1 {
                counts[Event::NoIndependentSuperstar.index()][s] += 1;
            }
            if min_deg >= 2 {
                counts[Event::NoIndependentNearStar.index()][s] += 1;
            }
            // both solver events need at least the superstar event
            if min_deg >= 1 && Event::AlphaEqualsStarSize.holds(&g)? {
                counts[Event::AlphaEqualsStarSize.index()][s] += 1;
            }
            if min_deg >= 2 && Event::Ekr.holds(&g)? {
                counts[Event::Ekr.index()][s] += 1;
            }
        }
        Ok(EventTable { edge_count: m, counts })
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn counts(&self, event: Event) -> &[u64] {
        &self.counts[event.index()]
    }

    /// `sum_s count_s p^s (1-p)^(m-s)`, terms formed in log space and summed
    /// with Neumaier compensation.
    pub fn probability(&self, event: Event, prob: f64) -> Result<f64> {
        check_prob(prob)?;
        let m = self.edge_count;
        let counts = &self.counts[event.index()];
        if prob == 0.0 {
            return Ok(counts[0] as f64);
        }
        if prob == 1.0 {
            return Ok(counts[m] as f64);
        }
        let (lp, lq) = (prob.ln(), (1.0 - prob).ln());
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = ((c as f64).ln() + s as f64 * lp + (m - s) as f64 * lq).exp();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        Ok(sum + comp)
    }
}

/// Exact probability of `event` in `K_prob(n,k)` by full enumeration.
pub fn exact_event_probability(params: &Params, prob: f64, event: Event) -> Result<f64> {
    check_prob(prob)?;
    if params.edge_count() > MAX_EXACT_EDGES as u64 {
        return Err(Error::LimitExceeded {
            what: "edge count",
            value: params.edge_count(),
            limit: MAX_EXACT_EDGES as u64,
        });
    }
    let graph = std::sync::Arc::new(KneserGraph::new(*params)?);
    EventTable::build(&graph)?.probability(event, prob)
}

/// Total number of spanning subgraphs, `2^|E|`, as a float.
pub fn subgraph_count(params: &Params) -> f64 {
    2f64.powi(params.edge_count() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn p(n: u32, k: u32) -> Params {
        Params::new(n, k).unwrap()
    }

    #[test]
    fn p0_values() {
        for k in 2..=5 {
            let r = p0(&p(2 * k + 1, k));
            assert_eq!(r.raw, 0.75);
            assert_eq!(r.p0, 0.75);
            assert!(!r.clamped);
        }
        let r = p0(&p(7, 2));
        assert!((r.raw - 105f64.ln() / 4.0).abs() < 1e-12);
        assert!(r.clamped);
        assert_eq!(r.p0, 1.0);
        let r = p0(&p(10, 3));
        assert!((r.raw - 840f64.ln() / 15.0).abs() < 1e-12);
        assert!((r.raw - 0.44889).abs() < 1e-5);
    }

    #[test]
    fn expectations() {
        let q = p(5, 2);
        assert!((expected_superstars(&q, 0.75).unwrap() - 1.875).abs() < 1e-12);
        assert_eq!(expected_superstars(&q, 1.0).unwrap(), 0.0);
        assert_eq!(expected_superstars(&q, 0.0).unwrap(), 30.0);
        let ns = expected_maximal_nearstars(&q, 0.75).unwrap();
        assert!((ns.maximal_near_stars - 11.25).abs() < 1e-12);
        assert!((ns.combined - 13.125).abs() < 1e-12);
        assert_eq!(expected_maximal_nearstars(&q, 1.0).unwrap().combined, 0.0);
        assert!(expected_superstars(&q, 1.5).is_err());
    }

    #[test]
    fn combined_minus_superstars_is_near_star_term() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let k = rng.gen_range(2..=5);
            let n = rng.gen_range(2 * k + 1..=2 * k + 6);
            let q = p(n, k);
            let prob: f64 = rng.gen();
            let ns = expected_maximal_nearstars(&q, prob).unwrap();
            let ss = expected_superstars(&q, prob).unwrap();
            assert!((ns.combined - ss - ns.maximal_near_stars).abs() <= 1e-9 * ns.combined.max(1.0));
        }
    }

    #[test]
    fn chernoff_boundaries() {
        assert_eq!(chernoff_lower(3.0, 1.0).unwrap().strong, 1.0);
        assert_eq!(chernoff_lower(3.0, 0.0).unwrap().strong, (-3.0f64).exp());
        let e = std::f64::consts::E;
        let up = chernoff_upper(2.0, e).unwrap();
        assert!((up.strong - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(up.weak, 1.0);
        assert!(chernoff_lower(1.0, 1.5).is_err());
        assert!(chernoff_upper(1.0, 1.0).is_err());
        assert!(chernoff_lower(-1.0, 0.5).is_err());
        // strong form never exceeds the weak one
        for i in 0..=20 {
            let a = i as f64 / 20.0;
            let c = chernoff_lower(5.0, a).unwrap();
            assert!(c.strong <= c.weak + 1e-12);
        }
        for i in 1..=20 {
            let c = chernoff_upper(5.0, 1.0 + i as f64 / 4.0).unwrap();
            assert!(c.strong <= c.weak + 1e-12);
        }
    }

    #[test]
    fn exact_oracle_on_petersen() {
        let g = Arc::new(KneserGraph::new(p(5, 2)).unwrap());
        let t = EventTable::build(&g).unwrap();
        for ev in Event::ALL {
            assert_eq!(t.probability(ev, 1.0).unwrap(), 1.0, "{ev:?}");
            assert_eq!(t.probability(ev, 0.0).unwrap(), 0.0, "{ev:?}");
            let mut prev = -1.0;
            for i in 0..=10 {
                let v = t.probability(ev, i as f64 / 10.0).unwrap();
                assert!(v >= prev - 1e-12, "{ev:?} not monotone");
                prev = v;
            }
            // unweighted total equals the number of favourable subgraphs
            let total: u64 = t.counts(ev).iter().sum();
            assert!((t.probability(ev, 0.5).unwrap() * 32768.0 - total as f64).abs() < 1e-6);
        }
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let near = t.probability(Event::NoIndependentNearStar, x).unwrap();
            let sup = t.probability(Event::NoIndependentSuperstar, x).unwrap();
            assert!(near <= sup + 1e-15);
            let ekr = t.probability(Event::Ekr, x).unwrap();
            let alpha = t.probability(Event::AlphaEqualsStarSize, x).unwrap();
            assert!(ekr <= alpha + 1e-15);
        }
    }

    #[test]
    fn guard_refuses_large_graphs() {
        assert!(matches!(
            exact_event_probability(&p(7, 3), 0.5, Event::Ekr),
            Err(Error::LimitExceeded { .. })
        ));
    }
}
