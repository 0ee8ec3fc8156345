//! Ground-set parameters, k-sets as bitmasks, colex ranking and families.
//!
//! Element `x` of `[n]` lives at bit `x - 1`. For sets of one fixed size the
//! colexicographic order coincides with the numeric order of the masks, so
//! sorting by mask and sorting by rank are the same thing.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set; one `u32` mask per set.
pub const MAX_N: u32 = 30;

/// Exact binomial coefficient. Returns `u64::MAX` on overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Binomial coefficient evaluated in floating point (no overflow).
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    n: u32,
    k: u32,
}

impl Params {
    /// Canonical regime only: `k >= 2`, `n >= 2k + 1`, `n <= 30`.
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams { n, k, reason: "k must be at least 2" });
        }
        if n < 2 * k + 1 {
            return Err(Error::InvalidParams { n, k, reason: "n must be at least 2k+1" });
        }
        if n > MAX_N {
            return Err(Error::InvalidParams { n, k, reason: "n must be at most 30" });
        }
        Ok(Params { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn vertex_count(&self) -> u64 {
        binomial(self.n as u64, self.k as u64)
    }

    /// Degree of every vertex of the full Kneser graph, `C(n-k, k)`.
    pub fn degree(&self) -> u64 {
        binomial((self.n - self.k) as u64, self.k as u64)
    }

    /// Neighbours a set outside a star has inside it, `C(n-k-1, k-1)`.
    pub fn star_degree(&self) -> u64 {
        binomial((self.n - self.k - 1) as u64, (self.k - 1) as u64)
    }

    pub fn edge_count(&self) -> u64 {
        self.vertex_count() * self.degree() / 2
    }

    pub fn star_size(&self) -> u64 {
        binomial((self.n - 1) as u64, (self.k - 1) as u64)
    }

    /// Number of k-sets avoiding a fixed element, `C(n-1, k)`.
    pub fn off_star_count(&self) -> u64 {
        binomial((self.n - 1) as u64, self.k as u64)
    }

    /// Hilton–Milner value: the largest intersecting family outside every star.
    pub fn hilton_milner(&self) -> u64 {
        self.star_size() - self.star_degree() + 1
    }

    pub fn full_mask(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    pub fn is_tight(&self) -> bool {
        self.n == 2 * self.k + 1
    }

    pub fn check_element(&self, x: u32) -> Result<()> {
        if x == 0 || x > self.n {
            Err(Error::ElementOutOfRange(x))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({},{})", self.n, self.k)
    }
}

/// A subset of `[n]` stored as a bitmask. Usually a k-set, but shadows and
/// complements reuse the type for other sizes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSet(u32);

impl KSet {
    pub const fn from_mask(mask: u32) -> Self {
        KSet(mask)
    }

    /// Builds a set from 1-based elements.
    pub fn from_elements(elements: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        for &x in elements {
            if x == 0 || x > MAX_N {
                return Err(Error::ElementOutOfRange(x));
            }
            let bit = 1u32 << (x - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidSet(format!("duplicate element {x}")));
            }
            mask |= bit;
        }
        Ok(KSet(mask))
    }

    /// Builds a k-set for `params`, rejecting wrong sizes or stray elements.
    pub fn new(params: &Params, elements: &[u32]) -> Result<Self> {
        let s = Self::from_elements(elements)?;
        s.validate(params)?;
        Ok(s)
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        if self.len() != params.k() {
            return Err(Error::InvalidSet(format!("{self} does not have {} elements", params.k())));
        }
        if self.0 & !params.full_mask() != 0 {
            return Err(Error::InvalidSet(format!("{self} has an element above {}", params.n())));
        }
        Ok(())
    }

    pub const fn mask(&self) -> u32 {
        self.0
    }

    pub const fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub const fn contains(&self, x: u32) -> bool {
        x >= 1 && x <= 32 && self.0 & (1u32 << (x - 1)) != 0
    }

    pub const fn is_disjoint(&self, other: &KSet) -> bool {
        self.0 & other.0 == 0
    }

    pub const fn union(&self, other: &KSet) -> KSet {
        KSet(self.0 | other.0)
    }

    pub const fn intersection(&self, other: &KSet) -> KSet {
        KSet(self.0 & other.0)
    }

    pub const fn is_subset(&self, other: &KSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement inside `[n]`.
    pub fn complement(&self, n: u32) -> KSet {
        let full = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
        KSet(full & !self.0)
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        BitIter(self.0).map(|b| b + 1)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.elements().collect()
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for KSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

/// Iterates the set bit positions of a `u32`, lowest first.
#[derive(Clone)]
pub(crate) struct BitIter(pub u32);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Colex rank of a set: `sum_i C(c_i, i+1)` over its 0-based elements `c_0 < c_1 < ...`.
pub fn rank_kset(params: &Params, s: KSet) -> Result<u64> {
    s.validate(params)?;
    Ok(colex_rank(s.mask()))
}

pub(crate) fn colex_rank(mask: u32) -> u64 {
    BitIter(mask)
        .enumerate()
        .map(|(i, c)| binomial(c as u64, i as u64 + 1))
        .sum()
}

/// Inverse of [`rank_kset`].
pub fn unrank_kset(params: &Params, rank: u64) -> Result<KSet> {
    let count = params.vertex_count();
    if rank >= count {
        return Err(Error::RankOutOfRange { rank, count });
    }
    let mut r = rank;
    let mut mask = 0u32;
    let mut c = params.n();
    for i in (1..=params.k()).rev() {
        // largest c with C(c, i) <= r
        c -= 1;
        while binomial(c as u64, i as u64) > r {
            c -= 1;
        }
        r -= binomial(c as u64, i as u64);
        mask |= 1 << c;
    }
    Ok(KSet(mask))
}

/// All `k`-subsets of `[n]` in colex order (Gosper's hack).
pub fn all_ksets(n: u32, k: u32) -> impl Iterator<Item = KSet> {
    subsets_of(KSet::from_mask(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 }), k)
}

/// All `size`-subsets of `within`, in colex order.
pub fn subsets_of(within: KSet, size: u32) -> impl Iterator<Item = KSet> {
    let positions: Vec<u32> = BitIter(within.mask()).collect();
    let r = positions.len() as u32;
    let mut state: Option<u64> = if size <= r { Some((1u64 << size) - 1) } else { None };
    std::iter::from_fn(move || {
        let cur = state?;
        if cur >> r != 0 {
            state = None;
            return None;
        }
        state = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            Some((((ripple ^ cur) >> 2) / low) | ripple)
        };
        let mut mask = 0u32;
        let mut bits = cur;
        while bits != 0 {
            let b = bits.trailing_zeros();
            mask |= 1 << positions[b as usize];
            bits &= bits - 1;
        }
        Some(KSet(mask))
    })
}

/// True iff the two sets are disjoint, i.e. adjacent in the Kneser graph.
pub fn kneser_adjacent(a: KSet, b: KSet) -> bool {
    a.is_disjoint(&b)
}

/// Adjacency in the auxiliary graph `J_x`: `|a ∪ a'| <= n - k`. Equivalent to
/// `a` and `a'` having a common Kneser neighbour that contains `x`.
pub fn johnson_adjacent(params: &Params, a: KSet, b: KSet, x: u32) -> Result<bool> {
    params.check_element(x)?;
    if a.contains(x) || b.contains(x) {
        return Err(Error::Precondition(format!("{a} or {b} contains {x}")));
    }
    if a == b {
        return Ok(false);
    }
    Ok(a.union(&b).len() <= params.n() - params.k())
}

/// A duplicate-free family of k-sets, kept sorted by rank.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    params: Params,
    members: Vec<KSet>,
}

impl Family {
    pub fn new(params: Params, sets: impl IntoIterator<Item = KSet>) -> Result<Self> {
        let mut members: Vec<KSet> = sets.into_iter().collect();
        for s in &members {
            s.validate(&params)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { params, members })
    }

    /// Trusted constructor for already-validated sets.
    pub(crate) fn from_sorted_unchecked(params: Params, members: Vec<KSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Family { params, members }
    }

    pub(crate) fn from_unsorted_unchecked(params: Params, mut members: Vec<KSet>) -> Self {
        members.sort_unstable();
        members.dedup();
        Family { params, members }
    }

    pub fn empty(params: Params) -> Self {
        Family { params, members: Vec::new() }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &KSet> {
        self.members.iter()
    }

    pub fn contains(&self, s: &KSet) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn union(&self, other: &Family) -> Family {
        let mut v = self.members.clone();
        v.extend_from_slice(&other.members);
        Family::from_unsorted_unchecked(self.params, v)
    }

    pub fn difference(&self, other: &Family) -> Family {
        let v = self.members.iter().copied().filter(|s| !other.contains(s)).collect();
        Family::from_sorted_unchecked(self.params, v)
    }

    pub fn intersection(&self, other: &Family) -> Family {
        let v = self.members.iter().copied().filter(|s| other.contains(s)).collect();
        Family::from_sorted_unchecked(self.params, v)
    }

    pub fn is_subset(&self, other: &Family) -> bool {
        self.members.iter().all(|s| other.contains(s))
    }

    pub fn filter(&self, mut keep: impl FnMut(&KSet) -> bool) -> Family {
        let v = self.members.iter().copied().filter(|s| keep(s)).collect();
        Family::from_sorted_unchecked(self.params, v)
    }

    /// Intersection of all members; the full ground set for an empty family.
    pub fn common_intersection(&self) -> KSet {
        KSet(self.members.iter().fold(self.params.full_mask(), |acc, s| acc & s.mask()))
    }

    /// Members disjoint from `s` (its Kneser neighbours inside the family).
    pub fn neighbours_of(&self, s: &KSet) -> impl Iterator<Item = &KSet> + '_ {
        let s = *s;
        self.members.iter().filter(move |t| t.is_disjoint(&s))
    }

    pub fn ranks(&self) -> Vec<u64> {
        self.members.iter().map(|s| colex_rank(s.mask())).collect()
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.members.iter())
    }
}

/// The star `K_x`: every k-set containing `x`.
pub fn star(params: &Params, x: u32) -> Result<Family> {
    params.check_element(x)?;
    let rest = KSet(params.full_mask() & !(1 << (x - 1)));
    let members = subsets_of(rest, params.k() - 1).map(|s| KSet(s.mask() | 1 << (x - 1))).collect::<Vec<_>>();
    Ok(Family::from_unsorted_unchecked(*params, members))
}

/// `{A} ∪ K_x` with `x ∉ A`.
pub fn superstar(params: &Params, x: u32, a: KSet) -> Result<Family> {
    a.validate(params)?;
    if a.contains(x) {
        return Err(Error::Precondition(format!("{a} contains {x}")));
    }
    let mut f = star(params, x)?;
    f.members.push(a);
    f.members.sort_unstable();
    Ok(f)
}

/// `{A} ∪ (K_x \ {B})` with `x ∉ A` and `x ∈ B`.
pub fn near_star(params: &Params, x: u32, a: KSet, b: KSet) -> Result<Family> {
    b.validate(params)?;
    if !b.contains(x) {
        return Err(Error::Precondition(format!("{b} does not contain {x}")));
    }
    let mut f = superstar(params, x, a)?;
    f.members.retain(|s| *s != b);
    Ok(f)
}

/// True iff no two members are disjoint.
pub fn is_intersecting(f: &Family) -> bool {
    let m = f.members();
    m.iter().enumerate().all(|(i, a)| m[i + 1..].iter().all(|b| !a.is_disjoint(b)))
}

/// Number of Kneser edges spanned by `f`.
pub fn edges_within(f: &Family) -> u64 {
    let m = f.members();
    let mut count = 0u64;
    for (i, a) in m.iter().enumerate() {
        count += m[i + 1..].iter().filter(|b| a.is_disjoint(b)).count() as u64;
    }
    count
}

/// Number of Kneser edges between `f` and `g` (each disjoint pair counted once;
/// the families are assumed disjoint).
pub fn edges_between(f: &Family, g: &Family) -> u64 {
    f.iter().map(|a| g.neighbours_of(a).count() as u64).sum()
}

/// `N(s) ∩ K_x`: the k-sets containing `x` that are disjoint from `s`.
pub fn star_neighbours(params: &Params, s: KSet, x: u32) -> Vec<KSet> {
    if s.contains(x) {
        return Vec::new();
    }
    let xbit = 1u32 << (x - 1);
    let free = KSet(params.full_mask() & !s.mask() & !xbit);
    subsets_of(free, params.k() - 1).map(|t| KSet(t.mask() | xbit)).collect()
}

/// All Kneser neighbours of `s`, in colex order.
pub fn kneser_neighbours(params: &Params, s: KSet) -> impl Iterator<Item = KSet> {
    subsets_of(s.complement(params.n()), params.k())
}
