//! Shadows of uniform set systems and the Lovász form of Kruskal–Katona.

use std::collections::BTreeSet;

use statrs::function::gamma::ln_gamma;

use crate::combinatorics::{binomial, subsets_of, KSet};
use crate::error::{Error, Result};

/// The `ell`-sets contained in at least one member, sorted by rank.
///
/// Members must all have the same size `k >= ell >= 1`.
pub fn shadow(members: &[KSet], ell: u32) -> Result<Vec<KSet>> {
    let Some(first) = members.first() else {
        return Err(Error::Precondition("shadow of an empty family".into()));
    };
    let k = first.len();
    if members.iter().any(|s| s.len() != k) {
        return Err(Error::Precondition("family is not uniform".into()));
    }
    if ell == 0 || ell > k {
        return Err(Error::OutOfRange(format!("shadow level {ell} not in 1..={k}")));
    }
    let out: BTreeSet<KSet> = members.iter().flat_map(|s| subsets_of(*s, ell)).collect();
    Ok(out.into_iter().collect())
}

/// `ln C(z, k)` for real `z >= k`.
pub fn ln_binomial_real(z: f64, k: f64) -> f64 {
    ln_gamma(z + 1.0) - ln_gamma(k + 1.0) - ln_gamma(z - k + 1.0)
}

/// The real `z >= k` with `C(z, k) = m`, by bisection on `[k, k + 2m]`.
pub fn solve_binomial_root(m: u64, k: u32) -> Result<f64> {
    if m < 1 {
        return Err(Error::OutOfRange("family size must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::OutOfRange("k must be positive".into()));
    }
    // integral roots are returned exactly
    let mut j = k as u64;
    while binomial(j, k as u64) < m {
        j += 1;
    }
    if binomial(j, k as u64) == m {
        return Ok(j as f64);
    }
    let target = (m as f64).ln();
    let (mut lo, mut hi) = ((j - 1) as f64, j as f64);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if ln_binomial_real(mid, k as f64) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound `C(z, ell)` on the `ell`-shadow of any family of `m` k-sets,
/// where `C(z, k) = m`.
pub fn lovasz_shadow_bound(m: u64, k: u32, ell: u32) -> Result<f64> {
    if ell == 0 || ell > k {
        return Err(Error::OutOfRange(format!("shadow level {ell} not in 1..={k}")));
    }
    let z = solve_binomial_root(m, k)?;
    if z.fract() == 0.0 {
        return Ok(binomial(z as u64, ell as u64) as f64);
    }
    Ok(ln_binomial_real(z, ell as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::all_ksets;

    fn set(xs: &[u32]) -> KSet {
        KSet::from_elements(xs).unwrap()
    }

    #[test]
    fn shadow_examples() {
        let sh = shadow(&[set(&[1, 2, 3])], 2).unwrap();
        assert_eq!(sh, vec![set(&[1, 2]), set(&[1, 3]), set(&[2, 3])]);
        let all: Vec<_> = all_ksets(4, 2).collect();
        assert_eq!(shadow(&all, 1).unwrap().len(), 4);
        assert!(shadow(&all, 3).is_err());
        assert!(shadow(&all, 0).is_err());
        assert!(shadow(&[], 1).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(lovasz_shadow_bound(1, 3, 2).unwrap(), 3.0);
        assert_eq!(lovasz_shadow_bound(6, 2, 1).unwrap(), 4.0);
        // z(z-1)/2 = 4  =>  z = (1 + sqrt 33) / 2
        let z = (1.0 + 33f64.sqrt()) / 2.0;
        assert!((lovasz_shadow_bound(4, 2, 1).unwrap() - z).abs() < 1e-9);
        assert!((z - 3.372281323).abs() < 1e-8);
        assert!(lovasz_shadow_bound(0, 2, 1).is_err());
    }

    #[test]
    fn root_is_monotone_and_consistent() {
        let mut prev = 0.0;
        for m in 1..200u64 {
            let z = solve_binomial_root(m, 3).unwrap();
            assert!(z > prev);
            assert!((ln_binomial_real(z, 3.0) - (m as f64).ln()).abs() < 1e-9);
            prev = z;
        }
    }
}
