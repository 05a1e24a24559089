//! Nondecreasing maps `[m] -> [n]` between finite ordinals.
//!
//! These maps are the morphism currency of the whole kernel: structure maps
//! of simplicial sets are pullbacks along them, and every map factors
//! uniquely as a surjection followed by a strictly increasing injection.

use crate::error::{Error, Result};

/// A nondecreasing map `[m] -> [n]`, stored by its value table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonotoneMap {
    values: Vec<usize>,
    target: usize,
}

impl std::fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]->[{}]{:?}", self.source_arity(), self.target, self.values)
    }
}

impl MonotoneMap {
    pub fn new(values: Vec<usize>, target: usize) -> Result<Self> {
        assert!(!values.is_empty(), "a map [m]->[n] needs m >= 0, so at least one value");
        for i in 0..values.len() {
            if values[i] > target || (i > 0 && values[i] < values[i - 1]) {
                return Err(Error::NotMonotone { position: i });
            }
        }
        Ok(MonotoneMap { values, target })
    }

    pub fn identity(n: usize) -> Self {
        MonotoneMap { values: (0..=n).collect(), target: n }
    }

    /// The unique strictly increasing map `[n-1] -> [n]` missing `i`.
    pub fn coface(i: usize, n: usize) -> Self {
        assert!(n > 0 && i <= n);
        let values = (0..n).map(|j| if j < i { j } else { j + 1 }).collect();
        MonotoneMap { values, target: n }
    }

    /// The unique surjective nondecreasing map `[n+1] -> [n]` taking `i` twice.
    pub fn codegeneracy(i: usize, n: usize) -> Self {
        assert!(i <= n);
        let values = (0..=n + 1).map(|j| if j <= i { j } else { j - 1 }).collect();
        MonotoneMap { values, target: n }
    }

    pub fn source_arity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn target_arity(&self) -> usize {
        self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.values.len() - 1 && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_surjective(&self) -> bool {
        // nondecreasing, so surjectivity = hitting 0, n and never skipping
        self.values[0] == 0
            && *self.values.last().unwrap() == self.target
            && self.values.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Entrywise verification backing a claimed "strictly increasing" flag.
    pub fn require_strictly_increasing(&self) -> Result<()> {
        for (i, w) in self.values.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NotStrictlyIncreasing {
                    src: self.source_arity(),
                    tgt: self.target,
                    position: i + 1,
                });
            }
        }
        Ok(())
    }

    /// Function composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &MonotoneMap) -> Result<MonotoneMap> {
        if other.target != self.source_arity() {
            return Err(Error::ArityMismatch {
                lhs_src: self.source_arity(),
                lhs_tgt: self.target,
                rhs_src: other.source_arity(),
                rhs_tgt: other.target,
            });
        }
        let values = other.values.iter().map(|&v| self.values[v]).collect();
        Ok(MonotoneMap { values, target: self.target })
    }

    /// The unique factorization `self = mono . epi` with `epi` surjective
    /// and `mono` strictly increasing.
    pub fn epi_mono_factor(&self) -> (MonotoneMap, MonotoneMap) {
        let mut image: Vec<usize> = self.values.clone();
        image.dedup();
        let k = image.len() - 1;
        let epi_values = self
            .values
            .iter()
            .map(|&v| image.binary_search(&v).unwrap())
            .collect();
        let epi = MonotoneMap { values: epi_values, target: k };
        let mono = MonotoneMap { values: image, target: self.target };
        (epi, mono)
    }

    /// Values in `[n]` missed by a strictly increasing map, ascending.
    pub fn missed_values(&self) -> Vec<usize> {
        let hit: std::collections::BTreeSet<usize> = self.values.iter().copied().collect();
        (0..=self.target).filter(|v| !hit.contains(v)).collect()
    }

    /// For a surjective map, the positions `i` with `theta(i) = theta(i+1)`;
    /// these are the codegeneracy indices of the canonical word.
    pub fn repeat_positions(&self) -> Vec<usize> {
        self.values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] == w[1])
            .map(|(i, _)| i)
            .collect()
    }

    /// All nondecreasing maps `[m] -> [n]` in lexicographic order of value tables.
    pub fn enumerate(m: usize, n: usize) -> Vec<MonotoneMap> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; m + 1];
        loop {
            out.push(MonotoneMap { values: cur.clone(), target: n });
            // next nondecreasing tuple
            let mut i = m + 1;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n {
                    cur[i] += 1;
                    for j in i + 1..=m {
                        cur[j] = cur[i];
                    }
                    break;
                }
            }
        }
    }

    /// All strictly increasing maps `[m] -> [n]`, lexicographic.
    pub fn enumerate_injections(m: usize, n: usize) -> Vec<MonotoneMap> {
        let mut out = Vec::new();
        if m > n {
            return out;
        }
        let mut cur: Vec<usize> = (0..=m).collect();
        loop {
            out.push(MonotoneMap { values: cur.clone(), target: n });
            let mut i = m + 1;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n - (m - i) {
                    cur[i] += 1;
                    for j in i + 1..=m {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// All surjective nondecreasing maps `[m] -> [n]`.
    pub fn enumerate_surjections(m: usize, n: usize) -> Vec<MonotoneMap> {
        MonotoneMap::enumerate(m, n)
            .into_iter()
            .filter(|t| t.is_surjective())
            .collect()
    }

    /// Lexicographic rank among all nondecreasing maps with the same arities.
    pub fn lex_rank(&self) -> usize {
        // number of nondecreasing tuples of length `len` over [lo..=n] is
        // C(n - lo + len, len)
        fn count(len: usize, lo: usize, n: usize) -> usize {
            binomial(n - lo + len, len)
        }
        let m = self.source_arity();
        let mut rank = 0;
        let mut lo = 0;
        for i in 0..=m {
            for v in lo..self.values[i] {
                rank += count(m - i, v, self.target);
            }
            lo = self.values[i];
        }
        rank
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_composes_to_identity() {
        let id2 = MonotoneMap::identity(2);
        assert_eq!(id2.compose(&id2).unwrap(), id2);
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        // d(0): [1]->[2] after d(0): [1]->[2] needs target 2 = source 1, which fails
        let d0 = MonotoneMap::coface(0, 2);
        assert!(matches!(
            d0.compose(&d0),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn compose_matches_pointwise_table() {
        // s(0): [2]->[1] after d(0): [1]->[2]
        let s0 = MonotoneMap::codegeneracy(0, 1);
        let d0 = MonotoneMap::coface(0, 2);
        let got = s0.compose(&d0).unwrap();
        let expect: Vec<usize> = (0..=1).map(|i| s0.apply(d0.apply(i))).collect();
        assert_eq!(got.values(), &expect[..]);
        // and the pair from the spec's rejected order is composable too,
        // both ways round, as plain function composition
        let d1 = MonotoneMap::coface(1, 2);
        let s0_21 = MonotoneMap::codegeneracy(0, 1);
        assert!(d1.compose(&s0_21).is_ok());
    }

    #[test]
    fn epi_mono_identity_case() {
        let id3 = MonotoneMap::identity(3);
        let (epi, mono) = id3.epi_mono_factor();
        assert!(epi.is_identity() && mono.is_identity());
    }

    #[test]
    fn epi_mono_forced_by_image() {
        let theta = MonotoneMap::new(vec![0, 0, 1], 2).unwrap();
        let (epi, mono) = theta.epi_mono_factor();
        assert_eq!(epi.values(), &[0, 0, 1]);
        assert_eq!(epi.target_arity(), 1);
        assert_eq!(mono.values(), &[0, 1]);
        assert_eq!(mono.target_arity(), 2);
    }

    #[test]
    fn epi_mono_recomposes_for_all_small_maps() {
        for m in 0..=5 {
            for n in 0..=5 {
                for theta in MonotoneMap::enumerate(m, n) {
                    let (epi, mono) = theta.epi_mono_factor();
                    assert!(epi.is_surjective());
                    assert!(mono.is_strictly_increasing());
                    assert_eq!(mono.compose(&epi).unwrap(), theta);
                    // mono image = image(theta)
                    let mut img: Vec<usize> = theta.values().to_vec();
                    img.dedup();
                    assert_eq!(mono.values(), &img[..]);
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        // nondecreasing [m]->[n] count C(n+m+1, m+1)
        assert_eq!(MonotoneMap::enumerate(1, 1).len(), 3);
        assert_eq!(MonotoneMap::enumerate(2, 3).len(), binomial(6, 3));
        assert_eq!(MonotoneMap::enumerate_injections(1, 3).len(), binomial(4, 2));
        // surjections [m]->[n] count C(m, n)
        assert_eq!(MonotoneMap::enumerate_surjections(4, 2).len(), binomial(4, 2));
    }

    #[test]
    fn lex_rank_is_position_in_enumeration() {
        for (i, t) in MonotoneMap::enumerate(3, 2).iter().enumerate() {
            assert_eq!(t.lex_rank(), i);
        }
        for (i, t) in MonotoneMap::enumerate(2, 4).iter().enumerate() {
            assert_eq!(t.lex_rank(), i);
        }
    }
}
