//! Simplicial maps as validated levelwise index mappings.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sset::{FiniteDeltaSet, FiniteSimplicialSet, SimplexRef};

/// A map of simplicial sets, stored levelwise up to the smaller cap.
/// Commutation with every face and degeneracy table is checked eagerly.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub source: Arc<FiniteSimplicialSet>,
    pub target: Arc<FiniteSimplicialSet>,
    levels: Vec<Vec<usize>>,
}

impl PartialEq for SimplicialMap {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}
impl Eq for SimplicialMap {}

impl SimplicialMap {
    pub fn new(
        source: Arc<FiniteSimplicialSet>,
        target: Arc<FiniteSimplicialSet>,
        levels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let cap = source.dim_cap().min(target.dim_cap());
        assert_eq!(levels.len(), cap + 1);
        for q in 0..=cap {
            assert_eq!(levels[q].len(), source.card(q));
            for (idx, &v) in levels[q].iter().enumerate() {
                if v >= target.card(q) {
                    return Err(Error::BadSimplexRef { dim: q, index: v });
                }
                let _ = idx;
            }
        }
        for q in 1..=cap {
            for i in 0..=q {
                for idx in 0..source.card(q) {
                    let s = SimplexRef::new(q, idx);
                    let lhs = target.face(i, SimplexRef::new(q, levels[q][idx]));
                    let rhs = levels[q - 1][source.face(i, s).index];
                    if lhs.index != rhs {
                        return Err(Error::NotSimplicial { op: format!("d_{i}"), dim: q, index: idx });
                    }
                }
            }
        }
        for q in 0..cap {
            for i in 0..=q {
                for idx in 0..source.card(q) {
                    let s = SimplexRef::new(q, idx);
                    let lhs = target.degeneracy(i, SimplexRef::new(q, levels[q][idx]));
                    let rhs = levels[q + 1][source.degeneracy(i, s).index];
                    if lhs.index != rhs {
                        return Err(Error::NotSimplicial { op: format!("s_{i}"), dim: q, index: idx });
                    }
                }
            }
        }
        Ok(SimplicialMap { source, target, levels })
    }

    pub fn identity(k: Arc<FiniteSimplicialSet>) -> Self {
        let levels = (0..=k.dim_cap()).map(|q| (0..k.card(q)).collect()).collect();
        SimplicialMap { source: k.clone(), target: k, levels }
    }

    pub fn dim_cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn apply(&self, s: SimplexRef) -> SimplexRef {
        SimplexRef::new(s.dim, self.levels[s.dim][s.index])
    }

    pub fn levels(&self) -> &Vec<Vec<usize>> {
        &self.levels
    }

    pub fn compose(&self, first: &SimplicialMap) -> Result<SimplicialMap> {
        let cap = self.dim_cap().min(first.dim_cap());
        let levels = (0..=cap)
            .map(|q| first.levels[q].iter().map(|&v| self.levels[q][v]).collect())
            .collect();
        SimplicialMap::new(first.source.clone(), self.target.clone(), levels)
    }

    pub fn is_bijective(&self) -> bool {
        (0..=self.dim_cap()).all(|q| {
            if self.source.card(q) != self.target.card(q) {
                return false;
            }
            let mut seen = vec![false; self.target.card(q)];
            self.levels[q].iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
    }

    pub fn require_bijective(&self) -> Result<()> {
        for q in 0..=self.dim_cap() {
            let mut seen = vec![false; self.target.card(q)];
            if self.source.card(q) != self.target.card(q)
                || !self.levels[q].iter().all(|&v| !std::mem::replace(&mut seen[v], true))
            {
                return Err(Error::NotBijective { dim: q });
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<SimplicialMap> {
        self.require_bijective()?;
        let levels = (0..=self.dim_cap())
            .map(|q| {
                let mut inv = vec![0usize; self.source.card(q)];
                for (idx, &v) in self.levels[q].iter().enumerate() {
                    inv[v] = idx;
                }
                inv
            })
            .collect();
        SimplicialMap::new(self.target.clone(), self.source.clone(), levels)
    }

    /// The characteristic map `i_sigma` of a simplex, defined on the
    /// standard simplex of matching dimension.
    pub fn characteristic(
        simplex: SimplexRef,
        target: Arc<FiniteSimplicialSet>,
        cap: usize,
    ) -> Result<SimplicialMap> {
        use crate::generate::standard_simplex;
        use crate::monotone::MonotoneMap;
        let dn = Arc::new(standard_simplex(simplex.dim, cap));
        let levels = (0..=cap.min(target.dim_cap()))
            .map(|q| {
                MonotoneMap::enumerate(q, simplex.dim)
                    .iter()
                    .map(|t| target.structure_map(t, simplex).map(|r| r.index))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SimplicialMap::new(dn, target, levels)
    }
}

/// A map of Delta-sets: levelwise mappings commuting with faces.
#[derive(Clone, Debug)]
pub struct DeltaMap {
    pub source: Arc<FiniteDeltaSet>,
    pub target: Arc<FiniteDeltaSet>,
    levels: Vec<Vec<usize>>,
}

impl PartialEq for DeltaMap {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}
impl Eq for DeltaMap {}

impl DeltaMap {
    pub fn new(
        source: Arc<FiniteDeltaSet>,
        target: Arc<FiniteDeltaSet>,
        levels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let cap = source.dim_cap().min(target.dim_cap());
        assert_eq!(levels.len(), cap + 1);
        for q in 0..=cap {
            assert_eq!(levels[q].len(), source.card(q));
            for &v in &levels[q] {
                if v >= target.card(q) {
                    return Err(Error::BadSimplexRef { dim: q, index: v });
                }
            }
        }
        for q in 1..=cap {
            for i in 0..=q {
                for idx in 0..source.card(q) {
                    let s = SimplexRef::new(q, idx);
                    let lhs = target.face(i, SimplexRef::new(q, levels[q][idx]));
                    let rhs = levels[q - 1][source.face(i, s).index];
                    if lhs.index != rhs {
                        return Err(Error::NotSimplicial { op: format!("d_{i}"), dim: q, index: idx });
                    }
                }
            }
        }
        Ok(DeltaMap { source, target, levels })
    }

    pub fn apply(&self, s: SimplexRef) -> SimplexRef {
        SimplexRef::new(s.dim, self.levels[s.dim][s.index])
    }

    pub fn levels(&self) -> &Vec<Vec<usize>> {
        &self.levels
    }

    pub fn dim_cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn is_bijective(&self) -> bool {
        (0..=self.dim_cap()).all(|q| {
            if self.source.card(q) != self.target.card(q) {
                return false;
            }
            let mut seen = vec![false; self.target.card(q)];
            self.levels[q].iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
    }
}
