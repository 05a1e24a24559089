//! Kan checking by exhaustive horn enumeration, homotopy of simplices by
//! exact search over maps of the prism, minimality, and the fundamental
//! group of a one-vertex Kan set.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generate::{product, standard_simplex};
use crate::groups::FiniteGroup;
use crate::monotone::MonotoneMap;
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};

/// Horn data: the faces of a prospective n-simplex with the k-th missing.
/// The compatibility identities make it a simplicial map from the horn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornProblem {
    pub n: usize,
    pub k: usize,
    /// length n+1, None exactly at position k
    pub faces: Vec<Option<usize>>,
}

impl HornProblem {
    pub fn new(k_set: &FiniteSimplicialSet, n: usize, k: usize, faces: Vec<Option<usize>>) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::InvalidHorn { k, n });
        }
        assert_eq!(faces.len(), n + 1);
        for (i, f) in faces.iter().enumerate() {
            match f {
                None if i == k => {}
                Some(idx) if i != k && *idx < k_set.card(n - 1) => {}
                _ => return Err(Error::InvalidHorn { k, n }),
            }
        }
        let problem = HornProblem { n, k, faces };
        problem.check_compatible(k_set)?;
        Ok(problem)
    }

    fn check_compatible(&self, k_set: &FiniteSimplicialSet) -> Result<()> {
        if self.n < 2 {
            return Ok(());
        }
        for a in 0..self.n {
            for b in a + 1..=self.n {
                if a == self.k || b == self.k {
                    continue;
                }
                let xa = SimplexRef::new(self.n - 1, self.faces[a].unwrap());
                let xb = SimplexRef::new(self.n - 1, self.faces[b].unwrap());
                if k_set.face(a, xb) != k_set.face(b - 1, xa) {
                    return Err(Error::NotSimplicial {
                        op: format!("horn faces d_{a} x_{b} = d_{} x_{a}", b - 1),
                        dim: self.n - 1,
                        index: self.faces[b].unwrap(),
                    });
                }
            }
        }
        Ok(())
    }

    /// All fillers: n-simplices whose faces match off position k.
    pub fn fillers(&self, k_set: &FiniteSimplicialSet) -> Vec<usize> {
        (0..k_set.card(self.n))
            .filter(|&y| {
                (0..=self.n).all(|i| {
                    i == self.k
                        || k_set.face(i, SimplexRef::new(self.n, y)).index == self.faces[i].unwrap()
                })
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct KanReport {
    pub max_dim: usize,
    pub horns_checked: u64,
    pub unfillable: Vec<HornProblem>,
}

impl KanReport {
    pub fn is_kan(&self) -> bool {
        self.unfillable.is_empty()
    }
}

/// Enumerate every horn problem with ambient dimension at most `max_dim`
/// and search for extensions.
pub fn kan_check(k_set: &FiniteSimplicialSet, max_dim: usize) -> Result<KanReport> {
    if max_dim > k_set.dim_cap() {
        return Err(Error::CapExceeded { needed: max_dim, cap: k_set.dim_cap() });
    }
    let mut report = KanReport { max_dim, horns_checked: 0, unfillable: Vec::new() };
    for n in 1..=max_dim {
        for k in 0..=n {
            // index fillers by their face tuple off position k
            let mut by_faces: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for y in 0..k_set.card(n) {
                let key: Vec<usize> = (0..=n)
                    .filter(|&i| i != k)
                    .map(|i| k_set.face(i, SimplexRef::new(n, y)).index)
                    .collect();
                by_faces.entry(key).or_default().push(y);
            }
            let positions: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
            let mut chosen: Vec<usize> = Vec::with_capacity(n);
            enumerate_horns(k_set, n, k, &positions, &mut chosen, &mut |faces| {
                report.horns_checked += 1;
                if !by_faces.contains_key(faces) {
                    let mut full = vec![None; n + 1];
                    for (pos, &f) in positions.iter().zip(faces.iter()) {
                        full[*pos] = Some(f);
                    }
                    report.unfillable.push(HornProblem { n, k, faces: full });
                }
            });
        }
    }
    Ok(report)
}

fn enumerate_horns(
    k_set: &FiniteSimplicialSet,
    n: usize,
    k: usize,
    positions: &[usize],
    chosen: &mut Vec<usize>,
    sink: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == positions.len() {
        sink(chosen);
        return;
    }
    let b = positions[chosen.len()];
    'candidates: for y in 0..k_set.card(n - 1) {
        // compatibility with previously chosen faces: d_a x_b = d_{b-1} x_a
        for (j, &a) in positions.iter().enumerate().take(chosen.len()) {
            debug_assert!(a < b);
            let xa = SimplexRef::new(n - 1, chosen[j]);
            let xb = SimplexRef::new(n - 1, y);
            if k_set.face(a, xb) != k_set.face(b - 1, xa) {
                continue 'candidates;
            }
        }
        chosen.push(y);
        enumerate_horns(k_set, n, k, positions, chosen, sink);
        chosen.pop();
        let _ = k;
    }
}

/// A partial-map search problem: extend a forced partial assignment on a
/// source complex to a full simplicial map into the target. Candidates may
/// be restricted per source simplex, and the image can be required to be
/// levelwise injective on nondegenerate simplices of each dimension.
pub struct MapSearch {
    pub source: Arc<FiniteSimplicialSet>,
    pub target: Arc<FiniteSimplicialSet>,
    pub forced: Vec<Vec<Option<usize>>>,
    /// per dimension, per source index, the allowed target indices;
    /// None means everything in that dimension
    pub allowed: Option<Vec<Vec<Vec<usize>>>>,
    pub injective: bool,
    pub budget: u64,
}

impl MapSearch {
    pub fn unrestricted(
        source: Arc<FiniteSimplicialSet>,
        target: Arc<FiniteSimplicialSet>,
        forced: Vec<Vec<Option<usize>>>,
        budget: u64,
    ) -> Self {
        MapSearch { source, target, forced, allowed: None, injective: false, budget }
    }

    /// Resolve the image of a simplex from assigned values, passing through
    /// the Eilenberg-Zilber base for degenerate simplices.
    fn resolve(&self, assigned: &[Vec<Option<usize>>], s: SimplexRef) -> Option<usize> {
        if let Some(v) = assigned[s.dim][s.index] {
            return Some(v);
        }
        let (epi, base) = self.source.ez_decompose(s).ok()?;
        if epi.is_identity() {
            return None;
        }
        let b = assigned[base.dim][base.index]?;
        Some(
            self.target
                .structure_map(&epi, SimplexRef::new(base.dim, b))
                .expect("degeneracies stay under the cap")
                .index,
        )
    }

    fn candidates_of(&self, assigned: &[Vec<Option<usize>>], s: SimplexRef) -> Vec<usize> {
        let base: Vec<usize> = match &self.allowed {
            Some(a) => a[s.dim][s.index].clone(),
            None => (0..self.target.card(s.dim)).collect(),
        };
        base.into_iter()
            .filter(|&y| {
                if s.dim == 0 {
                    return true;
                }
                (0..=s.dim).all(|i| {
                    let f = self.source.face(i, s);
                    match self.resolve(assigned, f) {
                        Some(want) => self.target.face(i, SimplexRef::new(s.dim, y)).index == want,
                        None => true,
                    }
                })
            })
            .collect()
    }

    /// Depth-first search over nondegenerate unknowns in dimension order,
    /// with forward checking of the unknowns one dimension up. Returns the
    /// first extension found, or None when the space is exhausted.
    pub fn run(&self) -> Result<Option<SimplicialMap>> {
        let cap = self.source.dim_cap().min(self.target.dim_cap());
        let mut assigned: Vec<Vec<Option<usize>>> = self.forced.clone();
        // consistency of forced values on degenerate simplices
        for q in 0..=cap {
            for idx in 0..self.source.card(q) {
                let s = SimplexRef::new(q, idx);
                if self.source.is_degenerate(s) {
                    if let (Some(v), Some(r)) = (assigned[q][idx], {
                        let mut a2 = assigned.clone();
                        a2[q][idx] = None;
                        self.resolve(&a2, s)
                    }) {
                        if v != r {
                            return Ok(None);
                        }
                    }
                }
            }
        }
        let mut unknowns: Vec<SimplexRef> = Vec::new();
        for q in 0..=cap {
            for idx in 0..self.source.card(q) {
                let s = SimplexRef::new(q, idx);
                if assigned[q][idx].is_none() && !self.source.is_degenerate(s) {
                    unknowns.push(s);
                }
            }
        }
        // which unknowns have a given simplex as a face
        let mut dependents: HashMap<SimplexRef, Vec<usize>> = HashMap::new();
        for (pos, &s) in unknowns.iter().enumerate() {
            if s.dim > 0 {
                for i in 0..=s.dim {
                    dependents.entry(self.source.face(i, s)).or_default().push(pos);
                }
            }
        }
        let mut used: Vec<Vec<bool>> = (0..=cap).map(|q| vec![false; self.target.card(q)]).collect();
        if self.injective {
            for q in 0..=cap {
                for idx in 0..self.source.card(q) {
                    if let Some(v) = assigned[q][idx] {
                        if !self.source.is_degenerate(SimplexRef::new(q, idx)) {
                            used[q][v] = true;
                        }
                    }
                }
            }
        }
        let mut spent = 0u64;
        if !self.dfs(&mut assigned, &unknowns, &dependents, &mut used, 0, &mut spent)? {
            return Ok(None);
        }
        let levels: Vec<Vec<usize>> = (0..=cap)
            .map(|q| {
                (0..self.source.card(q))
                    .map(|idx| {
                        self.resolve(&assigned, SimplexRef::new(q, idx))
                            .expect("search assigned every nondegenerate simplex")
                    })
                    .collect()
            })
            .collect();
        Ok(Some(SimplicialMap::new(self.source.clone(), self.target.clone(), levels)?))
    }

    fn dfs(
        &self,
        assigned: &mut Vec<Vec<Option<usize>>>,
        unknowns: &[SimplexRef],
        dependents: &HashMap<SimplexRef, Vec<usize>>,
        used: &mut Vec<Vec<bool>>,
        at: usize,
        spent: &mut u64,
    ) -> Result<bool> {
        if at == unknowns.len() {
            return Ok(true);
        }
        let s = unknowns[at];
        for y in self.candidates_of(assigned, s) {
            *spent += 1;
            if *spent > self.budget {
                return Err(Error::BudgetExhausted { budget: self.budget });
            }
            if self.injective && used[s.dim][y] {
                continue;
            }
            assigned[s.dim][s.index] = Some(y);
            if self.injective {
                used[s.dim][y] = true;
            }
            // forward check: dependents whose faces are now all known must
            // still have a candidate
            let viable = dependents.get(&s).map_or(true, |deps| {
                deps.iter().all(|&pos| {
                    let u = unknowns[pos];
                    if assigned[u.dim][u.index].is_some() {
                        return true;
                    }
                    let all_known = (0..=u.dim)
                        .all(|i| self.resolve(assigned, self.source.face(i, u)).is_some());
                    !all_known || !self.candidates_of(assigned, u).is_empty()
                })
            });
            if viable && self.dfs(assigned, unknowns, dependents, used, at + 1, spent)? {
                return Ok(true);
            }
            assigned[s.dim][s.index] = None;
            if self.injective {
                used[s.dim][y] = false;
            }
        }
        Ok(false)
    }
}

/// Search for a homotopy rel boundary between two simplices of the same
/// dimension. `None` means certified absence at the given budget.
pub fn homotopic_simplices(
    k: &Arc<FiniteSimplicialSet>,
    sigma: SimplexRef,
    tau: SimplexRef,
    budget: u64,
) -> Result<Option<SimplicialMap>> {
    assert_eq!(sigma.dim, tau.dim);
    let q = sigma.dim;
    if q + 1 > k.dim_cap() {
        return Err(Error::CapExceeded { needed: q + 1, cap: k.dim_cap() });
    }
    if q > 0 {
        for i in 0..=q {
            if k.face(i, sigma) != k.face(i, tau) {
                return Ok(None);
            }
        }
    }
    let cap = q + 1;
    let dq = Arc::new(standard_simplex(q, cap));
    let d1 = Arc::new(standard_simplex(1, cap));
    let (prod, _, _) = product(&dq, &d1);
    let thetas: Vec<Vec<MonotoneMap>> = (0..=cap).map(|m| MonotoneMap::enumerate(m, q)).collect();
    let psis: Vec<Vec<MonotoneMap>> = (0..=cap).map(|m| MonotoneMap::enumerate(m, 1)).collect();
    let mut forced: Vec<Vec<Option<usize>>> =
        (0..=cap).map(|m| vec![None; prod.card(m)]).collect();
    for m in 0..=cap {
        for (a, theta) in thetas[m].iter().enumerate() {
            for (b, psi) in psis[m].iter().enumerate() {
                let idx = a * psis[m].len() + b;
                let end0 = psi.values().iter().all(|&v| v == 0);
                let end1 = psi.values().iter().all(|&v| v == 1);
                let on_boundary = !theta.is_surjective();
                if end0 || (on_boundary && !end1) {
                    forced[m][idx] = Some(k.structure_map(theta, sigma)?.index);
                } else if end1 || on_boundary {
                    forced[m][idx] = Some(k.structure_map(theta, tau)?.index);
                }
            }
        }
    }
    let search = MapSearch::unrestricted(prod, k.clone(), forced, budget);
    search.run()
}

/// Search for a homotopy between two parallel simplicial maps.
pub fn map_homotopy(
    f: &SimplicialMap,
    g: &SimplicialMap,
    budget: u64,
) -> Result<Option<SimplicialMap>> {
    assert!(Arc::ptr_eq(&f.source, &g.source) && Arc::ptr_eq(&f.target, &g.target));
    let k = &f.source;
    let cap = k.dim_cap().min(f.target.dim_cap());
    let d1 = Arc::new(standard_simplex(1, cap));
    let (prod, _, _) = product(k, &d1);
    let psis: Vec<Vec<MonotoneMap>> = (0..=cap).map(|m| MonotoneMap::enumerate(m, 1)).collect();
    let mut forced: Vec<Vec<Option<usize>>> =
        (0..=cap).map(|m| vec![None; prod.card(m)]).collect();
    for m in 0..=cap {
        for a in 0..k.card(m) {
            for (b, psi) in psis[m].iter().enumerate() {
                let idx = a * psis[m].len() + b;
                if psi.values().iter().all(|&v| v == 0) {
                    forced[m][idx] = Some(f.apply(SimplexRef::new(m, a)).index);
                } else if psi.values().iter().all(|&v| v == 1) {
                    forced[m][idx] = Some(g.apply(SimplexRef::new(m, a)).index);
                }
            }
        }
    }
    let search = MapSearch::unrestricted(prod, f.target.clone(), forced, budget);
    search.run()
}

#[derive(Debug)]
pub struct MinimalityReport {
    pub max_dim: usize,
    pub pairs_searched: u64,
    pub homotopic_unequal: Vec<(SimplexRef, SimplexRef)>,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.homotopic_unequal.is_empty()
    }
}

/// Search all same-boundary pairs for homotopies; the input must already be
/// known Kan at the tested dimensions.
pub fn is_minimal(k: &Arc<FiniteSimplicialSet>, max_dim: usize, budget: u64) -> Result<MinimalityReport> {
    let mut report = MinimalityReport { max_dim, pairs_searched: 0, homotopic_unequal: Vec::new() };
    for q in 0..=max_dim {
        for a in 0..k.card(q) {
            for b in a + 1..k.card(q) {
                report.pairs_searched += 1;
                if homotopic_simplices(k, SimplexRef::new(q, a), SimplexRef::new(q, b), budget)?
                    .is_some()
                {
                    report.homotopic_unequal.push((SimplexRef::new(q, a), SimplexRef::new(q, b)));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug)]
pub struct FundamentalGroup {
    pub group: FiniteGroup,
    /// homotopy class of every 1-simplex
    pub class_of: Vec<usize>,
    /// representative 1-simplex of every class
    pub representative: Vec<usize>,
}

/// The fundamental group of a one-vertex Kan simplicial set: homotopy
/// classes of loops, multiplied through filling 2-simplices. Kan-ness at
/// dimension 2 is verified on the way (every needed horn must fill).
pub fn fundamental_group(k: &Arc<FiniteSimplicialSet>, budget: u64) -> Result<FundamentalGroup> {
    if k.card(0) != 1 {
        return Err(Error::NotOneVertex { found: k.card(0) });
    }
    if k.dim_cap() < 2 {
        return Err(Error::CapExceeded { needed: 2, cap: k.dim_cap() });
    }
    let n1 = k.card(1);
    // homotopy classes of edges
    let mut class_of = vec![usize::MAX; n1];
    let mut representative = Vec::new();
    for e in 0..n1 {
        if class_of[e] != usize::MAX {
            continue;
        }
        let c = representative.len();
        class_of[e] = c;
        for f in e + 1..n1 {
            if class_of[f] == usize::MAX
                && homotopic_simplices(k, SimplexRef::new(1, e), SimplexRef::new(1, f), budget)?
                    .is_some()
            {
                class_of[f] = c;
            }
        }
        representative.push(e);
    }
    let n = representative.len();
    // product: find a 2-simplex with d_2 = rho, d_0 = sigma; its d_1 gives
    // the product class; well-definedness checked over all witnesses
    let mut table = vec![usize::MAX; n * n];
    for w in 0..k.card(2) {
        let s = SimplexRef::new(2, w);
        let rho = class_of[k.face(2, s).index];
        let sigma = class_of[k.face(0, s).index];
        let tau = class_of[k.face(1, s).index];
        let slot = &mut table[rho * n + sigma];
        if *slot == usize::MAX {
            *slot = tau;
        } else if *slot != tau {
            return Err(Error::LawViolated {
                law: "product well-defined".into(),
                detail: format!("2-simplex {w} contradicts an earlier witness"),
            });
        }
    }
    if let Some(pos) = table.iter().position(|&v| v == usize::MAX) {
        return Err(Error::NotKan { needed: 2, n: 2, k: pos });
    }
    let group = FiniteGroup::from_table(n, table, "pi1")?;
    Ok(FundamentalGroup { group, class_of, representative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::nerve;
    use crate::category::FiniteCategory;

    #[test]
    fn point_is_kan() {
        let pt = standard_simplex(0, 3);
        assert!(kan_check(&pt, 3).unwrap().is_kan());
    }

    #[test]
    fn interval_is_not_kan() {
        let d1 = standard_simplex(1, 2);
        let report = kan_check(&d1, 2).unwrap();
        assert!(!report.is_kan());
        assert!(report.unfillable.iter().any(|h| h.n == 2 && h.k == 0));
    }

    #[test]
    fn nerves_of_groups_are_kan() {
        for order in [2usize, 3, 4] {
            let n = nerve(&FiniteCategory::from_group(&FiniteGroup::cyclic(order)), 3);
            assert!(kan_check(&n.sset, 3).unwrap().is_kan());
        }
    }

    #[test]
    fn horn_problem_validation() {
        let d1 = standard_simplex(1, 2);
        // Lambda_0[2] horn with x_1 = edge 00, x_2 = edge 01 is valid but unfillable
        let e00 = MonotoneMap::new(vec![0, 0], 1).unwrap().lex_rank();
        let e01 = MonotoneMap::new(vec![0, 1], 1).unwrap().lex_rank();
        let h = HornProblem::new(&d1, 2, 0, vec![None, Some(e00), Some(e01)]).unwrap();
        assert!(h.fillers(&d1).is_empty());
        let h2 = HornProblem::new(&d1, 2, 0, vec![None, Some(e01), Some(e00)]).unwrap();
        assert_eq!(h2.fillers(&d1).len(), 1);
    }

    #[test]
    fn constant_homotopy_exists() {
        let n = nerve(&FiniteCategory::from_group(&FiniteGroup::cyclic(2)), 2);
        let s = SimplexRef::new(1, 1);
        assert!(homotopic_simplices(&n.sset, s, s, 10_000).unwrap().is_some());
    }

    #[test]
    fn distinct_nerve_edges_are_not_homotopic() {
        let n = nerve(&FiniteCategory::from_group(&FiniteGroup::cyclic(2)), 2);
        let a = SimplexRef::new(1, 0);
        let b = SimplexRef::new(1, 1);
        assert!(homotopic_simplices(&n.sset, a, b, 1_000_000).unwrap().is_none());
    }

    #[test]
    fn nerve_is_minimal_in_low_dims() {
        let n = nerve(&FiniteCategory::from_group(&FiniteGroup::cyclic(3)), 3);
        let report = is_minimal(&n.sset, 2, 1_000_000).unwrap();
        assert!(report.is_minimal());
    }

    #[test]
    fn point_is_minimal() {
        let pt = Arc::new(standard_simplex(0, 2));
        assert!(is_minimal(&pt, 1, 1000).unwrap().is_minimal());
    }

    #[test]
    fn pi1_of_nerve_recovers_group() {
        for g in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric3()] {
            let n = nerve(&FiniteCategory::from_group(&g), 3);
            let pi1 = fundamental_group(&n.sset, 1_000_000).unwrap();
            assert_eq!(pi1.group.order(), g.order());
            // classes are singletons, and the product is the group product
            for a in 0..g.order() {
                for b in 0..g.order() {
                    let ca = pi1.class_of[a];
                    let cb = pi1.class_of[b];
                    assert_eq!(
                        pi1.group.mul(ca, cb),
                        pi1.class_of[g.mul(a, b)]
                    );
                }
            }
        }
    }

    #[test]
    fn pi1_of_point_is_trivial() {
        let pt = Arc::new(standard_simplex(0, 2));
        let pi1 = fundamental_group(&pt, 1000).unwrap();
        assert_eq!(pi1.group.order(), 1);
    }

    #[test]
    fn multi_vertex_input_refused() {
        let d1 = Arc::new(standard_simplex(1, 2));
        assert!(matches!(fundamental_group(&d1, 1000), Err(Error::NotOneVertex { .. })));
    }
}
