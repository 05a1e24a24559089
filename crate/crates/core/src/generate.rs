//! Generators: standard simplices, boundaries, horns, products, and the
//! bridges between simplicial sets and Delta-sets.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monotone::MonotoneMap;
use crate::smap::{DeltaMap, SimplicialMap};
use crate::sset::{FiniteDeltaSet, FiniteSimplicialSet, SimplexRef};

/// The standard simplex: q-simplices are all nondecreasing maps `[q] -> [n]`,
/// indexed by lexicographic rank of their value tables.
pub fn standard_simplex(n: usize, cap: usize) -> FiniteSimplicialSet {
    let per_dim: Vec<Vec<MonotoneMap>> = (0..=cap).map(|q| MonotoneMap::enumerate(q, n)).collect();
    let cards: Vec<usize> = per_dim.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let d = MonotoneMap::coface(i, q);
            per_i.push(per_dim[q].iter().map(|t| t.compose(&d).unwrap().lex_rank()).collect());
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let s = MonotoneMap::codegeneracy(i, q);
            per_i.push(per_dim[q].iter().map(|t| t.compose(&s).unwrap().lex_rank()).collect());
        }
        degens.push(per_i);
    }
    FiniteSimplicialSet::new(cap, cards, faces, degens).expect("standard simplex is lawful")
}

/// The top nondegenerate simplex `iota_n` of the standard simplex.
pub fn iota(n: usize) -> SimplexRef {
    SimplexRef::new(n, MonotoneMap::identity(n).lex_rank())
}

fn simplex_subset(
    n: usize,
    cap: usize,
    keep: impl Fn(&MonotoneMap) -> bool,
) -> (FiniteSimplicialSet, Vec<Vec<usize>>) {
    let ambient = standard_simplex(n, cap);
    let member: Vec<Vec<bool>> = (0..=cap)
        .map(|q| MonotoneMap::enumerate(q, n).iter().map(&keep).collect())
        .collect();
    ambient.subset(&member).expect("image conditions are closed under structure maps")
}

/// The boundary of the standard simplex: maps with image different from `[n]`.
pub fn boundary_simplex(n: usize, cap: usize) -> FiniteSimplicialSet {
    simplex_subset(n, cap, |t| !t.is_surjective()).0
}

/// The k-horn: maps whose image does not contain `[n] \ {k}`.
pub fn horn(n: usize, k: usize, cap: usize) -> Result<FiniteSimplicialSet> {
    if k > n {
        return Err(Error::InvalidHorn { k, n });
    }
    Ok(simplex_subset(n, cap, |t| {
        !(0..=n).filter(|&v| v != k).all(|v| t.values().contains(&v))
    })
    .0)
}

/// What to generate through the single entry point used by the CLI.
#[derive(Clone, Copy, Debug)]
pub enum GenerateKind {
    Standard,
    Boundary,
    Horn,
    Skeleton,
}

pub fn generate(
    kind: GenerateKind,
    n: usize,
    k: Option<usize>,
    input: Option<&FiniteSimplicialSet>,
    cap: usize,
) -> Result<FiniteSimplicialSet> {
    match kind {
        GenerateKind::Standard => Ok(standard_simplex(n, cap)),
        GenerateKind::Boundary => Ok(boundary_simplex(n, cap)),
        GenerateKind::Horn => horn(n, k.ok_or(Error::InvalidHorn { k: usize::MAX, n })?, cap),
        GenerateKind::Skeleton => {
            let kset = input.expect("skeleton needs an input set");
            Ok(kset.skeleton(n).0)
        }
    }
}

/// Dimension-wise product with both projections.
pub fn product(
    k: &Arc<FiniteSimplicialSet>,
    l: &Arc<FiniteSimplicialSet>,
) -> (Arc<FiniteSimplicialSet>, SimplicialMap, SimplicialMap) {
    let cap = k.dim_cap().min(l.dim_cap());
    let cards: Vec<usize> = (0..=cap).map(|q| k.card(q) * l.card(q)).collect();
    let pair = |q: usize, a: usize, b: usize| a * l.card(q) + b;
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let mut table = Vec::with_capacity(cards[q]);
            for a in 0..k.card(q) {
                let fa = k.face(i, SimplexRef::new(q, a)).index;
                for b in 0..l.card(q) {
                    let fb = l.face(i, SimplexRef::new(q, b)).index;
                    table.push(pair(q - 1, fa, fb));
                }
            }
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let mut table = Vec::with_capacity(cards[q]);
            for a in 0..k.card(q) {
                let sa = k.degeneracy(i, SimplexRef::new(q, a)).index;
                for b in 0..l.card(q) {
                    let sb = l.degeneracy(i, SimplexRef::new(q, b)).index;
                    table.push(pair(q + 1, sa, sb));
                }
            }
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let prod = Arc::new(
        FiniteSimplicialSet::new(cap, cards, faces, degens).expect("product of lawful sets is lawful"),
    );
    let mut to_k = Vec::with_capacity(cap + 1);
    let mut to_l = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut pk = Vec::with_capacity(prod.card(q));
        let mut pl = Vec::with_capacity(prod.card(q));
        for a in 0..k.card(q) {
            for b in 0..l.card(q) {
                pk.push(a);
                pl.push(b);
            }
        }
        to_k.push(pk);
        to_l.push(pl);
    }
    let pr_k = SimplicialMap::new(prod.clone(), k.clone(), to_k).expect("projection commutes");
    let pr_l = SimplicialMap::new(prod.clone(), l.clone(), to_l).expect("projection commutes");
    (prod, pr_k, pr_l)
}

/// Pair index helpers for products built by [`product`].
pub fn product_index(l_card: usize, a: usize, b: usize) -> usize {
    a * l_card + b
}

pub fn product_split(l_card: usize, idx: usize) -> (usize, usize) {
    (idx / l_card, idx % l_card)
}

/// Dimension-wise product of Delta-sets with both projections.
pub fn delta_product(
    a: &Arc<FiniteDeltaSet>,
    b: &Arc<FiniteDeltaSet>,
) -> (Arc<FiniteDeltaSet>, DeltaMap, DeltaMap) {
    let cap = a.dim_cap().min(b.dim_cap());
    let cards: Vec<usize> = (0..=cap).map(|q| a.card(q) * b.card(q)).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let mut table = Vec::with_capacity(cards[q]);
            for x in 0..a.card(q) {
                let fx = a.face(i, SimplexRef::new(q, x)).index;
                for y in 0..b.card(q) {
                    let fy = b.face(i, SimplexRef::new(q, y)).index;
                    table.push(fx * b.card(q - 1) + fy);
                }
            }
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let prod = Arc::new(FiniteDeltaSet::new(cap, cards, faces).expect("product of lawful sets"));
    let mut to_a = Vec::with_capacity(cap + 1);
    let mut to_b = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut pa = Vec::with_capacity(prod.card(q));
        let mut pb = Vec::with_capacity(prod.card(q));
        for x in 0..a.card(q) {
            for y in 0..b.card(q) {
                pa.push(x);
                pb.push(y);
            }
        }
        to_a.push(pa);
        to_b.push(pb);
    }
    let pr_a = DeltaMap::new(prod.clone(), a.clone(), to_a).expect("projection commutes");
    let pr_b = DeltaMap::new(prod.clone(), b.clone(), to_b).expect("projection commutes");
    (prod, pr_a, pr_b)
}

/// The simplicial set freely generated by a Delta-set: m-simplices are pairs
/// `(sigma, rho)` with `sigma` an l-simplex and `rho: [m] ->> [l]` surjective.
pub struct DeltaToSimplicial {
    pub sset: FiniteSimplicialSet,
    /// Per dimension, the pair underlying each index.
    pub pairs: Vec<Vec<(SimplexRef, MonotoneMap)>>,
    index: HashMap<(usize, usize, Vec<usize>), usize>,
}

impl DeltaToSimplicial {
    pub fn lookup(&self, sigma: SimplexRef, rho: &MonotoneMap) -> usize {
        self.index[&(sigma.dim, sigma.index, rho.values().to_vec())]
    }
}

pub fn delta_to_simplicial(d: &FiniteDeltaSet) -> DeltaToSimplicial {
    let cap = d.dim_cap();
    let mut pairs: Vec<Vec<(SimplexRef, MonotoneMap)>> = Vec::with_capacity(cap + 1);
    let mut index = HashMap::new();
    for m in 0..=cap {
        let mut level = Vec::new();
        for l in 0..=m {
            for idx in 0..d.card(l) {
                for rho in MonotoneMap::enumerate_surjections(m, l) {
                    index.insert((l, idx, rho.values().to_vec()), level.len());
                    level.push((SimplexRef::new(l, idx), rho));
                }
            }
        }
        pairs.push(level);
    }
    let cards: Vec<usize> = pairs.iter().map(|v| v.len()).collect();
    let apply = |m: usize, entry: &(SimplexRef, MonotoneMap), theta: &MonotoneMap,
                 index: &HashMap<(usize, usize, Vec<usize>), usize>| {
        let _ = m;
        let (sigma, rho) = entry;
        let (epi, mono) = rho.compose(theta).unwrap().epi_mono_factor();
        let new_sigma = d.structure_map(&mono, *sigma).unwrap();
        index[&(new_sigma.dim, new_sigma.index, epi.values().to_vec())]
    };
    let mut faces = vec![Vec::new()];
    for m in 1..=cap {
        let mut per_i = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let di = MonotoneMap::coface(i, m);
            per_i.push(pairs[m].iter().map(|e| apply(m, e, &di, &index)).collect());
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for m in 0..cap {
        let mut per_i = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let si = MonotoneMap::codegeneracy(i, m);
            per_i.push(pairs[m].iter().map(|e| apply(m, e, &si, &index)).collect());
        }
        degens.push(per_i);
    }
    let sset = FiniteSimplicialSet::new(cap, cards, faces, degens)
        .expect("freely generated simplicial set is lawful");
    DeltaToSimplicial { sset, pairs, index }
}

/// Core of a simplicial set, the comparison map Theta, and its status.
pub struct CoreTheta {
    pub core: FiniteDeltaSet,
    /// new core index -> original index, per dimension
    pub core_inclusion: Vec<Vec<usize>>,
    pub theta: SimplicialMap,
    pub has_nondegenerate_core: bool,
    pub theta_surjective: bool,
    pub theta_iso: bool,
}

/// The core: all `theta^*(sigma)` with `sigma` nondegenerate and `theta`
/// strictly increasing, i.e. the face-closure of the nondegenerate simplices.
pub fn core_and_theta(k: &Arc<FiniteSimplicialSet>) -> CoreTheta {
    let cap = k.dim_cap();
    let mut member: Vec<Vec<bool>> = (0..=cap).map(|q| vec![false; k.card(q)]).collect();
    for q in 0..=cap {
        for idx in k.nondegenerate(q) {
            member[q][idx] = true;
        }
    }
    for q in (1..=cap).rev() {
        for idx in 0..k.card(q) {
            if member[q][idx] {
                for i in 0..=q {
                    member[q - 1][k.face(i, SimplexRef::new(q, idx)).index] = true;
                }
            }
        }
    }
    let has_ndc = (0..=cap).all(|q| {
        (0..k.card(q)).all(|idx| !member[q][idx] || !k.is_degenerate(SimplexRef::new(q, idx)))
    });
    let (core, core_inclusion) = k.delta_set().subset(&member).expect("core is face-closed");
    let bridge = delta_to_simplicial(&core);
    let levels: Vec<Vec<usize>> = (0..=cap)
        .map(|m| {
            bridge.pairs[m]
                .iter()
                .map(|(sigma, rho)| {
                    let orig = SimplexRef::new(sigma.dim, core_inclusion[sigma.dim][sigma.index]);
                    k.structure_map(rho, orig).unwrap().index
                })
                .collect()
        })
        .collect();
    let theta = SimplicialMap::new(Arc::new(bridge.sset), k.clone(), levels)
        .expect("Theta commutes with structure maps");
    let theta_surjective = (0..=cap).all(|q| {
        let mut hit = vec![false; k.card(q)];
        for &v in &theta.levels()[q] {
            hit[v] = true;
        }
        hit.iter().all(|&b| b)
    });
    let theta_iso = theta.is_bijective();
    CoreTheta { core, core_inclusion, theta, has_nondegenerate_core: has_ndc, theta_surjective, theta_iso }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::binomial;

    #[test]
    fn delta1_cardinalities() {
        let d1 = standard_simplex(1, 3);
        assert_eq!(d1.card(0), 2);
        assert_eq!(d1.card(1), 3); // 00, 01, 11
        assert_eq!(d1.card(2), 4);
    }

    #[test]
    fn boundary_of_triangle() {
        let b = boundary_simplex(2, 2);
        assert_eq!(b.card(0), 3);
        assert_eq!(b.nondegenerate(1).len(), 3);
        assert_eq!(b.nondegenerate(2).len(), 0);
    }

    #[test]
    fn horn_counts() {
        let h = horn(2, 1, 2).unwrap();
        assert_eq!(h.card(0), 3);
        assert_eq!(h.nondegenerate(1).len(), 2); // edges {0,1} and {1,2}
        assert_eq!(h.nondegenerate(2).len(), 0);
        assert!(horn(2, 3, 2).is_err());
    }

    #[test]
    fn product_with_point_is_identity_shape() {
        let k = Arc::new(standard_simplex(2, 3));
        let pt = Arc::new(standard_simplex(0, 3));
        let (p, pr_k, _) = product(&k, &pt);
        for q in 0..=3 {
            assert_eq!(p.card(q), k.card(q));
        }
        assert!(pr_k.is_bijective());
    }

    #[test]
    fn square_has_two_nondegenerate_2_simplices() {
        let d1 = Arc::new(standard_simplex(1, 2));
        let (p, _, _) = product(&d1, &d1);
        assert_eq!(p.card(2), 16);
        assert_eq!(p.nondegenerate(2).len(), 2);
    }

    #[test]
    fn delta_bridge_counts_and_iso() {
        // Delta(Delta[n]) has C(n+1, m+1) m-simplices
        for n in 0..=3 {
            let dn = standard_simplex(n, 3);
            let ds = dn.delta_set();
            let core = core_and_theta(&Arc::new(dn));
            for m in 0..=3usize {
                assert_eq!(core.core.card(m), binomial(n + 1, m + 1));
            }
            assert!(core.has_nondegenerate_core);
            assert!(core.theta_iso);
            let _ = ds;
        }
    }

    #[test]
    fn point_delta_set_generates_point() {
        let pt = FiniteDeltaSet::new(2, vec![1, 0, 0], vec![vec![], vec![vec![], vec![]], vec![vec![]; 3]]).unwrap();
        let bridge = delta_to_simplicial(&pt);
        let d0 = standard_simplex(0, 2);
        assert_eq!(bridge.sset.cards(), d0.cards());
    }

    #[test]
    fn simplicial_from_delta_of_standard_is_standard() {
        // paper: the simplicial set generated by Delta(Delta[n]) is Delta[n]
        for n in 1..=2usize {
            let dn = Arc::new(standard_simplex(n, 3));
            let core = core_and_theta(&dn);
            let bridge = delta_to_simplicial(&core.core);
            for m in 0..=3usize {
                assert_eq!(bridge.sset.card(m), dn.card(m));
            }
        }
    }
}
