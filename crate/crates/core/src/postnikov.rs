//! Postnikov quotients: n-equivalence classes, the quotient simplicial set,
//! the projections, and the identification of the first stage of a minimal
//! one-vertex Kan set with the nerve of its fundamental group.

use std::collections::HashMap;
use std::sync::Arc;

use crate::builders::{nerve, Nerve};
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::kan::FundamentalGroup;
use crate::monotone::MonotoneMap;
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};

pub struct PostnikovQuotient {
    pub level: usize,
    pub source: Arc<FiniteSimplicialSet>,
    pub quotient: Arc<FiniteSimplicialSet>,
    pub projection: SimplicialMap,
    /// class index of every simplex of the source, per dimension
    pub class_of: Vec<Vec<usize>>,
}

/// Two q-simplices are n-equivalent when all their pullbacks along maps
/// `[n] -> [q]` agree; for q <= n this is equality.
fn equivalence_key(k: &FiniteSimplicialSet, n: usize, s: SimplexRef) -> Result<Vec<usize>> {
    if s.dim <= n {
        return Ok(vec![s.index]);
    }
    MonotoneMap::enumerate(n, s.dim)
        .iter()
        .map(|t| k.structure_map(t, s).map(|r| r.index))
        .collect()
}

pub fn postnikov_quotient(k: &Arc<FiniteSimplicialSet>, n: usize) -> Result<PostnikovQuotient> {
    let cap = k.dim_cap();
    if n > cap {
        return Err(Error::CapExceeded { needed: n, cap });
    }
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut classes = Vec::with_capacity(k.card(q));
        let mut rep = Vec::new();
        for idx in 0..k.card(q) {
            let key = equivalence_key(k, n, SimplexRef::new(q, idx))?;
            let next = lookup.len();
            let c = *lookup.entry(key).or_insert(next);
            if c == rep.len() {
                rep.push(idx);
            }
            classes.push(c);
        }
        class_of.push(classes);
        reps.push(rep);
    }
    let cards: Vec<usize> = reps.iter().map(|v| v.len()).collect();
    // induced structure maps, with well-definedness over every member
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let table: Vec<usize> = reps[q]
                .iter()
                .map(|&r| class_of[q - 1][k.face(i, SimplexRef::new(q, r)).index])
                .collect();
            for idx in 0..k.card(q) {
                let via_member = class_of[q - 1][k.face(i, SimplexRef::new(q, idx)).index];
                if via_member != table[class_of[q][idx]] {
                    return Err(Error::IdentityViolated {
                        relation: format!("induced d_{i} not well defined"),
                        dim: q,
                        index: idx,
                    });
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
            let table: Vec<usize> = reps[q]
                .iter()
                .map(|&r| class_of[q + 1][k.degeneracy(i, SimplexRef::new(q, r)).index])
                .collect();
            for idx in 0..k.card(q) {
                let via_member = class_of[q + 1][k.degeneracy(i, SimplexRef::new(q, idx)).index];
                if via_member != table[class_of[q][idx]] {
                    return Err(Error::IdentityViolated {
                        relation: format!("induced s_{i} not well defined"),
                        dim: q,
                        index: idx,
                    });
                }
            }
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let quotient = Arc::new(FiniteSimplicialSet::new(cap, cards, faces, degens)?);
    let projection = SimplicialMap::new(k.clone(), quotient.clone(), class_of.clone())?;
    Ok(PostnikovQuotient { level: n, source: k.clone(), quotient, projection, class_of })
}

/// The connecting map `K(m) -> K(n)` for `n <= m`.
pub fn connecting_map(pm: &PostnikovQuotient, pn: &PostnikovQuotient) -> Result<SimplicialMap> {
    assert!(pn.level <= pm.level);
    assert!(Arc::ptr_eq(&pm.source, &pn.source));
    let cap = pm.quotient.dim_cap();
    let mut levels: Vec<Vec<usize>> = (0..=cap).map(|q| vec![usize::MAX; pm.quotient.card(q)]).collect();
    for q in 0..=cap {
        for idx in 0..pm.source.card(q) {
            let from = pm.class_of[q][idx];
            let to = pn.class_of[q][idx];
            if levels[q][from] == usize::MAX {
                levels[q][from] = to;
            } else if levels[q][from] != to {
                return Err(Error::IdentityViolated {
                    relation: "p_{m,n} not well defined".into(),
                    dim: q,
                    index: idx,
                });
            }
        }
    }
    SimplicialMap::new(pm.quotient.clone(), pn.quotient.clone(), levels)
}

/// The n-equivalence relation is preserved by every structure map with
/// arities within the cap.
pub fn check_equivalence_preserved(k: &Arc<FiniteSimplicialSet>, n: usize) -> Result<bool> {
    let p = postnikov_quotient(k, n)?;
    let cap = k.dim_cap();
    for q in 0..=cap {
        for m in 0..=cap {
            for theta in MonotoneMap::enumerate(m, q) {
                for a in 0..k.card(q) {
                    for b in 0..k.card(q) {
                        if p.class_of[q][a] == p.class_of[q][b] {
                            let ta = k.structure_map(&theta, SimplexRef::new(q, a))?;
                            let tb = k.structure_map(&theta, SimplexRef::new(q, b))?;
                            if p.class_of[m][ta.index] != p.class_of[m][tb.index] {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `p_n` restricted to the n-skeleton is a levelwise bijection onto the
/// n-skeleton of the quotient.
pub fn check_skeleton_bijective(p: &PostnikovQuotient) -> bool {
    let k = &p.source;
    let n = p.level;
    let members_src = k.skeleton_members(n);
    let members_q = p.quotient.skeleton_members(n);
    for q in 0..=k.dim_cap() {
        let src: Vec<usize> =
            (0..k.card(q)).filter(|&i| members_src[q][i]).collect();
        let mut images: Vec<usize> = src.iter().map(|&i| p.class_of[q][i]).collect();
        images.sort_unstable();
        images.dedup();
        let tgt: Vec<usize> =
            (0..p.quotient.card(q)).filter(|&i| members_q[q][i]).collect();
        if images != tgt || images.len() != src.len() {
            return false;
        }
    }
    true
}

pub struct FGroupReport {
    pub pi1_order: usize,
    pub levelwise_bijective: bool,
    pub commutes_with_structure: bool,
}

/// Lemma-level identification: for a minimal one-vertex Kan set, the first
/// Postnikov stage is the nerve of the fundamental group, via spine tuples.
pub fn f_group_check(
    k: &Arc<FiniteSimplicialSet>,
    pi1: &FundamentalGroup,
) -> Result<FGroupReport> {
    let p1 = postnikov_quotient(k, 1)?;
    let cap = k.dim_cap();
    let bpi = nerve(&FiniteCategory::from_group(&pi1.group), cap);
    // spine of a q-simplex: classes of the consecutive edges
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut level = vec![usize::MAX; p1.quotient.card(q)];
        for idx in 0..k.card(q) {
            let s = SimplexRef::new(q, idx);
            let spine: Vec<usize> = if q == 0 {
                vec![0]
            } else {
                (0..q)
                    .map(|i| {
                        let theta = MonotoneMap::new(vec![i, i + 1], q).unwrap();
                        pi1.class_of[k.structure_map(&theta, s).unwrap().index]
                    })
                    .collect()
            };
            let target = bpi.index_of(q, &spine);
            let c = p1.class_of[q][idx];
            if level[c] == usize::MAX {
                level[c] = target;
            } else if level[c] != target {
                return Err(Error::IdentityViolated {
                    relation: "spine map not constant on 1-equivalence classes".into(),
                    dim: q,
                    index: idx,
                });
            }
        }
        levels.push(level);
    }
    let iso = SimplicialMap::new(p1.quotient.clone(), bpi.sset.clone(), levels)?;
    Ok(FGroupReport {
        pi1_order: pi1.group.order(),
        levelwise_bijective: iso.is_bijective(),
        commutes_with_structure: true,
    })
}

/// Convenience: the nerve of a finite group, capped.
pub fn classifying_space(g: &crate::groups::FiniteGroup, cap: usize) -> Nerve {
    nerve(&FiniteCategory::from_group(g), cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::standard_simplex;
    use crate::groups::FiniteGroup;

    #[test]
    fn classes_are_singletons_in_low_dims() {
        let g = FiniteGroup::cyclic(3);
        let n = classifying_space(&g, 3);
        let p = postnikov_quotient(&n.sset, 2).unwrap();
        for q in 0..=2usize {
            assert_eq!(p.quotient.card(q), n.sset.card(q));
        }
    }

    #[test]
    fn nerve_is_its_own_first_stage() {
        let g = FiniteGroup::cyclic(2);
        let n = classifying_space(&g, 3);
        let p = postnikov_quotient(&n.sset, 1).unwrap();
        for q in 0..=3usize {
            assert_eq!(p.quotient.card(q), n.sset.card(q), "dim {q}");
        }
        assert!(check_skeleton_bijective(&p));
    }

    #[test]
    fn zeroth_stage_of_one_vertex_set_is_a_point_tower() {
        let g = FiniteGroup::cyclic(4);
        let n = classifying_space(&g, 3);
        let p = postnikov_quotient(&n.sset, 0).unwrap();
        for q in 0..=3usize {
            assert_eq!(p.quotient.card(q), 1);
        }
    }

    #[test]
    fn tower_composition_laws() {
        let g = FiniteGroup::cyclic(2);
        let k = classifying_space(&g, 3).sset;
        let p2 = postnikov_quotient(&k, 2).unwrap();
        let p1 = postnikov_quotient(&k, 1).unwrap();
        let p0 = postnikov_quotient(&k, 0).unwrap();
        let p21 = connecting_map(&p2, &p1).unwrap();
        let p10 = connecting_map(&p1, &p0).unwrap();
        let p20 = connecting_map(&p2, &p0).unwrap();
        assert_eq!(p21.compose(&p2.projection).unwrap(), p1.projection);
        assert_eq!(p10.compose(&p21).unwrap(), p20);
    }

    #[test]
    fn equivalence_preserved_by_structure_maps() {
        let em = crate::em::build_em(
            crate::em::EmCoefficients::Abelian(crate::groups::FinAb::cyclic(2)),
            2,
            3,
        )
        .unwrap();
        assert!(check_equivalence_preserved(&em.sset, 1).unwrap());
        assert!(check_equivalence_preserved(&em.sset, 2).unwrap());
    }

    #[test]
    fn f_group_on_nerves() {
        for g in [FiniteGroup::cyclic(3), FiniteGroup::symmetric3()] {
            let k = classifying_space(&g, 3).sset;
            let pi1 = crate::kan::fundamental_group(&k, 1_000_000).unwrap();
            let report = f_group_check(&k, &pi1).unwrap();
            assert_eq!(report.pi1_order, g.order());
            assert!(report.levelwise_bijective);
        }
    }

    #[test]
    fn point_quotient() {
        let pt = Arc::new(standard_simplex(0, 2));
        let p = postnikov_quotient(&pt, 1).unwrap();
        assert_eq!(p.quotient.card(2), 1);
    }
}
