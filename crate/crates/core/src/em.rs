//! Truncated Eilenberg-MacLane models: q-simplices are enumerated
//! normalized n-cocycles of the standard q-simplex, with structure maps by
//! pullback and the simplicial-group structure by cocycle addition.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::groups::{FinAb, FiniteGroup, GroupHom};
use crate::monotone::MonotoneMap;
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};
use crate::zlin::kernel_mod;

#[derive(Clone, Debug)]
pub enum EmCoefficients {
    Abelian(FinAb),
    /// degree must be 1
    NonAbelian(FiniteGroup),
}

impl EmCoefficients {
    pub fn order(&self) -> u64 {
        match self {
            EmCoefficients::Abelian(g) => g.order(),
            EmCoefficients::NonAbelian(g) => g.order() as u64,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            EmCoefficients::Abelian(g) => g.describe(),
            EmCoefficients::NonAbelian(g) => g.name().to_string(),
        }
    }
}

/// A truncated Eilenberg-MacLane simplicial set. Simplices in dimension q
/// are the normalized n-cocycles of the standard q-simplex, stored as value
/// vectors over the strictly increasing (n+1)-tuples and sorted
/// lexicographically, so the zero cocycle is always index 0.
pub struct EmModel {
    pub coeff: EmCoefficients,
    pub degree: usize,
    pub sset: Arc<FiniteSimplicialSet>,
    cocycles: Vec<Vec<Vec<u64>>>,
    lookup: Vec<HashMap<Vec<u64>, usize>>,
    etuples: Vec<Vec<MonotoneMap>>,
}

impl EmModel {
    pub fn cocycle(&self, s: SimplexRef) -> &[u64] {
        &self.cocycles[s.dim][s.index]
    }

    pub fn index_of(&self, dim: usize, values: &[u64]) -> Option<usize> {
        self.lookup[dim].get(values).copied()
    }

    pub fn card(&self, q: usize) -> usize {
        self.cocycles[q].len()
    }

    /// The basis tuples (strictly increasing (n+1)-tuples of `[q]`)
    /// indexing the stored value vectors.
    pub fn basis(&self, q: usize) -> &[MonotoneMap] {
        &self.etuples[q]
    }

    pub fn zero_simplex(&self, q: usize) -> SimplexRef {
        SimplexRef::new(q, 0)
    }

    /// Addition of cocycles; abelian coefficients only.
    pub fn add(&self, a: SimplexRef, b: SimplexRef) -> SimplexRef {
        let EmCoefficients::Abelian(g) = &self.coeff else {
            panic!("addition needs abelian coefficients")
        };
        assert_eq!(a.dim, b.dim);
        let sum: Vec<u64> = self.cocycles[a.dim][a.index]
            .iter()
            .zip(&self.cocycles[b.dim][b.index])
            .map(|(&x, &y)| g.add(x, y))
            .collect();
        SimplexRef::new(a.dim, self.lookup[a.dim][&sum])
    }

    pub fn neg(&self, a: SimplexRef) -> SimplexRef {
        let EmCoefficients::Abelian(g) = &self.coeff else {
            panic!("negation needs abelian coefficients")
        };
        let v: Vec<u64> = self.cocycles[a.dim][a.index].iter().map(|&x| g.neg(x)).collect();
        SimplexRef::new(a.dim, self.lookup[a.dim][&v])
    }

    /// The group element identified with an n-simplex through
    /// `K(pi,n)_n = pi`.
    pub fn as_group_element(&self, s: SimplexRef) -> u64 {
        assert_eq!(s.dim, self.degree);
        self.cocycles[s.dim][s.index][0]
    }

    pub fn from_group_element(&self, a: u64) -> SimplexRef {
        SimplexRef::new(self.degree, self.lookup[self.degree][&vec![a]])
    }
}

/// Enumerate the normalized n-cocycles of the standard q-simplex.
fn cocycles_of_simplex(coeff: &EmCoefficients, n: usize, q: usize) -> Vec<Vec<u64>> {
    let tuples_n = MonotoneMap::enumerate_injections(n, q);
    if tuples_n.is_empty() {
        // below degree n only the zero cochain exists
        return vec![vec![]];
    }
    match coeff {
        EmCoefficients::Abelian(g) => {
            let tuples_n1 = MonotoneMap::enumerate_injections(n + 1, q);
            let rank: HashMap<&MonotoneMap, usize> =
                tuples_n.iter().enumerate().map(|(i, t)| (t, i)).collect();
            let rows: Vec<Vec<BigInt>> = tuples_n1
                .iter()
                .map(|s| {
                    let mut row = vec![BigInt::zero(); tuples_n.len()];
                    for i in 0..=n + 1 {
                        let f = s.compose(&MonotoneMap::coface(i, n + 1)).unwrap();
                        let col = rank[&f];
                        if i % 2 == 0 {
                            row[col] += 1;
                        } else {
                            row[col] -= 1;
                        }
                    }
                    row
                })
                .collect();
            // componentwise kernels over each cyclic factor, then recombine
            let per_component: Vec<Vec<Vec<u64>>> = g
                .moduli()
                .iter()
                .map(|&m| kernel_mod(&rows, tuples_n.len(), m))
                .collect();
            let mut out = Vec::new();
            let counts: Vec<usize> = per_component.iter().map(|v| v.len()).collect();
            let mut choice = vec![0usize; counts.len()];
            loop {
                let vec: Vec<u64> = (0..tuples_n.len())
                    .map(|p| {
                        let comps: Vec<u64> =
                            (0..counts.len()).map(|j| per_component[j][choice[j]][p]).collect();
                        g.encode(&comps)
                    })
                    .collect();
                out.push(vec);
                let mut j = 0;
                loop {
                    if j == counts.len() {
                        out.sort();
                        return out;
                    }
                    choice[j] += 1;
                    if choice[j] < counts[j] {
                        break;
                    }
                    choice[j] = 0;
                    j += 1;
                }
            }
        }
        EmCoefficients::NonAbelian(g) => {
            assert_eq!(n, 1, "nonabelian coefficients need degree 1");
            assert_eq!(g.unit(), 0, "unit must be element 0");
            // a 1-cocycle is determined by its spine values, and every
            // assignment of spine values extends: z(i,j) = z_i ... z_{j-1}
            let mut out = Vec::new();
            let mut spine = vec![0usize; q];
            loop {
                let vec: Vec<u64> = tuples_n
                    .iter()
                    .map(|t| {
                        let (a, b) = (t.apply(0), t.apply(1));
                        let mut acc = g.unit();
                        for i in a..b {
                            acc = g.mul(acc, spine[i]);
                        }
                        acc as u64
                    })
                    .collect();
                out.push(vec);
                let mut j = 0;
                loop {
                    if j == q {
                        out.sort();
                        return out;
                    }
                    spine[j] += 1;
                    if spine[j] < g.order() {
                        break;
                    }
                    spine[j] = 0;
                    j += 1;
                }
            }
        }
    }
}

/// Build the truncated model.
pub fn build_em(coeff: EmCoefficients, n: usize, dim_cap: usize) -> Result<EmModel> {
    assert!(n >= 1);
    if matches!(coeff, EmCoefficients::NonAbelian(_)) && n > 1 {
        return Err(Error::LawViolated {
            law: "abelian coefficients".into(),
            detail: format!("nonabelian group with n = {n}"),
        });
    }
    let etuples: Vec<Vec<MonotoneMap>> =
        (0..=dim_cap).map(|q| MonotoneMap::enumerate_injections(n, q)).collect();
    let cocycles: Vec<Vec<Vec<u64>>> =
        (0..=dim_cap).map(|q| cocycles_of_simplex(&coeff, n, q)).collect();
    let lookup: Vec<HashMap<Vec<u64>, usize>> = cocycles
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect())
        .collect();
    let unit_value: u64 = 0;
    // pullback of a stored cocycle along theta: [r] -> [q]
    let pull = |z: &[u64], theta: &MonotoneMap, q: usize, r: usize| -> Vec<u64> {
        etuples[r]
            .iter()
            .map(|t| {
                let composed = theta.compose(t).unwrap();
                if composed.is_strictly_increasing() {
                    let pos = etuples[q].iter().position(|u| *u == composed).unwrap();
                    z[pos]
                } else {
                    unit_value
                }
            })
            .collect()
    };
    let cards: Vec<usize> = cocycles.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=dim_cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let d = MonotoneMap::coface(i, q);
            let table = cocycles[q]
                .iter()
                .map(|z| lookup[q - 1][&pull(z, &d, q, q - 1)])
                .collect();
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..dim_cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let s = MonotoneMap::codegeneracy(i, q);
            let table = cocycles[q]
                .iter()
                .map(|z| lookup[q + 1][&pull(z, &s, q, q + 1)])
                .collect();
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let sset = Arc::new(FiniteSimplicialSet::new(dim_cap, cards, faces, degens)?);
    Ok(EmModel { coeff, degree: n, sset, cocycles, lookup, etuples })
}

/// Decide whether a normalized cochain `c: pi -> pi` with `c(0) = 0` is a
/// cocycle of the model, by evaluating the cocycle condition on every
/// (n+1)-simplex.
pub fn cochain_is_cocycle(em: &EmModel, c: &[u64]) -> Result<bool> {
    if c[0] != 0 {
        return Err(Error::NotNormalized { dim: em.degree, index: 0 });
    }
    let n = em.degree;
    if n + 1 > em.sset.dim_cap() {
        return Err(Error::CapExceeded { needed: n + 1, cap: em.sset.dim_cap() });
    }
    match &em.coeff {
        EmCoefficients::Abelian(g) => {
            for u in 0..em.sset.card(n + 1) {
                let s = SimplexRef::new(n + 1, u);
                let mut acc = 0u64;
                for i in 0..=n + 1 {
                    let face = em.sset.face(i, s);
                    let term = c[em.as_group_element(face) as usize];
                    acc = g.add(acc, if i % 2 == 1 { g.neg(term) } else { term });
                }
                if acc != 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        EmCoefficients::NonAbelian(g) => {
            // triple condition: value on d_1 equals value on d_2 times value on d_0
            for u in 0..em.sset.card(2) {
                let s = SimplexRef::new(2, u);
                let u0 = em.as_group_element(em.sset.face(0, s)) as usize;
                let u1 = em.as_group_element(em.sset.face(1, s)) as usize;
                let u2 = em.as_group_element(em.sset.face(2, s)) as usize;
                if c[u1] as usize != g.mul(c[u2] as usize, c[u0] as usize) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Independent side of the lemma: is `c` a homomorphism?
pub fn cochain_is_homomorphism(em: &EmModel, c: &[u64]) -> bool {
    match &em.coeff {
        EmCoefficients::Abelian(g) => {
            let n = g.order();
            (0..n).all(|a| (0..n).all(|b| c[g.add(a, b) as usize] == g.add(c[a as usize], c[b as usize])))
        }
        EmCoefficients::NonAbelian(g) => {
            let n = g.order();
            (0..n).all(|a| {
                (0..n).all(|b| c[g.mul(a, b)] as usize == g.mul(c[a] as usize, c[b] as usize))
            })
        }
    }
}

/// The simplicial map `K -> K(pi, n)` classified by a normalized cocycle,
/// with the round trip `z(f) = z` checked.
pub fn map_from_cocycle(
    k: &Arc<FiniteSimplicialSet>,
    z: &Cochain,
    em: &EmModel,
) -> Result<SimplicialMap> {
    let n = em.degree;
    assert_eq!(z.degree, n);
    z.require_normalized(k)?;
    let cap = k.dim_cap().min(em.sset.dim_cap());
    let mut levels = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut level = Vec::with_capacity(k.card(q));
        for idx in 0..k.card(q) {
            let s = SimplexRef::new(q, idx);
            let vec: Vec<u64> = em
                .basis(q)
                .iter()
                .map(|t| z.value(k.structure_map(t, s).unwrap().index))
                .collect();
            let img = em
                .index_of(q, &vec)
                .ok_or(Error::NotACocycle { dim: q, index: idx })?;
            level.push(img);
        }
        levels.push(level);
    }
    let f = SimplicialMap::new(k.clone(), em.sset.clone(), levels)?;
    // round trip: pulling back the fundamental cocycle recovers z
    for idx in 0..k.card(n) {
        if em.as_group_element(f.apply(SimplexRef::new(n, idx))) != z.value(idx) {
            return Err(Error::NotACocycle { dim: n, index: idx });
        }
    }
    Ok(f)
}

/// The cocycle classified by a map: pullback of the fundamental cocycle.
pub fn cocycle_of_map(f: &SimplicialMap, em: &EmModel) -> Cochain {
    let n = em.degree;
    Cochain {
        degree: n,
        values: (0..f.source.card(n))
            .map(|i| em.as_group_element(f.apply(SimplexRef::new(n, i))))
            .collect(),
    }
}

/// The map `K(pi', n) -> K(pi, n)` induced by a homomorphism, acting by
/// post-composition on cocycle values.
pub fn induced_map(h: &GroupHom, source: &EmModel, target: &EmModel) -> Result<SimplicialMap> {
    assert_eq!(source.degree, target.degree);
    let cap = source.sset.dim_cap().min(target.sset.dim_cap());
    let levels = (0..=cap)
        .map(|q| {
            (0..source.card(q))
                .map(|idx| {
                    let vec: Vec<u64> = source.cocycles[q][idx].iter().map(|&v| h.apply(v)).collect();
                    target
                        .index_of(q, &vec)
                        .ok_or(Error::NotAHomomorphism { detail: "image not a cocycle".into() })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(source.sset.clone(), target.sset.clone(), levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn em_z2_2_cardinalities() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(2)), 2, 3).unwrap();
        assert_eq!(em.card(0), 1);
        assert_eq!(em.card(1), 1);
        assert_eq!(em.card(2), 2);
        assert_eq!(em.card(3), 8);
    }

    #[test]
    fn below_degree_only_zero() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(5)), 3, 3).unwrap();
        for q in 0..3 {
            assert_eq!(em.card(q), 1);
        }
        assert_eq!(em.card(3), 5);
    }

    #[test]
    fn zero_is_index_zero_and_only_degenerate_n_simplex() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(3)), 2, 4).unwrap();
        assert_eq!(em.as_group_element(em.zero_simplex(2)), 0);
        let degenerate: Vec<usize> = (0..em.card(2))
            .filter(|&i| em.sset.is_degenerate(SimplexRef::new(2, i)))
            .collect();
        assert_eq!(degenerate, vec![0]);
    }

    #[test]
    fn identity_cochain_is_cocycle_and_swap_example() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(4)), 2, 3).unwrap();
        let id: Vec<u64> = (0..4).collect();
        assert!(cochain_is_cocycle(&em, &id).unwrap());
        assert!(cochain_is_homomorphism(&em, &id));
        // swap 1 <-> 3 fixing 0, 2: multiplication by 3, a homomorphism
        let swap = vec![0, 3, 2, 1];
        assert!(cochain_is_homomorphism(&em, &swap));
        assert!(cochain_is_cocycle(&em, &swap).unwrap());
        // zero map
        assert!(cochain_is_cocycle(&em, &[0, 0, 0, 0]).unwrap());
        // a non-homomorphism must fail
        let bad = vec![0, 1, 0, 0];
        assert!(!cochain_is_homomorphism(&em, &bad));
        assert!(!cochain_is_cocycle(&em, &bad).unwrap());
    }

    #[test]
    fn cocycle_iff_homomorphism_exhaustive_z3() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(3)), 2, 3).unwrap();
        let mut c = vec![0u64; 3];
        for a in 0..3u64 {
            for b in 0..3u64 {
                c[1] = a;
                c[2] = b;
                assert_eq!(
                    cochain_is_cocycle(&em, &c).unwrap(),
                    cochain_is_homomorphism(&em, &c)
                );
            }
        }
    }

    #[test]
    fn nonabelian_s3_degree_one() {
        let s3 = FiniteGroup::symmetric3();
        let em = build_em(EmCoefficients::NonAbelian(s3.clone()), 1, 2).unwrap();
        // K(pi,1) has |pi|^q simplices in dimension q
        assert_eq!(em.card(1), 6);
        assert_eq!(em.card(2), 36);
        assert!(build_em(EmCoefficients::NonAbelian(s3), 2, 2).is_err());
    }

    #[test]
    fn simplicial_group_law_on_structure_maps() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(2)), 2, 3).unwrap();
        for q in 1..=3usize {
            for i in 0..=q {
                for a in 0..em.card(q) {
                    for b in 0..em.card(q) {
                        let sa = SimplexRef::new(q, a);
                        let sb = SimplexRef::new(q, b);
                        let lhs = em.sset.face(i, em.add(sa, sb));
                        let rhs = em.add(em.sset.face(i, sa), em.sset.face(i, sb));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn induced_map_functorial() {
        let z4 = FinAb::cyclic(4);
        let z2 = FinAb::cyclic(2);
        let em4 = build_em(EmCoefficients::Abelian(z4.clone()), 2, 3).unwrap();
        let em2 = build_em(EmCoefficients::Abelian(z2.clone()), 2, 3).unwrap();
        let red = GroupHom::new(&z4, &z2, vec![0, 1, 0, 1]).unwrap();
        let s = induced_map(&red, &em4, &em2).unwrap();
        // surjective levelwise at this cap
        for q in 0..=3usize {
            let mut hit = vec![false; em2.card(q)];
            for idx in 0..em4.card(q) {
                hit[s.apply(SimplexRef::new(q, idx)).index] = true;
            }
            assert!(hit.iter().all(|&b| b));
        }
        // identity homomorphism gives the identity map
        let idh = GroupHom::new(&z4, &z4, (0..4).collect()).unwrap();
        let sid = induced_map(&idh, &em4, &em4).unwrap();
        assert_eq!(sid, SimplicialMap::identity(em4.sset.clone()));
        // functoriality: s(h . h') = s(h) . s(h')
        let incl = GroupHom::new(&z2, &z4, vec![0, 2]).unwrap();
        let em2b = build_em(EmCoefficients::Abelian(z2.clone()), 2, 3).unwrap();
        let comp = red.compose(&incl);
        let lhs = induced_map(&comp, &em2b, &em2).unwrap();
        let rhs = induced_map(&red, &em4, &em2)
            .unwrap()
            .compose(&induced_map(&incl, &em2b, &em4).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn map_from_cocycle_roundtrip_on_boundary() {
        use crate::generate::boundary_simplex;
        let k = Arc::new(boundary_simplex(3, 3));
        let z2 = FinAb::cyclic(2);
        let em = build_em(EmCoefficients::Abelian(z2.clone()), 2, 3).unwrap();
        let sys = crate::cochain::LocalSystem::trivial(z2.clone(), &k);
        // enumerate all normalized 2-cochains; on the boundary of the
        // 3-simplex every normalized 2-cochain is a cocycle
        let nondeg = k.nondegenerate(2);
        assert_eq!(nondeg.len(), 4);
        let mut count = 0;
        for mask in 0..16u32 {
            let mut z = Cochain::zero(2, &k);
            for (bit, &idx) in nondeg.iter().enumerate() {
                z.values[idx] = u64::from(mask >> bit & 1);
            }
            assert!(crate::cochain::is_cocycle(&z, &sys, &k).unwrap());
            let f = map_from_cocycle(&k, &z, &em).unwrap();
            assert_eq!(cocycle_of_map(&f, &em), z);
            count += 1;
        }
        assert_eq!(count, 16);
    }
}
