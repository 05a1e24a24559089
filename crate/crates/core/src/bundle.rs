//! Bundles with Eilenberg-MacLane fibers: pullbacks, trivializations, the
//! simplicial-group action on trivial bundles, canonical local systems,
//! translations and their classifying cocycles, transitivity witnesses,
//! and translation homotopies.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cochain::{coboundary, Cochain, LocalSystem};
use crate::em::{induced_map, EmCoefficients, EmModel};
use crate::error::{Error, Result};
use crate::generate::{product, standard_simplex};
use crate::groups::{FinAb, GroupHom};
use crate::kan::MapSearch;
use crate::monotone::MonotoneMap;
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};

pub struct Bundle {
    pub total: Arc<FiniteSimplicialSet>,
    pub base: Arc<FiniteSimplicialSet>,
    pub proj: SimplicialMap,
    pub fiber: Arc<EmModel>,
}

impl Bundle {
    pub fn new(proj: SimplicialMap, fiber: Arc<EmModel>) -> Self {
        Bundle { total: proj.source.clone(), base: proj.target.clone(), proj, fiber }
    }

    pub fn fiber_group(&self) -> &FinAb {
        match &self.fiber.coeff {
            EmCoefficients::Abelian(g) => g,
            EmCoefficients::NonAbelian(_) => panic!("bundle fibers are abelian models"),
        }
    }
}

/// The product bundle `B x K(pi,n) -> B`.
pub fn product_bundle(base: &Arc<FiniteSimplicialSet>, fiber: &Arc<EmModel>) -> Bundle {
    let (_, pr_b, _) = product(base, &fiber.sset);
    Bundle::new(pr_b, fiber.clone())
}

/// A materialized pullback: simplices are pairs `(e, a)` with matching
/// projections.
pub struct Pullback {
    pub total: Arc<FiniteSimplicialSet>,
    pub to_base: SimplicialMap,
    pub to_total: SimplicialMap,
    pairs: Vec<Vec<(usize, usize)>>,
    lookup: Vec<HashMap<(usize, usize), usize>>,
}

impl Pullback {
    pub fn pair(&self, s: SimplexRef) -> (usize, usize) {
        self.pairs[s.dim][s.index]
    }

    pub fn index_of(&self, dim: usize, e: usize, a: usize) -> Option<usize> {
        self.lookup[dim].get(&(e, a)).copied()
    }
}

pub fn pullback(p: &Bundle, i: &SimplicialMap) -> Result<Pullback> {
    let a_set = i.source.clone();
    let cap = p.total.dim_cap().min(a_set.dim_cap());
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(cap + 1);
    let mut lookup: Vec<HashMap<(usize, usize), usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut level = Vec::new();
        let mut map = HashMap::new();
        for e in 0..p.total.card(q) {
            let pe = p.proj.apply(SimplexRef::new(q, e)).index;
            for a in 0..a_set.card(q) {
                if i.apply(SimplexRef::new(q, a)).index == pe {
                    map.insert((e, a), level.len());
                    level.push((e, a));
                }
            }
        }
        pairs.push(level);
        lookup.push(map);
    }
    let cards: Vec<usize> = pairs.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for fi in 0..=q {
            let table = pairs[q]
                .iter()
                .map(|&(e, a)| {
                    let fe = p.total.face(fi, SimplexRef::new(q, e)).index;
                    let fa = a_set.face(fi, SimplexRef::new(q, a)).index;
                    lookup[q - 1][&(fe, fa)]
                })
                .collect();
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for si in 0..=q {
            let table = pairs[q]
                .iter()
                .map(|&(e, a)| {
                    let se = p.total.degeneracy(si, SimplexRef::new(q, e)).index;
                    let sa = a_set.degeneracy(si, SimplexRef::new(q, a)).index;
                    lookup[q + 1][&(se, sa)]
                })
                .collect();
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let total = Arc::new(FiniteSimplicialSet::new(cap, cards, faces, degens)?);
    let to_base = SimplicialMap::new(
        total.clone(),
        a_set,
        (0..=cap).map(|q| pairs[q].iter().map(|&(_, a)| a).collect()).collect(),
    )?;
    let to_total = SimplicialMap::new(
        total.clone(),
        p.total.clone(),
        (0..=cap).map(|q| pairs[q].iter().map(|&(e, _)| e).collect()).collect(),
    )?;
    Ok(Pullback { total, to_base, to_total, pairs, lookup })
}

/// A trivialization of a pullback over a standard simplex: a levelwise
/// bijection from `Delta[q] x K(pi,n)` commuting with the projections.
#[derive(Clone)]
pub struct Trivialization {
    pub q: usize,
    /// product index -> pullback-total index
    pub levels: Vec<Vec<usize>>,
    pub inverse: Vec<Vec<usize>>,
}

impl Trivialization {
    fn from_map(q: usize, m: &SimplicialMap) -> Result<Self> {
        m.require_bijective()?;
        let levels = m.levels().clone();
        let inverse = levels
            .iter()
            .map(|l| {
                let mut inv = vec![0usize; l.len()];
                for (i, &v) in l.iter().enumerate() {
                    inv[v] = i;
                }
                inv
            })
            .collect();
        Ok(Trivialization { q, levels, inverse })
    }
}

/// The action of a q-simplex of the fiber group on the trivial bundle over
/// the standard q-simplex: `(theta, z) -> (theta, theta^*(g) + z)`.
pub fn group_action_t(em: &EmModel, q: usize, g: SimplexRef) -> Result<SimplicialMap> {
    assert_eq!(g.dim, q);
    let cap = em.sset.dim_cap();
    let dq = Arc::new(standard_simplex(q, cap));
    let (prod, _, _) = product(&dq, &em.sset);
    let levels = (0..=cap)
        .map(|m| {
            let thetas = MonotoneMap::enumerate(m, q);
            let fcard = em.card(m);
            let mut level = Vec::with_capacity(prod.card(m));
            for theta in &thetas {
                let tg = em.sset.structure_map(theta, g)?;
                for z in 0..fcard {
                    level.push(
                        thetas.iter().position(|t| t == theta).unwrap() * fcard
                            + em.add(tg, SimplexRef::new(m, z)).index,
                    );
                }
            }
            Ok(level)
        })
        .collect::<Result<Vec<_>>>()?;
    SimplicialMap::new(prod.clone(), prod, levels)
}

/// Search state shared by every bundle operation: the per-vertex fiber
/// gauges, the special trivialization cache, and the canonical local system.
pub struct BundleCtx {
    pub bundle: Bundle,
    pub system: LocalSystem,
    /// per base vertex: an isomorphism from the model onto the vertex
    /// fiber, as levelwise tables into total-space indices
    vertex_gauge: Vec<Vec<Vec<usize>>>,
    special: std::cell::RefCell<HashMap<SimplexRef, Arc<SpecialTriv>>>,
    budget: u64,
}

pub struct SpecialTriv {
    pub pullback: Pullback,
    pub triv: Trivialization,
}

fn find_trivialization(
    pb: &Pullback,
    em: &EmModel,
    q: usize,
    budget: u64,
) -> Result<Option<SimplicialMap>> {
    let cap = pb.total.dim_cap();
    let dq = Arc::new(standard_simplex(q, cap));
    let (prod, _, _) = product(&dq, &em.sset);
    // fiber blocks: pullback simplices over each base simplex
    let mut blocks: Vec<HashMap<usize, Vec<usize>>> = Vec::with_capacity(cap + 1);
    for m in 0..=cap {
        let mut by_base: HashMap<usize, Vec<usize>> = HashMap::new();
        for idx in 0..pb.total.card(m) {
            by_base.entry(pb.pair(SimplexRef::new(m, idx)).1).or_default().push(idx);
        }
        for a in 0..dq.card(m) {
            if by_base.get(&a).map_or(0, |v| v.len()) != em.card(m) {
                return Ok(None);
            }
        }
        blocks.push(by_base);
    }
    let allowed: Vec<Vec<Vec<usize>>> = (0..=cap)
        .map(|m| {
            let fcard = em.card(m);
            (0..prod.card(m)).map(|idx| blocks[m][&(idx / fcard)].clone()).collect()
        })
        .collect();
    let forced = (0..=cap).map(|m| vec![None; prod.card(m)]).collect();
    let search = MapSearch {
        source: prod,
        target: pb.total.clone(),
        forced,
        allowed: Some(allowed),
        injective: true,
        budget,
    };
    search.run()
}

/// The block of a trivialization over one vertex of the base simplex, as
/// levelwise tables model -> total space.
fn vertex_block(
    triv_levels: &[Vec<usize>],
    pb: &Pullback,
    em: &EmModel,
    q: usize,
    vertex: usize,
) -> Vec<Vec<usize>> {
    let cap = pb.total.dim_cap();
    (0..=cap)
        .map(|m| {
            let fcard = em.card(m);
            let const_v = MonotoneMap::new(vec![vertex; m + 1], q).unwrap().lex_rank();
            (0..fcard)
                .map(|f| {
                    let pidx = triv_levels[m][const_v * fcard + f];
                    pb.pair(SimplexRef::new(m, pidx)).0
                })
                .collect()
        })
        .collect()
}

/// Compare levelwise tables against a gauge and express the discrepancy as
/// an automorphism of the coefficient group, verifying it is induced.
fn discrepancy_automorphism(
    em: &EmModel,
    gauge: &[Vec<usize>],
    block: &[Vec<usize>],
) -> Result<Vec<u64>> {
    let cap = gauge.len() - 1;
    let n = em.degree;
    // phi = gauge^{-1} . block as a self-map of the model
    let mut phi: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for m in 0..=cap {
        let inv: HashMap<usize, usize> = gauge[m].iter().enumerate().map(|(f, &e)| (e, f)).collect();
        let level = block[m]
            .iter()
            .map(|e| {
                inv.get(e).copied().ok_or(Error::ActionNotAutomorphism {
                    detail: "trivializations disagree on the vertex fiber".into(),
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        phi.push(level);
    }
    let h: Vec<u64> = (0..em.card(n)).map(|f| phi[n][f] as u64).collect();
    let EmCoefficients::Abelian(g) = &em.coeff else {
        return Err(Error::FiberDegreeTooSmall { n: 1 });
    };
    if !g.is_automorphism(&h) {
        return Err(Error::ActionNotAutomorphism {
            detail: "vertex discrepancy is not a group automorphism".into(),
        });
    }
    // the discrepancy must be the induced map of h (automorphisms over a
    // point are exactly the induced maps)
    let hom = GroupHom::new(g, g, h.clone())?;
    let induced = induced_map(&hom, em, em)?;
    for m in 0..=cap {
        for f in 0..em.card(m) {
            if induced.apply(SimplexRef::new(m, f)).index != phi[m][f] {
                return Err(Error::ActionNotAutomorphism {
                    detail: "vertex discrepancy is not induced by a group automorphism".into(),
                });
            }
        }
    }
    Ok(h)
}

fn invert_table(t: &[u64]) -> Vec<u64> {
    let mut inv = vec![0u64; t.len()];
    for (i, &v) in t.iter().enumerate() {
        inv[v as usize] = i as u64;
    }
    inv
}

impl BundleCtx {
    /// Verify local triviality, fix vertex gauges, and extract the
    /// canonical local system. Requires fiber degree n > 1, where special
    /// trivializations over edges are unique.
    pub fn new(bundle: Bundle, budget: u64) -> Result<Self> {
        BundleCtx::with_gauges(bundle, budget, None)
    }

    /// As [`BundleCtx::new`] but with prescribed vertex gauges (levelwise
    /// tables model -> total space). The tables are validated in use.
    pub fn with_gauges(
        bundle: Bundle,
        budget: u64,
        gauges: Option<Vec<Vec<Vec<usize>>>>,
    ) -> Result<Self> {
        let n = bundle.fiber.degree;
        if n <= 1 {
            return Err(Error::FiberDegreeTooSmall { n });
        }
        let group = bundle.fiber_group().clone();
        // vertex gauges: a trivialization over every vertex
        let vertex_gauge = match gauges {
            Some(g) => {
                assert_eq!(g.len(), bundle.base.card(0));
                g
            }
            None => {
                let mut out = Vec::with_capacity(bundle.base.card(0));
                for v in 0..bundle.base.card(0) {
                    let i_v = SimplicialMap::characteristic(
                        SimplexRef::new(0, v),
                        bundle.base.clone(),
                        bundle.base.dim_cap(),
                    )?;
                    let pb = pullback(&bundle, &i_v)?;
                    let t = find_trivialization(&pb, &bundle.fiber, 0, budget)?
                        .ok_or(Error::NotLocallyTrivial { dim: 0, index: v })?;
                    out.push(vertex_block(t.levels(), &pb, &bundle.fiber, 0, 0));
                }
                out
            }
        };
        let mut ctx = BundleCtx {
            bundle,
            system: LocalSystem::trivial(group.clone(), &standard_simplex(0, 0)),
            vertex_gauge,
            special: std::cell::RefCell::new(HashMap::new()),
            budget,
        };
        // canonical local system: edge isomorphisms from the unique special
        // trivializations over 1-simplices
        let mut edge_tables = Vec::with_capacity(ctx.bundle.base.card(1));
        for eps in 0..ctx.bundle.base.card(1) {
            let e_ref = SimplexRef::new(1, eps);
            let st = ctx.special_trivialization(e_ref)?;
            let w = ctx.bundle.base.face(0, e_ref).index;
            let block1 = vertex_block(&st.triv.levels, &st.pullback, &ctx.bundle.fiber, 1, 1);
            // s(edge iso) = (vertex-1 block)^{-1} . gauge(w)
            let mut psi: Vec<Vec<usize>> = Vec::new();
            for m in 0..=ctx.bundle.base.dim_cap() {
                let inv: HashMap<usize, usize> =
                    block1[m].iter().enumerate().map(|(f, &e)| (e, f)).collect();
                psi.push(
                    ctx.vertex_gauge[w][m]
                        .iter()
                        .map(|e| {
                            inv.get(e).copied().ok_or(Error::ActionNotAutomorphism {
                                detail: "edge blocks do not match the vertex fiber".into(),
                            })
                        })
                        .collect::<Result<Vec<usize>>>()?,
                );
            }
            let e_table: Vec<u64> =
                (0..ctx.bundle.fiber.card(ctx.bundle.fiber.degree)).map(|f| psi[ctx.bundle.fiber.degree][f] as u64).collect();
            if !group.is_automorphism(&e_table) {
                return Err(Error::ActionNotAutomorphism {
                    detail: format!("edge {eps} does not induce a group automorphism"),
                });
            }
            let hom = GroupHom::new(&group, &group, e_table.clone())?;
            let induced = induced_map(&hom, &ctx.bundle.fiber, &ctx.bundle.fiber)?;
            for (m, level) in psi.iter().enumerate() {
                for (f, &img) in level.iter().enumerate() {
                    if induced.apply(SimplexRef::new(m, f)).index != img {
                        return Err(Error::ActionNotAutomorphism {
                            detail: format!("edge {eps} discrepancy is not induced"),
                        });
                    }
                }
            }
            edge_tables.push(e_table);
        }
        ctx.system = LocalSystem::new(group, edge_tables, &ctx.bundle.base)?;
        Ok(ctx)
    }

    /// The special trivialization of the pullback over a base simplex: its
    /// block over the leading vertex is the chosen gauge of that vertex.
    pub fn special_trivialization(&self, sigma: SimplexRef) -> Result<Arc<SpecialTriv>> {
        if let Some(t) = self.special.borrow().get(&sigma) {
            return Ok(t.clone());
        }
        let q = sigma.dim;
        let i_sigma =
            SimplicialMap::characteristic(sigma, self.bundle.base.clone(), self.bundle.base.dim_cap())?;
        let pb = pullback(&self.bundle, &i_sigma)?;
        let em = &self.bundle.fiber;
        let t = find_trivialization(&pb, em, q, self.budget)?
            .ok_or(Error::NotLocallyTrivial { dim: q, index: sigma.index })?;
        // leading vertex of sigma in the base
        let v = crate::cochain::leading_vertex(&self.bundle.base, sigma)?.index;
        let block0 = vertex_block(t.levels(), &pb, em, q, 0);
        let h = discrepancy_automorphism(em, &self.vertex_gauge[v], &block0)?;
        let hom = GroupHom::new(self.bundle.fiber_group(), self.bundle.fiber_group(), invert_table(&h))?;
        let s_hinv = induced_map(&hom, em, em)?;
        // t' = t . (id x s(h^{-1}))
        let cap = pb.total.dim_cap();
        let levels: Vec<Vec<usize>> = (0..=cap)
            .map(|m| {
                let fcard = em.card(m);
                (0..t.levels()[m].len())
                    .map(|idx| {
                        let (a, f) = (idx / fcard, idx % fcard);
                        let f2 = s_hinv.apply(SimplexRef::new(m, f)).index;
                        t.levels()[m][a * fcard + f2]
                    })
                    .collect()
            })
            .collect();
        let dq = Arc::new(standard_simplex(q, cap));
        let (prod, _, _) = product(&dq, &em.sset);
        let special_map = SimplicialMap::new(prod, pb.total.clone(), levels)?;
        let triv = Trivialization::from_map(q, &special_map)?;
        let out = Arc::new(SpecialTriv { pullback: pb, triv });
        self.special.borrow_mut().insert(sigma, out.clone());
        Ok(out)
    }

    /// Express the pullback of a base cochain over a simplex as a cocycle
    /// of the standard simplex with constant coefficients, untwisting along
    /// the leading edges.
    pub fn untwisted_pullback(&self, c: &Cochain, sigma: SimplexRef) -> Result<SimplexRef> {
        let n = self.bundle.fiber.degree;
        assert_eq!(c.degree, n);
        let q = sigma.dim;
        let em = &self.bundle.fiber;
        let values: Vec<u64> = em
            .basis(q)
            .iter()
            .map(|t| {
                let raw = c.value(self.bundle.base.structure_map(t, sigma)?.index);
                let zeta = MonotoneMap::new(vec![0, t.apply(0)], q)?;
                let edge = self.bundle.base.structure_map(&zeta, sigma)?;
                Ok(self.system.twist(edge.index, raw))
            })
            .collect::<Result<Vec<u64>>>()?;
        em.index_of(q, &values)
            .map(|i| SimplexRef::new(q, i))
            .ok_or(Error::NotACocycle { dim: q, index: sigma.index })
    }
}

/// A translation together with its classifying cocycle.
pub struct Translation {
    pub map: SimplicialMap,
    pub cocycle: Cochain,
}

/// Assemble the unique translation with the given classifying cocycle:
/// over every base simplex, conjugate the group action of the untwisted
/// pullback through the special trivialization.
pub fn translation_from_cocycle(ctx: &BundleCtx, c: &Cochain) -> Result<Translation> {
    let n = ctx.bundle.fiber.degree;
    assert_eq!(c.degree, n);
    c.require_normalized(&ctx.bundle.base)?;
    if !crate::cochain::is_cocycle(c, &ctx.system, &ctx.bundle.base)? {
        let d = coboundary(c, &ctx.system, &ctx.bundle.base)?;
        let bad = d.values.iter().position(|&v| v != 0).unwrap();
        return Err(Error::NotACocycle { dim: n + 1, index: bad });
    }
    let cap = ctx.bundle.total.dim_cap();
    let em = &ctx.bundle.fiber;
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut level = vec![0usize; ctx.bundle.total.card(q)];
        let iota_rank = MonotoneMap::identity(q).lex_rank();
        for sigma_idx in 0..ctx.bundle.base.card(q) {
            let sigma = SimplexRef::new(q, sigma_idx);
            let st = ctx.special_trivialization(sigma)?;
            let c_sigma = ctx.untwisted_pullback(c, sigma)?;
            let fcard = em.card(q);
            for e in 0..ctx.bundle.total.card(q) {
                if ctx.bundle.proj.apply(SimplexRef::new(q, e)).index != sigma_idx {
                    continue;
                }
                let pidx = st
                    .pullback
                    .index_of(q, e, iota_rank)
                    .expect("(e, iota) lies in the pullback");
                let prod_idx = st.triv.inverse[q][pidx];
                let (a, z) = (prod_idx / fcard, prod_idx % fcard);
                debug_assert_eq!(a, iota_rank);
                let z2 = em.add(c_sigma, SimplexRef::new(q, z)).index;
                let out = st.triv.levels[q][a * fcard + z2];
                level[e] = st.pullback.pair(SimplexRef::new(q, out)).0;
            }
        }
        levels.push(level);
    }
    let map = SimplicialMap::new(ctx.bundle.total.clone(), ctx.bundle.total.clone(), levels)?;
    map.require_bijective()?;
    for q in 0..=cap {
        for e in 0..ctx.bundle.total.card(q) {
            let s = SimplexRef::new(q, e);
            if ctx.bundle.proj.apply(map.apply(s)) != ctx.bundle.proj.apply(s) {
                return Err(Error::NotSimplicial { op: "over the base".into(), dim: q, index: e });
            }
        }
    }
    Ok(Translation { map, cocycle: c.clone() })
}

/// Extract the classifying cocycle of an automorphism over the base: over
/// every n-simplex, conjugate through the special trivialization and read
/// off the group element; the conjugate must be exactly the group action.
pub fn extract_translation_cocycle(ctx: &BundleCtx, f: &SimplicialMap) -> Result<Cochain> {
    let n = ctx.bundle.fiber.degree;
    let em = &ctx.bundle.fiber;
    let cap = ctx.bundle.total.dim_cap();
    let mut values = Vec::with_capacity(ctx.bundle.base.card(n));
    for sigma_idx in 0..ctx.bundle.base.card(n) {
        let sigma = SimplexRef::new(n, sigma_idx);
        let st = ctx.special_trivialization(sigma)?;
        // conj = t^{-1} . f_sigma . t on the product
        let conj: Vec<Vec<usize>> = (0..=cap)
            .map(|m| {
                (0..st.triv.levels[m].len())
                    .map(|idx| {
                        let pidx = st.triv.levels[m][idx];
                        let (e, a) = st.pullback.pair(SimplexRef::new(m, pidx));
                        let fe = f.apply(SimplexRef::new(m, e)).index;
                        let fp = st
                            .pullback
                            .index_of(m, fe, a)
                            .expect("f is over the base");
                        st.triv.inverse[m][fp]
                    })
                    .collect()
            })
            .collect();
        let fcard = em.card(n);
        let iota_rank = MonotoneMap::identity(n).lex_rank();
        let at_zero = conj[n][iota_rank * fcard + em.zero_simplex(n).index];
        debug_assert_eq!(at_zero / fcard, iota_rank);
        let d = SimplexRef::new(n, at_zero % fcard);
        // the conjugate must be the full group action of d
        let action = group_action_t(em, n, d)?;
        for (m, level) in conj.iter().enumerate() {
            for (idx, &img) in level.iter().enumerate() {
                if action.apply(SimplexRef::new(m, idx)).index != img {
                    return Err(Error::ActionNotAutomorphism {
                        detail: format!("automorphism is not a translation over simplex {sigma_idx}"),
                    });
                }
            }
        }
        values.push(em.as_group_element(d));
    }
    Ok(Cochain { degree: n, values })
}

/// Whether a base simplex is free in dimension m: its characteristic map
/// is injective on the m-skeleton of the standard simplex.
pub fn is_free_in_dim(base: &Arc<FiniteSimplicialSet>, sigma: SimplexRef, m: usize) -> Result<bool> {
    let cap = base.dim_cap();
    let dq = standard_simplex(sigma.dim, cap);
    let members = dq.skeleton_members(m);
    for d in 0..=cap {
        let mut seen = HashMap::new();
        for idx in 0..dq.card(d) {
            if !members[d][idx] {
                continue;
            }
            let theta = MonotoneMap::enumerate(d, sigma.dim)[idx].clone();
            let img = base.structure_map(&theta, sigma)?;
            if let Some(prev) = seen.insert(img.index, idx) {
                let _ = prev;
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A transitivity witness: a normalized (n-1)-cochain whose coboundary
/// translation moves one lift to the other.
pub fn transitivity_act(
    ctx: &BundleCtx,
    tau: SimplexRef,
    tau2: SimplexRef,
) -> Result<Cochain> {
    let n = ctx.bundle.fiber.degree;
    let em = &ctx.bundle.fiber;
    assert_eq!(tau.dim, tau2.dim);
    let q = tau.dim;
    let sigma = ctx.bundle.proj.apply(tau);
    if ctx.bundle.proj.apply(tau2) != sigma {
        return Err(Error::BadSimplexRef { dim: q, index: tau2.index });
    }
    if !is_free_in_dim(&ctx.bundle.base, sigma, n - 1)? {
        return Err(Error::NotFree { dim: q, index: sigma.index, m: n - 1 });
    }
    let st = ctx.special_trivialization(sigma)?;
    let iota_rank = MonotoneMap::identity(q).lex_rank();
    let fcard = em.card(q);
    let read_fiber = |t: SimplexRef| -> SimplexRef {
        let pidx = st.pullback.index_of(q, t.index, iota_rank).expect("lift over sigma");
        let prod_idx = st.triv.inverse[q][pidx];
        debug_assert_eq!(prod_idx / fcard, iota_rank);
        SimplexRef::new(q, prod_idx % fcard)
    };
    let z = read_fiber(tau);
    let z2 = read_fiber(tau2);
    let diff = em.add(z2, em.neg(z));
    // primitive of the difference cocycle on the standard simplex, solved
    // componentwise with exact modular linear algebra
    let group = ctx.bundle.fiber_group().clone();
    let tuples_low = MonotoneMap::enumerate_injections(n - 1, q);
    let tuples_high = em.basis(q).to_vec();
    let rank_low: HashMap<&MonotoneMap, usize> =
        tuples_low.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let rows: Vec<Vec<num_bigint::BigInt>> = tuples_high
        .iter()
        .map(|s| {
            let mut row = vec![num_bigint::BigInt::from(0); tuples_low.len()];
            for i in 0..=n {
                let f = s.compose(&MonotoneMap::coface(i, n)).unwrap();
                let col = rank_low[&f];
                if i % 2 == 0 {
                    row[col] += 1;
                } else {
                    row[col] -= 1;
                }
            }
            row
        })
        .collect();
    let diff_values = em.cocycle(diff).to_vec();
    let mut d_solution: Vec<u64> = vec![0; tuples_low.len()];
    for (ci, &modulus) in group.moduli().iter().enumerate() {
        let b: Vec<u64> = diff_values.iter().map(|&v| group.decode(v)[ci]).collect();
        let x = crate::zlin::solve_mod(&rows, &b, tuples_low.len(), modulus)
            .ok_or(Error::NoPrimitive)?;
        for (p, &xp) in x.iter().enumerate() {
            let mut comps = group.decode(d_solution[p]);
            comps[ci] = xp;
            d_solution[p] = group.encode(&comps);
        }
    }
    // extend to the base along the characteristic map, untwisting the
    // leading-edge isomorphisms; freeness makes the assignment consistent
    let mut c = Cochain::zero(n - 1, &ctx.bundle.base);
    for (p, t) in tuples_low.iter().enumerate() {
        let x = ctx.bundle.base.structure_map(t, sigma)?;
        let zeta = MonotoneMap::new(vec![0, t.apply(0)], q)?;
        let edge = ctx.bundle.base.structure_map(&zeta, sigma)?;
        let untwist = invert_table(&ctx.system.edge[edge.index]);
        c.values[x.index] = untwist[d_solution[p] as usize];
    }
    c.require_normalized(&ctx.bundle.base)?;
    // the witness moves tau to tau2
    let a_c = translation_from_cocycle(ctx, &coboundary(&c, &ctx.system, &ctx.bundle.base)?)?;
    if a_c.map.apply(tau) != tau2 {
        return Err(Error::IdentityViolated {
            relation: "transitivity witness does not move the lift".into(),
            dim: q,
            index: tau.index,
        });
    }
    Ok(c)
}

/// The bundle crossed with the interval, with its vertex gauges derived
/// from the original so the local system is the pullback along the
/// projection and all expressions stay in one gauge.
pub fn cross_interval(ctx: &BundleCtx) -> Result<(BundleCtx, Arc<FiniteSimplicialSet>)> {
    let cap = ctx.bundle.total.dim_cap();
    let d1 = Arc::new(standard_simplex(1, cap));
    let (e1, _, _) = product(&ctx.bundle.total, &d1);
    let (b1, _, _) = product(&ctx.bundle.base, &d1);
    let d1card: Vec<usize> = (0..=cap).map(|m| d1.card(m)).collect();
    let levels: Vec<Vec<usize>> = (0..=cap)
        .map(|m| {
            (0..e1.card(m))
                .map(|idx| {
                    let (e, psi) = (idx / d1card[m], idx % d1card[m]);
                    ctx.bundle.proj.apply(SimplexRef::new(m, e)).index * d1card[m] + psi
                })
                .collect()
        })
        .collect();
    let proj1 = SimplicialMap::new(e1.clone(), b1.clone(), levels)?;
    let bundle1 = Bundle::new(proj1, ctx.bundle.fiber.clone());
    // gauge at (v, j): the original gauge at v crossed with the constant j
    let em = &ctx.bundle.fiber;
    let mut gauges = Vec::with_capacity(b1.card(0));
    for v in 0..ctx.bundle.base.card(0) {
        for j in 0..2usize {
            let gauge: Vec<Vec<usize>> = (0..=cap)
                .map(|m| {
                    let const_j = MonotoneMap::new(vec![j; m + 1], 1).unwrap().lex_rank();
                    (0..em.card(m))
                        .map(|f| ctx.vertex_gauge[v][m][f] * d1card[m] + const_j)
                        .collect()
                })
                .collect();
            gauges.push(gauge);
        }
    }
    let ctx1 = BundleCtx::with_gauges(bundle1, ctx.budget, Some(gauges))?;
    Ok((ctx1, b1))
}

/// The one-vertex circle model: the interval with its two endpoint classes
/// identified. Returns the set and, per dimension, the class of each
/// interval simplex.
pub fn circle_model(cap: usize) -> (Arc<FiniteSimplicialSet>, Vec<Vec<usize>>) {
    let d1 = standard_simplex(1, cap);
    // identify the two constant words levelwise
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let all_zero = MonotoneMap::new(vec![0; q + 1], 1).unwrap().lex_rank();
        let all_one = MonotoneMap::new(vec![1; q + 1], 1).unwrap().lex_rank();
        let mut dense = Vec::with_capacity(d1.card(q));
        let mut count = 0usize;
        for idx in 0..d1.card(q) {
            if idx == all_one {
                dense.push(dense[all_zero]);
            } else {
                dense.push(count);
                count += 1;
            }
        }
        class_of.push(dense);
    }
    let cards: Vec<usize> = class_of.iter().map(|c| c.iter().max().map_or(0, |m| m + 1)).collect();
    let rep_of = |q: usize| -> Vec<usize> {
        let mut rep = vec![usize::MAX; cards[q]];
        for (idx, &c) in class_of[q].iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = idx;
            }
        }
        rep
    };
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let reps = rep_of(q);
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            per_i.push(reps.iter().map(|&r| class_of[q - 1][d1.face(i, SimplexRef::new(q, r)).index]).collect());
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let reps = rep_of(q);
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            per_i.push(
                reps.iter()
                    .map(|&r| class_of[q + 1][d1.degeneracy(i, SimplexRef::new(q, r)).index])
                    .collect(),
            );
        }
        degens.push(per_i);
    }
    let s1 = Arc::new(FiniteSimplicialSet::new(cap, cards, faces, degens).expect("circle model is lawful"));
    (s1, class_of)
}

/// A twisted bundle over the circle: the mapping torus of the induced
/// automorphism. The two ends of the interval cylinder are glued through
/// `s(h)`, so the canonical local system has edge isomorphism `h` on the
/// loop (up to the vertex gauge).
pub fn twisted_circle_bundle(em: &Arc<EmModel>, h: &[u64]) -> Result<Bundle> {
    let cap = em.sset.dim_cap();
    let group = match &em.coeff {
        EmCoefficients::Abelian(g) => g.clone(),
        EmCoefficients::NonAbelian(_) => panic!("twisting needs abelian coefficients"),
    };
    let hom = GroupHom::new(&group, &group, h.to_vec())?;
    if !hom.is_iso() {
        return Err(Error::NotAHomomorphism { detail: "twist must be an automorphism".into() });
    }
    let s_h = induced_map(&hom, em, em)?;
    let s_h_inv = induced_map(&GroupHom::new(&group, &group, invert_table(h))?, em, em)?;
    let (s1, class_of) = circle_model(cap);
    let d1 = standard_simplex(1, cap);
    // representatives: pairs (w, z) with w any interval simplex except the
    // all-one word; (all-one, z) is identified with (all-zero, s(h)^{-1} z)
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(cap + 1);
    let mut lookup: Vec<HashMap<(usize, usize), usize>> = Vec::with_capacity(cap + 1);
    let mut all_ones: Vec<usize> = Vec::with_capacity(cap + 1);
    let mut all_zeros: Vec<usize> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let all_one = MonotoneMap::new(vec![1; q + 1], 1).unwrap().lex_rank();
        let all_zero = MonotoneMap::new(vec![0; q + 1], 1).unwrap().lex_rank();
        all_ones.push(all_one);
        all_zeros.push(all_zero);
        let mut level = Vec::new();
        let mut map = HashMap::new();
        for w in 0..d1.card(q) {
            if w == all_one {
                continue;
            }
            for z in 0..em.card(q) {
                map.insert((w, z), level.len());
                level.push((w, z));
            }
        }
        pairs.push(level);
        lookup.push(map);
    }
    let rep = |q: usize, w: usize, z: usize| -> (usize, usize) {
        if w == all_ones[q] {
            (all_zeros[q], s_h_inv.apply(SimplexRef::new(q, z)).index)
        } else {
            (w, z)
        }
    };
    let cards: Vec<usize> = pairs.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let table = pairs[q]
                .iter()
                .map(|&(w, z)| {
                    let fw = d1.face(i, SimplexRef::new(q, w)).index;
                    let fz = em.sset.face(i, SimplexRef::new(q, z)).index;
                    let (rw, rz) = rep(q - 1, fw, fz);
                    lookup[q - 1][&(rw, rz)]
                })
                .collect();
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let table = pairs[q]
                .iter()
                .map(|&(w, z)| {
                    let sw = d1.degeneracy(i, SimplexRef::new(q, w)).index;
                    let sz = em.sset.degeneracy(i, SimplexRef::new(q, z)).index;
                    let (rw, rz) = rep(q + 1, sw, sz);
                    lookup[q + 1][&(rw, rz)]
                })
                .collect();
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let total = Arc::new(FiniteSimplicialSet::new(cap, cards, faces, degens)?);
    let levels: Vec<Vec<usize>> = (0..=cap)
        .map(|q| pairs[q].iter().map(|&(w, _)| class_of[q][w]).collect())
        .collect();
    let proj = SimplicialMap::new(total.clone(), s1, levels)?;
    let _ = s_h;
    Ok(Bundle::new(proj, em.clone()))
}

/// The translation homotopy: given a normalized primitive `b` of `c - d`,
/// build the translation of the bundle crossed with the interval that
/// restricts to `f(c - d)` on the zero end and the identity on the other.
pub struct TranslationHomotopy {
    pub map: SimplicialMap,
    pub restricts_to_difference: bool,
    pub identity_on_far_end: bool,
    pub constant_over_low_skeleton: bool,
}

pub fn translation_homotopy(
    ctx: &BundleCtx,
    c: &Cochain,
    d: &Cochain,
    b: &Cochain,
) -> Result<TranslationHomotopy> {
    let n = ctx.bundle.fiber.degree;
    let group = ctx.bundle.fiber_group().clone();
    assert_eq!(b.degree, n - 1);
    b.require_normalized(&ctx.bundle.base)?;
    // b must be a primitive of c - d
    let diff = c.sub(d, &group);
    if coboundary(b, &ctx.system, &ctx.bundle.base)? != diff {
        return Err(Error::NoPrimitive);
    }
    let (ctx1, b1) = cross_interval(ctx)?;
    let cap = ctx.bundle.base.dim_cap();
    let d1 = standard_simplex(1, cap);
    // the cochain supported on the zero end
    let mut b0 = Cochain::zero(n - 1, &b1);
    let d1card = d1.card(n - 1);
    let all_zero = MonotoneMap::new(vec![0; n], 1).unwrap().lex_rank();
    for x in 0..ctx.bundle.base.card(n - 1) {
        b0.values[x * d1card + all_zero] = b.value(x);
    }
    let c0 = coboundary(&b0, &ctx1.system, &b1)?;
    let h = translation_from_cocycle(&ctx1, &c0)?;
    // end restrictions
    let f_diff = translation_from_cocycle(ctx, &diff)?;
    let mut restricts = true;
    let mut far_identity = true;
    for q in 0..=cap {
        let dcard = d1.card(q);
        let az = MonotoneMap::new(vec![0; q + 1], 1).unwrap().lex_rank();
        let ao = MonotoneMap::new(vec![1; q + 1], 1).unwrap().lex_rank();
        for e in 0..ctx.bundle.total.card(q) {
            let zero_end = SimplexRef::new(q, e * dcard + az);
            let one_end = SimplexRef::new(q, e * dcard + ao);
            let hz = h.map.apply(zero_end);
            if hz.index != f_diff.map.apply(SimplexRef::new(q, e)).index * dcard + az {
                restricts = false;
            }
            if h.map.apply(one_end) != one_end {
                far_identity = false;
            }
        }
    }
    // constant over the (n-2)-skeleton of the base
    let members = ctx.bundle.base.skeleton_members(n.saturating_sub(2));
    let mut constant_low = true;
    for q in 0..=cap {
        let dcard = d1.card(q);
        for e in 0..ctx.bundle.total.card(q) {
            let base_simplex = ctx.bundle.proj.apply(SimplexRef::new(q, e));
            if !members[q][base_simplex.index] {
                continue;
            }
            for psi in 0..dcard {
                let s = SimplexRef::new(q, e * dcard + psi);
                if h.map.apply(s) != s {
                    constant_low = false;
                }
            }
        }
    }
    Ok(TranslationHomotopy {
        map: h.map,
        restricts_to_difference: restricts,
        identity_on_far_end: far_identity,
        constant_over_low_skeleton: constant_low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::build_em;

    fn z2_fiber(cap: usize) -> Arc<EmModel> {
        Arc::new(build_em(EmCoefficients::Abelian(FinAb::cyclic(2)), 2, cap).unwrap())
    }

    #[test]
    fn pullback_along_identity_matches_total() {
        let base = Arc::new(standard_simplex(1, 3));
        let b = product_bundle(&base, &z2_fiber(3));
        let pb = pullback(&b, &SimplicialMap::identity(base.clone())).unwrap();
        for q in 0..=3usize {
            assert_eq!(pb.total.card(q), b.total.card(q));
        }
        assert!(pb.to_total.is_bijective());
    }

    #[test]
    fn pullback_to_vertex_is_fiber() {
        let base = Arc::new(standard_simplex(2, 3));
        let em = z2_fiber(3);
        let b = product_bundle(&base, &em);
        let i_v = SimplicialMap::characteristic(SimplexRef::new(0, 0), base.clone(), 3).unwrap();
        let pb = pullback(&b, &i_v).unwrap();
        for q in 0..=3usize {
            assert_eq!(pb.total.card(q), em.card(q));
        }
    }

    #[test]
    fn group_action_is_an_action() {
        let em = build_em(EmCoefficients::Abelian(FinAb::cyclic(2)), 2, 3).unwrap();
        let q = 2;
        let unit = group_action_t(&em, q, em.zero_simplex(q)).unwrap();
        let cap = em.sset.dim_cap();
        for m in 0..=cap {
            for idx in 0..unit.levels()[m].len() {
                assert_eq!(unit.apply(SimplexRef::new(m, idx)).index, idx);
            }
        }
        for g in 0..em.card(q) {
            for h in 0..em.card(q) {
                let sg = SimplexRef::new(q, g);
                let sh = SimplexRef::new(q, h);
                let lhs = group_action_t(&em, q, sg)
                    .unwrap()
                    .compose(&group_action_t(&em, q, sh).unwrap())
                    .unwrap();
                let rhs = group_action_t(&em, q, em.add(sg, sh)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn product_bundle_has_constant_system() {
        let base = Arc::new(standard_simplex(2, 3));
        let b = product_bundle(&base, &z2_fiber(3));
        let ctx = BundleCtx::new(b, 1_000_000).unwrap();
        let id = FinAb::cyclic(2).identity_table();
        for e in &ctx.system.edge {
            assert_eq!(*e, id);
        }
    }

    #[test]
    fn translation_roundtrip_on_product_over_triangle() {
        let base = Arc::new(standard_simplex(2, 3));
        let em = z2_fiber(3);
        let b = product_bundle(&base, &em);
        let ctx = BundleCtx::new(b, 1_000_000).unwrap();
        // normalized 2-cocycles of the triangle: value on the top simplex
        let nondeg = ctx.bundle.base.nondegenerate(2);
        for val in 0..2u64 {
            let mut c = Cochain::zero(2, &ctx.bundle.base);
            for &idx in &nondeg {
                c.values[idx] = val;
            }
            let f = translation_from_cocycle(&ctx, &c).unwrap();
            let back = extract_translation_cocycle(&ctx, &f.map).unwrap();
            assert_eq!(back, c);
            if val == 0 {
                assert_eq!(f.map, SimplicialMap::identity(ctx.bundle.total.clone()));
            }
        }
    }
}

#[cfg(test)]
mod lemma_tests {
    use super::*;
    use crate::em::build_em;

    fn ctx_over(base: Arc<FiniteSimplicialSet>, order: u64) -> BundleCtx {
        let em = Arc::new(build_em(EmCoefficients::Abelian(FinAb::cyclic(order)), 2, base.dim_cap()).unwrap());
        BundleCtx::new(product_bundle(&base, &em), 10_000_000).unwrap()
    }

    #[test]
    fn additivity_and_homomorphism_over_boundary() {
        // base with a rich cocycle group: the boundary of the 3-simplex
        let base = Arc::new(crate::generate::boundary_simplex(3, 3));
        let ctx = ctx_over(base.clone(), 2);
        let nondeg = base.nondegenerate(2);
        let cocycles: Vec<Cochain> = (0..16u32)
            .map(|mask| {
                let mut c = Cochain::zero(2, &base);
                for (bit, &idx) in nondeg.iter().enumerate() {
                    c.values[idx] = u64::from(mask >> bit & 1);
                }
                c
            })
            .collect();
        let group = ctx.bundle.fiber_group().clone();
        for c in cocycles.iter().take(4) {
            for d in cocycles.iter().take(4) {
                let fc = translation_from_cocycle(&ctx, c).unwrap();
                let fd = translation_from_cocycle(&ctx, d).unwrap();
                let sum = c.add(d, &group);
                let fsum = translation_from_cocycle(&ctx, &sum).unwrap();
                // f(c + d) = f(c) . f(d)
                assert_eq!(fc.map.compose(&fd.map).unwrap(), fsum.map);
                // D_{f . g} = D_f + D_g
                let extracted = extract_translation_cocycle(&ctx, &fc.map.compose(&fd.map).unwrap()).unwrap();
                assert_eq!(extracted, sum);
            }
        }
    }

    #[test]
    fn translations_are_identity_over_low_skeleton() {
        let base = Arc::new(crate::generate::boundary_simplex(3, 3));
        let ctx = ctx_over(base.clone(), 2);
        let nondeg = base.nondegenerate(2);
        let mut c = Cochain::zero(2, &base);
        c.values[nondeg[0]] = 1;
        c.values[nondeg[2]] = 1;
        let f = translation_from_cocycle(&ctx, &c).unwrap();
        let members = base.skeleton_members(1);
        for q in 0..=3usize {
            for e in 0..ctx.bundle.total.card(q) {
                let s = SimplexRef::new(q, e);
                if members[q][ctx.bundle.proj.apply(s).index] {
                    assert_eq!(f.map.apply(s), s);
                }
            }
        }
    }

    #[test]
    fn extracted_cocycle_is_normalized_and_closed() {
        let base = Arc::new(crate::generate::boundary_simplex(3, 3));
        let ctx = ctx_over(base.clone(), 2);
        let nondeg = base.nondegenerate(2);
        let mut c = Cochain::zero(2, &base);
        c.values[nondeg[1]] = 1;
        let f = translation_from_cocycle(&ctx, &c).unwrap();
        let d = extract_translation_cocycle(&ctx, &f.map).unwrap();
        assert!(d.is_normalized(&base));
        assert!(crate::cochain::is_cocycle(&d, &ctx.system, &base).unwrap());
    }

    #[test]
    fn twisted_circle_recovers_the_twist() {
        let em = Arc::new(build_em(EmCoefficients::Abelian(FinAb::cyclic(4)), 2, 3).unwrap());
        let neg = FinAb::cyclic(4).negation_table();
        let b = twisted_circle_bundle(&em, &neg).unwrap();
        let ctx = BundleCtx::new(b, 10_000_000).unwrap();
        // one vertex, so one stalk; the loop edge carries the twist
        let s1_nondeg_edge: Vec<usize> = (0..ctx.bundle.base.card(1))
            .filter(|&i| !ctx.bundle.base.is_degenerate(SimplexRef::new(1, i)))
            .collect();
        assert_eq!(s1_nondeg_edge.len(), 1);
        assert_eq!(ctx.system.edge[s1_nondeg_edge[0]], neg);
        // degenerate edge carries the identity
        for i in 0..ctx.bundle.base.card(1) {
            if !s1_nondeg_edge.contains(&i) {
                assert_eq!(ctx.system.edge[i], FinAb::cyclic(4).identity_table());
            }
        }
    }

    #[test]
    fn transitivity_witnesses_over_triangle() {
        let base = Arc::new(standard_simplex(2, 3));
        let ctx = ctx_over(base.clone(), 2);
        // lifts of the top simplex in the product bundle
        let em = &ctx.bundle.fiber;
        let sigma = crate::generate::iota(2);
        assert!(is_free_in_dim(&base, sigma, 1).unwrap());
        let fcard = em.card(2);
        for z in 0..fcard {
            for z2 in 0..fcard {
                let tau = SimplexRef::new(2, sigma.index * fcard + z);
                let tau2 = SimplexRef::new(2, sigma.index * fcard + z2);
                let c = transitivity_act(&ctx, tau, tau2).unwrap();
                if z == z2 {
                    assert!(c.is_zero());
                }
            }
        }
    }

    #[test]
    fn translation_homotopy_ends() {
        let base = Arc::new(standard_simplex(2, 3));
        let ctx = ctx_over(base.clone(), 2);
        // b: a normalized 1-cochain on the triangle; c = its coboundary, d = 0
        let nondeg1 = base.nondegenerate(1);
        let mut b = Cochain::zero(1, &base);
        b.values[nondeg1[0]] = 1;
        let c = coboundary(&b, &ctx.system, &base).unwrap();
        let d = Cochain::zero(2, &base);
        let h = translation_homotopy(&ctx, &c, &d, &b).unwrap();
        assert!(h.restricts_to_difference);
        assert!(h.identity_on_far_end);
        assert!(h.constant_over_low_skeleton);
    }
}
