//! Constructors: ordered complexes, nerves of categories, Milnor's
//! classifying space, Segal unravelings, and the cochain action with its
//! quotient identity.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{FiniteCategory, Functor, NatTrans};
use crate::error::{Error, Result};
use crate::gamma::{delete_entry, GammaTrunc};
use crate::generate::{delta_product, delta_to_simplicial, product};
use crate::groups::FiniteGroup;
use crate::monotone::MonotoneMap;
use crate::smap::{DeltaMap, SimplicialMap};
use crate::sset::{FiniteDeltaSet, FiniteSimplicialSet, SimplexRef};

/// A locally ordered simplicial complex: each simplex is an ordered vertex
/// list; orders must restrict compatibly to faces, and the simplex family
/// must be closed under subsets.
#[derive(Clone, Debug)]
pub struct OrderedComplex {
    pub n_vertices: usize,
    simplices: Vec<Vec<usize>>,
    by_set: HashMap<Vec<usize>, usize>,
}

impl OrderedComplex {
    pub fn new(n_vertices: usize, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let mut by_set = HashMap::new();
        for (i, s) in simplices.iter().enumerate() {
            if s.is_empty() || s.iter().any(|&v| v >= n_vertices) {
                return Err(Error::BadOrderedComplex { detail: format!("simplex {i} out of range") });
            }
            let mut set = s.clone();
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadOrderedComplex { detail: format!("simplex {i} repeats a vertex") });
            }
            if by_set.insert(set, i).is_some() {
                return Err(Error::BadOrderedComplex { detail: format!("simplex {i} duplicated") });
            }
        }
        let complex = OrderedComplex { n_vertices, simplices, by_set };
        // face-closed, with compatible restriction of local orders
        for s in &complex.simplices {
            for drop in 0..s.len() {
                if s.len() == 1 {
                    continue;
                }
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != drop)
                    .map(|(_, &v)| v)
                    .collect();
                match complex.find(&face) {
                    Some(stored) if complex.simplices[stored] == face => {}
                    Some(_) => {
                        return Err(Error::BadOrderedComplex {
                            detail: format!("local order of face {face:?} disagrees"),
                        })
                    }
                    None => {
                        return Err(Error::BadOrderedComplex {
                            detail: format!("face {face:?} missing: complex not face-closed"),
                        })
                    }
                }
            }
        }
        Ok(complex)
    }

    /// Close a family of ordered simplices under faces. Orders are inherited
    /// from the generating simplices, which must agree where they overlap.
    pub fn closure(n_vertices: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        let mut all: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut stack = generators;
        while let Some(s) = stack.pop() {
            let mut set = s.clone();
            set.sort_unstable();
            match all.get(&set) {
                Some(prev) if *prev != s => {
                    return Err(Error::BadOrderedComplex {
                        detail: format!("orders {prev:?} and {s:?} disagree"),
                    })
                }
                Some(_) => continue,
                None => {
                    all.insert(set, s.clone());
                    if s.len() > 1 {
                        for drop in 0..s.len() {
                            let face: Vec<usize> = s
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| *j != drop)
                                .map(|(_, &v)| v)
                                .collect();
                            stack.push(face);
                        }
                    }
                }
            }
        }
        let mut simplices: Vec<Vec<usize>> = all.into_values().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        OrderedComplex::new(n_vertices, simplices)
    }

    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        let mut set = vertices.to_vec();
        set.sort_unstable();
        self.by_set.get(&set).copied()
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// The Delta-set of order-preserving injections, with q-simplices the
    /// simplices of cardinality q+1.
    pub fn delta_set(&self, cap: usize) -> FiniteDeltaSet {
        let mut per_dim: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); cap + 1];
        for s in &self.simplices {
            if s.len() <= cap + 1 {
                per_dim[s.len() - 1].push(s);
            }
        }
        for level in per_dim.iter_mut() {
            level.sort();
        }
        let rank: HashMap<&Vec<usize>, usize> = per_dim
            .iter()
            .flat_map(|level| level.iter().enumerate().map(|(i, s)| (*s, i)))
            .collect();
        let cards: Vec<usize> = per_dim.iter().map(|v| v.len()).collect();
        let mut faces = vec![Vec::new()];
        for q in 1..=cap {
            let mut per_i = Vec::with_capacity(q + 1);
            for i in 0..=q {
                let table = per_dim[q]
                    .iter()
                    .map(|s| {
                        let face: Vec<usize> = s
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, &v)| v)
                            .collect();
                        let stored = self.find(&face).expect("face-closed");
                        rank[&self.simplices[stored]]
                    })
                    .collect();
                per_i.push(table);
            }
            faces.push(per_i);
        }
        FiniteDeltaSet::new(cap, cards, faces).expect("ordered complex gives a lawful Delta-set")
    }
}

/// Both incarnations of a locally ordered complex, with the levelwise
/// comparison of the direct simplicial construction against the freely
/// generated one.
pub struct OrderedComplexSets {
    pub delta: FiniteDeltaSet,
    pub simplicial: FiniteSimplicialSet,
    pub agrees_with_free_construction: bool,
}

pub fn from_ordered_complex(s: &OrderedComplex, cap: usize) -> OrderedComplexSets {
    let delta = s.delta_set(cap);
    // direct construction: q-simplices are nondecreasing maps [q] -> V
    // landing in a simplex, i.e. weakly increasing walks along local orders
    let mut per_dim: Vec<Vec<Vec<usize>>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let mut level = Vec::new();
        for s_ord in s.simplices() {
            let l = s_ord.len() - 1;
            if l > q {
                continue;
            }
            for rho in MonotoneMap::enumerate_surjections(q, l) {
                level.push(rho.values().iter().map(|&j| s_ord[j]).collect::<Vec<usize>>());
            }
        }
        level.sort();
        per_dim.push(level);
    }
    let rank = |q: usize, table: &[usize]| -> usize {
        per_dim[q].binary_search_by(|probe| probe.as_slice().cmp(table)).expect("walk present")
    };
    let cards: Vec<usize> = per_dim.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            per_i.push(
                per_dim[q]
                    .iter()
                    .map(|t| {
                        let mut f = t.clone();
                        f.remove(i);
                        rank(q - 1, &f)
                    })
                    .collect(),
            );
        }
        faces.push(per_i);
    }
    let mut degens = Vec::new();
    for q in 0..cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            per_i.push(
                per_dim[q]
                    .iter()
                    .map(|t| {
                        let mut f = t.clone();
                        f.insert(i, t[i]);
                        rank(q + 1, &f)
                    })
                    .collect(),
            );
        }
        degens.push(per_i);
    }
    let simplicial =
        FiniteSimplicialSet::new(cap, cards, faces, degens).expect("walk complex is lawful");
    let free = delta_to_simplicial(&delta);
    let agrees = (0..=cap).all(|q| free.sset.card(q) == simplicial.card(q));
    OrderedComplexSets { delta, simplicial, agrees_with_free_construction: agrees }
}

/// The nerve of a category together with its string tables.
pub struct Nerve {
    pub sset: Arc<FiniteSimplicialSet>,
    strings: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
}

impl Nerve {
    pub fn string(&self, s: SimplexRef) -> &[usize] {
        &self.strings[s.dim][s.index]
    }

    pub fn index_of(&self, dim: usize, string: &[usize]) -> usize {
        self.lookup[dim][string]
    }
}

/// n-simplices are composable strings `(p_1, ..., p_n)`; the 0-simplices
/// are the objects. Inner faces compose, outer faces drop, degeneracies
/// insert identities.
pub fn nerve(c: &FiniteCategory, cap: usize) -> Nerve {
    let mut strings: Vec<Vec<Vec<usize>>> = Vec::with_capacity(cap + 1);
    strings.push((0..c.n_objects()).map(|o| vec![o]).collect());
    for q in 1..=cap {
        let mut level = Vec::new();
        if q == 1 {
            for m in 0..c.n_morphisms() {
                level.push(vec![m]);
            }
        } else {
            for prev in &strings[q - 1] {
                let last_dst = c.dst(prev[q - 2]);
                for m in 0..c.n_morphisms() {
                    if c.src(m) == last_dst {
                        let mut s = prev.clone();
                        s.push(m);
                        level.push(s);
                    }
                }
            }
        }
        level.sort();
        strings.push(level);
    }
    let lookup: Vec<HashMap<Vec<usize>, usize>> = strings
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    // vertex string of a q-simplex: objects v_0..v_q
    let objects_of = |q: usize, s: &[usize]| -> Vec<usize> {
        if q == 0 {
            s.to_vec()
        } else {
            let mut v = vec![c.src(s[0])];
            for &m in s {
                v.push(c.dst(m));
            }
            v
        }
    };
    let cards: Vec<usize> = strings.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let table = strings[q]
                .iter()
                .map(|s| {
                    let f: Vec<usize> = if q == 1 {
                        // down to a vertex
                        vec![if i == 0 { c.dst(s[0]) } else { c.src(s[0]) }]
                    } else if i == 0 {
                        s[1..].to_vec()
                    } else if i == q {
                        s[..q - 1].to_vec()
                    } else {
                        let mut f = Vec::with_capacity(q - 1);
                        f.extend_from_slice(&s[..i - 1]);
                        f.push(c.compose(s[i], s[i - 1]));
                        f.extend_from_slice(&s[i + 1..]);
                        f
                    };
                    lookup[q - 1][&f]
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
            let table = strings[q]
                .iter()
                .map(|s| {
                    let objs = objects_of(q, s);
                    let mut f: Vec<usize> = if q == 0 { Vec::new() } else { s.clone() };
                    f.insert(i, c.identity(objs[i]));
                    lookup[q + 1][&f]
                })
                .collect();
            per_i.push(table);
        }
        degens.push(per_i);
    }
    let sset = Arc::new(
        FiniteSimplicialSet::new(cap, cards, faces, degens).expect("nerves are lawful"),
    );
    Nerve { sset, strings, lookup }
}

/// The simplicial map induced by a functor.
pub fn nerve_functor(
    c: &FiniteCategory,
    f: &Functor,
    nc: &Nerve,
    nd: &Nerve,
) -> Result<SimplicialMap> {
    let cap = nc.sset.dim_cap().min(nd.sset.dim_cap());
    let levels = (0..=cap)
        .map(|q| {
            (0..nc.sset.card(q))
                .map(|idx| {
                    let s = nc.string(SimplexRef::new(q, idx));
                    let image: Vec<usize> = if q == 0 {
                        vec![f.on_objects[s[0]]]
                    } else {
                        s.iter().map(|&m| f.on_morphisms[m]).collect()
                    };
                    nd.index_of(q, &image)
                })
                .collect()
        })
        .collect();
    let _ = c;
    SimplicialMap::new(nc.sset.clone(), nd.sset.clone(), levels)
}

/// The homotopy `B C x Delta[1] -> B D` induced by a natural transformation
/// `t: f -> g`, together with the two end restrictions `Bf` and `Bg`.
pub struct NerveHomotopy {
    pub homotopy: SimplicialMap,
    pub end_zero: SimplicialMap,
    pub end_one: SimplicialMap,
}

pub fn nat_trans_homotopy(
    c: &FiniteCategory,
    d: &FiniteCategory,
    f: &Functor,
    g: &Functor,
    t: &NatTrans,
    nc: &Nerve,
    nd: &Nerve,
) -> Result<NerveHomotopy> {
    let cap = nc.sset.dim_cap().min(nd.sset.dim_cap());
    let d1 = Arc::new(crate::generate::standard_simplex(1, cap));
    let (prod, _, _) = product(&nc.sset, &d1);
    // a q-simplex of the product is (string sigma, psi: [q] -> [1]); it is a
    // string of C x [1] and maps through the functor defined by t
    let objects_of = |q: usize, s: &[usize]| -> Vec<usize> {
        if q == 0 {
            s.to_vec()
        } else {
            let mut v = vec![c.src(s[0])];
            for &m in s {
                v.push(c.dst(m));
            }
            v
        }
    };
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(cap + 1);
    for q in 0..=cap {
        let psis = MonotoneMap::enumerate(q, 1);
        let mut level = Vec::with_capacity(prod.card(q));
        for a in 0..nc.sset.card(q) {
            let s = nc.string(SimplexRef::new(q, a));
            let objs = objects_of(q, s);
            for psi in &psis {
                let image: Vec<usize> = if q == 0 {
                    let o = objs[0];
                    vec![if psi.apply(0) == 0 { f.on_objects[o] } else { g.on_objects[o] }]
                } else {
                    (0..q)
                        .map(|i| {
                            let m = s[i];
                            match (psi.apply(i), psi.apply(i + 1)) {
                                (0, 0) => f.on_morphisms[m],
                                (1, 1) => g.on_morphisms[m],
                                (0, 1) => d.compose(t.components[objs[i + 1]], f.on_morphisms[m]),
                                _ => unreachable!("psi nondecreasing"),
                            }
                        })
                        .collect()
                };
                level.push(nd.index_of(q, &image));
            }
        }
        levels.push(level);
    }
    let homotopy = SimplicialMap::new(prod.clone(), nd.sset.clone(), levels)?;
    let end_zero = nerve_functor(c, f, nc, nd)?;
    let end_one = nerve_functor(c, g, nc, nd)?;
    // the two ends of the cylinder restrict to Bf and Bg
    for q in 0..=cap {
        let psis = MonotoneMap::enumerate(q, 1);
        for a in 0..nc.sset.card(q) {
            for (pi, psi) in psis.iter().enumerate() {
                let idx = a * psis.len() + pi;
                let img = homotopy.apply(SimplexRef::new(q, idx));
                if psi.values().iter().all(|&v| v == 0) && img != end_zero.apply(SimplexRef::new(q, a)) {
                    return Err(Error::NotSimplicial { op: "end 0".into(), dim: q, index: idx });
                }
                if psi.values().iter().all(|&v| v == 1) && img != end_one.apply(SimplexRef::new(q, a)) {
                    return Err(Error::NotSimplicial { op: "end 1".into(), dim: q, index: idx });
                }
            }
        }
    }
    Ok(NerveHomotopy { homotopy, end_zero, end_one })
}

/// Check `B(C x D) = BC x BD` levelwise through the canonical bijection.
pub fn nerve_product_check(c: &FiniteCategory, d: &FiniteCategory, cap: usize) -> Result<bool> {
    let ncd = nerve(&c.product(d), cap);
    let nc = nerve(c, cap);
    let nd = nerve(d, cap);
    let (prod, _, _) = product(&nc.sset, &nd.sset);
    let nm2 = d.n_morphisms();
    let levels: Vec<Vec<usize>> = (0..=cap)
        .map(|q| {
            (0..ncd.sset.card(q))
                .map(|idx| {
                    let s = ncd.string(SimplexRef::new(q, idx));
                    let (sc, sd): (Vec<usize>, Vec<usize>) = if q == 0 {
                        (vec![s[0] / d.n_objects()], vec![s[0] % d.n_objects()])
                    } else {
                        (s.iter().map(|&m| m / nm2).collect(), s.iter().map(|&m| m % nm2).collect())
                    };
                    nc.index_of(q, &sc) * nd.sset.card(q) + nd.index_of(q, &sd)
                })
                .collect()
        })
        .collect();
    let iso = SimplicialMap::new(ncd.sset.clone(), prod, levels)?;
    Ok(iso.is_bijective())
}

/// Milnor's classifying space as a Delta-set: n-simplices are pairs of a
/// bar tuple and a strictly increasing vertex tuple below the cap, sorted
/// lexicographically with the bar tuple leading.
pub struct MilnorSpace {
    pub delta: Arc<FiniteDeltaSet>,
    pub simplices: Vec<Vec<(Vec<usize>, Vec<u32>)>>,
    lookup: Vec<HashMap<(Vec<usize>, Vec<u32>), usize>>,
}

impl MilnorSpace {
    pub fn index_of(&self, dim: usize, bar: &[usize], ks: &[u32]) -> usize {
        self.lookup[dim][&(bar.to_vec(), ks.to_vec())]
    }
}

pub fn milnor_space(pi: &FiniteGroup, vertex_cap: u32, dim_cap: usize) -> Result<MilnorSpace> {
    let gamma = GammaTrunc::new(vertex_cap, dim_cap)?;
    let mut simplices: Vec<Vec<(Vec<usize>, Vec<u32>)>> = Vec::with_capacity(dim_cap + 1);
    for n in 0..=dim_cap {
        let mut level = Vec::new();
        let mut bars = vec![vec![]];
        for _ in 0..n {
            bars = bars
                .into_iter()
                .flat_map(|b: Vec<usize>| {
                    (0..pi.order()).map(move |g| {
                        let mut nb = b.clone();
                        nb.push(g);
                        nb
                    })
                })
                .collect();
        }
        for bar in bars {
            for ks in gamma.tuples(n) {
                level.push((bar.clone(), ks));
            }
        }
        level.sort();
        simplices.push(level);
    }
    let lookup: Vec<HashMap<(Vec<usize>, Vec<u32>), usize>> = simplices
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    let cards: Vec<usize> = simplices.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    for n in 1..=dim_cap {
        let mut per_i = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let table = simplices[n]
                .iter()
                .map(|(bar, ks)| {
                    let new_bar = bar_face(pi, bar, i);
                    let new_ks = delete_entry(ks, i);
                    lookup[n - 1][&(new_bar, new_ks)]
                })
                .collect();
            per_i.push(table);
        }
        faces.push(per_i);
    }
    let delta = Arc::new(FiniteDeltaSet::new(dim_cap, cards, faces)?);
    Ok(MilnorSpace { delta, simplices, lookup })
}

/// The face of a bar tuple: outer indices drop, inner indices multiply.
pub fn bar_face(pi: &FiniteGroup, bar: &[usize], i: usize) -> Vec<usize> {
    let n = bar.len();
    if i == 0 {
        bar[1..].to_vec()
    } else if i == n {
        bar[..n - 1].to_vec()
    } else {
        let mut f = Vec::with_capacity(n - 1);
        f.extend_from_slice(&bar[..i - 1]);
        f.push(pi.mul(bar[i - 1], bar[i]));
        f.extend_from_slice(&bar[i + 1..]);
        f
    }
}

/// Certify the explicit levelwise bijection between Milnor's space and the
/// unraveling of the nerve, and that it commutes with all faces.
pub struct BarIsoReport {
    pub cards_match: bool,
    pub faces_commute: bool,
    pub iso: DeltaMap,
}

pub fn bar_iso_check(pi: &FiniteGroup, vertex_cap: u32, dim_cap: usize) -> Result<BarIsoReport> {
    let milnor = milnor_space(pi, vertex_cap, dim_cap)?;
    let npi = nerve(&FiniteCategory::from_group(pi), dim_cap);
    let gamma = GammaTrunc::new(vertex_cap, dim_cap)?;
    let gd = Arc::new(gamma.delta_set());
    let bd = Arc::new(npi.sset.delta_set());
    let (prod, _, _) = delta_product(&bd, &gd);
    let levels: Vec<Vec<usize>> = (0..=dim_cap)
        .map(|n| {
            milnor.simplices[n]
                .iter()
                .map(|(bar, ks)| {
                    let nerve_idx =
                        if n == 0 { 0 } else { npi.index_of(n, bar) };
                    nerve_idx * gamma.card(n) + gamma.rank(ks)
                })
                .collect()
        })
        .collect();
    let cards_match = (0..=dim_cap).all(|n| milnor.delta.card(n) == prod.card(n));
    let iso = DeltaMap::new(milnor.delta.clone(), prod, levels)?;
    let faces_commute = iso.is_bijective();
    Ok(BarIsoReport { cards_match, faces_commute, iso })
}

/// Segal's unraveling of a category over the first `vertex_cap` naturals:
/// all morphisms `(c, j) -> (c', j')` of the product category with `j < j'`,
/// plus identities.
pub fn segal_category(c: &FiniteCategory, vertex_cap: u32) -> FiniteCategory {
    let m = vertex_cap as usize;
    let n_objects = c.n_objects() * m;
    let enc_ob = |a: usize, j: usize| a * m + j;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut mor_id: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut identity = vec![0usize; n_objects];
    for a in 0..c.n_objects() {
        for j in 0..m {
            identity[enc_ob(a, j)] = src.len();
            mor_id.insert((c.identity(a), j, j), src.len());
            src.push(enc_ob(a, j));
            dst.push(enc_ob(a, j));
        }
    }
    for f in 0..c.n_morphisms() {
        for j in 0..m {
            for j2 in j + 1..m {
                mor_id.insert((f, j, j2), src.len());
                src.push(enc_ob(c.src(f), j));
                dst.push(enc_ob(c.dst(f), j2));
            }
        }
    }
    let mut compose = HashMap::new();
    for (&(f, j1, j2), &fid) in &mor_id {
        for (&(g, k1, k2), &gid) in &mor_id {
            if j2 == k1 && c.dst(f) == c.src(g) {
                compose.insert((gid, fid), mor_id[&(c.compose(g, f), j1, k2)]);
            }
        }
    }
    FiniteCategory::new(n_objects, src, dst, compose, identity, format!("{}_n", c.name()))
        .expect("Segal unraveling is a category")
}

pub struct SegalReport {
    pub cards_match: bool,
    pub core_is_unraveling: bool,
    pub has_nondegenerate_core: bool,
    pub theta_iso: bool,
    pub explicit_iso: Option<SimplicialMap>,
}

/// Certify `B C_n  =  Simp(B C x Gamma)`: the core of the nerve of the
/// unraveled category is the unraveling of the nerve, the core is
/// nondegenerate, and Theta is an isomorphism.
pub fn segal_unraveling(c: &FiniteCategory, vertex_cap: u32, dim_cap: usize) -> Result<SegalReport> {
    let cn = segal_category(c, vertex_cap);
    let ncn = nerve(&cn, dim_cap);
    let nc = nerve(c, dim_cap);
    let gamma = GammaTrunc::new(vertex_cap, dim_cap)?;
    let gd = Arc::new(gamma.delta_set());
    let bd = Arc::new(nc.sset.delta_set());
    let (unraveled, _, _) = delta_product(&bd, &gd);

    let core = crate::generate::core_and_theta(&ncn.sset);
    let m = vertex_cap as usize;
    let core_matches = (0..=dim_cap).all(|q| core.core.card(q) == unraveled.card(q));
    // explicit bijection core(B C_n) <-> B C x Gamma, as a face-commuting map:
    // a nondegenerate string of C_n projects to its C-labels and its strictly
    // increasing tuple of naturals
    let levels: Result<Vec<Vec<usize>>> = (0..=dim_cap)
        .map(|q| {
            (0..core.core.card(q))
                .map(|new_idx| {
                    let orig = core.core_inclusion[q][new_idx];
                    let s = ncn.string(SimplexRef::new(q, orig));
                    if q == 0 {
                        Ok((s[0] / m) * gamma.card(0) + gamma.rank(&[(s[0] % m) as u32]))
                    } else {
                        let mut labels = Vec::with_capacity(q);
                        let mut ks = Vec::with_capacity(q + 1);
                        for (pos, &mor) in s.iter().enumerate() {
                            let (f, j1, j2) = decode_segal_morphism(c, m, mor);
                            labels.push(f);
                            if pos == 0 {
                                ks.push(j1 as u32);
                            }
                            ks.push(j2 as u32);
                        }
                        Ok(nc.index_of(q, &labels) * gamma.card(q) + gamma.rank(&ks))
                    }
                })
                .collect()
        })
        .collect();
    let core_arc = Arc::new(core.core.clone());
    let core_iso = DeltaMap::new(core_arc, unraveled.clone(), levels?)?;
    let core_is_unraveling = core_matches && core_iso.is_bijective();

    // the composite explicit isomorphism Simp(B C x Gamma) -> B C_n via Theta
    let explicit_iso = if core_is_unraveling && core.theta_iso {
        let bridge = delta_to_simplicial(&unraveled);
        let inv_core: Vec<HashMap<usize, usize>> = (0..=dim_cap)
            .map(|q| core_iso.levels()[q].iter().enumerate().map(|(i, &v)| (v, i)).collect())
            .collect();
        let levels: Vec<Vec<usize>> = (0..=dim_cap)
            .map(|mdim| {
                bridge.pairs[mdim]
                    .iter()
                    .map(|(sigma, rho)| {
                        let core_new = inv_core[sigma.dim][&sigma.index];
                        let orig = core.core_inclusion[sigma.dim][core_new];
                        ncn.sset.structure_map(rho, SimplexRef::new(sigma.dim, orig)).unwrap().index
                    })
                    .collect()
            })
            .collect();
        let iso = SimplicialMap::new(Arc::new(bridge.sset), ncn.sset.clone(), levels)?;
        iso.require_bijective()?;
        Some(iso)
    } else {
        None
    };

    Ok(SegalReport {
        cards_match: (0..=dim_cap).all(|q| core.core.card(q) == unraveled.card(q)),
        core_is_unraveling,
        has_nondegenerate_core: core.has_nondegenerate_core,
        theta_iso: core.theta_iso,
        explicit_iso,
    })
}

fn decode_segal_morphism(c: &FiniteCategory, m: usize, mor: usize) -> (usize, usize, usize) {
    let n_id = c.n_objects() * m;
    if mor < n_id {
        let a = mor / m;
        let j = mor % m;
        (c.identity(a), j, j)
    } else {
        let rest = mor - n_id;
        let per_f = m * (m - 1) / 2;
        let f = rest / per_f;
        let mut k = rest % per_f;
        for j in 0..m {
            let count = m - 1 - j;
            if k < count {
                return (f, j, j + 1 + k);
            }
            k -= count;
        }
        unreachable!("morphism id in range")
    }
}

/// The action of a vertex cochain on the unraveling of a nerve, and the
/// quotient identity for a normal subgroup.
pub struct QuotientReport {
    pub action_is_automorphism: bool,
    pub composition_law_holds: bool,
    pub quotient_matches: bool,
}

/// The unraveling `B pi x Gamma` with simplices `((g_1..g_n), (k_0<..<k_n))`.
pub struct UnraveledNerve {
    pub delta: Arc<FiniteDeltaSet>,
    pub nerve: Nerve,
    pub gamma: GammaTrunc,
}

pub fn unraveled_nerve(pi: &FiniteGroup, vertex_cap: u32, dim_cap: usize) -> Result<UnraveledNerve> {
    let npi = nerve(&FiniteCategory::from_group(pi), dim_cap);
    let gamma = GammaTrunc::new(vertex_cap, dim_cap)?;
    let gd = Arc::new(gamma.delta_set());
    let bd = Arc::new(npi.sset.delta_set());
    let (delta, _, _) = delta_product(&bd, &gd);
    Ok(UnraveledNerve { delta, nerve: npi, gamma })
}

/// `a(c)` on the unraveling: labels transform by
/// `g_i -> c(k_{i-1})^{-1} g_i c(k_i)`, vertex tuples are fixed.
pub fn vertex_cochain_action(
    u: &UnraveledNerve,
    pi: &FiniteGroup,
    c: &[usize],
) -> Result<DeltaMap> {
    let dim_cap = u.delta.dim_cap();
    let levels: Vec<Vec<usize>> = (0..=dim_cap)
        .map(|n| {
            let gcard = u.gamma.card(n);
            (0..u.delta.card(n))
                .map(|idx| {
                    let nerve_idx = idx / gcard;
                    let gidx = idx % gcard;
                    if n == 0 {
                        return idx;
                    }
                    let ks = &u.gamma.tuples(n)[gidx];
                    let s = u.nerve.string(SimplexRef::new(n, nerve_idx));
                    let new_string: Vec<usize> = (0..n)
                        .map(|i| {
                            let twist_l = c[ks[i] as usize];
                            let twist_r = c[ks[i + 1] as usize];
                            pi.mul(pi.mul(pi.inv(twist_l), s[i]), twist_r)
                        })
                        .collect();
                    u.nerve.index_of(n, &new_string) * gcard + gidx
                })
                .collect()
        })
        .collect();
    DeltaMap::new(u.delta.clone(), u.delta.clone(), levels)
}

pub fn cochain_action_and_quotient(
    pi: &FiniteGroup,
    kappa: &[usize],
    vertex_cap: u32,
    dim_cap: usize,
) -> Result<QuotientReport> {
    pi.check_normal_subgroup(kappa)?;
    let u = unraveled_nerve(pi, vertex_cap, dim_cap)?;
    let m = vertex_cap as usize;

    // every a(c) is an automorphism over Gamma
    let mut all_c: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        all_c = all_c
            .into_iter()
            .flat_map(|v| {
                (0..pi.order()).map(move |g| {
                    let mut nv = v.clone();
                    nv.push(g);
                    nv
                })
            })
            .collect();
    }
    let mut action_ok = true;
    // limit full automorphism checks to the subgroup unless pi is tiny
    let check_all = pi.order().pow(vertex_cap) <= 64;
    let mut composition_ok = true;
    if check_all {
        let maps: Vec<DeltaMap> = all_c
            .iter()
            .map(|c| vertex_cochain_action(&u, pi, c))
            .collect::<Result<Vec<_>>>()?;
        action_ok = maps.iter().all(|f| f.is_bijective());
        // a(c) . a(c') = a(c' * c) pointwise; for abelian pi this is a(c * c')
        for (ci, c1) in all_c.iter().enumerate() {
            for (cj, c2) in all_c.iter().enumerate() {
                let prod: Vec<usize> = (0..m).map(|k| pi.mul(c2[k], c1[k])).collect();
                let pm = vertex_cochain_action(&u, pi, &prod)?;
                for q in 0..=dim_cap {
                    for idx in 0..u.delta.card(q) {
                        let lhs = maps[ci].apply(maps[cj].apply(SimplexRef::new(q, idx)));
                        if lhs != pm.apply(SimplexRef::new(q, idx)) {
                            composition_ok = false;
                        }
                    }
                }
            }
        }
    }

    // orbits under all maps [0..M) -> kappa
    let mut kappa_cochains: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        kappa_cochains = kappa_cochains
            .into_iter()
            .flat_map(|v| {
                kappa.iter().map(move |&g| {
                    let mut nv = v.clone();
                    nv.push(g);
                    nv
                })
            })
            .collect();
    }
    let actions: Vec<DeltaMap> = kappa_cochains
        .iter()
        .map(|c| vertex_cochain_action(&u, pi, c))
        .collect::<Result<Vec<_>>>()?;
    let mut orbit_rep: Vec<Vec<usize>> = Vec::with_capacity(dim_cap + 1);
    for q in 0..=dim_cap {
        let mut rep: Vec<usize> = (0..u.delta.card(q)).collect();
        for idx in 0..u.delta.card(q) {
            let mut best = idx;
            for a in &actions {
                best = best.min(a.apply(SimplexRef::new(q, idx)).index);
            }
            rep[idx] = best;
        }
        orbit_rep.push(rep);
    }
    // quotient Delta-set on orbit representatives
    let mut class_of: Vec<HashMap<usize, usize>> = Vec::with_capacity(dim_cap + 1);
    let mut class_reps: Vec<Vec<usize>> = Vec::with_capacity(dim_cap + 1);
    for q in 0..=dim_cap {
        let mut reps: Vec<usize> = orbit_rep[q].iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        reps.sort_unstable();
        let lookup: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        class_reps.push(reps);
        class_of.push(lookup);
    }
    let cards: Vec<usize> = class_reps.iter().map(|v| v.len()).collect();
    let mut faces = vec![Vec::new()];
    let mut quotient_welldefined = true;
    for q in 1..=dim_cap {
        let mut per_i = Vec::with_capacity(q + 1);
        for i in 0..=q {
            let mut table = Vec::with_capacity(cards[q]);
            for &rep in &class_reps[q] {
                let f = u.delta.face(i, SimplexRef::new(q, rep)).index;
                table.push(class_of[q - 1][&orbit_rep[q - 1][f]]);
            }
            per_i.push(table);
        }
        faces.push(per_i);
    }
    // well-definedness: faces of orbit-equivalent simplices are orbit-equivalent
    for q in 1..=dim_cap {
        for idx in 0..u.delta.card(q) {
            let rep = orbit_rep[q][idx];
            for i in 0..=q {
                let a = orbit_rep[q - 1][u.delta.face(i, SimplexRef::new(q, idx)).index];
                let b = orbit_rep[q - 1][u.delta.face(i, SimplexRef::new(q, rep)).index];
                if a != b {
                    quotient_welldefined = false;
                }
            }
        }
    }
    let quotient = FiniteDeltaSet::new(dim_cap, cards, faces)?;

    // compare with B(pi/kappa) x Gamma through the coset projection
    let (q_group, coset_of) = pi.quotient(kappa)?;
    let uq = unraveled_nerve(&q_group, vertex_cap, dim_cap)?;
    let mut quotient_matches = quotient_welldefined;
    for q in 0..=dim_cap {
        if quotient.card(q) != uq.delta.card(q) {
            quotient_matches = false;
        }
    }
    if quotient_matches {
        let levels: Vec<Vec<usize>> = (0..=dim_cap)
            .map(|n| {
                let gcard = u.gamma.card(n);
                class_reps[n]
                    .iter()
                    .map(|&rep| {
                        let nerve_idx = rep / gcard;
                        let gidx = rep % gcard;
                        if n == 0 {
                            gidx
                        } else {
                            let s = u.nerve.string(SimplexRef::new(n, nerve_idx));
                            let proj: Vec<usize> = s.iter().map(|&g| coset_of[g]).collect();
                            uq.nerve.index_of(n, &proj) * gcard + gidx
                        }
                    })
                    .collect()
            })
            .collect();
        let comparison = DeltaMap::new(Arc::new(quotient), uq.delta.clone(), levels)?;
        quotient_matches = comparison.is_bijective();
        // the projection must be constant on orbits
        for q in 0..=dim_cap {
            let gcard = u.gamma.card(q);
            for idx in 0..u.delta.card(q) {
                let to_class = |j: usize| {
                    let nerve_idx = j / gcard;
                    let gidx = j % gcard;
                    if q == 0 {
                        gidx
                    } else {
                        let s = u.nerve.string(SimplexRef::new(q, nerve_idx));
                        let proj: Vec<usize> = s.iter().map(|&g| coset_of[g]).collect();
                        uq.nerve.index_of(q, &proj) * gcard + gidx
                    }
                };
                if to_class(idx) != to_class(orbit_rep[q][idx]) {
                    quotient_matches = false;
                }
            }
        }
    }

    Ok(QuotientReport {
        action_is_automorphism: action_ok,
        composition_law_holds: composition_ok,
        quotient_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::binomial;

    #[test]
    fn nerve_of_poset_1_is_the_interval() {
        let n = nerve(&FiniteCategory::poset(1), 3);
        let d1 = crate::generate::standard_simplex(1, 3);
        assert_eq!(n.sset.cards(), d1.cards());
    }

    #[test]
    fn nerve_of_z3_counts() {
        let n = nerve(&FiniteCategory::from_group(&FiniteGroup::cyclic(3)), 3);
        assert_eq!(n.sset.card(0), 1);
        assert_eq!(n.sset.card(2), 9);
    }

    #[test]
    fn inner_face_composes() {
        let z4 = FiniteGroup::cyclic(4);
        let n = nerve(&FiniteCategory::from_group(&z4), 2);
        for g in 0..4usize {
            for h in 0..4usize {
                let idx = n.index_of(2, &[g, h]);
                let d1 = n.sset.face(1, SimplexRef::new(2, idx));
                assert_eq!(n.string(d1), &[z4.mul(g, h)]);
            }
        }
    }

    #[test]
    fn nerve_commutes_with_products() {
        let c = FiniteCategory::from_group(&FiniteGroup::cyclic(2));
        let d = FiniteCategory::poset(1);
        assert!(nerve_product_check(&c, &d, 3).unwrap());
    }

    #[test]
    fn nat_trans_gives_homotopy() {
        let s3 = FiniteGroup::symmetric3();
        let c = FiniteCategory::from_group(&s3);
        let h = 4;
        let conj = Functor::new(
            &c,
            &c,
            vec![0],
            (0..6).map(|g| s3.mul(s3.mul(s3.inv(h), g), h)).collect(),
        )
        .unwrap();
        let id = Functor::identity(&c);
        let t = NatTrans::new(&c, &c, &id, &conj, vec![h]).unwrap();
        let n = nerve(&c, 3);
        nat_trans_homotopy(&c, &c, &id, &conj, &t, &n, &n).unwrap();
    }

    #[test]
    fn milnor_cardinalities() {
        let z2 = FiniteGroup::cyclic(2);
        let m = milnor_space(&z2, 5, 3).unwrap();
        for n in 0..=3usize {
            assert_eq!(m.delta.card(n), 2usize.pow(n as u32) * binomial(5, n + 1));
        }
    }

    #[test]
    fn milnor_face_zero_drops_head() {
        let z3 = FiniteGroup::cyclic(3);
        let m = milnor_space(&z3, 4, 2).unwrap();
        let idx = m.index_of(2, &[1, 2], &[0, 2, 3]);
        let f0 = m.delta.face(0, SimplexRef::new(2, idx));
        assert_eq!(m.simplices[1][f0.index], (vec![2], vec![2, 3]));
    }

    #[test]
    fn milnor_trivial_group_is_gamma() {
        let t = FiniteGroup::trivial();
        let m = milnor_space(&t, 5, 3).unwrap();
        let g = GammaTrunc::new(5, 3).unwrap().delta_set();
        assert_eq!(m.delta.cards(), g.cards());
    }

    #[test]
    fn bar_iso_for_z2() {
        let r = bar_iso_check(&FiniteGroup::cyclic(2), 5, 3).unwrap();
        assert!(r.cards_match && r.faces_commute);
    }

    #[test]
    fn segal_trivial_category() {
        let r = segal_unraveling(&FiniteCategory::trivial(), 4, 3).unwrap();
        assert!(r.cards_match && r.core_is_unraveling && r.has_nondegenerate_core && r.theta_iso);
        assert!(r.explicit_iso.is_some());
    }

    #[test]
    fn segal_z2() {
        let c = FiniteCategory::from_group(&FiniteGroup::cyclic(2));
        let r = segal_unraveling(&c, 4, 3).unwrap();
        assert!(r.cards_match && r.core_is_unraveling && r.has_nondegenerate_core && r.theta_iso);
    }

    #[test]
    fn quotient_identity_z4_mod_2() {
        let z4 = FiniteGroup::cyclic(4);
        let r = cochain_action_and_quotient(&z4, &[0, 2], 3, 2).unwrap();
        assert!(r.action_is_automorphism);
        assert!(r.composition_law_holds);
        assert!(r.quotient_matches);
        assert!(cochain_action_and_quotient(&z4, &[0, 1], 3, 2).is_err());
    }

    #[test]
    fn ordered_complex_triangle_boundary() {
        let s = OrderedComplex::closure(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let sets = from_ordered_complex(&s, 2);
        assert_eq!(sets.delta.card(0), 3);
        assert_eq!(sets.delta.card(1), 3);
        assert_eq!(sets.delta.card(2), 0);
        assert!(sets.agrees_with_free_construction);
    }

    #[test]
    fn single_simplex_gives_standard() {
        let s = OrderedComplex::closure(3, vec![vec![0, 1, 2]]).unwrap();
        let sets = from_ordered_complex(&s, 3);
        let d2 = crate::generate::standard_simplex(2, 3);
        assert_eq!(sets.simplicial.cards(), d2.cards());
    }

    #[test]
    fn incompatible_local_order_is_rejected() {
        assert!(OrderedComplex::closure(3, vec![vec![0, 1, 2], vec![1, 0]]).is_err());
    }
}
