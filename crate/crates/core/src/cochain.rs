//! Cochains with local coefficients, rational chains, coboundary and
//! boundary operators, cones, norms, and finite-group averaging.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::{FinAb, FiniteGroup};
use crate::monotone::MonotoneMap;
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A local system of coefficients: one abelian group for all vertices
/// (stalks are identified with a fixed model) and an automorphism per
/// 1-simplex. The 2-simplex compatibility `tau* = rho* . sigma*` is checked
/// exhaustively at construction against the carrying complex.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub group: FinAb,
    /// per 1-simplex, a value table of an automorphism of the group
    pub edge: Vec<Vec<u64>>,
}

impl LocalSystem {
    pub fn trivial(group: FinAb, k: &FiniteSimplicialSet) -> Self {
        let id = group.identity_table();
        LocalSystem { group, edge: vec![id; k.card(1)] }
    }

    pub fn new(group: FinAb, edge: Vec<Vec<u64>>, k: &FiniteSimplicialSet) -> Result<Self> {
        assert_eq!(edge.len(), k.card(1));
        for (i, t) in edge.iter().enumerate() {
            if !group.is_automorphism(t) {
                return Err(Error::ActionNotAutomorphism {
                    detail: format!("edge {i} table is not an automorphism"),
                });
            }
        }
        let sys = LocalSystem { group, edge };
        sys.check_compatibility(k)?;
        Ok(sys)
    }

    /// `tau* = rho* . sigma*` for every 2-simplex, where `rho = d_2 w`,
    /// `sigma = d_0 w`, `tau = d_1 w`.
    pub fn check_compatibility(&self, k: &FiniteSimplicialSet) -> Result<()> {
        if k.dim_cap() < 2 {
            return Ok(());
        }
        for w in 0..k.card(2) {
            let s = SimplexRef::new(2, w);
            let rho = k.face(2, s).index;
            let sigma = k.face(0, s).index;
            let tau = k.face(1, s).index;
            for a in self.group.elements() {
                let lhs = self.edge[tau][a as usize];
                let rhs = self.edge[rho][self.edge[sigma][a as usize] as usize];
                if lhs != rhs {
                    return Err(Error::LocalSystemIncompatible { index: w });
                }
            }
        }
        Ok(())
    }

    pub fn twist(&self, edge_index: usize, a: u64) -> u64 {
        self.edge[edge_index][a as usize]
    }
}

/// The leading vertex and leading edge of a simplex: pullbacks along the
/// initial vertex and edge inclusions.
pub fn leading_vertex(k: &FiniteSimplicialSet, s: SimplexRef) -> Result<SimplexRef> {
    let theta = MonotoneMap::new(vec![0], s.dim)?;
    k.structure_map(&theta, s)
}

pub fn leading_edge(k: &FiniteSimplicialSet, s: SimplexRef) -> Result<SimplexRef> {
    if s.dim == 0 {
        return Err(Error::CapExceeded { needed: 1, cap: 0 });
    }
    let eta = MonotoneMap::new(vec![0, 1], s.dim)?;
    k.structure_map(&eta, s)
}

/// A group-valued cochain: one element of the coefficient group per simplex
/// of the given degree, stored as canonical indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<u64>,
}

impl Cochain {
    pub fn zero(degree: usize, k: &FiniteSimplicialSet) -> Self {
        Cochain { degree, values: vec![0; k.card(degree)] }
    }

    pub fn value(&self, idx: usize) -> u64 {
        self.values[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Cochain, group: &FinAb) -> Cochain {
        assert_eq!(self.degree, other.degree);
        Cochain {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| group.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cochain, group: &FinAb) -> Cochain {
        assert_eq!(self.degree, other.degree);
        Cochain {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| group.sub(a, b))
                .collect(),
        }
    }

    /// Zero on all degenerate simplices.
    pub fn is_normalized(&self, k: &FiniteSimplicialSet) -> bool {
        (0..k.card(self.degree)).all(|i| {
            self.values[i] == 0 || !k.is_degenerate(SimplexRef::new(self.degree, i))
        })
    }

    pub fn require_normalized(&self, k: &FiniteSimplicialSet) -> Result<()> {
        for i in 0..k.card(self.degree) {
            if self.values[i] != 0 && k.is_degenerate(SimplexRef::new(self.degree, i)) {
                return Err(Error::NotNormalized { dim: self.degree, index: i });
            }
        }
        Ok(())
    }

    /// Pullback along a simplicial map.
    pub fn pullback(&self, f: &SimplicialMap) -> Cochain {
        Cochain {
            degree: self.degree,
            values: (0..f.source.card(self.degree))
                .map(|i| self.values[f.apply(SimplexRef::new(self.degree, i)).index])
                .collect(),
        }
    }
}

/// The twisted coboundary: the leading-edge isomorphism is applied to the
/// 0th face term, all other faces enter with alternating signs.
pub fn coboundary(c: &Cochain, system: &LocalSystem, k: &FiniteSimplicialSet) -> Result<Cochain> {
    let n = c.degree;
    if n + 1 > k.dim_cap() {
        return Err(Error::CapExceeded { needed: n + 1, cap: k.dim_cap() });
    }
    let group = &system.group;
    let values = (0..k.card(n + 1))
        .map(|idx| {
            let s = SimplexRef::new(n + 1, idx);
            let eps = leading_edge(k, s)?;
            let mut acc = system.twist(eps.index, c.values[k.face(0, s).index]);
            for i in 1..=n + 1 {
                let term = c.values[k.face(i, s).index];
                let signed = if i % 2 == 1 { group.neg(term) } else { term };
                acc = group.add(acc, signed);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(Cochain { degree: n + 1, values })
}

pub fn is_cocycle(c: &Cochain, system: &LocalSystem, k: &FiniteSimplicialSet) -> Result<bool> {
    Ok(coboundary(c, system, k)?.is_zero())
}

/// A rational-valued cochain with the sup norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCochain {
    pub degree: usize,
    pub values: Vec<BigRational>,
}

impl QCochain {
    pub fn zero(degree: usize, card: usize) -> Self {
        QCochain { degree, values: vec![BigRational::zero(); card] }
    }

    pub fn sup_norm(&self) -> BigRational {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &QCochain) -> QCochain {
        QCochain {
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QCochain) -> QCochain {
        QCochain {
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, by: &BigRational) -> QCochain {
        QCochain { degree: self.degree, values: self.values.iter().map(|v| v * by).collect() }
    }

    pub fn pullback(&self, f: &SimplicialMap) -> QCochain {
        QCochain {
            degree: self.degree,
            values: (0..f.source.card(self.degree))
                .map(|i| self.values[f.apply(SimplexRef::new(self.degree, i)).index].clone())
                .collect(),
        }
    }
}

/// Untwisted rational coboundary: the plain alternating face sum.
pub fn q_coboundary(c: &QCochain, k: &FiniteSimplicialSet) -> Result<QCochain> {
    let n = c.degree;
    if n + 1 > k.dim_cap() {
        return Err(Error::CapExceeded { needed: n + 1, cap: k.dim_cap() });
    }
    let values = (0..k.card(n + 1))
        .map(|idx| {
            let s = SimplexRef::new(n + 1, idx);
            let mut acc = BigRational::zero();
            for i in 0..=n + 1 {
                let term = &c.values[k.face(i, s).index];
                if i % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        })
        .collect();
    Ok(QCochain { degree: n + 1, values })
}

/// A finite formal sum of same-dimension simplices with rational
/// coefficients. Zero-coefficient terms are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub degree: usize,
    pub terms: BTreeMap<usize, BigRational>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn single(degree: usize, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(index, BigRational::one());
        Chain { degree, terms }
    }

    pub fn insert(&mut self, index: usize, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(index).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&index);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (&i, c) in &other.terms {
            out.insert(i, c.clone());
        }
        out
    }

    pub fn negate(&self) -> Chain {
        Chain {
            degree: self.degree,
            terms: self.terms.iter().map(|(&i, c)| (i, -c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1_norm(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Alternating-sum boundary inside the carrying complex.
    pub fn boundary(&self, k: &FiniteSimplicialSet) -> Chain {
        let mut out = Chain::zero(self.degree - 1);
        for (&idx, coeff) in &self.terms {
            for i in 0..=self.degree {
                let f = k.face(i, SimplexRef::new(self.degree, idx)).index;
                let signed = if i % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                out.insert(f, signed);
            }
        }
        out
    }
}

pub fn evaluate_qcochain_on_chain(c: &QCochain, x: &Chain) -> BigRational {
    assert_eq!(c.degree, x.degree);
    x.terms
        .iter()
        .map(|(&i, coeff)| coeff * &c.values[i])
        .fold(BigRational::zero(), |a, b| a + b)
}

/// The prism operator of a simplicial homotopy `H: K x Delta[1] -> L`,
/// sending an m-simplex to the alternating sum of the m+1 shuffle prisms.
/// Satisfies `boundary . prism + prism . boundary = (end 1) - (end 0)`.
pub struct Prism<'a> {
    pub homotopy: &'a SimplicialMap,
    /// index arithmetic of the product source: `(a, psi) -> a*np + p`
    pub interval_card: Vec<usize>,
}

impl<'a> Prism<'a> {
    /// `homotopy` must have source `K x Delta[1]` built by [`crate::generate::product`].
    pub fn new(homotopy: &'a SimplicialMap) -> Self {
        let cap = homotopy.dim_cap();
        let interval_card = (0..=cap).map(|q| q + 2).collect();
        Prism { homotopy, interval_card }
    }

    /// The image chain of one simplex of K.
    pub fn apply(&self, k: &FiniteSimplicialSet, s: SimplexRef) -> Chain {
        let m = s.dim;
        let mut out = Chain::zero(m + 1);
        // the i-th prism piece: (s_i sigma, psi_i) with psi_i = 0..0 1..1,
        // i+1 zeros
        for i in 0..=m {
            let deg = k.degeneracy(i, s).index;
            let psi = MonotoneMap::new(
                (0..=m + 1).map(|j| usize::from(j > i)).collect(),
                1,
            )
            .unwrap();
            let prod_idx = deg * self.interval_card[m + 1] + psi.lex_rank();
            let img = self.homotopy.apply(SimplexRef::new(m + 1, prod_idx)).index;
            let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            out.insert(img, sign);
        }
        out
    }

    /// Dual action on rational cochains: `(P^* c)(sigma) = c(P sigma)`.
    pub fn dual(&self, k: &FiniteSimplicialSet, c: &QCochain) -> QCochain {
        let m = c.degree - 1;
        QCochain {
            degree: m,
            values: (0..k.card(m))
                .map(|idx| evaluate_qcochain_on_chain(c, &self.apply(k, SimplexRef::new(m, idx))))
                .collect(),
        }
    }
}

/// Average of a bounded rational cocycle over a finite group of
/// automorphisms, with the explicit primitive when homotopies to the
/// identity are supplied.
pub struct AveragedCocycle {
    pub gamma: QCochain,
    pub primitive: Option<QCochain>,
}

/// `actions[g]` is the automorphism for group element `g`; `homotopies[g]`,
/// when given, is a homotopy `K x Delta[1] -> K` from the identity (end 0)
/// to `actions[g]` (end 1). The uniform mean is used.
pub fn finite_group_average(
    k: &Arc<FiniteSimplicialSet>,
    c: &QCochain,
    group: &FiniteGroup,
    actions: &[SimplicialMap],
    homotopies: Option<&[SimplicialMap]>,
) -> Result<AveragedCocycle> {
    assert_eq!(actions.len(), group.order());
    for (g, a) in actions.iter().enumerate() {
        if !a.is_bijective() {
            return Err(Error::ActionNotAutomorphism { detail: format!("element {g}") });
        }
    }
    // the assignment g -> a(g) must respect the group one way or the other
    // (left actions and traversal-order right actions both average fine)
    let mut left_law = true;
    let mut right_law = true;
    for g in 0..group.order() {
        for h in 0..group.order() {
            let lhs = actions[g].compose(&actions[h])?;
            left_law &= lhs == actions[group.mul(g, h)];
            right_law &= lhs == actions[group.mul(h, g)];
        }
    }
    if !left_law && !right_law {
        return Err(Error::ActionNotAutomorphism {
            detail: "a(g).a(h) matches neither a(gh) nor a(hg)".into(),
        });
    }
    let order = rat(group.order() as i64);
    let mut gamma = QCochain::zero(c.degree, k.card(c.degree));
    for a in actions {
        gamma = gamma.add(&c.pullback(a));
    }
    gamma = gamma.scale(&(BigRational::one() / &order));
    for (g, a) in actions.iter().enumerate() {
        if gamma.pullback(a) != gamma {
            return Err(Error::ActionNotAutomorphism {
                detail: format!("mean is not invariant under element {g}"),
            });
        }
    }
    assert!(gamma.sup_norm() <= c.sup_norm());

    let primitive = if let Some(homs) = homotopies {
        assert_eq!(homs.len(), group.order());
        let mut kappa = QCochain::zero(c.degree - 1, k.card(c.degree - 1));
        for h in homs {
            let prism = Prism::new(h);
            kappa = kappa.add(&prism.dual(k, c));
        }
        let kappa = kappa.scale(&(BigRational::one() / &order));
        // gamma - c = d* kappa, exactly
        if gamma.sub(c) != q_coboundary(&kappa, k)? {
            return Err(Error::NotACocycle { dim: c.degree, index: 0 });
        }
        Some(kappa)
    } else {
        None
    };
    Ok(AveragedCocycle { gamma, primitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{iota, product, standard_simplex};
    use num_traits::FromPrimitive;

    #[test]
    fn leading_data_on_standard_simplex() {
        let d3 = standard_simplex(3, 3);
        let v = leading_vertex(&d3, iota(3)).unwrap();
        assert_eq!(v, SimplexRef::new(0, 0));
        let e = leading_edge(&d3, iota(3)).unwrap();
        assert_eq!(e, SimplexRef::new(1, MonotoneMap::new(vec![0, 1], 3).unwrap().lex_rank()));
        assert!(leading_edge(&d3, SimplexRef::new(0, 0)).is_err());
    }

    #[test]
    fn coboundary_of_zero_is_zero() {
        let d2 = standard_simplex(2, 2);
        let sys = LocalSystem::trivial(FinAb::cyclic(3), &d2);
        let c = Cochain::zero(0, &d2);
        assert!(coboundary(&c, &sys, &d2).unwrap().is_zero());
    }

    #[test]
    fn rational_coboundary_on_interval() {
        // 0-cochain (a, b) on Delta[1]: coboundary on the edge is b - a
        let d1 = standard_simplex(1, 1);
        let a = BigRational::from_i64(5).unwrap();
        let b = BigRational::from_i64(2).unwrap();
        let c = QCochain { degree: 0, values: vec![a.clone(), b.clone()] };
        let dc = q_coboundary(&c, &d1).unwrap();
        let edge01 = MonotoneMap::new(vec![0, 1], 1).unwrap().lex_rank();
        assert_eq!(dc.values[edge01], b - a);
    }

    #[test]
    fn twisted_coboundary_squares_to_zero() {
        // nontrivial Z/4 system on the interval still gives d*d* = 0
        let d1 = standard_simplex(1, 3);
        let z4 = FinAb::cyclic(4);
        let edge = (0..d1.card(1))
            .map(|i| {
                if d1.is_degenerate(SimplexRef::new(1, i)) {
                    z4.identity_table()
                } else {
                    z4.negation_table()
                }
            })
            .collect();
        let sys = LocalSystem::new(z4.clone(), edge, &d1).unwrap();
        for v0 in 0..4u64 {
            for v1 in 0..4u64 {
                let c = Cochain { degree: 0, values: vec![v0, v1] };
                let dc = coboundary(&c, &sys, &d1).unwrap();
                let ddc = coboundary(&dc, &sys, &d1).unwrap();
                assert!(ddc.is_zero());
            }
        }
    }

    #[test]
    fn incompatible_system_is_rejected() {
        // on Delta[2] the three edges must compose; negation on exactly one
        // nondegenerate edge breaks tau* = rho* . sigma*
        let d2 = standard_simplex(2, 2);
        let z4 = FinAb::cyclic(4);
        let bad_edge = MonotoneMap::new(vec![0, 2], 2).unwrap().lex_rank();
        let edge: Vec<Vec<u64>> = (0..d2.card(1))
            .map(|i| if i == bad_edge { z4.negation_table() } else { z4.identity_table() })
            .collect();
        assert!(matches!(
            LocalSystem::new(z4, edge, &d2),
            Err(Error::LocalSystemIncompatible { .. })
        ));
    }

    #[test]
    fn chain_boundary_squares_to_zero() {
        let d3 = standard_simplex(3, 3);
        let mut x = Chain::zero(3);
        x.insert(iota(3).index, rat(2));
        x.insert(0, rat(-3));
        let dd = x.boundary(&d3).boundary(&d3);
        assert!(dd.is_zero());
    }

    #[test]
    fn l1_norm_of_formal_sum() {
        let mut x = Chain::zero(1);
        x.insert(0, rat(2));
        x.insert(1, rat(-3));
        assert_eq!(x.l1_norm(), rat(5));
        x.insert(1, rat(3));
        assert_eq!(x.terms.len(), 1);
    }

    #[test]
    fn boundary_norm_bound() {
        let d3 = standard_simplex(3, 3);
        for idx in 0..d3.card(2) {
            let x = Chain::single(2, idx);
            assert!(x.boundary(&d3).l1_norm() <= rat(3) * x.l1_norm());
        }
    }

    #[test]
    fn prism_is_a_chain_homotopy() {
        // homotopy on Delta[2] from the identity to the constant-at-0 map,
        // induced by the poset natural transformation min(v, 0) ... use the
        // interval contraction: H(theta, psi) = theta*psi pointwise min
        let cap = 3;
        let d2 = Arc::new(standard_simplex(2, cap));
        let (prod, _, _) = product(&d2, &Arc::new(standard_simplex(1, cap)));
        let levels: Vec<Vec<usize>> = (0..=cap)
            .map(|q| {
                let thetas = MonotoneMap::enumerate(q, 2);
                let psis = MonotoneMap::enumerate(q, 1);
                let mut level = Vec::new();
                for t in &thetas {
                    for p in &psis {
                        let vals: Vec<usize> =
                            (0..=q).map(|j| if p.apply(j) == 0 { 0 } else { t.apply(j) }).collect();
                        level.push(MonotoneMap::new(vals, 2).unwrap().lex_rank());
                    }
                }
                level
            })
            .collect();
        let h = SimplicialMap::new(prod, d2.clone(), levels).unwrap();
        let prism = Prism::new(&h);
        // end 0 is the constant map, end 1 the identity; check
        // dP + Pd = (end1) - (end0) on chains of each simplex
        for m in 1..=2usize {
            for idx in 0..d2.card(m) {
                let s = SimplexRef::new(m, idx);
                let p = prism.apply(&d2, s);
                let dp = p.boundary(&d2);
                let pd = {
                    let mut acc = Chain::zero(m);
                    let single = Chain::single(m, idx);
                    for (&i, coeff) in &single.boundary(&d2).terms {
                        let part = prism.apply(&d2, SimplexRef::new(m - 1, i));
                        for (&j, c2) in &part.terms {
                            acc.insert(j, coeff * c2);
                        }
                    }
                    acc
                };
                let mut rhs = Chain::zero(m);
                rhs.insert(idx, BigRational::one()); // end 1 = identity
                // end 0 = constant at vertex 0: the degenerate simplex
                let theta0 = MonotoneMap::new(vec![0; m + 1], 2).unwrap();
                rhs.insert(theta0.lex_rank(), -BigRational::one());
                assert_eq!(dp.add(&pd), rhs, "at dim {m} idx {idx}");
            }
        }
    }

    #[test]
    fn group_average_trivial_group() {
        let d2 = Arc::new(standard_simplex(2, 2));
        let c = QCochain { degree: 1, values: (0..d2.card(1)).map(|i| rat(i as i64)).collect() };
        let g = FiniteGroup::trivial();
        let out = finite_group_average(&d2, &c, &g, &[SimplicialMap::identity(d2.clone())], None).unwrap();
        assert_eq!(out.gamma, c);
    }
}
