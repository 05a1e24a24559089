//! The unraveling machinery: chains on products with the Delta-set of
//! finite subsets of the naturals, the recursive chains whose boundaries
//! telescope, averaging operators on stabilizing functions, and the cochain
//! homotopy between the identity and pullback-after-averaging.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gamma::{delete_entry, GammaTrunc};
use crate::generate::delta_product;
use crate::monotone::MonotoneMap;
use crate::smap::DeltaMap;
use crate::sset::{FiniteDeltaSet, FiniteSimplicialSet, SimplexRef};

/// The unraveling of a simplicial set: the dimension-wise product of its
/// underlying Delta-set with a Gamma truncation, plus the projection.
pub fn unravel(
    k: &FiniteSimplicialSet,
    vertex_cap: u32,
) -> Result<(Arc<FiniteDeltaSet>, DeltaMap)> {
    let gamma = GammaTrunc::new(vertex_cap, k.dim_cap())?;
    let kd = Arc::new(k.delta_set());
    let gd = Arc::new(gamma.delta_set());
    let (prod, pr_k, _) = delta_product(&kd, &gd);
    Ok((prod, pr_k))
}

/// A chain on `Delta[r] x Gamma`: terms are pairs of a nondecreasing value
/// tuple (the simplex of the standard set) and a strictly increasing tuple
/// of naturals. No vertex cap: apexes grow as the recursion needs them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaGammaChain {
    pub degree: usize,
    pub terms: BTreeMap<(Vec<u8>, Vec<u32>), BigRational>,
}

impl DeltaGammaChain {
    pub fn zero(degree: usize) -> Self {
        DeltaGammaChain { degree, terms: BTreeMap::new() }
    }

    pub fn insert(&mut self, theta: Vec<u8>, gamma: Vec<u32>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(theta.len(), self.degree + 1);
        debug_assert_eq!(gamma.len(), self.degree + 1);
        let key = (theta, gamma);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &DeltaGammaChain) -> DeltaGammaChain {
        let mut out = self.clone();
        for ((t, g), c) in &other.terms {
            out.insert(t.clone(), g.clone(), c.clone());
        }
        out
    }

    pub fn negate(&self) -> DeltaGammaChain {
        DeltaGammaChain {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1_norm(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn boundary(&self) -> DeltaGammaChain {
        let mut out = DeltaGammaChain::zero(self.degree - 1);
        for ((theta, gamma), coeff) in &self.terms {
            for i in 0..=self.degree {
                let mut t = theta.clone();
                t.remove(i);
                let g = delete_entry(gamma, i);
                let signed = if i % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                out.insert(t, g, signed);
            }
        }
        out
    }

    /// Push forward along `delta_i x id`: apply the coface to every value
    /// of the first coordinate.
    pub fn coface_pushforward(&self, i: u8) -> DeltaGammaChain {
        DeltaGammaChain {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|((theta, gamma), c)| {
                    let t: Vec<u8> =
                        theta.iter().map(|&v| if v < i { v } else { v + 1 }).collect();
                    ((t, gamma.clone()), c.clone())
                })
                .collect(),
        }
    }

    /// Cone with the apex appended as the last vertex. The first coordinate
    /// of the apex must dominate every first-coordinate entry, and the
    /// second must be strictly larger than every vertex of the chain.
    pub fn cone(&self, apex_theta: u8, apex_gamma: u32) -> Result<DeltaGammaChain> {
        let mut out = DeltaGammaChain::zero(self.degree + 1);
        for ((theta, gamma), coeff) in &self.terms {
            if *theta.last().unwrap() > apex_theta {
                return Err(Error::BadApex {
                    detail: format!("first coordinate {apex_theta} below {theta:?}"),
                });
            }
            if *gamma.last().unwrap() >= apex_gamma {
                return Err(Error::BadApex {
                    detail: format!("vertex {apex_gamma} not strictly above {gamma:?}"),
                });
            }
            let mut t = theta.clone();
            t.push(apex_theta);
            let mut g = gamma.clone();
            g.push(apex_gamma);
            out.insert(t, g, coeff.clone());
        }
        Ok(out)
    }
}

/// The norm budget of the recursive chains, as pinned for the suites:
/// `B(0) = 2`, `B(n) = 2 + 2(n+1) B(n-1)`.
pub fn cn_norm_budget(n: usize) -> BigRational {
    let mut b = BigRational::from_integer(2.into());
    for m in 1..=n {
        b = BigRational::from_integer(2.into())
            + BigRational::from_integer((2 * (m + 1)).into()) * b;
    }
    b
}

/// Memo table for the recursive chains, keyed by the two vertex tuples.
#[derive(Default)]
pub struct CnTable {
    memo: HashMap<(usize, Vec<u32>, Vec<u32>), DeltaGammaChain>,
    /// observed norms per level, for reporting
    pub observed_norms: BTreeMap<usize, BigRational>,
}

impl CnTable {
    pub fn new() -> Self {
        CnTable::default()
    }

    /// The chain `c_n(tau, tau')` on `Delta[n] x Gamma` whose boundary
    /// telescopes: it equals `(iota_n, tau) - (iota_n, tau')` minus the
    /// alternating sum of cofaces of the lower chains.
    pub fn build(&mut self, n: usize, tau: &[u32], tau2: &[u32]) -> Result<DeltaGammaChain> {
        assert_eq!(tau.len(), n + 1);
        assert_eq!(tau2.len(), n + 1);
        let key = (n, tau.to_vec(), tau2.to_vec());
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let iota: Vec<u8> = (0..=n as u8).collect();
        let mut rhs = DeltaGammaChain::zero(n);
        rhs.insert(iota.clone(), tau.to_vec(), BigRational::one());
        rhs.insert(iota, tau2.to_vec(), -BigRational::one());
        if n > 0 {
            for i in 0..=n {
                let sub = self.build(n - 1, &delete_entry(tau, i), &delete_entry(tau2, i))?;
                let pushed = sub.coface_pushforward(i as u8);
                let signed = if i % 2 == 0 { pushed.negate() } else { pushed };
                rhs = rhs.add(&signed);
            }
        }
        // the right hand side must be a cycle before coning
        if n > 0 && !rhs.boundary().is_zero() {
            return Err(Error::IdentityViolated {
                relation: "telescoped right hand side is not a cycle".into(),
                dim: n,
                index: 0,
            });
        }
        let chain = if rhs.is_zero() {
            DeltaGammaChain::zero(n + 1)
        } else {
            let apex = 1 + rhs
                .terms
                .keys()
                .map(|(_, g)| *g.last().unwrap())
                .max()
                .unwrap();
            let cone = rhs.cone(n as u8, apex)?;
            // the apex-last convention flips the boundary sign
            if (n + 1) % 2 == 0 {
                cone
            } else {
                cone.negate()
            }
        };
        // boundary identity, term by term
        if chain.boundary() != rhs {
            return Err(Error::IdentityViolated {
                relation: "cn boundary identity".into(),
                dim: n,
                index: 0,
            });
        }
        let norm = chain.l1_norm();
        assert!(norm <= cn_norm_budget(n), "norm budget exceeded at level {n}");
        let slot = self.observed_norms.entry(n).or_insert_with(BigRational::zero);
        if norm > *slot {
            *slot = norm;
        }
        self.memo.insert(key, chain.clone());
        Ok(chain)
    }
}

/// A chain on `K x Gamma`: terms pair a simplex index of `K` with a
/// strictly increasing tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnravelChain {
    pub degree: usize,
    pub terms: BTreeMap<(usize, Vec<u32>), BigRational>,
}

impl UnravelChain {
    pub fn zero(degree: usize) -> Self {
        UnravelChain { degree, terms: BTreeMap::new() }
    }

    pub fn insert(&mut self, idx: usize, gamma: Vec<u32>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let key = (idx, gamma);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &UnravelChain) -> UnravelChain {
        let mut out = self.clone();
        for ((i, g), c) in &other.terms {
            out.insert(*i, g.clone(), c.clone());
        }
        out
    }

    pub fn negate(&self) -> UnravelChain {
        UnravelChain {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1_norm(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn boundary(&self, k: &FiniteSimplicialSet) -> UnravelChain {
        let mut out = UnravelChain::zero(self.degree - 1);
        for ((idx, gamma), coeff) in &self.terms {
            for i in 0..=self.degree {
                let f = k.face(i, SimplexRef::new(self.degree, *idx)).index;
                let g = delete_entry(gamma, i);
                let signed = if i % 2 == 0 { coeff.clone() } else { -coeff.clone() };
                out.insert(f, g, signed);
            }
        }
        out
    }
}

/// `k_n(sigma, tau, tau')`: the image of `c_n(tau, tau')` under the
/// characteristic map of `sigma` times the identity.
pub fn build_kn(
    k: &FiniteSimplicialSet,
    table: &mut CnTable,
    sigma: SimplexRef,
    tau: &[u32],
    tau2: &[u32],
) -> Result<UnravelChain> {
    let n = sigma.dim;
    let cn = table.build(n, tau, tau2)?;
    let mut out = UnravelChain::zero(n + 1);
    for ((theta, gamma), coeff) in &cn.terms {
        let m = MonotoneMap::new(theta.iter().map(|&v| v as usize).collect(), n)?;
        let img = k.structure_map(&m, sigma)?;
        out.insert(img.index, gamma.clone(), coeff.clone());
    }
    Ok(out)
}

/// A bounded function on strictly increasing tuples of naturals that is
/// eventually constant in each variable, uniformly beyond a threshold:
/// its value depends only on the entries clamped at the threshold. The
/// stored table covers the clamped domain completely. On this subspace the
/// iterated-limit averaging operator is forced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizingFunction {
    arity: usize,
    threshold: u32,
    table: BTreeMap<Vec<u32>, BigRational>,
}

fn clamp_tuple(t: &[u32], threshold: u32) -> Vec<u32> {
    t.iter().map(|&v| v.min(threshold)).collect()
}

/// Concrete strictly increasing representative of a clamped tuple.
fn representative(clamped: &[u32], threshold: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(clamped.len());
    let mut bump = 0;
    for &v in clamped {
        if v < threshold {
            out.push(v);
        } else {
            out.push(threshold + bump);
            bump += 1;
        }
    }
    out
}

/// All clamped tuples of the given arity: strictly increasing below the
/// threshold, with the threshold allowed to repeat at the tail.
fn clamp_domain(arity: usize, threshold: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for below in 0..=arity {
        if below > threshold as usize {
            continue;
        }
        if below == 0 {
            out.push(vec![threshold; arity]);
            continue;
        }
        for head in MonotoneMap::enumerate_injections(below - 1, threshold as usize - 1) {
            let mut t: Vec<u32> = head.values().iter().map(|&v| v as u32).collect();
            t.extend(std::iter::repeat(threshold).take(arity - below));
            out.push(t);
        }
    }
    out.sort();
    out
}

impl StabilizingFunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn constant(arity: usize, value: BigRational) -> Self {
        let mut table = BTreeMap::new();
        for t in clamp_domain(arity, 0) {
            table.insert(t, value.clone());
        }
        StabilizingFunction { arity, threshold: 0, table }
    }

    /// Sample a function on a window and verify the claimed threshold: any
    /// two strictly increasing tuples in the window with equal clamps must
    /// agree. The window must leave the verification room to vary entries
    /// above the threshold.
    pub fn from_fn(
        arity: usize,
        threshold: u32,
        window: u32,
        f: &mut impl FnMut(&[u32]) -> Result<BigRational>,
    ) -> Result<Self> {
        assert!(
            window >= threshold + arity as u32 + 1,
            "window too small to verify the threshold"
        );
        let mut table = BTreeMap::new();
        for clamped in clamp_domain(arity, threshold) {
            let rep = representative(&clamped, threshold);
            table.insert(clamped, f(&rep)?);
        }
        let out = StabilizingFunction { arity, threshold, table };
        if arity > 0 {
            for probe in MonotoneMap::enumerate_injections(arity - 1, window as usize - 1) {
                let t: Vec<u32> = probe.values().iter().map(|&v| v as u32).collect();
                let got = f(&t)?;
                if got != out.eval(&t) {
                    let rep = representative(&clamp_tuple(&t, threshold), threshold);
                    return Err(Error::NotStabilizing { lhs: t, rhs: rep });
                }
            }
        }
        Ok(out)
    }

    pub fn eval(&self, t: &[u32]) -> BigRational {
        assert_eq!(t.len(), self.arity);
        self.table[&clamp_tuple(t, self.threshold)].clone()
    }

    /// Re-express at a larger threshold; exact.
    pub fn lift(&self, threshold: u32) -> StabilizingFunction {
        assert!(threshold >= self.threshold);
        let table = clamp_domain(self.arity, threshold)
            .into_iter()
            .map(|c| {
                let rep = representative(&c, threshold);
                let v = self.eval(&rep);
                (c, v)
            })
            .collect();
        StabilizingFunction { arity: self.arity, threshold, table }
    }

    pub fn add(&self, other: &StabilizingFunction) -> StabilizingFunction {
        assert_eq!(self.arity, other.arity);
        let t = self.threshold.max(other.threshold);
        let table = clamp_domain(self.arity, t)
            .into_iter()
            .map(|c| {
                let rep = representative(&c, t);
                (c, self.eval(&rep) + other.eval(&rep))
            })
            .collect();
        StabilizingFunction { arity: self.arity, threshold: t, table }
    }

    pub fn scale(&self, by: &BigRational) -> StabilizingFunction {
        StabilizingFunction {
            arity: self.arity,
            threshold: self.threshold,
            table: self.table.iter().map(|(k, v)| (k.clone(), v * by)).collect(),
        }
    }

    /// Precompose with the face that deletes entry `i`: the adjoint of the
    /// i-th face operator, one more variable, same threshold.
    pub fn precompose_delete(&self, i: usize) -> StabilizingFunction {
        let arity = self.arity + 1;
        let table = clamp_domain(arity, self.threshold)
            .into_iter()
            .map(|c| {
                let rep = representative(&c, self.threshold);
                (c, self.eval(&delete_entry(&rep, i)))
            })
            .collect();
        StabilizingFunction { arity, threshold: self.threshold, table }
    }

    /// The iterated eventual value: every shift-invariant norm-one mean
    /// agrees with it on this class.
    pub fn average(&self) -> BigRational {
        if self.arity == 0 {
            return self.table.values().next().cloned().unwrap_or_else(BigRational::zero);
        }
        let rep: Vec<u32> = (0..self.arity as u32).map(|j| self.threshold + j).collect();
        self.eval(&rep)
    }

    pub fn sup_norm(&self) -> BigRational {
        self.table.values().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn equals(&self, other: &StabilizingFunction) -> bool {
        if self.arity != other.arity {
            return false;
        }
        let t = self.threshold.max(other.threshold);
        clamp_domain(self.arity, t).into_iter().all(|c| {
            let rep = representative(&c, t);
            self.eval(&rep) == other.eval(&rep)
        })
    }
}

/// A bounded cochain on `K x Gamma`, stored as one stabilizing fiber
/// function per simplex of `K` in the given degree.
#[derive(Clone, Debug)]
pub struct UnravelCochain {
    pub degree: usize,
    pub fibers: Vec<StabilizingFunction>,
}

impl UnravelCochain {
    pub fn eval(&self, idx: usize, gamma: &[u32]) -> BigRational {
        self.fibers[idx].eval(gamma)
    }

    pub fn eval_on_chain(&self, x: &UnravelChain) -> BigRational {
        assert_eq!(self.degree, x.degree);
        x.terms
            .iter()
            .map(|((idx, gamma), coeff)| coeff * self.eval(*idx, gamma))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn sup_norm(&self) -> BigRational {
        self.fibers.iter().map(|f| f.sup_norm()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &UnravelCochain) -> UnravelCochain {
        UnravelCochain {
            degree: self.degree,
            fibers: self.fibers.iter().zip(&other.fibers).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &UnravelCochain) -> UnravelCochain {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, by: &BigRational) -> UnravelCochain {
        UnravelCochain { degree: self.degree, fibers: self.fibers.iter().map(|f| f.scale(by)).collect() }
    }

    pub fn equals(&self, other: &UnravelCochain) -> bool {
        self.degree == other.degree
            && self.fibers.len() == other.fibers.len()
            && self.fibers.iter().zip(&other.fibers).all(|(a, b)| a.equals(b))
    }

    /// Alternating face sum on the product, computed exactly fiberwise.
    pub fn coboundary(&self, k: &FiniteSimplicialSet) -> Result<UnravelCochain> {
        let n = self.degree;
        if n + 1 > k.dim_cap() {
            return Err(Error::CapExceeded { needed: n + 1, cap: k.dim_cap() });
        }
        let fibers = (0..k.card(n + 1))
            .map(|idx| {
                let s = SimplexRef::new(n + 1, idx);
                let mut acc: Option<StabilizingFunction> = None;
                for i in 0..=n + 1 {
                    let face = k.face(i, s).index;
                    let term = self.fibers[face].precompose_delete(i);
                    let term = if i % 2 == 1 { term.scale(&-BigRational::one()) } else { term };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term),
                    });
                }
                acc.expect("n + 2 >= 1 faces")
            })
            .collect();
        Ok(UnravelCochain { degree: n + 1, fibers })
    }
}

/// Averaging per fiber: the cochain on `K` whose value at a simplex is the
/// iterated eventual value of the fiber function.
pub fn m_star(c: &UnravelCochain) -> crate::cochain::QCochain {
    crate::cochain::QCochain {
        degree: c.degree,
        values: c.fibers.iter().map(|f| f.average()).collect(),
    }
}

/// Pullback along the projection: constant fiber functions.
pub fn p_star(g: &crate::cochain::QCochain, degree_arity: usize) -> UnravelCochain {
    UnravelCochain {
        degree: g.degree,
        fibers: g
            .values
            .iter()
            .map(|v| StabilizingFunction::constant(degree_arity, v.clone()))
            .collect(),
    }
}

/// The cochain homotopy: `h(f)(sigma, tau)` averages, over the second
/// tuple, the evaluation of `f` on the pushed recursive chain. Thresholds
/// are detected with verified windows; a failure to stabilize is an error.
pub fn homotopy_h(
    k: &FiniteSimplicialSet,
    table: &mut CnTable,
    f: &UnravelCochain,
) -> Result<UnravelCochain> {
    let n = f.degree;
    assert!(n >= 1, "the homotopy lowers degree");
    let out_degree = n - 1;
    let arity = out_degree + 1;
    let t_f = f.fibers.iter().map(|x| x.threshold()).max().unwrap_or(0);
    let fibers = (0..k.card(out_degree))
        .map(|idx| {
            let sigma = SimplexRef::new(out_degree, idx);
            let t_out = t_f + arity as u32 + 2;
            let window_out = t_out + arity as u32 + 2;
            StabilizingFunction::from_fn(arity, t_out, window_out, &mut |tau: &[u32]| {
                let t_in = (t_f + arity as u32 + 2).max(tau.iter().copied().max().unwrap_or(0) + 1);
                let window_in = t_in + arity as u32 + 2;
                let inner =
                    StabilizingFunction::from_fn(arity, t_in, window_in, &mut |tau2: &[u32]| {
                        let kn = build_kn(k, table, sigma, tau, tau2)?;
                        Ok(f.eval_on_chain(&kn))
                    })?;
                Ok(inner.average())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnravelCochain { degree: out_degree, fibers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::rat;
    use crate::generate::standard_simplex;

    #[test]
    fn unravel_cardinalities() {
        let d1 = standard_simplex(1, 2);
        let (u, pr) = unravel(&d1, 6).unwrap();
        // |K_n| * C(M, n+1)
        assert_eq!(u.card(0), 2 * 6);
        assert_eq!(u.card(1), 3 * 15);
        assert_eq!(u.card(2), 4 * 20);
        let s = SimplexRef::new(1, 7);
        // projection commutes with faces by DeltaMap validation
        let _ = pr.apply(s);
    }

    #[test]
    fn c0_norm_and_boundary() {
        let mut table = CnTable::new();
        let c = table.build(0, &[3], &[5]).unwrap();
        assert!(c.l1_norm() <= rat(2));
        let b = c.boundary();
        let mut expect = DeltaGammaChain::zero(0);
        expect.insert(vec![0], vec![3], rat(1));
        expect.insert(vec![0], vec![5], rat(-1));
        assert_eq!(b, expect);
    }

    #[test]
    fn c0_equal_arguments_gives_boundary_zero() {
        let mut table = CnTable::new();
        let c = table.build(0, &[4], &[4]).unwrap();
        assert!(c.is_zero() || c.boundary().is_zero());
    }

    #[test]
    fn cn_boundary_identity_small() {
        let mut table = CnTable::new();
        for (tau, tau2) in [(vec![0u32, 2], vec![1u32, 3]), (vec![0, 1], vec![0, 1]), (vec![2, 5], vec![0, 7])] {
            let c = table.build(1, &tau, &tau2).unwrap();
            let mut rhs = DeltaGammaChain::zero(1);
            rhs.insert(vec![0, 1], tau.clone(), rat(1));
            rhs.insert(vec![0, 1], tau2.clone(), rat(-1));
            for i in 0..=1usize {
                let sub = table.build(0, &delete_entry(&tau, i), &delete_entry(&tau2, i)).unwrap();
                let pushed = sub.coface_pushforward(i as u8);
                rhs = rhs.add(&if i % 2 == 0 { pushed.negate() } else { pushed });
            }
            assert_eq!(c.boundary(), rhs);
            assert!(c.l1_norm() <= cn_norm_budget(1));
        }
    }

    #[test]
    fn kn_matches_cn_on_standard_simplex() {
        // with sigma the top simplex of Delta[n], the characteristic map is
        // the identity and k_n reproduces c_n
        let d2 = standard_simplex(2, 3);
        let iota = crate::generate::iota(2);
        let mut table = CnTable::new();
        let tau = vec![0u32, 2, 4];
        let tau2 = vec![1u32, 3, 5];
        let kn = build_kn(&d2, &mut table, iota, &tau, &tau2).unwrap();
        let cn = table.build(2, &tau, &tau2).unwrap();
        assert_eq!(kn.l1_norm(), cn.l1_norm());
        for ((theta, gamma), coeff) in &cn.terms {
            let m = MonotoneMap::new(theta.iter().map(|&v| v as usize).collect(), 2).unwrap();
            let idx = d2.structure_map(&m, iota).unwrap().index;
            assert_eq!(kn.terms[&(idx, gamma.clone())], *coeff);
        }
    }

    #[test]
    fn special_homotopy_identity() {
        let d1 = standard_simplex(1, 3);
        let mut table = CnTable::new();
        for sigma_idx in 0..d1.card(1) {
            let sigma = SimplexRef::new(1, sigma_idx);
            for tau in [[0u32, 2], [1, 4]] {
                for tau2 in [[0u32, 3], [2, 5]] {
                    let kn = build_kn(&d1, &mut table, sigma, &tau, &tau2).unwrap();
                    let mut rhs = UnravelChain::zero(1);
                    rhs.insert(sigma_idx, tau.to_vec(), rat(1));
                    rhs.insert(sigma_idx, tau2.to_vec(), rat(-1));
                    for i in 0..=1usize {
                        let sub = build_kn(
                            &d1,
                            &mut table,
                            d1.face(i, sigma),
                            &delete_entry(&tau, i),
                            &delete_entry(&tau2, i),
                        )
                        .unwrap();
                        rhs = rhs.add(&if i % 2 == 0 { sub.negate() } else { sub });
                    }
                    assert_eq!(kn.boundary(&d1), rhs);
                }
            }
        }
    }

    #[test]
    fn stabilizing_constant_and_indicator() {
        let c = StabilizingFunction::constant(2, rat(7));
        assert_eq!(c.average(), rat(7));
        // f(k0, k1) = 1 when k0 = 0: iterated limit 0
        let f = StabilizingFunction::from_fn(2, 1, 6, &mut |t| {
            Ok(if t[0] == 0 { rat(1) } else { rat(0) })
        })
        .unwrap();
        assert_eq!(f.average(), rat(0));
        assert_eq!(f.eval(&[0, 9]), rat(1));
    }

    #[test]
    fn alternating_function_is_rejected() {
        let err = StabilizingFunction::from_fn(1, 2, 8, &mut |t| {
            Ok(if t[0] % 2 == 0 { rat(1) } else { rat(-1) })
        });
        assert!(matches!(err, Err(Error::NotStabilizing { .. })));
    }

    #[test]
    fn coherence_of_averages() {
        // average(d_i^* f) = average(f) for all i
        let f = StabilizingFunction::from_fn(2, 3, 9, &mut |t| {
            Ok(rat((t[0].min(3) + 2 * t[1].min(3)) as i64))
        })
        .unwrap();
        for i in 0..=2usize {
            assert_eq!(f.precompose_delete(i).average(), f.average());
        }
    }
}

#[cfg(test)]
mod homotopy_tests {
    use super::*;
    use crate::cochain::rat;
    use crate::generate::standard_simplex;

    /// id - p* m* = h . d* + d* . h, checked exactly on clamp classes.
    fn check_identity(k: &FiniteSimplicialSet, f: &UnravelCochain) {
        let mut table = CnTable::new();
        let lhs = f.sub(&p_star(&m_star(f), f.degree + 1));
        let df = f.coboundary(k).unwrap();
        let h_df = homotopy_h(k, &mut table, &df).unwrap();
        let rhs = if f.degree == 0 {
            h_df
        } else {
            let hf = homotopy_h(k, &mut table, f).unwrap();
            h_df.add(&hf.coboundary(k).unwrap())
        };
        assert!(lhs.equals(&rhs), "homotopy identity failed at degree {}", f.degree);
    }

    #[test]
    fn pullback_cochains_satisfy_identity_trivially() {
        let d1 = standard_simplex(1, 3);
        let g = crate::cochain::QCochain {
            degree: 1,
            values: (0..d1.card(1)).map(|i| rat(i as i64 - 1)).collect(),
        };
        let f = p_star(&g, 2);
        assert_eq!(m_star(&f), g);
        check_identity(&d1, &f);
    }

    #[test]
    fn column_supported_cochain_identity_degree_0() {
        let d1 = standard_simplex(1, 2);
        // supported on finitely many columns: zero beyond the threshold
        let fibers: Vec<StabilizingFunction> = (0..d1.card(0))
            .map(|v| {
                StabilizingFunction::from_fn(1, 3, 8, &mut |t| {
                    Ok(if t[0] == 2 && v == 0 { rat(5) } else { rat(0) })
                })
                .unwrap()
            })
            .collect();
        let f = UnravelCochain { degree: 0, fibers };
        check_identity(&d1, &f);
    }

    #[test]
    fn column_supported_cochain_identity_degree_1() {
        let d1 = standard_simplex(1, 3);
        let fibers: Vec<StabilizingFunction> = (0..d1.card(1))
            .map(|e| {
                StabilizingFunction::from_fn(2, 3, 9, &mut |t| {
                    Ok(if t[0] == 0 && e == 1 { rat(1) } else { rat(0) })
                })
                .unwrap()
            })
            .collect();
        let f = UnravelCochain { degree: 1, fibers };
        check_identity(&d1, &f);
    }
}
