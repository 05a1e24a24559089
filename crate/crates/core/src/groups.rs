//! Finite groups by explicit tables, and finite abelian groups as products
//! of cyclic groups with elements addressed by mixed-radix index.

use crate::error::{Error, Result};

/// A finite abelian group `Z/m_1 x ... x Z/m_r`. Elements are canonical
/// indices in `0..order`, little-endian mixed radix over the moduli.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinAb {
    moduli: Vec<u64>,
}

impl FinAb {
    pub fn new(moduli: Vec<u64>) -> Self {
        assert!(moduli.iter().all(|&m| m >= 1));
        FinAb { moduli }
    }

    pub fn cyclic(m: u64) -> Self {
        FinAb::new(vec![m])
    }

    pub fn trivial() -> Self {
        FinAb::new(vec![1])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn decode(&self, mut idx: u64) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&m| {
                let c = idx % m;
                idx /= m;
                c
            })
            .collect()
    }

    pub fn encode(&self, comps: &[u64]) -> u64 {
        let mut idx = 0;
        for (i, &m) in self.moduli.iter().enumerate().rev() {
            idx = idx * m + comps[i] % m;
        }
        idx
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = ca
            .iter()
            .zip(&cb)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let comps: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| (m - x) % m)
            .collect();
        self.encode(&comps)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    /// `k * a` for a signed integer `k`.
    pub fn scale(&self, k: i64, a: u64) -> u64 {
        let comps: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| (((k.rem_euclid(m as i64)) as u64) * x) % m)
            .collect();
        self.encode(&comps)
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }

    pub fn describe(&self) -> String {
        self.moduli
            .iter()
            .map(|m| format!("Z/{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Check that a value table `pi -> pi` is an additive bijection.
    pub fn is_automorphism(&self, table: &[u64]) -> bool {
        let n = self.order() as usize;
        if table.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in table {
            if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        if table[0] != 0 {
            return false;
        }
        for a in 0..n as u64 {
            for b in 0..n as u64 {
                if table[self.add(a, b) as usize] != self.add(table[a as usize], table[b as usize]) {
                    return false;
                }
            }
        }
        true
    }

    /// The inversion automorphism `a -> -a`.
    pub fn negation_table(&self) -> Vec<u64> {
        (0..self.order()).map(|a| self.neg(a)).collect()
    }

    pub fn identity_table(&self) -> Vec<u64> {
        (0..self.order()).collect()
    }
}

/// A finite group given by its multiplication table. The group axioms are
/// verified exhaustively at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    unit: usize,
    inv: Vec<usize>,
    name: String,
}

impl FiniteGroup {
    pub fn from_table(order: usize, mul: Vec<usize>, name: impl Into<String>) -> Result<Self> {
        assert_eq!(mul.len(), order * order);
        let at = |a: usize, b: usize| mul[a * order + b];
        for v in &mul {
            if *v >= order {
                return Err(Error::LawViolated {
                    law: "closure".into(),
                    detail: format!("entry {v} out of range"),
                });
            }
        }
        // locate the unit
        let unit = (0..order)
            .find(|&e| (0..order).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| Error::LawViolated { law: "identity".into(), detail: "no two-sided unit".into() })?;
        // inverses
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            match (0..order).find(|&b| at(a, b) == unit && at(b, a) == unit) {
                Some(b) => inv[a] = b,
                None => {
                    return Err(Error::LawViolated {
                        law: "inverses".into(),
                        detail: format!("element {a} has no inverse"),
                    })
                }
            }
        }
        // associativity on all triples
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::LawViolated {
                            law: "associativity".into(),
                            detail: format!("({a}*{b})*{c} != {a}*({b}*{c})"),
                        });
                    }
                }
            }
        }
        Ok(FiniteGroup { order, mul, unit, inv, name: name.into() })
    }

    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        FiniteGroup::from_table(n, mul, format!("Z/{n}")).unwrap()
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn from_finab(ab: &FinAb) -> Self {
        let n = ab.order() as usize;
        let mul = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| ab.add(a as u64, b as u64) as usize)
            .collect();
        FiniteGroup::from_table(n, mul, ab.describe()).unwrap()
    }

    /// The symmetric group S3 with elements as permutations of 3 points in
    /// lexicographic one-line order: 012, 021, 102, 120, 201, 210.
    /// Product `a * b` is "apply a, then b".
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut mul = Vec::with_capacity(36);
        for a in &perms {
            for b in &perms {
                let c = [b[a[0]], b[a[1]], b[a[2]]];
                mul.push(find(&c));
            }
        }
        FiniteGroup::from_table(6, mul, "S3").unwrap()
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let n = self.order * other.order;
        let enc = |a: usize, b: usize| a * other.order + b;
        let mut mul = vec![0usize; n * n];
        for a1 in 0..self.order {
            for b1 in 0..other.order {
                for a2 in 0..self.order {
                    for b2 in 0..other.order {
                        mul[enc(a1, b1) * n + enc(a2, b2)] = enc(self.mul(a1, a2), other.mul(b1, b2));
                    }
                }
            }
        }
        FiniteGroup::from_table(n, mul, format!("{}x{}", self.name, other.name)).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Check that a subset (as sorted element list) is a normal subgroup.
    pub fn check_normal_subgroup(&self, kappa: &[usize]) -> Result<()> {
        let member = |x: usize| kappa.contains(&x);
        if !member(self.unit) {
            return Err(Error::NotNormalSubgroup);
        }
        for &a in kappa {
            if !member(self.inv(a)) {
                return Err(Error::NotNormalSubgroup);
            }
            for &b in kappa {
                if !member(self.mul(a, b)) {
                    return Err(Error::NotNormalSubgroup);
                }
            }
            for g in 0..self.order {
                if !member(self.mul(self.mul(self.inv(g), a), g)) {
                    return Err(Error::NotNormalSubgroup);
                }
            }
        }
        Ok(())
    }

    /// Quotient by a normal subgroup: returns the quotient group and the
    /// projection table element -> coset index.
    pub fn quotient(&self, kappa: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        self.check_normal_subgroup(kappa)?;
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps: Vec<usize> = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            for &k in kappa {
                coset_of[self.mul(k, g)] = c;
            }
            if coset_of[g] != c {
                return Err(Error::NotNormalSubgroup);
            }
            reps.push(g);
        }
        let n = reps.len();
        let mut mul = vec![0usize; n * n];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                mul[i * n + j] = coset_of[self.mul(a, b)];
            }
        }
        let q = FiniteGroup::from_table(n, mul, format!("{}/k", self.name))?;
        Ok((q, coset_of))
    }

    /// Verify a map table is a homomorphism into `other`.
    pub fn check_homomorphism(&self, other: &FiniteGroup, table: &[usize]) -> Result<()> {
        if table.len() != self.order {
            return Err(Error::NotAHomomorphism { detail: "table size mismatch".into() });
        }
        for a in 0..self.order {
            for b in 0..self.order {
                if table[self.mul(a, b)] != other.mul(table[a], table[b]) {
                    return Err(Error::NotAHomomorphism {
                        detail: format!("f({a}*{b}) != f({a})*f({b})"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A group homomorphism `source -> target` given by its value table,
/// verified at construction.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub table: Vec<u64>,
}

impl GroupHom {
    pub fn new(source: &FinAb, target: &FinAb, table: Vec<u64>) -> Result<Self> {
        if table.len() != source.order() as usize || table[0] != 0 {
            return Err(Error::NotAHomomorphism { detail: "bad table shape".into() });
        }
        for a in source.elements() {
            for b in source.elements() {
                let lhs = table[source.add(a, b) as usize];
                let rhs = target.add(table[a as usize], table[b as usize]);
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism {
                        detail: format!("f({a}+{b}) != f({a})+f({b})"),
                    });
                }
            }
        }
        Ok(GroupHom { table })
    }

    pub fn apply(&self, a: u64) -> u64 {
        self.table[a as usize]
    }

    pub fn is_iso(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table.iter().all(|&v| {
            (v as usize) < seen.len() && !std::mem::replace(&mut seen[v as usize], true)
        })
    }

    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        GroupHom { table: first.table.iter().map(|&v| self.table[v as usize]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finab_arithmetic() {
        let g = FinAb::new(vec![2, 2]);
        assert_eq!(g.order(), 4);
        assert_eq!(g.add(1, 1), 0);
        assert_eq!(g.add(1, 2), 3);
        assert_eq!(g.neg(3), 3);
        let z4 = FinAb::cyclic(4);
        assert_eq!(z4.add(3, 2), 1);
        assert_eq!(z4.neg(1), 3);
        assert_eq!(z4.scale(-1, 1), 3);
    }

    #[test]
    fn s3_is_a_nonabelian_group_of_order_6() {
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        for a in 0..6 {
            assert_eq!(s3.mul(a, s3.inv(a)), s3.unit());
        }
    }

    #[test]
    fn quotient_z4_by_2z4() {
        let z4 = FiniteGroup::cyclic(4);
        let (q, proj) = z4.quotient(&[0, 2]).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj[1], proj[3]);
        assert_ne!(proj[0], proj[1]);
        assert!(z4.check_normal_subgroup(&[0, 1]).is_err());
    }

    #[test]
    fn automorphism_detection() {
        let z4 = FinAb::cyclic(4);
        assert!(z4.is_automorphism(&z4.negation_table()));
        assert!(z4.is_automorphism(&z4.identity_table()));
        assert!(!z4.is_automorphism(&[0, 2, 0, 2]));
    }

    #[test]
    fn bad_table_is_rejected() {
        // order-2 table with no unit
        assert!(FiniteGroup::from_table(2, vec![1, 0, 0, 1], "bad").is_ok()); // this IS Z/2 with swapped labels
        assert!(FiniteGroup::from_table(2, vec![0, 0, 0, 0], "bad").is_err());
    }
}
