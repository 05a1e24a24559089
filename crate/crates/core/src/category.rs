//! Small categories by explicit tables, functors, and natural transformations.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

/// A finite category. Morphisms are globally indexed; `hom[a][b]` lists the
/// morphism ids from `a` to `b`. Associativity and the identity laws are
/// checked exhaustively at construction.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    n_objects: usize,
    src: Vec<usize>,
    dst: Vec<usize>,
    hom: Vec<Vec<Vec<usize>>>,
    compose: HashMap<(usize, usize), usize>,
    identity: Vec<usize>,
    name: String,
}

impl FiniteCategory {
    /// `compose_pairs` maps `(g, f)` with `f: a -> b`, `g: b -> c` to `g . f`.
    pub fn new(
        n_objects: usize,
        src: Vec<usize>,
        dst: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
        identity: Vec<usize>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let n_mor = src.len();
        assert_eq!(dst.len(), n_mor);
        assert_eq!(identity.len(), n_objects);
        let mut hom = vec![vec![Vec::new(); n_objects]; n_objects];
        for m in 0..n_mor {
            hom[src[m]][dst[m]].push(m);
        }
        for (a, &e) in identity.iter().enumerate() {
            if src[e] != a || dst[e] != a {
                return Err(Error::LawViolated {
                    law: "identity".into(),
                    detail: format!("id of object {a} has wrong endpoints"),
                });
            }
        }
        let comp = |g: usize, f: usize| -> Result<usize> {
            compose.get(&(g, f)).copied().ok_or_else(|| Error::LawViolated {
                law: "composition".into(),
                detail: format!("missing composite of {g} after {f}"),
            })
        };
        for f in 0..n_mor {
            for g in 0..n_mor {
                if dst[f] == src[g] {
                    let gf = comp(g, f)?;
                    if src[gf] != src[f] || dst[gf] != dst[g] {
                        return Err(Error::LawViolated {
                            law: "composition".into(),
                            detail: format!("composite {gf} has wrong endpoints"),
                        });
                    }
                }
            }
        }
        for f in 0..n_mor {
            if comp(f, identity[src[f]])? != f || comp(identity[dst[f]], f)? != f {
                return Err(Error::LawViolated {
                    law: "identity".into(),
                    detail: format!("identity law fails at morphism {f}"),
                });
            }
        }
        for f in 0..n_mor {
            for g in 0..n_mor {
                for h in 0..n_mor {
                    if dst[f] == src[g] && dst[g] == src[h] {
                        let lhs = comp(h, comp(g, f)?)?;
                        let rhs = comp(comp(h, g)?, f)?;
                        if lhs != rhs {
                            return Err(Error::LawViolated {
                                law: "associativity".into(),
                                detail: format!("(h.g).f != h.(g.f) at ({h},{g},{f})"),
                            });
                        }
                    }
                }
            }
        }
        Ok(FiniteCategory { n_objects, src, dst, hom, compose, identity, name: name.into() })
    }

    /// The one-object category of a group; morphism ids are group elements.
    pub fn from_group(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut compose = HashMap::new();
        for f in 0..n {
            for h in 0..n {
                // h after f, i.e. traverse f then h: the group product f*h
                compose.insert((h, f), g.mul(f, h));
            }
        }
        FiniteCategory::new(
            1,
            vec![0; n],
            vec![0; n],
            compose,
            vec![g.unit()],
            format!("B{}", g.name()),
        )
        .expect("groups are categories")
    }

    /// The poset category `[n]`.
    pub fn poset(n: usize) -> Self {
        let mut src = Vec::new();
        let mut dst = Vec::new();
        let mut id_of = vec![0usize; n + 1];
        let mut mor_of = HashMap::new();
        for a in 0..=n {
            for b in a..=n {
                mor_of.insert((a, b), src.len());
                if a == b {
                    id_of[a] = src.len();
                }
                src.push(a);
                dst.push(b);
            }
        }
        let mut compose = HashMap::new();
        for (&(a, b), &f) in &mor_of {
            for (&(b2, c), &g) in &mor_of {
                if b == b2 {
                    compose.insert((g, f), mor_of[&(a, c)]);
                }
            }
        }
        FiniteCategory::new(n + 1, src, dst, compose, id_of, format!("[{n}]")).unwrap()
    }

    pub fn trivial() -> Self {
        FiniteCategory::poset(0)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, m: usize) -> usize {
        self.src[m]
    }

    pub fn dst(&self, m: usize) -> usize {
        self.dst[m]
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a][b]
    }

    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.compose[&(g, f)]
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identity[a]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.src[m]] == m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Product category; objects and morphisms are pairs, lexicographically
    /// encoded.
    pub fn product(&self, other: &FiniteCategory) -> FiniteCategory {
        let no = self.n_objects * other.n_objects;
        let enc_ob = |a: usize, b: usize| a * other.n_objects + b;
        let nm2 = other.n_morphisms();
        let enc_mor = |f: usize, g: usize| f * nm2 + g;
        let mut src = Vec::with_capacity(self.n_morphisms() * nm2);
        let mut dst = Vec::with_capacity(self.n_morphisms() * nm2);
        for f in 0..self.n_morphisms() {
            for g in 0..nm2 {
                src.push(enc_ob(self.src[f], other.src[g]));
                dst.push(enc_ob(self.dst[f], other.dst[g]));
            }
        }
        let mut compose = HashMap::new();
        for (&(h1, f1), &c1) in &self.compose {
            for (&(h2, f2), &c2) in &other.compose {
                compose.insert((enc_mor(h1, h2), enc_mor(f1, f2)), enc_mor(c1, c2));
            }
        }
        let identity = (0..no)
            .map(|o| enc_mor(self.identity[o / other.n_objects], other.identity[o % other.n_objects]))
            .collect();
        FiniteCategory::new(no, src, dst, compose, identity, format!("{}x{}", self.name, other.name))
            .expect("product of categories is a category")
    }
}

/// A functor between finite categories, validated eagerly.
#[derive(Clone, Debug)]
pub struct Functor {
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
}

impl Functor {
    pub fn new(
        source: &FiniteCategory,
        target: &FiniteCategory,
        on_objects: Vec<usize>,
        on_morphisms: Vec<usize>,
    ) -> Result<Self> {
        assert_eq!(on_objects.len(), source.n_objects());
        assert_eq!(on_morphisms.len(), source.n_morphisms());
        for m in 0..source.n_morphisms() {
            let fm = on_morphisms[m];
            if target.src(fm) != on_objects[source.src(m)] || target.dst(fm) != on_objects[source.dst(m)] {
                return Err(Error::LawViolated {
                    law: "functor".into(),
                    detail: format!("morphism {m} lands with wrong endpoints"),
                });
            }
        }
        for a in 0..source.n_objects() {
            if on_morphisms[source.identity(a)] != target.identity(on_objects[a]) {
                return Err(Error::LawViolated {
                    law: "functor".into(),
                    detail: format!("identity of {a} not preserved"),
                });
            }
        }
        for f in 0..source.n_morphisms() {
            for g in 0..source.n_morphisms() {
                if source.dst(f) == source.src(g) {
                    let lhs = on_morphisms[source.compose(g, f)];
                    let rhs = target.compose(on_morphisms[g], on_morphisms[f]);
                    if lhs != rhs {
                        return Err(Error::LawViolated {
                            law: "functor".into(),
                            detail: format!("composition not preserved at ({g},{f})"),
                        });
                    }
                }
            }
        }
        Ok(Functor { on_objects, on_morphisms })
    }

    pub fn identity(c: &FiniteCategory) -> Self {
        Functor {
            on_objects: (0..c.n_objects()).collect(),
            on_morphisms: (0..c.n_morphisms()).collect(),
        }
    }
}

/// A natural transformation between two functors `source -> target`,
/// given by its component at every object.
#[derive(Clone, Debug)]
pub struct NatTrans {
    pub components: Vec<usize>,
}

impl NatTrans {
    pub fn new(
        source: &FiniteCategory,
        target: &FiniteCategory,
        f: &Functor,
        g: &Functor,
        components: Vec<usize>,
    ) -> Result<Self> {
        assert_eq!(components.len(), source.n_objects());
        for (a, &t) in components.iter().enumerate() {
            if target.src(t) != f.on_objects[a] || target.dst(t) != g.on_objects[a] {
                return Err(Error::LawViolated {
                    law: "naturality".into(),
                    detail: format!("component at {a} has wrong endpoints"),
                });
            }
        }
        for m in 0..source.n_morphisms() {
            let (a, b) = (source.src(m), source.dst(m));
            let lhs = target.compose(components[b], f.on_morphisms[m]);
            let rhs = target.compose(g.on_morphisms[m], components[a]);
            if lhs != rhs {
                return Err(Error::LawViolated {
                    law: "naturality".into(),
                    detail: format!("square at morphism {m} does not commute"),
                });
            }
        }
        Ok(NatTrans { components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_category_is_lawful() {
        let c = FiniteCategory::poset(2);
        assert_eq!(c.n_objects(), 3);
        assert_eq!(c.n_morphisms(), 6);
        assert_eq!(c.hom(0, 2).len(), 1);
        assert_eq!(c.hom(2, 0).len(), 0);
    }

    #[test]
    fn group_category_composition_order() {
        let s3 = FiniteGroup::symmetric3();
        let c = FiniteCategory::from_group(&s3);
        // traversing f then g composes to the group product f*g
        for f in 0..6 {
            for g in 0..6 {
                assert_eq!(c.compose(g, f), s3.mul(f, g));
            }
        }
    }

    #[test]
    fn conjugation_is_natural() {
        // component h at the single object: naturality forces
        // conj(g) = h^{-1} g h in traversal order
        let s3 = FiniteGroup::symmetric3();
        let c = FiniteCategory::from_group(&s3);
        let h = 3;
        let conj = Functor::new(
            &c,
            &c,
            vec![0],
            (0..6).map(|g| s3.mul(s3.mul(s3.inv(h), g), h)).collect(),
        )
        .unwrap();
        NatTrans::new(&c, &c, &Functor::identity(&c), &conj, vec![h]).unwrap();
    }

    #[test]
    fn product_category() {
        let a = FiniteCategory::poset(1);
        let b = FiniteCategory::from_group(&FiniteGroup::cyclic(2));
        let p = a.product(&b);
        assert_eq!(p.n_objects(), 2);
        assert_eq!(p.n_morphisms(), 6);
    }
}
