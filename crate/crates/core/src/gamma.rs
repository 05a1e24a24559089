//! Truncations of the Delta-set of finite subsets of the naturals:
//! n-simplices are strictly increasing tuples `(k_0, ..., k_n)` with
//! entries below a vertex cap, and faces delete entries.

use crate::error::{Error, Result};
use crate::monotone::{binomial, MonotoneMap};
use crate::sset::FiniteDeltaSet;

#[derive(Clone, Debug)]
pub struct GammaTrunc {
    pub vertex_cap: u32,
    pub dim_cap: usize,
}

impl GammaTrunc {
    pub fn new(vertex_cap: u32, dim_cap: usize) -> Result<Self> {
        if (dim_cap as u32) >= vertex_cap {
            return Err(Error::NoVertexHeadroom { cap: vertex_cap, needed: dim_cap as u32 + 1 });
        }
        Ok(GammaTrunc { vertex_cap, dim_cap })
    }

    pub fn card(&self, n: usize) -> usize {
        binomial(self.vertex_cap as usize, n + 1)
    }

    /// All n-simplices in lexicographic order.
    pub fn tuples(&self, n: usize) -> Vec<Vec<u32>> {
        MonotoneMap::enumerate_injections(n, self.vertex_cap as usize - 1)
            .into_iter()
            .map(|t| t.values().iter().map(|&v| v as u32).collect())
            .collect()
    }

    /// Lexicographic rank of a tuple among the n-simplices.
    pub fn rank(&self, tuple: &[u32]) -> usize {
        let m = MonotoneMap::new(
            tuple.iter().map(|&v| v as usize).collect(),
            self.vertex_cap as usize - 1,
        )
        .expect("tuple in range");
        let all = MonotoneMap::enumerate_injections(tuple.len() - 1, self.vertex_cap as usize - 1);
        all.iter().position(|t| *t == m).expect("tuple enumerated")
    }

    /// Materialize as a Delta-set.
    pub fn delta_set(&self) -> FiniteDeltaSet {
        let per_dim: Vec<Vec<Vec<u32>>> = (0..=self.dim_cap).map(|n| self.tuples(n)).collect();
        let cards: Vec<usize> = per_dim.iter().map(|v| v.len()).collect();
        let mut faces = vec![Vec::new()];
        for q in 1..=self.dim_cap {
            let mut per_i = Vec::with_capacity(q + 1);
            for i in 0..=q {
                let table = per_dim[q]
                    .iter()
                    .map(|t| {
                        let mut f = t.clone();
                        f.remove(i);
                        lex_rank_of(&per_dim[q - 1], &f)
                    })
                    .collect();
                per_i.push(table);
            }
            faces.push(per_i);
        }
        FiniteDeltaSet::new(self.dim_cap, cards, faces).expect("Gamma truncation is lawful")
    }
}

fn lex_rank_of(sorted: &[Vec<u32>], t: &[u32]) -> usize {
    sorted.binary_search_by(|probe| probe.as_slice().cmp(t)).expect("face stays in range")
}

pub fn delete_entry(t: &[u32], i: usize) -> Vec<u32> {
    let mut f = t.to_vec();
    f.remove(i);
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities_are_binomials() {
        let g = GammaTrunc::new(5, 3).unwrap();
        assert_eq!(g.card(0), 5);
        assert_eq!(g.card(1), 10);
        assert_eq!(g.card(3), 5);
        let d = g.delta_set();
        assert_eq!(d.card(2), 10);
    }

    #[test]
    fn rank_roundtrip() {
        let g = GammaTrunc::new(6, 2).unwrap();
        for (i, t) in g.tuples(2).iter().enumerate() {
            assert_eq!(g.rank(t), i);
        }
    }

    #[test]
    fn cap_must_leave_room() {
        assert!(GammaTrunc::new(3, 3).is_err());
    }
}
