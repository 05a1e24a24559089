//! Exact integer linear algebra modulo m: diagonalization by unimodular
//! row and column operations, kernel enumeration, and solving.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub struct Diagonalized {
    /// diagonal entries, length = cols (zero-padded)
    pub diag: Vec<BigInt>,
    /// row transform: diag = U A V
    pub u: Vec<Vec<BigInt>>,
    /// column transform
    pub v: Vec<Vec<BigInt>>,
}

/// Bring an integer matrix to diagonal form `U A V` with unimodular U, V.
pub fn diagonalize(mut s: Vec<Vec<BigInt>>, cols: usize) -> Diagonalized {
    let rows = s.len();
    let mut u: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..rows).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !s[r][c].is_zero()
                    && pivot.map_or(true, |(pr, pc)| s[r][c].abs() < s[pr][pc].abs())
                {
                    pivot = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        s.swap(t, pr);
        u.swap(t, pr);
        if pc != t {
            for row in s.iter_mut() {
                row.swap(t, pc);
            }
            for row in v.iter_mut() {
                row.swap(t, pc);
            }
        }
        let mut clean = true;
        for r in t + 1..rows {
            if !s[r][t].is_zero() {
                let q = &s[r][t] / &s[t][t];
                for c in 0..cols {
                    let sub = &q * &s[t][c];
                    s[r][c] -= sub;
                }
                for c in 0..rows {
                    let sub = &q * &u[t][c];
                    u[r][c] -= sub;
                }
                if !s[r][t].is_zero() {
                    clean = false;
                }
            }
        }
        for c in t + 1..cols {
            if !s[t][c].is_zero() {
                let q = &s[t][c] / &s[t][t];
                for r in 0..rows {
                    let sub = &q * &s[r][t];
                    s[r][c] -= sub;
                }
                for r in 0..cols {
                    let sub = &q * &v[r][t];
                    v[r][c] -= sub;
                }
                if !s[t][c].is_zero() {
                    clean = false;
                }
            }
        }
        if clean {
            t += 1;
        }
    }
    let diag = (0..cols)
        .map(|i| if i < rows { s[i][i].clone() } else { BigInt::zero() })
        .collect();
    Diagonalized { diag, u, v }
}

fn gcd(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

fn residue(x: &BigInt, m: u64) -> u64 {
    let mb = BigInt::from(m);
    u64::try_from(&((x % &mb) + &mb) % &mb).expect("residue fits u64")
}

/// All solutions of `A x = 0 (mod m)`, sorted.
pub fn kernel_mod(a: &[Vec<BigInt>], cols: usize, m: u64) -> Vec<Vec<u64>> {
    if cols == 0 {
        return vec![vec![]];
    }
    let d = diagonalize(a.to_vec(), cols);
    let options: Vec<Vec<u64>> = d
        .diag
        .iter()
        .map(|s| {
            let g = gcd(residue(s, m), m);
            let step = m / g;
            (0..g).map(|k| k * step).collect()
        })
        .collect();
    let mut solutions = Vec::new();
    let mut y = vec![0u64; cols];
    enumerate_products(&options, 0, &mut y, &mut |y| {
        solutions.push(apply_v(&d.v, y, cols, m));
    });
    solutions.sort();
    solutions.dedup();
    solutions
}

/// One solution of `A x = b (mod m)`, if any.
pub fn solve_mod(a: &[Vec<BigInt>], b: &[u64], cols: usize, m: u64) -> Option<Vec<u64>> {
    let rows = a.len();
    if cols == 0 {
        return if b.iter().all(|&x| x % m == 0) { Some(vec![]) } else { None };
    }
    let d = diagonalize(a.to_vec(), cols);
    // rhs in the transformed basis: U b
    let ub: Vec<u64> = (0..rows)
        .map(|r| {
            let mut acc = BigInt::zero();
            for c in 0..rows {
                acc += &d.u[r][c] * BigInt::from(b[c]);
            }
            residue(&acc, m)
        })
        .collect();
    let mut y = vec![0u64; cols];
    for i in 0..cols {
        let s = if i < rows { residue(&d.diag[i], m) } else { 0 };
        let rhs = if i < rows { ub[i] } else { 0 };
        if s == 0 {
            if rhs != 0 {
                return None;
            }
        } else {
            let g = gcd(s, m);
            if rhs % g != 0 {
                return None;
            }
            // solve s y = rhs mod m: divide through by g
            let (s2, r2, m2) = (s / g, rhs / g, m / g);
            let inv = mod_inverse(s2 % m2, m2)?;
            y[i] = (r2 % m2) * inv % m2;
        }
    }
    // rows beyond the diagonal must vanish
    for r in cols.min(rows)..rows {
        if ub[r] % m != 0 {
            return None;
        }
    }
    Some(apply_v(&d.v, &y, cols, m))
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

fn apply_v(v: &[Vec<BigInt>], y: &[u64], cols: usize, m: u64) -> Vec<u64> {
    (0..cols)
        .map(|r| {
            let mut acc = BigInt::zero();
            for c in 0..cols {
                acc += &v[r][c] * BigInt::from(y[c]);
            }
            residue(&acc, m)
        })
        .collect()
}

fn enumerate_products(options: &[Vec<u64>], i: usize, cur: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if i == options.len() {
        f(cur);
        return;
    }
    for &o in &options[i] {
        cur[i] = o;
        enumerate_products(options, i + 1, cur, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn kernel_counts_mod_4() {
        // x + y = 0 mod 4 has 4 solutions
        let a = big(&[&[1, 1]]);
        assert_eq!(kernel_mod(&a, 2, 4).len(), 4);
        // 2x = 0 mod 4 has 2 solutions
        let a = big(&[&[2]]);
        assert_eq!(kernel_mod(&a, 1, 4).len(), 2);
    }

    #[test]
    fn solve_simple_systems() {
        let a = big(&[&[1, 1], &[0, 2]]);
        let x = solve_mod(&a, &[3, 2], 2, 4).unwrap();
        assert_eq!((x[0] + x[1]) % 4, 3);
        assert_eq!(2 * x[1] % 4, 2);
        // unsolvable: 2x = 1 mod 4
        assert!(solve_mod(&big(&[&[2]]), &[1], 1, 4).is_none());
    }

    #[test]
    fn kernel_against_brute_force() {
        let a = big(&[&[1, -1, 1], &[0, 2, 1]]);
        for m in [2u64, 3, 4, 6] {
            let fast = kernel_mod(&a, 3, m);
            let mut slow = Vec::new();
            for x0 in 0..m {
                for x1 in 0..m {
                    for x2 in 0..m {
                        let e1 = (x0 + (m - x1) + x2) % m;
                        let e2 = (2 * x1 + x2) % m;
                        if e1 == 0 && e2 == 0 {
                            slow.push(vec![x0, x1, x2]);
                        }
                    }
                }
            }
            slow.sort();
            assert_eq!(fast, slow, "mod {m}");
        }
    }
}
