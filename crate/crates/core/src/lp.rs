//! Bounded cohomology of finite truncations with exact semi-norms: rational
//! cochain complexes, cohomology bases, and the Chebyshev linear program
//! solved by an exact simplex method with Bland's rule.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cochain::QCochain;
use crate::error::{Error, Result};
use crate::smap::SimplicialMap;
use crate::sset::{FiniteSimplicialSet, SimplexRef};

type Rat = BigRational;

fn zero() -> Rat {
    BigRational::zero()
}

/// The rational cochain complex of a finite truncation. Degenerate
/// simplices participate unless normalized-only mode is chosen; on finite
/// sets every cochain is bounded.
pub struct CochainComplexQ {
    pub normalized_only: bool,
    /// per degree, the simplex indices carrying coordinates
    pub supports: Vec<Vec<usize>>,
    /// coboundary matrices: d[n] maps degree n to degree n+1,
    /// rows indexed by supports[n+1], columns by supports[n]
    pub d: Vec<Vec<Vec<Rat>>>,
}

impl CochainComplexQ {
    pub fn new(k: &FiniteSimplicialSet, normalized_only: bool) -> Self {
        let cap = k.dim_cap();
        let supports: Vec<Vec<usize>> = (0..=cap)
            .map(|q| {
                if normalized_only {
                    k.nondegenerate(q)
                } else {
                    (0..k.card(q)).collect()
                }
            })
            .collect();
        let mut d = Vec::with_capacity(cap);
        for n in 0..cap {
            let col_of: std::collections::HashMap<usize, usize> =
                supports[n].iter().enumerate().map(|(i, &s)| (s, i)).collect();
            let mut mat = vec![vec![zero(); supports[n].len()]; supports[n + 1].len()];
            for (row, &sigma) in supports[n + 1].iter().enumerate() {
                for i in 0..=n + 1 {
                    let f = k.face(i, SimplexRef::new(n + 1, sigma)).index;
                    // in normalized mode the face may be degenerate: the
                    // cochain vanishes there
                    if let Some(&col) = col_of.get(&f) {
                        if i % 2 == 0 {
                            mat[row][col] += Rat::one();
                        } else {
                            mat[row][col] -= Rat::one();
                        }
                    }
                }
            }
            d.push(mat);
        }
        let complex = CochainComplexQ { normalized_only, supports, d };
        complex.check_dd_zero();
        complex
    }

    fn check_dd_zero(&self) {
        for n in 0..self.d.len().saturating_sub(1) {
            let a = &self.d[n];
            let b = &self.d[n + 1];
            for row in 0..b.len() {
                for col in 0..if a.is_empty() { 0 } else { a[0].len() } {
                    let mut acc = zero();
                    for mid in 0..a.len() {
                        acc += &b[row][mid] * &a[mid][col];
                    }
                    assert!(acc.is_zero(), "coboundary does not square to zero");
                }
            }
        }
    }

    pub fn dim(&self, n: usize) -> usize {
        self.supports.get(n).map_or(0, |v| v.len())
    }

    /// Restrict a cochain on the full complex to the stored coordinates.
    pub fn coords(&self, c: &QCochain) -> Vec<Rat> {
        self.supports[c.degree].iter().map(|&s| c.values[s].clone()).collect()
    }
}

fn mat_vec(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).fold(zero(), |s, t| s + t))
        .collect()
}

/// Row-reduce a matrix, returning pivot columns and the reduced rows.
fn row_reduce(mut m: Vec<Vec<Rat>>) -> (Vec<usize>, Vec<Vec<Rat>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        if let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) {
            m.swap(r, p);
            let inv = m[r][c].clone();
            for v in m[r].iter_mut() {
                *v /= &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let factor = m[i][c].clone();
                    for j in 0..cols {
                        let sub = &factor * &m[r][j];
                        m[i][j] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    (pivots, m)
}

/// A basis of the kernel of a matrix.
fn kernel_basis(a: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let (pivots, reduced) = row_reduce(a.to_vec());
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![zero(); cols];
            v[fc] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced[r][fc].clone();
            }
            v
        })
        .collect()
}

fn rank(a: &[Vec<Rat>]) -> usize {
    row_reduce(a.to_vec()).0.len()
}

/// Solve `A x = b` exactly, if possible.
fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (pivots, reduced) = {
        let out = row_reduce(std::mem::take(&mut aug));
        out
    };
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = reduced[r][cols].clone();
    }
    Some(x)
}

pub struct CohomologyBasis {
    pub degree: usize,
    pub betti: usize,
    /// representative cocycles in complex coordinates
    pub representatives: Vec<Vec<Rat>>,
    pub kernel_dim: usize,
    pub image_dim: usize,
}

/// An exact rational basis of degree-n cohomology with representative
/// cocycles.
pub fn cohomology(complex: &CochainComplexQ, n: usize) -> Result<CohomologyBasis> {
    if n + 1 > complex.d.len() {
        return Err(Error::CapExceeded { needed: n + 1, cap: complex.d.len() });
    }
    let cols = complex.dim(n);
    let kernel = if cols == 0 {
        Vec::new()
    } else {
        kernel_basis(&complex.d[n], cols)
    };
    let image_rank = if n == 0 { 0 } else { rank(&complex.d[n - 1]) };
    // extend the image to a basis of the kernel; the added vectors
    // represent cohomology
    let mut span: Vec<Vec<Rat>> = Vec::new();
    if n > 0 {
        let dm = &complex.d[n - 1];
        let prev_cols = complex.dim(n - 1);
        for j in 0..prev_cols {
            let col: Vec<Rat> = (0..cols).map(|r| dm[r][j].clone()).collect();
            span.push(col);
        }
    }
    let base_rank = rank(&transpose(&span, cols));
    assert_eq!(base_rank, image_rank);
    let mut representatives = Vec::new();
    let mut current = span;
    let mut current_rank = image_rank;
    for cand in kernel.iter() {
        current.push(cand.clone());
        let r = rank(&transpose(&current, cols));
        if r > current_rank {
            representatives.push(cand.clone());
            current_rank = r;
        } else {
            current.pop();
        }
    }
    Ok(CohomologyBasis {
        degree: n,
        betti: representatives.len(),
        representatives,
        kernel_dim: kernel.len(),
        image_dim: image_rank,
    })
}

fn transpose(cols_as_rows: &[Vec<Rat>], len: usize) -> Vec<Vec<Rat>> {
    (0..len)
        .map(|i| cols_as_rows.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// An exact optimality certificate for the semi-norm program: the optimal
/// sup norm over the coset, the optimizing primitive, and nonnegative
/// evaluation multipliers proving the bound from below.
pub struct SeminormCertificate {
    pub value: Rat,
    /// the optimizing (n-1)-cochain, in complex coordinates
    pub primitive: Vec<Rat>,
    /// multipliers (alpha, beta) per degree-n coordinate
    pub dual: Vec<(Rat, Rat)>,
    pub normalized_only: bool,
}

impl SeminormCertificate {
    /// Exact feasibility of both sides and equality of objectives.
    pub fn verify(&self, d_matrix: &[Vec<Rat>], z: &[Rat]) -> bool {
        let shifted: Vec<Rat> = if d_matrix.is_empty() {
            z.to_vec()
        } else {
            mat_vec(d_matrix, &self.primitive)
                .iter()
                .zip(z)
                .map(|(a, b)| a + b)
                .collect()
        };
        if shifted.iter().any(|v| v.abs() > self.value) {
            return false;
        }
        // dual: alpha, beta >= 0; sum = 1; D^T(alpha - beta) = 0;
        // sum (alpha - beta) z = value
        let mut total = zero();
        let mut objective = zero();
        for ((a, b), zv) in self.dual.iter().zip(z) {
            if a.is_negative() || b.is_negative() {
                return false;
            }
            total += a + b;
            objective += (a - b) * zv;
        }
        if total != Rat::one() || objective != self.value {
            return false;
        }
        if !d_matrix.is_empty() {
            let cols = d_matrix[0].len();
            for j in 0..cols {
                let mut acc = zero();
                for (row, (a, b)) in self.dual.iter().enumerate() {
                    acc += (a - b) * &d_matrix[row][j];
                }
                if !acc.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Dense exact two-phase simplex with Bland's rule on
/// `min c^T x  s.t.  A x <= b, x >= 0`. Returns the optimum, an optimal
/// point, and equality multipliers per row.
struct SimplexOut {
    value: Rat,
    x: Vec<Rat>,
    row_duals: Vec<Rat>,
}

fn simplex_min(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> SimplexOut {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    // columns: n structural, m slacks, up to m artificials
    let mut neg_row: Vec<bool> = Vec::with_capacity(m);
    let mut art_of_row: Vec<Option<usize>> = vec![None; m];
    let mut n_art = 0;
    for i in 0..m {
        let neg = b[i].is_negative();
        neg_row.push(neg);
        if neg {
            art_of_row[i] = Some(n_art);
            n_art += 1;
        }
    }
    let total = n + m + n_art;
    // tableau rows: [A | I_slack | I_art | rhs], negated where needed
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if neg_row[i] { -Rat::one() } else { Rat::one() };
        let mut row = vec![zero(); total + 1];
        for j in 0..n {
            row[j] = &sign * &a[i][j];
        }
        row[n + i] = sign.clone();
        if let Some(k) = art_of_row[i] {
            row[n + m + k] = Rat::one();
            basis.push(n + m + k);
        } else {
            basis.push(n + i);
        }
        row[total] = &sign * &b[i];
        t.push(row);
    }
    let pivot = |t: &mut Vec<Vec<Rat>>, basis: &mut Vec<usize>, r: usize, col: usize| {
        let inv = t[r][col].clone();
        for v in t[r].iter_mut() {
            *v /= &inv;
        }
        for i in 0..t.len() {
            if i != r && !t[i][col].is_zero() {
                let f = t[i][col].clone();
                for j in 0..t[i].len() {
                    let sub = &f * &t[r][j];
                    t[i][j] -= sub;
                }
            }
        }
        basis[r] = col;
    };
    // generic Bland loop for a given objective (reduced costs recomputed
    // from scratch each iteration: exact arithmetic keeps this honest)
    let run = |t: &mut Vec<Vec<Rat>>, basis: &mut Vec<usize>, obj: &[Rat], allowed: usize| {
        loop {
            // reduced costs r_j = c_j - c_B^T B^{-1} A_j over the tableau
            let cb: Vec<Rat> = basis.iter().map(|&j| obj[j].clone()).collect();
            let mut entering = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let mut rj = obj[j].clone();
                for i in 0..t.len() {
                    rj -= &cb[i] * &t[i][j];
                }
                if rj.is_negative() {
                    entering = Some(j);
                    break; // Bland: smallest index
                }
            }
            let Some(col) = entering else { break };
            // ratio test with Bland tie-break on basis index
            let mut leave: Option<usize> = None;
            let mut best: Option<Rat> = None;
            for i in 0..t.len() {
                if t[i][col].is_positive() {
                    let ratio = &t[i][t[i].len() - 1] / &t[i][col];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let r = leave.expect("objective bounded below on this program");
            pivot(t, basis, r, col);
        }
    };
    if n_art > 0 {
        let mut phase1 = vec![zero(); total];
        for j in n + m..total {
            phase1[j] = Rat::one();
        }
        run(&mut t, &mut basis, &phase1, total);
        // artificials must be out of the solution value
        let infeas: Rat = basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= n + m)
            .map(|(i, _)| t[i][total].clone())
            .fold(zero(), |s, v| s + v);
        assert!(infeas.is_zero(), "program is feasible by construction");
        // drive lingering artificials out of the basis where possible
        for r in 0..m {
            if basis[r] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| !t[r][j].is_zero()) {
                    pivot(&mut t, &mut basis, r, col);
                }
            }
        }
    }
    let mut phase2 = vec![zero(); total];
    phase2[..n].clone_from_slice(c);
    run(&mut t, &mut basis, &phase2, n + m);
    let mut x = vec![zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][total].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).fold(zero(), |s, v| s + v);
    // equality multipliers: pi = c_B^T B^{-1}, read through slack columns
    let cb: Vec<Rat> = basis.iter().map(|&j| phase2[j].clone()).collect();
    let mut row_duals = Vec::with_capacity(m);
    for i in 0..m {
        let mut pi = zero();
        for (r, cbr) in cb.iter().enumerate() {
            pi += cbr * &t[r][n + i];
        }
        // slack column of a negated row entered with sign -1
        if neg_row[i] {
            pi = -pi;
        }
        row_duals.push(pi);
    }
    SimplexOut { value, x, row_duals }
}

/// The Gromov semi-norm of a class: minimize the sup norm of `z + d b`
/// over primitives `b`, exactly, with a verified dual certificate.
pub fn seminorm(
    complex: &CochainComplexQ,
    z: &[Rat],
    n: usize,
) -> Result<SeminormCertificate> {
    // z must be a cocycle
    if n < complex.d.len() {
        let dz = mat_vec(&complex.d[n], z);
        if let Some(bad) = dz.iter().position(|v| !v.is_zero()) {
            return Err(Error::NotACocycle { dim: n + 1, index: bad });
        }
    }
    let d_matrix: Vec<Vec<Rat>> = if n == 0 {
        Vec::new()
    } else {
        complex.d[n - 1].clone()
    };
    let m = complex.dim(n);
    let nb = if n == 0 { 0 } else { complex.dim(n - 1) };
    // variables: b+ (nb), b- (nb), t
    let nv = 2 * nb + 1;
    let mut a = Vec::with_capacity(2 * m);
    let mut rhs = Vec::with_capacity(2 * m);
    for sigma in 0..m {
        let mut row_plus = vec![zero(); nv];
        let mut row_minus = vec![zero(); nv];
        for j in 0..nb {
            row_plus[j] = d_matrix[sigma][j].clone();
            row_plus[nb + j] = -d_matrix[sigma][j].clone();
            row_minus[j] = -d_matrix[sigma][j].clone();
            row_minus[nb + j] = d_matrix[sigma][j].clone();
        }
        row_plus[2 * nb] = -Rat::one();
        row_minus[2 * nb] = -Rat::one();
        a.push(row_plus);
        rhs.push(-z[sigma].clone());
        a.push(row_minus);
        rhs.push(z[sigma].clone());
    }
    let mut c = vec![zero(); nv];
    c[2 * nb] = Rat::one();
    let out = simplex_min(&a, &rhs, &c);
    let primitive: Vec<Rat> = (0..nb).map(|j| &out.x[j] - &out.x[nb + j]).collect();
    // alpha from the plus rows, beta from the minus rows
    let dual: Vec<(Rat, Rat)> = (0..m)
        .map(|sigma| (-out.row_duals[2 * sigma].clone(), -out.row_duals[2 * sigma + 1].clone()))
        .collect();
    let cert = SeminormCertificate {
        value: out.value,
        primitive,
        dual,
        normalized_only: complex.normalized_only,
    };
    if !cert.verify(&d_matrix, z) {
        return Err(Error::LawViolated {
            law: "strong duality".into(),
            detail: "certificate failed exact verification".into(),
        });
    }
    Ok(cert)
}

/// Exhaustive oracle: enumerate basic feasible points of the program in
/// image coordinates and take the minimum objective. Exponential; meant
/// for instances with few constraints.
pub fn seminorm_vertex_oracle(complex: &CochainComplexQ, z: &[Rat], n: usize) -> Rat {
    let m = complex.dim(n);
    // basis of the coboundary image
    let image: Vec<Vec<Rat>> = if n == 0 {
        Vec::new()
    } else {
        let dm = &complex.d[n - 1];
        let cols = complex.dim(n - 1);
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        let mut r = 0;
        for j in 0..cols {
            let col: Vec<Rat> = (0..m).map(|row| dm[row][j].clone()).collect();
            basis.push(col);
            let newr = rank(&transpose(&basis, m));
            if newr > r {
                r = newr;
            } else {
                basis.pop();
            }
        }
        basis
    };
    let nv = image.len() + 1;
    // constraints: for each sigma, each sign: sign*(z + sum w_k im_k) <= t
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for sigma in 0..m {
        for sign in [Rat::one(), -Rat::one()] {
            // -sign*sum w_k im_k + t >= sign*z: row form a.w + t - sign*z >= 0
            let mut coeffs = vec![zero(); nv];
            for (k, im) in image.iter().enumerate() {
                coeffs[k] = -(&sign * &im[sigma]);
            }
            coeffs[nv - 1] = Rat::one();
            rows.push((coeffs, &sign * &z[sigma]));
        }
    }
    let feasible = |w: &[Rat]| rows.iter().all(|(a, rhs)| {
        a.iter().zip(w).map(|(x, y)| x * y).fold(zero(), |s, v| s + v) >= *rhs
    });
    let mut best: Option<Rat> = None;
    let idx: Vec<usize> = (0..rows.len()).collect();
    for subset in combinations(&idx, nv) {
        let a: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Rat> = subset.iter().map(|&i| rows[i].1.clone()).collect();
        if rank(&a) < nv {
            continue;
        }
        if let Some(w) = solve(&a, &b) {
            if feasible(&w) {
                let t = w[nv - 1].clone();
                if best.as_ref().map_or(true, |b| t < *b) {
                    best = Some(t);
                }
            }
        }
    }
    best.expect("program is feasible and bounded")
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub struct ClassComparison {
    pub source_norm: Rat,
    pub target_norm: Rat,
}

pub struct IsometryReport {
    pub degree: usize,
    pub betti_source: usize,
    pub betti_target: usize,
    pub induced_bijective: bool,
    pub classes: Vec<ClassComparison>,
    pub isometric: bool,
    pub norm_nonincreasing: bool,
}

/// Compute the induced map on degree-n cohomology of a simplicial map and
/// compare semi-norms of matched classes.
pub fn isometry_report(f: &SimplicialMap, n: usize, normalized_only: bool) -> Result<IsometryReport> {
    let source = CochainComplexQ::new(&f.source, normalized_only);
    let target = CochainComplexQ::new(&f.target, normalized_only);
    let hs = cohomology(&source, n)?;
    let ht = cohomology(&target, n)?;
    // pullbacks of target representatives, in source coordinates
    let pulled: Vec<Vec<Rat>> = ht
        .representatives
        .iter()
        .map(|rep| {
            // expand to a full cochain on the target, pull back, restrict
            let mut full = QCochain::zero(n, f.target.card(n));
            for (coord, &simplex) in target.supports[n].iter().enumerate() {
                full.values[simplex] = rep[coord].clone();
            }
            let back = full.pullback(f);
            source.coords(&back)
        })
        .collect();
    // express each pulled class in the source cohomology basis modulo
    // coboundaries: solve [reps | image columns] x = pulled
    let cols_n = source.dim(n);
    let mut generators: Vec<Vec<Rat>> = hs.representatives.clone();
    if n > 0 {
        let dm = &source.d[n - 1];
        for j in 0..source.dim(n - 1) {
            generators.push((0..cols_n).map(|r| dm[r][j].clone()).collect());
        }
    }
    let gen_matrix = transpose(&generators, cols_n);
    let mut coeff_matrix: Vec<Vec<Rat>> = Vec::new();
    let mut all_expressible = true;
    for p in &pulled {
        match solve(&gen_matrix, p) {
            Some(x) => coeff_matrix.push(x[..hs.betti].to_vec()),
            None => {
                all_expressible = false;
                coeff_matrix.push(vec![zero(); hs.betti]);
            }
        }
    }
    let induced_bijective = all_expressible
        && hs.betti == ht.betti
        && rank(&coeff_matrix) == hs.betti;
    let mut classes = Vec::new();
    let mut isometric = induced_bijective;
    let mut nonincreasing = true;
    for (rep, p) in ht.representatives.iter().zip(&pulled) {
        let tn = seminorm(&target, rep, n)?.value;
        let sn = seminorm(&source, p, n)?.value;
        if sn > tn {
            nonincreasing = false;
        }
        if sn != tn {
            isometric = false;
        }
        classes.push(ClassComparison { source_norm: sn, target_norm: tn });
    }
    Ok(IsometryReport {
        degree: n,
        betti_source: hs.betti,
        betti_target: ht.betti,
        induced_bijective,
        classes,
        isometric,
        norm_nonincreasing: nonincreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::rat;
    use crate::generate::{boundary_simplex, standard_simplex};

    #[test]
    fn cohomology_of_standard_simplex() {
        let d2 = standard_simplex(2, 3);
        let complex = CochainComplexQ::new(&d2, false);
        assert_eq!(cohomology(&complex, 0).unwrap().betti, 1);
        assert_eq!(cohomology(&complex, 1).unwrap().betti, 0);
        assert_eq!(cohomology(&complex, 2).unwrap().betti, 0);
    }

    #[test]
    fn cohomology_of_sphere() {
        let b2 = boundary_simplex(2, 2);
        let complex = CochainComplexQ::new(&b2, false);
        assert_eq!(cohomology(&complex, 0).unwrap().betti, 1);
        assert_eq!(cohomology(&complex, 1).unwrap().betti, 1);
    }

    #[test]
    fn empty_complex() {
        let k = FiniteSimplicialSet::empty(2);
        let complex = CochainComplexQ::new(&k, false);
        assert_eq!(cohomology(&complex, 0).unwrap().betti, 0);
        assert_eq!(cohomology(&complex, 1).unwrap().betti, 0);
    }

    #[test]
    fn coboundary_has_seminorm_zero() {
        let d2 = standard_simplex(2, 3);
        let complex = CochainComplexQ::new(&d2, false);
        // any coboundary: d of an indicator 0-cochain
        let b: Vec<Rat> = (0..complex.dim(0)).map(|i| rat(i as i64 % 2)).collect();
        let z = mat_vec(&complex.d[0], &b);
        let cert = seminorm(&complex, &z, 1).unwrap();
        assert_eq!(cert.value, rat(0));
    }

    #[test]
    fn circle_class_has_seminorm_one() {
        let (s1, _) = crate::bundle::circle_model(2);
        let complex = CochainComplexQ::new(&s1, false);
        // z = 1 on the nondegenerate loop edge, 0 on the degenerate one
        let mut z = vec![rat(0); complex.dim(1)];
        let nondeg = s1.nondegenerate(1);
        assert_eq!(nondeg.len(), 1);
        z[nondeg[0]] = rat(1);
        let cert = seminorm(&complex, &z, 1).unwrap();
        assert_eq!(cert.value, rat(1));
    }

    #[test]
    fn lp_matches_vertex_oracle_on_sphere() {
        let b3 = boundary_simplex(3, 3);
        let complex = CochainComplexQ::new(&b3, true); // normalized keeps it small
        let h2 = cohomology(&complex, 2).unwrap();
        assert_eq!(h2.betti, 1);
        for (mult, shift) in [(rat(1), 0), (rat(3), 1), (rat(-2), 2)] {
            let mut z: Vec<Rat> = h2.representatives[0].iter().map(|v| v * &mult).collect();
            // shift by a coboundary to vary the instance
            if shift > 0 {
                let b: Vec<Rat> =
                    (0..complex.dim(1)).map(|i| rat((i as i64 + shift) % 3 - 1)).collect();
                let db = mat_vec(&complex.d[1], &b);
                for (zi, di) in z.iter_mut().zip(&db) {
                    *zi += di;
                }
            }
            let cert = seminorm(&complex, &z, 2).unwrap();
            let oracle = seminorm_vertex_oracle(&complex, &z, 2);
            assert_eq!(cert.value, oracle);
        }
    }

    #[test]
    fn identity_is_an_isometric_isomorphism() {
        let b2 = Arc::new(boundary_simplex(2, 2));
        let id = SimplicialMap::identity(b2.clone());
        let report = isometry_report(&id, 1, false).unwrap();
        assert!(report.induced_bijective);
        assert!(report.isometric);
        assert!(report.norm_nonincreasing);
    }

    #[test]
    fn projection_with_point_fiber_is_isometric() {
        let b2 = Arc::new(boundary_simplex(2, 2));
        let pt = Arc::new(standard_simplex(0, 2));
        let (_, pr, _) = crate::generate::product(&b2, &pt);
        let report = isometry_report(&pr, 1, false).unwrap();
        assert!(report.induced_bijective);
        assert!(report.isometric);
    }
}
