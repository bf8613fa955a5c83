//! Dense eigenvalue routines for the small Hermitian matrices that show up in
//! the separability checks.
//!
//! A complex Hermitian `H = A + iB` of size `n` is mapped to the real symmetric
//! `[[A, −B], [B, A]]` of size `2n`, whose spectrum is that of `H` with every
//! eigenvalue doubled. The real matrix is diagonalised by cyclic Jacobi
//! rotations.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Row-major dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn off_diagonal_norm_sq(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.data[i * n + j];
                s += v * v;
            }
        }
        s
    }

    fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// All eigenvalues in ascending order. Only the upper triangle is read.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.clone();
        // symmetrise from the upper triangle
        for i in 0..n {
            for j in (i + 1)..n {
                let v = a.get(i, j);
                a.set(j, i, v);
            }
        }
        let total = a.frobenius_sq();
        if total > 0.0 {
            for _ in 0..MAX_SWEEPS {
                let off = a.off_diagonal_norm_sq();
                if off <= f64::EPSILON * f64::EPSILON * total * 1e-4 {
                    break;
                }
                for p in 0..n {
                    for q in (p + 1)..n {
                        rotate(&mut a, p, q);
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut SymmetricMatrix, p: usize, q: usize) {
    let n = a.n;
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = c * akp - s * akq;
        a.data[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a.data[p * n + k];
        let aqk = a.data[q * n + k];
        a.data[p * n + k] = c * apk - s * aqk;
        a.data[q * n + k] = s * apk + c * aqk;
    }
    a.data[p * n + q] = 0.0;
    a.data[q * n + p] = 0.0;
}

/// Eigenvalues (ascending) of the Hermitian matrix `h`, given row-major with
/// size `n`. Only the upper triangle is read.
pub fn hermitian_eigenvalues(n: usize, h: &[Complex64]) -> Vec<f64> {
    assert_eq!(h.len(), n * n, "matrix buffer does not match dimension");
    if h.iter().all(|z| z.im == 0.0) {
        return SymmetricMatrix::from_fn(n, |i, j| h[i * n + j].re).eigenvalues();
    }
    let embed = SymmetricMatrix::from_fn(2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = h[ii * n + jj];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    // each eigenvalue of h appears twice in the embedding
    embed.eigenvalues().into_iter().step_by(2).collect()
}

/// Eigenvalues of a Hermitian matrix that is block diagonal up to a
/// permutation. Blocks are found as the connected components of the graph
/// whose edges are the nonzero off-diagonal entries, so the result equals
/// the full spectrum exactly; large sparse-pattern matrices split into many
/// small problems.
pub fn hermitian_eigenvalues_blocked(n: usize, h: &[Complex64]) -> Vec<f64> {
    assert_eq!(h.len(), n * n, "matrix buffer does not match dimension");
    let mut ev = Vec::with_capacity(n);
    for block in connected_blocks(n, h) {
        let m = block.len();
        let mut sub = Vec::with_capacity(m * m);
        for &i in &block {
            for &j in &block {
                sub.push(h[i * n + j]);
            }
        }
        ev.extend(hermitian_eigenvalues(m, &sub));
    }
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Index sets of the connected components of the nonzero pattern of `h`.
pub fn connected_blocks(n: usize, h: &[Complex64]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = h[i * n + j];
            let w = h[j * n + i];
            if z.re != 0.0 || z.im != 0.0 || w.re != 0.0 || w.im != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}
