//! Sparse symmetric matrices, envelope Cholesky, and a shift-invert subspace
//! iteration for the lowest eigenpairs of `K x = λ M x`.

use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Symmetric matrix in compressed sparse row form (both triangles stored).
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate triplets.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `self + alpha * other` on the union pattern.
    pub fn add_scaled(&self, other: &CsrMatrix, alpha: f64) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.vals.len() + other.vals.len());
        for i in 0..self.n {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
            t.extend(other.row(i).map(|(j, v)| (i, j, alpha * v)));
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .unwrap();
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a
                .row(v)
                .map(|(j, _)| j)
                .filter(|&j| !visited[j])
                .collect();
            nbrs.sort_by_key(|&j| degree[j]);
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factor of a symmetric positive definite
/// matrix, in a permuted ordering.
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    /// Row `i` holds columns `first[i]..=i` at `start[i]..start[i+1]`.
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for (oj, _) in a.row(old) {
                let j = inv[oj];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for old in 0..n {
            let i = inv[old];
            for (oj, v) in a.row(old) {
                let j = inv[oj];
                if j <= i {
                    data[start[i] + (j - first[i])] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + (j - fi)];
                let ri = start[i] + (k0 - fi);
                let rj = start[j] + (k0 - fj);
                for k in 0..(j - k0) {
                    s -= data[ri + k] * data[rj + k];
                }
                let ljj = data[start[j] + (j - fj)];
                data[start[i] + (j - fi)] = s / ljj;
            }
            let row = &data[start[i]..start[i] + (i - fi)];
            let s = data[start[i] + (i - fi)] - row.iter().map(|v| v * v).sum::<f64>();
            if !(s > 0.0) {
                return Err(Error::Eigensolver(format!(
                    "matrix is not positive definite (pivot {i} = {s:e})"
                )));
            }
            data[start[i] + (i - fi)] = s.sqrt();
        }
        Ok(EnvelopeCholesky {
            perm,
            first,
            start,
            data,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                s -= l * y[fi + k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }
}

/// Lowest eigenpairs of the symmetric definite pencil `K x = λ M x`.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Shift-invert subspace iteration with Rayleigh–Ritz projection.
///
/// `shift` must lie strictly below the smallest eigenvalue so that
/// `K - shift M` is positive definite.
pub fn lowest_eigenpairs(
    k: &CsrMatrix,
    m: &CsrMatrix,
    count: usize,
    shift: f64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPairs> {
    let n = k.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenpairs of a {n}-dimensional problem"
        )));
    }
    let block = (2 * count + 4).min(n);
    let shifted = k.add_scaled(m, -shift);
    let chol = EnvelopeCholesky::factor(&shifted)?;

    // deterministic start block
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|c| {
            (0..n)
                .map(|i| {
                    let t = (i as f64 + 1.0) * (c as f64 + 1.0);
                    (t * 0.618_033_988_75).fract() - 0.5 + if c == 0 { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();

    let mut tmp = vec![0.0; n];
    let mut values = vec![0.0; block];
    let mut residuals = vec![f64::INFINITY; count];
    for iter in 1..=max_iter {
        let y: Vec<Vec<f64>> = x
            .iter()
            .map(|xc| {
                m.mul_vec(xc, &mut tmp);
                chol.solve(&tmp)
            })
            .collect();
        let kr = DMatrix::from_fn(block, block, |a, b| k.quad_form(&y[a], &y[b]));
        let mr = DMatrix::from_fn(block, block, |a, b| m.quad_form(&y[a], &y[b]));
        let (vals, q) = small_generalized_eigen(kr, mr)?;
        x = (0..block)
            .map(|c| {
                let mut v = vec![0.0; n];
                for (a, ya) in y.iter().enumerate() {
                    let w = q[(a, c)];
                    for (vi, yi) in v.iter_mut().zip(ya) {
                        *vi += w * yi;
                    }
                }
                v
            })
            .collect();
        values = vals;

        let mut kx = vec![0.0; n];
        let mut mx = vec![0.0; n];
        for c in 0..count {
            k.mul_vec(&x[c], &mut kx);
            m.mul_vec(&x[c], &mut mx);
            let r: f64 = kx
                .iter()
                .zip(&mx)
                .map(|(a, b)| (a - values[c] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale = (values[c].abs() + shift.abs().max(1.0))
                * mx.iter().map(|v| v * v).sum::<f64>().sqrt();
            residuals[c] = if scale > 0.0 { r / scale } else { r };
        }
        if residuals.iter().all(|&r| r < tol) {
            return Ok(EigenPairs {
                values: values[..count].to_vec(),
                vectors: x.into_iter().take(count).collect(),
                residuals,
                iterations: iter,
            });
        }
    }
    Err(Error::Eigensolver(format!(
        "no convergence after {max_iter} iterations (residuals {residuals:?}, values {:?})",
        &values[..count]
    )))
}

/// Generalized eigenproblem `A q = λ B q` for small dense symmetric `A`, SPD
/// `B`; eigenvectors are `B`-orthonormal and sorted ascending.
fn small_generalized_eigen(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigensolver("projected mass matrix lost definiteness".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigensolver("singular projected factor".into()))?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vecs = linv.transpose() * &eig.eigenvectors;
    let sorted = DMatrix::from_fn(n, n, |r, c| vecs[(r, idx[c])]);
    Ok((idx.iter().map(|&i| eig.eigenvalues[i]).collect(), sorted))
}
