//! Dense symmetric generalized eigensolver for `H v = λ S v`.
//!
//! `S` is diagonally equilibrated and Cholesky-factored, `L⁻¹ H L⁻ᵀ` is
//! diagonalized by cyclic Jacobi rotations, and eigenvectors are mapped
//! back by triangular solves. Returned vectors are S-orthonormal.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// A symmetric pencil `(H, S)` with `S` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigProblem {
    pub h: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl GeneralizedEigProblem {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Largest `|A_jk - A_kj| / max|A|` over both matrices.
    pub fn asymmetry(&self) -> f64 {
        let rel = |a: &DMatrix<f64>| {
            let scale = a.amax().max(f64::MIN_POSITIVE);
            (a - a.transpose()).amax() / scale
        };
        rel(&self.h).max(rel(&self.s))
    }

    /// `‖H v - λ S v‖ / (‖H‖ + |λ| ‖S‖)`, Frobenius norms for the matrices.
    pub fn relative_residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(v);
        let r = &self.h * &v - lambda * (&self.s * &v);
        let denom = (self.h.norm() + lambda.abs() * self.s.norm()) * v.norm();
        r.norm() / denom
    }
}

/// Eigenpairs sorted by ascending eigenvalue; column `i` of `vectors`
/// belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Lower-triangular `L` with `S = L Lᵀ`.
pub fn cholesky(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(l)
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. Returns unsorted
/// eigenvalues, the orthogonal eigenvector matrix and the sweep count.
pub fn jacobi_eigen(mut a: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, usize)> {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let total = a.norm();
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > JACOBI_TOL * total {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)]).collect(), v, sweeps))
}

/// Solves `L x = b` in place for lower-triangular `L`, column by column.
fn forward_solve(l: &DMatrix<f64>, b: &mut DMatrix<f64>) {
    let n = l.nrows();
    for col in 0..b.ncols() {
        for i in 0..n {
            let mut v = b[(i, col)];
            for k in 0..i {
                v -= l[(i, k)] * b[(k, col)];
            }
            b[(i, col)] = v / l[(i, i)];
        }
    }
}

/// Solves `Lᵀ x = b` in place.
fn backward_solve_transposed(l: &DMatrix<f64>, b: &mut DMatrix<f64>) {
    let n = l.nrows();
    for col in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut v = b[(i, col)];
            for k in (i + 1)..n {
                v -= l[(k, i)] * b[(k, col)];
            }
            b[(i, col)] = v / l[(i, i)];
        }
    }
}

pub fn solve_generalized_symmetric(prob: &GeneralizedEigProblem) -> Result<GeneralizedEigen> {
    let n = prob.dim();
    if prob.s.nrows() != n || prob.h.ncols() != n || prob.s.ncols() != n {
        return Err(Error::InvalidParameter("H and S must be square and of equal size".into()));
    }
    if prob.h.iter().chain(prob.s.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("H and S must have finite entries".into()));
    }
    if n == 0 {
        return Ok(GeneralizedEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
            sweeps: 0,
        });
    }
    // equilibrate: D S D has a unit diagonal
    let mut scale = vec![0.0; n];
    for (i, d) in scale.iter_mut().enumerate() {
        let sii = prob.s[(i, i)];
        if !(sii > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: i, value: sii });
        }
        *d = 1.0 / sii.sqrt();
    }
    let scaled = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| scale[i] * m[(i, j)] * scale[j]);
    let s = scaled(&prob.s);
    let h = scaled(&prob.h);

    let l = cholesky(&s)?;
    // C = L⁻¹ H L⁻ᵀ
    let mut c = h;
    forward_solve(&l, &mut c);
    let mut ct = c.transpose();
    forward_solve(&l, &mut ct);
    let c = 0.5 * (&ct + ct.transpose());

    let (values, y, sweeps) = jacobi_eigen(c)?;
    let mut x = y;
    backward_solve_transposed(&l, &mut x);
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] *= scale[i];
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        // sign convention: largest-magnitude component positive
        let col = x.column(src);
        let imax = col.iamax();
        let sign = if col[imax] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    Ok(GeneralizedEigen {
        values: sorted_values,
        vectors,
        sweeps,
    })
}
