//! Thin SVD helpers: Householder reduction followed by one-sided Jacobi.
//!
//! Only the right singular vectors and singular values are produced, which
//! is all PCA needs. Matrices are column-major (`cols[j][i]` is row `i` of
//! column `j`).

use crate::scalar::Scalar;

pub(crate) struct RightSvd<T> {
    /// Singular values, descending.
    pub singular: Vec<T>,
    /// Right singular vectors, one per singular value, each of length `p`.
    pub vectors: Vec<Vec<T>>,
}

const MAX_SWEEPS: usize = 80;

/// Computes the right singular vectors of an `n_rows × p` matrix given as
/// columns. The ordering is deterministic: descending singular value, ties
/// kept in column order.
pub(crate) fn right_svd<T: Scalar>(mut cols: Vec<Vec<T>>, n_rows: usize) -> RightSvd<T> {
    let p = cols.len();
    if n_rows > p {
        cols = householder_r(cols, n_rows);
    }
    let m = cols.first().map_or(0, Vec::len);
    let mut v: Vec<Vec<T>> = (0..p)
        .map(|j| {
            let mut e = vec![T::zero(); p];
            e[j] = T::one();
            e
        })
        .collect();

    let tol = T::epsilon() * <T as Scalar>::from_usize(m.max(1));
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let (alpha, beta, gamma) = {
                    let (a, b) = (&cols[i], &cols[j]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = T::zero();
                    for k in 0..m {
                        alpha = alpha + a[k] * a[k];
                        beta = beta + b[k] * b[k];
                        gamma = gamma + a[k] * b[k];
                    }
                    (alpha, beta, gamma)
                };
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::one() + T::one();
                let zeta = (beta - alpha) / (two * gamma);
                let sign = if zeta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = cols
        .iter()
        .map(|c| c.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    RightSvd {
        singular: order.iter().map(|&j| norms[j]).collect(),
        vectors: order.into_iter().map(|j| v[j].clone()).collect(),
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], i: usize, j: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(j);
    let (a, b) = (&mut left[i], &mut right[0]);
    for k in 0..a.len() {
        let x = a[k];
        let y = b[k];
        a[k] = c * x - s * y;
        b[k] = s * x + c * y;
    }
}

/// Reduces a tall matrix to its `p × p` triangular factor. `A = QR` shares
/// right singular vectors and singular values with `R`.
fn householder_r<T: Scalar>(mut cols: Vec<Vec<T>>, n_rows: usize) -> Vec<Vec<T>> {
    let p = cols.len();
    let two = T::one() + T::one();
    let mut reflector = vec![T::zero(); n_rows];
    for k in 0..p {
        let norm = cols[k][k..].iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = cols[k][k];
        let alpha = if x0 > T::zero() { -norm } else { norm };
        reflector[k..n_rows].copy_from_slice(&cols[k][k..n_rows]);
        reflector[k] = reflector[k] - alpha;
        let vnorm2 = reflector[k..].iter().map(|&x| x * x).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        for col in cols.iter_mut().skip(k) {
            let mut dot = T::zero();
            for i in k..n_rows {
                dot = dot + reflector[i] * col[i];
            }
            let f = two * dot / vnorm2;
            for i in k..n_rows {
                col[i] = col[i] - f * reflector[i];
            }
        }
    }
    cols.into_iter()
        .enumerate()
        .map(|(j, col)| {
            (0..p)
                .map(|i| if i <= j { col[i] } else { T::zero() })
                .collect()
        })
        .collect()
}
