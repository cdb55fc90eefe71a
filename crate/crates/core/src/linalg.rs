//! Dense kernels for the small (n ≤ 6) symmetric matrices that appear per
//! grid node. Matrices are row-major slices of length `n * n`.

use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor `L` with `a = L Lᵀ`, or `None` if `a`
/// is not positive definite.
pub fn cholesky<T: Scalar>(a: &[T], n: usize, l: &mut [T]) -> bool {
    for v in l.iter_mut().take(n * n) {
        *v = T::zero();
    }
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse<T: Scalar>(l: &[T], n: usize, out: &mut [T]) {
    for v in out.iter_mut().take(n * n) {
        *v = T::zero();
    }
    for j in 0..n {
        out[j * n + j] = T::one() / l[j * n + j];
        for i in (j + 1)..n {
            let mut s = T::zero();
            for k in j..i {
                s += l[i * n + k] * out[k * n + j];
            }
            out[i * n + j] = -s / l[i * n + i];
        }
    }
}

/// Inverse and determinant of a symmetric positive-definite matrix.
/// Returns `None` if the matrix is not positive definite.
pub fn spd_inverse<T: Scalar>(a: &[T], n: usize, inv: &mut [T]) -> Option<T> {
    let mut l = [T::zero(); 36];
    let mut li = [T::zero(); 36];
    if !cholesky(a, n, &mut l) {
        return None;
    }
    lower_inverse(&l, n, &mut li);
    let mut det = T::one();
    for i in 0..n {
        det *= l[i * n + i] * l[i * n + i];
    }
    // a⁻¹ = L⁻ᵀ L⁻¹
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for k in i.max(j)..n {
                s += li[k * n + i] * li[k * n + j];
            }
            inv[i * n + j] = s;
            inv[j * n + i] = s;
        }
    }
    Some(det)
}

/// Symmetric eigenvalues by cyclic Jacobi rotations (small matrices only).
pub fn sym_eigenvalues<T: Scalar>(a: &[T], n: usize) -> Vec<T> {
    let mut m = a[..n * n].to_vec();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored.
pub fn solve_tridiagonal<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &mut [T]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let mut c = vec![T::zero(); n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i + 1] * next;
    }
}
