//! Pointwise tensor algebra: Ricci contraction, Weyl extraction and norms.
//!
//! Index conventions: `R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km} Γ^m_{lj} − Γ^i_{lm} Γ^m_{kj}`,
//! `R_{ajkl} = g_{ai} R^i_{jkl}`, `Ric_{jl} = R^i_{jil}`. The unit sphere has
//! `R_{abcd} = g_{ac} g_{bd} − g_{ad} g_{bc}`.

use crate::scalar::Scalar;

#[inline]
pub(crate) fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Ricci tensor and scalar curvature from the lowered Riemann tensor.
pub fn ricci_from_lowered<T: Scalar>(
    n: usize,
    riem: &[T],
    ginv: &[T],
    ricci: &mut [T],
) -> T {
    for b in 0..n {
        for d in 0..n {
            let mut s = T::zero();
            for a in 0..n {
                for c in 0..n {
                    s += ginv[a * n + c] * riem[i4(n, a, b, c, d)];
                }
            }
            ricci[b * n + d] = s;
        }
    }
    // symmetrise away rounding
    for b in 0..n {
        for d in (b + 1)..n {
            let m = (ricci[b * n + d] + ricci[d * n + b]) * T::lit(0.5);
            ricci[b * n + d] = m;
            ricci[d * n + b] = m;
        }
    }
    let mut r = T::zero();
    for b in 0..n {
        for d in 0..n {
            r += ginv[b * n + d] * ricci[b * n + d];
        }
    }
    r
}

/// Lowered Weyl tensor: Riemann minus its Kulkarni–Nomizu Ricci part.
pub fn weyl_lowered<T: Scalar>(
    n: usize,
    riem: &[T],
    ricci: &[T],
    scalar: T,
    g: &[T],
    weyl: &mut [T],
) {
    let nn = T::from_usize_lossy(n);
    let c1 = T::one() / (nn - T::lit(2.0));
    let c2 = scalar / ((nn - T::one()) * (nn - T::lit(2.0)));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let gac = g[a * n + c];
                    let gbd = g[b * n + d];
                    let gad = g[a * n + d];
                    let gbc = g[b * n + c];
                    let kn = ricci[a * n + c] * gbd - ricci[a * n + d] * gbc
                        + ricci[b * n + d] * gac
                        - ricci[b * n + c] * gad;
                    weyl[i4(n, a, b, c, d)] =
                        riem[i4(n, a, b, c, d)] - c1 * kn + c2 * (gac * gbd - gad * gbc);
                }
            }
        }
    }
}

/// Raises all four indices of a lowered 4-tensor with `ginv`.
pub fn raise_all<T: Scalar>(n: usize, lower: &[T], ginv: &[T], out: &mut [T], tmp: &mut [T]) {
    let n4 = n * n * n * n;
    tmp[..n4].copy_from_slice(&lower[..n4]);
    for slot in 0..4 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let idx = [a, b, c, d];
                        let mut s = T::zero();
                        for e in 0..n {
                            let mut j = idx;
                            j[slot] = e;
                            s += ginv[idx[slot] * n + e] * tmp[i4(n, j[0], j[1], j[2], j[3])];
                        }
                        out[i4(n, a, b, c, d)] = s;
                    }
                }
            }
        }
        tmp[..n4].copy_from_slice(&out[..n4]);
    }
}

/// Full contraction `T_{abcd} T^{abcd}`.
pub fn full_norm_sq<T: Scalar>(n: usize, lower: &[T], ginv: &[T], scratch: &mut [T], tmp: &mut [T]) -> T {
    raise_all(n, lower, ginv, scratch, tmp);
    let n4 = n * n * n * n;
    (0..n4).map(|k| lower[k] * scratch[k]).sum()
}

/// Mixed form `T^a_{bcd} = g^{ae} T_{ebcd}`.
pub fn raise_first<T: Scalar>(n: usize, lower: &[T], ginv: &[T], out: &mut [T]) {
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = T::zero();
                    for e in 0..n {
                        s += ginv[a * n + e] * lower[i4(n, e, b, c, d)];
                    }
                    out[i4(n, a, b, c, d)] = s;
                }
            }
        }
    }
}

/// Largest single metric contraction of a lowered 4-tensor over any index
/// pair (trace-freeness check).
pub fn max_trace<T: Scalar>(n: usize, lower: &[T], ginv: &[T]) -> T {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut worst = T::zero();
    for &(p, q) in &pairs {
        let free: Vec<usize> = (0..4).filter(|s| *s != p && *s != q).collect();
        for x in 0..n {
            for y in 0..n {
                let mut s = T::zero();
                for u in 0..n {
                    for v in 0..n {
                        let mut idx = [0usize; 4];
                        idx[p] = u;
                        idx[q] = v;
                        idx[free[0]] = x;
                        idx[free[1]] = y;
                        s += ginv[u * n + v] * lower[i4(n, idx[0], idx[1], idx[2], idx[3])];
                    }
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}
