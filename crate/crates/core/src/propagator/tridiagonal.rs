//! Implicit-shift QL iteration for real symmetric tridiagonal matrices.
//!
//! Follows the EISPACK `tql2` procedure (Bowdler, Martin, Reinsch and
//! Wilkinson) as carried by JAMA, specialised to input that is already
//! tridiagonal so no Householder reduction is needed.

use nalgebra::DMatrix;

use crate::error::{QstError, Result};

/// Sweeps allowed per unit of matrix order before giving up.
pub const ITERATIONS_PER_ORDER: usize = 30;

/// Eigen-decomposes the symmetric tridiagonal matrix with the given diagonal
/// and first off-diagonal (`off.len() == diag.len() - 1`).
///
/// Returns eigenvalues in ascending order and the orthogonal matrix whose
/// columns are the matching eigenvectors.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    assert_eq!(off.len() + 1, n, "off-diagonal length must be order - 1");

    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut v = DMatrix::<f64>::identity(n, n);

    let cap = ITERATIONS_PER_ORDER * n;
    let mut iterations = 0usize;
    let eps = f64::EPSILON;
    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n - 1] == 0, so m < n here.

        if m > l {
            loop {
                iterations += 1;
                if iterations > cap {
                    return Err(QstError::NoConvergence(cap));
                }

                // implicit Wilkinson-style shift
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        let h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps the permutation deterministic for ties
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            v.swap_columns(i, k);
        }
    }

    Ok((d, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(diag: &[f64], off: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let (w, v) = symmetric_tridiagonal_eigen(diag, off).unwrap();
        let n = diag.len();
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i.abs_diff(j) == 1 {
                off[i.min(j)]
            } else {
                0.0
            }
        });
        let recon =
            &v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(w.clone())) * v.transpose();
        let scale = a.abs().max().max(1.0);
        assert!((recon - &a).abs().max() <= 1e-12 * scale);
        let orth = v.transpose() * &v - DMatrix::identity(n, n);
        assert!(orth.abs().max() <= 1e-12);
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        (w, v)
    }

    #[test]
    fn one_by_one() {
        let (w, v) = check(&[3.5], &[]);
        assert_eq!(w, vec![3.5]);
        assert_eq!(v[(0, 0)], 1.0);
    }

    #[test]
    fn two_site_hopping() {
        let (w, _) = check(&[0.0, 0.0], &[0.7]);
        assert!((w[0] + 0.7).abs() < 1e-15);
        assert!((w[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn uniform_chain_matches_cosine_band() {
        let n = 41;
        let (w, _) = check(&vec![0.0; n], &vec![1.0; n - 1]);
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn general_diagonal_and_decoupled_blocks() {
        check(&[1.0, -2.0, 0.5, 4.0, 0.0], &[0.3, 0.0, 1.2, -0.7]);
        check(&[0.0; 6], &[0.0; 5]);
        check(&[2.0, 2.0, 2.0], &[1e-9, 1e-9]);
    }

    #[test]
    fn widely_separated_scales() {
        let mut off = vec![1.0; 204];
        off[1] = 1e-4;
        off[202] = 1e-4;
        off[0] = 3e-5;
        off[203] = 3e-5;
        check(&vec![0.0; 205], &off);
    }
}
