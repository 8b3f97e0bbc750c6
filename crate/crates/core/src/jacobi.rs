//! Cyclic Jacobi diagonalization of dense symmetric matrices.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct JacobiResult {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row-major `n × n`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm after the last sweep, relative to `‖S‖_F`.
    pub off_norm: f64,
}

/// Diagonalizes the row-major symmetric matrix `s` (only the upper triangle is
/// read). Sweeps stop once the off-diagonal norm is at most `tol · ‖S‖_F`,
/// followed by one more sweep.
pub fn jacobi_eigen(s: &[f64], n: usize, tol: f64, max_sweeps: usize) -> Result<JacobiResult> {
    assert_eq!(s.len(), n * n);
    let mut a = s.to_vec();
    let norm = {
        let mut acc = 0.0;
        for p in 0..n {
            acc += a[p * n + p].powi(2);
            for q in p + 1..n {
                acc += 2.0 * a[p * n + q].powi(2);
            }
        }
        acc.sqrt()
    };
    // vt[j * n + i] = i-th component of the j-th eigenvector.
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let off = |a: &[f64]| {
        let mut acc = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                acc += a[p * n + q].powi(2);
            }
        }
        (2.0 * acc).sqrt()
    };

    let mut finishing = false;
    let mut sweeps = 0;
    let mut off_norm = if norm > 0.0 { off(&a) / norm } else { 0.0 };
    while sweeps < max_sweeps {
        if off_norm <= tol {
            if finishing || off_norm == 0.0 {
                break;
            }
            finishing = true;
        }
        sweeps += 1;
        let sum_abs: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum();
        let thresh = if sweeps < 4 {
            0.2 * sum_abs / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweeps > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh || apq == 0.0 {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let hh = t * apq;
                z[p] -= hh;
                z[q] += hh;
                d[p] -= hh;
                d[q] += hh;
                a[p * n + q] = 0.0;
                let rot = |a: &mut [f64], x: usize, y: usize| {
                    let g = a[x];
                    let h = a[y];
                    a[x] = g - sn * (h + g * tau);
                    a[y] = h + sn * (g - h * tau);
                };
                for j in 0..p {
                    rot(&mut a, j * n + p, j * n + q);
                }
                for j in p + 1..q {
                    rot(&mut a, p * n + j, j * n + q);
                }
                for j in q + 1..n {
                    rot(&mut a, p * n + j, q * n + j);
                }
                for j in 0..n {
                    rot(&mut vt, p * n + j, q * n + j);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
        off_norm = if norm > 0.0 { off(&a) / norm } else { 0.0 };
    }
    if off_norm > tol {
        return Err(Error::Convergence {
            what: "Jacobi eigensolver".into(),
            detail: format!(
                "relative off-diagonal norm {off_norm:.3e} > {tol:.1e} after {sweeps} sweeps"
            ),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + col] = vt[src * n + i];
        }
    }
    Ok(JacobiResult {
        values,
        vectors,
        sweeps,
        off_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let r = jacobi_eigen(&[-2.0, 1.0, 1.0, -2.0], 2, 1e-14, 50).unwrap();
        assert!((r.values[0] + 3.0).abs() < 1e-14);
        assert!((r.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let r = jacobi_eigen(&[3.0, 0.0, 0.0, 1.0], 2, 1e-14, 50).unwrap();
        assert_eq!(r.values, vec![1.0, 3.0]);
        assert_eq!(r.sweeps, 0);
    }

    #[test]
    fn reconstructs_random_matrix() {
        let n = 30;
        let mut s = vec![0.0; n * n];
        let mut x = 0.123_f64;
        for i in 0..n {
            for j in i..n {
                x = (x * 3.9 * (1.0 - x)).fract();
                s[i * n + j] = x - 0.5;
                s[j * n + i] = x - 0.5;
            }
        }
        let r = jacobi_eigen(&s, n, 1e-14, 100).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n)
                    .map(|k| r.vectors[i * n + k] * r.values[k] * r.vectors[j * n + k])
                    .sum();
                err = err.max((rec - s[i * n + j]).abs());
            }
        }
        assert!(err < 1e-12, "{err}");
        assert!(r.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = [1.0, 2.0, 0.5, 2.0, -1.0, 0.3, 0.5, 0.3, 4.0];
        let e = jacobi_eigen(&s, 3, 1e-15, 1).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("off-diagonal"));
    }
}
