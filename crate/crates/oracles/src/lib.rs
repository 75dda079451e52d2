//! Brute-force reference oracles for the kappa test suites.
//!
//! Everything here works on raw coordinates and is written without reference
//! to the library's algorithms: dense grids, exhaustive enumeration and
//! textbook integrators. Slow on purpose.

#![allow(clippy::needless_range_loop)]

pub mod geom2;
pub mod lp;
pub mod order;

/// Classical fourth-order Runge-Kutta with `n` equal steps on `[0, t_end]`.
pub fn rk4(f: impl Fn(f64, &[f64]) -> Vec<f64>, x0: &[f64], t_end: f64, n: usize) -> Vec<f64> {
    let h = t_end / n as f64;
    let mut x = x0.to_vec();
    let add = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = f(t, &x);
        let k2 = f(t + h / 2.0, &add(&x, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &add(&x, &k2, h / 2.0));
        let k4 = f(t + h, &add(&x, &k3, h));
        for j in 0..x.len() {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    x
}

/// Small dense matrix helpers on row-major `Vec<Vec<f64>>`.
pub mod mat {
    pub fn mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let m = b[0].len();
        (0..n)
            .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    pub fn apply(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting; `None` when
    /// a pivot falls below `1e-14`.
    pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
            if m[p][c].abs() < 1e-14 {
                return None;
            }
            m.swap(c, p);
            let piv = m[c][c];
            m[c].iter_mut().for_each(|v| *v /= piv);
            for r in 0..n {
                if r != c {
                    let f = m[r][c];
                    if f != 0.0 {
                        for k in 0..2 * n {
                            m[r][k] -= f * m[c][k];
                        }
                    }
                }
            }
        }
        Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// `exp(diag(lambda) t)` conjugated by `p`: `p diag(e^{lambda t}) p^{-1}`.
    pub fn exp_diagonalizable(p: &[Vec<f64>], lambda: &[f64], t: f64) -> Vec<Vec<f64>> {
        let pinv = inverse(p).expect("invertible eigenbasis");
        let d: Vec<Vec<f64>> = (0..lambda.len())
            .map(|i| {
                (0..lambda.len())
                    .map(|j| if i == j { (lambda[i] * t).exp() } else { 0.0 })
                    .collect()
            })
            .collect();
        mul(&mul(p, &d), &pinv)
    }
}
