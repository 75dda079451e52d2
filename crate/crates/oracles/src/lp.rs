//! Tiny linear programs solved by enumerating basic solutions.

/// Solves the square system `a z = b` by Gaussian elimination with partial
/// pivoting; `None` when a pivot is below `1e-12` relative to the row scale.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        let scale = a[p].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if a[p][c].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut z = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * z[k]).sum();
        z[r] = (b[r] - s) / a[r][r];
    }
    Some(z)
}

/// Minimizes `c . z` subject to `rows[i] . z <= rhs[i]` by visiting every
/// basic solution (every choice of `dim` tight constraints). Exponential;
/// only for a handful of variables. Returns `None` if no vertex is feasible.
pub fn minimize_by_vertices(c: &[f64], rows: &[Vec<f64>], rhs: &[f64], tol: f64) -> Option<(f64, Vec<f64>)> {
    let dim = c.len();
    let m = rows.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pick: Vec<usize> = (0..dim).collect();
    if dim > m {
        return None;
    }
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| rhs[i]).collect();
        if let Some(z) = solve(a, b) {
            let feasible = rows
                .iter()
                .zip(rhs)
                .all(|(r, &h)| r.iter().zip(&z).map(|(p, q)| p * q).sum::<f64>() <= h + tol);
            if feasible {
                let val: f64 = c.iter().zip(&z).map(|(p, q)| p * q).sum();
                if best.as_ref().is_none_or(|(v, _)| val < *v) {
                    best = Some((val, z));
                }
            }
        }
        // next combination in lexicographic order
        let mut i = dim;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < m - dim + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..dim {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Best uniform approximation of `g` (at `positions`) by a function whose
/// slopes between every pair of points lie in `[c2, c1]`, solved as a linear
/// program in `(g~, eps)` by vertex enumeration. Returns `(eps, g~)`.
pub fn slope_constrained_fit(positions: &[f64], g: &[f64], c1: f64, c2: f64) -> Option<(f64, Vec<f64>)> {
    let n = g.len();
    let dim = n + 1;
    let mut rows = vec![];
    let mut rhs = vec![];
    let unit = |i: usize, s: f64| {
        let mut r = vec![0.0; dim];
        r[i] = s;
        r
    };
    for i in 0..n {
        let mut r = unit(i, 1.0);
        r[n] = -1.0;
        rows.push(r);
        rhs.push(g[i]);
        let mut r = unit(i, -1.0);
        r[n] = -1.0;
        rows.push(r);
        rhs.push(-g[i]);
    }
    for i in 0..n {
        for j in 0..n {
            if positions[i] < positions[j] {
                let dx = positions[j] - positions[i];
                let mut r = unit(j, 1.0);
                r[i] = -1.0;
                rows.push(r);
                rhs.push(c1 * dx);
                let mut r = unit(i, 1.0);
                r[j] = -1.0;
                rows.push(r);
                rhs.push(-c2 * dx);
            }
        }
    }
    rows.push(unit(n, -1.0));
    rhs.push(0.0);
    let (eps, z) = minimize_by_vertices(&unit(n, 1.0), &rows, &rhs, 1e-9)?;
    Some((eps, z[..n].to_vec()))
}
