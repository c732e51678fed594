//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use arcast::{Differencing, ModelSpec};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// `log |det a|` from an LU factorisation with partial pivoting.
pub fn lu_log_abs_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut acc = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        acc += m[col][col].abs().ln();
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    acc
}

/// Regression rows `(x_t, z_t)` of the autoregression on `series`, using only
/// observed lags.
pub fn regression_rows(series: &[f64], spec: ModelSpec) -> (Vec<Vec<f64>>, Vec<f64>) {
    let z: Vec<f64> = match spec.diff {
        Differencing::None => series.to_vec(),
        Differencing::First => series.windows(2).map(|w| w[1] - w[0]).collect(),
    };
    let q = match spec.diff {
        Differencing::None => spec.order,
        Differencing::First => spec.order - 1,
    };
    let mut rows = Vec::new();
    let mut target = Vec::new();
    for t in q..z.len() {
        let mut x = Vec::new();
        if spec.intercept {
            x.push(1.0);
        }
        for k in 1..=q {
            x.push(z[t - k]);
        }
        rows.push(x);
        target.push(z[t]);
    }
    (rows, target)
}

/// Normal-equations pieces `(Σ x x', Σ x z)`.
pub fn normal_equations(rows: &[Vec<f64>], target: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = rows.first().map_or(0, Vec::len);
    let mut g = vec![vec![0.0; k]; k];
    let mut c = vec![0.0; k];
    for (x, &z) in rows.iter().zip(target) {
        for i in 0..k {
            c[i] += x[i] * z;
            for j in 0..k {
                g[i][j] += x[i] * x[j];
            }
        }
    }
    (g, c)
}

/// Batch least-squares coefficients via the normal equations.
pub fn batch_fit(series: &[f64], spec: ModelSpec) -> Vec<f64> {
    let (rows, target) = regression_rows(series, spec);
    let (g, c) = normal_equations(&rows, &target);
    gauss_solve(&g, &c)
}

/// Coefficients of `Π (1 - r B)` written as `y_t = Σ β_k y_{t-k}`.
pub fn expand_roots(roots: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= r * c;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c).collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
