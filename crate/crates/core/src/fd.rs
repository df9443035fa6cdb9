//! Central finite differences, used for Jacobians of residuals inside the
//! solver and as an independent check of analytic derivatives.

/// Central-difference gradient of a scalar function with step `h`.
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let fp = f(&y);
            y[k] = x[k] - h;
            let fm = f(&y);
            y[k] = x[k];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian `J[i][k] = d f_i / d x_k` of a vector function.
pub fn central_jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: F, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        y[k] = x[k] + h;
        let fp = f(&y);
        y[k] = x[k] - h;
        let fm = f(&y);
        y[k] = x[k];
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>());
    }
    let m = cols.first().map_or(0, |c| c.len());
    (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// `|a - b| / |b|` in the Euclidean norm, with `|b|` floored at `1e-8` so that
/// vanishing references compare absolutely.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_quadratic_is_exact() {
        let g = central_gradient(|x| x[0] * x[0] + 3.0 * x[1], &[2.0, -1.0], 1e-3);
        assert!((g[0] - 4.0).abs() < 1e-10 && (g[1] - 3.0).abs() < 1e-10);
        let j = central_jacobian(|x| vec![x[0] * x[1], x[0]], &[2.0, 3.0], 1e-4);
        assert!((j[0][0] - 3.0).abs() < 1e-9 && (j[0][1] - 2.0).abs() < 1e-9);
        assert!((j[1][0] - 1.0).abs() < 1e-9 && j[1][1].abs() < 1e-12);
    }
}
