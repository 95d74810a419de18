//! Gauss-Hermite quadrature for integrals against the standard normal.

use std::f64::consts::PI;

/// Orthonormal Hermite value `p_n(z)` and derivative `p_n'(z)`.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `e^{−x²}`, nodes in increasing order.
///
/// Roots are found from the largest down by Newton iteration on the
/// orthonormal Hermite polynomial with the roots already found divided
/// out. Each start sits half a local spacing below the previous root, so
/// it lies above every remaining root and the iteration cannot return to
/// a root it has already found.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Hermite rule needs at least one node");
    let nf = n as f64;
    let mut roots: Vec<f64> = Vec::with_capacity(n.div_ceil(2));
    let mut weights = Vec::with_capacity(n.div_ceil(2));
    for i in 0..n.div_ceil(2) {
        let mut z = if i == 0 {
            (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0)
        } else {
            let prev = roots[i - 1];
            prev - 0.5 * PI / (2.0 * nf + 1.0 - prev * prev).max(1e-3).sqrt()
        };
        for _ in 0..200 {
            let (p, dp) = hermite_orthonormal(n, z);
            if p == 0.0 {
                break;
            }
            let deflate: f64 = roots.iter().map(|r| 1.0 / (z - r)).sum();
            let dz = 1.0 / (dp / p - deflate);
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        for _ in 0..2 {
            let (p, dp) = hermite_orthonormal(n, z);
            if p == 0.0 {
                break;
            }
            z -= p / dp;
        }
        let (_, dp) = hermite_orthonormal(n, z);
        roots.push(z);
        weights.push(2.0 / (dp * dp));
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for (i, (&r, &wt)) in roots.iter().zip(&weights).enumerate() {
        x[i] = -r;
        x[n - 1 - i] = r;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

/// `E[f(Z)]` for `Z ~ N(0, 1)` with an `n`-point rule.
pub fn normal_expectation<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    let (x, w) = gauss_hermite(n);
    let s = std::f64::consts::SQRT_2;
    x.iter().zip(&w).map(|(&x, &w)| w * f(s * x)).sum::<f64>() / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 20, 64, 96, 256] {
            let (x, w) = gauss_hermite(n);
            assert!((w.iter().sum::<f64>() - PI.sqrt()).abs() < 1e-12, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_hermite(2);
        let r = 0.5f64.sqrt();
        assert!((x[1] - r).abs() < 1e-15 && (x[0] + r).abs() < 1e-15);
        assert!((w[0] - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn normal_moments() {
        // E[Z^{2k}] = (2k − 1)!!
        let mut dfact = 1.0;
        for k in 1..8i32 {
            dfact *= (2 * k - 1) as f64;
            let m = normal_expectation(64, |z| z.powi(2 * k));
            assert!((m / dfact - 1.0).abs() < 1e-12, "k={k}");
        }
        assert!(normal_expectation(64, |z| z.powi(3)).abs() < 1e-12);
        assert!((normal_expectation(40, |z| z.cos()) - (-0.5f64).exp()).abs() < 1e-14);
    }
}
