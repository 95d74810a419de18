//! Girsanov-type exponents, in nats.
//!
//! * A₁: `−∫ g dY + ½∫ g² ds` on a (fine) path, Itô left-endpoint sums.
//! * A₂: A₁ with the drift frozen at the left end of each step of a coarser
//!   grid and read on the piecewise-linear version of the path; both
//!   integrals are exact finite sums.
//! * A₃: the exponent of the product-Gaussian density of EM increments,
//!   `Σ (−2 Gᵢ ΔYᵢ + Gᵢ²) / (2 δᵢ)` with `Gᵢ` the step drift integral.
//!
//! A₁ only approximates the continuous-time exponent when the path grid is
//! fine relative to the drift's variation; a step of 1e−3·T or smaller is a
//! reasonable default for the builtin drifts.

use crate::drift::Drift;
use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::message::Symbol;
use crate::path::{PathPrefix, SamplePath};
use crate::stats::KahanSum;

use super::em::{step_drift_integral, EmPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    A1,
    A2,
    A3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirsanovExponent {
    pub value: f64,
    pub kind: ExponentKind,
}

/// Log-density contribution `−(−2GΔY + G²)/(2δ)` of one EM step, Gaussian
/// normalization omitted (it cancels between hypotheses).
#[inline]
pub(crate) fn step_log_likelihood(g_int: f64, dy: f64, dt: f64) -> f64 {
    -((-2.0 * g_int * dy + g_int * g_int) / (2.0 * dt))
}

fn left_point_exponent(drift: &dyn Drift, m: Symbol, times: &[f64], y: &[f64]) -> f64 {
    let mut sum = KahanSum::new();
    for i in 0..times.len() - 1 {
        let g = drift.eval(times[i], m, &PathPrefix::new(&times[..=i], &y[..=i]));
        let dt = times[i + 1] - times[i];
        sum.add(-g * (y[i + 1] - y[i]));
        sum.add(0.5 * g * g * dt);
    }
    sum.value()
}

pub fn exponent_a1(drift: &dyn Drift, m: Symbol, path: &SamplePath) -> GirsanovExponent {
    GirsanovExponent {
        value: left_point_exponent(drift, m, path.grid().points(), path.values()),
        kind: ExponentKind::A1,
    }
}

/// A₂ for the partition `grid`, which must nest in the path's grid.
pub fn exponent_a2(drift: &dyn Drift, m: Symbol, grid: &TimeGrid, path: &SamplePath) -> Result<GirsanovExponent> {
    let Some(idx) = grid.embedding_in(path.grid()) else {
        return invalid("A2 partition is not nested in the path grid");
    };
    let y: Vec<f64> = idx.iter().map(|&j| path.values()[j]).collect();
    Ok(GirsanovExponent {
        value: left_point_exponent(drift, m, grid.points(), &y),
        kind: ExponentKind::A2,
    })
}

/// A₃ of hypothesis `m` evaluated on the EM path `em` (which may have been
/// generated under a different message).
pub fn exponent_a3(drift: &dyn Drift, m: Symbol, em: &EmPath) -> GirsanovExponent {
    let times = em.grid().points();
    let y = em.values();
    let mut sum = KahanSum::new();
    for i in 0..times.len() - 1 {
        let prefix = PathPrefix::new(&times[..=i], &y[..=i]);
        let g = step_drift_integral(drift, m, &prefix, times[i], times[i + 1]);
        sum.add(-step_log_likelihood(g, y[i + 1] - y[i], times[i + 1] - times[i]));
    }
    GirsanovExponent {
        value: sum.value(),
        kind: ExponentKind::A3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::BrownianPath;
    use crate::discretize::simulate_em;
    use crate::drift::{ConstantAntipodal, FnDrift, SaturatedFeedback, ZeroDrift};
    use crate::rng;
    use approx::assert_relative_eq;

    fn constant(c: f64) -> FnDrift {
        FnDrift::new("const", 0.0, c.abs(), false, move |_, _, _| c)
    }

    #[test]
    fn zero_drift_exponents_vanish() {
        let g = TimeGrid::even(1.0, 64).unwrap();
        let b = BrownianPath::sample(&g, 1);
        let em = simulate_em(&ZeroDrift, 1.0, &g, &b).unwrap();
        let coarse = TimeGrid::even(1.0, 8).unwrap();
        assert_eq!(exponent_a1(&ZeroDrift, 1.0, em.path()).value, 0.0);
        assert_eq!(exponent_a2(&ZeroDrift, 1.0, &coarse, em.path()).unwrap().value, 0.0);
        assert_eq!(exponent_a3(&ZeroDrift, 1.0, &em).value, 0.0);
    }

    #[test]
    fn constant_drift_closed_forms() {
        let c = 0.7;
        let g = TimeGrid::even(2.0, 50).unwrap();
        let b = BrownianPath::sample(&g, 2);
        let d = constant(c);
        let em = simulate_em(&d, 0.0, &g, &b).unwrap();
        let yt = em.values()[50];
        let expect = -c * yt + c * c * 2.0 / 2.0;
        let a1 = exponent_a1(&d, 0.0, em.path()).value;
        assert_relative_eq!(a1, expect, max_relative = 1e-12);
        let coarse = TimeGrid::even(2.0, 5).unwrap();
        assert_relative_eq!(
            exponent_a2(&d, 0.0, &coarse, em.path()).unwrap().value,
            expect,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            exponent_a2(&d, 0.0, &g, em.path()).unwrap().value,
            a1,
            max_relative = 1e-14
        );
        assert_relative_eq!(exponent_a3(&d, 0.0, &em).value, expect, max_relative = 1e-12);
    }

    #[test]
    fn one_step_a3() {
        let c = 1.5;
        let g = TimeGrid::even(0.25, 1).unwrap();
        let b = BrownianPath::from_values(g.clone(), vec![0.0, 0.3]).unwrap();
        let em = simulate_em(&constant(c), 0.0, &g, &b).unwrap();
        let dy = em.values()[1];
        let delta = 0.25;
        let expect = (-2.0 * c * delta * dy + c * c * delta * delta) / (2.0 * delta);
        assert_relative_eq!(exponent_a3(&constant(c), 0.0, &em).value, expect, max_relative = 1e-14);
        assert_relative_eq!(expect, -c * dy + c * c * delta / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn antipodal_sign_flip() {
        let g = TimeGrid::even(1.0, 32).unwrap();
        let b = BrownianPath::sample(&g, 3);
        let d = ConstantAntipodal::new(1.0).unwrap();
        let em = simulate_em(&d, 1.0, &g, &b).unwrap();
        let plus = exponent_a1(&d, 1.0, em.path()).value;
        let minus = exponent_a1(&d, -1.0, em.path()).value;
        let quad = 0.5;
        assert_relative_eq!(plus - quad, -(minus - quad), max_relative = 1e-12);
    }

    #[test]
    fn a2_rejects_non_nested_partition() {
        let g = TimeGrid::even(1.0, 8).unwrap();
        let p = BrownianPath::sample(&g, 3).to_sample_path();
        assert!(exponent_a2(&ZeroDrift, 1.0, &TimeGrid::even(1.0, 3).unwrap(), &p).is_err());
    }

    #[test]
    fn a2_approaches_a1_in_mean_square() {
        let fine = TimeGrid::even(1.0, 1024).unwrap();
        let d = SaturatedFeedback::new(1.0).unwrap();
        let coarse: Vec<TimeGrid> = [8, 32, 128].iter().map(|&n| TimeGrid::even(1.0, n).unwrap()).collect();
        let n_paths = 300;
        let mut mse = vec![0.0; coarse.len()];
        for k in 0..n_paths {
            let mut r = rng::stream(21, k);
            let b = BrownianPath::sample_with(&fine, &mut r);
            let m = if k % 2 == 0 { 1.0 } else { -1.0 };
            let em = simulate_em(&d, m, &fine, &b).unwrap();
            let a1 = exponent_a1(&d, m, em.path()).value;
            for (j, g) in coarse.iter().enumerate() {
                let a2 = exponent_a2(&d, m, g, em.path()).unwrap().value;
                mse[j] += (a1 - a2).powi(2) / n_paths as f64;
            }
        }
        assert!(mse[0] > mse[1] && mse[1] > mse[2], "{mse:?}");
        assert!(mse[2] < 0.01);
    }

    #[test]
    fn true_message_has_nonnegative_mean_log_likelihood() {
        let g = TimeGrid::even(1.0, 32).unwrap();
        let d = SaturatedFeedback::new(1.0).unwrap();
        let n = 2000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for k in 0..n {
            let b = BrownianPath::sample_with(&g, &mut rng::stream(22, k));
            let em = simulate_em(&d, 1.0, &g, &b).unwrap();
            let v = -exponent_a3(&d, 1.0, &em).value;
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(mean > -3.0 * se, "{mean} ± {se}");
    }
}
