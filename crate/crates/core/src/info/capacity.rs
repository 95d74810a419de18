//! Closed-form and quadrature references for channel information.

use crate::error::{invalid, Result};

use super::quadrature::normal_expectation;

/// `I(X; √snr·X + Z)` for equiprobable `X = ±1`, `Z ~ N(0, 1)`, at `snr = 1`,
/// in nats. Independently reproduced by 64-node and 256-node Gauss-Hermite
/// rules and by adaptive quadrature; all agree to about 1e-12.
pub const BPSK_SNR1_GOLDEN: f64 = 0.33683082034683;

const HERMITE_NODES: usize = 256;

/// Capacity per unit time of the band-limited feedback channel with power
/// `P` and bandwidth `ω`: `ω·ln(1 + P/(2ω))` nats. It increases to `P/2`
/// as `ω → ∞`.
pub fn capacity_band(power: f64, bandwidth: f64) -> Result<f64> {
    if !(power.is_finite() && power > 0.0) {
        return invalid(format!("power must be positive and finite, got {power}"));
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return invalid(format!("bandwidth must be positive and finite, got {bandwidth}"));
    }
    Ok(bandwidth * (power / (2.0 * bandwidth)).ln_1p())
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mutual information of equiprobable BPSK over AWGN at signal-to-noise
/// ratio `snr`: `ln 2 − E[log(1 + e^{−2·snr − 2√snr·Z})]`.
///
/// This is the information carried by `Y(T)` for the drift `g = a·m` with
/// `snr = a²T`; since `Y(T)` is sufficient there, it is also the
/// information of the whole output path.
pub fn bpsk_awgn_oracle(snr: f64) -> Result<f64> {
    if !(snr.is_finite() && snr >= 0.0) {
        return invalid(format!("snr must be nonnegative and finite, got {snr}"));
    }
    if snr == 0.0 {
        return Ok(0.0);
    }
    let r = snr.sqrt();
    let loss = normal_expectation(HERMITE_NODES, |z| softplus(-2.0 * snr - 2.0 * r * z));
    Ok(std::f64::consts::LN_2 - loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[allow(clippy::too_many_arguments)]
    fn simpson<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }

    fn oracle_by_simpson(snr: f64) -> f64 {
        let r = snr.sqrt();
        let f =
            |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() * softplus(-2.0 * snr - 2.0 * r * z);
        let (a, b) = (-40.0, 40.0);
        let (fa, fm, fb) = (f(a), f(0.0), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        std::f64::consts::LN_2 - simpson(&f, a, b, fa, fm, fb, whole, 1e-14, 50)
    }

    #[test]
    fn golden_value() {
        assert!((bpsk_awgn_oracle(1.0).unwrap() - BPSK_SNR1_GOLDEN).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_adaptive_quadrature() {
        // the softplus kink slows Gauss-Hermite convergence as snr grows
        for snr in [0.01, 0.3, 1.0, 2.5, 6.0] {
            let a = bpsk_awgn_oracle(snr).unwrap();
            let b = oracle_by_simpson(snr);
            let tol = if snr <= 1.0 { 1e-12 } else { 1e-10 };
            assert!((a - b).abs() < tol, "snr={snr}: {a} vs {b}");
        }
    }

    #[test]
    fn oracle_matches_direct_monte_carlo() {
        // direct simulation of the posterior log-ratio of ±1 given √snr·X + Z
        let n = 2_000_000u64;
        let mut r = rng::stream(77, 0);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = if r.random_bool(0.5) { 1.0 } else { -1.0 };
            let z: f64 = r.sample(StandardNormal);
            let y = x + z;
            let v = std::f64::consts::LN_2 - softplus(-2.0 * x * y);
            s1 += v;
            s2 += v * v;
        }
        let mean = s1 / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - BPSK_SNR1_GOLDEN).abs() < 4.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn oracle_limits() {
        assert_eq!(bpsk_awgn_oracle(0.0).unwrap(), 0.0);
        assert!((bpsk_awgn_oracle(60.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        // small snr: I ≈ snr/2
        let s = 1e-4;
        assert!((bpsk_awgn_oracle(s).unwrap() / (s / 2.0) - 1.0).abs() < 1e-3);
        assert!(bpsk_awgn_oracle(-1.0).is_err());
    }

    #[test]
    fn capacity_values() {
        assert!((capacity_band(1.0, 10.0).unwrap() - 10.0 * 1.05f64.ln()).abs() < 1e-15);
        assert!((capacity_band(2.0, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((capacity_band(2.0, 10.0).unwrap() - 0.9531017980432487).abs() < 1e-14);
        assert!((capacity_band(2.0, 100.0).unwrap() - 0.9950330853168083).abs() < 1e-14);
        assert!(capacity_band(0.0, 1.0).is_err());
        assert!(capacity_band(1.0, -1.0).is_err());
    }

    #[test]
    fn capacity_increases_to_half_power() {
        let mut prev = 0.0;
        for w in [0.1, 1.0, 10.0, 1e3, 1e6] {
            let c = capacity_band(2.0, w).unwrap();
            assert!(c > prev && c < 1.0);
            prev = c;
        }
        assert!((1.0 - prev) < 1e-5);
    }
}
