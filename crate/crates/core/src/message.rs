//! The message `M`: a finite alphabet with a prior pmf.

use rand::Rng;

use crate::error::{invalid, Result};

/// Message symbols are real labels; drifts interpret them (antipodal drifts
/// read ±1 as a sign, the saturated drift adds the label to the output).
pub type Symbol = f64;

const PMF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    alphabet: Vec<Symbol>,
    prior: Vec<f64>,
}

impl Message {
    pub fn new(alphabet: Vec<Symbol>, prior: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() {
            return invalid("message alphabet is empty");
        }
        if alphabet.len() != prior.len() {
            return invalid("alphabet and prior have different lengths");
        }
        if alphabet.iter().any(|s| !s.is_finite()) {
            return invalid("message symbols must be finite");
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return invalid(format!("duplicate symbol {a} in alphabet"));
            }
        }
        if prior.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return invalid("prior entries must be finite and nonnegative");
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return invalid(format!("prior sums to {total}, not 1"));
        }
        Ok(Self { alphabet, prior })
    }

    pub fn uniform(alphabet: Vec<Symbol>) -> Result<Self> {
        let k = alphabet.len().max(1);
        Self::new(alphabet, vec![1.0 / k as f64; k])
    }

    /// `{−1, +1}` with `P(M = +1) = p_plus`.
    pub fn antipodal(p_plus: f64) -> Result<Self> {
        Self::new(vec![-1.0, 1.0], vec![1.0 - p_plus, p_plus])
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    /// Draws a symbol index from the prior.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.prior.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // rounding left u above the cumulative total: last positive entry
        self.prior.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// `H(M)` in nats.
    pub fn entropy(&self) -> f64 {
        self.prior.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn validation() {
        assert!(Message::new(vec![], vec![]).is_err());
        assert!(Message::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(Message::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(Message::new(vec![1.0, 2.0], vec![-0.5, 1.5]).is_err());
        assert!(Message::new(vec![1.0], vec![1.0]).is_ok());
        assert!(Message::antipodal(1.0).is_ok());
    }

    #[test]
    fn sampling_follows_prior() {
        let m = Message::antipodal(0.25).unwrap();
        let mut r = rng::stream(1, 0);
        let n = 40_000;
        let plus = (0..n).filter(|_| m.sample_index(&mut r) == 1).count();
        let f = plus as f64 / n as f64;
        assert!((f - 0.25).abs() < 4.0 * (0.25 * 0.75 / n as f64).sqrt());
    }

    #[test]
    fn point_mass_always_sampled() {
        let m = Message::new(vec![-1.0, 1.0], vec![0.0, 1.0]).unwrap();
        let mut r = rng::stream(2, 0);
        assert!((0..1000).all(|_| m.sample_index(&mut r) == 1));
        assert_eq!(m.entropy(), 0.0);
    }

    #[test]
    fn uniform_entropy() {
        let m = Message::uniform(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((m.entropy() - 4f64.ln()).abs() < 1e-15);
    }
}
