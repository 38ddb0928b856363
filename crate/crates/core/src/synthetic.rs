//! Deterministic chaotic benchmark series.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Discrete Mackey-Glass delay recursion
/// `x[t+1] = x[t] + 0.1 x[t-tau] / (1 + x[t-tau]^10) - 0.01 x[t]`.
///
/// History before the first step is held at `x0`. The returned series holds
/// the `n` values that follow the first `warmup` steps; `x0` itself is not
/// emitted.
pub fn mackey_glass(n: usize, tau: usize, x0: f64, warmup: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if tau == 0 {
        return Err(Error::invalid("tau", "must be >= 1"));
    }
    if !(x0 > 0.0 && x0 < 2.0) {
        return Err(Error::invalid("x0", format!("must lie in (0, 2), got {x0}")));
    }

    let total = n + warmup;
    // history[0..=tau] holds x[-tau..=0]
    let mut x = Vec::with_capacity(total + tau + 1);
    x.resize(tau + 1, x0);
    for _ in 0..total {
        let t = x.len() - 1;
        let current = x[t];
        let delayed = x[t - tau];
        let next = current + 0.1 * delayed / (1.0 + delayed.powi(10)) - 0.01 * current;
        x.push(next);
    }
    TimeSeries::new(x.split_off(tau + 1 + warmup))
}

/// Logistic map `x[t+1] = r x[t] (1 - x[t])`, starting with `x0` as the first sample.
pub fn logistic(n: usize, r: f64, x0: f64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if !(r > 0.0 && r <= 4.0) {
        return Err(Error::invalid("r", format!("must lie in (0, 4], got {r}")));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::invalid("x0", format!("must lie in (0, 1), got {x0}")));
    }
    let values = std::iter::successors(Some(x0), |&x| Some(r * x * (1.0 - x)))
        .take(n)
        .collect();
    TimeSeries::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mackey_glass_single_step() {
        let s = mackey_glass(1, 17, 1.2, 0).unwrap();
        let expected = 1.2 + 0.1 * 1.2 / (1.0 + 1.2f64.powi(10)) - 0.012;
        assert_eq!(s.values(), &[expected]);
    }

    #[test]
    fn mackey_glass_is_deterministic() {
        let a = mackey_glass(300, 17, 1.2, 50).unwrap();
        let b = mackey_glass(300, 17, 1.2, 50).unwrap();
        assert!(a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn mackey_glass_not_degenerate() {
        let s = mackey_glass(500, 17, 1.2, 100).unwrap();
        assert_eq!(s.len(), 500);
        let mean = s.values().iter().sum::<f64>() / 500.0;
        let var = s.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 499.0;
        assert!(var > 0.0);
    }

    #[test]
    fn mackey_glass_warmup_drops_prefix() {
        let long = mackey_glass(30, 5, 0.9, 0).unwrap();
        let skipped = mackey_glass(20, 5, 0.9, 10).unwrap();
        assert_eq!(&long.values()[10..], skipped.values());
    }

    #[test]
    fn mackey_glass_rejects_bad_args() {
        assert!(mackey_glass(0, 17, 1.2, 0).is_err());
        assert!(mackey_glass(10, 0, 1.2, 0).is_err());
        assert!(mackey_glass(10, 17, 2.0, 0).is_err());
        assert!(mackey_glass(10, 17, 0.0, 0).is_err());
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic(3, 4.0, 0.5).unwrap().values(), &[0.5, 1.0, 0.0]);
        assert_eq!(logistic(2, 2.0, 0.5).unwrap().values(), &[0.5, 0.5]);
    }

    #[test]
    fn logistic_matches_reiteration() {
        let s = logistic(100, 3.9, 0.3).unwrap();
        let mut x = 0.3f64;
        let mut expected = Vec::new();
        for _ in 0..100 {
            expected.push(x);
            x = 3.9 * x * (1.0 - x);
        }
        assert_eq!(s.values(), expected.as_slice());
    }

    #[test]
    fn logistic_rejects_bad_args() {
        assert!(logistic(5, 0.0, 0.5).is_err());
        assert!(logistic(5, 4.1, 0.5).is_err());
        assert!(logistic(5, 3.0, 1.0).is_err());
        assert!(logistic(0, 3.0, 0.5).is_err());
    }
}
