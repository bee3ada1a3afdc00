use super::{betainc, Probability, StatsError};

fn check_args<T: Probability>(k: u64, n: u64, p: T) -> Result<(), StatsError> {
    if k > n {
        return Err(StatsError::Domain("binomial requires k <= n"));
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(StatsError::Domain("binomial requires 0 <= p <= 1"));
    }
    Ok(())
}

/// Pr[Bin(n, p) <= k].
///
/// Uses `Pr[X <= k] = I_{1-p}(n - k, k + 1)`.
pub fn binomial_cdf<T: Probability>(k: u64, n: u64, p: T) -> Result<T, StatsError> {
    check_args(k, n, p)?;
    if k == n || p == T::zero() {
        return Ok(T::one());
    }
    if p == T::one() {
        return Ok(T::zero());
    }
    let a = T::from_u64(n - k).unwrap();
    let b = T::from_u64(k + 1).unwrap();
    betainc(a, b, T::one() - p)
}

/// Pr[Bin(n, p) >= k], computed directly as `I_p(k, n - k + 1)` rather than
/// as a complement so small upper tails keep their precision.
pub fn binomial_at_least<T: Probability>(k: u64, n: u64, p: T) -> Result<T, StatsError> {
    check_args(k, n, p)?;
    if k == 0 || p == T::one() {
        return Ok(T::one());
    }
    if p == T::zero() {
        return Ok(T::zero());
    }
    let a = T::from_u64(k).unwrap();
    let b = T::from_u64(n - k + 1).unwrap();
    betainc(a, b, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!((binomial_cdf(1, 2, 0.5_f64).unwrap() - 0.75).abs() < 1e-14);
        assert!((binomial_cdf(0, 5, 0.2_f64).unwrap() - 0.32768).abs() < 1e-14);
        assert!((binomial_cdf(2, 4, 0.5_f64).unwrap() - 0.6875).abs() < 1e-14);
        assert_eq!(binomial_cdf(3, 3, 0.4_f64).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_p() {
        assert_eq!(binomial_cdf(0, 4, 0.0_f64).unwrap(), 1.0);
        assert_eq!(binomial_cdf(3, 4, 1.0_f64).unwrap(), 0.0);
        assert_eq!(binomial_at_least(1, 4, 0.0_f64).unwrap(), 0.0);
        assert_eq!(binomial_at_least(0, 4, 0.3_f64).unwrap(), 1.0);
    }

    #[test]
    fn complement_agrees() {
        for n in 1..40u64 {
            for k in 1..=n {
                let p = 0.37_f64;
                let lhs = binomial_at_least(k, n, p).unwrap();
                let rhs = 1.0 - binomial_cdf(k - 1, n, p).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(binomial_cdf(5, 4, 0.5_f64).is_err());
        assert!(binomial_cdf(1, 4, 1.5_f64).is_err());
        assert!(binomial_cdf(1, 4, f64::NAN).is_err());
    }
}
