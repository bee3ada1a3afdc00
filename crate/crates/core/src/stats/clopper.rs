use serde::{Deserialize, Serialize};

use super::{binomial_at_least, binomial_cdf, Probability, StatsError};

const MAX_BISECTIONS: usize = 256;

/// Closed probability interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Probability> Interval<T> {
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, p: T) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Two-sided Clopper-Pearson interval for `k` successes in `n` trials at
/// confidence `1 - delta`, splitting `delta / 2` to each tail.
///
/// Each endpoint is found by bisection on the exact binomial tail until the
/// bracket cannot shrink further in `T`. The returned lower endpoint always
/// satisfies `Pr[Bin(n, lower) >= k] <= delta/2` and the upper endpoint
/// `Pr[Bin(n, upper) <= k] <= delta/2`, so rounding never costs coverage.
pub fn clopper_pearson<T: Probability>(k: u64, n: u64, delta: T) -> Result<Interval<T>, StatsError> {
    if n == 0 || k > n {
        return Err(StatsError::Domain("clopper_pearson requires 0 <= k <= n and n >= 1"));
    }
    if !(delta > T::zero() && delta < T::one()) {
        return Err(StatsError::Domain("clopper_pearson requires 0 < delta < 1"));
    }
    let half = delta / (T::one() + T::one());

    let lower = if k == 0 {
        T::zero()
    } else {
        // Pr[X >= k] increases with p; keep the side where it is <= delta/2.
        let (below, _) = bisect(|p| Ok(binomial_at_least(k, n, p)? <= half))?;
        below
    };
    let upper = if k == n {
        T::one()
    } else {
        // Pr[X <= k] decreases with p; keep the side where it is <= delta/2.
        let (_, above) = bisect(|p| Ok(binomial_cdf(k, n, p)? > half))?;
        above
    };
    Ok(Interval { lower, upper })
}

/// Bisects [0, 1] for the boundary of a monotone predicate that holds at 0
/// and fails at 1. Returns `(last_true, first_false)`.
fn bisect<T, F>(mut holds: F) -> Result<(T, T), StatsError>
where
    T: Probability,
    F: FnMut(T) -> Result<bool, StatsError>,
{
    let two = T::one() + T::one();
    let mut lo = T::zero();
    let mut hi = T::one();
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
