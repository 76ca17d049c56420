use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Name of the interval method, recorded in sweep metadata.
pub const CI_METHOD: &str = "wilson";

/// Two-sided Wilson score interval for a binomial proportion.
pub fn confidence_interval(errors: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::param("confidence interval needs at least one trial"));
    }
    if errors > trials {
        return Err(Error::param(format!("{errors} errors in {trials} trials")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param(format!(
            "confidence level {level} not in (0, 1)"
        )));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let hi = if errors == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((lo, hi))
}
