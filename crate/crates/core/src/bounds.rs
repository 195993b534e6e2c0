//! Sample-size calculators.
//!
//! The constants are fixed choices; only the asymptotic shape is standard.
//!
//! ```text
//! eps_net_size(d, ε, δ)    = ⌈(8/ε)  (d ln(16/ε) + ln(2/δ))⌉
//! eps_approx_size(d, ε, δ) = ⌈(16/ε²)(d ln(16/ε) + ln(2/δ))⌉
//! hoeffding_size(ε, δ)     = ⌈ln(2/δ) / (2ε²)⌉
//! ```

use crate::error::{Error, Result};

fn check(eps: f64, delta: f64) -> Result<()> {
    let ok = |v: f64| v > 0.0 && v < 1.0;
    if !ok(eps) || !ok(delta) {
        return Err(Error::InvalidParameter(format!("epsilon and delta must lie in (0,1), got {eps} and {delta}")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("VC dimension must be at least 1".into()));
    }
    Ok(())
}

pub fn eps_net_size(d: usize, eps: f64, delta: f64) -> Result<usize> {
    check(eps, delta)?;
    check_dim(d)?;
    let v = (8.0 / eps) * (d as f64 * (16.0 / eps).ln() + (2.0 / delta).ln());
    Ok(v.ceil() as usize)
}

pub fn eps_approx_size(d: usize, eps: f64, delta: f64) -> Result<usize> {
    check(eps, delta)?;
    check_dim(d)?;
    let v = (16.0 / (eps * eps)) * (d as f64 * (16.0 / eps).ln() + (2.0 / delta).ln());
    Ok(v.ceil() as usize)
}

pub fn hoeffding_size(eps: f64, delta: f64) -> Result<usize> {
    check(eps, delta)?;
    Ok(((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_values() {
        assert_eq!(hoeffding_size(0.1, 0.05).unwrap(), 185);
        assert_eq!(hoeffding_size(0.05, 0.05).unwrap(), 738);
        assert_eq!(eps_net_size(1, 0.1, 0.1).unwrap(), 646);
        assert_eq!(eps_net_size(2, 0.1, 0.1).unwrap(), 1052);
        assert_eq!(eps_approx_size(1, 0.1, 0.1).unwrap(), 12914);
    }

    #[test]
    fn range_checks() {
        assert!(hoeffding_size(0.0, 0.1).is_err());
        assert!(hoeffding_size(0.1, 1.0).is_err());
        assert!(eps_net_size(0, 0.1, 0.1).is_err());
        assert!(eps_approx_size(1, 1.5, 0.1).is_err());
    }
}
