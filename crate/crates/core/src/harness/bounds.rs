use super::Regime;
use crate::error::{Result, RigError};

/// Truncation level for `E2`.
pub const TRUNCATION_A: usize = 6;
/// Exponent slack in the coupling error term.
pub const DELTA_THM4: f64 = 0.1;

/// The slowly growing factor used in the bounds: `ln ln (n + 16)`.
pub fn omega(n: usize) -> f64 {
    (n as f64 + 16.0).ln().ln()
}

/// `1/sqrt(d)`, the leading term of the small-`np` upper bound.
pub fn thm3_shape(d: f64) -> f64 {
    1.0 / d.sqrt()
}

/// Raw shape of the bound attached to a regime, without constant factors.
pub fn regime_bound(regime: Regime, n: usize, m: usize, p: f64, epsilon: f64, omega: f64) -> Result<f64> {
    let (nf, mf) = (n as f64, m as f64);
    let np = nf * p;
    let mp = mf * p;
    let mp2 = mp * p;
    match regime {
        Regime::Thm2 => {
            if m <= n {
                return Err(RigError::RegimeInvalid(format!("needs m > n, got m = {m}, n = {n}")));
            }
            let log_ratio = (mf / nf).ln();
            if np <= log_ratio {
                return Err(RigError::RegimeInvalid(format!(
                    "needs np > ln(m/n) = {log_ratio:.4}, got {np:.4}"
                )));
            }
            Ok((log_ratio / np).sqrt() + nf / mf + omega * mp2)
        }
        Regime::Thm3 => {
            let d = nf * mp2;
            if d < 1.0 - 1e-9 {
                return Err(RigError::RegimeInvalid(format!("needs d >= 1, got {d:.4}")));
            }
            Ok(thm3_shape(d) + np * np + omega * mp2)
        }
        Regime::Cor1 => {
            if !(0.0..1.0).contains(&epsilon) {
                return Err(RigError::RegimeInvalid(format!("needs 0 <= eps < 1, got {epsilon}")));
            }
            Ok((1.0 - 31.0 * epsilon) * (-2.0 * mp).exp())
        }
        Regime::Thm4 => {
            if np >= 1.0 {
                return Err(RigError::RegimeInvalid(format!("needs np < 1, got {np:.4}")));
            }
            Ok(np.powf(1.0 - DELTA_THM4))
        }
        Regime::Custom => Err(RigError::RegimeInvalid("custom sweeps carry no bound".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm3_limit() {
        // d = 1 with np and mp^2 negligible.
        let b = regime_bound(Regime::Thm3, 1_000_000, 1_000_000_000_000, 1e-9, 0.0, 1.0).unwrap();
        assert!((b - 1.0).abs() < 1e-5);
        assert!(regime_bound(Regime::Thm3, 100, 10, 0.01, 0.0, 1.0).is_err());
    }

    #[test]
    fn cor1_at_zero() {
        assert_eq!(regime_bound(Regime::Cor1, 10, 10, 0.0, 0.0, 1.0).unwrap(), 1.0);
        assert!(regime_bound(Regime::Cor1, 10, 10, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn thm2_direct_evaluation() {
        let (n, m, p, w) = (300usize, 3000usize, 0.0133, 3.0);
        let np = n as f64 * p;
        let mp2 = m as f64 * p * p;
        let expect = ((10f64).ln() / np).sqrt() + 0.1 + w * mp2;
        let b = regime_bound(Regime::Thm2, n, m, p, 0.0, w).unwrap();
        assert!((b - expect).abs() < 1e-12);
        assert!((mp2 - 0.53).abs() < 0.01 && (np - 4.0).abs() < 0.02);
        assert!(regime_bound(Regime::Thm2, 300, 200, 0.1, 0.0, w).is_err());
        assert!(regime_bound(Regime::Thm2, 300, 3000, 0.005, 0.0, w).is_err());
    }

    #[test]
    fn thm4_and_custom() {
        let b = regime_bound(Regime::Thm4, 10_000, 2_000_000, 1e-5, 0.0, 1.0).unwrap();
        assert!((b - 0.1f64.powf(0.9)).abs() < 1e-12);
        assert!(regime_bound(Regime::Thm4, 100, 10, 0.02, 0.0, 1.0).is_err());
        assert!(regime_bound(Regime::Custom, 100, 10, 0.02, 0.0, 1.0).is_err());
    }

    #[test]
    fn omega_grows_slowly() {
        assert!(omega(0) > 1.0);
        assert!(omega(100_000) < 2.5);
    }
}
