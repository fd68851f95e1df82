//! Elements of the circle group, kept exact as roots of unity when possible.

use num_complex::Complex64;
use num_integer::Integer;
use std::f64::consts::TAU;
use std::fmt;

/// Tolerance used when comparing approximate phases.
pub const PHASE_TOL: f64 = 1e-9;

/// Largest root-of-unity order tried when snapping approximate phases.
pub const SNAP_MAX_ORDER: u32 = 24;

/// Distance within which an approximate phase is snapped to an exact root of unity.
pub const SNAP_TOL: f64 = 1e-6;

/// A point of the unit circle.
///
/// `Exact { k, n }` stands for `exp(2πik/n)` and is always stored reduced
/// (`gcd(k, n) = 1`, or `k = 0, n = 1`). `Approx` carries a complex value of
/// modulus one up to [`PHASE_TOL`].
#[derive(Debug, Clone, Copy)]
pub enum Phase {
    Exact { k: u32, n: u32 },
    Approx(Complex64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhaseError {
    #[error("root of unity order must be at least 1")]
    ZeroOrder,
    #[error("value {0} does not lie on the unit circle")]
    NotUnimodular(Complex64),
}

impl Phase {
    pub const ONE: Phase = Phase::Exact { k: 0, n: 1 };

    /// `exp(2πik/n)`, reduced.
    pub fn root_of_unity(k: u64, n: u32) -> Result<Phase, PhaseError> {
        if n == 0 {
            return Err(PhaseError::ZeroOrder);
        }
        let k = (k % n as u64) as u32;
        Ok(Self::reduced(k, n))
    }

    fn reduced(k: u32, n: u32) -> Phase {
        if k == 0 {
            return Phase::ONE;
        }
        let g = k.gcd(&n);
        Phase::Exact { k: k / g, n: n / g }
    }

    pub fn approx(z: Complex64) -> Result<Phase, PhaseError> {
        if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > PHASE_TOL {
            return Err(PhaseError::NotUnimodular(z));
        }
        Ok(Phase::Approx(z))
    }

    /// Snap `z` to the lowest-order root of unity within [`SNAP_TOL`], scanning
    /// orders up to [`SNAP_MAX_ORDER`]; otherwise keep it approximate.
    pub fn snap(z: Complex64) -> Result<Phase, PhaseError> {
        let p = Phase::approx(z)?;
        for n in 1..=SNAP_MAX_ORDER {
            let turns = z.arg() / TAU * n as f64;
            let k = turns.round().rem_euclid(n as f64) as u32;
            let candidate = Self::reduced(k, n);
            if (candidate.to_complex() - z).norm() <= SNAP_TOL {
                return Ok(candidate);
            }
        }
        Ok(p)
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::Exact { k, n } => Complex64::from_polar(1.0, TAU * k as f64 / n as f64),
            Phase::Approx(z) => z,
        }
    }

    pub fn is_one(self) -> bool {
        self == Phase::ONE
    }

    /// Complex conjugate, which is also the group inverse.
    pub fn conj(self) -> Phase {
        match self {
            Phase::Exact { k, n } => Self::reduced((n - k) % n, n),
            Phase::Approx(z) => Phase::Approx(z.conj()),
        }
    }

    pub fn distance(self, other: Phase) -> f64 {
        (self.to_complex() - other.to_complex()).norm()
    }
}

/// Exact phases compare by reduced fraction; anything involving an
/// approximate phase compares within [`PHASE_TOL`].
impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        match (self, other) {
            (Phase::Exact { k: a, n: p }, Phase::Exact { k: b, n: q }) => {
                let l = p.lcm(&q) as u64;
                let num = a as u64 * (l / p as u64) + b as u64 * (l / q as u64);
                Self::reduced((num % l) as u32, l as u32)
            }
            _ => Phase::Approx(self.to_complex() * other.to_complex()),
        }
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Phase) -> bool {
        match (self, other) {
            (Phase::Exact { k: a, n: p }, Phase::Exact { k: b, n: q }) => a == b && p == q,
            _ => self.distance(*other) <= PHASE_TOL,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phase::Exact { k: 0, .. } => write!(f, "1"),
            Phase::Exact { k: 1, n: 2 } => write!(f, "-1"),
            Phase::Exact { k, n } => write!(f, "e^(2πi·{k}/{n})"),
            Phase::Approx(z) => write!(
                f,
                "{}{}{}i",
                crate::report::sig12(z.re),
                if z.im < 0.0 { "-" } else { "+" },
                crate::report::sig12(z.im.abs())
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_reduces() {
        let a = Phase::root_of_unity(1, 4).unwrap();
        let b = Phase::root_of_unity(1, 4).unwrap();
        assert_eq!(a * b, Phase::Exact { k: 1, n: 2 });
        assert_eq!(a * a.conj(), Phase::ONE);
        assert_eq!(Phase::root_of_unity(2, 6).unwrap(), Phase::Exact { k: 1, n: 3 });
        let sixth = Phase::root_of_unity(1, 6).unwrap();
        let third = Phase::root_of_unity(1, 3).unwrap();
        assert_eq!(sixth * third, Phase::Exact { k: 1, n: 2 });
    }

    #[test]
    fn snapping() {
        let z = Complex64::new(-1.0, 1e-8);
        assert_eq!(Phase::snap(z).unwrap(), Phase::Exact { k: 1, n: 2 });
        let w = Complex64::from_polar(1.0, 0.123);
        assert!(matches!(Phase::snap(w).unwrap(), Phase::Approx(_)));
        assert!(Phase::snap(Complex64::new(0.5, 0.0)).is_err());
        let i = Phase::snap(Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(i, Phase::Exact { k: 1, n: 4 });
    }

    #[test]
    fn mixed_comparison_uses_tolerance() {
        let exact = Phase::root_of_unity(1, 3).unwrap();
        let approx = Phase::approx(exact.to_complex()).unwrap();
        assert_eq!(exact, approx);
        assert!(Phase::root_of_unity(0, 0).is_err());
    }
}
