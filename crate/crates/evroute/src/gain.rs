//! Exact integer arc gains with an explicit `-inf` sentinel.
//!
//! The solver's correctness rests on exact comparison chains, so gains are
//! integers, never floats. `NegInf` is a real enum variant rather than a
//! numeric minimum so that absorption under addition is explicit.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

/// Finite gains saturate at this ceiling. Positive-gain cycles let shortcut
/// values double every pass, so without a ceiling they overflow i64 long
/// before the driver finishes. Everything the algorithm compares against is
/// far below the ceiling (negative values are bounded by -B, and any simple
/// path gain is at most (n-1)*B), so saturation never changes a decision.
pub const GAIN_SATURATION: i64 = 1 << 48;

/// An arc or path gain: a finite integer or minus infinity (no arc / no path).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Gain {
    #[default]
    NegInf,
    Finite(i64),
}

impl Gain {
    pub const ZERO: Gain = Gain::Finite(0);

    #[inline]
    pub fn finite(self) -> Option<i64> {
        match self {
            Gain::NegInf => None,
            Gain::Finite(v) => Some(v),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        matches!(self, Gain::Finite(_))
    }

    /// Finite value, panicking on `NegInf`. For contexts where finiteness is
    /// an invariant, not an input property.
    #[inline]
    #[track_caller]
    pub fn expect_finite(self) -> i64 {
        match self {
            Gain::Finite(v) => v,
            Gain::NegInf => panic!("gain unexpectedly -inf"),
        }
    }

    #[inline]
    pub fn max(self, other: Gain) -> Gain {
        if other > self {
            other
        } else {
            self
        }
    }

    /// min{self, 0}, the descending-with-drops contribution of an arc.
    #[inline]
    pub fn min_zero(self) -> Gain {
        match self {
            Gain::NegInf => Gain::NegInf,
            Gain::Finite(v) => Gain::Finite(v.min(0)),
        }
    }
}

impl Add for Gain {
    type Output = Gain;

    /// `NegInf` absorbs; finite sums saturate at [`GAIN_SATURATION`].
    #[inline]
    fn add(self, rhs: Gain) -> Gain {
        match (self, rhs) {
            (Gain::Finite(a), Gain::Finite(b)) => Gain::Finite(sat_add(a, b)),
            _ => Gain::NegInf,
        }
    }
}

impl Add<i64> for Gain {
    type Output = Gain;

    #[inline]
    fn add(self, rhs: i64) -> Gain {
        match self {
            Gain::Finite(a) => Gain::Finite(sat_add(a, rhs)),
            Gain::NegInf => Gain::NegInf,
        }
    }
}

/// Saturating add used for all finite gain arithmetic.
#[inline]
pub fn sat_add(a: i64, b: i64) -> i64 {
    (a + b).min(GAIN_SATURATION)
}

impl Sum for Gain {
    fn sum<I: Iterator<Item = Gain>>(iter: I) -> Gain {
        iter.fold(Gain::ZERO, |acc, g| acc + g)
    }
}

impl PartialOrd for Gain {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gain {
    /// `NegInf` compares strictly below every finite value.
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Gain::NegInf, Gain::NegInf) => Ordering::Equal,
            (Gain::NegInf, Gain::Finite(_)) => Ordering::Less,
            (Gain::Finite(_), Gain::NegInf) => Ordering::Greater,
            (Gain::Finite(a), Gain::Finite(b)) => a.cmp(b),
        }
    }
}

impl From<i64> for Gain {
    #[inline]
    fn from(v: i64) -> Gain {
        Gain::Finite(v)
    }
}

impl fmt::Display for Gain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gain::NegInf => write!(f, "-inf"),
            Gain::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Gain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A battery charge level: in `[0, B]` for a reachable state, `NegInf` for
/// unreachable. Shares the `Gain` representation; the table layer enforces
/// the range.
pub type Charge = Gain;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neg_inf_absorbs_under_addition() {
        assert_eq!(Gain::NegInf + Gain::Finite(5), Gain::NegInf);
        assert_eq!(Gain::Finite(5) + Gain::NegInf, Gain::NegInf);
        assert_eq!(Gain::NegInf + Gain::NegInf, Gain::NegInf);
        assert_eq!(Gain::Finite(2) + Gain::Finite(3), Gain::Finite(5));
    }

    #[test]
    fn neg_inf_below_every_finite_value() {
        assert!(Gain::NegInf < Gain::Finite(i64::MIN / 2));
        assert!(Gain::NegInf < Gain::Finite(0));
        assert!(Gain::Finite(-1) < Gain::Finite(0));
        assert_eq!(Gain::NegInf.max(Gain::Finite(-7)), Gain::Finite(-7));
    }

    #[test]
    fn addition_saturates() {
        let big = Gain::Finite(GAIN_SATURATION - 1);
        assert_eq!(big + big, Gain::Finite(GAIN_SATURATION));
        assert_eq!(
            Gain::Finite(GAIN_SATURATION) + Gain::Finite(-3),
            Gain::Finite(GAIN_SATURATION - 3)
        );
    }
}
