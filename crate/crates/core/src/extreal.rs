//! Nonnegative extended-real scalars.
//!
//! Every gauge and measure in this crate takes values in `[0, +inf]`. A value
//! is either an exact nonnegative `BigRational`, a finite nonnegative `f64`,
//! or the distinguished element `+inf`. Rational-rational arithmetic is exact;
//! any operation touching a float demotes to float and is correctly rounded.
//! Comparisons across representations are exact: a finite `f64` is itself a
//! rational, so mixed comparisons lift the float to `BigRational`.
//!
//! Conventions: `x + inf = inf`, `0 * inf = 0` (the measure-theoretic
//! convention needed by layer-cake sums), and `inf * x = inf` for `x > 0`.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Pow;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Which arithmetic representation produced a value or a verdict.
///
/// `Rational` means every quantity involved stayed an exact rational;
/// `Float` means at least one quantity was carried in IEEE doubles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl Backend {
    /// The backend of a computation combining two inputs: float is contagious.
    pub fn join(self, other: Backend) -> Backend {
        match (self, other) {
            (Backend::Rational, Backend::Rational) => Backend::Rational,
            _ => Backend::Float,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => write!(f, "rational"),
            Backend::Float => write!(f, "float"),
        }
    }
}

/// A value in `[0, +inf]`.
#[derive(Clone)]
pub enum ExtReal {
    /// Exact nonnegative rational.
    Rational(BigRational),
    /// Finite nonnegative double.
    Float(f64),
    /// The point at infinity.
    Infinity,
}

impl ExtReal {
    pub fn zero() -> ExtReal {
        ExtReal::Rational(BigRational::zero())
    }

    pub fn one() -> ExtReal {
        ExtReal::Rational(BigRational::one())
    }

    pub fn infinity() -> ExtReal {
        ExtReal::Infinity
    }

    /// Exact rational from an integer numerator/denominator pair.
    pub fn ratio(num: i64, den: i64) -> ExtReal {
        assert!(den != 0, "zero denominator");
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        assert!(!r.is_negative(), "negative ratio {num}/{den}");
        ExtReal::Rational(r)
    }

    pub fn from_int(n: u64) -> ExtReal {
        ExtReal::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big_rational(r: BigRational) -> Result<ExtReal, Error> {
        if r.is_negative() {
            return Err(Error::NegativeValue(r.to_string()));
        }
        Ok(ExtReal::Rational(r))
    }

    /// Finite nonnegative float, or `Infinity` for `f64::INFINITY`.
    pub fn from_f64(x: f64) -> Result<ExtReal, Error> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::NegativeValue(x.to_string()));
        }
        if x.is_infinite() {
            Ok(ExtReal::Infinity)
        } else {
            Ok(ExtReal::Float(x))
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtReal::Rational(r) => r.is_zero(),
            ExtReal::Float(x) => *x == 0.0,
            ExtReal::Infinity => false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    /// The representation this value is carried in. `Infinity` is neutral and
    /// reports `Rational` so that joins are driven by the finite operands.
    pub fn backend(&self) -> Backend {
        match self {
            ExtReal::Float(_) => Backend::Float,
            _ => Backend::Rational,
        }
    }

    /// Exact rational view; a finite float is lifted through its exact binary
    /// expansion. `None` for infinity.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            ExtReal::Rational(r) => Some(r.clone()),
            ExtReal::Float(x) => BigRational::from_f64(*x),
            ExtReal::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Rational(r) => r.to_f64().unwrap_or(f64::INFINITY),
            ExtReal::Float(x) => *x,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    pub fn add(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Infinity, _) | (_, ExtReal::Infinity) => ExtReal::Infinity,
            (ExtReal::Rational(a), ExtReal::Rational(b)) => ExtReal::Rational(a + b),
            (a, b) => ExtReal::Float(a.to_f64() + b.to_f64()),
        }
    }

    /// Saturating subtraction `max(self - other, 0)`; `inf - finite = inf`,
    /// `x - inf = 0`. Used for level gaps and absolute differences.
    pub fn sub_clamped(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (_, ExtReal::Infinity) => ExtReal::zero(),
            (ExtReal::Infinity, _) => ExtReal::Infinity,
            (ExtReal::Rational(a), ExtReal::Rational(b)) => {
                if a <= b {
                    ExtReal::zero()
                } else {
                    ExtReal::Rational(a - b)
                }
            }
            (a, b) => {
                let d = a.to_f64() - b.to_f64();
                ExtReal::Float(if d < 0.0 { 0.0 } else { d })
            }
        }
    }

    /// `|self - other|`, exact when both operands are rational.
    pub fn abs_diff(&self, other: &ExtReal) -> ExtReal {
        if self >= other {
            self.sub_clamped(other)
        } else {
            other.sub_clamped(self)
        }
    }

    /// Product with the convention `0 * inf = 0`.
    pub fn mul(&self, other: &ExtReal) -> ExtReal {
        if self.is_zero() || other.is_zero() {
            return ExtReal::zero();
        }
        match (self, other) {
            (ExtReal::Infinity, _) | (_, ExtReal::Infinity) => ExtReal::Infinity,
            (ExtReal::Rational(a), ExtReal::Rational(b)) => ExtReal::Rational(a * b),
            (a, b) => ExtReal::Float(a.to_f64() * b.to_f64()),
        }
    }

    /// Division by a finite positive value; exact in the rational-rational
    /// case. Panics on a zero or infinite divisor (callers with the full
    /// `[0,inf]` quotient conventions live in the density module).
    pub fn div_positive(&self, other: &ExtReal) -> ExtReal {
        assert!(!other.is_zero() && other.is_finite(), "divisor must be finite positive");
        match (self, other) {
            (ExtReal::Infinity, _) => ExtReal::Infinity,
            (ExtReal::Rational(a), ExtReal::Rational(b)) => ExtReal::Rational(a / b),
            (a, b) => ExtReal::Float(a.to_f64() / b.to_f64()),
        }
    }

    /// `self^alpha` for `alpha > 0`. Exact when the base is rational, alpha is
    /// rational with a small denominator, and the rational root exists;
    /// otherwise computed in doubles.
    pub fn pow(&self, alpha: &Alpha) -> ExtReal {
        match self {
            ExtReal::Infinity => ExtReal::Infinity,
            _ if self.is_zero() => ExtReal::zero(),
            ExtReal::Rational(base) => {
                if let Alpha::Rational(a) = alpha {
                    if let Some(exact) = rational_pow(base, a) {
                        return ExtReal::Rational(exact);
                    }
                }
                ExtReal::Float(self.to_f64().powf(alpha.to_f64()))
            }
            ExtReal::Float(x) => ExtReal::Float(x.powf(alpha.to_f64())),
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Equality up to `tol` relative to `max(1, max(self, other))` when either
    /// operand is float-backed; exact equality when both are rational.
    pub fn approx_eq(&self, other: &ExtReal, tol: f64) -> bool {
        match (self.backend(), other.backend()) {
            (Backend::Rational, Backend::Rational) => self == other,
            _ => {
                if self.is_infinite() || other.is_infinite() {
                    return self.is_infinite() && other.is_infinite();
                }
                let a = self.to_f64();
                let b = other.to_f64();
                (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
            }
        }
    }

    pub fn sum<'a>(values: impl IntoIterator<Item = &'a ExtReal>) -> ExtReal {
        values
            .into_iter()
            .fold(ExtReal::zero(), |acc, v| acc.add(v))
    }

    /// Serialization token: exact decimal when the rational terminates,
    /// `p/q` otherwise, 17 significant digits for floats, `inf` for infinity.
    pub fn to_token(&self) -> String {
        match self {
            ExtReal::Infinity => "inf".to_string(),
            ExtReal::Float(x) => format!("{:.16e}", x),
            ExtReal::Rational(r) => match decimal_token(r) {
                Some(d) => d,
                None => format!("{}/{}", r.numer(), r.denom()),
            },
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
            (ExtReal::Infinity, _) => Ordering::Greater,
            (_, ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Rational(a), ExtReal::Rational(b)) => a.cmp(b),
            (ExtReal::Float(a), ExtReal::Float(b)) => {
                a.partial_cmp(b).expect("no NaN by construction")
            }
            (a, b) => {
                let ra = a.as_rational().expect("finite");
                let rb = b.as_rational().expect("finite");
                ra.cmp(&rb)
            }
        }
    }
}

impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_token())
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Rational(r) => write!(f, "{}", r),
            ExtReal::Float(x) => write!(f, "{}f", x),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Rational(r) => match decimal_token(r) {
                Some(d) => write!(f, "{}", d),
                None => write!(f, "{}/{}", r.numer(), r.denom()),
            },
            ExtReal::Float(x) => write!(f, "{}", x),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent of a diameter-power gauge; `alpha > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    Rational(BigRational),
    Float(f64),
}

impl Alpha {
    pub fn from_f64(a: f64) -> Result<Alpha, Error> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive finite real, got {a}"
            )));
        }
        Ok(Alpha::Float(a))
    }

    pub fn rational(num: i64, den: i64) -> Alpha {
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        assert!(r.is_positive(), "alpha must be positive");
        Alpha::Rational(r)
    }

    pub fn one() -> Alpha {
        Alpha::Rational(BigRational::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Alpha::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Alpha::Float(x) => *x,
        }
    }
}

// Denominators above this are treated as "not a genuine small rational
// exponent" and routed to floats; exact root extraction on huge powers would
// otherwise blow up on decimal approximations of irrational exponents.
const MAX_EXACT_ROOT: u32 = 64;

fn rational_pow(base: &BigRational, alpha: &BigRational) -> Option<BigRational> {
    let p = alpha.numer();
    let q = alpha.denom();
    let q_small: u32 = q.to_u32().filter(|q| *q <= MAX_EXACT_ROOT)?;
    let p_small: u32 = p.to_u32().filter(|p| *p <= 1024)?;
    let powered = base.pow(p_small as i32);
    if q_small == 1 {
        return Some(powered);
    }
    let num_root = powered.numer().nth_root(q_small);
    let den_root = powered.denom().nth_root(q_small);
    if &(&num_root).pow(q_small) == powered.numer() && &(&den_root).pow(q_small) == powered.denom()
    {
        Some(BigRational::new(num_root, den_root))
    } else {
        None
    }
}

/// Finite decimal expansion of a rational when its reduced denominator is of
/// the form 2^a 5^b; `None` otherwise.
fn decimal_token(r: &BigRational) -> Option<String> {
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut den = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    // Scale numerator so the denominator becomes 10^k.
    let k = twos.max(fives);
    let mut numer = r.numer().clone();
    numer *= five.pow(k - fives);
    numer *= two.pow(k - twos);
    let digits = numer.to_string();
    if k == 0 {
        return Some(digits);
    }
    let k = k as usize;
    let padded = if digits.len() <= k {
        format!("0.{}{}", "0".repeat(k - digits.len()), digits)
    } else {
        format!("{}.{}", &digits[..digits.len() - k], &digits[digits.len() - k..])
    };
    Some(padded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total_and_exact_across_representations() {
        let half_rat = ExtReal::ratio(1, 2);
        let half_float = ExtReal::from_f64(0.5).unwrap();
        assert_eq!(half_rat, half_float);
        let third = ExtReal::ratio(1, 3);
        // 1/3 is not dyadic, so no double equals it; the nearest rounds down.
        let third_float = ExtReal::from_f64(1.0 / 3.0).unwrap();
        assert!(third_float < third);
        assert!(ExtReal::zero() <= third);
        assert!(third < ExtReal::infinity());
    }

    #[test]
    fn addition_conventions() {
        let a = ExtReal::ratio(1, 3);
        let b = ExtReal::ratio(1, 6);
        assert_eq!(a.add(&b), ExtReal::ratio(1, 2));
        assert_eq!(a.add(&ExtReal::infinity()), ExtReal::infinity());
        assert_eq!(ExtReal::infinity().add(&ExtReal::zero()), ExtReal::infinity());
    }

    #[test]
    fn multiplication_zero_infinity_convention() {
        assert_eq!(ExtReal::zero().mul(&ExtReal::infinity()), ExtReal::zero());
        assert_eq!(ExtReal::infinity().mul(&ExtReal::from_int(2)), ExtReal::infinity());
        assert_eq!(
            ExtReal::ratio(3, 4).mul(&ExtReal::ratio(2, 3)),
            ExtReal::ratio(1, 2)
        );
    }

    #[test]
    fn pow_exact_square_root() {
        let quarter = ExtReal::ratio(9, 4);
        let half = Alpha::rational(1, 2);
        assert_eq!(quarter.pow(&half), ExtReal::ratio(3, 2));
        // No exact root: falls back to floats.
        let two = ExtReal::from_int(2);
        match two.pow(&half) {
            ExtReal::Float(x) => assert!((x - std::f64::consts::SQRT_2).abs() < 1e-15),
            other => panic!("expected float fallback, got {other:?}"),
        }
    }

    #[test]
    fn pow_irrational_exponent_forces_float() {
        let alpha = Alpha::from_f64(2f64.ln() / 3f64.ln()).unwrap();
        let third = ExtReal::ratio(1, 3);
        match third.pow(&alpha) {
            ExtReal::Float(x) => assert!((x - 0.5).abs() < 1e-12),
            other => panic!("expected float, got {other:?}"),
        }
    }

    #[test]
    fn tokens() {
        assert_eq!(ExtReal::ratio(1, 4).to_token(), "0.25");
        assert_eq!(ExtReal::ratio(1, 3).to_token(), "1/3");
        assert_eq!(ExtReal::from_int(7).to_token(), "7");
        assert_eq!(ExtReal::infinity().to_token(), "inf");
        assert_eq!(ExtReal::ratio(1234, 100).to_token(), "12.34");
    }

    #[test]
    fn backend_join() {
        assert_eq!(Backend::Rational.join(Backend::Rational), Backend::Rational);
        assert_eq!(Backend::Rational.join(Backend::Float), Backend::Float);
        let v = ExtReal::ratio(1, 2).add(&ExtReal::from_f64(0.25).unwrap());
        assert_eq!(v.backend(), Backend::Float);
    }
}
