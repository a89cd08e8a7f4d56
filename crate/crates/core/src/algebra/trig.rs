//! Exact (sin, cos) pairs for joint offset angles.
//!
//! Only multiples of 90° have rational sine and cosine, and those are the
//! angles the mechanism model is built around. Any other angle is evaluated
//! once as a high-precision rational approximation (rounded to 64 decimal
//! places) and the angle is flagged inexact; inexact angles are rejected in
//! symbolic analysis, where sin² + cos² = 1 must hold identically.

use num::{BigInt, One, Signed, Zero};

use super::Rational;

/// 100 decimal places of pi, used only for inexact-angle evaluation.
const PI_DECIMALS: &str = "31415926535897932384626433832795028841971693993751\
                           05820974944592307816406286208998628034825342117068";

/// Decimal places kept when rationalizing trig values of inexact angles.
pub const TRIG_DECIMAL_CUTOFF: u32 = 64;

/// An offset angle about the base x-axis with its precomputed sine/cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    degrees: Rational,
    sin: Rational,
    cos: Rational,
    exact: bool,
}

impl Angle {
    pub fn from_degrees(degrees: Rational) -> Self {
        let norm = normalize_degrees(&degrees);
        let quarter = Rational::from_integer(90.into());
        if (&norm / &quarter).is_integer() {
            let (sin, cos) = exact_quarter_turn(&norm);
            return Angle {
                degrees,
                sin,
                cos,
                exact: true,
            };
        }
        let radians = &norm * pi() / Rational::from_integer(180.into());
        let sin = round_to_cutoff(&taylor_sin(&radians));
        let cos = round_to_cutoff(&taylor_cos(&radians));
        Angle {
            degrees,
            sin,
            cos,
            exact: false,
        }
    }

    pub fn from_integer_degrees(deg: i64) -> Self {
        Self::from_degrees(Rational::from_integer(deg.into()))
    }

    pub fn degrees(&self) -> &Rational {
        &self.degrees
    }

    pub fn sin(&self) -> &Rational {
        &self.sin
    }

    pub fn cos(&self) -> &Rational {
        &self.cos
    }

    /// True iff the angle is a multiple of 90° and the trig pair is exact.
    pub fn is_exact(&self) -> bool {
        self.exact
    }
}

/// Reduces into (-180, 180].
fn normalize_degrees(deg: &Rational) -> Rational {
    let full = Rational::from_integer(360.into());
    let half = Rational::from_integer(180.into());
    let mut d = deg - (deg / &full).floor() * &full; // [0, 360)
    if d > half {
        d -= full;
    }
    d
}

fn exact_quarter_turn(norm: &Rational) -> (Rational, Rational) {
    let zero = Rational::zero();
    let one = Rational::one();
    let deg = norm.to_integer();
    match deg.to_string().as_str() {
        "0" => (zero, one),
        "90" => (one, zero),
        "-90" => (-one, zero),
        "180" => (zero, -one),
        other => unreachable!("normalized quarter turn out of range: {other}"),
    }
}

fn pi() -> Rational {
    let digits: BigInt = PI_DECIMALS.parse().expect("pi digits");
    let scale = BigInt::from(10u32).pow(PI_DECIMALS.len() as u32 - 1);
    Rational::new(digits, scale)
}

/// Series cutoff: well below the rounding cutoff.
fn term_is_negligible(t: &Rational) -> bool {
    let bound = Rational::new(
        One::one(),
        BigInt::from(10u32).pow(TRIG_DECIMAL_CUTOFF + 8),
    );
    t.abs() < bound
}

fn taylor_sin(x: &Rational) -> Rational {
    let x2 = x * x;
    let mut term = x.clone();
    let mut sum = term.clone();
    let mut n = 1u64;
    while !term_is_negligible(&term) {
        // term_{k+1} = -term_k * x^2 / ((n+1)(n+2))
        term = -(&term * &x2) / Rational::from_integer(((n + 1) * (n + 2)).into());
        sum += &term;
        n += 2;
    }
    sum
}

fn taylor_cos(x: &Rational) -> Rational {
    let x2 = x * x;
    let mut term = Rational::one();
    let mut sum = term.clone();
    let mut n = 0u64;
    while !term_is_negligible(&term) {
        term = -(&term * &x2) / Rational::from_integer(((n + 1) * (n + 2)).into());
        sum += &term;
        n += 2;
    }
    sum
}

fn round_to_cutoff(v: &Rational) -> Rational {
    let scale = Rational::from_integer(BigInt::from(10u32).pow(TRIG_DECIMAL_CUTOFF));
    (v * &scale).round() / scale
}
