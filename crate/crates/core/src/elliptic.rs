//! Short Weierstrass curves `y² = x³ + ax + b` with integer coefficients and
//! their rational points, using exact rational arithmetic throughout.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith;

/// Orders admitted for rational torsion points (Mazur).
pub const ADMISSIBLE_TORSION_ORDERS: [u32; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular curve: 4a^3 + 27b^2 = 0 for a = {a}, b = {b}")]
    SingularCurve { a: BigInt, b: BigInt },
    #[error("point {0} is not on the curve")]
    NotOnCurve(Point),
    #[error("expected an affine point")]
    PointAtInfinity,
    #[error("denominators of {0} are not of the form e^2, e^3")]
    NonCanonicalDenominators(Point),
    #[error("torsion point {point} of order {order} violates Lutz-Nagell")]
    LutzNagellViolation { point: Point, order: u32 },
    #[error("could not parse point coordinate {0:?}")]
    Parse(String),
}

/// A nonsingular curve `y² = x³ + ax + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve {
    a: BigInt,
    b: BigInt,
    discriminant: BigInt,
}

/// A rational point: the identity at infinity or an affine pair in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

/// Integral form of an affine point: `x = k/e²`, `y = m/e³` with
/// `gcd(k, e) = gcd(m, e) = 1`, so that `m² = k³ + a·k·e⁴ + b·e⁶`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalPoint {
    pub k: BigInt,
    pub m: BigInt,
    pub e: BigInt,
}

impl Point {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        Point::Affine { x, y }
    }

    pub fn from_integers(x: i64, y: i64) -> Self {
        Point::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    /// Parses decimal integers or fractions such as `129/100`.
    pub fn parse(x: &str, y: &str) -> Result<Self, CurveError> {
        let parse =
            |s: &str| BigRational::from_str(s.trim()).map_err(|_| CurveError::Parse(s.to_string()));
        Ok(Point::Affine {
            x: parse(x)?,
            y: parse(y)?,
        })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x: x.clone(),
                y: -y,
            },
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl CanonicalPoint {
    pub fn to_point(&self) -> Point {
        let e2 = &self.e * &self.e;
        let e3 = &e2 * &self.e;
        Point::Affine {
            x: BigRational::new(self.k.clone(), e2),
            y: BigRational::new(self.m.clone(), e3),
        }
    }

    /// Checks `m² = k³ + a·k·e⁴ + b·e⁶`.
    pub fn satisfies(&self, curve: &Curve) -> bool {
        let e2 = &self.e * &self.e;
        let e4 = &e2 * &e2;
        let e6 = &e4 * &e2;
        let lhs = &self.m * &self.m;
        let rhs = &self.k * &self.k * &self.k + &curve.a * &self.k * e4 + &curve.b * e6;
        lhs == rhs
    }
}

/// `Δ = −16(4a³ + 27b²)`; zero exactly for singular curves.
pub fn discriminant(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(-16) * (BigInt::from(4) * a * a * a + BigInt::from(27) * b * b)
}

impl Curve {
    /// Validates `Δ ≠ 0`.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self, CurveError> {
        let (a, b) = (a.into(), b.into());
        let discriminant = discriminant(&a, &b);
        if discriminant.is_zero() {
            return Err(CurveError::SingularCurve { a, b });
        }
        Ok(Curve { a, b, discriminant })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `−16(4a³ + 27b²)`.
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Right-hand side `x³ + ax + b`.
    pub fn rhs(&self, x: &BigRational) -> BigRational {
        x * x * x
            + BigRational::from_integer(self.a.clone()) * x
            + BigRational::from_integer(self.b.clone())
    }

    pub fn on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    fn ensure_on_curve(&self, p: &Point) -> Result<(), CurveError> {
        if self.on_curve(p) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(p.clone()))
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point, CurveError> {
        self.ensure_on_curve(p)?;
        self.ensure_on_curve(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if y1 != y2 || y1.is_zero() {
                return Point::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            (three * x1 * x1 + BigRational::from_integer(self.a.clone())) / (two * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &slope * &slope - x1 - x2;
        let y3 = slope * (x1 - &x3) - y1;
        Point::Affine { x: x3, y: y3 }
    }

    /// `n·P` by double-and-add; negative `n` multiplies the inverse.
    pub fn scalar_mul(&self, n: &BigInt, p: &Point) -> Result<Point, CurveError> {
        self.ensure_on_curve(p)?;
        let base = if n.is_negative() {
            p.negate()
        } else {
            p.clone()
        };
        let n = n.abs();
        let mut acc = Point::Infinity;
        for i in (0..n.bits()).rev() {
            acc = self.add_unchecked(&acc, &acc);
            if n.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
        }
        Ok(acc)
    }

    /// Writes an affine point as `(k/e², m/e³)` in lowest terms.
    pub fn canonicalize(&self, p: &Point) -> Result<CanonicalPoint, CurveError> {
        self.ensure_on_curve(p)?;
        let Point::Affine { x, y } = p else {
            return Err(CurveError::PointAtInfinity);
        };
        let e = arith::isqrt(x.denom());
        if &(&e * &e) != x.denom() || *y.denom() != &e * &e * &e {
            return Err(CurveError::NonCanonicalDenominators(p.clone()));
        }
        let canonical = CanonicalPoint {
            k: x.numer().clone(),
            m: y.numer().clone(),
            e,
        };
        debug_assert!(canonical.satisfies(self));
        Ok(canonical)
    }

    /// Order of `p` if it is torsion, `None` if it has infinite order.
    ///
    /// Tries the orders Mazur allows over ℚ; any point whose multiples avoid
    /// the identity up to 12 has infinite order. Found torsion points are
    /// cross-checked against Lutz-Nagell.
    pub fn torsion_order(&self, p: &Point) -> Result<Option<u32>, CurveError> {
        self.ensure_on_curve(p)?;
        let mut multiple = p.clone();
        for n in 1..=12u32 {
            if multiple.is_infinity() {
                if !ADMISSIBLE_TORSION_ORDERS.contains(&n) {
                    return Err(CurveError::LutzNagellViolation {
                        point: p.clone(),
                        order: n,
                    });
                }
                self.check_lutz_nagell(p, n)?;
                return Ok(Some(n));
            }
            multiple = self.add_unchecked(&multiple, p);
        }
        Ok(None)
    }

    fn check_lutz_nagell(&self, p: &Point, order: u32) -> Result<(), CurveError> {
        let Point::Affine { x, y } = p else {
            return Ok(());
        };
        let violation = || CurveError::LutzNagellViolation {
            point: p.clone(),
            order,
        };
        if !x.is_integer() || !y.is_integer() {
            return Err(violation());
        }
        let y = y.to_integer();
        if !y.is_zero() && !self.discriminant.is_multiple_of(&(&y * &y)) {
            return Err(violation());
        }
        Ok(())
    }
}

impl CanonicalPoint {
    pub fn is_integral(&self) -> bool {
        self.e.is_one()
    }
}
