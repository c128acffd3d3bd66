//! Fixed-precision complex scalars for numeric evaluation of periods.
//!
//! All values produced inside one computation share the precision they were
//! created with; binary operations take the precision of the left operand.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexHP {
    pub re: Float,
    pub im: Float,
}

impl ComplexHP {
    pub fn zero(prec: u32) -> Self {
        ComplexHP {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexHP {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        ComplexHP { re, im }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        ComplexHP {
            re: Float::with_val(prec, q),
            im: Float::new(prec),
        }
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        ComplexHP {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    /// Parses a pair of decimal strings, e.g. `("1.5e-7", "-2")`.
    pub fn parse(prec: u32, re: &str, im: &str) -> Option<Self> {
        let re = Float::parse(re.trim()).ok()?;
        let im = Float::parse(im.trim()).ok()?;
        Some(ComplexHP {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        })
    }

    /// Decimal string pair with enough digits to round-trip at this precision.
    pub fn to_strings(&self) -> [String; 2] {
        [float_to_string(&self.re), float_to_string(&self.im)]
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    /// `2πi` at the given precision.
    pub fn two_pi_i(prec: u32) -> Self {
        let two_pi = Self::pi(prec) * 2u32;
        ComplexHP {
            re: Float::new(prec),
            im: two_pi,
        }
    }

    pub fn conj(&self) -> Self {
        ComplexHP {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Principal logarithm shifted by `sheet` full turns.
    pub fn ln_branch(&self, sheet: i64) -> Self {
        let p = self.prec();
        let re = self.abs().ln();
        let mut im = self.arg();
        if sheet != 0 {
            im += Self::pi(p) * Float::with_val(p, 2 * sheet);
        }
        ComplexHP { re, im }
    }

    pub fn ln(&self) -> Self {
        self.ln_branch(0)
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(self.prec()));
        ComplexHP {
            re: Float::with_val(self.prec(), &m * &c),
            im: m * s,
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return ComplexHP::one(self.prec()) / self.powi(-n);
        }
        let mut acc = ComplexHP::one(self.prec());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, f: &Float) -> Self {
        ComplexHP {
            re: Float::with_val(self.prec(), &self.re * f),
            im: Float::with_val(self.prec(), &self.im * f),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        ComplexHP {
            re: Float::with_val(self.prec(), &self.re * q),
            im: Float::with_val(self.prec(), &self.im * q),
        }
    }

    pub fn re_f64(&self) -> f64 {
        self.re.to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64()
    }
}

pub fn float_to_string(f: &Float) -> String {
    // digits needed to round-trip: prec * log10(2) + 2
    let digits = (f.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    f.to_string_radix(10, Some(digits))
}

/// `ζ(3)` at the given precision.
pub fn zeta3(prec: u32) -> Float {
    Float::with_val(prec, 3).zeta()
}

/// `10^e` as a float.
pub fn pow10(prec: u32, e: i32) -> Float {
    Float::with_val(prec, 10).pow(e)
}

impl fmt::Display for ComplexHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} + {:e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl serde::Serialize for ComplexHP {
    /// `["re", "im"]` decimal strings.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.to_strings(), s)
    }
}

impl<'de> serde::Deserialize<'de> for ComplexHP {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[String; 2]>::deserialize(d)?;
        ComplexHP::parse(DEFAULT_PRECISION, &re, &im)
            .ok_or_else(|| serde::de::Error::custom(format!("bad complex number [{re:?}, {im:?}]")))
    }
}

impl<'a> Add<&'a ComplexHP> for &'a ComplexHP {
    type Output = ComplexHP;
    fn add(self, o: &ComplexHP) -> ComplexHP {
        let p = self.prec();
        ComplexHP {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl<'a> Sub<&'a ComplexHP> for &'a ComplexHP {
    type Output = ComplexHP;
    fn sub(self, o: &ComplexHP) -> ComplexHP {
        let p = self.prec();
        ComplexHP {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl<'a> Mul<&'a ComplexHP> for &'a ComplexHP {
    type Output = ComplexHP;
    fn mul(self, o: &ComplexHP) -> ComplexHP {
        let p = self.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        ComplexHP {
            re: rr - ii,
            im: ri + ir,
        }
    }
}

impl<'a> Div<&'a ComplexHP> for &'a ComplexHP {
    type Output = ComplexHP;
    fn div(self, o: &ComplexHP) -> ComplexHP {
        let d = o.norm_sqr();
        let num = self * &o.conj();
        ComplexHP {
            re: num.re / &d,
            im: num.im / &d,
        }
    }
}

impl Neg for &ComplexHP {
    type Output = ComplexHP;
    fn neg(self) -> ComplexHP {
        ComplexHP {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ComplexHP> for ComplexHP {
            type Output = ComplexHP;
            fn $m(self, o: ComplexHP) -> ComplexHP {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a ComplexHP> for ComplexHP {
            type Output = ComplexHP;
            fn $m(self, o: &ComplexHP) -> ComplexHP {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for ComplexHP {
    type Output = ComplexHP;
    fn neg(self) -> ComplexHP {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let z = ComplexHP::from_f64(256, 0.3, -1.7);
        let back = z.ln().exp();
        assert!((&back - &z).abs_f64() < 1e-70);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = ComplexHP::from_f64(128, 2.0, 1.0);
        let b = ComplexHP::from_f64(128, -0.5, 3.0);
        let c = &(&a * &b) / &b;
        assert!((&c - &a).abs_f64() < 1e-35);
    }

    #[test]
    fn branch_shift_adds_two_pi_i() {
        let z = ComplexHP::from_f64(128, -1.0, 1e-3);
        let d = &z.ln_branch(1) - &z.ln();
        assert!((d.im_f64() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(d.re_f64().abs() < 1e-30);
    }

    #[test]
    fn string_roundtrip_is_exact() {
        let z = ComplexHP::from_rationals(256, &Rational::from((1, 3)), &Rational::from((-2, 7)));
        let [re, im] = z.to_strings();
        let back = ComplexHP::parse(256, &re, &im).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn json_is_a_string_pair() {
        let z = ComplexHP::from_f64(DEFAULT_PRECISION, 1.5, -0.25);
        let v = serde_json::to_value(&z).unwrap();
        assert!(v[0].as_str().unwrap().starts_with("1.5"));
        assert_eq!(serde_json::from_value::<ComplexHP>(v).unwrap(), z);
    }

    #[test]
    fn zeta3_value() {
        assert!((zeta3(128).to_f64() - 1.202_056_903_159_594_2).abs() < 1e-15);
    }
}
