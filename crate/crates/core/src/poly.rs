//! Dense univariate polynomials and rational functions over the rationals.

use std::fmt;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::numeric::ComplexHP;
use crate::series::{parse_rational, rational_to_pq, LogSeries, SeriesError};

/// `Σ c_i z^i`, stored without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        Self::new(vec![c.into()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn at_zero(&self) -> Rational {
        self.coeff(0)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &ComplexHP) -> ComplexHP {
        let prec = z.prec();
        let mut acc = ComplexHP::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &ComplexHP::from_rational(prec, c);
        }
        acc
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// `θ = z d/dz` applied coefficientwise.
    pub fn theta(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| Rational::from(c * i as u32))
                .collect(),
        )
    }

    /// Substitutes `z -> c z`.
    pub fn rescale_variable(&self, c: &Rational) -> Polynomial {
        let mut pow = Rational::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(Rational::from(a * &pow));
            pow *= c;
        }
        Polynomial::new(out)
    }

    pub fn to_series(&self, order: impl Into<Rational>) -> LogSeries {
        LogSeries::from_coeffs(self.coeffs.iter().cloned(), order)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_pq).collect()
    }

    pub fn parse(items: &[String]) -> Option<Polynomial> {
        items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Option<Vec<_>>>()
            .map(Polynomial::new)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}z")?,
                _ => write!(f, "{c}z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        Polynomial::parse(&items)
            .ok_or_else(|| serde::de::Error::custom("polynomial coefficients must be rational strings"))
    }
}

/// `numerator / denominator` with `denominator(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl RationalFunction {
    /// Normalizes so the denominator has constant term 1.
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Option<Self> {
        let d0 = denominator.at_zero();
        if d0 == 0 {
            return None;
        }
        let inv = Rational::from(d0.recip_ref());
        Some(RationalFunction {
            numerator: numerator.scale(&inv),
            denominator: denominator.scale(&inv),
        })
    }

    pub fn at_zero(&self) -> Rational {
        self.numerator.at_zero()
    }

    pub fn to_series(&self, order: impl Into<Rational> + Clone) -> Result<LogSeries, SeriesError> {
        let num = self.numerator.to_series(order.clone());
        let den = self.denominator.to_series(order);
        num.mul(&den.invert()?)
    }

    pub fn eval_complex(&self, z: &ComplexHP) -> ComplexHP {
        &self.numerator.eval_complex(z) / &self.denominator.eval_complex(z)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = Polynomial::from_ints(&[1, 1]);
        let b = Polynomial::from_ints(&[1, -1]);
        assert_eq!(a.mul(&b), Polynomial::from_ints(&[1, 0, -1]));
        assert_eq!(a.add(&b), Polynomial::from_ints(&[2]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.sub(&a).degree(), None);
    }

    #[test]
    fn theta_and_rescale() {
        let p = Polynomial::from_ints(&[4, 3, 2]);
        assert_eq!(p.theta(), Polynomial::from_ints(&[0, 3, 4]));
        assert_eq!(
            p.rescale_variable(&Rational::from(2)),
            Polynomial::from_ints(&[4, 6, 8])
        );
    }

    #[test]
    fn rational_function_series() {
        let f = RationalFunction::new(Polynomial::from_ints(&[5]), Polynomial::from_ints(&[1, -3125]))
            .unwrap();
        let s = f.to_series(4).unwrap();
        assert_eq!(s.coeff_at(2, 0), Rational::from(5 * 3125 * 3125));
        assert!(RationalFunction::new(Polynomial::from_ints(&[1]), Polynomial::from_ints(&[0, 1])).is_none());
    }

    #[test]
    fn json_roundtrip() {
        let p = Polynomial::new(vec![Rational::from((1, 3)), Rational::from(-2)]);
        let v = serde_json::to_string(&p).unwrap();
        assert_eq!(v, r#"["1/3","-2/1"]"#);
        assert_eq!(serde_json::from_str::<Polynomial>(&v).unwrap(), p);
    }
}
