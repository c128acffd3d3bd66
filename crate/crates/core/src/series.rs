//! Truncated series in `z^{1/r}` with polynomial dependence on `log z`.
//!
//! A [`LogSeries`] stores finitely many terms `c · z^e · log^k z` with exact
//! rational coefficients. It is known modulo `z^N` where `N` is the
//! truncation order; every binary operation propagates the smaller order of
//! its operands, so nothing is silently computed past what the inputs
//! determine.
//!
//! Exponents are kept as integers `m` with `e = m / r` for the ramification
//! `r`. Mixing series of different ramification joins at the least common
//! multiple, and results are brought back to the smallest ramification their
//! terms need, which keeps equality structural.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::ComplexHP;

/// Largest power of `log z` a series may carry.
pub const MAX_LOG_DEGREE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("log degree {degree} exceeds the cap {cap}")]
    LogDegreeOverflow { degree: u32, cap: u8 },
    #[error("series is not a unit: {0}")]
    NotAUnit(&'static str),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("|z0| = {modulus:e} lies outside the convergence disk of radius {radius:e}")]
    OutsideDisk { modulus: f64, radius: f64 },
    #[error("invalid series data: {0}")]
    Invalid(String),
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

/// Branch of `log z` used when a series is evaluated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBranch {
    /// Principal branch, cut along the negative real axis.
    #[default]
    Principal,
    /// Principal branch shifted by `2πi · n`.
    Sheet(i64),
}

impl LogBranch {
    fn sheet(self) -> i64 {
        match self {
            LogBranch::Principal => 0,
            LogBranch::Sheet(n) => n,
        }
    }
}

/// Numeric value of a truncated series together with a crude bound on the
/// neglected tail.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: ComplexHP,
    pub tail_bound: Float,
}

#[derive(Clone)]
pub struct LogSeries {
    ramification: u32,
    order: Rational,
    max_log: u8,
    /// `(m, k) -> c` for the term `c · z^{m/r} · log^k z`.
    terms: BTreeMap<(i64, u8), Rational>,
}

impl PartialEq for LogSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ramification == other.ramification
            && self.order == other.order
            && self.terms == other.terms
    }
}

impl Eq for LogSeries {}

fn lcm(a: u32, b: u32) -> u32 {
    let g = Integer::from(a).gcd(&Integer::from(b)).to_u32().unwrap_or(1);
    a / g * b
}

/// Smallest integer `m` with `m / r >= order`.
fn cutoff_for(order: &Rational, r: u32) -> i64 {
    let scaled = Rational::from(order * r);
    let c = scaled.ceil();
    c.numer().to_i64().unwrap_or(i64::MAX)
}

impl LogSeries {
    fn empty(ramification: u32, order: Rational, max_log: u8) -> Self {
        LogSeries {
            ramification,
            order,
            max_log,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero(order: impl Into<Rational>) -> Self {
        Self::empty(1, order.into(), MAX_LOG_DEGREE)
    }

    pub fn constant(c: impl Into<Rational>, order: impl Into<Rational>) -> Self {
        let mut s = Self::zero(order);
        s.push(0, 0, c.into());
        s
    }

    pub fn one(order: impl Into<Rational>) -> Self {
        Self::constant(1, order)
    }

    /// `z` itself.
    pub fn z(order: impl Into<Rational>) -> Self {
        let mut s = Self::zero(order);
        s.push(1, 0, Rational::from(1));
        s
    }

    /// `log z`.
    pub fn log_z(order: impl Into<Rational>) -> Self {
        let mut s = Self::zero(order);
        s.push(0, 1, Rational::from(1));
        s
    }

    /// Dense integer-exponent series `Σ c_n z^n`.
    pub fn from_coeffs<I, C>(coeffs: I, order: impl Into<Rational>) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<Rational>,
    {
        let mut s = Self::zero(order);
        for (n, c) in coeffs.into_iter().enumerate() {
            s.push(n as i64, 0, c.into());
        }
        s
    }

    /// Builds a series from `(exponent, log degree, coefficient)` triples.
    pub fn from_terms<I>(ramification: u32, order: impl Into<Rational>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, u8, Rational)>,
    {
        if ramification == 0 {
            return Err(SeriesError::Invalid("ramification must be positive".into()));
        }
        let order = order.into();
        if order <= 0 {
            return Err(SeriesError::Invalid("truncation order must be positive".into()));
        }
        let mut s = Self::empty(ramification, order, MAX_LOG_DEGREE);
        for (e, k, c) in terms {
            if k > MAX_LOG_DEGREE {
                return Err(SeriesError::LogDegreeOverflow {
                    degree: k as u32,
                    cap: MAX_LOG_DEGREE,
                });
            }
            let m = Rational::from(&e * ramification);
            if *m.denom() != 1 {
                return Err(SeriesError::Invalid(format!(
                    "exponent {e} is not a multiple of 1/{ramification}"
                )));
            }
            if e < 0 {
                return Err(SeriesError::Invalid(format!("negative exponent {e}")));
            }
            let m = m.numer().to_i64().ok_or_else(|| {
                SeriesError::Invalid(format!("exponent {e} out of range"))
            })?;
            s.push(m, k, c);
        }
        s.canonicalize();
        Ok(s)
    }

    /// `c · z^e · log^k z`.
    pub fn monomial(
        c: impl Into<Rational>,
        exponent: impl Into<Rational>,
        log: u8,
        order: impl Into<Rational>,
    ) -> Result<Self> {
        let e: Rational = exponent.into();
        let r = e.denom().to_u32().ok_or_else(|| {
            SeriesError::Invalid("exponent denominator out of range".into())
        })?;
        Self::from_terms(r, order, [(e, log, c.into())])
    }

    /// Sets the log-degree cap used by multiplication.
    pub fn with_max_log(mut self, cap: u8) -> Self {
        self.max_log = cap.min(MAX_LOG_DEGREE);
        self
    }

    fn push(&mut self, m: i64, k: u8, c: Rational) {
        if c == 0 || m >= self.cutoff() {
            return;
        }
        let entry = self.terms.entry((m, k)).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&(m, k));
        }
    }

    fn cutoff(&self) -> i64 {
        cutoff_for(&self.order, self.ramification)
    }

    /// Drops zeros and reduces the ramification to the smallest one the
    /// stored exponents need.
    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| *c != 0);
        let cut = self.cutoff();
        self.terms.retain(|(m, _), _| *m < cut);
        let mut g = Integer::from(self.ramification);
        for (m, _) in self.terms.keys() {
            g.gcd_mut(&Integer::from(*m));
            if g == 1 {
                break;
            }
        }
        let g = g.to_u32().unwrap_or(1).max(1);
        if g > 1 {
            let terms = std::mem::take(&mut self.terms);
            self.ramification /= g;
            self.terms = terms
                .into_iter()
                .map(|((m, k), c)| ((m / g as i64, k), c))
                .collect();
        }
    }

    fn at_ramification(&self, r: u32) -> LogSeries {
        debug_assert_eq!(r % self.ramification, 0);
        let f = (r / self.ramification) as i64;
        LogSeries {
            ramification: r,
            order: self.order.clone(),
            max_log: self.max_log,
            terms: self.terms.iter().map(|(&(m, k), c)| ((m * f, k), c.clone())).collect(),
        }
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn order(&self) -> &Rational {
        &self.order
    }

    pub fn max_log_degree(&self) -> u8 {
        self.max_log
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest log degree carried by a nonzero term (0 for the zero series).
    pub fn log_degree(&self) -> u8 {
        self.terms.keys().map(|&(_, k)| k).max().unwrap_or(0)
    }

    pub fn has_logs(&self) -> bool {
        self.log_degree() > 0
    }

    /// Coefficient of `z^e log^k z`.
    pub fn coeff(&self, exponent: &Rational, log: u8) -> Rational {
        let m = Rational::from(exponent * self.ramification);
        if *m.denom() != 1 {
            return Rational::new();
        }
        match m.numer().to_i64() {
            Some(m) => self.terms.get(&(m, log)).cloned().unwrap_or_default(),
            None => Rational::new(),
        }
    }

    /// Coefficient of `z^n log^k z` for integer `n`.
    pub fn coeff_at(&self, n: i64, log: u8) -> Rational {
        self.coeff(&Rational::from(n), log)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&(0, 0)).cloned().unwrap_or_default()
    }

    /// Terms as `(exponent, log degree, coefficient)` in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, u8, &Rational)> + '_ {
        let r = self.ramification;
        self.terms
            .iter()
            .map(move |(&(m, k), c)| (Rational::from((m, r)), k, c))
    }

    /// Dense coefficients `c_0 .. c_{N-1}` of the log-free part, for `r = 1`.
    pub fn dense_coeffs(&self) -> Vec<Rational> {
        let cut = self.cutoff().max(0) as usize;
        let mut out = vec![Rational::new(); cut];
        if self.ramification == 1 {
            for (&(m, k), c) in &self.terms {
                if k == 0 {
                    out[m as usize] = c.clone();
                }
            }
        }
        out
    }

    /// Coefficient series of `log^k z`, i.e. the `s_k` in `Σ s_k(z) log^k z`.
    pub fn log_part(&self, k: u8) -> LogSeries {
        let mut out = Self::empty(self.ramification, self.order.clone(), self.max_log);
        for (&(m, kk), c) in &self.terms {
            if kk == k {
                out.terms.insert((m, 0), c.clone());
            }
        }
        out.canonicalize();
        out
    }

    /// Re-truncates at a smaller order (a larger one is ignored).
    pub fn truncate(&self, order: impl Into<Rational>) -> LogSeries {
        let order: Rational = order.into();
        let mut out = self.clone();
        if order < out.order {
            out.order = order;
            out.canonicalize();
        }
        out
    }

    fn join(a: &LogSeries, b: &LogSeries) -> (LogSeries, LogSeries) {
        let r = lcm(a.ramification, b.ramification);
        (a.at_ramification(r), b.at_ramification(r))
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        let (a, b) = Self::join(self, other);
        let order = a.order.clone().min(b.order.clone());
        let mut out = Self::empty(a.ramification, order, a.max_log.max(b.max_log));
        for (&(m, k), c) in a.terms.iter().chain(b.terms.iter()) {
            out.push(m, k, c.clone());
        }
        out.canonicalize();
        out
    }

    pub fn neg(&self) -> LogSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = Rational::from(-&*c);
        }
        out
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> LogSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.canonicalize();
        out
    }

    /// Multiplies by `z^e` (e ≥ 0), raising the truncation order by `e`.
    pub fn shift(&self, exponent: &Rational) -> Result<LogSeries> {
        if *exponent < 0 {
            return Err(SeriesError::DomainError("negative shift".into()));
        }
        let r = lcm(self.ramification, exponent.denom().to_u32().unwrap_or(1));
        let a = self.at_ramification(r);
        let dm = Rational::from(exponent * r).numer().to_i64().unwrap_or(0);
        let mut out = Self::empty(r, Rational::from(&self.order + exponent), self.max_log);
        for (&(m, k), c) in &a.terms {
            out.terms.insert((m + dm, k), c.clone());
        }
        out.canonicalize();
        Ok(out)
    }

    /// Divides by `z^e`, failing if a term would get a negative exponent.
    pub fn unshift(&self, exponent: &Rational) -> Result<LogSeries> {
        let r = lcm(self.ramification, exponent.denom().to_u32().unwrap_or(1));
        let a = self.at_ramification(r);
        let dm = Rational::from(exponent * r).numer().to_i64().unwrap_or(0);
        let order = Rational::from(&self.order - exponent);
        if order <= 0 {
            return Err(SeriesError::DomainError("shift consumes the whole series".into()));
        }
        let mut out = Self::empty(r, order, self.max_log);
        for (&(m, k), c) in &a.terms {
            if m < dm {
                return Err(SeriesError::DomainError(format!(
                    "term of exponent {} cannot be divided by z^{exponent}",
                    Rational::from((m, r))
                )));
            }
            out.terms.insert((m - dm, k), c.clone());
        }
        out.canonicalize();
        Ok(out)
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &LogSeries) -> Result<LogSeries> {
        let (a, b) = Self::join(self, other);
        let order = a.order.clone().min(b.order.clone());
        let cap = a.max_log.max(b.max_log);
        let mut out = Self::empty(a.ramification, order, cap);
        let cut = out.cutoff();
        let mut acc: BTreeMap<(i64, u8), Rational> = BTreeMap::new();
        for (&(ma, ka), ca) in &a.terms {
            if ma >= cut {
                break;
            }
            for (&(mb, kb), cb) in &b.terms {
                if ma + mb >= cut {
                    break;
                }
                let k = ka as u32 + kb as u32;
                if k > cap as u32 {
                    return Err(SeriesError::LogDegreeOverflow { degree: k, cap });
                }
                let e = acc.entry((ma + mb, k as u8)).or_default();
                *e += Rational::from(ca * cb);
            }
        }
        out.terms = acc;
        out.canonicalize();
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<LogSeries> {
        let mut acc = LogSeries::one(self.order.clone());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a log-free series with nonzero constant term.
    pub fn invert(&self) -> Result<LogSeries> {
        if self.has_logs() {
            return Err(SeriesError::NotAUnit("series carries log terms"));
        }
        let a0 = self.constant_term();
        if a0 == 0 {
            return Err(SeriesError::NotAUnit("constant term is zero"));
        }
        let cut = self.cutoff();
        let inv0 = Rational::from(a0.recip_ref());
        let a: Vec<(i64, &Rational)> = self
            .terms
            .iter()
            .filter(|(&(m, _), _)| m > 0)
            .map(|(&(m, _), c)| (m, c))
            .collect();
        let mut b: Vec<Rational> = vec![Rational::new(); cut.max(0) as usize];
        if !b.is_empty() {
            b[0] = inv0.clone();
        }
        for n in 1..cut {
            let mut s = Rational::new();
            for &(m, c) in &a {
                if m > n {
                    break;
                }
                let bn = &b[(n - m) as usize];
                if *bn != 0 {
                    s += Rational::from(c * bn);
                }
            }
            b[n as usize] = -(s * &inv0);
        }
        Ok(self.rebuild_log_free(b))
    }

    fn rebuild_log_free(&self, dense: Vec<Rational>) -> LogSeries {
        let mut out = Self::empty(self.ramification, self.order.clone(), self.max_log);
        for (m, c) in dense.into_iter().enumerate() {
            if c != 0 {
                out.terms.insert((m as i64, 0), c);
            }
        }
        out.canonicalize();
        out
    }

    fn dense_log_free(&self) -> Vec<Rational> {
        let cut = self.cutoff().max(0) as usize;
        let mut out = vec![Rational::new(); cut];
        for (&(m, _), c) in &self.terms {
            out[m as usize] = c.clone();
        }
        out
    }

    /// The logarithmic derivative `θ = z d/dz`.
    pub fn theta(&self) -> LogSeries {
        let r = self.ramification;
        let mut out = Self::empty(r, self.order.clone(), self.max_log);
        for (&(m, k), c) in &self.terms {
            if m != 0 {
                out.push(m, k, Rational::from((m, r)) * c);
            }
            if k > 0 {
                out.push(m, k - 1, Rational::from(c * k as u32));
            }
        }
        out.canonicalize();
        out
    }

    /// `θ` applied `n` times.
    pub fn theta_n(&self, n: u32) -> LogSeries {
        (0..n).fold(self.clone(), |s, _| s.theta())
    }

    /// Formal exponential of a log-free series without constant term.
    pub fn exp_series(&self) -> Result<LogSeries> {
        if self.has_logs() {
            return Err(SeriesError::DomainError("exp of a series with log terms".into()));
        }
        if self.constant_term() != 0 {
            return Err(SeriesError::DomainError("exp needs zero constant term".into()));
        }
        // θ(e^a) = θa · e^a, i.e. m b_m = Σ_k k a_k b_{m-k} in units of 1/r.
        let a = self.dense_log_free();
        let cut = a.len();
        let mut b = vec![Rational::new(); cut];
        if cut > 0 {
            b[0] = Rational::from(1);
        }
        for m in 1..cut {
            let mut s = Rational::new();
            for k in 1..=m {
                if a[k] != 0 && b[m - k] != 0 {
                    s += Rational::from(&a[k] * &b[m - k]) * k as u32;
                }
            }
            b[m] = s / m as u32;
        }
        Ok(self.rebuild_log_free(b))
    }

    /// Formal logarithm of a log-free series with constant term 1.
    pub fn log_series(&self) -> Result<LogSeries> {
        if self.has_logs() {
            return Err(SeriesError::DomainError("log of a series with log terms".into()));
        }
        if self.constant_term() != 1 {
            return Err(SeriesError::DomainError("log needs constant term 1".into()));
        }
        // m a_m = m b_m - Σ_{k<m} k a_k b_{m-k}
        let b = self.dense_log_free();
        let cut = b.len();
        let mut a = vec![Rational::new(); cut];
        for m in 1..cut {
            let mut s = Rational::from(&b[m] * m as u32);
            for k in 1..m {
                if a[k] != 0 && b[m - k] != 0 {
                    s -= Rational::from(&a[k] * &b[m - k]) * k as u32;
                }
            }
            a[m] = s / m as u32;
        }
        Ok(self.rebuild_log_free(a))
    }

    fn check_plain(&self, what: &str) -> Result<()> {
        if self.has_logs() {
            return Err(SeriesError::DomainError(format!("{what}: series carries log terms")));
        }
        if self.ramification != 1 {
            return Err(SeriesError::DomainError(format!(
                "{what}: needs integer exponents, got ramification {}",
                self.ramification
            )));
        }
        Ok(())
    }

    /// Compositional inverse by Lagrange reversion: for `a = c₁z + …`,
    /// returns `b` with `a(b(w)) = w + O(w^N)`.
    pub fn revert(&self) -> Result<LogSeries> {
        self.check_plain("revert")?;
        if self.constant_term() != 0 {
            return Err(SeriesError::DomainError("revert needs zero constant term".into()));
        }
        if self.coeff_at(1, 0) == 0 {
            return Err(SeriesError::DomainError("revert needs nonzero linear term".into()));
        }
        let cut = self.cutoff();
        // φ = z / a(z); b_n = [z^{n-1}] φ^n / n
        let phi = self.unshift(&Rational::from(1))?.invert()?;
        let mut out = Self::empty(1, self.order.clone(), self.max_log);
        let mut power = LogSeries::one(phi.order.clone());
        for n in 1..cut {
            power = power.mul(&phi)?;
            let c = power.coeff_at(n - 1, 0);
            if c != 0 {
                out.terms.insert((n, 0), c / n as u32);
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// `self(inner(w))` for log-free integer-exponent series, `inner = O(w)`.
    pub fn compose(&self, inner: &LogSeries) -> Result<LogSeries> {
        self.check_plain("compose")?;
        inner.check_plain("compose")?;
        if inner.constant_term() != 0 {
            return Err(SeriesError::DomainError(
                "inner series of a composition needs zero constant term".into(),
            ));
        }
        let order = self.order.clone().min(inner.order.clone());
        let f = self.dense_log_free();
        let mut acc = LogSeries::zero(order.clone());
        for c in f.iter().rev() {
            acc = acc.mul(inner)?.add(&LogSeries::constant(c.clone(), order.clone()));
        }
        Ok(acc)
    }

    /// Evaluates the truncated series at `z0` on the given branch of `log z`.
    ///
    /// `radius` is the convergence radius of the family the series belongs
    /// to. The tail bound assumes geometric coefficient growth at that
    /// radius and is scaled from the last retained term.
    pub fn eval(&self, z0: &ComplexHP, branch: LogBranch, radius: &Rational) -> Result<SeriesValue> {
        let prec = z0.prec();
        let modulus = z0.abs();
        let rad = Float::with_val(prec, radius);
        if modulus >= rad {
            return Err(SeriesError::OutsideDisk {
                modulus: modulus.to_f64(),
                radius: rad.to_f64(),
            });
        }
        let zero = ComplexHP::zero(prec);
        if z0.is_zero() {
            if self.has_logs() {
                return Err(SeriesError::DomainError("log z at z = 0".into()));
            }
            let v = ComplexHP::from_rational(prec, &self.coeff(&Rational::new(), 0));
            return Ok(SeriesValue { value: v, tail_bound: Float::new(prec) });
        }
        let r = self.ramification;
        let log_z = z0.ln_branch(branch.sheet());
        // w = z^{1/r} on the chosen branch
        let w = if r == 1 {
            z0.clone()
        } else {
            log_z.scale_rational(&Rational::from((1, r))).exp()
        };
        let mut value = zero.clone();
        let mut log_pow = ComplexHP::one(prec);
        for k in 0..=self.log_degree() {
            let part: Vec<(i64, &Rational)> = self
                .terms
                .iter()
                .filter(|(&(_, kk), _)| kk == k)
                .map(|(&(m, _), c)| (m, c))
                .collect();
            if !part.is_empty() {
                // Horner in w over the sparse exponents, highest first.
                let mut acc = zero.clone();
                let mut prev = part.last().map(|&(m, _)| m).unwrap_or(0);
                for &(m, c) in part.iter().rev() {
                    if prev > m {
                        acc = &acc * &w.powi((prev - m) as i32);
                    }
                    acc = &acc + &ComplexHP::from_rational(prec, c);
                    prev = m;
                }
                if prev > 0 {
                    acc = &acc * &w.powi(prev as i32);
                }
                value = &value + &(&acc * &log_pow);
            }
            log_pow = &log_pow * &log_z;
        }
        let tail_bound = self.tail_bound(&w, &log_z, &rad, &modulus);
        Ok(SeriesValue { value, tail_bound })
    }

    fn tail_bound(&self, w: &ComplexHP, log_z: &ComplexHP, rad: &Float, modulus: &Float) -> Float {
        let prec = w.prec();
        let Some(&(last_m, _)) = self.terms.keys().next_back() else {
            return Float::new(prec);
        };
        let log_abs = log_z.abs();
        let mut last = Float::new(prec);
        for (&(m, k), c) in self.terms.range((last_m, 0)..) {
            debug_assert_eq!(m, last_m);
            let mut t = Float::with_val(prec, c).abs();
            t *= log_abs.clone().pow(k as u32);
            last += t;
        }
        last *= w.abs().pow(last_m as u32);
        let ratio = Float::with_val(prec, modulus / rad);
        let one_minus = Float::with_val(prec, 1 - &ratio);
        last * ratio / one_minus
    }
}

impl fmt::Debug for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, k, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if e != 0 {
                write!(f, "·z^{e}")?;
            }
            if k > 0 {
                write!(f, "·log^{k}z")?;
            }
        }
        write!(f, " + O(z^{})", self.order)
    }
}

/// Renders a rational as `"p/q"`, always with an explicit denominator.
pub fn rational_to_pq(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse::<Rational>().ok()
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: String,
    log: u8,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct LogSeriesJson {
    ramification: u32,
    order: String,
    terms: Vec<TermJson>,
}

impl Serialize for LogSeries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = LogSeriesJson {
            ramification: self.ramification,
            order: rational_to_pq(&self.order),
            terms: self
                .terms()
                .map(|(e, k, c)| TermJson {
                    exp: rational_to_pq(&e),
                    log: k,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        };
        doc.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LogSeries {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = LogSeriesJson::deserialize(de)?;
        let order = parse_rational(&doc.order)
            .ok_or_else(|| D::Error::custom(format!("bad order {:?}", doc.order)))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let e = parse_rational(&t.exp)
                .ok_or_else(|| D::Error::custom(format!("bad exponent {:?}", t.exp)))?;
            let num: Integer = t
                .num
                .parse()
                .map_err(|_| D::Error::custom(format!("bad numerator {:?}", t.num)))?;
            let den: Integer = t
                .den
                .parse()
                .map_err(|_| D::Error::custom(format!("bad denominator {:?}", t.den)))?;
            if den == 0 {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((e, t.log, Rational::from((num, den))));
        }
        LogSeries::from_terms(doc.ramification, order, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn quintic_omega0(n: usize) -> Vec<Integer> {
        (0..n as u32)
            .map(|d| {
                let f5 = Integer::from(Integer::factorial(5 * d));
                let fd = Integer::from(Integer::factorial(d));
                f5 / fd.pow(5)
            })
            .collect()
    }

    #[test]
    fn add_identity_and_inverse() {
        let a = LogSeries::from_coeffs([1, 1], 5);
        assert_eq!(a.add(&LogSeries::zero(5)), a);
        let minus = LogSeries::from_coeffs([-1, -1], 5);
        assert!(a.add(&minus).is_zero());
    }

    #[test]
    fn add_joins_ramification() {
        let half = LogSeries::monomial(1, q(1, 2), 0, 4).unwrap();
        let whole = LogSeries::z(4);
        let s = half.add(&whole);
        assert_eq!(s.ramification(), 2);
        assert_eq!(s.coeff(&q(1, 2), 0), 1);
        assert_eq!(s.coeff(&q(1, 1), 0), 1);
        // cancelling the half-integer term brings r back to 1
        assert_eq!(s.sub(&half).ramification(), 1);
    }

    #[test]
    fn add_takes_min_order() {
        let a = LogSeries::from_coeffs([1, 2, 3], 3);
        let b = LogSeries::from_coeffs([1], 2);
        assert_eq!(*a.add(&b).order(), 2);
    }

    #[test]
    fn difference_of_squares() {
        let a = LogSeries::from_coeffs([1, 1], 4);
        let b = LogSeries::from_coeffs([1, -1], 4);
        assert_eq!(a.mul(&b).unwrap(), LogSeries::from_coeffs([1, 0, -1], 4));
    }

    #[test]
    fn log_squared() {
        let l = LogSeries::log_z(3);
        let l2 = l.mul(&l).unwrap();
        assert_eq!(l2.coeff_at(0, 2), 1);
        assert_eq!(l2.len(), 1);
    }

    #[test]
    fn log_overflow_is_an_error() {
        let l2 = LogSeries::log_z(3).mul(&LogSeries::log_z(3)).unwrap();
        let err = l2.mul(&l2).unwrap_err();
        assert_eq!(err, SeriesError::LogDegreeOverflow { degree: 4, cap: 3 });
        let capped = LogSeries::log_z(3).with_max_log(1);
        assert!(capped.mul(&capped).is_err());
    }

    #[test]
    fn omega0_square_leading_terms() {
        // (1 + 120z + 113400z²)² = 1 + 240z + (14400 + 226800)z² + …
        let w = LogSeries::from_coeffs([1, 120, 113400], 3);
        assert_eq!(w.mul(&w).unwrap(), LogSeries::from_coeffs([1, 240, 241200], 3));
    }

    #[test]
    fn invert_geometric_and_constant() {
        let a = LogSeries::from_coeffs([1, -1], 6);
        assert_eq!(a.invert().unwrap(), LogSeries::from_coeffs([1; 6], 6));
        let two = LogSeries::constant(2, 3);
        assert_eq!(two.invert().unwrap().constant_term(), q(1, 2));
    }

    #[test]
    fn invert_quintic_omega0() {
        let w = LogSeries::from_coeffs(quintic_omega0(12), 12);
        let inv = w.invert().unwrap();
        assert_eq!(inv.coeff_at(1, 0), -120);
        assert_eq!(inv.coeff_at(2, 0), 120 * 120 - 113400);
        assert_eq!(w.mul(&inv).unwrap(), LogSeries::one(12));
    }

    #[test]
    fn invert_rejects_non_units() {
        assert!(matches!(LogSeries::z(3).invert(), Err(SeriesError::NotAUnit(_))));
        let l = LogSeries::one(3).add(&LogSeries::log_z(3));
        assert!(matches!(l.invert(), Err(SeriesError::NotAUnit(_))));
    }

    #[test]
    fn theta_rules() {
        let z3 = LogSeries::monomial(1, 3, 0, 5).unwrap();
        assert_eq!(z3.theta(), z3.scale(&q(3, 1)));
        assert_eq!(LogSeries::log_z(5).theta(), LogSeries::one(5));
        let zl2 = LogSeries::monomial(1, 1, 2, 5).unwrap();
        let expected = zl2.add(&LogSeries::monomial(2, 1, 1, 5).unwrap());
        assert_eq!(zl2.theta(), expected);
    }

    #[test]
    fn theta_on_half_integer_power() {
        let s = LogSeries::monomial(1, q(1, 2), 0, 3).unwrap();
        assert_eq!(s.theta().coeff(&q(1, 2), 0), q(1, 2));
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(LogSeries::zero(5).exp_series().unwrap(), LogSeries::one(5));
        let a = LogSeries::from_coeffs([0, 1, 1], 4);
        let e = a.exp_series().unwrap();
        assert_eq!(e.coeff_at(2, 0), q(3, 2));
        // e^{z+z²} = 1 + z + 3/2 z² + 7/6 z³ + …
        assert_eq!(e.coeff_at(3, 0), q(7, 6));
        let z = LogSeries::z(8);
        assert_eq!(z.exp_series().unwrap().log_series().unwrap(), z);
    }

    #[test]
    fn exp_domain_errors() {
        assert!(LogSeries::one(3).exp_series().is_err());
        assert!(LogSeries::z(3).log_series().is_err());
        assert!(LogSeries::log_z(3).exp_series().is_err());
    }

    #[test]
    fn revert_examples() {
        assert_eq!(LogSeries::z(6).revert().unwrap(), LogSeries::z(6));
        let a = LogSeries::from_coeffs([0, 1, 1], 6);
        // Catalan numbers with alternating signs
        assert_eq!(
            a.revert().unwrap(),
            LogSeries::from_coeffs([0, 1, -1, 2, -5, 14], 6)
        );
        let two = LogSeries::from_coeffs([0, 2], 4);
        assert_eq!(two.revert().unwrap(), LogSeries::from_coeffs([q(0, 1), q(1, 2)], 4));
    }

    #[test]
    fn revert_domain_errors() {
        assert!(LogSeries::from_coeffs([1, 1], 4).revert().is_err());
        assert!(LogSeries::from_coeffs([0, 0, 1], 4).revert().is_err());
    }

    #[test]
    fn compose_with_reversion_is_identity() {
        let a = LogSeries::from_coeffs([0, 1, 3, -2, 7], 9);
        let b = a.revert().unwrap();
        assert_eq!(a.compose(&b).unwrap(), LogSeries::z(9));
        assert_eq!(b.compose(&a).unwrap(), LogSeries::z(9));
    }

    #[test]
    fn eval_examples() {
        let radius = q(1, 1);
        let v = LogSeries::from_coeffs([1, 1], 4)
            .eval(&ComplexHP::zero(128), LogBranch::Principal, &radius)
            .unwrap();
        assert_eq!(v.value, ComplexHP::one(128));
        let half = ComplexHP::from_f64(128, 0.5, 0.0);
        let v = LogSeries::z(4).eval(&half, LogBranch::Principal, &radius).unwrap();
        assert_eq!(v.value.re_f64(), 0.5);
    }

    #[test]
    fn eval_against_partial_sums() {
        let coeffs = quintic_omega0(15);
        let s = LogSeries::from_coeffs(coeffs.clone(), 15);
        let z0 = ComplexHP::from_f64(256, 1e-6, 0.0);
        let v = s.eval(&z0, LogBranch::Principal, &q(1, 3125)).unwrap();
        let mut direct = Float::new(256);
        let zf = Float::with_val(256, 1e-6);
        for (d, c) in coeffs.iter().enumerate() {
            direct += Float::with_val(256, c) * zf.clone().pow(d as u32);
        }
        let diff = Float::with_val(256, &v.value.re - &direct).abs();
        assert!(diff.to_f64() < 1e-70, "{diff}");
        assert!((v.value.re_f64() - 1.000_120_113_4).abs() < 1e-9);
        assert!(v.tail_bound.to_f64() < 1e-30);
    }

    #[test]
    fn eval_outside_disk() {
        let z0 = ComplexHP::from_f64(64, 1.0, 0.0);
        let err = LogSeries::z(3).eval(&z0, LogBranch::Principal, &q(1, 2)).unwrap_err();
        assert!(matches!(err, SeriesError::OutsideDisk { .. }));
    }

    #[test]
    fn eval_with_logs_and_branch() {
        let s = LogSeries::log_z(3);
        let z0 = ComplexHP::from_f64(128, -0.25, 0.0);
        let p = s.eval(&z0, LogBranch::Principal, &q(1, 1)).unwrap().value;
        let s1 = s.eval(&z0, LogBranch::Sheet(1), &q(1, 1)).unwrap().value;
        assert!((p.im_f64() - std::f64::consts::PI).abs() < 1e-12);
        assert!((s1.im_f64() - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn eval_half_integer_power() {
        let s = LogSeries::monomial(1, q(1, 2), 0, 3).unwrap();
        let z0 = ComplexHP::from_f64(128, 0.25, 0.0);
        let v = s.eval(&z0, LogBranch::Principal, &q(1, 1)).unwrap().value;
        assert!((v.re_f64() - 0.5).abs() < 1e-30);
    }

    #[test]
    fn json_shape() {
        let s = LogSeries::monomial(q(-3, 4), q(1, 2), 1, 2).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["ramification"], 2);
        assert_eq!(v["order"], "2/1");
        assert_eq!(v["terms"][0]["exp"], "1/2");
        assert_eq!(v["terms"][0]["log"], 1);
        assert_eq!(v["terms"][0]["num"], "-3");
        assert_eq!(v["terms"][0]["den"], "4");
        let back: LogSeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_misaligned_exponent() {
        let doc = r#"{"ramification":1,"order":"3","terms":[{"exp":"1/2","log":0,"num":"1","den":"1"}]}"#;
        assert!(serde_json::from_str::<LogSeries>(doc).is_err());
    }

    #[test]
    fn truncate_drops_high_terms() {
        let s = LogSeries::from_coeffs([1, 2, 3, 4], 4);
        assert_eq!(s.truncate(2), LogSeries::from_coeffs([1, 2], 2));
    }
}
