//! Fourth-order Picard–Fuchs operators in `θ = z d/dz` and their Frobenius
//! period bases at a point of maximal unipotent monodromy.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Polynomial;
use crate::series::{parse_rational, rational_to_pq, LogSeries, SeriesError};

/// Differential order handled here (threefolds).
pub const OPERATOR_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfError {
    #[error("operator is not maximally unipotent at z = 0: indicial polynomial {indicial}")]
    NotMum { indicial: String },
    #[error("recurrence at z^{n} is not uniquely solvable")]
    ResonanceFailure { n: u32 },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `L = Σ_{k=0}^{4} a_k(z) θ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfOperator {
    coeffs: Vec<Polynomial>,
    singular_radius: Rational,
}

/// Outcome of the MUM test: the indicial polynomial at `z = 0` (monic when
/// `a_4(0) ≠ 0`) and whether it equals `λ⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct MumCheck {
    pub is_mum: bool,
    pub indicial: Polynomial,
}

impl PfOperator {
    /// Builds `Σ a_k θ^k` from `a_0 … a_4`, dividing through by `a_4(0)`
    /// when it is nonzero.
    pub fn new(coeffs: Vec<Polynomial>, singular_radius: Rational) -> Result<Self, PfError> {
        if coeffs.len() != OPERATOR_ORDER + 1 {
            return Err(PfError::InvalidOperator(format!(
                "expected {} coefficient polynomials, got {}",
                OPERATOR_ORDER + 1,
                coeffs.len()
            )));
        }
        if singular_radius <= 0 {
            return Err(PfError::InvalidOperator("singular radius must be positive".into()));
        }
        let lead = coeffs[OPERATOR_ORDER].at_zero();
        let coeffs = if lead != 0 && lead != 1 {
            let inv = Rational::from(lead.recip_ref());
            coeffs.iter().map(|p| p.scale(&inv)).collect()
        } else {
            coeffs
        };
        Ok(PfOperator {
            coeffs,
            singular_radius,
        })
    }

    /// `θ⁴ − 5z(5θ+1)(5θ+2)(5θ+3)(5θ+4)`, the mirror quintic operator.
    pub fn quintic() -> Self {
        // (5θ+1)(5θ+2)(5θ+3)(5θ+4) as a polynomial in θ
        let mut prod = Polynomial::constant(1);
        for k in 1..=4 {
            prod = prod.mul(&Polynomial::from_ints(&[k, 5]));
        }
        let coeffs = (0..=OPERATOR_ORDER)
            .map(|k| {
                let lead = if k == OPERATOR_ORDER { 1 } else { 0 };
                Polynomial::new(vec![Rational::from(lead), Rational::from(-5) * prod.coeff(k)])
            })
            .collect();
        PfOperator::new(coeffs, Rational::from((1, 3125))).expect("quintic operator is well formed")
    }

    /// `θ⁴`, whose kernel is spanned by `1, log z, log² z, log³ z`.
    pub fn theta4() -> Self {
        let mut coeffs = vec![Polynomial::zero(); OPERATOR_ORDER + 1];
        coeffs[OPERATOR_ORDER] = Polynomial::constant(1);
        PfOperator::new(coeffs, Rational::from(1)).expect("θ⁴ is well formed")
    }

    /// The operator after the substitution `z -> c z`.
    pub fn rescaled(&self, c: &Rational) -> Result<Self, PfError> {
        if *c == 0 {
            return Err(PfError::InvalidOperator("cannot rescale by zero".into()));
        }
        let coeffs = self.coeffs.iter().map(|p| p.rescale_variable(c)).collect();
        PfOperator::new(coeffs, Rational::from(&self.singular_radius / c).abs())
    }

    pub fn coefficient(&self, k: usize) -> &Polynomial {
        &self.coeffs[k]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn singular_radius(&self) -> &Rational {
        &self.singular_radius
    }

    /// Largest `z`-degree among the coefficient polynomials.
    pub fn z_degree(&self) -> usize {
        self.coeffs.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
    }

    /// `Σ a_k(z) θ^k s`.
    pub fn apply(&self, s: &LogSeries) -> Result<LogSeries, PfError> {
        let order = s.order().clone();
        let mut out = LogSeries::zero(order.clone());
        let mut theta_k = s.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                theta_k = theta_k.theta();
            }
            if a.is_zero() {
                continue;
            }
            out = out.add(&a.to_series(order.clone()).mul(&theta_k)?);
        }
        Ok(out)
    }

    pub fn check_mum(&self) -> MumCheck {
        let indicial = Polynomial::new(self.coeffs.iter().map(Polynomial::at_zero).collect());
        let lead = indicial.coeff(OPERATOR_ORDER);
        let indicial = if lead != 0 {
            indicial.scale(&Rational::from(lead.recip_ref()))
        } else {
            indicial
        };
        let target = {
            let mut c = vec![Rational::new(); OPERATOR_ORDER + 1];
            c[OPERATOR_ORDER] = Rational::from(1);
            Polynomial::new(c)
        };
        MumCheck {
            is_mum: indicial == target,
            indicial,
        }
    }

    /// `[z^i] a_k` arranged as `P_i(θ) = Σ_k [z^i] a_k θ^k`.
    fn slice(&self, i: usize) -> Vec<Rational> {
        self.coeffs.iter().map(|p| p.coeff(i)).collect()
    }

    /// Frobenius basis to order `z^N`.
    ///
    /// Writing `ω = Σ_{n,j} c_{n,j} z^n log^j z / j!`, the action of `θ` on
    /// `z^n log^j z / j!` is `n + S` with `S` lowering `j` by one, so
    /// `L ω = 0` becomes, degree by degree in `z`,
    /// `P_0(n + S) c_n = −Σ_{i≥1} P_i(n − i + S) c_{n−i}`,
    /// which is triangular in `j` with diagonal `P_0(n)`.
    pub fn frobenius_solve(&self, order: u32) -> Result<PeriodBasis, PfError> {
        let mum = self.check_mum();
        if !mum.is_mum {
            return Err(PfError::NotMum {
                indicial: format!("{}", mum.indicial).replace('z', "λ"),
            });
        }
        if order == 0 {
            return Err(PfError::InvalidOperator("truncation order must be positive".into()));
        }
        let n_terms = order as usize;
        let depth = self.z_degree();
        let slices: Vec<Vec<Rational>> = (0..=depth).map(|i| self.slice(i)).collect();
        let logs = OPERATOR_ORDER;

        let mut omegas = Vec::with_capacity(logs);
        for top in 0..logs {
            let mut c: Vec<Vec<Rational>> = vec![vec![Rational::new(); logs]; n_terms];
            c[0][top] = Rational::from(1);
            for n in 1..n_terms {
                let mut rhs = vec![Rational::new(); logs];
                for (i, slice) in slices.iter().enumerate().skip(1).take(n.min(depth)) {
                    let prev = &c[n - i];
                    let taylor = taylor_shift(slice, (n - i) as i64, logs);
                    for (j, r) in rhs.iter_mut().enumerate() {
                        for m in 0..logs - j {
                            if taylor[m] != 0 && prev[j + m] != 0 {
                                *r += Rational::from(&taylor[m] * &prev[j + m]);
                            }
                        }
                    }
                }
                let own = taylor_shift(&slices[0], n as i64, logs);
                if own[0] == 0 {
                    return Err(PfError::ResonanceFailure { n: n as u32 });
                }
                for j in (0..logs).rev() {
                    let mut acc = Rational::from(-&rhs[j]);
                    for m in 1..logs - j {
                        acc -= Rational::from(&own[m] * &c[n][j + m]);
                    }
                    c[n][j] = acc / &own[0];
                }
            }
            let mut terms = Vec::new();
            for (n, row) in c.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if *v != 0 {
                        let fact = Integer::from(Integer::factorial(j as u32));
                        terms.push((Rational::from(n as i64), j as u8, Rational::from(v / fact)));
                    }
                }
            }
            omegas.push(LogSeries::from_terms(1, order, terms)?);
        }
        let omegas: [LogSeries; 4] = omegas.try_into().expect("four solutions");
        Ok(PeriodBasis {
            omegas,
            order,
        })
    }
}

/// Coefficients of `s^m`, `m < depth`, in `P(n + s)` for `P = Σ_k p_k θ^k`.
fn taylor_shift(p: &[Rational], n: i64, depth: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new(); depth];
    let n = Rational::from(n);
    for (k, pk) in p.iter().enumerate() {
        if *pk == 0 {
            continue;
        }
        for (m, slot) in out.iter_mut().enumerate().take(k + 1) {
            let binom = Integer::from(Integer::binomial_u(k as u32, m as u32));
            let pow = Rational::from((&n).pow((k - m) as u32));
            *slot += Rational::from(pk * &pow) * binom;
        }
    }
    out
}

/// The four Frobenius solutions `ω_0 … ω_3` at `z = 0`.
///
/// `ω_k = ω_0 · log^k z / k! + (terms of lower log degree)`, and the
/// lower-degree corrections have no constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodBasis {
    omegas: [LogSeries; 4],
    order: u32,
}

impl PeriodBasis {
    /// Wraps arbitrary series as a basis without checking any operator.
    /// Used for synthetic period data.
    pub fn from_series(omegas: [LogSeries; 4]) -> Self {
        let order = omegas
            .iter()
            .map(|s| s.order().clone())
            .min()
            .and_then(|o| o.floor().numer().to_u32())
            .unwrap_or(0);
        PeriodBasis { omegas, order }
    }

    pub fn omega(&self, k: usize) -> &LogSeries {
        &self.omegas[k]
    }

    pub fn omegas(&self) -> &[LogSeries; 4] {
        &self.omegas
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `L ω_k` for each basis element; all four vanish for a genuine basis.
    pub fn residuals(&self, op: &PfOperator) -> Result<Vec<LogSeries>, PfError> {
        self.omegas.iter().map(|w| op.apply(w)).collect()
    }

    pub fn truncate(&self, order: u32) -> PeriodBasis {
        let order = order.min(self.order);
        PeriodBasis {
            omegas: self.omegas.clone().map(|w| w.truncate(order)),
            order,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PfOperatorJson {
    coefficients: Vec<Polynomial>,
    singular_radius: String,
}

impl Serialize for PfOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PfOperatorJson {
            coefficients: self.coeffs.clone(),
            singular_radius: rational_to_pq(&self.singular_radius),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PfOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = PfOperatorJson::deserialize(d)?;
        let radius = parse_rational(&doc.singular_radius)
            .ok_or_else(|| D::Error::custom("singular_radius must be a rational string"))?;
        PfOperator::new(doc.coefficients, radius).map_err(D::Error::custom)
    }
}

#[derive(Serialize)]
struct PeriodBasisJson<'a> {
    order: u32,
    omega: &'a [LogSeries; 4],
}

impl Serialize for PeriodBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PeriodBasisJson {
            order: self.order,
            omega: &self.omegas,
        }
        .serialize(s)
    }
}
