//! Flat coordinates, Yukawa coupling and genus-zero invariants.
//!
//! From a Frobenius basis `ω_0 … ω_3` the flat coordinate is
//! `t = ω_1/ω_0 = log z + σ_1/ω_0` and `q = e^t`. The θ-Yukawa coupling
//! `Y(z)` solves the first-order equation `θY = −a_3/(2a_4) · Y` that the
//! Picard–Fuchs operator imposes on `Q(Ω, θ³Ω)`; in the flat coordinate
//! `C_ttt = Y / (ω_0² (θt)³)`, re-expanded in `q`. Its `q`-expansion is
//! `κ + Σ_d d³ N_{0,d} q^d`, and the integers `n_d` follow from
//! `N_{0,d} = Σ_{k | d} n_{d/k} / k³`.

use std::collections::BTreeMap;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anomaly::{constant_map_contribution, AnomalyError};
use crate::hodge::{HodgeError, SymplecticFrame};
use crate::picard_fuchs::{PeriodBasis, PfError, PfOperator};
use crate::poly::{Polynomial, RationalFunction};
use crate::series::{rational_to_pq, LogSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MirrorError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    PicardFuchs(#[from] PfError),
    #[error("Yukawa equation has no rational solution up to degree {max_degree}")]
    NonMeromorphic { max_degree: usize },
    #[error("classical term {found} does not match the triple intersection {expected}")]
    ClassicalTermMismatch { expected: i64, found: String },
    #[error("instanton number n_{degree} = {value} is not an integer")]
    IntegralityViolation { degree: u32, value: String },
    #[error("invalid family configuration: {0}")]
    InvalidConfig(String),
    #[error("quantum part has nonzero constant term {0}")]
    NonVanishingLimit(String),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
}

pub type Result<T, E = MirrorError> = std::result::Result<T, E>;

/// A one-parameter family: its Picard–Fuchs operator and classical data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyFamilyConfig {
    pub name: String,
    #[serde(rename = "operator")]
    pub pf: PfOperator,
    /// `∫ H³`
    pub triple_intersection: i64,
    /// `∫ c₂ · H`
    pub c2h: i64,
    /// `χ = ∫ c₃`
    pub euler: i64,
    #[serde(default = "one")]
    pub kappa: u32,
}

fn one() -> u32 {
    1
}

impl CyFamilyConfig {
    pub fn quintic() -> Self {
        CyFamilyConfig {
            name: "quintic".into(),
            pf: PfOperator::quintic(),
            triple_intersection: 5,
            c2h: 50,
            euler: -200,
            kappa: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1 {
            return Err(MirrorError::InvalidConfig(format!(
                "only one-parameter families are supported (kappa = {})",
                self.kappa
            )));
        }
        if self.triple_intersection <= 0 {
            return Err(MirrorError::InvalidConfig(
                "triple intersection must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `t(z)`, `q(z) = e^{t}` and the inverse `z(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMap {
    pub t_of_z: LogSeries,
    pub q_of_z: LogSeries,
    pub z_of_q: LogSeries,
}

pub fn build_mirror_map(basis: &PeriodBasis) -> Result<MirrorMap> {
    let omega0 = basis.omega(0);
    let order = omega0.order().clone();
    let sigma1 = basis.omega(1).log_part(0);
    let ratio = sigma1.mul(&omega0.invert()?)?;
    let t_of_z = LogSeries::log_z(order.clone()).add(&ratio);
    let q_of_z = ratio.exp_series()?.shift(&Rational::from(1))?.truncate(order);
    let z_of_q = q_of_z.revert()?;
    Ok(MirrorMap {
        t_of_z,
        q_of_z,
        z_of_q,
    })
}

/// The Yukawa coupling in the θ-frame as an exact rational function.
pub fn yukawa_theta(config: &CyFamilyConfig) -> Result<RationalFunction> {
    yukawa_from_operator(&config.pf, config.triple_intersection)
}

pub fn yukawa_from_operator(pf: &PfOperator, classical: i64) -> Result<RationalFunction> {
    let a4 = pf.coefficient(4);
    let a3 = pf.coefficient(3);
    if a4.at_zero() == 0 {
        return Err(MirrorError::InvalidConfig("a_4(0) = 0".into()));
    }
    let max_degree = 2 * (a4.degree().unwrap_or(0) + a3.degree().unwrap_or(0)) + 2;
    let len = 2 * max_degree + 12;

    // r = −a_3 / (2 a_4) as a power series; θY = r Y with Y(0) = classical.
    let half = Rational::from((-1, 2));
    let r = a3
        .scale(&half)
        .to_series(len as i64)
        .mul(&a4.to_series(len as i64).invert()?)?
        .dense_coeffs();
    if r[0] != 0 {
        return Err(MirrorError::NonMeromorphic { max_degree });
    }
    let mut y = vec![Rational::new(); len];
    y[0] = Rational::from(classical);
    for n in 1..len {
        let mut s = Rational::new();
        for k in 1..=n {
            if r[k] != 0 {
                s += Rational::from(&r[k] * &y[n - k]);
            }
        }
        y[n] = s / n as u32;
    }

    for total in 0..=2 * max_degree {
        for den_deg in 0..=total.min(max_degree) {
            let num_deg = total - den_deg;
            if num_deg > max_degree {
                continue;
            }
            let Some(candidate) = pade(&y, num_deg, den_deg) else {
                continue;
            };
            // exact check: a_4 (θP·D − P·θD) + (a_3/2) P·D = 0
            let (p, d) = (&candidate.numerator, &candidate.denominator);
            let lhs = a4
                .mul(&p.theta().mul(d).sub(&p.mul(&d.theta())))
                .add(&a3.scale(&Rational::from((1, 2))).mul(&p.mul(d)));
            if lhs.is_zero() {
                return Ok(candidate);
            }
        }
    }
    Err(MirrorError::NonMeromorphic { max_degree })
}

/// `[n/m]` Padé approximant of the series `y` with `D(0) = 1`.
fn pade(y: &[Rational], n: usize, m: usize) -> Option<RationalFunction> {
    if n + m + 1 > y.len() {
        return None;
    }
    let at = |k: isize| -> Rational {
        if k < 0 {
            Rational::new()
        } else {
            y.get(k as usize).cloned().unwrap_or_default()
        }
    };
    // Σ_{j=1}^{m} d_j y_{k−j} = −y_k for k = n+1 … n+m
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for k in (n + 1)..=(n + m) {
        a.push((1..=m).map(|j| at(k as isize - j as isize)).collect::<Vec<_>>());
        b.push(-at(k as isize));
    }
    let d = solve_linear(a, b)?;
    let mut den = vec![Rational::from(1)];
    den.extend(d);
    let den = Polynomial::new(den);
    let num = Polynomial::new(
        (0..=n)
            .map(|k| {
                let mut s = Rational::new();
                for (j, dj) in den.coeffs().iter().enumerate() {
                    if j <= k {
                        s += Rational::from(dj * &y[k - j]);
                    }
                }
                s
            })
            .collect(),
    );
    RationalFunction::new(num, den)
}

/// Exact Gaussian elimination; `None` when the system is singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::from(a[col][col].recip_ref());
        for row in 0..n {
            if row == col || a[row][col] == 0 {
                continue;
            }
            let f = Rational::from(&a[row][col] * &inv);
            for k in col..n {
                let t = Rational::from(&f * &a[col][k]);
                a[row][k] -= t;
            }
            let t = Rational::from(&f * &b[col]);
            b[row] -= t;
        }
    }
    Some((0..n).map(|i| Rational::from(&b[i] / &a[i][i])).collect())
}

/// `C_ttt(q) = Y(z) / (ω_0(z)² (θt(z))³)` with `z = z(q)`.
pub fn flat_yukawa(
    yukawa: &RationalFunction,
    basis: &PeriodBasis,
    mirror: &MirrorMap,
) -> Result<LogSeries> {
    let omega0 = basis.omega(0);
    let order = omega0.order().clone().min(mirror.z_of_q.order().clone());
    let y = yukawa.to_series(order.clone())?;
    let theta_t = mirror.t_of_z.theta().truncate(order.clone());
    let denom = omega0.pow(2)?.mul(&theta_t.pow(3)?)?;
    let c_z = y.mul(&denom.invert()?)?;
    Ok(c_z.compose(&mirror.z_of_q)?)
}

/// Integrality status of the extracted `n_d`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntegralityReport {
    pub non_integral: Vec<u32>,
}

impl IntegralityReport {
    pub fn is_integral(&self) -> bool {
        self.non_integral.is_empty()
    }
}

/// Genus-zero Gromov–Witten invariants `N_{0,d}` and instanton numbers `n_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct InstantonTable {
    pub genus0: BTreeMap<u32, Rational>,
    pub instanton: BTreeMap<u32, Rational>,
    pub report: IntegralityReport,
}

impl InstantonTable {
    /// The `n_d` as integers, or the first degree where one is not.
    pub fn integers(&self) -> Result<BTreeMap<u32, Integer>> {
        self.instanton
            .iter()
            .map(|(&d, v)| {
                if *v.denom() == 1 {
                    Ok((d, v.numer().clone()))
                } else {
                    Err(MirrorError::IntegralityViolation {
                        degree: d,
                        value: v.to_string(),
                    })
                }
            })
            .collect()
    }

    pub fn require_integral(&self) -> Result<()> {
        self.integers().map(|_| ())
    }

    pub fn all_zero(&self) -> bool {
        self.instanton.values().all(|v| *v == 0)
    }
}

pub fn extract_instantons(c_ttt: &LogSeries, config: &CyFamilyConfig) -> Result<InstantonTable> {
    let c0 = c_ttt.constant_term();
    if c0 != config.triple_intersection || c_ttt.has_logs() || c_ttt.ramification() != 1 {
        return Err(MirrorError::ClassicalTermMismatch {
            expected: config.triple_intersection,
            found: c0.to_string(),
        });
    }
    let coeffs = c_ttt.dense_coeffs();
    let mut genus0 = BTreeMap::new();
    let mut instanton: BTreeMap<u32, Rational> = BTreeMap::new();
    let mut report = IntegralityReport::default();
    for d in 1..coeffs.len() as u32 {
        let cube = Rational::from(Integer::from(d).pow(3));
        let c = &coeffs[d as usize];
        genus0.insert(d, Rational::from(c / &cube));
        // c_d = Σ_{k | d} n_k k³
        let mut rest = c.clone();
        for k in 1..d {
            if d % k == 0 {
                rest -= Rational::from(&instanton[&k] * Integer::from(k).pow(3));
            }
        }
        let n = rest / cube;
        if *n.denom() != 1 {
            report.non_integral.push(d);
        }
        instanton.insert(d, n);
    }
    Ok(InstantonTable {
        genus0,
        instanton,
        report,
    })
}

use rug::ops::Pow;

/// Classical part of `F_g`.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalPart {
    /// `c · t³`
    Cubic(Rational),
    /// `c · t`
    Linear(Rational),
    /// constant `N_{g,0}`
    Constant(Rational),
    None,
}

/// A Gromov–Witten potential `F_g = classical + quantum`.
#[derive(Clone, Debug, PartialEq)]
pub struct GwPotential {
    pub genus: u32,
    pub holes: u32,
    pub classical: ClassicalPart,
    /// Series in `q` (ramification 1 closed, `r ≥ 1` open); zero constant term.
    pub quantum: LogSeries,
    pub invariants: BTreeMap<Rational, Rational>,
    pub instanton_numbers: BTreeMap<u32, Integer>,
}

impl GwPotential {
    fn checked(
        genus: u32,
        holes: u32,
        classical: ClassicalPart,
        quantum: LogSeries,
        instanton_numbers: BTreeMap<u32, Integer>,
    ) -> Result<Self> {
        if quantum.constant_term() != 0 {
            return Err(MirrorError::NonVanishingLimit(quantum.constant_term().to_string()));
        }
        if quantum.has_logs() {
            return Err(MirrorError::Series(SeriesError::DomainError(
                "quantum part carries log terms".into(),
            )));
        }
        let invariants = quantum.terms().map(|(e, _, c)| (e, c.clone())).collect();
        Ok(GwPotential {
            genus,
            holes,
            classical,
            quantum,
            invariants,
            instanton_numbers,
        })
    }

    /// `F_1` with classical term `−(1/24) ∫c₂·H · t` and supplied `N_{1,d}`.
    pub fn genus_one(config: &CyFamilyConfig, quantum: LogSeries) -> Result<Self> {
        let c = Rational::from((-config.c2h, 24));
        Self::checked(1, 0, ClassicalPart::Linear(c), quantum, BTreeMap::new())
    }

    /// `F_g`, `g ≥ 2`, with the constant-map contribution as classical term.
    pub fn higher_genus(genus: u32, config: &CyFamilyConfig, quantum: LogSeries) -> Result<Self> {
        let c = constant_map_contribution(genus, config.euler)?;
        Self::checked(genus, 0, ClassicalPart::Constant(c), quantum, BTreeMap::new())
    }

    /// Open potential `F_{(g,h)}`, a series in `Q^{1/r}` without classical term.
    pub fn open(genus: u32, holes: u32, quantum: LogSeries) -> Result<Self> {
        if holes == 0 {
            return Err(MirrorError::InvalidConfig("open potentials need h > 0".into()));
        }
        Self::checked(genus, holes, ClassicalPart::None, quantum, BTreeMap::new())
    }

    /// `(q d/dq)³ F_0^quantum + ∫H³`, which must reproduce `C_ttt`.
    pub fn third_derivative(&self, classical: i64) -> LogSeries {
        let order = self.quantum.order().clone();
        self.quantum.theta_n(3).add(&LogSeries::constant(classical, order))
    }
}

pub fn assemble_genus0(config: &CyFamilyConfig, table: &InstantonTable, order: u32) -> Result<GwPotential> {
    let quantum = LogSeries::from_terms(
        1,
        order,
        table
            .genus0
            .iter()
            .filter(|(&d, _)| d < order)
            .map(|(&d, n)| (Rational::from(d), 0u8, n.clone())),
    )?;
    let cubic = Rational::from((config.triple_intersection, 6));
    let integers = table
        .instanton
        .iter()
        .filter(|(_, v)| *v.denom() == 1)
        .map(|(&d, v)| (d, v.numer().clone()))
        .collect();
    GwPotential::checked(0, 0, ClassicalPart::Cubic(cubic), quantum, integers)
}

/// `Q(Ω_0, θΩ_0)` with `Ω_0 = Ω/x⁰`, which vanishes for a normalized frame.
pub fn check_special_geometry_identity(
    basis: &PeriodBasis,
    frame: &SymplecticFrame,
) -> Result<LogSeries> {
    let pi = frame.period_series(basis)?;
    let theta_pi: Vec<LogSeries> = pi.iter().map(LogSeries::theta).collect();
    let pairing = frame.pair_series(&pi, &theta_pi)?;
    let inv = pi[0].invert()?;
    Ok(pairing.mul(&inv.pow(2)?)?)
}

/// Everything the genus-zero stage produces for one family.
#[derive(Clone, Debug)]
pub struct GenusZeroResult {
    pub family: String,
    pub basis: PeriodBasis,
    pub mirror: MirrorMap,
    pub yukawa: RationalFunction,
    pub c_ttt: LogSeries,
    pub table: InstantonTable,
    pub potential: GwPotential,
}

pub fn genus_zero(config: &CyFamilyConfig, order: u32) -> Result<GenusZeroResult> {
    config.validate()?;
    let basis = config.pf.frobenius_solve(order)?;
    let mirror = build_mirror_map(&basis)?;
    let yukawa = yukawa_theta(config)?;
    let c_ttt = flat_yukawa(&yukawa, &basis, &mirror)?;
    let table = extract_instantons(&c_ttt, config)?;
    let potential = assemble_genus0(config, &table, order)?;
    Ok(GenusZeroResult {
        family: config.name.clone(),
        basis,
        mirror,
        yukawa,
        c_ttt,
        table,
        potential,
    })
}

impl GenusZeroResult {
    /// `{"family", "n", "N0", "mirror_map", "yukawa_flat"}` with degree keys
    /// in numeric order; `mirror_map` is `z(q)`.
    pub fn to_json(&self) -> serde_json::Value {
        let n: serde_json::Map<String, serde_json::Value> = self
            .table
            .instanton
            .iter()
            .map(|(&d, v)| {
                let s = if *v.denom() == 1 { v.numer().to_string() } else { rational_to_pq(v) };
                (d.to_string(), s.into())
            })
            .collect();
        let n0: serde_json::Map<String, serde_json::Value> = self
            .table
            .genus0
            .iter()
            .map(|(&d, v)| (d.to_string(), rational_to_pq(v).into()))
            .collect();
        serde_json::json!({
            "family": self.family,
            "n": n,
            "N0": n0,
            "mirror_map": self.mirror.z_of_q,
            "yukawa_flat": self.c_ttt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn trivial_mirror_map() {
        let basis = PfOperator::theta4().frobenius_solve(6).unwrap();
        let m = build_mirror_map(&basis).unwrap();
        assert_eq!(m.t_of_z, LogSeries::log_z(6));
        assert_eq!(m.q_of_z, LogSeries::z(6));
        assert_eq!(m.z_of_q, LogSeries::z(6));
    }

    #[test]
    fn quintic_mirror_map() {
        let basis = PfOperator::quintic().frobenius_solve(8).unwrap();
        let m = build_mirror_map(&basis).unwrap();
        assert_eq!(m.q_of_z.coeff_at(1, 0), 1);
        assert_eq!(m.q_of_z.coeff_at(2, 0), 770);
        assert_eq!(m.z_of_q.coeff_at(2, 0), -770);
        assert_eq!(m.z_of_q.coeff_at(3, 0), 171525);
        assert_eq!(m.z_of_q.compose(&m.q_of_z).unwrap(), LogSeries::z(8));
    }

    #[test]
    fn quintic_yukawa() {
        let y = yukawa_theta(&CyFamilyConfig::quintic()).unwrap();
        assert_eq!(y.numerator, Polynomial::from_ints(&[5]));
        assert_eq!(y.denominator, Polynomial::from_ints(&[1, -3125]));
        assert_eq!(y.at_zero(), 5);
    }

    #[test]
    fn rescaled_yukawa() {
        let pf = PfOperator::quintic().rescaled(&q(3, 1)).unwrap();
        let y = yukawa_from_operator(&pf, 5).unwrap();
        assert_eq!(y.denominator, Polynomial::from_ints(&[1, -9375]));
    }

    #[test]
    fn non_rational_yukawa_is_rejected() {
        // a_3 = −2z/(…) with a_4 = 1 gives θY = zY, Y = e^z
        let mut c = vec![Polynomial::zero(); 5];
        c[3] = Polynomial::from_ints(&[0, -2]);
        c[4] = Polynomial::constant(1);
        let pf = PfOperator::new(c, q(1, 1)).unwrap();
        assert!(matches!(
            yukawa_from_operator(&pf, 1),
            Err(MirrorError::NonMeromorphic { .. })
        ));
    }

    #[test]
    fn trivial_flat_yukawa() {
        let mut config = CyFamilyConfig::quintic();
        config.pf = PfOperator::theta4();
        config.triple_intersection = 7;
        let r = genus_zero(&config, 6).unwrap();
        assert_eq!(r.c_ttt, LogSeries::constant(7, 6));
        assert!(r.table.all_zero());
    }

    #[test]
    fn quintic_flat_yukawa_and_instantons() {
        let r = genus_zero(&CyFamilyConfig::quintic(), 6).unwrap();
        assert_eq!(r.c_ttt.coeff_at(0, 0), 5);
        assert_eq!(r.c_ttt.coeff_at(1, 0), 2875);
        assert_eq!(r.c_ttt.coeff_at(2, 0), 4876875);
        let n = r.table.integers().unwrap();
        assert_eq!(n[&1], 2875);
        assert_eq!(n[&2], 609250);
        assert_eq!(n[&3], 317206375);
        assert_eq!(r.table.genus0[&2], q(2875, 8) + Rational::from(609250));
    }

    #[test]
    fn constant_yukawa_has_no_instantons() {
        let c = LogSeries::constant(5, 8);
        let t = extract_instantons(&c, &CyFamilyConfig::quintic()).unwrap();
        assert!(t.all_zero());
        assert_eq!(t.instanton.len(), 7);
    }

    #[test]
    fn integrality_violation_is_reported() {
        let c = LogSeries::from_coeffs([q(5, 1), q(1, 2)], 3);
        let t = extract_instantons(&c, &CyFamilyConfig::quintic()).unwrap();
        assert_eq!(t.report.non_integral[0], 1);
        assert!(matches!(
            t.require_integral(),
            Err(MirrorError::IntegralityViolation { degree: 1, .. })
        ));
    }

    #[test]
    fn wrong_classical_term() {
        let c = LogSeries::constant(4, 3);
        assert!(matches!(
            extract_instantons(&c, &CyFamilyConfig::quintic()),
            Err(MirrorError::ClassicalTermMismatch { .. })
        ));
    }

    #[test]
    fn genus0_assembly() {
        let r = genus_zero(&CyFamilyConfig::quintic(), 5).unwrap();
        assert_eq!(r.potential.classical, ClassicalPart::Cubic(q(5, 6)));
        assert_eq!(r.potential.quantum.constant_term(), 0);
        assert_eq!(r.potential.quantum.coeff_at(1, 0), 2875);
        assert_eq!(r.potential.third_derivative(5), r.c_ttt);
    }

    #[test]
    fn higher_genus_and_open_potentials() {
        let config = CyFamilyConfig::quintic();
        let f2 = GwPotential::higher_genus(2, &config, LogSeries::zero(4)).unwrap();
        assert_eq!(f2.classical, ClassicalPart::Constant(q(-5, 144)));
        let f1 = GwPotential::genus_one(&config, LogSeries::zero(4)).unwrap();
        assert_eq!(f1.classical, ClassicalPart::Linear(q(-50, 24)));
        let open = LogSeries::monomial(2, q(1, 2), 0, 3).unwrap();
        let f01 = GwPotential::open(0, 1, open).unwrap();
        assert_eq!(f01.quantum.ramification(), 2);
        assert_eq!(f01.invariants[&q(1, 2)], 2);
        assert!(GwPotential::open(0, 1, LogSeries::one(3)).is_err());
    }

    #[test]
    fn json_export() {
        let r = genus_zero(&CyFamilyConfig::quintic(), 12).unwrap();
        let v = r.to_json();
        assert_eq!(v["family"], "quintic");
        assert_eq!(v["n"]["1"], "2875");
        let keys: Vec<&String> = v["n"].as_object().unwrap().keys().collect();
        assert_eq!(keys[..3], ["1", "2", "3"]);
        assert_eq!(v["N0"]["2"], "4876875/8");
        assert_eq!(v["mirror_map"]["ramification"], 1);
    }

    #[test]
    fn special_geometry_identity() {
        let basis = PfOperator::quintic().frobenius_solve(10).unwrap();
        let r = check_special_geometry_identity(&basis, &SymplecticFrame::normalized(5)).unwrap();
        assert!(r.is_zero());
        let bad = check_special_geometry_identity(&basis, &SymplecticFrame::normalized(5).with_transition({
            let mut t: [[Rational; 4]; 4] = Default::default();
            t[0][0] = q(1, 1);
            t[1][1] = q(1, 1);
            t[2][3] = q(-5, 1);
            t[3][2] = q(6, 1);
            t
        }))
        .unwrap();
        assert!(!bad.is_zero());
        assert_eq!(
            check_special_geometry_identity(&basis, &SymplecticFrame::darboux()),
            Err(MirrorError::Hodge(HodgeError::NormalizationMissing))
        );
        let trivial = PfOperator::theta4().frobenius_solve(6).unwrap();
        assert!(check_special_geometry_identity(&trivial, &SymplecticFrame::normalized(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn truncation_monotonicity() {
        let big = genus_zero(&CyFamilyConfig::quintic(), 9).unwrap();
        let small = genus_zero(&CyFamilyConfig::quintic(), 6).unwrap();
        assert_eq!(big.c_ttt.truncate(6), small.c_ttt);
        assert_eq!(big.mirror.z_of_q.truncate(6), small.mirror.z_of_q);
    }

    #[test]
    fn config_validation() {
        let mut c = CyFamilyConfig::quintic();
        c.kappa = 2;
        assert!(c.validate().is_err());
        let mut c = CyFamilyConfig::quintic();
        c.triple_intersection = 0;
        assert!(c.validate().is_err());
    }
}
