//! Symplectic frames, the Hodge metric and Weil–Petersson curvature.
//!
//! Period vectors are written in Darboux coordinates `(x⁰, x¹, p₀, p₁)` with
//! `Q(u, v) = Σ_i (x^i_u p_{i,v} − p_{i,u} x^i_v)`. The Hermitian form is
//! `(u, v) = √−1 · Q(u, v̄)`; with the orientation used here `(Ω, Ω̄) > 0`.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{float_to_string, zeta3, ComplexHP};
use crate::picard_fuchs::{PeriodBasis, PfError, PfOperator};
use crate::poly::RationalFunction;
use crate::series::{LogBranch, LogSeries, SeriesError};

/// Number of period components for a one-parameter family.
pub const PERIOD_DIM: usize = 4;
/// Relative tolerance for the Hodge–Riemann sign checks.
pub const SIGN_TOLERANCE: f64 = 1e-20;
/// Target for the relative series tail at the largest sampled `|z|`.
pub const TAIL_TARGET: f64 = 1e-20;

/// Log degree carried by each Darboux component: `x⁰, x¹, p₀, p₁`.
const GRADING: [usize; 4] = [0, 1, 3, 2];
const P0: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HodgeError {
    #[error("symplectic frame carries no normalization")]
    NormalizationMissing,
    #[error("frame is not normalized: {0}")]
    NormalizationFailed(String),
    #[error("Hodge-Riemann sign check failed for {quantity}: {value:e}")]
    SignViolation { quantity: &'static str, value: f64 },
    #[error("finite-difference curvature off by {relative_error:e}; retry with step {suggested_step:e}")]
    PrecisionLoss {
        relative_error: f64,
        suggested_step: f64,
    },
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    PicardFuchs(#[from] PfError),
}

pub type Result<T, E = HodgeError> = std::result::Result<T, E>;

type Matrix = [[Rational; PERIOD_DIM]; PERIOD_DIM];

/// Darboux frame together with the constant transition from the Frobenius
/// basis.
///
/// The transition acts on `ω̃_k = ω_k / (2πi)^k`. It must be graded: the
/// component `x⁰, x¹, p₀, p₁` draws only on `ω̃_0, ω̃_1, ω̃_3, ω̃_2`
/// respectively, so the exact series identities hold with `2πi` set to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticFrame {
    pairing: [[i64; PERIOD_DIM]; PERIOD_DIM],
    transition: Option<Matrix>,
    /// Adds `−ζ(3) χ / (2πi)³ · ω_0` to `p₀` in numeric evaluation.
    euler: Option<i64>,
}

impl Default for SymplecticFrame {
    fn default() -> Self {
        Self::darboux()
    }
}

impl SymplecticFrame {
    /// The standard pairing with no transition fixed yet.
    pub fn darboux() -> Self {
        let mut q = [[0i64; PERIOD_DIM]; PERIOD_DIM];
        for i in 0..2 {
            q[i][i + 2] = 1;
            q[i + 2][i] = -1;
        }
        SymplecticFrame {
            pairing: q,
            transition: None,
            euler: None,
        }
    }

    /// `x⁰ = ω̃_0`, `x¹ = ω̃_1`, `p₁ = κ ω̃_2`, `p₀ = −κ ω̃_3`, where `κ = ∫H³`.
    pub fn normalized(classical: i64) -> Self {
        let mut t: Matrix = Default::default();
        t[0][0] = Rational::from(1);
        t[1][1] = Rational::from(1);
        t[2][3] = Rational::from(-classical);
        t[3][2] = Rational::from(classical);
        Self::darboux().with_transition(t)
    }

    pub fn with_transition(mut self, t: Matrix) -> Self {
        self.transition = Some(t);
        self
    }

    /// Real structure with the `ζ(3)χ` constant in `p₀`.
    pub fn with_euler(mut self, euler: i64) -> Self {
        self.euler = Some(euler);
        self
    }

    pub fn pairing_matrix(&self) -> &[[i64; PERIOD_DIM]; PERIOD_DIM] {
        &self.pairing
    }

    pub fn transition(&self) -> Result<&Matrix> {
        self.transition.as_ref().ok_or(HodgeError::NormalizationMissing)
    }

    pub fn euler(&self) -> Option<i64> {
        self.euler
    }

    fn check_graded(&self) -> Result<&Matrix> {
        let t = self.transition()?;
        for (r, row) in t.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if *v != 0 && k != GRADING[r] {
                    return Err(HodgeError::NormalizationFailed(format!(
                        "transition entry ({r}, {k}) mixes log degrees"
                    )));
                }
            }
        }
        Ok(t)
    }

    /// `Π = T ω` as exact series.
    pub fn period_series(&self, basis: &PeriodBasis) -> Result<Vec<LogSeries>> {
        let t = self.check_graded()?;
        let order = basis.omega(0).order().clone();
        Ok(t.iter()
            .map(|row| {
                row.iter()
                    .zip(basis.omegas())
                    .filter(|(c, _)| **c != 0)
                    .fold(LogSeries::zero(order.clone()), |acc, (c, w)| acc.add(&w.scale(c)))
            })
            .collect())
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let mut s = Rational::new();
        for (a, row) in self.pairing.iter().enumerate() {
            for (b, &q) in row.iter().enumerate() {
                if q != 0 {
                    s += Rational::from(&u[a] * &v[b]) * q;
                }
            }
        }
        s
    }

    pub fn pair_series(&self, u: &[LogSeries], v: &[LogSeries]) -> Result<LogSeries> {
        let order = u[0].order().clone().min(v[0].order().clone());
        let mut s = LogSeries::zero(order);
        for (a, row) in self.pairing.iter().enumerate() {
            for (b, &q) in row.iter().enumerate() {
                if q != 0 {
                    s = s.add(&u[a].mul(&v[b])?.scale(&Rational::from(q)));
                }
            }
        }
        Ok(s)
    }

    pub fn pair_numeric(&self, u: &[ComplexHP], v: &[ComplexHP]) -> ComplexHP {
        let mut s = ComplexHP::zero(u[0].prec());
        for (a, row) in self.pairing.iter().enumerate() {
            for (b, &q) in row.iter().enumerate() {
                match q {
                    0 => {}
                    1 => s = &s + &(&u[a] * &v[b]),
                    -1 => s = &s - &(&u[a] * &v[b]),
                    _ => s = &s + &(&u[a] * &v[b]).scale(&Float::with_val(s.prec(), q)),
                }
            }
        }
        s
    }

    /// `(u, v) = √−1 Q(u, v̄)`.
    pub fn hermitian(&self, u: &[ComplexHP], v: &[ComplexHP]) -> ComplexHP {
        let vbar: Vec<ComplexHP> = v.iter().map(ComplexHP::conj).collect();
        &ComplexHP::i(u[0].prec()) * &self.pair_numeric(u, &vbar)
    }

    /// Checks `Q(Ω, θΩ) = 0` and `Q(Ω, θ³Ω) = −Y` exactly.
    pub fn verify_normalization(&self, basis: &PeriodBasis, yukawa: &RationalFunction) -> Result<()> {
        let [first, _, third] = griffiths_residuals_with_top(basis, self)?;
        if !first.is_zero() {
            return Err(HodgeError::NormalizationFailed(format!("Q(Ω, θΩ) = {first}")));
        }
        let y = yukawa.to_series(third.order().clone())?;
        if third.add(&y).is_zero() {
            Ok(())
        } else {
            Err(HodgeError::NormalizationFailed(format!(
                "Q(Ω, θ³Ω) + Y = {}",
                third.add(&y)
            )))
        }
    }
}

/// `Q(Ω, θΩ)` and `Q(Ω, θ²Ω)`; both vanish for a normalized frame.
pub fn griffiths_residuals(basis: &PeriodBasis, frame: &SymplecticFrame) -> Result<(LogSeries, LogSeries)> {
    let pi = frame.period_series(basis)?;
    let t1: Vec<LogSeries> = pi.iter().map(LogSeries::theta).collect();
    let t2: Vec<LogSeries> = t1.iter().map(LogSeries::theta).collect();
    Ok((frame.pair_series(&pi, &t1)?, frame.pair_series(&pi, &t2)?))
}

fn griffiths_residuals_with_top(basis: &PeriodBasis, frame: &SymplecticFrame) -> Result<[LogSeries; 3]> {
    let pi = frame.period_series(basis)?;
    let (first, _) = griffiths_residuals(basis, frame)?;
    let t3: Vec<LogSeries> = pi.iter().map(|p| p.theta_n(3)).collect();
    let third = frame.pair_series(&pi, &t3)?;
    Ok([first, LogSeries::zero(0), third])
}

/// Finite-difference stencil for the Laplacian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    Second,
    Fourth,
}

impl Stencil {
    fn accuracy(self) -> i32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }
}

/// Everything computed at one point of the moduli disk.
#[derive(Clone, Debug)]
pub struct HodgePointReport {
    pub z0: ComplexHP,
    pub order: u32,
    pub precision: u32,
    /// Largest series tail bound among the evaluated periods.
    pub tail_bound: Float,
    pub periods: [ComplexHP; PERIOD_DIM],
    /// `θΠ, θ²Π, θ³Π`.
    pub theta_periods: [[ComplexHP; PERIOD_DIM]; 3],
    /// `(Ω, Ω̄)`
    pub pairing_value: ComplexHP,
    /// `K = −log (Ω, Ω̄)`
    pub kahler_potential: ComplexHP,
    /// `√−1 Q(Ω, θΩ)`, zero since `Ω` and `∇Ω` span an isotropic subspace.
    pub isotropy: ComplexHP,
    /// `(𝔻Ω, 𝔻Ω̄)`
    pub dd_pairing: ComplexHP,
    /// `G_{zz̄} = −(𝔻Ω, 𝔻Ω̄) / (Ω, Ω̄)`
    pub g_wp: Float,
    /// `G_{zz̄}` from the expanded `∂∂̄K` formula in the frame `Ω/x⁰`.
    pub g_wp_expanded: Float,
    /// `F_{zz̄}` of `𝓛∨`.
    pub curvature: Float,
    pub chern_form_positive: bool,
}

impl HodgePointReport {
    pub fn to_json(&self) -> serde_json::Value {
        let vec = |v: &[ComplexHP]| v.iter().map(ComplexHP::to_strings).collect::<Vec<_>>();
        serde_json::json!({
            "z0": self.z0.to_strings(),
            "order": self.order,
            "precision_bits": self.precision,
            "tail_bound": float_to_string(&self.tail_bound),
            "periods": vec(&self.periods),
            "theta_periods": self.theta_periods.iter().map(|p| vec(p)).collect::<Vec<_>>(),
            "pairing_value": self.pairing_value.to_strings(),
            "kahler_potential": self.kahler_potential.to_strings(),
            "isotropy": self.isotropy.to_strings(),
            "dd_pairing": self.dd_pairing.to_strings(),
            "g_wp": float_to_string(&self.g_wp),
            "g_wp_expanded": float_to_string(&self.g_wp_expanded),
            "curvature": float_to_string(&self.curvature),
            "chern_form_positive": self.chern_form_positive,
        })
    }

    /// `|G − G_expanded| / |G|`
    pub fn route_discrepancy(&self) -> f64 {
        let d = Float::with_val(self.precision, &self.g_wp - &self.g_wp_expanded).abs();
        if self.g_wp.is_zero() {
            d.to_f64()
        } else {
            (d / self.g_wp.clone().abs()).to_f64()
        }
    }
}

impl Serialize for HodgePointReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Comparison of algebraic and finite-difference curvature.
#[derive(Clone, Debug)]
pub struct FdCurvature {
    pub algebraic: Float,
    pub finite_difference: Float,
    pub relative_error: f64,
    pub step: f64,
    pub stencil: Stencil,
}

/// Evaluates periods and their θ-derivatives at points of the disk.
#[derive(Clone, Debug)]
pub struct HodgeEvaluator {
    derivs: Vec<[LogSeries; PERIOD_DIM]>,
    frame: SymplecticFrame,
    transition: Matrix,
    radius: Rational,
    order: u32,
}

impl HodgeEvaluator {
    pub fn new(basis: &PeriodBasis, frame: &SymplecticFrame, radius: Rational) -> Result<Self> {
        let transition = frame.check_graded()?.clone();
        let mut derivs = vec![basis.omegas().clone()];
        for j in 1..PERIOD_DIM {
            let next = derivs[j - 1].clone().map(|w| w.theta());
            derivs.push(next);
        }
        Ok(HodgeEvaluator {
            derivs,
            frame: frame.clone(),
            transition,
            radius,
            order: basis.order(),
        })
    }

    /// Solves the operator to an order whose tail at `|z| = max_modulus`
    /// stays below [`TAIL_TARGET`] relative to `x⁰`.
    pub fn for_operator(pf: &PfOperator, frame: &SymplecticFrame, max_modulus: f64, prec: u32) -> Result<Self> {
        let radius = pf.singular_radius().clone();
        let mut order = auto_order(&radius, max_modulus);
        let probe = ComplexHP::from_f64(prec, max_modulus, 0.0);
        loop {
            let basis = pf.frobenius_solve(order)?;
            let ev = HodgeEvaluator::new(&basis, frame, radius.clone())?;
            let (pi, tail) = ev.periods(&probe, 0)?;
            let rel = (tail / pi[0][0].abs()).to_f64();
            if rel < TAIL_TARGET || order >= 2000 {
                return Ok(ev);
            }
            order = order * 3 / 2 + 8;
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn frame(&self) -> &SymplecticFrame {
        &self.frame
    }

    /// `θ^j Π` for `j ≤ derivatives`, with the largest tail bound.
    pub fn periods(&self, z0: &ComplexHP, derivatives: usize) -> Result<(Vec<[ComplexHP; PERIOD_DIM]>, Float)> {
        let prec = z0.prec();
        let two_pi_i = ComplexHP::two_pi_i(prec);
        let scales: Vec<ComplexHP> = (0..PERIOD_DIM as i32).map(|k| two_pi_i.powi(-k)).collect();
        let real_constant = self.frame.euler.map(|chi| {
            let c = zeta3(prec) * Float::with_val(prec, -chi);
            &ComplexHP::from_floats(c, Float::new(prec)) * &scales[3]
        });
        let mut tail = Float::new(prec);
        let mut out = Vec::with_capacity(derivatives + 1);
        for series in self.derivs.iter().take(derivatives + 1) {
            let mut w = Vec::with_capacity(PERIOD_DIM);
            for (k, s) in series.iter().enumerate() {
                let v = s.eval(z0, LogBranch::Principal, &self.radius)?;
                let scaled = &v.value * &scales[k];
                tail.max_mut(&(v.tail_bound * scales[k].abs()));
                w.push(scaled);
            }
            let mut pi: [ComplexHP; PERIOD_DIM] = std::array::from_fn(|_| ComplexHP::zero(prec));
            for (r, row) in self.transition.iter().enumerate() {
                for (k, c) in row.iter().enumerate() {
                    if *c != 0 {
                        pi[r] = &pi[r] + &w[k].scale_rational(c);
                    }
                }
            }
            if let Some(c) = &real_constant {
                pi[P0] = &pi[P0] + &(c * &w[0]);
            }
            out.push(pi);
        }
        Ok((out, tail))
    }

    /// `‖Ω‖² = (Ω, Ω̄)` at `z0`.
    pub fn norm_squared(&self, z0: &ComplexHP) -> Result<ComplexHP> {
        let (pi, _) = self.periods(z0, 0)?;
        Ok(self.frame.hermitian(&pi[0], &pi[0]))
    }

    pub fn hodge_point(&self, z0: &ComplexHP) -> Result<HodgePointReport> {
        let prec = z0.prec();
        let (pi, tail) = self.periods(z0, 3)?;
        let f = &self.frame;
        let tol = Float::with_val(prec, SIGN_TOLERANCE);

        let n = f.hermitian(&pi[0], &pi[0]);
        if n.re <= 0 || Float::with_val(prec, n.im.abs_ref()) > Float::with_val(prec, &tol * &n.re) {
            return Err(HodgeError::SignViolation {
                quantity: "(Ω, Ω̄)",
                value: n.re.to_f64(),
            });
        }
        let isotropy = &ComplexHP::i(prec) * &f.pair_numeric(&pi[0], &pi[1]);
        if isotropy.abs() > Float::with_val(prec, &tol * &n.re) {
            return Err(HodgeError::SignViolation {
                quantity: "(Ω, Ω)",
                value: isotropy.abs_f64(),
            });
        }

        // ∇Ω = θΠ / z
        let nabla: Vec<ComplexHP> = pi[1].iter().map(|v| v / z0).collect();
        let a = &f.hermitian(&nabla, &pi[0]) / &n;
        let dd: Vec<ComplexHP> = nabla.iter().zip(&pi[0]).map(|(v, p)| v - &(&a * p)).collect();
        let dd_pairing = f.hermitian(&dd, &dd);
        let nn = f.hermitian(&nabla, &nabla);
        let scale = Float::with_val(prec, &tol * nn.abs()) + Float::with_val(prec, &tol * &n.re);
        if dd_pairing.re > scale {
            return Err(HodgeError::SignViolation {
                quantity: "(𝔻Ω, 𝔻Ω̄)",
                value: dd_pairing.re.to_f64(),
            });
        }
        let g_wp = Float::with_val(prec, -&dd_pairing.re) / &n.re;

        // expanded formula in the frame Ω/x⁰
        let x0 = &pi[0][0];
        let dx0 = &nabla[0];
        let om0: Vec<ComplexHP> = pi[0].iter().map(|p| p / x0).collect();
        let nabla0: Vec<ComplexHP> = nabla
            .iter()
            .zip(&pi[0])
            .map(|(v, p)| &(&(v * x0) - &(p * dx0)) / &(x0 * x0))
            .collect();
        let n0 = f.hermitian(&om0, &om0).re;
        let m0 = f.hermitian(&nabla0, &nabla0).re;
        let p0 = f.hermitian(&nabla0, &om0).norm_sqr();
        let g_wp_expanded = (p0 - Float::with_val(prec, &m0 * &n0)) / Float::with_val(prec, n0.square_ref());

        if g_wp.is_sign_negative() && Float::with_val(prec, g_wp.abs_ref()) > scale {
            return Err(HodgeError::SignViolation {
                quantity: "G_zz̄",
                value: g_wp.to_f64(),
            });
        }
        let chern_form_positive = g_wp > 0;
        Ok(HodgePointReport {
            z0: z0.clone(),
            order: self.order,
            precision: prec,
            tail_bound: tail,
            kahler_potential: -n.ln(),
            periods: pi[0].clone(),
            theta_periods: [pi[1].clone(), pi[2].clone(), pi[3].clone()],
            pairing_value: n,
            isotropy,
            dd_pairing,
            curvature: g_wp.clone(),
            g_wp,
            g_wp_expanded,
            chern_form_positive,
        })
    }

    /// Evaluates all points in parallel; order matches the input.
    pub fn grid(&self, points: &[ComplexHP]) -> Vec<Result<HodgePointReport>> {
        points.par_iter().map(|z| self.hodge_point(z)).collect()
    }

    fn kahler(&self, z: &ComplexHP) -> Result<Float> {
        let n = self.norm_squared(z)?;
        Ok(-n.re.ln())
    }

    /// `¼ Δ K` by central differences against the algebraic `G_{zz̄}`.
    pub fn fd_curvature(&self, z0: &ComplexHP, step: f64, stencil: Stencil) -> Result<FdCurvature> {
        let prec = z0.prec();
        let h = Float::with_val(prec, step);
        let shift = |dx: i32, dy: i32| -> ComplexHP {
            let re = Float::with_val(prec, &z0.re + Float::with_val(prec, &h * dx));
            let im = Float::with_val(prec, &z0.im + Float::with_val(prec, &h * dy));
            ComplexHP::from_floats(re, im)
        };
        let k0 = self.kahler(z0)?;
        let mut lap = Float::new(prec);
        for (dx, dy) in [(1, 0), (0, 1)] {
            let kp = self.kahler(&shift(dx, dy))?;
            let km = self.kahler(&shift(-dx, -dy))?;
            match stencil {
                Stencil::Second => {
                    lap += kp + km - Float::with_val(prec, &k0 * 2u32);
                }
                Stencil::Fourth => {
                    let kp2 = self.kahler(&shift(2 * dx, 2 * dy))?;
                    let km2 = self.kahler(&shift(-2 * dx, -2 * dy))?;
                    let s = (kp + km) * 16u32 - kp2 - km2 - Float::with_val(prec, &k0 * 30u32);
                    lap += s / 12u32;
                }
            }
        }
        let fd = lap / Float::with_val(prec, h.square_ref()) / 4u32;
        let algebraic = self.hodge_point(z0)?.g_wp;
        let diff = Float::with_val(prec, &fd - &algebraic).abs();
        let relative_error = if algebraic.is_zero() {
            diff.to_f64()
        } else {
            (diff / algebraic.clone().abs()).to_f64()
        };
        Ok(FdCurvature {
            algebraic,
            finite_difference: fd,
            relative_error,
            step,
            stencil,
        })
    }

    /// As [`fd_curvature`](Self::fd_curvature), failing above `tolerance`.
    pub fn fd_curvature_check(
        &self,
        z0: &ComplexHP,
        step: f64,
        stencil: Stencil,
        tolerance: f64,
    ) -> Result<FdCurvature> {
        let r = self.fd_curvature(z0, step, stencil)?;
        if r.relative_error.is_finite() && r.relative_error <= tolerance {
            return Ok(r);
        }
        let p = stencil.accuracy() as f64;
        let factor = if r.relative_error.is_finite() && r.relative_error > 0.0 {
            (tolerance / r.relative_error).powf(1.0 / p).min(0.5)
        } else {
            0.5
        };
        Err(HodgeError::PrecisionLoss {
            relative_error: r.relative_error,
            suggested_step: step * factor,
        })
    }
}

/// Convenience wrapper around [`HodgeEvaluator::hodge_point`].
pub fn hodge_point(
    basis: &PeriodBasis,
    frame: &SymplecticFrame,
    radius: &Rational,
    z0: &ComplexHP,
) -> Result<HodgePointReport> {
    HodgeEvaluator::new(basis, frame, radius.clone())?.hodge_point(z0)
}

/// Truncation order with `(|z|/R)^N` below [`TAIL_TARGET`], plus slack for
/// log factors.
pub fn auto_order(radius: &Rational, max_modulus: f64) -> u32 {
    let rho = max_modulus / radius.to_f64();
    if !(rho > 0.0 && rho < 1.0) {
        return 16;
    }
    let n = (TAIL_TARGET.ln() / rho.ln()).ceil() + 12.0;
    n.clamp(16.0, 2000.0) as u32
}

/// Sample points at moduli `fraction · R · j/(samples+1)`, spread in angle
/// over `(−3π/4, 3π/4)` so none sits on the cut.
pub fn sample_grid(radius: &Rational, fraction: f64, samples: usize, prec: u32) -> Result<Vec<ComplexHP>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(HodgeError::InvalidGrid(format!("radius fraction {fraction} outside (0, 1)")));
    }
    if samples == 0 {
        return Err(HodgeError::InvalidGrid("no samples requested".into()));
    }
    let pi = ComplexHP::pi(prec);
    let r_max = Float::with_val(prec, radius) * fraction;
    Ok((0..samples)
        .map(|j| {
            let r = Float::with_val(prec, &r_max * (j as u32 + 1)) / (samples as u32 + 1);
            let t = if samples == 1 {
                0.0
            } else {
                -0.75 + 1.5 * j as f64 / (samples - 1) as f64
            };
            let angle = Float::with_val(prec, &pi * t);
            let (s, c) = angle.sin_cos(Float::new(prec));
            ComplexHP::from_floats(Float::with_val(prec, &r * &c), r * s)
        })
        .collect())
}

/// `10^{-e}` as an f64 threshold helper for callers comparing tails.
pub fn relative_tail(report: &HodgePointReport) -> f64 {
    (report.tail_bound.clone() / report.periods[0].abs()).to_f64()
}
