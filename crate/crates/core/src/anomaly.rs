//! Constant maps, the holomorphic anomaly equation and its open extension.
//!
//! Non-holomorphic sections live on an [`AnomalyGrid`]: samples at
//! independent holomorphic and antiholomorphic coordinates `(z_a, z̄_b)`.
//! Derivatives are central differences with a margin of one point in each
//! direction. A section of `𝓛^k ⊗ (T*)^{⊗m}` has covariant derivative
//! `D_z = ∂_z − m Γ + k ∂_z K` with `Γ = ∂_z log G_{zz̄}`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{ComplexHP, DEFAULT_PRECISION};
use crate::series::{LogBranch, LogSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnomalyError {
    #[error("{0}")]
    DomainError(String),
    #[error("stencil at ({a}, {b}) leaves the grid")]
    BoundaryPoint { a: usize, b: usize },
    #[error("grid is missing field {0:?}")]
    MissingField(String),
    #[error("(g, h) = ({g}, {h}) is outside the stable range")]
    UnstableRange { g: u32, h: u32 },
    #[error("propagator fails ∂̄S = C by {max_deviation:e}")]
    PropagatorMismatch { max_deviation: f64 },
    #[error("z̄-dependence of row {row} does not decay")]
    NoConvergence { row: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("integrated F_2 leaves residual {max:e} above tolerance {tolerance:e}")]
    ResidualTooLarge { max: f64, tolerance: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T, E = AnomalyError> = std::result::Result<T, E>;

/// Convention for the holomorphic limit: `z̄` runs toward the large-radius
/// regime of the flat coordinate, i.e. `Im t̄ → ∞`, along increasing index.
pub const LIMIT_CONVENTION: &str = "zbar to large radius (Im tbar -> inf) along increasing index";

/// Bernoulli numbers `B_0 … B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    /// Fills the table from `Σ_{k=0}^{n} C(n+1, k) B_k = 0`.
    pub fn generate(max_index: usize) -> Self {
        let mut values: Vec<Rational> = Vec::with_capacity(max_index + 1);
        values.push(Rational::from(1));
        for n in 1..=max_index {
            let mut s = Rational::new();
            for (k, b) in values.iter().enumerate() {
                s += Rational::from(b * Integer::from(Integer::binomial_u(n as u32 + 1, k as u32)));
            }
            values.push(-s / (n as u32 + 1));
        }
        BernoulliTable { values }
    }

    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.values.get(n)
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

pub fn bernoulli(n: usize) -> Rational {
    BernoulliTable::generate(n).values[n].clone()
}

/// `N_{g,0} = (−1)^g |B_{2g}| |B_{2g−2}| / (4g (2g−2) (2g−2)!) · χ`.
pub fn constant_map_contribution(g: u32, euler: i64) -> Result<Rational> {
    if g < 2 {
        return Err(AnomalyError::DomainError(format!(
            "constant-map contribution needs g >= 2, got {g}"
        )));
    }
    let table = BernoulliTable::generate(2 * g as usize);
    let b_top = Rational::from(table.values[2 * g as usize].abs_ref());
    let b_low = Rational::from(table.values[2 * g as usize - 2].abs_ref());
    let m = 2 * g - 2;
    let den = Integer::from(4 * g) * m * Integer::from(Integer::factorial(m));
    let mut v = b_top * b_low / den * euler;
    if g % 2 == 1 {
        v = -v;
    }
    Ok(v)
}

/// Values of a section on the grid, indexed `[a][b]` for `(z_a, z̄_b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field {
    rows: Vec<Vec<ComplexHP>>,
}

impl Field {
    pub fn new(rows: Vec<Vec<ComplexHP>>) -> Self {
        Field { rows }
    }

    pub fn from_fn(nz: usize, nzb: usize, mut f: impl FnMut(usize, usize) -> ComplexHP) -> Self {
        Field {
            rows: (0..nz).map(|a| (0..nzb).map(|b| f(a, b)).collect()).collect(),
        }
    }

    pub fn zeros(nz: usize, nzb: usize, prec: u32) -> Self {
        Self::from_fn(nz, nzb, |_, _| ComplexHP::zero(prec))
    }

    /// A `z̄`-independent field from a series in `z`.
    pub fn from_series(
        series: &LogSeries,
        z: &[ComplexHP],
        nzb: usize,
        radius: &Rational,
        branch: LogBranch,
    ) -> Result<Self> {
        let values = z
            .iter()
            .map(|zi| series.eval(zi, branch, radius).map(|v| v.value))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_fn(z.len(), nzb, |a, _| values[a].clone()))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.rows.first().map_or(0, Vec::len))
    }

    pub fn at(&self, a: usize, b: usize) -> &ComplexHP {
        &self.rows[a][b]
    }

    pub fn rows(&self) -> &[Vec<ComplexHP>] {
        &self.rows
    }

    pub fn add(&self, other: &Field) -> Field {
        let (nz, nzb) = self.shape();
        Field::from_fn(nz, nzb, |a, b| &self.rows[a][b] + &other.rows[a][b])
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(ComplexHP::is_zero)
    }
}

/// Pointwise residual on interior points.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    /// `values[a-1][b-1]` for interior `(a, b)`.
    pub values: Vec<Vec<ComplexHP>>,
    pub max: f64,
    pub mean: f64,
}

impl Residual {
    fn from_values(values: Vec<Vec<ComplexHP>>) -> Self {
        let abs: Vec<f64> = values.iter().flatten().map(ComplexHP::abs_f64).collect();
        let max = abs.iter().cloned().fold(0.0, f64::max);
        let mean = if abs.is_empty() { 0.0 } else { abs.iter().sum::<f64>() / abs.len() as f64 };
        Residual { values, max, mean }
    }

    /// Largest pointwise `|self − other|`.
    pub fn max_difference(&self, other: &Residual) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(x, y)| (x - y).abs_f64())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct GridAxes {
    z: Vec<ComplexHP>,
    zbar: Vec<ComplexHP>,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    grid: GridAxes,
    fields: BTreeMap<String, Field>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    frame_weight: BTreeMap<String, i64>,
}

/// Samples on a product grid of independent `z` and `z̄` values.
///
/// Field names: `F1, F2, …` for closed sections, `F(g,h)` for open ones,
/// `C` for `C_{z̄}^{zz}`, `G` for `G_{zz̄}`, `K` for the Kähler potential,
/// `Delta` for `Δ_{z̄}^z`, `x0` for the holomorphic period used in limits.
#[derive(Clone, Debug, PartialEq)]
pub struct AnomalyGrid {
    z: Vec<ComplexHP>,
    zbar: Vec<ComplexHP>,
    dz: ComplexHP,
    dzbar: ComplexHP,
    fields: BTreeMap<String, Field>,
    frame_weight: BTreeMap<String, i64>,
}

/// Relative tolerance on the uniformity of grid spacing.
const SPACING_TOLERANCE: f64 = 1e-9;

fn uniform_step(axis: &[ComplexHP], name: &str) -> Result<ComplexHP> {
    if axis.len() < 3 {
        return Err(AnomalyError::InvalidGrid(format!("axis {name} needs at least 3 points")));
    }
    let step = &axis[1] - &axis[0];
    if step.is_zero() {
        return Err(AnomalyError::InvalidGrid(format!("axis {name} has zero spacing")));
    }
    let scale = step.abs_f64();
    for w in axis.windows(2) {
        let d = &w[1] - &w[0];
        if (&d - &step).abs_f64() > SPACING_TOLERANCE * scale {
            return Err(AnomalyError::InvalidGrid(format!("axis {name} is not uniformly spaced")));
        }
    }
    Ok(step)
}

/// Name of the field holding `F_{(g,h)}`.
pub fn field_name(g: u32, h: u32) -> String {
    if h == 0 {
        format!("F{g}")
    } else {
        format!("F({g},{h})")
    }
}

fn is_excluded(g: u32, h: u32) -> bool {
    g == 0 && h <= 1
}

/// Ordered splittings `(g₁,h₁) + (g₂,h₂) = (g,h)` in the restricted sum,
/// which drops any term containing `(0,0)` or `(0,1)`.
pub fn sigma_prime_pairs(g: u32, h: u32) -> Vec<((u32, u32), (u32, u32))> {
    let mut out = Vec::new();
    for g1 in 0..=g {
        for h1 in 0..=h {
            let (g2, h2) = (g - g1, h - h1);
            if is_excluded(g1, h1) || is_excluded(g2, h2) {
                continue;
            }
            out.push(((g1, h1), (g2, h2)));
        }
    }
    out
}

impl AnomalyGrid {
    pub fn new(z: Vec<ComplexHP>, zbar: Vec<ComplexHP>) -> Result<Self> {
        let dz = uniform_step(&z, "z")?;
        let dzbar = uniform_step(&zbar, "zbar")?;
        Ok(AnomalyGrid {
            z,
            zbar,
            dz,
            dzbar,
            fields: BTreeMap::new(),
            frame_weight: BTreeMap::new(),
        })
    }

    /// `z_a = z0 + a·dz`, `z̄_b = zb0 + b·dzb` at the default precision.
    pub fn uniform(z0: (f64, f64), dz: (f64, f64), nz: usize, zb0: (f64, f64), dzb: (f64, f64), nzb: usize) -> Result<Self> {
        let axis = |s: (f64, f64), d: (f64, f64), n: usize| -> Vec<ComplexHP> {
            let s = ComplexHP::from_f64(DEFAULT_PRECISION, s.0, s.1);
            let d = ComplexHP::from_f64(DEFAULT_PRECISION, d.0, d.1);
            (0..n)
                .map(|i| &s + &d.scale_rational(&Rational::from(i as u32)))
                .collect()
        };
        Self::new(axis(z0, dz, nz), axis(zb0, dzb, nzb))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridJson =
            serde_json::from_str(text).map_err(|e| AnomalyError::InvalidGrid(e.to_string()))?;
        let mut grid = AnomalyGrid::new(doc.grid.z, doc.grid.zbar)?;
        for (name, field) in doc.fields {
            grid.insert(&name, field)?;
        }
        grid.frame_weight = doc.frame_weight;
        Ok(grid)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = GridJson {
            grid: GridAxes {
                z: self.z.clone(),
                zbar: self.zbar.clone(),
            },
            fields: self.fields.clone(),
            frame_weight: self.frame_weight.clone(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.z.len(), self.zbar.len())
    }

    pub fn z(&self) -> &[ComplexHP] {
        &self.z
    }

    pub fn zbar(&self) -> &[ComplexHP] {
        &self.zbar
    }

    pub fn insert(&mut self, name: &str, field: Field) -> Result<()> {
        if field.shape() != self.shape() || field.rows.iter().any(|r| r.len() != self.zbar.len()) {
            return Err(AnomalyError::InvalidGrid(format!(
                "field {name} has shape {:?}, grid is {:?}",
                field.shape(),
                self.shape()
            )));
        }
        self.fields.insert(name.to_string(), field);
        Ok(())
    }

    pub fn with_field(mut self, name: &str, field: Field) -> Result<Self> {
        self.insert(name, field)?;
        Ok(self)
    }

    /// Fills a field from a function of `(z, z̄)`.
    pub fn set_fn(&mut self, name: &str, f: impl Fn(&ComplexHP, &ComplexHP) -> ComplexHP) {
        let field = Field::from_fn(self.z.len(), self.zbar.len(), |a, b| f(&self.z[a], &self.zbar[b]));
        self.fields.insert(name.to_string(), field);
    }

    pub fn set_frame_weight(&mut self, name: &str, weight: i64) {
        self.frame_weight.insert(name.to_string(), weight);
    }

    pub fn field(&self, name: &str) -> Result<&Field> {
        self.fields
            .get(name)
            .ok_or_else(|| AnomalyError::MissingField(name.to_string()))
    }

    pub fn has_field(&self, name: &str) -> bool {
        self.fields.contains_key(name)
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.fields.keys().map(String::as_str)
    }

    fn section(&self, g: u32, h: u32) -> Result<&Field> {
        let name = field_name(g, h);
        match self.fields.get(&name) {
            Some(f) => Ok(f),
            None if h == 0 => self
                .fields
                .get(&format!("F({g},0)"))
                .ok_or(AnomalyError::MissingField(name)),
            None => Err(AnomalyError::MissingField(name)),
        }
    }

    /// Line-bundle weight of `F_{(g,h)}`: `2 − 2g − h` unless overridden.
    pub fn weight(&self, g: u32, h: u32) -> i64 {
        self.frame_weight
            .get(&field_name(g, h))
            .copied()
            .unwrap_or(2 - 2 * g as i64 - h as i64)
    }

    fn check_interior(&self, a: usize, b: usize) -> Result<()> {
        let (nz, nzb) = self.shape();
        if a == 0 || b == 0 || a + 1 >= nz || b + 1 >= nzb {
            return Err(AnomalyError::BoundaryPoint { a, b });
        }
        Ok(())
    }

    /// `∂_z f` at `(a, b)`.
    pub fn d_z(&self, f: &Field, a: usize, b: usize) -> Result<ComplexHP> {
        if a == 0 || a + 1 >= self.z.len() {
            return Err(AnomalyError::BoundaryPoint { a, b });
        }
        let two = &self.dz + &self.dz;
        Ok(&(&f.rows[a + 1][b] - &f.rows[a - 1][b]) / &two)
    }

    /// `∂_z² f` at `(a, b)`.
    pub fn d_zz(&self, f: &Field, a: usize, b: usize) -> Result<ComplexHP> {
        if a == 0 || a + 1 >= self.z.len() {
            return Err(AnomalyError::BoundaryPoint { a, b });
        }
        let mid = &f.rows[a][b] + &f.rows[a][b];
        let num = &(&f.rows[a + 1][b] + &f.rows[a - 1][b]) - &mid;
        Ok(&num / &(&self.dz * &self.dz))
    }

    /// `∂_z̄ f` at `(a, b)`.
    pub fn d_zbar(&self, f: &Field, a: usize, b: usize) -> Result<ComplexHP> {
        if b == 0 || b + 1 >= self.zbar.len() {
            return Err(AnomalyError::BoundaryPoint { a, b });
        }
        let two = &self.dzbar + &self.dzbar;
        Ok(&(&f.rows[a][b + 1] - &f.rows[a][b - 1]) / &two)
    }

    /// `Γ^z_{zz} = ∂_z log G_{zz̄}`.
    pub fn christoffel(&self, a: usize, b: usize) -> Result<ComplexHP> {
        let g = self.field("G")?;
        Ok(&self.d_z(g, a, b)? / &g.rows[a][b])
    }

    fn kahler_derivs(&self, a: usize, b: usize) -> Result<(ComplexHP, ComplexHP)> {
        let k = self.field("K")?;
        Ok((self.d_z(k, a, b)?, self.d_zz(k, a, b)?))
    }

    /// `D_z F` for `F` of weight `k` and tensor degree `m`.
    pub fn covariant_at(&self, f: &Field, k: i64, m: u32, a: usize, b: usize) -> Result<ComplexHP> {
        let prec = f.rows[a][b].prec();
        let mut d = self.d_z(f, a, b)?;
        if m != 0 {
            let gamma = self.christoffel(a, b)?;
            d = &d - &(&gamma * &f.rows[a][b]).scale_rational(&Rational::from(m));
        }
        if k != 0 {
            let (kp, _) = self.kahler_derivs(a, b)?;
            let kk = ComplexHP::from_rational(prec, &Rational::from(k));
            d = &d + &(&(&kk * &kp) * &f.rows[a][b]);
        }
        Ok(d)
    }

    /// `D_z D_z F` for a scalar section of weight `k`, expanded as
    /// `F'' + kK''F + kK'F' − Γ(F' + kK'F) + kK'(F' + kK'F)`.
    pub fn covariant_second_at(&self, f: &Field, k: i64, a: usize, b: usize) -> Result<ComplexHP> {
        let prec = f.rows[a][b].prec();
        let v = &f.rows[a][b];
        let f1 = self.d_z(f, a, b)?;
        let f2 = self.d_zz(f, a, b)?;
        let gamma = self.christoffel(a, b)?;
        if k == 0 {
            return Ok(&f2 - &(&gamma * &f1));
        }
        let kk = ComplexHP::from_rational(prec, &Rational::from(k));
        let (kp, kpp) = self.kahler_derivs(a, b)?;
        let kkp = &kk * &kp;
        let df = &f1 + &(&kkp * v);
        let mut out = &f2 + &(&(&kk * &kpp) * v);
        out = &out + &(&kkp * &f1);
        out = &out - &(&gamma * &df);
        out = &out + &(&kkp * &df);
        Ok(out)
    }

    /// `D_z F` on rows `1 … nz−2` (all `z̄` columns).
    pub fn covariant_derivative(&self, f: &Field, k: i64, m: u32) -> Result<Field> {
        let (nz, nzb) = self.shape();
        let rows = (1..nz - 1)
            .into_par_iter()
            .map(|a| (0..nzb).map(|b| self.covariant_at(f, k, m, a, b)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Field::new(rows))
    }

    fn residual_at(&self, g: u32, h: u32, a: usize, b: usize) -> Result<ComplexHP> {
        self.check_interior(a, b)?;
        let target = self.section(g, h)?;
        let prec = target.rows[a][b].prec();
        let dbar = self.d_zbar(target, a, b)?;
        let mut inner = ComplexHP::zero(prec);
        if g >= 1 && !is_excluded(g - 1, h) {
            let lower = self.section(g - 1, h)?;
            inner = &inner + &self.covariant_second_at(lower, self.weight(g - 1, h), a, b)?;
        }
        for ((g1, h1), (g2, h2)) in sigma_prime_pairs(g, h) {
            let d1 = self.covariant_at(self.section(g1, h1)?, self.weight(g1, h1), 0, a, b)?;
            let d2 = self.covariant_at(self.section(g2, h2)?, self.weight(g2, h2), 0, a, b)?;
            inner = &inner + &(&d1 * &d2);
        }
        let c = &self.field("C")?.rows[a][b];
        let half = Rational::from((1, 2));
        let mut res = &dbar - &(c * &inner).scale_rational(&half);
        if h >= 1 {
            let delta = &self.field("Delta")?.rows[a][b];
            let d = self.covariant_at(self.section(g, h - 1)?, self.weight(g, h - 1), 0, a, b)?;
            res = &res + &(delta * &d);
        }
        Ok(res)
    }

    fn residual(&self, g: u32, h: u32) -> Result<Residual> {
        let (nz, nzb) = self.shape();
        let values = (1..nz - 1)
            .into_par_iter()
            .map(|a| (1..nzb - 1).map(|b| self.residual_at(g, h, a, b)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Residual::from_values(values))
    }

    /// `∂̄F_g − ½ C (D D F_{g−1} + Σ_{g₁+g₂=g} D F_{g₁} D F_{g₂})`.
    pub fn hae_residual(&self, g: u32) -> Result<Residual> {
        if g < 2 {
            return Err(AnomalyError::UnstableRange { g, h: 0 });
        }
        self.residual(g, 0)
    }

    /// `∂̄F_{(g,h)} − ½ C (D D F_{(g−1,h)} + Σ′ D F D F) + Δ D F_{(g,h−1)}`.
    ///
    /// `h = 0` is accepted and reduces to [`hae_residual`](Self::hae_residual).
    pub fn ehae_residual(&self, g: u32, h: u32) -> Result<Residual> {
        if 2 * g as i64 - 2 + h as i64 <= 0 {
            return Err(AnomalyError::UnstableRange { g, h });
        }
        self.residual(g, h)
    }
}

/// A propagator `S^{zz}` on the grid, declared to satisfy `∂_z̄ S = C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSpec {
    #[serde(rename = "S")]
    pub s: Field,
    /// Optional holomorphic ambiguity `f(z_a)`, one value per row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambiguity: Option<Vec<ComplexHP>>,
}

impl PropagatorSpec {
    pub fn new(s: Field) -> Self {
        PropagatorSpec { s, ambiguity: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AnomalyError::InvalidGrid(e.to_string()))
    }

    /// Largest relative deviation of `∂_z̄ S` from `C` over interior columns.
    pub fn check(&self, grid: &AnomalyGrid) -> Result<f64> {
        let c = grid.field("C")?;
        let (nz, nzb) = grid.shape();
        if self.s.shape() != (nz, nzb) {
            return Err(AnomalyError::InvalidGrid("propagator shape differs from grid".into()));
        }
        let mut scale = 0f64;
        let mut worst = 0f64;
        for a in 0..nz {
            for b in 1..nzb - 1 {
                let d = grid.d_zbar(&self.s, a, b)?;
                worst = worst.max((&d - &c.rows[a][b]).abs_f64());
                scale = scale.max(c.rows[a][b].abs_f64());
            }
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }
}

/// Tolerance on the `∂̄S = C` check, relative to `max |C|`.
pub const PROPAGATOR_TOLERANCE: f64 = 1e-6;

/// Builds `F_2 = ½ S E + Corr + f(z)`, `E = D D F_1 + (D F_1)²`.
///
/// `Corr` inverts the central `z̄`-difference of the remainder
/// `½ C E − ∂_z̄(½ S E)` by leapfrogging from zero in the first two columns,
/// so the discrete residual vanishes on the interior. The result is checked
/// with [`AnomalyGrid::hae_residual`] against `tolerance`.
pub fn genus2_integrate(
    grid: &AnomalyGrid,
    propagator: &PropagatorSpec,
    ambiguity: Option<&[ComplexHP]>,
    tolerance: f64,
) -> Result<Field> {
    let deviation = propagator.check(grid)?;
    if deviation > PROPAGATOR_TOLERANCE {
        return Err(AnomalyError::PropagatorMismatch {
            max_deviation: deviation,
        });
    }
    let (nz, nzb) = grid.shape();
    let f1 = grid.section(1, 0)?;
    let c = grid.field("C")?;
    let prec = f1.rows[0][0].prec();
    let half = Rational::from((1, 2));
    let ambiguity = ambiguity.or(propagator.ambiguity.as_deref());
    if let Some(amb) = ambiguity {
        if amb.len() != nz {
            return Err(AnomalyError::InvalidGrid(format!(
                "ambiguity has {} values for {nz} rows",
                amb.len()
            )));
        }
    }
    let w1 = grid.weight(1, 0);

    let mut rows = Vec::with_capacity(nz);
    for a in 0..nz {
        let amb = ambiguity.map_or_else(|| ComplexHP::zero(prec), |v| v[a].clone());
        if a == 0 || a + 1 == nz {
            rows.push(vec![amb; nzb]);
            continue;
        }
        let e: Vec<ComplexHP> = (0..nzb)
            .map(|b| -> Result<ComplexHP> {
                let dd = grid.covariant_second_at(f1, w1, a, b)?;
                let d = grid.covariant_at(f1, w1, 0, a, b)?;
                Ok(&dd + &(&d * &d))
            })
            .collect::<Result<_>>()?;
        let base: Vec<ComplexHP> = (0..nzb)
            .map(|b| (&propagator.s.rows[a][b] * &e[b]).scale_rational(&half))
            .collect();
        let mut corr = vec![ComplexHP::zero(prec); nzb];
        let two_step = &grid.dzbar + &grid.dzbar;
        for b in 1..nzb - 1 {
            let source = (&c.rows[a][b] * &e[b]).scale_rational(&half);
            let dbar_base = &(&base[b + 1] - &base[b - 1]) / &two_step;
            let r = &source - &dbar_base;
            corr[b + 1] = &corr[b - 1] + &(&two_step * &r);
        }
        rows.push(
            base.iter()
                .zip(&corr)
                .map(|(x, y)| &(x + y) + &amb)
                .collect(),
        );
    }
    let f2 = Field::new(rows);
    let check = grid.clone().with_field(&field_name(2, 0), f2.clone())?;
    let res = check.hae_residual(2)?;
    if res.max.is_nan() || res.max >= tolerance {
        return Err(AnomalyError::ResidualTooLarge {
            max: res.max,
            tolerance,
        });
    }
    Ok(f2)
}

/// Holomorphic profile extracted from the last `z̄` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicLimit {
    pub profile: Vec<ComplexHP>,
    /// Largest `|f_last − limit|`: how far the grid is from the limit.
    pub residual: f64,
    pub convention: &'static str,
}

/// Aitken Δ² extrapolation along `z̄`, times `(x⁰)^{weight}`.
pub fn holomorphic_limit(field: &Field, weight: i64, x0: Option<&[ComplexHP]>) -> Result<HolomorphicLimit> {
    let (nz, nzb) = field.shape();
    if nzb < 3 {
        return Err(AnomalyError::InvalidGrid("holomorphic limit needs 3 columns".into()));
    }
    if weight != 0 && x0.is_none_or(|v| v.len() != nz) {
        return Err(AnomalyError::MissingField("x0".into()));
    }
    let mut profile = Vec::with_capacity(nz);
    let mut residual = 0f64;
    for (a, row) in field.rows.iter().enumerate() {
        let (f0, f1, f2) = (&row[nzb - 3], &row[nzb - 2], &row[nzb - 1]);
        let d1 = f1 - f0;
        let d2 = f2 - f1;
        let limit = if d2.is_zero() {
            f2.clone()
        } else {
            if d1.is_zero() || d2.abs() >= d1.abs() {
                return Err(AnomalyError::NoConvergence { row: a });
            }
            let denom = &d2 - &d1;
            f2 - &(&(&d2 * &d2) / &denom)
        };
        residual = residual.max((f2 - &limit).abs_f64());
        let scaled = if weight == 0 {
            limit
        } else {
            let x = &x0.expect("checked")[a];
            &limit * &x.powi(weight as i32)
        };
        profile.push(scaled);
    }
    Ok(HolomorphicLimit {
        profile,
        residual,
        convention: LIMIT_CONVENTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn c(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(DEFAULT_PRECISION, re, im)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(7), 0);
    }

    #[test]
    fn constant_maps() {
        assert_eq!(constant_map_contribution(2, -200).unwrap(), q(-5, 144));
        assert_eq!(constant_map_contribution(2, -200).unwrap(), q(-200, 5760));
        assert_eq!(constant_map_contribution(2, 0).unwrap(), 0);
        assert_eq!(constant_map_contribution(3, -200).unwrap(), q(5, 36288));
        assert!(matches!(
            constant_map_contribution(1, -200),
            Err(AnomalyError::DomainError(_))
        ));
    }

    fn flat_grid() -> AnomalyGrid {
        let mut g = AnomalyGrid::uniform((0.1, 0.05), (1e-3, 0.0), 7, (0.2, -0.1), (0.0, 1e-3), 7).unwrap();
        g.set_fn("G", |_, _| c(1.0, 0.0));
        g.set_fn("K", |_, _| c(0.0, 0.0));
        g
    }

    #[test]
    fn constant_scalar_has_zero_derivative() {
        let mut g = flat_grid();
        g.set_fn("F1", |_, _| c(3.0, 1.0));
        let d = g.covariant_derivative(g.field("F1").unwrap(), 0, 0).unwrap();
        assert!(d.is_zero());
        assert!(matches!(
            g.covariant_at(g.field("F1").unwrap(), 0, 0, 0, 3),
            Err(AnomalyError::BoundaryPoint { a: 0, b: 3 })
        ));
    }

    #[test]
    fn hyperbolic_christoffel() {
        let mut g = AnomalyGrid::uniform((0.3, 0.1), (1e-4, 0.0), 5, (0.2, -0.15), (1e-4, 0.0), 5).unwrap();
        let one = c(1.0, 0.0);
        g.set_fn("G", |z, zb| {
            let w = &one - &(z * zb);
            &one / &(&w * &w)
        });
        for a in 1..4 {
            let exact = {
                let zb = &g.zbar()[2];
                let w = &one - &(&g.z()[a] * zb);
                &(zb + zb) / &w
            };
            let got = g.christoffel(a, 2).unwrap();
            assert!((&got - &exact).abs_f64() < 1e-6 * exact.abs_f64());
        }
    }

    #[test]
    fn uneven_spacing_is_rejected() {
        let z = vec![c(0.0, 0.0), c(1.0, 0.0), c(2.5, 0.0)];
        assert!(matches!(
            AnomalyGrid::new(z.clone(), z),
            Err(AnomalyError::InvalidGrid(_))
        ));
    }

    #[test]
    fn holomorphic_data_has_zero_residual() {
        let mut g = flat_grid();
        g.set_fn("C", |_, _| c(0.0, 0.0));
        g.set_fn("F1", |z, _| z * z);
        g.set_fn("F2", |z, _| z.exp());
        let r = g.hae_residual(2).unwrap();
        assert_eq!(r.max, 0.0);
        assert!(matches!(g.hae_residual(1), Err(AnomalyError::UnstableRange { .. })));
        let mut g2 = flat_grid();
        g2.set_fn("C", |_, _| c(0.0, 0.0));
        assert_eq!(g2.hae_residual(2), Err(AnomalyError::MissingField("F2".into())));
    }

    #[test]
    fn sigma_prime_excludes_unstable_factors() {
        let pairs = sigma_prime_pairs(1, 2);
        for (p, q) in &pairs {
            for x in [p, q] {
                assert!(*x != (0, 0) && *x != (0, 1));
            }
        }
        assert!(pairs.contains(&((1, 0), (0, 2))));
        assert_eq!(sigma_prime_pairs(2, 0), vec![((1, 0), (1, 0))]);
    }

    #[test]
    fn json_roundtrip() {
        let mut g = flat_grid();
        g.set_fn("C", |z, zb| z * zb);
        let v = g.to_json();
        assert_eq!(v["grid"]["z"][0][0].as_str().unwrap().parse::<f64>().unwrap(), 0.1);
        let back = AnomalyGrid::from_json(&v.to_string()).unwrap();
        assert_eq!(back.field("C").unwrap(), g.field("C").unwrap());
    }

    #[test]
    fn limit_of_decaying_tail() {
        let nz = 3;
        let field = Field::from_fn(nz, 6, |a, b| {
            let f = c(1.0 + a as f64, 0.5);
            &f + &c((-(b as f64) * 2.0).exp(), 0.0)
        });
        let lim = holomorphic_limit(&field, 0, None).unwrap();
        for (a, v) in lim.profile.iter().enumerate() {
            assert!((v - &c(1.0 + a as f64, 0.5)).abs_f64() < 1e-12);
        }
        assert!(lim.residual > 0.0);
        let flat = Field::from_fn(2, 4, |a, _| c(a as f64, 0.0));
        let lim = holomorphic_limit(&flat, 0, None).unwrap();
        assert_eq!(lim.profile[1], c(1.0, 0.0));
        assert_eq!(lim.residual, 0.0);
        let growing = Field::from_fn(1, 4, |_, b| c((b * b) as f64, 0.0));
        assert_eq!(
            holomorphic_limit(&growing, 0, None),
            Err(AnomalyError::NoConvergence { row: 0 })
        );
    }

    #[test]
    fn limit_applies_period_weight() {
        let field = Field::from_fn(2, 3, |_, _| c(2.0, 0.0));
        let x0 = vec![c(1.0, 0.0), c(3.0, 0.0)];
        let lim = holomorphic_limit(&field, 2, Some(&x0)).unwrap();
        assert_eq!(lim.profile[1], c(18.0, 0.0));
        assert!(holomorphic_limit(&field, 2, None).is_err());
    }
}
