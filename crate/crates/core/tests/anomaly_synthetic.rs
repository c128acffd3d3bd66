use workbench_core::anomaly::{
    genus2_integrate, holomorphic_limit, AnomalyError, AnomalyGrid, Field, PropagatorSpec,
};
use workbench_core::numeric::DEFAULT_PRECISION;
use workbench_core::{ComplexHP, LogBranch, LogSeries, Rational};

fn c(re: f64, im: f64) -> ComplexHP {
    ComplexHP::from_f64(DEFAULT_PRECISION, re, im)
}

/// Hyperbolic toy metric with polynomial propagator data.
fn toy_grid() -> (AnomalyGrid, PropagatorSpec) {
    let mut g = AnomalyGrid::uniform((0.1, 0.02), (1e-3, 0.0), 9, (0.15, -0.03), (1e-3, 0.0), 9).unwrap();
    let one = c(1.0, 0.0);
    g.set_fn("G", |z, zb| {
        let w = &one - &(z * zb);
        &one / &(&w * &w)
    });
    g.set_fn("K", |z, zb| -(&one - &(z * zb)).ln());
    // S = (1 + z) z̄² + z z̄, so ∂̄S = 2(1 + z) z̄ + z exactly
    g.set_fn("C", |z, zb| &(&(&one + z) * &(zb + zb)) + z);
    g.set_fn("F1", |z, zb| &(&(z * z) * z) + &(z * zb));
    let s = Field::from_fn(9, 9, |a, b| {
        let (z, zb) = (&g.z()[a], &g.zbar()[b]);
        &(&(&one + z) * &(zb * zb)) + &(z * zb)
    });
    (g, PropagatorSpec::new(s))
}

#[test]
fn integrated_genus_two_satisfies_the_anomaly() {
    let (grid, prop) = toy_grid();
    let f2 = genus2_integrate(&grid, &prop, None, 1e-8).unwrap();
    let g2 = grid.clone().with_field("F2", f2.clone()).unwrap();
    let base = g2.hae_residual(2).unwrap();
    assert!(base.max < 1e-8);

    let amb: Vec<ComplexHP> = grid.z().iter().map(|z| z.exp()).collect();
    let f2h = genus2_integrate(&grid, &prop, Some(&amb), 1e-8).unwrap();
    let shifted = grid.clone().with_field("F2", f2h).unwrap().hae_residual(2).unwrap();
    assert!(shifted.max_difference(&base) < 1e-12);

    let eps = 1e-3;
    let zbar = grid.zbar().to_vec();
    let perturbed = Field::from_fn(9, 9, |a, b| f2.at(a, b) + &zbar[b].scale_rational(&Rational::from((1, 1000))));
    let p = grid.with_field("F2", perturbed).unwrap().hae_residual(2).unwrap();
    for (x, y) in p.values.iter().flatten().zip(base.values.iter().flatten()) {
        assert!(((x - y).abs_f64() - eps).abs() < 0.01 * eps);
    }
}

#[test]
fn zero_coupling_leaves_only_the_ambiguity() {
    let (mut grid, _) = toy_grid();
    grid.set_fn("C", |_, _| c(0.0, 0.0));
    let prop = PropagatorSpec::new(Field::zeros(9, 9, DEFAULT_PRECISION));
    let amb: Vec<ComplexHP> = grid.z().iter().map(|z| z * z).collect();
    let f2 = genus2_integrate(&grid, &prop, Some(&amb), 1e-8).unwrap();
    for (a, row) in f2.rows().iter().enumerate() {
        assert!(row.iter().all(|v| *v == amb[a]));
    }
}

#[test]
fn mismatched_propagator_is_rejected() {
    let (grid, _) = toy_grid();
    let prop = PropagatorSpec::new(Field::zeros(9, 9, DEFAULT_PRECISION));
    assert!(matches!(
        genus2_integrate(&grid, &prop, None, 1e-8),
        Err(AnomalyError::PropagatorMismatch { .. })
    ));
}

#[test]
fn extended_equation_reduces_to_the_closed_one() {
    let (grid, prop) = toy_grid();
    let f2 = genus2_integrate(&grid, &prop, None, 1e-8).unwrap();
    let mut g = grid.with_field("F2", f2).unwrap();
    let zero = |_: &ComplexHP, _: &ComplexHP| c(0.0, 0.0);
    g.set_fn("Delta", zero);
    g.set_fn("F(0,2)", zero);
    g.set_fn("F(1,1)", zero);
    g.set_fn("F(2,1)", zero);
    let closed = g.hae_residual(2).unwrap();
    let open = g.ehae_residual(2, 0).unwrap();
    assert_eq!(closed, open);
    assert!(matches!(g.ehae_residual(0, 1), Err(AnomalyError::UnstableRange { .. })));
    assert!(matches!(g.ehae_residual(1, 0), Err(AnomalyError::UnstableRange { .. })));
}

#[test]
fn unstable_fields_are_never_read() {
    // (1,1): the restricted sum is empty and the DD term would need F(0,1)
    let (mut g, _) = toy_grid();
    g.set_fn("Delta", |z, _| z.clone());
    g.set_fn("F(1,1)", |_, _| c(0.0, 0.0));
    assert!(!g.has_field("F(0,1)") && !g.has_field("F0"));
    g.ehae_residual(1, 1).unwrap();
}

#[test]
fn half_integer_open_data() {
    // F(0,2) = z^{1/2} + 3 z^{3/2} − z^{5/2}/2
    let half = |n: i64| Rational::from((n, 2));
    let series = LogSeries::from_terms(
        2,
        4,
        [(half(1), 0u8, Rational::from(1)), (half(3), 0, Rational::from(3)), (half(5), 0, half(-1))],
    )
    .unwrap();
    let mut g = AnomalyGrid::uniform((0.2, 0.05), (1e-4, 0.0), 7, (0.3, 0.0), (1e-4, 0.0), 7).unwrap();
    let radius = Rational::from(1);
    let f02 = Field::from_series(&series, g.z(), 7, &radius, LogBranch::Principal).unwrap();
    g.insert("F(0,2)", f02.clone()).unwrap();
    g.set_fn("G", |_, _| c(1.0, 0.0));
    g.set_fn("K", |_, _| c(0.0, 0.0));
    g.set_fn("C", |_, _| c(0.0, 0.0));
    g.set_fn("Delta", |z, _| z.clone());

    // ∂_z F = θF / z, evaluated from the series directly
    let theta = series.theta();
    let exact: Vec<ComplexHP> = g
        .z()
        .iter()
        .map(|z| &theta.eval(z, LogBranch::Principal, &radius).unwrap().value / z)
        .collect();
    let d = g.covariant_derivative(&f02, g.weight(0, 2), 0).unwrap();
    for a in 1..6 {
        assert!((d.at(a - 1, 3) - &exact[a]).abs_f64() < 1e-6 * exact[a].abs_f64());
    }

    // F(0,3) = −Δ · ∂F(0,2) · z̄ solves ∂̄F(0,3) + Δ D F(0,2) = 0
    let zbar = g.zbar().to_vec();
    let f03 = Field::from_fn(7, 7, |a, b| -(&(&g.z()[a] * &exact[a]) * &zbar[b]));
    g.insert("F(0,3)", f03).unwrap();
    let r = g.ehae_residual(0, 3).unwrap();
    assert!(r.max < 1e-6, "{}", r.max);
}

#[test]
fn limit_recovers_holomorphic_part() {
    let field = Field::from_fn(4, 8, |a, b| {
        let f = c(a as f64, 1.0);
        &f + &c((-0.7 * b as f64).exp(), 0.0)
    });
    let lim = holomorphic_limit(&field, 0, None).unwrap();
    for (a, v) in lim.profile.iter().enumerate() {
        assert!((v - &c(a as f64, 1.0)).abs_f64() < 1e-12);
    }
}
