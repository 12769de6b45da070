//! Reference quadcopter: published masses and mission, bundled synthetic curve.

use uav_sizer::bundled::{monarch_catalog, monarch_curve, monarch_design};
use uav_sizer::catalog::ComponentKind;
use uav_sizer::design_loop::{evaluate_design, sweep_auw, EvaluationOptions};
use uav_sizer::{
    build_frontier, classify_battery, per_motor_thrust, predict_endurance, search_catalog,
    ComponentSpec, EnergyWh, Interpolation, MassKg, SearchConstraints, ThrustKgf,
};

#[test]
fn auw_and_per_motor_thrust() {
    let d = monarch_design();
    assert_eq!(d.motor_count, 4);
    assert_eq!(d.target_flight_time.value(), 45.0);
    assert!((d.auw().value() - 4.856).abs() < 0.01, "{}", d.auw());
    let t = per_motor_thrust(d.auw(), 4).value();
    assert!((t - 1.214).abs() < 0.003, "{t}");
}

#[test]
fn auw_other_matches_battery_weight_bound_constant() {
    let d = monarch_design();
    let expected = 4.0 * (0.17 + 0.044 + 0.074) + 0.643 + 0.0452 + 0.47 + 0.35;
    assert!((d.auw_other().value() - expected).abs() < 1e-12);
    assert!((d.auw_other().value() - 2.66).abs() < 0.01);
}

#[test]
fn battery_packs_resolve_to_nominal_capacity() {
    let d = monarch_design();
    assert_eq!(d.batteries.len(), 4);
    assert!((d.battery_mass().value() - 2.196).abs() < 1e-12);
    assert!((d.battery_capacity().value() - 710.4).abs() < 1e-9);
}

#[test]
fn hover_pwm_near_1260() {
    for mode in [Interpolation::Linear, Interpolation::MonotoneCubic] {
        let c = monarch_curve(mode);
        let pwm = c
            .pwm_for_thrust(ThrustKgf::new(1.214).unwrap())
            .unwrap()
            .value();
        assert!((pwm - 1260.0).abs() <= 10.0, "{mode}: {pwm}");
    }
}

#[test]
fn paper_design_passes_all_checks() {
    let d = monarch_design();
    let r = evaluate_design(
        &d,
        &monarch_curve(Interpolation::Linear),
        &EvaluationOptions::default(),
    )
    .unwrap();
    assert!(r.passed, "{:?}", r.failures);
    let hover = r.hover_pwm.unwrap().value();
    assert!((hover - 1260.0).abs() <= 10.0);
    assert!(r.pwm_check.passed);
    assert!((r.pwm_check.margin.unwrap() - (1600.0 - hover)).abs() < 1e-12);
    let t = r.predicted_flight_time.unwrap().value();
    assert!((44.0..=46.0).contains(&t), "{t}");
    assert!(r.battery_verdict.feasible);
}

#[test]
fn endurance_at_5_08_kg() {
    let base = monarch_design();
    let extra = 5.08 - base.auw().value();
    let payload = ComponentSpec::new(
        ComponentKind::Payload,
        "ballast",
        MassKg::new(extra).unwrap(),
    )
    .unwrap();
    let d = base.with_payload(payload);
    assert!((d.auw().value() - 5.08).abs() < 1e-12);
    for mode in [Interpolation::Linear, Interpolation::MonotoneCubic] {
        let t = predict_endurance(&d, &monarch_curve(mode)).unwrap().value();
        assert!((t - 44.43).abs() <= 1.0, "{mode}: {t}");
    }
}

#[test]
fn sweep_passes_near_measured_point() {
    let d = monarch_design();
    let s = sweep_auw(
        &d,
        &monarch_curve(Interpolation::Linear),
        MassKg::ZERO,
        MassKg::new(0.25).unwrap(),
        MassKg::new(0.01).unwrap(),
    )
    .unwrap();
    assert!(s.truncated.is_none());
    let near = s
        .points
        .iter()
        .min_by(|a, b| {
            (a.auw.value() - 5.08)
                .abs()
                .total_cmp(&(b.auw.value() - 5.08).abs())
        })
        .unwrap();
    assert!((near.auw.value() - 5.08).abs() < 0.006);
    assert!((near.predicted_flight_time.value() - 44.43).abs() <= 1.0);
}

#[test]
fn chosen_battery_sits_above_frontier() {
    let d = monarch_design();
    let profile = uav_sizer::design_loop::mission_profile(&d);
    let fr = build_frontier(
        &monarch_curve(Interpolation::Linear),
        &profile,
        d.auw_other(),
        10.0,
    )
    .unwrap();
    let v = classify_battery(
        &fr,
        MassKg::new(4.0 * 0.549).unwrap(),
        EnergyWh::new(4.0 * 177.6).unwrap(),
    );
    assert!(v.feasible, "{v:?}");
    assert!(v.capacity_surplus_wh >= 0.0 && v.mass_headroom_kg >= 0.0);
}

#[test]
fn catalog_search_recovers_paper_design() {
    let cat = monarch_catalog(Interpolation::Linear).unwrap();
    let out = search_catalog(&cat, &SearchConstraints::from_catalog(&cat)).unwrap();
    let best = out.passing.first().expect("one passing design");
    assert_eq!(out.passing.len(), 1);
    let design = best.design.resolve().unwrap();
    let paper = monarch_design();
    assert_eq!(design.batteries, paper.batteries);
    assert_eq!(design.auw(), paper.auw());
    assert_eq!(out.rejected.len(), 3);
    for r in &out.rejected {
        assert!(!r.report.failures.is_empty());
    }
}
