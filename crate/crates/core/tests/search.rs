mod common;

use common::*;
use proptest::prelude::*;
use uav_sizer::bundled::monarch_catalog;
use uav_sizer::catalog::{Catalog, ComponentKind, MotorOption};
use uav_sizer::design_loop::{evaluate_design, DesignError, EvaluationOptions};
use uav_sizer::{
    search_catalog, ComponentSpec, EnergyWh, Interpolation, MassKg, PowerW, PwmUs,
    SearchConstraints, TimeMin,
};

fn kg(v: f64) -> MassKg {
    MassKg::new(v).unwrap()
}

fn part(kind: ComponentKind, name: &str, mass: f64) -> ComponentSpec {
    ComponentSpec::new(kind, name, kg(mass)).unwrap()
}

fn powered(kind: ComponentKind, name: &str, mass: f64, w: f64) -> ComponentSpec {
    ComponentSpec::powered(kind, name, kg(mass), PowerW::new(w).unwrap()).unwrap()
}

fn linear_motor() -> MotorOption {
    // thrust 0.004 kgf/us from 1000 us
    let knots = vec![
        (1000.0, 5.0, 0.0),
        (1500.0, 200.0, 2.0),
        (2000.0, 600.0, 4.0),
    ];
    MotorOption {
        spec: part(ComponentKind::Motor, "lin", 0.1),
        curve: curve_from(&knots, Interpolation::Linear),
    }
}

fn small_catalog() -> Catalog {
    Catalog {
        motor_count: 4,
        motors: vec![linear_motor()],
        propellers: vec![
            part(ComponentKind::Propeller, "p10", 0.02),
            part(ComponentKind::Propeller, "p12", 0.03),
        ],
        escs: vec![part(ComponentKind::Esc, "e30", 0.03)],
        frames: vec![
            part(ComponentKind::Frame, "f450", 0.4),
            part(ComponentKind::Frame, "f550", 0.6),
        ],
        fcus: vec![part(ComponentKind::Fcu, "fc", 0.04)],
        computes: vec![powered(ComponentKind::Compute, "pi", 0.05, 5.0)],
        radios: vec![powered(ComponentKind::Radio, "sdr", 0.1, 8.0)],
        batteries: vec![
            ComponentSpec::battery("light", kg(0.5), EnergyWh::new(80.0).unwrap()).unwrap(),
            ComponentSpec::battery("heavy", kg(0.7), EnergyWh::new(80.0).unwrap()).unwrap(),
        ],
        payloads: vec![],
        max_battery_count: 3,
        target_flight_time: TimeMin::new(5.0).unwrap(),
        usable_fraction: 0.8,
        loss_power: PowerW::ZERO,
        max_auw: None,
    }
}

#[test]
fn hover_just_past_threshold_fails_by_one_microsecond() {
    let m = linear_motor();
    // auw / 4 = thrust at 1601 us = 2.404 kgf -> auw 9.616 kg
    let mut d = quad(0.3, 1.0, 1000.0, 1.0, 0.8);
    let missing = 9.616 - d.auw().value();
    d = d.with_payload(part(ComponentKind::Payload, "ballast", missing));
    let r = evaluate_design(&d, &m.curve, &EvaluationOptions::default()).unwrap();
    assert!(!r.pwm_check.passed);
    assert!(
        (r.pwm_check.margin.unwrap() + 1.0).abs() < 1e-6,
        "{:?}",
        r.pwm_check
    );
    assert!(!r.passed);
}

#[test]
fn lighter_battery_ranks_first() {
    let out = search_catalog(
        &small_catalog(),
        &SearchConstraints::from_catalog(&small_catalog()),
    )
    .unwrap();
    assert!(!out.passing.is_empty());
    for w in out.passing.windows(2) {
        let (a, b) = (&w[0].report, &w[1].report);
        let (ta, tb) = (
            a.predicted_flight_time.unwrap(),
            b.predicted_flight_time.unwrap(),
        );
        assert!(ta > tb || (ta == tb && a.auw <= b.auw));
    }
    // same frame, prop and pack count: light beats heavy
    let pos = |needle: &str| {
        out.passing
            .iter()
            .position(|c| c.label.contains("p10 / e30 / f450") && c.label.ends_with(needle))
    };
    if let (Some(l), Some(h)) = (pos("1x light"), pos("1x heavy")) {
        assert!(l < h);
    } else {
        panic!("expected both single-pack designs to pass");
    }
}

#[test]
fn every_passing_design_has_a_feasible_battery() {
    let out = search_catalog(
        &small_catalog(),
        &SearchConstraints::from_catalog(&small_catalog()),
    )
    .unwrap();
    for c in &out.passing {
        assert!(c.report.battery_verdict.feasible);
        assert!(c.report.pwm_check.passed && c.report.endurance_check.passed);
    }
}

#[test]
fn infeasible_battery_yields_no_designs_with_reasons() {
    let mut cat = small_catalog();
    cat.batteries =
        vec![ComponentSpec::battery("tiny", kg(0.5), EnergyWh::new(1.0).unwrap()).unwrap()];
    let out = search_catalog(&cat, &SearchConstraints::from_catalog(&cat)).unwrap();
    assert!(out.passing.is_empty());
    assert!(!out.rejected.is_empty());
    for r in &out.rejected {
        assert!(
            r.report
                .failures
                .iter()
                .any(|f| f.contains("battery infeasible")),
            "{:?}",
            r.report.failures
        );
    }
}

#[test]
fn empty_kind_is_named() {
    let mut cat = small_catalog();
    cat.escs.clear();
    match search_catalog(&cat, &SearchConstraints::from_catalog(&cat)) {
        Err(DesignError::EmptyCatalogKind(ComponentKind::Esc)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn pack_counts_beyond_thrust_are_pruned() {
    let mut cat = small_catalog();
    cat.batteries =
        vec![ComponentSpec::battery("brick", kg(3.0), EnergyWh::new(500.0).unwrap()).unwrap()];
    cat.max_battery_count = 5;
    let out = search_catalog(&cat, &SearchConstraints::from_catalog(&cat)).unwrap();
    // 4 * 2.4 kgf at 1600 us = 9.6 kg total; at most 2 bricks fit
    assert!(out.pruned > 0);
    assert!(out
        .passing
        .iter()
        .chain(&out.rejected)
        .all(|c| c.report.battery_mass.value() <= 6.0 + 1e-9));
}

#[test]
fn auw_limit_filters_designs() {
    let cat = small_catalog();
    let mut cons = SearchConstraints::from_catalog(&cat);
    cons.max_auw = Some(kg(1.8));
    let out = search_catalog(&cat, &cons).unwrap();
    assert!(out.passing.iter().all(|c| c.report.auw.value() <= 1.8));
    assert!(!out.passing.is_empty());
}

#[test]
fn threshold_is_honoured() {
    let cat = monarch_catalog(Interpolation::Linear).unwrap();
    let mut cons = SearchConstraints::from_catalog(&cat);
    cons.pwm_threshold = PwmUs::new(1200.0).unwrap();
    let out = search_catalog(&cat, &cons).unwrap();
    assert!(out.passing.is_empty());
}

fn shuffled(cat: &Catalog, seed: u64) -> Catalog {
    fn rot<T: Clone>(v: &[T], k: u64) -> Vec<T> {
        let mut out = v.to_vec();
        if !out.is_empty() {
            let n = out.len();
            out.rotate_left((k as usize) % n);
            if k % 2 == 1 {
                out.reverse();
            }
        }
        out
    }
    let mut c = cat.clone();
    c.propellers = rot(&c.propellers, seed);
    c.frames = rot(&c.frames, seed / 2);
    c.batteries = rot(&c.batteries, seed / 3);
    c.escs = rot(&c.escs, seed / 5);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn search_ignores_catalog_order(seed in 0u64..1000) {
        let mut cat = small_catalog();
        cat.escs.push(part(ComponentKind::Esc, "e40", 0.04));
        cat.batteries.push(ComponentSpec::battery("mid", kg(0.6), EnergyWh::new(95.0).unwrap()).unwrap());
        let cons = SearchConstraints::from_catalog(&cat);
        let a = serde_json::to_string(&search_catalog(&cat, &cons).unwrap()).unwrap();
        let b = serde_json::to_string(&search_catalog(&shuffled(&cat, seed), &cons).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
