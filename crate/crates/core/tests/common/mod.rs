#![allow(dead_code)]

use proptest::prelude::*;
use uav_sizer::catalog::parse_design;
use uav_sizer::{DesignSpec, Interpolation, MotorCurve, ThrustStandSample};

/// Raw knots of a random monotone thrust-stand sweep: (pwm, power, thrust).
pub type Knots = Vec<(f64, f64, f64)>;

fn accumulate(start: f64, steps: &[f64]) -> Vec<f64> {
    steps
        .iter()
        .scan(start, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

fn knots_from(
    pwm_steps: Vec<f64>,
    power_steps: Vec<f64>,
    thrust_steps: Vec<f64>,
    idle: f64,
) -> Knots {
    let pwm = accumulate(1000.0, &pwm_steps);
    let power = accumulate(idle, &power_steps);
    let thrust = accumulate(0.0, &thrust_steps);
    std::iter::once((1000.0, idle, 0.0))
        .chain(
            pwm.into_iter()
                .zip(power)
                .zip(thrust)
                .map(|((p, w), t)| (p, w, t)),
        )
        .collect()
}

/// Non-decreasing power and thrust; flat runs allowed.
pub fn monotone_knots() -> impl Strategy<Value = Knots> {
    (2usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(5.0f64..100.0, n),
            prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..150.0], n),
            prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..0.8], n),
            0.0f64..10.0,
        )
            .prop_map(|(a, b, c, idle)| knots_from(a, b, c, idle))
    })
}

/// Strictly increasing power and thrust.
pub fn strict_knots() -> impl Strategy<Value = Knots> {
    (2usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(5.0f64..100.0, n),
            prop::collection::vec(1.0f64..150.0, n),
            prop::collection::vec(0.01f64..0.8, n),
            0.0f64..10.0,
        )
            .prop_map(|(a, b, c, idle)| knots_from(a, b, c, idle))
    })
}

pub fn curve_from(knots: &Knots, interpolation: Interpolation) -> MotorCurve {
    let samples = knots
        .iter()
        .map(|&(p, w, t)| ThrustStandSample::new(p, w, t).unwrap());
    MotorCurve::from_samples(samples, interpolation).unwrap()
}

pub fn interp_mode() -> impl Strategy<Value = Interpolation> {
    prop_oneof![
        Just(Interpolation::Linear),
        Just(Interpolation::MonotoneCubic)
    ]
}

/// Small quad with configurable battery, used by property tests.
pub fn quad(
    frame_kg: f64,
    battery_kg: f64,
    battery_wh: f64,
    target_min: f64,
    fraction: f64,
) -> DesignSpec {
    parse_design(&format!(
        r#"{{
            "motor": {{"name": "m", "mass": {{"g": 60}}}},
            "propeller": {{"name": "p", "mass": {{"g": 10}}}},
            "esc": {{"name": "e", "mass": {{"g": 15}}}},
            "frame": {{"name": "f", "mass": {{"kg": {frame_kg}}}}},
            "fcu": {{"name": "fcu", "mass": {{"g": 30}}}},
            "compute": {{"name": "c", "mass": {{"g": 100}}, "max_power_w": 12}},
            "radio": {{"name": "r", "mass": {{"g": 50}}, "max_power_w": 6}},
            "batteries": [{{"name": "b", "mass": {{"kg": {battery_kg}}}, "capacity_wh": {battery_wh}}}],
            "motor_count": 4,
            "target_flight_time_min": {target_min},
            "usable_fraction": {fraction},
            "loss_power_w": 3
        }}"#
    ))
    .unwrap()
}

/// Independent endurance model: piecewise-linear inversion and
/// interpolation written directly against the raw knots.
pub fn brute_force_endurance_min(
    knots: &Knots,
    auw_kg: f64,
    n: u32,
    fixed_power_w: f64,
    capacity_wh: f64,
    fraction: f64,
) -> Option<f64> {
    let t = auw_kg / n as f64;
    if t > knots.last()?.2 || t < knots[0].2 {
        return None;
    }
    let mut motor_power = knots[0].1;
    if t > knots[0].2 {
        for w in knots.windows(2) {
            let (p0, w0, t0) = w[0];
            let (p1, w1, t1) = w[1];
            if t1 >= t {
                let pwm = p0 + (t - t0) / (t1 - t0) * (p1 - p0);
                motor_power = w0 + (pwm - p0) / (p1 - p0) * (w1 - w0);
                break;
            }
        }
    }
    let total = n as f64 * motor_power + fixed_power_w;
    Some(60.0 * fraction * capacity_wh / total)
}
