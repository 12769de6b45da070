//! Design evaluation, payload sweeps and exhaustive catalog search.
//!
//! A design passes when its hover PWM stays at or below the threshold
//! (default 1600 us, which keeps a 2:1 thrust-to-weight reserve), its
//! predicted endurance meets the target, and its batteries sit on the
//! feasible side of the frontier.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::battery_feasibility::{
    build_frontier, classify_battery, BatteryVerdict, FrontierError, MissionProfile,
    DEFAULT_PWM_STEP_US,
};
use crate::catalog::{Catalog, CatalogError, ComponentKind, ComponentSpec, DesignFile, DesignSpec};
use crate::motor_curve::MotorCurve;
use crate::power_budget::{design_budget, flight_time, per_motor_thrust, BudgetError, EnergyStore};
use crate::units::{EnergyWh, MassKg, PowerW, PwmUs, ThrustKgf, TimeMin};

pub const DEFAULT_PWM_THRESHOLD_US: f64 = 1600.0;

#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error(transparent)]
    Invalid(#[from] CatalogError),
    #[error("sweep step must be > 0")]
    SweepStep,
    #[error("sweep range end {end} kg below start {start} kg")]
    SweepRange { start: f64, end: f64 },
    #[error("catalog has no {0} entries")]
    EmptyCatalogKind(ComponentKind),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationOptions {
    pub pwm_threshold: PwmUs,
    pub pwm_step: f64,
    pub max_auw: Option<MassKg>,
}

impl Default for EvaluationOptions {
    fn default() -> Self {
        Self {
            pwm_threshold: PwmUs::new(DEFAULT_PWM_THRESHOLD_US).expect("in range"),
            pwm_step: DEFAULT_PWM_STEP_US,
            max_auw: None,
        }
    }
}

/// Pass/fail with a signed margin; positive margin means slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub margin: Option<f64>,
}

impl Check {
    fn from_margin(margin: f64) -> Self {
        Self {
            passed: margin >= 0.0,
            margin: Some(margin),
        }
    }

    fn failed() -> Self {
        Self {
            passed: false,
            margin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub auw: MassKg,
    pub auw_other: MassKg,
    pub battery_mass: MassKg,
    pub battery_capacity: EnergyWh,
    pub per_motor_thrust: ThrustKgf,
    pub hover_pwm: Option<PwmUs>,
    pub hover_power: Option<PowerW>,
    pub total_power: Option<PowerW>,
    pub predicted_flight_time: Option<TimeMin>,
    pub target_flight_time: TimeMin,
    pub pwm_threshold: PwmUs,
    /// Margin in us: threshold minus hover PWM.
    pub pwm_check: Check,
    /// Margin in minutes: predicted minus target.
    pub endurance_check: Check,
    /// Margin in kg: limit minus AUW. Absent when no limit was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auw_check: Option<Check>,
    pub battery_verdict: BatteryVerdict,
    pub failures: Vec<String>,
    pub passed: bool,
}

pub fn mission_profile(design: &DesignSpec) -> MissionProfile {
    MissionProfile {
        motor_count: design.motor_count,
        compute_power: design.compute_power(),
        radio_power: design.radio_power(),
        loss_power: design.loss_power,
        target_flight_time: design.target_flight_time,
        usable_fraction: design.usable_fraction,
    }
}

/// Evaluates one complete design on one motor curve. Designs the motors
/// cannot lift produce a failed report, not an error.
pub fn evaluate_design(
    design: &DesignSpec,
    curve: &MotorCurve,
    options: &EvaluationOptions,
) -> Result<DesignReport, DesignError> {
    design.validate()?;
    if design.batteries.is_empty() {
        return Err(CatalogError::invalid("batteries", "at least one battery required").into());
    }
    let auw = design.auw();
    let auw_other = design.auw_other();
    let battery_mass = design.battery_mass();
    let battery_capacity = design.battery_capacity();
    let thrust = per_motor_thrust(auw, design.motor_count);

    let frontier = build_frontier(curve, &mission_profile(design), auw_other, options.pwm_step)?;
    let battery_verdict = classify_battery(&frontier, battery_mass, battery_capacity);

    let mut failures = Vec::new();
    let mut hover_pwm = None;
    let mut hover_power = None;
    let mut total_power = None;
    let mut predicted = None;

    match curve.pwm_for_thrust(thrust) {
        Ok(pwm) => {
            hover_pwm = Some(pwm);
            match design_budget(design, curve).and_then(|budget| {
                let store = EnergyStore::new(battery_capacity, design.usable_fraction)?;
                Ok((budget, flight_time(&store, budget.total())?))
            }) {
                Ok((budget, t)) => {
                    hover_power = Some(budget.flight);
                    total_power = Some(budget.total());
                    predicted = Some(t);
                }
                Err(e) => failures.push(e.to_string()),
            }
        }
        Err(e) => failures.push(BudgetError::from(e).to_string()),
    }

    let pwm_check = match hover_pwm {
        Some(p) => Check::from_margin(options.pwm_threshold - p),
        None => Check::failed(),
    };
    if let (Some(p), false) = (hover_pwm, pwm_check.passed) {
        failures.push(format!(
            "hover pwm {:.1} us above threshold {} us",
            p.value(),
            options.pwm_threshold.value()
        ));
    }

    let endurance_check = match predicted {
        Some(t) => Check::from_margin(t.value() - design.target_flight_time.value()),
        None => Check::failed(),
    };
    if let (Some(t), false) = (predicted, endurance_check.passed) {
        failures.push(format!(
            "predicted flight time {:.2} min below target {} min",
            t.value(),
            design.target_flight_time.value()
        ));
    }

    if !battery_verdict.feasible {
        failures.push(format!(
            "battery infeasible against frontier (capacity surplus {:.1} Wh, mass headroom {:.3} kg at {} us)",
            battery_verdict.capacity_surplus_wh,
            battery_verdict.mass_headroom_kg,
            battery_verdict.pwm.value()
        ));
    }

    let auw_check = options.max_auw.map(|limit| {
        let check = Check::from_margin(limit.signed_sub(auw));
        if !check.passed {
            failures.push(format!(
                "auw {:.3} kg above limit {} kg",
                auw.value(),
                limit.value()
            ));
        }
        check
    });

    let passed = pwm_check.passed
        && endurance_check.passed
        && battery_verdict.feasible
        && auw_check.is_none_or(|c| c.passed);

    Ok(DesignReport {
        auw,
        auw_other,
        battery_mass,
        battery_capacity,
        per_motor_thrust: thrust,
        hover_pwm,
        hover_power,
        total_power,
        predicted_flight_time: predicted,
        target_flight_time: design.target_flight_time,
        pwm_threshold: options.pwm_threshold,
        pwm_check,
        endurance_check,
        auw_check,
        battery_verdict,
        failures,
        passed,
    })
}

// ---------------------------------------------------------------------------
// Sweep

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub payload: MassKg,
    pub auw: MassKg,
    pub flight_power: PowerW,
    pub predicted_flight_time: TimeMin,
}

/// Where a sweep stopped because the motors ran out of thrust.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTruncation {
    pub payload: MassKg,
    pub auw: MassKg,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub truncated: Option<SweepTruncation>,
}

fn payload_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let m = start + k as f64 * step;
        if m > end - 1e-9 * step {
            break;
        }
        out.push(m);
        k += 1;
    }
    out.push(end);
    out
}

/// Adds payload from `start` to `end` in `step` increments and predicts
/// hover power and endurance at each AUW. Stops at the first mass the
/// motors cannot lift.
pub fn sweep_auw(
    design: &DesignSpec,
    curve: &MotorCurve,
    start: MassKg,
    end: MassKg,
    step: MassKg,
) -> Result<Sweep, DesignError> {
    if step.value() <= 0.0 {
        return Err(DesignError::SweepStep);
    }
    if end < start {
        return Err(DesignError::SweepRange {
            start: start.value(),
            end: end.value(),
        });
    }
    design.validate()?;
    let store = EnergyStore::new(design.battery_capacity(), design.usable_fraction)
        .map_err(|e| CatalogError::invalid("batteries", e))?;

    let mut points = Vec::new();
    let mut truncated = None;
    for m in payload_grid(start.value(), end.value(), step.value()) {
        let payload = MassKg::new(m).expect("non-negative grid");
        let loaded = if m > 0.0 {
            let extra = ComponentSpec::new(ComponentKind::Payload, "sweep payload", payload)?;
            design.with_payload(extra)
        } else {
            design.clone()
        };
        let auw = loaded.auw();
        let result = design_budget(&loaded, curve)
            .and_then(|b| Ok((b.flight, flight_time(&store, b.total())?)));
        match result {
            Ok((flight_power, t)) => points.push(SweepPoint {
                payload,
                auw,
                flight_power,
                predicted_flight_time: t,
            }),
            Err(e) => {
                truncated = Some(SweepTruncation {
                    payload,
                    auw,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    Ok(Sweep { points, truncated })
}

/// Writes `auw_kg,flight_power_w,flight_time_min`.
pub fn write_sweep_csv<W: std::io::Write>(sweep: &Sweep, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["auw_kg", "flight_power_w", "flight_time_min"])?;
    for p in &sweep.points {
        w.serialize((
            p.auw.value(),
            p.flight_power.value(),
            p.predicted_flight_time.value(),
        ))?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Search

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConstraints {
    pub target_flight_time: TimeMin,
    pub pwm_threshold: PwmUs,
    pub max_auw: Option<MassKg>,
    pub pwm_step: f64,
}

impl SearchConstraints {
    pub fn from_catalog(catalog: &Catalog) -> Self {
        Self {
            target_flight_time: catalog.target_flight_time,
            pwm_threshold: PwmUs::new(DEFAULT_PWM_THRESHOLD_US).expect("in range"),
            max_auw: catalog.max_auw,
            pwm_step: DEFAULT_PWM_STEP_US,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub design: DesignFile,
    pub report: DesignReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    /// Best first.
    pub passing: Vec<Candidate>,
    pub rejected: Vec<Candidate>,
    /// Battery counts skipped because the packs alone outweigh what the
    /// motors can lift at the PWM threshold.
    pub pruned: usize,
}

fn candidate_label(d: &DesignSpec) -> String {
    format!(
        "{} / {} / {} / {} / {} / {} / {} / {}x {}",
        d.motor.name,
        d.propeller.name,
        d.esc.name,
        d.frame.name,
        d.fcu.name,
        d.compute.name,
        d.radio.name,
        d.batteries.len(),
        d.batteries.first().map_or("", |b| b.name.as_str()),
    )
}

fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    let time = |c: &Candidate| {
        c.report
            .predicted_flight_time
            .map_or(f64::NEG_INFINITY, TimeMin::value)
    };
    time(b)
        .total_cmp(&time(a))
        .then_with(|| a.report.auw.value().total_cmp(&b.report.auw.value()))
        .then_with(|| a.label.cmp(&b.label))
}

/// Enumerates every motor x propeller x esc x frame x fcu x compute x radio
/// x battery x pack-count combination, evaluates each, and ranks the
/// passing ones by flight time (desc), AUW (asc), then label.
pub fn search_catalog(
    catalog: &Catalog,
    constraints: &SearchConstraints,
) -> Result<SearchOutcome, DesignError> {
    let kinds: [(ComponentKind, usize); 8] = [
        (ComponentKind::Motor, catalog.motors.len()),
        (ComponentKind::Propeller, catalog.propellers.len()),
        (ComponentKind::Esc, catalog.escs.len()),
        (ComponentKind::Frame, catalog.frames.len()),
        (ComponentKind::Fcu, catalog.fcus.len()),
        (ComponentKind::Compute, catalog.computes.len()),
        (ComponentKind::Radio, catalog.radios.len()),
        (ComponentKind::Battery, catalog.batteries.len()),
    ];
    if let Some((kind, _)) = kinds.iter().find(|(_, n)| *n == 0) {
        return Err(DesignError::EmptyCatalogKind(*kind));
    }

    let options = EvaluationOptions {
        pwm_threshold: constraints.pwm_threshold,
        pwm_step: constraints.pwm_step,
        max_auw: constraints.max_auw,
    };

    let mut jobs: Vec<(DesignSpec, &MotorCurve)> = Vec::new();
    let mut pruned = 0usize;
    for motor in &catalog.motors {
        let threshold = PwmUs::new(
            constraints
                .pwm_threshold
                .value()
                .clamp(motor.curve.min_pwm().value(), motor.curve.max_pwm().value()),
        )
        .expect("inside curve domain");
        let thrust_limit = motor
            .curve
            .thrust_at_pwm(threshold)
            .map_err(FrontierError::from)?
            .value();
        for propeller in &catalog.propellers {
            for esc in &catalog.escs {
                for frame in &catalog.frames {
                    for fcu in &catalog.fcus {
                        for compute in &catalog.computes {
                            for radio in &catalog.radios {
                                let base = DesignSpec {
                                    name: None,
                                    motor: motor.spec.clone(),
                                    propeller: propeller.clone(),
                                    esc: esc.clone(),
                                    frame: frame.clone(),
                                    fcu: fcu.clone(),
                                    compute: compute.clone(),
                                    radio: radio.clone(),
                                    batteries: Vec::new(),
                                    extra_payloads: catalog.payloads.clone(),
                                    motor_count: catalog.motor_count,
                                    target_flight_time: constraints.target_flight_time,
                                    usable_fraction: catalog.usable_fraction,
                                    loss_power: catalog.loss_power,
                                };
                                let liftable = catalog.motor_count as f64 * thrust_limit
                                    - base.auw_other().value();
                                for battery in &catalog.batteries {
                                    for count in 1..=catalog.max_battery_count {
                                        if count as f64 * battery.mass.value() > liftable {
                                            pruned +=
                                                (catalog.max_battery_count - count + 1) as usize;
                                            break;
                                        }
                                        let mut design = base.clone();
                                        design.batteries = vec![battery.clone(); count as usize];
                                        jobs.push((design, &motor.curve));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let evaluated = jobs
        .into_par_iter()
        .map(|(mut design, curve)| {
            let report = evaluate_design(&design, curve, &options)?;
            let label = candidate_label(&design);
            design.name = Some(label.clone());
            Ok(Candidate {
                label,
                design: design.to_file(),
                report,
            })
        })
        .collect::<Result<Vec<_>, DesignError>>()?;

    let (mut passing, mut rejected): (Vec<_>, Vec<_>) =
        evaluated.into_iter().partition(|c| c.report.passed);
    passing.sort_by(rank);
    rejected.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| rank(a, b)));
    Ok(SearchOutcome {
        passing,
        rejected,
        pruned,
    })
}
