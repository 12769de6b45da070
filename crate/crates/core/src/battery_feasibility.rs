//! Battery capacity-vs-mass feasibility frontier.
//!
//! For each PWM the motors could hover at, two bounds apply to the battery:
//! it must hold enough energy to fly the target time at that PWM's power,
//! and it must be light enough for the motors' thrust at that PWM to lift it
//! along with everything else. Sweeping PWM traces the frontier; a battery
//! is feasible if some sampled PWM satisfies both bounds.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{validate_usable_fraction, CatalogError};
use crate::motor_curve::{CurveError, MotorCurve};
use crate::units::{EnergyWh, MassKg, PowerW, PwmUs, TimeMin};

pub const DEFAULT_PWM_STEP_US: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum FrontierError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("pwm step must be finite and > 0, got {0}")]
    Step(f64),
    #[error("target flight time must be > 0")]
    TargetTime,
    #[error(transparent)]
    Invalid(#[from] CatalogError),
    #[error("frontier {quantity} decreases at pwm {pwm} us")]
    NonMonotone { quantity: &'static str, pwm: f64 },
}

/// Mission loads that do not depend on the battery choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MissionProfile {
    pub motor_count: u32,
    pub compute_power: PowerW,
    pub radio_power: PowerW,
    pub loss_power: PowerW,
    pub target_flight_time: TimeMin,
    pub usable_fraction: f64,
}

impl MissionProfile {
    fn validate(&self) -> Result<(), FrontierError> {
        crate::catalog::validate_motor_count(self.motor_count)?;
        validate_usable_fraction(self.usable_fraction)?;
        if self.target_flight_time.value() <= 0.0 {
            return Err(FrontierError::TargetTime);
        }
        Ok(())
    }

    fn fixed_power(&self) -> f64 {
        self.compute_power.value() + self.radio_power.value() + self.loss_power.value()
    }
}

/// Smallest battery energy that flies `profile.target_flight_time` with
/// every motor held at `pwm`.
pub fn required_capacity_at_pwm(
    curve: &MotorCurve,
    pwm: PwmUs,
    profile: &MissionProfile,
) -> Result<EnergyWh, CurveError> {
    let motor_power = curve.power_at_pwm(pwm)?.value();
    let total = profile.motor_count as f64 * motor_power + profile.fixed_power();
    let wh = total * profile.target_flight_time.hours() / profile.usable_fraction;
    Ok(EnergyWh::new(wh).expect("non-negative"))
}

/// Heaviest battery the motors can hold at `pwm` on top of `auw_other`, in
/// kg. Zero or negative means nothing can be lifted at this PWM.
pub fn max_battery_mass_at_pwm(
    curve: &MotorCurve,
    pwm: PwmUs,
    motor_count: u32,
    auw_other: MassKg,
) -> Result<f64, CurveError> {
    let thrust = curve.thrust_at_pwm(pwm)?;
    let liftable = thrust.as_liftable_mass().value() * motor_count as f64;
    Ok(liftable - auw_other.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub pwm: PwmUs,
    /// Signed; see [`max_battery_mass_at_pwm`].
    pub max_battery_mass_kg: f64,
    pub required_capacity: EnergyWh,
}

impl FrontierPoint {
    pub fn liftable(&self) -> bool {
        self.max_battery_mass_kg > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityFrontier {
    pub points: Vec<FrontierPoint>,
    pub auw_other: MassKg,
    pub profile: MissionProfile,
}

/// PWM values from the curve's minimum to its maximum at `step` spacing.
/// The maximum is always included.
pub fn pwm_grid(curve: &MotorCurve, step: f64) -> Vec<PwmUs> {
    let lo = curve.min_pwm().value();
    let hi = curve.max_pwm().value();
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let p = lo + k as f64 * step;
        if p > hi - 1e-9 * step {
            break;
        }
        out.push(PwmUs::new(p).expect("inside curve domain"));
        k += 1;
    }
    out.push(curve.max_pwm());
    out
}

pub fn build_frontier(
    curve: &MotorCurve,
    profile: &MissionProfile,
    auw_other: MassKg,
    pwm_step: f64,
) -> Result<FeasibilityFrontier, FrontierError> {
    if !(pwm_step.is_finite() && pwm_step > 0.0) {
        return Err(FrontierError::Step(pwm_step));
    }
    profile.validate()?;

    let points = pwm_grid(curve, pwm_step)
        .into_par_iter()
        .map(|pwm| {
            Ok(FrontierPoint {
                pwm,
                max_battery_mass_kg: max_battery_mass_at_pwm(
                    curve,
                    pwm,
                    profile.motor_count,
                    auw_other,
                )?,
                required_capacity: required_capacity_at_pwm(curve, pwm, profile)?,
            })
        })
        .collect::<Result<Vec<_>, CurveError>>()?;

    for w in points.windows(2) {
        if w[1].required_capacity < w[0].required_capacity {
            return Err(FrontierError::NonMonotone {
                quantity: "required capacity",
                pwm: w[1].pwm.value(),
            });
        }
        if w[1].max_battery_mass_kg < w[0].max_battery_mass_kg {
            return Err(FrontierError::NonMonotone {
                quantity: "max battery mass",
                pwm: w[1].pwm.value(),
            });
        }
    }

    Ok(FeasibilityFrontier {
        points,
        auw_other,
        profile: *profile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryVerdict {
    pub feasible: bool,
    /// Sampled PWM the margins refer to.
    pub pwm: PwmUs,
    /// Battery capacity minus the capacity required at `pwm`.
    pub capacity_surplus_wh: f64,
    /// Liftable battery mass at `pwm` minus the battery mass.
    pub mass_headroom_kg: f64,
}

/// Classifies a battery against the sampled frontier.
///
/// Only sampled PWM values are considered, so a battery that would only
/// fit between two samples is reported infeasible. The margins are taken
/// at the lowest sampled PWM that can lift the battery; required capacity
/// only grows with PWM, so that point decides feasibility. If no PWM can
/// lift it, margins are reported at the highest PWM.
pub fn classify_battery(
    frontier: &FeasibilityFrontier,
    battery_mass: MassKg,
    battery_capacity: EnergyWh,
) -> BatteryVerdict {
    assert!(!frontier.points.is_empty(), "frontier has no points");
    let mass = battery_mass.value();
    let point = frontier
        .points
        .iter()
        .find(|p| mass <= p.max_battery_mass_kg)
        .unwrap_or_else(|| frontier.points.last().expect("non-empty"));
    let capacity_surplus_wh = battery_capacity.value() - point.required_capacity.value();
    let mass_headroom_kg = point.max_battery_mass_kg - mass;
    BatteryVerdict {
        feasible: mass_headroom_kg >= 0.0 && capacity_surplus_wh >= 0.0,
        pwm: point.pwm,
        capacity_surplus_wh,
        mass_headroom_kg,
    }
}

/// Writes `pwm_us,max_battery_mass_kg,required_capacity_wh`.
pub fn write_frontier_csv<W: Write>(frontier: &FeasibilityFrontier, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pwm_us", "max_battery_mass_kg", "required_capacity_wh"])?;
    for p in &frontier.points {
        w.serialize((
            p.pwm.value(),
            p.max_battery_mass_kg,
            p.required_capacity.value(),
        ))?;
    }
    w.flush()?;
    Ok(())
}
