//! Power decomposition, hover thrust and power, and endurance.

use serde::Serialize;

use crate::catalog::DesignSpec;
use crate::motor_curve::{CurveError, MotorCurve};
use crate::units::{EnergyWh, MassKg, PowerW, ThrustKgf, TimeMin};

#[derive(Debug, thiserror::Error)]
pub enum BudgetError {
    #[error("total power is zero; endurance undefined")]
    ZeroPower,
    #[error("battery capacity is zero")]
    ZeroCapacity,
    #[error("usable fraction {0} not in (0, 1]")]
    UsableFraction(f64),
    #[error("insufficient thrust: need {required} kgf per motor, motor maximum is {available} kgf (deficit {deficit} kgf)")]
    InsufficientThrust {
        required: f64,
        available: f64,
        deficit: f64,
    },
    #[error(transparent)]
    Curve(CurveError),
}

impl From<CurveError> for BudgetError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::ThrustAboveMax { requested, max } => BudgetError::InsufficientThrust {
                required: requested,
                available: max,
                deficit: requested - max,
            },
            other => BudgetError::Curve(other),
        }
    }
}

/// Average power draw, split by consumer.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PowerBudget {
    pub flight: PowerW,
    pub compute: PowerW,
    pub radio: PowerW,
    pub loss: PowerW,
}

impl PowerBudget {
    pub fn total(&self) -> PowerW {
        total_power(self)
    }
}

pub fn total_power(budget: &PowerBudget) -> PowerW {
    budget.flight + budget.compute + budget.radio + budget.loss
}

/// On-board energy and the share of it that can be drawn safely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyStore {
    capacity: EnergyWh,
    usable_fraction: f64,
}

impl EnergyStore {
    pub fn new(capacity: EnergyWh, usable_fraction: f64) -> Result<Self, BudgetError> {
        if capacity.value() <= 0.0 {
            return Err(BudgetError::ZeroCapacity);
        }
        if !(usable_fraction.is_finite() && usable_fraction > 0.0 && usable_fraction <= 1.0) {
            return Err(BudgetError::UsableFraction(usable_fraction));
        }
        Ok(Self {
            capacity,
            usable_fraction,
        })
    }

    pub fn capacity(&self) -> EnergyWh {
        self.capacity
    }

    pub fn usable_fraction(&self) -> f64 {
        self.usable_fraction
    }

    pub fn usable_energy_wh(&self) -> f64 {
        self.usable_fraction * self.capacity.value()
    }
}

pub fn flight_time(store: &EnergyStore, total: PowerW) -> Result<TimeMin, BudgetError> {
    if total.value() <= 0.0 {
        return Err(BudgetError::ZeroPower);
    }
    Ok(TimeMin::new(60.0 * store.usable_energy_wh() / total.value()).expect("positive ratio"))
}

/// Hover thrust each of `n` motors must deliver; 1 kg of AUW needs 1 kgf.
pub fn per_motor_thrust(auw: MassKg, n: u32) -> ThrustKgf {
    assert!(n >= 3, "a multirotor needs at least 3 motors, got {n}");
    ThrustKgf::new(auw.as_hover_thrust().value() / n as f64).expect("non-negative quotient")
}

/// Electrical power for all motors to hold `auw` in hover.
pub fn hover_flight_power(curve: &MotorCurve, auw: MassKg, n: u32) -> Result<PowerW, BudgetError> {
    let per_motor = curve.power_for_thrust(per_motor_thrust(auw, n))?;
    Ok(PowerW::new(n as f64 * per_motor.value()).expect("non-negative product"))
}

/// Power budget of `design` hovering on `curve`.
pub fn design_budget(design: &DesignSpec, curve: &MotorCurve) -> Result<PowerBudget, BudgetError> {
    Ok(PowerBudget {
        flight: hover_flight_power(curve, design.auw(), design.motor_count)?,
        compute: design.compute_power(),
        radio: design.radio_power(),
        loss: design.loss_power,
    })
}

/// Predicted hover endurance of a complete design.
pub fn predict_endurance(design: &DesignSpec, curve: &MotorCurve) -> Result<TimeMin, BudgetError> {
    let store = EnergyStore::new(design.battery_capacity(), design.usable_fraction)?;
    let budget = design_budget(design, curve)?;
    flight_time(&store, budget.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motor_curve::{parse_thrust_stand, Interpolation};

    fn w(v: f64) -> PowerW {
        PowerW::new(v).unwrap()
    }

    fn f3() -> MotorCurve {
        parse_thrust_stand(
            "pwm_us,power_w,thrust_kgf\n1000,5,0.0\n1300,250,1.3\n1600,600,2.4\n".as_bytes(),
            Interpolation::Linear,
        )
        .unwrap()
    }

    #[test]
    fn total_power_sums_terms() {
        assert_eq!(total_power(&PowerBudget::default()), PowerW::ZERO);
        let b = PowerBudget {
            flight: w(100.0),
            compute: w(65.0),
            radio: w(18.0),
            loss: PowerW::ZERO,
        };
        assert_eq!(b.total().value(), 183.0);
        let b = PowerBudget {
            flight: w(800.0),
            compute: w(65.0),
            radio: w(18.0),
            loss: w(17.0),
        };
        assert_eq!(b.total().value(), 900.0);
    }

    #[test]
    fn flight_time_examples() {
        let store = EnergyStore::new(EnergyWh::new(100.0).unwrap(), 1.0).unwrap();
        assert_eq!(flight_time(&store, w(100.0)).unwrap().value(), 60.0);

        let store = EnergyStore::new(EnergyWh::new(800.0).unwrap(), 0.8).unwrap();
        let t = flight_time(&store, w(883.0)).unwrap().value();
        assert!((t - 43.49).abs() < 0.01, "{t}");

        assert!(matches!(
            flight_time(&store, PowerW::ZERO),
            Err(BudgetError::ZeroPower)
        ));
    }

    #[test]
    fn energy_store_validation() {
        assert!(matches!(
            EnergyStore::new(EnergyWh::ZERO, 0.8),
            Err(BudgetError::ZeroCapacity)
        ));
        assert!(EnergyStore::new(EnergyWh::new(1.0).unwrap(), 0.0).is_err());
        assert!(EnergyStore::new(EnergyWh::new(1.0).unwrap(), 1.01).is_err());
    }

    #[test]
    fn per_motor_thrust_examples() {
        let t = per_motor_thrust(MassKg::new(4.856).unwrap(), 4).value();
        assert!((t - 1.214).abs() < 1e-12);
        assert_eq!(per_motor_thrust(MassKg::ZERO, 6).value(), 0.0);
        assert!((per_motor_thrust(MassKg::new(3.0).unwrap(), 6).value() - 0.5).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn per_motor_thrust_rejects_bicopter() {
        per_motor_thrust(MassKg::new(1.0).unwrap(), 2);
    }

    #[test]
    fn hover_power_examples() {
        let c = f3();
        let p = hover_flight_power(&c, MassKg::new(5.2).unwrap(), 4).unwrap();
        assert!((p.value() - 1000.0).abs() < 1e-6);

        let idle = hover_flight_power(&c, MassKg::ZERO, 4).unwrap();
        assert_eq!(idle.value(), 20.0);

        match hover_flight_power(&c, MassKg::new(12.0).unwrap(), 4) {
            Err(BudgetError::InsufficientThrust { deficit, .. }) => {
                assert!((deficit - 0.6).abs() < 1e-12)
            }
            other => panic!("expected insufficient thrust, got {other:?}"),
        }
    }
}
