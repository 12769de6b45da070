//! Multirotor UAV sizing.
//!
//! Builds motor performance curves from thrust-stand data, predicts hover
//! power and endurance, traces the battery capacity-vs-mass feasibility
//! frontier, and checks or searches complete designs.

pub mod battery_feasibility;
pub mod bundled;
pub mod catalog;
pub mod design_loop;
pub mod interp;
pub mod motor_curve;
pub mod power_budget;
pub mod units;

pub use battery_feasibility::{
    build_frontier, classify_battery, max_battery_mass_at_pwm, required_capacity_at_pwm,
    BatteryVerdict, FeasibilityFrontier, FrontierPoint, MissionProfile,
};
pub use catalog::{
    load_catalog, load_design, parse_design, total_mass, Catalog, ComponentKind, ComponentSpec,
    DesignSpec,
};
pub use design_loop::{
    evaluate_design, search_catalog, sweep_auw, DesignReport, EvaluationOptions, SearchConstraints,
    SearchOutcome, SweepPoint,
};
pub use motor_curve::{ingest_thrust_stand, Interpolation, MotorCurve, ThrustStandSample};
pub use power_budget::{
    flight_time, hover_flight_power, per_motor_thrust, predict_endurance, total_power, EnergyStore,
    PowerBudget,
};
pub use units::{EnergyWh, MassKg, PowerW, PwmUs, ThrustKgf, TimeMin};
