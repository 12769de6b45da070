//! Component records, complete designs, and the JSON files that describe them.
//!
//! Mass fields in files carry an explicit unit, `{"g": 170}` or `{"kg": 0.17}`.
//! Internally everything is kilograms.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::motor_curve::{ingest_thrust_stand, CurveError, Interpolation, MotorCurve};
use crate::units::{EnergyWh, MassKg, PowerW, TimeMin, UnitError};

/// Cell voltage used to turn amp-hours into watt-hours when a battery entry
/// does not set its own.
pub const DEFAULT_NOMINAL_CELL_VOLTAGE: f64 = 3.7;
pub const DEFAULT_USABLE_FRACTION: f64 = 0.8;
/// Relative mismatch tolerated between an explicit and a derived battery capacity.
pub const CAPACITY_CONSISTENCY_TOLERANCE: f64 = 0.01;
pub const SUPPORTED_MOTOR_COUNTS: [u32; 4] = [3, 4, 6, 8];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
}

impl CatalogError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl fmt::Display) -> Self {
        CatalogError::Validation {
            field: field.into(),
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Motor,
    Propeller,
    Esc,
    Frame,
    Fcu,
    Compute,
    Radio,
    Battery,
    Payload,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Motor => "motor",
            ComponentKind::Propeller => "propeller",
            ComponentKind::Esc => "esc",
            ComponentKind::Frame => "frame",
            ComponentKind::Fcu => "fcu",
            ComponentKind::Compute => "compute",
            ComponentKind::Radio => "radio",
            ComponentKind::Battery => "battery",
            ComponentKind::Payload => "payload",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "motor" => ComponentKind::Motor,
            "propeller" => ComponentKind::Propeller,
            "esc" => ComponentKind::Esc,
            "frame" => ComponentKind::Frame,
            "fcu" => ComponentKind::Fcu,
            "compute" => ComponentKind::Compute,
            "radio" => ComponentKind::Radio,
            "battery" => ComponentKind::Battery,
            "payload" => ComponentKind::Payload,
            _ => return None,
        })
    }

    fn carries_power(self) -> bool {
        matches!(self, ComponentKind::Compute | ComponentKind::Radio)
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pack description from which a battery's energy can be derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatteryCells {
    pub cell_count: u32,
    pub amp_hours: f64,
    pub nominal_cell_voltage: f64,
}

impl BatteryCells {
    pub fn capacity(&self) -> Result<EnergyWh, UnitError> {
        EnergyWh::new(self.cell_count as f64 * self.nominal_cell_voltage * self.amp_hours)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSpec {
    pub kind: ComponentKind,
    pub name: String,
    pub mass: MassKg,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_power: Option<PowerW>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<EnergyWh>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<BatteryCells>,
}

impl ComponentSpec {
    /// A component with no kind-specific attributes (motor, propeller, esc,
    /// frame, fcu, payload).
    pub fn new(
        kind: ComponentKind,
        name: impl Into<String>,
        mass: MassKg,
    ) -> Result<Self, CatalogError> {
        if kind.carries_power() {
            return Err(CatalogError::invalid(
                "max_power_w",
                format!("{kind} components need a maximum power"),
            ));
        }
        if kind == ComponentKind::Battery {
            return Err(CatalogError::invalid(
                "capacity_wh",
                "battery components need a capacity",
            ));
        }
        Self::checked(kind, name.into(), mass, None, None, None)
    }

    /// A compute unit or radio drawing up to `max_power`.
    pub fn powered(
        kind: ComponentKind,
        name: impl Into<String>,
        mass: MassKg,
        max_power: PowerW,
    ) -> Result<Self, CatalogError> {
        if !kind.carries_power() {
            return Err(CatalogError::invalid(
                "max_power_w",
                format!("{kind} components do not carry a maximum power"),
            ));
        }
        Self::checked(kind, name.into(), mass, Some(max_power), None, None)
    }

    pub fn battery(
        name: impl Into<String>,
        mass: MassKg,
        capacity: EnergyWh,
    ) -> Result<Self, CatalogError> {
        Self::checked(
            ComponentKind::Battery,
            name.into(),
            mass,
            None,
            Some(capacity),
            None,
        )
    }

    /// Battery whose capacity is derived from its cells.
    pub fn battery_from_cells(
        name: impl Into<String>,
        mass: MassKg,
        cells: BatteryCells,
    ) -> Result<Self, CatalogError> {
        let capacity = cells
            .capacity()
            .map_err(|e| CatalogError::invalid("capacity_wh", e))?;
        Self::checked(
            ComponentKind::Battery,
            name.into(),
            mass,
            None,
            Some(capacity),
            Some(cells),
        )
    }

    fn checked(
        kind: ComponentKind,
        name: String,
        mass: MassKg,
        max_power: Option<PowerW>,
        capacity: Option<EnergyWh>,
        cells: Option<BatteryCells>,
    ) -> Result<Self, CatalogError> {
        if mass.value() <= 0.0 {
            return Err(CatalogError::invalid("mass", "must be > 0"));
        }
        if let Some(c) = capacity {
            if c.value() <= 0.0 {
                return Err(CatalogError::invalid("capacity_wh", "must be > 0"));
            }
        }
        Ok(Self {
            kind,
            name,
            mass,
            max_power,
            capacity,
            cells,
        })
    }

    /// Worst-case draw; zero for parts that are not compute or radio.
    pub fn max_power(&self) -> PowerW {
        self.max_power.unwrap_or(PowerW::ZERO)
    }

    /// Stored energy; zero for anything that is not a battery.
    pub fn capacity(&self) -> EnergyWh {
        self.capacity.unwrap_or(EnergyWh::ZERO)
    }

    pub fn cells(&self) -> Option<BatteryCells> {
        self.cells
    }
}

/// Sum of masses. Empty input weighs nothing.
pub fn total_mass<'a, I>(parts: I) -> MassKg
where
    I: IntoIterator<Item = &'a ComponentSpec>,
{
    parts.into_iter().map(|p| p.mass).sum()
}

/// A complete candidate airframe.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpec {
    pub name: Option<String>,
    pub motor: ComponentSpec,
    pub propeller: ComponentSpec,
    pub esc: ComponentSpec,
    pub frame: ComponentSpec,
    pub fcu: ComponentSpec,
    pub compute: ComponentSpec,
    pub radio: ComponentSpec,
    pub batteries: Vec<ComponentSpec>,
    pub extra_payloads: Vec<ComponentSpec>,
    pub motor_count: u32,
    pub target_flight_time: TimeMin,
    pub usable_fraction: f64,
    pub loss_power: PowerW,
}

impl DesignSpec {
    /// Checks the cross-field invariants that individual component
    /// constructors cannot see.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let slots = [
            ("motor", &self.motor, ComponentKind::Motor),
            ("propeller", &self.propeller, ComponentKind::Propeller),
            ("esc", &self.esc, ComponentKind::Esc),
            ("frame", &self.frame, ComponentKind::Frame),
            ("fcu", &self.fcu, ComponentKind::Fcu),
            ("compute", &self.compute, ComponentKind::Compute),
            ("radio", &self.radio, ComponentKind::Radio),
        ];
        for (field, part, kind) in slots {
            if part.kind != kind {
                return Err(CatalogError::invalid(
                    field,
                    format!("expected a {kind}, got a {}", part.kind),
                ));
            }
        }
        for (i, b) in self.batteries.iter().enumerate() {
            if b.kind != ComponentKind::Battery {
                return Err(CatalogError::invalid(
                    format!("batteries[{i}]"),
                    format!("expected a battery, got a {}", b.kind),
                ));
            }
        }
        for (i, p) in self.extra_payloads.iter().enumerate() {
            if p.kind != ComponentKind::Payload {
                return Err(CatalogError::invalid(
                    format!("payloads[{i}]"),
                    format!("expected a payload, got a {}", p.kind),
                ));
            }
        }
        validate_motor_count(self.motor_count)?;
        validate_usable_fraction(self.usable_fraction)?;
        Ok(())
    }

    /// Every physical part on the airframe, with per-arm parts repeated
    /// once per motor.
    pub fn parts(&self) -> impl Iterator<Item = &ComponentSpec> + '_ {
        self.non_battery_parts().chain(self.batteries.iter())
    }

    pub fn non_battery_parts(&self) -> impl Iterator<Item = &ComponentSpec> + '_ {
        let arms = self.motor_count as usize;
        let per_arm = [&self.motor, &self.propeller, &self.esc];
        (0..arms)
            .flat_map(move |_| per_arm)
            .chain([&self.frame, &self.fcu, &self.compute, &self.radio])
            .chain(self.extra_payloads.iter())
    }

    /// All-up weight.
    pub fn auw(&self) -> MassKg {
        total_mass(self.parts())
    }

    /// Everything except the batteries.
    pub fn auw_other(&self) -> MassKg {
        total_mass(self.non_battery_parts())
    }

    pub fn battery_mass(&self) -> MassKg {
        total_mass(&self.batteries)
    }

    pub fn battery_capacity(&self) -> EnergyWh {
        self.batteries.iter().map(ComponentSpec::capacity).sum()
    }

    pub fn compute_power(&self) -> PowerW {
        self.compute.max_power()
    }

    pub fn radio_power(&self) -> PowerW {
        self.radio.max_power()
    }

    /// Copy of this design carrying one more payload.
    pub fn with_payload(&self, payload: ComponentSpec) -> Self {
        let mut out = self.clone();
        out.extra_payloads.push(payload);
        out
    }

    /// Converts back to the on-disk representation.
    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            name: self.name.clone(),
            motor: ComponentEntry::from_spec(&self.motor),
            propeller: ComponentEntry::from_spec(&self.propeller),
            esc: ComponentEntry::from_spec(&self.esc),
            frame: ComponentEntry::from_spec(&self.frame),
            fcu: ComponentEntry::from_spec(&self.fcu),
            compute: ComponentEntry::from_spec(&self.compute),
            radio: ComponentEntry::from_spec(&self.radio),
            batteries: self.batteries.iter().map(BatteryEntry::from_spec).collect(),
            payloads: self
                .extra_payloads
                .iter()
                .map(ComponentEntry::from_spec)
                .collect(),
            motor_count: self.motor_count,
            target_flight_time_min: self.target_flight_time.value(),
            usable_fraction: Some(self.usable_fraction),
            loss_power_w: Some(self.loss_power.value()),
        }
    }
}

pub fn validate_motor_count(n: u32) -> Result<(), CatalogError> {
    if !SUPPORTED_MOTOR_COUNTS.contains(&n) {
        return Err(CatalogError::invalid(
            "motor_count",
            format!("{n} not one of {SUPPORTED_MOTOR_COUNTS:?}"),
        ));
    }
    Ok(())
}

pub fn validate_usable_fraction(fraction: f64) -> Result<(), CatalogError> {
    if !(fraction.is_finite() && fraction > 0.0 && fraction <= 1.0) {
        return Err(CatalogError::invalid(
            "usable_fraction",
            format!("{fraction} not in (0, 1]"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// File format

/// Mass with an explicit unit: exactly one of `g` or `kg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassField {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kg: Option<f64>,
}

impl MassField {
    pub fn kilograms(kg: f64) -> Self {
        Self {
            g: None,
            kg: Some(kg),
        }
    }

    pub fn resolve(&self, field: &str) -> Result<MassKg, CatalogError> {
        let mass = match (self.g, self.kg) {
            (Some(g), None) => MassKg::from_grams(g),
            (None, Some(kg)) => MassKg::new(kg),
            _ => {
                return Err(CatalogError::invalid(
                    field,
                    "give exactly one of {\"g\": ..} or {\"kg\": ..}",
                ))
            }
        };
        mass.map_err(|e| CatalogError::invalid(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub mass: MassField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power_w: Option<f64>,
}

impl ComponentEntry {
    fn from_spec(spec: &ComponentSpec) -> Self {
        Self {
            name: spec.name.clone(),
            kind: Some(spec.kind.as_str().to_owned()),
            mass: MassField::kilograms(spec.mass.value()),
            max_power_w: spec.max_power.map(PowerW::value),
        }
    }

    pub fn resolve(&self, kind: ComponentKind, field: &str) -> Result<ComponentSpec, CatalogError> {
        check_declared_kind(self.kind.as_deref(), kind, field)?;
        let mass = self.mass.resolve(&format!("{field}.mass"))?;
        let located = |e: CatalogError| relocate(e, field);
        if kind.carries_power() {
            let watts = self
                .max_power_w
                .ok_or_else(|| CatalogError::invalid(format!("{field}.max_power_w"), "required"))?;
            let power = PowerW::new(watts)
                .map_err(|e| CatalogError::invalid(format!("{field}.max_power_w"), e))?;
            ComponentSpec::powered(kind, self.name.clone(), mass, power).map_err(located)
        } else {
            if self.max_power_w.is_some() {
                return Err(CatalogError::invalid(
                    format!("{field}.max_power_w"),
                    format!("not allowed on a {kind}"),
                ));
            }
            ComponentSpec::new(kind, self.name.clone(), mass).map_err(located)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub mass: MassField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_wh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp_hours: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_cell_voltage: Option<f64>,
    /// Number of identical packs this entry stands for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
}

impl BatteryEntry {
    fn from_spec(spec: &ComponentSpec) -> Self {
        let cells = spec.cells;
        Self {
            name: spec.name.clone(),
            kind: Some(ComponentKind::Battery.as_str().to_owned()),
            mass: MassField::kilograms(spec.mass.value()),
            capacity_wh: spec.capacity.map(EnergyWh::value),
            cells: cells.map(|c| c.cell_count),
            amp_hours: cells.map(|c| c.amp_hours),
            nominal_cell_voltage: cells.map(|c| c.nominal_cell_voltage),
            count: None,
        }
    }

    /// Resolves one pack. Explicit `capacity_wh` wins over the cell-derived
    /// value, but the two must agree within 1 % when both are present.
    pub fn resolve(&self, field: &str) -> Result<ComponentSpec, CatalogError> {
        check_declared_kind(self.kind.as_deref(), ComponentKind::Battery, field)?;
        let mass = self.mass.resolve(&format!("{field}.mass"))?;

        let cells = match (self.cells, self.amp_hours) {
            (Some(cell_count), Some(amp_hours)) => {
                if cell_count == 0 {
                    return Err(CatalogError::invalid(
                        format!("{field}.cells"),
                        "must be > 0",
                    ));
                }
                if !(amp_hours.is_finite() && amp_hours > 0.0) {
                    return Err(CatalogError::invalid(
                        format!("{field}.amp_hours"),
                        "must be finite and > 0",
                    ));
                }
                let volts = self
                    .nominal_cell_voltage
                    .unwrap_or(DEFAULT_NOMINAL_CELL_VOLTAGE);
                if !(volts.is_finite() && volts > 0.0) {
                    return Err(CatalogError::invalid(
                        format!("{field}.nominal_cell_voltage"),
                        "must be finite and > 0",
                    ));
                }
                Some(BatteryCells {
                    cell_count,
                    amp_hours,
                    nominal_cell_voltage: volts,
                })
            }
            (None, None) => {
                if self.nominal_cell_voltage.is_some() {
                    return Err(CatalogError::invalid(
                        format!("{field}.nominal_cell_voltage"),
                        "given without cells and amp_hours",
                    ));
                }
                None
            }
            (Some(_), None) => {
                return Err(CatalogError::invalid(
                    format!("{field}.amp_hours"),
                    "required when cells is given",
                ))
            }
            (None, Some(_)) => {
                return Err(CatalogError::invalid(
                    format!("{field}.cells"),
                    "required when amp_hours is given",
                ))
            }
        };

        let capacity_field = format!("{field}.capacity_wh");
        let explicit = self
            .capacity_wh
            .map(EnergyWh::new)
            .transpose()
            .map_err(|e| CatalogError::invalid(&capacity_field, e))?;
        let derived = cells
            .map(|c| c.capacity())
            .transpose()
            .map_err(|e| CatalogError::invalid(&capacity_field, e))?;

        let capacity = match (explicit, derived) {
            (Some(e), Some(d)) => {
                let rel = (e.value() - d.value()).abs() / d.value().max(f64::MIN_POSITIVE);
                if rel > CAPACITY_CONSISTENCY_TOLERANCE {
                    return Err(CatalogError::invalid(
                        capacity_field,
                        format!(
                            "{} Wh disagrees with {} Wh derived from cells",
                            e.value(),
                            d.value()
                        ),
                    ));
                }
                e
            }
            (Some(e), None) => e,
            (None, Some(d)) => d,
            (None, None) => {
                return Err(CatalogError::invalid(
                    capacity_field,
                    "give capacity_wh or cells + amp_hours",
                ))
            }
        };
        if capacity.value() <= 0.0 {
            return Err(CatalogError::invalid(capacity_field, "must be > 0"));
        }
        ComponentSpec::checked(
            ComponentKind::Battery,
            self.name.clone(),
            mass,
            None,
            Some(capacity),
            cells,
        )
        .map_err(|e| relocate(e, field))
    }

    /// Resolves the entry into `count` identical packs.
    pub fn expand(&self, field: &str) -> Result<Vec<ComponentSpec>, CatalogError> {
        let count = self.count.unwrap_or(1);
        if count == 0 {
            return Err(CatalogError::invalid(
                format!("{field}.count"),
                "must be >= 1",
            ));
        }
        let pack = self.resolve(field)?;
        Ok(vec![pack; count as usize])
    }
}

fn check_declared_kind(
    declared: Option<&str>,
    expected: ComponentKind,
    field: &str,
) -> Result<(), CatalogError> {
    let Some(declared) = declared else {
        return Ok(());
    };
    match ComponentKind::parse(declared) {
        None => Err(CatalogError::invalid(
            format!("{field}.kind"),
            format!("unknown component kind {declared:?}"),
        )),
        Some(k) if k != expected => Err(CatalogError::invalid(
            format!("{field}.kind"),
            format!("{declared} placed in a {expected} slot"),
        )),
        Some(_) => Ok(()),
    }
}

fn relocate(err: CatalogError, prefix: &str) -> CatalogError {
    match err {
        CatalogError::Validation { field, reason } => CatalogError::Validation {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

/// On-disk design description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub motor: ComponentEntry,
    pub propeller: ComponentEntry,
    pub esc: ComponentEntry,
    pub frame: ComponentEntry,
    pub fcu: ComponentEntry,
    pub compute: ComponentEntry,
    pub radio: ComponentEntry,
    pub batteries: Vec<BatteryEntry>,
    #[serde(default)]
    pub payloads: Vec<ComponentEntry>,
    pub motor_count: u32,
    pub target_flight_time_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usable_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_power_w: Option<f64>,
}

impl DesignFile {
    pub fn resolve(&self) -> Result<DesignSpec, CatalogError> {
        let mut batteries = Vec::new();
        for (i, entry) in self.batteries.iter().enumerate() {
            batteries.extend(entry.expand(&format!("batteries[{i}]"))?);
        }
        if batteries.is_empty() {
            return Err(CatalogError::invalid(
                "batteries",
                "at least one battery required",
            ));
        }
        let extra_payloads = self
            .payloads
            .iter()
            .enumerate()
            .map(|(i, p)| p.resolve(ComponentKind::Payload, &format!("payloads[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;

        let target_flight_time = TimeMin::new(self.target_flight_time_min)
            .map_err(|e| CatalogError::invalid("target_flight_time_min", e))?;
        if target_flight_time.value() <= 0.0 {
            return Err(CatalogError::invalid(
                "target_flight_time_min",
                "must be > 0",
            ));
        }
        let loss_power = PowerW::new(self.loss_power_w.unwrap_or(0.0))
            .map_err(|e| CatalogError::invalid("loss_power_w", e))?;

        let design = DesignSpec {
            name: self.name.clone(),
            motor: self.motor.resolve(ComponentKind::Motor, "motor")?,
            propeller: self
                .propeller
                .resolve(ComponentKind::Propeller, "propeller")?,
            esc: self.esc.resolve(ComponentKind::Esc, "esc")?,
            frame: self.frame.resolve(ComponentKind::Frame, "frame")?,
            fcu: self.fcu.resolve(ComponentKind::Fcu, "fcu")?,
            compute: self.compute.resolve(ComponentKind::Compute, "compute")?,
            radio: self.radio.resolve(ComponentKind::Radio, "radio")?,
            batteries,
            extra_payloads,
            motor_count: self.motor_count,
            target_flight_time,
            usable_fraction: self.usable_fraction.unwrap_or(DEFAULT_USABLE_FRACTION),
            loss_power,
        };
        design.validate()?;
        Ok(design)
    }
}

pub fn parse_design(text: &str) -> Result<DesignSpec, CatalogError> {
    let file: DesignFile = serde_json::from_str(text)?;
    file.resolve()
}

pub fn load_design(path: impl AsRef<Path>) -> Result<DesignSpec, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_design(&text)
}

// ---------------------------------------------------------------------------
// Search catalogs

/// A motor offered by a catalog together with its measured curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorOption {
    pub spec: ComponentSpec,
    pub curve: MotorCurve,
}

/// Parts to choose from when searching for a design, plus the mission they
/// must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub motor_count: u32,
    pub motors: Vec<MotorOption>,
    pub propellers: Vec<ComponentSpec>,
    pub escs: Vec<ComponentSpec>,
    pub frames: Vec<ComponentSpec>,
    pub fcus: Vec<ComponentSpec>,
    pub computes: Vec<ComponentSpec>,
    pub radios: Vec<ComponentSpec>,
    pub batteries: Vec<ComponentSpec>,
    /// Carried by every candidate.
    pub payloads: Vec<ComponentSpec>,
    /// Upper bound on identical packs per candidate.
    pub max_battery_count: u32,
    pub target_flight_time: TimeMin,
    pub usable_fraction: f64,
    pub loss_power: PowerW,
    pub max_auw: Option<MassKg>,
}

pub const DEFAULT_MAX_BATTERY_COUNT: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub mass: MassField,
    /// Thrust-stand CSV, relative to the catalog file.
    pub curve: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub motor_count: u32,
    pub motors: Vec<MotorEntry>,
    pub propellers: Vec<ComponentEntry>,
    pub escs: Vec<ComponentEntry>,
    pub frames: Vec<ComponentEntry>,
    pub fcus: Vec<ComponentEntry>,
    pub computes: Vec<ComponentEntry>,
    pub radios: Vec<ComponentEntry>,
    pub batteries: Vec<BatteryEntry>,
    #[serde(default)]
    pub payloads: Vec<ComponentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_battery_count: Option<u32>,
    pub target_flight_time_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usable_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_auw: Option<MassField>,
}

impl CatalogFile {
    /// `base_dir` anchors relative curve paths.
    pub fn resolve(
        &self,
        base_dir: &Path,
        interpolation: Interpolation,
    ) -> Result<Catalog, CatalogError> {
        self.resolve_with_curves(|curve| ingest_thrust_stand(base_dir.join(curve), interpolation))
    }

    /// Like [`CatalogFile::resolve`], with motor curves supplied by `load_curve`,
    /// which receives each motor's `curve` string.
    pub fn resolve_with_curves<F>(&self, load_curve: F) -> Result<Catalog, CatalogError>
    where
        F: Fn(&str) -> Result<MotorCurve, CurveError>,
    {
        validate_motor_count(self.motor_count)?;
        let fraction = self.usable_fraction.unwrap_or(DEFAULT_USABLE_FRACTION);
        validate_usable_fraction(fraction)?;
        let target_flight_time = TimeMin::new(self.target_flight_time_min)
            .ok()
            .filter(|t| t.value() > 0.0)
            .ok_or_else(|| {
                CatalogError::invalid("target_flight_time_min", "must be finite and > 0")
            })?;
        let loss_power = PowerW::new(self.loss_power_w.unwrap_or(0.0))
            .map_err(|e| CatalogError::invalid("loss_power_w", e))?;
        let max_auw = self.max_auw.map(|m| m.resolve("max_auw")).transpose()?;
        let max_battery_count = self.max_battery_count.unwrap_or(DEFAULT_MAX_BATTERY_COUNT);
        if max_battery_count == 0 {
            return Err(CatalogError::invalid("max_battery_count", "must be >= 1"));
        }

        let mut motors = Vec::with_capacity(self.motors.len());
        for (i, m) in self.motors.iter().enumerate() {
            let field = format!("motors[{i}]");
            check_declared_kind(m.kind.as_deref(), ComponentKind::Motor, &field)?;
            let mass = m.mass.resolve(&format!("{field}.mass"))?;
            let spec = ComponentSpec::new(ComponentKind::Motor, m.name.clone(), mass)
                .map_err(|e| relocate(e, &field))?;
            let curve = load_curve(&m.curve)
                .map_err(|e| CatalogError::invalid(format!("{field}.curve"), e))?;
            motors.push(MotorOption { spec, curve });
        }

        let list = |entries: &[ComponentEntry], kind: ComponentKind, key: &str| {
            entries
                .iter()
                .enumerate()
                .map(|(i, e)| e.resolve(kind, &format!("{key}[{i}]")))
                .collect::<Result<Vec<_>, _>>()
        };
        let batteries = self
            .batteries
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let field = format!("batteries[{i}]");
                if b.count.is_some() {
                    return Err(CatalogError::invalid(
                        format!("{field}.count"),
                        "catalog batteries are single packs; use max_battery_count",
                    ));
                }
                b.resolve(&field)
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Catalog {
            motor_count: self.motor_count,
            motors,
            propellers: list(&self.propellers, ComponentKind::Propeller, "propellers")?,
            escs: list(&self.escs, ComponentKind::Esc, "escs")?,
            frames: list(&self.frames, ComponentKind::Frame, "frames")?,
            fcus: list(&self.fcus, ComponentKind::Fcu, "fcus")?,
            computes: list(&self.computes, ComponentKind::Compute, "computes")?,
            radios: list(&self.radios, ComponentKind::Radio, "radios")?,
            batteries,
            payloads: list(&self.payloads, ComponentKind::Payload, "payloads")?,
            max_battery_count,
            target_flight_time,
            usable_fraction: fraction,
            loss_power,
            max_auw,
        })
    }
}

pub fn load_catalog(
    path: impl AsRef<Path>,
    interpolation: Interpolation,
) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: CatalogFile = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    file.resolve(base, interpolation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kg(v: f64) -> MassKg {
        MassKg::new(v).unwrap()
    }

    fn payload(name: &str, mass: f64) -> ComponentSpec {
        ComponentSpec::new(ComponentKind::Payload, name, kg(mass)).unwrap()
    }

    fn minimal_design_json(extra: &str) -> String {
        format!(
            r#"{{
                "motor": {{"name": "m", "mass": {{"g": 170}}}},
                "propeller": {{"name": "p", "mass": {{"g": 44}}}},
                "esc": {{"name": "e", "mass": {{"g": 74}}}},
                "frame": {{"name": "f", "mass": {{"kg": 0.643}}}},
                "fcu": {{"name": "fcu", "mass": {{"g": 45.2}}}},
                "compute": {{"name": "nuc", "mass": {{"kg": 0.47}}, "max_power_w": 65}},
                "radio": {{"name": "b210", "mass": {{"kg": 0.35}}, "max_power_w": 18}},
                "batteries": [{{"name": "8S", "mass": {{"kg": 0.549}}, "cells": 8, "amp_hours": 6}}],
                "motor_count": 4,
                "target_flight_time_min": 45{extra}
            }}"#
        )
    }

    #[test]
    fn empty_total_mass_is_zero() {
        assert_eq!(total_mass(&[]), MassKg::ZERO);
    }

    #[test]
    fn payload_masses_add() {
        let parts = [payload("a", 0.5), payload("b", 0.25)];
        assert_eq!(total_mass(&parts).value(), 0.75);
    }

    #[test]
    fn derived_capacity_uses_nominal_cell_voltage() {
        let entry: BatteryEntry = serde_json::from_str(
            r#"{"name": "8S 6Ah", "mass": {"kg": 0.549}, "cells": 8, "amp_hours": 6, "nominal_cell_voltage": 3.7}"#,
        )
        .unwrap();
        let pack = entry.resolve("batteries[0]").unwrap();
        assert!((pack.capacity().value() - 177.6).abs() < 1e-9);

        // default voltage gives the same result
        let entry: BatteryEntry = serde_json::from_str(
            r#"{"name": "b", "mass": {"g": 549}, "cells": 8, "amp_hours": 6}"#,
        )
        .unwrap();
        assert!((entry.resolve("b").unwrap().capacity().value() - 177.6).abs() < 1e-9);
    }

    #[test]
    fn explicit_capacity_wins_when_consistent() {
        let entry: BatteryEntry = serde_json::from_str(
            r#"{"name": "b", "mass": {"g": 549}, "capacity_wh": 178.0, "cells": 8, "amp_hours": 6}"#,
        )
        .unwrap();
        assert_eq!(entry.resolve("b").unwrap().capacity().value(), 178.0);
    }

    #[test]
    fn inconsistent_capacity_is_rejected() {
        let entry: BatteryEntry = serde_json::from_str(
            r#"{"name": "b", "mass": {"g": 549}, "capacity_wh": 200.0, "cells": 8, "amp_hours": 6}"#,
        )
        .unwrap();
        let err = entry.resolve("batteries[0]").unwrap_err();
        assert!(
            matches!(err, CatalogError::Validation { ref field, .. } if field == "batteries[0].capacity_wh"),
            "{err}"
        );
    }

    #[test]
    fn battery_without_capacity_is_rejected() {
        let entry: BatteryEntry =
            serde_json::from_str(r#"{"name": "b", "mass": {"g": 549}}"#).unwrap();
        assert!(entry.resolve("b").is_err());
    }

    #[test]
    fn mass_needs_exactly_one_unit() {
        let both = MassField {
            g: Some(1.0),
            kg: Some(1.0),
        };
        assert!(both.resolve("x").is_err());
        let none = MassField { g: None, kg: None };
        assert!(none.resolve("x").is_err());
        assert!(serde_json::from_str::<MassField>(r#"{"lb": 1}"#).is_err());
    }

    #[test]
    fn zero_mass_component_is_rejected() {
        assert!(ComponentSpec::new(ComponentKind::Frame, "f", MassKg::ZERO).is_err());
    }

    #[test]
    fn compute_needs_power() {
        assert!(ComponentSpec::new(ComponentKind::Compute, "nuc", kg(0.47)).is_err());
        assert!(ComponentSpec::powered(ComponentKind::Motor, "m", kg(0.1), PowerW::ZERO).is_err());
    }

    #[test]
    fn loads_minimal_design_with_defaults() {
        let d = parse_design(&minimal_design_json("")).unwrap();
        assert_eq!(d.motor_count, 4);
        assert_eq!(d.usable_fraction, 0.8);
        assert_eq!(d.loss_power, PowerW::ZERO);
        assert_eq!(d.compute_power().value(), 65.0);
        assert_eq!(d.radio_power().value(), 18.0);
        assert_eq!(d.batteries.len(), 1);
    }

    #[test]
    fn usable_fraction_above_one_is_rejected() {
        let err = parse_design(&minimal_design_json(r#", "usable_fraction": 1.3"#)).unwrap_err();
        assert!(
            matches!(err, CatalogError::Validation { ref field, .. } if field == "usable_fraction"),
            "{err}"
        );
    }

    #[test]
    fn unsupported_motor_count_is_rejected() {
        let text = minimal_design_json("").replace("\"motor_count\": 4", "\"motor_count\": 5");
        let err = parse_design(&text).unwrap_err();
        assert!(
            matches!(err, CatalogError::Validation { ref field, .. } if field == "motor_count")
        );
    }

    #[test]
    fn unknown_top_level_component_is_rejected() {
        let text = minimal_design_json(r#", "gimbal": {"name": "g", "mass": {"g": 300}}"#);
        assert!(matches!(parse_design(&text), Err(CatalogError::Parse(_))));
    }

    #[test]
    fn unknown_kind_tag_is_rejected() {
        let text = minimal_design_json(
            r#", "payloads": [{"name": "x", "kind": "gimbal", "mass": {"g": 300}}]"#,
        );
        let err = parse_design(&text).unwrap_err();
        assert!(
            matches!(err, CatalogError::Validation { ref field, .. } if field == "payloads[0].kind")
        );
    }

    #[test]
    fn mismatched_kind_tag_is_rejected() {
        let text = minimal_design_json("").replace(
            r#""frame": {"name": "f","#,
            r#""frame": {"name": "f", "kind": "motor","#,
        );
        assert!(parse_design(&text).is_err());
    }

    #[test]
    fn battery_count_expands() {
        let text =
            minimal_design_json("").replace("\"amp_hours\": 6}", "\"amp_hours\": 6, \"count\": 4}");
        let d = parse_design(&text).unwrap();
        assert_eq!(d.batteries.len(), 4);
        assert!((d.battery_capacity().value() - 710.4).abs() < 1e-9);
        assert!((d.battery_mass().value() - 2.196).abs() < 1e-12);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_design("/nonexistent/design.json"),
            Err(CatalogError::Io { .. })
        ));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            parse_design("{ not json"),
            Err(CatalogError::Parse(_))
        ));
    }

    #[test]
    fn to_file_round_trips() {
        let d = parse_design(&minimal_design_json(
            r#", "payloads": [{"name": "x", "mass": {"g": 250}}]"#,
        ))
        .unwrap();
        let text = serde_json::to_string(&d.to_file()).unwrap();
        assert_eq!(parse_design(&text).unwrap(), d);
    }
}
