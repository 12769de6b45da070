//! Unit-carrying scalars used throughout the sizing model.
//!
//! Every quantity is a thin newtype over `f64` with a fixed unit. Construction
//! validates finiteness and sign; arithmetic between quantities is only
//! provided where the result keeps the same unit.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize};

/// Lowest ESC pulse width accepted anywhere in the model.
pub const PWM_MIN_US: f64 = 800.0;
/// Highest ESC pulse width accepted anywhere in the model.
pub const PWM_MAX_US: f64 = 2200.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnitError {
    #[error("{quantity} must be finite, got {value}")]
    NotFinite { quantity: &'static str, value: f64 },
    #[error("{quantity} must be non-negative, got {value}")]
    Negative { quantity: &'static str, value: f64 },
    #[error("{quantity} {value} outside plausible ESC range [{min}, {max}] us")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}

fn check_non_negative(quantity: &'static str, value: f64) -> Result<f64, UnitError> {
    if !value.is_finite() {
        return Err(UnitError::NotFinite { quantity, value });
    }
    if value < 0.0 {
        return Err(UnitError::Negative { quantity, value });
    }
    // normalise -0.0
    Ok(value + 0.0)
}

macro_rules! non_negative_quantity {
    ($(#[$meta:meta])* $name:ident, $label:literal, $symbol:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
        #[serde(transparent)]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            pub fn new(value: f64) -> Result<Self, UnitError> {
                check_non_negative($label, value).map(Self)
            }

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold(Self::ZERO, Add::add)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = f64::deserialize(d)?;
                Self::new(raw).map_err(serde::de::Error::custom)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.0, $symbol)
            }
        }
    };
}

non_negative_quantity!(
    /// Mass in kilograms.
    MassKg, "mass", "kg"
);
non_negative_quantity!(
    /// Electrical power in watts.
    PowerW, "power", "W"
);
non_negative_quantity!(
    /// Stored energy in watt-hours.
    EnergyWh, "energy", "Wh"
);
non_negative_quantity!(
    /// Thrust in kilogram-force.
    ThrustKgf, "thrust", "kgf"
);
non_negative_quantity!(
    /// Duration in minutes.
    TimeMin, "time", "min"
);

impl MassKg {
    pub fn from_grams(grams: f64) -> Result<Self, UnitError> {
        Self::new(grams / 1000.0)
    }

    /// Signed difference, for margins and headroom.
    pub fn signed_sub(self, rhs: Self) -> f64 {
        self.0 - rhs.0
    }

    /// Thrust needed to hold this mass in hover, at exactly 1 kg : 1 kgf.
    pub fn as_hover_thrust(self) -> ThrustKgf {
        ThrustKgf(self.0)
    }
}

impl ThrustKgf {
    pub fn from_grams_force(grams: f64) -> Result<Self, UnitError> {
        Self::new(grams / 1000.0)
    }

    /// Mass this thrust can hold in hover, at exactly 1 kgf : 1 kg.
    pub fn as_liftable_mass(self) -> MassKg {
        MassKg(self.0)
    }
}

impl TimeMin {
    pub fn hours(self) -> f64 {
        self.0 / 60.0
    }
}

/// ESC command pulse width in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PwmUs(f64);

impl PwmUs {
    pub fn new(value: f64) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NotFinite {
                quantity: "pwm",
                value,
            });
        }
        if !(PWM_MIN_US..=PWM_MAX_US).contains(&value) {
            return Err(UnitError::OutOfRange {
                quantity: "pwm",
                value,
                min: PWM_MIN_US,
                max: PWM_MAX_US,
            });
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Sub for PwmUs {
    type Output = f64;
    fn sub(self, rhs: Self) -> f64 {
        self.0 - rhs.0
    }
}

impl<'de> Deserialize<'de> for PwmUs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = f64::deserialize(d)?;
        Self::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PwmUs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} us", self.0)
    }
}
