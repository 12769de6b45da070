//! Reference data for the Monarch quadcopter, compiled into the library.
//!
//! The component masses and mission figures are the published ones. The
//! thrust-stand curve is synthetic: it was hand-built to match the few
//! published anchor points (about 1260 us for 1.214 kgf per motor, about
//! 44.4 min endurance at 5.08 kg AUW). Predictions made with it are
//! consistency checks, not independent reproductions.

use crate::catalog::{parse_design, Catalog, CatalogError, CatalogFile, DesignSpec};
use crate::motor_curve::{parse_thrust_stand, CurveError, Interpolation, MotorCurve};

pub const MONARCH_CURVE_FILE: &str = "monarch_mn501s.csv";
pub const MONARCH_CURVE_CSV: &str = include_str!("../data/monarch_mn501s.csv");
pub const MONARCH_DESIGN_JSON: &str = include_str!("../data/monarch_design.json");
pub const MONARCH_CATALOG_JSON: &str = include_str!("../data/monarch_catalog.json");

pub fn monarch_curve(interpolation: Interpolation) -> MotorCurve {
    parse_thrust_stand(MONARCH_CURVE_CSV.as_bytes(), interpolation).expect("bundled curve is valid")
}

pub fn monarch_design() -> DesignSpec {
    parse_design(MONARCH_DESIGN_JSON).expect("bundled design is valid")
}

pub fn monarch_catalog_file() -> CatalogFile {
    serde_json::from_str(MONARCH_CATALOG_JSON).expect("bundled catalog parses")
}

pub fn monarch_catalog(interpolation: Interpolation) -> Result<Catalog, CatalogError> {
    monarch_catalog_file().resolve_with_curves(|name| {
        if name == MONARCH_CURVE_FILE {
            Ok(monarch_curve(interpolation))
        } else {
            Err(CurveError::Io {
                path: name.to_owned(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such bundled curve"),
            })
        }
    })
}
