//! Empirical motor model built from thrust-stand sweeps.
//!
//! A [`MotorCurve`] maps ESC pulse width to electrical power and thrust and
//! can be inverted from thrust back to pulse width. Queries outside the
//! measured PWM range are refused rather than extrapolated.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::interp::{self, Pchip};
use crate::units::{PowerW, PwmUs, ThrustKgf, UnitError};

pub const MIN_SAMPLES: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error("too few rows: need at least {MIN_SAMPLES} distinct pwm values, got {count}")]
    TooFewSamples { count: usize },
    #[error("{quantity} decreases at pwm {pwm} us")]
    NonMonotone { quantity: &'static str, pwm: f64 },
    #[error("pwm {pwm} us outside measured domain [{min}, {max}] us")]
    OutOfDomain { pwm: f64, min: f64, max: f64 },
    #[error("motor cannot produce requested thrust {requested} kgf (curve maximum {max} kgf)")]
    ThrustAboveMax { requested: f64, max: f64 },
    #[error("requested thrust {requested} kgf below curve minimum {min} kgf")]
    ThrustBelowMin { requested: f64, min: f64 },
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThrustStandSample {
    pub pwm: PwmUs,
    pub power: PowerW,
    pub thrust: ThrustKgf,
}

impl ThrustStandSample {
    pub fn new(pwm: f64, power: f64, thrust: f64) -> Result<Self, UnitError> {
        Ok(Self {
            pwm: PwmUs::new(pwm)?,
            power: PowerW::new(power)?,
            thrust: ThrustKgf::new(thrust)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    Linear,
    MonotoneCubic,
}

impl fmt::Display for Interpolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpolation::Linear => "linear",
            Interpolation::MonotoneCubic => "monotone-cubic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Linear,
    Cubic { power: Pchip, thrust: Pchip },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotorCurve {
    samples: Vec<ThrustStandSample>,
    pwm: Vec<f64>,
    power: Vec<f64>,
    thrust: Vec<f64>,
    shape: Shape,
}

impl MotorCurve {
    /// Sorts by PWM, averages rows that share a PWM value, and checks that
    /// power and thrust never decrease.
    pub fn from_samples(
        samples: impl IntoIterator<Item = ThrustStandSample>,
        interpolation: Interpolation,
    ) -> Result<Self, CurveError> {
        // keyed on the bit pattern so identical readings group exactly;
        // valid PWM values are positive, so bit order equals numeric order
        let mut groups: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
        for s in samples {
            let e = groups
                .entry(s.pwm.value().to_bits())
                .or_insert((0.0, 0.0, 0));
            e.0 += s.power.value();
            e.1 += s.thrust.value();
            e.2 += 1;
        }
        if groups.len() < MIN_SAMPLES {
            return Err(CurveError::TooFewSamples {
                count: groups.len(),
            });
        }
        let merged: Vec<ThrustStandSample> = groups
            .into_iter()
            .map(|(bits, (p, t, c))| ThrustStandSample {
                pwm: PwmUs::new(f64::from_bits(bits)).expect("validated on construction"),
                power: PowerW::new(p / c as f64).expect("mean of valid powers"),
                thrust: ThrustKgf::new(t / c as f64).expect("mean of valid thrusts"),
            })
            .collect();

        for w in merged.windows(2) {
            if w[1].power < w[0].power {
                return Err(CurveError::NonMonotone {
                    quantity: "power",
                    pwm: w[1].pwm.value(),
                });
            }
            if w[1].thrust < w[0].thrust {
                return Err(CurveError::NonMonotone {
                    quantity: "thrust",
                    pwm: w[1].pwm.value(),
                });
            }
        }

        let pwm = merged.iter().map(|s| s.pwm.value()).collect();
        let power = merged.iter().map(|s| s.power.value()).collect();
        let thrust = merged.iter().map(|s| s.thrust.value()).collect();
        let mut curve = Self {
            samples: merged,
            pwm,
            power,
            thrust,
            shape: Shape::Linear,
        };
        curve.set_interpolation(interpolation);
        Ok(curve)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.set_interpolation(interpolation);
        self
    }

    fn set_interpolation(&mut self, interpolation: Interpolation) {
        self.shape = match interpolation {
            Interpolation::Linear => Shape::Linear,
            Interpolation::MonotoneCubic => Shape::Cubic {
                power: Pchip::new(&self.pwm, &self.power),
                thrust: Pchip::new(&self.pwm, &self.thrust),
            },
        };
    }

    pub fn interpolation(&self) -> Interpolation {
        match self.shape {
            Shape::Linear => Interpolation::Linear,
            Shape::Cubic { .. } => Interpolation::MonotoneCubic,
        }
    }

    pub fn samples(&self) -> &[ThrustStandSample] {
        &self.samples
    }

    pub fn min_pwm(&self) -> PwmUs {
        self.samples[0].pwm
    }

    pub fn max_pwm(&self) -> PwmUs {
        self.samples[self.samples.len() - 1].pwm
    }

    pub fn min_thrust(&self) -> ThrustKgf {
        self.samples[0].thrust
    }

    pub fn max_thrust(&self) -> ThrustKgf {
        self.samples[self.samples.len() - 1].thrust
    }

    pub fn max_power(&self) -> PowerW {
        self.samples[self.samples.len() - 1].power
    }

    pub fn contains_pwm(&self, pwm: PwmUs) -> bool {
        pwm >= self.min_pwm() && pwm <= self.max_pwm()
    }

    fn check_domain(&self, pwm: PwmUs) -> Result<(), CurveError> {
        if self.contains_pwm(pwm) {
            Ok(())
        } else {
            Err(CurveError::OutOfDomain {
                pwm: pwm.value(),
                min: self.min_pwm().value(),
                max: self.max_pwm().value(),
            })
        }
    }

    fn eval_thrust(&self, pwm: f64) -> f64 {
        match &self.shape {
            Shape::Linear => interp::linear(&self.pwm, &self.thrust, pwm),
            Shape::Cubic { thrust, .. } => thrust.eval(&self.pwm, &self.thrust, pwm),
        }
    }

    fn eval_power(&self, pwm: f64) -> f64 {
        match &self.shape {
            Shape::Linear => interp::linear(&self.pwm, &self.power, pwm),
            Shape::Cubic { power, .. } => power.eval(&self.pwm, &self.power, pwm),
        }
    }

    pub fn thrust_at_pwm(&self, pwm: PwmUs) -> Result<ThrustKgf, CurveError> {
        self.check_domain(pwm)?;
        Ok(
            ThrustKgf::new(self.eval_thrust(pwm.value()))
                .expect("interpolant stays within samples"),
        )
    }

    pub fn power_at_pwm(&self, pwm: PwmUs) -> Result<PowerW, CurveError> {
        self.check_domain(pwm)?;
        Ok(PowerW::new(self.eval_power(pwm.value())).expect("interpolant stays within samples"))
    }

    /// Smallest PWM at which the motor produces `thrust`, by bisection to
    /// full floating-point resolution.
    pub fn pwm_for_thrust(&self, thrust: ThrustKgf) -> Result<PwmUs, CurveError> {
        let t = thrust.value();
        if t > self.max_thrust().value() {
            return Err(CurveError::ThrustAboveMax {
                requested: t,
                max: self.max_thrust().value(),
            });
        }
        if t < self.min_thrust().value() {
            return Err(CurveError::ThrustBelowMin {
                requested: t,
                min: self.min_thrust().value(),
            });
        }
        let mut lo = self.min_pwm().value();
        let mut hi = self.max_pwm().value();
        if self.eval_thrust(lo) >= t {
            return Ok(self.min_pwm());
        }
        // invariant: thrust(lo) < t <= thrust(hi); runs until lo and hi
        // are adjacent floats
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_thrust(mid) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(PwmUs::new(hi).expect("inside curve domain"))
    }

    /// Electrical power drawn while producing `thrust`.
    pub fn power_for_thrust(&self, thrust: ThrustKgf) -> Result<PowerW, CurveError> {
        let pwm = self.pwm_for_thrust(thrust)?;
        self.power_at_pwm(pwm)
    }

    /// Writes the merged samples as `pwm_us,power_w,thrust_kgf`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CurveError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pwm_us", "power_w", "thrust_kgf"])?;
        for s in &self.samples {
            w.serialize((s.pwm.value(), s.power.value(), s.thrust.value()))?;
        }
        w.flush().map_err(|source| CurveError::Io {
            path: "<output>".into(),
            source,
        })?;
        Ok(())
    }
}

enum PowerColumns {
    Direct(usize),
    VoltageCurrent(usize, usize),
}

/// Parses thrust-stand CSV: `pwm_us`, then `power_w` or `voltage_v` +
/// `current_a`, then `thrust_kgf` or `thrust_gf`. Lines starting with `#`
/// are skipped.
pub fn parse_thrust_stand<R: Read>(
    input: R,
    interpolation: Interpolation,
) -> Result<MotorCurve, CurveError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);

    let pwm_col = col("pwm_us").ok_or_else(|| CurveError::MissingColumn("pwm_us".into()))?;
    let power_cols = match (col("power_w"), col("voltage_v"), col("current_a")) {
        (Some(p), _, _) => PowerColumns::Direct(p),
        (None, Some(v), Some(i)) => PowerColumns::VoltageCurrent(v, i),
        (None, Some(_), None) => return Err(CurveError::MissingColumn("current_a".into())),
        (None, None, Some(_)) => return Err(CurveError::MissingColumn("voltage_v".into())),
        (None, None, None) => {
            return Err(CurveError::MissingColumn(
                "power_w (or voltage_v,current_a)".into(),
            ))
        }
    };
    let (thrust_col, thrust_divisor) = match (col("thrust_kgf"), col("thrust_gf")) {
        (Some(c), _) => (c, 1.0),
        (None, Some(c)) => (c, 1000.0),
        (None, None) => {
            return Err(CurveError::MissingColumn(
                "thrust_kgf (or thrust_gf)".into(),
            ))
        }
    };

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize| -> Result<f64, CurveError> {
            let raw = record.get(idx).unwrap_or("");
            let name = &headers[idx];
            raw.parse::<f64>().map_err(|_| CurveError::Row {
                line,
                message: format!("{name}: cannot parse {raw:?} as a number"),
            })
        };
        let pwm = field(pwm_col)?;
        let power = match power_cols {
            PowerColumns::Direct(p) => field(p)?,
            PowerColumns::VoltageCurrent(v, i) => field(v)? * field(i)?,
        };
        let thrust = field(thrust_col)? / thrust_divisor;
        let sample = ThrustStandSample::new(pwm, power, thrust).map_err(|e| CurveError::Row {
            line,
            message: e.to_string(),
        })?;
        samples.push(sample);
    }
    MotorCurve::from_samples(samples, interpolation)
}

pub fn ingest_thrust_stand(
    path: impl AsRef<Path>,
    interpolation: Interpolation,
) -> Result<MotorCurve, CurveError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CurveError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_thrust_stand(std::io::BufReader::new(file), interpolation)
}
