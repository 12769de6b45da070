use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use uav_sizer::battery_feasibility::write_frontier_csv;
use uav_sizer::catalog::{validate_usable_fraction, CatalogFile, DesignFile};
use uav_sizer::design_loop::{write_sweep_csv, SearchOutcome};
use uav_sizer::power_budget::{design_budget, BudgetError};
use uav_sizer::{
    build_frontier, classify_battery, evaluate_design, flight_time, ingest_thrust_stand,
    per_motor_thrust, search_catalog, sweep_auw, DesignReport, DesignSpec, EnergyStore,
    EvaluationOptions, Interpolation, MassKg, MotorCurve, PowerW, PwmUs, SearchConstraints,
};

use crate::render::{self, Style};
use crate::{Cli, Command, Common, Format, Interp, Status};

pub fn run(cli: &Cli) -> Result<Status> {
    let c = &cli.common;
    match &cli.command {
        Command::Fit => fit(c),
        Command::Check => check(c),
        Command::Predict => predict(c),
        Command::Sweep {
            payload_min,
            payload_max,
            payload_step,
        } => sweep(c, *payload_min, *payload_max, *payload_step),
        Command::Frontier => frontier(c),
        Command::Search => search(c),
    }
}

impl Common {
    fn interpolation(&self) -> Interpolation {
        match self.interp {
            Interp::Linear => Interpolation::Linear,
            Interp::MonotoneCubic => Interpolation::MonotoneCubic,
        }
    }

    fn curve(&self) -> Result<MotorCurve> {
        let path = required(&self.curve, "--curve")?;
        ingest_thrust_stand(path, self.interpolation())
            .with_context(|| format!("thrust-stand data {}", path.display()))
    }

    /// The design file as written, with command-line overrides applied.
    fn design_file(&self) -> Result<DesignFile> {
        let path = required(&self.design, "--design")?;
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let mut file: DesignFile = serde_json::from_str(&text)
            .with_context(|| format!("malformed design file {}", path.display()))?;
        if let Some(f) = self.usable_fraction {
            validate_usable_fraction(f)?;
            file.usable_fraction = Some(f);
        }
        if let Some(w) = self.loss_power_w {
            PowerW::new(w).context("--loss-power-w")?;
            file.loss_power_w = Some(w);
        }
        Ok(file)
    }

    fn design(&self) -> Result<(DesignFile, DesignSpec)> {
        let file = self.design_file()?;
        let spec = file.resolve().with_context(|| {
            format!(
                "design {}",
                self.design.as_deref().unwrap_or(Path::new("")).display()
            )
        })?;
        Ok((file, spec))
    }

    fn threshold(&self) -> Result<PwmUs> {
        PwmUs::new(self.pwm_threshold).context("--pwm-threshold")
    }

    fn pwm_step(&self) -> Result<f64> {
        if !(self.pwm_step.is_finite() && self.pwm_step > 0.0) {
            bail!(
                "--pwm-step must be a positive number of microseconds, got {}",
                self.pwm_step
            );
        }
        Ok(self.pwm_step)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn style(&self) -> Style {
        Style::detect(self.out.is_none())
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    match path {
        Some(p) => Ok(p),
        None => bail!("{flag} is required for this command"),
    }
}

/// Destination for the command's primary output.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: Option<&Path>, body: &[u8]) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(body)?;
    w.flush()?;
    Ok(())
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    Ok(body)
}

fn unsupported(cmd: &str, format: Format) -> anyhow::Error {
    anyhow::anyhow!("{cmd} does not support --format {format:?}")
}

fn status(passed: bool) -> Status {
    if passed {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn fit(c: &Common) -> Result<Status> {
    let curve = c.curve()?;
    if let Some(out) = &c.out {
        let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
        curve.write_csv(BufWriter::new(file))?;
    }

    #[derive(Serialize)]
    struct Summary {
        min_pwm_us: f64,
        max_pwm_us: f64,
        max_thrust_kgf: f64,
        max_power_w: f64,
        samples: usize,
        interpolation: Interpolation,
    }
    let body = match c.format(Format::Text) {
        Format::Text => render::curve_summary(&curve).into_bytes(),
        Format::Json => json(&Summary {
            min_pwm_us: curve.min_pwm().value(),
            max_pwm_us: curve.max_pwm().value(),
            max_thrust_kgf: curve.max_thrust().value(),
            max_power_w: curve.max_power().value(),
            samples: curve.samples().len(),
            interpolation: curve.interpolation(),
        })?,
        Format::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            buf
        }
    };
    emit(None, &body)?;
    Ok(Status::Pass)
}

fn evaluation_options(c: &Common) -> Result<EvaluationOptions> {
    Ok(EvaluationOptions {
        pwm_threshold: c.threshold()?,
        pwm_step: c.pwm_step()?,
        max_auw: None,
    })
}

fn check(c: &Common) -> Result<Status> {
    let curve = c.curve()?;
    let (file, design) = c.design()?;
    let report = evaluate_design(&design, &curve, &evaluation_options(c)?)?;

    #[derive(Serialize)]
    struct Checked<'a> {
        design: &'a DesignFile,
        report: &'a DesignReport,
    }
    let body = match c.format(Format::Text) {
        Format::Text => render::report(&c.style(), design.name.as_deref(), &report).into_bytes(),
        Format::Json => json(&Checked {
            design: &file,
            report: &report,
        })?,
        f @ Format::Csv => return Err(unsupported("check", f)),
    };
    emit(c.out.as_deref(), &body)?;
    Ok(status(report.passed))
}

fn predict(c: &Common) -> Result<Status> {
    let curve = c.curve()?;
    let (_, design) = c.design()?;

    let budget = match design_budget(&design, &curve) {
        Ok(b) => b,
        Err(e @ BudgetError::InsufficientThrust { .. }) => {
            eprintln!("{e}");
            return Ok(Status::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let store = EnergyStore::new(design.battery_capacity(), design.usable_fraction)?;
    let minutes = flight_time(&store, budget.total())?;
    let hover_pwm = curve.pwm_for_thrust(per_motor_thrust(design.auw(), design.motor_count))?;

    #[derive(Serialize)]
    struct Prediction {
        auw_kg: f64,
        hover_pwm_us: f64,
        flight_power_w: f64,
        total_power_w: f64,
        usable_energy_wh: f64,
        flight_time_min: f64,
    }
    let p = Prediction {
        auw_kg: design.auw().value(),
        hover_pwm_us: hover_pwm.value(),
        flight_power_w: budget.flight.value(),
        total_power_w: budget.total().value(),
        usable_energy_wh: store.usable_energy_wh(),
        flight_time_min: minutes.value(),
    };
    let body = match c.format(Format::Text) {
        Format::Text => format!(
            "predicted flight time {} min at AUW {} kg (hover {} µs, flight power {} W, total {} W, usable energy {} Wh)\n",
            render::num(p.flight_time_min),
            render::num(p.auw_kg),
            render::num(p.hover_pwm_us),
            render::num(p.flight_power_w),
            render::num(p.total_power_w),
            render::num(p.usable_energy_wh),
        )
        .into_bytes(),
        Format::Json => json(&p)?,
        Format::Csv => format!(
            "auw_kg,hover_pwm_us,flight_power_w,total_power_w,usable_energy_wh,flight_time_min\n{},{},{},{},{},{}\n",
            p.auw_kg, p.hover_pwm_us, p.flight_power_w, p.total_power_w, p.usable_energy_wh, p.flight_time_min
        )
        .into_bytes(),
    };
    emit(c.out.as_deref(), &body)?;
    Ok(Status::Pass)
}

fn sweep(c: &Common, min: f64, max: f64, step: f64) -> Result<Status> {
    let curve = c.curve()?;
    let (_, design) = c.design()?;
    let kg = |v: f64, flag: &str| MassKg::new(v).with_context(|| flag.to_owned());
    let sweep = sweep_auw(
        &design,
        &curve,
        kg(min, "--payload-min")?,
        kg(max, "--payload-max")?,
        kg(step, "--payload-step")?,
    )?;
    if let Some(t) = &sweep.truncated {
        eprintln!(
            "sweep stopped at AUW {} kg: {}",
            render::num(t.auw.value()),
            t.reason
        );
    }
    let body = match c.format(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&sweep, &mut buf)?;
            buf
        }
        Format::Json => json(&sweep)?,
        Format::Text => render::sweep_table(&sweep).into_bytes(),
    };
    emit(c.out.as_deref(), &body)?;
    Ok(Status::Pass)
}

fn frontier(c: &Common) -> Result<Status> {
    let curve = c.curve()?;
    let (_, design) = c.design()?;
    let profile = uav_sizer::design_loop::mission_profile(&design);
    let frontier = build_frontier(&curve, &profile, design.auw_other(), c.pwm_step()?)?;
    let verdict = classify_battery(&frontier, design.battery_mass(), design.battery_capacity());

    #[derive(Serialize)]
    struct Output<'a> {
        frontier: &'a uav_sizer::FeasibilityFrontier,
        verdict: &'a uav_sizer::BatteryVerdict,
    }
    let body = match c.format(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_frontier_csv(&frontier, &mut buf)?;
            buf
        }
        Format::Json => json(&Output {
            frontier: &frontier,
            verdict: &verdict,
        })?,
        Format::Text => render::frontier_table(&frontier).into_bytes(),
    };
    emit(c.out.as_deref(), &body)?;
    eprintln!(
        "battery {} kg, {} Wh: {} ({})",
        render::num(design.battery_mass().value()),
        render::num(design.battery_capacity().value()),
        if verdict.feasible {
            "feasible"
        } else {
            "infeasible"
        },
        render::battery_line(&verdict)
    );
    Ok(status(verdict.feasible))
}

fn search(c: &Common) -> Result<Status> {
    let path = required(&c.catalog, "--catalog")?;
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut file: CatalogFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed catalog {}", path.display()))?;
    if let Some(f) = c.usable_fraction {
        file.usable_fraction = Some(f);
    }
    if let Some(w) = c.loss_power_w {
        file.loss_power_w = Some(w);
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let catalog = file
        .resolve(base, c.interpolation())
        .with_context(|| format!("catalog {}", path.display()))?;

    let constraints = SearchConstraints {
        pwm_threshold: c.threshold()?,
        pwm_step: c.pwm_step()?,
        ..SearchConstraints::from_catalog(&catalog)
    };
    let outcome = search_catalog(&catalog, &constraints)?;

    let body = match c.format(Format::Text) {
        Format::Text => render::search_summary(&c.style(), &outcome).into_bytes(),
        Format::Json => json(&outcome)?,
        Format::Csv => search_csv(&outcome)?,
    };
    emit(c.out.as_deref(), &body)?;
    Ok(status(!outcome.passing.is_empty()))
}

fn search_csv(outcome: &SearchOutcome) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "rank",
        "passed",
        "label",
        "auw_kg",
        "hover_pwm_us",
        "flight_time_min",
    ])?;
    let rows = outcome
        .passing
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1).to_string(), c))
        .chain(outcome.rejected.iter().map(|c| (String::new(), c)));
    for (rank, cand) in rows {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        w.write_record([
            rank,
            cand.report.passed.to_string(),
            cand.label.clone(),
            cand.report.auw.value().to_string(),
            opt(cand.report.hover_pwm.map(|p| p.value())),
            opt(cand.report.predicted_flight_time.map(|t| t.value())),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}
