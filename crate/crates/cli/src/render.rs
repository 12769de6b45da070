use std::fmt::Write as _;
use std::io::IsTerminal;

use uav_sizer::battery_feasibility::{BatteryVerdict, FeasibilityFrontier};
use uav_sizer::design_loop::{Check, DesignReport, SearchOutcome, Sweep};
use uav_sizer::MotorCurve;

/// At most four decimals, trailing zeros dropped.
pub fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub struct Style {
    color: bool,
}

impl Style {
    pub fn detect(to_terminal: bool) -> Self {
        let disabled = std::env::var_os("UAV_SIZER_NO_COLOR").is_some();
        Self {
            color: to_terminal && !disabled && std::io::stdout().is_terminal(),
        }
    }

    fn verdict(&self, passed: bool) -> String {
        let (word, code) = if passed {
            ("PASS", "32")
        } else {
            ("FAIL", "31")
        };
        if self.color {
            format!("\x1b[{code}m{word}\x1b[0m")
        } else {
            word.to_owned()
        }
    }
}

fn opt(v: Option<f64>, unit: &str) -> String {
    v.map_or_else(|| "n/a".to_owned(), |x| format!("{} {unit}", num(x)))
}

fn check_line(style: &Style, label: &str, check: &Check, unit: &str) -> String {
    let margin = check.margin.map_or_else(
        || "no margin".to_owned(),
        |m| format!("margin {} {unit}", num(m)),
    );
    format!("{label:<18}{}  {margin}", style.verdict(check.passed))
}

pub fn curve_summary(curve: &MotorCurve) -> String {
    format!(
        "domain {}–{} µs, max thrust {} kgf, max power {} W, {} samples, {} interpolation\n",
        num(curve.min_pwm().value()),
        num(curve.max_pwm().value()),
        num(curve.max_thrust().value()),
        num(curve.max_power().value()),
        curve.samples().len(),
        curve.interpolation(),
    )
}

pub fn battery_line(v: &BatteryVerdict) -> String {
    format!(
        "capacity surplus {} Wh, mass headroom {} kg at {} µs",
        num(v.capacity_surplus_wh),
        num(v.mass_headroom_kg),
        num(v.pwm.value())
    )
}

pub fn report(style: &Style, name: Option<&str>, r: &DesignReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Design: {}", name.unwrap_or("(unnamed)"));
    let rows = [
        ("AUW", opt(Some(r.auw.value()), "kg")),
        ("non-battery mass", opt(Some(r.auw_other.value()), "kg")),
        (
            "battery",
            format!(
                "{} kg, {} Wh",
                num(r.battery_mass.value()),
                num(r.battery_capacity.value())
            ),
        ),
        (
            "per-motor thrust",
            opt(Some(r.per_motor_thrust.value()), "kgf"),
        ),
        ("hover PWM", opt(r.hover_pwm.map(|p| p.value()), "µs")),
        ("hover power", opt(r.hover_power.map(|p| p.value()), "W")),
        ("total power", opt(r.total_power.map(|p| p.value()), "W")),
        (
            "flight time",
            format!(
                "{} (target {} min)",
                opt(r.predicted_flight_time.map(|t| t.value()), "min"),
                num(r.target_flight_time.value())
            ),
        ),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "  {k:<18}{v}");
    }
    let _ = writeln!(
        s,
        "{}",
        check_line(
            style,
            &format!("PWM <= {}", num(r.pwm_threshold.value())),
            &r.pwm_check,
            "µs"
        )
    );
    let _ = writeln!(
        s,
        "{}",
        check_line(style, "endurance", &r.endurance_check, "min")
    );
    if let Some(c) = &r.auw_check {
        let _ = writeln!(s, "{}", check_line(style, "AUW limit", c, "kg"));
    }
    let _ = writeln!(
        s,
        "{:<18}{}  {}",
        "battery",
        style.verdict(r.battery_verdict.feasible),
        battery_line(&r.battery_verdict)
    );
    for f in &r.failures {
        let _ = writeln!(s, "  - {f}");
    }
    let _ = writeln!(s, "{:<18}{}", "overall", style.verdict(r.passed));
    s
}

pub fn sweep_table(sweep: &Sweep) -> String {
    let mut s = format!(
        "{:>10} {:>14} {:>16}\n",
        "auw_kg", "flight_power_w", "flight_time_min"
    );
    for p in &sweep.points {
        let _ = writeln!(
            s,
            "{:>10} {:>14} {:>16}",
            num(p.auw.value()),
            num(p.flight_power.value()),
            num(p.predicted_flight_time.value())
        );
    }
    if let Some(t) = &sweep.truncated {
        let _ = writeln!(s, "stopped at {} kg: {}", num(t.auw.value()), t.reason);
    }
    s
}

pub fn frontier_table(fr: &FeasibilityFrontier) -> String {
    let mut s = format!(
        "{:>8} {:>20} {:>21}\n",
        "pwm_us", "max_battery_mass_kg", "required_capacity_wh"
    );
    for p in &fr.points {
        let _ = writeln!(
            s,
            "{:>8} {:>20} {:>21}",
            num(p.pwm.value()),
            num(p.max_battery_mass_kg),
            num(p.required_capacity.value())
        );
    }
    s
}

pub fn search_summary(style: &Style, out: &SearchOutcome) -> String {
    let mut s = format!(
        "{} passing, {} rejected, {} pruned\n",
        out.passing.len(),
        out.rejected.len(),
        out.pruned
    );
    for (i, c) in out.passing.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>3}. {}  {}  {}  hover {}  {}",
            i + 1,
            style.verdict(true),
            opt(c.report.predicted_flight_time.map(|t| t.value()), "min"),
            opt(Some(c.report.auw.value()), "kg"),
            opt(c.report.hover_pwm.map(|p| p.value()), "µs"),
            c.label
        );
    }
    if !out.rejected.is_empty() {
        let _ = writeln!(s, "rejected:");
        for c in &out.rejected {
            let _ = writeln!(s, "  {}  {}", style.verdict(false), c.label);
            for f in &c.report.failures {
                let _ = writeln!(s, "      - {f}");
            }
        }
    }
    s
}
