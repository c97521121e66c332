//! Result serialisation: structured JSON and flat CSV tables. Floats are
//! printed with 9 significant digits so files are stable across platforms.

use std::io::Write;

use pollinate_core::equilibrium::OracleComparison;
use pollinate_core::indicators::MarginalReport;
use pollinate_core::scenarios::SweepPoint;
use pollinate_core::{IndicatorBundle, ScenarioCell, SuiteResult};
use serde::Serialize;
use serde_json::Value;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%g`-style rendering with [`SIGNIFICANT_DIGITS`] significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Pretty JSON with every float rounded to [`SIGNIFICANT_DIGITS`].
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = fmt_sig(x).parse().expect("formatted float parses");
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Column order of `cells.csv`; `sweep.csv` wraps it with the swept
/// parameter in front and an error column at the end.
pub fn cell_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "policy",
        "level",
        "regime",
        "converged",
        "hive_cap_binding",
        "free_hives",
        "x_w",
        "x_g",
        "x_osr",
        "x_p",
        "x_h",
        "farmer_profit",
        "beekeeper_profit",
        "transfer_farmer",
        "transfer_beekeeper",
        "osr_output",
        "honey_output",
        "honeybees",
        "wildbees",
        "bees_normalized",
        "agricultural_wealth",
        "beekeeping_wealth",
        "public_balance",
        "total_wealth",
        "agricultural_delta",
        "beekeeping_delta",
        "public_delta",
        "total_delta",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(IndicatorBundle::NAMES.iter().map(|s| s.to_string()));
    h.extend(IndicatorBundle::NAMES.iter().map(|s| format!("{s}_pct")));
    h
}

pub fn cell_row(cell: &ScenarioCell) -> Vec<String> {
    let eq = &cell.equilibrium;
    let l = &cell.ledger;
    let mut row = vec![
        cell.policy.kind.code().to_string(),
        fmt_sig(cell.policy.level),
        cell.regime.code().to_string(),
        eq.converged.to_string(),
        eq.solver_report.hive_cap_binding.to_string(),
        eq.solver_report.free_hives.to_string(),
    ];
    row.extend(
        [
            eq.farmer.x_w,
            eq.farmer.x_g,
            eq.farmer.x_osr,
            eq.farmer.x_p,
            eq.beekeeper.x_h,
            eq.farmer_profit,
            eq.beekeeper_profit,
            eq.transfer_farmer,
            eq.transfer_beekeeper,
            eq.osr_output,
            eq.honey_output,
            eq.bees.honeybees,
            eq.bees.wildbees,
            eq.bees.normalized,
            l.agricultural_wealth,
            l.beekeeping_wealth,
            l.public_balance,
            l.total_wealth(),
            l.agricultural_delta,
            l.beekeeping_delta,
            l.public_delta,
            l.total_delta(),
        ]
        .map(fmt_sig),
    );
    row.extend(cell.indicators.values().map(fmt_sig));
    row.extend(cell.relative_changes.values().map(opt));
    row
}

pub const MARGINAL_HEADER: [&str; 6] = ["policy", "level", "quantity", "bau", "scenario", "percent_change"];

fn marginal_rows(report: &MarginalReport) -> Vec<Vec<String>> {
    MarginalReport::NAMES
        .iter()
        .zip(report.entries())
        .map(|(name, e)| {
            vec![
                report.policy.kind.code().to_string(),
                fmt_sig(report.policy.level),
                name.to_string(),
                opt(e.bau),
                opt(e.scenario),
                opt(e.percent_change),
            ]
        })
        .collect()
}

pub fn sweep_header() -> Vec<String> {
    let mut h = vec!["parameter".to_string(), "value".to_string()];
    h.extend(cell_header());
    h.push("error".into());
    h
}

pub const ORACLE_HEADER: [&str; 9] = [
    "policy",
    "regime",
    "leader",
    "solver_profit",
    "oracle_profit",
    "gap",
    "bound",
    "argmax_cells",
    "within_bound",
];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_cells<W: Write>(w: W, suite: &SuiteResult) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(cell_header())?;
    for cell in &suite.cells {
        out.write_record(cell_row(cell))?;
    }
    out.flush()?;
    Ok(())
}

/// One block of rows per policy, taken from its first cell.
pub fn write_marginals<W: Write>(w: W, suite: &SuiteResult) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(MARGINAL_HEADER)?;
    let mut seen = Vec::new();
    for cell in &suite.cells {
        if let Some(m) = &cell.marginals {
            if !seen.contains(&m.policy.kind) {
                seen.push(m.policy.kind);
                for row in marginal_rows(m) {
                    out.write_record(row)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// One row per (point, cell); a failed point yields a single row carrying
/// its error.
pub fn write_sweep<W: Write>(w: W, points: &[SweepPoint]) -> csv::Result<()> {
    let mut out = csv_writer(w);
    let width = sweep_header().len();
    out.write_record(sweep_header())?;
    for point in points {
        let prefix = [point.parameter.clone(), fmt_sig(point.value)];
        match &point.suite {
            Some(suite) => {
                for cell in &suite.cells {
                    let mut row = prefix.to_vec();
                    row.extend(cell_row(cell));
                    row.push(String::new());
                    out.write_record(row)?;
                }
            }
            None => {
                let mut row = prefix.to_vec();
                row.resize(width - 1, String::new());
                row.push(point.error.clone().unwrap_or_default());
                out.write_record(row)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_oracle<W: Write>(w: W, rows: &[OracleComparison]) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(ORACLE_HEADER)?;
    for c in rows {
        let leader = serde_json::to_value(c.leader)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        out.write_record([
            c.policy.kind.code().to_string(),
            c.regime.code().to_string(),
            leader,
            fmt_sig(c.solver_profit),
            fmt_sig(c.oracle_profit),
            fmt_sig(c.gap),
            fmt_sig(c.bound),
            fmt_sig(c.argmax_cells),
            c.within_bound.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
