//! Plot-ready text outputs: waypoint tracks and cost histories as CSV,
//! metrics as TOML. Floats are written in shortest round-trip form and the
//! sentinel as `inf`, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path as FsPath;

use crate::cost::Cost;
use crate::game::{Allocation, CostVector};
use crate::planner::PlanMetrics;

/// `vehicle,waypoint,x,y,z`, one row per waypoint, vehicles 1-based.
pub fn paths_csv(a: &Allocation) -> String {
    let mut out = String::from("vehicle,waypoint,x,y,z\n");
    for (n, p) in a.strategies.iter().enumerate() {
        for (k, w) in p.waypoints().iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", n + 1, k, w.x, w.y, w.z).unwrap();
        }
    }
    out
}

/// `iteration,cost_1,...,cost_N`, row 0 is the initial incumbent.
pub fn history_csv(history: &[CostVector]) -> String {
    let n = history.first().map_or(0, CostVector::len);
    let mut out = String::from("iteration");
    for i in 1..=n {
        write!(out, ",cost_{i}").unwrap();
    }
    out.push('\n');
    for (it, row) in history.iter().enumerate() {
        write!(out, "{it}").unwrap();
        for c in &row.costs {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn toml_cost(c: Cost) -> String {
    match c.value() {
        Some(v) => format!("{v:?}"),
        None => "inf".to_string(),
    }
}

/// Metrics as TOML: a `[summary]` table and one `[[vehicles]]` entry per
/// vehicle. Infeasible costs are written as `inf`; `log_cost` is omitted for
/// them.
pub fn metrics_toml(m: &PlanMetrics) -> String {
    let mut out = String::from("[summary]\n");
    writeln!(out, "infeasible = {}", m.infeasible).unwrap();
    writeln!(out, "total_cost = {}", toml_cost(m.total_cost())).unwrap();
    writeln!(
        out,
        "min_inter_vehicle_distance = {}",
        toml_cost(Cost::finite(m.min_inter_vehicle_distance))
    )
    .unwrap();
    let clearance = if m.min_threat_clearance.is_infinite() {
        if m.min_threat_clearance > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:?}", m.min_threat_clearance)
    };
    writeln!(out, "min_threat_clearance = {clearance}").unwrap();
    for (n, v) in m.vehicles.iter().enumerate() {
        out.push_str("\n[[vehicles]]\n");
        writeln!(out, "vehicle = {}", n + 1).unwrap();
        writeln!(out, "path_length = {:?}", v.path_length).unwrap();
        writeln!(out, "single_cost = {}", toml_cost(v.single_cost)).unwrap();
        writeln!(out, "formation_cost = {}", toml_cost(v.formation_cost)).unwrap();
        writeln!(out, "total_cost = {}", toml_cost(v.total_cost)).unwrap();
        if let Some(l) = v.log_cost {
            writeln!(out, "log_cost = {l:?}").unwrap();
        }
    }
    out
}

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`, so readers never observe a partial file.
pub fn write_atomic(path: impl AsRef<FsPath>, contents: &str) -> std::io::Result<()> {
    let path = path.as_ref();
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
