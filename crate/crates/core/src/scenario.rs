//! World model and run configuration: workspace, threats, vehicles, formation
//! graph and safety parameters, plus the two construction-site built-ins.
//!
//! Scenarios are persisted as TOML. The on-disk layout is described in
//! `docs/formats.md`; [`save_scenario`] and [`load_scenario`] round-trip every
//! numeric field bit-exactly.

use std::fmt;
use std::path::Path as FsPath;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::formation::FormationGraph;
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Workspace {
    /// Preferred flight altitude: the middle of the altitude band.
    pub fn preferred_altitude(&self) -> f64 {
        0.5 * (self.z_min + self.z_max)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.contains_xy(p.x, p.y) && (self.z_min..=self.z_max).contains(&p.z)
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    pub fn clamp_xy(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.x_min, self.x_max),
            p.y.clamp(self.y_min, self.y_max),
            p.z,
        )
    }

    /// Length of the 3D box diagonal.
    pub fn diagonal(&self) -> f64 {
        Vec3::new(
            self.x_max - self.x_min,
            self.y_max - self.y_min,
            self.z_max - self.z_min,
        )
        .norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreatKind {
    Crane,
    Virtual,
    Generic,
}

/// A vertical cylinder of unlimited height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threat {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    pub kind: ThreatKind,
}

impl Threat {
    pub fn new(center_x: f64, center_y: f64, radius: f64, kind: ThreatKind) -> Self {
        Self {
            center_x,
            center_y,
            radius,
            kind,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.center_x, self.center_y)
    }
}

/// `beta` weights the formation term; `omega` weights path length, threat,
/// altitude, turning and climbing terms in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostWeights {
    pub beta: f64,
    pub omega: [f64; 5],
}

impl CostWeights {
    pub fn new(beta: f64, omega: [f64; 5]) -> Self {
        Self { beta, omega }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleSpec {
    pub start: Vec3,
    pub goal: Vec3,
    pub reference: Vec3,
    pub body_radius: f64,
    pub weights: CostWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyParams {
    /// Minimum inter-vehicle gap on top of the two body radii.
    pub safe_distance: f64,
    /// Width of the band around each threat in which a clearance penalty
    /// applies.
    pub danger_distance: f64,
}

impl Default for SafetyParams {
    fn default() -> Self {
        Self {
            safe_distance: 1.0,
            danger_distance: 2.0,
        }
    }
}

pub const DEFAULT_BODY_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub workspace: Workspace,
    pub threats: Vec<Threat>,
    pub vehicles: Vec<VehicleSpec>,
    pub graph: FormationGraph,
    pub safety: SafetyParams,
    pub waypoint_count: usize,
}

impl Scenario {
    pub fn vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn body_radii(&self) -> Vec<f64> {
        self.vehicles.iter().map(|v| v.body_radius).collect()
    }

    /// Returns the scenario when it has no violations.
    pub fn validated(self) -> Result<Self> {
        let v = validate(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinId {
    Scenario1,
    Scenario2,
}

impl BuiltinId {
    pub const ALL: [BuiltinId; 2] = [BuiltinId::Scenario1, BuiltinId::Scenario2];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinId::Scenario1 => "scenario1",
            BuiltinId::Scenario2 => "scenario2",
        }
    }
}

impl fmt::Display for BuiltinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scenario1" => Ok(BuiltinId::Scenario1),
            "scenario2" => Ok(BuiltinId::Scenario2),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

/// The two construction-site worlds: three UAVs crossing a 100 m x 100 m
/// site in an equilateral triangle with 10 m sides.
pub fn builtin_scenario(id: BuiltinId) -> Scenario {
    let workspace = Workspace {
        x_min: 0.0,
        x_max: 100.0,
        y_min: 0.0,
        y_max: 100.0,
        z_min: 5.0,
        z_max: 35.0,
    };
    let starts = [[15.0, 18.66, 20.0], [10.0, 10.0, 20.0], [20.0, 10.0, 20.0]];
    let goals = [[85.0, 88.66, 20.0], [80.0, 80.0, 20.0], [90.0, 80.0, 20.0]];
    let leader = CostWeights::new(1.0, [100.0, 100.0, 1.0, 1.0, 1.0]);
    let follower = CostWeights::new(100.0, [1.0, 100.0, 1.0, 1.0, 1.0]);
    let weights = [leader, follower, follower];

    let vehicles: Vec<VehicleSpec> = (0..3)
        .map(|n| {
            let goal = Vec3::from(goals[n]);
            VehicleSpec {
                start: Vec3::from(starts[n]),
                goal,
                reference: goal,
                body_radius: DEFAULT_BODY_RADIUS,
                weights: weights[n],
            }
        })
        .collect();

    let threats = match id {
        BuiltinId::Scenario1 => vec![
            Threat::new(40.0, 40.0, 9.0, ThreatKind::Generic),
            Threat::new(60.0, 60.0, 9.0, ThreatKind::Generic),
        ],
        BuiltinId::Scenario2 => vec![
            Threat::new(40.0, 48.0, 4.0, ThreatKind::Crane),
            Threat::new(74.0, 43.0, 4.0, ThreatKind::Crane),
            Threat::new(20.0, 70.0, 4.0, ThreatKind::Virtual),
            Threat::new(70.0, 60.0, 4.0, ThreatKind::Virtual),
        ],
    };

    // Edges in column order: 1-2, 1-3, 2-3 (head listed first).
    let incidence = vec![vec![1, 1, 0], vec![-1, 0, 1], vec![0, -1, -1]];
    let edge_weights = vec![
        vec![1.0, 1.0, 0.0],
        vec![1.0, 0.0, 1.0],
        vec![0.0, 1.0, 1.0],
    ];
    let references = vehicles.iter().map(|v| v.reference).collect();

    Scenario {
        workspace,
        threats,
        vehicles,
        graph: FormationGraph::new(incidence, edge_weights, references),
        safety: SafetyParams::default(),
        waypoint_count: 10,
    }
}

/// Every violated invariant of `s`. An empty list means the scenario is valid.
pub fn validate(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let w = &s.workspace;
    let all_finite = [w.x_min, w.x_max, w.y_min, w.y_max, w.z_min, w.z_max]
        .iter()
        .all(|v| v.is_finite());
    if !all_finite {
        out.push(Violation::new("workspace", "bounds must be finite"));
    }
    if !(w.x_min < w.x_max) {
        out.push(Violation::new("workspace.x", "x_min must be < x_max"));
    }
    if !(w.y_min < w.y_max) {
        out.push(Violation::new("workspace.y", "y_min must be < y_max"));
    }
    if !(0.0 <= w.z_min && w.z_min < w.z_max) {
        out.push(Violation::new("workspace.z", "require 0 <= z_min < z_max"));
    }

    for (i, t) in s.threats.iter().enumerate() {
        if !(t.radius > 0.0 && t.radius.is_finite()) {
            out.push(Violation::new(
                format!("threats[{i}].radius"),
                format!("must be > 0 (got {})", t.radius),
            ));
        }
        if !w.contains_xy(t.center_x, t.center_y) {
            out.push(Violation::new(
                format!("threats[{i}].center"),
                format!(
                    "({}, {}) lies outside the workspace xy-bounds",
                    t.center_x, t.center_y
                ),
            ));
        }
    }

    if s.vehicles.len() < 2 {
        out.push(Violation::new(
            "vehicles",
            format!("need at least 2 vehicles (got {})", s.vehicles.len()),
        ));
    }
    for (i, v) in s.vehicles.iter().enumerate() {
        let field = |f: &str| format!("vehicles[{i}].{f}");
        if v.start == v.goal {
            out.push(Violation::new(
                format!("vehicles[{i}]"),
                "start and goal coincide",
            ));
        }
        if !w.contains(&v.start) {
            out.push(Violation::new(field("start"), "outside workspace"));
        }
        if !w.contains(&v.goal) {
            out.push(Violation::new(field("goal"), "outside workspace"));
        }
        if !v.reference.iter().all(|c| c.is_finite()) {
            out.push(Violation::new(field("reference"), "must be finite"));
        }
        if !(v.body_radius > 0.0 && v.body_radius.is_finite()) {
            out.push(Violation::new(
                field("body_radius"),
                format!("must be > 0 (got {})", v.body_radius),
            ));
        }
        let ws = &v.weights;
        let comps = std::iter::once(ws.beta).chain(ws.omega.iter().copied());
        if comps.clone().any(|c| !(c >= 0.0 && c.is_finite())) {
            out.push(Violation::new(
                field("weights"),
                "all weights must be finite and >= 0",
            ));
        } else if comps.clone().all(|c| c == 0.0) {
            out.push(Violation::new(
                field("weights"),
                "at least one weight must be > 0",
            ));
        }
    }

    if !(s.safety.safe_distance > 0.0 && s.safety.safe_distance.is_finite()) {
        out.push(Violation::new(
            "safety.safe_distance",
            format!("must be > 0 (got {})", s.safety.safe_distance),
        ));
    }
    if !(s.safety.danger_distance >= 0.0 && s.safety.danger_distance.is_finite()) {
        out.push(Violation::new(
            "safety.danger_distance",
            format!("must be >= 0 (got {})", s.safety.danger_distance),
        ));
    }
    if s.waypoint_count < 1 {
        out.push(Violation::new("waypoint_count", "must be >= 1"));
    }

    out.extend(s.graph.violations(s.vehicles.len()));
    for (i, (v, r)) in s.vehicles.iter().zip(s.graph.references()).enumerate() {
        if v.reference != *r {
            out.push(Violation::new(
                format!("graph.references[{i}]"),
                "does not match vehicles[i].reference",
            ));
        }
    }
    out
}

// --- file format -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    waypoint_count: usize,
    workspace: Workspace,
    safety: SafetyParams,
    graph: GraphFile,
    threats: Vec<Threat>,
    vehicles: Vec<VehicleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    incidence: Vec<Vec<i8>>,
    edge_weights: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleFile {
    start: [f64; 3],
    goal: [f64; 3],
    reference: [f64; 3],
    body_radius: f64,
    weights: CostWeights,
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            waypoint_count: s.waypoint_count,
            workspace: s.workspace,
            safety: s.safety,
            graph: GraphFile {
                incidence: s.graph.incidence().to_vec(),
                edge_weights: s.graph.edge_weights().to_vec(),
            },
            threats: s.threats.clone(),
            vehicles: s
                .vehicles
                .iter()
                .map(|v| VehicleFile {
                    start: arr(&v.start),
                    goal: arr(&v.goal),
                    reference: arr(&v.reference),
                    body_radius: v.body_radius,
                    weights: v.weights,
                })
                .collect(),
        }
    }
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        let vehicles: Vec<VehicleSpec> = f
            .vehicles
            .into_iter()
            .map(|v| VehicleSpec {
                start: Vec3::from(v.start),
                goal: Vec3::from(v.goal),
                reference: Vec3::from(v.reference),
                body_radius: v.body_radius,
                weights: v.weights,
            })
            .collect();
        let references = vehicles.iter().map(|v| v.reference).collect();
        Scenario {
            workspace: f.workspace,
            threats: f.threats,
            graph: FormationGraph::new(f.graph.incidence, f.graph.edge_weights, references),
            vehicles,
            safety: f.safety,
            waypoint_count: f.waypoint_count,
        }
    }
}

/// Serializes a scenario to the TOML scenario format.
pub fn scenario_to_string(s: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from(s)).expect("scenario is always serializable")
}

/// Parses and validates a scenario document.
pub fn scenario_from_str(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Scenario::from(file).validated()
}

pub fn load_scenario(path: impl AsRef<FsPath>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_str(&text)
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<FsPath>) -> Result<()> {
    std::fs::write(path, scenario_to_string(s))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for id in BuiltinId::ALL {
            let s = builtin_scenario(id);
            assert_eq!(validate(&s), vec![], "{id}");
        }
    }

    #[test]
    fn scenario1_threats() {
        let s = builtin_scenario(BuiltinId::Scenario1);
        let t: Vec<_> = s.threats.iter().map(|t| (t.center_x, t.center_y, t.radius)).collect();
        assert_eq!(t, vec![(40.0, 40.0, 9.0), (60.0, 60.0, 9.0)]);
        assert_eq!(s.vehicle_count(), 3);
        assert_eq!(s.waypoint_count, 10);
    }

    #[test]
    fn scenario2_threats() {
        let s = builtin_scenario(BuiltinId::Scenario2);
        let t: Vec<_> = s.threats.iter().map(|t| (t.center_x, t.center_y, t.radius)).collect();
        assert_eq!(
            t,
            vec![
                (40.0, 48.0, 4.0),
                (74.0, 43.0, 4.0),
                (20.0, 70.0, 4.0),
                (70.0, 60.0, 4.0)
            ]
        );
        assert_eq!(s.threats[0].kind, ThreatKind::Crane);
        assert_eq!(s.threats[3].kind, ThreatKind::Virtual);
    }

    #[test]
    fn builtin_references_form_equilateral_triangle() {
        for id in BuiltinId::ALL {
            let s = builtin_scenario(id);
            let g: Vec<Vec3> = s.vehicles.iter().map(|v| v.reference).collect();
            // 18.66 / 88.66 are 10 + 5*sqrt(3) rounded to two decimals, so two
            // sides come out at sqrt(5^2 + 8.66^2) rather than exactly 10
            let slanted = (25.0f64 + 8.66 * 8.66).sqrt();
            assert!(((g[1] - g[2]).norm() - 10.0).abs() < 1e-12);
            assert!(((g[0] - g[1]).norm() - slanted).abs() < 1e-12);
            assert!(((g[0] - g[2]).norm() - slanted).abs() < 1e-12);
            assert!((slanted - 10.0).abs() < 2.5e-4);
            assert!(g.iter().all(|p| p.z == 20.0));
            assert_eq!(s.workspace.preferred_altitude(), 20.0);
        }
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(
            "scenario3".parse::<BuiltinId>(),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn zero_waypoints_is_one_violation() {
        let mut s = builtin_scenario(BuiltinId::Scenario1);
        s.waypoint_count = 0;
        let v = validate(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "waypoint_count");
    }

    #[test]
    fn threat_outside_workspace() {
        let mut s = builtin_scenario(BuiltinId::Scenario1);
        s.threats[1].center_x = 200.0;
        s.threats[1].center_y = 200.0;
        let v = validate(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "threats[1].center");
    }

    #[test]
    fn negative_safe_distance_named() {
        let mut s = builtin_scenario(BuiltinId::Scenario2);
        s.safety.safe_distance = -1.0;
        let v = validate(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "safety.safe_distance");
    }

    #[test]
    fn start_equals_goal_named() {
        let mut s = builtin_scenario(BuiltinId::Scenario1);
        s.vehicles[1].goal = s.vehicles[1].start;
        let v = validate(&s);
        assert!(v.iter().any(|v| v.field == "vehicles[1]"), "{v:?}");
    }

    #[test]
    fn reports_all_violations() {
        let mut s = builtin_scenario(BuiltinId::Scenario1);
        s.waypoint_count = 0;
        s.safety.danger_distance = -2.0;
        s.vehicles[0].body_radius = 0.0;
        assert_eq!(validate(&s).len(), 3);
    }

    #[test]
    fn text_round_trip() {
        for id in BuiltinId::ALL {
            let s = builtin_scenario(id);
            let back = scenario_from_str(&scenario_to_string(&s)).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn malformed_text_is_parse_error() {
        assert!(matches!(
            scenario_from_str("waypoint_count = [oops"),
            Err(Error::Parse(_))
        ));
    }
}
