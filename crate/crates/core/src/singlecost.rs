//! Single-vehicle path cost: a weighted sum of path length, threat
//! clearance, altitude deviation, turning and climbing-angle smoothness.
//!
//! Sums run over the whole flown geometry: all K+1 segments for length and
//! threats, all K+2 waypoints for altitude, and the junctions between
//! consecutive non-degenerate segments for the two angle terms.

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance_xy, xy_norm, Vec3};
use crate::scenario::{CostWeights, Scenario, Threat, Workspace};

/// Ordered waypoints of one vehicle: start, K free waypoints, goal.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    waypoints: Vec<Vec3>,
}

impl Path {
    pub fn new(waypoints: Vec<Vec3>) -> Result<Self> {
        if waypoints.len() < 3 {
            return Err(Error::Structure(format!(
                "a path needs at least 3 waypoints, got {}",
                waypoints.len()
            )));
        }
        Ok(Path { waypoints })
    }

    /// Straight chord from `start` to `goal` with `k` evenly spaced free
    /// waypoints.
    pub fn straight(start: Vec3, goal: Vec3, k: usize) -> Self {
        let steps = (k + 1) as f64;
        let waypoints = (0..=k + 1)
            .map(|i| {
                if i == k + 1 {
                    goal
                } else {
                    start + (goal - start) * (i as f64 / steps)
                }
            })
            .collect();
        Path { waypoints }
    }

    pub fn waypoints(&self) -> &[Vec3] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn start(&self) -> Vec3 {
        self.waypoints[0]
    }

    pub fn goal(&self) -> Vec3 {
        self.waypoints[self.waypoints.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Vec3, &Vec3)> + '_ {
        self.waypoints.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn translated(&self, offset: Vec3) -> Path {
        Path {
            waypoints: self.waypoints.iter().map(|p| p + offset).collect(),
        }
    }
}

/// Per-segment geometry: length, turning angle into the next segment and
/// climbing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGeometry {
    pub length: f64,
    pub turning: f64,
    pub climbing: f64,
}

pub fn path_length(p: &Path) -> f64 {
    p.segments().map(|(a, b)| (b - a).norm()).sum()
}

/// Clearance penalty over every (segment, threat) pair. A segment whose
/// closest xy-approach `d` to the cylinder axis satisfies `d <= R + r_n` is a
/// collision; inside the danger band the penalty is `R + r_n + d_danger - d`.
pub fn threat_cost(p: &Path, threats: &[Threat], r_n: f64, d_danger: f64) -> Cost {
    let mut total = 0.0;
    for (a, b) in p.segments() {
        for t in threats {
            let d = point_segment_distance_xy(t.center(), a, b);
            let hard = t.radius + r_n;
            if d <= hard {
                return Cost::INFEASIBLE;
            }
            let soft = hard + d_danger;
            if d <= soft {
                total += soft - d;
            }
        }
    }
    Cost::finite(total)
}

/// Sum of absolute deviations from the band midpoint; any waypoint outside
/// `[z_min, z_max]` is infeasible.
pub fn altitude_cost(p: &Path, w: &Workspace) -> Cost {
    let mid = w.preferred_altitude();
    let mut total = 0.0;
    for q in p.waypoints() {
        if !(w.z_min..=w.z_max).contains(&q.z) {
            return Cost::INFEASIBLE;
        }
        total += (q.z - mid).abs();
    }
    Cost::finite(total)
}

fn turning_angle(u: &Vec3, v: &Vec3) -> f64 {
    // atan2 of cross/dot is stable near 0 and pi
    let cross = u.x * v.y - u.y * v.x;
    let dot = u.x * v.x + u.y * v.y;
    cross.abs().atan2(dot)
}

fn climbing_angle(s: &Vec3) -> f64 {
    s.z.atan2(xy_norm(s))
}

/// `(sum of turning angles, sum of |climb_k - climb_{k+1}|)`.
///
/// Turning angles are measured between consecutive segments whose
/// xy-projection is nonzero; climbing changes between consecutive segments of
/// nonzero length. Degenerate segments contribute nothing.
pub fn smoothness_costs(p: &Path) -> (f64, f64) {
    let seg: Vec<Vec3> = p.segments().map(|(a, b)| b - a).collect();

    let turn = seg
        .iter()
        .filter(|s| xy_norm(s) > 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| turning_angle(w[0], w[1]))
        .sum();

    let climb = seg
        .iter()
        .filter(|s| s.norm() > 0.0)
        .map(climbing_angle)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .sum();

    (turn, climb)
}

/// Geometry of every segment; the turning angle of the last segment is 0.
pub fn segment_geometry(p: &Path) -> Vec<SegmentGeometry> {
    let seg: Vec<Vec3> = p.segments().map(|(a, b)| b - a).collect();
    seg.iter()
        .enumerate()
        .map(|(k, s)| SegmentGeometry {
            length: s.norm(),
            turning: seg
                .get(k + 1)
                .filter(|next| xy_norm(s) > 0.0 && xy_norm(next) > 0.0)
                .map_or(0.0, |next| turning_angle(s, next)),
            climbing: climbing_angle(s),
        })
        .collect()
}

/// Single cost from explicit ingredients; [`single_cost`] is the
/// scenario-bound form.
pub fn single_cost_with(
    p: &Path,
    workspace: &Workspace,
    threats: &[Threat],
    weights: &CostWeights,
    body_radius: f64,
    danger_distance: f64,
) -> Cost {
    let [w_len, w_threat, w_alt, w_turn, w_climb] = weights.omega;
    let threat = threat_cost(p, threats, body_radius, danger_distance).weighted(w_threat);
    if threat.is_infeasible() {
        return threat;
    }
    let alt = altitude_cost(p, workspace).weighted(w_alt);
    if alt.is_infeasible() {
        return alt;
    }
    let (turn, climb) = smoothness_costs(p);
    Cost::finite(path_length(p)).weighted(w_len)
        + threat
        + alt
        + Cost::finite(turn).weighted(w_turn)
        + Cost::finite(climb).weighted(w_climb)
}

pub fn single_cost(p: &Path, s: &Scenario, n: usize) -> Cost {
    let v = &s.vehicles[n];
    single_cost_with(
        p,
        &s.workspace,
        &s.threats,
        &v.weights,
        v.body_radius,
        s.safety.danger_distance,
    )
}
