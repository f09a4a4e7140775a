//! Game-based SPSO planner, the rigid-formation baseline, and plan metrics.
//!
//! The game planner keeps one swarm per player. In every iteration particle
//! `i` of every swarm forms candidate allocation `i`; the incumbent
//! allocation is replaced whenever a candidate leaves no player worse off.
//! Each swarm is then pulled toward its own particles' personal bests and
//! toward its player's path in the incumbent.
//!
//! By default every player's swarm replays the same random stream, so
//! particle `i` receives the same draws in every swarm. Spherical increments
//! are translation invariant, which makes candidate `i` a coordinated move
//! of the whole team rather than an arbitrary mix of independent guesses.
//!
//! Candidate evaluation is data-parallel. The incumbent scan and the
//! particle updates run in fixed index order, so results do not depend on
//! the worker count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::formation::{formation_cost, JointPosition};
use crate::game::{joint_cost, weakly_dominates, Allocation, CostVector};
use crate::geometry::{point_segment_distance_xy, Vec3};
use crate::par;
use crate::scenario::{validate, CostWeights, Scenario, Threat, Workspace};
use crate::singlecost::{path_length, single_cost, single_cost_with, Path};
use crate::spso::{
    init_particles, spherical_to_path, update_particle, Particle, PsoConfig,
    SearchBounds, SphericalVector,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub best_allocation: Allocation,
    pub best_costs: CostVector,
    /// Incumbent cost vector before the first iteration and after each
    /// iteration (`max_it + 1` entries).
    pub history: Vec<CostVector>,
    pub iterations_run: usize,
    pub seed: u64,
    /// Seconds; excluded from equality-sensitive outputs.
    pub wall_time: f64,
}

/// One player's swarm and the random stream driving it.
struct Swarm {
    particles: Vec<Particle>,
    bounds: SearchBounds,
    rng: ChaCha8Rng,
    start: Vec3,
    goal: Vec3,
}

impl Swarm {
    fn new(start: Vec3, goal: Vec3, bounds: SearchBounds, cfg: &PsoConfig, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let particles = init_particles(start, goal, &bounds, cfg.n_pop, &mut rng);
        Swarm {
            particles,
            bounds,
            rng,
            start,
            goal,
        }
    }

    fn decode(&self, i: usize, w: &Workspace) -> Path {
        spherical_to_path(&self.particles[i].position, self.start, self.goal, w)
    }

    fn step(&mut self, attractor: &SphericalVector, cfg: &PsoConfig, it: usize) {
        let dynamics = cfg.dynamics_at(it);
        let Swarm {
            particles,
            bounds,
            rng,
            ..
        } = self;
        for p in particles.iter_mut() {
            *p = update_particle(p, attractor, bounds, dynamics, || rng.gen::<f64>());
        }
    }
}

fn check_inputs(s: &Scenario, cfg: &PsoConfig) -> Result<()> {
    let violations = validate(s);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    cfg.validate()
}

/// Runs the game-based SPSO and returns the final incumbent allocation.
pub fn plan_game(s: &Scenario, cfg: &PsoConfig) -> Result<PlanResult> {
    check_inputs(s, cfg)?;
    let clock = Instant::now();
    let w = &s.workspace;

    let mut swarms: Vec<Swarm> = s
        .vehicles
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let stream = if cfg.shared_draws { 0 } else { n as u64 };
            Swarm::new(v.start, v.goal, SearchBounds::for_vehicle(s, n, cfg), cfg, stream)
        })
        .collect();

    let allocation_at = |swarms: &[Swarm], i: usize| {
        Allocation::new(swarms.iter().map(|sw| sw.decode(i, w)).collect())
    };

    let mut best_allocation = allocation_at(&swarms, 0);
    let mut best_costs = joint_cost(&best_allocation, s)?;
    let mut best_positions: Vec<SphericalVector> = swarms
        .iter()
        .map(|sw| sw.particles[0].position.clone())
        .collect();
    let mut history = Vec::with_capacity(cfg.max_it + 1);
    history.push(best_costs.clone());

    for it in 0..cfg.max_it {
        let candidates: Vec<(Allocation, CostVector)> = par::map_indexed(cfg.n_pop, |i| {
            let a = allocation_at(&swarms, i);
            let c = joint_cost(&a, s).expect("decoded allocations match the scenario");
            (a, c)
        });

        for (i, (_, costs)) in candidates.iter().enumerate() {
            for (sw, &c) in swarms.iter_mut().zip(&costs.costs) {
                sw.particles[i].observe(c);
            }
        }

        let mut accepted = None;
        for (i, (_, costs)) in candidates.iter().enumerate() {
            if weakly_dominates(costs, &best_costs)? {
                best_costs = costs.clone();
                accepted = Some(i);
            }
        }
        if let Some(i) = accepted {
            best_allocation = candidates.into_iter().nth(i).map(|(a, _)| a).unwrap();
            for (bp, sw) in best_positions.iter_mut().zip(&swarms) {
                *bp = sw.particles[i].position.clone();
            }
        }
        history.push(best_costs.clone());

        par::for_each_mut(&mut swarms, |n, sw| sw.step(&best_positions[n], cfg, it));
    }

    Ok(PlanResult {
        best_allocation,
        best_costs,
        history,
        iterations_run: cfg.max_it,
        seed: cfg.seed,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

/// The formation treated as one rigid body around a virtual vehicle at the
/// reference centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub start: Vec3,
    pub goal: Vec3,
    /// Member offsets from the virtual vehicle (`reference_n - centroid`).
    pub offsets: Vec<Vec3>,
    /// Largest member distance from the centroid.
    pub circumradius: f64,
    /// Threats grown by circumradius plus the largest body radius.
    pub inflated_threats: Vec<Threat>,
    /// Workspace shrunk so that every member stays inside when the virtual
    /// vehicle does.
    pub workspace: Workspace,
    /// Element-wise mean of the members' weights.
    pub weights: CostWeights,
}

fn centroid(points: impl Iterator<Item = Vec3>) -> Vec3 {
    let (sum, count) = points.fold((Vec3::zeros(), 0usize), |(s, c), p| (s + p, c + 1));
    sum / count as f64
}

impl RigidBody {
    pub fn from_scenario(s: &Scenario) -> Self {
        let v = &s.vehicles;
        let n = v.len() as f64;
        let ref_centroid = centroid(v.iter().map(|v| v.reference));
        let offsets: Vec<Vec3> = v.iter().map(|v| v.reference - ref_centroid).collect();
        let circumradius = offsets.iter().map(|o| o.norm()).fold(0.0, f64::max);
        let max_body = v.iter().map(|v| v.body_radius).fold(0.0, f64::max);
        let inflated_threats = s
            .threats
            .iter()
            .map(|t| Threat {
                radius: t.radius + circumradius + max_body,
                ..*t
            })
            .collect();

        let min = |f: fn(&Vec3) -> f64| offsets.iter().map(f).fold(f64::INFINITY, f64::min);
        let max = |f: fn(&Vec3) -> f64| offsets.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let ws = &s.workspace;
        let workspace = Workspace {
            x_min: ws.x_min - min(|o| o.x),
            x_max: ws.x_max - max(|o| o.x),
            y_min: ws.y_min - min(|o| o.y),
            y_max: ws.y_max - max(|o| o.y),
            z_min: ws.z_min - min(|o| o.z),
            z_max: ws.z_max - max(|o| o.z),
        };

        let mut omega = [0.0; 5];
        for veh in v {
            for (o, w) in omega.iter_mut().zip(veh.weights.omega) {
                *o += w / n;
            }
        }
        RigidBody {
            start: centroid(v.iter().map(|v| v.start)),
            goal: centroid(v.iter().map(|v| v.goal)),
            offsets,
            circumradius,
            inflated_threats,
            workspace,
            weights: CostWeights::new(0.0, omega),
        }
    }

    /// Single cost of the virtual vehicle. Its own body radius is already
    /// folded into the inflated threats.
    pub fn cost(&self, p: &Path, danger_distance: f64) -> Cost {
        single_cost_with(
            p,
            &self.workspace,
            &self.inflated_threats,
            &self.weights,
            0.0,
            danger_distance,
        )
    }

    /// Member paths: the virtual path's free waypoints shifted by each
    /// member's offset, between the member's own start and goal.
    pub fn member_allocation(&self, virtual_path: &Path, s: &Scenario) -> Allocation {
        let wp = virtual_path.waypoints();
        let interior = &wp[1..wp.len() - 1];
        Allocation::new(
            s.vehicles
                .iter()
                .zip(&self.offsets)
                .map(|(v, off)| {
                    let mut pts = Vec::with_capacity(wp.len());
                    pts.push(v.start);
                    pts.extend(interior.iter().map(|p| p + off));
                    pts.push(v.goal);
                    Path::new(pts).expect("member path has virtual path's length")
                })
                .collect(),
        )
    }
}

struct RigidSearch {
    best_path: Path,
    history: Vec<Cost>,
}



/// Single-swarm SPSO for the virtual vehicle of `body`.
fn rigid_search(
    s: &Scenario,
    body: &RigidBody,
    cfg: &PsoConfig,
    iterations: usize,
    stream: u64,
) -> RigidSearch {
    let d_danger = s.safety.danger_distance;
    let bounds =
        SearchBounds::for_endpoints(body.start, body.goal, s.waypoint_count, &body.workspace, cfg);
    let mut swarm = Swarm::new(body.start, body.goal, bounds, cfg, stream);

    let mut best_position = swarm.particles[0].position.clone();
    let mut best_path = swarm.decode(0, &body.workspace);
    let mut best_cost = body.cost(&best_path, d_danger);
    let mut history = Vec::with_capacity(iterations + 1);
    history.push(best_cost);

    for it in 0..iterations {
        let candidates: Vec<(Path, Cost)> = par::map_indexed(cfg.n_pop, |i| {
            let p = swarm.decode(i, &body.workspace);
            let c = body.cost(&p, d_danger);
            (p, c)
        });
        let mut accepted = None;
        for (i, (_, c)) in candidates.iter().enumerate() {
            swarm.particles[i].observe(*c);
            if *c <= best_cost {
                best_cost = *c;
                accepted = Some(i);
            }
        }
        if let Some(i) = accepted {
            best_path = candidates.into_iter().nth(i).map(|(p, _)| p).unwrap();
            best_position = swarm.particles[i].position.clone();
        }
        history.push(best_cost);
        swarm.step(&best_position, cfg, it);
    }
    RigidSearch { best_path, history }
}

/// Plans a single virtual vehicle around inflated threats and offsets the
/// members rigidly. History replicates the virtual incumbent cost per member.
pub fn plan_rigid(s: &Scenario, cfg: &PsoConfig) -> Result<PlanResult> {
    check_inputs(s, cfg)?;
    let clock = Instant::now();
    let body = RigidBody::from_scenario(s);
    let n = s.vehicle_count();
    let search = rigid_search(s, &body, cfg, cfg.max_it, 0);

    let best_allocation = body.member_allocation(&search.best_path, s);
    let best_costs = joint_cost(&best_allocation, s)?;
    Ok(PlanResult {
        best_allocation,
        best_costs,
        history: search
            .history
            .into_iter()
            .map(|c| CostVector::new(vec![c; n]))
            .collect(),
        iterations_run: cfg.max_it,
        seed: cfg.seed,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleMetrics {
    pub path_length: f64,
    pub single_cost: Cost,
    pub formation_cost: Cost,
    pub total_cost: Cost,
    /// Natural log of the total cost; `None` when infeasible.
    pub log_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanMetrics {
    pub vehicles: Vec<VehicleMetrics>,
    /// Smallest center distance between two vehicles over synchronized
    /// waypoints (start and goal included).
    pub min_inter_vehicle_distance: f64,
    /// Smallest `d - (R + r_n)` over all segments, threats and vehicles;
    /// infinite when there are no threats.
    pub min_threat_clearance: f64,
    /// Any player cost is the infeasibility sentinel.
    pub infeasible: bool,
}

impl PlanMetrics {
    pub fn total_cost(&self) -> Cost {
        self.vehicles.iter().map(|v| v.total_cost).sum()
    }
}

/// Recomputes every metric from the allocation alone.
pub fn evaluate_plan(r: &PlanResult, s: &Scenario) -> Result<PlanMetrics> {
    evaluate_allocation(&r.best_allocation, s)
}

pub fn evaluate_allocation(a: &Allocation, s: &Scenario) -> Result<PlanMetrics> {
    let costs = joint_cost(a, s)?;
    let radii = s.body_radii();
    let vehicles = (0..a.len())
        .map(|n| {
            let path = &a.strategies[n];
            let formation = formation_cost(a, &s.graph, n, s.safety.safe_distance, &radii)?;
            let total = costs.costs[n];
            Ok(VehicleMetrics {
                path_length: path_length(path),
                single_cost: single_cost(path, s, n),
                formation_cost: formation,
                total_cost: total,
                log_cost: total.value().map(f64::ln),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PlanMetrics {
        vehicles,
        min_inter_vehicle_distance: min_inter_vehicle_distance(a),
        min_threat_clearance: min_threat_clearance(a, s),
        infeasible: !costs.all_finite(),
    })
}

pub fn min_inter_vehicle_distance(a: &Allocation) -> f64 {
    let len = a.strategies.iter().map(Path::len).min().unwrap_or(0);
    let mut best = f64::INFINITY;
    for k in 0..len {
        let pts: Vec<Vec3> = a.strategies.iter().map(|p| p.waypoints()[k]).collect();
        let jp = JointPosition::from_points(&pts);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min((jp.point(i) - jp.point(j)).norm());
            }
        }
    }
    best
}

pub fn min_threat_clearance(a: &Allocation, s: &Scenario) -> f64 {
    let mut best = f64::INFINITY;
    for (path, v) in a.strategies.iter().zip(&s.vehicles) {
        for (p, q) in path.segments() {
            for t in &s.threats {
                let d = point_segment_distance_xy(t.center(), p, q);
                best = best.min(d - t.radius - v.body_radius);
            }
        }
    }
    best
}
