#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use stagplan::cost::Cost;
use stagplan::formation::FormationGraph;
use stagplan::game::CostVector;
use stagplan::scenario::{
    CostWeights, SafetyParams, Scenario, Threat, VehicleSpec, Workspace, DEFAULT_BODY_RADIUS,
};
use stagplan::Vec3;

pub fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// A random connected graph on `n` vertices: a random spanning tree plus a
/// few extra edges. Edge weights are positive exactly on incident vertices.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> FormationGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|i| (order[i], order[rng.gen_range(0..i)]))
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            let present = edges.iter().any(|&(h, t)| (h, t) == (a, b) || (h, t) == (b, a));
            if !present && rng.gen_bool(0.3) {
                edges.push((a, b));
            }
        }
    }
    let mut incidence = vec![vec![0i8; edges.len()]; n];
    let mut weights = vec![vec![0.0; edges.len()]; n];
    for (e, &(h, t)) in edges.iter().enumerate() {
        incidence[h][e] = 1;
        incidence[t][e] = -1;
        weights[h][e] = rng.gen_range(0.1..5.0);
        weights[t][e] = rng.gen_range(0.1..5.0);
    }
    let references = (0..n).map(|_| random_point(rng, 50.0)).collect();
    FormationGraph::new(incidence, weights, references)
}

pub fn random_point<R: Rng>(rng: &mut R, scale: f64) -> Vec3 {
    v(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Cost vector of length `len`; roughly one entry in six is the sentinel and
/// values are drawn from a small set so ties are common.
pub fn random_costs<R: Rng>(rng: &mut R, len: usize) -> CostVector {
    CostVector::new(
        (0..len)
            .map(|_| {
                if rng.gen_ratio(1, 6) {
                    Cost::INFEASIBLE
                } else {
                    Cost::finite(rng.gen_range(0..6) as f64)
                }
            })
            .collect(),
    )
}

/// Threat-free world with `n` vehicles on parallel tracks 10 m apart, a
/// chain formation graph and the given weights.
pub fn open_world(n: usize, k: usize, weights: CostWeights) -> Scenario {
    let workspace = Workspace {
        x_min: 0.0,
        x_max: 100.0,
        y_min: 0.0,
        y_max: 100.0,
        z_min: 5.0,
        z_max: 35.0,
    };
    let vehicles: Vec<VehicleSpec> = (0..n)
        .map(|i| {
            let y = 20.0 + 10.0 * i as f64;
            VehicleSpec {
                start: v(10.0, y, 20.0),
                goal: v(90.0, y, 20.0),
                reference: v(90.0, y, 20.0),
                body_radius: DEFAULT_BODY_RADIUS,
                weights,
            }
        })
        .collect();
    let edges = n - 1;
    let mut incidence = vec![vec![0i8; edges]; n];
    let mut edge_weights = vec![vec![0.0; edges]; n];
    for e in 0..edges {
        incidence[e][e] = 1;
        incidence[e + 1][e] = -1;
        edge_weights[e][e] = 1.0;
        edge_weights[e + 1][e] = 1.0;
    }
    let graph = FormationGraph::new(
        incidence,
        edge_weights,
        vehicles.iter().map(|v| v.reference).collect(),
    );
    Scenario {
        workspace,
        threats: Vec::<Threat>::new(),
        vehicles,
        graph,
        safety: SafetyParams::default(),
        waypoint_count: k,
    }
    .validated()
    .expect("open world is valid")
}

pub fn unit_weights(beta: f64) -> CostWeights {
    CostWeights::new(beta, [1.0; 5])
}

/// Distance in the xy-plane from `p` to segment `ab`, by clamped projection.
pub fn segment_clearance_xy(p: (f64, f64), a: &Vec3, b: &Vec3) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.x) * dx + (p.1 - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.x + t * dx, a.y + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}
