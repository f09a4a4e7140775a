//! Graph-based formation model.
//!
//! The formation is an undirected, edge-weighted graph described by an
//! incidence matrix `D` (N vehicles x M edges, one `+1` head and one `-1` tail
//! per column). Vehicle `n` weighs the edges it is incident to with its own
//! weight vector `W_n`. Its formation error at a joint position `P` is the
//! quadratic form
//!
//! ```text
//! E_n = (P - P_r)^T (D ⊗ I3) diag(W_n ⊗ 1_3) (D ⊗ I3)^T (P - P_r)
//! ```
//!
//! which equals the weighted sum of squared deviations of every incident
//! inter-vehicle offset from its reference offset. Vehicles closer than the
//! safe distance plus both body radii make the error infeasible.

use nalgebra::{DMatrix, DVector};

use crate::cost::Cost;
use crate::error::{Error, Result, Violation};
use crate::game::Allocation;
use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct FormationGraph {
    incidence: Vec<Vec<i8>>,
    edge_weights: Vec<Vec<f64>>,
    references: Vec<Vec3>,
    /// Per-vehicle 3N x 3N matrices of the quadratic form; empty when the
    /// incidence and weight shapes are inconsistent.
    quad_forms: Vec<DMatrix<f64>>,
    reference_stack: DVector<f64>,
}

impl FormationGraph {
    /// Builds a graph from an N x M incidence matrix, N x M per-vehicle edge
    /// weights and N reference positions. Structural problems are reported by
    /// [`FormationGraph::violations`], not here.
    pub fn new(incidence: Vec<Vec<i8>>, edge_weights: Vec<Vec<f64>>, references: Vec<Vec3>) -> Self {
        let reference_stack = JointPosition::from_points(&references).stacked;
        let mut g = FormationGraph {
            incidence,
            edge_weights,
            references,
            quad_forms: Vec::new(),
            reference_stack,
        };
        if g.is_well_shaped() {
            let expanded = expand_incidence(&g);
            g.quad_forms = g
                .edge_weights
                .iter()
                .map(|w| {
                    let w_hat = DVector::from_iterator(
                        3 * w.len(),
                        w.iter().flat_map(|&mu| [mu, mu, mu]),
                    );
                    &expanded * DMatrix::from_diagonal(&w_hat) * expanded.transpose()
                })
                .collect();
        }
        g
    }

    pub fn vehicle_count(&self) -> usize {
        self.incidence.len()
    }

    pub fn edge_count(&self) -> usize {
        self.incidence.first().map_or(0, Vec::len)
    }

    pub fn incidence(&self) -> &[Vec<i8>] {
        &self.incidence
    }

    pub fn edge_weights(&self) -> &[Vec<f64>] {
        &self.edge_weights
    }

    pub fn references(&self) -> &[Vec3] {
        &self.references
    }

    fn is_well_shaped(&self) -> bool {
        let n = self.incidence.len();
        let m = self.edge_count();
        n > 0
            && m > 0
            && self.references.len() == n
            && self.edge_weights.len() == n
            && self.incidence.iter().all(|r| r.len() == m)
            && self.edge_weights.iter().all(|r| r.len() == m)
    }

    /// `(head, tail)` vehicle indices of edge `e`, when the column is a
    /// proper edge.
    pub fn edge_endpoints(&self, e: usize) -> Option<(usize, usize)> {
        let mut head = None;
        let mut tail = None;
        for (n, row) in self.incidence.iter().enumerate() {
            match row.get(e).copied()? {
                1 if head.is_none() => head = Some(n),
                -1 if tail.is_none() => tail = Some(n),
                0 => {}
                _ => return None,
            }
        }
        Some((head?, tail?))
    }

    /// The incidence matrix as a dense N x M matrix.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.vehicle_count(), self.edge_count(), |r, c| {
            f64::from(self.incidence[r][c])
        })
    }

    /// Structural problems, with field paths rooted at `graph`.
    pub fn violations(&self, vehicle_count: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.incidence.len();
        let m = self.edge_count();
        if n != vehicle_count {
            out.push(Violation::new(
                "graph.incidence",
                format!("has {n} rows, expected one per vehicle ({vehicle_count})"),
            ));
        }
        if m == 0 {
            out.push(Violation::new("graph.incidence", "graph has no edges"));
            return out;
        }
        if self.incidence.iter().any(|r| r.len() != m) {
            out.push(Violation::new("graph.incidence", "rows have unequal lengths"));
            return out;
        }
        if self.edge_weights.len() != n || self.edge_weights.iter().any(|r| r.len() != m) {
            out.push(Violation::new(
                "graph.edge_weights",
                format!("must be {n} x {m} like the incidence matrix"),
            ));
            return out;
        }
        if self.references.len() != n {
            out.push(Violation::new("graph.references", "one reference per vehicle required"));
        }

        let mut proper_edges = true;
        for e in 0..m {
            if self.edge_endpoints(e).is_none() {
                proper_edges = false;
                out.push(Violation::new(
                    format!("graph.incidence[*][{e}]"),
                    "column must hold exactly one +1 and one -1, zeros elsewhere",
                ));
            }
        }
        for (v, row) in self.edge_weights.iter().enumerate() {
            for (e, &mu) in row.iter().enumerate() {
                if !(mu >= 0.0 && mu.is_finite()) {
                    out.push(Violation::new(
                        format!("graph.edge_weights[{v}][{e}]"),
                        format!("must be finite and >= 0 (got {mu})"),
                    ));
                    continue;
                }
                let incident = self.incidence[v][e] != 0;
                if incident != (mu > 0.0) {
                    out.push(Violation::new(
                        format!("graph.edge_weights[{v}][{e}]"),
                        "weights must be nonzero exactly on edges incident to the vehicle",
                    ));
                }
            }
        }
        if proper_edges && !self.is_connected() {
            out.push(Violation::new("graph", "formation graph is not connected"));
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.vehicle_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.edge_count() {
            if let Some((h, t)) = self.edge_endpoints(e) {
                let (a, b) = (find(&mut parent, h), find(&mut parent, t));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }
}

/// Stacked 3N position vector; vehicle `n` occupies entries `3n..3n+3`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPosition {
    stacked: DVector<f64>,
}

impl JointPosition {
    pub fn from_points(points: &[Vec3]) -> Self {
        JointPosition {
            stacked: DVector::from_iterator(
                3 * points.len(),
                points.iter().flat_map(|p| [p.x, p.y, p.z]),
            ),
        }
    }

    pub fn vehicle_count(&self) -> usize {
        self.stacked.len() / 3
    }

    pub fn point(&self, n: usize) -> Vec3 {
        Vec3::new(
            self.stacked[3 * n],
            self.stacked[3 * n + 1],
            self.stacked[3 * n + 2],
        )
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.stacked
    }
}

/// `D ⊗ I3`, the incidence matrix lifted to 3D coordinates (3N x 3M).
pub fn expand_incidence(g: &FormationGraph) -> DMatrix<f64> {
    g.incidence_matrix().kronecker(&DMatrix::<f64>::identity(3, 3))
}

/// True when vehicle `n` is within `d_s + r_n + r_n'` of any other vehicle.
pub fn in_collision(p: &JointPosition, n: usize, d_s: f64, radii: &[f64]) -> bool {
    let pn = p.point(n);
    (0..p.vehicle_count())
        .filter(|&m| m != n)
        .any(|m| (pn - p.point(m)).norm() <= d_s + radii[n] + radii[m])
}

/// Formation error of vehicle `n` at one synchronized waypoint, evaluated as
/// the quadratic form, or the sentinel on inter-vehicle collision.
///
/// The graph must be valid for the number of vehicles in `p`.
pub fn formation_error_at(
    p: &JointPosition,
    g: &FormationGraph,
    n: usize,
    d_s: f64,
    radii: &[f64],
) -> Cost {
    if in_collision(p, n, d_s, radii) {
        return Cost::INFEASIBLE;
    }
    Cost::finite(quadratic_form(p, g, n))
}

fn quadratic_form(p: &JointPosition, g: &FormationGraph, n: usize) -> f64 {
    let q = &g.quad_forms[n];
    let x = &p.stacked - &g.reference_stack;
    (q * &x).dot(&x).max(0.0)
}

/// Direct edge-sum form of the formation error, without any matrices:
/// `sum_e mu_{n,e} * |P_head - P_tail - (R_head - R_tail)|^2`.
pub fn pairwise_error_oracle(p: &JointPosition, g: &FormationGraph, n: usize) -> f64 {
    let refs = g.references();
    (0..g.edge_count())
        .filter_map(|e| {
            let mu = g.edge_weights()[n][e];
            let (h, t) = g.edge_endpoints(e)?;
            let dev = p.point(h) - p.point(t) - (refs[h] - refs[t]);
            Some(mu * dev.norm_squared())
        })
        .sum()
}

/// Formation cost of vehicle `n` over the K free waypoints of an allocation
/// (the fixed start and goal points are excluded).
pub fn formation_cost(
    a: &Allocation,
    g: &FormationGraph,
    n: usize,
    d_s: f64,
    radii: &[f64],
) -> Result<Cost> {
    let len = a.waypoint_len()?;
    if a.strategies.len() != g.vehicle_count() || radii.len() != g.vehicle_count() {
        return Err(Error::Structure(format!(
            "allocation has {} paths, graph has {} vehicles, {} radii given",
            a.strategies.len(),
            g.vehicle_count(),
            radii.len()
        )));
    }
    let mut points = Vec::with_capacity(a.strategies.len());
    let mut total = Cost::ZERO;
    for k in 1..len - 1 {
        points.clear();
        points.extend(a.strategies.iter().map(|p| p.waypoints()[k]));
        total = total + formation_error_at(&JointPosition::from_points(&points), g, n, d_s, radii);
        if total.is_infeasible() {
            break;
        }
    }
    Ok(total)
}
