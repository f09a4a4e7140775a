//! Spherical-vector particle swarm optimization.
//!
//! A candidate path is encoded as K spherical increments `(r, elevation,
//! azimuth)`. Decoding walks from the start point, adding one increment per
//! free waypoint, and appends the fixed goal. Searching over magnitudes and
//! angles instead of raw coordinates lines the search dimensions up with
//! speed, climb and heading of the vehicle.

use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scenario::{Scenario, Workspace};
use crate::singlecost::Path;

/// Flat `[r_0, elev_0, azim_0, r_1, ...]` storage of K spherical increments.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalVector {
    values: Vec<f64>,
}

impl SphericalVector {
    pub fn from_flat(values: Vec<f64>) -> Self {
        assert!(values.len().is_multiple_of(3), "spherical vectors hold triples");
        SphericalVector { values }
    }

    pub fn from_components(components: &[(f64, f64, f64)]) -> Self {
        SphericalVector {
            values: components.iter().flat_map(|&(r, e, a)| [r, e, a]).collect(),
        }
    }

    pub fn waypoint_count(&self) -> usize {
        self.values.len() / 3
    }

    /// `(r, elevation, azimuth)` of increment `k`.
    pub fn component(&self, k: usize) -> (f64, f64, f64) {
        (self.values[3 * k], self.values[3 * k + 1], self.values[3 * k + 2])
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.chunks_exact(3).map(|c| (c[0], c[1], c[2]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }
}

/// Per-dimension box for the search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBounds {
    /// `k` increments with `r in [0, r_max]` and the given elevation and
    /// azimuth intervals.
    pub fn new(k: usize, r_max: f64, elevation: (f64, f64), azimuth: (f64, f64)) -> Self {
        let lower = (0..k).flat_map(|_| [0.0, elevation.0, azimuth.0]).collect();
        let upper = (0..k).flat_map(|_| [r_max, elevation.1, azimuth.1]).collect();
        SearchBounds { lower, upper }
    }

    /// Bounds for a vehicle flying `start` to `goal`: azimuths are centred on
    /// the chord heading.
    pub fn for_endpoints(
        start: Vec3,
        goal: Vec3,
        k: usize,
        workspace: &Workspace,
        cfg: &PsoConfig,
    ) -> Self {
        let r_max = cfg.r_max.unwrap_or_else(|| default_r_max(workspace, k));
        let elev = cfg.elevation_limit.min(FRAC_PI_2);
        let azimuth = if cfg.azimuth_half_width >= PI {
            (-PI, PI)
        } else {
            let heading = (goal.y - start.y).atan2(goal.x - start.x);
            (heading - cfg.azimuth_half_width, heading + cfg.azimuth_half_width)
        };
        SearchBounds::new(k, r_max, (-elev, elev), azimuth)
    }

    pub fn for_vehicle(s: &Scenario, n: usize, cfg: &PsoConfig) -> Self {
        let v = &s.vehicles[n];
        Self::for_endpoints(v.start, v.goal, s.waypoint_count, &s.workspace, cfg)
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, v: &SphericalVector) -> bool {
        v.dims() == self.dims()
            && v.values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| (*lo..=*hi).contains(x))
    }

    pub fn clamp(&self, v: &SphericalVector) -> SphericalVector {
        SphericalVector {
            values: v
                .values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .map(|(x, (lo, hi))| x.clamp(*lo, *hi))
                .collect(),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SphericalVector {
        SphericalVector {
            values: self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| if lo < hi { rng.gen_range(*lo..=*hi) } else { *lo })
                .collect(),
        }
    }
}

/// Twice the workspace diagonal spread over the K+1 segments.
pub fn default_r_max(w: &Workspace, k: usize) -> f64 {
    2.0 * w.diagonal() / (k + 1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: SphericalVector,
    pub velocity: Vec<f64>,
    pub personal_best: SphericalVector,
    pub personal_best_cost: Cost,
}

impl Particle {
    pub fn at_rest(position: SphericalVector) -> Self {
        Particle {
            velocity: vec![0.0; position.dims()],
            personal_best: position.clone(),
            position,
            personal_best_cost: Cost::INFEASIBLE,
        }
    }

    /// Records `position` as the personal best when `cost` is strictly lower.
    pub fn observe(&mut self, cost: Cost) {
        if cost < self.personal_best_cost {
            self.personal_best = self.position.clone();
            self.personal_best_cost = cost;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    /// Initial inertia weight.
    pub c0: f64,
    /// Inertia multiplier applied once per iteration.
    pub inertia_decay: f64,
    /// Self confidence.
    pub c1: f64,
    /// Swarm confidence.
    pub c2: f64,
    pub n_pop: usize,
    pub max_it: usize,
    /// Largest increment magnitude; `None` uses [`default_r_max`].
    pub r_max: Option<f64>,
    /// Per-dimension speed cap as a fraction of the dimension's range.
    pub velocity_limit: f64,
    /// Elevation search interval is `[-elevation_limit, elevation_limit]`.
    pub elevation_limit: f64,
    /// Azimuth search interval half-width around the start-goal heading;
    /// `>= pi` searches every heading.
    pub azimuth_half_width: f64,
    /// Game planner only: every player's swarm replays the same random
    /// stream, so particle `i` moves alike in every swarm.
    pub shared_draws: bool,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            c0: 0.9,
            inertia_decay: 0.999,
            c1: 1.5,
            c2: 1.5,
            n_pop: 500,
            max_it: 300,
            r_max: None,
            velocity_limit: 0.5,
            elevation_limit: PI / 10.0,
            azimuth_half_width: FRAC_PI_2,
            shared_draws: true,
            seed: 0,
        }
    }
}

impl PsoConfig {
    /// The full-size budget: 2000 particles for 1500 iterations.
    pub fn paper_budget() -> Self {
        PsoConfig {
            n_pop: 2000,
            max_it: 1500,
            ..PsoConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.c0 > 0.0 && self.c0 <= 1.0) {
            problems.push(format!("c0 must lie in (0, 1] (got {})", self.c0));
        }
        if !(self.inertia_decay > 0.0 && self.inertia_decay <= 1.0) {
            problems.push(format!(
                "inertia_decay must lie in (0, 1] (got {})",
                self.inertia_decay
            ));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            problems.push("c1 and c2 must be >= 0".to_string());
        }
        if self.n_pop < 1 {
            problems.push("n_pop must be >= 1".to_string());
        }
        if self.max_it < 1 {
            problems.push("max_it must be >= 1".to_string());
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                problems.push(format!("r_max must be > 0 (got {r})"));
            }
        }
        if !(self.velocity_limit > 0.0) {
            problems.push("velocity_limit must be > 0".to_string());
        }
        if !(self.elevation_limit >= 0.0 && self.azimuth_half_width >= 0.0) {
            problems.push("angle limits must be >= 0".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Update coefficients for iteration `it` (0-based).
    pub fn dynamics_at(&self, it: usize) -> Dynamics {
        Dynamics {
            inertia: self.c0 * self.inertia_decay.powi(it as i32),
            c1: self.c1,
            c2: self.c2,
            velocity_limit: self.velocity_limit,
        }
    }
}

/// Coefficients of one velocity/position update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    pub velocity_limit: f64,
}

/// Decodes spherical increments into a path from `start` to `goal`. Each
/// free waypoint's xy-coordinates are clamped to the workspace before the
/// next increment is applied.
pub fn spherical_to_path(v: &SphericalVector, start: Vec3, goal: Vec3, w: &Workspace) -> Path {
    let mut waypoints = Vec::with_capacity(v.waypoint_count() + 2);
    waypoints.push(start);
    let mut cur = start;
    for (r, elev, azim) in v.components() {
        let (se, ce) = elev.sin_cos();
        let (sa, ca) = azim.sin_cos();
        cur = w.clamp_xy(cur + Vec3::new(r * ce * ca, r * ce * sa, r * se));
        waypoints.push(cur);
    }
    waypoints.push(goal);
    Path::new(waypoints).expect("decoded paths hold at least start, one waypoint and goal")
}

/// Spherical increments between consecutive waypoints, excluding the final
/// leg into the goal.
pub fn path_to_spherical(p: &Path) -> SphericalVector {
    let wp = p.waypoints();
    let comps: Vec<(f64, f64, f64)> = wp[..wp.len() - 1]
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let r = d.norm();
            if r == 0.0 {
                return (0.0, 0.0, 0.0);
            }
            let elev = (d.z / r).clamp(-1.0, 1.0).asin();
            let azim = if d.x == 0.0 && d.y == 0.0 {
                0.0
            } else {
                d.y.atan2(d.x)
            };
            (r, elev, azim)
        })
        .collect();
    SphericalVector::from_components(&comps)
}

/// One velocity/position update. `draw` supplies uniform `[0, 1)` values,
/// two per dimension (self term first). Positions leaving the bounds are
/// clamped and the velocity of every clamped dimension is zeroed.
pub fn update_particle(
    p: &Particle,
    global_best: &SphericalVector,
    bounds: &SearchBounds,
    dynamics: Dynamics,
    mut draw: impl FnMut() -> f64,
) -> Particle {
    let dims = p.position.dims();
    let mut position = Vec::with_capacity(dims);
    let mut velocity = Vec::with_capacity(dims);
    for d in 0..dims {
        let x = p.position.values[d];
        let (r1, r2) = (draw(), draw());
        let vmax = dynamics.velocity_limit * (bounds.upper[d] - bounds.lower[d]);
        let mut v = dynamics.inertia * p.velocity[d]
            + dynamics.c1 * r1 * (p.personal_best.values[d] - x)
            + dynamics.c2 * r2 * (global_best.values[d] - x);
        v = v.clamp(-vmax, vmax);
        let mut nx = x + v;
        if nx < bounds.lower[d] || nx > bounds.upper[d] {
            nx = nx.clamp(bounds.lower[d], bounds.upper[d]);
            v = 0.0;
        }
        position.push(nx);
        velocity.push(v);
    }
    Particle {
        position: SphericalVector { values: position },
        velocity,
        personal_best: p.personal_best.clone(),
        personal_best_cost: p.personal_best_cost,
    }
}

/// Straight start-goal chord expressed as spherical increments.
pub fn chord_seed(start: Vec3, goal: Vec3, k: usize) -> SphericalVector {
    path_to_spherical(&Path::straight(start, goal, k))
}

/// `n_pop` particles at rest; the first is the straight chord, the rest are
/// uniform over `bounds`.
pub fn init_particles<R: Rng + ?Sized>(
    start: Vec3,
    goal: Vec3,
    bounds: &SearchBounds,
    n_pop: usize,
    rng: &mut R,
) -> Vec<Particle> {
    let k = bounds.dims() / 3;
    let anchor = bounds.clamp(&chord_seed(start, goal, k));
    std::iter::once(anchor)
        .chain((1..n_pop).map(|_| bounds.sample(rng)))
        .map(Particle::at_rest)
        .collect()
}

/// Initial swarm for vehicle `n`.
pub fn init_swarm<R: Rng + ?Sized>(
    s: &Scenario,
    n: usize,
    cfg: &PsoConfig,
    rng: &mut R,
) -> Vec<Particle> {
    let v = &s.vehicles[n];
    init_particles(v.start, v.goal, &SearchBounds::for_vehicle(s, n, cfg), cfg.n_pop, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{builtin_scenario, BuiltinId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn open_space() -> Workspace {
        Workspace {
            x_min: -100.0,
            x_max: 100.0,
            y_min: -100.0,
            y_max: 100.0,
            z_min: 0.0,
            z_max: 100.0,
        }
    }

    #[test]
    fn zero_increments_stay_at_start() {
        let v = SphericalVector::from_components(&[(0.0, 0.3, 1.0); 4]);
        let start = Vec3::new(1.0, 2.0, 3.0);
        let p = spherical_to_path(&v, start, Vec3::new(9.0, 9.0, 9.0), &open_space());
        assert_eq!(p.len(), 6);
        assert!(p.waypoints()[1..5].iter().all(|w| *w == start));
    }

    #[test]
    fn unit_steps() {
        let ws = open_space();
        let goal = Vec3::new(5.0, 0.0, 0.0);
        let x = spherical_to_path(
            &SphericalVector::from_components(&[(1.0, 0.0, 0.0)]),
            Vec3::zeros(),
            goal,
            &ws,
        );
        assert_eq!(x.waypoints()[1], Vec3::new(1.0, 0.0, 0.0));
        let up = spherical_to_path(
            &SphericalVector::from_components(&[(1.0, FRAC_PI_2, 0.0)]),
            Vec3::zeros(),
            goal,
            &ws,
        );
        let w = up.waypoints()[1];
        assert!(w.x.abs() < 1e-15 && w.y.abs() < 1e-15 && (w.z - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoder_clamps_xy() {
        let ws = builtin_scenario(BuiltinId::Scenario1).workspace;
        let v = SphericalVector::from_components(&[(50.0, 0.0, PI)]);
        let p = spherical_to_path(&v, Vec3::new(10.0, 10.0, 20.0), Vec3::new(80.0, 80.0, 20.0), &ws);
        assert!((p.waypoints()[1] - Vec3::new(0.0, 10.0, 20.0)).norm() < 1e-12);
        assert_eq!(p.waypoints()[1].x, 0.0);
    }

    #[test]
    fn inverse_examples() {
        let p = Path::new((0..5).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect()).unwrap();
        let v = path_to_spherical(&p);
        assert_eq!(v.waypoint_count(), 3);
        assert!(v.components().all(|c| c == (1.0, 0.0, 0.0)));

        let p = Path::new(vec![Vec3::zeros(), Vec3::zeros(), Vec3::x()]).unwrap();
        assert_eq!(path_to_spherical(&p).component(0), (0.0, 0.0, 0.0));
    }

    fn unbounded(dims_k: usize) -> SearchBounds {
        SearchBounds::new(dims_k, 100.0, (-FRAC_PI_2, FRAC_PI_2), (-PI, PI))
    }

    #[test]
    fn fixed_point() {
        let pos = SphericalVector::from_components(&[(3.0, 0.1, -0.4), (2.0, 0.0, 1.0)]);
        let p = Particle::at_rest(pos.clone());
        let dynamics = PsoConfig::default().dynamics_at(0);
        let next = update_particle(&p, &pos, &unbounded(2), dynamics, || 0.73);
        assert_eq!(next, p);
    }

    #[test]
    fn pure_inertia() {
        let pos = SphericalVector::from_components(&[(10.0, 0.1, 0.2)]);
        let mut p = Particle::at_rest(pos.clone());
        p.velocity = vec![1.0, 0.05, -0.1];
        let dynamics = Dynamics {
            inertia: 0.5,
            c1: 0.0,
            c2: 0.0,
            velocity_limit: 0.5,
        };
        let next = update_particle(&p, &pos, &unbounded(1), dynamics, || 0.9);
        let expected = [10.5, 0.125, 0.15];
        for (x, e) in next.position.as_slice().iter().zip(expected) {
            assert!((x - e).abs() < 1e-15);
        }
        assert_eq!(next.velocity, vec![0.5, 0.025, -0.05]);
    }

    #[test]
    fn hand_trace() {
        let mut p = Particle::at_rest(SphericalVector::from_flat(vec![0.0, 0.0, 0.0]));
        p.velocity = vec![1.0, 0.0, 0.0];
        p.personal_best = SphericalVector::from_flat(vec![2.0, 0.0, 0.0]);
        let gb = SphericalVector::from_flat(vec![4.0, 0.0, 0.0]);
        let dynamics = Dynamics {
            inertia: 0.5,
            c1: 1.0,
            c2: 1.0,
            velocity_limit: 0.5,
        };
        let next = update_particle(&p, &gb, &unbounded(1), dynamics, || 0.5);
        assert_eq!(next.velocity[0], 3.5);
        assert_eq!(next.position.as_slice()[0], 3.5);
    }

    #[test]
    fn clamped_dimension_loses_velocity() {
        let bounds = SearchBounds::new(1, 5.0, (-0.5, 0.5), (-1.0, 1.0));
        let mut p = Particle::at_rest(SphericalVector::from_flat(vec![4.5, 0.0, 0.0]));
        p.velocity = vec![2.0, 0.0, 0.0];
        let dynamics = Dynamics {
            inertia: 1.0,
            c1: 0.0,
            c2: 0.0,
            velocity_limit: 1.0,
        };
        let next = update_particle(&p, &p.position.clone(), &bounds, dynamics, || 0.0);
        assert_eq!(next.position.as_slice()[0], 5.0);
        assert_eq!(next.velocity[0], 0.0);
    }

    #[test]
    fn velocity_is_capped() {
        let bounds = SearchBounds::new(1, 10.0, (-1.0, 1.0), (-1.0, 1.0));
        let p = Particle::at_rest(SphericalVector::from_flat(vec![0.0, 0.0, 0.0]));
        let gb = SphericalVector::from_flat(vec![10.0, 0.0, 0.0]);
        let dynamics = Dynamics {
            inertia: 1.0,
            c1: 0.0,
            c2: 2.0,
            velocity_limit: 0.5,
        };
        let next = update_particle(&p, &gb, &bounds, dynamics, || 1.0);
        assert_eq!(next.velocity[0], 5.0);
    }

    #[test]
    fn single_particle_is_chord() {
        let s = builtin_scenario(BuiltinId::Scenario1);
        let cfg = PsoConfig {
            n_pop: 1,
            ..PsoConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let swarm = init_swarm(&s, 1, &cfg, &mut rng);
        assert_eq!(swarm.len(), 1);
        let v = &s.vehicles[1];
        let decoded = spherical_to_path(&swarm[0].position, v.start, v.goal, &s.workspace);
        let chord = Path::straight(v.start, v.goal, s.waypoint_count);
        for (a, b) in decoded.waypoints().iter().zip(chord.waypoints()) {
            assert!((a - b).norm() < 1e-9);
        }
        assert!(swarm[0].velocity.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn init_is_seed_deterministic() {
        let s = builtin_scenario(BuiltinId::Scenario2);
        let cfg = PsoConfig {
            n_pop: 50,
            ..PsoConfig::default()
        };
        let a = init_swarm(&s, 0, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = init_swarm(&s, 0, &cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_components_within_bounds() {
        let s = builtin_scenario(BuiltinId::Scenario1);
        let cfg = PsoConfig::default();
        let bounds = SearchBounds::for_vehicle(&s, 0, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // 10^5 sampled components
        let draws = 100_000 / s.waypoint_count;
        for _ in 0..draws {
            assert!(bounds.contains(&bounds.sample(&mut rng)));
        }
    }

    #[test]
    fn config_validation() {
        assert!(PsoConfig::default().validate().is_ok());
        let bad = PsoConfig {
            c0: 1.5,
            n_pop: 0,
            ..PsoConfig::default()
        };
        let Err(Error::Config(msg)) = bad.validate() else {
            panic!("expected config error")
        };
        assert!(msg.contains("c0") && msg.contains("n_pop"));
    }

    #[test]
    fn inertia_schedule() {
        let cfg = PsoConfig::default();
        assert_eq!(cfg.dynamics_at(0).inertia, 0.9);
        assert!((cfg.dynamics_at(2).inertia - 0.9 * 0.999 * 0.999).abs() < 1e-15);
    }
}
