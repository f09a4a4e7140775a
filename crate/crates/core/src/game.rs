//! Players, joint strategies and the dominance relations used to pick a
//! payoff-dominant allocation. Everything is phrased in costs, so "better"
//! means smaller.

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::formation::formation_cost;
use crate::scenario::Scenario;
use crate::singlecost::{single_cost, Path};

/// One strategy (path) per player.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub strategies: Vec<Path>,
}

impl Allocation {
    pub fn new(strategies: Vec<Path>) -> Self {
        Allocation { strategies }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Shared waypoint count of all strategies.
    pub fn waypoint_len(&self) -> Result<usize> {
        let first = self
            .strategies
            .first()
            .ok_or_else(|| Error::Structure("empty allocation".into()))?
            .len();
        if self.strategies.iter().any(|p| p.len() != first) {
            return Err(Error::Structure(
                "strategies have different waypoint counts".into(),
            ));
        }
        Ok(first)
    }
}

/// Per-player costs; `costs[n]` belongs to player `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostVector {
    pub costs: Vec<Cost>,
}

impl CostVector {
    pub fn new(costs: Vec<Cost>) -> Self {
        CostVector { costs }
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.costs.iter().all(|c| c.is_finite())
    }

    pub fn total(&self) -> Cost {
        self.costs.iter().copied().sum()
    }
}

impl From<Vec<f64>> for CostVector {
    fn from(v: Vec<f64>) -> Self {
        CostVector::new(v.into_iter().map(Cost::finite).collect())
    }
}

fn check_structure(a: &Allocation, s: &Scenario) -> Result<()> {
    if a.len() != s.vehicle_count() {
        return Err(Error::Structure(format!(
            "allocation has {} strategies for {} vehicles",
            a.len(),
            s.vehicle_count()
        )));
    }
    let len = a.waypoint_len()?;
    if len != s.waypoint_count + 2 {
        return Err(Error::Structure(format!(
            "paths have {len} waypoints, scenario expects {}",
            s.waypoint_count + 2
        )));
    }
    for (n, (p, v)) in a.strategies.iter().zip(&s.vehicles).enumerate() {
        if p.start() != v.start || p.goal() != v.goal {
            return Err(Error::Structure(format!(
                "strategy {n} does not connect vehicle {n}'s start and goal"
            )));
        }
    }
    Ok(())
}

/// Player `n`'s cost: single cost plus `beta_n` times its formation cost.
pub fn player_cost(a: &Allocation, s: &Scenario, n: usize, radii: &[f64]) -> Cost {
    let single = single_cost(&a.strategies[n], s, n);
    if single.is_infeasible() {
        return single;
    }
    let beta = s.vehicles[n].weights.beta;
    if beta == 0.0 {
        return single;
    }
    let formation = formation_cost(a, &s.graph, n, s.safety.safe_distance, radii)
        .expect("allocation structure checked by caller");
    single + formation.weighted(beta)
}

/// Cost of every player under allocation `a`.
pub fn joint_cost(a: &Allocation, s: &Scenario) -> Result<CostVector> {
    check_structure(a, s)?;
    let radii = s.body_radii();
    Ok(CostVector::new(
        (0..a.len()).map(|n| player_cost(a, s, n, &radii)).collect(),
    ))
}

fn check_lengths(a: &CostVector, b: &CostVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Structure(format!(
            "cost vectors of length {} and {} are not comparable",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// No player is worse off under `a` than under `b`.
pub fn weakly_dominates(a: &CostVector, b: &CostVector) -> Result<bool> {
    check_lengths(a, b)?;
    Ok(a.costs.iter().zip(&b.costs).all(|(x, y)| x <= y))
}

/// `a` weakly dominates `b` and some player is strictly better off.
pub fn pareto_dominates(a: &CostVector, b: &CostVector) -> Result<bool> {
    check_lengths(a, b)?;
    Ok(weakly_dominates(a, b)? && a.costs.iter().zip(&b.costs).any(|(x, y)| x < y))
}

/// Members of `set` not Pareto-dominated by any other member, in input order.
pub fn pareto_front<T>(set: &[(T, CostVector)]) -> Result<Vec<&(T, CostVector)>> {
    if set.is_empty() {
        return Err(Error::Structure("pareto front of an empty set".into()));
    }
    let mut front = Vec::new();
    for (i, cand) in set.iter().enumerate() {
        let mut dominated = false;
        for (j, other) in set.iter().enumerate() {
            if i != j && pareto_dominates(&other.1, &cand.1)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            front.push(cand);
        }
    }
    Ok(front)
}
