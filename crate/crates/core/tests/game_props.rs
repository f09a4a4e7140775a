mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_costs, random_point};
use stagplan::formation::{formation_cost, FormationGraph};
use stagplan::game::{joint_cost, pareto_dominates, pareto_front, weakly_dominates, Allocation};
use stagplan::scenario::{builtin_scenario, BuiltinId, Scenario};
use stagplan::singlecost::single_cost;
use stagplan::{Cost, CostVector, Path};

fn le(a: Cost, b: Cost) -> bool {
    match (a.value(), b.value()) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

fn brute_pareto(a: &CostVector, b: &CostVector) -> bool {
    let mut all_le = true;
    let mut some_lt = false;
    for i in 0..a.len() {
        all_le &= le(a.costs[i], b.costs[i]);
        some_lt |= le(a.costs[i], b.costs[i]) && !le(b.costs[i], a.costs[i]);
    }
    all_le && some_lt
}

/// Random allocation near the straight chords, so formation costs are finite
/// but nonzero.
fn jittered(s: &Scenario, rng: &mut ChaCha8Rng, spread: f64) -> Allocation {
    Allocation::new(
        s.vehicles
            .iter()
            .map(|v| {
                let base = Path::straight(v.start, v.goal, s.waypoint_count);
                let wp = base.waypoints();
                let mut pts = wp.to_vec();
                for q in pts.iter_mut().take(wp.len() - 1).skip(1) {
                    let mut d = random_point(rng, spread);
                    d.z *= 0.2;
                    *q += d;
                }
                Path::new(pts).unwrap()
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weak_dominance_is_reflexive_and_transitive(seed in any::<u64>(), len in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_costs(&mut rng, len), random_costs(&mut rng, len), random_costs(&mut rng, len));
        prop_assert!(weakly_dominates(&a, &a).unwrap());
        if weakly_dominates(&a, &b).unwrap() && weakly_dominates(&b, &c).unwrap() {
            prop_assert!(weakly_dominates(&a, &c).unwrap());
        }
    }

    #[test]
    fn pareto_dominance_is_a_strict_order(seed in any::<u64>(), len in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_costs(&mut rng, len), random_costs(&mut rng, len), random_costs(&mut rng, len));
        prop_assert!(!pareto_dominates(&a, &a).unwrap());
        if pareto_dominates(&a, &b).unwrap() {
            prop_assert!(!pareto_dominates(&b, &a).unwrap());
        }
        if pareto_dominates(&a, &b).unwrap() && pareto_dominates(&b, &c).unwrap() {
            prop_assert!(pareto_dominates(&a, &c).unwrap());
        }
        prop_assert_eq!(pareto_dominates(&a, &b).unwrap(), brute_pareto(&a, &b));
    }

    #[test]
    fn front_matches_brute_force(seed in any::<u64>(), size in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set: Vec<(usize, CostVector)> = (0..size).map(|i| (i, random_costs(&mut rng, 3))).collect();
        let front: Vec<usize> = pareto_front(&set).unwrap().iter().map(|(i, _)| *i).collect();
        let expected: Vec<usize> = (0..size)
            .filter(|&i| !(0..size).any(|j| j != i && brute_pareto(&set[j].1, &set[i].1)))
            .collect();
        prop_assert_eq!(front, expected);
    }

    #[test]
    fn joint_cost_is_single_plus_weighted_formation(seed in any::<u64>(), spread in 0.0f64..4.0) {
        let s = builtin_scenario(BuiltinId::Scenario1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = jittered(&s, &mut rng, spread);
        let costs = joint_cost(&a, &s).unwrap();
        let radii = s.body_radii();
        for n in 0..3 {
            let single = single_cost(&a.strategies[n], &s, n);
            let formation = formation_cost(&a, &s.graph, n, s.safety.safe_distance, &radii).unwrap();
            let beta = s.vehicles[n].weights.beta;
            match (single.value(), formation.value()) {
                (Some(js), Some(jf)) => {
                    let expected = js + beta * jf;
                    let got = costs.costs[n].raw();
                    prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1.0), "{got} vs {expected}");
                }
                _ => prop_assert!(costs.costs[n].is_infeasible()),
            }
        }
    }

    #[test]
    fn relabelling_vehicles_permutes_costs(seed in any::<u64>()) {
        let s = builtin_scenario(BuiltinId::Scenario2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = jittered(&s, &mut rng, 2.0);
        let mut perm = [0, 1, 2];
        let shift = rng.gen_range(0..3);
        perm.rotate_left(shift);
        if rng.gen_bool(0.5) {
            perm.swap(0, 1);
        }

        let g = &s.graph;
        let graph = FormationGraph::new(
            perm.iter().map(|&i| g.incidence()[i].clone()).collect(),
            perm.iter().map(|&i| g.edge_weights()[i].clone()).collect(),
            perm.iter().map(|&i| g.references()[i]).collect(),
        );
        let permuted = Scenario {
            vehicles: perm.iter().map(|&i| s.vehicles[i]).collect(),
            graph,
            ..s.clone()
        }
        .validated()
        .unwrap();
        let pa = Allocation::new(perm.iter().map(|&i| a.strategies[i].clone()).collect());

        let original = joint_cost(&a, &s).unwrap();
        let relabelled = joint_cost(&pa, &permuted).unwrap();
        for (slot, &i) in perm.iter().enumerate() {
            let (x, y) = (original.costs[i], relabelled.costs[slot]);
            prop_assert_eq!(x.is_infeasible(), y.is_infeasible());
            if let (Some(x), Some(y)) = (x.value(), y.value()) {
                prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
            }
        }
    }
}

#[test]
fn zero_beta_reduces_to_single_cost() {
    let mut s = builtin_scenario(BuiltinId::Scenario1);
    for v in &mut s.vehicles {
        v.weights.beta = 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let a = jittered(&s, &mut rng, 6.0);
        let costs = joint_cost(&a, &s).unwrap();
        for n in 0..3 {
            assert_eq!(costs.costs[n], single_cost(&a.strategies[n], &s, n));
        }
    }
}

#[test]
fn sentinel_vectors_order_as_expected() {
    let inf = f64::INFINITY;
    let a = CostVector::from(vec![1.0, inf]);
    let b = CostVector::from(vec![2.0, inf]);
    assert!(pareto_dominates(&a, &b).unwrap());
    assert!(weakly_dominates(&b, &CostVector::from(vec![inf, inf])).unwrap());
    assert!(!pareto_dominates(&CostVector::from(vec![inf, inf]), &CostVector::from(vec![inf, inf])).unwrap());
}
