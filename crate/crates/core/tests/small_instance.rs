mod common;

use common::oracle::{brute_force_optimum, exhaustive_optimum, run_case, small_instance};

#[test]
fn search_agrees_with_brute_force() {
    for seed in 0..200 {
        let inst = small_instance(seed);
        let search = exhaustive_optimum(&inst).map(|(c, _)| c);
        let brute = brute_force_optimum(&inst);
        match (search, brute) {
            (None, None) => {}
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "seed {seed}: {a} vs {b}"),
            other => panic!("seed {seed}: {other:?}"),
        }
    }
}

#[test]
fn optimum_path_is_feasible_and_costed_consistently() {
    for seed in 0..200 {
        let inst = small_instance(seed);
        if let Some((cost, path)) = exhaustive_optimum(&inst) {
            assert!(inst.feasible(&path), "seed {seed}");
            assert!((inst.cost(&path) - cost).abs() < 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn greedy_never_beats_the_optimum() {
    let mut delivered = 0;
    for seed in 0..200 {
        let case = run_case(seed);
        if !case.greedy_feasible {
            continue;
        }
        delivered += 1;
        let greedy = case.greedy_cost.unwrap();
        let best = case
            .oracle_cost
            .unwrap_or_else(|| panic!("seed {seed}: feasible greedy path but no optimum"));
        assert!(
            best <= greedy + 1e-9,
            "seed {seed}: optimum {best} > greedy {greedy}"
        );
    }
    assert!(delivered > 20, "only {delivered} greedy deliveries");
}

#[test]
fn single_hop_instance_hand_check() {
    // Two parked vehicles 50 m apart: the only path is the direct hop.
    let mut inst = small_instance(3);
    inst.topo.vehicles.truncate(2);
    inst.topo.vehicles[0].position = iov_core::Vec2::new(100.0, 100.0);
    inst.topo.vehicles[1].position = iov_core::Vec2::new(150.0, 100.0);
    inst.dst = iov_core::VehicleId(1);
    let (cost, path) = exhaustive_optimum(&inst).expect("direct hop is feasible");
    assert_eq!(path, vec![inst.src, inst.dst]);
    assert_eq!(cost, inst.edge_metric(inst.src, inst.dst));
    assert_eq!(brute_force_optimum(&inst), Some(cost));
}
