use nlgame::analysis::expected_payoff;
use nlgame::model::deterministic_behavior;
use nlgame::par::Execution;
use nlgame::polytope::{
    enumerate_local_strategies, enumerate_ns_vertices, enumerate_ns_vertices_with, is_vertex,
    ns_constraints, standard_polytope_vertices, VertexClass, VertexOptions,
};
use nlgame::{presets, Behavior, Prior, QuadExt, Scenario};
use proptest::prelude::*;

#[test]
fn midpoints_of_vertices_are_not_vertices() {
    let s = Scenario::chsh();
    let list = enumerate_ns_vertices(&s).unwrap();
    let half = QuadExt::ratio(1, 2);
    for (i, u) in list.vertices.iter().enumerate() {
        assert!(is_vertex(&u.behavior, &s).unwrap());
        for v in &list.vertices[i + 1..] {
            let mid = u.behavior.mix(&v.behavior, &half).unwrap();
            assert!(!is_vertex(&mid, &s).unwrap());
        }
    }
}

#[test]
fn local_vertices_are_the_deterministic_behaviors() {
    for s in [
        Scenario::chsh(),
        Scenario::new(vec![3], vec![2, 2]).unwrap(),
    ] {
        let list = enumerate_ns_vertices(&s).unwrap();
        let mut local: Vec<Behavior> = list
            .vertices
            .iter()
            .filter(|v| v.classification == VertexClass::Local)
            .map(|v| v.behavior.clone())
            .collect();
        let mut expected: Vec<Behavior> = enumerate_local_strategies(&s)
            .iter()
            .map(|st| deterministic_behavior(&s, &st.alice, &st.bob).unwrap())
            .collect();
        local.sort_by(|a, b| a.entries().cmp(b.entries()));
        expected.sort_by(|a, b| a.entries().cmp(b.entries()));
        expected.dedup();
        assert_eq!(local, expected);
    }
}

#[test]
fn pr_box_is_the_only_vertex_winning_chsh_surely() {
    let s = Scenario::chsh();
    let prior = Prior::uniform(&s);
    let game = presets::chsh_game();
    let list = enumerate_ns_vertices(&s).unwrap();
    let winners: Vec<&Behavior> = list
        .vertices
        .iter()
        .map(|v| &v.behavior)
        .filter(|b| expected_payoff(&game, b, &prior).unwrap().0 == QuadExt::from(1))
        .collect();
    assert_eq!(winners, vec![&presets::pr_box()]);
}

#[test]
fn sequential_and_parallel_enumeration_agree() {
    let s = Scenario::chsh();
    let seq = enumerate_ns_vertices_with(
        &s,
        VertexOptions {
            execution: Execution::Sequential,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(seq, enumerate_ns_vertices(&s).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn insertion_order_does_not_change_the_vertices(order in Just((0..16).collect::<Vec<usize>>()).prop_shuffle()) {
        let system = ns_constraints(&Scenario::chsh());
        let (rows, rhs): (Vec<_>, Vec<_>) = system.equalities.iter().cloned().unzip();
        let natural: Vec<usize> = (0..16).collect();
        let reference = standard_polytope_vertices(&rows, &rhs, 16, &natural, Execution::Sequential).unwrap();
        let shuffled = standard_polytope_vertices(&rows, &rhs, 16, &order, Execution::Sequential).unwrap();
        prop_assert_eq!(reference.len(), 24);
        prop_assert_eq!(shuffled, reference);
    }
}

#[test]
fn vb_vertices() {
    let s = presets::vb_scenario();
    let list = enumerate_ns_vertices(&s).unwrap();
    assert_eq!(list.count(VertexClass::Local), 48);
    assert!(list
        .vertices
        .iter()
        .any(|v| v.behavior == presets::vb_ns_opt()));
    for v in &list.vertices {
        assert!(is_vertex(&v.behavior, &s).unwrap());
    }
    let system = ns_constraints(&s);
    let (rows, rhs): (Vec<_>, Vec<_>) = system.equalities.iter().cloned().unzip();
    let reversed: Vec<usize> = (0..s.num_coords()).rev().collect();
    let points = standard_polytope_vertices(
        &rows,
        &rhs,
        s.num_coords(),
        &reversed,
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(points.len(), list.vertices.len());
}
