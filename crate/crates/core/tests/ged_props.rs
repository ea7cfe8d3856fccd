mod common;

use common::*;
use procbench::matching::compute_node_matching;
use procbench::quality_metrics::{
    ged_approx, ged_exact, ged_similarity, EditCostModel, EditOpKind,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn approx_dominates_exact(seed in any::<u64>(), sub in 0.5f64..3.0, edge in 0.5f64..3.0) {
        let mut r = rng(seed);
        let c = random_graph(&mut r, 0, 4);
        let g = random_partner(&mut r, &c, 4);
        let costs = EditCostModel { node_substitute: sub, edge_insert: edge, edge_delete: edge, ..EditCostModel::default() };
        let exact = ged_exact(&c, &g, &costs, 8).unwrap();
        let approx = ged_approx(&c, &g, &costs, &compute_node_matching(&c, &g, 0.5));
        prop_assert!(approx.distance >= exact.distance - 1e-9);
        prop_assert!(exact.exact && !approx.exact);
    }

    #[test]
    fn scripts_add_up(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_graph(&mut r, 0, 5);
        let g = random_partner(&mut r, &c, 5);
        let costs = EditCostModel::default();
        let exact = ged_exact(&c, &g, &costs, 12).unwrap();
        let total: f64 = exact.script.iter().map(|op| op.cost).sum();
        prop_assert!((total - exact.distance).abs() <= 1e-9);
        // Node counts reconcile: every gold node is inserted or the image of a kept node.
        let kept = c.node_count() - exact.count(EditOpKind::NodeDelete);
        prop_assert_eq!(kept + exact.count(EditOpKind::NodeInsert), g.node_count());
        let sim = ged_similarity(&exact, &c, &g, &costs);
        prop_assert!((0.0..=1.0).contains(&sim));
    }

    #[test]
    fn triangle_inequality_with_unit_costs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graph(&mut r, 0, 4);
        let b = random_partner(&mut r, &a, 4);
        let c = random_partner(&mut r, &b, 4);
        let costs = EditCostModel::default();
        let d = |x, y| ged_exact(x, y, &costs, 12).unwrap().distance;
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }
}
