use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use crossing_forest::gen::{generate, Kind};
use crossing_forest::geom::{crossing_distance, side_of};
use crossing_forest::lp::{
    build_dual, build_primal, build_threshold, min_feasible_t, solve, solve_at_threshold, solve_with, Backend,
    Constraint, Granularity, LpInstance, Relation, RowName, Sense, Status, VarName,
};
use crossing_forest::num::{int, ratio, Rational};
use crossing_forest::pipeline::{build_tree, level_bound, Mode, Options};
use crossing_forest::rounding::{deterministic_planar_round, randomized_round, support_degrees};
use crossing_forest::verify::{brute_force_opt_tree, check_duality_certificate};
use crossing_forest::{
    canonical_ranges, crossing_number, explicit_ranges, restrict, Hyperplane, Point, PointSet, RangeSpace, Side,
};

fn planar(n: usize, seed: u64) -> (PointSet, RangeSpace) {
    let points = generate(Kind::Uniform, n, seed, 2).unwrap();
    let space = canonical_ranges(&points).unwrap();
    (points, space)
}

fn line(a: i64, b: i64, c: i64) -> Option<Hyperplane> {
    Hyperplane::new(vec![int(a), int(b)], ratio(c, 7)).ok()
}

fn point(id: usize, x: i64, y: i64) -> Point {
    Point::new(id, vec![ratio(x, 3), ratio(y, 5)])
}

fn edge_sets(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..n, 0..n), 0..12)
        .prop_map(|v| v.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn crossing_distance_triangle_inequality(
        coefs in prop::collection::vec((-9i64..10, -9i64..10, -30i64..30), 1..8),
        pts in prop::collection::vec((-20i64..20, -20i64..20), 3),
    ) {
        let lines: Vec<Hyperplane> = coefs.into_iter().filter_map(|(a, b, c)| line(a, b, c)).collect();
        let [p, q, r] = [0, 1, 2].map(|i| point(i, pts[i].0, pts[i].1));
        let d = |a: &Point, b: &Point| crossing_distance(&lines, a, b).unwrap().halves();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert_eq!(d(&p, &p), 2 * lines.iter().filter(|h| side_of(h, &p).unwrap() == Side::On).count() as u64);
    }

    #[test]
    fn canonical_ranges_are_complete(n in 2usize..9, seed in 0u64..1000, cuts in prop::collection::vec((-50i64..50, -50i64..50, -60i64..60), 20)) {
        let (points, space) = planar(n, seed);
        prop_assert!(space.len() <= n * (n - 1) + n);
        let stored: BTreeSet<Vec<usize>> = space.ranges().iter().map(|r| r.members.ones().collect()).collect();
        for (a, b, c) in cuts {
            // offsets are scaled into the unit square the points live in
            let Ok(h) = Hyperplane::new(vec![int(a), int(b)], ratio(c, 60)) else { continue };
            let sides: Vec<Side> = points.points().iter().map(|p| side_of(&h, p).unwrap()).collect();
            if sides.contains(&Side::On) {
                continue;
            }
            let mut inside = FixedBitSet::with_capacity(n);
            for (i, s) in sides.iter().enumerate() {
                if *s == sides[0] {
                    continue;
                }
                inside.insert(i);
            }
            let members: Vec<usize> = inside.ones().collect();
            if members.is_empty() {
                continue;
            }
            prop_assert!(stored.contains(&members), "{members:?} missing");
        }
    }

    #[test]
    fn crossing_number_is_subadditive(seed in 0u64..1000, f in edge_sets(7), g in edge_sets(7)) {
        let (_, space) = planar(7, seed);
        let union: Vec<(usize, usize)> = f.iter().chain(&g).copied().collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert!(crossing_number(&union, &space) <= crossing_number(&f, &space) + crossing_number(&g, &space));
    }

    #[test]
    fn restriction_composes(sets in prop::collection::vec(prop::collection::vec(0usize..8, 1..5), 1..8), x in prop::collection::btree_set(0usize..8, 2..8), pick in prop::collection::btree_set(0usize..8, 1..8)) {
        let space = explicit_ranges(8, &sets).unwrap();
        let x: Vec<usize> = x.into_iter().collect();
        let y: Vec<usize> = pick.into_iter().filter(|&i| i < x.len()).collect();
        prop_assume!(!y.is_empty());
        let composed: Vec<usize> = y.iter().map(|&i| x[i]).collect();
        let twice = restrict(&restrict(&space, &x).unwrap(), &y).unwrap();
        prop_assert_eq!(twice, restrict(&space, &composed).unwrap());
        prop_assert_eq!(restrict(&space, &(0..8).collect::<Vec<_>>()).unwrap(), space);
    }

    #[test]
    fn backends_agree(
        rows in prop::collection::vec((prop::collection::vec(-3i64..4, 4), 0u8..3, -4i64..6), 1..6),
        cost in prop::collection::vec(-3i64..4, 4),
        maximize in any::<bool>(),
    ) {
        let lp = LpInstance {
            sense: if maximize { Sense::Maximize } else { Sense::Minimize },
            objective: cost.into_iter().map(int).collect(),
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (a, rel, b))| Constraint {
                    name: RowName::Other(format!("r{i}")),
                    coeffs: a.into_iter().enumerate().filter(|(_, v)| *v != 0).map(|(j, v)| (j, int(v))).collect(),
                    relation: [Relation::Le, Relation::Ge, Relation::Eq][rel as usize],
                    rhs: int(b),
                })
                .collect(),
            vars: (0..4).map(VarName::Range).collect(),
        };
        let dense = solve_with(&lp, Backend::DenseExact);
        let guided = solve_with(&lp, Backend::Guided);
        prop_assert_eq!(dense.status, guided.status);
        prop_assert!(lp.verify(&dense));
        prop_assert!(lp.verify(&guided));
        if dense.status == Status::Optimal {
            prop_assert_eq!(&dense.objective, &guided.objective);
        }
        prop_assert_eq!(solve(&lp), solve(&lp));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn strong_duality_on_small_sets(n in 2usize..9, seed in 0u64..1000, extra in 0i64..3) {
        let (_, space) = planar(n, seed);
        let t = min_feasible_t(&space, Granularity::Exact).unwrap() + int(extra);
        let primal = solve(&build_primal(&space, &t).unwrap());
        let dual_lp = build_dual(&space, &t).unwrap();
        let dual = solve(&dual_lp);
        prop_assert!(check_duality_certificate(&space, &t, &primal, &dual));
        // the all-ranges point is dual feasible, so it bounds the optimum
        let mut z = vec![int(1); space.len()];
        z.extend(std::iter::repeat_n(int(0), n));
        prop_assert!(dual_lp.is_feasible(&z));
        prop_assert!(primal.objective <= dual_lp.objective_value(&z));
        let guided = solve_with(&dual_lp, Backend::Guided);
        prop_assert_eq!(guided.objective, dual.objective);
    }

    #[test]
    fn randomized_rounding_properties(n in 4usize..13, seed in 0u64..1000) {
        let (_, space) = planar(n, seed);
        let solved = solve_at_threshold(&space, false).unwrap();
        let t = crossing_forest::num::to_f64(&solved.t);
        let ln = (n as f64).ln();
        let bound = t + (3.0 * t).max(8.0 * ln / ln.ln().max(f64::MIN_POSITIVE));
        let forced: Vec<(usize, usize)> = crossing_forest::lp::pairs(n)
            .into_iter()
            .zip(&solved.solution.values)
            .filter(|(_, y)| **y >= int(1))
            .map(|(e, _)| e)
            .collect();
        for s in 0..20 {
            let f = randomized_round(&solved.solution, &space, seed * 100 + s).unwrap();
            prop_assert!(forced.iter().all(|e| f.edges.contains(e)));
            prop_assert!((crossing_number(&f.edges, &space) as f64) <= bound);
        }
    }

    #[test]
    fn planar_rounding_properties(n in 3usize..13, seed in 0u64..1000) {
        let (points, space) = planar(n, seed);
        let solved = solve_at_threshold(&space, true).unwrap();
        let degrees = support_degrees(&solved.solution, n).unwrap();
        prop_assert!(degrees.iter().all(|&d| d >= 1));
        prop_assert!(2 * degrees.iter().filter(|&&d| d <= 12).count() >= n);
        let f = deterministic_planar_round(&solved.solution, &points, &space).unwrap();
        for (p, &d) in degrees.iter().enumerate() {
            if d <= 12 {
                prop_assert!(f.edges.iter().any(|&(a, b)| a == p || b == p), "point {p} uncovered");
            }
        }
    }

    #[test]
    fn pipeline_invariants(n in 2usize..14, seed in 0u64..1000, planar_mode in any::<bool>()) {
        let (_, space) = planar(n, seed);
        let mode = if planar_mode { Mode::DeterministicPlanar } else { Mode::Randomized };
        let opts = Options { mode, seed, ..Options::default() };
        let run = build_tree(&space, &opts).unwrap();
        let sum: usize = run.traces.iter().map(|l| l.crossing).sum();
        let union: Vec<(usize, usize)> =
            run.traces.iter().flat_map(|l| l.edges.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert!(sum >= crossing_number(&union, &space));
        prop_assert!(crossing_number(&union, &space) >= run.report.total_crossing);
        prop_assert!(run.traces.len() <= level_bound(n));
        prop_assert_eq!(run.tree.edges.len(), n - 1);
        let again = build_tree(&space, &opts).unwrap();
        let strip = |r: &crossing_forest::pipeline::RunReport| {
            let mut v = serde_json::to_value(r).unwrap();
            v.as_object_mut().unwrap().remove("timings_ms");
            v.to_string()
        };
        prop_assert_eq!(strip(&run.report), strip(&again.report));
    }

    #[test]
    fn restricted_thresholds_stay_within_twice_the_optimum(n in 3usize..7, seed in 0u64..1000) {
        let (_, space) = planar(n, seed);
        let t_opt = brute_force_opt_tree(&space).unwrap().t_opt as i64;
        let t_star = min_feasible_t(&space, Granularity::Exact).unwrap();
        prop_assert!(t_star <= int(t_opt));
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub = restrict(&space, &subset).unwrap();
            if subset.len() >= 2 {
                prop_assert!(min_feasible_t(&sub, Granularity::Exact).unwrap() <= int(2 * t_opt));
            }
            prop_assert!(brute_force_opt_tree(&sub).unwrap().t_opt as i64 <= 2 * t_opt);
        }
    }
}

#[test]
fn threshold_program_matches_integer_search() {
    for seed in 0..5 {
        let (_, space) = planar(7, seed);
        let exact = min_feasible_t(&space, Granularity::Exact).unwrap();
        let integer = min_feasible_t(&space, Granularity::Integer).unwrap();
        assert!(exact <= integer && integer < exact.clone() + int(1), "{exact} vs {integer}");
        assert_eq!(solve(&build_threshold(&space).unwrap()).objective, exact);
    }
}

#[test]
fn side_of_is_exact() {
    let h = Hyperplane::new(vec![int(1), int(1)], Rational::new(1.into(), 3.into())).unwrap();
    let on = Point::new(0, vec![ratio(1, 6), ratio(1, 6)]);
    let tiny = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(40));
    let above = Point::new(1, vec![ratio(1, 6), ratio(1, 6) + tiny]);
    assert_eq!(side_of(&h, &on).unwrap(), Side::On);
    assert_eq!(side_of(&h, &above).unwrap(), Side::Positive);
    assert_eq!(side_of(&h.negated(), &above).unwrap(), Side::Negative);
}
