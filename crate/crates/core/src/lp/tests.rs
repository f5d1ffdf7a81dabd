use super::*;
use crate::geom::PointSet;
use crate::num::{int, ratio};
use crate::range_space::{canonical_ranges, explicit_ranges, RangeSpace};

fn row(coeffs: &[(usize, i64)], relation: Relation, rhs: Rational) -> Constraint {
    Constraint {
        name: RowName::Other("r".into()),
        coeffs: coeffs.iter().map(|&(j, a)| (j, int(a))).collect(),
        relation,
        rhs,
    }
}

fn lp(sense: Sense, objective: &[i64], rows: Vec<Constraint>) -> LpInstance {
    LpInstance {
        sense,
        objective: objective.iter().map(|&c| int(c)).collect(),
        rows,
        vars: (0..objective.len()).map(VarName::Point).collect(),
    }
}

fn both(lp: &LpInstance) -> [FractionalSolution; 2] {
    [solve_with(lp, Backend::DenseExact), solve_with(lp, Backend::Guided)]
}

fn triangle() -> RangeSpace {
    canonical_ranges(&PointSet::from_coords(vec![vec![int(0), int(0)], vec![int(4), int(0)], vec![int(1), int(3)]]).unwrap())
        .unwrap()
}

fn square() -> RangeSpace {
    canonical_ranges(
        &PointSet::from_coords(vec![
            vec![int(0), int(0)],
            vec![int(1), int(0)],
            vec![int(1), int(1)],
            vec![int(0), int(1)],
        ])
        .unwrap(),
    )
    .unwrap()
}

fn two_points() -> RangeSpace {
    canonical_ranges(&PointSet::from_coords(vec![vec![int(0), int(0)], vec![int(1), int(2)]]).unwrap()).unwrap()
}

#[test]
fn toy_programs() {
    let max = lp(Sense::Maximize, &[1], vec![row(&[(0, 1)], Relation::Le, int(2))]);
    for sol in both(&max) {
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.objective, int(2));
        assert!(max.verify(&sol));
    }
    let bad = lp(
        Sense::Minimize,
        &[1],
        vec![row(&[(0, 1)], Relation::Ge, int(2)), row(&[(0, 1)], Relation::Le, int(1))],
    );
    for sol in both(&bad) {
        assert_eq!(sol.status, Status::Infeasible);
        assert!(bad.verify(&sol));
    }
    let open = lp(Sense::Maximize, &[1, 1], vec![row(&[(0, 1), (1, -1)], Relation::Le, int(1))]);
    for sol in both(&open) {
        assert_eq!(sol.status, Status::Unbounded);
        assert!(open.verify(&sol));
    }
}

#[test]
fn equality_rows_and_negative_rhs() {
    // min x + 2y s.t. x - y = -1, x + y >= 3
    let p = lp(
        Sense::Minimize,
        &[1, 2],
        vec![row(&[(0, 1), (1, -1)], Relation::Eq, int(-1)), row(&[(0, 1), (1, 1)], Relation::Ge, int(3))],
    );
    for sol in both(&p) {
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.values, vec![int(1), int(2)]);
        assert_eq!(sol.objective, int(5));
        assert!(p.verify(&sol));
    }
}

#[test]
fn primal_shapes() {
    let lp = build_primal(&two_points(), &int(1)).unwrap();
    assert_eq!(lp.num_vars(), 1);
    let ranges = lp.rows.iter().filter(|r| matches!(r.name, RowName::Range(_))).count();
    let covers = lp.rows.iter().filter(|r| matches!(r.name, RowName::Cover(_))).count();
    assert_eq!((ranges, covers), (1, 2));
}

#[test]
fn triangle_primal() {
    let space = triangle();
    let lp = build_primal(&space, &int(1)).unwrap();
    for sol in both(&lp) {
        assert_eq!(sol.objective, ratio(3, 2));
        assert_eq!(sol.values, vec![ratio(1, 2); 3]);
        assert!(lp.verify(&sol));
    }
    let tight = build_primal(&space, &ratio(1, 2)).unwrap();
    for sol in both(&tight) {
        assert_eq!(sol.status, Status::Infeasible);
        assert!(tight.verify(&sol));
    }
}

#[test]
fn weighted_primal_examples() {
    let lp = build_weighted_primal(&two_points(), &int(1)).unwrap();
    assert_eq!(solve(&lp).values, vec![int(1)]);

    let space = square();
    let lp = build_weighted_primal(&space, &int(1)).unwrap();
    let sol = solve(&lp);
    assert!(lp.verify(&sol));
    for (j, v) in lp.vars.iter().enumerate() {
        let VarName::Edge(a, b) = *v else { unreachable!() };
        let side = (a + 1) % 4 == b || (b + 1) % 4 == a;
        assert_eq!(sol.values[j], if side { ratio(1, 2) } else { int(0) }, "edge {a}-{b}");
    }

    let tri = build_weighted_primal(&triangle(), &int(1)).unwrap();
    assert_eq!(solve(&tri).values, vec![ratio(1, 2); 3]);

    let abstract_space = explicit_ranges(3, &[vec![0]]).unwrap();
    assert!(matches!(build_weighted_primal(&abstract_space, &int(1)), Err(crate::Error::NotGeometric)));
}

#[test]
fn dual_examples() {
    let lp = build_dual(&two_points(), &int(1)).unwrap();
    assert_eq!(solve(&lp).objective, int(1));

    let space = triangle();
    let dual = build_dual(&space, &int(1)).unwrap();
    let mut all_ranges = vec![int(0); dual.num_vars()];
    for (j, v) in dual.vars.iter().enumerate() {
        if matches!(v, VarName::Range(_)) {
            all_ranges[j] = int(1);
        }
    }
    assert!(dual.is_feasible(&all_ranges));
    for sol in both(&dual) {
        assert_eq!(sol.objective, ratio(3, 2));
        assert!(dual.verify(&sol));
    }
}

#[test]
fn separation_examples() {
    assert_eq!(solve(&build_separation(&two_points()).unwrap()).objective, int(1));
    // Each side pair {0,1},{1,2},{2,3},{3,0} is split only by the two
    // axis-parallel cuts and the two single-corner cuts at its ends, which
    // forces total weight 2.
    let lp = build_separation(&square()).unwrap();
    for sol in both(&lp) {
        assert_eq!(sol.objective, int(2));
        assert!(lp.verify(&sol));
    }
}

#[test]
fn thresholds() {
    assert_eq!(min_feasible_t(&two_points(), Granularity::Exact).unwrap(), int(1));
    assert_eq!(min_feasible_t(&triangle(), Granularity::Exact).unwrap(), int(1));
    assert_eq!(min_feasible_t(&square(), Granularity::Exact).unwrap(), int(1));
    assert_eq!(min_feasible_t(&triangle(), Granularity::Integer).unwrap(), int(1));
}

#[test]
fn pair_indexing() {
    let n = 7;
    for (k, (a, b)) in pairs(n).into_iter().enumerate() {
        assert_eq!(pair_index(n, a, b), k);
        assert_eq!(pair_index(n, b, a), k);
    }
}

#[test]
fn export_lists_every_row() {
    let lp = build_primal(&triangle(), &ratio(3, 2)).unwrap();
    let text = export_text(&lp);
    assert!(text.starts_with("maximize\n  obj: 1 y_0_1 + 1 y_0_2 + 1 y_1_2\nsubject to\n"));
    assert!(text.contains("range_0: "));
    assert!(text.contains(" <= 3/2\n"));
    assert!(text.contains("cover_2: 1 y_0_2 + 1 y_1_2 >= 1\n"));
    assert!(text.ends_with("y_1_2 >= 0\nend\n"));
    assert_eq!(text.lines().filter(|l| l.contains(": ")).count(), 1 + lp.rows.len());
}
