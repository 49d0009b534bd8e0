use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

fn solve_default(p: &Problem) -> LpSolution {
    solve(p, &SolveOptions::default()).expect("solver error")
}

#[test]
fn single_lower_bound_row() {
    let mut b = ProblemBuilder::new();
    let x = b.add_col(1.0, -INF, INF);
    b.add_row(3.0, INF, &[(x, 1.0)]);
    let s = solve_default(&b.build());
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.x[0] - 3.0).abs() < 1e-12);
    assert!((s.row_duals[0] - 1.0).abs() < 1e-12);
    assert!((s.objective - 3.0).abs() < 1e-12);
}

#[test]
fn transport_problem_matches_hand_solution() {
    // Two plants (cap 30 at $1, 50 at $3) serve one market of 40 over a
    // link limited to 25 from the cheap plant.
    let mut b = ProblemBuilder::new();
    let cheap = b.add_col(1.0, 0.0, 30.0);
    let dear = b.add_col(3.0, 0.0, 50.0);
    let demand = b.add_row(40.0, 40.0, &[(cheap, 1.0), (dear, 1.0)]);
    let link = b.add_row(-INF, 25.0, &[(cheap, 1.0)]);
    let s = solve_default(&b.build());
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.x[cheap] - 25.0).abs() < 1e-9);
    assert!((s.x[dear] - 15.0).abs() < 1e-9);
    assert!((s.objective - 70.0).abs() < 1e-9);
    assert!((s.row_duals[demand] - 3.0).abs() < 1e-9);
    assert!((s.row_duals[link] + 2.0).abs() < 1e-9);
}

#[test]
fn detects_infeasible_and_unbounded() {
    let mut b = ProblemBuilder::new();
    let x = b.add_col(1.0, 0.0, 1.0);
    b.add_row(2.0, INF, &[(x, 1.0)]);
    assert_eq!(solve_default(&b.build()).status, LpStatus::Infeasible);

    let mut b = ProblemBuilder::new();
    let x = b.add_col(-1.0, 0.0, INF);
    let y = b.add_col(0.0, 0.0, INF);
    b.add_row(-INF, 1.0, &[(x, 1.0), (y, -1.0)]);
    assert_eq!(solve_default(&b.build()).status, LpStatus::Unbounded);
}

#[test]
fn offset_is_reported_and_free_rows_ignored() {
    let mut b = ProblemBuilder::new();
    let x = b.add_col(2.0, 1.0, 5.0);
    b.add_row(-INF, INF, &[(x, 1.0)]);
    b.add_offset(10.0);
    let s = solve_default(&b.build());
    assert!((s.objective - 12.0).abs() < 1e-12);
    assert!((s.reduced_costs[0] - 2.0).abs() < 1e-12);
}

#[test]
fn dependent_equalities_are_handled() {
    let mut b = ProblemBuilder::new();
    let x = b.add_col(1.0, 0.0, 10.0);
    let y = b.add_col(2.0, 0.0, 10.0);
    b.add_row(4.0, 4.0, &[(x, 1.0), (y, 1.0)]);
    b.add_row(8.0, 8.0, &[(x, 2.0), (y, 2.0)]);
    let s = solve_default(&b.build());
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.objective - 4.0).abs() < 1e-9);
}

#[test]
fn warm_start_reaches_same_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let (p, _) = random_lp(&mut rng);
        let cold = solve_default(&p);
        if cold.status != LpStatus::Optimal {
            continue;
        }
        let opts = SolveOptions { warm_start: Some(cold.basis.clone()), ..Default::default() };
        let warm = solve(&p, &opts).unwrap();
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.objective - cold.objective).abs() <= 1e-9 * (1.0 + cold.objective.abs()));
        assert!(warm.iterations <= 1);
    }
}

#[test]
fn lp_format_export() {
    let mut b = ProblemBuilder::new();
    let x = b.add_col(1.0, 0.0, 30.0);
    let y = b.add_col(-2.5, -INF, INF);
    b.add_row(40.0, 40.0, &[(x, 1.0), (y, 1.0)]);
    b.add_row(-5.0, 5.0, &[(x, 1.0), (y, -2.0)]);
    let text = write_lp_format(&b.build(), "t", &["x".into(), "y".into()], &["bal".into(), "rng".into()]);
    assert!(text.contains("Minimize\n obj: x - 2.5 y"));
    assert!(text.contains(" bal: x + y = 40"));
    assert!(text.contains(" rng: -5 <= x - 2 y <= 5"));
    assert!(text.contains(" 0 <= x <= 30"));
    assert!(text.contains(" y free"));
    assert!(text.ends_with("End\n"));
}

/// Random LP with finite column bounds; returns it with the oracle optimum.
fn random_lp(rng: &mut ChaCha8Rng) -> (Problem, Option<f64>) {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=3);
    let mut b = ProblemBuilder::new();
    for _ in 0..n {
        let c = rng.gen_range(-3..=3) as f64;
        let u = rng.gen_range(1..=5) as f64;
        if rng.gen_bool(0.3) {
            b.add_col(c, -u, u);
        } else {
            b.add_col(c, 0.0, u);
        }
    }
    for _ in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.gen_range(-3..=3) as f64)).collect();
        let r = rng.gen_range(-4..=6) as f64;
        match rng.gen_range(0..4) {
            0 => b.add_row(-INF, r, &coeffs),
            1 => b.add_row(r, INF, &coeffs),
            2 => b.add_row(r, r, &coeffs),
            _ => b.add_row(r, r + rng.gen_range(1..=4) as f64, &coeffs),
        };
    }
    let p = b.build();
    let best = vertex_oracle(&p);
    (p, best)
}

/// Minimum over all vertices of the polytope, found by solving every square
/// system of active constraints.
fn vertex_oracle(p: &Problem) -> Option<f64> {
    let n = p.num_cols();
    let dense: Vec<Vec<f64>> = (0..p.num_rows()).map(|i| (0..n).map(|j| p.matrix.get(i, j)).collect()).collect();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, row) in dense.iter().enumerate() {
        for v in [p.row_lower[i], p.row_upper[i]] {
            if v.is_finite() {
                planes.push((row.clone(), v));
            }
        }
    }
    for j in 0..n {
        for v in [p.col_lower[j], p.col_upper[j]] {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            planes.push((e, v));
        }
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    choose(&planes, n, 0, &mut pick, &mut |sel| {
        let a: Vec<Vec<f64>> = sel.iter().map(|&k| planes[k].0.clone()).collect();
        let rhs: Vec<f64> = sel.iter().map(|&k| planes[k].1).collect();
        let Some(x) = gauss(a, rhs) else { return };
        if p.max_infeasibility(&x) > 1e-9 {
            return;
        }
        let f = p.evaluate(&x);
        best = Some(best.map_or(f, |b: f64| b.min(f)));
    });
    best
}

fn choose(planes: &[(Vec<f64>, f64)], k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..planes.len() {
        pick.push(i);
        choose(planes, k, i + 1, pick, f);
        pick.pop();
    }
}

fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..400 {
        let (p, oracle) = random_lp(&mut rng);
        let s = solve_default(&p);
        match oracle {
            Some(best) => {
                assert_eq!(s.status, LpStatus::Optimal, "case {case}");
                assert!((s.objective - best).abs() <= 1e-7 * (1.0 + best.abs()), "case {case}: {} vs {best}", s.objective);
                assert!(s.primal_infeasibility <= 1e-9, "case {case}");
                assert!(s.duality_gap <= 1e-9, "case {case}");
                optimal += 1;
            }
            None => {
                assert_eq!(s.status, LpStatus::Infeasible, "case {case}");
                infeasible += 1;
            }
        }
    }
    assert!(optimal > 100 && infeasible > 10, "{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn duals_satisfy_optimality_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let (p, _) = random_lp(&mut rng);
        let s = solve_default(&p);
        if s.status != LpStatus::Optimal {
            continue;
        }
        for j in 0..p.num_cols() {
            let d = s.reduced_costs[j];
            let at_lo = (s.x[j] - p.col_lower[j]).abs() < 1e-9;
            let at_hi = (s.x[j] - p.col_upper[j]).abs() < 1e-9;
            if d > 1e-9 {
                assert!(at_lo, "positive reduced cost away from lower bound");
            }
            if d < -1e-9 {
                assert!(at_hi, "negative reduced cost away from upper bound");
            }
        }
        for i in 0..p.num_rows() {
            let y = s.row_duals[i];
            let a = s.row_activity[i];
            if y > 1e-9 {
                assert!((a - p.row_lower[i]).abs() < 1e-8, "positive dual off lower bound");
            }
            if y < -1e-9 {
                assert!((a - p.row_upper[i]).abs() < 1e-8, "negative dual off upper bound");
            }
        }
    }
}
