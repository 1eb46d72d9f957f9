use super::*;
use crate::fields::{sample_function, Exponent, Family};
use crate::geometry::{build_grid, CuspProfile, Grid, GridSpec, Lattice};
use crate::Error;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cylinder() -> CuspDomain {
    CuspDomain::new(2, CuspProfile::table(&[(1.0, 1.0)]).unwrap()).unwrap()
}

fn cusp(n: usize, s: f64) -> CuspDomain {
    CuspDomain::new(n, CuspProfile::power(1.0, s).unwrap()).unwrap()
}

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

#[test]
fn certify_single_pair() {
    // two nodes one apart on the axis
    let lattice = Lattice::new(2, 1.0, 1.0, 0.5, 2, 0).unwrap();
    let g = Grid::from_predicate(lattice, 0, 10, |_| true).unwrap();
    assert_eq!(g.len(), 2);
    let u = GridFunction::new(&g, vec![0.0, 2.0]).unwrap();
    let one = GridFunction::constant(&g, 1.0);
    let pairs = PairSet::all(&g);
    assert_eq!(certify_pointwise(&u, &one, &pairs), 1.0);
    let zero = GridFunction::constant(&g, 0.0);
    assert_eq!(certify_pointwise(&u, &zero, &pairs), f64::INFINITY);
    let flat = GridFunction::constant(&g, 5.0);
    assert_eq!(certify_pointwise(&flat, &zero, &pairs), 0.0);
}

#[test]
fn constant_function_certifies_with_zero() {
    let d = cusp(2, 2.0);
    let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
    let u = GridFunction::constant(&g, 3.0);
    let w = constructive_gradient(&u, &d, 1).unwrap();
    assert_eq!(w.certified_constant, 0.0);
    assert!(w.g.values().iter().all(|v| *v >= 0.0));
    let w2 = constructive_gradient_2d(&u, 1).unwrap();
    assert!(w2.g.values().iter().all(|v| *v == 0.0));
}

#[test]
fn linear_in_t_on_a_cylinder() {
    let d = cylinder();
    let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
    let u = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![] }).unwrap();
    let parts = constructive_parts(&u, &d).unwrap();
    assert!(parts.tau.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    let w = constructive_gradient(&u, &d, 1).unwrap();
    assert!(w.g.values().iter().all(|v| *v >= 1.0 - 1e-12));
    assert!(w.certified_constant <= 1.0);
    assert!(w.certified_constant > 0.0);
    let w2 = constructive_gradient_2d(&u, 1).unwrap();
    assert!(w2.certified_constant <= 1.0);
}

#[test]
fn planar_path_needs_the_plane() {
    let d = cusp(3, 1.0);
    let g = build_grid(&d, &GridSpec::uniform(0.25)).unwrap();
    let u = GridFunction::constant(&g, 1.0);
    assert!(matches!(constructive_gradient_2d(&u, 1), Err(Error::UnsupportedDimension { n: 3, expected: 2 })));
}

#[test]
fn scaling_by_powers_of_two_is_exact() {
    let d = cusp(2, 2.0);
    let g = build_grid(&d, &GridSpec::uniform(1.0 / 16.0)).unwrap();
    let u = sample_function(&g, &Family::PowerT { alpha: 0.3 }).unwrap();
    let base = constructive_gradient(&u, &d, 3).unwrap();
    for lambda in [-2.0, 0.5, 8.0] {
        let v = u.scale(lambda);
        let w = constructive_gradient(&v, &d, 3).unwrap();
        for (a, b) in w.g.values().iter().zip(base.g.values()) {
            assert_eq!(*a, libm::fabs(lambda) * b);
        }
        assert_eq!(w.certified_constant, base.certified_constant);
    }
}

#[test]
fn cusp_constant_is_finite_in_three_dimensions() {
    let d = cusp(3, 2.0);
    let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
    let u = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![0.5, -0.25] }).unwrap();
    let w = constructive_gradient(&u, &d, 1).unwrap();
    assert!(w.certified_constant.is_finite() && w.certified_constant > 0.0);
}

fn collinear() -> Cloud {
    Cloud::new(2, vec![0.5, 0.0, 1.0, 0.0, 1.5, 0.0], vec![0.0, 1.0, 0.0], vec![1.0; 3]).unwrap()
}

#[test]
fn sup_exponent_closed_form() {
    let sol = optimal_gradient(&collinear(), Exponent::INFINITY).unwrap();
    assert_eq!(sol.g, vec![1.0; 3]);
    assert_eq!(sol.norm, 1.0);
    assert!(sol.converged);
}

#[test]
fn constant_cloud_needs_no_gradient() {
    let c = Cloud::new(1, vec![0.0, 1.0, 2.0], vec![4.0; 3], vec![1.0; 3]).unwrap();
    let sol = optimal_gradient(&c, exp(2.0)).unwrap();
    assert_eq!(sol.norm, 0.0);
    assert!(sol.g.iter().all(|v| *v == 0.0));
}

#[test]
fn cloud_budget_is_enforced() {
    let n = 5;
    let c = Cloud::new(1, (0..n).map(|i| i as f64).collect(), (0..n).map(|i| i as f64).collect(), vec![1.0; n]).unwrap();
    let opts = SolverOptions { budget: 4, ..SolverOptions::default() };
    assert!(matches!(optimal_gradient_with(&c, exp(2.0), &opts), Err(Error::CloudBudget { size: 5, budget: 4 })));
}

/// Minimises `w·g` over `{A g ≥ b}` by enumerating vertices.
fn lp_vertices(w: &[f64], rows: &[(Vec<f64>, f64)]) -> f64 {
    let n = w.len();
    let m = rows.len();
    let mut best = f64::INFINITY;
    let mut choice: Vec<usize> = (0..n).collect();
    loop {
        // solve the square system of the chosen rows
        let mut a: Vec<Vec<f64>> = choice.iter().map(|&r| {
            let mut row = rows[r].0.clone();
            row.push(rows[r].1);
            row
        }).collect();
        let mut ok = true;
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            if a[piv][col].abs() < 1e-12 {
                ok = false;
                break;
            }
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for k in col..=n {
                        a[r][k] -= f * a[col][k];
                    }
                }
            }
        }
        if ok {
            let x: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
            let feasible = rows.iter().all(|(r, b)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() >= b - 1e-9);
            if feasible {
                best = best.min(w.iter().zip(&x).map(|(p, q)| p * q).sum());
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if choice[i] < m - n + i {
                choice[i] += 1;
                for k in i + 1..n {
                    choice[k] = choice[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn lp_rows(cloud: &Cloud) -> Vec<(Vec<f64>, f64)> {
    let n = cloud.len();
    let mut rows = Vec::new();
    for (i, j, c) in cloud.slopes().unwrap() {
        let mut r = vec![0.0; n];
        r[i as usize] = 1.0;
        r[j as usize] = 1.0;
        rows.push((r, c));
    }
    for i in 0..n {
        let mut r = vec![0.0; n];
        r[i] = 1.0;
        rows.push((r, 0.0));
    }
    rows
}

#[test]
fn unit_exponent_matches_lp_vertices() {
    let cloud = collinear();
    assert_eq!(lp_vertices(&[1.0; 3], &lp_rows(&cloud)), 2.0);
    let sol = optimal_gradient(&cloud, exp(1.0)).unwrap();
    assert!(sol.converged);
    assert!((sol.norm - 2.0).abs() < 1e-6, "{}", sol.norm);
    for (a, b) in sol.g.iter().zip([0.0, 2.0, 0.0]) {
        assert!((a - b).abs() < 1e-6, "{:?}", sol.g);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let cloud = random_cloud(&mut rng, 4);
        let w = cloud.weights().to_vec();
        let expected = lp_vertices(&w, &lp_rows(&cloud));
        let sol = optimal_gradient(&cloud, exp(1.0)).unwrap();
        assert!((sol.norm - expected).abs() <= 1e-6 * expected.max(1.0), "{} vs {expected}", sol.norm);
    }
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> Cloud {
    let points = (0..2 * n).map(|_| rng.random_range(0.0..1.0)).collect();
    let values = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let weights = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    Cloud::new(2, points, values, weights).unwrap()
}

/// Dual coordinate ascent for `min Σ wᵢ gᵢᵖ / p` under the pair constraints:
/// `gᵢ = (Sᵢ/wᵢ)^{1/(p−1)}` with `Sᵢ` the multipliers of the pairs at `i`.
fn hildreth(cloud: &Cloud, p: f64) -> f64 {
    let slopes = cloud.slopes().unwrap();
    let w = cloud.weights();
    let n = cloud.len();
    let mut lambda = vec![0.0; slopes.len()];
    let mut s = vec![0.0; n];
    let g_of = |s: f64, w: f64| libm::pow(s / w, 1.0 / (p - 1.0));
    for _ in 0..20000 {
        let mut change = 0.0f64;
        for (k, &(i, j, c)) in slopes.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            let si = s[i] - lambda[k];
            let sj = s[j] - lambda[k];
            let sum = |l: f64| g_of(si + l, w[i]) + g_of(sj + l, w[j]);
            let new = if sum(0.0) >= c {
                0.0
            } else {
                let (mut lo, mut hi) = (0.0, 1.0);
                while sum(hi) < c {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if sum(mid) < c {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            };
            change = change.max((new - lambda[k]).abs());
            s[i] = si + new;
            s[j] = sj + new;
            lambda[k] = new;
        }
        if change < 1e-15 {
            break;
        }
    }
    let g: Vec<f64> = (0..n).map(|i| g_of(s[i], w[i])).collect();
    cloud.lp_norm(&g, Exponent::new(p).unwrap())
}

#[test]
fn barrier_matches_dual_ascent_on_small_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..30 {
        let n = 2 + trial % 5;
        let cloud = random_cloud(&mut rng, n);
        for p in [1.2, 1.5, 2.0, 3.0, 6.0] {
            let expected = hildreth(&cloud, p);
            let sol = optimal_gradient(&cloud, exp(p)).unwrap();
            assert!(sol.converged);
            assert_eq!(sol.residual, 0.0);
            assert!(
                (sol.norm - expected).abs() <= 1e-6 * expected,
                "n = {n}, p = {p}: {} vs {expected}",
                sol.norm
            );
            assert!(sol.gap_bound <= 1e-6 * sol.norm);
        }
    }
}

#[test]
fn large_exponent_approaches_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let cloud = random_cloud(&mut rng, 12);
        let closed = optimal_gradient(&cloud, Exponent::INFINITY).unwrap().norm;
        let sol = optimal_gradient(&cloud, exp(1e6)).unwrap();
        assert!((sol.norm / closed - 1.0).abs() <= 0.02, "{} vs {closed}", sol.norm);
    }
}

#[test]
fn stratified_cloud_covers_every_tenth() {
    let d = cusp(2, 2.0);
    let g = build_grid(&d, &GridSpec::uniform(1.0 / 32.0)).unwrap();
    let u = sample_function(&g, &Family::PowerT { alpha: 0.3 }).unwrap();
    let cloud = stratified_cloud(&u, 60, 4).unwrap();
    let again = stratified_cloud(&u, 60, 4).unwrap();
    assert_eq!(cloud, again);
    let nodes = cloud.nodes().unwrap();
    let mut counts = [0usize; 10];
    for &i in nodes {
        let t = g.point(i as usize)[0];
        counts[(((t - g.t_min()) / (2.0 - g.t_min()) * 10.0) as usize).min(9)] += 1;
    }
    assert!(counts.iter().all(|&c| c == 6), "{counts:?}");
    // weights add up to the grid weight
    let total: f64 = cloud.weights().iter().sum();
    assert!((total / g.total_weight() - 1.0).abs() < 1e-12);
}

#[test]
fn sandwich_on_a_cusp() {
    let d = cusp(2, 2.0);
    let g = build_grid(&d, &GridSpec::uniform(1.0 / 16.0)).unwrap();
    let u = sample_function(&g, &Family::PowerT { alpha: 0.3 }).unwrap();
    let study = EquivalenceStudy::new(&u, &d, PairSet::default_for(&g, 2), 40, 2).unwrap();
    for p in [1.2, 2.0, 4.0] {
        let r = study.report(exp(p), &SolverOptions::default()).unwrap();
        assert!(r.optimal.norm <= r.cloud_constructive * (1.0 + 1e-9), "p = {p}: {r:?}");
        assert!(r.norms.hajlasz_constructive >= r.norms.lp_u);
    }
    let r = study.report(Exponent::INFINITY, &SolverOptions::default()).unwrap();
    assert!(r.optimal.norm <= r.cloud_constructive);
}

#[test]
fn report_for_a_constant() {
    let d = cusp(2, 1.0);
    let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
    let u = GridFunction::constant(&g, 2.0);
    let r = norm_equivalence_report(&u, &d, exp(2.0), 20, 1).unwrap();
    let expected = 2.0 * libm::sqrt(g.total_weight());
    assert!((r.norms.lp_u - expected).abs() < 1e-12);
    assert_eq!(r.norms.lp_grad, 0.0);
    assert_eq!(r.norms.hajlasz_constructive, r.norms.lp_u);
    assert_eq!(r.optimal.norm, 0.0);
}
