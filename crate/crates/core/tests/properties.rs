use drsc::constraints::ConstraintSet;
use drsc::drs::{drs_sample, BoundsSpec};
use drsc::geometry::{ConvexPolygon, HalfPlane};
use drsc::gof::{build_grid, ProjectedPolytope};
use drsc::lp::{self, LinearProgram, LpStatus};
use drsc::simplex::{
    project_to_plane, rescale_inverse, rescale_to_standard, sample_flat_dirichlet, RegularSubSimplex, RngState,
    SimplexVector,
};
use drsc::stats::chi2_sf;
use drsc::{DrscSampler, Sampler};
use proptest::prelude::*;

fn simplex_point(n: usize) -> impl Strategy<Value = SimplexVector> {
    proptest::collection::vec(0.001f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        SimplexVector::new(v.into_iter().map(|x| x / s).collect()).unwrap()
    })
}

/// Upper bounds with `sum(u) >= 1`.
fn upper_bounds() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=6).prop_flat_map(|n| proptest::collection::vec(0.05f64..1.0, n)).prop_map(|mut u| {
        let s: f64 = u.iter().sum();
        if s < 1.0 {
            let k = 1.0 / s;
            u.iter_mut().for_each(|x| *x = (*x * k).min(1.0));
            u[0] = 1.0;
        }
        u
    })
}

/// Upper bounds with `sum(u) >= 1.25`, so the feasible region is not vanishingly small.
fn roomy_upper_bounds() -> impl Strategy<Value = Vec<f64>> {
    upper_bounds().prop_map(|mut u| {
        if u.iter().sum::<f64>() < 1.25 {
            u[1] = 1.0;
        }
        u
    })
}

fn triangle_2d() -> impl Strategy<Value = ConvexPolygon> {
    proptest::array::uniform3(proptest::array::uniform2(-1.0f64..1.0))
        .prop_map(|[a, b, c]| ConvexPolygon::new(vec![a, b, c]))
        .prop_filter("non-degenerate", |p| p.area() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flat_dirichlet_lies_on_the_simplex(n in 2usize..12, seed in any::<u64>()) {
        let x = sample_flat_dirichlet(n, &mut RngState::new(seed)).unwrap();
        prop_assert!(x.as_slice().iter().all(|&v| v >= 0.0));
        prop_assert!((x.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rescale_inverts(y in simplex_point(4), t in proptest::collection::vec(0.0f64..0.2, 4)) {
        let sub = RegularSubSimplex::new(t).unwrap();
        let x = rescale_inverse(&y, &sub).unwrap();
        prop_assert!(sub.contains(x.as_slice()));
        let back = rescale_to_standard(&x, &sub).unwrap();
        for (a, b) in back.as_slice().iter().zip(y.as_slice()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_stays_in_the_triangle(x in simplex_point(3)) {
        let p = project_to_plane(&x).unwrap();
        prop_assert!(ConvexPolygon::triangle().contains(p, 1e-12));
    }

    #[test]
    fn clipping_splits_area(poly in triangle_2d(), a in proptest::array::uniform2(-1.0f64..1.0), c in -0.5f64..0.5) {
        prop_assume!(a[0].hypot(a[1]) > 1e-3);
        let h = HalfPlane::new(a, c);
        let total = poly.clip(&h).area() + poly.clip(&h.complement()).area();
        prop_assert!((total - poly.area()).abs() < 1e-12);
        prop_assert!(poly.clip(&h).area() <= poly.area() + 1e-15);
    }

    #[test]
    fn difference_and_intersection_partition(p in triangle_2d(), q in triangle_2d()) {
        let inter = p.intersect(&q).area();
        let diff: f64 = p.difference(&q).iter().map(ConvexPolygon::area).sum();
        prop_assert!((inter + diff - p.area()).abs() < 1e-10);
    }

    #[test]
    fn drs_respects_bounds(u in upper_bounds(), seed in any::<u64>()) {
        let bounds = BoundsSpec::upper_only(u).unwrap();
        let mut rng = RngState::new(seed);
        for _ in 0..20 {
            match drs_sample(&bounds, &mut rng, 10_000) {
                Ok(d) => prop_assert!(bounds.contains(d.vector.as_slice())),
                // Near-tight bounds can need very long rescale chains.
                Err(drsc::Error::NonTermination { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn drsc_outputs_are_feasible(u in roomy_upper_bounds(), seed in any::<u64>()) {
        let n = u.len();
        let cs = ConstraintSet::from_bounds(&vec![0.0; n], &u).unwrap();
        let s = DrscSampler::new(cs.clone()).unwrap();
        let mut rng = RngState::new(seed);
        for _ in 0..20 {
            let d = s.draw(&mut rng).unwrap();
            prop_assert!(cs.is_satisfied(d.vector.as_slice()));
        }
    }

    #[test]
    fn lp_optima_are_feasible(
        c in proptest::collection::vec(-3.0f64..3.0, 3),
        rows in proptest::collection::vec((proptest::collection::vec(-2.0f64..2.0, 3), -1.0f64..3.0), 0..5),
    ) {
        let prog = rows.iter().fold(LinearProgram::new(3).maximize(c).bounds(0.0, 2.0), |p, (a, b)| p.le(a.clone(), *b));
        let sol = lp::solve(&prog).unwrap();
        prop_assert_ne!(sol.status, LpStatus::Unbounded);
        if sol.status == LpStatus::Optimal {
            for (a, b) in &rows {
                let lhs: f64 = a.iter().zip(&sol.point).map(|(x, y)| x * y).sum();
                prop_assert!(lhs <= b + 1e-9);
            }
            prop_assert!(sol.point.iter().all(|&v| (-1e-12..=2.0 + 1e-12).contains(&v)));
        }
    }

    #[test]
    fn bins_contain_their_points(x in simplex_point(3), n_b in 2usize..40) {
        let grid = build_grid(&ProjectedPolytope::new(&ConstraintSet::new(3).unwrap()), n_b).unwrap();
        if let Some(b) = grid.bin_of(x.as_slice()) {
            let lo = grid.corner(b, 0);
            let hi = grid.corner(b, 3);
            for k in 0..2 {
                prop_assert!(lo[k] <= x[k] + 1e-12 && x[k] <= hi[k] + 1e-12);
            }
        }
    }

    #[test]
    fn chi2_tail_decreases(dof in 1usize..200, a in 0.0f64..300.0, b in 0.0f64..300.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(chi2_sf(lo, dof as f64).unwrap() >= chi2_sf(hi, dof as f64).unwrap() - 1e-15);
    }
}
