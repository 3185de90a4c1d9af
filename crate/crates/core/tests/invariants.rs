mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tube_geodesics::circle::{mobius, strip_map_tau, unit, Arc, ArcSet};
use tube_geodesics::domain::{from_reinhardt, validate_staircase, ReinhardtFactor};
use tube_geodesics::geodesic::{klis_arcs, HalfPlaneComponent, HalfPlaneSpec, StripSpec};
use tube_geodesics::hfun::{circle_root, circle_symbol, positivity_arc};
use tube_geodesics::solver::SolveOptions;
use tube_geodesics::verify::{check_left_inverse, check_measure_condition, check_radial_conditions, RadialSettings, VerifySettings};
use tube_geodesics::{
    solve_two_point, CircleMeasure, DiscMap, Geodesic, GeodesicSpec, QuadCertificate, SolveProblem, StaircaseDomain,
    TubeDomain, C64,
};

use common::*;

fn disc_point() -> impl Strategy<Value = C64> {
    (0.0..0.97f64, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn arc_set() -> impl Strategy<Value = ArcSet> {
    prop::collection::vec((0.0..TAU, 0.0..TAU), 0..4)
        .prop_map(|v| ArcSet::from_arcs(v.into_iter().map(|(s, l)| Arc::new(s, l).unwrap())))
}

fn polar_grid(n_r: usize, n_t: usize, max_r: f64) -> Vec<C64> {
    (1..=n_r)
        .flat_map(|i| (0..n_t).map(move |k| C64::from_polar(max_r * i as f64 / n_r as f64, TAU * (k as f64 + 0.5) / n_t as f64)))
        .collect()
}

fn assert_consistent(g: &Geodesic) -> Result<(), TestCaseError> {
    let mu = g.boundary_measure().unwrap();
    let mu = mu.discrete().unwrap();
    let offset = g.offset();
    for l in polar_grid(10, 20, 0.95) {
        let direct = g.eval(l);
        let via = mu.herglotz(l, &offset).unwrap();
        for (a, b) in direct.iter().zip(&via) {
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()), "{} at {l}: {a} vs {b}", g.spec().kind());
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn mobius_round_trip(c in disc_point(), l in disc_point()) {
        // Rounding is amplified by the map's conditioning near the circle.
        let back = mobius(-c, mobius(c, l).unwrap()).unwrap();
        let err = (back - l).norm();
        prop_assert!(err < 1e-14 / (1.0 - c.norm_sqr()), "error {err:e}");
    }

    #[test]
    fn strip_map_lands_in_strip(l in disc_point()) {
        let s = strip_map_tau(l).unwrap();
        prop_assert!(s.re > 0.0 && s.re < 1.0);
    }

    #[test]
    fn arc_measure_inclusion_exclusion(a in arc_set(), b in arc_set()) {
        let lhs = a.union(&b).measure() + a.intersection(&b).measure();
        prop_assert!((lhs - a.measure() - b.measure()).abs() < 1e-10);
    }

    #[test]
    fn herglotz_commutes_with_matrices(
        atoms in prop::collection::vec((0.0..TAU, -3.0..3.0f64, -3.0..3.0f64), 0..3),
        pieces in prop::collection::vec((0.0..TAU, 0.01..TAU, -3.0..3.0f64, -3.0..3.0f64), 0..3),
        row in (-2.0..2.0f64, -2.0..2.0f64),
        l in disc_point(),
    ) {
        let mut mu = CircleMeasure::zero(2);
        for (t, x, y) in atoms {
            mu = mu.with_atom(t, vec![x, y]).unwrap();
        }
        for (s, len, x, y) in pieces {
            mu = mu.with_density(Arc::new(s, len).unwrap(), vec![x, y]).unwrap();
        }
        let rows = vec![vec![row.0, row.1]];
        let image = mu.apply_matrix(&rows).unwrap().herglotz(l, &[0.0]).unwrap()[0];
        let parts = mu.herglotz(l, &[0.0, 0.0]).unwrap();
        prop_assert!((image - (parts[0] * row.0 + parts[1] * row.1)).norm() < 1e-12 * (1.0 + image.norm()));
    }

    #[test]
    fn symbol_is_real_restriction(r in 0.0..3.0f64, arg in 0.0..TAU, b in -5.0..5.0f64, t in 0.0..TAU) {
        let a = C64::from_polar(r, arg);
        let h = QuadCertificate::from_pairs(&[(a, b)]);
        let on_circle = unit(-t) * h.eval(unit(t))[0];
        prop_assert!((on_circle.re - circle_symbol(a, b, t)).abs() < 1e-13 * (1.0 + r + b.abs()));
        prop_assert!(on_circle.im.abs() < 1e-13 * (1.0 + r + b.abs()));
    }

    #[test]
    fn positivity_arc_is_projective(r in 0.01..3.0f64, arg in 0.0..TAU, frac in -0.99..0.99f64, s in 1e-3..1e3f64, e in -20..20i32) {
        let a = C64::from_polar(r, arg);
        let b = frac * 2.0 * r;
        let base = positivity_arc(a, b).unwrap();
        let p = 2f64.powi(e);
        prop_assert_eq!(positivity_arc(a * p, b * p).unwrap(), base.clone());
        let scaled = positivity_arc(a * s, b * s).unwrap();
        prop_assert_eq!(scaled.arcs().len(), base.arcs().len());
        for (x, y) in scaled.arcs().iter().zip(base.arcs()) {
            prop_assert!((x.start() - y.start()).abs() < 1e-12 && (x.length() - y.length()).abs() < 1e-12);
        }
    }

    #[test]
    fn reinhardt_output_validates(
        factors in prop::collection::vec((0.2..5.0f64, 0.2..5.0f64, 0.01..0.99f64), 1..5),
    ) {
        let factors: Vec<ReinhardtFactor> = factors.into_iter().map(|(p, q, alpha)| ReinhardtFactor { p, q, alpha }).collect();
        let d = from_reinhardt(&factors).unwrap();
        prop_assert!(validate_staircase(d.normals(), d.points()).is_empty());
    }

    #[test]
    fn membership_ignores_imaginary_parts(x in -3.0..1.0f64, y in -3.0..1.0f64, s in -1e3..1e3f64, t in -1e3..1e3f64) {
        let d = canonical_domain();
        let a = vec![C64::new(x, 0.0), C64::new(y, 0.0)];
        let b = vec![C64::new(x, s), C64::new(y, t)];
        prop_assert_eq!(d.contains(&a), d.contains(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn halfplane_consistency(
        comps in prop::collection::vec((-2.0..0.0f64, -8.0..-0.1f64, 0.0..TAU, -2.0..2.0f64), 1..4),
    ) {
        let components: Vec<HalfPlaneComponent<f64>> = comps
            .into_iter()
            .enumerate()
            .map(|(k, (shift, alpha, t, beta))| HalfPlaneComponent { shift: if k == 0 { 0.0 } else { shift }, alpha, atom: unit(t), beta })
            .collect();
        let n = components.len();
        let g = Geodesic::new(GeodesicSpec::HalfPlane(HalfPlaneSpec { lead: 0, components }), TubeDomain::HalfPlaneProduct { n })
            .unwrap();
        assert_consistent(&g)?;
    }

    #[test]
    fn strip_consistency(r in 0.05..2.0f64, arg in 0.0..TAU, frac in -0.95..0.95f64, offset in -2.0..2.0f64) {
        let a = C64::from_polar(r, arg);
        let g = Geodesic::new(GeodesicSpec::Strip(StripSpec { a, b: frac * 2.0 * r, offset }), TubeDomain::Strip).unwrap();
        assert_consistent(&g)?;
    }

    #[test]
    fn staircase_consistency_and_atom_placement(seed in any::<u64>(), four in any::<bool>()) {
        let domain = if four { four_facet_domain() } else { canonical_domain() };
        let g = random_staircase(&mut ChaCha8Rng::seed_from_u64(seed), &domain);
        assert_consistent(&g)?;
        let GeodesicSpec::Staircase(s) = g.spec() else { unreachable!() };
        for l in 0..2 {
            if s.alpha[l] < 0.0 {
                let t = circle_root(s.h.terms[l].a, s.h.terms[l].b).unwrap().unwrap();
                prop_assert!((unit(t) - s.atoms[l]).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn c_sets_are_nested(
        a1 in (0.0..2.0f64, 0.0..TAU), extra1 in prop_oneof![Just(0.0), 0.0..2.0f64],
        a2 in (0.0..2.0f64, 0.0..TAU), extra2 in prop_oneof![Just(0.0), 0.0..2.0f64],
    ) {
        // admissible certificates have non-negative component symbols
        let d = StaircaseDomain::canonical();
        let h = QuadCertificate::from_pairs(&[
            (C64::from_polar(a1.0, a1.1), 2.0 * a1.0 + extra1),
            (C64::from_polar(a2.0, a2.1), 2.0 * a2.0 + extra2),
        ]);
        if let Ok(arcs) = klis_arcs(&d, &h) {
            for w in arcs.c.windows(2) {
                prop_assert!(w[1].measure() <= w[0].measure() + 1e-9, "{:?}", arcs.c);
            }
        }
    }
}

#[test]
fn checker_outcomes_ignore_certificate_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fixtures = [
        halfplane(-TAU, C64::new(1.0, 0.0), 0.0),
        strip(C64::new(0.3, 0.2), 0.1),
        canonical(),
        random_staircase(&mut rng, &canonical_domain()),
        counterexample(),
        squared(&canonical(), canonical().certificate()),
    ];
    let settings = VerifySettings::default();
    for g in &fixtures {
        let z = g.domain().structured_samples(settings.random_z, settings.seed);
        let mu = g.boundary_measure().unwrap();
        let outcome = |s: f64| {
            let h = g.certificate().scaled(s);
            let m = check_measure_condition(&mu, &h, g.domain(), &z).unwrap().status();
            let r = check_radial_conditions(g, &h, g.domain(), &z, &RadialSettings::default()).unwrap().status();
            let i = check_left_inverse(g, &h, &settings);
            (m, r, i.status(), i.root_counts)
        };
        let base = outcome(1.0);
        for s in [1e-3, 1e3] {
            assert_eq!(outcome(s), base, "{} at scale {s}", g.spec().kind());
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let g = random_staircase(&mut rng, &canonical_domain());
        let problem = SolveProblem::new(canonical_domain(), g.eval(C64::new(0.0, 0.0)), g.eval(C64::new(0.4, 0.0)))
            .unwrap()
            .with_options(SolveOptions { seed: 3, ..SolveOptions::default() });
        let a = solve_two_point(&problem).unwrap();
        let b = solve_two_point(&problem).unwrap();
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
        assert_eq!(a.case, b.case);
        assert_eq!(format!("{:?}", a.spec()), format!("{:?}", b.spec()));
        assert_eq!(a.report, b.report);
    }
}

#[test]
fn solved_distance_matches_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = random_staircase(&mut rng, &canonical_domain());
    let problem = SolveProblem::new(canonical_domain(), g.eval(C64::new(0.0, 0.0)), g.eval(C64::new(0.3, 0.0))).unwrap();
    let sol = solve_two_point(&problem).unwrap();
    let (lo, up) = tube_geodesics::verify::distance_sandwich(
        &sol.geodesic,
        &sol.geodesic.certificate(),
        C64::new(0.0, 0.0),
        C64::new(sol.sigma, 0.0),
        &Default::default(),
    )
    .unwrap();
    let d = tube_geodesics::circle::poincare_distance(C64::new(0.0, 0.0), C64::new(sol.sigma, 0.0)).unwrap();
    assert!((lo - d).abs() < 1e-6 && (up - d).abs() < 1e-6);
}
