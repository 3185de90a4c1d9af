#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tube_geodesics::circle::{unit, Arc};
use tube_geodesics::domain::{from_reinhardt, ReinhardtFactor};
use tube_geodesics::geodesic::{
    canonical_staircase_spec, CandidateSpec, DiscBaseSpec, FacetSpec, HalfPlaneComponent, HalfPlaneSpec, StaircaseSpec,
    StripSpec, Transverse,
};
use tube_geodesics::{CircleMeasure, Geodesic, GeodesicSpec, QuadCertificate, StaircaseDomain, TubeDomain, C64};

pub fn canonical_domain() -> TubeDomain {
    TubeDomain::Staircase(StaircaseDomain::canonical())
}

pub fn canonical() -> Geodesic {
    Geodesic::new(GeodesicSpec::Staircase(canonical_staircase_spec()), canonical_domain()).unwrap()
}

/// Two-factor Reinhardt staircase with four facets.
pub fn four_facet_domain() -> TubeDomain {
    let e = (-1f64).exp();
    TubeDomain::Staircase(
        from_reinhardt(&[ReinhardtFactor { p: 1.0, q: 2.0, alpha: e }, ReinhardtFactor { p: 2.0, q: 1.0, alpha: e }]).unwrap(),
    )
}

pub fn halfplane(alpha: f64, atom: C64, beta: f64) -> Geodesic {
    Geodesic::new(
        GeodesicSpec::HalfPlane(HalfPlaneSpec { lead: 0, components: vec![HalfPlaneComponent { shift: 0.0, alpha, atom, beta }] }),
        TubeDomain::HalfPlaneProduct { n: 1 },
    )
    .unwrap()
}

/// `(λ² + 1)/(λ² − 1)` over the left half-plane paired with `h(λ) = λ`.
pub fn counterexample() -> Geodesic {
    let mu = CircleMeasure::zero(1).with_atom(0.0, vec![-PI]).unwrap().with_atom(PI, vec![-PI]).unwrap();
    Geodesic::new(
        GeodesicSpec::Candidate(CandidateSpec {
            measure: mu,
            offset: vec![0.0],
            certificate: QuadCertificate::from_pairs(&[(C64::new(0.0, 0.0), 1.0)]),
        }),
        TubeDomain::HalfPlaneProduct { n: 1 },
    )
    .unwrap()
}

/// Random admissible staircase geodesic with atoms at both certificate roots.
pub fn random_staircase(rng: &mut ChaCha8Rng, domain: &TubeDomain) -> Geodesic {
    for _ in 0..10_000 {
        let a = [
            C64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..TAU)),
            C64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..TAU)),
        ];
        let spec = StaircaseSpec {
            h: QuadCertificate::from_pairs(&[(a[0], 2.0 * a[0].norm()), (a[1], 2.0 * a[1].norm())]),
            alpha: [-rng.gen_range(0.5..8.0), -rng.gen_range(0.5..8.0)],
            atoms: [-a[0] / a[0].norm(), -a[1] / a[1].norm()],
            beta: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        };
        if let Ok(g) = Geodesic::new(GeodesicSpec::Staircase(spec), domain.clone()) {
            return g;
        }
    }
    panic!("no admissible staircase spec found");
}

pub struct Instance {
    pub name: String,
    pub geodesic: Geodesic,
    /// Whether the map is a geodesic witnessed by its attached certificate.
    pub witnessed: bool,
}

fn instance(name: &str, geodesic: Geodesic, witnessed: bool) -> Instance {
    Instance { name: name.into(), geodesic, witnessed }
}

/// Map paired with a certificate other than its own.
pub fn with_certificate(g: &Geodesic, certificate: QuadCertificate) -> Geodesic {
    let mu = g.boundary_measure().unwrap().discrete().unwrap().clone();
    Geodesic::new(
        GeodesicSpec::Candidate(CandidateSpec { measure: mu, offset: g.offset(), certificate }),
        g.domain().clone(),
    )
    .unwrap()
}

/// The 25-instance regression corpus: half-plane, strip, staircase and
/// disc-base geodesics plus maps paired with certificates that do not witness them.
pub fn corpus(rng: &mut ChaCha8Rng) -> Vec<Instance> {
    let mut out = Vec::new();
    out.push(instance("halfplane/unit", halfplane(-TAU, C64::new(1.0, 0.0), 0.0), true));
    for k in 0..2 {
        let g = halfplane(-rng.gen_range(0.5..6.0), unit(rng.gen_range(0.0..TAU)), rng.gen_range(-2.0..2.0));
        out.push(instance(&format!("halfplane/random{k}"), g, true));
    }
    let product = Geodesic::new(
        GeodesicSpec::HalfPlane(HalfPlaneSpec {
            lead: 1,
            components: vec![
                HalfPlaneComponent { shift: -0.5, alpha: -1.0, atom: unit(2.0), beta: 0.3 },
                HalfPlaneComponent { shift: 0.0, alpha: -4.0, atom: unit(-1.0), beta: -2.0 },
            ],
        }),
        TubeDomain::HalfPlaneProduct { n: 2 },
    )
    .unwrap();
    out.push(instance("halfplane/product", product, true));
    out.push(instance("strip/cos", strip(C64::new(0.5, 0.0), 0.0), true));
    for k in 0..2 {
        let a = C64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..TAU));
        let b = rng.gen_range(-0.9..0.9) * 2.0 * a.norm();
        out.push(instance(&format!("strip/random{k}"), strip(a, b), true));
    }
    out.push(instance("staircase/canonical", canonical(), true));
    for k in 0..3 {
        out.push(instance(&format!("staircase/random{k}"), random_staircase(rng, &canonical_domain()), true));
    }
    out.push(instance("staircase/four_facets", random_staircase(rng, &four_facet_domain()), true));
    let facet = Geodesic::new(
        GeodesicSpec::Facet(FacetSpec {
            facet: 2,
            normal: HalfPlaneComponent { shift: 0.0, alpha: -3.0, atom: unit(0.4), beta: 0.0 },
            transverse: Transverse::Affine { offset: C64::new(-1.0, 0.2), slope: 0.0 },
        }),
        canonical_domain(),
    )
    .unwrap();
    out.push(instance("staircase/facet", facet, true));
    let disc = |a: [C64; 2], b: [f64; 2]| {
        Geodesic::new(GeodesicSpec::DiscBase(DiscBaseSpec { a, b, offset: [0.1, -0.2] }), TubeDomain::DiscBase).unwrap()
    };
    out.push(instance("disc/circle", disc([C64::new(1.0, 0.0), C64::new(0.0, 1.0)], [0.0, 0.0]), true));
    out.push(instance("disc/shifted", disc([C64::new(0.7, 0.2), C64::new(-0.1, 0.5)], [0.3, -0.2]), true));
    out.push(instance("disc/small_shift", disc([C64::new(0.5, -0.5), C64::new(0.6, 0.3)], [-0.1, 0.05]), true));

    out.push(instance("halfplane/counterexample", counterexample(), false));
    let hp = halfplane(-TAU, C64::new(1.0, 0.0), 0.0);
    out.push(instance("halfplane/squared", squared(&hp, hp.certificate()), false));
    let tilted = halfplane(-3.0, unit(1.1), 0.4);
    out.push(instance("halfplane/tilted_squared", squared(&tilted, tilted.certificate()), false));
    let s = strip(C64::new(0.5, 0.0), 0.0);
    out.push(instance("strip/squared", squared(&s, s.certificate()), false));
    let s = strip(C64::new(0.2, -0.4), 0.3);
    out.push(instance("strip/shifted_squared", squared(&s, s.certificate()), false));
    let c = canonical();
    out.push(instance("staircase/squared", squared(&c, c.certificate()), false));
    let r = random_staircase(rng, &canonical_domain());
    out.push(instance("staircase/random_squared", squared(&r, r.certificate()), false));
    out.push(instance(
        "staircase/swapped_certificate",
        with_certificate(&c, QuadCertificate::from_pairs(&[(C64::new(-0.5, 0.0), 1.0), (C64::new(0.5, 0.0), 1.0)])),
        false,
    ));
    out.push(instance(
        "staircase/rotated_certificate",
        with_certificate(&c, QuadCertificate::from_pairs(&[(C64::new(0.0, 0.5), 1.0), (C64::new(0.0, -0.5), 1.0)])),
        false,
    ));
    assert_eq!(out.len(), 25);
    out
}

/// `λ ↦ g(λ²)` paired with `certificate`; two-to-one, so never a geodesic.
/// Boundary values at `t` are those of `g` at `2t`: each density arc has two
/// half-length preimages and each atom splits into two of half the mass.
pub fn squared(g: &Geodesic, certificate: QuadCertificate) -> Geodesic {
    let mu = g.boundary_measure().unwrap().discrete().unwrap().clone();
    let mut out = CircleMeasure::zero(mu.dim());
    for piece in &mu.pieces {
        for shift in [0.0, PI] {
            let arc = Arc::new(0.5 * piece.arc.start() + shift, 0.5 * piece.arc.length()).unwrap();
            out = out.with_density(arc, piece.weight.clone()).unwrap();
        }
    }
    for atom in &mu.atoms {
        for shift in [0.0, PI] {
            out = out.with_atom(0.5 * atom.angle + shift, atom.mass.iter().map(|m| 0.5 * m).collect()).unwrap();
        }
    }
    Geodesic::new(
        GeodesicSpec::Candidate(CandidateSpec { measure: out, offset: g.offset(), certificate }),
        g.domain().clone(),
    )
    .unwrap()
}

pub fn strip(a: C64, b: f64) -> Geodesic {
    Geodesic::new(GeodesicSpec::Strip(StripSpec { a, b, offset: 0.0 }), TubeDomain::Strip).unwrap()
}
