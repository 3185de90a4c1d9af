//! Closed-form geodesic families and their boundary measures.
//!
//! A [`GeodesicSpec`] holds the parameters of one family member. Binding it to
//! a [`TubeDomain`] gives a [`Geodesic`], which evaluates the map and its
//! derivative and knows its boundary measure and certificate.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc as Shared;

use nalgebra::DMatrix;
use num_complex::Complex;
use rustfft::FftPlanner;

use crate::circle::{apply_automorphism, canonical_angle, inverse_automorphism_scale, invert_automorphism,
    mobius_unchecked, strip_map_inverse, strip_map_unchecked, unit, ArcSet};
use crate::domain::{StaircaseDomain, TubeDomain};
use crate::error::{Error, Result};
use crate::hfun::{combine, positivity_arc, QuadCertificate, QuadTerm, ROOT_TOL};
use crate::measure::{herglotz_derivative, herglotz_transform, CircleMeasure};
use crate::scalar::{clift, cvalue, Dual, Real};

type C64 = Complex<f64>;

/// A holomorphic map from the unit disc into `ℂⁿ`.
pub trait DiscMap: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, lambda: C64) -> Vec<C64>;

    /// Complex derivative. The default is a four-point stencil on a small circle.
    fn derivative(&self, lambda: C64) -> Vec<C64> {
        let h = 1e-3f64.min(0.25 * (1.0 - lambda.norm()));
        let mut acc = vec![C64::new(0.0, 0.0); self.dim()];
        let mut rot = C64::new(1.0, 0.0);
        for _ in 0..4 {
            let v = self.eval(lambda + rot * h);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x / rot;
            }
            rot *= C64::new(0.0, 1.0);
        }
        acc.into_iter().map(|a| a / (4.0 * h)).collect()
    }

    /// Circle angles where the radial limit may fail to exist or jump.
    fn singular_angles(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Real part of the radial limit at `e^{it}`, when known in closed form.
    fn radial_limit_real(&self, _t: f64) -> Option<Vec<f64>> {
        None
    }
}

/// A [`DiscMap`] backed by a closure.
pub struct FnMap<F> {
    dim: usize,
    f: F,
    singular: Vec<f64>,
}

impl<F: Fn(C64) -> Vec<C64> + Sync> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, singular: Vec::new() }
    }

    pub fn with_singular_angles(mut self, angles: Vec<f64>) -> Self {
        self.singular = angles;
        self
    }
}

impl<F: Fn(C64) -> Vec<C64> + Sync> DiscMap for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, lambda: C64) -> Vec<C64> {
        (self.f)(lambda)
    }
    fn singular_angles(&self) -> Vec<f64> {
        self.singular.clone()
    }
}

/// `c + (α/2π)(λ₀+λ)/(λ₀−λ) + iβ`, a map into the closed left half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlaneComponent<T> {
    pub shift: T,
    pub alpha: T,
    pub atom: Complex<T>,
    pub beta: T,
}

impl<T: Real> HalfPlaneComponent<T> {
    pub fn eval(&self, lambda: Complex<T>) -> Complex<T> {
        let mut v = Complex::new(self.shift, self.beta);
        if self.alpha.value() != 0.0 {
            v = v + (self.atom + lambda) / (self.atom - lambda) * (self.alpha / T::TAU());
        }
        v
    }
}

impl HalfPlaneComponent<f64> {
    pub fn derivative(&self, lambda: C64) -> C64 {
        if self.alpha == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let d = self.atom - lambda;
        2.0 * self.atom / (d * d) * (self.alpha / TAU)
    }
}

/// `(α/2π)(λ₀+λ)/(λ₀−λ) + iβ`, a complex geodesic of the left half-plane.
pub fn eval_halfplane_geodesic<T: Real>(alpha: T, atom: Complex<T>, beta: T, lambda: Complex<T>) -> Result<Complex<T>> {
    if !(alpha.value() < 0.0) {
        return Err(Error::InvalidArgument(format!("atom mass must be negative, got {}", alpha.value())));
    }
    if (atom.norm().value() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("atom must lie on the unit circle".into()));
    }
    if !(lambda.norm().value() < 1.0) {
        return Err(Error::OutsideDisc(format!("{}", cvalue(lambda))));
    }
    Ok(HalfPlaneComponent { shift: T::zero(), alpha, atom, beta }.eval(lambda))
}

/// `τ(i·T_c(uλ))` with `u = ā/|a|` and `c = −b/(2|a| + √(4|a|² − b²))`; the
/// Herglotz transform of the indicator of the positivity arc of `(a, b)`.
pub fn eval_phi_h<T: Real>(a: Complex<T>, b: T, lambda: Complex<T>) -> Result<Complex<T>> {
    let r = a.norm();
    if !(b.abs().value() < 2.0 * r.value()) {
        return Err(Error::DegenerateStripCertificate { a: format!("{}", cvalue(a)), b: b.value() });
    }
    if !(lambda.norm().value() < 1.0) {
        return Err(Error::OutsideDisc(format!("{}", cvalue(lambda))));
    }
    Ok(phi_h_unchecked(a, b, lambda))
}

fn phi_h_unchecked<T: Real>(a: Complex<T>, b: T, lambda: Complex<T>) -> Complex<T> {
    let r = a.norm();
    let two = T::of(2.0);
    let c = -b / (two * r + (T::of(4.0) * r * r - b * b).max(T::zero()).sqrt());
    let u = a.conj() / r;
    let moved = mobius_unchecked(Complex::new(c, T::zero()), u * lambda);
    strip_map_unchecked(Complex::new(T::zero(), T::one()) * moved)
}

/// Positivity-arc parameter `c` of `(a, b)`, as used by [`eval_phi_h`].
pub fn phi_h_shift(a: C64, b: f64) -> f64 {
    let r = a.norm();
    -b / (2.0 * r + (4.0 * r * r - b * b).max(0.0).sqrt())
}

/// Transverse component of a facet geodesic.
#[derive(Clone)]
pub enum Transverse<T> {
    /// `offset + slope · g(λ)` with real slope.
    Affine { offset: Complex<T>, slope: T },
    /// Any holomorphic one-dimensional map.
    Custom(Shared<dyn DiscMap + Send>),
}

impl<T: fmt::Debug> fmt::Debug for Transverse<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transverse::Affine { offset, slope } => {
                f.debug_struct("Affine").field("offset", offset).field("slope", slope).finish()
            }
            Transverse::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: PartialEq> PartialEq for Transverse<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Transverse::Affine { offset: a, slope: s }, Transverse::Affine { offset: b, slope: t }) => a == b && s == t,
            (Transverse::Custom(a), Transverse::Custom(b)) => Shared::ptr_eq(a, b),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlaneSpec<T> {
    /// Coordinate carrying the geodesic atom (no constant shift).
    pub lead: usize,
    pub components: Vec<HalfPlaneComponent<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSpec<T> {
    pub a: Complex<T>,
    pub b: T,
    pub offset: T,
}

/// Staircase geodesic built from a certificate with optional atoms at the
/// certificate roots.
#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseSpec<T> {
    pub h: QuadCertificate<T>,
    pub alpha: [T; 2],
    pub atoms: [Complex<T>; 2],
    pub beta: [T; 2],
}

/// Geodesic whose image projects onto facet `facet` (one-based): the normal
/// part `⟨φ − p_j, v_j⟩` is a half-plane geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct FacetSpec<T> {
    pub facet: usize,
    pub normal: HalfPlaneComponent<T>,
    pub transverse: Transverse<T>,
}

/// Disc-base geodesic with boundary values `(Re(āλ) + b)/‖Re(āλ) + b‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscBaseSpec<T> {
    pub a: [Complex<T>; 2],
    pub b: [T; 2],
    pub offset: [T; 2],
}

/// Arbitrary measure-defined map with a proposed certificate, to be verified.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSpec<T> {
    pub measure: CircleMeasure<T>,
    pub offset: Vec<T>,
    pub certificate: QuadCertificate<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeodesicSpec<T> {
    HalfPlane(HalfPlaneSpec<T>),
    Strip(StripSpec<T>),
    Staircase(StaircaseSpec<T>),
    Facet(FacetSpec<T>),
    DiscBase(DiscBaseSpec<T>),
    Candidate(CandidateSpec<T>),
}

impl<T> GeodesicSpec<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            GeodesicSpec::HalfPlane(_) => "halfplane",
            GeodesicSpec::Strip(_) => "strip",
            GeodesicSpec::Staircase(_) => "staircase",
            GeodesicSpec::Facet(_) => "staircase_facet",
            GeodesicSpec::DiscBase(_) => "disc_base",
            GeodesicSpec::Candidate(_) => "candidate",
        }
    }
}

fn lift_component<S: Real>(c: &HalfPlaneComponent<f64>) -> HalfPlaneComponent<S> {
    HalfPlaneComponent { shift: S::of(c.shift), alpha: S::of(c.alpha), atom: clift(c.atom), beta: S::of(c.beta) }
}

fn lift_certificate<S: Real>(h: &QuadCertificate<f64>) -> QuadCertificate<S> {
    QuadCertificate::new(h.terms.iter().map(|t| QuadTerm::new(clift(t.a), S::of(t.b))).collect())
}

impl GeodesicSpec<f64> {
    /// Same parameters over another scalar type.
    pub fn lift<S: Real>(&self) -> GeodesicSpec<S> {
        match self {
            GeodesicSpec::HalfPlane(s) => GeodesicSpec::HalfPlane(HalfPlaneSpec {
                lead: s.lead,
                components: s.components.iter().map(lift_component).collect(),
            }),
            GeodesicSpec::Strip(s) => GeodesicSpec::Strip(StripSpec { a: clift(s.a), b: S::of(s.b), offset: S::of(s.offset) }),
            GeodesicSpec::Staircase(s) => GeodesicSpec::Staircase(StaircaseSpec {
                h: lift_certificate(&s.h),
                alpha: [S::of(s.alpha[0]), S::of(s.alpha[1])],
                atoms: [clift(s.atoms[0]), clift(s.atoms[1])],
                beta: [S::of(s.beta[0]), S::of(s.beta[1])],
            }),
            GeodesicSpec::Facet(s) => GeodesicSpec::Facet(FacetSpec {
                facet: s.facet,
                normal: lift_component(&s.normal),
                transverse: match &s.transverse {
                    Transverse::Affine { offset, slope } => Transverse::Affine { offset: clift(*offset), slope: S::of(*slope) },
                    Transverse::Custom(m) => Transverse::Custom(m.clone()),
                },
            }),
            GeodesicSpec::DiscBase(s) => GeodesicSpec::DiscBase(DiscBaseSpec {
                a: [clift(s.a[0]), clift(s.a[1])],
                b: [S::of(s.b[0]), S::of(s.b[1])],
                offset: [S::of(s.offset[0]), S::of(s.offset[1])],
            }),
            GeodesicSpec::Candidate(s) => GeodesicSpec::Candidate(CandidateSpec {
                measure: s.measure.lift(),
                offset: s.offset.iter().map(|x| S::of(*x)).collect(),
                certificate: lift_certificate(&s.certificate),
            }),
        }
    }
}

/// The canonical staircase geodesic: `h = ((1/2, 1), (−1/2, 1))`, atoms of
/// mass `−2π` at `−1` and `1`, no imaginary offset.
pub fn canonical_staircase_spec() -> StaircaseSpec<f64> {
    StaircaseSpec {
        h: QuadCertificate::from_pairs(&[(C64::new(0.5, 0.0), 1.0), (C64::new(-0.5, 0.0), 1.0)]),
        alpha: [-TAU, -TAU],
        atoms: [C64::new(-1.0, 0.0), C64::new(1.0, 0.0)],
        beta: [0.0, 0.0],
    }
}

/// Whether a combined symbol is positive everywhere (`Some(true)`), nowhere
/// (`Some(false)`) or on a proper arc (`None`); the same tolerance as
/// [`positivity_arc`].
fn arc_state<T: Real>(t: &QuadTerm<T>) -> Option<bool> {
    let r = t.a.norm().value();
    let b = t.b.value();
    let tol = ROOT_TOL * r.max(b.abs());
    if b >= 2.0 * r - tol {
        Some(true)
    } else if b <= -2.0 * r + tol {
        Some(false)
    } else {
        None
    }
}

/// Staircase formula in telescoped form:
/// `p_1 + Σ_{j=2}^{m−1}(p_j − p_{j−1})·χ̂_j + atoms + iβ`, where `χ̂_j` is `1`
/// on a full arc, `0` on an empty one and `φ_{h′_j}` otherwise. This equals
/// `p_{k₁} + Σ_{j=k₁+1}^{k₂−1}(p_j − p_{j−1})φ_{h′_j} + …`.
pub fn eval_staircase<T: Real>(domain: &StaircaseDomain, spec: &StaircaseSpec<T>, lambda: Complex<T>) -> [Complex<T>; 2] {
    let p = domain.points();
    let v = domain.normals();
    let m = domain.m();
    let mut out = [Complex::new(T::of(p[1][0]), spec.beta[0]), Complex::new(T::of(p[1][1]), spec.beta[1])];
    for j in 2..m {
        let step = [p[j][0] - p[j - 1][0], p[j][1] - p[j - 1][1]];
        let term = combine(v[j - 1], &spec.h);
        let value = match arc_state(&term) {
            Some(true) => Complex::new(T::one(), T::zero()),
            Some(false) => continue,
            None => phi_h_unchecked(term.a, term.b, lambda),
        };
        out[0] = out[0] + value * T::of(step[0]);
        out[1] = out[1] + value * T::of(step[1]);
    }
    for l in 0..2 {
        if spec.alpha[l].value() != 0.0 {
            let z0 = spec.atoms[l];
            out[l] = out[l] + (z0 + lambda) / (z0 - lambda) * (spec.alpha[l] / T::TAU());
        }
    }
    out
}

fn facet_frame(domain: &StaircaseDomain, facet: usize) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let v = domain.normals()[facet - 1];
    let p = domain.points()[facet];
    let n2 = v[0] * v[0] + v[1] * v[1];
    let normal = [v[0] / n2, v[1] / n2];
    let tangent = [-v[1] / n2, v[0] / n2];
    (p, normal, tangent)
}

fn eval_facet<T: Real>(domain: &StaircaseDomain, spec: &FacetSpec<T>, lambda: Complex<T>) -> Vec<Complex<T>> {
    let (p, n, e) = facet_frame(domain, spec.facet);
    let g = spec.normal.eval(lambda);
    let t = match &spec.transverse {
        Transverse::Affine { offset, slope } => *offset + g * *slope,
        Transverse::Custom(m) => clift(m.eval(cvalue(lambda))[0]),
    };
    (0..2)
        .map(|l| g * T::of(n[l]) + t * T::of(e[l]) + T::of(p[l]))
        .collect()
}

/// Evaluates every family with a closed form; disc-base maps need the
/// precomputed series held by [`Geodesic`].
pub fn eval_closed_form<T: Real>(spec: &GeodesicSpec<T>, domain: &TubeDomain, lambda: Complex<T>) -> Result<Vec<Complex<T>>> {
    match (spec, domain) {
        (GeodesicSpec::HalfPlane(s), _) => Ok(s.components.iter().map(|c| c.eval(lambda)).collect()),
        (GeodesicSpec::Strip(s), _) => {
            Ok(vec![phi_h_unchecked(s.a, s.b, lambda) + Complex::new(T::zero(), s.offset)])
        }
        (GeodesicSpec::Staircase(s), TubeDomain::Staircase(d)) => Ok(eval_staircase(d, s, lambda).to_vec()),
        (GeodesicSpec::Facet(s), TubeDomain::Staircase(d)) => Ok(eval_facet(d, s, lambda)),
        (GeodesicSpec::Candidate(s), _) => herglotz_transform(&s.measure, lambda, &s.offset),
        (GeodesicSpec::DiscBase(_), _) => Err(Error::Unsupported("disc-base maps are evaluated through Geodesic".into())),
        (s, d) => Err(Error::InvalidArgument(format!("{} spec does not fit a {} domain", s.kind(), d.name()))),
    }
}

/// The sets `C_j`, `A_j = C_j ∖ C_{j+1}` and the root angles `B` of a
/// staircase certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct KlisArcs {
    pub c: Vec<ArcSet>,
    pub a: Vec<ArcSet>,
    pub b: Vec<f64>,
}

/// The combined symbol `v_{j,1}h_2 − v_{j,2}h_1` vanishes identically at `j`
/// (one-based), the signature of a facet geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerateCombination {
    pub j: usize,
}

pub fn klis_arcs(domain: &StaircaseDomain, h: &QuadCertificate<f64>) -> std::result::Result<KlisArcs, DegenerateCombination> {
    let mut c = Vec::with_capacity(domain.m());
    let mut b = Vec::new();
    for (j, v) in domain.normals().iter().enumerate() {
        let t = combine(*v, h);
        let scale = h.scale().max(f64::MIN_POSITIVE) * v[0].abs().max(v[1].abs());
        if t.a.norm() <= 1e-14 * scale && t.b.abs() <= 1e-14 * scale {
            return Err(DegenerateCombination { j: j + 1 });
        }
        c.push(positivity_arc(t.a, t.b).expect("combination is nonzero"));
        let r = t.a.norm();
        if r > 0.0 && (t.b.abs() - 2.0 * r).abs() <= ROOT_TOL * r.max(t.b.abs()) {
            let root = if t.b > 0.0 { t.a.arg() + PI } else { t.a.arg() };
            b.push(canonical_angle(root));
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mut a = Vec::with_capacity(c.len());
    for j in 0..c.len() {
        let next = c.get(j + 1).cloned().unwrap_or_else(ArcSet::empty);
        a.push(c[j].difference(&next));
    }
    Ok(KlisArcs { c, a, b })
}

/// `k₁ = max{j : |C_j| = 2π}`, `k₂ = min{j : |C_j| = 0}` (one-based).
pub fn klis_k1k2(measures: &[f64]) -> Result<(usize, usize)> {
    let tol = 1e-9;
    if measures.len() < 2 {
        return Err(Error::InvalidArgument("need at least two arc measures".into()));
    }
    if measures.windows(2).any(|w| w[1] > w[0] + tol) {
        return Err(Error::InvalidArgument(format!("arc measures must be nonincreasing: {measures:?}")));
    }
    if (measures[0] - TAU).abs() > tol || measures[measures.len() - 1].abs() > tol {
        return Err(Error::InvalidArgument(format!("need |C_1| = 2π and |C_m| = 0: {measures:?}")));
    }
    let k1 = measures.iter().rposition(|x| (x - TAU).abs() <= tol).unwrap() + 1;
    let k2 = measures.iter().position(|x| x.abs() <= tol).unwrap() + 1;
    Ok((k1, k2))
}

/// Unit direction `(Re(āe^{it}) + b)/‖·‖` of the disc-base boundary values.
pub fn disc_base_boundary_direction(a: [C64; 2], b: [f64; 2], t: f64) -> Result<[f64; 2]> {
    let z = unit(t);
    let u = [(a[0].conj() * z).re + b[0], (a[1].conj() * z).re + b[1]];
    let n = u[0].hypot(u[1]);
    if n <= 1e-14 * (1.0 + a[0].norm() + a[1].norm() + b[0].abs() + b[1].abs()) {
        return Err(Error::InvalidArgument(format!("boundary direction vanishes at t = {t}")));
    }
    Ok([u[0] / n, u[1] / n])
}

/// Power series `c_0 + 2Σ c_k λ^k` of the Herglotz transform of a smooth density.
#[derive(Clone, Debug)]
struct SmoothSeries {
    coeffs: Vec<Vec<C64>>,
}

impl SmoothSeries {
    /// Fourier coefficients by FFT, doubling the node count until the upper
    /// half of the spectrum is negligible.
    fn fit<F: Fn(f64) -> Vec<f64>>(dim: usize, density: F) -> Result<Self> {
        let mut planner = FftPlanner::<f64>::new();
        let mut n = 256usize;
        let max_n = 1 << 20;
        loop {
            let fft = planner.plan_fft_forward(n);
            let mut channels: Vec<Vec<C64>> = vec![Vec::with_capacity(n); dim];
            for k in 0..n {
                let v = density(TAU * k as f64 / n as f64);
                for l in 0..dim {
                    channels[l].push(C64::new(v[l], 0.0));
                }
            }
            let mut tail: f64 = 0.0;
            let mut head: f64 = 0.0;
            for ch in channels.iter_mut() {
                fft.process(ch);
                for (k, c) in ch.iter_mut().enumerate() {
                    *c /= n as f64;
                    if k <= n / 2 {
                        if k >= n / 4 {
                            tail = tail.max(c.norm());
                        } else {
                            head = head.max(c.norm());
                        }
                    }
                }
            }
            if tail <= 1e-15 * head.max(1.0) {
                let mut keep = n / 4;
                while keep > 1 && channels.iter().all(|ch| ch[keep - 1].norm() <= 1e-17 * head.max(1.0)) {
                    keep -= 1;
                }
                let coeffs = channels.into_iter().map(|ch| ch[..keep].to_vec()).collect();
                return Ok(Self { coeffs });
            }
            if n >= max_n {
                return Err(Error::Quadrature { nodes: n, change: tail });
            }
            n *= 2;
        }
    }

    fn eval(&self, lambda: C64) -> Vec<C64> {
        self.coeffs
            .iter()
            .map(|c| {
                let mut acc = C64::new(0.0, 0.0);
                for ck in c[1..].iter().rev() {
                    acc = (acc + 2.0 * ck) * lambda;
                }
                acc + c[0]
            })
            .collect()
    }

    fn derivative(&self, lambda: C64) -> Vec<C64> {
        self.coeffs
            .iter()
            .map(|c| {
                let mut acc = C64::new(0.0, 0.0);
                for (k, ck) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * lambda + 2.0 * k as f64 * ck;
                }
                acc
            })
            .collect()
    }
}

/// Boundary measure of a geodesic: either in the atom + piecewise-constant
/// class, or a smooth density (disc-base maps).
#[derive(Clone)]
pub enum BoundaryMeasure {
    Discrete(CircleMeasure<f64>),
    Smooth { dim: usize, density: Shared<dyn Fn(f64) -> Vec<f64> + Send + Sync> },
}

impl fmt::Debug for BoundaryMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMeasure::Discrete(m) => f.debug_tuple("Discrete").field(m).finish(),
            BoundaryMeasure::Smooth { dim, .. } => f.debug_struct("Smooth").field("dim", dim).finish(),
        }
    }
}

impl BoundaryMeasure {
    pub fn dim(&self) -> usize {
        match self {
            BoundaryMeasure::Discrete(m) => m.dim(),
            BoundaryMeasure::Smooth { dim, .. } => *dim,
        }
    }

    pub fn discrete(&self) -> Option<&CircleMeasure<f64>> {
        match self {
            BoundaryMeasure::Discrete(m) => Some(m),
            BoundaryMeasure::Smooth { .. } => None,
        }
    }
}

/// A geodesic family member bound to its domain.
#[derive(Clone, Debug)]
pub struct Geodesic {
    spec: GeodesicSpec<f64>,
    domain: TubeDomain,
    tangent: Option<GeodesicSpec<Dual<1>>>,
    series: Option<SmoothSeries>,
}

impl Geodesic {
    /// Binds a spec to a domain and checks admissibility; candidate specs are
    /// bound without admissibility checks since they exist to be verified.
    pub fn new(spec: GeodesicSpec<f64>, domain: TubeDomain) -> Result<Self> {
        let g = Self::assemble(spec, domain)?;
        if !matches!(g.spec, GeodesicSpec::Candidate(_)) {
            g.check_admissible()?;
        }
        Ok(g)
    }

    /// Binds a spec to a domain after structural checks only.
    pub fn assemble(spec: GeodesicSpec<f64>, domain: TubeDomain) -> Result<Self> {
        check_structure(&spec, &domain)?;
        let series = match &spec {
            GeodesicSpec::DiscBase(s) => {
                let (a, b) = (s.a, s.b);
                Some(SmoothSeries::fit(2, |t| {
                    disc_base_boundary_direction(a, b, t).map(|d| d.to_vec()).unwrap_or(vec![0.0, 0.0])
                })?)
            }
            _ => None,
        };
        let tangent = match &spec {
            GeodesicSpec::DiscBase(_) | GeodesicSpec::Candidate(_) => None,
            GeodesicSpec::Facet(f) if matches!(f.transverse, Transverse::Custom(_)) => None,
            other => Some(other.lift::<Dual<1>>()),
        };
        Ok(Self { spec, domain, tangent, series })
    }

    pub fn spec(&self) -> &GeodesicSpec<f64> {
        &self.spec
    }

    pub fn domain(&self) -> &TubeDomain {
        &self.domain
    }

    /// `Im φ(0)`.
    pub fn offset(&self) -> Vec<f64> {
        self.eval(C64::new(0.0, 0.0)).iter().map(|z| z.im).collect()
    }

    /// The certificate `h` witnessing geodesy for this family.
    pub fn certificate(&self) -> QuadCertificate<f64> {
        let zero = QuadTerm::new(C64::new(0.0, 0.0), 0.0);
        match &self.spec {
            GeodesicSpec::HalfPlane(s) => {
                let mut terms = vec![zero; s.components.len()];
                terms[s.lead] = QuadTerm::new(-s.components[s.lead].atom, 2.0);
                QuadCertificate::new(terms)
            }
            GeodesicSpec::Strip(s) => QuadCertificate::new(vec![QuadTerm::new(s.a, s.b)]),
            GeodesicSpec::Staircase(s) => s.h.clone(),
            GeodesicSpec::Facet(s) => {
                let v = self.staircase().normals()[s.facet - 1];
                QuadCertificate::new(
                    v.iter().map(|vl| QuadTerm::new(-s.normal.atom * *vl, 2.0 * vl)).collect(),
                )
            }
            GeodesicSpec::DiscBase(s) => {
                QuadCertificate::new((0..2).map(|l| QuadTerm::new(s.a[l], 2.0 * s.b[l])).collect())
            }
            GeodesicSpec::Candidate(s) => s.certificate.clone(),
        }
    }

    fn staircase(&self) -> &StaircaseDomain {
        match &self.domain {
            TubeDomain::Staircase(d) => d,
            _ => unreachable!("checked at assembly"),
        }
    }

    /// Boundary measure of the map.
    pub fn boundary_measure(&self) -> Result<BoundaryMeasure> {
        let n = self.dim();
        let m = match &self.spec {
            GeodesicSpec::HalfPlane(s) => {
                let mut mu = CircleMeasure::zero(n);
                for (k, c) in s.components.iter().enumerate() {
                    let mut unitv = vec![0.0; n];
                    unitv[k] = 1.0;
                    if c.shift != 0.0 {
                        mu = mu.with_density(crate::circle::Arc::full(), unitv.iter().map(|x| x * c.shift).collect())?;
                    }
                    if c.alpha != 0.0 {
                        mu = mu.with_atom(c.atom.arg(), unitv.iter().map(|x| x * c.alpha).collect())?;
                    }
                }
                mu
            }
            GeodesicSpec::Strip(s) => CircleMeasure::zero(1).with_density_on(&positivity_arc(s.a, s.b)?, vec![1.0])?,
            GeodesicSpec::Staircase(s) => {
                let d = self.staircase();
                let p = d.points();
                let arcs = klis_arcs(d, &s.h)
                    .map_err(|e| Error::Inadmissible(format!("combined certificate vanishes at j={}", e.j)))?;
                let mut mu = CircleMeasure::zero(2).with_density(crate::circle::Arc::full(), vec![p[1][0], p[1][1]])?;
                for j in 2..d.m() {
                    let w = vec![p[j][0] - p[j - 1][0], p[j][1] - p[j - 1][1]];
                    mu = mu.with_density_on(&arcs.c[j - 1], w)?;
                }
                for l in 0..2 {
                    if s.alpha[l] != 0.0 {
                        let mut mass = vec![0.0, 0.0];
                        mass[l] = s.alpha[l];
                        mu = mu.with_atom(s.atoms[l].arg(), mass)?;
                    }
                }
                mu
            }
            GeodesicSpec::Facet(s) => {
                let Transverse::Affine { offset, slope } = &s.transverse else {
                    return Err(Error::Unsupported("boundary measure of a custom transverse component".into()));
                };
                let (p, nrm, e) = facet_frame(self.staircase(), s.facet);
                let base: Vec<f64> = (0..2).map(|l| p[l] + offset.re * e[l] + s.normal.shift * (nrm[l] + slope * e[l])).collect();
                let dir: Vec<f64> = (0..2).map(|l| nrm[l] + slope * e[l]).collect();
                let mut mu = CircleMeasure::zero(2).with_density(crate::circle::Arc::full(), base)?;
                if s.normal.alpha != 0.0 {
                    mu = mu.with_atom(s.normal.atom.arg(), dir.iter().map(|x| x * s.normal.alpha).collect())?;
                }
                mu
            }
            GeodesicSpec::DiscBase(s) => {
                let (a, b) = (s.a, s.b);
                return Ok(BoundaryMeasure::Smooth {
                    dim: 2,
                    density: Shared::new(move |t| {
                        disc_base_boundary_direction(a, b, t).map(|d| d.to_vec()).unwrap_or(vec![0.0, 0.0])
                    }),
                });
            }
            GeodesicSpec::Candidate(s) => s.measure.clone(),
        };
        Ok(BoundaryMeasure::Discrete(m))
    }

    /// Sets `C_j`, `A_j`, `B` for staircase specs.
    pub fn klis_arcs(&self) -> Option<KlisArcs> {
        match (&self.spec, &self.domain) {
            (GeodesicSpec::Staircase(s), TubeDomain::Staircase(d)) => klis_arcs(d, &s.h).ok(),
            _ => None,
        }
    }

    fn check_admissible(&self) -> Result<()> {
        match &self.spec {
            GeodesicSpec::HalfPlane(s) => {
                for (k, c) in s.components.iter().enumerate() {
                    if k == s.lead {
                        if !(c.alpha < 0.0) || c.shift != 0.0 {
                            return Err(Error::Inadmissible(format!("lead coordinate {k} needs α < 0 and no shift")));
                        }
                    } else if c.shift > 0.0 || c.alpha > 0.0 || (c.shift == 0.0 && c.alpha == 0.0) {
                        return Err(Error::Inadmissible(format!("coordinate {k} needs c ≤ 0, α ≤ 0, not both zero")));
                    }
                    if c.alpha != 0.0 && (c.atom.norm() - 1.0).abs() > 1e-12 {
                        return Err(Error::Inadmissible(format!("atom of coordinate {k} is off the circle")));
                    }
                }
            }
            GeodesicSpec::Strip(s) => {
                if !(s.b.abs() < 2.0 * s.a.norm()) {
                    return Err(Error::DegenerateStripCertificate { a: format!("{}", s.a), b: s.b });
                }
            }
            GeodesicSpec::Staircase(s) => {
                for l in 0..2 {
                    let t = s.h.terms[l];
                    if !crate::hfun::is_nonneg_on_circle(t.a, t.b) {
                        return Err(Error::Inadmissible(format!("symbol of h_{} changes sign", l + 1)));
                    }
                    if s.alpha[l] > 0.0 {
                        return Err(Error::Inadmissible(format!("α_{} must be ≤ 0", l + 1)));
                    }
                    if s.alpha[l] < 0.0 {
                        let root = crate::hfun::circle_root(t.a, t.b)?;
                        let ok = root.map(|r| (unit(r) - s.atoms[l]).norm() <= 1e-8).unwrap_or(false);
                        if !ok {
                            return Err(Error::Inadmissible(format!(
                                "atom {} must sit at the zero of the symbol of h_{}",
                                l + 1,
                                l + 1
                            )));
                        }
                    }
                }
                let arcs = klis_arcs(self.staircase(), &s.h)
                    .map_err(|e| Error::Inadmissible(format!("combined certificate vanishes identically at j={}", e.j)))?;
                let measures: Vec<f64> = arcs.c.iter().map(|c| c.measure()).collect();
                klis_k1k2(&measures).map_err(|e| Error::Inadmissible(e.to_string()))?;
                for j in 1..arcs.c.len() {
                    if !arcs.c[j].difference(&arcs.c[j - 1]).is_empty()
                        && arcs.c[j].difference(&arcs.c[j - 1]).measure() > 1e-9
                    {
                        return Err(Error::Inadmissible(format!("C_{} is not contained in C_{}", j + 1, j)));
                    }
                }
            }
            GeodesicSpec::Facet(s) => {
                if !(s.normal.alpha < 0.0) || (s.normal.atom.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::Inadmissible("facet normal part needs α < 0 and a circle atom".into()));
                }
                if let Transverse::Affine { slope, .. } = s.transverse {
                    if !slope.is_finite() {
                        return Err(Error::Inadmissible("transverse slope must be finite".into()));
                    }
                }
            }
            GeodesicSpec::DiscBase(s) => {
                if s.a.iter().all(|a| a.norm() == 0.0) {
                    return Err(Error::Inadmissible("constant boundary direction: the image lies on the boundary".into()));
                }
                for k in 0..4096 {
                    disc_base_boundary_direction(s.a, s.b, TAU * (k as f64 + 0.5) / 4096.0)
                        .map_err(|e| Error::Inadmissible(e.to_string()))?;
                }
            }
            GeodesicSpec::Candidate(_) => {}
        }
        self.check_image()
    }

    /// Sampled test of `φ(𝔻) ⊂ D` on a 64 × 16 polar grid plus radial probes
    /// next to the singular angles. Points with `|λ| ≤ 0.9` must be inside by
    /// a margin; closer to the circle only rounding-level excursions are allowed.
    pub fn check_image(&self) -> Result<()> {
        let mut probes: Vec<C64> = Vec::new();
        for i in 0..16 {
            let r = 1.0 - 2f64.powf(-(i as f64 + 1.0) * 20.0 / 16.0);
            for k in 0..64 {
                probes.push(C64::from_polar(r, TAU * (k as f64 + 0.5) / 64.0));
            }
        }
        probes.push(C64::new(0.0, 0.0));
        for t in self.singular_angles() {
            for dt in [-1e-2, -1e-3, 0.0, 1e-3, 1e-2] {
                for r in [0.99, 0.999, 0.9999] {
                    probes.push(C64::from_polar(r, t + dt));
                }
            }
        }
        let scale = match &self.domain {
            TubeDomain::Staircase(d) => d.points().iter().flatten().fold(1.0f64, |s, x| s.max(x.abs())),
            _ => 1.0,
        };
        for lambda in probes {
            let x: Vec<f64> = self.eval(lambda).iter().map(|z| z.re).collect();
            let margin = self.domain.margin(&x);
            let allowed = if lambda.norm() <= 0.9 { -1e-9 * scale } else { 1e-9 * scale };
            if !(margin < allowed) {
                return Err(Error::Inadmissible(format!(
                    "image leaves the domain: φ({lambda}) has real part {x:?} (margin {margin:e})"
                )));
            }
        }
        Ok(())
    }

    /// Pre-composes with the automorphism `M(ζ) = (e^{iθ}ζ + d)/(1 + d̄e^{iθ}ζ)`.
    pub fn compose_automorphism(&self, d: C64, theta: f64) -> Result<Self> {
        if !(d.norm() < 1.0) {
            return Err(Error::DegenerateMobius(d.norm()));
        }
        let z0 = self.eval(d);
        let pull_atom = |atom: C64, alpha: f64| -> (C64, f64) {
            (invert_automorphism(d, theta, atom), alpha * inverse_automorphism_scale(d, atom))
        };
        let pull_term = |t: &QuadTerm<f64>| -> QuadTerm<f64> {
            let a = unit(-theta) * t.eval(d);
            let b = t.b * (1.0 + d.norm_sqr()) + 4.0 * (t.a.conj() * d).re;
            QuadTerm::new(a, b)
        };
        let spec = match &self.spec {
            GeodesicSpec::HalfPlane(s) => GeodesicSpec::HalfPlane(HalfPlaneSpec {
                lead: s.lead,
                components: s
                    .components
                    .iter()
                    .zip(&z0)
                    .map(|(c, z)| {
                        if c.alpha == 0.0 {
                            return *c;
                        }
                        let (atom, alpha) = pull_atom(c.atom, c.alpha);
                        let shift = if c.shift == 0.0 { 0.0 } else { z.re - alpha / TAU };
                        HalfPlaneComponent { shift, alpha, atom, beta: z.im }
                    })
                    .collect(),
            }),
            GeodesicSpec::Strip(s) => {
                let t = pull_term(&QuadTerm::new(s.a, s.b));
                GeodesicSpec::Strip(StripSpec { a: t.a, b: t.b, offset: z0[0].im })
            }
            GeodesicSpec::Staircase(s) => {
                let mut alpha = s.alpha;
                let mut atoms = s.atoms;
                for l in 0..2 {
                    if s.alpha[l] != 0.0 {
                        let (a, m) = pull_atom(s.atoms[l], s.alpha[l]);
                        atoms[l] = a;
                        alpha[l] = m;
                    } else {
                        atoms[l] = invert_automorphism(d, theta, s.atoms[l]);
                    }
                }
                GeodesicSpec::Staircase(StaircaseSpec {
                    h: QuadCertificate::new(s.h.terms.iter().map(pull_term).collect()),
                    alpha,
                    atoms,
                    beta: [z0[0].im, z0[1].im],
                })
            }
            GeodesicSpec::Facet(s) => {
                let Transverse::Affine { .. } = s.transverse else {
                    return Err(Error::Unsupported("re-parametrizing a custom transverse component".into()));
                };
                let g0 = s.normal.eval(d);
                let (atom, alpha) = pull_atom(s.normal.atom, s.normal.alpha);
                GeodesicSpec::Facet(FacetSpec {
                    facet: s.facet,
                    normal: HalfPlaneComponent { shift: s.normal.shift, alpha, atom, beta: g0.im },
                    transverse: s.transverse.clone(),
                })
            }
            GeodesicSpec::DiscBase(s) => {
                let t: Vec<QuadTerm<f64>> = (0..2).map(|l| pull_term(&QuadTerm::new(s.a[l], 2.0 * s.b[l]))).collect();
                GeodesicSpec::DiscBase(DiscBaseSpec {
                    a: [t[0].a, t[1].a],
                    b: [0.5 * t[0].b, 0.5 * t[1].b],
                    offset: [z0[0].im, z0[1].im],
                })
            }
            GeodesicSpec::Candidate(s) => {
                if !s.measure.pieces.is_empty() {
                    return Err(Error::Unsupported("densities leave the piecewise-constant class under automorphisms".into()));
                }
                let mut mu = CircleMeasure::zero(s.measure.dim());
                for a in &s.measure.atoms {
                    let scale = inverse_automorphism_scale(d, unit(a.angle));
                    let moved = invert_automorphism(d, theta, unit(a.angle));
                    mu = mu.with_atom(moved.arg(), a.mass.iter().map(|m| m * scale).collect())?;
                }
                let certificate = QuadCertificate::new(s.certificate.terms.iter().map(pull_term).collect());
                let mut cand = CandidateSpec { measure: mu, offset: vec![0.0; s.offset.len()], certificate };
                let at0 = herglotz_transform(&cand.measure, C64::new(0.0, 0.0), &cand.offset)?;
                cand.offset = z0.iter().zip(&at0).map(|(z, v)| z.im - v.im).collect();
                GeodesicSpec::Candidate(cand)
            }
        };
        Self::assemble(spec, self.domain.clone())
    }

    /// Checks that this map agrees with `λ ↦ self(M(λ))` on a few points; used
    /// by tests and by the solver after alignment.
    pub fn agrees_with_composition(&self, original: &Geodesic, d: C64, theta: f64, tol: f64) -> bool {
        (0..12).all(|k| {
            let zeta = C64::from_polar(0.6, 0.5 * k as f64);
            let a = self.eval(zeta);
            let b = original.eval(apply_automorphism(d, theta, zeta));
            a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
        })
    }
}

fn check_structure(spec: &GeodesicSpec<f64>, domain: &TubeDomain) -> Result<()> {
    let mismatch = || Error::InvalidArgument(format!("{} spec does not fit a {} domain", spec.kind(), domain.name()));
    match (spec, domain) {
        (GeodesicSpec::HalfPlane(s), TubeDomain::HalfPlaneProduct { n }) => {
            if s.components.len() != *n {
                return Err(Error::Dimension { expected: *n, got: s.components.len() });
            }
            if s.lead >= *n {
                return Err(Error::InvalidArgument(format!("lead coordinate {} out of range", s.lead)));
            }
        }
        (GeodesicSpec::Strip(_), TubeDomain::Strip) => {}
        (GeodesicSpec::Staircase(s), TubeDomain::Staircase(_)) => {
            if s.h.dim() != 2 {
                return Err(Error::Dimension { expected: 2, got: s.h.dim() });
            }
            if s.h.is_zero() {
                return Err(Error::ZeroCertificate);
            }
        }
        (GeodesicSpec::Facet(s), TubeDomain::Staircase(d)) => {
            if s.facet == 0 || s.facet > d.m() {
                return Err(Error::InvalidArgument(format!("facet {} out of range 1..={}", s.facet, d.m())));
            }
            if let Transverse::Custom(m) = &s.transverse {
                if m.dim() != 1 {
                    return Err(Error::Dimension { expected: 1, got: m.dim() });
                }
            }
        }
        (GeodesicSpec::DiscBase(_), TubeDomain::DiscBase) => {}
        (GeodesicSpec::Candidate(s), d) => {
            if s.measure.dim() != d.dim() || s.offset.len() != d.dim() || s.certificate.dim() != d.dim() {
                return Err(Error::Dimension { expected: d.dim(), got: s.measure.dim() });
            }
        }
        _ => return Err(mismatch()),
    }
    Ok(())
}

impl DiscMap for Geodesic {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn eval(&self, lambda: C64) -> Vec<C64> {
        if let Some(series) = &self.series {
            let s = match &self.spec {
                GeodesicSpec::DiscBase(s) => s,
                _ => unreachable!(),
            };
            return series
                .eval(lambda)
                .into_iter()
                .zip(s.offset)
                .map(|(v, o)| v + C64::new(0.0, o))
                .collect();
        }
        eval_closed_form(&self.spec, &self.domain, lambda).expect("structure checked at assembly")
    }

    fn derivative(&self, lambda: C64) -> Vec<C64> {
        if let Some(series) = &self.series {
            return series.derivative(lambda);
        }
        if let Some(t) = &self.tangent {
            let l = Complex::new(Dual::<1>::variable(lambda.re, 0), Dual::constant(lambda.im));
            return eval_closed_form(t, &self.domain, l)
                .expect("structure checked at assembly")
                .into_iter()
                .map(|z| C64::new(z.re.eps[0], z.im.eps[0]))
                .collect();
        }
        match &self.spec {
            GeodesicSpec::Candidate(s) => herglotz_derivative(&s.measure, lambda).expect("inside the disc"),
            GeodesicSpec::Facet(s) => {
                let Transverse::Custom(m) = &s.transverse else { unreachable!() };
                let (_, n, e) = facet_frame(self.staircase(), s.facet);
                let g = s.normal.derivative(lambda);
                let t = m.derivative(lambda)[0];
                (0..2).map(|l| g * n[l] + t * e[l]).collect()
            }
            _ => unreachable!(),
        }
    }

    fn singular_angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match &self.spec {
            GeodesicSpec::HalfPlane(s) => {
                out.extend(s.components.iter().filter(|c| c.alpha != 0.0).map(|c| c.atom.arg()));
            }
            GeodesicSpec::Strip(s) => {
                if let Ok(arc) = positivity_arc(s.a, s.b) {
                    out.extend(arc.boundary_angles());
                }
            }
            GeodesicSpec::Staircase(s) => {
                out.extend((0..2).filter(|&l| s.alpha[l] != 0.0).map(|l| s.atoms[l].arg()));
                if let Some(k) = self.klis_arcs() {
                    for c in &k.c {
                        out.extend(c.boundary_angles());
                    }
                }
            }
            GeodesicSpec::Facet(s) => {
                out.push(s.normal.atom.arg());
                if let Transverse::Custom(m) = &s.transverse {
                    out.extend(m.singular_angles());
                }
            }
            GeodesicSpec::DiscBase(_) => {}
            GeodesicSpec::Candidate(s) => {
                out.extend(s.measure.atom_angles());
                out.extend(s.measure.breakpoints());
            }
        }
        let mut out: Vec<f64> = out.into_iter().map(canonical_angle).collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    fn radial_limit_real(&self, t: f64) -> Option<Vec<f64>> {
        match &self.spec {
            GeodesicSpec::DiscBase(s) => disc_base_boundary_direction(s.a, s.b, t).ok().map(|d| d.to_vec()),
            _ => None,
        }
    }
}

/// `λ ↦ V·φ(λ)` for a real matrix `V` of full row rank.
pub struct Projection<'a> {
    rows: Vec<Vec<f64>>,
    inner: &'a dyn DiscMap,
}

pub fn project<'a>(rows: Vec<Vec<f64>>, inner: &'a dyn DiscMap) -> Result<Projection<'a>> {
    let n = inner.dim();
    if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, got: rows.first().map(|r| r.len()).unwrap_or(0) });
    }
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    if m.rank(1e-12) < rows.len() {
        return Err(Error::InvalidArgument("projection matrix must have full row rank".into()));
    }
    Ok(Projection { rows, inner })
}

impl Projection<'_> {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn act(&self, v: Vec<C64>) -> Vec<C64> {
        self.rows.iter().map(|r| r.iter().zip(&v).map(|(a, z)| z * *a).sum()).collect()
    }
}

impl DiscMap for Projection<'_> {
    fn dim(&self) -> usize {
        self.rows.len()
    }
    fn eval(&self, lambda: C64) -> Vec<C64> {
        self.act(self.inner.eval(lambda))
    }
    fn derivative(&self, lambda: C64) -> Vec<C64> {
        self.act(self.inner.derivative(lambda))
    }
    fn singular_angles(&self) -> Vec<f64> {
        self.inner.singular_angles()
    }
    fn radial_limit_real(&self, t: f64) -> Option<Vec<f64>> {
        self.inner
            .radial_limit_real(t)
            .map(|v| self.rows.iter().map(|r| r.iter().zip(&v).map(|(a, x)| a * x).sum()).collect())
    }
}

/// One-dimensional half-plane geodesic through `z` at `0` and `w` at `σ > 0`:
/// `α = 2π Re z`, `β = Im z`, `σ = |z − w|/|z + w̄|`.
pub fn halfplane_through(z: C64, w: C64) -> Result<(HalfPlaneComponent<f64>, f64)> {
    if !(z.re < 0.0 && w.re < 0.0) {
        return Err(Error::InvalidArgument("points must lie in the left half-plane".into()));
    }
    let sigma = (z - w).norm() / (z + w.conj()).norm();
    if sigma == 0.0 {
        return Err(Error::InvalidArgument("endpoints coincide".into()));
    }
    let alpha = TAU * z.re;
    let g = (w - C64::new(0.0, z.im)) * TAU / alpha;
    let atom = sigma * (g + 1.0) / (g - 1.0);
    let atom = atom / atom.norm();
    Ok((HalfPlaneComponent { shift: 0.0, alpha, atom, beta: z.im }, sigma))
}

/// Component `c + (α/2π)(λ₀+λ)/(λ₀−λ) + iβ` with `c, α ≤ 0` through `z` at `0`
/// and `w` at a given `σ`; requires the half-plane distance of `z, w` not to
/// exceed that of `0, σ`.
pub fn halfplane_component_through(z: C64, w: C64, sigma: f64) -> Result<HalfPlaneComponent<f64>> {
    let delta = w - z;
    if delta.norm() <= 1e-15 * (1.0 + z.norm()) {
        return Ok(HalfPlaneComponent { shift: z.re, alpha: 0.0, atom: C64::new(1.0, 0.0), beta: z.im });
    }
    let d = 1.0 / delta;
    let (a, b, c) = (d.norm_sqr(), 2.0 * d.re, 1.0 - 1.0 / (sigma * sigma));
    let x = (-b - (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
    let alpha = PI * x;
    let atom = sigma * (1.0 + x * d);
    let atom = atom / atom.norm();
    let shift = z.re - alpha / TAU;
    if shift > 1e-12 * (1.0 + z.norm()) {
        return Err(Error::InvalidArgument(format!("no half-plane component reaches {w} from {z} at σ = {sigma}")));
    }
    Ok(HalfPlaneComponent { shift: shift.min(0.0), alpha, atom, beta: z.im })
}

/// Strip geodesic through `z` at `0` and `w` at `σ > 0`, normalized to `|a| = 1/2`.
pub fn strip_through(z: C64, w: C64) -> Result<(StripSpec<f64>, f64)> {
    if !(z.re > 0.0 && z.re < 1.0 && w.re > 0.0 && w.re < 1.0) {
        return Err(Error::InvalidArgument("points must lie in the strip".into()));
    }
    let c = (C64::new(0.0, 1.0) * strip_map_inverse(C64::new(z.re, 0.0))).re;
    let omega = strip_map_inverse(w - C64::new(0.0, z.im));
    let back = mobius_unchecked(C64::new(-c, 0.0), C64::new(0.0, -1.0) * omega);
    let sigma = back.norm();
    if sigma <= 1e-15 {
        return Err(Error::InvalidArgument("endpoints coincide".into()));
    }
    let u = back / sigma;
    let a = 0.5 * u.conj();
    let b = -2.0 * c / (1.0 + c * c);
    Ok((StripSpec { a, b, offset: z.im }, sigma))
}
