//! Two-point interpolation: a geodesic `φ` with `φ(0) = z` and `φ(σ) = w`.
//!
//! Half-plane products and the strip have closed forms. Staircase domains are
//! searched case by case with a damped Gauss–Newton fit of the endpoint
//! equations, and every candidate is verified before it is returned.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::circle::automorphism_through;
use crate::domain::{StaircaseDomain, TubeDomain};
use crate::error::Error;
use crate::geodesic::{
    eval_staircase, halfplane_component_through, halfplane_through, strip_through, DiscMap, FacetSpec, Geodesic,
    GeodesicSpec, HalfPlaneSpec, StaircaseSpec, Transverse,
};
use crate::hfun::{QuadCertificate, QuadTerm};
use crate::scalar::{Dual, Real};
use crate::verify::{check_left_inverse, left_inverse_value, verify_geodesic, ContourSettings, Level, VerificationReport, VerifySettings};

type C64 = Complex<f64>;

/// Staircase search cases, in the default priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// Atoms at the roots of both certificate coordinates.
    BothAtoms,
    /// Atom in one coordinate (zero-based) only.
    OneAtom(usize),
    NoAtoms,
    /// The map projects onto a half-plane geodesic across facet `j` (one-based).
    Facet(usize),
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::BothAtoms => write!(f, "both_atoms"),
            Case::OneAtom(l) => write!(f, "atom_{}", l + 1),
            Case::NoAtoms => write!(f, "no_atoms"),
            Case::Facet(j) => write!(f, "facet_{j}"),
        }
    }
}

/// Default case order for a staircase with `m` facets.
pub fn default_cases(m: usize) -> Vec<Case> {
    let mut out = vec![Case::BothAtoms, Case::OneAtom(0), Case::OneAtom(1), Case::NoAtoms];
    out.extend((1..=m).map(Case::Facet));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Case order; `None` uses [`default_cases`].
    pub cases: Option<Vec<Case>>,
    pub multistart: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Endpoint residual accepted from the fit.
    pub fit_tol: f64,
    /// Left-inverse residual required for acceptance.
    pub verify_tol: f64,
    pub verify: VerifySettings,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            cases: None,
            multistart: 48,
            seed: 0,
            max_iterations: 200,
            fit_tol: 1e-11,
            verify_tol: 1e-7,
            verify: VerifySettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveProblem {
    pub domain: TubeDomain,
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub options: SolveOptions,
}

impl SolveProblem {
    pub fn new(domain: TubeDomain, z: Vec<C64>, w: Vec<C64>) -> Result<Self, Error> {
        let p = Self { domain, z, w, options: SolveOptions::default() };
        p.check()?;
        Ok(p)
    }

    pub fn with_options(mut self, options: SolveOptions) -> Self {
        self.options = options;
        self
    }

    fn check(&self) -> Result<(), Error> {
        let n = self.domain.dim();
        for p in [&self.z, &self.w] {
            if p.len() != n {
                return Err(Error::Dimension { expected: n, got: p.len() });
            }
            if !self.domain.contains(p) {
                return Err(Error::InvalidArgument(format!("endpoint {p:?} is not in the domain")));
            }
        }
        if self.z == self.w {
            return Err(Error::InvalidArgument("endpoints coincide".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveSolution {
    pub geodesic: Geodesic,
    pub sigma: f64,
    /// `max(|φ(0) − z|, |φ(σ) − w|)`.
    pub residual: f64,
    pub case: String,
    pub report: VerificationReport,
}

impl SolveSolution {
    pub fn spec(&self) -> &GeodesicSpec<f64> {
        self.geodesic.spec()
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("no verified geodesic within budget; best endpoint residual per case: {}", format_best(.best))]
    Budget { best: Vec<(String, f64)> },
}

fn format_best(best: &[(String, f64)]) -> String {
    best.iter().map(|(c, r)| format!("{c}={r:.3e}")).collect::<Vec<_>>().join(", ")
}

fn endpoint_residual(g: &Geodesic, z: &[C64], w: &[C64], sigma: f64) -> f64 {
    let a = g.eval(C64::new(0.0, 0.0));
    let b = g.eval(C64::new(sigma, 0.0));
    let ea = a.iter().zip(z).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let eb = b.iter().zip(w).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    ea.max(eb)
}

/// Finds a verified geodesic through `z` (at `0`) and `w` (at `σ ∈ (0, 1)`).
pub fn solve_two_point(problem: &SolveProblem) -> Result<SolveSolution, SolveError> {
    problem.check()?;
    let (z, w) = (&problem.z, &problem.w);
    let opts = &problem.options;
    match &problem.domain {
        TubeDomain::HalfPlaneProduct { n } => {
            let rho: Vec<f64> = (0..*n).map(|l| (z[l] - w[l]).norm() / (z[l] + w[l].conj()).norm()).collect();
            let lead = (0..*n).max_by(|a, b| rho[*a].total_cmp(&rho[*b])).unwrap();
            let (first, sigma) = halfplane_through(z[lead], w[lead])?;
            let mut components = Vec::with_capacity(*n);
            for l in 0..*n {
                components.push(if l == lead { first } else { halfplane_component_through(z[l], w[l], sigma)? });
            }
            let spec = GeodesicSpec::HalfPlane(HalfPlaneSpec { lead, components });
            finish(spec, problem, sigma, "halfplane".into()).map_err(|r| SolveError::Budget { best: vec![("halfplane".into(), r)] })
        }
        TubeDomain::Strip => {
            let (spec, sigma) = strip_through(z[0], w[0])?;
            finish(GeodesicSpec::Strip(spec), problem, sigma, "strip".into())
                .map_err(|r| SolveError::Budget { best: vec![("strip".into(), r)] })
        }
        TubeDomain::Staircase(d) => {
            let cases = opts.cases.clone().unwrap_or_else(|| default_cases(d.m()));
            let mut best = Vec::new();
            for case in cases {
                match solve_case(d, problem, case) {
                    Ok(sol) => return Ok(sol),
                    Err(r) => best.push((case.to_string(), r)),
                }
            }
            Err(SolveError::Budget { best })
        }
        TubeDomain::DiscBase => Err(Error::Unsupported("two-point solving on the disc base".into()).into()),
    }
}

/// Builds, checks and verifies a candidate; on rejection returns its endpoint residual.
fn finish(spec: GeodesicSpec<f64>, problem: &SolveProblem, sigma: f64, case: String) -> Result<SolveSolution, f64> {
    let Ok(g) = Geodesic::new(spec, problem.domain.clone()) else {
        return Err(f64::INFINITY);
    };
    let residual = endpoint_residual(&g, &problem.z, &problem.w, sigma);
    if !(residual <= 1e-8 * (1.0 + problem.z.iter().chain(&problem.w).map(|c| c.norm()).fold(0.0, f64::max))) {
        return Err(residual);
    }
    let opts = &problem.options;
    let inverse = check_left_inverse(&g, &g.certificate(), &opts.verify);
    match inverse.left_inverse_residual {
        Some(r) if r < opts.verify_tol => {}
        _ => return Err(residual),
    }
    let report = verify_geodesic(&g, Level::All, &opts.verify).map_err(|_| residual)?;
    if report.status() == crate::verify::Status::Fail {
        return Err(residual);
    }
    Ok(SolveSolution { geodesic: g, sigma, residual, case, report })
}

fn solve_case(d: &StaircaseDomain, problem: &SolveProblem, case: Case) -> Result<SolveSolution, f64> {
    match case {
        Case::Facet(j) => solve_facet(d, problem, j),
        Case::BothAtoms => solve_fit(d, problem, [true, true], case),
        Case::OneAtom(l) => solve_fit(d, problem, [l == 0, l == 1], case),
        Case::NoAtoms => solve_fit(d, problem, [false, false], case),
    }
}

fn solve_facet(d: &StaircaseDomain, problem: &SolveProblem, j: usize) -> Result<SolveSolution, f64> {
    if j == 0 || j > d.m() {
        return Err(f64::INFINITY);
    }
    let v = d.normals()[j - 1];
    let p = d.points()[j];
    let e = [-v[1], v[0]];
    let pair = |x: &[C64], u: [f64; 2]| (x[0] - p[0]) * u[0] + (x[1] - p[1]) * u[1];
    let (gz, gw) = (pair(&problem.z, v), pair(&problem.w, v));
    let (tz, tw) = (pair(&problem.z, e), pair(&problem.w, e));
    let Ok((normal, sigma)) = halfplane_through(gz, gw) else {
        return Err(f64::INFINITY);
    };
    let slope = (tw - tz) / (gw - gz);
    if slope.im.abs() > 1e-10 * (1.0 + slope.norm()) {
        return Err(slope.im.abs());
    }
    let slope = slope.re;
    let transverse = Transverse::Affine { offset: tz - gz * slope, slope };
    let spec = GeodesicSpec::Facet(FacetSpec { facet: j, normal, transverse });
    finish(spec, problem, sigma, Case::Facet(j).to_string())
}

/// Unknowns: `χ` (with `|a₁| = cos χ`, `|a₂| = sin χ`), `arg a₁`, `arg a₂`,
/// one log-parameter per coordinate (atom mass, or excess of `b_l` over
/// `2|a_l|`), and the logit of `σ`.
const UNKNOWNS: usize = 6;

fn logistic<T: Real>(s: T) -> T {
    T::one() / (T::one() + (-s).exp())
}

fn build_spec<T: Real>(x: &[T; UNKNOWNS], atoms: [bool; 2]) -> StaircaseSpec<T> {
    let r = [x[0].cos(), x[0].sin()];
    let mut terms = Vec::with_capacity(2);
    let mut alpha = [T::zero(); 2];
    let mut roots = [Complex::new(T::one(), T::zero()); 2];
    for l in 0..2 {
        let dir = Complex::new(x[1 + l].cos(), x[1 + l].sin());
        let a = dir * r[l];
        let two_r = T::of(2.0) * r[l];
        if atoms[l] {
            terms.push(QuadTerm::new(a, two_r));
            alpha[l] = -x[3 + l].exp();
            roots[l] = -dir;
        } else {
            terms.push(QuadTerm::new(a, two_r + x[3 + l].exp()));
        }
    }
    StaircaseSpec { h: QuadCertificate::new(terms), alpha, atoms: roots, beta: [T::zero(); 2] }
}

/// Endpoint equations: `Re φ(0) = Re z` and `φ(σ) = w`, with `β` fixed by `Im φ(0) = Im z`.
fn equations<T: Real>(d: &StaircaseDomain, x: &[T; UNKNOWNS], atoms: [bool; 2], z: &[C64], w: &[C64]) -> ([T; UNKNOWNS], StaircaseSpec<T>, T) {
    let mut spec = build_spec(x, atoms);
    let zero = Complex::new(T::zero(), T::zero());
    let at0 = eval_staircase(d, &spec, zero);
    spec.beta = [T::of(z[0].im) - at0[0].im, T::of(z[1].im) - at0[1].im];
    let sigma = logistic(x[5]);
    let at = eval_staircase(d, &spec, Complex::new(sigma, T::zero()));
    let f = [
        at0[0].re - T::of(z[0].re),
        at0[1].re - T::of(z[1].re),
        at[0].re - T::of(w[0].re),
        at[0].im - T::of(w[0].im),
        at[1].re - T::of(w[1].re),
        at[1].im - T::of(w[1].im),
    ];
    (f, spec, sigma)
}

type Vec6 = SVector<f64, UNKNOWNS>;
type Mat6 = SMatrix<f64, UNKNOWNS, UNKNOWNS>;

fn residual_and_jacobian(d: &StaircaseDomain, x: &Vec6, atoms: [bool; 2], z: &[C64], w: &[C64]) -> (Vec6, Mat6) {
    let xd: [Dual<UNKNOWNS>; UNKNOWNS] = std::array::from_fn(|k| Dual::variable(x[k], k));
    let (f, _, _) = equations(d, &xd, atoms, z, w);
    let r = Vec6::from_fn(|i, _| f[i].re);
    let j = Mat6::from_fn(|i, k| f[i].eps[k]);
    (r, j)
}

fn residual_only(d: &StaircaseDomain, x: &Vec6, atoms: [bool; 2], z: &[C64], w: &[C64]) -> Vec6 {
    let xa: [f64; UNKNOWNS] = std::array::from_fn(|k| x[k]);
    let (f, _, _) = equations(d, &xa, atoms, z, w);
    Vec6::from_fn(|i, _| f[i])
}

/// Levenberg–Marquardt from `x0`; returns the final point and residual norm.
fn levenberg_marquardt(d: &StaircaseDomain, x0: Vec6, atoms: [bool; 2], z: &[C64], w: &[C64], iterations: usize, tol: f64) -> (Vec6, f64) {
    let mut x = x0;
    let mut mu = 1e-3;
    let (mut r, mut j) = residual_and_jacobian(d, &x, atoms, z, w);
    let mut cost = r.norm();
    for _ in 0..iterations {
        if !cost.is_finite() || cost <= tol {
            break;
        }
        let jt = j.transpose();
        let jtj = jt * j;
        let g = jt * r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj;
            for k in 0..UNKNOWNS {
                a[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.lu().solve(&(-g)) else {
                mu *= 10.0;
                continue;
            };
            let trial = x + step;
            let rt = residual_only(d, &trial, atoms, z, w);
            let ct = rt.norm();
            if ct.is_finite() && ct < cost {
                x = trial;
                (r, j) = residual_and_jacobian(d, &x, atoms, z, w);
                cost = r.norm();
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, cost)
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Deterministic low-discrepancy starting points (Halton, shifted by the seed).
fn starting_points(count: usize, seed: u64) -> Vec<Vec6> {
    const BASES: [u64; UNKNOWNS] = [2, 3, 5, 7, 11, 13];
    let ranges = [(0.05, FRAC_PI_2 - 0.05), (0.0, TAU), (0.0, TAU), (-1.0, 3.0), (-1.0, 3.0), (-2.0, 2.0)];
    (0..count)
        .map(|k| {
            let idx = k as u64 + 1 + seed.wrapping_mul(7919) % 100_003;
            Vec6::from_fn(|i, _| {
                let u = radical_inverse(idx, BASES[i]);
                ranges[i].0 + u * (ranges[i].1 - ranges[i].0)
            })
        })
        .collect()
}

/// Rescales a certificate to `Σ|a_l|² + Σb_l² = 1`.
fn unit_gauge(h: &QuadCertificate<f64>) -> QuadCertificate<f64> {
    let n: f64 = h.terms.iter().map(|t| t.a.norm_sqr() + t.b * t.b).sum::<f64>().sqrt();
    h.scaled(1.0 / n)
}

fn solve_fit(d: &StaircaseDomain, problem: &SolveProblem, atoms: [bool; 2], case: Case) -> Result<SolveSolution, f64> {
    let opts = &problem.options;
    let (z, w) = (&problem.z, &problem.w);
    let scale = 1.0 + z.iter().chain(w).map(|c| c.norm()).fold(0.0, f64::max);
    let starts = starting_points(opts.multistart, opts.seed);
    let fits: Vec<(Vec6, f64)> = starts
        .par_iter()
        .map(|x0| levenberg_marquardt(d, *x0, atoms, z, w, opts.max_iterations, opts.fit_tol * scale))
        .collect();
    let mut best = f64::INFINITY;
    let mut tried: Vec<Vec6> = Vec::new();
    for (x, cost) in fits {
        best = best.min(cost);
        if !(cost <= 1e-9 * scale) {
            continue;
        }
        let sigma = logistic(x[5]);
        // converged starts often land on the same point
        if tried.iter().any(|y| (y - x).norm() < 1e-8) || !(sigma > 0.0 && sigma < 1.0) {
            continue;
        }
        tried.push(x);
        let xa: [f64; UNKNOWNS] = std::array::from_fn(|k| x[k]);
        let (_, mut spec, sigma) = equations(d, &xa, atoms, z, w);
        spec.h = unit_gauge(&spec.h);
        if let Ok(sol) = finish(GeodesicSpec::Staircase(spec), problem, sigma, case.to_string()) {
            return Ok(sol);
        }
    }
    Err(best)
}

/// Re-parametrizes a geodesic through `z` and `w` so that `φ(0) = z` and
/// `φ(σ) = w` with `σ ∈ (0, 1)`; the preimages are found with the left inverse.
pub fn align_by_automorphism(g: &Geodesic, z: &[C64], w: &[C64], contour: &ContourSettings) -> Result<(Geodesic, f64), Error> {
    let h = g.certificate();
    let pre = |p: &[C64]| {
        left_inverse_value(g, &h, p, contour).map(|f| f.value).map_err(|e| Error::InvalidArgument(e.to_string()))
    };
    let (s1, s2) = (pre(z)?, pre(w)?);
    let (d, theta, sigma) = automorphism_through(s1, s2)?;
    if sigma == 0.0 {
        return Err(Error::InvalidArgument("endpoints have the same preimage".into()));
    }
    if d == C64::new(0.0, 0.0) && theta == 0.0 {
        return Ok((g.clone(), sigma));
    }
    Ok((g.compose_automorphism(d, theta)?, sigma))
}
