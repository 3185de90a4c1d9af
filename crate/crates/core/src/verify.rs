//! Checkers: the boundary-measure sign condition, the radial conditions, the
//! interior function `ψ_z`, vertex limits of staircase maps, and the
//! contour-integral left inverse with the distance sandwich.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;

use crate::circle::{angle_grid, canonical_angle, poincare_distance, unit, Arc};
use crate::domain::TubeDomain;
use crate::error::{Error, Result};
use crate::geodesic::{BoundaryMeasure, DiscMap, Geodesic, GeodesicSpec};
use crate::hfun::QuadCertificate;

type C64 = Complex<f64>;

/// Upper bound on witnesses kept per condition.
pub const MAX_WITNESSES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `λ̄h•(Re z dL − dμ) ≤ 0` for every sampled `z`.
    Measure,
    /// `Re[λ̄h•(z − φ*)] < 0` at almost every circle point.
    RadialBoundary,
    /// `Re[h•(φ(0) − φ(λ))/λ] < 0` inside the disc.
    RadialInterior,
    /// Contour left inverse reproduces the disc.
    LeftInverse,
    /// Radial limits equal the vertex on each arc `A_j`.
    VertexLimit,
    /// The measure restricted to `A_j` is `p_j dL`.
    VertexMeasure,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Measure => "measure",
            Condition::RadialBoundary => "radial_boundary",
            Condition::RadialInterior => "radial_interior",
            Condition::LeftInverse => "left_inverse",
            Condition::VertexLimit => "vertex_limit",
            Condition::VertexMeasure => "vertex_measure",
        }
    }
}

/// A sample where a condition was violated or could not be decided.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Witness {
    pub z: Option<Vec<C64>>,
    pub lambda: Option<C64>,
    pub angle: Option<f64>,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub status: Status,
    pub tolerance: f64,
    pub checked: usize,
    /// Largest value of the checked quantity (`≤ tolerance` means satisfied).
    pub worst: f64,
    pub witnesses: Vec<Witness>,
}

impl ConditionReport {
    fn new(condition: Condition, tolerance: f64) -> Self {
        Self { condition, status: Status::Pass, tolerance, checked: 0, worst: f64::NEG_INFINITY, witnesses: Vec::new() }
    }

    fn record(&mut self, status: Status, witness: Witness) {
        self.status = self.status.max(status);
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionReport>,
    pub left_inverse_residual: Option<f64>,
    pub root_counts: Vec<i64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Worst status over all conditions; `Pass` when nothing was checked.
    pub fn status(&self) -> Status {
        self.conditions.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    pub fn condition(&self, c: Condition) -> Option<&ConditionReport> {
        self.conditions.iter().find(|r| r.condition == c)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.conditions.extend(other.conditions);
        if other.left_inverse_residual.is_some() {
            self.left_inverse_residual = other.left_inverse_residual;
        }
        self.root_counts.extend(other.root_counts);
        self.notes.extend(other.notes);
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_l s_l(t)(x_l − w_l)` written as `A cos t + B sin t + C`.
fn trig_coefficients(h: &QuadCertificate<f64>, x: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let f = |t: f64| -> f64 { h.terms.iter().zip(x.iter().zip(w)).map(|(term, (xl, wl))| term.symbol(t) * (xl - wl)).sum() };
    let (f0, f1, f2) = (f(0.0), f(0.5 * std::f64::consts::PI), f(std::f64::consts::PI));
    let c = 0.5 * (f0 + f2);
    (0.5 * (f0 - f2), f1 - c, c)
}

/// Maximum of `A cos t + B sin t + C` over a closed arc, with its location.
fn trig_max_on_arc(a: f64, b: f64, c: f64, arc: &Arc) -> (f64, f64) {
    let f = |t: f64| a * t.cos() + b * t.sin() + c;
    if arc.is_full() {
        return (b.atan2(a), c + a.hypot(b));
    }
    let mut best = (arc.start(), f(arc.start()));
    let end = arc.end();
    if f(end) > best.1 {
        best = (end, f(end));
    }
    if a != 0.0 || b != 0.0 {
        let peak = b.atan2(a);
        if arc.contains(canonical_angle(peak)) && f(peak) > best.1 {
            best = (canonical_angle(peak), f(peak));
        }
    }
    best
}

/// Whether the samples come close to every face of the base.
fn covers_faces(domain: &TubeDomain, z_samples: &[Vec<C64>]) -> bool {
    let near = 1e-2;
    let re = |z: &Vec<C64>| -> Vec<f64> { z.iter().map(|c| c.re).collect() };
    match domain {
        TubeDomain::HalfPlaneProduct { n } => {
            (0..*n).all(|l| z_samples.iter().any(|z| z[l].re > -near))
        }
        TubeDomain::Strip => {
            z_samples.iter().any(|z| z[0].re < near) && z_samples.iter().any(|z| z[0].re > 1.0 - near)
        }
        TubeDomain::Staircase(s) => (0..s.m()).all(|j| {
            z_samples.iter().any(|z| {
                let x = re(z);
                s.facet_values([x[0], x[1]])[j] > -near
            })
        }),
        TubeDomain::DiscBase => true,
    }
}

/// Sign condition on `ν_z = λ̄h(λ)•(Re z dL − dμ)` for every sample `z`.
///
/// On each run where the density is constant the symbol part is a
/// trigonometric polynomial of degree one, so its maximum is found exactly.
pub fn check_measure_condition(
    mu: &BoundaryMeasure,
    h: &QuadCertificate<f64>,
    domain: &TubeDomain,
    z_samples: &[Vec<C64>],
) -> Result<VerificationReport> {
    let n = domain.dim();
    if mu.dim() != n || h.dim() != n {
        return Err(Error::Dimension { expected: n, got: if mu.dim() != n { mu.dim() } else { h.dim() } });
    }
    if h.is_zero() {
        return Err(Error::ZeroCertificate);
    }
    if let Some(z) = z_samples.iter().find(|z| z.len() != n) {
        return Err(Error::Dimension { expected: n, got: z.len() });
    }
    let mut report = ConditionReport::new(Condition::Measure, 1e-12);
    let per_z: Vec<(f64, Vec<Witness>)> = z_samples
        .par_iter()
        .map(|z| {
            let x: Vec<f64> = z.iter().map(|c| c.re).collect();
            let mut worst = f64::NEG_INFINITY;
            let mut found = Vec::new();
            let mut note = |value: f64, angle: f64, detail: String, scale: f64| {
                let rel = value / scale;
                worst = worst.max(rel);
                if rel > 1e-12 && found.len() < MAX_WITNESSES {
                    found.push(Witness { z: Some(z.clone()), lambda: None, angle: Some(angle), value, detail });
                }
            };
            let zscale = 1.0 + x.iter().map(|v| v.abs()).sum::<f64>();
            match mu {
                BoundaryMeasure::Discrete(m) => {
                    for (arc, w) in m.constant_runs() {
                        let (a, b, c) = trig_coefficients(h, &x, &w);
                        let (t, v) = trig_max_on_arc(a, b, c, &arc);
                        let scale = h.scale() * (zscale + w.iter().map(|v| v.abs()).sum::<f64>());
                        note(v, t, "density".into(), scale);
                    }
                    for atom in &m.atoms {
                        let v: f64 = h.terms.iter().zip(&atom.mass).map(|(term, ml)| -term.symbol(atom.angle) * ml).sum();
                        let scale = h.scale() * (1.0 + atom.mass.iter().map(|v| v.abs()).sum::<f64>());
                        note(v, atom.angle, "atom".into(), scale);
                    }
                }
                BoundaryMeasure::Smooth { density, .. } => {
                    for t in angle_grid(4096, 0.37) {
                        let w = density(t);
                        let v: f64 = h.terms.iter().zip(x.iter().zip(&w)).map(|(term, (xl, wl))| term.symbol(t) * (xl - wl)).sum();
                        let scale = h.scale() * (zscale + w.iter().map(|v| v.abs()).sum::<f64>());
                        note(v, t, "density sample".into(), scale);
                    }
                }
            }
            (worst, found)
        })
        .collect();
    for (worst, found) in per_z {
        report.checked += 1;
        report.worst = report.worst.max(worst);
        for w in found {
            report.record(Status::Fail, w);
        }
    }
    let mut out = VerificationReport::default();
    if !covers_faces(domain, z_samples) && report.status == Status::Pass {
        report.status = Status::Inconclusive;
        out.notes.push("z samples do not come close to every face of the base".into());
    }
    if matches!(domain, TubeDomain::HalfPlaneProduct { .. } | TubeDomain::Staircase(_)) {
        out.notes.push("the condition over all z in an unbounded base is checked on a finite sample".into());
    }
    out.conditions.push(report);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialSettings {
    /// Circle grid size for the boundary condition.
    pub angles: usize,
    /// Radii `1 − 2^{−k}` for `k` in this range.
    pub k_min: u32,
    pub k_max: u32,
    /// Grid angles this close to a singular angle are skipped.
    pub exclusion: f64,
    pub interior_radii: Vec<f64>,
    pub interior_angles: usize,
    /// Agreement required between the last two extrapolated radial values.
    pub limit_tol: f64,
}

impl Default for RadialSettings {
    fn default() -> Self {
        Self {
            angles: 256,
            k_min: 4,
            k_max: 20,
            exclusion: 5e-3,
            interior_radii: vec![0.1, 0.25, 0.5, 0.75, 0.9, 0.97],
            interior_angles: 32,
            limit_tol: 1e-6,
        }
    }
}

/// `Re φ*(e^{it})` from radii `1 − 2^{−k}` with one Richardson step, or `None`
/// when the estimates do not settle.
pub fn radial_limit_estimate(phi: &dyn DiscMap, t: f64, settings: &RadialSettings) -> Option<Vec<f64>> {
    if let Some(v) = phi.radial_limit_real(t) {
        return Some(v);
    }
    let z = unit(t);
    let samples: Vec<Vec<f64>> = (settings.k_min..=settings.k_max)
        .map(|k| phi.eval(z * (1.0 - 0.5f64.powi(k as i32))).iter().map(|c| c.re).collect())
        .collect();
    let extrapolated: Vec<Vec<f64>> = samples
        .windows(2)
        .map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| 2.0 * b - a).collect())
        .collect();
    let last = extrapolated.last()?;
    let prev = &extrapolated[extrapolated.len() - 2];
    let settled = last
        .iter()
        .zip(prev)
        .all(|(a, b)| a.is_finite() && (a - b).abs() <= settings.limit_tol * (1.0 + a.abs()));
    settled.then(|| last.clone())
}

fn near_any(t: f64, angles: &[f64], gap: f64) -> bool {
    angles.iter().any(|s| {
        let d = (canonical_angle(t - s)).min(TAU - canonical_angle(t - s));
        d < gap
    })
}

/// Boundary condition `Re[λ̄h•(z − φ*)] < 0` on a circle grid (skipping the
/// finite singular set) and interior condition `Re[h•(φ(0) − φ(λ))/λ] < 0`.
pub fn check_radial_conditions(
    phi: &dyn DiscMap,
    h: &QuadCertificate<f64>,
    domain: &TubeDomain,
    z_samples: &[Vec<C64>],
    settings: &RadialSettings,
) -> Result<VerificationReport> {
    let n = domain.dim();
    if phi.dim() != n || h.dim() != n {
        return Err(Error::Dimension { expected: n, got: phi.dim() });
    }
    if h.is_zero() {
        return Err(Error::ZeroCertificate);
    }
    let singular = phi.singular_angles();
    let grid: Vec<f64> = angle_grid(settings.angles, 0.37)
        .into_iter()
        .filter(|t| !near_any(*t, &singular, settings.exclusion))
        .collect();
    let limits: Vec<(f64, Option<Vec<f64>>)> =
        grid.par_iter().map(|&t| (t, radial_limit_estimate(phi, t, settings))).collect();

    let tol = 1e-9;
    let mut boundary = ConditionReport::new(Condition::RadialBoundary, tol);
    for (t, limit) in &limits {
        let Some(w) = limit else {
            boundary.record(
                Status::Inconclusive,
                Witness { angle: Some(*t), value: f64::NAN, detail: "radial limit did not settle".into(), ..Default::default() },
            );
            continue;
        };
        let symbols = h.symbols(*t);
        for z in z_samples {
            let v: f64 = symbols.iter().zip(z.iter().zip(w)).map(|(s, (zl, wl))| s * (zl.re - wl)).sum();
            let scale = h.scale() * (1.0 + z.iter().zip(w).map(|(a, b)| a.re.abs() + b.abs()).sum::<f64>());
            boundary.checked += 1;
            boundary.worst = boundary.worst.max(v / scale);
            if v > tol * scale {
                boundary.record(
                    Status::Fail,
                    Witness { z: Some(z.clone()), angle: Some(*t), value: v, detail: "boundary condition".into(), ..Default::default() },
                );
            }
        }
    }

    let phi0 = phi.eval(C64::new(0.0, 0.0));
    let mut points = Vec::new();
    for &r in &settings.interior_radii {
        for t in angle_grid(settings.interior_angles, 0.0) {
            points.push(C64::from_polar(r, t));
        }
    }
    let values: Vec<(C64, f64, f64)> = points
        .par_iter()
        .map(|&l| {
            let diff: Vec<C64> = phi0.iter().zip(phi.eval(l)).map(|(a, b)| (a - b) / l).collect();
            let hv = h.eval(l);
            let scale = h.scale() * (1.0 + diff.iter().map(|d| d.norm()).sum::<f64>());
            (l, dot(&hv, &diff).re, scale)
        })
        .collect();
    let mut interior = ConditionReport::new(Condition::RadialInterior, 1e-10);
    for (l, v, scale) in values {
        interior.checked += 1;
        interior.worst = interior.worst.max(v / scale);
        if v > 1e-10 * scale {
            interior.record(
                Status::Fail,
                Witness { lambda: Some(l), value: v, detail: "interior condition".into(), ..Default::default() },
            );
        }
    }
    Ok(VerificationReport { conditions: vec![boundary, interior], ..Default::default() })
}

/// `ψ_z(λ) = (φ(0) − φ(λ))/λ • h(λ) + (h(λ) − h(0))/λ • (z − φ(0)) + λ·conj(h(0) • (z − φ(0)))`,
/// extended through `0` by `−φ′(0)•h(0) + h′(0)•(z − φ(0))`.
pub fn eval_psi(phi: &dyn DiscMap, h: &QuadCertificate<f64>, z: &[C64], lambda: C64) -> C64 {
    let zero = C64::new(0.0, 0.0);
    let phi0 = phi.eval(zero);
    let h0 = h.eval(zero);
    let shift: Vec<C64> = z.iter().zip(&phi0).map(|(a, b)| a - b).collect();
    if lambda.norm() < 1e-12 {
        let d = phi.derivative(zero);
        return -dot(&d, &h0) + dot(&h.derivative(zero), &shift);
    }
    let diff: Vec<C64> = phi0.iter().zip(phi.eval(lambda)).map(|(a, b)| (a - b) / lambda).collect();
    let hl = h.eval(lambda);
    let hdiff: Vec<C64> = hl.iter().zip(&h0).map(|(a, b)| (a - b) / lambda).collect();
    dot(&diff, &hl) + dot(&hdiff, &shift) + lambda * dot(&h0, &shift).conj()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSettings {
    pub radii: Vec<f64>,
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
    /// Allowed distance of the root count from an integer.
    pub count_tol: f64,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self {
            radii: vec![0.5, 0.7, 0.9, 0.97, 0.995],
            start_nodes: 256,
            max_nodes: 1 << 16,
            tol: 1e-13,
            count_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeftInverse {
    pub value: C64,
    pub count: i64,
    pub radius: f64,
    pub nodes: usize,
    /// `Re Ψ < 0` held on the contour used.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeftInverseFailure {
    /// The root count is not one on any usable contour: `(radius, count)` pairs.
    Structural { counts: Vec<(f64, f64)> },
    Inconclusive { reason: String },
}

impl fmt::Display for LeftInverseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeftInverseFailure::Structural { counts } => {
                write!(f, "root count is not one (")?;
                for (k, (r, n)) in counts.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "r={r}: N={n:.6}")?;
                }
                write!(f, ")")
            }
            LeftInverseFailure::Inconclusive { reason } => write!(f, "left inverse inconclusive: {reason}"),
        }
    }
}

impl std::error::Error for LeftInverseFailure {}

struct ContourResult {
    count: C64,
    value: C64,
    nodes: usize,
    max_re_psi: f64,
}

/// Trapezoid sums for `(1/2πi)∮ Φ′/Φ dλ` and `(1/2πi)∮ λΦ′/Φ dλ` on `|λ| = r`,
/// where `Φ(λ) = (z − φ(λ))•h(λ) − ελ`.
fn contour(phi: &dyn DiscMap, h: &QuadCertificate<f64>, z: &[C64], r: f64, eps: f64, s: &ContourSettings) -> Option<ContourResult> {
    let sample = |t: f64| -> Option<(C64, C64, f64)> {
        let l = C64::from_polar(r, t);
        let shift: Vec<C64> = z.iter().zip(phi.eval(l)).map(|(a, b)| a - b).collect();
        let big = dot(&shift, &h.eval(l)) - eps * l;
        let dbig = -dot(&phi.derivative(l), &h.eval(l)) + dot(&shift, &h.derivative(l)) - eps;
        if !(big.norm() > 1e-300) || !dbig.is_finite() {
            return None;
        }
        let g = dbig / big;
        Some((g * l, g * l * l, (big / l).re))
    };
    let mut n = s.start_nodes;
    let mut sums = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut max_re = f64::NEG_INFINITY;
    for k in 0..n {
        let (a, b, p) = sample(TAU * k as f64 / n as f64)?;
        sums.0 += a;
        sums.1 += b;
        max_re = max_re.max(p);
    }
    let mut prev = (sums.0 / n as f64, sums.1 / n as f64);
    while 2 * n <= s.max_nodes {
        for k in 0..n {
            let (a, b, p) = sample(TAU * (k as f64 + 0.5) / n as f64)?;
            sums.0 += a;
            sums.1 += b;
            max_re = max_re.max(p);
        }
        n *= 2;
        let next = (sums.0 / n as f64, sums.1 / n as f64);
        let change = (next.0 - prev.0).norm().max((next.1 - prev.1).norm());
        prev = next;
        if change <= s.tol * (1.0 + next.0.norm() + next.1.norm()) {
            return Some(ContourResult { count: next.0, value: next.1, nodes: n, max_re_psi: max_re });
        }
    }
    None
}

/// Left inverse `f(z) = (1/2πi)∮ λΦ′/Φ dλ` of the map `φ` with certificate `h`.
///
/// Radii are tried from small to large; the first contour with exactly one root
/// and `Re Φ/λ < 0` wins. A count of two or more roots is a structural failure.
pub fn left_inverse_value(
    phi: &dyn DiscMap,
    h: &QuadCertificate<f64>,
    z: &[C64],
    settings: &ContourSettings,
) -> Result<LeftInverse, LeftInverseFailure> {
    let mut counts = Vec::new();
    let mut undecided = Vec::new();
    let mut fallback: Option<LeftInverse> = None;
    for &r in &settings.radii {
        let Some(c) = contour(phi, h, z, r, 0.0, settings) else {
            undecided.push(r);
            continue;
        };
        let rounded = c.count.re.round();
        if (c.count - rounded).norm() >= settings.count_tol {
            undecided.push(r);
            continue;
        }
        counts.push((r, c.count.re));
        if rounded >= 2.0 {
            return Err(LeftInverseFailure::Structural { counts });
        }
        if rounded == 1.0 {
            let found = LeftInverse { value: c.value, count: 1, radius: r, nodes: c.nodes, certified: c.max_re_psi < 0.0 };
            if found.certified {
                return Ok(found);
            }
            fallback.get_or_insert(found);
        }
    }
    if let Some(found) = fallback {
        // perturb by −ελ and extrapolate to ε = 0
        let eps = [1e-3, 1e-6];
        let runs: Vec<Option<ContourResult>> = eps.iter().map(|e| contour(phi, h, z, found.radius, *e, settings)).collect();
        if let [Some(a), Some(b)] = &runs[..] {
            let ones = [a, b].iter().all(|c| (c.count - 1.0).norm() < settings.count_tol);
            if ones && a.max_re_psi < 0.0 && b.max_re_psi < 0.0 {
                let value = b.value - (a.value - b.value) * (eps[1] / (eps[0] - eps[1]));
                return Ok(LeftInverse { value, certified: true, nodes: a.nodes.max(b.nodes), ..found });
            }
        }
        return Ok(found);
    }
    if !undecided.is_empty() && counts.is_empty() {
        return Err(LeftInverseFailure::Inconclusive {
            reason: format!("no contour converged (radii {undecided:?})"),
        });
    }
    Err(LeftInverseFailure::Structural { counts })
}

/// `n` points spread over the disc `|σ| ≤ radius` (sunflower pattern).
pub fn disc_grid(n: usize, radius: f64) -> Vec<C64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| C64::from_polar(radius * ((k as f64 + 0.5) / n as f64).sqrt(), golden * k as f64))
        .collect()
}

/// `max |f(φ(σ)) − σ|` over the given points, plus the root counts found.
pub fn left_inverse_residual(
    phi: &dyn DiscMap,
    h: &QuadCertificate<f64>,
    sigmas: &[C64],
    settings: &ContourSettings,
) -> Result<f64, LeftInverseFailure> {
    let results: Vec<Result<f64, LeftInverseFailure>> = sigmas
        .par_iter()
        .map(|&s| left_inverse_value(phi, h, &phi.eval(s), settings).map(|f| (f.value - s).norm()))
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// `(lower, upper)` with lower the Poincaré distance of the left-inverse images
/// of `φ(σ₁), φ(σ₂)` and upper the Poincaré distance of `σ₁, σ₂`.
pub fn distance_sandwich(
    phi: &dyn DiscMap,
    h: &QuadCertificate<f64>,
    s1: C64,
    s2: C64,
    settings: &ContourSettings,
) -> Result<(f64, f64), LeftInverseFailure> {
    if s1 == s2 {
        return Ok((0.0, 0.0));
    }
    let f1 = left_inverse_value(phi, h, &phi.eval(s1), settings)?.value;
    let f2 = left_inverse_value(phi, h, &phi.eval(s2), settings)?.value;
    let bad = |e: Error| LeftInverseFailure::Inconclusive { reason: e.to_string() };
    let lower = poincare_distance(f1, f2).map_err(bad)?;
    let upper = poincare_distance(s1, s2).map_err(bad)?;
    Ok((lower, upper))
}

/// Radii `1 − 2^{−k}` (`k = 4..19`) followed by `1 − 10^{−6}`.
pub fn vertex_radius_schedule() -> Vec<f64> {
    let mut r: Vec<f64> = (4..20).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    r.push(1.0 - 1e-6);
    r
}

/// Radial limits of a staircase map on the arcs `A_j` and the identity
/// `χ_{A_j}μ = p_j χ_{A_j} dL`, both away from the root set `B` and atoms.
pub fn vertex_limit_check(g: &Geodesic) -> Result<VerificationReport> {
    let (GeodesicSpec::Staircase(spec), TubeDomain::Staircase(d)) = (g.spec(), g.domain()) else {
        return Err(Error::Unsupported("vertex limits apply to staircase maps with atoms at certificate roots".into()));
    };
    let arcs = g.klis_arcs().ok_or_else(|| Error::Inadmissible("combined certificate vanishes".into()))?;
    let mu = g.boundary_measure()?;
    let mu = mu.discrete().expect("staircase measures are discrete");
    let mut avoid = arcs.b.clone();
    avoid.extend((0..2).filter(|&l| spec.alpha[l] != 0.0).map(|l| spec.atoms[l].arg()));
    let schedule = vertex_radius_schedule();
    let scale = d.points().iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
    let mut limit = ConditionReport::new(Condition::VertexLimit, 1e-3);
    let mut identity = ConditionReport::new(Condition::VertexMeasure, 1e-12 * scale);
    for (j, set) in arcs.a.iter().enumerate() {
        let p = d.points()[j + 1];
        for arc in set.arcs() {
            for frac in [0.25, 0.5, 0.75] {
                let t = canonical_angle(arc.start() + frac * arc.length());
                if near_any(t, &avoid, 0.05) || !arc.contains_interior(t, 0.05) {
                    continue;
                }
                let errors: Vec<f64> = schedule
                    .iter()
                    .map(|r| {
                        let v = g.eval(C64::from_polar(*r, t));
                        (v[0].re - p[0]).hypot(v[1].re - p[1])
                    })
                    .collect();
                let last = *errors.last().unwrap();
                let monotone = errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-13);
                limit.checked += 1;
                limit.worst = limit.worst.max(last);
                if !monotone {
                    limit.record(
                        Status::Fail,
                        Witness { angle: Some(t), value: last, detail: format!("error not monotone on A_{}", j + 1), ..Default::default() },
                    );
                } else if last >= 1e-3 {
                    limit.record(
                        Status::Inconclusive,
                        Witness { angle: Some(t), value: last, detail: format!("slow convergence on A_{}", j + 1), ..Default::default() },
                    );
                }
                let density = mu.density_at(t);
                let gap = (density[0] - p[0]).abs().max((density[1] - p[1]).abs());
                identity.checked += 1;
                identity.worst = identity.worst.max(gap);
                if gap > identity.tolerance {
                    identity.record(
                        Status::Fail,
                        Witness { angle: Some(t), value: gap, detail: format!("density differs from p_{} on A_{}", j + 1, j + 1), ..Default::default() },
                    );
                }
            }
        }
        for atom in &mu.atoms {
            if set.contains(atom.angle) && !near_any(atom.angle, &avoid, 1e-12) {
                identity.record(
                    Status::Fail,
                    Witness { angle: Some(atom.angle), value: atom.mass[0].abs() + atom.mass[1].abs(), detail: format!("atom inside A_{}", j + 1), ..Default::default() },
                );
            }
        }
    }
    Ok(VerificationReport {
        conditions: vec![limit, identity],
        notes: vec!["arc samples avoid the certificate roots and atom angles".into()],
        ..Default::default()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Measure,
    Radial,
    Inverse,
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySettings {
    pub radial: RadialSettings,
    pub contour: ContourSettings,
    pub random_z: usize,
    pub seed: u64,
    pub residual_points: usize,
    pub residual_radius: f64,
    pub residual_tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            radial: RadialSettings::default(),
            contour: ContourSettings::default(),
            random_z: 10,
            seed: 7,
            residual_points: 50,
            residual_radius: 0.9,
            residual_tol: 1e-7,
        }
    }
}

/// Left-inverse residual as a condition report.
pub fn check_left_inverse(phi: &dyn DiscMap, h: &QuadCertificate<f64>, settings: &VerifySettings) -> VerificationReport {
    let sigmas = disc_grid(settings.residual_points, settings.residual_radius);
    let mut report = ConditionReport::new(Condition::LeftInverse, settings.residual_tol);
    let mut out = VerificationReport::default();
    report.checked = sigmas.len();
    let results: Vec<(C64, Result<LeftInverse, LeftInverseFailure>)> = sigmas
        .par_iter()
        .map(|&s| (s, left_inverse_value(phi, h, &phi.eval(s), &settings.contour)))
        .collect();
    let mut worst: f64 = 0.0;
    for (s, r) in results {
        match r {
            Ok(f) => {
                out.root_counts.push(f.count);
                let e = (f.value - s).norm();
                worst = worst.max(e);
                if e >= settings.residual_tol {
                    report.record(
                        Status::Fail,
                        Witness { lambda: Some(s), value: e, detail: format!("f(φ(σ)) = {}", f.value), ..Default::default() },
                    );
                }
            }
            Err(LeftInverseFailure::Structural { counts }) => {
                let n = counts.iter().map(|c| c.1.round() as i64).max().unwrap_or(0);
                out.root_counts.push(n);
                worst = f64::INFINITY;
                report.record(
                    Status::Fail,
                    Witness {
                        lambda: Some(s),
                        value: n as f64,
                        detail: LeftInverseFailure::Structural { counts }.to_string(),
                        ..Default::default()
                    },
                );
            }
            Err(e) => {
                report.record(Status::Inconclusive, Witness { lambda: Some(s), value: f64::NAN, detail: e.to_string(), ..Default::default() });
            }
        }
    }
    report.worst = worst;
    out.left_inverse_residual = Some(worst);
    out.conditions.push(report);
    out
}

/// Runs the requested checks on a geodesic with its own certificate.
pub fn verify_geodesic(g: &Geodesic, level: Level, settings: &VerifySettings) -> Result<VerificationReport> {
    let h = g.certificate();
    let z = g.domain().structured_samples(settings.random_z, settings.seed);
    let mut report = VerificationReport::default();
    if matches!(level, Level::Measure | Level::All) {
        report.merge(check_measure_condition(&g.boundary_measure()?, &h, g.domain(), &z)?);
    }
    if matches!(level, Level::Radial | Level::All) {
        report.merge(check_radial_conditions(g, &h, g.domain(), &z, &settings.radial)?);
    }
    if matches!(level, Level::Inverse | Level::All) {
        report.merge(check_left_inverse(g, &h, settings));
    }
    Ok(report)
}
