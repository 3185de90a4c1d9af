//! Convex tube domains `Ω + iℝⁿ` with the bases used by the closed-form
//! geodesic families.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum TubeDomain {
    /// `{Re z_l < 0 for all l}`.
    HalfPlaneProduct { n: usize },
    /// `{0 < Re z < 1}`.
    Strip,
    Staircase(StaircaseDomain),
    /// `{(Re z_1)² + (Re z_2)² < 1}`.
    DiscBase,
}

impl TubeDomain {
    pub fn dim(&self) -> usize {
        match self {
            TubeDomain::HalfPlaneProduct { n } => *n,
            TubeDomain::Strip => 1,
            TubeDomain::Staircase(_) | TubeDomain::DiscBase => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TubeDomain::HalfPlaneProduct { .. } => "halfplane_product",
            TubeDomain::Strip => "strip",
            TubeDomain::Staircase(_) => "staircase",
            TubeDomain::DiscBase => "disc_base",
        }
    }

    /// Strict membership; only real parts matter.
    pub fn contains(&self, z: &[C64]) -> bool {
        let x: Vec<f64> = z.iter().map(|c| c.re).collect();
        self.contains_real(&x)
    }

    pub fn contains_real(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            TubeDomain::HalfPlaneProduct { .. } => x.iter().all(|v| *v < 0.0),
            TubeDomain::Strip => x[0] > 0.0 && x[0] < 1.0,
            TubeDomain::Staircase(s) => s.contains_real([x[0], x[1]]),
            TubeDomain::DiscBase => x[0] * x[0] + x[1] * x[1] < 1.0,
        }
    }

    /// Largest value of the defining inequalities; negative inside the base.
    pub fn margin(&self, x: &[f64]) -> f64 {
        match self {
            TubeDomain::HalfPlaneProduct { .. } => x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            TubeDomain::Strip => (-x[0]).max(x[0] - 1.0),
            TubeDomain::Staircase(s) => s.facet_values([x[0], x[1]]).into_iter().fold(f64::NEG_INFINITY, f64::max),
            TubeDomain::DiscBase => x[0].hypot(x[1]) - 1.0,
        }
    }

    /// Points of the domain used to discharge "for every z ∈ D": one point close
    /// to each facet, one close to each vertex, and `random` further points drawn
    /// from a seeded generator (some far out along unbounded directions).
    pub fn structured_samples(&self, random: usize, seed: u64) -> Vec<Vec<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = 1e-3;
        let mut out: Vec<Vec<f64>> = Vec::new();
        match self {
            TubeDomain::HalfPlaneProduct { n } => {
                for l in 0..*n {
                    let mut x = vec![-1.0; *n];
                    x[l] = -delta;
                    out.push(x);
                }
                out.push(vec![-delta; *n]);
                while out.len() < 2 * n + 1 + random {
                    out.push((0..*n).map(|_| -far_magnitude(&mut rng)).collect());
                }
            }
            TubeDomain::Strip => {
                out.push(vec![delta]);
                out.push(vec![1.0 - delta]);
                for _ in 0..random {
                    out.push(vec![rng.gen_range(0.0..1.0f64).clamp(1e-6, 1.0 - 1e-6)]);
                }
            }
            TubeDomain::DiscBase => {
                for k in 0..16 {
                    let t = std::f64::consts::TAU * (k as f64 + 0.25) / 16.0;
                    out.push(vec![(1.0 - delta) * t.cos(), (1.0 - delta) * t.sin()]);
                }
                for _ in 0..random {
                    let r = rng.gen_range(0.0..1.0f64).sqrt() * (1.0 - 1e-6);
                    let t = rng.gen_range(0.0..std::f64::consts::TAU);
                    out.push(vec![r * t.cos(), r * t.sin()]);
                }
            }
            TubeDomain::Staircase(s) => {
                for j in 0..s.m() {
                    let x = s.facet_point(j);
                    let n = unit_vec(s.v[j]);
                    out.push(vec![x[0] - delta * n[0], x[1] - delta * n[1]]);
                }
                for j in 1..s.m() {
                    let n = unit_vec([s.v[j - 1][0] + s.v[j][0], s.v[j - 1][1] + s.v[j][1]]);
                    out.push(vec![s.p[j][0] - delta * n[0], s.p[j][1] - delta * n[1]]);
                }
                let target = out.len() + random;
                while out.len() < target {
                    let r = far_magnitude(&mut rng);
                    let t = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
                    let x = [s.p[1][0] - r * t.cos(), s.p[s.m() - 1][1] - r * t.sin()];
                    if s.contains_real(x) {
                        out.push(x.to_vec());
                    }
                }
            }
        }
        out.into_iter()
            .map(|x| x.into_iter().map(|re| C64::new(re, rng.gen_range(-2.0..2.0))).collect())
            .collect()
    }
}

fn far_magnitude(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..2.0))
}

fn unit_vec(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn det(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Base `{x : ⟨x − p_j, v_j⟩ < 0, j = 1..m}` with the vertex chain `p_0..p_m`.
///
/// Indices in this type are zero-based: `v[0]` is `v_1`, `p[0]` is `p_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseDomain {
    v: Vec<[f64; 2]>,
    p: Vec<[f64; 2]>,
}

/// A failed structural condition of a staircase, with one-based indices.
#[derive(Clone, Debug, PartialEq)]
pub enum StaircaseViolation {
    Shape(String),
    NegativeNormal { j: usize },
    FirstCoordinateChain { j: usize },
    SecondCoordinateChain { j: usize },
    Determinant { j: usize },
    Orthogonality { j: usize, value: f64 },
    EndNormals(String),
}

impl fmt::Display for StaircaseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StaircaseViolation::Shape(s) => write!(f, "shape: {s}"),
            StaircaseViolation::NegativeNormal { j } => write!(f, "normals: v_{j} has a negative component"),
            StaircaseViolation::FirstCoordinateChain { j } => {
                write!(f, "first-coordinate chain 0 = p_0,1 = p_1,1 > p_2,1 > … > p_m,1 breaks at j={j}")
            }
            StaircaseViolation::SecondCoordinateChain { j } => {
                write!(f, "second-coordinate chain 0 = p_m,2 = p_m-1,2 > … > p_0,2 breaks at j={j}")
            }
            StaircaseViolation::Determinant { j } => {
                write!(f, "determinant: det[v_{j}, v_{}] <= 0 at j={j}", j + 1)
            }
            StaircaseViolation::Orthogonality { j, value } => {
                write!(f, "orthogonality: <p_{} - p_{j}, v_{}> = {value} != 0 at j={j}", j + 1, j + 1)
            }
            StaircaseViolation::EndNormals(s) => write!(f, "end normals: {s}"),
        }
    }
}

/// Checks every structural condition of a staircase base and lists all failures.
pub fn validate_staircase(v: &[[f64; 2]], p: &[[f64; 2]]) -> Vec<StaircaseViolation> {
    let mut out = Vec::new();
    let m = v.len();
    if m < 2 {
        out.push(StaircaseViolation::Shape(format!("need m >= 2 normals, got {m}")));
        return out;
    }
    if p.len() != m + 1 {
        out.push(StaircaseViolation::Shape(format!("need m + 1 = {} points, got {}", m + 1, p.len())));
        return out;
    }
    if v.iter().chain(p).flatten().any(|x| !x.is_finite()) {
        out.push(StaircaseViolation::Shape("non-finite coordinate".into()));
        return out;
    }
    for (j, vj) in v.iter().enumerate() {
        if vj[0] < 0.0 || vj[1] < 0.0 {
            out.push(StaircaseViolation::NegativeNormal { j: j + 1 });
        }
    }
    if p[0][0] != 0.0 || p[1][0] != 0.0 {
        out.push(StaircaseViolation::FirstCoordinateChain { j: if p[0][0] != 0.0 { 0 } else { 1 } });
    }
    for j in 2..=m {
        if !(p[j][0] < p[j - 1][0]) {
            out.push(StaircaseViolation::FirstCoordinateChain { j });
        }
    }
    if p[m][1] != 0.0 || p[m - 1][1] != 0.0 {
        out.push(StaircaseViolation::SecondCoordinateChain { j: if p[m][1] != 0.0 { m } else { m - 1 } });
    }
    for j in (0..m - 1).rev() {
        if !(p[j][1] < p[j + 1][1]) {
            out.push(StaircaseViolation::SecondCoordinateChain { j });
        }
    }
    for j in 0..m - 1 {
        if !(det(v[j], v[j + 1]) > 0.0) {
            out.push(StaircaseViolation::Determinant { j: j + 1 });
        }
    }
    let scale = p.iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()))
        * v.iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
    for j in 0..m {
        let value = dot([p[j + 1][0] - p[j][0], p[j + 1][1] - p[j][1]], v[j]);
        if value.abs() > 1e-10 * scale {
            out.push(StaircaseViolation::Orthogonality { j, value });
        }
    }
    if !(v[0][0] > 0.0 && v[0][1] == 0.0) {
        out.push(StaircaseViolation::EndNormals(format!("v_1 = {:?} must be (+, 0)", v[0])));
    }
    if !(v[m - 1][0] == 0.0 && v[m - 1][1] > 0.0) {
        out.push(StaircaseViolation::EndNormals(format!("v_{m} = {:?} must be (0, +)", v[m - 1])));
    }
    out
}

impl StaircaseDomain {
    pub fn new(v: Vec<[f64; 2]>, p: Vec<[f64; 2]>) -> std::result::Result<Self, Vec<StaircaseViolation>> {
        let violations = validate_staircase(&v, &p);
        if violations.is_empty() {
            Ok(Self { v, p })
        } else {
            Err(violations)
        }
    }

    /// The base `x_1 < 0, x_1 + x_2 < −1, x_2 < 0`.
    pub fn canonical() -> Self {
        Self::new(
            vec![[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0.0, -2.0], [0.0, -1.0], [-1.0, 0.0], [-2.0, 0.0]],
        )
        .expect("canonical staircase is valid")
    }

    pub fn m(&self) -> usize {
        self.v.len()
    }

    /// Normals `v_1..v_m`.
    pub fn normals(&self) -> &[[f64; 2]] {
        &self.v
    }

    /// Points `p_0..p_m`.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.p
    }

    /// `⟨x − p_j, v_j⟩` for `j = 1..m`.
    pub fn facet_values(&self, x: [f64; 2]) -> Vec<f64> {
        (1..=self.m())
            .map(|j| dot([x[0] - self.p[j][0], x[1] - self.p[j][1]], self.v[j - 1]))
            .collect()
    }

    pub fn contains_real(&self, x: [f64; 2]) -> bool {
        self.facet_values(x).iter().all(|g| *g < 0.0)
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        z.len() == 2 && self.contains_real([z[0].re, z[1].re])
    }

    /// A point inside facet `j` (zero-based), which lies on the segment from
    /// `p_j` to `p_{j+1}` in one-based terms.
    pub fn facet_point(&self, j: usize) -> [f64; 2] {
        let m = self.m();
        if j == 0 {
            [0.0, self.p[1][1] - 1.0]
        } else if j == m - 1 {
            [self.p[m - 1][0] - 1.0, 0.0]
        } else {
            [0.5 * (self.p[j][0] + self.p[j + 1][0]), 0.5 * (self.p[j][1] + self.p[j + 1][1])]
        }
    }

    /// Outward normals at a boundary point.
    pub fn supporting_normal(&self, x: [f64; 2]) -> Result<NormalCone> {
        let g = self.facet_values(x);
        let scale = 1.0 + x[0].abs().max(x[1].abs());
        if g.iter().any(|v| *v > BOUNDARY_TOL * scale) {
            return Err(Error::InvalidArgument(format!("{x:?} lies outside the base")));
        }
        let active: Vec<usize> = (0..g.len()).filter(|&j| g[j].abs() <= BOUNDARY_TOL * scale).collect();
        match active.as_slice() {
            [] => Err(Error::InvalidArgument(format!("{x:?} lies inside the base"))),
            [j] => Ok(NormalCone::Facet { j: j + 1, normal: self.v[*j] }),
            [j, k] if *k == j + 1 => Ok(NormalCone::Vertex { j: j + 1, from: self.v[*j], to: self.v[*k] }),
            _ => Err(Error::InvalidArgument(format!("{x:?} touches non-adjacent facets {active:?}"))),
        }
    }

    /// Boundary of the base as a polyline, with the two unbounded edges cut at
    /// distance `extent` beyond the outermost vertices.
    pub fn boundary_polyline(&self, extent: f64) -> Vec<[f64; 2]> {
        let m = self.m();
        let mut out = vec![[0.0, self.p[1][1] - extent]];
        out.extend_from_slice(&self.p[1..m]);
        out.push([self.p[m - 1][0] - extent, 0.0]);
        out
    }
}

/// Cone of outward normals at a boundary point of a staircase base.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalCone {
    /// Open facet `j` (one-based).
    Facet { j: usize, normal: [f64; 2] },
    /// Vertex `p_j`, where facets `j` and `j + 1` meet.
    Vertex { j: usize, from: [f64; 2], to: [f64; 2] },
}

impl NormalCone {
    pub fn contains_direction(&self, d: [f64; 2]) -> bool {
        match self {
            NormalCone::Facet { normal, .. } => det(*normal, d).abs() <= 1e-12 && dot(*normal, d) > 0.0,
            NormalCone::Vertex { from, to, .. } => det(*from, d) >= -1e-12 && det(d, *to) >= -1e-12,
        }
    }
}

/// One factor `{0 < |z_1|^p |z_2|^q < α}` of a Reinhardt intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReinhardtFactor {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
}

/// Staircase base of the logarithmic image of `⋂ {z ∈ 𝔻² : 0 < |z_1|^p|z_2|^q < α}`.
///
/// The boundary is traced from the vertical facet `x_1 = 0` downward-left:
/// at each step the walk follows the currently binding line to its nearest
/// crossing with a line that binds further left, until it reaches `x_2 = 0`.
/// Lines that never bind are dropped.
pub fn from_reinhardt(factors: &[ReinhardtFactor]) -> Result<StaircaseDomain> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("no factors".into()));
    }
    for f in factors {
        if !(f.p > 0.0 && f.q > 0.0 && f.p.is_finite() && f.q.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponents must be positive, got p={}, q={}", f.p, f.q)));
        }
        if !(f.alpha > 0.0 && f.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", f.alpha)));
        }
    }
    let lines: Vec<(f64, f64, f64)> = factors.iter().map(|f| (f.p, f.q, f.alpha.ln())).collect();
    let slope = |i: usize| lines[i].0 / lines[i].1;
    let start_height = |i: usize| lines[i].2 / lines[i].1;
    let mut current = (0..lines.len())
        .min_by(|&a, &b| start_height(a).total_cmp(&start_height(b)).then(slope(a).total_cmp(&slope(b))))
        .unwrap();
    let mut vertices = vec![[0.0, start_height(current)]];
    let mut normals = vec![[1.0, 0.0]];
    loop {
        normals.push([lines[current].0, lines[current].1]);
        let here = *vertices.last().unwrap();
        let (pc, qc, lc) = lines[current];
        let axis_x = lc / pc;
        let mut next: Option<(f64, usize)> = None;
        for (i, &(pi, qi, li)) in lines.iter().enumerate() {
            if i == current || !(slope(i) < slope(current)) {
                continue;
            }
            let d = pc * qi - pi * qc;
            let x1 = (lc * qi - li * qc) / d;
            if x1 < here[0] - 1e-15 && x1 > axis_x {
                let better = match next {
                    None => true,
                    Some((bx, bi)) => x1 > bx || (x1 == bx && slope(i) < slope(bi)),
                };
                if better {
                    next = Some((x1, i));
                }
            }
        }
        match next {
            Some((x1, i)) => {
                vertices.push([x1, (lc - pc * x1) / qc]);
                current = i;
            }
            None => {
                vertices.push([axis_x, 0.0]);
                break;
            }
        }
    }
    normals.push([0.0, 1.0]);
    let first = vertices[0];
    let last = *vertices.last().unwrap();
    let mut p = vec![[0.0, first[1] - 1.0]];
    p.extend(vertices);
    p.push([last[0] - 1.0, 0.0]);
    StaircaseDomain::new(normals, p).map_err(|v| {
        Error::InvalidDomain(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn canonical_v() -> Vec<[f64; 2]> {
        vec![[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    fn canonical_p() -> Vec<[f64; 2]> {
        vec![[0.0, -2.0], [0.0, -1.0], [-1.0, 0.0], [-2.0, 0.0]]
    }

    #[test]
    fn canonical_staircase_validates() {
        assert!(validate_staircase(&canonical_v(), &canonical_p()).is_empty());
    }

    #[test]
    fn bent_normal_breaks_determinant() {
        let mut v = canonical_v();
        v[1] = [1.0, -1.0];
        let errs = validate_staircase(&v, &canonical_p());
        assert!(errs.contains(&StaircaseViolation::Determinant { j: 1 }), "{errs:?}");
        assert!(errs.iter().any(|e| e.to_string().contains("det[v_1, v_2]")));
    }

    #[test]
    fn moved_vertex_breaks_orthogonality() {
        let mut p = canonical_p();
        p[2] = [-1.0, -0.5];
        let errs = validate_staircase(&canonical_v(), &p);
        assert!(errs
            .iter()
            .any(|e| matches!(e, StaircaseViolation::Orthogonality { j: 1, value } if (value + 0.5).abs() < 1e-15)));
    }

    #[test]
    fn membership_examples() {
        let d = TubeDomain::Staircase(StaircaseDomain::canonical());
        assert!(d.contains(&[C64::new(-1.5, 0.0), C64::new(-1.5, 3.0)]));
        assert!(!d.contains(&[C64::new(-0.5, 0.0), C64::new(-0.5, 0.0)]));
        assert!(TubeDomain::Strip.contains(&[C64::new(0.5, 0.0)]));
        assert!(TubeDomain::DiscBase.contains(&[C64::new(0.6, 9.0), C64::new(0.7, -1.0)]));
        assert!(!TubeDomain::HalfPlaneProduct { n: 2 }.contains(&[C64::new(-1.0, 0.0), C64::new(0.0, 0.0)]));
    }

    #[test]
    fn single_factor_gives_canonical_staircase() {
        let d = from_reinhardt(&[ReinhardtFactor { p: 1.0, q: 1.0, alpha: (-1f64).exp() }]).unwrap();
        let c = StaircaseDomain::canonical();
        assert_eq!(d.normals(), c.normals());
        for (a, b) in d.points().iter().zip(c.points()) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-15);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-15);
        }
    }

    #[test]
    fn redundant_factor_is_dropped() {
        let e1 = (-1f64).exp();
        let d = from_reinhardt(&[
            ReinhardtFactor { p: 1.0, q: 1.0, alpha: e1 },
            ReinhardtFactor { p: 2.0, q: 2.0, alpha: e1 },
        ])
        .unwrap();
        assert_eq!(d.m(), 3);
        assert_abs_diff_eq!(d.points()[1][1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_crossing_factors_give_four_facets() {
        let e2 = (-2f64).exp();
        let d = from_reinhardt(&[
            ReinhardtFactor { p: 1.0, q: 2.0, alpha: e2 },
            ReinhardtFactor { p: 2.0, q: 1.0, alpha: e2 },
        ])
        .unwrap();
        assert_eq!(d.m(), 4);
        let expect = [[0.0, -2.0], [-2.0 / 3.0, -2.0 / 3.0], [-2.0, 0.0]];
        for (a, b) in d.points()[1..4].iter().zip(expect) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-14);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn reinhardt_rejects_bad_parameters() {
        assert!(from_reinhardt(&[ReinhardtFactor { p: 1.0, q: 1.0, alpha: 1.5 }]).is_err());
        assert!(from_reinhardt(&[ReinhardtFactor { p: 0.0, q: 1.0, alpha: 0.5 }]).is_err());
        assert!(from_reinhardt(&[]).is_err());
    }

    #[test]
    fn supporting_normal_examples() {
        let d = StaircaseDomain::canonical();
        assert_eq!(d.supporting_normal([0.0, -1.5]).unwrap(), NormalCone::Facet { j: 1, normal: [1.0, 0.0] });
        assert_eq!(
            d.supporting_normal([0.0, -1.0]).unwrap(),
            NormalCone::Vertex { j: 1, from: [1.0, 0.0], to: [1.0, 1.0] }
        );
        assert_eq!(d.supporting_normal([-0.5, -0.5]).unwrap(), NormalCone::Facet { j: 2, normal: [1.0, 1.0] });
        assert!(d.supporting_normal([-1.0, -1.0]).is_err());
        assert!(d.supporting_normal([1.0, -1.0]).is_err());
    }

    #[test]
    fn canonical_boundary_decomposition() {
        let d = StaircaseDomain::canonical();
        let line = d.boundary_polyline(5.0);
        assert_eq!(line, vec![[0.0, -6.0], [0.0, -1.0], [-1.0, 0.0], [-6.0, 0.0]]);
        // every point on the polyline is a boundary point with a valid normal cone
        for w in line.windows(2) {
            for k in 0..=10 {
                let s = k as f64 / 10.0;
                let x = [w[0][0] + s * (w[1][0] - w[0][0]), w[0][1] + s * (w[1][1] - w[0][1])];
                assert!(d.supporting_normal(x).is_ok(), "{x:?}");
            }
        }
    }

    #[test]
    fn structured_samples_lie_inside() {
        for dom in [
            TubeDomain::Staircase(StaircaseDomain::canonical()),
            TubeDomain::HalfPlaneProduct { n: 3 },
            TubeDomain::Strip,
            TubeDomain::DiscBase,
        ] {
            let s = dom.structured_samples(10, 3);
            assert!(s.len() >= 10);
            assert!(s.iter().all(|z| dom.contains(z)));
        }
    }

    proptest! {
        #[test]
        fn reinhardt_output_validates(
            factors in prop::collection::vec((0.1..5.0f64, 0.1..5.0f64, 0.01..0.99f64), 1..6)
        ) {
            let fs: Vec<ReinhardtFactor> = factors.iter().map(|&(p, q, alpha)| ReinhardtFactor { p, q, alpha }).collect();
            let d = from_reinhardt(&fs);
            prop_assert!(d.is_ok(), "{:?}", d);
            let d = d.unwrap();
            prop_assert!(validate_staircase(d.normals(), d.points()).is_empty());
            // membership agrees with the defining inequalities on a probe grid
            for i in 0..12 {
                for k in 0..12 {
                    let x = [-0.37 * i as f64 - 0.011, -0.41 * k as f64 - 0.013];
                    let direct = fs.iter().all(|f| f.p * x[0] + f.q * x[1] < f.alpha.ln());
                    let g = d.facet_values(x).into_iter().fold(f64::NEG_INFINITY, f64::max);
                    if g.abs() > 1e-9 {
                        prop_assert_eq!(direct, d.contains_real(x));
                    }
                }
            }
        }

        #[test]
        fn membership_ignores_imaginary_parts(x in -3.0..1.0f64, y in -3.0..1.0f64, s in -50.0..50.0f64, t in -50.0..50.0f64) {
            let d = TubeDomain::Staircase(StaircaseDomain::canonical());
            let a = d.contains(&[C64::new(x, 0.0), C64::new(y, 0.0)]);
            let b = d.contains(&[C64::new(x, s), C64::new(y, t)]);
            prop_assert_eq!(a, b);
        }
    }
}
