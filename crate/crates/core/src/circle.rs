//! Unit circle and unit disc geometry.
//!
//! Arcs and arc sets live on `[0, 2π)` in plain `f64`; the holomorphic maps
//! (automorphisms, the strip map) are generic over [`Real`] so that the solver
//! can differentiate through them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance used when merging arc endpoints.
pub const ARC_TOL: f64 = 1e-12;

/// Reduces an angle to `[0, 2π)`.
pub fn canonical_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `e^{it}`.
#[inline]
pub fn unit<T: Real>(t: T) -> Complex<T> {
    let (s, c) = t.sin_cos();
    Complex::new(c, s)
}

/// The disc automorphism `λ ↦ (λ − c)/(1 − c̄λ)`.
pub fn mobius<T: Real>(c: Complex<T>, lambda: Complex<T>) -> Result<Complex<T>> {
    let r = c.norm().value();
    if !(r < 1.0) {
        return Err(Error::DegenerateMobius(r));
    }
    Ok(mobius_unchecked(c, lambda))
}

#[inline]
pub(crate) fn mobius_unchecked<T: Real>(c: Complex<T>, lambda: Complex<T>) -> Complex<T> {
    (lambda - c) / (Complex::new(T::one(), T::zero()) - c.conj() * lambda)
}

/// Derivative of [`mobius`] in `λ`: `(1 − |c|²)/(1 − c̄λ)²`.
pub fn mobius_derivative<T: Real>(c: Complex<T>, lambda: Complex<T>) -> Complex<T> {
    let d = Complex::new(T::one(), T::zero()) - c.conj() * lambda;
    Complex::new(T::one() - c.norm_sqr(), T::zero()) / (d * d)
}

fn check_open_disc<T: Real>(z: Complex<T>) -> Result<()> {
    if z.norm().value() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc(format!("{}", crate::scalar::cvalue(z))))
    }
}

/// Poincaré distance `atanh(|σ − τ|/|1 − σ̄τ|)`.
pub fn poincare_distance<T: Real>(sigma: Complex<T>, tau: Complex<T>) -> Result<T> {
    check_open_disc(sigma)?;
    check_open_disc(tau)?;
    let q = mobius_unchecked(sigma, tau).norm();
    Ok(q.min(T::one()).atanh())
}

/// The biholomorphism `τ(λ) = −(i/π) log(i(1+λ)/(1−λ))` from the disc onto the
/// strip `0 < Re < 1`, using the logarithm with argument in `[0, 2π)`.
pub fn strip_map_tau<T: Real>(lambda: Complex<T>) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    if (one - lambda).norm().value() == 0.0 || (one + lambda).norm().value() == 0.0 {
        return Err(Error::BranchPoint);
    }
    if lambda.norm().value() > 1.0 + 1e-12 {
        return Err(Error::OutsideDisc(format!("{}", crate::scalar::cvalue(lambda))));
    }
    Ok(strip_map_unchecked(lambda))
}

pub(crate) fn strip_map_unchecked<T: Real>(lambda: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut w = Complex::new(T::zero(), T::one()) * (one + lambda) / (one - lambda);
    // On the circle w is real; a rounding residue below zero would flip the
    // argument from 0 to 2π.
    if w.im.value() < 0.0 {
        w.im = T::zero();
    }
    let mut arg = w.im.atan2(w.re);
    if arg.value() < 0.0 {
        arg = arg + T::TAU();
    }
    let pi = T::PI();
    Complex::new(arg / pi, -w.norm().ln() / pi)
}

/// Derivative of the strip map: `−(i/π)·2/(1 − λ²)`.
pub fn strip_map_derivative<T: Real>(lambda: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    Complex::new(T::zero(), -T::of(2.0) / T::PI()) / (one - lambda * lambda)
}

/// Inverse of the strip map.
pub fn strip_map_inverse<T: Real>(s: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let e = (Complex::new(T::zero(), T::PI()) * s).exp();
    let q = Complex::new(T::zero(), -T::one()) * e;
    (q - one) / (q + one)
}

/// Counter-clockwise arc `{start + s : 0 ≤ s < length}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(0.0..=TAU).contains(&length) || !start.is_finite() {
            return Err(Error::InvalidArc(length));
        }
        Ok(Self {
            start: if length >= TAU { 0.0 } else { canonical_angle(start) },
            length,
        })
    }

    /// Arc running counter-clockwise from `from` to `to`.
    pub fn between(from: f64, to: f64) -> Self {
        let length = (to - from).rem_euclid(TAU);
        Self { start: canonical_angle(from), length }
    }

    pub fn full() -> Self {
        Self { start: 0.0, length: TAU }
    }

    pub fn empty() -> Self {
        Self { start: 0.0, length: 0.0 }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unreduced end angle `start + length`.
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn midpoint(&self) -> f64 {
        canonical_angle(self.start + 0.5 * self.length)
    }

    pub fn is_empty(&self) -> bool {
        self.length <= 0.0
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    pub fn contains(&self, t: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let s = (t - self.start).rem_euclid(TAU);
        s < self.length
    }

    /// True when `t` is inside the arc and at least `margin` away from both ends.
    pub fn contains_interior(&self, t: f64, margin: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let s = (t - self.start).rem_euclid(TAU);
        s > margin && s < self.length - margin
    }

    /// Splits into consecutive pieces no longer than `max_len`.
    pub fn split(&self, max_len: f64) -> Vec<Arc> {
        if self.is_empty() {
            return Vec::new();
        }
        let count = (self.length / max_len).ceil().max(1.0) as usize;
        let step = self.length / count as f64;
        (0..count)
            .map(|k| Arc { start: canonical_angle(self.start + k as f64 * step), length: step })
            .collect()
    }
}

/// Finite union of disjoint arcs, kept sorted by start and merged.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self { arcs: vec![Arc::full()] }
    }

    pub fn from_arc(arc: Arc) -> Self {
        Self::from_arcs([arc])
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut intervals = Vec::new();
        for a in arcs {
            push_intervals(&a, &mut intervals);
        }
        Self::from_intervals(intervals)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.length).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(t))
    }

    pub fn contains_interior(&self, t: f64, margin: f64) -> bool {
        self.arcs.iter().any(|a| a.contains_interior(t, margin))
    }

    /// Endpoints of all arcs, reduced to `[0, 2π)`.
    pub fn boundary_angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for a in self.arcs.iter().filter(|a| !a.is_full()) {
            out.push(a.start);
            out.push(canonical_angle(a.end()));
        }
        out
    }

    pub fn complement(&self) -> Self {
        let iv = self.intervals();
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for (lo, hi) in iv {
            if lo > cursor + ARC_TOL {
                out.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < TAU - ARC_TOL {
            out.push((cursor, TAU));
        }
        Self::from_intervals(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut iv = self.intervals();
        iv.extend(other.intervals());
        Self::from_intervals(iv)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let a = self.intervals();
        let b = other.intervals();
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    /// Sorted, non-overlapping sub-intervals of `[0, 2π]`.
    fn intervals(&self) -> Vec<(f64, f64)> {
        let mut iv = Vec::new();
        for a in &self.arcs {
            push_intervals(a, &mut iv);
        }
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        iv
    }

    fn from_intervals(mut iv: Vec<(f64, f64)>) -> Self {
        iv.retain(|(lo, hi)| hi - lo > 0.0);
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in iv {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + ARC_TOL => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() == 1 && merged[0].0 <= ARC_TOL && merged[0].1 >= TAU - ARC_TOL {
            return Self::full();
        }
        // an interval touching 2π continues through 0
        if merged.len() >= 2 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if first.0 <= ARC_TOL && last.1 >= TAU - ARC_TOL {
                merged.remove(0);
                let tail = merged.last_mut().unwrap();
                tail.1 = TAU + first.1;
            }
        }
        let mut arcs: Vec<Arc> = merged
            .into_iter()
            .map(|(lo, hi)| Arc { start: canonical_angle(lo), length: (hi - lo).min(TAU) })
            .collect();
        arcs.sort_by(|x, y| x.start.total_cmp(&y.start));
        Self { arcs }
    }
}

fn push_intervals(a: &Arc, out: &mut Vec<(f64, f64)>) {
    if a.is_empty() {
        return;
    }
    if a.is_full() {
        out.push((0.0, TAU));
        return;
    }
    let end = a.start + a.length;
    if end <= TAU {
        out.push((a.start, end));
    } else {
        out.push((a.start, TAU));
        out.push((0.0, end - TAU));
    }
}

/// Disc automorphism taking `0 ↦ from` and the positive real point `σ ↦ to`,
/// returned as `(d, θ, σ)` with `M(ζ) = (e^{iθ}ζ + d)/(1 + d̄e^{iθ}ζ)`.
pub fn automorphism_through(from: Complex<f64>, to: Complex<f64>) -> Result<(Complex<f64>, f64, f64)> {
    let moved = mobius(from, to)?;
    let sigma = moved.norm();
    let theta = if sigma > 0.0 { moved.arg() } else { 0.0 };
    Ok((from, theta, sigma))
}

/// Evaluates `M(ζ) = (e^{iθ}ζ + d)/(1 + d̄e^{iθ}ζ)`.
pub fn apply_automorphism<T: Real>(d: Complex<T>, theta: T, zeta: Complex<T>) -> Complex<T> {
    let rot = unit(theta) * zeta;
    (rot + d) / (Complex::new(T::one(), T::zero()) + d.conj() * rot)
}

/// Inverse of [`apply_automorphism`].
pub fn invert_automorphism<T: Real>(d: Complex<T>, theta: T, lambda: Complex<T>) -> Complex<T> {
    mobius_unchecked(d, lambda) * unit(-theta)
}

/// `|(M⁻¹)′(λ)|` for the automorphism of [`apply_automorphism`].
pub fn inverse_automorphism_scale(d: Complex<f64>, lambda: Complex<f64>) -> f64 {
    mobius_derivative(d, lambda).norm()
}

/// Angles `2π(k + offset)/n`, `k = 0..n`.
pub fn angle_grid(n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|k| TAU * (k as f64 + offset) / n as f64).collect()
}

pub(crate) fn half_pi() -> f64 {
    0.5 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    type C = Complex<f64>;

    #[test]
    fn mobius_examples() {
        let l = C::new(0.3, 0.4);
        assert_eq!(mobius(C::new(0.0, 0.0), l).unwrap(), l);
        assert_eq!(mobius(C::new(0.5, 0.0), C::new(0.5, 0.0)).unwrap(), C::new(0.0, 0.0));
        // (−0.5 − 0.5)/(1 + 0.25) = −0.8
        assert_abs_diff_eq!(mobius(C::new(0.5, 0.0), C::new(-0.5, 0.0)).unwrap().re, -0.8, epsilon = 1e-15);
        assert!(matches!(mobius(C::new(1.0, 0.0), l), Err(Error::DegenerateMobius(_))));
    }

    #[test]
    fn mobius_roundtrip_on_grid() {
        let c = C::new(-0.35, 0.6);
        for i in 0..10 {
            for k in 0..10 {
                let l = C::from_polar(0.099 * i as f64, 0.63 * k as f64);
                let back = mobius(-c, mobius(c, l).unwrap()).unwrap();
                assert!((back - l).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn mobius_derivative_matches_difference_quotient() {
        let c = C::new(0.2, -0.5);
        let l = C::new(0.1, 0.3);
        let h = 1e-6;
        let fd = (mobius_unchecked(c, l + h) - mobius_unchecked(c, l - h)) / (2.0 * h);
        assert!((fd - mobius_derivative(c, l)).norm() < 1e-9);
    }

    #[test]
    fn poincare_examples() {
        let z = C::new(0.0, 0.0);
        assert_eq!(poincare_distance(z, z).unwrap(), 0.0);
        assert_abs_diff_eq!(poincare_distance(z, C::new(0.5, 0.0)).unwrap(), 0.5493061443340549, epsilon = 1e-15);
        assert!(poincare_distance(z, C::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(strip_map_tau(C::new(0.0, 0.0)).unwrap(), C::new(0.5, 0.0));
        let ti = strip_map_tau(C::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(ti.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ti.im, 0.0, epsilon = 1e-15);
        let tmi = strip_map_tau(C::new(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(tmi.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tmi.im, 0.0, epsilon = 1e-15);
        assert_eq!(strip_map_tau(C::new(1.0, 0.0)), Err(Error::BranchPoint));
        assert_eq!(strip_map_tau(C::new(-1.0, 0.0)), Err(Error::BranchPoint));
    }

    #[test]
    fn tau_sends_circle_halves_to_strip_edges() {
        for k in 1..40 {
            let t = PI * k as f64 / 40.0;
            assert_abs_diff_eq!(strip_map_tau(unit(t)).unwrap().re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(strip_map_tau(unit(-t)).unwrap().re, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn tau_inverse_and_derivative() {
        let l = C::new(-0.3, 0.55);
        let s = strip_map_tau(l).unwrap();
        assert!((strip_map_inverse(s) - l).norm() < 1e-14);
        let h = 1e-6;
        let fd = (strip_map_unchecked(l + h) - strip_map_unchecked(l - h)) / (2.0 * h);
        assert!((fd - strip_map_derivative(l)).norm() < 1e-8);
    }

    #[test]
    fn tau_runs_on_f32() {
        let v = strip_map_tau(Complex::<f32>::new(0.0, 0.0)).unwrap();
        assert_eq!(v.re, 0.5f32);
    }

    #[test]
    fn arcset_operations() {
        let upper = ArcSet::from_arc(Arc::new(0.0, PI).unwrap());
        let comp = upper.complement();
        assert_abs_diff_eq!(comp.measure(), PI, epsilon = 1e-15);
        assert!(comp.contains(1.5 * PI));
        assert!(!comp.contains(0.5 * PI));
        assert!(upper.union(&comp).is_full());
        assert!(upper.intersection(&comp).is_empty());
        let wrap = ArcSet::from_arc(Arc::new(-0.5, 1.0).unwrap());
        assert_eq!(wrap.arcs().len(), 1);
        assert!(wrap.contains(0.0) && wrap.contains(TAU - 0.25) && !wrap.contains(0.6));
        assert_abs_diff_eq!(wrap.intersection(&upper).measure(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn arc_split_respects_bound() {
        let a = Arc::new(5.0, 6.0).unwrap();
        let pieces = a.split(half_pi());
        assert_eq!(pieces.len(), 4);
        let total: f64 = pieces.iter().map(|p| p.length()).sum();
        assert_abs_diff_eq!(total, 6.0, epsilon = 1e-14);
        assert!(pieces.iter().all(|p| p.length() <= half_pi() + 1e-15));
    }

    #[test]
    fn automorphism_through_points() {
        let from = C::new(0.2, -0.3);
        let to = C::new(-0.4, 0.1);
        let (d, th, s) = automorphism_through(from, to).unwrap();
        assert!((apply_automorphism(d, th, C::new(0.0, 0.0)) - from).norm() < 1e-15);
        assert!((apply_automorphism(d, th, C::new(s, 0.0)) - to).norm() < 1e-14);
        let z = C::new(0.3, 0.3);
        assert!((invert_automorphism(d, th, apply_automorphism(d, th, z)) - z).norm() < 1e-14);
    }

    fn arb_arcset() -> impl Strategy<Value = ArcSet> {
        prop::collection::vec((0.0..TAU, 0.0..3.0f64), 0..4)
            .prop_map(|v| ArcSet::from_arcs(v.into_iter().map(|(s, l)| Arc::new(s, l).unwrap())))
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in arb_arcset(), b in arb_arcset()) {
            let lhs = a.union(&b).measure() + a.intersection(&b).measure();
            let rhs = a.measure() + b.measure();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn complement_partitions(a in arb_arcset()) {
            prop_assert!((a.measure() + a.complement().measure() - TAU).abs() < 1e-10);
        }

        #[test]
        fn poincare_is_mobius_invariant(
            cr in 0.0..0.95f64, ct in 0.0..TAU,
            sr in 0.0..0.95f64, st in 0.0..TAU,
            tr in 0.0..0.95f64, tt in 0.0..TAU,
        ) {
            let c = C::from_polar(cr, ct);
            let s = C::from_polar(sr, st);
            let t = C::from_polar(tr, tt);
            let d0 = poincare_distance(s, t).unwrap();
            let d1 = poincare_distance(mobius(c, s).unwrap(), mobius(c, t).unwrap()).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0));
        }

        #[test]
        fn tau_maps_disc_into_open_strip(r in 0.0..0.999f64, t in 0.0..TAU) {
            let v = strip_map_tau(C::from_polar(r, t)).unwrap();
            prop_assert!(v.re > 0.0 && v.re < 1.0);
        }
    }
}
