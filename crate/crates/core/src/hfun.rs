//! Quadratic certificates `h(λ) = āλ² + bλ + a` and their circle symbols.

use std::f64::consts::TAU;

use num_complex::Complex;

use crate::circle::{canonical_angle, Arc, ArcSet};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on the `b = 2|a|` boundary, relative to the coefficient scale.
pub const ROOT_TOL: f64 = 1e-10;

/// One coordinate of a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct QuadTerm<T> {
    pub a: Complex<T>,
    pub b: T,
}

impl<T: Real> QuadTerm<T> {
    pub fn new(a: Complex<T>, b: T) -> Self {
        Self { a, b }
    }

    pub fn eval(&self, lambda: Complex<T>) -> Complex<T> {
        (self.a.conj() * lambda + self.b) * lambda + self.a
    }

    /// `h′(λ) = 2āλ + b`.
    pub fn derivative(&self, lambda: Complex<T>) -> Complex<T> {
        self.a.conj() * lambda * T::of(2.0) + self.b
    }

    pub fn symbol(&self, t: T) -> T {
        circle_symbol(self.a, self.b, t)
    }

    pub fn scale(&self) -> T {
        self.a.norm().max(self.b.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.a.norm().value() == 0.0 && self.b.value() == 0.0
    }
}

impl QuadTerm<f64> {
    pub fn positivity_arc(&self) -> Result<ArcSet> {
        positivity_arc(self.a, self.b)
    }
}

/// The certificate `h = (h_1, …, h_n)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QuadCertificate<T> {
    pub terms: Vec<QuadTerm<T>>,
}

impl<T: Real> QuadCertificate<T> {
    pub fn new(terms: Vec<QuadTerm<T>>) -> Self {
        Self { terms }
    }

    pub fn from_pairs(pairs: &[(Complex<T>, T)]) -> Self {
        Self { terms: pairs.iter().map(|&(a, b)| QuadTerm { a, b }).collect() }
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, lambda: Complex<T>) -> Vec<Complex<T>> {
        eval_h(self, lambda)
    }

    pub fn derivative(&self, lambda: Complex<T>) -> Vec<Complex<T>> {
        self.terms.iter().map(|t| t.derivative(lambda)).collect()
    }

    /// Values `λ̄h_l(λ)` at `λ = e^{it}`.
    pub fn symbols(&self, t: T) -> Vec<T> {
        self.terms.iter().map(|h| h.symbol(t)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    /// `max_l max(|a_l|, |b_l|)`.
    pub fn scale(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, t| m.max(t.scale()))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            terms: self.terms.iter().map(|t| QuadTerm { a: t.a * s, b: t.b * s }).collect(),
        }
    }

    /// Divides by [`scale`](Self::scale) so the largest coefficient has modulus one.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.scale();
        if s.value() == 0.0 {
            return Err(Error::ZeroCertificate);
        }
        Ok(self.scaled(T::one() / s))
    }
}

/// `h_l(λ) = ā_lλ² + b_lλ + a_l` for every coordinate.
pub fn eval_h<T: Real>(h: &QuadCertificate<T>, lambda: Complex<T>) -> Vec<Complex<T>> {
    h.terms.iter().map(|t| t.eval(lambda)).collect()
}

/// `2 Re(ā e^{it}) + b`, the restriction of `λ̄h(λ)` to the circle.
pub fn circle_symbol<T: Real>(a: Complex<T>, b: T, t: T) -> T {
    let (s, c) = t.sin_cos();
    T::of(2.0) * (a.re * c + a.im * s) + b
}

/// The open set of angles where the symbol is positive.
pub fn positivity_arc(a: Complex<f64>, b: f64) -> Result<ArcSet> {
    let r = a.norm();
    if r == 0.0 && b == 0.0 {
        return Err(Error::ZeroCertificate);
    }
    let tol = ROOT_TOL * r.max(b.abs());
    if b >= 2.0 * r - tol {
        return Ok(ArcSet::full());
    }
    if b <= -2.0 * r + tol {
        return Ok(ArcSet::empty());
    }
    let half = (-b / (2.0 * r)).acos();
    let centre = a.arg();
    Ok(ArcSet::from_arc(Arc::new(canonical_angle(centre - half), 2.0 * half)?))
}

/// `b ≥ 2|a|` up to `1e−12`.
pub fn is_nonneg_on_circle(a: Complex<f64>, b: f64) -> bool {
    b >= 2.0 * a.norm() - 1e-12
}

/// The unique zero of a non-negative symbol, if it touches zero.
pub fn circle_root(a: Complex<f64>, b: f64) -> Result<Option<f64>> {
    let r = a.norm();
    if r == 0.0 && b == 0.0 {
        return Err(Error::ZeroCertificate);
    }
    let tol = ROOT_TOL * r.max(b.abs());
    if b < 2.0 * r - tol {
        return Err(Error::SignChangingSymbol { a: format!("{a}"), b });
    }
    if r > 0.0 && (b - 2.0 * r).abs() <= tol {
        return Ok(Some(canonical_angle(a.arg() + std::f64::consts::PI)));
    }
    Ok(None)
}

/// `(v_1 a_2 − v_2 a_1, v_1 b_2 − v_2 b_1)`, whose symbol is `det[λ̄h(λ), v]` up to sign.
pub fn combine<T: Real>(v: [f64; 2], h: &QuadCertificate<T>) -> QuadTerm<T> {
    let (h1, h2) = (h.terms[0], h.terms[1]);
    let (v1, v2) = (T::of(v[0]), T::of(v[1]));
    QuadTerm { a: h2.a * v1 - h1.a * v2, b: v1 * h2.b - v2 * h1.b }
}

/// Angles where the symbol of `(a, b)` vanishes, sorted in `[0, 2π)`.
pub fn symbol_zeros(a: Complex<f64>, b: f64) -> Vec<f64> {
    let r = a.norm();
    if r == 0.0 || b.abs() > 2.0 * r {
        return Vec::new();
    }
    let half = (-b / (2.0 * r)).clamp(-1.0, 1.0).acos();
    let mut z = vec![canonical_angle(a.arg() - half), canonical_angle(a.arg() + half)];
    z.sort_by(f64::total_cmp);
    z.dedup_by(|x, y| (*x - *y).abs() < 1e-15 || (*x - *y).abs() > TAU - 1e-15);
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::unit;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rayon::prelude::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn term(a: C, b: f64) -> QuadTerm<f64> {
        QuadTerm::new(a, b)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(term(C::new(0.0, 0.0), 1.0).eval(C::new(0.0, 1.0)), C::new(0.0, 1.0));
        assert_eq!(term(C::new(-1.0, 0.0), 2.0).eval(C::new(1.0, 0.0)), C::new(0.0, 0.0));
        let h = term(C::new(0.5, 0.0), 0.0);
        for k in 0..12 {
            let t = 0.5 * k as f64;
            let l = unit(t);
            let s = l.conj() * h.eval(l);
            assert_abs_diff_eq!(s.re, t.cos(), epsilon = 1e-15);
            assert_abs_diff_eq!(s.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(circle_symbol(C::new(0.0, 0.0), 1.0, 2.3), 1.0);
        assert_eq!(circle_symbol(C::new(0.5, 0.0), 0.0, 0.0), 1.0);
        assert_eq!(circle_symbol(C::new(-1.0, 0.0), 2.0, 0.0), 0.0);
    }

    #[test]
    fn positivity_arc_examples() {
        assert!(positivity_arc(C::new(0.0, 0.0), 1.0).unwrap().is_full());
        let half = positivity_arc(C::new(0.5, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(half.measure(), PI, epsilon = 1e-15);
        assert!(half.contains(0.0) && half.contains(1.5) && half.contains(TAU - 1.5) && !half.contains(PI));
        assert!(positivity_arc(C::new(0.5, 0.0), -1.0).unwrap().is_empty());
        assert_eq!(positivity_arc(C::new(0.0, 0.0), 0.0), Err(Error::ZeroCertificate));
        assert!(positivity_arc(C::new(0.0, 0.0), -1.0).unwrap().is_empty());
    }

    #[test]
    fn nonnegativity_examples() {
        assert!(is_nonneg_on_circle(C::new(-1.0, 0.0), 2.0));
        assert!(!is_nonneg_on_circle(C::new(1.0, 0.0), 0.0));
        assert!(is_nonneg_on_circle(C::new(0.0, 0.0), 0.0));
    }

    #[test]
    fn root_examples() {
        assert_abs_diff_eq!(circle_root(C::new(-1.0, 0.0), 2.0).unwrap().unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(circle_root(C::new(0.0, 0.0), 1.0).unwrap(), None);
        assert_abs_diff_eq!(circle_root(C::new(0.5, 0.0), 1.0).unwrap().unwrap(), PI, epsilon = 1e-15);
        assert!(matches!(circle_root(C::new(1.0, 0.0), 0.0), Err(Error::SignChangingSymbol { .. })));
    }

    #[test]
    fn combine_examples() {
        let h = QuadCertificate::from_pairs(&[(C::new(0.5, 0.0), 1.0), (C::new(-0.5, 0.0), 1.0)]);
        assert_eq!(combine([1.0, 0.0], &h), term(C::new(-0.5, 0.0), 1.0));
        assert_eq!(combine([1.0, 1.0], &h), term(C::new(-1.0, 0.0), 0.0));
        assert_eq!(combine([0.0, 1.0], &h), term(C::new(-0.5, 0.0), -1.0));
    }

    #[test]
    fn combined_symbol_is_determinant() {
        let h = QuadCertificate::from_pairs(&[(C::new(0.3, -0.2), 0.9), (C::new(-0.1, 0.4), 1.2)]);
        let v = [0.7, 1.3];
        let c = combine(v, &h);
        for k in 0..20 {
            let t = 0.31 * k as f64;
            let s = h.symbols(t);
            let det = v[0] * s[1] - v[1] * s[0];
            assert_abs_diff_eq!(c.symbol(t), det, epsilon = 1e-14);
        }
    }

    #[test]
    fn symbol_zeros_bound_positivity_arc() {
        let (a, b) = (C::new(0.3, 0.4), 0.2);
        let arc = positivity_arc(a, b).unwrap();
        let mut ends = arc.boundary_angles();
        ends.sort_by(f64::total_cmp);
        let zeros = symbol_zeros(a, b);
        for (e, z) in ends.iter().zip(&zeros) {
            assert_abs_diff_eq!(e, z, epsilon = 1e-14);
        }
    }

    #[test]
    fn positivity_arc_matches_sampling() {
        let cases = [(C::new(0.5, 0.0), 0.0), (C::new(0.2, -0.7), 0.4), (C::new(-1.0, 0.3), -1.5)];
        // the midpoint grid miscounts each endpoint by at most one step of 2π/n
        let n: usize = 1 << 24;
        for (a, b) in cases {
            let hits: usize = (0..n)
                .into_par_iter()
                .filter(|&k| circle_symbol(a, b, TAU * (k as f64 + 0.5) / n as f64) > 0.0)
                .count();
            let frac = TAU * hits as f64 / n as f64;
            assert!((frac - positivity_arc(a, b).unwrap().measure()).abs() < 1e-6);
        }
    }

    #[test]
    fn normalization_divides_by_largest_coefficient() {
        let h = QuadCertificate::from_pairs(&[(C::new(3.0, 4.0), 2.0), (C::new(0.0, 0.0), -7.0)]);
        let n = h.normalized().unwrap();
        assert_abs_diff_eq!(n.scale(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.terms[1].b, -1.0, epsilon = 1e-15);
        assert!(QuadCertificate::<f64>::from_pairs(&[(C::new(0.0, 0.0), 0.0)]).normalized().is_err());
    }

    proptest! {
        #[test]
        fn symbol_is_real_part_of_lambda_bar_h(
            ar in -2.0..2.0f64, ai in -2.0..2.0f64, b in -3.0..3.0f64, t in 0.0..TAU
        ) {
            let h = term(C::new(ar, ai), b);
            let l = unit(t);
            let v = l.conj() * h.eval(l);
            prop_assert!((v.re - h.symbol(t)).abs() < 1e-13);
            prop_assert!(v.im.abs() < 1e-13);
        }

        #[test]
        fn positivity_arc_is_projective(
            ar in -2.0..2.0f64, ai in -2.0..2.0f64, b in -3.0..3.0f64, k in -10i32..10
        ) {
            prop_assume!(ar != 0.0 || ai != 0.0 || b != 0.0);
            let s = 2f64.powi(k);
            let base = positivity_arc(C::new(ar, ai), b).unwrap();
            prop_assert_eq!(&base, &positivity_arc(C::new(ar * s, ai * s), b * s).unwrap());
            for s in [1e-3, 1e3] {
                let other = positivity_arc(C::new(ar * s, ai * s), b * s).unwrap();
                prop_assert!((base.measure() - other.measure()).abs() < 1e-12);
            }
        }
    }
}
