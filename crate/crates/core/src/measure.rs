//! Vector-valued measures on the unit circle built from atoms and
//! piecewise-constant densities, and their Herglotz transforms.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;

use crate::circle::{canonical_angle, half_pi, unit, Arc, ArcSet, ARC_TOL};
use crate::error::{Error, Result};
use crate::quad::romberg;
use crate::scalar::{cvalue, Real};

type C64 = Complex<f64>;

/// `weight · χ_arc dL`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPiece<T> {
    pub arc: Arc,
    pub weight: Vec<T>,
}

/// `mass · δ_{e^{i angle}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub angle: f64,
    pub mass: Vec<T>,
}

impl<T: Real> Atom<T> {
    pub fn point(&self) -> Complex<T> {
        unit(T::of(self.angle))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleMeasure<T> {
    dim: usize,
    pub pieces: Vec<DensityPiece<T>>,
    pub atoms: Vec<Atom<T>>,
}

/// Where a measure fails to be non-positive.
#[derive(Clone, Debug, PartialEq)]
pub enum NegativityWitness {
    Density { index: usize, arc: Arc, weight: f64 },
    Atom { index: usize, angle: f64, mass: f64 },
}

impl<T: Real> CircleMeasure<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, pieces: Vec::new(), atoms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_density(mut self, arc: Arc, weight: Vec<T>) -> Result<Self> {
        self.check_dim(weight.len())?;
        if !arc.is_empty() {
            self.pieces.push(DensityPiece { arc, weight });
        }
        Ok(self)
    }

    pub fn with_density_on(mut self, set: &ArcSet, weight: Vec<T>) -> Result<Self> {
        self.check_dim(weight.len())?;
        for arc in set.arcs() {
            self.pieces.push(DensityPiece { arc: *arc, weight: weight.clone() });
        }
        Ok(self)
    }

    pub fn with_atom(mut self, angle: f64, mass: Vec<T>) -> Result<Self> {
        self.check_dim(mass.len())?;
        self.atoms.push(Atom { angle: canonical_angle(angle), mass });
        Ok(self)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::Dimension { expected: self.dim, got });
        }
        Ok(())
    }

    /// Merges atoms sitting at the same angle and drops zero atoms.
    pub fn normalized(&self) -> Self {
        let mut atoms: Vec<Atom<T>> = Vec::new();
        let mut sorted = self.atoms.clone();
        sorted.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        for atom in sorted {
            let same = atoms.last_mut().filter(|last| {
                let d = (last.angle - atom.angle).abs();
                d <= ARC_TOL || d >= TAU - ARC_TOL
            });
            match same {
                Some(last) => {
                    for (m, x) in last.mass.iter_mut().zip(&atom.mass) {
                        *m = *m + *x;
                    }
                }
                None => atoms.push(atom),
            }
        }
        atoms.retain(|a| a.mass.iter().any(|m| m.value() != 0.0));
        Self { dim: self.dim, pieces: self.pieces.clone(), atoms }
    }

    /// Total variation per coordinate.
    pub fn total_variation(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for p in &self.pieces {
            for l in 0..self.dim {
                out[l] = out[l] + p.weight[l].abs() * T::of(p.arc.length());
            }
        }
        for a in &self.atoms {
            for l in 0..self.dim {
                out[l] = out[l] + a.mass[l].abs();
            }
        }
        out
    }

    /// Measure of the whole circle per coordinate.
    pub fn total_mass(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for p in &self.pieces {
            for l in 0..self.dim {
                out[l] = out[l] + p.weight[l] * T::of(p.arc.length());
            }
        }
        for a in &self.atoms {
            for l in 0..self.dim {
                out[l] = out[l] + a.mass[l];
            }
        }
        out
    }

    /// `V · μ` for a real `m × n` matrix given by rows.
    pub fn apply_matrix(&self, rows: &[Vec<f64>]) -> Result<Self> {
        for r in rows {
            self.check_dim(r.len())?;
        }
        let act = |w: &[T]| -> Vec<T> {
            rows.iter()
                .map(|r| r.iter().zip(w).fold(T::zero(), |s, (v, x)| s + T::of(*v) * *x))
                .collect()
        };
        Ok(Self {
            dim: rows.len(),
            pieces: self.pieces.iter().map(|p| DensityPiece { arc: p.arc, weight: act(&p.weight) }).collect(),
            atoms: self.atoms.iter().map(|a| Atom { angle: a.angle, mass: act(&a.mass) }).collect(),
        })
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| DensityPiece { arc: p.arc, weight: p.weight.iter().map(|w| *w * s).collect() })
                .collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { angle: a.angle, mass: a.mass.iter().map(|m| *m * s).collect() })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        out.pieces.extend(other.pieces.iter().cloned());
        out.atoms.extend(other.atoms.iter().cloned());
        Ok(out)
    }

    /// Density value at angle `t`, summed over all pieces covering it.
    pub fn density_at(&self, t: f64) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for p in self.pieces.iter().filter(|p| p.arc.contains(t)) {
            for l in 0..self.dim {
                out[l] = out[l] + p.weight[l];
            }
        }
        out
    }

    /// Angles where the density may jump, sorted in `[0, 2π)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in self.pieces.iter().filter(|p| !p.arc.is_full()) {
            out.push(p.arc.start());
            out.push(canonical_angle(p.arc.end()));
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= ARC_TOL);
        out
    }

    /// Partition of the circle into arcs on which the density is constant,
    /// each paired with that constant.
    pub fn constant_runs(&self) -> Vec<(Arc, Vec<T>)> {
        let cuts = self.breakpoints();
        if cuts.is_empty() {
            return vec![(Arc::full(), self.density_at(0.0))];
        }
        let mut runs = Vec::with_capacity(cuts.len());
        for (k, &from) in cuts.iter().enumerate() {
            let to = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + TAU };
            if to - from <= ARC_TOL {
                continue;
            }
            let arc = Arc::between(from, to);
            runs.push((arc, self.density_at(arc.midpoint())));
        }
        runs
    }

    /// Herglotz transform; see [`herglotz_transform`].
    pub fn herglotz(&self, lambda: Complex<T>, offset: &[T]) -> Result<Vec<Complex<T>>> {
        herglotz_transform(self, lambda, offset)
    }

    /// `(μ_l ≤ 0)` up to `1e−12`.
    pub fn is_negative(&self, coordinate: usize) -> std::result::Result<(), NegativityWitness> {
        self.is_negative_within(coordinate, 1e-12)
    }

    pub fn is_negative_within(&self, coordinate: usize, tol: f64) -> std::result::Result<(), NegativityWitness> {
        for (index, p) in self.pieces.iter().enumerate() {
            let w = p.weight[coordinate].value();
            if w > tol {
                return Err(NegativityWitness::Density { index, arc: p.arc, weight: w });
            }
        }
        for (index, a) in self.atoms.iter().enumerate() {
            let m = a.mass[coordinate].value();
            if m > tol {
                return Err(NegativityWitness::Atom { index, angle: a.angle, mass: m });
            }
        }
        Ok(())
    }

    pub fn atom_angles(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.angle).collect()
    }
}

impl CircleMeasure<f64> {
    /// Restriction `χ_S μ` to an arc set.
    pub fn restricted_to(&self, set: &ArcSet) -> Self {
        let mut out = Self::zero(self.dim);
        for p in &self.pieces {
            let part = set.intersection(&ArcSet::from_arc(p.arc));
            for arc in part.arcs() {
                out.pieces.push(DensityPiece { arc: *arc, weight: p.weight.clone() });
            }
        }
        for a in self.atoms.iter().filter(|a| set.contains(a.angle)) {
            out.atoms.push(a.clone());
        }
        out
    }

    pub fn lift<T: Real>(&self) -> CircleMeasure<T> {
        CircleMeasure {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| DensityPiece { arc: p.arc, weight: p.weight.iter().map(|w| T::of(*w)).collect() })
                .collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { angle: a.angle, mass: a.mass.iter().map(|m| T::of(*m)).collect() })
                .collect(),
        }
    }
}

fn check_inside<T: Real>(lambda: Complex<T>) -> Result<()> {
    if lambda.norm().value() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc(format!("{}", cvalue(lambda))))
    }
}

/// Closed-form `(1/2π)∫(ζ+λ)/(ζ−λ)dμ(ζ) + i·offset`.
///
/// Each density piece is split into sub-arcs of length at most `π/2` and
/// integrated as `(w/2π)[−ℓ − 2i Δlog(ζ−λ)]`. The argument of `ζ − λ` grows
/// monotonically along the circle, so each increment is recovered from the
/// principal argument of the endpoint ratio, shifted into `(0, 2π)`.
pub fn herglotz_transform<T: Real>(mu: &CircleMeasure<T>, lambda: Complex<T>, offset: &[T]) -> Result<Vec<Complex<T>>> {
    check_inside(lambda)?;
    if offset.len() != mu.dim {
        return Err(Error::Dimension { expected: mu.dim, got: offset.len() });
    }
    let mut out: Vec<Complex<T>> = offset.iter().map(|o| Complex::new(T::zero(), *o)).collect();
    let inv_tau = T::one() / T::TAU();
    for atom in &mu.atoms {
        let z0 = atom.point();
        let kernel = (z0 + lambda) / (z0 - lambda) * inv_tau;
        for l in 0..mu.dim {
            out[l] = out[l] + kernel * atom.mass[l];
        }
    }
    for piece in &mu.pieces {
        let kernel = arc_kernel(&piece.arc, lambda) * inv_tau;
        for l in 0..mu.dim {
            out[l] = out[l] + kernel * piece.weight[l];
        }
    }
    Ok(out)
}

/// `∫_arc (ζ+λ)/(ζ−λ) dt` in closed form.
pub(crate) fn arc_kernel<T: Real>(arc: &Arc, lambda: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for sub in arc.split(half_pi()) {
        let z1 = unit(T::of(sub.start()));
        let z2 = unit(T::of(sub.end()));
        let ratio = (z2 - lambda) / (z1 - lambda);
        let mut turn = ratio.im.atan2(ratio.re);
        if turn.value() < -0.5 * PI {
            turn = turn + T::TAU();
        }
        let log_inc = Complex::new(ratio.norm().ln(), turn);
        acc = acc + Complex::new(-T::of(sub.length()), T::zero()) - Complex::new(T::zero(), T::of(2.0)) * log_inc;
    }
    acc
}

/// `d/dλ` of the Herglotz transform.
pub fn herglotz_derivative(mu: &CircleMeasure<f64>, lambda: C64) -> Result<Vec<C64>> {
    check_inside(lambda)?;
    let mut out = vec![C64::new(0.0, 0.0); mu.dim];
    for atom in &mu.atoms {
        let z0: C64 = atom.point();
        let k = 2.0 * z0 / ((z0 - lambda) * (z0 - lambda)) / TAU;
        for l in 0..mu.dim {
            out[l] += k * atom.mass[l];
        }
    }
    for piece in &mu.pieces {
        let mut k = C64::new(0.0, 0.0);
        for sub in piece.arc.split(half_pi()) {
            let z1: C64 = unit(sub.start());
            let z2: C64 = unit(sub.end());
            k += C64::new(0.0, -2.0) * (1.0 / (z1 - lambda) - 1.0 / (z2 - lambda));
        }
        for l in 0..mu.dim {
            out[l] += k * piece.weight[l] / TAU;
        }
    }
    Ok(out)
}

/// Independent evaluation of the Herglotz transform: Romberg quadrature over
/// each density piece, atoms in closed form, no imaginary offset.
pub fn herglotz_quadrature_oracle(mu: &CircleMeasure<f64>, lambda: C64) -> Result<Vec<C64>> {
    check_inside(lambda)?;
    let mut out = vec![C64::new(0.0, 0.0); mu.dim];
    for atom in &mu.atoms {
        let z0: C64 = atom.point();
        let kernel = (z0 + lambda) / (z0 - lambda) / TAU;
        for l in 0..mu.dim {
            out[l] += kernel * atom.mass[l];
        }
    }
    for piece in &mu.pieces {
        let v = romberg(
            |t| {
                let z = C64::from_polar(1.0, t);
                vec![(z + lambda) / (z - lambda)]
            },
            piece.arc.start(),
            piece.arc.end(),
            1,
            1e-13,
            22,
        )?;
        for l in 0..mu.dim {
            out[l] += v[0] * piece.weight[l] / TAU;
        }
    }
    Ok(out)
}

/// `∫u dμ`, with Simpson's rule on each density piece using roughly
/// `resolution` panels per full turn.
pub fn pair_with_test_function<F: Fn(f64) -> f64>(mu: &CircleMeasure<f64>, u: F, resolution: usize) -> Vec<f64> {
    let mut out = vec![0.0; mu.dim];
    for piece in &mu.pieces {
        let len = piece.arc.length();
        let mut panels = ((resolution as f64) * len / TAU).ceil() as usize;
        panels = panels.max(2);
        if panels % 2 == 1 {
            panels += 1;
        }
        let h = len / panels as f64;
        let mut s = 0.0;
        for k in 0..=panels {
            let w = if k == 0 || k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * u(piece.arc.start() + k as f64 * h);
        }
        s *= h / 3.0;
        for l in 0..mu.dim {
            out[l] += piece.weight[l] * s;
        }
    }
    for atom in &mu.atoms {
        let v = u(atom.angle);
        for l in 0..mu.dim {
            out[l] += atom.mass[l] * v;
        }
    }
    out
}
