//! Rays, projective subspaces and the projective predicates: independence,
//! collinearity, frames, and the transition probability `⊙`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unit-norm tolerance for ray representatives.
pub const RAY_NORM_TOL: f64 = 1e-12;
/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-10;
/// Projection-residual tolerance for subspace membership and joins.
pub const SUBSPACE_TOL: f64 = 1e-10;

/// Scalar field the data lives over. Real data is stored as complex with
/// zero imaginary parts; the tag only switches field-specific behavior
/// (probe sets, automorphism detection).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    Real,
    Complex,
}

/// A nonzero vector of complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: DVector<C64>,
}

impl StateVector {
    pub fn new(components: DVector<C64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: components.len(),
            });
        }
        if components.iter().map(|c| c.norm()).fold(0.0, f64::max) <= 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { components })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &DVector<C64> {
        &self.components
    }

    pub fn into_components(self) -> DVector<C64> {
        self.components
    }
}

/// A one-dimensional subspace, stored through its canonical representative:
/// unit Euclidean norm, with the largest-magnitude component (lowest index
/// on ties) rotated to be real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    representative: DVector<C64>,
}

/// Canonical phase gauge: index of the largest-magnitude component,
/// keeping the lowest index on ties.
fn pivot_index(v: &DVector<C64>) -> usize {
    let mut best = 0;
    let mut best_mag = v[0].norm();
    for (i, c) in v.iter().enumerate().skip(1) {
        if c.norm() > best_mag {
            best = i;
            best_mag = c.norm();
        }
    }
    best
}

impl Ray {
    /// Builds the ray `[v]`, normalizing and applying the canonical phase
    /// gauge. Invariant under scaling of `v` by any nonzero scalar.
    pub fn from_vector(v: &StateVector) -> Result<Self> {
        let mut rep = v.components().clone();
        let norm = rep.norm();
        if norm <= 1e-300 {
            return Err(Error::ZeroVector);
        }
        rep /= C64::new(norm, 0.0);
        let p = pivot_index(&rep);
        let phase = rep[p] / C64::new(rep[p].norm(), 0.0);
        rep *= phase.conj();
        // Pivot is now real up to roundoff; clamp the stray imaginary part.
        rep[p] = C64::new(rep[p].norm(), 0.0);
        Ok(Self {
            representative: rep,
        })
    }

    pub fn from_components(components: DVector<C64>) -> Result<Self> {
        Self::from_vector(&StateVector::new(components)?)
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::from_vector(&StateVector::from_reals(values)?)
    }

    /// Standard basis ray `[e_k]` (zero-based index).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self { representative: v }
    }

    pub fn dim(&self) -> usize {
        self.representative.len()
    }

    pub fn representative(&self) -> &DVector<C64> {
        &self.representative
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// Transition probability `[A]⊙[B] = |⟨a|b⟩|²` for unit representatives.
/// Symmetric; 1 iff the rays are equal, 0 iff they are orthogonal.
pub fn transition_probability(a: &Ray, b: &Ray) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let overlap = a.representative().dotc(b.representative());
    Ok(overlap.norm_sqr().min(1.0))
}

/// True iff `⊙(A,B) ≥ 1 − tol`; by the Schwarz equality case this is ray
/// equality up to tolerance, blind to representative phases.
pub fn rays_equal(a: &Ray, b: &Ray, tol: f64) -> Result<bool> {
    Ok(transition_probability(a, b)? >= 1.0 - tol)
}

/// A projective subspace of `P(ℂ^n)`, stored through an orthonormal basis
/// of its linear span so that membership reduces to a projection residual.
#[derive(Debug, Clone)]
pub struct ProjectiveSubspace {
    ambient_dim: usize,
    basis: Vec<DVector<C64>>,
}

impl ProjectiveSubspace {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[DVector<C64>] {
        &self.basis
    }

    /// Dimension as a projective manifold: linear span dimension minus one.
    pub fn projective_dim(&self) -> usize {
        self.basis.len() - 1
    }

    /// Norm of the component of `v` orthogonal to the span.
    pub fn residual(&self, v: &DVector<C64>) -> f64 {
        let mut rem = v.clone();
        for u in &self.basis {
            let coeff = u.dotc(&rem);
            rem -= u * coeff;
        }
        rem.norm()
    }
}

/// The projective line `A ∨ B`: all rays `[αa + βb]`.
pub fn join(a: &Ray, b: &Ray) -> Result<ProjectiveSubspace> {
    check_dims(a.dim(), b.dim())?;
    if rays_equal(a, b, SUBSPACE_TOL)? {
        return Err(Error::DegenerateJoin);
    }
    let u1 = a.representative().clone();
    let mut u2 = b.representative().clone();
    let coeff = u1.dotc(&u2);
    u2 -= &u1 * coeff;
    let norm = u2.norm();
    u2 /= C64::new(norm, 0.0);
    Ok(ProjectiveSubspace {
        ambient_dim: a.dim(),
        basis: vec![u1, u2],
    })
}

/// True iff the component of `c` orthogonal to `s` has norm at most `tol`.
/// Scale- and phase-invariant in `c`'s pre-gauge representative because the
/// stored representative is unit-norm.
pub fn contains(s: &ProjectiveSubspace, c: &Ray, tol: f64) -> Result<bool> {
    check_dims(s.ambient_dim(), c.dim())?;
    Ok(s.residual(c.representative()) <= tol)
}

/// Full-column-rank test of the representative matrix, with the smallest
/// singular value compared against `RANK_REL_TOL` times the largest.
pub fn projectively_independent(rays: &[Ray]) -> Result<bool> {
    if rays.len() < 2 {
        return Err(Error::TooFewRays {
            min: 2,
            got: rays.len(),
        });
    }
    let n = rays[0].dim();
    for r in rays {
        check_dims(n, r.dim())?;
    }
    if rays.len() > n {
        return Ok(false);
    }
    let m = DMatrix::from_fn(n, rays.len(), |i, j| rays[j].representative()[i]);
    let sv = m.svd(false, false).singular_values;
    let largest = sv.max();
    let smallest = sv.min();
    Ok(smallest > RANK_REL_TOL * largest)
}

/// True iff every point lies on the projective line through the first two.
pub fn collinear(points: &[Ray]) -> Result<bool> {
    if points.len() < 3 {
        return Err(Error::TooFewRays {
            min: 3,
            got: points.len(),
        });
    }
    let line = join(&points[0], &points[1])?;
    for p in &points[2..] {
        if !contains(&line, p, SUBSPACE_TOL)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Frame test: for vector-space dimension `n` (projective dimension
/// `n − 1`) a frame holds `n + 1` rays, every `n` of which are
/// projectively independent.
pub fn is_projective_frame(rays: &[Ray]) -> Result<bool> {
    if rays.is_empty() {
        return Err(Error::TooFewRays { min: 3, got: 0 });
    }
    let n = rays[0].dim();
    for r in rays {
        check_dims(n, r.dim())?;
    }
    if rays.len() != n + 1 {
        return Err(Error::WrongFrameSize {
            dim: n,
            expected: n + 1,
            got: rays.len(),
        });
    }
    for leave_out in 0..rays.len() {
        let subset: Vec<Ray> = rays
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != leave_out)
            .map(|(_, r)| r.clone())
            .collect();
        if !projectively_independent(&subset)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A validated projective frame.
#[derive(Debug, Clone)]
pub struct ProjectiveFrame {
    rays: Vec<Ray>,
}

impl ProjectiveFrame {
    pub fn new(rays: Vec<Ray>) -> Result<Self> {
        if !is_projective_frame(&rays)? {
            return Err(Error::TooFewRays {
                min: rays[0].dim() + 1,
                got: rays.len(),
            });
        }
        Ok(Self { rays })
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ambient_dim(&self) -> usize {
        self.rays[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn ray(components: Vec<C64>) -> Ray {
        Ray::from_components(DVector::from_vec(components)).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gauge_scaling_invariance() {
        let a = Ray::from_reals(&[3.0, 0.0]).unwrap();
        assert!((a.representative()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(a.representative()[1].norm() < 1e-15);
    }

    #[test]
    fn gauge_forces_real_positive_pivot() {
        let a = ray(vec![c(0.0, 0.0), c(0.0, 2.0)]);
        assert!((a.representative()[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn negated_vector_gives_identical_representative() {
        let a = Ray::from_reals(&[1.0, 1.0]).unwrap();
        let b = Ray::from_reals(&[-1.0, -1.0]).unwrap();
        assert!((a.representative() - b.representative()).norm() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        let v = dvector![c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(StateVector::new(v), Err(Error::ZeroVector)));
    }

    #[test]
    fn transition_probability_examples() {
        let e1 = Ray::basis(2, 0);
        let e2 = Ray::basis(2, 1);
        let diag = Ray::from_reals(&[1.0, 1.0]).unwrap();
        assert!(transition_probability(&e1, &e2).unwrap() < 1e-15);
        assert!((transition_probability(&e1, &e1).unwrap() - 1.0).abs() < 1e-15);
        assert!((transition_probability(&e1, &diag).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn transition_probability_dim_mismatch() {
        let a = Ray::basis(2, 0);
        let b = Ray::basis(3, 0);
        assert!(matches!(
            transition_probability(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rays_equal_phase_invariance() {
        let v = dvector![c(0.3, 0.4), c(-0.2, 0.9)];
        let a = Ray::from_components(v.clone()).unwrap();
        let theta = 1.234_f64;
        let b = Ray::from_components(v * C64::from_polar(1.0, theta)).unwrap();
        assert!(rays_equal(&a, &b, 1e-8).unwrap());
        assert!(!rays_equal(&Ray::basis(2, 0), &Ray::basis(2, 1), 1e-8).unwrap());
    }

    #[test]
    fn join_spans_first_two_coordinates() {
        let line = join(&Ray::basis(3, 0), &Ray::basis(3, 1)).unwrap();
        assert_eq!(line.projective_dim(), 1);
        assert_eq!(line.basis().len(), 2);
        let mid = Ray::from_reals(&[1.0, 1.0, 0.0]).unwrap();
        assert!(contains(&line, &mid, 1e-12).unwrap());
        let out = Ray::basis(3, 2);
        assert!(!contains(&line, &out, 1e-8).unwrap());
    }

    #[test]
    fn join_is_symmetric_as_subspace() {
        let a = ray(vec![c(1.0, 0.2), c(0.5, -0.1), c(0.0, 0.7)]);
        let b = ray(vec![c(-0.3, 0.0), c(1.0, 0.4), c(0.2, 0.2)]);
        let ab = join(&a, &b).unwrap();
        let ba = join(&b, &a).unwrap();
        for u in ba.basis() {
            assert!(ab.residual(u) < 1e-12);
        }
    }

    #[test]
    fn join_of_equal_rays_degenerate() {
        let a = Ray::from_reals(&[1.0, 2.0]).unwrap();
        let b = Ray::from_reals(&[2.0, 4.0]).unwrap();
        assert!(matches!(join(&a, &b), Err(Error::DegenerateJoin)));
    }

    #[test]
    fn span_member_lies_in_join() {
        // [2a - 3b] must lie on A ∨ B; membership residual is the oracle.
        let a = ray(vec![c(0.9, 0.1), c(0.2, -0.4), c(0.1, 0.3)]);
        let b = ray(vec![c(-0.2, 0.5), c(0.8, 0.0), c(0.3, -0.6)]);
        let combo = Ray::from_components(
            a.representative() * c(2.0, 0.0) - b.representative() * c(3.0, 0.0),
        )
        .unwrap();
        let line = join(&a, &b).unwrap();
        assert!(line.residual(combo.representative()) <= 1e-12);
        assert!(contains(&line, &combo, 1e-12).unwrap());
    }

    #[test]
    fn independence_examples() {
        let e1 = Ray::basis(2, 0);
        let e2 = Ray::basis(2, 1);
        assert!(projectively_independent(&[e1.clone(), e2.clone()]).unwrap());
        let e1_scaled = Ray::from_reals(&[2.0, 0.0]).unwrap();
        assert!(!projectively_independent(&[e1.clone(), e1_scaled]).unwrap());
        // n + 1 rays in dimension n can never be independent.
        let three = vec![e1, e2, Ray::from_reals(&[1.0, 1.0]).unwrap()];
        assert!(!projectively_independent(&three).unwrap());
    }

    #[test]
    fn too_few_rays_for_independence() {
        assert!(matches!(
            projectively_independent(&[Ray::basis(2, 0)]),
            Err(Error::TooFewRays { .. })
        ));
    }

    #[test]
    fn collinear_examples() {
        let e1 = Ray::basis(3, 0);
        let e2 = Ray::basis(3, 1);
        let mid = Ray::from_reals(&[1.0, 1.0, 0.0]).unwrap();
        assert!(collinear(&[e1.clone(), e2.clone(), mid]).unwrap());
        assert!(!collinear(&[e1, e2, Ray::basis(3, 2)]).unwrap());
    }

    #[test]
    fn frame_examples() {
        let e1 = Ray::basis(3, 0);
        let e2 = Ray::basis(3, 1);
        let e3 = Ray::basis(3, 2);
        let all = Ray::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        assert!(is_projective_frame(&[e1.clone(), e2.clone(), e3.clone(), all]).unwrap());
        let bad = Ray::from_reals(&[1.0, 1.0, 0.0]).unwrap();
        assert!(!is_projective_frame(&[e1.clone(), e2.clone(), e3, bad]).unwrap());
        let diag2 = Ray::from_reals(&[1.0, 1.0]).unwrap();
        assert!(is_projective_frame(&[Ray::basis(2, 0), Ray::basis(2, 1), diag2]).unwrap());
    }

    #[test]
    fn frame_size_enforced() {
        let e1 = Ray::basis(3, 0);
        let e2 = Ray::basis(3, 1);
        assert!(matches!(
            is_projective_frame(&[e1, e2]),
            Err(Error::WrongFrameSize { .. })
        ));
    }
}
