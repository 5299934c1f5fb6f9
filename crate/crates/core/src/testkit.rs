//! Seeded generators and independent oracles for property tests and
//! acceptance runs. All randomness goes through ChaCha8 so that a fixed
//! seed reproduces the same objects on every platform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::maps::{MatrixMap, RayMap};
use crate::projective::{transition_probability, Ray, C64};

/// Reproducibility handle: the one PRNG seed type used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

pub fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| standard_complex(rng))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phase fix that makes the triangular factor's diagonal real positive.
pub fn haar_unitary_with<R: Rng>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let g = gaussian_matrix(n, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(n: usize, seed: Seed) -> DMatrix<C64> {
    haar_unitary_with(n, &mut seed.rng())
}

/// Uniform random ray: standard complex Gaussian components, then gauge.
pub fn random_ray_with<R: Rng>(n: usize, rng: &mut R) -> Ray {
    loop {
        let v = DVector::from_fn(n, |_, _| standard_complex(rng));
        if let Ok(ray) = Ray::from_components(v) {
            return ray;
        }
    }
}

pub fn random_ray(n: usize, seed: Seed) -> Ray {
    random_ray_with(n, &mut seed.rng())
}

/// Real-coordinate random ray, for `FieldTag::Real` data.
pub fn random_real_ray_with<R: Rng>(n: usize, rng: &mut R) -> Ray {
    loop {
        let v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0)
        });
        if let Ok(ray) = Ray::from_components(v) {
            return ray;
        }
    }
}

/// Matrix of pairwise transition probabilities; unit diagonal, symmetric.
pub fn gram_probabilities(rays: &[Ray]) -> Result<DMatrix<f64>> {
    let m = rays.len();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        out[(i, i)] = 1.0;
        for j in (i + 1)..m {
            let p = transition_probability(&rays[i], &rays[j])?;
            out[(i, j)] = p;
            out[(j, i)] = p;
        }
    }
    Ok(out)
}

/// Adds independent complex Gaussian noise of scale `eps` to every entry
/// of the generating matrix. Used by the robustness ladder.
pub fn perturb_ray_map(map: &MatrixMap, eps: f64, seed: Seed) -> Result<RayMap> {
    let mut rng = seed.rng();
    let n = map.dim();
    let noise = DMatrix::from_fn(n, n, |_, _| {
        standard_complex(&mut rng) * Complex64::new(eps, 0.0)
    });
    let perturbed = map.matrix() + noise;
    Ok(RayMap::MatrixInduced(MatrixMap::new(
        perturbed,
        map.conjugate_first(),
    )?))
}
