//! Constructive core of the fundamental theorem of projective geometry:
//! from a collineation, build a compatible semi-linear map.
//!
//! The construction takes the probe images `f[e_k]` as candidate basis
//! columns, rescales them so that `f[e_1 + e_k] = [w_1 + w_k]`, detects
//! the field automorphism from `f[e_1 + i·e_k]`, and certifies the result
//! against the map on random rays.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result, Witness};
use crate::maps::{condition_number, probe_images, RayMap, VerificationReport, CONDITION_LIMIT};
use crate::projective::{transition_probability, FieldTag, Ray, StateVector, C64};
use crate::testkit::{random_ray_with, random_real_ray_with, Seed};

/// Tolerance for the automorphism test `|μ ∓ i| ≤ SIGMA_TOL`.
pub const SIGMA_TOL: f64 = 1e-6;
/// The distance to the rejected alternative must be at least this large,
/// so noise can never flip the verdict silently.
pub const SIGMA_SEPARATION: f64 = 0.5;

/// Field automorphism of ℂ fixing the unit element: identity or
/// complex conjugation. These are the only two continuous choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sigma {
    Identity,
    Conjugation,
}

impl Sigma {
    pub fn apply_scalar(self, z: C64) -> C64 {
        match self {
            Sigma::Identity => z,
            Sigma::Conjugation => z.conj(),
        }
    }

    pub fn apply_vector(self, v: &DVector<C64>) -> DVector<C64> {
        match self {
            Sigma::Identity => v.clone(),
            Sigma::Conjugation => v.map(|z| z.conj()),
        }
    }
}

/// Decides σ from the observed `μ = σ(i)`: near `i` means identity, near
/// `-i` means conjugation. Anything else is refused rather than guessed.
pub fn classify_automorphism(mu: C64) -> Result<(Sigma, f64)> {
    let d_identity = (mu - Complex64::i()).norm();
    let d_conjugation = (mu + Complex64::i()).norm();
    if d_identity <= SIGMA_TOL && d_conjugation >= SIGMA_SEPARATION {
        Ok((Sigma::Identity, d_identity))
    } else if d_conjugation <= SIGMA_TOL && d_identity >= SIGMA_SEPARATION {
        Ok((Sigma::Conjugation, d_conjugation))
    } else {
        Err(Error::AutomorphismUndetermined { mu })
    }
}

/// Invertible matrix together with a field automorphism tag: acts as
/// `x ↦ M·σ(x)` with σ applied componentwise.
#[derive(Debug, Clone)]
pub struct SemiLinearMap {
    matrix: DMatrix<C64>,
    sigma: Sigma,
}

impl SemiLinearMap {
    pub fn new(matrix: DMatrix<C64>, sigma: Sigma) -> Result<Self> {
        let cond = condition_number(&matrix);
        if !(cond <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned {
                cond,
                limit: CONDITION_LIMIT,
            });
        }
        Ok(Self { matrix, sigma })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn apply_raw(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * self.sigma.apply_vector(v)
    }
}

/// Audit trail of the lift: the per-column rescale factors, the observed
/// automorphism residual, and the passing verification report.
#[derive(Debug, Clone)]
pub struct LiftDiagnostics {
    pub rescale_factors: Vec<C64>,
    pub sigma_residual: f64,
    pub verification: VerificationReport,
}

/// `y = M·σ(x)`. Additive, and `apply(F, αx) = σ(α)·apply(F, x)`.
pub fn apply_semilinear(map: &SemiLinearMap, x: &StateVector) -> Result<StateVector> {
    if x.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            got: x.dim(),
        });
    }
    StateVector::new(map.apply_raw(x.components()))
}

fn stray_coefficient_check(
    gamma: &DVector<C64>,
    keep: &[usize],
    tol: f64,
    context: &str,
) -> Result<()> {
    let max_mag = gamma.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for (j, coeff) in gamma.iter().enumerate() {
        if keep.contains(&j) {
            continue;
        }
        if coeff.norm() > tol * max_mag {
            return Err(Error::NotACollineation {
                witness: Witness {
                    context: format!("{context}: stray coefficient at index {j}"),
                    expected: 0.0,
                    observed: coeff.norm() / max_mag,
                },
            });
        }
    }
    for &j in keep {
        if gamma[j].norm() <= tol * max_mag {
            return Err(Error::NotACollineation {
                witness: Witness {
                    context: format!("{context}: vanishing coefficient at index {j}"),
                    expected: 1.0,
                    observed: gamma[j].norm() / max_mag,
                },
            });
        }
    }
    Ok(())
}

fn solve_in_basis(
    lu: &nalgebra::FullPivLU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    c: &DVector<C64>,
    context: &str,
) -> Result<DVector<C64>> {
    lu.solve(c).ok_or_else(|| Error::NotACollineation {
        witness: Witness {
            context: format!("{context}: image basis is singular"),
            expected: 0.0,
            observed: f64::INFINITY,
        },
    })
}

/// Builds a semi-linear map compatible with the collineation `f`, unique
/// up to one overall scalar factor.
pub fn lift_collineation(
    f: &RayMap,
    field: FieldTag,
    tol: f64,
    trials: u64,
    seed: Seed,
) -> Result<(SemiLinearMap, LiftDiagnostics)> {
    let n = f.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, got: n });
    }
    let images = probe_images(f, field)?;

    // Candidate columns: any representatives of the basis images.
    let mut columns: Vec<DVector<C64>> = (0..n)
        .map(|k| images.basis_image(k).representative().clone())
        .collect();
    let basis = DMatrix::from_columns(&columns);
    let lu = basis.full_piv_lu();

    // Rescale column k so that f[e_1 + e_k] = [w_1 + w_k].
    let mut rescale_factors = Vec::with_capacity(n - 1);
    for k in 1..n {
        let c = images.sum_image(k).representative();
        let gamma = solve_in_basis(&lu, c, "sum-probe expansion")?;
        stray_coefficient_check(&gamma, &[0, k], tol, "sum-probe expansion")?;
        let factor = gamma[k] / gamma[0];
        columns[k] *= factor;
        rescale_factors.push(factor);
    }
    let rescaled = DMatrix::from_columns(&columns);
    let rescaled_lu = rescaled.clone().full_piv_lu();

    // Automorphism detection, cross-validated over every twisted probe.
    let (sigma, sigma_residual) = if field == FieldTag::Real {
        (Sigma::Identity, 0.0)
    } else {
        let mut verdict: Option<Sigma> = None;
        let mut worst = 0.0_f64;
        for k in 1..n {
            let c = images.twisted_sum_image(k).representative();
            let gamma = solve_in_basis(&rescaled_lu, c, "twisted-probe expansion")?;
            stray_coefficient_check(&gamma, &[0, k], tol, "twisted-probe expansion")?;
            let mu = gamma[k] / gamma[0];
            let (s, residual) = classify_automorphism(mu)?;
            match verdict {
                None => verdict = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::AutomorphismUndetermined { mu });
                }
                Some(_) => {}
            }
            worst = worst.max(residual);
        }
        (
            verdict.expect("n >= 3 yields at least one twisted probe"),
            worst,
        )
    };

    let map = SemiLinearMap::new(rescaled, sigma)?;

    // Certify compatibility: f[x] must equal [F·σ(x)]. Random rays for
    // matrix and oracle maps, stored inputs for tabulated ones.
    let mut worst_residual = 0.0_f64;
    let mut witness = Witness {
        context: "no trials executed".to_string(),
        expected: 1.0,
        observed: 1.0,
    };
    let mut executed = 0_u64;
    let record = |context: String, residual: f64, worst: &mut f64, witness: &mut Witness| {
        if residual > *worst {
            *worst = residual;
            *witness = Witness {
                context,
                expected: 1.0,
                observed: 1.0 - residual,
            };
        }
    };
    if let RayMap::Tabulated(t) = f {
        for (i, (input, output)) in t.pairs().iter().enumerate() {
            let gx = Ray::from_components(map.apply_raw(input.representative()))?;
            let residual = 1.0 - transition_probability(output, &gx)?;
            executed += 1;
            record(
                format!("compatibility, tabulated pair {i}"),
                residual,
                &mut worst_residual,
                &mut witness,
            );
        }
    } else {
        let mut rng = seed.rng();
        for trial in 0..trials {
            let x = match field {
                FieldTag::Real => random_real_ray_with(n, &mut rng),
                FieldTag::Complex => random_ray_with(n, &mut rng),
            };
            let fx = f.apply(&x)?;
            let gx = Ray::from_components(map.apply_raw(x.representative()))?;
            let residual = 1.0 - transition_probability(&fx, &gx)?;
            executed += 1;
            record(
                format!("compatibility, trial {trial}"),
                residual,
                &mut worst_residual,
                &mut witness,
            );
        }
    }
    if worst_residual > tol {
        return Err(Error::NotACollineation { witness });
    }
    let verification = VerificationReport {
        pass: true,
        trials: executed,
        worst_residual,
        witness: None,
        seed: seed.0,
        tol,
    };

    Ok((
        map,
        LiftDiagnostics {
            rescale_factors,
            sigma_residual,
            verification,
        },
    ))
}

/// Least-squares scalar aligning `F ≈ λ·G` under the entrywise inner
/// product, with the resulting max-entry deviation.
pub fn scalar_align(f: &SemiLinearMap, g: &SemiLinearMap) -> Result<(C64, f64)> {
    if f.sigma != g.sigma {
        return Err(Error::SigmaMismatch);
    }
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let num: C64 = g
        .matrix
        .iter()
        .zip(f.matrix.iter())
        .map(|(gij, fij)| gij.conj() * fij)
        .sum();
    let den: f64 = g.matrix.iter().map(|gij| gij.norm_sqr()).sum();
    let lambda = num / Complex64::new(den, 0.0);
    let residual = f
        .matrix
        .iter()
        .zip(g.matrix.iter())
        .map(|(fij, gij)| (fij - lambda * gij).norm())
        .fold(0.0, f64::max);
    Ok((lambda, residual))
}
