//! Executable Wigner theorem: from a quasi-unitary ray map, construct the
//! compatible semi-unitary operator and classify it as unitary or
//! anti-unitary.
//!
//! Unlike the general collineation lift, the basis images here are known
//! to be orthonormal, so coefficient extraction is a set of inner products
//! rather than a linear solve. That is the concrete payoff of
//! quasi-unitarity, and it also makes the construction valid at n = 2
//! where the general lift has no footing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::artin::{classify_automorphism, Sigma};
use crate::error::{Error, Result, Witness};
use crate::maps::{check_quasi_unitary, probe_images, ProbeImages, RayMap, VerificationReport};
use crate::projective::{transition_probability, FieldTag, Ray, C64};
use crate::testkit::{random_ray_with, Seed};

/// Max allowed pairwise overlap amplitude among basis-probe images.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    Unitary,
    Antiunitary,
}

impl SymmetryKind {
    pub fn sigma(self) -> Sigma {
        match self {
            SymmetryKind::Unitary => Sigma::Identity,
            SymmetryKind::Antiunitary => Sigma::Conjugation,
        }
    }

    pub fn from_sigma(sigma: Sigma) -> Self {
        match sigma {
            Sigma::Identity => SymmetryKind::Unitary,
            Sigma::Conjugation => SymmetryKind::Antiunitary,
        }
    }
}

impl std::fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetryKind::Unitary => write!(f, "unitary"),
            SymmetryKind::Antiunitary => write!(f, "antiunitary"),
        }
    }
}

/// Unitary matrix plus linear/anti-linear tag, in the canonical phase
/// gauge: the largest-magnitude entry of column 1 is real and nonnegative.
#[derive(Debug, Clone)]
pub struct SemiUnitary {
    matrix: DMatrix<C64>,
    kind: SymmetryKind,
}

fn gauge_phase(matrix: &DMatrix<C64>) -> C64 {
    let mut best = 0;
    let mut best_mag = matrix[(0, 0)].norm();
    for i in 1..matrix.nrows() {
        if matrix[(i, 0)].norm() > best_mag {
            best = i;
            best_mag = matrix[(i, 0)].norm();
        }
    }
    let pivot = matrix[(best, 0)];
    if pivot.norm() > 0.0 {
        (pivot / Complex64::new(pivot.norm(), 0.0)).conj()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

impl SemiUnitary {
    /// Validates orthonormality of the columns and applies the phase gauge.
    pub fn new(matrix: DMatrix<C64>, kind: SymmetryKind) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.ncols(),
            });
        }
        let gram = matrix.adjoint() * &matrix;
        let residual = (gram - DMatrix::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if residual > ORTHONORMALITY_TOL {
            return Err(Error::ImageNotOrthonormal { residual });
        }
        let mut matrix = matrix;
        matrix *= gauge_phase(&matrix);
        Ok(Self { matrix, kind })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    /// `x ↦ U·σ(x)` with σ fixed by the kind tag.
    pub fn apply_raw(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * self.kind.sigma().apply_vector(v)
    }
}

/// Evidence that a lift succeeded: the two passing verification reports,
/// the classified kind, and the observed automorphism residual.
#[derive(Debug, Clone)]
pub struct SymmetryCertificate {
    pub quasi_unitarity: VerificationReport,
    pub compatibility: VerificationReport,
    pub kind: SymmetryKind,
    pub sigma_residual: f64,
}

fn inner(b: &DVector<C64>, c: &DVector<C64>) -> C64 {
    b.dotc(c)
}

/// Probe-level quasi-unitarity: every probe image must reproduce the
/// probe's transition probabilities against the basis rays.
fn check_probe_overlaps(images: &ProbeImages, tol: f64) -> Result<()> {
    let n = images.dim();
    for (probe, image) in images.pairs() {
        for j in 0..n {
            let before = transition_probability(probe, &Ray::basis(n, j))?;
            let after = transition_probability(image, images.basis_image(j))?;
            if (before - after).abs() > tol {
                return Err(Error::NotQuasiUnitary {
                    witness: Witness {
                        context: format!("probe overlap against e{}", j + 1),
                        expected: before,
                        observed: after,
                    },
                });
            }
        }
    }
    Ok(())
}

/// Constructs the compatible semi-unitary operator for a quasi-unitary
/// ray map, determined up to one global phase and fixed by the gauge.
pub fn lift_symmetry(
    map: &RayMap,
    field: FieldTag,
    tol: f64,
    trials: u64,
    seed: Seed,
) -> Result<(SemiUnitary, SymmetryCertificate)> {
    let n = map.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }

    // (a) hypothesis precheck, stochastic plus probe-level.
    let quasi_unitarity = check_quasi_unitary(map, trials, tol, seed)?;
    if !quasi_unitarity.pass {
        return Err(Error::NotQuasiUnitary {
            witness: quasi_unitarity
                .witness
                .expect("failed report carries a witness"),
        });
    }
    let images = probe_images(map, field)?;
    check_probe_overlaps(&images, tol)?;

    // (b) basis images form an orthonormal system.
    let mut columns: Vec<DVector<C64>> = (0..n)
        .map(|k| images.basis_image(k).representative().clone())
        .collect();
    let mut worst_overlap = 0.0_f64;
    for k in 0..n {
        for l in (k + 1)..n {
            worst_overlap = worst_overlap.max(inner(&columns[k], &columns[l]).norm());
        }
    }
    if worst_overlap > ORTHONORMALITY_TOL {
        return Err(Error::ImageNotOrthonormal {
            residual: worst_overlap,
        });
    }

    // (c) phase rescale from the sum probes; coefficients must obey the
    // magnitude law |γ'_1| = |γ'_k| = 1/√2.
    for k in 1..n {
        let c = images.sum_image(k).representative();
        let gamma = expand_and_check(&columns, c, &[0, k], tol, "sum probe")?;
        let ratio = gamma[1] / gamma[0];
        let phase = ratio / Complex64::new(ratio.norm(), 0.0);
        columns[k] *= phase;
    }

    // (d) automorphism detection from the twisted probes, cross-validated.
    let (sigma, sigma_residual) = if field == FieldTag::Real {
        (Sigma::Identity, 0.0)
    } else {
        let mut verdict: Option<Sigma> = None;
        let mut worst = 0.0_f64;
        for k in 1..n {
            let c = images.twisted_sum_image(k).representative();
            let gamma = expand_and_check(&columns, c, &[0, k], tol, "twisted probe")?;
            let mu = gamma[1] / gamma[0];
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
            verdict.expect("n >= 2 yields at least one twisted probe"),
            worst,
        )
    };
    let kind = SymmetryKind::from_sigma(sigma);

    // (e) assemble and gauge.
    let operator = SemiUnitary::new(DMatrix::from_columns(&columns), kind)?;

    // (f) compatibility certificate on fresh random rays.
    let verify_seed = Seed(seed.0.wrapping_add(0x9E37_79B9_7F4A_7C15));
    let compatibility = verify_compatibility(map, &operator, trials, tol, verify_seed)?;
    if !compatibility.pass {
        return Err(Error::CompatibilityFailure {
            witness: compatibility
                .witness
                .expect("failed report carries a witness"),
        });
    }

    let certificate = SymmetryCertificate {
        quasi_unitarity,
        compatibility,
        kind,
        sigma_residual,
    };
    Ok((operator, certificate))
}

/// Inner-product expansion of `c` over the orthonormal columns, checking
/// that exactly the `keep` coefficients carry magnitude 1/√2 and all
/// others vanish. Returns the kept coefficients in `keep` order.
fn expand_and_check(
    columns: &[DVector<C64>],
    c: &DVector<C64>,
    keep: &[usize; 2],
    tol: f64,
    context: &str,
) -> Result<[C64; 2]> {
    let mut kept = [Complex64::default(); 2];
    for (j, column) in columns.iter().enumerate() {
        let coeff = inner(column, c);
        if let Some(pos) = keep.iter().position(|&k| k == j) {
            if (coeff.norm() - FRAC_1_SQRT_2).abs() > tol {
                return Err(Error::CoefficientMagnitudeViolation {
                    witness: Witness {
                        context: format!("{context}, coefficient {}", j + 1),
                        expected: FRAC_1_SQRT_2,
                        observed: coeff.norm(),
                    },
                });
            }
            kept[pos] = coeff;
        } else if coeff.norm() > tol {
            return Err(Error::CoefficientMagnitudeViolation {
                witness: Witness {
                    context: format!("{context}, stray coefficient {}", j + 1),
                    expected: 0.0,
                    observed: coeff.norm(),
                },
            });
        }
    }
    Ok(kept)
}

/// σ verdict from the minimal probe set `[e_1], [e_2], [e_1+e_2],
/// [e_1+i·e_2]` alone. Agrees with `lift_symmetry`'s kind whenever both
/// succeed.
pub fn classify(map: &RayMap, field: FieldTag, tol: f64) -> Result<SymmetryKind> {
    let n = map.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    if field == FieldTag::Real {
        return Ok(SymmetryKind::Unitary);
    }

    let apply_probe = |v: DVector<C64>, label: &str| -> Result<Ray> {
        let probe = Ray::from_components(v).expect("probe vector is nonzero");
        map.apply(&probe).map_err(|e| match e {
            Error::ProbeNotTabulated { .. } => Error::ProbeNotTabulated {
                missing: vec![label.to_string()],
            },
            other => other,
        })
    };
    let mut e1 = DVector::zeros(n);
    e1[0] = Complex64::new(1.0, 0.0);
    let mut e2 = DVector::zeros(n);
    e2[1] = Complex64::new(1.0, 0.0);

    let b1 = apply_probe(e1.clone(), "e1")?;
    let b2 = apply_probe(e2.clone(), "e2")?;
    let overlap = transition_probability(&b1, &b2)?;
    if overlap > tol {
        return Err(Error::NotQuasiUnitary {
            witness: Witness {
                context: "images of orthogonal probes e1, e2".to_string(),
                expected: 0.0,
                observed: overlap,
            },
        });
    }

    let sum = apply_probe(&e1 + &e2, "e1+e2")?;
    let twisted = apply_probe(&e1 + &e2 * Complex64::i(), "e1+i*e2")?;

    let check_half = |label: &str, value: f64| -> Result<()> {
        if (value - 0.5).abs() > tol {
            return Err(Error::NotQuasiUnitary {
                witness: Witness {
                    context: format!("superposition probe {label}"),
                    expected: 0.5,
                    observed: value,
                },
            });
        }
        Ok(())
    };
    let g1 = inner(b1.representative(), sum.representative());
    let g2 = inner(b2.representative(), sum.representative());
    check_half("e1+e2 vs e1", g1.norm_sqr())?;
    check_half("e1+e2 vs e2", g2.norm_sqr())?;
    let rescaled_b2 = b2.representative() * (g2 / g1) / Complex64::new((g2 / g1).norm(), 0.0);

    let d1 = inner(b1.representative(), twisted.representative());
    let d2 = inner(&rescaled_b2, twisted.representative());
    check_half("e1+i*e2 vs e1", d1.norm_sqr())?;
    check_half("e1+i*e2 vs e2", d2.norm_sqr())?;
    let (sigma, _) = classify_automorphism(d2 / d1)?;
    Ok(SymmetryKind::from_sigma(sigma))
}

/// Phase aligning `U ≈ e^{iθ}V`, with the max-entry deviation. The
/// residual is invariant under global phase rotations of either operator.
pub fn phase_align(u: &SemiUnitary, v: &SemiUnitary) -> Result<(f64, f64)> {
    if u.kind != v.kind {
        return Err(Error::KindMismatch);
    }
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    let mut best = (0, 0);
    let mut best_mag = 0.0;
    for i in 0..v.dim() {
        for j in 0..v.dim() {
            if v.matrix[(i, j)].norm() > best_mag {
                best_mag = v.matrix[(i, j)].norm();
                best = (i, j);
            }
        }
    }
    let ratio = u.matrix[best] / v.matrix[best];
    let phase = if ratio.norm() > 0.0 {
        ratio / Complex64::new(ratio.norm(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let residual = u
        .matrix
        .iter()
        .zip(v.matrix.iter())
        .map(|(a, b)| (a - phase * b).norm())
        .fold(0.0, f64::max);
    Ok((phase.arg(), residual))
}

/// Checks `T[x] = [U·σ(x)]`; residual per trial is `1 − ⊙(T[x], [Uσ(x)])`.
/// Random rays for matrix and oracle maps; tabulated maps are checked over
/// every stored input, which is all they can answer.
pub fn verify_compatibility(
    map: &RayMap,
    operator: &SemiUnitary,
    trials: u64,
    tol: f64,
    seed: Seed,
) -> Result<VerificationReport> {
    if map.dim() != operator.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            got: operator.dim(),
        });
    }
    let n = map.dim();
    let mut worst = 0.0_f64;
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
    if let RayMap::Tabulated(t) = map {
        for (i, (input, output)) in t.pairs().iter().enumerate() {
            let ux = Ray::from_components(operator.apply_raw(input.representative()))?;
            let residual = 1.0 - transition_probability(output, &ux)?;
            executed += 1;
            record(
                format!("compatibility, tabulated pair {i}"),
                residual,
                &mut worst,
                &mut witness,
            );
        }
    } else {
        let mut rng = seed.rng();
        for trial in 0..trials {
            let x = random_ray_with(n, &mut rng);
            let tx = map.apply(&x)?;
            let ux = Ray::from_components(operator.apply_raw(x.representative()))?;
            let residual = 1.0 - transition_probability(&tx, &ux)?;
            executed += 1;
            record(
                format!("compatibility, trial {trial}"),
                residual,
                &mut worst,
                &mut witness,
            );
        }
    }
    let pass = worst <= tol;
    Ok(VerificationReport {
        pass,
        trials: executed,
        worst_residual: worst,
        witness: if pass { None } else { Some(witness) },
        seed: seed.0,
        tol,
    })
}
