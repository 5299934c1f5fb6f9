//! Ray transformations and the verification predicates forming the
//! hypotheses of both lifting theorems: quasi-unitarity (`A⊙B = TA⊙TB`)
//! and the collineation property (`T(A∨B) = TA ∨ TB`).

use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result, Witness};
use crate::projective::{
    join, rays_equal, transition_probability, FieldTag, Ray, C64, SUBSPACE_TOL,
};
use crate::testkit::{random_ray_with, standard_complex, Seed};

/// Condition-number bound standing in for invertibility of matrix-induced maps.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Largest-over-smallest singular value.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.max();
    let smallest = sv.min();
    if smallest <= 0.0 {
        f64::INFINITY
    } else {
        largest / smallest
    }
}

/// Ray map induced by an invertible matrix: `[x] ↦ [Mx]`, or `[x] ↦ [Mx̄]`
/// when `conjugate_first` is set.
#[derive(Debug, Clone)]
pub struct MatrixMap {
    matrix: DMatrix<C64>,
    conjugate_first: bool,
}

impl MatrixMap {
    pub fn new(matrix: DMatrix<C64>, conjugate_first: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let cond = condition_number(&matrix);
        if !(cond <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned {
                cond,
                limit: CONDITION_LIMIT,
            });
        }
        Ok(Self {
            matrix,
            conjugate_first,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn conjugate_first(&self) -> bool {
        self.conjugate_first
    }
}

/// Ray map given by explicit input/output correspondences.
#[derive(Debug, Clone)]
pub struct TabulatedMap {
    dim: usize,
    pairs: Vec<(Ray, Ray)>,
}

impl TabulatedMap {
    pub fn new(dim: usize, pairs: Vec<(Ray, Ray)>) -> Result<Self> {
        for (input, output) in &pairs {
            if input.dim() != dim || output.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: input.dim().max(output.dim()),
                });
            }
        }
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                if rays_equal(&pairs[i].0, &pairs[j].0, SUBSPACE_TOL)? {
                    return Err(Error::DuplicateTabulatedInput {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Self { dim, pairs })
    }

    pub fn pairs(&self) -> &[(Ray, Ray)] {
        &self.pairs
    }
}

type OracleFn = dyn Fn(&Ray) -> Ray + Send + Sync;

/// Black-box ray map. Bijectivity cannot be checked and is an assumed
/// hypothesis. Calls are serialized through a mutex unless the oracle is
/// declared reentrant.
#[derive(Clone)]
pub struct OracleMap {
    dim: usize,
    apply: Arc<OracleFn>,
    declared_reentrant: bool,
    guard: Arc<Mutex<()>>,
}

impl OracleMap {
    pub fn new(dim: usize, apply: Arc<OracleFn>, declared_reentrant: bool) -> Self {
        Self {
            dim,
            apply,
            declared_reentrant,
            guard: Arc::new(Mutex::new(())),
        }
    }

    pub fn declared_reentrant(&self) -> bool {
        self.declared_reentrant
    }

    fn call(&self, ray: &Ray) -> Ray {
        if self.declared_reentrant {
            (self.apply)(ray)
        } else {
            let _lock = self.guard.lock().unwrap();
            (self.apply)(ray)
        }
    }
}

impl fmt::Debug for OracleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleMap")
            .field("dim", &self.dim)
            .field("declared_reentrant", &self.declared_reentrant)
            .finish()
    }
}

/// A transformation of rays in one of three representations.
#[derive(Debug, Clone)]
pub enum RayMap {
    MatrixInduced(MatrixMap),
    Tabulated(TabulatedMap),
    Oracle(OracleMap),
}

impl RayMap {
    pub fn dim(&self) -> usize {
        match self {
            RayMap::MatrixInduced(m) => m.dim(),
            RayMap::Tabulated(t) => t.dim,
            RayMap::Oracle(o) => o.dim,
        }
    }

    /// Applies the map to a ray, producing a gauged output ray.
    pub fn apply(&self, ray: &Ray) -> Result<Ray> {
        if ray.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: ray.dim(),
            });
        }
        match self {
            RayMap::MatrixInduced(m) => {
                let x = if m.conjugate_first {
                    ray.representative().map(|c| c.conj())
                } else {
                    ray.representative().clone()
                };
                Ray::from_components(&m.matrix * x)
            }
            RayMap::Tabulated(t) => {
                for (input, output) in &t.pairs {
                    if rays_equal(input, ray, SUBSPACE_TOL)? {
                        return Ok(output.clone());
                    }
                }
                Err(Error::ProbeNotTabulated {
                    missing: vec!["input ray not among tabulated pairs".to_string()],
                })
            }
            RayMap::Oracle(o) => Ok(o.call(ray)),
        }
    }
}

/// Probe rays driving the constructive lifts: the basis rays `[e_k]`, the
/// sums `[e_1 + e_k]`, and for complex data the twisted sums `[e_1 + i·e_k]`.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    dim: usize,
    field: FieldTag,
    probes: Vec<(String, Ray)>,
}

impl ProbeSet {
    pub fn new(dim: usize, field: FieldTag) -> Self {
        let mut probes = Vec::new();
        for k in 0..dim {
            probes.push((format!("e{}", k + 1), Ray::basis(dim, k)));
        }
        for k in 1..dim {
            let mut v = DVector::zeros(dim);
            v[0] = Complex64::new(1.0, 0.0);
            v[k] = Complex64::new(1.0, 0.0);
            probes.push((
                format!("e1+e{}", k + 1),
                Ray::from_components(v).expect("probe vector is nonzero"),
            ));
        }
        if field == FieldTag::Complex {
            for k in 1..dim {
                let mut v = DVector::zeros(dim);
                v[0] = Complex64::new(1.0, 0.0);
                v[k] = Complex64::new(0.0, 1.0);
                probes.push((
                    format!("e1+i*e{}", k + 1),
                    Ray::from_components(v).expect("probe vector is nonzero"),
                ));
            }
        }
        Self { dim, field, probes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Ray)> {
        self.probes.iter().map(|(label, ray)| (label.as_str(), ray))
    }
}

/// Images of the full probe set under one map, indexed by probe role.
#[derive(Debug, Clone)]
pub struct ProbeImages {
    dim: usize,
    field: FieldTag,
    pairs: Vec<(Ray, Ray)>,
}

impl ProbeImages {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn pairs(&self) -> &[(Ray, Ray)] {
        &self.pairs
    }

    /// Image of `[e_k]`, zero-based.
    pub fn basis_image(&self, k: usize) -> &Ray {
        &self.pairs[k].1
    }

    /// Image of `[e_1 + e_k]` for zero-based `k ≥ 1`.
    pub fn sum_image(&self, k: usize) -> &Ray {
        &self.pairs[self.dim + (k - 1)].1
    }

    /// Image of `[e_1 + i·e_k]` for zero-based `k ≥ 1`; complex field only.
    pub fn twisted_sum_image(&self, k: usize) -> &Ray {
        debug_assert_eq!(self.field, FieldTag::Complex);
        &self.pairs[self.dim + (self.dim - 1) + (k - 1)].1
    }
}

/// Evaluates the map on every probe. For tabulated maps a missing probe is
/// reported by name rather than silently skipped.
pub fn probe_images(map: &RayMap, field: FieldTag) -> Result<ProbeImages> {
    let set = ProbeSet::new(map.dim(), field);
    let mut pairs = Vec::with_capacity(set.len());
    let mut missing = Vec::new();
    for (label, probe) in set.iter() {
        match map.apply(probe) {
            Ok(image) => pairs.push((probe.clone(), image)),
            Err(Error::ProbeNotTabulated { .. }) => missing.push(label.to_string()),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(Error::ProbeNotTabulated { missing });
    }
    Ok(ProbeImages {
        dim: map.dim(),
        field,
        pairs,
    })
}

/// Outcome of a stochastic verification: verdict, worst residual over all
/// trials, and a witness for the worst violation when the check fails.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pass: bool,
    pub trials: u64,
    pub worst_residual: f64,
    pub witness: Option<Witness>,
    pub seed: u64,
    pub tol: f64,
}

impl VerificationReport {
    fn from_worst(
        trials: u64,
        worst_residual: f64,
        witness: Witness,
        seed: Seed,
        tol: f64,
    ) -> Self {
        let pass = worst_residual <= tol;
        Self {
            pass,
            trials,
            worst_residual,
            witness: if pass { None } else { Some(witness) },
            seed: seed.0,
            tol,
        }
    }
}

/// Checks `A⊙B = TA⊙TB` over sampled ray pairs (matrix/oracle maps) or
/// over all stored pairs pairwise (tabulated maps).
pub fn check_quasi_unitary(
    map: &RayMap,
    trials: u64,
    tol: f64,
    seed: Seed,
) -> Result<VerificationReport> {
    let mut worst = 0.0_f64;
    let mut witness = Witness {
        context: "no trials executed".to_string(),
        expected: 0.0,
        observed: 0.0,
    };
    let mut executed = 0_u64;
    if let RayMap::Tabulated(t) = map {
        for i in 0..t.pairs.len() {
            for j in (i + 1)..t.pairs.len() {
                let before = transition_probability(&t.pairs[i].0, &t.pairs[j].0)?;
                let after = transition_probability(&t.pairs[i].1, &t.pairs[j].1)?;
                executed += 1;
                let residual = (before - after).abs();
                if residual > worst {
                    worst = residual;
                    witness = Witness {
                        context: format!("tabulated pair ({i}, {j})"),
                        expected: before,
                        observed: after,
                    };
                }
            }
        }
    } else {
        let n = map.dim();
        let mut rng = seed.rng();
        for trial in 0..trials {
            let a = random_ray_with(n, &mut rng);
            let b = random_ray_with(n, &mut rng);
            let before = transition_probability(&a, &b)?;
            let after = transition_probability(&map.apply(&a)?, &map.apply(&b)?)?;
            executed += 1;
            let residual = (before - after).abs();
            if residual > worst {
                worst = residual;
                witness = Witness {
                    context: format!("random pair, trial {trial}"),
                    expected: before,
                    observed: after,
                };
            }
        }
    }
    Ok(VerificationReport::from_worst(
        executed, worst, witness, seed, tol,
    ))
}

/// Checks the inclusion `T(A∨B) ⊂ TA ∨ TB` on random lines: the image of a
/// random point of a random line must lie on the image line. Surjectivity
/// onto the image line is an assumed consequence of bijectivity.
pub fn check_collineation(
    map: &RayMap,
    trials: u64,
    tol: f64,
    seed: Seed,
) -> Result<VerificationReport> {
    let n = map.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, got: n });
    }
    let mut rng = seed.rng();
    let mut worst = 0.0_f64;
    let mut witness = Witness {
        context: "no trials executed".to_string(),
        expected: 0.0,
        observed: 0.0,
    };
    for trial in 0..trials {
        let (a, b) = sample_independent_pair(n, &mut rng)?;
        let alpha = standard_complex(&mut rng);
        let beta = standard_complex(&mut rng);
        let c = match Ray::from_components(a.representative() * alpha + b.representative() * beta) {
            Ok(ray) => ray,
            Err(_) => continue,
        };
        let ta = map.apply(&a)?;
        let tb = map.apply(&b)?;
        let tc = map.apply(&c)?;
        let residual = match join(&ta, &tb) {
            Ok(line) => line.residual(tc.representative()),
            // Image line collapsed; certainly not a collineation.
            Err(Error::DegenerateJoin) => 1.0,
            Err(e) => return Err(e),
        };
        if residual > worst {
            worst = residual;
            witness = Witness {
                context: format!("line image escaped its span, trial {trial}"),
                expected: 0.0,
                observed: residual,
            };
        }
    }
    Ok(VerificationReport::from_worst(
        trials, worst, witness, seed, tol,
    ))
}

fn sample_independent_pair<R: Rng>(n: usize, rng: &mut R) -> Result<(Ray, Ray)> {
    loop {
        let a = random_ray_with(n, rng);
        let b = random_ray_with(n, rng);
        if transition_probability(&a, &b)? < 0.99 {
            return Ok((a, b));
        }
    }
}
