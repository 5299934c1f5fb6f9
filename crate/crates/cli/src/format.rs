//! File formats: ray-map input documents and report documents. Complex
//! numbers are `[re, im]` pairs, matrices row-major, serialized through
//! shortest-round-trip decimal so 64-bit floats survive losslessly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use raylift::{FieldTag, MatrixMap, Ray, RayMap, TabulatedMap, Witness};

pub type Pair = [f64; 2];

/// One-ray-map-per-file input document.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RayMapFile {
    Matrix {
        /// Row-major square matrix of [re, im] pairs.
        matrix: Vec<Pair>,
        #[serde(default)]
        conjugate: bool,
        #[serde(default)]
        field: Option<String>,
    },
    Tabulated {
        dim: usize,
        pairs: Vec<TabulatedPair>,
        #[serde(default)]
        field: Option<String>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TabulatedPair {
    #[serde(rename = "in")]
    pub input: Vec<Pair>,
    #[serde(rename = "out")]
    pub output: Vec<Pair>,
}

/// Input-level failure: names the offending field.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid input: {}", self.0)
    }
}

fn check_finite(pairs: &[Pair], field: &str) -> Result<(), InputError> {
    for p in pairs {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(InputError(format!(
                "field \"{field}\" contains a non-finite value"
            )));
        }
    }
    Ok(())
}

fn parse_vector(pairs: &[Pair], dim: usize, field: &str) -> Result<DVector<Complex64>, InputError> {
    if pairs.len() != dim {
        return Err(InputError(format!(
            "field \"{field}\" has length {}, expected {dim}",
            pairs.len()
        )));
    }
    check_finite(pairs, field)?;
    Ok(DVector::from_iterator(
        dim,
        pairs.iter().map(|p| Complex64::new(p[0], p[1])),
    ))
}

fn parse_field_tag(field: &Option<String>) -> Result<FieldTag, InputError> {
    match field.as_deref() {
        None | Some("complex") => Ok(FieldTag::Complex),
        Some("real") => Ok(FieldTag::Real),
        Some(other) => Err(InputError(format!(
            "field \"field\" must be \"real\" or \"complex\", got \"{other}\""
        ))),
    }
}

impl RayMapFile {
    pub fn field_tag(&self) -> Result<FieldTag, InputError> {
        match self {
            RayMapFile::Matrix { field, .. } | RayMapFile::Tabulated { field, .. } => {
                parse_field_tag(field)
            }
        }
    }

    pub fn to_ray_map(&self) -> Result<RayMap, InputError> {
        match self {
            RayMapFile::Matrix {
                matrix, conjugate, ..
            } => {
                let len = matrix.len();
                let n = (len as f64).sqrt().round() as usize;
                if n < 2 || n * n != len {
                    return Err(InputError(format!(
                        "field \"matrix\" has {len} entries, which is not a square of a \
                         dimension >= 2"
                    )));
                }
                check_finite(matrix, "matrix")?;
                let m = DMatrix::from_fn(n, n, |i, j| {
                    let p = matrix[i * n + j];
                    Complex64::new(p[0], p[1])
                });
                let map = MatrixMap::new(m, *conjugate)
                    .map_err(|e| InputError(format!("field \"matrix\": {e}")))?;
                Ok(RayMap::MatrixInduced(map))
            }
            RayMapFile::Tabulated { dim, pairs, .. } => {
                if *dim < 2 {
                    return Err(InputError(format!("field \"dim\" must be >= 2, got {dim}")));
                }
                let mut ray_pairs = Vec::with_capacity(pairs.len());
                for (i, pair) in pairs.iter().enumerate() {
                    let input = parse_vector(&pair.input, *dim, &format!("pairs[{i}].in"))?;
                    let output = parse_vector(&pair.output, *dim, &format!("pairs[{i}].out"))?;
                    let input = Ray::from_components(input)
                        .map_err(|e| InputError(format!("field \"pairs[{i}].in\": {e}")))?;
                    let output = Ray::from_components(output)
                        .map_err(|e| InputError(format!("field \"pairs[{i}].out\": {e}")))?;
                    ray_pairs.push((input, output));
                }
                let map = TabulatedMap::new(*dim, ray_pairs)
                    .map_err(|e| InputError(format!("field \"pairs\": {e}")))?;
                Ok(RayMap::Tabulated(map))
            }
        }
    }

    pub fn from_matrix(m: &DMatrix<Complex64>, conjugate: bool) -> Self {
        RayMapFile::Matrix {
            matrix: matrix_to_pairs(m),
            conjugate,
            field: None,
        }
    }
}

pub fn matrix_to_pairs(m: &DMatrix<Complex64>) -> Vec<Pair> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn pairs_to_matrix(pairs: &[Pair]) -> Result<DMatrix<Complex64>, InputError> {
    let len = pairs.len();
    let n = (len as f64).sqrt().round() as usize;
    if n < 2 || n * n != len {
        return Err(InputError(format!(
            "field \"matrix\" has {len} entries, which is not a square of a dimension >= 2"
        )));
    }
    check_finite(pairs, "matrix")?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let p = pairs[i * n + j];
        Complex64::new(p[0], p[1])
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub context: String,
    pub expected: f64,
    pub observed: f64,
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        Self {
            context: w.context.clone(),
            expected: w.expected,
            observed: w.observed,
        }
    }
}

/// Output document shared by every subcommand.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
    pub seed: u64,
    pub tol: f64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
}
