//! JSON descriptions of bipartite states and observables.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested arrays
//! of them. Every state kind accepts an optional `noise` weight `p`, which
//! replaces the state by `(1 − p) ρ + p 1/(MN)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape, Error, Result};
use crate::fisher::Observable;
use crate::linalg::{self, CMatrix, CVector};
use crate::correlations::{lift_a, lift_b};
use crate::states::{self, BipartiteState, DensityMatrix, Example1Params};

pub type ComplexLiteral = [f64; 2];
pub type VectorLiteral = Vec<ComplexLiteral>;
pub type MatrixLiteral = Vec<Vec<ComplexLiteral>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    PureSchmidt(PureSchmidtSpec),
    Cq(CqSpec),
    Cc(CcSpec),
    MaxEntangled(MaxEntangledSpec),
    Werner(WernerSpec),
    Example1(Example1Spec),
    RawMatrix(RawMatrixSpec),
    Random(RandomSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureSchmidtSpec {
    pub coeffs: Vec<f64>,
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_basis: Option<Vec<VectorLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_basis: Option<Vec<VectorLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CqSpec {
    pub probs: Vec<f64>,
    pub sigmas: Vec<MatrixLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_basis: Option<Vec<VectorLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcSpec {
    pub probs: Vec<f64>,
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_basis: Option<Vec<VectorLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_basis: Option<Vec<VectorLiteral>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntangledSpec {
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WernerSpec {
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Spec {
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrixSpec {
    pub dims: [usize; 2],
    pub matrix: MatrixLiteral,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub dims: [usize; 2],
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Spec {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Parses and shape-checks a state description. Physical validity is
/// checked by [`StateSpec::resolve`].
pub fn parse_state_spec(text: &str) -> Result<StateSpec> {
    let spec_error = |path: &str, message: String| Error::Spec {
        path: path.to_string(),
        message,
    };
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| spec_error(".", e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| spec_error(".", "state spec must be a JSON object".into()))?;
    let kind = match object.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(spec_error("kind", "expected a string".into())),
        None => return Err(spec_error(".", "missing field `kind`".into())),
    };
    // serde cannot report paths inside an internally tagged enum, so the
    // payload is deserialized on its own
    fn payload<T: for<'de> Deserialize<'de>>(v: serde_json::Value) -> Result<T> {
        serde_path_to_error::deserialize(v).map_err(|e| Error::Spec {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }
    Ok(match kind.as_str() {
        "pure_schmidt" => StateSpec::PureSchmidt(payload(value)?),
        "cq" => StateSpec::Cq(payload(value)?),
        "cc" => StateSpec::Cc(payload(value)?),
        "max_entangled" => StateSpec::MaxEntangled(payload(value)?),
        "werner" => StateSpec::Werner(payload(value)?),
        "example1" => StateSpec::Example1(payload(value)?),
        "raw_matrix" => StateSpec::RawMatrix(payload(value)?),
        "random" => StateSpec::Random(payload(value)?),
        other => {
            return Err(spec_error(
                "kind",
                format!(
                    "unknown kind `{other}`, expected one of pure_schmidt, cq, cc, \
                     max_entangled, werner, example1, raw_matrix, random"
                ),
            ))
        }
    })
}

fn complex(c: &ComplexLiteral) -> Complex64 {
    Complex64::new(c[0], c[1])
}

fn vector(v: &VectorLiteral) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(complex))
}

fn vectors(vs: &[VectorLiteral]) -> Vec<CVector> {
    vs.iter().map(vector).collect()
}

pub fn matrix_from_literal(rows: &MatrixLiteral) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(shape("matrix literal must be a non-empty square array of rows"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex(&rows[i][j])))
}

pub fn matrix_to_literal(m: &CMatrix) -> MatrixLiteral {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn context(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Invalid(m) => Error::Invalid(format!("{what}: {m}")),
        Error::Shape(m) => Error::Shape(format!("{what}: {m}")),
        other => other,
    }
}

fn tuple(d: [usize; 2]) -> (usize, usize) {
    (d[0], d[1])
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::PureSchmidt(PureSchmidtSpec { .. }) => "pure_schmidt",
            Self::Cq(CqSpec { .. }) => "cq",
            Self::Cc(CcSpec { .. }) => "cc",
            Self::MaxEntangled(MaxEntangledSpec { .. }) => "max_entangled",
            Self::Werner(WernerSpec { .. }) => "werner",
            Self::Example1(Example1Spec { .. }) => "example1",
            Self::RawMatrix(RawMatrixSpec { .. }) => "raw_matrix",
            Self::Random(RandomSpec { .. }) => "random",
        }
    }

    pub fn noise(&self) -> Option<f64> {
        match self {
            Self::PureSchmidt(PureSchmidtSpec { noise, .. })
            | Self::Cq(CqSpec { noise, .. })
            | Self::Cc(CcSpec { noise, .. })
            | Self::MaxEntangled(MaxEntangledSpec { noise, .. })
            | Self::Werner(WernerSpec { noise, .. })
            | Self::Example1(Example1Spec { noise, .. })
            | Self::RawMatrix(RawMatrixSpec { noise, .. })
            | Self::Random(RandomSpec { noise, .. }) => *noise,
        }
    }

    fn noise_mut(&mut self) -> &mut Option<f64> {
        match self {
            Self::PureSchmidt(PureSchmidtSpec { noise, .. })
            | Self::Cq(CqSpec { noise, .. })
            | Self::Cc(CcSpec { noise, .. })
            | Self::MaxEntangled(MaxEntangledSpec { noise, .. })
            | Self::Werner(WernerSpec { noise, .. })
            | Self::Example1(Example1Spec { noise, .. })
            | Self::RawMatrix(RawMatrixSpec { noise, .. })
            | Self::Random(RandomSpec { noise, .. }) => noise,
        }
    }

    /// `(M, N)` as far as it can be read without building the state.
    pub fn dims(&self) -> Option<(usize, usize)> {
        match self {
            Self::PureSchmidt(PureSchmidtSpec { dims, .. })
            | Self::Cc(CcSpec { dims, .. })
            | Self::MaxEntangled(MaxEntangledSpec { dims, .. })
            | Self::Example1(Example1Spec { dims, .. })
            | Self::RawMatrix(RawMatrixSpec { dims, .. })
            | Self::Random(RandomSpec { dims, .. }) => Some(tuple(*dims)),
            Self::Werner(WernerSpec { .. }) => Some((2, 2)),
            Self::Cq(CqSpec { dims, probs, a_basis, sigmas, .. }) => dims.map(tuple).or_else(|| {
                let m = a_basis.as_ref().and_then(|a| a.first()).map_or(probs.len(), |v| v.len());
                sigmas.first().map(|s| (m, s.len()))
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state spec serializes")
    }

    pub fn resolve(&self) -> Result<BipartiteState> {
        let state = self.resolve_noiseless()?;
        match self.noise() {
            None => Ok(state),
            Some(p) => state.mix_white_noise(p).map_err(context("noise")),
        }
    }

    fn resolve_noiseless(&self) -> Result<BipartiteState> {
        match self {
            Self::PureSchmidt(PureSchmidtSpec { coeffs, dims, a_basis, b_basis, .. }) => {
                let a = a_basis.as_deref().map(vectors);
                let b = b_basis.as_deref().map(vectors);
                states::pure_from_schmidt(coeffs, tuple(*dims), a.as_deref(), b.as_deref())
                    .map_err(context("pure_schmidt"))
            }
            Self::Cq(CqSpec { probs, sigmas, dims, a_basis, .. }) => {
                let sigmas = sigmas
                    .iter()
                    .map(|s| DensityMatrix::new(matrix_from_literal(s)?))
                    .collect::<Result<Vec<_>>>()
                    .map_err(context("cq sigmas"))?;
                let m = match (dims, a_basis) {
                    (Some(d), _) => d[0],
                    (None, Some(a)) => a.first().map_or(0, |v| v.len()),
                    (None, None) => probs.len(),
                };
                let a = match a_basis {
                    Some(a) => vectors(a),
                    None => default_basis(m, probs.len(), "cq")?,
                };
                let rho = states::make_cq(probs, &a, &sigmas).map_err(context("cq"))?;
                check_dims(&rho, *dims)?;
                Ok(rho)
            }
            Self::Cc(CcSpec { probs, dims, a_basis, b_basis, .. }) => {
                let (m, n) = tuple(*dims);
                let a = match a_basis {
                    Some(a) => vectors(a),
                    None => default_basis(m, probs.len(), "cc")?,
                };
                let b = match b_basis {
                    Some(b) => vectors(b),
                    None => default_basis(n, probs.len(), "cc")?,
                };
                let rho = states::make_cc(probs, &a, &b).map_err(context("cc"))?;
                check_dims(&rho, Some(*dims))?;
                Ok(rho)
            }
            Self::MaxEntangled(MaxEntangledSpec { dims, .. }) => {
                if dims[0] != dims[1] {
                    return Err(invalid(format!(
                        "max_entangled needs equal dims, got [{}, {}]",
                        dims[0], dims[1]
                    )));
                }
                states::max_entangled(dims[0])
            }
            Self::Werner(WernerSpec { w, dims, .. }) => {
                if let Some(d) = dims {
                    if *d != [2, 2] {
                        return Err(invalid("werner states are defined on dims [2, 2]"));
                    }
                }
                states::werner(*w)
            }
            Self::Example1(Example1Spec { dims, a, b, probs, .. }) => {
                let mut params = Example1Params::default();
                if let Some(a) = a {
                    params.a = (a[0], a[1]);
                }
                if let Some(b) = b {
                    params.b = (b[0], b[1]);
                }
                if let Some(p) = probs {
                    params.probs = (p[0], p[1], p[2]);
                }
                states::make_example1(params, tuple(*dims)).map_err(context("example1"))
            }
            Self::RawMatrix(RawMatrixSpec { dims, matrix, .. }) => {
                let m = matrix_from_literal(matrix)?;
                BipartiteState::from_matrix(m, tuple(*dims))
            }
            Self::Random(RandomSpec { dims, seed, rank, pure, .. }) => {
                let d = tuple(*dims);
                if pure.unwrap_or(false) {
                    if rank.is_some_and(|r| r != 1) {
                        return Err(invalid("random: a pure state has rank 1"));
                    }
                    states::random_pure(d, *seed)
                } else {
                    states::random_bipartite(d, rank.unwrap_or(d.0 * d.1), *seed)
                }
            }
        }
    }

    /// Copy with one named parameter replaced: `s` sets two-term Schmidt
    /// coefficients `(s, 1 − s)`, `w` the Werner weight, `noise` the
    /// white-noise weight of any kind.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match (name, &mut out) {
            ("noise", spec) => *spec.noise_mut() = Some(value),
            ("s", Self::PureSchmidt(PureSchmidtSpec { coeffs, .. })) => *coeffs = vec![value, 1.0 - value],
            ("w", Self::Werner(WernerSpec { w, .. })) => *w = value,
            (name, spec) => {
                return Err(invalid(format!(
                    "parameter `{name}` does not apply to kind `{}`",
                    spec.kind()
                )))
            }
        }
        Ok(out)
    }
}

fn default_basis(dim: usize, count: usize, what: &str) -> Result<Vec<CVector>> {
    if count > dim {
        return Err(invalid(format!(
            "{what}: {count} terms do not fit a computational basis of dimension {dim}"
        )));
    }
    Ok((0..count).map(|k| linalg::basis_vector(dim, k)).collect())
}

fn check_dims(rho: &BipartiteState, dims: Option<[usize; 2]>) -> Result<()> {
    match dims {
        Some(d) if tuple(d) != rho.dims() => Err(shape(format!(
            "declared dims [{}, {}] but the state has dims {:?}",
            d[0],
            d[1],
            rho.dims()
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    A,
    B,
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// An observable on one party (lifted to the joint space) or on the whole
/// system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Pauli { axis: PauliAxis, party: Target },
    Diag { values: Vec<f64>, party: Target },
    Matrix { matrix: MatrixLiteral, party: Target },
}

pub fn parse_observable_spec(text: &str) -> Result<ObservableSpec> {
    from_json(text)
}

fn pauli(axis: PauliAxis) -> CMatrix {
    let c = |re, im| Complex64::new(re, im);
    let entries = match axis {
        PauliAxis::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        PauliAxis::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        PauliAxis::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

impl ObservableSpec {
    pub fn party(&self) -> Target {
        match self {
            Self::Pauli { party, .. } | Self::Diag { party, .. } | Self::Matrix { party, .. } => *party,
        }
    }

    /// The observable on the joint space of a state with the given dims.
    pub fn resolve(&self, dims: (usize, usize)) -> Result<Observable> {
        let local = match self {
            Self::Pauli { axis, .. } => pauli(*axis),
            Self::Diag { values, .. } => linalg::real_diag(values),
            Self::Matrix { matrix, .. } => matrix_from_literal(matrix)?,
        };
        let (m, n) = dims;
        let expected = match self.party() {
            Target::A => m,
            Target::B => n,
            Target::Joint => m * n,
        };
        if local.nrows() != expected {
            return Err(shape(format!(
                "observable has dimension {}, its target has dimension {expected}",
                local.nrows()
            )));
        }
        let h = Observable::new(local)?;
        Ok(match self.party() {
            Target::A => lift_a(&h, n),
            Target::B => lift_b(&h, m),
            Target::Joint => h,
        })
    }
}
