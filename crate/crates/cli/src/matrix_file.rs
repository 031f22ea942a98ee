//! On-disk JSON form of operators, states and Kraus lists.

use qstrata::composite::TensorFactorization;
use qstrata::linalg::{ComplexMatrix, ComplexVector, C64};
use qstrata::{DensityState, HermitianOperator, KrausMap, PureStateVector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hermitian,
    Density,
    Vector,
    Kraus,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Hermitian => "hermitian",
            Kind::Density => "density",
            Kind::Vector => "vector",
            Kind::Kraus => "kraus",
        }
    }
}

pub type Entry = [f64; 2];

/// Entry arrays of depth 1 (vector), 2 (matrix) or 3 (Kraus list).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Vector(Vec<Entry>),
    Matrix(Vec<Vec<Entry>>),
    Kraus(Vec<Vec<Vec<Entry>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub matrix: Entries,
}

/// A validated file payload.
#[derive(Debug, Clone)]
pub enum Loaded {
    Hermitian(HermitianOperator),
    Density(DensityState),
    Vector(PureStateVector),
    Kraus(KrausMap),
}

fn entry(z: C64) -> Entry {
    [z.re, z.im]
}

fn c(e: &Entry) -> C64 {
    C64::new(e[0], e[1])
}

pub fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<Entry>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| entry(m[(i, j)])).collect())
        .collect()
}

pub fn vector_entries(v: &ComplexVector) -> Vec<Entry> {
    v.iter().copied().map(entry).collect()
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn square(rows: &[Vec<Entry>]) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(parse_err("empty matrix"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(parse_err(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| c(&rows[i][j])))
}

impl MatrixFile {
    pub fn hermitian(op: &HermitianOperator, dims: Option<Vec<usize>>) -> Self {
        MatrixFile { kind: Kind::Hermitian, dims, matrix: Entries::Matrix(matrix_entries(op.matrix())) }
    }

    pub fn density(rho: &DensityState, dims: Option<Vec<usize>>) -> Self {
        MatrixFile { kind: Kind::Density, dims, matrix: Entries::Matrix(matrix_entries(rho.matrix())) }
    }

    pub fn vector(psi: &PureStateVector, dims: Option<Vec<usize>>) -> Self {
        MatrixFile { kind: Kind::Vector, dims, matrix: Entries::Vector(vector_entries(psi.amplitudes())) }
    }

    pub fn kraus(k: &KrausMap, dims: Option<Vec<usize>>) -> Self {
        MatrixFile {
            kind: Kind::Kraus,
            dims,
            matrix: Entries::Kraus(k.ops().iter().map(matrix_entries).collect()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid matrix file: {e}")))
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }

    /// Side length of the operator, or length of the vector.
    pub fn dimension(&self) -> Result<usize, CliError> {
        Ok(match (&self.kind, &self.matrix) {
            (Kind::Vector, Entries::Vector(v)) => v.len(),
            (Kind::Hermitian | Kind::Density, Entries::Matrix(m)) => m.len(),
            (Kind::Kraus, Entries::Kraus(ops)) => ops.first().map_or(0, |m| m.len()),
            (kind, _) => {
                return Err(parse_err(format!("entry nesting does not match kind '{}'", kind.as_str())))
            }
        })
    }

    /// The `dims` field as a factorization, checked against the dimension.
    pub fn factorization(&self) -> Result<Option<TensorFactorization>, CliError> {
        let Some(dims) = &self.dims else { return Ok(None) };
        let n = self.dimension()?;
        let product: usize = dims.iter().product();
        if product != n {
            return Err(parse_err(format!("dims {dims:?} multiply to {product}, dimension is {n}")));
        }
        if dims.len() < 2 {
            return Ok(None);
        }
        TensorFactorization::new(dims.clone())
            .map(Some)
            .map_err(|e| parse_err(format!("dims: {e}")))
    }

    /// Square matrix of a hermitian or density file, without validation.
    pub fn raw_matrix(&self) -> Result<ComplexMatrix, CliError> {
        match (&self.kind, &self.matrix) {
            (Kind::Hermitian | Kind::Density, Entries::Matrix(m)) => square(m),
            (kind, _) => Err(parse_err(format!("expected a hermitian or density matrix, got kind '{}'", kind.as_str()))),
        }
    }

    pub fn raw_vector(&self) -> Result<ComplexVector, CliError> {
        match (&self.kind, &self.matrix) {
            (Kind::Vector, Entries::Vector(v)) if !v.is_empty() => {
                Ok(ComplexVector::from_iterator(v.len(), v.iter().map(c)))
            }
            (Kind::Vector, _) => Err(parse_err("vector file needs a non-empty list of [re, im] entries")),
            (kind, _) => Err(parse_err(format!("expected a vector, got kind '{}'", kind.as_str()))),
        }
    }

    pub fn raw_kraus(&self) -> Result<Vec<ComplexMatrix>, CliError> {
        match (&self.kind, &self.matrix) {
            (Kind::Kraus, Entries::Kraus(ops)) if !ops.is_empty() => {
                let mats = ops.iter().map(|m| square(m)).collect::<Result<Vec<_>, _>>()?;
                let n = mats[0].nrows();
                if mats.iter().any(|m| m.nrows() != n) {
                    return Err(parse_err("Kraus operators have different sizes"));
                }
                Ok(mats)
            }
            (Kind::Kraus, _) => Err(parse_err("kraus file needs a non-empty list of square matrices")),
            (kind, _) => Err(parse_err(format!("expected a Kraus list, got kind '{}'", kind.as_str()))),
        }
    }

    /// Parses shapes (errors are [`CliError::Parse`]) and then validates the
    /// payload for its kind (errors are [`CliError::Domain`]).
    pub fn load(&self, tol_psd: f64) -> Result<Loaded, CliError> {
        self.factorization()?;
        match self.kind {
            Kind::Hermitian => Ok(Loaded::Hermitian(HermitianOperator::new(self.raw_matrix()?)?)),
            Kind::Density => {
                let op = HermitianOperator::new(self.raw_matrix()?)?;
                Ok(Loaded::Density(DensityState::with_tolerances(
                    op,
                    tol_psd,
                    qstrata::hermitian::TAU_TRACE,
                )?))
            }
            Kind::Vector => Ok(Loaded::Vector(PureStateVector::new(self.raw_vector()?)?)),
            Kind::Kraus => Ok(Loaded::Kraus(KrausMap::new(self.raw_kraus()?)?)),
        }
    }
}
