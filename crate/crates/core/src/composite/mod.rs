//! Composite systems `H = H¹ ⊗ … ⊗ Hᴷ`: the Segre map, partial traces, Schmidt
//! decomposition, product-group actions and convex-roof extensions.
//!
//! Subsystem 0 is the slowest-varying index of the flattened tensor.

mod roof;

pub(crate) use roof::check_isometry;

pub use roof::{
    convex_roof_estimate, isometry_from_decomposition, subnormalized_eigenvectors, RoofEstimate,
    RoofStrategy,
};

use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, DensityState, HermitianOperator, PureStateVector};
use crate::kraus::gl_apply;
use crate::linalg::{kron, svd, ComplexMatrix, ComplexVector, C64, ZERO};

/// Ordered local dimensions `(n_1, …, n_K)`, `K >= 2`, each `n_j >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorFactorization {
    dims: Vec<usize>,
}

impl TensorFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidFactorization(format!("need at least two factors, got {}", dims.len())));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFactorization(format!("factor dimension {d} < 2")));
        }
        Ok(TensorFactorization { dims })
    }

    pub fn bipartite(n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![n1, n2])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat-index stride of each subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len() - 1).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Sorted, duplicate-free copy of `subset`, checked against the number of parties.
    pub fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut s = subset.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset(format!("{subset:?} has repeated entries")));
        }
        if s.last().is_some_and(|&k| k >= self.parties()) {
            return Err(Error::InvalidSubset(format!("{subset:?} has an index >= {}", self.parties())));
        }
        Ok(s)
    }

    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.parties()).filter(|k| !subset.contains(k)).collect()
    }

    /// Flat offsets of every multi-index over `parties`, enumerated slowest first.
    fn offsets(&self, parties: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in parties {
            let (d, st) = (self.dims[p], strides[p]);
            out = out
                .iter()
                .flat_map(|&o| (0..d).map(move |i| o + i * st))
                .collect();
        }
        out
    }
}

/// `ξ1 ⊗ ξ2`, first factor on the slow index.
pub fn segre(xi1: &HermitianOperator, xi2: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::hermitian_part(&kron(xi1.matrix(), xi2.matrix()))
}

/// Tensor product of several operators, first factor slowest.
pub fn segre_all(factors: &[HermitianOperator]) -> Result<HermitianOperator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("no factors".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, x| segre(&acc, x)))
}

/// Traces out the subsystems in `traced`; the empty set is the identity and the full
/// set yields the 1 x 1 operator `(Tr ρ)`.
pub fn partial_trace(
    rho: &HermitianOperator,
    fact: &TensorFactorization,
    traced: &[usize],
) -> Result<HermitianOperator> {
    ensure_dim(fact.total(), rho.dim())?;
    let traced = fact.check_subset(traced)?;
    let kept = fact.complement(&traced);
    let keep_off = fact.offsets(&kept);
    let trace_off = fact.offsets(&traced);
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(keep_off.len(), keep_off.len(), |a, b| {
        trace_off
            .iter()
            .fold(ZERO, |acc, &t| acc + m[(keep_off[a] + t, keep_off[b] + t)])
    });
    Ok(HermitianOperator::hermitian_part(&out))
}

/// The reduced operator on the subsystems in `kept` (kept in increasing order).
pub fn reduced(rho: &HermitianOperator, fact: &TensorFactorization, kept: &[usize]) -> Result<HermitianOperator> {
    let kept = fact.check_subset(kept)?;
    partial_trace(rho, fact, &fact.complement(&kept))
}

/// `Ψ = Σ λ_k φ¹_k ⊗ φ²_k` with `λ_1 >= … >= λ_m > 0`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// `n_1 x m`, orthonormal columns.
    pub left_frame: ComplexMatrix,
    /// `n_2 x m`, orthonormal columns.
    pub right_frame: ComplexMatrix,
}

/// Singular values below this fraction of the largest are treated as exact zeros.
const SCHMIDT_FLOOR: f64 = 1e-14;

impl SchmidtDecomposition {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Number of coefficients above `tol · λ_1`.
    pub fn number(&self, tol: f64) -> usize {
        match self.coefficients.first() {
            Some(&l1) => self.coefficients.iter().filter(|&&l| l > tol * l1).count(),
            None => 0,
        }
    }

    pub fn reassemble(&self) -> ComplexVector {
        let (n1, n2) = (self.left_frame.nrows(), self.right_frame.nrows());
        let mut psi = ComplexVector::zeros(n1 * n2);
        for (k, &l) in self.coefficients.iter().enumerate() {
            let term = self.left_frame.column(k).kronecker(&self.right_frame.column(k));
            psi += term * C64::new(l, 0.0);
        }
        psi
    }
}

/// `n_1 x n_2` matrix `C_ij = Ψ_{i n_2 + j}`.
pub fn coefficient_matrix(psi: &PureStateVector, fact: &TensorFactorization) -> Result<ComplexMatrix> {
    if fact.parties() != 2 {
        return Err(Error::InvalidFactorization(format!("need 2 factors, got {}", fact.parties())));
    }
    ensure_dim(fact.total(), psi.dim())?;
    let (n1, n2) = (fact.dims()[0], fact.dims()[1]);
    Ok(ComplexMatrix::from_fn(n1, n2, |i, j| psi.amplitudes()[i * n2 + j]))
}

pub fn schmidt(psi: &PureStateVector, fact: &TensorFactorization) -> Result<SchmidtDecomposition> {
    let c = coefficient_matrix(psi, fact)?;
    let s = svd(&c);
    let l1 = s.singular_values.first().copied().unwrap_or(0.0);
    let m = s
        .singular_values
        .iter()
        .take_while(|&&l| l > 0.0 && l > SCHMIDT_FLOOR * l1)
        .count();
    Ok(SchmidtDecomposition {
        coefficients: s.singular_values[..m].to_vec(),
        left_frame: s.u.columns(0, m).into_owned(),
        right_frame: s.v_t.rows(0, m).transpose(),
    })
}

/// Count of Schmidt coefficients above `tol · λ_1`; constant on GL × GL orbits.
pub fn schmidt_number(psi: &PureStateVector, fact: &TensorFactorization, tol: f64) -> Result<usize> {
    Ok(schmidt(psi, fact)?.number(tol))
}

/// `ρ -> A ρ A† / Tr(A ρ A†)` with `A = A_1 ⊗ … ⊗ A_K`.
pub fn product_action(
    factors: &[ComplexMatrix],
    rho: &DensityState,
    fact: &TensorFactorization,
) -> Result<DensityState> {
    if factors.len() != fact.parties() {
        return Err(Error::InvalidFactorization(format!(
            "{} local operators for {} factors",
            factors.len(),
            fact.parties()
        )));
    }
    for (a, &d) in factors.iter().zip(fact.dims()) {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare(a.nrows(), a.ncols()));
        }
        ensure_dim(d, a.nrows())?;
        if !crate::linalg::is_invertible(a, crate::kraus::INVERTIBILITY_CUTOFF) {
            return Err(Error::Singular("local factor"));
        }
    }
    let a = factors[1..].iter().fold(factors[0].clone(), |acc, x| kron(&acc, x));
    gl_apply(&a, rho)
}
