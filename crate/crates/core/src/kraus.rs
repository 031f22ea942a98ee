//! Kraus operations `ρ -> Σ A_i ρ A_i†` as a semigroup acting on u*(H),
//! their Choi form, and the trace-renormalized action on density states.

use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, DensityState, HermitianOperator, TAU_PSD};
use crate::linalg::{
    fix_phase, is_invertible, unvec_col_major, vec_col_major, ComplexMatrix, ComplexVector,
    Spectrum,
};

/// Relative singular-value cutoff for invertibility of a single operator.
pub const INVERTIBILITY_CUTOFF: f64 = 1e-10;
/// Relative eigenvalue cutoff deciding the rank of a Choi operator.
pub const CHOI_RANK_CUTOFF: f64 = 1e-10;

/// A finite list of n x n operators `(A_i)`, with zero operators removed.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for op in &ops {
            if op.nrows() != op.ncols() {
                return Err(Error::NotSquare(op.nrows(), op.ncols()));
            }
            ensure_dim(dim, op.nrows())?;
            if !crate::linalg::all_finite(op) {
                return Err(Error::NonFinite);
            }
        }
        let ops: Vec<ComplexMatrix> = ops.into_iter().filter(|a| a.iter().any(|z| z.norm() > 0.0)).collect();
        if ops.is_empty() {
            return Err(Error::EmptyKraus);
        }
        Ok(KrausMap { dim, ops })
    }

    /// The single-operator map `ρ -> AρA†`.
    pub fn single(a: ComplexMatrix) -> Result<Self> {
        Self::new(vec![a])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `Σ A_i† A_i`.
    pub fn effect(&self) -> HermitianOperator {
        let mut t = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            t += a.adjoint() * a;
        }
        HermitianOperator::hermitian_part(&t)
    }
}

/// `K_A(ρ) = Σ A_i ρ A_i†`.
pub fn apply(k: &KrausMap, rho: &HermitianOperator) -> Result<HermitianOperator> {
    ensure_dim(k.dim, rho.dim())?;
    let mut out = ComplexMatrix::zeros(k.dim, k.dim);
    for a in &k.ops {
        out += a * rho.matrix() * a.adjoint();
    }
    Ok(HermitianOperator::hermitian_part(&out))
}

/// `K_A ∘ K_B = K_{A·B}` with operators `A_i B_j`, `i` outer.
pub fn compose(k: &KrausMap, k2: &KrausMap) -> Result<KrausMap> {
    ensure_dim(k.dim, k2.dim)?;
    let mut ops = Vec::with_capacity(k.len() * k2.len());
    for a in &k.ops {
        for b in &k2.ops {
            ops.push(a * b);
        }
    }
    // products of nonzero operators may vanish; a fully vanishing product is a zero map
    KrausMap::new(ops)
}

/// The Choi-Jamiołkowski operator `P_A = Σ |vec A_i><vec A_i|`, column-major vec.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    dim: usize,
    matrix: HermitianOperator,
}

impl ChoiOperator {
    pub fn of(k: &KrausMap) -> Self {
        let n2 = k.dim * k.dim;
        let mut p = ComplexMatrix::zeros(n2, n2);
        for a in &k.ops {
            let v = vec_col_major(a);
            p += &v * v.adjoint();
        }
        ChoiOperator {
            dim: k.dim,
            matrix: HermitianOperator::hermitian_part(&p),
        }
    }

    /// Wraps a matrix after checking that it is Hermitian and positive semidefinite.
    pub fn from_matrix(dim: usize, m: ComplexMatrix) -> Result<Self> {
        ensure_dim(dim * dim, m.nrows())?;
        let h = HermitianOperator::new(m)?;
        let scale = h.spectrum().max_abs_eigenvalue().max(1.0);
        let min = h.spectrum().min_eigenvalue();
        if min < -TAU_PSD * scale {
            return Err(Error::NotPositive(min));
        }
        Ok(ChoiOperator { dim, matrix: h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        let s = self.matrix.spectrum();
        let max = s.max_abs_eigenvalue();
        s.eigenvalues
            .iter()
            .filter(|&&l| l > CHOI_RANK_CUTOFF * max)
            .count()
    }
}

/// Rewrites `K` with pairwise orthogonal operators `C_k = sqrt(p_k) · unvec(u_k)`
/// from the spectral decomposition of its Choi operator.
///
/// Eigenvector phases are fixed so the largest entry of each `vec C_k` is real positive.
pub fn canonical_form(k: &KrausMap) -> KrausMap {
    let choi = ChoiOperator::of(k);
    let s: Spectrum = choi.matrix.spectrum();
    let max = s.max_abs_eigenvalue();
    let mut ops = Vec::new();
    for (idx, &p) in s.eigenvalues.iter().enumerate() {
        if p <= CHOI_RANK_CUTOFF * max {
            continue;
        }
        let mut u: ComplexVector = s.eigenvectors.column(idx).into_owned();
        fix_phase(&mut u);
        ops.push(unvec_col_major(&(u * num_complex::Complex64::new(p.sqrt(), 0.0)), k.dim, k.dim));
    }
    KrausMap { dim: k.dim, ops }
}

/// `<A,B>_gl = Tr(A†B)/2`.
pub fn gl_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> num_complex::Complex64 {
    (a.adjoint() * b).trace() * 0.5
}

/// Returns `A` when `K(ρ) = AρA†` with `A` invertible, i.e. when `K` lies in the
/// group part of the Kraus semigroup.
pub fn try_as_group_element(k: &KrausMap) -> Option<ComplexMatrix> {
    let c = canonical_form(k);
    match c.ops.as_slice() {
        [a] if is_invertible(a, INVERTIBILITY_CUTOFF) => Some(a.clone()),
        _ => None,
    }
}

/// True iff `Σ A_i† A_i` has smallest eigenvalue above `n · TAU_PSD`.
pub fn is_nondegenerate(k: &KrausMap) -> bool {
    k.effect().spectrum().min_eigenvalue() > k.dim as f64 * TAU_PSD
}

/// `K̃_A(ρ) = K_A(ρ) / Tr K_A(ρ)`.
pub fn normalized_apply(k: &KrausMap, rho: &DensityState) -> Result<DensityState> {
    if !is_nondegenerate(k) {
        return Err(Error::DegenerateMap);
    }
    let image = apply(k, rho.op())?;
    let tr = image.trace();
    if !(tr > 0.0) {
        return Err(Error::NonPositiveTrace(tr));
    }
    DensityState::new(image.scale(1.0 / tr))
}

/// `ρ -> AρA† / Tr(AρA†)` for invertible `A`; preserves rank.
pub fn gl_apply(a: &ComplexMatrix, rho: &DensityState) -> Result<DensityState> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    ensure_dim(rho.dim(), a.nrows())?;
    if !is_invertible(a, INVERTIBILITY_CUTOFF) {
        return Err(Error::Singular("group element"));
    }
    let image = rho.op().congruence(a)?;
    DensityState::normalize(&image)
}

/// The weight `λ̃` with `K̃(λρ + (1-λ)ρ') = λ̃ K̃(ρ) + (1-λ̃) K̃(ρ')`.
///
/// `λ̃ = λ t / (λ t + (1-λ) t')` where `t`, `t'` are the traces of the
/// unnormalized images `K(ρ)`, `K(ρ')`.
pub fn convex_image_weight(
    k: &KrausMap,
    rho: &DensityState,
    rho2: &DensityState,
    lambda: f64,
) -> Result<f64> {
    if !is_nondegenerate(k) {
        return Err(Error::DegenerateMap);
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} outside [0,1]")));
    }
    let t1 = apply(k, rho.op())?.trace();
    let t2 = apply(k, rho2.op())?.trace();
    Ok(lambda * t1 / (lambda * t1 + (1.0 - lambda) * t2))
}
