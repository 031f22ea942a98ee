use nalgebra::{DMatrix, DVector};

use super::{ensure_dim, HermitianOperator};
use crate::error::Result;
use crate::linalg::{trace_product, ComplexMatrix, C64, I, ONE};

/// Orthonormal basis of u*(H) for `<A,B> = Tr(AB)/2`: the generalized
/// Gell-Mann matrices followed by `sqrt(2/n) I`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

impl HermitianBasis {
    pub fn new(n: usize) -> Self {
        let mut elements = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in (j + 1)..n {
                let mut sym = ComplexMatrix::zeros(n, n);
                sym[(j, k)] = ONE;
                sym[(k, j)] = ONE;
                elements.push(sym);
                let mut anti = ComplexMatrix::zeros(n, n);
                anti[(j, k)] = -I;
                anti[(k, j)] = I;
                elements.push(anti);
            }
        }
        for l in 1..n {
            let c = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut d = ComplexMatrix::zeros(n, n);
            for j in 0..l {
                d[(j, j)] = C64::new(c, 0.0);
            }
            d[(l, l)] = C64::new(-c * l as f64, 0.0);
            elements.push(d);
        }
        elements.push(ComplexMatrix::identity(n, n).scale((2.0 / n as f64).sqrt()));
        HermitianBasis { n, elements }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, k: usize) -> HermitianOperator {
        HermitianOperator::hermitian_part(&self.elements[k])
    }

    /// Real coordinates `<E_k, A>`.
    pub fn coordinates(&self, a: &HermitianOperator) -> Result<DVector<f64>> {
        ensure_dim(self.n, a.dim())?;
        Ok(DVector::from_iterator(
            self.len(),
            self.elements
                .iter()
                .map(|e| 0.5 * trace_product(e, a.matrix()).re),
        ))
    }

    pub fn operator(&self, coords: &DVector<f64>) -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (e, &c) in self.elements.iter().zip(coords.iter()) {
            m += e.scale(c);
        }
        HermitianOperator::hermitian_part(&m)
    }
}

/// A real-linear map on u*(H), stored as its n² x n² matrix in a [`HermitianBasis`].
#[derive(Debug, Clone)]
pub struct Superoperator {
    basis: HermitianBasis,
    matrix: DMatrix<f64>,
}

impl Superoperator {
    /// Materializes `f`, which must be real-linear on Hermitian operators.
    pub fn from_map<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(&HermitianOperator) -> Result<HermitianOperator>,
    {
        let basis = HermitianBasis::new(n);
        let d = basis.len();
        let mut matrix = DMatrix::zeros(d, d);
        for j in 0..d {
            let image = f(&basis.element(j))?;
            matrix.set_column(j, &basis.coordinates(&image)?);
        }
        Ok(Superoperator { basis, matrix })
    }

    pub(crate) fn from_parts(basis: HermitianBasis, matrix: DMatrix<f64>) -> Self {
        Superoperator { basis, matrix }
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        let c = self.basis.coordinates(a)?;
        Ok(self.basis.operator(&(&self.matrix * c)))
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Largest entry of `M - Mᵀ`; zero for maps self-adjoint under `<·,·>`.
    pub fn self_adjoint_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Numerical rank with singular values above `rel_cutoff` times the largest.
    pub fn rank(&self, rel_cutoff: f64) -> usize {
        real_rank(&self.matrix, rel_cutoff)
    }
}

pub(crate) fn real_rank(m: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    let s = m.singular_values();
    let max = s.max();
    if max <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_cutoff * max).count()
}

/// Real SVD pieces `(U_r, σ_r, V_r)` restricted to singular values above the cutoff.
pub(crate) fn truncated_svd(
    m: &DMatrix<f64>,
    rel_cutoff: f64,
) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (u, sv, v_t) = crate::linalg::checked_svd(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| max > 0.0 && sv[k] > rel_cutoff * max).collect();
    let d = m.nrows();
    let mut ur = DMatrix::zeros(d, keep.len());
    let mut vr = DMatrix::zeros(m.ncols(), keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        ur.set_column(dst, &u.column(k));
        vr.set_column(dst, &v_t.row(k).transpose());
    }
    let s = keep.iter().map(|&k| sv[k]).collect();
    (ur, s, vr)
}
