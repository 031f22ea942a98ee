//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
/// Dense complex matrix, an element of gl(H) or of a rectangular hom-space.
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Decomposes `m`, which is assumed Hermitian (only its Hermitian part is used).
    pub fn of(m: &ComplexMatrix) -> Self {
        let n = m.nrows();
        let h = (m + m.adjoint()).scale(0.5);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = ComplexMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Spectrum {
            eigenvalues,
            eigenvectors,
        }
    }

    /// U diag(λ) U†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        ));
        u * d * u.adjoint()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Thin SVD with singular values sorted in descending order.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_t: ComplexMatrix,
}

/// Thin factors `(U, σ, Vᵀ)`, unsorted.
pub(crate) type Factors<T> = (DMatrix<T>, Vec<f64>, DMatrix<T>);

fn nalgebra_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Factors<T> {
    let svd = m.clone().svd(true, true);
    let s = svd.singular_values.iter().copied().collect();
    (svd.u.expect("u requested"), s, svd.v_t.expect("v_t requested"))
}

fn adjoint_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Factors<T> {
    let (u, s, v_t) = nalgebra_svd(&m.adjoint());
    (v_t.adjoint(), s, u.adjoint())
}

/// `M = QR`, then the SVD of the square factor R.
fn qr_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Factors<T> {
    if m.nrows() < m.ncols() {
        let (u, s, v_t) = qr_svd(&m.adjoint());
        return (v_t.adjoint(), s, u.adjoint());
    }
    let qr = m.clone().qr();
    let (u, s, v_t) = nalgebra_svd(&qr.r());
    (qr.q() * u, s, v_t)
}

fn reconstruction_residual<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, f: &Factors<T>) -> f64 {
    let (u, s, v_t) = f;
    let mut us = u.clone();
    for (k, &sk) in s.iter().enumerate() {
        us.column_mut(k).scale_mut(sk);
    }
    (us * v_t - m).norm()
}

/// SVD whose factors are checked to reproduce `m`.
///
/// nalgebra's `svd(true, true)` can return factors that do not multiply back
/// to the input when a singular value is close to zero, while its
/// `singular_values()` is correct. The adjoint and a QR-preconditioned
/// factorization are tried in turn; the first that reconstructs `m` wins.
pub(crate) fn checked_svd<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Factors<T> {
    let tol = 64.0 * f64::EPSILON * (m.nrows() + m.ncols()) as f64 * m.norm().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, Factors<T>)> = None;
    for candidate in [nalgebra_svd::<T>, adjoint_svd::<T>, qr_svd::<T>] {
        let f = candidate(m);
        let res = reconstruction_residual(m, &f);
        if res <= tol {
            return f;
        }
        if best.as_ref().is_none_or(|(b, _)| res < *b) {
            best = Some((res, f));
        }
    }
    best.expect("at least one candidate").1
}

pub fn svd(m: &ComplexMatrix) -> SortedSvd {
    let (u, sv, v_t) = checked_svd(m);
    let k = sv.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let mut us = ComplexMatrix::zeros(u.nrows(), k);
    let mut vs = ComplexMatrix::zeros(k, v_t.ncols());
    for (dst, &src) in order.iter().enumerate() {
        us.set_column(dst, &u.column(src));
        vs.set_row(dst, &v_t.row(src));
    }
    SortedSvd {
        u: us,
        singular_values: order.iter().map(|&k| sv[k]).collect(),
        v_t: vs,
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Smallest singular value strictly above `rel_cutoff` times the largest one.
pub fn is_invertible(m: &ComplexMatrix, rel_cutoff: f64) -> bool {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return false;
    }
    let s = singular_values(m);
    let max = s[0];
    max > 0.0 && *s.last().unwrap() > rel_cutoff * max
}

/// Kronecker product with `a` on the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |m - m†|.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Multiplies `v` by a unit phase so that its largest-modulus entry is real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (k, z) in v.iter().enumerate() {
        // ties resolved to the first index so the choice is deterministic
        if z.norm() > best_norm + 1e-12 {
            best = k;
            best_norm = z.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Column-major vectorization of a matrix.
pub fn vec_col_major(m: &ComplexMatrix) -> ComplexVector {
    // nalgebra stores column-major, so the raw slice is already vec(m)
    ComplexVector::from_column_slice(m.as_slice())
}

pub fn unvec_col_major(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Tr(a b) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs(&(a - b))
}
