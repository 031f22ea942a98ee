//! Seeded random instances: states, operators, isometries and Kraus maps.
//!
//! All generators draw from a caller-supplied RNG, so a fixed seed gives
//! bit-identical output on every platform.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hermitian::{DensityState, HermitianOperator, PureStateVector};
use crate::kraus::KrausMap;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};

pub type StdRng = ChaCha8Rng;

pub fn rng(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries, filled row by row.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    HermitianOperator::hermitian_part(&complex_gaussian(rng, n, n))
}

/// Uniformly distributed unit vector.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureStateVector {
    loop {
        let g = complex_gaussian(rng, n, 1);
        let v = ComplexVector::from_column_slice(g.as_slice());
        if v.norm() > 1e-12 {
            return PureStateVector::normalized(v).expect("nonzero vector");
        }
    }
}

/// N x r matrix with orthonormal columns, Haar distributed (requires N >= r).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if cols > rows {
        return Err(Error::InvalidArgument(format!(
            "isometry needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let g = complex_gaussian(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix the phases so the distribution is Haar
    for k in 0..cols {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, k)] *= phase;
            }
        }
    }
    Ok(q)
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(rng, n, n).expect("square isometry")
}

/// Invertible matrix with singular values bounded away from zero.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = complex_gaussian(rng, n, n);
        if crate::linalg::is_invertible(&g, 1e-3) {
            return g;
        }
    }
}

/// `G G† / Tr(G G†)` with `G` an n x rank complex Gaussian matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Result<DensityState> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!("rank {rank} not in 1..={n}")));
    }
    let g = complex_gaussian(rng, n, rank);
    let p = HermitianOperator::hermitian_part(&(&g * g.adjoint()));
    DensityState::normalize(&p)
}

/// Orthogonal projector onto a Haar-random k-dimensional subspace.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> HermitianOperator {
    let v = random_isometry(rng, n, k).expect("k <= n");
    HermitianOperator::hermitian_part(&(&v * v.adjoint()))
}

/// Hermitian operator with exactly `k_plus` positive and `k_minus` negative eigenvalues.
pub fn random_hermitian_signature<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k_plus: usize,
    k_minus: usize,
) -> Result<HermitianOperator> {
    if k_plus + k_minus > n {
        return Err(Error::InvalidSignature {
            k: k_plus + k_minus,
            n,
        });
    }
    let u = random_unitary(rng, n);
    let mut diag = vec![0.0; n];
    for (k, d) in diag.iter_mut().enumerate().take(k_plus + k_minus) {
        let mag = 0.5 + rng.random::<f64>();
        *d = if k < k_plus { mag } else { -mag };
    }
    let d = HermitianOperator::from_real_diagonal(&diag);
    d.congruence(&u)
}

/// Kraus map with `ops` complex Gaussian operators.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, n: usize, ops: usize) -> Result<KrausMap> {
    KrausMap::new((0..ops).map(|_| complex_gaussian(rng, n, n)).collect())
}

/// Random unit vector in C^m, used for z-sphere searches.
pub fn random_unit_complex<R: Rng + ?Sized>(rng: &mut R, m: usize) -> ComplexVector {
    random_vector(rng, m).amplitudes().clone()
}
