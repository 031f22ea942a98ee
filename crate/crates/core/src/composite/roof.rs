use crate::error::{Error, Result};
use crate::hermitian::{DensityState, PureStateVector};
use crate::linalg::{ComplexMatrix, C64};
use crate::random::{random_isometry, rng};
use crate::strata::{image_basis, RANK_TOL};

/// How decompositions `ρ = Σ |ψ_i><ψ_i|`, `ψ = Φ Vᵀ`, are searched.
#[derive(Debug, Clone, PartialEq)]
pub enum RoofStrategy {
    /// The spectral decomposition alone.
    EigenOnly,
    /// The spectral decomposition and `count` Haar-random isometries.
    Random { count: usize, seed: u64 },
    /// Givens-rotation descent on the rows of V, started from the spectral
    /// decomposition and from `starts` random isometries.
    LocalRefine { iters: usize, starts: usize, seed: u64 },
    /// Evaluates the given N x r isometries only.
    Isometries(Vec<ComplexMatrix>),
}

/// Best decomposition found by [`convex_roof_estimate`].
#[derive(Debug, Clone)]
pub struct RoofEstimate {
    /// `Σ t_i f(Ψ_i)`, an upper bound on the convex roof.
    pub value: f64,
    pub weights: Vec<f64>,
    pub states: Vec<PureStateVector>,
    /// The N x r isometry producing the decomposition from the eigenvectors.
    pub isometry: ComplexMatrix,
    /// Number of decompositions evaluated.
    pub evaluations: usize,
}

/// Weights below this are dropped from a decomposition.
const WEIGHT_FLOOR: f64 = 1e-14;

struct Search<'a, F> {
    f: &'a F,
    /// Subnormalized eigenvectors as columns.
    phi: ComplexMatrix,
    evaluations: usize,
}

impl<F: Fn(&PureStateVector) -> f64> Search<'_, F> {
    fn value(&mut self, v: &ComplexMatrix) -> f64 {
        self.evaluations += 1;
        let psi = &self.phi * v.transpose();
        psi.column_iter()
            .map(|col| {
                let t = col.norm_squared();
                if t <= WEIGHT_FLOOR {
                    return 0.0;
                }
                let state = PureStateVector::normalized(col.into_owned()).expect("nonzero column");
                t * (self.f)(&state)
            })
            .sum()
    }

    fn refine(&mut self, v: &mut ComplexMatrix, value: &mut f64, iters: usize) {
        let n_rows = v.nrows();
        let mut step = std::f64::consts::FRAC_PI_4;
        for _ in 0..iters {
            let mut improved = false;
            for p in 0..n_rows {
                for q in (p + 1)..n_rows {
                    for (theta, phase) in [(step, 0.0), (-step, 0.0), (step, 0.5), (-step, 0.5)] {
                        let candidate = rotate_rows(v, p, q, theta, phase * std::f64::consts::PI);
                        let cv = self.value(&candidate);
                        if cv < *value {
                            *v = candidate;
                            *value = cv;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
}

/// Applies the unitary rotation mixing rows `p` and `q`.
fn rotate_rows(v: &ComplexMatrix, p: usize, q: usize, theta: f64, phase: f64) -> ComplexMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(s, phase);
    let mut out = v.clone();
    let (rp, rq) = (v.row(p).into_owned(), v.row(q).into_owned());
    out.set_row(p, &(&rp * C64::new(c, 0.0) + &rq * e));
    out.set_row(q, &(&rq * C64::new(c, 0.0) - &rp * e.conj()));
    out
}

fn padded_identity(n_rows: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n_rows, r)
}

pub(crate) fn check_isometry(v: &ComplexMatrix, r: usize) -> Result<()> {
    if v.ncols() != r || v.nrows() < r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: v.ncols(),
        });
    }
    let residual = (v.adjoint() * v - ComplexMatrix::identity(r, r)).norm();
    if residual > 1e-8 {
        return Err(Error::NotIsometry(residual));
    }
    Ok(())
}

/// Subnormalized eigenvectors `φ_i = sqrt(a_i) e_i` of the nonzero eigenvalues.
pub fn subnormalized_eigenvectors(rho: &DensityState, tol: f64) -> ComplexMatrix {
    let s = rho.op().spectrum();
    let basis = image_basis(rho.op(), tol);
    let mut phi = basis.clone();
    for k in 0..basis.ncols() {
        phi.column_mut(k).scale_mut(s.eigenvalues[k].max(0.0).sqrt());
    }
    phi
}

/// Upper estimate of the convex roof `inf Σ t_i f(Ψ_i)` over decompositions with at most
/// `max_terms` elements (default `r²`).
pub fn convex_roof_estimate<F>(
    f: &F,
    rho: &DensityState,
    strategy: &RoofStrategy,
    max_terms: Option<usize>,
) -> Result<RoofEstimate>
where
    F: Fn(&PureStateVector) -> f64,
{
    let phi = subnormalized_eigenvectors(rho, RANK_TOL);
    let r = phi.ncols();
    let n_rows = max_terms.unwrap_or(r * r);
    if n_rows < r {
        return Err(Error::InvalidArgument(format!("max_terms {n_rows} below rank {r}")));
    }
    let mut search = Search {
        f,
        phi,
        evaluations: 0,
    };
    let mut best_v = padded_identity(r, r);
    let mut best = match strategy {
        RoofStrategy::Isometries(vs) if vs.is_empty() => {
            return Err(Error::InvalidArgument("no isometries given".into()))
        }
        RoofStrategy::Isometries(_) => f64::INFINITY,
        _ => search.value(&best_v),
    };
    let consider = |search: &mut Search<'_, F>, v: ComplexMatrix, best: &mut f64, best_v: &mut ComplexMatrix| {
        let value = search.value(&v);
        if value < *best {
            *best = value;
            *best_v = v;
        }
    };
    match strategy {
        RoofStrategy::EigenOnly => {}
        RoofStrategy::Random { count, seed } => {
            let mut g = rng(*seed);
            for _ in 0..*count {
                let v = random_isometry(&mut g, n_rows, r)?;
                consider(&mut search, v, &mut best, &mut best_v);
            }
        }
        RoofStrategy::LocalRefine { iters, starts, seed } => {
            let mut g = rng(*seed);
            let mut starts_v = vec![padded_identity(n_rows, r)];
            for _ in 0..*starts {
                starts_v.push(random_isometry(&mut g, n_rows, r)?);
            }
            for mut v in starts_v {
                let mut value = search.value(&v);
                search.refine(&mut v, &mut value, *iters);
                if value < best {
                    best = value;
                    best_v = v;
                }
            }
        }
        RoofStrategy::Isometries(vs) => {
            for v in vs {
                check_isometry(v, r)?;
                consider(&mut search, v.clone(), &mut best, &mut best_v);
            }
        }
    }
    let psi = &search.phi * best_v.transpose();
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for col in psi.column_iter() {
        let t = col.norm_squared();
        if t > WEIGHT_FLOOR {
            weights.push(t);
            states.push(PureStateVector::normalized(col.into_owned())?);
        }
    }
    Ok(RoofEstimate {
        value: best,
        weights,
        states,
        isometry: best_v,
        evaluations: search.evaluations,
    })
}

/// The isometry V with `sqrt(t_j) Ψ_j = Σ_i V_ji φ_i` for a decomposition
/// `ρ = Σ t_j |Ψ_j><Ψ_j|` with normalized `Ψ_j`.
pub fn isometry_from_decomposition(
    rho: &DensityState,
    decomposition: &[(f64, PureStateVector)],
) -> Result<ComplexMatrix> {
    let phi = subnormalized_eigenvectors(rho, RANK_TOL);
    let r = phi.ncols();
    let mut v = ComplexMatrix::zeros(decomposition.len(), r);
    for (j, (t, psi)) in decomposition.iter().enumerate() {
        crate::hermitian::ensure_dim(rho.dim(), psi.dim())?;
        let sub = psi.amplitudes() * C64::new(t.max(0.0).sqrt(), 0.0);
        for i in 0..r {
            let a = phi.column(i).norm_squared();
            v[(j, i)] = phi.column(i).dotc(&sub) / C64::new(a, 0.0);
        }
    }
    check_isometry(&v, r)?;
    Ok(v)
}
