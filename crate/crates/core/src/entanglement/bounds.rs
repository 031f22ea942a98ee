use crate::composite::{check_isometry, subnormalized_eigenvectors};
use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, DensityState, TAU_NORM};
use crate::linalg::{singular_values, ComplexMatrix, ComplexVector, C64};
use crate::random::{random_unit_complex, rng};

use super::ConcurrenceForm;

/// A unit vector `z ∈ Cᵐ` weighting the tensors `T^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector(ComplexVector);

impl ZVector {
    pub fn new(z: ComplexVector) -> Result<Self> {
        let norm = z.norm();
        if (norm - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidZ(format!("norm {norm} != 1")));
        }
        Ok(ZVector(z))
    }

    pub fn normalized(z: ComplexVector) -> Result<Self> {
        let norm = z.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidZ(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(ZVector(z.unscale(norm)))
    }

    /// The unit vector `e_α`.
    pub fn basis(m: usize, alpha: usize) -> Self {
        let mut z = ComplexVector::zeros(m);
        z[alpha] = C64::new(1.0, 0.0);
        ZVector(z)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }
}

/// The r x r matrices `T^α_jk = <χ_α | φ_j ⊗ φ_k>` over the subnormalized eigenvectors of ρ.
#[derive(Debug, Clone)]
pub struct TTensorStack {
    pub tensors: Vec<ComplexMatrix>,
    /// Set when every `T^α` is symmetric; forms with an odd number of
    /// antisymmetric factors give antisymmetric tensors.
    pub symmetric: bool,
    pub degenerate: bool,
}

impl TTensorStack {
    pub fn rank(&self) -> usize {
        self.tensors.first().map_or(0, |t| t.nrows())
    }

    pub fn m(&self) -> usize {
        self.tensors.len()
    }

    /// `T = Σ_α z_α T^α`.
    pub fn combine(&self, z: &ZVector) -> Result<ComplexMatrix> {
        if z.len() != self.m() {
            return Err(Error::InvalidZ(format!("length {} != m = {}", z.len(), self.m())));
        }
        let r = self.rank();
        let mut t = ComplexMatrix::zeros(r, r);
        for (ta, &za) in self.tensors.iter().zip(z.as_vector().iter()) {
            t += ta * za;
        }
        Ok(t)
    }

    /// `max(λ₁ - Σ_{i>1} λ_i, 0)` over the singular values of `Σ z_α T^α`.
    pub fn lower_bound(&self, z: &ZVector) -> Result<f64> {
        let t = self.combine(z)?;
        if self.degenerate {
            return Ok(0.0);
        }
        let s = singular_values(&t);
        let rest: f64 = s.iter().skip(1).sum();
        Ok((s.first().copied().unwrap_or(0.0) - rest).max(0.0))
    }

    /// `Σ_i sqrt(Σ_α |(V T^α Vᵀ)_ii|²)` for an isometry V (N x r).
    pub fn upper_bound(&self, v: &ComplexMatrix) -> Result<f64> {
        check_isometry(v, self.rank())?;
        if self.degenerate {
            return Ok(0.0);
        }
        let mut diag2 = vec![0.0; v.nrows()];
        for ta in &self.tensors {
            let vt = v * ta;
            for (i, d) in diag2.iter_mut().enumerate() {
                let entry: C64 = vt.row(i).iter().zip(v.row(i).iter()).map(|(a, b)| a * b).sum();
                *d += entry.norm_sqr();
            }
        }
        Ok(diag2.iter().map(|d| d.sqrt()).sum())
    }
}

pub fn t_tensors(rho: &DensityState, form: &ConcurrenceForm, tol: f64) -> Result<TTensorStack> {
    ensure_dim(form.factorization().total(), rho.dim())?;
    let phi = subnormalized_eigenvectors(rho, tol);
    let r = phi.ncols();
    let cols: Vec<ComplexVector> = phi.column_iter().map(|c| c.into_owned()).collect();
    let tensors: Vec<ComplexMatrix> = (0..form.m())
        .map(|a| ComplexMatrix::from_fn(r, r, |j, k| form.pair_overlap(a, &cols[j], &cols[k])))
        .collect();
    let symmetric = tensors.iter().all(|t| (t - t.transpose()).norm() <= 1e-9 * (1.0 + t.norm()));
    Ok(TTensorStack {
        tensors,
        symmetric,
        degenerate: form.is_degenerate(),
    })
}

/// Lower bound on the convex-roof concurrence for one admissible `z`; zero for degenerate forms.
pub fn lower_bound(rho: &DensityState, form: &ConcurrenceForm, z: &ZVector) -> Result<f64> {
    t_tensors(rho, form, crate::strata::RANK_TOL)?.lower_bound(z)
}

/// Value of the decomposition `ψ = Φ Vᵀ`, an upper bound on the convex-roof concurrence.
pub fn upper_bound(rho: &DensityState, form: &ConcurrenceForm, v: &ComplexMatrix) -> Result<f64> {
    t_tensors(rho, form, crate::strata::RANK_TOL)?.upper_bound(v)
}

/// Search strategies over the unit sphere of `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundStrategy {
    /// `z = e_α`.
    Single(usize),
    /// Best of every `e_α` and `count` uniformly random unit vectors.
    Random { count: usize, seed: u64 },
    /// The `Random { count: starts, seed }` search followed by coordinate descent
    /// `z_α += step · {±1, ±i}` with renormalization, halving the step after a sweep
    /// without improvement.
    Refine { seed: u64, starts: usize, iters: usize },
}

#[derive(Debug, Clone)]
pub struct OptimizedBound {
    pub value: f64,
    pub z: ZVector,
    pub evaluations: usize,
}

fn random_search(stack: &TTensorStack, count: usize, seed: u64) -> Result<OptimizedBound> {
    let m = stack.m();
    let mut best = OptimizedBound {
        value: stack.lower_bound(&ZVector::basis(m, 0))?,
        z: ZVector::basis(m, 0),
        evaluations: 1,
    };
    let consider = |z: ZVector, best: &mut OptimizedBound| -> Result<()> {
        let v = stack.lower_bound(&z)?;
        best.evaluations += 1;
        if v > best.value {
            best.value = v;
            best.z = z;
        }
        Ok(())
    };
    for a in 1..m {
        consider(ZVector::basis(m, a), &mut best)?;
    }
    let mut g = rng(seed);
    for _ in 0..count {
        consider(ZVector(random_unit_complex(&mut g, m)), &mut best)?;
    }
    Ok(best)
}

pub fn optimize_lower_bound(
    rho: &DensityState,
    form: &ConcurrenceForm,
    strategy: &BoundStrategy,
) -> Result<OptimizedBound> {
    let stack = t_tensors(rho, form, crate::strata::RANK_TOL)?;
    let m = stack.m();
    if m == 0 {
        return Err(Error::InvalidZ("form has no χ vectors".into()));
    }
    match *strategy {
        BoundStrategy::Single(alpha) => {
            if alpha >= m {
                return Err(Error::InvalidZ(format!("α = {alpha} >= m = {m}")));
            }
            let z = ZVector::basis(m, alpha);
            Ok(OptimizedBound {
                value: stack.lower_bound(&z)?,
                z,
                evaluations: 1,
            })
        }
        BoundStrategy::Random { count, seed } => random_search(&stack, count, seed),
        BoundStrategy::Refine { seed, starts, iters } => {
            let mut best = random_search(&stack, starts, seed)?;
            let dirs = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
            let mut step = 0.5;
            for _ in 0..iters {
                let mut improved = false;
                for a in 0..m {
                    for d in dirs {
                        let mut z = best.z.as_vector().clone();
                        z[a] += d * step;
                        let Ok(z) = ZVector::normalized(z) else { continue };
                        let v = stack.lower_bound(&z)?;
                        best.evaluations += 1;
                        if v > best.value {
                            best.value = v;
                            best.z = z;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            Ok(best)
        }
    }
}
