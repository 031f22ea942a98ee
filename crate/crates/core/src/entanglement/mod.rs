//! Concurrences built from products of symmetric and antisymmetric projectors
//! on `H ⊗ H`, their pure-state values, the `T^α` tensors of a mixed state, and
//! lower and upper bounds on the convex-roof concurrence.

mod bounds;

pub use bounds::{
    lower_bound, optimize_lower_bound, t_tensors, upper_bound, BoundStrategy, OptimizedBound,
    TTensorStack, ZVector,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::composite::{partial_trace, TensorFactorization};
use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, DensityState, PureStateVector};
use crate::linalg::{trace_product, ComplexMatrix, ComplexVector, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One sign per factor: `+` selects the symmetric and `-` the antisymmetric
/// subspace of `Hʲ ⊗ Hʲ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignPattern(pub Vec<Sign>);

impl SignPattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn minus_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Sign::Minus).count()
    }

    /// An odd number of antisymmetric factors makes the concurrence vanish identically.
    pub fn is_degenerate(&self) -> bool {
        self.minus_count() % 2 == 1
    }

    /// Admissible in a projector mixture: an even, nonzero number of `-`.
    pub fn is_admissible(&self) -> bool {
        let m = self.minus_count();
        m > 0 && m % 2 == 0
    }

    /// `Π_{i∈S} s_i`.
    pub fn product_over(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&i| self.0[i].value()).product()
    }

    /// Every admissible pattern of length `k`, in lexicographic order.
    pub fn admissible(k: usize) -> Vec<SignPattern> {
        (0..1usize << k)
            .map(|bits| {
                SignPattern(
                    (0..k)
                        .map(|j| if bits >> (k - 1 - j) & 1 == 1 { Sign::Minus } else { Sign::Plus })
                        .collect(),
                )
            })
            .filter(|p| p.is_admissible())
            .collect()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::InvalidArgument(format!("bad sign {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if signs.is_empty() {
            return Err(Error::InvalidArgument("empty sign pattern".into()));
        }
        Ok(SignPattern(signs))
    }
}

/// Nonnegative weights `p_s` on admissible sign patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorMixture {
    weights: BTreeMap<SignPattern, f64>,
}

impl ProjectorMixture {
    pub fn new(weights: BTreeMap<SignPattern, f64>) -> Result<Self> {
        let k = weights.keys().next().map(SignPattern::len).ok_or_else(|| Error::InvalidMixture("no patterns".into()))?;
        for (p, &w) in &weights {
            if p.len() != k {
                return Err(Error::InvalidMixture(format!("pattern {p} has length {} != {k}", p.len())));
            }
            if !p.is_admissible() {
                return Err(Error::InvalidMixture(format!("pattern {p} needs an even, nonzero number of '-'")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidMixture(format!("weight {w} on {p}")));
            }
        }
        if weights.values().all(|&w| w == 0.0) {
            return Err(Error::InvalidMixture("all weights are zero".into()));
        }
        Ok(ProjectorMixture { weights })
    }

    pub fn single(pattern: SignPattern) -> Result<Self> {
        Self::new(BTreeMap::from([(pattern, 1.0)]))
    }

    /// Equal weights on every admissible pattern of length `k`.
    pub fn uniform(k: usize) -> Result<Self> {
        let pats = SignPattern::admissible(k);
        let w = 1.0 / pats.len().max(1) as f64;
        Self::new(pats.into_iter().map(|p| (p, w)).collect())
    }

    pub fn weights(&self) -> &BTreeMap<SignPattern, f64> {
        &self.weights
    }

    pub fn parties(&self) -> usize {
        self.weights.keys().next().map_or(0, SignPattern::len)
    }
}

/// A sparse real vector on `H ⊗ H`, stored as `(flat index, value)` pairs.
pub type SparseVector = Vec<(usize, f64)>;

/// `A = Σ_α |χ_α><χ_α|` on `H ⊗ H`, with the two copies of H ordered
/// `(H¹ ⊗ … ⊗ Hᴷ) ⊗ (H¹ ⊗ … ⊗ Hᴷ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceForm {
    fact: TensorFactorization,
    chi: Vec<SparseVector>,
    degenerate: bool,
}

impl ConcurrenceForm {
    pub fn factorization(&self) -> &TensorFactorization {
        &self.fact
    }

    pub fn m(&self) -> usize {
        self.chi.len()
    }

    /// True when the form contains an odd number of antisymmetric projectors, so
    /// every pure-state concurrence it defines vanishes.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn chi_sparse(&self, alpha: usize) -> &SparseVector {
        &self.chi[alpha]
    }

    pub fn chi(&self, alpha: usize) -> ComplexVector {
        let n = self.fact.total();
        let mut v = ComplexVector::zeros(n * n);
        for &(i, x) in &self.chi[alpha] {
            v[i] = C64::new(x, 0.0);
        }
        v
    }

    /// `<χ_α | u ⊗ w>`.
    pub fn pair_overlap(&self, alpha: usize, u: &ComplexVector, w: &ComplexVector) -> C64 {
        let n = self.fact.total();
        self.chi[alpha]
            .iter()
            .fold(ZERO, |acc, &(i, x)| acc + u[i / n] * w[i % n] * x)
    }

    /// Dense `N² x N²` matrix of A.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.fact.total();
        let mut a = ComplexMatrix::zeros(n * n, n * n);
        for chi in &self.chi {
            for &(i, x) in chi {
                for &(j, y) in chi {
                    a[(i, j)] += C64::new(x * y, 0.0);
                }
            }
        }
        a
    }
}

/// Orthonormal basis of the symmetric (`+`) or antisymmetric (`-`) subspace of
/// `C^d ⊗ C^d`, as sparse vectors over the index `a d + b`.
fn sector_basis(d: usize, sign: Sign) -> Vec<SparseVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for a in 0..d {
        if sign == Sign::Plus {
            out.push(vec![(a * d + a, 1.0)]);
        }
        for b in (a + 1)..d {
            let other = if sign == Sign::Plus { s } else { -s };
            out.push(vec![(a * d + b, s), (b * d + a, other)]);
        }
    }
    out
}

/// The vectors `scale · ⊗_j e^{(j)}` for every choice of sector basis vectors, with
/// the factor pairs `(Hʲ ⊗ Hʲ)` regrouped into two copies of `H¹ ⊗ … ⊗ Hᴷ`.
fn sector_products(fact: &TensorFactorization, pattern: &SignPattern, scale: f64) -> Vec<SparseVector> {
    let dims = fact.dims();
    let strides = fact.strides();
    let n = fact.total();
    // each partial entry is (index in first copy, index in second copy, value)
    let mut partial: Vec<Vec<(usize, usize, f64)>> = vec![vec![(0, 0, scale)]];
    for (j, &sign) in pattern.0.iter().enumerate() {
        let d = dims[j];
        let basis = sector_basis(d, sign);
        let mut next = Vec::with_capacity(partial.len() * basis.len());
        for p in &partial {
            for e in &basis {
                let mut v = Vec::with_capacity(p.len() * e.len());
                for &(i1, i2, x) in p {
                    for &(ab, y) in e {
                        let (a, b) = (ab / d, ab % d);
                        v.push((i1 + a * strides[j], i2 + b * strides[j], x * y));
                    }
                }
                next.push(v);
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|v| v.into_iter().map(|(i1, i2, x)| (i1 * n + i2, x)).collect())
        .collect()
}

fn check_pattern(fact: &TensorFactorization, pattern: &SignPattern) -> Result<()> {
    if pattern.len() != fact.parties() {
        return Err(Error::InvalidArgument(format!(
            "sign pattern {pattern} has length {} for {} factors",
            pattern.len(),
            fact.parties()
        )));
    }
    Ok(())
}

/// `A = 2ᴷ ⊗_j P_{s_j}`.
pub fn build_form_signs(fact: &TensorFactorization, pattern: &SignPattern) -> Result<ConcurrenceForm> {
    check_pattern(fact, pattern)?;
    let scale = 2f64.powi(fact.parties() as i32).sqrt();
    Ok(ConcurrenceForm {
        fact: fact.clone(),
        chi: sector_products(fact, pattern, scale),
        degenerate: pattern.is_degenerate(),
    })
}

/// `A = 4 P₋ ⊗ P₋` for two factors; `m = n₁(n₁-1)n₂(n₂-1)/4`.
pub fn build_form_bipartite(fact: &TensorFactorization) -> Result<ConcurrenceForm> {
    if fact.parties() != 2 {
        return Err(Error::InvalidFactorization(format!("need 2 factors, got {}", fact.parties())));
    }
    build_form_signs(fact, &SignPattern(vec![Sign::Minus, Sign::Minus]))
}

/// `A = 2ᴷ Σ_s p_s ⊗_j P_{s_j}`. Distinct patterns project onto orthogonal
/// subspaces, so the χ of each pattern are scaled by `sqrt(p_s)`.
pub fn build_form_mixture(fact: &TensorFactorization, mix: &ProjectorMixture) -> Result<ConcurrenceForm> {
    let base = 2f64.powi(fact.parties() as i32);
    let mut chi = Vec::new();
    for (pattern, &p) in mix.weights() {
        check_pattern(fact, pattern)?;
        if p > 0.0 {
            chi.extend(sector_products(fact, pattern, (base * p).sqrt()));
        }
    }
    Ok(ConcurrenceForm {
        fact: fact.clone(),
        chi,
        degenerate: false,
    })
}

/// `α_S = Σ_s p_s Π_{i∈S} s_i` for every subset S (sorted, zero-based), including the empty set.
pub fn alpha_coefficients(mix: &ProjectorMixture) -> BTreeMap<Vec<usize>, f64> {
    let k = mix.parties();
    (0..1usize << k)
        .map(|bits| {
            let subset: Vec<usize> = (0..k).filter(|i| bits >> i & 1 == 1).collect();
            let a = mix.weights().iter().map(|(s, &p)| p * s.product_over(&subset)).sum();
            (subset, a)
        })
        .collect()
}

/// `c(Ψ) = sqrt(<Ψ⊗Ψ| A |Ψ⊗Ψ>)` for a normalized Ψ.
pub fn pure_concurrence(psi: &PureStateVector, form: &ConcurrenceForm) -> Result<f64> {
    ensure_dim(form.fact.total(), psi.dim())?;
    psi.ensure_normalized()?;
    let x = psi.amplitudes();
    let value: f64 = (0..form.m()).map(|a| form.pair_overlap(a, x, x).norm_sqr()).sum();
    Ok(value.sqrt())
}

/// `c(Ψ) = sqrt(Σ_S α_S Tr((Tr_S |Ψ><Ψ|)²))`; negative round-off under the root is clamped.
pub fn pure_concurrence_trace_form(
    psi: &PureStateVector,
    fact: &TensorFactorization,
    alpha: &BTreeMap<Vec<usize>, f64>,
) -> Result<f64> {
    ensure_dim(fact.total(), psi.dim())?;
    psi.ensure_normalized()?;
    let rho = DensityState::pure(psi)?;
    let mut total = 0.0;
    for (subset, &a) in alpha {
        let sorted = fact.check_subset(subset)?;
        if &sorted != subset {
            return Err(Error::InvalidSubset(format!("{subset:?} is not sorted")));
        }
        if a == 0.0 {
            continue;
        }
        let red = partial_trace(rho.op(), fact, subset)?;
        total += a * trace_product(red.matrix(), red.matrix()).re;
    }
    Ok(total.max(0.0).sqrt())
}
