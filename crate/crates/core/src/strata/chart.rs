use crate::error::{Error, Result};
use crate::hermitian::{HermitianOperator, PINV_CUTOFF};
use crate::linalg::{is_invertible, ComplexMatrix, ComplexVector, C64, ZERO};

use super::{c, rank_of};

/// A chart label `J ⊂ {0..n}` of size k, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartIndex {
    n: usize,
    j: Vec<usize>,
}

impl ChartIndex {
    /// Zero-based, strictly increasing indices below `n`.
    pub fn new(n: usize, j: Vec<usize>) -> Result<Self> {
        if j.is_empty() || j.len() > n {
            return Err(Error::InvalidChart(format!("|J| = {} not in 1..={n}", j.len())));
        }
        if j.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidChart(format!("{j:?} is not strictly increasing")));
        }
        if j[j.len() - 1] >= n {
            return Err(Error::InvalidChart(format!("{j:?} has an index >= {n}")));
        }
        Ok(ChartIndex { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.j.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.j
    }

    pub fn contains(&self, i: usize) -> bool {
        self.j.binary_search(&i).is_ok()
    }

    /// Pairs `(r, s)`, `r < s`, with `r` or `s` in J, in row-major order.
    pub fn offdiag_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.n {
            for s in (r + 1)..self.n {
                if self.contains(r) || self.contains(s) {
                    out.push((r, s));
                }
            }
        }
        out
    }

    /// `(2nk - k² - k) / 2`.
    pub fn offdiag_len(&self) -> usize {
        let (n, k) = (self.n, self.k());
        (2 * n * k - k * k - k) / 2
    }

    /// `2nk - k²`, the dimension of the rank-k stratum.
    pub fn real_dimension(&self) -> usize {
        2 * self.n * self.k() - self.k() * self.k()
    }
}

/// Coordinates `((a_ii)_{i∈J}, (a_rs)_{pairs})` of a rank-k Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoordinates {
    pub diag: Vec<f64>,
    pub offdiag: Vec<C64>,
}

impl ChartCoordinates {
    pub fn new(chart: &ChartIndex, diag: Vec<f64>, offdiag: Vec<C64>) -> Result<Self> {
        if diag.len() != chart.k() || offdiag.len() != chart.offdiag_len() {
            return Err(Error::InvalidChart(format!(
                "expected {} diagonal and {} off-diagonal coordinates, got {} and {}",
                chart.k(),
                chart.offdiag_len(),
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(ChartCoordinates { diag, offdiag })
    }

    /// Flattened real vector: diagonal entries, then `Re`, `Im` of each off-diagonal entry.
    pub fn to_real(&self) -> Vec<f64> {
        let mut v = self.diag.clone();
        for z in &self.offdiag {
            v.push(z.re);
            v.push(z.im);
        }
        v
    }

    pub fn from_real(chart: &ChartIndex, v: &[f64]) -> Result<Self> {
        if v.len() != chart.real_dimension() {
            return Err(Error::InvalidChart(format!(
                "expected {} real coordinates, got {}",
                chart.real_dimension(),
                v.len()
            )));
        }
        let k = chart.k();
        let offdiag = v[k..].chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        Self::new(chart, v[..k].to_vec(), offdiag)
    }
}

fn j_block(a: &ComplexMatrix, chart: &ChartIndex) -> ComplexMatrix {
    let j = chart.indices();
    ComplexMatrix::from_fn(j.len(), j.len(), |r, s| a[(j[r], j[s])])
}

/// Reads off the chart coordinates of a rank-k operator whose J x J block is invertible.
pub fn chart_forward(xi: &HermitianOperator, chart: &ChartIndex, tol: f64) -> Result<ChartCoordinates> {
    crate::hermitian::ensure_dim(chart.n(), xi.dim())?;
    let rank = rank_of(xi, tol);
    if rank != chart.k() {
        return Err(Error::RankMismatch {
            expected: chart.k(),
            found: rank,
        });
    }
    let a = xi.matrix();
    if !is_invertible(&j_block(a, chart), tol) {
        return Err(Error::Singular("J x J block"));
    }
    let diag = chart.indices().iter().map(|&i| a[(i, i)].re).collect();
    let offdiag = chart.offdiag_pairs().iter().map(|&(r, s)| a[(r, s)]).collect();
    Ok(ChartCoordinates { diag, offdiag })
}

/// Rebuilds the rank-k operator from its J rows via `a_ij = Σ_{r,s∈J} a_ir a^{rs} conj(a_js)`.
///
/// Entries in the J rows and columns are copied from the coordinates, so
/// `chart_forward` recovers them exactly.
pub fn chart_reconstruct(coords: &ChartCoordinates, chart: &ChartIndex) -> Result<HermitianOperator> {
    let (n, k) = (chart.n(), chart.k());
    if coords.diag.len() != k || coords.offdiag.len() != chart.offdiag_len() {
        return Err(Error::InvalidChart("coordinate counts do not match the chart".into()));
    }
    if coords.diag.iter().any(|x| !x.is_finite()) || coords.offdiag.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite);
    }
    let j = chart.indices();
    // rows[(i, c)] = a_{i, j_c}
    let mut rows = ComplexMatrix::from_element(n, k, ZERO);
    for (col, &jc) in j.iter().enumerate() {
        rows[(jc, col)] = c(coords.diag[col]);
    }
    for (&(r, s), &z) in chart.offdiag_pairs().iter().zip(&coords.offdiag) {
        if let Ok(col) = j.binary_search(&s) {
            rows[(r, col)] = z;
        }
        if let Ok(col) = j.binary_search(&r) {
            rows[(s, col)] = z.conj();
        }
    }
    let block = ComplexMatrix::from_fn(k, k, |r, s| rows[(j[r], s)]);
    if !is_invertible(&block, PINV_CUTOFF) {
        return Err(Error::Singular("J x J block"));
    }
    let inv = block.try_inverse().ok_or(Error::Singular("J x J block"))?;
    let mut a = &rows * inv * rows.adjoint();
    for (col, &jc) in j.iter().enumerate() {
        for i in 0..n {
            a[(i, jc)] = rows[(i, col)];
            a[(jc, i)] = rows[(i, col)].conj();
        }
    }
    Ok(HermitianOperator::hermitian_part(&a))
}

/// Picks J by greedy column pivoting; a principal block of a rank-k Hermitian matrix is
/// invertible exactly when the corresponding columns are independent.
pub fn select_chart(xi: &HermitianOperator, tol: f64) -> Result<ChartIndex> {
    let n = xi.dim();
    let k = rank_of(xi, tol);
    if k == 0 {
        return Err(Error::RankMismatch { expected: 1, found: 0 });
    }
    let mut residual: Vec<ComplexVector> = (0..n).map(|i| xi.matrix().column(i).into_owned()).collect();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let (best, _) = (0..n)
            .filter(|i| !chosen.contains(i))
            .map(|i| (i, residual[i].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("k <= n");
        let q = residual[best].unscale(residual[best].norm());
        for v in residual.iter_mut() {
            let p = q.dotc(v);
            *v -= &q * p;
        }
        chosen.push(best);
    }
    chosen.sort_unstable();
    ChartIndex::new(n, chosen)
}
