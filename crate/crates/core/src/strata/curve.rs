use crate::error::{Error, Result};
use crate::hermitian::{ensure_dim, HermitianOperator};

use super::{kernel_block_norm, rank_of, RANK_TOL};

/// Tangency data at one interior sample of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub rank: usize,
    /// Frobenius norm of the central-difference velocity.
    pub velocity_norm: f64,
    /// Norm of the velocity compressed to the kernel of the sample.
    pub kernel_block: f64,
    pub tangent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangencyReport {
    pub samples: Vec<CurveSample>,
}

impl TangencyReport {
    pub fn all_tangent(&self) -> bool {
        self.samples.iter().all(|s| s.tangent)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CurveSample> {
        self.samples.iter().filter(|s| !s.tangent)
    }
}

/// Checks that the central-difference velocity at every interior sample is tangent to
/// the rank stratum of that sample.
pub fn curve_stratum_tangency(samples: &[(f64, HermitianOperator)], tol: f64) -> Result<TangencyReport> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let n = samples[0].1.dim();
    for (_, x) in samples {
        ensure_dim(n, x.dim())?;
    }
    let h = samples[1].0 - samples[0].0;
    let scale = samples.iter().fold(0.0f64, |m, (t, _)| m.max(t.abs())).max(h.abs());
    if !(h > 0.0) || samples.windows(2).any(|w| ((w[1].0 - w[0].0) - h).abs() > 1e-9 * scale) {
        return Err(Error::NonUniformGrid);
    }
    let mut out = Vec::with_capacity(samples.len() - 2);
    for w in samples.windows(3) {
        let velocity = (&w[2].1 - &w[0].1).scale(1.0 / (w[2].0 - w[0].0));
        let point = &w[1].1;
        let kernel_block = kernel_block_norm(point, &velocity, RANK_TOL)?;
        out.push(CurveSample {
            t: w[1].0,
            rank: rank_of(point, RANK_TOL),
            velocity_norm: velocity.norm(),
            kernel_block,
            tangent: kernel_block <= tol,
        });
    }
    Ok(TangencyReport { samples: out })
}
