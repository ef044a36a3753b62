//! Kernel functions, Gram matrices, and the one-hot label-kernel gap.

use crate::accum::ExactSum;
use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

/// Kernel family used for both the latent kernel k and the label kernel l.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    /// exp(-||z - z'||^2 / (2 sigma^2))
    Gaussian { sigma: f64 },
    /// c / sqrt(c^2 + ||z - z'||^2)
    Imq { c: f64 },
}

impl KernelSpec {
    pub const DEFAULT_IMQ_C: f64 = 1.0;

    pub fn validate(&self) -> Result<()> {
        let param = match self {
            KernelSpec::Linear => return Ok(()),
            KernelSpec::Gaussian { sigma } => *sigma,
            KernelSpec::Imq { c } => *c,
        };
        if !(param.is_finite() && param > 0.0) {
            return Err(Error::InvalidParam {
                name: "kernel param",
                reason: format!("must be positive and finite, got {param}"),
            });
        }
        Ok(())
    }

    /// True for kernels with k(z, z) = 1 for every z.
    pub fn unit_diagonal(&self) -> bool {
        !matches!(self, KernelSpec::Linear)
    }

    /// Kernel value as a function of the squared distance s = ||z - z'||^2.
    /// Only defined for the translation-invariant kinds.
    pub fn eval_sq_dist(&self, s: f64) -> f64 {
        match self {
            KernelSpec::Linear => panic!("linear kernel is not a function of distance"),
            KernelSpec::Gaussian { sigma } => (-s / (2.0 * sigma * sigma)).exp(),
            KernelSpec::Imq { c } => c / (c * c + s).sqrt(),
        }
    }

    /// d/ds of the kernel as a function of squared distance.
    pub fn deriv_sq_dist(&self, s: f64) -> f64 {
        match self {
            KernelSpec::Linear => panic!("linear kernel is not a function of distance"),
            KernelSpec::Gaussian { sigma } => {
                let two_sig2 = 2.0 * sigma * sigma;
                -(-s / two_sig2).exp() / two_sig2
            }
            KernelSpec::Imq { c } => -0.5 * c / (c * c + s).powf(1.5),
        }
    }

    /// Scalar parameter (sigma or c); 1.0 for linear.
    pub fn param(&self) -> f64 {
        match self {
            KernelSpec::Linear => 1.0,
            KernelSpec::Gaussian { sigma } => *sigma,
            KernelSpec::Imq { c } => *c,
        }
    }

    pub fn with_param(&self, p: f64) -> KernelSpec {
        match self {
            KernelSpec::Linear => KernelSpec::Linear,
            KernelSpec::Gaussian { .. } => KernelSpec::Gaussian { sigma: p },
            KernelSpec::Imq { .. } => KernelSpec::Imq { c: p },
        }
    }
}

/// Squared distance with round-off clamped at zero. Symmetric in its
/// arguments bit-for-bit: every sub-expression is evaluated the same way
/// when a and b are swapped.
#[inline]
pub fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let mut na = 0.0;
    let mut nb = 0.0;
    let mut dot = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        na += x * x;
        nb += y * y;
        dot += x * y;
    }
    (na + nb - 2.0 * dot).max(0.0)
}

/// Evaluates the kernel at a pair of points.
pub fn kernel_eval(spec: &KernelSpec, z1: ArrayView1<f64>, z2: ArrayView1<f64>) -> Result<f64> {
    spec.validate()?;
    if z1.len() != z2.len() {
        return Err(Error::DimensionMismatch {
            expected: z1.len(),
            got: z2.len(),
        });
    }
    if !z1.iter().chain(z2.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("kernel input"));
    }
    Ok(kernel_eval_unchecked(spec, z1, z2))
}

#[inline]
pub(crate) fn kernel_eval_unchecked(
    spec: &KernelSpec,
    z1: ArrayView1<f64>,
    z2: ArrayView1<f64>,
) -> f64 {
    match spec {
        KernelSpec::Linear => z1.iter().zip(z2.iter()).map(|(a, b)| a * b).sum(),
        _ => spec.eval_sq_dist(sq_dist(z1, z2)),
    }
}

/// A kernel Gram matrix together with the spec that produced it.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub entries: Array2<f64>,
    pub spec: KernelSpec,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }
}

/// Builds the Gram matrix K[i][j] = k(Z[i], Z[j]).
pub fn gram_matrix(spec: &KernelSpec, z: ArrayView2<f64>) -> Result<GramMatrix> {
    spec.validate()?;
    if z.nrows() == 0 {
        return Err(Error::Degenerate("empty point set".into()));
    }
    if !z.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("gram input rows"));
    }
    let n = z.nrows();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = kernel_eval_unchecked(spec, z.row(i), z.row(j));
            entries[[i, j]] = v;
            entries[[j, i]] = v;
        }
    }
    Ok(GramMatrix {
        entries,
        spec: *spec,
    })
}

/// Label-kernel gap Delta_l = l(e_i, e_i) - l(e_i, e_j), i != j, for one-hot
/// labels of any dimension >= 2. The squared distance between distinct
/// one-hot vectors is always 2, so the gap does not depend on the pair.
pub fn delta_l(spec: &KernelSpec) -> f64 {
    match spec {
        KernelSpec::Linear => 1.0,
        _ => 1.0 - spec.eval_sq_dist(2.0),
    }
}

/// Centers a Gram matrix: HKH with H = I - (1/n) 1 1^T, computed by
/// subtracting row/column means (H is never materialized). Means use the
/// exact accumulator so the result is permutation-stable.
pub fn center_gram(k: &Array2<f64>) -> Array2<f64> {
    let n = k.nrows();
    let inv = 1.0 / n as f64;
    let mut row_mean = vec![0.0; n];
    let mut col_mean = vec![0.0; n];
    let mut total = ExactSum::new();
    for i in 0..n {
        let mut r = ExactSum::new();
        for j in 0..n {
            r.add(k[[i, j]]);
        }
        row_mean[i] = r.value() * inv;
        total.merge(r);
    }
    for j in 0..n {
        let mut c = ExactSum::new();
        for i in 0..n {
            c.add(k[[i, j]]);
        }
        col_mean[j] = c.value() * inv;
    }
    let total = total.value() * inv * inv;
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = k[[i, j]] - row_mean[i] - col_mean[j] + total;
        }
    }
    out
}
