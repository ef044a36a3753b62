//! Random Fourier feature bases for the Gaussian and IMQ kernels.
//!
//! A basis realizes the feature map R(z)_d = sqrt(2/D) cos(w_d . z + b_d)
//! with E[R(z) . R(z')] = k(z, z'). Gaussian frequencies are i.i.d. normal
//! scaled by 1/sigma. IMQ frequencies are a uniform direction times an
//! amplitude drawn from the kernel's spectral density, which is tabulated on
//! a grid once per feature dimension (at c = 1) and rescaled by 1/c per
//! draw; the density needs the modified Bessel function in the log domain.

use crate::bessel::log_bessel_k;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use ndarray::{Array1, Array2, ArrayView2};
use once_cell::sync::Lazy;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

pub const GRID_POINTS: usize = 10_000;
pub const GRID_LOWER: f64 = 1e-12;

/// Grid upper limit grows with the feature dimension so the tabulated
/// density covers the distribution's support.
pub fn grid_upper(feature_dim: usize) -> f64 {
    if feature_dim >= 4096 {
        200.0
    } else if feature_dim >= 2048 {
        150.0
    } else if feature_dim >= 1024 {
        120.0
    } else {
        100.0
    }
}

/// Tabulated amplitude distribution of IMQ spectral frequencies at c = 1.
#[derive(Clone, Debug)]
pub struct AmplitudePmf {
    pub grid: Vec<f64>,
    pub probs: Vec<f64>,
    pub feature_dim: usize,
    cdf: Vec<f64>,
}

impl AmplitudePmf {
    /// Inverse-CDF draw (binary search over cumulative sums).
    pub fn sample(&self, u: f64) -> f64 {
        let idx = self.cdf.partition_point(|&c| c < u).min(self.grid.len() - 1);
        self.grid[idx]
    }

    pub fn mean(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.probs)
            .map(|(s, p)| s * p)
            .sum()
    }
}

/// Tabulates the IMQ amplitude density p(s) ~ K_{(Q-1)/2}(s) s^{(Q-1)/2}
/// on the dimension-dependent grid, normalized via log-sum-exp.
pub fn imq_amplitude_pmf(feature_dim: usize) -> Result<AmplitudePmf> {
    if feature_dim == 0 {
        return Err(Error::InvalidParam {
            name: "feature_dim",
            reason: "must be >= 1".into(),
        });
    }
    let upper = grid_upper(feature_dim);
    let order = (feature_dim as f64 - 1.0) / 2.0;
    let n = GRID_POINTS;
    let mut grid = Vec::with_capacity(n);
    let step = (upper - GRID_LOWER) / (n as f64 - 1.0);
    let mut log_density = Vec::with_capacity(n);
    let mut max_log = f64::NEG_INFINITY;
    for g in 0..n {
        let s = GRID_LOWER + step * g as f64;
        grid.push(s);
        let ld = log_bessel_k(order, s)? + order * s.ln();
        max_log = max_log.max(ld);
        log_density.push(ld);
    }
    if !max_log.is_finite() {
        return Err(Error::Degenerate(
            "amplitude density underflowed on the whole grid".into(),
        ));
    }
    let mut probs: Vec<f64> = log_density.iter().map(|ld| (ld - max_log).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    let mut cdf = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cdf.push(acc);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Ok(AmplitudePmf {
        grid,
        probs,
        feature_dim,
        cdf,
    })
}

static PMF_CACHE: Lazy<Mutex<HashMap<usize, std::sync::Arc<AmplitudePmf>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached c = 1 pmf per feature dimension; draws only rescale by 1/c.
pub fn cached_imq_pmf(feature_dim: usize) -> Result<std::sync::Arc<AmplitudePmf>> {
    let mut cache = PMF_CACHE.lock().unwrap();
    if let Some(pmf) = cache.get(&feature_dim) {
        return Ok(pmf.clone());
    }
    let pmf = std::sync::Arc::new(imq_amplitude_pmf(feature_dim)?);
    cache.insert(feature_dim, pmf.clone());
    Ok(pmf)
}

/// Seed record for one basis draw; bases for independent draws must differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisSeed(pub u64);

/// A realized random Fourier basis.
#[derive(Clone, Debug)]
pub struct RffBasis {
    /// D x Q frequency matrix.
    pub omegas: Array2<f64>,
    /// Length-D offsets in [0, 2*pi).
    pub offsets: Array1<f64>,
    pub spec: KernelSpec,
    pub seed: BasisSeed,
}

impl RffBasis {
    pub fn num_features(&self) -> usize {
        self.omegas.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.omegas.ncols()
    }
}

/// Draws a basis of `num_features` frequencies for a Q-dimensional input.
/// Deterministic: the same seed yields a bit-identical basis.
pub fn sample_rff_basis(
    spec: &KernelSpec,
    feature_dim: usize,
    num_features: usize,
    seed: BasisSeed,
) -> Result<RffBasis> {
    spec.validate()?;
    if num_features == 0 || feature_dim == 0 {
        return Err(Error::InvalidParam {
            name: "rff dims",
            reason: "feature_dim and num_features must be >= 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut omegas = Array2::zeros((num_features, feature_dim));
    match spec {
        KernelSpec::Linear => {
            return Err(Error::InvalidParam {
                name: "spec",
                reason: "linear kernel needs no random features".into(),
            })
        }
        KernelSpec::Gaussian { sigma } => {
            for v in omegas.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *v = g / sigma;
            }
        }
        KernelSpec::Imq { c } => {
            let pmf = cached_imq_pmf(feature_dim)?;
            for d in 0..num_features {
                let mut norm_sq = 0.0;
                for q in 0..feature_dim {
                    let g: f64 = rng.sample(StandardNormal);
                    omegas[[d, q]] = g;
                    norm_sq += g * g;
                }
                let norm = norm_sq.sqrt();
                let amplitude = pmf.sample(rng.random::<f64>()) / c;
                for q in 0..feature_dim {
                    omegas[[d, q]] *= amplitude / norm;
                }
            }
        }
    }
    let offsets = Array1::from_shape_fn(num_features, |_| rng.random::<f64>() * 2.0 * PI);
    Ok(RffBasis {
        omegas,
        offsets,
        spec: *spec,
        seed,
    })
}

/// Feature matrix R with R[i][d] = sqrt(2/D) cos(w_d . z_i + b_d).
pub fn rff_features(basis: &RffBasis, z: ArrayView2<f64>) -> Result<Array2<f64>> {
    if z.ncols() != basis.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.feature_dim(),
            got: z.ncols(),
        });
    }
    let d = basis.num_features();
    let scale = (2.0 / d as f64).sqrt();
    // z (n x Q) . omegas^T (Q x D) + offsets, then cos
    let mut proj = z.dot(&basis.omegas.t());
    for mut row in proj.rows_mut() {
        for (v, b) in row.iter_mut().zip(basis.offsets.iter()) {
            *v = scale * (*v + b).cos();
        }
    }
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_eval;
    use crate::stats::{ks_statistic, RunningStats};
    use ndarray::array;

    #[test]
    fn pmf_normalized_and_monotone_grid() {
        for q in [1usize, 2, 7, 16] {
            let pmf = imq_amplitude_pmf(q).unwrap();
            let total: f64 = pmf.probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(pmf.probs.iter().all(|&p| p >= 0.0));
            assert!(pmf.grid.windows(2).all(|w| w[1] > w[0]));
            assert!(pmf.grid[0] >= GRID_LOWER);
        }
    }

    /// Independent quadrature of K_0 via its integral representation
    /// K_0(x) = int_0^inf exp(-x cosh t) dt (composite Gauss-Legendre).
    fn k0_quadrature(x: f64) -> f64 {
        // 64-point Gauss-Legendre nodes/weights on [-1, 1] are overkill;
        // use 16-point panels of width 0.25 over t in [0, 60].
        const NODES: [f64; 8] = [
            0.0950125098376374,
            0.2816035507792589,
            0.4580167776572274,
            0.6178762444026438,
            0.7554044083550030,
            0.8656312023878318,
            0.9445750230732326,
            0.9894009349916499,
        ];
        const WEIGHTS: [f64; 8] = [
            0.1894506104550685,
            0.1826034150449236,
            0.1691565193950025,
            0.1495959888165767,
            0.1246289712555339,
            0.0951585116824928,
            0.0622535239386479,
            0.0271524594117541,
        ];
        let mut total = 0.0;
        let width = 0.25;
        let mut a = 0.0;
        while a < 60.0 {
            let b = a + width;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for i in 0..8 {
                for sign in [-1.0, 1.0] {
                    let t = mid + sign * half * NODES[i];
                    total += half * WEIGHTS[i] * (-x * t.cosh()).exp();
                }
            }
            a = b;
        }
        total
    }

    #[test]
    fn q1_pmf_matches_k0_quadrature() {
        // density for Q=1 is K_0(s) itself; compare normalized tabulations
        let pmf = imq_amplitude_pmf(1).unwrap();
        let quad: Vec<f64> = pmf.grid.iter().map(|&s| k0_quadrature(s)).collect();
        let total: f64 = quad.iter().sum();
        for (i, (&p, &q)) in pmf.probs.iter().zip(&quad).enumerate() {
            let qn = q / total;
            let rel = (p - qn).abs() / qn.abs();
            assert!(rel < 1e-10, "grid point {i}: pmf {p}, quadrature {qn}, rel {rel:e}");
        }
    }

    /// Independent quadrature for the Q=2 amplitude density: applying a
    /// Gaussian-integral identity to 1/sqrt(1+r^2), the 2-D Fourier
    /// transform is hhat(s) = (2/sqrt(pi)) int_0^inf exp(-u^2) (pi/u^2)
    /// exp(-s^2/(4u^2)) du, and the amplitude density is hhat(s) * s.
    fn q2_density_quadrature(s: f64) -> f64 {
        let mut total = 0.0;
        let n = 20_000;
        let upper = 12.0;
        let h = upper / n as f64;
        for i in 0..n {
            let u = (i as f64 + 0.5) * h;
            total += h * (-u * u).exp() / (u * u) * (-s * s / (4.0 * u * u)).exp();
        }
        (2.0 / PI.sqrt()) * PI * total * s
    }

    #[test]
    fn q2_pmf_mean_matches_rejection_sampler() {
        let pmf = imq_amplitude_pmf(2).unwrap();
        // rejection-sample the quadrature density with a uniform proposal
        let upper = grid_upper(2);
        let envelope = 1.05
            * (0..400)
                .map(|i| q2_density_quadrature(1e-6 + i as f64 * upper / 400.0))
                .fold(f64::MIN, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut stats = RunningStats::new();
        while stats.count() < 10_000 {
            let s = rng.random::<f64>() * upper;
            let y = rng.random::<f64>() * envelope;
            if y <= q2_density_quadrature(s.max(1e-9)) {
                stats.push(s);
            }
        }
        let diff = (pmf.mean() - stats.mean()).abs();
        assert!(
            diff < 3.0 * stats.std_error(),
            "pmf mean {} vs sampler mean {} +- {}",
            pmf.mean(),
            stats.mean(),
            stats.std_error()
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = KernelSpec::Imq { c: 1.0 };
        let a = sample_rff_basis(&spec, 4, 32, BasisSeed(9)).unwrap();
        let b = sample_rff_basis(&spec, 4, 32, BasisSeed(9)).unwrap();
        assert_eq!(a.omegas, b.omegas);
        assert_eq!(a.offsets, b.offsets);
    }

    #[test]
    fn linear_spec_rejected() {
        assert!(sample_rff_basis(&KernelSpec::Linear, 4, 8, BasisSeed(0)).is_err());
    }

    #[test]
    fn features_bounded_and_shifted_cosine() {
        let spec = KernelSpec::Gaussian { sigma: 1.0 };
        let basis = sample_rff_basis(&spec, 3, 64, BasisSeed(5)).unwrap();
        let z = array![[0.2, -0.4, 0.9], [1.0, 0.0, 0.0]];
        let r = rff_features(&basis, z.view()).unwrap();
        let bound = (2.0 / 64.0f64).sqrt();
        assert!(r.iter().all(|v| v.abs() <= bound + 1e-15));

        // D=1, omega=0, b=0 -> every entry sqrt(2)
        let trivial = RffBasis {
            omegas: Array2::zeros((1, 3)),
            offsets: Array1::zeros(1),
            spec,
            seed: BasisSeed(0),
        };
        let r = rff_features(&trivial, z.view()).unwrap();
        assert!(r.iter().all(|&v| (v - 2.0f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn unbiased_for_exact_kernel_both_kinds() {
        let z1 = array![0.3, -0.5, 0.8, 0.1];
        let z2 = array![-0.2, 0.9, 0.4, -0.7];
        let pts = ndarray::stack![ndarray::Axis(0), z1, z2];
        for spec in [KernelSpec::Gaussian { sigma: 1.0 }, KernelSpec::Imq { c: 1.0 }] {
            let exact = kernel_eval(&spec, z1.view(), z2.view()).unwrap();
            let mut cross = RunningStats::new();
            let mut diag = RunningStats::new();
            for s in 0..200_000u64 {
                let basis = sample_rff_basis(&spec, 4, 4, BasisSeed(s)).unwrap();
                let r = rff_features(&basis, pts.view()).unwrap();
                cross.push(r.row(0).dot(&r.row(1)));
                diag.push(r.row(0).dot(&r.row(0)));
            }
            let dev = (cross.mean() - exact).abs();
            assert!(
                dev < 3.0 * cross.std_error(),
                "{spec:?}: mean {} vs exact {} (3se {})",
                cross.mean(),
                exact,
                3.0 * cross.std_error()
            );
            let dev_diag = (diag.mean() - 1.0).abs();
            assert!(dev_diag < 3.0 * diag.std_error());
        }
    }

    #[test]
    fn imq_amplitudes_rescale_with_c() {
        // amplitudes at c=2, multiplied back by 2, match the c=1 draw in
        // distribution (two-sample KS below the 1% critical value)
        let n = 10_000;
        let draw = |c: f64, seed: u64| -> Vec<f64> {
            let basis =
                sample_rff_basis(&KernelSpec::Imq { c }, 3, n, BasisSeed(seed)).unwrap();
            (0..n)
                .map(|d| basis.omegas.row(d).dot(&basis.omegas.row(d)).sqrt())
                .collect()
        };
        let c1 = draw(1.0, 11);
        let c2: Vec<f64> = draw(2.0, 23).into_iter().map(|a| a * 2.0).collect();
        let ks = ks_statistic(&c1, &c2);
        // critical value at 1%: 1.6276 * sqrt((n+m)/(n m))
        let critical = 1.6276 * (2.0 / n as f64).sqrt();
        assert!(ks < critical, "KS {ks} >= {critical}");
    }
}
