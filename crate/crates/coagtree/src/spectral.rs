//! Discrete transforms and the FFT realization of the coagulation star
//! product for separable-family frequency kernels, plus the O(n^2)
//! double-sum oracle it is checked against.
//!
//! The transform of a sampled function approximates
//! F(s) = integral over [0, infinity) of exp(2*pi*i*s*x) f(x) dx at the
//! frequencies s_k = k/(n h), quadrature weight h, with the phases taken at
//! the true nodes x_nu = (nu + 1) h. Relative to the raw FFT this is one
//! extra unimodular phase per frequency; it keeps the convolution implied
//! by spectral products aligned with the node masses, which is what the
//! convergence tests adjudicate.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Equispaced positive nodes on a truncated mass domain \[0, L\]:
/// x_nu = (nu + 1) h with h = L/n, so singular data like exp(-x)/x stays
/// finite at every node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    length: f64,
    modes: usize,
}

impl GridSpec {
    pub fn new(length: f64, modes: usize) -> Result<GridSpec, SpectralError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(SpectralError::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if modes < 2 || !modes.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!(
                "node count must be a power of two >= 2, got {modes}"
            )));
        }
        Ok(GridSpec { length, modes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.modes as f64
    }

    pub fn node(&self, index: usize) -> f64 {
        (index as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.modes).map(|i| self.node(i)).collect()
    }

    /// Signed frequency index for storage slot k: 0..n/2-1 map to
    /// themselves, n/2..n-1 map to k - n.
    pub fn signed_frequency_index(&self, slot: usize) -> i64 {
        let n = self.modes as i64;
        let k = slot as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Frequency value s_k at storage slot k.
    pub fn frequency(&self, slot: usize) -> f64 {
        self.signed_frequency_index(slot) as f64 / (self.modes as f64 * self.spacing())
    }
}

/// Real samples g(x_nu) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<GridFunction, SpectralError> {
        if values.len() != grid.modes() {
            return Err(SpectralError::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.modes(),
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn sample(grid: GridSpec, f: impl Fn(f64) -> f64) -> GridFunction {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> GridFunction {
        GridFunction {
            grid,
            values: vec![0.0; grid.modes()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

/// Complex transform samples in native FFT storage order (slot 0 is the
/// zero frequency; see `GridSpec::signed_frequency_index`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn zeros(grid: GridSpec) -> SpectralFunction {
        SpectralFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    /// The zero-frequency scalar, slot 0.
    pub fn zero_frequency(&self) -> Complex64 {
        self.values[0]
    }

    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// Frequency-kernel descriptor. All variants are in the separable family:
/// a finite sum of products of single-variable factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// K = 1
    Constant,
    /// K(y, z) = (y z)^(lambda/2), the factor k(x) = x^(lambda/2)
    SeparablePower { lambda: f64 },
    /// K(y, z) = k(y) k(z) with k sampled on the grid nodes
    SeparableGeneral { factor: Vec<f64> },
    /// K(y, z) = sum over (i, j) of c_ij k_i(y) k_j(z), c_ij symmetric
    SeparableSum {
        factors: Vec<Vec<f64>>,
        coefficients: Vec<(usize, usize, f64)>,
    },
    /// K(y, z) = k(y) + k(z)
    GeneralAdditive { factor: Vec<f64> },
}

/// Kernel with factors sampled on a concrete grid, as a term list
/// K = sum of coeff * factor_i(y) * factor_j(z).
#[derive(Debug, Clone)]
pub struct KernelOnGrid {
    grid: GridSpec,
    factors: Vec<Arc<Vec<f64>>>,
    terms: Vec<(usize, usize, f64)>,
}

impl KernelOnGrid {
    pub fn sample(spec: &KernelSpec, grid: GridSpec) -> Result<KernelOnGrid, SpectralError> {
        let check = |factor: &[f64]| -> Result<(), SpectralError> {
            if factor.len() != grid.modes() {
                return Err(SpectralError::GridMismatch(format!(
                    "kernel factor has {} samples, grid has {}",
                    factor.len(),
                    grid.modes()
                )));
            }
            if factor.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(SpectralError::UnsupportedKernel(
                    "factor samples must be finite and nonnegative".into(),
                ));
            }
            Ok(())
        };
        let (factors, terms): (Vec<Vec<f64>>, Vec<(usize, usize, f64)>) = match spec {
            KernelSpec::Constant => (vec![vec![1.0; grid.modes()]], vec![(0, 0, 1.0)]),
            KernelSpec::SeparablePower { lambda } => {
                if !lambda.is_finite() {
                    return Err(SpectralError::UnsupportedKernel(
                        "power-kernel exponent must be finite".into(),
                    ));
                }
                let factor = grid
                    .nodes()
                    .iter()
                    .map(|&x| x.powf(lambda / 2.0))
                    .collect();
                (vec![factor], vec![(0, 0, 1.0)])
            }
            KernelSpec::SeparableGeneral { factor } => {
                check(factor)?;
                (vec![factor.clone()], vec![(0, 0, 1.0)])
            }
            KernelSpec::SeparableSum {
                factors,
                coefficients,
            } => {
                for f in factors {
                    check(f)?;
                }
                let mut matrix = HashMap::new();
                for &(i, j, c) in coefficients {
                    if i >= factors.len() || j >= factors.len() {
                        return Err(SpectralError::UnsupportedKernel(format!(
                            "coefficient refers to factor {} of {}",
                            i.max(j),
                            factors.len()
                        )));
                    }
                    *matrix.entry((i, j)).or_insert(0.0) += c;
                }
                for (&(i, j), &c) in &matrix {
                    let mirrored = matrix.get(&(j, i)).copied().unwrap_or(0.0);
                    if (c - mirrored).abs() > 1e-12 * (1.0 + c.abs()) {
                        return Err(SpectralError::UnsupportedKernel(format!(
                            "coefficients must be symmetric, c[{i}][{j}] = {c} vs c[{j}][{i}] = {mirrored}"
                        )));
                    }
                }
                (factors.clone(), coefficients.clone())
            }
            KernelSpec::GeneralAdditive { factor } => {
                check(factor)?;
                let ones = vec![1.0; grid.modes()];
                (
                    vec![factor.clone(), ones],
                    vec![(0, 1, 1.0), (1, 0, 1.0)],
                )
            }
        };
        Ok(KernelOnGrid {
            grid,
            factors: factors.into_iter().map(Arc::new).collect(),
            terms,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &[f64] {
        &self.factors[i]
    }

    pub fn terms(&self) -> &[(usize, usize, f64)] {
        &self.terms
    }

    /// K at a node pair, from the term list.
    pub fn evaluate(&self, mu: usize, nu: usize) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * self.factors[i][mu] * self.factors[j][nu])
            .sum()
    }
}

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// e^(2 pi i k / n): the node-offset phase of the transform
    locale: Arc<Vec<Complex64>>,
}

static PLAN_CACHE: Lazy<RwLock<HashMap<usize, Arc<Plans>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));
static FFT_COUNT: AtomicU64 = AtomicU64::new(0);

/// Total forward + inverse transforms performed by this process.
pub fn fft_count() -> u64 {
    FFT_COUNT.load(Ordering::Relaxed)
}

fn plans_for(n: usize) -> Arc<Plans> {
    if let Some(p) = PLAN_CACHE.read().expect("plan cache").get(&n) {
        return p.clone();
    }
    let mut cache = PLAN_CACHE.write().expect("plan cache");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let locale = (0..n)
                .map(|k| {
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
                })
                .collect();
            Arc::new(Plans {
                // rustfft "inverse" is the unnormalized e^{+2 pi i} sum,
                // which is our forward direction
                fwd: planner.plan_fft_inverse(n),
                inv: planner.plan_fft_forward(n),
                locale: Arc::new(locale),
            })
        })
        .clone()
}

/// Transform of node samples: F_k = h * sum_nu exp(2 pi i s_k x_nu) f_nu.
pub fn forward_transform(f: &GridFunction) -> SpectralFunction {
    let n = f.grid.modes();
    let h = f.grid.spacing();
    let plans = plans_for(n);
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plans.fwd.process(&mut buf);
    for (v, phase) in buf.iter_mut().zip(plans.locale.iter()) {
        *v *= h * phase;
    }
    FFT_COUNT.fetch_add(1, Ordering::Relaxed);
    SpectralFunction {
        grid: f.grid,
        values: buf,
    }
}

/// Inverse transform back to node samples; the imaginary residue of
/// conjugate-symmetric spectra is dropped.
pub fn inverse_transform(spectrum: &SpectralFunction) -> GridFunction {
    let values = inverse_transform_complex(spectrum)
        .into_iter()
        .map(|v| v.re)
        .collect();
    GridFunction {
        grid: spectrum.grid,
        values,
    }
}

/// Full complex inverse, f_nu = (1/(n h)) * sum_k exp(-2 pi i s_k x_nu) F_k.
pub fn inverse_transform_complex(spectrum: &SpectralFunction) -> Vec<Complex64> {
    let n = spectrum.grid.modes();
    let h = spectrum.grid.spacing();
    let plans = plans_for(n);
    let mut buf: Vec<Complex64> = spectrum
        .values
        .iter()
        .zip(plans.locale.iter())
        .map(|(v, phase)| v * phase.conj())
        .collect();
    plans.inv.process(&mut buf);
    let scale = 1.0 / (n as f64 * h);
    for v in &mut buf {
        *v *= scale;
    }
    FFT_COUNT.fetch_add(1, Ordering::Relaxed);
    buf
}

/// The transforms of factor*g and x*factor*g for every kernel factor; one
/// physical intermediate needs exactly 2 * factor_count transforms, after
/// which any number of star products reuse them.
#[derive(Debug, Clone)]
pub struct FactorTransforms {
    grid: GridSpec,
    /// per factor: (transform of x*k_i*g, transform of k_i*g)
    per_factor: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl FactorTransforms {
    pub fn build(g: &GridFunction, kernel: &KernelOnGrid) -> Result<FactorTransforms, SpectralError> {
        if g.grid != kernel.grid() {
            return Err(SpectralError::GridMismatch(
                "function and kernel sampled on different grids".into(),
            ));
        }
        let nodes = g.grid.nodes();
        let mut per_factor = Vec::with_capacity(kernel.factor_count());
        for i in 0..kernel.factor_count() {
            let factor = kernel.factor(i);
            let kg: Vec<f64> = g
                .values
                .iter()
                .zip(factor)
                .map(|(&v, &k)| k * v)
                .collect();
            let lkg: Vec<f64> = kg.iter().zip(&nodes).map(|(&v, &x)| x * v).collect();
            let t_lkg = forward_transform(&GridFunction {
                grid: g.grid,
                values: lkg,
            });
            let t_kg = forward_transform(&GridFunction {
                grid: g.grid,
                values: kg,
            });
            per_factor.push((t_lkg.values, t_kg.values));
        }
        Ok(FactorTransforms {
            grid: g.grid,
            per_factor,
        })
    }

    /// Number of forward transforms a build performs.
    pub fn transforms_per_build(kernel: &KernelOnGrid) -> u64 {
        2 * kernel.factor_count() as u64
    }
}

/// Star product assembled from prebuilt factor transforms:
/// for each kernel term c * k_i(y) k_j(z),
/// c/2 * [ F(x k_i g) (F(k_j f) - F0(k_j f)) + (F(k_i g) - F0(k_i g)) F(x k_j f) ].
pub fn star_from_transforms(
    g: &FactorTransforms,
    f: &FactorTransforms,
    kernel: &KernelOnGrid,
) -> Result<SpectralFunction, SpectralError> {
    if g.grid != f.grid || g.grid != kernel.grid() {
        return Err(SpectralError::GridMismatch(
            "operands and kernel must share one grid".into(),
        ));
    }
    let n = g.grid.modes();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for &(i, j, c) in kernel.terms() {
        let (lug, ug) = &g.per_factor[i];
        let (lvf, vf) = &f.per_factor[j];
        let ug0 = ug[0];
        let vf0 = vf[0];
        let half_c = 0.5 * c;
        for k in 0..n {
            out[k] += half_c * (lug[k] * (vf[k] - vf0) + (ug[k] - ug0) * lvf[k]);
        }
    }
    Ok(SpectralFunction {
        grid: g.grid,
        values: out,
    })
}

/// FFT star product of two sampled densities.
pub fn star_product(
    g: &GridFunction,
    f: &GridFunction,
    kernel: &KernelSpec,
) -> Result<SpectralFunction, SpectralError> {
    if g.grid != f.grid {
        return Err(SpectralError::GridMismatch(
            "star operands on different grids".into(),
        ));
    }
    let on_grid = KernelOnGrid::sample(kernel, g.grid)?;
    let tg = FactorTransforms::build(g, &on_grid)?;
    let tf = if f.values == g.values {
        tg.clone()
    } else {
        FactorTransforms::build(f, &on_grid)?
    };
    star_from_transforms(&tg, &tf, &on_grid)
}

const ORACLE_MODE_LIMIT: usize = 4096;

/// Direct double-Riemann-sum evaluation of the star product:
/// h^2 sum over (mu, nu) of H(s_k, x_mu, x_nu) K(x_mu, x_nu) g_mu f_nu at
/// every frequency, with H = (y e(y) (e(z) - 1) + (e(y) - 1) z e(z)) / 2
/// and e the per-node transform phase. No factorization, no FFT; for
/// separable-family kernels the sums factorize algebraically, so this must
/// agree with `star_product` to round-off.
pub fn direct_star_oracle(
    g: &GridFunction,
    f: &GridFunction,
    kernel: &KernelSpec,
) -> Result<SpectralFunction, SpectralError> {
    if g.grid != f.grid {
        return Err(SpectralError::GridMismatch(
            "oracle operands on different grids".into(),
        ));
    }
    let n = g.grid.modes();
    if n > ORACLE_MODE_LIMIT {
        return Err(SpectralError::ResourceLimit(format!(
            "direct oracle is O(n^3); {n} exceeds the {ORACLE_MODE_LIMIT}-node guard"
        )));
    }
    let on_grid = KernelOnGrid::sample(kernel, g.grid)?;
    let h = g.grid.spacing();
    let nodes = g.grid.nodes();
    let tau = 2.0 * std::f64::consts::PI;
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|k| {
            // e^(2 pi i k (nu + 1) / n), the same phases the transform uses
            let phases: Vec<Complex64> = (0..n)
                .map(|nu| Complex64::from_polar(1.0, tau * (k * (nu + 1) % n) as f64 / n as f64))
                .collect();
            let one = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for mu in 0..n {
                if g.values[mu] == 0.0 {
                    continue;
                }
                let ey = phases[mu];
                let y = nodes[mu];
                for nu in 0..n {
                    if f.values[nu] == 0.0 {
                        continue;
                    }
                    let ez = phases[nu];
                    let z = nodes[nu];
                    let big_h = 0.5 * (y * ey * (ez - one) + (ey - one) * z * ez);
                    acc += big_h * on_grid.evaluate(mu, nu) * g.values[mu] * f.values[nu];
                }
            }
            acc * h * h
        })
        .collect();
    Ok(SpectralFunction {
        grid: g.grid,
        values,
    })
}

/// k-th moment by grid quadrature, h * sum of x^k g(x).
pub fn moment(g: &GridFunction, order: u32) -> f64 {
    let h = g.grid.spacing();
    h * g
        .grid
        .nodes()
        .iter()
        .zip(&g.values)
        .map(|(&x, &v)| x.powi(order as i32) * v)
        .sum::<f64>()
}
