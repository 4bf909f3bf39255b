//! Closed-form and characteristics-based reference solutions for the three
//! classical kernels. These are the oracles the numerical solver is
//! measured against, so the special functions are implemented here rather
//! than taken from a numerics crate.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

/// Crossover between the power series and the scaled asymptotic expansion
/// of I1; both branches agree to ~1e-15 here.
const I1_SERIES_LIMIT: f64 = 20.0;

/// Modified Bessel function of the first kind, order one. Power series up
/// to `I1_SERIES_LIMIT`, asymptotic expansion beyond; overflows to
/// infinity only past z ~ 713.
pub fn bessel_i1(z: f64) -> f64 {
    if z < 0.0 {
        return -bessel_i1(-z);
    }
    if z <= I1_SERIES_LIMIT {
        bessel_i1_series(z)
    } else {
        bessel_i1_scaled_asymptotic(z) * z.exp()
    }
}

/// e^{-z} I1(z) for z >= 0; stays finite for any argument, which is what
/// the density formula needs when the exponents are combined analytically.
pub fn bessel_i1_scaled(z: f64) -> f64 {
    if z <= I1_SERIES_LIMIT {
        bessel_i1_series(z) * (-z).exp()
    } else {
        bessel_i1_scaled_asymptotic(z)
    }
}

fn bessel_i1_series(z: f64) -> f64 {
    // I1(z) = (z/2) * sum_m (z^2/4)^m / (m! (m+1)!)
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * (m as f64 + 1.0));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    0.5 * z * sum
}

fn bessel_i1_scaled_asymptotic(z: f64) -> f64 {
    // e^{-z} I1(z) ~ (2 pi z)^{-1/2} sum_k t_k,
    // t_0 = 1, t_{k+1} = -t_k (4 - (2k+1)^2) / (8 z (k+1))
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..30u32 {
        let next = -term * (4.0 - (2.0 * k as f64 + 1.0).powi(2)) / (8.0 * z * (k as f64 + 1.0));
        if next.abs() >= term.abs() {
            break; // asymptotic series: stop at the smallest term
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// Exact multiplicative-kernel density for data exp(-x)/x:
/// exp(-(1+t)x) I1(2x sqrt(t)) / (x^2 sqrt(t)), valid through the gelation
/// time t = 1. The t -> 0 limit is the data itself.
pub fn multiplicative_bessel(x: f64, t: f64) -> Result<f64, ExactError> {
    if !(x > 0.0) {
        return Err(ExactError::DomainError(format!(
            "mass must be positive, got {x}"
        )));
    }
    if t < 0.0 {
        return Err(ExactError::DomainError(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok((-x).exp() / x);
    }
    let sqrt_t = t.sqrt();
    let z = 2.0 * x * sqrt_t;
    // exp(-(1+t)x) I1(z) = exp(-(1+t)x + z) * [e^{-z} I1(z)]; the combined
    // exponent -(1 - sqrt(t))^2 x - ... underflows smoothly for large x
    let exponent = -(1.0 + t) * x + z;
    Ok(exponent.exp() * bessel_i1_scaled(z) / (x * x * sqrt_t))
}

/// Transform-side function of s, the shape the kernel oracles pass around.
#[derive(Clone)]
pub struct BernsteinFunction {
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl BernsteinFunction {
    pub fn new(evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static) -> BernsteinFunction {
        BernsteinFunction {
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.evaluator)(s)
    }

    /// Diagnostic for the transform-of-a-positive-measure invariants:
    /// vanishing at s = 0 and non-decreasing on the sample grid.
    pub fn check_on_grid(&self, samples: &[f64]) -> BernsteinDiagnostic {
        let at_zero = self.eval(0.0);
        let mut non_decreasing = true;
        let mut prev = f64::NEG_INFINITY;
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &s in &sorted {
            let v = self.eval(s);
            if v < prev - 1e-12 {
                non_decreasing = false;
            }
            prev = v;
        }
        BernsteinDiagnostic {
            value_at_zero: at_zero,
            non_decreasing,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BernsteinDiagnostic {
    pub value_at_zero: f64,
    pub non_decreasing: bool,
}

/// Constant-kernel solution on the transform side:
/// s |-> xi(s) / (1 + t xi(s) / 2).
pub fn constant_kernel_solution(xi: &BernsteinFunction, t: f64) -> BernsteinFunction {
    let xi = xi.clone();
    BernsteinFunction::new(move |s| {
        let v = xi.eval(s);
        v / (1.0 + 0.5 * t * v)
    })
}

/// Exchange between the additive- and multiplicative-kernel solutions
/// (first moment normalized to one): prefactor 1/(1-t) and inner time
/// -log(1-t).
pub fn multiplicative_from_additive_time(t: f64) -> Result<(f64, f64), ExactError> {
    if !(0.0..1.0).contains(&t) {
        return Err(ExactError::DomainError(format!(
            "time change defined for 0 <= t < 1, got {t}"
        )));
    }
    Ok((1.0 / (1.0 - t), -(1.0 - t).ln()))
}

/// Applies the time change to a transform-side solution gf(s, time) of the
/// additive-kernel flow, producing the multiplicative-kernel solution at
/// time t < 1.
pub fn multiplicative_from_additive<F>(
    gf: F,
    t: f64,
) -> Result<BernsteinFunction, ExactError>
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    let (prefactor, inner) = multiplicative_from_additive_time(t)?;
    Ok(BernsteinFunction::new(move |s| prefactor * gf(s, inner)))
}

/// Inverse of the time change: recovers the additive-side value at inner
/// time kappa from the multiplicative-side function.
pub fn additive_from_multiplicative_time(kappa: f64) -> Result<(f64, f64), ExactError> {
    if kappa < 0.0 {
        return Err(ExactError::DomainError(format!(
            "inner time must be nonnegative, got {kappa}"
        )));
    }
    let t = 1.0 - (-kappa).exp();
    Ok(((1.0 - t), t))
}

const CHARACTERISTIC_TOL: f64 = 1e-13;
const CHARACTERISTIC_MAX_ITER: usize = 200;

/// Transform-side solution of the inviscid quadratic flow by
/// characteristics: solves h = s + t xi(h) and returns xi(h). Newton with
/// a damped fixed-point fallback; valid before characteristics cross.
pub fn burgers_characteristics(
    xi: &dyn Fn(f64) -> f64,
    t: f64,
    s: f64,
) -> Result<f64, ExactError> {
    let residual = |h: f64| h - s - t * xi(h);
    let mut h = s;
    let mut r = residual(h);
    for _ in 0..CHARACTERISTIC_MAX_ITER {
        if r.abs() <= CHARACTERISTIC_TOL * (1.0 + h.abs()) {
            return Ok(xi(h));
        }
        // numerical Newton step
        let dh = 1e-7 * (1.0 + h.abs());
        let slope = (residual(h + dh) - residual(h - dh)) / (2.0 * dh);
        let mut next = if slope.is_finite() && slope.abs() > 1e-12 {
            h - r / slope
        } else {
            f64::NAN
        };
        if !next.is_finite() || residual(next).abs() >= r.abs() {
            // damped fixed point: h <- h + (s + t xi(h) - h) / 2
            next = h + 0.5 * (s + t * xi(h) - h);
        }
        let next_r = residual(next);
        if !next_r.is_finite() {
            return Err(ExactError::NoConvergence(format!(
                "characteristic iteration diverged at t = {t}, s = {s}"
            )));
        }
        h = next;
        r = next_r;
    }
    Err(ExactError::NoConvergence(format!(
        "characteristic iteration hit the {CHARACTERISTIC_MAX_ITER}-step cap at t = {t}, s = {s} (crossing?)"
    )))
}
