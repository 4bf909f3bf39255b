//! Convergence studies: error tables over (order, step-count) sweeps and
//! slope fits over the pre-floor segment of each error curve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::multiplicative_bessel;
use crate::solver::{run, InitialData, SolverConfig, SolverError};
use crate::spectral::{GridFunction, KernelSpec};

/// Reference a sweep measures against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// The closed-form multiplicative-kernel solution; requires lambda = 2
    /// and exp(-x)/x data.
    Exact,
    /// A single high-order fine-step run of the same configuration.
    SelfFinest { order: usize, steps: usize },
}

/// Sweep description: the base run with `order`/`steps` swept over the
/// given sets.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: SolverConfig,
    pub orders: Vec<usize>,
    pub step_counts: Vec<usize>,
    pub reference: Reference,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorCell {
    pub order: usize,
    pub steps: usize,
    /// relative l2 error against the reference; None when the cell failed
    pub error: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub order: usize,
    /// least-squares slope of log2(error) against log2(steps) over the
    /// pre-floor cells; None when fewer than two cells sit above the floor
    pub slope: Option<f64>,
    pub points_used: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub cells: Vec<ErrorCell>,
    pub fits: Vec<SlopeFit>,
    pub reference_note: String,
}

/// A cell counts as pre-floor while its error exceeds this multiple of the
/// smallest error in its order's sweep.
pub const FLOOR_GUARD: f64 = 2.5;

/// Relative l2 distance between two states on one grid, sqrt(h)-scaled
/// norms.
pub fn l2_relative(a: &GridFunction, b: &GridFunction) -> f64 {
    assert_eq!(a.grid, b.grid, "comparing states on different grids");
    let num: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let den: f64 = b.values.iter().map(|v| v * v).sum();
    (num / den).sqrt()
}

fn reference_state(spec: &SweepSpec) -> Result<(GridFunction, String), SolverError> {
    match &spec.reference {
        Reference::Exact => {
            let is_multiplicative = matches!(
                spec.base.kernel,
                KernelSpec::SeparablePower { lambda } if lambda == 2.0
            );
            if !is_multiplicative || spec.base.initial != InitialData::ExpOverX {
                return Err(SolverError::InvalidConfig(
                    "exact reference requires the lambda = 2 kernel with exp(-x)/x data".into(),
                ));
            }
            let t = spec.base.horizon;
            let state = GridFunction::sample(spec.base.grid, |x| {
                multiplicative_bessel(x, t).expect("positive nodes, 0 <= t <= 1")
            });
            Ok((state, format!("closed-form solution at t = {t}")))
        }
        Reference::SelfFinest { order, steps } => {
            let mut cfg = spec.base.clone();
            cfg.order = *order;
            cfg.steps = *steps;
            let trajectory = run(&cfg)?;
            Ok((
                trajectory.final_state,
                format!("self reference: order {order}, {steps} steps"),
            ))
        }
    }
}

/// Runs every (order, steps) cell against the reference. Cells run in a
/// worker pool; a failing cell is recorded and does not abort the sweep.
pub fn run_study(spec: &SweepSpec) -> Result<ConvergenceStudy, SolverError> {
    let (reference, reference_note) = reference_state(spec)?;
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for &order in &spec.orders {
        for &steps in &spec.step_counts {
            jobs.push((order, steps));
        }
    }
    let cells: Vec<ErrorCell> = jobs
        .par_iter()
        .map(|&(order, steps)| {
            let mut cfg = spec.base.clone();
            cfg.order = order;
            cfg.steps = steps;
            match run(&cfg) {
                Ok(trajectory) => ErrorCell {
                    order,
                    steps,
                    error: Some(l2_relative(&trajectory.final_state, &reference)),
                    note: None,
                },
                Err(e) => ErrorCell {
                    order,
                    steps,
                    error: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    let fits = spec
        .orders
        .iter()
        .map(|&order| {
            let points: Vec<(usize, f64)> = cells
                .iter()
                .filter(|c| c.order == order)
                .filter_map(|c| c.error.map(|e| (c.steps, e)))
                .collect();
            fit_slope(order, &points)
        })
        .collect();
    Ok(ConvergenceStudy {
        cells,
        fits,
        reference_note,
    })
}

/// Least-squares slope of -log2(error) vs log2(steps) over the pre-floor
/// cells (error above FLOOR_GUARD times the sweep minimum).
pub fn fit_slope(order: usize, points: &[(usize, f64)]) -> SlopeFit {
    let floor = points
        .iter()
        .map(|&(_, e)| e)
        .fold(f64::INFINITY, f64::min);
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e > FLOOR_GUARD * floor && e.is_finite() && e > 0.0)
        .map(|&(m, e)| ((m as f64).log2(), e.log2()))
        .collect();
    if usable.len() < 2 {
        return SlopeFit {
            order,
            slope: None,
            points_used: usable.len(),
        };
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    SlopeFit {
        order,
        slope: Some(-sxy / sxx),
        points_used: usable.len(),
    }
}
