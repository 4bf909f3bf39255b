//! Order-N time stepping of the coagulation equation by the truncated
//! non-planar tree expansion.
//!
//! One step of order N evaluates, bottom-up over grades, the spectral
//! product xi(tau) = star(children) for every non-planar representative
//! tau with grade <= N. Representatives below the top grade are carried as
//! physical-space intermediates (one inverse transform each, their factor
//! transforms cached and reused), the top grade is accumulated spectrally
//! and inverse-transformed once; the new state is
//! g + sum over grades of dt^n / n! * (per-grade weighted combination).

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{
    inverse_transform, moment, star_from_transforms, FactorTransforms, GridFunction, GridSpec,
    KernelOnGrid, KernelSpec, SpectralError, SpectralFunction,
};
use crate::tree::{enumerate_nonplanar_upto, Tree, TreeError, DEFAULT_GRADE_CAP};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-finite value in step {step} (blow-up or gelation proximity)")]
    NonFiniteValue { step: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// One record of the evaluation plan: a non-planar representative, the
/// grafting pair it splits into, and its series coefficient
/// weight * 2^symmetry / grade!.
#[derive(Debug, Clone)]
pub struct PlanStep {
    pub code: Tree,
    pub left: Tree,
    pub right: Tree,
    pub weight: BigUint,
    pub symmetry: u32,
    pub coefficient: BigRational,
}

/// Topologically ordered star-product DAG over non-planar representatives,
/// grouped by grade.
#[derive(Debug, Clone)]
pub struct EvaluationPlan {
    pub order: usize,
    pub steps: Vec<PlanStep>,
}

impl EvaluationPlan {
    pub fn steps_of_grade(&self, grade: usize) -> impl Iterator<Item = &PlanStep> {
        self.steps.iter().filter(move |s| s.code.grade() == grade)
    }
}

/// Builds the order-N plan from the non-planar enumeration; children are
/// the root split of each canonical representative.
pub fn build_plan(order: usize) -> Result<EvaluationPlan, SolverError> {
    build_plan_capped(order, DEFAULT_GRADE_CAP)
}

pub fn build_plan_capped(order: usize, cap: usize) -> Result<EvaluationPlan, SolverError> {
    if order == 0 {
        return Err(SolverError::InvalidConfig(
            "plan order must be at least 1".into(),
        ));
    }
    let by_grade = enumerate_nonplanar_upto(order, cap)?;
    let mut steps = Vec::new();
    let mut factorial = BigInt::one();
    for (grade, entries) in by_grade.iter().enumerate().skip(1) {
        factorial *= BigInt::from(grade);
        for e in entries {
            let numerator =
                BigInt::from(e.triple.weight.clone()) * (BigInt::one() << e.triple.symmetry);
            steps.push(PlanStep {
                code: e.triple.tree.clone(),
                left: e.left.clone(),
                right: e.right.clone(),
                weight: e.triple.weight.clone(),
                symmetry: e.triple.symmetry,
                coefficient: BigRational::new(numerator, factorial.clone()),
            });
        }
    }
    Ok(EvaluationPlan { order, steps })
}

/// Named initial data for configuration files, or explicit samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// exp(-x)/x, singular at the origin, finite on the shifted nodes
    ExpOverX,
    /// exp(-x)
    Exp,
    /// explicit node samples
    Samples(Vec<f64>),
}

impl InitialData {
    pub fn sample(&self, grid: GridSpec) -> Result<GridFunction, SolverError> {
        match self {
            InitialData::ExpOverX => Ok(GridFunction::sample(grid, |x| (-x).exp() / x)),
            InitialData::Exp => Ok(GridFunction::sample(grid, |x| (-x).exp())),
            InitialData::Samples(values) => GridFunction::from_values(grid, values.clone())
                .map_err(SolverError::Spectral),
        }
    }
}

/// Complete description of one solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    /// expansion order N
    pub order: usize,
    /// number of uniform time steps M
    pub steps: usize,
    /// global horizon T; dt = T / M
    pub horizon: f64,
    pub initial: InitialData,
    /// record the state every k steps (0 = never)
    #[serde(default)]
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.steps == 0 {
            return Err(SolverError::InvalidConfig(
                "steps must be at least 1".into(),
            ));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(SolverError::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.order == 0 || self.order > DEFAULT_GRADE_CAP {
            return Err(SolverError::InvalidConfig(format!(
                "order must lie in 1..={DEFAULT_GRADE_CAP}, got {}",
                self.order
            )));
        }
        // Gelation guard: the unit-second-moment multiplicative kernel gels
        // at t = 1; reject horizons at or past it.
        if let KernelSpec::SeparablePower { lambda } = self.kernel {
            if lambda == 2.0 && self.horizon >= 1.0 {
                return Err(SolverError::InvalidConfig(format!(
                    "horizon {} reaches the multiplicative-kernel gelation time t = 1",
                    self.horizon
                )));
            }
        }
        Ok(())
    }
}

/// Per-step diagnostics recorded by `run`.
#[derive(Debug, Clone, Serialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    pub m0: f64,
    pub m1: f64,
    pub fft_count: u64,
    pub max_value: f64,
}

/// Result of a full run: final state, per-step diagnostics, optional
/// snapshots, and cluster-count monotonicity flags (steps where M0 grew
/// beyond tolerance; flagged, never asserted).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub final_state: GridFunction,
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<(usize, GridFunction)>,
    pub total_ffts: u64,
    pub m0_increase_flags: Vec<usize>,
}

const M0_MONOTONICITY_TOL: f64 = 1e-6;

/// One order-N step; returns the new state and the number of transforms
/// performed.
pub fn step_with_stats(
    g: &GridFunction,
    dt: f64,
    plan: &EvaluationPlan,
    kernel: &KernelSpec,
) -> Result<(GridFunction, u64), SolverError> {
    let on_grid = KernelOnGrid::sample(kernel, g.grid)?;
    step_on_grid(g, dt, plan, &on_grid)
}

pub fn step(
    g: &GridFunction,
    dt: f64,
    plan: &EvaluationPlan,
    kernel: &KernelSpec,
) -> Result<GridFunction, SolverError> {
    step_with_stats(g, dt, plan, kernel).map(|(state, _)| state)
}

fn step_on_grid(
    g: &GridFunction,
    dt: f64,
    plan: &EvaluationPlan,
    kernel: &KernelOnGrid,
) -> Result<(GridFunction, u64), SolverError> {
    if dt < 0.0 {
        return Err(SolverError::InvalidConfig(format!(
            "time step must be nonnegative, got {dt}"
        )));
    }
    let grid = g.grid;
    let n = grid.modes();
    let nodes = grid.nodes();
    let per_build = FactorTransforms::transforms_per_build(kernel);
    let mut ffts: u64 = 0;

    let mut slots: Vec<(Tree, FactorTransforms)> = Vec::with_capacity(plan.steps.len() + 1);
    let data_transforms = FactorTransforms::build(g, kernel)?;
    ffts += per_build;
    slots.push((Tree::leaf(), data_transforms));
    let find = |slots: &[(Tree, FactorTransforms)], code: &Tree| -> usize {
        slots
            .iter()
            .position(|(t, _)| t == code)
            .expect("plan children precede their parents")
    };

    let mut out = g.values.clone();
    let mut dt_pow = 1.0f64;
    for grade in 1..=plan.order {
        dt_pow *= dt;
        let top = grade == plan.order;
        let mut spectral_acc: Option<SpectralFunction> = None;
        let mut physical_acc = vec![0.0f64; n];
        for plan_step in plan.steps_of_grade(grade) {
            let li = find(&slots, &plan_step.left);
            let ri = find(&slots, &plan_step.right);
            let xi = star_from_transforms(&slots[li].1, &slots[ri].1, kernel)?;
            let scale = plan_step.weight.to_f64().unwrap_or(f64::NAN)
                * (plan_step.symmetry as f64).exp2();
            if top {
                // accumulate spectrally; a single inverse transform closes
                // the grade
                let acc = spectral_acc.get_or_insert_with(|| SpectralFunction::zeros(grid));
                for (a, x) in acc.values.iter_mut().zip(&xi.values) {
                    *a += scale * x;
                }
            } else {
                // physical intermediate, needed as a child above
                let raw = inverse_transform(&xi);
                ffts += 1;
                let physical = GridFunction {
                    grid,
                    values: raw
                        .values
                        .iter()
                        .zip(&nodes)
                        .map(|(&v, &x)| v / x)
                        .collect(),
                };
                for (acc, v) in physical_acc.iter_mut().zip(&physical.values) {
                    *acc += scale * v;
                }
                let transforms = FactorTransforms::build(&physical, kernel)?;
                ffts += per_build;
                slots.push((plan_step.code.clone(), transforms));
            }
        }
        let grade_term: Vec<f64> = if top {
            let acc = spectral_acc.expect("order >= 1 has top-grade steps");
            let raw = inverse_transform(&acc);
            ffts += 1;
            raw.values
                .iter()
                .zip(&nodes)
                .map(|(&v, &x)| v / x)
                .collect()
        } else {
            physical_acc
        };
        let factorial: f64 = (1..=grade).map(|k| k as f64).product();
        let weight = dt_pow / factorial;
        for (o, term) in out.iter_mut().zip(&grade_term) {
            *o += weight * term;
        }
    }

    let state = GridFunction { grid, values: out };
    if !state.is_finite() {
        return Err(SolverError::NonFiniteValue { step: 0 });
    }
    Ok((state, ffts))
}

/// Marches the configured number of steps from the sampled initial data.
pub fn run(config: &SolverConfig) -> Result<Trajectory, SolverError> {
    config.validate()?;
    let plan = build_plan(config.order)?;
    let kernel = KernelOnGrid::sample(&config.kernel, config.grid)?;
    let mut state = config.initial.sample(config.grid)?;
    if !state.is_finite() {
        return Err(SolverError::InvalidConfig(
            "initial data contains non-finite samples".into(),
        ));
    }
    let dt = config.dt();
    let mut diagnostics = Vec::with_capacity(config.steps + 1);
    diagnostics.push(StepDiagnostics {
        step: 0,
        time: 0.0,
        m0: moment(&state, 0),
        m1: moment(&state, 1),
        fft_count: 0,
        max_value: state.values.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
    });
    let mut snapshots = Vec::new();
    let mut total_ffts = 0u64;
    let mut m0_increase_flags = Vec::new();
    let mut prev_m0 = diagnostics[0].m0;
    for index in 1..=config.steps {
        let (next, ffts) = step_on_grid(&state, dt, &plan, &kernel).map_err(|e| match e {
            SolverError::NonFiniteValue { .. } => SolverError::NonFiniteValue { step: index },
            other => other,
        })?;
        state = next;
        total_ffts += ffts;
        let m0 = moment(&state, 0);
        if m0 > prev_m0 * (1.0 + M0_MONOTONICITY_TOL) {
            m0_increase_flags.push(index);
        }
        prev_m0 = m0;
        diagnostics.push(StepDiagnostics {
            step: index,
            time: index as f64 * dt,
            m0,
            m1: moment(&state, 1),
            fft_count: ffts,
            max_value: state.values.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
        });
        if config.snapshot_every > 0 && index % config.snapshot_every == 0 {
            snapshots.push((index, state.clone()));
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        final_state: state,
        diagnostics,
        snapshots,
        total_ffts,
        m0_increase_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_nonplanar;
    use num::Zero;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn t(word: &str) -> Tree {
        Tree::parse(word).unwrap()
    }

    #[test]
    fn plan_examples() {
        let p3 = build_plan(3).unwrap();
        let got: Vec<(String, String, String, BigRational)> = p3
            .steps
            .iter()
            .map(|s| {
                (
                    s.code.to_string(),
                    s.left.to_string(),
                    s.right.to_string(),
                    s.coefficient.clone(),
                )
            })
            .collect();
        assert_eq!(
            got,
            vec![
                ("1".into(), "0".into(), "0".into(), rat(1, 1)),
                ("12".into(), "0".into(), "1".into(), rat(1, 1)),
                ("123".into(), "0".into(), "12".into(), rat(4, 6)),
                ("212".into(), "1".into(), "1".into(), rat(2, 6)),
            ]
        );

        let p4 = build_plan(4).unwrap();
        let grade4: Vec<(String, BigRational)> = p4
            .steps_of_grade(4)
            .map(|s| (s.code.to_string(), s.coefficient.clone()))
            .collect();
        assert_eq!(
            grade4,
            vec![
                ("1234".into(), rat(8, 24)),
                ("1323".into(), rat(4, 24)),
                ("2123".into(), rat(12, 24)),
            ]
        );

        let p1 = build_plan(1).unwrap();
        assert_eq!(p1.steps.len(), 1);
        assert_eq!(p1.steps[0].code, t("1"));
        assert_eq!(p1.steps[0].coefficient, rat(1, 1));
    }

    #[test]
    fn plan_children_are_canonical_and_precede_parents() {
        let plan = build_plan(6).unwrap();
        for (i, s) in plan.steps.iter().enumerate() {
            assert_eq!(s.left.graft(&s.right), s.code, "step {}", s.code);
            assert_eq!(s.left.canonical(), s.left);
            assert_eq!(s.right.canonical(), s.right);
            for child in [&s.left, &s.right] {
                if !child.is_leaf() {
                    assert!(
                        plan.steps[..i].iter().any(|p| &p.code == child),
                        "child {child} of {} missing",
                        s.code
                    );
                }
            }
        }
        // per grade, the coefficients sum to 1 (the weight-sum identity)
        for grade in 1..=6 {
            let sum: BigRational = plan
                .steps_of_grade(grade)
                .map(|s| s.coefficient.clone())
                .fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(sum, rat(1, 1), "grade {grade}");
        }
    }

    #[test]
    fn plan_matches_nonplanar_tables() {
        let plan = build_plan(6).unwrap();
        for grade in 4..=6 {
            let table = enumerate_nonplanar(grade).unwrap();
            let steps: Vec<_> = plan.steps_of_grade(grade).collect();
            assert_eq!(steps.len(), table.len());
            for (s, e) in steps.iter().zip(&table.entries) {
                assert_eq!(s.code, e.tree);
                assert_eq!(s.weight, e.weight);
                assert_eq!(s.symmetry, e.symmetry);
            }
        }
    }

    #[test]
    fn symbolic_step_reproduces_the_series() {
        // replace the star product by formal grafting over exact rationals:
        // one step from the unit vector must reproduce the canonical-folded
        // solution coefficients
        use crate::series::{solution_coefficients, SeriesVector};
        use std::collections::HashMap;

        let n = 6usize;
        let dt = rat(3, 7);
        let plan = build_plan(n).unwrap();

        let mut symbolic: HashMap<Tree, SeriesVector> = HashMap::new();
        let mut unit = SeriesVector::new(n);
        unit.set(Tree::leaf(), rat(1, 1));
        symbolic.insert(Tree::leaf(), unit.clone());

        let mut result = unit.clone();
        for s in &plan.steps {
            let xi = symbolic[&s.left].graft(&symbolic[&s.right], n);
            symbolic.insert(s.code.clone(), xi.clone());
            let grade = s.code.grade();
            let scale = s.coefficient.clone() * num::pow::pow(dt.clone(), grade);
            result = result.add(&xi.scale(&scale));
        }

        // fold the exact solution onto representatives, in plain
        // coefficients c/grade!
        let exact = solution_coefficients(&dt, n).unwrap();
        let mut folded = SeriesVector::new(n);
        for (tree, c) in exact.iter() {
            let fact: BigInt = (1..=tree.grade()).map(BigInt::from).product::<BigInt>();
            let fact = if tree.grade() == 0 { BigInt::one() } else { fact };
            folded.add_to(tree.canonical(), &(c / BigRational::from(fact)));
        }
        assert_eq!(result, folded);
    }

    fn config(order: usize, steps: usize) -> SolverConfig {
        SolverConfig {
            grid: GridSpec::new(100.0, 1 << 10).unwrap(),
            kernel: KernelSpec::SeparablePower { lambda: 2.0 },
            order,
            steps,
            horizon: 0.5,
            initial: InitialData::ExpOverX,
            snapshot_every: 0,
        }
    }

    #[test]
    fn zero_dt_returns_input() {
        let grid = GridSpec::new(100.0, 1 << 8).unwrap();
        let g = GridFunction::sample(grid, |x| (-x).exp() / x);
        let plan = build_plan(3).unwrap();
        let out = step(&g, 0.0, &plan, &KernelSpec::SeparablePower { lambda: 2.0 }).unwrap();
        assert_eq!(out.values, g.values);
    }

    #[test]
    fn first_order_step_matches_analytic_right_side() {
        // K = x y, g0 = exp(-x)/x: the right side is exp(-x) (x/2 - 1)
        let grid = GridSpec::new(100.0, 1 << 14).unwrap();
        let g = GridFunction::sample(grid, |x| (-x).exp() / x);
        let plan = build_plan(1).unwrap();
        let dt = 1e-3;
        let out = step(&g, dt, &plan, &KernelSpec::SeparablePower { lambda: 2.0 }).unwrap();
        let update: Vec<f64> = out
            .values
            .iter()
            .zip(&g.values)
            .map(|(&a, &b)| (a - b) / dt)
            .collect();
        let h = grid.spacing();
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &u) in update.iter().enumerate() {
            let x = grid.node(i);
            let rhs = (-x).exp() * (0.5 * x - 1.0);
            num += h * (u - rhs).powi(2);
            den += h * rhs.powi(2);
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-3, "relative error {rel}");
    }

    #[test]
    fn third_order_step_fft_budget() {
        let grid = GridSpec::new(100.0, 1 << 10).unwrap();
        let g = GridFunction::sample(grid, |x| (-x).exp() / x);
        let plan = build_plan(3).unwrap();
        let (_, ffts) =
            step_with_stats(&g, 0.01, &plan, &KernelSpec::SeparablePower { lambda: 2.0 })
                .unwrap();
        assert!(ffts <= 10, "N=3 step used {ffts} transforms");
        assert_eq!(ffts, 9);
    }

    #[test]
    fn single_step_run_equals_step() {
        let mut cfg = config(3, 1);
        cfg.horizon = 0.25;
        let trajectory = run(&cfg).unwrap();
        let g = cfg.initial.sample(cfg.grid).unwrap();
        let plan = build_plan(cfg.order).unwrap();
        let direct = step(&g, 0.25, &plan, &cfg.kernel).unwrap();
        assert_eq!(trajectory.final_state.values, direct.values);
        assert_eq!(trajectory.diagnostics.len(), 2);
    }

    #[test]
    fn run_converges_to_bessel_solution() {
        let cfg = SolverConfig {
            grid: GridSpec::new(100.0, 1 << 14).unwrap(),
            kernel: KernelSpec::SeparablePower { lambda: 2.0 },
            order: 3,
            steps: 64,
            horizon: 0.5,
            initial: InitialData::ExpOverX,
            snapshot_every: 0,
        };
        let trajectory = run(&cfg).unwrap();
        let exact = GridFunction::sample(cfg.grid, |x| {
            crate::exact::multiplicative_bessel(x, 0.5).unwrap()
        });
        let h = cfg.grid.spacing();
        let num: f64 = trajectory
            .final_state
            .values
            .iter()
            .zip(&exact.values)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let den: f64 = exact.values.iter().map(|v| v.powi(2)).sum();
        let rel = ((h * num) / (h * den)).sqrt();
        assert!(rel < 1e-4, "relative error {rel}");
    }

    #[test]
    fn mass_is_conserved_for_the_nongelling_kernel() {
        let cfg = SolverConfig {
            grid: GridSpec::new(100.0, 1 << 12).unwrap(),
            kernel: KernelSpec::SeparablePower { lambda: 2.0 / 3.0 },
            order: 3,
            steps: 32,
            horizon: 1.5,
            initial: InitialData::Exp,
            snapshot_every: 0,
        };
        let trajectory = run(&cfg).unwrap();
        let m1_0 = trajectory.diagnostics[0].m1;
        for d in &trajectory.diagnostics {
            assert!(
                ((d.m1 - m1_0) / m1_0).abs() < 1e-3,
                "mass drift at step {}: {}",
                d.step,
                (d.m1 - m1_0) / m1_0
            );
        }
        assert!(trajectory.m0_increase_flags.is_empty());
        // cluster count strictly decreases under coagulation
        assert!(trajectory.diagnostics.last().unwrap().m0 < trajectory.diagnostics[0].m0);
    }

    #[test]
    fn gelation_guard_rejects_multiplicative_horizon() {
        let mut cfg = config(3, 10);
        cfg.horizon = 1.0;
        assert!(matches!(
            run(&cfg),
            Err(SolverError::InvalidConfig(_))
        ));
        cfg.horizon = 0.99;
        cfg.grid = GridSpec::new(100.0, 1 << 8).unwrap();
        cfg.steps = 4;
        assert!(run(&cfg).is_ok());
    }

    #[test]
    fn non_finite_states_are_reported() {
        let grid = GridSpec::new(100.0, 1 << 8).unwrap();
        let huge = GridFunction::sample(grid, |_| 1e308);
        let plan = build_plan(2).unwrap();
        let err = step(&huge, 1.0, &plan, &KernelSpec::SeparablePower { lambda: 2.0 });
        assert!(matches!(err, Err(SolverError::NonFiniteValue { .. })));
    }

    #[test]
    fn snapshots_are_recorded() {
        let mut cfg = config(2, 8);
        cfg.grid = GridSpec::new(100.0, 1 << 8).unwrap();
        cfg.snapshot_every = 4;
        let trajectory = run(&cfg).unwrap();
        let indexes: Vec<usize> = trajectory.snapshots.iter().map(|(i, _)| *i).collect();
        assert_eq!(indexes, vec![4, 8]);
    }
}
