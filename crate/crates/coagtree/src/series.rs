//! Exponential tree series as exact coefficient vectors, and the matrix
//! form of the branching operator.
//!
//! A series holds one rational coefficient per tree; the represented
//! element is sum of coeff/grade! times the tree, so the stored numbers
//! are the natural ones (the time-t solution stores weight * t^grade and
//! the branching matrix acts with plain integer multiplicities — the
//! factorial bookkeeping and the grade scaling cancel in these
//! coordinates).
//!
//! Everything here is exact integer/rational arithmetic; this module is
//! the ground-truth layer the floating-point solver is checked against.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::tree::{enumerate_planar_upto, Tree, TreeError, DEFAULT_GRADE_CAP};

/// Sparse coefficient vector over trees of grade <= max_grade, in the
/// exponential basis (tree divided by grade factorial). Missing key means
/// zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesVector {
    max_grade: usize,
    coeffs: BTreeMap<Tree, BigRational>,
}

impl SeriesVector {
    pub fn new(max_grade: usize) -> SeriesVector {
        SeriesVector {
            max_grade,
            coeffs: BTreeMap::new(),
        }
    }

    /// The data vector: coefficient 1 on the leaf.
    pub fn unit(max_grade: usize) -> SeriesVector {
        let mut v = SeriesVector::new(max_grade);
        v.set(Tree::leaf(), BigRational::one());
        v
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }

    pub fn get(&self, tree: &Tree) -> BigRational {
        self.coeffs.get(tree).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, tree: Tree, value: BigRational) {
        assert!(
            tree.grade() <= self.max_grade,
            "tree grade {} exceeds series max grade {}",
            tree.grade(),
            self.max_grade
        );
        if value.is_zero() {
            self.coeffs.remove(&tree);
        } else {
            self.coeffs.insert(tree, value);
        }
    }

    pub fn add_to(&mut self, tree: Tree, value: &BigRational) {
        let sum = self.get(&tree) + value;
        self.set(tree, sum);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, factor: &BigRational) -> SeriesVector {
        let mut out = SeriesVector::new(self.max_grade);
        for (t, c) in &self.coeffs {
            out.set(t.clone(), c * factor);
        }
        out
    }

    pub fn add(&self, other: &SeriesVector) -> SeriesVector {
        let mut out = self.clone();
        out.max_grade = self.max_grade.max(other.max_grade);
        for (t, c) in &other.coeffs {
            out.add_to(t.clone(), c);
        }
        out
    }

    /// Restriction to the trees of one grade.
    pub fn slice(&self, grade: usize) -> SeriesVector {
        let mut out = SeriesVector::new(self.max_grade);
        for (t, c) in &self.coeffs {
            if t.grade() == grade {
                out.set(t.clone(), c.clone());
            }
        }
        out
    }

    /// Bilinear root grafting of two coefficient vectors; terms that would
    /// exceed max_grade are dropped.
    pub fn graft(&self, other: &SeriesVector, max_grade: usize) -> SeriesVector {
        let mut out = SeriesVector::new(max_grade);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if a.grade() + b.grade() + 1 > max_grade {
                    continue;
                }
                out.add_to(a.graft(b), &(ca * cb));
            }
        }
        out
    }

    /// Folds every planar coefficient onto the canonical representative of
    /// its twist class.
    pub fn fold_nonplanar(&self) -> SeriesVector {
        let mut out = SeriesVector::new(self.max_grade);
        for (t, c) in &self.coeffs {
            out.add_to(t.canonical(), c);
        }
        out
    }

    /// JSON object mapping word-codes to numerator/denominator strings.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: BTreeMap<String, SerializedRational> = self
            .coeffs
            .iter()
            .map(|(t, c)| {
                (
                    t.to_string(),
                    SerializedRational {
                        num: c.numer().to_string(),
                        den: c.denom().to_string(),
                    },
                )
            })
            .collect();
        serde_json::json!({ "max_grade": self.max_grade, "coeffs": coeffs })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<SeriesVector, String> {
        #[derive(Deserialize)]
        struct Repr {
            max_grade: usize,
            coeffs: BTreeMap<String, SerializedRational>,
        }
        let repr: Repr = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        let mut out = SeriesVector::new(repr.max_grade);
        for (word, frac) in repr.coeffs {
            let tree = Tree::parse(&word).map_err(|e| e.to_string())?;
            let num: BigInt = frac.num.parse().map_err(|_| "bad numerator".to_string())?;
            let den: BigInt = frac.den.parse().map_err(|_| "bad denominator".to_string())?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            out.set(tree, BigRational::new(num, den));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct SerializedRational {
    num: String,
    den: String,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    num::integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// The weighted grade slice: coefficient weight(tau) on every tree of
/// grade n, zero elsewhere.
pub fn grade_slice(n: usize) -> Result<SeriesVector, TreeError> {
    grade_slice_capped(n, DEFAULT_GRADE_CAP)
}

pub fn grade_slice_capped(n: usize, cap: usize) -> Result<SeriesVector, TreeError> {
    let forest = crate::tree::enumerate_planar_capped(n, cap)?;
    let mut out = SeriesVector::new(n);
    for e in &forest.entries {
        out.set(e.tree.clone(), BigRational::from(BigInt::from(e.weight.clone())));
    }
    Ok(out)
}

/// The time-t solution coefficients: weight(tau) * t^grade(tau) on every
/// tree of grade <= n.
pub fn solution_coefficients(t: &BigRational, n: usize) -> Result<SeriesVector, TreeError> {
    let forests = enumerate_planar_upto(n, DEFAULT_GRADE_CAP.max(n))?;
    let mut out = SeriesVector::new(n);
    let mut t_pow = BigRational::one();
    for forest in &forests {
        for e in &forest.entries {
            out.set(
                e.tree.clone(),
                BigRational::from(BigInt::from(e.weight.clone())) * &t_pow,
            );
        }
        t_pow *= t;
    }
    Ok(out)
}

/// Sparse integer matrix of the graded branching operator over the
/// tree-ordered basis: entry (tau', tau) is the multiplicity of tau' among
/// the branch extensions of tau. Strictly lower block-triangular by grade,
/// hence nilpotent at any truncation.
#[derive(Debug, Clone)]
pub struct BranchMatrix {
    max_grade: usize,
    trees: Vec<Tree>,
    position: HashMap<Tree, usize>,
    // per column: (row index, multiplicity)
    columns: Vec<Vec<(usize, u64)>>,
}

impl BranchMatrix {
    pub fn build(max_grade: usize) -> Result<BranchMatrix, TreeError> {
        Self::build_capped(max_grade, DEFAULT_GRADE_CAP)
    }

    pub fn build_capped(max_grade: usize, cap: usize) -> Result<BranchMatrix, TreeError> {
        let forests = enumerate_planar_upto(max_grade, cap)?;
        let trees: Vec<Tree> = forests
            .iter()
            .flat_map(|f| f.trees().cloned())
            .collect();
        let position: HashMap<Tree, usize> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut columns = vec![Vec::new(); trees.len()];
        for (col, tree) in trees.iter().enumerate() {
            if tree.grade() == max_grade {
                continue; // branch targets would exceed the truncation
            }
            let mut counts: BTreeMap<Tree, u64> = BTreeMap::new();
            for target in tree.branch() {
                *counts.entry(target).or_default() += 1;
            }
            for (target, mult) in counts {
                columns[col].push((position[&target], mult));
            }
        }
        Ok(BranchMatrix {
            max_grade,
            trees,
            position,
            columns,
        })
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }

    pub fn dim(&self) -> usize {
        self.trees.len()
    }

    pub fn tree_at(&self, index: usize) -> &Tree {
        &self.trees[index]
    }

    pub fn index_of(&self, tree: &Tree) -> Option<usize> {
        self.position.get(tree).copied()
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    /// Action of the graded operator: plain multiplicities in these
    /// coordinates.
    pub fn apply(&self, v: &SeriesVector) -> SeriesVector {
        let mut out = SeriesVector::new(self.max_grade);
        for (tree, coeff) in v.iter() {
            let Some(col) = self.index_of(tree) else {
                continue;
            };
            for (row, mult) in &self.columns[col] {
                out.add_to(
                    self.trees[*row].clone(),
                    &(coeff * BigRational::from(BigInt::from(*mult))),
                );
            }
        }
        out
    }

    /// Action of the non-graded operator: the graded action followed by the
    /// grade of the target tree.
    pub fn apply_scaled(&self, v: &SeriesVector) -> SeriesVector {
        let mut out = SeriesVector::new(self.max_grade);
        for (tree, coeff) in self.apply(v).iter() {
            out.set(
                tree.clone(),
                coeff * BigRational::from(BigInt::from(tree.grade())),
            );
        }
        out
    }

    /// k-fold graded action.
    pub fn power(&self, k: usize, v: &SeriesVector) -> SeriesVector {
        let mut cur = v.clone();
        for _ in 0..k {
            cur = self.apply(&cur);
        }
        cur
    }
}

/// Resolvent form of the solution: (I - t B)^{-1} applied to the unit
/// vector by forward substitution over grades — the matrix raises grade by
/// one, so the Neumann sum terminates at the truncation.
pub fn resolvent_solve(t: &BigRational, n: usize) -> Result<SeriesVector, TreeError> {
    let matrix = BranchMatrix::build_capped(n, DEFAULT_GRADE_CAP.max(n))?;
    let mut out = SeriesVector::unit(n);
    let mut slice = SeriesVector::unit(n);
    for _ in 1..=n {
        slice = matrix.apply(&slice).scale(t);
        out = out.add(&slice);
    }
    Ok(out)
}

/// Exponential form of the solution: sum over k of t^k/k! times the k-th
/// power of the non-graded operator applied to the unit vector.
pub fn exponential_solution(t: &BigRational, n: usize) -> Result<SeriesVector, TreeError> {
    let matrix = BranchMatrix::build_capped(n, DEFAULT_GRADE_CAP.max(n))?;
    let mut out = SeriesVector::new(n);
    let mut term = SeriesVector::unit(n);
    let mut t_pow = BigRational::one();
    for k in 0..=n {
        out = out.add(&term.scale(&(&t_pow / BigRational::from(factorial(k)))));
        term = matrix.apply_scaled(&term);
        t_pow *= t;
    }
    Ok(out)
}

/// Report of the grafting identity at one grade: the weighted grade-(n+1)
/// slice against the binomial sum of grafted lower slices.
#[derive(Debug, Clone)]
pub struct GraftingIdentityReport {
    pub grade: usize,
    pub holds: bool,
    pub expected: SeriesVector,
    pub actual: SeriesVector,
}

/// Checks that the grade-(n+1) weighted slice equals
/// sum_k binomial(n,k) graft(slice(n-k), slice(k)).
pub fn check_grafting_identity(n: usize) -> Result<GraftingIdentityReport, TreeError> {
    let slices: Vec<SeriesVector> = (0..=n)
        .map(|k| grade_slice_capped(k, DEFAULT_GRADE_CAP.max(n + 1)))
        .collect::<Result<_, _>>()?;
    let mut actual = SeriesVector::new(n + 1);
    for k in 0..=n {
        let coeff = BigRational::from(big_binomial(n, k));
        actual = actual.add(&slices[n - k].graft(&slices[k], n + 1).scale(&coeff));
    }
    let expected = grade_slice_capped(n + 1, DEFAULT_GRADE_CAP.max(n + 1))?;
    Ok(GraftingIdentityReport {
        grade: n,
        holds: actual == expected,
        expected,
        actual,
    })
}

/// Per-grade partial-sum diagnostics for the series with unit data bound:
/// the grade-n term sums to t^n exactly, dominated by Lambda^n whenever
/// |t| <= Lambda. Reports both sequences and the observed tail ratio; it
/// does not assert convergence for any concrete kernel.
#[derive(Debug, Clone)]
pub struct ConvergenceDiagnostic {
    pub t: f64,
    pub lambda: f64,
    /// sum over grade-n trees of weight/grade! * t^n, exact then rounded
    pub grade_terms: Vec<f64>,
    /// Lambda^n
    pub geometric_bounds: Vec<f64>,
    /// max over n of |term_{n+1}| / |term_n|
    pub observed_tail_ratio: f64,
    /// every |term_n| <= bound_n
    pub dominated: bool,
}

pub fn convergence_diagnostic(
    t: f64,
    lambda: f64,
    max_grade: usize,
) -> Result<ConvergenceDiagnostic, TreeError> {
    let forests = enumerate_planar_upto(max_grade, DEFAULT_GRADE_CAP.max(max_grade))?;
    let mut grade_terms = Vec::with_capacity(max_grade + 1);
    for forest in &forests {
        let weight_sum: BigInt = forest
            .entries
            .iter()
            .map(|e| BigInt::from(e.weight.clone()))
            .sum();
        let ratio = BigRational::new(weight_sum, factorial(forest.grade));
        let base = rational_to_f64(&ratio);
        grade_terms.push(base * t.powi(forest.grade as i32));
    }
    let geometric_bounds: Vec<f64> = (0..=max_grade).map(|n| lambda.powi(n as i32)).collect();
    let observed_tail_ratio = grade_terms
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                0.0
            } else {
                (w[1] / w[0]).abs()
            }
        })
        .fold(0.0, f64::max);
    let dominated = grade_terms
        .iter()
        .zip(&geometric_bounds)
        .all(|(term, bound)| term.abs() <= bound + 1e-15);
    Ok(ConvergenceDiagnostic {
        t,
        lambda,
        grade_terms,
        geometric_bounds,
        observed_tail_ratio,
        dominated,
    })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    let fnum = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let fden = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    if r.is_negative() {
        -(fnum.abs() / fden.abs())
    } else {
        fnum.abs() / fden.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(word: &str) -> Tree {
        Tree::parse(word).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grade_slice_examples() {
        let s3 = grade_slice(3).unwrap();
        let got: Vec<(String, BigRational)> = s3
            .iter()
            .map(|(tr, c)| (tr.to_string(), c.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("123".to_string(), rat(1, 1)),
                ("132".to_string(), rat(1, 1)),
                ("212".to_string(), rat(2, 1)),
                ("231".to_string(), rat(1, 1)),
                ("321".to_string(), rat(1, 1)),
            ]
        );
        let s0 = grade_slice(0).unwrap();
        assert_eq!(s0.get(&Tree::leaf()), rat(1, 1));

        let s4 = grade_slice(4).unwrap();
        assert_eq!(s4.iter().count(), 14);
        for (tree, coeff) in s4.iter() {
            assert_eq!(
                coeff,
                &BigRational::from(BigInt::from(tree.weight())),
                "tree {tree}"
            );
        }
    }

    #[test]
    fn branch_matrix_examples() {
        let m = BranchMatrix::build(3).unwrap();
        let col_1 = m.index_of(&t("1")).unwrap();
        let row_12 = m.index_of(&t("12")).unwrap();
        let row_21 = m.index_of(&t("21")).unwrap();
        assert_eq!(m.entry(row_12, col_1), 1);
        assert_eq!(m.entry(row_21, col_1), 1);

        let row_212 = m.index_of(&t("212")).unwrap();
        let col_12 = m.index_of(&t("12")).unwrap();
        let col_21 = m.index_of(&t("21")).unwrap();
        assert_eq!(m.entry(row_212, col_12), 1);
        assert_eq!(m.entry(row_212, col_21), 1);

        let m1 = BranchMatrix::build(1).unwrap();
        assert_eq!(m1.dim(), 2);
        assert_eq!(m1.entry(1, 0), 1);
        assert_eq!(m1.entry(0, 0), 0);
        assert_eq!(m1.entry(0, 1), 0);
        assert_eq!(m1.entry(1, 1), 0);
    }

    #[test]
    fn matrix_power_examples() {
        let m = BranchMatrix::build(3).unwrap();
        let e0 = SeriesVector::unit(3);

        let once = m.power(1, &e0);
        assert_eq!(once.get(&t("1")), rat(1, 1));
        assert_eq!(once.iter().count(), 1);

        let thrice = m.power(3, &e0);
        let grade3: Vec<(String, BigRational)> = thrice
            .iter()
            .map(|(tr, c)| (tr.to_string(), c.clone()))
            .collect();
        assert_eq!(
            grade3,
            vec![
                ("123".to_string(), rat(1, 1)),
                ("132".to_string(), rat(1, 1)),
                ("212".to_string(), rat(2, 1)),
                ("231".to_string(), rat(1, 1)),
                ("321".to_string(), rat(1, 1)),
            ]
        );

        assert_eq!(m.power(0, &e0), e0);
    }

    #[test]
    fn displayed_matrix_block() {
        // top-left 10x7 block over the tree-ordered basis
        let golden: [[u64; 7]; 10] = [
            [0, 0, 0, 0, 0, 0, 0],
            [1, 0, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0, 0],
            [0, 0, 1, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 0, 1, 0, 0],
        ];
        let m = BranchMatrix::build(4).unwrap();
        for (r, row) in golden.iter().enumerate() {
            for (c, &want) in row.iter().enumerate() {
                assert_eq!(m.entry(r, c), want, "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn solution_examples() {
        let s = solution_coefficients(&rat(1, 1), 2).unwrap();
        assert_eq!(s.get(&Tree::leaf()), rat(1, 1));
        assert_eq!(s.get(&t("1")), rat(1, 1));
        assert_eq!(s.get(&t("12")), rat(1, 1));
        assert_eq!(s.get(&t("21")), rat(1, 1));

        let s0 = solution_coefficients(&rat(0, 1), 3).unwrap();
        assert_eq!(s0, SeriesVector::unit(3));

        let half = solution_coefficients(&rat(1, 2), 3).unwrap();
        assert_eq!(half.get(&t("212")), rat(2, 8));
    }

    #[test]
    fn three_solution_forms_agree() {
        for t_val in [rat(1, 1), rat(1, 2), rat(1, 3)] {
            for n in 0..=7 {
                let direct = solution_coefficients(&t_val, n).unwrap();
                let resolvent = resolvent_solve(&t_val, n).unwrap();
                let exponential = exponential_solution(&t_val, n).unwrap();
                assert_eq!(direct, resolvent, "resolvent, t={t_val}, N={n}");
                assert_eq!(direct, exponential, "exp form, t={t_val}, N={n}");
            }
        }
    }

    #[test]
    fn resolvent_matches_direct_at_third() {
        let direct = solution_coefficients(&rat(1, 3), 6).unwrap();
        assert_eq!(resolvent_solve(&rat(1, 3), 6).unwrap(), direct);
    }

    #[test]
    fn grafting_identity_examples() {
        let zero = check_grafting_identity(0).unwrap();
        assert!(zero.holds);

        let two = check_grafting_identity(2).unwrap();
        assert!(two.holds);
        assert_eq!(two.actual.get(&t("212")), rat(2, 1));
        assert_eq!(two.actual.get(&t("123")), rat(1, 1));

        assert!(check_grafting_identity(6).unwrap().holds);
    }

    #[test]
    fn derivative_identity() {
        // termwise d/dt of the solution equals the non-graded action on it
        let tv = rat(2, 5);
        for n in 1..=6 {
            let m = BranchMatrix::build(n).unwrap();
            let sol = solution_coefficients(&tv, n).unwrap();
            let acted = m.apply_scaled(&sol);
            for (tree, coeff) in acted.iter() {
                // d/dt [w t^g] = g w t^{g-1}; acted lives one grade up from
                // its source, compare on trees of grade <= n reachable twice
                let g = tree.grade();
                let direct = BigRational::from(BigInt::from(tree.weight()))
                    * BigRational::from(BigInt::from(g))
                    * num::pow::pow(tv.clone(), g - 1);
                assert_eq!(coeff, &direct, "tree {tree}");
            }
        }
    }

    #[test]
    fn quadratic_identity_matches_derivative_slice() {
        // grade-(n+1) slice of the root-graft square of the solution equals
        // the derivative slice, in plain coefficients
        let tv = rat(1, 2);
        let n_max = 6usize;
        let sol = solution_coefficients(&tv, n_max).unwrap();
        // plain coefficients of the represented series: coeff / grade!
        let mut plain = SeriesVector::new(n_max + 1);
        for (tree, c) in sol.iter() {
            plain.set(tree.clone(), c / BigRational::from(factorial(tree.grade())));
        }
        let square = plain.graft(&plain, n_max + 1);
        for n in 0..=n_max.saturating_sub(1) {
            let lhs = square.slice(n + 1);
            // derivative plain coefficient at grade n+1: w (n+1) t^n / (n+1)!
            let mut rhs = SeriesVector::new(n_max + 1);
            for e in &crate::tree::enumerate_planar(n + 1).unwrap().entries {
                let c = BigRational::from(BigInt::from(e.weight.clone()))
                    * num::pow::pow(tv.clone(), n)
                    * BigRational::new(BigInt::from(n + 1), factorial(n + 1));
                rhs.set(e.tree.clone(), c);
            }
            assert_eq!(lhs, rhs, "grade {}", n + 1);
        }
    }

    #[test]
    fn nilpotency_at_truncation() {
        let m = BranchMatrix::build(4).unwrap();
        let full: SeriesVector = {
            let mut v = SeriesVector::new(4);
            for f in enumerate_planar_upto(4, 12).unwrap() {
                for e in f.entries {
                    v.set(e.tree, rat(1, 1));
                }
            }
            v
        };
        assert!(m.power(5, &full).is_zero());
    }

    #[test]
    fn diagnostic_reports_geometric_domination() {
        let d = convergence_diagnostic(0.5, 0.5, 8).unwrap();
        assert!(d.dominated);
        // the grade-n term is exactly t^n under the factorial weight sum
        for (n, term) in d.grade_terms.iter().enumerate() {
            assert!((term - 0.5f64.powi(n as i32)).abs() < 1e-12);
        }
        assert!((d.observed_tail_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = solution_coefficients(&rat(1, 3), 4).unwrap();
        let json = s.to_json();
        let back = SeriesVector::from_json(&json).unwrap();
        assert_eq!(back, s);
        // spot-check the string encoding
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"num\""));
        assert!(text.contains("\"den\""));
    }
}
