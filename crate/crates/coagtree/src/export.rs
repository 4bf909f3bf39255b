//! CSV and JSON serialization of forests, grid data and trajectories.
//! Everything is written with fixed column orders and deterministic row
//! orders so identical inputs produce byte-identical files.

use std::fmt::Write;

use crate::convergence::ConvergenceStudy;
use crate::solver::Trajectory;
use crate::spectral::{GridFunction, SpectralFunction};
use crate::tree::{
    enumerate_nonplanar_upto, enumerate_planar_upto, Forest, TreeError, DEFAULT_GRADE_CAP,
};

/// Planar table for grades 0..=max_grade: grade, code, weight, symmetry.
pub fn planar_table_csv(max_grade: usize) -> Result<String, TreeError> {
    let forests = enumerate_planar_upto(max_grade, DEFAULT_GRADE_CAP)?;
    let mut out = String::from("grade,code,weight,symmetry\n");
    for forest in &forests {
        for e in &forest.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                forest.grade, e.tree, e.weight, e.symmetry
            );
        }
    }
    Ok(out)
}

/// Non-planar table for grades 0..=max_grade: grade, code, weight,
/// symmetry, and the generating graft pair.
pub fn nonplanar_table_csv(max_grade: usize) -> Result<String, TreeError> {
    let by_grade = enumerate_nonplanar_upto(max_grade, DEFAULT_GRADE_CAP)?;
    let mut out = String::from("grade,code,weight,symmetry,generation\n");
    for (grade, entries) in by_grade.iter().enumerate() {
        for e in entries {
            let generation = if grade == 0 {
                String::from("-")
            } else {
                format!("{}*{}", e.left, e.right)
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                grade, e.triple.tree, e.triple.weight, e.triple.symmetry, generation
            );
        }
    }
    Ok(out)
}

pub fn forests_to_json(forests: &[Forest]) -> serde_json::Value {
    serde_json::json!(forests
        .iter()
        .map(|f| {
            serde_json::json!({
                "grade": f.grade,
                "trees": f.entries.iter().map(|e| serde_json::json!({
                    "code": e.tree.to_string(),
                    "weight": e.weight.to_string(),
                    "symmetry": e.symmetry,
                })).collect::<Vec<_>>(),
            })
        })
        .collect::<Vec<_>>())
}

/// Node samples as `x,value` rows.
pub fn grid_function_csv(g: &GridFunction) -> String {
    let mut out = String::from("x,value\n");
    for (i, v) in g.values.iter().enumerate() {
        let _ = writeln!(out, "{:.17e},{:.17e}", g.grid.node(i), v);
    }
    out
}

/// Spectrum as `k,s_k,re,im` rows in storage order, k signed.
pub fn spectral_function_csv(f: &SpectralFunction) -> String {
    let mut out = String::from("k,s_k,re,im\n");
    for (slot, v) in f.values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e}",
            f.grid.signed_frequency_index(slot),
            f.grid.frequency(slot),
            v.re,
            v.im
        );
    }
    out
}

/// Per-step diagnostics as `step,t,m0,m1,fft_count,max_value` rows.
pub fn diagnostics_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("step,t,m0,m1,fft_count,max_value\n");
    for d in &trajectory.diagnostics {
        let _ = writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{},{:.17e}",
            d.step, d.time, d.m0, d.m1, d.fft_count, d.max_value
        );
    }
    out
}

/// Error table as `order,steps,error,note` rows.
pub fn error_table_csv(study: &ConvergenceStudy) -> String {
    let mut out = String::from("order,steps,error,note\n");
    let mut cells = study.cells.clone();
    cells.sort_by_key(|c| (c.order, c.steps));
    for c in &cells {
        let err = c
            .error
            .map(|e| format!("{e:.17e}"))
            .unwrap_or_else(|| "failed".into());
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.order,
            c.steps,
            err,
            c.note.as_deref().unwrap_or("")
        );
    }
    out
}

/// Fitted slopes as `order,slope,points_used` rows.
pub fn slopes_csv(study: &ConvergenceStudy) -> String {
    let mut out = String::from("order,slope,points_used\n");
    for f in &study.fits {
        let slope = f
            .slope
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "no_pre_floor_segment".into());
        let _ = writeln!(out, "{},{},{}", f.order, slope, f.points_used);
    }
    out
}
