//! Text renderings of solver results.

use std::fmt::Write as _;

use crate::facialred::FRTrace;
use crate::radical::RadicalReport;
use crate::scalar::Real;

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn sci_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.1e}")).collect();
    format!("[{}]", items.join(", "))
}

/// Column header shared by the reduction tables.
pub const TABLE_HEADER: [&str; 7] = [
    "name",
    "# FR",
    "face sizes",
    "max rank",
    "residual per FR",
    "DR iterations per FR",
    "final residual",
];

/// One table row for a reduction trace: the aux columns cover the accepted
/// auxiliary solves, followed by the primal solve on the minimal face.
pub fn trace_row(name: &str, t: &FRTrace) -> Vec<String> {
    let mut res = t.aux_residuals.clone();
    res.push(t.reduced_residual);
    let mut its = t.aux_iterations.clone();
    its.push(t.primal_iterations + t.polish_iterations);
    vec![
        name.to_string(),
        t.reductions().to_string(),
        list(&t.face_sizes),
        t.final_rank.to_string(),
        sci_list(&res),
        list(&its),
        format!("{:.1e}", t.primal_residual),
    ]
}

/// Left-aligned plain-text table.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let ncols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, header.to_vec());
    line(
        &mut out,
        width
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    );
    for row in rows {
        line(&mut out, row.iter().take(ncols).map(String::as_str).collect());
    }
    out
}

pub fn trace_table(name: &str, t: &FRTrace) -> String {
    render_table(&TABLE_HEADER, &[trace_row(name, t)])
}

/// Reduction table (one row per outer iteration) followed by the generators.
pub fn radical_table<T: Real>(r: &RadicalReport<T>) -> String {
    let rows: Vec<Vec<String>> = r
        .fr_traces
        .iter()
        .enumerate()
        .map(|(i, t)| trace_row(&format!("outer {}", i + 1), t))
        .collect();
    let mut out = render_table(&TABLE_HEADER, &rows);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "degree {}  kernel dim {}  max rank {}  residual {:.1e}  DR iterations {}  ideal-like {}",
        r.degree, r.kernel_dim, r.final_rank, r.residual, r.dr_iterations, r.ideal_like
    );
    if let (Some(s), Some(t)) = (r.completeness_count, r.completeness_threshold) {
        let verdict = match r.completeness {
            Some(true) => "complete",
            _ => "no conclusion",
        };
        let _ = writeln!(out, "top-degree count {s} (threshold {t}): {verdict}");
    }
    let _ = writeln!(out, "generators:");
    for g in &r.generators {
        let _ = writeln!(out, "  {}", g.to_string_rounded(8));
    }
    out
}

/// `iter,residual` CSV, iterations numbered from one.
pub fn history_csv(history: &[f64]) -> String {
    let mut out = String::from("iter,residual\n");
    for (i, r) in history.iter().enumerate() {
        let _ = writeln!(out, "{},{:e}", i + 1, r);
    }
    out
}
