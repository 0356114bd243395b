//! Fixed-format MPS writer.
//!
//! Columns are named `C0000000`, `C0000001`, ... and rows `R0000000`, ...
//! in model order, with `OBJ` as the objective row. Integer columns are
//! wrapped in `MARKER INTORG/INTEND` pairs. Every column gets explicit `LO`
//! and `UP` bounds. Numbers are written in the shortest form that round-trips;
//! a number longer than the 12-character field simply runs over it.

use super::{MilpError, MilpModel, Sense};
use std::fmt::Write as _;
use std::path::Path;

pub fn column_name(idx: usize) -> String {
    format!("C{idx:07}")
}

pub fn row_name(idx: usize) -> String {
    format!("R{idx:07}")
}

fn num(v: f64) -> String {
    format!("{v:>12}")
}

fn line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str) {
    let text = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4}");
    out.push_str(text.trim_end());
    out.push('\n');
}

pub fn to_mps_string(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {}", if model.name.is_empty() { "MODEL" } else { &model.name });
    out.push_str("ROWS\n");
    line(&mut out, "N", "OBJ", "", "");
    for (i, row) in model.rows.iter().enumerate() {
        let s = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        line(&mut out, s, &row_name(i), "", "");
    }
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, row) in model.rows.iter().enumerate() {
        for &(v, a) in &row.coeffs {
            by_col[v].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut markers = 0;
    for (v, var) in model.vars.iter().enumerate() {
        if var.integer != in_int {
            let kind = if var.integer { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    M{markers:07}  'MARKER'                 {kind}");
            markers += 1;
            in_int = var.integer;
        }
        let name = column_name(v);
        if model.objective[v] != 0.0 {
            line(&mut out, "", &name, "OBJ", &num(model.objective[v]));
        }
        for &(r, a) in &by_col[v] {
            line(&mut out, "", &name, &row_name(r), &num(a));
        }
        if model.objective[v] == 0.0 && by_col[v].is_empty() {
            line(&mut out, "", &name, "OBJ", &num(0.0));
        }
    }
    if in_int {
        let _ = writeln!(out, "    M{markers:07}  'MARKER'                 'INTEND'");
    }
    out.push_str("RHS\n");
    for (i, row) in model.rows.iter().enumerate() {
        if row.rhs != 0.0 {
            line(&mut out, "", "RHS", &row_name(i), &num(row.rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for (v, var) in model.vars.iter().enumerate() {
        let name = column_name(v);
        let _ = writeln!(out, " LO BND       {name:<8}  {}", num(var.lower));
        let _ = writeln!(out, " UP BND       {name:<8}  {}", num(var.upper));
    }
    out.push_str("ENDATA\n");
    out
}

pub fn write_mps(model: &MilpModel, path: &Path) -> Result<(), MilpError> {
    model.validate()?;
    std::fs::write(path, to_mps_string(model))
        .map_err(|source| MilpError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model_layout() {
        let mut m = MilpModel::new("tiny");
        let x = m.add_binary("x", 2.0);
        let y = m.add_binary("y", 3.0);
        m.add_sos1("g", vec![x, y], vec![1.0, 2.0]);
        let t = m.add_var("t", 0.0, 4.5, false, 1.0);
        m.add_row("r", vec![(x, 1.0), (t, -1.0)], Sense::Le, 0.5);
        let s = to_mps_string(&m);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "NAME          tiny");
        assert!(lines.contains(&" E  R0000000"));
        assert!(lines.contains(&" L  R0000001"));
        assert!(s.contains("'MARKER'                 'INTORG'"));
        assert!(s.contains("'MARKER'                 'INTEND'"));
        assert!(s.contains(" UP BND       C0000002           4.5"));
        assert!(s.contains("    RHS       R0000001           0.5"));
        assert_eq!(*lines.last().unwrap(), "ENDATA");
    }
}
