//! Columnar text tables: a header line of names, then one
//! space-separated row per sample.

use std::fmt::Write;

use crate::analysis::DecayFit;
use crate::solver::{DiscreteSolution, RadialProfile};

/// Writes a table with the given column names.
pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(" ");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// `x y d u` per grid node.
pub fn solution_table(sol: &DiscreteSolution) -> String {
    let g = &sol.grid;
    table(
        &["x", "y", "d", "u"],
        g.coords
            .iter()
            .zip(&g.depth)
            .zip(&sol.values)
            .map(|((x, d), u)| vec![x[0], x[1], *d, *u]),
    )
}

/// `r u du` per profile point.
pub fn profile_table(p: &RadialProfile) -> String {
    table(
        &["r", "u", "du"],
        p.r.iter().zip(&p.u).zip(&p.du).map(|((r, u), du)| vec![*r, *u, *du]),
    )
}

/// `d abs_u` per fit sample.
pub fn decay_table(fit: &DecayFit) -> String {
    table(&["d", "abs_u"], fit.data.iter().map(|p| vec![p[0], p[1]]))
}

/// Parses a table written by [`table`]; returns the header and rows.
pub fn parse_table(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines.next()?.split_whitespace().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for l in lines {
        let row: Option<Vec<f64>> = l.split_whitespace().map(|t| t.parse().ok()).collect();
        let row = row?;
        if row.len() != header.len() {
            return None;
        }
        rows.push(row);
    }
    Some((header, rows))
}

/// Short summary line, mostly for logs.
pub fn describe_fit(fit: &DecayFit) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "slope {:.4} +/- {:.4} over d in [{:.3e}, {:.3e}] ({} samples)",
        fit.slope, fit.std_error, fit.window.d_min, fit.window.d_max, fit.samples
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = table(&["a", "b"], vec![vec![1.0, -2.5e-7], vec![0.1, 3.0]]);
        let (h, rows) = parse_table(&t).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows, vec![vec![1.0, -2.5e-7], vec![0.1, 3.0]]);
        assert!(parse_table("a b\n1 2 3\n").is_none());
    }
}
