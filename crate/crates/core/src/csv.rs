//! CSV emission helpers: `#`-prefixed metadata lines, comma separators,
//! `\n` line endings, 15 significant digits.

/// Formats a value with 15 significant digits, round-trip stable under
/// parse-and-reprint.
pub fn fmt_g15(x: f64) -> String {
    format!("{x:.14e}")
}

/// One `# key = value` metadata line.
pub fn meta_line(key: &str, value: impl AsRef<str>) -> String {
    format!("# {key} = {}\n", value.as_ref())
}

/// Renders a matrix with the t axis as the header row and the x axis as
/// the first column. `value(i, j)` is the cell at (x index, t index).
pub fn render_matrix(
    meta: &[(String, String)],
    x_grid: &[f64],
    t_grid: &[f64],
    value: impl Fn(usize, usize) -> f64,
) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        out.push_str(&meta_line(k, v));
    }
    out.push('x');
    for &t in t_grid {
        out.push(',');
        out.push_str(&fmt_g15(t));
    }
    out.push('\n');
    for (i, &x) in x_grid.iter().enumerate() {
        out.push_str(&fmt_g15(x));
        for j in 0..t_grid.len() {
            out.push(',');
            out.push_str(&fmt_g15(value(i, j)));
        }
        out.push('\n');
    }
    out
}
