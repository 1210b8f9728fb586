use prefclust_core::MatrixRow;

fn num(x: f64) -> String {
    format!("{x:.6}")
}

/// The optimization matrix as a plain aligned table, one row per step.
pub fn matrix_table(rows: &[MatrixRow]) -> String {
    let header = ["step", "name", "class", "D", "T", "k"].map(String::from);
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.step.to_string(),
                r.node.name.clone(),
                r.class_name.clone(),
                num(r.d),
                num(r.t),
                r.k.map_or_else(|| "-".to_string(), num),
            ]
        })
        .collect();

    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }

    let mut out = String::new();
    for row in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (cell, w))| {
                let pad = " ".repeat(w - cell.chars().count());
                // text columns left-aligned, numbers right-aligned
                if i == 1 || i == 2 { format!("{cell}{pad}") } else { format!("{pad}{cell}") }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
