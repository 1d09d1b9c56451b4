//! Plain-text tables of error decompositions.

use tailcheck::harness::ExperimentResult;
use tailcheck::{Rate, TrueState};

pub fn rate_cell(r: &Rate) -> String {
    format!("{:.4} ± {:.4}", r.rate, r.se)
}

/// One column per result, one row per rate. Rates that cannot occur under
/// the result's true state show as `-`.
pub fn decomposition_table(columns: &[(String, &ExperimentResult)]) -> String {
    let null_only = |res: &ExperimentResult, r: &Rate| match res.true_state {
        TrueState::Null => rate_cell(r),
        TrueState::Effect(_) => "-".into(),
    };
    let effect_only = |res: &ExperimentResult, r: &Rate| match res.true_state {
        TrueState::Null => "-".into(),
        TrueState::Effect(_) => rate_cell(r),
    };
    type Row<'a> = (&'a str, Box<dyn Fn(&ExperimentResult) -> String + 'a>);
    let rows: Vec<Row> = vec![
        ("true state", Box::new(|r| r.true_state.to_string())),
        ("reps", Box::new(|r| r.decomposition.n_reps.to_string())),
        (
            "alpha_left",
            Box::new(move |r| null_only(r, &r.decomposition.alpha_left)),
        ),
        (
            "alpha_right",
            Box::new(move |r| null_only(r, &r.decomposition.alpha_right)),
        ),
        (
            "power",
            Box::new(move |r| effect_only(r, &r.decomposition.power)),
        ),
        (
            "beta",
            Box::new(move |r| effect_only(r, &r.decomposition.beta)),
        ),
        (
            "gamma",
            Box::new(move |r| effect_only(r, &r.decomposition.gamma)),
        ),
        ("significant", Box::new(|r| rate_cell(&r.significant))),
    ];

    let mut cells: Vec<Vec<String>> = Vec::with_capacity(rows.len() + 1);
    let mut header = vec!["rate".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.clone()));
    cells.push(header);
    for (label, f) in &rows {
        let mut line = vec![label.to_string()];
        line.extend(columns.iter().map(|(_, r)| f(r)));
        cells.push(line);
    }
    render(&cells)
}

/// Left-aligned columns separated by two spaces.
pub fn render(cells: &[Vec<String>]) -> String {
    let n_cols = cells.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..n_cols)
        .map(|c| {
            cells
                .iter()
                .filter_map(|row| row.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
