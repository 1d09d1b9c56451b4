use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use tailcheck::harness::{run_ci_audit_sweep, write_atomically, AuditTable};
use tailcheck::intervals::{default_p_grid, IntervalMethod};

use crate::table::render;

pub const AUDIT_HEADER: &str = "estimator,n,p,coverage,alpha_l,alpha_u,left_hw,right_hw,width";

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Number of binomial trials
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Nominal total non-coverage
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Estimators to audit (repeatable): cp-equal, cp-shortest, wald,
    /// jeffreys-hpd [default: all]
    #[arg(long = "estimator", value_name = "NAME")]
    pub estimators: Vec<IntervalMethod>,
    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn audit_csv(tables: &[AuditTable]) -> String {
    let mut out = String::from(AUDIT_HEADER);
    out.push('\n');
    for t in tables {
        for r in &t.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                t.method,
                r.n,
                r.p,
                r.coverage,
                r.alpha_l_realized,
                r.alpha_u_realized,
                r.left_half_width,
                r.right_half_width,
                r.expected_width
            ));
        }
    }
    out
}

fn summary(tables: &[AuditTable]) -> String {
    let mut cells = vec![[
        "estimator",
        "max alpha_l",
        "max alpha_u",
        "max total",
        "mean width",
    ]
    .map(String::from)
    .to_vec()];
    for t in tables {
        cells.push(vec![
            t.method.to_string(),
            format!("{:.5}", t.worst_alpha_l),
            format!("{:.5}", t.worst_alpha_u),
            format!("{:.5}", t.worst_total),
            format!("{:.5}", t.mean_width),
        ]);
    }
    render(&cells)
}

pub fn audit_ci(args: &AuditArgs) -> Result<()> {
    let methods = if args.estimators.is_empty() {
        IntervalMethod::ALL.to_vec()
    } else {
        args.estimators.clone()
    };
    let grid = default_p_grid();
    let tables = methods
        .iter()
        .map(|&m| run_ci_audit_sweep(m, args.n, args.alpha, &grid))
        .collect::<tailcheck::Result<Vec<_>>>()?;
    let csv = audit_csv(&tables);
    let head = format!(
        "n = {}, alpha = {}, {} grid points\n",
        args.n,
        args.alpha,
        grid.len()
    );
    match &args.out {
        Some(path) => {
            write_atomically(path, csv.as_bytes())
                .with_context(|| format!("cannot write {}", path.display()))?;
            print!("{head}{}", summary(&tables));
            eprintln!("wrote {}", path.display());
        }
        None => {
            print!("{csv}");
            eprint!("{head}{}", summary(&tables));
        }
    }
    Ok(())
}
