use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::StudyReport;
use crate::error::{Error, Result};
use crate::format::shortest;

pub const HEADER: &str =
    "function,method,weight,quantity,n,dx,dr_frac,r_frac,seed,include_boundary,nodes_used,rms";

/// One row per (method, quantity, n) cell, then one `n = slope` row per
/// (method, quantity) whose `rms` column holds the fitted order.
pub fn to_csv(report: &StudyReport) -> String {
    let cfg = &report.config;
    let prefix = |method: crate::analysis::Method| {
        format!(
            "{},{},{}",
            cfg.function.name(),
            method,
            cfg.weight_for(method)
        )
    };
    let run = format!(
        "{},{},{},{}",
        shortest(cfg.dr_frac),
        shortest(cfg.r_frac),
        cfg.seed,
        cfg.include_boundary
    );

    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            prefix(c.method),
            c.quantity,
            c.n,
            shortest(c.dx),
            run,
            c.nodes_used,
            shortest(c.rms)
        );
    }
    for f in &report.fits {
        let slope = f.fit.map(|f| shortest(f.slope)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},slope,,{},,{}",
            prefix(f.method),
            f.quantity,
            run,
            slope
        );
    }
    out
}

pub fn emit_csv(report: &StudyReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv(report)).map_err(|e| Error::io(path, e))
}
