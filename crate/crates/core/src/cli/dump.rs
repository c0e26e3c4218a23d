use std::fmt::Write as _;

use crate::analysis::{exact_jets, sample_field, Method};
use crate::error::{Error, Result};
use crate::format::shortest;
use crate::ls_stencil::{derivative_field, Quantity};
use crate::neighbor_search::NeighborTable;
use crate::node_model::NodeSet;
use crate::regular_fd::{fd_derivatives, FdSchemes, GridField};
use crate::test_functions::TestFunction;
use crate::weighting::WeightKind;

pub const HEADER: &str =
    "index,x,y,interior,status,fx,fy,fxx,fxy,fyy,fx_exact,fy_exact,fxx_exact,fxy_exact,fyy_exact";

#[derive(Debug, Clone, PartialEq)]
pub struct DumpConfig {
    pub function: TestFunction,
    pub n: usize,
    pub dr_frac: f64,
    pub r_frac: f64,
    pub weight: WeightKind,
    pub seed: u64,
    pub method: Method,
    pub fd: FdSchemes,
}

fn status_name(e: &Error) -> &'static str {
    match e {
        Error::InsufficientNeighbors { .. } => "insufficient_neighbors",
        Error::DegenerateNeighborhood { .. } => "degenerate",
        Error::OutsideGrid { .. } => "outside_grid",
        _ => "error",
    }
}

/// Per-node numeric and exact jets for one method at one resolution.
pub fn field_dump(config: &DumpConfig) -> Result<String> {
    let grid = NodeSet::regular_grid(config.function.domain(), &[config.n, config.n])?;
    let dx = grid.dx();
    let r_cut = config.r_frac * dx;
    let grid = grid.with_boundary_radius(r_cut);

    let (nodes, field) = match config.method {
        Method::Fd => {
            let values = sample_field(&config.function, grid.points());
            let gf = GridField::new(config.n, config.n, values)?;
            let field = fd_derivatives(&gf, dx, config.fd)?;
            (grid, field)
        }
        Method::Ddin | Method::Ddinw => {
            let nodes = grid.perturb(config.dr_frac * dx, config.seed)?;
            let table = NeighborTable::build(&nodes, r_cut)?;
            let values = sample_field(&config.function, nodes.points());
            let weight = match config.method {
                Method::Ddinw => config.weight,
                _ => WeightKind::Uniform,
            };
            let field = derivative_field(&nodes, &table, &values, weight)?;
            (nodes, field)
        }
    };

    let exact = exact_jets(&config.function, nodes.points());
    let mut out = String::from(HEADER);
    out.push('\n');
    for (k, p) in nodes.points().iter().enumerate() {
        let interior = !nodes.boundary_mask()[k];
        let _ = write!(out, "{k},{},{},{interior},", shortest(p[0]), shortest(p[1]));
        match field.get(k) {
            Ok(jet) => {
                out.push_str("ok");
                for q in Quantity::ALL {
                    let _ = write!(out, ",{}", shortest(jet.get(q)));
                }
            }
            Err(e) => {
                out.push_str(status_name(e));
                out.push_str(",,,,,");
            }
        }
        for q in Quantity::ALL {
            let _ = write!(out, ",{}", shortest(exact[k].get(q)));
        }
        out.push('\n');
    }
    Ok(out)
}
