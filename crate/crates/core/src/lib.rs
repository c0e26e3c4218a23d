//! Weighted least-squares derivative stencils on irregular node sets.
//!
//! The pipeline is: generate a [`NodeSet`] (regular grid, optionally
//! perturbed), find neighbors within a cutoff radius ([`NeighborTable`]),
//! fit a quadratic Taylor expansion around every node
//! ([`StencilCoefficients`]), and compare the resulting derivative estimates
//! with analytic values across resolutions ([`run_study`]).

pub mod analysis;
pub mod cli;
pub mod error;
pub mod format;
pub mod ls_stencil;
pub mod neighbor_search;
pub mod node_model;
pub mod regular_fd;
pub mod selftest;
pub mod test_functions;
pub mod weighting;

pub use analysis::{fit_order, rms, run_study, Method, OrderFit, StudyConfig, StudyReport};
pub use error::{Error, Result};
pub use ls_stencil::{
    derivative_field, DerivativeField, DerivativeJet, DesignRow, Quantity, StencilCoefficients,
    StencilSet,
};
pub use neighbor_search::{Neighbor, NeighborTable};
pub use node_model::{Bounds, Dim, NodeSet, Point};
pub use regular_fd::{fd_derivatives, FdScheme, FdSchemes, GridField};
pub use test_functions::{AnalyticJet, TestFunction};
pub use weighting::WeightKind;
