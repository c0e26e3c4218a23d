//! RMS errors, convergence-order fits, and resolution studies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ls_stencil::{derivative_field, DerivativeField, Quantity};
use crate::neighbor_search::NeighborTable;
use crate::node_model::{NodeSet, Point};
use crate::regular_fd::{fd_derivatives, FdSchemes, GridField};
use crate::test_functions::{AnalyticJet, TestFunction};
use crate::weighting::WeightKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Least-squares stencil, uniform weights.
    Ddin,
    /// Least-squares stencil with the configured kernel.
    Ddinw,
    /// Finite differences on the unperturbed grid.
    Fd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ddin, Method::Ddinw, Method::Fd];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ddin => "ddin",
            Method::Ddinw => "ddinw",
            Method::Fd => "fd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ddin" => Ok(Method::Ddin),
            "ddinw" => Ok(Method::Ddinw),
            "fd" => Ok(Method::Fd),
            other => Err(format!(
                "unknown method {other:?} (expected ddin, ddinw or fd)"
            )),
        }
    }
}

/// `sqrt(mean((numeric - exact)²))` over nodes that are valid and included.
pub fn rms(numeric: &[Option<f64>], exact: &[f64], include: &[bool]) -> Result<f64> {
    for len in [exact.len(), include.len()] {
        if len != numeric.len() {
            return Err(Error::LengthMismatch {
                expected: numeric.len(),
                found: len,
            });
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((num, &ex), &inc) in numeric.iter().zip(exact).zip(include) {
        if let (Some(v), true) = (num, inc) {
            let e = v - ex;
            sum += e * e;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptySample);
    }
    Ok((sum / count as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(ln dx, ln rms)`; the slope is the observed order.
pub fn fit_order(dx: &[f64], rms: &[f64]) -> Result<OrderFit> {
    if dx.len() != rms.len() {
        return Err(Error::LengthMismatch {
            expected: dx.len(),
            found: rms.len(),
        });
    }
    if dx.len() < 2 {
        return Err(Error::EmptySample);
    }
    if let Some(&bad) = dx.iter().chain(rms).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateLog(bad));
    }
    let xs: Vec<f64> = dx.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = rms.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("all spacings are equal".into()));
    }
    let slope = sxy / sxx;
    Ok(OrderFit {
        slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub function: TestFunction,
    /// Nodes per axis, strictly increasing.
    pub sizes: Vec<usize>,
    /// Irregularity scale as a fraction of the spacing.
    pub dr_frac: f64,
    /// Cutoff radius as a multiple of the spacing.
    pub r_frac: f64,
    /// Kernel used by [`Method::Ddinw`].
    pub weight: WeightKind,
    pub seed: u64,
    pub include_boundary: bool,
    pub methods: Vec<Method>,
    pub fd: FdSchemes,
}

impl StudyConfig {
    pub const DEFAULT_SIZES: [usize; 4] = [26, 51, 101, 201];
    pub const DEFAULT_SEED: u64 = 42;

    /// Power function, Δr = 0.25Δx, r = 2.5Δx.
    pub fn power_preset() -> Self {
        StudyConfig {
            function: TestFunction::Power,
            sizes: Self::DEFAULT_SIZES.to_vec(),
            dr_frac: 0.25,
            r_frac: 2.5,
            weight: WeightKind::Mps,
            seed: Self::DEFAULT_SEED,
            include_boundary: false,
            methods: Method::ALL.to_vec(),
            fd: FdSchemes::default(),
        }
    }

    /// Sinusoidal function, Δr = 0.25Δx, r = 3Δx.
    pub fn sinusoidal_preset() -> Self {
        StudyConfig {
            function: TestFunction::Sinusoidal,
            r_frac: 3.0,
            ..Self::power_preset()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.dr_frac.is_finite() && self.dr_frac >= 0.0) {
            return bad(format!("dr_frac {} must be non-negative", self.dr_frac));
        }
        if !(self.r_frac.is_finite() && self.r_frac > 0.0) {
            return bad(format!("r_frac {} must be positive", self.r_frac));
        }
        if self.sizes.len() < 2 {
            return bad("at least two grid sizes are needed to fit an order".into());
        }
        if self.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid sizes must be strictly increasing".into());
        }
        if self.sizes[0] < 3 {
            return bad("grid sizes must be at least 3".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        Ok(())
    }

    /// Weight the given method's stencils actually use.
    pub fn weight_for(&self, method: Method) -> WeightKind {
        match method {
            Method::Ddinw => self.weight,
            Method::Ddin | Method::Fd => WeightKind::Uniform,
        }
    }

    fn sorted_methods(&self) -> Vec<Method> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self::power_preset()
    }
}

/// RMS error of one quantity for one method at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyCell {
    pub method: Method,
    pub quantity: Quantity,
    pub n: usize,
    pub dx: f64,
    pub total_nodes: usize,
    /// Nodes excluded by the boundary mask.
    pub masked_nodes: usize,
    /// Nodes whose stencil failed.
    pub failed_nodes: usize,
    /// Nodes entering the selected RMS.
    pub nodes_used: usize,
    pub rms_interior: Option<f64>,
    pub rms_all: Option<f64>,
    /// RMS under the configured boundary convention.
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub quantity: Quantity,
    /// `None` when some RMS in the series is zero.
    pub fit: Option<OrderFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub config: StudyConfig,
    /// Sorted by (method, quantity, n).
    pub cells: Vec<StudyCell>,
    /// Sorted by (method, quantity).
    pub fits: Vec<SlopeFit>,
}

impl StudyReport {
    pub fn cell(&self, method: Method, quantity: Quantity, n: usize) -> Option<&StudyCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.quantity == quantity && c.n == n)
    }

    pub fn series(&self, method: Method, quantity: Quantity) -> Vec<&StudyCell> {
        self.cells
            .iter()
            .filter(|c| c.method == method && c.quantity == quantity)
            .collect()
    }

    pub fn slope(&self, method: Method, quantity: Quantity) -> Option<f64> {
        self.fits
            .iter()
            .find(|f| f.method == method && f.quantity == quantity)
            .and_then(|f| f.fit)
            .map(|f| f.slope)
    }
}

/// Everything needed to score one method at one resolution.
struct Sample<'a> {
    field: DerivativeField,
    exact: Vec<AnalyticJet>,
    interior: &'a [bool],
}

fn score(
    method: Method,
    n: usize,
    dx: f64,
    sample: &Sample<'_>,
    include_boundary: bool,
) -> Result<Vec<StudyCell>> {
    let total = sample.field.len();
    let all = vec![true; total];
    let failed = sample.field.failed_count();
    let masked = sample.interior.iter().filter(|&&inside| !inside).count();
    let annotate = |e: Error| Error::Study {
        method,
        n,
        source: Box::new(e),
    };
    Quantity::ALL
        .iter()
        .map(|&q| {
            let numeric = sample.field.values(q);
            let exact: Vec<f64> = sample.exact.iter().map(|j| j.get(q)).collect();
            let rms_interior = rms(&numeric, &exact, sample.interior).ok();
            let rms_all = rms(&numeric, &exact, &all).ok();
            let mask: &[bool] = if include_boundary {
                &all
            } else {
                sample.interior
            };
            let rms_selected = rms(&numeric, &exact, mask).map_err(annotate)?;
            let nodes_used = numeric
                .iter()
                .zip(mask)
                .filter(|(v, &inc)| inc && v.is_some())
                .count();
            Ok(StudyCell {
                method,
                quantity: q,
                n,
                dx,
                total_nodes: total,
                masked_nodes: if include_boundary { 0 } else { masked },
                failed_nodes: failed,
                nodes_used,
                rms_interior,
                rms_all,
                rms: rms_selected,
            })
        })
        .collect()
}

/// Runs every configured method over the resolution ladder and fits the
/// observed orders. Deterministic in `config`.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let methods = config.sorted_methods();
    let domain = config.function.domain();
    let mut cells = Vec::new();

    for &n in &config.sizes {
        let grid = NodeSet::regular_grid(domain, &[n, n])?;
        let dx = grid.dx();
        let r_cut = config.r_frac * dx;
        let grid = grid.with_boundary_radius(r_cut);
        let interior: Vec<bool> = grid.boundary_mask().iter().map(|b| !b).collect();

        let needs_irregular = methods.iter().any(|m| *m != Method::Fd);
        let irregular = if needs_irregular {
            let annotate = |e: Error| Error::Study {
                method: Method::Ddin,
                n,
                source: Box::new(e),
            };
            let nodes = grid
                .perturb(config.dr_frac * dx, config.seed)
                .map_err(annotate)?;
            let table = NeighborTable::build(&nodes, r_cut).map_err(annotate)?;
            Some((nodes, table))
        } else {
            None
        };

        for &method in &methods {
            let annotate = |e: Error| Error::Study {
                method,
                n,
                source: Box::new(e),
            };
            let sample = match (method, &irregular) {
                (Method::Fd, _) => {
                    let values = sample_field(&config.function, grid.points());
                    let gf = GridField::new(n, n, values).map_err(annotate)?;
                    Sample {
                        field: fd_derivatives(&gf, dx, config.fd).map_err(annotate)?,
                        exact: exact_jets(&config.function, grid.points()),
                        interior: &interior,
                    }
                }
                (_, Some((nodes, table))) => {
                    let values = sample_field(&config.function, nodes.points());
                    Sample {
                        field: derivative_field(nodes, table, &values, config.weight_for(method))
                            .map_err(annotate)?,
                        exact: exact_jets(&config.function, nodes.points()),
                        interior: &interior,
                    }
                }
                (_, None) => unreachable!("irregular nodes are built for every stencil method"),
            };
            cells.extend(score(method, n, dx, &sample, config.include_boundary)?);
        }
    }

    cells.sort_by_key(|c| (c.method, c.quantity, c.n));
    let mut fits = Vec::new();
    for &method in &methods {
        for q in Quantity::ALL {
            let series: Vec<&StudyCell> = cells
                .iter()
                .filter(|c| c.method == method && c.quantity == q)
                .collect();
            let dxs: Vec<f64> = series.iter().map(|c| c.dx).collect();
            let rmss: Vec<f64> = series.iter().map(|c| c.rms).collect();
            fits.push(SlopeFit {
                method,
                quantity: q,
                fit: fit_order(&dxs, &rmss).ok(),
            });
        }
    }

    Ok(StudyReport {
        config: config.clone(),
        cells,
        fits,
    })
}

pub fn sample_field(function: &TestFunction, points: &[Point]) -> Vec<f64> {
    points.iter().map(|&p| function.value(p)).collect()
}

pub fn exact_jets(function: &TestFunction, points: &[Point]) -> Vec<AnalyticJet> {
    points.iter().map(|&p| function.eval_jet(p)).collect()
}
