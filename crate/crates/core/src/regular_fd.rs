//! Classical finite differences on a uniform tensor grid, kept as the
//! reference the irregular-node stencils are compared against.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ls_stencil::{DerivativeField, DerivativeJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdScheme {
    /// `(u[i+1] - u[i-1]) / 2Δx`
    CentralFirst,
    /// `(u[i+1] - u[i]) / Δx`
    ForwardFirst,
    /// `(u[i] - u[i-1]) / Δx`
    BackwardFirst,
    /// `(u[i+1] - 2u[i] + u[i-1]) / Δx²`
    CentralSecond,
    /// `(u[i] - 2u[i-1] + u[i-2]) / Δx²`
    OneSidedSecond,
}

impl FdScheme {
    pub fn is_first(self) -> bool {
        matches!(
            self,
            FdScheme::CentralFirst | FdScheme::ForwardFirst | FdScheme::BackwardFirst
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FdScheme::CentralFirst | FdScheme::CentralSecond => "central",
            FdScheme::ForwardFirst => "forward",
            FdScheme::BackwardFirst => "backward",
            FdScheme::OneSidedSecond => "onesided",
        }
    }

    /// `(back, ahead)`: how many nodes the stencil reaches on each side.
    fn reach(self) -> (usize, usize) {
        match self {
            FdScheme::CentralFirst | FdScheme::CentralSecond => (1, 1),
            FdScheme::ForwardFirst => (0, 1),
            FdScheme::BackwardFirst => (1, 0),
            FdScheme::OneSidedSecond => (2, 0),
        }
    }

    fn eval(self, u: impl Fn(isize) -> f64, dx: f64) -> f64 {
        match self {
            FdScheme::CentralFirst => (u(1) - u(-1)) / (2.0 * dx),
            FdScheme::ForwardFirst => (u(1) - u(0)) / dx,
            FdScheme::BackwardFirst => (u(0) - u(-1)) / dx,
            FdScheme::CentralSecond => (u(1) - 2.0 * u(0) + u(-1)) / (dx * dx),
            FdScheme::OneSidedSecond => (u(0) - 2.0 * u(-1) + u(-2)) / (dx * dx),
        }
    }
}

/// Schemes for first and second derivatives; `f_xy` is always nested
/// central differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FdSchemes {
    pub first: FdScheme,
    pub second: FdScheme,
}

impl Default for FdSchemes {
    fn default() -> Self {
        FdSchemes {
            first: FdScheme::CentralFirst,
            second: FdScheme::CentralSecond,
        }
    }
}

pub fn parse_first_scheme(s: &str) -> std::result::Result<FdScheme, String> {
    match s {
        "central" => Ok(FdScheme::CentralFirst),
        "forward" => Ok(FdScheme::ForwardFirst),
        "backward" => Ok(FdScheme::BackwardFirst),
        other => Err(format!("unknown first-derivative scheme {other:?}")),
    }
}

pub fn parse_second_scheme(s: &str) -> std::result::Result<FdScheme, String> {
    match s {
        "central" => Ok(FdScheme::CentralSecond),
        "onesided" => Ok(FdScheme::OneSidedSecond),
        other => Err(format!("unknown second-derivative scheme {other:?}")),
    }
}

impl FromStr for FdSchemes {
    type Err = String;

    /// `first/second`, e.g. `central/onesided`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| format!("expected first/second, got {s:?}"))?;
        Ok(FdSchemes {
            first: parse_first_scheme(a)?,
            second: parse_second_scheme(b)?,
        })
    }
}

/// Scalar samples on an `nx × ny` grid, x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<GridField> {
        if values.len() != nx * ny {
            return Err(Error::LengthMismatch {
                expected: nx * ny,
                found: values.len(),
            });
        }
        Ok(GridField { nx, ny, values })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }
}

/// Applies `scheme` along a line of equally spaced samples. Entries whose
/// stencil would leave the line are `None`.
pub fn fd_line(values: &[f64], dx: f64, scheme: FdScheme) -> Vec<Option<f64>> {
    let n = values.len();
    let (back, ahead) = scheme.reach();
    (0..n)
        .map(|i| {
            (i >= back && i + ahead < n)
                .then(|| scheme.eval(|o| values[(i as isize + o) as usize], dx))
        })
        .collect()
}

/// Finite-difference jets at every grid node. Nodes where any of the five
/// stencils leaves the grid are marked [`Error::OutsideGrid`].
pub fn fd_derivatives(field: &GridField, dx: f64, schemes: FdSchemes) -> Result<DerivativeField> {
    if !schemes.first.is_first() {
        return Err(Error::InvalidScheme(schemes.first));
    }
    if schemes.second.is_first() {
        return Err(Error::InvalidScheme(schemes.second));
    }
    let (nx, ny) = (field.nx, field.ny);
    if nx < 3 || ny < 3 {
        return Err(Error::InsufficientGrid { nx, ny });
    }

    let along_x = |scheme: FdScheme, src: &dyn Fn(usize, usize) -> f64| {
        let mut out = vec![None; nx * ny];
        for j in 0..ny {
            let line: Vec<f64> = (0..nx).map(|i| src(i, j)).collect();
            for (i, v) in fd_line(&line, dx, scheme).into_iter().enumerate() {
                out[j * nx + i] = v;
            }
        }
        out
    };
    let along_y = |scheme: FdScheme, src: &dyn Fn(usize, usize) -> f64| {
        let mut out = vec![None; nx * ny];
        for i in 0..nx {
            let line: Vec<f64> = (0..ny).map(|j| src(i, j)).collect();
            for (j, v) in fd_line(&line, dx, scheme).into_iter().enumerate() {
                out[j * nx + i] = v;
            }
        }
        out
    };

    let u = |i, j| field.at(i, j);
    let fx = along_x(schemes.first, &u);
    let fy = along_y(schemes.first, &u);
    let fxx = along_x(schemes.second, &u);
    let fyy = along_y(schemes.second, &u);
    let dx_central = along_x(FdScheme::CentralFirst, &u);
    // NaN marks rows where the inner difference is undefined; the outer
    // difference only ever reads interior rows.
    let inner = |i: usize, j: usize| dx_central[j * nx + i].unwrap_or(f64::NAN);
    let fxy: Vec<Option<f64>> = along_y(FdScheme::CentralFirst, &inner)
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.filter(|_| dx_central[k].is_some()))
        .collect();

    let jets = (0..nx * ny)
        .map(|k| match (fx[k], fy[k], fxx[k], fxy[k], fyy[k]) {
            (Some(fx), Some(fy), Some(fxx), Some(fxy), Some(fyy)) => Ok(DerivativeJet {
                fx,
                fy,
                fxx,
                fxy,
                fyy,
            }),
            _ => Err(Error::OutsideGrid { node: k }),
        })
        .collect();
    Ok(DerivativeField::new(jets))
}
