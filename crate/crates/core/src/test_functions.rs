//! Analytic fields with closed-form derivatives.

use std::f64::consts::PI;

use crate::ls_stencil::Quantity;
use crate::node_model::{Bounds, Point};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyticJet {
    pub f: f64,
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
}

impl AnalyticJet {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Fx => self.fx,
            Quantity::Fy => self.fy,
            Quantity::Fxx => self.fxx,
            Quantity::Fxy => self.fxy,
            Quantity::Fyy => self.fyy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `x⁴ + y⁴ + x³y³` on `[-2, 2]²`.
    Power,
    /// `sin x · cos 2y` on `[0, 2π]²`.
    Sinusoidal,
    /// `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`.
    Quadratic([f64; 6]),
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Power => "power",
            TestFunction::Sinusoidal => "sinusoidal",
            TestFunction::Quadratic(_) => "quadratic",
        }
    }

    /// Domain the function is studied on.
    pub fn domain(&self) -> Bounds {
        match self {
            TestFunction::Power => Bounds::square(-2.0, 2.0),
            TestFunction::Sinusoidal => Bounds::square(0.0, 2.0 * PI),
            TestFunction::Quadratic(_) => Bounds::square(-1.0, 1.0),
        }
    }

    pub fn value(&self, p: Point) -> f64 {
        self.eval_jet(p).f
    }

    pub fn eval_jet(&self, p: Point) -> AnalyticJet {
        let [x, y] = p;
        match *self {
            TestFunction::Power => {
                let (x2, y2) = (x * x, y * y);
                let (x3, y3) = (x2 * x, y2 * y);
                AnalyticJet {
                    f: x2 * x2 + y2 * y2 + x3 * y3,
                    fx: 4.0 * x3 + 3.0 * x2 * y3,
                    fy: 4.0 * y3 + 3.0 * x3 * y2,
                    fxx: 12.0 * x2 + 6.0 * x * y3,
                    fxy: 9.0 * x2 * y2,
                    fyy: 12.0 * y2 + 6.0 * x3 * y,
                }
            }
            TestFunction::Sinusoidal => {
                let (sx, cx) = x.sin_cos();
                let (s2y, c2y) = (2.0 * y).sin_cos();
                AnalyticJet {
                    f: sx * c2y,
                    fx: cx * c2y,
                    fy: -2.0 * sx * s2y,
                    fxx: -sx * c2y,
                    fxy: -2.0 * cx * s2y,
                    fyy: -4.0 * sx * c2y,
                }
            }
            TestFunction::Quadratic(c) => AnalyticJet {
                f: c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y,
                fx: c[1] + 2.0 * c[3] * x + c[4] * y,
                fy: c[2] + c[4] * x + 2.0 * c[5] * y,
                fxx: 2.0 * c[3],
                fxy: c[4],
                fyy: 2.0 * c[5],
            },
        }
    }
}
