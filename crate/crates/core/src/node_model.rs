//! Regular and randomly perturbed node sets.
//!
//! Grid nodes are stored in row-major order with x varying fastest: the node
//! with grid index `(i, j)` lives at `j * nx + i`. One-dimensional sets keep a
//! zero y coordinate so that every downstream routine can work on `[f64; 2]`.

use std::fmt::Write as _;
use std::path::Path;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::format::shortest;

pub type Point = [f64; 2];

/// Relative tolerance used when comparing per-axis grid spacings.
const SPACING_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn get(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_usize(d: usize) -> Option<Dim> {
        match d {
            1 => Some(Dim::One),
            2 => Some(Dim::Two),
            _ => None,
        }
    }
}

/// Axis-aligned box. In 1D only the x extents are meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Bounds {
            min: [lo, 0.0],
            max: [hi, 0.0],
        }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Bounds {
            min: [lo, lo],
            max: [hi, hi],
        }
    }

    pub fn rect(min: Point, max: Point) -> Self {
        Bounds { min, max }
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    fn enclosing(points: &[Point]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for a in 0..2 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        if points.is_empty() {
            min = [0.0; 2];
            max = [0.0; 2];
        }
        Bounds { min, max }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    points: Vec<Point>,
    dim: Dim,
    dx: f64,
    dr: f64,
    seed: u64,
    bounds: Bounds,
    grid_shape: Option<Vec<usize>>,
    boundary_radius: f64,
    boundary_mask: Vec<bool>,
}

impl NodeSet {
    /// Uniform tensor grid with `counts[a]` nodes along axis `a`, endpoints included.
    pub fn regular_grid(bounds: Bounds, counts: &[usize]) -> Result<NodeSet> {
        let dim = Dim::from_usize(counts.len()).ok_or_else(|| {
            Error::InvalidDomain(format!("expected 1 or 2 axis counts, got {}", counts.len()))
        })?;
        let mut spacing = [0.0; 2];
        for (axis, &n) in counts.iter().enumerate() {
            let (lo, hi) = (bounds.min[axis], bounds.max[axis]);
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis} has degenerate extent [{lo}, {hi}]"
                )));
            }
            if n < 2 {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis} needs at least 2 nodes, got {n}"
                )));
            }
            spacing[axis] = (hi - lo) / (n - 1) as f64;
        }
        if dim == Dim::Two {
            let scale = spacing[0].abs().max(spacing[1].abs());
            if (spacing[0] - spacing[1]).abs() > SPACING_RTOL * scale {
                return Err(Error::UnsupportedAnisotropy {
                    dx_x: spacing[0],
                    dx_y: spacing[1],
                });
            }
        }

        let nx = counts[0];
        let ny = if dim == Dim::Two { counts[1] } else { 1 };
        let coord = |axis: usize, i: usize, n: usize| {
            bounds.min[axis] + bounds.extent(axis) * i as f64 / (n - 1) as f64
        };
        let mut points = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = if dim == Dim::Two {
                coord(1, j, ny)
            } else {
                0.0
            };
            for i in 0..nx {
                points.push([coord(0, i, nx), y]);
            }
        }

        let mut set = NodeSet {
            boundary_mask: vec![false; points.len()],
            points,
            dim,
            dx: spacing[0],
            dr: 0.0,
            seed: 0,
            bounds,
            grid_shape: Some(counts.to_vec()),
            boundary_radius: 0.0,
        };
        set.recompute_mask();
        Ok(set)
    }

    /// Wraps externally supplied points. `dx` is the nominal spacing used to
    /// scale cutoff radii; the bounds become the points' bounding box.
    pub fn from_points(dim: Dim, points: Vec<Point>, dx: f64) -> Result<NodeSet> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "nominal spacing {dx} must be positive"
            )));
        }
        let mut points = points;
        for p in &mut points {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::InvalidDomain("non-finite node coordinate".into()));
            }
            if dim == Dim::One {
                p[1] = 0.0;
            }
        }
        Ok(NodeSet {
            boundary_mask: vec![false; points.len()],
            bounds: Bounds::enclosing(&points),
            points,
            dim,
            dx,
            dr: 0.0,
            seed: 0,
            grid_shape: None,
            boundary_radius: 0.0,
        })
    }

    /// Offsets every coordinate of every node by `dr * u`, `u` uniform in
    /// (-1, 1), drawn from SplitMix64 seeded with `seed`. Draws follow node
    /// order, x before y.
    pub fn perturb(&self, dr: f64, seed: u64) -> Result<NodeSet> {
        if self.grid_shape.is_none() || self.dr != 0.0 {
            return Err(Error::NotRegularGrid);
        }
        if !(dr.is_finite() && dr >= 0.0) {
            return Err(Error::InvalidPerturbation(dr));
        }
        let mut offsets = UnitOffsets::new(seed);
        let axes = self.dim.get();
        let mut out = self.clone();
        for p in &mut out.points {
            for coord in p.iter_mut().take(axes) {
                *coord += dr * offsets.next_offset();
            }
        }
        out.dr = dr;
        out.seed = seed;
        out.recompute_mask();
        Ok(out)
    }

    /// Marks nodes whose regular-grid position lies closer than `r_cut` to the
    /// domain boundary, in addition to the outermost grid layer. Imported
    /// sets use their actual positions against the bounding box.
    pub fn with_boundary_radius(mut self, r_cut: f64) -> NodeSet {
        self.boundary_radius = r_cut.max(0.0);
        self.recompute_mask();
        self
    }

    fn recompute_mask(&mut self) {
        let radius = self.boundary_radius;
        let axes = self.dim.get();
        self.boundary_mask = match &self.grid_shape {
            Some(shape) => {
                let nx = shape[0];
                (0..self.points.len())
                    .map(|k| {
                        let idx = [k % nx, k / nx];
                        (0..axes).any(|a| {
                            let n = shape[a];
                            let layer = idx[a].min(n - 1 - idx[a]);
                            layer == 0 || (layer as f64) * self.dx < radius
                        })
                    })
                    .collect()
            }
            None => self
                .points
                .iter()
                .map(|p| {
                    (0..axes).any(|a| {
                        (p[a] - self.bounds.min[a]).min(self.bounds.max[a] - p[a]) < radius
                    })
                })
                .collect(),
        };
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Per-axis node counts, `None` for imported sets.
    pub fn grid_shape(&self) -> Option<&[usize]> {
        self.grid_shape.as_deref()
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary_mask
    }

    pub fn boundary_radius(&self) -> f64 {
        self.boundary_radius
    }

    /// Same node set with every coordinate shifted by `shift`.
    pub fn translated(&self, shift: Point) -> NodeSet {
        let mut out = self.clone();
        let axes = self.dim.get();
        for p in &mut out.points {
            for (c, d) in p.iter_mut().zip(shift).take(axes) {
                *c += d;
            }
        }
        for (a, d) in shift.iter().enumerate().take(axes) {
            out.bounds.min[a] += d;
            out.bounds.max[a] += d;
        }
        out
    }

    /// Same node set with every coordinate multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> NodeSet {
        let mut out = self.clone();
        for p in &mut out.points {
            p[0] *= s;
            p[1] *= s;
        }
        out.bounds.min = [self.bounds.min[0] * s, self.bounds.min[1] * s];
        out.bounds.max = [self.bounds.max[0] * s, self.bounds.max[1] * s];
        out.dx *= s;
        out.dr *= s;
        out.boundary_radius *= s;
        out
    }

    /// Plain-text form: a `dim N dx dr seed` header, then one node per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            self.dim.get(),
            self.points.len(),
            shortest(self.dx),
            shortest(self.dr),
            self.seed
        );
        for p in &self.points {
            match self.dim {
                Dim::One => {
                    let _ = writeln!(s, "{}", shortest(p[0]));
                }
                Dim::Two => {
                    let _ = writeln!(s, "{} {}", shortest(p[0]), shortest(p[1]));
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<NodeSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let perr = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(perr(
                hline,
                format!("header needs 5 fields, found {}", fields.len()),
            ));
        }
        let dim = fields[0]
            .parse::<usize>()
            .ok()
            .and_then(Dim::from_usize)
            .ok_or_else(|| perr(hline, format!("bad dimension {:?}", fields[0])))?;
        let n: usize = fields[1]
            .parse()
            .map_err(|_| perr(hline, format!("bad node count {:?}", fields[1])))?;
        let parse_f = |line: usize, s: &str| {
            s.parse::<f64>()
                .map_err(|_| perr(line, format!("bad number {s:?}")))
        };
        let dx = parse_f(hline, fields[2])?;
        let dr = parse_f(hline, fields[3])?;
        let seed: u64 = fields[4]
            .parse()
            .map_err(|_| perr(hline, format!("bad seed {:?}", fields[4])))?;
        if !(dr.is_finite() && dr >= 0.0) {
            return Err(perr(hline, format!("bad irregularity scale {dr}")));
        }

        let mut points = Vec::with_capacity(n);
        for (lno, line) in lines {
            let coords: Vec<&str> = line.split_whitespace().collect();
            if coords.len() != dim.get() {
                return Err(perr(
                    lno,
                    format!("expected {} coordinates, found {}", dim.get(), coords.len()),
                ));
            }
            let x = parse_f(lno, coords[0])?;
            let y = if dim == Dim::Two {
                parse_f(lno, coords[1])?
            } else {
                0.0
            };
            points.push([x, y]);
        }
        if points.len() != n {
            return Err(Error::Parse {
                line: 1,
                message: format!("header announces {n} nodes, file has {}", points.len()),
            });
        }
        let mut set =
            NodeSet::from_points(dim, points, dx).map_err(|e| perr(hline, e.to_string()))?;
        set.dr = dr;
        set.seed = seed;
        Ok(set)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<NodeSet> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        NodeSet::from_text(&text)
    }
}

/// Stream of uniform values in the open interval (-1, 1).
struct UnitOffsets(SplitMix64);

impl UnitOffsets {
    fn new(seed: u64) -> Self {
        UnitOffsets(SplitMix64::seed_from_u64(seed))
    }

    fn next_offset(&mut self) -> f64 {
        loop {
            let k = self.0.next_u64();
            let u = 2.0 * (k >> 11) as f64 / (1u64 << 53) as f64 - 1.0;
            if u > -1.0 && u < 1.0 {
                return u;
            }
        }
    }
}
