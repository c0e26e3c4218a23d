//! Weighted least-squares Taylor stencils.
//!
//! For a center node `i` with neighbors `j`, the second-order Taylor expansion
//!
//! ```text
//! φj - φi = φx u + φy v + ½φxx u² + φxy u v + ½φyy v² + O(ε³),   (u, v) = rj - ri
//! ```
//!
//! is written once per neighbor, giving an overdetermined `J × m` system
//! `A z = d` (`m = 2` in 1D, `m = 5` in 2D). The stencil is the `m × J`
//! matrix `C = (AᵀWA)⁻¹ AᵀW`, obtained from the explicit normal equations by
//! an LDLᵀ factorization. Applying `C` to the field differences yields the
//! unknown vector `(φx, φy, ½φxx, φxy, ½φyy)`; the public [`DerivativeJet`]
//! stores true derivatives, so the half-factor slots are doubled.
//!
//! Monomials are formed from raw offsets without rescaling, so the normal
//! matrix mixes entries of order `h²` and `h⁴`. Its condition number grows
//! like `h⁻²`; the [`CONDITION_LIMIT`] guard is comfortably met for spacings
//! down to roughly `1e-4`.

#![allow(clippy::needless_range_loop)]

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::neighbor_search::{Neighbor, NeighborTable};
use crate::node_model::{Dim, NodeSet, Point};
use crate::weighting::WeightKind;

pub const MAX_UNKNOWNS: usize = 5;

/// Stencils whose normal matrix has a 1-norm condition estimate above this
/// are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// An LDLᵀ pivot below `PIVOT_RTOL * max(diag)` rejects the stencil.
pub const PIVOT_RTOL: f64 = 1e-14;

/// Number of unknowns in the Taylor fit.
pub fn unknown_count(dim: Dim) -> usize {
    match dim {
        Dim::One => 2,
        Dim::Two => 5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Fx,
    Fy,
    Fxx,
    Fxy,
    Fyy,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Fx,
        Quantity::Fy,
        Quantity::Fxx,
        Quantity::Fxy,
        Quantity::Fyy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Fx => "fx",
            Quantity::Fy => "fy",
            Quantity::Fxx => "fxx",
            Quantity::Fxy => "fxy",
            Quantity::Fyy => "fyy",
        }
    }

    pub fn is_second_order(self) -> bool {
        matches!(self, Quantity::Fxx | Quantity::Fxy | Quantity::Fyy)
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Estimated first and second derivatives at one node. 1D stencils leave the
/// y slots at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DerivativeJet {
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
}

impl DerivativeJet {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Fx => self.fx,
            Quantity::Fy => self.fy,
            Quantity::Fxx => self.fxx,
            Quantity::Fxy => self.fxy,
            Quantity::Fyy => self.fyy,
        }
    }

    fn from_unknowns(dim: Dim, z: &[f64; MAX_UNKNOWNS]) -> Self {
        match dim {
            Dim::One => DerivativeJet {
                fx: z[0],
                fxx: 2.0 * z[1],
                ..Default::default()
            },
            Dim::Two => DerivativeJet {
                fx: z[0],
                fy: z[1],
                fxx: 2.0 * z[2],
                fxy: z[3],
                fyy: 2.0 * z[4],
            },
        }
    }
}

/// One row of the Taylor design matrix: `(u, u²)` in 1D,
/// `(u, v, u², uv, v²)` in 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRow {
    values: [f64; MAX_UNKNOWNS],
    len: usize,
}

impl DesignRow {
    pub fn new(dim: Dim, offset: Point) -> Result<DesignRow> {
        let [u, v] = offset;
        match dim {
            Dim::One => {
                if u == 0.0 {
                    return Err(Error::CoincidentNode);
                }
                Ok(DesignRow {
                    values: [u, u * u, 0.0, 0.0, 0.0],
                    len: 2,
                })
            }
            Dim::Two => {
                if u == 0.0 && v == 0.0 {
                    return Err(Error::CoincidentNode);
                }
                Ok(DesignRow {
                    values: [u, v, u * u, u * v, v * v],
                    len: 5,
                })
            }
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub neighbor_count: usize,
    pub condition: f64,
    pub min_weight: f64,
    pub max_weight: f64,
}

/// Linear map from neighbor differences `φj - φi` to the derivative jet at
/// one center node.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilCoefficients {
    dim: Dim,
    center: usize,
    neighbors: Vec<usize>,
    /// `m × J`, row-major.
    coeffs: Vec<f64>,
    condition: f64,
    min_weight: f64,
    max_weight: f64,
}

/// Dense symmetric matrix of at most `MAX_UNKNOWNS` rows.
type Small = [[f64; MAX_UNKNOWNS]; MAX_UNKNOWNS];

/// `A = L D Lᵀ` with unit lower-triangular `L`.
struct Ldlt {
    lower: Small,
    diag: [f64; MAX_UNKNOWNS],
    m: usize,
}

impl Ldlt {
    /// Returns `None` when a pivot falls below `PIVOT_RTOL * max(diag)`.
    fn factor(a: &Small, m: usize) -> Option<Ldlt> {
        let max_diag = (0..m).map(|k| a[k][k]).fold(0.0f64, f64::max);
        if !(max_diag > 0.0 && max_diag.is_finite()) {
            return None;
        }
        let mut l = [[0.0; MAX_UNKNOWNS]; MAX_UNKNOWNS];
        let mut d = [0.0; MAX_UNKNOWNS];
        for k in 0..m {
            let pivot = a[k][k] - (0..k).map(|p| l[k][p] * l[k][p] * d[p]).sum::<f64>();
            // negated so that NaN pivots are rejected too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(pivot > PIVOT_RTOL * max_diag) {
                return None;
            }
            d[k] = pivot;
            l[k][k] = 1.0;
            for r in k + 1..m {
                let s = a[r][k] - (0..k).map(|p| l[r][p] * l[k][p] * d[p]).sum::<f64>();
                l[r][k] = s / pivot;
            }
        }
        Some(Ldlt {
            lower: l,
            diag: d,
            m,
        })
    }

    fn solve(&self, b: &mut [f64; MAX_UNKNOWNS]) {
        let (l, m) = (&self.lower, self.m);
        for r in 0..m {
            b[r] -= (0..r).map(|p| l[r][p] * b[p]).sum::<f64>();
        }
        for r in 0..m {
            b[r] /= self.diag[r];
        }
        for r in (0..m).rev() {
            b[r] -= (r + 1..m).map(|p| l[p][r] * b[p]).sum::<f64>();
        }
    }

    fn inverse(&self) -> Small {
        let mut inv = [[0.0; MAX_UNKNOWNS]; MAX_UNKNOWNS];
        for c in 0..self.m {
            let mut e = [0.0; MAX_UNKNOWNS];
            e[c] = 1.0;
            self.solve(&mut e);
            for r in 0..self.m {
                inv[r][c] = e[r];
            }
        }
        inv
    }
}

fn norm1(a: &Small, m: usize) -> f64 {
    (0..m)
        .map(|c| (0..m).map(|r| a[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl StencilCoefficients {
    /// Assembles and solves the weighted normal equations for `center`.
    pub fn build(
        dim: Dim,
        center: usize,
        neighbors: &[Neighbor],
        weight: WeightKind,
        r_cut: f64,
    ) -> Result<StencilCoefficients> {
        let m = unknown_count(dim);
        if neighbors.len() < m {
            return Err(Error::InsufficientNeighbors {
                node: center,
                found: neighbors.len(),
                required: m,
            });
        }

        let mut rows = Vec::with_capacity(neighbors.len());
        let mut weights = Vec::with_capacity(neighbors.len());
        let mut normal: Small = [[0.0; MAX_UNKNOWNS]; MAX_UNKNOWNS];
        for nb in neighbors {
            let row = DesignRow::new(dim, nb.offset)?;
            let w = weight.weight(nb.dist, r_cut)?;
            let a = row.as_slice();
            for r in 0..m {
                for c in 0..=r {
                    normal[r][c] += w * a[r] * a[c];
                }
            }
            rows.push(row);
            weights.push(w);
        }
        for r in 0..m {
            for c in r + 1..m {
                normal[r][c] = normal[c][r];
            }
        }

        let degenerate = |condition| Error::DegenerateNeighborhood {
            node: center,
            condition,
        };
        let factor = Ldlt::factor(&normal, m).ok_or_else(|| degenerate(f64::INFINITY))?;
        let condition = norm1(&normal, m) * norm1(&factor.inverse(), m);
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(condition <= CONDITION_LIMIT) {
            return Err(degenerate(condition));
        }

        let j_count = neighbors.len();
        let mut coeffs = vec![0.0; m * j_count];
        for (j, (row, &w)) in rows.iter().zip(&weights).enumerate() {
            let mut col = [0.0; MAX_UNKNOWNS];
            for (dst, &a) in col.iter_mut().zip(row.as_slice()) {
                *dst = w * a;
            }
            factor.solve(&mut col);
            for r in 0..m {
                coeffs[r * j_count + j] = col[r];
            }
        }

        Ok(StencilCoefficients {
            dim,
            center,
            neighbors: neighbors.iter().map(|nb| nb.index).collect(),
            coeffs,
            condition,
            min_weight: weights.iter().copied().fold(f64::INFINITY, f64::min),
            max_weight: weights.iter().copied().fold(0.0, f64::max),
        })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn unknown_count(&self) -> usize {
        unknown_count(self.dim)
    }

    /// Row `k` of `C`: the weights applied to each neighbor difference for
    /// unknown `k` (half-factor convention).
    pub fn row(&self, k: usize) -> &[f64] {
        let j = self.neighbors.len();
        &self.coeffs[k * j..(k + 1) * j]
    }

    /// 1-norm condition estimate of the normal matrix `AᵀWA`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `C · (φj - φi)` in the half-factor convention.
    pub fn unknowns(&self, field: &[f64]) -> [f64; MAX_UNKNOWNS] {
        let phi_i = field[self.center];
        let mut z = [0.0; MAX_UNKNOWNS];
        for (k, zk) in z.iter_mut().enumerate().take(self.unknown_count()) {
            *zk = self
                .row(k)
                .iter()
                .zip(&self.neighbors)
                .map(|(c, &j)| c * (field[j] - phi_i))
                .sum();
        }
        z
    }

    pub fn apply(&self, field: &[f64]) -> DerivativeJet {
        DerivativeJet::from_unknowns(self.dim, &self.unknowns(field))
    }

    pub fn diagnostics(&self) -> ConditionReport {
        ConditionReport {
            neighbor_count: self.neighbors.len(),
            condition: self.condition,
            min_weight: self.min_weight,
            max_weight: self.max_weight,
        }
    }
}

/// Per-node jets; nodes whose stencil failed carry the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    jets: Vec<Result<DerivativeJet>>,
}

impl DerivativeField {
    pub fn new(jets: Vec<Result<DerivativeJet>>) -> Self {
        DerivativeField { jets }
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    pub fn get(&self, i: usize) -> std::result::Result<&DerivativeJet, &Error> {
        self.jets[i].as_ref()
    }

    pub fn jets(&self) -> &[Result<DerivativeJet>] {
        &self.jets
    }

    /// One quantity at every node, `None` where the node failed.
    pub fn values(&self, q: Quantity) -> Vec<Option<f64>> {
        self.jets
            .iter()
            .map(|j| j.as_ref().ok().map(|j| j.get(q)))
            .collect()
    }

    pub fn failed_count(&self) -> usize {
        self.jets.iter().filter(|j| j.is_err()).count()
    }
}

/// Stencils for every node of a set, built once and applied to any field.
#[derive(Debug, Clone)]
pub struct StencilSet {
    stencils: Vec<Result<StencilCoefficients>>,
}

impl StencilSet {
    pub fn build(nodes: &NodeSet, table: &NeighborTable, weight: WeightKind) -> Result<StencilSet> {
        if table.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                found: table.len(),
            });
        }
        let dim = nodes.dim();
        let r_cut = table.r_cut();
        let stencils = (0..nodes.len())
            .into_par_iter()
            .map(|i| StencilCoefficients::build(dim, i, table.neighbors(i), weight, r_cut))
            .collect();
        Ok(StencilSet { stencils })
    }

    pub fn len(&self) -> usize {
        self.stencils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stencils.is_empty()
    }

    pub fn get(&self, i: usize) -> std::result::Result<&StencilCoefficients, &Error> {
        self.stencils[i].as_ref()
    }

    pub fn apply(&self, field: &[f64]) -> Result<DerivativeField> {
        if field.len() != self.stencils.len() {
            return Err(Error::LengthMismatch {
                expected: self.stencils.len(),
                found: field.len(),
            });
        }
        let jets = self
            .stencils
            .par_iter()
            .map(|s| match s {
                Ok(s) => Ok(s.apply(field)),
                Err(e) => Err(e.clone()),
            })
            .collect();
        Ok(DerivativeField { jets })
    }
}

/// Builds stencils for every node and applies them to `field`.
pub fn derivative_field(
    nodes: &NodeSet,
    table: &NeighborTable,
    field: &[f64],
    weight: WeightKind,
) -> Result<DerivativeField> {
    if field.len() != nodes.len() {
        return Err(Error::LengthMismatch {
            expected: nodes.len(),
            found: field.len(),
        });
    }
    StencilSet::build(nodes, table, weight)?.apply(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(index: usize, offset: Point) -> Neighbor {
        Neighbor {
            index,
            offset,
            dist: (offset[0] * offset[0] + offset[1] * offset[1]).sqrt(),
        }
    }

    /// Node 0 at `center`; neighbors at `center + offsets[k]`, indices 1..
    fn local_field(
        center: Point,
        offsets: &[Point],
        f: impl Fn(f64, f64) -> f64,
    ) -> (Vec<Neighbor>, Vec<f64>) {
        let mut field = vec![f(center[0], center[1])];
        let mut nbs = Vec::new();
        for (k, o) in offsets.iter().enumerate() {
            field.push(f(center[0] + o[0], center[1] + o[1]));
            nbs.push(nb(k + 1, *o));
        }
        (nbs, field)
    }

    #[test]
    fn design_rows() {
        let h = 0.3;
        let r = DesignRow::new(Dim::Two, [h, 0.0]).unwrap();
        assert_eq!(r.as_slice(), &[h, 0.0, h * h, 0.0, 0.0]);
        let r = DesignRow::new(Dim::Two, [1.0, 2.0]).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 2.0, 1.0, 2.0, 4.0]);
        let r = DesignRow::new(Dim::One, [h, 0.0]).unwrap();
        assert_eq!(r.as_slice(), &[h, h * h]);
        assert_eq!(
            DesignRow::new(Dim::Two, [0.0, 0.0]),
            Err(Error::CoincidentNode)
        );
        assert_eq!(
            DesignRow::new(Dim::One, [0.0, 5.0]),
            Err(Error::CoincidentNode)
        );
    }

    #[test]
    fn symmetric_pair_reproduces_parabola() {
        let h = 0.125;
        let (nbs, field) = local_field([0.0, 0.0], &[[h, 0.0], [-h, 0.0]], |x, _| x * x);
        let s = StencilCoefficients::build(Dim::One, 0, &nbs, WeightKind::Uniform, 1.0).unwrap();
        let jet = s.apply(&field);
        assert_eq!(jet.fx, 0.0);
        assert_eq!(jet.fxx, 2.0);
        let a = 2.0 * h * h;
        let b = 2.0 * h.powi(4);
        assert_eq!(s.diagnostics().condition, a.max(b) / a.min(b));
    }

    #[test]
    fn one_sided_pair_on_cubic() {
        // a + b h = h², 2a + 4 b h = 8 h²  =>  a = -2h², b = 3h
        for h in [0.5, 0.1, 0.01] {
            let (nbs, field) =
                local_field([0.0, 0.0], &[[h, 0.0], [2.0 * h, 0.0]], |x, _| x * x * x);
            let s =
                StencilCoefficients::build(Dim::One, 0, &nbs, WeightKind::Uniform, 10.0).unwrap();
            let jet = s.apply(&field);
            let tol = 1e-10 * h;
            assert!(
                (jet.fx - (-2.0 * h * h)).abs() < tol,
                "{} vs {}",
                jet.fx,
                -2.0 * h * h
            );
            assert!(
                (jet.fxx - 6.0 * h).abs() < tol,
                "{} vs {}",
                jet.fxx,
                6.0 * h
            );
        }
    }

    fn square_offsets() -> [Point; 5] {
        [
            [0.1, 0.0],
            [0.0, 0.1],
            [-0.1, 0.05],
            [0.07, -0.08],
            [-0.06, -0.09],
        ]
    }

    #[test]
    fn square_system_inverts_design_matrix() {
        let offs = square_offsets();
        let nbs: Vec<Neighbor> = offs
            .iter()
            .enumerate()
            .map(|(k, o)| nb(k + 1, *o))
            .collect();
        for kind in [WeightKind::Uniform, WeightKind::Mps] {
            let s = StencilCoefficients::build(Dim::Two, 0, &nbs, kind, 0.2).unwrap();
            for r in 0..5 {
                for c in 0..5 {
                    let ca: f64 = (0..5)
                        .map(|j| {
                            s.row(r)[j] * DesignRow::new(Dim::Two, offs[j]).unwrap().as_slice()[c]
                        })
                        .sum();
                    let expected = if r == c { 1.0 } else { 0.0 };
                    assert!((ca - expected).abs() < 1e-9, "({r},{c}) = {ca}");
                }
            }
        }
    }

    #[test]
    fn square_system_is_weight_independent() {
        let offs = square_offsets();
        let (nbs, field) = local_field([0.3, -0.2], &offs, |x, y| (x * 2.0).sin() * y.exp());
        let u = StencilCoefficients::build(Dim::Two, 0, &nbs, WeightKind::Uniform, 0.2).unwrap();
        let w = StencilCoefficients::build(Dim::Two, 0, &nbs, WeightKind::Mps, 0.2).unwrap();
        let (ju, jw) = (u.apply(&field), w.apply(&field));
        for q in Quantity::ALL {
            assert!(
                (ju.get(q) - jw.get(q)).abs() <= 1e-9 * ju.get(q).abs().max(1.0),
                "{q}"
            );
        }
    }

    #[test]
    fn constant_linear_and_bilinear_fields() {
        let offs: Vec<Point> = (0..12)
            .map(|k| {
                let t = k as f64 * 0.7;
                let r = 0.05 + 0.01 * (k % 4) as f64;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let c = [0.4, -1.1];
        for kind in [WeightKind::Uniform, WeightKind::Mps] {
            let (nbs, f) = local_field(c, &offs, |_, _| 4.2);
            let s = StencilCoefficients::build(Dim::Two, 0, &nbs, kind, 0.1).unwrap();
            assert_eq!(s.apply(&f), DerivativeJet::default());

            let (_, f) = local_field(c, &offs, |x, y| 3.0 * x - 7.0 * y);
            let j = s.apply(&f);
            assert!((j.fx - 3.0).abs() < 1e-9 && (j.fy + 7.0).abs() < 1e-9);
            for v in [j.fxx, j.fxy, j.fyy] {
                assert!(v.abs() < 1e-7, "{v}");
            }

            let (_, f) = local_field(c, &offs, |x, y| x * y);
            let j = s.apply(&f);
            assert!((j.fxy - 1.0).abs() < 1e-9);
            assert!((j.fx - c[1]).abs() < 1e-9 && (j.fy - c[0]).abs() < 1e-9);
            assert!(j.fxx.abs() < 1e-7 && j.fyy.abs() < 1e-7);
        }
    }

    #[test]
    fn too_few_neighbors() {
        let nbs = vec![nb(1, [0.1, 0.0]), nb(2, [0.0, 0.1])];
        assert_eq!(
            StencilCoefficients::build(Dim::Two, 7, &nbs, WeightKind::Uniform, 1.0),
            Err(Error::InsufficientNeighbors {
                node: 7,
                found: 2,
                required: 5
            })
        );
    }

    #[test]
    fn collinear_neighborhood_is_degenerate() {
        let nbs: Vec<Neighbor> = (1..=8)
            .map(|k| nb(k, [0.05 * k as f64 - 0.2, 0.0]))
            .collect();
        let nbs: Vec<Neighbor> = nbs.into_iter().filter(|n| n.offset[0] != 0.0).collect();
        let err =
            StencilCoefficients::build(Dim::Two, 3, &nbs, WeightKind::Uniform, 1.0).unwrap_err();
        assert!(
            matches!(err, Error::DegenerateNeighborhood { node: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn coincident_neighbor_is_rejected() {
        let mut nbs: Vec<Neighbor> = square_offsets()
            .iter()
            .enumerate()
            .map(|(k, o)| nb(k + 1, *o))
            .collect();
        nbs.push(nb(9, [0.0, 0.0]));
        assert!(StencilCoefficients::build(Dim::Two, 0, &nbs, WeightKind::Mps, 0.2).is_err());
    }

    #[test]
    fn diagnostics_report_weights() {
        let offs = [
            [0.05, 0.0],
            [0.0, 0.1],
            [-0.1, 0.05],
            [0.07, -0.08],
            [-0.06, -0.09],
        ];
        let nbs: Vec<Neighbor> = offs
            .iter()
            .enumerate()
            .map(|(k, o)| nb(k + 1, *o))
            .collect();
        let d = StencilCoefficients::build(Dim::Two, 0, &nbs, WeightKind::Mps, 0.2)
            .unwrap()
            .diagnostics();
        assert_eq!(d.neighbor_count, 5);
        assert_eq!(d.max_weight, 0.2 / 0.05 - 1.0);
        let far = (0.1f64 * 0.1 + 0.05 * 0.05).sqrt();
        assert_eq!(d.min_weight, 0.2 / far - 1.0);
        assert!(d.condition >= 1.0);
    }
}
