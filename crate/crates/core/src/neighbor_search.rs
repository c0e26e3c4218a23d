//! Fixed-radius neighbor lists over a uniform cell index.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::node_model::{NodeSet, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// `position[index] - position[center]`
    pub offset: Point,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    r_cut: f64,
    lists: Vec<Vec<Neighbor>>,
}

#[inline]
fn neighbor_of(points: &[Point], center: usize, j: usize) -> Neighbor {
    let (pi, pj) = (points[center], points[j]);
    let offset = [pj[0] - pi[0], pj[1] - pi[1]];
    Neighbor {
        index: j,
        offset,
        dist: (offset[0] * offset[0] + offset[1] * offset[1]).sqrt(),
    }
}

fn check_radius(r_cut: f64) -> Result<()> {
    if r_cut.is_finite() && r_cut > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r_cut))
    }
}

impl NeighborTable {
    /// Every node at distance strictly below `r_cut`, self excluded, sorted
    /// by index. Uses square cells of side `r_cut`.
    pub fn build(nodes: &NodeSet, r_cut: f64) -> Result<NeighborTable> {
        check_radius(r_cut)?;
        let points = nodes.points();
        let origin = nodes.bounds().min;
        let cell_of = |p: &Point| {
            (
                ((p[0] - origin[0]) / r_cut).floor() as i64,
                ((p[1] - origin[1]) / r_cut).floor() as i64,
            )
        };

        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, p) in points.iter().enumerate() {
            cells.entry(cell_of(p)).or_default().push(k);
        }

        let lists = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let (cx, cy) = cell_of(&points[i]);
                let mut list = Vec::new();
                for ox in -1..=1 {
                    for oy in -1..=1 {
                        let Some(bucket) = cells.get(&(cx + ox, cy + oy)) else {
                            continue;
                        };
                        for &j in bucket {
                            if j == i {
                                continue;
                            }
                            let nb = neighbor_of(points, i, j);
                            if nb.dist < r_cut {
                                list.push(nb);
                            }
                        }
                    }
                }
                list.sort_unstable_by_key(|nb| nb.index);
                list
            })
            .collect();

        Ok(NeighborTable { r_cut, lists })
    }

    /// All-pairs reference search. O(N²); intended as a test oracle.
    pub fn brute_force(nodes: &NodeSet, r_cut: f64) -> Result<NeighborTable> {
        check_radius(r_cut)?;
        let points = nodes.points();
        let lists = (0..points.len())
            .map(|i| {
                (0..points.len())
                    .filter(|&j| j != i)
                    .map(|j| neighbor_of(points, i, j))
                    .filter(|nb| nb.dist < r_cut)
                    .collect()
            })
            .collect();
        Ok(NeighborTable { r_cut, lists })
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[Neighbor] {
        &self.lists[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Neighbor]> {
        self.lists.iter().map(Vec::as_slice)
    }
}
