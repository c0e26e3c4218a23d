//! Quick self-checks behind the `selftest` subcommand.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::ls_stencil::{derivative_field, Quantity};
use crate::neighbor_search::NeighborTable;
use crate::node_model::{Bounds, Dim, NodeSet};
use crate::test_functions::TestFunction;
use crate::weighting::WeightKind;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Draws(SplitMix64);

impl Draws {
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }
}

/// `|a - b| <= 1e-12 + 1e-9 |b|`
pub fn quadratic_close(numeric: f64, exact: f64) -> bool {
    (numeric - exact).abs() <= 1e-12 + 1e-9 * exact.abs()
}

fn quadratic_exactness(trials: usize, rng: &mut Draws) -> Outcome {
    let mut checked = 0usize;
    let mut worst = String::new();
    let mut passed = true;
    for t in 0..trials {
        let coeffs: [f64; 6] = std::array::from_fn(|_| rng.uniform(-10.0, 10.0));
        let function = TestFunction::Quadratic(coeffs);
        let grid = NodeSet::regular_grid(function.domain(), &[21, 21]).expect("valid grid");
        let nodes = grid
            .perturb(0.25 * grid.dx(), rng.0.next_u64())
            .expect("regular grid");
        let table = NeighborTable::build(&nodes, 2.5 * grid.dx()).expect("positive radius");
        let values: Vec<f64> = nodes.points().iter().map(|&p| function.value(p)).collect();
        for weight in [WeightKind::Uniform, WeightKind::Mps] {
            let field = derivative_field(&nodes, &table, &values, weight).expect("lengths match");
            for (k, jet) in field.jets().iter().enumerate() {
                let Ok(jet) = jet else { continue };
                let exact = function.eval_jet(nodes.points()[k]);
                for q in Quantity::ALL {
                    checked += 1;
                    if passed && !quadratic_close(jet.get(q), exact.get(q)) {
                        passed = false;
                        worst = format!(
                            "trial {t}, node {k}, {weight} {q}: {} vs {}",
                            jet.get(q),
                            exact.get(q)
                        );
                    }
                }
            }
        }
    }
    Outcome {
        name: "quadratic exactness",
        passed,
        detail: if passed {
            format!("{checked} jet slots reproduced")
        } else {
            worst
        },
    }
}

fn neighbor_oracle(trials: usize, rng: &mut Draws) -> Outcome {
    for t in 0..trials {
        let n = 1 + rng.below(400) as usize;
        let points = (0..n)
            .map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)])
            .collect();
        let nodes = NodeSet::from_points(Dim::Two, points, 0.1).expect("finite points");
        let r_cut = rng.uniform(0.01, 0.5);
        let fast = NeighborTable::build(&nodes, r_cut).expect("positive radius");
        let slow = NeighborTable::brute_force(&nodes, r_cut).expect("positive radius");
        if fast != slow {
            return Outcome {
                name: "neighbor oracle",
                passed: false,
                detail: format!(
                    "trial {t}: cell index disagrees with brute force (N = {n}, r = {r_cut})"
                ),
            };
        }
    }
    Outcome {
        name: "neighbor oracle",
        passed: true,
        detail: format!("{trials} random configurations agree"),
    }
}

fn analytic_jets(rng: &mut Draws) -> Outcome {
    let h = 1e-4;
    for function in [TestFunction::Power, TestFunction::Sinusoidal] {
        let b: Bounds = function.domain();
        for _ in 0..50 {
            let x = rng.uniform(b.min[0], b.max[0]);
            let y = rng.uniform(b.min[1], b.max[1]);
            let f = |dx: f64, dy: f64| function.value([x + dx, y + dy]);
            let fd = [
                (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h),
                (f(0.0, h) - f(0.0, -h)) / (2.0 * h),
                (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h),
                (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
                (f(0.0, h) - 2.0 * f(0.0, 0.0) + f(0.0, -h)) / (h * h),
            ];
            let exact = function.eval_jet([x, y]);
            for (q, approx) in Quantity::ALL.iter().zip(fd) {
                let e = exact.get(*q);
                if (approx - e).abs() > 1e-6 * e.abs().max(1.0) {
                    return Outcome {
                        name: "analytic jets",
                        passed: false,
                        detail: format!("{} {q} at ({x}, {y}): {e} vs {approx}", function.name()),
                    };
                }
            }
        }
    }
    Outcome {
        name: "analytic jets",
        passed: true,
        detail: "power and sinusoidal derivatives match central differences".into(),
    }
}

pub fn run(trials: usize, seed: u64) -> Vec<Outcome> {
    let mut rng = Draws(SplitMix64::seed_from_u64(seed));
    vec![
        quadratic_exactness(trials, &mut rng),
        neighbor_oracle(trials, &mut rng),
        analytic_jets(&mut rng),
    ]
}
