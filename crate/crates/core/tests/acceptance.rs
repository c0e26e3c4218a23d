//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero when any
//! criterion is red.

use std::process::Command;
use std::time::Instant;

use ddin::analysis::Method;
use ddin::cli::to_csv;
use ddin::ls_stencil::StencilSet;
use ddin::{
    derivative_field, run_study, Bounds, DerivativeField, Dim, FdScheme, FdSchemes, NeighborTable,
    NodeSet, Quantity, StudyConfig, StudyReport, TestFunction, WeightKind,
};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

struct Draws(SplitMix64);

impl Draws {
    fn new(seed: u64) -> Self {
        Draws(SplitMix64::seed_from_u64(seed))
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    fn seed(&mut self) -> u64 {
        self.0.next_u64()
    }
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

fn band(v: Option<f64>, lo: f64, hi: f64) -> bool {
    v.is_some_and(|v| (lo..=hi).contains(&v))
}

fn show(v: Option<f64>) -> String {
    v.map_or("none".into(), |v| format!("{v:.3}"))
}

// 1 -------------------------------------------------------------------------

fn quadratic_exactness() -> Verdict {
    let start = Instant::now();
    let mut rng = Draws::new(20_241);
    let mut slots = 0usize;
    let mut failed_nodes = 0usize;
    let mut worst = 0.0f64;
    let mut first_bad = None;
    for trial in 0..100 {
        let c: [f64; 6] = std::array::from_fn(|_| rng.uniform(-10.0, 10.0));
        let grid = NodeSet::regular_grid(Bounds::square(-1.0, 1.0), &[51, 51]).unwrap();
        let nodes = grid.perturb(0.25 * grid.dx(), rng.seed()).unwrap();
        let table = NeighborTable::build(&nodes, 2.5 * grid.dx()).unwrap();
        let values: Vec<f64> = nodes
            .points()
            .iter()
            .map(|&[x, y]| c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y)
            .collect();
        for weight in [WeightKind::Uniform, WeightKind::Mps] {
            let field = derivative_field(&nodes, &table, &values, weight).unwrap();
            failed_nodes += field.failed_count();
            for (k, jet) in field.jets().iter().enumerate() {
                let Ok(jet) = jet else { continue };
                let [x, y] = nodes.points()[k];
                let exact = [
                    c[1] + 2.0 * c[3] * x + c[4] * y,
                    c[2] + c[4] * x + 2.0 * c[5] * y,
                    2.0 * c[3],
                    c[4],
                    2.0 * c[5],
                ];
                for (q, e) in Quantity::ALL.into_iter().zip(exact) {
                    slots += 1;
                    let err = (jet.get(q) - e).abs();
                    let allowed = 1e-12 + 1e-9 * e.abs();
                    worst = worst.max(err / allowed);
                    if err > allowed && first_bad.is_none() {
                        first_bad = Some(format!(
                            "trial {trial} node {k} {weight} {q}: {} vs {e}",
                            jet.get(q)
                        ));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = first_bad.is_none() && secs <= 30.0 && slots > 0;
    let mut detail = format!(
        "{slots} slots, worst err/allowed {worst:.2e}, {failed_nodes} rejected stencils, {secs:.2} s (limit 30 s)"
    );
    if let Some(b) = first_bad {
        detail = format!("{b}; {detail}");
    }
    Verdict::new(passed, detail)
}

// 2 -------------------------------------------------------------------------

fn power_orders() -> (Verdict, StudyReport) {
    let start = Instant::now();
    let config = StudyConfig::power_preset();
    let report = run_study(&config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let fx = report.slope(Method::Ddin, Quantity::Fx);
    let fxx = report.slope(Method::Ddin, Quantity::Fxx);
    let fxy = report.slope(Method::Ddin, Quantity::Fxy);
    let passed = band(fx, 1.6, 2.4) && band(fxx, 0.6, 1.4) && band(fxy, 0.6, 1.4) && secs <= 60.0;
    let detail = format!(
        "DDIN fx {} [1.6,2.4], fxx {} [0.6,1.4], fxy {} [0.6,1.4], study {secs:.2} s (limit 60 s)",
        show(fx),
        show(fxx),
        show(fxy)
    );
    (Verdict::new(passed, detail), report)
}

// 3 -------------------------------------------------------------------------

fn symmetric_superconvergence() -> Verdict {
    let config = StudyConfig {
        dr_frac: 0.0,
        methods: vec![Method::Ddin],
        ..StudyConfig::power_preset()
    };
    let report = run_study(&config).unwrap();
    let fxx = report.slope(Method::Ddin, Quantity::Fxx);
    Verdict::new(
        band(fxx, 1.6, 2.4),
        format!("DDIN fxx at dr 0: {} [1.6,2.4]", show(fxx)),
    )
}

// 4 -------------------------------------------------------------------------

fn fd_slopes(
    first: FdScheme,
    second: FdScheme,
    include_boundary: bool,
) -> (Option<f64>, Option<f64>) {
    let config = StudyConfig {
        methods: vec![Method::Fd],
        include_boundary,
        fd: FdSchemes { first, second },
        ..StudyConfig::power_preset()
    };
    let report = run_study(&config).unwrap();
    (
        report.slope(Method::Fd, Quantity::Fx),
        report.slope(Method::Fd, Quantity::Fxx),
    )
}

fn fd_orders() -> Verdict {
    let (central_first, central_second) =
        fd_slopes(FdScheme::CentralFirst, FdScheme::CentralSecond, true);
    let (forward_first, one_sided) =
        fd_slopes(FdScheme::ForwardFirst, FdScheme::OneSidedSecond, true);
    let passed = band(central_first, 1.8, 2.2)
        && band(forward_first, 0.8, 1.2)
        && band(central_second, 1.8, 2.2)
        && band(one_sided, 0.8, 1.2);
    let (ci, csi) = fd_slopes(FdScheme::CentralFirst, FdScheme::CentralSecond, false);
    let (fi, osi) = fd_slopes(FdScheme::ForwardFirst, FdScheme::OneSidedSecond, false);
    Verdict::new(
        passed,
        format!(
            "all defined nodes: central-1st {} [1.8,2.2], forward-1st {} [0.8,1.2], central-2nd {} [1.8,2.2], one-sided-2nd {} [0.8,1.2]; interior-only (info): {} / {} / {} / {}",
            show(central_first),
            show(forward_first),
            show(central_second),
            show(one_sided),
            show(ci),
            show(fi),
            show(csi),
            show(osi)
        ),
    )
}

// 5 -------------------------------------------------------------------------

fn sinusoidal_study() -> Verdict {
    let mut passed = true;
    let mut parts = Vec::new();
    for weight in [WeightKind::Mps, WeightKind::Uniform] {
        let config = StudyConfig {
            weight,
            ..StudyConfig::sinusoidal_preset()
        };
        let report = match run_study(&config) {
            Ok(r) => r,
            Err(e) => {
                passed = false;
                parts.push(format!("weight {weight}: study failed: {e}"));
                continue;
            }
        };
        let fx = report.slope(Method::Ddinw, Quantity::Fx);
        let fxx = report.slope(Method::Ddinw, Quantity::Fxx);
        let fxy = report.slope(Method::Ddinw, Quantity::Fxy);
        let ok = band(fx, 1.6, 2.4) && band(fxx, 0.6, 1.4) && band(fxy, 0.6, 1.4);
        let csv = to_csv(&report);
        let side_by_side = csv.lines().any(|l| l.starts_with("sinusoidal,ddin,"))
            && csv.lines().any(|l| l.starts_with("sinusoidal,ddinw,"));
        passed &= ok && side_by_side;
        parts.push(format!(
            "weight {weight}: DDINW fx {} fxx {} fxy {}{}{}",
            show(fx),
            show(fxx),
            show(fxy),
            if ok { "" } else { " (out of band)" },
            if side_by_side {
                ""
            } else {
                " (csv lacks ddin/ddinw rows)"
            }
        ));
    }
    Verdict::new(passed, parts.join("; "))
}

// 6 -------------------------------------------------------------------------

fn oracle_equivalence() -> Verdict {
    let mut rng = Draws::new(6);
    let mut total_pairs = 0usize;
    for trial in 0..50 {
        let n = 1 + rng.below(2000) as usize;
        let side = rng.uniform(0.5, 4.0);
        let points: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.uniform(-side, side), rng.uniform(-side, side)])
            .collect();
        let nodes = NodeSet::from_points(Dim::Two, points, 0.1).unwrap();
        let r_cut = side * rng.uniform(0.005, 0.4);
        let fast = NeighborTable::build(&nodes, r_cut).unwrap();
        let slow = NeighborTable::brute_force(&nodes, r_cut).unwrap();
        if fast != slow {
            return Verdict::new(
                false,
                format!("trial {trial}: N {n}, r_cut {r_cut} disagrees"),
            );
        }
        total_pairs += fast.iter().map(<[_]>::len).sum::<usize>();
    }
    Verdict::new(
        true,
        format!("50 configurations identical ({total_pairs} neighbor entries)"),
    )
}

// 7 -------------------------------------------------------------------------

fn rel_diff(a: &DerivativeField, b: &DerivativeField, q: Quantity, factor: f64) -> f64 {
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for (x, y) in a.values(q).iter().zip(b.values(q)) {
        if let (Some(x), Some(y)) = (x, y) {
            diff = diff.max((x * factor - y).abs());
            scale = scale.max(y.abs());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn same_validity(a: &DerivativeField, b: &DerivativeField) -> bool {
    a.jets()
        .iter()
        .zip(b.jets())
        .all(|(x, y)| x.is_ok() == y.is_ok())
}

fn dyadic_cloud(rng: &mut Draws) -> NodeSet {
    let grid = NodeSet::regular_grid(Bounds::square(-1.0, 1.0), &[21, 21]).unwrap();
    let nodes = grid.perturb(0.25 * grid.dx(), rng.seed()).unwrap();
    let q = (1u64 << 24) as f64;
    let points = nodes
        .points()
        .iter()
        .map(|p| [(p[0] * q).round() / q, (p[1] * q).round() / q])
        .collect();
    NodeSet::from_points(Dim::Two, points, grid.dx()).unwrap()
}

fn invariance() -> Verdict {
    let mut rng = Draws::new(7);
    let f = |p: &[f64; 2]| (1.3 * p[0]).sin() * (0.7 * p[1]).cos() + p[0] * p[0] * p[1];
    let (mut translation, mut linearity, mut scaling, mut constant) = (true, 0.0f64, 0.0f64, true);
    let mut notes = Vec::new();
    for trial in 0..10 {
        let nodes = dyadic_cloud(&mut rng);
        let r_cut = 2.5 * nodes.dx();
        let values: Vec<f64> = nodes.points().iter().map(f).collect();
        for weight in [WeightKind::Uniform, WeightKind::Mps] {
            let table = NeighborTable::build(&nodes, r_cut).unwrap();
            let base = derivative_field(&nodes, &table, &values, weight).unwrap();

            let shift = [
                rng.below(64) as f64 / 8.0 - 4.0,
                rng.below(64) as f64 / 8.0 - 4.0,
            ];
            let moved = nodes.translated(shift);
            let moved_table = NeighborTable::build(&moved, r_cut).unwrap();
            let shifted = derivative_field(&moved, &moved_table, &values, weight).unwrap();
            let identical = base
                .jets()
                .iter()
                .zip(shifted.jets())
                .all(|(a, b)| match (a, b) {
                    (Ok(a), Ok(b)) => Quantity::ALL
                        .iter()
                        .all(|&q| a.get(q).to_bits() == b.get(q).to_bits()),
                    (Err(_), Err(_)) => true,
                    _ => false,
                });
            if !identical && translation {
                notes.push(format!(
                    "translation differs (trial {trial}, {weight}, shift {shift:?})"
                ));
            }
            translation &= identical;

            let stencils = StencilSet::build(&nodes, &table, weight).unwrap();
            let other: Vec<f64> = nodes.points().iter().map(|p| (p[0] - p[1]).exp()).collect();
            let (a, b) = (rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
            let mix: Vec<f64> = values
                .iter()
                .zip(&other)
                .map(|(u, v)| a * u + b * v)
                .collect();
            let (fu, fv, fm) = (
                stencils.apply(&values).unwrap(),
                stencils.apply(&other).unwrap(),
                stencils.apply(&mix).unwrap(),
            );
            for q in Quantity::ALL {
                let combined: Vec<Option<f64>> = fu
                    .values(q)
                    .iter()
                    .zip(fv.values(q))
                    .map(|(u, v)| Some(a * (*u)? + b * v?))
                    .collect();
                let direct = fm.values(q);
                let (mut diff, mut scale) = (0.0f64, 0.0f64);
                for (c, d) in combined.iter().zip(&direct) {
                    if let (Some(c), Some(d)) = (c, d) {
                        diff = diff.max((c - d).abs());
                        scale = scale.max(d.abs());
                    }
                }
                linearity = linearity.max(if scale > 0.0 { diff / scale } else { diff });
            }

            let s = rng.uniform(0.05, 20.0);
            let big = nodes.scaled(s);
            let big_table = NeighborTable::build(&big, r_cut * s).unwrap();
            let stretched = derivative_field(&big, &big_table, &values, weight).unwrap();
            if !same_validity(&base, &stretched) {
                notes.push(format!(
                    "scaling changed stencil validity (trial {trial}, s {s})"
                ));
                scaling = f64::INFINITY;
            }
            for q in Quantity::ALL {
                let factor = if q.is_second_order() { s * s } else { s };
                scaling = scaling.max(rel_diff(&stretched, &base, q, factor));
            }

            let flat = derivative_field(&nodes, &table, &vec![-2.75; nodes.len()], weight).unwrap();
            constant &= flat
                .jets()
                .iter()
                .flatten()
                .all(|j| Quantity::ALL.iter().all(|&q| j.get(q) == 0.0));
        }
    }
    let passed = translation && linearity <= 1e-12 && scaling <= 1e-12 && constant;
    let mut detail = format!(
        "translation bit-identical {translation}, linearity {linearity:.1e} (<= 1e-12), scaling {scaling:.1e} (<= 1e-12), constant-field zero {constant}"
    );
    if !notes.is_empty() {
        detail.push_str(&format!("; {}", notes.join("; ")));
    }
    Verdict::new(passed, detail)
}

// 8 -------------------------------------------------------------------------

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 2] = [
        &["study"],
        &[
            "study",
            "--function",
            "sinusoidal",
            "--r-frac",
            "3.0",
            "--weight",
            "none",
            "--sizes",
            "26,51,101",
        ],
    ];
    for (c, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let csv = dir.path().join(format!("run{c}_{threads}.csv"));
            let svg = dir.path().join(format!("run{c}_{threads}.svg"));
            let status = Command::new(env!("CARGO_BIN_EXE_ddin"))
                .args(*args)
                .arg("--out")
                .arg(&csv)
                .arg("--svg")
                .arg(&svg)
                .env("RAYON_NUM_THREADS", threads)
                .status()
                .unwrap();
            if !status.success() {
                return Verdict::new(false, format!("{args:?} exited with {status}"));
            }
            outputs.push((std::fs::read(&csv).unwrap(), std::fs::read(&svg).unwrap()));
        }
        if outputs[0] != outputs[1] {
            return Verdict::new(
                false,
                format!("{args:?}: output differs between 1 and 4 threads"),
            );
        }
    }
    Verdict::new(
        true,
        "CSV and SVG byte-identical across 1 and 4 worker threads (2 commands)",
    )
}

// 9 -------------------------------------------------------------------------

fn analytic_jets() -> Verdict {
    let h = 1e-4;
    let mut rng = Draws::new(9);
    let mut worst = 0.0f64;
    for function in [TestFunction::Power, TestFunction::Sinusoidal] {
        let b = function.domain();
        for _ in 0..200 {
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
            for (q, approx) in Quantity::ALL.into_iter().zip(fd) {
                let e = exact.get(q);
                worst = worst.max((approx - e).abs() / e.abs().max(1.0));
            }
        }
    }
    Verdict::new(
        worst <= 1e-6,
        format!("400 points, worst relative gap {worst:.2e} (<= 1e-6)"),
    )
}

fn main() {
    let mut verdicts: Vec<(&str, Verdict)> = Vec::new();
    verdicts.push(("1 quadratic exactness", quadratic_exactness()));
    let (v2, _) = power_orders();
    verdicts.push(("2 power-function orders", v2));
    verdicts.push((
        "3 regular-node superconvergence",
        symmetric_superconvergence(),
    ));
    verdicts.push(("4 finite-difference orders", fd_orders()));
    verdicts.push(("5 sinusoidal study", sinusoidal_study()));
    verdicts.push(("6 neighbor oracle", oracle_equivalence()));
    verdicts.push(("7 invariances", invariance()));
    verdicts.push(("8 determinism", determinism()));
    verdicts.push(("9 analytic jets", analytic_jets()));

    let mut failed = 0;
    for (name, v) in &verdicts {
        println!(
            "{} {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        verdicts.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
