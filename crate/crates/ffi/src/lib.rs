//! C ABI over the `ddin` library.
//!
//! Every fallible entry point returns a [`DdinStatus`]; on failure a
//! human-readable message is available from [`ddin_last_error`] on the same
//! thread. Node sets and neighbor tables are opaque handles released with
//! their `_free` functions. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ddin::analysis::Method;
use ddin::cli::to_csv;
use ddin::{
    derivative_field, run_study, Bounds, Dim, Error, NeighborTable, NodeSet, Quantity, StudyConfig,
    TestFunction, WeightKind,
};

/// Result code of every fallible call. `DDIN_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDomain = 3,
    NotRegularGrid = 4,
    InvalidRadius = 5,
    InsufficientNeighbors = 6,
    DegenerateNeighborhood = 7,
    SingularWeight = 8,
    CoincidentNode = 9,
    LengthMismatch = 10,
    BufferTooSmall = 11,
    StudyFailed = 12,
    Io = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdinWeight {
    Uniform = 0,
    Mps = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdinFunction {
    Power = 0,
    Sinusoidal = 1,
}

/// Opaque node set.
pub struct DdinNodeSet(NodeSet);

/// Opaque radius-neighbor table.
pub struct DdinNeighborTable(NeighborTable);

/// Derivative jet at one node.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DdinJet {
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fxy: f64,
    pub fyy: f64,
}

/// Analytic value and jet of a built-in test function.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DdinAnalytic {
    pub f: f64,
    pub jet: DdinJet,
}

/// Convergence-study parameters. `sizes` may be null to use the default
/// ladder 26, 51, 101, 201.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DdinStudyConfig {
    pub function: DdinFunction,
    pub sizes: *const usize,
    pub sizes_len: usize,
    pub dr_frac: f64,
    pub r_frac: f64,
    pub weight: DdinWeight,
    pub seed: u64,
    pub include_boundary: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DdinStatus {
    match e {
        Error::InvalidDomain(_) | Error::UnsupportedAnisotropy { .. } => DdinStatus::InvalidDomain,
        Error::NotRegularGrid => DdinStatus::NotRegularGrid,
        Error::InvalidRadius(_) => DdinStatus::InvalidRadius,
        Error::InsufficientNeighbors { .. } => DdinStatus::InsufficientNeighbors,
        Error::DegenerateNeighborhood { .. } => DdinStatus::DegenerateNeighborhood,
        Error::SingularWeight(_) => DdinStatus::SingularWeight,
        Error::CoincidentNode => DdinStatus::CoincidentNode,
        Error::LengthMismatch { .. } => DdinStatus::LengthMismatch,
        Error::Study { .. } => DdinStatus::StudyFailed,
        Error::Io { .. } => DdinStatus::Io,
        _ => DdinStatus::InvalidArgument,
    }
}

struct Fail(DdinStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DdinStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, records any failure message, and converts panics.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> DdinStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DdinStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DdinStatus::Panic
        }
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

fn weight_kind(w: DdinWeight) -> WeightKind {
    match w {
        DdinWeight::Uniform => WeightKind::Uniform,
        DdinWeight::Mps => WeightKind::Mps,
    }
}

fn test_function(f: DdinFunction) -> TestFunction {
    match f {
        DdinFunction::Power => TestFunction::Power,
        DdinFunction::Sinusoidal => TestFunction::Sinusoidal,
    }
}

fn jet(j: &ddin::DerivativeJet) -> DdinJet {
    DdinJet {
        fx: j.fx,
        fy: j.fy,
        fxx: j.fxx,
        fxy: j.fxy,
        fyy: j.fyy,
    }
}

/// Message for the last failed call on this thread, or null after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ddin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Regular `nx` by `ny` grid on `[x_min, x_max] x [y_min, y_max]`. Pass
/// `ny = 1` with `y_min = y_max = 0` for a line of nodes.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_regular(
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    out: *mut *mut DdinNodeSet,
) -> DdinStatus {
    guard(|| {
        let nodes = if ny == 1 && y_min == y_max {
            NodeSet::regular_grid(Bounds::interval(x_min, x_max), &[nx])?
        } else {
            NodeSet::regular_grid(Bounds::rect([x_min, y_min], [x_max, y_max]), &[nx, ny])?
        };
        put(out, DdinNodeSet(nodes))
    })
}

/// Node set from `n` interleaved `(x, y)` pairs. `dim` is 1 or 2; `dx` is
/// the nominal spacing.
///
/// # Safety
/// `xy` must point to `2 * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_from_points(
    dim: usize,
    xy: *const f64,
    n: usize,
    dx: f64,
    out: *mut *mut DdinNodeSet,
) -> DdinStatus {
    guard(|| {
        let dim = Dim::from_usize(dim).ok_or_else(|| {
            Fail(
                DdinStatus::InvalidArgument,
                format!("dimension {dim} is not 1 or 2"),
            )
        })?;
        let coords = slice(xy, 2 * n, "xy")?;
        let points = coords.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        put(out, DdinNodeSet(NodeSet::from_points(dim, points, dx)?))
    })
}

/// Perturbed copy of a regular grid: every coordinate moves by at most `dr`.
///
/// # Safety
/// `nodes` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_perturb(
    nodes: *const DdinNodeSet,
    dr: f64,
    seed: u64,
    out: *mut *mut DdinNodeSet,
) -> DdinStatus {
    guard(|| {
        let nodes = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        put(out, DdinNodeSet(nodes.0.perturb(dr, seed)?))
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `nodes` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_len(nodes: *const DdinNodeSet) -> usize {
    nodes.as_ref().map_or(0, |n| n.0.len())
}

/// Copies node coordinates as interleaved `(x, y)` pairs into `xy`, which
/// holds `cap` doubles (at least `2 * len`).
///
/// # Safety
/// `nodes` must be a live handle; `xy` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_points(
    nodes: *const DdinNodeSet,
    xy: *mut f64,
    cap: usize,
) -> DdinStatus {
    guard(|| {
        let nodes = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        let need = 2 * nodes.0.len();
        if cap < need {
            return Err(Fail(
                DdinStatus::BufferTooSmall,
                format!("need {need} doubles, got {cap}"),
            ));
        }
        if need > 0 && xy.is_null() {
            return Err(null("xy"));
        }
        for (k, p) in nodes.0.points().iter().enumerate() {
            *xy.add(2 * k) = p[0];
            *xy.add(2 * k + 1) = p[1];
        }
        Ok(())
    })
}

/// # Safety
/// `nodes` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ddin_nodeset_free(nodes: *mut DdinNodeSet) {
    if !nodes.is_null() {
        drop(Box::from_raw(nodes));
    }
}

/// Neighbors strictly within `r_cut` of every node.
///
/// # Safety
/// `nodes` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_neighbors_build(
    nodes: *const DdinNodeSet,
    r_cut: f64,
    out: *mut *mut DdinNeighborTable,
) -> DdinStatus {
    guard(|| {
        let nodes = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        put(
            out,
            DdinNeighborTable(NeighborTable::build(&nodes.0, r_cut)?),
        )
    })
}

/// Writes the neighbor count of node `i` to `count`.
///
/// # Safety
/// `table` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_neighbors_count(
    table: *const DdinNeighborTable,
    i: usize,
    count: *mut usize,
) -> DdinStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        if count.is_null() {
            return Err(null("count"));
        }
        if i >= table.0.len() {
            return Err(Fail(
                DdinStatus::InvalidArgument,
                format!("node {i} out of range ({})", table.0.len()),
            ));
        }
        *count = table.0.neighbors(i).len();
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ddin_neighbors_free(table: *mut DdinNeighborTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Least-squares derivative jets of `field` (one value per node). Writes
/// `jets[k]` and `status[k]` for every node; a node whose stencil was
/// rejected gets a zero jet and a nonzero status. The call itself fails only
/// for invalid arguments.
///
/// # Safety
/// `field`, `jets` and `status` must each hold `n` elements, and the handles
/// must be live.
#[no_mangle]
pub unsafe extern "C" fn ddin_derivatives(
    nodes: *const DdinNodeSet,
    table: *const DdinNeighborTable,
    field: *const f64,
    n: usize,
    weight: DdinWeight,
    jets: *mut DdinJet,
    status: *mut DdinStatus,
) -> DdinStatus {
    guard(|| {
        let nodes = nodes.as_ref().ok_or_else(|| null("nodes"))?;
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let values = slice(field, n, "field")?;
        if n > 0 && (jets.is_null() || status.is_null()) {
            return Err(null("jets or status"));
        }
        if table.0.len() != nodes.0.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.0.len(),
                found: table.0.len(),
            }
            .into());
        }
        let result = derivative_field(&nodes.0, &table.0, values, weight_kind(weight))?;
        for (k, j) in result.jets().iter().enumerate() {
            let (v, s) = match j {
                Ok(j) => (jet(j), DdinStatus::Ok),
                Err(e) => (DdinJet::default(), status_of(e)),
            };
            *jets.add(k) = v;
            *status.add(k) = s;
        }
        Ok(())
    })
}

/// Analytic value and derivatives of a built-in test function at `(x, y)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_test_function_eval(
    function: DdinFunction,
    x: f64,
    y: f64,
    out: *mut DdinAnalytic,
) -> DdinStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = test_function(function).eval_jet([x, y]);
        *out = DdinAnalytic {
            f: a.f,
            jet: DdinJet {
                fx: a.get(Quantity::Fx),
                fy: a.get(Quantity::Fy),
                fxx: a.get(Quantity::Fxx),
                fxy: a.get(Quantity::Fxy),
                fyy: a.get(Quantity::Fyy),
            },
        };
        Ok(())
    })
}

/// Runs a convergence study over all methods and returns the CSV table as
/// a NUL-terminated string owned by the caller; release it with
/// [`ddin_string_free`].
///
/// # Safety
/// `config` must be readable, `config.sizes` must hold `sizes_len` values
/// when non-null, and `csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ddin_study_csv(
    config: *const DdinStudyConfig,
    csv: *mut *mut c_char,
) -> DdinStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if csv.is_null() {
            return Err(null("csv"));
        }
        let sizes = if c.sizes.is_null() {
            StudyConfig::DEFAULT_SIZES.to_vec()
        } else {
            slice(c.sizes, c.sizes_len, "sizes")?.to_vec()
        };
        let study = StudyConfig {
            function: test_function(c.function),
            sizes,
            dr_frac: c.dr_frac,
            r_frac: c.r_frac,
            weight: weight_kind(c.weight),
            seed: c.seed,
            include_boundary: c.include_boundary,
            methods: Method::ALL.to_vec(),
            ..StudyConfig::power_preset()
        };
        let text = to_csv(&run_study(&study)?);
        *csv = CString::new(text).expect("csv has no nul bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ddin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
