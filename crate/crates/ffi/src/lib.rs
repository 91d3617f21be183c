//! C ABI for the kamrfp solver.
//!
//! Networks and solutions are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`KamrfpStatus`]; on
//! failure the message is available from [`kamrfp_last_error_message`] on the
//! same thread. Strings returned through `char **` out-parameters are owned
//! by the caller and released with [`kamrfp_string_free`]. Rational values
//! are exact `p/q` strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kamrfp::attack::{self, AttackOptions, DEFAULT_ENUMERATION_BUDGET};
use kamrfp::model::{self, ObjectiveMode, SolveOptions, Solution, DEFAULT_MAX_VARS};
use kamrfp::report::{self, Timings};
use kamrfp::{ArcId, Error, Flow, InputFormat, Network};

/// Status codes. Values 2 to 4 match the exit codes of the command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KamrfpStatus {
    Ok = 0,
    /// Parse error, invalid network, infeasible flow or bad `k`.
    InvalidInput = 2,
    /// Model size cap or enumeration budget exceeded.
    BudgetExceeded = 3,
    /// The solver produced a result that failed its own checks.
    InvariantViolation = 4,
    NullPointer = 10,
    /// A string argument was not valid UTF-8, or an enum value was out of range.
    InvalidArgument = 11,
    /// Arc id outside `1..=m`.
    OutOfRange = 12,
    Panic = 13,
}

/// Values accepted by the `format` argument of [`kamrfp_network_parse`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KamrfpFormat {
    Dimacs = 0,
    Json = 1,
}

/// Values accepted by [`KamrfpSolveOptions::mode`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KamrfpMode {
    TwoPhase = 0,
    Combined = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KamrfpSolveOptions {
    /// A [`KamrfpMode`] value.
    pub mode: u32,
    /// Run the exhaustive attacker on the result.
    pub certify: bool,
    pub max_vars: usize,
    /// Largest number of k-subsets enumerated during certification.
    pub attack_budget: u64,
}

/// Parsed network.
pub struct KamrfpNetwork {
    net: Network,
}

/// Result of a solve, together with the network and `k` it was computed for.
pub struct KamrfpSolution {
    net: Network,
    k: usize,
    sol: Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: KamrfpStatus, msg: impl Into<String>) -> KamrfpStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> KamrfpStatus {
    let status = match e.exit_code() {
        3 => KamrfpStatus::BudgetExceeded,
        4 => KamrfpStatus::InvariantViolation,
        _ => KamrfpStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> KamrfpStatus) -> KamrfpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(KamrfpStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, KamrfpStatus> {
    if p.is_null() {
        return Err(fail(KamrfpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KamrfpStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> KamrfpStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            KamrfpStatus::Ok
        }
        Err(_) => fail(KamrfpStatus::InvariantViolation, "output contains a nul byte"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(KamrfpStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn kamrfp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kamrfp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn kamrfp_solve_options_default() -> KamrfpSolveOptions {
    KamrfpSolveOptions {
        mode: KamrfpMode::TwoPhase as u32,
        certify: true,
        max_vars: DEFAULT_MAX_VARS,
        attack_budget: DEFAULT_ENUMERATION_BUDGET,
    }
}

/// Parses a network from NUL-terminated text; `format` is a [`KamrfpFormat`] value.
///
/// # Safety
/// `text` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_network_parse(
    text: *const c_char,
    format: u32,
    out: *mut *mut KamrfpNetwork,
) -> KamrfpStatus {
    non_null!(out);
    guard(|| {
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let format = match format {
            f if f == KamrfpFormat::Dimacs as u32 => InputFormat::Dimacs,
            f if f == KamrfpFormat::Json as u32 => InputFormat::Json,
            f => return fail(KamrfpStatus::InvalidArgument, format!("unknown format {f}")),
        };
        match Network::parse(text, format) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(KamrfpNetwork { net }));
                KamrfpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `net` must come from [`kamrfp_network_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_network_free(net: *mut KamrfpNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_network_vertex_count(net: *const KamrfpNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.net.vertex_count())
}

/// Number of real arcs, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_network_arc_count(net: *const KamrfpNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.net.arc_count())
}

/// Solves for `k` deleted arcs. A null `options` means the defaults.
///
/// # Safety
/// `net` must be a live handle, `options` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solve(
    net: *const KamrfpNetwork,
    k: usize,
    options: *const KamrfpSolveOptions,
    out: *mut *mut KamrfpSolution,
) -> KamrfpStatus {
    non_null!(net, out);
    guard(|| {
        *out = ptr::null_mut();
        let o = options.as_ref().copied().unwrap_or_else(|| kamrfp_solve_options_default());
        let mode = match o.mode {
            m if m == KamrfpMode::TwoPhase as u32 => ObjectiveMode::TwoPhase,
            m if m == KamrfpMode::Combined as u32 => ObjectiveMode::Combined,
            m => return fail(KamrfpStatus::InvalidArgument, format!("unknown mode {m}")),
        };
        let opts = SolveOptions {
            mode,
            certify: o.certify,
            max_vars: o.max_vars,
            attack: AttackOptions { budget: o.attack_budget, parallel: true },
            ..Default::default()
        };
        let net = &(*net).net;
        match model::solve_kamrfp(net, k, &opts) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(KamrfpSolution { net: net.clone(), k, sol }));
                KamrfpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `sol` must come from [`kamrfp_solve`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_free(sol: *mut KamrfpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Maximum flow value as a rational string.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_fstar(sol: *const KamrfpSolution, out: *mut *mut c_char) -> KamrfpStatus {
    non_null!(sol, out);
    write_string(out, (*sol).sol.fstar.to_string())
}

/// Guaranteed residual value after the worst attack.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_theta(sol: *const KamrfpSolution, out: *mut *mut c_char) -> KamrfpStatus {
    non_null!(sol, out);
    write_string(out, (*sol).sol.theta.to_string())
}

/// Worst-case loss, `fstar - theta`.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_loss(sol: *const KamrfpSolution, out: *mut *mut c_char) -> KamrfpStatus {
    non_null!(sol, out);
    write_string(out, (*sol).sol.loss.to_string())
}

/// Flow on real arc `arc` (1-based).
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_flow_value(
    sol: *const KamrfpSolution,
    arc: usize,
    out: *mut *mut c_char,
) -> KamrfpStatus {
    non_null!(sol, out);
    let s = &*sol;
    if arc == 0 || arc > s.net.arc_count() {
        return fail(KamrfpStatus::OutOfRange, format!("arc {arc} outside 1..={}", s.net.arc_count()));
    }
    write_string(out, s.sol.flow.get(ArcId(arc)).to_string())
}

/// Whether the exhaustive attacker confirmed `theta`.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_certified(sol: *const KamrfpSolution) -> bool {
    sol.as_ref().is_some_and(|s| s.sol.certified)
}

/// Copies up to `capacity` arc ids of the worst attack into `buf` and returns
/// the full length. The attack is empty when certification was skipped.
///
/// # Safety
/// `sol` must be null or a live handle; `buf` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_worst_attack(
    sol: *const KamrfpSolution,
    buf: *mut usize,
    capacity: usize,
) -> usize {
    let Some(s) = sol.as_ref() else { return 0 };
    let attack = &s.sol.worst_attack;
    if !buf.is_null() {
        for (i, a) in attack.iter().take(capacity).enumerate() {
            *buf.add(i) = a.0;
        }
    }
    attack.len()
}

/// Full solve report in the JSON layout of the command-line tool.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_solution_to_json(sol: *const KamrfpSolution, out: *mut *mut c_char) -> KamrfpStatus {
    non_null!(sol, out);
    let s = &*sol;
    let mut t = Timings::default();
    t.push("fstar", s.sol.timings.fstar);
    t.push("build", s.sol.timings.build);
    t.push("solve", s.sol.timings.solve);
    t.push("certify", s.sol.timings.certify);
    write_string(out, report::solve_report(&s.net, s.k, &s.sol, &t, false).to_string())
}

/// Runs the exhaustive attacker on a flow given as `f <arc> <value>` lines
/// and writes the JSON attack report.
///
/// # Safety
/// `net` must be a live handle, `flow_text` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kamrfp_attack(
    net: *const KamrfpNetwork,
    flow_text: *const c_char,
    k: usize,
    budget: u64,
    out: *mut *mut c_char,
) -> KamrfpStatus {
    non_null!(net, out);
    guard(|| {
        *out = ptr::null_mut();
        let text = match read_str(flow_text, "flow_text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let net = &(*net).net;
        let result = Flow::parse(text, net)
            .and_then(|phi| attack::worst_case_with(net, &phi, k, &AttackOptions { budget, parallel: true }));
        match result {
            Ok(rep) => write_string(out, report::attack_report(net, k, &rep, &Timings::default(), false).to_string()),
            Err(e) => from_error(e),
        }
    })
}
