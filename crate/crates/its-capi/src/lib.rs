//! C ABI for the independent transversal blow-up toolkit.
//!
//! Everything crosses the boundary as an opaque graph handle or a UTF-8
//! JSON string in the same formats the command-line tool uses. Strings
//! returned through `char **` outputs are owned by the caller and must be
//! released with [`its_string_free`]; graphs with [`its_graph_free`].
//!
//! Every function returns an [`ItsStatus`]. After a failing call the
//! thread-local message from [`its_last_error`] describes what went wrong.
//! Wherever a function takes `s` (picks per block), passing 0 selects the
//! instance's own stored value, defaulting to 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde::Deserialize;
use serde_json::json;

use its_core::aux::{blowup_aux_capped, consecutive_grouping, quotient_aux};
use its_core::factor::{find_factor, FactorConfig, Grouping};
use its_core::gen::{self, GeneratorSpec};
use its_core::graph::verify_its;
use its_core::io::{
    candidate_to_json, count_report_json, instance_to_json, parse_candidate, parse_instance,
    profile_json, Instance,
};
use its_core::lll::{self, LllConfig};
use its_core::math::parse_rat;
use its_core::nibble::{self, NibbleConfig, NibbleError};
use its_core::oracle::{self, OracleError, SearchBudget};

/// Outcome of a C ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItsStatus {
    /// The call succeeded; searches found what they looked for.
    Ok = 0,
    /// The answer is a verified "no": nothing exists, a candidate failed
    /// verification, or a randomized solver gave up within its budget.
    Absent = 1,
    /// Malformed input: null pointer, bad UTF-8, bad JSON, bad parameters.
    Invalid = 2,
    /// An exact search exhausted its node budget before reaching an answer.
    BudgetExceeded = 3,
    /// A panic was caught at the boundary; details via its_last_error.
    Internal = 4,
}

/// Opaque parsed instance: a block-partitioned graph plus its optional
/// default picks-per-block.
pub struct ItsGraph {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', "?")).expect("NUL bytes replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: ItsStatus, msg: &str) -> ItsStatus {
    set_error(msg);
    status
}

/// Runs one FFI body with panic containment and a fresh error slot.
fn guard<F: FnOnce() -> ItsStatus>(body: F) -> ItsStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(&format!("internal panic: {msg}"));
            ItsStatus::Internal
        }
    }
}

/// # Safety
/// `ptr` must be null or a NUL-terminated string valid for the call.
unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, String> {
    if ptr.is_null() {
        return Err(format!("{what} is null"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| format!("{what} is not valid UTF-8"))
}

unsafe fn graph_arg<'a>(ptr: *const ItsGraph) -> Result<&'a ItsGraph, String> {
    ptr.as_ref()
        .ok_or_else(|| "graph handle is null".to_string())
}

/// Moves `text` out through `out` as a heap string the caller frees.
unsafe fn out_string(text: String, out: *mut *mut c_char) -> Result<(), String> {
    let c = CString::new(text).map_err(|_| "output contained a NUL byte".to_string())?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn out_graph(inst: Instance, out: *mut *mut ItsGraph) {
    *out = Box::into_raw(Box::new(ItsGraph { inner: inst }));
}

fn effective_s(handle: &ItsGraph, s: usize) -> usize {
    if s == 0 {
        handle.inner.s.unwrap_or(1)
    } else {
        s
    }
}

fn budget_or_default(budget: u64) -> SearchBudget {
    if budget == 0 {
        SearchBudget::default()
    } else {
        SearchBudget::new(budget)
    }
}

/// Version of the library as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn its_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread, or null.
/// The pointer stays valid until the next call into the library from the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn its_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned through a `char **` output.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn its_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a graph handle.
///
/// # Safety
/// `g` must be null or a handle previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn its_graph_free(g: *mut ItsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Parses an instance document (`blocks`, `edges`, optional `s`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_parse(
    json: *const c_char,
    out: *mut *mut ItsGraph,
) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let text = match str_arg(json, "instance JSON") {
            Ok(t) => t,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        match parse_instance(text) {
            Ok(inst) => {
                out_graph(inst, out);
                ItsStatus::Ok
            }
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Builds an instance from a generator description, e.g.
/// `{"kind":"label_cliques","s":2,"d":2}` or
/// `{"kind":"random","r":4,"n":8,"avg_target":"2","local_cap":1,"seed":7}`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_generate(
    spec_json: *const c_char,
    out: *mut *mut ItsGraph,
) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let text = match str_arg(spec_json, "generator JSON") {
            Ok(t) => t,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let spec: GeneratorSpec = match serde_json::from_str(text) {
            Ok(spec) => spec,
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        let default_s = match &spec {
            GeneratorSpec::LabelCliques { s, .. } => Some(*s),
            GeneratorSpec::LabelCliquesMaxDegree { s, .. } => Some(*s),
            GeneratorSpec::DisjointBicliques { .. } => Some(1),
            GeneratorSpec::Random { .. } => None,
            GeneratorSpec::BoundedIncidence { s, .. } => Some(*s),
        };
        match gen::generate(&spec) {
            Ok(graph) => {
                out_graph(
                    Instance {
                        graph,
                        s: default_s,
                    },
                    out,
                );
                ItsStatus::Ok
            }
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Serializes the instance in canonical form (stable byte-for-byte).
///
/// # Safety
/// `g` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_to_json(g: *const ItsGraph, out: *mut *mut c_char) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        match out_string(instance_to_json(&handle.inner), out) {
            Ok(()) => ItsStatus::Ok,
            Err(e) => fail(ItsStatus::Internal, &e),
        }
    })
}

/// Reports block count, thickness, maximum/local degree and per-block
/// average degrees as JSON.
///
/// # Safety
/// `g` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_profile(g: *const ItsGraph, out: *mut *mut c_char) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let mut doc = profile_json(&handle.inner.graph.profile());
        doc["r"] = json!(handle.inner.graph.r());
        doc["vertices"] = json!(handle.inner.graph.vertex_count());
        doc["edges"] = json!(handle.inner.graph.edge_count());
        match out_string(doc.to_string(), out) {
            Ok(()) => ItsStatus::Ok,
            Err(e) => fail(ItsStatus::Internal, &e),
        }
    })
}

/// Builds the complement within each block pair (blocks stay independent).
///
/// # Safety
/// `g` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_complement(
    g: *const ItsGraph,
    out: *mut *mut ItsGraph,
) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let inst = Instance {
            graph: handle.inner.graph.complement(),
            s: handle.inner.s,
        };
        out_graph(inst, out);
        ItsStatus::Ok
    })
}

/// Builds the auxiliary graph whose vertices are all s-subsets of each
/// block; its 1-transversals correspond to the input's s-transversals.
/// `cap` bounds the auxiliary vertex count (0 means 1,000,000).
///
/// # Safety
/// `g` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_reduce_blowup(
    g: *const ItsGraph,
    s: usize,
    cap: usize,
    out: *mut *mut ItsGraph,
) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let cap = if cap == 0 { 1_000_000 } else { cap };
        match blowup_aux_capped(&handle.inner.graph, s, cap) {
            Ok(aux) => {
                out_graph(aux.to_instance(), out);
                ItsStatus::Ok
            }
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Builds the auxiliary graph contracting each run of s consecutive
/// vertices per block to one vertex.
///
/// # Safety
/// `g` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_graph_reduce_quotient(
    g: *const ItsGraph,
    s: usize,
    out: *mut *mut ItsGraph,
) -> ItsStatus {
    guard(|| {
        if out.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let grouping = match consecutive_grouping(&handle.inner.graph, s) {
            Ok(g) => g,
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        match quotient_aux(&handle.inner.graph, &grouping) {
            Ok(aux) => {
                out_graph(aux.to_instance(), out);
                ItsStatus::Ok
            }
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Exhaustive search for an independent transversal of s-sets. On success
/// writes the candidate JSON; returns `Absent` when provably none exists.
/// `budget` caps search nodes (0 means 100,000,000).
///
/// # Safety
/// `g` must be a live handle and `out_candidate` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_find(
    g: *const ItsGraph,
    s: usize,
    budget: u64,
    out_candidate: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_candidate.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        match oracle::find_its(&handle.inner.graph, s, budget_or_default(budget)) {
            Ok(Some(its)) => deliver_candidate(handle, &its, out_candidate),
            Ok(None) => fail(ItsStatus::Absent, "no ITS exists"),
            Err(OracleError::BudgetExceeded(n)) => fail(
                ItsStatus::BudgetExceeded,
                &format!("node budget of {n} exhausted"),
            ),
            Err(e @ OracleError::BlockTooThin { .. }) => {
                fail(ItsStatus::Absent, &format!("no ITS exists: {e}"))
            }
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Counts independent transversals of s-sets exactly and reports the
/// guaranteed lower bound at thickness `t` (0 means the instance's own
/// thickness). `budget` caps search nodes (0 means 100,000,000).
///
/// # Safety
/// `g` must be a live handle and `out_report` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_count(
    g: *const ItsGraph,
    s: usize,
    t: usize,
    budget: u64,
    out_report: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_report.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let t = if t == 0 {
            handle.inner.graph.thickness()
        } else {
            t
        };
        match oracle::count_its(&handle.inner.graph, s, t, budget_or_default(budget)) {
            Ok(report) => match out_string(count_report_json(&report).to_string(), out_report) {
                Ok(()) => ItsStatus::Ok,
                Err(e) => fail(ItsStatus::Internal, &e),
            },
            Err(OracleError::BudgetExceeded(n)) => fail(
                ItsStatus::BudgetExceeded,
                &format!("node budget of {n} exhausted"),
            ),
            Err(e) => fail(ItsStatus::Invalid, &e.to_string()),
        }
    })
}

/// Checks a candidate selection against the instance. Writes a JSON
/// report with `ok` and `violations`; returns `Ok` only when it passes.
///
/// # Safety
/// `g` must be a live handle, `candidate_json` a NUL-terminated string,
/// and `out_report` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_verify(
    g: *const ItsGraph,
    candidate_json: *const c_char,
    out_report: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_report.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let text = match str_arg(candidate_json, "candidate JSON") {
            Ok(t) => t,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let cand = match parse_candidate(text) {
            Ok(c) => c,
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        let report = verify_its(&handle.inner.graph, &cand);
        let doc = json!({
            "ok": report.ok(),
            "violations": report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>(),
        });
        if let Err(e) = out_string(doc.to_string(), out_report) {
            return fail(ItsStatus::Internal, &e);
        }
        if report.ok() {
            ItsStatus::Ok
        } else {
            fail(ItsStatus::Absent, "candidate failed verification")
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LllOptions {
    seed: u64,
    max_resamples: u64,
    prune_to: Option<usize>,
}

impl Default for LllOptions {
    fn default() -> Self {
        LllOptions {
            seed: 0,
            max_resamples: 10_000,
            prune_to: None,
        }
    }
}

/// Randomized prune-and-resample solver. `options_json` may be null or an
/// object with `seed`, `max_resamples`, `prune_to`. On success writes the
/// verified candidate; `out_stats` (optional) receives run statistics.
/// Returns `Absent` when the resample budget runs out.
///
/// # Safety
/// `g` must be a live handle; `options_json` null or NUL-terminated;
/// `out_candidate` valid; `out_stats` null or valid.
#[no_mangle]
pub unsafe extern "C" fn its_solve_lll(
    g: *const ItsGraph,
    s: usize,
    options_json: *const c_char,
    out_candidate: *mut *mut c_char,
    out_stats: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_candidate.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let opts: LllOptions = if options_json.is_null() {
            LllOptions::default()
        } else {
            let text = match str_arg(options_json, "options JSON") {
                Ok(t) => t,
                Err(e) => return fail(ItsStatus::Invalid, &e),
            };
            match serde_json::from_str(text) {
                Ok(o) => o,
                Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
            }
        };
        let config = LllConfig {
            a: opts.prune_to,
            max_resamples: opts.max_resamples,
            seed: opts.seed,
        };
        let result = match lll::solve(&handle.inner.graph, s, &config) {
            Ok(r) => r,
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        if !out_stats.is_null() {
            let doc = json!({ "found": result.its.is_some(), "stats": result.stats.to_json() });
            if let Err(e) = out_string(doc.to_string(), out_stats) {
                return fail(ItsStatus::Internal, &e);
            }
        }
        match result.its {
            Some(its) => deliver_candidate(handle, &its, out_candidate),
            None => fail(
                ItsStatus::Absent,
                &format!("solver gave up after {} resamples", result.stats.resamples),
            ),
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct NibbleOptions {
    eps: String,
    p: String,
    degree_bound: Option<String>,
    rounds: Option<usize>,
    max_round_retries: u32,
    seed: u64,
    artificial_deletion: bool,
    early_handoff: bool,
    terminal_max_resamples: u64,
}

impl Default for NibbleOptions {
    fn default() -> Self {
        NibbleOptions {
            eps: "1/2".to_string(),
            p: "3/20".to_string(),
            degree_bound: None,
            rounds: None,
            max_round_retries: 50,
            seed: 0,
            artificial_deletion: false,
            early_handoff: true,
            terminal_max_resamples: 10_000,
        }
    }
}

/// Round-based randomized solver. `options_json` may be null or an object
/// with `eps`, `p`, `degree_bound` (rationals as strings), `rounds`,
/// `max_round_retries`, `seed`, `artificial_deletion`, `early_handoff`,
/// `terminal_max_resamples`. On success writes the verified candidate;
/// `out_stats` (optional) receives a run summary including round records.
/// Returns `Absent` when the solver gives up.
///
/// # Safety
/// `g` must be a live handle; `options_json` null or NUL-terminated;
/// `out_candidate` valid; `out_stats` null or valid.
#[no_mangle]
pub unsafe extern "C" fn its_solve_nibble(
    g: *const ItsGraph,
    s: usize,
    options_json: *const c_char,
    out_candidate: *mut *mut c_char,
    out_stats: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_candidate.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let opts: NibbleOptions = if options_json.is_null() {
            NibbleOptions::default()
        } else {
            let text = match str_arg(options_json, "options JSON") {
                Ok(t) => t,
                Err(e) => return fail(ItsStatus::Invalid, &e),
            };
            match serde_json::from_str(text) {
                Ok(o) => o,
                Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
            }
        };
        let eps = match parse_rat(&opts.eps) {
            Ok(v) => v,
            Err(e) => return fail(ItsStatus::Invalid, &format!("eps: {e}")),
        };
        let p = match parse_rat(&opts.p) {
            Ok(v) => v,
            Err(e) => return fail(ItsStatus::Invalid, &format!("p: {e}")),
        };
        let d = match &opts.degree_bound {
            Some(text) => match parse_rat(text) {
                Ok(v) => Some(v),
                Err(e) => return fail(ItsStatus::Invalid, &format!("degree_bound: {e}")),
            },
            None => None,
        };
        let config = NibbleConfig {
            d,
            p,
            t_star_override: opts.rounds,
            max_round_retries: opts.max_round_retries,
            seed: opts.seed,
            artificial_deletion: opts.artificial_deletion,
            early_handoff: opts.early_handoff,
            terminal_max_resamples: opts.terminal_max_resamples,
        };
        let result = match nibble::solve(&handle.inner.graph, s, &eps, &config) {
            Ok(r) => r,
            Err(
                e @ (NibbleError::RetriesExhausted { .. } | NibbleError::ScheduleDiverged { .. }),
            ) => return fail(ItsStatus::Absent, &format!("solver gave up: {e}")),
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        if !out_stats.is_null() {
            let doc = json!({
                "found": result.its.is_some(),
                "rounds": result.rounds.iter().map(|r| r.to_json(false)).collect::<Vec<_>>(),
                "handoff_round": result.handoff_round,
                "hypothesis_ok": result.hypothesis_ok,
                "local_degree_ok": result.local_degree_ok,
                "terminal": result.terminal.as_ref().map(|t| t.to_json()),
            });
            if let Err(e) = out_string(doc.to_string(), out_stats) {
                return fail(ItsStatus::Internal, &e);
            }
        }
        match result.its {
            Some(its) => deliver_candidate(handle, &its, out_candidate),
            None => fail(
                ItsStatus::Absent,
                "solver gave up in the single-shot finish",
            ),
        }
    })
}

/// Splits every block into |V_i|/s disjoint independent transversals of
/// s-sets. Writes a JSON report with `found`, `members` and hypothesis
/// flags; returns `Absent` when the augmentation gets stuck.
///
/// # Safety
/// `g` must be a live handle and `out_report` a valid location.
#[no_mangle]
pub unsafe extern "C" fn its_factor(
    g: *const ItsGraph,
    s: usize,
    budget: u64,
    out_report: *mut *mut c_char,
) -> ItsStatus {
    guard(|| {
        if out_report.is_null() {
            return fail(ItsStatus::Invalid, "output location is null");
        }
        let handle = match graph_arg(g) {
            Ok(h) => h,
            Err(e) => return fail(ItsStatus::Invalid, &e),
        };
        let s = effective_s(handle, s);
        let config = FactorConfig {
            grouping: Grouping::Consecutive,
            budget: budget_or_default(budget),
        };
        let report = match find_factor(&handle.inner.graph, s, &config) {
            Ok(r) => r,
            Err(its_core::factor::FactorError::Oracle(OracleError::BudgetExceeded(n))) => {
                return fail(
                    ItsStatus::BudgetExceeded,
                    &format!("node budget of {n} exhausted"),
                )
            }
            Err(e) => return fail(ItsStatus::Invalid, &e.to_string()),
        };
        let members: Option<Vec<serde_json::Value>> = report.factor.as_ref().map(|members| {
            members
                .iter()
                .map(|m| serde_json::from_str(&candidate_to_json(m)).expect("candidate parses"))
                .collect()
        });
        let doc = json!({
            "found": report.factor.is_some(),
            "members": members,
            "thickness_hypothesis": report.thickness_hypothesis,
            "local_hypothesis": report.local_hypothesis,
            "stuck": report.stuck,
            "augment_calls": report.augment_calls,
            "relocations": report.relocations,
        });
        if let Err(e) = out_string(doc.to_string(), out_report) {
            return fail(ItsStatus::Internal, &e);
        }
        match &report.stuck {
            None => ItsStatus::Ok,
            Some(vertex) => fail(
                ItsStatus::Absent,
                &format!("no factor found: augmentation stuck at {vertex:?}"),
            ),
        }
    })
}

/// Re-verifies a solver's output before handing it across the boundary.
unsafe fn deliver_candidate(
    handle: &ItsGraph,
    its: &its_core::graph::TransversalBlowup,
    out: *mut *mut c_char,
) -> ItsStatus {
    let report = verify_its(&handle.inner.graph, its);
    if !report.ok() {
        let details = report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return fail(
            ItsStatus::Internal,
            &format!("solver output failed verification: {details}"),
        );
    }
    match out_string(candidate_to_json(its), out) {
        Ok(()) => ItsStatus::Ok,
        Err(e) => fail(ItsStatus::Internal, &e),
    }
}
