//! C ABI over the routing engine: opaque graph handles, integer status
//! codes, and JSON strings for structured results. The matching declarations
//! live in `include/busnet.h`.
//!
//! Status codes mirror the CLI exit codes: 0 success, 2 bad input, 3 no
//! route, 4 data error. On any non-zero return the per-thread message from
//! [`busnet_last_error`] describes the failure.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use busnet::graph::{DmeGraph, DurationSecs, Timestamp};
use busnet::ingest::{load_graph, save_graph};
use busnet::planner::{plan, PlanMode, PlanOptions, PoiQuery};
use busnet::report::route_document;
use busnet::Error;

pub const BUSNET_OK: i32 = 0;
pub const BUSNET_BAD_INPUT: i32 = 2;
pub const BUSNET_NO_ROUTE: i32 = 3;
pub const BUSNET_DATA_ERROR: i32 = 4;

/// Opaque to C callers; only ever handled behind a pointer.
pub struct BusnetGraph(DmeGraph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(code: i32, message: &str) -> i32 {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(sanitized).unwrap());
    code
}

fn fail_with(e: &Error) -> i32 {
    let code = match e {
        Error::UnknownVertex(_)
        | Error::UnknownBus(_)
        | Error::InvalidQuery(_)
        | Error::InfeasibleSpec(_) => BUSNET_BAD_INPUT,
        Error::NoRoute(_) => BUSNET_NO_ROUTE,
        Error::Ingest(_)
        | Error::Format(_)
        | Error::Io(_)
        | Error::SubgraphTooSmall { .. } => BUSNET_DATA_ERROR,
    };
    fail(code, &e.to_string())
}

/// Borrows a C string argument; `None` (and a set error) when it is null or
/// not UTF-8.
unsafe fn arg<'a>(ptr: *const c_char, name: &str) -> Option<&'a str> {
    if ptr.is_null() {
        fail(BUSNET_BAD_INPUT, &format!("{name} must not be null"));
        return None;
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Some(s),
        Err(_) => {
            fail(BUSNET_BAD_INPUT, &format!("{name} is not valid UTF-8"));
            None
        }
    }
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null; do not free.
#[no_mangle]
pub extern "C" fn busnet_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads a graph (binary or JSON) from `path` into `*out_graph`. The handle
/// must be released with `busnet_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn busnet_graph_load(
    path: *const c_char,
    out_graph: *mut *mut BusnetGraph,
) -> i32 {
    if out_graph.is_null() {
        return fail(BUSNET_BAD_INPUT, "out_graph must not be null");
    }
    *out_graph = ptr::null_mut();
    let Some(path) = arg(path, "path") else { return BUSNET_BAD_INPUT };
    match load_graph(Path::new(path)) {
        Ok(g) => {
            *out_graph = Box::into_raw(Box::new(BusnetGraph(g)));
            BUSNET_OK
        }
        Err(e) => fail_with(&e),
    }
}

/// Persists the graph to `path`; a `.json` extension selects the text form.
#[no_mangle]
pub unsafe extern "C" fn busnet_graph_save(
    graph: *const BusnetGraph,
    path: *const c_char,
) -> i32 {
    let Some(graph) = graph.as_ref() else {
        return fail(BUSNET_BAD_INPUT, "graph must not be null");
    };
    let Some(path) = arg(path, "path") else { return BUSNET_BAD_INPUT };
    match save_graph(&graph.0, Path::new(path)) {
        Ok(()) => BUSNET_OK,
        Err(e) => fail_with(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn busnet_graph_free(graph: *mut BusnetGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// 0 when `graph` is null.
#[no_mangle]
pub unsafe extern "C" fn busnet_graph_vertex_count(graph: *const BusnetGraph) -> u32 {
    graph.as_ref().map_or(0, |g| g.0.vertex_count() as u32)
}

/// 0 when `graph` is null.
#[no_mangle]
pub unsafe extern "C" fn busnet_graph_edge_count(graph: *const BusnetGraph) -> u32 {
    graph.as_ref().map_or(0, |g| g.0.edge_count() as u32)
}

/// Checks the data-model invariants; BUSNET_DATA_ERROR lists the violations
/// through `busnet_last_error`.
#[no_mangle]
pub unsafe extern "C" fn busnet_graph_validate(graph: *const BusnetGraph) -> i32 {
    let Some(graph) = graph.as_ref() else {
        return fail(BUSNET_BAD_INPUT, "graph must not be null");
    };
    let violations = graph.0.validate();
    if violations.is_empty() {
        BUSNET_OK
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        fail(BUSNET_DATA_ERROR, &msgs.join("; "))
    }
}

/// Answers a multi-POI query and stores the route document (JSON, UTF-8,
/// NUL-terminated) in `*out_json`; release it with `busnet_string_free`.
///
/// `origin`: stop id. `depart`: "HH:MM[:SS]" or raw seconds. `pois`:
/// comma-separated stop ids. `dwell_json`: optional JSON object mapping stop
/// id to dwell seconds (null for none). `mode`: "naive", "ea-star",
/// "ea-star-no-prune", or "ordered" (null for the default).
#[no_mangle]
pub unsafe extern "C" fn busnet_plan_json(
    graph: *const BusnetGraph,
    origin: *const c_char,
    depart: *const c_char,
    pois: *const c_char,
    dwell_json: *const c_char,
    mode: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        return fail(BUSNET_BAD_INPUT, "out_json must not be null");
    }
    *out_json = ptr::null_mut();
    let Some(graph) = graph.as_ref() else {
        return fail(BUSNET_BAD_INPUT, "graph must not be null");
    };
    let g = &graph.0;
    let Some(origin) = arg(origin, "origin") else { return BUSNET_BAD_INPUT };
    let Some(depart) = arg(depart, "depart") else { return BUSNET_BAD_INPUT };
    let Some(pois) = arg(pois, "pois") else { return BUSNET_BAD_INPUT };
    let mode = if mode.is_null() {
        PlanMode::EaStar
    } else {
        let Some(m) = arg(mode, "mode") else { return BUSNET_BAD_INPUT };
        match PlanMode::parse(m) {
            Ok(m) => m,
            Err(e) => return fail_with(&e),
        }
    };

    match plan_to_document(g, origin, depart, pois, dwell_json, mode) {
        Ok(doc) => {
            let text = serde_json::to_string_pretty(&doc).unwrap().replace('\0', " ");
            *out_json = CString::new(text).unwrap().into_raw();
            BUSNET_OK
        }
        Err(e) => fail_with(&e),
    }
}

unsafe fn plan_to_document(
    g: &DmeGraph,
    origin: &str,
    depart: &str,
    pois: &str,
    dwell_json: *const c_char,
    mode: PlanMode,
) -> Result<serde_json::Value, Error> {
    let origin = g.resolve(origin)?;
    let depart = Timestamp::parse(depart)?;
    let mut poi_ids = Vec::new();
    for p in pois.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        poi_ids.push(g.resolve(p)?);
    }
    let mut dwell = HashMap::new();
    if !dwell_json.is_null() {
        let text = arg(dwell_json, "dwell_json")
            .ok_or_else(|| Error::InvalidQuery("dwell_json is not valid UTF-8".into()))?;
        let map: HashMap<String, u32> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidQuery(format!("dwell_json: {e}")))?;
        for (stop, secs) in map {
            dwell.insert(g.resolve(&stop)?, DurationSecs(secs));
        }
    }
    let query = PoiQuery::new(origin, depart, poi_ids, dwell)?;
    let options = PlanOptions { mode, ..Default::default() };
    let result = plan(g, &query, &options)?;
    Ok(route_document(g, &query, &result, mode))
}

/// Frees a string returned by this library. Null is allowed.
#[no_mangle]
pub unsafe extern "C" fn busnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
