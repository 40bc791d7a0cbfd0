//! C interface to the swarmnav simulator and its core metrics.
//!
//! Every fallible function returns a [`SwarmnavStatus`]. On failure a
//! message is kept per thread and can be read with [`swarmnav_last_error`].
//! Points are passed as interleaved `x, y` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use swarmnav::control::avoid_one;
use swarmnav::metrics::{path_persistence, path_similarity};
use swarmnav::model::{Params, PathHistory};
use swarmnav::record::{write_step_record, StepRecord};
use swarmnav::scenario::{parse_scenario, SimRng};
use swarmnav::sim::{RunStatus, World};
use swarmnav::{Error, Vec2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwarmnavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidInput = 4,
    InsufficientHistory = 5,
    Degenerate = 6,
    Finished = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

/// Outcome of a simulation so far.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwarmnavRunState {
    Running = 0,
    Success = 1,
    Collision = 2,
    Timeout = 3,
}

impl From<&RunStatus> for SwarmnavRunState {
    fn from(s: &RunStatus) -> Self {
        match s {
            RunStatus::Running => Self::Running,
            RunStatus::Success => Self::Success,
            RunStatus::Collision(_) => Self::Collision,
            RunStatus::Timeout => Self::Timeout,
        }
    }
}

/// Opaque simulation handle.
pub struct SwarmnavSim {
    world: World,
    params: Params,
    rng: SimRng,
    last: StepRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: SwarmnavStatus, msg: impl Into<String>) -> SwarmnavStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> SwarmnavStatus {
    match e {
        Error::Config(_) => SwarmnavStatus::Config,
        Error::InsufficientHistory { .. } => SwarmnavStatus::InsufficientHistory,
        Error::DegenerateDirection | Error::DegenerateGeometry(_) => SwarmnavStatus::Degenerate,
        Error::InvalidInput(_) | Error::InvalidArgument(_) | Error::InfeasibleDensity { .. } => {
            SwarmnavStatus::InvalidInput
        }
        Error::ContractViolation(_) | Error::Io(_) | Error::Json(_) => SwarmnavStatus::Internal,
    }
}

fn from_error(e: Error) -> SwarmnavStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, converting a panic into [`SwarmnavStatus::Internal`].
fn guard(f: impl FnOnce() -> SwarmnavStatus) -> SwarmnavStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SwarmnavStatus::Internal, "internal panic"),
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn swarmnav_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, SwarmnavStatus> {
    if text.is_null() {
        return Err(fail(SwarmnavStatus::NullPointer, "text is null"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(SwarmnavStatus::InvalidUtf8, e.to_string()))
}

unsafe fn new_sim(
    toml_text: *const c_char,
    seed: Option<u64>,
    out: *mut *mut SwarmnavSim,
) -> SwarmnavStatus {
    if out.is_null() {
        return fail(SwarmnavStatus::NullPointer, "out is null");
    }
    *out = ptr::null_mut();
    let text = match read_str(toml_text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let mut scenario = match parse_scenario(text) {
        Ok(s) => s,
        Err(e) => return fail(SwarmnavStatus::Config, e.to_string()),
    };
    if let Some(seed) = seed {
        scenario = scenario.with_seed(seed);
    }
    let (world, rng) = match scenario.realize() {
        Ok(x) => x,
        Err(e) => return from_error(e),
    };
    let last = world.initial_record(&scenario.params);
    *out = Box::into_raw(Box::new(SwarmnavSim {
        world,
        params: scenario.params,
        rng,
        last,
    }));
    SwarmnavStatus::Ok
}

/// Builds a simulation from scenario text, using the seed in the text.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_new(
    toml_text: *const c_char,
    out: *mut *mut SwarmnavSim,
) -> SwarmnavStatus {
    guard(|| new_sim(toml_text, None, out))
}

/// Builds a simulation from scenario text with `seed` overriding the text.
///
/// # Safety
/// As for [`swarmnav_sim_new`].
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_new_with_seed(
    toml_text: *const c_char,
    seed: u64,
    out: *mut *mut SwarmnavSim,
) -> SwarmnavStatus {
    guard(|| new_sim(toml_text, Some(seed), out))
}

/// # Safety
/// `sim` must come from `swarmnav_sim_new*` and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_free(sim: *mut SwarmnavSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

impl SwarmnavSim {
    fn advance(&mut self) -> Result<(), SwarmnavStatus> {
        if self.last.status.is_terminal() {
            return Err(fail(
                SwarmnavStatus::Finished,
                "simulation already finished",
            ));
        }
        let (next, rec) = self
            .world
            .step(&self.params, &mut self.rng)
            .map_err(from_error)?;
        self.world = next;
        self.last = rec;
        Ok(())
    }
}

unsafe fn write_state(out: *mut SwarmnavRunState, s: &RunStatus) {
    if !out.is_null() {
        *out = s.into();
    }
}

/// Advances one step. `out_state` may be null.
///
/// # Safety
/// `sim` must be a live handle; `out_state` null or valid.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_step(
    sim: *mut SwarmnavSim,
    out_state: *mut SwarmnavRunState,
) -> SwarmnavStatus {
    guard(|| {
        let Some(sim) = sim.as_mut() else {
            return fail(SwarmnavStatus::NullPointer, "sim is null");
        };
        if let Err(s) = sim.advance() {
            return s;
        }
        write_state(out_state, &sim.last.status);
        SwarmnavStatus::Ok
    })
}

/// Steps until the run ends. Calling it on a finished run is not an error.
///
/// # Safety
/// As for [`swarmnav_sim_step`].
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_run(
    sim: *mut SwarmnavSim,
    out_state: *mut SwarmnavRunState,
) -> SwarmnavStatus {
    guard(|| {
        let Some(sim) = sim.as_mut() else {
            return fail(SwarmnavStatus::NullPointer, "sim is null");
        };
        while !sim.last.status.is_terminal() {
            if let Err(s) = sim.advance() {
                return s;
            }
        }
        write_state(out_state, &sim.last.status);
        SwarmnavStatus::Ok
    })
}

/// # Safety
/// `sim` must be a live handle and `out_state` valid.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_state(
    sim: *const SwarmnavSim,
    out_state: *mut SwarmnavRunState,
) -> SwarmnavStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(SwarmnavStatus::NullPointer, "sim is null");
        };
        if out_state.is_null() {
            return fail(SwarmnavStatus::NullPointer, "out_state is null");
        }
        write_state(out_state, &sim.last.status);
        SwarmnavStatus::Ok
    })
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_agent_count(sim: *const SwarmnavSim) -> usize {
    sim.as_ref().map_or(0, |s| s.world.agents.len())
}

/// Steps taken so far, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_step_index(sim: *const SwarmnavSim) -> u64 {
    sim.as_ref().map_or(0, |s| s.world.step)
}

/// Copies current positions, ascending by agent id, into `xy` as
/// `x0, y0, x1, y1, ...`. `len` is the buffer length in doubles and must be
/// at least twice the agent count.
///
/// # Safety
/// `sim` must be a live handle and `xy` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_positions(
    sim: *const SwarmnavSim,
    xy: *mut f64,
    len: usize,
) -> SwarmnavStatus {
    guard(|| {
        let Some(sim) = sim.as_ref() else {
            return fail(SwarmnavStatus::NullPointer, "sim is null");
        };
        if xy.is_null() {
            return fail(SwarmnavStatus::NullPointer, "xy is null");
        }
        let need = 2 * sim.last.agents.len();
        if len < need {
            return fail(
                SwarmnavStatus::BufferTooSmall,
                format!("need {need} doubles, got {len}"),
            );
        }
        let out = std::slice::from_raw_parts_mut(xy, need);
        for (pair, a) in out.chunks_exact_mut(2).zip(&sim.last.agents) {
            pair[0] = a.position.x;
            pair[1] = a.position.y;
        }
        SwarmnavStatus::Ok
    })
}

/// The latest step record as one line of JSON, in the same format as the
/// step log. Release it with [`swarmnav_string_free`].
///
/// # Safety
/// `sim` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_sim_last_record_json(
    sim: *const SwarmnavSim,
    out: *mut *mut c_char,
) -> SwarmnavStatus {
    guard(|| {
        if out.is_null() {
            return fail(SwarmnavStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(sim) = sim.as_ref() else {
            return fail(SwarmnavStatus::NullPointer, "sim is null");
        };
        let mut buf = Vec::new();
        if let Err(e) = write_step_record(&sim.last, &mut buf) {
            return from_error(e);
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        match CString::new(buf) {
            Ok(s) => {
                *out = s.into_raw();
                SwarmnavStatus::Ok
            }
            Err(_) => fail(SwarmnavStatus::Internal, "record contains NUL"),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_points(xy: *const f64, n_points: usize) -> Result<Vec<Vec2>, SwarmnavStatus> {
    if xy.is_null() {
        return Err(fail(SwarmnavStatus::NullPointer, "points are null"));
    }
    let raw = std::slice::from_raw_parts(xy, 2 * n_points);
    let pts: Vec<Vec2> = raw.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
    if pts.iter().all(|p| p.is_finite()) {
        Ok(pts)
    } else {
        Err(fail(SwarmnavStatus::InvalidInput, "points must be finite"))
    }
}

/// Path as given, newest point first; consecutive points must differ.
unsafe fn read_path(xy: *const f64, n_points: usize) -> Result<PathHistory, SwarmnavStatus> {
    let pts = read_points(xy, n_points)?;
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return Err(fail(
            SwarmnavStatus::InvalidInput,
            "consecutive points must differ",
        ));
    }
    Ok(PathHistory::from_points(n_points.max(1), pts))
}

/// Path persistence of a newest-first path of `n_points` points.
///
/// # Safety
/// `xy` must be valid for `2 * n_points` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_path_persistence(
    xy: *const f64,
    n_points: usize,
    out: *mut f64,
) -> SwarmnavStatus {
    guard(|| {
        if out.is_null() {
            return fail(SwarmnavStatus::NullPointer, "out is null");
        }
        let h = match read_path(xy, n_points) {
            Ok(h) => h,
            Err(s) => return s,
        };
        match path_persistence(&h) {
            Ok(g) => {
                *out = g.value();
                SwarmnavStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Path similarity of two newest-first paths.
///
/// # Safety
/// `a` and `b` must be valid for `2 * na` and `2 * nb` reads, `out` for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_path_similarity(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut f64,
) -> SwarmnavStatus {
    guard(|| {
        if out.is_null() {
            return fail(SwarmnavStatus::NullPointer, "out is null");
        }
        let (ha, hb) = match (read_path(a, na), read_path(b, nb)) {
            (Ok(ha), Ok(hb)) => (ha, hb),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match path_similarity(&ha, &hb) {
            Ok(s) => {
                *out = s.value();
                SwarmnavStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Avoidance term for one obstacle point. Each pointer addresses an
/// `[x, y]` pair.
///
/// # Safety
/// `self_pos`, `obstacle`, and `u_prev` must be valid for two reads and
/// `out` for two writes.
#[no_mangle]
pub unsafe extern "C" fn swarmnav_avoid_one(
    self_pos: *const f64,
    obstacle: *const f64,
    u_prev: *const f64,
    radius: f64,
    out: *mut f64,
) -> SwarmnavStatus {
    guard(|| {
        if out.is_null() {
            return fail(SwarmnavStatus::NullPointer, "out is null");
        }
        let mut pts = [Vec2::ZERO; 3];
        for (slot, p) in pts.iter_mut().zip([self_pos, obstacle, u_prev]) {
            match read_points(p, 1) {
                Ok(v) => *slot = v[0],
                Err(s) => return s,
            }
        }
        if !(radius.is_finite() && radius > 0.0) {
            return fail(SwarmnavStatus::InvalidInput, "radius must be > 0");
        }
        match avoid_one(pts[0], pts[1].into(), pts[2], radius) {
            Ok(c) => {
                let o = std::slice::from_raw_parts_mut(out, 2);
                o[0] = c.x;
                o[1] = c.y;
                SwarmnavStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
