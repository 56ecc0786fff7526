//! C ABI over `mermin-core`.
//!
//! Every function returns a [`MerminStatus`]; on failure the message is
//! available from [`mermin_last_error_message`] on the same thread. Objects
//! are opaque handles released with their `_free` function, and strings
//! returned through `out` pointers must be released with
//! [`mermin_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mermin::abgroup::{is_trivial_extension, FinAbGroup, Subgroup};
use mermin::frel::frel_locality_check;
use mermin::lhv::{lhv_exists, quantum_table, Existence, LhvMode};
use mermin::phase::PhasePoint;
use mermin::qss::{audit_device_independent, run_protocol, simulate_pre_phase_attack, AttackModel, QssConfig};
use mermin::scenario::{count_effective_pairs, newcond, MerminScenario as Scenario, TwoMeasScenario, VariationPolicy};
use mermin::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MerminStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The inputs are well-formed but violate a mathematical precondition.
    Domain = 3,
    /// A size or search bound would be exceeded.
    Resource = 4,
    Parse = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(MerminStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Resource { .. } | Error::Overflow(_) => MerminStatus::Resource,
            Error::Parse(_) => MerminStatus::Parse,
            Error::InvalidInput(_) | Error::Arity { .. } | Error::Config(_) | Error::Basis(_) => {
                MerminStatus::InvalidArgument
            }
            _ => MerminStatus::Domain,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MerminStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(MerminStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MerminStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MerminStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            MerminStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MerminStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| invalid("output contains a NUL byte"))
}

fn json<T: serde::Serialize>(t: &T) -> Result<*mut c_char, Fail> {
    c_string(serde_json::to_string(t).map_err(|e| invalid(e.to_string()))?)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mermin_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mermin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mermin_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------------------
// Groups

/// A finite abelian group `Z_{n_1} × … × Z_{n_k}`.
pub struct MerminGroup(FinAbGroup);

/// # Safety
/// `factors` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_group_new(factors: *const u64, len: usize, out: *mut *mut MerminGroup) -> MerminStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if factors.is_null() && len > 0 {
            return Err(null("factors"));
        }
        let f = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(factors, len).to_vec() };
        let g = FinAbGroup::new(f)?;
        *out = Box::into_raw(Box::new(MerminGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from [`mermin_group_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mermin_group_free(g: *mut MerminGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_group_order(g: *const MerminGroup, out: *mut u64) -> MerminStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        *out_arg(out, "out")? = u64::try_from(g.0.order()).map_err(|_| Fail::from(Error::Overflow("group order")))?;
        Ok(())
    })
}

/// Decides whether `g` is a trivial extension of the subgroup generated by
/// `n_gens` elements, given row-major in `coords` (`n_gens × rank`). On a
/// non-trivial verdict `out_witness` (if not null) receives the witness
/// system as text; otherwise it is set to null.
///
/// # Safety
/// Pointers must be valid for the sizes described; `out_witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn mermin_ext_check(
    g: *const MerminGroup,
    coords: *const i64,
    n_gens: usize,
    out_trivial: *mut bool,
    out_witness: *mut *mut c_char,
) -> MerminStatus {
    guard(|| {
        let g = &g.as_ref().ok_or_else(|| null("group"))?.0;
        let trivial = out_arg(out_trivial, "out_trivial")?;
        let rank = g.rank();
        if coords.is_null() && n_gens * rank > 0 {
            return Err(null("coords"));
        }
        let flat = if n_gens * rank == 0 { &[][..] } else { std::slice::from_raw_parts(coords, n_gens * rank) };
        let gens = (0..n_gens)
            .map(|i| g.element(&flat[i * rank..(i + 1) * rank]))
            .collect::<Result<Vec<_>, _>>()?;
        let v = is_trivial_extension(g, &Subgroup::new(g, gens)?)?;
        *trivial = v.trivial;
        if let Some(w) = out_witness.as_mut() {
            *w = match &v.witness {
                Some(wt) => c_string(wt.system.to_string())?,
                None => ptr::null_mut(),
            };
        }
        Ok(())
    })
}

/// Locality check for the relational pair on `G × H`.
///
/// # Safety
/// `g` and `h` must be live handles; `out_trivial` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_frel_locality(
    g: *const MerminGroup,
    h: *const MerminGroup,
    out_trivial: *mut bool,
) -> MerminStatus {
    guard(|| {
        let g = &g.as_ref().ok_or_else(|| null("G"))?.0;
        let h = &h.as_ref().ok_or_else(|| null("H"))?.0;
        *out_arg(out_trivial, "out_trivial")? = frel_locality_check(g, h)?.trivial;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Scenarios

/// A Mermin scenario: rows of per-party phases.
pub struct MerminScenario(Scenario);

/// Parses a scenario from its JSON form (`{"D", "N", "rows"}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_scenario_from_json(
    json: *const c_char,
    out: *mut *mut MerminScenario,
) -> MerminStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = Scenario::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(MerminScenario(s)));
        Ok(())
    })
}

/// A built-in scenario: `"classic-322"` or `"qutrit-five-party"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_scenario_preset(
    name: *const c_char,
    out: *mut *mut MerminScenario,
) -> MerminStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = match str_arg(name, "name")? {
            "classic-322" => Scenario::classic_322(),
            "qutrit-five-party" => TwoMeasScenario::qutrit_five_party().to_mermin_scenario()?,
            other => return Err(invalid(format!("unknown preset {other:?}"))),
        };
        *out = Box::into_raw(Box::new(MerminScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a scenario handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mermin_scenario_free(s: *mut MerminScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Local hidden variable check. `mode` is `"parity"` or `"possibilistic"`.
/// `out_exists` receives 1 (a model exists), 0 (refuted) or -1
/// (inconclusive); `out_json`, if not null, receives the full verdict.
///
/// # Safety
/// `s` must be a live handle; `mode` a NUL-terminated string; `out_json` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn mermin_lhv_check(
    s: *const MerminScenario,
    mode: *const c_char,
    tol: f64,
    bound: u64,
    out_exists: *mut i32,
    out_json: *mut *mut c_char,
) -> MerminStatus {
    guard(|| {
        let s = &s.as_ref().ok_or_else(|| null("scenario"))?.0;
        let mode: LhvMode = str_arg(mode, "mode")?.parse()?;
        let exists = out_arg(out_exists, "out_exists")?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        let v = lhv_exists(&quantum_table(s, tol)?, mode, bound)?;
        *exists = match v.existence {
            Existence::Exists => 1,
            Existence::Refuted => 0,
            Existence::Inconclusive => -1,
        };
        if let Some(j) = out_json.as_mut() {
            *j = json(&v)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Two-measurement scenarios

/// Effectiveness condition for phase `b` (comma-separated turns, e.g.
/// `"1/9,8/9"`).
///
/// # Safety
/// `b` must be a NUL-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_newcond(
    d: usize,
    v: usize,
    beta: usize,
    b: *const c_char,
    tol: f64,
    out_effective: *mut bool,
    out_residual: *mut f64,
) -> MerminStatus {
    guard(|| {
        if d < 2 {
            return Err(invalid("D must be at least 2"));
        }
        let b = PhasePoint::parse(str_arg(b, "b")?, d)?;
        let effective = out_arg(out_effective, "out_effective")?;
        let residual = out_arg(out_residual, "out_residual")?;
        let r = newcond(d, v, beta, &b, tol);
        *effective = r.effective;
        *residual = r.residual_norm;
        Ok(())
    })
}

/// Number of effective measurement pairs for `n` parties on the grid with
/// `q` steps per turn. `policy` is `"canonical"`, `"cyclic"` or `"max-beta"`.
///
/// # Safety
/// `policy` must be a NUL-terminated string; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_pairs_count(
    n: usize,
    d: usize,
    q: usize,
    policy: *const c_char,
    tol: f64,
    bound: u64,
    out_count: *mut usize,
) -> MerminStatus {
    guard(|| {
        let policy: VariationPolicy = str_arg(policy, "policy")?.parse()?;
        let out = out_arg(out_count, "out_count")?;
        *out = count_effective_pairs(n, d, q, policy, tol, u128::from(bound))?.count;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Secret sharing

/// Runs the protocol for a JSON configuration and writes a JSON report to
/// `out_json`. `attack` is `"none"`, `"withhold:<player>"`, `"pre-phase"`
/// or `"device-independent"`.
///
/// # Safety
/// `config_json` and `attack` must be NUL-terminated strings; `out_json`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn mermin_qss_run_json(
    config_json: *const c_char,
    attack: *const c_char,
    tol: f64,
    out_json: *mut *mut c_char,
) -> MerminStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        *out = ptr::null_mut();
        let cfg: QssConfig = serde_json::from_str(str_arg(config_json, "config_json")?)
            .map_err(|e| Fail(MerminStatus::Parse, e.to_string()))?;
        *out = match str_arg(attack, "attack")? {
            "none" => json(&run_protocol(&cfg, None, &AttackModel::None)?.summary)?,
            "pre-phase" => json(&simulate_pre_phase_attack(&cfg, tol)?)?,
            "device-independent" => json(&audit_device_independent(&cfg, 1 << 20)?)?,
            other => {
                let player = other
                    .strip_prefix("withhold:")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| invalid(format!("unknown attack {other:?}")))?;
                json(&run_protocol(&cfg, None, &AttackModel::Withhold { player })?.summary)?
            }
        };
        Ok(())
    })
}
