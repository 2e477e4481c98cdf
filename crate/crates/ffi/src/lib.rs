// Copyright 2026 The tpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! C interface to tpg-core.
//!
//! A [`TpgSession`] owns one analysed specification. Functions return a
//! [`TpgStatus`]; on failure a message is available from
//! [`tpg_last_error`] until the next call on the same thread. Strings
//! returned through out-parameters are freed with [`tpg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tpg_core::backend::{
    emit, ExternalFunctionTable, HostError, Interpreter, Payload, RuntimeValue,
};
use tpg_core::diag::{Diagnostic, SourceNames};
use tpg_core::driver::{analyze, load_environment, Environment, LoadError, ValidatedSpec};
use tpg_core::types::{Extension, TypeId};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The specification or description has errors; see the session's
    /// diagnostics.
    Diagnostics = 3,
    /// Unknown extension, profile or language.
    Load = 4,
    /// The session holds no valid specification.
    InvalidSession = 5,
    Emit = 6,
    Runtime = 7,
    /// A buffer or index was out of range.
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpgValueKind {
    Int = 0,
    Str = 1,
    /// A host pointer passed through untouched.
    Opaque = 2,
}

/// A value crossing the boundary. Only the field selected by `kind` is
/// meaningful. Strings handed to the library are copied; strings handed out
/// stay valid until the next call on the session.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TpgValue {
    pub kind: TpgValueKind,
    pub int_value: i64,
    pub str_value: *const c_char,
    pub opaque: *mut c_void,
}

/// Host implementation of an external function. `results` has room for
/// exactly the declared outputs. Any status other than `Ok` aborts the run.
pub type TpgExternalFn = Option<
    unsafe extern "C" fn(
        user: *mut c_void,
        args: *const TpgValue,
        nargs: usize,
        results: *mut TpgValue,
        nresults: usize,
    ) -> TpgStatus,
>;

/// Opaque handle.
pub struct TpgSession {
    names: SourceNames,
    diagnostics: Vec<Diagnostic>,
    rendered: Vec<CString>,
    state: Option<(ValidatedSpec, Environment)>,
    externals: ExternalFunctionTable,
    output_strings: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: TpgStatus, msg: impl Into<String>) -> TpgStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`TpgStatus::Panic`].
fn guard(f: impl FnOnce() -> TpgStatus) -> TpgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TpgStatus::Panic, "internal panic"))
}

/// Reads a required string argument.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, TpgStatus> {
    if p.is_null() {
        return Err(fail(TpgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TpgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, TpgStatus> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

fn owned(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn tpg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a type-system description and analyses a specification.
///
/// `description`, `extension` and `profile` may be null; the extension
/// defaults to `declarative`. A session is stored in `*out` whenever the
/// status is `Ok` or `Diagnostics`, and must be released with
/// [`tpg_session_free`].
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpg_session_new(
    spec: *const c_char,
    description: *const c_char,
    extension: *const c_char,
    profile: *const c_char,
    out: *mut *mut TpgSession,
) -> TpgStatus {
    guard(|| {
        if out.is_null() {
            return fail(TpgStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let args = (|| {
            Ok::<_, TpgStatus>((
                text(spec, "spec")?,
                opt_text(description, "description")?,
                opt_text(extension, "extension")?.unwrap_or("declarative"),
                opt_text(profile, "profile")?,
            ))
        })();
        let (spec, description, extension, profile) = match args {
            Ok(a) => a,
            Err(s) => return s,
        };
        let mut session = TpgSession {
            names: SourceNames::new("<spec>", "<typesystem>"),
            diagnostics: Vec::new(),
            rendered: Vec::new(),
            state: None,
            externals: ExternalFunctionTable::new(),
            output_strings: Vec::new(),
        };
        let status = match load_environment(extension, description, profile) {
            Err(LoadError::Diagnostics(d)) => {
                session.diagnostics = d;
                fail(
                    TpgStatus::Diagnostics,
                    "the type-system description has errors",
                )
            }
            Err(e) => return fail(TpgStatus::Load, e.to_string()),
            Ok(env) => match analyze(spec, env.ext.clone()) {
                Ok(v) => {
                    session.state = Some((v, env));
                    TpgStatus::Ok
                }
                Err(d) => {
                    session.diagnostics = d;
                    fail(TpgStatus::Diagnostics, "the specification has errors")
                }
            },
        };
        session.rendered = session
            .diagnostics
            .iter()
            .map(|d| CString::new(d.render(&session.names).replace('\0', " ")).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(session));
        status
    })
}

/// # Safety
/// `session` must be null or come from [`tpg_session_new`], and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn tpg_session_free(session: *mut TpgSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Number of diagnostics recorded for the session; 0 for null.
///
/// # Safety
/// `session` must be null or a live session.
#[no_mangle]
pub unsafe extern "C" fn tpg_diagnostic_count(session: *const TpgSession) -> usize {
    session.as_ref().map_or(0, |s| s.diagnostics.len())
}

/// Rendered diagnostic `index`, or null when out of range. Owned by the
/// session.
///
/// # Safety
/// `session` must be null or a live session.
#[no_mangle]
pub unsafe extern "C" fn tpg_diagnostic(session: *const TpgSession, index: usize) -> *const c_char {
    session
        .as_ref()
        .and_then(|s| s.rendered.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Emits the ANTLR grammar and the externals interface. Both strings are
/// freed with [`tpg_string_free`]. Either out-parameter may be null.
///
/// # Safety
/// `session` must be a live session; out-parameters must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tpg_emit(
    session: *const TpgSession,
    grammar: *mut *mut c_char,
    externals: *mut *mut c_char,
) -> TpgStatus {
    guard(|| {
        let Some(s) = session.as_ref() else {
            return fail(TpgStatus::NullArgument, "session is null");
        };
        let Some((v, env)) = &s.state else {
            return fail(
                TpgStatus::InvalidSession,
                "the session has no valid specification",
            );
        };
        match emit(v, env.profile.as_ref()) {
            Ok(e) => {
                if !grammar.is_null() {
                    *grammar = owned(&e.grammar);
                }
                if !externals.is_null() {
                    *externals = owned(&e.externals);
                }
                TpgStatus::Ok
            }
            Err(e) => fail(TpgStatus::Emit, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Host pointer carried through a run.
struct Opaque(usize);

fn to_runtime(v: &TpgValue, tag: TypeId) -> Result<RuntimeValue, String> {
    Ok(match v.kind {
        TpgValueKind::Int => RuntimeValue::int(tag, v.int_value),
        TpgValueKind::Str => {
            if v.str_value.is_null() {
                return Err("string value is null".into());
            }
            // SAFETY: the caller promises a NUL-terminated string.
            let s = unsafe { CStr::from_ptr(v.str_value) };
            RuntimeValue::string(tag, s.to_str().map_err(|_| "string value is not UTF-8")?)
        }
        TpgValueKind::Opaque => RuntimeValue::host(tag, Opaque(v.opaque as usize)),
    })
}

/// Converts for the host; strings are kept alive in `keep`.
fn to_c(v: &RuntimeValue, keep: &mut Vec<CString>) -> TpgValue {
    let mut out = TpgValue {
        kind: TpgValueKind::Int,
        int_value: 0,
        str_value: ptr::null(),
        opaque: ptr::null_mut(),
    };
    match &v.payload {
        Payload::Int(i) => out.int_value = *i,
        Payload::Str(s) => {
            let c = CString::new(s.replace('\0', " ")).unwrap_or_default();
            out.kind = TpgValueKind::Str;
            out.str_value = c.as_ptr();
            keep.push(c);
        }
        Payload::Host(_) => {
            out.kind = TpgValueKind::Opaque;
            out.opaque = v
                .downcast::<Opaque>()
                .map_or(ptr::null_mut(), |o| o.0 as *mut c_void);
        }
    }
    out
}

fn declared_types(
    ext: &dyn Extension,
    decls: &[tpg_core::syntax::ast::AttributeDecl],
) -> Vec<TypeId> {
    let sys = ext.types();
    decls
        .iter()
        .map(|d| {
            d.ty.as_ref()
                .and_then(|t| ext.resolve_type(t))
                .unwrap_or(sys.string_type())
        })
        .collect()
}

/// Binds the external function `name` to a host callback. `user` is passed
/// back unchanged on every call.
///
/// # Safety
/// `session` must be a live session; `callback` and `user` must stay valid
/// for as long as the session runs.
#[no_mangle]
pub unsafe extern "C" fn tpg_bind(
    session: *mut TpgSession,
    name: *const c_char,
    callback: TpgExternalFn,
    user: *mut c_void,
) -> TpgStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            return fail(TpgStatus::NullArgument, "session is null");
        };
        let name = match text(name, "name") {
            Ok(n) => n.to_string(),
            Err(st) => return st,
        };
        let Some(callback) = callback else {
            return fail(TpgStatus::NullArgument, "callback is null");
        };
        let Some((v, _)) = &s.state else {
            return fail(
                TpgStatus::InvalidSession,
                "the session has no valid specification",
            );
        };
        let Some(sig) = v.spec.externals.iter().find(|e| e.name.name == name) else {
            return fail(
                TpgStatus::OutOfRange,
                format!("no external function {name}"),
            );
        };
        let result_types = declared_types(v.ext.as_ref(), &sig.outputs);
        let user = user as usize;
        s.externals.bind(name, move |args| {
            let mut keep = Vec::new();
            let c_args: Vec<TpgValue> = args.iter().map(|a| to_c(a, &mut keep)).collect();
            let mut results = vec![
                TpgValue {
                    kind: TpgValueKind::Int,
                    int_value: 0,
                    str_value: ptr::null(),
                    opaque: ptr::null_mut(),
                };
                result_types.len()
            ];
            // SAFETY: the binder guarantees the callback and user data are valid.
            let status = unsafe {
                callback(
                    user as *mut c_void,
                    c_args.as_ptr(),
                    c_args.len(),
                    results.as_mut_ptr(),
                    results.len(),
                )
            };
            if status != TpgStatus::Ok {
                return Err(HostError(format!("callback returned {status:?}")));
            }
            results
                .iter()
                .zip(&result_types)
                .map(|(r, &t)| to_runtime(r, t).map_err(HostError))
                .collect()
        });
        TpgStatus::Ok
    })
}

/// Parses `input` from `start_rule` and evaluates `function` (null for the
/// rule's own function). Up to `capacity` outputs are written to `outputs`
/// and their number to `*count`. Output strings stay valid until the next
/// run on the session.
///
/// # Safety
/// Pointers must be valid for the given lengths; `count` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tpg_run(
    session: *mut TpgSession,
    start_rule: *const c_char,
    function: *const c_char,
    inputs: *const TpgValue,
    ninputs: usize,
    input: *const c_char,
    outputs: *mut TpgValue,
    capacity: usize,
    count: *mut usize,
) -> TpgStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            return fail(TpgStatus::NullArgument, "session is null");
        };
        if count.is_null() || (ninputs > 0 && inputs.is_null()) {
            return fail(TpgStatus::NullArgument, "count or inputs is null");
        }
        let args = (|| {
            Ok::<_, TpgStatus>((
                text(start_rule, "start_rule")?,
                opt_text(function, "function")?,
                text(input, "input")?,
            ))
        })();
        let (start_rule, function, input) = match args {
            Ok(a) => a,
            Err(st) => return st,
        };
        let Some((v, _)) = &s.state else {
            return fail(
                TpgStatus::InvalidSession,
                "the session has no valid specification",
            );
        };
        let f = match function {
            Some(name) => v.spec.function(name),
            None => v.spec.start_function(start_rule),
        };
        let input_types = f.map_or_else(Vec::new, |f| declared_types(v.ext.as_ref(), &f.inputs));
        let raw = if ninputs == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(inputs, ninputs)
        };
        let mut values = Vec::with_capacity(raw.len());
        for (i, r) in raw.iter().enumerate() {
            let tag = input_types
                .get(i)
                .copied()
                .unwrap_or(v.ext.types().string_type());
            match to_runtime(r, tag) {
                Ok(x) => values.push(x),
                Err(e) => return fail(TpgStatus::Runtime, e),
            }
        }
        let result = Interpreter::new(v, start_rule)
            .and_then(|it| it.run(function, values, input, &s.externals));
        match result {
            Ok(out) => {
                *count = out.len();
                if out.len() > capacity || (capacity > 0 && outputs.is_null()) {
                    return fail(
                        TpgStatus::OutOfRange,
                        format!("{} outputs do not fit", out.len()),
                    );
                }
                let mut keep = Vec::new();
                for (i, o) in out.iter().enumerate() {
                    *outputs.add(i) = to_c(o, &mut keep);
                }
                s.output_strings = keep;
                TpgStatus::Ok
            }
            Err(e) => fail(TpgStatus::Runtime, e.to_string()),
        }
    })
}
