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

use std::collections::HashMap;
use std::ffi::{c_void, CStr, CString};
use std::ptr;

use tpg_ffi::*;

const ARITH: &str = include_str!("../../core/tests/fixtures/arith.gpg");
const ARITH_UNINIT: &str = include_str!("../../core/tests/fixtures/arith_uninit.gpg");
const SIMPLE_GTS: &str = include_str!("../../core/tests/fixtures/simple.gts");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = tpg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn session(spec: &str, profile: Option<&str>) -> (TpgStatus, *mut TpgSession) {
    let spec = c(spec);
    let gts = c(SIMPLE_GTS);
    let profile = profile.map(c);
    let mut out = ptr::null_mut();
    let st = unsafe {
        tpg_session_new(
            spec.as_ptr(),
            gts.as_ptr(),
            ptr::null(),
            profile.as_ref().map_or(ptr::null(), |p| p.as_ptr()),
            &mut out,
        )
    };
    (st, out)
}

fn int(i: i64) -> TpgValue {
    TpgValue {
        kind: TpgValueKind::Int,
        int_value: i,
        str_value: ptr::null(),
        opaque: ptr::null_mut(),
    }
}

unsafe fn args<'a>(a: *const TpgValue, n: usize) -> &'a [TpgValue] {
    std::slice::from_raw_parts(a, n)
}

unsafe extern "C" fn arith(
    user: *mut c_void,
    a: *const TpgValue,
    n: usize,
    r: *mut TpgValue,
    nr: usize,
) -> TpgStatus {
    let op = CStr::from_ptr(user as *const std::ffi::c_char)
        .to_str()
        .unwrap();
    let a = args(a, n);
    assert_eq!(nr, 1);
    let v = match op {
        "zero" => 0,
        "one" => 1,
        "neg" => -a[0].int_value,
        "add" => a[0].int_value + a[1].int_value,
        "mul" => a[0].int_value * a[1].int_value,
        "strToInt" => match CStr::from_ptr(a[0].str_value).to_str().unwrap().parse() {
            Ok(i) => i,
            Err(_) => return TpgStatus::Runtime,
        },
        "value" => {
            let env = &*(a[0].opaque as *const HashMap<String, i64>);
            let name = CStr::from_ptr(a[1].str_value).to_str().unwrap();
            match env.get(name) {
                Some(v) => *v,
                None => return TpgStatus::Runtime,
            }
        }
        _ => unreachable!(),
    };
    *r = int(v);
    TpgStatus::Ok
}

const OPS: [&CStr; 7] = [
    c"zero",
    c"one",
    c"neg",
    c"add",
    c"mul",
    c"strToInt",
    c"value",
];

fn bind_all(s: *mut TpgSession) {
    for op in OPS {
        let st = unsafe { tpg_bind(s, op.as_ptr(), Some(arith), op.as_ptr() as *mut c_void) };
        assert_eq!(st, TpgStatus::Ok);
    }
}

fn evaluate(s: *mut TpgSession, env: &HashMap<String, i64>, text: &str) -> (TpgStatus, i64) {
    let input = [TpgValue {
        kind: TpgValueKind::Opaque,
        int_value: 0,
        str_value: ptr::null(),
        opaque: env as *const _ as *mut c_void,
    }];
    let mut out = [int(0)];
    let mut count = 0;
    let text = c(text);
    let st = unsafe {
        tpg_run(
            s,
            c"expr".as_ptr(),
            ptr::null(),
            input.as_ptr(),
            1,
            text.as_ptr(),
            out.as_mut_ptr(),
            1,
            &mut count,
        )
    };
    (st, out[0].int_value)
}

#[test]
fn runs_arithmetic_through_callbacks() {
    let (st, s) = session(ARITH, None);
    assert_eq!(st, TpgStatus::Ok);
    bind_all(s);
    let env = HashMap::from([("x".to_string(), 4)]);
    assert_eq!(evaluate(s, &env, "x*(3+2)"), (TpgStatus::Ok, 20));
    assert_eq!(evaluate(s, &env, "1 - 2 - 3"), (TpgStatus::Ok, -4));
    let (st, _) = evaluate(s, &env, "y");
    assert_eq!(st, TpgStatus::Runtime);
    assert!(last_error().contains("value"), "{}", last_error());
    let (st, _) = evaluate(s, &env, "(x+*3)");
    assert_eq!(st, TpgStatus::Runtime);
    assert!(
        last_error().contains("parse error at 1:4"),
        "{}",
        last_error()
    );
    unsafe { tpg_session_free(s) };
}

#[test]
fn unbound_externals_are_reported() {
    let (_, s) = session(ARITH, None);
    let env = HashMap::new();
    assert_eq!(evaluate(s, &env, "1").0, TpgStatus::Runtime);
    assert!(last_error().contains("no binding"), "{}", last_error());
    let st = unsafe { tpg_bind(s, c"nothing".as_ptr(), Some(arith), ptr::null_mut()) };
    assert_eq!(st, TpgStatus::OutOfRange);
    unsafe { tpg_session_free(s) };
}

#[test]
fn diagnostics_are_exposed() {
    let (st, s) = session(ARITH_UNINIT, None);
    assert_eq!(st, TpgStatus::Diagnostics);
    assert!(!s.is_null());
    unsafe {
        assert_eq!(tpg_diagnostic_count(s), 1);
        let d = CStr::from_ptr(tpg_diagnostic(s, 0)).to_str().unwrap();
        assert!(d.contains("E-FLOW-UNINIT"), "{d}");
        assert!(tpg_diagnostic(s, 1).is_null());
        let mut g = ptr::null_mut();
        assert_eq!(
            tpg_emit(s, &mut g, ptr::null_mut()),
            TpgStatus::InvalidSession
        );
        assert!(g.is_null());
        tpg_session_free(s);
    }
}

#[test]
fn emits_grammar_and_interface() {
    let (st, s) = session(ARITH, Some("ANTLRJavaBackend"));
    assert_eq!(st, TpgStatus::Ok);
    unsafe {
        let (mut g, mut j) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tpg_emit(s, &mut g, &mut j), TpgStatus::Ok);
        let grammar = CStr::from_ptr(g).to_str().unwrap().to_owned();
        let externals = CStr::from_ptr(j).to_str().unwrap().to_owned();
        tpg_string_free(g);
        tpg_string_free(j);
        assert_eq!(
            grammar,
            include_str!("../../core/tests/fixtures/golden/ExpressionEvaluator.g")
        );
        assert!(externals.contains("public interface ExpressionEvaluatorExternals"));
        tpg_session_free(s);
    }
}

#[test]
fn bad_arguments() {
    let (st, s) = session(ARITH, Some("Missing"));
    assert_eq!(st, TpgStatus::Load);
    assert!(s.is_null());
    assert!(last_error().contains("Missing"));
    let mut out = ptr::null_mut();
    let st =
        unsafe { tpg_session_new(ptr::null(), ptr::null(), ptr::null(), ptr::null(), &mut out) };
    assert_eq!(st, TpgStatus::NullArgument);
    let bad = [0xffu8, 0];
    let st = unsafe {
        tpg_session_new(
            bad.as_ptr().cast(),
            ptr::null(),
            ptr::null(),
            ptr::null(),
            &mut out,
        )
    };
    assert_eq!(st, TpgStatus::InvalidUtf8);
    assert_eq!(unsafe { tpg_diagnostic_count(ptr::null()) }, 0);
}

#[test]
fn header_declares_the_interface() {
    let h = include_str!("../include/tpg.h");
    for name in [
        "tpg_session_new",
        "tpg_bind",
        "tpg_run",
        "tpg_emit",
        "tpg_last_error",
        "TPG_STATUS_DIAGNOSTICS",
    ] {
        assert!(h.contains(name), "{name}");
    }
}
