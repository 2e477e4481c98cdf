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

mod common;

use proptest::prelude::*;

use common::*;
use tpg_core::backend::Interpreter;

#[derive(Clone, Debug)]
enum Ast {
    Num(i64),
    Var(usize),
    Bin(Box<Ast>, char, Box<Ast>),
    Paren(Box<Ast>),
}

const VARS: [(&str, i64); 3] = [("x", 4), ("y", -3), ("zz9", 11)];

fn ast() -> impl Strategy<Value = Ast> {
    prop_oneof![
        (0i64..1000).prop_map(Ast::Num),
        (0..VARS.len()).prop_map(Ast::Var)
    ]
    .prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(vec!['+', '-', '*']),
                inner.clone()
            )
                .prop_map(|(a, op, b)| Ast::Bin(Box::new(a), op, Box::new(b))),
            inner.prop_map(|a| Ast::Paren(Box::new(a))),
        ]
    })
}

/// Source text with every binary node parenthesized, and its value.
fn render(a: &Ast) -> (String, i64) {
    match a {
        Ast::Num(n) => (n.to_string(), *n),
        Ast::Var(i) => (VARS[*i].0.to_string(), VARS[*i].1),
        Ast::Paren(a) => {
            let (s, v) = render(a);
            (format!("( {s} )"), v)
        }
        Ast::Bin(a, op, b) => {
            let ((l, x), (r, y)) = (render(a), render(b));
            let v = match op {
                '+' => x + y,
                '-' => x - y,
                _ => x * y,
            };
            (format!("({l}{op}{r})"), v)
        }
    }
}

proptest! {
    #[test]
    fn evaluation_matches_direct_arithmetic(a in ast()) {
        let v = validated(ARITH);
        let (text, expected) = render(&a);
        let out = Interpreter::new(&v, "expr")
            .unwrap()
            .with_tag_checks(true)
            .run(None, vec![environment(&v, &VARS)], &text, &arithmetic_bindings(&v))
            .unwrap();
        prop_assert_eq!(out[0].as_int(), Some(expected), "{}", text);
    }

    #[test]
    fn left_associative_chains(nums in prop::collection::vec((0i64..100, any::<bool>()), 1..8)) {
        let v = validated(ARITH);
        let mut text = nums[0].0.to_string();
        let mut expected = nums[0].0;
        for &(n, plus) in &nums[1..] {
            text.push_str(if plus { " + " } else { " - " });
            text.push_str(&n.to_string());
            expected = if plus { expected + n } else { expected - n };
        }
        let out = tpg_core::backend::interpret(&v, "expr", None, vec![environment(&v, &[])], &text, &arithmetic_bindings(&v)).unwrap();
        prop_assert_eq!(out[0].as_int(), Some(expected));
    }
}
