#![allow(dead_code)]

use groundfix_core::grounding::{Grounding, PredRole};
use groundfix_core::semiring::{Level, Semiring, Value};
use proptest::prelude::*;

/// Shape of a random ground system: coefficient values as small integers
/// and, per variable, monomials over atom indices.
#[derive(Debug, Clone)]
pub struct Shape {
    pub coefficients: Vec<u8>,
    pub equations: Vec<Vec<Vec<usize>>>,
}

pub fn shape(max_vars: usize) -> impl Strategy<Value = Shape> {
    (1..=6usize, 1..=max_vars).prop_flat_map(|(k, v)| {
        let atoms = k + v;
        let monomial = prop::collection::vec(0..atoms, 0..=3);
        (
            prop::collection::vec(0u8..=9, k),
            prop::collection::vec(prop::collection::vec(monomial, 0..=3), v),
        )
            .prop_map(|(coefficients, equations)| Shape { coefficients, equations })
    })
}

/// Non-`𝟘` value from a small integer seed.
pub fn value(sr: &Semiring, s: u8) -> Value {
    match sr.name() {
        "boolean" => Value::Bool(true),
        "tropical" => Value::trop(f64::from(s % 10 + 1)),
        "naturals" => Value::Nat(u64::from(s % 3 + 1)),
        "access" => Value::Access(Level::ALL[usize::from(s % 4)]),
        _ => Value::Set(u64::from(s % 7 + 1)),
    }
}

pub fn build(shape: &Shape, sr: &Semiring) -> Grounding {
    let domain: Vec<String> = (0..64).map(|i| format!("c{i}")).collect();
    let mut g = Grounding::new(domain);
    let e = g.pred("E", 1, PredRole::Edb);
    let x = g.pred("X", 1, PredRole::Idb);
    let mut ids = Vec::new();
    for (i, &c) in shape.coefficients.iter().enumerate() {
        ids.push(g.coefficient(e, &[i as u32], value(sr, c)));
    }
    for i in 0..shape.equations.len() {
        ids.push(g.variable(x, &[i as u32]));
    }
    let k = shape.coefficients.len();
    for (i, ms) in shape.equations.iter().enumerate() {
        let head = ids[k + i];
        g.ensure_equation(head).unwrap();
        for m in ms {
            g.push_monomial(head, m.iter().map(|&a| ids[a]).collect()).unwrap();
        }
    }
    g
}

pub fn semirings() -> Vec<Semiring> {
    vec![
        Semiring::boolean(),
        Semiring::tropical(),
        Semiring::naturals(),
        Semiring::access(),
        Semiring::set(["a", "b", "c"]).unwrap(),
    ]
}
