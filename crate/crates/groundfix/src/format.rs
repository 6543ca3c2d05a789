//! Output formats: ground-program text dumps, target relations as TSV or
//! JSON, and stats reports.

use std::fmt::Write as _;

use groundfix_core::eval::RelationMap;
use groundfix_core::grounder::GroundReport;
use groundfix_core::grounding::{AtomKind, Grounding, PredRole};
use groundfix_core::instance::Instance;
use groundfix_core::semiring::Semiring;
use serde::Serialize;

use crate::pipeline::StatsReport;

/// Letter used for coefficients of each EDB symbol: `e`, `f`, `g`, ... in
/// order of first appearance; past `z` the index is spelled out.
fn coefficient_prefixes(g: &Grounding) -> Vec<Option<String>> {
    let mut next = 0usize;
    g.preds()
        .iter()
        .map(|p| {
            (p.role == PredRole::Edb).then(|| {
                let i = next;
                next += 1;
                match (b'e' + i as u8) as char {
                    c if i < 22 => c.to_string(),
                    _ => format!("c{i}"),
                }
            })
        })
        .collect()
}

fn namer(g: &Grounding) -> impl Fn(u32) -> String + '_ {
    let prefixes = coefficient_prefixes(g);
    move |id| {
        let p = g.atom(id).pred as usize;
        let letter = prefixes[p].clone().unwrap_or_else(|| "c".into());
        g.atom_name(id, |_| letter.clone())
    }
}

/// Equations as `x_T_a_b = e_R_a_b + x_T_a_a * f_U_a * e_R_a_b ;`,
/// preceded by one `% name = value` comment per coefficient.
pub fn grounding_text(g: &Grounding, sr: &Semiring) -> String {
    let name = namer(g);
    let mut out = String::new();
    for (i, a) in g.atoms().iter().enumerate() {
        if let AtomKind::Coefficient(v) = a.kind {
            let _ = writeln!(out, "% {} = {}", name(i as u32), sr.format_value(&v));
        }
    }
    for (x, ms) in g.equations() {
        let rhs = if ms.is_empty() {
            "0".to_string()
        } else {
            ms.iter()
                .map(|m| {
                    if m.is_empty() {
                        "1".to_string()
                    } else {
                        m.iter().map(|&a| name(a)).collect::<Vec<_>>().join(" * ")
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(out, "{} = {rhs} ;", name(x));
    }
    out
}

#[derive(Serialize)]
struct JsonAtom {
    name: String,
    pred: String,
    args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

#[derive(Serialize)]
struct JsonEquation {
    lhs: u32,
    monomials: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct JsonGrounding<'a> {
    semiring: String,
    size: usize,
    atoms: Vec<JsonAtom>,
    equations: Vec<JsonEquation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bodies: Option<Vec<JsonBody<'a>>>,
}

#[derive(Serialize)]
struct JsonBody<'a> {
    rule: &'a str,
    body: usize,
    strategy: String,
    size: usize,
}

pub fn grounding_json(g: &Grounding, sr: &Semiring, report: Option<&GroundReport>) -> String {
    let name = namer(g);
    let atoms = g
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| JsonAtom {
            name: name(i as u32),
            pred: g.pred_info(a.pred).name.clone(),
            args: a.tuple.iter().map(|&c| g.domain()[c as usize].clone()).collect(),
            value: match a.kind {
                AtomKind::Coefficient(v) => Some(sr.format_value(&v)),
                AtomKind::Variable => None,
            },
        })
        .collect();
    let equations = g
        .equations()
        .map(|(x, ms)| JsonEquation {
            lhs: x,
            monomials: ms.iter().map(|m| m.to_vec()).collect(),
        })
        .collect();
    let doc = JsonGrounding {
        semiring: sr.token(),
        size: g.size(),
        atoms,
        equations,
        bodies: report.map(|r| {
            r.bodies
                .iter()
                .map(|b| JsonBody {
                    rule: &b.rule,
                    body: b.body,
                    strategy: b.strategy.to_string(),
                    size: b.size,
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// One `T(a,b)<TAB>value` line per tuple, sorted by constant names.
pub fn relation_tsv(pred: &str, rel: &RelationMap, inst: &Instance) -> String {
    let sr = inst.semiring();
    let mut out = String::new();
    for (tuple, v) in rel {
        let _ = writeln!(out, "{pred}({})\t{}", inst.names(tuple).join(","), sr.format_value(v));
    }
    out
}

#[derive(Serialize)]
struct JsonTuple<'a> {
    args: Vec<&'a str>,
    value: String,
}

#[derive(Serialize)]
struct JsonRun<'a> {
    target: &'a str,
    semiring: String,
    tuples: Vec<JsonTuple<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<&'a StatsReport>,
}

pub fn relation_json(pred: &str, rel: &RelationMap, inst: &Instance, stats: Option<&StatsReport>) -> String {
    let sr = inst.semiring();
    let doc = JsonRun {
        target: pred,
        semiring: sr.token(),
        tuples: rel
            .iter()
            .map(|(t, v)| JsonTuple {
                args: inst.names(t),
                value: sr.format_value(v),
            })
            .collect(),
        stats,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// `key: value` lines.
pub fn stats_text(s: &StatsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m: {}", s.m);
    let _ = writeln!(out, "n: {}", s.n);
    let _ = writeln!(out, "grounding size: {}", s.grounding_size);
    let _ = writeln!(out, "equations: {}", s.equations);
    let _ = writeln!(out, "canonical size: {}", s.canonical_size);
    let _ = writeln!(out, "canonical equations: {}", s.canonical_equations);
    for b in &s.strategies {
        let _ = writeln!(out, "body {b}");
    }
    let _ = writeln!(out, "solver: {}", s.solver);
    let _ = writeln!(out, "popped: {}", s.popped);
    let _ = writeln!(out, "equation visits: {}", s.equation_visits);
    let _ = writeln!(out, "semiring ops: {}", s.semiring_ops);
    let _ = writeln!(out, "iterations: {}", s.iterations);
    if let Some(ms) = s.wall_ms {
        let _ = writeln!(out, "wall ms: {ms:.3}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_facts, parse_program};
    use crate::pipeline::{ground, RunConfig};
    use groundfix_core::grounder::Strategy;

    #[test]
    fn two_hop_dump_names_coefficients_by_symbol() {
        let p = parse_program(include_str!("../corpus/node_weighted_tc.dl")).unwrap();
        let sr = Semiring::boolean();
        let (inst, _) = parse_facts("R(a,b). R(b,c). U(a). U(b).", &sr).unwrap();
        let cfg = RunConfig {
            strategy: Strategy::Naive,
            ..RunConfig::default()
        };
        let (g, _) = ground(&p, &inst, &cfg).unwrap();
        let text = grounding_text(&g, &sr);
        assert!(text.contains("% e_R_a_b = true\n"), "{text}");
        assert!(text.contains("% f_U_a = true\n"), "{text}");
        assert!(text.contains("x_T_a_b = e_R_a_b + x_T_a_a * f_U_a * e_R_a_b ;\n"), "{text}");
        assert!(text.contains("x_T_c_a = 0 ;\n"), "{text}");
        let json: serde_json::Value = serde_json::from_str(&grounding_json(&g, &sr, None)).unwrap();
        assert_eq!(json["size"].as_u64().unwrap() as usize, g.size());
    }
}
