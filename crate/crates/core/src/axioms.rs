//! Exhaustive law checking for semiring instances over finite samples.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::semiring::{Level, Semiring, SemiringKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    PlusAssociative,
    PlusCommutative,
    PlusIdentity,
    TimesAssociative,
    TimesCommutative,
    TimesIdentity,
    Distributive,
    Annihilation,
    OrderReflexive,
    OrderAntisymmetric,
    OrderTransitive,
    OrderMatchesDefinition,
    OrderCompatibleWithPlus,
    Idempotent,
    OneAbsorbs,
    ProductBelowFactor,
    AbsorptionEquivalence,
    TotalOrder,
    RankBound,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::PlusAssociative => "(a⊕b)⊕c = a⊕(b⊕c)",
            Law::PlusCommutative => "a⊕b = b⊕a",
            Law::PlusIdentity => "𝟘⊕a = a",
            Law::TimesAssociative => "(a⊗b)⊗c = a⊗(b⊗c)",
            Law::TimesCommutative => "a⊗b = b⊗a",
            Law::TimesIdentity => "𝟙⊗a = a",
            Law::Distributive => "a⊗(b⊕c) = (a⊗b)⊕(a⊗c)",
            Law::Annihilation => "a⊗𝟘 = 𝟘",
            Law::OrderReflexive => "a ⊑ a",
            Law::OrderAntisymmetric => "a ⊑ b ∧ b ⊑ a ⇒ a = b",
            Law::OrderTransitive => "a ⊑ b ∧ b ⊑ c ⇒ a ⊑ c",
            Law::OrderMatchesDefinition => "a ⊑ b ⇔ ∃z: a⊕z = b",
            Law::OrderCompatibleWithPlus => "a ⊑ a⊕b",
            Law::Idempotent => "a⊕a = a",
            Law::OneAbsorbs => "𝟙 ⊕ a = 𝟙",
            Law::ProductBelowFactor => "a⊗b ⊑ a",
            Law::AbsorptionEquivalence => "absorptive ⇔ (a⊗b ⊑ a)",
            Law::TotalOrder => "a ⊑ b ∨ b ⊑ a",
            Law::RankBound => "strict ⊕-chains have length ≤ r",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    /// The law does not hold; the values are a counterexample.
    Fail(Vec<Value>),
    /// The law is not claimed by the declared capabilities.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawResult {
    pub law: Law,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub semiring: &'static str,
    pub results: Vec<LawResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| !matches!(r.outcome, Outcome::Fail(_)))
    }

    pub fn outcome(&self, law: Law) -> Option<&Outcome> {
        self.results.iter().find(|r| r.law == law).map(|r| &r.outcome)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawResult> {
        self.results.iter().filter(|r| matches!(r.outcome, Outcome::Fail(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("samples must include 𝟘 and 𝟙")]
    MissingIdentity,
    #[error("need at least {needed} distinct samples, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error(transparent)]
    Semiring(#[from] crate::semiring::SemiringError),
}

/// Up to `max` distinct values of `s`, always including 𝟘 and 𝟙. Finite
/// carriers are enumerated exhaustively when they fit.
pub fn exhaustive_samples(s: &Semiring, max: usize) -> Vec<Value> {
    let mut out = match s.kind() {
        SemiringKind::Boolean => vec![Value::Bool(false), Value::Bool(true)],
        SemiringKind::Tropical => [f64::INFINITY, 0.0, 1.0, 2.0, 3.0, 5.0]
            .iter()
            .map(|w| Value::trop(*w))
            .collect(),
        SemiringKind::Naturals => (0..6).map(Value::Nat).collect(),
        SemiringKind::Set { universe } => {
            let n = universe.len().min(16);
            let mut v: Vec<Value> = vec![s.zero(), s.one()];
            v.extend((1..(1u64 << n)).map(Value::Set));
            v
        }
        SemiringKind::Access => Level::ALL.iter().map(|l| Value::Access(*l)).collect(),
    };
    let mut uniq: Vec<Value> = Vec::new();
    for v in out.drain(..) {
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }
    uniq.truncate(max.max(2));
    uniq
}

/// Checks the semiring laws over every sampled pair and triple, plus the
/// laws implied by the declared capabilities.
pub fn axiom_suite(s: &Semiring, samples: &[Value]) -> Result<AxiomReport, SampleError> {
    let mut vals: Vec<Value> = Vec::new();
    for v in samples {
        s.check(v)?;
        if !vals.contains(v) {
            vals.push(*v);
        }
    }
    let zero = s.zero();
    let one = s.one();
    if !vals.contains(&zero) || !vals.contains(&one) {
        return Err(SampleError::MissingIdentity);
    }
    let needed = s.domain_size().map_or(3, |d| (d as usize).min(3));
    if vals.len() < needed {
        return Err(SampleError::TooFew {
            needed,
            got: vals.len(),
        });
    }

    let caps = s.capabilities();
    let p = |a: &Value, b: &Value| s.plus(a, b).expect("checked sample");
    let t = |a: &Value, b: &Value| s.times(a, b).expect("checked sample");
    let le = |a: &Value, b: &Value| s.leq(a, b).expect("checked sample");

    let mut results = Vec::new();
    let mut push = |law, outcome| results.push(LawResult { law, outcome });

    push(Law::PlusAssociative, forall3(&vals, |a, b, c| p(&p(a, b), c) == p(a, &p(b, c))));
    push(Law::PlusCommutative, forall2(&vals, |a, b| p(a, b) == p(b, a)));
    push(Law::PlusIdentity, forall1(&vals, |a| p(&zero, a) == *a));
    push(Law::TimesAssociative, forall3(&vals, |a, b, c| t(&t(a, b), c) == t(a, &t(b, c))));
    push(Law::TimesCommutative, forall2(&vals, |a, b| t(a, b) == t(b, a)));
    push(Law::TimesIdentity, forall1(&vals, |a| t(&one, a) == *a));
    push(
        Law::Distributive,
        forall3(&vals, |a, b, c| t(a, &p(b, c)) == p(&t(a, b), &t(a, c))),
    );
    push(Law::Annihilation, forall1(&vals, |a| t(a, &zero) == zero));
    push(Law::OrderReflexive, forall1(&vals, |a| le(a, a)));
    push(
        Law::OrderAntisymmetric,
        forall2(&vals, |a, b| !(le(a, b) && le(b, a)) || a == b),
    );
    push(
        Law::OrderTransitive,
        forall3(&vals, |a, b, c| !(le(a, b) && le(b, c)) || le(a, c)),
    );
    push(
        Law::OrderMatchesDefinition,
        forall2(&vals, |a, b| {
            let definitional = vals.iter().chain([a, b]).any(|z| p(a, z) == *b);
            definitional == le(a, b)
        }),
    );
    push(Law::OrderCompatibleWithPlus, forall2(&vals, |a, b| le(a, &p(a, b))));

    push(
        Law::Idempotent,
        if caps.is_dioid {
            forall1(&vals, |a| p(a, a) == *a)
        } else {
            Outcome::Skipped
        },
    );

    let one_absorbs = forall1(&vals, |a| p(&one, a) == one);
    let below = forall2(&vals, |a, b| le(&t(a, b), a));
    if caps.is_absorptive {
        push(Law::OneAbsorbs, one_absorbs.clone());
        push(Law::ProductBelowFactor, below.clone());
    } else {
        push(Law::OneAbsorbs, Outcome::Skipped);
        push(Law::ProductBelowFactor, Outcome::Skipped);
    }
    // The equivalence only holds for naturally ordered dioids.
    let dioid_on_samples = matches!(forall1(&vals, |a| p(a, a) == *a), Outcome::Pass);
    push(
        Law::AbsorptionEquivalence,
        if dioid_on_samples {
            let lhs = matches!(one_absorbs, Outcome::Pass);
            let rhs = matches!(below, Outcome::Pass);
            if lhs == rhs {
                Outcome::Pass
            } else {
                match (one_absorbs, below) {
                    (Outcome::Fail(w), _) | (_, Outcome::Fail(w)) => Outcome::Fail(w),
                    _ => unreachable!(),
                }
            }
        } else {
            Outcome::Skipped
        },
    );

    push(
        Law::TotalOrder,
        if caps.is_total_order {
            forall2(&vals, |a, b| le(a, b) || le(b, a))
        } else {
            Outcome::Skipped
        },
    );

    push(
        Law::RankBound,
        match caps.finite_rank {
            Some(r) => rank_check(s, &vals, r as usize),
            None => Outcome::Skipped,
        },
    );

    Ok(AxiomReport {
        semiring: s.name(),
        results,
    })
}

fn forall1(vals: &[Value], f: impl Fn(&Value) -> bool) -> Outcome {
    vals.iter()
        .find(|a| !f(a))
        .map_or(Outcome::Pass, |a| Outcome::Fail(vec![*a]))
}

fn forall2(vals: &[Value], f: impl Fn(&Value, &Value) -> bool) -> Outcome {
    for a in vals {
        for b in vals {
            if !f(a, b) {
                return Outcome::Fail(vec![*a, *b]);
            }
        }
    }
    Outcome::Pass
}

fn forall3(vals: &[Value], f: impl Fn(&Value, &Value, &Value) -> bool) -> Outcome {
    for a in vals {
        for b in vals {
            for c in vals {
                if !f(a, b, c) {
                    return Outcome::Fail(vec![*a, *b, *c]);
                }
            }
        }
    }
    Outcome::Pass
}

/// Searches for a chain `v₀ ⊏ v₁ ⊏ … ⊏ v_{r+1}` with `v_{i+1} = v_i ⊕ s`
/// for sampled `s`, starting from every sample. The witness is the chain.
fn rank_check(s: &Semiring, vals: &[Value], r: usize) -> Outcome {
    // memo: longest strict chain from a value, capped at r + 1
    let mut memo: Vec<(Value, usize)> = Vec::new();
    fn longest(
        s: &Semiring,
        vals: &[Value],
        v: Value,
        cap: usize,
        memo: &mut Vec<(Value, usize)>,
    ) -> usize {
        if let Some((_, l)) = memo.iter().find(|(m, _)| *m == v) {
            return *l;
        }
        let mut best = 0;
        if cap > 0 {
            for step in vals {
                let next = s.plus(&v, step).expect("checked sample");
                if next != v {
                    best = best.max(1 + longest(s, vals, next, cap - 1, memo));
                    if best > cap {
                        break;
                    }
                }
            }
        }
        let best = best.min(cap);
        memo.push((v, best));
        best
    }
    for start in vals {
        memo.clear();
        if longest(s, vals, *start, r + 1, &mut memo) > r {
            // rebuild one witness chain greedily from the memo
            let mut chain = vec![*start];
            let mut cur = *start;
            let mut remaining = r + 1;
            while remaining > 0 {
                let next = vals.iter().map(|st| s.plus(&cur, st).unwrap()).find(|n| {
                    *n != cur
                        && memo
                            .iter()
                            .find(|(m, _)| m == n)
                            .is_some_and(|(_, l)| *l + 1 >= remaining)
                });
                match next {
                    Some(n) => {
                        chain.push(n);
                        cur = n;
                        remaining -= 1;
                    }
                    None => break,
                }
            }
            return Outcome::Fail(chain);
        }
    }
    Outcome::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Capabilities, Tropical};

    #[test]
    fn tropical_passes_including_absorption() {
        let s = Semiring::tropical();
        let samples = [f64::INFINITY, 0.0, 1.0, 3.0].map(Value::trop);
        let report = axiom_suite(&s, &samples).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.outcome(Law::OneAbsorbs), Some(&Outcome::Pass));
        assert_eq!(report.outcome(Law::ProductBelowFactor), Some(&Outcome::Pass));
        assert_eq!(report.outcome(Law::AbsorptionEquivalence), Some(&Outcome::Pass));
    }

    #[test]
    fn naturals_claiming_absorption_fails_with_witness_one() {
        let s = Semiring::naturals().with_capabilities(Capabilities {
            is_dioid: false,
            is_absorptive: true,
            is_total_order: true,
            finite_rank: None,
        });
        let report = axiom_suite(&s, &exhaustive_samples(&s, 6)).unwrap();
        assert_eq!(
            report.outcome(Law::OneAbsorbs),
            Some(&Outcome::Fail(vec![Value::Nat(1)]))
        );
        assert!(!report.passed());
    }

    #[test]
    fn boolean_rank_one_passes() {
        let s = Semiring::boolean();
        let report = axiom_suite(&s, &exhaustive_samples(&s, 6)).unwrap();
        assert!(report.passed());
        assert_eq!(report.outcome(Law::RankBound), Some(&Outcome::Pass));
    }

    #[test]
    fn understated_rank_is_caught() {
        let s = Semiring::access().with_capabilities(Capabilities {
            finite_rank: Some(3),
            ..Semiring::access().capabilities()
        });
        let report = axiom_suite(&s, &exhaustive_samples(&s, 6)).unwrap();
        match report.outcome(Law::RankBound) {
            Some(Outcome::Fail(chain)) => assert_eq!(chain.len(), 5),
            other => panic!("expected rank failure, got {other:?}"),
        }
    }

    #[test]
    fn false_total_order_claim_on_sets_fails() {
        let s = Semiring::set(["a", "b"]).unwrap();
        let caps = Capabilities {
            is_total_order: true,
            ..s.capabilities()
        };
        let s = s.with_capabilities(caps);
        let report = axiom_suite(&s, &exhaustive_samples(&s, 6)).unwrap();
        assert!(matches!(report.outcome(Law::TotalOrder), Some(Outcome::Fail(_))));
    }

    #[test]
    fn samples_must_contain_identities() {
        let s = Semiring::tropical();
        let err = axiom_suite(&s, &[Value::trop(1.0), Value::trop(2.0), Value::trop(3.0)]);
        assert_eq!(err.unwrap_err(), SampleError::MissingIdentity);
        let err = axiom_suite(&s, &[Value::Trop(Tropical::INFINITY), Value::trop(0.0)]);
        assert!(matches!(err.unwrap_err(), SampleError::TooFew { .. }));
    }

    #[test]
    fn every_shipped_instance_passes() {
        for s in crate::semiring::tests::all_instances() {
            let samples = exhaustive_samples(&s, 6);
            assert!(samples.len() <= 6);
            let report = axiom_suite(&s, &samples).unwrap();
            assert!(
                report.passed(),
                "{}: {:?}",
                s.name(),
                report.failures().collect::<Vec<_>>()
            );
        }
    }
}
