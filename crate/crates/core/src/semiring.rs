//! Semirings, their values, natural order and capability flags.
//!
//! Five instances ship with the engine: boolean, tropical (min, +),
//! naturals (+, *), the set semiring over a fixed finite universe and the
//! access-control chain. Every instance is a commutative semiring whose
//! natural order `a ⊑ b ⇔ ∃z: a ⊕ z = b` is decided directly by
//! [`Semiring::leq`].
//!
//! The ω-continuity / ω-completeness assumption needed for Kleene
//! iteration to reach the least fixpoint holds for every shipped instance:
//! the four idempotent ones have no infinite strictly ascending chains
//! (boolean, set, access) or are closed under infima (tropical), and the
//! naturals are only ever solved under a bounded iteration budget.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Largest universe accepted by the set semiring (values are 64-bit masks).
pub const MAX_SET_UNIVERSE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("operand of kind `{found}` used with the `{expected}` semiring")]
    Mismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("value out of range for the `{semiring}` semiring: {detail}")]
    OutOfRange {
        semiring: &'static str,
        detail: String,
    },
    #[error("unknown semiring token `{0}` (expected boolean | tropical | naturals | set:<k1,..> | access)")]
    UnknownToken(String),
    #[error("cannot parse `{literal}` as a {semiring} value")]
    BadLiteral {
        semiring: &'static str,
        literal: String,
    },
    #[error("invalid set universe: {0}")]
    BadUniverse(String),
}

/// A clearance level of the access-control semiring.
///
/// Declared in clearance order `P < C < S < T < 0`; ⊕ is `min` and ⊗ is
/// `max` in that order, so `0` is the additive identity and `P` the
/// multiplicative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Public,
    Confidential,
    Secret,
    TopSecret,
    Zero,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::Public,
        Level::Confidential,
        Level::Secret,
        Level::TopSecret,
        Level::Zero,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Level::Public => "P",
            Level::Confidential => "C",
            Level::Secret => "S",
            Level::TopSecret => "T",
            Level::Zero => "0",
        }
    }

    fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "P" => Level::Public,
            "C" => Level::Confidential,
            "S" => Level::Secret,
            "T" => Level::TopSecret,
            "0" => Level::Zero,
            _ => return None,
        })
    }
}

/// A tropical weight: a non-negative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tropical(f64);

impl Tropical {
    pub const INFINITY: Tropical = Tropical(f64::INFINITY);
    pub const ZERO_WEIGHT: Tropical = Tropical(0.0);

    pub fn new(w: f64) -> Result<Self, SemiringError> {
        if w.is_nan() || w < 0.0 {
            return Err(SemiringError::OutOfRange {
                semiring: "tropical",
                detail: alloc::format!("weight {w} is negative or NaN"),
            });
        }
        Ok(Tropical(w))
    }

    pub fn weight(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }
}

/// A tagged semiring scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Bool(bool),
    Trop(Tropical),
    Nat(u64),
    /// Bit set over the semiring's universe; bit `i` is the `i`-th key.
    Set(u64),
    Access(Level),
}

impl Value {
    /// Shorthand for a tropical value; panics on negative or NaN weights.
    pub fn trop(w: f64) -> Value {
        Value::Trop(Tropical::new(w).expect("valid tropical weight"))
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Trop(_) => "tropical",
            Value::Nat(_) => "naturals",
            Value::Set(_) => "set",
            Value::Access(_) => "access",
        }
    }
}

/// Which algebraic laws a semiring instance claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub is_dioid: bool,
    pub is_absorptive: bool,
    pub is_total_order: bool,
    pub finite_rank: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemiringKind {
    Boolean,
    Tropical,
    Naturals,
    Set { universe: Vec<String> },
    Access,
}

/// A semiring instance: its carrier, operations and declared capabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semiring {
    kind: SemiringKind,
    caps: Capabilities,
}

impl Semiring {
    pub fn boolean() -> Self {
        Self::from_kind(SemiringKind::Boolean)
    }

    pub fn tropical() -> Self {
        Self::from_kind(SemiringKind::Tropical)
    }

    pub fn naturals() -> Self {
        Self::from_kind(SemiringKind::Naturals)
    }

    pub fn access() -> Self {
        Self::from_kind(SemiringKind::Access)
    }

    /// The set semiring `(2^K, ∪, ∩, ∅, K)`. Keys must be distinct and
    /// non-empty; `1 ≤ |K| ≤ 64`.
    pub fn set<I, S>(keys: I) -> Result<Self, SemiringError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let universe: Vec<String> = keys.into_iter().map(Into::into).collect();
        if universe.is_empty() {
            return Err(SemiringError::BadUniverse("universe is empty".into()));
        }
        if universe.len() > MAX_SET_UNIVERSE {
            return Err(SemiringError::BadUniverse(alloc::format!(
                "{} keys exceed the limit of {MAX_SET_UNIVERSE}",
                universe.len()
            )));
        }
        for (i, k) in universe.iter().enumerate() {
            if k.is_empty() || !k.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(SemiringError::BadUniverse(alloc::format!("bad key `{k}`")));
            }
            if universe[..i].contains(k) {
                return Err(SemiringError::BadUniverse(alloc::format!("duplicate key `{k}`")));
            }
        }
        Ok(Self::from_kind(SemiringKind::Set { universe }))
    }

    fn from_kind(kind: SemiringKind) -> Self {
        let caps = match &kind {
            SemiringKind::Boolean => Capabilities {
                is_dioid: true,
                is_absorptive: true,
                is_total_order: true,
                finite_rank: Some(1),
            },
            SemiringKind::Tropical => Capabilities {
                is_dioid: true,
                is_absorptive: true,
                is_total_order: true,
                finite_rank: None,
            },
            SemiringKind::Naturals => Capabilities {
                is_dioid: false,
                is_absorptive: false,
                is_total_order: true,
                finite_rank: None,
            },
            SemiringKind::Set { universe } => Capabilities {
                is_dioid: true,
                is_absorptive: true,
                is_total_order: universe.len() <= 1,
                finite_rank: Some(universe.len() as u32),
            },
            SemiringKind::Access => Capabilities {
                is_dioid: true,
                is_absorptive: true,
                is_total_order: true,
                finite_rank: Some(4),
            },
        };
        Semiring { kind, caps }
    }

    /// Replaces the declared capabilities. Used to exercise the axiom suite
    /// against deliberately wrong declarations.
    pub fn with_capabilities(mut self, caps: Capabilities) -> Self {
        self.caps = caps;
        self
    }

    pub fn kind(&self) -> &SemiringKind {
        &self.kind
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SemiringKind::Boolean => "boolean",
            SemiringKind::Tropical => "tropical",
            SemiringKind::Naturals => "naturals",
            SemiringKind::Set { .. } => "set",
            SemiringKind::Access => "access",
        }
    }

    /// Number of elements of the carrier, when finite.
    pub fn domain_size(&self) -> Option<u64> {
        match &self.kind {
            SemiringKind::Boolean => Some(2),
            SemiringKind::Set { universe } if universe.len() < 64 => Some(1u64 << universe.len()),
            SemiringKind::Access => Some(5),
            _ => None,
        }
    }

    fn full_mask(universe: &[String]) -> u64 {
        if universe.len() == 64 {
            u64::MAX
        } else {
            (1u64 << universe.len()) - 1
        }
    }

    pub fn zero(&self) -> Value {
        match &self.kind {
            SemiringKind::Boolean => Value::Bool(false),
            SemiringKind::Tropical => Value::Trop(Tropical::INFINITY),
            SemiringKind::Naturals => Value::Nat(0),
            SemiringKind::Set { .. } => Value::Set(0),
            SemiringKind::Access => Value::Access(Level::Zero),
        }
    }

    pub fn one(&self) -> Value {
        match &self.kind {
            SemiringKind::Boolean => Value::Bool(true),
            SemiringKind::Tropical => Value::Trop(Tropical::ZERO_WEIGHT),
            SemiringKind::Naturals => Value::Nat(1),
            SemiringKind::Set { universe } => Value::Set(Self::full_mask(universe)),
            SemiringKind::Access => Value::Access(Level::Public),
        }
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero()
    }

    /// Checks that `v` is an element of this semiring's carrier.
    pub fn check(&self, v: &Value) -> Result<(), SemiringError> {
        match (&self.kind, v) {
            (SemiringKind::Boolean, Value::Bool(_))
            | (SemiringKind::Naturals, Value::Nat(_))
            | (SemiringKind::Access, Value::Access(_)) => Ok(()),
            (SemiringKind::Tropical, Value::Trop(t)) => Tropical::new(t.0).map(|_| ()),
            (SemiringKind::Set { universe }, Value::Set(bits)) => {
                if bits & !Self::full_mask(universe) == 0 {
                    Ok(())
                } else {
                    Err(SemiringError::OutOfRange {
                        semiring: "set",
                        detail: alloc::format!("bits {bits:#x} outside a universe of {}", universe.len()),
                    })
                }
            }
            _ => Err(self.mismatch(v)),
        }
    }

    fn mismatch(&self, v: &Value) -> SemiringError {
        SemiringError::Mismatch {
            expected: self.name(),
            found: v.kind_name(),
        }
    }

    /// `a ⊕ b`.
    pub fn plus(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        Ok(match (&self.kind, a, b) {
            (SemiringKind::Boolean, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (SemiringKind::Tropical, Value::Trop(x), Value::Trop(y)) => {
                Value::Trop(Tropical(x.0.min(y.0)))
            }
            (SemiringKind::Naturals, Value::Nat(x), Value::Nat(y)) => Value::Nat(x.saturating_add(*y)),
            (SemiringKind::Set { .. }, Value::Set(x), Value::Set(y)) => Value::Set(x | y),
            (SemiringKind::Access, Value::Access(x), Value::Access(y)) => Value::Access(*x.min(y)),
            _ => return Err(self.mismatch(if self.check(a).is_err() { a } else { b })),
        })
    }

    /// `a ⊗ b`.
    pub fn times(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        Ok(match (&self.kind, a, b) {
            (SemiringKind::Boolean, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (SemiringKind::Tropical, Value::Trop(x), Value::Trop(y)) => Value::Trop(Tropical(x.0 + y.0)),
            (SemiringKind::Naturals, Value::Nat(x), Value::Nat(y)) => Value::Nat(x.saturating_mul(*y)),
            (SemiringKind::Set { .. }, Value::Set(x), Value::Set(y)) => Value::Set(x & y),
            (SemiringKind::Access, Value::Access(x), Value::Access(y)) => Value::Access(*x.max(y)),
            _ => return Err(self.mismatch(if self.check(a).is_err() { a } else { b })),
        })
    }

    /// The natural order `a ⊑ b`, decided per instance.
    pub fn leq(&self, a: &Value, b: &Value) -> Result<bool, SemiringError> {
        Ok(match (&self.kind, a, b) {
            (SemiringKind::Boolean, Value::Bool(x), Value::Bool(y)) => !*x || *y,
            // min(a, b) = b  ⇔  b ≤ a numerically
            (SemiringKind::Tropical, Value::Trop(x), Value::Trop(y)) => y.0 <= x.0,
            (SemiringKind::Naturals, Value::Nat(x), Value::Nat(y)) => x <= y,
            (SemiringKind::Set { .. }, Value::Set(x), Value::Set(y)) => x & !y == 0,
            // reverse clearance order: 0 ⊑ T ⊑ S ⊑ C ⊑ P
            (SemiringKind::Access, Value::Access(x), Value::Access(y)) => y <= x,
            _ => return Err(self.mismatch(if self.check(a).is_err() { a } else { b })),
        })
    }

    /// A key whose numeric order agrees with `⊑`, available when the
    /// natural order of this instance is total.
    pub fn order_key(&self, v: &Value) -> Option<OrderKey> {
        let k = match (&self.kind, v) {
            (SemiringKind::Boolean, Value::Bool(b)) => *b as u8 as f64,
            (SemiringKind::Tropical, Value::Trop(t)) => -t.0,
            (SemiringKind::Naturals, Value::Nat(n)) => *n as f64,
            (SemiringKind::Set { universe }, Value::Set(bits)) if universe.len() <= 1 => *bits as f64,
            (SemiringKind::Access, Value::Access(l)) => (4 - *l as u8) as f64,
            _ => return None,
        };
        Some(OrderKey(k))
    }

    /// Parses an annotation literal: `true`/`false` (boolean), a decimal or
    /// `inf` (tropical), an unsigned integer (naturals), `{k1,k2}` (set),
    /// or one of `P|C|S|T|0` (access).
    pub fn parse_value(&self, literal: &str) -> Result<Value, SemiringError> {
        let lit = literal.trim();
        let bad = || SemiringError::BadLiteral {
            semiring: self.name(),
            literal: lit.to_string(),
        };
        match &self.kind {
            SemiringKind::Boolean => match lit {
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => Err(bad()),
            },
            SemiringKind::Tropical => {
                if lit == "inf" || lit == "+inf" {
                    return Ok(Value::Trop(Tropical::INFINITY));
                }
                if !lit.chars().all(|c| c.is_ascii_digit() || c == '.') || lit.is_empty() {
                    return Err(bad());
                }
                let w: f64 = lit.parse().map_err(|_| bad())?;
                Tropical::new(w).map(Value::Trop).map_err(|_| bad())
            }
            SemiringKind::Naturals => lit.parse::<u64>().map(Value::Nat).map_err(|_| bad()),
            SemiringKind::Set { universe } => {
                let inner = lit
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(bad)?;
                let mut bits = 0u64;
                for key in inner.split(',').map(str::trim).filter(|k| !k.is_empty()) {
                    let idx = universe.iter().position(|u| u == key).ok_or_else(bad)?;
                    bits |= 1 << idx;
                }
                Ok(Value::Set(bits))
            }
            SemiringKind::Access => Level::from_symbol(lit).map(Value::Access).ok_or_else(bad),
        }
    }

    /// Renders a value in the literal syntax accepted by [`Self::parse_value`].
    pub fn format_value(&self, v: &Value) -> String {
        match (&self.kind, v) {
            (SemiringKind::Set { universe }, Value::Set(bits)) => {
                let keys: Vec<&str> = universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, k)| k.as_str())
                    .collect();
                alloc::format!("{{{}}}", keys.join(","))
            }
            _ => v.to_string(),
        }
    }

    /// The token this semiring is selected by.
    pub fn token(&self) -> String {
        match &self.kind {
            SemiringKind::Set { universe } => alloc::format!("set:{}", universe.join(",")),
            _ => self.name().to_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Trop(t) if t.is_infinite() => f.write_str("inf"),
            Value::Trop(t) => write!(f, "{}", t.0),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Set(bits) => write!(f, "{bits:#b}"),
            Value::Access(l) => f.write_str(l.symbol()),
        }
    }
}

impl FromStr for Semiring {
    type Err = SemiringError;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        match token.trim() {
            "boolean" | "bool" => Ok(Semiring::boolean()),
            "tropical" | "trop" => Ok(Semiring::tropical()),
            "naturals" | "nat" => Ok(Semiring::naturals()),
            "access" => Ok(Semiring::access()),
            t => match t.strip_prefix("set:") {
                Some(keys) => Semiring::set(keys.split(',').map(str::trim)),
                None => Err(SemiringError::UnknownToken(t.to_string())),
            },
        }
    }
}

/// Totally ordered priority derived from a value; larger means ⊑-larger.
#[derive(Debug, Clone, Copy)]
pub struct OrderKey(f64);

impl PartialEq for OrderKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OrderKey {}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    #[test]
    fn tropical_plus_is_min_and_times_is_sum() {
        let t = Semiring::tropical();
        assert_eq!(t.plus(&Value::trop(3.0), &Value::trop(5.0)).unwrap(), Value::trop(3.0));
        assert_eq!(t.times(&Value::trop(3.0), &Value::trop(5.0)).unwrap(), Value::trop(8.0));
    }

    #[test]
    fn zero_is_plus_identity_everywhere() {
        for s in all_instances() {
            for a in sample_values(&s) {
                assert_eq!(s.plus(&s.zero(), &a).unwrap(), a, "{}", s.name());
                assert_eq!(s.times(&a, &s.zero()).unwrap(), s.zero(), "{}", s.name());
            }
        }
    }

    #[test]
    fn set_plus_is_union() {
        let s = Semiring::set(["1", "2", "3"]).unwrap();
        let a = s.parse_value("{1}").unwrap();
        let b = s.parse_value("{2}").unwrap();
        assert_eq!(s.plus(&a, &b).unwrap(), s.parse_value("{1,2}").unwrap());
        assert_eq!(s.format_value(&s.plus(&a, &b).unwrap()), "{1,2}");
    }

    #[test]
    fn access_times_is_max_clearance() {
        let s = Semiring::access();
        let c = Value::Access(Level::Confidential);
        let sec = Value::Access(Level::Secret);
        assert_eq!(s.times(&c, &sec).unwrap(), sec);
        assert_eq!(s.plus(&c, &sec).unwrap(), c);
    }

    #[test]
    fn natural_order_examples() {
        let t = Semiring::tropical();
        assert!(t.leq(&Value::Trop(Tropical::INFINITY), &Value::trop(5.0)).unwrap());
        assert!(!t.leq(&Value::trop(3.0), &Value::trop(5.0)).unwrap());
        assert!(Semiring::naturals().leq(&Value::Nat(2), &Value::Nat(7)).unwrap());
        let acc = Semiring::access();
        assert!(acc.leq(&acc.zero(), &acc.one()).unwrap());
        assert!(!acc.leq(&acc.one(), &acc.zero()).unwrap());
    }

    #[test]
    fn mixed_operands_are_rejected() {
        let t = Semiring::tropical();
        let err = t.plus(&Value::trop(1.0), &Value::Bool(true)).unwrap_err();
        assert_eq!(
            err,
            SemiringError::Mismatch {
                expected: "tropical",
                found: "boolean"
            }
        );
        assert!(t.times(&Value::Nat(1), &Value::trop(1.0)).is_err());
        assert!(t.leq(&Value::trop(1.0), &Value::Nat(1)).is_err());
    }

    #[test]
    fn tokens_round_trip() {
        for tok in ["boolean", "tropical", "naturals", "access", "set:a,b,c"] {
            let s: Semiring = tok.parse().unwrap();
            assert_eq!(s.token(), tok);
        }
        assert!("real".parse::<Semiring>().is_err());
        assert!("set:".parse::<Semiring>().is_err());
        assert!("set:a,a".parse::<Semiring>().is_err());
    }

    #[test]
    fn literals() {
        let t = Semiring::tropical();
        assert_eq!(t.parse_value("inf").unwrap(), t.zero());
        assert_eq!(t.parse_value("2.5").unwrap(), Value::trop(2.5));
        assert!(t.parse_value("-1").is_err());
        assert!(t.parse_value("abc").is_err());
        assert!(Semiring::naturals().parse_value("1.5").is_err());
        assert!(Semiring::access().parse_value("X").is_err());
        let s = Semiring::set(["a", "b"]).unwrap();
        assert!(s.parse_value("{c}").is_err());
        assert_eq!(s.parse_value("{}").unwrap(), s.zero());
        assert_eq!(s.parse_value("{a,b}").unwrap(), s.one());
    }

    #[test]
    fn order_key_agrees_with_leq_on_total_orders() {
        for s in all_instances() {
            if !s.capabilities().is_total_order {
                continue;
            }
            let vals = sample_values(&s);
            for a in &vals {
                for b in &vals {
                    let ka = s.order_key(a).unwrap();
                    let kb = s.order_key(b).unwrap();
                    assert_eq!(s.leq(a, b).unwrap(), ka <= kb, "{} {a} {b}", s.name());
                }
            }
        }
    }

    pub(crate) fn all_instances() -> Vec<Semiring> {
        alloc::vec![
            Semiring::boolean(),
            Semiring::tropical(),
            Semiring::naturals(),
            Semiring::set(["a", "b"]).unwrap(),
            Semiring::access(),
        ]
    }

    pub(crate) fn sample_values(s: &Semiring) -> Vec<Value> {
        crate::axioms::exhaustive_samples(s, 6)
    }
}
