//! Example programs shipped with the crate.

use groundfix_core::classify::Classification;

/// A program in the corpus with the flags declared in its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusProgram {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(CorpusProgram { name: $name, source: include_str!(concat!("../corpus/", $name, ".dl")) }),*]
    };
}

/// All corpus programs. The last one counts paths and is meant for the
/// naturals semiring on acyclic inputs.
pub const CORPUS: &[CorpusProgram] = corpus![
    "ternary_monadic",
    "tc",
    "node_weighted_tc",
    "five_atom_monadic",
    "apsp",
    "sssp",
    "same_generation",
    "andersen",
    "chain5",
    "anbncn",
];

pub fn get(name: &str) -> Option<&'static CorpusProgram> {
    CORPUS.iter().find(|p| p.name == name)
}

impl CorpusProgram {
    /// Flags from the `% flags:` header line.
    pub fn declared_flags(&self) -> Option<Classification> {
        let line = self.source.lines().find_map(|l| l.trim().strip_prefix("% flags:"))?;
        let mut c = Classification::default();
        for kv in line.split_whitespace() {
            let (k, v) = kv.split_once('=')?;
            let v: bool = v.parse().ok()?;
            match k {
                "monadic" => c.monadic = v,
                "linear" => c.linear = v,
                "chain" => c.chain = v,
                "acyclic" => c.rulewise_acyclic = v,
                "free-connex" => c.rulewise_free_connex = v,
                _ => return None,
            }
        }
        Some(c)
    }
}
