//! Recursive benchmark programs, each in a correct and a seeded-buggy
//! variant. All inputs are confined by a guard so recursion stays shallow.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusProgram {
    pub name: &'static str,
    pub source: &'static str,
    pub buggy: bool,
}

macro_rules! entry {
    ($name:literal, $buggy:literal) => {
        CorpusProgram {
            name: $name,
            source: include_str!(concat!("../../corpus/", $name, ".imp")),
            buggy: $buggy,
        }
    };
}

pub const CORPUS: [CorpusProgram; 10] = [
    entry!("ackermann_correct", false),
    entry!("ackermann_buggy", true),
    entry!("mccarthy91_correct", false),
    entry!("mccarthy91_buggy", true),
    entry!("fibonacci_correct", false),
    entry!("fibonacci_buggy", true),
    entry!("evenodd_correct", false),
    entry!("evenodd_buggy", true),
    entry!("addition_correct", false),
    entry!("addition_buggy", true),
];

pub fn corpus() -> &'static [CorpusProgram] {
    &CORPUS
}

pub fn by_name(name: &str) -> Option<&'static CorpusProgram> {
    CORPUS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_and_lower;
    use crate::value::BitWidth;

    #[test]
    fn corpus_lowers() {
        for p in corpus() {
            let prog = parse_and_lower(p.source, BitWidth::DEFAULT).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            prog.check_invariants().unwrap();
            assert!(prog.has_calls(), "{}", p.name);
        }
        assert_eq!(corpus().iter().filter(|p| p.buggy).count(), 5);
    }
}
