//! Structured basis labels.
//!
//! Labels are terms, not opaque integers: composite constructions
//! pattern-match on them, and the derived total order fixes canonical orbit
//! representatives and serialization order once and for all.

use crate::perm::{Deg, Perm};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// Named generator with its homological degree.
    Gen(Arc<str>, Deg),
    /// Group-ring basis element; degree 0.
    Perm(Perm),
    /// Ordered tuple of factors; degree is the sum.
    Word(Arc<[Label]>),
}

impl Label {
    pub fn gen(name: &str, deg: Deg) -> Label {
        Label::Gen(Arc::from(name), deg)
    }

    pub fn word(items: Vec<Label>) -> Label {
        Label::Word(Arc::from(items))
    }

    pub fn pair(a: Label, b: Label) -> Label {
        Label::word(vec![a, b])
    }

    pub fn degree(&self) -> Deg {
        match self {
            Label::Gen(_, d) => *d,
            Label::Perm(_) => 0,
            Label::Word(items) => items.iter().map(|l| l.degree()).sum(),
        }
    }

    pub fn as_word(&self) -> Option<&[Label]> {
        match self {
            Label::Word(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Perm> {
        match self {
            Label::Perm(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Gen(name, _) => write!(f, "{name}"),
            Label::Perm(p) => write!(f, "{p}"),
            Label::Word(items) => {
                write!(f, "(")?;
                for (i, l) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_add() {
        let w = Label::word(vec![Label::gen("a", 2), Label::gen("b", 3), Label::Perm(Perm::identity(2))]);
        assert_eq!(w.degree(), 5);
    }

    #[test]
    fn total_order_is_stable() {
        let mut v = vec![
            Label::gen("b", 0),
            Label::gen("a", 1),
            Label::Perm(Perm::identity(2)),
            Label::word(vec![Label::gen("a", 1)]),
        ];
        v.sort();
        let sorted: Vec<String> = v.iter().map(|l| format!("{l}")).collect();
        assert_eq!(sorted, ["a", "b", "e", "(a)"]);
    }
}
