//! Finite color sets and the values tokens carry.

mod build;
mod net;
mod transformer;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::net::NodeId;

pub use build::{ColoredBuildError, ColoredNetBuilder};
pub use net::{
    enabled_bindings, fire_colored, ColorFireError, ColoredMarking, ColoredNetError,
    ColoredWorkflowNet, Mode,
};
pub use transformer::{
    check_left_total, compose_transformers, identity_transformer, star_then, star_transformer,
    star_with_rounds, uncovered_input, union_transformers, Pair, Port, Transformer, Tuple,
};

/// The symbol used for the single value of unit color sets.
pub const UNIT: &str = "•";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Int(i64),
    Sym(Arc<str>),
}

impl Atom {
    pub fn sym(s: &str) -> Atom {
        Atom::Sym(Arc::from(s))
    }

    /// Integers when the text parses as one, symbols otherwise.
    pub fn parse(text: &str) -> Atom {
        match text.parse::<i64>() {
            Ok(n) => Atom::Int(n),
            Err(_) => Atom::sym(text),
        }
    }
}

impl From<i64> for Atom {
    fn from(n: i64) -> Self {
        Atom::Int(n)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::sym(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(n) => write!(f, "{n}"),
            Atom::Sym(s) => f.write_str(s),
        }
    }
}

/// A token value: a single atom or a flat tuple of atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColorValue {
    Atom(Atom),
    Tuple(Vec<Atom>),
}

impl ColorValue {
    pub fn unit() -> ColorValue {
        ColorValue::Atom(Atom::sym(UNIT))
    }

    pub fn int(n: i64) -> ColorValue {
        ColorValue::Atom(Atom::Int(n))
    }

    pub fn sym(s: &str) -> ColorValue {
        ColorValue::Atom(Atom::sym(s))
    }

    pub fn tuple<A: Into<Atom>>(atoms: impl IntoIterator<Item = A>) -> ColorValue {
        ColorValue::Tuple(atoms.into_iter().map(Into::into).collect())
    }

    /// `None` for atoms, the arity for tuples.
    pub fn arity(&self) -> Option<usize> {
        match self {
            ColorValue::Atom(_) => None,
            ColorValue::Tuple(v) => Some(v.len()),
        }
    }

    /// The atoms of the value, one for an atom.
    pub fn atoms(&self) -> &[Atom] {
        match self {
            ColorValue::Atom(a) => std::slice::from_ref(a),
            ColorValue::Tuple(v) => v,
        }
    }
}

impl fmt::Display for ColorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorValue::Atom(a) => write!(f, "{a}"),
            ColorValue::Tuple(v) => {
                f.write_str("(")?;
                for (k, a) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("color set is empty")]
    EmptyColorSet,
    #[error("color set mixes values of different shapes ({0} and {1})")]
    MixedShapes(ColorValue, ColorValue),
    #[error("expected {expected} components, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("place {0} appears twice in a transformer signature")]
    DuplicatePlace(NodeId),
    #[error("value {value} is not in the color set of place {place}")]
    ValueOutside { place: NodeId, value: ColorValue },
    #[error("transformer signatures differ")]
    SignatureMismatch,
    #[error("second transformer consumes place {0}, which the first does not produce")]
    DomainMismatch(NodeId),
    #[error("place {0} would receive two tokens from one transition")]
    OutputOverlap(NodeId),
    #[error("star needs a transformer whose inputs equal its outputs")]
    NotEndo,
}

/// A finite, nonempty set of values of one shape. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorSet(Arc<BTreeSet<ColorValue>>);

impl ColorSet {
    pub fn new(values: impl IntoIterator<Item = ColorValue>) -> Result<ColorSet, ColorError> {
        let values: BTreeSet<ColorValue> = values.into_iter().collect();
        let mut it = values.iter();
        let first = it.next().ok_or(ColorError::EmptyColorSet)?;
        if let Some(other) = it.find(|v| v.arity() != first.arity()) {
            return Err(ColorError::MixedShapes(first.clone(), other.clone()));
        }
        Ok(ColorSet(Arc::new(values)))
    }

    /// `{•}`, the color set of places that carry no data.
    pub fn unit() -> ColorSet {
        ColorSet(Arc::new([ColorValue::unit()].into()))
    }

    /// Integer atoms `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> ColorSet {
        ColorSet::new((lo..=hi).map(ColorValue::int)).expect("nonempty range")
    }

    /// Tuples drawn from the cartesian product of the given atom lists.
    pub fn product(factors: &[Vec<Atom>]) -> Result<ColorSet, ColorError> {
        let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
        for factor in factors {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    factor.iter().map(move |a| {
                        let mut v = prefix.clone();
                        v.push(a.clone());
                        v
                    })
                })
                .collect();
        }
        ColorSet::new(acc.into_iter().map(ColorValue::Tuple))
    }

    pub fn contains(&self, v: &ColorValue) -> bool {
        self.0.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ColorValue> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        *self == ColorSet::unit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_checked() {
        assert_eq!(ColorSet::new([]), Err(ColorError::EmptyColorSet));
        let mixed = ColorSet::new([ColorValue::int(1), ColorValue::tuple([1i64, 2])]);
        assert!(matches!(mixed, Err(ColorError::MixedShapes(..))));
        let arity = ColorSet::new([ColorValue::tuple([1i64]), ColorValue::tuple([1i64, 2])]);
        assert!(arity.is_err());
    }

    #[test]
    fn product_and_display() {
        let s = ColorSet::product(&[vec!["A".into(), "B".into()], vec![1.into(), 2.into()]])
            .unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.contains(&ColorValue::tuple([Atom::sym("B"), Atom::Int(2)])));
        assert_eq!(ColorValue::tuple([Atom::sym("A"), Atom::Int(3)]).to_string(), "(A,3)");
        assert_eq!(ColorValue::unit().to_string(), "•");
        assert!(ColorSet::unit().is_unit());
    }

    #[test]
    fn atoms_parse_as_int_or_symbol() {
        assert_eq!(Atom::parse("-4"), Atom::Int(-4));
        assert_eq!(Atom::parse("ERR"), Atom::sym("ERR"));
    }
}
