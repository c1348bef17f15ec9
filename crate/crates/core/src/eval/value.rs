use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

/// Runtime values. Lists are persistent so that matching `h :: t` shares
/// the tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    List(List),
    /// A method of a collection used as a value.
    Closure { collection: String, method: String },
    /// A value of a collection's abstract carrier.
    Opaque { carrier: String, inner: Box<Value> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct List(Option<Arc<Cell>>);

#[derive(Debug, PartialEq, Eq)]
struct Cell {
    head: Value,
    tail: List,
}

impl List {
    pub fn nil() -> List {
        List(None)
    }

    pub fn cons(head: Value, tail: List) -> List {
        List(Some(Arc::new(Cell { head, tail })))
    }

    pub fn uncons(&self) -> Option<(&Value, &List)> {
        self.0.as_deref().map(|c| (&c.head, &c.tail))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Value> {
        let mut cur = self;
        std::iter::from_fn(move || {
            let (h, t) = cur.uncons()?;
            cur = t;
            Some(h)
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }
}

impl FromIterator<Value> for List {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> List {
        let items: Vec<Value> = iter.into_iter().collect();
        items.into_iter().rev().fold(List::nil(), |acc, v| List::cons(v, acc))
    }
}

// Long lists would otherwise be dropped recursively.
impl Drop for List {
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(rc) = next {
            match Arc::try_unwrap(rc) {
                Ok(mut cell) => next = cell.tail.0.take(),
                Err(_) => break,
            }
        }
    }
}

impl Value {
    pub fn int(i: i64) -> Value {
        Value::Int(BigInt::from(i))
    }

    pub fn list(items: impl IntoIterator<Item = Value>) -> Value {
        Value::List(items.into_iter().collect())
    }

    pub fn opaque(carrier: &str, inner: Value) -> Value {
        Value::Opaque { carrier: carrier.to_string(), inner: Box::new(inner) }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Strip carrier wrappers, for display and comparisons from outside.
    pub fn reveal(&self) -> &Value {
        match self {
            Value::Opaque { inner, .. } => inner.reveal(),
            v => v,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::List(l) => {
                f.write_str("[")?;
                for (i, v) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Closure { collection, method } => write!(f, "<fun {collection}!{method}>"),
            Value::Opaque { inner, .. } => write!(f, "{inner}"),
        }
    }
}
