use std::collections::BTreeMap;

use super::flat::{EntryKind, FlatSpecies};
use super::types::Ty;

#[derive(Clone, Debug, PartialEq)]
pub enum InterfaceItem {
    /// Function or logical definition with its type, when known.
    Method { logical: bool, ty: Option<Ty> },
    Statement,
}

/// The view of a species with bodies and proofs erased.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Interface {
    pub items: BTreeMap<String, InterfaceItem>,
    order: Vec<String>,
}

impl Interface {
    pub fn of(flat: &FlatSpecies) -> Interface {
        let mut iface = Interface::default();
        for e in &flat.entries {
            let item = match &e.kind {
                EntryKind::Function(_) => InterfaceItem::Method { logical: false, ty: e.ty.clone() },
                EntryKind::Logical(_) => InterfaceItem::Method { logical: true, ty: e.ty.clone() },
                EntryKind::Statement(_) => InterfaceItem::Statement,
            };
            iface.order.push(e.name.clone());
            iface.items.insert(e.name.clone(), item);
        }
        iface
    }

    /// Names in declaration order.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn get(&self, name: &str) -> Option<&InterfaceItem> {
        self.items.get(name)
    }

    /// Whether every item of `other` appears here with the same kind and type.
    pub fn contains(&self, other: &Interface) -> bool {
        check_implements(self, other).is_ok()
    }
}

pub fn interface_of(flat: &FlatSpecies) -> Interface {
    Interface::of(flat)
}

/// Items of `required` missing from `found`, or present with another kind
/// or type. Types are compared with `Self` standing for each side's own
/// carrier.
pub fn check_implements(found: &Interface, required: &Interface) -> Result<(), Vec<String>> {
    let mut missing = Vec::new();
    for name in required.names() {
        let req = &required.items[name];
        let ok = match (found.get(name), req) {
            (Some(InterfaceItem::Statement), InterfaceItem::Statement) => true,
            (Some(InterfaceItem::Method { logical: l1, ty: t1 }), InterfaceItem::Method { logical: l2, ty: t2 }) => {
                l1 == l2 && (t1.is_none() || t2.is_none() || t1 == t2)
            }
            _ => false,
        };
        if !ok {
            missing.push(name.clone());
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}
