use std::collections::HashMap;
use std::fmt;

use crate::syntax::ast::TypeExpr;

/// Elaborated types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    /// The carrier of the species being checked.
    SelfTy,
    Bool,
    Int,
    /// Result type of logical definitions. Only usable in formulas.
    Prop,
    /// Carrier of a species parameter or of a collection.
    Carrier(String),
    List(Box<Ty>),
    Fun(Vec<Ty>, Box<Ty>),
    /// Inference variable. Never survives typechecking.
    Var(u32),
}

impl Ty {
    pub fn list(inner: Ty) -> Ty {
        Ty::List(Box::new(inner))
    }

    pub fn fun(args: Vec<Ty>, ret: Ty) -> Ty {
        if args.is_empty() {
            ret
        } else {
            Ty::Fun(args, Box::new(ret))
        }
    }

    /// Splits a method type into argument types and result.
    pub fn signature(&self) -> (&[Ty], &Ty) {
        match self {
            Ty::Fun(args, ret) => (args, ret),
            other => (&[], other),
        }
    }

    pub fn arity(&self) -> usize {
        self.signature().0.len()
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Ty::Var(_) => true,
            Ty::List(t) => t.has_vars(),
            Ty::Fun(args, ret) => args.iter().any(Ty::has_vars) || ret.has_vars(),
            _ => false,
        }
    }

    pub fn mentions_self(&self) -> bool {
        match self {
            Ty::SelfTy => true,
            Ty::List(t) => t.mentions_self(),
            Ty::Fun(args, ret) => args.iter().any(Ty::mentions_self) || ret.mentions_self(),
            _ => false,
        }
    }

    /// Rename carrier names (parameter substitution).
    pub fn rename_carriers(&self, map: &HashMap<String, String>) -> Ty {
        self.map(&mut |t| match t {
            Ty::Carrier(n) => map.get(n).map(|m| Ty::Carrier(m.clone())),
            _ => None,
        })
    }

    /// Replace `Self` by another type.
    pub fn replace_self(&self, with: &Ty) -> Ty {
        self.map(&mut |t| match t {
            Ty::SelfTy => Some(with.clone()),
            _ => None,
        })
    }

    /// Bottom-up rewrite; `f` returning `Some` replaces the node.
    pub fn map(&self, f: &mut dyn FnMut(&Ty) -> Option<Ty>) -> Ty {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Ty::List(t) => Ty::List(Box::new(t.map(f))),
            Ty::Fun(args, ret) => Ty::Fun(args.iter().map(|a| a.map(f)).collect(), Box::new(ret.map(f))),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::SelfTy => write!(f, "Self"),
            Ty::Bool => write!(f, "bool"),
            Ty::Int => write!(f, "int"),
            Ty::Prop => write!(f, "prop"),
            Ty::Carrier(n) => write!(f, "{n}"),
            Ty::List(t) => write!(f, "list({t})"),
            Ty::Var(v) => write!(f, "'_{v}"),
            Ty::Fun(args, ret) => {
                for a in args {
                    match a {
                        Ty::Fun(..) => write!(f, "({a}) -> ")?,
                        _ => write!(f, "{a} -> ")?,
                    }
                }
                match **ret {
                    Ty::Fun(..) => write!(f, "({ret})"),
                    _ => write!(f, "{ret}"),
                }
            }
        }
    }
}

/// Convert a written type. `carrier_ok` decides which names denote carriers;
/// the offending name is returned on failure.
pub fn elaborate_type(t: &TypeExpr, carrier_ok: &dyn Fn(&str) -> bool) -> Result<Ty, (String, crate::syntax::Span)> {
    Ok(match t {
        TypeExpr::SelfType(_) => Ty::SelfTy,
        TypeExpr::Bool(_) => Ty::Bool,
        TypeExpr::Int(_) => Ty::Int,
        TypeExpr::Param(id) => {
            if !carrier_ok(&id.name) {
                return Err((id.name.clone(), id.span));
            }
            Ty::Carrier(id.name.clone())
        }
        TypeExpr::List(inner, _) => Ty::list(elaborate_type(inner, carrier_ok)?),
        TypeExpr::Arrow(args, ret) => {
            let args = args.iter().map(|a| elaborate_type(a, carrier_ok)).collect::<Result<Vec<_>, _>>()?;
            Ty::Fun(args, Box::new(elaborate_type(ret, carrier_ok)?))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_arrow() {
        let t = Ty::fun(vec![Ty::SelfTy, Ty::Carrier("A".into()), Ty::Carrier("B".into())], Ty::Bool);
        assert_eq!(t.to_string(), "Self -> A -> B -> bool");
        assert_eq!(Ty::list(Ty::Carrier("S".into())).to_string(), "list(S)");
    }

    #[test]
    fn rename_is_simultaneous() {
        let t = Ty::fun(vec![Ty::Carrier("A".into())], Ty::Carrier("B".into()));
        let map: HashMap<String, String> = [("A".into(), "B".into()), ("B".into(), "A".into())].into();
        assert_eq!(t.rename_carriers(&map).to_string(), "B -> A");
    }
}
