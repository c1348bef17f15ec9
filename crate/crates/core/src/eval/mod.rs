//! Call-by-value interpreter for the functional part of collections.

mod value;

use std::collections::HashMap;

use crate::species::typed::{TExpr, TExprKind, TFunction};
use crate::species::{Collection, Env, Ty};
use crate::syntax::ast::{PatVar, Pattern};

pub use value::{List, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    /// Maximum number of method calls.
    pub fuel: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { fuel: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no match arm applies to {0}")]
    MatchFailure(String),
    #[error("evaluation ran out of fuel")]
    FuelExhausted,
    #[error("type error: {0}")]
    TypeError(String),
    #[error("`{0}` is not an executable definition")]
    NotExecutable(String),
    #[error("unknown collection `{0}`")]
    UnknownCollection(String),
}

pub struct Evaluator<'e> {
    env: &'e Env,
    fuel: u64,
    /// Calls made so far, by qualified method name.
    pub calls: HashMap<String, u64>,
}

type Locals = Vec<(String, Value)>;

impl<'e> Evaluator<'e> {
    pub fn new(env: &'e Env, budget: EvalBudget) -> Evaluator<'e> {
        Evaluator { env, fuel: budget.fuel, calls: HashMap::new() }
    }

    fn collection(&self, name: &str) -> Result<&'e Collection, EvalError> {
        self.env.collections.get(name).ok_or_else(|| EvalError::UnknownCollection(name.to_string()))
    }

    /// Evaluate an expression typed in the context of `collection`.
    pub fn expr(&mut self, collection: &str, e: &TExpr) -> Result<Value, EvalError> {
        let coll = self.collection(collection)?;
        self.eval(coll, e, &mut Vec::new())
    }

    /// Call a method from outside. Arguments and results of carrier type
    /// cross the boundary as opaque values.
    pub fn call(&mut self, collection: &str, method: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        let coll = self.collection(collection)?;
        let declared = coll.species.flat.get(method).and_then(|e| e.ty.clone());
        let (params, ret) = match declared {
            Some(Ty::Fun(ps, r)) => (ps, *r),
            Some(t) => (vec![], t),
            None => return Err(EvalError::NotExecutable(method.to_string())),
        };
        if params.len() != args.len() {
            return Err(EvalError::TypeError(format!("{method} expects {} arguments, got {}", params.len(), args.len())));
        }
        let mut inner = Vec::with_capacity(args.len());
        for (a, t) in args.into_iter().zip(&params) {
            inner.push(unwrap(a, t, collection)?);
        }
        let v = self.invoke(coll, method, inner)?;
        Ok(wrap(v, &ret, collection))
    }

    fn spend(&mut self, coll: &str, method: &str) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        *self.calls.entry(format!("{coll}!{method}")).or_default() += 1;
        Ok(())
    }

    fn function(&self, coll: &'e Collection, method: &str) -> Result<&'e TFunction, EvalError> {
        coll.species.typed.functions.get(method).ok_or_else(|| EvalError::NotExecutable(format!("{}!{method}", coll.name)))
    }

    fn invoke(&mut self, coll: &'e Collection, method: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        self.spend(&coll.name, method)?;
        let f = self.function(coll, method)?;
        if f.params.len() != args.len() {
            return Err(EvalError::TypeError(format!("{method} expects {} arguments", f.params.len())));
        }
        let mut locals: Locals = f.params.iter().map(|(n, _)| n.clone()).zip(args).collect();
        stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || self.eval(coll, &f.body, &mut locals))
    }

    fn target(&self, coll: &'e Collection, q: &str) -> Result<&'e Collection, EvalError> {
        if q == coll.name {
            return Ok(coll);
        }
        self.collection(q)
    }

    fn eval(&mut self, coll: &'e Collection, e: &TExpr, locals: &mut Locals) -> Result<Value, EvalError> {
        use TExprKind::*;
        Ok(match &e.kind {
            Local(x) => lookup(locals, x)?.clone(),
            Bool(b) => Value::Bool(*b),
            Int(i) => Value::Int(i.clone()),
            Nil => Value::List(List::nil()),
            Cons(h, t) => {
                let h = self.eval(coll, h, locals)?;
                match self.eval(coll, t, locals)? {
                    Value::List(l) => Value::List(List::cons(h, l)),
                    v => return Err(EvalError::TypeError(format!("`::` onto {v}"))),
                }
            }
            CallMethod(m, args) => {
                let vs = self.args(coll, args, locals)?;
                self.invoke(coll, m, vs)?
            }
            MethodRef(m) => Value::Closure { collection: coll.name.clone(), method: m.clone() },
            CallQualified(q, m, args) => {
                let vs = self.args(coll, args, locals)?;
                let target = self.target(coll, q)?;
                self.invoke(target, m, vs)?
            }
            QualifiedRef(q, m) => Value::Closure { collection: q.clone(), method: m.clone() },
            CallLocal(x, args) => {
                let f = lookup(locals, x)?.clone();
                let vs = self.args(coll, args, locals)?;
                match f {
                    Value::Closure { collection, method } => {
                        let target = self.target(coll, &collection)?;
                        self.invoke(target, &method, vs)?
                    }
                    v => return Err(EvalError::TypeError(format!("{v} is not a function"))),
                }
            }
            If(c, a, b) => {
                if self.truth(coll, c, locals)? {
                    self.eval(coll, a, locals)?
                } else {
                    self.eval(coll, b, locals)?
                }
            }
            Match(s, arms) => {
                let v = self.eval(coll, s, locals)?;
                for arm in arms {
                    if let Some(binds) = bind(&arm.pattern, &v)? {
                        let n = locals.len();
                        locals.extend(binds);
                        let r = self.eval(coll, &arm.body, locals);
                        locals.truncate(n);
                        return r;
                    }
                }
                return Err(EvalError::MatchFailure(v.to_string()));
            }
            Let(x, a, b) => {
                let v = self.eval(coll, a, locals)?;
                locals.push((x.clone(), v));
                let r = self.eval(coll, b, locals);
                locals.pop();
                r?
            }
            And(a, b) => Value::Bool(self.truth(coll, a, locals)? && self.truth(coll, b, locals)?),
            Or(a, b) => Value::Bool(self.truth(coll, a, locals)? || self.truth(coll, b, locals)?),
            Not(a) => Value::Bool(!self.truth(coll, a, locals)?),
            Add(a, b) | Sub(a, b) => {
                let (x, y) = (self.eval(coll, a, locals)?, self.eval(coll, b, locals)?);
                match (x, y) {
                    (Value::Int(x), Value::Int(y)) => Value::Int(if matches!(e.kind, Add(..)) { x + y } else { x - y }),
                    (x, y) => return Err(EvalError::TypeError(format!("arithmetic on {x} and {y}"))),
                }
            }
            Equal(a, b) => {
                let (x, y) = (self.eval(coll, a, locals)?, self.eval(coll, b, locals)?);
                Value::Bool(x == y)
            }
        })
    }

    fn args(&mut self, coll: &'e Collection, args: &[TExpr], locals: &mut Locals) -> Result<Vec<Value>, EvalError> {
        args.iter().map(|a| self.eval(coll, a, locals)).collect()
    }

    fn truth(&mut self, coll: &'e Collection, e: &TExpr, locals: &mut Locals) -> Result<bool, EvalError> {
        match self.eval(coll, e, locals)? {
            Value::Bool(b) => Ok(b),
            v => Err(EvalError::TypeError(format!("{v} is not a boolean"))),
        }
    }
}

fn lookup<'a>(locals: &'a Locals, x: &str) -> Result<&'a Value, EvalError> {
    locals
        .iter()
        .rev()
        .find(|(n, _)| n == x)
        .map(|(_, v)| v)
        .ok_or_else(|| EvalError::TypeError(format!("unbound local `{x}`")))
}

fn pat_bind(p: &PatVar, v: &Value, out: &mut Locals) {
    if let PatVar::Var(x) = p {
        out.push((x.clone(), v.clone()));
    }
}

fn bind(p: &Pattern, v: &Value) -> Result<Option<Locals>, EvalError> {
    let list = |v: &Value| match v {
        Value::List(l) => Ok(l.clone()),
        other => Err(EvalError::TypeError(format!("cannot match {other} against a list pattern"))),
    };
    Ok(match p {
        Pattern::Wildcard => Some(vec![]),
        Pattern::Var(x) => Some(vec![(x.clone(), v.clone())]),
        Pattern::Nil => list(v)?.is_empty().then(Vec::new),
        Pattern::Cons(h, t) => {
            let l = list(v)?;
            match l.uncons() {
                Some((hv, tv)) => {
                    let mut out = Vec::new();
                    pat_bind(h, hv, &mut out);
                    pat_bind(t, &Value::List(tv.clone()), &mut out);
                    Some(out)
                }
                None => None,
            }
        }
    })
}

/// Is `t` the carrier of `collection` as seen from its own methods?
fn is_own_carrier(t: &Ty, collection: &str) -> bool {
    matches!(t, Ty::SelfTy) || matches!(t, Ty::Carrier(c) if c == collection)
}

fn unwrap(v: Value, t: &Ty, collection: &str) -> Result<Value, EvalError> {
    match t {
        Ty::SelfTy | Ty::Carrier(_) => {
            let want = if is_own_carrier(t, collection) { collection.to_string() } else { t.to_string() };
            match v {
                Value::Opaque { carrier, inner } if carrier == want => Ok(*inner),
                Value::Opaque { carrier, .. } => Err(EvalError::TypeError(format!("value of {carrier} where {want} was expected"))),
                other => Err(EvalError::TypeError(format!("plain value {other} where an abstract {want} was expected"))),
            }
        }
        Ty::List(e) => match v {
            Value::List(l) => {
                let items: Result<Vec<Value>, EvalError> = l.iter().map(|x| unwrap(x.clone(), e, collection)).collect();
                Ok(Value::list(items?))
            }
            other => Err(EvalError::TypeError(format!("{other} is not a list"))),
        },
        _ => match v {
            Value::Opaque { carrier, .. } => Err(EvalError::TypeError(format!("abstract {carrier} where {t} was expected"))),
            v => Ok(v),
        },
    }
}

fn wrap(v: Value, t: &Ty, collection: &str) -> Value {
    match t {
        Ty::SelfTy => Value::opaque(collection, v),
        Ty::Carrier(c) => Value::opaque(c, v),
        Ty::List(e) => match v {
            Value::List(l) => Value::list(l.iter().map(|x| wrap(x.clone(), e, collection))),
            other => other,
        },
        _ => v,
    }
}

/// Evaluate with a fresh evaluator.
pub fn eval(env: &Env, collection: &str, method: &str, args: Vec<Value>, budget: EvalBudget) -> Result<Value, EvalError> {
    Evaluator::new(env, budget).call(collection, method, args)
}

pub fn eval_expr(env: &Env, collection: &str, e: &TExpr, budget: EvalBudget) -> Result<Value, EvalError> {
    Evaluator::new(env, budget).expr(collection, e)
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::MatchFailure(_) => "E-MATCH-FAILURE",
            EvalError::FuelExhausted => "E-FUEL",
            EvalError::TypeError(_) => "E-EVAL-TYPE",
            EvalError::NotExecutable(_) => "E-NOT-EXECUTABLE",
            EvalError::UnknownCollection(_) => "E-UNKNOWN-COLLECTION",
        }
    }
}
