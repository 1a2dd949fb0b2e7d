//! Name resolution and evaluation. Constants are folded into literals;
//! variables become slots into the state vector.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::ast::{BinOp, ConstDecl, ConstValue, Expr, ExprKind, TableLit, UnOp};
use super::lexer::Pos;
use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Value {
    fn type_name(self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Real(_) => "double",
            Value::Bool(_) => "bool",
        }
    }

    fn num(self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Row-major integer table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub shape: Vec<usize>,
    pub data: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Const {
    Scalar(Value),
    Table(Arc<Table>),
}

#[derive(Clone, Debug)]
pub enum RKind {
    Lit(Value),
    Var(usize),
    Index(Arc<Table>, Vec<RExpr>),
    Unary(UnOp, Box<RExpr>),
    Binary(BinOp, Box<RExpr>, Box<RExpr>),
}

#[derive(Clone, Debug)]
pub struct RExpr {
    pub kind: RKind,
    pub pos: Pos,
}

pub struct Scope<'a> {
    pub consts: &'a BTreeMap<String, Const>,
    pub vars: &'a BTreeMap<String, usize>,
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Eval {
        pos,
        msg: msg.into(),
    })
}

pub fn resolve(e: &Expr, scope: &Scope<'_>) -> Result<RExpr, ModelError> {
    let kind = match &e.kind {
        ExprKind::Int(i) => RKind::Lit(Value::Int(*i)),
        ExprKind::Real(r) => RKind::Lit(Value::Real(*r)),
        ExprKind::Bool(b) => RKind::Lit(Value::Bool(*b)),
        ExprKind::Name(n) => match (scope.vars.get(n), scope.consts.get(n)) {
            (Some(&slot), _) => RKind::Var(slot),
            (None, Some(Const::Scalar(v))) => RKind::Lit(*v),
            (None, Some(Const::Table(_))) => return err(e.pos, format!("table `{n}` used without an index")),
            (None, None) => return err(e.pos, format!("unknown name `{n}`")),
        },
        ExprKind::Index(n, idx) => match scope.consts.get(n) {
            Some(Const::Table(t)) => {
                if idx.len() != t.shape.len() {
                    return err(
                        e.pos,
                        format!("`{n}` has {} dimensions but {} indices are given", t.shape.len(), idx.len()),
                    );
                }
                let idx = idx.iter().map(|i| resolve(i, scope)).collect::<Result<_, _>>()?;
                RKind::Index(t.clone(), idx)
            }
            Some(_) => return err(e.pos, format!("`{n}` is not a table")),
            None if scope.vars.contains_key(n) => return err(e.pos, format!("variable `{n}` cannot be indexed")),
            None => return err(e.pos, format!("unknown table `{n}`")),
        },
        ExprKind::Unary(op, a) => RKind::Unary(*op, Box::new(resolve(a, scope)?)),
        ExprKind::Binary(op, a, b) => {
            RKind::Binary(*op, Box::new(resolve(a, scope)?), Box::new(resolve(b, scope)?))
        }
    };
    Ok(RExpr { kind, pos: e.pos })
}

impl RExpr {
    pub fn eval(&self, state: &[i64]) -> Result<Value, ModelError> {
        match &self.kind {
            RKind::Lit(v) => Ok(*v),
            RKind::Var(slot) => Ok(Value::Int(state[*slot])),
            RKind::Index(t, idx) => {
                let mut flat = 0usize;
                for (d, (i, &extent)) in idx.iter().zip(&t.shape).enumerate() {
                    let k = i.eval_int(state)?;
                    if k < 0 || k as usize >= extent {
                        return err(i.pos, format!("index {k} out of range 0..{extent} in dimension {}", d + 1));
                    }
                    flat = flat * extent + k as usize;
                }
                Ok(Value::Int(t.data[flat]))
            }
            RKind::Unary(UnOp::Neg, a) => match a.eval(state)? {
                Value::Int(i) => match i.checked_neg() {
                    Some(n) => Ok(Value::Int(n)),
                    None => err(self.pos, "integer overflow"),
                },
                Value::Real(r) => Ok(Value::Real(-r)),
                v => err(self.pos, format!("cannot negate a {}", v.type_name())),
            },
            RKind::Unary(UnOp::Not, a) => Ok(Value::Bool(!a.eval_bool(state)?)),
            RKind::Binary(BinOp::And, a, b) => Ok(Value::Bool(a.eval_bool(state)? && b.eval_bool(state)?)),
            RKind::Binary(BinOp::Or, a, b) => Ok(Value::Bool(a.eval_bool(state)? || b.eval_bool(state)?)),
            RKind::Binary(op, a, b) => self.binary(*op, a.eval(state)?, b.eval(state)?),
        }
    }

    fn binary(&self, op: BinOp, x: Value, y: Value) -> Result<Value, ModelError> {
        use BinOp::*;
        if let (Value::Bool(p), Value::Bool(q), Eq | Neq) = (x, y, op) {
            return Ok(Value::Bool((p == q) == (op == Eq)));
        }
        let (Some(fx), Some(fy)) = (x.num(), y.num()) else {
            return err(
                self.pos,
                format!("`{}` applied to {} and {}", op.symbol(), x.type_name(), y.type_name()),
            );
        };
        let overflow = || err(self.pos, "integer overflow");
        Ok(match (op, x, y) {
            (Eq, ..) => Value::Bool(fx == fy),
            (Neq, ..) => Value::Bool(fx != fy),
            (Lt, ..) => Value::Bool(fx < fy),
            (Le, ..) => Value::Bool(fx <= fy),
            (Gt, ..) => Value::Bool(fx > fy),
            (Ge, ..) => Value::Bool(fx >= fy),
            (Div, ..) => {
                if fy == 0.0 {
                    return err(self.pos, "division by zero");
                }
                Value::Real(fx / fy)
            }
            (Add, Value::Int(i), Value::Int(j)) => i.checked_add(j).map(Value::Int).map_or_else(overflow, Ok)?,
            (Sub, Value::Int(i), Value::Int(j)) => i.checked_sub(j).map(Value::Int).map_or_else(overflow, Ok)?,
            (Mul, Value::Int(i), Value::Int(j)) => i.checked_mul(j).map(Value::Int).map_or_else(overflow, Ok)?,
            (Mod, Value::Int(i), Value::Int(j)) => {
                if j == 0 {
                    return err(self.pos, "modulus by zero");
                }
                Value::Int(i.rem_euclid(j))
            }
            (Add, ..) => Value::Real(fx + fy),
            (Sub, ..) => Value::Real(fx - fy),
            (Mul, ..) => Value::Real(fx * fy),
            (Mod, ..) => {
                if fy == 0.0 {
                    return err(self.pos, "modulus by zero");
                }
                Value::Real(fx.rem_euclid(fy))
            }
            (And | Or, ..) => unreachable!("handled with short-circuit evaluation"),
        })
    }

    pub fn eval_bool(&self, state: &[i64]) -> Result<bool, ModelError> {
        match self.eval(state)? {
            Value::Bool(b) => Ok(b),
            v => err(self.pos, format!("expected a bool, found {}", v.type_name())),
        }
    }

    pub fn eval_int(&self, state: &[i64]) -> Result<i64, ModelError> {
        match self.eval(state)? {
            Value::Int(i) => Ok(i),
            v => err(self.pos, format!("expected an int, found {}", v.type_name())),
        }
    }

    pub fn eval_real(&self, state: &[i64]) -> Result<f64, ModelError> {
        match self.eval(state)? {
            Value::Int(i) => Ok(i as f64),
            Value::Real(r) => Ok(r),
            v => err(self.pos, format!("expected a number, found {}", v.type_name())),
        }
    }
}

/// Evaluates constant declarations in order; later constants may use
/// earlier ones.
pub fn eval_consts(decls: &[ConstDecl]) -> Result<BTreeMap<String, Const>, ModelError> {
    let mut consts = BTreeMap::new();
    let no_vars = BTreeMap::new();
    for d in decls {
        let scope = Scope {
            consts: &consts,
            vars: &no_vars,
        };
        let value = match &d.value {
            ConstValue::Int(e) => Const::Scalar(Value::Int(resolve(e, &scope)?.eval_int(&[])?)),
            ConstValue::Double(e) => Const::Scalar(Value::Real(resolve(e, &scope)?.eval_real(&[])?)),
            ConstValue::Table(lit) => {
                let mut shape = Vec::new();
                let mut data = Vec::new();
                flatten(lit, 0, &mut shape, &mut data, &scope)?;
                if shape.len() != d.dims {
                    return err(
                        d.pos,
                        format!("`{}` is declared with {} dimensions but has {}", d.name, d.dims, shape.len()),
                    );
                }
                Const::Table(Arc::new(Table { shape, data }))
            }
        };
        consts.insert(d.name.clone(), value);
    }
    Ok(consts)
}

fn flatten(
    lit: &TableLit,
    depth: usize,
    shape: &mut Vec<usize>,
    data: &mut Vec<i64>,
    scope: &Scope<'_>,
) -> Result<(), ModelError> {
    match lit {
        TableLit::Leaf(e) => {
            if depth != shape.len() {
                return err(e.pos, "table is not rectangular");
            }
            data.push(resolve(e, scope)?.eval_int(&[])?);
        }
        TableLit::List(items, pos) => {
            if depth == shape.len() {
                if !data.is_empty() {
                    return err(*pos, "table is not rectangular");
                }
                shape.push(items.len());
            } else if shape[depth] != items.len() {
                return err(*pos, "table rows differ in length");
            }
            for it in items {
                flatten(it, depth + 1, shape, data, scope)?;
            }
        }
    }
    Ok(())
}
