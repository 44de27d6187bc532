//! JSON wire format for expressions.
//!
//! Nodes: `{"op":"rat","num":"p","den":"q"}`, `{"op":"sym","name":...}`,
//! `{"op":"add"|"mul","args":[...]}`, `{"op":"pow","args":[base, exponent]}`
//! (integral exponent), `{"op":"call","name":"exp","args":[arg]}`.  Integers
//! travel as strings so arbitrary precision survives every JSON parser.
//! Keys serialize in sorted order, making the rendering bit-exact across
//! platforms.

use std::str::FromStr;

use num::{BigInt, BigRational, Zero};
use serde_json::{json, Value};

use super::ParseError;
use crate::symkernel::{symbol_from_name, Expr, Fun, Node};

/// Encode an expression as a JSON AST.
pub fn to_json(e: &Expr) -> Value {
    match e.node() {
        Node::Rat(r) => json!({
            "op": "rat",
            "num": r.numer().to_string(),
            "den": r.denom().to_string(),
        }),
        Node::Sym(s) => json!({ "op": "sym", "name": s.name() }),
        Node::Sum(ts) => json!({
            "op": "add",
            "args": ts.iter().map(to_json).collect::<Vec<_>>(),
        }),
        Node::Prod(fs) => json!({
            "op": "mul",
            "args": fs.iter().map(to_json).collect::<Vec<_>>(),
        }),
        Node::Pow(b, k) => json!({
            "op": "pow",
            "args": [to_json(b), json!({"op": "rat", "num": k.to_string(), "den": "1"})],
        }),
        Node::Fun(g, a) => json!({
            "op": "call",
            "name": g.name(),
            "args": [to_json(a)],
        }),
    }
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value, ParseError> {
    v.get(key)
        .ok_or_else(|| ParseError::SchemaError(format!("missing field `{key}`")))
}

fn str_field<'v>(v: &'v Value, key: &str) -> Result<&'v str, ParseError> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| ParseError::SchemaError(format!("field `{key}` must be a string")))
}

fn args(v: &Value) -> Result<Vec<Expr>, ParseError> {
    field(v, "args")?
        .as_array()
        .ok_or_else(|| ParseError::SchemaError("field `args` must be an array".into()))?
        .iter()
        .map(from_json)
        .collect()
}

/// Decode an expression from its JSON AST.
pub fn from_json(v: &Value) -> Result<Expr, ParseError> {
    let op = str_field(v, "op")?;
    match op {
        "rat" => {
            let num = BigInt::from_str(str_field(v, "num")?)
                .map_err(|_| ParseError::SchemaError("`num` is not an integer".into()))?;
            let den = BigInt::from_str(str_field(v, "den")?)
                .map_err(|_| ParseError::SchemaError("`den` is not an integer".into()))?;
            if den.is_zero() {
                return Err(ParseError::SchemaError("zero denominator".into()));
            }
            Ok(Expr::rat(BigRational::new(num, den)))
        }
        "sym" => {
            let name = str_field(v, "name")?;
            let sym = symbol_from_name(name)
                .ok_or_else(|| ParseError::SchemaError(format!("unknown symbol `{name}`")))?;
            Ok(Expr::sym(sym))
        }
        "add" => Ok(Expr::sum(args(v)?)),
        "mul" => Ok(Expr::prod(args(v)?)),
        "pow" => {
            let a = args(v)?;
            if a.len() != 2 {
                return Err(ParseError::SchemaError("`pow` takes exactly two args".into()));
            }
            let k = a[1].as_int().ok_or_else(|| {
                ParseError::SchemaError("`pow` exponent must be an integer".into())
            })?;
            Ok(Expr::pow(a[0].clone(), k))
        }
        "call" => {
            let name = str_field(v, "name")?;
            let f = match name {
                "exp" => Fun::Exp,
                "log" => Fun::Log,
                "sin" => Fun::Sin,
                "cos" => Fun::Cos,
                other => {
                    return Err(ParseError::SchemaError(format!("unknown function `{other}`")))
                }
            };
            let a = args(v)?;
            if a.len() != 1 {
                return Err(ParseError::SchemaError("`call` takes exactly one arg".into()));
            }
            Ok(Expr::fun(f, a[0].clone()))
        }
        other => Err(ParseError::SchemaError(format!("unknown op `{other}`"))),
    }
}
