//! First-order recursive equations evaluated by call-by-value rewriting.
//!
//! A configuration pairs the program (its equations) with a closed term.
//! Defined functions and the primitives `even`, `/`, `+`, `*` are strict in
//! every argument; `if` is strict only in its condition.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::kernel::{ErasedTerm, FreeVariable, StepError, Value};
use crate::syntax::{Cursor, ParseError, Pos, Tok};

pub const PRIMITIVES: &[(&str, usize)] = &[("if", 3), ("even", 1), ("/", 2), ("+", 2), ("*", 2)];

fn primitive_arity(name: &str) -> Option<usize> {
    PRIMITIVES.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunTerm {
    Int(BigInt),
    Bool(bool),
    Var(String),
    App(String, Vec<FunTerm>),
}

impl FunTerm {
    pub fn int(n: i64) -> Self {
        FunTerm::Int(BigInt::from(n))
    }

    pub fn app(name: &str, args: Vec<FunTerm>) -> Self {
        FunTerm::App(name.to_string(), args)
    }

    pub fn as_value(&self) -> Option<Value> {
        match self {
            FunTerm::Int(n) => Some(Value::Int(n.clone())),
            FunTerm::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            FunTerm::Var(_) => false,
            FunTerm::App(_, args) => args.iter().all(FunTerm::is_closed),
            _ => true,
        }
    }
}

impl From<Value> for FunTerm {
    fn from(v: Value) -> Self {
        match v {
            Value::Int(n) => FunTerm::Int(n),
            Value::Bool(b) => FunTerm::Bool(b),
        }
    }
}

impl fmt::Display for FunTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunTerm::Int(n) => write!(f, "{n}"),
            FunTerm::Bool(b) => write!(f, "{b}"),
            FunTerm::Var(x) => f.write_str(x),
            FunTerm::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// `name(params...) = rhs`, where every parameter is a variable or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    pub params: Vec<FunTerm>,
    pub rhs: FunTerm,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", FunTerm::App(self.name.clone(), self.params.clone()), self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EqnProgram {
    pub rules: Vec<Rule>,
}

impl EqnProgram {
    pub fn defines(&self, name: &str) -> bool {
        self.rules.iter().any(|r| r.name == name)
    }

    pub fn defined_names(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for r in &self.rules {
            if !seen.contains(&r.name.as_str()) {
                seen.push(r.name.as_str());
            }
        }
        seen
    }

    /// `entry(args...)` paired with this program.
    pub fn apply(self: &Arc<Self>, entry: &str, args: &[Value]) -> Result<EqnConfig, String> {
        if !self.defines(entry) {
            return Err(format!("function `{entry}` is not defined by the program"));
        }
        let term = FunTerm::App(entry.to_string(), args.iter().cloned().map(FunTerm::from).collect());
        Ok(EqnConfig { program: Arc::clone(self), term })
    }
}

impl fmt::Display for EqnProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// ⟨program, term⟩ with a closed term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqnConfig {
    pub program: Arc<EqnProgram>,
    pub term: FunTerm,
}

impl EqnConfig {
    pub fn new(program: Arc<EqnProgram>, term: FunTerm) -> Self {
        EqnConfig { program, term }
    }
}

/// Renders the term only; the program is the same throughout a run.
impl fmt::Display for EqnConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)
    }
}

struct RawRule {
    pos: Pos,
    name: String,
    params: Vec<(FunTerm, Pos)>,
    rhs: FunTerm,
    rhs_refs: Vec<Ref>,
}

/// A name used on a right-hand side, kept for validation after all rules
/// have been read.
enum Ref {
    Var(String, Pos),
    Call(String, usize, Pos),
}

pub fn parse_eqn(src: &str) -> Result<EqnProgram, ParseError> {
    let mut cur = Cursor::new(src)?;
    let mut raw = Vec::new();
    while !cur.at_eof() {
        raw.push(rule(&mut cur)?);
    }

    let mut arity: HashMap<&str, usize> = HashMap::new();
    for r in &raw {
        if primitive_arity(&r.name).is_some() {
            return Err(ParseError::syntax(r.pos, format!("cannot redefine primitive `{}`", r.name)));
        }
        let n = *arity.entry(&r.name).or_insert(r.params.len());
        if n != r.params.len() {
            return Err(ParseError::syntax(
                r.pos,
                format!("`{}` defined with {} and {} parameters", r.name, n, r.params.len()),
            ));
        }
    }

    for r in &raw {
        let mut bound = HashSet::new();
        for (p, pos) in &r.params {
            if let FunTerm::Var(x) = p {
                if !bound.insert(x.as_str()) {
                    return Err(ParseError::NonlinearPattern { line: pos.line, column: pos.column, name: x.clone() });
                }
            }
        }
        for reference in &r.rhs_refs {
            match reference {
                Ref::Var(x, pos) if !bound.contains(x.as_str()) => {
                    return Err(ParseError::UnboundVariable { line: pos.line, column: pos.column, name: x.clone() })
                }
                Ref::Call(name, n, pos) => {
                    let expected = primitive_arity(name).or_else(|| arity.get(name.as_str()).copied());
                    match expected {
                        None => {
                            return Err(ParseError::UnknownFunction {
                                line: pos.line,
                                column: pos.column,
                                name: name.clone(),
                            })
                        }
                        Some(a) if a != *n => {
                            return Err(ParseError::syntax(*pos, format!("`{name}` expects {a} argument(s), got {n}")))
                        }
                        Some(_) => {}
                    }
                }
                Ref::Var(..) => {}
            }
        }
    }

    Ok(EqnProgram {
        rules: raw
            .into_iter()
            .map(|r| Rule { name: r.name, params: r.params.into_iter().map(|(p, _)| p).collect(), rhs: r.rhs })
            .collect(),
    })
}

/// Parses a single closed term such as `f(12)`; names are not checked
/// against a program.
pub fn parse_fun_term(src: &str) -> Result<FunTerm, ParseError> {
    let mut cur = Cursor::new(src)?;
    let mut refs = Vec::new();
    let t = term(&mut cur, &mut refs)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of input"));
    }
    Ok(t)
}

fn rule(cur: &mut Cursor) -> Result<RawRule, ParseError> {
    let pos = cur.pos();
    let name = match cur.peek().clone() {
        Tok::Ident(n) if n != "true" && n != "false" => {
            cur.bump();
            n
        }
        _ => return Err(cur.unexpected("a function name")),
    };
    cur.expect(&Tok::LParen)?;
    let mut params = Vec::new();
    if !cur.eat(&Tok::RParen) {
        loop {
            let ppos = cur.pos();
            let p = match cur.peek().clone() {
                Tok::Int(n) => FunTerm::Int(n),
                Tok::Ident(w) if w == "true" || w == "false" => FunTerm::Bool(w == "true"),
                Tok::Ident(w) => FunTerm::Var(w),
                _ => return Err(cur.unexpected("a variable or literal pattern")),
            };
            cur.bump();
            if cur.peek() == &Tok::LParen {
                return Err(ParseError::syntax(ppos, "patterns must be variables or literals"));
            }
            params.push((p, ppos));
            if cur.eat(&Tok::RParen) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    cur.expect(&Tok::Eq)?;
    let mut rhs_refs = Vec::new();
    let rhs = term(cur, &mut rhs_refs)?;
    Ok(RawRule { pos, name, params, rhs, rhs_refs })
}

fn term(cur: &mut Cursor, refs: &mut Vec<Ref>) -> Result<FunTerm, ParseError> {
    let pos = cur.pos();
    let name = match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            return Ok(FunTerm::Int(n));
        }
        Tok::Ident(w) if w == "true" || w == "false" => {
            cur.bump();
            return Ok(FunTerm::Bool(w == "true"));
        }
        Tok::Ident(w) => {
            cur.bump();
            if cur.peek() != &Tok::LParen {
                refs.push(Ref::Var(w.clone(), pos));
                return Ok(FunTerm::Var(w));
            }
            w
        }
        Tok::Slash => "/".to_string(),
        Tok::Plus => "+".to_string(),
        Tok::Star => "*".to_string(),
        _ => return Err(cur.unexpected("a term")),
    };
    if matches!(name.as_str(), "/" | "+" | "*") {
        cur.bump();
    }
    cur.expect(&Tok::LParen)?;
    let mut args = Vec::new();
    if !cur.eat(&Tok::RParen) {
        loop {
            args.push(term(cur, refs)?);
            if cur.eat(&Tok::RParen) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    refs.push(Ref::Call(name.clone(), args.len(), pos));
    Ok(FunTerm::App(name, args))
}

fn substitute(t: &FunTerm, env: &HashMap<&str, &FunTerm>) -> FunTerm {
    match t {
        FunTerm::Var(x) => env.get(x.as_str()).map_or_else(|| t.clone(), |v| (*v).clone()),
        FunTerm::App(n, args) => FunTerm::App(n.clone(), args.iter().map(|a| substitute(a, env)).collect()),
        _ => t.clone(),
    }
}

fn int_arg(v: &FunTerm, call: &str) -> Result<BigInt, StepError> {
    match v {
        FunTerm::Int(n) => Ok(n.clone()),
        other => Err(StepError::TypeMismatch(format!("`{other}` is not an integer in `{call}`"))),
    }
}

fn apply_primitive(name: &str, args: &[FunTerm]) -> Result<FunTerm, StepError> {
    let call = || FunTerm::App(name.to_string(), args.to_vec()).to_string();
    Ok(match (name, args) {
        ("even", [a]) => FunTerm::Bool((int_arg(a, &call())? % 2u32).is_zero()),
        ("/", [a, b]) => {
            let (a, b) = (int_arg(a, &call())?, int_arg(b, &call())?);
            if b.is_zero() {
                return Err(StepError::DivisionByZero);
            }
            FunTerm::Int(a / b)
        }
        ("+", [a, b]) => FunTerm::Int(int_arg(a, &call())? + int_arg(b, &call())?),
        ("*", [a, b]) => FunTerm::Int(int_arg(a, &call())? * int_arg(b, &call())?),
        _ => return Err(StepError::Stuck(format!("bad primitive call `{}`", call()))),
    })
}

fn matches(params: &[FunTerm], args: &[FunTerm]) -> bool {
    params.len() == args.len()
        && params.iter().zip(args).all(|(p, a)| match p {
            FunTerm::Var(_) => true,
            lit => lit == a,
        })
}

/// Rewrites the leftmost-innermost redex in a strict position. `None`
/// means the term is a literal.
fn reduce(program: &EqnProgram, t: &FunTerm) -> Result<Option<FunTerm>, StepError> {
    let FunTerm::App(name, args) = t else {
        return match t {
            FunTerm::Var(x) => Err(StepError::UnboundVariable(x.clone())),
            _ => Ok(None),
        };
    };
    if name == "if" {
        let [c, a, b] = args.as_slice() else {
            return Err(StepError::Stuck(format!("`if` needs 3 arguments in `{t}`")));
        };
        return match c {
            FunTerm::Bool(true) => Ok(Some(a.clone())),
            FunTerm::Bool(false) => Ok(Some(b.clone())),
            FunTerm::Int(_) => Err(StepError::TypeMismatch(format!("non-boolean condition in `{t}`"))),
            _ => {
                let c2 = reduce(program, c)?.expect("non-literal terms reduce or fail");
                Ok(Some(FunTerm::App(name.clone(), vec![c2, a.clone(), b.clone()])))
            }
        };
    }
    for (i, a) in args.iter().enumerate() {
        if let Some(a2) = reduce(program, a)? {
            let mut args2 = args.clone();
            args2[i] = a2;
            return Ok(Some(FunTerm::App(name.clone(), args2)));
        }
    }
    if primitive_arity(name).is_some() {
        return apply_primitive(name, args).map(Some);
    }
    let rule = program
        .rules
        .iter()
        .find(|r| &r.name == name && matches(&r.params, args))
        .ok_or_else(|| StepError::Stuck(format!("no equation matches `{t}`")))?;
    let env: HashMap<&str, &FunTerm> = rule
        .params
        .iter()
        .zip(args)
        .filter_map(|(p, a)| match p {
            FunTerm::Var(x) => Some((x.as_str(), a)),
            _ => None,
        })
        .collect();
    Ok(Some(substitute(&rule.rhs, &env)))
}

/// One call-by-value step; at most one successor.
pub fn step_eqn(c: &EqnConfig) -> Result<Vec<EqnConfig>, StepError> {
    Ok(reduce(&c.program, &c.term)?
        .map(|term| EqnConfig { program: Arc::clone(&c.program), term })
        .into_iter()
        .collect())
}

/// Replaces every function name, defined or primitive, by `<fun>`.
pub fn erase_fun_term(t: &FunTerm) -> Result<ErasedTerm, FreeVariable> {
    Ok(match t {
        FunTerm::Int(n) => ErasedTerm::Int(n.clone()),
        FunTerm::Bool(b) => ErasedTerm::Bool(*b),
        FunTerm::Var(x) => return Err(FreeVariable(x.clone())),
        FunTerm::App(_, args) => ErasedTerm::Fun(args.iter().map(erase_fun_term).collect::<Result<_, _>>()?),
    })
}
