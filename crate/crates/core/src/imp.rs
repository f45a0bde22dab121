//! A small imperative language with `skip`, assignment, blocks, `if`,
//! `while`, and a nondeterministic power-of-two divisor choice.
//!
//! Programs are statement sequences; the empty sequence is the irreducible
//! program. Each step rewrites the head statement:
//!
//! ```text
//! ⟨skip; r, ρ⟩                → ⟨r, ρ⟩
//! ⟨x := t; r, ρ⟩              → ⟨r, ρ + (x = ⟦t⟧ρ)⟩
//! ⟨{p; q}; r, ρ⟩              → ⟨p; q; r, ρ⟩
//! ⟨if t then p else q; r, ρ⟩  → ⟨p; r, ρ⟩  or  ⟨q; r, ρ⟩
//! ⟨while t do p; r, ρ⟩        → ⟨if t then p; while t do p else skip; r, ρ⟩
//! ⟨x :∈ pow2div(t); r, ρ⟩     → ⟨r, ρ + (x = 2^i)⟩  for every 2^i ≥ 2 dividing ⟦t⟧ρ
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::kernel::{StepError, Value};
use crate::syntax::{Cursor, ParseError, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Lt | BinOp::Le => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Bool(bool),
    Var(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Even(Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn int(n: i64) -> Self {
        Expr::Int(BigInt::from(n))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(x) => f.write_str(x),
            Expr::Even(e) => write!(f, "even({e})"),
            Expr::Not(e) => write!(f, "not({e})"),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                let paren = p < min;
                if paren {
                    f.write_str("(")?;
                }
                // comparisons do not chain, so both sides bind tighter
                let left_min = if p == 3 { p + 1 } else { p };
                l.fmt_prec(f, left_min)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_prec(f, p + 1)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(String, Expr),
    Block(Vec<Stmt>),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    ChoosePow2Div(String, Expr),
}

fn fmt_seq(f: &mut fmt::Formatter<'_>, seq: &[Stmt]) -> fmt::Result {
    for (i, s) in seq.iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// A nested body that must read back as one statement.
fn fmt_body(f: &mut fmt::Formatter<'_>, seq: &[Stmt]) -> fmt::Result {
    if seq.len() == 1 && !matches!(seq[0], Stmt::Block(_)) {
        write!(f, "{}", seq[0])
    } else {
        f.write_str("{")?;
        fmt_seq(f, seq)?;
        f.write_str("}")
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Skip => f.write_str("skip"),
            Stmt::Assign(x, e) => write!(f, "{x} := {e}"),
            Stmt::Block(ss) => {
                f.write_str("{")?;
                fmt_seq(f, ss)?;
                f.write_str("}")
            }
            Stmt::If(c, t, e) => {
                write!(f, "if {c} then ")?;
                // `else` closes the then-branch, so it needs no braces
                if t.is_empty() || (t.len() == 1 && matches!(t[0], Stmt::Block(_))) {
                    fmt_body(f, t)?;
                } else {
                    fmt_seq(f, t)?;
                }
                f.write_str(" else ")?;
                fmt_body(f, e)
            }
            Stmt::While(c, body) => {
                write!(f, "while {c} do ")?;
                fmt_body(f, body)
            }
            Stmt::ChoosePow2Div(x, e) => write!(f, "{x} :∈ pow2div({e})"),
        }
    }
}

/// Variable bindings in allocation order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Store {
    bindings: Vec<(String, Value)>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Updates `name` in place, or allocates it after every existing binding.
    pub fn set(&mut self, name: &str, value: Value) {
        match self.bindings.iter_mut().find(|(n, _)| n == name) {
            Some((_, v)) => *v = value,
            None => self.bindings.push((name.to_string(), value)),
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.set(name, value.into());
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} = {v}")?;
        }
        f.write_str("⟩")
    }
}

/// Parses `x=12,y=1`; allocation order follows the listing.
pub fn parse_store(src: &str) -> Result<Store, String> {
    let mut store = Store::new();
    for part in src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| format!("expected `name=value`, found `{part}`"))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad variable name `{name}`"));
        }
        if store.get(name).is_some() {
            return Err(format!("variable `{name}` bound twice"));
        }
        store.set(name, parse_value(value.trim())?);
    }
    Ok(store)
}

pub(crate) fn parse_value(s: &str) -> Result<Value, String> {
    match s {
        "true" => Ok(Value::Bool(true)),
        "false" => Ok(Value::Bool(false)),
        _ => s.parse::<BigInt>().map(Value::Int).map_err(|_| format!("bad value `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImpConfig {
    pub program: Vec<Stmt>,
    pub store: Store,
}

impl ImpConfig {
    pub fn new(program: Vec<Stmt>, store: Store) -> Self {
        ImpConfig { program, store }
    }

    pub fn is_terminal(&self) -> bool {
        self.program.is_empty()
    }
}

impl fmt::Display for ImpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        fmt_seq(f, &self.program)?;
        write!(f, ", {}⟩", self.store)
    }
}

const KEYWORDS: &[&str] =
    &["skip", "if", "then", "else", "while", "do", "even", "not", "and", "or", "true", "false", "pow2div"];

pub fn parse_imp(src: &str) -> Result<Vec<Stmt>, ParseError> {
    let mut cur = Cursor::new(src)?;
    if cur.at_eof() {
        return Ok(Vec::new());
    }
    let prog = stmts(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("`;` or end of input"));
    }
    Ok(prog)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut cur = Cursor::new(src)?;
    let e = expr(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of input"));
    }
    Ok(e)
}

fn stmts(cur: &mut Cursor) -> Result<Vec<Stmt>, ParseError> {
    let mut out = vec![stmt(cur)?];
    while cur.eat(&Tok::Semi) {
        out.push(stmt(cur)?);
    }
    Ok(out)
}

/// A branch or loop body: braces delimit a sequence rather than build a block.
fn body(s: Stmt) -> Vec<Stmt> {
    match s {
        Stmt::Block(ss) => ss,
        s => vec![s],
    }
}

fn ident(cur: &mut Cursor) -> Result<String, ParseError> {
    match cur.peek().clone() {
        Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
            cur.bump();
            Ok(name)
        }
        _ => Err(cur.unexpected("a variable name")),
    }
}

fn stmt(cur: &mut Cursor) -> Result<Stmt, ParseError> {
    if cur.eat_keyword("skip") {
        return Ok(Stmt::Skip);
    }
    if cur.eat(&Tok::LBrace) {
        if cur.eat(&Tok::RBrace) {
            return Ok(Stmt::Block(Vec::new()));
        }
        let ss = stmts(cur)?;
        cur.expect(&Tok::RBrace)?;
        return Ok(Stmt::Block(ss));
    }
    if cur.eat_keyword("if") {
        let c = expr(cur)?;
        cur.expect_keyword("then")?;
        let mut then = vec![stmt(cur)?];
        while cur.eat(&Tok::Semi) {
            then.push(stmt(cur)?);
        }
        if then.len() == 1 {
            then = body(then.pop().expect("one statement"));
        }
        cur.expect_keyword("else")?;
        let els = body(stmt(cur)?);
        return Ok(Stmt::If(c, then, els));
    }
    if cur.eat_keyword("while") {
        let c = expr(cur)?;
        cur.expect_keyword("do")?;
        return Ok(Stmt::While(c, body(stmt(cur)?)));
    }
    let x = ident(cur)?;
    match cur.peek() {
        Tok::Assign => {
            cur.bump();
            Ok(Stmt::Assign(x, expr(cur)?))
        }
        Tok::Choose => {
            cur.bump();
            cur.expect_keyword("pow2div")?;
            cur.expect(&Tok::LParen)?;
            let e = expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(Stmt::ChoosePow2Div(x, e))
        }
        _ => Err(cur.unexpected("`:=` or `:∈`")),
    }
}

fn expr(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut l = conj(cur)?;
    while cur.eat_keyword("or") {
        l = Expr::bin(BinOp::Or, l, conj(cur)?);
    }
    Ok(l)
}

fn conj(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut l = comparison(cur)?;
    while cur.eat_keyword("and") {
        l = Expr::bin(BinOp::And, l, comparison(cur)?);
    }
    Ok(l)
}

fn comparison(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let l = sum(cur)?;
    let op = match cur.peek() {
        Tok::Eq => BinOp::Eq,
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        _ => return Ok(l),
    };
    cur.bump();
    Ok(Expr::bin(op, l, sum(cur)?))
}

fn sum(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut l = product(cur)?;
    loop {
        let op = match cur.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return Ok(l),
        };
        cur.bump();
        l = Expr::bin(op, l, product(cur)?);
    }
}

fn product(cur: &mut Cursor) -> Result<Expr, ParseError> {
    let mut l = atom(cur)?;
    loop {
        let op = match cur.peek() {
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return Ok(l),
        };
        cur.bump();
        l = Expr::bin(op, l, atom(cur)?);
    }
}

fn atom(cur: &mut Cursor) -> Result<Expr, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Expr::Int(n))
        }
        Tok::LParen => {
            cur.bump();
            let e = expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::Ident(w) if w == "true" || w == "false" => {
            cur.bump();
            Ok(Expr::Bool(w == "true"))
        }
        Tok::Ident(w) if w == "even" || w == "not" => {
            cur.bump();
            cur.expect(&Tok::LParen)?;
            let e = Box::new(expr(cur)?);
            cur.expect(&Tok::RParen)?;
            Ok(if w == "even" { Expr::Even(e) } else { Expr::Not(e) })
        }
        Tok::Ident(_) => Ok(Expr::Var(ident(cur)?)),
        _ => Err(cur.unexpected("an expression")),
    }
}

fn int_operand(v: Value, ctx: &Expr) -> Result<BigInt, StepError> {
    match v {
        Value::Int(n) => Ok(n),
        Value::Bool(b) => Err(StepError::TypeMismatch(format!("`{b}` used as an integer in `{ctx}`"))),
    }
}

fn bool_operand(v: Value, ctx: &Expr) -> Result<bool, StepError> {
    match v {
        Value::Bool(b) => Ok(b),
        Value::Int(n) => Err(StepError::TypeMismatch(format!("`{n}` used as a boolean in `{ctx}`"))),
    }
}

/// Big-step evaluation of an expression in a store.
pub fn eval_expr(e: &Expr, store: &Store) -> Result<Value, StepError> {
    Ok(match e {
        Expr::Int(n) => Value::Int(n.clone()),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Var(x) => store.get(x).cloned().ok_or_else(|| StepError::UnboundVariable(x.clone()))?,
        Expr::Even(a) => {
            let n = int_operand(eval_expr(a, store)?, e)?;
            Value::Bool((&n % 2u32).is_zero())
        }
        Expr::Not(a) => Value::Bool(!bool_operand(eval_expr(a, store)?, e)?),
        Expr::Bin(op, l, r) => {
            let lv = eval_expr(l, store)?;
            let rv = eval_expr(r, store)?;
            match op {
                BinOp::And => Value::Bool(bool_operand(lv, e)? & bool_operand(rv, e)?),
                BinOp::Or => Value::Bool(bool_operand(lv, e)? | bool_operand(rv, e)?),
                BinOp::Eq => match (lv, rv) {
                    (Value::Int(a), Value::Int(b)) => Value::Bool(a == b),
                    (Value::Bool(a), Value::Bool(b)) => Value::Bool(a == b),
                    _ => return Err(StepError::TypeMismatch(format!("`=` between an integer and a boolean in `{e}`"))),
                },
                _ => {
                    let a = int_operand(lv, e)?;
                    let b = int_operand(rv, e)?;
                    match op {
                        BinOp::Add => Value::Int(a + b),
                        BinOp::Sub => Value::Int(a - b),
                        BinOp::Mul => Value::Int(a * b),
                        BinOp::Div if b.is_zero() => return Err(StepError::DivisionByZero),
                        // BigInt division truncates toward zero
                        BinOp::Div => Value::Int(a / b),
                        BinOp::Lt => Value::Bool(a < b),
                        BinOp::Le => Value::Bool(a <= b),
                        _ => unreachable!("boolean operators handled above"),
                    }
                }
            }
        }
    })
}

/// Powers of two `p ≥ 2` dividing `n`, in increasing order.
pub fn pow2_divisors(n: &BigInt) -> Vec<BigInt> {
    let zeros = n.trailing_zeros().unwrap_or(0);
    let mut out = Vec::with_capacity(zeros as usize);
    let mut p = BigInt::one();
    for _ in 0..zeros {
        p <<= 1u32;
        out.push(p.clone());
    }
    out
}

fn spliced(head: &[Stmt], rest: &[Stmt]) -> Vec<Stmt> {
    head.iter().chain(rest).cloned().collect()
}

/// One small step. Only `:∈ pow2div` yields more than one successor.
pub fn step_imp(c: &ImpConfig) -> Result<Vec<ImpConfig>, StepError> {
    let Some((head, rest)) = c.program.split_first() else {
        return Ok(Vec::new());
    };
    let next = |program: Vec<Stmt>, store: Store| ImpConfig { program, store };
    Ok(match head {
        Stmt::Skip => vec![next(rest.to_vec(), c.store.clone())],
        Stmt::Assign(x, e) => {
            let v = eval_expr(e, &c.store)?;
            let mut store = c.store.clone();
            store.set(x, v);
            vec![next(rest.to_vec(), store)]
        }
        Stmt::Block(ss) => vec![next(spliced(ss, rest), c.store.clone())],
        Stmt::If(cond, t, e) => {
            let chosen = if bool_operand(eval_expr(cond, &c.store)?, cond)? { t } else { e };
            vec![next(spliced(chosen, rest), c.store.clone())]
        }
        Stmt::While(cond, body) => {
            let mut then = body.clone();
            then.push(head.clone());
            let unfolded = Stmt::If(cond.clone(), then, vec![Stmt::Skip]);
            vec![next(spliced(&[unfolded], rest), c.store.clone())]
        }
        Stmt::ChoosePow2Div(x, e) => {
            let n = int_operand(eval_expr(e, &c.store)?, e)?;
            if n.is_zero() {
                return Err(StepError::Stuck(format!("`{e}` is 0: every power of two divides it")));
            }
            let ds = pow2_divisors(&n.abs());
            if ds.is_empty() {
                return Err(StepError::EmptyChoice(format!("`{e}` = {n} is odd")));
            }
            ds.into_iter()
                .map(|d| {
                    let mut store = c.store.clone();
                    store.set(x, Value::Int(d));
                    next(rest.to_vec(), store)
                })
                .collect()
        }
    })
}

/// Drops the program and the variable names: the values of `keep`, in
/// order, or of every variable in allocation order when `keep` is `None`.
pub fn erase_imp(c: &ImpConfig, keep: Option<&[String]>) -> Vec<Value> {
    match keep {
        None => c.store.iter().map(|(_, v)| v.clone()).collect(),
        Some(names) => names.iter().filter_map(|n| c.store.get(n).cloned()).collect(),
    }
}
