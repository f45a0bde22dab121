//! Call-by-value lambda calculus with recursive abstractions.
//!
//! `fun f x -> t` binds both its parameter `x` and itself as `f`:
//!
//! ```text
//! (fun f x -> t) u  →  t[x := u, f := fun f x -> t]
//! ```
//!
//! Arithmetic primitives are curried constants that fire once fully applied
//! to literals. `(if c a b)` is a special form whose branches are only
//! reduced after selection.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::kernel::{ErasedTerm, FreeVariable, StepError};
use crate::syntax::{Cursor, ParseError, Pos, Tok};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prim {
    Even,
    Div,
    Add,
    Mul,
}

impl Prim {
    pub fn arity(self) -> usize {
        match self {
            Prim::Even => 1,
            _ => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Prim::Even => "even",
            Prim::Div => "/",
            Prim::Add => "+",
            Prim::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LamTerm {
    Int(BigInt),
    Bool(bool),
    Var(String),
    Fix { name: String, param: String, body: Box<LamTerm> },
    App(Box<LamTerm>, Box<LamTerm>),
    If(Box<LamTerm>, Box<LamTerm>, Box<LamTerm>),
    Prim(Prim),
}

impl LamTerm {
    pub fn int(n: i64) -> Self {
        LamTerm::Int(BigInt::from(n))
    }

    pub fn app(f: LamTerm, a: LamTerm) -> Self {
        LamTerm::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: LamTerm, args: impl IntoIterator<Item = LamTerm>) -> Self {
        args.into_iter().fold(head, LamTerm::app)
    }

    /// Head and arguments of a left-nested application.
    pub fn spine(&self) -> (&LamTerm, Vec<&LamTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        while let LamTerm::App(f, a) = t {
            args.push(a.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn is_value(&self) -> bool {
        match self {
            LamTerm::Int(_) | LamTerm::Bool(_) | LamTerm::Prim(_) | LamTerm::Fix { .. } => true,
            LamTerm::App(..) => {
                let (head, args) = self.spine();
                matches!(head, LamTerm::Prim(p) if args.len() < p.arity()) && args.iter().all(|a| a.is_value())
            }
            LamTerm::Var(_) | LamTerm::If(..) => false,
        }
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            LamTerm::Var(x) => x == name,
            LamTerm::Fix { name: f, param, body } => f == name || param == name || body.occurs(name),
            LamTerm::App(a, b) => a.occurs(name) || b.occurs(name),
            LamTerm::If(c, a, b) => c.occurs(name) || a.occurs(name) || b.occurs(name),
            _ => false,
        }
    }

    pub fn is_free(&self, name: &str) -> bool {
        match self {
            LamTerm::Var(x) => x == name,
            LamTerm::Fix { name: f, param, body } => f != name && param != name && body.is_free(name),
            LamTerm::App(a, b) => a.is_free(name) || b.is_free(name),
            LamTerm::If(c, a, b) => c.is_free(name) || a.is_free(name) || b.is_free(name),
            _ => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        fn go(t: &LamTerm, scope: &mut Vec<String>) -> bool {
            match t {
                LamTerm::Var(x) => scope.contains(x),
                LamTerm::Fix { name, param, body } => {
                    scope.push(name.clone());
                    scope.push(param.clone());
                    let ok = go(body, scope);
                    scope.truncate(scope.len() - 2);
                    ok
                }
                LamTerm::App(a, b) => go(a, scope) && go(b, scope),
                LamTerm::If(c, a, b) => go(c, scope) && go(a, scope) && go(b, scope),
                _ => true,
            }
        }
        go(self, &mut Vec::new())
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LamTerm::Fix { .. } => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for LamTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LamTerm::Int(n) => write!(f, "{n}"),
            LamTerm::Bool(b) => write!(f, "{b}"),
            LamTerm::Var(x) => f.write_str(x),
            LamTerm::Prim(p) => f.write_str(p.symbol()),
            LamTerm::Fix { name, param, body } => {
                if body.is_free(name) && name != param {
                    write!(f, "fun {name} {param} -> {body}")
                } else {
                    write!(f, "fun {param} -> {body}")
                }
            }
            LamTerm::If(c, a, b) => {
                f.write_str("(if ")?;
                c.fmt_atom(f)?;
                f.write_str(" ")?;
                a.fmt_atom(f)?;
                f.write_str(" ")?;
                b.fmt_atom(f)?;
                f.write_str(")")
            }
            LamTerm::App(..) => {
                let (head, args) = self.spine();
                f.write_str("(")?;
                head.fmt_atom(f)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_atom(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

const KEYWORDS: &[&str] = &["fun", "if", "even", "true", "false"];

struct Parser {
    cur: Cursor,
    scope: Vec<String>,
}

/// Parses a closed term.
pub fn parse_lam(src: &str) -> Result<LamTerm, ParseError> {
    let mut p = Parser { cur: Cursor::new(src)?, scope: Vec::new() };
    let t = p.expr()?;
    if !p.cur.at_eof() {
        return Err(p.cur.unexpected("end of input"));
    }
    Ok(t)
}

fn fresh_name(body: &LamTerm, param: &str) -> String {
    let mut candidate = "_f".to_string();
    let mut i = 0;
    while body.occurs(&candidate) || candidate == param {
        i += 1;
        candidate = format!("_f{i}");
    }
    candidate
}

impl Parser {
    fn binder(&mut self) -> Result<String, ParseError> {
        match self.cur.peek().clone() {
            Tok::Ident(x) if !KEYWORDS.contains(&x.as_str()) => {
                self.cur.bump();
                Ok(x)
            }
            _ => Err(self.cur.unexpected("a variable name")),
        }
    }

    fn expr(&mut self) -> Result<LamTerm, ParseError> {
        if !self.cur.eat_keyword("fun") {
            return self.sum();
        }
        let first = self.binder()?;
        let named = if self.cur.peek() == &Tok::Arrow { None } else { Some(self.binder()?) };
        self.cur.expect(&Tok::Arrow)?;
        let (name, param) = match named {
            Some(param) => (Some(first), param),
            None => (None, first),
        };
        let depth = self.scope.len();
        if let Some(name) = &name {
            self.scope.push(name.clone());
        }
        self.scope.push(param.clone());
        let body = self.expr();
        self.scope.truncate(depth);
        let body = body?;
        let name = name.unwrap_or_else(|| fresh_name(&body, &param));
        Ok(LamTerm::Fix { name, param, body: Box::new(body) })
    }

    fn sum(&mut self) -> Result<LamTerm, ParseError> {
        let mut l = self.product()?;
        while self.cur.eat(&Tok::Plus) {
            let r = self.product()?;
            l = LamTerm::apps(LamTerm::Prim(Prim::Add), [l, r]);
        }
        Ok(l)
    }

    fn product(&mut self) -> Result<LamTerm, ParseError> {
        let mut l = self.application()?;
        loop {
            let p = match self.cur.peek() {
                Tok::Star => Prim::Mul,
                Tok::Slash => Prim::Div,
                _ => return Ok(l),
            };
            self.cur.bump();
            let r = self.application()?;
            l = LamTerm::apps(LamTerm::Prim(p), [l, r]);
        }
    }

    fn starts_atom(&self) -> bool {
        match self.cur.peek() {
            Tok::Int(_) | Tok::LParen => true,
            Tok::Ident(w) => w != "fun" && w != "if",
            _ => false,
        }
    }

    fn application(&mut self) -> Result<LamTerm, ParseError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            t = LamTerm::app(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<LamTerm, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::Int(n) => {
                self.cur.bump();
                Ok(LamTerm::Int(n))
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.cur.bump();
                    Ok(LamTerm::Bool(w == "true"))
                }
                "even" => {
                    self.cur.bump();
                    Ok(LamTerm::Prim(Prim::Even))
                }
                "fun" | "if" => Err(self.cur.unexpected("an atom (parenthesize `fun` and `if`)")),
                _ => {
                    self.cur.bump();
                    self.variable(w, pos)
                }
            },
            Tok::LParen => {
                self.cur.bump();
                let t = self.parenthesized()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.cur.unexpected("a term")),
        }
    }

    fn variable(&self, name: String, pos: Pos) -> Result<LamTerm, ParseError> {
        if self.scope.contains(&name) {
            Ok(LamTerm::Var(name))
        } else {
            Err(ParseError::UnboundVariable { line: pos.line, column: pos.column, name })
        }
    }

    fn parenthesized(&mut self) -> Result<LamTerm, ParseError> {
        if self.cur.eat_keyword("if") {
            let c = self.atom()?;
            let a = self.atom()?;
            let b = self.atom()?;
            return Ok(LamTerm::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        let prim = match self.cur.peek() {
            Tok::Slash => Some(Prim::Div),
            Tok::Plus => Some(Prim::Add),
            Tok::Star => Some(Prim::Mul),
            _ => None,
        };
        if let Some(p) = prim {
            self.cur.bump();
            let mut t = LamTerm::Prim(p);
            while self.starts_atom() {
                t = LamTerm::app(t, self.atom()?);
            }
            return Ok(t);
        }
        self.expr()
    }
}

/// Simultaneously replaces free `x` by `u` and free `f` by `rec` in `body`.
///
/// `u` and `rec` must be closed, so no renaming is needed; inner binders of
/// the same name shadow the substitution. When `x == f` the parameter wins.
pub fn substitute(body: &LamTerm, x: &str, u: &LamTerm, f: &str, rec: &LamTerm) -> LamTerm {
    subst(body, Some((x, u)), if f == x { None } else { Some((f, rec)) })
}

type Binding<'a> = Option<(&'a str, &'a LamTerm)>;

fn subst<'a>(t: &LamTerm, a: Binding<'a>, b: Binding<'a>) -> LamTerm {
    if a.is_none() && b.is_none() {
        return t.clone();
    }
    match t {
        LamTerm::Var(y) => {
            for (name, value) in [a, b].into_iter().flatten() {
                if name == y {
                    return value.clone();
                }
            }
            t.clone()
        }
        LamTerm::Fix { name, param, body } => {
            let keep = |bnd: Binding<'a>| bnd.filter(|(n, _)| n != name && n != param);
            LamTerm::Fix { name: name.clone(), param: param.clone(), body: Box::new(subst(body, keep(a), keep(b))) }
        }
        LamTerm::App(l, r) => LamTerm::app(subst(l, a, b), subst(r, a, b)),
        LamTerm::If(c, x, y) => {
            LamTerm::If(Box::new(subst(c, a, b)), Box::new(subst(x, a, b)), Box::new(subst(y, a, b)))
        }
        LamTerm::Int(_) | LamTerm::Bool(_) | LamTerm::Prim(_) => t.clone(),
    }
}

fn int_arg(t: &LamTerm, p: Prim) -> Result<&BigInt, StepError> {
    match t {
        LamTerm::Int(n) => Ok(n),
        other => Err(StepError::TypeMismatch(format!("`{}` applied to `{other}`", p.symbol()))),
    }
}

fn apply_prim(p: Prim, args: &[&LamTerm]) -> Result<LamTerm, StepError> {
    Ok(match p {
        Prim::Even => LamTerm::Bool((int_arg(args[0], p)? % 2u32).is_zero()),
        Prim::Add => LamTerm::Int(int_arg(args[0], p)? + int_arg(args[1], p)?),
        Prim::Mul => LamTerm::Int(int_arg(args[0], p)? * int_arg(args[1], p)?),
        Prim::Div => {
            let (a, b) = (int_arg(args[0], p)?, int_arg(args[1], p)?);
            if b.is_zero() {
                return Err(StepError::DivisionByZero);
            }
            LamTerm::Int(a / b)
        }
    })
}

fn rebuild(head: LamTerm, args: &[&LamTerm]) -> LamTerm {
    LamTerm::apps(head, args.iter().map(|a| (*a).clone()))
}

fn reduce(t: &LamTerm) -> Result<Option<LamTerm>, StepError> {
    if t.is_value() {
        return Ok(None);
    }
    let must = |r: Option<LamTerm>, sub: &LamTerm| r.ok_or_else(|| StepError::Stuck(format!("`{sub}` cannot reduce")));
    match t {
        LamTerm::Var(x) => Err(StepError::UnboundVariable(x.clone())),
        LamTerm::If(c, a, b) => match c.as_ref() {
            LamTerm::Bool(true) => Ok(Some((**a).clone())),
            LamTerm::Bool(false) => Ok(Some((**b).clone())),
            c if c.is_value() => Err(StepError::TypeMismatch(format!("non-boolean condition `{c}`"))),
            c => {
                let c2 = must(reduce(c)?, c)?;
                Ok(Some(LamTerm::If(Box::new(c2), a.clone(), b.clone())))
            }
        },
        LamTerm::App(..) => {
            let (head, args) = t.spine();
            if !head.is_value() {
                let h2 = must(reduce(head)?, head)?;
                return Ok(Some(rebuild(h2, &args)));
            }
            if let Some(i) = args.iter().position(|a| !a.is_value()) {
                let a2 = must(reduce(args[i])?, args[i])?;
                let mut args2: Vec<LamTerm> = args.iter().map(|a| (*a).clone()).collect();
                args2[i] = a2;
                return Ok(Some(LamTerm::apps(head.clone(), args2)));
            }
            match head {
                LamTerm::Fix { name, param, body } => {
                    let applied = substitute(body, param, args[0], name, head);
                    Ok(Some(rebuild(applied, &args[1..])))
                }
                LamTerm::Prim(p) => {
                    // fewer arguments than the arity is a value, handled above
                    let n = p.arity();
                    Ok(Some(rebuild(apply_prim(*p, &args[..n])?, &args[n..])))
                }
                other => Err(StepError::Stuck(format!("`{other}` is not a function"))),
            }
        }
        _ => unreachable!("values handled above"),
    }
}

/// One call-by-value step; at most one successor.
pub fn step_lam(t: &LamTerm) -> Result<Vec<LamTerm>, StepError> {
    Ok(reduce(t)?.into_iter().collect())
}

/// Replaces every abstraction and primitive by `<fun>`, flattening
/// application spines so `(h a b)` becomes `<fun>(a,b)`.
pub fn erase_lam_term(t: &LamTerm) -> Result<ErasedTerm, FreeVariable> {
    Ok(match t {
        LamTerm::Int(n) => ErasedTerm::Int(n.clone()),
        LamTerm::Bool(b) => ErasedTerm::Bool(*b),
        LamTerm::Var(x) => return Err(FreeVariable(x.clone())),
        LamTerm::Fix { .. } | LamTerm::Prim(_) => ErasedTerm::Fun(Vec::new()),
        LamTerm::If(c, a, b) => ErasedTerm::Fun(vec![erase_lam_term(c)?, erase_lam_term(a)?, erase_lam_term(b)?]),
        LamTerm::App(..) => {
            let (head, args) = t.spine();
            let mut out = Vec::with_capacity(args.len() + 1);
            if !matches!(head, LamTerm::Fix { .. } | LamTerm::Prim(_)) {
                out.push(erase_lam_term(head)?);
            }
            for a in args {
                out.push(erase_lam_term(a)?);
            }
            ErasedTerm::Fun(out)
        }
    })
}
