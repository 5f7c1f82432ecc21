//! Source-language syntax tree, spans and diagnostics shared by every phase.

use std::fmt;

use indexmap::map::Entry;
use indexmap::IndexMap;
use num_bigint::BigUint;

/// A region of the input, 1-based. `end_col` is one past the last character.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Span {
        let span = Span { start_line, start_col, end_line, end_col };
        debug_assert!(span.start() <= span.end(), "span ends before it starts: {span}");
        span
    }

    /// Zero-width span at a single position.
    pub fn point(line: u32, col: u32) -> Span {
        Span::new(line, col, line, col)
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }

    /// Zero-width span at the end of this one.
    pub fn end_point(&self) -> Span {
        Span::point(self.end_line, self.end_col)
    }

    /// Smallest span covering both inputs.
    pub fn merge(self, other: Span) -> Span {
        let (start_line, start_col) = self.start().min(other.start());
        let (end_line, end_col) = self.end().max(other.end());
        Span { start_line, start_col, end_line, end_col }
    }

    pub fn contains(&self, inner: &Span) -> bool {
        self.start() <= inner.start() && inner.end() <= self.end()
    }

    /// Extracts the covered text from `source`. Columns count Unicode scalar values.
    pub fn slice<'a>(&self, source: &'a str) -> Option<&'a str> {
        let start = offset_of(source, self.start_line, self.start_col)?;
        let end = offset_of(source, self.end_line, self.end_col)?;
        source.get(start..end)
    }
}

/// Hull of two spans.
pub fn span_merge(a: Span, b: Span) -> Span {
    a.merge(b)
}

fn offset_of(source: &str, line: u32, col: u32) -> Option<usize> {
    let mut cur_line = 1;
    let mut line_start = 0;
    if line > 1 {
        for (i, b) in source.bytes().enumerate() {
            if b == b'\n' {
                cur_line += 1;
                if cur_line == line {
                    line_start = i + 1;
                    break;
                }
            }
        }
        if cur_line != line {
            return None;
        }
    }
    let rest = &source[line_start..];
    let skip = (col as usize).checked_sub(1)?;
    match rest.char_indices().nth(skip) {
        Some((i, _)) => Some(line_start + i),
        None if rest.chars().count() == skip => Some(source.len()),
        None => None,
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}:{}", self.start_line, self.start_col, self.end_line, self.end_col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Lex,
    Parse,
    Analyze,
    Codegen,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    pub phase: Phase,
}

impl Diagnostic {
    pub fn error(phase: Phase, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(Severity::Error, phase, span, message.into())
    }

    pub fn warning(phase: Phase, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(Severity::Warning, phase, span, message.into())
    }

    fn new(severity: Severity, phase: Phase, span: Span, message: String) -> Diagnostic {
        assert!(!message.is_empty(), "diagnostic message must not be empty");
        Diagnostic { severity, message, span, phase }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {}: {}",
            file, self.span.start_line, self.span.start_col, self.severity, self.message
        )
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub declarations: Vec<Vernacular>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vernacular {
    Inductive(InductiveDecl),
    Fixpoint(FunctionDecl),
    Definition(FunctionDecl),
    Lemma(LemmaDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductiveDecl {
    pub name: String,
    pub constructors: Vec<ConstructorDecl>,
    pub span: Span,
}

/// Shared shape of `Fixpoint` and `Definition`. Fixpoints always carry a return type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Binder>,
    pub return_type: Option<TypeExpr>,
    pub body: Term,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaDecl {
    pub name: String,
    /// Statement lexemes joined by single spaces.
    pub statement_text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: String,
    pub params: Vec<Binder>,
    pub result_type: Option<TypeExpr>,
    pub span: Span,
}

impl ConstructorDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// One name with its type. `(l r : Tree)` yields two binders sharing a type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Named { name: String, span: Span },
    Arrow { from: Box<TypeExpr>, to: Box<TypeExpr>, span: Span },
}

impl TypeExpr {
    pub fn named(name: impl Into<String>) -> TypeExpr {
        TypeExpr::Named { name: name.into(), span: Span::default() }
    }

    pub fn arrow(from: TypeExpr, to: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow { from: Box::new(from), to: Box::new(to), span: Span::default() }
    }

    pub fn span(&self) -> Span {
        match self {
            TypeExpr::Named { span, .. } | TypeExpr::Arrow { span, .. } => *span,
        }
    }

    pub fn as_named(&self) -> Option<&str> {
        match self {
            TypeExpr::Named { name, .. } => Some(name),
            TypeExpr::Arrow { .. } => None,
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Named { name, .. } => f.write_str(name),
            TypeExpr::Arrow { from, to, .. } => match **from {
                TypeExpr::Arrow { .. } => write!(f, "({from}) -> {to}"),
                TypeExpr::Named { .. } => write!(f, "{from} -> {to}"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var { name: String, span: Span },
    NatLit { value: BigUint, span: Span },
    App { func: Box<Term>, args: Vec<Term>, span: Span },
    BinOp { op: BinOp, left: Box<Term>, right: Box<Term>, span: Span },
    Match { scrutinee: Box<Term>, arms: Vec<MatchArm>, span: Span },
    Paren { inner: Box<Term>, span: Span },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var { name: name.into(), span: Span::default() }
    }

    pub fn nat(value: u64) -> Term {
        Term::NatLit { value: BigUint::from(value), span: Span::default() }
    }

    pub fn app(func: Term, args: Vec<Term>) -> Term {
        Term::App { func: Box::new(func), args, span: Span::default() }
    }

    pub fn binop(op: BinOp, left: Term, right: Term) -> Term {
        Term::BinOp { op, left: Box::new(left), right: Box::new(right), span: Span::default() }
    }

    pub fn paren(inner: Term) -> Term {
        Term::Paren { inner: Box::new(inner), span: Span::default() }
    }

    pub fn span(&self) -> Span {
        match self {
            Term::Var { span, .. }
            | Term::NatLit { span, .. }
            | Term::App { span, .. }
            | Term::BinOp { span, .. }
            | Term::Match { span, .. }
            | Term::Paren { span, .. } => *span,
        }
    }

    /// Strips any number of enclosing parentheses.
    pub fn unparen(&self) -> &Term {
        let mut term = self;
        while let Term::Paren { inner, .. } = term {
            term = inner;
        }
        term
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchArm {
    pub pattern: Pattern,
    pub body: Term,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// `binders` holds `_` for ignored positions.
    Ctor { ctor_name: String, binders: Vec<String>, span: Span },
    Wildcard { span: Span },
    NatLit { value: BigUint, span: Span },
}

impl Pattern {
    pub fn span(&self) -> Span {
        match self {
            Pattern::Ctor { span, .. } | Pattern::Wildcard { span } | Pattern::NatLit { span, .. } => {
                *span
            }
        }
    }
}

impl Vernacular {
    pub fn name(&self) -> &str {
        match self {
            Vernacular::Inductive(d) => &d.name,
            Vernacular::Fixpoint(d) | Vernacular::Definition(d) => &d.name,
            Vernacular::Lemma(d) => &d.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Vernacular::Inductive(d) => d.span,
            Vernacular::Fixpoint(d) | Vernacular::Definition(d) => d.span,
            Vernacular::Lemma(d) => d.span,
        }
    }
}

impl Program {
    /// Copy with every span zeroed and every `Paren` node removed.
    pub fn normalized(&self) -> Program {
        let mut program = self.clone();
        for decl in &mut program.declarations {
            normalize_decl(decl);
        }
        program
    }

    /// Equality up to spans and parenthesization.
    pub fn structural_eq(&self, other: &Program) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &LemmaDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Vernacular::Lemma(l) => Some(l),
            _ => None,
        })
    }
}

fn normalize_decl(decl: &mut Vernacular) {
    match decl {
        Vernacular::Inductive(d) => {
            d.span = Span::default();
            for ctor in &mut d.constructors {
                ctor.span = Span::default();
                ctor.params.iter_mut().for_each(normalize_binder);
                // The parser only accepts the owning type here.
                ctor.result_type = None;
            }
        }
        Vernacular::Fixpoint(d) | Vernacular::Definition(d) => {
            d.span = Span::default();
            d.params.iter_mut().for_each(normalize_binder);
            if let Some(ty) = &mut d.return_type {
                normalize_type(ty);
            }
            let body = std::mem::replace(&mut d.body, Term::var(""));
            d.body = normalize_term(body);
        }
        Vernacular::Lemma(d) => d.span = Span::default(),
    }
}

fn normalize_binder(binder: &mut Binder) {
    binder.span = Span::default();
    normalize_type(&mut binder.ty);
}

fn normalize_type(ty: &mut TypeExpr) {
    match ty {
        TypeExpr::Named { span, .. } => *span = Span::default(),
        TypeExpr::Arrow { from, to, span } => {
            *span = Span::default();
            normalize_type(from);
            normalize_type(to);
        }
    }
}

fn normalize_term(term: Term) -> Term {
    let blank = Span::default();
    match term {
        Term::Var { name, .. } => Term::Var { name, span: blank },
        Term::NatLit { value, .. } => Term::NatLit { value, span: blank },
        Term::App { func, args, .. } => Term::App {
            func: Box::new(normalize_term(*func)),
            args: args.into_iter().map(normalize_term).collect(),
            span: blank,
        },
        Term::BinOp { op, left, right, .. } => Term::BinOp {
            op,
            left: Box::new(normalize_term(*left)),
            right: Box::new(normalize_term(*right)),
            span: blank,
        },
        Term::Match { scrutinee, arms, .. } => Term::Match {
            scrutinee: Box::new(normalize_term(*scrutinee)),
            arms: arms
                .into_iter()
                .map(|arm| MatchArm {
                    pattern: match arm.pattern {
                        Pattern::Ctor { ctor_name, binders, .. } => {
                            Pattern::Ctor { ctor_name, binders, span: blank }
                        }
                        Pattern::Wildcard { .. } => Pattern::Wildcard { span: blank },
                        Pattern::NatLit { value, .. } => Pattern::NatLit { value, span: blank },
                    },
                    body: normalize_term(arm.body),
                    span: blank,
                })
                .collect(),
            span: blank,
        },
        Term::Paren { inner, .. } => normalize_term(*inner),
    }
}

/// Constructors of every inductive, keyed by type name in declaration order.
pub fn program_constructors(
    program: &Program,
) -> Result<IndexMap<String, Vec<ConstructorDecl>>, Diagnostic> {
    let mut map = IndexMap::new();
    for decl in &program.declarations {
        if let Vernacular::Inductive(ind) = decl {
            match map.entry(ind.name.clone()) {
                Entry::Occupied(_) => {
                    return Err(Diagnostic::error(
                        Phase::Analyze,
                        ind.span,
                        format!("duplicate declaration {}", ind.name),
                    ))
                }
                Entry::Vacant(slot) => {
                    slot.insert(ind.constructors.clone());
                }
            }
        }
    }
    Ok(map)
}
