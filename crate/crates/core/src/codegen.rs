//! Translation from the analyzed Gallina program to a Scala-shaped unit.
//!
//! Inductives become a sealed trait with one case object or case class per
//! constructor, Fixpoints and Definitions become `def`s over `match`
//! expressions, and lemmas travel along as comments. Identifiers are stored
//! in their target spelling (backquoted where Scala requires it).

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::analyzer::{Resolved, SymbolTable, BOOL, NAT, SUCC, ZERO};
use crate::ast::{
    BinOp, ConstructorDecl, FunctionDecl, InductiveDecl, LemmaDecl, Pattern, Program, Term,
    TypeExpr, Vernacular,
};

/// Name of the injected truncated-subtraction helper.
pub const NAT_SUB: &str = "natSub";

/// Bound by number patterns, which compile to guards.
const LITERAL_BINDER: &str = "n$";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetUnit {
    pub wrapper_name: String,
    pub items: Vec<TargetItem>,
    /// Support definitions emitted after all items.
    pub helpers: BTreeSet<Helper>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Helper {
    /// `natSub(a, b)`: subtraction truncated at zero.
    NatSub,
    /// `object S` with `apply` and `unapply`, so `S n` works in terms and patterns.
    Succ,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetItem {
    SealedRoot { name: String },
    LeafObject { name: String, parent: String },
    RecordCase { name: String, fields: Vec<(String, TargetType)>, parent: String },
    FunctionDef {
        name: String,
        params: Vec<(String, TargetType)>,
        return_type: Option<TargetType>,
        body: TargetExpr,
    },
    SpecComment { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetType {
    Named(String),
    Function(Box<TargetType>, Box<TargetType>),
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetType::Named(name) => f.write_str(name),
            TargetType::Function(from, to) => match **from {
                TargetType::Function(..) => write!(f, "({from}) => {to}"),
                TargetType::Named(_) => write!(f, "{from} => {to}"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InfixOp {
    Add,
    Mul,
}

impl InfixOp {
    pub fn symbol(self) -> &'static str {
        match self {
            InfixOp::Add => "+",
            InfixOp::Mul => "*",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            InfixOp::Add => 1,
            InfixOp::Mul => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetExpr {
    Name(String),
    IntLit(BigUint),
    Call { func: Box<TargetExpr>, args: Vec<TargetExpr> },
    Infix { op: InfixOp, left: Box<TargetExpr>, right: Box<TargetExpr> },
    MatchExpr { scrutinee: Box<TargetExpr>, cases: Vec<MatchCase> },
    Grouped(Box<TargetExpr>),
}

impl TargetExpr {
    fn call(func: TargetExpr, args: Vec<TargetExpr>) -> TargetExpr {
        TargetExpr::Call { func: Box::new(func), args }
    }

    fn grouped(self) -> TargetExpr {
        match self {
            TargetExpr::Grouped(_) => self,
            other => TargetExpr::Grouped(Box::new(other)),
        }
    }

    /// Renders without needing parentheses in any operand position.
    fn is_atomic(&self) -> bool {
        matches!(
            self,
            TargetExpr::Name(_) | TargetExpr::IntLit(_) | TargetExpr::Call { .. } | TargetExpr::Grouped(_)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchCase {
    /// Pattern in target syntax, including any guard.
    pub pattern: String,
    pub body: TargetExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub wrapper_name: String,
    pub lemma_comments: bool,
}

impl Options {
    pub fn new(wrapper_name: impl Into<String>) -> Options {
        Options { wrapper_name: wrapper_name.into(), lemma_comments: true }
    }
}

/// Scala keywords that must be backquoted when used as identifiers.
const SCALA_RESERVED: &[&str] = &[
    "abstract", "case", "catch", "class", "def", "do", "else", "enum", "export", "extends", "false",
    "final", "finally", "for", "forSome", "given", "if", "implicit", "import", "lazy", "macro",
    "match", "new", "null", "object", "override", "package", "private", "protected", "return",
    "sealed", "super", "then", "this", "throw", "trait", "true", "try", "type", "val", "var",
    "while", "with", "yield",
];

/// Target spelling of a source identifier.
pub fn scala_ident(name: &str) -> String {
    if SCALA_RESERVED.contains(&name) || name.contains('\'') {
        format!("`{name}`")
    } else {
        name.to_string()
    }
}

/// Variable binding inside a pattern. Capitalized or backquoted names would
/// be read as stable identifiers, so they bind through `@ _`.
fn pattern_binder(name: &str) -> String {
    if name == "_" {
        return "_".to_string();
    }
    let ident = scala_ident(name);
    if ident.starts_with('`') || name.starts_with(|c: char| c.is_ascii_uppercase()) {
        format!("{ident} @ _")
    } else {
        ident
    }
}

/// Reference to a nullary constructor in pattern position.
fn stable_pattern(name: &str) -> String {
    if name.starts_with(|c: char| c.is_ascii_uppercase()) {
        scala_ident(name)
    } else {
        format!("`{name}`")
    }
}

/// Translates with lemma comments enabled.
pub fn translate(program: &Program, symbols: &SymbolTable, wrapper_name: &str) -> TargetUnit {
    translate_with(program, symbols, &Options::new(wrapper_name))
}

pub fn translate_with(program: &Program, symbols: &SymbolTable, options: &Options) -> TargetUnit {
    let mut cx = Translator { symbols, helpers: BTreeSet::new() };
    let mut items = Vec::new();
    for decl in &program.declarations {
        match decl {
            Vernacular::Inductive(d) => items.extend(translate_inductive(d)),
            Vernacular::Fixpoint(d) | Vernacular::Definition(d) => items.push(cx.function(d)),
            Vernacular::Lemma(d) if options.lemma_comments => items.push(spec_comment(d)),
            Vernacular::Lemma(_) => {}
        }
    }
    TargetUnit { wrapper_name: scala_ident(&options.wrapper_name), items, helpers: cx.helpers }
}

pub fn translate_inductive(decl: &InductiveDecl) -> Vec<TargetItem> {
    let parent = scala_ident(&decl.name);
    let mut items = vec![TargetItem::SealedRoot { name: parent.clone() }];
    items.extend(decl.constructors.iter().map(|c| translate_constructor(c, &parent)));
    items
}

fn translate_constructor(ctor: &ConstructorDecl, parent: &str) -> TargetItem {
    let name = scala_ident(&ctor.name);
    if ctor.params.is_empty() {
        TargetItem::LeafObject { name, parent: parent.to_string() }
    } else {
        TargetItem::RecordCase {
            name,
            fields: ctor.params.iter().map(|b| (scala_ident(&b.name), map_type(&b.ty))).collect(),
            parent: parent.to_string(),
        }
    }
}

/// Translates one function on its own; helper requirements are dropped.
pub fn translate_fixpoint(decl: &FunctionDecl, symbols: &SymbolTable) -> TargetItem {
    Translator { symbols, helpers: BTreeSet::new() }.function(decl)
}

/// Translates one term with the given local binders in scope.
pub fn translate_term(term: &Term, symbols: &SymbolTable, locals: &[String]) -> TargetExpr {
    let mut cx = Translator { symbols, helpers: BTreeSet::new() };
    let mut locals = locals.to_vec();
    cx.top(term, &mut locals)
}

pub fn map_type(ty: &TypeExpr) -> TargetType {
    match ty {
        TypeExpr::Named { name, .. } if name == NAT => TargetType::Named("BigInt".to_string()),
        TypeExpr::Named { name, .. } if name == BOOL => TargetType::Named("Boolean".to_string()),
        TypeExpr::Named { name, .. } => TargetType::Named(scala_ident(name)),
        TypeExpr::Arrow { from, to, .. } => {
            TargetType::Function(Box::new(map_type(from)), Box::new(map_type(to)))
        }
    }
}

fn spec_comment(lemma: &LemmaDecl) -> TargetItem {
    TargetItem::SpecComment {
        text: format!("Lemma {}: {} (proved in Coq)", lemma.name, lemma.statement_text),
    }
}

struct Translator<'a> {
    symbols: &'a SymbolTable,
    helpers: BTreeSet<Helper>,
}

impl Translator<'_> {
    fn function(&mut self, decl: &FunctionDecl) -> TargetItem {
        let mut locals: Vec<String> = decl.params.iter().map(|b| b.name.clone()).collect();
        TargetItem::FunctionDef {
            name: scala_ident(&decl.name),
            params: decl.params.iter().map(|b| (scala_ident(&b.name), map_type(&b.ty))).collect(),
            return_type: decl.return_type.as_ref().map(map_type),
            body: self.top(&decl.body, &mut locals),
        }
    }

    /// A term in a position that needs no grouping: function body, case body, argument.
    fn top(&mut self, term: &Term, locals: &mut Vec<String>) -> TargetExpr {
        self.term(term.unparen(), locals)
    }

    fn term(&mut self, term: &Term, locals: &mut Vec<String>) -> TargetExpr {
        match term {
            Term::Var { name, .. } => self.var(name, locals),
            Term::NatLit { value, .. } => TargetExpr::IntLit(value.clone()),
            Term::Paren { inner, .. } => {
                let inner = self.term(inner, locals);
                if inner.is_atomic() {
                    inner
                } else {
                    inner.grouped()
                }
            }
            Term::App { func, args, .. } => self.app(func, args, locals),
            Term::BinOp { op: BinOp::Sub, left, right, .. } => {
                self.helpers.insert(Helper::NatSub);
                let args = vec![self.top(left, locals), self.top(right, locals)];
                TargetExpr::call(TargetExpr::Name(NAT_SUB.to_string()), args)
            }
            Term::BinOp { op, .. } => self.arithmetic(term, to_infix(*op), locals),
            Term::Match { scrutinee, arms, .. } => {
                let scrutinee = match self.term(scrutinee.unparen(), locals) {
                    e if e.is_atomic() => e,
                    e => e.grouped(),
                };
                let cases = arms
                    .iter()
                    .map(|arm| {
                        let depth = locals.len();
                        let pattern = self.pattern(&arm.pattern, locals);
                        let body = self.top(&arm.body, locals);
                        locals.truncate(depth);
                        MatchCase { pattern, body }
                    })
                    .collect();
                TargetExpr::MatchExpr { scrutinee: Box::new(scrutinee), cases }
            }
        }
    }

    fn var(&mut self, name: &str, locals: &[String]) -> TargetExpr {
        match self.symbols.resolve(name, locals) {
            Some(Resolved::Constructor(c)) if c.owner == NAT && name == ZERO => {
                TargetExpr::IntLit(BigUint::from(0u32))
            }
            // Scala's own literals.
            Some(Resolved::Constructor(c)) if c.owner == BOOL => TargetExpr::Name(name.to_string()),
            _ => TargetExpr::Name(scala_ident(name)),
        }
    }

    fn app(&mut self, func: &Term, args: &[Term], locals: &mut Vec<String>) -> TargetExpr {
        let mut args: Vec<TargetExpr> = args.iter().map(|a| self.top(a, locals)).collect();
        let head = func.unparen();
        let Term::Var { name, .. } = head else {
            unreachable!("analyzer rejects applications of non-identifiers");
        };
        // Locals of function type are curried values; declared functions take
        // their parameters in one list.
        let first = match self.symbols.resolve(name, locals) {
            Some(Resolved::Function(f)) => f.arity().min(args.len()),
            Some(Resolved::Constructor(_)) => {
                if name == SUCC {
                    self.helpers.insert(Helper::Succ);
                }
                args.len()
            }
            _ => 1,
        };
        let rest = args.split_off(first);
        let mut expr = TargetExpr::call(TargetExpr::Name(scala_ident(name)), args);
        for arg in rest {
            expr = TargetExpr::call(expr, vec![arg]);
        }
        expr
    }

    /// `+`/`*` chains. A sum that starts with a literal and has at least three
    /// operands is grouped as `lit + (a + b + ...)`.
    fn arithmetic(&mut self, term: &Term, op: InfixOp, locals: &mut Vec<String>) -> TargetExpr {
        let mut operands = Vec::new();
        collect_chain(term, op, &mut operands);
        let leading_literal = matches!(operands[0], Term::NatLit { .. });
        if op == InfixOp::Add && leading_literal && operands.len() >= 3 {
            let head = self.operand(operands[0], op, locals);
            let tail = self.fold_chain(&operands[1..], op, locals);
            return TargetExpr::Infix { op, left: Box::new(head), right: Box::new(tail.grouped()) };
        }
        self.fold_chain(&operands, op, locals)
    }

    fn fold_chain(&mut self, operands: &[&Term], op: InfixOp, locals: &mut Vec<String>) -> TargetExpr {
        let mut acc = self.operand(operands[0], op, locals);
        for term in &operands[1..] {
            let mut right = self.operand(term, op, locals);
            if matches!(&right, TargetExpr::Infix { op: inner, .. } if inner.precedence() == op.precedence()) {
                right = right.grouped();
            }
            acc = TargetExpr::Infix { op, left: Box::new(acc), right: Box::new(right) };
        }
        acc
    }

    fn operand(&mut self, term: &Term, parent: InfixOp, locals: &mut Vec<String>) -> TargetExpr {
        let expr = self.term(term, locals);
        match &expr {
            TargetExpr::Infix { op, .. } if op.precedence() < parent.precedence() => expr.grouped(),
            TargetExpr::MatchExpr { .. } => expr.grouped(),
            _ => expr,
        }
    }

    fn pattern(&mut self, pattern: &Pattern, locals: &mut Vec<String>) -> String {
        match pattern {
            Pattern::Wildcard { .. } => "_".to_string(),
            Pattern::NatLit { value, .. } => literal_guard(value),
            Pattern::Ctor { ctor_name, binders, .. } => {
                let owner = self.symbols.constructors.get(ctor_name).map(|c| c.owner.as_str());
                locals.extend(binders.iter().filter(|b| *b != "_").cloned());
                match (owner, ctor_name.as_str()) {
                    (Some(NAT), ZERO) => return literal_guard(&BigUint::from(0u32)),
                    (Some(NAT), SUCC) => {
                        self.helpers.insert(Helper::Succ);
                    }
                    (Some(BOOL), name) => return name.to_string(),
                    _ => {}
                }
                if binders.is_empty() {
                    stable_pattern(ctor_name)
                } else {
                    let fields: Vec<String> = binders.iter().map(|b| pattern_binder(b)).collect();
                    format!("{}({})", scala_ident(ctor_name), fields.join(", "))
                }
            }
        }
    }
}

fn literal_guard(value: &BigUint) -> String {
    format!("{LITERAL_BINDER} if {LITERAL_BINDER} == {value}")
}

fn to_infix(op: BinOp) -> InfixOp {
    match op {
        BinOp::Add => InfixOp::Add,
        BinOp::Mul => InfixOp::Mul,
        BinOp::Sub => unreachable!("subtraction is a helper call"),
    }
}

/// Operands of a left-nested chain of `op`, not looking through parentheses.
fn collect_chain<'t>(term: &'t Term, op: InfixOp, out: &mut Vec<&'t Term>) {
    match term {
        Term::BinOp { op: inner, left, right, .. } if to_infix_opt(*inner) == Some(op) => {
            collect_chain(left, op, out);
            out.push(right);
        }
        other => out.push(other),
    }
}

fn to_infix_opt(op: BinOp) -> Option<InfixOp> {
    match op {
        BinOp::Add => Some(InfixOp::Add),
        BinOp::Mul => Some(InfixOp::Mul),
        BinOp::Sub => None,
    }
}
