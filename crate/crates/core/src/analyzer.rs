//! Name resolution, arity and exhaustiveness checks.
//!
//! No type inference beyond what is needed to find the inductive a `match`
//! scrutinizes: the input is assumed to already typecheck in Coq.

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::ast::{
    Diagnostic, FunctionDecl, InductiveDecl, Pattern, Phase, Program, Span, Term, TypeExpr,
    Vernacular,
};

pub const NAT: &str = "nat";
pub const BOOL: &str = "bool";
pub const ZERO: &str = "O";
pub const SUCC: &str = "S";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeInfo {
    pub constructors: Vec<String>,
    pub builtin: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorInfo {
    pub owner: String,
    pub arity: usize,
    pub param_types: Vec<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionInfo {
    pub param_types: Vec<TypeExpr>,
    pub return_type: Option<TypeExpr>,
}

impl FunctionInfo {
    pub fn arity(&self) -> usize {
        self.param_types.len()
    }
}

/// What an identifier in term position refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved<'a> {
    Local,
    Constructor(&'a CtorInfo),
    Function(&'a FunctionInfo),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    pub types: IndexMap<String, TypeInfo>,
    pub constructors: IndexMap<String, CtorInfo>,
    pub functions: IndexMap<String, FunctionInfo>,
    pub lemmas: IndexMap<String, Span>,
}

impl Default for SymbolTable {
    fn default() -> SymbolTable {
        SymbolTable::with_builtins()
    }
}

impl SymbolTable {
    /// `nat` with `O`/`S`, and `bool` with `true`/`false`.
    pub fn with_builtins() -> SymbolTable {
        let mut table = SymbolTable {
            types: IndexMap::new(),
            constructors: IndexMap::new(),
            functions: IndexMap::new(),
            lemmas: IndexMap::new(),
        };
        table.add_builtin(NAT, &[(ZERO, vec![]), (SUCC, vec![TypeExpr::named(NAT)])]);
        table.add_builtin(BOOL, &[("true", vec![]), ("false", vec![])]);
        table
    }

    fn add_builtin(&mut self, ty: &str, ctors: &[(&str, Vec<TypeExpr>)]) {
        self.types.insert(
            ty.to_string(),
            TypeInfo { constructors: ctors.iter().map(|(c, _)| c.to_string()).collect(), builtin: true },
        );
        for (name, params) in ctors {
            self.constructors.insert(
                name.to_string(),
                CtorInfo { owner: ty.to_string(), arity: params.len(), param_types: params.clone() },
            );
        }
    }

    pub fn is_builtin_type(&self, name: &str) -> bool {
        self.types.get(name).is_some_and(|t| t.builtin)
    }

    /// Inductives declared by the program, in source order.
    pub fn user_types(&self) -> impl Iterator<Item = (&String, &TypeInfo)> {
        self.types.iter().filter(|(_, t)| !t.builtin)
    }

    fn is_declared(&self, name: &str) -> bool {
        self.types.contains_key(name)
            || self.constructors.contains_key(name)
            || self.functions.contains_key(name)
            || self.lemmas.contains_key(name)
    }

    /// Resolves `name`, preferring the innermost local binder.
    pub fn resolve<'a>(&'a self, name: &str, locals: &[impl AsRef<str>]) -> Option<Resolved<'a>> {
        if locals.iter().any(|l| l.as_ref() == name) {
            return Some(Resolved::Local);
        }
        if let Some(c) = self.constructors.get(name) {
            return Some(Resolved::Constructor(c));
        }
        self.functions.get(name).map(Resolved::Function)
    }
}

/// Result of a successful analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analyzed {
    pub symbols: SymbolTable,
    pub warnings: Vec<Diagnostic>,
}

/// Builds the symbol table for `program`, or returns every diagnostic found
/// (errors and warnings, in source order) if any error occurred.
pub fn analyze(program: &Program) -> Result<Analyzed, Vec<Diagnostic>> {
    let mut checker = Checker { table: SymbolTable::with_builtins(), diagnostics: Vec::new() };
    for decl in &program.declarations {
        match decl {
            Vernacular::Inductive(d) => checker.inductive(d),
            Vernacular::Fixpoint(d) => checker.function(d, true),
            Vernacular::Definition(d) => checker.function(d, false),
            Vernacular::Lemma(d) => {
                if checker.claim_name(&d.name, d.span) {
                    checker.table.lemmas.insert(d.name.clone(), d.span);
                }
            }
        }
    }
    let Checker { table, mut diagnostics } = checker;
    diagnostics.sort_by_key(|d| d.span.start());
    if crate::ast::has_errors(&diagnostics) {
        Err(diagnostics)
    } else {
        Ok(Analyzed { symbols: table, warnings: diagnostics })
    }
}

/// Checks a standalone term against an analyzed table with extra local
/// binders in scope. Returns the inferred type name when one is known.
pub fn check_term(
    table: &SymbolTable,
    locals: &[(String, TypeExpr)],
    term: &Term,
) -> Result<Option<TypeExpr>, Vec<Diagnostic>> {
    let mut checker = Checker { table: table.clone(), diagnostics: Vec::new() };
    let mut scope = Scope { locals: locals.iter().map(|(n, t)| (n.clone(), Some(t.clone()))).collect(), current: None };
    let ty = checker.term(term, &mut scope);
    if crate::ast::has_errors(&checker.diagnostics) {
        Err(checker.diagnostics)
    } else {
        Ok(ty)
    }
}

struct Checker {
    table: SymbolTable,
    diagnostics: Vec<Diagnostic>,
}

/// Innermost binder last.
struct Scope {
    locals: Vec<(String, Option<TypeExpr>)>,
    /// Fixpoint under analysis and whether its body refers to it.
    current: Option<(String, bool)>,
}

impl Scope {
    fn lookup(&self, name: &str) -> Option<&Option<TypeExpr>> {
        self.locals.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

impl Checker {
    fn error(&mut self, span: Span, message: String) {
        self.diagnostics.push(Diagnostic::error(Phase::Analyze, span, message));
    }

    fn warn(&mut self, span: Span, message: String) {
        self.diagnostics.push(Diagnostic::warning(Phase::Analyze, span, message));
    }

    /// Reports a clash if `name` is already taken in any namespace.
    fn claim_name(&mut self, name: &str, span: Span) -> bool {
        if self.table.is_declared(name) {
            self.error(span, format!("duplicate declaration {name}"));
            false
        } else {
            true
        }
    }

    fn check_type(&mut self, ty: &TypeExpr) {
        match ty {
            TypeExpr::Named { name, span } => {
                if !self.table.types.contains_key(name) {
                    self.error(*span, format!("unknown type {name}"));
                }
            }
            TypeExpr::Arrow { from, to, .. } => {
                self.check_type(from);
                self.check_type(to);
            }
        }
    }

    fn inductive(&mut self, decl: &InductiveDecl) {
        if !self.claim_name(&decl.name, decl.span) {
            return;
        }
        self.table
            .types
            .insert(decl.name.clone(), TypeInfo { constructors: Vec::new(), builtin: false });
        for ctor in &decl.constructors {
            for param in &ctor.params {
                self.check_type(&param.ty);
            }
            if !self.claim_name(&ctor.name, ctor.span) {
                continue;
            }
            self.table.constructors.insert(
                ctor.name.clone(),
                CtorInfo {
                    owner: decl.name.clone(),
                    arity: ctor.arity(),
                    param_types: ctor.params.iter().map(|b| b.ty.clone()).collect(),
                },
            );
            self.table.types.get_mut(&decl.name).expect("registered above").constructors.push(ctor.name.clone());
        }
    }

    fn function(&mut self, decl: &FunctionDecl, recursive: bool) {
        let fresh = self.claim_name(&decl.name, decl.span);
        let mut seen = HashSet::new();
        for param in &decl.params {
            self.check_type(&param.ty);
            if !seen.insert(param.name.as_str()) {
                self.error(param.span, format!("parameter {} appears twice", param.name));
            }
        }
        if let Some(ty) = &decl.return_type {
            self.check_type(ty);
        }
        let info = FunctionInfo {
            param_types: decl.params.iter().map(|b| b.ty.clone()).collect(),
            return_type: decl.return_type.clone(),
        };
        if recursive && fresh {
            self.table.functions.insert(decl.name.clone(), info.clone());
        }
        let mut scope = Scope {
            locals: decl.params.iter().map(|b| (b.name.clone(), Some(b.ty.clone()))).collect(),
            current: recursive.then(|| (decl.name.clone(), false)),
        };
        self.term(&decl.body, &mut scope);
        if let Some((name, false)) = scope.current {
            self.warn(decl.span, format!("fixpoint {name} never calls itself"));
        }
        if !recursive && fresh {
            self.table.functions.insert(decl.name.clone(), info);
        }
    }

    fn note_reference(&self, name: &str, scope: &mut Scope) {
        if let Some((current, used)) = &mut scope.current {
            if current == name && scope.locals.iter().all(|(n, _)| n != name) {
                *used = true;
            }
        }
    }

    fn term(&mut self, term: &Term, scope: &mut Scope) -> Option<TypeExpr> {
        match term {
            Term::Var { name, span } => self.var(name, *span, scope),
            Term::NatLit { .. } => Some(TypeExpr::named(NAT)),
            Term::Paren { inner, .. } => self.term(inner, scope),
            Term::BinOp { left, right, .. } => {
                self.term(left, scope);
                self.term(right, scope);
                Some(TypeExpr::named(NAT))
            }
            Term::App { func, args, span } => self.app(func, args, *span, scope),
            Term::Match { scrutinee, arms, span } => self.match_term(scrutinee, arms, *span, scope),
        }
    }

    fn var(&mut self, name: &str, span: Span, scope: &mut Scope) -> Option<TypeExpr> {
        if let Some(ty) = scope.lookup(name) {
            return ty.clone();
        }
        self.note_reference(name, scope);
        if let Some(ctor) = self.table.constructors.get(name) {
            let (arity, owner) = (ctor.arity, ctor.owner.clone());
            if arity > 0 {
                self.error(
                    span,
                    format!("arity mismatch: constructor {name} expects {arity} argument{}, found 0", plural(arity)),
                );
            }
            return Some(TypeExpr::named(owner));
        }
        if let Some(f) = self.table.functions.get(name) {
            return function_type(f);
        }
        self.error(span, format!("unbound identifier {name}"));
        None
    }

    fn app(&mut self, func: &Term, args: &[Term], span: Span, scope: &mut Scope) -> Option<TypeExpr> {
        for arg in args {
            self.term(arg, scope);
        }
        let Term::Var { name, span: head_span } = func.unparen() else {
            self.term(func, scope);
            self.error(func.span(), "only functions and constructors can be applied".to_string());
            return None;
        };
        if let Some(ty) = scope.lookup(name) {
            return ty.clone().and_then(|t| peel_arrows(t, args.len()));
        }
        self.note_reference(name, scope);
        if let Some(ctor) = self.table.constructors.get(name) {
            let (arity, owner) = (ctor.arity, ctor.owner.clone());
            if arity != args.len() {
                self.error(
                    span,
                    format!(
                        "arity mismatch: constructor {name} expects {arity} argument{}, found {}",
                        plural(arity),
                        args.len()
                    ),
                );
            }
            return Some(TypeExpr::named(owner));
        }
        if let Some(f) = self.table.functions.get(name) {
            let arity = f.arity();
            let ret = f.return_type.clone();
            let extra = args.len().checked_sub(arity);
            let ret = match (extra, ret) {
                (Some(0), ret) => return ret,
                (Some(extra), Some(ret)) => peel_arrows(ret, extra),
                _ => None,
            };
            if ret.is_none() && args.len() != arity {
                self.error(
                    span,
                    format!(
                        "arity mismatch: function {name} expects {arity} argument{}, found {}",
                        plural(arity),
                        args.len()
                    ),
                );
            }
            return ret;
        }
        self.error(*head_span, format!("unbound identifier {name}"));
        None
    }

    fn match_term(
        &mut self,
        scrutinee: &Term,
        arms: &[crate::ast::MatchArm],
        span: Span,
        scope: &mut Scope,
    ) -> Option<TypeExpr> {
        let mut subject = self.term(scrutinee, scope).and_then(|t| t.as_named().map(str::to_string));
        if subject.as_deref().is_some_and(|s| !self.table.types.contains_key(s)) {
            subject = None;
        }
        let mut covered: Vec<String> = Vec::new();
        let mut wildcard = false;
        let mut result = None;

        for arm in arms {
            let depth = scope.locals.len();
            match &arm.pattern {
                Pattern::Wildcard { .. } => wildcard = true,
                Pattern::NatLit { value, span } => {
                    let on = subject.get_or_insert_with(|| NAT.to_string());
                    if on != NAT {
                        let on = on.clone();
                        self.error(*span, format!("number pattern in a match on {on}"));
                    } else if *value == 0u32.into() {
                        covered.push(ZERO.to_string());
                    }
                }
                Pattern::Ctor { ctor_name, binders, span } => {
                    self.ctor_pattern(ctor_name, binders, *span, &mut subject, scope);
                    covered.push(ctor_name.clone());
                }
            }
            let ty = self.term(&arm.body, scope);
            result = result.or(ty);
            scope.locals.truncate(depth);
        }

        if let (false, Some(ty)) = (wildcard, &subject) {
            let all = &self.table.types[ty.as_str()].constructors;
            let missing: Vec<&str> =
                all.iter().map(String::as_str).filter(|c| !covered.iter().any(|k| k == c)).collect();
            if !missing.is_empty() {
                let missing = missing.join(", ");
                self.error(span, format!("non-exhaustive match: missing {missing}"));
            }
        }
        result
    }

    fn ctor_pattern(
        &mut self,
        ctor_name: &str,
        binders: &[String],
        span: Span,
        subject: &mut Option<String>,
        scope: &mut Scope,
    ) {
        let Some(ctor) = self.table.constructors.get(ctor_name).cloned() else {
            self.error(span, format!("unknown constructor {ctor_name} in pattern"));
            for binder in binders {
                scope.locals.push((binder.clone(), None));
            }
            return;
        };
        let on = subject.get_or_insert_with(|| ctor.owner.clone()).clone();
        if on != ctor.owner {
            self.error(
                span,
                format!("constructor {ctor_name} belongs to {}, but the match is on {on}", ctor.owner),
            );
        }
        if binders.len() != ctor.arity {
            self.error(
                span,
                format!(
                    "arity mismatch: constructor {ctor_name} expects {} argument{}, found {}",
                    ctor.arity,
                    plural(ctor.arity),
                    binders.len()
                ),
            );
        }
        let mut seen = HashSet::new();
        let mut fresh = Vec::new();
        for (i, binder) in binders.iter().enumerate() {
            if binder == "_" {
                continue;
            }
            if !seen.insert(binder.as_str()) {
                self.error(span, format!("binder {binder} appears twice in pattern"));
                continue;
            }
            if scope.lookup(binder).is_some() {
                self.warn(span, format!("binder {binder} shadows an outer binding"));
            }
            fresh.push((binder.clone(), ctor.param_types.get(i).cloned()));
        }
        scope.locals.extend(fresh);
    }
}

fn function_type(f: &FunctionInfo) -> Option<TypeExpr> {
    let ret = f.return_type.clone()?;
    Some(f.param_types.iter().rev().fold(ret, |acc, p| TypeExpr::arrow(p.clone(), acc)))
}

fn peel_arrows(mut ty: TypeExpr, count: usize) -> Option<TypeExpr> {
    for _ in 0..count {
        match ty {
            TypeExpr::Arrow { to, .. } => ty = *to,
            TypeExpr::Named { .. } => return None,
        }
    }
    Some(ty)
}
