//! Sampling-based checks of lemma statements.
//!
//! Only statements of the shape `forall <binders>, <term> <cmp> <term>` with
//! `cmp` one of `>`, `<`, `=` are testable. Binders range over every value of
//! their type up to a structural depth: nullary constructors have depth 0,
//! `C a b` has depth one more than its deepest argument, and `n : nat` has
//! depth `n`.

use std::fmt;

use crate::analyzer::{check_term, SymbolTable, NAT};
use crate::ast::{LemmaDecl, Program, Term, TypeExpr};
use crate::lexer::{tokenize, Keyword, Punct, TokenKind};
use crate::parser::Parser;

use super::{CallCache, Interpreter, Value};

/// Values bound to the lemma's binders, in binder order.
pub type Binding = Vec<(String, Value)>;

const CACHE_LIMIT: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Gt,
    Lt,
    Eq,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Gt => ">",
            Comparison::Lt => "<",
            Comparison::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaForm {
    pub binders: Vec<(String, TypeExpr)>,
    pub lhs: Term,
    pub comparison: Comparison,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LemmaOutcome {
    Pass { instances: usize },
    Fail { counterexample: Binding, lhs: Value, rhs: Value },
    /// Evaluation itself failed on some instance.
    Error { binding: Binding, message: String },
    Untestable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub name: String,
    pub outcome: LemmaOutcome,
}

impl LemmaReport {
    pub fn failed(&self) -> bool {
        matches!(self.outcome, LemmaOutcome::Fail { .. } | LemmaOutcome::Error { .. })
    }
}

fn show_binding(binding: &Binding) -> String {
    if binding.is_empty() {
        return "no bindings".to_string();
    }
    binding.iter().map(|(n, v)| format!("{n} = {v}")).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = &self.name;
        match &self.outcome {
            LemmaOutcome::Pass { instances } => write!(f, "lemma {name}: pass ({instances} instances)"),
            LemmaOutcome::Fail { counterexample, lhs, rhs } => write!(
                f,
                "lemma {name}: fail, counterexample {} (left side {lhs}, right side {rhs})",
                show_binding(counterexample)
            ),
            LemmaOutcome::Error { binding, message } => {
                write!(f, "lemma {name}: error on {}: {message}", show_binding(binding))
            }
            LemmaOutcome::Untestable { reason } => write!(f, "lemma {name}: untestable ({reason})"),
        }
    }
}

/// Reads a statement back into the testable form, checking names against `symbols`.
pub fn parse_lemma_form(statement: &str, symbols: &SymbolTable) -> Result<LemmaForm, String> {
    let tokens = tokenize(statement).map_err(|errs| errs[0].message.clone())?;
    let mut parser = Parser::new(&tokens);
    let mut binders = Vec::new();
    if parser.peek().is_some_and(|t| t.is_keyword(Keyword::Forall)) {
        parser.advance_token();
        binders = parser.forall_binders().map_err(|d| d.message)?;
    }
    let lhs = parser.term().map_err(|d| d.message)?;
    let comparison = match parser.peek().map(|t| t.kind) {
        Some(TokenKind::Punct(Punct::Gt)) => Comparison::Gt,
        Some(TokenKind::Punct(Punct::Lt)) => Comparison::Lt,
        Some(TokenKind::Punct(Punct::Eq)) => Comparison::Eq,
        _ => return Err("statement is not a comparison of two terms".to_string()),
    };
    parser.advance_token();
    let rhs = parser.term().map_err(|d| d.message)?;
    parser.expect_end().map_err(|d| d.message)?;

    let mut types = Vec::new();
    for side in [&lhs, &rhs] {
        let ty = check_term(symbols, &binders, side).map_err(|errs| errs[0].message.clone())?;
        types.push(ty);
    }
    if comparison != Comparison::Eq {
        for ty in types.iter().flatten() {
            if ty.as_named() != Some(NAT) {
                return Err(format!("`{}` compares values of type {ty}", comparison.symbol()));
            }
        }
    }
    Ok(LemmaForm { binders, lhs, comparison, rhs })
}

/// Every value of `ty` with structural depth at most `depth`, in a fixed order.
pub fn enumerate_values(symbols: &SymbolTable, ty: &TypeExpr, depth: u32) -> Result<Vec<Value>, String> {
    let name = match ty {
        TypeExpr::Named { name, .. } => name,
        TypeExpr::Arrow { .. } => return Err(format!("cannot enumerate functions of type {ty}")),
    };
    if name == NAT {
        return Ok((0..=depth).map(Value::nat).collect());
    }
    let info = symbols.types.get(name).ok_or_else(|| format!("unknown type {name}"))?;
    let mut values = Vec::new();
    for ctor_name in &info.constructors {
        let ctor = &symbols.constructors[ctor_name];
        if ctor.arity == 0 {
            values.push(Value::ctor(ctor_name, vec![]));
            continue;
        }
        if depth == 0 {
            continue;
        }
        let mut columns = Vec::with_capacity(ctor.arity);
        for param in &ctor.param_types {
            columns.push(enumerate_values(symbols, param, depth - 1)?);
        }
        for combo in Product::new(&columns) {
            values.push(Value::ctor(ctor_name, combo));
        }
    }
    Ok(values)
}

/// Odometer over index tuples, last position fastest.
#[derive(Debug)]
struct Odometer {
    sizes: Vec<usize>,
    indices: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(sizes: Vec<usize>) -> Odometer {
        let done = sizes.contains(&0);
        Odometer { indices: vec![0; sizes.len()], sizes, done }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.indices.clone();
        self.done = true;
        for pos in (0..self.sizes.len()).rev() {
            self.indices[pos] += 1;
            if self.indices[pos] < self.sizes[pos] {
                self.done = false;
                break;
            }
            self.indices[pos] = 0;
        }
        Some(current)
    }
}

struct Product<'a> {
    columns: &'a [Vec<Value>],
    odometer: Odometer,
}

impl<'a> Product<'a> {
    fn new(columns: &'a [Vec<Value>]) -> Product<'a> {
        Product { columns, odometer: Odometer::new(columns.iter().map(Vec::len).collect()) }
    }
}

impl Iterator for Product<'_> {
    type Item = Vec<Value>;

    fn next(&mut self) -> Option<Vec<Value>> {
        let indices = self.odometer.next()?;
        Some(indices.iter().zip(self.columns).map(|(&i, c)| c[i].clone()).collect())
    }
}

/// Lazily enumerated bindings for a lemma's binders.
#[derive(Debug)]
pub struct SampleIter {
    names: Vec<String>,
    columns: Vec<Vec<Value>>,
    odometer: Odometer,
    total: usize,
}

impl SampleIter {
    /// Number of bindings the iterator yields in total.
    pub fn total(&self) -> usize {
        self.total
    }
}

impl Iterator for SampleIter {
    type Item = Binding;

    fn next(&mut self) -> Option<Binding> {
        let indices = self.odometer.next()?;
        Some(
            self.names
                .iter()
                .zip(indices.iter().zip(&self.columns))
                .map(|(n, (&i, c))| (n.clone(), c[i].clone()))
                .collect(),
        )
    }
}

/// All bindings of the form's binders up to `depth`, refusing more than `max_instances`.
pub fn lemma_samples(
    form: &LemmaForm,
    symbols: &SymbolTable,
    depth: u32,
    max_instances: usize,
) -> Result<SampleIter, String> {
    let mut columns = Vec::new();
    let mut total: usize = 1;
    for (_, ty) in &form.binders {
        let values = enumerate_values(symbols, ty, depth)?;
        total = total
            .checked_mul(values.len())
            .filter(|&t| t <= max_instances)
            .ok_or_else(|| format!("more than {max_instances} instances at depth {depth}"))?;
        columns.push(values);
    }
    Ok(SampleIter {
        names: form.binders.iter().map(|(n, _)| n.clone()).collect(),
        odometer: Odometer::new(columns.iter().map(Vec::len).collect()),
        total,
        columns,
    })
}

/// Evaluates both sides of `lemma` under every binding in `samples` and
/// reports the first counterexample. Statements outside the testable form
/// are reported as untestable.
pub fn check_lemma_instances(
    program: &Program,
    symbols: &SymbolTable,
    lemma: &LemmaDecl,
    samples: impl IntoIterator<Item = Binding>,
) -> LemmaReport {
    let outcome = match parse_lemma_form(&lemma.statement_text, symbols) {
        Ok(form) => run_instances(program, symbols, &form, samples),
        Err(reason) => LemmaOutcome::Untestable { reason },
    };
    LemmaReport { name: lemma.name.clone(), outcome }
}

fn run_instances(
    program: &Program,
    symbols: &SymbolTable,
    form: &LemmaForm,
    samples: impl IntoIterator<Item = Binding>,
) -> LemmaOutcome {
    let interp = Interpreter::new(program, symbols);
    let mut cache = CallCache::with_limit(CACHE_LIMIT);
    let mut instances = 0;
    for binding in samples {
        let lhs = interp.eval_term(&form.lhs, &binding, Some(&mut cache));
        let rhs = interp.eval_term(&form.rhs, &binding, Some(&mut cache));
        let (lhs, rhs) = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => {
                return LemmaOutcome::Error { binding, message: e.to_string() };
            }
        };
        let holds = match form.comparison {
            Comparison::Eq => lhs == rhs,
            Comparison::Gt | Comparison::Lt => match (lhs.as_nat(), rhs.as_nat()) {
                (Some(l), Some(r)) if form.comparison == Comparison::Gt => l > r,
                (Some(l), Some(r)) => l < r,
                _ => {
                    return LemmaOutcome::Error {
                        binding,
                        message: "ordering comparison on non-numbers".to_string(),
                    }
                }
            },
        };
        if !holds {
            return LemmaOutcome::Fail { counterexample: binding, lhs, rhs };
        }
        instances += 1;
    }
    LemmaOutcome::Pass { instances }
}
