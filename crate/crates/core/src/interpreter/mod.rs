//! Call-by-value evaluator for analyzed programs.
//!
//! Used as the semantic reference for generated code: `+` and `*` are
//! unbounded, `-` truncates at zero, and `match` takes the first arm that
//! fits. Evaluation is bounded by a step budget ("fuel") so that hand-written
//! non-terminating input fails instead of hanging.

pub mod lemma;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::analyzer::{SymbolTable, NAT, SUCC, ZERO};
use crate::ast::{BinOp, FunctionDecl, Pattern, Program, Span, Term, Vernacular};

pub use lemma::{
    check_lemma_instances, enumerate_values, lemma_samples, parse_lemma_form, Binding, Comparison,
    LemmaForm, LemmaOutcome, LemmaReport, SampleIter,
};

pub const DEFAULT_FUEL: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Nat(BigUint),
    Ctor { name: Arc<str>, args: Arc<[Value]> },
    /// A top-level function passed as an argument.
    Function(Arc<str>),
}

impl Value {
    pub fn nat(n: impl Into<BigUint>) -> Value {
        Value::Nat(n.into())
    }

    pub fn ctor(name: &str, args: Vec<Value>) -> Value {
        Value::Ctor { name: Arc::from(name), args: Arc::from(args) }
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Value::Nat(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    /// Gallina syntax, e.g. `Node (Node Leaf Leaf) Leaf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Function(name) => f.write_str(name),
            Value::Ctor { name, args } => {
                f.write_str(name)?;
                for arg in args.iter() {
                    match arg {
                        Value::Ctor { args, .. } if !args.is_empty() => write!(f, " ({arg})")?,
                        _ => write!(f, " {arg}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation ran out of fuel after {0} steps")]
    OutOfFuel(u64),
    #[error("no match arm applies to {value} at {span}")]
    NoMatchingArm { value: String, span: Span },
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("{name} expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("unbound identifier {0}")]
    Unbound(String),
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: &'static str, found: String },
}

type EvalResult = Result<Value, EvalError>;

/// Memo of completed calls, keyed by function and arguments.
///
/// Sound because evaluation is pure. Calls answered from the cache consume no fuel.
#[derive(Debug, Default)]
pub struct CallCache {
    entries: FxHashMap<CallKey, Value>,
    limit: usize,
}

/// Numbers compare by value, constructed values by allocation, so hashing
/// is O(1) per argument. Equal allocations imply equal values, and a key
/// owns its values, so no address is reused while the entry lives. The
/// function name is the interpreter's interned copy.
#[derive(Debug)]
struct CallKey(Arc<str>, Vec<Value>);

fn same_value(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Nat(x), Value::Nat(y)) => x == y,
        (Value::Function(x), Value::Function(y)) => x == y,
        (Value::Ctor { name: n, args: x }, Value::Ctor { name: m, args: y }) => {
            n == m && (Arc::ptr_eq(x, y) || (x.is_empty() && y.is_empty()))
        }
        _ => false,
    }
}

impl PartialEq for CallKey {
    fn eq(&self, other: &CallKey) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            && self.1.len() == other.1.len()
            && self.1.iter().zip(&other.1).all(|(a, b)| same_value(a, b))
    }
}

impl Eq for CallKey {}

impl Hash for CallKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (Arc::as_ptr(&self.0) as *const u8 as usize).hash(state);
        for v in &self.1 {
            match v {
                Value::Nat(n) => n.hash(state),
                Value::Function(name) => name.hash(state),
                Value::Ctor { name, args } => {
                    name.hash(state);
                    if !args.is_empty() {
                        (Arc::as_ptr(args) as *const Value as usize).hash(state);
                    }
                }
            }
        }
    }
}

impl CallCache {
    /// The cache is cleared whenever it grows past `limit` entries.
    pub fn with_limit(limit: usize) -> CallCache {
        CallCache { entries: FxHashMap::default(), limit }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Evaluates `call` on `args` with the default fuel budget.
pub fn eval(program: &Program, symbols: &SymbolTable, call: &str, args: &[Value]) -> EvalResult {
    Interpreter::new(program, symbols).call(call, args)
}

pub struct Interpreter<'p> {
    /// Every global name, resolved once.
    heads: FxHashMap<&'p str, Head<'p>>,
    fuel: u64,
}

#[derive(Clone, Debug)]
enum Head<'p> {
    Zero,
    Succ,
    Ctor { name: Arc<str>, arity: usize },
    Function { name: Arc<str>, decl: &'p FunctionDecl },
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program, symbols: &'p SymbolTable) -> Interpreter<'p> {
        let mut heads = FxHashMap::default();
        for (name, ctor) in &symbols.constructors {
            let head = match name.as_str() {
                ZERO if ctor.owner == NAT => Head::Zero,
                SUCC if ctor.owner == NAT => Head::Succ,
                _ => Head::Ctor { name: Arc::from(name.as_str()), arity: ctor.arity },
            };
            heads.insert(name.as_str(), head);
        }
        for decl in &program.declarations {
            if let Vernacular::Fixpoint(f) | Vernacular::Definition(f) = decl {
                heads.insert(f.name.as_str(), Head::Function { name: Arc::from(f.name.as_str()), decl: f });
            }
        }
        Interpreter { heads, fuel: DEFAULT_FUEL }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Interpreter<'p> {
        self.fuel = fuel;
        self
    }

    pub fn call(&self, name: &str, args: &[Value]) -> EvalResult {
        self.machine(None).call(name, args.to_vec())
    }

    pub fn call_cached(&self, cache: &mut CallCache, name: &str, args: &[Value]) -> EvalResult {
        self.machine(Some(cache)).call(name, args.to_vec())
    }

    /// Evaluates a closed term under `env` (innermost binding last).
    pub fn eval_term(&self, term: &Term, env: &[(String, Value)], cache: Option<&mut CallCache>) -> EvalResult {
        let mut machine = self.machine(cache);
        let mut env: Vec<(&str, Value)> = env.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        machine.term(term, &mut env)
    }

    fn machine<'m>(&'m self, cache: Option<&'m mut CallCache>) -> Machine<'m, 'p> {
        Machine { interp: self, steps: 0, cache }
    }
}

struct Machine<'m, 'p> {
    interp: &'m Interpreter<'p>,
    steps: u64,
    cache: Option<&'m mut CallCache>,
}

/// Local bindings, innermost last.
type Env<'a> = Vec<(&'a str, Value)>;

impl<'m, 'p: 'm> Machine<'m, 'p> {
    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.interp.fuel {
            Err(EvalError::OutOfFuel(self.interp.fuel))
        } else {
            Ok(())
        }
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> EvalResult {
        match self.interp.heads.get(name) {
            Some(Head::Function { name, decl }) => self.call_decl(name, decl, args),
            _ => Err(EvalError::UnknownFunction(name.to_string())),
        }
    }

    fn call_decl(&mut self, key: &Arc<str>, decl: &'p FunctionDecl, args: Vec<Value>) -> EvalResult {
        if decl.params.len() != args.len() {
            return Err(EvalError::Arity {
                name: key.to_string(),
                expected: decl.params.len(),
                found: args.len(),
            });
        }
        if let Some(cache) = self.cache.as_deref_mut() {
            if let Some(hit) = cache.entries.get(&CallKey(key.clone(), args.clone())) {
                return Ok(hit.clone());
            }
        }
        let mut env: Env<'p> =
            decl.params.iter().map(|b| b.name.as_str()).zip(args.iter().cloned()).collect();
        let result = self.term(&decl.body, &mut env)?;
        if let Some(cache) = self.cache.as_deref_mut() {
            if cache.entries.len() >= cache.limit {
                cache.entries.clear();
            }
            cache.entries.insert(CallKey(key.clone(), args), result.clone());
        }
        Ok(result)
    }

    fn term<'a>(&mut self, term: &'a Term, env: &mut Env<'a>) -> EvalResult
    where
        'p: 'a,
    {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.term_inner(term, env))
    }

    fn term_inner<'a>(&mut self, term: &'a Term, env: &mut Env<'a>) -> EvalResult
    where
        'p: 'a,
    {
        self.tick()?;
        match term {
            Term::NatLit { value, .. } => Ok(Value::Nat(value.clone())),
            Term::Paren { inner, .. } => self.term(inner, env),
            Term::Var { name, .. } => self.var(name, env),
            Term::App { func, args, .. } => {
                let values = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                self.apply(func.unparen(), values, env)
            }
            Term::BinOp { op, left, right, .. } => {
                let l = self.nat(left, env)?;
                let r = self.nat(right, env)?;
                Ok(Value::Nat(match op {
                    BinOp::Add => l + r,
                    BinOp::Mul => l * r,
                    BinOp::Sub if l < r => BigUint::zero(),
                    BinOp::Sub => l - r,
                }))
            }
            Term::Match { scrutinee, arms, span } => {
                let value = self.term(scrutinee, env)?;
                for arm in arms {
                    let depth = env.len();
                    if bind_pattern(&arm.pattern, &value, env) {
                        let result = self.term(&arm.body, env);
                        env.truncate(depth);
                        return result;
                    }
                }
                Err(EvalError::NoMatchingArm { value: value.to_string(), span: *span })
            }
        }
    }

    fn nat<'a>(&mut self, term: &'a Term, env: &mut Env<'a>) -> Result<BigUint, EvalError>
    where
        'p: 'a,
    {
        match self.term(term, env)? {
            Value::Nat(n) => Ok(n),
            other => Err(EvalError::Mismatch { expected: "a natural number", found: other.to_string() }),
        }
    }

    fn var(&mut self, name: &str, env: &Env<'_>) -> EvalResult {
        if let Some((_, v)) = env.iter().rev().find(|(n, _)| *n == name) {
            return Ok(v.clone());
        }
        match self.interp.heads.get(name) {
            Some(Head::Zero) => Ok(Value::Nat(BigUint::zero())),
            Some(Head::Ctor { name, arity: 0 }) => Ok(Value::Ctor { name: name.clone(), args: Arc::from([]) }),
            Some(Head::Ctor { arity, .. }) => {
                Err(EvalError::Arity { name: name.to_string(), expected: *arity, found: 0 })
            }
            Some(Head::Succ) => Err(EvalError::Arity { name: name.to_string(), expected: 1, found: 0 }),
            Some(Head::Function { name, decl }) if decl.params.is_empty() => {
                self.call_decl(name, decl, vec![])
            }
            Some(Head::Function { name, .. }) => Ok(Value::Function(name.clone())),
            None => Err(EvalError::Unbound(name.to_string())),
        }
    }

    fn apply(&mut self, head: &Term, mut args: Vec<Value>, env: &Env<'_>) -> EvalResult {
        let Term::Var { name, .. } = head else {
            return Err(EvalError::Mismatch { expected: "a function", found: "an expression".into() });
        };
        if let Some((_, v)) = env.iter().rev().find(|(n, _)| n == name) {
            return self.apply_value(v.clone(), args);
        }
        match self.interp.heads.get(name.as_str()) {
            Some(Head::Succ) => {
                if args.len() != 1 {
                    return Err(EvalError::Arity { name: name.clone(), expected: 1, found: args.len() });
                }
                let n = args.pop().and_then(|v| v.as_nat().cloned()).ok_or_else(|| {
                    EvalError::Mismatch { expected: "a natural number", found: "a constructor".into() }
                })?;
                Ok(Value::Nat(n + BigUint::one()))
            }
            Some(Head::Zero) => Err(EvalError::Arity { name: name.clone(), expected: 0, found: args.len() }),
            Some(Head::Ctor { name: key, arity }) => {
                if *arity != args.len() {
                    return Err(EvalError::Arity { name: name.clone(), expected: *arity, found: args.len() });
                }
                Ok(Value::Ctor { name: key.clone(), args: Arc::from(args) })
            }
            Some(Head::Function { name: key, decl }) => {
                let rest = args.split_off(decl.params.len().min(args.len()));
                let mut result = self.call_decl(key, decl, args)?;
                for arg in rest {
                    result = self.apply_value(result, vec![arg])?;
                }
                Ok(result)
            }
            None => Err(EvalError::Unbound(name.clone())),
        }
    }

    /// Applies a function value; extra arguments go to its result.
    fn apply_value(&mut self, func: Value, mut args: Vec<Value>) -> EvalResult {
        let Value::Function(name) = func else {
            return Err(EvalError::Mismatch { expected: "a function", found: func.to_string() });
        };
        let Some(Head::Function { name: key, decl }) = self.interp.heads.get(&*name) else {
            return Err(EvalError::UnknownFunction(name.to_string()));
        };
        let arity = decl.params.len();
        if args.len() < arity {
            return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: args.len() });
        }
        let rest = args.split_off(arity);
        let mut result = self.call_decl(key, decl, args)?;
        for arg in rest {
            result = self.apply_value(result, vec![arg])?;
        }
        Ok(result)
    }
}

/// Extends `env` with the pattern's bindings if `value` matches.
fn bind_pattern<'a>(pattern: &'a Pattern, value: &Value, env: &mut Env<'a>) -> bool {
    match (pattern, value) {
        (Pattern::Wildcard { .. }, _) => true,
        (Pattern::NatLit { value: k, .. }, Value::Nat(n)) => k == n,
        (Pattern::Ctor { ctor_name, binders, .. }, Value::Nat(n)) => match ctor_name.as_str() {
            ZERO => n.is_zero(),
            SUCC if !n.is_zero() => {
                if let Some(b) = binders.first().filter(|b| *b != "_") {
                    env.push((b.as_str(), Value::Nat(n - BigUint::one())));
                }
                true
            }
            _ => false,
        },
        (Pattern::Ctor { ctor_name, binders, .. }, Value::Ctor { name, args }) => {
            if ctor_name.as_str() != &**name {
                return false;
            }
            for (b, v) in binders.iter().zip(args.iter()) {
                if b != "_" {
                    env.push((b.as_str(), v.clone()));
                }
            }
            true
        }
        _ => false,
    }
}
