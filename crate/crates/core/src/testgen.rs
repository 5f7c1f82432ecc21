//! Seeded generator of well-formed source programs for property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain binder names, each of which can be renamed consistently.
pub const PLAIN_BINDERS: &[&str] = &["a", "b", "x", "y", "m1"];
/// Names that need escaping in the target.
pub const AWKWARD_BINDERS: &[&str] = &["type", "val", "x'", "Xs"];

pub struct Generated {
    pub source: String,
    pub constructors: Vec<(String, usize)>,
}

struct Gen<'r> {
    rng: ChaCha8Rng,
    rename: &'r dyn Fn(&str) -> String,
    out: String,
}

#[derive(Clone)]
struct Scope {
    /// nat-typed variables in scope.
    nats: Vec<String>,
    /// Tree-typed variables in scope.
    trees: Vec<String>,
}

/// A program with one inductive type `T0` and a few functions over it.
/// `rename` is applied to every plain binder name.
pub fn program(seed: u64, rename: &dyn Fn(&str) -> String) -> Generated {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), rename, out: String::new() };
    let constructors = g.inductive();
    g.functions(&constructors);
    Generated { source: g.out, constructors }
}

pub fn identity(name: &str) -> String {
    name.to_string()
}

impl Gen<'_> {
    fn binder(&mut self, taken: &[String]) -> String {
        loop {
            let name = if self.rng.gen_bool(0.8) {
                (self.rename)(PLAIN_BINDERS.choose(&mut self.rng).unwrap())
            } else {
                AWKWARD_BINDERS.choose(&mut self.rng).unwrap().to_string()
            };
            if !taken.contains(&name) {
                return name;
            }
        }
    }

    fn space(&mut self) -> &'static str {
        [" ", " ", "\n  ", "  "].choose(&mut self.rng).unwrap()
    }

    fn inductive(&mut self) -> Vec<(String, usize)> {
        let count = self.rng.gen_range(1..=4);
        self.out.push_str("Inductive T0 : Type :=");
        let mut ctors = Vec::new();
        for i in 0..count {
            let arity = if i == 0 { 0 } else { self.rng.gen_range(0..=3) };
            let name = format!("C{i}");
            self.out.push_str(&format!("\n| {name}"));
            for j in 0..arity {
                let ty = if self.rng.gen_bool(0.5) { "T0" } else { "nat" };
                self.out.push_str(&format!(" (f{i}_{j} : {ty})"));
            }
            if self.rng.gen_bool(0.5) {
                self.out.push_str(" : T0");
            }
            ctors.push((name, arity));
        }
        self.out.push_str(".\n\n");
        ctors
    }

    fn functions(&mut self, ctors: &[(String, usize)]) {
        let field_types = self.field_types(ctors);
        let k = (self.rename)("k");
        self.out.push_str(&format!("Fixpoint walk (t : T0) ({k} : nat) : nat :=\n  match t with"));
        let scope = Scope { nats: vec![k.clone()], trees: vec![] };
        let wildcard_from = if self.rng.gen_bool(0.3) { self.rng.gen_range(0..ctors.len()) } else { ctors.len() };
        for (i, (name, arity)) in ctors.iter().enumerate().take(wildcard_from) {
            let mut arm_scope = scope.clone();
            let mut taken = vec![k.clone()];
            let mut pattern = name.clone();
            for &is_tree in field_types[i].iter().take(*arity) {
                let b = if self.rng.gen_bool(0.2) { "_".to_string() } else { self.binder(&taken) };
                pattern.push(' ');
                pattern.push_str(&b);
                if b != "_" {
                    taken.push(b.clone());
                    if is_tree {
                        arm_scope.trees.push(b);
                    } else {
                        arm_scope.nats.push(b);
                    }
                }
            }
            let body = self.term(&arm_scope, 3);
            let gap = self.space();
            self.out.push_str(&format!("\n  | {pattern} =>{gap}{body}"));
        }
        if wildcard_from < ctors.len() {
            let body = self.term(&scope, 2);
            self.out.push_str(&format!("\n  | _ => {body}"));
        }
        self.out.push_str("\n  end.\n\n");

        let n = (self.rename)("n");
        let scope = Scope { nats: vec![n.clone()], trees: vec![] };
        let body = self.term(&scope, 3);
        let gap = self.space();
        self.out.push_str(&format!("Definition calc ({n} : nat) : nat :={gap}{body}.\n"));
        if self.rng.gen_bool(0.5) {
            self.out.push_str("\nLemma calc_refl: forall n : nat, calc n = calc n.\n");
        }
    }

    /// For each constructor, whether each field is `T0` (true) or `nat`.
    fn field_types(&self, ctors: &[(String, usize)]) -> Vec<Vec<bool>> {
        let mut result = Vec::new();
        for line in self.out.lines().filter(|l| l.starts_with('|')) {
            let fields: Vec<bool> = line.split('(').skip(1).map(|f| f.contains(": T0)")).collect();
            result.push(fields);
        }
        assert_eq!(result.len(), ctors.len());
        result
    }

    fn term(&mut self, scope: &Scope, depth: u32) -> String {
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..9) };
        match choice {
            0 => self.rng.gen_range(0..20u32).to_string(),
            1 => scope.nats.choose(&mut self.rng).unwrap().clone(),
            2..=4 => {
                let op = ["+", "-", "*"].choose(&mut self.rng).unwrap();
                let l = self.term(scope, depth - 1);
                let r = self.term(scope, depth - 1);
                let r = if r.contains(' ') { format!("({r})") } else { r };
                format!("{l} {op} {r}")
            }
            5 => format!("({})", self.term(scope, depth - 1)),
            6 if !scope.trees.is_empty() => {
                let t = scope.trees.choose(&mut self.rng).unwrap().clone();
                let arg = self.term(scope, depth - 1);
                format!("walk {t} ({arg})")
            }
            7 => {
                let arg = self.term(scope, depth - 1);
                format!("S ({arg})")
            }
            8 => {
                let scrutinee = scope.nats.choose(&mut self.rng).unwrap().clone();
                let mut inner = scope.clone();
                let taken: Vec<String> = scope.nats.iter().chain(&scope.trees).cloned().collect();
                let p = self.binder(&taken);
                inner.nats.push(p.clone());
                let zero = if self.rng.gen_bool(0.5) { "O".to_string() } else { "0".to_string() };
                let a = self.term(scope, depth - 1);
                let b = self.term(&inner, depth - 1);
                format!("(match {scrutinee} with | {zero} => {a} | S {p} => {b} end)")
            }
            _ => scope.nats[0].clone(),
        }
    }
}

