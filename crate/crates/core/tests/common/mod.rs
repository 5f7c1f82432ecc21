//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use gallina_scala::interpreter::Value;
use gallina_scala::{analyze, parse_program, tokenize, Program, SymbolTable};
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("corpus")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Corpus `.v` files in name order.
pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "v"))
        .collect();
    files.sort();
    files
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn parse(src: &str) -> Program {
    let parsed = parse_program(&tokenize(src).expect("lexes"));
    assert!(!parsed.has_errors(), "{:?}", parsed.diagnostics);
    parsed.program
}

pub fn load(src: &str) -> (Program, SymbolTable) {
    let program = parse(src);
    let symbols = analyze(&program).expect("analyzes").symbols;
    (program, symbols)
}

/// Binary tree built independently of the interpreter's value type.
#[derive(Clone, Debug)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn count(&self) -> u64 {
        match self {
            Shape::Leaf => 1,
            Shape::Node(l, r) => 1 + l.count() + r.count(),
        }
    }

    pub fn full(depth: u32) -> Shape {
        if depth == 0 {
            Shape::Leaf
        } else {
            Shape::Node(Box::new(Shape::full(depth - 1)), Box::new(Shape::full(depth - 1)))
        }
    }

    /// Random tree with exactly `nodes` nodes; `nodes` must be odd.
    pub fn random(rng: &mut impl Rng, nodes: u64) -> Shape {
        assert!(nodes % 2 == 1);
        if nodes == 1 {
            return Shape::Leaf;
        }
        let inner = (nodes - 1) / 2;
        let left = rng.gen_range(0..inner);
        Shape::Node(Box::new(Shape::random(rng, 2 * left + 1)), Box::new(Shape::random(rng, 2 * (inner - left - 1) + 1)))
    }

    pub fn to_value(&self) -> Value {
        match self {
            Shape::Leaf => Value::ctor("Leaf", vec![]),
            Shape::Node(l, r) => Value::ctor("Node", vec![l.to_value(), r.to_value()]),
        }
    }
}

/// 1-based line and column of the first occurrence of `needle`.
pub fn position_of(text: &str, needle: &str) -> (u32, u32) {
    let offset = text.find(needle).unwrap_or_else(|| panic!("{needle:?} not found"));
    let before = &text[..offset];
    let line = before.matches('\n').count() as u32 + 1;
    let col = before.rsplit('\n').next().unwrap().chars().count() as u32 + 1;
    (line, col)
}
