//! Text rendering: Scala for a [`TargetUnit`], Gallina for a [`Program`].

use std::fmt::Write;

use crate::ast::{
    BinOp, ConstructorDecl, FunctionDecl, InductiveDecl, LemmaDecl, MatchArm, Pattern, Program,
    Term, Vernacular,
};
use crate::codegen::{Helper, MatchCase, TargetExpr, TargetItem, TargetUnit};

const INDENT: &str = "  ";

fn indent(level: usize) -> String {
    INDENT.repeat(level)
}

/// Renders `unit` as one Scala source file (LF line endings, trailing newline).
pub fn render(unit: &TargetUnit) -> String {
    let mut out = format!("object {} {{\n", unit.wrapper_name);
    for item in &unit.items {
        render_item(&mut out, item);
    }
    for helper in &unit.helpers {
        out.push_str(helper_text(*helper));
    }
    out.push_str("}\n");
    out
}

fn helper_text(helper: Helper) -> &'static str {
    match helper {
        Helper::NatSub => {
            "  private def natSub(a: BigInt, b: BigInt): BigInt = if (a < b) 0 else a - b\n"
        }
        Helper::Succ => concat!(
            "  private object S {\n",
            "    def apply(n: BigInt): BigInt = n + 1\n",
            "    def unapply(n: BigInt): Option[BigInt] = if (n > 0) Some(n - 1) else None\n",
            "  }\n",
        ),
    }
}

fn render_item(out: &mut String, item: &TargetItem) {
    let pad = indent(1);
    match item {
        TargetItem::SealedRoot { name } => writeln!(out, "{pad}sealed trait {name}"),
        TargetItem::LeafObject { name, parent } => {
            writeln!(out, "{pad}case object {name} extends {parent}")
        }
        TargetItem::RecordCase { name, fields, parent } => {
            let fields: Vec<String> = fields.iter().map(|(n, t)| format!("{n}: {t}")).collect();
            writeln!(out, "{pad}case class {name}({}) extends {parent}", fields.join(", "))
        }
        TargetItem::SpecComment { text } => writeln!(out, "{pad}/* {text} */"),
        TargetItem::FunctionDef { name, params, return_type, body } => {
            let mut head = format!("{pad}def {name}");
            if !params.is_empty() {
                let params: Vec<String> = params.iter().map(|(n, t)| format!("{n}: {t}")).collect();
                write!(head, "({})", params.join(", ")).unwrap();
            }
            if let Some(ty) = return_type {
                write!(head, ": {ty}").unwrap();
            }
            if let TargetExpr::MatchExpr { .. } = body {
                writeln!(out, "{head} =\n{}{}", indent(2), render_expr(body, 2))
            } else {
                writeln!(out, "{head} = {}", render_expr(body, 1))
            }
        }
    }
    .expect("writing to a String cannot fail");
}

/// `level` is the indentation of the line the expression starts on.
fn render_expr(expr: &TargetExpr, level: usize) -> String {
    match expr {
        TargetExpr::Name(name) => name.clone(),
        TargetExpr::IntLit(n) => n.to_string(),
        TargetExpr::Call { func, args } => {
            let args: Vec<String> = args.iter().map(|a| render_expr(a, level)).collect();
            format!("{}({})", render_expr(func, level), args.join(", "))
        }
        TargetExpr::Infix { op, left, right } => format!(
            "{} {} {}",
            render_expr(left, level),
            op.symbol(),
            render_expr(right, level)
        ),
        TargetExpr::Grouped(inner) => format!("({})", render_expr(inner, level)),
        TargetExpr::MatchExpr { scrutinee, cases } => {
            let mut out = format!("{} match {{\n", render_expr(scrutinee, level));
            for case in cases {
                render_case(&mut out, case, level + 1);
            }
            out.push_str(&indent(level));
            out.push('}');
            out
        }
    }
}

fn render_case(out: &mut String, case: &MatchCase, level: usize) {
    let pad = indent(level);
    if let TargetExpr::MatchExpr { .. } = case.body {
        let body = render_expr(&case.body, level + 1);
        writeln!(out, "{pad}case {} =>\n{}{body}", case.pattern, indent(level + 1)).unwrap();
    } else {
        writeln!(out, "{pad}case {} => {}", case.pattern, render_expr(&case.body, level)).unwrap();
    }
}

/// Prints `program` as Gallina that parses back to an equal program.
pub fn print_source(program: &Program) -> String {
    let decls: Vec<String> = program.declarations.iter().map(print_decl).collect();
    decls.join("\n")
}

fn print_decl(decl: &Vernacular) -> String {
    match decl {
        Vernacular::Inductive(d) => print_inductive(d),
        Vernacular::Fixpoint(d) => print_function("Fixpoint", d),
        Vernacular::Definition(d) => print_function("Definition", d),
        Vernacular::Lemma(LemmaDecl { name, statement_text, .. }) => {
            format!("Lemma {name}: {statement_text}.\n")
        }
    }
}

fn print_inductive(decl: &InductiveDecl) -> String {
    let mut out = format!("Inductive {} : Type :=\n", decl.name);
    let ctors: Vec<String> = decl.constructors.iter().map(print_constructor).collect();
    out.push_str(&ctors.join("\n"));
    out.push_str(".\n");
    out
}

fn print_constructor(ctor: &ConstructorDecl) -> String {
    let mut out = format!("| {}", ctor.name);
    for b in &ctor.params {
        write!(out, " ({} : {})", b.name, b.ty).unwrap();
    }
    if let Some(ty) = &ctor.result_type {
        write!(out, " : {ty}").unwrap();
    }
    out
}

fn print_function(keyword: &str, decl: &FunctionDecl) -> String {
    let mut out = format!("{keyword} {}", decl.name);
    for b in &decl.params {
        write!(out, " ({} : {})", b.name, b.ty).unwrap();
    }
    if let Some(ty) = &decl.return_type {
        write!(out, " : {ty}").unwrap();
    }
    write!(out, " :=\n  {}.\n", print_term(&decl.body, Level::Sum, 1)).unwrap();
    out
}

/// Binding strength of the context a term is printed in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Product,
    App,
    Atom,
}

fn print_term(term: &Term, context: Level, depth: usize) -> String {
    let (own, text) = match term {
        Term::Var { name, .. } => (Level::Atom, name.clone()),
        Term::NatLit { value, .. } => (Level::Atom, value.to_string()),
        Term::Paren { inner, .. } => (Level::Atom, format!("({})", print_term(inner, Level::Sum, depth))),
        Term::App { func, args, .. } => {
            let mut text = print_term(func, Level::Atom, depth);
            for arg in args {
                text.push(' ');
                text.push_str(&print_term(arg, Level::Atom, depth));
            }
            (Level::App, text)
        }
        Term::BinOp { op, left, right, .. } => {
            let (own, right_level) = match op {
                BinOp::Add | BinOp::Sub => (Level::Sum, Level::Product),
                BinOp::Mul => (Level::Product, Level::App),
            };
            let text = format!(
                "{} {} {}",
                print_term(left, own, depth),
                op.symbol(),
                print_term(right, right_level, depth)
            );
            (own, text)
        }
        Term::Match { scrutinee, arms, .. } => (Level::Atom, print_match(scrutinee, arms, depth)),
    };
    if own < context {
        format!("({text})")
    } else {
        text
    }
}

fn print_match(scrutinee: &Term, arms: &[MatchArm], depth: usize) -> String {
    let pad = indent(depth);
    let mut out = format!("match {} with\n", print_term(scrutinee, Level::Sum, depth));
    for arm in arms {
        let pattern = match &arm.pattern {
            Pattern::Wildcard { .. } => "_".to_string(),
            Pattern::NatLit { value, .. } => value.to_string(),
            Pattern::Ctor { ctor_name, binders, .. } => {
                std::iter::once(ctor_name.as_str()).chain(binders.iter().map(String::as_str)).collect::<Vec<_>>().join(" ")
            }
        };
        writeln!(out, "{pad}| {pattern} => {}", print_term(&arm.body, Level::Sum, depth + 1)).unwrap();
    }
    out.push_str(&pad);
    out.push_str("end");
    out
}
