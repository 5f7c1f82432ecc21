mod common;

use gallina_scala::ast::{Term, Vernacular};
use gallina_scala::{parse_program, tokenize, Span};

fn check_term(term: &Term, parent: Span, src: &str) {
    let span = term.span();
    assert!(parent.contains(&span), "{span} escapes {parent}");
    assert!(span.slice(src).is_some_and(|s| !s.is_empty()), "{span} does not slice");
    match term {
        Term::Var { .. } | Term::NatLit { .. } => {}
        Term::Paren { inner, .. } => check_term(inner, span, src),
        Term::App { func, args, .. } => {
            check_term(func, span, src);
            args.iter().for_each(|a| check_term(a, span, src));
        }
        Term::BinOp { left, right, .. } => {
            check_term(left, span, src);
            check_term(right, span, src);
            assert!(left.span().end() <= right.span().start());
        }
        Term::Match { scrutinee, arms, .. } => {
            check_term(scrutinee, span, src);
            for arm in arms {
                assert!(span.contains(&arm.span));
                assert!(arm.span.contains(&arm.pattern.span()));
                check_term(&arm.body, arm.span, src);
            }
        }
    }
}

fn check_source(src: &str) {
    let program = parse_program(&tokenize(src).unwrap()).program;
    for decl in &program.declarations {
        let outer = decl.span();
        assert!(outer.slice(src).is_some());
        match decl {
            Vernacular::Inductive(d) => {
                for c in &d.constructors {
                    assert!(outer.contains(&c.span));
                    for b in &c.params {
                        assert!(c.span.contains(&b.span));
                    }
                }
            }
            Vernacular::Fixpoint(f) | Vernacular::Definition(f) => {
                for b in &f.params {
                    assert!(outer.contains(&b.span));
                }
                check_term(&f.body, outer, src);
            }
            Vernacular::Lemma(_) => {}
        }
    }
}

#[test]
fn child_spans_nest_in_parents() {
    for path in common::corpus_files() {
        check_source(&common::read(&path));
    }
}

#[test]
fn crlf_keeps_positions() {
    for path in common::corpus_files() {
        let lf = common::read(&path);
        let crlf = lf.replace('\n', "\r\n");
        let a = parse_program(&tokenize(&lf).unwrap()).program;
        let b = parse_program(&tokenize(&crlf).unwrap()).program;
        assert_eq!(a, b, "{}", path.display());
        check_source(&crlf);
    }
}

#[test]
fn tokens_slice_to_lexemes() {
    for path in common::corpus_files() {
        let src = common::read(&path);
        for token in tokenize(&src).unwrap() {
            assert_eq!(token.span.slice(&src), Some(token.lexeme.as_str()));
        }
    }
}
