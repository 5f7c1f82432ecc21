//! Recursive-descent parser for the supported Gallina commands.
//!
//! The grammar is written with a handful of small combinators over a token
//! cursor (`expect`, `eat`, `many`, `sep_by1`) so that each production
//! reads close to its BNF:
//!
//! ```text
//! program    ::= command*
//! command    ::= inductive | fixpoint | definition | lemma
//! inductive  ::= "Inductive" ident [":" "Type"] ":=" ["|"] ctor ("|" ctor)* "."
//! ctor       ::= ident group* [":" type]
//! group      ::= "(" ident+ ":" type ")"
//! fixpoint   ::= "Fixpoint" ident group+ ":" type ":=" term "."
//! definition ::= "Definition" ident group* [":" type] ":=" term "."
//! lemma      ::= "Lemma" ident ":" token+ "." [proof]
//! proof      ::= "Proof" "." ... ("Qed" | "Defined" | "Admitted") "."
//! type       ::= type_atom ["->" type]
//! term       ::= product (("+" | "-") product)*
//! product    ::= app ("*" app)*
//! app        ::= atom atom*
//! atom       ::= ident | nat | "(" term ")" | match
//! match      ::= "match" term "with" ["|"] arm ("|" arm)* "end"
//! arm        ::= pattern "=>" term
//! pattern    ::= "_" | nat | ident ident*
//! ```

use num_bigint::BigUint;

use crate::ast::{
    BinOp, Binder, ConstructorDecl, Diagnostic, FunctionDecl, InductiveDecl, LemmaDecl, MatchArm,
    Pattern, Phase, Program, Span, Term, TypeExpr, Vernacular,
};
use crate::lexer::{Keyword, Punct, Token, TokenKind};

/// A successfully parsed prefix of the input together with everything reported on the way.
#[derive(Clone, Debug, Default)]
pub struct Parsed {
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

impl Parsed {
    pub fn has_errors(&self) -> bool {
        crate::ast::has_errors(&self.diagnostics)
    }
}

type PResult<T> = Result<T, Diagnostic>;

const PROOF_TERMINATORS: [&str; 3] = ["Qed", "Defined", "Admitted"];

/// Parses a whole file. Errors are per declaration: a malformed command is
/// reported once and parsing resumes at the next command keyword.
pub fn parse_program(tokens: &[Token]) -> Parsed {
    let mut parser = Parser::new(tokens);
    let mut parsed = Parsed::default();
    while !parser.at_end() {
        let start = parser.pos;
        match parser.command(&mut parsed.diagnostics) {
            Ok(Some(decl)) => parsed.program.declarations.push(decl),
            Ok(None) => {}
            Err(diag) => {
                parsed.diagnostics.push(diag);
                parser.recover(start);
            }
        }
    }
    parsed
}

/// Parses a complete term; every token must be consumed.
pub fn parse_term(tokens: &[Token]) -> Result<Term, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let term = parser.term()?;
    parser.expect_end()?;
    Ok(term)
}

/// Parses a `match ... end` expression; every token must be consumed.
pub fn parse_match(tokens: &[Token]) -> Result<Term, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let term = parser.match_expr()?;
    parser.expect_end()?;
    Ok(term)
}

/// Parses one `Lemma name: statement.` command (a trailing proof is ignored).
pub fn parse_lemma(tokens: &[Token]) -> Result<Vernacular, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let lemma = parser.lemma()?;
    Ok(Vernacular::Lemma(lemma))
}

/// Parses a type expression; every token must be consumed.
pub fn parse_type(tokens: &[Token]) -> Result<TypeExpr, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let ty = parser.type_expr()?;
    parser.expect_end()?;
    Ok(ty)
}

/// Token cursor plus the combinators the grammar is built from.
pub(crate) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    pub(crate) fn new(tokens: &'t [Token]) -> Parser<'t> {
        Parser { tokens, pos: 0 }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + offset)
    }

    fn advance(&mut self) -> &'t Token {
        let tok = &self.tokens[self.pos];
        self.pos += 1;
        tok
    }

    fn previous(&self) -> Option<&'t Token> {
        self.pos.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Span just past the last consumed token, or at the first token if none.
    fn end_of_previous(&self) -> Span {
        match (self.previous(), self.peek()) {
            (Some(prev), _) => prev.span.end_point(),
            (None, Some(next)) => next.span,
            (None, None) => Span::point(1, 1),
        }
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.end_of_previous())
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        match self.peek() {
            Some(tok) => Diagnostic::error(
                Phase::Parse,
                tok.span,
                format!("expected {expected}, found `{}`", tok.lexeme),
            ),
            None => Diagnostic::error(
                Phase::Parse,
                self.end_of_previous(),
                format!("expected {expected}, found end of input"),
            ),
        }
    }

    fn check(&self, pred: impl Fn(&Token) -> bool) -> bool {
        self.peek().is_some_and(pred)
    }

    fn check_punct(&self, p: Punct) -> bool {
        self.check(|t| t.is_punct(p))
    }

    fn check_keyword(&self, k: Keyword) -> bool {
        self.check(|t| t.is_keyword(k))
    }

    /// Consumes the next token if it satisfies `pred`.
    fn eat(&mut self, pred: impl Fn(&Token) -> bool) -> Option<&'t Token> {
        if self.check(pred) {
            Some(self.advance())
        } else {
            None
        }
    }

    fn eat_punct(&mut self, p: Punct) -> Option<&'t Token> {
        self.eat(|t| t.is_punct(p))
    }

    fn expect(&mut self, pred: impl Fn(&Token) -> bool, expected: &str) -> PResult<&'t Token> {
        self.eat(pred).ok_or_else(|| self.unexpected(expected))
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<&'t Token> {
        self.expect(|t| t.is_punct(p), &format!("`{}`", p.as_str()))
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<&'t Token> {
        self.expect(|t| t.is_keyword(k), &format!("`{}`", k.as_str()))
    }

    fn expect_ident(&mut self) -> PResult<&'t Token> {
        self.expect(|t| t.kind == TokenKind::Identifier, "identifier")
    }

    /// The terminating `.` of a command; a miss is anchored where the command stopped.
    fn expect_terminator(&mut self, what: &str) -> PResult<&'t Token> {
        if let Some(dot) = self.eat_punct(Punct::Dot) {
            return Ok(dot);
        }
        let found = match self.peek() {
            Some(tok) => format!("`{}`", tok.lexeme),
            None => "end of input".to_string(),
        };
        Err(Diagnostic::error(
            Phase::Parse,
            self.end_of_previous(),
            format!("missing `.` at end of {what}, found {found}"),
        ))
    }

    pub(crate) fn expect_end(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of input")),
        }
    }

    /// Zero or more repetitions of `item`, while `more` holds at the cursor.
    fn many<T>(
        &mut self,
        more: impl Fn(&Self) -> bool,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut items = Vec::new();
        while more(self) {
            items.push(item(self)?);
        }
        Ok(items)
    }

    /// One or more `item`s separated by `sep`.
    fn sep_by1<T>(
        &mut self,
        sep: Punct,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut items = vec![item(self)?];
        while self.eat_punct(sep).is_some() {
            items.push(item(self)?);
        }
        Ok(items)
    }

    /// Skips past a failed command: to the next command keyword, never staying at `start`.
    fn recover(&mut self, start: usize) {
        if self.pos <= start {
            self.pos = start + 1;
        }
        while let Some(tok) = self.peek() {
            if matches!(tok.kind, TokenKind::Keyword(k) if k.starts_command()) {
                break;
            }
            self.pos += 1;
        }
    }

    fn command(&mut self, diagnostics: &mut Vec<Diagnostic>) -> PResult<Option<Vernacular>> {
        let tok = self.peek().expect("command called at end of input");
        match tok.kind {
            TokenKind::Keyword(Keyword::Inductive) => self.inductive().map(Vernacular::Inductive).map(Some),
            TokenKind::Keyword(Keyword::Fixpoint) => self.fixpoint().map(Vernacular::Fixpoint).map(Some),
            TokenKind::Keyword(Keyword::Definition) => {
                self.definition().map(Vernacular::Definition).map(Some)
            }
            TokenKind::Keyword(Keyword::Lemma) => {
                let lemma = self.lemma()?;
                if let Some(warning) = self.skip_proof()? {
                    diagnostics.push(warning);
                }
                Ok(Some(Vernacular::Lemma(lemma)))
            }
            _ if tok.is_ident("Proof") => {
                let warning = self.skip_proof()?.expect("cursor is at `Proof`");
                diagnostics.push(warning);
                Ok(None)
            }
            _ => Err(self.unexpected("`Inductive`, `Fixpoint`, `Definition` or `Lemma`")),
        }
    }

    /// Skips `Proof. ... Qed.` if the cursor is at one.
    fn skip_proof(&mut self) -> PResult<Option<Diagnostic>> {
        let Some(open) = self.eat(|t| t.is_ident("Proof")) else {
            return Ok(None);
        };
        loop {
            match self.peek() {
                None => {
                    return Err(Diagnostic::error(
                        Phase::Parse,
                        open.span,
                        "proof is missing its closing `Qed.`",
                    ))
                }
                Some(tok)
                    if tok.kind == TokenKind::Identifier
                        && PROOF_TERMINATORS.contains(&tok.lexeme.as_str())
                        && self.peek_at(1).is_some_and(|t| t.is_punct(Punct::Dot)) =>
                {
                    self.advance();
                    let dot = self.advance();
                    return Ok(Some(Diagnostic::warning(
                        Phase::Parse,
                        open.span.merge(dot.span),
                        "proof script skipped",
                    )));
                }
                Some(_) => {
                    self.advance();
                }
            }
        }
    }

    fn inductive(&mut self) -> PResult<InductiveDecl> {
        let start = self.expect_keyword(Keyword::Inductive)?.span;
        let name = self.expect_ident()?;
        if self.eat_punct(Punct::Colon).is_some() {
            self.expect_keyword(Keyword::Type)?;
        }
        self.expect_punct(Punct::ColonEq)?;
        self.eat_punct(Punct::Bar);
        let constructors = self.sep_by1(Punct::Bar, |p| p.constructor(&name.lexeme))?;
        let dot = self.expect_terminator("inductive declaration")?;
        Ok(InductiveDecl { name: name.lexeme.clone(), constructors, span: start.merge(dot.span) })
    }

    fn constructor(&mut self, owner: &str) -> PResult<ConstructorDecl> {
        let name = self.expect(|t| t.kind == TokenKind::Identifier, "constructor name")?;
        let groups = self.many(|p| p.check_punct(Punct::LParen), Parser::binder_group)?;
        let params: Vec<Binder> = groups.into_iter().flatten().collect();
        let result_type = if self.eat_punct(Punct::Colon).is_some() {
            let ty = self.type_expr()?;
            if ty.as_named() != Some(owner) {
                return Err(Diagnostic::error(
                    Phase::Parse,
                    ty.span(),
                    format!("constructor {} must produce {owner}, found {ty}", name.lexeme),
                ));
            }
            Some(ty)
        } else {
            None
        };
        let span = name.span.merge(self.previous().map_or(name.span, |t| t.span));
        Ok(ConstructorDecl { name: name.lexeme.clone(), params, result_type, span })
    }

    /// `( a b : T )`, flattened into one binder per name.
    fn binder_group(&mut self) -> PResult<Vec<Binder>> {
        let open = self.expect_punct(Punct::LParen)?;
        let names = {
            let first = self.expect_ident()?;
            let mut names = vec![first];
            names.extend(self.many(
                |p| p.check(|t| t.kind == TokenKind::Identifier),
                |p| Ok(p.advance()),
            )?);
            names
        };
        self.expect_punct(Punct::Colon)?;
        let ty = self.type_expr()?;
        let close = self.expect_punct(Punct::RParen)?;
        let span = open.span.merge(close.span);
        Ok(names
            .into_iter()
            .map(|n| Binder { name: n.lexeme.clone(), ty: ty.clone(), span })
            .collect())
    }

    fn binder_groups(&mut self) -> PResult<Vec<Binder>> {
        let groups = self.many(|p| p.check_punct(Punct::LParen), Parser::binder_group)?;
        Ok(groups.into_iter().flatten().collect())
    }

    pub(crate) fn advance_token(&mut self) {
        self.advance();
    }

    /// Binders after `forall`, through the closing `,`: either `a b : T` or `(a : T) (b : U)`.
    pub(crate) fn forall_binders(&mut self) -> PResult<Vec<(String, TypeExpr)>> {
        let binders: Vec<Binder> = if self.check_punct(Punct::LParen) {
            self.binder_groups()?
        } else {
            let first = self.expect_ident()?;
            let mut names = vec![first];
            names.extend(self.many(
                |p| p.check(|t| t.kind == TokenKind::Identifier),
                |p| Ok(p.advance()),
            )?);
            self.expect_punct(Punct::Colon)?;
            let ty = self.type_expr()?;
            names.into_iter().map(|n| Binder { name: n.lexeme.clone(), ty: ty.clone(), span: n.span }).collect()
        };
        self.expect_punct(Punct::Comma)?;
        Ok(binders.into_iter().map(|b| (b.name, b.ty)).collect())
    }

    fn fixpoint(&mut self) -> PResult<FunctionDecl> {
        let start = self.expect_keyword(Keyword::Fixpoint)?.span;
        let name = self.expect_ident()?;
        if !self.check_punct(Punct::LParen) {
            return Err(self.unexpected("parameter group `(x : T)`"));
        }
        let params = self.binder_groups()?;
        self.expect_punct(Punct::Colon)?;
        let return_type = self.type_expr()?;
        self.expect_punct(Punct::ColonEq)?;
        let body = self.term()?;
        let dot = self.expect_terminator("fixpoint")?;
        Ok(FunctionDecl {
            name: name.lexeme.clone(),
            params,
            return_type: Some(return_type),
            body,
            span: start.merge(dot.span),
        })
    }

    fn definition(&mut self) -> PResult<FunctionDecl> {
        let start = self.expect_keyword(Keyword::Definition)?.span;
        let name = self.expect_ident()?;
        let params = self.binder_groups()?;
        let return_type = match self.eat_punct(Punct::Colon) {
            Some(_) => Some(self.type_expr()?),
            None => None,
        };
        self.expect_punct(Punct::ColonEq)?;
        let body = self.term()?;
        let dot = self.expect_terminator("definition")?;
        Ok(FunctionDecl {
            name: name.lexeme.clone(),
            params,
            return_type,
            body,
            span: start.merge(dot.span),
        })
    }

    fn lemma(&mut self) -> PResult<LemmaDecl> {
        let start = self.expect_keyword(Keyword::Lemma)?.span;
        let name = self.expect_ident()?;
        let colon = self.expect_punct(Punct::Colon)?;
        let mut words = Vec::new();
        while let Some(tok) = self.peek() {
            if tok.is_punct(Punct::Dot) {
                break;
            }
            if matches!(tok.kind, TokenKind::Keyword(k) if k.starts_command()) {
                break;
            }
            words.push(tok.lexeme.as_str());
            self.advance();
        }
        if words.is_empty() && self.check_punct(Punct::Dot) {
            return Err(Diagnostic::error(
                Phase::Parse,
                colon.span.end_point(),
                format!("lemma {} has an empty statement", name.lexeme),
            ));
        }
        let dot = self.expect_terminator("lemma")?;
        Ok(LemmaDecl {
            name: name.lexeme.clone(),
            statement_text: words.join(" "),
            span: start.merge(dot.span),
        })
    }

    pub(crate) fn type_expr(&mut self) -> PResult<TypeExpr> {
        let from = self.type_atom()?;
        if self.eat_punct(Punct::Arrow).is_some() {
            let to = self.type_expr()?;
            let span = from.span().merge(to.span());
            return Ok(TypeExpr::Arrow { from: Box::new(from), to: Box::new(to), span });
        }
        Ok(from)
    }

    fn type_atom(&mut self) -> PResult<TypeExpr> {
        if let Some(open) = self.eat_punct(Punct::LParen) {
            let inner = self.type_expr()?;
            let close = self.expect_punct(Punct::RParen)?;
            return Ok(match inner {
                TypeExpr::Named { name, .. } => {
                    TypeExpr::Named { name, span: open.span.merge(close.span) }
                }
                TypeExpr::Arrow { from, to, .. } => {
                    TypeExpr::Arrow { from, to, span: open.span.merge(close.span) }
                }
            });
        }
        let name = self.expect(|t| t.kind == TokenKind::Identifier, "type")?;
        Ok(TypeExpr::Named { name: name.lexeme.clone(), span: name.span })
    }

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let mut left = self.product()?;
        loop {
            let op = if self.eat_punct(Punct::Plus).is_some() {
                BinOp::Add
            } else if self.eat_punct(Punct::Minus).is_some() {
                BinOp::Sub
            } else {
                return Ok(left);
            };
            let right = self.operand(op)?;
            let span = left.span().merge(right.span());
            left = Term::BinOp { op, left: Box::new(left), right: Box::new(right), span };
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut left = self.application()?;
        while self.eat_punct(Punct::Star).is_some() {
            let right = self.operand(BinOp::Mul)?;
            let span = left.span().merge(right.span());
            left = Term::BinOp { op: BinOp::Mul, left: Box::new(left), right: Box::new(right), span };
        }
        Ok(left)
    }

    /// Right operand of a binary operator; reports a dangling operator on a miss.
    fn operand(&mut self, op: BinOp) -> PResult<Term> {
        if !self.starts_atom() {
            let op_span = self.previous().map(|t| t.span).unwrap_or_else(|| self.here());
            let found = match self.peek() {
                Some(tok) => format!("`{}`", tok.lexeme),
                None => "end of input".to_string(),
            };
            return Err(Diagnostic::error(
                Phase::Parse,
                op_span,
                format!("dangling operator `{}`: expected a term, found {found}", op.symbol()),
            ));
        }
        match op {
            BinOp::Mul => self.application(),
            BinOp::Add | BinOp::Sub => self.product(),
        }
    }

    fn starts_atom(&self) -> bool {
        self.check(|t| match t.kind {
            TokenKind::Identifier => t.lexeme != "_",
            TokenKind::NaturalLiteral => true,
            TokenKind::Punct(Punct::LParen) => true,
            TokenKind::Keyword(Keyword::Match) => true,
            _ => false,
        })
    }

    fn application(&mut self) -> PResult<Term> {
        let head = self.atom()?;
        let args = self.many(Parser::starts_atom, Parser::atom)?;
        if args.is_empty() {
            return Ok(head);
        }
        let span = head.span().merge(args.last().unwrap().span());
        Ok(Term::App { func: Box::new(head), args, span })
    }

    fn atom(&mut self) -> PResult<Term> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected("a term"));
        };
        match tok.kind {
            TokenKind::Identifier if tok.lexeme == "_" => Err(Diagnostic::error(
                Phase::Parse,
                tok.span,
                "`_` is only allowed in patterns",
            )),
            TokenKind::Identifier => {
                self.advance();
                Ok(Term::Var { name: tok.lexeme.clone(), span: tok.span })
            }
            TokenKind::NaturalLiteral => {
                self.advance();
                Ok(Term::NatLit { value: parse_nat(&tok.lexeme), span: tok.span })
            }
            TokenKind::Punct(Punct::LParen) => {
                let open = self.advance();
                let inner = self.term()?;
                let close = self.expect_punct(Punct::RParen)?;
                Ok(Term::Paren { inner: Box::new(inner), span: open.span.merge(close.span) })
            }
            TokenKind::Keyword(Keyword::Match) => self.match_expr(),
            _ => Err(self.unexpected("a term")),
        }
    }

    fn match_expr(&mut self) -> PResult<Term> {
        let start = self.expect_keyword(Keyword::Match)?.span;
        let scrutinee = self.term()?;
        self.expect_keyword(Keyword::With)?;
        if self.check_keyword(Keyword::End) {
            return Err(Diagnostic::error(Phase::Parse, self.here(), "match has no arms"));
        }
        self.eat_punct(Punct::Bar);
        let arms = self.sep_by1(Punct::Bar, Parser::arm)?;
        let end = self.expect_keyword(Keyword::End)?;
        Ok(Term::Match { scrutinee: Box::new(scrutinee), arms, span: start.merge(end.span) })
    }

    fn arm(&mut self) -> PResult<MatchArm> {
        let pattern = self.pattern()?;
        self.expect_punct(Punct::FatArrow)?;
        let body = self.term()?;
        let span = pattern.span().merge(body.span());
        Ok(MatchArm { pattern, body, span })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected("a pattern"));
        };
        match tok.kind {
            TokenKind::Identifier if tok.lexeme == "_" => {
                self.advance();
                Ok(Pattern::Wildcard { span: tok.span })
            }
            TokenKind::Identifier => {
                self.advance();
                let binders = self.many(
                    |p| p.check(|t| t.kind == TokenKind::Identifier),
                    |p| Ok(p.advance()),
                )?;
                let span = binders.last().map_or(tok.span, |b| tok.span.merge(b.span));
                Ok(Pattern::Ctor {
                    ctor_name: tok.lexeme.clone(),
                    binders: binders.into_iter().map(|b| b.lexeme.clone()).collect(),
                    span,
                })
            }
            TokenKind::NaturalLiteral => {
                self.advance();
                Ok(Pattern::NatLit { value: parse_nat(&tok.lexeme), span: tok.span })
            }
            _ => Err(self.unexpected("a pattern")),
        }
    }
}

fn parse_nat(digits: &str) -> BigUint {
    digits.parse().expect("lexer only produces decimal digit runs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::BinOp::{Add, Mul};
    use crate::lexer::tokenize;
    use proptest::prelude::*;

    const TREE_SRC: &str = "Inductive Tree : Type :=
  Leaf : Tree
| Node(l r : Tree): Tree.

Fixpoint size (t: Tree) : nat :=
match t with
  Leaf => 1
| Node l r => 1 + (size l) + (size r)
end.
";

    fn program(src: &str) -> Parsed {
        parse_program(&tokenize(src).unwrap())
    }

    fn term(src: &str) -> Term {
        parse_term(&tokenize(src).unwrap()).unwrap()
    }

    fn norm(t: Term) -> Term {
        let p = Program {
            declarations: vec![Vernacular::Definition(FunctionDecl {
                name: "x".into(),
                params: vec![],
                return_type: None,
                body: t,
                span: Span::default(),
            })],
        };
        match p.normalized().declarations.pop() {
            Some(Vernacular::Definition(d)) => d.body,
            _ => unreachable!(),
        }
    }

    fn strip_spans(t: &Term) -> Term {
        // Keeps Paren nodes; only spans are zeroed.
        match t {
            Term::Var { name, .. } => Term::var(name.clone()),
            Term::NatLit { value, .. } => Term::NatLit { value: value.clone(), span: Span::default() },
            Term::App { func, args, .. } => Term::app(strip_spans(func), args.iter().map(strip_spans).collect()),
            Term::BinOp { op, left, right, .. } => Term::binop(*op, strip_spans(left), strip_spans(right)),
            Term::Paren { inner, .. } => Term::paren(strip_spans(inner)),
            Term::Match { .. } => norm(t.clone()),
        }
    }

    #[test]
    fn tree_program() {
        let parsed = program(TREE_SRC);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let decls = &parsed.program.declarations;
        assert_eq!(decls.len(), 2);
        let Vernacular::Inductive(tree) = &decls[0] else { panic!() };
        assert_eq!(tree.name, "Tree");
        let ctors: Vec<_> = tree.constructors.iter().map(|c| (c.name.as_str(), c.arity())).collect();
        assert_eq!(ctors, [("Leaf", 0), ("Node", 2)]);
        let node = &tree.constructors[1];
        assert_eq!(node.params[0].name, "l");
        assert_eq!(node.params[1].name, "r");
        assert!(node.params.iter().all(|b| b.ty.as_named() == Some("Tree")));

        let Vernacular::Fixpoint(size) = &decls[1] else { panic!() };
        assert_eq!(size.name, "size");
        assert_eq!(size.params.len(), 1);
        assert_eq!(size.params[0].name, "t");
        assert_eq!(size.return_type.as_ref().and_then(|t| t.as_named()), Some("nat"));
        let Term::Match { scrutinee, arms, .. } = &size.body else { panic!() };
        assert_eq!(**scrutinee, Term::Var { name: "t".into(), span: Span::new(6, 7, 6, 8) });
        assert_eq!(arms.len(), 2);
        assert!(matches!(&arms[0].pattern, Pattern::Ctor { ctor_name, binders, .. } if ctor_name == "Leaf" && binders.is_empty()));
        assert!(matches!(&arms[1].pattern, Pattern::Ctor { ctor_name, binders, .. } if ctor_name == "Node" && binders == &["l", "r"]));
    }

    #[test]
    fn empty_stream() {
        let parsed = parse_program(&[]);
        assert!(parsed.program.declarations.is_empty());
        assert!(parsed.diagnostics.is_empty());
    }

    #[test]
    fn definition_without_params() {
        let parsed = program("Definition one : nat := 1.");
        assert!(parsed.diagnostics.is_empty());
        let Vernacular::Definition(d) = &parsed.program.declarations[0] else { panic!() };
        assert_eq!(d.name, "one");
        assert!(d.params.is_empty());
        assert_eq!(d.return_type.as_ref().unwrap().as_named(), Some("nat"));
        assert_eq!(norm(d.body.clone()), Term::nat(1));
    }

    #[test]
    fn sum_with_parenthesized_calls() {
        let size = |v: &str| Term::paren(Term::app(Term::var("size"), vec![Term::var(v)]));
        let want = Term::binop(Add, Term::binop(Add, Term::nat(1), size("l")), size("r"));
        assert_eq!(strip_spans(&term("1 + (size l) + (size r)")), want);
    }

    #[test]
    fn single_variable() {
        assert_eq!(strip_spans(&term("x")), Term::var("x"));
    }

    #[test]
    fn application_binds_tightest() {
        // Hand-derived by precedence climbing: app > * > +.
        let want = Term::binop(
            Add,
            Term::app(Term::var("f"), vec![Term::var("a"), Term::var("b")]),
            Term::binop(Mul, Term::nat(2), Term::app(Term::var("g"), vec![Term::var("c")])),
        );
        assert_eq!(strip_spans(&term("f a b + 2 * g c")), want);
    }

    #[test]
    fn minus_is_left_associative_with_plus() {
        let want = Term::binop(
            Add,
            Term::binop(BinOp::Sub, Term::var("a"), Term::var("b")),
            Term::var("c"),
        );
        assert_eq!(strip_spans(&term("a - b + c")), want);
    }

    #[test]
    fn term_errors() {
        assert!(parse_term(&[]).unwrap_err().message.contains("expected a term"));
        let err = parse_term(&tokenize("1 +").unwrap()).unwrap_err();
        assert!(err.message.contains("dangling operator `+`"), "{}", err.message);
        assert_eq!(err.span, Span::new(1, 3, 1, 4));
        let err = parse_term(&tokenize("2 * )").unwrap()).unwrap_err();
        assert!(err.message.contains("dangling operator `*`"));
    }

    #[test]
    fn single_wildcard_arm() {
        let t = parse_match(&tokenize("match x with _ => 0 end").unwrap()).unwrap();
        let Term::Match { scrutinee, arms, .. } = norm(t) else { panic!() };
        assert_eq!(*scrutinee, Term::var("x"));
        assert_eq!(arms.len(), 1);
        assert_eq!(arms[0].pattern, Pattern::Wildcard { span: Span::default() });
        assert_eq!(arms[0].body, Term::nat(0));
    }

    #[test]
    fn nat_patterns() {
        let t = parse_match(&tokenize("match n with 0 => 1 | S m => m end").unwrap()).unwrap();
        let Term::Match { arms, .. } = norm(t) else { panic!() };
        assert_eq!(arms[0].pattern, Pattern::NatLit { value: 0u32.into(), span: Span::default() });
        assert_eq!(
            arms[1].pattern,
            Pattern::Ctor { ctor_name: "S".into(), binders: vec!["m".into()], span: Span::default() }
        );
    }

    #[test]
    fn leading_bar_is_optional() {
        let a = parse_match(&tokenize("match x with | A => 0 | B => 1 end").unwrap()).unwrap();
        let b = parse_match(&tokenize("match x with A => 0 | B => 1 end").unwrap()).unwrap();
        assert_eq!(norm(a), norm(b));
    }

    #[test]
    fn match_errors() {
        let err = parse_match(&tokenize("match x with end").unwrap()).unwrap_err();
        assert_eq!(err.message, "match has no arms");
        let err = parse_match(&tokenize("match x with _ => 0").unwrap()).unwrap_err();
        assert_eq!(err.message, "expected `end`, found end of input");
    }

    #[test]
    fn lemma_statement_is_verbatim() {
        let toks = tokenize("Lemma size_left: forall l r : Tree, size (Node l r) > size l.").unwrap();
        let Vernacular::Lemma(l) = parse_lemma(&toks).unwrap() else { panic!() };
        assert_eq!(l.name, "size_left");
        assert_eq!(l.statement_text, "forall l r : Tree , size ( Node l r ) > size l");
    }

    #[test]
    fn trivial_lemma() {
        let Vernacular::Lemma(l) = parse_lemma(&tokenize("Lemma t: 1 = 1.").unwrap()).unwrap() else {
            panic!()
        };
        assert_eq!((l.name.as_str(), l.statement_text.as_str()), ("t", "1 = 1"));
    }

    #[test]
    fn lemma_errors() {
        let err = parse_lemma(&tokenize("Lemma x:.").unwrap()).unwrap_err();
        assert!(err.message.contains("empty statement"));
        assert_eq!(err.span.start(), (1, 9));
        let err = parse_lemma(&tokenize("Lemma x 1 = 1.").unwrap()).unwrap_err();
        assert_eq!(err.message, "expected `:`, found `1`");
        let err = parse_lemma(&tokenize("Lemma x: 1 = 1").unwrap()).unwrap_err();
        assert!(err.message.starts_with("missing `.`"));
    }

    #[test]
    fn standard_constructor_spacing() {
        let a = program("Inductive T := A | B (x y : T) : T.");
        let b = program("Inductive T : Type := | A : T | B(x y : T).");
        assert!(a.diagnostics.is_empty() && b.diagnostics.is_empty());
        assert!(a.program.structural_eq(&b.program));
    }

    #[test]
    fn constructor_result_must_be_owner() {
        let parsed = program("Inductive T := A : nat.");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("must produce T"));
    }

    #[test]
    fn arrow_types_associate_right() {
        let ty = parse_type(&tokenize("nat -> nat -> Tree").unwrap()).unwrap();
        let want = TypeExpr::arrow(
            TypeExpr::named("nat"),
            TypeExpr::arrow(TypeExpr::named("nat"), TypeExpr::named("Tree")),
        );
        assert_eq!(ty.to_string(), want.to_string());
        let ty = parse_type(&tokenize("(nat -> nat) -> nat").unwrap()).unwrap();
        assert_eq!(ty.to_string(), "(nat -> nat) -> nat");
    }

    #[test]
    fn missing_dot_is_anchored_at_declaration_end() {
        let src = "Definition one : nat := 1\nDefinition two : nat := 2.";
        let parsed = program(src);
        assert_eq!(parsed.diagnostics.len(), 1);
        let d = &parsed.diagnostics[0];
        assert!(d.message.starts_with("missing `.` at end of definition"), "{}", d.message);
        assert_eq!(d.span.start(), (1, 26));
        assert_eq!(parsed.program.declarations.len(), 1);
        assert_eq!(parsed.program.declarations[0].name(), "two");
    }

    #[test]
    fn recovery_keeps_other_declarations() {
        let src = "Inductive T := A.\nFixpoint f (x : T) nat := x.\nDefinition g : T := A.\nLemma l: g = A.";
        let parsed = program(src);
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].span.start(), (2, 20));
        let names: Vec<_> = parsed.program.declarations.iter().map(Vernacular::name).collect();
        assert_eq!(names, ["T", "g", "l"]);
    }

    #[test]
    fn stray_tokens_are_one_error() {
        let parsed = program("x y z Definition a : nat := 0.");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.program.declarations.len(), 1);
    }

    #[test]
    fn proofs_are_skipped_with_a_warning() {
        let src = "Lemma t: 1 = 1.\nProof. reflexivity. Qed.\nDefinition a : nat := 0.";
        let parsed = program(src);
        assert!(!parsed.has_errors());
        assert_eq!(parsed.diagnostics.len(), 1);
        assert_eq!(parsed.diagnostics[0].message, "proof script skipped");
        assert_eq!(parsed.program.declarations.len(), 2);
    }

    #[test]
    fn unclosed_proof_is_an_error() {
        let parsed = program("Lemma t: 1 = 1.\nProof. auto.");
        assert!(parsed.has_errors());
    }

    #[test]
    fn fixpoint_needs_parameters() {
        let parsed = program("Fixpoint f : nat := 0.");
        assert_eq!(parsed.diagnostics.len(), 1);
        assert!(parsed.diagnostics[0].message.contains("parameter group"));
    }

    /// Fully parenthesized rendering, used to compare against the oracle.
    fn bracketed(t: &Term) -> String {
        match t {
            Term::Var { name, .. } => name.clone(),
            Term::NatLit { value, .. } => value.to_string(),
            Term::Paren { inner, .. } => bracketed(inner),
            Term::App { func, args, .. } => {
                let args: Vec<String> = args.iter().map(bracketed).collect();
                format!("[{} {}]", bracketed(func), args.join(" "))
            }
            Term::BinOp { op, left, right, .. } => {
                format!("({} {} {})", bracketed(left), op.symbol(), bracketed(right))
            }
            Term::Match { .. } => unreachable!("generator emits no match"),
        }
    }

    /// Shunting-yard over `atom (op atom)*`, independent of the parser.
    fn shunting_yard(atoms: &[String], ops: &[&str]) -> String {
        let prec = |op: &str| if op == "*" { 2 } else { 1 };
        let mut out: Vec<String> = vec![atoms[0].clone()];
        let mut stack: Vec<&str> = Vec::new();
        let reduce = |out: &mut Vec<String>, op: &str| {
            let r = out.pop().unwrap();
            let l = out.pop().unwrap();
            out.push(format!("({l} {op} {r})"));
        };
        for (op, atom) in ops.iter().zip(&atoms[1..]) {
            while let Some(&top) = stack.last() {
                if prec(top) >= prec(op) {
                    reduce(&mut out, stack.pop().unwrap());
                } else {
                    break;
                }
            }
            stack.push(op);
            out.push(atom.clone());
        }
        while let Some(op) = stack.pop() {
            reduce(&mut out, op);
        }
        out.pop().unwrap()
    }

    fn atom() -> impl Strategy<Value = (String, String)> {
        prop_oneof![
            "[a-e]".prop_map(|v| (v.clone(), v)),
            (0u32..100).prop_map(|n| (n.to_string(), n.to_string())),
            ("[f-h]", proptest::collection::vec("[a-e]", 1..3)).prop_map(|(f, args)| {
                (format!("{f} {}", args.join(" ")), format!("[{f} {}]", args.join(" ")))
            }),
        ]
    }

    proptest! {
        #[test]
        fn precedence_matches_shunting_yard(
            first in atom(),
            rest in proptest::collection::vec((prop_oneof![Just("+"), Just("-"), Just("*")], atom()), 0..8),
        ) {
            let mut src = first.0.clone();
            let mut atoms = vec![first.1];
            let mut ops = Vec::new();
            for (op, (text, shape)) in &rest {
                src.push_str(&format!(" {op} {text}"));
                atoms.push(shape.clone());
                ops.push(*op);
            }
            prop_assert_eq!(bracketed(&term(&src)), shunting_yard(&atoms, &ops));
        }
    }
}
