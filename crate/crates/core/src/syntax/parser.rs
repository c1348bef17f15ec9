use std::collections::HashSet;

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, Keyword, LexError, Token, TokenKind};
use super::span::Span;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax { span: Span, expected: Vec<String>, found: String },
    #[error("species `{name}` is not terminated by `end;;`")]
    UnterminatedSpecies { span: Span, name: String },
    #[error("duplicate {what} `{name}`")]
    Duplicate { span: Span, what: &'static str, name: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex(e) => Span::new(e.pos(), e.pos() + 1),
            ParseError::Syntax { span, .. }
            | ParseError::UnterminatedSpecies { span, .. }
            | ParseError::Duplicate { span, .. } => *span,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_source(source: &str) -> PResult<SourceUnit> {
    let tokens = tokenize(source)?;
    parse_unit(&tokens, source.len())
}

pub fn parse_unit(tokens: &[Token], source_len: usize) -> PResult<SourceUnit> {
    let mut p = Parser::new(tokens, source_len);
    let mut unit = SourceUnit::default();
    let mut names = HashSet::new();
    while !p.at_eof() {
        let phrase = p.phrase()?;
        let name = phrase.name();
        if !names.insert(name.name.clone()) {
            return Err(ParseError::Duplicate { span: name.span, what: "phrase", name: name.name.clone() });
        }
        unit.phrases.push(phrase);
    }
    Ok(unit)
}

/// Parse a standalone expression, as given to `eval`.
pub fn parse_expr(source: &str) -> PResult<Expr> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(&tokens, source.len());
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a standalone formula.
pub fn parse_formula(source: &str) -> PResult<Formula> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(&tokens, source.len());
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    eof: Span,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], source_len: usize) -> Parser<'t> {
        Parser { tokens, pos: 0, eof: Span::new(source_len, source_len) }
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn since(&self, start: Span) -> Span {
        Span::new(start.start, self.prev_end().max(start.start))
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        Err(ParseError::Syntax {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        })
    }

    fn is(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn is_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Kw(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.is(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Kw(kw))
    }

    fn expect(&mut self, kind: &TokenKind) -> PResult<Span> {
        if self.is(kind) {
            Ok(self.bump().span)
        } else {
            self.error(&[&kind.to_string()])
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<Span> {
        self.expect(&TokenKind::Kw(kw))
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let span = self.bump().span;
                Ok(Ident::new(name.clone(), span))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn phrase(&mut self) -> PResult<Phrase> {
        match self.peek() {
            Some(TokenKind::Kw(Keyword::Species)) => Ok(Phrase::Species(self.species()?)),
            Some(TokenKind::Kw(Keyword::Collection)) => Ok(Phrase::Collection(self.collection()?)),
            _ => self.error(&["`species`", "`collection`"]),
        }
    }

    fn species_expr(&mut self) -> PResult<SpeciesExpr> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::LParen) {
            loop {
                args.push(self.ident()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        let span = self.since(name.span);
        Ok(SpeciesExpr { name, args, span })
    }

    fn species(&mut self) -> PResult<SpeciesDecl> {
        let start = self.expect_kw(Keyword::Species)?;
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::LParen) {
            let mut seen = HashSet::new();
            loop {
                let pname = self.ident()?;
                if !seen.insert(pname.name.clone()) {
                    return Err(ParseError::Duplicate { span: pname.span, what: "parameter", name: pname.name });
                }
                self.expect_kw(Keyword::Is)?;
                let interface = self.species_expr()?;
                params.push(SpeciesParam { name: pname, interface });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        self.expect(&TokenKind::Eq)?;
        let unterminated = |name: &Ident| ParseError::UnterminatedSpecies { span: start.to(name.span), name: name.name.clone() };
        let mut inherits = Vec::new();
        if self.eat_kw(Keyword::Inherit) {
            loop {
                inherits.push(self.species_expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            if self.at_eof() {
                return Err(unterminated(&name));
            }
            self.expect(&TokenKind::Semi)?;
        }
        let mut methods: Vec<Method> = Vec::new();
        let mut seen = HashSet::new();
        loop {
            if self.at_eof() {
                return Err(unterminated(&name));
            }
            if self.eat_kw(Keyword::End) {
                if !self.eat(&TokenKind::SemiSemi) {
                    if self.at_eof() {
                        return Err(unterminated(&name));
                    }
                    return self.error(&["`;;`"]);
                }
                break;
            }
            let method = self.method()?;
            let key = match &method.kind {
                MethodKind::Representation(_) => Some(("representation", "representation".to_string(), method.span)),
                // A signature may be followed by the definition it announces.
                MethodKind::Signature { name, .. } => Some(("method", format!("signature {}", name.name), name.span)),
                other => other.introduced_name().map(|n| ("method", n.name.clone(), n.span)),
            };
            if let Some((what, key, span)) = key {
                if !seen.insert(key.clone()) {
                    let name = key.trim_start_matches("signature ").to_string();
                    return Err(ParseError::Duplicate { span, what, name });
                }
            }
            methods.push(method);
            if self.at_eof() {
                return Err(unterminated(&name));
            }
            if !self.eat(&TokenKind::Semi) && !self.is_kw(Keyword::End) {
                return self.error(&["`;`", "`end`"]);
            }
        }
        let span = self.since(start);
        Ok(SpeciesDecl { name, params, inherits, methods, span })
    }

    fn collection(&mut self) -> PResult<CollectionDecl> {
        let start = self.expect_kw(Keyword::Collection)?;
        let name = self.ident()?;
        self.expect(&TokenKind::Eq)?;
        self.expect_kw(Keyword::Implement)?;
        let implements = self.species_expr()?;
        self.eat(&TokenKind::Semi);
        self.expect_kw(Keyword::End)?;
        self.expect(&TokenKind::SemiSemi)?;
        let span = self.since(start);
        Ok(CollectionDecl { name, implements, span })
    }

    fn method(&mut self) -> PResult<Method> {
        let start = self.span();
        let kind = match self.peek() {
            Some(TokenKind::Kw(Keyword::Signature)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(&TokenKind::Colon)?;
                let ty = self.type_expr()?;
                MethodKind::Signature { name, ty }
            }
            Some(TokenKind::Kw(Keyword::Representation)) => {
                self.bump();
                self.expect(&TokenKind::Eq)?;
                MethodKind::Representation(self.type_expr()?)
            }
            Some(TokenKind::Kw(Keyword::Logical)) => {
                self.bump();
                let is_final = self.eat_kw(Keyword::Final);
                self.expect_kw(Keyword::Let)?;
                let name = self.ident()?;
                let params = self.let_params()?;
                self.expect(&TokenKind::Eq)?;
                let body = self.formula()?;
                MethodKind::Logical(LogicalDef { name, params, body, is_final })
            }
            Some(TokenKind::Kw(Keyword::Final)) => {
                self.bump();
                if self.eat_kw(Keyword::Logical) {
                    self.expect_kw(Keyword::Let)?;
                    let name = self.ident()?;
                    let params = self.let_params()?;
                    self.expect(&TokenKind::Eq)?;
                    let body = self.formula()?;
                    MethodKind::Logical(LogicalDef { name, params, body, is_final: true })
                } else {
                    MethodKind::Let(self.let_def(true)?)
                }
            }
            Some(TokenKind::Kw(Keyword::Let)) => MethodKind::Let(self.let_def(false)?),
            Some(TokenKind::Kw(Keyword::Property)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(&TokenKind::Colon)?;
                let formula = self.formula()?;
                MethodKind::Property { name, formula }
            }
            Some(TokenKind::Kw(Keyword::Theorem)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(&TokenKind::Colon)?;
                let formula = self.formula()?;
                self.expect_kw(Keyword::Proof)?;
                self.expect(&TokenKind::Eq)?;
                let proof = self.proof()?;
                MethodKind::Theorem { name, formula, proof }
            }
            Some(TokenKind::Kw(Keyword::Proof)) => {
                self.bump();
                self.expect_kw(Keyword::Of)?;
                let name = self.ident()?;
                self.expect(&TokenKind::Eq)?;
                let proof = self.proof()?;
                MethodKind::ProofOf { name, proof }
            }
            _ => {
                return self.error(&[
                    "`signature`",
                    "`representation`",
                    "`let`",
                    "`logical`",
                    "`property`",
                    "`theorem`",
                    "`proof`",
                    "`end`",
                ])
            }
        };
        Ok(Method { kind, span: self.since(start) })
    }

    fn let_params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.eat(&TokenKind::LParen) {
            if self.eat(&TokenKind::RParen) {
                return Ok(params);
            }
            loop {
                let name = self.ident()?;
                let ty = if self.eat(&TokenKind::Colon) { Some(self.type_expr()?) } else { None };
                params.push(Param { name, ty });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        Ok(params)
    }

    fn let_def(&mut self, is_final: bool) -> PResult<LetDef> {
        self.expect_kw(Keyword::Let)?;
        let is_rec = self.eat_kw(Keyword::Rec);
        let name = self.ident()?;
        let params = self.let_params()?;
        let ret = if self.eat(&TokenKind::Colon) { Some(self.type_expr()?) } else { None };
        self.expect(&TokenKind::Eq)?;
        let body = self.expr()?;
        let termination = if self.is_kw(Keyword::Termination) {
            if !is_rec {
                return self.error(&["`;`"]);
            }
            self.bump();
            self.expect_kw(Keyword::Proof)?;
            self.expect(&TokenKind::Eq)?;
            self.expect_kw(Keyword::Structural)?;
            Some(self.ident()?)
        } else if is_rec {
            return self.error(&["`termination`"]);
        } else {
            None
        };
        Ok(LetDef { name, params, ret, body, is_rec, is_final, termination })
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let first = self.type_atom()?;
        if !self.is(&TokenKind::Arrow) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&TokenKind::Arrow) {
            parts.push(self.type_atom()?);
        }
        let ret = parts.pop().unwrap();
        Ok(TypeExpr::Arrow(parts, Box::new(ret)))
    }

    fn type_atom(&mut self) -> PResult<TypeExpr> {
        if self.eat(&TokenKind::LParen) {
            let t = self.type_expr()?;
            self.expect(&TokenKind::RParen)?;
            return Ok(t);
        }
        let id = self.ident().or_else(|_| self.error(&["type"]))?;
        Ok(match id.name.as_str() {
            "Self" => TypeExpr::SelfType(id.span),
            "bool" => TypeExpr::Bool(id.span),
            "int" => TypeExpr::Int(id.span),
            "list" => {
                self.expect(&TokenKind::LParen)?;
                let inner = self.type_expr()?;
                self.expect(&TokenKind::RParen)?;
                TypeExpr::List(Box::new(inner), self.since(id.span))
            }
            _ => TypeExpr::Param(id),
        })
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&TokenKind::Iff) {
            let rhs = self.implication()?;
            let span = lhs.span.to(rhs.span);
            lhs = Formula::new(FormulaKind::Iff(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.implication()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Formula::new(FormulaKind::Implies(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&TokenKind::Vee) {
            let rhs = self.conjunction()?;
            let span = lhs.span.to(rhs.span);
            lhs = Formula::new(FormulaKind::Or(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary_formula()?;
        while self.eat(&TokenKind::Wedge) {
            let rhs = self.unary_formula()?;
            let span = lhs.span.to(rhs.span);
            lhs = Formula::new(FormulaKind::And(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary_formula(&mut self) -> PResult<Formula> {
        let start = self.span();
        match self.peek() {
            Some(TokenKind::Kw(Keyword::Not)) => {
                self.bump();
                let inner = self.unary_formula()?;
                let span = start.to(inner.span);
                Ok(Formula::new(FormulaKind::Not(Box::new(inner)), span))
            }
            Some(TokenKind::Kw(kw @ (Keyword::All | Keyword::Ex))) => {
                let kw = *kw;
                self.bump();
                let mut vars = vec![self.ident()?];
                while let Some(TokenKind::Ident(_)) = self.peek() {
                    vars.push(self.ident()?);
                }
                self.expect(&TokenKind::Colon)?;
                let ty = self.type_expr()?;
                self.expect(&TokenKind::Comma)?;
                let body = Box::new(self.formula()?);
                let span = start.to(body.span);
                let kind = if kw == Keyword::All {
                    FormulaKind::All(vars, ty, body)
                } else {
                    FormulaKind::Ex(vars, ty, body)
                };
                Ok(Formula::new(kind, span))
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let mut inner = self.formula()?;
                self.expect(&TokenKind::RParen)?;
                inner.span = self.since(start);
                Ok(inner)
            }
            _ => {
                let e = self.expr()?;
                let span = e.span;
                Ok(match e.kind {
                    ExprKind::Equal(a, b) => Formula::new(FormulaKind::Eq(*a, *b), span),
                    kind => Formula::new(FormulaKind::Atom(Expr::new(kind, span)), span),
                })
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Some(TokenKind::Kw(Keyword::If)) => {
                self.bump();
                let c = self.expr()?;
                self.expect_kw(Keyword::Then)?;
                let a = self.expr()?;
                self.expect_kw(Keyword::Else)?;
                let b = self.expr()?;
                let span = start.to(b.span);
                Ok(Expr::new(ExprKind::If(Box::new(c), Box::new(a), Box::new(b)), span))
            }
            Some(TokenKind::Kw(Keyword::Match)) => {
                self.bump();
                let scrutinee = self.expr()?;
                self.expect_kw(Keyword::With)?;
                self.eat(&TokenKind::Bar);
                let mut arms = Vec::new();
                loop {
                    let arm_start = self.span();
                    let pattern = self.pattern()?;
                    self.expect(&TokenKind::Arrow)?;
                    let body = self.expr()?;
                    let span = arm_start.to(body.span);
                    arms.push(MatchArm { pattern, body, span });
                    if !self.eat(&TokenKind::Bar) {
                        break;
                    }
                }
                let span = self.since(start);
                Ok(Expr::new(ExprKind::Match { scrutinee: Box::new(scrutinee), arms }, span))
            }
            Some(TokenKind::Kw(Keyword::Let)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(&TokenKind::Eq)?;
                let bound = self.expr()?;
                self.expect_kw(Keyword::In)?;
                let body = self.expr()?;
                let span = start.to(body.span);
                Ok(Expr::new(ExprKind::LetIn { name, bound: Box::new(bound), body: Box::new(body) }, span))
            }
            _ => self.or_expr(),
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        if self.is(&TokenKind::LBracket) && self.peek_at(1) == Some(&TokenKind::RBracket) {
            self.pos += 2;
            return Ok(Pattern::Nil);
        }
        let head = match self.peek() {
            Some(TokenKind::Underscore) => {
                self.bump();
                PatVar::Wildcard
            }
            Some(TokenKind::Ident(_)) => PatVar::Var(self.ident()?.name),
            _ => return self.error(&["pattern"]),
        };
        if !self.eat(&TokenKind::ColonColon) {
            return Ok(match head {
                PatVar::Wildcard => Pattern::Wildcard,
                PatVar::Var(n) => Pattern::Var(n),
            });
        }
        let tail = match self.peek() {
            Some(TokenKind::Underscore) => {
                self.bump();
                PatVar::Wildcard
            }
            Some(TokenKind::Ident(_)) => PatVar::Var(self.ident()?.name),
            _ => return self.error(&["pattern variable"]),
        };
        Ok(Pattern::Cons(head, tail))
    }

    fn binary_loop(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        op: &TokenKind,
        build: fn(Box<Expr>, Box<Expr>) -> ExprKind,
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        while self.eat(op) {
            let rhs = next(self)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(build(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.binary_loop(Self::and_expr, &TokenKind::OrOr, ExprKind::Or)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.binary_loop(Self::not_expr, &TokenKind::AndAnd, ExprKind::And)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.is_kw(Keyword::Not) {
            let start = self.bump().span;
            let inner = self.not_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), span));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.cons_expr()?;
        if self.eat(&TokenKind::Eq) {
            let rhs = self.cons_expr()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr::new(ExprKind::Equal(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn cons_expr(&mut self) -> PResult<Expr> {
        let head = self.add_expr()?;
        if self.eat(&TokenKind::ColonColon) {
            let tail = self.cons_expr()?;
            let span = head.span.to(tail.span);
            return Ok(Expr::new(ExprKind::Cons(Box::new(head), Box::new(tail)), span));
        }
        Ok(head)
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.primary()?;
        loop {
            let build: fn(Box<Expr>, Box<Expr>) -> ExprKind = if self.eat(&TokenKind::Plus) {
                ExprKind::Add
            } else if self.eat(&TokenKind::Minus) {
                ExprKind::Sub
            } else {
                break;
            };
            let rhs = self.primary()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(build(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(&TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(&TokenKind::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Some(TokenKind::Int(n)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(n.clone()), start))
            }
            Some(TokenKind::Kw(Keyword::True)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), start))
            }
            Some(TokenKind::Kw(Keyword::False)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), start))
            }
            Some(TokenKind::Kw(Keyword::If | Keyword::Match | Keyword::Let)) => self.expr(),
            Some(TokenKind::LParen) => {
                self.bump();
                let mut e = self.expr()?;
                self.expect(&TokenKind::RParen)?;
                e.span = self.since(start);
                Ok(e)
            }
            Some(TokenKind::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if !self.is(&TokenKind::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(&TokenKind::Semi) {
                            break;
                        }
                    }
                }
                self.expect(&TokenKind::RBracket)?;
                let span = self.since(start);
                let mut list = Expr::new(ExprKind::Nil, span);
                for item in items.into_iter().rev() {
                    list = Expr::new(ExprKind::Cons(Box::new(item), Box::new(list)), span);
                }
                Ok(list)
            }
            Some(TokenKind::Ident(name)) => {
                self.bump();
                if self.eat(&TokenKind::Bang) {
                    let method = self.ident()?;
                    let args = if self.is(&TokenKind::LParen) { Some(self.args()?) } else { None };
                    let span = self.since(start);
                    return Ok(Expr::new(
                        ExprKind::Qualified { collection: name.clone(), method: method.name, args },
                        span,
                    ));
                }
                if self.is(&TokenKind::LParen) {
                    let args = self.args()?;
                    let span = self.since(start);
                    return Ok(Expr::new(ExprKind::App { callee: name.clone(), args }, span));
                }
                Ok(Expr::new(ExprKind::Var(name.clone()), start))
            }
            _ => self.error(&["expression"]),
        }
    }

    // ---- proofs ----

    fn proof(&mut self) -> PResult<Proof> {
        match self.peek() {
            Some(TokenKind::StepLabel(level, _)) => {
                let level = *level;
                Ok(Proof::Steps(self.steps(level)?))
            }
            _ => Ok(Proof::By(self.justification()?)),
        }
    }

    fn steps(&mut self, level: u32) -> PResult<Vec<ProofStep>> {
        let mut steps = Vec::new();
        while let Some(TokenKind::StepLabel(l, _)) = self.peek() {
            if *l != level {
                break;
            }
            let step = self.step(level)?;
            let terminal = step.is_terminal();
            steps.push(step);
            if terminal {
                break;
            }
        }
        Ok(steps)
    }

    fn step(&mut self, level: u32) -> PResult<ProofStep> {
        let start = self.span();
        let label = match self.bump().kind.clone() {
            TokenKind::StepLabel(l, id) => StepLabel { level: l, id },
            _ => unreachable!("caller checked for a step label"),
        };
        let mut intros = Vec::new();
        loop {
            if self.eat_kw(Keyword::Assume) {
                let mut names = vec![self.ident()?];
                while let Some(TokenKind::Ident(_)) = self.peek() {
                    names.push(self.ident()?);
                }
                self.expect(&TokenKind::Colon)?;
                let ty = self.type_expr()?;
                self.expect(&TokenKind::Comma)?;
                intros.push(Intro::Assume { names, ty });
            } else if self.eat_kw(Keyword::Hypothesis) {
                let name = self.ident()?;
                self.expect(&TokenKind::Colon)?;
                let formula = self.formula()?;
                self.expect(&TokenKind::Comma)?;
                intros.push(Intro::Hypothesis { name, formula });
            } else {
                break;
            }
        }
        let body = match self.peek() {
            Some(TokenKind::Kw(Keyword::Prove)) => {
                self.bump();
                let goal = self.formula()?;
                let proof = match self.peek() {
                    Some(TokenKind::StepLabel(l, _)) if *l == level + 1 => Proof::Steps(self.steps(level + 1)?),
                    Some(TokenKind::Kw(Keyword::By | Keyword::Conclude)) => Proof::By(self.justification()?),
                    _ => return self.error(&["`by`", "`conclude`", &format!("step label at level {}", level + 1)]),
                };
                StepBody::Prove { goal, proof }
            }
            Some(TokenKind::Kw(Keyword::Qed)) => {
                self.bump();
                if self.is_kw(Keyword::By) || self.is_kw(Keyword::Conclude) {
                    StepBody::Qed(self.justification()?)
                } else {
                    StepBody::Qed(Justification::Conclude)
                }
            }
            Some(TokenKind::Kw(Keyword::Conclude)) => {
                self.bump();
                StepBody::Qed(Justification::Conclude)
            }
            _ => return self.error(&["`assume`", "`hypothesis`", "`prove`", "`qed`", "`conclude`"]),
        };
        Ok(ProofStep { label, intros, body, span: self.since(start) })
    }

    fn justification(&mut self) -> PResult<Justification> {
        if self.eat_kw(Keyword::Conclude) {
            return Ok(Justification::Conclude);
        }
        self.expect_kw(Keyword::By)?;
        let mut c = Citations::default();
        let mut any = false;
        loop {
            match self.peek() {
                Some(TokenKind::Kw(Keyword::Definition)) => {
                    self.bump();
                    self.expect_kw(Keyword::Of)?;
                    self.name_list(&mut c.definitions)?;
                }
                Some(TokenKind::Kw(Keyword::Property)) => {
                    self.bump();
                    self.name_list(&mut c.properties)?;
                }
                Some(TokenKind::Kw(Keyword::Theorem)) => {
                    self.bump();
                    self.name_list(&mut c.theorems)?;
                }
                Some(TokenKind::Kw(Keyword::Hypothesis)) => {
                    self.bump();
                    loop {
                        c.hypotheses.push(self.ident()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                Some(TokenKind::Kw(Keyword::Step)) => {
                    self.bump();
                    loop {
                        match self.peek() {
                            Some(TokenKind::StepLabel(level, id)) => {
                                let span = self.bump().span;
                                c.steps.push((StepLabel { level: *level, id: id.clone() }, span));
                            }
                            _ => return self.error(&["step label"]),
                        }
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                }
                _ if any => break,
                _ => return self.error(&["`definition`", "`property`", "`theorem`", "`hypothesis`", "`step`"]),
            }
            any = true;
        }
        Ok(Justification::By(c))
    }

    fn name_list(&mut self, out: &mut Vec<Name>) -> PResult<()> {
        loop {
            let first = self.ident()?;
            let name = if self.eat(&TokenKind::Bang) {
                let method = self.ident()?;
                Name { qualifier: Some(first.name), name: method.name, span: first.span.to(method.span) }
            } else {
                Name { qualifier: None, name: first.name, span: first.span }
            };
            out.push(name);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(())
    }
}
