//! Recursive-descent parser.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parse a source file.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.program()
}

/// Parse a standalone expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a standalone contract formula.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

const MODIFIERS: &[&str] = &["public", "private", "protected", "static", "final"];
const KEYWORDS: &[&str] = &[
    "int", "boolean", "void", "if", "else", "while", "for", "return", "class", "true", "false",
    "requires", "ensures", "public", "private", "protected", "static", "final",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::expected(self.span(), self.peek(), expected)
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{p}`")]))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{w}`")]))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn skip_modifiers(&mut self) {
        while MODIFIERS.iter().any(|m| self.is_word(m)) {
            self.advance();
        }
    }

    fn program(&mut self) -> PResult<Program> {
        self.skip_modifiers();
        let class = if self.eat_word("class") {
            let name = self.ident()?;
            self.expect_punct("{")?;
            Some(name)
        } else {
            None
        };
        let mut functions = Vec::new();
        loop {
            if class.is_some() && self.eat_punct("}") {
                break;
            }
            if class.is_none() && *self.peek() == Tok::Eof {
                break;
            }
            functions.push(self.function()?);
        }
        self.expect_eof()?;
        if functions.is_empty() {
            return Err(ParseError::new(self.span(), "no function in program"));
        }
        Ok(Program { class, functions })
    }

    fn function(&mut self) -> PResult<Function> {
        let mut contract = Contract::default();
        self.skip_modifiers();
        if *self.peek() == Tok::AnnotStart {
            self.advance();
            contract = self.contract()?;
        }
        self.skip_modifiers();
        let span = self.span();
        let result = self.ty(true)?;
        let name = self.ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.is_punct(")") {
            loop {
                let ty = self.ty(false)?;
                let pname = self.ident()?;
                params.push(Param { name: pname, ty });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.eat_punct("}") {
            body.push(self.stmt()?);
        }
        Ok(Function { name, params, result, body, contract, span })
    }

    fn contract(&mut self) -> PResult<Contract> {
        let mut c = Contract::default();
        loop {
            if *self.peek() == Tok::AnnotEnd {
                self.advance();
                return Ok(c);
            }
            if self.eat_word("requires") {
                c.requires.push(self.formula()?);
            } else if self.eat_word("ensures") {
                c.ensures.push(self.formula()?);
            } else {
                return Err(self.unexpected(&["`requires`", "`ensures`", "`@*/`"]));
            }
            self.eat_punct(";");
        }
    }

    fn is_type_start(&self) -> bool {
        self.is_word("int") || self.is_word("boolean")
    }

    fn ty(&mut self, allow_void: bool) -> PResult<Type> {
        if self.eat_word("int") {
            if self.eat_punct("[") {
                self.expect_punct("]")?;
                return Ok(Type::IntArray);
            }
            return Ok(Type::Int);
        }
        if self.eat_word("boolean") {
            return Ok(Type::Bool);
        }
        if allow_void && self.eat_word("void") {
            return Ok(Type::Void);
        }
        Err(self.unexpected(&["type"]))
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        if self.eat_punct("{") {
            let mut v = Vec::new();
            while !self.eat_punct("}") {
                v.push(self.stmt()?);
            }
            return Ok(Stmt::new(StmtKind::Block(v), span));
        }
        if self.eat_word("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = Box::new(self.stmt()?);
            let els = if self.eat_word("else") { Some(Box::new(self.stmt()?)) } else { None };
            return Ok(Stmt::new(StmtKind::If { cond, then, els }, span));
        }
        if self.eat_word("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::new(StmtKind::While { cond, body }, span));
        }
        if self.eat_word("for") {
            self.expect_punct("(")?;
            let init = if self.is_punct(";") { None } else { Some(Box::new(self.simple()?)) };
            self.expect_punct(";")?;
            let cond = if self.is_punct(";") { None } else { Some(self.expr()?) };
            self.expect_punct(";")?;
            let step = if self.is_punct(")") { None } else { Some(Box::new(self.simple()?)) };
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::new(StmtKind::For { init, cond, step, body }, span));
        }
        if self.eat_word("return") {
            let e = if self.is_punct(";") { None } else { Some(self.expr()?) };
            self.expect_punct(";")?;
            return Ok(Stmt::new(StmtKind::Return(e), span));
        }
        let s = self.simple()?;
        self.expect_punct(";")?;
        Ok(s)
    }

    /// Declaration, assignment, increment or call, without the `;`.
    fn simple(&mut self) -> PResult<Stmt> {
        let span = self.span();
        if self.is_type_start() {
            let ty = self.ty(false)?;
            let name = self.ident()?;
            if !self.eat_punct("=") {
                return Ok(Stmt::new(StmtKind::Decl { name, ty, init: None }, span));
            }
            if let Some((callee, args)) = self.call()? {
                if ty != Type::Int {
                    return Err(ParseError::new(span, "a declaring call must declare an `int`"));
                }
                let kind = StmtKind::Call { target: name, declare: true, callee, args };
                return Ok(Stmt::new(kind, span));
            }
            let init = Some(self.expr()?);
            return Ok(Stmt::new(StmtKind::Decl { name, ty, init }, span));
        }
        let name = self.ident()?;
        if self.eat_punct("++") || self.eat_punct("--") {
            let op = if matches!(self.toks[self.pos - 1].tok, Tok::Punct("++")) {
                BinOp::Add
            } else {
                BinOp::Sub
            };
            let value = Expr::binary(op, Expr::new(ExprKind::Var(name.clone()), span), Expr::int(1));
            return Ok(Stmt::new(StmtKind::Assign { name, value }, span));
        }
        if self.eat_punct("[") {
            let index = self.expr()?;
            self.expect_punct("]")?;
            self.expect_punct("=")?;
            let value = self.expr()?;
            return Ok(Stmt::new(StmtKind::ArrayAssign { name, index, value }, span));
        }
        if !self.eat_punct("=") {
            return Err(self.unexpected(&["`=`", "`[`", "`++`"]));
        }
        if let Some((callee, args)) = self.call()? {
            return Ok(Stmt::new(StmtKind::Call { target: name, declare: false, callee, args }, span));
        }
        let value = self.expr()?;
        Ok(Stmt::new(StmtKind::Assign { name, value }, span))
    }

    fn call(&mut self) -> PResult<Option<(String, Vec<Expr>)>> {
        let is_call = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && matches!(self.peek_at(1), Tok::Punct("("));
        if !is_call {
            return Ok(None);
        }
        let callee = self.ident()?;
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.is_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(Some((callee, args)))
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[(&str, BinOp)]] = &[
            &[("||", BinOp::Or)],
            &[("&&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<=", BinOp::Le), (">=", BinOp::Ge), ("<", BinOp::Lt), (">", BinOp::Gt)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            &[("*", BinOp::Mul), ("/", BinOp::Div)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let Some(&(_, op)) = LEVELS[level].iter().find(|(p, _)| self.is_punct(p)) else {
                return Ok(lhs);
            };
            self.advance();
            let rhs = self.binary_level(level + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
            // relational operators do not chain
            if level == 3 {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat_punct("-") {
            if let Tok::Int(v) = *self.peek() {
                self.advance();
                return Ok(Expr::new(ExprKind::Int(-v), span));
            }
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(e)), span));
        }
        if self.eat_punct("!") {
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(e)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(Expr::new(ExprKind::Int(v), span))
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Backslash(w) if w == "result" => {
                self.advance();
                Ok(Expr::new(ExprKind::Result, span))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.advance();
                Ok(Expr::new(ExprKind::Bool(w == "true"), span))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.is_punct("(") {
                    return Err(ParseError::new(
                        span,
                        "calls are only allowed as the right-hand side of an assignment",
                    ));
                }
                if self.eat_punct("[") {
                    let idx = self.expr()?;
                    self.expect_punct("]")?;
                    return Ok(Expr::new(ExprKind::Index(name, Box::new(idx)), span));
                }
                if self.eat_punct(".") {
                    self.expect_word("length")?;
                    return Ok(Expr::new(ExprKind::Length(name), span));
                }
                Ok(Expr::new(ExprKind::Var(name), span))
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.formula_or()?;
        if self.eat_punct("==>") {
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> PResult<Formula> {
        let mut f = self.formula_and()?;
        while self.eat_punct("||") {
            let g = self.formula_and()?;
            f = Formula::Or(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn formula_and(&mut self) -> PResult<Formula> {
        let mut f = self.formula_unary()?;
        while self.eat_punct("&&") {
            let g = self.formula_unary()?;
            f = Formula::And(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn formula_unary(&mut self) -> PResult<Formula> {
        if self.eat_punct("!") {
            let f = self.formula_unary()?;
            return Ok(Formula::Not(Box::new(f)));
        }
        let span = self.span();
        match self.peek().clone() {
            Tok::Punct("(") => {
                let save = self.pos;
                self.advance();
                if let Ok(f) = self.formula() {
                    if self.eat_punct(")") && !self.continues_expression() {
                        return Ok(f);
                    }
                }
                // a parenthesised arithmetic operand such as `(i+j) <= k`
                self.pos = save;
                self.atom()
            }
            Tok::Backslash(w) if w == "forall" => {
                self.advance();
                self.forall(span)
            }
            Tok::Backslash(w) if w == "alldifferent" => {
                self.advance();
                let name = self.ident()?;
                Ok(Formula::AllDifferent(name, span))
            }
            _ => self.atom(),
        }
    }

    fn continues_expression(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Punct("+" | "-" | "*" | "/" | "==" | "!=" | "<" | "<=" | ">" | ">=" | "[" | ".")
        )
    }

    fn atom(&mut self) -> PResult<Formula> {
        // comparison level: `&&`, `||` and `!` belong to the formula
        let e = self.binary_level(2)?;
        Ok(Formula::Atom(e))
    }

    fn forall(&mut self, span: Span) -> PResult<Formula> {
        self.expect_word("int")?;
        let var = self.ident()?;
        self.expect_punct(";")?;
        let range_span = self.span();
        let range = self.formula()?;
        self.expect_punct(";")?;
        let body = self.formula()?;
        let (lo, hi) = range_bounds(&var, &range)
            .ok_or_else(|| ParseError::new(range_span, format!("quantifier range must bound `{var}` below and above")))?;
        Ok(Formula::ForAll { var, lo, hi, body: Box::new(body), span })
    }
}

fn plus_one(e: &Expr) -> Expr {
    match e.kind {
        ExprKind::Int(v) => Expr::new(ExprKind::Int(v + 1), e.span),
        _ => Expr::binary(BinOp::Add, e.clone(), Expr::int(1)),
    }
}

/// Turn `lo <= i && i < hi` (any orientation, strict or not) into the
/// half-open range `[lo, hi)`.
fn range_bounds(var: &str, range: &Formula) -> Option<(Expr, Expr)> {
    let mut lo = None;
    let mut hi = None;
    for c in range.conjuncts() {
        let Formula::Atom(Expr { kind: ExprKind::Binary(op, a, b), .. }) = c else {
            return None;
        };
        let is_var = |e: &Expr| matches!(&e.kind, ExprKind::Var(n) if n == var);
        // normalise to `var op other`
        let (op, other) = if is_var(a) {
            (*op, b.as_ref())
        } else if is_var(b) {
            let flipped = match op {
                BinOp::Lt => BinOp::Gt,
                BinOp::Le => BinOp::Ge,
                BinOp::Gt => BinOp::Lt,
                BinOp::Ge => BinOp::Le,
                o => *o,
            };
            (flipped, a.as_ref())
        } else {
            return None;
        };
        let slot = match op {
            BinOp::Ge => (&mut lo, other.clone()),
            BinOp::Gt => (&mut lo, plus_one(other)),
            BinOp::Lt => (&mut hi, other.clone()),
            BinOp::Le => (&mut hi, plus_one(other)),
            _ => return None,
        };
        if slot.0.replace(slot.1).is_some() {
            return None;
        }
    }
    Some((lo?, hi?))
}
