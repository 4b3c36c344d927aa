//! Recursive descent parser for MiniLang.
//!
//! One error aborts the file: the corpus walker counts and skips it, so no
//! recovery is attempted.

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ParseError;

pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        next_id: 0,
    };
    p.program()
}

/// Parses a bare statement list, as found in documentation code fences.
pub fn parse_statements(source: &str) -> Result<Vec<Statement>, ParseError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        next_id: 0,
    };
    let mut stmts = Vec::new();
    while p.peek() != &Tok::Eof {
        stmts.push(p.statement()?);
    }
    Ok(stmts)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: u32,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let (l, c) = self.here();
            Err(ParseError::at(
                l,
                c,
                format!("expected {want}, found {}", self.peek()),
            ))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => {
                let (l, c) = self.here();
                Err(ParseError::at(
                    l,
                    c,
                    format!("expected `{kw}`, found {other}"),
                ))
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => {
                let (l, c) = self.here();
                Err(ParseError::at(
                    l,
                    c,
                    format!("expected identifier, found {other}"),
                ))
            }
        }
    }

    fn fresh(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn expr_node(&mut self, kind: ExprKind) -> Expr {
        Expr {
            id: self.fresh(),
            kind,
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut classes = Vec::new();
        while self.peek() != &Tok::Eof {
            classes.push(self.class_decl()?);
        }
        Ok(Program { classes })
    }

    fn class_decl(&mut self) -> Result<ClassDecl, ParseError> {
        self.expect_kw("class")?;
        let name = self.ident()?;
        self.expect(&Tok::LBrace)?;
        let mut methods = Vec::new();
        while self.peek() != &Tok::RBrace {
            methods.push(self.method_decl()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(ClassDecl { name, methods })
    }

    fn method_decl(&mut self) -> Result<MethodDecl, ParseError> {
        let return_type = self.ident()?;
        let name = self.ident()?;
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                let ty = self.ident()?;
                let pname = self.ident()?;
                params.push(Param { ty, name: pname });
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        let body = self.block()?;
        Ok(MethodDecl {
            return_type,
            name,
            params,
            body,
        })
    }

    fn block(&mut self) -> Result<Vec<Statement>, ParseError> {
        self.expect(&Tok::LBrace)?;
        let mut stmts = Vec::new();
        while self.peek() != &Tok::RBrace {
            stmts.push(self.statement()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(stmts)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        if self.at_kw("var") {
            self.bump();
            let name = self.ident()?;
            self.expect(&Tok::Assign)?;
            let init = self.expr()?;
            self.expect(&Tok::Semi)?;
            return Ok(Statement::VarDecl { name, init });
        }
        if self.at_kw("if") {
            self.bump();
            self.expect(&Tok::LParen)?;
            let cond = self.condition()?;
            self.expect(&Tok::RParen)?;
            let then_block = self.block()?;
            let else_block = if self.at_kw("else") {
                self.bump();
                self.block()?
            } else {
                Vec::new()
            };
            return Ok(Statement::If {
                cond,
                then_block,
                else_block,
            });
        }
        if self.at_kw("while") {
            self.bump();
            self.expect(&Tok::LParen)?;
            let cond = self.condition()?;
            self.expect(&Tok::RParen)?;
            let body = self.block()?;
            return Ok(Statement::While { cond, body });
        }
        if self.at_kw("return") {
            self.bump();
            let value = if self.peek() == &Tok::Semi {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(&Tok::Semi)?;
            return Ok(Statement::Return(value));
        }

        let expr = self.expr()?;
        if self.peek() == &Tok::Assign {
            let (l, c) = self.here();
            if !matches!(expr.kind, ExprKind::Var(_) | ExprKind::FieldGet { .. }) {
                return Err(ParseError::at(
                    l,
                    c,
                    "assignment target must be a variable or field",
                ));
            }
            self.bump();
            let value = self.expr()?;
            self.expect(&Tok::Semi)?;
            return Ok(Statement::Assign {
                target: expr,
                value,
            });
        }
        self.expect(&Tok::Semi)?;
        Ok(Statement::Expr(expr))
    }

    /// Condition position is the one place `==` is allowed.
    fn condition(&mut self) -> Result<Expr, ParseError> {
        let left = self.expr()?;
        if self.peek() == &Tok::EqEq {
            self.bump();
            let right = self.expr()?;
            return Ok(self.expr_node(ExprKind::Eq {
                left: Box::new(left),
                right: Box::new(right),
            }));
        }
        Ok(left)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut expr = self.primary()?;
        while self.peek() == &Tok::Dot {
            self.bump();
            let member = self.ident()?;
            if self.peek() == &Tok::LParen {
                let args = self.call_args()?;
                expr = self.expr_node(ExprKind::Call {
                    receiver: Box::new(expr),
                    method: member,
                    args,
                });
            } else {
                expr = self.expr_node(ExprKind::FieldGet {
                    receiver: Box::new(expr),
                    field: member,
                });
            }
        }
        Ok(expr)
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                args.push(self.expr()?);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(self.expr_node(ExprKind::Literal(Literal::Int(n))))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(self.expr_node(ExprKind::Literal(Literal::Str(s))))
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(self.expr_node(ExprKind::Literal(Literal::Bool(true))))
                }
                "false" => {
                    self.bump();
                    Ok(self.expr_node(ExprKind::Literal(Literal::Bool(false))))
                }
                "null" => {
                    self.bump();
                    Ok(self.expr_node(ExprKind::Literal(Literal::Null)))
                }
                "default" if self.peek2() == &Tok::LParen => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let ty = self.ident()?;
                    self.expect(&Tok::RParen)?;
                    Ok(self.expr_node(ExprKind::Literal(Literal::Default(ty))))
                }
                "new" => {
                    self.bump();
                    let type_name = self.ident()?;
                    let args = self.call_args()?;
                    Ok(self.expr_node(ExprKind::New { type_name, args }))
                }
                _ => {
                    self.bump();
                    Ok(self.expr_node(ExprKind::Var(name)))
                }
            },
            other => {
                let (l, c) = self.here();
                Err(ParseError::at(
                    l,
                    c,
                    format!("expected expression, found {other}"),
                ))
            }
        }
    }
}
