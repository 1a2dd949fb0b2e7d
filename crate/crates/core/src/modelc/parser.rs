//! Recursive-descent parser. Expression precedence, loosest first:
//! `|`, `&`, `!`, comparisons, `+ -`, `* / %`, unary `-`.

use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok};
use super::ModelError;

pub fn parse(src: &str) -> Result<ModelAst, ModelError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let ast = p.model()?;
    check_declarations(&ast)?;
    Ok(ast)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ModelError> {
        Err(ModelError::Syntax {
            pos: self.pos(),
            msg: format!("expected {expected}, found {}", self.peek()),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<Pos, ModelError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.error(&t.to_string())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ModelError> {
        if self.is_keyword(kw) {
            Ok(self.bump().1)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                let pos = self.bump().1;
                Ok((s, pos))
            }
            _ => self.error("a name"),
        }
    }

    fn model(&mut self) -> Result<ModelAst, ModelError> {
        let mut ast = ModelAst::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(ast),
                Tok::Ident(s) => match s.as_str() {
                    "const" => ast.consts.push(self.const_decl()?),
                    "player1" | "player2" => ast.players.push(self.player_decl()?),
                    "module" => ast.modules.push(self.module()?),
                    "rewards" => self.rewards(&mut ast.rewards)?,
                    _ => return self.error("`const`, `player1`, `player2`, `module` or `rewards`"),
                },
                _ => return self.error("a declaration"),
            }
        }
    }

    fn const_decl(&mut self) -> Result<ConstDecl, ModelError> {
        let pos = self.keyword("const")?;
        let double = if self.is_keyword("double") {
            self.bump();
            true
        } else {
            self.keyword("int")?;
            false
        };
        let mut dims = 0;
        while self.eat(&Tok::LBracket) {
            self.expect(Tok::RBracket)?;
            dims += 1;
        }
        if double && dims > 0 {
            return Err(ModelError::Syntax {
                pos,
                msg: "only integer tables are supported".into(),
            });
        }
        let (name, _) = self.ident()?;
        self.expect(Tok::Eq)?;
        let value = if dims > 0 {
            ConstValue::Table(self.table_lit()?)
        } else if double {
            ConstValue::Double(self.expr()?)
        } else {
            ConstValue::Int(self.expr()?)
        };
        self.expect(Tok::Semi)?;
        Ok(ConstDecl {
            name,
            dims,
            value,
            pos,
        })
    }

    fn table_lit(&mut self) -> Result<TableLit, ModelError> {
        if *self.peek() != Tok::LBracket {
            return Ok(TableLit::Leaf(self.expr()?));
        }
        let pos = self.bump().1;
        let mut items = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                items.push(self.table_lit()?);
                if self.eat(&Tok::RBracket) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(TableLit::List(items, pos))
    }

    fn player_decl(&mut self) -> Result<PlayerDecl, ModelError> {
        let (kw, pos) = self.bump();
        let player = if kw == Tok::Ident("player1".into()) {
            Player::One
        } else {
            Player::Two
        };
        self.expect(Tok::LBracket)?;
        let mut labels = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                labels.push(self.ident()?);
                if self.eat(&Tok::RBracket) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(PlayerDecl {
            player,
            labels,
            pos,
        })
    }

    fn module(&mut self) -> Result<Module, ModelError> {
        let pos = self.keyword("module")?;
        let (name, _) = self.ident()?;
        let mut m = Module {
            name,
            vars: Vec::new(),
            commands: Vec::new(),
            pos,
        };
        loop {
            if self.is_keyword("endmodule") {
                self.bump();
                return Ok(m);
            }
            match (self.peek(), self.peek_at(1)) {
                (Tok::LBracket, _) => m.commands.push(self.command()?),
                (Tok::Ident(_), Tok::Colon) => m.vars.push(self.var_decl()?),
                _ => return self.error("a variable, a command or `endmodule`"),
            }
        }
    }

    fn var_decl(&mut self) -> Result<VarDecl, ModelError> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::Colon)?;
        self.expect(Tok::LBracket)?;
        let lo = self.expr()?;
        self.expect(Tok::DotDot)?;
        let hi = self.expr()?;
        self.expect(Tok::RBracket)?;
        self.keyword("init")?;
        let init = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(VarDecl {
            name,
            lo,
            hi,
            init,
            pos,
        })
    }

    fn command(&mut self) -> Result<Command, ModelError> {
        let pos = self.expect(Tok::LBracket)?;
        let (label, _) = self.ident()?;
        self.expect(Tok::RBracket)?;
        let guard = self.expr()?;
        self.expect(Tok::Arrow)?;
        let mut branches = vec![self.branch()?];
        while self.eat(&Tok::Plus) {
            branches.push(self.branch()?);
        }
        self.expect(Tok::Semi)?;
        Ok(Command {
            label,
            guard,
            branches,
            pos,
        })
    }

    fn starts_update(&self) -> bool {
        match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Tok::LParen, Tok::Ident(_), Tok::Prime) => true,
            (Tok::Ident(s), Tok::Semi | Tok::Plus, _) => s == "true",
            _ => false,
        }
    }

    fn branch(&mut self) -> Result<Branch, ModelError> {
        let pos = self.pos();
        let prob = if self.starts_update() {
            None
        } else {
            let p = self.expr()?;
            self.expect(Tok::Colon)?;
            Some(p)
        };
        if self.is_keyword("true") {
            self.bump();
            return Ok(Branch {
                prob,
                update: Vec::new(),
                pos,
            });
        }
        let mut update = vec![self.assignment()?];
        while self.eat(&Tok::And) {
            update.push(self.assignment()?);
        }
        Ok(Branch { prob, update, pos })
    }

    fn assignment(&mut self) -> Result<Assignment, ModelError> {
        self.expect(Tok::LParen)?;
        let (var, pos) = self.ident()?;
        self.expect(Tok::Prime)?;
        self.expect(Tok::Eq)?;
        let value = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(Assignment { var, value, pos })
    }

    fn rewards(&mut self, out: &mut Vec<RewardItem>) -> Result<(), ModelError> {
        self.keyword("rewards")?;
        while !self.is_keyword("endrewards") {
            let pos = self.pos();
            let guard = self.expr()?;
            self.expect(Tok::Colon)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            out.push(RewardItem { guard, value, pos });
        }
        self.bump();
        Ok(())
    }

    pub fn expr(&mut self) -> Result<Expr, ModelError> {
        self.or()
    }

    fn binary_chain(
        &mut self,
        next: fn(&mut Self) -> Result<Expr, ModelError>,
        ops: &[(Tok, BinOp)],
    ) -> Result<Expr, ModelError> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (t, op) in ops {
                if self.peek() == t {
                    let pos = self.bump().1;
                    let rhs = next(self)?;
                    lhs = Expr {
                        kind: ExprKind::Binary(*op, Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> Result<Expr, ModelError> {
        self.binary_chain(Self::and, &[(Tok::Or, BinOp::Or)])
    }

    fn and(&mut self) -> Result<Expr, ModelError> {
        self.binary_chain(Self::not, &[(Tok::And, BinOp::And)])
    }

    fn not(&mut self) -> Result<Expr, ModelError> {
        if *self.peek() == Tok::Not {
            let pos = self.bump().1;
            let e = self.not()?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Not, Box::new(e)),
                pos,
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ModelError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.bump().1;
        let rhs = self.additive()?;
        Ok(Expr {
            kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            pos,
        })
    }

    fn additive(&mut self) -> Result<Expr, ModelError> {
        self.binary_chain(
            Self::multiplicative,
            &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)],
        )
    }

    fn multiplicative(&mut self) -> Result<Expr, ModelError> {
        self.binary_chain(
            Self::unary,
            &[
                (Tok::Star, BinOp::Mul),
                (Tok::Slash, BinOp::Div),
                (Tok::Percent, BinOp::Mod),
            ],
        )
    }

    fn unary(&mut self) -> Result<Expr, ModelError> {
        if *self.peek() == Tok::Minus {
            let pos = self.bump().1;
            let e = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Neg, Box::new(e)),
                pos,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ModelError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                ExprKind::Int(i)
            }
            Tok::Real(r) => {
                self.bump();
                ExprKind::Real(r)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                ExprKind::Bool(s == "true")
            }
            Tok::Ident(_) => {
                let (name, _) = self.ident()?;
                let mut idx = Vec::new();
                while self.eat(&Tok::LBracket) {
                    loop {
                        idx.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RBracket)?;
                }
                if idx.is_empty() {
                    ExprKind::Name(name)
                } else {
                    ExprKind::Index(name, idx)
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            _ => return self.error("an expression"),
        };
        Ok(Expr { kind, pos })
    }
}

const RESERVED: &[&str] = &[
    "const", "int", "double", "player1", "player2", "module", "endmodule", "init", "rewards",
    "endrewards", "true", "false",
];

fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

/// Names are unique across constants and variables; every command label
/// is owned by exactly one player.
fn check_declarations(ast: &ModelAst) -> Result<(), ModelError> {
    let mut names: BTreeMap<&str, Pos> = BTreeMap::new();
    let decls = ast
        .consts
        .iter()
        .map(|c| (c.name.as_str(), c.pos))
        .chain(ast.vars().map(|v| (v.name.as_str(), v.pos)));
    for (name, pos) in decls {
        if let Some(first) = names.insert(name, pos) {
            return Err(ModelError::Declaration {
                pos,
                msg: format!("`{name}` is already declared at {first}"),
            });
        }
    }
    let mut owner: BTreeMap<&str, Player> = BTreeMap::new();
    for decl in &ast.players {
        for (label, pos) in &decl.labels {
            match owner.insert(label, decl.player) {
                Some(p) if p != decl.player => {
                    return Err(ModelError::Declaration {
                        pos: *pos,
                        msg: format!("label `{label}` is owned by both players"),
                    })
                }
                _ => {}
            }
        }
    }
    for c in ast.commands() {
        if !owner.contains_key(c.label.as_str()) {
            return Err(ModelError::Declaration {
                pos: c.pos,
                msg: format!("label `{}` is not declared by `player1` or `player2`", c.label),
            });
        }
        let mut seen = BTreeMap::new();
        for b in &c.branches {
            seen.clear();
            for a in &b.update {
                if seen.insert(a.var.as_str(), ()).is_some() {
                    return Err(ModelError::Declaration {
                        pos: a.pos,
                        msg: format!("`{}` is assigned twice in one update", a.var),
                    });
                }
            }
        }
    }
    Ok(())
}
