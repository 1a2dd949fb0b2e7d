use super::lexer::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&",
            BinOp::Or => "|",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Real(f64),
    Bool(bool),
    Name(String),
    /// `NAME[i][j]` or `NAME[i, j]`.
    Index(String, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstValue {
    Int(Expr),
    Double(Expr),
    /// Nested list literal; leaves are integer expressions.
    Table(TableLit),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TableLit {
    Leaf(Expr),
    List(Vec<TableLit>, Pos),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    /// Declared number of dimensions for tables, 0 for scalars.
    pub dims: usize,
    pub value: ConstValue,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub lo: Expr,
    pub hi: Expr,
    pub init: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub var: String,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// `None` when the probability is omitted (single-branch commands).
    pub prob: Option<Expr>,
    /// Empty for `true`.
    pub update: Vec<Assignment>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub label: String,
    pub guard: Expr,
    pub branches: Vec<Branch>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub commands: Vec<Command>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardItem {
    pub guard: Expr,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerDecl {
    pub player: Player,
    pub labels: Vec<(String, Pos)>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelAst {
    pub consts: Vec<ConstDecl>,
    pub players: Vec<PlayerDecl>,
    pub modules: Vec<Module>,
    pub rewards: Vec<RewardItem>,
}

impl ModelAst {
    pub fn commands(&self) -> impl Iterator<Item = &Command> {
        self.modules.iter().flat_map(|m| m.commands.iter())
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarDecl> {
        self.modules.iter().flat_map(|m| m.vars.iter())
    }
}
