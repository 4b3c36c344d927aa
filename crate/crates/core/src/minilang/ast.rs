//! Abstract syntax for MiniLang source files.
//!
//! Expressions carry a [`NodeId`] so the resolver can annotate them through
//! side tables without reshaping the tree. Equality ignores ids: two trees are
//! equal when they have the same shape and content.

/// Identity of an expression node within one parsed program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Id used for expressions built programmatically (never resolved in place).
    pub const SYNTHETIC: NodeId = NodeId(u32::MAX);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub methods: Vec<MethodDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub return_type: String,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    VarDecl {
        name: String,
        init: Expr,
    },
    /// `target = value;` where target is a variable or a field access.
    Assign {
        target: Expr,
        value: Expr,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then_block: Vec<Statement>,
        else_block: Vec<Statement>,
    },
    While {
        cond: Expr,
        body: Vec<Statement>,
    },
    Return(Option<Expr>),
    /// Only produced by the synthesizer; the parser treats `//` lines as trivia.
    Comment(String),
}

#[derive(Debug, Clone, Eq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
}

impl Expr {
    pub fn synthetic(kind: ExprKind) -> Expr {
        Expr {
            id: NodeId::SYNTHETIC,
            kind,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var(name) => Some(name),
            _ => None,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Literal(Literal),
    Var(String),
    FieldGet {
        receiver: Box<Expr>,
        field: String,
    },
    Call {
        receiver: Box<Expr>,
        method: String,
        args: Vec<Expr>,
    },
    New {
        type_name: String,
        args: Vec<Expr>,
    },
    /// Appears only as a whole condition expression.
    Eq {
        left: Box<Expr>,
        right: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    /// `default(T)`: the zero value of type `T`.
    Default(String),
}
