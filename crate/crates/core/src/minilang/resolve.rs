//! Best-effort type resolution and member binding.
//!
//! Resolution never fails a file: accesses that cannot be resolved are marked
//! [`Access::Unknown`] and expression types degrade to [`ResolvedTy::Unknown`].
//! The tree itself is not reshaped; annotations live in side tables keyed by
//! expression [`NodeId`].

use std::collections::HashMap;

use super::ast::*;
use crate::registry::{ApiRef, Registry};

/// Type attributed to an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedTy {
    /// A builtin or declared type name.
    Known(String),
    /// The `null` literal: compatible with any reference type.
    Null,
    /// A bare identifier naming a registry type (static member receiver).
    TypeRef(String),
    Unknown,
}

impl ResolvedTy {
    pub fn known_name(&self) -> Option<&str> {
        match self {
            ResolvedTy::Known(name) => Some(name),
            _ => None,
        }
    }
}

/// Outcome of resolving one member access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Access {
    Api(ApiRef),
    Unknown,
}

#[derive(Debug, Clone)]
pub struct TypedProgram {
    pub program: Program,
    types: HashMap<NodeId, ResolvedTy>,
    accesses: HashMap<NodeId, Access>,
}

impl TypedProgram {
    pub fn ty(&self, expr: &Expr) -> &ResolvedTy {
        self.types.get(&expr.id).unwrap_or(&ResolvedTy::Unknown)
    }

    /// The member binding of a `Call`, `New` or `FieldGet` node. A `FieldGet`
    /// in assignment-target position is bound to the field's set entry.
    pub fn access(&self, expr: &Expr) -> Option<&Access> {
        self.accesses.get(&expr.id)
    }

    /// Inferred type of a `var` declaration, read off its initializer.
    pub fn decl_type<'a>(&'a self, stmt: &Statement) -> Option<&'a ResolvedTy> {
        match stmt {
            Statement::VarDecl { init, .. } => Some(self.ty(init)),
            _ => None,
        }
    }

    /// Every resolved access in source order, used for harvesting API mentions
    /// from documentation snippets.
    pub fn resolved_accesses_in_order(&self) -> Vec<ApiRef> {
        let mut out = Vec::new();
        for class in &self.program.classes {
            for method in &class.methods {
                self.collect_stmts(&method.body, &mut out);
            }
        }
        out
    }

    fn collect_stmts(&self, stmts: &[Statement], out: &mut Vec<ApiRef>) {
        for stmt in stmts {
            match stmt {
                Statement::VarDecl { init, .. } => self.collect_expr(init, out),
                Statement::Assign { target, value } => {
                    self.collect_expr(value, out);
                    self.collect_expr(target, out);
                }
                Statement::Expr(e) => self.collect_expr(e, out),
                Statement::Return(Some(e)) => self.collect_expr(e, out),
                Statement::Return(None) | Statement::Comment(_) => {}
                Statement::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    self.collect_expr(cond, out);
                    self.collect_stmts(then_block, out);
                    self.collect_stmts(else_block, out);
                }
                Statement::While { cond, body } => {
                    self.collect_expr(cond, out);
                    self.collect_stmts(body, out);
                }
            }
        }
    }

    fn collect_expr(&self, expr: &Expr, out: &mut Vec<ApiRef>) {
        match &expr.kind {
            ExprKind::Literal(_) | ExprKind::Var(_) => {}
            ExprKind::FieldGet { receiver, .. } => {
                self.collect_expr(receiver, out);
                if let Some(Access::Api(api)) = self.access(expr) {
                    out.push(api.clone());
                }
            }
            ExprKind::Call { receiver, args, .. } => {
                self.collect_expr(receiver, out);
                for arg in args {
                    self.collect_expr(arg, out);
                }
                if let Some(Access::Api(api)) = self.access(expr) {
                    out.push(api.clone());
                }
            }
            ExprKind::New { args, .. } => {
                for arg in args {
                    self.collect_expr(arg, out);
                }
                if let Some(Access::Api(api)) = self.access(expr) {
                    out.push(api.clone());
                }
            }
            ExprKind::Eq { left, right } => {
                self.collect_expr(left, out);
                self.collect_expr(right, out);
            }
        }
    }
}

pub fn resolve_types(program: Program, reg: &Registry) -> TypedProgram {
    let mut resolver = Resolver {
        reg,
        types: HashMap::new(),
        accesses: HashMap::new(),
    };
    for class in &program.classes {
        for method in &class.methods {
            resolver.method(method);
        }
    }
    TypedProgram {
        program,
        types: resolver.types,
        accesses: resolver.accesses,
    }
}

struct Resolver<'a> {
    reg: &'a Registry,
    types: HashMap<NodeId, ResolvedTy>,
    accesses: HashMap<NodeId, Access>,
}

type Scope = Vec<HashMap<String, ResolvedTy>>;

impl<'a> Resolver<'a> {
    fn method(&mut self, method: &MethodDecl) {
        let mut scopes: Scope = vec![HashMap::new()];
        for param in &method.params {
            let ty = if Registry::is_builtin(&param.ty) || self.reg.has_type(&param.ty) {
                ResolvedTy::Known(param.ty.clone())
            } else {
                ResolvedTy::Unknown
            };
            scopes.last_mut().unwrap().insert(param.name.clone(), ty);
        }
        self.block(&method.body, &mut scopes);
    }

    fn block(&mut self, stmts: &[Statement], scopes: &mut Scope) {
        for stmt in stmts {
            match stmt {
                Statement::VarDecl { name, init } => {
                    let ty = self.expr(init, scopes);
                    scopes.last_mut().unwrap().insert(name.clone(), ty);
                }
                Statement::Assign { target, value } => {
                    let value_ty = self.expr(value, scopes);
                    match &target.kind {
                        ExprKind::Var(name) => {
                            self.types.insert(target.id, value_ty.clone());
                            rebind(scopes, name, value_ty);
                        }
                        ExprKind::FieldGet { receiver, field } => {
                            let recv_ty = self.expr(receiver, scopes);
                            let access = self.resolve_field(&recv_ty, field, true);
                            let ty = match &access {
                                Access::Api(api) => ResolvedTy::Known(api.return_type.clone()),
                                Access::Unknown => ResolvedTy::Unknown,
                            };
                            self.types.insert(target.id, ty);
                            self.accesses.insert(target.id, access);
                        }
                        _ => {
                            // parser guarantees this is unreachable
                            self.expr(target, scopes);
                        }
                    }
                }
                Statement::Expr(e) => {
                    self.expr(e, scopes);
                }
                Statement::Return(value) => {
                    if let Some(e) = value {
                        self.expr(e, scopes);
                    }
                }
                Statement::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    self.expr(cond, scopes);
                    scopes.push(HashMap::new());
                    self.block(then_block, scopes);
                    scopes.pop();
                    scopes.push(HashMap::new());
                    self.block(else_block, scopes);
                    scopes.pop();
                }
                Statement::While { cond, body } => {
                    self.expr(cond, scopes);
                    scopes.push(HashMap::new());
                    self.block(body, scopes);
                    scopes.pop();
                }
                Statement::Comment(_) => {}
            }
        }
    }

    fn expr(&mut self, expr: &Expr, scopes: &mut Scope) -> ResolvedTy {
        let ty = match &expr.kind {
            ExprKind::Literal(lit) => match lit {
                Literal::Int(_) => ResolvedTy::Known("int".into()),
                Literal::Bool(_) => ResolvedTy::Known("bool".into()),
                Literal::Str(_) => ResolvedTy::Known("string".into()),
                Literal::Null => ResolvedTy::Null,
                Literal::Default(ty) => {
                    if Registry::is_builtin(ty) || self.reg.has_type(ty) {
                        ResolvedTy::Known(ty.clone())
                    } else {
                        ResolvedTy::Unknown
                    }
                }
            },
            ExprKind::Var(name) => match lookup(scopes, name) {
                Some(ty) => ty.clone(),
                None if self.reg.has_type(name) => ResolvedTy::TypeRef(name.clone()),
                None => ResolvedTy::Unknown,
            },
            ExprKind::FieldGet { receiver, field } => {
                let recv_ty = self.expr(receiver, scopes);
                let access = self.resolve_field(&recv_ty, field, false);
                let ty = match &access {
                    Access::Api(api) => ResolvedTy::Known(api.return_type.clone()),
                    Access::Unknown => ResolvedTy::Unknown,
                };
                self.accesses.insert(expr.id, access);
                ty
            }
            ExprKind::Call {
                receiver,
                method,
                args,
            } => {
                let recv_ty = self.expr(receiver, scopes);
                let arg_tys: Vec<ResolvedTy> = args.iter().map(|a| self.expr(a, scopes)).collect();
                let access = self.resolve_call(&recv_ty, method, &arg_tys);
                let ty = match &access {
                    Access::Api(api) => ResolvedTy::Known(api.return_type.clone()),
                    Access::Unknown => ResolvedTy::Unknown,
                };
                self.accesses.insert(expr.id, access);
                ty
            }
            ExprKind::New { type_name, args } => {
                let arg_tys: Vec<ResolvedTy> = args.iter().map(|a| self.expr(a, scopes)).collect();
                let access = self.resolve_ctor(type_name, &arg_tys);
                self.accesses.insert(expr.id, access);
                if self.reg.has_type(type_name) {
                    ResolvedTy::Known(type_name.clone())
                } else {
                    ResolvedTy::Unknown
                }
            }
            ExprKind::Eq { left, right } => {
                self.expr(left, scopes);
                self.expr(right, scopes);
                ResolvedTy::Known("bool".into())
            }
        };
        self.types.insert(expr.id, ty.clone());
        ty
    }

    fn resolve_field(&self, recv_ty: &ResolvedTy, field: &str, is_set: bool) -> Access {
        let (ty, want_static) = match recv_ty {
            ResolvedTy::Known(name) => (name.as_str(), false),
            ResolvedTy::TypeRef(name) => (name.as_str(), true),
            _ => return Access::Unknown,
        };
        let api = if is_set {
            self.reg.resolve_field_set(ty, field)
        } else {
            self.reg.resolve_field_get(ty, field)
        };
        match api {
            Some(api) if api.is_static == want_static => Access::Api(api.clone()),
            _ => Access::Unknown,
        }
    }

    fn resolve_call(&self, recv_ty: &ResolvedTy, method: &str, arg_tys: &[ResolvedTy]) -> Access {
        let (ty, want_static) = match recv_ty {
            ResolvedTy::Known(name) => (name.as_str(), false),
            ResolvedTy::TypeRef(name) => (name.as_str(), true),
            _ => return Access::Unknown,
        };
        let candidates: Vec<&ApiRef> = self
            .reg
            .methods_named(ty, method)
            .filter(|api| api.is_static == want_static && self.args_match(&api.arg_types, arg_tys))
            .collect();
        match candidates.as_slice() {
            [one] => Access::Api((*one).clone()),
            _ => Access::Unknown,
        }
    }

    fn resolve_ctor(&self, type_name: &str, arg_tys: &[ResolvedTy]) -> Access {
        let candidates: Vec<&ApiRef> = self
            .reg
            .constructors_of(type_name)
            .filter(|api| self.args_match(&api.arg_types, arg_tys))
            .collect();
        match candidates.as_slice() {
            [one] => Access::Api((*one).clone()),
            _ => Access::Unknown,
        }
    }

    fn args_match(&self, params: &[String], args: &[ResolvedTy]) -> bool {
        params.len() == args.len()
            && params.iter().zip(args).all(|(param, arg)| match arg {
                ResolvedTy::Known(name) => name == param,
                ResolvedTy::Null => self.reg.is_reference_type(param),
                // arguments of unknown type are wildcards, so documentation
                // fragments with free variables still bind; the candidate
                // still has to be unique
                ResolvedTy::Unknown => true,
                ResolvedTy::TypeRef(_) => false,
            })
    }
}

fn lookup<'s>(scopes: &'s Scope, name: &str) -> Option<&'s ResolvedTy> {
    scopes.iter().rev().find_map(|scope| scope.get(name))
}

fn rebind(scopes: &mut Scope, name: &str, ty: ResolvedTy) {
    for scope in scopes.iter_mut().rev() {
        if let Some(slot) = scope.get_mut(name) {
            *slot = ty;
            return;
        }
    }
    // assignment to an undeclared name: best effort, bind it here
    scopes.last_mut().unwrap().insert(name.to_string(), ty);
}
