//! Snippet synthesis: turns a rooted call sequence into MiniLang statements.
//!
//! The creation action decides how the object is built. Constructors and
//! static members declare the variable directly. An instance-member creation
//! needs a receiver object first: the top-ranked sequence over the receiver
//! type that also invokes the member (its *tracer*) is synthesized around it,
//! with the usage statements spliced in right after the first tracer
//! invocation. Recursion is bounded; past the bound the receiver degrades to
//! `default(U)`.
//!
//! Arguments are scaffolded with default values and named after their formal
//! declarations. Conditions become `action == default(U)`. Variable names come
//! from the mined name model, falling back to `var1`, `var2`, ...

use std::collections::HashSet;

use thiserror::Error;

use crate::align::{api_posterior, tokenize_query, Model};
use crate::extract::{NameModel, ScsGroup, ScsIndex};
use crate::minilang::{render_statements, Expr, ExprKind, Literal, Statement};
use crate::rank::{query_vector, retrieve, RankError, DEFAULT_TOP_K};
use crate::registry::{ApiKind, ApiRef, Registry, RegistryError, RESERVED_WORDS};
use crate::scs::{Scs, SparseVector};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("sequence does not start with a creation")]
    NotRooted,
    #[error("condition action {} returns void", .0.canonical())]
    VoidCondition(ApiRef),
    #[error("condition is unknown usage")]
    UnknownCondition,
    #[error("condition holds more than one action")]
    ComplexCondition,
    #[error("condition action {} is not readable", .0.canonical())]
    UnreadableCondition(ApiRef),
    #[error(transparent)]
    Default(#[from] RegistryError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

/// Tracer recursion bound when none is given.
pub const DEFAULT_DEPTH: u32 = 3;

#[derive(Debug, Clone)]
pub struct SynthOptions {
    /// Posterior entries kept in the query vector.
    pub top_k: usize,
    /// Recursive object-construction bound.
    pub depth: u32,
    /// Render boolean conditions as the bare expression instead of `== false`.
    pub idiomatic_bool: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            top_k: DEFAULT_TOP_K,
            depth: DEFAULT_DEPTH,
            idiomatic_bool: false,
        }
    }
}

/// Where a chosen identifier came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameOrigin {
    /// Mined from the corpus name model.
    Mined,
    /// The formal argument name in the member declaration.
    Formal,
    /// The `varN` fallback.
    Fallback,
}

#[derive(Debug, Clone)]
pub struct BoundName {
    pub role: String,
    pub name: String,
    pub origin: NameOrigin,
}

/// Forbidden-identifier discipline plus the name model.
pub struct NamingContext<'a> {
    forbidden: HashSet<String>,
    names: &'a NameModel,
    fallback_counter: u32,
    bound: Vec<BoundName>,
}

impl<'a> NamingContext<'a> {
    pub fn new(names: &'a NameModel) -> NamingContext<'a> {
        NamingContext {
            forbidden: RESERVED_WORDS.iter().map(|s| s.to_string()).collect(),
            names,
            fallback_counter: 1,
            bound: Vec::new(),
        }
    }

    /// First non-forbidden candidate, else the first non-forbidden `varN`.
    /// The chosen name becomes forbidden.
    pub fn pick_name<S: AsRef<str>>(
        &mut self,
        candidates: &[S],
        role: &str,
        origin: NameOrigin,
    ) -> String {
        for c in candidates {
            let c = c.as_ref();
            if !self.forbidden.contains(c) {
                self.forbidden.insert(c.to_string());
                self.bound.push(BoundName {
                    role: role.to_string(),
                    name: c.to_string(),
                    origin,
                });
                return c.to_string();
            }
        }
        loop {
            let name = format!("var{}", self.fallback_counter);
            self.fallback_counter += 1;
            if !self.forbidden.contains(&name) {
                self.forbidden.insert(name.clone());
                self.bound.push(BoundName {
                    role: role.to_string(),
                    name: name.clone(),
                    origin: NameOrigin::Fallback,
                });
                return name;
            }
        }
    }

    fn mined(&self, api: &ApiRef) -> Vec<String> {
        let list = match api.kind {
            ApiKind::FieldGet => self.names.field_names(api),
            _ => self.names.creator_names(api),
        };
        list.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn bound_names(&self) -> &[BoundName] {
        &self.bound
    }
}

/// A synthesized snippet.
#[derive(Debug, Clone)]
pub struct Snippet {
    pub text: String,
    pub statements: Vec<Statement>,
    pub root_scs: Scs,
    pub root_canon: String,
    pub root_type: String,
    pub score: f64,
    pub bound_names: Vec<BoundName>,
}

#[derive(Debug, Default)]
pub struct QueryOutcome {
    pub snippets: Vec<Snippet>,
    pub groups_considered: usize,
    pub diagnostics: Vec<String>,
}

pub struct Synthesizer<'a> {
    reg: &'a Registry,
    index: &'a ScsIndex,
    names: &'a NameModel,
    options: SynthOptions,
}

struct TracerState<'t> {
    api: &'t ApiRef,
    capture_var: String,
    inner: Option<Vec<Statement>>,
}

impl<'a> Synthesizer<'a> {
    pub fn new(
        reg: &'a Registry,
        index: &'a ScsIndex,
        names: &'a NameModel,
        options: SynthOptions,
    ) -> Synthesizer<'a> {
        Synthesizer {
            reg,
            index,
            names,
            options,
        }
    }

    /// Synthesizes one rooted, simplified sequence into statements binding `v`.
    pub fn code_gen(
        &self,
        ch: &Scs,
        v: &str,
        ctx: &mut NamingContext,
        qv: &SparseVector,
        depth: u32,
    ) -> Result<Vec<Statement>, SynthError> {
        if ch.is_empty() {
            return Ok(Vec::new());
        }
        self.gen_rooted(ch, v, ctx, qv, depth, &mut None)
    }

    fn gen_rooted(
        &self,
        ch: &Scs,
        v: &str,
        ctx: &mut NamingContext,
        qv: &SparseVector,
        depth: u32,
        tracer: &mut Option<TracerState<'_>>,
    ) -> Result<Vec<Statement>, SynthError> {
        let (creation, rest) = split_rooted(ch)?;
        let inner = self.gen_seq(rest, v, ctx, qv, depth, tracer)?;
        self.construct_object(creation, v, inner, ctx, qv, depth)
    }

    fn gen_seq(
        &self,
        items: &[Scs],
        v: &str,
        ctx: &mut NamingContext,
        qv: &SparseVector,
        depth: u32,
        tracer: &mut Option<TracerState<'_>>,
    ) -> Result<Vec<Statement>, SynthError> {
        let mut out = Vec::new();
        for item in items {
            out.extend(self.gen_node(item, v, ctx, qv, depth, tracer)?);
        }
        Ok(out)
    }

    fn gen_node(
        &self,
        ch: &Scs,
        v: &str,
        ctx: &mut NamingContext,
        qv: &SparseVector,
        depth: u32,
        tracer: &mut Option<TracerState<'_>>,
    ) -> Result<Vec<Statement>, SynthError> {
        match ch {
            Scs::Empty => Ok(Vec::new()),
            Scs::Unknown => Ok(vec![Statement::Comment(format!("{v} used elsewhere"))]),
            Scs::Seq(items) => self.gen_seq(items, v, ctx, qv, depth, tracer),
            Scs::Action(api) => {
                if let Some(state) = tracer {
                    if state.inner.is_some() && api == state.api {
                        return self.capture_tracer(api, v, ctx, tracer);
                    }
                }
                self.gen_usage_action(api, v, ctx)
            }
            Scs::If { cond, then, els } => {
                let (mut stmts, cond_expr) = self.gen_condition(cond, v, ctx, tracer)?;
                let then_block = self.gen_node(then, v, ctx, qv, depth, tracer)?;
                let else_block = self.gen_node(els, v, ctx, qv, depth, tracer)?;
                stmts.push(Statement::If {
                    cond: cond_expr,
                    then_block,
                    else_block,
                });
                Ok(stmts)
            }
            Scs::While { cond, body } => {
                let (mut stmts, cond_expr) = self.gen_condition(cond, v, ctx, tracer)?;
                let body = self.gen_node(body, v, ctx, qv, depth, tracer)?;
                stmts.push(Statement::While {
                    cond: cond_expr,
                    body,
                });
                Ok(stmts)
            }
        }
    }

    /// A plain (non-creation) action on `v`.
    fn gen_usage_action(
        &self,
        api: &ApiRef,
        v: &str,
        ctx: &mut NamingContext,
    ) -> Result<Vec<Statement>, SynthError> {
        match api.kind {
            ApiKind::Method | ApiKind::Constructor => {
                let (mut stmts, call) =
                    self.member_call_expr(api, Expr::synthetic(ExprKind::Var(v.into())), ctx)?;
                stmts.push(Statement::Expr(call));
                Ok(stmts)
            }
            ApiKind::FieldGet => {
                let candidates = ctx.mined(api);
                let name = ctx.pick_name(
                    &candidates,
                    &format!("value of {}", api.canonical()),
                    NameOrigin::Mined,
                );
                Ok(vec![Statement::VarDecl {
                    name,
                    init: Expr::synthetic(ExprKind::FieldGet {
                        receiver: Box::new(self.receiver_expr(api, v)),
                        field: api.member.clone(),
                    }),
                }])
            }
            ApiKind::FieldSet => {
                let value = self.default_literal_expr(&api.return_type)?;
                Ok(vec![Statement::Assign {
                    target: Expr::synthetic(ExprKind::FieldGet {
                        receiver: Box::new(self.receiver_expr(api, v)),
                        field: api.member.clone(),
                    }),
                    value,
                }])
            }
        }
    }

    /// Builds the call or access expression for `api` with scaffolded
    /// arguments, returning the argument declarations alongside it.
    fn member_call_expr(
        &self,
        api: &ApiRef,
        receiver: Expr,
        ctx: &mut NamingContext,
    ) -> Result<(Vec<Statement>, Expr), SynthError> {
        let (stmts, idents) = self.synth_arguments(api, ctx)?;
        let args = idents
            .into_iter()
            .map(|name| Expr::synthetic(ExprKind::Var(name)))
            .collect();
        let expr = match api.kind {
            ApiKind::Constructor => Expr::synthetic(ExprKind::New {
                type_name: api.declaring_type.clone(),
                args,
            }),
            ApiKind::Method => Expr::synthetic(ExprKind::Call {
                receiver: Box::new(receiver),
                method: api.member.clone(),
                args,
            }),
            ApiKind::FieldGet => Expr::synthetic(ExprKind::FieldGet {
                receiver: Box::new(receiver),
                field: api.member.clone(),
            }),
            ApiKind::FieldSet => unreachable!("field sets are generated as assignments"),
        };
        Ok((stmts, expr))
    }

    fn receiver_expr(&self, api: &ApiRef, v: &str) -> Expr {
        if api.is_static {
            Expr::synthetic(ExprKind::Var(api.declaring_type.clone()))
        } else {
            Expr::synthetic(ExprKind::Var(v.to_string()))
        }
    }

    /// One `var aᵢ = default(Tᵢ);` per argument, named by the declared formal
    /// name when the registry has one.
    pub fn synth_arguments(
        &self,
        api: &ApiRef,
        ctx: &mut NamingContext,
    ) -> Result<(Vec<Statement>, Vec<String>), SynthError> {
        let mut stmts = Vec::new();
        let mut idents = Vec::new();
        for (i, ty) in api.arg_types.iter().enumerate() {
            let formal = self.reg.formal_arg_name(api, i).map(str::to_string);
            let candidates: Vec<&str> = formal.as_deref().into_iter().collect();
            let name = ctx.pick_name(
                &candidates,
                &format!("argument {i} of {}", api.canonical()),
                NameOrigin::Formal,
            );
            stmts.push(Statement::VarDecl {
                name: name.clone(),
                init: self.default_literal_expr(ty)?,
            });
            idents.push(name);
        }
        Ok((stmts, idents))
    }

    /// `action == default(U)` for the single action of a condition, argument
    /// scaffolding hoisted in front. A capture-pending tracer match binds the
    /// target variable first and compares it instead.
    fn gen_condition(
        &self,
        cond: &Scs,
        v: &str,
        ctx: &mut NamingContext,
        tracer: &mut Option<TracerState<'_>>,
    ) -> Result<(Vec<Statement>, Expr), SynthError> {
        let api = match cond {
            Scs::Action(api) => api,
            Scs::Unknown => return Err(SynthError::UnknownCondition),
            _ => return Err(SynthError::ComplexCondition),
        };
        if let Some(state) = tracer {
            if state.inner.is_some() && api == state.api {
                let capture_var = state.capture_var.clone();
                let stmts = self.capture_tracer(api, v, ctx, tracer)?;
                let cond = Expr::synthetic(ExprKind::Eq {
                    left: Box::new(Expr::synthetic(ExprKind::Var(capture_var))),
                    right: Box::new(self.default_literal_expr(&api.return_type)?),
                });
                return Ok((stmts, cond));
            }
        }
        let (stmts, expr) = self.condition_expr(api, v, ctx)?;
        Ok((stmts, expr))
    }

    /// The plain condition form of one action.
    pub fn synth_condition(
        &self,
        api: &ApiRef,
        v: &str,
        ctx: &mut NamingContext,
    ) -> Result<(Vec<Statement>, Expr), SynthError> {
        self.condition_expr(api, v, ctx)
    }

    fn condition_expr(
        &self,
        api: &ApiRef,
        v: &str,
        ctx: &mut NamingContext,
    ) -> Result<(Vec<Statement>, Expr), SynthError> {
        if api.kind == ApiKind::FieldSet {
            return Err(SynthError::UnreadableCondition(api.clone()));
        }
        if api.return_type == "void" {
            return Err(SynthError::VoidCondition(api.clone()));
        }
        let (stmts, value) = self.member_call_expr(api, self.receiver_expr(api, v), ctx)?;
        if self.options.idiomatic_bool && api.return_type == "bool" {
            return Ok((stmts, value));
        }
        let cond = Expr::synthetic(ExprKind::Eq {
            left: Box::new(value),
            right: Box::new(self.default_literal_expr(&api.return_type)?),
        });
        Ok((stmts, cond))
    }

    /// First invocation of the tracer inside the receiver's sequence: bind the
    /// target object and splice the pending usage statements right after.
    fn capture_tracer(
        &self,
        api: &ApiRef,
        receiver_var: &str,
        ctx: &mut NamingContext,
        tracer: &mut Option<TracerState<'_>>,
    ) -> Result<Vec<Statement>, SynthError> {
        let state = tracer.as_mut().expect("caller checked");
        let (mut stmts, value) = self.member_call_expr(
            api,
            Expr::synthetic(ExprKind::Var(receiver_var.to_string())),
            ctx,
        )?;
        stmts.push(Statement::VarDecl {
            name: state.capture_var.clone(),
            init: value,
        });
        stmts.extend(state.inner.take().expect("capture happens once"));
        Ok(stmts)
    }

    /// Emits the statements constructing `v` from its creation action and
    /// splices `inner` (the object's usage) after the binding.
    pub fn construct_object(
        &self,
        creation: &ApiRef,
        v: &str,
        inner: Vec<Statement>,
        ctx: &mut NamingContext,
        qv: &SparseVector,
        depth: u32,
    ) -> Result<Vec<Statement>, SynthError> {
        // constructors and static members need no receiver object
        if creation.kind == ApiKind::Constructor || creation.is_static {
            let (mut stmts, value) =
                self.member_call_expr(creation, self.receiver_expr(creation, v), ctx)?;
            stmts.push(Statement::VarDecl {
                name: v.to_string(),
                init: value,
            });
            stmts.extend(inner);
            return Ok(stmts);
        }

        let receiver_type = creation.declaring_type.clone();
        if depth > 0 {
            let candidates = retrieve(qv, self.index, usize::MAX, Some(creation))?;
            for hit in candidates {
                if hit.group.root_type != receiver_type || !hit.group.is_rooted() {
                    continue;
                }
                let Some(receiver_creation) = hit.group.scs.first_action() else {
                    continue;
                };
                let saved_bound = ctx.bound.len();
                let candidate_names = ctx.mined(receiver_creation);
                let u = ctx.pick_name(
                    &candidate_names,
                    &format!("receiver {receiver_type}"),
                    NameOrigin::Mined,
                );
                let mut state = Some(TracerState {
                    api: creation,
                    capture_var: v.to_string(),
                    inner: Some(inner.clone()),
                });
                match self.gen_rooted(&hit.group.scs, &u, ctx, qv, depth - 1, &mut state) {
                    Ok(mut stmts) => {
                        if let Some(pending) = state.as_mut().and_then(|s| s.inner.take()) {
                            // the tracer only appeared as the group's own
                            // creation; invoke it explicitly on the receiver
                            let (arg_stmts, value) = self.member_call_expr(
                                creation,
                                Expr::synthetic(ExprKind::Var(u.clone())),
                                ctx,
                            )?;
                            stmts.extend(arg_stmts);
                            stmts.push(Statement::VarDecl {
                                name: v.to_string(),
                                init: value,
                            });
                            stmts.extend(pending);
                        }
                        return Ok(stmts);
                    }
                    Err(_) => {
                        // this receiver group cannot be synthesized; try the next
                        ctx.bound.truncate(saved_bound);
                        continue;
                    }
                }
            }
        }

        // depth exhausted or no usable receiver group: default receiver
        let (mut stmts, value) = self.member_call_expr(
            creation,
            Expr::synthetic(ExprKind::Literal(Literal::Default(receiver_type))),
            ctx,
        )?;
        stmts.push(Statement::VarDecl {
            name: v.to_string(),
            init: value,
        });
        stmts.extend(inner);
        Ok(stmts)
    }

    fn default_literal_expr(&self, ty: &str) -> Result<Expr, SynthError> {
        let text = self.reg.default_literal(ty)?;
        let lit = match text.as_str() {
            "null" => Literal::Null,
            "0" => Literal::Int(0),
            "false" => Literal::Bool(false),
            _ => Literal::Default(ty.to_string()),
        };
        Ok(Expr::synthetic(ExprKind::Literal(lit)))
    }
}

fn split_rooted(ch: &Scs) -> Result<(&ApiRef, &[Scs]), SynthError> {
    match ch {
        Scs::Action(api) => Ok((api, &[])),
        Scs::Seq(items) => match items.first() {
            Some(Scs::Action(api)) => Ok((api, &items[1..])),
            _ => Err(SynthError::NotRooted),
        },
        _ => Err(SynthError::NotRooted),
    }
}

/// The online pipeline: tokenize, expand to APIs, retrieve groups, synthesize
/// `m` snippets in retrieval order. Groups that cannot be synthesized are
/// skipped so `m` outputs are still attempted.
pub fn synthesize(
    query: &str,
    model: &Model,
    index: &ScsIndex,
    names: &NameModel,
    reg: &Registry,
    options: &SynthOptions,
    m: usize,
) -> Result<QueryOutcome, SynthError> {
    let mut outcome = QueryOutcome::default();
    let tokens = tokenize_query(query, &model.filter);
    if tokens.is_empty() {
        outcome
            .diagnostics
            .push("query has no usable tokens".into());
        return Ok(outcome);
    }
    let posterior = api_posterior(&tokens, &model.table, &model.stats).unwrap_or_default();
    if posterior.is_empty() {
        outcome
            .diagnostics
            .push("no query token is known to the model".into());
        return Ok(outcome);
    }
    let qv = query_vector(&posterior, reg, options.top_k);
    let synthesizer = Synthesizer::new(reg, index, names, options.clone());
    let hits = retrieve(&qv, index, usize::MAX, None)?;
    for hit in hits {
        if outcome.snippets.len() >= m {
            break;
        }
        if hit.score <= 0.0 {
            break; // remaining groups share no API with the query
        }
        outcome.groups_considered += 1;
        match synthesize_group(&synthesizer, hit.group, hit.score, &qv) {
            Ok(snippet) => outcome.snippets.push(snippet),
            Err(e) => outcome
                .diagnostics
                .push(format!("skipped `{}`: {e}", hit.group.canon)),
        }
    }
    Ok(outcome)
}

fn synthesize_group(
    synthesizer: &Synthesizer<'_>,
    group: &ScsGroup,
    score: f64,
    qv: &SparseVector,
) -> Result<Snippet, SynthError> {
    if !group.is_rooted() {
        return Err(SynthError::NotRooted);
    }
    let mut ctx = NamingContext::new(synthesizer.names);
    let creation = group.scs.first_action().ok_or(SynthError::NotRooted)?;
    let candidates = ctx.mined(creation);
    let v = ctx.pick_name(&candidates, "root", NameOrigin::Mined);
    let statements =
        synthesizer.code_gen(&group.scs, &v, &mut ctx, qv, synthesizer.options.depth)?;
    Ok(Snippet {
        text: render_statements(&statements, 0),
        statements,
        root_scs: group.scs.clone(),
        root_canon: group.canon.clone(),
        root_type: group.root_type.clone(),
        score,
        bound_names: ctx.bound_names().to_vec(),
    })
}
