//! Mining structured call sequences and variable names from a typed corpus.
//!
//! Extraction works per method body. For every unaliased local of a registry
//! type, the walker builds the call sequence describing its lifetime:
//!
//! 1. the declaration's member access becomes the creation action;
//! 2. calls and field accesses on the variable become actions;
//! 3. statement lists become sequences;
//! 4. `if`/`while` map structurally, conditions included;
//! 5. passing the variable as an argument inserts `Unknown`, as does any
//!    access the resolver could not bind.
//!
//! Re-assigning a tracked variable ends its lifetime and starts a new one.
//! A variable assigned inside a nested block, or copied to or from another
//! variable, is skipped entirely (the analysis stays conservative).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minilang::{
    parse_program, resolve_types, Access, Expr, ExprKind, MethodDecl, ParseError, Statement,
    TypedProgram,
};
use crate::registry::{ApiKind, ApiRef, Registry};
use crate::scs::{canonical_form, simplify, to_vector, Scs, SparseVector};

const INDEX_FORMAT: &str = "scs-index";
const NAMES_FORMAT: &str = "name-model";
const FORMAT_VERSION: u32 = 1;
const MAX_SOURCES_PER_GROUP: usize = 5;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt file {file}: {reason}")]
    Corrupt { file: String, reason: String },
    #[error("version mismatch in {file}: found {found}, expected {expected}")]
    VersionMismatch {
        file: String,
        found: u32,
        expected: u32,
    },
    #[error("index was built against a different registry: {0}")]
    RegistryMismatch(String),
}

/// One extracted variable lifetime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedLifetime {
    pub var: String,
    pub root_type: String,
    pub scs: Scs,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceRef {
    pub file: String,
    pub method: String,
}

/// A grouped call sequence with its occurrence count.
#[derive(Debug, Clone, PartialEq)]
pub struct ScsGroup {
    pub canon: String,
    pub scs: Scs,
    pub count: u64,
    pub root_type: String,
    pub vector: SparseVector,
    pub sources: Vec<SourceRef>,
}

impl ScsGroup {
    pub fn is_rooted(&self) -> bool {
        self.scs.is_rooted_for(&self.root_type)
    }
}

/// Grouped call sequences keyed by canonical form, plus the tracer index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScsIndex {
    dims: usize,
    groups: BTreeMap<String, ScsGroup>,
    tracers: HashMap<ApiRef, Vec<String>>,
}

impl ScsIndex {
    pub fn new(dims: usize) -> ScsIndex {
        ScsIndex {
            dims,
            groups: BTreeMap::new(),
            tracers: HashMap::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Groups in canonical-form order.
    pub fn groups(&self) -> impl Iterator<Item = &ScsGroup> {
        self.groups.values()
    }

    pub fn get(&self, canon: &str) -> Option<&ScsGroup> {
        self.groups.get(canon)
    }

    /// Canonical forms of the groups containing `api`, sorted.
    pub fn tracer_groups(&self, api: &ApiRef) -> &[String] {
        self.tracers.get(api).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn insert(&mut self, lifetime: &ExtractedLifetime, source: SourceRef, reg: &Registry) {
        let canon = canonical_form(&lifetime.scs);
        let entry = self
            .groups
            .entry(canon.clone())
            .or_insert_with(|| ScsGroup {
                canon,
                scs: lifetime.scs.clone(),
                count: 0,
                root_type: lifetime.root_type.clone(),
                vector: to_vector(&lifetime.scs, reg),
                sources: Vec::new(),
            });
        entry.count += 1;
        // keep the lexicographically least root type and source sample so the
        // merge result cannot depend on file order
        if lifetime.root_type < entry.root_type {
            entry.root_type = lifetime.root_type.clone();
        }
        if !entry.sources.contains(&source) {
            entry.sources.push(source);
            entry.sources.sort();
            entry.sources.truncate(MAX_SOURCES_PER_GROUP);
        }
    }

    /// Recomputes the tracer map from the stored groups. Needed after a run
    /// of manual [`ScsIndex::insert`] calls; `build_index` does it for you.
    pub fn rebuild_tracers(&mut self) {
        self.tracers.clear();
        for group in self.groups.values() {
            let mut seen = HashSet::new();
            for api in group.scs.actions() {
                if seen.insert(api.clone()) {
                    self.tracers
                        .entry(api.clone())
                        .or_default()
                        .push(group.canon.clone());
                }
            }
        }
        // BTreeMap iteration already yields canon order, but make it explicit
        for list in self.tracers.values_mut() {
            list.sort_unstable();
        }
    }
}

/// Mined variable-name frequencies: which identifiers the corpus binds to the
/// result of each creating member, and to each field read.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NameModel {
    by_creator: HashMap<ApiRef, Vec<(String, u64)>>,
    by_field: HashMap<ApiRef, Vec<(String, u64)>>,
}

impl NameModel {
    /// Candidate names for objects produced by `api`, best first.
    pub fn creator_names(&self, api: &ApiRef) -> &[(String, u64)] {
        self.by_creator.get(api).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Candidate names for values read from field `api`.
    pub fn field_names(&self, api: &ApiRef) -> &[(String, u64)] {
        self.by_field.get(api).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_creator_count(&self, api: &ApiRef) -> u64 {
        self.creator_names(api).iter().map(|(_, n)| n).sum()
    }

    fn add(&mut self, api: &ApiRef, name: &str) {
        let map = match api.kind {
            ApiKind::FieldGet => &mut self.by_field,
            ApiKind::FieldSet => return,
            _ => &mut self.by_creator,
        };
        let list = map.entry(api.clone()).or_default();
        match list.iter_mut().find(|(n, _)| n == name) {
            Some((_, count)) => *count += 1,
            None => list.push((name.to_string(), 1)),
        }
    }

    fn finalize(&mut self) {
        for list in self
            .by_creator
            .values_mut()
            .chain(self.by_field.values_mut())
        {
            list.sort_by(|(an, ac), (bn, bc)| bc.cmp(ac).then_with(|| an.cmp(bn)));
        }
    }
}

/// A corpus file: a display name and its source text.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub name: String,
    pub source: String,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusReport {
    pub files_total: usize,
    pub files_parsed: usize,
    pub parse_failures: Vec<(String, ParseError)>,
    pub methods_visited: usize,
    pub lifetimes_extracted: usize,
}

/// Extracts every lifetime from one method of a typed program.
pub fn extract_method(
    typed: &TypedProgram,
    method: &MethodDecl,
    reg: &Registry,
) -> Vec<ExtractedLifetime> {
    let mut skip = SkipSet::default();
    scan_skips(
        &method.body,
        &mut vec![method.params.iter().map(|p| p.name.clone()).collect()],
        &mut skip,
    );
    let walker = Walker { typed, reg, skip };
    let mut out = Vec::new();
    walker.block_lifetimes(&method.body, &mut out);
    out
}

#[derive(Debug, Default)]
struct SkipSet {
    aliased: HashSet<String>,
    conditional_reassign: HashSet<String>,
}

impl SkipSet {
    fn skip(&self, name: &str) -> bool {
        self.aliased.contains(name) || self.conditional_reassign.contains(name)
    }
}

fn scan_skips(stmts: &[Statement], scopes: &mut Vec<HashSet<String>>, skip: &mut SkipSet) {
    for stmt in stmts {
        match stmt {
            Statement::VarDecl { name, init } => {
                if let ExprKind::Var(u) = &init.kind {
                    skip.aliased.insert(u.clone());
                    skip.aliased.insert(name.clone());
                }
                scopes.last_mut().unwrap().insert(name.clone());
            }
            Statement::Assign { target, value } => {
                if let ExprKind::Var(name) = &target.kind {
                    if let ExprKind::Var(u) = &value.kind {
                        skip.aliased.insert(u.clone());
                    }
                    match scopes.iter().rposition(|s| s.contains(name)) {
                        Some(depth) if depth + 1 < scopes.len() => {
                            skip.conditional_reassign.insert(name.clone());
                        }
                        Some(_) => {}
                        None => {
                            scopes.last_mut().unwrap().insert(name.clone());
                        }
                    }
                }
            }
            Statement::If {
                then_block,
                else_block,
                ..
            } => {
                scopes.push(HashSet::new());
                scan_skips(then_block, scopes, skip);
                scopes.pop();
                scopes.push(HashSet::new());
                scan_skips(else_block, scopes, skip);
                scopes.pop();
            }
            Statement::While { body, .. } => {
                scopes.push(HashSet::new());
                scan_skips(body, scopes, skip);
                scopes.pop();
            }
            _ => {}
        }
    }
}

struct Walker<'a> {
    typed: &'a TypedProgram,
    reg: &'a Registry,
    skip: SkipSet,
}

impl<'a> Walker<'a> {
    fn block_lifetimes(&self, stmts: &[Statement], out: &mut Vec<ExtractedLifetime>) {
        let mut started: HashSet<&str> = HashSet::new();
        for (i, stmt) in stmts.iter().enumerate() {
            match stmt {
                Statement::VarDecl { name, init } => {
                    if !started.insert(name.as_str()) || self.skip.skip(name) {
                        continue;
                    }
                    self.lifetime_chain(name, init, i, stmts, out);
                }
                Statement::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    self.block_lifetimes(then_block, out);
                    self.block_lifetimes(else_block, out);
                }
                Statement::While { body, .. } => {
                    self.block_lifetimes(body, out);
                }
                _ => {}
            }
        }
    }

    /// Walks every lifetime of `name` in this block, starting at its first
    /// declaration: each re-assignment or re-declaration ends one lifetime and
    /// begins the next.
    fn lifetime_chain(
        &self,
        name: &str,
        first_init: &Expr,
        decl_index: usize,
        stmts: &[Statement],
        out: &mut Vec<ExtractedLifetime>,
    ) {
        let mut start_expr = first_init;
        let mut next = decl_index + 1;
        loop {
            let root_type = self
                .typed
                .ty(start_expr)
                .known_name()
                .filter(|t| self.reg.has_type(t))
                .map(str::to_string);
            let mut parts = vec![self.creation_scs(start_expr)];
            let mut boundary = None;
            for (k, stmt) in stmts.iter().enumerate().skip(next) {
                match stmt {
                    Statement::VarDecl { name: n, init } if n == name => {
                        parts.push(self.expr_scs(name, init));
                        boundary = Some((k, init));
                        break;
                    }
                    Statement::Assign { target, value } if target.as_var() == Some(name) => {
                        parts.push(self.expr_scs(name, value));
                        boundary = Some((k, value));
                        break;
                    }
                    other => parts.push(self.stmt_scs(name, other)),
                }
            }
            if let Some(root_type) = root_type {
                let scs = simplify(&Scs::seq(parts));
                if !scs.is_empty() {
                    out.push(ExtractedLifetime {
                        var: name.to_string(),
                        root_type,
                        scs,
                    });
                }
            }
            match boundary {
                Some((k, expr)) => {
                    start_expr = expr;
                    next = k + 1;
                }
                None => return,
            }
        }
    }

    /// Rule 1: the member access a lifetime starts from. Literal initializers
    /// create nothing.
    fn creation_scs(&self, init: &Expr) -> Scs {
        match &init.kind {
            ExprKind::Call { .. } | ExprKind::New { .. } | ExprKind::FieldGet { .. } => {
                match self.typed.access(init) {
                    Some(Access::Api(api)) => Scs::Action(api.clone()),
                    Some(Access::Unknown) => Scs::Unknown,
                    None => Scs::Empty,
                }
            }
            _ => Scs::Empty,
        }
    }

    fn stmt_scs(&self, v: &str, stmt: &Statement) -> Scs {
        match stmt {
            // the initializer may still refer to the tracked object, even when
            // the declaration shadows it (the caller stops the walk afterwards)
            Statement::VarDecl { init, .. } => self.expr_scs(v, init),
            Statement::Assign { target, value } => match &target.kind {
                ExprKind::Var(_) => self.expr_scs(v, value),
                ExprKind::FieldGet { receiver, .. } => {
                    let mut parts = vec![if value.as_var() == Some(v) {
                        // stored into another object's field: the object escapes
                        Scs::Unknown
                    } else {
                        self.expr_scs(v, value)
                    }];
                    parts.push(self.expr_scs(v, receiver));
                    if receiver.as_var() == Some(v) {
                        parts.push(match self.typed.access(target) {
                            Some(Access::Api(api)) => Scs::Action(api.clone()),
                            _ => Scs::Unknown,
                        });
                    }
                    Scs::seq(parts)
                }
                _ => Scs::Empty,
            },
            Statement::Expr(e) => self.expr_scs(v, e),
            Statement::Return(Some(e)) => {
                let mut parts = vec![self.expr_scs(v, e)];
                if e.as_var() == Some(v) {
                    // the object escapes to the caller
                    parts.push(Scs::Unknown);
                }
                Scs::seq(parts)
            }
            Statement::Return(None) | Statement::Comment(_) => Scs::Empty,
            Statement::If {
                cond,
                then_block,
                else_block,
            } => Scs::If {
                cond: Box::new(self.expr_scs(v, cond)),
                then: Box::new(self.nested_block_scs(v, then_block)),
                els: Box::new(self.nested_block_scs(v, else_block)),
            },
            Statement::While { cond, body } => Scs::While {
                cond: Box::new(self.expr_scs(v, cond)),
                body: Box::new(self.nested_block_scs(v, body)),
            },
        }
    }

    /// Rule 3 inside a nested block; a shadowing declaration of `v` hides the
    /// tracked object for the rest of the block.
    fn nested_block_scs(&self, v: &str, stmts: &[Statement]) -> Scs {
        let mut parts = Vec::new();
        for stmt in stmts {
            parts.push(self.stmt_scs(v, stmt));
            if let Statement::VarDecl { name, .. } = stmt {
                if name == v {
                    break;
                }
            }
        }
        Scs::seq(parts)
    }

    /// Rules 2 and 5 over one expression, atoms in evaluation order.
    fn expr_scs(&self, v: &str, expr: &Expr) -> Scs {
        match &expr.kind {
            ExprKind::Literal(_) | ExprKind::Var(_) => Scs::Empty,
            ExprKind::FieldGet { receiver, .. } => {
                let mut parts = vec![self.expr_scs(v, receiver)];
                if receiver.as_var() == Some(v) {
                    parts.push(match self.typed.access(expr) {
                        Some(Access::Api(api)) => Scs::Action(api.clone()),
                        _ => Scs::Unknown,
                    });
                }
                Scs::seq(parts)
            }
            ExprKind::Call { receiver, args, .. } => {
                let mut parts = vec![self.expr_scs(v, receiver)];
                for arg in args {
                    if arg.as_var() == Some(v) {
                        parts.push(Scs::Unknown);
                    } else {
                        parts.push(self.expr_scs(v, arg));
                    }
                }
                if receiver.as_var() == Some(v) {
                    parts.push(match self.typed.access(expr) {
                        Some(Access::Api(api)) => Scs::Action(api.clone()),
                        _ => Scs::Unknown,
                    });
                }
                Scs::seq(parts)
            }
            ExprKind::New { args, .. } => {
                let mut parts = Vec::new();
                for arg in args {
                    if arg.as_var() == Some(v) {
                        parts.push(Scs::Unknown);
                    } else {
                        parts.push(self.expr_scs(v, arg));
                    }
                }
                Scs::seq(parts)
            }
            ExprKind::Eq { left, right } => {
                Scs::seq(vec![self.expr_scs(v, left), self.expr_scs(v, right)])
            }
        }
    }
}

/// Mines name-frequency lists from every declaration with a resolved
/// member-access initializer. Formal parameter names are not mined; they come
/// from signatures at synthesis time.
fn mine_names(typed: &TypedProgram, model: &mut NameModel) {
    fn walk(stmts: &[Statement], typed: &TypedProgram, model: &mut NameModel) {
        for stmt in stmts {
            match stmt {
                Statement::VarDecl { name, init } => {
                    if let Some(Access::Api(api)) = typed.access(init) {
                        model.add(api, name);
                    }
                }
                Statement::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    walk(then_block, typed, model);
                    walk(else_block, typed, model);
                }
                Statement::While { body, .. } => walk(body, typed, model),
                _ => {}
            }
        }
    }
    for class in &typed.program.classes {
        for method in &class.methods {
            walk(&method.body, typed, model);
        }
    }
}

/// Runs extraction over a whole corpus. Parse failures are reported, never fatal.
pub fn build_index(files: &[CorpusFile], reg: &Registry) -> (ScsIndex, NameModel, CorpusReport) {
    let mut index = ScsIndex::new(reg.vocab_len());
    let mut names = NameModel::default();
    let mut report = CorpusReport {
        files_total: files.len(),
        ..CorpusReport::default()
    };

    for file in files {
        let program = match parse_program(&file.source) {
            Ok(p) => p,
            Err(e) => {
                report.parse_failures.push((file.name.clone(), e));
                continue;
            }
        };
        report.files_parsed += 1;
        let typed = resolve_types(program, reg);
        for class in &typed.program.classes {
            for method in &class.methods {
                report.methods_visited += 1;
                for lifetime in extract_method(&typed, method, reg) {
                    report.lifetimes_extracted += 1;
                    index.insert(
                        &lifetime,
                        SourceRef {
                            file: file.name.clone(),
                            method: format!("{}.{}", class.name, method.name),
                        },
                        reg,
                    );
                }
            }
        }
        mine_names(&typed, &mut names);
    }

    index.rebuild_tracers();
    names.finalize();
    (index, names, report)
}

// ---------------------------------------------------------------------------
// Persistence: one JSON record per line, header line first.

#[derive(Serialize, Deserialize)]
struct IndexHeader {
    format: String,
    version: u32,
    dims: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupRecord {
    canon: String,
    scs: Scs,
    count: u64,
    root_type: String,
    sources: Vec<SourceRef>,
}

#[derive(Serialize, Deserialize)]
struct NamesHeader {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct NameRecord {
    kind: String,
    api: ApiRef,
    names: Vec<(String, u64)>,
}

pub const INDEX_FILE: &str = "scs-index.jsonl";
pub const NAMES_FILE: &str = "names.jsonl";

pub fn save_index(index: &ScsIndex, names: &NameModel, dir: &Path) -> Result<(), ExtractError> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    writeln!(
        out,
        "{}",
        serde_json::to_string(&IndexHeader {
            format: INDEX_FORMAT.into(),
            version: FORMAT_VERSION,
            dims: index.dims,
        })
        .expect("header serializes")
    )?;
    for group in index.groups.values() {
        let record = GroupRecord {
            canon: group.canon.clone(),
            scs: group.scs.clone(),
            count: group.count,
            root_type: group.root_type.clone(),
            sources: group.sources.clone(),
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("group serializes")
        )?;
    }
    std::fs::write(dir.join(INDEX_FILE), out)?;

    let mut out = Vec::new();
    writeln!(
        out,
        "{}",
        serde_json::to_string(&NamesHeader {
            format: NAMES_FORMAT.into(),
            version: FORMAT_VERSION,
        })
        .expect("header serializes")
    )?;
    let mut records: Vec<NameRecord> = Vec::new();
    for (kind, map) in [("creator", &names.by_creator), ("field", &names.by_field)] {
        for (api, list) in map {
            records.push(NameRecord {
                kind: kind.into(),
                api: api.clone(),
                names: list.clone(),
            });
        }
    }
    records.sort_by(|a, b| (&a.kind, a.api.canonical()).cmp(&(&b.kind, b.api.canonical())));
    for record in records {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("record serializes")
        )?;
    }
    std::fs::write(dir.join(NAMES_FILE), out)?;
    Ok(())
}

pub fn load_index(dir: &Path, reg: &Registry) -> Result<(ScsIndex, NameModel), ExtractError> {
    let index_path = dir.join(INDEX_FILE);
    let file_name = index_path.display().to_string();
    let reader = std::io::BufReader::new(std::fs::File::open(&index_path)?);
    let mut lines = reader.lines();

    let header: IndexHeader = parse_header(&mut lines, &file_name, INDEX_FORMAT)?;
    if header.dims != reg.vocab_len() {
        return Err(ExtractError::RegistryMismatch(format!(
            "index dims {} != registry vocabulary {}",
            header.dims,
            reg.vocab_len()
        )));
    }
    let mut index = ScsIndex::new(header.dims);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GroupRecord =
            serde_json::from_str(&line).map_err(|e| ExtractError::Corrupt {
                file: file_name.clone(),
                reason: format!("line {}: {e}", lineno + 2),
            })?;
        for api in record.scs.actions() {
            if reg.vocab_index_of(api).is_none() {
                return Err(ExtractError::RegistryMismatch(format!(
                    "unknown member {}",
                    api.canonical()
                )));
            }
        }
        let vector = to_vector(&record.scs, reg);
        index.groups.insert(
            record.canon.clone(),
            ScsGroup {
                canon: record.canon,
                scs: record.scs,
                count: record.count,
                root_type: record.root_type,
                vector,
                sources: record.sources,
            },
        );
    }
    index.rebuild_tracers();

    let names_path = dir.join(NAMES_FILE);
    let file_name = names_path.display().to_string();
    let reader = std::io::BufReader::new(std::fs::File::open(&names_path)?);
    let mut lines = reader.lines();
    let _header: NamesHeader = parse_header(&mut lines, &file_name, NAMES_FORMAT)?;
    let mut names = NameModel::default();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: NameRecord =
            serde_json::from_str(&line).map_err(|e| ExtractError::Corrupt {
                file: file_name.clone(),
                reason: format!("line {}: {e}", lineno + 2),
            })?;
        let map = match record.kind.as_str() {
            "creator" => &mut names.by_creator,
            "field" => &mut names.by_field,
            other => {
                return Err(ExtractError::Corrupt {
                    file: file_name,
                    reason: format!("unknown record kind `{other}`"),
                })
            }
        };
        map.insert(record.api, record.names);
    }
    Ok((index, names))
}

fn parse_header<T: serde::de::DeserializeOwned + HeaderLike>(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    file: &str,
    want_format: &str,
) -> Result<T, ExtractError> {
    let line = lines.next().ok_or_else(|| ExtractError::Corrupt {
        file: file.to_string(),
        reason: "missing header line".into(),
    })??;
    let header: T = serde_json::from_str(&line).map_err(|e| ExtractError::Corrupt {
        file: file.to_string(),
        reason: format!("bad header: {e}"),
    })?;
    if header.format() != want_format {
        return Err(ExtractError::Corrupt {
            file: file.to_string(),
            reason: format!("unexpected format `{}`", header.format()),
        });
    }
    if header.version() != FORMAT_VERSION {
        return Err(ExtractError::VersionMismatch {
            file: file.to_string(),
            found: header.version(),
            expected: FORMAT_VERSION,
        });
    }
    Ok(header)
}

trait HeaderLike {
    fn format(&self) -> &str;
    fn version(&self) -> u32;
}

impl HeaderLike for IndexHeader {
    fn format(&self) -> &str {
        &self.format
    }
    fn version(&self) -> u32 {
        self.version
    }
}

impl HeaderLike for NamesHeader {
    fn format(&self) -> &str {
        &self.format
    }
    fn version(&self) -> u32 {
        self.version
    }
}
