//! The natural-language-to-API model.
//!
//! Clickthrough lines pair a query with a document; documents contribute the
//! APIs found in their code fences and prose. An IBM-Model-1-style EM
//! alignment then estimates P(api | query word), and unigram statistics over
//! the query log weight the words of a query. The posterior for a whole query
//! is the unigram-weighted mixture of its per-word distributions.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minilang::{parse_program, resolve_types};
use crate::registry::{ApiKind, ApiRef, Registry};

const MODEL_FORMAT: &str = "query-api-model";
const MODEL_VERSION: u32 = 1;

/// Convergence threshold for EM: stop when no entry moves more than this.
pub const EM_TOLERANCE: f64 = 1e-6;

/// Query tokens dropped by default: the language tag carries no signal.
pub const DEFAULT_FILTER: [&str; 1] = ["minilang"];

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("no clickthrough pairs to train on")]
    EmptyPairs,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt model file {file}: {reason}")]
    Corrupt { file: String, reason: String },
    #[error("model version mismatch: found {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
}

/// One query with the APIs of the document clicked for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClickPair {
    pub query_tokens: Vec<String>,
    pub api_list: Vec<ApiRef>,
}

/// Ranked `(api, probability)` list, highest probability first.
pub type ApiPosterior = Vec<(ApiRef, f64)>;

/// Lowercases, splits on any non-alphanumeric character, and drops filter
/// tokens. Order and duplicates are preserved.
pub fn tokenize_query(text: &str, filter: &[String]) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !filter.iter().any(|f| f == t))
        .map(str::to_string)
        .collect()
}

/// Collects APIs a document mentions, in appearance order: resolved member
/// accesses inside fenced code blocks, plus `Type.Member` mentions in prose
/// that resolve unambiguously by name.
pub fn extract_apis_from_document(doc: &str, reg: &Registry) -> Vec<ApiRef> {
    let mut out = Vec::new();
    let mut code = String::new();
    let mut prose = String::new();
    let mut in_fence = false;
    for line in doc.lines() {
        if line.trim_start().starts_with("```") {
            if in_fence {
                collect_code_apis(&code, reg, &mut out);
                code.clear();
            } else {
                collect_prose_apis(&prose, reg, &mut out);
                prose.clear();
            }
            in_fence = !in_fence;
            continue;
        }
        if in_fence {
            code.push_str(line);
            code.push('\n');
        } else {
            prose.push_str(line);
            prose.push('\n');
        }
    }
    // unterminated fence: best effort, treat the tail as code
    collect_code_apis(&code, reg, &mut out);
    collect_prose_apis(&prose, reg, &mut out);
    out
}

fn collect_code_apis(code: &str, reg: &Registry, out: &mut Vec<ApiRef>) {
    if code.trim().is_empty() {
        return;
    }
    let program = match parse_program(code) {
        Ok(p) => p,
        // documents usually excerpt method bodies; retry wrapped
        Err(_) => {
            let wrapped = format!("class Doc {{ void fragment() {{\n{code}\n}} }}");
            match parse_program(&wrapped) {
                Ok(p) => p,
                Err(_) => return,
            }
        }
    };
    let typed = resolve_types(program, reg);
    out.extend(typed.resolved_accesses_in_order());
}

fn collect_prose_apis(prose: &str, reg: &Registry, out: &mut Vec<ApiRef>) {
    #[derive(PartialEq)]
    enum Piece {
        Ident(String),
        Dot,
        Other,
    }
    let mut pieces = Vec::new();
    let mut chars = prose.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            pieces.push(Piece::Ident(ident));
        } else if c == '.' {
            chars.next();
            pieces.push(Piece::Dot);
        } else {
            chars.next();
            if pieces.last() != Some(&Piece::Other) {
                pieces.push(Piece::Other);
            }
        }
    }
    for window in pieces.windows(3) {
        if let [Piece::Ident(ty), Piece::Dot, Piece::Ident(member)] = window {
            if let Some(api) = resolve_mention(reg, ty, member) {
                out.push(api);
            }
        }
    }
}

/// A prose mention resolves when the type exists and exactly one callable or
/// readable member carries that name.
fn resolve_mention(reg: &Registry, ty: &str, member: &str) -> Option<ApiRef> {
    if !reg.has_type(ty) {
        return None;
    }
    let candidates: Vec<&ApiRef> = reg
        .api_vocab()
        .iter()
        .filter(|a| a.declaring_type == ty && a.member == member && a.kind != ApiKind::FieldSet)
        .collect();
    match candidates.as_slice() {
        [one] => Some((*one).clone()),
        _ => None,
    }
}

/// Appearance counts of query-log terms (the denominators cancel in use, so
/// raw counts are kept alongside the total).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnigramStats {
    term_counts: HashMap<String, u64>,
    total_terms: u64,
}

impl UnigramStats {
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> UnigramStats {
        let term_counts: HashMap<String, u64> = counts.into_iter().collect();
        let total_terms = term_counts.values().sum();
        UnigramStats {
            term_counts,
            total_terms,
        }
    }

    pub fn count(&self, token: &str) -> u64 {
        self.term_counts.get(token).copied().unwrap_or(0)
    }

    pub fn total_terms(&self) -> u64 {
        self.total_terms
    }

    fn add(&mut self, token: &str) {
        *self.term_counts.entry(token.to_string()).or_insert(0) += 1;
        self.total_terms += 1;
    }
}

/// Unsmoothed unigram weight of `q` within the query `tokens`: its log
/// frequency relative to the other words of the query. Unseen words weigh
/// zero; when every word is unseen the weight is uniform.
pub fn unigram_prob(q: &str, tokens: &[String], stats: &UnigramStats) -> Result<f64, AlignError> {
    if tokens.is_empty() {
        return Err(AlignError::EmptyQuery);
    }
    let denom: u64 = tokens.iter().map(|t| stats.count(t)).sum();
    if denom == 0 {
        return Ok(1.0 / tokens.len() as f64);
    }
    Ok(stats.count(q) as f64 / denom as f64)
}

/// Learned conditional distribution P(api | query word). Per-token
/// distributions are kept sparse over the table's API list, which follows
/// registry vocabulary order.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    apis: Vec<ApiRef>,
    api_index: HashMap<ApiRef, usize>,
    probs: HashMap<String, Vec<(usize, f64)>>,
}

impl TranslationTable {
    pub fn new(apis: Vec<ApiRef>, probs: HashMap<String, Vec<(usize, f64)>>) -> TranslationTable {
        let api_index = apis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        TranslationTable {
            apis,
            api_index,
            probs,
        }
    }

    pub fn apis(&self) -> &[ApiRef] {
        &self.apis
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    pub fn distribution(&self, token: &str) -> Option<&[(usize, f64)]> {
        self.probs.get(token).map(Vec::as_slice)
    }

    pub fn p(&self, api: &ApiRef, token: &str) -> f64 {
        let Some(&idx) = self.api_index.get(api) else {
            return 0.0;
        };
        self.probs
            .get(token)
            .and_then(|row| row.iter().find(|(i, _)| *i == idx))
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

/// Result of EM training: the table plus the training-data log-likelihood
/// observed at the start of each iteration (and once after the last update).
#[derive(Debug, Clone)]
pub struct EmOutcome {
    pub table: TranslationTable,
    pub log_likelihoods: Vec<f64>,
    pub iterations_run: usize,
}

/// Trains P(api | word) by expectation maximization, words as sources and
/// APIs as targets. Initialization is uniform over the APIs co-occurring with
/// each word; the likelihood is concave, so the fixpoint does not depend on it.
/// Runs `iterations` rounds or until the largest per-entry change drops below
/// [`EM_TOLERANCE`]. `add_k` optionally smooths the re-normalization.
pub fn train_em(
    pairs: &[ClickPair],
    iterations: usize,
    reg: &Registry,
    add_k: f64,
) -> Result<EmOutcome, AlignError> {
    if pairs.is_empty() {
        return Err(AlignError::EmptyPairs);
    }

    // intern tokens (sorted for determinism) and APIs (vocabulary order)
    let mut token_set: Vec<String> = pairs
        .iter()
        .flat_map(|p| p.query_tokens.iter().cloned())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    token_set.sort_unstable();
    let token_id: HashMap<&str, usize> = token_set
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let mut api_set: Vec<ApiRef> = pairs
        .iter()
        .flat_map(|p| p.api_list.iter().cloned())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    api_set.sort_by_key(|a| (reg.vocab_index_of(a).unwrap_or(usize::MAX), a.canonical()));
    let api_id: HashMap<&ApiRef, usize> = api_set.iter().enumerate().map(|(i, a)| (a, i)).collect();

    let interned: Vec<(Vec<usize>, Vec<usize>)> = pairs
        .iter()
        .map(|p| {
            (
                p.query_tokens
                    .iter()
                    .map(|t| token_id[t.as_str()])
                    .collect(),
                p.api_list.iter().map(|a| api_id[a]).collect(),
            )
        })
        .collect();

    // uniform over co-occurring APIs
    let mut support: Vec<HashSet<usize>> = vec![HashSet::new(); token_set.len()];
    for (toks, apis) in &interned {
        for &q in toks {
            for &t in apis {
                support[q].insert(t);
            }
        }
    }
    let mut probs: Vec<BTreeMap<usize, f64>> = support
        .iter()
        .map(|s| {
            let u = 1.0 / s.len().max(1) as f64;
            s.iter().map(|&t| (t, u)).collect()
        })
        .collect();

    let log_likelihood = |probs: &[BTreeMap<usize, f64>]| -> f64 {
        interned
            .iter()
            .map(|(toks, apis)| {
                apis.iter()
                    .map(|t| {
                        let s: f64 = toks
                            .iter()
                            .map(|q| probs[*q].get(t).copied().unwrap_or(0.0))
                            .sum();
                        if s > 0.0 {
                            (s / toks.len() as f64).ln()
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .sum::<f64>()
            })
            .sum()
    };

    let mut log_likelihoods = vec![log_likelihood(&probs)];
    let mut iterations_run = 0;
    for _ in 0..iterations {
        // E-step: expected alignment counts
        let mut counts: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); token_set.len()];
        for (toks, apis) in &interned {
            for t in apis {
                let denom: f64 = toks
                    .iter()
                    .map(|q| probs[*q].get(t).copied().unwrap_or(0.0))
                    .sum();
                if denom <= 0.0 {
                    continue;
                }
                for q in toks {
                    let p = probs[*q].get(t).copied().unwrap_or(0.0);
                    *counts[*q].entry(*t).or_insert(0.0) += p / denom;
                }
            }
        }
        // M-step: re-normalize per token
        let mut max_delta: f64 = 0.0;
        for (q, row) in counts.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let total: f64 = row.values().sum::<f64>() + add_k * row.len() as f64;
            let mut next: BTreeMap<usize, f64> = BTreeMap::new();
            for (&t, &c) in row {
                next.insert(t, (c + add_k) / total);
            }
            for (&t, &p_new) in &next {
                let p_old = probs[q].get(&t).copied().unwrap_or(0.0);
                max_delta = max_delta.max((p_new - p_old).abs());
            }
            probs[q] = next;
        }
        iterations_run += 1;
        log_likelihoods.push(log_likelihood(&probs));
        if max_delta < EM_TOLERANCE {
            break;
        }
    }

    let table_probs: HashMap<String, Vec<(usize, f64)>> = token_set
        .iter()
        .enumerate()
        .map(|(q, token)| {
            (
                token.clone(),
                probs[q].iter().map(|(&t, &p)| (t, p)).collect(),
            )
        })
        .collect();

    Ok(EmOutcome {
        table: TranslationTable::new(api_set, table_probs),
        log_likelihoods,
        iterations_run,
    })
}

/// The probability of each API appearing in the solution for the whole query:
/// the unigram-weighted sum of per-word probabilities. Sorted by probability
/// descending, ties by vocabulary order.
pub fn api_posterior(
    tokens: &[String],
    table: &TranslationTable,
    stats: &UnigramStats,
) -> Result<ApiPosterior, AlignError> {
    if tokens.is_empty() {
        return Err(AlignError::EmptyQuery);
    }
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for q in tokens {
        let Some(row) = table.distribution(q) else {
            continue;
        };
        let w = unigram_prob(q, tokens, stats)?;
        if w == 0.0 {
            continue;
        }
        for &(t, p) in row {
            *acc.entry(t).or_insert(0.0) += p * w;
        }
    }
    let mut ranked: Vec<(usize, f64)> = acc.into_iter().filter(|(_, p)| *p > 0.0).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked
        .into_iter()
        .map(|(t, p)| (table.apis[t].clone(), p))
        .collect())
}

/// Everything ingested from one clickthrough log.
#[derive(Debug, Clone)]
pub struct IngestOutcome {
    pub pairs: Vec<ClickPair>,
    pub stats: UnigramStats,
    pub lines_total: usize,
    pub lines_malformed: usize,
    pub docs_missing: usize,
    pub pairs_dropped: usize,
}

/// Reads `query<TAB>doc_id` lines against a map of document texts. Every
/// well-formed line contributes its query terms to the unigram statistics,
/// even when the pair itself is dropped for lack of a document or APIs.
pub fn ingest_clickthrough(
    clicks_tsv: &str,
    docs: &HashMap<String, String>,
    reg: &Registry,
    filter: &[String],
) -> IngestOutcome {
    let mut outcome = IngestOutcome {
        pairs: Vec::new(),
        stats: UnigramStats::default(),
        lines_total: 0,
        lines_malformed: 0,
        docs_missing: 0,
        pairs_dropped: 0,
    };
    let mut doc_apis: HashMap<&str, Vec<ApiRef>> = HashMap::new();
    for line in clicks_tsv.lines() {
        if line.trim().is_empty() {
            continue;
        }
        outcome.lines_total += 1;
        let Some((query, doc_id)) = line.split_once('\t') else {
            outcome.lines_malformed += 1;
            continue;
        };
        let doc_id = doc_id.trim();
        let tokens = tokenize_query(query, filter);
        for t in &tokens {
            outcome.stats.add(t);
        }
        let Some(text) = docs.get(doc_id) else {
            outcome.docs_missing += 1;
            continue;
        };
        let apis = doc_apis
            .entry(doc_id)
            .or_insert_with(|| extract_apis_from_document(text, reg))
            .clone();
        if tokens.is_empty() || apis.is_empty() {
            outcome.pairs_dropped += 1;
            continue;
        }
        outcome.pairs.push(ClickPair {
            query_tokens: tokens,
            api_list: apis,
        });
    }
    outcome
}

// ---------------------------------------------------------------------------
// Model persistence

/// Trained artifacts persisted together: the translation table, the unigram
/// statistics, and the token filter the queries were tokenized with.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub table: TranslationTable,
    pub stats: UnigramStats,
    pub filter: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    filter: Vec<String>,
    apis: Vec<ApiRef>,
    tokens: Vec<TokenRecord>,
    unigram_counts: Vec<(String, u64)>,
    unigram_total: u64,
}

#[derive(Serialize, Deserialize)]
struct TokenRecord {
    token: String,
    entries: Vec<(usize, f64)>,
}

pub fn save_model(model: &Model, path: &Path) -> Result<(), AlignError> {
    let mut tokens: Vec<TokenRecord> = model
        .table
        .probs
        .iter()
        .map(|(token, entries)| TokenRecord {
            token: token.clone(),
            entries: entries.clone(),
        })
        .collect();
    tokens.sort_by(|a, b| a.token.cmp(&b.token));
    let mut unigram_counts: Vec<(String, u64)> = model
        .stats
        .term_counts
        .iter()
        .map(|(t, c)| (t.clone(), *c))
        .collect();
    unigram_counts.sort();
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        filter: model.filter.clone(),
        apis: model.table.apis.clone(),
        tokens,
        unigram_counts,
        unigram_total: model.stats.total_terms,
    };
    let json = serde_json::to_string_pretty(&file).expect("model serializes");
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Model, AlignError> {
    let file_name = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| AlignError::Corrupt {
        file: file_name.clone(),
        reason: e.to_string(),
    })?;
    if file.format != MODEL_FORMAT {
        return Err(AlignError::Corrupt {
            file: file_name,
            reason: format!("unexpected format `{}`", file.format),
        });
    }
    if file.version != MODEL_VERSION {
        return Err(AlignError::VersionMismatch {
            found: file.version,
            expected: MODEL_VERSION,
        });
    }
    let probs = file
        .tokens
        .into_iter()
        .map(|r| (r.token, r.entries))
        .collect();
    let counted: u64 = file.unigram_counts.iter().map(|(_, c)| c).sum();
    if counted != file.unigram_total {
        return Err(AlignError::Corrupt {
            file: file_name,
            reason: format!(
                "unigram total {} disagrees with summed counts {counted}",
                file.unigram_total
            ),
        });
    }
    let stats = UnigramStats {
        term_counts: file.unigram_counts.into_iter().collect(),
        total_terms: file.unigram_total,
    };
    Ok(Model {
        table: TranslationTable::new(file.apis, probs),
        stats,
        filter: file.filter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filter(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_splits_and_lowercases() {
        assert_eq!(
            tokenize_query("Match Regular expression", &[]),
            vec!["match", "regular", "expression"]
        );
    }

    #[test]
    fn tokenize_empty_is_empty() {
        assert!(tokenize_query("", &[]).is_empty());
    }

    #[test]
    fn tokenize_applies_filter_after_splitting() {
        assert_eq!(
            tokenize_query("C# read-file", &filter(&["c"])),
            vec!["read", "file"]
        );
    }

    fn reg() -> Registry {
        Registry::from_json(
            r#"{"types":[
                {"name":"RegexOptions","kind":"value"},
                {"name":"Regex","kind":"reference",
                 "constructors":[[{"name":"pattern","type":"string"},{"name":"options","type":"RegexOptions"}]],
                 "methods":[{"name":"Match","args":[{"name":"input","type":"string"}],"returns":"Match"}]},
                {"name":"Match","kind":"reference",
                 "fields":[{"name":"Success","type":"bool"},{"name":"Groups","type":"GroupCollection"}]},
                {"name":"GroupCollection","kind":"reference","fields":[{"name":"Count","type":"int"}]},
                {"name":"Random","kind":"reference","constructors":[[]],
                 "methods":[{"name":"Next","args":[],"returns":"int"},
                            {"name":"Next","args":["int"],"returns":"int"}]}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn document_code_fences_yield_apis_in_order() {
        let reg = reg();
        let doc = r#"
Matching text against a pattern:

```
var options = default(RegexOptions);
var regex = new Regex(pattern, options);
var match = regex.Match(input);
if (match.Success) {
  var groups = match.Groups;
}
```
"#;
        let apis: Vec<String> = extract_apis_from_document(doc, &reg)
            .iter()
            .map(|a| a.canonical())
            .collect();
        assert_eq!(
            apis,
            vec![
                "new Regex(string,RegexOptions)",
                "Regex.Match(string)",
                "get(Match.Success)",
                "get(Match.Groups)",
            ]
        );
    }

    #[test]
    fn document_without_code_or_mentions_is_empty() {
        let reg = reg();
        assert!(extract_apis_from_document("just some words here", &reg).is_empty());
    }

    #[test]
    fn prose_mentions_resolve_when_unambiguous() {
        let reg = reg();
        let apis = extract_apis_from_document("use Regex.Match here", &reg);
        assert_eq!(apis.len(), 1);
        assert_eq!(apis[0].canonical(), "Regex.Match(string)");
        // two overloads named Next: ambiguous by name, skipped
        assert!(extract_apis_from_document("call Random.Next now", &reg).is_empty());
        // field mention resolves to the get entry
        let apis = extract_apis_from_document("check Match.Success first", &reg);
        assert_eq!(apis[0].canonical(), "get(Match.Success)");
    }

    #[test]
    fn unparseable_fence_is_skipped() {
        let reg = reg();
        let doc = "```\nthis is ) not minilang (\n```\n";
        assert!(extract_apis_from_document(doc, &reg).is_empty());
    }

    #[test]
    fn prose_and_code_contribute_in_document_order() {
        let reg = reg();
        let doc = "check Match.Success first\n```\nvar r = new Regex(\"a\", default(RegexOptions));\n```\nthen Regex.Match again\n";
        let apis: Vec<String> = extract_apis_from_document(doc, &reg)
            .iter()
            .map(|a| a.canonical())
            .collect();
        assert_eq!(
            apis,
            vec![
                "get(Match.Success)",
                "new Regex(string,RegexOptions)",
                "Regex.Match(string)"
            ]
        );
    }

    fn api(name: &str) -> ApiRef {
        ApiRef {
            declaring_type: name.into(),
            member: "m".into(),
            kind: ApiKind::Method,
            arg_types: vec![],
            return_type: "void".into(),
            is_static: true,
        }
    }

    fn pair(tokens: &[&str], apis: &[&ApiRef]) -> ClickPair {
        ClickPair {
            query_tokens: tokens.iter().map(|t| t.to_string()).collect(),
            api_list: apis.iter().map(|a| (*a).clone()).collect(),
        }
    }

    fn em_registry(names: &[&str]) -> Registry {
        let types: Vec<String> = names
            .iter()
            .map(|n| {
                format!(
                    r#"{{"name":"{n}","kind":"reference","methods":[{{"name":"m","args":[],"returns":"void","static":true}}]}}"#
                )
            })
            .collect();
        Registry::from_json(&format!(r#"{{"types":[{}]}}"#, types.join(","))).unwrap()
    }

    #[test]
    fn forced_mass_after_one_iteration() {
        let reg = em_registry(&["Regex", "Other"]);
        let regex = api("Regex");
        let other = api("Other");
        let pairs = vec![
            pair(&["regular"], &[&regex]),
            pair(&["something"], &[&other]),
        ];
        let outcome = train_em(&pairs, 1, &reg, 0.0).unwrap();
        assert_eq!(outcome.table.p(&regex, "regular"), 1.0);
    }

    #[test]
    fn em_shifts_mass_toward_exclusive_cooccurrence() {
        let reg = em_registry(&["Regex", "Match", "Success", "Groups"]);
        let (regex, mat, success, groups) =
            (api("Regex"), api("Match"), api("Success"), api("Groups"));
        let pairs = vec![
            pair(
                &["match", "regular", "expression"],
                &[&regex, &mat, &success, &groups],
            ),
            pair(&["regular", "expression"], &[&regex]),
            pair(&["match", "text"], &[&mat]),
        ];
        let outcome = train_em(&pairs, 50, &reg, 0.0).unwrap();
        assert!(
            outcome.table.p(&regex, "regular") > outcome.table.p(&groups, "regular"),
            "P(Regex|regular)={} should beat P(Groups|regular)={}",
            outcome.table.p(&regex, "regular"),
            outcome.table.p(&groups, "regular")
        );
    }

    /// Dead-simple reference EM over string keys, independent of the trained
    /// implementation.
    fn oracle_em(pairs: &[(Vec<&str>, Vec<&str>)], iters: usize) -> HashMap<(String, String), f64> {
        let mut support: HashMap<&str, HashSet<&str>> = HashMap::new();
        for (toks, apis) in pairs {
            for q in toks {
                for t in apis {
                    support.entry(q).or_default().insert(t);
                }
            }
        }
        let mut p: HashMap<(String, String), f64> = HashMap::new();
        for (q, ts) in &support {
            for t in ts {
                p.insert((t.to_string(), q.to_string()), 1.0 / ts.len() as f64);
            }
        }
        for _ in 0..iters {
            let mut counts: HashMap<(String, String), f64> = HashMap::new();
            for (toks, apis) in pairs {
                for t in apis {
                    let denom: f64 = toks
                        .iter()
                        .map(|q| {
                            p.get(&(t.to_string(), q.to_string()))
                                .copied()
                                .unwrap_or(0.0)
                        })
                        .sum();
                    if denom <= 0.0 {
                        continue;
                    }
                    for q in toks {
                        let cur = p
                            .get(&(t.to_string(), q.to_string()))
                            .copied()
                            .unwrap_or(0.0);
                        *counts.entry((t.to_string(), q.to_string())).or_insert(0.0) += cur / denom;
                    }
                }
            }
            let mut token_totals: HashMap<String, f64> = HashMap::new();
            for ((_, q), c) in &counts {
                *token_totals.entry(q.clone()).or_insert(0.0) += c;
            }
            for ((t, q), c) in counts {
                let total = token_totals[&q];
                p.insert((t, q), c / total);
            }
        }
        p
    }

    #[test]
    fn em_matches_brute_force_oracle_on_two_pair_corpus() {
        let reg = em_registry(&["X", "Y"]);
        let (x, y) = (api("X"), api("Y"));
        let pairs = vec![pair(&["a", "b"], &[&x]), pair(&["a"], &[&y])];
        let outcome = train_em(&pairs, 50, &reg, 0.0).unwrap();
        assert!(outcome.iterations_run <= 50);

        let oracle = oracle_em(
            &[(vec!["a", "b"], vec!["X"]), (vec!["a"], vec!["Y"])],
            outcome.iterations_run,
        );
        for (t, name) in [(&x, "X"), (&y, "Y")] {
            for q in ["a", "b"] {
                let got = outcome.table.p(t, q);
                let want = oracle
                    .get(&(name.to_string(), q.to_string()))
                    .copied()
                    .unwrap_or(0.0);
                assert!(
                    (got - want).abs() < 1e-6,
                    "P({name}|{q}) = {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn log_likelihood_never_decreases() {
        let reg = em_registry(&["X", "Y", "Z"]);
        let (x, y, z) = (api("X"), api("Y"), api("Z"));
        let pairs = vec![
            pair(&["a", "b"], &[&x, &z]),
            pair(&["a"], &[&y]),
            pair(&["b", "c"], &[&x]),
            pair(&["c"], &[&z, &y]),
        ];
        let outcome = train_em(&pairs, 50, &reg, 0.0).unwrap();
        for w in outcome.log_likelihoods.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-9,
                "log-likelihood decreased: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn table_rows_stay_normalized() {
        let reg = em_registry(&["X", "Y", "Z"]);
        let (x, y, z) = (api("X"), api("Y"), api("Z"));
        let pairs = vec![
            pair(&["a", "b"], &[&x, &z]),
            pair(&["a"], &[&y]),
            pair(&["b"], &[&x, &y, &z]),
        ];
        for iters in [1, 2, 5, 20] {
            let outcome = train_em(&pairs, iters, &reg, 0.0).unwrap();
            for token in ["a", "b"] {
                let sum: f64 = outcome
                    .table
                    .distribution(token)
                    .unwrap()
                    .iter()
                    .map(|(_, p)| p)
                    .sum();
                assert!((sum - 1.0).abs() < 1e-9, "sum P(t|{token}) = {sum}");
            }
        }
    }

    #[test]
    fn zero_iterations_is_uniform_initialization() {
        let reg = em_registry(&["X", "Y"]);
        let (x, y) = (api("X"), api("Y"));
        let pairs = vec![pair(&["a"], &[&x, &y])];
        let outcome = train_em(&pairs, 0, &reg, 0.0).unwrap();
        assert_eq!(outcome.iterations_run, 0);
        assert_eq!(outcome.table.p(&x, "a"), 0.5);
        assert_eq!(outcome.table.p(&y, "a"), 0.5);
    }

    #[test]
    fn empty_pairs_is_an_error() {
        let reg = em_registry(&["X"]);
        assert!(matches!(
            train_em(&[], 5, &reg, 0.0),
            Err(AlignError::EmptyPairs)
        ));
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn equal_frequencies_weigh_uniformly() {
        let stats = UnigramStats::from_counts([("a".into(), 4), ("b".into(), 4), ("c".into(), 4)]);
        let q = toks(&["a", "b", "c"]);
        for t in ["a", "b", "c"] {
            assert!((unigram_prob(t, &q, &stats).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unigram_weight_follows_relative_counts() {
        // counts {match:30, regular:10, expression:10}; the log total cancels
        let stats = UnigramStats::from_counts([
            ("match".into(), 30),
            ("regular".into(), 10),
            ("expression".into(), 10),
        ]);
        let q = toks(&["match", "regular", "expression"]);
        assert!((unigram_prob("match", &q, &stats).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn single_token_query_weighs_one() {
        let stats = UnigramStats::from_counts([("match".into(), 30)]);
        assert_eq!(
            unigram_prob("match", &toks(&["match"]), &stats).unwrap(),
            1.0
        );
    }

    #[test]
    fn unigram_weights_sum_to_one() {
        let stats = UnigramStats::from_counts([("a".into(), 7), ("b".into(), 3), ("c".into(), 11)]);
        // the duplicated token keeps the position sum at exactly one: the
        // denominator counts the list, so (7+3+11+7)/28 = 1
        let q = toks(&["a", "b", "c", "a"]);
        let sum: f64 = q.iter().map(|t| unigram_prob(t, &q, &stats).unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let distinct = toks(&["a", "b", "c"]);
        let sum: f64 = distinct
            .iter()
            .map(|t| unigram_prob(t, &distinct, &stats).unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_unseen_tokens_fall_back_to_uniform() {
        let stats = UnigramStats::default();
        let q = toks(&["new", "words"]);
        assert_eq!(unigram_prob("new", &q, &stats).unwrap(), 0.5);
    }

    #[test]
    fn empty_query_is_an_error() {
        let stats = UnigramStats::default();
        assert!(matches!(
            unigram_prob("a", &[], &stats),
            Err(AlignError::EmptyQuery)
        ));
    }

    fn hand_table() -> (TranslationTable, ApiRef, ApiRef) {
        let x = api("X");
        let y = api("Y");
        let mut probs = HashMap::new();
        probs.insert("a".to_string(), vec![(0, 0.7), (1, 0.3)]);
        probs.insert("b".to_string(), vec![(0, 0.2), (1, 0.8)]);
        (
            TranslationTable::new(vec![x.clone(), y.clone()], probs),
            x,
            y,
        )
    }

    #[test]
    fn single_token_posterior_collapses_to_table_row() {
        let (table, x, y) = hand_table();
        let stats = UnigramStats::from_counts([("a".into(), 5)]);
        let post = api_posterior(&toks(&["a"]), &table, &stats).unwrap();
        assert_eq!(post[0], (x, 0.7));
        assert_eq!(post[1], (y, 0.3));
    }

    #[test]
    fn two_token_posterior_matches_hand_arithmetic() {
        let (table, x, y) = hand_table();
        let stats = UnigramStats::from_counts([("a".into(), 3), ("b".into(), 1)]);
        let post = api_posterior(&toks(&["a", "b"]), &table, &stats).unwrap();
        // weights: a=0.75, b=0.25
        // P(X|Q) = 0.7*0.75 + 0.2*0.25 = 0.575
        // P(Y|Q) = 0.3*0.75 + 0.8*0.25 = 0.425
        assert_eq!(post[0].0, x);
        assert!((post[0].1 - 0.575).abs() < 1e-12);
        assert_eq!(post[1].0, y);
        assert!((post[1].1 - 0.425).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_a_convex_combination() {
        let (table, x, y) = hand_table();
        let stats = UnigramStats::from_counts([("a".into(), 2), ("b".into(), 9)]);
        let q = toks(&["a", "b"]);
        let post = api_posterior(&q, &table, &stats).unwrap();
        for (t, p) in &post {
            let per_word: Vec<f64> = q.iter().map(|w| table.p(t, w)).collect();
            let lo = per_word.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = per_word.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(
                *p >= lo - 1e-12 && *p <= hi + 1e-12,
                "{t:?}: {p} not in [{lo},{hi}]"
            );
        }
        let _ = (x, y);
    }

    #[test]
    fn unknown_vocabulary_posterior_is_empty() {
        let (table, _, _) = hand_table();
        let stats = UnigramStats::default();
        assert!(api_posterior(&toks(&["zzz"]), &table, &stats)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn model_round_trips_through_disk() {
        let (table, _, _) = hand_table();
        let model = Model {
            table,
            stats: UnigramStats::from_counts([("a".into(), 3), ("b".into(), 1)]),
            filter: vec!["minilang".into()],
        };
        let path =
            std::env::temp_dir().join(format!("idiom-forge-model-{}.json", std::process::id()));
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(model, loaded);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn ingestion_counts_terms_and_drops_empty_pairs() {
        let reg = reg();
        let mut docs = HashMap::new();
        docs.insert(
            "d1".to_string(),
            "```\nvar options = default(RegexOptions);\nvar regex = new Regex(\"a\", options);\nvar match = regex.Match(\"b\");\n```".to_string(),
        );
        docs.insert("d2".to_string(), "no code here".to_string());
        let clicks = "match regular expression\td1\nmatch regular expression\td1\nplain words\td2\nmystery\tmissing\nmalformed line\n";
        let outcome = ingest_clickthrough(clicks, &docs, &reg, &[]);
        assert_eq!(outcome.lines_total, 5);
        assert_eq!(outcome.lines_malformed, 1);
        assert_eq!(outcome.docs_missing, 1);
        // d2 has no code and no mentions, so its pair is dropped
        assert_eq!(outcome.pairs_dropped, 1);
        assert_eq!(outcome.pairs.len(), 2);
        assert_eq!(outcome.pairs[0].api_list.len(), 2);
        assert_eq!(outcome.stats.count("match"), 2);
        assert_eq!(outcome.stats.count("mystery"), 1);
    }
}
