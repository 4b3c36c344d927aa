//! Structured call sequences: trees describing one object's lifetime as a
//! sequence of member actions with `if`/`while` structure.
//!
//! The first action of a *rooted* sequence is the creation that produced the
//! object; creations carry no separate tag because the canonical text cannot
//! distinguish them from ordinary actions, so neither does the tree.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::registry::{ApiRef, Registry};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scs {
    /// An atomic member use: method call, constructor, field get or set.
    Action(ApiRef),
    /// Usage the analysis could not track, e.g. the object escaping as an argument.
    Unknown,
    Empty,
    Seq(Vec<Scs>),
    If {
        cond: Box<Scs>,
        then: Box<Scs>,
        els: Box<Scs>,
    },
    While {
        cond: Box<Scs>,
        body: Box<Scs>,
    },
}

impl Scs {
    pub fn seq(items: Vec<Scs>) -> Scs {
        Scs::Seq(items)
    }

    /// The leftmost atomic action in program order (conditions come first).
    pub fn first_action(&self) -> Option<&ApiRef> {
        match self {
            Scs::Action(api) => Some(api),
            Scs::Unknown | Scs::Empty => None,
            Scs::Seq(items) => items.iter().find_map(|s| s.first_action()),
            Scs::If { cond, then, els } => cond
                .first_action()
                .or_else(|| then.first_action())
                .or_else(|| els.first_action()),
            Scs::While { cond, body } => cond.first_action().or_else(|| body.first_action()),
        }
    }

    /// The leftmost atomic unit, whether an action or an `Unknown`.
    fn first_atom_is_action(&self) -> Option<bool> {
        match self {
            Scs::Action(_) => Some(true),
            Scs::Unknown => Some(false),
            Scs::Empty => None,
            Scs::Seq(items) => items.iter().find_map(|s| s.first_atom_is_action()),
            Scs::If { cond, then, els } => cond
                .first_atom_is_action()
                .or_else(|| then.first_atom_is_action())
                .or_else(|| els.first_atom_is_action()),
            Scs::While { cond, body } => cond
                .first_atom_is_action()
                .or_else(|| body.first_atom_is_action()),
        }
    }

    /// A rooted sequence starts with the creation of an object of `root_type`:
    /// its first atom is an action returning that type.
    pub fn is_rooted_for(&self, root_type: &str) -> bool {
        match self.first_atom_is_action() {
            Some(true) => self
                .first_action()
                .map(|api| api.return_type == root_type)
                .unwrap_or(false),
            _ => false,
        }
    }

    /// Every ApiRef occurring anywhere in the tree, in program order, with
    /// multiplicity.
    pub fn actions(&self) -> Vec<&ApiRef> {
        let mut out = Vec::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions<'a>(&'a self, out: &mut Vec<&'a ApiRef>) {
        match self {
            Scs::Action(api) => out.push(api),
            Scs::Unknown | Scs::Empty => {}
            Scs::Seq(items) => items.iter().for_each(|s| s.collect_actions(out)),
            Scs::If { cond, then, els } => {
                cond.collect_actions(out);
                then.collect_actions(out);
                els.collect_actions(out);
            }
            Scs::While { cond, body } => {
                cond.collect_actions(out);
                body.collect_actions(out);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Scs::Empty)
    }

    /// Returns the tree with all `Unknown` atoms removed, re-simplified.
    pub fn without_unknowns(&self) -> Scs {
        fn strip(scs: &Scs) -> Scs {
            match scs {
                Scs::Action(api) => Scs::Action(api.clone()),
                Scs::Unknown | Scs::Empty => Scs::Empty,
                Scs::Seq(items) => Scs::Seq(items.iter().map(strip).collect()),
                Scs::If { cond, then, els } => Scs::If {
                    cond: Box::new(strip(cond)),
                    then: Box::new(strip(then)),
                    els: Box::new(strip(els)),
                },
                Scs::While { cond, body } => Scs::While {
                    cond: Box::new(strip(cond)),
                    body: Box::new(strip(body)),
                },
            }
        }
        simplify(&strip(self))
    }
}

/// Rewrites a tree to its simplified form:
/// sequences are flat, non-singleton and `Empty`-free; a control node with an
/// `Empty` condition dissolves into its contents; a control node whose bodies
/// are all `Empty` dissolves into its condition; a linear condition keeps only
/// its last atom, the rest hoisted in front. The result is a fixpoint.
pub fn simplify(scs: &Scs) -> Scs {
    let mut current = scs.clone();
    loop {
        let next = simplify_once(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn simplify_once(scs: &Scs) -> Scs {
    match scs {
        Scs::Action(_) | Scs::Unknown | Scs::Empty => scs.clone(),
        Scs::Seq(items) => {
            let mut flat = Vec::new();
            for item in items {
                match simplify_once(item) {
                    Scs::Empty => {}
                    Scs::Seq(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            match flat.len() {
                0 => Scs::Empty,
                1 => flat.pop().unwrap(),
                _ => Scs::Seq(flat),
            }
        }
        Scs::If { cond, then, els } => {
            let cond = simplify_once(cond);
            let then = simplify_once(then);
            let els = simplify_once(els);
            if cond.is_empty() {
                // the condition does not involve the object: keep only the usage
                return Scs::Seq(vec![then, els]);
            }
            if then.is_empty() && els.is_empty() {
                return cond;
            }
            let (prefix, last) = split_linear_condition(cond);
            let node = Scs::If {
                cond: Box::new(last),
                then: Box::new(then),
                els: Box::new(els),
            };
            attach_prefix(prefix, node)
        }
        Scs::While { cond, body } => {
            let cond = simplify_once(cond);
            let body = simplify_once(body);
            if cond.is_empty() {
                return body;
            }
            if body.is_empty() {
                return cond;
            }
            let (prefix, last) = split_linear_condition(cond);
            let node = Scs::While {
                cond: Box::new(last),
                body: Box::new(body),
            };
            attach_prefix(prefix, node)
        }
    }
}

/// For a linear (sequence-of-atoms) condition, splits off everything before
/// the final atom so it can be hoisted ahead of the control node. Conditions
/// with nested control flow are left whole.
fn split_linear_condition(cond: Scs) -> (Vec<Scs>, Scs) {
    match cond {
        Scs::Seq(items)
            if items
                .iter()
                .all(|i| matches!(i, Scs::Action(_) | Scs::Unknown)) =>
        {
            let mut items = items;
            let last = items.pop().expect("simplified Seq is non-empty");
            (items, last)
        }
        other => (Vec::new(), other),
    }
}

fn attach_prefix(prefix: Vec<Scs>, node: Scs) -> Scs {
    if prefix.is_empty() {
        node
    } else {
        let mut items = prefix;
        items.push(node);
        Scs::Seq(items)
    }
}

/// Unique textual form of a simplified tree; the grouping key of the index.
/// Two simplified trees are structurally equal exactly when their canonical
/// forms are byte-equal.
pub fn canonical_form(scs: &Scs) -> String {
    let mut out = String::new();
    write_canonical(scs, &mut out);
    out
}

fn write_canonical(scs: &Scs, out: &mut String) {
    match scs {
        Scs::Action(api) => out.push_str(&api.canonical()),
        Scs::Unknown => out.push('?'),
        Scs::Empty => {}
        Scs::Seq(items) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                write_canonical(item, out);
            }
        }
        Scs::If { cond, then, els } => {
            out.push_str("if(");
            write_canonical(cond, out);
            out.push_str("){");
            write_canonical(then, out);
            out.push_str("}else{");
            write_canonical(els, out);
            out.push('}');
        }
        Scs::While { cond, body } => {
            out.push_str("while(");
            write_canonical(cond, out);
            out.push_str("){");
            write_canonical(body, out);
            out.push('}');
        }
    }
}

/// Sparse real vector over the API vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dims: usize,
    entries: BTreeMap<usize, f64>,
}

impl SparseVector {
    pub fn zero(dims: usize) -> SparseVector {
        SparseVector {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Stores `weight` at `index`, dropping the entry when the weight is zero.
    pub fn set(&mut self, index: usize, weight: f64) {
        assert!(
            index < self.dims,
            "index {index} out of range {}",
            self.dims
        );
        if weight == 0.0 {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, weight);
        }
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-zero entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&i, &w)| (i, w))
    }

    /// Dot product, accumulated over `self`'s entries in ascending index
    /// order so the result does not depend on the other operand's size.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        self.iter().map(|(i, w)| w * other.get(i)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }
}

/// Binary vector of every API occurring in the tree; `Unknown` names no API
/// and contributes nothing. Repeated actions still weigh 1.
pub fn to_vector(scs: &Scs, reg: &Registry) -> SparseVector {
    let mut v = SparseVector::zero(reg.vocab_len());
    for api in scs.actions() {
        if let Some(index) = reg.vocab_index_of(api) {
            v.set(index, 1.0);
        }
    }
    v
}
