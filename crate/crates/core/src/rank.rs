//! Retrieval: query vectors and cosine-ranked lookup over the group index.

use thiserror::Error;

use crate::align::ApiPosterior;
use crate::extract::{ScsGroup, ScsIndex};
use crate::registry::{ApiRef, Registry};
use crate::scs::SparseVector;

/// Posterior entries kept in the query vector by default.
pub const DEFAULT_TOP_K: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Builds the query vector: posterior probabilities placed at each API's
/// vocabulary slot, truncated to the `top_k` most probable entries.
pub fn query_vector(posterior: &ApiPosterior, reg: &Registry, top_k: usize) -> SparseVector {
    let mut v = SparseVector::zero(reg.vocab_len());
    for (api, prob) in posterior.iter().take(top_k) {
        if let Some(index) = reg.vocab_index_of(api) {
            v.set(index, *prob);
        }
    }
    v
}

/// Cosine similarity; zero when either vector is zero.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> Result<f64, RankError> {
    if a.dims() != b.dims() {
        return Err(RankError::DimensionMismatch(a.dims(), b.dims()));
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(a.dot(b) / denom)
}

/// One retrieval hit.
#[derive(Debug, Clone)]
pub struct Retrieved<'a> {
    pub group: &'a ScsGroup,
    pub score: f64,
}

/// Scores every group (or only the groups containing `tracer`) against the
/// query vector and returns the top `m`, ordered by score descending, then
/// group frequency descending, then canonical form ascending.
pub fn retrieve<'a>(
    qv: &SparseVector,
    index: &'a ScsIndex,
    m: usize,
    tracer: Option<&ApiRef>,
) -> Result<Vec<Retrieved<'a>>, RankError> {
    if qv.dims() != index.dims() {
        return Err(RankError::DimensionMismatch(qv.dims(), index.dims()));
    }
    let mut hits: Vec<Retrieved<'a>> = match tracer {
        Some(api) => index
            .tracer_groups(api)
            .iter()
            .filter_map(|canon| index.get(canon))
            .map(|group| Retrieved {
                score: cosine_unchecked(qv, &group.vector),
                group,
            })
            .collect(),
        None => index
            .groups()
            .map(|group| Retrieved {
                score: cosine_unchecked(qv, &group.vector),
                group,
            })
            .collect(),
    };
    hits.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.group.count.cmp(&a.group.count))
            .then_with(|| a.group.canon.cmp(&b.group.canon))
    });
    hits.truncate(m);
    Ok(hits)
}

fn cosine_unchecked(a: &SparseVector, b: &SparseVector) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    a.dot(b) / denom
}
