//! Evaluation metrics over graded result lists.
//!
//! Grading here is mechanical: a snippet counts as relevant when its call
//! sequence shares at least one API with the case's answer key. That is a
//! stand-in for human judgment and measures something weaker, which the
//! report header states up front.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalCase {
    pub query: String,
    pub relevant_apis: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseMetrics {
    /// 1-based rank of the first relevant result, None when nothing relevant
    /// was returned.
    pub frank: Option<usize>,
    /// Percentage of relevant snippets among the first five returned.
    pub top5_pct: f64,
    /// Percentage of relevant snippets among the first ten returned.
    pub top10_pct: f64,
}

/// Computes the per-case metrics from per-rank relevance flags.
pub fn grade_metrics(graded: &[bool]) -> CaseMetrics {
    let frank = graded.iter().position(|&r| r).map(|i| i + 1);
    CaseMetrics {
        frank,
        top5_pct: window_pct(graded, 5),
        top10_pct: window_pct(graded, 10),
    }
}

fn window_pct(graded: &[bool], window: usize) -> f64 {
    let considered = graded.len().min(window);
    if considered == 0 {
        return 0.0;
    }
    let relevant = graded[..considered].iter().filter(|&&r| r).count();
    100.0 * relevant as f64 / considered as f64
}

/// Mean FRank over the cases that had a relevant result.
pub fn average_frank(metrics: &[CaseMetrics]) -> Option<f64> {
    let finite: Vec<usize> = metrics.iter().filter_map(|m| m.frank).collect();
    if finite.is_empty() {
        None
    } else {
        Some(finite.iter().sum::<usize>() as f64 / finite.len() as f64)
    }
}

pub fn average(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
