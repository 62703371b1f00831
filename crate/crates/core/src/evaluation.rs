//! Selection quality against a known relevant set, and accuracy.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::srs::IterationRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub found_count: usize,
    pub truth_count: usize,
}

/// Precision is 0 for an empty selection.
pub fn f1_against_truth(found: &BTreeSet<usize>, truth: &BTreeSet<usize>) -> Result<SelectionScore> {
    if truth.is_empty() {
        return Err(Error::invalid("the relevant set must be nonempty"));
    }
    let hits = found.intersection(truth).count() as f64;
    let precision = if found.is_empty() { 0.0 } else { hits / found.len() as f64 };
    let recall = hits / truth.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(SelectionScore {
        precision,
        recall,
        f1,
        found_count: found.len(),
        truth_count: truth.len(),
    })
}

/// Score of the cumulative `F` after each recorded iteration.
pub fn f1_curve(history: &[IterationRecord], truth: &BTreeSet<usize>) -> Result<Vec<(usize, SelectionScore)>> {
    let mut found = BTreeSet::new();
    history
        .iter()
        .map(|rec| {
            found.extend(rec.added.iter().copied());
            Ok((rec.iteration, f1_against_truth(&found, truth)?))
        })
        .collect()
}

pub fn accuracy(predictions: &[u32], labels: &[u32]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::invalid("cannot score an empty prediction"));
    }
    let hits = predictions.iter().zip(labels).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / labels.len() as f64)
}
