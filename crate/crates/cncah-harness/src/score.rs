use cncah_core::{GraphError, NodeId};

/// Outcome counts from comparing a detected boundary set against the true
/// one over every node of a graph; the four fields always sum to the node
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_neg: usize,
    pub false_pos: usize,
    pub true_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }
}

/// Tallies per-node detection outcomes: a node in both sets is a true
/// positive, in the truth set only a false negative, in the detected set
/// only a false positive, and in neither a true negative. Ids at or above
/// `n` are rejected; duplicate ids within a set count once.
pub fn confusion(
    truth: &[NodeId],
    detected: &[NodeId],
    n: usize,
) -> Result<ConfusionCounts, GraphError> {
    let mark = |ids: &[NodeId]| -> Result<Vec<bool>, GraphError> {
        let mut set = vec![false; n];
        for &v in ids {
            if v >= n {
                return Err(GraphError::UnknownNode(v, n));
            }
            set[v] = true;
        }
        Ok(set)
    };
    let in_truth = mark(truth)?;
    let in_detected = mark(detected)?;

    let mut counts = ConfusionCounts {
        true_pos: 0,
        false_neg: 0,
        false_pos: 0,
        true_neg: 0,
    };
    for v in 0..n {
        match (in_truth[v], in_detected[v]) {
            (true, true) => counts.true_pos += 1,
            (true, false) => counts.false_neg += 1,
            (false, true) => counts.false_pos += 1,
            (false, false) => counts.true_neg += 1,
        }
    }
    Ok(counts)
}

/// Detection quality rates. `None` marks a rate whose denominator is zero —
/// rendered as `NA` in CSV output — instead of collapsing it to 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// True-positive rate over the true boundary nodes.
    pub sensitivity: Option<f64>,
    /// True-negative rate over the true interior nodes.
    pub specificity: Option<f64>,
    /// Correctly classified fraction over all nodes.
    pub accuracy: Option<f64>,
}

pub fn metrics(counts: &ConfusionCounts) -> Metrics {
    let rate = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Metrics {
        sensitivity: rate(counts.true_pos, counts.true_pos + counts.false_neg),
        specificity: rate(counts.true_neg, counts.true_neg + counts.false_pos),
        accuracy: rate(counts.true_pos + counts.true_neg, counts.total()),
    }
}
