use std::fmt::Write as _;

use crate::score::{ConfusionCounts, Metrics};

/// Header of the per-interval CSV log.
pub const LOG_CSV_HEADER: &str =
    "iter,time_ms,energy,sensitivity,specificity,accuracy,tp,fn,fp,tn";

/// One evaluated interval of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRow {
    /// Work units completed (0 for the initial state).
    pub iter: u64,
    /// Normalized time: `iter × quantum` in deterministic mode, elapsed
    /// wall-clock milliseconds otherwise.
    pub time_ms: u64,
    /// Unweighted spring energy of the drawing at this point.
    pub energy: f64,
    pub metrics: Metrics,
    pub counts: ConfusionCounts,
}

/// Progress log of one experiment: the initial state (iter 0) followed by
/// one row per evaluated interval, iters strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    rows: Vec<IterationRow>,
}

impl IterationLog {
    pub fn new() -> Self {
        IterationLog::default()
    }

    /// Appends a row. The first row must have `iter == 0`; later rows must
    /// strictly increase `iter`.
    pub fn push(&mut self, row: IterationRow) {
        match self.rows.last() {
            None => assert_eq!(row.iter, 0, "first log row must describe the initial state"),
            Some(prev) => assert!(
                row.iter > prev.iter,
                "log iters must strictly increase ({} after {})",
                row.iter,
                prev.iter
            ),
        }
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[IterationRow] {
        &self.rows
    }

    pub fn last(&self) -> Option<&IterationRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(LOG_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.iter,
                r.time_ms,
                r.energy,
                fmt_rate(r.metrics.sensitivity),
                fmt_rate(r.metrics.specificity),
                fmt_rate(r.metrics.accuracy),
                r.counts.true_pos,
                r.counts.false_neg,
                r.counts.false_pos,
                r.counts.true_neg,
            );
        }
        out
    }
}

/// Shortest round-trippable decimal for a defined rate, `NA` otherwise.
pub(crate) fn fmt_rate(rate: Option<f64>) -> String {
    match rate {
        Some(v) => format!("{v}"),
        None => "NA".to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::metrics;

    fn row(iter: u64, counts: ConfusionCounts) -> IterationRow {
        IterationRow {
            iter,
            time_ms: iter * 100,
            energy: 1.5,
            metrics: metrics(&counts),
            counts,
        }
    }

    #[test]
    fn csv_has_the_documented_header_and_one_line_per_row() {
        let counts = ConfusionCounts {
            true_pos: 9,
            false_neg: 1,
            false_pos: 5,
            true_neg: 85,
        };
        let mut log = IterationLog::new();
        log.push(row(0, counts));
        log.push(row(3, counts));
        let csv = log.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], LOG_CSV_HEADER);
        assert_eq!(lines[1], "0,0,1.5,0.9,0.9444444444444444,0.94,9,1,5,85");
        assert_eq!(lines[2], "3,300,1.5,0.9,0.9444444444444444,0.94,9,1,5,85");
    }

    #[test]
    fn undefined_rates_render_as_na() {
        let counts = ConfusionCounts {
            true_pos: 0,
            false_neg: 0,
            false_pos: 1,
            true_neg: 3,
        };
        let mut log = IterationLog::new();
        log.push(row(0, counts));
        assert_eq!(log.to_csv().lines().nth(1).unwrap(), "0,0,1.5,NA,0.75,0.75,0,0,1,3");
    }

    #[test]
    #[should_panic(expected = "initial state")]
    fn first_row_must_be_iteration_zero() {
        let counts = ConfusionCounts {
            true_pos: 0,
            false_neg: 0,
            false_pos: 0,
            true_neg: 1,
        };
        IterationLog::new().push(row(1, counts));
    }

    #[test]
    #[should_panic(expected = "strictly increase")]
    fn iters_must_strictly_increase() {
        let counts = ConfusionCounts {
            true_pos: 0,
            false_neg: 0,
            false_pos: 0,
            true_neg: 1,
        };
        let mut log = IterationLog::new();
        log.push(row(0, counts));
        log.push(row(0, counts));
    }
}
