//! Confusion matrix and accuracy reporting.

use std::fmt::Write as _;

use thiserror::Error;

use crate::class::Class;
use crate::energy::FeatureVector;
use crate::net::{classify, ClassEncoding, Network};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("class {0} does not occur in the evaluated set; its accuracy is undefined")]
    EmptyRow(Class),
    #[error("nothing was evaluated")]
    Empty,
}

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 3]; 3]) -> Self {
        Self { counts }
    }

    pub fn record(&mut self, truth: Class, predicted: Class) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn counts(&self) -> &[[u64; 3]; 3] {
        &self.counts
    }

    pub fn get(&self, truth: Class, predicted: Class) -> u64 {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn row_total(&self, truth: Class) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn class_accuracy(&self, class: Class) -> Result<f64, EvalError> {
        match self.row_total(class) {
            0 => Err(EvalError::EmptyRow(class)),
            n => Ok(self.get(class, class) as f64 / n as f64),
        }
    }

    pub fn overall_accuracy(&self) -> Result<f64, EvalError> {
        match self.total() {
            0 => Err(EvalError::Empty),
            n => Ok(self.trace() as f64 / n as f64),
        }
    }

    /// Per-class accuracy (`None` where the class is absent) and overall accuracy.
    pub fn accuracies(&self) -> Result<Accuracies, EvalError> {
        Ok(Accuracies {
            per_class: Class::ALL.map(|c| self.class_accuracy(c).ok()),
            overall: self.overall_accuracy()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracies {
    pub per_class: [Option<f64>; 3],
    pub overall: f64,
}

/// Classifies every labelled item and tallies the outcome.
pub fn evaluate<'a, I>(net: &Network, encoding: &ClassEncoding, items: I) -> ConfusionMatrix
where
    I: IntoIterator<Item = (&'a FeatureVector, Class)>,
{
    let mut cm = ConfusionMatrix::default();
    for (feature, truth) in items {
        let (predicted, _) = classify(net, encoding, feature);
        cm.record(truth, predicted);
    }
    cm
}

/// Fraction as a percentage with one decimal, e.g. `0.94 -> "94.0"`.
pub fn percent(fraction: f64) -> String {
    format!("{:.1}", fraction * 100.0)
}

fn percent_or_undefined(value: Option<f64>) -> String {
    value.map(percent).unwrap_or_else(|| "n/a".to_string())
}

/// Plain-text table laid out like the classic results table: one row per
/// true class, predicted-class columns and a per-class accuracy column,
/// followed by the overall success rate.
pub fn render_table(cm: &ConfusionMatrix) -> String {
    let widths = [19, 9, 19, 9, 14];
    let mut out = String::new();
    let header = ["CLASS", "HEALTHY", "EPILEPSY SYNDROME", "SEIZURE", "ACCURACY [%]"];
    for (h, w) in header.iter().zip(widths) {
        write!(out, "{h:<w$}").unwrap();
    }
    out.truncate(out.trim_end().len());
    out.push('\n');
    for class in Class::ALL {
        write!(out, "{:<w$}", class.caption(), w = widths[0]).unwrap();
        for (p, w) in Class::ALL.iter().zip(&widths[1..4]) {
            write!(out, "{:<w$}", cm.get(class, *p), w = *w).unwrap();
        }
        writeln!(out, "{}", percent_or_undefined(cm.class_accuracy(class).ok())).unwrap();
    }
    let overall = cm.overall_accuracy().ok();
    writeln!(
        out,
        "{:<w$}{}",
        "OVERALL SUCCESS RATE",
        percent_or_undefined(overall),
        w = widths[..4].iter().sum::<usize>()
    )
    .unwrap();
    out
}

/// CSV variant of [`render_table`].
pub fn render_csv(cm: &ConfusionMatrix) -> String {
    let mut out = String::from("class,healthy,epilepsy_syndrome,seizure,accuracy_percent\n");
    for class in Class::ALL {
        let row = cm.counts[class.index()];
        writeln!(
            out,
            "{},{},{},{},{}",
            class.as_str(),
            row[0],
            row[1],
            row[2],
            percent_or_undefined(cm.class_accuracy(class).ok())
        )
        .unwrap();
    }
    writeln!(
        out,
        "overall,,,,{}",
        percent_or_undefined(cm.overall_accuracy().ok())
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_iii() -> ConfusionMatrix {
        ConfusionMatrix::from_counts([[16, 0, 0], [2, 17, 0], [0, 1, 14]])
    }

    #[test]
    fn published_counts() {
        let cm = table_iii();
        assert_eq!(cm.total(), 50);
        assert_eq!(cm.trace(), 47);
        let acc = cm.accuracies().unwrap();
        assert!((acc.overall - 0.94).abs() < 1e-15);
        assert_eq!(acc.per_class[0], Some(1.0));
        assert_eq!(acc.per_class[1], Some(17.0 / 19.0));
        assert_eq!(acc.per_class[2], Some(14.0 / 15.0));
        assert_eq!(percent(acc.overall), "94.0");
        assert_eq!(percent(acc.per_class[1].unwrap()), "89.5");
        assert_eq!(percent(acc.per_class[2].unwrap()), "93.3");
    }

    #[test]
    fn empty_row_is_undefined() {
        let cm = ConfusionMatrix::from_counts([[3, 0, 0], [0, 0, 0], [1, 0, 2]]);
        assert_eq!(cm.class_accuracy(Class::EpilepsySyndrome), Err(EvalError::EmptyRow(Class::EpilepsySyndrome)));
        assert_eq!(cm.accuracies().unwrap().per_class[1], None);
        assert!(render_table(&cm).contains("n/a"));
        assert_eq!(ConfusionMatrix::default().accuracies(), Err(EvalError::Empty));
    }

    #[test]
    fn identity() {
        let cm = ConfusionMatrix::from_counts([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let acc = cm.accuracies().unwrap();
        assert_eq!(acc.per_class, [Some(1.0); 3]);
        assert_eq!(acc.overall, 1.0);
    }

    #[test]
    fn table_rendering() {
        let text = render_table(&table_iii());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("HEALTHY") && lines[1].ends_with("100.0"));
        assert!(lines[2].ends_with("89.5"));
        assert!(lines[3].ends_with("93.3"));
        assert!(lines[4].starts_with("OVERALL SUCCESS RATE") && lines[4].ends_with("94.0"));
        let csv = render_csv(&table_iii());
        assert!(csv.contains("healthy,16,0,0,100.0\n"));
        assert!(csv.ends_with("overall,,,,94.0\n"));
    }
}
