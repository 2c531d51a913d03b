//! Per-segment feature records and their CSV form.
//!
//! ```text
//! segment_id,set,D1,D2,D3,D4,D5,A5,label
//! Z001.txt,A,3.2e-3,...,healthy
//! ```
//!
//! Shares are written with 17 significant digits so a file read back yields
//! the exact same vectors.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::class::{Class, SetTag};
use crate::data::Segment;
use crate::dwt::{db4_filter, decompose, DwtError};
use crate::energy::{band_energies, feature_vector, EnergyError, FeatureVector, FEATURE_DIM, FEATURE_LEVELS, FEATURE_NAMES};

pub const CSV_HEADER: [&str; 9] = ["segment_id", "set", "D1", "D2", "D3", "D4", "D5", "A5", "label"];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("segment {id}: {source}")]
    Transform {
        id: String,
        #[source]
        source: DwtError,
    },
    #[error("segment {id}: {source}")]
    Energy {
        id: String,
        #[source]
        source: EnergyError,
    },
    #[error("{origin}:{line}: {message}")]
    Csv {
        origin: String,
        line: u64,
        message: String,
    },
}

/// Energy distribution of one segment together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub segment_id: String,
    pub set_tag: SetTag,
    pub feature: FeatureVector,
}

impl FeatureRecord {
    pub fn label(&self) -> Class {
        self.set_tag.class()
    }
}

/// Five-level db4 energy distribution of one segment.
pub fn segment_features(segment: &Segment) -> Result<FeatureRecord, FeatureError> {
    let dec = decompose(&segment.signal, &db4_filter(), FEATURE_LEVELS).map_err(|source| {
        FeatureError::Transform {
            id: segment.id.clone(),
            source,
        }
    })?;
    let feature = band_energies(&dec)
        .and_then(|e| feature_vector(&e))
        .map_err(|source| FeatureError::Energy {
            id: segment.id.clone(),
            source,
        })?;
    Ok(FeatureRecord {
        segment_id: segment.id.clone(),
        set_tag: segment.set_tag,
        feature: feature.with_label(segment.label()),
    })
}

/// Features for every segment, computed in parallel, in input order.
pub fn extract_features(segments: &[Segment]) -> Result<Vec<FeatureRecord>, FeatureError> {
    segments.par_iter().map(segment_features).collect()
}

pub fn records_to_csv(records: &[FeatureRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        let mut row = Vec::with_capacity(CSV_HEADER.len());
        row.push(r.segment_id.clone());
        row.push(r.set_tag.to_string());
        row.extend(r.feature.shares().iter().map(|s| format!("{s:.16e}")));
        row.push(r.label().to_string());
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Parses a feature CSV. `origin` names the source in error messages.
pub fn records_from_csv(text: &str, origin: &str) -> Result<Vec<FeatureRecord>, FeatureError> {
    let err = |line: u64, message: String| FeatureError::Csv {
        origin: origin.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(err(1, format!("expected header `{}`", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let set_tag: SetTag = row[1].parse().map_err(|m| err(line, m))?;
        let mut shares = [0.0; FEATURE_DIM];
        for (k, slot) in shares.iter_mut().enumerate() {
            let field = &row[2 + k];
            *slot = field
                .parse()
                .map_err(|_| err(line, format!("{} value `{field}` is not a number", FEATURE_NAMES[k])))?;
        }
        let label: Class = row[8].parse().map_err(|m| err(line, m))?;
        if label != set_tag.class() {
            return Err(err(line, format!("label {label} does not match set {set_tag}")));
        }
        let feature = FeatureVector::new(shares, Some(label)).map_err(|e| err(line, e.to_string()))?;
        out.push(FeatureRecord {
            segment_id: row[0].to_string(),
            set_tag,
            feature,
        });
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<FeatureRecord>, crate::Error> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(records_from_csv(&text, &path.display().to_string())?)
}

/// Mean, minimum and maximum share per band for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub class: Class,
    pub count: usize,
    pub mean: [f64; FEATURE_DIM],
    pub min: [f64; FEATURE_DIM],
    pub max: [f64; FEATURE_DIM],
}

/// Per-class share statistics; classes without records are omitted.
pub fn summarize(records: &[FeatureRecord]) -> Vec<ClassSummary> {
    Class::ALL
        .iter()
        .filter_map(|&class| {
            let members: Vec<&FeatureVector> = records
                .iter()
                .filter(|r| r.label() == class)
                .map(|r| &r.feature)
                .collect();
            if members.is_empty() {
                return None;
            }
            let mut mean = [0.0; FEATURE_DIM];
            let mut min = [f64::INFINITY; FEATURE_DIM];
            let mut max = [f64::NEG_INFINITY; FEATURE_DIM];
            for fv in &members {
                for (k, &s) in fv.shares().iter().enumerate() {
                    mean[k] += s;
                    min[k] = min[k].min(s);
                    max[k] = max[k].max(s);
                }
            }
            mean.iter_mut().for_each(|m| *m /= members.len() as f64);
            Some(ClassSummary {
                class,
                count: members.len(),
                mean,
                min,
                max,
            })
        })
        .collect()
}

pub fn summary_to_csv(summaries: &[ClassSummary]) -> String {
    let mut out = format!("class,count,statistic,{}\n", FEATURE_NAMES.join(","));
    for s in summaries {
        for (name, values) in [("mean", &s.mean), ("min", &s.min), ("max", &s.max)] {
            let cols: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&format!("{},{},{name},{}\n", s.class, s.count, cols.join(",")));
        }
    }
    out
}

/// Human-readable mean distribution in percent, one line per class.
pub fn summary_to_text(summaries: &[ClassSummary]) -> String {
    let mut out = format!("{:<19}{:>5}", "CLASS", "N");
    for name in FEATURE_NAMES {
        out.push_str(&format!("{name:>8}"));
    }
    out.push('\n');
    for s in summaries {
        out.push_str(&format!("{:<19}{:>5}", s.class.caption(), s.count));
        for m in s.mean {
            out.push_str(&format!("{:>8.1}", m * 100.0));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_corpus;

    #[test]
    fn csv_round_trip_is_exact() {
        let records = extract_features(&synth_corpus(5, 2)).unwrap();
        let text = records_to_csv(&records);
        assert!(text.starts_with("segment_id,set,D1,D2,D3,D4,D5,A5,label\n"));
        assert_eq!(records_from_csv(&text, "mem").unwrap(), records);
    }

    #[test]
    fn csv_errors_carry_line() {
        let records = extract_features(&synth_corpus(5, 1)).unwrap();
        let text = records_to_csv(&records).replacen(",A,", ",C,", 1);
        match records_from_csv(&text, "f.csv") {
            Err(FeatureError::Csv { line, origin, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(origin, "f.csv");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(records_from_csv("a,b\n", "x").is_err());
        assert_eq!(records_from_csv(&CSV_HEADER.join(","), "x").unwrap(), vec![]);
    }

    #[test]
    fn zero_segment_is_rejected_with_its_id() {
        let mut corpus = synth_corpus(1, 1);
        corpus[1].signal = crate::dwt::Signal::new(vec![0.0; 4096], 173.61).unwrap();
        let err = extract_features(&corpus).unwrap_err();
        assert!(err.to_string().contains("synth-C-000"), "{err}");
    }

    #[test]
    fn summary_statistics() {
        let records = extract_features(&synth_corpus(2, 4)).unwrap();
        let summary = summarize(&records);
        assert_eq!(summary.len(), 3);
        for s in &summary {
            assert_eq!(s.count, 4);
            for k in 0..FEATURE_DIM {
                assert!(s.min[k] <= s.mean[k] && s.mean[k] <= s.max[k]);
            }
        }
        assert_eq!(summary_to_csv(&summary).lines().count(), 1 + 9);
    }
}
