//! Timeseries classification with one conceptor per class on the native
//! (unloaded) reservoir.
//!
//! Positive evidence for class `j` is how much of a test cloud's energy
//! passes `C⁺ⱼ`; negative evidence is how much passes `¬(∨_{i≠j} C⁺ᵢ)`, the
//! space none of the other classes claims. The decision uses their sum.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conceptor::{self, Conceptor, Correlation};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::reservoir::{Reservoir, StateCloud};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub label: String,
    pub conceptor: Conceptor,
    pub correlation: Correlation,
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    res: Reservoir,
    classes: Vec<ClassRecord>,
    aperture: f64,
    washout: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub label: String,
    pub positive: f64,
    pub negative: f64,
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceVector(pub Vec<Evidence>);

impl EvidenceVector {
    fn argmax(&self, key: impl Fn(&Evidence) -> f64) -> &str {
        let mut best = &self.0[0];
        for e in &self.0[1..] {
            // Strict comparison keeps the earliest class on ties.
            if key(e) > key(best) {
                best = e;
            }
        }
        &best.label
    }

    pub fn best_combined(&self) -> &str {
        self.argmax(|e| e.combined)
    }

    pub fn best_positive(&self) -> &str {
        self.argmax(|e| e.positive)
    }

    /// Labels ordered by decreasing combined evidence.
    pub fn ranking(&self) -> Vec<&str> {
        let mut v: Vec<&Evidence> = self.0.iter().collect();
        v.sort_by(|a, b| b.combined.total_cmp(&a.combined));
        v.into_iter().map(|e| e.label.as_str()).collect()
    }
}

fn class_record(res: &Reservoir, label: &str, patterns: &[Pattern], aperture: f64, washout: usize) -> Result<ClassRecord> {
    let clouds: Vec<StateCloud> = patterns
        .iter()
        .filter(|p| p.len() > washout)
        .map(|p| res.drive(p, washout))
        .collect::<Result<_>>()?;
    if clouds.is_empty() {
        return Err(Error::EmptyClass(label.to_string()));
    }
    let correlation = Correlation::pooled(&clouds)?;
    let conceptor = Conceptor::from_correlation(&correlation, aperture)?;
    Ok(ClassRecord {
        label: label.to_string(),
        sample_count: correlation.sample_count(),
        conceptor,
        correlation,
    })
}

/// Mean `zᵀ C z` over the cloud divided by mean `zᵀ z`.
fn rayleigh(c: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let energy = z.norm_squared();
    if energy == 0.0 {
        return 0.0;
    }
    (z.component_mul(&(c * z))).sum() / energy
}

pub fn train_classifier(
    res: &Reservoir,
    labeled: &[(String, Vec<Pattern>)],
    aperture: f64,
    washout: usize,
) -> Result<Classifier> {
    let mut clf = Classifier { res: res.clone(), classes: Vec::new(), aperture, washout };
    for (label, patterns) in labeled {
        clf = clf.add_class(label, patterns)?;
    }
    if clf.classes.is_empty() {
        return Err(Error::InvalidParameter("no classes to train".into()));
    }
    Ok(clf)
}

impl Classifier {
    pub fn classes(&self) -> &[ClassRecord] {
        &self.classes
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn reservoir(&self) -> &Reservoir {
        &self.res
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn washout(&self) -> usize {
        self.washout
    }

    /// New classifier with one more class computed from `patterns` alone.
    pub fn add_class(&self, label: &str, patterns: &[Pattern]) -> Result<Classifier> {
        if self.classes.iter().any(|c| c.label == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        let record = class_record(&self.res, label, patterns, self.aperture, self.washout)?;
        let mut next = self.clone();
        next.classes.push(record);
        Ok(next)
    }

    pub fn evidence(&self, sample: &Pattern) -> Result<EvidenceVector> {
        if self.classes.is_empty() {
            return Err(Error::InvalidParameter("classifier has no classes".into()));
        }
        let cloud = self.res.drive(sample, self.washout)?;
        let z = &cloud.states;
        let n = self.res.size();
        let mut out = Vec::with_capacity(self.classes.len());
        for (j, class) in self.classes.iter().enumerate() {
            let positive = rayleigh(class.conceptor.matrix(), z);
            let others = conceptor::or_all(
                n,
                self.classes.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, c)| &c.conceptor),
            )?;
            let negative = rayleigh(others.not().matrix(), z);
            out.push(Evidence { label: class.label.clone(), positive, negative, combined: positive + negative });
        }
        Ok(EvidenceVector(out))
    }

    pub fn classify(&self, sample: &Pattern) -> Result<String> {
        Ok(self.evidence(sample)?.best_combined().to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub id: String,
    pub truth: Option<String>,
    pub predicted: String,
    pub evidence: EvidenceVector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// `counts[truth][predicted]`, indexed like `labels`.
    pub counts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub samples: Vec<SampleReport>,
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
}

/// Classifies every sample; `truth` entries may be missing for unlabeled data.
pub fn evaluate(clf: &Classifier, samples: &[(String, Option<String>, Pattern)]) -> Result<ClassificationReport> {
    let labels: Vec<String> = clf.labels().into_iter().map(String::from).collect();
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut counts = vec![vec![0; labels.len()]; labels.len()];
    let mut reports = Vec::with_capacity(samples.len());
    let (mut correct, mut scored) = (0usize, 0usize);
    for (id, truth, p) in samples {
        let evidence = clf.evidence(p)?;
        let predicted = evidence.best_combined().to_string();
        if let Some(t) = truth {
            scored += 1;
            if *t == predicted {
                correct += 1;
            }
            if let (Some(&ti), Some(&pi)) = (index.get(t.as_str()), index.get(predicted.as_str())) {
                counts[ti][pi] += 1;
            }
        }
        reports.push(SampleReport { id: id.clone(), truth: truth.clone(), predicted, evidence });
    }
    Ok(ClassificationReport {
        schema_version: 1,
        samples: reports,
        confusion: ConfusionMatrix { labels, counts },
        accuracy: (scored > 0).then(|| correct as f64 / scored as f64),
    })
}

/// Reads a long-format dataset: rows of `(id, timestep, feature…)`, header
/// optional. Rows are ordered by timestep within each id; ids keep their
/// first-seen order.
pub fn read_long_csv(reader: impl Read) -> Result<Vec<Pattern>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(f64, Vec<f64>)>> = HashMap::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() < 3 {
            return Err(Error::Parse(format!("row {}: need id, timestep and a feature", i + 1)));
        }
        let id = record[0].to_string();
        let t = record[1].parse::<f64>();
        let feats: std::result::Result<Vec<f64>, _> = record.iter().skip(2).map(str::parse::<f64>).collect();
        let (t, feats) = match (t, feats) {
            (Ok(t), Ok(f)) => (t, f),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("row {}: non-numeric timestep or feature", i + 1))),
        };
        if !rows.contains_key(&id) {
            order.push(id.clone());
        }
        rows.entry(id).or_default().push((t, feats));
    }
    order
        .into_iter()
        .map(|id| {
            let mut r = rows.remove(&id).unwrap_or_default();
            r.sort_by(|a, b| a.0.total_cmp(&b.0));
            Pattern::new(id, r.into_iter().map(|(_, f)| f).collect())
        })
        .collect()
}

pub fn load_long_csv(path: &Path) -> Result<Vec<Pattern>> {
    read_long_csv(std::fs::File::open(path)?)
}

/// JSON object mapping sample ids to class labels.
pub fn load_label_map(path: &Path) -> Result<BTreeMap<String, String>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Groups patterns by label, keeping first-seen label order. Patterns
/// without a label are skipped.
pub fn group_by_label(patterns: &[Pattern], labels: &BTreeMap<String, String>) -> Vec<(String, Vec<Pattern>)> {
    let mut groups: Vec<(String, Vec<Pattern>)> = Vec::new();
    for p in patterns {
        let Some(label) = labels.get(p.name()) else { continue };
        match groups.iter_mut().find(|(l, _)| l == label) {
            Some((_, v)) => v.push(p.clone()),
            None => groups.push((label.clone(), vec![p.clone()])),
        }
    }
    groups
}
