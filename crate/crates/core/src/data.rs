//! Datasets, vertical partitioning and deterministic splits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from, tags};

/// Dense row-major feature matrix with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: usize,
    cols: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    class_count: usize,
    feature_names: Vec<String>,
    /// Generator seed, or 0 for ingested data.
    pub seed: u64,
}

impl Dataset {
    pub fn new(rows: usize, cols: usize, features: Vec<f64>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if features.len() != rows * cols {
            return Err(Error::param(
                "features",
                format!("expected {} values, got {}", rows * cols, features.len()),
            ));
        }
        if labels.len() != rows {
            return Err(Error::param(
                "labels",
                format!("{} labels for {} rows", labels.len(), rows),
            ));
        }
        if class_count < 2 {
            return Err(Error::param("class_count", "need at least 2 classes"));
        }
        if let Some(bad) = labels.iter().find(|&&y| y >= class_count) {
            return Err(Error::param(
                "labels",
                format!("label {bad} outside [0, {class_count})"),
            ));
        }
        let feature_names = (0..cols).map(|j| format!("f{j}")).collect();
        Ok(Self {
            rows,
            cols,
            features,
            labels,
            class_count,
            feature_names,
            seed: 0,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::param("feature_names", "length must equal column count"));
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.value(i, col)).collect()
    }

    /// Materialises the given rows (in the given order) as a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.cols);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            features.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
        }
        Dataset {
            rows: rows.len(),
            cols: self.cols,
            features,
            labels,
            class_count: self.class_count,
            feature_names: self.feature_names.clone(),
            seed: self.seed,
        }
    }

    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.class_count];
        for &y in &self.labels {
            h[y] += 1;
        }
        h
    }

    /// Writes a header row (feature names, then `label`) followed by one row per instance.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        let mut header = self.feature_names.join(",");
        header.push_str(",label\n");
        out.write_all(header.as_bytes())?;
        for i in 0..self.rows {
            let mut line = String::with_capacity(self.cols * 20);
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            line.push(',');
            line.push_str(&self.labels[i].to_string());
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub instances: usize,
    pub active_features: usize,
    pub passive_features: usize,
    pub classes: usize,
    pub class_sep: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 2,000 instances, 5 + 5 features, 2 classes.
    pub fn synthetic1(seed: u64) -> Self {
        Self {
            instances: 2000,
            active_features: 5,
            passive_features: 5,
            classes: 2,
            class_sep: 1.0,
            seed,
        }
    }

    /// 10,000 instances, 5 + 5 features, 10 classes.
    pub fn synthetic2(seed: u64) -> Self {
        Self {
            instances: 10_000,
            active_features: 5,
            passive_features: 5,
            classes: 10,
            class_sep: 1.0,
            seed,
        }
    }

    pub fn generate(&self) -> Result<Dataset> {
        generate_synthetic(
            self.instances,
            self.active_features,
            self.passive_features,
            self.classes,
            self.class_sep,
            self.seed,
        )
    }
}

/// Gaussian blobs around distinct hypercube vertices, mixed by a random
/// full-rank linear map. Labels are balanced to within one instance.
pub fn generate_synthetic(
    n: usize,
    f_active: usize,
    f_passive: usize,
    c: usize,
    class_sep: f64,
    seed: u64,
) -> Result<Dataset> {
    if c < 2 {
        return Err(Error::param("classes", "need at least 2 classes"));
    }
    if n < 2 * c {
        return Err(Error::param("instances", format!("need at least {} instances", 2 * c)));
    }
    if f_active == 0 || f_passive == 0 {
        return Err(Error::param("features", "both parties need at least one feature"));
    }
    if !(class_sep > 0.0 && class_sep.is_finite()) {
        return Err(Error::param("class_sep", "must be a positive finite real"));
    }
    let f = f_active + f_passive;
    if f < 64 && (1u64 << f) < c as u64 {
        return Err(Error::param(
            "classes",
            format!("{c} classes do not fit on the vertices of a {f}-cube"),
        ));
    }

    let mut rng = rng_from(seed, tags::SYNTHETIC);
    // Regenerate until no column is constant; in practice the first draw succeeds.
    loop {
        let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(c);
        while centroids.len() < c {
            let v: Vec<f64> = (0..f)
                .map(|_| if rng.random::<bool>() { class_sep } else { -class_sep })
                .collect();
            if !centroids.contains(&v) {
                centroids.push(v);
            }
        }

        let mixing = loop {
            let m = DMatrix::<f64>::from_fn(f, f, |_, _| StandardNormal.sample(&mut rng));
            if m.rank(1e-9) == f {
                break m;
            }
        };

        let mut labels: Vec<usize> = (0..n).map(|i| i % c).collect();
        labels.shuffle(&mut rng);

        let mut features = Vec::with_capacity(n * f);
        let mut latent = vec![0.0; f];
        for &y in &labels {
            for (k, z) in latent.iter_mut().enumerate() {
                let noise: f64 = StandardNormal.sample(&mut rng);
                *z = centroids[y][k] + noise;
            }
            for r in 0..f {
                let mut acc = 0.0;
                for (k, z) in latent.iter().enumerate() {
                    acc += mixing[(r, k)] * z;
                }
                features.push(acc);
            }
        }

        let mut ds = Dataset::new(n, f, features, labels, c)?;
        ds.seed = seed;
        let constant = (0..f).any(|j| {
            let first = ds.value(0, j);
            (1..n).all(|i| ds.value(i, j) == first)
        });
        if !constant {
            return Ok(ds);
        }
    }
}

/// Which CSV column holds the labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Loads a numeric CSV with a header row. Labels are re-encoded to `0..C` in
/// ascending order of their numeric value.
pub fn load_csv(path: &Path, label_column: &LabelColumn, classes: usize) -> Result<Dataset> {
    let ingest = |row: usize, column: &str, reason: String| Error::Ingestion {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| ingest(0, "-", e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| ingest(0, "-", e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let label_idx = match label_column {
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => return Err(ingest(0, &i.to_string(), "label column index out of range".into())),
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ingest(0, name, "label column not found".into()))?,
    };
    let cols = headers.len() - 1;
    if cols == 0 {
        return Err(ingest(0, "-", "no feature columns".into()));
    }

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        // Row numbers are 1-based data rows (the header is row 0).
        let row = r + 1;
        let record = record.map_err(|e| ingest(row, "-", e.to_string()))?;
        if record.len() != headers.len() {
            return Err(ingest(
                row,
                "-",
                format!("expected {} cells, found {}", headers.len(), record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| {
                let reason = if cell.is_empty() {
                    "missing value".to_string()
                } else {
                    format!("non-numeric cell `{cell}`")
                };
                ingest(row, &headers[j], reason)
            })?;
            if !v.is_finite() {
                return Err(ingest(row, &headers[j], "non-finite value".into()));
            }
            if j == label_idx {
                raw_labels.push(v);
            } else {
                features.push(v);
            }
        }
    }
    let rows = raw_labels.len();
    if rows == 0 {
        return Err(ingest(0, "-", "no data rows".into()));
    }

    let mut distinct: BTreeMap<u64, usize> = BTreeMap::new();
    let mut sorted = raw_labels.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.dedup();
    if sorted.len() != classes {
        return Err(ingest(
            0,
            &headers[label_idx],
            format!("expected {classes} classes, found {}", sorted.len()),
        ));
    }
    for (k, v) in sorted.iter().enumerate() {
        distinct.insert(v.to_bits(), k);
    }
    let labels = raw_labels.iter().map(|v| distinct[&v.to_bits()]).collect();
    let names = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    Dataset::new(rows, cols, features, labels, classes)?.with_feature_names(names)
}

/// Column ownership between the active (label-holding) and passive party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerticalPartition {
    pub active_columns: Vec<usize>,
    pub passive_columns: Vec<usize>,
}

impl VerticalPartition {
    pub fn total_columns(&self) -> usize {
        self.active_columns.len() + self.passive_columns.len()
    }

    pub fn is_active(&self, col: usize) -> bool {
        self.active_columns.contains(&col)
    }

    pub fn is_passive(&self, col: usize) -> bool {
        self.passive_columns.contains(&col)
    }

    pub fn validate(&self, total: usize) -> Result<()> {
        if self.active_columns.is_empty() || self.passive_columns.is_empty() {
            return Err(Error::param("partition", "both parties need at least one column"));
        }
        let mut all: Vec<usize> = self
            .active_columns
            .iter()
            .chain(&self.passive_columns)
            .copied()
            .collect();
        all.sort_unstable();
        if all != (0..total).collect::<Vec<_>>() {
            return Err(Error::param(
                "partition",
                "columns must be disjoint and cover every feature",
            ));
        }
        Ok(())
    }
}

/// First `active_count` columns go to the active party, the rest to the passive party.
pub fn vertical_partition(dataset: &Dataset, active_count: usize, _seed: u64) -> Result<VerticalPartition> {
    let total = dataset.cols();
    if active_count == 0 || active_count >= total {
        return Err(Error::param(
            "active_count",
            format!("must lie in [1, {}), got {active_count}", total),
        ));
    }
    Ok(VerticalPartition {
        active_columns: (0..active_count).collect(),
        passive_columns: (active_count..total).collect(),
    })
}

/// Like [`vertical_partition`] but assigns a seeded random subset of columns to the active party.
pub fn vertical_partition_shuffled(dataset: &Dataset, active_count: usize, seed: u64) -> Result<VerticalPartition> {
    let base = vertical_partition(dataset, active_count, seed)?;
    let mut cols: Vec<usize> = (0..base.total_columns()).collect();
    cols.shuffle(&mut rng_from(seed, tags::PARTITION));
    let mut active = cols[..active_count].to_vec();
    let mut passive = cols[active_count..].to_vec();
    active.sort_unstable();
    passive.sort_unstable();
    Ok(VerticalPartition {
        active_columns: active,
        passive_columns: passive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
}

/// Seeded shuffle; the first `floor(2n/3)` rows train, the rest test. Both lists are returned sorted.
pub fn train_test_split(dataset: &Dataset, seed: u64) -> Result<SplitIndices> {
    let n = dataset.rows();
    if n == 0 {
        return Err(Error::param("dataset", "empty dataset"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from(seed, tags::SPLIT));
    let cut = 2 * n / 3;
    let mut train_rows = idx[..cut].to_vec();
    let mut test_rows = idx[cut..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(SplitIndices {
        train_rows,
        test_rows,
        seed,
    })
}

/// Draws exactly `per_class` indices of every class without replacement. Result is sorted.
pub fn sample_balanced(labels: &[usize], per_class: usize, seed: u64) -> Result<Vec<usize>> {
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let mut rng = rng_from(seed, tags::PROBE);
    let mut out = Vec::with_capacity(per_class * classes);
    for (class, members) in by_class.iter_mut().enumerate() {
        if members.len() < per_class {
            return Err(Error::Sampling {
                class,
                requested: per_class,
                available: members.len(),
            });
        }
        let (chosen, _) = members.partial_shuffle(&mut rng, per_class);
        out.extend_from_slice(chosen);
    }
    out.sort_unstable();
    Ok(out)
}
