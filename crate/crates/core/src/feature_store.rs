//! Data model and CSV ingestion for multi-domain feature sets.
//!
//! The on-disk format is one UTF-8 CSV per collection with header
//! `id,domain,label,weight,f0,f1,...` (the `weight` column is optional and
//! defaults to 1.0). Tables are immutable after load and safe to share
//! across threads read-only.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// One domain's feature matrix with per-instance weights, labels and ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    domain: String,
    ids: Vec<String>,
    labels: Vec<String>,
    weights: Vec<f64>,
    features: Array2<f64>,
}

impl FeatureTable {
    /// Builds a table and checks its invariants: finite features, unique ids,
    /// non-negative weights with at least one positive entry.
    pub fn new(
        domain: impl Into<String>,
        ids: Vec<String>,
        labels: Vec<String>,
        weights: Vec<f64>,
        features: Array2<f64>,
    ) -> Result<Self> {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::Validation("empty table".into()));
        }
        if ids.len() != n || labels.len() != n || weights.len() != n {
            return Err(Error::Validation(format!(
                "column lengths disagree: {} rows, {} ids, {} labels, {} weights",
                n,
                ids.len(),
                labels.len(),
                weights.len()
            )));
        }
        if let Some(bad) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite feature value {bad}")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Validation(format!("invalid weight {w}")));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::Validation("all instance weights are zero".into()));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate id `{id}`")));
            }
        }
        Ok(Self { domain: domain.into(), ids, labels, weights, features })
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    /// Instance count.
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same table with different instance weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(
            self.domain.clone(),
            self.ids.clone(),
            self.labels.clone(),
            weights,
            self.features.clone(),
        )
    }

    /// First `cap` instances, or the whole table when it is smaller.
    pub fn truncated(&self, cap: usize) -> Result<Self> {
        let n = self.len().min(cap);
        Self::new(
            self.domain.clone(),
            self.ids[..n].to_vec(),
            self.labels[..n].to_vec(),
            self.weights[..n].to_vec(),
            self.features.slice(ndarray::s![..n, ..]).to_owned(),
        )
    }
}

/// Inverse-class-frequency weights: `w_i = N / (C * n_c(i))`, so the total
/// weight mass of every class is equal.
pub fn class_balance_weights(table: &FeatureTable) -> Vec<f64> {
    let n = table.len() as f64;
    let mut class_counts: Vec<(&str, usize)> = Vec::new();
    for label in table.labels() {
        match class_counts.iter_mut().find(|(l, _)| *l == label.as_str()) {
            Some((_, c)) => *c += 1,
            None => class_counts.push((label, 1)),
        }
    }
    let c = class_counts.len() as f64;
    table
        .labels()
        .iter()
        .map(|label| {
            let n_c = class_counts
                .iter()
                .find(|(l, _)| *l == label.as_str())
                .map(|(_, c)| *c)
                .unwrap() as f64;
            n / (c * n_c)
        })
        .collect()
}

/// Ordered set of [`FeatureTable`]s, one per domain tag, sharing one feature
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCollection {
    domains: Vec<FeatureTable>,
}

impl DomainCollection {
    pub fn new(domains: Vec<FeatureTable>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::Validation("empty domain collection".into()));
        }
        let d = domains[0].dim();
        let mut tags = HashSet::new();
        for table in &domains {
            if table.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: table.dim() });
            }
            if !tags.insert(table.domain().to_string()) {
                return Err(Error::Validation(format!(
                    "duplicate domain tag `{}`",
                    table.domain()
                )));
            }
        }
        Ok(Self { domains })
    }

    pub fn domains(&self) -> &[FeatureTable] {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domains[0].dim()
    }

    pub fn get(&self, tag: &str) -> Option<&FeatureTable> {
        self.domains.iter().find(|t| t.domain() == tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.domains.iter().map(|t| t.domain())
    }

    /// The sole table of a single-domain collection.
    pub fn into_single(mut self) -> Result<FeatureTable> {
        if self.domains.len() != 1 {
            return Err(Error::Validation(format!(
                "expected a single domain, found {}",
                self.domains.len()
            )));
        }
        Ok(self.domains.pop().unwrap())
    }

    /// Loads the Feature CSV at `path`, grouping rows by their `domain`
    /// column. With a filter only the matching domain is kept.
    pub fn load_csv(path: impl AsRef<Path>, domain_filter: Option<&str>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path.as_ref())?;

        let headers = reader.headers().map_err(csv_error)?.clone();
        let layout = HeaderLayout::parse(&headers)?;

        // Accumulate per-domain in order of first appearance.
        let mut order: Vec<String> = Vec::new();
        let mut groups: Vec<(Vec<String>, Vec<String>, Vec<f64>, Vec<f64>)> = Vec::new();

        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != headers.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields, found {}", headers.len(), record.len()),
                });
            }
            let domain = record[layout.domain].to_string();
            if let Some(filter) = domain_filter {
                if domain != filter {
                    continue;
                }
            }
            let weight = match layout.weight {
                Some(col) => {
                    let raw = &record[col];
                    let w: f64 = raw.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("non-numeric weight `{raw}`"),
                    })?;
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::Validation(format!(
                            "negative or non-finite weight {w} at line {line}"
                        )));
                    }
                    w
                }
                None => 1.0,
            };
            let mut feats = Vec::with_capacity(layout.dim);
            for &col in &layout.feature_cols {
                let raw = &record[col];
                let v: f64 = raw.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("non-numeric feature `{raw}`"),
                })?;
                feats.push(v);
            }

            let idx = match order.iter().position(|t| t == &domain) {
                Some(i) => i,
                None => {
                    order.push(domain.clone());
                    groups.push(Default::default());
                    order.len() - 1
                }
            };
            let g = &mut groups[idx];
            g.0.push(record[layout.id].to_string());
            g.1.push(record[layout.label].to_string());
            g.2.push(weight);
            g.3.extend_from_slice(&feats);
        }

        if order.is_empty() {
            return Err(Error::Validation(match domain_filter {
                Some(f) => format!("no rows for domain `{f}`"),
                None => "empty table".into(),
            }));
        }

        let mut tables = Vec::with_capacity(order.len());
        for (tag, (ids, labels, weights, flat)) in order.into_iter().zip(groups) {
            let n = ids.len();
            let features = Array2::from_shape_vec((n, layout.dim), flat)
                .expect("row-major feature buffer matches (n, d)");
            tables.push(FeatureTable::new(tag, ids, labels, weights, features)?);
        }
        DomainCollection::new(tables)
    }

    /// Writes the collection in the same CSV layout `load_csv` reads.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// CSV rendering; floats use the shortest round-trip representation.
    pub fn to_csv_string(&self) -> String {
        let d = self.dim();
        let mut out = String::new();
        out.push_str("id,domain,label,weight");
        for j in 0..d {
            let _ = write!(out, ",f{j}");
        }
        out.push('\n');
        for table in &self.domains {
            for i in 0..table.len() {
                let _ = write!(
                    out,
                    "{},{},{},{}",
                    table.ids()[i],
                    table.domain(),
                    table.labels()[i],
                    table.weights()[i]
                );
                for v in table.row(i) {
                    let _ = write!(out, ",{v}");
                }
                out.push('\n');
            }
        }
        out
    }

    /// Per-dimension z-scoring with mean and deviation pooled over all
    /// domains, so between-domain differences survive the rescaling.
    /// Dimensions with zero spread are centered only.
    pub fn zscore_pooled(&self) -> Result<Self> {
        let d = self.dim();
        let total: usize = self.domains.iter().map(|t| t.len()).sum();
        let mut mean = vec![0.0; d];
        for table in &self.domains {
            for row in table.features().rows() {
                for (m, v) in mean.iter_mut().zip(row) {
                    *m += v;
                }
            }
        }
        for m in &mut mean {
            *m /= total as f64;
        }
        let mut var = vec![0.0; d];
        for table in &self.domains {
            for row in table.features().rows() {
                for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                    *s += (v - m) * (v - m);
                }
            }
        }
        let scale: Vec<f64> = var
            .iter()
            .map(|s| {
                let sd = (s / total as f64).sqrt();
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();

        let domains = self
            .domains
            .iter()
            .map(|table| {
                let mut features = table.features().clone();
                for mut row in features.rows_mut() {
                    for ((v, m), sc) in row.iter_mut().zip(&mean).zip(&scale) {
                        *v = (*v - m) / sc;
                    }
                }
                FeatureTable::new(
                    table.domain().to_string(),
                    table.ids().to_vec(),
                    table.labels().to_vec(),
                    table.weights().to_vec(),
                    features,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        DomainCollection::new(domains)
    }

    /// Applies [`FeatureTable::truncated`] to every domain.
    pub fn truncated(&self, cap: usize) -> Result<Self> {
        DomainCollection::new(
            self.domains.iter().map(|t| t.truncated(cap)).collect::<Result<Vec<_>>>()?,
        )
    }
}

struct HeaderLayout {
    id: usize,
    domain: usize,
    label: usize,
    weight: Option<usize>,
    feature_cols: Vec<usize>,
    dim: usize,
}

impl HeaderLayout {
    fn parse(headers: &csv::StringRecord) -> Result<Self> {
        let position = |name: &str| {
            headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("missing `{name}` column"),
            })
        };
        let id = position("id")?;
        let domain = position("domain")?;
        let label = position("label")?;
        let weight = headers.iter().position(|h| h == "weight");
        let feature_cols: Vec<usize> = headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.starts_with('f') && h[1..].chars().all(|c| c.is_ascii_digit()))
            .map(|(i, _)| i)
            .collect();
        if feature_cols.is_empty() {
            return Err(Error::Parse { line: 1, msg: "no feature columns (f0, f1, ...)".into() });
        }
        Ok(Self { id, domain, label, weight, dim: feature_cols.len(), feature_cols })
    }
}

fn csv_error(err: csv::Error) -> Error {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    Error::Parse { line, msg: err.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn table(labels: &[&str]) -> FeatureTable {
        let n = labels.len();
        FeatureTable::new(
            "d0",
            (0..n).map(|i| format!("i{i}")).collect(),
            labels.iter().map(|s| s.to_string()).collect(),
            vec![1.0; n],
            Array2::zeros((n, 2)),
        )
        .unwrap()
    }

    #[test]
    fn missing_weight_column_defaults_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "id,domain,label,f0,f1\na,d0,x,0.0,1.0\nb,d0,x,1.0,0.0\nc,d0,y,2.0,2.0\n").unwrap();
        let table = DomainCollection::load_csv(&path, None).unwrap().into_single().unwrap();
        assert_eq!(table.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(table.len(), 3);
        assert_eq!(table.dim(), 2);
    }

    #[test]
    fn rows_group_by_domain_tag() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(
            &path,
            "id,domain,label,weight,f0\na,A,x,1,0.5\nb,B,x,1,1.5\nc,A,y,2,2.5\n",
        )
        .unwrap();
        let coll = DomainCollection::load_csv(&path, None).unwrap();
        assert_eq!(coll.len(), 2);
        assert_eq!(coll.domains()[0].domain(), "A");
        assert_eq!(coll.domains()[0].len(), 2);
        assert_eq!(coll.domains()[1].domain(), "B");
        assert_eq!(coll.domains()[1].len(), 1);

        let only_b = DomainCollection::load_csv(&path, Some("B")).unwrap();
        assert_eq!(only_b.len(), 1);
        assert_eq!(only_b.domains()[0].ids(), &["b".to_string()]);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "id,domain,label,weight,f0\na,d0,x,-0.5,0.0\n").unwrap();
        let err = DomainCollection::load_csv(&path, None).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "got {err:?}");
    }

    #[test]
    fn malformed_rows_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "id,domain,label,weight,f0\na,d0,x,1,0.0\nb,d0,x,1,oops\n").unwrap();
        match DomainCollection::load_csv(&path, None).unwrap_err() {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("oops"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        std::fs::write(&path, "id,domain,label,weight,f0\na,d0,x,1\n").unwrap();
        match DomainCollection::load_csv(&path, None).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "id,domain,label,weight,f0\n").unwrap();
        assert!(matches!(
            DomainCollection::load_csv(&path, None).unwrap_err(),
            Error::Validation(_)
        ));
    }

    #[test]
    fn class_balance_on_balanced_labels_is_uniform() {
        assert_eq!(class_balance_weights(&table(&["a", "a", "b", "b"])), vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn class_balance_evens_out_class_mass() {
        let w = class_balance_weights(&table(&["a", "a", "a", "b"]));
        assert_eq!(w, vec![2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 2.0]);
        let mass_a: f64 = w[..3].iter().sum();
        assert!((mass_a - 2.0).abs() < 1e-12);
        assert!((w[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn class_balance_single_class_is_uniform() {
        assert_eq!(class_balance_weights(&table(&["a", "a"])), vec![1.0, 1.0]);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = FeatureTable::new(
            "d0",
            vec!["a".into(), "a".into()],
            vec!["x".into(), "x".into()],
            vec![1.0, 1.0],
            Array2::zeros((2, 1)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn collections_require_shared_dimension() {
        let a = FeatureTable::new("A", vec!["a".into()], vec!["x".into()], vec![1.0], Array2::zeros((1, 2))).unwrap();
        let b = FeatureTable::new("B", vec!["b".into()], vec!["x".into()], vec![1.0], Array2::zeros((1, 3))).unwrap();
        assert!(matches!(
            DomainCollection::new(vec![a, b]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, found: 3 }
        ));
    }

    #[test]
    fn zscore_pools_statistics_across_domains() {
        let a = FeatureTable::new(
            "A",
            vec!["a0".into(), "a1".into()],
            vec!["x".into(); 2],
            vec![1.0; 2],
            array![[0.0], [0.0]],
        )
        .unwrap();
        let b = FeatureTable::new(
            "B",
            vec!["b0".into(), "b1".into()],
            vec!["x".into(); 2],
            vec![1.0; 2],
            array![[2.0], [2.0]],
        )
        .unwrap();
        let z = DomainCollection::new(vec![a, b]).unwrap().zscore_pooled().unwrap();
        // Pooled mean 1, pooled sd 1: domains map to -1 and +1 rather than collapsing to 0.
        assert_eq!(z.domains()[0].features()[[0, 0]], -1.0);
        assert_eq!(z.domains()[1].features()[[0, 0]], 1.0);
    }
}
