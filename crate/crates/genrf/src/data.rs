//! Validated domain containers and tab-separated flat-file ingestion.
//!
//! All files are UTF-8, tab-separated, Unix newlines, with a mandatory header
//! row. The first column holds subject ids; remaining columns are variants,
//! the single trait value, or covariates. Genotype entries are written as
//! integers; real values are written with 17 significant digits so a
//! write/reload round trip is bit exact.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg;
use crate::Real;

/// How to treat missing genotype entries (`NA`, `.` or empty cells).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Reject the file (default).
    #[default]
    Reject,
    /// Replace by the per-variant mean, rounded to the nearest of {0, 1, 2}.
    ImputeVariantMean,
}

/// Phenotype flavor, inferred on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraitKind {
    Continuous,
    Binary,
}

/// n x p matrix of minor-allele counts in {0, 1, 2}, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenotypeMatrix {
    n: usize,
    p: usize,
    values: Vec<u8>,
    subject_ids: Vec<String>,
    variant_ids: Vec<String>,
}

impl GenotypeMatrix {
    pub fn new(
        values: Vec<u8>,
        subject_ids: Vec<String>,
        variant_ids: Vec<String>,
    ) -> Result<Self, Error> {
        let n = subject_ids.len();
        let p = variant_ids.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 subjects, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidInput("need at least 1 variant".into()));
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch(format!(
                "genotype storage holds {} entries for {n} x {p}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| *v > 2) {
            return Err(Error::InvalidGenotype {
                path: "<memory>".into(),
                subject: subject_ids[bad / p].clone(),
                variant: variant_ids[bad % p].clone(),
                value: values[bad].to_string(),
            });
        }
        check_unique(&subject_ids)?;
        Ok(Self { n, p, values, subject_ids, variant_ids })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::load_with(path, MissingPolicy::Reject)
    }

    pub fn load_with(path: &Path, missing: MissingPolicy) -> Result<Self, Error> {
        let table = read_table(path)?;
        let p = table.column_names.len();
        let n = table.rows.len();
        let mut values: Vec<Option<u8>> = Vec::with_capacity(n * p);
        let mut any_missing = false;
        for (row_idx, row) in table.rows.iter().enumerate() {
            for (col_idx, cell) in row.cells.iter().enumerate() {
                if is_missing(cell) {
                    any_missing = true;
                    if missing == MissingPolicy::Reject {
                        return Err(Error::InvalidGenotype {
                            path: display(path),
                            subject: table.rows[row_idx].id.clone(),
                            variant: table.column_names[col_idx].clone(),
                            value: cell.clone(),
                        });
                    }
                    values.push(None);
                    continue;
                }
                match cell.parse::<u8>() {
                    Ok(v) if v <= 2 => values.push(Some(v)),
                    _ => {
                        return Err(Error::InvalidGenotype {
                            path: display(path),
                            subject: table.rows[row_idx].id.clone(),
                            variant: table.column_names[col_idx].clone(),
                            value: cell.clone(),
                        })
                    }
                }
            }
        }
        let values = if any_missing {
            impute_variant_means(values, n, p, path, &table)?
        } else {
            values.into_iter().map(|v| v.unwrap()).collect()
        };
        let subject_ids = table.rows.into_iter().map(|r| r.id).collect();
        Self::new(values, subject_ids, table.column_names)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let mut out = String::new();
        out.push_str("subject_id");
        for v in &self.variant_ids {
            out.push('\t');
            out.push_str(v);
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&self.subject_ids[i]);
            for k in 0..self.p {
                let _ = write!(out, "\t{}", self.values[i * self.p + k]);
            }
            out.push('\n');
        }
        write_file(path, &out)
    }

    pub fn n_subjects(&self) -> usize {
        self.n
    }

    pub fn n_variants(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn get(&self, i: usize, k: usize) -> u8 {
        self.values[i * self.p + k]
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn variant_ids(&self) -> &[String] {
        &self.variant_ids
    }

    /// Rows reordered to the given subject order (must be a permutation).
    fn reordered(&self, order: &[String]) -> Self {
        let idx = index_of(&self.subject_ids);
        let mut values = Vec::with_capacity(self.values.len());
        for id in order {
            values.extend_from_slice(self.row(idx[id]));
        }
        Self {
            n: self.n,
            p: self.p,
            values,
            subject_ids: order.to_vec(),
            variant_ids: self.variant_ids.clone(),
        }
    }
}

fn impute_variant_means(
    values: Vec<Option<u8>>,
    n: usize,
    p: usize,
    path: &Path,
    table: &Table,
) -> Result<Vec<u8>, Error> {
    let mut filled = vec![0u8; n * p];
    for k in 0..p {
        let mut sum = 0usize;
        let mut count = 0usize;
        for i in 0..n {
            if let Some(v) = values[i * p + k] {
                sum += v as usize;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::Parse {
                path: display(path),
                line: 1,
                message: format!("variant {} has no observed genotypes", table.column_names[k]),
            });
        }
        let mean = sum as f64 / count as f64;
        let rounded = (mean.round() as u8).min(2);
        for i in 0..n {
            filled[i * p + k] = values[i * p + k].unwrap_or(rounded);
        }
    }
    Ok(filled)
}

/// n trait values plus the subject ids they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct PhenotypeVector {
    values: DVector<f64>,
    trait_kind: TraitKind,
    subject_ids: Vec<String>,
}

impl PhenotypeVector {
    pub fn new(values: Vec<f64>, subject_ids: Vec<String>) -> Result<Self, Error> {
        if values.len() != subject_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} trait values for {} subjects",
                values.len(),
                subject_ids.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("trait values must be finite".into()));
        }
        check_unique(&subject_ids)?;
        let trait_kind = if values.iter().all(|v| *v == 0.0 || *v == 1.0) {
            TraitKind::Binary
        } else {
            TraitKind::Continuous
        };
        Ok(Self { values: DVector::from_vec(values), trait_kind, subject_ids })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let table = read_table(path)?;
        if table.column_names.len() != 1 {
            return Err(Error::Parse {
                path: display(path),
                line: 1,
                message: format!(
                    "phenotype file must have exactly one value column, found {}",
                    table.column_names.len()
                ),
            });
        }
        let mut values = Vec::with_capacity(table.rows.len());
        for (i, row) in table.rows.iter().enumerate() {
            let v: f64 = row.cells[0].parse().map_err(|_| Error::Parse {
                path: display(path),
                line: i + 2,
                message: format!("cannot parse trait value {:?}", row.cells[0]),
            })?;
            values.push(v);
        }
        let ids = table.rows.into_iter().map(|r| r.id).collect();
        Self::new(values, ids)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let mut out = String::from("subject_id\tphenotype\n");
        for (id, v) in self.subject_ids.iter().zip(self.values.iter()) {
            let _ = writeln!(out, "{}\t{}", id, fmt_real(*v));
        }
        write_file(path, &out)
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn trait_kind(&self) -> TraitKind {
        self.trait_kind
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }

    fn reordered(&self, order: &[String]) -> Self {
        let idx = index_of(&self.subject_ids);
        let values: Vec<f64> = order.iter().map(|id| self.values[idx[id]]).collect();
        Self {
            values: DVector::from_vec(values),
            trait_kind: self.trait_kind,
            subject_ids: order.to_vec(),
        }
    }
}

/// n x q design matrix whose first column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix {
    values: DMatrix<f64>,
    names: Vec<String>,
    subject_ids: Vec<String>,
}

impl CovariateMatrix {
    /// `values` must already carry the intercept as its first column.
    pub fn new(
        values: DMatrix<f64>,
        names: Vec<String>,
        subject_ids: Vec<String>,
    ) -> Result<Self, Error> {
        if values.nrows() != subject_ids.len() || values.ncols() != names.len() {
            return Err(Error::DimensionMismatch(format!(
                "covariate matrix is {} x {} but has {} ids and {} names",
                values.nrows(),
                values.ncols(),
                subject_ids.len(),
                names.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("covariates must be finite".into()));
        }
        if values.column(0).iter().any(|v| *v != 1.0) {
            return Err(Error::InvalidInput("first covariate column must be the intercept".into()));
        }
        check_unique(&subject_ids)?;
        if !linalg::full_column_rank(&values) {
            return Err(Error::RankDeficient { tol: linalg::RANK_TOL });
        }
        Ok(Self { values, names, subject_ids })
    }

    /// Intercept-only design for the given subjects.
    pub fn intercept_only(subject_ids: Vec<String>) -> Result<Self, Error> {
        let n = subject_ids.len();
        Self::new(DMatrix::from_element(n, 1, 1.0), vec!["(intercept)".into()], subject_ids)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let table = read_table(path)?;
        let n = table.rows.len();
        let q_in = table.column_names.len();
        let mut raw = DMatrix::<f64>::zeros(n, q_in);
        for (i, row) in table.rows.iter().enumerate() {
            for (j, cell) in row.cells.iter().enumerate() {
                raw[(i, j)] = cell.parse().map_err(|_| Error::Parse {
                    path: display(path),
                    line: i + 2,
                    message: format!("cannot parse covariate value {:?}", cell),
                })?;
            }
        }
        let ones: Vec<usize> =
            (0..q_in).filter(|j| raw.column(*j).iter().all(|v| *v == 1.0)).collect();
        let (values, names) = match ones.as_slice() {
            [] => {
                let mut with = DMatrix::<f64>::from_element(n, q_in + 1, 1.0);
                with.view_mut((0, 1), (n, q_in)).copy_from(&raw);
                let mut names = vec!["(intercept)".to_string()];
                names.extend(table.column_names.iter().cloned());
                (with, names)
            }
            [0] => (raw, table.column_names.clone()),
            _ => {
                return Err(Error::Parse {
                    path: display(path),
                    line: 1,
                    message: "constant columns other than a leading intercept are not allowed"
                        .into(),
                })
            }
        };
        let ids = table.rows.into_iter().map(|r| r.id).collect();
        Self::new(values, names, ids)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let mut out = String::from("subject_id");
        for name in &self.names {
            out.push('\t');
            out.push_str(name);
        }
        out.push('\n');
        for (i, id) in self.subject_ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.values.ncols() {
                let _ = write!(out, "\t{}", fmt_real(self.values[(i, j)]));
            }
            out.push('\n');
        }
        write_file(path, &out)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn q(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    fn reordered(&self, order: &[String]) -> Self {
        let idx = index_of(&self.subject_ids);
        let values =
            DMatrix::from_fn(self.values.nrows(), self.values.ncols(), |i, j| {
                self.values[(idx[&order[i]], j)]
            });
        Self { values, names: self.names.clone(), subject_ids: order.to_vec() }
    }
}

/// Nonnegative per-variant weights; at least one must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<R: Real> {
    w: DVector<R>,
}

impl<R: Real> WeightVector<R> {
    pub fn new(w: Vec<R>) -> Result<Self, Error> {
        if w.is_empty() {
            return Err(Error::InvalidInput("weight vector is empty".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v < R::zero()) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        if w.iter().all(|v| *v == R::zero()) {
            return Err(Error::InvalidInput("at least one weight must be positive".into()));
        }
        Ok(Self { w: DVector::from_vec(w) })
    }

    /// Unit weights, the default throughout.
    pub fn unit(p: usize) -> Self {
        Self { w: DVector::from_element(p, R::one()) }
    }

    pub fn as_slice(&self) -> &[R] {
        self.w.as_slice()
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.len() == 0
    }

    pub fn sum(&self) -> R {
        self.w.iter().fold(R::zero(), |a, b| a + *b)
    }
}

impl WeightVector<f64> {
    /// Two-column TSV (variant_id, weight) with a header row; the file must
    /// cover exactly the variants of `geno`, in any order.
    pub fn load(path: &Path, geno: &GenotypeMatrix) -> Result<Self, Error> {
        let table = read_table(path)?;
        if table.column_names.len() != 1 {
            return Err(Error::Parse {
                path: display(path),
                line: 1,
                message: "weight file must have exactly two columns (variant_id, weight)".into(),
            });
        }
        let mut by_id: HashMap<&str, f64> = HashMap::new();
        for (i, row) in table.rows.iter().enumerate() {
            let w: f64 = row.cells[0].parse().map_err(|_| Error::Parse {
                path: display(path),
                line: i + 2,
                message: format!("cannot parse weight {:?}", row.cells[0]),
            })?;
            if by_id.insert(row.id.as_str(), w).is_some() {
                return Err(Error::Parse {
                    path: display(path),
                    line: i + 2,
                    message: format!("duplicate variant id {:?}", row.id),
                });
            }
        }
        let mut w = Vec::with_capacity(geno.n_variants());
        for id in geno.variant_ids() {
            match by_id.get(id.as_str()) {
                Some(v) => w.push(*v),
                None => {
                    return Err(Error::Parse {
                        path: display(path),
                        line: 1,
                        message: format!("weight file is missing variant {id:?}"),
                    })
                }
            }
        }
        if by_id.len() != geno.n_variants() {
            return Err(Error::Parse {
                path: display(path),
                line: 1,
                message: "weight file lists variants not present in the genotype file".into(),
            });
        }
        Self::new(w)
    }
}

/// Genotypes, phenotype, and covariates in one canonical subject order.
#[derive(Debug, Clone)]
pub struct AlignedDataset {
    pub geno: GenotypeMatrix,
    pub pheno: PhenotypeVector,
    pub covar: CovariateMatrix,
}

/// Reorder all components to the genotype file's subject order. The subject
/// id sets must match exactly; mismatches are reported with the offending ids.
pub fn align(
    geno: GenotypeMatrix,
    pheno: PhenotypeVector,
    covar: CovariateMatrix,
) -> Result<AlignedDataset, Error> {
    check_same_subjects(geno.subject_ids(), pheno.subject_ids())?;
    check_same_subjects(geno.subject_ids(), covar.subject_ids())?;
    let n = geno.n_subjects();
    let q = covar.q();
    if n <= q + 1 {
        return Err(Error::InvalidInput(format!(
            "need more subjects than covariates: n = {n}, q = {q}"
        )));
    }
    let order: Vec<String> = geno.subject_ids().to_vec();
    let pheno = pheno.reordered(&order);
    let covar = covar.reordered(&order);
    Ok(AlignedDataset { geno, pheno, covar })
}

fn check_same_subjects(reference: &[String], other: &[String]) -> Result<(), Error> {
    let ref_set: std::collections::BTreeSet<&String> = reference.iter().collect();
    let other_set: std::collections::BTreeSet<&String> = other.iter().collect();
    if ref_set == other_set {
        return Ok(());
    }
    let missing = ref_set.difference(&other_set).map(|s| (*s).clone()).collect();
    let extra = other_set.difference(&ref_set).map(|s| (*s).clone()).collect();
    Err(Error::SubjectMismatch { missing, extra })
}

// ---------------------------------------------------------------------------
// Shared TSV plumbing
// ---------------------------------------------------------------------------

struct TableRow {
    id: String,
    cells: Vec<String>,
}

struct Table {
    column_names: Vec<String>,
    rows: Vec<TableRow>,
}

fn read_table(path: &Path) -> Result<Table, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: display(path), source })?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: display(path),
        line: 1,
        message: "empty file (header row is mandatory)".into(),
    })?;
    let mut header_cells = header.split('\t');
    let _id_col = header_cells.next();
    let column_names: Vec<String> = header_cells.map(str::to_string).collect();
    if column_names.is_empty() {
        return Err(Error::Parse {
            path: display(path),
            line: 1,
            message: "header must name at least one value column".into(),
        });
    }
    let mut rows = Vec::new();
    for (line_idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split('\t');
        let id = cells.next().unwrap_or_default().to_string();
        let cells: Vec<String> = cells.map(str::to_string).collect();
        if cells.len() != column_names.len() {
            return Err(Error::Parse {
                path: display(path),
                line: line_idx + 1,
                message: format!(
                    "ragged row: {} cells, header has {}",
                    cells.len(),
                    column_names.len()
                ),
            });
        }
        rows.push(TableRow { id, cells });
    }
    Ok(Table { column_names, rows })
}

fn check_unique(ids: &[String]) -> Result<(), Error> {
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateSubject(id.clone()));
        }
    }
    Ok(())
}

fn index_of(ids: &[String]) -> HashMap<&String, usize> {
    ids.iter().enumerate().map(|(i, id)| (id, i)).collect()
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA" || cell == "."
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: display(path), source })
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}
