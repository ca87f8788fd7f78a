//! Experimental weld records, CSV interchange, seeded train/test splitting and
//! z-score feature scaling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

/// Order of the process parameters in every feature row.
pub const FEATURE_NAMES: [&str; 3] = ["rotational_speed", "dwell_time", "axial_force"];

/// CSV header names, feature columns first, target last.
pub const CSV_COLUMNS: [&str; 4] = ["rpm", "dwell_s", "axial_kn", "depth_mm"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("missing header row")]
    MissingHeader,
    #[error("missing required column {0}")]
    MissingColumn(&'static str),
    #[error("unexpected column `{0}` in header")]
    UnknownColumn(String),
    #[error("duplicate column `{0}` in header")]
    DuplicateColumn(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    FieldCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("malformed number `{value}` in {column} at row {row}")]
    Malformed {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("non-finite {column} at row {row}")]
    NonFinite { row: usize, column: &'static str },
    #[error("non-positive {column} at row {row}")]
    NonPositive { row: usize, column: &'static str },
    #[error("missing depth_mm at row {row}")]
    MissingTarget { row: usize },
    #[error("split needs at least 2 records, got {0}")]
    TooFewRecords(usize),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("split of {n} records at fraction {fraction} leaves an empty training set")]
    EmptyTrain { n: usize, fraction: f64 },
    #[error("cannot fit a scaler on zero rows")]
    EmptyScalerInput,
    #[error("zero-variance feature {feature}; standardization undefined")]
    ZeroVariance { feature: String },
}

/// One experimental weld: three process parameters and, for training data,
/// the measured maximum penetration depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeldRecord {
    /// rpm
    pub rotational_speed: f64,
    /// seconds
    pub dwell_time: f64,
    /// kN, carried verbatim
    pub axial_force: f64,
    /// mm; `None` for prediction-only inputs
    pub penetration_depth: Option<f64>,
}

impl WeldRecord {
    pub fn new(
        rotational_speed: f64,
        dwell_time: f64,
        axial_force: f64,
        depth: Option<f64>,
    ) -> Self {
        Self {
            rotational_speed,
            dwell_time,
            axial_force,
            penetration_depth: depth,
        }
    }

    pub fn features(&self) -> [f64; 3] {
        [self.rotational_speed, self.dwell_time, self.axial_force]
    }

    /// Checks the finite-and-positive invariant; `row` is 1-based for messages.
    fn validate(&self, row: usize) -> Result<(), DatasetError> {
        let mut fields = vec![
            (CSV_COLUMNS[0], self.rotational_speed),
            (CSV_COLUMNS[1], self.dwell_time),
            (CSV_COLUMNS[2], self.axial_force),
        ];
        if let Some(d) = self.penetration_depth {
            fields.push((CSV_COLUMNS[3], d));
        }
        for (column, v) in fields {
            check_value(v, row, column)?;
        }
        Ok(())
    }
}

fn check_value(v: f64, row: usize, column: &'static str) -> Result<(), DatasetError> {
    if !v.is_finite() {
        Err(DatasetError::NonFinite { row, column })
    } else if v <= 0.0 {
        Err(DatasetError::NonPositive { row, column })
    } else {
        Ok(())
    }
}

/// Ordered weld records. Features always come out in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    records: Vec<WeldRecord>,
}

impl Dataset {
    pub fn new(records: Vec<WeldRecord>) -> Result<Self, DatasetError> {
        for (i, r) in records.iter().enumerate() {
            r.validate(i + 1)?;
        }
        Ok(Self { records })
    }

    pub fn feature_order(&self) -> [&'static str; 3] {
        FEATURE_NAMES
    }

    pub fn records(&self) -> &[WeldRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_targets(&self) -> bool {
        self.records.iter().all(|r| r.penetration_depth.is_some())
    }

    /// n x 3 feature matrix.
    pub fn features(&self) -> Matrix {
        let data = self.records.iter().flat_map(|r| r.features()).collect();
        Matrix::from_row_major(self.records.len(), 3, data).expect("3 values per record")
    }

    pub fn targets(&self) -> Result<Vec<f64>, DatasetError> {
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.penetration_depth
                    .ok_or(DatasetError::MissingTarget { row: i + 1 })
            })
            .collect()
    }

    /// Parses `rpm,dwell_s,axial_kn[,depth_mm]` CSV. Columns may appear in any
    /// order; an empty depth cell leaves the target absent. Rows are numbered
    /// from 1 after the header, blank lines skipped.
    pub fn from_csv(text: &str) -> Result<Self, DatasetError> {
        let mut lines = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(DatasetError::MissingHeader)?;

        let mut positions: [Option<usize>; 4] = [None; 4];
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        for (pos, name) in names.iter().enumerate() {
            let slot = CSV_COLUMNS
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))?;
            if positions[slot].replace(pos).is_some() {
                return Err(DatasetError::DuplicateColumn(name.to_string()));
            }
        }
        for (slot, col) in CSV_COLUMNS.iter().enumerate().take(3) {
            if positions[slot].is_none() {
                return Err(DatasetError::MissingColumn(col));
            }
        }

        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = i + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != names.len() {
                return Err(DatasetError::FieldCount {
                    row,
                    expected: names.len(),
                    found: fields.len(),
                });
            }
            let mut values = [None; 4];
            for (slot, pos) in positions.iter().enumerate() {
                let Some(pos) = *pos else { continue };
                let raw = fields[pos];
                let column = CSV_COLUMNS[slot];
                if raw.is_empty() && slot == 3 {
                    continue;
                }
                let v: f64 = raw.parse().map_err(|_| DatasetError::Malformed {
                    row,
                    column,
                    value: raw.to_string(),
                })?;
                check_value(v, row, column)?;
                values[slot] = Some(v);
            }
            let required = |slot: usize| values[slot].expect("required column present");
            records.push(WeldRecord::new(
                required(0),
                required(1),
                required(2),
                values[3],
            ));
        }
        Ok(Self { records })
    }

    /// Canonical CSV: shortest round-trip float formatting, LF endings. The
    /// depth column is written when any record carries a depth.
    pub fn to_csv(&self) -> String {
        let with_depth = self.records.iter().any(|r| r.penetration_depth.is_some());
        let ncols = if with_depth { 4 } else { 3 };
        let mut out = CSV_COLUMNS[..ncols].join(",");
        out.push('\n');
        for r in &self.records {
            let f = r.features();
            out.push_str(&format!("{},{},{}", f[0], f[1], f[2]));
            if with_depth {
                out.push(',');
                if let Some(d) = r.penetration_depth {
                    out.push_str(&d.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// Partitions into (train, test) with `ceil(test_fraction * n)` test rows.
    ///
    /// Row indices are shuffled by a ChaCha8 stream seeded from `spec.seed`;
    /// the first block becomes the test set. Each side keeps the original
    /// record order.
    pub fn split(&self, spec: &SplitSpec) -> Result<(Dataset, Dataset), DatasetError> {
        let n = self.records.len();
        if n < 2 {
            return Err(DatasetError::TooFewRecords(n));
        }
        spec.validate()?;
        self.targets()?;
        let n_test = spec.test_count(n);
        if n_test >= n {
            return Err(DatasetError::EmptyTrain {
                n,
                fraction: spec.test_fraction,
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
        let (test_idx, train_idx) = order.split_at_mut(n_test);
        test_idx.sort_unstable();
        train_idx.sort_unstable();
        let pick = |idx: &[usize]| Dataset {
            records: idx.iter().map(|&i| self.records[i]).collect(),
        };
        Ok((pick(train_idx), pick(test_idx)))
    }
}

/// Train/test partition parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Result<Self, DatasetError> {
        let s = Self {
            test_fraction,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.test_fraction > 0.0 && self.test_fraction < 1.0 {
            Ok(())
        } else {
            Err(DatasetError::InvalidFraction(self.test_fraction))
        }
    }

    /// `ceil(test_fraction * n)`, immune to products like 0.2 * 5 landing a
    /// hair above an integer.
    pub fn test_count(&self, n: usize) -> usize {
        let raw = self.test_fraction * n as f64;
        let nearest = raw.round();
        if (raw - nearest).abs() <= 1e-9 * raw.max(1.0) {
            nearest as usize
        } else {
            raw.ceil() as usize
        }
    }
}

/// Per-column z-score transform with population (divide-by-n) deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardScaler {
    means: Vec<f64>,
    stds: Vec<f64>,
}

/// Human-readable label for column `j` of an `ncols`-wide feature matrix.
fn feature_label(j: usize, ncols: usize) -> String {
    if ncols == FEATURE_NAMES.len() {
        FEATURE_NAMES[j].to_string()
    } else {
        format!("#{j}")
    }
}

impl StandardScaler {
    pub fn fit(features: &Matrix) -> Result<Self, DatasetError> {
        let n = features.rows();
        if n == 0 {
            return Err(DatasetError::EmptyScalerInput);
        }
        let p = features.cols();
        let mut means = Vec::with_capacity(p);
        let mut stds = Vec::with_capacity(p);
        for j in 0..p {
            let col = features.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            if std.is_nan() || std <= 1e-12 * mean.abs().max(1.0) {
                return Err(DatasetError::ZeroVariance {
                    feature: feature_label(j, p),
                });
            }
            means.push(mean);
            stds.push(std);
        }
        Ok(Self { means, stds })
    }

    pub fn from_parts(means: Vec<f64>, stds: Vec<f64>) -> Option<Self> {
        let ok = means.len() == stds.len()
            && means.iter().all(|m| m.is_finite())
            && stds.iter().all(|s| s.is_finite() && *s > 0.0);
        ok.then_some(Self { means, stds })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn inverse_transform_row(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| v * s + m)
            .collect()
    }

    pub fn transform(&self, features: &Matrix) -> Matrix {
        let data = features
            .iter_rows()
            .flat_map(|r| self.transform_row(r))
            .collect();
        Matrix::from_row_major(features.rows(), features.cols(), data).expect("shape preserved")
    }
}

const TABLE2: [[f64; 4]; 27] = [
    [1000.0, 10.0, 110.0, 3.5],
    [1000.0, 10.0, 120.0, 4.01],
    [1000.0, 10.0, 130.0, 4.65],
    [1000.0, 20.0, 110.0, 3.96],
    [1000.0, 20.0, 120.0, 4.47],
    [1000.0, 20.0, 130.0, 4.92],
    [1000.0, 30.0, 110.0, 4.43],
    [1000.0, 30.0, 120.0, 5.02],
    [1000.0, 30.0, 130.0, 5.28],
    [1500.0, 10.0, 110.0, 3.88],
    [1500.0, 10.0, 120.0, 4.45],
    [1500.0, 10.0, 130.0, 5.15],
    [1500.0, 20.0, 110.0, 4.51],
    [1500.0, 20.0, 120.0, 5.02],
    [1500.0, 20.0, 130.0, 5.51],
    [1500.0, 30.0, 110.0, 4.64],
    [1500.0, 30.0, 120.0, 5.17],
    [1500.0, 30.0, 130.0, 5.66],
    [2000.0, 10.0, 110.0, 4.29],
    [2000.0, 10.0, 120.0, 4.79],
    [2000.0, 10.0, 130.0, 5.33],
    [2000.0, 20.0, 110.0, 4.88],
    [2000.0, 20.0, 120.0, 5.39],
    [2000.0, 20.0, 130.0, 5.87],
    [2000.0, 30.0, 110.0, 5.15],
    [2000.0, 30.0, 120.0, 5.71],
    [2000.0, 30.0, 130.0, 6.00],
];

/// The 27 measured welds (three speeds x three dwell times x three forces),
/// in measurement order.
pub fn embedded_table2() -> Dataset {
    Dataset {
        records: TABLE2
            .iter()
            .map(|r| WeldRecord::new(r[0], r[1], r[2], Some(r[3])))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "rpm,dwell_s,axial_kn,depth_mm\n";

    #[test]
    fn parses_first_table_row() {
        let d = Dataset::from_csv(&format!("{HEADER}1000,10,110,3.5\n")).unwrap();
        assert_eq!(
            d.records(),
            &[WeldRecord::new(1000.0, 10.0, 110.0, Some(3.5))]
        );
    }

    #[test]
    fn header_only_is_empty() {
        assert!(Dataset::from_csv(HEADER).unwrap().is_empty());
    }

    #[test]
    fn negative_force_names_row_and_column() {
        let err = Dataset::from_csv(&format!("{HEADER}1000,10,-5,3.5\n")).unwrap_err();
        assert_eq!(err.to_string(), "non-positive axial_kn at row 1");
    }

    #[test]
    fn malformed_number() {
        let err =
            Dataset::from_csv(&format!("{HEADER}1000,10,110,3.5\n1000,1o,110,3.5\n")).unwrap_err();
        assert_eq!(
            err,
            DatasetError::Malformed {
                row: 2,
                column: "dwell_s",
                value: "1o".into()
            }
        );
    }

    #[test]
    fn missing_required_column() {
        let err = Dataset::from_csv("rpm,axial_kn\n1000,110\n").unwrap_err();
        assert_eq!(err, DatasetError::MissingColumn("dwell_s"));
    }

    #[test]
    fn depth_column_is_optional_and_order_free() {
        let d = Dataset::from_csv("axial_kn,rpm,dwell_s\r\n110,1500,20\r\n").unwrap();
        assert_eq!(d.records()[0], WeldRecord::new(1500.0, 20.0, 110.0, None));
        assert!(!d.has_targets());
        assert_eq!(d.targets(), Err(DatasetError::MissingTarget { row: 1 }));
    }

    #[test]
    fn table2_shape() {
        let d = embedded_table2();
        assert_eq!(d.len(), 27);
        assert_eq!(
            d.records()[0],
            WeldRecord::new(1000.0, 10.0, 110.0, Some(3.5))
        );
        assert_eq!(
            d.records()[26],
            WeldRecord::new(2000.0, 30.0, 130.0, Some(6.0))
        );
        for r in d.records() {
            assert!([1000.0, 1500.0, 2000.0].contains(&r.rotational_speed));
            assert!([10.0, 20.0, 30.0].contains(&r.dwell_time));
            assert!([110.0, 120.0, 130.0].contains(&r.axial_force));
            let depth = r.penetration_depth.unwrap();
            assert!((3.5..=6.0).contains(&depth));
        }
    }

    #[test]
    fn split_sizes() {
        let d = embedded_table2();
        let (train, test) = d.split(&SplitSpec::new(0.2, 7).unwrap()).unwrap();
        assert_eq!((train.len(), test.len()), (21, 6));

        let five = Dataset {
            records: d.records()[..5].to_vec(),
        };
        let (train, test) = five.split(&SplitSpec::default()).unwrap();
        assert_eq!((train.len(), test.len()), (4, 1));
    }

    #[test]
    fn split_is_seed_deterministic() {
        let d = embedded_table2();
        let s = SplitSpec::new(0.2, 99).unwrap();
        assert_eq!(d.split(&s).unwrap(), d.split(&s).unwrap());
        let other = d.split(&SplitSpec::new(0.2, 100).unwrap()).unwrap();
        assert_ne!(d.split(&s).unwrap().1, other.1);
    }

    #[test]
    fn split_errors() {
        let one = Dataset {
            records: embedded_table2().records()[..1].to_vec(),
        };
        assert_eq!(
            one.split(&SplitSpec::default()),
            Err(DatasetError::TooFewRecords(1))
        );
        assert!(SplitSpec::new(1.0, 0).is_err());
        assert!(SplitSpec::new(0.0, 0).is_err());
        let two = Dataset {
            records: embedded_table2().records()[..2].to_vec(),
        };
        assert!(matches!(
            two.split(&SplitSpec::new(0.9, 0).unwrap()),
            Err(DatasetError::EmptyTrain { .. })
        ));
    }

    #[test]
    fn scaler_two_points() {
        let m = Matrix::from_rows(&[[0.0], [2.0]]).unwrap();
        let sc = StandardScaler::fit(&m).unwrap();
        assert_eq!(sc.means(), &[1.0]);
        assert_eq!(sc.stds(), &[1.0]);
        assert_eq!(sc.transform(&m).as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn scaler_rejects_constant_column() {
        let m = Matrix::from_rows(&[[1.0, 5.0, 3.0], [2.0, 5.0, 4.0]]).unwrap();
        let err = StandardScaler::fit(&m).unwrap_err();
        assert_eq!(
            err,
            DatasetError::ZeroVariance {
                feature: "dwell_time".into()
            }
        );
    }

    #[test]
    fn scaler_on_table2_rpm() {
        let sc = StandardScaler::fit(&embedded_table2().features()).unwrap();
        assert!((sc.means()[0] - 1500.0).abs() < 1e-9);
        // sqrt(18 * 500^2 / 27) = 500 * sqrt(2/3)
        assert!((sc.stds()[0] - 408.248290463863).abs() < 1e-9);
    }
}
