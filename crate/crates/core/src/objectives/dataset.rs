use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{BufRead, Write};
use std::path::Path;

/// Seeded two-class synthetic dataset: `n` samples of `d` features with
/// binary labels. Generation is bit-reproducible from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    features: Vec<f64>, // row-major n x d
    labels: Vec<u8>,
    dimension: usize,
    /// Seed the dataset was generated from; `None` for imported data.
    pub seed: Option<u64>,
}

impl SyntheticDataset {
    /// Two Gaussian classes with means `-separation * e1` (label 0) and
    /// `+separation * e1` (label 1) and unit covariance. The first half of
    /// the samples carries label 0, the second half label 1 (odd counts give
    /// the extra sample to label 1).
    pub fn blobs(samples: usize, dimension: usize, seed: u64, separation: f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidConfig(
                "need at least 2 samples (one per class)".into(),
            ));
        }
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "separation must be > 0, got {separation}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n0 = samples / 2;
        let mut features = Vec::with_capacity(samples * dimension);
        let mut labels = Vec::with_capacity(samples);
        for i in 0..samples {
            let label = u8::from(i >= n0);
            let mean1 = if label == 0 { -separation } else { separation };
            for k in 0..dimension {
                let z: f64 = StandardNormal.sample(&mut rng);
                features.push(if k == 0 { mean1 + z } else { z });
            }
            labels.push(label);
        }
        Ok(Self {
            features,
            labels,
            dimension,
            seed: Some(seed),
        })
    }

    pub fn from_parts(features: Vec<f64>, labels: Vec<u8>, dimension: usize) -> Result<Self> {
        if dimension == 0 || labels.is_empty() || features.len() != labels.len() * dimension {
            return Err(Error::InvalidConfig(
                "features must be a non-empty n x d matrix matching the labels".into(),
            ));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
        }
        Ok(Self {
            features,
            labels,
            dimension,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Write as CSV: header row `x0,...,x{d-1},label`, one sample per line,
    /// label in the last column. Floats carry 17 significant digits so the
    /// round trip is lossless.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for k in 0..self.dimension {
            write!(out, "x{k},")?;
        }
        writeln!(out, "label")?;
        for i in 0..self.len() {
            for v in self.sample(i) {
                write!(out, "{v:.16e},")?;
            }
            writeln!(out, "{}", self.label(i))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty dataset csv".into()))?
            .map_err(|e| Error::InvalidConfig(format!("dataset csv read failed: {e}")))?;
        let columns: Vec<&str> = header.trim().split(',').collect();
        if columns.last() != Some(&"label") || columns.len() < 2 {
            return Err(Error::InvalidConfig(
                "dataset csv header must be x0,...,label".into(),
            ));
        }
        let dimension = columns.len() - 1;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line =
                line.map_err(|e| Error::InvalidConfig(format!("dataset csv read failed: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dimension + 1 {
                return Err(Error::InvalidConfig(format!(
                    "dataset csv line {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    dimension + 1
                )));
            }
            for f in &fields[..dimension] {
                let v: f64 = f.parse().map_err(|_| {
                    Error::InvalidConfig(format!("bad feature value {f:?} on line {}", lineno + 2))
                })?;
                features.push(v);
            }
            let l: u8 = fields[dimension].parse().map_err(|_| {
                Error::InvalidConfig(format!(
                    "bad label {:?} on line {}",
                    fields[dimension],
                    lineno + 2
                ))
            })?;
            labels.push(l);
        }
        Self::from_parts(features, labels, dimension)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot create {}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot open {}: {e}", path.display())))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}
