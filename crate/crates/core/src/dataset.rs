//! Complex sample sets and their CSV representation.
//!
//! The on-disk format has a header `re_0,im_0,...,re_{N-1},im_{N-1}` and one
//! sample vector per row. Values are written in scientific notation with 17
//! significant digits so a write/read cycle reproduces every `f64` exactly.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// M complex sample vectors of dimension N.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDataset {
    n_dim: usize,
    samples: Vec<Vec<Complex64>>,
}

impl ComplexDataset {
    pub fn new(samples: Vec<Vec<Complex64>>) -> Result<Self> {
        let n_dim = samples.first().map(Vec::len).unwrap_or(0);
        if n_dim == 0 {
            return Err(Error::InvalidArgument(
                "dataset needs at least one sample of dimension >= 1".into(),
            ));
        }
        for (m, s) in samples.iter().enumerate() {
            if s.len() != n_dim {
                return Err(Error::DimensionMismatch(format!(
                    "sample {m} has length {}, expected {n_dim}",
                    s.len()
                )));
            }
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("dataset"));
            }
        }
        Ok(Self { n_dim, samples })
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Vec<Complex64>] {
        &self.samples
    }

    /// Applies `x -> a x` to every sample.
    pub fn transform(&self, a: &nalgebra::DMatrix<Complex64>) -> Result<Self> {
        if a.ncols() != self.n_dim {
            return Err(Error::DimensionMismatch(format!(
                "transform has {} columns, samples have dimension {}",
                a.ncols(),
                self.n_dim
            )));
        }
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let v = a * nalgebra::DVector::from_column_slice(s);
                v.iter().copied().collect()
            })
            .collect();
        Self::new(samples)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = (0..self.n_dim)
            .flat_map(|j| [format!("re_{j}"), format!("im_{j}")])
            .collect();
        w.write_record(&header).map_err(csv_io)?;
        for s in &self.samples {
            let row: Vec<String> = s
                .iter()
                .flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
                .collect();
            w.write_record(&row).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_format(e, 1))?.clone();
        if header.is_empty() || header.len() % 2 != 0 {
            return Err(Error::Format {
                line: 1,
                message: format!("expected an even number of columns, found {}", header.len()),
            });
        }
        let n_dim = header.len() / 2;
        for j in 0..n_dim {
            let (re, im) = (&header[2 * j], &header[2 * j + 1]);
            if re != format!("re_{j}") || im != format!("im_{j}") {
                return Err(Error::Format {
                    line: 1,
                    message: format!("columns {}..{} must be re_{j},im_{j}", 2 * j, 2 * j + 1),
                });
            }
        }

        let mut samples = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let line = idx as u64 + 2;
            let record = record.map_err(|e| csv_format(e, line))?;
            if record.len() != header.len() {
                return Err(Error::Format {
                    line,
                    message: format!("expected {} fields, found {}", header.len(), record.len()),
                });
            }
            let mut sample = Vec::with_capacity(n_dim);
            for j in 0..n_dim {
                let re = parse_field(&record[2 * j], line)?;
                let im = parse_field(&record[2 * j + 1], line)?;
                sample.push(Complex64::new(re, im));
            }
            samples.push(sample);
        }
        if samples.is_empty() {
            return Err(Error::Format {
                line: 2,
                message: "no sample rows".into(),
            });
        }
        Self::new(samples)
    }
}

fn parse_field(text: &str, line: u64) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| Error::Format {
        line,
        message: format!("cannot parse {text:?} as a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Format {
            line,
            message: format!("non-finite value {text:?}"),
        });
    }
    Ok(v)
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_format(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Format {
        line,
        message: e.to_string(),
    }
}
