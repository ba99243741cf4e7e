//! Codebooks: norm-constrained column matrices, canonical superposition
//! evaluation, and the line-oriented text format.
//!
//! Norm evaluations accumulate with compensated summation in a fixed
//! order (entries by ascending index, coordinates by ascending row), so
//! any two scans that evaluate the same difference vector produce the
//! same floating-point value bit for bit.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::params::NormKind;
use crate::scalar::{KahanSum, Scalar};

/// Where a codebook came from: generator name plus root seed, or "file".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
}

/// An `m×N` real matrix with unit-norm columns (tolerance is rounding
/// slack only), stored column-major. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<F> {
    m: usize,
    n: usize,
    values: Vec<F>,
    norm: NormKind,
    nonneg: bool,
    provenance: Provenance,
}

impl<F: Scalar> Codebook<F> {
    /// Build from column-major values, checking the column-norm and
    /// nonnegativity invariants.
    pub fn new(
        m: usize,
        n: usize,
        values: Vec<F>,
        norm: NormKind,
        nonneg: bool,
        provenance: Provenance,
    ) -> Result<Self, Error> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameters(
                "codebook dimensions must be positive".to_string(),
            ));
        }
        if values.len() != m * n {
            return Err(Error::InvalidParameters(format!(
                "codebook needs {} values, got {}",
                m * n,
                values.len()
            )));
        }
        let cb = Codebook {
            m,
            n,
            values,
            norm,
            nonneg,
            provenance,
        };
        cb.check_invariants()?;
        Ok(cb)
    }

    pub fn from_columns(
        columns: Vec<Vec<F>>,
        norm: NormKind,
        nonneg: bool,
        provenance: Provenance,
    ) -> Result<Self, Error> {
        let n = columns.len();
        let m = columns.first().map(|c| c.len()).unwrap_or(0);
        if columns.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidParameters(
                "all columns must share one length".to_string(),
            ));
        }
        let mut values = Vec::with_capacity(m * n);
        for col in &columns {
            values.extend_from_slice(col);
        }
        Codebook::new(m, n, values, norm, nonneg, provenance)
    }

    fn check_invariants(&self) -> Result<(), Error> {
        let tol = F::unit_norm_tolerance();
        for j in 0..self.n {
            let norm = vector_norm(self.column(j), self.norm);
            if (norm - F::one()).abs() > tol {
                return Err(Error::InvalidParameters(format!(
                    "column {j} has {} norm {} (must be 1 within {})",
                    self.norm,
                    norm.as_f64(),
                    tol.as_f64()
                )));
            }
        }
        if self.nonneg {
            for (pos, v) in self.values.iter().enumerate() {
                if *v < F::zero() {
                    return Err(Error::InvalidParameters(format!(
                        "nonneg codebook has negative entry at column {}, row {}",
                        pos / self.m,
                        pos % self.m
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn columns(&self) -> usize {
        self.n
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn column(&self, j: usize) -> &[F] {
        &self.values[j * self.m..(j + 1) * self.m]
    }

    pub fn entry(&self, i: usize, j: usize) -> F {
        self.values[j * self.m + i]
    }

    /// `C · v` for a sparse integer vector, canonical order.
    pub fn superposition(&self, entries: &[(usize, i32)]) -> Vec<F> {
        let mut acc = vec![KahanSum::new(); self.m];
        for &(j, w) in entries {
            let wf = F::of_f64(w as f64);
            let col = self.column(j);
            for (a, &c) in acc.iter_mut().zip(col) {
                a.add(wf * c);
            }
        }
        acc.into_iter().map(|a| a.value()).collect()
    }

    /// `‖C·v‖` in the codebook norm, canonical order.
    pub fn superposition_norm(&self, entries: &[(usize, i32)]) -> F {
        vector_norm(&self.superposition(entries), self.norm)
    }

    /// `y - C·b` with the same canonical accumulation.
    pub fn residual(&self, y: &[F], entries: &[(usize, i32)]) -> Vec<F> {
        debug_assert_eq!(y.len(), self.m);
        let mut acc: Vec<KahanSum<F>> = y
            .iter()
            .map(|&v| {
                let mut a = KahanSum::new();
                a.add(v);
                a
            })
            .collect();
        for &(j, w) in entries {
            let wf = F::of_f64(w as f64);
            let col = self.column(j);
            for (a, &c) in acc.iter_mut().zip(col) {
                a.add(-(wf * c));
            }
        }
        acc.into_iter().map(|a| a.value()).collect()
    }

    /// `‖y - C·b‖` in the codebook norm, canonical order.
    pub fn residual_norm(&self, y: &[F], entries: &[(usize, i32)]) -> F {
        vector_norm(&self.residual(y, entries), self.norm)
    }

    /// Same matrix with permuted columns (tests decode equivariance).
    pub fn permuted_columns(&self, perm: &[usize]) -> Result<Self, Error> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameters(
                "permutation length must equal column count".to_string(),
            ));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &j in perm {
            values.extend_from_slice(self.column(j));
        }
        Codebook::new(
            self.m,
            self.n,
            values,
            self.norm,
            self.nonneg,
            self.provenance.clone(),
        )
    }

    /// Write the line-oriented text form (`#wsc-codebook v1` header, then
    /// `m` rows of `N` comma-separated reals, shortest round-trip digits).
    pub fn write_to(&self, w: &mut impl Write) -> Result<(), Error> {
        let seed = match self.provenance.seed {
            Some(s) => s.to_string(),
            None => "none".to_string(),
        };
        writeln!(
            w,
            "#wsc-codebook v1 m={} n={} norm={} nonneg={} seed={}",
            self.m,
            self.n,
            self.norm,
            u8::from(self.nonneg),
            seed
        )?;
        for i in 0..self.m {
            let mut line = String::new();
            for j in 0..self.n {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{}", self.entry(i, j)));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, Error> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty codebook file".to_string()))??;
        let (m, n, norm, nonneg, seed) = parse_header(&header)?;
        let mut values = vec![F::zero(); m * n];
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i}")))??;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n {
                return Err(Error::Parse(format!(
                    "row {i} has {} fields, expected {n}",
                    fields.len()
                )));
            }
            for (j, field) in fields.iter().enumerate() {
                let v: F = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value {field:?} at row {i}, column {j}")))?;
                values[j * m + i] = v;
            }
        }
        Codebook::new(
            m,
            n,
            values,
            norm,
            nonneg,
            Provenance {
                generator: "file".to_string(),
                seed,
            },
        )
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, Error> {
        let mut f = std::fs::File::open(path)?;
        Codebook::read_from(&mut f)
    }
}

fn parse_header(line: &str) -> Result<(usize, usize, NormKind, bool, Option<u64>), Error> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("#wsc-codebook") || parts.next() != Some("v1") {
        return Err(Error::Parse(
            "expected `#wsc-codebook v1` header".to_string(),
        ));
    }
    let (mut m, mut n, mut norm, mut nonneg, mut seed) = (None, None, None, None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {part:?}")))?;
        match key {
            "m" => m = Some(value.parse().map_err(|_| Error::Parse(format!("bad m={value}")))?),
            "n" => n = Some(value.parse().map_err(|_| Error::Parse(format!("bad n={value}")))?),
            "norm" => norm = Some(value.parse()?),
            "nonneg" => {
                nonneg = Some(match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(Error::Parse(format!("bad nonneg={value}"))),
                })
            }
            "seed" => {
                seed = Some(if value == "none" {
                    None
                } else {
                    Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad seed={value}")))?,
                    )
                })
            }
            other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
        }
    }
    match (m, n, norm, nonneg, seed) {
        (Some(m), Some(n), Some(norm), Some(nonneg), Some(seed)) => Ok((m, n, norm, nonneg, seed)),
        _ => Err(Error::Parse("incomplete codebook header".to_string())),
    }
}

/// Norm of a dense vector with compensated accumulation.
pub fn vector_norm<F: Scalar>(v: &[F], norm: NormKind) -> F {
    let mut acc = KahanSum::new();
    match norm {
        NormKind::L2 => {
            for &x in v {
                acc.add(x * x);
            }
            acc.value().sqrt()
        }
        NormKind::L1 => {
            for &x in v {
                acc.add(x.abs());
            }
            acc.value()
        }
    }
}
