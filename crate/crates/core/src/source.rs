//! Hamiltonians as functions of rescaled time, and the sampled text format.
//!
//! File layout (whitespace separated, `#` starts a comment line):
//!
//! ```text
//! <dim> <nodes>
//! <s_0>
//! re,im re,im ...      # row 0 of H(s_0), `dim` entries
//! ...                  # `dim` rows in total
//! <s_1>
//! ...
//! ```
//!
//! Nodes must be uniform on `[0, 1]`. Between nodes the Hamiltonian is
//! interpolated with cubic Hermite segments whose slopes are second-order
//! finite differences of the samples.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{c64, CMatrix, Grid};
use crate::spectral::SpectralFrame;

/// A Hermitian-matrix-valued function of `s ∈ [0, 1]`.
pub trait HamiltonianSource: Send + Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, s: f64) -> CMatrix;

    /// dH/ds, when known in closed form.
    fn derivative(&self, _s: f64) -> Option<CMatrix> {
        None
    }

    /// Analytic snapshot eigenframe, when the model provides one. Frames
    /// returned here are used as-is (no gauge smoothing).
    fn frame(&self, _s: f64) -> Option<SpectralFrame> {
        None
    }
}

/// Constant Hamiltonian.
#[derive(Debug, Clone)]
pub struct ConstantHamiltonian(pub CMatrix);

impl HamiltonianSource for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn hamiltonian(&self, _s: f64) -> CMatrix {
        self.0.clone()
    }
    fn derivative(&self, _s: f64) -> Option<CMatrix> {
        Some(CMatrix::zeros(self.0.nrows(), self.0.ncols()))
    }
}

/// Hamiltonian given by a closure.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Send + Sync> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Send + Sync> HamiltonianSource for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn hamiltonian(&self, s: f64) -> CMatrix {
        (self.f)(s)
    }
}

/// Hamiltonian given by samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct SampledHamiltonian {
    grid: Grid,
    samples: Vec<CMatrix>,
    slopes: Vec<CMatrix>,
}

impl SampledHamiltonian {
    pub fn new(samples: Vec<CMatrix>) -> Result<Self> {
        let grid = Grid::uniform(samples.len())?;
        let dim = samples[0].nrows();
        for (k, m) in samples.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidParameter(format!(
                    "sample {k} has shape {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let slopes = if samples.len() >= 3 {
            crate::numerics::central_derivative(&grid, &samples)?
        } else {
            let d = &samples[1] - &samples[0];
            vec![d.clone(), d]
        };
        Ok(Self { grid, samples, slopes })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> CMatrix) -> Result<Self> {
        Self::new(grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "empty file".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let parse_usize = |tok: &str| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad header field {tok:?}: {e}"),
            })
        };
        if head.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "header must be `<dim> <nodes>`".into(),
            });
        }
        let dim = parse_usize(head[0])?;
        let nodes = parse_usize(head[1])?;
        if dim == 0 || nodes < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "need dim ≥ 1 and at least 2 nodes".into(),
            });
        }
        let grid = Grid::uniform(nodes)?;

        let mut samples = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let (ln, s_line) = lines.next().ok_or(Error::Parse {
                line: line_no,
                message: format!("file ends before node {k}"),
            })?;
            let s: f64 = s_line.parse().map_err(|e| Error::Parse {
                line: ln,
                message: format!("bad s value {s_line:?}: {e}"),
            })?;
            if (s - grid.point(k)).abs() > 1e-9 {
                return Err(Error::Parse {
                    line: ln,
                    message: format!(
                        "node {k} has s = {s}, expected {} (uniform grid on [0,1])",
                        grid.point(k)
                    ),
                });
            }
            let mut m = CMatrix::zeros(dim, dim);
            for r in 0..dim {
                let (ln, row) = lines.next().ok_or(Error::Parse {
                    line: ln,
                    message: format!("missing row {r} of node {k}"),
                })?;
                let tokens: Vec<&str> = row.split_whitespace().collect();
                if tokens.len() != dim {
                    return Err(Error::Parse {
                        line: ln,
                        message: format!("expected {dim} entries, found {}", tokens.len()),
                    });
                }
                for (col, tok) in tokens.iter().enumerate() {
                    m[(r, col)] = parse_complex(tok).ok_or_else(|| Error::Parse {
                        line: ln,
                        message: format!("bad complex entry {tok:?} (expected re,im)"),
                    })?;
                }
            }
            samples.push(m);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln,
                message: "trailing data after last node".into(),
            });
        }
        Self::new(samples)
    }

    pub fn to_text(&self) -> String {
        let dim = self.samples[0].nrows();
        let mut out = String::new();
        let _ = writeln!(out, "# sampled Hamiltonian H(s), rows of re,im pairs");
        let _ = writeln!(out, "{dim} {}", self.samples.len());
        for (k, m) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:.16e}", self.grid.point(k));
            for r in 0..dim {
                let row: Vec<String> = (0..dim)
                    .map(|c| format!("{:.16e},{:.16e}", m[(r, c)].re, m[(r, c)].im))
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}

fn parse_complex(tok: &str) -> Option<crate::numerics::C64> {
    let (re, im) = tok.split_once(',')?;
    Some(c64(re.trim().parse().ok()?, im.trim().parse().ok()?))
}

impl HamiltonianSource for SampledHamiltonian {
    fn dim(&self) -> usize {
        self.samples[0].nrows()
    }

    fn hamiltonian(&self, s: f64) -> CMatrix {
        let h = self.grid.spacing();
        let last = self.samples.len() - 1;
        let x = (s.clamp(0.0, 1.0) / h).min(last as f64);
        let k = (x.floor() as usize).min(last - 1);
        let t = x - k as f64;
        if t == 0.0 {
            return self.samples[k].clone();
        }
        // cubic Hermite basis
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let mut out = self.samples[k].scale(h00);
        out.zip_apply(&self.slopes[k], |a, b| *a += b * (h10 * h));
        out.zip_apply(&self.samples[k + 1], |a, b| *a += b * h01);
        out.zip_apply(&self.slopes[k + 1], |a, b| *a += b * (h11 * h));
        out
    }
}
