use crate::error::{Error, Result};

/// Uniform grid of rescaled time on `[0, 1]`.
///
/// Only the node count is stored; node `k` is `k / (n - 1)`, so both
/// endpoints are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { len: n, min: 2 });
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k < self.n);
        if k + 1 == self.n {
            1.0
        } else {
            k as f64 / (self.n - 1) as f64
        }
    }

    /// Midpoint between nodes `k` and `k + 1`.
    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.point(k))
    }

    /// Grid with every interval halved: `2n - 1` nodes, odd nodes are midpoints.
    pub fn refine(&self) -> Grid {
        Grid { n: 2 * self.n - 1 }
    }

    /// Inverse of [`Grid::refine`], if this grid has an odd node count.
    pub fn coarsen(&self) -> Option<Grid> {
        (self.n % 2 == 1 && self.n >= 3).then(|| Grid { n: self.n.div_ceil(2) })
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                context: crate::error::Context::Samples,
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}
