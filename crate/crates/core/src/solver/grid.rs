use crate::error::{Error, Result};

/// Uniform node grid on `[R_min, R_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_min >= r_max {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy R_min < R_max, got [{r_min}, {r_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::invalid(format!("grid needs at least 3 nodes, got {n}")));
        }
        Ok(Self { r_min, r_max, n })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.r_max - self.r_min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / (self.n - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.n - 1 {
            self.r_max
        } else {
            self.r_min + j as f64 * self.spacing()
        }
    }

    /// Midpoint of the cell between nodes `j` and `j + 1`.
    pub fn midpoint(&self, j: usize) -> f64 {
        self.r_min + (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Trapezoid-rule weights, `ΔR/2` at the ends and `ΔR` inside.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let dr = self.spacing();
        (0..self.n)
            .map(|j| if j == 0 || j == self.n - 1 { 0.5 * dr } else { dr })
            .collect()
    }

    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        self.trapezoid_weights()
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// Ghost values one spacing outside each end of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostValues {
    pub lower: f64,
    pub upper: f64,
}

/// Ghost nodes for the free-boundary condition `f'(R_min) = f'(R_max) = 1`.
///
/// The ghosts make the centred difference at each boundary node equal one:
/// `(f_1 − g_lo)/(2ΔR) = 1` and `(g_hi − f_{n−2})/(2ΔR) = 1`.
pub fn apply_boundary(f: &[f64], grid: &RadialGrid) -> Result<GhostValues> {
    let n = grid.n();
    if f.len() != n {
        return Err(Error::invalid(format!("field has {} values for {n} nodes", f.len())));
    }
    let dr = grid.spacing();
    Ok(GhostValues {
        lower: f[1] - 2.0 * dr,
        upper: f[n - 2] + 2.0 * dr,
    })
}

/// Nodal `f'` by centred differences, closing the ends with [`apply_boundary`].
pub fn nodal_slope(f: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let ghost = apply_boundary(f, grid)?;
    let n = grid.n();
    let dr = grid.spacing();
    Ok((0..n)
        .map(|j| {
            let lo = if j == 0 { ghost.lower } else { f[j - 1] };
            let hi = if j == n - 1 { ghost.upper } else { f[j + 1] };
            (hi - lo) / (2.0 * dr)
        })
        .collect())
}
