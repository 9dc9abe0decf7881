use std::f64::consts::PI;

use super::grid::ZGrid;

/// Uniform positive background of density `density` on [start, end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Background {
    pub start: f64,
    pub end: f64,
    pub density: f64,
}

impl Background {
    pub fn sheet_density(&self) -> f64 {
        self.density * (self.end - self.start)
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.start && z <= self.end
    }
}

/// 2πn₊∫|z − z′|dz′ over the background, evaluated analytically.
pub fn background_potential(z: f64, bg: &Background) -> f64 {
    let (a, b) = (bg.start, bg.end);
    let integral = if z <= a {
        0.5 * (b * b - a * a) - z * (b - a)
    } else if z >= b {
        z * (b - a) - 0.5 * (b * b - a * a)
    } else {
        0.5 * ((z - a).powi(2) + (b - z).powi(2))
    };
    2.0 * PI * bg.density * integral
}

/// Hartree potential V(z) = −2π∫[n(z′) − n₊(z′)]|z − z′|dz′ of the density
/// `n` sampled on `grid`.
pub fn effective_potential(n: &[f64], grid: &ZGrid, bg: &Background) -> Vec<f64> {
    let z = grid.z();
    let zn: Vec<f64> = z.iter().zip(n).map(|(z, n)| z * n).collect();
    let a = grid.cumulative(n);
    let b = grid.cumulative(&zn);
    let last = z.len() - 1;
    let (a_tot, b_tot) = (a[last], b[last]);
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let electrons = zi * a[i] - b[i] + (b_tot - b[i]) - zi * (a_tot - a[i]);
            -2.0 * PI * electrons + background_potential(zi, bg)
        })
        .collect()
}
