use crate::error::{Error, Result};

/// Composite Simpson weights for `n` equally spaced nodes with spacing `h`.
/// An odd number of intervals is closed with Simpson's 3/8 rule on the last
/// three, so the weights integrate cubics exactly for any `n ≥ 4`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 | 1 => return w,
        2 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
            return w;
        }
        3 => {
            w[0] = h / 3.0;
            w[1] = 4.0 * h / 3.0;
            w[2] = h / 3.0;
            return w;
        }
        _ => {}
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals - 3
    };
    let mut i = 0;
    while i < simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Uniform grid on [0, L] with Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ZGrid {
    z: Vec<f64>,
    weights: Vec<f64>,
    length: f64,
}

impl ZGrid {
    pub fn uniform(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || n < 4 {
            return Err(Error::invalid(format!(
                "grid needs L > 0 and at least 4 nodes (L = {length}, n = {n})"
            )));
        }
        let h = length / (n - 1) as f64;
        let mut z: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        z[n - 1] = length;
        Ok(ZGrid {
            z,
            weights: simpson_weights(n, h),
            length,
        })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn step(&self) -> f64 {
        self.length / (self.z.len() - 1) as f64
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Running integral ∫₀^{z_i} f. Even nodes carry exact composite Simpson
    /// sums; odd nodes add a three-point quadratic panel.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.z.len();
        let h = self.step();
        let mut c = vec![0.0; n];
        for i in 1..n {
            if i % 2 == 0 {
                c[i] = c[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
            } else if i + 1 < n {
                c[i] = c[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
            } else {
                c[i] = c[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn cubics_exact(n in 4usize..60, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
            let g = ZGrid::uniform(3.7, n).unwrap();
            let f: Vec<f64> = g.z().iter().map(|z| a + b * z + c * z * z + d * z * z * z).collect();
            let l = 3.7f64;
            let exact = a * l + b * l * l / 2.0 + c * l.powi(3) / 3.0 + d * l.powi(4) / 4.0;
            prop_assert!((g.integrate(&f) - exact).abs() < 1e-10 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn cumulative_of_smooth_function() {
        let g = ZGrid::uniform(2.0, 201).unwrap();
        let f: Vec<f64> = g.z().iter().map(|z| z.cos()).collect();
        let c = g.cumulative(&f);
        for (z, v) in g.z().iter().zip(&c) {
            assert!((v - z.sin()).abs() < 1e-9);
        }
        assert!((c[200] - g.integrate(&f)).abs() < 1e-14);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(ZGrid::uniform(1.0, 3).is_err());
        assert!(ZGrid::uniform(0.0, 10).is_err());
    }
}
