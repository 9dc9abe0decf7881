use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density mixing scheme of the self-consistency loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Mixing {
    /// n ← (1 − α)n + α·n_out.
    Linear { alpha: f64 },
    /// Pulay (DIIS) extrapolation over `history` previous steps with a Kerker
    /// preconditioner q²/(q² + q0²) on the residual.
    Pulay {
        alpha: f64,
        history: usize,
        kerker_wavenumber: f64,
    },
}

impl Mixing {
    pub fn alpha(&self) -> f64 {
        match *self {
            Mixing::Linear { alpha } | Mixing::Pulay { alpha, .. } => alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha();
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::invalid(format!(
                "mixing parameter must lie in (0, 1], got {a}"
            )));
        }
        if let Mixing::Pulay {
            kerker_wavenumber, ..
        } = *self
        {
            if !(kerker_wavenumber >= 0.0) {
                return Err(Error::invalid("Kerker wavenumber must be non-negative"));
            }
        }
        Ok(())
    }
}

impl Default for Mixing {
    fn default() -> Self {
        Mixing::Pulay {
            alpha: 0.2,
            history: 8,
            kerker_wavenumber: 1.0,
        }
    }
}

/// Kerker filter q²/(q² + q0²) applied in the sine series of a function that
/// vanishes at both ends of a uniform grid (DST-I on the interior nodes).
#[derive(Debug, Clone)]
pub struct KerkerFilter {
    sines: DMatrix<f64>,
    gains: DVector<f64>,
}

impl KerkerFilter {
    pub fn new(n: usize, length: f64, q0: f64) -> Self {
        let m = n.saturating_sub(2);
        let intervals = (n - 1) as f64;
        let sines = DMatrix::from_fn(m, m, |k, i| {
            (((k + 1) * (i + 1)) as f64 * PI / intervals).sin()
        });
        let gains = DVector::from_fn(m, |k, _| {
            let q = (k + 1) as f64 * PI / length;
            if q0 == 0.0 {
                1.0
            } else {
                q * q / (q * q + q0 * q0)
            }
        });
        KerkerFilter { sines, gains }
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        let m = n - 2;
        let interior = DVector::from_column_slice(&r[1..n - 1]);
        let coeffs = (&self.sines * interior).component_mul(&self.gains) * (2.0 / (n - 1) as f64);
        let back = self.sines.transpose() * coeffs;
        let mut out = vec![0.0; n];
        out[1..=m].copy_from_slice(back.as_slice());
        out
    }
}

/// Stateful density mixer.
#[derive(Debug, Clone)]
pub struct Mixer {
    scheme: Mixing,
    kerker: Option<KerkerFilter>,
    inputs: VecDeque<Vec<f64>>,
    residuals: VecDeque<Vec<f64>>,
}

impl Mixer {
    pub fn new(scheme: Mixing, n: usize, length: f64) -> Self {
        let kerker = match scheme {
            Mixing::Pulay {
                kerker_wavenumber, ..
            } => Some(KerkerFilter::new(n, length, kerker_wavenumber)),
            Mixing::Linear { .. } => None,
        };
        Mixer {
            scheme,
            kerker,
            inputs: VecDeque::new(),
            residuals: VecDeque::new(),
        }
    }

    /// Next input density from the current input and output densities.
    pub fn next(&mut self, n_in: &[f64], n_out: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = n_out.iter().zip(n_in).map(|(o, i)| o - i).collect();
        match self.scheme {
            Mixing::Linear { alpha } => n_in.iter().zip(&r).map(|(x, d)| x + alpha * d).collect(),
            Mixing::Pulay { alpha, history, .. } => {
                self.inputs.push_back(n_in.to_vec());
                self.residuals.push_back(r.clone());
                while self.inputs.len() > history + 1 {
                    self.inputs.pop_front();
                    self.residuals.pop_front();
                }
                let (x_bar, r_bar) = self.extrapolate(n_in, &r);
                let pr = match &self.kerker {
                    Some(k) => k.apply(&r_bar),
                    None => r_bar,
                };
                let last = x_bar.len() - 1;
                let mut next: Vec<f64> = x_bar
                    .iter()
                    .zip(&pr)
                    .map(|(x, p)| (x + alpha * p).max(0.0))
                    .collect();
                next[0] = 0.0;
                next[last] = 0.0;
                next
            }
        }
    }

    fn extrapolate(&self, x: &[f64], r: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = self.inputs.len();
        if k < 2 {
            return (x.to_vec(), r.to_vec());
        }
        let n = x.len();
        let dx = DMatrix::from_fn(n, k - 1, |i, j| self.inputs[j + 1][i] - self.inputs[j][i]);
        let dr = DMatrix::from_fn(n, k - 1, |i, j| {
            self.residuals[j + 1][i] - self.residuals[j][i]
        });
        let rv = DVector::from_column_slice(r);
        let svd = dr.clone().svd(true, true);
        let tol = 1e-12 * svd.singular_values.max();
        let Ok(g) = svd.solve(&rv, tol) else {
            return (x.to_vec(), r.to_vec());
        };
        let xb = DVector::from_column_slice(x) - dx * &g;
        let rb = rv - dr * &g;
        (xb.as_slice().to_vec(), rb.as_slice().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerker_without_screening_is_identity() {
        let n = 33;
        let f = KerkerFilter::new(n, 5.0, 0.0);
        let r: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 || i == n - 1 {
                    0.0
                } else {
                    ((i * i) % 7) as f64 - 3.0
                }
            })
            .collect();
        let out = f.apply(&r);
        for (a, b) in r.iter().zip(&out) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kerker_damps_long_wavelengths() {
        let n = 101;
        let l = 50.0;
        let f = KerkerFilter::new(n, l, 1.0);
        let mode =
            |m: f64| -> Vec<f64> { (0..n).map(|i| (m * PI * i as f64 / 100.0).sin()).collect() };
        let slow = f.apply(&mode(1.0));
        let fast = f.apply(&mode(40.0));
        let q1 = PI / l;
        assert!((slow[50] - q1 * q1 / (q1 * q1 + 1.0)).abs() < 1e-12);
        assert!(fast[26].abs() > 0.8 * mode(40.0)[26].abs());
    }

    #[test]
    fn linear_mixing_formula() {
        let mut m = Mixer::new(Mixing::Linear { alpha: 0.25 }, 4, 1.0);
        let next = m.next(&[0.0, 1.0, 2.0, 0.0], &[0.0, 3.0, 2.0, 0.0]);
        assert_eq!(next, vec![0.0, 1.5, 2.0, 0.0]);
    }

    #[test]
    fn pulay_solves_linear_fixed_point() {
        // Fixed point of x ↦ A x + b with a contraction A; DIIS is exact on
        // linear problems after enough history.
        let n = 12;
        let b: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 || i == n - 1 {
                    0.0
                } else {
                    1.0 + (i % 3) as f64
                }
            })
            .collect();
        let map = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        0.0
                    } else {
                        0.5 * x[i] - 0.3 * x[i - 1] + 0.2 * x[i + 1] + b[i]
                    }
                })
                .collect()
        };
        let mut mixer = Mixer::new(
            Mixing::Pulay {
                alpha: 0.3,
                history: 12,
                kerker_wavenumber: 0.0,
            },
            n,
            1.0,
        );
        let mut x = vec![0.0; n];
        let mut res = f64::INFINITY;
        for _ in 0..40 {
            let y = map(&x);
            res = y
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if res < 1e-12 {
                break;
            }
            x = mixer.next(&x, &y);
        }
        assert!(res < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(Mixing::Linear { alpha: 0.0 }.validate().is_err());
        assert!(Mixing::Linear { alpha: 1.0 }.validate().is_ok());
        assert!(Mixing::Pulay {
            alpha: 0.2,
            history: 4,
            kerker_wavenumber: -1.0
        }
        .validate()
        .is_err());
    }
}
