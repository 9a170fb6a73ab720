//! Formula-length measurements and upper-envelope fits.
//!
//! A fit takes measured lengths `y_i` and nonnegative feature vectors `f_i`
//! and returns constants `c >= 0` with `y_i <= c·f_i` on every training
//! point: the least-squares solution under a sign constraint, then scaled
//! up by the smallest factor that covers all training points. Held-out
//! points are then checked against the same constants.

use serde::Serialize;
use thiserror::Error;

use crate::encoder::{delta_with, make_params, omega_with, EncoderError, OmegaOptions};
use crate::machine::{serialize_program, MachineProgram, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("{points} training points cannot determine {features} constants")]
    FitUnderdetermined { points: usize, features: usize },
    #[error(transparent)]
    Encoder(#[from] EncoderError),
}

/// `⌈log2 x⌉`, with `⌈log2 1⌉ = 0`.
pub fn clog2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub constants: Vec<f64>,
    /// Factor applied to the least-squares solution.
    pub scale: f64,
}

impl Fit {
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.constants.iter().zip(features).map(|(c, f)| c * f).sum()
    }
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 * (1.0 + a[col][col].abs()) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..k {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for c in col..k {
                    a[row][c] -= factor * a[col][c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    Some((0..k).map(|i| b[i] / a[i][i]).collect())
}

/// Least squares restricted to the features in `active`, or `None` if
/// that subproblem is singular.
fn least_squares(features: &[Vec<f64>], targets: &[f64], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for (f, y) in features.iter().zip(targets) {
        for (i, &fi) in active.iter().enumerate() {
            atb[i] += f[fi] * y;
            for (j, &fj) in active.iter().enumerate() {
                ata[i][j] += f[fi] * f[fj];
            }
        }
    }
    solve(ata, atb)
}

/// Nonnegative least squares by trying every support set.
fn nnls(features: &[Vec<f64>], targets: &[f64], width: usize) -> Option<Vec<f64>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..1 << width {
        let active: Vec<usize> = (0..width).filter(|i| mask >> i & 1 == 1).collect();
        let Some(sol) = least_squares(features, targets, &active) else { continue };
        if sol.iter().any(|c| *c < 0.0) {
            continue;
        }
        let mut c = vec![0.0; width];
        for (i, &fi) in active.iter().enumerate() {
            c[fi] = sol[i];
        }
        let err: f64 = features
            .iter()
            .zip(targets)
            .map(|(f, y)| {
                let p: f64 = c.iter().zip(f).map(|(a, b)| a * b).sum();
                (p - y) * (p - y)
            })
            .sum();
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, c));
        }
    }
    best.map(|(_, c)| c)
}

fn rank(features: &[Vec<f64>], width: usize) -> usize {
    let mut rows: Vec<Vec<f64>> = features.to_vec();
    let mut r = 0;
    for col in 0..width {
        let Some(piv) = (r..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs())) else {
            break;
        };
        let scale = rows.iter().map(|row| row[col].abs()).fold(0.0, f64::max);
        if rows[piv][col].abs() <= 1e-9 * scale.max(1.0) {
            continue;
        }
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r {
                let factor = rows[i][col] / rows[r][col];
                for c in col..width {
                    rows[i][c] -= factor * rows[r][c];
                }
            }
        }
        r += 1;
    }
    r
}

/// Fits an upper envelope `y <= c·f` over the training points.
pub fn fit_envelope(features: &[Vec<f64>], targets: &[f64]) -> Result<Fit, GrowthError> {
    let width = features.first().map_or(0, Vec::len);
    let under = GrowthError::FitUnderdetermined {
        points: features.len(),
        features: width,
    };
    if width == 0 || features.len() <= width || rank(features, width) < width {
        return Err(under);
    }
    let c = nnls(features, targets, width).ok_or(under.clone())?;
    let fit = Fit { constants: c, scale: 1.0 };
    let scale = features
        .iter()
        .zip(targets)
        .map(|(f, y)| y / fit.predict(f))
        .fold(0.0, f64::max);
    if !scale.is_finite() || scale <= 0.0 {
        return Err(under);
    }
    Ok(Fit {
        constants: fit.constants.iter().map(|c| c * scale).collect(),
        scale,
    })
}

/// One measured point and its features.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub machine: String,
    pub n: usize,
    pub m: usize,
    pub length: u64,
    pub features: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checked {
    pub sample: Sample,
    pub bound: f64,
    /// `bound - length`; positive when the bound holds strictly.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub fit: Fit,
    pub training: Vec<Checked>,
    pub held_out: Vec<Checked>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.held_out.iter().all(|c| c.margin > 0.0) && self.training.iter().all(|c| c.margin >= -1e-6 * c.bound)
    }

    pub fn min_held_out_margin(&self) -> Option<f64> {
        self.held_out.iter().map(|c| c.margin).min_by(f64::total_cmp)
    }
}

pub fn check_bound(training: Vec<Sample>, held_out: Vec<Sample>) -> Result<BoundReport, GrowthError> {
    let features: Vec<Vec<f64>> = training.iter().map(|s| s.features.clone()).collect();
    let targets: Vec<f64> = training.iter().map(|s| s.length as f64).collect();
    let fit = fit_envelope(&features, &targets)?;
    let check = |s: Sample| {
        let bound = fit.predict(&s.features);
        Checked {
            margin: bound - s.length as f64,
            bound,
            sample: s,
        }
    };
    Ok(BoundReport {
        training: training.into_iter().map(check).collect(),
        held_out: held_out.into_iter().map(check).collect(),
        fit,
    })
}

/// Length of the program text a machine writes for itself.
pub fn program_size(program: &MachineProgram) -> u64 {
    serialize_program(program).chars().count() as u64
}

/// `[n⌈log n⌉⌈log⌈log n⌉⌉, m⌈log m⌉, (|P|m + m²)⌈log m⌉]`.
pub fn sentence_features(n: usize, m: usize, program_size: u64) -> Vec<f64> {
    let (n, m) = (n as u64, m as u64);
    let lm = clog2(m) as f64;
    vec![
        (n * clog2(n) * clog2(clog2(n))) as f64,
        m as f64 * lm,
        ((program_size * m + m * m) as f64) * lm,
    ]
}

/// `[n²⌈log n⌉]`.
pub fn square_features(n: usize) -> Vec<f64> {
    let n = n as u64;
    vec![(n * n * clog2(n)) as f64]
}

/// `[d²⌈log n⌉²⌈log⌈log n⌉⌉, |P|·d⌈log n⌉⌈log⌈log n⌉⌉]`.
pub fn recognizer_features(n: usize, d: usize, program_size: u64) -> Vec<f64> {
    let (n, d) = (n as u64, d as u64);
    let (l, ll) = (clog2(n), clog2(clog2(n)));
    vec![(d * d * l * l * ll) as f64, (program_size * d * l * ll) as f64]
}

/// Natural length of the sentence for the all-zero input of length `n`.
pub fn sentence_length(program: &MachineProgram, n: usize, m: usize) -> Result<u64, GrowthError> {
    let params = make_params(program, n, m)?;
    let x = vec![ZERO; n];
    Ok(omega_with(&params, &x, OmegaOptions::default())?.lengths.total)
}

pub fn delta_length(program: &MachineProgram, n: usize, m: usize) -> Result<u64, GrowthError> {
    let params = make_params(program, n, m)?;
    Ok(delta_with(&params, OmegaOptions::default())?.lengths.total)
}

pub fn sentence_sample(name: &str, program: &MachineProgram, n: usize, m: usize) -> Result<Sample, GrowthError> {
    Ok(Sample {
        machine: name.to_string(),
        n,
        m,
        length: sentence_length(program, n, m)?,
        features: sentence_features(n, m, program_size(program)),
    })
}

pub fn square_sample(name: &str, program: &MachineProgram, n: usize) -> Result<Sample, GrowthError> {
    Ok(Sample {
        machine: name.to_string(),
        n,
        m: n,
        length: sentence_length(program, n, n)?,
        features: square_features(n),
    })
}

/// Sample of the input-free sentence at `m = d⌈log n⌉`.
pub fn recognizer_sample(name: &str, program: &MachineProgram, n: usize, d: usize) -> Result<Sample, GrowthError> {
    let m = d * clog2(n as u64) as usize;
    Ok(Sample {
        machine: name.to_string(),
        n,
        m,
        length: delta_length(program, n, m)?,
        features: recognizer_features(n, d, program_size(program)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_logs() {
        let want = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (64, 6), (65, 7)];
        for (x, l) in want {
            assert_eq!(clog2(x), l, "{x}");
        }
    }

    #[test]
    fn recovers_exact_constants() {
        let features: Vec<Vec<f64>> = (1..8).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let targets: Vec<f64> = features.iter().map(|f| 3.0 * f[0] + 0.5 * f[1]).collect();
        let fit = fit_envelope(&features, &targets).unwrap();
        assert!((fit.constants[0] - 3.0).abs() < 1e-9);
        assert!((fit.constants[1] - 0.5).abs() < 1e-9);
        assert!((fit.scale - 1.0).abs() < 1e-9);
    }

    #[test]
    fn envelope_covers_training_points() {
        let features: Vec<Vec<f64>> = (1..10).map(|i| vec![1.0, i as f64]).collect();
        let targets: Vec<f64> = (1..10).map(|i| 2.0 * i as f64 + if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let fit = fit_envelope(&features, &targets).unwrap();
        assert!(fit.scale >= 1.0);
        for (f, y) in features.iter().zip(&targets) {
            assert!(fit.predict(f) >= y - 1e-9);
        }
    }

    #[test]
    fn negative_slopes_are_clamped() {
        let features: Vec<Vec<f64>> = (1..6).map(|i| vec![1.0, i as f64]).collect();
        let targets: Vec<f64> = (1..6).map(|i| 10.0 - i as f64).collect();
        let fit = fit_envelope(&features, &targets).unwrap();
        assert_eq!(fit.constants[1], 0.0);
        assert!(fit.constants[0] >= 9.0);
    }

    #[test]
    fn too_few_points() {
        let features = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert_eq!(
            fit_envelope(&features, &[1.0, 2.0, 3.0]),
            Err(GrowthError::FitUnderdetermined { points: 3, features: 2 })
        );
        assert!(fit_envelope(&[vec![1.0]], &[1.0]).is_err());
    }
}
