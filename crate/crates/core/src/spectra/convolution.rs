//! Self-convolutions of a sampled spectrum, the spectra of powers of X.

use rayon::prelude::*;

use super::SpectrumTable;
use crate::error::{Error, Result};

const EDGE_TOLERANCE: f64 = 1e-6;

struct UniformGrid {
    step: f64,
    /// `start / step`, required to be an integer.
    offset: i64,
}

fn check_grid(base: &SpectrumTable) -> Result<UniformGrid> {
    let g = base.omegas.len();
    if g < 2 || base.values.len() != g {
        return Err(Error::DimensionMismatch(format!("{} frequencies, {} values", g, base.values.len())));
    }
    let start = base.omegas[0];
    let step = (base.omegas[g - 1] - start) / (g - 1) as f64;
    if !(step > 0.0) || base.omegas.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step) {
        return Err(Error::InvalidArgument {
            name: "base",
            reason: "frequency grid must be uniform and increasing".into(),
        });
    }
    let ratio = start / step;
    let offset = ratio.round();
    if (ratio - offset).abs() > 1e-6 {
        return Err(Error::InvalidArgument {
            name: "base",
            reason: format!("grid start {start} is not a multiple of the step {step}"),
        });
    }
    let peak = base.max_abs();
    let left = base.values[0].abs();
    if left > EDGE_TOLERANCE * peak {
        return Err(Error::GridTooNarrow(format!(
            "spectrum is {:.3e} of its peak at the lower edge ω = {start}; start the grid lower",
            left / peak
        )));
    }
    let right = base.values[g - 1].abs();
    if start < 0.0 && right > EDGE_TOLERANCE * peak {
        return Err(Error::GridTooNarrow(format!(
            "spectrum is {:.3e} of its peak at the upper edge ω = {}; extend the grid",
            right / peak,
            base.omegas[g - 1]
        )));
    }
    Ok(UniformGrid { step, offset: offset as i64 })
}

/// `∫ a(ω′) b(ω − ω′) dω′` on the base grid, both factors zero off-grid.
fn convolve(a: &[f64], b: &[f64], grid: &UniformGrid) -> Vec<f64> {
    let g = a.len() as i64;
    (0..g)
        .into_par_iter()
        .map(|k| {
            // ω_k − ω_j = ω_i  ⇔  i = k − j − offset
            let mut acc = 0.0;
            for j in 0..g {
                let i = k - j - grid.offset;
                if i >= 0 && i < g {
                    acc += a[j as usize] * b[i as usize];
                }
            }
            acc * grid.step
        })
        .collect()
}

/// Spectrum of `Xⁿ` from the spectrum of X: `n! (S̃ ∗ ⋯ ∗ S̃)`, n factors.
///
/// The base must be sampled on a uniform grid whose start is a multiple of
/// the step and whose edges carry at most 1e-6 of the peak (for grids
/// starting at ω ≤ 0 with a causal spectrum only the upper edge may be cut).
pub fn convolution_power_spectrum(base: &SpectrumTable, n: usize) -> Result<SpectrumTable> {
    if n == 0 {
        return Err(Error::InvalidArgument { name: "n", reason: "power must be at least 1".into() });
    }
    if n == 1 {
        return Ok(base.clone());
    }
    let grid = check_grid(base)?;
    let mut acc = base.values.clone();
    let mut factorial = 1.0;
    for r in 2..=n {
        acc = convolve(&acc, &base.values, &grid);
        factorial *= r as f64;
    }
    Ok(SpectrumTable { omegas: base.omegas.clone(), values: acc.iter().map(|v| v * factorial).collect() })
}

/// `Σₙ βₙ (S̃ ∗ ⋯ ∗ S̃)` for n ≥ 1, with `betas[n]` the coefficient of the
/// n-fold convolution. The n = 0 term is a delta at ω = 0 that a table
/// cannot hold, so `betas[0]` must vanish.
pub fn general_observable_spectrum(base: &SpectrumTable, betas: &[f64]) -> Result<SpectrumTable> {
    if betas.first().is_some_and(|&b| b != 0.0) {
        return Err(Error::InvalidArgument {
            name: "betas",
            reason: "constant term is a delta at zero frequency".into(),
        });
    }
    let mut total = vec![0.0; base.values.len()];
    let mut power = base.values.clone();
    let grid = if betas.len() > 2 { Some(check_grid(base)?) } else { None };
    for (n, &beta) in betas.iter().enumerate().skip(1) {
        if n > 1 {
            power = convolve(&power, &base.values, grid.as_ref().expect("checked"));
        }
        for (t, p) in total.iter_mut().zip(&power) {
            *t += beta * p;
        }
    }
    Ok(SpectrumTable { omegas: base.omegas.clone(), values: total })
}
