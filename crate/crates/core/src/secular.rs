//! Eigenvalues of a rank-one update `D + ρ z zᵀ` from the secular equation
//! `1 = ρ Σ_j z_j² / (λ − d_j)`.
//!
//! Each root is stored relative to its nearest pole so that roots hugging a
//! pole keep full relative precision in `λ − d_j`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularRoot {
    /// Index into the pole list.
    pub origin: usize,
    /// `λ − poles[origin]`.
    pub offset: f64,
}

impl SecularRoot {
    pub fn value(&self, poles: &[f64]) -> f64 {
        poles[self.origin] + self.offset
    }

    /// `(Σ w_j/(λ−d_j), Σ w_j/(λ−d_j)²)` with the differences taken pole-relative.
    /// Poles with zero weight are skipped.
    pub fn sums(&self, poles: &[f64], weights: &[f64]) -> (f64, f64) {
        let base = poles[self.origin];
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (&d, &w) in poles.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            let gap = (base - d) + self.offset;
            s1 += w / gap;
            s2 += w / (gap * gap);
        }
        (s1, s2)
    }
}

/// All eigenvalues of `diag(poles) + ρ z zᵀ` with `z_j² = weights[j]`, ascending.
///
/// Poles must be sorted ascending. Equal poles are merged; a merged group of
/// multiplicity r keeps r−1 eigenvalues on the pole, and zero-weight poles are
/// eigenvalues themselves.
pub fn solve_secular(poles: &[f64], weights: &[f64], rho: f64) -> Result<Vec<SecularRoot>> {
    if poles.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!("{} poles, {} weights", poles.len(), weights.len())));
    }
    if poles.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument { name: "poles", reason: "must be sorted ascending".into() });
    }
    if weights.iter().any(|&w| !(w >= 0.0)) || !(rho >= 0.0) {
        return Err(Error::InvalidArgument { name: "weights", reason: "weights and rho must be nonnegative".into() });
    }
    let scale = poles.iter().fold(0.0f64, |a, &d| a.max(d.abs())).max(f64::MIN_POSITIVE);
    let mut roots = Vec::with_capacity(poles.len());
    // active[i] = (representative pole index, merged weight)
    let mut active: Vec<(usize, f64)> = Vec::new();
    let mut merged_w = vec![0.0; poles.len()];
    let mut i = 0;
    while i < poles.len() {
        let mut j = i;
        let mut w = 0.0;
        while j < poles.len() && poles[j] - poles[i] <= 1e-14 * scale {
            w += weights[j];
            j += 1;
        }
        let multiplicity = j - i;
        let live = w > 0.0 && rho > 0.0;
        let stay = if live { multiplicity - 1 } else { multiplicity };
        for _ in 0..stay {
            roots.push(SecularRoot { origin: i, offset: 0.0 });
        }
        if live {
            active.push((i, w));
            merged_w[i] = w;
        }
        i = j;
    }
    let f = |origin: usize, delta: f64| -> f64 {
        let base = poles[origin];
        1.0 - rho * active.iter().map(|&(j, w)| w / ((base - poles[j]) + delta)).sum::<f64>()
    };
    for pair in active.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        let gap = poles[b] - poles[a];
        let half = 0.5 * gap;
        let fm = f(a, half);
        if fm.is_nan() {
            return Err(Error::RootNotFound { lower: poles[a], upper: poles[b] });
        }
        let root = if fm >= 0.0 { bisect(&f, a, 0.0, half) } else { bisect(&f, b, -half, 0.0) };
        roots.push(root.ok_or(Error::RootNotFound { lower: poles[a], upper: poles[b] })?);
    }
    if let Some(&(top, _)) = active.last() {
        let total: f64 = active.iter().map(|&(_, w)| w).sum();
        let mut hi = rho * total;
        let mut tries = 0;
        while f(top, hi) < 0.0 && tries < 60 {
            hi *= 2.0;
            tries += 1;
        }
        roots.push(bisect(&f, top, 0.0, hi).ok_or(Error::RootNotFound { lower: poles[top], upper: poles[top] + hi })?);
    }
    roots.sort_by(|x, y| x.value(poles).total_cmp(&y.value(poles)));
    Ok(roots)
}

/// Bisects the increasing function `f(origin, ·)` on `(lo, hi)`.
fn bisect(f: &impl Fn(usize, f64) -> f64, origin: usize, mut lo: f64, mut hi: f64) -> Option<SecularRoot> {
    for _ in 0..2000 {
        let width = hi - lo;
        if width <= 1e-13 * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(origin, mid);
        if v.is_nan() {
            return None;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(SecularRoot { origin, offset: 0.5 * (lo + hi) })
}
