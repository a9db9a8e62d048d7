//! Two coupled oscillator chains: construction, validation and free-chain phonons.
//!
//! The potential is stored as a quadratic form without a factor 1/2,
//! `V = (x, W x) + (x̄, W x̄) + Σ K_ij (x_i − x̄_j)²`, so the single-chain
//! squared frequencies are the eigenvalues of `(2/m) W`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{positive, Error, Result, Violation};
use crate::linalg::{max_abs, symmetric_eigen};

/// Boundary condition of the next-neighbor chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Open chain with N−1 springs. Its normal modes are the cosine standing
    /// waves with frequencies `2ω₀ sin(π(k−1)/2N)`.
    Free,
    /// Ring with N springs, the last one closing x_N back onto x_1.
    Periodic,
}

#[derive(Debug, Clone)]
pub struct SystemModel {
    n: usize,
    mass: f64,
    hbar: f64,
    omega0: Option<f64>,
    boundary: Option<Boundary>,
    w: DMatrix<f64>,
    k: DMatrix<f64>,
}

impl SystemModel {
    pub fn n_particles(&self) -> usize {
        self.n
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn omega0(&self) -> Option<f64> {
        self.omega0
    }
    pub fn boundary(&self) -> Option<Boundary> {
        self.boundary
    }
    pub fn w_matrix(&self) -> &DMatrix<f64> {
        &self.w
    }
    pub fn k_matrix(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// Row sums `k̂_i = Σ_j K_ij`.
    pub fn k_hat(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.k.row(i).sum()).collect()
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        positive("hbar", hbar)?;
        self.hbar = hbar;
        Ok(self)
    }

    /// Adds the same constant to every coupling constant, `K_ij → K_ij + kappa`.
    pub fn with_uniform_coupling(&self, kappa: f64) -> Result<Self> {
        let mut next = self.clone();
        next.k.add_scalar_mut(kappa);
        next.validated()
    }

    /// Adds `k0·X²` to the potential while leaving the bath untouched.
    ///
    /// Realized as `K → K + 𝒦` with `W → W − 𝒦(N·I − J)`, `𝒦 = k0/2N`: the
    /// uniform shift of K raises every relative-coordinate frequency, and the
    /// compensating change of W takes it back out of the bath.
    pub fn with_collective_shift(&self, k0: f64) -> Result<Self> {
        let n = self.n as f64;
        let kappa = k0 / (2.0 * n);
        let mut next = self.clone();
        next.k.add_scalar_mut(kappa);
        for i in 0..self.n {
            for j in 0..self.n {
                let d = if i == j { n - 1.0 } else { -1.0 };
                next.w[(i, j)] -= kappa * d;
            }
        }
        next.validated()
    }

    fn validated(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    /// All structural checks that fail for this model.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n;
        if !self.w.iter().chain(self.k.iter()).all(|x| x.is_finite()) {
            out.push(Violation::NonFinite { what: "W or K" });
            return out;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.w[(i, j)] != self.w[(j, i)] {
                    out.push(Violation::AsymmetricW { row: i, col: j });
                }
            }
        }
        let wmax = max_abs(&self.w);
        if self.boundary != Some(Boundary::Free) {
            'shift: for i in 0..n {
                for j in 0..n {
                    let dev = (self.w[(i, j)] - self.w[((i + 1) % n, (j + 1) % n)]).abs();
                    if dev > 1e-12 * wmax {
                        out.push(Violation::NotShiftInvariant { row: i, col: j, deviation: dev });
                        break 'shift;
                    }
                }
            }
        }
        for j in 0..n {
            let sum = self.w.column(j).sum();
            if sum.abs() > 1e-12 * wmax {
                out.push(Violation::RowSum { row: j, sum });
            }
        }
        let kmax = max_abs(&self.k);
        for i in 0..n {
            for j in 0..n {
                let v = self.k[(i, j)];
                if v < 0.0 {
                    out.push(Violation::NegativeCoupling { row: i, col: j, value: v });
                }
                let dev = (v - self.k[(j, i)]).abs();
                if j > i && dev > 1e-12 * kmax {
                    out.push(Violation::AsymmetricK { row: i, col: j, deviation: dev });
                }
            }
        }
        if out.is_empty() {
            let eig = symmetric_eigen(&full_potential_matrix(self));
            let lo = eig.values[0];
            let hi = eig.values.last().copied().unwrap_or(0.0).max(0.0);
            if lo < -1e-10 * hi || (hi == 0.0 && lo < 0.0) {
                out.push(Violation::IndefinitePotential { min_eigenvalue: lo, max_eigenvalue: hi });
            }
        }
        out
    }
}

/// Next-neighbor chains `(mω₀²/2) Σ (x_j − x_{j+1})²` with open ends, coupled
/// only through their first particles, `K_11 = α/2`.
pub fn build_next_neighbor_model(n: usize, mass: f64, omega0: f64, alpha: f64) -> Result<SystemModel> {
    build_chain_model(n, mass, omega0, alpha, Boundary::Free)
}

pub fn build_chain_model(n: usize, mass: f64, omega0: f64, alpha: f64, boundary: Boundary) -> Result<SystemModel> {
    if n < 2 {
        return Err(Error::InvalidModel(vec![Violation::TooFewParticles(n)]));
    }
    positive("mass", mass)?;
    positive("omega0", omega0)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument { name: "alpha", reason: format!("must be nonnegative, got {alpha}") });
    }
    let spring = 0.5 * mass * omega0 * omega0;
    let mut w = DMatrix::zeros(n, n);
    let springs = match boundary {
        Boundary::Free => n - 1,
        Boundary::Periodic => n,
    };
    for s in 0..springs {
        let (a, b) = (s, (s + 1) % n);
        w[(a, a)] += spring;
        w[(b, b)] += spring;
        w[(a, b)] -= spring;
        w[(b, a)] -= spring;
    }
    let mut k = DMatrix::zeros(n, n);
    k[(0, 0)] = 0.5 * alpha;
    SystemModel { n, mass, hbar: 1.0, omega0: Some(omega0), boundary: Some(boundary), w, k }.validated()
}

pub fn build_general_model(w: DMatrix<f64>, k: DMatrix<f64>, mass: f64, hbar: f64) -> Result<SystemModel> {
    let n = w.nrows();
    let mut dims = Vec::new();
    if w.ncols() != n {
        dims.push(Violation::Dimension { what: "W", rows: w.nrows(), cols: w.ncols(), expected: n });
    }
    if k.nrows() != n || k.ncols() != n {
        dims.push(Violation::Dimension { what: "K", rows: k.nrows(), cols: k.ncols(), expected: n });
    }
    if n < 2 {
        dims.push(Violation::TooFewParticles(n));
    }
    for (field, value) in [("mass", mass), ("hbar", hbar)] {
        if !(value > 0.0 && value.is_finite()) {
            dims.push(Violation::NonPositive { field, value });
        }
    }
    if !dims.is_empty() {
        return Err(Error::InvalidModel(dims));
    }
    SystemModel { n, mass, hbar, omega0: None, boundary: None, w, k }.validated()
}

/// The 2N×2N matrix Q with potential energy `zᵀQz`, `z = (x, x̄)`.
pub fn full_potential_matrix(model: &SystemModel) -> DMatrix<f64> {
    let n = model.n;
    let k = &model.k;
    let mut q = DMatrix::zeros(2 * n, 2 * n);
    q.view_mut((0, 0), (n, n)).copy_from(&model.w);
    q.view_mut((n, n), (n, n)).copy_from(&model.w);
    for i in 0..n {
        q[(i, i)] += k.row(i).sum();
        q[(n + i, n + i)] += k.column(i).sum();
        for j in 0..n {
            q[(i, n + j)] = -k[(i, j)];
            q[(n + j, i)] = -k[(i, j)];
        }
    }
    q
}

/// Normal modes of a single uncoupled chain.
#[derive(Debug, Clone)]
pub struct PhononSpectrum {
    /// Squared frequencies, zero mode first. Negative entries only occur for
    /// chains whose own potential is indefinite.
    pub omega_sq: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Orthogonal matrix whose columns are the modes; column 0 is uniform.
    pub basis: DMatrix<f64>,
}

/// Columns `√(2/N) cos(π(m−1)(j−½)/N)` for m ≥ 2 and the uniform vector for m = 1.
pub fn standing_wave_basis(n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |j, m| {
        if m == 0 {
            1.0 / nf.sqrt()
        } else {
            (2.0 / nf).sqrt() * (PI * m as f64 * (j as f64 + 0.5) / nf).cos()
        }
    })
}

/// `2ω₀ sin(π(k−1)/2N)` for k = 1..N.
pub fn free_chain_frequencies(n: usize, omega0: f64) -> Vec<f64> {
    (0..n).map(|k| 2.0 * omega0 * (PI * k as f64 / (2.0 * n as f64)).sin()).collect()
}

pub fn phonon_spectrum(model: &SystemModel) -> PhononSpectrum {
    let n = model.n;
    let s = standing_wave_basis(n);
    let rest = s.columns(1, n - 1).into_owned();
    let reduced = rest.transpose() * &model.w * &rest * (2.0 / model.mass);
    let eig = symmetric_eigen(&reduced);
    let mut basis = DMatrix::zeros(n, n);
    basis.set_column(0, &s.column(0));
    let rotated = &rest * &eig.vectors;
    for m in 0..n - 1 {
        let mut col = rotated.column(m).into_owned();
        crate::linalg::fix_sign(&mut col);
        basis.set_column(m + 1, &col);
    }
    let mut omega_sq = vec![0.0];
    omega_sq.extend(eig.values.iter().copied());
    let frequencies = omega_sq.iter().map(|&w2: &f64| w2.max(0.0).sqrt()).collect();
    PhononSpectrum { omega_sq, frequencies, basis }
}
