//! Change of variables from the two chains to a collective coordinate coupled
//! to an internal bath.
//!
//! With phonon coordinates `c = Aᵀx`, `c̄ = Aᵀx̄` and `d = (c − c̄)/√2`, the
//! antisymmetric sector has potential `(d, [(m/2)Ω² + K̃] d)`. Its first
//! coordinate `X = d₁` carries `K̃₁₁ X²` and couples to the rest through
//! `2 X Σ kₙ dₙ₊₁` with `kₙ = K̃₁,ₙ₊₁`. Rotating the rest by the eigenvectors U
//! of the bath matrix gives bath oscillators ξ with frequencies ω̃ and
//! couplings `l = Uᵀk`; the coefficient of `X ξₙ` in the potential is `2lₙ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{positive, Error, Result};
use crate::linalg::{max_abs, symmetric_eigen};
use crate::model::{phonon_spectrum, PhononSpectrum, SystemModel};
use crate::secular::solve_secular;
use crate::spectra::QuantumModes;

#[derive(Debug, Clone)]
pub struct InteractionTransforms {
    /// `Aᵀ K̂ A` with `K̂ = diag(k̂)`.
    pub k_alpha: DMatrix<f64>,
    /// `Aᵀ K A`.
    pub k_beta: DMatrix<f64>,
    /// `K̃^α + K̃^β`, acting on the antisymmetric sector.
    pub k_tilde: DMatrix<f64>,
    /// `K̃^α − K̃^β`, acting on the symmetric sector.
    pub k_bar: DMatrix<f64>,
}

pub fn interaction_in_phonon_basis(model: &SystemModel, phonons: &PhononSpectrum) -> Result<InteractionTransforms> {
    let n = model.n_particles();
    let a = &phonons.basis;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch(format!("basis is {}x{}, model has N = {n}", a.nrows(), a.ncols())));
    }
    let k_hat = DMatrix::from_diagonal(&DVector::from_vec(model.k_hat()));
    let at = a.transpose();
    let k_alpha = &at * k_hat * a;
    let k_beta = &at * model.k_matrix() * a;
    let k_tilde = &k_alpha + &k_beta;
    let k_bar = &k_alpha - &k_beta;
    Ok(InteractionTransforms { k_alpha, k_beta, k_tilde, k_bar })
}

/// Collective coordinate plus internal bath.
#[derive(Debug, Clone)]
pub struct CollectiveForm {
    pub k_tilde_11: f64,
    /// Bath frequencies ω̃ₙ, ascending.
    pub bath_freqs: Vec<f64>,
    /// `l = Uᵀk`.
    pub couplings_l: Vec<f64>,
    /// `kₙ = K̃₁,ₙ₊₁`.
    pub coupling_k: Vec<f64>,
    pub bath_matrix: DMatrix<f64>,
    pub bath_transform: DMatrix<f64>,
    pub mass: f64,
    pub hbar: f64,
}

impl CollectiveForm {
    /// A form with a prescribed diagonal bath: frequencies ω̃ₙ and couplings gₙ
    /// entering the potential as `K̃₁₁X² + X Σ gₙ ξₙ + (m/2) Σ ω̃ₙ² ξₙ²`.
    pub fn from_bath(mass: f64, hbar: f64, k_tilde_11: f64, freqs: &[f64], xi_couplings: &[f64]) -> Result<Self> {
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        if freqs.len() != xi_couplings.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bath frequencies, {} couplings",
                freqs.len(),
                xi_couplings.len()
            )));
        }
        if let Some(&bad) = freqs.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument {
                name: "freqs",
                reason: format!("bath frequency {bad} is not positive"),
            });
        }
        let mut order: Vec<usize> = (0..freqs.len()).collect();
        order.sort_by(|&a, &b| freqs[a].total_cmp(&freqs[b]));
        let bath_freqs: Vec<f64> = order.iter().map(|&i| freqs[i]).collect();
        let l: Vec<f64> = order.iter().map(|&i| 0.5 * xi_couplings[i]).collect();
        let m = bath_freqs.len();
        let bath_matrix =
            DMatrix::from_diagonal(&DVector::from_iterator(m, bath_freqs.iter().map(|w| 0.5 * mass * w * w)));
        Ok(CollectiveForm {
            k_tilde_11,
            bath_freqs,
            couplings_l: l.clone(),
            coupling_k: l,
            bath_matrix,
            bath_transform: DMatrix::identity(m, m),
            mass,
            hbar,
        })
    }

    /// Coefficient of `X ξₙ` in the potential, `2lₙ`.
    pub fn bath_coupling(&self) -> Vec<f64> {
        self.couplings_l.iter().map(|l| 2.0 * l).collect()
    }

    /// Mean distance between neighboring bath frequencies. A single bath mode
    /// counts its own frequency as the spacing.
    pub fn mean_bath_spacing(&self) -> Option<f64> {
        mean_spacing(&self.bath_freqs)
    }

    /// Time after which a bath with this level spacing returns energy, `2π/δω̃`.
    pub fn recurrence_time(&self) -> f64 {
        self.mean_bath_spacing().map_or(f64::INFINITY, |d| 2.0 * PI / d)
    }

    pub fn max_bath_frequency(&self) -> f64 {
        self.bath_freqs.last().copied().unwrap_or(0.0)
    }

    /// Squared-frequency matrix of the (X, ξ) sector.
    pub fn frequency_matrix(&self) -> DMatrix<f64> {
        let n = self.bath_freqs.len() + 1;
        let m = self.mass;
        let g = self.bath_coupling();
        let mut h = DMatrix::zeros(n, n);
        h[(0, 0)] = 2.0 * self.k_tilde_11 / m;
        for j in 0..n - 1 {
            h[(0, j + 1)] = g[j] / m;
            h[(j + 1, 0)] = g[j] / m;
            h[(j + 1, j + 1)] = self.bath_freqs[j] * self.bath_freqs[j];
        }
        h
    }

    /// Spectral density evaluated through the resolvent of the bath frequency
    /// matrix `S = (Ω_r² + (2/m)K̃_r)^{1/2}`:
    /// `−(1/2πmω) Im (2k, [ω − S + iε]⁻¹ 2k)`.
    pub fn sigma_resolvent(&self, omega: f64, epsilon: f64) -> Result<f64> {
        positive("epsilon", epsilon)?;
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::InvalidArgument {
                name: "omega", reason: "resolvent form is singular at ω = 0".into()
            });
        }
        let u = &self.bath_transform;
        let two_k = DVector::from_iterator(self.coupling_k.len(), self.coupling_k.iter().map(|k| 2.0 * k));
        let proj = u.transpose() * two_k;
        let mut im = 0.0;
        for (p, w) in proj.iter().zip(&self.bath_freqs) {
            let x = omega - w;
            im += -p * p * epsilon / (x * x + epsilon * epsilon);
        }
        Ok(-im / (2.0 * PI * self.mass * omega))
    }
}

pub(crate) fn mean_spacing(sorted: &[f64]) -> Option<f64> {
    match sorted.len() {
        0 => None,
        1 => Some(sorted[0]),
        n => Some((sorted[n - 1] - sorted[0]) / (n - 1) as f64),
    }
}

pub fn caldeira_leggett_form(model: &SystemModel) -> Result<CollectiveForm> {
    let phonons = phonon_spectrum(model);
    let it = interaction_in_phonon_basis(model, &phonons)?;
    let n = model.n_particles();
    let m = model.mass();
    let b = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let diag = if i == j { 0.5 * m * phonons.omega_sq[i + 1] } else { 0.0 };
        it.k_tilde[(i + 1, j + 1)] + diag
    });
    let eig = symmetric_eigen(&b);
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    if let Some(&bad) = eig.values.iter().find(|&&v| v <= 1e-12 * top) {
        return Err(Error::UnstableBath { eigenvalue: bad });
    }
    let bath_freqs = eig.values.iter().map(|v| (2.0 * v / m).sqrt()).collect();
    let k = DVector::from_iterator(n - 1, (1..n).map(|j| it.k_tilde[(0, j)]));
    let l = eig.vectors.transpose() * &k;
    Ok(CollectiveForm {
        k_tilde_11: it.k_tilde[(0, 0)],
        bath_freqs,
        couplings_l: l.iter().copied().collect(),
        coupling_k: k.iter().copied().collect(),
        bath_matrix: b,
        bath_transform: eig.vectors,
        mass: m,
        hbar: model.hbar(),
    })
}

#[derive(Debug, Clone)]
pub struct Decoupling {
    /// `kᵢ = (2/√N) Σⱼ k̂ⱼ A_{j,i+1}`.
    pub k_closed_form: Vec<f64>,
    /// `K̃₁,ᵢ₊₁` from the full congruence transform.
    pub k_mapped: Vec<f64>,
    pub is_decoupled: bool,
}

pub fn decoupling_indicator(model: &SystemModel) -> Result<Decoupling> {
    let phonons = phonon_spectrum(model);
    let it = interaction_in_phonon_basis(model, &phonons)?;
    let n = model.n_particles();
    let k_hat = model.k_hat();
    let pref = 2.0 / (n as f64).sqrt();
    let k_closed_form: Vec<f64> =
        (1..n).map(|i| pref * (0..n).map(|j| k_hat[j] * phonons.basis[(j, i)]).sum::<f64>()).collect();
    let k_mapped: Vec<f64> = (1..n).map(|i| it.k_tilde[(0, i)]).collect();
    let khat_max = k_hat.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let kmax = k_mapped.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    Ok(Decoupling { k_closed_form, k_mapped, is_decoupled: kmax <= 1e-12 * khat_max })
}

/// Bath frequencies and couplings of the point-coupled free chains from the
/// secular equation `(4α/Nm) Σₖ cos²(π(k−1)/2N) / (ω̃² − ωₖ²) = 1`.
#[derive(Debug, Clone)]
pub struct SecularSolution {
    pub bath_freqs: Vec<f64>,
    /// `Cₙ(α)`, equal to lₙ up to the eigenvector sign.
    pub couplings: Vec<f64>,
    /// Phonon frequencies ω₂..ω_N the roots interlace with.
    pub phonon_freqs: Vec<f64>,
}

pub fn point_coupling_secular(n: usize, omega0: f64, alpha: f64, mass: f64) -> Result<SecularSolution> {
    if n < 2 {
        return Err(Error::InvalidArgument { name: "n", reason: format!("need N >= 2, got {n}") });
    }
    positive("omega0", omega0)?;
    positive("alpha", alpha)?;
    positive("mass", mass)?;
    let nf = n as f64;
    let theta: Vec<f64> = (1..n).map(|k| PI * k as f64 / (2.0 * nf)).collect();
    let poles: Vec<f64> = theta.iter().map(|t| (2.0 * omega0 * t.sin()).powi(2)).collect();
    let weights: Vec<f64> = theta.iter().map(|t| t.cos().powi(2)).collect();
    let rho = 4.0 * alpha / (nf * mass);
    let roots = solve_secular(&poles, &weights, rho)?;
    let pref = 2f64.sqrt() * alpha / nf;
    let mut bath_freqs = Vec::with_capacity(n - 1);
    let mut couplings = Vec::with_capacity(n - 1);
    for r in &roots {
        bath_freqs.push(r.value(&poles).sqrt());
        let (s1, s2) = r.sums(&poles, &weights);
        couplings.push(if s2 > 0.0 && s2.is_finite() { pref * s1 / s2.sqrt() } else { 0.0 });
    }
    Ok(SecularSolution { bath_freqs, couplings, phonon_freqs: poles.iter().map(|p| p.sqrt()).collect() })
}

/// Normal modes of the (X, ξ) sector and the X-components of their eigenvectors.
pub fn collective_sector_modes(form: &CollectiveForm) -> Result<QuantumModes> {
    let eig = symmetric_eigen(&form.frequency_matrix());
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    if let Some(&bad) = eig.values.iter().find(|&&v| v <= 1e-14 * top) {
        return Err(Error::UnstableCollective { omega_sq: bad });
    }
    Ok(QuantumModes {
        frequencies: eig.values.iter().map(|v| v.sqrt()).collect(),
        x_coefficients: eig.vectors.row(0).iter().copied().collect(),
        mass: form.mass,
        hbar: form.hbar,
    })
}

/// Squared frequencies of the symmetric (d̄) sector, `eig(Ω² + (2/m)K̄)`.
/// Includes the zero-frequency translation of both chains.
pub fn symmetric_sector_omega_sq(model: &SystemModel) -> Result<Vec<f64>> {
    let phonons = phonon_spectrum(model);
    let it = interaction_in_phonon_basis(model, &phonons)?;
    let m = model.mass();
    let h = DMatrix::from_diagonal(&DVector::from_vec(phonons.omega_sq.clone())) + it.k_bar * (2.0 / m);
    Ok(symmetric_eigen(&h).values)
}

/// Eigenpairs of the full 2N-coordinate frequency matrix `(2/m) Q`.
pub fn full_system_modes(model: &SystemModel) -> crate::linalg::Eigen {
    let q = crate::model::full_potential_matrix(model);
    symmetric_eigen(&(q * (2.0 / model.mass())))
}

/// Residual of `UᵀBU = (m/2) diag(ω̃²)` relative to the largest eigenvalue.
pub fn bath_diagonalization_residual(form: &CollectiveForm) -> f64 {
    let u = &form.bath_transform;
    let mut d = u.transpose() * &form.bath_matrix * u;
    for (i, w) in form.bath_freqs.iter().enumerate() {
        d[(i, i)] -= 0.5 * form.mass * w * w;
    }
    let top = form.bath_freqs.last().map_or(1.0, |w| 0.5 * form.mass * w * w).max(f64::MIN_POSITIVE);
    max_abs(&d) / top
}
