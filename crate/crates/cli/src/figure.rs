//! Data behind the two curves of the damped-oscillator figure:
//! S̃ and S̃⁽²⁾ at Ω̄₀ = 1, γ̄₀ = 0.1, ħ = m = 1, in dimensionless form.

use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};

use collective_mode::spectra::uniform_grid;
use collective_mode::{convolution_power_spectrum, ohmic_spectrum, OscillatorParams};

use crate::output::{create_dir, write_file, Table};
use crate::CliError;

pub const OMEGA_BAR: f64 = 1.0;
pub const GAMMA_BAR: f64 = 0.1;

pub fn figure1(out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (hbar, mass) = (1.0, 1.0);
    let params = OscillatorParams::from_underdamped(OMEGA_BAR, GAMMA_BAR);
    let grid = uniform_grid(0.0, 4.0, 2000);
    let s1 = ohmic_spectrum(&params, &grid, hbar, mass)?.omega_form;
    let s2 = convolution_power_spectrum(&s1, 2)?;
    let scale1 = PI * mass * OMEGA_BAR * OMEGA_BAR / hbar;
    let scale2 = (PI * mass * OMEGA_BAR.powf(1.5) / (hbar * SQRT_2)).powi(2);

    create_dir(out_dir)?;
    let mut files = Vec::new();
    for (name, column, table, scale) in
        [("figure1_s.csv", "scaled_S", &s1, scale1), ("figure1_s2.csv", "scaled_S2", &s2, scale2)]
    {
        let t =
            Table::new().column("omega", grid.iter().copied()).column(column, table.values.iter().map(|v| v * scale));
        let p = out_dir.join(name);
        write_file(&p, &t.to_csv())?;
        files.push(p);
    }
    Ok(files)
}
