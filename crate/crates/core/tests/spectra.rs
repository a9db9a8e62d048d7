use collective_mode::spectra::{smoothing_window, uniform_grid, SmoothingWindow};
use collective_mode::{
    build_next_neighbor_model, caldeira_leggett_form, collective_sector_modes, fdt_spectrum, smoothed_spectrum,
    strength_comb, CollectiveForm,
};

fn routes(form: &CollectiveForm) -> (f64, f64, SmoothingWindow) {
    let modes = collective_sector_modes(form).unwrap();
    let comb = strength_comb(&modes);
    let eps = comb.default_epsilon().unwrap();
    let top = comb.lines.last().unwrap().frequency;
    let grid = uniform_grid(top / 4000.0, top + 10.0 * eps, 4000);
    let mirror: Vec<f64> = grid.iter().map(|w| -w).collect();
    let smooth = smoothed_spectrum(&comb, eps, &grid).unwrap();
    let image = smoothed_spectrum(&comb, eps, &mirror).unwrap();
    let fdt = fdt_spectrum(form, &grid, eps).unwrap();
    let peak = smooth.max_abs();
    let direct = smooth.values.iter().zip(&fdt.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
    let imaged = smooth
        .values
        .iter()
        .zip(&image.values)
        .zip(&fdt.values)
        .map(|((a, m), b)| (a - m - b).abs())
        .fold(0.0, f64::max)
        / peak;
    let omega0 = modes.frequencies
        [modes.x_coefficients.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap().0];
    (direct, imaged, smoothing_window(&comb, eps, omega0))
}

#[test]
fn point_coupled_routes_differ_by_the_image_term() {
    // With eps = 5 spacings the smoothing is wider than the collective
    // frequency, so the comb's Lorentzian tails reach negative frequencies
    // and the two routes cannot agree to 5%.
    let form = caldeira_leggett_form(&build_next_neighbor_model(32, 1.0, 1.0, 0.5).unwrap()).unwrap();
    let (direct, imaged, window) = routes(&form);
    println!("N = 32 point coupling: comb vs FDT {:.1}%, after removing the image {imaged:.1e}", 100.0 * direct);
    assert!(matches!(window, SmoothingWindow::AbovePeak { .. }));
    assert!(direct > 0.05);
    assert!(imaged < 1e-9);
}

#[test]
fn lifted_collective_mode_routes_agree() {
    let model = build_next_neighbor_model(32, 1.0, 1.0, 0.5).unwrap().with_uniform_coupling(1.0 / 64.0).unwrap();
    let form = caldeira_leggett_form(&model).unwrap();
    let (direct, imaged, _) = routes(&form);
    assert!(direct < 0.05, "comb vs FDT {direct}");
    assert!(imaged < 1e-9);
}
