//! Fixtures shared by the benchmarks.

use collective_mode::{build_next_neighbor_model, caldeira_leggett_form, CollectiveForm, SystemModel};

pub fn point_coupled(n: usize, alpha: f64) -> SystemModel {
    build_next_neighbor_model(n, 1.0, 1.0, alpha).expect("valid chain")
}

pub fn point_coupled_form(n: usize, alpha: f64) -> CollectiveForm {
    caldeira_leggett_form(&point_coupled(n, alpha)).expect("stable bath")
}
