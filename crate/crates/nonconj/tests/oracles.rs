use nonconj::dynamics::{propagate_with, Grid};
use nonconj::entropy::von_neumann;
use nonconj::gaussian::{DipoleModeOracle, OracleRow};
use nonconj::models::{build_harmonic_dipole_mode, build_jaynes_cummings, HarmonicParams, JcParams};
use nonconj::operator::{boson, thermal_state, DensityOperator, Operator};
use nonconj::thermo::{law_residuals, LedgerBuilder, LedgerOptions, ThermoLedger};

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn harmonic(eta: f64, n: usize, spp: usize, t_end: f64, samples: usize, options: LedgerOptions) -> ThermoLedger {
    let bundle = build_harmonic_dipole_mode(&HarmonicParams { eta, ..Default::default() }, (n, n)).unwrap();
    let grid = Grid::per_period(t_end, spp, 1.0).unwrap();
    let rho0 = bundle.thermal_product(2.0, 1.0).unwrap();
    let mut lb = LedgerBuilder::new(&bundle, 1.0, options).unwrap();
    propagate_with(&bundle.as_hamiltonian(), &rho0, grid, (grid.steps / samples).max(1), |_, t, rho| lb.observe(t, rho)).unwrap();
    lb.finish()
}

#[test]
fn fock_pipeline_tracks_covariance_oracle() {
    let (eta, n, spp, t_end) = (0.5, 12, 100, 10.0);
    let ledger = harmonic(eta, n, spp, t_end, 20, LedgerOptions { relative_entropies: false, observational: false });
    let p = HarmonicParams { eta, ..Default::default() };
    let oracle = DipoleModeOracle::new(p).unwrap();
    let grid = Grid::per_period(t_end, spp, 1.0).unwrap();
    let rows = oracle.run(&oracle.thermal(2.0, 1.0).unwrap(), grid, (grid.steps / 20).max(1)).unwrap();
    assert_eq!(rows.len(), ledger.rows.len());
    let col = |f: fn(&OracleRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    for (name, reference) in [("Q", col(|r| r.q)), ("deltaQ", col(|r| r.delta_q)), ("S_B", col(|r| r.s_b)), ("S_Aprime", col(|r| r.s_a_prime))] {
        let e = rel(&ledger.column(name).unwrap(), &reference);
        assert!(e < 2e-3, "{name}: {e:.2e}");
    }
}

#[test]
fn truncated_thermal_entropy_matches_bose_formula() {
    for (omega, beta) in [(1.0, 0.5), (2.0, 1.0), (0.7, 3.0)] {
        let b = boson(80, 1.0, omega).unwrap();
        let rho = thermal_state(&b.n.scale_real(omega), beta).unwrap();
        let nbar = 1.0 / ((beta * omega).exp() - 1.0);
        let exact = (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln();
        assert!((von_neumann(&rho).unwrap() - exact).abs() < 1e-9);
    }
}

#[test]
fn harmonic_ledger_identities() {
    let ledger = harmonic(0.5, 8, 50, 12.0, 24, LedgerOptions::default());
    assert!(ledger.identities_apply);
    let r = law_residuals(&ledger);
    assert!(r.first_law < 1e-10, "{r:?}");
    assert!(r.conjugate_identity < 1e-8, "{r:?}");
    assert!(r.nonconjugate_identity < 1e-8, "{r:?}");
    assert!(r.bath_free_energy < 1e-8, "{r:?}");
    assert!(r.min_sigma > -1e-9 && r.min_sigma_prime > -1e-9, "{r:?}");
}

#[test]
fn nonconjugate_landauer_converges_with_cutoff() {
    // the frame-Y system energy is local only up to Fock truncation
    let opts = LedgerOptions { relative_entropies: true, observational: false };
    let coarse = law_residuals(&harmonic(0.5, 12, 50, 12.0, 12, opts)).landauer;
    let fine = law_residuals(&harmonic(0.5, 20, 50, 12.0, 12, opts)).landauer;
    assert!(fine < 1e-7 && fine < coarse / 100.0, "{coarse:.2e} -> {fine:.2e}");
}

#[test]
fn heat_correction_vanishes_without_coupling() {
    let ledger = harmonic(0.0, 6, 50, 5.0, 5, LedgerOptions { relative_entropies: false, observational: false });
    for col in ["Q", "deltaQ", "W", "Sigma"] {
        assert!(ledger.column(col).unwrap().iter().all(|x| x.abs() < 1e-12), "{col}");
    }
}

#[test]
fn jc_excited_state_decays_under_rotation() {
    // |e> with a vacuum bath: excited population after the frame map is cos^2(eta)
    for eta in [0.1, 0.7, 1.2] {
        let b = build_jaynes_cummings(&JcParams { omega: 1.0, eta }, 5).unwrap();
        let e = DensityOperator::new(Operator::diagonal(&[1.0, 0.0], &[2])).unwrap();
        let vac = DensityOperator::new(Operator::diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0], &[5])).unwrap();
        let rho = b.product_state(&e, &vac).unwrap();
        let red = nonconj::frames::nonconjugate_reduced(&rho, &b.rotation, 0.0, &[0]).unwrap();
        assert!((red.op().get(0, 0).re - eta.cos().powi(2)).abs() < 1e-12);
    }
}
