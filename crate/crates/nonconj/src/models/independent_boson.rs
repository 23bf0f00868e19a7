//! Two-level emitter with excitation-conditioned bath displacements, optionally driven.

use super::{check_cutoff, check_positive, guard_dims, param, ModelBundle, ModelKind, OpFamily, Profile};
use crate::error::{Error, Result};
use crate::frames::{lift_trailing, FrameRotation};
use crate::operator::{boson, embed, hermitian_function, kron, kron_all, qubit, Operator, CI};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BosonMode {
    pub g: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependentBosonParams {
    pub omega_m: f64,
    pub modes: Vec<BosonMode>,
    /// Drive strength multiplying `sx / 2`.
    pub drive: f64,
}

impl Default for IndependentBosonParams {
    fn default() -> Self {
        Self { omega_m: 1.0, modes: vec![BosonMode { g: 0.4, omega: 1.0 }], drive: 0.0 }
    }
}

impl IndependentBosonParams {
    /// Polaron-shifted splitting `omega_m - sum g^2 / (2 omega_k)`.
    pub fn shifted_splitting(&self) -> f64 {
        self.omega_m - self.modes.iter().map(|k| k.g * k.g / (2.0 * k.omega)).sum::<f64>()
    }

    /// Displacement amplitudes `g_k / (sqrt(2) omega_k)`.
    pub fn displacements(&self) -> Vec<f64> {
        self.modes.iter().map(|k| k.g / (std::f64::consts::SQRT_2 * k.omega)).collect()
    }
}

/// `⊗_k exp(alpha_k (b_k^dag - b_k))` on the bath factors.
pub fn displacement(alphas: &[f64], cutoffs: &[usize]) -> Result<Operator> {
    if alphas.len() != cutoffs.len() || alphas.is_empty() {
        return Err(Error::InvalidParameter("one displacement per bath cutoff".into()));
    }
    let factors = alphas
        .iter()
        .zip(cutoffs)
        .map(|(&al, &n)| {
            let b = boson(n, 1.0, 1.0)?;
            // alpha (b^dag - b) = -i K with K = i alpha (b^dag - b) Hermitian
            let k = (&b.adag - &b.a).scale(CI * al);
            hermitian_function(&k, |x| (CI * (-x)).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Operator> = factors.iter().collect();
    kron_all(&refs).with_dims(cutoffs.to_vec())
}

/// Static bundle in the polaron frame X on dims `[2, N_1, ..., N_K]`.
pub fn build_independent_boson(p: &IndependentBosonParams, cutoffs: &[usize]) -> Result<ModelBundle> {
    check_positive("omega_m", p.omega_m)?;
    if p.modes.is_empty() || cutoffs.len() != p.modes.len() {
        return Err(Error::InvalidParameter(format!("expected one cutoff per mode ({} modes, {} cutoffs)", p.modes.len(), cutoffs.len())));
    }
    for (k, (m, &n)) in p.modes.iter().zip(cutoffs).enumerate() {
        check_positive(&format!("mode {k} omega"), m.omega)?;
        check_cutoff(&format!("mode {k}"), n)?;
    }
    if !p.drive.is_finite() {
        return Err(Error::InvalidParameter("drive must be finite".into()));
    }
    let mut dims = vec![2];
    dims.extend_from_slice(cutoffs);
    guard_dims(&dims)?;

    let s = qubit();
    let n_sigma = &s.sp * &s.sm;
    let h_a = &n_sigma.scale_real(p.shifted_splitting()) + &s.sx.scale_real(p.drive / 2.0);
    let ns = embed(&n_sigma, 0, &dims)?;
    let mut h_prime = &embed(&n_sigma.scale_real(p.omega_m), 0, &dims)? + &embed(&s.sx.scale_real(p.drive / 2.0), 0, &dims)?;
    let mut bath_sum = Operator::zeros(&dims);
    let mut y_sum = Operator::zeros(&dims);
    for (k, (m, &n)) in p.modes.iter().zip(cutoffs).enumerate() {
        let b = boson(n, 1.0, 1.0)?;
        let h_k = &b.n.scale_real(m.omega) + &b.identity.scale_real(m.omega / 2.0);
        bath_sum = &bath_sum + &embed(&h_k, k + 1, &dims)?;
        h_prime = &h_prime + &(&ns * &embed(&b.x, k + 1, &dims)?).scale_real(m.g);
        y_sum = &y_sum + &embed(&b.p, k + 1, &dims)?.scale_real(m.g / m.omega);
    }
    h_prime = &h_prime + &bath_sum;
    let decoupled = p.modes.iter().all(|m| m.g == 0.0);
    let rotation = if decoupled {
        FrameRotation::identity(&dims)
    } else {
        FrameRotation::generated((&ns * &y_sum).scale_real(-1.0), Profile::Constant(1.0), "exp(i n_e sum (g_k/w_k) y_k)")?
    };
    let system_y = embed(&h_a, 0, &dims)?;
    let system_energy = rotation.to_frame_x(&system_y, 0.0);
    let bath_energy = rotation.to_frame_x(&(&h_prime - &system_y), 0.0);
    let hamiltonian = &system_energy + &bath_energy;
    let bath_local = crate::operator::partial_trace(&bath_sum, &(1..dims.len()).collect::<Vec<_>>())?.scale_real(0.5);
    let bath_hamiltonian = lift_trailing(&bath_local, &dims)?;

    let mut params = vec![
        param("omega_m", p.omega_m, "frequency"),
        param("omega_m_shifted", p.shifted_splitting(), "frequency"),
        param("drive", p.drive, "frequency"),
    ];
    for (k, m) in p.modes.iter().enumerate() {
        params.push(param(&format!("mode{k}_g"), m.g, "frequency"));
        params.push(param(&format!("mode{k}_omega"), m.omega, "frequency"));
    }
    let mut warnings = Vec::new();
    if !decoupled {
        warnings.push("frame rotation is static and differs from the identity at t = 0".into());
    }
    Ok(ModelBundle {
        kind: ModelKind::IndependentBoson,
        dims,
        n_system: 1,
        profile: Profile::Constant(1.0),
        hamiltonian: OpFamily::constant(hamiltonian),
        system_energy: OpFamily::constant(system_energy),
        bath_energy: OpFamily::constant(bath_energy),
        bath_hamiltonian,
        bath_local,
        system_local: h_a,
        bath_correction: None,
        rotation,
        params,
        warnings,
    })
}

/// Frame-Y Hamiltonian `H'` of the model, for spectral comparisons.
pub fn frame_y_hamiltonian(b: &ModelBundle) -> Operator {
    b.rotation.to_frame_y(&b.hamiltonian_at(0.0), 0.0)
}

/// `omega~ n_e + (drive/2)(D s+ + D^dag s-)`.
pub fn rotated_system_energy_closed_form(p: &IndependentBosonParams, cutoffs: &[usize]) -> Result<Operator> {
    let s = qubit();
    let d = displacement(&p.displacements(), cutoffs)?;
    let mut dims = vec![2];
    dims.extend_from_slice(cutoffs);
    let n_sigma = &s.sp * &s.sm;
    let c = p.drive / 2.0;
    let body = &kron(&s.sp, &d) + &kron(&s.sm, &d.dagger());
    let id_b = Operator::identity(cutoffs);
    Ok(&kron(&n_sigma.scale_real(p.shifted_splitting()), &id_b).with_dims(dims.clone())? + &body.scale_real(c).with_dims(dims)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HermitianEigen;

    #[test]
    fn no_coupling_no_shift() {
        let p = IndependentBosonParams { modes: vec![BosonMode { g: 0.0, omega: 1.0 }], ..Default::default() };
        assert_eq!(p.shifted_splitting(), p.omega_m);
        let b = build_independent_boson(&p, &[4]).unwrap();
        assert!(b.rotation.is_identity_at(0.0));
    }

    #[test]
    fn undriven_polaron_commutes_with_system_energy() {
        let b = build_independent_boson(&IndependentBosonParams::default(), &[12]).unwrap();
        let ha = embed(&b.system_local, 0, &b.dims).unwrap();
        assert!(b.system_energy_at(0.0).max_diff(&ha) < 1e-13);
    }

    #[test]
    fn polaron_spectrum() {
        let p = IndependentBosonParams::default();
        let b = build_independent_boson(&p, &[40]).unwrap();
        let hp = HermitianEigen::new(&frame_y_hamiltonian(&b)).unwrap().values();
        let free = &embed(&b.system_local, 0, &b.dims).unwrap() + &b.bath_hamiltonian;
        let hf = HermitianEigen::new(&free).unwrap().values();
        for k in 0..10 {
            assert!((hp[k] - hf[k]).abs() < 1e-6, "{k}: {} {}", hp[k], hf[k]);
        }
    }

    #[test]
    fn driven_displacement_form() {
        let p = IndependentBosonParams { drive: 0.3, ..Default::default() };
        let b = build_independent_boson(&p, &[10]).unwrap();
        let closed = rotated_system_energy_closed_form(&p, &[10]).unwrap();
        assert!(b.system_energy_at(0.0).max_diff(&closed) < 1e-10);
    }
}
