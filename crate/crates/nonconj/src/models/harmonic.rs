//! Harmonic dipole coupled to one cavity mode through a switched charge.

use super::{check_cutoff, check_positive, guard_dims, param, ModelBundle, ModelKind, OpFamily, Profile};
use crate::error::{Error, Result};
use crate::frames::FrameRotation;
use crate::operator::{boson, boson_projected, kron, Operator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicParams {
    pub mass: f64,
    pub omega_m: f64,
    pub omega: f64,
    pub eta: f64,
    pub volume: f64,
    pub t0: f64,
    pub s: f64,
}

impl Default for HarmonicParams {
    fn default() -> Self {
        Self { mass: 1.0, omega_m: 1.0, omega: 1.0, eta: 0.5, volume: 1.0, t0: 5.0, s: 1.0 }
    }
}

impl HarmonicParams {
    /// Charge `q = eta * omega * sqrt(m v)`.
    pub fn charge(&self) -> f64 {
        self.eta * self.omega * (self.mass * self.volume).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("mass", self.mass)?;
        check_positive("omega_m", self.omega_m)?;
        check_positive("omega", self.omega)?;
        check_positive("volume", self.volume)?;
        check_positive("s", self.s)?;
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(self.t0 >= 5.0 * self.s) {
            return Err(Error::InvalidParameter(format!(
                "switch centre t0 = {} must be at least 5 s = {} so the coupling starts negligibly small",
                self.t0,
                5.0 * self.s
            )));
        }
        Ok(())
    }
}

/// Switched dipole-mode bundle with cutoffs `(dipole, mode)`.
pub fn build_harmonic_dipole_mode(p: &HarmonicParams, cutoffs: (usize, usize)) -> Result<ModelBundle> {
    p.validate()?;
    build_harmonic_with_profile(p, Profile::switch(p.t0, p.s)?, cutoffs)
}

/// Same operator content with an arbitrary coupling profile.
pub fn build_harmonic_with_profile(p: &HarmonicParams, profile: Profile, cutoffs: (usize, usize)) -> Result<ModelBundle> {
    let (nd, nm) = cutoffs;
    check_cutoff("dipole", nd)?;
    check_cutoff("mode", nm)?;
    let dims = vec![nd, nm];
    guard_dims(&dims)?;
    let (m, wm, w, v) = (p.mass, p.omega_m, p.omega, p.volume);
    let q = p.charge();

    let dip = boson(nd, m, wm)?;
    let mode = boson(nm, v, w)?;
    let a_field = &mode.x;
    let pi_field = mode.p.scale_real(1.0 / v);
    let h_a = boson_projected(nd, m, wm, |b| &(&b.p * &b.p).scale_real(0.5 / m) + &(&b.x * &b.x).scale_real(0.5 * m * wm * wm))?;
    let r2 = boson_projected(nd, m, wm, |b| &b.x * &b.x)?;
    let a2 = boson_projected(nm, v, w, |b| &b.x * &b.x)?;
    let h_b = mode.n.scale_real(w);

    let with = |o: Operator| o.with_dims(dims.clone());
    let id_d = &dip.identity;
    let id_m = &mode.identity;
    let e_a0 = with(kron(&h_a, id_m))?;
    let e_a1 = with(kron(&dip.p, a_field).scale_real(-q / m))?;
    let e_a2 = with(kron(id_d, &a2).scale_real(q * q / (2.0 * m)))?;
    let system_energy = OpFamily::polynomial(vec![e_a0, e_a1, e_a2])?;
    let bath_hamiltonian = with(kron(id_d, &h_b))?;
    let bath_energy = OpFamily::constant(bath_hamiltonian.clone());
    let hamiltonian = system_energy.sum(&bath_energy)?;

    let generator = with(kron(&dip.x, a_field).scale_real(q))?;
    let rotation = FrameRotation::generated(generator, profile, "exp(-i c(t) q r A)")?;
    let correction = OpFamily::polynomial(vec![
        Operator::zeros(&dims),
        with(kron(&dip.x, &pi_field).scale_real(q))?,
        with(kron(&r2, id_m).scale_real(-q * q / (2.0 * v)))?,
    ])?;

    let mut params = vec![
        param("mass", m, "mass"),
        param("omega_m", wm, "frequency"),
        param("omega", w, "frequency"),
        param("eta", p.eta, "dimensionless"),
        param("volume", v, "volume"),
        param("charge", q, "charge"),
    ];
    if let Profile::Switch { t0, s, offset } = profile {
        params.push(param("t0", t0, "time"));
        params.push(param("s", s, "time"));
        params.push(param("switch_offset", offset, "dimensionless"));
    }
    Ok(ModelBundle {
        kind: ModelKind::Harmonic,
        dims,
        n_system: 1,
        profile,
        hamiltonian,
        system_energy,
        bath_energy,
        bath_hamiltonian,
        bath_local: h_b,
        system_local: h_a,
        bath_correction: Some(correction),
        rotation,
        params,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_decouples() {
        let p = HarmonicParams { eta: 0.0, ..Default::default() };
        let b = build_harmonic_dipole_mode(&p, (6, 5)).unwrap();
        assert_eq!(b.coupling(0.0), 0.0);
        let h = b.hamiltonian_at(17.0);
        let free = &kron(&b.system_local, &Operator::identity(&[5])).with_dims(vec![6, 5]).unwrap() + &b.bath_hamiltonian;
        assert!(h.max_diff(&free) == 0.0);
        assert!(b.rotation.at(20.0).max_diff(&Operator::identity(&[6, 5])) < 1e-15);
    }

    #[test]
    fn decomposition_and_start() {
        let b = build_harmonic_dipole_mode(&HarmonicParams::default(), (5, 5)).unwrap();
        for t in [0.0, 3.0, 5.0, 9.0, 40.0] {
            assert!(b.decomposition_residual(t) < 1e-12);
        }
        assert_eq!(b.coupling(0.0), 0.0);
        assert!(b.rotation.is_identity_at(0.0));
        let bad = HarmonicParams { t0: 2.0, ..Default::default() };
        assert!(build_harmonic_dipole_mode(&bad, (4, 4)).is_err());
    }

    #[test]
    fn bath_correction_closed_form_on_low_levels() {
        let mut errs = Vec::new();
        for n in [12, 18, 24, 30] {
            let b = build_harmonic_dipole_mode(&HarmonicParams::default(), (n, n)).unwrap();
            let diff = &b.delta_bath_numeric(12.0) - &b.delta_bath_closed_form(12.0).unwrap();
            let mut worst = 0.0f64;
            for i in 0..n * n {
                for j in 0..n * n {
                    if i / n < 4 && i % n < 4 && j / n < 4 && j % n < 4 {
                        worst = worst.max(diff.get(i, j).norm());
                    }
                }
            }
            errs.push(worst);
        }
        assert!(errs[0] > errs[2] && errs[2] < 1e-12, "{errs:?}");
    }
}
