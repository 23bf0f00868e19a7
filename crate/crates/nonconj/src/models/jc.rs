//! Resonant two-level dipole in one mode with rotating-wave coupling.

use super::{check_cutoff, check_nonnegative, check_positive, param, ModelBundle, ModelKind, OpFamily, Profile};
use crate::error::Result;
use crate::frames::FrameRotation;
use crate::operator::{boson, hermitian_function, kron, qubit, Operator, CI};

/// Coupling ratio above which the weak-coupling assumption is flagged.
pub const WEAK_COUPLING_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcParams {
    pub omega: f64,
    /// `g / omega`.
    pub eta: f64,
}

impl Default for JcParams {
    fn default() -> Self {
        Self { omega: 1.0, eta: 0.01 }
    }
}

/// Static bundle on dims `[2, n_mode]`.
///
/// `H = omega (n + sz/2) + i g (a^dag s- - a s+)` and
/// `R = exp(-i eta (a^dag s- + a s+))`.
pub fn build_jaynes_cummings(p: &JcParams, n_mode: usize) -> Result<ModelBundle> {
    check_positive("omega", p.omega)?;
    check_nonnegative("eta", p.eta)?;
    check_cutoff("mode", n_mode)?;
    let dims = vec![2, n_mode];
    let with = |o: Operator| o.with_dims(dims.clone());
    let s = qubit();
    let b = boson(n_mode, 1.0, p.omega)?;
    let g = p.eta * p.omega;

    let h_a = s.sz.scale_real(p.omega / 2.0);
    let h_b = b.n.scale_real(p.omega);
    let exchange = with(&kron(&s.sm, &b.adag) + &kron(&s.sp, &b.a))?;
    let interaction = with((&kron(&s.sm, &b.adag) - &kron(&s.sp, &b.a)).scale(CI * g))?;
    let bath_hamiltonian = with(kron(&s.identity, &h_b))?;
    let system_energy = &with(kron(&h_a, &b.identity))? + &interaction;
    let hamiltonian = &system_energy + &bath_hamiltonian;

    let rotation = if p.eta == 0.0 {
        FrameRotation::identity(&dims)
    } else {
        let r = hermitian_function(&exchange, |x| (CI * (-p.eta * x)).exp())?;
        FrameRotation::fixed(r, "exp(-i eta (a^dag s- + a s+))")?
    };
    let mut warnings = Vec::new();
    if p.eta > WEAK_COUPLING_LIMIT {
        warnings.push(format!("eta = {} exceeds the weak-coupling range (<= {WEAK_COUPLING_LIMIT})", p.eta));
    }
    if p.eta != 0.0 {
        warnings.push("frame rotation is static and differs from the identity at t = 0".into());
    }
    Ok(ModelBundle {
        kind: ModelKind::JaynesCummings,
        dims,
        n_system: 1,
        profile: Profile::Constant(1.0),
        hamiltonian: OpFamily::constant(hamiltonian),
        system_energy: OpFamily::constant(system_energy),
        bath_energy: OpFamily::constant(bath_hamiltonian.clone()),
        bath_hamiltonian,
        bath_local: h_b,
        system_local: h_a,
        bath_correction: None,
        rotation,
        params: vec![param("omega", p.omega, "frequency"), param("eta", p.eta, "dimensionless"), param("g", g, "frequency")],
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{conjugate_reduced, nonconjugate_reduced};
    use crate::operator::{c64, DensityOperator};

    fn system_state(pg: f64, peg: c64) -> DensityOperator {
        // basis order (e, g)
        DensityOperator::new(Operator::from_fn(&[2], |i, j| match (i, j) {
            (0, 0) => c64::new(1.0 - pg, 0.0),
            (1, 1) => c64::new(pg, 0.0),
            (0, 1) => peg,
            _ => peg.conj(),
        }))
        .unwrap()
    }

    #[test]
    fn zero_coupling_is_conjugate() {
        let b = build_jaynes_cummings(&JcParams { omega: 1.0, eta: 0.0 }, 4).unwrap();
        let vac = DensityOperator::new(Operator::diagonal(&[1.0, 0.0, 0.0, 0.0], &[4])).unwrap();
        let rho = b.product_state(&system_state(0.3, c64::new(0.2, 0.1)), &vac).unwrap();
        let a = nonconjugate_reduced(&rho, &b.rotation, 0.0, &[0]).unwrap();
        assert!(a.op().max_diff(conjugate_reduced(&rho, &[0]).unwrap().op()) == 0.0);
        assert!(b.warnings.is_empty());
    }

    #[test]
    fn vacuum_population_map() {
        let eta = 0.3;
        let b = build_jaynes_cummings(&JcParams { omega: 1.0, eta }, 5).unwrap();
        let vac = DensityOperator::new(Operator::diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0], &[5])).unwrap();
        let rho = b.product_state(&system_state(0.25, c64::new(0.1, -0.2)), &vac).unwrap();
        let a = nonconjugate_reduced(&rho, &b.rotation, 0.0, &[0]).unwrap();
        assert!((a.op().get(1, 1).re - (0.25 + 0.75 * eta.sin().powi(2))).abs() < 1e-12);
        assert!((a.op().get(0, 1) - c64::new(0.1, -0.2) * eta.cos()).norm() < 1e-12);
        assert!(b.decomposition_residual(0.0) == 0.0);
    }
}
