//! Two-level truncations of the dipole-mode model in the two gauges.

use super::{check_cutoff, check_nonnegative, check_positive, param, ModelBundle, ModelKind, OpFamily, Profile};
use crate::error::Result;
use crate::frames::FrameRotation;
use crate::operator::{boson, boson_projected, c64, hermitian_function, kron, qubit, Operator, CI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// Truncation performed in frame X.
    X2,
    /// Truncation performed in frame Y, expressed back in frame X through `R_2`.
    Y2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiParams {
    /// Two-level splitting.
    pub omega_m: f64,
    /// Mean of the two retained levels.
    pub delta: f64,
    pub omega: f64,
    /// `g / omega`.
    pub eta: f64,
    /// Coefficient of `(a + a^dag)^2` in the frame-X model; `eta^2 omega_m` when absent,
    /// the harmonic-dipole value.
    pub a2_coefficient: Option<f64>,
}

impl Default for RabiParams {
    fn default() -> Self {
        Self { omega_m: 1.0, delta: 0.0, omega: 1.0, eta: 0.1, a2_coefficient: None }
    }
}

impl RabiParams {
    pub fn g(&self) -> f64 {
        self.eta * self.omega
    }

    /// Coulomb-type coupling `d omega_m / sqrt(2 omega v)`, equal to `eta omega_m`.
    pub fn g_coulomb(&self) -> f64 {
        self.eta * self.omega_m
    }

    /// Dipole self-energy `d^2 / 2v`, equal to `eta^2 omega`.
    pub fn self_energy(&self) -> f64 {
        self.eta * self.eta * self.omega
    }

    pub fn a2(&self) -> f64 {
        self.a2_coefficient.unwrap_or(self.eta * self.eta * self.omega_m)
    }

    fn validate(&self) -> Result<()> {
        check_positive("omega_m", self.omega_m)?;
        check_positive("omega", self.omega)?;
        check_nonnegative("eta", self.eta)
    }
}

/// Operators of both truncated models on dims `[2, n_mode]`.
#[derive(Clone, Debug)]
pub struct RabiOperators {
    pub dims: Vec<usize>,
    /// `omega_m sz / 2 + delta` on the two-level factor.
    pub system_local: Operator,
    /// `omega (n + 1/2)` on the mode factor.
    pub bath_local: Operator,
    pub h2: Operator,
    pub h2_prime: Operator,
    /// `R_2 = exp(-i eta sx (a + a^dag))`.
    pub r2: Operator,
}

impl RabiOperators {
    pub fn new(p: &RabiParams, n_mode: usize) -> Result<Self> {
        p.validate()?;
        check_cutoff("mode", n_mode)?;
        let dims = vec![2, n_mode];
        let with = |o: Operator| o.with_dims(dims.clone());
        let s = qubit();
        let b = boson(n_mode, 1.0, p.omega)?;
        let x = &b.a + &b.adag;
        let x2 = boson_projected(n_mode, 1.0, p.omega, |o| {
            let x = &o.a + &o.adag;
            &x * &x
        })?;
        let h_a2 = &s.sz.scale_real(p.omega_m / 2.0) + &s.identity.scale_real(p.delta);
        let h_b = &b.n.scale_real(p.omega) + &b.identity.scale_real(p.omega / 2.0);
        let free = &with(kron(&h_a2, &b.identity))? + &with(kron(&s.identity, &h_b))?;

        let coulomb = with(kron(&(&s.sm - &s.sp), &x).scale(CI * p.g_coulomb()))?;
        let a2 = with(kron(&s.identity, &x2).scale_real(p.a2()))?;
        let h2 = &(&free + &coulomb) + &a2;

        let multipolar = with(kron(&s.sx, &(&b.adag - &b.a)).scale(CI * p.g()))?;
        let k = Operator::identity(&dims).scale_real(p.self_energy());
        let h2_prime = &(&free + &multipolar) + &k;

        let gen = with(kron(&s.sx, &x))?;
        let r2 = hermitian_function(&gen, |v| (CI * (-p.eta * v)).exp())?;
        Ok(Self { dims, system_local: h_a2, bath_local: h_b, h2, h2_prime, r2 })
    }

    /// `R_2 H_2 R_2^dag`, the frame-X model viewed from the other frame.
    pub fn h2_rotated(&self) -> Operator {
        &(&self.r2 * &self.h2) * &self.r2.dagger()
    }

    /// `R_2^dag H'_2 R_2`.
    pub fn h2_prime_rotated(&self) -> Operator {
        &(&self.r2.dagger() * &self.h2_prime) * &self.r2
    }

    /// `R_2^dag (H_A ⊗ I) R_2`.
    pub fn system_energy_frame_x(&self) -> Result<Operator> {
        let lifted = kron(&self.system_local, &Operator::identity(&[self.dims[1]])).with_dims(self.dims.clone())?;
        Ok(&(&self.r2.dagger() * &lifted) * &self.r2)
    }
}

/// `delta + omega_m/2 (sz cos(2 eta X) + sy sin(2 eta X))` with `X = a + a^dag` and the
/// standard `sy = i(s- - s+)`.
pub fn rotated_two_level_energy(p: &RabiParams, n_mode: usize) -> Result<Operator> {
    p.validate()?;
    check_cutoff("mode", n_mode)?;
    let s = qubit();
    let b = boson(n_mode, 1.0, p.omega)?;
    let x = &b.a + &b.adag;
    let cos = hermitian_function(&x, |v| c64::new((2.0 * p.eta * v).cos(), 0.0))?;
    let sin = hermitian_function(&x, |v| c64::new((2.0 * p.eta * v).sin(), 0.0))?;
    let body = &kron(&s.sz, &cos) + &kron(&s.sy, &sin);
    let dims = vec![2, n_mode];
    Ok(&body.scale_real(p.omega_m / 2.0).with_dims(dims.clone())? + &Operator::identity(&dims).scale_real(p.delta))
}

/// Static bundle in the requested gauge.
pub fn build_rabi(gauge: Gauge, p: &RabiParams, n_mode: usize) -> Result<ModelBundle> {
    let ops = RabiOperators::new(p, n_mode)?;
    let dims = ops.dims.clone();
    let bath_hamiltonian = kron(&Operator::identity(&[2]), &ops.bath_local).with_dims(dims.clone())?;
    let (kind, hamiltonian, system_energy) = match gauge {
        Gauge::X2 => (ModelKind::RabiX2, ops.h2.clone(), &ops.h2 - &bath_hamiltonian),
        Gauge::Y2 => {
            let e_a = ops.system_energy_frame_x()?;
            (ModelKind::RabiY2, &e_a + &bath_hamiltonian, e_a)
        }
    };
    let rotation = if p.eta == 0.0 { FrameRotation::identity(&dims) } else { FrameRotation::fixed(ops.r2.clone(), "R_2")? };
    let mut warnings = Vec::new();
    if p.eta != 0.0 {
        warnings.push("frame rotation is static and differs from the identity at t = 0".into());
    }
    Ok(ModelBundle {
        kind,
        dims,
        n_system: 1,
        profile: Profile::Constant(1.0),
        hamiltonian: OpFamily::constant(hamiltonian),
        system_energy: OpFamily::constant(system_energy),
        bath_energy: OpFamily::constant(bath_hamiltonian.clone()),
        bath_hamiltonian,
        bath_local: ops.bath_local,
        system_local: ops.system_local,
        bath_correction: None,
        rotation,
        params: vec![
            param("omega_m", p.omega_m, "frequency"),
            param("delta", p.delta, "energy"),
            param("omega", p.omega, "frequency"),
            param("eta", p.eta, "dimensionless"),
            param("g", p.g(), "frequency"),
            param("g_coulomb", p.g_coulomb(), "frequency"),
            param("a2_coefficient", p.a2(), "energy"),
            param("self_energy", p.self_energy(), "energy"),
        ],
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_gauges_coincide() {
        let p = RabiParams { eta: 0.0, ..Default::default() };
        let ops = RabiOperators::new(&p, 6).unwrap();
        assert!(ops.h2.max_diff(&ops.h2_prime) == 0.0);
        let x = build_rabi(Gauge::X2, &p, 6).unwrap();
        let y = build_rabi(Gauge::Y2, &p, 6).unwrap();
        assert!(x.hamiltonian_at(0.0).max_diff(&y.hamiltonian_at(0.0)) < 1e-12);
    }

    #[test]
    fn rotated_energy_closed_form() {
        let p = RabiParams { omega_m: 1.3, delta: 0.2, omega: 0.9, eta: 0.4, a2_coefficient: None };
        let ops = RabiOperators::new(&p, 10).unwrap();
        let closed = rotated_two_level_energy(&p, 10).unwrap();
        assert!(ops.system_energy_frame_x().unwrap().max_diff(&closed) < 1e-12);
    }

    #[test]
    fn gauges_agree_to_first_order() {
        let at = |eta: f64| {
            let ops = RabiOperators::new(&RabiParams { eta, ..Default::default() }, 8).unwrap();
            (&ops.h2_rotated() - &ops.h2_prime).frobenius_norm() / (eta * eta)
        };
        let (a, b) = (at(1e-2), at(1e-3));
        assert!(a / b < 2.0 && b / a < 2.0, "{a} {b}");
    }
}
