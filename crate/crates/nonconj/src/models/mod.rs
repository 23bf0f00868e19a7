//! Concrete light-matter and system-bath models on truncated composite spaces.
//!
//! Every bundle is expressed in frame X. System factors lead, bath factors trail.

pub mod caldeira_leggett;
pub mod harmonic;
pub mod independent_boson;
pub mod jc;
pub mod rabi;
pub mod switching;

pub use caldeira_leggett::{build_caldeira_leggett, BathOscillator, CaldeiraLeggettParams};
pub use harmonic::{build_harmonic_dipole_mode, HarmonicParams};
pub use independent_boson::{build_independent_boson, displacement, BosonMode, IndependentBosonParams};
pub use jc::{build_jaynes_cummings, JcParams};
pub use rabi::{build_rabi, rotated_two_level_energy, Gauge, RabiOperators, RabiParams};
pub use switching::{switching_function, Profile};

use crate::dynamics::Hamiltonian;
use crate::error::{Error, Result};
use crate::frames::{lift_leading, lift_trailing, FrameRotation};
use crate::operator::{kron_states, thermal_state, DensityOperator, Operator};

/// Largest composite dimension any builder accepts.
pub const MAX_DIM: usize = 4096;

pub(crate) fn guard_dims(dims: &[usize]) -> Result<()> {
    let dim = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if dim > MAX_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_DIM });
    }
    Ok(())
}

pub(crate) fn check_cutoff(name: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cutoff {name} must be >= 2, got {n}")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {x}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Harmonic,
    JaynesCummings,
    RabiX2,
    RabiY2,
    CaldeiraLeggett,
    IndependentBoson,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Harmonic => "harmonic",
            ModelKind::JaynesCummings => "jaynes_cummings",
            ModelKind::RabiX2 => "rabi_x2",
            ModelKind::RabiY2 => "rabi_y2",
            ModelKind::CaldeiraLeggett => "caldeira_leggett",
            ModelKind::IndependentBoson => "independent_boson",
        }
    }
}

/// Polynomial operator family `sum_k lambda^k O_k` in the coupling value lambda.
#[derive(Clone, Debug)]
pub struct OpFamily {
    terms: Vec<Operator>,
}

impl OpFamily {
    pub fn constant(o: Operator) -> Self {
        Self { terms: vec![o] }
    }

    pub fn polynomial(terms: Vec<Operator>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidParameter("empty operator family".into()));
        };
        for t in &terms {
            if t.dims() != first.dims() {
                return Err(Error::Dimension(format!("family term dims {:?} vs {:?}", t.dims(), first.dims())));
            }
        }
        Ok(Self { terms })
    }

    pub fn dims(&self) -> &[usize] {
        self.terms[0].dims()
    }

    pub fn terms(&self) -> &[Operator] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn eval(&self, lambda: f64) -> Operator {
        let mut out = self.terms[0].clone();
        let mut pow = 1.0;
        for t in &self.terms[1..] {
            pow *= lambda;
            if pow != 0.0 {
                out.add_scaled(crate::operator::c64::new(pow, 0.0), t);
            }
        }
        out
    }

    pub fn sum(&self, rhs: &OpFamily) -> Result<OpFamily> {
        let n = self.terms.len().max(rhs.terms.len());
        let zero = Operator::zeros(self.dims());
        let terms = (0..n)
            .map(|k| self.terms.get(k).unwrap_or(&zero).try_add(rhs.terms.get(k).unwrap_or(&zero)))
            .collect::<Result<Vec<_>>>()?;
        OpFamily::polynomial(terms)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: f64,
    pub unit: &'static str,
}

pub(crate) fn param(name: &str, value: f64, unit: &'static str) -> Param {
    Param { name: name.into(), value, unit }
}

/// Operator families of one model, all in frame X.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub kind: ModelKind,
    pub dims: Vec<usize>,
    pub n_system: usize,
    pub profile: Profile,
    /// Total energy H(t).
    pub hamiltonian: OpFamily,
    /// Energy of the physical system, E_A'(t).
    pub system_energy: OpFamily,
    /// Energy of the physical bath, E_B(t).
    pub bath_energy: OpFamily,
    /// Composite `I ⊗ h_B`.
    pub bath_hamiltonian: Operator,
    /// Bath Hamiltonian `h_B` on the bath factors alone.
    pub bath_local: Operator,
    /// System energy on the system factors as represented in frame Y.
    pub system_local: Operator,
    /// Closed-form `H_B - R^dag H_B R` when the model provides one.
    pub bath_correction: Option<OpFamily>,
    pub rotation: FrameRotation,
    pub params: Vec<Param>,
    pub warnings: Vec<String>,
}

impl ModelBundle {
    pub fn coupling(&self, t: f64) -> f64 {
        self.profile.value(t)
    }

    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        self.hamiltonian.eval(self.coupling(t))
    }

    pub fn system_energy_at(&self, t: f64) -> Operator {
        self.system_energy.eval(self.coupling(t))
    }

    pub fn bath_energy_at(&self, t: f64) -> Operator {
        self.bath_energy.eval(self.coupling(t))
    }

    /// `H_B - R(t)^dag H_B R(t)` evaluated numerically.
    pub fn delta_bath_numeric(&self, t: f64) -> Operator {
        let rotated = self.rotation.to_frame_x(&self.bath_hamiltonian, t);
        &self.bath_hamiltonian - &rotated
    }

    pub fn delta_bath_closed_form(&self, t: f64) -> Option<Operator> {
        self.bath_correction.as_ref().map(|f| f.eval(self.coupling(t)))
    }

    pub fn system_factors(&self) -> Vec<usize> {
        (0..self.n_system).collect()
    }

    pub fn bath_factors(&self) -> Vec<usize> {
        (self.n_system..self.dims.len()).collect()
    }

    pub fn system_dims(&self) -> &[usize] {
        &self.dims[..self.n_system]
    }

    pub fn bath_dims(&self) -> &[usize] {
        &self.dims[self.n_system..]
    }

    pub fn bath_thermal(&self, beta: f64) -> Result<DensityOperator> {
        thermal_state(&self.bath_local, beta)
    }

    pub fn system_thermal(&self, gamma: f64) -> Result<DensityOperator> {
        thermal_state(&self.system_local, gamma)
    }

    /// `rho_A ⊗ rho_B` with factor dims restored.
    pub fn product_state(&self, rho_a: &DensityOperator, rho_b: &DensityOperator) -> Result<DensityOperator> {
        if rho_a.dims() != self.system_dims() || rho_b.dims() != self.bath_dims() {
            return Err(Error::Dimension(format!(
                "product of {:?} and {:?} does not give {:?}",
                rho_a.dims(),
                rho_b.dims(),
                self.dims
            )));
        }
        let k = kron_states(rho_a, rho_b);
        Ok(DensityOperator::new_unchecked(k.into_op().with_dims(self.dims.clone())?))
    }

    /// Thermal system state at inverse temperature `gamma` times thermal bath at `beta`.
    pub fn thermal_product(&self, gamma: f64, beta: f64) -> Result<DensityOperator> {
        self.product_state(&self.system_thermal(gamma)?, &self.bath_thermal(beta)?)
    }

    pub fn lift_system(&self, local: &Operator) -> Result<Operator> {
        lift_leading(local, &self.dims)
    }

    pub fn lift_bath(&self, local: &Operator) -> Result<Operator> {
        lift_trailing(local, &self.dims)
    }

    /// Largest bare frequency, used for the default time step.
    pub fn omega_max(&self) -> f64 {
        let mut w = 0.0f64;
        for p in &self.params {
            if p.unit == "frequency" {
                w = w.max(p.value.abs());
            }
        }
        if w > 0.0 {
            w
        } else {
            1.0
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    /// max |H - E_A' - E_B| at time t.
    pub fn decomposition_residual(&self, t: f64) -> f64 {
        let h = self.hamiltonian_at(t);
        let s = &self.system_energy_at(t) + &self.bath_energy_at(t);
        h.max_diff(&s)
    }

    pub fn as_hamiltonian(&self) -> BundleHamiltonian<'_> {
        BundleHamiltonian(self)
    }
}

/// Dynamics view of a bundle; cache keys follow the coupling value.
pub struct BundleHamiltonian<'a>(&'a ModelBundle);

impl Hamiltonian for BundleHamiltonian<'_> {
    fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    fn at(&self, t: f64) -> Operator {
        self.0.hamiltonian_at(t)
    }

    fn cache_key(&self, t: f64) -> Option<u64> {
        if self.0.hamiltonian.is_constant() {
            Some(0)
        } else {
            Some(self.0.coupling(t).to_bits())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_evaluation() {
        let a = Operator::diagonal(&[1.0, 2.0], &[2]);
        let b = Operator::diagonal(&[0.5, -1.0], &[2]);
        let c = Operator::diagonal(&[0.0, 3.0], &[2]);
        let f = OpFamily::polynomial(vec![a.clone(), b, c]).unwrap();
        let v = f.eval(2.0);
        assert!(v.max_diff(&Operator::diagonal(&[2.0, 12.0], &[2])) < 1e-15);
        assert!(f.eval(0.0).max_diff(&a) == 0.0);
        let g = OpFamily::constant(a.clone()).sum(&f).unwrap();
        assert!(g.eval(1.0).max_diff(&Operator::diagonal(&[2.5, 6.0], &[2])) < 1e-15);
    }

    #[test]
    fn dimension_guard() {
        assert!(guard_dims(&[64, 64]).is_ok());
        assert!(matches!(guard_dims(&[64, 65]), Err(Error::DimensionGuard { .. })));
    }
}
