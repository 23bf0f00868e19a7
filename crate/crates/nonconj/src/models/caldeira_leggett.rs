//! Particle in a potential coupled to a finite bath of oscillators.

use super::{check_cutoff, check_positive, guard_dims, param, ModelBundle, ModelKind, OpFamily, Profile};
use crate::error::{Error, Result};
use crate::frames::FrameRotation;
use crate::operator::{boson, boson_projected, c64, embed, BosonOps, Operator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathOscillator {
    pub mass: f64,
    pub omega: f64,
    /// Coupling `kappa_n` in `(r_n - kappa_n r_A)^2`.
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaldeiraLeggettParams {
    pub mass: f64,
    /// Curvature of the potential, `theta(r) = m omega_a^2 r^2 / 2 + quartic r^4`.
    pub omega_a: f64,
    pub quartic: f64,
    pub bath: Vec<BathOscillator>,
}

impl Default for CaldeiraLeggettParams {
    fn default() -> Self {
        Self { mass: 1.0, omega_a: 1.0, quartic: 0.0, bath: vec![BathOscillator { mass: 1.0, omega: 1.0, kappa: 0.2 }] }
    }
}

/// Local operators of the model in frame Y, before any rotation.
#[derive(Clone, Debug)]
pub struct CaldeiraLeggettOperators {
    pub dims: Vec<usize>,
    pub system: BosonOps,
    pub bath: Vec<BosonOps>,
    /// `p^2/2m + theta(r)` on the system factor.
    pub system_local: Operator,
    /// `sum_n h_n` on the bath factors.
    pub bath_local: Operator,
    pub h_cl: Operator,
    /// `⊗_n exp(i pi n_n / 2)` on the bath, identity on the system.
    pub fourier: Operator,
    pub h_prime: Operator,
    /// Generator `G = -sum_n m_n omega_n kappa_n r_A r_n`, so `R = exp(-i G)`.
    pub generator: Operator,
}

fn oscillator(n: usize, m: f64, w: f64) -> Result<Operator> {
    boson_projected(n, m, w, |b| &(&b.p * &b.p).scale_real(0.5 / m) + &(&b.x * &b.x).scale_real(0.5 * m * w * w))
}

impl CaldeiraLeggettOperators {
    pub fn new(p: &CaldeiraLeggettParams, cutoffs: &[usize]) -> Result<Self> {
        check_positive("mass", p.mass)?;
        check_positive("omega_a", p.omega_a)?;
        if p.bath.is_empty() {
            return Err(Error::InvalidParameter("bath needs at least one oscillator".into()));
        }
        if cutoffs.len() != p.bath.len() + 1 {
            return Err(Error::InvalidParameter(format!("expected {} cutoffs (system then bath), got {}", p.bath.len() + 1, cutoffs.len())));
        }
        for (i, &n) in cutoffs.iter().enumerate() {
            check_cutoff(&format!("factor {i}"), n)?;
        }
        for o in &p.bath {
            check_positive("bath mass", o.mass)?;
            check_positive("bath omega", o.omega)?;
        }
        let dims = cutoffs.to_vec();
        guard_dims(&dims)?;
        let (m, wa, g4) = (p.mass, p.omega_a, p.quartic);
        let system = boson(cutoffs[0], m, wa)?;
        let system_local = boson_projected(cutoffs[0], m, wa, |b| {
            let x2 = &b.x * &b.x;
            &(&(&b.p * &b.p).scale_real(0.5 / m) + &x2.scale_real(0.5 * m * wa * wa)) + &(&x2 * &x2).scale_real(g4)
        })?;
        let ra2 = boson_projected(cutoffs[0], m, wa, |b| &b.x * &b.x)?;
        let bath: Vec<BosonOps> = p.bath.iter().zip(&cutoffs[1..]).map(|(o, &n)| boson(n, o.mass, o.omega)).collect::<Result<_>>()?;

        let mut h_cl = embed(&system_local, 0, &dims)?;
        let mut generator = Operator::zeros(&dims);
        let mut bath_total = Operator::zeros(&dims);
        let ra = embed(&system.x, 0, &dims)?;
        let ra2 = embed(&ra2, 0, &dims)?;
        let mut fourier = Operator::identity(&[1]);
        for (k, (o, ops)) in p.bath.iter().zip(&bath).enumerate() {
            let f = k + 1;
            let h_n = embed(&oscillator(ops.cutoff, o.mass, o.omega)?, f, &dims)?;
            let rn = embed(&ops.x, f, &dims)?;
            let k2 = o.mass * o.omega * o.omega;
            let cross = &ra * &rn;
            h_cl = &h_cl + &h_n;
            h_cl = &h_cl + &cross.scale_real(-k2 * o.kappa);
            h_cl = &h_cl + &ra2.scale_real(0.5 * k2 * o.kappa * o.kappa);
            bath_total = &bath_total + &h_n;
            generator = &generator + &cross.scale_real(-o.mass * o.omega * o.kappa);
            let phases: Vec<c64> =
                (0..ops.cutoff).map(|n| c64::new(0.0, std::f64::consts::FRAC_PI_2 * n as f64).exp()).collect();
            let s_n = Operator::from_fn(&[ops.cutoff], |i, j| if i == j { phases[i] } else { c64::new(0.0, 0.0) });
            fourier = crate::operator::kron(&fourier, &s_n);
        }
        let fourier = crate::operator::kron(&Operator::identity(&[cutoffs[0]]), &fourier).with_dims(dims.clone())?;
        let h_prime = &(&fourier * &h_cl) * &fourier.dagger();
        let bath_local = crate::operator::partial_trace(&bath_total, &(1..dims.len()).collect::<Vec<_>>())?.scale_real(1.0 / cutoffs[0] as f64);
        Ok(Self { dims, system, bath, system_local, bath_local, h_cl, fourier, h_prime, generator })
    }
}

/// Static bundle in frame X, where each bath oscillator carries its mechanical momentum.
pub fn build_caldeira_leggett(p: &CaldeiraLeggettParams, cutoffs: &[usize]) -> Result<ModelBundle> {
    let ops = CaldeiraLeggettOperators::new(p, cutoffs)?;
    let dims = ops.dims.clone();
    let decoupled = p.bath.iter().all(|o| o.kappa == 0.0);
    let rotation = if decoupled {
        FrameRotation::identity(&dims)
    } else {
        FrameRotation::generated(ops.generator.clone(), Profile::Constant(1.0), "exp(i sum m_n w_n kappa_n r_A r_n)")?
    };
    let system_y = embed(&ops.system_local, 0, &dims)?;
    let bath_y = &ops.h_prime - &system_y;
    let system_energy = rotation.to_frame_x(&system_y, 0.0);
    let bath_energy = rotation.to_frame_x(&bath_y, 0.0);
    let hamiltonian = &system_energy + &bath_energy;
    let bath_hamiltonian = crate::frames::lift_trailing(&ops.bath_local, &dims)?;
    let mut params = vec![
        param("mass", p.mass, "mass"),
        param("omega_a", p.omega_a, "frequency"),
        param("quartic", p.quartic, "energy/length^4"),
    ];
    for (k, o) in p.bath.iter().enumerate() {
        params.push(param(&format!("bath{k}_mass"), o.mass, "mass"));
        params.push(param(&format!("bath{k}_omega"), o.omega, "frequency"));
        params.push(param(&format!("bath{k}_kappa"), o.kappa, "dimensionless"));
    }
    let mut warnings = Vec::new();
    if !decoupled {
        warnings.push("frame rotation is static and differs from the identity at t = 0".into());
    }
    Ok(ModelBundle {
        kind: ModelKind::CaldeiraLeggett,
        dims,
        n_system: 1,
        profile: Profile::Constant(1.0),
        hamiltonian: OpFamily::constant(hamiltonian),
        system_energy: OpFamily::constant(system_energy),
        bath_energy: OpFamily::constant(bath_energy),
        bath_hamiltonian,
        bath_local: ops.bath_local,
        system_local: ops.system_local,
        bath_correction: None,
        rotation,
        params,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn low_block_diff(a: &Operator, b: &Operator, dims: &[usize], keep: usize) -> f64 {
        let d: usize = dims.iter().product();
        let low = |i: usize| crate::operator::digits(i, dims).iter().all(|&x| x < keep);
        let mut worst = 0.0f64;
        for i in (0..d).filter(|&i| low(i)) {
            for j in (0..d).filter(|&j| low(j)) {
                worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
            }
        }
        worst
    }

    #[test]
    fn decoupled_bath() {
        let p = CaldeiraLeggettParams { bath: vec![BathOscillator { mass: 1.0, omega: 1.3, kappa: 0.0 }], ..Default::default() };
        let b = build_caldeira_leggett(&p, &[5, 5]).unwrap();
        assert!(b.rotation.is_identity_at(0.0));
        let free = &embed(&b.system_local, 0, &b.dims).unwrap() + &b.bath_hamiltonian;
        assert!(b.hamiltonian_at(0.0).max_diff(&free) < 1e-12);
    }

    #[test]
    fn fourier_phase_preserves_oscillator() {
        let ops = CaldeiraLeggettOperators::new(&CaldeiraLeggettParams::default(), &[4, 7]).unwrap();
        let h = embed(&oscillator(7, 1.0, 1.0).unwrap(), 1, &ops.dims).unwrap();
        let s = &ops.fourier;
        assert!((&(s * &h) * &s.dagger()).max_diff(&h) < 1e-12);
        // x -> p / (m w) exactly on the truncated space
        let x = embed(&ops.bath[0].x, 1, &ops.dims).unwrap();
        let p = embed(&ops.bath[0].p, 1, &ops.dims).unwrap();
        assert!((&(s * &x) * &s.dagger()).max_diff(&p) < 1e-12);
    }

    #[test]
    fn mechanical_momentum_identity() {
        let p = CaldeiraLeggettParams { bath: vec![BathOscillator { mass: 1.0, omega: 1.0, kappa: 0.3 }], ..Default::default() };
        let c = 0.3;
        let mut errs = Vec::new();
        for n in [10, 14, 18] {
            let ops = CaldeiraLeggettOperators::new(&p, &[n, n]).unwrap();
            let r = FrameRotation::generated(ops.generator.clone(), Profile::Constant(1.0), "R").unwrap().at(0.0);
            let pn = embed(&ops.bath[0].p, 1, &ops.dims).unwrap();
            let ra = embed(&ops.system.x, 0, &ops.dims).unwrap();
            let lhs = &(&r * &pn) * &r.dagger();
            let rhs = &pn - &ra.scale_real(c);
            errs.push(low_block_diff(&lhs, &rhs, &ops.dims, 5));
        }
        assert!(errs[2] < errs[0] && errs[2] < 1e-6, "{errs:?}");
    }

    #[test]
    fn bath_energy_in_frame_x_is_local() {
        let p = CaldeiraLeggettParams::default();
        let b = build_caldeira_leggett(&p, &[16, 16]).unwrap();
        assert!(low_block_diff(&b.bath_energy_at(0.0), &b.bath_hamiltonian, &b.dims, 6) < 1e-6);
        assert!(b.decomposition_residual(0.0) < 1e-12);
        assert!(matches!(build_caldeira_leggett(&p, &[65, 64]), Err(Error::DimensionGuard { .. })));
    }
}
