//! Unitary propagation of frame-X states under a time-dependent Hamiltonian.

use crate::error::{Error, Result};
use crate::operator::{c64, BlockMatrix, DensityOperator, HermitianEigen, Operator, HERMITIAN_TOL};

/// Time-dependent Hermitian generator.
pub trait Hamiltonian: Sync {
    fn dims(&self) -> &[usize];

    fn at(&self, t: f64) -> Operator;

    /// Equal keys at two times promise equal operators, which lets the propagator
    /// reuse the step unitary.
    fn cache_key(&self, _t: f64) -> Option<u64> {
        None
    }
}

/// Time-independent Hamiltonian.
#[derive(Clone, Debug)]
pub struct Static(pub Operator);

impl Hamiltonian for Static {
    fn dims(&self) -> &[usize] {
        self.0.dims()
    }

    fn at(&self, _t: f64) -> Operator {
        self.0.clone()
    }

    fn cache_key(&self, _t: f64) -> Option<u64> {
        Some(0)
    }
}

/// Hamiltonian given by a closure.
pub struct FnHamiltonian<F> {
    dims: Vec<usize>,
    f: F,
}

impl<F: Fn(f64) -> Operator + Sync> FnHamiltonian<F> {
    pub fn new(dims: &[usize], f: F) -> Self {
        Self { dims: dims.to_vec(), f }
    }
}

impl<F: Fn(f64) -> Operator + Sync> Hamiltonian for FnHamiltonian<F> {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn at(&self, t: f64) -> Operator {
        (self.f)(t)
    }
}

/// Uniform grid on [0, t_end] with `steps` intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub t_end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("grid needs at least one step".into()));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_end must be finite and >= 0, got {t_end}")));
        }
        Ok(Self { t_end, steps })
    }

    /// `steps_per_period` steps per period 2π/omega_max, rounded up to cover `t_end`.
    pub fn per_period(t_end: f64, steps_per_period: usize, omega_max: f64) -> Result<Self> {
        if steps_per_period == 0 || !(omega_max > 0.0) {
            return Err(Error::InvalidParameter("steps per period and frequency must be positive".into()));
        }
        let period = 2.0 * std::f64::consts::PI / omega_max;
        let steps = ((t_end / period) * steps_per_period as f64).ceil().max(1.0) as usize;
        Self::new(t_end, steps)
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_end
        } else {
            k as f64 * self.dt()
        }
    }

    /// Step indices recorded with the given stride; the final step is always included.
    pub fn sample_steps(&self, stride: usize) -> Vec<usize> {
        let stride = stride.max(1);
        let mut v: Vec<usize> = (0..=self.steps).step_by(stride).collect();
        if *v.last().unwrap() != self.steps {
            v.push(self.steps);
        }
        v
    }
}

/// Sampled frame-X states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn step_unitary(h: &Operator, dt: f64) -> Result<BlockMatrix> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let eig = HermitianEigen::of_matrix(h.mat())?;
    Ok(eig.map_blocks(|e| c64::new(0.0, -e * dt).exp()))
}

/// Midpoint exponential stepping `rho <- U rho U^dag`, `U = exp(-i H(t_k + dt/2) dt)`.
///
/// `observe(step, t, rho)` is called at step 0, at every multiple of `stride` and at the
/// final step.
pub fn propagate_with<H, F>(h: &H, rho0: &DensityOperator, grid: Grid, stride: usize, mut observe: F) -> Result<()>
where
    H: Hamiltonian + ?Sized,
    F: FnMut(usize, f64, &DensityOperator) -> Result<()>,
{
    if h.dims() != rho0.dims() {
        return Err(Error::Dimension(format!("Hamiltonian dims {:?} vs state dims {:?}", h.dims(), rho0.dims())));
    }
    let stride = stride.max(1);
    let dt = grid.dt();
    let dims = rho0.dims().to_vec();
    let mut rho = rho0.clone();
    observe(0, 0.0, &rho)?;
    let mut cached: Option<(u64, BlockMatrix)> = None;
    for k in 0..grid.steps {
        let tm = (k as f64 + 0.5) * dt;
        let key = h.cache_key(tm);
        let reuse = matches!((&cached, key), (Some((c, _)), Some(k2)) if *c == k2);
        if !reuse {
            let u = step_unitary(&h.at(tm), dt)?;
            cached = Some((key.unwrap_or(u64::MAX), u));
        }
        let u = &cached.as_ref().unwrap().1;
        let next = u.conjugate(rho.op().mat());
        rho = DensityOperator::new_unchecked(Operator::from_parts(next, dims.clone()));
        if (k + 1) % stride == 0 || k + 1 == grid.steps {
            observe(k + 1, grid.time(k + 1), &rho)?;
        }
    }
    Ok(())
}

pub fn propagate<H: Hamiltonian + ?Sized>(h: &H, rho0: &DensityOperator, grid: Grid, stride: usize) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    propagate_with(h, rho0, grid, stride, |_, t, rho| {
        times.push(t);
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(Trajectory { times, states })
}

/// Imaginary residue allowed when an expectation of a Hermitian operator is taken.
pub const IMAG_TOL: f64 = 1e-9;

/// `tr(rho(t) O(t))` along a trajectory.
pub fn expectation_trajectory(traj: &Trajectory, o: impl Fn(f64) -> Operator) -> Result<Vec<f64>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| {
            let op = o(t);
            if op.dims() != rho.dims() {
                return Err(Error::Dimension(format!("observable dims {:?} vs state dims {:?}", op.dims(), rho.dims())));
            }
            let v = op.expectation(rho.op());
            if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
                return Err(Error::NotHermitian(v.im.abs()));
            }
            Ok(v.re)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{kron, qubit, thermal_state};

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let rho = thermal_state(&Operator::diagonal(&[0.0, 0.3, 1.0], &[3]), 1.0).unwrap();
        let tr = propagate(&Static(Operator::zeros(&[3])), &rho, Grid::new(2.0, 10).unwrap(), 1).unwrap();
        assert_eq!(tr.len(), 11);
        for s in &tr.states {
            assert!(s.op().max_diff(rho.op()) < 1e-15);
        }
    }

    #[test]
    fn rabi_oscillation() {
        let q = qubit();
        let omega = 1.3;
        let h = q.sx.scale_real(omega / 2.0);
        let g = DensityOperator::new(Operator::diagonal(&[0.0, 1.0], &[2])).unwrap();
        let period = 2.0 * std::f64::consts::PI / omega;
        let grid = Grid::new(2.0 * period, 2000).unwrap();
        let tr = propagate(&Static(h), &g, grid, 50).unwrap();
        let pe = expectation_trajectory(&tr, |_| Operator::diagonal(&[1.0, 0.0], &[2])).unwrap();
        for (t, p) in tr.times.iter().zip(pe) {
            assert!((p - (omega * t / 2.0).sin().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn time_dependent_drive_conserves_purity_and_converges() {
        let q = qubit();
        let dims = [2, 2];
        let h = FnHamiltonian::new(&dims, |t: f64| {
            let a = kron(&q.sz, &q.identity);
            let b = kron(&q.sx, &q.sx).scale_real((0.7 * t).sin());
            Operator::new(a.try_add(&b).unwrap().into_mat(), dims.to_vec()).unwrap()
        });
        let psi = [c64::new(0.6, 0.0), c64::new(0.0, 0.8), c64::new(0.0, 0.0), c64::new(0.0, 0.0)];
        let rho = DensityOperator::pure(&psi, &dims);
        let obs = |t: f64| h.at(t);
        let run = |n| {
            let tr = propagate(&h, &rho, Grid::new(3.0, n).unwrap(), n / 10).unwrap();
            for s in &tr.states {
                assert!((s.purity() - 1.0).abs() < 1e-12);
            }
            expectation_trajectory(&tr, obs).unwrap()
        };
        let (a, b, c) = (run(100), run(200), run(400));
        let d1 = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let d2 = b.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d1 / d2 > 2.5);
    }

    #[test]
    fn grid_sampling() {
        let g = Grid::new(1.0, 10).unwrap();
        assert_eq!(g.sample_steps(3), vec![0, 3, 6, 9, 10]);
        assert_eq!(g.time(10), 1.0);
        assert!(Grid::new(1.0, 0).is_err());
        let p = Grid::per_period(4.0 * std::f64::consts::PI, 200, 1.0).unwrap();
        assert_eq!(p.steps, 400);
    }
}
