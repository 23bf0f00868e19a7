//! First and second moments of Gaussian states under quadratic Hamiltonians.
//!
//! Quadratures are ordered `(x_1, p_1, x_2, p_2, ..)` with `[x_k, p_k] = i`. The
//! covariance is `sigma_ij = <{dz_i, dz_j}>/2`, so the vacuum has `sigma = I/2`.

use crate::dynamics::Grid;
use crate::error::{Error, Result};
use crate::models::{HarmonicParams, Profile};
use crate::operator::c64;
use faer::{Mat, Side};

/// Small dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix rows must form a square".into()));
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn add_scaled(&self, k: f64, rhs: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + k * b).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| k * a).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_diff(&self, rhs: &Self) -> f64 {
        self.data.iter().zip(&rhs.data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn asymmetry(&self) -> f64 {
        self.max_diff(&self.transpose())
    }

    /// Principal submatrix on `idx`.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// `self * inner * self^T`.
    pub fn congruence(&self, inner: &Self) -> Self {
        self.matmul(inner).matmul(&self.transpose())
    }
}

/// Symplectic form `⊕ [[0, 1], [-1, 0]]` on `n` quadratures.
pub fn symplectic_form(n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, |i, j| match (i % 2, j) {
        (0, j) if j == i + 1 => 1.0,
        (1, j) if j + 1 == i => -1.0,
        _ => 0.0,
    })
}

/// max |S Ω S^T - Ω|.
pub fn symplectic_deviation(s: &RealMatrix) -> f64 {
    let w = symplectic_form(s.n());
    s.congruence(&w).max_diff(&w)
}

/// Largest tolerated shortfall of a symplectic eigenvalue below 1/2.
pub const UNCERTAINTY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub mean: Vec<f64>,
    pub cov: RealMatrix,
}

impl GaussianState {
    pub fn new(mean: Vec<f64>, cov: RealMatrix) -> Result<Self> {
        if mean.len() != cov.n() || mean.len() % 2 != 0 {
            return Err(Error::Dimension(format!("mean of length {} with {}x{} covariance", mean.len(), cov.n(), cov.n())));
        }
        if cov.asymmetry() > 1e-12 {
            return Err(Error::InvalidState(format!("covariance asymmetric by {:.3e}", cov.asymmetry())));
        }
        let g = Self { mean, cov };
        g.symplectic_eigenvalues()?;
        Ok(g)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { mean: vec![0.0; 2 * modes], cov: RealMatrix::identity(2 * modes).scale(0.5) }
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn with_mean(mut self, mean: Vec<f64>) -> Result<Self> {
        if mean.len() != self.mean.len() {
            return Err(Error::Dimension("mean length changed".into()));
        }
        self.mean = mean;
        Ok(self)
    }

    /// Marginal on the listed modes.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self> {
        if let Some(&k) = modes.iter().find(|&&k| k >= self.modes()) {
            return Err(Error::FactorIndex { index: k, count: self.modes() });
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        Ok(Self { mean: idx.iter().map(|&i| self.mean[i]).collect(), cov: self.cov.select(&idx) })
    }

    /// Image under the linear map `z -> T z`.
    pub fn transformed(&self, t: &RealMatrix) -> Self {
        Self { mean: t.apply(&self.mean), cov: t.congruence(&self.cov) }
    }

    /// `<z_i z_j>` symmetrised, i.e. `sigma_ij + mean_i mean_j`.
    pub fn second_moment(&self, i: usize, j: usize) -> f64 {
        self.cov.get(i, j) + self.mean[i] * self.mean[j]
    }

    /// Symplectic eigenvalues in nondecreasing order; errors when one falls below 1/2.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.cov.n();
        let sym = Mat::from_fn(n, n, |i, j| 0.5 * (self.cov.get(i, j) + self.cov.get(j, i)));
        let e = sym.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
        let vals = e.S().column_vector();
        let u = e.U();
        if let Some(k) = (0..n).find(|&k| vals[k] <= 0.0) {
            return Err(Error::Uncertainty(vals[k].max(0.0)));
        }
        let root = Mat::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * vals[k].sqrt() * u[(j, k)]).sum::<f64>());
        let w = symplectic_form(n);
        // sqrt(sigma) (i Ω) sqrt(sigma) is Hermitian with eigenvalues ±nu
        let herm = Mat::from_fn(n, n, |i, j| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += root[(i, a)] * w.get(a, b) * root[(b, j)];
                }
            }
            c64::new(0.0, acc)
        });
        let ev = herm.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigen)?;
        let mut nu: Vec<f64> = ev[n / 2..].to_vec();
        nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Some(&v) = nu.first() {
            if v < 0.5 - UNCERTAINTY_TOL {
                return Err(Error::Uncertainty(v));
            }
        }
        Ok(nu)
    }
}

/// Entropy of one symplectic eigenvalue.
pub fn mode_entropy(nu: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = nu - 0.5;
    let lo_term = if lo <= 1e-300 { 0.0 } else { lo * lo.ln() };
    hi * hi.ln() - lo_term
}

/// Von Neumann entropy of the marginal on `modes`.
pub fn gaussian_entropy(g: &GaussianState, modes: &[usize]) -> Result<f64> {
    Ok(g.marginal(modes)?.symplectic_eigenvalues()?.into_iter().map(mode_entropy).sum())
}

/// `H = z^T M z / 2 + l . z + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    pub m: RealMatrix,
    pub l: Vec<f64>,
    pub c: f64,
}

impl QuadraticHamiltonian {
    pub fn new(m: RealMatrix, l: Vec<f64>, c: f64) -> Result<Self> {
        if l.len() != m.n() || m.n() % 2 != 0 {
            return Err(Error::NonQuadratic(format!("{}x{} matrix with linear part of length {}", m.n(), m.n(), l.len())));
        }
        if m.asymmetry() > 1e-12 {
            return Err(Error::NonQuadratic(format!("coefficient matrix asymmetric by {:.3e}", m.asymmetry())));
        }
        if m.data.iter().chain(&l).any(|x| !x.is_finite()) || !c.is_finite() {
            return Err(Error::NonQuadratic("non-finite coefficient".into()));
        }
        Ok(Self { m, l, c })
    }

    /// `omega a^dag a = omega (x^2 + p^2)/2 - omega/2` on one mode.
    pub fn number(omega: f64) -> Self {
        Self { m: RealMatrix::identity(2).scale(omega), l: vec![0.0; 2], c: -omega / 2.0 }
    }
}

pub fn gaussian_energy(g: &GaussianState, h: &QuadraticHamiltonian) -> f64 {
    let mz = h.m.apply(&g.mean);
    let mean_part: f64 = g.mean.iter().zip(&mz).map(|(a, b)| a * b).sum();
    let linear: f64 = g.mean.iter().zip(&h.l).map(|(a, b)| a * b).sum();
    0.5 * h.m.matmul(&g.cov).trace() + 0.5 * mean_part + linear + h.c
}

#[derive(Clone, Debug)]
pub struct GaussianTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<GaussianState>,
    /// Accumulated linear map with `sigma(t) ≈ S sigma(0) S^T`.
    pub maps: Vec<RealMatrix>,
}

struct Moments {
    mean: Vec<f64>,
    cov: RealMatrix,
    map: RealMatrix,
}

fn derivative(h: &QuadraticHamiltonian, w: &RealMatrix, y: &Moments) -> Moments {
    let a = w.matmul(&h.m);
    let grad: Vec<f64> = h.m.apply(&y.mean).iter().zip(&h.l).map(|(x, l)| x + l).collect();
    let ac = a.matmul(&y.cov);
    Moments { mean: w.apply(&grad), cov: ac.add_scaled(1.0, &ac.transpose()), map: a.matmul(&y.map) }
}

fn advance(y: &Moments, k: f64, d: &Moments) -> Moments {
    Moments {
        mean: y.mean.iter().zip(&d.mean).map(|(a, b)| a + k * b).collect(),
        cov: y.cov.add_scaled(k, &d.cov),
        map: y.map.add_scaled(k, &d.map),
    }
}

/// Classic fourth-order integration of the moment equations on `grid`, sampling the
/// same steps as the Fock propagator does for `stride`.
pub fn evolve_moments(
    h: impl Fn(f64) -> Result<QuadraticHamiltonian>,
    g0: &GaussianState,
    grid: Grid,
    stride: usize,
) -> Result<GaussianTrajectory> {
    let n = g0.mean.len();
    let w = symplectic_form(n);
    let dt = grid.dt();
    let samples = grid.sample_steps(stride);
    let mut y = Moments { mean: g0.mean.clone(), cov: g0.cov.clone(), map: RealMatrix::identity(n) };
    let mut out = GaussianTrajectory { times: Vec::new(), states: Vec::new(), maps: Vec::new() };
    let mut next = 0;
    let record = |k: usize, y: &Moments, out: &mut GaussianTrajectory| {
        out.times.push(grid.time(k));
        out.states.push(GaussianState { mean: y.mean.clone(), cov: y.cov.clone() });
        out.maps.push(y.map.clone());
    };
    for k in 0..=grid.steps {
        if next < samples.len() && samples[next] == k {
            record(k, &y, &mut out);
            next += 1;
        }
        if k == grid.steps {
            break;
        }
        let t = grid.time(k);
        let (h0, hm, h1) = (h(t)?, h(t + dt / 2.0)?, h(t + dt)?);
        for q in [&h0, &hm, &h1] {
            if q.m.n() != n {
                return Err(Error::NonQuadratic(format!("coefficient matrix is {}x{}, state has {n} quadratures", q.m.n(), q.m.n())));
            }
        }
        let k1 = derivative(&h0, &w, &y);
        let k2 = derivative(&hm, &w, &advance(&y, dt / 2.0, &k1));
        let k3 = derivative(&hm, &w, &advance(&y, dt / 2.0, &k2));
        let k4 = derivative(&h1, &w, &advance(&y, dt, &k3));
        let step = Moments {
            mean: (0..n).map(|i| (k1.mean[i] + 2.0 * k2.mean[i] + 2.0 * k3.mean[i] + k4.mean[i]) / 6.0).collect(),
            cov: k1.cov.add_scaled(2.0, &k2.cov).add_scaled(2.0, &k3.cov).add_scaled(1.0, &k4.cov).scale(1.0 / 6.0),
            map: k1.map.add_scaled(2.0, &k2.map).add_scaled(2.0, &k3.map).add_scaled(1.0, &k4.map).scale(1.0 / 6.0),
        };
        y = advance(&y, dt, &step);
    }
    Ok(out)
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Moment description of the switched harmonic dipole-mode model.
///
/// Quadratures are `(r, p, X, P)` with the field `A = X / sqrt(omega v)` and its conjugate
/// `Pi = sqrt(omega / v) P`.
#[derive(Clone, Copy, Debug)]
pub struct DipoleModeOracle {
    pub params: HarmonicParams,
    pub profile: Profile,
}

/// Oracle observables at one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub t: f64,
    pub q: f64,
    pub delta_q: f64,
    pub bath_energy: f64,
    pub s_a: f64,
    pub s_a_prime: f64,
    pub s_b: f64,
    pub state: GaussianState,
}

impl DipoleModeOracle {
    pub fn new(params: HarmonicParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, profile: Profile::switch(params.t0, params.s)? })
    }

    pub fn with_profile(params: HarmonicParams, profile: Profile) -> Self {
        Self { params, profile }
    }

    /// Coupling `lambda(t) q`.
    pub fn coupling(&self, t: f64) -> f64 {
        self.profile.value(t) * self.params.charge()
    }

    fn field_scale(&self) -> f64 {
        (self.params.omega * self.params.volume).sqrt()
    }

    /// Frame-X Hamiltonian as a quadratic form.
    pub fn hamiltonian(&self, t: f64) -> Result<QuadraticHamiltonian> {
        let HarmonicParams { mass: m, omega_m: wm, omega: w, volume: v, .. } = self.params;
        let c = self.coupling(t);
        let mut mm = RealMatrix::zeros(4);
        mm.set(0, 0, m * wm * wm);
        mm.set(1, 1, 1.0 / m);
        let px = -c / (m * (w * v).sqrt());
        mm.set(1, 2, px);
        mm.set(2, 1, px);
        mm.set(2, 2, c * c / (m * w * v) + w);
        mm.set(3, 3, w);
        QuadraticHamiltonian::new(mm, vec![0.0; 4], -w / 2.0)
    }

    pub fn bath_energy(&self) -> QuadraticHamiltonian {
        let mut mm = RealMatrix::zeros(4);
        mm.set(2, 2, self.params.omega);
        mm.set(3, 3, self.params.omega);
        QuadraticHamiltonian { m: mm, l: vec![0.0; 4], c: -self.params.omega / 2.0 }
    }

    /// Phase-space action of conjugation into frame Y: `p -> p - k X`, `P -> P - k r`.
    pub fn frame_map(&self, t: f64) -> RealMatrix {
        let k = self.coupling(t) / self.field_scale();
        let mut s = RealMatrix::identity(4);
        s.set(1, 2, -k);
        s.set(3, 0, -k);
        s
    }

    /// Product of thermal states: system at `gamma`, mode at `beta`.
    pub fn thermal(&self, gamma: f64, beta: f64) -> Result<GaussianState> {
        if !(gamma > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParameter("inverse temperatures must be positive".into()));
        }
        let HarmonicParams { mass: m, omega_m: wm, omega: w, .. } = self.params;
        let ct = coth(gamma * wm / 2.0);
        let cb = coth(beta * w / 2.0);
        let mut cov = RealMatrix::zeros(4);
        cov.set(0, 0, ct / (2.0 * m * wm));
        cov.set(1, 1, m * wm * ct / 2.0);
        cov.set(2, 2, cb / 2.0);
        cov.set(3, 3, cb / 2.0);
        GaussianState::new(vec![0.0; 4], cov)
    }

    /// `<delta H_B>` from the quadratic form `c r Pi - c^2 r^2 / 2v`.
    pub fn delta_heat(&self, g: &GaussianState, t: f64) -> f64 {
        let c = self.coupling(t);
        let v = self.params.volume;
        let pi_scale = (self.params.omega / v).sqrt();
        c * pi_scale * g.second_moment(0, 3) - c * c * g.second_moment(0, 0) / (2.0 * v)
    }

    pub fn observe(&self, t: f64, g: &GaussianState, e_b0: f64) -> Result<OracleRow> {
        let e_b = gaussian_energy(g, &self.bath_energy());
        let rotated = g.transformed(&self.frame_map(t));
        Ok(OracleRow {
            t,
            q: -(e_b - e_b0),
            delta_q: self.delta_heat(g, t),
            bath_energy: e_b,
            s_a: gaussian_entropy(g, &[0])?,
            s_a_prime: gaussian_entropy(&rotated, &[0])?,
            s_b: gaussian_entropy(g, &[1])?,
            state: g.clone(),
        })
    }

    pub fn run(&self, g0: &GaussianState, grid: Grid, stride: usize) -> Result<Vec<OracleRow>> {
        let traj = evolve_moments(|t| self.hamiltonian(t), g0, grid, stride)?;
        let e_b0 = gaussian_energy(g0, &self.bath_energy());
        traj.times.iter().zip(&traj.states).map(|(&t, g)| self.observe(t, g, e_b0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(w: f64) -> QuadraticHamiltonian {
        QuadraticHamiltonian::number(w)
    }

    #[test]
    fn vacuum_is_stationary_and_pure() {
        let g = GaussianState::vacuum(1);
        let traj = evolve_moments(|_| Ok(oscillator(1.3)), &g, Grid::new(5.0, 500).unwrap(), 100).unwrap();
        for s in &traj.states {
            assert!(s.cov.max_diff(&g.cov) < 1e-12);
        }
        assert!(gaussian_entropy(&g, &[0]).unwrap().abs() < 1e-12);
        assert!(gaussian_energy(&g, &oscillator(1.3)).abs() < 1e-15);
    }

    #[test]
    fn displaced_mean_rotates() {
        let w = 1.7;
        let g = GaussianState::vacuum(1).with_mean(vec![1.0, 0.0]).unwrap();
        let grid = Grid::new(3.0, 3000).unwrap();
        let traj = evolve_moments(|_| Ok(oscillator(w)), &g, grid, 1000).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.mean[0] - (w * t).cos()).abs() < 1e-8);
            assert!((s.mean[1] + (w * t).sin()).abs() < 1e-8);
        }
        assert!(symplectic_deviation(traj.maps.last().unwrap()) < 1e-8);
    }

    #[test]
    fn bose_occupation_and_entropy() {
        let (w, beta) = (0.8f64, 1.4f64);
        let nbar = 1.0 / ((beta * w).exp() - 1.0);
        let cov = RealMatrix::identity(2).scale(nbar + 0.5);
        let g = GaussianState::new(vec![0.0, 0.0], cov).unwrap();
        assert!((gaussian_energy(&g, &oscillator(w)) - w * nbar).abs() < 1e-14);
        let s = (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln();
        assert!((gaussian_entropy(&g, &[0]).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn two_mode_squeezed_marginals_match() {
        let r: f64 = 0.6;
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let cov = RealMatrix::from_rows(&[
            vec![c, 0.0, s, 0.0],
            vec![0.0, c, 0.0, -s],
            vec![s, 0.0, c, 0.0],
            vec![0.0, -s, 0.0, c],
        ])
        .unwrap();
        let g = GaussianState::new(vec![0.0; 4], cov).unwrap();
        let (sa, sb) = (gaussian_entropy(&g, &[0]).unwrap(), gaussian_entropy(&g, &[1]).unwrap());
        assert!((sa - sb).abs() < 1e-9 && sa > 0.1);
        assert!(gaussian_entropy(&g, &[0, 1]).unwrap().abs() < 1e-7);
    }

    #[test]
    fn uncertainty_violation_is_rejected() {
        let cov = RealMatrix::identity(2).scale(0.3);
        assert!(matches!(GaussianState::new(vec![0.0, 0.0], cov), Err(Error::Uncertainty(_))));
        let asym = RealMatrix::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(QuadraticHamiltonian::new(asym, vec![0.0; 2], 0.0), Err(Error::NonQuadratic(_))));
    }

    #[test]
    fn covariance_follows_accumulated_map() {
        let o = DipoleModeOracle::new(HarmonicParams::default()).unwrap();
        let g0 = o.thermal(2.0, 1.0).unwrap();
        let traj = evolve_moments(|t| o.hamiltonian(t), &g0, Grid::new(12.0, 2400).unwrap(), 600).unwrap();
        for (s, map) in traj.states.iter().zip(&traj.maps) {
            assert!(s.cov.max_diff(&map.congruence(&g0.cov)) < 1e-8);
            assert!(symplectic_deviation(map) < 1e-8);
        }
    }

    #[test]
    fn frame_map_is_symplectic() {
        let o = DipoleModeOracle::new(HarmonicParams::default()).unwrap();
        assert!(symplectic_deviation(&o.frame_map(20.0)) < 1e-15);
        assert!(o.frame_map(0.0).max_diff(&RealMatrix::identity(4)) == 0.0);
    }
}
