//! Dense complex operators carrying a tensor-factor dimension list.
//!
//! Composite index convention: for dims `[d0, d1, ..]` the flat index is
//! row-major over factors, so factor 0 varies slowest.

mod block;
mod canonical;

pub use block::{BlockMatrix, EigenBlock, HermitianEigen};
pub use canonical::{boson, boson_projected, canonical_set, qubit, BosonOps, CanonicalSet, FactorKind, QubitOps};

use crate::error::{Error, Result};
use faer::Mat;
use std::ops::{Add, Mul, Neg, Sub};

pub use faer::c64;

pub const C0: c64 = c64 { re: 0.0, im: 0.0 };
pub const C1: c64 = c64 { re: 1.0, im: 0.0 };
pub const CI: c64 = c64 { re: 0.0, im: 1.0 };

/// Relative tolerance used when checking Hermiticity of inputs to spectral calculus.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Operator {
    mat: Mat<c64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(mat: Mat<c64>, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Dimension(format!("matrix is {}x{}", mat.nrows(), mat.ncols())));
        }
        check_dims(&dims, mat.nrows())?;
        for j in 0..mat.ncols() {
            for i in 0..mat.nrows() {
                let z = mat[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Dimension(format!("non-finite entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self { mat, dims })
    }

    /// Internal constructor for matrices produced by trusted arithmetic.
    pub(crate) fn from_parts(mat: Mat<c64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        Self { mat, dims }
    }

    pub fn from_fn(dims: &[usize], f: impl FnMut(usize, usize) -> c64) -> Self {
        let d = dims.iter().product();
        Self { mat: Mat::from_fn(d, d, f), dims: dims.to_vec() }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let d = dims.iter().product();
        Self { mat: Mat::identity(d, d), dims: dims.to_vec() }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let d = dims.iter().product();
        Self { mat: Mat::zeros(d, d), dims: dims.to_vec() }
    }

    pub fn diagonal(values: &[f64], dims: &[usize]) -> Self {
        let mut op = Self::zeros(dims);
        assert_eq!(values.len(), op.dim(), "diagonal length must match dimension");
        for (i, &v) in values.iter().enumerate() {
            op.mat[(i, i)] = c64::new(v, 0.0);
        }
        op
    }

    /// Rank-one projector onto a (normalised here) vector.
    pub fn projector(vector: &[c64], dims: &[usize]) -> Self {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self::from_fn(dims, |i, j| vector[i] * vector[j].conj() / (norm * norm))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: c64) {
        self.mat[(i, j)] = value;
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        self.dims = dims;
        Ok(self)
    }

    pub fn dagger(&self) -> Self {
        Self { mat: self.mat.adjoint().to_owned(), dims: self.dims.clone() }
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// tr(rho * self), evaluated elementwise in O(d^2).
    pub fn expectation(&self, rho: &Operator) -> c64 {
        trace_product(&rho.mat, &self.mat)
    }

    pub fn scale(&self, s: c64) -> Self {
        Self { mat: Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * s), dims: self.dims.clone() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_dims(rhs)?;
        Ok(Self { mat: &self.mat * &rhs.mat, dims: self.dims.clone() })
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_dims(rhs)?;
        Ok(self.zip(rhs, |a, b| a + b))
    }

    pub fn try_sub(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_dims(rhs)?;
        Ok(self.zip(rhs, |a, b| a - b))
    }

    /// self + s * rhs in place.
    pub fn add_scaled(&mut self, s: c64, rhs: &Operator) {
        assert_eq!(self.dims, rhs.dims, "dims must match");
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                self.mat[(i, j)] += s * rhs.mat[(i, j)];
            }
        }
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Self> {
        let ab = self.matmul(rhs)?;
        let ba = rhs.matmul(self)?;
        ab.try_sub(&ba)
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                s += self.mat[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> Result<f64> {
        let sv = self.mat.singular_values().map_err(|_| Error::Eigen)?;
        Ok(sv.into_iter().fold(0.0, f64::max))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// max |U^dag U - I| entry.
    pub fn unitary_deviation(&self) -> f64 {
        let p = self.mat.adjoint() * &self.mat;
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                let target = if i == j { C1 } else { C0 };
                m = m.max((p[(i, j)] - target).norm());
            }
        }
        m
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(&self.dims, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5)
    }

    /// Max entry deviation between two operators of equal dims.
    pub fn max_diff(&self, rhs: &Operator) -> f64 {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m = m.max((self.mat[(i, j)] - rhs.mat[(i, j)]).norm());
            }
        }
        m
    }

    /// Principal submatrix on the given flat indices.
    pub fn compress(&self, indices: &[usize]) -> Mat<c64> {
        Mat::from_fn(indices.len(), indices.len(), |i, j| self.mat[(indices[i], indices[j])])
    }

    fn zip(&self, rhs: &Operator, f: impl Fn(c64, c64) -> c64) -> Self {
        Self {
            mat: Mat::from_fn(self.dim(), self.dim(), |i, j| f(self.mat[(i, j)], rhs.mat[(i, j)])),
            dims: self.dims.clone(),
        }
    }

    fn check_same_dims(&self, rhs: &Operator) -> Result<()> {
        if self.dims != rhs.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims, rhs.dims)));
        }
        Ok(())
    }
}

fn check_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::Dimension(format!("factor dims {dims:?} must be positive")));
    }
    let prod: usize = dims.iter().product();
    if prod != side {
        return Err(Error::Dimension(format!("product of dims {dims:?} is {prod}, matrix side is {side}")));
    }
    Ok(())
}

/// tr(a b) = sum_ij a_ij b_ji.
pub(crate) fn trace_product(a: &Mat<c64>, b: &Mat<c64>) -> c64 {
    let n = a.nrows();
    let mut s = C0;
    for j in 0..n {
        for i in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        self.try_add(rhs).expect("operator dims must match")
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        self.try_sub(rhs).expect("operator dims must match")
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        self.matmul(rhs).expect("operator dims must match")
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale_real(rhs)
    }
}

impl Mul<c64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: c64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mat = Mat::from_fn(da * db, da * db, |r, c| a.mat[(r / db, c / db)] * b.mat[(r % db, c % db)]);
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator { mat, dims }
}

pub fn kron_all(ops: &[&Operator]) -> Operator {
    let mut it = ops.iter();
    let first = (*it.next().expect("kron_all needs at least one operator")).clone();
    it.fold(first, |acc, op| kron(&acc, op))
}

/// Lift an operator on factor `factor` to the composite space with `dims`.
pub fn embed(local: &Operator, factor: usize, dims: &[usize]) -> Result<Operator> {
    if factor >= dims.len() {
        return Err(Error::FactorIndex { index: factor, count: dims.len() });
    }
    if local.dim() != dims[factor] {
        return Err(Error::Dimension(format!(
            "local operator of dim {} does not fit factor {factor} of dim {}",
            local.dim(),
            dims[factor]
        )));
    }
    let left: usize = dims[..factor].iter().product();
    let right: usize = dims[factor + 1..].iter().product();
    let mut out = local.clone();
    if left > 1 {
        out = kron(&Operator::identity(&[left]), &out);
    }
    if right > 1 {
        out = kron(&out, &Operator::identity(&[right]));
    }
    Ok(Operator { mat: out.mat, dims: dims.to_vec() })
}

/// Multi-index digits of a flat index for the given dims.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Trace out every factor not listed in `keep`; kept factors retain their order.
pub fn partial_trace(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let nf = op.dims.len();
    if keep.is_empty() {
        return Err(Error::Dimension("keep set must be nonempty".into()));
    }
    for &k in keep {
        if k >= nf {
            return Err(Error::FactorIndex { index: k, count: nf });
        }
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::Dimension(format!("duplicate factor in keep set {keep:?}")));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| op.dims[k]).collect();
    let traced: Vec<usize> = (0..nf).filter(|k| !keep.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| op.dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // flat index of the composite for given (kept, traced) sub-indices
    let strides: Vec<usize> = (0..nf).map(|k| op.dims[k + 1..].iter().product()).collect();
    let mut kept_offset = vec![0usize; dk];
    for (i, off) in kept_offset.iter_mut().enumerate() {
        let d = digits(i, &kept_dims);
        *off = keep.iter().zip(&d).map(|(&k, &x)| x * strides[k]).sum();
    }
    let mut traced_offset = vec![0usize; dt];
    for (i, off) in traced_offset.iter_mut().enumerate() {
        let d = digits(i, &traced_dims);
        *off = traced.iter().zip(&d).map(|(&k, &x)| x * strides[k]).sum();
    }

    let mat = Mat::from_fn(dk, dk, |i, j| {
        let (oi, oj) = (kept_offset[i], kept_offset[j]);
        traced_offset.iter().map(|&t| op.mat[(oi + t, oj + t)]).sum()
    });
    Ok(Operator { mat, dims: kept_dims })
}

/// f applied to the spectrum of a Hermitian operator.
pub fn hermitian_function(h: &Operator, f: impl Fn(f64) -> c64) -> Result<Operator> {
    let eig = HermitianEigen::new(h)?;
    Ok(Operator { mat: eig.apply(f), dims: h.dims.clone() })
}

/// Gibbs state e^{-beta H}/Z with the spectrum shifted by its minimum.
pub fn thermal_state(h: &Operator, beta: f64) -> Result<DensityOperator> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
    }
    let eig = HermitianEigen::new(h)?;
    let emin = eig.values().into_iter().fold(f64::INFINITY, f64::min);
    let z: f64 = eig.values().iter().map(|&e| (-beta * (e - emin)).exp()).sum();
    let mat = eig.apply(|e| c64::new((-beta * (e - emin)).exp() / z, 0.0));
    Ok(DensityOperator::new_unchecked(Operator { mat, dims: h.dims.clone() }))
}

/// Validation record attached to a density operator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateChecks {
    pub hermitian_deviation: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: Operator,
    checks: Option<StateChecks>,
}

impl DensityOperator {
    pub const TOL: f64 = 1e-10;

    /// Validate Hermiticity, unit trace and positivity.
    pub fn new(op: Operator) -> Result<Self> {
        let hermitian_deviation = op.hermitian_deviation();
        if hermitian_deviation > Self::TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({hermitian_deviation:.3e})")));
        }
        let tr = op.trace();
        let trace_error = ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt();
        if trace_error > Self::TOL {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
        }
        let values = block::hermitian_eigenvalues(&op.hermitian_part().mat)?;
        let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -Self::TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eigenvalue:.3e}")));
        }
        Ok(Self { op, checks: Some(StateChecks { hermitian_deviation, trace_error, min_eigenvalue }) })
    }

    /// Wrap an operator known to be a state by construction (unitary evolution, partial traces).
    pub fn new_unchecked(op: Operator) -> Self {
        Self { op, checks: None }
    }

    pub fn pure(vector: &[c64], dims: &[usize]) -> Self {
        Self::new_unchecked(Operator::projector(vector, dims))
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self::new_unchecked(Operator::identity(dims).scale_real(1.0 / d as f64))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn checks(&self) -> Option<StateChecks> {
        self.checks
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        trace_product(self.op.mat(), self.op.mat()).re
    }

    /// Real part of tr(rho O).
    pub fn expect(&self, o: &Operator) -> f64 {
        o.expectation(&self.op).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        block::hermitian_eigenvalues(self.op.mat())
    }
}

pub fn kron_states(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    DensityOperator::new_unchecked(kron(a.op(), b.op()))
}
