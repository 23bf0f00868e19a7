//! Frame rotations and the reduced states they induce.
//!
//! A rotation `R(t)` maps frame-X representatives to frame Y: `O' = R O R^dag`.
//! Conjugate subsystems come from one tensor split; the non-conjugate system
//! state is `tr_B(R rho R^dag)` while the bath state stays `tr_A rho`.

use crate::entropy::CoarseGraining;
use crate::error::{Error, Result};
use crate::models::switching::Profile;
use crate::operator::{c64, embed, kron, partial_trace, BlockMatrix, DensityOperator, HermitianEigen, Operator, C0};

pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    XToY,
    YToX,
}

/// Apply a unitary: X to Y gives `R O R^dag`, Y to X gives `R^dag O R`.
pub fn rotate(o: &Operator, r: &Operator, direction: Direction) -> Result<Operator> {
    if o.dims() != r.dims() {
        return Err(Error::Dimension(format!("operator dims {:?} vs rotation dims {:?}", o.dims(), r.dims())));
    }
    let dev = r.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(rotate_unchecked(o, r, direction))
}

fn rotate_unchecked(o: &Operator, r: &Operator, direction: Direction) -> Operator {
    let m = match direction {
        Direction::XToY => &(r.mat() * o.mat()) * r.mat().adjoint(),
        Direction::YToX => &(r.mat().adjoint() * o.mat()) * r.mat(),
    };
    Operator::from_parts(m, o.dims().to_vec())
}

#[derive(Clone, Debug)]
enum Kind {
    Identity,
    Fixed(Operator),
    Generated { eig: HermitianEigen, profile: Profile },
}

/// Time-indexed unitary family. Generated rotations are `exp(-i c(t) G)` with a
/// Hermitian generator `G` decomposed once.
#[derive(Clone, Debug)]
pub struct FrameRotation {
    dims: Vec<usize>,
    kind: Kind,
    generator: Option<Operator>,
    pub label: String,
}

impl FrameRotation {
    pub fn identity(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec(), kind: Kind::Identity, generator: None, label: "identity".into() }
    }

    pub fn fixed(u: Operator, label: &str) -> Result<Self> {
        let dev = u.unitary_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { dims: u.dims().to_vec(), kind: Kind::Fixed(u), generator: None, label: label.into() })
    }

    pub fn generated(generator: Operator, profile: Profile, label: &str) -> Result<Self> {
        let eig = HermitianEigen::new(&generator)?;
        Ok(Self { dims: generator.dims().to_vec(), kind: Kind::Generated { eig, profile }, generator: Some(generator), label: label.into() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn generator(&self) -> Option<&Operator> {
        self.generator.as_ref()
    }

    pub fn is_static(&self) -> bool {
        match &self.kind {
            Kind::Generated { profile, .. } => profile.is_constant(),
            _ => true,
        }
    }

    pub fn is_identity_at(&self, t: f64) -> bool {
        match &self.kind {
            Kind::Identity => true,
            Kind::Fixed(_) => false,
            Kind::Generated { profile, .. } => profile.value(t) == 0.0,
        }
    }

    pub fn coefficient(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Generated { profile, .. } => profile.value(t),
            _ => 1.0,
        }
    }

    pub fn block_at(&self, t: f64) -> BlockMatrix {
        let d: usize = self.dims.iter().product();
        match &self.kind {
            Kind::Identity => BlockMatrix::identity(d),
            Kind::Fixed(u) => BlockMatrix::dense(u.mat().clone()),
            Kind::Generated { eig, profile } => {
                let c = profile.value(t);
                eig.map_blocks(|g| c64::new(0.0, -c * g).exp())
            }
        }
    }

    pub fn at(&self, t: f64) -> Operator {
        Operator::from_parts(self.block_at(t).to_dense(), self.dims.clone())
    }

    /// `R(t) rho R(t)^dag`.
    pub fn to_frame_y(&self, o: &Operator, t: f64) -> Operator {
        if self.is_identity_at(t) {
            return o.clone();
        }
        Operator::from_parts(self.block_at(t).conjugate(o.mat()), o.dims().to_vec())
    }

    /// `R(t)^dag O R(t)`.
    pub fn to_frame_x(&self, o: &Operator, t: f64) -> Operator {
        if self.is_identity_at(t) {
            return o.clone();
        }
        Operator::from_parts(self.block_at(t).conjugate_dagger(o.mat()), o.dims().to_vec())
    }
}

pub fn conjugate_reduced(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    DensityOperator::new(partial_trace(rho.op(), keep)?)
}

/// `tr_{complement}(R(t) rho R(t)^dag)`.
pub fn nonconjugate_reduced(rho: &DensityOperator, r: &FrameRotation, t: f64, keep: &[usize]) -> Result<DensityOperator> {
    if rho.dims() != r.dims() {
        return Err(Error::Dimension(format!("state dims {:?} vs rotation dims {:?}", rho.dims(), r.dims())));
    }
    let rotated = r.to_frame_y(rho.op(), t);
    DensityOperator::new(partial_trace(&rotated, keep)?)
}

/// Operator-sum representation of `rho_A -> tr_B(R rho_A ⊗ rho_B R^dag)`.
#[derive(Clone, Debug)]
pub struct KraussMap {
    pub ops: Vec<Operator>,
    pub source: String,
}

pub const KRAUSS_PRUNE: f64 = 1e-12;

impl KraussMap {
    pub fn completeness_deviation(&self) -> f64 {
        let dims = self.ops[0].dims().to_vec();
        let mut s = Operator::zeros(&dims);
        for k in &self.ops {
            s = &s + &(&k.dagger() * k);
        }
        s.max_diff(&Operator::identity(&dims))
    }
}

/// Kraus elements `K_{mu,lambda} = sqrt(lambda) <mu|R|lambda>`, with `|lambda>` the
/// eigenbasis of `rho_B` and `|mu>` the computational basis of the bath factors.
/// The system factors are the leading factors of `R`.
pub fn krauss_from_rotation(r: &Operator, rho_b: &DensityOperator) -> Result<KraussMap> {
    let bd = rho_b.dims();
    let rd = r.dims();
    if rd.len() <= bd.len() || rd[rd.len() - bd.len()..] != *bd {
        return Err(Error::Dimension(format!("rotation dims {rd:?} do not end with bath dims {bd:?}")));
    }
    let dev = r.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let a_dims = rd[..rd.len() - bd.len()].to_vec();
    let db = rho_b.dim();
    let eig = HermitianEigen::new(rho_b.op())?;
    let mut ops = Vec::new();
    for (lambda, v) in eig.eigenpairs() {
        if lambda <= KRAUSS_PRUNE {
            continue;
        }
        let w = lambda.sqrt();
        for mu in 0..db {
            let k = Operator::from_fn(&a_dims, |i, j| {
                let mut s = C0;
                for (b, vb) in v.iter().enumerate() {
                    s += r.get(i * db + mu, j * db + b) * *vb;
                }
                s * w
            });
            if k.op_norm()? >= KRAUSS_PRUNE {
                ops.push(k);
            }
        }
    }
    Ok(KraussMap { ops, source: format!("rotation of dims {rd:?} with bath state of dims {bd:?}") })
}

pub fn apply_krauss(map: &KraussMap, rho_a: &DensityOperator) -> Result<DensityOperator> {
    if map.ops.is_empty() {
        return Err(Error::IncompleteMap(1.0));
    }
    let dev = map.completeness_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::IncompleteMap(dev));
    }
    if map.ops[0].dims() != rho_a.dims() {
        return Err(Error::Dimension(format!("map dims {:?} vs state dims {:?}", map.ops[0].dims(), rho_a.dims())));
    }
    let mut out = Operator::zeros(rho_a.dims());
    for k in &map.ops {
        out = &out + &(&(k * rho_a.op()) * &k.dagger());
    }
    Ok(DensityOperator::new_unchecked(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    Selective(usize),
    NonSelective,
}

#[derive(Clone, Debug)]
pub struct MeasurementResult {
    pub probabilities: Vec<f64>,
    pub post_frame_y: DensityOperator,
    pub post_frame_x: DensityOperator,
}

pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Ideal measurement of a system grading on the frame-Y state; system factors lead.
pub fn projective_measurement(
    rho_prime: &DensityOperator,
    grading: &CoarseGraining,
    mode: MeasurementMode,
    r: &Operator,
) -> Result<MeasurementResult> {
    let dims = rho_prime.dims().to_vec();
    if r.dims() != dims.as_slice() {
        return Err(Error::Dimension(format!("rotation dims {:?} vs state dims {dims:?}", r.dims())));
    }
    let sys_dims = grading.dims().to_vec();
    let ns = sys_dims.len();
    if ns >= dims.len() || dims[..ns] != *sys_dims {
        return Err(Error::Dimension(format!("grading dims {sys_dims:?} are not the leading factors of {dims:?}")));
    }
    let bath_dim: usize = dims[ns..].iter().product();
    let lift = |p: &Operator| -> Operator {
        let k = kron(p, &Operator::identity(&[bath_dim]));
        Operator::from_parts(k.into_mat(), dims.clone())
    };
    let projectors: Vec<Operator> = grading.projectors().iter().map(lift).collect();
    let branches: Vec<Operator> = projectors.iter().map(|p| &(p * rho_prime.op()) * p).collect();
    let probabilities: Vec<f64> = branches.iter().map(|b| b.trace().re).collect();
    let post_y = match mode {
        MeasurementMode::Selective(i) => {
            let p = *probabilities.get(i).ok_or(Error::Grading(format!("outcome {i} out of range")))?;
            if p < ZERO_PROBABILITY {
                return Err(Error::ZeroProbability { index: i, p });
            }
            branches[i].scale_real(1.0 / p)
        }
        MeasurementMode::NonSelective => {
            let mut s = Operator::zeros(&dims);
            for b in &branches {
                s = &s + b;
            }
            s
        }
    };
    let post_x = rotate_unchecked(&post_y, r, Direction::YToX);
    Ok(MeasurementResult {
        probabilities,
        post_frame_y: DensityOperator::new_unchecked(post_y),
        post_frame_x: DensityOperator::new_unchecked(post_x),
    })
}

/// Local system operator lifted to the composite, then expressed in frame X.
pub fn system_observable_in_frame_x(local: &Operator, dims: &[usize], r: &FrameRotation, t: f64) -> Result<Operator> {
    let lifted = if local.dims().len() == 1 { embed(local, 0, dims)? } else { lift_leading(local, dims)? };
    Ok(r.to_frame_x(&lifted, t))
}

/// `local ⊗ I` where `local` acts on the leading factors of `dims`.
pub fn lift_leading(local: &Operator, dims: &[usize]) -> Result<Operator> {
    let ns = local.dims().len();
    if ns > dims.len() || dims[..ns] != *local.dims() {
        return Err(Error::Dimension(format!("{:?} are not the leading factors of {dims:?}", local.dims())));
    }
    let rest: usize = dims[ns..].iter().product();
    let k = if rest > 1 { kron(local, &Operator::identity(&[rest])) } else { local.clone() };
    Ok(Operator::from_parts(k.into_mat(), dims.to_vec()))
}

/// `I ⊗ local` where `local` acts on the trailing factors of `dims`.
pub fn lift_trailing(local: &Operator, dims: &[usize]) -> Result<Operator> {
    let nb = local.dims().len();
    if nb > dims.len() || dims[dims.len() - nb..] != *local.dims() {
        return Err(Error::Dimension(format!("{:?} are not the trailing factors of {dims:?}", local.dims())));
    }
    let rest: usize = dims[..dims.len() - nb].iter().product();
    let k = if rest > 1 { kron(&Operator::identity(&[rest]), local) } else { local.clone() };
    Ok(Operator::from_parts(k.into_mat(), dims.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_function, qubit, thermal_state, CI};

    #[test]
    fn rotate_pauli() {
        let q = qubit();
        let r = hermitian_function(&q.sx, |x| (CI * (-std::f64::consts::PI * x / 4.0)).exp()).unwrap();
        let out = rotate(&q.sz, &r, Direction::XToY).unwrap();
        // exp(-iπσx/4) σz exp(iπσx/4) = -σy
        assert!(out.max_diff(&q.sy.scale_real(-1.0)) < 1e-14);
        let back = rotate(&out, &r, Direction::YToX).unwrap();
        assert!(back.max_diff(&q.sz) < 1e-14);
        assert!(rotate(&q.sz, &Operator::identity(&[2]), Direction::XToY).unwrap().max_diff(&q.sz) == 0.0);
        assert!(matches!(rotate(&q.sz, &q.sz.scale_real(2.0), Direction::XToY), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn identity_rotation_reduces_conjugately() {
        let dims = [2, 3];
        let rho = kron_states_for_test(&dims);
        let r = FrameRotation::identity(&dims);
        let a = nonconjugate_reduced(&rho, &r, 0.3, &[0]).unwrap();
        let b = conjugate_reduced(&rho, &[0]).unwrap();
        assert!(a.op().max_diff(b.op()) < 1e-15);
    }

    fn kron_states_for_test(dims: &[usize]) -> DensityOperator {
        let a = thermal_state(&Operator::diagonal(&[0.0, 1.0], &[2]), 0.4).unwrap();
        let b = thermal_state(&Operator::diagonal(&[0.0, 0.5, 2.0], &[3]), 1.1).unwrap();
        let k = kron(a.op(), b.op());
        DensityOperator::new(k.with_dims(dims.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identity_krauss_is_single_identity() {
        let rho_b = thermal_state(&Operator::diagonal(&[0.0, 0.5, 2.0], &[3]), 1.1).unwrap();
        let r = Operator::identity(&[2, 3]);
        let map = krauss_from_rotation(&r, &rho_b).unwrap();
        assert!(map.completeness_deviation() < 1e-12);
        let rho_a = DensityOperator::new(Operator::diagonal(&[0.3, 0.7], &[2])).unwrap();
        let out = apply_krauss(&map, &rho_a).unwrap();
        assert!(out.op().max_diff(rho_a.op()) < 1e-14);
    }

    #[test]
    fn generated_rotation_is_unitary() {
        let q = qubit();
        let g = kron(&q.sx, &q.sz);
        let r = FrameRotation::generated(g, Profile::Constant(0.37), "test").unwrap();
        assert!(r.at(0.0).unitary_deviation() < 1e-14);
        assert!(r.is_static());
    }
}
