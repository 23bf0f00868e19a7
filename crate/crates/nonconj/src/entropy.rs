//! Entropies in nats.

use crate::error::{Error, Result};
use crate::frames::FrameRotation;
use crate::operator::{c64, partial_trace, trace_product, DensityOperator, HermitianEigen, Operator, C0};
use faer::Mat;

/// Eigenvalues with magnitude at most this are treated as exactly zero.
pub const CLIP: f64 = 1e-12;
/// Probability weight of rho outside the support of sigma that signals infinite relative entropy.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Macrostates with smaller volume are dropped.
pub const MIN_VOLUME: f64 = 1e-12;

fn xlnx(x: f64) -> f64 {
    if x <= CLIP {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    -values.iter().map(|&x| xlnx(x)).sum::<f64>()
}

pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

/// S(rho || sigma); `f64::INFINITY` when rho has weight outside the support of sigma.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
    }
    let es = HermitianEigen::of_matrix(sigma.op().mat())?;
    let mut outside = 0.0;
    for (lambda, v) in es.eigenpairs() {
        if lambda <= CLIP {
            outside += quadratic_form(rho.op().mat(), &v);
        }
    }
    if outside > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let log_sigma = es.apply(|x| c64::new(if x <= CLIP { 0.0 } else { x.ln() }, 0.0));
    let cross = trace_product(rho.op().mat(), &log_sigma).re;
    let neg_s = -von_neumann(rho)?;
    Ok(neg_s - cross)
}

/// S(rho || a ⊗ b) with the split after `n_system` factors.
///
/// Uses ln(a ⊗ b) = ln a ⊗ I + I ⊗ ln b, so small products of factor eigenvalues are never clipped.
pub fn relative_entropy_to_product(rho: &DensityOperator, a: &DensityOperator, b: &DensityOperator, n_system: usize) -> Result<f64> {
    let (sys, bath) = split(rho.dims(), n_system)?;
    let ra = DensityOperator::new_unchecked(partial_trace(rho.op(), &sys)?);
    let rb = DensityOperator::new_unchecked(partial_trace(rho.op(), &bath)?);
    if ra.dims() != a.dims() || rb.dims() != b.dims() {
        return Err(Error::Dimension(format!("{:?} vs {:?} ⊗ {:?}", rho.dims(), a.dims(), b.dims())));
    }
    let mut cross = 0.0;
    for (marginal, factor) in [(&ra, a), (&rb, b)] {
        let es = HermitianEigen::of_matrix(factor.op().mat())?;
        let mut outside = 0.0;
        for (lambda, v) in es.eigenpairs() {
            if lambda <= CLIP {
                outside += quadratic_form(marginal.op().mat(), &v);
            }
        }
        if outside > SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
        let log = es.apply(|x| c64::new(if x <= CLIP { 0.0 } else { x.ln() }, 0.0));
        cross += trace_product(marginal.op().mat(), &log).re;
    }
    Ok(-von_neumann(rho)? - cross)
}

fn quadratic_form(m: &Mat<c64>, v: &[c64]) -> f64 {
    let mut s = C0;
    for j in 0..v.len() {
        if v[j].re == 0.0 && v[j].im == 0.0 {
            continue;
        }
        for i in 0..v.len() {
            s += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    s.re
}

pub fn shannon(p: &[f64]) -> f64 {
    entropy_of_spectrum(p)
}

/// I(A:B) = S(rho || rho_A ⊗ rho_B) for the split after the first `n_system` factors.
pub fn mutual_info_conjugate(rho: &DensityOperator, n_system: usize) -> Result<f64> {
    let (sys, bath) = split(rho.dims(), n_system)?;
    let ra = DensityOperator::new_unchecked(partial_trace(rho.op(), &sys)?);
    let rb = DensityOperator::new_unchecked(partial_trace(rho.op(), &bath)?);
    let prod = crate::operator::kron_states(&ra, &rb);
    let prod = DensityOperator::new_unchecked(prod.into_op().with_dims(rho.dims().to_vec())?);
    relative_entropy(rho, &prod)
}

/// S(rho_A') + S(rho_B) - S(rho) with rho_A' = tr_B(R rho R^dag).
pub fn mutual_info_nonconjugate(rho: &DensityOperator, r: &FrameRotation, t: f64, n_system: usize) -> Result<f64> {
    let (sys, bath) = split(rho.dims(), n_system)?;
    let rotated = r.to_frame_y(rho.op(), t);
    let rap = DensityOperator::new_unchecked(partial_trace(&rotated, &sys)?);
    let rb = DensityOperator::new_unchecked(partial_trace(rho.op(), &bath)?);
    Ok(von_neumann(&rap)? + von_neumann(&rb)? - von_neumann(rho)?)
}

pub(crate) fn split(dims: &[usize], n_system: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if n_system == 0 || n_system >= dims.len() {
        return Err(Error::Dimension(format!("cannot split {dims:?} after {n_system} factors")));
    }
    Ok(((0..n_system).collect(), (n_system..dims.len()).collect()))
}

/// Complete family of orthogonal projectors.
#[derive(Clone, Debug)]
pub struct CoarseGraining {
    labels: Vec<String>,
    projectors: Vec<Operator>,
    volumes: Vec<f64>,
}

pub const GRADING_TOL: f64 = 1e-10;

impl CoarseGraining {
    pub fn new(labels: Vec<String>, projectors: Vec<Operator>) -> Result<Self> {
        if projectors.is_empty() || labels.len() != projectors.len() {
            return Err(Error::Grading("need one label per projector and at least one projector".into()));
        }
        let dims = projectors[0].dims().to_vec();
        let mut sum = Operator::zeros(&dims);
        for (i, p) in projectors.iter().enumerate() {
            if p.dims() != dims.as_slice() {
                return Err(Error::Grading(format!("projector {i} has dims {:?}", p.dims())));
            }
            let sq = p * p;
            if sq.max_diff(p) > GRADING_TOL || p.hermitian_deviation() > GRADING_TOL {
                return Err(Error::Grading(format!("element {i} is not an orthogonal projector")));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                if (p * q).max_abs() > GRADING_TOL {
                    return Err(Error::Grading(format!("elements {i} and {j} are not orthogonal")));
                }
            }
            sum = &sum + p;
        }
        if sum.max_diff(&Operator::identity(&dims)) > GRADING_TOL {
            return Err(Error::Grading("projectors do not sum to the identity".into()));
        }
        let volumes: Vec<f64> = projectors.iter().map(|p| p.trace().re).collect();
        if volumes.iter().any(|&v| v < 1.0 - GRADING_TOL) {
            return Err(Error::Grading("zero projector in family".into()));
        }
        Ok(Self { labels, projectors, volumes })
    }

    /// The trivial grading {I}.
    pub fn trivial(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self { labels: vec!["I".into()], projectors: vec![Operator::identity(dims)], volumes: vec![d as f64] }
    }

    /// Rank-one projectors onto the columns of an orthonormal basis.
    pub fn from_basis(vectors: &[Vec<c64>], dims: &[usize]) -> Result<Self> {
        let projectors = vectors.iter().map(|v| Operator::projector(v, dims)).collect();
        Self::new((0..vectors.len()).map(|i| i.to_string()).collect(), projectors)
    }

    /// Eigenprojectors of a Hermitian operator, merging eigenvalues closer than `tol`.
    pub fn spectral(h: &Operator, tol: f64) -> Result<Self> {
        let eig = HermitianEigen::new(h)?;
        let pairs = eig.eigenpairs();
        let mut groups: Vec<(f64, Vec<Vec<c64>>)> = Vec::new();
        for (e, v) in pairs {
            match groups.last_mut() {
                Some((e0, vs)) if (e - *e0).abs() <= tol => vs.push(v),
                _ => groups.push((e, vec![v])),
            }
        }
        let dims = h.dims().to_vec();
        let mut labels = Vec::new();
        let mut projectors = Vec::new();
        for (e, vs) in groups {
            let mut p = Operator::zeros(&dims);
            for v in &vs {
                p = &p + &Operator::projector(v, &dims);
            }
            labels.push(format!("{e:.12e}"));
            projectors.push(p);
        }
        Self::new(labels, projectors)
    }

    /// Same grading with every projector conjugated by a unitary.
    pub fn rotated(&self, u: &Operator, dagger_first: bool) -> Self {
        let projectors = self
            .projectors
            .iter()
            .map(|p| if dagger_first { &(&u.dagger() * p) * u } else { &(u * p) * &u.dagger() })
            .collect();
        Self { labels: self.labels.clone(), projectors, volumes: self.volumes.clone() }
    }

    /// Lift a grading on leading (or trailing) factors to the composite `dims`.
    pub fn lifted(&self, dims: &[usize], leading: bool) -> Result<Self> {
        let lift = |p: &Operator| if leading { crate::frames::lift_leading(p, dims) } else { crate::frames::lift_trailing(p, dims) };
        let projectors = self.projectors.iter().map(lift).collect::<Result<Vec<_>>>()?;
        let volumes = projectors.iter().map(|p| p.trace().re).collect();
        Ok(Self { labels: self.labels.clone(), projectors, volumes })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn dims(&self) -> &[usize] {
        self.projectors[0].dims()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Joint distribution over a sequence of gradings.
#[derive(Clone, Debug)]
pub struct MacrostateDistribution {
    pub shape: Vec<usize>,
    /// Retained multi-indices with their probability and volume.
    pub entries: Vec<(Vec<usize>, f64, f64)>,
}

impl MacrostateDistribution {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn entropy(&self) -> f64 {
        self.entries.iter().map(|(_, p, v)| if *p <= CLIP { 0.0 } else { -p * (p / v).ln() }).sum()
    }

    /// Marginal probabilities of position `k` in the multi-index.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.shape[k]];
        for (idx, p, _) in &self.entries {
            m[idx[k]] += p;
        }
        m
    }
}

/// Sequence probabilities p_{i1..in} = tr(P_in..P_i1 rho P_i1..P_in) and volumes
/// V_{i1..in} = tr(P_i1..P_in..P_i1).
pub fn macrostate_distribution(rho: &DensityOperator, gradings: &[CoarseGraining]) -> Result<MacrostateDistribution> {
    if gradings.is_empty() {
        return Err(Error::Grading("empty grading sequence".into()));
    }
    for g in gradings {
        if g.dims() != rho.dims() {
            return Err(Error::Dimension(format!("grading dims {:?} vs state dims {:?}", g.dims(), rho.dims())));
        }
    }
    let shape: Vec<usize> = gradings.iter().map(|g| g.len()).collect();
    let total: usize = shape.iter().product();
    let probs = sequence_traces(rho.op().mat(), gradings);
    // volumes are the same nested traces run in reverse order on the identity
    let reversed: Vec<CoarseGraining> = gradings.iter().rev().cloned().collect();
    let ident = Mat::<c64>::identity(rho.dim(), rho.dim());
    let vols_rev = sequence_traces(&ident, &reversed);
    let mut entries = Vec::new();
    for flat in 0..total {
        let idx = crate::operator::digits(flat, &shape);
        let rev: Vec<usize> = idx.iter().rev().copied().collect();
        let rev_shape: Vec<usize> = shape.iter().rev().copied().collect();
        let v = vols_rev[flatten(&rev, &rev_shape)];
        if v < MIN_VOLUME {
            continue;
        }
        entries.push((idx, probs[flat].max(0.0), v));
    }
    Ok(MacrostateDistribution { shape, entries })
}

fn flatten(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

/// tr(P_in..P_i1 M P_i1..P_in) for every multi-index, flattened row-major.
fn sequence_traces(m: &Mat<c64>, gradings: &[CoarseGraining]) -> Vec<f64> {
    let shape: Vec<usize> = gradings.iter().map(|g| g.len()).collect();
    let total: usize = shape.iter().product();
    let mut out = vec![0.0; total];
    fn rec(m: &Mat<c64>, gradings: &[CoarseGraining], prefix: usize, shape: &[usize], depth: usize, out: &mut [f64]) {
        let g = &gradings[depth];
        let last = depth + 1 == gradings.len();
        for (i, p) in g.projectors().iter().enumerate() {
            let flat = prefix * shape[depth] + i;
            if last {
                // tr(P M P) = tr(P M)
                let s: f64 = trace_product(p.mat(), m).re;
                out[flat] = s;
            } else {
                let next = &(p.mat() * m) * p.mat();
                let tr: f64 = (0..next.nrows()).map(|k| next[(k, k)].re).sum();
                if tr.abs() <= 1e-300 {
                    continue;
                }
                let stride: usize = shape[depth + 1..].iter().product();
                let sub = &mut out[flat * stride..(flat + 1) * stride];
                rec_into(&next, gradings, shape, depth + 1, sub);
            }
        }
    }
    fn rec_into(m: &Mat<c64>, gradings: &[CoarseGraining], shape: &[usize], depth: usize, out: &mut [f64]) {
        rec(m, gradings, 0, shape, depth, out);
    }
    rec(m, gradings, 0, &shape, 0, &mut out);
    out
}

/// Joint distribution of commuting product gradings `Pi_i ⊗ Pi_j`, with the system
/// grading on the leading factors and the bath grading on the trailing ones.
pub fn product_distribution(rho: &DensityOperator, system: &CoarseGraining, bath: &CoarseGraining) -> Result<MacrostateDistribution> {
    let (da, db) = (system.dims().iter().product::<usize>(), bath.dims().iter().product::<usize>());
    let mut expect = system.dims().to_vec();
    expect.extend_from_slice(bath.dims());
    if rho.dims() != expect.as_slice() {
        return Err(Error::Dimension(format!("gradings on {expect:?} vs state dims {:?}", rho.dims())));
    }
    let m = rho.op().mat();
    let mut entries = Vec::with_capacity(system.len() * bath.len());
    for (i, pa) in system.projectors().iter().enumerate() {
        // conditional bath operator tr_A((Pi_i ⊗ I) rho)
        let mut cond = Mat::<c64>::zeros(db, db);
        for a in 0..da {
            for a2 in 0..da {
                let w = pa.get(a2, a);
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                for b2 in 0..db {
                    for b in 0..db {
                        cond[(b, b2)] += w * m[(a * db + b, a2 * db + b2)];
                    }
                }
            }
        }
        for (j, pb) in bath.projectors().iter().enumerate() {
            let v = system.volumes()[i] * bath.volumes()[j];
            let p = trace_product(pb.mat(), &cond).re.max(0.0);
            entries.push((vec![i, j], p, v));
        }
    }
    Ok(MacrostateDistribution { shape: vec![system.len(), bath.len()], entries })
}

/// Observational entropy -sum p ln(p / V) over a grading sequence.
pub fn observational_entropy(rho: &DensityOperator, gradings: &[CoarseGraining]) -> Result<f64> {
    Ok(macrostate_distribution(rho, gradings)?.entropy())
}

/// Mutual information of a two-grading joint distribution.
pub fn classical_mutual_info(joint: &MacrostateDistribution) -> Result<f64> {
    if joint.shape.len() != 2 {
        return Err(Error::Grading(format!("expected two gradings, got {}", joint.shape.len())));
    }
    let pa = joint.marginal(0);
    let pb = joint.marginal(1);
    let mut s = 0.0;
    for (idx, p, _) in &joint.entries {
        if *p > CLIP {
            s += p * (p / (pa[idx[0]] * pb[idx[1]])).ln();
        }
    }
    Ok(s)
}

/// Joint distribution from an explicit probability table (rows: first grading).
pub fn joint_from_table(table: &[Vec<f64>]) -> MacrostateDistribution {
    let shape = vec![table.len(), table[0].len()];
    let mut entries = Vec::new();
    for (i, row) in table.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            entries.push((vec![i, j], p, 1.0));
        }
    }
    MacrostateDistribution { shape, entries }
}
