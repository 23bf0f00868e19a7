use super::{c64, Operator, C0, C1, CI};
use crate::error::{Error, Result};

/// Extra Fock levels used when building products by exact projection.
const PROJECTION_PAD: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FactorKind {
    Boson(usize),
    Qubit,
}

/// Ladder and quadrature operators of one truncated bosonic factor.
///
/// `x = (a + a^dag)/sqrt(2 m w)`, `p = i sqrt(m w / 2)(a^dag - a)`.
#[derive(Clone, Debug)]
pub struct BosonOps {
    pub cutoff: usize,
    pub mass: f64,
    pub omega: f64,
    pub a: Operator,
    pub adag: Operator,
    pub n: Operator,
    pub x: Operator,
    pub p: Operator,
    pub identity: Operator,
}

/// Pauli operators in the basis (|e>, |g>), so sz = diag(1, -1) and sp = |e><g|.
#[derive(Clone, Debug)]
pub struct QubitOps {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
    pub sp: Operator,
    pub sm: Operator,
    pub identity: Operator,
}

#[derive(Clone, Debug)]
pub enum CanonicalSet {
    Boson(BosonOps),
    Qubit(QubitOps),
}

pub fn canonical_set(kind: FactorKind, mass: f64, omega: f64) -> Result<CanonicalSet> {
    match kind {
        FactorKind::Boson(n) => boson(n, mass, omega).map(CanonicalSet::Boson),
        FactorKind::Qubit => Ok(CanonicalSet::Qubit(qubit())),
    }
}

pub fn boson(cutoff: usize, mass: f64, omega: f64) -> Result<BosonOps> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!("Fock cutoff must be >= 2, got {cutoff}")));
    }
    if !(mass > 0.0 && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("mass and frequency must be positive (m = {mass}, w = {omega})")));
    }
    let dims = [cutoff];
    let a = Operator::from_fn(&dims, |i, j| if j == i + 1 { c64::new((j as f64).sqrt(), 0.0) } else { C0 });
    let adag = a.dagger();
    let n = Operator::diagonal(&(0..cutoff).map(|k| k as f64).collect::<Vec<_>>(), &dims);
    let sx = 1.0 / (2.0 * mass * omega).sqrt();
    let sp = (mass * omega / 2.0).sqrt();
    let x = (&a + &adag).scale_real(sx);
    let p = (&adag - &a).scale(CI * sp);
    Ok(BosonOps { cutoff, mass, omega, a, adag, n, x, p, identity: Operator::identity(&dims) })
}

/// Build `f(ops)` at a padded cutoff and keep the leading `cutoff` levels.
///
/// For polynomials of degree up to `2 * PROJECTION_PAD + 1` in the ladder operators
/// this equals the projection P f P of the untruncated operator.
pub fn boson_projected(cutoff: usize, mass: f64, omega: f64, f: impl Fn(&BosonOps) -> Operator) -> Result<Operator> {
    let padded = boson(cutoff + PROJECTION_PAD, mass, omega)?;
    let big = f(&padded);
    let idx: Vec<usize> = (0..cutoff).collect();
    Operator::new(big.compress(&idx), vec![cutoff])
}

pub fn qubit() -> QubitOps {
    let dims = [2];
    let m = |e: [[c64; 2]; 2]| Operator::from_fn(&dims, |i, j| e[i][j]);
    QubitOps {
        sx: m([[C0, C1], [C1, C0]]),
        sy: m([[C0, -CI], [CI, C0]]),
        sz: m([[C1, C0], [C0, -C1]]),
        sp: m([[C0, C1], [C0, C0]]),
        sm: m([[C0, C0], [C1, C0]]),
        identity: Operator::identity(&dims),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let q = qubit();
        assert!(q.sp.commutator(&q.sm).unwrap().max_diff(&q.sz) == 0.0);
        let xy = &q.sx * &q.sy;
        assert!(xy.max_diff(&q.sz.scale(CI)) == 0.0);
        assert!((&q.sp + &q.sm).max_diff(&q.sx) == 0.0);
        assert!((&q.sm - &q.sp).scale(CI).max_diff(&q.sy) == 0.0);
    }

    #[test]
    fn truncated_commutators() {
        let b = boson(4, 1.0, 1.0).unwrap();
        let c = b.a.commutator(&b.adag).unwrap();
        assert!(c.max_diff(&Operator::diagonal(&[1.0, 1.0, 1.0, -3.0], &[4])) < 1e-14);
        let b = boson(5, 1.7, 0.6).unwrap();
        let c = b.x.commutator(&b.p).unwrap();
        let mut expect = Operator::diagonal(&[1.0, 1.0, 1.0, 1.0, -4.0], &[5]);
        expect = expect.scale(CI);
        assert!(c.max_diff(&expect) < 1e-13);
        // artifact confined to the top level
        let dev = b.a.commutator(&b.adag).unwrap().try_sub(&b.identity).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if (i, j) != (4, 4) {
                    assert!(dev.get(i, j).norm() < 1e-14);
                }
            }
        }
        assert!(boson(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn projected_oscillator_is_diagonal() {
        let (m, w) = (1.3, 0.7);
        let h = boson_projected(6, m, w, |b| &(&b.p * &b.p).scale_real(0.5 / m) + &(&b.x * &b.x).scale_real(0.5 * m * w * w)).unwrap();
        let expect = Operator::diagonal(&(0..6).map(|k| w * (k as f64 + 0.5)).collect::<Vec<_>>(), &[6]);
        assert!(h.max_diff(&expect) < 1e-13);
    }
}
