use nonconj::entropy::{observational_entropy, relative_entropy, von_neumann, CoarseGraining};
use nonconj::frames::{krauss_from_rotation, nonconjugate_reduced, rotate, Direction, FrameRotation};
use nonconj::operator::{c64, hermitian_function, kron, partial_trace, DensityOperator, Operator, CI};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![Just(vec![2, 2]), Just(vec![2, 3]), Just(vec![3, 2]), Just(vec![3, 4])]
}

fn ginibre(rng: &mut ChaCha8Rng, dims: &[usize]) -> Operator {
    Operator::from_fn(dims, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn state(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityOperator {
    let g = ginibre(rng, dims);
    let m = &g * &g.dagger();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr)).unwrap()
}

fn hermitian(rng: &mut ChaCha8Rng, dims: &[usize]) -> Operator {
    let g = ginibre(rng, dims);
    (&g + &g.dagger()).scale_real(0.5)
}

fn unitary(rng: &mut ChaCha8Rng, dims: &[usize]) -> Operator {
    hermitian_function(&hermitian(rng, dims), |x| (CI * (-1.7 * x)).exp()).unwrap()
}

fn min_eigenvalue(rho: &DensityOperator) -> f64 {
    rho.eigenvalues().unwrap().into_iter().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectations_are_frame_invariant(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        let o = hermitian(&mut rng, &dims);
        let r = unitary(&mut rng, &dims);
        let lhs = o.expectation(rho.op());
        let rhs = rotate(&o, &r, Direction::XToY).unwrap().expectation(&rotate(rho.op(), &r, Direction::XToY).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-10);
        let back = rotate(&rotate(&o, &r, Direction::XToY).unwrap(), &r, Direction::YToX).unwrap();
        prop_assert!(back.max_diff(&o) < 1e-10);
    }

    #[test]
    fn partial_trace_gives_a_state(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        for keep in [[0usize], [1]] {
            let red = DensityOperator::new(partial_trace(rho.op(), &keep).unwrap()).unwrap();
            prop_assert!((red.op().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(red.op().hermitian_deviation() < 1e-12);
            prop_assert!(min_eigenvalue(&red) > -1e-12);
        }
        let a = state(&mut rng, &dims[..1]);
        let b = state(&mut rng, &dims[1..]);
        let ab = kron(a.op(), b.op()).with_dims(dims.clone()).unwrap();
        prop_assert!(partial_trace(&ab, &[0]).unwrap().max_diff(a.op()) < 1e-12);
        prop_assert!(partial_trace(&ab, &[1]).unwrap().max_diff(b.op()) < 1e-12);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        let u = unitary(&mut rng, &dims);
        let rotated = DensityOperator::new(rotate(rho.op(), &u, Direction::XToY).unwrap()).unwrap();
        prop_assert!((von_neumann(&rho).unwrap() - von_neumann(&rotated).unwrap()).abs() < 1e-10);
        let d: usize = dims.iter().product();
        prop_assert!(von_neumann(&rho).unwrap() <= (d as f64).ln() + 1e-12);
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        let sigma = state(&mut rng, &dims);
        prop_assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);
    }

    #[test]
    fn observational_entropy_bounds_von_neumann(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        let d: usize = dims.iter().product();
        let u = unitary(&mut rng, &dims);
        let basis: Vec<Vec<c64>> = (0..d).map(|k| (0..d).map(|i| u.get(i, k)).collect()).collect();
        let fine = CoarseGraining::from_basis(&basis, &dims).unwrap();
        let energy = CoarseGraining::spectral(&hermitian(&mut rng, &dims), 1e-9).unwrap();
        let s = von_neumann(&rho).unwrap();
        let single = observational_entropy(&rho, std::slice::from_ref(&fine)).unwrap();
        let sequence = observational_entropy(&rho, &[energy, fine]).unwrap();
        prop_assert!(single >= s - 1e-9);
        prop_assert!(sequence >= s - 1e-9);
        let trivial = observational_entropy(&rho, &[CoarseGraining::trivial(&dims)]).unwrap();
        prop_assert!((trivial - (d as f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn nonconjugate_marginal_is_a_state(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = state(&mut rng, &dims);
        let r = FrameRotation::fixed(unitary(&mut rng, &dims), "random").unwrap();
        let red = nonconjugate_reduced(&rho, &r, 0.0, &[0]).unwrap();
        prop_assert!((red.op().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(red.op().hermitian_deviation() < 1e-12);
        prop_assert!(min_eigenvalue(&red) > -1e-12);
    }

    #[test]
    fn kraus_maps_are_complete(seed in any::<u64>(), dims in dims_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho_b = state(&mut rng, &dims[1..]);
        let map = krauss_from_rotation(&unitary(&mut rng, &dims), &rho_b).unwrap();
        prop_assert!(map.completeness_deviation() < 1e-10);
    }
}
