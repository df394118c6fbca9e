use proptest::prelude::*;
use rydberg_core::algebra::ModelSpec;
use rydberg_core::dynamics::{max_excitations, time_grid, Eigensystem};
use rydberg_core::space::{
    fibonacci_dimension, hamiltonian_matrix, parity_matrix, translation_permutation, BlockadeBasis, SparseIntMatrix,
};
use rydberg_core::ObservableSpec;

fn finite_model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (2usize..13, 1usize..4).prop_filter_map("λ_b < L", |(l, lb)| ModelSpec::ring(l, lb).ok().filter(|_| lb < l)),
        (1usize..13, 1usize..4).prop_filter_map("valid", |(l, lb)| ModelSpec::line(l, lb).ok()),
    ]
}

fn admissible(bits: u64, m: &ModelSpec) -> bool {
    let l = m.sites().unwrap();
    let lb = m.blockade_range();
    let ring = matches!(m.topology(), rydberg_core::algebra::Topology::Ring(_));
    (0..l).all(|a| {
        (a + 1..l).all(|b| {
            let gap = if ring { (b - a).min(l - (b - a)) } else { b - a };
            !(bits >> a & 1 == 1 && bits >> b & 1 == 1 && gap <= lb)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_is_exactly_the_admissible_configurations(m in finite_model()) {
        let basis = BlockadeBasis::new(&m).unwrap();
        let l = m.sites().unwrap();
        let expected = (0u64..1 << l).filter(|&s| admissible(s, &m)).count();
        prop_assert_eq!(basis.dim(), expected);
        prop_assert!(basis.states().iter().all(|s| admissible(s.0, &m)));
    }

    #[test]
    fn hamiltonian_is_symmetric_and_parity_odd(m in finite_model()) {
        let basis = BlockadeBasis::new(&m).unwrap();
        let h = hamiltonian_matrix(&m, &basis).unwrap();
        prop_assert!(h.is_symmetric());
        let p = parity_matrix(&basis);
        let anti = p.matmul(&h).add(&h.matmul(&p));
        prop_assert_eq!(anti.nnz(), 0);
    }

    #[test]
    fn ring_translation_commutes(l in 2usize..13, lb in 1usize..4) {
        prop_assume!(lb < l);
        let m = ModelSpec::ring(l, lb).unwrap();
        let basis = BlockadeBasis::new(&m).unwrap();
        let h = hamiltonian_matrix(&m, &basis).unwrap();
        let perm = translation_permutation(&basis).unwrap();
        let t = SparseIntMatrix::from_triplets(basis.dim(), perm.iter().enumerate().map(|(i, &j)| (j, i, 1)));
        prop_assert_eq!(t.matmul(&h), h.matmul(&t));
    }

    #[test]
    fn evolution_is_unitary_and_density_capped(m in finite_model(), t in 0.0f64..6.0) {
        let sys = Eigensystem::new(&m).unwrap();
        let (re, im) = sys.state_at(t);
        let norm: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let rho = sys.evolve(&ObservableSpec::DensityPerSite, &[t]).unwrap().values[0];
        let cap = max_excitations(sys.basis()) as f64 / m.sites().unwrap() as f64;
        prop_assert!((-1e-12..=cap + 1e-12).contains(&rho), "ρ = {} cap = {}", rho, cap);
    }
}

#[test]
fn fibonacci_closed_form() {
    let r = (1.0 + 5f64.sqrt()) / 2.0;
    for l in 1..=30usize {
        let n = (l + 2) as i32;
        let closed = (r.powi(n) - (-1.0 / r).powi(n)) / 5f64.sqrt();
        assert_eq!(closed.round() as u128, fibonacci_dimension(l), "L={l}");
        assert!((closed - closed.round()).abs() < 1e-6);
    }
    for l in 3..=30usize {
        assert_eq!(fibonacci_dimension(l), fibonacci_dimension(l - 1) + fibonacci_dimension(l - 2));
    }
}

#[test]
fn chain_density_cap_rounds_up() {
    // alternating occupation 1010...1 on an odd chain fits (L+1)/2 atoms
    for l in 1..=12usize {
        let m = ModelSpec::line(l, 1).unwrap();
        let basis = BlockadeBasis::new(&m).unwrap();
        assert_eq!(max_excitations(&basis) as usize, l.div_ceil(2));
    }
}

#[test]
fn density_is_even_in_time() {
    let m = ModelSpec::line(9, 1).unwrap();
    let sys = Eigensystem::new(&m).unwrap();
    let times = time_grid(0.0, 3.0, 12);
    let neg: Vec<f64> = times.iter().map(|t| -t).collect();
    let a = sys.evolve(&ObservableSpec::DensityPerSite, &times).unwrap().values;
    let b = sys.evolve(&ObservableSpec::DensityPerSite, &neg).unwrap().values;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}
