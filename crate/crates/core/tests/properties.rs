//! Property tests of the structural invariants: basis indexing, unitarity
//! bookkeeping, normalization, and the equivalences between independent
//! computation routes.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use twophoton::correlations::{
    BipartiteQubitState, bloch_decompose, geometric_discord_closed, geometric_discord_general,
    postselect_bipartite,
};
use twophoton::fock::{
    CreationPolynomial, canonical_basis, random_unitary, transform_density_matrix,
    two_photon_unitary,
};
use twophoton::interference::{outcome_distribution, output_density_matrix};
use twophoton::sources::{WcsPair, build_input_state};

fn max_gap(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn basis_indexing_round_trips(modes in 2usize..=12, seed in any::<u64>()) {
        let basis = canonical_basis(modes).unwrap();
        prop_assert_eq!(basis.dim(), modes * (modes + 1) / 2);
        let index = (seed as usize) % basis.dim();
        let (j, k) = basis.modes_at(index);
        prop_assert_eq!(basis.index_of(j, k).unwrap(), index);
    }

    #[test]
    fn random_splitters_preserve_the_two_photon_norm(
        seed in any::<u64>(),
        modes in 2usize..=6,
        re in proptest::collection::vec(-1.0f64..1.0, 21),
        im in proptest::collection::vec(-1.0f64..1.0, 21),
    ) {
        let unitary = random_unitary(modes, seed).unwrap();
        let basis = canonical_basis(modes).unwrap();
        let mut poly = CreationPolynomial::new(modes).unwrap();
        for index in 0..basis.dim() {
            let (j, k) = basis.modes_at(index);
            poly.add_term(j, k, Complex64::new(re[index], im[index])).unwrap();
        }
        let before = poly.state_norm();
        prop_assume!(before > 1e-6);
        let after = poly.transform(&unitary).unwrap().state_norm();
        prop_assert!((after - before).abs() <= 1e-10 * before.max(1.0));
    }

    #[test]
    fn sector_evolution_is_a_representation(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        // Evolving by U then V equals evolving by VU, and the sector matrix
        // of a product is the product of sector matrices.
        let u = random_unitary(4, seed_a).unwrap();
        let v = random_unitary(4, seed_b).unwrap();
        let vu = v.compose(&u).unwrap();
        let product = two_photon_unitary(&v).unwrap() * two_photon_unitary(&u).unwrap();
        let direct = two_photon_unitary(&vu).unwrap();
        let gap = (&product - &direct).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-11, "gap {gap:.3e}");
    }

    #[test]
    fn evolved_states_stay_valid(seed in any::<u64>(), gamma in 0.0f64..3.0) {
        let pair = WcsPair::new(gamma).unwrap();
        let input = build_input_state(&pair, 4).unwrap();
        let unitary = random_unitary(4, seed).unwrap();
        // from_matrix re-validates Hermiticity, trace, and positivity.
        let evolved = transform_density_matrix(&unitary, &input).unwrap();
        let trace: f64 = (0..10).map(|i| evolved.entry(i, i).re).sum();
        prop_assert!((trace - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn transform_is_linear(seed in any::<u64>()) {
        let unitary = random_unitary(3, seed).unwrap();
        let mut alpha = CreationPolynomial::new(3).unwrap();
        alpha.add_term(0, 1, Complex64::new(0.7, -0.2)).unwrap();
        alpha.add_term(2, 2, Complex64::new(-0.1, 0.4)).unwrap();
        let mut beta = CreationPolynomial::new(3).unwrap();
        beta.add_term(1, 1, Complex64::new(0.3, 0.9)).unwrap();
        beta.add_term(0, 2, Complex64::new(-0.6, 0.0)).unwrap();
        let scale = Complex64::new(-1.3, 0.8);

        let mut combined = CreationPolynomial::new(3).unwrap();
        for ((j, k), c) in alpha.terms() {
            combined.add_term(j, k, c).unwrap();
        }
        for ((j, k), c) in beta.terms() {
            combined.add_term(j, k, scale * c).unwrap();
        }
        let lhs = combined.transform(&unitary).unwrap().amplitudes();
        let rhs = alpha.transform(&unitary).unwrap().amplitudes()
            + beta.transform(&unitary).unwrap().amplitudes().map(|z| scale * z);
        prop_assert!(max_gap(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn outcome_distributions_are_normalized(gamma in 0.0f64..3.0, f in 0.0f64..=1.0) {
        let distribution = outcome_distribution(gamma, f).unwrap();
        prop_assert!((distribution.total() - 1.0).abs() <= 1e-12);
        for p in distribution.pairs.values() {
            prop_assert!(*p >= -1e-15);
        }
    }

    #[test]
    fn postselection_keeps_half_the_events(gamma in 0.0f64..3.0) {
        let output = output_density_matrix(gamma).unwrap();
        let (engine, success) = postselect_bipartite(&output, (0, 1), (2, 3)).unwrap();
        prop_assert!((success - 0.5).abs() <= 1e-12);
        let closed = BipartiteQubitState::from_gamma(gamma).unwrap();
        let gap = (engine.matrix() - closed.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(gap <= 1e-12, "gamma {gamma}: gap {gap:.3e}");
    }

    #[test]
    fn discord_routes_agree_off_grid(gamma in 0.0f64..2.0) {
        let closed = geometric_discord_closed(gamma).unwrap();
        let general = geometric_discord_general(&BipartiteQubitState::from_gamma(gamma).unwrap());
        prop_assert!((closed - general).abs() <= 1e-10);
    }

    #[test]
    fn bloch_form_round_trips(gamma in 0.0f64..2.0) {
        let state = BipartiteQubitState::from_gamma(gamma).unwrap();
        let rebuilt = bloch_decompose(&state).reconstruct();
        let gap = (rebuilt - state.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(gap <= 1e-13);
    }

    #[test]
    fn mean_photon_numbers_reduce_to_their_ratio(
        gamma in 0.0f64..4.0,
        mu_prime in 1e-3f64..0.5,
    ) {
        let from_ratio = WcsPair::new(gamma).unwrap();
        let from_rates = WcsPair::from_mean_photon_numbers(gamma * mu_prime, mu_prime).unwrap();
        let a = from_ratio.weights();
        let b = from_rates.weights();
        prop_assert!((a.both_in_first - b.both_in_first).abs() <= 1e-12);
        prop_assert!((a.both_in_second - b.both_in_second).abs() <= 1e-12);
        prop_assert!((a.one_in_each - b.one_in_each).abs() <= 1e-12);
    }
}
