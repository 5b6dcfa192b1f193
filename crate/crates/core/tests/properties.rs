mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsdelay::cascade::compose_snapshots;
use wsdelay::linalg::{hermitian_eigen, permute_symmetric, CMat, C64};
use wsdelay::modes::{enumerate_floquet_modes, floquet_shell_counts, Family, FloquetPort, Medium, C0};
use wsdelay::reference::{Facing, ReferenceSystem, ShortedGuide, SolvedSystem};
use wsdelay::ws::{corrections, gamma, gamma_residual, i_r_permutation, identity_report, Tolerances};

fn random_unitary(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = CMat::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma_inverts_the_correction_on_unitary_scattering(seed in any::<u64>()) {
        let modes: Vec<_> = guide_modes(A, omega(), Family::Te, 3);
        let s = random_unitary(3, seed);
        let g = gamma(&s, &modes, Tolerances::default()).unwrap();
        let corr = corrections(&modes).unwrap();
        prop_assert!(gamma_residual(&g, &s, &corr) < 1e-12);
    }

    #[test]
    fn shorted_guide_identity_holds_across_lengths_and_frequencies(
        len in 0.001f64..0.05,
        factor in prop_oneof![1.2f64..1.8, 2.2f64..2.8, 3.2f64..3.8],
    ) {
        let w = factor * std::f64::consts::PI / A * C0;
        let sys = ShortedGuide::new(strip(), guide_modes(A, w, Family::Te, 7), len, 0.0, Facing::PlusX).unwrap();
        let (_, rep) = report(&sys, w);
        prop_assert!(rep.residual.unwrap().value < 1e-8);
        let (delays, _) = hermitian_eigen(&rep.q_prop());
        prop_assert!(delays.iter().all(|&d| d > 0.0));
        let g = gamma(&rep.snapshot.s, &rep.snapshot.modes, Tolerances::default()).unwrap();
        prop_assert!(gamma_residual(&g, &rep.snapshot.s, &rep.corrections) < 1e-12);
    }

    #[test]
    fn residual_is_independent_of_mode_ordering(seed in any::<u64>()) {
        let sys = shorted(Family::Tm, 6, 0.017);
        let (sol, _) = report(&sys, omega());
        let q = quad();
        let qt = wsdelay::ws::q_tilde_converged(&sol, q.base, q.tol, q.max_order).unwrap().q;
        let base = identity_report(sol.snapshot(), &qt).unwrap().residual.unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..6).collect();
        for i in (1..6).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let shuffled = sol.snapshot().permuted(&perm);
        let r = identity_report(&shuffled, &permute_symmetric(&qt, &perm)).unwrap().residual.unwrap().value;
        prop_assert!((r - base).abs() < 1e-14);
    }

    #[test]
    fn reversal_pairing_is_an_involution(wavelength in 0.006f64..0.03, shell in 0usize..3) {
        let w = 2.0 * std::f64::consts::PI * C0 / wavelength;
        let port = FloquetPort::new(0.01, 0.007, Medium::vacuum()).unwrap();
        // closed shells that still hold every propagating mode
        let shells: Vec<usize> = floquet_shell_counts(&port, w, 40)
            .unwrap()
            .into_iter()
            .filter(|&c| enumerate_floquet_modes(&port, w, c).is_ok())
            .collect();
        let count = shells[shell.min(shells.len() - 1)];
        let modes = enumerate_floquet_modes(&port, w, count).unwrap();
        let ir = i_r_permutation(&modes).unwrap();
        prop_assert_eq!(&ir * &ir, CMat::identity(count, count));
        prop_assert_eq!(ir.transpose(), ir);
    }

    #[test]
    fn split_thru_equals_whole_thru(l1 in 0.0005f64..0.02, l2 in 0.0005f64..0.02) {
        let w = omega();
        let a = thru(5, 0.0, l1).solve(w).unwrap();
        let b = thru(5, l1, l2).solve(w).unwrap();
        let m = thru(5, 0.0, l1 + l2).solve(w).unwrap();
        let (c, _) = compose_snapshots(a.snapshot(), b.snapshot()).unwrap();
        prop_assert!(rel(&c.s, &m.snapshot().s) < 1e-12);
        prop_assert!(rel(c.s_prime.as_ref().unwrap(), m.snapshot().s_prime.as_ref().unwrap()) < 1e-12);
    }
}
