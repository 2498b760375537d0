use noonbell_core::correlators::{parity_corr, q_joint};
use noonbell_core::fock::{apply_swap_unitary, noon_state, oracle_parity_corr, oracle_q_joint};
use noonbell_core::{Amplitude, NoonParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUTOFF: usize = 64;

fn disk(rng: &mut ChaCha8Rng, radius: f64) -> Amplitude {
    let r = radius * rng.gen::<f64>().sqrt();
    Amplitude::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

#[test]
fn q_joint_matches_fock_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + (i % 5) as u32;
        let (a, b) = (disk(&mut rng, 2.5), disk(&mut rng, 2.5));
        let closed = q_joint(NoonParams::new(n).unwrap(), a, b);
        let oracle = oracle_q_joint(n, a, b, CUTOFF).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn parity_matches_fock_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + (i % 5) as u32;
        let (a, b) = (disk(&mut rng, 1.5), disk(&mut rng, 1.5));
        let closed = parity_corr(NoonParams::new(n).unwrap(), a, b);
        let oracle = oracle_parity_corr(n, a, b, CUTOFF).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    assert!(worst < 1e-7, "{worst:e}");
}

#[test]
fn swap_unitary_maps_single_photon_state() {
    let one = noon_state(1, 16).unwrap();
    for n in 2..=6 {
        let mapped = apply_swap_unitary(n, &one).unwrap();
        let target = noon_state(n, 16).unwrap();
        assert!(mapped.max_abs_diff(&target) < 1e-12, "n={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_agreement_holds_pointwise(
        n in 1u32..=5,
        ar in -1.5f64..1.5, ai in -1.5f64..1.5,
        br in -1.5f64..1.5, bi in -1.5f64..1.5,
    ) {
        let (a, b) = (Amplitude::new(ar, ai), Amplitude::new(br, bi));
        let p = NoonParams::new(n).unwrap();
        prop_assert!((q_joint(p, a, b) - oracle_q_joint(n, a, b, CUTOFF).unwrap()).abs() < 1e-9);
        prop_assert!((parity_corr(p, a, b) - oracle_parity_corr(n, a, b, CUTOFF).unwrap()).abs() < 1e-7);
    }
}
