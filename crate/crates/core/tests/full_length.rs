//! Full-size LDPC inner code of the optical-transport configuration.

use polarfec::channels::sigma_for_capacity;
use polarfec::concat::{concat_encode, ConcatSpec};
use polarfec::factor_graph::shortest_cycle;
use polarfec::ldpc::{construct_peg, DegreeDistribution};
use polarfec::polar::{bhattacharyya, encode, select_info_set};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N_L: usize = 34493;

#[test]
fn design_rate_code_matches_the_degree_distribution() {
    let dist = DegreeDistribution::optical();
    let h = construct_peg(&dist, N_L, 0.93, 7).unwrap();
    assert_eq!(h.m(), 2415);
    assert!(
        shortest_cycle(&h.tanner_adjacency(), 4).is_none(),
        "4-cycle present"
    );
    let got = h.edge_fractions();
    for (want, have) in [
        (&dist.lambda_coeffs, &got.lambda_coeffs),
        (&dist.rho_coeffs, &got.rho_coeffs),
    ] {
        assert_eq!(want.len(), have.len());
        for (&(d, w), &(e, g)) in want.iter().zip(have) {
            assert_eq!(d, e);
            assert!((w - g).abs() < 0.005, "degree {d}: {g} vs {w}");
        }
    }
}

#[test]
fn full_configuration_encodes_into_the_kernel() {
    let dist = DegreeDistribution::optical()
        .with_concentrated_checks(0.95)
        .unwrap();
    let ldpc = construct_peg(&dist, N_L, 1.0 - (N_L - 32768) as f64 / N_L as f64, 3).unwrap();
    assert_eq!((ldpc.m(), ldpc.k_l()), (1725, 32768));
    assert!(shortest_cycle(&ldpc.tanner_adjacency(), 4).is_none());

    let sigma = sigma_for_capacity(0.979).unwrap();
    let z0 = (-1.0 / (2.0 * sigma * sigma)).exp();
    let polar = select_info_set(
        &bhattacharyya(z0, 15).unwrap(),
        (0.979f64 * 32768.0).round() as usize,
    )
    .unwrap();
    let cs = ConcatSpec::new(polar, ldpc).unwrap();
    assert!((cs.r_eff() - 0.93).abs() < 1e-3);
    cs.check_r_eff(0.93).unwrap();

    assert!(concat_encode(&cs, &vec![0; cs.k()])
        .unwrap()
        .iter()
        .all(|&b| b == 0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let info: Vec<u8> = (0..cs.k()).map(|_| rng.random_range(0..2)).collect();
        let word = concat_encode(&cs, &info).unwrap();
        assert_eq!(word.len(), N_L);
        assert!(cs.ldpc().syndrome_ok(&word));
        let seg: Vec<u8> = cs.systematic_positions().iter().map(|&p| word[p]).collect();
        assert_eq!(seg, encode(cs.polar(), &info).unwrap().0);
    }
}
