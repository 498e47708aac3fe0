//! Randomized properties that cut across modules.

use proptest::prelude::*;

use srmimo_core::config::{ConstellationKind, Detector, SchemeConfig};
use srmimo_core::mapping::{
    bits_to_index, binomial, build_constellation, combination_rank, combination_unrank,
    index_to_bits, spectral_efficiency,
};
use srmimo_core::numerics::{zf_precoder, CMat};
use srmimo_core::rng::SimRng;
use srmimo_core::sim::build_scheme;
use srmimo_core::C64;

fn kinds() -> impl Strategy<Value = (ConstellationKind, usize)> {
    prop_oneof![
        (Just(ConstellationKind::Psk), prop_oneof![Just(2usize), Just(4), Just(8), Just(16), Just(32)]),
        (Just(ConstellationKind::Qam), prop_oneof![Just(4usize), Just(16), Just(64)]),
        (Just(ConstellationKind::Pam), prop_oneof![Just(2usize), Just(4), Just(8)]),
    ]
}

proptest! {
    #[test]
    fn bit_vector_roundtrip(width in 1usize..=20, raw in 0usize..1 << 20) {
        let v = raw & ((1 << width) - 1);
        let mut bits = vec![0u8; width];
        index_to_bits(v, &mut bits);
        prop_assert_eq!(bits_to_index(&bits), v);
    }

    #[test]
    fn combinadic_roundtrip((n, k, rank) in (1usize..=20)
        .prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), 0..binomial(n, k)))) {
        let p = combination_unrank(n, k, rank).unwrap();
        prop_assert_eq!(p.indices.len(), k);
        prop_assert!(p.indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(combination_rank(&p).unwrap(), rank);
    }

    #[test]
    fn constellations_have_unit_energy((kind, m) in kinds()) {
        let c = build_constellation(kind, m).unwrap();
        let mean: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        prop_assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn demapping_tolerates_sub_half_distance_noise(
        (kind, m) in kinds(),
        label_raw in 0usize..64,
        angle in 0.0f64..core::f64::consts::TAU,
        radius in 0.0f64..0.49,
    ) {
        let c = build_constellation(kind, m).unwrap();
        let label = label_raw % m;
        let mut dmin = f64::INFINITY;
        for i in 0..m {
            for k in i + 1..m {
                dmin = dmin.min((c.point(i) - c.point(k)).norm());
            }
        }
        let z = c.point(label) + C64::from_polar(radius * dmin, angle);
        prop_assert_eq!(c.nearest_label(z), label);
    }

    #[test]
    fn zero_forcing_identity_on_random_channels(seed in 0u64..500, nr in 1usize..=4, extra in 0usize..=2) {
        let nt = nr + extra;
        let mut rng = SimRng::new(seed);
        let h = srmimo_core::channel::sample_mimo(nr, nt, &mut rng).unwrap();
        match zf_precoder(&h) {
            Ok(p) => {
                let hp = h.mul(&p);
                prop_assert!(hp.max_abs_diff(&CMat::identity(nr)) < 1e-9);
            }
            Err(srmimo_core::Error::SingularChannel) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    #[test]
    fn frame_width_always_equals_spectral_efficiency(pick in 0usize..11, dims in (1usize..=3, 1usize..=2)) {
        let (a, b) = dims;
        let kind = ConstellationKind::Psk;
        let cfg = match pick {
            0 => SchemeConfig::Sm { nt: a + 1, nr: b, m: 4, kind },
            1 => SchemeConfig::Gsm { nt: a + 2, nr: b, na: 2, m: 4, kind },
            2 => SchemeConfig::Qsm { nt: a + 1, nr: b, m: 4, kind },
            3 => SchemeConfig::Rsm { nt: 4, nr: 1 << b, m: 4, kind, detector: Detector::Ml },
            4 => SchemeConfig::Rqsm { nt: 4, nr: 1 << b, m: 4, kind, detector: Detector::Greedy },
            5 => SchemeConfig::Mbm { mirrors: a, nr: b, m: 4, kind },
            6 => SchemeConfig::RisMimo { n: 8 * a, ng: a, m: 4, kind },
            7 => SchemeConfig::RisGsm { n: 16, ng: 4, na: a.min(3), m: 4, kind },
            8 => SchemeConfig::RisQsm { n: 16, ng: 4, na: a.min(3), m: 4, kind },
            9 => SchemeConfig::RisRsm { n: 8, nr: 1 << b, symbol: Some((kind, 4)), detector: Detector::Greedy },
            _ => SchemeConfig::RisRqsm { n: 8, nr: 1 << b, pam_order: if a == 1 { None } else { Some(2) } },
        };
        let scheme = build_scheme(&cfg).unwrap();
        prop_assert_eq!(scheme.bits_per_frame(), spectral_efficiency(&cfg).unwrap());
    }
}
