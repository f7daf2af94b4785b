use std::collections::BTreeSet;

use layered_echo::medium::{read_medium_str, write_medium};
use layered_echo::transit::binomial;
use layered_echo::{
    branch_set, enumerate_reflection, enumerate_transmission, multi_binomial, reflection_amplitude,
    reflection_green, transmission_amplitude, Kind, Medium, PhysicalProfile, TransitVector,
};
use proptest::prelude::*;

fn medium(interfaces: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Medium> {
    interfaces
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.3..2.0f64, n),
                prop_oneof![Just(0.0), 0.0..1.5f64],
                prop::collection::vec(-0.97..0.97f64, n),
            )
        })
        .prop_map(|(taus, tail, rs)| Medium::new(taus, tail, rs).unwrap())
}

/// Integer travel times, for the exhaustive box comparison.
fn integer_medium() -> impl Strategy<Value = Medium> {
    (2..=4usize)
        .prop_flat_map(|n| (prop::collection::vec(1..=3u32, n), 0..=2u32))
        .prop_map(|(taus, tail)| {
            let n = taus.len();
            Medium::new(
                taus.into_iter().map(f64::from).collect(),
                f64::from(tail),
                vec![0.5; n],
            )
            .unwrap()
        })
}

/// Every vector in the box `k_n <= cutoff / tau_n` that is admissible and
/// arrives in time.
fn box_enumeration(m: &Medium, kind: Kind, cutoff: f64) -> BTreeSet<Vec<u32>> {
    let bounds: Vec<u32> = m
        .layer_taus()
        .iter()
        .map(|t| (cutoff / t).floor() as u32)
        .collect();
    let mut out = BTreeSet::new();
    let mut k = vec![0u32; bounds.len()];
    loop {
        if let Ok(v) = TransitVector::new(kind, k.clone()) {
            if v.arrival_time(m) <= cutoff {
                out.insert(k.clone());
            }
        }
        let Some(j) = (0..k.len()).find(|&j| k[j] < bounds[j]) else {
            return out;
        };
        k[..j].iter_mut().for_each(|x| *x = 0);
        k[j] += 1;
    }
}

/// The binomial sum written out term by term with explicit `T` powers,
/// together with the sum of the summands' magnitudes.
fn naive_amplitude(rs: &[f64], k: &TransitVector) -> (f64, f64) {
    let shifted = k.left_shift();
    let terms: Vec<f64> = branch_set(k)
        .iter()
        .map(|b| {
            (0..rs.len())
                .map(|n| {
                    let (kn, sn, bn) = (k.counts()[n], shifted[n], b.counts()[n]);
                    let t = (1.0 - rs[n] * rs[n]).sqrt();
                    let (u, t_exp) = match k.kind() {
                        Kind::Reflection => (sn.min(1), 2 * bn),
                        Kind::Transmission => (0, 2 * bn + 1),
                    };
                    binomial(kn, bn)
                        * binomial(sn - u, bn - u)
                        * (-rs[n]).powi((sn - bn) as i32)
                        * rs[n].powi((kn - bn) as i32)
                        * t.powi(t_exp as i32)
                })
                .product::<f64>()
        })
        .collect();
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

fn reflection_vector(interfaces: usize) -> impl Strategy<Value = TransitVector> {
    (1..=interfaces, prop::collection::vec(1..=5u32, interfaces)).prop_map(move |(support, mut counts)| {
        counts[0] = 1;
        counts[support..].iter_mut().for_each(|c| *c = 0);
        TransitVector::reflection(counts).unwrap()
    })
}

proptest! {
    #[test]
    fn transmission_coefficients_complete_reflection(m in medium(2..=12)) {
        for (r, t) in m.reflections().iter().zip(m.transmissions().values()) {
            prop_assert!((r * r + t * t - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn physical_profiles_give_valid_media(
        layers in 1..=6usize,
        seed in prop::collection::vec((0.1..50.0f64, 0.5..3.0f64, 0.1..40.0f64), 8),
        tail in prop::option::of(0.1..20.0f64),
    ) {
        let mut depths = vec![0.0];
        for &(dz, _, _) in &seed[..layers + 1] {
            depths.push(depths.last().unwrap() + dz);
        }
        if let Some(dz) = tail {
            depths.push(depths.last().unwrap() + dz);
        }
        let profile = PhysicalProfile {
            depths,
            densities: seed[..layers + 2].iter().map(|s| s.1).collect(),
            bulk_moduli: seed[..layers + 2].iter().map(|s| s.2).collect(),
        };
        let m = Medium::from_physical(&profile).unwrap();
        prop_assert_eq!(m.interfaces(), layers + 1);
        prop_assert!(m.layer_taus().iter().all(|&t| t > 0.0 && t.is_finite()));
        prop_assert!(m.reflections().iter().all(|r| r.abs() < 1.0));
        prop_assert!(m.tail_tau() >= 0.0);
        prop_assert!(Medium::new(m.layer_taus().to_vec(), m.tail_tau(), m.reflections().to_vec()).is_ok());
    }

    #[test]
    fn text_round_trip(m in medium(2..=12)) {
        let text = write_medium(&m);
        let back = read_medium_str(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(write_medium(&back), text);
    }

    #[test]
    fn enumeration_equals_box_filter(m in integer_medium(), cutoff in 1u32..=9) {
        let cutoff = f64::from(cutoff);
        let refl: BTreeSet<Vec<u32>> =
            enumerate_reflection(&m, cutoff).map(|(k, _)| k.counts().to_vec()).collect();
        prop_assert_eq!(refl, box_enumeration(&m, Kind::Reflection, cutoff));
        let trans: BTreeSet<Vec<u32>> =
            enumerate_transmission(&m, cutoff).map(|(k, _)| k.counts().to_vec()).collect();
        prop_assert_eq!(trans, box_enumeration(&m, Kind::Transmission, cutoff));
    }

    #[test]
    fn emitted_times_match_arrival_time(m in medium(2..=6), cutoff in 0.5..6.0f64) {
        for (k, t) in enumerate_reflection(&m, cutoff).chain(enumerate_transmission(&m, cutoff)) {
            prop_assert_eq!(t, k.arrival_time(&m));
            prop_assert!(t <= cutoff);
        }
    }

    #[test]
    fn shorter_cutoff_gives_prefix(m in medium(2..=5), a in 0.5..5.0f64, b in 0.5..5.0f64) {
        let (lo, hi) = (a.min(b), a.max(b));
        let short = reflection_green(&m, lo).unwrap();
        let long = reflection_green(&m, hi).unwrap();
        prop_assert!(short.len() <= long.len());
        prop_assert_eq!(&short.terms[..], &long.terms[..short.len()]);
        let short: BTreeSet<_> = enumerate_transmission(&m, lo).map(|(k, _)| k).collect();
        let long: BTreeSet<_> = enumerate_transmission(&m, hi).map(|(k, _)| k).collect();
        prop_assert!(short.is_subset(&long));
    }

    #[test]
    fn amplitude_ignores_reflections_outside_support(
        (k, rs) in (2..=8usize).prop_flat_map(|n| (reflection_vector(n), prop::collection::vec(-0.85..0.85f64, n))),
        up in any::<bool>(),
    ) {
        let support = k.counts().iter().take_while(|&&c| c > 0).count();
        prop_assume!(support < rs.len());
        let base = reflection_amplitude(&rs, &k).unwrap();
        let mut moved = rs.clone();
        for r in &mut moved[support..] {
            *r += if up { 0.1 } else { -0.1 };
        }
        prop_assert_eq!(reflection_amplitude(&moved, &k).unwrap().to_bits(), base.to_bits());
    }

    #[test]
    fn amplitude_bounded_by_branch_total(
        (k, rs) in (2..=5usize).prop_flat_map(|n| (reflection_vector(n), prop::collection::vec(-0.97..0.97f64, n))),
    ) {
        let shifted = k.left_shift();
        let lower: Vec<u32> = shifted.iter().map(|&s| s.min(1)).collect();
        let top: Vec<u32> = shifted.iter().zip(&lower).map(|(s, u)| s - u).collect();
        let total: f64 = branch_set(&k)
            .iter()
            .map(|b| {
                let bottom: Vec<u32> = b.counts().iter().zip(&lower).map(|(b, u)| b - u).collect();
                multi_binomial(k.counts(), b.counts()).unwrap() * multi_binomial(&top, &bottom).unwrap()
            })
            .sum();
        prop_assert!(reflection_amplitude(&rs, &k).unwrap().abs() <= total);
    }

    #[test]
    fn factored_evaluation_matches_term_by_term(
        (counts, rs) in (2..=5usize).prop_flat_map(|n| (
            prop::collection::vec(0..=5u32, n),
            prop::collection::vec(-0.95..0.95f64, n),
        )),
    ) {
        let mut refl = counts.clone();
        refl[0] = 1;
        if let Some(z) = refl.iter().position(|&c| c == 0) {
            refl[z..].iter_mut().for_each(|c| *c = 0);
        }
        let k = TransitVector::reflection(refl).unwrap();
        // Alternating summands can cancel heavily, so the tolerance scales
        // with their total magnitude rather than with the result.
        let (want, scale) = naive_amplitude(&rs, &k);
        let got = reflection_amplitude(&rs, &k).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{} vs {}", got, want);

        let mut trans = counts;
        trans[0] = 0;
        let k = TransitVector::transmission(trans).unwrap();
        let (want, scale) = naive_amplitude(&rs, &k);
        let got = transmission_amplitude(&rs, &k).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{} vs {}", got, want);
    }
}
