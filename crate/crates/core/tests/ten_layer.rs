use layered_echo::medium::read_medium;
use layered_echo::{
    enumerate_reflection, enumerate_transmission, reflection_green, transmission_green, Medium,
};

fn ten_layer() -> Medium {
    read_medium(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/ten_layer.taur"
    ))
    .unwrap()
}

#[test]
fn ten_layer_counts_at_rounded_cutoffs() {
    // Frozen: what the table values give at the cutoffs as printed.
    let m = ten_layer();
    assert_eq!(enumerate_reflection(&m, 5.38).count(), 19237);
    assert_eq!(enumerate_transmission(&m, 3.69).count(), 35052);
}

#[test]
fn ten_layer_counts_at_unrounded_cutoffs() {
    // Cutoffs 4.38014 + 1 and 2.19007 + 1.5, which "5.38" and "3.69" round.
    let m = ten_layer();
    assert_eq!(enumerate_reflection(&m, 5.38014).count(), 19242);
    assert_eq!(enumerate_transmission(&m, 3.69007).count(), 35059);
    // The last reflection arrival sits exactly on the cutoff.
    let last = enumerate_reflection(&m, 5.38014)
        .map(|(_, t)| t)
        .fold(0.0, f64::max);
    assert_eq!(last, 5.38014);
}

#[test]
fn ten_layer_first_arrivals() {
    let m = ten_layer();
    let g = reflection_green(&m, 5.38).unwrap();
    assert_eq!(g.terms[0].time, 0.432779);
    assert_eq!(g.terms[0].amplitude, -0.821708);
    let h = transmission_green(&m, 3.69).unwrap();
    // Half the sum of the tau column (4.3801415); the cumulative column prints
    // 4.38014, so the two agree only to table precision.
    assert_eq!(h.terms[0].time, 0.5 * m.layer_taus().iter().sum::<f64>());
    assert!((h.terms[0].time - 2.19007).abs() < 5e-6);
    let direct: f64 = m.reflections().iter().map(|r| (1.0 - r * r).sqrt()).product();
    assert!((h.terms[0].amplitude - direct).abs() <= 1e-12 * direct.abs());
}

#[test]
fn ten_layer_train_matches_enumeration() {
    let m = ten_layer();
    assert_eq!(
        reflection_green(&m, 5.38).unwrap().len(),
        enumerate_reflection(&m, 5.38).count()
    );
    assert_eq!(
        transmission_green(&m, 3.69).unwrap().len(),
        enumerate_transmission(&m, 3.69).count()
    );
}

#[test]
fn ten_layer_trains_independent_of_thread_count() {
    let m = ten_layer();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut csv = Vec::new();
            reflection_green(&m, 5.38)
                .unwrap()
                .write_csv(&mut csv, true)
                .unwrap();
            transmission_green(&m, 3.69)
                .unwrap()
                .write_csv(&mut csv, true)
                .unwrap();
            csv
        })
    };
    assert_eq!(run(1), run(8));
}
