use rand::seq::index::sample;
use rand::Rng;
use streamhp::ingest::seeded_rng;
use streamhp::sketch::{bf_fpp, BloomFilter, MinHashFamily, MERSENNE_31};

#[test]
fn bloom_false_positive_rate_tracks_formula() {
    let (n, hashes) = (10_000u64, 4u32);
    let m = 105_000u64;
    let predicted = bf_fpp(hashes, n, m);
    assert!((0.005..0.02).contains(&predicted), "operating point {predicted}");

    let mut bf = BloomFilter::new(m, hashes).unwrap();
    let mut rng = seeded_rng(17);
    // inserted keys are even, probes odd, so no probe was inserted
    let inserted: Vec<u64> = (0..n).map(|_| rng.random::<u64>() & !1).collect();
    for &k in &inserted {
        bf.insert(k);
    }
    assert!(inserted.iter().all(|&k| bf.query(k)));

    let probes = 100_000;
    let hits = (0..probes).filter(|_| bf.query(rng.random::<u64>() | 1)).count();
    let empirical = hits as f64 / probes as f64;
    let ratio = empirical / predicted;
    assert!((0.5..=2.0).contains(&ratio), "empirical {empirical} predicted {predicted}");
}

#[test]
fn bloom_never_forgets_over_many_pairs() {
    let mut bf = BloomFilter::new(1 << 20, 4).unwrap();
    let mut rng = seeded_rng(3);
    for _ in 0..100_000 {
        let k = rng.random::<u64>();
        bf.insert(k);
        assert!(bf.query(k));
    }
}

#[test]
fn disjoint_sets_collide_about_once_per_part_count() {
    // a prime part count keeps the product of hashes uniform over residues
    let parts = 101u32;
    let trials = 20_000u64;
    let mut rng = seeded_rng(99);
    let mut same = 0;
    for t in 0..trials {
        let fam = MinHashFamily::new(4, MERSENNE_31, t).unwrap();
        let picks = sample(&mut rng, 1_000_000, 16).into_vec();
        let a: Vec<u32> = picks[..8].iter().map(|&x| x as u32).collect();
        let b: Vec<u32> = picks[8..].iter().map(|&x| x as u32).collect();
        if fam.part(&a, parts) == fam.part(&b, parts) {
            same += 1;
        }
    }
    let rate = same as f64 / trials as f64;
    let expected = 1.0 / parts as f64;
    assert!(
        (0.5 * expected..=1.5 * expected).contains(&rate),
        "agreement {rate}, expected about {expected}"
    );
}

#[test]
fn identical_sets_always_agree() {
    let mut rng = seeded_rng(5);
    for t in 0..1000 {
        let fam = MinHashFamily::new(4, MERSENNE_31, t).unwrap();
        let mut a: Vec<u32> = (0..6).map(|_| rng.random_range(0..1_000_000)).collect();
        let pa = fam.part(&a, 256);
        a.rotate_left(2);
        assert_eq!(pa, fam.part(&a, 256));
    }
}
