use std::collections::BTreeMap;

use aca_core::sequences::{
    analyze, block, cyclic, insert_noise, quadratic_length, quadratic_universal, random_walk_sequence,
    scattered_length, scattered_sequence, sweep_length, sweep_sequence, UpdateSequence,
};
use proptest::prelude::*;

fn tally(prefix: &[i64], a: i64, b: i64) -> BTreeMap<i64, u64> {
    (a..=b).map(|k| (k, prefix.iter().filter(|&&p| p == k).count() as u64)).collect()
}

#[test]
fn quadratic_tally_matches_direct_count() {
    let seq = quadratic_universal();
    let a = analyze(&seq, 13, (-2, 2)).unwrap();
    assert_eq!(a.per_cell_counts, tally(&[0, -1, 0, -1, 1, 0, -1, 1, -2, 0, 2, -1, 1], -2, 2));
    assert_eq!(a.min_count, 1);
    assert_eq!(a.prefix_len, 13);
}

#[test]
fn quadratic_visits_window_repeatedly() {
    let a = analyze(&quadratic_universal(), 200, (-5, 5)).unwrap();
    assert!(a.min_count >= 2, "{a:?}");
}

#[test]
fn quadratic_groups_have_expected_lengths() {
    let prefix = quadratic_universal().prefix(quadratic_length(30) as usize);
    let mut at = 3;
    assert_eq!(&prefix[..3], &[0, -1, 0]);
    for g in 1..=30u64 {
        let mut group = block(g);
        group.extend(block(g - 1));
        group.extend(block(g));
        assert_eq!(&prefix[at..at + group.len()], group.as_slice());
        at += group.len();
        assert_eq!(at as u64, quadratic_length(g));
    }
}

#[test]
fn sweep_lengths_up_to_a_thousand() {
    let prefix = sweep_sequence().prefix(sweep_length(1000) as usize);
    let mut at = 0;
    for t in 0..=1000u64 {
        let b = block(t);
        assert_eq!(&prefix[at..at + b.len()], b.as_slice());
        at += b.len();
        assert_eq!(at as u64 * 2, (t * t + 3 * t + 2));
    }
}

#[test]
fn scattered_lengths_and_support() {
    for p in 1..=8u64 {
        let seq = scattered_sequence(p as i64).unwrap();
        let n = scattered_length(p, 100) as usize;
        let prefix = seq.prefix(n);
        assert!(prefix.iter().all(|x| x.rem_euclid(p as i64) == 0));
        // group boundaries: each group ends with its widest scan's right end
        for t in 1..=100u64 {
            let end = scattered_length(p, t) as usize;
            assert_eq!(prefix[end - 1], (3 * t * p * p) as i64);
            // 6p(T² + (1 + 1/(2p))T) in exact integers
            assert_eq!(2 * p * end as u64, 12 * p * p * t * t + 12 * p * p * t + 6 * p * t);
        }
    }
    assert_eq!(scattered_length(1, 1), 15);
    let a = analyze(&scattered_sequence(2).unwrap(), 100, (-4, 4)).unwrap();
    assert_eq!(a.support_gap, Some(2));
    let prefix = scattered_sequence(3).unwrap().prefix(1000);
    assert!(prefix.iter().all(|x| x % 3 == 0));
}

#[test]
fn random_walk_recurrence() {
    for seed in [0u64, 1, 42, u64::MAX] {
        let a = analyze(&random_walk_sequence(seed), 1_000_000, (-3, 3)).unwrap();
        assert!(a.min_count >= 1, "seed {seed}: {a:?}");
    }
}

#[test]
fn constant_sequence_is_not_universal() {
    let a = analyze(&cyclic(vec![0]).unwrap(), 10_000, (-1, 1)).unwrap();
    assert_eq!(a.min_count, 0);
    assert_eq!(a.universality_witness_k, 0);
}

#[test]
fn sequence_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let path = dir.join("seq.txt");
    std::fs::write(&path, "0 -1\n0, 1\n").unwrap();
    let s = UpdateSequence::parse(&format!("explicit:@{}", path.display())).unwrap();
    assert_eq!(s.prefix(10), [0, -1, 0, 1]);
    let ins = dir.join("ins.txt");
    std::fs::write(&ins, "0 7\n2 -3\n").unwrap();
    let s = UpdateSequence::parse(&format!("inserted:base=quadratic,@{}", ins.display())).unwrap();
    assert_eq!(s.prefix(6), [7, 0, -1, -3, 0, -1]);
    assert!(UpdateSequence::parse("explicit:@/nonexistent/file").is_err());
}

proptest! {
    #[test]
    fn blocks_share_parity(i in 0u64..500) {
        let b = block(i);
        prop_assert_eq!(b.len() as u64, i + 1);
        prop_assert!(b.iter().all(|x| (x - i as i64).rem_euclid(2) == 0));
        prop_assert!(b.windows(2).all(|w| w[1] - w[0] == 2));
    }

    #[test]
    fn replay_is_stable(seed in any::<u64>(), n in 0usize..2000) {
        prop_assert_eq!(random_walk_sequence(seed).prefix(n), random_walk_sequence(seed).prefix(n));
        let w = random_walk_sequence(seed).prefix(n);
        if let Some(&first) = w.first() {
            prop_assert_eq!(first, 0);
        }
        prop_assert!(w.windows(2).all(|p| (p[1] - p[0]).abs() == 1));
    }

    #[test]
    fn quadratic_witness_grows_with_prefix(w in 0i64..6, k in 1u64..5) {
        // find a prefix long enough for k visits, then check that longer ones keep it
        let seq = quadratic_universal();
        let mut n = 1;
        while analyze(&seq, n, (-w, w)).unwrap().min_count < k {
            n *= 2;
        }
        for m in [n, n + 1, 2 * n, 3 * n] {
            prop_assert!(analyze(&seq, m, (-w, w)).unwrap().min_count >= k);
        }
    }

    #[test]
    fn insertions_never_lower_counts(
        mut ins in proptest::collection::vec((0u64..300, -10i64..=10), 0..20),
        n in 1u64..400,
        a in -12i64..0,
        b in 0i64..12,
    ) {
        ins.sort_by_key(|x| x.0);
        let base = analyze(&quadratic_universal(), n, (a, b)).unwrap();
        let noisy = insert_noise(quadratic_universal(), ins.clone()).unwrap();
        let with = analyze(&noisy, n + ins.len() as u64, (a, b)).unwrap();
        for (cell, c) in &base.per_cell_counts {
            prop_assert!(with.per_cell_counts[cell] >= *c);
        }
    }

    #[test]
    fn spliced_prefix_contains_base(mut ins in proptest::collection::vec((0u64..50, -5i64..=5), 0..10)) {
        ins.sort_by_key(|x| x.0);
        let base = sweep_sequence().prefix(60);
        let s = insert_noise(sweep_sequence(), ins.clone()).unwrap().prefix(60 + ins.len());
        // removing the inserted entries gives back the base prefix
        let mut rest = s.clone();
        for (k, &(idx, pos)) in ins.iter().enumerate() {
            let at = idx as usize + k;
            prop_assert_eq!(rest[at], pos);
            rest[at] = i64::MIN;
        }
        rest.retain(|&x| x != i64::MIN);
        prop_assert_eq!(rest, base);
    }
}
