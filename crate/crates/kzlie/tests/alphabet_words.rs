use kzlie::alphabet::*;
use kzlie::{Alphabet, Error, Letter, Word};
use proptest::prelude::*;

/// Lyndon test by comparing against every proper rotation.
fn lyndon_by_rotation(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &[&w[i..], &w[..i]].concat()[..])
}

fn brute_lyndon(k: u8, max_len: usize) -> Vec<Word> {
    let letters: Vec<u8> = (0..k).collect();
    let mut v: Vec<Word> = words_up_to(&letters, max_len).into_iter().filter(|w| lyndon_by_rotation(w)).collect();
    v.sort();
    v
}

#[test]
fn enumeration_matches_rotation_oracle() {
    for k in 1..=3u8 {
        for max_len in 1..=6 {
            let letters: Vec<u8> = (0..k).collect();
            let got = enumerate_lyndon_over(&letters, max_len, DEFAULT_LYNDON_CAP).unwrap();
            assert_eq!(got, brute_lyndon(k, max_len), "k={k} len={max_len}");
        }
    }
}

#[test]
fn enumeration_is_increasing() {
    let got = enumerate_lyndon(&Alphabet::braid(3).unwrap(), 5).unwrap();
    assert!(got.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn witt_counts_match_enumeration() {
    for k in 1..=4u64 {
        let letters: Vec<u8> = (0..k as u8).collect();
        let all = enumerate_lyndon_over(&letters, 5, DEFAULT_LYNDON_CAP).unwrap();
        for d in 1..=5u32 {
            let n = all.iter().filter(|w| w.len() == d as usize).count() as u64;
            assert_eq!(n, witt_count(k, d), "k={k} d={d}");
        }
    }
}

#[test]
fn two_letter_lyndon_up_to_three() {
    let a = Alphabet::x(2);
    let got: Vec<String> = enumerate_lyndon(&a, 3).unwrap().iter().map(|w| a.display_word(w)).collect();
    assert_eq!(got, ["x0", "x0x0x1", "x0x1", "x0x1x1", "x1"]);
}

#[test]
fn enumeration_respects_resource_cap() {
    let err = enumerate_lyndon_over(&[0, 1, 2], 8, 100).unwrap_err();
    assert!(matches!(err, Error::Resource(_)));
    assert!(matches!(enumerate_lyndon_over(&[0, 1], 0, 100), Err(Error::Domain(_))));
}

#[test]
fn braid_order_puts_last_block_first() {
    let a = Alphabet::braid(3).unwrap();
    let names: Vec<String> = a.indices().iter().map(|&k| a.name(k)).collect();
    assert_eq!(names, ["t23", "t13", "t12"]);
    let a4 = Alphabet::braid(4).unwrap();
    let (tn, rest) = a4.braid_split().unwrap();
    assert_eq!(a4.word_names(&tn), ["t34", "t24", "t14"]);
    assert_eq!(a4.word_names(&rest), ["t23", "t13", "t12"]);
    assert_eq!(
        a4.compare_letters(&Letter::braid(1, 4).unwrap(), &Letter::braid(2, 3).unwrap()).unwrap(),
        std::cmp::Ordering::Less
    );
}

#[test]
fn braid_letters_normalize_and_validate() {
    assert_eq!(Letter::braid(3, 1).unwrap(), Letter::braid(1, 3).unwrap());
    assert!(Letter::braid(2, 2).is_err());
    assert!(Letter::braid(0, 2).is_err());
    assert!(Alphabet::braid(1).is_err());
    assert!(matches!(Alphabet::braid(30), Err(Error::Resource(_))));
    assert!(Alphabet::free(&["a", "a"]).is_err());
}

#[test]
fn large_braid_names_use_underscores() {
    let a = Alphabet::braid(10).unwrap();
    let k = a.braid_index(3, 10).unwrap();
    assert_eq!(a.name(k), "t_3_10");
    assert_eq!(a.parse_letter("t_3_10").unwrap(), k);
}

#[test]
fn word_parsing_round_trips() {
    let a = Alphabet::braid(3).unwrap();
    let w = a.parse_word("t12t13t23").unwrap();
    assert_eq!(w.as_slice(), &[2, 1, 0]);
    assert_eq!(a.display_word(&w), "t12t13t23");
    assert_eq!(a.parse_word("t12,t23").unwrap().as_slice(), &[2, 0]);
    assert!(a.parse_word("t14").is_err());
    assert!(a.parse_word("1").unwrap().is_empty());
    let x = Alphabet::x(2);
    assert!(matches!(x.parse_word("x0x2"), Err(Error::Parse(_))));
}

#[test]
fn standard_factorization_examples() {
    let (a, b) = standard_factorization(&[0, 0, 1]).unwrap();
    assert_eq!((a.as_slice(), b.as_slice()), (&[0u8][..], &[0u8, 1][..]));
    let (a, b) = standard_factorization(&[0, 1, 1]).unwrap();
    assert_eq!((a.as_slice(), b.as_slice()), (&[0u8, 1][..], &[1u8][..]));
    assert!(standard_factorization(&[1, 0]).is_err());
    assert!(standard_factorization(&[0]).is_err());
}

#[test]
fn empty_word_is_not_lyndon() {
    assert!(is_lyndon(&[]).is_err());
}

proptest! {
    #[test]
    fn factorization_is_nonincreasing_lyndon(w in prop::collection::vec(0u8..3, 1..12)) {
        let f = lyndon_factorization(&w);
        let joined: Vec<u8> = f.iter().flat_map(|l| l.iter().copied()).collect();
        prop_assert_eq!(&joined, &w);
        for l in &f {
            prop_assert!(lyndon_by_rotation(l));
        }
        prop_assert!(f.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn is_lyndon_agrees_with_rotations(w in prop::collection::vec(0u8..3, 1..10)) {
        prop_assert_eq!(is_lyndon(&w).unwrap(), lyndon_by_rotation(&w));
    }

    #[test]
    fn standard_factors_are_lyndon_and_ordered(
        w in prop::sample::select(brute_lyndon(3, 7).into_iter().filter(|w| w.len() > 1).collect::<Vec<_>>())
    ) {
        let (l1, l2) = standard_factorization(&w).unwrap();
        prop_assert!(lyndon_by_rotation(&l1) && lyndon_by_rotation(&l2));
        prop_assert!(l1 < l2);
        // l2 is the longest proper Lyndon suffix.
        for i in 1..w.len() - l2.len() {
            prop_assert!(!lyndon_by_rotation(&w[i..]));
        }
    }
}
