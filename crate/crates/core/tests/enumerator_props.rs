use hypbounds::enumerator::*;
use proptest::prelude::*;

/// Cyclically reduced words: each letter avoids the inverse of the previous one.
fn word(max_len: usize) -> impl Strategy<Value = Word> {
    (0u8..4, prop::collection::vec(0u8..3, 0..max_len)).prop_filter_map(
        "not cyclically reduced",
        |(first, steps)| {
            let mut letters = vec![first];
            for s in steps {
                let prev = *letters.last().unwrap();
                let choices: Vec<u8> = (0..4).filter(|&x| x != prev ^ 1).collect();
                letters.push(choices[s as usize]);
            }
            Word::from_letters(letters).ok()
        },
    )
}

fn reversed(w: &Word) -> Word {
    Word::from_letters(w.letters().iter().rev().copied().collect()).unwrap()
}

proptest! {
    #[test]
    fn traces_are_integers_congruent_to_two(w in word(12)) {
        let t = word_trace_exact(&w);
        prop_assert_eq!(t.rem_euclid(4), 2);
        prop_assert_eq!(word_trace(&w), t as f64);
    }

    #[test]
    fn trace_is_a_class_invariant(w in word(12), k in 0usize..12) {
        let t = word_trace_exact(&w);
        prop_assert_eq!(word_trace_exact(&w.rotation(k)), t);
        prop_assert_eq!(word_trace_exact(&w.inverse()), t);
        prop_assert_eq!(word_trace_exact(&w.mirror()), t);
        prop_assert_eq!(word_trace_exact(&reversed(&w)), t);
    }

    #[test]
    fn canonical_form_is_idempotent(w in word(12), k in 0usize..12) {
        let c = w.canonical();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(w.rotation(k).canonical(), c.clone());
        prop_assert_eq!(w.inverse().canonical(), c);
    }

    #[test]
    fn primitive_root_rebuilds_the_word(w in word(12)) {
        let (root, k) = w.primitive_root();
        prop_assert!(root.is_primitive());
        prop_assert_eq!(root.letters().repeat(k), w.letters().to_vec());
    }

    #[test]
    fn display_round_trips(w in word(12)) {
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_ignore_rotation_and_mirror(w in word(6), k in 0usize..6) {
        prop_assume!(is_hyperbolic_word(&w));
        let cfg = SpectrumConfig::default();
        let (n, _) = count_class(&w, &cfg).unwrap();
        prop_assert_eq!(count_class(&w.rotation(k), &cfg).unwrap().0, n);
        prop_assert_eq!(count_class(&w.mirror(), &cfg).unwrap().0, n);
        prop_assert_eq!(count_class(&w.inverse(), &cfg).unwrap().0, n);
    }
}
