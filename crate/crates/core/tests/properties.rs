use num_bigint::BigUint;
use num_complex::Complex64;
use pas_core::ccdm::{multiset_count, Ccdm};
use pas_core::edi::{edi_estimate, windowed_energies, WindowAccumulator};
use pas_core::framer::PamLabeling;
use pas_core::{AmplitudeBlock, BitBlock, Composition};
use proptest::prelude::*;

fn composition() -> impl Strategy<Value = Composition> {
    (2usize..=5)
        .prop_flat_map(|q| proptest::collection::vec(0usize..=16, q))
        .prop_filter("n in 2..=64 with two used amplitudes", |c| {
            let n: usize = c.iter().sum();
            (2..=64).contains(&n) && c.iter().filter(|&&x| x > 0).count() >= 2
        })
        .prop_map(|counts| Composition::new(Composition::odd_alphabet(counts.len()), counts).unwrap())
}

fn rank_below(m: &BigUint, seed: u64) -> BigUint {
    // A deterministic spread of ranks over [0, m).
    let x = BigUint::from(seed) * BigUint::from(0x9E37_79B9_7F4A_7C15u64);
    x % m
}

fn lex_less(a: &AmplitudeBlock, b: &AmplitudeBlock) -> bool {
    a.as_slice() < b.as_slice()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unrank_rank_round_trip(c in composition(), seed in any::<u64>()) {
        let ccdm = Ccdm::new(c.clone());
        let m = multiset_count(&c);
        let r = rank_below(&m, seed);
        let block = ccdm.unrank(&r).unwrap();
        prop_assert!(c.matches(&block));
        prop_assert_eq!(ccdm.rank(&block).unwrap(), r.clone());
        if &r + 1u32 < m {
            let next = ccdm.unrank(&(&r + 1u32)).unwrap();
            prop_assert!(lex_less(&block, &next));
        }
    }

    #[test]
    fn encode_decode_round_trip(c in composition(), bits in proptest::collection::vec(0u8..=1, 0..64)) {
        let ccdm = Ccdm::new(c.clone());
        let k = ccdm.input_length();
        let mut b = bits;
        b.resize(k, 1);
        let input = BitBlock::new(b);
        let out = ccdm.encode(&input).unwrap();
        prop_assert!(c.matches(&out));
        prop_assert_eq!(ccdm.decode(&out).unwrap(), input);
    }

    #[test]
    fn edi_scales_with_energy(re in proptest::collection::vec(-5.0f64..5.0, 40), c in 0.1f64..10.0) {
        let x: Vec<Complex64> = re.iter().enumerate().map(|(i, &r)| Complex64::new(r, (i % 3) as f64)).collect();
        let y: Vec<Complex64> = x.iter().map(|v| v * c).collect();
        let ex = edi_estimate(&x, 10).unwrap().linear;
        let ey = edi_estimate(&y, 10).unwrap().linear;
        prop_assert!(ex >= 0.0);
        prop_assert!((ey - c * c * ex).abs() <= 1e-9 * (1.0 + ey.abs()));
    }

    #[test]
    fn streaming_windows_match_batch(e in proptest::collection::vec(0.0f64..100.0, 12..200), half in 1usize..5) {
        let w = 2 * half;
        prop_assume!(w < e.len());
        let x: Vec<Complex64> = e.iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect();
        let batch = windowed_energies(&x, w).unwrap().values;
        let mut acc = WindowAccumulator::new(w).unwrap();
        let stream: Vec<f64> = e.iter().filter_map(|&v| acc.push(v)).collect();
        prop_assert_eq!(batch.len(), e.len() - w);
        for (i, (a, b)) in batch.iter().zip(&stream).enumerate() {
            let direct: f64 = e[i..=i + w].iter().sum();
            prop_assert!((a - b).abs() <= 1e-9 * direct.max(1.0));
            prop_assert!((a - direct).abs() <= 1e-9 * direct.max(1.0));
        }
    }
}

#[test]
fn labeling_is_a_bijection() {
    for m in 2..=5 {
        let lab = PamLabeling::new(m);
        let mut seen = vec![false; 1 << m];
        for l in lab.levels() {
            let label = lab.label(l) as usize;
            assert!(!seen[label]);
            seen[label] = true;
            assert_eq!(lab.level_of_label(label as u32), l);
        }
        assert!(seen.iter().all(|&s| s));
        // Neighbouring amplitudes of equal sign differ in exactly one bit.
        let levels = lab.levels();
        for w in levels.windows(2).filter(|w| w[0] > 0) {
            assert_eq!((lab.label(w[0]) ^ lab.label(w[1])).count_ones(), 1);
        }
    }
}
