use ppadforge::birthday::{action_count, build_birthday, encode_profile, decode_mixed, BirthdayParams};
use ppadforge::games::MixedProfile;
use ppadforge::instances::random_bipartite_polymatrix;
use proptest::prelude::*;

/// Independent recount: blocks × α patterns × half-size seeker sets.
fn recount(blocks: usize, alpha_bits: usize) -> usize {
    let half = blocks.div_ceil(2);
    let seekers = (0u32..(1 << blocks)).filter(|m| m.count_ones() as usize == half).count();
    blocks * (1 << alpha_bits) * seekers
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn structure_of_random_reductions(seed in any::<u64>(), d in 1usize..=3, q in prop::collection::vec(0.0f64..=1.0, 8)) {
        let src = random_bipartite_polymatrix(4, d, seed).unwrap();
        let params = BirthdayParams::new(0.5, 1.0, 4).unwrap();
        let bg = build_birthday(&src, params).unwrap();
        let len = bg.codec.len();
        prop_assert_eq!(len, recount(bg.codec.blocks, bg.codec.alpha_bits));
        prop_assert_eq!(len as u128, action_count(4, 2));
        prop_assert_eq!(len, 64);
        prop_assert_eq!((bg.game.rows(), bg.game.cols()), (len, len));
        for row in bg.game.r.iter().chain(&bg.game.c) {
            prop_assert!(row.iter().all(|x| (0.0..=1.0).contains(x)));
        }
        for i in 0..len {
            prop_assert_eq!(bg.codec.encode(&bg.codec.decode(i).unwrap()).unwrap(), i);
        }
        let prof = MixedProfile { p: q };
        let (x, y) = encode_profile(&bg, &prof).unwrap();
        let back = decode_mixed(&bg, &x, &y).unwrap();
        for (a, b) in back.p.iter().zip(&prof.p) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
