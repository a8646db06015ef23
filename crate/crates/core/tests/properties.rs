use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vkm_core::invariants::{extract_gauss_code, random_diagram, random_walk, virtual_trefoil};
use vkm_core::moves::inverse_site;
use vkm_core::{apply_move, catalog, code_key, find_matches, parse_tdf, serialize_tdf, Direction, TangleDiagram};

fn random_relabel(d: &TangleDiagram, rng: &mut ChaCha8Rng) -> TangleDiagram {
    let n = d.nodes().len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let shift: Vec<u8> = d.nodes().iter().map(|k| rng.gen_range(0..k.degree() as u8)).collect();
    d.relabel(&order, &shift).expect("a permutation with in-range shifts")
}

fn fixtures() -> Vec<TangleDiagram> {
    let mut out: Vec<TangleDiagram> =
        catalog().schemas().iter().flat_map(|m| [m.lhs.clone(), m.rhs.clone()]).collect();
    out.push(virtual_trefoil());
    out.extend((0..8).map(|s| random_diagram(catalog(), s, 20)));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_code_ignores_names(k in 0usize..75, seed: u64) {
        let fx = fixtures();
        let d = &fx[k % fx.len()];
        let r = random_relabel(d, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(r.validate().is_ok());
        prop_assert_eq!(code_key(&r), code_key(d));
    }

    #[test]
    fn tdf_round_trip(seed in 0u64..10_000, steps in 0usize..25) {
        let d = random_diagram(catalog(), seed, steps);
        let text = serialize_tdf(&d);
        let back = parse_tdf(&text).unwrap();
        prop_assert_eq!(code_key(&back), code_key(&d));
        prop_assert_eq!(serialize_tdf(&back), text);
    }

    #[test]
    fn moves_undo_and_stay_valid(seed in 0u64..10_000, steps in 0usize..15, pick: u64) {
        let d = random_diagram(catalog(), seed, steps);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let m = &catalog().schemas()[rng.gen_range(0..catalog().len())];
        let dir = if rng.gen() { Direction::Forward } else { Direction::Backward };
        let sites = find_matches(&d, m, dir);
        prop_assume!(!sites.is_empty());
        let site = &sites[rng.gen_range(0..sites.len())];
        let r = apply_move(&d, m, site, dir).unwrap();
        prop_assert!(r.diagram.validate().is_ok());
        prop_assert!(extract_gauss_code(&r.diagram).unwrap().is_well_formed());
        let k = inverse_site(&d, &r.diagram, m, dir);
        prop_assert!(k.is_some(), "{} {} has no inverse", m.id, dir);
    }

    #[test]
    fn walks_from_the_virtual_trefoil_keep_odd_writhe(seed in 0u64..1_000, steps in 0usize..12) {
        let d = random_walk(catalog(), &virtual_trefoil(), seed, steps);
        prop_assert_eq!(vkm_core::odd_writhe(&d).unwrap(), 2);
    }
}

#[test]
fn relabel_rejects_non_permutations() {
    let d = &catalog().lookup("V2a").unwrap().rhs;
    let n = d.nodes().len();
    assert!(d.relabel(&vec![0; n], &vec![0; n]).is_none());
    assert!(d.relabel(&(0..n).collect::<Vec<_>>(), &vec![1; n]).is_none());
}
