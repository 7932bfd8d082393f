use pir_lattice::codebook::{Codebook, Packet};
use pir_lattice::lattice::{verify_identity, Identity, NestedLatticePair, ScaledIntegerLattice};
use pir_lattice::protocol::{gen_queries, Group};
use pir_lattice::rates;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn pair_and_point(max_dim: usize) -> impl Strategy<Value = (NestedLatticePair, Vec<f64>)> {
    (1..=max_dim, 2u32..=8, 0.25f64..4.0).prop_flat_map(|(dim, q, beta)| {
        let pair = NestedLatticePair::new(dim, beta, q).unwrap();
        let r = 10.0 * f64::from(q) * beta;
        (Just(pair), prop::collection::vec(-r..r, dim))
    })
}

proptest! {
    #[test]
    fn modulo_lands_in_cell_and_is_idempotent((pair, s) in pair_and_point(8)) {
        let c = pair.coarse();
        let r = c.modulo(&s).unwrap();
        prop_assert!(c.in_voronoi(&r));
        prop_assert!(c.coset_distance(&c.modulo(&r).unwrap(), &r).unwrap() < 1e-9);
        let q = c.quantize(&s).unwrap();
        prop_assert!(c.contains(&q));
        for ((x, qi), ri) in s.iter().zip(q.iter()).zip(&r) {
            prop_assert!((x - qi - ri).abs() < 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn modulo_identities_hold((pair, s) in pair_and_point(8), a in -20i64..=20, factor in 0.1f64..5.0, neg in any::<bool>()) {
        let t: Vec<f64> = s.iter().rev().map(|x| 0.3 * x + 1.0).collect();
        let factor = if neg { -factor } else { factor };
        for id in [
            Identity::Distributive { s: s.clone(), t },
            Identity::QuantizeModulo { s: s.clone() },
            Identity::IntegerScaling { a, s: s.clone() },
            Identity::RealScaling { factor, s: s.clone() },
        ] {
            let check = verify_identity(&id, &pair).unwrap();
            prop_assert!(check.holds, "{:?}: {:?} vs {:?}", id, check.lhs, check.rhs);
        }
    }

    #[test]
    fn phi_round_trips(dim in 1usize..=6, q in 2u32..=9, power in 0.1f64..100.0, seed in any::<u64>()) {
        let cb = Codebook::with_max_bits(dim, q, power).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let packet = Packet::random(cb.bits(), &mut rng);
        let v = cb.phi(&packet).unwrap();
        prop_assert!(cb.pair().coarse().in_voronoi(&v));
        prop_assert!(cb.pair().fine().contains(&v));
        prop_assert_eq!(cb.phi_inv(&v).unwrap(), packet);
    }

    #[test]
    fn queries_sum_to_signed_unit_vector(m in 1usize..=12, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let i = pick.index(m);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let qp = gen_queries(m, i, &mut rng).unwrap();
        let (first, second) = (qp.query(Group::First), qp.query(Group::Second));
        for k in 0..m {
            let sum = first[k] + second[k];
            let expected = if k == i { qp.sign() } else { 0 };
            prop_assert_eq!(sum, expected.into());
        }
    }

    #[test]
    fn nonfading_sigma_minimized_at_alpha_opt(n in 2usize..=20, p in 0.01f64..100.0, delta in -0.5f64..0.5) {
        let best = rates::alpha_opt_nonfading(n, p).unwrap();
        let at_best = rates::sigma_eq_nonfading(best, n, p).unwrap();
        prop_assert!(at_best <= rates::sigma_eq_nonfading(best + delta, n, p).unwrap() + 1e-12);
        prop_assert!((at_best - rates::sigma_eq_opt_nonfading(n, p).unwrap()).abs() < 1e-12 * at_best.max(1.0));
    }

    #[test]
    fn scaled_lattice_matches_its_scale(dim in 1usize..=4, beta in 0.1f64..3.0, f in -4.0f64..4.0) {
        prop_assume!(f.abs() > 1e-3);
        let l = ScaledIntegerLattice::new(dim, beta).unwrap();
        prop_assert!((l.scaled(f).unwrap().scale() - beta * f.abs()).abs() < 1e-12);
    }
}
