mod common;

use coinwalk::analysis::tvd;
use coinwalk::classical::Distribution;
use coinwalk::coin::{dft_spec, CoinOperator};
use coinwalk::evolution::{self, DephasingPlacement, StepMap};
use coinwalk::graph::{assign_ports, parse_graph_json, PortGraph};
use coinwalk::meter::DephasingKraus;
use coinwalk::shift::ShiftOperator;
use coinwalk::state::DensityOperator;
use coinwalk::{CMatrix, C64};
use proptest::prelude::*;

use common::*;

/// Random simple graph on up to 7 vertices with at least one edge.
fn arb_edges() -> impl Strategy<Value = Vec<(usize, usize)>> {
    (2usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let len = pairs.len();
        proptest::sample::subsequence(pairs, 1..=len)
    })
}

fn arb_density(dim: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let a = CMatrix::from_iterator(dim, dim, v.into_iter().map(|(re, im)| C64::new(re, im)));
        let rho = &a * a.adjoint();
        let tr = rho.trace().re.max(1e-300);
        rho.unscale(tr)
    })
}

fn arb_distribution(len: usize) -> impl Strategy<Value = Distribution> {
    proptest::collection::vec(0.0f64..1.0, len).prop_map(|v| {
        let total: f64 = v.iter().sum();
        if total == 0.0 {
            Distribution::uniform(v.len())
        } else {
            Distribution::new(v.iter().map(|x| x / total).collect()).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn zeta_is_fixed_point_free_involution(edges in arb_edges()) {
        let g = PortGraph::from_edge_list(&assign_ports(&edges).unwrap()).unwrap();
        for j in 0..g.num_vertices() {
            for k in g.used_ports(j).collect::<Vec<_>>() {
                let h = g.zeta(j, k).unwrap();
                prop_assert_ne!((h.vertex, h.port), (j, k));
                let back = g.zeta(h.vertex, h.port).unwrap();
                prop_assert_eq!((back.vertex, back.port), (j, k));
            }
        }
        prop_assert!(ShiftOperator::port_swap(&g).is_involution());
    }

    #[test]
    fn graph_file_round_trip(edges in arb_edges()) {
        let g = PortGraph::from_edge_list(&assign_ports(&edges).unwrap()).unwrap();
        let text = serde_json::to_string(&g.to_file()).unwrap();
        prop_assert_eq!(parse_graph_json(&text).unwrap(), g);
    }

    #[test]
    fn cp_step_preserves_invariants(
        edges in arb_edges(),
        beta in 0.0f64..=1.0,
        p in 0.0f64..=1.0,
        after in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let g = PortGraph::from_edge_list(&assign_ports(&edges).unwrap()).unwrap();
        let coin = CoinOperator::build(&g, &dft_spec(&g)).unwrap();
        let placement = if after { DephasingPlacement::AfterShift } else { DephasingPlacement::BeforeShift };
        let step = StepMap::unitary(coin, ShiftOperator::port_swap(&g)).unwrap()
            .with_coin_measurement(beta).unwrap()
            .with_vertex_dephasing(p, placement).unwrap();
        // weight only on used half-edges, as the coin keeps it there
        let mut rng = <rand_chacha::ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);
        let m = random_density_on_used(&mut rng, &g);
        let mut rho = DensityOperator::new(g.num_vertices(), g.degree(), m).unwrap();
        for _ in 0..3 {
            rho = evolution::cp_step(&rho, &step).unwrap();
            let r = rho.invariants();
            prop_assert!(r.trace_error < 1e-10);
            prop_assert!(r.hermiticity_error < 1e-10);
            prop_assert!(r.min_eigenvalue > -1e-10);
        }
    }

    #[test]
    fn dephasing_scales_off_diagonals(dim in 2usize..=5, beta in 0.0f64..=1.0, rho in arb_density(5)) {
        let rho = rho.view((0, 0), (dim, dim)).into_owned();
        let kraus = DephasingKraus::new(dim, beta).unwrap();
        let out = kraus.apply(&rho);
        let c = (beta * std::f64::consts::FRAC_PI_2).cos();
        for a in 0..dim {
            for b in 0..dim {
                let expected = if a == b { rho[(a, b)] } else { rho[(a, b)] * c };
                prop_assert!((out[(a, b)] - expected).norm() < 1e-12);
            }
        }
        prop_assert!(kraus.completeness_error() < 1e-12);
    }

    #[test]
    fn tvd_is_a_metric(p in arb_distribution(6), q in arb_distribution(6), r in arb_distribution(6)) {
        let pq = tvd(&p, &q).unwrap();
        prop_assert_eq!(pq, tvd(&q, &p).unwrap());
        prop_assert_eq!(tvd(&p, &p).unwrap(), 0.0);
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!(tvd(&p, &r).unwrap() <= pq + tvd(&q, &r).unwrap() + 1e-12);
    }
}
