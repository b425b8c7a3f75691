//! Property tests for the structural invariants.

use proptest::prelude::*;
use quantal_design::model::{Design, DesignSpace, InfoModel, Predictor, TwoParamModel};
use quantal_design::pso;
use quantal_design::{Link, LinkKind};

fn any_symmetric_link() -> impl Strategy<Value = Link<f64>> {
    prop_oneof![
        Just(Link::new(LinkKind::Logit).unwrap()),
        Just(Link::new(LinkKind::Probit).unwrap()),
        Just(Link::new(LinkKind::Laplace).unwrap()),
        (1.0..30.0f64).prop_map(|df| Link::new(LinkKind::StudentT(df)).unwrap()),
    ]
}

proptest! {
    #[test]
    fn symmetric_links_have_odd_w_and_even_weight(
        link in any_symmetric_link(),
        eta in -8.0..8.0f64,
    ) {
        let w_plus = link.weight(eta).unwrap();
        let w_minus = link.weight(-eta).unwrap();
        prop_assert!((w_plus - w_minus).abs() <= 1e-12 * w_plus.max(1.0));
        let wf_plus = link.w_function(eta).unwrap();
        let wf_minus = link.w_function(-eta).unwrap();
        prop_assert!((wf_plus + wf_minus).abs() <= 1e-12 * wf_plus.abs().max(1.0));
    }

    #[test]
    fn cdf_survival_complement(
        link in prop_oneof![
            Just(Link::new(LinkKind::Logit).unwrap()),
            Just(Link::new(LinkKind::Probit).unwrap()),
            Just(Link::new(LinkKind::Cloglog).unwrap()),
        ],
        eta in -8.0..8.0f64,
    ) {
        let f = link.cdf(eta).unwrap();
        let s = link.survival(eta).unwrap();
        prop_assert!((f + s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decode_always_yields_valid_designs(
        pos in prop::collection::vec(-10.0..10.0f64, 1..6),
        raw_logits in prop::collection::vec(-20.0..20.0f64, 1..6),
    ) {
        let k = pos.len().min(raw_logits.len());
        let space = DesignSpace::new(-10.0, 10.0).unwrap();
        let d = pso::decode(&pos[..k], &raw_logits[..k], space).unwrap();
        let total: f64 = d.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(d.points().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(d.points().iter().all(|&x| space.contains(x)));
    }

    #[test]
    fn collapse_is_idempotent(
        pts in prop::collection::vec(-5.0..5.0f64, 2..5),
        seedw in prop::collection::vec(0.05..1.0f64, 2..5),
    ) {
        let k = pts.len().min(seedw.len());
        let space = DesignSpace::new(-5.0, 5.0).unwrap();
        let total: f64 = seedw[..k].iter().sum();
        let weights: Vec<f64> = seedw[..k].iter().map(|w| w / total).collect();
        let mut sorted = pts[..k].to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        if sorted.len() < k { return Ok(()); }
        let d = Design::new(sorted, weights, space).unwrap();
        let once = pso::collapse(&d, 1e-2, 1e-2).unwrap();
        let twice = pso::collapse(&once, 1e-2, 1e-2).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn information_matrices_are_psd(
        pts in prop::collection::vec(-6.0..6.0f64, 2..5),
        seedw in prop::collection::vec(0.05..1.0f64, 2..5),
    ) {
        let k = pts.len().min(seedw.len());
        let mut sorted = pts[..k].to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        if sorted.len() < k { return Ok(()); }
        let total: f64 = seedw[..k].iter().sum();
        let weights: Vec<f64> = seedw[..k].iter().map(|w| w / total).collect();
        let space = DesignSpace::new(-6.0, 6.0).unwrap();
        let d = Design::new(sorted, weights, space).unwrap();
        let m = TwoParamModel::new(
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear { beta0: 0.3, beta1: 1.1 },
        ).unwrap();
        let info = m.info_matrix(&d).unwrap();
        for minor in info.leading_minors() {
            prop_assert!(minor >= -1e-10, "negative leading minor {minor}");
        }
    }

    #[test]
    fn design_json_round_trips(
        pts in prop::collection::vec(-9.0..9.0f64, 1..5),
    ) {
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        let space = DesignSpace::new(-9.0, 9.0).unwrap();
        let d = Design::equal_weights(sorted, space).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        let back: Design<f64> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(d, back);
    }
}
