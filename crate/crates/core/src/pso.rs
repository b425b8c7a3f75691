//! Global-best particle swarm optimization over weighted k-point designs.
//!
//! Each particle carries k support positions (clamped to the design space)
//! and k weight logits decoded through a softmax, so velocity updates stay
//! unconstrained while decoded weights live on the simplex. Randomness is
//! counter-based: every draw is a hash of `(seed, phase, iteration,
//! particle, coordinate)`, so results are bit-reproducible regardless of
//! evaluation order.

use crate::error::{Error, Result};
use crate::model::{Design, DesignSpace, ThreeParamModel};
use crate::num::{real, Real};

/// Swarm hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PsoConfig<F> {
    pub n_particles: usize,
    pub n_iterations: usize,
    /// Cognitive acceleration (pull toward the particle's own best).
    pub c1: F,
    /// Social acceleration (pull toward the global best).
    pub c2: F,
    /// Inertia weight.
    pub inertia: F,
    pub seed: u64,
    /// Number of support points each particle encodes.
    pub k_points: usize,
}

impl<F: Real> Default for PsoConfig<F> {
    fn default() -> Self {
        Self {
            n_particles: 50,
            n_iterations: 500,
            c1: real(0.5),
            c2: real(0.3),
            inertia: real(0.9),
            seed: 1,
            k_points: 3,
        }
    }
}

impl<F: Real> PsoConfig<F> {
    fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::InvalidParameter("need at least 2 particles".into()));
        }
        if self.n_iterations == 0 || self.k_points == 0 {
            return Err(Error::InvalidParameter(
                "iterations and k_points must be positive".into(),
            ));
        }
        if !(self.c1 > F::zero() && self.c2 > F::zero() && self.inertia > F::zero()) {
            return Err(Error::InvalidParameter(
                "c1, c2, inertia must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a swarm run.
#[derive(Debug, Clone)]
pub struct PsoRun<F> {
    pub design: Design<F>,
    /// Objective value of `design`.
    pub value: F,
    /// Global-best objective after each iteration (nondecreasing).
    pub history: Vec<F>,
}

// counter-based draws: SplitMix64 finalizer over a keyed counter
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy)]
enum Phase {
    Init = 1,
    Cognitive = 2,
    Social = 3,
}

fn draw<F: Real>(seed: u64, phase: Phase, iter: usize, particle: usize, coord: usize) -> F {
    let k = mix64(
        seed ^ mix64((phase as u64) << 48 ^ (iter as u64) << 24 ^ (particle as u64))
            .wrapping_add(mix64(coord as u64 + 0x9e37_79b9_7f4a_7c15)),
    );
    real((k >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0))
}

/// One search dimension: a clamping box plus an initialization range.
#[derive(Clone, Copy)]
struct Dim<F> {
    lo: F,
    hi: F,
    init_lo: F,
    init_hi: F,
}

/// Generic box-constrained global-best PSO core. Deterministic for a fixed
/// seed; the evaluation order is the particle index order.
fn run_swarm<F: Real>(
    dims: &[Dim<F>],
    eval: impl Fn(&[F]) -> F,
    cfg: &PsoConfig<F>,
) -> Result<(Vec<F>, F, Vec<F>)> {
    cfg.validate()?;
    let n = cfg.n_particles;
    let nd = dims.len();
    let score = |x: &[F]| {
        let v = eval(x);
        if v.is_nan() {
            F::neg_infinity()
        } else {
            v
        }
    };

    let mut pos = vec![F::zero(); n * nd];
    let mut vel = vec![F::zero(); n * nd];
    for p in 0..n {
        for d in 0..nd {
            let u: F = draw(cfg.seed, Phase::Init, 0, p, d);
            pos[p * nd + d] = dims[d].init_lo + (dims[d].init_hi - dims[d].init_lo) * u;
        }
    }

    let mut pbest = pos.clone();
    let mut pbest_val: Vec<F> = (0..n).map(|p| score(&pos[p * nd..(p + 1) * nd])).collect();
    let mut gbest_idx = 0;
    for p in 1..n {
        if pbest_val[p] > pbest_val[gbest_idx] {
            gbest_idx = p;
        }
    }
    let mut gbest = pbest[gbest_idx * nd..(gbest_idx + 1) * nd].to_vec();
    let mut gbest_val = pbest_val[gbest_idx];

    let mut history = Vec::with_capacity(cfg.n_iterations);
    for it in 0..cfg.n_iterations {
        for p in 0..n {
            for d in 0..nd {
                let i = p * nd + d;
                let r1: F = draw(cfg.seed, Phase::Cognitive, it + 1, p, d);
                let r2: F = draw(cfg.seed, Phase::Social, it + 1, p, d);
                let v = cfg.inertia * vel[i]
                    + cfg.c1 * r1 * (pbest[i] - pos[i])
                    + cfg.c2 * r2 * (gbest[d] - pos[i]);
                let mut x = pos[i] + v;
                let mut v = v;
                if x < dims[d].lo {
                    x = dims[d].lo;
                    v = F::zero();
                } else if x > dims[d].hi {
                    x = dims[d].hi;
                    v = F::zero();
                }
                pos[i] = x;
                vel[i] = v;
            }
            let val = score(&pos[p * nd..(p + 1) * nd]);
            if val > pbest_val[p] {
                pbest_val[p] = val;
                pbest[p * nd..(p + 1) * nd].copy_from_slice(&pos[p * nd..(p + 1) * nd]);
            }
            if val > gbest_val {
                gbest_val = val;
                gbest.copy_from_slice(&pos[p * nd..(p + 1) * nd]);
            }
        }
        history.push(gbest_val);
    }

    if gbest_val == F::neg_infinity() {
        return Err(Error::Infeasible(
            "every evaluated design was infeasible".into(),
        ));
    }
    Ok((gbest, gbest_val, history))
}

/// Decodes raw particle coordinates into a design: weights are the softmax
/// of the logits (shifted by the maximum), points are sorted, and points
/// closer than `1e-3 * width` are merged with summed weight at their
/// weight-averaged location.
pub fn decode<F: Real>(
    positions: &[F],
    weight_logits: &[F],
    space: DesignSpace<F>,
) -> Result<Design<F>> {
    if positions.is_empty() || positions.len() != weight_logits.len() {
        return Err(Error::InvalidParameter(
            "positions and logits must have equal nonzero length".into(),
        ));
    }
    let max = weight_logits
        .iter()
        .copied()
        .fold(F::neg_infinity(), F::max);
    let mut weights: Vec<F> = weight_logits.iter().map(|&l| (l - max).exp()).collect();
    let total = weights.iter().fold(F::zero(), |a, &w| a + w);
    for w in &mut weights {
        *w = *w / total;
    }
    let merge_eps = real::<F>(1e-3) * space.width();
    merged_design(positions, &weights, space, merge_eps)
}

/// Merges points closer than `point_tol` (weight-averaged position), drops
/// weights below `weight_tol`, renormalizes. Idempotent on its own output:
/// when nothing merges or drops, the design is returned untouched, so a
/// second application is the identity at the bit level.
pub fn collapse<F: Real>(design: &Design<F>, point_tol: F, weight_tol: F) -> Result<Design<F>> {
    if !(point_tol > F::zero() && weight_tol > F::zero()) {
        return Err(Error::InvalidParameter(
            "tolerances must be positive".into(),
        ));
    }
    let merged = merge_clusters(design.points(), design.weights(), point_tol);
    let kept: Vec<(F, F)> = merged
        .into_iter()
        .filter(|&(_, w)| w >= weight_tol)
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidDesign(
            "collapse dropped every support point".into(),
        ));
    }
    if kept.len() == design.k() {
        return Ok(design.clone());
    }
    let total = kept.iter().fold(F::zero(), |a, &(_, w)| a + w);
    Design::new(
        kept.iter().map(|&(x, _)| x).collect(),
        kept.iter().map(|&(_, w)| w / total).collect(),
        design.space(),
    )
}

/// Sorts `(point, weight)` pairs and clusters consecutive points within
/// `eps` of the running centroid (weight-averaged position, summed weight).
fn merge_clusters<F: Real>(points: &[F], weights: &[F], eps: F) -> Vec<(F, F)> {
    let mut pairs: Vec<(F, F)> = points
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));
    let mut merged: Vec<(F, F)> = Vec::with_capacity(pairs.len());
    for (x, w) in pairs {
        match merged.last_mut() {
            Some((cx, cw)) if (x - *cx).abs() <= eps => {
                let tw = *cw + w;
                if tw > F::zero() {
                    *cx = (*cx * *cw + x * w) / tw;
                }
                *cw = tw;
            }
            _ => merged.push((x, w)),
        }
    }
    merged
}

fn merged_design<F: Real>(
    points: &[F],
    weights: &[F],
    space: DesignSpace<F>,
    eps: F,
) -> Result<Design<F>> {
    let clamped: Vec<F> = points.iter().map(|&x| space.clamp(x)).collect();
    let merged = merge_clusters(&clamped, weights, eps);
    let total = merged.iter().fold(F::zero(), |a, &(_, w)| a + w);
    Design::new(
        merged.iter().map(|&(x, _)| x).collect(),
        merged.iter().map(|&(_, w)| w / total).collect(),
        space,
    )
}

const LOGIT_BOX: f64 = 50.0;
const LOGIT_INIT: f64 = 1.0;

/// Maximizes `objective` over weighted `k`-point designs on `space`.
///
/// The objective must be total on decoded designs (`-inf` marks an
/// infeasible candidate). Deterministic for a fixed seed.
pub fn optimize<F: Real>(
    objective: impl Fn(&Design<F>) -> F,
    space: DesignSpace<F>,
    cfg: &PsoConfig<F>,
) -> Result<PsoRun<F>> {
    let k = cfg.k_points;
    let mut dims = Vec::with_capacity(2 * k);
    for _ in 0..k {
        dims.push(Dim {
            lo: space.x_lower,
            hi: space.x_upper,
            init_lo: space.x_lower,
            init_hi: space.x_upper,
        });
    }
    for _ in 0..k {
        dims.push(Dim {
            lo: real(-LOGIT_BOX),
            hi: real(LOGIT_BOX),
            init_lo: real(-LOGIT_INIT),
            init_hi: real(LOGIT_INIT),
        });
    }
    let eval = |x: &[F]| match decode(&x[..k], &x[k..], space) {
        Ok(d) => objective(&d),
        Err(_) => F::neg_infinity(),
    };
    let (best, value, history) = run_swarm(&dims, eval, cfg)?;
    let design = decode(&best[..k], &best[k..], space)?;
    Ok(PsoRun {
        design,
        value,
        history,
    })
}

/// Maximizes `objective` over the weights only, holding the support fixed.
pub fn optimize_weights<F: Real>(
    objective: impl Fn(&Design<F>) -> F,
    points: &[F],
    space: DesignSpace<F>,
    cfg: &PsoConfig<F>,
) -> Result<PsoRun<F>> {
    let k = points.len();
    if k == 0 {
        return Err(Error::InvalidParameter("no support points".into()));
    }
    let dims = vec![
        Dim {
            lo: real(-LOGIT_BOX),
            hi: real(LOGIT_BOX),
            init_lo: real(-LOGIT_INIT),
            init_hi: real(LOGIT_INIT),
        };
        k
    ];
    let eval = |l: &[F]| match decode(points, l, space) {
        Ok(d) => objective(&d),
        Err(_) => F::neg_infinity(),
    };
    let (best, value, history) = run_swarm(&dims, eval, cfg)?;
    let design = decode(points, &best, space)?;
    Ok(PsoRun {
        design,
        value,
        history,
    })
}

/// D-optimal design search for the three-parameter model.
///
/// With `k_points == 3` the search runs on positions only: three support
/// points carry equal weight (a k = d optimum must be equally weighted) and
/// the objective is the tilted-measure determinant, which matches
/// `ln det M` for the equal-weight design.
pub fn optimize_3p<F: Real>(
    model: &ThreeParamModel<F>,
    space: DesignSpace<F>,
    cfg: &PsoConfig<F>,
) -> Result<PsoRun<F>> {
    if cfg.k_points < 3 {
        return Err(Error::InvalidParameter(
            "three-parameter designs need k_points >= 3".into(),
        ));
    }
    if cfg.k_points > 3 {
        let obj = |d: &Design<F>| model_log_det(model, d);
        return optimize(obj, space, cfg);
    }
    let dims = vec![
        Dim {
            lo: space.x_lower,
            hi: space.x_upper,
            init_lo: space.x_lower,
            init_hi: space.x_upper,
        };
        3
    ];
    let eval = |x: &[F]| match model.det_tilted([x[0], x[1], x[2]]) {
        Ok(d) if d > F::zero() => d.ln(),
        _ => F::neg_infinity(),
    };
    let (best, value, history) = run_swarm(&dims, eval, cfg)?;
    let design = Design::equal_weights(best, space)?;
    Ok(PsoRun {
        design,
        value,
        history,
    })
}

fn model_log_det<F: Real>(model: &ThreeParamModel<F>, d: &Design<F>) -> F {
    use crate::model::InfoModel;
    model.d_criterion(d).unwrap_or(F::neg_infinity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::links::{Link, LinkKind};
    use crate::model::{InfoModel, Predictor, TwoParamModel};

    fn space(lo: f64, hi: f64) -> DesignSpace<f64> {
        DesignSpace::new(lo, hi).unwrap()
    }

    fn d_objective(model: TwoParamModel<f64>) -> impl Fn(&Design<f64>) -> f64 {
        move |d| model.d_criterion(d).unwrap_or(f64::NEG_INFINITY)
    }

    #[test]
    fn decode_softmax_and_merge() {
        let sp = space(-10.0, 10.0);
        let d = decode(&[1.0, -2.0, 5.0], &[0.0, 0.0, 0.0], sp).unwrap();
        assert_eq!(d.weights(), &[1.0 / 3.0; 3]);

        let d = decode(&[1.0, -2.0, 5.0], &[2.0f64.ln(), 0.0, 0.0], sp).unwrap();
        assert_eq!(d.points(), &[-2.0, 1.0, 5.0]);
        assert!((d.weights()[1] - 0.5).abs() < 1e-15); // ln 2 logit sits at x=1
        assert!((d.weights()[0] - 0.25).abs() < 1e-15);

        // two coincident positions merge to a (k-1)-point design
        let d = decode(&[1.0, 1.000001, 5.0], &[0.0, 0.0, 0.0], sp).unwrap();
        assert_eq!(d.k(), 2);
        assert!((d.weights()[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_behaviour() {
        let sp = space(-10.0, 10.0);
        let d = Design::new(vec![1.0, 1.0005], vec![0.5, 0.5], sp).unwrap();
        let c = collapse(&d, 1e-3, 1e-3).unwrap();
        assert_eq!(c.k(), 1);
        assert!((c.points()[0] - 1.00025).abs() < 1e-12);
        assert_eq!(c.weights(), &[1.0]);

        let d = Design::new(vec![0.0, 3.0], vec![0.9995, 0.0005], sp).unwrap();
        let c = collapse(&d, 1e-3, 1e-3).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c.points(), &[0.0]);

        // idempotence
        let d = Design::new(vec![-2.0, 0.5, 4.0], vec![0.3, 0.4, 0.3], sp).unwrap();
        let once = collapse(&d, 1e-3, 1e-3).unwrap();
        let twice = collapse(&once, 1e-3, 1e-3).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn determinism_and_monotonicity() {
        let model = TwoParamModel::new(
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap();
        let cfg = PsoConfig {
            n_iterations: 60,
            k_points: 2,
            seed: 7,
            ..Default::default()
        };
        let a = optimize(d_objective(model.clone()), space(-10.0, 10.0), &cfg).unwrap();
        let b = optimize(d_objective(model), space(-10.0, 10.0), &cfg).unwrap();
        assert_eq!(a.design, b.design);
        assert_eq!(a.value, b.value);
        for w in a.history.windows(2) {
            assert!(w[1] >= w[0], "global best decreased: {w:?}");
        }
    }

    #[test]
    fn feasibility_of_decoded_designs() {
        // any swarm output satisfies the design invariants by construction;
        // spot-check decode on a few raw coordinate vectors
        let sp = space(-1.0, 2.0);
        for trial in 0..50u64 {
            let h =
                |i: u64| (mix64(trial.wrapping_mul(31).wrapping_add(i)) >> 11) as f64 / 9.007e15;
            let pos: Vec<f64> = (0..4).map(|i| -1.0 + 3.0 * h(i)).collect();
            let logits: Vec<f64> = (4..8).map(|i| -5.0 + 10.0 * h(i)).collect();
            let d = decode(&pos, &logits, sp).unwrap();
            let sum: f64 = d.weights().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(d.points().iter().all(|&x| sp.contains(x)));
        }
    }

    #[test]
    fn recovers_logit_two_point_design() {
        let model = TwoParamModel::new(
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap();
        let cfg = PsoConfig {
            k_points: 2,
            seed: 20_240_501,
            ..Default::default()
        };
        let run = optimize(d_objective(model), space(-10.0, 10.0), &cfg).unwrap();
        let d = collapse(&run.design, 1e-3, 1e-3).unwrap();
        assert_eq!(d.k(), 2);
        assert!((d.points()[0] + 1.5434).abs() < 5e-3, "{:?}", d.points());
        assert!((d.points()[1] - 1.5434).abs() < 5e-3, "{:?}", d.points());
    }

    #[test]
    fn infeasible_space_errors() {
        let cfg = PsoConfig {
            n_iterations: 5,
            k_points: 2,
            ..Default::default()
        };
        let res = optimize(|_| f64::NEG_INFINITY, space(0.0, 1.0), &cfg);
        assert!(matches!(res, Err(Error::Infeasible(_))));
        // width-zero spaces are rejected at construction
        assert!(DesignSpace::new(2.0, 2.0).is_err());
    }

    #[test]
    fn matches_analytic_two_point_designs() {
        use crate::wc;
        for kind in [LinkKind::Logit, LinkKind::Probit, LinkKind::Cloglog] {
            let model = TwoParamModel::new(
                Link::new(kind).unwrap(),
                Predictor::Linear {
                    beta0: 0.0,
                    beta1: 1.0,
                },
            )
            .unwrap();
            let (e1, e2) = if model.link.is_symmetric() {
                let r = wc::solve_symmetric(&model.link).unwrap();
                (r, -r)
            } else {
                let rep = wc::solve_asymmetric(&model.link, (0.1, 3.0)).unwrap();
                (rep.solution.eta1, rep.solution.eta2)
            };
            let analytic = Design::equal_weights(vec![e2, e1], space(-10.0, 10.0)).unwrap();
            let analytic_value = model.d_criterion(&analytic).unwrap();

            let cfg = PsoConfig {
                k_points: 2,
                n_iterations: 1200,
                seed: 2024,
                ..Default::default()
            };
            let m = model.clone();
            let run = optimize(
                move |d: &Design<f64>| m.d_criterion(d).unwrap_or(f64::NEG_INFINITY),
                space(-10.0, 10.0),
                &cfg,
            )
            .unwrap();
            assert!(
                run.value >= analytic_value - 1e-6,
                "{kind:?}: swarm {} below analytic {}",
                run.value,
                analytic_value
            );
            let d = collapse(&run.design, 1e-3, 1e-3).unwrap();
            assert_eq!(d.k(), 2, "{kind:?}: {:?}", d.points());
            assert!(
                (d.points()[0] - e2).abs() < 5e-3,
                "{kind:?}: {:?}",
                d.points()
            );
            assert!(
                (d.points()[1] - e1).abs() < 5e-3,
                "{kind:?}: {:?}",
                d.points()
            );
        }
    }

    #[test]
    fn power_predictor_design_passes_verification() {
        // Weibull-type dose model: exponential link, eta = 0.6 + x^3
        let model = TwoParamModel::new(
            Link::new(LinkKind::Exponential).unwrap(),
            Predictor::Power {
                beta0: 0.6,
                beta1: 1.0,
                alpha: 3.0,
            },
        )
        .unwrap();
        let cfg = PsoConfig {
            k_points: 2,
            n_iterations: 2000,
            seed: 12,
            ..Default::default()
        };
        let m = model.clone();
        let run = optimize(
            move |d: &Design<f64>| m.d_criterion(d).unwrap_or(f64::NEG_INFINITY),
            space(0.0, 1.0),
            &cfg,
        )
        .unwrap();
        let d = collapse(&run.design, 1e-3, 1e-3).unwrap();
        let verdict = crate::verify::check_global(&model, &d, 2001, 1e-4).unwrap();
        assert!(
            verdict.optimal,
            "swarm design {:?} has max psi {}",
            d.points(),
            verdict.max_psi
        );
    }

    #[test]
    fn three_param_fast_path_matches_reference_example() {
        let model = ThreeParamModel::new(
            0.1,
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 1.0,
                beta1: 0.5,
            },
        )
        .unwrap();
        let cfg = PsoConfig {
            seed: 11,
            ..Default::default()
        };
        let run = optimize_3p(&model, space(0.0, 1.0), &cfg).unwrap();
        let pts = run.design.points();
        assert!((pts[0] - 0.0).abs() < 5e-3, "{pts:?}");
        assert!((pts[1] - 0.462_235).abs() < 5e-3, "{pts:?}");
        assert!((pts[2] - 1.0).abs() < 5e-3, "{pts:?}");
        assert_eq!(run.design.weights(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn weight_only_search_finds_equal_weights() {
        let model = TwoParamModel::new(
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap();
        let pts = [-1.5434, 1.5434];
        let cfg = PsoConfig {
            k_points: 2,
            seed: 3,
            ..Default::default()
        };
        let run = optimize_weights(d_objective(model), &pts, space(-10.0, 10.0), &cfg).unwrap();
        assert!(
            (run.design.weights()[0] - 0.5).abs() < 1e-3,
            "{:?}",
            run.design.weights()
        );
    }
}
