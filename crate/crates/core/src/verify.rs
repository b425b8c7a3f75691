//! Equivalence-theorem verification.
//!
//! A design maximizes the determinant of the information matrix over all
//! probability measures on the design space exactly when its sensitivity
//! function `psi(x) = u(x)^T M^{-1} u(x) - d` is nonpositive everywhere,
//! with equality at the support points. Checking `psi` on a dense grid
//! therefore certifies (or refutes) global D-optimality of a candidate.

use crate::error::{Error, Result};
use crate::model::{Design, InfoMatrix, InfoModel};
use crate::num::Real;

/// Grid-check outcome.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Verdict<F> {
    /// `max_psi <= tol` over the grid and the support points.
    pub optimal: bool,
    pub max_psi: F,
    pub argmax_x: F,
    /// Grid points with `psi > tol`, sorted by `psi` descending.
    pub violations: Vec<(F, F)>,
    /// `(x_i, psi(x_i))` at every support point.
    pub support_psi: Vec<(F, F)>,
    pub tol: F,
    pub grid_size: usize,
}

fn inverse_info<F: Real, M: InfoModel<F>>(model: &M, design: &Design<F>) -> Result<InfoMatrix<F>> {
    model
        .info_matrix(design)?
        .inverse()
        .map_err(|_| Error::Singular {
            what: "design information (sensitivity undefined)",
        })
}

fn psi_at<F: Real, M: InfoModel<F>>(model: &M, inv: &InfoMatrix<F>, x: F) -> Result<F> {
    let u = model.contribution(x)?;
    Ok(inv.quad_form(&u) - F::of_usize(model.dim()))
}

/// Sensitivity function at a single dose.
pub fn sensitivity<F: Real, M: InfoModel<F>>(model: &M, design: &Design<F>, x: F) -> Result<F> {
    let inv = inverse_info(model, design)?;
    psi_at(model, &inv, x)
}

/// Evaluates `psi` on a uniform grid plus the support points and issues a
/// verdict at absolute tolerance `tol`.
pub fn check_global<F: Real, M: InfoModel<F>>(
    model: &M,
    design: &Design<F>,
    grid_size: usize,
    tol: F,
) -> Result<Verdict<F>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be >= 2".into()));
    }
    let inv = inverse_info(model, design)?;
    let space = design.space();
    let step = space.width() / F::of_usize(grid_size - 1);

    let mut max_psi = F::neg_infinity();
    let mut argmax_x = space.x_lower;
    let mut violations: Vec<(F, F)> = Vec::new();
    let mut visit = |x: F, psi: F| {
        if psi > max_psi {
            max_psi = psi;
            argmax_x = x;
        }
        if psi > tol {
            violations.push((x, psi));
        }
    };

    for i in 0..grid_size {
        let x = if i + 1 == grid_size {
            space.x_upper
        } else {
            space.x_lower + step * F::of_usize(i)
        };
        visit(x, psi_at(model, &inv, x)?);
    }
    let mut support_psi = Vec::with_capacity(design.k());
    for &x in design.points() {
        let psi = psi_at(model, &inv, x)?;
        support_psi.push((x, psi));
        visit(x, psi);
    }
    violations.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite psi"));

    Ok(Verdict {
        optimal: max_psi <= tol,
        max_psi,
        argmax_x,
        violations,
        support_psi,
        tol,
        grid_size,
    })
}

/// Plot-ready `(x, psi)` table: uniform grid plus the support points,
/// sorted by `x` with exact duplicates removed.
pub fn sensitivity_curve<F: Real, M: InfoModel<F>>(
    model: &M,
    design: &Design<F>,
    grid_size: usize,
) -> Result<Vec<(F, F)>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be >= 2".into()));
    }
    let inv = inverse_info(model, design)?;
    let space = design.space();
    let step = space.width() / F::of_usize(grid_size - 1);
    let mut xs: Vec<F> = (0..grid_size)
        .map(|i| {
            if i + 1 == grid_size {
                space.x_upper
            } else {
                space.x_lower + step * F::of_usize(i)
            }
        })
        .collect();
    xs.extend_from_slice(design.points());
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite x"));
    xs.dedup();
    xs.iter()
        .map(|&x| Ok((x, psi_at(model, &inv, x)?)))
        .collect()
}

/// Renders a curve as CSV with header `x,psi` and 12 significant digits.
pub fn curve_to_csv<F: Real>(curve: &[(F, F)]) -> String {
    let mut out = String::from("x,psi\n");
    for &(x, psi) in curve {
        out.push_str(&format!("{:.11e},{:.11e}\n", x.as_f64(), psi.as_f64()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::links::{Link, LinkKind};
    use crate::model::{DesignSpace, Predictor, ThreeParamModel, TwoParamModel};
    use crate::wc;

    fn logit_unit() -> TwoParamModel<f64> {
        TwoParamModel::new(
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap()
    }

    fn wide() -> DesignSpace<f64> {
        DesignSpace::new(-10.0, 10.0).unwrap()
    }

    #[test]
    fn psi_zero_at_support_of_optimal_design() {
        let m = logit_unit();
        let root = wc::solve_symmetric(&m.link).unwrap();
        let d = Design::equal_weights(vec![-root, root], wide()).unwrap();
        for &x in d.points() {
            let psi = sensitivity(&m, &d, x).unwrap();
            assert!(psi.abs() < 1e-8, "psi({x}) = {psi}");
        }
        // far tails are strictly negative
        assert!(sensitivity(&m, &d, 8.0).unwrap() < 0.0);
        assert!(sensitivity(&m, &d, -8.0).unwrap() < 0.0);
    }

    #[test]
    fn laplace_two_point_fails_at_zero() {
        let m = TwoParamModel::new(
            Link::new(LinkKind::Laplace).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap();
        let root = wc::solve_symmetric(&m.link).unwrap();
        let d = Design::equal_weights(vec![-root, root], wide()).unwrap();
        let psi0 = sensitivity(&m, &d, 0.0).unwrap();
        assert!(
            (psi0 - 1.311_070_406_942_955).abs() < 1e-9,
            "psi(0) = {psi0}"
        );
        let verdict = check_global(&m, &d, 2001, 1e-4).unwrap();
        assert!(!verdict.optimal);
        assert!(
            verdict.argmax_x.abs() < 0.01,
            "argmax at {}",
            verdict.argmax_x
        );
        assert!(!verdict.violations.is_empty());
        // violations sorted descending
        for w in verdict.violations.windows(2) {
            assert!(w[0].1 >= w[1].1);
        }
    }

    #[test]
    fn logit_design_passes_global_check() {
        let m = logit_unit();
        let root = wc::solve_symmetric(&m.link).unwrap();
        let d = Design::equal_weights(vec![-root, root], wide()).unwrap();
        let verdict = check_global(&m, &d, 2001, 1e-4).unwrap();
        assert!(verdict.optimal, "max psi {}", verdict.max_psi);
        // at a verified optimum, support psi sits within 10 * tol of zero
        for (_, psi) in verdict.support_psi {
            assert!(psi.abs() <= 1e-3, "support psi {psi}");
        }
    }

    #[test]
    fn singular_design_is_an_error() {
        let m = logit_unit();
        let d = Design::new(vec![0.5], vec![1.0], wide()).unwrap();
        assert!(matches!(
            sensitivity(&m, &d, 0.0),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            check_global(&m, &d, 11, 1e-4),
            Err(Error::Singular { .. })
        ));
        // three-parameter model with a two-point design
        let m3 = ThreeParamModel::new(
            0.0,
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 0.0,
                beta1: 1.0,
            },
        )
        .unwrap();
        let d2 = Design::equal_weights(vec![-1.0, 1.0], wide()).unwrap();
        assert!(matches!(
            sensitivity(&m3, &d2, 0.0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn weighted_average_of_support_psi_is_zero() {
        // trace identity: sum_i p_i u_i^T M^{-1} u_i = d
        let m = logit_unit();
        let d = Design::new(vec![-2.0, -0.3, 1.1, 4.0], vec![0.1, 0.4, 0.3, 0.2], wide()).unwrap();
        let mut acc = 0.0;
        for (x, p) in d.iter() {
            acc += p * sensitivity(&m, &d, x).unwrap();
        }
        assert!(acc.abs() < 1e-10, "weighted psi average = {acc}");
    }

    #[test]
    fn three_param_sensitivity_at_example_design() {
        let m = ThreeParamModel::new(
            0.1,
            Link::new(LinkKind::Logit).unwrap(),
            Predictor::Linear {
                beta0: 1.0,
                beta1: 0.5,
            },
        )
        .unwrap();
        let sp = DesignSpace::new(0.0, 1.0).unwrap();
        // reference optimum for these parameters on [0, 1]
        let d = Design::equal_weights(vec![0.0, 0.462_235_2, 1.0], sp).unwrap();
        for &x in d.points() {
            let psi: f64 = sensitivity(&m, &d, x).unwrap();
            assert!(psi.abs() < 1e-5, "psi({x}) = {psi}");
        }
        let mid: f64 = sensitivity(&m, &d, 0.7).unwrap();
        assert!(mid <= 0.0, "psi(0.7) = {mid}");
        let verdict = check_global(&m, &d, 2001, 1e-4).unwrap();
        assert!(verdict.optimal, "max psi {}", verdict.max_psi);
    }

    #[test]
    fn curve_contents() {
        let m = logit_unit();
        let sp = DesignSpace::new(-1.0, 1.0).unwrap();
        let d = Design::equal_weights(vec![-0.9, 0.7], sp).unwrap();
        let curve = sensitivity_curve(&m, &d, 3).unwrap();
        let xs: Vec<f64> = curve.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![-1.0, -0.9, 0.0, 0.7, 1.0]); // grid plus supports, sorted
        let csv = curve_to_csv(&curve);
        assert!(csv.starts_with("x,psi\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn psi_invariant_under_weight_renormalization() {
        let m = logit_unit();
        let d1 = Design::new(vec![-1.0, 1.0], vec![0.5, 0.5], wide()).unwrap();
        let d2 = Design::new(vec![-1.0, 1.0], vec![0.25 * 2.0, 0.25 * 2.0], wide()).unwrap();
        for x in [-3.0, 0.0, 2.5] {
            assert_eq!(
                sensitivity(&m, &d1, x).unwrap(),
                sensitivity(&m, &d2, x).unwrap()
            );
        }
    }
}
