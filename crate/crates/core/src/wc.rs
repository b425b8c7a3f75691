//! Solvers for the WC stationarity equation.
//!
//! For an equal-weight two-point design, the log-determinant of the
//! information matrix is stationary in `eta1` when
//!
//! ```text
//! 2 f'(eta1)/f(eta1) - f(eta1)/F(eta1) + f(eta1)/S(eta1) + 2/(eta1 - eta2) = 0
//! ```
//!
//! i.e. `W(eta1) + 2/(eta1 - eta2) = 0`. Symmetric densities reduce this to
//! a single equation `W(eta) + 1/eta = 0` on `eta > 0`; asymmetric families
//! need the two-equation system, solved by eliminating `eta2` through
//! `eta2 = eta1 + 2/W(eta1)` and scanning the resulting one-dimensional
//! residual for sign changes.
//!
//! Roots are first-order candidates, not optimality certificates: callers
//! should confirm a design with the equivalence-theorem check in
//! [`crate::verify`].

use crate::error::{Error, Result};
use crate::links::Link;
use crate::model::{Design, DesignSpace, Predictor};
use crate::num::{real, Real};

/// A solved pair of predictor values, ordered `eta1 > eta2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WcSolution<F> {
    pub eta1: F,
    pub eta2: F,
    /// Absolute residual of the eliminated one-dimensional equation.
    pub residual_norm: F,
    /// Sign-change interval the root was isolated in.
    pub bracket_used: (F, F),
}

/// Outcome of an asymmetric solve: the primary solution plus every root and
/// every sign-change interval the scan encountered.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WcReport<F> {
    pub solution: WcSolution<F>,
    pub roots: Vec<WcSolution<F>>,
    pub sign_changes: Vec<(F, F)>,
}

/// Left-hand side of the stationarity equation at a point pair.
pub fn wc_residual<F: Real>(link: &Link<F>, eta1: F, eta2: F) -> Result<F> {
    if eta1 == eta2 {
        return Err(Error::CoincidentPoints { at: eta1.as_f64() });
    }
    let w = link.w_function(eta1)?;
    link.w_function(eta2)?; // both points must be evaluable
    Ok(w + real::<F>(2.0) / (eta1 - eta2))
}

const SYMMETRIC_SCAN_LO: f64 = 1e-6;
const SYMMETRIC_SCAN_HI: f64 = 50.0;
const SCAN_PANELS: usize = 512;
const RESIDUAL_TOL: f64 = 1e-8;

/// Positive root of the symmetric equation `W(eta) + 1/eta = 0`.
///
/// Brackets by scanning `(1e-6, 50]`, bisects to ~1e-12, then polishes with
/// a few secant steps; the returned residual is below 1e-10.
pub fn solve_symmetric<F: Real>(link: &Link<F>) -> Result<F> {
    if !link.is_symmetric() {
        return Err(Error::NotSymmetric(link.name()));
    }
    let g = |eta: F| {
        let w = link.w_raw(eta);
        if w.is_finite() {
            Some(w + eta.recip())
        } else {
            None
        }
    };
    let lo = real::<F>(SYMMETRIC_SCAN_LO);
    let hi = real::<F>(SYMMETRIC_SCAN_HI);
    let intervals = scan_sign_changes(lo, hi, SCAN_PANELS, &g);
    let (a, b) = *intervals.first().ok_or(Error::NoRoot {
        lo: SYMMETRIC_SCAN_LO,
        hi: SYMMETRIC_SCAN_HI,
    })?;
    let root = bisect_then_polish(a, b, &g);
    let resid = g(root).unwrap_or(F::infinity()).abs();
    if resid > real(1e-10) {
        return Err(Error::NoRoot {
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    Ok(root)
}

/// Solves the asymmetric system by scanning
/// `g(eta1) = W(eta1) + W(eta1 + 2/W(eta1))` for sign changes in the given
/// `eta1` bracket (512 panels), bisecting each, and validating candidates:
/// the residual must be small and the companion point `eta2` must fall
/// inside the link's domain. All valid roots are reported; the primary one
/// maximizes the design criterion on the eta scale.
pub fn solve_asymmetric<F: Real>(link: &Link<F>, eta1_bracket: (F, F)) -> Result<WcReport<F>> {
    let (lo, hi) = eta1_bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bad eta1 bracket [{lo}, {hi}]"
        )));
    }
    let dom = link.domain();
    if !dom.contains(lo) || !dom.contains(hi) {
        return Err(Error::Domain {
            what: "eta1 bracket outside link domain",
            value: lo.as_f64(),
        });
    }

    let guard = real::<F>(crate::links::ETA_GUARD);
    let w_of = |eta: F| {
        let w = link.w_raw(eta);
        if w.is_finite() {
            Some(w)
        } else {
            None
        }
    };
    let g = |eta1: F| -> Option<F> {
        let w1 = w_of(eta1)?;
        if w1 == F::zero() {
            return None;
        }
        let eta2 = eta1 + real::<F>(2.0) / w1;
        if !eta2.is_finite() || eta2.abs() > guard {
            return None;
        }
        let w2 = w_of(eta2)?;
        let v = w1 + w2;
        v.is_finite().then_some(v)
    };

    let sign_changes = scan_sign_changes(lo, hi, SCAN_PANELS, &g);
    let mut w_vanishes_at: Option<F> = None;
    {
        // detect a W zero-crossing inside the bracket for diagnostics
        let mut prev: Option<(F, F)> = None;
        for i in 0..=SCAN_PANELS {
            let t = F::of_usize(i) / F::of_usize(SCAN_PANELS);
            let eta = lo + (hi - lo) * t;
            if let Some(w) = w_of(eta) {
                if let Some((peta, pw)) = prev {
                    if pw * w < F::zero() {
                        w_vanishes_at = Some((peta + eta) / real(2.0));
                    }
                }
                prev = Some((eta, w));
            } else {
                prev = None;
            }
        }
    }

    let mut roots: Vec<WcSolution<F>> = Vec::new();
    for &(a, b) in &sign_changes {
        let eta1 = bisect_then_polish(a, b, &g);
        let resid = match g(eta1) {
            Some(v) => v.abs(),
            None => continue,
        };
        if resid > real(RESIDUAL_TOL) {
            continue; // discontinuity (e.g. a pole of 2/W), not a root
        }
        let w1 = match w_of(eta1) {
            Some(w) if w != F::zero() => w,
            _ => continue,
        };
        let eta2 = eta1 + real::<F>(2.0) / w1;
        if !dom.contains(eta2) || eta2.abs() > guard {
            continue; // companion point not usable as a design point
        }
        let (e1, e2) = if eta1 >= eta2 {
            (eta1, eta2)
        } else {
            (eta2, eta1)
        };
        roots.push(WcSolution {
            eta1: e1,
            eta2: e2,
            residual_norm: resid,
            bracket_used: (a, b),
        });
    }

    if roots.is_empty() {
        if !sign_changes.is_empty() {
            return Err(Error::NoValidRoot {
                sign_changes: sign_changes
                    .iter()
                    .map(|&(a, b)| (a.as_f64(), b.as_f64()))
                    .collect(),
            });
        }
        if let Some(at) = w_vanishes_at {
            return Err(Error::SingularW { at: at.as_f64() });
        }
        return Err(Error::NoRoot {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }

    // primary root: largest two-point criterion on the eta scale,
    // ln w(e1) + ln w(e2) + 2 ln|e1 - e2|
    let objective = |s: &WcSolution<F>| {
        link.ln_weight_raw(s.eta1)
            + link.ln_weight_raw(s.eta2)
            + real::<F>(2.0) * (s.eta1 - s.eta2).abs().ln()
    };
    let solution = roots
        .iter()
        .max_by(|x, y| objective(x).partial_cmp(&objective(y)).expect("finite"))
        .copied()
        .expect("roots nonempty");

    Ok(WcReport {
        solution,
        roots,
        sign_changes,
    })
}

/// Diagnostic for the one-hit (exponential) link: the eliminated residual
/// written out explicitly,
/// `h(eta) = -1/(1 - e^-eta) - 1/(1 - exp(2 - 2 e^-eta - eta))`,
/// evaluated literally in that form. Useful for studying root multiplicity
/// near 0, where the expression is numerically unstable by construction.
pub fn h_function<F: Real>(eta: F) -> Result<F> {
    if !(eta > F::zero()) || !eta.is_finite() {
        return Err(Error::Domain {
            what: "h argument (requires eta > 0)",
            value: eta.as_f64(),
        });
    }
    let one = F::one();
    let two = real::<F>(2.0);
    let d1 = one - (-eta).exp();
    let exponent = two - two * (-eta).exp() - eta;
    let d2 = one - exponent.exp();
    if d1 == F::zero() {
        return Err(Error::Domain {
            what: "h first denominator",
            value: eta.as_f64(),
        });
    }
    if d2 == F::zero() {
        return Err(Error::Pole { at: eta.as_f64() });
    }
    Ok(-d1.recip() - d2.recip())
}

/// Maps predictor-scale solutions back to an equal-weight dose design.
/// When no design space is supplied, the convex hull of the doses is used.
pub fn design_from_eta<F: Real>(
    predictor: &Predictor<F>,
    etas: &[F],
    space: Option<DesignSpace<F>>,
) -> Result<Design<F>> {
    if etas.is_empty() {
        return Err(Error::InvalidDesign("no eta values".into()));
    }
    let xs: Vec<F> = etas
        .iter()
        .map(|&e| predictor.invert_eta(e))
        .collect::<Result<_>>()?;
    let space = match space {
        Some(s) => s,
        None => {
            let lo = xs.iter().copied().fold(F::infinity(), F::min);
            let hi = xs.iter().copied().fold(F::neg_infinity(), F::max);
            if lo < hi {
                DesignSpace::new(lo, hi)?
            } else {
                DesignSpace::new(lo - real(0.5), hi + real(0.5))?
            }
        }
    };
    Design::equal_weights(xs, space)
}

/// Sign-change scan over `[lo, hi]` split into `panels` equal panels.
/// Panels with a non-finite endpoint value are skipped.
fn scan_sign_changes<F: Real>(
    lo: F,
    hi: F,
    panels: usize,
    g: &impl Fn(F) -> Option<F>,
) -> Vec<(F, F)> {
    let mut out = Vec::new();
    let mut prev: Option<(F, F)> = None;
    for i in 0..=panels {
        let t = F::of_usize(i) / F::of_usize(panels);
        let eta = lo + (hi - lo) * t;
        match g(eta) {
            Some(v) => {
                if let Some((pe, pv)) = prev {
                    if pv == F::zero() {
                        out.push((pe, pe));
                    } else if pv * v < F::zero() {
                        out.push((pe, eta));
                    }
                }
                prev = Some((eta, v));
            }
            None => prev = None,
        }
    }
    out
}

/// Bisection to ~1e-13 relative width, then a couple of secant steps.
fn bisect_then_polish<F: Real>(a: F, b: F, g: &impl Fn(F) -> Option<F>) -> F {
    if a == b {
        return a;
    }
    let (mut a, mut b) = (a, b);
    let mut fa = match g(a) {
        Some(v) => v,
        None => return a,
    };
    for _ in 0..200 {
        let mid = (a + b) / real(2.0);
        if mid == a || mid == b {
            break;
        }
        match g(mid) {
            Some(fm) => {
                if fa * fm <= F::zero() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            None => {
                // non-finite interior point: shrink toward the left endpoint
                b = mid;
            }
        }
        if (b - a).abs() <= real::<F>(1e-15) * (F::one() + a.abs()) {
            break;
        }
    }
    // secant polish
    let mut x0 = a;
    let mut x1 = b;
    let (mut f0, mut f1) = match (g(x0), g(x1)) {
        (Some(f0), Some(f1)) => (f0, f1),
        _ => return (a + b) / real(2.0),
    };
    for _ in 0..4 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2 < a.min(b) || x2 > a.max(b) {
            break;
        }
        match g(x2) {
            Some(f2) => {
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = f2;
            }
            None => break,
        }
    }
    if f1.abs() <= f0.abs() {
        x1
    } else {
        x0
    }
}
