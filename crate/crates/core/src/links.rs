//! Link-function families for binary regression.
//!
//! A link is the CDF `F` mapping the linear predictor `eta` to the response
//! probability, together with its density `f`, survival `S = 1 - F`, the
//! design weight `omega = f^2 / (F S)`, and the W-function
//! `W = 2 f'/f - f/F + f/S` consumed by the WC stationarity equation.
//!
//! Tail evaluation is done on the log scale: every family provides stable
//! `ln f`, `ln F`, and `ln S`, and ratios like `f/F` are exponentials of
//! log differences. The CDF and survival of symmetric families share one
//! implementation (`S(eta) = F(-eta)`) so the symmetry identities hold to
//! the last bit.

use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::special;

/// Hard evaluation guard: beyond this magnitude `exp` terms are meaningless.
pub const ETA_GUARD: f64 = 700.0;

/// Default lower eta bound for the exponential (one-hit) link.
pub const DEFAULT_ETA_LOW: f64 = 0.5;

/// The supported link families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkKind<F> {
    Logit,
    Probit,
    Laplace,
    Cloglog,
    StudentT(F),
    Exponential,
}

/// Admissible interval for the linear predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaDomain<F> {
    pub lower: F,
    pub upper: F,
}

impl<F: Real> EtaDomain<F> {
    pub fn new(lower: F, upper: F) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "eta domain requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unbounded() -> Self {
        Self {
            lower: F::neg_infinity(),
            upper: F::infinity(),
        }
    }

    pub fn contains(&self, eta: F) -> bool {
        eta >= self.lower && eta <= self.upper
    }
}

/// A link family together with its eta domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link<F> {
    kind: LinkKind<F>,
    domain: EtaDomain<F>,
}

impl<F: Real> Link<F> {
    /// Builds a link with its default domain. The exponential link gets
    /// `[DEFAULT_ETA_LOW, +inf)`; every other family is unbounded.
    pub fn new(kind: LinkKind<F>) -> Result<Self> {
        if let LinkKind::StudentT(df) = kind {
            if !(df > F::zero() && df.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "Student-t degrees of freedom must be positive, got {df}"
                )));
            }
        }
        let domain = match kind {
            LinkKind::Exponential => EtaDomain {
                lower: real(DEFAULT_ETA_LOW),
                upper: F::infinity(),
            },
            _ => EtaDomain::unbounded(),
        };
        Ok(Self { kind, domain })
    }

    /// Overrides the eta domain. For the exponential link the lower bound
    /// must stay nonnegative.
    pub fn with_domain(mut self, domain: EtaDomain<F>) -> Result<Self> {
        if matches!(self.kind, LinkKind::Exponential) && domain.lower < F::zero() {
            return Err(Error::InvalidParameter(
                "exponential link requires eta >= 0".into(),
            ));
        }
        self.domain = domain;
        Ok(self)
    }

    /// Replaces the lower eta bound, keeping the upper.
    pub fn with_eta_lower(self, lower: F) -> Result<Self> {
        let upper = self.domain.upper;
        self.with_domain(EtaDomain::new(lower, upper)?)
    }

    /// Parses the CLI/config selector: `logit`, `probit`, `laplace`,
    /// `cloglog`, `student-t:<df>`, `exponential`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = match s.to_ascii_lowercase().as_str() {
            "logit" => LinkKind::Logit,
            "probit" => LinkKind::Probit,
            "laplace" => LinkKind::Laplace,
            "cloglog" => LinkKind::Cloglog,
            "exponential" => LinkKind::Exponential,
            other => {
                if let Some(df) = other.strip_prefix("student-t:") {
                    let df: f64 = df.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad degrees of freedom in {s:?}"))
                    })?;
                    LinkKind::StudentT(real(df))
                } else {
                    return Err(Error::InvalidParameter(format!("unknown link {s:?}")));
                }
            }
        };
        Self::new(kind)
    }

    pub fn kind(&self) -> LinkKind<F> {
        self.kind
    }

    pub fn domain(&self) -> EtaDomain<F> {
        self.domain
    }

    pub fn name(&self) -> String {
        match self.kind {
            LinkKind::Logit => "logit".into(),
            LinkKind::Probit => "probit".into(),
            LinkKind::Laplace => "laplace".into(),
            LinkKind::Cloglog => "cloglog".into(),
            LinkKind::StudentT(df) => format!("student-t:{df}"),
            LinkKind::Exponential => "exponential".into(),
        }
    }

    /// Whether the density satisfies `f(eta) = f(-eta)`.
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self.kind,
            LinkKind::Logit | LinkKind::Probit | LinkKind::Laplace | LinkKind::StudentT(_)
        )
    }

    fn check_eta(&self, eta: F) -> Result<()> {
        if !eta.is_finite() {
            return Err(Error::Domain {
                what: "eta (non-finite)",
                value: eta.as_f64(),
            });
        }
        if eta.abs() > real(ETA_GUARD) {
            return Err(Error::Domain {
                what: "eta (overflow guard)",
                value: eta.as_f64(),
            });
        }
        if !self.domain.contains(eta) {
            return Err(Error::Domain {
                what: "eta (outside link domain)",
                value: eta.as_f64(),
            });
        }
        Ok(())
    }

    /// Density `f(eta)`.
    pub fn density(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        Ok(self.density_raw(eta))
    }

    /// CDF `F(eta)`.
    pub fn cdf(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        Ok(self.cdf_raw(eta))
    }

    /// Survival `S(eta) = 1 - F(eta)`, computed by a direct stable formula.
    pub fn survival(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        Ok(self.survival_raw(eta))
    }

    /// Density derivative `f'(eta)`. For the Laplace kink, `sgn(0) := 0`.
    pub fn density_derivative(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        Ok(self.density_raw(eta) * self.dlnf_raw(eta))
    }

    /// Design weight `omega(eta) = f^2 / (F S)`, evaluated on the log scale.
    ///
    /// A log-weight that is finite but deeply negative underflows to 0,
    /// which is a usable value (the point simply carries no information);
    /// a non-finite log-weight is an error.
    pub fn weight(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        let lw = self.ln_weight_raw(eta);
        let w = lw.exp();
        if !lw.is_finite() || !w.is_finite() {
            return Err(Error::Overflow {
                what: "log-weight",
                value: eta.as_f64(),
            });
        }
        Ok(w)
    }

    /// W-function `W(eta) = 2 f'/f - f/F + f/S`.
    ///
    /// For the exponential link this is the closed form `-1/(1 - e^-eta)`,
    /// evaluated exactly as written.
    pub fn w_function(&self, eta: F) -> Result<F> {
        self.check_eta(eta)?;
        let w = self.w_raw(eta);
        if !w.is_finite() {
            return Err(Error::Overflow {
                what: "W-function",
                value: eta.as_f64(),
            });
        }
        Ok(w)
    }

    /// Quantile `F^{-1}(p)` by bisection (the CDF is strictly increasing).
    pub fn quantile(&self, p: F) -> Result<F> {
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::Domain {
                what: "quantile probability",
                value: p.as_f64(),
            });
        }
        let mut lo = self.domain.lower.max(real(-ETA_GUARD));
        let mut hi = self.domain.upper.min(real(ETA_GUARD));
        for _ in 0..200 {
            let mid = (lo + hi) / real(2.0);
            if self.cdf_raw(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) / real(2.0))
    }

    // ----- raw kernels (no domain checks) -----

    pub(crate) fn density_raw(&self, eta: F) -> F {
        match self.kind {
            LinkKind::Logit => {
                let e = (-eta.abs()).exp();
                e / ((F::one() + e) * (F::one() + e))
            }
            LinkKind::Probit => special::normal_pdf(eta),
            LinkKind::Laplace => real::<F>(0.5) * (-eta.abs()).exp(),
            LinkKind::Cloglog => (eta - eta.exp()).exp(),
            LinkKind::StudentT(_) => self.ln_density_raw(eta).exp(),
            LinkKind::Exponential => (-eta).exp(),
        }
    }

    pub(crate) fn cdf_raw(&self, eta: F) -> F {
        match self.kind {
            LinkKind::Logit => {
                if eta >= F::zero() {
                    (F::one() + (-eta).exp()).recip()
                } else {
                    let e = eta.exp();
                    e / (F::one() + e)
                }
            }
            LinkKind::Probit => special::normal_cdf(eta),
            LinkKind::Laplace => {
                if eta <= F::zero() {
                    real::<F>(0.5) * eta.exp()
                } else {
                    F::one() - real::<F>(0.5) * (-eta).exp()
                }
            }
            LinkKind::Cloglog => -F::exp_m1(-eta.exp()),
            LinkKind::StudentT(df) => {
                let half = real::<F>(0.5);
                let x = df / (df + eta * eta);
                let tail = half * special::betainc_reg(df / real(2.0), half, x);
                if eta >= F::zero() {
                    F::one() - tail
                } else {
                    tail
                }
            }
            LinkKind::Exponential => -F::exp_m1(-eta),
        }
    }

    pub(crate) fn survival_raw(&self, eta: F) -> F {
        match self.kind {
            // symmetric families: S(eta) = F(-eta), bit-exact
            LinkKind::Logit | LinkKind::Probit | LinkKind::Laplace | LinkKind::StudentT(_) => {
                self.cdf_raw(-eta)
            }
            LinkKind::Cloglog => (-eta.exp()).exp(),
            LinkKind::Exponential => (-eta).exp(),
        }
    }

    pub(crate) fn ln_density_raw(&self, eta: F) -> F {
        match self.kind {
            LinkKind::Logit => {
                let t = -eta.abs();
                t - real::<F>(2.0) * F::ln_1p(t.exp())
            }
            LinkKind::Probit => -eta * eta / real(2.0) - real(0.918_938_533_204_672_74),
            LinkKind::Laplace => -eta.abs() - real(std::f64::consts::LN_2),
            LinkKind::Cloglog => eta - eta.exp(),
            LinkKind::StudentT(df) => {
                let half = real::<F>(0.5);
                let c = special::ln_gamma((df + F::one()) * half)
                    - special::ln_gamma(df * half)
                    - half * (df * real(std::f64::consts::PI)).ln();
                c - (df + F::one()) * half * F::ln_1p(eta * eta / df)
            }
            LinkKind::Exponential => -eta,
        }
    }

    pub(crate) fn ln_cdf_raw(&self, eta: F) -> F {
        let ln2 = real::<F>(std::f64::consts::LN_2);
        match self.kind {
            LinkKind::Logit => {
                if eta >= F::zero() {
                    -F::ln_1p((-eta).exp())
                } else {
                    eta - F::ln_1p(eta.exp())
                }
            }
            LinkKind::Probit => special::ln_normal_cdf(eta),
            LinkKind::Laplace => {
                if eta <= F::zero() {
                    eta - ln2
                } else {
                    F::ln_1p(real::<F>(-0.5) * (-eta).exp())
                }
            }
            LinkKind::Cloglog => {
                let u = eta.exp();
                if u > ln2 {
                    F::ln_1p(-(-u).exp())
                } else {
                    (-F::exp_m1(-u)).ln()
                }
            }
            LinkKind::StudentT(_) => {
                let c = self.cdf_raw(eta);
                if c > real(0.5) {
                    F::ln_1p(-self.cdf_raw(-eta))
                } else {
                    c.ln()
                }
            }
            LinkKind::Exponential => {
                if eta > ln2 {
                    F::ln_1p(-(-eta).exp())
                } else {
                    (-F::exp_m1(-eta)).ln()
                }
            }
        }
    }

    pub(crate) fn ln_survival_raw(&self, eta: F) -> F {
        match self.kind {
            LinkKind::Logit | LinkKind::Probit | LinkKind::Laplace | LinkKind::StudentT(_) => {
                self.ln_cdf_raw(-eta)
            }
            LinkKind::Cloglog => -eta.exp(),
            LinkKind::Exponential => -eta,
        }
    }

    pub(crate) fn ln_weight_raw(&self, eta: F) -> F {
        real::<F>(2.0) * self.ln_density_raw(eta) - self.ln_cdf_raw(eta) - self.ln_survival_raw(eta)
    }

    /// d/deta of ln f.
    pub(crate) fn dlnf_raw(&self, eta: F) -> F {
        match self.kind {
            LinkKind::Logit => -(eta / real(2.0)).tanh(),
            LinkKind::Probit => -eta,
            LinkKind::Laplace => {
                if eta == F::zero() {
                    F::zero()
                } else {
                    -eta.signum()
                }
            }
            LinkKind::Cloglog => F::one() - eta.exp(),
            LinkKind::StudentT(df) => -(df + F::one()) * eta / (df + eta * eta),
            LinkKind::Exponential => -F::one(),
        }
    }

    /// W-function kernel without domain checks; used by the root scanners,
    /// which must evaluate the formal expression off-domain and may receive
    /// non-finite values at poles.
    pub(crate) fn w_raw(&self, eta: F) -> F {
        match self.kind {
            // closed form, as written; unstable near 0 by construction
            LinkKind::Exponential => -(F::one() - (-eta).exp()).recip(),
            _ => {
                let lnf = self.ln_density_raw(eta);
                let hazard_lower = (lnf - self.ln_cdf_raw(eta)).exp(); // f/F
                let hazard_upper = (lnf - self.ln_survival_raw(eta)).exp(); // f/S
                real::<F>(2.0) * self.dlnf_raw(eta) - hazard_lower + hazard_upper
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn links() -> Vec<Link<f64>> {
        vec![
            Link::new(LinkKind::Logit).unwrap(),
            Link::new(LinkKind::Probit).unwrap(),
            Link::new(LinkKind::Laplace).unwrap(),
            Link::new(LinkKind::Cloglog).unwrap(),
            Link::new(LinkKind::StudentT(2.0)).unwrap(),
            Link::new(LinkKind::Exponential).unwrap(),
        ]
    }

    /// Interior grid per link, stopping where the CDF is still strictly
    /// inside (0, 1) at f64 resolution (the cloglog CDF rounds to 1 above
    /// eta ~ 3.6).
    fn grid(link: &Link<f64>) -> Vec<f64> {
        let lo = link.domain().lower.max(-8.0);
        let hi = if matches!(link.kind(), LinkKind::Cloglog) {
            3.5
        } else {
            8.0
        };
        (0..=60).map(|i| lo + i as f64 * (hi - lo) / 60.0).collect()
    }

    #[test]
    fn density_point_values() {
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert!((logit.density(0.0).unwrap() - 0.25).abs() < 1e-15);
        let probit = Link::<f64>::new(LinkKind::Probit).unwrap();
        assert!((probit.density(0.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        let laplace = Link::<f64>::new(LinkKind::Laplace).unwrap();
        assert!((laplace.density(0.0).unwrap() - 0.5).abs() < 1e-15);
        let exp = Link::<f64>::new(LinkKind::Exponential).unwrap();
        assert!((exp.density(0.5).unwrap() - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn cdf_point_values() {
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert!((logit.cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        let exp = Link::<f64>::new(LinkKind::Exponential).unwrap();
        assert!((exp.cdf(0.5).unwrap() - 0.393_469_340_287_366_58).abs() < 1e-15);
        let t2 = Link::<f64>::new(LinkKind::StudentT(2.0)).unwrap();
        assert!((t2.cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        // t2 CDF reference: mpmath 0.78867513459481289...
        assert!((t2.cdf(1.0).unwrap() - 0.788_675_134_594_812_9).abs() < 1e-13);
    }

    #[test]
    fn survival_stable_tails() {
        let probit = Link::<f64>::new(LinkKind::Probit).unwrap();
        let s = probit.survival(10.0).unwrap();
        assert!(s > 0.0 && s < 1e-20);
        assert!((s - 7.619_853_024_160_526e-24).abs() < 1e-36);
        let laplace = Link::<f64>::new(LinkKind::Laplace).unwrap();
        assert!((laplace.survival(0.768).unwrap() - 0.231_970_010_545_823_35).abs() < 1e-15);
    }

    #[test]
    fn cdf_plus_survival_is_one() {
        for link in links() {
            for eta in grid(&link) {
                let f = link.cdf(eta).unwrap();
                let s = link.survival(eta).unwrap();
                assert!(
                    (f + s - 1.0).abs() < 1e-12,
                    "{}: F+S-1 = {:e} at eta={eta}",
                    link.name(),
                    f + s - 1.0
                );
            }
        }
    }

    #[test]
    fn cdf_monotone_and_interior() {
        for link in links() {
            let g = grid(&link);
            for w in g.windows(2) {
                let (a, b) = (link.cdf(w[0]).unwrap(), link.cdf(w[1]).unwrap());
                assert!(a < b, "{} CDF not increasing at {:?}", link.name(), w);
            }
            for &eta in &g {
                let f = link.cdf(eta).unwrap();
                let d = link.density(eta).unwrap();
                assert!(
                    f > 0.0 && f < 1.0,
                    "{}: F out of (0,1) at {eta}",
                    link.name()
                );
                assert!(d > 0.0, "{}: f <= 0 at {eta}", link.name());
            }
        }
    }

    #[test]
    fn density_derivative_matches_finite_differences() {
        // deterministic pseudo-random etas per link
        for link in links() {
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..100 {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let u = (state >> 11) as f64 / (1u64 << 53) as f64;
                let lo = link.domain().lower.max(-6.0);
                let eta = lo + u * (6.0 - lo);
                if matches!(link.kind(), LinkKind::Laplace) && eta.abs() < 1e-3 {
                    continue; // kink
                }
                let h = 1e-6 * (1.0 + eta.abs());
                if eta - h < link.domain().lower {
                    continue;
                }
                let fd =
                    (link.density(eta + h).unwrap() - link.density(eta - h).unwrap()) / (2.0 * h);
                let an = link.density_derivative(eta).unwrap();
                let tol = 1e-6f64.max(1e-4 * an.abs());
                assert!(
                    (fd - an).abs() < tol.max(1e-4 * fd.abs()),
                    "{}: f'({eta}) analytic {an} vs fd {fd}",
                    link.name()
                );
            }
        }
    }

    #[test]
    fn derivative_point_values() {
        let probit = Link::<f64>::new(LinkKind::Probit).unwrap();
        assert_eq!(probit.density_derivative(0.0).unwrap(), 0.0);
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert_eq!(logit.density_derivative(0.0).unwrap(), 0.0);
        let cloglog = Link::<f64>::new(LinkKind::Cloglog).unwrap();
        assert_eq!(cloglog.density_derivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_identities() {
        for link in links().into_iter().filter(|l| l.is_symmetric()) {
            for eta in grid(&link) {
                let d = (link.density(eta).unwrap() - link.density(-eta).unwrap()).abs();
                let fs = (link.cdf(eta).unwrap() - link.survival(-eta).unwrap()).abs();
                let w = (link.weight(eta).unwrap() - link.weight(-eta).unwrap()).abs();
                let wf = (link.w_function(eta).unwrap() + link.w_function(-eta).unwrap()).abs();
                assert!(d < 1e-12 && fs < 1e-12, "{} symmetry", link.name());
                assert!(
                    w < 1e-12 * link.weight(eta).unwrap().max(1.0),
                    "{} weight symmetry",
                    link.name()
                );
                assert!(
                    wf < 1e-12 * link.w_function(eta).unwrap().abs().max(1.0),
                    "{} W oddness",
                    link.name()
                );
            }
        }
    }

    #[test]
    fn weight_matches_naive_form() {
        for link in links() {
            for eta in grid(&link) {
                let f = link.density(eta).unwrap();
                let cf = link.cdf(eta).unwrap();
                let s = link.survival(eta).unwrap();
                let naive = f * f / (cf * s);
                if !naive.is_finite() || naive == 0.0 {
                    continue;
                }
                let w = link.weight(eta).unwrap();
                assert!(
                    ((w - naive) / naive).abs() < 1e-10,
                    "{}: weight {w} vs naive {naive} at eta={eta}",
                    link.name()
                );
            }
        }
    }

    #[test]
    fn weight_point_values() {
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert!((logit.weight(0.0).unwrap() - 0.25).abs() < 1e-14);
        let laplace = Link::<f64>::new(LinkKind::Laplace).unwrap();
        assert!((laplace.weight(0.0).unwrap() - 1.0).abs() < 1e-14);
        // probit at the symmetric WC root: compare to direct phi/Phi arithmetic
        let probit = Link::<f64>::new(LinkKind::Probit).unwrap();
        let eta = 1.1381f64;
        let phi = special::normal_pdf(eta);
        let cap = special::normal_cdf(eta);
        let expect = phi * phi / (cap * (1.0 - cap));
        assert!(((probit.weight(eta).unwrap() - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn w_function_values() {
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert_eq!(logit.w_function(0.0).unwrap(), 0.0);
        let probit = Link::<f64>::new(LinkKind::Probit).unwrap();
        assert_eq!(probit.w_function(0.0).unwrap(), 0.0);
        let exp = Link::<f64>::new(LinkKind::Exponential).unwrap();
        assert!((exp.w_function(1.0).unwrap() - (-1.581_976_706_869_326_4)).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        let exp = Link::<f64>::new(LinkKind::Exponential).unwrap();
        assert!(matches!(exp.density(-0.1), Err(Error::Domain { .. })));
        assert!(
            matches!(exp.density(0.2), Err(Error::Domain { .. })),
            "below eta_low"
        );
        let logit = Link::<f64>::new(LinkKind::Logit).unwrap();
        assert!(matches!(logit.density(f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(logit.density(701.0), Err(Error::Domain { .. })));
        assert!(matches!(
            Link::<f64>::new(LinkKind::StudentT(0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn eta_low_is_configurable() {
        let exp = Link::<f64>::new(LinkKind::Exponential)
            .unwrap()
            .with_eta_lower(0.0)
            .unwrap();
        assert!(exp.density(0.2).is_ok());
        assert!(exp.density(-0.1).is_err());
        assert!(Link::<f64>::new(LinkKind::Exponential)
            .unwrap()
            .with_eta_lower(-1.0)
            .is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            "logit",
            "probit",
            "laplace",
            "cloglog",
            "student-t:2",
            "exponential",
        ] {
            let link = Link::<f64>::parse(s).unwrap();
            assert_eq!(link.name(), s);
        }
        assert!(Link::<f64>::parse("cauchy").is_err());
        assert!(Link::<f64>::parse("student-t:x").is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for link in links() {
            let ps: &[f64] = if matches!(link.kind(), LinkKind::Exponential) {
                &[0.5, 0.75, 0.99] // probabilities below F(eta_low) are unreachable
            } else {
                &[0.05, 0.3935, 0.5, 0.75, 0.99]
            };
            for &p in ps {
                let eta = link.quantile(p).unwrap();
                assert!(
                    (link.cdf(eta).unwrap() - p).abs() < 1e-9,
                    "{} p={p}",
                    link.name()
                );
            }
        }
        let exp = Link::<f64>::new(LinkKind::Exponential).unwrap();
        // F(eta_low)=0.3935 is the smallest reachable probability
        assert!((exp.quantile(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
    }
}
