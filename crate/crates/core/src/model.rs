//! Designs, models, and Fisher information.
//!
//! An approximate design is a probability measure on a bounded dose interval:
//! support points with nonnegative weights summing to one. Models pair a link
//! with a predictor (two-parameter) or add a background response rate
//! (three-parameter). Both expose their Fisher information through
//! [`InfoModel`]: each support point contributes a rank-one outer product
//! `u(x) u(x)^T`, and the criterion values (log-determinant, Schur
//! complement) come from closed-form 2x2/3x3 linear algebra.

use crate::error::{Error, Result};
use crate::links::Link;
use crate::num::{real, Real};

/// Dose predictor `x -> eta` with its regressor vector `d eta / d beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predictor<F> {
    /// `eta = beta0 + beta1 x`
    Linear { beta0: F, beta1: F },
    /// `eta = beta0 + beta1 x^alpha` (Weibull-type dose; requires `x >= 0`)
    Power { beta0: F, beta1: F, alpha: F },
    /// `eta = beta0 + beta1 x + 1/(|x| + 1)`; the offset carries no
    /// parameter, so the regressor is still `(1, x)`.
    LinearWithOffset { beta0: F, beta1: F },
}

impl<F: Real> Predictor<F> {
    pub fn validate(&self) -> Result<()> {
        let (beta1, alpha) = match *self {
            Predictor::Linear { beta1, .. } | Predictor::LinearWithOffset { beta1, .. } => {
                (beta1, F::one())
            }
            Predictor::Power { beta1, alpha, .. } => (beta1, alpha),
        };
        if beta1 == F::zero() || !beta1.is_finite() {
            return Err(Error::InvalidParameter("beta1 must be nonzero".into()));
        }
        if !(alpha > F::zero()) {
            return Err(Error::InvalidParameter("alpha must be positive".into()));
        }
        Ok(())
    }

    /// Linear predictor value at dose `x`.
    pub fn eta(&self, x: F) -> Result<F> {
        match *self {
            Predictor::Linear { beta0, beta1 } => Ok(beta0 + beta1 * x),
            Predictor::Power {
                beta0,
                beta1,
                alpha,
            } => {
                if x < F::zero() {
                    return Err(Error::Domain {
                        what: "power predictor dose (x < 0)",
                        value: x.as_f64(),
                    });
                }
                Ok(beta0 + beta1 * x.powf(alpha))
            }
            Predictor::LinearWithOffset { beta0, beta1 } => {
                Ok(beta0 + beta1 * x + (x.abs() + F::one()).recip())
            }
        }
    }

    /// Regressor vector `d eta / d beta` at dose `x`.
    pub fn regressor(&self, x: F) -> Result<[F; 2]> {
        match *self {
            Predictor::Linear { .. } | Predictor::LinearWithOffset { .. } => Ok([F::one(), x]),
            Predictor::Power { alpha, .. } => {
                if x < F::zero() {
                    return Err(Error::Domain {
                        what: "power predictor dose (x < 0)",
                        value: x.as_f64(),
                    });
                }
                Ok([F::one(), x.powf(alpha)])
            }
        }
    }

    /// Closed-form inverse `eta -> x` where one exists.
    pub fn invert_eta(&self, eta: F) -> Result<F> {
        match *self {
            Predictor::Linear { beta0, beta1 } => Ok((eta - beta0) / beta1),
            Predictor::Power {
                beta0,
                beta1,
                alpha,
            } => {
                let r = (eta - beta0) / beta1;
                if r < F::zero() {
                    return Err(Error::Domain {
                        what: "power predictor inversion (negative radicand)",
                        value: r.as_f64(),
                    });
                }
                Ok(r.powf(alpha.recip()))
            }
            Predictor::LinearWithOffset { .. } => Err(Error::Inversion(
                "offset predictor has no closed-form inverse; use the swarm optimizer".into(),
            )),
        }
    }
}

/// Bounded dose interval the design lives on.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DesignSpace<F> {
    #[serde(rename = "lower")]
    pub x_lower: F,
    #[serde(rename = "upper")]
    pub x_upper: F,
}

impl<F: Real> DesignSpace<F> {
    pub fn new(x_lower: F, x_upper: F) -> Result<Self> {
        if !(x_lower < x_upper) || !x_lower.is_finite() || !x_upper.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "design space requires finite lower < upper, got [{x_lower}, {x_upper}]"
            )));
        }
        Ok(Self { x_lower, x_upper })
    }

    pub fn width(&self) -> F {
        self.x_upper - self.x_lower
    }

    pub fn contains(&self, x: F) -> bool {
        x >= self.x_lower && x <= self.x_upper
    }

    pub fn clamp(&self, x: F) -> F {
        x.max(self.x_lower).min(self.x_upper)
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Approximate design: strictly increasing support points and weights on
/// the simplex. Construction sorts points ascending and merges exact
/// duplicates by summing their weights.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Design<F> {
    points: Vec<F>,
    weights: Vec<F>,
    space: DesignSpace<F>,
}

impl<F: Real> Design<F> {
    pub fn new(points: Vec<F>, weights: Vec<F>, space: DesignSpace<F>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidDesign(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        for (&x, &w) in points.iter().zip(&weights) {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::InvalidDesign("non-finite point or weight".into()));
            }
            if w < F::zero() {
                return Err(Error::InvalidDesign(format!("negative weight {w}")));
            }
            if !space.contains(x) {
                return Err(Error::InvalidDesign(format!(
                    "point {x} outside [{}, {}]",
                    space.x_lower, space.x_upper
                )));
            }
        }
        let sum = weights.iter().fold(F::zero(), |a, &w| a + w);
        if (sum - F::one()).abs() > real(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidDesign(format!("weights sum to {sum}")));
        }

        let mut pairs: Vec<(F, F)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));
        let mut merged: Vec<(F, F)> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 = last.1 + w,
                _ => merged.push((x, w)),
            }
        }
        Ok(Self {
            points: merged.iter().map(|p| p.0).collect(),
            weights: merged.iter().map(|p| p.1).collect(),
            space,
        })
    }

    /// Equal-weight design on the given support.
    pub fn equal_weights(points: Vec<F>, space: DesignSpace<F>) -> Result<Self> {
        let w = F::of_usize(points.len()).recip();
        let weights = vec![w; points.len()];
        Self::new(points, weights, space)
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn space(&self) -> DesignSpace<F> {
        self.space
    }

    /// Number of support points.
    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (F, F)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// Symmetric Fisher information matrix, dimension 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMatrix<F> {
    dim: usize,
    m: [[F; 3]; 3],
}

impl<F: Real> InfoMatrix<F> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "only 2x2 and 3x3 supported");
        Self {
            dim,
            m: [[F::zero(); 3]; 3],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.m[i][j]
    }

    /// Adds `scale * u u^T`.
    pub fn add_outer(&mut self, u: &[F; 3], scale: F) {
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.m[i][j] = self.m[i][j] + scale * u[i] * u[j];
            }
        }
    }

    /// Closed-form determinant.
    pub fn det(&self) -> F {
        let m = &self.m;
        match self.dim {
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
        }
    }

    /// `ln det`, or `-inf` for singular matrices instead of an error, so
    /// optimizers can rank infeasible candidates. Singularity is judged
    /// relative to the Hadamard bound from the diagonal, which zeroes out
    /// the round-off determinant a rank-deficient sum of outer products
    /// leaves behind.
    pub fn log_det(&self) -> F {
        if self.is_singular() {
            F::neg_infinity()
        } else {
            self.det().ln()
        }
    }

    /// Relative singularity test: the determinant against the Hadamard
    /// bound from the diagonal (the matrix is PSD by construction).
    fn is_singular(&self) -> bool {
        let mut scale = F::one();
        for i in 0..self.dim {
            scale = scale * self.m[i][i].max(F::min_positive_value());
        }
        let d = self.det();
        !(d > real::<F>(1e-14) * scale)
    }

    /// Closed-form inverse via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_singular() {
            return Err(Error::Singular {
                what: "information matrix",
            });
        }
        let d = self.det();
        let m = &self.m;
        let mut out = Self::zeros(self.dim);
        match self.dim {
            2 => {
                out.m[0][0] = m[1][1] / d;
                out.m[1][1] = m[0][0] / d;
                out.m[0][1] = -m[0][1] / d;
                out.m[1][0] = -m[1][0] / d;
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                        let (c, e) = ((j + 1) % 3, (j + 2) % 3);
                        // cofactor transpose
                        out.m[j][i] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Quadratic form `u^T M u` over the active dimension.
    pub fn quad_form(&self, u: &[F; 3]) -> F {
        let mut acc = F::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + u[i] * self.m[i][j] * u[j];
            }
        }
        acc
    }

    /// Leading principal minors, for positive-semidefiniteness checks.
    pub fn leading_minors(&self) -> Vec<F> {
        let m = &self.m;
        let mut v = vec![m[0][0], m[0][0] * m[1][1] - m[0][1] * m[1][0]];
        if self.dim == 3 {
            v.push(self.det());
        }
        v
    }
}

/// A model whose per-point information is a rank-one outer product
/// `u(x) u(x)^T`, so that `M(xi) = sum_i p_i u(x_i) u(x_i)^T`.
pub trait InfoModel<F: Real> {
    /// Number of parameters (2 or 3).
    fn dim(&self) -> usize;

    /// Information contribution vector `u(x)` (zero-padded to length 3).
    fn contribution(&self, x: F) -> Result<[F; 3]>;

    /// Fisher information matrix of a design.
    fn info_matrix(&self, design: &Design<F>) -> Result<InfoMatrix<F>> {
        let mut m = InfoMatrix::zeros(self.dim());
        for (x, p) in design.iter() {
            let u = self.contribution(x).map_err(|e| match e {
                Error::Domain { what, .. } => Error::Domain {
                    what,
                    value: x.as_f64(),
                },
                other => other,
            })?;
            m.add_outer(&u, p);
        }
        Ok(m)
    }

    /// D-criterion `ln det M(xi)`; `-inf` when the information is singular.
    fn d_criterion(&self, design: &Design<F>) -> Result<F> {
        Ok(self.info_matrix(design)?.log_det())
    }

    /// D-efficiency `(det M(design) / det M(reference))^(1/d)`.
    fn d_efficiency(&self, design: &Design<F>, reference: &Design<F>) -> Result<F> {
        let m_ref = self.info_matrix(reference)?;
        if m_ref.is_singular() {
            return Err(Error::Singular {
                what: "reference design information",
            });
        }
        let ld = self.d_criterion(design)?;
        if ld == F::neg_infinity() {
            return Ok(F::zero());
        }
        Ok(((ld - m_ref.log_det()) / F::of_usize(self.dim())).exp())
    }
}

/// Two-parameter model: response probability `F(eta(x))`.
#[derive(Debug, Clone)]
pub struct TwoParamModel<F> {
    pub link: Link<F>,
    pub predictor: Predictor<F>,
}

impl<F: Real> TwoParamModel<F> {
    pub fn new(link: Link<F>, predictor: Predictor<F>) -> Result<Self> {
        predictor.validate()?;
        Ok(Self { link, predictor })
    }
}

impl<F: Real> InfoModel<F> for TwoParamModel<F> {
    fn dim(&self) -> usize {
        2
    }

    /// `u(x) = sqrt(omega(eta)) (1, x)`, so `u u^T = omega z z^T`.
    fn contribution(&self, x: F) -> Result<[F; 3]> {
        let eta = self.predictor.eta(x)?;
        let w = self.link.weight(eta)?;
        let z = self.predictor.regressor(x)?;
        let s = w.sqrt();
        Ok([s * z[0], s * z[1], F::zero()])
    }
}

/// Three-parameter model: `pi = c + (1 - c) F(eta(x))` with background
/// response rate `c`. The predictor must be linear.
#[derive(Debug, Clone)]
pub struct ThreeParamModel<F> {
    pub c: F,
    pub link: Link<F>,
    pub predictor: Predictor<F>,
}

impl<F: Real> ThreeParamModel<F> {
    pub fn new(c: F, link: Link<F>, predictor: Predictor<F>) -> Result<Self> {
        if !(c >= F::zero() && c < F::one()) {
            return Err(Error::InvalidParameter(format!(
                "background rate must lie in [0, 1), got {c}"
            )));
        }
        if !matches!(predictor, Predictor::Linear { .. }) {
            return Err(Error::InvalidParameter(
                "three-parameter model requires a linear predictor".into(),
            ));
        }
        predictor.validate()?;
        Ok(Self { c, link, predictor })
    }

    /// Determinant of the equal-weight 3-point information matrix through
    /// the tilted-measure factorization:
    /// `det M = (1/27) (sum_i S_i/F_i)^3 det Var(x~)` where
    /// `x~_i = (f_i/S_i)(1-c) z_i` and the tilted probabilities are
    /// proportional to `S_i/F_i`.
    pub fn det_tilted(&self, points: [F; 3]) -> Result<F> {
        if points[0] == points[1] || points[0] == points[2] || points[1] == points[2] {
            return Err(Error::CoincidentPoints {
                at: points[0].as_f64(),
            });
        }
        let one_minus_c = F::one() - self.c;
        let mut ratio = [F::zero(); 3]; // S/F
        let mut xt = [[F::zero(); 2]; 3]; // tilted regressors
        for (i, &x) in points.iter().enumerate() {
            let eta = self.predictor.eta(x)?;
            self.link.weight(eta)?; // domain + interior guard
            let lnf = self.link.ln_density_raw(eta);
            let lnc = self.link.ln_cdf_raw(eta);
            let lns = self.link.ln_survival_raw(eta);
            ratio[i] = (lns - lnc).exp();
            let scale = (lnf - lns).exp() * one_minus_c; // f/S * (1-c)
            let z = self.predictor.regressor(x)?;
            xt[i] = [scale * z[0], scale * z[1]];
        }
        let total = ratio[0] + ratio[1] + ratio[2];
        let q = [ratio[0] / total, ratio[1] / total, ratio[2] / total];
        let mut mean = [F::zero(); 2];
        for i in 0..3 {
            mean[0] = mean[0] + q[i] * xt[i][0];
            mean[1] = mean[1] + q[i] * xt[i][1];
        }
        let mut var = [[F::zero(); 2]; 2];
        for i in 0..3 {
            let d = [xt[i][0] - mean[0], xt[i][1] - mean[1]];
            for a in 0..2 {
                for b in 0..2 {
                    var[a][b] = var[a][b] + q[i] * d[a] * d[b];
                }
            }
        }
        let det_var = var[0][0] * var[1][1] - var[0][1] * var[1][0];
        Ok(total * total * total * det_var / real(27.0))
    }

    /// Ds-criterion for the background rate: the Schur complement of the
    /// first element of `M(xi)`,
    /// `M_11 - b^T D^{-1} b` with `D` the lower-right 2x2 block.
    pub fn ds_criterion(&self, design: &Design<F>) -> Result<F> {
        let m = self.info_matrix(design)?;
        let d = [[m.get(1, 1), m.get(1, 2)], [m.get(2, 1), m.get(2, 2)]];
        let det_d = d[0][0] * d[1][1] - d[0][1] * d[1][0];
        let scale = d[0][0].max(F::min_positive_value()) * d[1][1].max(F::min_positive_value());
        if !(det_d > real::<F>(1e-14) * scale) {
            // only certain linear combinations of beta remain estimable
            return Err(Error::Singular {
                what: "lower-right information block",
            });
        }
        let b = [m.get(0, 1), m.get(0, 2)];
        // D^{-1} b
        let inv_b = [
            (d[1][1] * b[0] - d[0][1] * b[1]) / det_d,
            (-d[1][0] * b[0] + d[0][0] * b[1]) / det_d,
        ];
        Ok(m.get(0, 0) - b[0] * inv_b[0] - b[1] * inv_b[1])
    }
}

impl<F: Real> InfoModel<F> for ThreeParamModel<F> {
    fn dim(&self) -> usize {
        3
    }

    /// `u(x) = (sqrt(S/F), (1-c) sqrt(omega) z)`; its outer product
    /// reproduces the three-parameter per-point information blocks
    /// `S/F`, `(1-c) f/F z`, and `(1-c)^2 f^2/(F S) z z^T`.
    fn contribution(&self, x: F) -> Result<[F; 3]> {
        let eta = self.predictor.eta(x)?;
        let w = self.link.weight(eta)?;
        let lnc = self.link.ln_cdf_raw(eta);
        let lns = self.link.ln_survival_raw(eta);
        let head = ((lns - lnc) / real(2.0)).exp();
        let s = (F::one() - self.c) * w.sqrt();
        let z = self.predictor.regressor(x)?;
        Ok([head, s * z[0], s * z[1]])
    }
}
