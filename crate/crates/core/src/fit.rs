//! Maximum-likelihood fitting of two-parameter binary regression.
//!
//! Grouped binomial data (dose, trials, events) are fitted by Fisher
//! scoring with step-halving on the binomial log-likelihood, under any of
//! the supported links. The fitted coefficients are the plug-in values
//! that localize an optimal design for a follow-up experiment.

use std::io::Read as IoRead;

use crate::error::{Error, Result};
use crate::links::Link;
use crate::num::{real, Real};
use crate::special;

/// One dose group.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DataRow<F> {
    pub dose: F,
    pub trials: u64,
    pub events: u64,
}

/// Grouped binomial dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    rows: Vec<DataRow<F>>,
}

impl<F: Real> Dataset<F> {
    pub fn new(rows: Vec<DataRow<F>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidData {
                line: None,
                msg: "empty dataset".into(),
            });
        }
        for r in &rows {
            if !r.dose.is_finite() {
                return Err(Error::InvalidData {
                    line: None,
                    msg: format!("non-finite dose {}", r.dose),
                });
            }
            if r.trials == 0 {
                return Err(Error::InvalidData {
                    line: None,
                    msg: "trials must be >= 1".into(),
                });
            }
            if r.events > r.trials {
                return Err(Error::InvalidData {
                    line: None,
                    msg: format!("events {} exceed trials {}", r.events, r.trials),
                });
            }
        }
        let mut doses: Vec<F> = rows.iter().map(|r| r.dose).collect();
        doses.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        doses.dedup();
        if doses.len() < 2 {
            return Err(Error::InvalidData {
                line: None,
                msg: "need at least 2 distinct doses to identify a slope".into(),
            });
        }
        Ok(Self { rows })
    }

    /// Parses CSV with header `dose,trials,events`. Malformed rows are
    /// rejected with their 1-based line number.
    pub fn from_csv<R: IoRead>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = rdr.headers().map_err(|e| Error::InvalidData {
                line: Some(1),
                msg: format!("unreadable header: {e}"),
            })?;
            let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
            if got != ["dose", "trials", "events"] {
                return Err(Error::InvalidData {
                    line: Some(1),
                    msg: format!("expected header dose,trials,events, got {got:?}"),
                });
            }
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::InvalidData {
                line: e.position().map(|p| p.line()),
                msg: format!("malformed row: {e}"),
            })?;
            let line = record.position().map(|p| p.line());
            let field = |i: usize| -> Result<&str> {
                record.get(i).ok_or_else(|| Error::InvalidData {
                    line,
                    msg: format!("missing field {}", i + 1),
                })
            };
            let dose: f64 = field(0)?.parse().map_err(|_| Error::InvalidData {
                line,
                msg: format!("bad dose {:?}", field(0).unwrap_or("")),
            })?;
            let trials: u64 = field(1)?.parse().map_err(|_| Error::InvalidData {
                line,
                msg: format!("bad trials {:?}", field(1).unwrap_or("")),
            })?;
            let events: u64 = field(2)?.parse().map_err(|_| Error::InvalidData {
                line,
                msg: format!("bad events {:?}", field(2).unwrap_or("")),
            })?;
            rows.push(DataRow {
                dose: real(dose),
                trials,
                events,
            });
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[DataRow<F>] {
        &self.rows
    }

    /// Returns a copy with every dose multiplied by `scale`.
    pub fn scaled(&self, scale: F) -> Result<Self> {
        if !(scale.is_finite() && scale != F::zero()) {
            return Err(Error::InvalidParameter(format!("bad dose scale {scale}")));
        }
        Self::new(
            self.rows
                .iter()
                .map(|r| DataRow {
                    dose: r.dose * scale,
                    ..*r
                })
                .collect(),
        )
    }
}

/// Fitted two-parameter model.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FitResult<F> {
    pub beta0: F,
    pub beta1: F,
    /// Standard errors from the inverse expected information.
    pub se: [F; 2],
    /// Binomial log-likelihood at the estimate.
    pub loglik: F,
    pub converged: bool,
    pub iterations: usize,
}

impl<F: Real> FitResult<F> {
    /// Wald 95% confidence interval for a coefficient (0 or 1).
    pub fn wald_ci(&self, idx: usize) -> (F, F) {
        let est = if idx == 0 { self.beta0 } else { self.beta1 };
        let half = real::<F>(1.96) * self.se[idx];
        (est - half, est + half)
    }
}

const SEPARATION_GUARD: f64 = 1e4;

/// Binomial log-likelihood including the combinatorial constant.
pub fn log_likelihood<F: Real>(data: &Dataset<F>, link: &Link<F>, beta: (F, F)) -> Result<F> {
    let mut acc = F::zero();
    for r in data.rows() {
        let eta = beta.0 + beta.1 * r.dose;
        link.density(eta)?; // domain check
        let lnf_c = link.ln_cdf_raw(eta);
        let lnf_s = link.ln_survival_raw(eta);
        let n = real::<F>(r.trials as f64);
        let y = real::<F>(r.events as f64);
        let choose = special::ln_gamma(n + F::one())
            - special::ln_gamma(y + F::one())
            - special::ln_gamma(n - y + F::one());
        let mut term = choose;
        if r.events > 0 {
            term = term + y * lnf_c;
        }
        if r.events < r.trials {
            term = term + (n - y) * lnf_s;
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Score vector of the log-likelihood: `sum_i (y_i - n_i pi_i) f_i / (pi_i (1 - pi_i)) z_i`.
fn score<F: Real>(data: &Dataset<F>, link: &Link<F>, beta: (F, F)) -> Result<[F; 2]> {
    let mut u = [F::zero(); 2];
    for r in data.rows() {
        let eta = beta.0 + beta.1 * r.dose;
        link.density(eta)?;
        let pi = link.cdf_raw(eta);
        let resid = real::<F>(r.events as f64) - real::<F>(r.trials as f64) * pi;
        // f / (F S) on the log scale
        let ratio =
            (link.ln_density_raw(eta) - link.ln_cdf_raw(eta) - link.ln_survival_raw(eta)).exp();
        u[0] = u[0] + resid * ratio;
        u[1] = u[1] + resid * ratio * r.dose;
    }
    Ok(u)
}

/// Expected information `sum_i n_i omega_i z_i z_i^T`.
fn expected_info<F: Real>(data: &Dataset<F>, link: &Link<F>, beta: (F, F)) -> Result<[[F; 2]; 2]> {
    let mut j = [[F::zero(); 2]; 2];
    for r in data.rows() {
        let eta = beta.0 + beta.1 * r.dose;
        let w = link.weight(eta)? * real(r.trials as f64);
        j[0][0] = j[0][0] + w;
        j[0][1] = j[0][1] + w * r.dose;
        j[1][0] = j[1][0] + w * r.dose;
        j[1][1] = j[1][1] + w * r.dose * r.dose;
    }
    Ok(j)
}

/// Complete separation test (grouped binomial): every group is all-events
/// or no-events and one kind sits strictly below the other on the dose
/// axis. In that case the likelihood has no finite maximizer.
fn completely_separated<F: Real>(data: &Dataset<F>) -> bool {
    let mut max_zero = F::neg_infinity();
    let mut min_zero = F::infinity();
    let mut max_full = F::neg_infinity();
    let mut min_full = F::infinity();
    for r in data.rows() {
        if r.events == 0 {
            max_zero = max_zero.max(r.dose);
            min_zero = min_zero.min(r.dose);
        } else if r.events == r.trials {
            max_full = max_full.max(r.dose);
            min_full = min_full.min(r.dose);
        } else {
            return false;
        }
    }
    if !(max_zero.is_finite() && max_full.is_finite()) {
        return false; // only one kind present; a slope is not even pulled
    }
    max_zero < min_full || max_full < min_zero
}

/// Fisher scoring with step-halving.
///
/// Convergence requires both a score norm below `tol` and a relatively
/// small Newton step; hitting `max_iter` returns `converged = false`
/// rather than an error. Perfectly separated data, or a standardized slope
/// beyond 1e4, abort with a separation error.
pub fn fit_mle<F: Real>(
    data: &Dataset<F>,
    link: &Link<F>,
    max_iter: usize,
    tol: F,
) -> Result<FitResult<F>> {
    if completely_separated(data) {
        return Err(Error::Separation {
            beta1_std: f64::INFINITY,
        });
    }
    let n_total: f64 = data.rows().iter().map(|r| r.trials as f64).sum();
    let y_total: f64 = data.rows().iter().map(|r| r.events as f64).sum();
    let rate = (y_total / n_total).clamp(0.01, 0.99);

    // dose standardization for the divergence guard
    let mean_x =
        data.rows().iter().fold(F::zero(), |a, r| a + r.dose) / F::of_usize(data.rows().len());
    let sd_x = (data
        .rows()
        .iter()
        .fold(F::zero(), |a, r| a + (r.dose - mean_x) * (r.dose - mean_x))
        / F::of_usize(data.rows().len()))
    .sqrt();

    let mut beta = (link.quantile(real(rate))?, real::<F>(1e-3));
    if matches!(link.kind(), crate::links::LinkKind::Exponential) {
        beta.0 = beta.0.max(link.domain().lower + real(0.1));
    }
    let mut ll = log_likelihood(data, link, beta)?;
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..max_iter {
        iterations += 1;
        let u = score(data, link, beta)?;
        let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let j = expected_info(data, link, beta)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > real(1e-300)) {
            return Err(Error::Singular {
                what: "expected information in Fisher scoring",
            });
        }
        let step = [
            (j[1][1] * u[0] - j[0][1] * u[1]) / det,
            (-j[1][0] * u[0] + j[0][0] * u[1]) / det,
        ];
        // a vanishing score with a non-small step means the maximizer is
        // escaping to infinity, not that we have converged
        let step_norm = (step[0] * step[0] + step[1] * step[1]).sqrt();
        let beta_norm = (beta.0 * beta.0 + beta.1 * beta.1).sqrt();
        if norm <= tol && step_norm <= real::<F>(1e-8) * (F::one() + beta_norm) {
            converged = true;
            break;
        }

        // step-halving: reject likelihood decreases and domain violations
        let mut lambda = F::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand = (beta.0 + lambda * step[0], beta.1 + lambda * step[1]);
            match log_likelihood(data, link, cand) {
                Ok(cand_ll) if cand_ll >= ll - real::<F>(1e-13) * ll.abs() => {
                    beta = cand;
                    ll = cand_ll;
                    accepted = true;
                    break;
                }
                _ => lambda = lambda / real(2.0),
            }
        }
        if !accepted {
            break; // stalled; report non-convergence below
        }
        let beta1_std = (beta.1 * sd_x).abs();
        if beta1_std > real(SEPARATION_GUARD) {
            return Err(Error::Separation {
                beta1_std: beta1_std.as_f64(),
            });
        }
    }

    let j = expected_info(data, link, beta)?;
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let se = if det > F::zero() {
        [(j[1][1] / det).sqrt(), (j[0][0] / det).sqrt()]
    } else {
        [F::nan(), F::nan()]
    };

    Ok(FitResult {
        beta0: beta.0,
        beta1: beta.1,
        se,
        loglik: ll,
        converged,
        iterations,
    })
}

/// Fitted response probability `F(beta0 + beta1 x)`.
pub fn predict<F: Real>(link: &Link<F>, beta: (F, F), x: F) -> Result<F> {
    link.cdf(beta.0 + beta.1 * x)
}

/// Euclidean norm of the score vector at `beta`.
pub fn score_norm<F: Real>(data: &Dataset<F>, link: &Link<F>, beta: (F, F)) -> Result<F> {
    let u = score(data, link, beta)?;
    Ok((u[0] * u[0] + u[1] * u[1]).sqrt())
}
