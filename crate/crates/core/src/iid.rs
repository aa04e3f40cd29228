//! The i.i.d.-ensemble secrecy exponent.
//!
//! `E(R) = max_{0 <= l <= 1} { l R - F0(l) }` with
//! `F0(l) = ln sum_{x,z} P(x) W(z|x)^{1+l} (P o W)(z)^{-l}`, solved in three
//! regimes: zero up to `R = I(P, W) = F0'(0)`, a golden-section search over
//! the tilt in between, and the closed form `R - F0(1)` from `R = F0'(1)` on.
//!
//! [`es_iid_brute`] evaluates the primal form
//! `min_Q { D(Q || P x W) + [R - f(Q || P x W)]^+ }` by grid search over the
//! joint simplex; it shares no code path with the dual solver and is used
//! as its oracle.

use crate::error::{Error, Result};
use crate::optim::{grid_minimize, legendre_max, log_sum_exp, GridSearch, Regime};
use crate::prob::{
    divergence_of, mutual_information, output_marginal_of, Channel, Distribution,
    JointDistribution,
};

/// Optimal tilt of the dual form together with the joint law that attains
/// the inner minimum `min_Q { D(Q || P x W) - l f(Q || P x W) } = -F0(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSolution {
    pub lambda: f64,
    /// `l R - F0(l)` at the returned tilt, in nats.
    pub objective: f64,
    /// `Q(x,z) ∝ P(x) W(z|x)^{1+l} (P o W)(z)^{-l}`.
    pub tilted: JointDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IidExponent {
    /// Exponent in nats; `+inf` for zero-capacity inputs.
    pub exponent: f64,
    pub solution: LambdaSolution,
    pub regime: Regime,
}

/// One sampled point of an exponent curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub rate: f64,
    pub exponent: f64,
    pub regime: Regime,
}

/// Exponent sampled over a rate grid, with the inputs it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    pub input: Distribution,
    pub channel: Channel,
    pub ensemble: &'static str,
    pub points: Vec<CurvePoint>,
}

/// True when every input in the support of `p` sees the same output law,
/// i.e. `I(P, W) = 0`.
pub fn is_zero_capacity(p: &Distribution, w: &Channel) -> Result<bool> {
    w.check_input(p)?;
    let pz = output_marginal_of(p.masses(), w.entries(), w.outputs());
    Ok(p.support().all(|x| {
        w.row(x)
            .iter()
            .zip(&pz)
            .all(|(a, b)| (a - b).abs() <= crate::prob::PROB_TOL)
    }))
}

/// Precomputed pieces of `F0`: for every cell with `P(x) W(z|x) > 0`, the
/// pair `(ln P(x)W(z|x), ln W(z|x)/P_Z(z))`, so that the summand is
/// `exp(a + l b)`.
struct TiltTerms {
    nx: usize,
    nz: usize,
    cells: Vec<(usize, f64, f64)>,
}

impl TiltTerms {
    fn new(p: &Distribution, w: &Channel) -> Self {
        let nz = w.outputs();
        let pz = output_marginal_of(p.masses(), w.entries(), nz);
        let mut cells = Vec::new();
        for (x, &px) in p.masses().iter().enumerate() {
            for z in 0..nz {
                let mass = px * w.get(x, z);
                if mass > 0.0 {
                    cells.push((x * nz + z, mass.ln(), (w.get(x, z) / pz[z]).ln()));
                }
            }
        }
        Self {
            nx: w.inputs(),
            nz,
            cells,
        }
    }

    fn value(&self, lambda: f64) -> f64 {
        log_sum_exp(self.cells.iter().map(|&(_, a, b)| a + lambda * b))
    }

    fn slope(&self, lambda: f64) -> f64 {
        let log_norm = self.value(lambda);
        self.cells
            .iter()
            .map(|&(_, a, b)| (a + lambda * b - log_norm).exp() * b)
            .sum()
    }

    fn tilted(&self, lambda: f64) -> JointDistribution {
        let log_norm = self.value(lambda);
        let mut masses = vec![0.0; self.nx * self.nz];
        for &(cell, a, b) in &self.cells {
            masses[cell] = (a + lambda * b - log_norm).exp();
        }
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|m| *m /= total);
        JointDistribution::new(self.nx, self.nz, masses).expect("tilted law is normalized")
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
        })
    }
}

pub(crate) fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "rate",
            value: rate,
        })
    }
}


/// `F0(P, W, l)`.
pub fn f0(p: &Distribution, w: &Channel, lambda: f64) -> Result<f64> {
    w.check_input(p)?;
    check_lambda(lambda)?;
    Ok(TiltTerms::new(p, w).value(lambda))
}

/// `dF0/dl`, differentiated term by term: the tilted average of
/// `ln W(z|x)/P_Z(z)`.
pub fn f0_slope(p: &Distribution, w: &Channel, lambda: f64) -> Result<f64> {
    w.check_input(p)?;
    check_lambda(lambda)?;
    Ok(TiltTerms::new(p, w).slope(lambda))
}

/// The tilted joint law `Q_l` attaining `min_Q { D(Q || P x W) - l f(Q || P x W) }`.
pub fn tilted_joint(p: &Distribution, w: &Channel, lambda: f64) -> Result<JointDistribution> {
    w.check_input(p)?;
    check_lambda(lambda)?;
    Ok(TiltTerms::new(p, w).tilted(lambda))
}

/// Exact i.i.d.-ensemble exponent `E_s^iid(P, W, R)` with its regime.
pub fn es_iid(p: &Distribution, w: &Channel, rate: f64) -> Result<IidExponent> {
    w.check_input(p)?;
    check_rate(rate)?;
    let terms = TiltTerms::new(p, w);
    if is_zero_capacity(p, w)? {
        return Ok(IidExponent {
            exponent: f64::INFINITY,
            solution: LambdaSolution {
                lambda: 0.0,
                objective: f64::INFINITY,
                tilted: terms.tilted(0.0),
            },
            regime: Regime::Degenerate,
        });
    }
    let info = mutual_information(p, w)?;
    let (exponent, lambda, regime) = legendre_max(rate, info, terms.slope(1.0), terms.value(1.0), |l| {
        terms.value(l)
    });
    Ok(IidExponent {
        exponent,
        solution: LambdaSolution {
            lambda,
            objective: exponent,
            tilted: terms.tilted(lambda),
        },
        regime,
    })
}

/// Samples `E_s^iid` over the given rates.
pub fn iid_curve(p: &Distribution, w: &Channel, rates: &[f64]) -> Result<ExponentCurve> {
    let points = rates
        .iter()
        .map(|&rate| {
            es_iid(p, w, rate).map(|e| CurvePoint {
                rate,
                exponent: e.exponent,
                regime: e.regime,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExponentCurve {
        input: p.clone(),
        channel: w.clone(),
        ensemble: "iid",
        points,
    })
}

/// Settings of the primal grid oracle.
#[derive(Debug, Clone)]
pub struct BruteOptions {
    /// Coarse resolution of the joint simplex.
    pub grid: u32,
    /// Step shrink factor per refinement round.
    pub shrink: u32,
    /// Number of shrinking refinement rounds.
    pub rounds: usize,
    /// Largest number of points one pass may evaluate.
    pub budget: f64,
}

impl Default for BruteOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            shrink: 8,
            rounds: 10,
            budget: 2e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteResult {
    pub value: f64,
    pub minimizer: JointDistribution,
}

/// Primal oracle for [`es_iid`]: grid search for
/// `min_Q { D(Q || P x W) + [R - f(Q || P x W)]^+ }` over joint laws `Q`
/// supported on the support of `P x W` (every other `Q` has infinite
/// divergence).
pub fn es_iid_brute(p: &Distribution, w: &Channel, rate: f64, grid: u32) -> Result<BruteResult> {
    es_iid_brute_with(
        p,
        w,
        rate,
        &BruteOptions {
            grid,
            ..BruteOptions::default()
        },
    )
}

pub fn es_iid_brute_with(
    p: &Distribution,
    w: &Channel,
    rate: f64,
    opts: &BruteOptions,
) -> Result<BruteResult> {
    w.check_input(p)?;
    check_rate(rate)?;
    let pxz = JointDistribution::product(p, w)?;
    let pz = output_marginal_of(p.masses(), w.entries(), w.outputs());
    let nz = w.outputs();
    let cells: Vec<usize> = (0..pxz.masses().len())
        .filter(|&c| pxz.masses()[c] > 0.0)
        .collect();
    let reference: Vec<f64> = cells.iter().map(|&c| pxz.masses()[c]).collect();
    let log_ratio: Vec<f64> = cells
        .iter()
        .map(|&c| (w.entries()[c] / pz[c % nz]).ln())
        .collect();

    let objective = |q: &[f64]| {
        let d = divergence_of(q, &reference);
        let f: f64 = q.iter().zip(&log_ratio).map(|(a, b)| a * b).sum();
        d + (rate - f).max(0.0)
    };
    let m = cells.len();

    // The objective is the maximum of two smooth convex pieces, D and
    // D + R - f. Its minimizer is P x W, the unconstrained minimizer of the
    // second piece, or a minimizer of D on the slice f = R. Each candidate
    // is found by grid search on a smooth function and scored with the true
    // objective, so every candidate value is attained.
    let mut candidates: Vec<Vec<f64>> = vec![reference.clone()];
    if m > 1 {
        let search = GridSearch {
            coarse: opts.grid,
            shrink: opts.shrink,
            radius: 2,
            rounds: opts.rounds,
            starts: 1,
            budget: opts.budget,
        };
        let tail = grid_minimize(&[m], &search, &[], |q| {
            let d = divergence_of(q, &reference);
            let f: f64 = q.iter().zip(&log_ratio).map(|(a, b)| a * b).sum();
            d + rate - f
        })?;
        candidates.push(tail.coords);

        // Slice f = R: coordinates `hi` and `lo` (largest and smallest log
        // ratio) are solved from the two linear constraints; the others and
        // a slack coordinate range over a simplex.
        let hi = (0..m).max_by(|&a, &b| log_ratio[a].total_cmp(&log_ratio[b])).unwrap();
        let lo = (0..m).min_by(|&a, &b| log_ratio[a].total_cmp(&log_ratio[b])).unwrap();
        if log_ratio[lo] < rate && rate < log_ratio[hi] {
            let rest: Vec<usize> = (0..m).filter(|&c| c != hi && c != lo).collect();
            let (bh, bl) = (log_ratio[hi], log_ratio[lo]);
            let lift = |free: &[f64]| -> Option<Vec<f64>> {
                // free = (q_k for k in rest, slack)
                let mut q = vec![0.0; m];
                let mut mass = 0.0;
                let mut tilt = 0.0;
                for (&c, &v) in rest.iter().zip(free) {
                    q[c] = v;
                    mass += v;
                    tilt += v * log_ratio[c];
                }
                let left = 1.0 - mass;
                let qh = (rate - tilt - left * bl) / (bh - bl);
                let ql = left - qh;
                if qh < 0.0 || ql < 0.0 {
                    return None;
                }
                q[hi] = qh;
                q[lo] = ql;
                Some(q)
            };
            let point = if rest.is_empty() {
                lift(&[])
            } else {
                let best = grid_minimize(&[rest.len() + 1], &search, &[], |free| {
                    lift(free).map_or(f64::INFINITY, |q| divergence_of(&q, &reference))
                })?;
                lift(&best.coords)
            };
            candidates.extend(point);
        }
    }

    let (value, coords) = candidates
        .into_iter()
        .map(|q| (objective(&q), q))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate");
    let mut masses = vec![0.0; pxz.masses().len()];
    for (&c, &q) in cells.iter().zip(&coords) {
        masses[c] = q;
    }
    Ok(BruteResult {
        value,
        minimizer: JointDistribution::new(pxz.nx(), pxz.nz(), masses)?,
    })
}
