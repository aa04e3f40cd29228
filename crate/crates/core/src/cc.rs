//! The constant-composition secrecy exponent.
//!
//! `E(R) = min_V { D(V || W | P) + [R - g(V || W | P)]^+ }` where
//! `g(V) = omega(V || W | P) + H(P o V) + min_{V': P o V' = P o V} D(V' || W | P)`.
//! The inner minimum is solved through its concave dual in `rho`; the outer
//! minimum over conditionals is a global grid search with refinement.
//!
//! Also here: Gallager's `E0` and the weaker exponent built from it, which
//! lower-bounds the constant-composition exponent.

use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::iid::{check_lambda, check_rate, es_iid, is_zero_capacity};
use crate::optim::{golden_section_max, grid_minimize, legendre_max, log_sum_exp, GridPoint, GridSearch, Regime, REGIME_TOL};
use crate::prob::{
    conditional_divergence_of, entropy_of, mutual_information, omega_of, output_marginal_of,
    Channel, Distribution,
};

const GRAD_TOL: f64 = 1e-10;
const MAX_ITER: usize = 10_000;
const RHO_LIMIT: f64 = 1e4;

/// Maximizer of the dual of `min_{V': P o V' = Q_Z} D(V' || W | P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// One entry per output, with zero `Q_Z`-weighted mean; `-inf` where
    /// `Q_Z` vanishes.
    pub rho: Vec<f64>,
    /// `+inf` when no `V'` meets the marginal constraint.
    pub value: f64,
    /// Rows proportional to `W(z|x) exp(rho_z)`.
    pub optimal_vprime: Channel,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcExponent {
    /// Exponent in nats; `+inf` for zero-capacity inputs.
    pub exponent: f64,
    pub minimizing_v: Channel,
    pub g_at_optimum: f64,
    pub regime: Regime,
}

struct DualOutcome {
    rho: Vec<f64>,
    value: f64,
    converged: bool,
    iterations: usize,
}

/// Damped Newton ascent on
/// `phi(rho) = sum_z rho_z Q_Z(z) - sum_x P(x) ln sum_z W(z|x) e^{rho_z}`,
/// over the outputs in the support of `Q_Z` with the first one pinned at 0.
fn dual_solve(p: &[f64], w: &[f64], nz: usize, qz: &[f64]) -> DualOutcome {
    let support: Vec<usize> = (0..nz).filter(|&z| qz[z] > 0.0).collect();
    let k = support.len();
    let qs: Vec<f64> = support.iter().map(|&z| qz[z]).collect();
    let rows: Vec<(f64, Vec<f64>)> = p
        .iter()
        .enumerate()
        .filter(|(_, &px)| px > 0.0)
        .map(|(x, &px)| (px, support.iter().map(|&z| w[x * nz + z].ln()).collect()))
        .collect();

    let scatter = |rho_s: &[f64]| {
        let mut rho = vec![f64::NEG_INFINITY; nz];
        for (&z, &r) in support.iter().zip(rho_s) {
            rho[z] = r;
        }
        rho
    };
    let infeasible = |iterations| DualOutcome {
        rho: scatter(&vec![0.0; k]),
        value: f64::INFINITY,
        converged: false,
        iterations,
    };

    let row_blocked = rows.iter().any(|(_, lw)| lw.iter().all(|l| *l == f64::NEG_INFINITY));
    let col_blocked = (0..k).any(|j| rows.iter().all(|(_, lw)| lw[j] == f64::NEG_INFINITY));
    if k == 0 || row_blocked || col_blocked {
        return infeasible(0);
    }
    if k == 1 {
        let value = rows.iter().map(|(px, lw)| -px * lw[0]).sum();
        return DualOutcome {
            rho: scatter(&[0.0]),
            value,
            converged: true,
            iterations: 0,
        };
    }

    // phi, full gradient over the support, and the reduced negative Hessian.
    let evaluate = |rho: &[f64], with_hessian: bool| {
        let mut phi: f64 = qs.iter().zip(rho).map(|(q, r)| q * r).sum();
        let mut grad = qs.clone();
        let mut neg_hess = DMatrix::<f64>::zeros(k - 1, k - 1);
        let mut v = vec![0.0; k];
        for (px, lw) in &rows {
            let lse = log_sum_exp(lw.iter().zip(rho).map(|(l, r)| l + r));
            phi -= px * lse;
            for j in 0..k {
                v[j] = (lw[j] + rho[j] - lse).exp();
                grad[j] -= px * v[j];
            }
            if with_hessian {
                for i in 1..k {
                    neg_hess[(i - 1, i - 1)] += px * v[i];
                    for j in 1..k {
                        neg_hess[(i - 1, j - 1)] -= px * v[i] * v[j];
                    }
                }
            }
        }
        (phi, grad, neg_hess)
    };
    let sup_norm = |g: &[f64]| g.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut rho = vec![0.0; k];
    let (mut phi, mut grad, mut neg_hess) = evaluate(&rho, true);
    let mut iterations = 0;
    let mut converged = sup_norm(&grad) < GRAD_TOL;
    while !converged && iterations < MAX_ITER {
        iterations += 1;
        let g_red = DVector::from_column_slice(&grad[1..]);
        let newton = {
            let mut mu = 1e-13;
            loop {
                let mut m = neg_hess.clone();
                for i in 0..k - 1 {
                    m[(i, i)] += mu;
                }
                if let Some(ch) = m.cholesky() {
                    break Some(ch.solve(&g_red));
                }
                mu *= 100.0;
                if mu > 1.0 {
                    break None;
                }
            }
        };
        let g_norm = sup_norm(&grad);
        let mut accepted = false;
        for direction in newton.into_iter().chain(std::iter::once(g_red.clone())) {
            let slope = g_red.dot(&direction);
            if !(slope > 0.0) {
                continue;
            }
            let mut alpha = 1.0;
            for _ in 0..60 {
                let mut trial = rho.clone();
                for i in 1..k {
                    trial[i] += alpha * direction[i - 1];
                }
                let (phi_t, grad_t, _) = evaluate(&trial, false);
                let sufficient = phi_t >= phi + 1e-4 * alpha * slope;
                // Below rounding resolution of phi, accept any step that
                // shrinks the gradient without losing value.
                let flat = phi_t >= phi - 1e-14 * (1.0 + phi.abs()) && sup_norm(&grad_t) < g_norm;
                if phi_t.is_finite() && (sufficient || flat) {
                    rho = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            break;
        }
        let shift: f64 = qs.iter().zip(&rho).map(|(q, r)| q * r).sum();
        if rho.iter().any(|r| (r - shift).abs() > RHO_LIMIT) {
            return infeasible(iterations);
        }
        (phi, grad, neg_hess) = evaluate(&rho, true);
        converged = sup_norm(&grad) < GRAD_TOL;
    }

    let shift: f64 = qs.iter().zip(&rho).map(|(q, r)| q * r).sum();
    rho.iter_mut().for_each(|r| *r -= shift);
    DualOutcome {
        value: evaluate(&rho, false).0,
        rho: scatter(&rho),
        converged,
        iterations,
    }
}

/// `min_{V': P o V' = Q_Z} D(V' || W | P)` through its concave dual.
pub fn constrained_div_min(p: &Distribution, w: &Channel, qz: &Distribution) -> Result<DualSolution> {
    w.check_input(p)?;
    if qz.len() != w.outputs() {
        return Err(Error::AlphabetMismatch {
            expected: w.outputs(),
            found: qz.len(),
        });
    }
    let nz = w.outputs();
    let out = dual_solve(p.masses(), w.entries(), nz, qz.masses());
    let mut rows = Vec::with_capacity(w.inputs());
    for x in 0..w.inputs() {
        let weights: Vec<f64> = (0..nz)
            .map(|z| {
                if out.rho[z] == f64::NEG_INFINITY {
                    0.0
                } else {
                    w.get(x, z) * out.rho[z].exp()
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            rows.push(weights.iter().map(|v| v / total).collect());
        } else {
            rows.push(w.row(x).to_vec());
        }
    }
    Ok(DualSolution {
        rho: out.rho,
        value: out.value,
        optimal_vprime: Channel::new(rows)?,
        converged: out.converged,
        iterations: out.iterations,
    })
}

pub(crate) fn g_of(p: &[f64], v: &[f64], w: &[f64], nz: usize) -> f64 {
    let om = omega_of(v, w, p, nz);
    if om == f64::NEG_INFINITY {
        return om;
    }
    let qz = output_marginal_of(p, v, nz);
    om + entropy_of(&qz) + dual_solve(p, w, nz, &qz).value
}

/// `g(V || W | P)`; `-inf` exactly when `omega(V || W | P)` is.
pub fn g_func(v: &Channel, w: &Channel, p: &Distribution) -> Result<f64> {
    v.check_same_shape(w)?;
    v.check_input(p)?;
    Ok(g_of(p.masses(), v.entries(), w.entries(), w.outputs()))
}

/// Per output `z`: `ln A_z` with `A_z = sum_x P(x) W(z|x)^t`, skipping
/// outputs no input in the support reaches.
fn e0_columns(p: &Distribution, w: &Channel, t: f64) -> Vec<f64> {
    (0..w.outputs())
        .filter_map(|z| {
            let terms: Vec<f64> = p
                .support()
                .filter(|&x| w.get(x, z) > 0.0)
                .map(|x| p.masses()[x].ln() + t * w.get(x, z).ln())
                .collect();
            (!terms.is_empty()).then(|| log_sum_exp(terms))
        })
        .collect()
}

/// Per output `z`: the largest `W(z|x)` over the support and the `P`-mass
/// of the inputs attaining it.
fn e0_maxima(p: &Distribution, w: &Channel) -> Vec<(f64, f64)> {
    (0..w.outputs())
        .filter_map(|z| {
            let top = p.support().map(|x| w.get(x, z)).fold(0.0, f64::max);
            (top > 0.0).then(|| {
                let mass = p
                    .support()
                    .filter(|&x| w.get(x, z) == top)
                    .map(|x| p.masses()[x])
                    .sum();
                (top, mass)
            })
        })
        .collect()
}

fn e0_value(p: &Distribution, w: &Channel, lambda: f64) -> f64 {
    if lambda >= 1.0 {
        return log_sum_exp(e0_maxima(p, w).into_iter().map(|(top, _)| top.ln()));
    }
    let s = 1.0 - lambda;
    log_sum_exp(e0_columns(p, w, 1.0 / s).into_iter().map(|a| s * a))
}

/// `E0(P, W, l) = ln sum_z (sum_x P(x) W(z|x)^{1/(1-l)})^{1-l}`, with the
/// limit `ln sum_z max_x W(z|x)` at `l = 1`.
pub fn e0(p: &Distribution, w: &Channel, lambda: f64) -> Result<f64> {
    w.check_input(p)?;
    check_lambda(lambda)?;
    Ok(e0_value(p, w, lambda))
}

fn e0_slope_value(p: &Distribution, w: &Channel, lambda: f64) -> f64 {
    if lambda >= 1.0 {
        let maxima = e0_maxima(p, w);
        let total: f64 = maxima.iter().map(|(top, _)| top).sum();
        return maxima.iter().map(|(top, mass)| top * -mass.ln()).sum::<f64>() / total;
    }
    // dE0/dl = sum_z B_z D(w_z || P) with w_z(x) ∝ P(x) W(z|x)^t and
    // B_z ∝ A_z^{1-l}.
    let s = 1.0 - lambda;
    let t = 1.0 / s;
    let cols = e0_columns(p, w, t);
    let norm = log_sum_exp(cols.iter().map(|a| s * a));
    let mut slope = 0.0;
    let mut col = 0;
    for z in 0..w.outputs() {
        if !p.support().any(|x| w.get(x, z) > 0.0) {
            continue;
        }
        let log_a = cols[col];
        col += 1;
        let weight = (s * log_a - norm).exp();
        let div: f64 = p
            .support()
            .filter(|&x| w.get(x, z) > 0.0)
            .map(|x| {
                let log_ratio = t * w.get(x, z).ln() - log_a;
                (p.masses()[x].ln() + log_ratio).exp() * log_ratio
            })
            .sum();
        slope += weight * div;
    }
    slope
}

/// `dE0/dl`, including the one-sided limit at `l = 1`.
pub fn e0_slope(p: &Distribution, w: &Channel, lambda: f64) -> Result<f64> {
    w.check_input(p)?;
    check_lambda(lambda)?;
    Ok(e0_slope_value(p, w, lambda))
}

/// `max_{0 <= l <= 1} { l R - E0(l) }`, solved in the same three regimes as
/// the i.i.d. exponent.
pub fn es_cc_lower(p: &Distribution, w: &Channel, rate: f64) -> Result<(f64, Regime)> {
    w.check_input(p)?;
    check_rate(rate)?;
    if is_zero_capacity(p, w)? {
        return Ok((f64::INFINITY, Regime::Degenerate));
    }
    let info = mutual_information(p, w)?;
    let (value, _, regime) = legendre_max(
        rate,
        info,
        e0_slope_value(p, w, 1.0),
        e0_value(p, w, 1.0),
        |l| e0_value(p, w, l),
    );
    Ok((value, regime))
}

/// Search settings for [`CcSolver`].
#[derive(Debug, Clone)]
pub struct CcOptions {
    /// Coarse resolution of each row simplex.
    pub coarse: u32,
    /// Step shrink factor per refinement round.
    pub shrink: u32,
    /// Refinement rounds of the direct search.
    pub rounds: usize,
    /// Refinement rounds of the smooth sub-searches.
    pub smooth_rounds: usize,
    /// Largest number of points one pass may evaluate.
    pub budget: f64,
}

impl Default for CcOptions {
    fn default() -> Self {
        Self {
            coarse: 64,
            shrink: 4,
            rounds: 4,
            smooth_rounds: 14,
            budget: 2e6,
        }
    }
}

/// Outer minimization over conditionals `V << W`, parametrized by the rows
/// `x` in the support of `P`, each restricted to the support of `W(.|x)`.
/// Solving for many rates reuses the minimizer of `D - g`.
pub struct CcSolver {
    p: Distribution,
    w: Channel,
    rows: Vec<usize>,
    supports: Vec<Vec<usize>>,
    info: f64,
    degenerate: bool,
    opts: CcOptions,
    saturation: OnceCell<Result<(Vec<f64>, f64, f64)>>,
}

impl CcSolver {
    pub fn new(p: &Distribution, w: &Channel) -> Result<Self> {
        Self::with_options(p, w, CcOptions::default())
    }

    pub fn with_options(p: &Distribution, w: &Channel, opts: CcOptions) -> Result<Self> {
        w.check_input(p)?;
        let rows: Vec<usize> = p.support().collect();
        let supports = rows
            .iter()
            .map(|&x| (0..w.outputs()).filter(|&z| w.get(x, z) > 0.0).collect())
            .collect();
        Ok(Self {
            degenerate: is_zero_capacity(p, w)?,
            info: mutual_information(p, w)?,
            p: p.clone(),
            w: w.clone(),
            rows,
            supports,
            opts,
            saturation: OnceCell::new(),
        })
    }

    pub fn mutual_information(&self) -> f64 {
        self.info
    }

    fn blocks(&self) -> Vec<usize> {
        self.supports.iter().map(Vec::len).collect()
    }

    fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let nz = self.w.outputs();
        let mut v = self.w.entries().to_vec();
        let mut off = 0;
        for (&x, sup) in self.rows.iter().zip(&self.supports) {
            v[x * nz..(x + 1) * nz].fill(0.0);
            for (&z, &c) in sup.iter().zip(&coords[off..off + sup.len()]) {
                v[x * nz + z] = c;
            }
            off += sup.len();
        }
        v
    }

    fn coords_of(&self, v: &Channel) -> Vec<f64> {
        let mut coords = Vec::new();
        for (&x, sup) in self.rows.iter().zip(&self.supports) {
            let row: Vec<f64> = sup.iter().map(|&z| v.get(x, z)).collect();
            let total: f64 = row.iter().sum();
            coords.extend(row.iter().map(|c| c / total));
        }
        coords
    }

    /// `(D(V || W | P), g(V || W | P))` at grid coordinates.
    fn parts(&self, coords: &[f64]) -> (f64, f64) {
        let v = self.embed(coords);
        let nz = self.w.outputs();
        let pm = self.p.masses();
        (
            conditional_divergence_of(&v, self.w.entries(), pm, nz),
            g_of(pm, &v, self.w.entries(), nz),
        )
    }

    fn search(&self, rounds: usize, starts: usize) -> GridSearch {
        GridSearch {
            coarse: self.opts.coarse,
            shrink: self.opts.shrink,
            radius: 2,
            rounds,
            starts,
            budget: self.opts.budget,
        }
    }

    /// Minimizer of `D - g` with the values of `D` and `g` there.
    fn saturation(&self) -> Result<(Vec<f64>, f64, f64)> {
        self.saturation
            .get_or_init(|| {
                let seeds = vec![self.coords_of(&self.w)];
                let best = grid_minimize(
                    &self.blocks(),
                    &self.search(self.opts.smooth_rounds, 3),
                    &seeds,
                    |c| {
                        let (d, g) = self.parts(c);
                        d - g
                    },
                )?;
                let (d, g) = self.parts(&best.coords);
                Ok((best.coords, d, g))
            })
            .clone()
    }

    /// The smallest rate from which the exponent grows with unit slope.
    pub fn saturation_rate(&self) -> Result<f64> {
        Ok(self.saturation()?.2)
    }

    fn result(&self, coords: &[f64], exponent: f64, regime: Regime) -> Result<CcExponent> {
        let v = Channel::from_flat(self.w.inputs(), self.w.outputs(), self.embed(coords))?;
        let (_, g) = self.parts(coords);
        Ok(CcExponent {
            exponent,
            minimizing_v: v,
            g_at_optimum: g,
            regime,
        })
    }

    fn trivial(&self, rate: f64) -> Option<Result<CcExponent>> {
        if let Err(e) = check_rate(rate) {
            return Some(Err(e));
        }
        let at_w = self.coords_of(&self.w);
        if self.degenerate {
            return Some(self.result(&at_w, f64::INFINITY, Regime::Degenerate));
        }
        if rate <= self.info + REGIME_TOL {
            return Some(self.result(&at_w, 0.0, Regime::Zero));
        }
        None
    }

    /// Minimum of `D` over the crease `g = R`. One coordinate of one row
    /// (`leading` picks the first eligible row, otherwise the last) is solved
    /// from `g = R` by root finding; the rest range over a grid.
    fn crease(&self, rate: f64, leading: bool, seeds: &[Vec<f64>]) -> Result<Option<GridPoint>> {
        let blocks = self.blocks();
        let eligible: Vec<usize> = (0..blocks.len()).filter(|&b| blocks[b] >= 2).collect();
        let Some(&b) = (if leading { eligible.first() } else { eligible.last() }) else {
            return Ok(None);
        };
        let start: usize = blocks[..b].iter().sum();
        let size = blocks[b];
        let mut reduced = blocks.clone();
        reduced[b] = size - 1;

        // Reduced block b holds the middle coordinates followed by the joint
        // mass m of the first and last coordinates; u is the first of those.
        let lift = |y: &[f64], u: f64| {
            let mut c = Vec::with_capacity(y.len() + 1);
            c.extend_from_slice(&y[..start]);
            let m = y[start + size - 2];
            c.push(u);
            c.extend_from_slice(&y[start..start + size - 2]);
            c.push((m - u).max(0.0));
            c.extend_from_slice(&y[start + size - 1..]);
            c
        };
        let reduce = |c: &[f64]| {
            let mut y = Vec::with_capacity(c.len() - 1);
            y.extend_from_slice(&c[..start]);
            y.extend_from_slice(&c[start + 1..start + size - 1]);
            y.push(c[start] + c[start + size - 1]);
            y.extend_from_slice(&c[start + size..]);
            y
        };

        let on_crease = |y: &[f64]| -> f64 {
            let m = y[start + size - 2];
            let g_at = |u: f64| self.parts(&lift(y, u)).1;
            let (u_min, neg) = golden_section_max(|u| -g_at(u), 0.0, m, 1e-12);
            if -neg > rate {
                return f64::INFINITY;
            }
            let mut best = f64::INFINITY;
            for (lo, hi) in [(0.0, u_min), (m, u_min)] {
                // g(lo) >= R >= g(hi) brackets a root.
                if g_at(lo) < rate {
                    continue;
                }
                let (mut a, mut c) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + c);
                    if mid == a || mid == c {
                        break;
                    }
                    if g_at(mid) >= rate {
                        a = mid;
                    } else {
                        c = mid;
                    }
                }
                best = best.min(self.parts(&lift(y, 0.5 * (a + c))).0);
            }
            best
        };

        let reduced_seeds: Vec<Vec<f64>> = seeds.iter().map(|s| reduce(s)).collect();
        let found = grid_minimize(
            &reduced,
            &self.search(self.opts.smooth_rounds, 2),
            &reduced_seeds,
            on_crease,
        )?;
        if !found.value.is_finite() {
            return Ok(None);
        }
        // Recover the crease point itself.
        let y = &found.coords;
        let m = y[start + size - 2];
        let mut best: Option<GridPoint> = None;
        let g_at = |u: f64| self.parts(&lift(y, u)).1;
        let (u_min, _) = golden_section_max(|u| -g_at(u), 0.0, m, 1e-12);
        for (lo, hi) in [(0.0, u_min), (m, u_min)] {
            if g_at(lo) < rate {
                continue;
            }
            let (mut a, mut c) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + c);
                if mid == a || mid == c {
                    break;
                }
                if g_at(mid) >= rate {
                    a = mid;
                } else {
                    c = mid;
                }
            }
            let coords = lift(y, 0.5 * (a + c));
            let value = self.parts(&coords).0;
            if best.as_ref().map_or(true, |b| value < b.value) {
                best = Some(GridPoint { coords, value });
            }
        }
        Ok(best)
    }

    /// `E_s^cc(P, W, R)`.
    pub fn solve(&self, rate: f64) -> Result<CcExponent> {
        if let Some(done) = self.trivial(rate) {
            return done;
        }
        let (sat, d_sat, g_sat) = self.saturation()?;
        if g_sat <= rate {
            // D + [R - g]^+ >= R + (D - g) >= R + min(D - g), attained here.
            return self.result(&sat, rate + d_sat - g_sat, Regime::Saturation);
        }

        let objective = |c: &[f64]| {
            let (d, g) = self.parts(c);
            d + (rate - g).max(0.0)
        };
        let mut seeds = vec![self.coords_of(&self.w), sat];
        let tilted = es_iid(&self.p, &self.w, rate)?.solution.tilted;
        seeds.push(self.coords_of(&tilted.conditional(&self.w)?));
        let direct = grid_minimize(&self.blocks(), &self.search(self.opts.rounds, 3), &seeds, objective)?;

        let mut best = (objective(&direct.coords), direct.coords.clone());
        if let Some(point) = self.crease(rate, false, &[direct.coords])? {
            let value = objective(&point.coords);
            if value < best.0 {
                best = (value, point.coords);
            }
        }
        self.result(&best.1, best.0, Regime::Parametric)
    }

    /// The alternative form `R + min_{V: g(V) <= R} { D(V) - g(V) }`,
    /// computed by a separate search.
    pub fn solve_alt(&self, rate: f64) -> Result<CcExponent> {
        if let Some(done) = self.trivial(rate) {
            return done;
        }
        let (sat, d_sat, g_sat) = self.saturation()?;
        if g_sat <= rate {
            return self.result(&sat, rate + d_sat - g_sat, Regime::Saturation);
        }

        let feasible = |c: &[f64]| {
            let (d, g) = self.parts(c);
            if g <= rate {
                rate + d - g
            } else {
                f64::INFINITY
            }
        };
        let seeds = vec![self.coords_of(&self.w)];
        let interior = grid_minimize(&self.blocks(), &self.search(self.opts.rounds, 3), &seeds, feasible)?;
        let mut best = (interior.value, interior.coords.clone());
        if let Some(point) = self.crease(rate, true, &[interior.coords])? {
            let value = feasible(&point.coords).min(point.value);
            if value < best.0 {
                best = (value, point.coords);
            }
        }
        self.result(&best.1, best.0, Regime::Parametric)
    }
}

/// `E_s^cc(P, W, R)`; for sweeps over many rates reuse a [`CcSolver`].
pub fn es_cc(p: &Distribution, w: &Channel, rate: f64) -> Result<CcExponent> {
    CcSolver::new(p, w)?.solve(rate)
}

/// The alternative form of [`es_cc`], valid for `R > I(P, W)`.
pub fn es_cc_alt(p: &Distribution, w: &Channel, rate: f64) -> Result<CcExponent> {
    CcSolver::new(p, w)?.solve_alt(rate)
}
