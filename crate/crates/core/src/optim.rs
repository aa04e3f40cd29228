//! Small optimizers shared by the exponent solvers.

use crate::error::{Error, Result};
use crate::ntype::enumerate_ntypes_capped;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a concave function on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Where a rate falls relative to the exponent curve's two breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `R <= I(P, W)`: the exponent is zero.
    Zero,
    /// Between the breakpoints: the optimizing tilt is interior.
    Parametric,
    /// Beyond the upper breakpoint: the exponent grows with slope one.
    Saturation,
    /// `I(P, W) = 0`: the exponent is `+inf`.
    Degenerate,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Zero => "zero",
            Regime::Parametric => "parametric",
            Regime::Saturation => "saturation",
            Regime::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tolerance used when comparing a rate against a regime breakpoint.
pub(crate) const REGIME_TOL: f64 = 1e-12;
/// Bracket width at which the tilt search stops.
pub(crate) const LAMBDA_TOL: f64 = 1e-10;

/// `max_{0 <= l <= 1} { l R - F(l) }` for a convex `F` with `F(0) = 0`,
/// `F'(0) = slope0` and `F'(1) = slope1`.
pub(crate) fn legendre_max(
    rate: f64,
    slope0: f64,
    slope1: f64,
    value1: f64,
    f: impl Fn(f64) -> f64,
) -> (f64, f64, Regime) {
    if rate <= slope0 + REGIME_TOL {
        (0.0, 0.0, Regime::Zero)
    } else if rate >= slope1 - REGIME_TOL {
        (rate - value1, 1.0, Regime::Saturation)
    } else {
        let (lambda, value) = golden_section_max(|l| l * rate - f(l), 0.0, 1.0, LAMBDA_TOL);
        (value.max(0.0), lambda, Regime::Parametric)
    }
}

/// Numerically stable `ln sum exp(v)`; `-inf` for an empty or all `-inf`
/// input.
pub(crate) fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator. Terms are merged in the order they
/// are pushed, so a fixed order gives bit-stable results.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl LogSumExp {
    pub(crate) fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub(crate) fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Settings for [`grid_minimize`].
#[derive(Debug, Clone)]
pub(crate) struct GridSearch {
    /// Coarse grid resolution: every coordinate is a multiple of `1/coarse`.
    pub coarse: u32,
    /// Factor by which the step shrinks each refinement round.
    pub shrink: u32,
    /// Half-width of the local box, measured in steps of the previous round.
    pub radius: u32,
    /// Number of shrinking rounds after the coarse pass.
    pub rounds: usize,
    /// Number of distinct coarse minimizers refined in addition to the seeds.
    pub starts: usize,
    /// Maximum number of points a single pass may evaluate.
    pub budget: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct GridPoint {
    pub coords: Vec<f64>,
    pub value: f64,
}

/// Minimizes `f` over a product of probability simplices whose dimensions
/// are given by `blocks` (block `i` holds `blocks[i]` coordinates summing to
/// one). A full coarse grid pass is followed by local refinement around the
/// best coarse points and the seeds; a refinement pass is repeated at the
/// same scale while its minimizer sits on the edge of the local box.
pub(crate) fn grid_minimize(
    blocks: &[usize],
    opts: &GridSearch,
    seeds: &[Vec<f64>],
    mut f: impl FnMut(&[f64]) -> f64,
) -> Result<GridPoint> {
    let total: usize = blocks.iter().sum();
    let free_dims: usize = blocks.iter().map(|&b| b - 1).sum();

    let mut per_block = Vec::with_capacity(blocks.len());
    let mut coarse_count = 1.0;
    for &b in blocks {
        let list: Vec<Vec<f64>> = enumerate_ntypes_capped(b, opts.coarse, opts.budget as u64)?
            .map(|t| {
                use crate::ntype::TypeCounts;
                t.counts()
                    .iter()
                    .map(|&c| f64::from(c) / f64::from(opts.coarse))
                    .collect()
            })
            .collect();
        coarse_count *= list.len() as f64;
        per_block.push(list);
    }
    if coarse_count > opts.budget {
        return Err(Error::BudgetExceeded {
            what: "coarse grid",
            required: coarse_count,
            budget: opts.budget,
        });
    }
    let side = f64::from(2 * opts.radius * opts.shrink + 1);
    let local_count = side.powi(free_dims as i32);
    if local_count > opts.budget {
        return Err(Error::BudgetExceeded {
            what: "local refinement grid",
            required: local_count,
            budget: opts.budget,
        });
    }

    // Coarse pass, keeping the best `starts` points.
    let mut best: Vec<GridPoint> = Vec::new();
    let mut idx = vec![0usize; blocks.len()];
    let mut point = vec![0.0; total];
    'outer: loop {
        let mut off = 0;
        for (b, &i) in idx.iter().enumerate() {
            point[off..off + blocks[b]].copy_from_slice(&per_block[b][i]);
            off += blocks[b];
        }
        let value = f(&point);
        if value.is_finite() || best.is_empty() {
            insert_best(&mut best, opts.starts.max(1), &point, value);
        }
        for b in (0..blocks.len()).rev() {
            idx[b] += 1;
            if idx[b] < per_block[b].len() {
                continue 'outer;
            }
            idx[b] = 0;
        }
        break;
    }

    let mut starts: Vec<GridPoint> = best;
    for s in seeds {
        let value = f(s);
        starts.push(GridPoint {
            coords: s.clone(),
            value,
        });
    }

    let mut winner: Option<GridPoint> = None;
    for start in starts {
        if !start.value.is_finite() && winner.is_some() {
            continue;
        }
        let refined = refine(blocks, opts, start, &mut f);
        if winner.as_ref().map_or(true, |w| refined.value < w.value) {
            winner = Some(refined);
        }
    }
    winner.ok_or_else(|| Error::Numerical("empty search space".into()))
}

fn insert_best(best: &mut Vec<GridPoint>, keep: usize, point: &[f64], value: f64) {
    if best.len() == keep && value >= best[keep - 1].value {
        return;
    }
    let pos = best.partition_point(|p| p.value <= value);
    best.insert(
        pos,
        GridPoint {
            coords: point.to_vec(),
            value,
        },
    );
    best.truncate(keep);
}

fn refine(
    blocks: &[usize],
    opts: &GridSearch,
    start: GridPoint,
    f: &mut impl FnMut(&[f64]) -> f64,
) -> GridPoint {
    let free: Vec<(usize, usize)> = {
        // (coordinate index, block-last index) for each free coordinate
        let mut v = Vec::new();
        let mut off = 0;
        for &b in blocks {
            for j in 0..b - 1 {
                v.push((off + j, off + b - 1));
            }
            off += b;
        }
        v
    };
    let k = (opts.radius * opts.shrink) as i64;
    let mut current = start;
    let mut step = 1.0 / f64::from(opts.coarse);
    let mut rounds_done = 0;
    let mut repeats = 0;
    while rounds_done < opts.rounds {
        let fine = if repeats == 0 {
            step / f64::from(opts.shrink)
        } else {
            step
        };
        let center = current.coords.clone();
        let mut offsets = vec![-k; free.len()];
        let mut candidate = center.clone();
        let mut best_offsets = vec![0i64; free.len()];
        let mut improved = false;
        if free.is_empty() {
            break;
        }
        loop {
            candidate.copy_from_slice(&center);
            for (d, &(i, _)) in free.iter().enumerate() {
                candidate[i] = center[i] + offsets[d] as f64 * fine;
            }
            if project_blocks(blocks, &mut candidate) {
                let value = f(&candidate);
                if value < current.value {
                    current = GridPoint {
                        coords: candidate.clone(),
                        value,
                    };
                    best_offsets.copy_from_slice(&offsets);
                    improved = true;
                }
            }
            let mut exhausted = true;
            for d in (0..free.len()).rev() {
                offsets[d] += 1;
                if offsets[d] <= k {
                    exhausted = false;
                    break;
                }
                offsets[d] = -k;
            }
            if exhausted {
                break;
            }
        }
        let on_edge = improved && best_offsets.iter().any(|o| o.abs() == k);
        step = fine;
        if on_edge && repeats < 16 {
            repeats += 1;
        } else {
            repeats = 0;
            rounds_done += 1;
        }
    }
    current
}

/// Recomputes the last coordinate of each block from the others and checks
/// that every coordinate is nonnegative.
fn project_blocks(blocks: &[usize], coords: &mut [f64]) -> bool {
    let mut off = 0;
    for &b in blocks {
        let block = &mut coords[off..off + b];
        let head: f64 = block[..b - 1].iter().sum();
        block[b - 1] = 1.0 - head;
        for c in block.iter_mut() {
            if *c < 0.0 {
                if *c < -1e-14 {
                    return false;
                }
                *c = 0.0;
            }
        }
        off += b;
    }
    true
}
