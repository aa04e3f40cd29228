//! Monte-Carlo random codebooks with exact output laws.
//!
//! Output laws over `Z^n` are enumerated explicitly (sequence index with the
//! first symbol most significant), so every divergence and leakage reported
//! here is exact for the sampled code; only the average over codes is
//! estimated.
//!
//! Seeds: trial `t` at position `k` of the blocklength list uses
//! `master ^ ((k * trials + t) * 0x9E3779B97F4A7C15)` (wrapping) with
//! [`RNG_NAME`].

use std::collections::HashMap;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finite_n::{log_codebook_size, log_reference_per_sequence};
use crate::ntype::{quantize_to_ntype, Ensemble, NType, TypeCounts, DEFAULT_ENUM_CAP};
use crate::prob::{entropy_of, output_marginal_of, Channel, Distribution};

pub const RNG_NAME: &str = "ChaCha8";
pub const SEED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
/// Default cap on `|Z|^n` (and `|X|^n`) entries per law.
pub const DEFAULT_LAW_BUDGET: usize = 1 << 16;
/// Largest codebook the sampler accepts.
pub const MAX_CODEWORDS: u64 = 1 << 24;

pub fn trial_seed(master: u64, counter: u64) -> u64 {
    master ^ counter.wrapping_mul(SEED_MULTIPLIER)
}

/// How the code sampling distribution is built at each blocklength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Iid,
    /// Uniform over the type class of `P` rounded to an n-type.
    ConstantComposition,
}

impl EnsembleKind {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::Iid => "iid",
            EnsembleKind::ConstantComposition => "cc",
        }
    }

    pub fn at(self, p: &Distribution, n: u32) -> Result<Ensemble> {
        Ok(match self {
            EnsembleKind::Iid => Ensemble::Iid(p.clone()),
            EnsembleKind::ConstantComposition => Ensemble::ConstantComposition(quantize_to_ntype(p, n)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: u32,
    alphabet: usize,
    symbols: Vec<usize>,
    bins: Option<usize>,
    ensemble: &'static str,
    seed: u64,
}

impl Codebook {
    /// Builds a codebook from explicit codewords.
    pub fn from_codewords(alphabet: usize, codewords: &[Vec<usize>], ensemble: &'static str, seed: u64) -> Result<Self> {
        let n = codewords.first().map_or(0, Vec::len);
        if n == 0 || codewords.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidType("codewords must share a nonzero length".into()));
        }
        if let Some(&bad) = codewords.iter().flatten().find(|&&s| s >= alphabet) {
            return Err(Error::AlphabetMismatch {
                expected: alphabet,
                found: bad + 1,
            });
        }
        Ok(Self {
            n: n as u32,
            alphabet,
            symbols: codewords.concat(),
            bins: None,
            ensemble,
            seed,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len() / self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn codeword(&self, i: usize) -> &[usize] {
        let n = self.n as usize;
        &self.symbols[i * n..(i + 1) * n]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[usize]> {
        self.symbols.chunks(self.n as usize)
    }

    pub fn bins(&self) -> Option<usize> {
        self.bins
    }

    pub fn ensemble(&self) -> &'static str {
        self.ensemble
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Partitions the codewords into `count` consecutive bins of equal size.
    pub fn with_bins(mut self, count: usize) -> Result<Self> {
        if count == 0 || self.len() % count != 0 {
            return Err(Error::InvalidType(format!(
                "{} codewords cannot form {count} equal bins",
                self.len()
            )));
        }
        self.bins = Some(count);
        Ok(self)
    }

    /// The codewords of bin `s`.
    pub fn bin(&self, s: usize) -> Result<Codebook> {
        let count = self.bins.ok_or(Error::MissingBins)?;
        let size = self.len() / count;
        let n = self.n as usize;
        Ok(Codebook {
            symbols: self.symbols[s * size * n..(s + 1) * size * n].to_vec(),
            bins: None,
            ..self.clone()
        })
    }
}

/// Draws `m` codewords of length `n` independently from the ensemble.
pub fn sample_codebook(ensemble: &Ensemble, n: u32, m: u64, seed: u64) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "n", value: 0.0 });
    }
    if m == 0 || m > MAX_CODEWORDS {
        return Err(Error::BudgetExceeded {
            what: "codebook size",
            required: m as f64,
            budget: MAX_CODEWORDS as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = n as usize * m as usize;
    let symbols = match ensemble {
        Ensemble::Iid(p) => {
            let dist = WeightedIndex::new(p.masses()).map_err(|e| Error::Numerical(e.to_string()))?;
            (0..len).map(|_| dist.sample(&mut rng)).collect()
        }
        Ensemble::ConstantComposition(pn) => {
            if pn.n() != n {
                return Err(Error::InvalidType(format!(
                    "composition has n = {}, expected {n}",
                    pn.n()
                )));
            }
            let mut word: Vec<usize> = pn
                .counts()
                .iter()
                .enumerate()
                .flat_map(|(x, &c)| std::iter::repeat(x).take(c as usize))
                .collect();
            let mut out = Vec::with_capacity(len);
            for _ in 0..m {
                word.shuffle(&mut rng);
                out.extend_from_slice(&word);
            }
            out
        }
    };
    Ok(Codebook {
        n,
        alphabet: ensemble.input_size(),
        symbols,
        bins: None,
        ensemble: ensemble.label(),
        seed,
    })
}

/// A probability law over `Z^n`, indexed with the first symbol most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputLaw {
    n: u32,
    alphabet: usize,
    masses: Vec<f64>,
}

impl OutputLaw {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn index_of(&self, sequence: &[usize]) -> usize {
        sequence.iter().fold(0, |acc, &z| acc * self.alphabet + z)
    }

    pub fn sequence_of(&self, mut index: usize) -> Vec<usize> {
        let mut seq = vec![0; self.n as usize];
        for slot in seq.iter_mut().rev() {
            *slot = index % self.alphabet;
            index /= self.alphabet;
        }
        seq
    }
}

fn check_budget(base: usize, n: u32, budget: usize) -> Result<usize> {
    let size = (base as f64).powi(n as i32);
    if size > budget as f64 {
        return Err(Error::BudgetExceeded {
            what: "sequence enumeration",
            required: size,
            budget: budget as f64,
        });
    }
    Ok(size as usize)
}

/// Applies `W` along every mode of a tensor over `X^n`, mapping it to `Z^n`.
fn apply_channel(mut tensor: Vec<f64>, w: &Channel, n: u32) -> Vec<f64> {
    let (nx, nz) = (w.inputs(), w.outputs());
    let n = n as usize;
    // Modes 0..k already map to Z, modes k.. still index X.
    for k in 0..n {
        let left = nz.pow(k as u32);
        let right = nx.pow((n - k - 1) as u32);
        let mut next = vec![0.0; left * nz * right];
        for l in 0..left {
            for x in 0..nx {
                let src = &tensor[(l * nx + x) * right..(l * nx + x + 1) * right];
                if src.iter().all(|&v| v == 0.0) {
                    continue;
                }
                for z in 0..nz {
                    let wz = w.get(x, z);
                    if wz == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(l * nz + z) * right..(l * nz + z + 1) * right];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += wz * s;
                    }
                }
            }
        }
        tensor = next;
    }
    tensor
}

/// `P_C(z^n) = (1/M) sum_i W^n(z^n | x_i^n)`.
pub fn output_law(cb: &Codebook, w: &Channel) -> Result<OutputLaw> {
    output_law_with_budget(cb, w, DEFAULT_LAW_BUDGET)
}

pub fn output_law_with_budget(cb: &Codebook, w: &Channel, budget: usize) -> Result<OutputLaw> {
    if cb.alphabet != w.inputs() {
        return Err(Error::AlphabetMismatch {
            expected: w.inputs(),
            found: cb.alphabet,
        });
    }
    let inputs = check_budget(w.inputs(), cb.n, budget)?;
    check_budget(w.outputs(), cb.n, budget)?;
    let mut hist = vec![0.0; inputs];
    let weight = 1.0 / cb.len() as f64;
    for word in cb.codewords() {
        let idx = word.iter().fold(0, |acc, &x| acc * w.inputs() + x);
        hist[idx] += weight;
    }
    Ok(OutputLaw {
        n: cb.n,
        alphabet: w.outputs(),
        masses: apply_channel(hist, w, cb.n),
    })
}

/// The ensemble-average output law `P-bar` over `Z^n`.
pub fn reference_law(ensemble: &Ensemble, n: u32, w: &Channel) -> Result<OutputLaw> {
    reference_law_with_budget(ensemble, n, w, DEFAULT_LAW_BUDGET)
}

pub fn reference_law_with_budget(ensemble: &Ensemble, n: u32, w: &Channel, budget: usize) -> Result<OutputLaw> {
    let p = ensemble.input_distribution();
    w.check_input(&p)?;
    let size = check_budget(w.outputs(), n, budget)?;
    let nz = w.outputs();
    let pz = output_marginal_of(p.masses(), w.entries(), nz);
    let mut law = OutputLaw {
        n,
        alphabet: nz,
        masses: vec![0.0; size],
    };
    match ensemble {
        Ensemble::Iid(_) => {
            for i in 0..size {
                law.masses[i] = law.sequence_of(i).iter().map(|&z| pz[z]).product();
            }
        }
        Ensemble::ConstantComposition(pn) => {
            if pn.n() != n {
                return Err(Error::InvalidType(format!(
                    "composition has n = {}, expected {n}",
                    pn.n()
                )));
            }
            let mut cache: HashMap<Vec<u32>, f64> = HashMap::new();
            for i in 0..size {
                let mut counts = vec![0u32; nz];
                for z in law.sequence_of(i) {
                    counts[z] += 1;
                }
                let value = match cache.get(&counts) {
                    Some(&v) => v,
                    None => {
                        let t = NType::new(counts.clone())?;
                        let v = log_reference_per_sequence(ensemble, w, &t, &pz, DEFAULT_ENUM_CAP)?.exp();
                        cache.insert(counts, v);
                        v
                    }
                };
                law.masses[i] = value;
            }
        }
    }
    Ok(law)
}

/// `D(P || Q)` over `Z^n`, skipping `P = 0`; `+inf` on a support violation.
pub fn law_divergence(p: &OutputLaw, q: &OutputLaw) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.masses.iter().zip(&q.masses) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).ln();
        }
    }
    acc.max(0.0)
}

/// Indices where `p` has mass and `q` has none.
pub fn support_violations(p: &OutputLaw, q: &OutputLaw) -> Vec<usize> {
    p.masses
        .iter()
        .zip(&q.masses)
        .enumerate()
        .filter(|(_, (&a, &b))| a > 0.0 && b <= 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// `D(P_C || P-bar)` for the codebook's own output law.
pub fn divergence_to_reference(cb: &Codebook, w: &Channel, ensemble: &Ensemble) -> Result<f64> {
    let reference = reference_law(ensemble, cb.n, w)?;
    Ok(law_divergence(&output_law(cb, w)?, &reference))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leakage {
    /// `I(S; Z^n)` for a uniform secret `S` selecting the bin.
    pub leak: f64,
    /// `(1/M_s) sum_s D(P_{C^s} || P-bar)`.
    pub cond_div: f64,
    /// `D(P_C || P-bar)`.
    pub uncond_div: f64,
}

impl Leakage {
    /// `|leak - (cond_div - uncond_div)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.leak - (self.cond_div - self.uncond_div)).abs()
    }
}

/// Leakage of a binned codebook. `leak` is computed as
/// `H(P_C) - (1/M_s) sum_s H(P_{C^s})`, independently of the divergences.
pub fn wiretap_leakage(cb: &Codebook, w: &Channel, ensemble: &Ensemble) -> Result<Leakage> {
    let reference = reference_law(ensemble, cb.n, w)?;
    wiretap_leakage_with_reference(cb, w, &reference)
}

pub fn wiretap_leakage_with_reference(cb: &Codebook, w: &Channel, reference: &OutputLaw) -> Result<Leakage> {
    let count = cb.bins.ok_or(Error::MissingBins)?;
    let whole = output_law(cb, w)?;
    let mut cond_div = 0.0;
    let mut cond_entropy = 0.0;
    for s in 0..count {
        let law = output_law(&cb.bin(s)?, w)?;
        cond_div += law_divergence(&law, reference);
        cond_entropy += entropy_of(&law.masses);
    }
    let ms = count as f64;
    Ok(Leakage {
        leak: entropy_of(&whole.masses) - cond_entropy / ms,
        cond_div: cond_div / ms,
        uncond_div: law_divergence(&whole, reference),
    })
}

/// `M = max(1, floor(e^{nR}))`.
pub fn codebook_size(n: u32, rate: f64) -> Result<u64> {
    let log_m = log_codebook_size(n, rate);
    if log_m > (MAX_CODEWORDS as f64).ln() {
        return Err(Error::BudgetExceeded {
            what: "codebook size",
            required: log_m.exp(),
            budget: MAX_CODEWORDS as f64,
        });
    }
    Ok(log_m.exp().round() as u64)
}

/// Averages over the trials at one blocklength.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub n: u32,
    pub codewords: u64,
    pub trials: usize,
    /// Mean of `D(P_C || P-bar)`; with bins, of the per-bin average.
    pub mean_d: f64,
    pub stderr_d: f64,
    /// Present when the codebooks were binned.
    pub mean_leak: Option<f64>,
    pub max_identity_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub kind: EnsembleKind,
    pub input: Distribution,
    pub channel: Channel,
    pub rate: f64,
    pub trials: usize,
    pub seed: u64,
    /// Number of bins; each bin holds `M = max(1, floor(e^{nR}))` codewords.
    pub bins: Option<usize>,
    pub budget: usize,
}

/// Runs `trials` codebooks at blocklength `n`. `position` is the index of
/// `n` in the blocklength list and enters the seed counter.
pub fn simulate_point(spec: &SimulationSpec, n: u32, position: usize) -> Result<PointStats> {
    if spec.trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0 });
    }
    let ensemble = spec.kind.at(&spec.input, n)?;
    let reference = reference_law_with_budget(&ensemble, n, &spec.channel, spec.budget)?;
    let m = codebook_size(n, spec.rate)?;
    let total = m * spec.bins.unwrap_or(1) as u64;
    let mut values = Vec::with_capacity(spec.trials);
    let mut leak_sum = 0.0;
    let mut worst_residual: f64 = 0.0;
    for t in 0..spec.trials {
        let counter = (position * spec.trials + t) as u64;
        let seed = trial_seed(spec.seed, counter);
        let cb = sample_codebook(&ensemble, n, total, seed)?;
        let d = match spec.bins {
            None => law_divergence(&output_law_with_budget(&cb, &spec.channel, spec.budget)?, &reference),
            Some(count) => {
                let cb = cb.clone().with_bins(count)?;
                let leak = wiretap_leakage_with_reference(&cb, &spec.channel, &reference)?;
                leak_sum += leak.leak;
                worst_residual = worst_residual.max(leak.identity_residual());
                leak.cond_div
            }
        };
        if !d.is_finite() {
            let law = output_law_with_budget(&cb, &spec.channel, spec.budget)?;
            let bad = support_violations(&law, &reference);
            return Err(Error::Numerical(format!(
                "infinite divergence at n = {n}, trial {t}, seed {seed}: output sequences {:?} lie outside the reference support",
                &bad[..bad.len().min(8)]
            )));
        }
        values.push(d);
    }
    let trials = values.len() as f64;
    let mean = values.iter().sum::<f64>() / trials;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1.0)
    } else {
        0.0
    };
    Ok(PointStats {
        n,
        codewords: m,
        trials: values.len(),
        mean_d: mean,
        stderr_d: (var / trials).sqrt(),
        mean_leak: spec.bins.map(|_| leak_sum / trials),
        max_identity_residual: spec.bins.map(|_| worst_residual),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub points: Vec<PointStats>,
    /// Least-squares slope of `-ln(mean D)` against `n`, nats per use.
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Set when `residual_rms > 0.05 |slope| mean(n)`.
    pub low_confidence: bool,
}

impl ExponentFit {
    pub fn confidence(&self) -> &'static str {
        if self.low_confidence {
            "low"
        } else {
            "ok"
        }
    }
}

/// Least-squares line through `(n, -ln mean D)`.
pub fn fit_points(points: Vec<PointStats>) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::OutOfRange {
            name: "number of blocklengths",
            value: points.len() as f64,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| f64::from(p.n)).collect();
    let ys: Vec<f64> = points.iter().map(|p| -p.mean_d.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    let low_confidence = !(residual_rms <= 0.05 * slope.abs() * mx);
    Ok(ExponentFit {
        points,
        slope,
        intercept,
        residual_rms,
        low_confidence,
    })
}

/// Mean divergence per blocklength and the fitted decay rate.
pub fn empirical_exponent(spec: &SimulationSpec, n_list: &[u32]) -> Result<ExponentFit> {
    if n_list.len() < 3 {
        return Err(Error::OutOfRange {
            name: "number of blocklengths",
            value: n_list.len() as f64,
        });
    }
    if n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidType("blocklengths must be strictly ascending".into()));
    }
    let points = n_list
        .iter()
        .enumerate()
        .map(|(k, &n)| simulate_point(spec, n, k))
        .collect::<Result<Vec<_>>>()?;
    fit_points(points)
}

/// Sample statistics of `P_C(z^n)` at one probe sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub index: usize,
    pub mean: f64,
    pub std: f64,
    pub reference: f64,
}

impl Probe {
    /// True when `|mean - reference| <= 4 std / sqrt(trials)`, up to rounding
    /// (a probe can be constant over the ensemble, making `std` vanish).
    pub fn within(&self, trials: usize) -> bool {
        let rounding = 1e-12 * self.reference.abs();
        (self.mean - self.reference).abs() <= 4.0 * self.std / (trials as f64).sqrt() + rounding
    }
}

/// Estimates `E[P_C(z^n)]` at the given sequence indices over independent
/// codebooks; each should match `P-bar(z^n)`.
pub fn unbiasedness_probe(spec: &SimulationSpec, n: u32, probes: &[usize]) -> Result<Vec<Probe>> {
    let ensemble = spec.kind.at(&spec.input, n)?;
    let reference = reference_law_with_budget(&ensemble, n, &spec.channel, spec.budget)?;
    let m = codebook_size(n, spec.rate)?;
    let mut samples = vec![Vec::with_capacity(spec.trials); probes.len()];
    for t in 0..spec.trials {
        let cb = sample_codebook(&ensemble, n, m, trial_seed(spec.seed, t as u64))?;
        let law = output_law_with_budget(&cb, &spec.channel, spec.budget)?;
        for (s, &i) in samples.iter_mut().zip(probes) {
            s.push(law.masses[i]);
        }
    }
    Ok(probes
        .iter()
        .zip(&samples)
        .map(|(&index, s)| {
            let k = s.len() as f64;
            let mean = s.iter().sum::<f64>() / k;
            let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            Probe {
                index,
                mean,
                std: var.sqrt(),
                reference: reference.masses[index],
            }
        })
        .collect())
}
