//! Distributions, stochastic matrices and the information measures built on
//! them.
//!
//! Every quantity is in nats. `0 ln 0` is taken as `0`, and divergences of
//! pairs that are not absolutely continuous evaluate to `f64::INFINITY`
//! rather than failing, because such pairs show up as ordinary candidates
//! inside the outer minimizations.

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const PROB_TOL: f64 = 1e-12;

fn validate_masses(masses: &[f64]) -> Result<()> {
    if masses.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (index, &value) in masses.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidMass { index, value });
        }
    }
    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

fn expect_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { expected, found })
    }
}

/// `p ln(p / q)` with the conventions `0 ln(0/q) = 0` and `p ln(p/0) = +inf`.
#[inline]
pub(crate) fn xlogx_over(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// A probability mass function on `{0, .., k-1}`.
///
/// Inputs must already be normalized; nothing is silently renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    masses: Vec<f64>,
}

impl Distribution {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        validate_masses(&masses)?;
        Ok(Self { masses })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self {
            masses: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, symbol: usize) -> Result<Self> {
        if symbol >= size {
            return Err(Error::AlphabetMismatch {
                expected: size,
                found: symbol + 1,
            });
        }
        let mut masses = vec![0.0; size];
        masses[symbol] = 1.0;
        Ok(Self { masses })
    }

    /// Bernoulli-style binary distribution `(p0, 1 - p0)`.
    pub fn binary(p0: f64) -> Result<Self> {
        Self::new(vec![p0, 1.0 - p0])
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        expect_len(self.len(), other.len())?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
            });
        }
        let masses = self
            .masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Self::new(masses)
    }

    /// Largest coordinate-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Row-stochastic matrix; row `x` is the conditional law `W(.|x)`.
///
/// Construction checks every row. Output reachability (each output symbol
/// has a positive entry in some row) is a property of channels used as
/// the reference `W` and is checked separately by
/// [`Channel::check_outputs_reachable`], since test channels `V` visited by
/// the minimizations routinely violate it.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    entries: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let outputs = rows[0].len();
        let mut entries = Vec::with_capacity(inputs * outputs);
        for row in rows {
            expect_len(outputs, row.len())?;
            entries.extend(row);
        }
        Self::from_flat(inputs, outputs, entries)
    }

    /// Builds a channel from a row-major buffer of `inputs * outputs` entries.
    pub fn from_flat(inputs: usize, outputs: usize, entries: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::EmptyAlphabet);
        }
        expect_len(inputs * outputs, entries.len())?;
        for row in entries.chunks(outputs) {
            validate_masses(row)?;
        }
        Ok(Self {
            inputs,
            outputs,
            entries,
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut entries = vec![0.0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1.0;
        }
        Ok(Self {
            inputs: size,
            outputs: size,
            entries,
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel; outputs are ordered `0, erasure, 1`.
    pub fn bec(erasure: f64) -> Result<Self> {
        Self::new(vec![
            vec![1.0 - erasure, erasure, 0.0],
            vec![0.0, erasure, 1.0 - erasure],
        ])
    }

    /// Z-channel: input 0 is noiseless, input 1 flips to 0 with probability `p`.
    pub fn z_channel(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0, 0.0], vec![p, 1.0 - p]])
    }

    /// Binary asymmetric channel with `W(1|0) = p01` and `W(0|1) = p10`.
    pub fn bac(p01: f64, p10: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p01, p01], vec![p10, 1.0 - p10]])
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.outputs)
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.entries[x * self.outputs + z]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn check_outputs_reachable(&self) -> Result<()> {
        for z in 0..self.outputs {
            if (0..self.inputs).all(|x| self.get(x, z) <= 0.0) {
                return Err(Error::UnreachableOutput { symbol: z });
            }
        }
        Ok(())
    }

    pub(crate) fn check_input(&self, p: &Distribution) -> Result<()> {
        expect_len(self.inputs, p.len())
    }

    pub(crate) fn check_same_shape(&self, other: &Channel) -> Result<()> {
        expect_len(self.inputs, other.inputs)?;
        expect_len(self.outputs, other.outputs)
    }
}

/// Probability mass function on the product alphabet `X x Z`, stored
/// row-major with `x` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    nx: usize,
    nz: usize,
    masses: Vec<f64>,
}

impl JointDistribution {
    pub fn new(nx: usize, nz: usize, masses: Vec<f64>) -> Result<Self> {
        if nx == 0 || nz == 0 {
            return Err(Error::EmptyAlphabet);
        }
        expect_len(nx * nz, masses.len())?;
        validate_masses(&masses)?;
        Ok(Self { nx, nz, masses })
    }

    /// The joint law `P x V`, i.e. `(x, z) -> P(x) V(z|x)`.
    pub fn product(p: &Distribution, v: &Channel) -> Result<Self> {
        v.check_input(p)?;
        let masses = (0..v.inputs())
            .flat_map(|x| v.row(x).iter().map(move |w| p.masses()[x] * w))
            .collect();
        Ok(Self {
            nx: v.inputs(),
            nz: v.outputs(),
            masses,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.masses[x * self.nz + z]
    }

    pub fn marginal_x(&self) -> Distribution {
        Distribution {
            masses: self.masses.chunks(self.nz).map(|r| r.iter().sum()).collect(),
        }
    }

    pub fn marginal_z(&self) -> Distribution {
        let mut masses = vec![0.0; self.nz];
        for row in self.masses.chunks(self.nz) {
            for (acc, q) in masses.iter_mut().zip(row) {
                *acc += q;
            }
        }
        Distribution { masses }
    }

    /// The conditional law `Q(z|x)`. Rows with `Q_X(x) = 0` are taken from
    /// `fallback`.
    pub fn conditional(&self, fallback: &Channel) -> Result<Channel> {
        expect_len(self.nx, fallback.inputs())?;
        expect_len(self.nz, fallback.outputs())?;
        let mut entries = Vec::with_capacity(self.masses.len());
        for (x, row) in self.masses.chunks(self.nz).enumerate() {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                entries.extend(row.iter().map(|q| q / total));
            } else {
                entries.extend_from_slice(fallback.row(x));
            }
        }
        Ok(Channel {
            inputs: self.nx,
            outputs: self.nz,
            entries,
        })
    }

    /// l1 distance between two joint laws on the same alphabet.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Shannon entropy `H(P)`.
pub fn entropy(p: &Distribution) -> f64 {
    entropy_of(p.masses())
}

pub(crate) fn entropy_of(masses: &[f64]) -> f64 {
    -masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * m.ln())
        .sum::<f64>()
}

/// Relative entropy `D(P || Q)`; `+inf` when `P` is not absolutely
/// continuous with respect to `Q`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    expect_len(p.len(), q.len())?;
    Ok(divergence_of(p.masses(), q.masses()))
}

pub(crate) fn divergence_of(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        acc += xlogx_over(a, b);
        if acc == f64::INFINITY {
            return acc;
        }
    }
    acc.max(0.0)
}

/// Conditional divergence `D(V || W | P) = sum_x P(x) D(V(.|x) || W(.|x))`.
pub fn conditional_divergence(v: &Channel, w: &Channel, p: &Distribution) -> Result<f64> {
    v.check_same_shape(w)?;
    v.check_input(p)?;
    Ok(conditional_divergence_of(v.entries(), w.entries(), p.masses(), v.outputs()))
}

pub(crate) fn conditional_divergence_of(v: &[f64], w: &[f64], p: &[f64], nz: usize) -> f64 {
    let mut acc = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px <= 0.0 {
            continue;
        }
        let d = divergence_of(&v[x * nz..(x + 1) * nz], &w[x * nz..(x + 1) * nz]);
        if d == f64::INFINITY {
            return d;
        }
        acc += px * d;
    }
    acc
}

/// The output law `P o V`.
pub fn output_marginal(p: &Distribution, v: &Channel) -> Result<Distribution> {
    v.check_input(p)?;
    Ok(Distribution {
        masses: output_marginal_of(p.masses(), v.entries(), v.outputs()),
    })
}

pub(crate) fn output_marginal_of(p: &[f64], v: &[f64], nz: usize) -> Vec<f64> {
    let mut out = vec![0.0; nz];
    for (x, &px) in p.iter().enumerate() {
        if px <= 0.0 {
            continue;
        }
        for (acc, vz) in out.iter_mut().zip(&v[x * nz..(x + 1) * nz]) {
            *acc += px * vz;
        }
    }
    out
}

/// Mutual information `I(P, V)` developed across `V` by the input law `P`.
pub fn mutual_information(p: &Distribution, v: &Channel) -> Result<f64> {
    v.check_input(p)?;
    let pz = output_marginal_of(p.masses(), v.entries(), v.outputs());
    let mut acc = 0.0;
    for (x, &px) in p.masses().iter().enumerate() {
        if px > 0.0 {
            acc += px * divergence_of(v.row(x), &pz);
        }
    }
    Ok(acc.max(0.0))
}

/// `omega(V || W | P) = sum P(x) V(z|x) ln W(z|x)`, which is `-inf` as soon as
/// `V` puts mass (under `P`) where `W` vanishes.
pub fn omega(v: &Channel, w: &Channel, p: &Distribution) -> Result<f64> {
    v.check_same_shape(w)?;
    v.check_input(p)?;
    Ok(omega_of(v.entries(), w.entries(), p.masses(), v.outputs()))
}

pub(crate) fn omega_of(v: &[f64], w: &[f64], p: &[f64], nz: usize) -> f64 {
    let mut acc = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px <= 0.0 {
            continue;
        }
        for z in 0..nz {
            let mass = px * v[x * nz + z];
            if mass > 0.0 {
                let wz = w[x * nz + z];
                if wz <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                acc += mass * wz.ln();
            }
        }
    }
    acc
}

/// `f(Q || Q') = sum Q(x,z) ln[Q'(x,z) / (Q'_X(x) Q'_Z(z))]`.
///
/// Cells with `Q > 0` and `Q' = 0` drive the value to `-inf`.
pub fn f_tilt(q: &JointDistribution, qp: &JointDistribution) -> Result<f64> {
    expect_len(qp.nx, q.nx)?;
    expect_len(qp.nz, q.nz)?;
    let qx = qp.marginal_x();
    let qz = qp.marginal_z();
    let mut acc = 0.0;
    for x in 0..q.nx {
        for z in 0..q.nz {
            let mass = q.get(x, z);
            if mass <= 0.0 {
                continue;
            }
            let ref_mass = qp.get(x, z);
            if ref_mass <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            acc += mass * (ref_mass / (qx.masses[x] * qz.masses[z])).ln();
        }
    }
    Ok(acc)
}

/// Composes an auxiliary channel `P_{X|U}` in front of `W`, giving the
/// effective channel `U -> Z` with rows `sum_x P(x|u) W(.|x)`.
pub fn compose_prefix(prefix: &Channel, w: &Channel) -> Result<Channel> {
    expect_len(w.inputs(), prefix.outputs())?;
    let nz = w.outputs();
    let mut entries = Vec::with_capacity(prefix.inputs() * nz);
    for u in 0..prefix.inputs() {
        let mut row = vec![0.0; nz];
        for (x, &pxu) in prefix.row(u).iter().enumerate() {
            if pxu == 0.0 {
                continue;
            }
            for (acc, wz) in row.iter_mut().zip(w.row(x)) {
                *acc += pxu * wz;
            }
        }
        entries.extend(row);
    }
    Channel::from_flat(prefix.inputs(), nz, entries)
}
