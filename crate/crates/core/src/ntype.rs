//! Method-of-types machinery: n-types, joint n-types, type-class sizes and
//! the probability that a single random codeword lands in a given joint
//! type with a fixed output sequence.
//!
//! Enumerations are streaming iterators in a fixed order (descending
//! lexicographic on the row-major count vector). Nothing downstream may rely
//! on random access into them.

use crate::error::{Error, Result};
use crate::prob::{Distribution, JointDistribution};

/// Default cap on the number of types an enumeration may produce.
pub const DEFAULT_ENUM_CAP: u64 = 100_000_000;

/// Counts over an alphabet that sum to the blocklength.
pub trait TypeCounts {
    fn counts(&self) -> &[u32];
    fn n(&self) -> u32;
}

/// Empirical distribution with denominator `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NType {
    counts: Vec<u32>,
    n: u32,
}

impl NType {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let n: u32 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidType("an n-type needs n >= 1".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn frequency(&self, symbol: usize) -> f64 {
        f64::from(self.counts[symbol]) / f64::from(self.n)
    }

    pub fn to_distribution(&self) -> Distribution {
        Distribution::new((0..self.len()).map(|i| self.frequency(i)).collect())
            .expect("counts over n always normalize")
    }
}

impl TypeCounts for NType {
    fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn n(&self) -> u32 {
        self.n
    }
}

/// Joint n-type on `X x Z`, row-major with `x` as the slow index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointNType {
    nx: usize,
    nz: usize,
    counts: Vec<u32>,
    n: u32,
}

impl JointNType {
    pub fn new(nx: usize, nz: usize, counts: Vec<u32>) -> Result<Self> {
        if nx == 0 || nz == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if counts.len() != nx * nz {
            return Err(Error::AlphabetMismatch {
                expected: nx * nz,
                found: counts.len(),
            });
        }
        let n: u32 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidType("a joint n-type needs n >= 1".into()));
        }
        Ok(Self { nx, nz, counts, n })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> u32 {
        self.counts[x * self.nz + z]
    }

    pub fn marginal_x(&self) -> NType {
        NType {
            counts: self.counts.chunks(self.nz).map(|r| r.iter().sum()).collect(),
            n: self.n,
        }
    }

    pub fn marginal_z(&self) -> NType {
        let mut counts = vec![0u32; self.nz];
        for row in self.counts.chunks(self.nz) {
            for (acc, c) in counts.iter_mut().zip(row) {
                *acc += c;
            }
        }
        NType { counts, n: self.n }
    }

    pub fn to_distribution(&self) -> JointDistribution {
        let n = f64::from(self.n);
        JointDistribution::new(
            self.nx,
            self.nz,
            self.counts.iter().map(|&c| f64::from(c) / n).collect(),
        )
        .expect("counts over n always normalize")
    }
}

impl TypeCounts for JointNType {
    fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn n(&self) -> u32 {
        self.n
    }
}

/// Code sampling distribution of a random-coding ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    /// Codeword symbols drawn i.i.d. from the distribution.
    Iid(Distribution),
    /// Codewords drawn uniformly from the type class of the n-type.
    ConstantComposition(NType),
}

impl Ensemble {
    pub fn label(&self) -> &'static str {
        match self {
            Ensemble::Iid(_) => "iid",
            Ensemble::ConstantComposition(_) => "cc",
        }
    }

    pub fn input_size(&self) -> usize {
        match self {
            Ensemble::Iid(p) => p.len(),
            Ensemble::ConstantComposition(t) => t.len(),
        }
    }

    /// The input law the ensemble induces per symbol (`P_n` as a
    /// distribution for constant composition).
    pub fn input_distribution(&self) -> Distribution {
        match self {
            Ensemble::Iid(p) => p.clone(),
            Ensemble::ConstantComposition(t) => t.to_distribution(),
        }
    }

    /// `ln P_{X^n}(T_{Q_X})`, the log-probability that a codeword has type `qx`.
    pub fn log_prob_type_class(&self, qx: &NType) -> f64 {
        match self {
            Ensemble::Iid(p) => {
                let mut acc = log_type_class_size(qx);
                for (&c, &px) in qx.counts().iter().zip(p.masses()) {
                    if c > 0 {
                        if px <= 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        acc += f64::from(c) * px.ln();
                    }
                }
                acc
            }
            Ensemble::ConstantComposition(pn) => {
                if qx == pn {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(f64::from(k) + 1.0)
    }
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of compositions of `n` into `k` ordered nonnegative parts.
pub fn composition_count(k: usize, n: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    binomial_f64(u64::from(n) + k as u64 - 1, k as u64 - 1)
}

fn check_cap(what: &'static str, count: f64, cap: u64) -> Result<()> {
    if count > cap as f64 {
        Err(Error::BudgetExceeded {
            what,
            required: count,
            budget: cap as f64,
        })
    } else {
        Ok(())
    }
}

/// `ln |T|` for a type or joint type: the log of the multinomial coefficient
/// `n! / prod c!`, evaluated through log-gamma.
pub fn log_type_class_size<T: TypeCounts + ?Sized>(t: &T) -> f64 {
    let mut acc = ln_factorial(t.n());
    for &c in t.counts() {
        acc -= ln_factorial(c);
    }
    acc.max(0.0)
}

/// Backtracking enumerator of nonnegative integer tables with optional row
/// and column sums. Cells are filled row-major, each from its largest
/// feasible value downward, so every partial assignment it visits extends
/// to a complete table.
#[derive(Debug, Clone)]
struct TableIter {
    rows: usize,
    cols: usize,
    n: u32,
    row_target: Option<Vec<u32>>,
    col_target: Option<Vec<u32>>,
    counts: Vec<u32>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    total_used: u32,
    started: bool,
    done: bool,
}

impl TableIter {
    fn new(
        rows: usize,
        cols: usize,
        n: u32,
        row_target: Option<Vec<u32>>,
        col_target: Option<Vec<u32>>,
    ) -> Self {
        let feasible = row_target.as_ref().map_or(true, |t| t.iter().sum::<u32>() == n)
            && col_target.as_ref().map_or(true, |t| t.iter().sum::<u32>() == n);
        Self {
            rows,
            cols,
            n,
            row_target,
            col_target,
            counts: vec![0; rows * cols],
            row_used: vec![0; rows],
            col_used: vec![0; cols],
            total_used: 0,
            started: false,
            done: !feasible,
        }
    }

    fn bounds(&self, cell: usize) -> (u32, u32) {
        let (r, c) = (cell / self.cols, cell % self.cols);
        let total_rem = self.n - self.total_used;
        let row_rem = self.row_target.as_ref().map(|t| t[r] - self.row_used[r]);
        let col_rem = self.col_target.as_ref().map(|t| t[c] - self.col_used[c]);
        let hi = total_rem
            .min(row_rem.unwrap_or(u32::MAX))
            .min(col_rem.unwrap_or(u32::MAX));
        let lo = match (row_rem, &self.col_target) {
            (None, None) => {
                if cell + 1 == self.rows * self.cols {
                    total_rem
                } else {
                    0
                }
            }
            (Some(rr), None) => {
                if c + 1 == self.cols {
                    rr
                } else {
                    0
                }
            }
            (None, Some(_)) => {
                if r + 1 == self.rows {
                    col_rem.unwrap_or(0)
                } else {
                    0
                }
            }
            (Some(rr), Some(ct)) => {
                let later: u32 = (c + 1..self.cols).map(|k| ct[k] - self.col_used[k]).sum();
                rr.saturating_sub(later)
            }
        };
        (lo, hi)
    }

    fn assign(&mut self, cell: usize, v: u32) {
        let (r, c) = (cell / self.cols, cell % self.cols);
        self.counts[cell] = v;
        self.row_used[r] += v;
        self.col_used[c] += v;
        self.total_used += v;
    }

    fn unassign(&mut self, cell: usize) -> u32 {
        let (r, c) = (cell / self.cols, cell % self.cols);
        let v = self.counts[cell];
        self.counts[cell] = 0;
        self.row_used[r] -= v;
        self.col_used[c] -= v;
        self.total_used -= v;
        v
    }

    fn fill_from(&mut self, start: usize) -> bool {
        for cell in start..self.rows * self.cols {
            let (lo, hi) = self.bounds(cell);
            if lo > hi {
                return false;
            }
            self.assign(cell, hi);
        }
        true
    }

    fn advance(&mut self) -> bool {
        for cell in (0..self.rows * self.cols).rev() {
            let v = self.unassign(cell);
            let (lo, _) = self.bounds(cell);
            if v > lo {
                self.assign(cell, v - 1);
                if self.fill_from(cell + 1) {
                    return true;
                }
                // Unreachable for consistent bounds; bail out rather than loop.
                return false;
            }
        }
        false
    }
}

impl Iterator for TableIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let ok = if self.started {
            self.advance()
        } else {
            self.started = true;
            self.fill_from(0)
        };
        if ok {
            Some(self.counts.clone())
        } else {
            self.done = true;
            None
        }
    }
}

/// Streaming iterator over n-types on an alphabet.
#[derive(Debug, Clone)]
pub struct NTypeIter {
    inner: TableIter,
}

impl Iterator for NTypeIter {
    type Item = NType;

    fn next(&mut self) -> Option<NType> {
        let n = self.inner.n;
        self.inner.next().map(|counts| NType { counts, n })
    }
}

/// All n-types on an alphabet of `alphabet_size` symbols, in descending
/// lexicographic order, e.g. `(2,0), (1,1), (0,2)`.
pub fn enumerate_ntypes(alphabet_size: usize, n: u32) -> Result<NTypeIter> {
    enumerate_ntypes_capped(alphabet_size, n, DEFAULT_ENUM_CAP)
}

pub fn enumerate_ntypes_capped(alphabet_size: usize, n: u32, cap: u64) -> Result<NTypeIter> {
    if alphabet_size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    check_cap("n-type enumeration", composition_count(alphabet_size, n), cap)?;
    Ok(NTypeIter {
        inner: TableIter::new(1, alphabet_size, n, Some(vec![n]), None),
    })
}

/// Streaming iterator over joint n-types with optional fixed marginals.
#[derive(Debug, Clone)]
pub struct JointNTypeIter {
    nx: usize,
    nz: usize,
    infeasible: bool,
    inner: TableIter,
}

impl JointNTypeIter {
    /// True when the requested marginals cannot both hold (their totals
    /// differ); the iterator is then empty.
    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }
}

impl Iterator for JointNTypeIter {
    type Item = JointNType;

    fn next(&mut self) -> Option<JointNType> {
        let (nx, nz, n) = (self.nx, self.nz, self.inner.n);
        self.inner
            .next()
            .map(|counts| JointNType { nx, nz, counts, n })
    }
}

/// Upper bound on the number of joint types the constraints admit.
pub fn joint_type_count_bound(
    nx: usize,
    nz: usize,
    n: u32,
    fixed_x: Option<&NType>,
    fixed_z: Option<&NType>,
) -> f64 {
    let by_rows = fixed_x.map(|t| {
        t.counts()
            .iter()
            .map(|&c| composition_count(nz, c))
            .product::<f64>()
    });
    let by_cols = fixed_z.map(|t| {
        t.counts()
            .iter()
            .map(|&c| composition_count(nx, c))
            .product::<f64>()
    });
    match (by_rows, by_cols) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => composition_count(nx * nz, n),
    }
}

/// All joint n-types on `X x Z` whose marginals match the given ones.
pub fn enumerate_joint_ntypes(
    nx: usize,
    nz: usize,
    n: u32,
    fixed_x: Option<&NType>,
    fixed_z: Option<&NType>,
) -> Result<JointNTypeIter> {
    enumerate_joint_ntypes_capped(nx, nz, n, fixed_x, fixed_z, DEFAULT_ENUM_CAP)
}

pub fn enumerate_joint_ntypes_capped(
    nx: usize,
    nz: usize,
    n: u32,
    fixed_x: Option<&NType>,
    fixed_z: Option<&NType>,
    cap: u64,
) -> Result<JointNTypeIter> {
    if nx == 0 || nz == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    for (t, size) in [(fixed_x, nx), (fixed_z, nz)] {
        if let Some(t) = t {
            if t.len() != size {
                return Err(Error::AlphabetMismatch {
                    expected: size,
                    found: t.len(),
                });
            }
        }
    }
    let infeasible = fixed_x.map_or(false, |t| t.n() != n) || fixed_z.map_or(false, |t| t.n() != n);
    if !infeasible {
        check_cap(
            "joint n-type enumeration",
            joint_type_count_bound(nx, nz, n, fixed_x, fixed_z),
            cap,
        )?;
    }
    let inner = TableIter::new(
        nx,
        nz,
        n,
        fixed_x.map(|t| t.counts().to_vec()),
        fixed_z.map(|t| t.counts().to_vec()),
    );
    Ok(JointNTypeIter {
        nx,
        nz,
        infeasible: infeasible || inner.done,
        inner,
    })
}

/// `ln p_Q`: log-probability that one codeword drawn from the ensemble has
/// joint type `Q` with a fixed output sequence of type `Q_Z`.
pub fn log_success_probability(q: &JointNType, ensemble: &Ensemble) -> f64 {
    let qx = q.marginal_x();
    let qz = q.marginal_z();
    let log_px = ensemble.log_prob_type_class(&qx);
    if log_px == f64::NEG_INFINITY {
        return log_px;
    }
    log_type_class_size(q) - log_type_class_size(&qz) - log_type_class_size(&qx) + log_px
}

/// `p_Q = |T_Q| / (|T_{Q_Z}| |T_{Q_X}|) * P_{X^n}(T_{Q_X})`, clamped to `[0, 1]`.
pub fn success_probability(q: &JointNType, ensemble: &Ensemble) -> f64 {
    log_success_probability(q, ensemble).exp().min(1.0)
}

/// Support-preserving largest-remainder rounding of `n P` to an n-type.
///
/// Every symbol in the support of `P` receives at least one count, so `n`
/// must be at least the support size.
pub fn quantize_to_ntype(p: &Distribution, n: u32) -> Result<NType> {
    let support: Vec<usize> = p.support().collect();
    if (n as usize) < support.len() || n == 0 {
        return Err(Error::SupportNotPreservable {
            support: support.len(),
            n,
        });
    }
    let target: Vec<f64> = p.masses().iter().map(|&m| m * f64::from(n)).collect();
    let mut counts = vec![0u32; p.len()];
    for &i in &support {
        counts[i] = (target[i].floor() as u32).max(1);
    }
    let remainder = |counts: &[u32], i: usize| target[i] - f64::from(counts[i]);
    let mut total: u32 = counts.iter().sum();
    while total < n {
        let best = support
            .iter()
            .copied()
            .max_by(|&a, &b| {
                remainder(&counts, a)
                    .total_cmp(&remainder(&counts, b))
                    .then(b.cmp(&a))
            })
            .expect("support is nonempty");
        counts[best] += 1;
        total += 1;
    }
    while total > n {
        let worst = support
            .iter()
            .copied()
            .filter(|&i| counts[i] > 1)
            .min_by(|&a, &b| {
                remainder(&counts, a)
                    .total_cmp(&remainder(&counts, b))
                    .then(a.cmp(&b))
            })
            .expect("total > n >= |support| leaves a count above one");
        counts[worst] -= 1;
        total -= 1;
    }
    NType::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nt(c: &[u32]) -> NType {
        NType::new(c.to_vec()).unwrap()
    }

    #[test]
    fn small_ntype_enumerations() {
        let all: Vec<_> = enumerate_ntypes(2, 2).unwrap().map(|t| t.counts).collect();
        assert_eq!(all, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_ntypes(2, 4).unwrap().count(), 5);
        assert_eq!(enumerate_ntypes(4, 6).unwrap().count(), 84);
        assert_eq!(enumerate_ntypes(1, 7).unwrap().count(), 1);
    }

    #[test]
    fn ntype_cap_is_enforced() {
        assert!(matches!(
            enumerate_ntypes_capped(4, 20, 100),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(enumerate_ntypes(0, 3).is_err());
    }

    #[test]
    fn joint_enumeration_with_unit_margins() {
        let u = nt(&[1, 1]);
        let all: Vec<_> = enumerate_joint_ntypes(2, 2, 2, Some(&u), Some(&u))
            .unwrap()
            .map(|q| q.counts)
            .collect();
        assert_eq!(all, vec![vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
    }

    #[test]
    fn joint_enumeration_counts() {
        assert_eq!(enumerate_joint_ntypes(2, 2, 2, None, None).unwrap().count(), 10);
        let it = enumerate_joint_ntypes(2, 2, 2, Some(&nt(&[2, 0])), None).unwrap();
        let all: Vec<_> = it.collect();
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|q| q.get(1, 0) == 0 && q.get(1, 1) == 0));
    }

    #[test]
    fn infeasible_margins_yield_flagged_empty_stream() {
        let mut it =
            enumerate_joint_ntypes(2, 2, 3, Some(&nt(&[1, 2])), Some(&nt(&[1, 1]))).unwrap();
        assert!(it.is_infeasible());
        assert!(it.next().is_none());
    }

    #[test]
    fn type_class_sizes() {
        assert!((log_type_class_size(&nt(&[2, 2])) - 6f64.ln()).abs() < 1e-12);
        assert_eq!(log_type_class_size(&nt(&[0, 5, 0])), 0.0);
        assert!((log_type_class_size(&nt(&[3, 2, 1])) - 60f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn success_probability_examples() {
        let p = Distribution::binary(0.3).unwrap();
        let q = JointNType::new(2, 2, vec![0, 0, 1, 0]).unwrap();
        let pq = success_probability(&q, &Ensemble::Iid(p));
        assert!((pq - 0.7).abs() < 1e-12);

        let cc = Ensemble::ConstantComposition(nt(&[2, 2]));
        let off = JointNType::new(2, 2, vec![3, 0, 1, 0]).unwrap();
        assert_eq!(success_probability(&off, &cc), 0.0);
    }

    #[test]
    fn quantization_examples() {
        let exact = Distribution::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(quantize_to_ntype(&exact, 8).unwrap(), nt(&[2, 4, 2]));
        let p = Distribution::binary(0.3).unwrap();
        assert_eq!(quantize_to_ntype(&p, 10).unwrap(), nt(&[3, 7]));
        let p = Distribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(quantize_to_ntype(&p, 4).unwrap(), nt(&[1, 3]));
        let tiny = Distribution::new(vec![0.001, 0.999]).unwrap();
        assert_eq!(quantize_to_ntype(&tiny, 5).unwrap(), nt(&[1, 4]));
        let three = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            quantize_to_ntype(&three, 2),
            Err(Error::SupportNotPreservable { support: 3, n: 2 })
        ));
    }
}
