//! Finite-blocklength exponents and the type-sum surrogate for `E[D]`.
//!
//! Everything here is an exact finite enumeration over joint n-types, so it
//! serves as an oracle for the asymptotic solvers. Sums run in the log
//! domain.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::iid::{check_rate, is_zero_capacity};
use crate::ntype::{
    enumerate_joint_ntypes_capped, log_type_class_size, Ensemble, JointNType, NType, TypeCounts,
    DEFAULT_ENUM_CAP,
};
use crate::optim::LogSumExp;
use crate::prob::{entropy_of, output_marginal_of, Channel, Distribution};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteNExponent {
    pub n: u32,
    /// Nats; `+inf` when every joint type has infinite divergence.
    pub value: f64,
    pub minimizing_type: Option<JointNType>,
    pub ensemble: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateValue {
    pub n: u32,
    pub rate: f64,
    /// Natural log of the surrogate sum.
    pub log_value: f64,
    /// `(Q, ln term)` for every contributing joint type, in enumeration
    /// order, when requested.
    pub per_type_terms: Option<Vec<(JointNType, f64)>>,
}

/// `ln M` for `M = max(1, floor(e^{nR}))`.
pub fn log_codebook_size(n: u32, rate: f64) -> f64 {
    let x = f64::from(n) * rate;
    if x > 40.0 {
        // floor changes ln M by less than e^{-40}.
        x
    } else {
        x.exp().floor().max(1.0).ln()
    }
}

/// `sum_{x,z} c(x,z)/n ln(c(x,z) / (n a(x) W(z|x)))` with `a(x)` given by
/// `row_mass`; `+inf` if some count sits where `W` vanishes.
fn divergence_from(q: &JointNType, w: &Channel, row_mass: &[f64]) -> f64 {
    let n = f64::from(q.n());
    let nz = q.nz();
    let mut acc = 0.0;
    for (cell, &c) in q.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (x, z) = (cell / nz, cell % nz);
        let reference = row_mass[x] * w.get(x, z);
        if reference <= 0.0 {
            return f64::INFINITY;
        }
        let mass = f64::from(c) / n;
        acc += mass * (mass / reference).ln();
    }
    acc.max(0.0)
}

/// `n omega(Q) = sum c(x,z) ln W(z|x)`; `-inf` if some count sits where `W`
/// vanishes.
fn n_omega(q: &JointNType, w: &Channel) -> f64 {
    let nz = q.nz();
    let mut acc = 0.0;
    for (cell, &c) in q.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let wz = w.get(cell / nz, cell % nz);
        if wz <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += f64::from(c) * wz.ln();
    }
    acc
}

fn check_shapes(nx: usize, w: &Channel) -> Result<()> {
    if nx != w.inputs() {
        return Err(Error::AlphabetMismatch {
            expected: w.inputs(),
            found: nx,
        });
    }
    Ok(())
}

/// `min_Q { D(Q || P x W) + [R - f(Q || P x W)]^+ }` over joint n-types.
pub fn es_n_iid(p: &Distribution, w: &Channel, rate: f64, n: u32) -> Result<FiniteNExponent> {
    es_n_iid_capped(p, w, rate, n, DEFAULT_ENUM_CAP)
}

pub fn es_n_iid_capped(p: &Distribution, w: &Channel, rate: f64, n: u32, cap: u64) -> Result<FiniteNExponent> {
    w.check_input(p)?;
    check_rate(rate)?;
    let nz = w.outputs();
    let pz = output_marginal_of(p.masses(), w.entries(), nz);
    let mut best = (f64::INFINITY, None);
    for q in enumerate_joint_ntypes_capped(w.inputs(), nz, n, None, None, cap)? {
        let d = divergence_from(&q, w, p.masses());
        if !d.is_finite() {
            continue;
        }
        let nf = f64::from(n);
        let f: f64 = q
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(cell, &c)| f64::from(c) / nf * (w.get(cell / nz, cell % nz) / pz[cell % nz]).ln())
            .sum();
        let value = d + (rate - f).max(0.0);
        if value < best.0 {
            best = (value, Some(q));
        }
    }
    Ok(FiniteNExponent {
        n,
        value: best.0,
        minimizing_type: best.1,
        ensemble: "iid",
    })
}

/// Inner minimum of `g_n`: `min D(V' || W | P_n)` over joint n-types with
/// both marginals fixed.
fn inner_min(px: &NType, qz: &NType, w: &Channel, cap: u64) -> Result<f64> {
    let pn = px.to_distribution();
    let mut best = f64::INFINITY;
    for q in enumerate_joint_ntypes_capped(w.inputs(), w.outputs(), px.n(), Some(px), Some(qz), cap)? {
        best = best.min(divergence_from(&q, w, pn.masses()));
    }
    Ok(best)
}

fn g_n_cached(q: &JointNType, w: &Channel, cache: &mut HashMap<NType, f64>, cap: u64) -> Result<f64> {
    let omega = n_omega(q, w) / f64::from(q.n());
    if omega == f64::NEG_INFINITY {
        return Ok(omega);
    }
    let px = q.marginal_x();
    let qz = q.marginal_z();
    let inner = match cache.get(&qz) {
        Some(&v) => v,
        None => {
            let v = inner_min(&px, &qz, w, cap)?;
            cache.insert(qz.clone(), v);
            v
        }
    };
    Ok(omega + entropy_of(qz.to_distribution().masses()) + inner)
}

/// `g_n` evaluated at the joint type `P_n x V`.
pub fn g_n_of_type(q: &JointNType, w: &Channel) -> Result<f64> {
    check_shapes(q.nx(), w)?;
    if q.nz() != w.outputs() {
        return Err(Error::AlphabetMismatch {
            expected: w.outputs(),
            found: q.nz(),
        });
    }
    g_n_cached(q, w, &mut HashMap::new(), DEFAULT_ENUM_CAP)
}

/// `g_n(V || W | P_n)`; `P_n x V` must be a joint n-type.
pub fn g_n_func(v: &Channel, w: &Channel, pn: &NType) -> Result<f64> {
    v.check_same_shape(w)?;
    check_shapes(pn.len(), w)?;
    g_n_of_type(&joint_type_of(pn, v)?, w)
}

/// The joint n-type `P_n x V`, checking that every cell count is an integer.
pub fn joint_type_of(pn: &NType, v: &Channel) -> Result<JointNType> {
    check_shapes(pn.len(), v)?;
    let nz = v.outputs();
    let mut counts = Vec::with_capacity(pn.len() * nz);
    for (x, &c) in pn.counts().iter().enumerate() {
        for z in 0..nz {
            let exact = f64::from(c) * v.get(x, z);
            let rounded = exact.round();
            if (exact - rounded).abs() > 1e-9 * f64::from(pn.n()).max(1.0) {
                return Err(Error::InvalidType(format!(
                    "P_n x V is not an n-type: cell ({x},{z}) holds {exact}"
                )));
            }
            counts.push(rounded as u32);
        }
    }
    JointNType::new(pn.len(), nz, counts)
}

/// `min_V { D(V || W | P_n) + [R - g_n(V || W | P_n)]^+ }` over conditionals
/// with `P_n x V` a joint n-type.
pub fn es_n_cc(pn: &NType, w: &Channel, rate: f64, n: u32) -> Result<FiniteNExponent> {
    es_n_cc_capped(pn, w, rate, n, DEFAULT_ENUM_CAP)
}

pub fn es_n_cc_capped(pn: &NType, w: &Channel, rate: f64, n: u32, cap: u64) -> Result<FiniteNExponent> {
    check_shapes(pn.len(), w)?;
    check_rate(rate)?;
    if pn.n() != n {
        return Err(Error::InvalidType(format!(
            "composition has n = {}, expected {n}",
            pn.n()
        )));
    }
    let p = pn.to_distribution();
    let mut cache = HashMap::new();
    let mut best = (f64::INFINITY, None);
    for q in enumerate_joint_ntypes_capped(w.inputs(), w.outputs(), n, Some(pn), None, cap)? {
        let d = divergence_from(&q, w, p.masses());
        if !d.is_finite() {
            continue;
        }
        let g = g_n_cached(&q, w, &mut cache, cap)?;
        let value = d + (rate - g).max(0.0);
        if value < best.0 {
            best = (value, Some(q));
        }
    }
    Ok(FiniteNExponent {
        n,
        value: best.0,
        minimizing_type: best.1,
        ensemble: "cc",
    })
}

/// Natural log of `P-bar(T_{Q_Z}) / |T_{Q_Z}|`, the reference probability of
/// any single output sequence of type `Q_Z`.
pub(crate) fn log_reference_per_sequence(ensemble: &Ensemble, w: &Channel, qz: &NType, pz: &[f64], cap: u64) -> Result<f64> {
    match ensemble {
        Ensemble::Iid(_) => {
            let mut acc = 0.0;
            for (z, &c) in qz.counts().iter().enumerate() {
                if c > 0 {
                    if pz[z] <= 0.0 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    acc += f64::from(c) * pz[z].ln();
                }
            }
            Ok(acc)
        }
        Ensemble::ConstantComposition(pn) => {
            // sum_{V'} |T_{P_n x V'}| / (|T_{P_n}| |T_{Q_Z}|) prod W^{n Q'}
            let base = log_type_class_size(pn) + log_type_class_size(qz);
            let mut acc = LogSumExp::new();
            for q in enumerate_joint_ntypes_capped(w.inputs(), w.outputs(), pn.n(), Some(pn), Some(qz), cap)? {
                let om = n_omega(&q, w);
                if om > f64::NEG_INFINITY {
                    acc.push(log_type_class_size(&q) - base + om);
                }
            }
            Ok(acc.value())
        }
    }
}

/// `ln l(Q)` from the exact identity `l(Q) = exp(n omega(Q)) / (P-bar(T_{Q_Z}) / |T_{Q_Z}|)`.
pub fn log_ell(ensemble: &Ensemble, w: &Channel, q: &JointNType) -> Result<f64> {
    let p = ensemble.input_distribution();
    w.check_input(&p)?;
    check_shapes(q.nx(), w)?;
    let pz = output_marginal_of(p.masses(), w.entries(), w.outputs());
    let log_ref = log_reference_per_sequence(ensemble, w, &q.marginal_z(), &pz, DEFAULT_ENUM_CAP)?;
    Ok(n_omega(q, w) - log_ref)
}

/// The type-sum surrogate of `E[D(P_C || P-bar)]`:
/// `sum_Q exp(-n D(Q || Q_X x W)) P_{X^n}(T_{Q_X}) min{1, l(Q)/M}` with
/// `l(Q) = exp(n omega(Q)) / (P-bar(T_{Q_Z}) / |T_{Q_Z}|)`.
pub fn surrogate_sum(ensemble: &Ensemble, w: &Channel, n: u32, rate: f64) -> Result<SurrogateValue> {
    surrogate_sum_with(ensemble, w, n, rate, false, DEFAULT_ENUM_CAP)
}

pub fn surrogate_sum_with(
    ensemble: &Ensemble,
    w: &Channel,
    n: u32,
    rate: f64,
    keep_terms: bool,
    cap: u64,
) -> Result<SurrogateValue> {
    check_rate(rate)?;
    let p = ensemble.input_distribution();
    w.check_input(&p)?;
    if is_zero_capacity(&p, w)? {
        return Err(Error::ZeroCapacity);
    }
    if let Ensemble::ConstantComposition(pn) = ensemble {
        if pn.n() != n {
            return Err(Error::InvalidType(format!(
                "composition has n = {}, expected {n}",
                pn.n()
            )));
        }
    }
    let nf = f64::from(n);
    let log_m = log_codebook_size(n, rate);
    let pz = output_marginal_of(p.masses(), w.entries(), w.outputs());
    let fixed_x = match ensemble {
        Ensemble::ConstantComposition(pn) => Some(pn),
        Ensemble::Iid(_) => None,
    };

    let mut reference_cache: HashMap<NType, f64> = HashMap::new();
    let mut acc = LogSumExp::new();
    let mut terms = keep_terms.then(Vec::new);
    for q in enumerate_joint_ntypes_capped(w.inputs(), w.outputs(), n, fixed_x, None, cap)? {
        let qx = q.marginal_x();
        let log_px = ensemble.log_prob_type_class(&qx);
        if log_px == f64::NEG_INFINITY {
            continue;
        }
        let d = divergence_from(&q, w, qx.to_distribution().masses());
        if !d.is_finite() {
            continue;
        }
        let qz = q.marginal_z();
        let log_ref = match reference_cache.get(&qz) {
            Some(&v) => v,
            None => {
                let v = log_reference_per_sequence(ensemble, w, &qz, &pz, cap)?;
                reference_cache.insert(qz, v);
                v
            }
        };
        let log_l = n_omega(&q, w) - log_ref;
        let term = -nf * d + log_px + (log_l - log_m).min(0.0);
        acc.push(term);
        if let Some(t) = terms.as_mut() {
            t.push((q, term));
        }
    }
    Ok(SurrogateValue {
        n,
        rate,
        log_value: acc.value(),
        per_type_terms: terms,
    })
}

/// Half-width of the band within which `-(1/n) ln surrogate` and the
/// finite-n exponent must agree: `(|X||Z| + 2) ln(n + 1) / n`.
pub fn polynomial_slack(nx: usize, nz: usize, n: u32) -> f64 {
    (nx * nz + 2) as f64 * f64::from(n + 1).ln() / f64::from(n)
}
