//! Command bodies. Each returns the full CSV text: `#` provenance lines,
//! one header row, data rows, LF line endings.

use std::fmt::Write as _;

use secexp::cc::{es_cc, es_cc_lower, CcSolver};
use secexp::finite_n::{es_n_cc_capped, es_n_iid_capped};
use secexp::iid::{es_iid, is_zero_capacity};
use secexp::ntype::{quantize_to_ntype, TypeCounts};
use secexp::sim::{empirical_exponent, simulate_point, SimulationSpec, RNG_NAME, SEED_MULTIPLIER};
use secexp::{Channel, Distribution, Error};

use crate::spec::ChannelSpec;
use crate::{CliError, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EnsembleArg {
    Iid,
    Cc,
}

impl EnsembleArg {
    fn kind(self) -> secexp::sim::EnsembleKind {
        match self {
            EnsembleArg::Iid => secexp::sim::EnsembleKind::Iid,
            EnsembleArg::Cc => secexp::sim::EnsembleKind::ConstantComposition,
        }
    }
}

/// Metadata written ahead of the header row.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: &'static str,
    pub params: Vec<(&'static str, String)>,
    /// Unix seconds; `None` suppresses the line.
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: &'static str, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            command,
            params: Vec::new(),
            timestamp,
        }
    }

    pub fn param(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.push((key, value.to_string()));
        self
    }

    fn write(&self, out: &mut String, spec: &ChannelSpec) -> Result<(), CliError> {
        let _ = writeln!(out, "# secexp {} {}", env!("CARGO_PKG_VERSION"), self.command);
        let _ = writeln!(out, "# spec_sha256: {}", spec.sha256);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "# params: {}", params.join(" "));
        if let Some(pre) = &spec.prefix {
            let _ = writeln!(out, "# channel W: {}", rows(&spec.w));
            let _ = writeln!(out, "# prefix P_XU: {}", rows(&pre.p_xu));
            let _ = writeln!(out, "# prefix P_U: {:?}", pre.p_u.masses());
        }
        let _ = writeln!(out, "# effective channel: {}", rows(&spec.effective_channel()?));
        let _ = writeln!(out, "# input distribution: {:?}", spec.effective_input().masses());
        if let Some(t) = self.timestamp {
            let _ = writeln!(out, "# timestamp: {t}");
        }
        Ok(())
    }
}

fn rows(c: &Channel) -> String {
    format!("{:?}", c.to_rows())
}

fn require_capacity(p: &Distribution, w: &Channel) -> Result<(), CliError> {
    if is_zero_capacity(p, w)? {
        return Err(Error::ZeroCapacity.into());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub r_min: f64,
    pub r_max: f64,
    /// Number of grid points, endpoints included.
    pub r_steps: usize,
    pub units: Units,
}

/// Rate grid with `steps` points from `min` to `max`.
pub fn rate_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(min >= 0.0 && max.is_finite() && steps >= 1) || (steps > 1 && max <= min) {
        return Err(CliError::Args(format!(
            "need 0 <= r-min < r-max and r-steps >= 1 (got {min}, {max}, {steps})"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { max } else { min + step * i as f64 })
        .collect())
}

pub fn sweep(spec: &ChannelSpec, args: &SweepArgs, prov: Provenance) -> Result<String, CliError> {
    let (p, w) = (spec.effective_input(), spec.effective_channel()?);
    require_capacity(&p, &w)?;
    let grid = rate_grid(args.r_min, args.r_max, args.r_steps)?;
    let solver = CcSolver::new(&p, &w)?;
    let u = args.units;
    let prov = prov
        .param("r_min", args.r_min)
        .param("r_max", args.r_max)
        .param("r_steps", args.r_steps)
        .param("rate_units", "nats")
        .param("units", u.as_str());
    let mut out = String::new();
    prov.write(&mut out, spec)?;
    out.push_str("R,E_iid,E_cc,E_cc_lower,regime_iid,regime_cc\n");
    for r in grid {
        let iid = es_iid(&p, &w, r)?;
        let cc = solver.solve(r)?;
        let (lower, _) = es_cc_lower(&p, &w, r)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            u.scale(r),
            u.scale(iid.exponent),
            u.scale(cc.exponent),
            u.scale(lower),
            iid.regime,
            cc.regime
        );
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FiniteNArgs {
    pub ensemble: EnsembleArg,
    pub rate: f64,
    pub n_list: Vec<u32>,
    /// Cap on enumerated joint types.
    pub cap: u64,
    pub units: Units,
}

pub fn finite_n(spec: &ChannelSpec, args: &FiniteNArgs, prov: Provenance) -> Result<String, CliError> {
    let (p, w) = (spec.effective_input(), spec.effective_channel()?);
    require_capacity(&p, &w)?;
    if args.n_list.is_empty() || args.n_list.contains(&0) {
        return Err(CliError::Args("n list must hold positive blocklengths".into()));
    }
    let u = args.units;
    let asymptotic = match args.ensemble {
        EnsembleArg::Iid => es_iid(&p, &w, args.rate)?.exponent,
        EnsembleArg::Cc => es_cc(&p, &w, args.rate)?.exponent,
    };
    let mut rows = Vec::with_capacity(args.n_list.len());
    let mut notes = Vec::new();
    for &n in &args.n_list {
        let value = match args.ensemble {
            EnsembleArg::Iid => es_n_iid_capped(&p, &w, args.rate, n, args.cap)?.value,
            EnsembleArg::Cc => {
                let pn = quantize_to_ntype(&p, n)?;
                notes.push(format!("# n={n}: composition {:?}", pn.counts()));
                es_n_cc_capped(&pn, &w, args.rate, n, args.cap)?.value
            }
        };
        rows.push((n, value));
    }
    let prov = prov
        .param("ensemble", args.ensemble.kind().label())
        .param("rate", args.rate)
        .param("n", join(&args.n_list))
        .param("cap", args.cap)
        .param("rate_units", "nats")
        .param("units", u.as_str());
    let mut out = String::new();
    prov.write(&mut out, spec)?;
    for note in notes {
        out.push_str(&note);
        out.push('\n');
    }
    out.push_str("n,E_n,E_asymptotic,gap\n");
    for &(n, value) in &rows {
        let _ = writeln!(
            out,
            "{n},{},{},{}",
            u.scale(value),
            u.scale(asymptotic),
            u.scale(value - asymptotic)
        );
    }
    if rows.len() > 1 {
        let monotone = rows.windows(2).all(|p| p[1].1 <= p[0].1);
        let _ = writeln!(out, "# gap trend: {}", if monotone { "nonincreasing" } else { "not monotone" });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub ensemble: EnsembleArg,
    pub rate: f64,
    pub n_list: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub bins: Option<usize>,
    /// Cap on `|Z|^n` entries per law.
    pub budget: usize,
    pub units: Units,
}

pub fn simulate(spec: &ChannelSpec, args: &SimulateArgs, prov: Provenance) -> Result<String, CliError> {
    let (p, w) = (spec.effective_input(), spec.effective_channel()?);
    require_capacity(&p, &w)?;
    if args.n_list.is_empty() || args.n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(CliError::Args("n list must be nonempty and strictly ascending".into()));
    }
    let sim = SimulationSpec {
        kind: args.ensemble.kind(),
        input: p,
        channel: w,
        rate: args.rate,
        trials: args.trials,
        seed: args.seed,
        bins: args.bins,
        budget: args.budget,
    };
    let fit = if args.n_list.len() >= 3 {
        Some(empirical_exponent(&sim, &args.n_list)?)
    } else {
        None
    };
    let points = match &fit {
        Some(f) => f.points.clone(),
        None => args
            .n_list
            .iter()
            .enumerate()
            .map(|(k, &n)| simulate_point(&sim, n, k))
            .collect::<secexp::Result<Vec<_>>>()?,
    };
    let u = args.units;
    let prov = prov
        .param("ensemble", sim.kind.label())
        .param("rate", args.rate)
        .param("n", join(&args.n_list))
        .param("trials", args.trials)
        .param("seed", args.seed)
        .param("bins", args.bins.map_or("none".to_string(), |b| b.to_string()))
        .param("budget", args.budget)
        .param("rate_units", "nats")
        .param("units", u.as_str());
    let mut out = String::new();
    prov.write(&mut out, spec)?;
    let _ = writeln!(
        out,
        "# rng: {RNG_NAME}; trial t at n-list position k uses seed ^ ((k*trials + t) * {SEED_MULTIPLIER:#x})"
    );
    if args.bins.is_some() {
        out.push_str("n,mean_D,stderr_D,minus_log_mean_D,mean_leak,max_identity_residual\n");
    } else {
        out.push_str("n,mean_D,stderr_D,minus_log_mean_D\n");
    }
    for pt in &points {
        let _ = write!(
            out,
            "{},{},{},{}",
            pt.n,
            u.scale(pt.mean_d),
            u.scale(pt.stderr_d),
            u.scale(-pt.mean_d.ln())
        );
        if let (Some(leak), Some(res)) = (pt.mean_leak, pt.max_identity_residual) {
            let _ = write!(out, ",{},{}", u.scale(leak), res);
        }
        out.push('\n');
    }
    match fit {
        Some(f) => {
            out.push_str("# fit,slope,intercept,residual_rms,confidence\n");
            let _ = writeln!(
                out,
                "# fit,{},{},{},{}",
                u.scale(f.slope),
                u.scale(f.intercept),
                u.scale(f.residual_rms),
                f.confidence()
            );
        }
        None => out.push_str("# fit: needs at least 3 blocklengths\n"),
    }
    Ok(out)
}

fn join(ns: &[u32]) -> String {
    ns.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}
