//! Configuration-driven quench runs.
//!
//! Every run prepares a pre-quench ground state, evolves it under the
//! post-quench Hamiltonian and records telescoped information sums at each
//! grid time. Full lattices are only built at the requested snapshot times.

use std::collections::BTreeMap;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::{ground_state, CovarianceMatrix, GroundStateOptions};
use crate::error::{Error, Result};
use crate::evolution::Evolver;
use crate::fit::{default_power_window, fit_gaussian_decay, fit_power_law, late_time_mean, FitResult};
use crate::hamiltonian::{
    build_composite, build_effective_hamiltonian, build_kitaev_with_mu, build_tb_hamiltonian,
    CouplingMatrix, HamiltonianTerm,
};
use crate::lattice::{
    lattice_delta, local_information, scale_profile, InformationLattice, IntervalProbe, LatticeCoord,
};
use crate::partition::{partition_sums_fast, PartitionLabel, RegionSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    ReleaseParticle,
    BarrierRemoval,
    KitaevProbe,
    KitaevProbeDetuned,
    EffectiveModel,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::ReleaseParticle,
        Protocol::BarrierRemoval,
        Protocol::KitaevProbe,
        Protocol::KitaevProbeDetuned,
        Protocol::EffectiveModel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::ReleaseParticle => "release_particle",
            Protocol::BarrierRemoval => "barrier_removal",
            Protocol::KitaevProbe => "kitaev_probe",
            Protocol::KitaevProbeDetuned => "kitaev_probe_detuned",
            Protocol::EffectiveModel => "effective_model",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown protocol {s:?}")))
    }

    fn is_tight_binding(&self) -> bool {
        matches!(self, Protocol::ReleaseParticle | Protocol::BarrierRemoval)
    }
}

pub const DEFAULT_MU_P_REGULARIZER: f64 = 1e-5;

/// A quench as written in a config file. Unset fields take per-protocol
/// defaults in [`QuenchConfig::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchConfig {
    pub protocol: Option<Protocol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_i: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_p_regularizer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_mode_threshold: Option<f64>,
}

/// Physical parameters after defaults are applied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    pub mu_i: f64,
    pub mu_f: f64,
    pub mu_p: f64,
    pub tau: f64,
    pub tau_p: f64,
    pub tau_t: f64,
    pub mu: f64,
    pub barrier_width: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub protocol: Protocol,
    pub n_sites: usize,
    pub regions: RegionSpec,
    pub params: Params,
    pub times: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub zero_mode_threshold: f64,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl QuenchConfig {
    pub fn new(protocol: Protocol) -> Self {
        Self {
            protocol: Some(protocol),
            ..Self::default()
        }
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let protocol = self.protocol.ok_or_else(|| config_err("missing protocol"))?;
        let regularizer = self.mu_p_regularizer.unwrap_or(DEFAULT_MU_P_REGULARIZER);
        let tau_p = self.tau_p.unwrap_or(1.0);
        if tau_p <= 0.0 {
            return Err(config_err("tau_p must be positive"));
        }
        let barrier_width = self.barrier_width.unwrap_or(1);

        let (n_sites, l_q) = if protocol.is_tight_binding() {
            if self.probe_len.is_some() {
                return Err(config_err("probe_len only applies to the Kitaev protocols"));
            }
            let n = self.n_sites.unwrap_or(201);
            if barrier_width % 2 == 0 || barrier_width == 0 {
                return Err(config_err(format!("barrier_width must be odd, got {barrier_width}")));
            }
            let eta = (n.max(1) - 1) / 2;
            let half = barrier_width / 2;
            if half > eta || eta + half >= n {
                return Err(config_err(format!(
                    "barrier of width {barrier_width} does not fit around site {eta} of {n}"
                )));
            }
            // Q is the left half up to and including the central site.
            (n, self.l_q.unwrap_or(eta + 1))
        } else {
            let default_l_q = match protocol {
                Protocol::KitaevProbeDetuned => 30,
                Protocol::EffectiveModel => 1,
                _ => 10,
            };
            let l_q = self.l_q.unwrap_or(default_l_q);
            if protocol == Protocol::EffectiveModel && l_q != 1 {
                return Err(config_err("the effective model has a single-site Q"));
            }
            let default_probe = if protocol == Protocol::KitaevProbeDetuned { 70 } else { 110 };
            let probe = match (self.probe_len, self.n_sites) {
                (Some(p), Some(n)) if p + l_q != n => {
                    return Err(config_err(format!("l_q + probe_len = {} but n_sites = {n}", l_q + p)))
                }
                (Some(p), _) => p,
                (None, Some(n)) => n
                    .checked_sub(l_q)
                    .ok_or_else(|| config_err("n_sites smaller than l_q"))?,
                (None, None) => default_probe,
            };
            (l_q + probe, l_q)
        };

        let rest = n_sites
            .checked_sub(l_q)
            .ok_or_else(|| config_err(format!("l_q = {l_q} exceeds n_sites = {n_sites}")))?;
        let default_l_x = if protocol.is_tight_binding() { 10 } else { 50.min(rest / 2) };
        let (l_x, l_p) = match (self.l_x, self.l_p) {
            (Some(x), Some(p)) => (x, p),
            (Some(x), None) => (x, rest.saturating_sub(x)),
            (None, Some(p)) => (rest.saturating_sub(p), p),
            (None, None) => (default_l_x, rest.saturating_sub(default_l_x)),
        };
        let regions = RegionSpec::new(l_q, l_x, l_p)?;
        regions.check(n_sites)?;

        let params = match protocol {
            Protocol::ReleaseParticle => Params {
                mu_i: self.mu_i.unwrap_or(-20.0),
                mu_f: self.mu_f.unwrap_or(20.0),
                mu_p: self.mu_p.unwrap_or(20.0),
                tau: 0.0,
                tau_p,
                tau_t: 0.0,
                mu: 0.0,
                barrier_width,
            },
            Protocol::BarrierRemoval => Params {
                mu_i: self.mu_i.unwrap_or(20.0),
                mu_f: self.mu_f.unwrap_or(0.0),
                mu_p: self.mu_p.unwrap_or(regularizer),
                tau: 0.0,
                tau_p,
                tau_t: 0.0,
                mu: 0.0,
                barrier_width,
            },
            Protocol::KitaevProbe | Protocol::EffectiveModel => Params {
                mu_i: 0.0,
                mu_f: 0.0,
                mu_p: self.mu_p.unwrap_or(0.0),
                tau: self.tau.unwrap_or(20.0),
                tau_p,
                tau_t: self.tau_t.unwrap_or(1.0),
                mu: self.mu.unwrap_or(0.0),
                barrier_width: 0,
            },
            Protocol::KitaevProbeDetuned => {
                let tau = self.tau.unwrap_or(100.0);
                Params {
                    mu_i: 0.0,
                    mu_f: 0.0,
                    mu_p: self.mu_p.unwrap_or(0.0),
                    tau,
                    tau_p,
                    tau_t: self.tau_t.unwrap_or(1.0),
                    mu: self.mu.unwrap_or(0.6 * tau),
                    barrier_width: 0,
                }
            }
        };

        let times = match &self.times {
            Some(list) => list.clone(),
            None => {
                let t_start = self.t_start.unwrap_or(0.0);
                let t_stop = self.t_stop.unwrap_or(match protocol {
                    Protocol::ReleaseParticle => 80.0,
                    Protocol::BarrierRemoval | Protocol::KitaevProbeDetuned => 100.0,
                    Protocol::KitaevProbe | Protocol::EffectiveModel => 120.0,
                });
                let dt = self.dt.unwrap_or(0.5 / tau_p);
                time_grid(t_start, t_stop, dt)?
            }
        };
        check_times(&times, "time grid")?;
        let mut snapshot_times = self.snapshot_times.clone();
        if !snapshot_times.is_empty() {
            check_times(&snapshot_times, "snapshot times")?;
        }
        snapshot_times.dedup();

        Ok(ResolvedConfig {
            protocol,
            n_sites,
            regions,
            params,
            times,
            snapshot_times,
            zero_mode_threshold: self.zero_mode_threshold.unwrap_or(1e-8),
        })
    }
}

/// `t_start, t_start + dt, …` up to and including `t_stop` (within rounding).
pub fn time_grid(t_start: f64, t_stop: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(config_err(format!("dt must be positive, got {dt}")));
    }
    if t_stop < t_start {
        return Err(config_err("t_stop before t_start"));
    }
    let steps = ((t_stop - t_start) / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| t_start + k as f64 * dt).collect())
}

fn check_times(times: &[f64], what: &str) -> Result<()> {
    if times.is_empty() {
        return Err(config_err(format!("{what} is empty")));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(config_err(format!("{what} must be finite and non-negative")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_err(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

impl ResolvedConfig {
    /// Sites carrying the barrier / impurity potential, centred on
    /// `⌊(N−1)/2⌋`.
    pub fn barrier_sites(&self) -> Vec<usize> {
        let eta = (self.n_sites - 1) / 2;
        let half = self.params.barrier_width / 2;
        (eta - half..=eta + half).collect()
    }

    pub fn probe_len(&self) -> usize {
        self.n_sites - self.regions.l_q
    }

    fn probe_chain(&self) -> Result<CouplingMatrix> {
        let p = &self.params;
        build_tb_hamiltonian(self.probe_len(), &[], 0.0, p.mu_p, p.tau_p)
    }

    fn kitaev(&self) -> Result<CouplingMatrix> {
        build_kitaev_with_mu(self.regions.l_q, self.params.tau, self.params.mu)
    }

    fn options(&self) -> GroundStateOptions {
        GroundStateOptions {
            rel_threshold: self.zero_mode_threshold,
            ..GroundStateOptions::default()
        }
    }

    pub fn pre_hamiltonian(&self) -> Result<CouplingMatrix> {
        let p = &self.params;
        match self.protocol {
            Protocol::ReleaseParticle | Protocol::BarrierRemoval => {
                build_tb_hamiltonian(self.n_sites, &self.barrier_sites(), p.mu_i, p.mu_p, p.tau_p)
            }
            Protocol::KitaevProbe | Protocol::KitaevProbeDetuned => {
                build_composite(&self.kitaev()?, &self.probe_chain()?, 0.0)
            }
            Protocol::EffectiveModel => self.effective(0.0),
        }
    }

    pub fn post_hamiltonian(&self) -> Result<CouplingMatrix> {
        let p = &self.params;
        match self.protocol {
            Protocol::ReleaseParticle | Protocol::BarrierRemoval => {
                build_tb_hamiltonian(self.n_sites, &self.barrier_sites(), p.mu_f, p.mu_p, p.tau_p)
            }
            Protocol::KitaevProbe | Protocol::KitaevProbeDetuned => {
                build_composite(&self.kitaev()?, &self.probe_chain()?, p.tau_t)
            }
            Protocol::EffectiveModel => self.effective(p.tau_t),
        }
    }

    fn effective(&self, tau_t: f64) -> Result<CouplingMatrix> {
        let base = build_effective_hamiltonian(self.n_sites, tau_t, self.params.tau_p)?;
        if self.params.mu_p == 0.0 {
            return Ok(base);
        }
        let mut terms = base.terms().to_vec();
        terms.extend((1..self.n_sites).map(|i| HamiltonianTerm::chemical_potential(i, self.params.mu_p)));
        CouplingMatrix::from_terms(self.n_sites, terms)
    }

    /// Pre-quench state. The Kitaev protocols start from the product of the
    /// two decoupled ground states with the topological mode empty.
    pub fn initial_state(&self) -> Result<CovarianceMatrix> {
        let hint = |e: Error| match e {
            Error::DegenerateGroundState { .. } => Error::Remediable {
                source: Box::new(e),
                hint: format!(
                    "set mu_p (e.g. mu_p = {DEFAULT_MU_P_REGULARIZER:e}) to lift the degeneracy of the {} chain",
                    if self.protocol.is_tight_binding() { "tight-binding" } else { "probe" }
                ),
            },
            other => other,
        };
        match self.protocol {
            Protocol::ReleaseParticle | Protocol::BarrierRemoval => {
                ground_state(&self.pre_hamiltonian()?, self.options()).map_err(hint)
            }
            Protocol::KitaevProbe | Protocol::KitaevProbeDetuned => {
                let empty = GroundStateOptions {
                    rel_threshold: self.zero_mode_threshold,
                    ..GroundStateOptions::empty_zero_modes()
                };
                let left = ground_state(&self.kitaev()?, empty)?;
                let right = ground_state(&self.probe_chain()?, self.options()).map_err(hint)?;
                Ok(CovarianceMatrix::direct_sum(&[&left, &right]))
            }
            Protocol::EffectiveModel => {
                let right = ground_state(&self.probe_chain()?, self.options()).map_err(hint)?;
                Ok(CovarianceMatrix::direct_sum(&[&CovarianceMatrix::vacuum(1), &right]))
            }
        }
    }
}

/// Telescoped observables of one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FastObservables {
    pub partition: BTreeMap<PartitionLabel, f64>,
    pub occupations: Vec<f64>,
    pub interface: f64,
    pub diagonal: f64,
    pub i_top: f64,
    pub total_info: f64,
}

pub fn fast_observables(state: &CovarianceMatrix, regions: &RegionSpec) -> Result<FastObservables> {
    let mut probe = IntervalProbe::new(state);
    let n = state.n_sites();
    let top = LatticeCoord::new(regions.l_q - 1, 0, n)?;
    Ok(FastObservables {
        partition: partition_sums_fast(&mut probe, regions)?,
        occupations: state.occupation_density(),
        interface: probe.interface_sum(regions)?,
        diagonal: probe.diagonal_sum_topological(regions.l_q)?,
        i_top: probe.local_info(top)?,
        total_info: probe.info(0, n - 1)?,
    })
}

/// `(ell, i(ell, l_Q − 1))` for `ell = 1..=N − l_Q`: the information on the
/// diagonal anchored at the last site of Q.
pub fn interface_profile(lattice: &InformationLattice, l_q: usize) -> Vec<(f64, f64)> {
    let n = lattice.n_sites();
    (1..=n - l_q)
        .map(|ell| (ell as f64, lattice.local_info()[ell][l_q - 1]))
        .collect()
}

/// Same as [`interface_profile`] from interval entropies of one state.
pub fn interface_profile_fast(state: &CovarianceMatrix, l_q: usize) -> Result<Vec<(f64, f64)>> {
    let n = state.n_sites();
    let mut probe = IntervalProbe::new(state);
    (1..=n - l_q)
        .map(|ell| Ok((ell as f64, probe.local_info(LatticeCoord::new(ell, l_q - 1, n)?)?)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub lattice: InformationLattice,
    /// `i_t − i_baseline`, `[ell][m]`.
    pub delta: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub config: ResolvedConfig,
    pub times: Vec<f64>,
    /// Change of each partition sum relative to the pre-quench state.
    pub gamma: BTreeMap<PartitionLabel, Vec<f64>>,
    /// `[time][site]`.
    pub occupations: Vec<Vec<f64>>,
    pub interface: Vec<f64>,
    pub diagonal: Vec<f64>,
    pub i_top: Vec<f64>,
    pub total_info: Vec<f64>,
    pub baseline_sums: BTreeMap<PartitionLabel, f64>,
    /// Full pre-quench lattice; built only when snapshots are requested.
    pub baseline: Option<InformationLattice>,
    pub snapshots: Vec<Snapshot>,
    pub fits: BTreeMap<String, FitResult>,
    pub fit_errors: BTreeMap<String, String>,
    pub timings: Timings,
}

/// Wall-clock seconds spent in each stage of a run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub initial_state: f64,
    pub series: f64,
    /// One entry per full lattice: the baseline first, then each snapshot.
    pub lattices: Vec<f64>,
}

impl RunResult {
    /// Late-time mean of each Γ series.
    pub fn asymptotes(&self) -> BTreeMap<PartitionLabel, f64> {
        self.gamma
            .iter()
            .map(|(l, v)| (*l, late_time_mean(&self.times, v)))
            .collect()
    }

    pub fn gamma_series(&self, label: PartitionLabel) -> &[f64] {
        &self.gamma[&label]
    }
}

pub fn run(config: &QuenchConfig) -> Result<RunResult> {
    run_resolved(config.resolve()?)
}

pub fn run_resolved(config: ResolvedConfig) -> Result<RunResult> {
    let regions = config.regions;
    let mut timings = Timings::default();
    let clock = Instant::now();
    let m0 = config.initial_state()?;
    timings.initial_state = clock.elapsed().as_secs_f64();
    let post = config.post_hamiltonian()?;
    let evolver = Evolver::new(&post);
    let prepared = evolver.prepare(&m0)?;
    info!(
        "{}: N={} regions=({}, {}, {}) {} times, {} snapshots",
        config.protocol.as_str(),
        config.n_sites,
        regions.l_q,
        regions.l_x,
        regions.l_p,
        config.times.len(),
        config.snapshot_times.len()
    );

    let clock = Instant::now();
    let base = fast_observables(&m0, &regions)?;
    let per_time = config
        .times
        .par_iter()
        .map(|&t| fast_observables(&prepared.at(t)?, &regions))
        .collect::<Result<Vec<_>>>()?;
    timings.series = clock.elapsed().as_secs_f64();

    let gamma = PartitionLabel::ALL
        .iter()
        .map(|l| {
            let b = base.partition[l];
            (*l, per_time.iter().map(|o| o.partition[l] - b).collect())
        })
        .collect();

    let (baseline, snapshots) = if config.snapshot_times.is_empty() {
        (None, Vec::new())
    } else {
        let clock = Instant::now();
        let baseline = local_information(&m0)?;
        timings.lattices.push(clock.elapsed().as_secs_f64());
        let mut snaps = Vec::with_capacity(config.snapshot_times.len());
        for &t in &config.snapshot_times {
            let clock = Instant::now();
            let lattice = local_information(&prepared.at(t)?)?;
            timings.lattices.push(clock.elapsed().as_secs_f64());
            let delta = lattice_delta(&lattice, &baseline)?;
            snaps.push(Snapshot { t, lattice, delta });
        }
        (Some(baseline), snaps)
    };

    let mut result = RunResult {
        times: config.times.clone(),
        gamma,
        occupations: per_time.iter().map(|o| o.occupations.clone()).collect(),
        interface: per_time.iter().map(|o| o.interface).collect(),
        diagonal: per_time.iter().map(|o| o.diagonal).collect(),
        i_top: per_time.iter().map(|o| o.i_top).collect(),
        total_info: per_time.iter().map(|o| o.total_info).collect(),
        baseline_sums: base.partition,
        baseline,
        snapshots,
        fits: BTreeMap::new(),
        fit_errors: BTreeMap::new(),
        timings,
        config,
    };
    standard_fits(&mut result, &m0)?;
    Ok(result)
}

fn record(result: &mut RunResult, name: &str, fit: Result<FitResult>) {
    match fit {
        Ok(f) => {
            result.fits.insert(name.into(), f);
        }
        Err(e) => {
            warn!("{name}: {e}");
            result.fit_errors.insert(name.into(), e.to_string());
        }
    }
}

fn standard_fits(result: &mut RunResult, m0: &CovarianceMatrix) -> Result<()> {
    let cfg = &result.config;
    if cfg.protocol.is_tight_binding() {
        if cfg.protocol == Protocol::BarrierRemoval {
            // Left half-chain, which the barrier decouples before the quench.
            let len = cfg.barrier_sites()[0];
            let half = local_information(&m0.subsystem(0, len))?;
            let fit = fit_power_law(&profile_points(&half), default_power_window(len));
            record(result, "half_chain_profile", fit);
        }
        return Ok(());
    }
    let series: Vec<(f64, f64)> = result.times.iter().copied().zip(result.i_top.iter().copied()).collect();
    let fit = fit_gaussian_decay(&series, None);
    record(result, "i_top_decay", fit);
    if let Some(last) = result.snapshots.last() {
        let l_q = result.config.regions.l_q;
        let profile = interface_profile(&last.lattice, l_q);
        let fit = fit_power_law(&profile, default_power_window(profile.len()));
        record(result, "interface_profile", fit);
    }
    Ok(())
}

/// `(ell, ⟨i^ell⟩)` for `ell ≥ 1`.
pub fn profile_points(lattice: &InformationLattice) -> Vec<(f64, f64)> {
    scale_profile(lattice)
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(ell, v)| (ell as f64, v))
        .collect()
}

/// Largest disagreements between a full Kitaev + probe run and the
/// single-site effective model on the same probe.
///
/// With `l_Q = 1` the interface diagonal and the edge diagonal of Q both
/// start at site 0, so the effective model only has their sum. `edge`
/// compares interface + diagonal of the full run with that sum; `i_top`
/// compares the top of Q with the effective site itself.
#[derive(Clone, Debug, Serialize)]
pub struct EffectiveComparison {
    pub edge: f64,
    pub i_top: f64,
    pub gamma: BTreeMap<PartitionLabel, f64>,
    pub asymptotes: BTreeMap<PartitionLabel, f64>,
}

impl EffectiveComparison {
    pub fn max(&self) -> f64 {
        self.gamma
            .values()
            .copied()
            .chain([self.edge, self.i_top])
            .fold(0.0, f64::max)
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn compare_effective(full: &RunResult, eff: &RunResult) -> Result<EffectiveComparison> {
    if full.times != eff.times {
        return Err(config_err("time grids differ"));
    }
    let (a, b) = (&full.config, &eff.config);
    if a.probe_len() != b.probe_len()
        || a.regions.l_x != b.regions.l_x
        || a.regions.l_p != b.regions.l_p
    {
        return Err(config_err(format!(
            "probe mismatch: ({}, {}, {}) vs ({}, {}, {})",
            a.probe_len(),
            a.regions.l_x,
            a.regions.l_p,
            b.probe_len(),
            b.regions.l_x,
            b.regions.l_p
        )));
    }
    let (fa, fb) = (full.asymptotes(), eff.asymptotes());
    let full_edge: Vec<f64> = full.interface.iter().zip(&full.diagonal).map(|(a, b)| a + b).collect();
    Ok(EffectiveComparison {
        edge: max_dev(&full_edge, &eff.diagonal),
        i_top: max_dev(&full.i_top, &eff.i_top),
        gamma: PartitionLabel::ALL
            .iter()
            .map(|l| (*l, max_dev(&full.gamma[l], &eff.gamma[l])))
            .collect(),
        asymptotes: PartitionLabel::ALL
            .iter()
            .map(|l| (*l, (fa[l] - fb[l]).abs()))
            .collect(),
    })
}
