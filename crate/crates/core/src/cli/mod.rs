//! Command-line front end.
//!
//! Subcommands cover both halves of the library: `epsilon`, `optimize`,
//! `min-snr`, and `tables` evaluate and search the packet-error bound;
//! `aoi`, `aoi-sweep`, `limit`, and `simulate` work on the peak-age side.
//! Parameters come from flags or from a JSON config file (flags win), and
//! results are emitted as CSV or JSON records.

pub mod report;
pub mod spec;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::age::{limiting_violation, violation_probability, QueueParams};
use crate::channel::{ChannelConfig, PilotMode};
use crate::error::{Error, Result};
use crate::fbl::{
    min_snr_for_target, optimize_alpha_auto, optimize_np, optimize_np_scan, rcus_estimate,
    refine_alpha, snr_db_to_linear, CodeConfig, FblEstimate, FblParams,
};
use crate::queue::{empirical_violation, run_sim, ArrivalGranularity, SimConfig};
use report::{Cell, OutputFormat, Report};
use spec::{
    parse_antennas, parse_grid, parse_pilot_mode, parse_scenarios, require, ChannelSection,
    CodeSection, FileSpec, McSection, QueueSection,
};

#[derive(Debug, Parser)]
#[command(
    name = "paoi",
    version,
    about = "Packet-error bounds and peak-age-of-information planning for short-packet fading links"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    pub fn run(self) -> Result<()> {
        match self.command {
            Command::Epsilon(c) => c.run(),
            Command::Optimize(c) => c.run(),
            Command::MinSnr(c) => c.run(),
            Command::Aoi(c) => c.run(),
            Command::AoiSweep(c) => c.run(),
            Command::Limit(c) => c.run(),
            Command::Simulate(c) => c.run(),
            Command::Tables(c) => c.run(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the single-transmission packet-error bound over an SNR grid
    Epsilon(EpsilonCmd),
    /// Scan pilot counts at one SNR and report the per-pilot optimum
    Optimize(OptimizeCmd),
    /// Find the smallest SNR meeting a packet-error target
    MinSnr(MinSnrCmd),
    /// Peak-age violation probability at one parameter point
    Aoi(AoiCmd),
    /// Sweep the arrival rate and report violation probabilities
    AoiSweep(AoiSweepCmd),
    /// Closed-form limiting violation probability as lambda -> 1
    Limit(LimitCmd),
    /// Simulate the LCFS-with-preemption ARQ queue
    Simulate(SimulateCmd),
    /// Minimum-SNR design tables across diversity scenarios and antennas
    Tables(TablesCmd),
}

fn available_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// JSON config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: csv or json (default csv, json for *.json outputs)
    #[arg(long)]
    format: Option<String>,
}

impl CommonOpts {
    fn file(&self) -> Result<FileSpec> {
        FileSpec::load(self.config.as_deref())
    }

    fn emit(&self, file: &FileSpec, report: &Report) -> Result<()> {
        let path = self
            .output
            .clone()
            .or_else(|| file.output.path.as_ref().map(PathBuf::from));
        let format = match self.format.as_deref().or(file.output.format.as_deref()) {
            Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return Err(Error::Config(format!(
                    "format must be 'csv' or 'json' (got '{other}')"
                )))
            }
            None => match path.as_ref().and_then(|p| p.extension()) {
                Some(ext) if ext == "json" => OutputFormat::Json,
                _ => OutputFormat::Csv,
            },
        };
        match path {
            Some(p) => {
                let mut f = File::create(p)?;
                report.write(&mut f, format)
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                report.write(&mut lock, format)?;
                lock.flush()?;
                Ok(())
            }
        }
    }
}

#[derive(Debug, Args)]
struct ChannelOpts {
    /// Transmit antennas
    #[arg(long)]
    mt: Option<usize>,
    /// Receive antennas
    #[arg(long)]
    mr: Option<usize>,
    /// Coherence blocks per packet (diversity branches)
    #[arg(long)]
    ell: Option<usize>,
    /// Coherence-block length in channel uses
    #[arg(long)]
    nc: Option<usize>,
    /// Pilot symbols per coherence block
    #[arg(long)]
    np: Option<usize>,
    /// Channel-estimation mode: equivalent (default) or explicit
    #[arg(long)]
    pilot_mode: Option<String>,
}

struct ResolvedChannel {
    m_t: usize,
    m_r: usize,
    ell: usize,
    n_c: usize,
    n_p: Option<usize>,
    pilot_mode: PilotMode,
}

impl ChannelOpts {
    fn resolve(&self, f: &ChannelSection) -> Result<ResolvedChannel> {
        let pilot_mode = match self.pilot_mode.as_deref().or(f.pilot_mode.as_deref()) {
            Some(s) => parse_pilot_mode(s)?,
            None => PilotMode::Equivalent,
        };
        Ok(ResolvedChannel {
            m_t: require(self.mt, f.m_t, "mt", "channel.m_t")?,
            m_r: require(self.mr, f.m_r, "mr", "channel.m_r")?,
            ell: require(self.ell, f.ell, "ell", "channel.ell")?,
            n_c: require(self.nc, f.n_c, "nc", "channel.n_c")?,
            n_p: self.np.or(f.n_p),
            pilot_mode,
        })
    }
}

impl ResolvedChannel {
    fn config(&self, n_p: usize, rho_db: f64) -> Result<ChannelConfig> {
        let cfg = ChannelConfig {
            m_t: self.m_t,
            m_r: self.m_r,
            ell: self.ell,
            n_c: self.n_c,
            n_p,
            rho: snr_db_to_linear(rho_db),
            pilot_mode: self.pilot_mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn require_np(&self) -> Result<usize> {
        self.n_p.ok_or_else(|| {
            Error::Config(
                "missing required parameter: pass --np or set channel.n_p in the config file"
                    .into(),
            )
        })
    }
}

#[derive(Debug, Args)]
struct CodeOpts {
    /// Information bits per packet
    #[arg(long)]
    k: Option<u32>,
    /// Coded packet length in channel uses (default: ell * nc)
    #[arg(long)]
    n: Option<usize>,
}

impl CodeOpts {
    fn resolve(&self, f: &CodeSection, default_n: usize) -> Result<CodeConfig> {
        let code = CodeConfig {
            k: require(self.k, f.k, "k", "code.k")?,
            n: self.n.or(f.n).unwrap_or(default_n),
        };
        code.validate()?;
        Ok(code)
    }
}

#[derive(Debug, Args)]
struct McOpts {
    /// Bound parameter; omit to optimize over the default grid
    #[arg(long)]
    alpha: Option<f64>,
    /// Monte Carlo samples
    #[arg(long)]
    samples: Option<u64>,
    /// Master seed; every sample uses its own substream
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results are worker-count independent)
    #[arg(long)]
    workers: Option<usize>,
}

struct ResolvedMc {
    alpha: Option<f64>,
    n_samples: u64,
    seed: u64,
    workers: usize,
}

impl McOpts {
    fn resolve(&self, f: &McSection) -> ResolvedMc {
        ResolvedMc {
            alpha: self.alpha.or(f.alpha),
            n_samples: self.samples.or(f.n_samples).unwrap_or(1_000_000),
            seed: self.seed.or(f.seed).unwrap_or(0),
            workers: self.workers.or(f.workers).unwrap_or_else(available_workers),
        }
    }
}

impl ResolvedMc {
    fn params(&self, alpha: f64) -> FblParams {
        FblParams {
            alpha,
            n_samples: self.n_samples,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

const FBL_COLUMNS: [&str; 11] = [
    "m_t",
    "m_r",
    "ell",
    "n_c",
    "n_p",
    "rho_db",
    "alpha",
    "eps_mean",
    "std_err",
    "n_samples",
    "seed",
];

fn fbl_row(ch: &ChannelConfig, rho_db: f64, est: &FblEstimate, seed: u64) -> Vec<Cell> {
    vec![
        Cell::U(ch.m_t as u64),
        Cell::U(ch.m_r as u64),
        Cell::U(ch.ell as u64),
        Cell::U(ch.n_c as u64),
        Cell::U(est.n_p as u64),
        Cell::F(rho_db),
        Cell::F(est.alpha),
        Cell::F(est.eps_mean),
        Cell::F(est.std_err),
        Cell::U(est.n_samples),
        Cell::U(seed),
    ]
}

#[derive(Debug, Args)]
struct EpsilonCmd {
    #[command(flatten)]
    channel: ChannelOpts,
    /// SNR grid in dB: a value, a comma list, or from:to:step
    #[arg(long, allow_hyphen_values = true)]
    rho_db: Option<String>,
    #[command(flatten)]
    code: CodeOpts,
    #[command(flatten)]
    mc: McOpts,
    /// Also optimize the pilot count per SNR point
    #[arg(long)]
    optimize_np: bool,
    #[command(flatten)]
    common: CommonOpts,
}

/// Resolves the SNR grid from a flag grid string or a config scalar.
fn resolve_rho_grid(flag: &Option<String>, file_db: Option<f64>) -> Result<Vec<f64>> {
    match flag {
        Some(s) => parse_grid(s),
        None => file_db.map(|v| vec![v]).ok_or_else(|| {
            Error::Config(
                "missing required parameter: pass --rho-db or set channel.rho_db in the config file"
                    .into(),
            )
        }),
    }
}

impl EpsilonCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let rc = self.channel.resolve(&file.channel)?;
        let code = self.code.resolve(&file.code, rc.ell * rc.n_c)?;
        let mc = self.mc.resolve(&file.mc);
        let mut rho_grid = resolve_rho_grid(&self.rho_db, file.channel.rho_db)?;
        rho_grid.sort_by(f64::total_cmp);

        let mut rep = Report::new(FBL_COLUMNS.to_vec());
        for &db in &rho_grid {
            let n_p = if self.optimize_np {
                rc.n_p.unwrap_or(rc.m_t)
            } else {
                rc.require_np()?
            };
            let ch = rc.config(n_p, db)?;
            let est = run_point(&ch, &code, &mc, self.optimize_np)?;
            rep.push(fbl_row(&ch, db, &est, mc.seed));
        }
        self.common.emit(&file, &rep)
    }
}

/// Evaluates one (channel, code) point: fixed alpha, auto-optimized alpha,
/// or a joint pilot/alpha search.
fn run_point(
    ch: &ChannelConfig,
    code: &CodeConfig,
    mc: &ResolvedMc,
    np_search: bool,
) -> Result<FblEstimate> {
    if np_search {
        let grid = match mc.alpha {
            Some(a) => vec![a],
            None => crate::fbl::default_alpha_grid(),
        };
        let coarse = optimize_np(ch, code, &mc.params(0.0), &grid)?;
        if mc.alpha.is_some() {
            return Ok(coarse);
        }
        let ch_best = ChannelConfig {
            n_p: coarse.n_p,
            ..*ch
        };
        refine_alpha(&ch_best, code, &mc.params(0.0), coarse)
    } else {
        match mc.alpha {
            Some(a) => rcus_estimate(ch, code, &mc.params(a)),
            None => optimize_alpha_auto(ch, code, &mc.params(0.0)),
        }
    }
}

#[derive(Debug, Args)]
struct OptimizeCmd {
    #[command(flatten)]
    channel: ChannelOpts,
    /// SNR in dB
    #[arg(long, allow_negative_numbers = true)]
    rho_db: Option<f64>,
    #[command(flatten)]
    code: CodeOpts,
    #[command(flatten)]
    mc: McOpts,
    #[command(flatten)]
    common: CommonOpts,
}

impl OptimizeCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let rc = self.channel.resolve(&file.channel)?;
        let code = self.code.resolve(&file.code, rc.ell * rc.n_c)?;
        let mc = self.mc.resolve(&file.mc);
        let db = require(self.rho_db, file.channel.rho_db, "rho-db", "channel.rho_db")?;

        let template = rc.config(rc.m_t, db)?;
        let grid = match mc.alpha {
            Some(a) => vec![a],
            None => crate::fbl::default_alpha_grid(),
        };
        let scan = optimize_np_scan(&template, &code, &mc.params(0.0), &grid)?;
        let best = scan
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.eps_mean.total_cmp(&b.eps_mean))
            .map(|(i, _)| i)
            .expect("scan is nonempty");

        let mut columns = FBL_COLUMNS.to_vec();
        columns.push("selected");
        let mut rep = Report::new(columns);
        for (i, est) in scan.iter().enumerate() {
            let mut row = fbl_row(&template, db, est, mc.seed);
            row.push(Cell::B(i == best));
            rep.push(row);
        }
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct MinSnrCmd {
    #[command(flatten)]
    channel: ChannelOpts,
    /// Packet-error target for eps_mean + 2 std_err
    #[arg(long)]
    eps_target: f64,
    /// Ascending SNR grid in dB (from:to:step, list, or single value)
    #[arg(long, allow_hyphen_values = true)]
    rho_grid: String,
    /// Also optimize the pilot count at every SNR
    #[arg(long)]
    optimize_np: bool,
    #[command(flatten)]
    code: CodeOpts,
    #[command(flatten)]
    mc: McOpts,
    #[command(flatten)]
    common: CommonOpts,
}

impl MinSnrCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let rc = self.channel.resolve(&file.channel)?;
        let code = self.code.resolve(&file.code, rc.ell * rc.n_c)?;
        let mc = self.mc.resolve(&file.mc);
        let grid = parse_grid(&self.rho_grid)?;
        let n_p = if self.optimize_np {
            rc.n_p.unwrap_or(rc.m_t)
        } else {
            rc.require_np()?
        };
        let template = rc.config(n_p, grid[0])?;
        let search = min_snr_for_target(
            &template,
            &code,
            &mc.params(0.0),
            self.eps_target,
            &grid,
            self.optimize_np,
        )?;

        let mut columns = vec!["eps_target"];
        columns.extend_from_slice(&FBL_COLUMNS);
        columns.push("achieved");
        let mut rep = Report::new(columns);
        for (i, (db, est)) in search.evaluated.iter().enumerate() {
            let mut row = vec![Cell::F(self.eps_target)];
            row.extend(fbl_row(&template, *db, est, mc.seed));
            row.push(Cell::B(search.achieved == Some(i)));
            rep.push(row);
        }
        if search.achieved.is_none() {
            eprintln!(
                "warning: eps target {} not achievable on the given SNR grid",
                self.eps_target
            );
        }
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct QueueOpts {
    /// Per-channel-use arrival probability
    #[arg(long)]
    lambda: Option<f64>,
    /// Frame length in channel uses
    #[arg(long)]
    n: Option<u32>,
    /// Single-transmission packet error probability
    #[arg(long)]
    eps: Option<f64>,
}

impl QueueOpts {
    fn resolve(&self, f: &QueueSection) -> Result<QueueParams> {
        QueueParams::new(
            require(self.lambda, f.lambda, "lambda", "queue.lambda")?,
            require(self.n, f.n, "n", "queue.n")?,
            require(self.eps, f.eps, "eps", "queue.eps")?,
        )
    }
}

const AOI_COLUMNS: [&str; 6] = ["lambda", "n", "eps", "a", "p_av_analytic", "p_av_limit"];

fn aoi_row(qp: &QueueParams, a: f64) -> Result<Vec<Cell>> {
    Ok(vec![
        Cell::F(qp.lambda),
        Cell::U(u64::from(qp.n)),
        Cell::F(qp.eps),
        Cell::F(a),
        Cell::F(violation_probability(qp, a)?),
        Cell::F(limiting_violation(qp.eps, qp.n, a)?),
    ])
}

#[derive(Debug, Args)]
struct AoiCmd {
    #[command(flatten)]
    queue: QueueOpts,
    /// Peak-age threshold in channel uses
    #[arg(long)]
    a: f64,
    #[command(flatten)]
    common: CommonOpts,
}

impl AoiCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let qp = self.queue.resolve(&file.queue)?;
        let mut rep = Report::new(AOI_COLUMNS.to_vec());
        rep.push(aoi_row(&qp, self.a)?);
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct AoiSweepCmd {
    /// Arrival-rate grid (from:to:step, log:from:to:count, or a list)
    #[arg(long)]
    lambdas: String,
    /// Frame length in channel uses
    #[arg(long)]
    n: Option<u32>,
    /// Single-transmission packet error probability
    #[arg(long)]
    eps: Option<f64>,
    /// Peak-age threshold in channel uses
    #[arg(long)]
    a: f64,
    /// Append an empirical estimate from the queue simulator
    #[arg(long)]
    simulate: bool,
    /// Deliveries per simulated point (with --simulate)
    #[arg(long, default_value_t = 1_000_000)]
    deliveries: u64,
    /// Simulator seed (with --simulate)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: CommonOpts,
}

impl AoiSweepCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let n = require(self.n, file.queue.n, "n", "queue.n")?;
        let eps = require(self.eps, file.queue.eps, "eps", "queue.eps")?;
        let mut lambdas = parse_grid(&self.lambdas)?;
        lambdas.sort_by(f64::total_cmp);

        let mut columns = AOI_COLUMNS.to_vec();
        if self.simulate {
            columns.extend_from_slice(&["p_av_sim", "p_av_sim_se", "sim_deliveries", "sim_seed"]);
        }
        let mut rep = Report::new(columns);
        for &lambda in &lambdas {
            let qp = QueueParams::new(lambda, n, eps)?;
            let mut row = aoi_row(&qp, self.a)?;
            if self.simulate {
                let res = run_sim(&SimConfig {
                    qp,
                    n_deliveries: self.deliveries,
                    seed: self.seed,
                    granularity: ArrivalGranularity::Frame,
                })?;
                let (p, se) = empirical_violation(&res, self.a, n)?;
                row.push(Cell::F(p));
                row.push(Cell::F(se));
                row.push(Cell::U(self.deliveries));
                row.push(Cell::U(self.seed));
            }
            rep.push(row);
        }
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct LimitCmd {
    /// Single-transmission packet error probability
    #[arg(long)]
    eps: f64,
    /// Frame length in channel uses
    #[arg(long)]
    n: u32,
    /// Peak-age threshold in channel uses
    #[arg(long)]
    a: f64,
    #[command(flatten)]
    common: CommonOpts,
}

impl LimitCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let mut rep = Report::new(vec!["eps", "n", "a", "p_av_limit"]);
        rep.push(vec![
            Cell::F(self.eps),
            Cell::U(u64::from(self.n)),
            Cell::F(self.a),
            Cell::F(limiting_violation(self.eps, self.n, self.a)?),
        ]);
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct SimulateCmd {
    #[command(flatten)]
    queue: QueueOpts,
    /// Peak-age threshold in channel uses
    #[arg(long)]
    a: f64,
    /// Peak-age samples to record
    #[arg(long, default_value_t = 1_000_000)]
    deliveries: u64,
    /// Arrival draw granularity: frame or channel-use
    #[arg(long, default_value = "frame")]
    granularity: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: CommonOpts,
}

impl SimulateCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let qp = self.queue.resolve(&file.queue)?;
        let granularity = match self.granularity.as_str() {
            "frame" => ArrivalGranularity::Frame,
            "channel-use" => ArrivalGranularity::ChannelUse,
            other => {
                return Err(Error::Config(format!(
                    "granularity must be 'frame' or 'channel-use' (got '{other}')"
                )))
            }
        };
        let cfg = SimConfig {
            qp,
            n_deliveries: self.deliveries,
            seed: self.seed,
            granularity,
        };
        let res = run_sim(&cfg)?;
        let (p, se) = empirical_violation(&res, self.a, qp.n)?;
        let mut rep = Report::new(vec![
            "lambda",
            "n",
            "eps",
            "a",
            "n_deliveries",
            "granularity",
            "seed",
            "delivered",
            "preempted",
            "frames_elapsed",
            "mean_age",
            "preempt_frac",
            "p_av_empirical",
            "p_av_se",
            "p_av_analytic",
        ]);
        rep.push(vec![
            Cell::F(qp.lambda),
            Cell::U(u64::from(qp.n)),
            Cell::F(qp.eps),
            Cell::F(self.a),
            Cell::U(self.deliveries),
            Cell::S(self.granularity.clone()),
            Cell::U(self.seed),
            Cell::U(res.delivered),
            Cell::U(res.preempted),
            Cell::U(res.frames_elapsed),
            Cell::F(res.mean_age()),
            Cell::F(res.preemption_fraction()),
            Cell::F(p),
            Cell::F(se),
            Cell::F(violation_probability(&qp, self.a)?),
        ]);
        self.common.emit(&file, &rep)
    }
}

#[derive(Debug, Args)]
struct TablesCmd {
    /// Packet-error target for eps_mean + 2 std_err
    #[arg(long)]
    eps_target: f64,
    /// Ascending SNR grid in dB
    #[arg(long, default_value = "-6:3:0.25", allow_hyphen_values = true)]
    rho_grid: String,
    /// Diversity scenarios as ELLxNC pairs
    #[arg(long, default_value = "2x50,5x20,20x5")]
    scenarios: String,
    /// Antenna configurations as MTxMR pairs
    #[arg(long, default_value = "1x1,1x2,2x1,2x2")]
    antennas: String,
    #[command(flatten)]
    code: CodeOpts,
    #[command(flatten)]
    mc: McOpts,
    #[command(flatten)]
    common: CommonOpts,
}

impl TablesCmd {
    fn run(self) -> Result<()> {
        let file = self.common.file()?;
        let mc = self.mc.resolve(&file.mc);
        let grid = parse_grid(&self.rho_grid)?;
        let scenarios = parse_scenarios(&self.scenarios)?;
        let antennas = parse_antennas(&self.antennas)?;

        let mut columns = vec!["eps_target", "status"];
        columns.extend_from_slice(&FBL_COLUMNS);
        let mut rep = Report::new(columns);
        for &(ell, n_c) in &scenarios {
            for &(m_t, m_r) in &antennas {
                let template = ChannelConfig {
                    m_t,
                    m_r,
                    ell,
                    n_c,
                    n_p: m_t,
                    rho: 1.0,
                    pilot_mode: PilotMode::Equivalent,
                };
                template.validate()?;
                let code = self.code.resolve(&file.code, ell * n_c)?;
                let search = min_snr_for_target(
                    &template,
                    &code,
                    &mc.params(0.0),
                    self.eps_target,
                    &grid,
                    true,
                )?;
                let (status, db, est) = match search.best() {
                    Some((db, est)) => ("ok", *db, *est),
                    None => {
                        let (db, est) = search.evaluated.last().expect("grid validated nonempty");
                        ("not_achievable_on_grid", *db, *est)
                    }
                };
                let ch = ChannelConfig {
                    rho: snr_db_to_linear(db),
                    n_p: est.n_p,
                    ..template
                };
                let mut row = vec![Cell::F(self.eps_target), Cell::S(status.into())];
                row.extend(fbl_row(&ch, db, &est, mc.seed));
                rep.push(row);
            }
        }
        self.common.emit(&file, &rep)
    }
}
