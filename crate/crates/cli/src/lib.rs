//! Command-line front end for `bosonic-converse`.
//!
//! Every subcommand renders its result with the encoders in [`bosonic_converse::io`],
//! so output is byte-identical to the corresponding library call.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use bosonic_converse::channels::ChannelParams;
use bosonic_converse::converse::{
    chernoff_tail, concentration_tail, concentration_tail_mc, corollary_bound, optimize_bound,
    rate_sweep, theorem1_bound, BoundInputs, BoundReport, SlackModel, SlackParams,
};
use bosonic_converse::entropy::{
    check_renyi_smoothing, moe_scan_orders, renyi, smooth_min_entropy, MoeScan, Spectrum,
};
use bosonic_converse::fock::{channel_kernel, coherent_occupation_deficit};
use bosonic_converse::io::{self, fmt_f64, json_f64};
use bosonic_converse::special::ceil_tolerant;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

/// Environment variable naming the directory for relative `--output` paths.
pub const OUT_DIR_ENV: &str = "BOSONIC_CONVERSE_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] bosonic_converse::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Library(e) if e.is_numeric_budget() => EXIT_NUMERIC,
            CliError::Library(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "bosonic-converse", version, about = "Capacities, Fock kernels and strong-converse bounds for phase-insensitive bosonic Gaussian channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum BoundChoice {
    /// Rényi-entropy form at the given alpha and eps.
    Theorem,
    /// Continuity form at the given delta4 and delta5.
    Corollary,
    /// Grid-optimized minimum of both forms.
    #[default]
    Optimized,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ChannelArgs {
    /// Thermal channel `eta,N_B`.
    #[arg(long, value_name = "ETA,NB")]
    pub thermal: Option<String>,
    /// Amplifier `G,N`.
    #[arg(long, value_name = "G,N")]
    pub amplifier: Option<String>,
    /// Additive-noise channel with mean noise photons `nbar`.
    #[arg(long, value_name = "NBAR")]
    pub additive: Option<String>,
    /// Pure-loss channel with transmissivity `eta`.
    #[arg(long, value_name = "ETA")]
    pub loss: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; relative paths resolve against $BOSONIC_CONVERSE_OUT_DIR when set.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity g(N'_S) - g(N'_B) and output photon numbers.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        ns: f64,
        /// Also report the weak-converse rate limit at this error probability.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Loss/amplifier decomposition (T, G).
    Decompose {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Photon-number transition kernel p(l|k).
    Kernel {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        k_max: usize,
        #[arg(long)]
        l_max: usize,
        /// Largest tail mass accepted on any row.
        #[arg(long, default_value_t = f64::INFINITY)]
        tail_budget: f64,
        /// Write a matplotlib script plotting the kernel (requires --output).
        #[arg(long)]
        plot_script: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Success-probability bound at a single (n, R).
    Bound {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        ns: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        rate: f64,
        #[arg(long, value_enum, default_value_t = BoundChoice::Optimized)]
        form: BoundChoice,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta1: f64,
        #[arg(long, default_value_t = 0.01)]
        delta2: f64,
        #[arg(long, default_value_t = 0.0)]
        delta3: f64,
        #[arg(long, default_value_t = 0.01)]
        delta4: f64,
        #[arg(long, default_value_t = 0.01)]
        delta5: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimized bound over a grid of block lengths and rates.
    Sweep {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        ns: f64,
        /// Comma-separated block lengths.
        #[arg(long)]
        n: String,
        /// `start:stop:step` (stop exclusive) or a comma-separated list.
        #[arg(long)]
        rates: String,
        /// `VALUE`, `exp:C,GAMMA`, or `coherent:MEAN` (measured occupation deficit).
        #[arg(long, default_value = "0")]
        delta1: String,
        /// `VALUE`, `exp:C,GAMMA`, or `iid:LEVEL,DELTA2` (measured concentration tail).
        #[arg(long, default_value = "0")]
        delta3: String,
        /// Write a matplotlib script plotting the sweep (requires --output).
        #[arg(long)]
        plot_script: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Minimum output Rényi entropy over random pure states.
    Moe {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Comma-separated orders (> 1).
        #[arg(long, default_value = "2")]
        alpha: String,
        /// Input Fock cutoff.
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tail of the total output photon number for an input profile.
    Concentration {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Comma-separated input photon numbers a_1..a_n.
        #[arg(long, conflicts_with_all = ["level", "modes"])]
        profile: Option<String>,
        /// i.i.d. input photon number (with --modes).
        #[arg(long, requires = "modes")]
        level: Option<u64>,
        #[arg(long, requires = "level")]
        modes: Option<usize>,
        #[arg(long)]
        delta2: f64,
        #[arg(long, default_value_t = 1e-12)]
        tail_budget: f64,
        /// Also estimate the tail from this many Monte Carlo draws (requires --seed).
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Smooth min-entropy against its Rényi lower bound.
    SmoothCheck {
        /// Comma-separated probabilities; any missing mass is an unresolved tail.
        #[arg(long)]
        spectrum: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn parse_floats(flag: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("--{flag}: cannot parse '{p}' as a number")))
        })
        .collect()
}

fn parse_fixed<const N: usize>(flag: &str, s: &str) -> Result<[f64; N]> {
    let v = parse_floats(flag, s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| usage(format!("--{flag} takes {N} value(s), got {}", v.len())))
}

pub fn parse_channel(args: &ChannelArgs) -> Result<ChannelParams> {
    let ch = if let Some(s) = &args.thermal {
        let [eta, nb] = parse_fixed::<2>("thermal", s)?;
        ChannelParams::thermal(eta, nb)
    } else if let Some(s) = &args.amplifier {
        let [gain, n] = parse_fixed::<2>("amplifier", s)?;
        ChannelParams::amplifier(gain, n)
    } else if let Some(s) = &args.additive {
        let [nbar] = parse_fixed::<1>("additive", s)?;
        ChannelParams::additive(nbar)
    } else if let Some(s) = &args.loss {
        let [eta] = parse_fixed::<1>("loss", s)?;
        ChannelParams::pure_loss(eta)
    } else {
        return Err(usage("exactly one of --thermal, --amplifier, --additive, --loss is required"));
    };
    Ok(ch?)
}

/// `start:stop:step` with `stop` excluded, or a comma-separated list.
pub fn parse_rates(s: &str) -> Result<Vec<f64>> {
    if !s.contains(':') {
        return parse_floats("rates", s);
    }
    let [start, stop, step] = {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!("--rates: expected start:stop:step, got '{s}'")));
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| usage(format!("--rates: cannot parse '{p}'"))))
            .collect::<Result<_>>()?;
        [v[0], v[1], v[2]]
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(usage(format!("--rates: need finite bounds and positive step in '{s}'")));
    }
    let rates: Vec<f64> = (0..)
        .map(|i| start + step * i as f64)
        .take_while(|&r| r < stop - 1e-9 * step)
        .collect();
    if rates.is_empty() {
        return Err(usage(format!("--rates: '{s}' is empty")));
    }
    Ok(rates)
}

pub fn parse_block_lengths(s: &str) -> Result<Vec<u64>> {
    let v: Vec<u64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| usage(format!("--n: '{p}' is not a positive integer")))
        })
        .collect::<Result<_>>()?;
    Ok(v)
}

/// Parses a `--delta1`/`--delta3` model for the given block lengths.
pub fn parse_slack_model(
    flag: &str,
    s: &str,
    ch: &ChannelParams,
    ns: f64,
    ns_list: &[u64],
) -> Result<SlackModel> {
    if let Some(rest) = s.strip_prefix("exp:") {
        let [c, gamma] = parse_fixed::<2>(flag, rest)?;
        return Ok(SlackModel::Exponential { c, gamma });
    }
    if let Some(rest) = s.strip_prefix("coherent:") {
        if flag != "delta1" {
            return Err(usage(format!("--{flag}: 'coherent:' applies to --delta1 only")));
        }
        let [mean] = parse_fixed::<1>(flag, rest)?;
        let mut m = BTreeMap::new();
        for &n in ns_list {
            let cap = ceil_tolerant(n as f64 * ns);
            m.insert(n, coherent_occupation_deficit(mean, n, cap)?);
        }
        return Ok(SlackModel::Measured(m));
    }
    if let Some(rest) = s.strip_prefix("iid:") {
        if flag != "delta3" {
            return Err(usage(format!("--{flag}: 'iid:' applies to --delta3 only")));
        }
        let [level, delta2] = parse_fixed::<2>(flag, rest)?;
        if !(level >= 0.0) || level.fract() != 0.0 {
            return Err(usage(format!("--{flag}: level must be a nonnegative integer")));
        }
        let mut m = BTreeMap::new();
        for &n in ns_list {
            let t = concentration_tail(ch, &vec![level as u64; n as usize], delta2, 1e-12)?;
            m.insert(n, (t.probability + t.truncation_error).min(1.0));
        }
        return Ok(SlackModel::Measured(m));
    }
    let [c] = parse_fixed::<1>(flag, s)?;
    Ok(SlackModel::Constant(c))
}

/// Rendered output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub plot_script: Option<String>,
}

impl Rendered {
    fn text(body: String) -> Self {
        Rendered {
            body,
            plot_script: None,
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn scalars(format: Format, entries: &[(&str, f64)]) -> String {
    match format {
        Format::Csv => io::scalars_csv(entries),
        Format::Json => json_text(&io::scalars_json(entries)),
    }
}

pub fn render_capacity(ch: &ChannelParams, ns: f64, eps: Option<f64>, format: Format) -> Result<String> {
    let out = ch.output_photon_numbers(ns)?;
    let mut entries = vec![
        ("capacity", ch.capacity(ns)?),
        ("signal_photons", out.signal),
        ("noise_photons", out.noise),
    ];
    if let Some(e) = eps {
        entries.push(("weak_converse_rate_bound", ch.weak_converse_rate_bound(ns, e)?));
    }
    Ok(scalars(format, &entries))
}

pub fn render_decompose(ch: &ChannelParams, format: Format) -> String {
    let d = ch.decompose();
    scalars(
        format,
        &[
            ("tau", ch.tau()),
            ("nu", ch.nu()),
            ("transmissivity", d.transmissivity),
            ("gain", d.gain),
            ("mu_squared", d.mu_squared()),
            ("squeezing", d.squeezing()),
            ("quantum_limited", if ch.is_quantum_limited() { 1.0 } else { 0.0 }),
        ],
    )
}

pub fn render_kernel(
    ch: &ChannelParams,
    k_max: usize,
    l_max: usize,
    tail_budget: f64,
    format: Format,
) -> Result<String> {
    let kern = channel_kernel(ch, k_max, l_max, tail_budget)?;
    Ok(match format {
        Format::Csv => io::kernel_csv(&kern),
        Format::Json => json_text(&io::kernel_json(&kern)),
    })
}

fn report_json(r: &BoundReport) -> Value {
    let map = |m: &BTreeMap<String, f64>| -> Value {
        Value::Object(m.iter().map(|(k, v)| (k.clone(), json_f64(*v))).collect())
    };
    json!({
        "form": r.form.to_string(),
        "n": r.n,
        "R": json_f64(r.rate),
        "bound": json_f64(r.bound),
        "clipped": json_f64(r.clipped()),
        "exponent": json_f64(r.exponent),
        "components": map(&r.components),
        "additive_terms": map(&r.additive_terms),
        "slack": {
            "delta1": json_f64(r.slack.delta1),
            "delta2": json_f64(r.slack.delta2),
            "delta3": json_f64(r.slack.delta3),
            "delta4": json_f64(r.slack.delta4),
            "delta5": json_f64(r.slack.delta5),
            "alpha": json_f64(r.slack.alpha),
            "eps": json_f64(r.slack.eps),
        },
    })
}

/// `name,value` rows: headline numbers, then `component.*`, `additive.*`, `slack.*`.
pub fn render_report(r: &BoundReport, format: Format) -> String {
    match format {
        Format::Json => json_text(&report_json(r)),
        Format::Csv => {
            let mut out = format!("name,value\nform,{}\n", r.form);
            let mut push = |k: &str, v: f64| out.push_str(&format!("{k},{}\n", fmt_f64(v)));
            push("n", r.n as f64);
            push("R", r.rate);
            push("bound", r.bound);
            push("clipped", r.clipped());
            push("exponent", r.exponent);
            for (k, v) in &r.components {
                push(&format!("component.{k}"), *v);
            }
            for (k, v) in &r.additive_terms {
                push(&format!("additive.{k}"), *v);
            }
            let s = &r.slack;
            for (k, v) in [
                ("delta1", s.delta1),
                ("delta2", s.delta2),
                ("delta3", s.delta3),
                ("delta4", s.delta4),
                ("delta5", s.delta5),
                ("alpha", s.alpha),
                ("eps", s.eps),
            ] {
                push(&format!("slack.{k}"), v);
            }
            out
        }
    }
}

pub fn render_moe(scans: &[MoeScan], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(
                "alpha,min_entropy,floor,margin,argmin,vacuum_weight,states_evaluated,output_dim\n",
            );
            for s in scans {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_f64(s.alpha),
                    fmt_f64(s.min_entropy),
                    fmt_f64(s.floor),
                    fmt_f64(s.margin()),
                    s.argmin.label,
                    fmt_f64(s.argmin.vacuum_weight),
                    s.states_evaluated,
                    s.output_dim
                ));
            }
            out
        }
        Format::Json => json_text(&Value::Array(
            scans
                .iter()
                .map(|s| {
                    json!({
                        "alpha": json_f64(s.alpha),
                        "min_entropy": json_f64(s.min_entropy),
                        "floor": json_f64(s.floor),
                        "margin": json_f64(s.margin()),
                        "argmin": s.argmin.label,
                        "vacuum_weight": json_f64(s.argmin.vacuum_weight),
                        "states_evaluated": s.states_evaluated,
                        "output_dim": s.output_dim,
                    })
                })
                .collect(),
        )),
    }
}

fn sweep_plot_script(data: &Path) -> String {
    format!(
        r#"import csv
from collections import defaultdict

import matplotlib.pyplot as plt

rows = defaultdict(list)
with open({path:?}) as f:
    for r in csv.DictReader(f):
        rows[int(r["n"])].append((float(r["R"]), min(float(r["bound"]), 1.0)))

fig, ax = plt.subplots()
for n, pts in sorted(rows.items()):
    pts.sort()
    ax.semilogy([p[0] for p in pts], [max(p[1], 1e-300) for p in pts], marker="o", label=f"n = {{n}}")
ax.set_xlabel("rate R (bits per mode)")
ax.set_ylabel("success-probability bound (clipped)")
ax.legend()
fig.savefig({png:?}, dpi=150)
"#,
        path = data.display().to_string(),
        png = data.with_extension("png").display().to_string(),
    )
}

fn kernel_plot_script(data: &Path) -> String {
    format!(
        r#"import csv

import matplotlib.pyplot as plt
import numpy as np

entries = []
with open({path:?}) as f:
    for r in csv.DictReader(f):
        if r["l"] != "tail":
            entries.append((int(r["k"]), int(r["l"]), float(r["p"])))
k_max = max(e[0] for e in entries)
l_max = max(e[1] for e in entries)
grid = np.zeros((k_max + 1, l_max + 1))
for k, l, p in entries:
    grid[k, l] = p

fig, ax = plt.subplots()
im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
ax.set_xlabel("output photons l")
ax.set_ylabel("input photons k")
fig.colorbar(im, label="p(l|k)")
fig.savefig({png:?}, dpi=150)
"#,
        path = data.display().to_string(),
        png = data.with_extension("png").display().to_string(),
    )
}

fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn plot_target(plot: &Option<PathBuf>, out: &OutputArgs) -> Result<Option<(PathBuf, PathBuf)>> {
    match (plot, &out.output) {
        (None, _) => Ok(None),
        (Some(_), None) => Err(usage("--plot-script requires --output for the data file")),
        (Some(_), Some(_)) if out.format != Format::Csv => {
            Err(usage("--plot-script reads CSV data; use --format csv"))
        }
        (Some(p), Some(o)) => Ok(Some((resolve_output(p), resolve_output(o)))),
    }
}

/// Evaluates a parsed command without touching the filesystem.
pub fn execute(cmd: &Command) -> Result<Rendered> {
    match cmd {
        Command::Capacity { channel, ns, eps, out } => {
            let ch = parse_channel(channel)?;
            Ok(Rendered::text(render_capacity(&ch, *ns, *eps, out.format)?))
        }
        Command::Decompose { channel, out } => {
            let ch = parse_channel(channel)?;
            Ok(Rendered::text(render_decompose(&ch, out.format)))
        }
        Command::Kernel {
            channel,
            k_max,
            l_max,
            tail_budget,
            plot_script,
            out,
        } => {
            let ch = parse_channel(channel)?;
            let target = plot_target(plot_script, out)?;
            let body = render_kernel(&ch, *k_max, *l_max, *tail_budget, out.format)?;
            Ok(Rendered {
                body,
                plot_script: target.map(|(_, data)| kernel_plot_script(&data)),
            })
        }
        Command::Bound {
            channel,
            ns,
            n,
            rate,
            form,
            alpha,
            eps,
            delta1,
            delta2,
            delta3,
            delta4,
            delta5,
            out,
        } => {
            let ch = parse_channel(channel)?;
            let report = match form {
                BoundChoice::Optimized => optimize_bound(&ch, *ns, *rate, *n, *delta1, *delta3)?.report,
                BoundChoice::Theorem | BoundChoice::Corollary => {
                    let inputs = BoundInputs {
                        channel: ch,
                        ns: *ns,
                        n: *n,
                        rate: *rate,
                        slack: SlackParams {
                            delta1: *delta1,
                            delta2: *delta2,
                            delta3: *delta3,
                            delta4: *delta4,
                            delta5: *delta5,
                            alpha: *alpha,
                            eps: *eps,
                        },
                    };
                    if *form == BoundChoice::Theorem {
                        theorem1_bound(&inputs)?
                    } else {
                        corollary_bound(&inputs)?
                    }
                }
            };
            Ok(Rendered::text(render_report(&report, out.format)))
        }
        Command::Sweep {
            channel,
            ns,
            n,
            rates,
            delta1,
            delta3,
            plot_script,
            out,
        } => {
            let ch = parse_channel(channel)?;
            let target = plot_target(plot_script, out)?;
            let n_list = parse_block_lengths(n)?;
            let rates = parse_rates(rates)?;
            let d1 = parse_slack_model("delta1", delta1, &ch, *ns, &n_list)?;
            let d3 = parse_slack_model("delta3", delta3, &ch, *ns, &n_list)?;
            let rows = rate_sweep(&ch, *ns, &n_list, &rates, &d1, &d3)?;
            let body = match out.format {
                Format::Csv => io::sweep_csv(&rows),
                Format::Json => json_text(&io::sweep_json(&rows)),
            };
            Ok(Rendered {
                body,
                plot_script: target.map(|(_, data)| sweep_plot_script(&data)),
            })
        }
        Command::Moe {
            channel,
            alpha,
            d,
            trials,
            seed,
            out,
        } => {
            let ch = parse_channel(channel)?;
            let alphas = parse_floats("alpha", alpha)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let scans = moe_scan_orders(&ch, &alphas, *d, *trials, &mut rng)?;
            Ok(Rendered::text(render_moe(&scans, out.format)))
        }
        Command::Concentration {
            channel,
            profile,
            level,
            modes,
            delta2,
            tail_budget,
            samples,
            seed,
            out,
        } => {
            let ch = parse_channel(channel)?;
            let profile: Vec<u64> = match (profile, level, modes) {
                (Some(p), _, _) => p
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u64>()
                            .map_err(|_| usage(format!("--profile: '{x}' is not a photon number")))
                    })
                    .collect::<Result<_>>()?,
                (None, Some(k), Some(m)) => vec![*k; *m],
                _ => return Err(usage("give --profile or both --level and --modes")),
            };
            let tail = concentration_tail(&ch, &profile, *delta2, *tail_budget)?;
            let mut entries = vec![
                ("threshold", tail.threshold),
                ("probability", tail.probability),
                ("truncation_error", tail.truncation_error),
            ];
            let chernoff = if tail.threshold > bosonic_converse::converse::profile_output_mean(&ch, &profile) {
                chernoff_tail(&ch, &profile, tail.threshold)?
            } else {
                0.0
            };
            entries.push(("chernoff_log2", chernoff));
            if let (Some(s), Some(seed)) = (samples, seed) {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                entries.push(("monte_carlo", concentration_tail_mc(&ch, &profile, *delta2, *s, &mut rng)?));
            }
            Ok(Rendered::text(scalars(out.format, &entries)))
        }
        Command::SmoothCheck {
            spectrum,
            eps,
            alpha,
            out,
        } => {
            let s = Spectrum::from_values(parse_floats("spectrum", spectrum)?)?;
            let check = check_renyi_smoothing(&s, *eps, *alpha)?;
            let entries = [
                ("smooth_min_entropy", smooth_min_entropy(&s, *eps)?),
                ("renyi", renyi(&s, *alpha)?),
                ("lhs", check.lhs),
                ("rhs", check.rhs),
                ("holds", if check.holds { 1.0 } else { 0.0 }),
            ];
            Ok(Rendered::text(scalars(out.format, &entries)))
        }
    }
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Capacity { out, .. }
        | Command::Decompose { out, .. }
        | Command::Kernel { out, .. }
        | Command::Bound { out, .. }
        | Command::Sweep { out, .. }
        | Command::Moe { out, .. }
        | Command::Concentration { out, .. }
        | Command::SmoothCheck { out, .. } => out,
    }
}

fn plot_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Kernel { plot_script, .. } | Command::Sweep { plot_script, .. } => plot_script.as_ref(),
        _ => None,
    }
}

fn run_command(cmd: &Command, stdout: &mut dyn Write) -> Result<()> {
    let rendered = execute(cmd)?;
    let out = output_args(cmd);
    match &out.output {
        Some(path) => write_file(&resolve_output(path), &rendered.body)?,
        None => stdout
            .write_all(rendered.body.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    if let (Some(script), Some(p)) = (&rendered.plot_script, plot_path(cmd)) {
        write_file(&resolve_output(p), script)?;
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run_command(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
