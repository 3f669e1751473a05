//! Command-line front end. Each subcommand is a thin shell over one library operation.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimate::MonteCarloEstimate;
use crate::extension::{build_extension, lipschitz_ratio_scan, DEFAULT_MC_ROUNDS};
use crate::geometry::{cone_volume, iq, iq_closed_form, maxproj, mean_width_dual, psi, volume_exact, volume_mc};
use crate::optimize::DEFAULT_RESTARTS;
use crate::partition::lw::{deterministic_partition_bound_check, exhaustive_grid_check, loomis_whitney_boundary};
use crate::partition::{padding_prob_exact, padding_prob_mc, separation_prob_exact, separation_prob_mc_with, Proposal};
use crate::rng::with_workers;
use crate::sepmod::sweep::{read_csv, slopes, to_json, write_csv};
use crate::sepmod::{companion_space, sep_lower_evr_estimate, sep_upper_two_norm, sweep, SweepConfig, SweepRecord};
use crate::space::decompose::loglacunary_decompose;
use crate::space::{NormedSpace, SpaceDescriptor};

#[derive(Debug, Parser)]
#[command(name = "normpart", version, about = "Random partitions and convex geometry of finite-dimensional normed spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed, echoed in every output.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Also write the result to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Window,
    Relevant,
    Auto,
}

impl From<Mode> for Proposal {
    fn from(m: Mode) -> Proposal {
        match m {
            Mode::Window => Proposal::Window,
            Mode::Relevant => Proposal::Relevant,
            Mode::Auto => Proposal::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpaceArg {
    /// Space descriptor as JSON.
    #[arg(long)]
    pub space: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of the unit ball (exact when available, else Monte Carlo).
    Vol {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 1_000_000)]
        trials: usize,
        /// Force the Monte Carlo path.
        #[arg(long)]
        mc: bool,
    },
    /// Isoperimetric quotient of the unit ball.
    Iq {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long)]
        mc: bool,
    },
    /// Polar projection body norm ψ(w).
    Psi {
        #[command(flatten)]
        space: SpaceArg,
        /// Direction as a JSON array.
        #[arg(long)]
        w: String,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Largest hyperplane projection of the unit ball.
    Maxproj {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Volume of the cone over a boundary point (z is rescaled onto the unit sphere).
    Cone {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Mean of the norm over the Euclidean sphere.
    Meanwidth {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Probability that the partition separates u and v.
    SepProb {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Use the closed form in the overlap fraction.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Probability that the ρ-scaled ball around a point stays in its cluster.
    PadProb {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Lower and upper bounds on the separation modulus.
    SepBounds {
        #[command(flatten)]
        space: SpaceArg,
        /// Second norm for the upper bound; defaults to the companion space.
        #[arg(long)]
        space_y: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Dimension sweep from a JSON config (inline or a file path).
    Sweep {
        #[arg(long)]
        config: String,
    },
    /// Lipschitz extension from anchors given as JSON {space, anchors, values, target?}.
    Extend {
        /// Inline JSON or a file path (.json or .csv; CSV needs --space and --value-dim).
        #[arg(long)]
        input: String,
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        value_dim: Option<usize>,
        /// Evaluation points as a JSON array of arrays.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MC_ROUNDS)]
        mc_rounds: usize,
        /// Number of random pairs for the Lipschitz-ratio scan (0 skips it).
        #[arg(long, default_value_t = 0)]
        pairs: usize,
    },
    /// Discrete Loomis–Whitney checks.
    LwCheck {
        /// Finite subset of ℤⁿ as a JSON array of integer arrays.
        #[arg(long)]
        set: Option<String>,
        /// Partition labels for --set (enables the cut inequality with --m).
        #[arg(long)]
        labels: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        /// Exhaustive check on {0..grid-1}ⁿ over parts of size ≤ max-part.
        #[arg(long)]
        grid: Option<i64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        max_part: usize,
    },
    /// Log-lacunary factorization n = n_1⋯n_k + m.
    Decompose {
        #[arg(long)]
        n: u64,
    },
}

/// One output row.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub quantity: String,
    pub value: Value,
    pub stderr: Option<f64>,
}

impl Row {
    fn num(q: &str, v: f64) -> Row {
        Row {
            quantity: q.into(),
            value: json!(v),
            stderr: None,
        }
    }

    fn est(q: &str, e: MonteCarloEstimate) -> Row {
        Row {
            quantity: q.into(),
            value: json!(e.value),
            stderr: Some(e.stderr),
        }
    }

    fn text(q: &str, v: impl Into<Value>) -> Row {
        Row {
            quantity: q.into(),
            value: v.into(),
            stderr: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Report {
    Rows { command: String, seed: u64, rows: Vec<Row> },
    Sweep { seed: u64, records: Vec<SweepRecord> },
}

fn parse_space(s: &str) -> Result<NormedSpace> {
    NormedSpace::from_json(s)
}

fn parse_vec<T: serde::de::DeserializeOwned>(s: &str, path: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::input(path, e.to_string()))
}

fn inline_or_file(s: &str) -> Result<String> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(s.to_string());
    }
    std::fs::read_to_string(s).map_err(|e| Error::input(s, e.to_string()))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtendInput {
    space: Value,
    anchors: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    #[serde(default)]
    target: Option<Value>,
}

fn extend_input(input: &str, space: Option<&str>, value_dim: Option<usize>) -> Result<(NormedSpace, Vec<Vec<f64>>, Vec<Vec<f64>>, Option<SpaceDescriptor>)> {
    if input.ends_with(".csv") {
        let space = parse_space(space.ok_or_else(|| Error::input("/space", "CSV input needs --space"))?)?;
        let k = value_dim.ok_or_else(|| Error::input("/value_dim", "CSV input needs --value-dim"))?;
        let n = space.dim();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(input)
            .map_err(|e| Error::input(input, e.to_string()))?;
        let (mut anchors, mut values) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::input(format!("/{i}"), e.to_string()))?;
            let row: Vec<f64> = rec
                .iter()
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::input(format!("/{i}"), e.to_string()))?;
            if row.len() != n + k {
                return Err(Error::input(format!("/{i}"), format!("expected {} columns, got {}", n + k, row.len())));
            }
            anchors.push(row[..n].to_vec());
            values.push(row[n..].to_vec());
        }
        return Ok((space, anchors, values, None));
    }
    let text = inline_or_file(input)?;
    let v: ExtendInput = serde_json::from_str(&text).map_err(|e| Error::input("/", e.to_string()))?;
    let space = NormedSpace::new(SpaceDescriptor::from_value(&v.space).map_err(|e| prefix(e, "/space"))?)?;
    let target = match v.target {
        Some(t) => Some(SpaceDescriptor::from_value(&t).map_err(|e| prefix(e, "/target"))?),
        None => None,
    };
    Ok((space, v.anchors, v.values, target))
}

fn prefix(e: Error, p: &str) -> Error {
    match e {
        Error::Input { path, msg } => Error::input(format!("{p}{path}"), msg),
        other => other,
    }
}

/// Run the parsed command.
pub fn execute(cli: &Cli) -> Result<Report> {
    let seed = cli.common.seed.unwrap_or(0);
    let rows = |command: &str, rows: Vec<Row>| Report::Rows {
        command: command.into(),
        seed,
        rows,
    };
    Ok(match &cli.command {
        Command::Vol { space, trials, mc } => {
            let s = parse_space(&space.space)?;
            let caps = s.capabilities();
            if caps.has_exact_volume && !mc {
                rows("vol", vec![Row::num("volume", volume_exact(&s)?)])
            } else {
                rows("vol", vec![Row::est("volume", volume_mc(&s, *trials, seed, false)?)])
            }
        }
        Command::Iq { space, trials, mc } => {
            let s = parse_space(&space.space)?;
            match iq_closed_form(&s).filter(|_| !mc) {
                Some(v) => rows("iq", vec![Row::num("iq", v)]),
                None => rows("iq", vec![Row::est("iq", iq(&s, *trials, seed)?)]),
            }
        }
        Command::Psi { space, w, trials } => {
            let s = parse_space(&space.space)?;
            let w: Vec<f64> = parse_vec(w, "/w")?;
            rows("psi", vec![Row::est("psi", psi(&s, &w, *trials, seed)?)])
        }
        Command::Maxproj { space, restarts, trials } => {
            let s = parse_space(&space.space)?;
            let m = maxproj(&s, *restarts, *trials, seed)?;
            rows(
                "maxproj",
                vec![
                    Row::est("maxproj", m.value),
                    Row::text("direction", json!(m.direction)),
                    Row::num("restart_dispersion", m.dispersion),
                    Row::text("heuristic", m.heuristic),
                ],
            )
        }
        Command::Cone { space, z, trials } => {
            let s = parse_space(&space.space)?;
            let z: Vec<f64> = parse_vec(z, "/z")?;
            let nz = s.norm_eval(&z)?;
            if nz == 0.0 {
                return Err(Error::input("/z", "z must be nonzero"));
            }
            let z: Vec<f64> = z.iter().map(|v| v / nz).collect();
            let c = cone_volume(&s, &z, *trials, seed)?;
            rows(
                "cone",
                vec![
                    Row::est("cone_volume", c.volume),
                    Row::est("cone_fraction", c.fraction),
                    Row::text("z", json!(z)),
                ],
            )
        }
        Command::Meanwidth { space, trials } => {
            let s = parse_space(&space.space)?;
            rows("meanwidth", vec![Row::est("mean_width", mean_width_dual(&s, *trials, seed))])
        }
        Command::SepProb {
            space,
            u,
            v,
            delta,
            trials,
            exact,
            mode,
        } => {
            let s = parse_space(&space.space)?;
            let u: Vec<f64> = parse_vec(u, "/u")?;
            let v: Vec<f64> = parse_vec(v, "/v")?;
            let e = if *exact {
                separation_prob_exact(&s, &u, &v, *delta, *trials, seed)?
            } else {
                separation_prob_mc_with(&s, &u, &v, *delta, *trials, seed, (*mode).into())?
            };
            rows("sep-prob", vec![Row::est("sep_prob", e)])
        }
        Command::PadProb {
            space,
            rho,
            delta,
            trials,
            exact,
            mode,
        } => {
            let s = parse_space(&space.space)?;
            if *exact {
                rows("pad-prob", vec![Row::num("pad_prob", padding_prob_exact(&s, *rho)?)])
            } else {
                let p = padding_prob_mc(&s, *rho, *delta, *trials, seed, (*mode).into())?;
                rows(
                    "pad-prob",
                    vec![
                        Row::est("pad_prob", p.estimate),
                        Row::text("proposal_mode", serde_json::to_value(p.mode).expect("mode")),
                    ],
                )
            }
        }
        Command::SepBounds {
            space,
            space_y,
            restarts,
            trials,
        } => {
            let x = parse_space(&space.space)?;
            let mut out = Vec::new();
            let lower = sep_lower_evr_estimate(&x, *trials, seed)?;
            out.push(Row::est("sep_lower_evr", lower.value));
            let y = match space_y {
                Some(d) => parse_space(d).map_err(|e| prefix(e, "/space_y"))?,
                None => {
                    let c = companion_space(&x)?;
                    out.push(Row::text("companion", serde_json::to_value(&c.descriptor).expect("descriptor")));
                    out.push(Row::num("companion_lower", c.lower));
                    out.push(Row::num("companion_upper", c.upper));
                    c.space()
                }
            };
            let up = sep_upper_two_norm(&x, &y, *restarts, *trials, seed)?;
            out.push(Row::est("sep_upper_two_norm", up.value));
            out.push(Row::num("scale", up.scale));
            out.push(Row::num("restart_dispersion", up.dispersion));
            out.push(Row::text("heuristic", up.heuristic));
            rows("sep-bounds", out)
        }
        Command::Sweep { config } => {
            let mut c = SweepConfig::from_json(&inline_or_file(config)?)?;
            if let Some(s) = cli.common.seed {
                c.seed = s;
            }
            Report::Sweep {
                seed: c.seed,
                records: sweep(&c)?,
            }
        }
        Command::Extend {
            input,
            space,
            value_dim,
            points,
            mc_rounds,
            pairs,
        } => {
            let (s, anchors, values, target) = extend_input(input, space.as_deref(), *value_dim)?;
            let op = build_extension(&s, &anchors, &values, target, *mc_rounds, seed)?;
            let mut out = vec![Row::text("anchors", op.anchors().len() as u64)];
            let (k0, k1) = op.scale_range();
            out.push(Row::text("scale_range", json!([k0.max(-1074), k1])));
            for w in &op.warnings {
                out.push(Row::text("warning", w.clone()));
            }
            if let Some(p) = points {
                let pts: Vec<Vec<f64>> = parse_vec(p, "/points")?;
                for (i, x) in pts.iter().enumerate() {
                    let e = op.evaluate(x).map_err(|e| prefix(e, &format!("/points/{i}")))?;
                    out.push(Row {
                        quantity: format!("F[{i}]"),
                        value: json!(e.value),
                        stderr: Some(e.stderr),
                    });
                }
            }
            if *pairs > 0 {
                let scan = lipschitz_ratio_scan(&op, *pairs, seed)?;
                out.push(Row::num("lipschitz_ratio", scan.max_ratio));
                out.push(Row::text("argmax_pair", json!([scan.x, scan.y])));
            }
            rows("extend", out)
        }
        Command::LwCheck {
            set,
            labels,
            m,
            grid,
            n,
            max_part,
        } => {
            let mut out = Vec::new();
            if let Some(set) = set {
                let pts: Vec<Vec<i64>> = parse_vec(set, "/set")?;
                let c = loomis_whitney_boundary(&pts)?;
                out.push(Row::num("boundary", c.boundary));
                out.push(Row::num("bound", c.bound));
                out.push(Row::text("holds", c.holds));
                if let Some(l) = labels {
                    let l: Vec<usize> = parse_vec(l, "/labels")?;
                    let m = m.ok_or_else(|| Error::input("/m", "--labels needs --m"))?;
                    let c = deterministic_partition_bound_check(&pts, &l, m)?;
                    out.push(Row::num("cut", c.cut));
                    out.push(Row::num("cut_bound", c.bound));
                    out.push(Row::text("cut_holds", c.holds));
                }
            }
            if let Some(side) = grid {
                if *side < 1 || *n == 0 || (*side as f64).powi(*n as i32) > 12.0 {
                    return Err(Error::input("/grid", "exhaustive checks are limited to grids of at most 12 points"));
                }
                let r = exhaustive_grid_check(*side, *n, *max_part)?;
                out.push(Row::text("partitions", r.partitions as u64));
                out.push(Row::text("violations", r.violations as u64));
                out.push(Row::num("min_slack", r.min_slack));
            }
            if out.is_empty() {
                return Err(Error::input("/set", "give --set or --grid"));
            }
            rows("lw-check", out)
        }
        Command::Decompose { n } => {
            let d = loglacunary_decompose(*n)?;
            rows(
                "decompose",
                vec![Row::text("factors", json!(d.factors)), Row::text("remainder", d.remainder)],
            )
        }
    })
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-6 && v.abs() < 1e12) {
        let s = format!("{v:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{v:.10e}")
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_num(n.as_f64().expect("f64")),
        Value::Array(a) => a.iter().map(fmt_value).collect::<Vec<_>>().join(","),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Render a report. Identical reports render to identical bytes.
pub fn render(report: &Report, format: Format) -> Result<String> {
    match report {
        Report::Rows { command, seed, rows } => Ok(match format {
            Format::Table => {
                let w = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(0).max(8);
                let mut s = format!("# command: {command}\n# seed: {seed}\n");
                for r in rows {
                    let err = r.stderr.map(|e| format!("  ± {}", fmt_num(e))).unwrap_or_default();
                    s.push_str(&format!("{:<w$}  {}{}\n", r.quantity, fmt_value(&r.value), err));
                }
                s
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&json!({"command": command, "seed": seed, "rows": rows}))
                    .expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["quantity", "value", "stderr", "seed"]).expect("csv");
                for r in rows {
                    let v = match &r.value {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    let e = r.stderr.map(|e| e.to_string()).unwrap_or_default();
                    w.write_record([r.quantity.as_str(), &v, &e, &seed.to_string()]).expect("csv");
                }
                String::from_utf8(w.into_inner().expect("csv")).expect("utf8")
            }
        }),
        Report::Sweep { seed, records } => Ok(match format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_csv(records, &mut buf)?;
                String::from_utf8(buf).expect("utf8")
            }
            Format::Json => to_json(records) + "\n",
            Format::Table => {
                let mut s = format!("# command: sweep\n# seed: {seed}\n");
                s.push_str(&format!(
                    "{:<9} {:>5} {:>8} {:>14} {:>16} {:>12} {:>12} {:>12}\n",
                    "kind", "n", "p", "quantity", "value", "stderr", "lower", "upper"
                ));
                for r in records {
                    s.push_str(&format!(
                        "{:<9} {:>5} {:>8} {:>14} {:>16} {:>12} {:>12} {:>12}\n",
                        r.kind,
                        r.n,
                        r.p.map(|p| p.to_string()).unwrap_or_default(),
                        r.quantity,
                        fmt_num(r.value),
                        fmt_num(r.stderr),
                        opt(r.lower),
                        opt(r.upper)
                    ));
                }
                for (q, sl) in slopes(records) {
                    s.push_str(&format!("# slope {q}: {}\n", fmt_num(sl)));
                }
                s
            }
        }),
    }
}

/// Parse CSV produced by `sweep --format csv`.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    read_csv(text.as_bytes())
}

/// Output of a complete invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse arguments, run, and render. Nothing is printed.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let workers = cli.common.workers;
    let result = with_workers(workers, || execute(&cli));
    let fail = |e: Error| Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let mut stderr = String::new();
    if let (Report::Sweep { records, .. }, Format::Csv | Format::Json) = (&report, cli.common.format) {
        for (q, s) in slopes(records) {
            stderr.push_str(&format!("# slope {q}: {}\n", fmt_num(s)));
        }
    }
    let stdout = match &cli.common.out {
        Some(path) => {
            let file = match render(&report, cli.common.format) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            if let Err(e) = std::fs::File::create(path).and_then(|mut f| f.write_all(file.as_bytes())) {
                return fail(Error::input("/out", e.to_string()));
            }
            render(&report, Format::Table)
        }
        None => render(&report, cli.common.format),
    };
    match stdout {
        Ok(stdout) => Outcome { code: 0, stdout, stderr },
        Err(e) => fail(e),
    }
}
