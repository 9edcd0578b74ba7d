//! `mixbench`: exact curves, coupling times, bounds and exact samples for
//! the adjacent-transposition, tiling, linear-extension and interchange
//! chains.

mod config;
mod svg;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mixbench::coupling::{
    cftp_samples, coalescence_stats, pairwise_coalescence_time, CouplingStats, DEFAULT_EPOCH_CAP, DEFAULT_STEP_CAP,
};
use mixbench::exact::{estimate_amplitudes, ExactChain};
use mixbench::kernels::{
    HexKernel, Kernel, KkKernel, Monotone, PathKernel, PermKernel, SweepKernel, SweepSchedule,
};
use mixbench::lattice::{count_tilings, HexRouting, Permutation, Poset};
use mixbench::potential::{self as pot, GapFamily, HeuristicFamily, InterchangeFamily};

#[derive(Parser, Debug)]
#[command(name = "mixbench", version, about = "Mixing-time experiments for monotone Markov chains")]
#[command(args_override_self = true)]
struct Cli {
    /// Seed for every random stream; generated and recorded if absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Plain key=value file of flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (default: mixbench-out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exact d, dbar and s curves by evolving distributions.
    #[command(args_override_self = true)]
    Exact(ExactArgs),
    /// Grand-coupling (or pairwise) coalescence times.
    #[command(args_override_self = true)]
    Couple(CoupleArgs),
    /// Every bound formula for one instance, as JSON.
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// Exact samples by coupling from the past.
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Tabulate the threshold-shape curves.
    #[command(args_override_self = true)]
    Curves(CurvesArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Path,
    Perm,
    Hex,
    Kk,
    Hypercube,
    Grid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepArg {
    Single,
    Random,
    Alternating,
}

#[derive(Args, Debug, Clone)]
struct Instance {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Poset file for `kk` (lines `u < v`, optional `n N`).
    #[arg(long, value_name = "FILE")]
    poset: Option<PathBuf>,
    /// Hypercube dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Grid rows.
    #[arg(long)]
    l: Option<usize>,
    /// Grid columns.
    #[arg(long)]
    m: Option<usize>,
    /// Interchange firing probability.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    inst: Instance,
    /// Last time step (default: until both curves fall below --stop-below).
    #[arg(long)]
    tmax: Option<usize>,
    #[arg(long, value_enum, default_value = "single")]
    sweep: SweepArg,
    #[arg(long, default_value_t = 1e-13)]
    stop_below: f64,
    /// Also compute worst-start curves over every state (small spaces only).
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args, Debug)]
struct CoupleArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: u64,
    /// Pairwise coupling of two permutations instead of the grand coupling.
    #[arg(long)]
    pairwise: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = DEFAULT_EPOCH_CAP)]
    epoch_cap: u32,
    /// Render the first hexagon sample as tiling.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long)]
    a_s: Option<f64>,
    #[arg(long)]
    a_d: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mixbench: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<()> {
    let args = config::merge(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let explicit_out = cli.out.is_some();
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("mixbench-out"));
    let seed = match cli.seed {
        Some(s) => Seed { value: s, source: "given" },
        None => Seed { value: generated_seed(), source: "generated" },
    };
    let summary = match &cli.cmd {
        Cmd::Exact(a) => cmd_exact(a, &out)?,
        Cmd::Couple(a) => cmd_couple(a, seed, &out)?,
        Cmd::Bounds(a) => {
            let v = cmd_bounds(a)?;
            if explicit_out {
                write(&out, "bounds.json", &pretty(&v))?;
            }
            v
        }
        Cmd::Sample(a) => cmd_sample(a, seed, &out)?,
        Cmd::Curves(a) => cmd_curves(a, &out)?,
    };
    // A closed pipe is the reader's business, not an error.
    let _ = std::io::Write::write_all(&mut std::io::stdout(), pretty(&summary).as_bytes());
    Ok(())
}

#[derive(Clone, Copy)]
struct Seed {
    value: u64,
    source: &'static str,
}

fn generated_seed() -> u64 {
    let t = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
    (t.as_nanos() as u64) ^ ((std::process::id() as u64) << 32)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
}

fn formula(value: f64, expression: &str) -> Value {
    json!({ "value": value, "source": "formula", "expression": expression })
}

fn measured(value: f64, how: &str) -> Value {
    json!({ "value": value, "source": "measured", "method": how })
}

// ---------------------------------------------------------------------------
// Instance validation
// ---------------------------------------------------------------------------

fn positive(name: &str, v: Option<usize>) -> Result<usize> {
    match v {
        None => bail!("--{name} is required for this family"),
        Some(0) => bail!("--{name} must be positive"),
        Some(x) => Ok(x),
    }
}

impl Instance {
    fn family(&self) -> Result<FamilyArg> {
        self.family.ok_or_else(|| anyhow!("--family is required"))
    }

    fn path(&self) -> Result<(usize, usize)> {
        let (a, b) = (positive("a", self.a)?, positive("b", self.b)?);
        Ok((a, b))
    }

    fn perm(&self) -> Result<usize> {
        let n = positive("n", self.n)?;
        if n < 2 {
            bail!("--n must be at least 2");
        }
        Ok(n)
    }

    fn hex(&self) -> Result<(usize, usize, usize)> {
        Ok((positive("a", self.a)?, positive("b", self.b)?, positive("c", self.c)?))
    }

    fn poset(&self) -> Result<Poset> {
        match (&self.poset, self.n) {
            (Some(p), _) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(text.parse()?)
            }
            (None, Some(n)) if n >= 2 => Ok(Poset::antichain(n)),
            _ => bail!("kk needs --poset FILE or --n >= 2 (antichain)"),
        }
    }

    fn alpha(&self) -> Result<f64> {
        let a = self.alpha.unwrap_or(1.0);
        if !(a > 0.0 && a <= 1.0) {
            bail!("--alpha must lie in (0, 1]");
        }
        Ok(a)
    }

    fn params(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (k, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("n", self.n), ("d", self.d), ("l", self.l), ("m", self.m)] {
            if let Some(v) = v {
                m.insert(k.into(), json!(v));
            }
        }
        if let Some(p) = &self.poset {
            m.insert("poset".into(), json!(p.display().to_string()));
        }
        if let Some(a) = self.alpha {
            m.insert("alpha".into(), json!(a));
        }
        Value::Object(m)
    }
}

fn family_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::Path => "path",
        FamilyArg::Perm => "perm",
        FamilyArg::Hex => "hex",
        FamilyArg::Kk => "kk",
        FamilyArg::Hypercube => "hypercube",
        FamilyArg::Grid => "grid",
    }
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

struct Lambda {
    value: f64,
    expression: &'static str,
}

fn schedule(s: SweepArg) -> Option<SweepSchedule> {
    match s {
        SweepArg::Single => None,
        SweepArg::Random => Some(SweepSchedule::RandomParity),
        SweepArg::Alternating => Some(SweepSchedule::Alternating),
    }
}

/// Eigenvalue of the cosine potential for a path-like chain on `n` letters.
fn path_like_lambda(n: usize, sweep: SweepArg) -> Lambda {
    let g = 1.0 - (PI / n as f64).cos();
    match sweep {
        SweepArg::Single => Lambda { value: pot::lambda_path(n, PI).lambda, expression: "1 - (1 - cos(pi/n))/(n - 1)" },
        SweepArg::Random => Lambda { value: 1.0 - g / 2.0, expression: "1 - (1 - cos(pi/n))/2" },
        SweepArg::Alternating => Lambda { value: (PI / n as f64).cos().powi(2), expression: "cos(pi/n)^2" },
    }
}

struct ExactPlan<S> {
    lo: S,
    hi: S,
    lambda: Option<Lambda>,
    a_s: Option<(f64, &'static str)>,
}

fn cmd_exact(args: &ExactArgs, out: &Path) -> Result<Value> {
    let inst = &args.inst;
    let fam = inst.family()?;
    let sw = args.sweep;
    macro_rules! go {
        ($kernel:expr, $plan:expr) => {{
            let k = $kernel;
            match schedule(sw) {
                None => exact_run(k, $plan, args, out),
                Some(schedule) => exact_run(SweepKernel { inner: k, schedule }, $plan, args, out),
            }
        }};
    }
    match fam {
        FamilyArg::Path => {
            let (a, b) = inst.path()?;
            let k = PathKernel::new(a, b);
            let h = pot::heuristic_constants(HeuristicFamily::Path { a, b });
            let plan = ExactPlan {
                lo: k.bottom(),
                hi: k.top(),
                lambda: Some(path_like_lambda(a + b, sw)),
                a_s: Some((h.a_s, "Phi(top)^2 / Var[Phi]")),
            };
            go!(k, plan)
        }
        FamilyArg::Perm => {
            let n = inst.perm()?;
            let k = PermKernel::new(n);
            let plan = ExactPlan {
                lo: k.bottom(),
                hi: k.top(),
                lambda: Some(path_like_lambda(n, sw)),
                a_s: Some(((n - 1) as f64, "n - 1")),
            };
            go!(k, plan)
        }
        FamilyArg::Hex => {
            let (a, b, c) = inst.hex()?;
            let k = HexKernel::new(a, b, c);
            let single = sw == SweepArg::Single;
            let h = pot::heuristic_constants(HeuristicFamily::Hexagon { a, b, c });
            let plan = ExactPlan {
                lo: k.bottom(),
                hi: k.top(),
                lambda: single.then(|| Lambda {
                    value: pot::hex_lambda(a, b, c),
                    expression: "1 - (1 - cos(pi/(a+b)))/(c (a+b-1))",
                }),
                a_s: single.then_some((h.a_s, "Phi(top)^2 / Var[Phi]")),
            };
            go!(k, plan)
        }
        FamilyArg::Kk => {
            let k = KkKernel::uniform(inst.poset()?)?;
            let states = k.states()?;
            let plan = ExactPlan {
                lo: states.first().cloned().ok_or_else(|| anyhow!("poset has no linear extensions"))?,
                hi: states.last().cloned().unwrap(),
                lambda: None,
                a_s: None,
            };
            go!(k, plan)
        }
        FamilyArg::Hypercube | FamilyArg::Grid => bail!("exact supports path, perm, hex and kk"),
    }
}

fn exact_run<K: Kernel>(kernel: K, plan: ExactPlan<K::State>, args: &ExactArgs, out: &Path) -> Result<Value> {
    let chain = ExactChain::new(kernel)?;
    let n = chain.len();
    let lambda = match &plan.lambda {
        Some(l) => formula(l.value, l.expression),
        None => measured(chain.second_eigenvalue()?, "dense symmetric eigensolver"),
    };
    let lam = lambda["value"].as_f64().unwrap();
    if !(lam < 1.0) {
        bail!("second eigenvalue {lam} is not below 1");
    }
    let tmax = args.tmax.unwrap_or_else(|| {
        if lam <= 0.0 {
            10
        } else {
            (((n as f64).ln() + 35.0) / -lam.ln()).ceil().min(1e7) as usize
        }
    });
    let curves = chain.distance_curves(&plan.lo, &plan.hi, lam, tmax, args.stop_below)?;
    let fit = estimate_amplitudes(&curves, lam).ok();
    let (amp, amp_source) = match (&fit, plan.a_s) {
        (Some(f), _) => (f.a_s, "measured"),
        (None, Some((v, _))) => (v, "formula"),
        (None, None) => (1.0, "unit"),
    };
    let violations = curves.relation_violations(1e-12);
    write(out, "curves.csv", &curves.to_csv())?;
    write(out, "rescaled.csv", &curves.rescaled_csv(amp))?;
    let stat = chain.verify_stationarity();
    let mut a_s = serde_json::Map::new();
    let mut a_d = serde_json::Map::new();
    if let Some((v, e)) = plan.a_s {
        a_s.insert("formula".into(), formula(v, e));
        a_d.insert(
            "heuristic".into(),
            json!({ "value": (v / (2.0 * PI)).sqrt(), "source": "heuristic", "label": pot::A_D_LABEL }),
        );
    }
    if let Some(f) = &fit {
        a_s.insert(
            "measured".into(),
            json!({ "value": f.a_s, "source": "measured", "method": "tail fit of s(t)/lambda^t, 1e-10 < s < 0.1", "samples": f.samples, "max_log_residual": f.residual_s }),
        );
        a_d.insert(
            "measured".into(),
            json!({ "value": f.a_d, "source": "measured", "method": "tail fit of d(t)/lambda^t over the same window" }),
        );
    }
    let mut summary = json!({
        "command": "exact",
        "family": family_name(args.inst.family.unwrap()),
        "params": args.inst.params(),
        "sweep": format!("{:?}", args.sweep).to_lowercase(),
        "states": n,
        "transitions": chain.matrix.nnz(),
        "lambda": lambda,
        "a_s": a_s,
        "a_d": a_d,
        "tmax": tmax,
        "rows": curves.rows.len(),
        "cutoff_deviation": {
            "value": curves.cutoff_deviation(amp),
            "source": "measured",
            "against": "1 - exp(-exp(-x)), x = t ln(1/lambda) - ln A_s, rows with s < 0.5",
            "amplitude": amp_source,
        },
        "relation_violations": violations.len(),
        "stationarity": { "max_asymmetry": stat.max_asymmetry, "max_row_error": stat.max_row_error, "residual": stat.residual },
        "files": ["curves.csv", "rescaled.csv", "summary.json"],
    });
    if args.exhaustive {
        let worst = chain.exhaustive_curves(curves.rows.len() - 1)?;
        let gap_d = curves.rows.iter().zip(&worst).map(|(r, w)| w.0 - r.d).fold(0.0, f64::max);
        let gap_s = curves.rows.iter().zip(&worst).map(|(r, w)| w.1 - r.s).fold(0.0, f64::max);
        summary["exhaustive"] = json!({ "max_d_excess": gap_d, "max_s_excess": gap_s });
    }
    write(out, "summary.json", &pretty(&summary))?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// couple
// ---------------------------------------------------------------------------

fn cmd_couple(args: &CoupleArgs, seed: Seed, out: &Path) -> Result<Value> {
    let inst = &args.inst;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    let fam = inst.family()?;
    if args.pairwise && fam != FamilyArg::Perm {
        bail!("--pairwise applies to perm only");
    }
    let params = inst.params().to_string();
    let (stats, lambda, reference) = match fam {
        FamilyArg::Path => {
            let (a, b) = inst.path()?;
            let n = a + b;
            let s = coalescence_stats(&PathKernel::new(a, b), seed.value, args.trials, args.step_cap, params)?;
            (s, pot::lambda_path(n, PI).lambda, Some(("log n", (n as f64).ln())))
        }
        FamilyArg::Perm => {
            let n = inst.perm()?;
            let s = if args.pairwise {
                use rayon::prelude::*;
                let (x, y) = (Permutation::identity(n), Permutation::reversed(n));
                let times = (0..args.trials)
                    .into_par_iter()
                    .map(|t| pairwise_coalescence_time(&x, &y, seed.value, t, args.step_cap))
                    .collect::<mixbench::Result<Vec<_>>>()?;
                CouplingStats { seed: seed.value, params, times }
            } else {
                coalescence_stats(&PermKernel::new(n), seed.value, args.trials, args.step_cap, params)?
            };
            (s, pot::lambda_path(n, PI).lambda, Some(("2 log n", 2.0 * (n as f64).ln())))
        }
        FamilyArg::Hex => {
            let (a, b, c) = inst.hex()?;
            let s = coalescence_stats(&HexKernel::new(a, b, c), seed.value, args.trials, args.step_cap, params)?;
            (s, pot::hex_lambda(a, b, c), None)
        }
        _ => bail!("couple supports path, perm and hex"),
    };
    let rate = -lambda.ln();
    let mut summary = json!({
        "command": "couple",
        "coupling": if args.pairwise { "pairwise" } else { "grand" },
        "family": family_name(fam),
        "params": inst.params(),
        "seed": seed.value,
        "seed_source": seed.source,
        "trials": stats.trials(),
        "step_cap": args.step_cap,
        "detection": "exact, after every step",
        "mean": measured(stats.mean(), "sample mean"),
        "std_error": stats.std_error(),
        "median": stats.median(),
        "quantiles": {
            "0.1": stats.quantile(0.1), "0.25": stats.quantile(0.25), "0.5": stats.quantile(0.5),
            "0.75": stats.quantile(0.75), "0.9": stats.quantile(0.9),
        },
        "min": stats.quantile(0.0),
        "max": stats.quantile(1.0),
        "lambda": formula(lambda, "second eigenvalue of the single-site chain"),
        "rescaled_mean": measured(stats.mean() * rate, "mean time * ln(1/lambda)"),
        "files": ["times.csv", "summary.json"],
    });
    match reference {
        Some((label, v)) => {
            summary["reference"] = json!({ "expression": label, "value": v, "source": "formula" });
            summary["ratio"] = measured(stats.mean() * rate / v, "rescaled mean / reference");
        }
        None => summary["reference"] = Value::Null,
    }
    write(out, "times.csv", &stats.to_csv())?;
    write(out, "summary.json", &pretty(&summary))?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn inputs_json(i: &pot::BoundInputs) -> Value {
    json!({ "phi_max": i.phi_max, "gamma": i.gamma, "r": i.r, "epsilon": i.epsilon })
}

fn heuristics_json(h: pot::Heuristics, a_s_expr: &str) -> Value {
    json!({
        "a_s": formula(h.a_s, a_s_expr),
        "a_d": { "value": h.a_d, "source": "heuristic", "label": pot::A_D_LABEL, "expression": "sqrt(A_s / (2 pi))" },
    })
}

fn cmd_bounds(args: &BoundsArgs) -> Result<Value> {
    let inst = &args.inst;
    let eps = args.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        bail!("--epsilon must lie in (0, 1)");
    }
    let fam = inst.family()?;
    let mut v = json!({ "command": "bounds", "family": family_name(fam), "params": inst.params(), "epsilon": eps });
    match fam {
        FamilyArg::Path => {
            let (a, b) = inst.path()?;
            let n = a + b;
            if n < 2 {
                bail!("a path needs a + b >= 2");
            }
            let lb = pot::lambda_path(n, PI);
            let beta = pot::beta_schedule(n);
            let inputs = pot::path_lower_inputs(a, b, eps);
            v["spectral_gap"] = formula(pot::spectral_gap(GapFamily::Path { n }), "(1 - cos(pi/n))/(n - 1)");
            v["lambda"] = json!({
                "value": lb.lambda, "source": "formula", "expression": "1 - (1 - cos(pi/n))/(n - 1)",
                "lower": lb.lower, "upper": lb.upper,
            });
            v["lower_bound"] = json!({
                "value": pot::path_lower_time(a, b, eps)?, "source": "formula",
                "expression": "second-moment anticoncentration time", "inputs": inputs_json(&inputs),
            });
            v["upper_bound"] = json!({
                "value": pot::path_upper_time(a, b, eps, beta)?, "source": "formula",
                "expression": "ln(Phi_0/(Phi_min eps)) / gamma_beta", "beta": beta,
            });
            v["coupling_estimate"] = json!({
                "value": (n as f64).ln() / -lb.lambda.ln(), "source": "heuristic", "expression": "log n / log(1/lambda)",
            });
            if a == b {
                let nf = n as f64;
                v["lower_asymptote"] = formula(nf.powi(3) * nf.ln() / (PI * PI), "n^3 log n / pi^2");
            }
            v["heuristics"] = heuristics_json(pot::heuristic_constants(HeuristicFamily::Path { a, b }), "Phi(top)^2 / Var[Phi]");
        }
        FamilyArg::Perm => {
            let n = inst.perm()?;
            let lb = pot::lambda_path(n, PI);
            let beta = pot::beta_schedule(n);
            let (pa, pb) = (n / 2, n - n / 2);
            let gamma = pot::spectral_gap(GapFamily::Permutation { n });
            let t_pair = pot::pairwise_upper_time(n, eps);
            v["spectral_gap"] = formula(gamma, "(1 - cos(pi/n))/(n - 1)");
            v["lambda"] = formula(lb.lambda, "1 - (1 - cos(pi/n))/(n - 1)");
            v["lower_bound"] = json!({
                "value": pot::path_lower_time(pa, pb, eps)?, "source": "formula",
                "expression": "path lower bound for the middle threshold row",
                "inputs": inputs_json(&pot::path_lower_inputs(pa, pb, eps)),
            });
            v["upper_bound"] = json!({
                "value": pot::perm_upper_time(n, eps, beta)?, "source": "formula",
                "expression": "union over threshold rows of ln(Phi_0/(Phi_min eps)) / gamma_beta", "beta": beta,
            });
            v["pairwise_upper_bound"] = formula(t_pair, "ln(10 n / eps) / gamma");
            v["pairwise_survival_bound"] = json!({
                "value": 10.0 * n as f64 * (-(t_pair.ceil()) * gamma).exp(), "source": "formula",
                "expression": "10 n exp(-T gamma) at T = pairwise_upper_bound", "per_card": "10 exp(-T gamma)",
            });
            v["coupling_estimate"] = json!({
                "value": 2.0 * (n as f64).ln() / -lb.lambda.ln(), "source": "heuristic", "expression": "log n^2 / log(1/lambda)",
            });
            v["heuristics"] = heuristics_json(pot::heuristic_constants(HeuristicFamily::Permutation { n }), "n - 1");
        }
        FamilyArg::Hex => {
            let (a, b, c) = inst.hex()?;
            let inputs = pot::hex_lower_inputs(a, b, c, eps);
            v["spectral_gap"] = formula(pot::spectral_gap(GapFamily::Hexagon { a, b, c }), "(1 - cos(pi/(a+b)))/(c (a+b-1))");
            v["lambda"] = formula(pot::hex_lambda(a, b, c), "1 - gap");
            v["tilings"] = json!({ "value": count_tilings(a, b, c).to_string(), "source": "formula", "expression": "MacMahon box product" });
            v["var_phi"] = formula(pot::hex_var_phi(a, b, c), "abc(a+b+c) / (4 (1 - cos(pi/w)) (w^2 - 1))");
            v["phi_top"] = formula(pot::hex_phi_top(a, b, c), "(c/2) sin(pi a/w) / (1 - cos(pi/w))");
            v["lower_bound"] = json!({
                "value": pot::hex_lower_time(a, b, c, eps)?, "source": "formula",
                "expression": "second-moment anticoncentration time", "inputs": inputs_json(&inputs),
            });
            v["upper_bound"] = json!({
                "value": pot::hex_upper_time(a, b, c, eps)?, "source": "formula",
                "expression": "ln(m/(Phi_min eps)) / gamma_beta, p = c(w-1)",
                "beta": pot::beta_schedule(a * b + b * c + c * a),
            });
            if a == b && b == c {
                let l = a as f64;
                let base = l.powi(4) * l.ln() / (PI * PI);
                v["upper_asymptote"] = formula(48.0 * base, "48/pi^2 l^4 log l");
                v["lower_asymptote"] = formula(8.0 * base, "8/pi^2 l^4 log l");
            }
            v["heuristics"] = heuristics_json(pot::heuristic_constants(HeuristicFamily::Hexagon { a, b, c }), "Phi(top)^2 / Var[Phi]");
        }
        FamilyArg::Kk => {
            let n = match (&inst.poset, inst.n) {
                (Some(_), _) => inst.poset()?.n(),
                (None, Some(n)) if n >= 2 => n,
                _ => bail!("kk needs --n >= 2 or --poset FILE"),
            };
            let kb = pot::kk_upper_time(n, eps)?;
            let nf = n as f64;
            v["upper_bound"] = json!({
                "value": kb.time, "source": "formula", "expression": "ln(D/eps) / gamma_min",
                "beta": kb.beta, "gamma_min": kb.gamma_min, "d_ratio": kb.d_ratio,
            });
            v["gamma_floor"] = formula((1.0 - (kb.beta / nf).cos()) / (nf - 1.0), "(1 - cos(beta/n))/(n - 1)");
            v["parabola_gamma"] = formula(6.0 / (nf.powi(3) - nf), "6/(n^3 - n)");
            v["upper_asymptote"] = formula(4.0 / (PI * PI) * nf.powi(3) * nf.ln(), "4/pi^2 n^3 log n");
            v["spectral_gap_floor"] = formula(pot::spectral_gap(GapFamily::KarzanovKhachiyan { n }), "(1 - cos(pi/n))/(n - 1)");
        }
        FamilyArg::Hypercube | FamilyArg::Grid => {
            let alpha = inst.alpha()?;
            let (family, expr) = if fam == FamilyArg::Hypercube {
                (InterchangeFamily::Hypercube { d: positive("d", inst.d)? }, "(log 2 / 8 alpha) d^2 2^d")
            } else {
                let (l, m) = (positive("l", inst.l)?, positive("m", inst.m)?);
                (InterchangeFamily::Grid { l, m }, "l^2 (l - 1/2)(m - 1/2) / (alpha pi^2) log(l m)")
            };
            let ib = pot::interchange_lower_bound(family, alpha, eps)?;
            v["lower_bound"] = json!({
                "value": ib.time, "source": "formula", "expression": "second-moment anticoncentration time",
                "inputs": inputs_json(&ib.inputs),
            });
            v["lower_asymptote"] = formula(ib.asymptote, expr);
            v["spectral_gap"] = formula(ib.inputs.gamma, "gamma of the occupation eigenvector");
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

fn routing_line(r: &HexRouting) -> String {
    r.rows().iter().map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" | ")
}

fn cmd_sample(args: &SampleArgs, seed: Seed, out: &Path) -> Result<Value> {
    let inst = &args.inst;
    if args.count == 0 {
        bail!("--count must be positive");
    }
    let fam = inst.family()?;
    if args.svg && fam != FamilyArg::Hex {
        bail!("--svg applies to hex only");
    }
    let (lines, epochs, steps, svg): (Vec<String>, Vec<u32>, Vec<u64>, Option<String>) = match fam {
        FamilyArg::Path => {
            let (a, b) = inst.path()?;
            let s = cftp_samples(&PathKernel::new(a, b), seed.value, args.count, args.epoch_cap)?;
            (s.iter().map(|x| x.state.to_string()).collect(), s.iter().map(|x| x.epochs).collect(), s.iter().map(|x| x.steps).collect(), None)
        }
        FamilyArg::Perm => {
            let n = inst.perm()?;
            let s = cftp_samples(&PermKernel::new(n), seed.value, args.count, args.epoch_cap)?;
            (s.iter().map(|x| x.state.to_string()).collect(), s.iter().map(|x| x.epochs).collect(), s.iter().map(|x| x.steps).collect(), None)
        }
        FamilyArg::Hex => {
            let (a, b, c) = inst.hex()?;
            let s = cftp_samples(&HexKernel::new(a, b, c), seed.value, args.count, args.epoch_cap)?;
            let svg = args.svg.then(|| svg::render(&s[0].state));
            (s.iter().map(|x| routing_line(&x.state)).collect(), s.iter().map(|x| x.epochs).collect(), s.iter().map(|x| x.steps).collect(), svg)
        }
        _ => bail!("sample supports path, perm and hex"),
    };
    let mut text = lines.join("\n");
    text.push('\n');
    write(out, "samples.txt", &text)?;
    let mut files = vec!["samples.txt", "summary.json"];
    let mut summary = json!({
        "command": "sample",
        "method": "monotone coupling from the past, doubling epochs",
        "family": family_name(fam),
        "params": inst.params(),
        "seed": seed.value,
        "seed_source": seed.source,
        "count": args.count,
        "epoch_cap": args.epoch_cap,
        "max_epochs": epochs.iter().max(),
        "mean_steps": steps.iter().sum::<u64>() as f64 / steps.len() as f64,
    });
    if let Some(svg) = svg {
        summary["svg_lozenges"] = json!(svg.matches("<polygon").count());
        write(out, "tiling.svg", &svg)?;
        files.insert(1, "tiling.svg");
    }
    summary["files"] = json!(files);
    write(out, "summary.json", &pretty(&summary))?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

fn cmd_curves(args: &CurvesArgs, out: &Path) -> Result<Value> {
    let inst = &args.inst;
    let (a_s, lambda, source) = match (inst.family, args.a_s, args.lambda) {
        (_, Some(a), Some(l)) => (a, l, "given"),
        (Some(f), _, _) => {
            let h = match f {
                FamilyArg::Path => {
                    let (a, b) = inst.path()?;
                    pot::heuristic_constants(HeuristicFamily::Path { a, b })
                }
                FamilyArg::Perm => pot::heuristic_constants(HeuristicFamily::Permutation { n: inst.perm()? }),
                FamilyArg::Hex => {
                    let (a, b, c) = inst.hex()?;
                    pot::heuristic_constants(HeuristicFamily::Hexagon { a, b, c })
                }
                _ => bail!("curves supports path, perm and hex families"),
            };
            (args.a_s.unwrap_or(h.a_s), args.lambda.unwrap_or(h.lambda), "formula")
        }
        _ => bail!("curves needs --family or both --a-s and --lambda"),
    };
    if !(a_s > 0.0) || !(lambda > 0.0 && lambda < 1.0) {
        bail!("need A_s > 0 and 0 < lambda < 1");
    }
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    let a_d = args.a_d.unwrap_or((a_s / (2.0 * PI)).sqrt());
    let tmax = args.tmax.unwrap_or(((1000.0 * a_s).ln() / -lambda.ln()).max(1.0));
    let mut csv = String::from("t,s,d,dbar\n");
    for k in 0..args.points {
        let t = tmax * k as f64 / (args.points - 1) as f64;
        let (s, d, dbar) = pot::threshold_curves(a_s, a_d, lambda, t);
        csv.push_str(&format!("{t},{s},{d},{dbar}\n"));
    }
    write(out, "curves.csv", &csv)?;
    let summary = json!({
        "command": "curves",
        "a_s": { "value": a_s, "source": source },
        "a_d": { "value": a_d, "source": if args.a_d.is_some() { "given" } else { "heuristic" }, "label": pot::A_D_LABEL },
        "lambda": { "value": lambda, "source": source },
        "tmax": tmax,
        "points": args.points,
        "files": ["curves.csv", "summary.json"],
    });
    write(out, "summary.json", &pretty(&summary))?;
    Ok(summary)
}
