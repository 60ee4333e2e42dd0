use clap::{Args, Parser, Subcommand, ValueEnum};
use ewlab::function_model::{classify, AdditiveFunctionSpec, LawKind};
use ewlab::functionals::{
    rate_thm11, select_params_thm12, select_params_thm13, write_budget_csv, write_levelset_budget_csv, BudgetRow, ConstantsLedger,
    FunctionalTable,
};
use ewlab::harness::{
    convergence_sweep, default_mode, levelset_consistency, levelset_sweep, build_covering, verify_mean_value,
    write_meanvalue_csv, MeanValueStatus, SweepConfig, SweepMode,
};
use ewlab::limit_law::{atomic_law, concentration, concentration_integral, Concentration, EulerProductCf, LimitLaw, QSource};
use ewlab::numeric::fmt17;
use ewlab::sieve::{build_sieve, stream_summary, SieveTable, DEFAULT_BINS, DEFAULT_SEGMENT};
use ewlab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Largest x tabulated in memory; beyond it `sieve` streams a histogram.
const TABLE_LIMIT: u64 = 200_000_000;

#[derive(Parser)]
#[command(name = "ewlab", version, about = "Empirical laws of additive functions, their limit laws and effective rates")]
struct Cli {
    /// Spec file, or an inline spec such as "family=LOGPOW xi=2".
    #[arg(long, global = true)]
    spec: Option<String>,
    /// Upper end of the range n <= x (accepts 1e6).
    #[arg(long, global = true, value_parser = parse_count)]
    x: Option<u64>,
    /// CSV destination; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Constants ledger file.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
    /// Seed for jittering x grids.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve f(n) for n <= x and write `y,count,cdf`.
    Sieve {
        /// Also write a binary dump of the table.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Histogram bins when streaming.
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
    /// Partial sums of the convergence series and the law type.
    Classify {
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        primes: u64,
    },
    /// Compute the limit law (atoms or an inverted CDF).
    Limit(LimitArgs),
    /// Effective rates and parameter choices.
    Bounds {
        #[arg(long, value_delimiter = ',', value_parser = parse_count)]
        x_grid: Vec<u64>,
        /// Level-set budget for these k instead of the unconditional one.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u32>,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        table_primes: u64,
        /// Exit 0 even when no feasible parameters exist.
        #[arg(long)]
        allow_infeasible: bool,
    },
    /// Distances between empirical and limit laws across an x grid.
    Compare(CompareArgs),
    /// Level-set distances, or the coefficient-extraction check with --dft.
    Levelset {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long)]
        dft: bool,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 100.0)]
        r_cut: f64,
        #[arg(long, default_value_t = 64)]
        theta_points: usize,
        /// Fixed (v, R, T) instead of the explicit choice.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        params: Option<Vec<f64>>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Direct mean values of exp(i tau f_R) against the predicted main term.
    Meanvalue {
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        tau: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        r_cut: f64,
    },
    /// Sweep with fitted constants; optionally persist them to a ledger.
    Report {
        #[command(flatten)]
        compare: CompareArgs,
        /// Write the constants ledger with the fitted constant here.
        #[arg(long)]
        fit_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    p_cut: u64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    m_cut: u64,
    /// Conditional law with this r (strongly additive specs).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = -1.0)]
    y_lo: f64,
    #[arg(long, default_value_t = 6.0)]
    y_hi: f64,
    #[arg(long, default_value_t = 2000.0)]
    t_int: f64,
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    cf_primes: u64,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    table_primes: u64,
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    cf_primes: u64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    p_cut: u64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    m_cut: u64,
    #[arg(long, default_value_t = 2000.0)]
    t_int: f64,
}

#[derive(Args, Clone)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e4,1e5,1e6,1e7", value_parser = parse_count)]
    x_grid: Vec<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Largest accepted spread of distance/bound across the grid.
    #[arg(long, default_value_t = 3.0)]
    max_spread: f64,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Atomic,
    Continuous,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 {
        Ok(v as u64)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

/// Outcome of a subcommand, mapped onto the exit code.
enum Outcome {
    Pass,
    Fail(String),
    Infeasible(String),
}

type Res<T> = Result<T, Error>;

struct Ctx {
    spec: Option<AdditiveFunctionSpec>,
    x: Option<u64>,
    out: Option<PathBuf>,
    constants: ConstantsLedger,
    seed: Option<u64>,
}

impl Ctx {
    fn spec(&self) -> Res<&AdditiveFunctionSpec> {
        self.spec.as_ref().ok_or_else(|| Error::RejectedInput("--spec is required".into()))
    }

    fn x(&self) -> Res<u64> {
        self.x.ok_or_else(|| Error::RejectedInput("--x is required".into()))
    }

    fn writer(&self) -> Res<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }

    fn table(&self) -> Res<SieveTable> {
        build_sieve(self.spec()?, self.x()?, DEFAULT_SEGMENT)
    }

    /// Applies up to 1% jitter per grid point when a seed is given; order is preserved.
    fn jitter(&self, grid: &[u64]) -> Vec<u64> {
        let Some(seed) = self.seed else { return grid.to_vec() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<u64> = grid.iter().map(|&x| ((x as f64) * (1.0 + rng.gen_range(-0.01..0.01))).round() as u64).collect();
        for i in 1..out.len() {
            out[i] = out[i].max(out[i - 1] + 1);
        }
        out
    }

    fn sweep_config(&self, a: &SweepArgs) -> SweepConfig {
        SweepConfig {
            table_p_max: a.table_primes,
            cf_p_max: a.cf_primes,
            p_cut: a.p_cut,
            m_cut: a.m_cut,
            t_int: a.t_int,
            constants: self.constants.clone(),
            ..SweepConfig::default()
        }
    }
}

fn load_spec(arg: &str) -> Res<AdditiveFunctionSpec> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        std::fs::read_to_string(&path)?.parse()
    } else if arg.contains('=') {
        arg.parse()
    } else {
        Err(Error::RejectedInput(format!("spec file '{arg}' not found")))
    }
}

fn run_sieve(ctx: &Ctx, dump: Option<PathBuf>, bins: usize) -> Res<Outcome> {
    let x = ctx.x()?;
    let mut w = ctx.writer()?;
    if x > TABLE_LIMIT {
        if dump.is_some() {
            return Err(Error::RejectedInput(format!("dumps are limited to x <= {TABLE_LIMIT}")));
        }
        stream_summary(ctx.spec()?, x, DEFAULT_SEGMENT, bins)?.write_csv(&mut w)?;
    } else {
        let t = ctx.table()?;
        t.write_histogram_csv(&mut w)?;
        if let Some(p) = dump {
            t.dump_to_path(&p)?;
        }
    }
    w.flush()?;
    Ok(Outcome::Pass)
}

fn run_classify(ctx: &Ctx, primes: u64) -> Res<Outcome> {
    let c = classify(ctx.spec()?, primes)?;
    let mut w = ctx.writer()?;
    writeln!(w, "prime_budget,square_sum,mean_sum,support_sum,convergent,divergent,law_kind")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{:?}",
        c.prime_budget,
        fmt17(c.square_sum),
        fmt17(c.mean_sum),
        fmt17(c.support_sum),
        c.convergent_11,
        c.divergent_12,
        c.law_kind()
    )?;
    w.flush()?;
    Ok(Outcome::Pass)
}

fn run_limit(ctx: &Ctx, a: &LimitArgs) -> Res<Outcome> {
    let spec = ctx.spec()?;
    let law = match (a.r, classify(spec, 1000)?.law_kind()) {
        (Some(r), _) => {
            let cf = EulerProductCf::conditional(spec, r, a.cf_primes)?;
            LimitLaw::Inverted(build_covering(&cf, a.y_lo, a.y_hi, a.t_int)?)
        }
        (None, LawKind::Atomic) => LimitLaw::Atomic(atomic_law(spec, 1.0, a.p_cut, a.m_cut)?),
        (None, LawKind::Continuous) => {
            let cf = EulerProductCf::limit(spec, a.cf_primes)?;
            LimitLaw::Inverted(build_covering(&cf, a.y_lo, a.y_hi, a.t_int)?)
        }
        (None, k) => return Err(Error::RejectedInput(format!("no limit law to compute (law kind {k:?})"))),
    };
    eprintln!("error bound {}", fmt17(law.error_bound()));
    let mut w = ctx.writer()?;
    law.write_csv(&mut w)?;
    w.flush()?;
    Ok(Outcome::Pass)
}

fn run_bounds(ctx: &Ctx, grid: &[u64], ks: &[u32], table_primes: u64, allow: bool) -> Res<Outcome> {
    let spec = ctx.spec()?;
    let grid: Vec<u64> = if grid.is_empty() { vec![ctx.x()?] } else { ctx.jitter(grid) };
    let c = &ctx.constants;
    let table = FunctionalTable::new(spec, table_primes)?;
    let cf_primes = 100_000;
    let mut infeasible = Vec::new();
    let mut w = ctx.writer()?;
    if ks.is_empty() {
        let continuous = classify(spec, 1000)?.law_kind() == LawKind::Continuous;
        let mut rows = Vec::new();
        for &x in &grid {
            let xf = x as f64;
            let rate = rate_thm11(&table, xf)?;
            if let Some(a) = &rate.advisory {
                eprintln!("x={x}: {a}");
            }
            let thm12 = if continuous {
                let q = |ell: f64| {
                    let cut = spec.untruncated();
                    let cf = EulerProductCf::limit(&cut, cf_primes)?;
                    concentration(&cut, &cf, ell, cf_primes, c.get("c_kr"), c.get("c_int"))
                };
                let s = select_params_thm12(&table, xf, &q, c)?;
                if !s.feasible {
                    infeasible.push(format!("x={x}: no (eps, R, T) meets both constraints; reported R = T = 3"));
                }
                Some(s)
            } else {
                None
            };
            rows.push(BudgetRow { alpha: table.alpha(xf.powf(1.0 / xf.ln().ln()))?, beta: table.beta(xf.sqrt())?, rate, thm12 });
        }
        write_budget_csv(&rows, &mut w)?;
    } else {
        let mut rows = Vec::new();
        for &x in &grid {
            for &k in ks {
                let xf = x as f64;
                let r = k as f64 / xf.ln().ln();
                let cf = EulerProductCf::conditional(spec, r, cf_primes)?;
                let q = |ell: f64| -> Res<Concentration> {
                    let v = c.get("c_int") * concentration_integral(&cf, ell.min(1.0), 1e-8)?;
                    Ok(Concentration { kr: f64::INFINITY, integral: v, value: v.min(1.0), source: QSource::Integral })
                };
                let s = select_params_thm13(&table, xf, k, &q, c)?;
                if !s.feasible {
                    infeasible.push(format!("x={x} k={k}: no (v, T, R) meets every constraint"));
                }
                rows.push(s);
            }
        }
        write_levelset_budget_csv(&rows, &mut w)?;
    }
    w.flush()?;
    if infeasible.is_empty() || allow {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Infeasible(infeasible.join("\n")))
    }
}

fn run_compare(ctx: &Ctx, a: &CompareArgs) -> Res<(Outcome, ewlab::harness::DistanceReport)> {
    let spec = ctx.spec()?;
    let mode = match a.mode {
        Some(ModeArg::Atomic) => SweepMode::Atomic,
        Some(ModeArg::Continuous) => SweepMode::Continuous,
        None => default_mode(spec),
    };
    let rep = convergence_sweep(spec, &ctx.jitter(&a.x_grid), mode, &ctx.sweep_config(&a.sweep))?;
    let mut w = ctx.writer()?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    let spread = rep.ratio_spread();
    let outcome = if spread < a.max_spread {
        Outcome::Pass
    } else {
        let worst = rep.rows.iter().max_by(|p, q| p.ratio.total_cmp(&q.ratio)).unwrap();
        Outcome::Fail(format!(
            "ratio spread {spread:.3} >= {}; row x={},distance={},bound={},ratio={}",
            a.max_spread,
            worst.x,
            fmt17(worst.distance),
            fmt17(worst.bound),
            fmt17(worst.ratio)
        ))
    };
    Ok((outcome, rep))
}

#[allow(clippy::too_many_arguments)]
fn run_levelset(ctx: &Ctx, ks: &[u32], dft: bool, tau: f64, r_cut: f64, theta: usize, params: Option<&[f64]>, sweep: &SweepArgs) -> Res<Outcome> {
    let t = ctx.table()?;
    let mut w = ctx.writer()?;
    if dft {
        writeln!(w, "x,k,tau,R,direct_re,direct_im,extracted_re,extracted_im,residual,pi_k")?;
        let mut bad = Vec::new();
        for &k in ks {
            let r = levelset_consistency(&t, k, tau, r_cut, theta, &ctx.constants)?;
            let line = format!(
                "{},{},{},{},{},{},{},{},{},{}",
                t.x(),
                k,
                fmt17(tau),
                fmt17(r_cut),
                fmt17(r.direct.re),
                fmt17(r.direct.im),
                fmt17(r.extracted.re),
                fmt17(r.extracted.im),
                fmt17(r.residual),
                r.pi_k
            );
            writeln!(w, "{line}")?;
            if r.residual > 1e-9 * (r.pi_k as f64).max(1.0) {
                bad.push(line);
            }
        }
        w.flush()?;
        return Ok(if bad.is_empty() { Outcome::Pass } else { Outcome::Fail(bad.join("\n")) });
    }
    let params = params.map(|p| (p[0], p[1], p[2]));
    let rep = levelset_sweep(&t, ks, params, &ctx.sweep_config(sweep))?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    Ok(if rep.rows.iter().all(|r| r.feasible) { Outcome::Pass } else { Outcome::Infeasible("parameters violate the level-set constraints".into()) })
}

fn run_meanvalue(ctx: &Ctx, taus: &[f64], r_cut: f64) -> Res<Outcome> {
    let t = ctx.table()?;
    let rows: Vec<_> = taus.iter().map(|&tau| verify_mean_value(&t, tau, r_cut, &ctx.constants)).collect::<Res<_>>()?;
    let mut w = ctx.writer()?;
    write_meanvalue_csv(&rows, &mut w)?;
    w.flush()?;
    let exceeded: Vec<String> = rows
        .iter()
        .filter(|m| m.status == MeanValueStatus::Exceeded)
        .map(|m| format!("tau={} deviation={} scale={}", m.tau, fmt17(m.deviation), fmt17(m.scale)))
        .collect();
    for m in &rows {
        if let MeanValueStatus::Skipped(why) = &m.status {
            eprintln!("tau={}: comparison skipped: {why}", m.tau);
        }
    }
    Ok(if exceeded.is_empty() { Outcome::Pass } else { Outcome::Fail(exceeded.join("\n")) })
}

fn run_report(ctx: &Ctx, a: &CompareArgs, fit_out: Option<&PathBuf>) -> Res<Outcome> {
    let (outcome, rep) = run_compare(ctx, a)?;
    if let Some(path) = fit_out {
        let name = match rep.mode {
            SweepMode::Atomic => "c_11",
            SweepMode::Continuous => "c_113",
        };
        let mut ledger = ctx.constants.clone();
        let grid: Vec<String> = rep.rows.iter().map(|r| r.x.to_string()).collect();
        let c_hat = rep.c_hat();
        if c_hat > 0.0 {
            ledger.set(name, c_hat, &format!("fitted max distance/bound for {} over x = {}", rep.spec, grid.join(",")))?;
        }
        let mut f = BufWriter::new(File::create(path)?);
        write!(f, "{ledger}")?;
        f.flush()?;
    }
    Ok(outcome)
}

fn run(cli: Cli) -> Res<Outcome> {
    let constants = match &cli.constants {
        Some(p) => ConstantsLedger::load(p)?,
        None => ConstantsLedger::default(),
    };
    let spec = cli.spec.as_deref().map(load_spec).transpose()?;
    let ctx = Ctx { spec, x: cli.x, out: cli.out, constants, seed: cli.seed };
    match cli.command {
        Command::Sieve { dump, bins } => run_sieve(&ctx, dump, bins),
        Command::Classify { primes } => run_classify(&ctx, primes),
        Command::Limit(a) => run_limit(&ctx, &a),
        Command::Bounds { x_grid, k, table_primes, allow_infeasible } => run_bounds(&ctx, &x_grid, &k, table_primes, allow_infeasible),
        Command::Compare(a) => run_compare(&ctx, &a).map(|r| r.0),
        Command::Levelset { k, dft, tau, r_cut, theta_points, params, sweep } => {
            run_levelset(&ctx, &k, dft, tau, r_cut, theta_points, params.as_deref(), &sweep)
        }
        Command::Meanvalue { tau, r_cut } => run_meanvalue(&ctx, &tau, r_cut),
        Command::Report { compare, fit_out } => run_report(&ctx, &compare, fit_out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(row)) => {
            eprintln!("assertion failed: {row}");
            ExitCode::from(1)
        }
        Ok(Outcome::Infeasible(msg)) => {
            eprintln!("infeasible parameters: {msg}");
            ExitCode::from(2)
        }
        Err(Error::Infeasible(msg)) => {
            eprintln!("infeasible parameters: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
