use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use psi_ham_core::verify::{residual_norm, Candidate, GridSpec, QuadParams, SpatialGrid};
use psi_ham_core::{
    ham_series, make_problem, ml_eval, resum_geometric, HamConfig, HamSeries, Hbar, MlQuery, ProblemParams, ProblemSpec,
};

use crate::doc::{parse_app, parse_psi, read_json, to_json_string, ProblemDoc, ReportDoc, SeriesDoc};
use crate::error::{CliError, CliResult};
use crate::figures::{figure_file_name, figure_request, FIGURE_IDS};
use crate::table::{fmt_sig, parse_list, Axis, EvalRequest, Source};
use crate::tolerances::Tolerances;

#[derive(Debug, Parser)]
#[command(
    name = "psi-ham",
    version,
    about = "ψ-Caputo homotopy-analysis series for time-fractional Navier-Stokes problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the deformation series and write it as JSON.
    Solve(SolveArgs),
    /// Tabulate a solution on a grid as CSV.
    Eval(EvalArgs),
    /// Residual of a candidate solution in its governing equation.
    Verify(VerifyArgs),
    /// One-parameter Mittag-Leffler function.
    Ml(MlArgs),
    /// Write the data behind one or all of the published figures.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Problem JSON document; replaces the inline flags below.
    #[arg(long, conflicts_with_all = ["app", "psi", "a", "nu", "pressure", "rho0", "g"])]
    pub problem: Option<PathBuf>,
    /// tube-pressure, tube or planar
    #[arg(long)]
    pub app: Option<String>,
    /// identity or log
    #[arg(long)]
    pub psi: Option<String>,
    /// Initial time; defaults to 0 for identity and 1 for log.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Pressure gradient (tube-pressure).
    #[arg(long = "P")]
    pub pressure: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Body force (planar); defaults to 0.
    #[arg(long)]
    pub g: Option<f64>,
}

impl ProblemArgs {
    fn is_empty(&self) -> bool {
        self.problem.is_none()
            && self.app.is_none()
            && self.psi.is_none()
            && self.a.is_none()
            && self.nu.is_none()
            && self.pressure.is_none()
            && self.rho0.is_none()
            && self.g.is_none()
    }

    fn build(&self, alpha: Option<f64>) -> CliResult<ProblemSpec> {
        if let Some(path) = &self.problem {
            let mut doc: ProblemDoc = read_json(path)?;
            if let Some(al) = alpha {
                doc.alpha = al;
            }
            return doc.to_spec();
        }
        let app = self
            .app
            .as_deref()
            .ok_or_else(|| CliError::usage("--app or --problem is required"))?;
        let kind = parse_app(app)?;
        let psi_name = self.psi.as_deref().unwrap_or("identity");
        let psi = parse_psi(psi_name)?;
        let a = self.a.unwrap_or(if psi.is_logarithm() { 1.0 } else { 0.0 });
        let alpha = alpha.ok_or_else(|| CliError::usage("--alpha is required"))?;
        let g = match kind {
            psi_ham_core::AppKind::PlanarSystem => Some(self.g.unwrap_or(0.0)),
            _ => self.g,
        };
        let params = ProblemParams {
            nu: self.nu,
            pressure: self.pressure,
            rho0: self.rho0,
            g,
        };
        Ok(make_problem(kind, alpha, psi, a, params)?)
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Convergence-control parameter (ħ₁ for the planar system).
    #[arg(long)]
    pub hbar: f64,
    /// ħ₂ for the planar v equation; defaults to --hbar.
    #[arg(long)]
    pub hbar_v: Option<f64>,
    /// Highest order M of the raw series.
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
    /// Collapse the (1+ħ) families into the closed-form coefficients.
    #[arg(long)]
    pub resum: bool,
    /// Number of resummed families K.
    #[arg(long, default_value_t = HamConfig::DEFAULT_TERMS)]
    pub terms: usize,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated orders, one value column each.
    #[arg(long)]
    pub alphas: Option<String>,
    #[arg(long, conflicts_with = "alphas")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    /// Tube series length for closed forms; summed orders for --series.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Evaluate a series written by `solve` instead of the closed form.
    #[arg(long, conflicts_with_all = ["problem", "app", "alphas", "alpha"])]
    pub series: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CandidateKind {
    Exact,
    Series,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = CandidateKind::Exact)]
    pub candidate: CandidateKind,
    /// Series file for `--candidate series`.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Tube series length (exact candidate) or summed orders (series candidate).
    #[arg(long)]
    pub terms: Option<usize>,
    /// Radial range lo:hi:count; default 0.1:1:20.
    #[arg(long)]
    pub r: Option<String>,
    /// Default 0:6.283:20.
    #[arg(long)]
    pub x: Option<String>,
    /// Default 0:6.283:20.
    #[arg(long)]
    pub y: Option<String>,
    /// Last time; default a + 1.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub n_t: usize,
    /// Gap between a and the first time.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// L1 panels; default from the tolerance file.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Sup-norm budget; default from the tolerance file.
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct MlArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub z: f64,
    /// Relative truncation tolerance.
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_terms: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Figure number 1-6; all six when absent.
    #[arg(long)]
    pub id: Option<u8>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(p, text).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })
        }
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

pub fn solve_series(args: &SolveArgs) -> CliResult<(ProblemSpec, Hbar, HamSeries)> {
    let problem = args.problem.build(args.alpha)?;
    let hbar = Hbar::pair(args.hbar, args.hbar_v.unwrap_or(args.hbar));
    if args.hbar_v.is_some() && !problem.is_pair() {
        return Err(CliError::usage("--hbar-v applies to the planar system only"));
    }
    let series = if args.resum {
        resum_geometric(&problem, hbar, args.terms)?
    } else {
        let config = HamConfig {
            hbar,
            orders: args.orders,
            resum: false,
            terms: args.terms,
        };
        ham_series(&problem, &config)?
    };
    Ok((problem, hbar, series))
}

fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let (problem, hbar, series) = solve_series(args)?;
    let doc = SeriesDoc::from_series(&problem, hbar, args.resum, &series)?;
    write_output(args.out.as_deref(), &to_json_string(&doc), stdout)
}

fn load_series(path: &Path) -> CliResult<(ProblemSpec, HamSeries)> {
    read_json::<SeriesDoc>(path)?.to_series()
}

pub fn eval_request(args: &EvalArgs) -> CliResult<EvalRequest> {
    let (problem, source, alphas) = match &args.series {
        Some(path) => {
            if !args.problem.is_empty() {
                return Err(CliError::usage(
                    "--series carries its own problem; drop the problem flags",
                ));
            }
            let (problem, series) = load_series(path)?;
            let orders_used = args.terms.unwrap_or(series.max_order());
            let al = series.alpha().value();
            (problem, Source::Series { series, orders_used }, vec![al])
        }
        None => {
            let alphas = match (&args.alphas, args.alpha) {
                (Some(list), _) => parse_list(list, "--alphas")?,
                (None, Some(al)) => vec![al],
                (None, None) => return Err(CliError::usage("--alphas or --alpha is required")),
            };
            let problem = args.problem.build(Some(alphas[0]))?;
            let terms = args.terms.unwrap_or(HamConfig::DEFAULT_TERMS);
            (problem, Source::Exact { terms }, alphas)
        }
    };
    let axis = |name: &'static str, v: &Option<String>| -> CliResult<Axis> {
        let spec = v
            .as_deref()
            .ok_or_else(|| CliError::usage(format!("--{name} is required")))?;
        Axis::parse(name, spec)
    };
    let mut axes = Vec::new();
    if problem.is_pair() {
        if args.r.is_some() {
            return Err(CliError::usage("the planar system takes --x and --y, not --r"));
        }
        axes.push(axis("x", &args.x)?);
        axes.push(axis("y", &args.y)?);
    } else {
        if args.x.is_some() || args.y.is_some() {
            return Err(CliError::usage("tube problems take --r, not --x/--y"));
        }
        axes.push(axis("r", &args.r)?);
    }
    axes.push(axis("t", &args.t)?);
    Ok(EvalRequest {
        problem,
        axes,
        alphas,
        source,
    })
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let table = eval_request(args)?.run()?;
    for w in &table.warnings {
        let _ = writeln!(stderr, "{w}");
    }
    write_output(args.out.as_deref(), &table.to_csv(), stdout)
}

fn range_or(name: &'static str, v: &Option<String>, default: &str) -> CliResult<(f64, f64, usize)> {
    let a = Axis::parse(name, v.as_deref().unwrap_or(default))?;
    if !a.is_range {
        return Err(CliError::usage(format!("--{name}: verify needs a lo:hi:count range")));
    }
    Ok((a.values[0], *a.values.last().expect("nonempty"), a.values.len()))
}

pub fn verify_report(args: &VerifyArgs, tol: &Tolerances) -> CliResult<ReportDoc> {
    let (problem, candidate, label) = match args.candidate {
        CandidateKind::Series => {
            let path = args
                .series
                .as_deref()
                .ok_or_else(|| CliError::usage("--candidate series needs --series"))?;
            if !args.problem.is_empty() {
                return Err(CliError::usage(
                    "--series carries its own problem; drop the problem flags",
                ));
            }
            let (problem, series) = load_series(path)?;
            let used = args.terms.unwrap_or(series.max_order());
            (
                problem,
                Candidate::from_series(&series, used)?,
                format!("series ({used} orders)"),
            )
        }
        CandidateKind::Exact => {
            let problem = args.problem.build(args.alpha)?;
            let terms = args.terms.unwrap_or(HamConfig::DEFAULT_TERMS);
            (problem, Candidate::exact(&problem, terms), "exact".to_string())
        }
        CandidateKind::Zero => {
            let problem = args.problem.build(args.alpha)?;
            (problem, Candidate::zero(&problem), "zero".to_string())
        }
    };
    if args.series.is_some() && args.candidate != CandidateKind::Series {
        return Err(CliError::usage("--series needs --candidate series"));
    }
    let spatial = if problem.is_pair() {
        if args.r.is_some() {
            return Err(CliError::usage("the planar system takes --x and --y, not --r"));
        }
        let (x0, x1, n_x) = range_or("x", &args.x, "0:6.283:20")?;
        let (y0, y1, n_y) = range_or("y", &args.y, "0:6.283:20")?;
        SpatialGrid::Planar {
            x: (x0, x1),
            n_x,
            y: (y0, y1),
            n_y,
        }
    } else {
        if args.x.is_some() || args.y.is_some() {
            return Err(CliError::usage("tube problems take --r, not --x/--y"));
        }
        let (r_min, r_max, n_r) = range_or("r", &args.r, "0.1:1:20")?;
        SpatialGrid::Radial { r_min, r_max, n_r }
    };
    let grid = GridSpec {
        spatial,
        eps: args.eps,
        t_max: args.t_max.unwrap_or(problem.a() + 1.0),
        n_t: args.n_t,
    };
    let quad = QuadParams {
        nodes: args.nodes.unwrap_or(tol.residual.nodes),
    };
    let report = residual_norm(&problem, &candidate, &grid, quad)?;
    let budget = args.budget.unwrap_or(tol.residual_budget(problem.alpha().value()));
    ReportDoc::new(&problem, &label, &report, budget, tol.version)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let tol = Tolerances::load()?;
    let doc = verify_report(args, &tol)?;
    let text = match args.format {
        ReportFormat::Json => to_json_string(&doc),
        ReportFormat::Text => doc.to_text(),
    };
    write_output(args.out.as_deref(), &text, stdout)?;
    if doc.within_budget {
        Ok(())
    } else {
        Err(CliError::OverBudget {
            sup: doc.sup,
            budget: doc.budget,
        })
    }
}

fn cmd_ml(args: &MlArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut q = MlQuery::new(args.alpha, args.z).with_tol(args.tol);
    q.max_terms = args.max_terms;
    let v = ml_eval(&q)?;
    let text = format!(
        "{}\nterms {}\nerror_estimate {:e}\n",
        fmt_sig(v.value),
        v.terms,
        v.error_estimate
    );
    write_output(None, &text, stdout)
}

fn cmd_figure(args: &FigureArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let ids: Vec<u8> = match args.id {
        Some(id) => vec![id],
        None => FIGURE_IDS.to_vec(),
    };
    for id in ids {
        let table = figure_request(id)?.run()?;
        for w in &table.warnings {
            let _ = writeln!(stderr, "{w}");
        }
        let path = args.out.join(figure_file_name(id));
        write_output(Some(&path), &table.to_csv(), stdout)?;
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Eval(a) => cmd_eval(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Ml(a) => cmd_ml(a, stdout),
        Command::Figure(a) => cmd_figure(a, stdout, stderr),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
