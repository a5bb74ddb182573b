use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use markoff_bm::report::{
    cmd_analyze, cmd_cohomology, cmd_family, cmd_lines, cmd_selftest, render_analysis,
    render_cohomology, render_lines, AnalyzeOptions, CriterionStatus, SelftestConfig,
};
use markoff_bm::search::{box_search, vieta_orbit, Triple, DEFAULT_ORBIT_CAP};
use markoff_bm::Error;

const USAGE: u8 = 1;
const DEGENERATE: u8 = 2;
const SELFTEST_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tmarkoff", version)]
#[command(about = "Integral points and Brauer-Manin obstructions on a x^2 + y^2 + z^2 - xyz = m")]
struct Cli {
    /// Optional key=value file (keys: a, m, box, prec-cap, seed, json); flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Emit JSON (schema 1) instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized self-test inputs
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Deepest p-adic level used for invariant profiles
    #[arg(long, global = true)]
    prec_cap: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Surface {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Local solubility, invariant profiles, verdict and a box search for one surface
    Analyze {
        #[command(flatten)]
        surface: Surface,
        /// Box bound for the integral point search
        #[arg(long = "box")]
        bound: Option<u64>,
        /// Comma-separated indices into the standard classes (x-2, x+2, x^2-4)
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<usize>>,
    },
    /// Check an obstruction family on one or more parameter sets
    Family {
        /// Family key (4a+2d2, 4a+3d2, 4a+6d2, 4a+10d2, tq2, neg-q) or its number 3.6 .. 3.11
        #[arg(long)]
        prop: String,
        /// Parameters as name=value pairs, e.g. a=3,d=1; repeat for a batch
        #[arg(long = "params", required = true)]
        params: Vec<String>,
        #[arg(long = "box")]
        bound: Option<u64>,
    },
    /// First cohomology of a catalogued Picard lattice action
    Cohomology {
        /// prop2.2-case1 .. prop2.2-case4, prop2.3 or lemma5.1
        #[arg(long)]
        case: String,
    },
    /// Run the acceptance suite
    Selftest,
    /// Integral points with max(|x|, |y|, |z|) <= box
    Search {
        #[command(flatten)]
        surface: Surface,
        #[arg(long = "box")]
        bound: Option<u64>,
    },
    /// Closure of a point under y -> xz - y, z -> xy - z and y <-> z.
    /// The x-move a(x + x') = yz is omitted since it leaves the integers when a != 1.
    Orbit {
        #[command(flatten)]
        surface: Surface,
        /// Seed point x,y,z
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        point: Vec<i128>,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
    },
    /// The 27 lines on the projective closure and their incidence matrix
    Lines {
        #[command(flatten)]
        surface: Surface,
    },
}

#[derive(Default)]
struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    fn load(path: &PathBuf) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), n + 1))?;
            let key = k.trim().replace('_', "-");
            if !["a", "m", "box", "prec-cap", "seed", "json"].contains(&key.as_str()) {
                return Err(format!("{}:{}: unknown key {key}", path.display(), n + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Config { values })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("config: bad value {v:?} for {key}"))
            })
            .transpose()
    }
}

struct Ctx {
    cfg: Config,
    json: bool,
    seed: Option<u64>,
    prec_cap: Option<u32>,
}

impl Ctx {
    fn surface(&self, s: &Surface) -> Result<(i64, i64), String> {
        let a =
            s.a.map_or_else(|| self.cfg.get("a"), |v| Ok(Some(v)))?
                .ok_or("missing --a")?;
        let m =
            s.m.map_or_else(|| self.cfg.get("m"), |v| Ok(Some(v)))?
                .ok_or("missing --m")?;
        Ok((a, m))
    }

    fn bound(&self, flag: Option<u64>) -> Result<u64, String> {
        Ok(flag
            .map_or_else(|| self.cfg.get("box"), |v| Ok(Some(v)))?
            .unwrap_or(100))
    }

    fn prec_cap(&self) -> Result<Option<u32>, String> {
        self.prec_cap
            .map_or_else(|| self.cfg.get("prec-cap"), |v| Ok(Some(v)))
    }

    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("serializable report")
            );
        } else {
            print!("{}", text());
        }
    }
}

enum Failure {
    Usage(String),
    Degenerate(String),
    Selftest,
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

impl From<&str> for Failure {
    fn from(s: &str) -> Self {
        Failure::Usage(s.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Degenerate { .. } => Failure::Degenerate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn parse_params(raw: &str) -> Result<BTreeMap<String, i64>, String> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got {kv:?}"))?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| format!("bad integer in {kv:?}"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn render_points(points: &[Triple]) -> String {
    let mut out = format!("{} points\n", points.len());
    for p in points {
        out.push_str(&format!("({}, {}, {})\n", p[0], p[1], p[2]));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let json = cli.json || cfg.get::<bool>("json")?.unwrap_or(false);
    let ctx = Ctx {
        cfg,
        json,
        seed: cli.seed,
        prec_cap: cli.prec_cap,
    };
    match cli.command {
        Command::Analyze {
            surface,
            bound,
            classes,
        } => {
            let (a, m) = ctx.surface(&surface)?;
            let opts = AnalyzeOptions {
                prec_cap: ctx.prec_cap()?,
                box_bound: ctx.bound(bound)?,
                classes,
            };
            let report = cmd_analyze(a, m, &opts)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ctx.emit(&report, || render_analysis(&report));
        }
        Command::Family {
            prop,
            params,
            bound,
        } => {
            let batch = params
                .iter()
                .map(|p| parse_params(p))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = AnalyzeOptions {
                prec_cap: ctx.prec_cap()?,
                box_bound: ctx.bound(bound)?,
                classes: None,
            };
            let reports = cmd_family(&prop, &batch, &opts)?;
            ctx.emit(&reports, || {
                let mut out = String::new();
                for r in &reports {
                    let params: Vec<String> =
                        r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let head = format!("{} [{}]", r.family, params.join(", "));
                    match (&r.analysis, r.matches_expectation) {
                        (Some(an), Some(ok)) => out.push_str(&format!(
                            "{head}: (a, m) = ({}, {}) {} at {} -> {}\n",
                            an.a,
                            an.m,
                            an.verdict,
                            r.expected_prime,
                            if ok { "as expected" } else { "UNEXPECTED" }
                        )),
                        _ => out.push_str(&format!(
                            "{head}: rejected: {}\n",
                            r.failed_clauses().join("; ")
                        )),
                    }
                }
                out
            });
            if reports.iter().any(|r| !r.accepted) {
                return Err(Failure::Usage(
                    "some parameter sets violate the family hypotheses".into(),
                ));
            }
            if reports.iter().any(|r| r.matches_expectation == Some(false)) {
                return Err(Failure::Selftest);
            }
        }
        Command::Cohomology { case } => {
            let report = cmd_cohomology(&case)?;
            ctx.emit(&report, || render_cohomology(&report));
        }
        Command::Selftest => {
            let seed = ctx
                .seed
                .map_or_else(|| ctx.cfg.get("seed"), |v| Ok(Some(v)))?
                .unwrap_or(0);
            let cfg = SelftestConfig {
                seed,
                prec_cap: ctx.prec_cap()?,
                ..Default::default()
            };
            let report = cmd_selftest(&cfg);
            ctx.emit(&report, || {
                let mut out: String = report.outcomes.iter().map(|o| format!("{o}\n")).collect();
                out.push_str(&format!(
                    "{} passed, {} failed, {} inconclusive\n",
                    report
                        .outcomes
                        .iter()
                        .filter(|o| o.status == CriterionStatus::Pass)
                        .count(),
                    report.failures(),
                    report.inconclusive()
                ));
                out
            });
            if report.failures() > 0 {
                return Err(Failure::Selftest);
            }
        }
        Command::Search { surface, bound } => {
            let (a, m) = ctx.surface(&surface)?;
            markoff_bm::solubility::check_params(a, m)?;
            let points = box_search(a, m, ctx.bound(bound)?);
            ctx.emit(&points, || render_points(&points));
        }
        Command::Orbit {
            surface,
            point,
            depth,
            cap,
        } => {
            let (a, m) = ctx.surface(&surface)?;
            markoff_bm::solubility::check_params(a, m)?;
            let seed: Triple = point
                .try_into()
                .map_err(|_| "--point needs three coordinates")?;
            let orbit = vieta_orbit(seed, a, m, depth, cap)?;
            let points: Vec<Triple> = orbit.triples.iter().copied().collect();
            ctx.emit(&orbit, || {
                let mut out = render_points(&points);
                if orbit.truncated {
                    out.push_str("(truncated)\n");
                }
                out
            });
        }
        Command::Lines { surface } => {
            let (a, m) = ctx.surface(&surface)?;
            let report = cmd_lines(a, m)?;
            ctx.emit(&report, || render_lines(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(DEGENERATE)
        }
        Err(Failure::Selftest) => ExitCode::from(SELFTEST_FAILED),
    }
}
