use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use s3s::report::{self, Format};
use s3s::rpi::{compare_after_flip, ranked_values, Comparison};
use s3s::{
    acc_ify, allocation_from_ratings, compute_rpi, parse_dataset, rank, solve_ratings, tally_all,
    Error, HfaMode, Method, RatingTable, RpiWeights, SeasonDataset, SolverConfig, TeamId,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "s3s",
    version,
    about = "Safe3Step ratings, points and rankings from a season of game scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: RunOptions,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Power Ratings and the point allocation table
    Ratings,
    /// S3S points and the final ranking list
    Rank {
        /// Emit this team's game-by-game tally instead of the ranking
        #[arg(long)]
        tally_team: Option<String>,
        /// Also write one tally file per team into this directory
        #[arg(long)]
        tallies_dir: Option<PathBuf>,
    },
    /// Ratings Percentage Index table
    Rpi,
    /// Reverse one game's result and compare rankings before and after
    Perturb {
        #[arg(long)]
        game_id: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Rpi)]
        method: MethodArg,
    },
    /// Give a team a new schedule and compare RPI rankings before and after
    Accify {
        #[arg(long)]
        team: String,
        /// One opponent per line, in the order of the team's games
        #[arg(long)]
        replacements: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunOptions {
    /// Season CSV file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Home-field advantage in goals
    #[arg(long, global = true, default_value_t = s3s::power_rating::DEFAULT_HFA)]
    hfa: f64,
    #[arg(long, global = true, value_enum, default_value_t = HfaModeArg::Fixed)]
    hfa_mode: HfaModeArg,
    /// Clamp raw score differences to +/- this many goals
    #[arg(long, global = true)]
    margin_cap: Option<f64>,
    #[arg(long, global = true, default_value_t = s3s::power_rating::DEFAULT_WIN_CONSTANT)]
    win_constant: f64,
    #[arg(long, global = true, default_value_t = s3s::power_rating::DEFAULT_ANCHOR)]
    anchor: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    max_iters: usize,
    /// RPI weights as w1,w2,w3
    #[arg(long, global = true, default_value = "0.25,0.5,0.25")]
    weights: String,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Fail with exit code 3 when the rating solver does not converge
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HfaModeArg {
    Fixed,
    Estimated,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Rpi,
    Power,
}

enum Failure {
    Usage(String),
    Data(Error),
    NotConverged(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl RunOptions {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            hfa: self.hfa,
            hfa_mode: match self.hfa_mode {
                HfaModeArg::Fixed => HfaMode::Fixed,
                HfaModeArg::Estimated => HfaMode::Estimated,
            },
            margin_cap: self.margin_cap,
            tolerance: self.tolerance,
            max_iterations: self.max_iters,
            anchor: self.anchor,
        }
    }

    fn rpi_weights(&self) -> Result<RpiWeights, Failure> {
        let parts: Vec<f64> = self
            .weights
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                Failure::Usage(format!(
                    "--weights expects w1,w2,w3, got {:?}",
                    self.weights
                ))
            })?;
        match parts[..] {
            [a, b, c] => RpiWeights::new(a, b, c).map_err(|e| Failure::Usage(e.to_string())),
            _ => Err(Failure::Usage(format!(
                "--weights expects three values, got {}",
                parts.len()
            ))),
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }

    fn load(&self) -> Result<SeasonDataset, Failure> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| Failure::Usage("--input is required".into()))?;
        let file = fs::File::open(path)
            .map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))?;
        Ok(parse_dataset(io::BufReader::new(file))?)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(e.to_string())),
        }
    }
}

fn solve(opts: &RunOptions, ds: &SeasonDataset) -> Result<RatingTable, Failure> {
    let rt = solve_ratings(ds, &opts.solver())?;
    if !rt.converged {
        if opts.strict {
            return Err(Failure::NotConverged(rt.iterations));
        }
        eprintln!(
            "warning: rating solver stopped after {} iterations without converging",
            rt.iterations
        );
    }
    if rt.is_disconnected() {
        eprintln!(
            "warning: schedule has {} disconnected parts; ratings are comparable only within a part",
            rt.components.len()
        );
    }
    Ok(rt)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    let format = opts.format();
    let weights = opts.rpi_weights()?;
    opts.solver()
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let ds = opts.load()?;

    match &cli.command {
        Command::Ratings => {
            let rt = solve(opts, &ds)?;
            let alloc = allocation_from_ratings(&rt, opts.win_constant);
            warn_kink(&alloc.beyond_kink());
            opts.emit(&report::ratings(&rt, &alloc, format)?)
        }
        Command::Rank {
            tally_team,
            tallies_dir,
        } => {
            let rt = solve(opts, &ds)?;
            let alloc = allocation_from_ratings(&rt, opts.win_constant);
            warn_kink(&alloc.beyond_kink());
            let tallies = tally_all(&ds, &alloc, rt.hfa_used)?;
            if let Some(dir) = tallies_dir {
                fs::create_dir_all(dir)
                    .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
                let ext = match format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                for (team, t) in &tallies {
                    let file = dir.join(format!("{}.{ext}", file_stem(team)));
                    fs::write(&file, report::tally(t, format)?).map_err(|e| {
                        Failure::Usage(format!("cannot write {}: {e}", file.display()))
                    })?;
                }
            }
            match tally_team {
                Some(name) => {
                    let team = ds
                        .find_team(name)
                        .ok_or_else(|| Failure::Data(Error::UnknownTeam(name.clone())))?;
                    opts.emit(&report::tally(&tallies[team], format)?)
                }
                None => opts.emit(&report::ranking(&rank(&tallies, &ds), format)?),
            }
        }
        Command::Rpi => opts.emit(&report::rpi(&compute_rpi(&ds, weights)?, format)?),
        Command::Perturb { game_id, method } => {
            let method = match method {
                MethodArg::Rpi => Method::Rpi(weights),
                MethodArg::Power => Method::Power(opts.solver()),
            };
            let cmp = compare_after_flip(&ds, *game_id, &method)?;
            let label = json!({ "kind": "reverse_result", "game_id": game_id });
            opts.emit(&report::comparison(&cmp, &label, format)?)
        }
        Command::Accify { team, replacements } => {
            let text = fs::read_to_string(replacements).map_err(|e| {
                Failure::Usage(format!("cannot read {}: {e}", replacements.display()))
            })?;
            let names: Vec<TeamId> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| TeamId::new(l).expect("non-empty line"))
                .collect();
            let target =
                TeamId::new(team).ok_or_else(|| Failure::Usage("--team is empty".into()))?;
            let replaced = acc_ify(&ds, &target, &names)?;
            let method = Method::Rpi(weights);
            let cmp = Comparison::new(
                &method,
                ranked_values(&ds, &method)?,
                ranked_values(&replaced, &method)?,
            );
            let label =
                json!({ "kind": "replace_schedule", "team": target, "replacements": names });
            opts.emit(&report::comparison(&cmp, &label, format)?)
        }
    }
}

fn warn_kink(teams: &[TeamId]) {
    if !teams.is_empty() {
        let names: Vec<&str> = teams.iter().map(TeamId::name).collect();
        eprintln!(
            "warning: {} team(s) rated beyond the win constant; beating them is worth more the weaker they are: {}",
            names.len(),
            names.join(", ")
        );
    }
}

fn file_stem(team: &TeamId) -> String {
    team.name()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::NotConverged(n)) => {
            eprintln!("error: rating solver did not converge in {n} iterations");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
    }
}
