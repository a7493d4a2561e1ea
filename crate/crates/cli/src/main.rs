use std::path::PathBuf;
use std::process::ExitCode;

use brjuno::brjuno::{phi_rational, phi_stream};
use brjuno::cells::{
    cell_containing, cell_from_word, flank_inclusion_holds, flank_radius, flanking_cells,
    segment_profile,
};
use brjuno::cf::QuotientSpec;
use brjuno::experiments::{
    cremer_divergence_probe, inequality_suite, lebesgue_scan, omega_scan, rational_quotient_scan,
    rational_residual_scan, ExperimentReport, GrowthRule, Sampling,
};
use brjuno::psi::{psi, psi_increment_result};
use brjuno::{Error, Rational};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

mod output;

const DEFAULT_SEED: u64 = 20_240_601;
const PRECISION_ENV: &str = "BRJUNO_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(
    name = "brjuno",
    version,
    about = "Certified enclosures for the Brjuno function and its integral"
)]
struct Cli {
    /// Working precision in bits (default 128, or $BRJUNO_PRECISION_BITS)
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Target width for integrals and Φ tails
    #[arg(long, global = true, default_value = "1e-9")]
    tol: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for randomized runs
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for report CSV files
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Φ at a point: p/q, 0.ddd, periodic:[pre];[per], golden or silver
    Phi { point: String },
    /// Ψ(x) = ∫_0^x Φ
    Psi { x: String },
    /// Ψ(x+h) - Ψ(x)
    #[command(name = "psi-inc")]
    PsiInc {
        x: String,
        #[arg(allow_hyphen_values = true)]
        h: String,
    },
    /// A cell from its word (e.g. 2,3,1), or `containing <x> --depth k`
    Cell {
        args: Vec<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// The two cells flanking a rational and the inclusion radius 2/(3q^2)
    Flank { r: String },
    /// Depth and thickness of the segment (a, b)
    Profile { a: String, b: String },
    /// Run an experiment
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// The randomized inequality campaign
    Inequalities {
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Local averages of |Φ - Φ(x)|, or one-sided quotients of Ψ at a rational
    Lebesgue {
        #[arg(long, default_value = "golden")]
        point: String,
        /// Range of j for h = 2^-j
        #[arg(long, default_value = "6:20")]
        j: String,
        /// Range of d for h = 10^-d (rational points)
        #[arg(long, default_value = "2:7")]
        decades: String,
        #[arg(long, default_value_t = 1 << 14)]
        samples: usize,
    },
    /// Normalized residuals of the rational asymptotic model
    #[command(name = "rational-asym")]
    RationalAsym {
        #[arg(long, value_delimiter = ',', default_value = "1/2,1/3,2/5")]
        r: Vec<String>,
        #[arg(long, default_value = "2:6")]
        decades: String,
    },
    /// Modulus of continuity of Ψ; --tol is relative to h
    Omega {
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5")]
        h: Vec<String>,
    },
    /// Partial Brjuno sums under a quotient growth rule
    Cremer {
        /// a_{k+1} = 2^min(q_k^exponent, cap)
        #[arg(long, default_value_t = 1)]
        exponent: u32,
        #[arg(long, default_value_t = 10_000)]
        cap_bits: u64,
        /// Use a periodic block such as 1,2 instead
        #[arg(long, value_delimiter = ',')]
        periodic: Option<Vec<String>>,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
    },
}

enum Outcome {
    Record(Value),
    Report {
        report: ExperimentReport,
        certified: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn precision(cli: &Cli) -> Result<u32, Error> {
    let bits = match cli.precision {
        Some(p) => p,
        None => match std::env::var(PRECISION_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("{PRECISION_ENV}={s:?} is not an integer")))?,
            Err(_) => brjuno::DEFAULT_PRECISION,
        },
    };
    if bits < 64 {
        return Err(Error::Input(format!(
            "precision must be at least 64 bits, got {bits}"
        )));
    }
    Ok(bits)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let prec = precision(cli)?;
    let tol = Rational::parse(&cli.tol)?;
    if !tol.is_positive() {
        return Err(Error::Input("tolerance must be positive".into()));
    }
    let outcome = match &cli.command {
        Command::Phi { point } => Outcome::Record(phi_cmd(point, &tol, prec)?),
        Command::Psi { x } => {
            let res = psi(&Rational::parse(x)?, &tol, prec)?;
            Outcome::Record(json!({ "x": x, "psi": to_value(&res) }))
        }
        Command::PsiInc { x, h } => {
            let res = psi_increment_result(&Rational::parse(x)?, &Rational::parse(h)?, &tol, prec)?;
            Outcome::Record(json!({ "x": x, "h": h, "increment": to_value(&res) }))
        }
        Command::Cell { args, depth } => Outcome::Record(cell_cmd(args, *depth)?),
        Command::Flank { r } => {
            let r = Rational::parse(r)?;
            let cells = flanking_cells(&r)?;
            let rho = flank_radius(&r);
            let holds = flank_inclusion_holds(&r, &cells, &rho);
            Outcome::Record(json!({
                "r": r, "left_cell": to_value(&cells.0), "right_cell": to_value(&cells.1),
                "radius": rho, "inclusion_holds": holds,
            }))
        }
        Command::Profile { a, b } => {
            let p = segment_profile(&Rational::parse(a)?, &Rational::parse(b)?)?;
            Outcome::Record(to_value(&p))
        }
        Command::Verify { which } => verify_cmd(which, cli.seed, &tol, prec)?,
    };
    match outcome {
        Outcome::Record(v) => {
            print!("{}", output::record(&v, cli.format));
            Ok(0)
        }
        Outcome::Report { report, certified } => {
            if let Some(dir) = &cli.output {
                let path = report.write_csv(dir, cli.seed)?;
                eprintln!("wrote {}", path.display());
            }
            print!("{}", output::report(&report, cli.format));
            let failed = report.summary.violations > 0 || (certified && !report.all_pass());
            Ok(if failed { 2 } else { 0 })
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn parse_list(s: &str) -> Result<Vec<BigInt>, Error> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<BigInt>()
                .map_err(|_| Error::Input(format!("not a quotient: {t:?}")))
        })
        .collect()
}

fn parse_point(s: &str) -> Result<QuotientSpec, Error> {
    match s.trim() {
        "golden" => return Ok(QuotientSpec::golden()),
        "silver" => return Ok(QuotientSpec::silver()),
        _ => {}
    }
    if let Some(rest) = s.trim().strip_prefix("periodic:") {
        let (pre, per) = rest
            .split_once(';')
            .ok_or_else(|| Error::Input(format!("expected periodic:[pre];[per], got {s:?}")))?;
        return QuotientSpec::periodic(parse_list(pre)?, parse_list(per)?);
    }
    QuotientSpec::rational(Rational::parse(s)?)
}

fn phi_cmd(point: &str, tol: &Rational, prec: u32) -> Result<Value, Error> {
    let spec = parse_point(point)?;
    let mut m = Map::new();
    m.insert("point".into(), json!(spec.label()));
    if let Some(r) = spec.rational_value() {
        let ls = phi_rational(r)?;
        let (lo, hi) = ls.evaluate(prec).decimal_bounds();
        m.insert("symbolic".into(), json!(ls.to_string()));
        m.insert("lo".into(), json!(lo));
        m.insert("hi".into(), json!(hi));
    } else {
        let res = phi_stream(&spec, tol, prec)?;
        if let Value::Object(o) = to_value(&res) {
            m.extend(o);
        }
    }
    Ok(Value::Object(m))
}

fn cell_cmd(args: &[String], depth: Option<usize>) -> Result<Value, Error> {
    let cell = match args {
        [kw, x] if kw == "containing" => {
            let k = depth.ok_or_else(|| Error::Input("`cell containing` needs --depth".into()))?;
            cell_containing(&parse_point(x)?, k)?
        }
        [word] => cell_from_word(&parse_list(word)?)?,
        [] => cell_from_word(&[])?,
        _ => {
            return Err(Error::Input(
                "usage: cell <a1,a2,..> | cell containing <x> --depth <k>".into(),
            ))
        }
    };
    let (p, q) = cell.convergent();
    let mut v = to_value(&cell);
    v["depth"] = json!(cell.depth());
    v["convergent"] = json!(format!("{p}/{q}"));
    Ok(v)
}

fn range(s: &str) -> Result<(u32, u32), Error> {
    let bad = || Error::Input(format!("expected lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn verify_cmd(which: &Verify, seed: u64, tol: &Rational, prec: u32) -> Result<Outcome, Error> {
    let (report, certified) = match which {
        Verify::Inequalities { samples } => (inequality_suite(seed, *samples, prec), true),
        Verify::Lebesgue {
            point,
            j,
            decades,
            samples,
        } => {
            let spec = parse_point(point)?;
            match spec.rational_value() {
                Some(r) => {
                    let (lo, hi) = range(decades)?;
                    (rational_quotient_scan(r, lo, hi, prec)?, false)
                }
                None => {
                    let (lo, hi) = range(j)?;
                    (
                        lebesgue_scan(
                            &spec,
                            lo,
                            hi,
                            &Sampling {
                                samples: *samples,
                                seed,
                            },
                            prec,
                        )?,
                        false,
                    )
                }
            }
        }
        Verify::RationalAsym { r, decades } => {
            let rs = r
                .iter()
                .map(|s| Rational::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            let (lo, hi) = range(decades)?;
            (rational_residual_scan(&rs, lo, hi, prec)?, true)
        }
        Verify::Omega { h } => {
            let hs = h
                .iter()
                .map(|s| Rational::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            (omega_scan(&hs, tol, prec)?, true)
        }
        Verify::Cremer {
            exponent,
            cap_bits,
            periodic,
            kmax,
        } => {
            let rule = match periodic {
                Some(block) => GrowthRule::Periodic(parse_list(&block.join(","))?),
                None => GrowthRule::PowerOfTwo {
                    exponent: *exponent,
                    cap_bits: *cap_bits,
                },
            };
            (cremer_divergence_probe(&rule, *kmax, prec)?, false)
        }
    };
    Ok(Outcome::Report { report, certified })
}
