use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Zero;

use zinbiel_core::deduction::{partial_from_json, propagate};
use zinbiel_core::families::{build, FamilyId, FamilyParams};
use zinbiel_core::gradation::graded;
use zinbiel_core::identities::{
    alternating_betas, binomial_matrix, determinant, eq9_system, lemma_alternating_sum,
    nonexistence_certificate,
};
use zinbiel_core::io::{load, save, to_json, to_json_with_degrees};
use zinbiel_core::isomorphism::{iso_search, IsoOutcome, SearchBounds};
use zinbiel_core::spectra::{char_sequence, detect_type, Strategy};
use zinbiel_core::{Error, Scalar};

const EXIT_PARSE: u8 = 64;
const EXIT_SEMANTIC: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "zinbiel",
    version,
    about = "Nilpotent Zinbiel algebras with exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the multiplication table of a family member.
    Family {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        beta1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        delta1: Option<String>,
        #[arg(long = "delta-pm1", allow_hyphen_values = true)]
        delta_pm1: Option<String>,
        /// Output path; the table is printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Zinbiel identity on all basis triples.
    Verify { input: PathBuf },
    /// Characteristic sequence and type.
    Charseq {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        grid_height: u32,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Associated graded algebra as JSON with a degrees array.
    Grade {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isomorphism search; exit 0 = yes, 1 = no, 2 = exhausted.
    Iso {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 6)]
        height: u32,
        #[arg(long, default_value_t = 20_000)]
        max_nodes: usize,
    },
    /// Propagate the linear fragment of the identity over a partial table; exit 1 on contradiction.
    Deduce {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 500)]
        budget: usize,
    },
    /// Certificate that the β-system for rows 1..p+1 has no solution with β₀ = 1.
    Nonexist {
        #[arg(long)]
        p: usize,
        /// Also write the JSON twin to this path.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Evaluate the binomial identities up to a bound.
    IdentitySuite {
        #[arg(long, default_value_t = 12)]
        max: u32,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema { .. } | Error::Version { .. } | Error::ScalarParse { .. } => EXIT_PARSE,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_SEMANTIC,
    }
}

fn scalar(flag: &str, text: &Option<String>) -> Result<Option<Scalar>, Error> {
    text.as_deref()
        .map(|s| {
            Scalar::parse(s).map_err(|e| Error::ScalarParse {
                text: format!("--{flag} {s}"),
                reason: e.to_string(),
            })
        })
        .transpose()
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::Internal(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Family {
            name,
            n,
            p,
            t,
            beta1,
            gamma1,
            delta1,
            delta_pm1,
            out,
        } => {
            let id: FamilyId = name.parse()?;
            let n = match (id, n) {
                (FamilyId::Ex31, None) => 4,
                (_, Some(n)) => n,
                (_, None) => return Err(Error::InvalidParams(format!("{id} needs --n"))),
            };
            let p = match (id, p) {
                (FamilyId::Ex31 | FamilyId::Nf, p) => p.unwrap_or(0),
                (_, Some(p)) => p,
                (_, None) => return Err(Error::InvalidParams(format!("{id} needs --p"))),
            };
            let fp = FamilyParams {
                n,
                p,
                t,
                beta1: scalar("beta1", &beta1)?,
                gamma1: scalar("gamma1", &gamma1)?,
                delta1: scalar("delta1", &delta1)?,
                delta_pm1: scalar("delta-pm1", &delta_pm1)?,
            };
            let a = build(id, &fp)?;
            match out {
                Some(path) => save(&a, &path)?,
                None => println!("{}", to_json(&a)),
            }
            Ok(0)
        }
        Command::Verify { input } => {
            let a = load(&input)?;
            let defects = a.zinbiel_defects();
            if defects.is_empty() {
                println!("Zinbiel: OK");
                let dims = a.series_dims();
                println!("lower series dims: {dims:?}");
                Ok(0)
            } else {
                println!("Zinbiel: FAIL ({} defective triples)", defects.len());
                for d in defects.iter().take(10) {
                    let (i, j, k) = d.triple;
                    println!(
                        "({}∘{})∘{}: {}",
                        a.label(i),
                        a.label(j),
                        a.label(k),
                        a.format_vector(&d.defect)
                    );
                }
                Ok(1)
            }
        }
        Command::Charseq {
            input,
            grid_height,
            samples,
            seed,
        } => {
            let a = load(&input)?;
            let strategy = Strategy {
                grid_height,
                samples,
                seed,
                ..Strategy::default()
            };
            let cs = char_sequence(&a, &strategy)?;
            let parts: Vec<String> = cs.partition.iter().map(ToString::to_string).collect();
            println!("({})", parts.join(","));
            println!("witness: {}", a.format_vector(&cs.witness));
            if let Ok(report) = detect_type(&a, &cs) {
                println!("type: {}", report.kind);
            }
            Ok(0)
        }
        Command::Grade { input, out } => {
            let a = load(&input)?;
            let g = graded(&a)?;
            eprintln!("component dims: {:?}", g.component_dims);
            write_or_print(
                &to_json_with_degrees(&g.algebra, &g.degrees),
                out.as_deref(),
            )?;
            Ok(0)
        }
        Command::Iso {
            first,
            second,
            height,
            max_nodes,
        } => {
            let a = load(&first)?;
            let b = load(&second)?;
            let bounds = SearchBounds { height, max_nodes };
            match iso_search(&a, &b, &bounds)? {
                IsoOutcome::Yes { change, .. } => {
                    println!("yes");
                    println!("generator change: {change}");
                    Ok(0)
                }
                IsoOutcome::No {
                    invariant,
                    left,
                    right,
                } => {
                    println!("no");
                    println!("{invariant}: {left} vs {right}");
                    Ok(1)
                }
                IsoOutcome::Exhausted(r) => {
                    println!("exhausted");
                    println!("nodes: {}, complete: {}", r.nodes, r.complete);
                    for p in &r.residual_system {
                        println!("{p} = 0");
                    }
                    Ok(2)
                }
            }
        }
        Command::Deduce { table, budget } => {
            let text = std::fs::read_to_string(&table).map_err(|e| Error::Schema {
                location: table.display().to_string(),
                reason: e.to_string(),
            })?;
            let t = partial_from_json(&text)?;
            let out = propagate(&t, budget);
            print!("{}", out.report(&t));
            Ok(if out.contradiction.is_some() { 1 } else { 0 })
        }
        Command::Nonexist { p, json_out } => {
            if p < 3 {
                return Err(Error::InvalidParams(format!(
                    "--p must be at least 3, got {p}"
                )));
            }
            let cert = nonexistence_certificate(p);
            print!("{}", cert.to_text());
            println!();
            println!("{}", cert.to_json());
            if let Some(path) = json_out {
                write_or_print(&cert.to_json(), Some(&path))?;
            }
            Ok(0)
        }
        Command::IdentitySuite { max } => {
            if max == 0 {
                return Err(Error::InvalidParams("--max must be positive".into()));
            }
            let bad: Vec<(u32, u32)> = (1..=max)
                .flat_map(|n| (1..=max).map(move |a| (n, a)))
                .filter(|&(n, a)| !lemma_alternating_sum(n, a).is_zero())
                .collect();
            if bad.is_empty() {
                println!("alternating sums, 1 <= n, a <= {max}: all zero");
            } else {
                println!("alternating sums, 1 <= n, a <= {max}: nonzero at {bad:?}");
            }
            let dets: Vec<String> = (2..=max as usize)
                .map(|p| format!("p={p}: {}", determinant(&binomial_matrix(p))))
                .collect();
            println!("det of binomial matrix: {}", dets.join(", "));
            for p in 3..=(max as usize).min(8) {
                let res = eq9_system(p, 2 * p).residuals(&alternating_betas(p));
                let first = res.iter().position(|r| !r.is_zero());
                match first {
                    None => println!("alternating betas, p={p}: rows 1..{} vanish", 2 * p),
                    Some(i) => println!(
                        "alternating betas, p={p}: rows 1..{} vanish, row {} = {}",
                        i,
                        i + 1,
                        res[i]
                    ),
                }
            }
            Ok(if bad.is_empty() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
