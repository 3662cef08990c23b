use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetforms::config::RunConfig;
use jetforms::dims::QuotientData;
use jetforms::pipeline::{self, Report};
use jetforms::{AlgebraKind, Error};

#[derive(Parser)]
#[command(name = "jetforms", version, about = "Nilpotent-parameter deformations of lattices and their automorphic forms")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Floating tolerance for residual checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Lattice {
    /// Group presentation: sl2z, genus2, gamma1-4, punctured-torus, surface-g<g>-m<m>.
    #[arg(long)]
    preset: Option<String>,
    /// Algebra kind: trunc-poly, even-exterior.
    #[arg(long)]
    kind: Option<AlgebraKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Algebra JSON file (as written by the `algebra` subcommand).
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Deformation direction h1:<i> or h1:<i>@<b>; repeatable.
    #[arg(long)]
    direction: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a validated parameter-algebra file.
    Algebra(Lattice),
    /// Z¹, B¹ and H¹ of a preset presentation.
    Cohomology(Lattice),
    /// Lift a first-order deformation to an exact lattice over the algebra.
    Lift(Lattice),
    /// Deformed Eisenstein series by coset summation.
    Eisenstein {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = 6)]
        k: i64,
        /// Coset bound B.
        #[arg(long)]
        bound: Option<i64>,
        /// Truncation order M.
        #[arg(long = "M")]
        trunc: Option<usize>,
    },
    /// Adapt the classical basis of M_k to the deformed lattice.
    Adapt {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long)]
        k: i64,
        #[arg(long = "M")]
        trunc: Option<usize>,
        /// Height of the collocation line.
        #[arg(long)]
        height: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Dimensions of M_k and S_k from the degree formula.
    Dims {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        k: i64,
        /// Custom quotient instead of a preset: genus.
        #[arg(long)]
        genus: Option<i64>,
        /// Elliptic periods, comma separated.
        #[arg(long, value_delimiter = ',')]
        periods: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        cusps: i64,
        #[arg(long, default_value_t = 0)]
        even_cusps: i64,
        /// Whether −1 lies in the group.
        #[arg(long)]
        minus_one: bool,
    },
    /// Run the full acceptance suite.
    Verify {
        /// Include timings in the report (makes it machine dependent).
        #[arg(long)]
        timings: bool,
    },
}

fn apply_lattice(cfg: &mut RunConfig, a: &Lattice) {
    if let Some(p) = &a.preset {
        cfg.preset = p.clone();
    }
    if let Some(k) = a.kind {
        cfg.algebra.kind = k;
        // the even exterior algebra on R^m needs N = m + 1 to be exact
        if k == AlgebraKind::EvenExterior && a.n.is_none() {
            cfg.algebra.n = a.m.unwrap_or(cfg.algebra.m) + 1;
        }
    }
    if let Some(m) = a.m {
        cfg.algebra.m = m;
    }
    if let Some(n) = a.n {
        cfg.algebra.n = n;
    }
    if let Some(f) = &a.algebra {
        cfg.algebra.file = Some(f.display().to_string());
    }
    if !a.direction.is_empty() {
        cfg.directions = a.direction.clone();
    }
}

fn run(cli: Cli) -> Result<Report, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&std::fs::read_to_string(p).map_err(|e| Error::Other(format!("{}: {e}", p.display())))?)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.display().to_string());
    }
    let report = match &cli.command {
        Command::Algebra(a) => {
            apply_lattice(&mut cfg, a);
            cfg.validate()?;
            pipeline::cmd_algebra(&cfg)?
        }
        Command::Cohomology(a) => {
            apply_lattice(&mut cfg, a);
            cfg.validate()?;
            pipeline::cmd_cohomology(&cfg)?
        }
        Command::Lift(a) => {
            apply_lattice(&mut cfg, a);
            cfg.validate()?;
            pipeline::cmd_lift(&cfg)?
        }
        Command::Eisenstein { lattice, k, bound, trunc } => {
            apply_lattice(&mut cfg, lattice);
            if let Some(b) = bound {
                cfg.bound = *b;
            }
            if let Some(m) = trunc {
                cfg.m = *m;
            }
            cfg.validate()?;
            pipeline::cmd_eisenstein(&cfg, *k)?
        }
        Command::Adapt { lattice, k, trunc, height, points } => {
            apply_lattice(&mut cfg, lattice);
            if let Some(m) = trunc {
                cfg.m = *m;
            }
            if let Some(h) = height {
                cfg.height = *h;
            }
            if let Some(p) = points {
                cfg.points = *p;
            }
            cfg.validate()?;
            pipeline::cmd_adapt(&cfg, *k)?
        }
        Command::Dims { preset, k, genus, periods, cusps, even_cusps, minus_one } => {
            if let Some(p) = preset {
                cfg.preset = p.clone();
            }
            cfg.validate()?;
            let data = genus.map(|g| QuotientData {
                genus: g,
                periods: periods.clone(),
                cusps: *cusps,
                even_cusps: *even_cusps,
                minus_one: *minus_one,
            });
            pipeline::cmd_dims(&cfg, *k, data)?
        }
        Command::Verify { timings } => {
            cfg.verbose = *timings;
            cfg.validate()?;
            pipeline::cmd_verify(&cfg)?
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(report) => {
            let text = report.to_string_pretty();
            match out {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, text) {
                        eprintln!("error: {}: {e}", p.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: at least one check failed");
                ExitCode::from(1)
            }
        }
        Err(e @ Error::InvalidAlgebra(_)) | Err(e @ Error::Precondition(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
