//! Command-line front end: build covers, run the headline pipelines, emit
//! JSON/DOT, and run the verification suite.
//!
//! Exit codes: 0 success (all embedded certificates passing), 1 usage error,
//! 2 computation failed (e.g. no lifting power within the bound),
//! 3 certificate violation.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use vbetti::cover::{grid_cover, minimal_lifting_power, GridCover};
use vbetti::error::{Error, Result};
use vbetti::exact::Perm;
use vbetti::fpgroup::FreeAut;
use vbetti::homology::{betti_mapping_torus, betti_oracle, H1Basis};
use vbetti::pipeline::{
    run_case1, run_case2, run_multik, run_reduction, PipelineConfig,
};
use vbetti::selftest;
use vbetti::triangle::find_triangle_quotient;

#[derive(Parser)]
#[command(
    name = "vbetti",
    version,
    about = "Finite covers of punctured surfaces and Betti numbers of mapping tori, in exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build covers of the punctured torus
    Cover {
        #[command(subcommand)]
        cmd: CoverCmd,
    },
    /// Lifting queries for a monodromy on a grid cover
    Lift {
        #[command(subcommand)]
        cmd: LiftCmd,
    },
    /// b1 of the mapping torus of a lifted monodromy over T(n)
    Betti(BettiArgs),
    /// The n = 2 headline construction (16-fold grid cover)
    Case1(Case1Args),
    /// The n >= 3 construction via a triangle-group quotient
    Case2(Case2Args),
    /// The multi-puncture fiber-product construction
    Multik(MultikArgs),
    /// Search for a verified (2n, 2n, n) triangle-group quotient
    Quotient(QuotientArgs),
    /// Reduce several cone points to one and compare Betti numbers
    Reduce(ReduceArgs),
    /// Run the built-in verification suite
    Selftest(SelftestArgs),
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Build the 4r-fold grid cover from four permutations
    Grid(GridOut),
    /// List the boundary lifts (puncture cycles and unwrapping degrees)
    Boundary(GridOut),
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Find the minimal power of the monodromy that lifts, and its lifts
    Check(LiftArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Grid parameter r (cover degree is 4r)
    #[arg(long, default_value_t = 4)]
    r: usize,
    /// The four row permutations in cycle notation, e.g. "(1 2 3 4)";
    /// repeat the flag four times (default: the standard grid
    /// (1 2 .. r), its inverse, and the same pair again)
    #[arg(long = "sigma")]
    sigma: Vec<String>,
}

impl GridArgs {
    fn build(&self) -> Result<GridCover> {
        if self.sigma.is_empty() {
            let s = Perm::from_cycle(self.r, &(0..self.r).collect::<Vec<_>>())?;
            return grid_cover(self.r, [s.clone(), s.inverse(), s.clone(), s.inverse()]);
        }
        if self.sigma.len() != 4 {
            return Err(Error::InvalidInput(format!(
                "expected exactly 4 --sigma flags, got {}",
                self.sigma.len()
            )));
        }
        let parsed: Result<Vec<Perm>> = self
            .sigma
            .iter()
            .map(|s| Perm::parse(s, self.r))
            .collect();
        let p = parsed?;
        grid_cover(self.r, [p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()])
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report to this path
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write a DOT rendering of the Schreier graph to this path
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct GridOut {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Twist word, e.g. "Dx Dy^4" (right factor acts first)
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BettiArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Twist word, e.g. "Dx Dy^4"
    #[arg(long)]
    f: String,
    /// Cone order of the base orbifold T(n)
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct Case1Args {
    /// Twist word, e.g. "Dx Dy^4"
    #[arg(long, default_value = "Dx Dy^4")]
    f: String,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct Case2Args {
    /// Cone order n >= 3
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// Twist word, e.g. "Dx Dy^4"
    #[arg(long, default_value = "Dx Dy^4")]
    f: String,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    /// Size cap for quotient group tables
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    /// Random candidates per prime in the quotient search
    #[arg(long, default_value_t = 200)]
    budget: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct MultikArgs {
    /// Number of punctures / cone points (>= 2)
    #[arg(long)]
    k: usize,
    /// Twist word on the k-punctured torus (rank k + 1)
    #[arg(long, default_value = "Dx Dy^4")]
    f: String,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct QuotientArgs {
    /// Triangle parameter n >= 2 (the group type is (2n, 2n, n))
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    #[arg(long, default_value_t = 200)]
    budget: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ReduceArgs {
    /// Twist word on the k-punctured torus (rank = number of cones + 1)
    #[arg(long)]
    f: String,
    /// 1-based index of the surviving cone point
    #[arg(long)]
    i: usize,
    /// Comma-separated cone orders, e.g. "2,3"
    #[arg(long)]
    cones: String,
    /// Also run the reduced monodromy through case1/case2
    #[arg(long, default_value_t = false)]
    downstream: bool,
    #[arg(long, default_value_t = 64)]
    power_bound: u32,
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    #[arg(long, default_value_t = 200)]
    budget: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

fn write_json<T: Serialize>(value: &T, path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        let s = serde_json::to_string_pretty(value)
            .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
        std::fs::write(p, s + "\n")?;
    }
    Ok(())
}

fn write_dot(grid: &GridCover, path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, grid.cover().to_dot())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LiftReport {
    monodromy: String,
    power: u32,
    lifts_found: usize,
    lifts: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct BettiCmdReport {
    monodromy: String,
    cone_order: u32,
    power: u32,
    lifts_found: usize,
    fixed_dims_per_lift: Vec<usize>,
    max_fixed_dim: usize,
    betti_formula: u64,
    betti_oracle: u64,
}

fn pipeline_cfg(power_bound: u32, cap: usize, budget: u32, seed: u64) -> PipelineConfig {
    PipelineConfig {
        power_bound,
        quotient_cap: cap,
        quotient_budget: budget,
        seed,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Cover { cmd } => match cmd {
            CoverCmd::Grid(a) => {
                let grid = a.grid.build()?;
                let desc = grid.cover().descriptor();
                write_json(&desc, &a.out.json)?;
                write_dot(&grid, &a.out.dot)?;
                println!(
                    "grid cover: degree {}, genus {}, {} punctures, H1 dim {}",
                    desc.degree,
                    desc.genus,
                    desc.punctures.len(),
                    grid.cover().h1_dim()
                );
                for p in &desc.punctures {
                    println!(
                        "  boundary {} cycle {:?} unwraps {}",
                        p.word, p.cycle, p.degree
                    );
                }
            }
            CoverCmd::Boundary(a) => {
                let grid = a.grid.build()?;
                let lifts = grid.cover().boundary_lifts().to_vec();
                write_json(&lifts, &a.out.json)?;
                write_dot(&grid, &a.out.dot)?;
                for p in &lifts {
                    println!(
                        "boundary {} sheets {:?} unwraps {}",
                        p.boundary_index,
                        p.sheets.iter().map(|s| s + 1).collect::<Vec<_>>(),
                        p.degree
                    );
                }
            }
        },
        Cmd::Lift { cmd } => match cmd {
            LiftCmd::Check(a) => {
                let grid = a.grid.build()?;
                let f = FreeAut::parse_twist_word(&a.f, 2)?;
                let (m, lifts) = minimal_lifting_power(grid.cover(), &f, a.power_bound)?;
                let report = LiftReport {
                    monodromy: a.f.clone(),
                    power: m,
                    lifts_found: lifts.len(),
                    lifts,
                };
                write_json(&report, &a.out.json)?;
                println!(
                    "minimal lifting power of {} is {}; {} lifts",
                    report.monodromy, report.power, report.lifts_found
                );
            }
        },
        Cmd::Betti(a) => {
            let grid = a.grid.build()?;
            let cover = grid.cover();
            let f = FreeAut::parse_twist_word(&a.f, 2)?;
            let (m, lifts) = minimal_lifting_power(cover, &f, a.power_bound)?;
            let fm = f.pow(m as i64)?;
            let basis = H1Basis::new(cover);
            let mut dims = Vec::with_capacity(lifts.len());
            for lam in &lifts {
                let act = basis.killed_action(&fm, lam)?;
                dims.push(vbetti::homology::fixed_dim(&act));
            }
            let max = *dims.iter().max().expect("nonempty lift set");
            let argmax = dims.iter().position(|&d| d == max).unwrap();
            let act = basis.action(&fm, &lifts[argmax])?;
            let formula = betti_mapping_torus(&basis, &act, a.n)?;
            let oracle = betti_oracle(cover, &fm, &lifts[argmax], a.n)?;
            if formula != oracle {
                return Err(Error::CertificateViolation(format!(
                    "b1 formula {formula} != oracle {oracle}"
                )));
            }
            let report = BettiCmdReport {
                monodromy: a.f.clone(),
                cone_order: a.n,
                power: m,
                lifts_found: lifts.len(),
                fixed_dims_per_lift: dims,
                max_fixed_dim: max,
                betti_formula: formula,
                betti_oracle: oracle,
            };
            write_json(&report, &a.out.json)?;
            println!(
                "b1 of the mapping torus of ({})^{} over T({}) on the cover: {} (oracle {})",
                a.f, m, a.n, formula, oracle
            );
        }
        Cmd::Case1(a) => {
            let f = FreeAut::parse_twist_word(&a.f, 2)?;
            let cfg = pipeline_cfg(a.power_bound, 10_000, 200, 7);
            let report = run_case1(&f, &a.f, &cfg)?;
            write_json(&report, &a.out.json)?;
            print!("{}", report.render_text());
        }
        Cmd::Case2(a) => {
            let f = FreeAut::parse_twist_word(&a.f, 2)?;
            let cfg = pipeline_cfg(a.power_bound, a.cap, a.budget, a.seed);
            let report = run_case2(a.n, &f, &a.f, &cfg)?;
            write_json(&report, &a.out.json)?;
            print!("{}", report.render_text());
        }
        Cmd::Multik(a) => {
            let f = FreeAut::parse_twist_word(&a.f, a.k + 1)?;
            let cfg = pipeline_cfg(a.power_bound, 10_000, 200, 7);
            let report = run_multik(a.k, &f, &a.f, &cfg)?;
            write_json(&report, &a.out.json)?;
            print!("{}", report.render_text());
        }
        Cmd::Quotient(a) => {
            let cert = find_triangle_quotient(a.n, a.cap, a.budget, a.seed)?;
            let j = cert.to_json();
            write_json(&j, &a.out.json)?;
            println!(
                "verified ({}, {}, {}) quotient of order {} (generators {}, {})",
                2 * a.n,
                2 * a.n,
                a.n,
                j.group_order,
                j.generator_a,
                j.generator_b
            );
        }
        Cmd::Reduce(a) => {
            let cones: Result<Vec<u32>> = a
                .cones
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad cone order \"{s}\"")))
                })
                .collect();
            let cones = cones?;
            let f = FreeAut::parse_twist_word(&a.f, cones.len() + 1)?;
            let cfg = pipeline_cfg(a.power_bound, a.cap, a.budget, a.seed);
            let report = run_reduction(&f, a.i, &cones, &a.f, &cfg, a.downstream)?;
            write_json(&report, &a.out.json)?;
            println!(
                "reduction of {} keeping cone {} of {:?}: b1(total) = {} >= b1(quotient) = {} = b1(direct) = {}",
                a.f, a.i, cones, report.b1_total, report.b1_quotient, report.b1_direct
            );
            if let Some(d) = &report.downstream {
                print!("{}", d.render_text());
            }
        }
        Cmd::Selftest(a) => {
            let cfg = PipelineConfig {
                seed: a.seed,
                ..PipelineConfig::default()
            };
            let results = selftest::run_all(&cfg);
            write_json(&results, &a.out.json)?;
            let mut failed = 0usize;
            for r in &results {
                println!(
                    "criterion {}: {} — {} ({})",
                    r.id,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.details
                );
                if !r.pass {
                    failed += 1;
                }
            }
            if failed > 0 {
                return Err(Error::CertificateViolation(format!(
                    "{failed} criteria failed"
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // die quietly instead of panicking when stdout is a closed pipe
    // (e.g. when piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
