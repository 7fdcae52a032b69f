//! Command line front end: distances, station covers, discrete covers,
//! hardness instances, and free-space renderings.
//!
//! Output contract: with `--json`, exactly one structured object on
//! standard output; without it, short human-readable text. Identical
//! inputs and flags produce byte-identical output. Exit status 0 on
//! success, 1 on domain infeasibility or a rejected verification, 2 on
//! usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use climber::cover::{
    exact_compatible_cover, greedy_compatible_cover, validate_cover_solution, CoverInstance,
};
use climber::dist::{frechet_value, hausdorff, Certificate, DistanceResult};
use climber::free_space::{default_inflation, AxisSegment, FreeSpaceDiagram};
use climber::gadget::{build_reduction, weakly_simple, RectilinearDrawing};
use climber::io;
use climber::station::{
    approx_min_k_with, heuristic_min_eps, verify_solution_with, StationIndexing, StationSolution,
};
use climber::svg::render_free_space;
use climber::PolyChain;

#[derive(Parser)]
#[command(
    name = "climber",
    version,
    about = "Similarity measures and station covers for planar polygonal chains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Numeric tolerance for distance values.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Free-space inflation override (default scales with the input).
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Also write a free-space rendering (with any witness segments) here.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Print one machine-readable object instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Let stations sit on parameter-zero chain endpoints; subdivision
    /// witnesses produced by station-approx may need this.
    #[arg(long, global = true)]
    include_zero_stations: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hausdorff distance between two chains, with a farthest-point witness.
    Hausdorff { p: PathBuf, q: PathBuf },
    /// Frechet distance between two chains, with a reachability witness.
    Frechet { p: PathBuf, q: PathBuf },
    /// Rock-climber distance; coincides with the Frechet distance and is
    /// computed by the same procedure.
    Rock { p: PathBuf, q: PathBuf },
    /// 2-approximation of the minimum station count at a threshold.
    StationApprox {
        p: PathBuf,
        q: PathBuf,
        /// Distance threshold for the stations.
        #[arg(long)]
        eps: f64,
        /// Write the witness subdivision here as a structured object.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check a station solution file against two chains at a threshold.
    StationVerify {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Solution file: {"a":[...], "b":[...], "p_assign":[...], "q_assign":[...]}.
        #[arg(long, value_name = "PATH")]
        solution: PathBuf,
    },
    /// Search for a small threshold whose station count stays within k.
    StationEps {
        p: PathBuf,
        q: PathBuf,
        /// Station budget.
        #[arg(long)]
        k: usize,
    },
    /// Solve a compatible-cover instance over explicit segments.
    CoverSolve {
        /// Instance file: {"segments":[{"o":"h","fixed":..,"lo":..,"hi":..},...]}.
        instance: PathBuf,
        /// Exhaustive grid-restricted optimum (small instances only).
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        /// Greedy 2-approximation (the default).
        #[arg(long)]
        greedy: bool,
        /// Candidate budget for --exact.
        #[arg(long, default_value_t = 50_000_000)]
        limit: u64,
    },
    /// Compile an embedded rectilinear formula drawing into two chains.
    GadgetGen {
        /// Drawing file: {"variables":[...], "clauses":[...]}.
        drawing: PathBuf,
        #[arg(long, value_name = "PATH")]
        out_p: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out_q: Option<PathBuf>,
        /// Print the station budget k on its own line.
        #[arg(long)]
        print_k: bool,
    },
    /// Emit a built-in reduction fixture.
    GadgetDemo {
        /// Fixture name.
        #[arg(value_parser = ["fig2"])]
        fixture: String,
        #[arg(long, value_name = "PATH")]
        out_p: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out_q: Option<PathBuf>,
        /// Write the drawing itself here as a structured object.
        #[arg(long, value_name = "PATH")]
        out_drawing: Option<PathBuf>,
        /// Print the station budget k on its own line.
        #[arg(long)]
        print_k: bool,
    },
    /// Render the free-space diagram of two chains at a threshold.
    FreespaceSvg {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        eps: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_chain(path: &PathBuf) -> Result<PolyChain> {
    io::read_chain(path).with_context(|| format!("reading chain {}", path.display()))
}

fn indexing(cli: &Cli) -> StationIndexing {
    if cli.include_zero_stations {
        StationIndexing::IncludeZero
    } else {
        StationIndexing::Literal
    }
}

fn describe(cert: &Certificate) -> String {
    match cert {
        Certificate::Attainment {
            on_first,
            param,
            point,
            nearest,
        } => format!(
            "attained on the {} chain at parameter {param}: ({}, {}) against nearest ({}, {})",
            if *on_first { "first" } else { "second" },
            point.x,
            point.y,
            nearest.x,
            nearest.y
        ),
        Certificate::Reachability {
            eps_lo,
            eps_hi,
            crossings,
        } => format!(
            "value bracketed in [{eps_lo}, {eps_hi}]; monotone witness crosses {} cell boundaries",
            crossings.len()
        ),
    }
}

fn emit_distance(cli: &Cli, name: &str, r: &DistanceResult, note: Option<&str>) -> Result<()> {
    if cli.json {
        let mut obj = json!({
            "command": name,
            "value": r.value,
            "certificate": serde_json::to_value(&r.certificate)?,
        });
        if let Some(n) = note {
            obj["note"] = json!(n);
        }
        println!("{obj}");
    } else {
        println!("{name} distance: {}", r.value);
        println!("{}", describe(&r.certificate));
        if let Some(n) = note {
            println!("note: {n}");
        }
    }
    Ok(())
}

fn render_to(cli: &Cli, p: &PolyChain, q: &PolyChain, eps: f64, segs: &[AxisSegment]) -> Result<()> {
    if let Some(path) = &cli.svg {
        let delta = cli.delta.unwrap_or_else(|| default_inflation(p, q));
        let d = FreeSpaceDiagram::new(p, q, eps, delta)?;
        std::fs::write(path, render_free_space(&d, segs))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Hausdorff { p, q } => {
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let r = hausdorff(&p, &q);
            emit_distance(cli, "hausdorff", &r, None)?;
            render_to(cli, &p, &q, r.value, &[])?;
        }
        Cmd::Frechet { p, q } | Cmd::Rock { p, q } => {
            let is_rock = matches!(cli.cmd, Cmd::Rock { .. });
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let r = frechet_value(&p, &q, cli.tol);
            let note = is_rock.then_some(
                "the rock-climber distance coincides with the frechet distance; \
                 computed by the same free-space procedure",
            );
            emit_distance(cli, if is_rock { "rock" } else { "frechet" }, &r, note)?;
            render_to(cli, &p, &q, r.value, &[])?;
        }
        Cmd::StationApprox { p, q, eps, out } => {
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let delta = cli.delta.unwrap_or_else(|| default_inflation(&p, &q));
            let rep = approx_min_k_with(&p, &q, *eps, delta)?;
            if let Some(path) = out {
                io::write_json(path, &rep.solution)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "station-approx",
                        "eps": eps,
                        "lower_bound": rep.lower_bound,
                        "upper_bound": rep.upper_bound,
                        "stations": rep.solution.k(),
                        "solution": serde_json::to_value(&rep.solution)?,
                    })
                );
            } else {
                println!("lower bound: {}", rep.lower_bound);
                println!("upper bound: {}", rep.upper_bound);
                println!("witness stations: {}", rep.solution.k());
                println!("{}", serde_json::to_string(&rep.solution)?);
            }
            render_to(cli, &p, &q, *eps, &rep.segments)?;
        }
        Cmd::StationVerify {
            p,
            q,
            eps,
            solution,
        } => {
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let sol: StationSolution = io::read_json(solution)
                .with_context(|| format!("reading {}", solution.display()))?;
            let report = verify_solution_with(&p, &q, *eps, &sol, indexing(cli));
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "station-verify",
                        "eps": eps,
                        "accepted": report.accepted,
                        "violation": serde_json::to_value(&report.violation)?,
                        "structural_error": report.structural_error,
                    })
                );
            } else if report.accepted {
                println!("accepted: {} stations at eps {eps}", sol.k());
            } else if let Some(v) = &report.violation {
                println!(
                    "rejected: pitch {} on the {} chain is {} from its station ({}, {})",
                    v.pitch,
                    if v.on_first { "first" } else { "second" },
                    v.distance,
                    v.station.x,
                    v.station.y
                );
            } else {
                println!(
                    "rejected: {}",
                    report.structural_error.as_deref().unwrap_or("malformed")
                );
            }
            render_to(cli, &p, &q, *eps, &[])?;
            if !report.accepted {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::StationEps { p, q, k } => {
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let eps = heuristic_min_eps(&p, &q, *k, cli.tol);
            let delta = cli.delta.unwrap_or_else(|| default_inflation(&p, &q));
            let rep = approx_min_k_with(&p, &q, eps, delta)?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "station-eps",
                        "k": k,
                        "eps": eps,
                        "lower_bound": rep.lower_bound,
                        "upper_bound": rep.upper_bound,
                    })
                );
            } else {
                println!("eps: {eps}");
                println!(
                    "station bounds at that eps: lower {}, upper {}",
                    rep.lower_bound, rep.upper_bound
                );
            }
            render_to(cli, &p, &q, eps, &rep.segments)?;
        }
        Cmd::CoverSolve {
            instance,
            exact,
            greedy: _,
            limit,
        } => {
            let inst: CoverInstance = io::read_json(instance)
                .with_context(|| format!("reading {}", instance.display()))?;
            let (mode, sol) = if *exact {
                ("exact", exact_compatible_cover(&inst, *limit)?)
            } else {
                ("greedy", greedy_compatible_cover(&inst)?)
            };
            validate_cover_solution(&inst, &sol)?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "cover-solve",
                        "mode": mode,
                        "size": sol.size,
                        "solution": serde_json::to_value(&sol)?,
                    })
                );
            } else {
                println!("{mode} cover size: {}", sol.size);
                println!("{}", serde_json::to_string(&sol)?);
            }
        }
        Cmd::GadgetGen {
            drawing,
            out_p,
            out_q,
            print_k,
        } => {
            let d: RectilinearDrawing = io::read_json(drawing)
                .with_context(|| format!("reading {}", drawing.display()))?;
            emit_gadget(cli, &d, "gadget-gen", out_p, out_q, &None, *print_k)?;
        }
        Cmd::GadgetDemo {
            fixture: _,
            out_p,
            out_q,
            out_drawing,
            print_k,
        } => {
            let d = RectilinearDrawing::fig2();
            emit_gadget(cli, &d, "gadget-demo", out_p, out_q, out_drawing, *print_k)?;
        }
        Cmd::FreespaceSvg { p, q, eps } => {
            let (p, q) = (load_chain(p)?, load_chain(q)?);
            let delta = cli.delta.unwrap_or_else(|| default_inflation(&p, &q));
            let d = FreeSpaceDiagram::new(&p, &q, *eps, delta)?;
            let svg = render_free_space(&d, &[]);
            match &cli.svg {
                Some(path) => {
                    std::fs::write(path, &svg)
                        .with_context(|| format!("writing {}", path.display()))?;
                    if cli.json {
                        println!(
                            "{}",
                            json!({
                                "command": "freespace-svg",
                                "eps": eps,
                                "path": path.display().to_string(),
                                "bytes": svg.len(),
                            })
                        );
                    } else {
                        println!("wrote {} ({} bytes)", path.display(), svg.len());
                    }
                }
                None => print!("{svg}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn emit_gadget(
    cli: &Cli,
    d: &RectilinearDrawing,
    name: &str,
    out_p: &Option<PathBuf>,
    out_q: &Option<PathBuf>,
    out_drawing: &Option<PathBuf>,
    print_k: bool,
) -> Result<()> {
    let inst = build_reduction(d)?;
    let constant_part = 10 * (d.variables.len() - 1) + 12 * d.clauses.len();
    if let Some(path) = out_p {
        io::write_chain_text(path, &inst.p).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = out_q {
        io::write_chain_text(path, &inst.q).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = out_drawing {
        io::write_json(path, d).with_context(|| format!("writing {}", path.display()))?;
    }
    let simple = weakly_simple(&inst.p) && weakly_simple(&inst.q);
    if cli.json {
        println!(
            "{}",
            json!({
                "command": name,
                "k": inst.k,
                "constant_part": constant_part,
                "eps": inst.eps,
                "num_vars": inst.num_vars,
                "num_clauses": d.clauses.len(),
                "p_vertices": inst.p.vertices().len(),
                "q_vertices": inst.q.vertices().len(),
                "weakly_simple": simple,
            })
        );
    } else {
        if print_k {
            println!("{}", inst.k);
        }
        println!(
            "k = {} (constant part {constant_part}), eps = {}, chains with {} and {} vertices, weakly simple: {simple}",
            inst.k,
            inst.eps,
            inst.p.vertices().len(),
            inst.q.vertices().len()
        );
    }
    Ok(())
}
