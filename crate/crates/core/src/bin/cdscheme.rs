use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdscheme::bench::{run_benchmark_with, BenchOptions, BenchmarkReport, Origin};
use cdscheme::cfl::{cfl_curve, optimal_cfl_poly, TimeScheme};
use cdscheme::config::RunConfig;
use cdscheme::error::{Error, Result};
use cdscheme::rkdesign::{
    imaginary_axis_radius, real_axis_radius, region_boundary, synthesize_tableau,
    StabilityPolynomial, RKD_W3, RKD_W4, SHARED_C,
};
use cdscheme::solver::{advance, solution_csv, steady_solve, steps_csv, trace_csv, SolverState};
use cdscheme::spectral::{Peclet, PhysicalParams, Sampling, SchemeKind, SpectralCurve};

#[derive(Parser)]
#[command(
    name = "cdscheme",
    version,
    about = "Adaptive space-time schemes for periodic convection-diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral curve of a named space scheme.
    Spectrum {
        #[arg(long, default_value = "centered")]
        scheme: SchemeKind,
        /// Cell Péclet number: a value, `0` or `inf`.
        #[arg(long)]
        pe: Peclet,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Use the eigenvalues of an `I`-node grid instead of the continuous curve.
        #[arg(long)]
        discrete: Option<usize>,
        /// Velocity, diffusion and spacing used to scale `λ = scale·ρ`.
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        dx: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary of a stability region, one point per ray.
    Region {
        /// rk2, rk3, rk4, p4, bakker, rkd or custom:w3,w4
        #[arg(long, default_value = "rkd")]
        poly: String,
        #[arg(long, default_value_t = 512)]
        rays: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-stage tableau with a prescribed transfer polynomial.
    Tableau {
        #[arg(long, default_value_t = RKD_W3)]
        w3: f64,
        #[arg(long, default_value_t = RKD_W4)]
        w4: f64,
        #[arg(long, default_value_t = 0.5)]
        a43: f64,
        #[arg(long)]
        b2: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal CFL number as a function of the Péclet number.
    CflCurve {
        #[arg(long, default_value = "centered")]
        space: SchemeKind,
        #[arg(long, default_value = "rk4")]
        time: TimeScheme,
        #[arg(long, default_value_t = 0.1)]
        pe_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        pe_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        discrete: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal CFL number and maximal time step at one Péclet number.
    Cfl {
        #[arg(long, default_value = "centered")]
        space: SchemeKind,
        #[arg(long, default_value = "rk4")]
        time: TimeScheme,
        /// Péclet number; derived from `--u`, `--kappa`, `--dx` when omitted.
        #[arg(long)]
        pe: Option<Peclet>,
        #[arg(long)]
        discrete: Option<usize>,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        dx: Option<f64>,
    },
    /// Runs a JSON-configured simulation.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs benchmarks and compares against the published values.
    Bench {
        /// 1 to 7, or `all`.
        #[arg(long, default_value = "all")]
        id: String,
        /// Exit with a failure code if a published value is missed.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value = "bench-out")]
        out_dir: PathBuf,
        #[arg(long)]
        trace_detectors: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Spectrum {
            scheme,
            pe,
            samples,
            discrete,
            u,
            kappa,
            dx,
            out,
        } => {
            let mut curve = SpectralCurve::named(scheme, pe, sampling(samples, discrete))?;
            curve.scale = match pe {
                Peclet::Zero => kappa.unwrap_or(1.0) / (dx * dx),
                _ => u / dx,
            };
            let mut csv = String::from("s,re_rho,im_rho,re_lambda,im_lambda\n");
            for (k, sample) in curve.samples.iter().enumerate() {
                let l = curve.lambda(k);
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    sample.s, sample.rho.re, sample.rho.im, l.re, l.im
                ));
            }
            emit(out.as_deref(), &csv)?;
        }
        Command::Region { poly, rays, out } => {
            let p: StabilityPolynomial = poly.parse()?;
            let region = region_boundary(&p, rays)?;
            let mut csv = String::from("theta,re_z,im_z\n");
            for (theta, z) in region.angles.iter().zip(&region.boundary) {
                csv.push_str(&format!("{theta},{},{}\n", z.re, z.im));
            }
            emit(out.as_deref(), &csv)?;
            eprintln!(
                "{p}: imaginary axis {:.6}, real axis {:.6}",
                imaginary_axis_radius(&p),
                real_axis_radius(&p)
            );
        }
        Command::Tableau {
            w3,
            w4,
            a43,
            b2,
            out,
        } => {
            let t = synthesize_tableau(w3, w4, SHARED_C, a43, b2)?;
            let doc = serde_json::json!({
                "a": t.a,
                "b": t.b,
                "c": t.c,
                "w3": t.w3,
                "w4": t.w4,
                "residuals": t.residuals(),
                "max_residual": t.residuals().max_abs(),
            });
            emit(
                out.as_deref(),
                &format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).expect("plain data")
                ),
            )?;
        }
        Command::CflCurve {
            space,
            time,
            pe_min,
            pe_max,
            points,
            discrete,
            out,
        } => {
            if !(pe_min > 0.0 && pe_max > pe_min && points >= 2) {
                return Err(Error::InvalidArgument(
                    "need 0 < pe-min < pe-max and at least 2 points".into(),
                ));
            }
            let ratio = (pe_max / pe_min).ln() / (points - 1) as f64;
            let grid: Vec<f64> = (0..points)
                .map(|k| pe_min * (ratio * k as f64).exp())
                .collect();
            let curve = cfl_curve(space, time, &grid, sampling(1024, discrete))?;
            let mut csv = String::from("pe,c_cfl\n");
            for (pe, c) in curve {
                csv.push_str(&format!("{pe},{c}\n"));
            }
            emit(out.as_deref(), &csv)?;
        }
        Command::Cfl {
            space,
            time,
            pe,
            discrete,
            u,
            kappa,
            dx,
        } => {
            let physical = match (u, kappa, dx) {
                (Some(u), Some(k), Some(h)) => Some(PhysicalParams::new(u, k, h)?),
                (None, None, None) => None,
                _ => {
                    return Err(Error::InvalidArgument(
                        "--u, --kappa and --dx must be given together".into(),
                    ))
                }
            };
            let pe = match (pe, physical) {
                (Some(pe), _) => pe,
                (None, Some(p)) => p.peclet(),
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "give --pe or --u/--kappa/--dx".into(),
                    ))
                }
            };
            let curve = SpectralCurve::named(space, pe, sampling(1024, discrete))?;
            let c = optimal_cfl_poly(&curve, &time.polynomial())?.c_cfl;
            println!("pe = {}", pe.value());
            println!("c_cfl = {c}");
            match physical {
                Some(p) => println!("dt_max = {}", c / p.scale()),
                None if pe == Peclet::Zero => println!("dt_max = {c} * dx^2 / kappa"),
                None => println!("dt_max = {c} * dx / u"),
            }
        }
        Command::Solve { config } => solve(&config)?,
        Command::Bench {
            id,
            strict,
            out_dir,
            trace_detectors,
        } => return bench(&id, strict, &out_dir, trace_detectors),
    }
    Ok(ExitCode::SUCCESS)
}

fn sampling(samples: usize, discrete: Option<usize>) -> Sampling {
    match discrete {
        Some(n) => Sampling::Discrete(n),
        None => Sampling::Continuous(samples),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn solve(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let cfg = RunConfig::from_json(&text)?;
    let problem = cfg.build_problem()?;
    let (state, reports) = if cfg.steady {
        let res = steady_solve(&problem, cfg.solver.clone(), 1e-10, cfg.solver.max_steps)?;
        let n = problem.nodes;
        let state = SolverState {
            phi: res.phi,
            css: vec![0; n],
            cts: vec![0; n],
            pe: Vec::new(),
            t: 0.0,
            dt: 0.0,
            n_steps: res.steps,
        };
        println!("steady residual = {:e}", res.residual);
        (state, Vec::new())
    } else {
        advance(&problem, cfg.solver.clone())?
    };
    println!("steps = {}", state.n_steps);
    println!("t = {}", state.t);
    if let Some(exact) = &problem.exact {
        println!(
            "error_inf = {:e}",
            cdscheme::solver::error_inf(&state.phi, exact, state.t)
        );
    }
    let cured: usize = reports.iter().map(|r| r.cured_nodes.len()).sum();
    if cfg.solver.mood_active() {
        println!("cured nodes = {cured}");
    }
    if let Some(p) = &cfg.output.solution {
        write(p, &solution_csv(&problem, &state))?;
    }
    if let Some(p) = &cfg.output.steps {
        write(p, &steps_csv(&reports))?;
    }
    if let Some(p) = &cfg.output.trace {
        write(p, &trace_csv(&reports))?;
    }
    Ok(())
}

fn bench(id: &str, strict: bool, out_dir: &Path, trace: bool) -> Result<ExitCode> {
    let ids: Vec<u8> = if id.eq_ignore_ascii_case("all") {
        (1..=7).collect()
    } else {
        vec![id.parse().map_err(|_| {
            Error::InvalidArgument(format!("benchmark id must be 1..7 or all, got '{id}'"))
        })?]
    };
    let options = BenchOptions {
        trace_detectors: trace,
    };
    let mut reports: Vec<BenchmarkReport> = Vec::new();
    for id in ids {
        let report = run_benchmark_with(id, &options)?;
        for a in &report.artifacts {
            write(&out_dir.join(&a.name), &a.csv)?;
        }
        let checked = report.metrics.iter().filter(|m| m.pass.is_some()).count();
        let failed = report.failures();
        println!(
            "benchmark {} ({}): {}/{} checks passed",
            report.id,
            report.title,
            checked - failed.len(),
            checked
        );
        for m in failed {
            let e = m.expected.as_ref().expect("checked metric");
            println!(
                "  FAIL {} = {} (expected {:?} {}; {})",
                m.name, m.value, e.tolerance, e.target, e.source
            );
        }
        reports.push(report);
    }
    let summary = serde_json::to_string_pretty(&reports).expect("plain data");
    write(&out_dir.join("summary.json"), &format!("{summary}\n"))?;
    let published_miss = reports.iter().flat_map(|r| r.failures()).any(|m| {
        m.expected
            .as_ref()
            .is_some_and(|e| e.origin == Origin::Published)
    });
    Ok(if strict && published_miss {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
