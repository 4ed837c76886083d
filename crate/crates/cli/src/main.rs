//! `g2f`: runs the verification suites, scans, model inspection, solution
//! construction, energy experiments and radius sweeps, and writes a JSON
//! (or CSV) report. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector4;
use serde_json::{json, Value};

use g2fueter::exterior::Form;
use g2fueter::fm;
use g2fueter::g2::{phi0, Mat7};
use g2fueter::models::{self, h1_nilmanifold, jacobi_check, LieAlgebraModel};
use g2fueter::pde::{self, AnalyticMap, ImmersionGrid};
use g2fueter::report::{self, Check, Profile, RunReport};
use g2fueter::rng;
use g2fueter::splitting::{self, GraphSampler, PlaneSampler, Splitting};

#[derive(Parser, Debug)]
#[command(name = "g2f", version, about = "G2 calibration and Fueter verification driver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for every random stream (required by stochastic commands).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Strict)]
    profile: ProfileArg,
    /// Add wall time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Strict,
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Algebra,
    Splitting,
    Fueter,
    Models,
    Pde,
    Fm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanKind {
    Semical,
    Anisotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolveKind {
    FlatHarmonic,
    Affine,
    Su2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Harmonic {
    Quadratic,
    Newton,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Sample planes and compare a form with the volume or with ve₁.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
        /// 3-form for `semical`, as `phi` or rendered terms like `+1·dx{123} -1·dx{257}`.
        #[arg(long, default_value = "phi")]
        form: String,
        /// Standard deviation of graph entries for `anisotropic`.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Structure equations, closedness flags and homology of a model.
    Model {
        /// product-flat, su2-semidirect or heisenberg
        name: String,
        /// Heisenberg matrix, `a,b,c;d,e,f;g,h,i`.
        #[arg(long = "B")]
        b: Option<String>,
        #[arg(long)]
        homology: bool,
    },
    /// Build a Fueter section and report its residuals.
    Solve {
        #[arg(value_enum)]
        kind: SolveKind,
        #[arg(long, value_enum, default_value_t = Harmonic::Quadratic)]
        harmonic: Harmonic,
        /// Second column of the affine slope, `a,b,c,d`.
        #[arg(long, default_value = "0,1,1,0")]
        a2: String,
        #[arg(long, default_value = "1,0,0,0")]
        a3: String,
        #[arg(long, default_value_t = 6)]
        grid: usize,
    },
    /// Energies of an affine Fueter section and the perturbation experiment.
    Energy {
        #[arg(long, default_value = "0,1,1,0")]
        a2: String,
        #[arg(long, default_value = "1,0,0,0")]
        a3: String,
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        #[arg(long, default_value_t = 6)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        kmax: i32,
    },
    /// Fourier–Mukai transform commands.
    Fm {
        #[command(subcommand)]
        cmd: FmCmd,
    },
}

#[derive(Subcommand, Debug)]
enum FmCmd {
    /// dDT residuals of the transform over log-spaced radii.
    Sweep {
        #[arg(long, default_value_t = 1.0)]
        rmin: f64,
        #[arg(long, default_value_t = 1000.0)]
        rmax: f64,
        #[arg(long, default_value_t = 31)]
        count: usize,
        #[arg(long, default_value = "0,1,1,0")]
        a2: String,
        #[arg(long, default_value = "1,0,0,0")]
        a3: String,
    },
}

struct Usage(String);

/// Report plus optional CSV body.
struct Outcome {
    report: RunReport,
    csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(mut outcome) => {
            if cli.timing {
                outcome.report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            let body = match cli.format {
                Format::Json => outcome.report.to_json() + "\n",
                Format::Csv => match outcome.csv {
                    Some(c) => c,
                    None => {
                        eprintln!("error: --format csv is not available for this command");
                        return ExitCode::from(2);
                    }
                },
            };
            let written = match &cli.out {
                Some(path) => std::fs::write(path, body).map_err(|e| e.to_string()),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if outcome.report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn need_seed(cli: &Cli) -> Result<u64, Usage> {
    cli.seed.ok_or_else(|| Usage("this command is stochastic and needs --seed".into()))
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn parse_vec4(text: &str) -> Result<Vector4<f64>, Usage> {
    let vals: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == 4 => Ok(Vector4::from_vec(v)),
        _ => Err(Usage(format!("expected four comma-separated numbers, got `{text}`"))),
    }
}

fn affine_base(a2: &str, a3: &str) -> Result<pde::AffineMap, Usage> {
    Ok(pde::affine_fueter(parse_vec4(a2)?, parse_vec4(a3)?, Vector4::zeros()))
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    let profile = match cli.profile {
        ProfileArg::Strict => Profile::Strict,
        ProfileArg::Fast => Profile::Fast,
    };
    let echo = command_echo();
    let done = |checks: Vec<Check>, data: Option<Value>, csv: Option<String>, seed: Option<u64>| Outcome {
        report: RunReport::new(&echo, seed, profile, checks, data),
        csv,
    };
    match &cli.cmd {
        Cmd::Verify { target } => {
            let name = match target {
                Target::Algebra => "algebra",
                Target::Splitting => "splitting",
                Target::Fueter => "fueter",
                Target::Models => "models",
                Target::Pde => "pde",
                Target::Fm => "fm",
            };
            let seed = if *target == Target::Models { cli.seed } else { Some(need_seed(cli)?) };
            let (checks, data) = report::verify(name, seed.unwrap_or(0), cli.samples, profile).expect("known target");
            Ok(done(checks, data, None, seed))
        }
        Cmd::Scan { kind, form, scale } => {
            let seed = need_seed(cli)?;
            let tol = cli.tol.unwrap_or(profile.tol().unwrap_or(1e-10));
            let n = cli.samples.unwrap_or(profile.samples(100_000));
            match kind {
                ScanKind::Semical => {
                    let a = if form == "phi" {
                        phi0()
                    } else {
                        Form::parse(7, 3, form).map_err(|e| Usage(format!("bad --form: {e}")))?
                    };
                    let scan = splitting::semi_calibration_scan(&a, &Mat7::identity(), &PlaneSampler::default(), n, seed, tol);
                    let checks = vec![Check::value(
                        "no sampled plane exceeds the volume",
                        "semi-calibration inequality",
                        json!(scan.violations),
                        scan.violations == 0,
                    )];
                    Ok(done(checks, Some(json!(scan)), None, Some(seed)))
                }
                ScanKind::Anisotropic => {
                    let sampler = GraphSampler {
                        anchors: Vec::new(),
                        scale: *scale,
                    };
                    let scan = splitting::anisotropic_scan(&Splitting::standard(), &sampler, n, seed, tol);
                    let checks = vec![
                        Check::value(
                            "ω ≤ ve₁ on sampled planes",
                            "anisotropic calibration inequality",
                            json!(scan.violations),
                            scan.violations == 0,
                        ),
                        Check::value(
                            "ω + ½|χ₁|² = ve₁ on sampled planes",
                            "anisotropic calibration identity",
                            json!(scan.identity_violations),
                            scan.identity_violations == Some(0),
                        ),
                    ];
                    Ok(done(checks, Some(json!(scan)), None, Some(seed)))
                }
            }
        }
        Cmd::Model { name, b, homology } => {
            let model = match (name.as_str(), b) {
                ("heisenberg", Some(text)) => {
                    LieAlgebraModel::heisenberg(&models::parse_matrix3(text).map_err(|e| Usage(e.to_string()))?)
                }
                (_, Some(_)) => return Err(Usage("--B only applies to the heisenberg model".into())),
                (other, None) => models::catalog(other).map_err(|e| Usage(e.to_string()))?,
            };
            let flags = model.closedness();
            let jac = jacobi_check(model.constants());
            let d_coframe: Vec<String> = (1..=7).map(|k| model.d_coframe(k).render()).collect();
            let mut data = json!({
                "model": model.name(),
                "dCoframe": d_coframe,
                "flags": flags,
            });
            let mut checks = vec![Check::exact("jacobi identity", "structure constants", jac)];
            if *homology {
                let text = b
                    .as_deref()
                    .filter(|_| name == "heisenberg")
                    .ok_or_else(|| Usage("--homology needs the heisenberg model with --B".into()))?;
                let m = models::parse_matrix3(text).map_err(|e| Usage(e.to_string()))?;
                if m.iter().flatten().any(|x| x.fract() != 0.0) {
                    return Err(Usage("--homology needs an integer matrix".into()));
                }
                let mi: [[i64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] as i64));
                let h = h1_nilmanifold(&mi).map_err(|e| Usage(e.to_string()))?;
                data["homology"] = json!({
                    "group": h.describe(),
                    "freeRank": h.free_rank,
                    "torsion": h.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                });
                checks.push(Check::flag("first homology computed", "first homology of nilmanifolds", true));
            }
            Ok(done(checks, Some(data), None, cli.seed))
        }
        Cmd::Solve {
            kind,
            harmonic,
            a2,
            a3,
            grid,
        } => solve(cli, *kind, *harmonic, a2, a3, *grid, profile, &done),
        Cmd::Energy {
            a2,
            a3,
            amplitude,
            grid,
            kmax,
        } => {
            let seed = need_seed(cli)?;
            let base = affine_base(a2, a3)?;
            let section = ImmersionGrid::section(&base, *grid);
            let energies = pde::immersion_energies(&section).map_err(|e| Usage(e.to_string()))?;
            let cfg = pde::MinimizationConfig {
                samples: cli.samples.unwrap_or(profile.samples(200)),
                amplitude: *amplitude,
                seed,
                grid: *grid,
                kmax: *kmax,
                counter_field: None,
            };
            let checks;
            let data;
            match pde::minimization_experiment(&base, &cfg) {
                Ok(m) => {
                    checks = vec![
                        Check::value(
                            "VE(base) ≤ VE(perturbed)",
                            "Fueter sections minimize VE",
                            json!(m.violations_ve),
                            m.violations_ve == 0,
                        ),
                        Check::value(
                            "(VE + Vol^H)(base) ≤ (VE + Vol^H)(perturbed)",
                            "Fueter sections minimize VE + Vol^H",
                            json!(m.violations_ve_plus_vol_h),
                            m.violations_ve_plus_vol_h == 0,
                        ),
                        Check::residual(
                            "½|dι|² = 3/2 + ve₁ pointwise",
                            "energy density identity",
                            energies.max_pointwise_identity_residual,
                            1e-10,
                        ),
                    ];
                    data = json!({ "energies": energies, "minimization": m });
                }
                Err(e) => {
                    checks = vec![Check::value("base section is Fueter", "minimizing property", json!(e.to_string()), false)];
                    data = json!({ "energies": energies });
                }
            }
            Ok(done(checks, Some(data), Some(section.to_csv()), Some(seed)))
        }
        Cmd::Fm {
            cmd: FmCmd::Sweep {
                rmin,
                rmax,
                count,
                a2,
                a3,
            },
        } => {
            if !(*rmin > 0.0 && rmax > rmin && *count >= 2) {
                return Err(Usage("need 0 < rmin < rmax and count >= 2".into()));
            }
            let c = fm::fm_transform(affine_base(a2, a3)?);
            let sweep =
                fm::radius_sweep(&c, &[0.0; 3], &fm::log_radii(*rmin, *rmax, *count)).map_err(|e| Usage(e.to_string()))?;
            let checks = vec![Check::residual(
                "normalized dDT gap decays like r⁻⁴",
                "large radius limit of dDT",
                (sweep.slope + 4.0).abs(),
                0.1,
            )];
            let csv = sweep.to_csv();
            Ok(done(checks, Some(json!(sweep)), Some(csv), cli.seed))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    cli: &Cli,
    kind: SolveKind,
    harmonic: Harmonic,
    a2: &str,
    a3: &str,
    grid: usize,
    profile: Profile,
    done: &dyn Fn(Vec<Check>, Option<Value>, Option<String>, Option<u64>) -> Outcome,
) -> Result<Outcome, Usage> {
    let tol = cli.tol.unwrap_or(profile.tol().unwrap_or(1e-10));
    match kind {
        SolveKind::FlatHarmonic => {
            let pts = pde::grid_points(grid);
            let u: Box<dyn AnalyticMap> = match harmonic {
                Harmonic::Quadratic => {
                    let p = |t: Vec<(f64, Vec<u32>)>| pde::Polynomial::new(3, t);
                    let f = pde::PolynomialMap::new(vec![
                        p(vec![(1.0, vec![2, 0, 0]), (-1.0, vec![0, 2, 0])]),
                        pde::Polynomial::zero(3),
                        pde::Polynomial::zero(3),
                        pde::Polynomial::zero(3),
                    ]);
                    Box::new(pde::harmonic_to_fueter(f, &pts).map_err(|e| Usage(e.to_string()))?)
                }
                Harmonic::Newton => {
                    let f = pde::NewtonianPotential {
                        center: nalgebra::Vector3::new(-0.5, -0.5, -0.5),
                        v0: Vector4::new(1.0, 0.0, 0.0, 0.0),
                    };
                    Box::new(pde::harmonic_to_fueter(f, &pts).map_err(|e| Usage(e.to_string()))?)
                }
            };
            let res = pts.iter().map(|x| pde::fueter_operator_flat(u.as_ref(), x).amax()).fold(0.0, f64::max);
            let checks = vec![Check::residual("Du = 0 on the grid", "Fueter sections from harmonic maps", res, tol)];
            let csv = ImmersionGrid::section(u.as_ref(), grid).to_csv();
            Ok(done(checks, Some(json!({ "maxResidual": res, "grid": grid })), Some(csv), cli.seed))
        }
        SolveKind::Affine => {
            let u = affine_base(a2, a3)?;
            let res = pde::max_fueter_residual(&u, grid);
            let cols: Vec<Vec<f64>> = (0..3).map(|i| u.a.column(i).iter().cloned().collect()).collect();
            let periodic = u.periodicity().is_some();
            let checks = vec![Check::residual("Du = 0", "affine Fueter sections", res, tol)];
            let data = json!({ "columns": cols, "descendsToTorus": periodic, "maxResidual": res });
            Ok(done(checks, Some(data), Some(ImmersionGrid::section(&u, grid).to_csv()), cli.seed))
        }
        SolveKind::Su2 => {
            let seed = need_seed(cli)?;
            let n = cli.samples.unwrap_or(profile.samples(100)).max(1);
            let f = pde::CotPotential {
                center: Vector4::new(0.0, 0.0, 1.0, 0.0),
                a: 1.0 / (4.0 * std::f64::consts::PI),
                b: 0.0,
                v0: Vector4::new(1.0, -1.0, 0.5, 2.0),
            };
            let u = pde::Su2DPlus2 { inner: f.clone() };
            let mut rows = Vec::new();
            let mut csv = String::from("h0,h1,h2,h3,u0,u1,u2,u3,residual\n");
            let mut worst: f64 = 0.0;
            let mut skipped = 0;
            for i in 0..n {
                let h = pde::random_unit_quaternion(&mut rng::stream(seed, i as u64));
                if f.near_singularity(h.as_slice(), 1e-3) {
                    skipped += 1;
                    continue;
                }
                let val = u.value(h.as_slice());
                let r = pde::su2_fueter_operator(&u, h.as_slice()).amax();
                worst = worst.max(r);
                let line: Vec<String> = h.iter().chain(val.iter()).map(|v| v.to_string()).collect();
                csv.push_str(&format!("{},{}\n", line.join(","), r));
                rows.push(json!({ "h": h.as_slice(), "u": val, "residual": r }));
            }
            let checks = vec![Check::residual(
                "(D + 2)F is Fueter for harmonic F",
                "Fueter sections on SU(2)",
                worst,
                cli.tol.unwrap_or(1e-8),
            )];
            let data = json!({ "samples": rows, "skipped": skipped, "maxResidual": worst });
            Ok(done(checks, Some(data), Some(csv), Some(seed)))
        }
    }
}
