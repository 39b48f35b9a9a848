//! Command-line frontend: characteristic roots, pointwise and grid
//! evaluation, oracle validation, decoupled-limit checks, and point-source
//! field superposition.
//!
//! Data goes to standard output or `--out`; diagnostics go to standard error.
//! Exit codes: 0 on success, 1 when a computation or validation fails, 2 on a
//! usage error. Output is byte-identical across runs with identical inputs:
//! sample points come from a seeded generator, and parallel evaluation (capped
//! by `PIEZOGREEN_THREADS`; 0 or unset picks the core count) assembles results
//! in input order.

use clap::{Args, Parser, Subcommand, ValueEnum};
use piezogreen::decoupled::decoupled_consistency;
use piezogreen::field::{parse_points, parse_sources, superpose};
use piezogreen::{relative_deviation, solve_spectrum, GreensEvaluator, MaterialModuli, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Acceptance bound for `validate`: the run exits 0 exactly when the largest
/// blockwise relative deviation between the closed form and the quadrature
/// stays below this.
const VALIDATE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "piezogreen",
    version,
    about = "Point-source response of an infinite hexagonal piezoelectric medium",
    long_about = "Evaluates the coupled elastic/electric 4x4 response of an infinite \
                  hexagonal piezoelectric medium to point forces and point charges, \
                  in closed form with an independent angular-quadrature cross-check. \
                  All quantities are SI: positions in m, stiffness in Pa, \
                  piezoelectric constants in C/m^2, permittivity in F/m."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MaterialArg {
    /// Material constants file: `key = value` lines for c11, c33, c44, c66,
    /// c13, e15, e31, e33, eta11, eta33 (SI), `#` comments
    #[arg(long)]
    material: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Repr {
    /// Full 4x4 Cartesian matrix
    Cart,
    /// Azimuth-independent cylindrical components
    Cyl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Labeled human-readable listing
    Pretty,
    /// CSV with a header row
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisPlane {
    /// Meridional half-plane (radius, height); the only plane the matrix
    /// depends on
    Rz,
}

/// Inclusive `start:stop:count` range; `count = 1` degenerates to `start`.
#[derive(Clone, Copy)]
struct Span {
    start: f64,
    stop: f64,
    count: usize,
}

impl Span {
    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

fn parse_span(raw: &str) -> std::result::Result<Span, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(format!("expected `start:stop:count`, got `{raw}`"));
    };
    let start: f64 = start
        .parse()
        .map_err(|_| format!("`{start}` is not a number"))?;
    let stop: f64 = stop
        .parse()
        .map_err(|_| format!("`{stop}` is not a number"))?;
    let count: usize = count
        .parse()
        .map_err(|_| format!("`{count}` is not a positive integer"))?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err("range endpoints must be finite".into());
    }
    if count == 0 {
        return Err("range needs at least one sample".into());
    }
    Ok(Span { start, stop, count })
}

fn parse_point(raw: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = raw.split(',').collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected `x,y,z`, got `{raw}`"));
    };
    let mut out: [f64; 3] = [0.0; 3];
    for (slot, text) in out.iter_mut().zip([x, y, z]) {
        *slot = text
            .trim()
            .parse()
            .map_err(|_| format!("`{text}` is not a number"))?;
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok(out)
}

#[derive(Subcommand)]
enum Command {
    /// Print the characteristic cubic, its roots and degeneracy diagnostics
    Roots {
        #[command(flatten)]
        material: MaterialArg,
        /// Probe point `x,y,z` [m] for the residue magnitudes |s_l|
        #[arg(long, default_value = "1,0,0.5", value_parser = parse_point, allow_hyphen_values = true)]
        point: [f64; 3],
    },
    /// Evaluate the 4x4 response matrix at one point
    Eval {
        #[command(flatten)]
        material: MaterialArg,
        /// Evaluation point `x,y,z` [m]
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: [f64; 3],
        /// Representation of the result
        #[arg(long, value_enum, default_value_t = Repr::Cart)]
        repr: Repr,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Tabulate the matrix over a radius/height grid as CSV
    Grid {
        #[command(flatten)]
        material: MaterialArg,
        /// Sampling plane
        #[arg(long, value_enum, default_value_t = AxisPlane::Rz)]
        axis_plane: AxisPlane,
        /// Radius range `start:stop:count` [m]; outer loop of the CSV rows
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        rho: Span,
        /// Height range `start:stop:count` [m]; inner loop of the CSV rows
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        z: Span,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed form against the angular quadrature at seeded points
    Validate {
        #[command(flatten)]
        material: MaterialArg,
        /// Number of sample points
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
        /// Angular quadrature nodes (even, at least 8)
        #[arg(long, default_value_t = 2048)]
        nodes: u64,
        /// Seed for the point sampler
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Check that a coupling-free material collapses onto the classical
    /// elastic and Coulomb results
    Decoupled {
        #[command(flatten)]
        material: MaterialArg,
    },
    /// Superpose point-force/point-charge responses at sample points
    Field {
        #[command(flatten)]
        material: MaterialArg,
        /// Sources file: `x y z F1 F2 F3 F4` per line, F4 = minus the charge
        #[arg(long)]
        sources: PathBuf,
        /// Points file: `x y z` per line
        #[arg(long)]
        points: PathBuf,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    configure_threads();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Applies `PIEZOGREEN_THREADS` to the global worker pool before any
/// parallel work runs. Zero or unset keeps the automatic core count.
fn configure_threads() {
    let Ok(raw) = std::env::var("PIEZOGREEN_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: could not apply PIEZOGREEN_THREADS={n}: {e}");
            }
        }
        Err(_) => eprintln!(
            "warning: PIEZOGREEN_THREADS={raw:?} is not a thread count; using automatic parallelism"
        ),
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Roots { material, point } => cmd_roots(&material, point),
        Command::Eval {
            material,
            point,
            repr,
            format,
        } => cmd_eval(&material, point, repr, format),
        Command::Grid {
            material,
            axis_plane: AxisPlane::Rz,
            rho,
            z,
            out,
        } => cmd_grid(&material, rho, z, out.as_deref()),
        Command::Validate {
            material,
            points,
            nodes,
            seed,
        } => cmd_validate(&material, points as usize, nodes as usize, seed),
        Command::Decoupled { material } => cmd_decoupled(&material),
        Command::Field {
            material,
            sources,
            points,
            out,
        } => cmd_field(&material, &sources, &points, out.as_deref()),
    }
}

fn writer(out: Option<&std::path::Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn join_csv(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

const MATRIX_CSV_HEADER: &str = "G11,G12,G13,G14,G22,G23,G24,G33,G34,G44";

fn cmd_roots(material: &MaterialArg, point: [f64; 3]) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let s = solve_spectrum(&m)?;
    println!("characteristic cubic coefficients (SI):");
    for (label, value) in [
        ("A", s.coeff_a),
        ("B", s.coeff_b),
        ("C", s.coeff_c),
        ("D", s.coeff_d),
    ] {
        println!("  {label} = {value:.16e}");
    }
    println!("squared slowness ratios a_l:");
    for (l, a) in s.roots.iter().enumerate() {
        println!("  a{} = {:.16e} {:+.16e}i", l + 1, a.re, a.im);
    }
    println!("relative degeneracy gap = {:.6e}", s.degeneracy_gap);
    let rho = point[0].hypot(point[1]);
    println!(
        "residue magnitudes |s_l| at ({:e}, {:e}, {:e}) m:",
        point[0], point[1], point[2]
    );
    for (l, sl) in s.residue_zeros(rho, point[2])?.iter().enumerate() {
        println!("  |s{}| = {:.16e}", l + 1, sl.norm());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(material: &MaterialArg, point: [f64; 3], repr: Repr, format: Format) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let ev = GreensEvaluator::new(&m)?;
    match repr {
        Repr::Cart => {
            let g = ev.cartesian(point)?;
            match format {
                Format::Pretty => {
                    println!(
                        "response matrix at ({:e}, {:e}, {:e}) m",
                        point[0], point[1], point[2]
                    );
                    println!("rows (u1, u2, u3, phi) against unit columns (F1, F2, F3, -Q):");
                    for row in &g.matrix {
                        println!(
                            "  {:+.16e}  {:+.16e}  {:+.16e}  {:+.16e}",
                            row[0], row[1], row[2], row[3]
                        );
                    }
                }
                Format::Csv => {
                    println!("{MATRIX_CSV_HEADER}");
                    println!("{}", join_csv(g.upper_triangle()));
                }
            }
        }
        Repr::Cyl => {
            let rho = point[0].hypot(point[1]);
            let c = ev.cylindrical(rho, point[2])?;
            let labeled = [
                ("G_phiphi", c.g_phiphi),
                ("G_rhorho", c.g_rhorho),
                ("G_rhoz", c.g_rhoz),
                ("G_zz", c.g_zz),
                ("G_rho4", c.g_rho4),
                ("G_z4", c.g_z4),
                ("G_44", c.g_44),
            ];
            match format {
                Format::Pretty => {
                    println!(
                        "azimuth-independent components at rho = {:e} m, z = {:e} m",
                        c.rho, c.z
                    );
                    for (label, value) in labeled {
                        println!("  {label:<8} = {value:+.16e}");
                    }
                }
                Format::Csv => {
                    let header: Vec<&str> =
                        ["rho", "z"].into_iter().chain(labeled.map(|(l, _)| l)).collect();
                    println!("{}", header.join(","));
                    println!(
                        "{}",
                        join_csv([c.rho, c.z].into_iter().chain(labeled.map(|(_, v)| v)))
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grid(
    material: &MaterialArg,
    rho: Span,
    z: Span,
    out: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let ev = GreensEvaluator::new(&m)?;
    let rhos = rho.values();
    let zs = z.values();
    let mut nodes = Vec::with_capacity(rhos.len() * zs.len());
    for &r in &rhos {
        for &zv in &zs {
            nodes.push([r, 0.0, zv]);
        }
    }
    let matrices = ev.batch(&nodes)?;
    let mut w = writer(out)?;
    writeln!(w, "rho,z,{MATRIX_CSV_HEADER}")?;
    for (node, g) in nodes.iter().zip(matrices.iter()) {
        writeln!(
            w,
            "{}",
            join_csv([node[0], node[2]].into_iter().chain(g.upper_triangle()))
        )?;
    }
    w.flush()?;
    if let Some(path) = out {
        eprintln!("wrote {} rows to {}", nodes.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Off-axis sample in a radius shell around the source, matching the points
/// the closed form serves directly.
fn sample_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if !(1e-4..=1.0).contains(&n2) {
            continue;
        }
        let r = rng.gen_range(0.2..3.0) / n2.sqrt();
        let p = [v[0] * r, v[1] * r, v[2] * r];
        let rho = p[0].hypot(p[1]);
        if rho > 0.05 * rho.hypot(p[2]) {
            return p;
        }
    }
}

fn cmd_validate(material: &MaterialArg, points: usize, nodes: usize, seed: u64) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let ev = GreensEvaluator::new(&m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<[f64; 3]> = (0..points).map(|_| sample_point(&mut rng)).collect();
    let deviations: Vec<f64> = samples
        .par_iter()
        .map(|p| -> Result<f64> {
            let closed = ev.cartesian(*p)?;
            let oracle = ev.via_quadrature(*p, nodes)?;
            Ok(relative_deviation(&closed, &oracle))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = deviations.iter().cloned().fold(0.0f64, f64::max);
    let mean = deviations.iter().sum::<f64>() / deviations.len() as f64;
    println!("points = {points}");
    println!("nodes = {nodes}");
    println!("seed = {seed}");
    println!("max relative deviation  = {max:.16e}");
    println!("mean relative deviation = {mean:.16e}");
    if max <= VALIDATE_TOL {
        println!("within tolerance {VALIDATE_TOL:e}");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("EXCEEDS tolerance {VALIDATE_TOL:e}");
        Ok(ExitCode::from(1))
    }
}

fn cmd_decoupled(material: &MaterialArg) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let report = decoupled_consistency(&m)?;
    println!("{report}");
    println!("max residual:                {:.3e}", report.max_residual());
    Ok(ExitCode::SUCCESS)
}

fn cmd_field(
    material: &MaterialArg,
    sources_path: &std::path::Path,
    points_path: &std::path::Path,
    out: Option<&std::path::Path>,
) -> Result<ExitCode> {
    let m = MaterialModuli::from_file(&material.material)?;
    let ev = GreensEvaluator::new(&m)?;
    let sources_text = std::fs::read_to_string(sources_path)?;
    let sources = parse_sources(&sources_text, &sources_path.display().to_string())?;
    let points_text = std::fs::read_to_string(points_path)?;
    let points = parse_points(&points_text, &points_path.display().to_string())?;
    let samples = superpose(&ev, &sources, &points)?;
    let mut w = writer(out)?;
    writeln!(w, "x,y,z,u1,u2,u3,phi")?;
    for s in &samples {
        writeln!(
            w,
            "{}",
            join_csv(s.position.into_iter().chain(s.response))
        )?;
    }
    w.flush()?;
    if let Some(path) = out {
        eprintln!(
            "wrote {} samples from {} sources to {}",
            samples.len(),
            sources.len(),
            path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}
