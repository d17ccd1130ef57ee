//! Batch CLI for the 2D Helmholtz layer-potential solver: geometry loading,
//! boundary value solves, eigenvalue scans, verification suites and CSV/JSON
//! emission for external plotting.
//!
//! Exit codes: 0 success, 2 when a solve hits an incompatible datum
//! (NOT-SOLVABLE), 1 on any error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use helmholtz::bvp::{self, BvpSpec, Problem};
use helmholtz::geometry::{build_grid, Domain, QuadGrid, Region};
use helmholtz::linalg;
use helmholtz::nystrom;
use helmholtz::oracle;
use helmholtz::potentials::{self, Density};
use helmholtz::specfun;
use helmholtz::spectra::{self, ScanRole};
use helmholtz::Wavenumber;

const EXIT_NOT_SOLVABLE: i32 = 2;

#[derive(Parser)]
#[command(name = "helmholtz", about = "2D Helmholtz layer-potential solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a boundary value problem and write densities, far field and a
    /// summary.
    Solve(SolveArgs),
    /// Scan the smallest singular value of a spectral operator over a
    /// wavenumber range and refine the roots.
    Scan(ScanArgs),
    /// Run a verification suite and exit nonzero when its defect exceeds
    /// the threshold.
    Verify(VerifyArgs),
    /// Solve and sample the reconstruction on a rectangular grid.
    Field(FieldArgs),
    /// Dump analytic reference values (Bessel zeros, Mie series).
    Oracle(OracleArgs),
}

#[derive(Args, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveArgs {
    /// Geometry JSON path.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// One of interior-dirichlet, exterior-dirichlet, interior-neumann,
    /// exterior-neumann.
    #[arg(long)]
    problem: Option<String>,
    /// Wavenumber as "re,im".
    #[arg(long)]
    k: Option<String>,
    /// Nodes per curve (even).
    #[arg(long)]
    n: Option<usize>,
    /// Plane-wave scattering data: "plane:dx,dy" sets g to the negative
    /// incident trace (Dirichlet) or normal derivative (Neumann).
    #[arg(long)]
    incident: Option<String>,
    /// Point-source data: "x,y" sets g to the trace (Dirichlet) or normal
    /// derivative (Neumann) of the fundamental solution centred there.
    #[arg(long)]
    source: Option<String>,
    /// Explicit node values: CSV with one "re,im" row per node.
    #[arg(long)]
    data_csv: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Radius of the far-field sampling circle.
    #[arg(long)]
    farfield_radius: Option<f64>,
    /// Number of far-field angles.
    #[arg(long)]
    farfield_angles: Option<usize>,
    /// JSON job file supplying defaults for any of the above (flags win).
    #[arg(long)]
    #[serde(skip)]
    job: Option<PathBuf>,
}

impl SolveArgs {
    fn merge(self, file: SolveArgs) -> SolveArgs {
        SolveArgs {
            geometry: self.geometry.or(file.geometry),
            problem: self.problem.or(file.problem),
            k: self.k.or(file.k),
            n: self.n.or(file.n),
            incident: self.incident.or(file.incident),
            source: self.source.or(file.source),
            data_csv: self.data_csv.or(file.data_csv),
            out_dir: self.out_dir.or(file.out_dir),
            farfield_radius: self.farfield_radius.or(file.farfield_radius),
            farfield_angles: self.farfield_angles.or(file.farfield_angles),
            job: None,
        }
    }
}

#[derive(Args, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanArgs {
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// One of interior-dirichlet, interior-neumann,
    /// exterior-dirichlet-bounded.
    #[arg(long)]
    role: Option<String>,
    /// Range as "lo,hi".
    #[arg(long)]
    k_range: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    job: Option<PathBuf>,
}

impl ScanArgs {
    fn merge(self, file: ScanArgs) -> ScanArgs {
        ScanArgs {
            geometry: self.geometry.or(file.geometry),
            role: self.role.or(file.role),
            k_range: self.k_range.or(file.k_range),
            samples: self.samples.or(file.samples),
            n: self.n.or(file.n),
            out_dir: self.out_dir.or(file.out_dir),
            job: None,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// One of jumps, specfun, radiation.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    geometry: Option<PathBuf>,
    #[arg(long, default_value = "2,0")]
    k: String,
    #[arg(long, default_value_t = 128)]
    n: usize,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Grid as "xmin,xmax,ymin,ymax,nx,ny"; refusal-band points are emitted
    /// with empty value cells.
    #[arg(long)]
    grid: String,
}

#[derive(Args)]
struct OracleArgs {
    /// One of bessel-zeros, mie.
    #[arg(long)]
    what: String,
    #[arg(long, default_value = "2,0")]
    k: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value = "1,0")]
    direction: String,
    #[arg(long, default_value_t = 2.0)]
    eval_radius: f64,
    #[arg(long, default_value_t = 64)]
    angles: usize,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Field(args) => cmd_field(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn parse_pair(text: &str, what: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!(
            "{what} must be two comma-separated numbers, got '{text}'"
        ));
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{what}: {e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{what}: {e}"))?;
    Ok([a, b])
}

fn parse_k(text: &str) -> Result<Wavenumber, Box<dyn std::error::Error>> {
    let [re, im] = parse_pair(text, "k")?;
    Ok(Wavenumber::new(Complex64::new(re, im))?)
}

fn load_job<T: for<'de> Deserialize<'de> + Default>(
    path: &Option<PathBuf>,
) -> Result<T, Box<dyn std::error::Error>> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(T::default()),
    }
}

fn require<T>(opt: Option<T>, flag: &str) -> Result<T, String> {
    opt.ok_or_else(|| format!("missing required option --{flag}"))
}

struct SolveSetup {
    grid: QuadGrid,
    spec: BvpSpec,
    n: usize,
}

fn build_solve_setup(args: &SolveArgs) -> Result<SolveSetup, Box<dyn std::error::Error>> {
    let geometry = require(args.geometry.clone(), "geometry")?;
    let problem = Problem::parse(&require(args.problem.clone(), "problem")?)?;
    let k = parse_k(&require(args.k.clone(), "k")?)?;
    let n = args.n.unwrap_or(128);
    let domain = Domain::from_json_file(&geometry)?;
    let grid = build_grid(&domain, n)?;

    let data = if let Some(incident) = &args.incident {
        let spec = incident
            .strip_prefix("plane:")
            .ok_or("incident data must look like plane:dx,dy")?;
        let d = parse_pair(spec, "incident direction")?;
        let dn = d[0].hypot(d[1]);
        let d = [d[0] / dn, d[1] / dn];
        let kk = k.value();
        let field = |x: [f64; 2]| (Complex64::i() * kk * (x[0] * d[0] + x[1] * d[1])).exp();
        if problem.is_dirichlet() {
            Density::from_point_fn(&grid, |x| -field(x))
        } else {
            let values = (0..grid.node_count())
                .map(|i| {
                    let x = grid.point(i);
                    let nu = grid.normal(i);
                    let grad_dot_nu = Complex64::i() * kk * (d[0] * nu[0] + d[1] * nu[1]);
                    -grad_dot_nu * field(x)
                })
                .collect();
            Density::new(&grid, values)?
        }
    } else if let Some(source) = &args.source {
        let x0 = parse_pair(source, "source")?;
        let (u, un) = potentials::point_source_traces(k, &grid, x0)?;
        if problem.is_dirichlet() {
            u
        } else {
            un
        }
    } else if let Some(path) = &args.data_csv {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("re") || line.starts_with('#') {
                continue;
            }
            let [re, im] = parse_pair(line, "data row")?;
            values.push(Complex64::new(re, im));
        }
        Density::new(&grid, values)?
    } else {
        return Err("one of --incident, --source, --data-csv is required".into());
    };

    Ok(SolveSetup {
        grid,
        spec: BvpSpec { problem, k, data },
        n,
    })
}

fn write_density_csv(
    path: &Path,
    grid: &QuadGrid,
    phi: &Density,
    psi: &Density,
) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "node,t,re,im")?;
    let n = grid.node_count();
    for (block, density) in [(0, phi), (1, psi)] {
        for i in 0..n {
            let z = density[i];
            writeln!(
                f,
                "{},{:.17e},{:.17e},{:.17e}",
                block * n + i,
                grid.param(i),
                z.re,
                z.im
            )?;
        }
    }
    Ok(())
}

fn write_field_row(
    f: &mut impl Write,
    x: [f64; 2],
    value: Option<Complex64>,
    region: Region,
) -> std::io::Result<()> {
    match value {
        Some(z) => writeln!(
            f,
            "{:.17e},{:.17e},{:.17e},{:.17e},{}",
            x[0], x[1], z.re, z.im, region
        ),
        None => writeln!(f, "{:.17e},{:.17e},,,{}", x[0], x[1], region),
    }
}

fn summary_json(
    spec: &BvpSpec,
    n: usize,
    sol: &bvp::Solution,
    wall_time_ms: u128,
) -> serde_json::Value {
    serde_json::json!({
        "problem": spec.problem.name(),
        "k": [spec.k.value().re, spec.k.value().im],
        "N": n,
        "residual": sol.residual,
        "compatibility_defect": sol.compatibility_defect,
        "kernel_dim": sol.kernel_dim,
        "solvable": sol.solvable,
        "wall_time_ms": wall_time_ms,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let file: SolveArgs = load_job(&args.job)?;
    let args = args.merge(file);
    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let start = Instant::now();
    let setup = build_solve_setup(&args)?;
    let sol = bvp::solve(&setup.grid, &setup.spec)?;
    let wall = start.elapsed().as_millis();

    write_density_csv(&out_dir.join("density.csv"), &setup.grid, &sol.phi, &sol.psi)?;

    let radius = args
        .farfield_radius
        .unwrap_or_else(|| 10.0_f64.max(4.0 * setup.grid.domain().max_radius()));
    let angles = args.farfield_angles.unwrap_or(64);
    let center = setup.grid.domain().centroid();
    let mut f = std::fs::File::create(out_dir.join("farfield.csv"))?;
    writeln!(f, "x,y,re,im,region")?;
    for a in 0..angles {
        let th = a as f64 * std::f64::consts::TAU / angles as f64;
        let x = [center[0] + radius * th.cos(), center[1] + radius * th.sin()];
        let region = setup.grid.locate(x);
        let value = sol.eval(&setup.grid, x)?;
        write_field_row(&mut f, x, Some(value), region)?;
    }

    let summary = summary_json(&setup.spec, setup.n, &sol, wall);
    std::fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!("{summary}");
    Ok(if sol.solvable { 0 } else { EXIT_NOT_SOLVABLE })
}

fn cmd_scan(args: ScanArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let file: ScanArgs = load_job(&args.job)?;
    let args = args.merge(file);
    let geometry = require(args.geometry.clone(), "geometry")?;
    let role = ScanRole::parse(&require(args.role.clone(), "role")?)?;
    let [lo, hi] = parse_pair(&require(args.k_range.clone(), "k-range")?, "k-range")?;
    let samples = args.samples.unwrap_or(200);
    let n = args.n.unwrap_or(128);
    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;

    let domain = Domain::from_json_file(&geometry)?;
    let grid = build_grid(&domain, n)?;
    let start = Instant::now();
    let scan = spectra::eigen_scan(role, &grid, (lo, hi), samples)?;
    let wall = start.elapsed().as_millis();

    let mut f = std::fs::File::create(out_dir.join("scan.csv"))?;
    writeln!(f, "k,sigma_min")?;
    for (k, s) in scan.k_samples.iter().zip(&scan.sigma_min) {
        writeln!(f, "{k:.17e},{s:.17e}")?;
    }
    let roots = serde_json::json!({
        "role": role.name(),
        "k_range": [lo, hi],
        "samples": samples,
        "N": n,
        "wall_time_ms": wall,
        "roots": scan.roots.iter().map(|r| {
            serde_json::json!({"k": r.k, "dim": r.kernel_dim})
        }).collect::<Vec<_>>(),
    });
    std::fs::write(
        out_dir.join("roots.json"),
        serde_json::to_string_pretty(&roots)?,
    )?;
    println!("{roots}");
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, Box<dyn std::error::Error>> {
    match args.suite.as_str() {
        "jumps" => {
            let geometry = require(args.geometry.clone(), "geometry")?;
            let domain = Domain::from_json_file(&geometry)?;
            let grid = build_grid(&domain, args.n)?;
            let k = parse_k(&args.k)?;
            let defect = jump_suite_defect(k, &grid);
            println!("max jump-relation defect: {defect:.3e}");
            Ok(if defect < 1e-6 { 0 } else { 1 })
        }
        "specfun" => {
            let defect = wronskian_defect();
            println!("max Wronskian defect: {defect:.3e}");
            Ok(if defect < 1e-10 { 0 } else { 1 })
        }
        "radiation" => {
            let geometry = require(args.geometry.clone(), "geometry")?;
            let domain = Domain::from_json_file(&geometry)?;
            let grid = build_grid(&domain, args.n)?;
            let k = parse_k(&args.k)?;
            let scale = grid.domain().max_radius().max(1.0);
            let mu = Density::constant(&grid, Complex64::new(1.0, 0.0));
            let zero = Density::zeros(&grid);
            let radii = [10.0 * scale, 100.0 * scale];
            let res = potentials::radiation_residual(k, &grid, &mu, &zero, &radii)?;
            println!("radiation residuals at r = {radii:?}: {res:?}");
            Ok(if res[1] < res[0] / 3.0 { 0 } else { 1 })
        }
        other => Err(format!("unknown suite '{other}'").into()),
    }
}

/// Worst of: duality pairing defect between W and Wt, the one-sided trace
/// difference against the density, and the weighted symmetry of V.
fn jump_suite_defect(k: Wavenumber, grid: &QuadGrid) -> f64 {
    let w_op = nystrom::assemble_w(k, grid);
    let wt_op = nystrom::assemble_wt(k, grid);
    let v_op = nystrom::assemble_v(k, grid);
    let wts = grid.weights();
    let mu = Density::from_param_fn(grid, |_, t| {
        Complex64::new((t.cos()).exp(), (2.0 * t).sin())
    });
    let sigma = Density::from_param_fn(grid, |_, t| {
        Complex64::new((3.0 * t).cos(), 0.4 - t.sin())
    });

    let pair = |f: &[Complex64], g: &[Complex64]| -> Complex64 {
        f.iter().zip(g).zip(&wts).map(|((a, b), &w)| a * b * w).sum()
    };
    let lhs = pair(&w_op.apply(&mu), sigma.values());
    let rhs = pair(mu.values(), &wt_op.apply(&sigma));
    let duality = (lhs - rhs).norm() / lhs.norm().max(1e-12);

    // (+1/2 I + W) - (-1/2 I + W) applied to mu is mu itself
    let w_mu = w_op.apply(&mu);
    let jump_defect = {
        let diff: Vec<Complex64> = (0..grid.node_count())
            .map(|i| (0.5 * mu[i] + w_mu[i]) - (-0.5 * mu[i] + w_mu[i]) - mu[i])
            .collect();
        linalg::weighted_norm(&diff, &wts) / linalg::weighted_norm(mu.values(), &wts)
    };

    let mut v_sym: f64 = 0.0;
    let mut v_scale: f64 = 0.0;
    for i in 0..grid.node_count() {
        for j in 0..grid.node_count() {
            let a = wts[i] * v_op.matrix[[i, j]];
            let b = wts[j] * v_op.matrix[[j, i]];
            v_sym = v_sym.max((a - b).norm());
            v_scale = v_scale.max(a.norm());
        }
    }

    duality.max(jump_defect).max(v_sym / v_scale.max(1e-300))
}

fn wronskian_defect() -> f64 {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = 0.1 + 49.9 * next();
        let zc = Complex64::new(z, 0.0);
        let w = specfun::bessel_j(0, zc) * specfun::bessel_y(1, zc).unwrap()
            - specfun::bessel_j(1, zc) * specfun::bessel_y(0, zc).unwrap();
        let expect = -2.0 / (std::f64::consts::PI * z);
        worst = worst.max((w.re - expect).abs() / expect.abs());
    }
    worst
}

fn cmd_field(args: FieldArgs) -> Result<i32, Box<dyn std::error::Error>> {
    let file: SolveArgs = load_job(&args.solve.job)?;
    let solve_args = args.solve.clone().merge(file);
    let out_dir = solve_args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let parts: Vec<&str> = args.grid.split(',').collect();
    if parts.len() != 6 {
        return Err("grid must be xmin,xmax,ymin,ymax,nx,ny".into());
    }
    let xmin: f64 = parts[0].trim().parse()?;
    let xmax: f64 = parts[1].trim().parse()?;
    let ymin: f64 = parts[2].trim().parse()?;
    let ymax: f64 = parts[3].trim().parse()?;
    let nx: usize = parts[4].trim().parse()?;
    let ny: usize = parts[5].trim().parse()?;
    if nx < 2 || ny < 2 {
        return Err("field grid needs at least 2 points per axis".into());
    }

    let start = Instant::now();
    let setup = build_solve_setup(&solve_args)?;
    let sol = bvp::solve(&setup.grid, &setup.spec)?;
    let wall = start.elapsed().as_millis();

    let mut f = std::fs::File::create(out_dir.join("field.csv"))?;
    writeln!(f, "x,y,re,im,region")?;
    for iy in 0..ny {
        for ix in 0..nx {
            let x = [
                xmin + (xmax - xmin) * ix as f64 / (nx - 1) as f64,
                ymin + (ymax - ymin) * iy as f64 / (ny - 1) as f64,
            ];
            let region = setup.grid.locate(x);
            if region == Region::NearBoundary {
                write_field_row(&mut f, x, None, region)?;
            } else {
                write_field_row(&mut f, x, Some(sol.eval(&setup.grid, x)?), region)?;
            }
        }
    }
    let summary = summary_json(&setup.spec, setup.n, &sol, wall);
    std::fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!("{summary}");
    Ok(if sol.solvable { 0 } else { EXIT_NOT_SOLVABLE })
}

fn cmd_oracle(args: OracleArgs) -> Result<i32, Box<dyn std::error::Error>> {
    match args.what.as_str() {
        "bessel-zeros" => {
            use oracle::BesselZeroKind::*;
            let table: Vec<(&str, oracle::BesselZeroKind)> = vec![
                ("J0", J0),
                ("J1", J1),
                ("J0'", J0Prime),
                ("J1'", J1Prime),
                ("J2'", J2Prime),
            ];
            let mut map = serde_json::Map::new();
            for (name, kind) in table {
                let zeros: Vec<f64> = (1..=3).map(|i| oracle::bessel_zero(kind, i)).collect();
                map.insert(name.to_string(), serde_json::json!(zeros));
            }
            println!("{}", serde_json::to_string_pretty(&map)?);
            Ok(0)
        }
        "mie" => {
            let k = parse_k(&args.k)?;
            let d = parse_pair(&args.direction, "direction")?;
            let sol = oracle::MieSolution::new(k, args.radius, d);
            let mut out = String::from("x,y,re,im,region\n");
            for a in 0..args.angles {
                let th = a as f64 * std::f64::consts::TAU / args.angles as f64;
                let x = [args.eval_radius * th.cos(), args.eval_radius * th.sin()];
                let z = sol.scattered(x);
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e},exterior-unbounded\n",
                    x[0], x[1], z.re, z.im
                ));
            }
            print!("{out}");
            Ok(0)
        }
        other => Err(format!("unknown oracle dump '{other}'").into()),
    }
}
