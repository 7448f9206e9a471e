use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sepcurv::curvature::{evaluate_pair, scan_constancy, ScanPolicy};
use sepcurv::geometry::{sample_points, solve_height, SurfacePoint};
use sepcurv::Tolerances;

use crate::certify::{self, SuiteConfig};
use crate::error::CliError;
use crate::mesh::build_mesh;
use crate::report::{self, Meta, Record, ScanReport, REPORT_FORMAT_VERSION};
use crate::specfile::{check_tolerances, LoadedSpec};
use crate::{Cli, Command, Format, TOL_ENV};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval {
            spec,
            point,
            pair,
            target_k,
        } => eval(cli, spec, point, pair.as_deref(), *target_k),
        Command::Scan { spec, out } => scan(cli, spec, out.as_deref()),
        Command::Certify {
            suite,
            dims,
            points,
        } => certify(cli, *suite, dims, *points),
        Command::Mesh {
            spec,
            out,
            resolution,
        } => mesh(cli, spec, out, *resolution),
    }
}

/// Defaults, then `$SEPCURV_TOL` for the constancy tolerance.
fn base_tolerances() -> Result<Tolerances<f64>, CliError> {
    let mut t = Tolerances::default();
    if let Ok(v) = std::env::var(TOL_ENV) {
        t.constancy = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{TOL_ENV}={v:?} is not a number")))?;
    }
    Ok(t)
}

/// `--tol` beats the spec file, which beats the environment.
fn tolerances(cli: &Cli, spec: Option<&LoadedSpec>) -> Result<Tolerances<f64>, CliError> {
    let base = base_tolerances()?;
    let mut t = match spec {
        Some(s) => s.tolerances(base)?,
        None => base,
    };
    if let Some(tol) = cli.tol {
        t.constancy = tol;
    }
    check_tolerances(&t).map_err(CliError::Usage)?;
    Ok(t)
}

fn with_stdout(f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    f(&mut lock)
        .and_then(|_| lock.flush())
        .map_err(CliError::output("stdout"))
}

fn with_file(
    path: &Path,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let target = path.display().to_string();
    let file = File::create(path).map_err(CliError::output(target.clone()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(CliError::output(target))
}

fn eval(
    cli: &Cli,
    spec_path: &Path,
    point: &[f64],
    pair: Option<&[usize]>,
    target_k: Option<f64>,
) -> Result<(), CliError> {
    let spec = LoadedSpec::load(spec_path)?;
    let tol = tolerances(cli, Some(&spec))?;
    let s = &spec.surface;
    let n = s.dim();
    let p = if point.len() == n {
        SurfacePoint::locate(s, point.to_vec(), &tol)?
    } else if point.len() + 1 == n {
        solve_height(s, point, spec.require_bracket()?, &tol)?
    } else {
        return Err(CliError::Usage(format!(
            "--point needs {n} or {} coordinates, got {}",
            n - 1,
            point.len()
        )));
    };
    let pairs: Vec<(usize, usize)> = match pair {
        Some([i, j]) => {
            if *i == 0 || *j == 0 {
                return Err(CliError::Usage("--pair indices are 1-based".into()));
            }
            vec![(i - 1, j - 1)]
        }
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--pair needs two indices, got {}",
                other.len()
            )))
        }
        None => {
            let axes: Vec<usize> = s.tangent_axes().collect();
            axes.iter()
                .enumerate()
                .flat_map(|(a, &i)| axes[a + 1..].iter().map(move |&j| (i, j)))
                .collect()
        }
    };
    let target = target_k.or(spec.sampling.as_ref().and_then(|x| x.target_k));
    let mut records = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        records.push(Record::from_sample(&evaluate_pair(
            s, &p, i, j, target, &tol,
        )?));
    }
    with_stdout(|w| report::write_records(&records, cli.format.unwrap_or(Format::Json), w))
}

fn scan(cli: &Cli, spec_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let spec = LoadedSpec::load(spec_path)?;
    let tol = tolerances(cli, Some(&spec))?;
    let sampling = spec.require_sampling()?.clone();
    let seed = cli.seed.unwrap_or(sampling.seed);
    let sbox = spec.sampling_box()?;
    let sampled = sample_points(&spec.surface, &sbox, sampling.count, seed, &tol)?;
    let policy = ScanPolicy {
        coordinate_pairs: sampling.coordinate_pairs,
        oblique_planes: sampling.oblique_planes,
        seed,
        target_k: sampling.target_k,
    };
    let rep = scan_constancy(&spec.surface, &sampled.points, &policy, &tol)?;
    let meta = Meta {
        format_version: REPORT_FORMAT_VERSION,
        tool: "sepcurv",
        tool_version: env!("CARGO_PKG_VERSION"),
        input: spec_path.display().to_string(),
        input_sha256: spec.digest.clone(),
        surface: spec.label.clone(),
        n: spec.surface.dim(),
        height: spec.surface.height() + 1,
        seed,
        requested_points: sampling.count,
        coordinate_pairs: policy.coordinate_pairs,
        oblique_planes: policy.oblique_planes,
        target_k: policy.target_k,
        tolerances: tol,
    };
    let full = ScanReport::new(report::timestamp(), meta, &rep, &sampled.failures);
    let format = cli.format.unwrap_or(Format::Json);
    let verdict = format!("verdict: {}", report::verdict_text(&full.summary));
    match out {
        Some(path) => {
            with_file(path, |w| full.write(format, w))?;
            with_stdout(|w| writeln!(w, "{verdict}"))
        }
        None => {
            with_stdout(|w| full.write(format, w))?;
            eprintln!("{verdict}");
            Ok(())
        }
    }
}

fn certify(
    cli: &Cli,
    suite: certify::Suite,
    dims: &[usize],
    points: usize,
) -> Result<(), CliError> {
    let tol = tolerances(cli, None)?;
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    if let Some(&n) = dims.iter().find(|&&n| n < 3) {
        return Err(CliError::Usage(format!("dimension {n} is below 3")));
    }
    let cfg = SuiteConfig {
        points,
        seed: cli.seed.unwrap_or(SuiteConfig::default().seed),
    };
    let results = certify::run_suite(suite, dims, &cfg, &tol)?;
    with_stdout(|w| match cli.format {
        None => certify::write_table(&results, w),
        Some(Format::Json) => {
            for r in &results {
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        }
        Some(Format::Csv) => {
            let mut out = csv::Writer::from_writer(w);
            for r in &results {
                out.serialize(r)?;
            }
            out.flush()
        }
    })?;
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        k => Err(CliError::CertifyFailed(k)),
    }
}

fn mesh(
    cli: &Cli,
    spec_path: &Path,
    out: &Path,
    resolution: Option<usize>,
) -> Result<(), CliError> {
    let spec = LoadedSpec::load(spec_path)?;
    let tol = tolerances(cli, Some(&spec))?;
    if spec.surface.dim() != 3 {
        return Err(CliError::Usage(format!(
            "mesh export needs n = 3, the spec has n = {}",
            spec.surface.dim()
        )));
    }
    let resolution = resolution
        .or(spec.mesh.as_ref().map(|m| m.resolution))
        .unwrap_or(32);
    let sidecar = out.with_extension("csv");
    if sidecar == out {
        return Err(CliError::Usage(format!(
            "mesh output {} would collide with its CSV sidecar",
            out.display()
        )));
    }
    let m = build_mesh(
        &spec.surface,
        spec.mesh_ranges()?,
        resolution,
        spec.require_bracket()?,
        &tol,
    )?;
    if m.vertices.len() < 3 {
        return Err(CliError::MeshTooSmall(m.vertices.len()));
    }
    with_file(out, |w| m.write_obj(w))?;
    with_file(&sidecar, |w| m.write_sidecar(w))?;
    with_stdout(|w| {
        writeln!(
            w,
            "wrote {} vertices and {} faces to {}",
            m.vertices.len(),
            m.faces.len(),
            out.display()
        )?;
        writeln!(w, "curvature sidecar: {}", sidecar.display())
    })
}
