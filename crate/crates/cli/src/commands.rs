use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use isocond::conditioning::{condition_report, KappaVariant};
use isocond::geometry::GeometryError;
use isocond::isotropy::{isotropy_residual, EqualityConditions};
use isocond::sweep::{compare_modes, extract_isoloci, format_sig, global_index};
use isocond::{
    assemble_matrices, characteristic_length_closed, classify, default_params, direct_kinematics, find_isotropic,
    inverse_kinematics, sweep, Classification, DesignParams, SweepError, SweepSpec, WorkingMode,
};

use crate::{Cli, Command, Failure, Format, GridArgs, KappaB, MatrixArgs, SweepArgs};

type Outcome = Result<String, Failure>;

fn domain(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Domain(e.into())
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn sweep_failure(e: SweepError) -> Failure {
    match e {
        SweepError::EmptyWorkspace => domain(e),
        SweepError::InvalidSpec(_) | SweepError::LevelOutOfRange(_) => usage(e),
    }
}

fn load_params(path: Option<&Path>) -> Result<DesignParams, Failure> {
    let Some(path) = path else {
        return Ok(default_params());
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Usage)?;
    DesignParams::from_json(&text).map_err(|e| match e {
        GeometryError::Json(_) => usage(anyhow!(e).context(format!("in {}", path.display()))),
        _ => domain(e),
    })
}

/// `sqrt(2) r`: the closed form at `gamma = pi/2`, the isotropic configuration furthest
/// from parallel singularities.
fn default_length(params: &DesignParams) -> Result<f64, Failure> {
    characteristic_length_closed(params.platform_radius, FRAC_PI_2)
        .map(|c| c.length)
        .map_err(domain)
}

fn resolve_length(params: &DesignParams, length: Option<f64>) -> Result<f64, Failure> {
    match length {
        Some(l) if l.is_finite() && l > 0.0 => Ok(l),
        Some(l) => Err(usage(anyhow!("--length must be positive, got {l}"))),
        None => default_length(params),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let params = load_params(cli.params.as_deref())?;
    let digits = cli.precision as usize;
    let f = |v: f64| format_sig(v, digits);
    match &cli.command {
        Command::Ik(args) => {
            let limbs = inverse_kinematics(&params, &args.pose, args.mode).map_err(domain)?;
            let mut out = String::from("limb rho_mm m_mm gamma_rad\n");
            for (i, s) in limbs.iter().enumerate() {
                writeln!(out, "{} {} {} {}", i + 1, f(s.rho), f(s.m), f(s.gamma)).unwrap();
            }
            Ok(out)
        }
        Command::Dk { rho, seed } => {
            let pose = direct_kinematics(&params, rho, seed).map_err(domain)?;
            Ok(format!(
                "x_mm y_mm theta_rad\n{} {} {}\n",
                f(pose.x),
                f(pose.y),
                f(pose.theta)
            ))
        }
        Command::Jacobians(args) => {
            let (limbs, length) = solve(&params, args)?;
            let mats = assemble_matrices(&params, &limbs, length);
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&mats.to_json()).expect("JSON value")
            ))
        }
        Command::Classify(args) => {
            let length = resolve_length(&params, args.length)?;
            let report = classify(&params, &args.at.pose, args.at.mode, length).map_err(domain)?;
            let kind = match &report.classification {
                Classification::Regular => "regular".to_string(),
                Classification::ParallelSingular => "parallel singular".to_string(),
                Classification::SerialSingular(l) => format!("serial singular (limbs {l:?})"),
                Classification::Both(l) => format!("parallel and serial singular (limbs {l:?})"),
            };
            Ok(format!(
                "classification: {kind}\nparallel_measure: {}\nserial_measure: {}\n",
                f(report.parallel_measure),
                f(report.serial_measure)
            ))
        }
        Command::Charlen { gamma } => match gamma {
            Some(g) => {
                let l = characteristic_length_closed(params.platform_radius, *g).map_err(domain)?;
                Ok(format!("L_mm: {}\n", f(l.length)))
            }
            None => {
                let s = find_isotropic(&params, WorkingMode::ALL_PLUS, default_length(&params)?).map_err(domain)?;
                Ok(format!(
                    "L_mm: {}\ngamma_rad: {}\nindex: {}\nisotropic: {}\npose: {} {} {}\n",
                    f(s.length.length),
                    f(s.length.gamma),
                    f(s.index),
                    s.isotropic,
                    f(s.pose.x),
                    f(s.pose.y),
                    f(s.pose.theta)
                ))
            }
        },
        Command::Isotropy(args) => {
            let (limbs, length) = solve(&params, args)?;
            let mats = assemble_matrices(&params, &limbs, length);
            let residual = isotropy_residual(&mats).map_err(domain)?;
            let index = condition_report(mats.k_bar.as_ref().expect("checked by isotropy_residual"))
                .map_err(domain)?
                .index;
            let eq = EqualityConditions::at(&args.at.pose, &limbs);
            Ok(format!(
                "index_K_bar: {}\ndiag_spread: {}\noff_diag: {}\ntau_sq: {}\n\
                 limb_lengths_spread: {}\npivot_radii_spread: {}\nlimb_dots_spread: {}\nm_products_spread: {}\n",
                f(index),
                f(residual.diag_spread),
                f(residual.off_diag),
                f(residual.tau_sq),
                f(eq.limb_lengths),
                f(eq.pivot_radii),
                f(eq.limb_dots),
                f(eq.m_products)
            ))
        }
        Command::Sweep(args) => run_sweep(&params, args, digits),
        Command::Compare(grid) => {
            let template = grid_spec(&params, grid, isocond::MatrixKind::KBar, WorkingMode::ALL_PLUS)?;
            let table = compare_modes(&params, &template).map_err(sweep_failure)?;
            let mut out = String::from("mode");
            for kind in table.kinds {
                write!(out, " {}", kind.label()).unwrap();
            }
            out.push('\n');
            for (mode, row) in table.modes.iter().zip(table.values) {
                write!(out, "{mode}").unwrap();
                for v in row {
                    write!(out, " {v:.3}").unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn solve(params: &DesignParams, args: &MatrixArgs) -> Result<([isocond::LimbState; 3], f64), Failure> {
    let length = resolve_length(params, args.length)?;
    let limbs = inverse_kinematics(params, &args.at.pose, args.at.mode).map_err(domain)?;
    Ok((limbs, length))
}

fn grid_spec(
    params: &DesignParams,
    grid: &GridArgs,
    kind: isocond::MatrixKind,
    mode: WorkingMode,
) -> Result<SweepSpec, Failure> {
    let spec = SweepSpec {
        x_range: (grid.x_min, grid.x_max),
        y_range: (grid.y_min, grid.y_max),
        nx: grid.nx,
        ny: grid.ny,
        n_theta: grid.ntheta,
        matrix_kind: kind,
        mode,
        length: resolve_length(params, grid.length)?,
        kappa_b_variant: match grid.kappa_b {
            KappaB::Ratio => KappaVariant::Ratio,
            KappaB::SqrtRatio => KappaVariant::SqrtRatio,
        },
        refine_theta: grid.refine,
    };
    spec.validate().map_err(sweep_failure)?;
    Ok(spec)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Domain)
}

fn run_sweep(params: &DesignParams, args: &SweepArgs, digits: usize) -> Outcome {
    if let Some(bad) = args.levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(sweep_failure(SweepError::LevelOutOfRange(*bad)));
    }
    let spec = grid_spec(params, &args.grid, args.matrix, args.mode)?;
    let grid = sweep(params, &spec).map_err(sweep_failure)?;
    let index = global_index(&grid).map_err(sweep_failure)?;

    let grid_text = match args.format {
        Format::Csv => grid.to_csv(digits),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&grid.to_json(digits)).expect("JSON value")
        ),
        Format::Gnuplot => grid.to_gnuplot(digits),
    };
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("sweep.{}", args.format.extension())));
    write_file(&output, &grid_text)?;

    if !args.levels.is_empty() {
        let loci = extract_isoloci(&grid, &args.levels).map_err(sweep_failure)?;
        let (text, extension) = match args.format {
            Format::Json => (
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&loci.to_json(digits)).expect("JSON value")
                ),
                "json",
            ),
            Format::Csv | Format::Gnuplot => (loci.to_gnuplot(digits), "dat"),
        };
        let path = args
            .loci_output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("loci.{extension}")));
        write_file(&path, &text)?;
    }
    Ok(format!("{}\n", format_sig(index, digits)))
}
