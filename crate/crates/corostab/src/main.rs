//! `corostab`: evaluate, scan and verify constitutive stability conditions
//! for isotropic nonlinear elastic laws.

use clap::{Parser, Subcommand, ValueEnum};
use corostab::harness::config::{self, ReportFormat};
use corostab::harness::matfile;
use corostab::harness::report;
use corostab::harness::scan;
use corostab::harness::verify::{self, Suite, VerifyOptions};
use corostab::law::MaterialConfig;
use corostab::quadform::{self, StressFlavor};
use corostab::stability::{self, AuditTolerances};
use corostab::DeformationState;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "corostab",
    about = "Numerical verification of corotational stability conditions \
             for isotropic nonlinear elastic laws",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate stresses, stiffness spectra and verdicts at one stretch state.
    Eval {
        /// Built-in law name (hencky, exp-hencky, cauchy-nonhyper).
        #[arg(long, conflicts_with = "material")]
        law: Option<String>,
        /// Material definition file (alternative to --law).
        #[arg(long)]
        material: Option<PathBuf>,
        /// Law parameters as name=value (repeatable).
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Principal stretches, comma separated (e.g. 2,1,1).
        #[arg(long, value_name = "L1,L2,L3")]
        stretch: String,
    },
    /// Run a stability scan from a configuration file.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the report format from the config file.
        #[arg(long, value_enum)]
        format: Option<CliFormat>,
        /// Worker count (default: COROSTAB_JOBS or all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the cross-route verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = CliSuite::All)]
        suite: CliSuite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Parse and validate a material definition file.
    CheckMaterial { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliSuite {
    All,
    Zj,
    Quadform,
    Monotonicity,
    Gamma,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode, String> {
    match Cli::parse().command {
        Command::Eval {
            law,
            material,
            params,
            stretch,
        } => eval_command(law, material, params, &stretch),
        Command::Scan {
            config,
            out,
            format,
            jobs,
        } => scan_command(&config, &out, format, jobs),
        Command::Verify { suite, seed } => verify_command(suite, seed),
        Command::CheckMaterial { path } => check_material_command(&path),
    }
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut map = BTreeMap::new();
    for entry in params {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("--param expects name=value, got `{entry}`"))?;
        let value = value
            .parse::<f64>()
            .map_err(|_| format!("--param {name}: `{value}` is not a number"))?;
        map.insert(name.trim().to_string(), value);
    }
    Ok(map)
}

fn parse_stretch(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--stretch expects three values, got `{text}`"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        let value = part
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("--stretch: `{part}` is not a number"))?;
        if value <= 0.0 {
            return Err(format!(
                "--stretch: stretches must be positive, got {value}"
            ));
        }
        *slot = value;
    }
    Ok(out)
}

fn eval_command(
    law_name: Option<String>,
    material: Option<PathBuf>,
    params: Vec<String>,
    stretch: &str,
) -> Result<ExitCode, String> {
    let stretches = parse_stretch(stretch)?;
    let (law, warnings) = match (law_name, material) {
        (Some(name), None) => MaterialConfig::builtin(&name, parse_params(&params)?)
            .build()
            .map_err(|e| e.to_string())?,
        (None, Some(path)) => matfile::load_material(&path).map_err(|e| e.to_string())?,
        _ => return Err("provide exactly one of --law or --material".into()),
    };
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let x = [stretches[0].ln(), stretches[1].ln(), stretches[2].ln()];
    let state = DeformationState::from_log_stretches(x).map_err(|e| e.to_string())?;
    let stress = corostab::stress::cauchy_stress(&law, &state).map_err(|e| e.to_string())?;
    let tolerances = AuditTolerances::default();
    let verdict =
        stability::evaluate_state(&law, &x, &tolerances, None).map_err(|e| e.to_string())?;

    println!("law: {}", law.name());
    println!(
        "stretch: ({}, {}, {})   x = log stretch: ({:.6}, {:.6}, {:.6})   J = {:.6}",
        stretches[0], stretches[1], stretches[2], x[0], x[1], x[2], verdict.volume_ratio
    );
    println!(
        "principal cauchy stress:    ({:.9}, {:.9}, {:.9})",
        stress.principal_cauchy[0], stress.principal_cauchy[1], stress.principal_cauchy[2]
    );
    println!(
        "principal kirchhoff stress: ({:.9}, {:.9}, {:.9})",
        stress.principal_kirchhoff[0], stress.principal_kirchhoff[1], stress.principal_kirchhoff[2]
    );
    for flavor in [StressFlavor::Cauchy, StressFlavor::Kirchhoff] {
        let lambda = quadform::lambda_matrix(&law, &x, flavor).map_err(|e| e.to_string())?;
        let eigs =
            corostab::tensor::spectral_decompose(&corostab::SymmetricTensor3::new(lambda.matrix))
                .eigenvalues;
        println!(
            "stiffness eigenvalues ({}): ({:.9}, {:.9}, {:.9})",
            flavor.label(),
            eigs[0],
            eigs[1],
            eigs[2]
        );
    }
    println!(
        "corotational minimum (cauchy):    {:.9}",
        verdict.csp_exact_min_cauchy
    );
    println!(
        "corotational minimum (kirchhoff): {:.9}",
        verdict.csp_exact_min_kirchhoff
    );
    println!(
        "baker-ericksen: {} (margin {:?})",
        if verdict.be_cauchy.pass {
            "pass"
        } else {
            "fail"
        },
        verdict.be_cauchy.margin
    );
    println!(
        "verdict: cauchy {:?}, kirchhoff {:?}",
        verdict.verdict_cauchy, verdict.verdict_kirchhoff
    );
    Ok(ExitCode::SUCCESS)
}

fn scan_command(
    config_path: &Path,
    out: &Path,
    format: Option<CliFormat>,
    jobs: Option<usize>,
) -> Result<ExitCode, String> {
    let mut config = config::load_scan_config(config_path).map_err(|e| e.to_string())?;
    if let Some(fmt) = format {
        config.format = match fmt {
            CliFormat::Json => ReportFormat::Json,
            CliFormat::Csv => ReportFormat::Csv,
        };
    }
    let report_file = scan::run_scan(&config, jobs).map_err(|e| e.to_string())?;
    for warning in &report_file.summary.warnings {
        eprintln!("warning: {warning}");
    }
    let bytes = report::render(&report_file, config.format).map_err(|e| e.to_string())?;
    report::write_atomic(out, &bytes).map_err(|e| e.to_string())?;
    println!(
        "scanned {} states: cauchy {}/{}/{} (pass/fail/marginal), kirchhoff {}/{}/{}",
        report_file.summary.states,
        report_file.summary.cauchy.pass,
        report_file.summary.cauchy.fail,
        report_file.summary.cauchy.marginal,
        report_file.summary.kirchhoff.pass,
        report_file.summary.kirchhoff.fail,
        report_file.summary.kirchhoff.marginal,
    );
    println!("report written to {}", out.display());
    if report_file.summary.consistent {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "equivalence violations: {}, baker-ericksen violations: {}",
            report_file.summary.equivalence_violations.len(),
            report_file.summary.be_violations.len()
        );
        Ok(ExitCode::from(2))
    }
}

fn verify_command(suite: CliSuite, seed: u64) -> Result<ExitCode, String> {
    let suites = match suite {
        CliSuite::All => Suite::ALL.to_vec(),
        CliSuite::Zj => vec![Suite::Zj],
        CliSuite::Quadform => vec![Suite::Quadform],
        CliSuite::Monotonicity => vec![Suite::Monotonicity],
        CliSuite::Gamma => vec![Suite::Gamma],
    };
    let summary = verify::run_verify(&VerifyOptions {
        seed,
        suites,
        fault: None,
    })
    .map_err(|e| e.to_string())?;
    for check in &summary.checks {
        println!(
            "{} {}/{} worst {:.3e} (tol {:.1e}, {} samples){}{}",
            if check.passed { "ok  " } else { "FAIL" },
            check.suite,
            check.name,
            check.worst,
            check.tolerance,
            check.samples,
            if check.note.is_empty() { "" } else { " — " },
            check.note
        );
    }
    if let Some(factor) = summary.kirchhoff_factor {
        println!("kirchhoff factor convention: {factor:?}");
    }
    if summary.passed {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn check_material_command(path: &Path) -> Result<ExitCode, String> {
    let (law, warnings) = matfile::load_material(path).map_err(|e| e.to_string())?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "{}: ok ({}, parameters: {:?})",
        path.display(),
        law.name(),
        law.parameters()
    );
    Ok(ExitCode::SUCCESS)
}
