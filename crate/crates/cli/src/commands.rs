use std::path::PathBuf;

use alw_core::analysis::{
    anti_loewner_catalog, battery, classify_anti_loewner, classify_matrix_monotone, continuity_suite,
    direct_monotonicity_probe, full_catalog, non_anti_loewner_catalog, prop1_factorization_suite, prop1_suite,
    thm1_suite, thm2_suite, ClassificationReport, Direction, SignSearch, TrialConfig, VerificationReport,
    EXHAUSTIVE_SIGN_CAP,
};
use alw_core::builders::{anti_loewner, default_epsilon, loewner, signed_matrix, theorem2_blocks, Grid, SignVector};
use alw_core::functions::{FunctionSpec, Interval};
use alw_core::linalg::{
    det_sign, eigenvalues, numerical_rank, psd_verdict, DetSign, PsdVerdict, SymMatrix, DEFAULT_RANK_TOL,
};
use alw_core::lyapunov::{certify, LyapunovProblem, ProblemFile};
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    BatteryArgs, BuildArgs, BuildKind, ClassifyArgs, Format, LyapunovArgs, Output, PropertyArg, RecheckArgs,
    SuiteArg, VerifyArgs,
};
use crate::inputs::{at, parse_function, parse_grid, parse_interval_arg, read_file, resolve_tolerance, InputError, Result};
use crate::output::{csv_header, csv_matrix, emit, field, number, to_json, RunManifest};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO: u8 = 1;

#[derive(Debug, Serialize)]
struct MatrixSummary {
    matrix: SymMatrix,
    eigenvalues: Vec<f64>,
    verdict: PsdVerdict,
    rank: usize,
    det: DetSign,
}

fn summarize(m: SymMatrix, tolerance: f64) -> Result<MatrixSummary> {
    Ok(MatrixSummary {
        eigenvalues: eigenvalues(&m)?,
        verdict: psd_verdict(&m, tolerance)?,
        rank: numerical_rank(&m, DEFAULT_RANK_TOL)?,
        det: det_sign(&m, tolerance)?,
        matrix: m,
    })
}

#[derive(Debug, Serialize)]
struct BuildReport {
    kind: &'static str,
    function: FunctionSpec,
    grid: Grid,
    #[serde(skip_serializing_if = "Option::is_none")]
    signs: Option<SignVector>,
    #[serde(flatten)]
    summary: MatrixSummary,
}

#[derive(Debug, Serialize)]
struct BlocksReport {
    kind: &'static str,
    function: FunctionSpec,
    grid: Grid,
    epsilon: f64,
    extended_grid: Grid,
    k_prime: MatrixSummary,
    k_double_prime: MatrixSummary,
}

fn optional_interval(arg: &Option<String>) -> Result<Option<Interval>> {
    arg.as_deref().map(parse_interval_arg).transpose()
}

pub fn build(args: &BuildArgs) -> Result<u8> {
    let f = parse_function(&args.function)?;
    let interval = optional_interval(&args.interval)?.unwrap_or(f.domain());
    let grid = parse_grid(&args.grid, interval)?;
    let tolerance = resolve_tolerance(args.output.tolerance)?;
    let mut manifest = RunManifest::new(format!("build {}", args.kind.name()), 0);
    manifest
        .input("kind", args.kind.name())
        .input("fn", &f)
        .input("grid", &grid)
        .input("tolerance", tolerance);
    if args.kind != BuildKind::Signed && args.signs.is_some() {
        return Err(InputError("--signs: only used by build signed".into()));
    }
    if args.kind != BuildKind::Thm2 && args.epsilon.is_some() {
        return Err(InputError("--epsilon: only used by build thm2".into()));
    }

    if args.kind == BuildKind::Thm2 {
        let epsilon = args.epsilon.unwrap_or_else(|| default_epsilon(&grid));
        manifest.input("epsilon", epsilon);
        let blocks = at("--epsilon", theorem2_blocks(&f, &grid, epsilon))?;
        let report = BlocksReport {
            kind: args.kind.name(),
            function: f,
            grid,
            epsilon,
            extended_grid: blocks.extended,
            k_prime: summarize(blocks.k_prime, tolerance)?,
            k_double_prime: summarize(blocks.k_double_prime, tolerance)?,
        };
        let text = match args.output.format {
            Format::Json => to_json(&manifest, &report)?,
            Format::Csv => format!(
                "{}# k_prime\n{}\n# k_double_prime\n{}",
                csv_header(&manifest)?,
                csv_matrix(&report.k_prime.matrix),
                csv_matrix(&report.k_double_prime.matrix)
            ),
        };
        emit(args.output.out.as_deref(), &text)?;
        return Ok(EXIT_OK);
    }

    let (matrix, signs) = match args.kind {
        BuildKind::Loewner => (loewner(&f, &grid)?, None),
        BuildKind::Antiloewner => (anti_loewner(&f, &grid)?, None),
        BuildKind::Signed => {
            let text = args
                .signs
                .as_deref()
                .ok_or_else(|| InputError("--signs: required by build signed".into()))?;
            let s = at("--signs", SignVector::parse(text))?;
            manifest.input("signs", &s);
            (at("--signs", signed_matrix(&f, &grid, &s))?, Some(s))
        }
        BuildKind::Thm2 => unreachable!("handled above"),
    };
    let report = BuildReport {
        kind: args.kind.name(),
        function: f,
        grid,
        signs,
        summary: summarize(matrix, tolerance)?,
    };
    let text = match args.output.format {
        Format::Json => to_json(&manifest, &report)?,
        Format::Csv => format!("{}{}", csv_header(&manifest)?, csv_matrix(&report.summary.matrix)),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn trial_config(seed: u64, trials: Option<usize>, interval: Option<Interval>, tolerance: f64) -> Result<TrialConfig> {
    let mut cfg = TrialConfig::with_seed(seed).tolerance(tolerance);
    if let Some(t) = trials {
        cfg = cfg.trials(t);
    }
    if let Some(iv) = interval {
        cfg = cfg.interval(iv);
    }
    at("--trials/--interval/--tolerance", cfg.validate())?;
    Ok(cfg)
}

fn common_inputs(manifest: &mut RunManifest, cfg: &TrialConfig) {
    manifest
        .input("trials", cfg.trials)
        .input("tolerance", cfg.tolerance)
        .input("interval", cfg.interval);
}

/// `--witness`, else `<out stem>.witness.json`, else `./witness.json`.
fn witness_path(args: &ClassifyArgs) -> PathBuf {
    if let Some(p) = &args.witness {
        return p.clone();
    }
    match &args.output.out {
        Some(out) => {
            let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            out.with_file_name(format!("{stem}.witness.json"))
        }
        None => PathBuf::from("witness.json"),
    }
}

pub fn classify(args: &ClassifyArgs) -> Result<u8> {
    if args.order == 0 {
        return Err(InputError("--order: must be at least 1".into()));
    }
    let f = parse_function(&args.function)?;
    let tolerance = resolve_tolerance(args.output.tolerance)?;
    let cfg = trial_config(args.seed, args.trials, optional_interval(&args.interval)?, tolerance)?;
    let mut manifest = RunManifest::new("classify", args.seed);
    manifest
        .input("fn", &f)
        .input("property", args.property.name())
        .input("order", args.order);
    common_inputs(&mut manifest, &cfg);

    let report = match args.property {
        PropertyArg::AntiLoewner => classify_anti_loewner(&f, args.order, &cfg),
        PropertyArg::MatrixMonotone => classify_matrix_monotone(&f, args.order, Direction::Increasing, &cfg),
        PropertyArg::MatrixMonotoneDecreasing => {
            classify_matrix_monotone(&f, args.order, Direction::Decreasing, &cfg)
        }
        PropertyArg::Probe => direct_monotonicity_probe(&f, args.order, &cfg),
    }?;

    let json = to_json(&manifest, &report)?;
    if report.is_refuted() {
        let path = witness_path(args);
        std::fs::write(&path, &json).map_err(|e| InputError(format!("--witness {}: {e}", path.display())))?;
        eprintln!("refuted; witness written to {}", path.display());
    }
    let text = match args.output.format {
        Format::Json => json,
        Format::Csv => {
            let min_eig = report.witness.as_ref().map(|w| w.min_eigenvalue).unwrap_or(f64::NAN);
            format!(
                "{}property,order,outcome,trials_run,marginal_skipped,witness_min_eigenvalue\n{},{},{},{},{},{}\n",
                csv_header(&manifest)?,
                args.property.name(),
                report.order,
                enum_name(&report.outcome),
                report.trials_run,
                report.marginal_skipped,
                number(min_eig)
            )
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(if report.is_refuted() { EXIT_NO } else { EXIT_OK })
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let tolerance = resolve_tolerance(args.output.tolerance)?;
    let cfg = trial_config(args.seed, args.trials, optional_interval(&args.interval)?, tolerance)?;
    let functions = args
        .functions
        .iter()
        .map(|s| parse_function(s))
        .collect::<Result<Vec<_>>>()?;
    let mut manifest = RunManifest::new(format!("verify {}", args.suite.name()), args.seed);
    manifest.input("suite", args.suite.name()).input("sampled", args.sampled);
    common_inputs(&mut manifest, &cfg);

    let takes_functions = matches!(args.suite, SuiteArg::Thm1 | SuiteArg::Thm2 | SuiteArg::Continuity);
    if !takes_functions && !functions.is_empty() {
        return Err(InputError(format!("--fn: not used by verify {}", args.suite.name())));
    }
    if args.sampled && args.suite != SuiteArg::Prop1 {
        return Err(InputError(format!("--sampled: not used by verify {}", args.suite.name())));
    }
    let pick = |default: Vec<FunctionSpec>| if functions.is_empty() { default } else { functions.clone() };
    let default_n = match args.suite {
        SuiteArg::Prop1 => 5,
        SuiteArg::Prop1Factor | SuiteArg::Thm1 => 6,
        SuiteArg::Thm2 => 4,
        SuiteArg::Continuity => 2,
    };
    let n = args.n.unwrap_or(default_n);
    if n == 0 {
        return Err(InputError("--n: must be at least 1".into()));
    }
    if args.suite == SuiteArg::Continuity && args.n.is_some_and(|n| n != 2) {
        return Err(InputError("--n: verify continuity always uses 2-point grids".into()));
    }
    if args.suite != SuiteArg::Continuity {
        manifest.input("n", n);
    }

    let report: VerificationReport = match args.suite {
        SuiteArg::Prop1 => {
            let search = if args.sampled {
                SignSearch::Sampled
            } else if n > EXHAUSTIVE_SIGN_CAP {
                return Err(InputError(format!(
                    "--n: {n} exceeds the exhaustive sign-enumeration cap of {EXHAUSTIVE_SIGN_CAP}; pass --sampled"
                )));
            } else {
                SignSearch::Exhaustive
            };
            at("--n", prop1_suite(n, &cfg, search))?
        }
        SuiteArg::Prop1Factor => at("--n", prop1_factorization_suite(n, &cfg))?,
        SuiteArg::Thm1 => {
            let fs = pick(full_catalog(args.seed));
            manifest.input("fn", &fs);
            thm1_suite(&fs, n, &cfg)?
        }
        SuiteArg::Thm2 => {
            let mut default = anti_loewner_catalog(args.seed, 3);
            default.extend(non_anti_loewner_catalog());
            let fs = pick(default);
            manifest.input("fn", &fs);
            thm2_suite(&fs, n, &cfg)?
        }
        SuiteArg::Continuity => {
            let fs = pick(anti_loewner_catalog(args.seed, 3));
            manifest.input("fn", &fs);
            continuity_suite(&fs, &cfg)?
        }
    };

    let text = match args.output.format {
        Format::Json => to_json(&manifest, &report)?,
        Format::Csv => {
            let mut s = csv_header(&manifest)?;
            s.push_str("index,function,n,status,metric,detail\n");
            for r in &report.records {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.index,
                    field(r.function.as_deref().unwrap_or("")),
                    r.n,
                    enum_name(&r.status),
                    r.metric.map(number).unwrap_or_default(),
                    field(r.detail.as_deref().unwrap_or(""))
                ));
            }
            s
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    eprintln!(
        "verify {}: {} ({} instances, {} failures, {} marginal)",
        args.suite.name(),
        enum_name(&report.outcome),
        report.trials_run,
        report.failures,
        report.marginal_skipped
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_NO })
}

#[derive(Debug, Serialize)]
struct LyapunovReport {
    function: FunctionSpec,
    solution: SymMatrix,
    residual: f64,
    verdict: PsdVerdict,
    positive_definite: bool,
    strict_pd: bool,
    accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    det: Option<DetSign>,
}

pub fn lyapunov(args: &LyapunovArgs) -> Result<u8> {
    let text = read_file(&args.file)?;
    let flag = args.file.display().to_string();
    let problem = at(&flag, LyapunovProblem::from_json_str(&text))?;
    let tolerance = resolve_tolerance(args.output.tolerance)?;
    let mut manifest = RunManifest::new("lyapunov", 0);
    manifest
        .input(
            "problem",
            ProblemFile {
                a: problem.a().clone(),
                b: problem.b().clone(),
                g: problem.g().clone(),
            },
        )
        .input("certify", args.certify)
        .input("strict_pd", args.strict_pd)
        .input("tolerance", tolerance);

    let cert = certify(&problem, tolerance)?;
    let accepted = cert.verdict.is_psd() && (!args.strict_pd || cert.positive_definite);
    let (eigs, det) = if args.certify {
        (
            Some(eigenvalues(&cert.solution)?),
            Some(det_sign(&cert.solution, tolerance)?),
        )
    } else {
        (None, None)
    };
    let report = LyapunovReport {
        function: problem.g().clone(),
        solution: cert.solution,
        residual: cert.residual,
        verdict: cert.verdict,
        positive_definite: cert.positive_definite,
        strict_pd: args.strict_pd,
        accepted,
        eigenvalues: eigs,
        det,
    };
    let text = match args.output.format {
        Format::Json => to_json(&manifest, &report)?,
        Format::Csv => format!("{}{}", csv_header(&manifest)?, csv_matrix(&report.solution)),
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(if accepted { EXIT_OK } else { EXIT_NO })
}

/// Loads a classification report (manifest optional) and rebuilds its witness.
pub fn recheck(args: &RecheckArgs) -> Result<u8> {
    let text = read_file(&args.file)?;
    let flag = args.file.display().to_string();
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{flag}: invalid JSON: {e}")))?;
    if let Value::Object(obj) = &mut value {
        obj.remove("manifest");
    }
    let report: ClassificationReport =
        serde_json::from_value(value).map_err(|e| InputError(format!("{flag}: {e}")))?;
    if report.witness.is_none() {
        return Err(InputError(format!("{flag}: report has no witness")));
    }
    let confirmed = at(&flag, report.reverify())?;
    println!("{}", if confirmed { "CONFIRMED" } else { "NOT_CONFIRMED" });
    Ok(if confirmed { EXIT_OK } else { EXIT_NO })
}

pub fn run_battery(args: &BatteryArgs) -> Result<u8> {
    reject_csv(&args.output, "battery")?;
    let mut manifest = RunManifest::new("battery", args.seed);
    manifest.input("seed", args.seed);
    if args.output.tolerance.is_some() {
        return Err(InputError("--tolerance: battery uses the library default".into()));
    }
    let b = battery(args.seed)?;
    emit(args.output.out.as_deref(), &to_json(&manifest, &b)?)?;
    Ok(if b.passed() { EXIT_OK } else { EXIT_NO })
}

fn reject_csv(output: &Output, command: &str) -> Result<()> {
    if output.format == Format::Csv {
        return Err(InputError(format!("--format: {command} only writes JSON")));
    }
    Ok(())
}
