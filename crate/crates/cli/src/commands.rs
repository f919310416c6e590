use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use gsmon_core::exactnum::{group_pullback_agreement, library, named};
use gsmon_core::gscat::{check_gs_laws, structural};
use gsmon_core::independence::{check_ci, check_local_independence, CiMethod, Partition};
use gsmon_core::monads::{check_monad_laws, classify};
use gsmon_core::squares::{check_pullback, theorem_harness, AssocSquare, PositivitySquare, StrongAffineSquare};
use gsmon_core::{CheckReport, FinSet, FiniteMonoid, Kernel, Mode, MonadInstance, Report, Verdict};
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::{CheckCommand, Cli, CliError, Command, SquareKind, TOOL_VERSION};

const DEFAULT_THEOREM_TRIPLES: [[usize; 3]; 3] = [[1, 1, 1], [2, 1, 1], [2, 2, 2]];

enum Output {
    Report(Report),
    Json(Value),
}

fn config(cli: &Cli, command: &str, monads: &[String], options: Map<String, Value>) -> Result<RunConfig, CliError> {
    let g = &cli.globals;
    let c = RunConfig {
        command: command.into(),
        monads: monads.to_vec(),
        sizes: g.sizes.iter().map(|s| s.0.clone()).collect(),
        mode: g.mode,
        trials: g.trials,
        seed: g.seed,
        format: g.format,
        bound: g.bound,
        max_numerator: g.max_numerator,
        max_denominator: g.max_denominator,
        options,
    };
    c.validate()?;
    Ok(c)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::MalformedInput { path: path.display().to_string(), reason: e.to_string() })
}

fn atoms(sizes: &[usize]) -> Vec<FinSet> {
    const NAMES: [(&str, &str); 6] = [("X", "x"), ("Y", "y"), ("Z", "z"), ("W", "w"), ("V", "v"), ("U", "u")];
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| match NAMES.get(i) {
            Some((name, prefix)) => FinSet::numbered(name, prefix, n),
            None => FinSet::numbered(&format!("X{i}"), &format!("x{i}_"), n),
        })
        .collect()
}

fn groups_of<const N: usize>(c: &RunConfig, default: [usize; N]) -> Result<Vec<[usize; N]>, CliError> {
    if c.sizes.is_empty() {
        return Ok(vec![default]);
    }
    c.sizes
        .iter()
        .map(|g| {
            <[usize; N]>::try_from(g.as_slice())
                .map_err(|_| CliError::Usage(format!("expected {N} sizes per group, got {}", g.len())))
        })
        .collect()
}

fn classify_cmd(cli: &Cli, monads: &[String], all: bool) -> Result<Output, CliError> {
    let ids: Vec<String> = if all {
        MonadInstance::all_bundled().iter().map(MonadInstance::id).collect()
    } else if monads.is_empty() {
        return Err(CliError::Usage("classify needs --monad or --all".into()));
    } else {
        monads.to_vec()
    };
    let mut opts = Map::new();
    if all {
        opts.insert("all".into(), json!(true));
    }
    let c = config(cli, "classify", &ids, opts)?;
    let mut checks = Vec::new();
    for id in &ids {
        checks.push(classify(&c.instance(id)?)?.to_check());
    }
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), checks)))
}

fn laws_cmd(cli: &Cli, monads: &[String]) -> Result<Output, CliError> {
    let c = config(cli, "check laws", monads, Map::new())?;
    let mut sizes: Vec<usize> = c.sizes.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if sizes.is_empty() {
        sizes = vec![1, 2];
    }
    let max = *sizes.iter().max().expect("non-empty");
    let mut checks = Vec::new();
    for id in monads {
        let inst = c.instance(id)?;
        checks.push(check_monad_laws(&inst, &sizes, c.law_mode(&inst, &sizes), c.trials, c.seed)?);
        checks.push(check_gs_laws(&inst, max)?);
    }
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), checks)))
}

fn theorem_cmd(cli: &Cli, monads: &[String]) -> Result<Output, CliError> {
    let c = config(cli, "check theorem", monads, Map::new())?;
    let triples = if c.sizes.is_empty() { DEFAULT_THEOREM_TRIPLES.to_vec() } else { groups_of(&c, [1, 1, 1])? };
    let mut checks = Vec::new();
    for id in monads {
        let inst = c.instance(id)?;
        let mode = c.resolve(inst.is_enumerable());
        checks.push(theorem_harness(&inst, &triples, mode, c.trials, c.seed)?);
    }
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), checks)))
}

fn pullback_cmd(cli: &Cli, square: SquareKind, monads: &[String]) -> Result<Output, CliError> {
    let name = match square {
        SquareKind::Assoc => "assoc",
        SquareKind::StrongAffine => "strong-affine",
        SquareKind::Positivity => "positivity",
    };
    let mut opts = Map::new();
    opts.insert("square".into(), json!(name));
    let c = config(cli, "check pullback", monads, opts)?;
    let mut checks = Vec::new();
    for id in monads {
        let inst = c.instance(id)?;
        let mode = c.resolve(inst.is_enumerable());
        match square {
            SquareKind::Assoc => {
                for s in groups_of(&c, [1, 1, 1])? {
                    checks.push(check_pullback(&AssocSquare::with_sizes(&inst, s), mode, c.trials, c.seed)?);
                }
            }
            SquareKind::StrongAffine => {
                for s in groups_of(&c, [2, 2])? {
                    checks.push(check_pullback(&StrongAffineSquare::with_sizes(&inst, s), mode, c.trials, c.seed)?);
                }
            }
            SquareKind::Positivity => {
                for s in groups_of(&c, [2, 2])? {
                    checks.push(check_pullback(&PositivitySquare::with_sizes(&inst, s), mode, c.trials, c.seed)?);
                }
            }
        }
    }
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), checks)))
}

fn kernel_options(kernel: &Path, partition: &str, method: &str) -> Map<String, Value> {
    let mut opts = Map::new();
    opts.insert("kernel".into(), json!(kernel.display().to_string()));
    opts.insert("partition".into(), json!(partition));
    opts.insert("method".into(), json!(method));
    opts
}

fn load_ci(kernel: &Path, partition: &str, method: &str) -> Result<(Kernel, Partition, CiMethod), CliError> {
    let f = Kernel::from_json(&read_json(kernel)?)?;
    let p = Partition::parse(partition, f.cod())?;
    let m: CiMethod = method.parse()?;
    Ok((f, p, m))
}

fn ci_cmd(cli: &Cli, kernel: &Path, partition: &str, method: &str) -> Result<Output, CliError> {
    let (f, p, m) = load_ci(kernel, partition, method)?;
    let c = config(cli, "check ci", &[f.instance().id()], kernel_options(kernel, partition, method))?;
    let result = check_ci(&f, &p, m)?;
    let mut check = CheckReport::new(
        format!("ci:{}:{}", f.instance().id(), p.to_expr(f.cod())),
        "the kernel factors through copy as a tensor of one factor per block",
        Mode::Exhaustive,
    );
    check.trials = 1;
    let out = result.to_json();
    if !result.holds {
        check.fail_with(out.get("witness").cloned().unwrap_or(Value::Null));
    }
    check.details = Some(out);
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), vec![check])))
}

fn local_cmd(cli: &Cli, kernel: &Path, partition: &str, method: &str) -> Result<Output, CliError> {
    let (f, p, m) = load_ci(kernel, partition, method)?;
    let c = config(cli, "check local-independence", &[f.instance().id()], kernel_options(kernel, partition, method))?;
    let check = check_local_independence(&f, &p, m)?;
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), vec![check])))
}

fn monoid_pullback_cmd(cli: &Cli, monoids: &[String], files: &[PathBuf]) -> Result<Output, CliError> {
    let mut suite = Vec::new();
    for n in monoids {
        suite.push(named(n).ok_or_else(|| CliError::Usage(format!("unknown library monoid `{n}`")))?);
    }
    for path in files {
        suite.push(FiniteMonoid::from_json(&read_json(path)?)?);
    }
    if suite.is_empty() {
        suite = library();
    }
    let mut opts = Map::new();
    opts.insert("monoids".into(), json!(suite.iter().map(|m| m.name().to_string()).collect::<Vec<_>>()));
    let c = config(cli, "check monoid-pullback", &[], opts)?;
    let check = group_pullback_agreement(&suite)?;
    Ok(Output::Report(Report::new(TOOL_VERSION, c.to_json(), vec![check])))
}

fn collect_checks(
    v: Value,
    path: &Path,
    checks: &mut Vec<CheckReport>,
    versions: &mut BTreeSet<String>,
) -> Result<(), CliError> {
    let malformed =
        |e: serde_json::Error| CliError::MalformedInput { path: path.display().to_string(), reason: e.to_string() };
    if v.get("checks").is_some() {
        let r: Report = serde_json::from_value(v).map_err(malformed)?;
        versions.insert(r.tool_version);
        checks.extend(r.checks);
    } else if v.is_array() {
        let cs: Vec<CheckReport> = serde_json::from_value(v).map_err(malformed)?;
        checks.extend(cs);
    } else {
        checks.push(serde_json::from_value(v).map_err(malformed)?);
    }
    Ok(())
}

fn report_cmd(cli: &Cli, inputs: &[PathBuf]) -> Result<Output, CliError> {
    let mut opts = Map::new();
    opts.insert("inputs".into(), json!(inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()));
    let c = config(cli, "report", &[], opts)?;
    let mut checks = Vec::new();
    let mut versions = BTreeSet::new();
    for path in inputs {
        collect_checks(read_json(path)?, path, &mut checks, &mut versions)?;
    }
    let mut report = Report::new(TOOL_VERSION, c.to_json(), checks);
    if versions.len() > 1 {
        report.warnings.push(format!(
            "inputs carry different tool versions: {}",
            versions.into_iter().collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(Output::Report(report))
}

fn structural_cmd(cli: &Cli, monad: &str, kind: &str) -> Result<Output, CliError> {
    let c = config(cli, "structural", &[monad.to_string()], Map::new())?;
    let sizes: Vec<usize> = match c.sizes.first() {
        Some(g) => g.clone(),
        None if kind == "swap" => vec![2, 2],
        None => vec![2],
    };
    let k = structural(&c.instance(monad)?, kind, &atoms(&sizes))?;
    Ok(Output::Json(k.to_json()))
}

fn write(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.globals.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn execute(cli: &Cli) -> Result<i32, CliError> {
    let out = match &cli.command {
        Command::Classify { monad, all } => classify_cmd(cli, monad, *all)?,
        Command::Check(CheckCommand::Laws { monad }) => laws_cmd(cli, monad)?,
        Command::Check(CheckCommand::Theorem { monad }) => theorem_cmd(cli, monad)?,
        Command::Check(CheckCommand::Pullback { square, monad }) => pullback_cmd(cli, *square, monad)?,
        Command::Check(CheckCommand::Ci { kernel, partition, method }) => ci_cmd(cli, kernel, partition, method)?,
        Command::Check(CheckCommand::LocalIndependence { kernel, partition, method }) => {
            local_cmd(cli, kernel, partition, method)?
        }
        Command::Check(CheckCommand::MonoidPullback { monoid, monoid_file }) => {
            monoid_pullback_cmd(cli, monoid, monoid_file)?
        }
        Command::Report { inputs } => report_cmd(cli, inputs)?,
        Command::Structural { monad, kind } => structural_cmd(cli, monad, kind)?,
    };
    match out {
        Output::Report(r) => {
            let text = match cli.globals.format {
                Format::Json => r.to_json_string(),
                Format::Markdown => r.to_markdown(),
            };
            write(cli, &text)?;
            Ok(if r.summary == Verdict::Fail { 1 } else { 0 })
        }
        Output::Json(v) => {
            let mut text = serde_json::to_string_pretty(&v).expect("kernel serializes");
            text.push('\n');
            write(cli, &text)?;
            Ok(0)
        }
    }
}
