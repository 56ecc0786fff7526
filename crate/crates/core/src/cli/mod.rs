//! Command-line front end. Every command prints one JSON envelope
//! `{"command", "tol", "bound", "input", "result"}`; feeding an envelope
//! back through `--input` recomputes and re-emits it byte for byte.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abgroup::{is_trivial_extension, FinAbGroup, GroupElement, Subgroup, DEFAULT_ENUMERATION_BOUND};
use crate::error::{Error, Result};
use crate::frel::{build_sc_pair_bounded, frel_locality_check, rel_phases, verify_rel_laws, PHASE_SCAN_CARRIER_BOUND};
use crate::lhv::{lhv_exists, quantum_table, LhvMode, LhvModel, DEFAULT_SEARCH_BOUND};
use crate::phase::PhasePoint;
use crate::qss::{
    audit_device_independent, run_protocol, simulate_device_independent_attack, simulate_pre_phase_attack,
    AttackModel, QssConfig, QssSummary,
};
use crate::qudit::{mermin_outcome_distribution_bounded, DEFAULT_AMPLITUDE_BOUND};
use crate::scenario::{
    build_nonlocal_scenario, build_nonlocal_scenario_with_controls, newcond, pair_count_series, scan_newcond,
    validate_scenario, MerminScenario, PhaseEquation, TwoMeasScenario, VariationPolicy,
};

/// Exit code for domain errors.
pub const EXIT_DOMAIN: i32 = 2;
/// Exit code for usage errors (sysexits `EX_USAGE`).
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "mermin", version, about = "Mermin non-locality toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// RNG seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Emit the JSON envelope (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV where the command has a tabular result.
    #[arg(long, global = true)]
    csv: bool,
    /// Read the command input (or a previously emitted envelope) from a file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Enumeration / search cap.
    #[arg(long, global = true)]
    bound: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide whether a group is a trivial extension of a subgroup.
    ExtCheck(ExtArgs),
    /// Build a non-local scenario from a phase equation or a preset.
    ScenarioBuild(BuildArgs),
    /// Check that every row of a scenario sums to a classical point.
    ScenarioValidate(ScenarioArgs),
    /// Exact outcome distributions of every row.
    Simulate(ScenarioArgs),
    /// Decide whether a local hidden variable model exists.
    LhvCheck(LhvArgs),
    /// Evaluate or grid-scan the two-measurement effectiveness condition.
    Newcond(NewcondArgs),
    /// Count effective measurement pairs over a range of party numbers.
    PairsCount(PairsArgs),
    /// Verify the relational laws, phases and locality for `G × H`.
    FrelVerify(FrelArgs),
    /// Run the secret sharing protocol under an attack model.
    QssRun(QssArgs),
}

#[derive(Args, Debug)]
struct ExtArgs {
    /// Cyclic factors, e.g. `4` or `2,2`.
    #[arg(long)]
    group: Option<String>,
    /// Subgroup generators, `;`-separated coordinate lists, e.g. `2` or `1,0;0,1`.
    #[arg(long)]
    subgroup: Option<String>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long = "D")]
    d: Option<usize>,
    /// Integer coefficients, comma-separated.
    #[arg(long)]
    coeffs: Option<String>,
    /// Phases of the unknowns, `;`-separated.
    #[arg(long)]
    phases: Option<String>,
    #[arg(long)]
    rhs: Option<String>,
    /// Number of control parties (defaults to the least valid one).
    #[arg(long)]
    controls: Option<usize>,
    /// `classic-322` or `qutrit-five-party`.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ScenarioArgs {
    #[arg(long = "D")]
    d: Option<usize>,
    /// Rows separated by `|`, parties by `;`, e.g. `0;0;0|1/4;1/4;0`.
    #[arg(long)]
    rows: Option<String>,
    /// `classic-322` or `qutrit-five-party`.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Debug)]
struct LhvArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// `parity` or `possibilistic`.
    #[arg(long, default_value = "possibilistic")]
    mode: String,
}

#[derive(Args, Debug)]
struct NewcondArgs {
    #[arg(long = "D")]
    d: Option<usize>,
    #[arg(long = "V")]
    v: Option<usize>,
    #[arg(long)]
    beta: Option<usize>,
    /// Phase to test, e.g. `1/4` or `1/9,8/9`.
    #[arg(long)]
    b: Option<String>,
    /// Scan the grid of turns `k/q` instead of testing one phase.
    #[arg(long)]
    scan: Option<usize>,
}

#[derive(Args, Debug)]
struct PairsArgs {
    #[arg(long = "D")]
    d: Option<usize>,
    /// Party numbers, e.g. `3..11` (inclusive) or `3,5,7`.
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value = "canonical")]
    policy: String,
    /// Also write `pairs_D<D>.csv` and `pairs_D<D>.gp` here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FrelArgs {
    #[arg(long = "G")]
    g: Option<String>,
    #[arg(long = "H")]
    h: Option<String>,
    /// Include the structure relations as boolean matrices.
    #[arg(long)]
    dump: bool,
}

#[derive(Args, Debug)]
struct QssArgs {
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "D")]
    d: Option<usize>,
    /// Phases every party may draw, `;`-separated, e.g. `0;1/4`.
    #[arg(long)]
    alphabet: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    /// `none`, `withhold:<player>`, `pre-phase` or `device-independent`.
    #[arg(long, default_value = "none")]
    attack: String,
    /// Fixed secret; random per round when omitted.
    #[arg(long)]
    secret: Option<u64>,
    /// Write per-round transcripts as JSON lines.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    command: String,
    tol: f64,
    bound: u64,
    input: Value,
    result: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExtInput {
    group: FinAbGroup,
    subgroup: Vec<GroupElement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BuildInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    equation: Option<PhaseEquation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    controls: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LhvInput {
    scenario: MerminScenario,
    mode: LhvMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NewcondInput {
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "V")]
    v: usize,
    beta: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<PhasePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scan: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PairsInput {
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "N")]
    n: Vec<usize>,
    q: usize,
    policy: VariationPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FrelInput {
    #[serde(rename = "G")]
    g: FinAbGroup,
    #[serde(rename = "H")]
    h: FinAbGroup,
    #[serde(default)]
    dump: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct QssInput {
    config: QssConfig,
    attack: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    secret: Option<u64>,
}

/// Failure of a command: usage problems versus domain errors.
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Out<T> {
    Err(Failure::Usage(msg.into()))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn parse_phases(s: &str, d: usize) -> Result<Vec<PhasePoint>> {
    s.split(';').map(|p| PhasePoint::parse(p.trim(), d)).collect()
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad range {s:?}")))?;
        let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad range {s:?}")))?;
        return Ok((a..=b).collect());
    }
    parse_list(s, "party count")
}

fn preset(name: &str) -> Result<MerminScenario> {
    match name {
        "classic-322" => Ok(MerminScenario::classic_322()),
        "qutrit-five-party" => TwoMeasScenario::qutrit_five_party().to_mermin_scenario(),
        other => Err(Error::Parse(format!("unknown preset {other:?}"))),
    }
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

/// What `--input` provided: a previous envelope or a raw input document.
struct Loaded {
    input: Value,
    tol: Option<f64>,
    bound: Option<u64>,
}

fn load(cli: &Cli, command: &str) -> Out<Option<Loaded>> {
    let Some(path) = &cli.input else {
        return Ok(None);
    };
    let v = read_json(path)?;
    if v.get("command").is_some() {
        let env: Envelope = from_value(v)?;
        if env.command != command {
            return Err(Error::InvalidInput(format!(
                "{} holds a {} artifact, not {command}",
                path.display(),
                env.command
            ))
            .into());
        }
        return Ok(Some(Loaded {
            input: env.input,
            tol: Some(env.tol),
            bound: Some(env.bound),
        }));
    }
    Ok(Some(Loaded {
        input: v,
        tol: None,
        bound: None,
    }))
}

fn scenario_from_args(a: &ScenarioArgs) -> Out<MerminScenario> {
    if let Some(p) = &a.preset {
        return Ok(preset(p)?);
    }
    match (a.d, &a.rows) {
        (Some(d), Some(rows)) => {
            let rows = rows
                .split('|')
                .map(|r| parse_phases(r, d))
                .collect::<Result<Vec<_>>>()?;
            Ok(MerminScenario::new(d, rows)?)
        }
        _ => usage("give --input, --preset, or --D with --rows"),
    }
}

/// Scenario commands also accept a bare scenario document as input.
fn scenario_input(loaded: Option<Loaded>, a: &ScenarioArgs) -> Out<MerminScenario> {
    match loaded {
        Some(l) => {
            let s: MerminScenario = from_value(l.input)?;
            s.check_shape()?;
            Ok(s)
        }
        None => scenario_from_args(a),
    }
}

struct Ctx {
    tol: f64,
    bound: u64,
}

fn ext_check(input: &ExtInput, ctx: &Ctx) -> Result<Value> {
    let h = Subgroup::new(&input.group, input.subgroup.clone())?;
    let v = is_trivial_extension(&input.group, &h)?;
    let witness = v.witness.as_ref().map(|w| w.system.to_string());
    Ok(serde_json::json!({
        "trivial": v.trivial,
        "witness": witness,
        "witness_system": v.witness.as_ref().map(|w| to_value(&w.system)),
        "witness_solution": v.witness.as_ref().map(|w| to_value(&w.solution)),
        "checked_divisors": v.checked_divisors,
        "subgroup_order": h.order() as u64,
        "tol": ctx.tol,
    }))
}

fn build(input: &BuildInput) -> Result<MerminScenario> {
    if let Some(p) = &input.preset {
        return preset(p);
    }
    let eq = input
        .equation
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("need an equation or a preset".into()))?;
    match input.controls {
        Some(n0) => build_nonlocal_scenario_with_controls(eq, n0),
        None => build_nonlocal_scenario(eq),
    }
}

fn qss_attack(name: &str) -> Result<AttackModel> {
    match name {
        "none" => Ok(AttackModel::None),
        "pre-phase" | "device-independent" => Ok(AttackModel::None),
        other => match other.strip_prefix("withhold:") {
            Some(p) => Ok(AttackModel::Withhold {
                player: p.parse().map_err(|_| Error::Parse(format!("bad player in {other:?}")))?,
            }),
            None => Err(Error::Parse(format!("unknown attack {other:?}"))),
        },
    }
}

/// Result value plus an optional CSV rendering.
struct Emitted {
    result: Value,
    csv: Option<String>,
}

fn qss(input: &QssInput, ctx: &Ctx, transcripts: Option<&PathBuf>) -> Result<Emitted> {
    let cfg = &input.config;
    let write_transcripts = |attack: &AttackModel| -> Result<()> {
        if let Some(path) = transcripts {
            let run = run_protocol(cfg, input.secret, attack)?;
            std::fs::write(path, run.jsonl())
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    };
    match input.attack.as_str() {
        "pre-phase" => {
            let r = simulate_pre_phase_attack(cfg, ctx.tol)?;
            write_transcripts(&AttackModel::PrePhaseSubstitution)?;
            let csv = r.summary.csv();
            Ok(Emitted {
                result: to_value(&r),
                csv: Some(csv),
            })
        }
        "device-independent" => {
            let audit = audit_device_independent(cfg, ctx.bound)?;
            // The attacker's best shot: a mimicking model if one exists,
            // otherwise the uniform mixture of every deterministic table.
            let model = match &audit.mimic {
                Some(m) => m.clone(),
                None => every_table(cfg, ctx.bound)?,
            };
            let report = simulate_device_independent_attack(cfg, &model)?;
            write_transcripts(&AttackModel::PostPhaseDeterministic { model })?;
            let csv = format!(
                "rounds,verdict,pooled_tv,max_tv\n{},{},{},{}\n",
                report.rounds,
                to_value(&report.verdict).as_str().unwrap_or(""),
                report.pooled_tv,
                report.max_tv
            );
            Ok(Emitted {
                result: serde_json::json!({
                    "secure": audit.secure(),
                    "lhv": audit.lhv.existence,
                    "certificate": audit.lhv.certificate,
                    "tables_checked": audit.tables_checked,
                    "undetectable_tables": audit.undetectable_tables,
                    "mimic_found": audit.mimic.is_some(),
                    "detection": report,
                }),
                csv: Some(csv),
            })
        }
        name => {
            let attack = qss_attack(name)?;
            let run = run_protocol(cfg, input.secret, &attack)?;
            if let Some(path) = transcripts {
                std::fs::write(path, run.jsonl())
                    .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
            }
            let s: &QssSummary = &run.summary;
            Ok(Emitted {
                result: to_value(s),
                csv: Some(s.csv()),
            })
        }
    }
}

fn every_table(cfg: &QssConfig, bound: u64) -> Result<LhvModel> {
    let counts: Vec<usize> = cfg.alphabet.iter().map(Vec::len).collect();
    let slots: usize = counts.iter().sum();
    let total = (cfg.dim as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if total > bound as u128 {
        return Err(Error::resource("deterministic tables", total, bound as u128));
    }
    let d = cfg.dim as u64;
    let tables = (0..total as u64)
        .map(|mut code| {
            counts
                .iter()
                .map(|&c| {
                    (0..c)
                        .map(|_| {
                            let o = code % d;
                            code /= d;
                            o
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(LhvModel::uniform(cfg.dim, counts, tables))
}

fn gnuplot_script(d: usize, csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'N'\n\
         set ylabel 'effective pairs'\n\
         set title 'Effective measurement pairs, D = {d}'\n\
         plot '{csv_name}' using 1:5 with linespoints title 'pairs'\n"
    )
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Out<()> {
    let default_tol = crate::DEFAULT_TOL;
    let (command, loaded) = {
        let name = match &cli.cmd {
            Cmd::ExtCheck(_) => "ext-check",
            Cmd::ScenarioBuild(_) => "scenario-build",
            Cmd::ScenarioValidate(_) => "scenario-validate",
            Cmd::Simulate(_) => "simulate",
            Cmd::LhvCheck(_) => "lhv-check",
            Cmd::Newcond(_) => "newcond",
            Cmd::PairsCount(_) => "pairs-count",
            Cmd::FrelVerify(_) => "frel-verify",
            Cmd::QssRun(_) => "qss-run",
        };
        (name, load(cli, name)?)
    };
    let tol = cli.tol.or(loaded.as_ref().and_then(|l| l.tol)).unwrap_or(default_tol);
    if !(tol.is_finite() && tol > 0.0) {
        return usage("--tol must be a positive number");
    }
    let default_bound = match &cli.cmd {
        Cmd::LhvCheck(_) => DEFAULT_SEARCH_BOUND,
        Cmd::FrelVerify(_) => crate::frel::DEFAULT_CARRIER_BOUND as u64,
        Cmd::QssRun(_) => 1 << 20,
        Cmd::Simulate(_) => DEFAULT_AMPLITUDE_BOUND as u64,
        _ => DEFAULT_ENUMERATION_BOUND as u64,
    };
    let bound = cli.bound.or(loaded.as_ref().and_then(|l| l.bound)).unwrap_or(default_bound);
    let ctx = Ctx { tol, bound };

    let (input, emitted): (Value, Emitted) = match &cli.cmd {
        Cmd::ExtCheck(a) => {
            let input: ExtInput = match loaded {
                Some(l) => from_value(l.input)?,
                None => {
                    let (Some(g), Some(s)) = (&a.group, &a.subgroup) else {
                        return usage("ext-check needs --group and --subgroup (or --input)");
                    };
                    let group = FinAbGroup::new(parse_list(g, "factor")?)?;
                    let subgroup = s
                        .split(';')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| group.element(&parse_list::<i64>(t, "coordinate")?))
                        .collect::<Result<Vec<_>>>()?;
                    ExtInput { group, subgroup }
                }
            };
            let result = ext_check(&input, &ctx)?;
            (to_value(&input), Emitted { result, csv: None })
        }
        Cmd::ScenarioBuild(a) => {
            let input: BuildInput = match loaded {
                Some(l) => from_value(l.input)?,
                None if a.preset.is_some() => BuildInput {
                    equation: None,
                    controls: None,
                    preset: a.preset.clone(),
                },
                None => {
                    let (Some(d), Some(c), Some(p), Some(r)) = (a.d, &a.coeffs, &a.phases, &a.rhs) else {
                        return usage("scenario-build needs --D, --coeffs, --phases and --rhs, or --preset");
                    };
                    let eq = PhaseEquation::new(d, parse_list(c, "coefficient")?, parse_phases(p, d)?, PhasePoint::parse(r, d)?);
                    BuildInput {
                        equation: Some(eq),
                        controls: a.controls,
                        preset: None,
                    }
                }
            };
            let s = build(&input)?;
            (to_value(&input), Emitted { result: to_value(&s), csv: None })
        }
        Cmd::ScenarioValidate(a) => {
            let s = scenario_input(loaded, a)?;
            let report = validate_scenario(&s)?;
            (to_value(&s), Emitted { result: to_value(&report), csv: None })
        }
        Cmd::Simulate(a) => {
            let s = scenario_input(loaded, a)?;
            let dists = s
                .rows
                .iter()
                .map(|row| mermin_outcome_distribution_bounded(s.dim, s.parties, row, bound as usize))
                .collect::<Result<Vec<_>>>()?;
            let mut csv = String::from("row,outcome_tuple,probability\n");
            for (r, d) in dists.iter().enumerate() {
                for line in d.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{r},{line}\n"));
                }
            }
            let result = serde_json::json!({ "tol": tol, "distributions": dists });
            (to_value(&s), Emitted { result, csv: Some(csv) })
        }
        Cmd::LhvCheck(a) => {
            let input: LhvInput = match loaded {
                Some(l) if l.input.get("scenario").is_some() => from_value(l.input)?,
                Some(l) => LhvInput {
                    scenario: from_value(l.input)?,
                    mode: a.mode.parse()?,
                },
                None => LhvInput {
                    scenario: scenario_from_args(&a.scenario)?,
                    mode: a.mode.parse()?,
                },
            };
            input.scenario.check_shape()?;
            let table = quantum_table(&input.scenario, tol)?;
            let v = lhv_exists(&table, input.mode, bound)?;
            let result = serde_json::json!({
                "tol": tol,
                "lhv_exists": v.exists(),
                "verdict": v,
            });
            (to_value(&input), Emitted { result, csv: None })
        }
        Cmd::Newcond(a) => {
            let input: NewcondInput = match loaded {
                Some(l) => from_value(l.input)?,
                None => {
                    let (Some(d), Some(v), Some(beta)) = (a.d, a.v, a.beta) else {
                        return usage("newcond needs --D, --V and --beta");
                    };
                    if a.b.is_none() == a.scan.is_none() {
                        return usage("newcond needs exactly one of --b and --scan");
                    }
                    NewcondInput {
                        d,
                        v,
                        beta,
                        b: a.b.as_deref().map(|b| PhasePoint::parse(b, d)).transpose()?,
                        scan: a.scan,
                    }
                }
            };
            let result = match (&input.b, input.scan) {
                (Some(b), None) => {
                    if b.dim() != input.d {
                        return Err(Error::Arity {
                            expected: input.d - 1,
                            got: b.dim() - 1,
                        }
                        .into());
                    }
                    to_value(&newcond(input.d, input.v, input.beta, b, tol))
                }
                (None, Some(q)) => {
                    let sols = scan_newcond(input.d, input.v, input.beta, q, tol, bound as u128)?;
                    serde_json::json!({ "q": q, "tol": tol, "solutions": sols })
                }
                _ => return Err(Error::InvalidInput("need exactly one of b and scan".into()).into()),
            };
            (to_value(&input), Emitted { result, csv: None })
        }
        Cmd::PairsCount(a) => {
            let input: PairsInput = match loaded {
                Some(l) => from_value(l.input)?,
                None => {
                    let (Some(d), Some(n), Some(q)) = (a.d, &a.n, a.q) else {
                        return usage("pairs-count needs --D, --N and --q");
                    };
                    PairsInput {
                        d,
                        n: parse_range(n)?,
                        q,
                        policy: a.policy.parse()?,
                    }
                }
            };
            let (rows, csv) = pair_count_series(input.n.iter().copied(), input.d, input.q, input.policy, tol, bound as u128)?;
            let csv_name = format!("pairs_D{}.csv", input.d);
            let script = gnuplot_script(input.d, &csv_name);
            if let Some(dir) = &a.out_dir {
                let write = |name: &str, body: &str| {
                    std::fs::write(dir.join(name), body)
                        .map_err(|e| Error::InvalidInput(format!("cannot write {name}: {e}")))
                };
                write(&csv_name, &csv)?;
                write(&format!("pairs_D{}.gp", input.d), &script)?;
            }
            let result = serde_json::json!({ "tol": tol, "rows": rows, "csv": csv, "gnuplot": script });
            (to_value(&input), Emitted { result, csv: Some(csv) })
        }
        Cmd::FrelVerify(a) => {
            let input: FrelInput = match loaded {
                Some(l) => from_value(l.input)?,
                None => {
                    let (Some(g), Some(h)) = (&a.g, &a.h) else {
                        return usage("frel-verify needs --G and --H");
                    };
                    FrelInput {
                        g: FinAbGroup::new(parse_list(g, "factor")?)?,
                        h: FinAbGroup::new(parse_list(h, "factor")?)?,
                        dump: a.dump,
                    }
                }
            };
            let pair = build_sc_pair_bounded(&input.g, &input.h, bound as usize)?;
            let laws = verify_rel_laws(&pair);
            let phases = if pair.carrier() <= PHASE_SCAN_CARRIER_BOUND {
                Some(rel_phases(&pair)?)
            } else {
                None
            };
            let locality = frel_locality_check(&input.g, &input.h)?;
            let result = serde_json::json!({
                "laws": laws,
                "all_laws_hold": laws.all_hold(),
                "phase_count": phases.as_ref().map(|p| p.phases.len()),
                "classical_count": phases.as_ref().map(|p| p.classical.len()),
                "phases": phases,
                "locality": { "trivial": locality.trivial, "checked_divisors": locality.checked_divisors },
                "pair": input.dump.then(|| to_value(&pair)),
            });
            (to_value(&input), Emitted { result, csv: None })
        }
        Cmd::QssRun(a) => {
            let input: QssInput = match loaded {
                Some(l) if l.input.get("config").is_some() => from_value(l.input)?,
                Some(l) => QssInput {
                    config: from_value(l.input)?,
                    attack: a.attack.clone(),
                    secret: a.secret,
                },
                None => {
                    let (Some(n), Some(d), Some(alpha)) = (a.n, a.d, &a.alphabet) else {
                        return usage("qss-run needs --N, --D and --alphabet (or --input)");
                    };
                    let cfg = QssConfig::shared(n, d, parse_phases(alpha, d)?, cli.seed.unwrap_or(0), a.rounds.unwrap_or(10_000));
                    QssInput {
                        config: cfg,
                        attack: a.attack.clone(),
                        secret: a.secret,
                    }
                }
            };
            let emitted = qss(&input, &ctx, a.transcripts.as_ref())?;
            (to_value(&input), emitted)
        }
    };

    if cli.csv {
        let Some(csv) = emitted.csv else {
            return usage(format!("{command} has no CSV output"));
        };
        out.write_all(csv.as_bytes()).map_err(io_failure)?;
        return Ok(());
    }
    let env = Envelope {
        command: command.into(),
        tol,
        bound,
        input,
        result: emitted.result,
    };
    writeln!(out, "{}", serde_json::to_string(&env).expect("serializable")).map_err(io_failure)?;
    Ok(())
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Domain(Error::InvalidInput(format!("write failed: {e}")))
}

/// Parses `args` (including the program name) and runs the command,
/// writing everything to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(out, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(out, "{body}");
            EXIT_DOMAIN
        }
    }
}
