//! `rtminus`: evaluate, query, translate and validate policies, and run chain
//! discovery over a directory of per-issuer credential files.
//!
//! Exit codes: 0 success, 1 false query or empty membership, 2 usage error,
//! 3 parse or validation error, 4 missing definition, 5 choice cap exceeded.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtminus::discovery::{discover_with, DirectoryStore, DiscoveryOptions, StoreError, DEFAULT_CHOICE_CAP};
use rtminus::glp::parse_raw_program;
use rtminus::policy::DiagnosticKind;
use rtminus::{
    parse_policy, query_atom, translate, validate, well_founded_model, Entity, GroundAtom, Policy, Role, RoleName,
    ThreeValuedModel,
};
use serde::Serialize;

const EMPTY: u8 = 1;
const USAGE: u8 = 2;
const INVALID: u8 = 3;
const MISSING_DEFINITION: u8 = 4;
const CAP_EXCEEDED: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "rtminus", version, about = "Trust-management policies with negation-in-context")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the well-founded model of a policy or of a raw ground program.
    Eval {
        #[command(flatten)]
        policies: PolicyFiles,
        /// Ground program in dump format, instead of policies.
        #[arg(long, value_name = "FILE", conflicts_with = "policy")]
        raw_glp: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the truth value of the goal role for every entity.
    Query {
        #[command(flatten)]
        policies: PolicyFiles,
        #[arg(long, value_name = "ROLE", value_parser = parse_role)]
        goal: Role,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run chain discovery against a store directory.
    Discover {
        /// Directory holding one `<Entity>.rt` file per issuer.
        #[arg(long, value_name = "DIR")]
        stores: PathBuf,
        #[arg(long, value_name = "ROLE", value_parser = parse_role)]
        goal: Role,
        /// Also print the discovery trace.
        #[arg(long)]
        trace: bool,
        /// Search states explored per unfounded-set seed.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_CHOICE_CAP,
              value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        choice_cap: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the ground program of a policy.
    Translate {
        #[command(flatten)]
        policies: PolicyFiles,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check policies and print diagnostics.
    Validate {
        #[command(flatten)]
        policies: PolicyFiles,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct PolicyFiles {
    /// Policy file; repeat to merge several.
    #[arg(long, value_name = "FILE")]
    policy: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

fn parse_role(s: &str) -> Result<Role, String> {
    let (owner, name) = s.split_once('.').ok_or_else(|| format!("`{s}` is not a role; expected `Entity.role`"))?;
    let role = Role::new(Entity::new(owner), RoleName::new(name));
    if !role.owner.is_well_formed() || !role.name.is_well_formed() {
        return Err(format!("`{s}` is not a role; expected `Entity.role`"));
    }
    Ok(role)
}

/// Error reported on stderr together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Self { code, message: message.to_string() }
    }
}

type Run = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(USAGE, format!("{}: {e}", path.display())))
}

fn load(files: &PolicyFiles) -> Result<Policy, Failure> {
    if files.policy.is_empty() {
        return Err(Failure::new(USAGE, "at least one --policy is required"));
    }
    let mut merged = Policy::default();
    for path in &files.policy {
        let p = parse_policy(&read(path)?).map_err(|e| Failure::new(INVALID, format!("{}:{e}", path.display())))?;
        merged = merged.merge(&p);
    }
    Ok(merged)
}

fn sorted_text<T: Display>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    let mut v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    v.sort();
    v
}

fn json(out: &mut impl Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

#[derive(Serialize)]
struct ModelJson {
    #[serde(rename = "true")]
    true_atoms: Vec<String>,
    #[serde(rename = "false")]
    false_atoms: Vec<String>,
    undefined: Vec<String>,
}

fn print_model<A: Ord + Display>(out: &mut impl Write, model: &ThreeValuedModel<A>, format: Format) -> io::Result<()> {
    match format {
        Format::Text => out.write_all(model.dump().as_bytes()),
        Format::Json => json(
            out,
            &ModelJson {
                true_atoms: sorted_text(&model.true_atoms),
                false_atoms: sorted_text(&model.false_atoms),
                undefined: sorted_text(&model.undefined_atoms),
            },
        ),
    }
}

fn eval(out: &mut impl Write, policies: &PolicyFiles, raw: Option<&Path>, format: Format) -> Run {
    match raw {
        Some(path) => {
            let program = parse_raw_program(&read(path)?)
                .map_err(|e| Failure::new(INVALID, format!("{}:{e}", path.display())))?;
            print_model(out, &well_founded_model(&program), format).map_err(io_failure)?;
        }
        None => {
            let policy = load(policies)?;
            print_model(out, &well_founded_model(&translate(&policy)), format).map_err(io_failure)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct Verdict {
    entity: String,
    truth: String,
    member: bool,
}

#[derive(Serialize)]
struct QueryJson {
    goal: String,
    verdicts: Vec<Verdict>,
    members: Vec<String>,
}

fn names(set: &BTreeSet<Entity>) -> Vec<String> {
    set.iter().map(|e| e.to_string()).collect()
}

fn query(out: &mut impl Write, policies: &PolicyFiles, goal: &Role, format: Format) -> Run {
    let policy = load(policies)?;
    let known = policy.universe().contains(&goal.owner) && policy.role_names().contains(&goal.name);
    let mut verdicts = Vec::new();
    if known {
        let model = well_founded_model(&translate(&policy));
        for e in policy.universe() {
            let truth = query_atom(&model, &GroundAtom::of(goal, e)).map_err(|err| Failure::new(INVALID, err))?;
            verdicts.push((e.clone(), truth));
        }
    } else {
        eprintln!("warning: the policy never mentions {goal}");
    }
    let members: BTreeSet<Entity> = verdicts.iter().filter(|(_, t)| t.is_member()).map(|(e, _)| e.clone()).collect();
    match format {
        Format::Text => {
            for (e, t) in &verdicts {
                let m = if t.is_member() { "member" } else { "not a member" };
                writeln!(out, "{e}: {t} ({m})").map_err(io_failure)?;
            }
            writeln!(out, "members of {goal}: {{{}}}", names(&members).join(", ")).map_err(io_failure)?;
        }
        Format::Json => json(
            out,
            &QueryJson {
                goal: goal.to_string(),
                verdicts: verdicts
                    .iter()
                    .map(|(e, t)| Verdict { entity: e.to_string(), truth: t.to_string(), member: t.is_member() })
                    .collect(),
                members: names(&members),
            },
        )
        .map_err(io_failure)?,
    }
    Ok(if members.is_empty() { EMPTY } else { 0 })
}

#[derive(Serialize)]
struct DiscoverJson {
    goal: String,
    members: Vec<String>,
    cap_exceeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<String>>,
}

fn store_failure(e: StoreError) -> Failure {
    let code = match e {
        StoreError::Parse { .. } | StoreError::NotIssuer { .. } | StoreError::BadFileName { .. } => INVALID,
        StoreError::Io { .. } => USAGE,
    };
    Failure::new(code, e)
}

fn discover(out: &mut impl Write, dir: &Path, goal: &Role, trace: bool, choice_cap: usize, format: Format) -> Run {
    let stores = DirectoryStore::open(dir).map_err(store_failure)?;
    let found = discover_with(&stores, goal, DiscoveryOptions { choice_cap })
        .map_err(|e| Failure::new(MISSING_DEFINITION, e))?;
    match format {
        Format::Text => {
            for m in &found.members {
                writeln!(out, "{m}").map_err(io_failure)?;
            }
            if trace {
                writeln!(out, "TRACE\n{}", found.trace).map_err(io_failure)?;
            }
        }
        Format::Json => json(
            out,
            &DiscoverJson {
                goal: goal.to_string(),
                members: names(&found.members),
                cap_exceeded: found.cap_exceeded,
                trace: trace.then(|| found.trace.events.iter().map(|e| e.to_string()).collect()),
            },
        )
        .map_err(io_failure)?,
    }
    if found.cap_exceeded {
        eprintln!("warning: choice cap {choice_cap} exceeded; some memberships may be left undecided");
        return Ok(CAP_EXCEEDED);
    }
    Ok(if found.members.is_empty() { EMPTY } else { 0 })
}

fn translate_cmd(out: &mut impl Write, policies: &PolicyFiles, format: Format) -> Run {
    let dump = translate(&load(policies)?).dump();
    match format {
        Format::Text => out.write_all(dump.as_bytes()),
        Format::Json => json(out, &serde_json::json!({ "clauses": dump.lines().collect::<Vec<_>>() })),
    }
    .map_err(io_failure)?;
    Ok(0)
}

#[derive(Serialize)]
struct DiagnosticJson {
    location: String,
    kind: &'static str,
    message: String,
}

fn kind_name(kind: DiagnosticKind) -> &'static str {
    match kind {
        DiagnosticKind::EntityCase => "entity-case",
        DiagnosticKind::RoleNameCase => "role-name-case",
        DiagnosticKind::LinkingOwner => "linking-owner",
    }
}

fn validate_cmd(out: &mut impl Write, files: &PolicyFiles, format: Format) -> Run {
    if files.policy.is_empty() {
        return Err(Failure::new(USAGE, "at least one --policy is required"));
    }
    let mut diags = Vec::new();
    let mut count = 0;
    for path in &files.policy {
        let location = path.display().to_string();
        match parse_policy(&read(path)?) {
            Err(e) => diags.push(DiagnosticJson {
                location: format!("{location}:{}", e.span),
                kind: "syntax",
                message: e.message,
            }),
            Ok(p) => {
                count += p.len();
                diags.extend(validate(&p).into_iter().map(|d| DiagnosticJson {
                    location: format!("{location}: {}", d.credential),
                    kind: kind_name(d.kind),
                    message: d.message,
                }));
            }
        }
    }
    match format {
        Format::Text => {
            for d in &diags {
                writeln!(out, "{}: {}", d.location, d.message).map_err(io_failure)?;
            }
            if diags.is_empty() {
                writeln!(out, "ok: {count} credentials").map_err(io_failure)?;
            }
        }
        Format::Json => json(out, &serde_json::json!({ "diagnostics": diags })).map_err(io_failure)?,
    }
    Ok(if diags.is_empty() { 0 } else { INVALID })
}

fn io_failure(e: io::Error) -> Failure {
    Failure::new(USAGE, format!("writing output: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Eval { policies, raw_glp, format } => {
            if raw_glp.is_none() && policies.policy.is_empty() {
                Err(Failure::new(USAGE, "eval needs --policy or --raw-glp"))
            } else {
                eval(&mut out, policies, raw_glp.as_deref(), *format)
            }
        }
        Command::Query { policies, goal, format } => query(&mut out, policies, goal, *format),
        Command::Discover { stores, goal, trace, choice_cap, format } => {
            discover(&mut out, stores, goal, *trace, *choice_cap, *format)
        }
        Command::Translate { policies, format } => translate_cmd(&mut out, policies, *format),
        Command::Validate { policies, format } => validate_cmd(&mut out, policies, *format),
    };
    let flushed = out.flush();
    match result {
        Ok(code) if flushed.is_ok() => ExitCode::from(code),
        Ok(_) => {
            eprintln!("rtminus: writing output failed");
            ExitCode::from(USAGE)
        }
        Err(f) => {
            eprintln!("rtminus: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
