//! `floc`: build and check localities, partial normal subgroups and
//! products of fusion subsystems from JSON instance descriptors.

mod commands;
mod outcome;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fusion_locality::exec::{self, Mode};
use fusion_locality::fusion::DEFAULT_MORPHISM_CAP;
use fusion_locality::group::DEFAULT_GROUP_CAP;
use fusion_locality::locality::DEFAULT_MAX_WORD_LENGTH;
use serde_json::json;

use commands::{Settings, Task};
use outcome::{exit_code, InstanceReport, Status};

#[derive(Parser, Debug)]
#[command(name = "floc", version, about = "Localities, partial normal subgroups and fusion-system products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Word-length bound for axiom validation.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORD_LENGTH)]
    max_word_len: usize,
    /// Largest group order enumerated from generators.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CAP)]
    group_cap: usize,
    /// Largest number of morphisms in a generated fusion system.
    #[arg(long, global = true, default_value_t = DEFAULT_MORPHISM_CAP)]
    morphism_cap: usize,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Add wall-clock timings to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ambient group data.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Build or validate a locality.
    #[command(subcommand)]
    Locality(LocalityCmd),
    /// `NK` for `N` partial normal in `L`, `K` partial normal in `N_L(T)`.
    Theorem1 { descriptor: PathBuf },
    /// `NK` for `K` partial subnormal in `N_L(T)`.
    Theorem2 { descriptor: PathBuf },
    /// Products under restriction of the object set.
    Restriction { descriptor: PathBuf },
    /// Fusion system of the locality.
    #[command(subcommand)]
    Fusion(FusionCmd),
    /// Compute products `ED` of fusion subsystems.
    ProductEd { descriptor: PathBuf },
    /// Check the properties of products `ED`.
    VerifyEd { descriptor: PathBuf },
    /// Everything above, for each descriptor.
    Suite {
        #[arg(required = true)]
        descriptors: Vec<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    Info { descriptor: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LocalityCmd {
    Build { descriptor: PathBuf },
    Validate { descriptor: PathBuf },
}

#[derive(Subcommand, Debug)]
enum FusionCmd {
    Build { descriptor: PathBuf },
    SaturateCheck { descriptor: PathBuf },
}

impl Command {
    fn task(self) -> (Task, Vec<PathBuf>) {
        match self {
            Command::Group(GroupCmd::Info { descriptor }) => (Task::GroupInfo, vec![descriptor]),
            Command::Locality(LocalityCmd::Build { descriptor }) => (Task::LocalityBuild, vec![descriptor]),
            Command::Locality(LocalityCmd::Validate { descriptor }) => (Task::LocalityValidate, vec![descriptor]),
            Command::Theorem1 { descriptor } => (Task::Theorem1, vec![descriptor]),
            Command::Theorem2 { descriptor } => (Task::Theorem2, vec![descriptor]),
            Command::Restriction { descriptor } => (Task::Restriction, vec![descriptor]),
            Command::Fusion(FusionCmd::Build { descriptor }) => (Task::FusionBuild, vec![descriptor]),
            Command::Fusion(FusionCmd::SaturateCheck { descriptor }) => (Task::SaturateCheck, vec![descriptor]),
            Command::ProductEd { descriptor } => (Task::ProductEd, vec![descriptor]),
            Command::VerifyEd { descriptor } => (Task::VerifyEd, vec![descriptor]),
            Command::Suite { descriptors } => (Task::Suite, descriptors),
        }
    }
}

fn print_summary(reports: &[InstanceReport]) {
    for r in reports {
        for c in &r.clauses {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Unknown => "UNKNOWN",
            };
            println!("{tag:<8}{} {}", r.instance, c.name);
        }
        for e in &r.errors {
            println!("{:<8}{} {}", "ERROR", r.instance, e.message);
        }
        for f in &r.flags {
            println!("{:<8}{} {f}", "FLAG", r.instance);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let settings = Settings {
        seed: g.seed,
        max_word_len: g.max_word_len,
        group_cap: g.group_cap,
        morphism_cap: g.morphism_cap,
        timing: g.timing,
        assume_valid: false,
    };
    let (task, paths) = cli.command.task();
    let mode = if g.sequential { Mode::Sequential } else { Mode::Parallel };
    let reports = exec::with_mode(mode, || {
        exec::map_range(paths.len(), |i| exec::with_mode(mode, || commands::run(task, &paths[i], &settings)))
    });
    let code = exit_code(&reports);
    let doc = json!({"command": task.name(), "exit_code": code, "reports": reports});
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    if let Some(path) = &g.out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if g.json {
        println!("{text}");
    } else {
        print_summary(&reports);
    }
    ExitCode::from(code as u8)
}
