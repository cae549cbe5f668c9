mod args;
mod config;
mod error;
mod manifest;
mod run;

use std::fs::File;
use std::io::BufWriter;

use clap::Parser;

use args::{Baseline, Cli, Command, RerunArgs, SynthArgs};
use config::{Destination, Task};
use error::{io_at, AtStage, CliError, Stage, EXIT_BUDGET};
use manifest::{hash_inputs, manifest_name, Manifest};

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    let (task, dest) = match command {
        Command::Select(a) => config::select(&a)?,
        Command::Baseline(Baseline::Kmeans(a)) => config::kmeans(&a)?,
        Command::Elbow(a) => config::elbow(&a)?,
        Command::Evaluate(a) => config::evaluate(&a)?,
        Command::DumpDistance(a) => config::dump_distance(&a)?,
        Command::Synth(a) => return synth(&a),
        Command::Rerun(a) => return rerun(&a),
    };
    let (_, code) = perform(&task, &dest)?;
    Ok(code)
}

/// Runs `task`, writes its manifest and prints the summary.
fn perform(task: &Task, dest: &Destination) -> Result<(Manifest, i32), CliError> {
    let inputs = hash_inputs(task)?;
    log::info!("running {}", task.name());
    let report = run::execute(task, dest)?;
    let manifest = Manifest::new(task, dest, inputs, &report.written)?;
    let manifest_path = dest.dir.join(manifest_name(dest));
    manifest.write(&manifest_path)?;
    for line in &report.summary {
        println!("{line}");
    }
    for path in report.written.iter().chain(std::iter::once(&manifest_path)) {
        println!("wrote {}", path.display());
    }
    let code = if report.budget_exceeded {
        EXIT_BUDGET
    } else {
        0
    };
    Ok((manifest, code))
}

fn synth(args: &SynthArgs) -> Result<i32, CliError> {
    if args.days == 0 {
        return Err(CliError::Config("--days must be positive".into()));
    }
    let series = repsel_core::synthetic::synthetic_year(args.seed, args.days);
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_at(Stage::Output, dir))?;
    }
    let file = File::create(&args.out).map_err(io_at(Stage::Output, &args.out))?;
    repsel_core::export::write_series_csv(
        BufWriter::new(file),
        &series,
        repsel_core::synthetic::start_time(),
    )
    .at(Stage::Output)?;
    println!("wrote {} ({} hours)", args.out.display(), series.hours());
    Ok(0)
}

fn rerun(args: &RerunArgs) -> Result<i32, CliError> {
    let recorded = Manifest::read(&args.manifest)?;
    let changed = recorded.changed_inputs()?;
    if !changed.is_empty() {
        return Err(CliError::Manifest(format!(
            "inputs changed since the manifest was written: {}",
            changed.join(", ")
        )));
    }
    let dest = Destination {
        dir: args.out_dir.clone(),
        file: recorded.output_file.clone(),
    };
    let (fresh, code) = perform(&recorded.task, &dest)?;
    let differing = recorded.differing_outputs(&fresh);
    if differing.is_empty() {
        println!("all {} outputs match the manifest", recorded.outputs.len());
    } else if args.verify {
        return Err(CliError::Manifest(format!(
            "outputs differ from the manifest: {}",
            differing.join(", ")
        )));
    } else {
        log::warn!("outputs differ from the manifest: {}", differing.join(", "));
    }
    Ok(code)
}
