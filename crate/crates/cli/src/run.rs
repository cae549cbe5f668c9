//! Executes a resolved [`Task`] and writes its artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use repsel_core::export::{
    read_selection_json, write_distance_csv, write_elbow_csv, write_representatives_csv,
    write_selection_json,
};
use repsel_core::kmeans::kmeans_medoid_detailed;
use repsel_core::par::{self, Execution};
use repsel_core::select::{k_for_target_days, solve_exact_with};
use repsel_core::{
    build_matrix, elbow, fidelity, load_csv, local_search_swap, solve_greedy, AnnualSeries,
    DistanceMatrix, ElbowCurve, ExactOptions, Optimality, Selection, SliceGeometry,
};

use crate::args::Solver;
use crate::config::{Budget, DataConfig, Destination, Task};
use crate::error::{io_at, AtStage, CliError, Stage};
use crate::manifest::sha256_file;

/// What a run produced.
#[derive(Debug, Default)]
pub struct Report {
    pub written: Vec<PathBuf>,
    pub budget_exceeded: bool,
    pub summary: Vec<String>,
}

struct Data {
    raw: AnnualSeries,
    scaled: AnnualSeries,
    source: serde_json::Value,
}

fn load(data: &DataConfig) -> Result<Data, CliError> {
    let raw = load_csv(&data.input, &data.features, data.truncate_to_hours).at(Stage::Ingest)?;
    let scaled = raw.normalize(data.normalize.into()).at(Stage::Ingest)?;
    let source = serde_json::json!({
        "input-sha256": sha256_file(&data.input, Stage::Ingest)?,
        "features": raw.feature_names(),
        "hours": raw.hours(),
        "normalize": data.normalize,
    });
    Ok(Data {
        raw,
        scaled,
        source,
    })
}

fn geometry(
    series: &AnnualSeries,
    length_days: usize,
    stride_hours: usize,
) -> Result<SliceGeometry, CliError> {
    SliceGeometry::new(series.hours(), length_days * 24, stride_hours).at(Stage::Config)
}

fn exact_options(budget: &Budget) -> ExactOptions {
    ExactOptions {
        node_limit: budget.node_limit,
        time_limit: budget.time_limit_secs.map(Duration::from_secs_f64),
        ..ExactOptions::default()
    }
}

struct Sink<'a> {
    dir: &'a Path,
    report: Report,
}

impl<'a> Sink<'a> {
    fn new(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(io_at(Stage::Output, dir))?;
        Ok(Self {
            dir,
            report: Report::default(),
        })
    }

    fn write<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(io_at(Stage::Output, &path))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(io_at(Stage::Output, &path))?;
        self.report.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Core {
                stage: Stage::Output,
                source: e.into(),
            })?;
            writeln!(w).map_err(io_at(Stage::Output, name))
        })
    }
}

pub fn execute(task: &Task, dest: &Destination) -> Result<Report, CliError> {
    match task {
        Task::Select {
            data,
            length_days,
            stride_hours,
            periods,
            solver,
            budget,
            dump_distance_matrix,
        } => {
            let data = load(data)?;
            let g = geometry(&data.raw, *length_days, *stride_hours)?;
            let d = build_matrix(&data.scaled, &g).at(Stage::Distance)?;
            let selection = match solver {
                Solver::Exact => {
                    solve_exact_with(&d, *periods, &exact_options(budget))
                        .at(Stage::Selection)?
                        .0
                }
                Solver::Greedy => solve_greedy(&d, *periods).at(Stage::Selection)?,
                Solver::Swap => {
                    let start = solve_greedy(&d, *periods).at(Stage::Selection)?;
                    local_search_swap(&d, &start).at(Stage::Selection)?
                }
            };
            let dump = dump_distance_matrix.then_some(&d);
            selection_outputs(&dest.dir, &data, &selection, dump)
        }
        Task::Kmeans {
            data,
            periods,
            seed,
            max_iters,
        } => {
            let data = load(data)?;
            let outcome = kmeans_medoid_detailed(&data.scaled, *periods, *seed, *max_iters)
                .at(Stage::Selection)?;
            if !outcome.converged {
                log::warn!(
                    "k-means stopped after {} iterations without converging",
                    outcome.iterations
                );
            }
            selection_outputs(&dest.dir, &data, &outcome.selection, None)
        }
        Task::Elbow {
            data,
            lengths,
            stride_hours,
            target_days,
            budget,
        } => {
            let data = load(data)?;
            let opts = exact_options(budget);
            let curves = par::map_slice(lengths, Execution::default(), |&length| {
                elbow_curve(&data.scaled, length, *stride_hours, *target_days, &opts)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let mut sink = Sink::new(&dest.dir)?;
            let name = dest.file.as_deref().unwrap_or("elbow.csv");
            sink.write(name, |w| write_elbow_csv(w, &curves).at(Stage::Output))?;
            for c in &curves {
                let last = c.points.last().expect("non-empty curve");
                let bounded = c
                    .points
                    .iter()
                    .filter(|p| p.optimality != Optimality::ProvenOptimal)
                    .count();
                sink.report.budget_exceeded |= bounded > 0;
                sink.report.summary.push(format!(
                    "{}-day periods: k = 1..={}, objective {:.6} at k = {} ({} of {} points not proven optimal)",
                    c.length_days,
                    last.k,
                    last.objective,
                    last.k,
                    bounded,
                    c.points.len()
                ));
            }
            Ok(sink.report)
        }
        Task::Evaluate { data, selection } => {
            let data = load(data)?;
            let file = File::open(selection).map_err(io_at(Stage::Evaluation, selection))?;
            let record = read_selection_json(file).at(Stage::Evaluation)?;
            let selection = record.to_selection().at(Stage::Evaluation)?;
            let report = fidelity(&data.scaled, &selection).at(Stage::Evaluation)?;
            let mut sink = Sink::new(&dest.dir)?;
            sink.json(dest.file.as_deref().unwrap_or("fidelity.json"), &report)?;
            sink.report.summary.push(fidelity_line(&report));
            Ok(sink.report)
        }
        Task::DumpDistance {
            data,
            length_days,
            stride_hours,
        } => {
            let data = load(data)?;
            let g = geometry(&data.raw, *length_days, *stride_hours)?;
            let d = build_matrix(&data.scaled, &g).at(Stage::Distance)?;
            let mut sink = Sink::new(&dest.dir)?;
            sink.write(dest.file.as_deref().unwrap_or("distance.csv"), |w| {
                write_distance_csv(w, &d).at(Stage::Output)
            })?;
            sink.report
                .summary
                .push(format!("{} x {} distance matrix", d.n(), d.m()));
            Ok(sink.report)
        }
    }
}

fn elbow_curve(
    series: &AnnualSeries,
    length_days: usize,
    stride_hours: usize,
    target_days: usize,
    opts: &ExactOptions,
) -> Result<ElbowCurve, CliError> {
    let g = geometry(series, length_days, stride_hours)?;
    let d = build_matrix(series, &g).at(Stage::Distance)?;
    let wanted = k_for_target_days(target_days, length_days);
    let top = wanted.min(d.m());
    if top < wanted {
        log::warn!("{length_days}-day periods: only {top} windows exist, curve stops there");
    }
    let ks: Vec<usize> = (1..=top).collect();
    elbow(&d, &ks, opts).at(Stage::Selection)
}

fn fidelity_line(report: &repsel_core::FidelityReport) -> String {
    let parts: Vec<String> = report
        .features
        .iter()
        .map(|f| format!("{} nrmse {:.4}", f.feature, f.duration_curve_nrmse))
        .collect();
    format!(
        "fidelity: {}; correlation error {:.4}",
        parts.join(", "),
        report.correlation_error
    )
}

fn selection_outputs(
    dir: &Path,
    data: &Data,
    selection: &Selection,
    dump: Option<&DistanceMatrix>,
) -> Result<Report, CliError> {
    let mut sink = Sink::new(dir)?;
    sink.write("selection.json", |w| {
        write_selection_json(w, selection, Some(data.source.clone())).at(Stage::Output)
    })?;
    sink.write("representatives.csv", |w| {
        write_representatives_csv(w, &data.raw, selection).at(Stage::Output)
    })?;
    let report = fidelity(&data.scaled, selection).at(Stage::Evaluation)?;
    sink.json("fidelity.json", &report)?;
    if let Some(d) = dump {
        sink.write("distance.csv", |w| {
            write_distance_csv(w, d).at(Stage::Output)
        })?;
    }
    let g = &selection.geometry;
    sink.report.summary.push(format!(
        "{} periods of {} day(s) by {}: objective {:.6} ({})",
        selection.k(),
        g.days_per_period(),
        selection.method.label(),
        selection.objective,
        selection.optimality.label()
    ));
    if let Optimality::Bounded { lower_bound, gap } = selection.optimality {
        sink.report.budget_exceeded = true;
        sink.report.summary.push(format!(
            "budget exhausted: lower bound {lower_bound:.6}, gap {:.3}%",
            100.0 * gap
        ));
    }
    sink.report.summary.push(fidelity_line(&report));
    Ok(sink.report)
}
