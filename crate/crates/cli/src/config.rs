//! Flag and config-file resolution into a fully specified [`Task`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use repsel_core::select::k_for_target_days;

use crate::args::{
    BudgetArgs, CountArgs, DataArgs, DumpArgs, ElbowArgs, EvaluateArgs, GeometryArgs, KmeansArgs,
    Normalize, SelectArgs, Solver,
};
use crate::error::{io_at, CliError, Stage};

pub const DEFAULT_TIME_LIMIT_SECS: f64 = 600.0;
pub const DEFAULT_NODE_LIMIT: u64 = 5_000_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_LENGTHS: [usize; 5] = [1, 2, 3, 4, 5];

/// Contents of a `--config` TOML file. Keys mirror the long flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub features: Option<Vec<String>>,
    pub normalize: Option<Normalize>,
    pub truncate_to_hours: Option<usize>,
    pub length_days: Option<usize>,
    pub stride_hours: Option<usize>,
    pub periods: Option<usize>,
    pub target_days: Option<usize>,
    pub solver: Option<Solver>,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub lengths: Option<Vec<usize>>,
    pub dump_distance_matrix: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(io_at(Stage::Config, path))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DataConfig {
    pub input: PathBuf,
    pub features: Vec<String>,
    pub normalize: Normalize,
    pub truncate_to_hours: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Budget {
    pub time_limit_secs: Option<f64>,
    pub node_limit: u64,
}

/// A resolved command. This is what manifests record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    #[serde(rename_all = "kebab-case")]
    Select {
        data: DataConfig,
        length_days: usize,
        stride_hours: usize,
        periods: usize,
        solver: Solver,
        budget: Budget,
        dump_distance_matrix: bool,
    },
    #[serde(rename_all = "kebab-case")]
    Kmeans {
        data: DataConfig,
        periods: usize,
        seed: u64,
        max_iters: usize,
    },
    #[serde(rename_all = "kebab-case")]
    Elbow {
        data: DataConfig,
        lengths: Vec<usize>,
        stride_hours: usize,
        target_days: usize,
        budget: Budget,
    },
    #[serde(rename_all = "kebab-case")]
    Evaluate {
        data: DataConfig,
        selection: PathBuf,
    },
    #[serde(rename_all = "kebab-case")]
    DumpDistance {
        data: DataConfig,
        length_days: usize,
        stride_hours: usize,
    },
}

impl Task {
    pub fn data(&self) -> &DataConfig {
        match self {
            Task::Select { data, .. }
            | Task::Kmeans { data, .. }
            | Task::Elbow { data, .. }
            | Task::Evaluate { data, .. }
            | Task::DumpDistance { data, .. } => data,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Task::Select { .. } => "select",
            Task::Kmeans { .. } => "baseline kmeans",
            Task::Elbow { .. } => "elbow",
            Task::Evaluate { .. } => "evaluate",
            Task::DumpDistance { .. } => "dump-distance",
        }
    }
}

/// Where a command writes. Single-file commands carry their file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Destination {
    pub dir: PathBuf,
    pub file: Option<String>,
}

impl Destination {
    fn directory(dir: PathBuf) -> Self {
        Self { dir, file: None }
    }

    fn file(path: PathBuf) -> Result<Self, CliError> {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Config(format!("`{}` is not a file path", path.display())))?
            .to_string();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        Ok(Self {
            dir,
            file: Some(name),
        })
    }
}

fn absolute(path: &Path, stage: Stage) -> Result<PathBuf, CliError> {
    std::fs::canonicalize(path).map_err(io_at(stage, path))
}

fn data_config(args: &DataArgs, file: &FileConfig) -> Result<DataConfig, CliError> {
    let input = args
        .input
        .clone()
        .or_else(|| file.input.clone())
        .ok_or_else(|| CliError::Config("an input CSV is required (--input)".into()))?;
    Ok(DataConfig {
        input: absolute(&input, Stage::Ingest)?,
        features: args
            .features
            .clone()
            .or_else(|| file.features.clone())
            .unwrap_or_default(),
        normalize: args
            .normalize
            .or(file.normalize)
            .unwrap_or(Normalize::Minmax),
        truncate_to_hours: args.truncate_to_hours.or(file.truncate_to_hours),
    })
}

fn budget(args: &BudgetArgs, file: &FileConfig) -> Result<Budget, CliError> {
    let secs = args
        .time_limit
        .or(file.time_limit)
        .unwrap_or(DEFAULT_TIME_LIMIT_SECS);
    if !(secs >= 0.0 && secs.is_finite()) {
        return Err(CliError::Config(format!("invalid --time-limit {secs}")));
    }
    let node_limit = args
        .node_limit
        .or(file.node_limit)
        .unwrap_or(DEFAULT_NODE_LIMIT);
    if node_limit == 0 {
        return Err(CliError::Config("--node-limit must be positive".into()));
    }
    Ok(Budget {
        time_limit_secs: (secs > 0.0).then_some(secs),
        node_limit,
    })
}

/// Checks the parts of the geometry that do not depend on the series length.
fn shape(length_days: usize, stride_hours: usize) -> Result<(), CliError> {
    if length_days == 0 || stride_hours == 0 {
        return Err(CliError::Config(
            "period length and stride must be positive".into(),
        ));
    }
    if !(length_days * 24).is_multiple_of(stride_hours) {
        return Err(CliError::Config(format!(
            "stride of {stride_hours} h does not divide the {length_days}-day period"
        )));
    }
    Ok(())
}

fn geometry(args: &GeometryArgs, file: &FileConfig) -> Result<(usize, usize), CliError> {
    let length = args.length_days.or(file.length_days).unwrap_or(1);
    let stride = args.stride_hours.or(file.stride_hours).unwrap_or(24);
    shape(length, stride)?;
    Ok((length, stride))
}

/// Flags win as a pair: `--periods` on the command line overrides
/// `target-days` in the file and vice versa.
fn periods(args: &CountArgs, file: &FileConfig, length_days: usize) -> Result<usize, CliError> {
    let (periods, target) = if args.periods.is_some() || args.target_days.is_some() {
        (args.periods, args.target_days)
    } else {
        (file.periods, file.target_days)
    };
    let k = match (periods, target) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either periods or target-days, not both".into(),
            ));
        }
        (Some(k), None) => k,
        (None, Some(t)) => k_for_target_days(t, length_days),
        (None, None) => {
            return Err(CliError::Config(
                "--periods or --target-days is required".into(),
            ));
        }
    };
    if k == 0 {
        return Err(CliError::Config(
            "the number of periods must be positive".into(),
        ));
    }
    Ok(k)
}

fn out_dir(flag: &Option<PathBuf>, file: &FileConfig) -> Destination {
    Destination::directory(
        flag.clone()
            .or_else(|| file.out_dir.clone())
            .unwrap_or_else(|| "out".into()),
    )
}

fn out_file(
    flag: &Option<PathBuf>,
    file: &FileConfig,
    default: &str,
) -> Result<Destination, CliError> {
    Destination::file(
        flag.clone()
            .or_else(|| file.out.clone())
            .unwrap_or_else(|| default.into()),
    )
}

pub fn select(args: &SelectArgs) -> Result<(Task, Destination), CliError> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let (length_days, stride_hours) = geometry(&args.geometry, &file)?;
    let task = Task::Select {
        periods: periods(&args.count, &file, length_days)?,
        solver: args.solver.or(file.solver).unwrap_or(Solver::Exact),
        budget: budget(&args.budget, &file)?,
        dump_distance_matrix: args.dump_distance_matrix
            || file.dump_distance_matrix.unwrap_or(false),
        data: data_config(&args.data, &file)?,
        length_days,
        stride_hours,
    };
    Ok((task, out_dir(&args.out_dir, &file)))
}

pub fn kmeans(args: &KmeansArgs) -> Result<(Task, Destination), CliError> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let max_iters = args
        .max_iters
        .or(file.max_iters)
        .unwrap_or(repsel_core::kmeans::DEFAULT_MAX_ITERS);
    if max_iters == 0 {
        return Err(CliError::Config("--max-iters must be positive".into()));
    }
    let task = Task::Kmeans {
        periods: periods(&args.count, &file, 1)?,
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        max_iters,
        data: data_config(&args.data, &file)?,
    };
    Ok((task, out_dir(&args.out_dir, &file)))
}

pub fn elbow(args: &ElbowArgs) -> Result<(Task, Destination), CliError> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let stride_hours = args.stride_hours.or(file.stride_hours).unwrap_or(24);
    let lengths = args
        .lengths
        .clone()
        .or_else(|| file.lengths.clone())
        .unwrap_or_else(|| DEFAULT_LENGTHS.to_vec());
    if lengths.is_empty() {
        return Err(CliError::Config(
            "--lengths needs at least one value".into(),
        ));
    }
    for &l in &lengths {
        shape(l, stride_hours)?;
    }
    let target_days = args
        .target_days
        .or(file.target_days)
        .ok_or_else(|| CliError::Config("--target-days is required".into()))?;
    if target_days == 0 {
        return Err(CliError::Config("--target-days must be positive".into()));
    }
    let task = Task::Elbow {
        data: data_config(&args.data, &file)?,
        lengths,
        stride_hours,
        target_days,
        budget: budget(&args.budget, &file)?,
    };
    Ok((task, out_file(&args.out, &file, "elbow.csv")?))
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(Task, Destination), CliError> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let task = Task::Evaluate {
        data: data_config(&args.data, &file)?,
        selection: absolute(&args.selection, Stage::Evaluation)?,
    };
    Ok((task, out_file(&args.out, &file, "fidelity.json")?))
}

pub fn dump_distance(args: &DumpArgs) -> Result<(Task, Destination), CliError> {
    let file = FileConfig::load(args.data.config.as_deref())?;
    let (length_days, stride_hours) = geometry(&args.geometry, &file)?;
    let task = Task::DumpDistance {
        data: data_config(&args.data, &file)?,
        length_days,
        stride_hours,
    };
    Ok((task, out_file(&args.out, &file, "distance.csv")?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn select_args(input: &Path) -> SelectArgs {
        SelectArgs {
            data: DataArgs {
                input: Some(input.to_path_buf()),
                ..Default::default()
            },
            geometry: GeometryArgs::default(),
            count: CountArgs {
                periods: Some(4),
                target_days: None,
            },
            solver: None,
            budget: BudgetArgs::default(),
            dump_distance_matrix: false,
            out_dir: None,
        }
    }

    #[test]
    fn defaults_fill_in() {
        let tmp = tempfile::NamedTempFile::new().unwrap();
        let (task, dest) = select(&select_args(tmp.path())).unwrap();
        match task {
            Task::Select {
                length_days,
                stride_hours,
                periods,
                solver,
                budget,
                data,
                ..
            } => {
                assert_eq!((length_days, stride_hours, periods), (1, 24, 4));
                assert_eq!(solver, Solver::Exact);
                assert_eq!(budget.time_limit_secs, Some(600.0));
                assert_eq!(data.normalize, Normalize::Minmax);
                assert!(data.input.is_absolute());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(dest.dir, PathBuf::from("out"));
    }

    #[test]
    fn flags_beat_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("x.csv");
        std::fs::write(&input, "").unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(
            &cfg,
            "length-days = 3\ntarget-days = 36\nsolver = \"greedy\"\nnormalize = \"zscore\"\ntime-limit = 0\n",
        )
        .unwrap();
        let mut args = select_args(&input);
        args.data.config = Some(cfg.clone());
        args.solver = Some(Solver::Swap);
        let (task, _) = select(&args).unwrap();
        match task {
            Task::Select {
                length_days,
                periods,
                solver,
                data,
                budget,
                ..
            } => {
                assert_eq!(length_days, 3);
                // --periods 4 on the command line wins over target-days.
                assert_eq!(periods, 4);
                assert_eq!(solver, Solver::Swap);
                assert_eq!(data.normalize, Normalize::Zscore);
                assert_eq!(budget.time_limit_secs, None);
            }
            other => panic!("{other:?}"),
        }
        args.count.periods = None;
        let (task, _) = select(&args).unwrap();
        assert!(matches!(task, Task::Select { periods: 12, .. }));
    }

    #[test]
    fn bad_values_are_config_errors() {
        let tmp = tempfile::NamedTempFile::new().unwrap();
        let mut args = select_args(tmp.path());
        args.geometry.stride_hours = Some(7);
        assert_eq!(select(&args).unwrap_err().exit_code(), 2);
        let mut args = select_args(tmp.path());
        args.count.periods = None;
        assert_eq!(select(&args).unwrap_err().exit_code(), 2);
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.toml");
        std::fs::write(&cfg, "lenght-days = 3\n").unwrap();
        let mut args = select_args(tmp.path());
        args.data.config = Some(cfg);
        assert_eq!(select(&args).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn task_round_trips_through_json() {
        let tmp = tempfile::NamedTempFile::new().unwrap();
        let (task, _) = select(&select_args(tmp.path())).unwrap();
        let text = serde_json::to_string(&task).unwrap();
        assert!(text.starts_with("{\"command\":\"select\""));
        assert_eq!(serde_json::from_str::<Task>(&text).unwrap(), task);
    }
}
