//! `cotrack`: track OTB-format sequences, train the margin policy and
//! evaluate results.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cotrack::bench::{evaluate_sequence, measure_fps, write_reports, EvalReport};
use cotrack::engine::{from_jsonl, to_jsonl, track_sequence_timed, FrameRecord, MarginSelector};
use cotrack::io::write_atomic;
use cotrack::policy::{
    episode_log_csv, train_policy, ClipSource, EpisodeSource, GreedyPolicy, QTable, SyntheticSource, TrackingEnv,
};
use cotrack::sequence::{
    generate_synthetic, load_otb_sequence, write_otb_sequence, RandomScriptSpec, Sequence, SyntheticScript,
};
use cotrack::{Config, Error, LabelingMode, Result};

#[derive(Parser)]
#[command(name = "cotrack", version, about = "Active co-tracking with a learned uncertainty margin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track one or more OTB-format sequences.
    Track(TrackArgs),
    /// Train the margin policy and write its Q-table.
    TrainPolicy(TrainArgs),
    /// Score tracking results against ground truth.
    Eval(EvalArgs),
    /// Render synthetic sequences in OTB layout.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrackArgs {
    /// Sequence directory (img/ plus groundtruth_rect.txt); repeatable.
    #[arg(long, required = true)]
    seq: Vec<PathBuf>,
    #[arg(long)]
    mode: Option<LabelingMode>,
    /// Fixed uncertainty margin for active-fixed.
    #[arg(long)]
    delta: Option<f64>,
    /// Trained Q-table for active-qlearn.
    #[arg(long)]
    qtable: Option<PathBuf>,
    /// Also write frames with the estimate (red) and ground truth (green) drawn.
    #[arg(long)]
    overlay: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// Environment description (TOML); random synthetic sequences when omitted.
    #[arg(long)]
    env: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    episodes: u64,
    /// Continue training from this Q-table.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of `<sequence>/results.jsonl` produced by `track`.
    #[arg(long)]
    results: Option<PathBuf>,
    /// Further results directories plotted against each other.
    #[arg(long, num_args = 1..)]
    compare: Vec<PathBuf>,
    /// Directory holding the sequences, one subdirectory per name.
    #[arg(long)]
    seq_root: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Explicit script; otherwise random scripts are drawn.
    #[arg(long, conflicts_with_all = ["spec", "count"])]
    script: Option<PathBuf>,
    /// Distribution of random scripts (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Where training episodes come from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EnvConfig {
    /// Random synthetic sequences; the default source when no sequences are listed.
    synthetic: Option<RandomScriptSpec>,
    /// OTB sequence directories to cut clips from.
    sequences: Vec<PathBuf>,
    clip_len: Option<usize>,
    annotation_stride: Option<usize>,
}

const DEFAULT_CLIP_LEN: usize = 400;
const DEFAULT_STRIDE: usize = 25;

/// Alternates synthetic and clip episodes when both are configured.
enum Source {
    Synthetic(SyntheticSource),
    Clips(ClipSource),
    Both(SyntheticSource, ClipSource),
}

impl EpisodeSource for Source {
    fn episode(&mut self, index: u64) -> Result<Sequence> {
        match self {
            Source::Synthetic(s) => s.episode(index),
            Source::Clips(c) => c.episode(index),
            Source::Both(s, _) if index.is_multiple_of(2) => s.episode(index),
            Source::Both(_, c) => c.episode(index),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RunInfo {
    sequence: String,
    frames: usize,
    seconds: f64,
    fps: Option<f64>,
    mode: LabelingMode,
    seed: u64,
}

fn load_config(common: &CommonArgs) -> Result<Config> {
    let mut config = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = common.seed {
        config.tracker.seed = seed;
        config.policy.seed = seed;
    }
    Ok(config)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

fn cmd_track(args: TrackArgs) -> Result<()> {
    let mut config = load_config(&args.common)?;
    if let Some(mode) = args.mode {
        config.tracker.mode = mode;
    }
    if let Some(delta) = args.delta {
        config.tracker.fixed_margin = delta;
    }
    config.validate()?;
    let policy = match (config.tracker.mode, &args.qtable) {
        (LabelingMode::ActiveQlearn, None) => {
            return Err(Error::Config { field: "qtable".into(), reason: "active-qlearn needs --qtable".into() })
        }
        (LabelingMode::ActiveQlearn, Some(p)) => Some(GreedyPolicy::new(QTable::load(p)?, config.policy.n_bins)),
        _ => None,
    };
    let sequences = args.seq.iter().map(|p| load_otb_sequence(p)).collect::<Result<Vec<_>>>()?;
    for seq in &sequences {
        seq.initial_box()?;
    }
    write_text(&args.common.out.join("config.resolved.toml"), &config.to_toml_string())?;

    for seq in &sequences {
        let selector = policy.as_ref().map(|p| p as &dyn MarginSelector);
        let (results, elapsed) = track_sequence_timed(seq, &config.tracker, selector)?;
        let records: Vec<FrameRecord> = results.iter().map(FrameRecord::from).collect();
        let dir = args.common.out.join(&seq.name);
        write_text(&dir.join("results.jsonl"), &to_jsonl(&records))?;
        let seconds = elapsed.as_secs_f64();
        let info = RunInfo {
            sequence: seq.name.clone(),
            frames: records.len(),
            seconds,
            fps: measure_fps(records.len(), seconds),
            mode: config.tracker.mode,
            seed: config.tracker.seed,
        };
        write_text(&dir.join("run.json"), &serde_json::to_string_pretty(&info)?)?;
        if args.overlay {
            let overlay = dir.join("overlay");
            fs::create_dir_all(&overlay).map_err(|e| Error::Io { path: overlay.clone(), source: e })?;
            for r in &records {
                let mut frame = (*seq.frame(r.index)?).clone();
                if let Some(gt) = seq.ground_truth_at(r.index) {
                    frame.draw_box(&gt, [0, 220, 0], 1);
                }
                frame.draw_box(&r.estimate, [230, 20, 20], 2);
                frame.save_png(&overlay.join(format!("{:04}.png", r.index)))?;
            }
        }
        let queried = records.iter().map(|r| r.queried_fraction).sum::<f64>() / records.len() as f64;
        println!(
            "{}: {} frames, {:.1} fps, mean queried fraction {:.3}",
            seq.name,
            records.len(),
            info.fps.unwrap_or(f64::INFINITY),
            queried
        );
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let config = load_config(&args.common)?;
    config.validate()?;
    let env_config: EnvConfig = match &args.env {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            toml::from_str(&text).map_err(|e| Error::Config { field: p.display().to_string(), reason: e.to_string() })?
        }
        None => EnvConfig::default(),
    };
    let seed = config.policy.seed;
    let synthetic = || SyntheticSource { spec: env_config.synthetic.clone().unwrap_or_default(), seed };
    let source = if env_config.sequences.is_empty() {
        Source::Synthetic(synthetic())
    } else {
        let pool = env_config.sequences.iter().map(|p| load_otb_sequence(p)).collect::<Result<Vec<_>>>()?;
        let clips = ClipSource::new(
            pool,
            env_config.clip_len.unwrap_or(DEFAULT_CLIP_LEN),
            env_config.annotation_stride.unwrap_or(DEFAULT_STRIDE),
            seed,
        )?;
        match env_config.synthetic {
            Some(_) => Source::Both(synthetic(), clips),
            None => Source::Clips(clips),
        }
    };
    let mut table = match &args.resume {
        Some(p) => QTable::load(p)?,
        None => QTable::new(config.policy.n_actions, config.policy.gamma, seed)?,
    };

    let out = &args.common.out;
    write_text(&out.join("config.resolved.toml"), &config.to_toml_string())?;
    let env_text = toml::to_string(&env_config).map_err(|e| Error::Snapshot(e.to_string()))?;
    write_text(&out.join("env.resolved.toml"), &env_text)?;

    let mut env = TrackingEnv::new(source, config.tracker.clone(), config.policy.clone())?;
    let logs = train_policy(&mut env, &mut table, &config.policy, args.episodes, |log| {
        eprintln!(
            "episode {}: reward {:.3}, mean IOU {}, queried {:.3}",
            log.episode,
            log.total_reward,
            log.mean_iou.map_or("-".to_string(), |v| format!("{v:.3}")),
            log.queried_fraction
        );
    })?;
    table.save(&out.join("qtable.json"))?;
    write_text(&out.join("training.csv"), &episode_log_csv(&logs))?;
    println!("trained {} episodes ({} in total); {} states visited", logs.len(), table.episodes, table.rows().count());
    Ok(())
}

/// `<name>` → results file for every subdirectory holding `results.jsonl`.
fn list_results(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let mut found = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
        let path = entry.path().join("results.jsonl");
        if path.is_file() {
            found.insert(entry.file_name().to_string_lossy().into_owned(), entry.path());
        }
    }
    if found.is_empty() {
        return Err(Error::Data { path: dir.to_path_buf(), reason: "no <sequence>/results.jsonl found".into() });
    }
    Ok(found)
}

fn run_label(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let runs: Vec<PathBuf> = args.results.iter().cloned().chain(args.compare.iter().cloned()).collect();
    if runs.is_empty() {
        return Err(Error::Config { field: "results".into(), reason: "give --results or --compare".into() });
    }
    let listed = runs.iter().map(|r| list_results(r)).collect::<Result<Vec<_>>>()?;
    let mut unmatched: Vec<String> = listed
        .iter()
        .flat_map(|m| m.keys())
        .filter(|name| !args.seq_root.join(name).is_dir())
        .cloned()
        .collect();
    unmatched.sort();
    unmatched.dedup();
    if !unmatched.is_empty() {
        return Err(Error::Data {
            path: args.seq_root.clone(),
            reason: format!("no sequence for results: {}", unmatched.join(", ")),
        });
    }

    let mut sequences: BTreeMap<String, Sequence> = BTreeMap::new();
    let mut reports = Vec::new();
    for (run, found) in runs.iter().zip(&listed) {
        let mut evals = Vec::new();
        let (mut frames, mut seconds) = (0usize, 0.0f64);
        for (name, dir) in found {
            if !sequences.contains_key(name) {
                sequences.insert(name.clone(), load_otb_sequence(&args.seq_root.join(name))?);
            }
            let seq = &sequences[name];
            let path = dir.join("results.jsonl");
            let text = fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            let records = from_jsonl(&text).map_err(|e| Error::Data { path: path.clone(), reason: e.to_string() })?;
            let info: Option<RunInfo> =
                fs::read_to_string(dir.join("run.json")).ok().and_then(|t| serde_json::from_str(&t).ok());
            let fps = info.as_ref().and_then(|i| i.fps);
            if let Some(i) = &info {
                frames += i.frames;
                seconds += i.seconds;
            }
            evals.push(evaluate_sequence(name, &records, &seq.ground_truth, seq.attributes.clone(), fps)?);
        }
        reports.push(EvalReport::new(run_label(run), evals, measure_fps(frames, seconds))?);
    }
    write_reports(&args.out, &reports)?;
    let resolved = format!(
        "seq_root = {:?}\nruns = [{}]\n",
        args.seq_root.display().to_string(),
        runs.iter().map(|r| format!("{:?}", r.display().to_string())).collect::<Vec<_>>().join(", ")
    );
    write_text(&args.out.join("config.resolved.toml"), &resolved)?;
    for r in &reports {
        println!(
            "{}: {} sequences, AUC {:.3}, precision@20px {:.3}, mean IOU {:.3}, queried {:.3}",
            r.label,
            r.sequences.len(),
            r.auc,
            r.precision,
            r.mean_iou,
            r.mean_queried_fraction
        );
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let read = |p: &PathBuf| fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e });
    let scripts: Vec<SyntheticScript> = match &args.script {
        Some(p) => vec![SyntheticScript::from_toml_str(&read(p)?)?],
        None => {
            let spec: RandomScriptSpec = match &args.spec {
                Some(p) => toml::from_str(&read(p)?)
                    .map_err(|e| Error::Config { field: p.display().to_string(), reason: e.to_string() })?,
                None => RandomScriptSpec::default(),
            };
            (0..args.count).map(|i| SyntheticScript::random(args.seed + i, &spec)).collect()
        }
    };
    for script in &scripts {
        let seq = generate_synthetic(script)?;
        let dir = args.out.join(&seq.name);
        write_otb_sequence(&seq, &dir)?;
        write_text(&dir.join("script.toml"), &script.to_toml_string())?;
        println!("{}", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Track(a) => cmd_track(a),
        Command::TrainPolicy(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
