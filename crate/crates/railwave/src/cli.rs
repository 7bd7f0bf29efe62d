//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime
//! error; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use railwave_core::ce::{ls_report, score, CeScenario, Split};
use railwave_core::sweep::{check_reported_deltas, target_grid, DeltaCheck, MatrixCell};
use railwave_core::Architecture;

use crate::config::Settings;
use crate::dataset::{self, Manifest};
use crate::error::Error;
use crate::parallel;
use crate::table::{sig6, Table};

#[derive(Debug, Parser)]
#[command(name = "railwave", version, about = "Rail corridor LCX/PASS coverage sweeps and CE benchmark")]
pub struct Cli {
    /// TOML file overriding the built-in defaults; flags override the file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SNR and spectral efficiency along the corridor for one architecture.
    Sweep(SweepArgs),
    /// Average spectral efficiency for every architecture, length and PA count.
    Fig2(Fig2Args),
    /// Minimum transmit power against the SNR target.
    Fig3(Fig3Args),
    /// Generate channel-estimation dataset splits.
    GenDataset(GenArgs),
    /// Score an RWPR prediction file against a dataset split.
    Score(ScoreArgs),
    /// LS baseline NMSE per SNR bucket.
    LsEval(LsArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// lcx-single, lcx-double, lcx-segmented[-S], pass-fix, pass-active, pass-movable
    #[arg(long)]
    pub arch: String,
    #[arg(long)]
    pub length: Option<f64>,
    /// PA count for pass-fix and pass-active.
    #[arg(long)]
    pub n: Option<usize>,
    /// PA pitch for pass-active, metres.
    #[arg(long)]
    pub pitch: Option<f64>,
    #[arg(long)]
    pub power_dbm: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    /// Comma-separated corridor lengths, metres.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
    /// Comma-separated PA counts.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    #[arg(long)]
    pub pitch: Option<f64>,
    #[arg(long)]
    pub power_dbm: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Where to write the comparison against the reported gaps (stderr if absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig3Args {
    #[arg(long)]
    pub length: Option<f64>,
    /// PA count of the PASS curves.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_max: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// train, val, test or all.
    #[arg(long, default_value = "all")]
    pub split: String,
    /// Samples per generated split (default 70k/30k/10k).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pilots per sample.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub speed_kmh: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Dataset directory, or a split file inside one.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: String,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Use only the T most recent pilots of each sample.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value = "test")]
    pub split: String,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    /// Out-of-range model parameters come from flags or the config file and
    /// count as usage errors; everything else happened while running.
    fn from(e: Error) -> Self {
        match e {
            Error::Model(railwave_core::Error::InvalidConfig(msg)) => Failure::Usage(msg),
            other => Failure::Runtime(other),
        }
    }
}

impl From<railwave_core::Error> for Failure {
    fn from(e: railwave_core::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: Cli) -> Outcome {
    let mut settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Sweep(a) => sweep(&mut settings, a),
        Command::Fig2(a) => fig2(&mut settings, a),
        Command::Fig3(a) => fig3(&mut settings, a),
        Command::GenDataset(a) => gen_dataset(&mut settings, a),
        Command::Score(a) => score_cmd(a),
        Command::LsEval(a) => ls_eval(a),
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn header(table: &mut Table, command: &str, settings: &Settings) {
    table.comment(format!("railwave {} {command}", env!("CARGO_PKG_VERSION")));
    table.comment(format!("config {}", settings.to_json()));
}

fn parse_split(name: &str) -> std::result::Result<Split, Failure> {
    Split::from_name(name).ok_or_else(|| usage(format!("unknown split `{name}` (train, val, test)")))
}

fn sweep(settings: &mut Settings, a: SweepArgs) -> Outcome {
    set(&mut settings.corridor.length_m, a.length);
    set(&mut settings.corridor.samples, a.samples);
    set(&mut settings.radio.power_dbm, a.power_dbm);
    set(&mut settings.pass.pitch_m, a.pitch);
    let (name, n_inline) = match a.arch.split_once(':') {
        Some((name, n)) => {
            (name, Some(n.parse::<usize>().map_err(|_| usage(format!("bad PA count in `{}`", a.arch)))?))
        }
        None => (a.arch.as_str(), None),
    };
    if n_inline.is_some() && a.n.is_some() {
        return Err(usage("give the PA count either as --n or as `arch:N`, not both"));
    }
    let n = a.n.or(n_inline);
    let arch = Architecture::from_parts(name, n.unwrap_or(1), settings.pass.pitch_m)
        .map_err(|e| usage(e.to_string()))?;
    if arch.pa_count().is_none() && n.is_some() {
        return Err(usage(format!("--n does not apply to {}", arch.family())));
    }
    if a.pitch.is_some() && !matches!(arch, Architecture::PassActive { .. }) {
        return Err(usage("--pitch only applies to pass-active"));
    }
    let spec = settings.scenario(arch)?;
    let result = parallel::sweep(&spec)?;

    let mut t = Table::new(["x_m", "snr_db", "se_bpshz"]);
    header(&mut t, "sweep", settings);
    t.comment(format!("architecture {arch}"));
    t.comment(format!("average_se_bpshz {}", sig6(result.average_se)));
    for p in &result.points {
        t.push(vec![sig6(p.x), sig6(p.snr_db), sig6(p.se)]);
    }
    t.write(&a.out)?;
    Ok(())
}

/// Reported-gap comparison; each row breaks the delta into its two terms.
pub fn delta_table(cells: &[MatrixCell]) -> Table {
    let mut t = Table::new([
        "minuend",
        "subtrahend",
        "L_m",
        "N",
        "minuend_se_bpshz",
        "subtrahend_se_bpshz",
        "delta_bpshz",
        "reported_bpshz",
        "deviation_bpshz",
        "tolerance_bpshz",
        "status",
    ]);
    for (r, check) in railwave_core::sweep::REPORTED_SE_DELTAS.iter().zip(check_reported_deltas(cells)) {
        let row = match check {
            Some(c @ DeltaCheck { .. }) => vec![
                r.minuend.into(),
                r.subtrahend.into(),
                sig6(r.length),
                r.n.to_string(),
                sig6(c.minuend_se),
                sig6(c.subtrahend_se),
                sig6(c.delta),
                sig6(r.value),
                sig6(c.delta - r.value),
                sig6(c.tolerance),
                if c.within() { "within".into() } else { "outside".into() },
            ],
            None => {
                let mut row = vec![r.minuend.into(), r.subtrahend.into(), sig6(r.length), r.n.to_string()];
                row.extend(["", "", "", ""].map(String::from));
                row.extend([sig6(r.value), String::new(), "not-evaluated".into()]);
                row
            }
        };
        t.push(row);
    }
    t
}

fn fig2(settings: &mut Settings, a: Fig2Args) -> Outcome {
    set(&mut settings.fig2.lengths_m, a.lengths);
    set(&mut settings.fig2.pa_counts, a.counts);
    set(&mut settings.pass.pitch_m, a.pitch);
    set(&mut settings.radio.power_dbm, a.power_dbm);
    set(&mut settings.corridor.samples, a.samples);
    if settings.fig2.lengths_m.is_empty() || settings.fig2.pa_counts.is_empty() {
        return Err(usage("fig2 needs at least one length and one PA count"));
    }
    let template = settings.scenario(Architecture::PassMovable)?;
    let cells = parallel::compare_matrix(
        &settings.fig2.lengths_m,
        &settings.fig2.pa_counts,
        &template,
        settings.pass.pitch_m,
    )?;

    let mut t = Table::new(["architecture", "L_m", "N", "avg_se_bpshz"]);
    header(&mut t, "fig2", settings);
    for c in &cells {
        t.push(vec![c.architecture.family(), sig6(c.length), c.n.to_string(), sig6(c.average_se)]);
    }
    t.write(&a.out)?;

    let mut report = delta_table(&cells);
    header(&mut report, "fig2 deltas", settings);
    match a.report {
        Some(path) => report.write(&path)?,
        None => eprint!("{}", String::from_utf8_lossy(&report.to_bytes())),
    }
    Ok(())
}

fn fig3(settings: &mut Settings, a: Fig3Args) -> Outcome {
    set(&mut settings.fig3.length_m, a.length);
    set(&mut settings.fig3.pa_count, a.n);
    set(&mut settings.fig3.snr_min_db, a.snr_min);
    set(&mut settings.fig3.snr_max_db, a.snr_max);
    set(&mut settings.fig3.snr_step_db, a.snr_step);
    set(&mut settings.corridor.samples, a.samples);
    let p = &settings.fig3;
    let targets =
        target_grid(p.snr_min_db, p.snr_max_db, p.snr_step_db).map_err(|e| usage(e.to_string()))?;
    let mut template = settings.scenario(Architecture::LcxSingle)?;
    template.geometry = settings.geometry(p.length_m)?;
    let n = p.pa_count;
    let specs = [
        Architecture::LcxSingle,
        Architecture::LcxDouble,
        Architecture::LcxSegmented(4),
        Architecture::PassFix(n),
        Architecture::PassActive { n, pitch: settings.pass.pitch_m },
    ]
    .map(|arch| template.with_architecture(arch));
    let rows = parallel::power_curve(&specs, &targets)?;

    let mut t = Table::new(["architecture", "target_snr_db", "p_min_dbm"]);
    header(&mut t, "fig3", settings);
    for r in &rows {
        let name = match r.architecture.pa_count() {
            Some(n) => format!("{}-{n}", r.architecture.family()),
            None => r.architecture.family(),
        };
        t.push(vec![name, sig6(r.requirement.target_snr_db), sig6(r.requirement.dbm)]);
    }
    t.write(&a.out)?;
    Ok(())
}

fn gen_dataset(settings: &mut Settings, a: GenArgs) -> Outcome {
    set(&mut settings.seed, a.seed);
    set(&mut settings.ce.history, a.t);
    set(&mut settings.ce.speed_kmh, a.speed_kmh);
    let splits: Vec<Split> = if a.split == "all" {
        Split::ALL.to_vec()
    } else {
        vec![parse_split(&a.split)?]
    };
    if a.count == Some(0) {
        return Err(usage("--count must be positive"));
    }
    let params = settings.ce_params();
    let scenario = CeScenario::new(params)?;
    fs::create_dir_all(&a.out_dir).map_err(crate::error::io_at(&a.out_dir))?;

    let fresh = Manifest::new(settings.seed, params, scenario.normalization_constant(), settings.clone());
    let mut manifest = match Manifest::read(&a.out_dir) {
        Ok(old) if old.compatible(&fresh) => Manifest { splits: old.splits, ..fresh },
        Ok(_) => {
            return Err(Error::Config(format!(
                "{} already holds a dataset for another scenario or seed",
                a.out_dir.display()
            ))
            .into())
        }
        Err(_) if !a.out_dir.join(dataset::MANIFEST_FILE).exists() => fresh,
        Err(e) => return Err(e.into()),
    };
    for split in splits {
        let count = a.count.unwrap_or_else(|| split.default_count());
        let samples = parallel::generate_split(settings.seed, split, count, &scenario);
        dataset::write_split(&a.out_dir, &mut manifest, split, &samples)?;
        eprintln!("{}: {count} samples, T = {}", split.name(), params.history);
    }
    manifest.write(&a.out_dir)?;
    Ok(())
}

fn open_split(path: &Path, split_flag: &str) -> std::result::Result<(Manifest, Split, Vec<railwave_core::ce::CeSample>), Failure> {
    let (dir, from_file) = dataset::resolve(path)?;
    let split = match from_file {
        Some(s) => s,
        None => parse_split(split_flag)?,
    };
    let manifest = Manifest::read(&dir)?;
    let samples = manifest.load_split(&dir, split)?;
    Ok((manifest, split, samples))
}

fn score_cmd(a: ScoreArgs) -> Outcome {
    let (manifest, split, samples) = open_split(&a.dataset, &a.split)?;
    let preds = dataset::read_predictions(&a.pred, samples.len(), manifest.pa_count())?;
    let rows = score(&samples, &preds, manifest.pa_count()).map_err(Error::from)?;

    let mut t = Table::new(["t", "snr_bucket_db", "nmse_db", "baseline_ls_nmse_db"]);
    header(&mut t, "score", &manifest.config);
    t.comment(format!("dataset {} split {} seed {} scenario {}", a.dataset.display(), split.name(), manifest.master_seed, manifest.scenario_hash));
    for r in &rows {
        t.push(vec![r.t.to_string(), r.snr_bucket_db.to_string(), sig6(r.nmse_db), sig6(r.baseline_ls_nmse_db)]);
    }
    t.write(&a.out)?;
    Ok(())
}

fn ls_eval(a: LsArgs) -> Outcome {
    if a.t == Some(0) {
        return Err(usage("--t must be positive"));
    }
    let (manifest, split, samples) = open_split(&a.dataset, &a.split)?;
    let rows = ls_report(&samples, manifest.pa_count(), a.t).map_err(Error::from)?;

    let mut t = Table::new(["t", "snr_bucket_db", "nmse_db", "count"]);
    header(&mut t, "ls-eval", &manifest.config);
    t.comment(format!("dataset {} split {} seed {} scenario {}", a.dataset.display(), split.name(), manifest.master_seed, manifest.scenario_hash));
    for r in &rows {
        t.push(vec![r.t.to_string(), r.snr_bucket_db.to_string(), sig6(r.nmse_db), r.count.to_string()]);
    }
    t.write(&a.out)?;
    Ok(())
}
