use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polluter::config::RunConfig;
use polluter::core::detector::PopulationStats;
use polluter::core::eval::{
    account_status_report, accuracy, dataset_stats, summarize_external_scores, LabelledAccount,
};
use polluter::core::graph::GraphMode;
use polluter::core::stats::{binomial_significance, one_sample_t_test};
use polluter::ingest::parse_date;
use polluter::synth::{generate, SynthConfig};
use polluter::{formats, pipeline, Error, Result};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "polluter", version, about = "Find content-polluting bot accounts in geolocated tweet streams")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Tweet stream(s), JSON lines. Repeat or comma-separate for several.
    #[arg(long, global = true, value_name = "FILE", value_delimiter = ',')]
    input: Vec<PathBuf>,
    /// Event calendar CSV (`city,date`).
    #[arg(long, global = true, value_name = "FILE")]
    calendar: Option<PathBuf>,
    /// Time zone for day bucketing, e.g. `Australia/Melbourne`.
    #[arg(long, global = true)]
    tz: Option<String>,
    /// Number of most-mentioned URLs to classify.
    #[arg(long, global = true)]
    top_k: Option<usize>,
    #[arg(long, global = true)]
    gini_threshold: Option<f64>,
    #[arg(long, global = true)]
    r2_threshold: Option<f64>,
    /// URLs with fewer mentioning users are indeterminate.
    #[arg(long, global = true)]
    min_users: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Modularity resolution.
    #[arg(long, global = true)]
    resolution: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    min_cluster_size: Option<usize>,
    /// Smallest mean internal multiplicity reported as a dense component.
    #[arg(long, global = true)]
    min_cluster_multiplicity: Option<f64>,
    /// Dense components flag members only above this mean multiplicity.
    #[arg(long, global = true)]
    cluster_flag_multiplicity: Option<f64>,
    #[arg(long, global = true)]
    media_follower_quantile: Option<f64>,
    #[arg(long, global = true)]
    burst_min_count: Option<usize>,
    /// Keep tweets at or after this date or timestamp.
    #[arg(long, global = true)]
    since: Option<String>,
    /// Keep tweets before this date or timestamp.
    #[arg(long, global = true)]
    until: Option<String>,
}

impl Common {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        fn opt<T: ToString>(key: &'static str, v: &Option<T>) -> Option<(&'static str, String)> {
            v.as_ref().map(|v| (key, v.to_string()))
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut out: Vec<(&'static str, String)> = [
            opt("calendar", &path(&self.calendar)),
            opt("tz", &self.tz),
            opt("top_k", &self.top_k),
            opt("gini_threshold", &self.gini_threshold),
            opt("r2_threshold", &self.r2_threshold),
            opt("min_users", &self.min_users),
            opt("seed", &self.seed),
            opt("resolution", &self.resolution),
            opt("out", &path(&self.out)),
            opt("min_cluster_size", &self.min_cluster_size),
            opt("min_cluster_multiplicity", &self.min_cluster_multiplicity),
            opt("cluster_flag_multiplicity", &self.cluster_flag_multiplicity),
            opt("media_follower_quantile", &self.media_follower_quantile),
            opt("burst_min_count", &self.burst_min_count),
            opt("since", &self.since),
            opt("until", &self.until),
        ]
        .into_iter()
        .flatten()
        .collect();
        if !self.input.is_empty() {
            let joined: Vec<String> = self.input.iter().map(|p| p.display().to_string()).collect();
            out.push(("input", joined.join(",")));
        }
        out
    }

    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (key, value) in self.overrides() {
            cfg.set(key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify URLs, cluster the co-tweet graph and flag accounts.
    Detect {
        /// `user_id,label` file to score the flagged set against.
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
    },
    /// Build the co-tweet graphs and their communities.
    Graph,
    /// Diversity tables and Gini / rank-size verdicts for URLs.
    Gini {
        /// Restrict to these URLs instead of the top-k.
        #[arg(long = "url", value_name = "URL")]
        urls: Vec<String>,
    },
    /// Evaluate flagged accounts against labels, statuses and external scores.
    Eval(EvalArgs),
    /// Write a synthetic stream with planted bot rings.
    Synth(SynthArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Detection report (or any CSV with a leading `user_id` column).
    #[arg(long, value_name = "FILE")]
    flagged: Option<PathBuf>,
    /// `user_id,label_1,label_2,label_3,predicted`.
    #[arg(long, value_name = "FILE")]
    labelled: Option<PathBuf>,
    /// `user_id,code` account status snapshot.
    #[arg(long, value_name = "FILE")]
    status: Option<PathBuf>,
    /// `user_id,score` external bot scores.
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
    /// Background suspension rate for the binomial significance test.
    #[arg(long)]
    suspension_base_rate: Option<f64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    n_legit: Option<usize>,
    #[arg(long)]
    n_media: Option<usize>,
    #[arg(long)]
    n_bots: Option<usize>,
    #[arg(long)]
    n_bot_urls: Option<usize>,
    #[arg(long)]
    legit_url_pool: Option<usize>,
    /// First day of the stream, `YYYY-MM-DD`.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    event_days: Option<usize>,
    #[arg(long)]
    legit_tweet_rate: Option<f64>,
    #[arg(long)]
    zipf_exponent: Option<f64>,
    #[arg(long)]
    bot_tweet_share: Option<f64>,
    #[arg(long)]
    bot_cotweet_rate: Option<f64>,
    #[arg(long)]
    ring_days: Option<usize>,
    #[arg(long)]
    bot_diversity_noise: Option<f64>,
    #[arg(long)]
    burst_fraction: Option<f64>,
    #[arg(long)]
    burst_date: Option<String>,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> Result<SynthConfig> {
        let date = |raw: &Option<String>, default| match raw {
            Some(s) => parse_date(s).map_err(Error::Config),
            None => Ok(default),
        };
        let d = SynthConfig::default();
        Ok(SynthConfig {
            seed,
            n_legit_users: self.n_legit.unwrap_or(d.n_legit_users),
            n_media: self.n_media.unwrap_or(d.n_media),
            n_bots: self.n_bots.unwrap_or(d.n_bots),
            n_bot_urls: self.n_bot_urls.unwrap_or(d.n_bot_urls),
            legit_url_pool: self.legit_url_pool.unwrap_or(d.legit_url_pool),
            start: date(&self.start, d.start)?,
            days: self.days.unwrap_or(d.days),
            event_days_per_city: self.event_days.unwrap_or(d.event_days_per_city),
            legit_tweet_rate: self.legit_tweet_rate.unwrap_or(d.legit_tweet_rate),
            zipf_exponent: self.zipf_exponent.unwrap_or(d.zipf_exponent),
            bot_tweet_share: self.bot_tweet_share.unwrap_or(d.bot_tweet_share),
            bot_cotweet_rate: self.bot_cotweet_rate.unwrap_or(d.bot_cotweet_rate),
            ring_days: self.ring_days.unwrap_or(d.ring_days),
            bot_diversity_noise: self.bot_diversity_noise.unwrap_or(d.bot_diversity_noise),
            burst_fraction: self.burst_fraction.unwrap_or(d.burst_fraction),
            burst_date: date(&self.burst_date, d.burst_date)?,
            ..d
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.common.resolve()?;
    match &cli.command {
        Command::Detect { truth } => detect(&cfg, truth.as_deref()),
        Command::Graph => graph(&cfg),
        Command::Gini { urls } => gini(&cfg, urls),
        Command::Eval(args) => eval(&cfg, args),
        Command::Synth(args) => synth(&cfg, args),
    }
}

fn report_parse_errors(loaded: &pipeline::Loaded) {
    if !loaded.errors.is_empty() {
        eprintln!("warning: skipped {} malformed or duplicate input lines (see parse_errors.txt)", loaded.errors.len());
    }
}

fn detect(cfg: &RunConfig, truth: Option<&Path>) -> Result<()> {
    let truth = truth.map(pipeline::read_truth).transpose()?;
    let loaded = pipeline::load(cfg)?;
    report_parse_errors(&loaded);
    let dir = pipeline::prepare_out_dir(cfg, Some(&loaded))?;
    let run = pipeline::detect(&loaded.records, cfg)?;
    pipeline::write_detection_outputs(&dir, &run)?;

    let [bot, legit, indeterminate] = pipeline::label_counts(&run.urls.verdicts);
    let s = &run.report.corpus_summary;
    println!("tweets: {} ({} input lines skipped)", s.total_tweets, loaded.errors.len());
    println!(
        "urls classified: {} ({bot} bot_url, {legit} legitimate, {indeterminate} indeterminate)",
        run.urls.verdicts.len()
    );
    println!("dense components: {}", run.graph.clusters.len());
    println!("flagged accounts: {}", run.report.flagged.len());
    println!(
        "flagged tweet fraction: {:.4} ({} of {})",
        s.flagged_tweet_fraction, s.flagged_tweet_count, s.total_tweets
    );
    let age = |p: &PopulationStats| {
        if p.accounts == 0 {
            "n/a".to_string()
        } else {
            format!("{:.2} y", p.mean_age_years)
        }
    };
    println!(
        "mean account age: flagged {}, legitimate {}",
        age(&run.comparison.flagged),
        age(&run.comparison.legitimate)
    );
    if let Some(t) = &run.age_test {
        println!("welch t = {:.3}, df = {:.1}, p = {:.3e}", t.t, t.df, t.p_value);
    }
    if let Some(truth) = truth {
        let scores = pipeline::score_against_truth(&run.report.flagged_ids(), &truth);
        pipeline::write_truth_scores(&dir, &scores)?;
        println!("precision: {:.4}, recall: {:.4}", scores.precision, scores.recall);
    }
    Ok(())
}

fn graph(cfg: &RunConfig) -> Result<()> {
    let loaded = pipeline::load(cfg)?;
    report_parse_errors(&loaded);
    let calendar = pipeline::load_calendar(cfg)?;
    let dir = pipeline::prepare_out_dir(cfg, Some(&loaded))?;
    let mut modes = vec![GraphMode::AllDays];
    if calendar.is_some() {
        modes.insert(0, GraphMode::EventDays);
    } else {
        eprintln!("warning: no calendar given, writing the all-days graph only");
    }
    for mode in modes {
        let run = pipeline::cotweet_graph(&loaded.records, cfg, mode, calendar.as_ref())?;
        pipeline::write_graph_outputs(&dir, &run)?;
        println!(
            "{}: {} nodes, {} edges (total multiplicity {}), {} communities, modularity {:.4}, {} dense components",
            pipeline::mode_name(mode),
            run.graph.node_count(),
            run.graph.edge_count(),
            run.graph.total_multiplicity(),
            run.partition.community_count(),
            run.partition.modularity,
            run.clusters.len()
        );
    }
    Ok(())
}

fn gini(cfg: &RunConfig, urls: &[String]) -> Result<()> {
    let loaded = pipeline::load(cfg)?;
    report_parse_errors(&loaded);
    let dir = pipeline::prepare_out_dir(cfg, Some(&loaded))?;
    let analysis = pipeline::analyze_urls(&loaded.records, cfg, urls)?;
    pipeline::write_url_outputs(&dir, &analysis)?;
    formats::write_verdicts(std::io::stdout().lock(), &analysis.verdicts)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn eval(cfg: &RunConfig, args: &EvalArgs) -> Result<()> {
    if cfg.inputs.is_empty() && args.labelled.is_none() && args.status.is_none() && args.scores.is_none() {
        return Err(Error::Config("eval needs --input, --labelled, --status or --scores".into()));
    }
    if (args.status.is_some() || args.scores.is_some()) && args.flagged.is_none() {
        return Err(Error::Config("--status and --scores need --flagged".into()));
    }
    if let Some(rate) = args.suspension_base_rate {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Config("suspension_base_rate must lie in [0, 1]".into()));
        }
    }
    let dir = pipeline::prepare_out_dir(cfg, None)?;

    if !cfg.inputs.is_empty() {
        let loaded = pipeline::load(cfg)?;
        report_parse_errors(&loaded);
        let stats = dataset_stats(&loaded.records);
        pipeline::write_file(&dir.join("corpus_stats.csv"), |w| formats::write_corpus_stats(w, &stats))?;
        for (city, s) in &stats.per_city {
            println!("{city}: {} tweets, {} users, {} urls", s.tweet_count, s.unique_user_count, s.unique_url_count);
        }
    }

    let flagged_ids = match &args.flagged {
        Some(path) => formats::read_user_ids(open(path)?, path)?,
        None => Vec::new(),
    };
    let flagged: std::collections::BTreeSet<&str> = flagged_ids.iter().map(String::as_str).collect();

    let mut labelled: Vec<LabelledAccount> = Vec::new();
    if let Some(path) = &args.labelled {
        let file = formats::read_labelled(open(path)?, path)?;
        labelled = file.accounts;
        let acc = accuracy(&labelled)?;
        let correct = labelled.iter().filter(|l| l.correct()).count() as u64;
        let p = binomial_significance(correct, labelled.len() as u64, 0.5)?;
        println!(
            "labelled accounts: {} ({} without majority), accuracy {:.4}, p = {:.3e} against chance",
            labelled.len(),
            file.no_majority.len(),
            acc,
            p
        );
        let agreement: Vec<f64> = labelled.iter().map(|l| if l.correct() { 1.0 } else { 0.0 }).collect();
        match one_sample_t_test(&agreement, 0.5) {
            Ok(t) => println!("one-sample t = {:.3}, df = {}, p = {:.3e}", t.t, t.df, t.p_value),
            Err(e) => eprintln!("warning: one-sample t test skipped: {e}"),
        }
    }

    if let Some(path) = &args.status {
        let statuses = formats::read_status(open(path)?, path)?;
        let summary = account_status_report(&statuses, &flagged);
        pipeline::write_file(&dir.join("status_summary.csv"), |w| {
            formats::write_status_summary(w, &summary, flagged.len())
        })?;
        println!(
            "flagged accounts: {}, suspended {}, deleted {}, active {}, no status {}",
            flagged.len(),
            summary.suspended_count,
            summary.deleted_count,
            summary.active_count,
            summary.unknown_count
        );
        if let Some(rate) = args.suspension_base_rate {
            let known = (flagged.len() - summary.unknown_count) as u64;
            let p = binomial_significance(summary.suspended_count as u64, known, rate)?;
            println!("suspension binomial p = {p:.3e} against base rate {rate}");
        }
    }

    if let Some(path) = &args.scores {
        let file = formats::read_scores(open(path)?, path)?;
        for (line, reason) in &file.unreadable {
            eprintln!("warning: {}:{line}: {reason}", path.display());
        }
        let summary = summarize_external_scores(&file.scores, &flagged, &labelled);
        if !summary.rejected.is_empty() {
            eprintln!("warning: {} scores outside [0, 1] rejected", summary.rejected.len());
        }
        if summary.zero_coverage() {
            eprintln!("warning: no flagged account has a usable score");
        }
        pipeline::write_file(&dir.join("score_summary.csv"), |w| formats::write_score_summary(w, &summary))?;
        let show = |x: Option<f64>| x.map_or("n/a".to_owned(), |x| format!("{x:.3}"));
        println!(
            "scored flagged accounts: {}, mean {}, sd {}, above 0.5: {}",
            summary.flagged.count,
            show(summary.flagged.mean),
            show(summary.flagged.sd),
            show(summary.flagged.above_half_fraction)
        );
    }
    Ok(())
}

fn synth(cfg: &RunConfig, args: &SynthArgs) -> Result<()> {
    let synth_cfg = args.config(cfg.seed)?;
    let out = generate(&synth_cfg)?;
    out.write_to_dir(&cfg.out)?;
    let bots = out.truth.values().filter(|l| **l == polluter::core::eval::AccountLabel::Bot).count();
    println!(
        "wrote {} tweets from {} accounts ({bots} bots) to {}",
        out.records.len(),
        out.truth.len(),
        cfg.out.display()
    );
    Ok(())
}
