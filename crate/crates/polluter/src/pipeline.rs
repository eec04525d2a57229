//! The end-to-end runs behind each subcommand.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use polluter_core::dense::{dense_components, DenseComponent};
use polluter_core::detector::{
    creation_bursts, flag_accounts, population_stats, ComparisonStats, CreationBurst, DetectionReport,
};
use polluter_core::diversity::{classify_url, diversity_tables, top_k_urls, UrlDiversityTable, UrlLabel, UrlVerdict};
use polluter_core::eval::AccountLabel;
use polluter_core::graph::{build_bipartite, project, CoTweetMultigraph, GraphMode};
use polluter_core::louvain::{louvain, Partition};
use polluter_core::stats::{welch_t_test, TTest};
use polluter_core::{EventCalendar, Timestamp, TweetRecord};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{self, AGE_BIN_YEARS};
use crate::ingest::{self, active_day, ParseError, ParseErrorLog};

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub records: Vec<TweetRecord>,
    pub errors: ParseErrorLog,
}

/// Reads every configured input in order. A tweet id seen in an earlier file
/// is skipped and logged like an in-file duplicate. With several inputs the
/// logged reasons are prefixed by the file name.
pub fn load(cfg: &RunConfig) -> Result<Loaded> {
    if cfg.inputs.is_empty() {
        return Err(Error::Config("no input stream given".into()));
    }
    let window = cfg.window()?;
    let mut out = Loaded::default();
    let mut seen: HashSet<String> = HashSet::new();
    let several = cfg.inputs.len() > 1;
    for path in &cfg.inputs {
        let parsed = ingest::read_stream_file(path, &window)?;
        let prefix = |reason: String| if several { format!("{}: {reason}", path.display()) } else { reason };
        for e in parsed.errors.entries {
            out.errors.entries.push(ParseError { line: e.line, reason: prefix(e.reason) });
        }
        for r in parsed.records {
            if seen.insert(r.tweet_id.clone()) {
                out.records.push(r);
            } else {
                out.errors.entries.push(ParseError {
                    line: 0,
                    reason: prefix(format!("duplicate tweet_id {:?} from an earlier input, keeping first", r.tweet_id)),
                });
            }
        }
    }
    Ok(out)
}

pub fn load_calendar(cfg: &RunConfig) -> Result<Option<EventCalendar>> {
    cfg.calendar.as_deref().map(ingest::read_calendar_file).transpose()
}

#[derive(Debug, Clone)]
pub struct UrlAnalysis {
    pub verdicts: Vec<UrlVerdict>,
    pub tables: BTreeMap<String, UrlDiversityTable>,
}

/// Diversity tables and verdicts for `urls`, or for the top-k URLs when none
/// are given.
pub fn analyze_urls(records: &[TweetRecord], cfg: &RunConfig, urls: &[String]) -> Result<UrlAnalysis> {
    let urls = if urls.is_empty() {
        top_k_urls(records, cfg.top_k)
    } else {
        urls.iter().map(|u| polluter_core::url::canonicalize_url(u).map_err(Error::from)).collect::<Result<Vec<_>>>()?
    };
    let thresholds = cfg.thresholds();
    let tables = diversity_tables(records, &urls);
    let verdicts = tables.iter().map(|t| classify_url(t, &thresholds)).collect();
    Ok(UrlAnalysis { verdicts, tables: tables.into_iter().map(|t| (t.url.clone(), t)).collect() })
}

#[derive(Debug, Clone)]
pub struct GraphRun {
    pub mode: GraphMode,
    pub graph: CoTweetMultigraph,
    pub partition: Partition,
    pub clusters: Vec<DenseComponent>,
}

pub fn mode_name(mode: GraphMode) -> &'static str {
    match mode {
        GraphMode::EventDays => "event_days",
        GraphMode::AllDays => "all_days",
    }
}

pub fn cotweet_graph(
    records: &[TweetRecord],
    cfg: &RunConfig,
    mode: GraphMode,
    calendar: Option<&EventCalendar>,
) -> Result<GraphRun> {
    let tz = cfg.timezone()?;
    let bipartite = build_bipartite(records, mode, calendar, |r| active_day(r, tz))?;
    let graph = project(&bipartite);
    let partition = louvain(&graph, cfg.seed, cfg.resolution);
    let clusters = dense_components(&graph, &partition, cfg.min_cluster_size, cfg.min_cluster_multiplicity);
    Ok(GraphRun { mode, graph, partition, clusters })
}

#[derive(Debug, Clone)]
pub struct DetectionRun {
    pub urls: UrlAnalysis,
    pub graph: GraphRun,
    pub report: DetectionReport,
    pub bursts: Vec<CreationBurst>,
    pub comparison: ComparisonStats,
    /// Welch test of flagged against legitimate account ages, when both
    /// groups allow one.
    pub age_test: Option<TTest>,
    pub as_of: Timestamp,
}

/// URL diversity, all-days co-tweet clustering and signal aggregation.
pub fn detect(records: &[TweetRecord], cfg: &RunConfig) -> Result<DetectionRun> {
    let urls = analyze_urls(records, cfg, &[])?;
    let graph = cotweet_graph(records, cfg, GraphMode::AllDays, None)?;
    let as_of = records.iter().map(|r| r.created_at).max().unwrap_or(Timestamp(0));
    let detector = polluter_core::detector::DetectorConfig { as_of: Some(as_of), ..cfg.detector() };
    let report = flag_accounts(&urls.verdicts, &urls.tables, &graph.clusters, records, &detector);
    let bursts = creation_bursts(records, cfg.burst_min_count)?;
    let comparison = population_stats(&report.flagged_ids(), records, as_of)?;
    let age_test = welch_t_test(&comparison.flagged.ages_years, &comparison.legitimate.ages_years).ok();
    Ok(DetectionRun { urls, graph, report, bursts, comparison, age_test, as_of })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthScores {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall of the flagged set against known bot labels.
/// Accounts missing from `truth` count as legitimate.
pub fn score_against_truth(flagged: &BTreeSet<&str>, truth: &BTreeMap<String, AccountLabel>) -> TruthScores {
    let bots: BTreeSet<&str> =
        truth.iter().filter(|(_, l)| **l == AccountLabel::Bot).map(|(u, _)| u.as_str()).collect();
    let tp = flagged.intersection(&bots).count();
    let fp = flagged.len() - tp;
    let fn_ = bots.len() - tp;
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    TruthScores {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
    }
}

pub fn read_truth(path: &Path) -> Result<BTreeMap<String, AccountLabel>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    formats::read_ground_truth(file, path)
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn prepare_out_dir(cfg: &RunConfig, loaded: Option<&Loaded>) -> Result<PathBuf> {
    let dir = cfg.out.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let echo = cfg.echo();
    write_file(&dir.join("effective_config.txt"), |w| {
        w.write_all(echo.as_bytes()).map_err(|e| Error::io(&cfg.out, e))
    })?;
    if let Some(loaded) = loaded {
        let path = dir.join("parse_errors.txt");
        write_file(&path, |w| loaded.errors.write_to(w).map_err(|e| Error::io(&path, e)))?;
    }
    Ok(dir)
}

pub fn write_url_outputs(dir: &Path, urls: &UrlAnalysis) -> Result<()> {
    write_file(&dir.join("verdicts.csv"), |w| formats::write_verdicts(w, &urls.verdicts))?;
    let tables: Vec<&UrlDiversityTable> = urls.verdicts.iter().map(|v| &urls.tables[&v.url]).collect();
    write_file(&dir.join("diversity.csv"), |w| formats::write_diversity_dump(w, &tables))
}

pub fn write_graph_outputs(dir: &Path, run: &GraphRun) -> Result<()> {
    let name = mode_name(run.mode);
    let dot_path = dir.join(format!("graph_{name}.dot"));
    write_file(&dot_path, |w| {
        crate::dot::write_dot(w, &run.graph, &run.partition).map_err(|e| Error::io(&dot_path, e))
    })?;
    write_file(&dir.join(format!("edges_{name}.csv")), |w| formats::write_edge_list(w, &run.graph))?;
    write_file(&dir.join(format!("nodes_{name}.csv")), |w| formats::write_node_list(w, &run.graph, &run.partition))?;
    write_file(&dir.join(format!("clusters_{name}.csv")), |w| formats::write_dense_components(w, &run.clusters))
}

pub fn write_detection_outputs(dir: &Path, run: &DetectionRun) -> Result<()> {
    write_url_outputs(dir, &run.urls)?;
    write_file(&dir.join("clusters.csv"), |w| formats::write_dense_components(w, &run.graph.clusters))?;
    write_file(&dir.join("report.csv"), |w| formats::write_report(w, &run.report))?;
    write_file(&dir.join("summary.csv"), |w| formats::write_summary(w, &run.report))?;
    write_file(&dir.join("bursts.csv"), |w| formats::write_bursts(w, &run.bursts))?;
    write_file(&dir.join("populations.csv"), |w| formats::write_populations(w, &run.comparison))?;
    let c = &run.comparison;
    write_file(&dir.join("age_histogram.csv"), |w| {
        formats::write_histogram(
            w,
            &[
                ("flagged", c.flagged.age_histogram(AGE_BIN_YEARS)),
                ("legitimate", c.legitimate.age_histogram(AGE_BIN_YEARS)),
            ],
        )
    })?;
    write_file(&dir.join("name_length_histogram.csv"), |w| {
        formats::write_histogram(
            w,
            &[("flagged", c.flagged.screen_name_histogram()), ("legitimate", c.legitimate.screen_name_histogram())],
        )
    })?;
    write_file(&dir.join("display_name_length_histogram.csv"), |w| {
        formats::write_histogram(
            w,
            &[("flagged", c.flagged.display_name_histogram()), ("legitimate", c.legitimate.display_name_histogram())],
        )
    })
}

pub fn write_truth_scores(dir: &Path, scores: &TruthScores) -> Result<()> {
    write_file(&dir.join("truth_comparison.csv"), |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["true_positives", "false_positives", "false_negatives", "precision", "recall"])?;
        out.write_record([
            scores.true_positives.to_string(),
            scores.false_positives.to_string(),
            scores.false_negatives.to_string(),
            format!("{:.6}", scores.precision),
            format!("{:.6}", scores.recall),
        ])?;
        out.flush().map_err(|e| Error::io(dir, e))
    })
}

/// Counts of verdict labels, in `bot_url, legitimate, indeterminate` order.
pub fn label_counts(verdicts: &[UrlVerdict]) -> [usize; 3] {
    let count = |l: UrlLabel| verdicts.iter().filter(|v| v.label == l).count();
    [count(UrlLabel::BotUrl), count(UrlLabel::Legitimate), count(UrlLabel::Indeterminate)]
}
