//! CSV inputs and outputs.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use polluter_core::dense::DenseComponent;
use polluter_core::detector::{ComparisonStats, CreationBurst, DetectionReport, HistogramBin, PopulationStats};
use polluter_core::diversity::{UrlDiversityTable, UrlVerdict};
use polluter_core::eval::{
    AccountLabel, AccountStatus, CorpusStats, ExternalScoreSummary, LabelledAccount, ScoreGroup, StatusSummary,
};
use polluter_core::graph::CoTweetMultigraph;
use polluter_core::louvain::Partition;

use crate::error::{Error, Result};

/// Width of the account-age histogram bins, in years.
pub const AGE_BIN_YEARS: f64 = 0.5;

pub(crate) fn expect_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str], path: &Path) -> Result<()> {
    let header = reader.headers()?;
    let got: Vec<String> = header.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    if got.len() < expected.len() || got.iter().zip(expected).any(|(g, e)| g != e) {
        return Err(Error::format(
            path,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(source)
}

fn line_of(row: &csv::StringRecord) -> u64 {
    row.position().map_or(0, |p| p.line())
}

fn finish<W: Write>(mut writer: csv::Writer<W>) -> Result<()> {
    writer.flush().map_err(|e| Error::io("<output>", e))
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

pub fn write_verdicts<W: Write>(w: W, verdicts: &[UrlVerdict]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["url", "n", "gini", "r_squared", "label"])?;
    for v in verdicts {
        out.write_record([v.url.as_str(), &v.n.to_string(), &fmt_f(v.gini), &fmt_f(v.r_squared), v.label.as_str()])?;
    }
    finish(out)
}

/// Per-URL diversity tables, one row per (URL, user).
pub fn write_diversity_dump<W: Write>(w: W, tables: &[&UrlDiversityTable]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["url", "user_id", "u_all", "u_k", "u_d"])?;
    for table in tables {
        for (user, t) in &table.users {
            out.write_record([table.url.as_str(), user, &t.u_all.to_string(), &t.u_k.to_string(), &t.u_d.to_string()])?;
        }
    }
    finish(out)
}

pub fn write_edge_list<W: Write>(w: W, graph: &CoTweetMultigraph) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["user_a", "user_b", "multiplicity"])?;
    let nodes = graph.nodes();
    for e in graph.edges() {
        out.write_record([&nodes[e.a as usize].user_id, &nodes[e.b as usize].user_id, &e.multiplicity.to_string()])?;
    }
    finish(out)
}

pub fn write_node_list<W: Write>(w: W, graph: &CoTweetMultigraph, partition: &Partition) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["user_id", "tweet_count", "community"])?;
    for (i, node) in graph.nodes().iter().enumerate() {
        out.write_record([&node.user_id, &node.tweet_count.to_string(), &partition.community(i).to_string()])?;
    }
    finish(out)
}

pub fn write_dense_components<W: Write>(w: W, components: &[DenseComponent]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["community", "size", "internal_multiplicity", "mean_internal_multiplicity", "members"])?;
    for c in components {
        out.write_record([
            &c.community.to_string(),
            &c.size().to_string(),
            &c.internal_multiplicity.to_string(),
            &fmt_f(c.mean_internal_multiplicity),
            &c.members.join(";"),
        ])?;
    }
    finish(out)
}

/// Signals are `;`-separated; evidence entries are `signal: detail` joined by
/// ` | `.
pub fn write_report<W: Write>(w: W, report: &DetectionReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["user_id", "signals", "evidence", "account_age_years", "name_length", "verified"])?;
    for a in &report.flagged {
        let signals: Vec<&str> = a.signals.iter().map(|s| s.as_str()).collect();
        let evidence: Vec<String> = a.evidence.iter().map(|e| format!("{}: {}", e.signal.as_str(), e.detail)).collect();
        out.write_record([
            a.user_id.as_str(),
            &signals.join(";"),
            &evidence.join(" | "),
            &format!("{:.3}", a.account_age_years),
            &a.name_length.to_string(),
            if a.verified { "true" } else { "false" },
        ])?;
    }
    finish(out)
}

pub fn write_summary<W: Write>(w: W, report: &DetectionReport) -> Result<()> {
    let s = &report.corpus_summary;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["total_tweets", "flagged_tweet_count", "flagged_tweet_fraction", "flagged_accounts"])?;
    out.write_record([
        s.total_tweets.to_string(),
        s.flagged_tweet_count.to_string(),
        fmt_f(s.flagged_tweet_fraction),
        report.flagged.len().to_string(),
    ])?;
    finish(out)
}

pub fn write_histogram<W: Write>(w: W, groups: &[(&str, Vec<HistogramBin>)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["population", "bin_start", "bin_end", "count"])?;
    for (population, bins) in groups {
        for b in bins {
            out.write_record([*population, &format!("{}", b.start), &format!("{}", b.end), &b.count.to_string()])?;
        }
    }
    finish(out)
}

pub fn write_populations<W: Write>(w: W, stats: &ComparisonStats) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "population",
        "accounts",
        "mean_age_years",
        "mean_screen_name_length",
        "mean_display_name_length",
        "verified_count",
    ])?;
    let rows: [(&str, &PopulationStats); 2] = [("flagged", &stats.flagged), ("legitimate", &stats.legitimate)];
    for (name, p) in rows {
        out.write_record([
            name,
            &p.accounts.to_string(),
            &fmt_f(p.mean_age_years),
            &fmt_f(p.mean_screen_name_length),
            &fmt_f(p.mean_display_name_length),
            &p.verified_count.to_string(),
        ])?;
    }
    finish(out)
}

pub fn write_bursts<W: Write>(w: W, bursts: &[CreationBurst]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["creation_date", "account_count", "unique_name_count"])?;
    for b in bursts {
        out.write_record([b.creation_date.to_string(), b.account_count.to_string(), b.unique_name_count.to_string()])?;
    }
    finish(out)
}

pub fn write_corpus_stats<W: Write>(w: W, stats: &CorpusStats) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["city", "tweets", "unique_users", "unique_urls", "mean_followers", "mean_friends", "verified"])?;
    for (city, s) in &stats.per_city {
        out.write_record([
            city.as_str(),
            &s.tweet_count.to_string(),
            &s.unique_user_count.to_string(),
            &s.unique_url_count.to_string(),
            &format!("{:.2}", s.mean_followers),
            &format!("{:.2}", s.mean_friends),
            &s.verified_count.to_string(),
        ])?;
    }
    finish(out)
}

pub fn write_status_summary<W: Write>(w: W, s: &StatusSummary, flagged: usize) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["flagged", "suspended", "deleted", "active", "unknown"])?;
    out.write_record(
        [flagged, s.suspended_count, s.deleted_count, s.active_count, s.unknown_count].map(|n| n.to_string()),
    )?;
    finish(out)
}

pub fn write_score_summary<W: Write>(w: W, s: &ExternalScoreSummary) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["group", "count", "mean", "sd", "above_half_fraction"])?;
    let groups: [(&str, &ScoreGroup); 3] =
        [("flagged", &s.flagged), ("true_positive", &s.true_positives), ("false_positive", &s.false_positives)];
    for (name, g) in groups {
        out.write_record([
            name,
            &g.count.to_string(),
            &fmt_opt(g.mean),
            &fmt_opt(g.sd),
            &fmt_opt(g.above_half_fraction),
        ])?;
    }
    finish(out)
}

/// User ids from a detection report, or from any CSV whose first column is
/// `user_id`.
pub fn read_user_ids<R: Read>(source: R, path: &Path) -> Result<Vec<String>> {
    let mut r = reader(source);
    expect_header(&mut r, &["user_id"], path)?;
    let mut ids = Vec::new();
    for row in r.records() {
        let row = row?;
        match row.get(0) {
            Some(id) if !id.is_empty() => ids.push(id.to_owned()),
            _ => return Err(Error::format(path, line_of(&row), "empty user_id")),
        }
    }
    Ok(ids)
}

/// `user_id,code` rows; an empty code means the account is active.
pub fn read_status<R: Read>(source: R, path: &Path) -> Result<Vec<(String, AccountStatus)>> {
    let mut r = reader(source);
    expect_header(&mut r, &["user_id", "code"], path)?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let bad = |m: String| Error::format(path, line_of(&row), m);
        let code = match row.get(1).unwrap_or("") {
            "" => None,
            c => Some(c.parse::<i64>().map_err(|_| bad(format!("status code {c:?} is not an integer")))?),
        };
        let status = AccountStatus::from_code(code).map_err(|e| bad(e.to_string()))?;
        out.push((row[0].to_owned(), status));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct ScoreFile {
    pub scores: Vec<(String, f64)>,
    /// `(line, reason)` for rows without a numeric score.
    pub unreadable: Vec<(u64, String)>,
}

/// `user_id,score` rows. Non-numeric scores are set aside; range checking is
/// left to the summary.
pub fn read_scores<R: Read>(source: R, path: &Path) -> Result<ScoreFile> {
    let mut r = reader(source);
    expect_header(&mut r, &["user_id", "score"], path)?;
    let mut out = ScoreFile::default();
    for row in r.records() {
        let row = row?;
        let raw = row.get(1).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(score) if score.is_finite() => out.scores.push((row[0].to_owned(), score)),
            _ => out.unreadable.push((line_of(&row), format!("score {raw:?} for {:?} is not a number", &row[0]))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct LabelledFile {
    pub accounts: Vec<LabelledAccount>,
    /// Accounts without a two-of-three human majority.
    pub no_majority: Vec<String>,
}

/// `user_id,label_1,label_2,label_3,predicted`. Empty labels are abstentions.
pub fn read_labelled<R: Read>(source: R, path: &Path) -> Result<LabelledFile> {
    let mut r = reader(source);
    expect_header(&mut r, &["user_id", "label_1", "label_2", "label_3", "predicted"], path)?;
    let mut out = LabelledFile::default();
    for row in r.records() {
        let row = row?;
        let bad = |m: String| Error::format(path, line_of(&row), m);
        if row.len() < 5 {
            return Err(bad(format!("expected 5 fields, found {}", row.len())));
        }
        let mut votes = [None; 3];
        for (i, vote) in votes.iter_mut().enumerate() {
            let field = &row[i + 1];
            if !field.is_empty() {
                *vote = Some(AccountLabel::parse(field).ok_or_else(|| bad(format!("unknown label {field:?}")))?);
            }
        }
        let predicted =
            AccountLabel::parse(&row[4]).ok_or_else(|| bad(format!("unknown predicted label {:?}", &row[4])))?;
        match polluter_core::eval::majority(votes) {
            Some(human_label) => out.accounts.push(LabelledAccount {
                user_id: row[0].to_owned(),
                human_label,
                predicted_label: predicted,
            }),
            None => out.no_majority.push(row[0].to_owned()),
        }
    }
    Ok(out)
}

pub fn write_ground_truth<W: Write>(w: W, truth: &BTreeMap<String, AccountLabel>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["user_id", "label"])?;
    for (user, label) in truth {
        out.write_record([user.as_str(), label.as_str()])?;
    }
    finish(out)
}

pub fn read_ground_truth<R: Read>(source: R, path: &Path) -> Result<BTreeMap<String, AccountLabel>> {
    let mut r = reader(source);
    expect_header(&mut r, &["user_id", "label"], path)?;
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row?;
        let raw = row.get(1).unwrap_or("");
        let label = AccountLabel::parse(raw)
            .ok_or_else(|| Error::format(path, line_of(&row), format!("unknown label {raw:?}")))?;
        out.insert(row[0].to_owned(), label);
    }
    Ok(out)
}
