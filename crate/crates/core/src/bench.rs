//! Multi-trial campaigns and the statistics reported over them.
//!
//! Trial seeds come from [`trial_seed`], so a campaign is a pure function of
//! `(scenario, kinds, params, trials, base_seed)` up to timing, no matter how
//! the trials are scheduled across threads.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planners::{plan, PlanOutcome, PlannerKind, PlannerParams};
use crate::rng::{splitmix64, RngStream};
use crate::scalar::Scalar;
use crate::space::Scenario;

pub const DEFAULT_BINS: usize = 30;

pub const CSV_HEADER: [&str; 7] = [
    "scenario",
    "planner",
    "seed",
    "success",
    "iterations",
    "path_length",
    "wall_time_s",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub scenario_name: String,
    pub planner: PlannerKind,
    pub seed: u64,
    pub success: bool,
    pub iterations: usize,
    /// Present iff `success`.
    pub path_length: Option<f64>,
    pub wall_time: f64,
}

impl TrialRecord {
    fn from_outcome<S: Scalar>(
        scenario: &Scenario<S>,
        planner: PlannerKind,
        seed: u64,
        outcome: &PlanOutcome<S>,
    ) -> Self {
        Self {
            scenario_name: scenario.name().to_owned(),
            planner,
            seed,
            success: outcome.success,
            iterations: outcome.iterations_used,
            path_length: outcome.path_length.map(Scalar::as_f64),
            wall_time: outcome.wall_time,
        }
    }
}

/// Seed of trial `index` for `kind`:
/// `splitmix64(splitmix64(base_seed ^ splitmix64(tag)) ^ index)`.
///
/// Each planner's seeds depend only on its own tag, so adding a planner to a
/// campaign leaves the other planners' trials untouched.
pub fn trial_seed(base_seed: u64, kind: PlannerKind, index: u64) -> u64 {
    splitmix64(splitmix64(base_seed ^ splitmix64(kind.tag())) ^ index)
}

/// One finished trial with its full planner output.
#[derive(Debug, Clone)]
pub struct Trial<S> {
    pub record: TrialRecord,
    pub outcome: PlanOutcome<S>,
}

/// Runs every `(kind, trial)` pair and keeps the planner outputs.
///
/// Results are ordered by position of the kind in `kinds`, then by trial
/// index. Trials run on the rayon pool.
pub fn run_campaign_detailed<S: Scalar>(
    s: &Scenario<S>,
    kinds: &[PlannerKind],
    params: &PlannerParams<S>,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<Trial<S>>> {
    params.validate()?;
    // Trial-major so that planners share any slow spell of the machine
    // evenly; results are regrouped by planner afterwards.
    let jobs: Vec<(PlannerKind, u64)> = (0..trials as u64)
        .flat_map(|i| kinds.iter().map(move |&k| (k, i)))
        .collect();
    let mut done: Vec<Option<Trial<S>>> = jobs
        .into_par_iter()
        .map(|(kind, index)| {
            let seed = trial_seed(base_seed, kind, index);
            let outcome = plan(kind, s, params, &mut RngStream::new(seed))?;
            Ok(Some(Trial {
                record: TrialRecord::from_outcome(s, kind, seed, &outcome),
                outcome,
            }))
        })
        .collect::<Result<_>>()?;
    let n = kinds.len();
    Ok((0..n)
        .flat_map(|k| (0..trials).map(move |i| i * n + k))
        .map(|j| done[j].take().expect("each job is taken once"))
        .collect())
}

pub fn run_campaign<S: Scalar>(
    s: &Scenario<S>,
    kinds: &[PlannerKind],
    params: &PlannerParams<S>,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialRecord>> {
    Ok(run_campaign_detailed(s, kinds, params, trials, base_seed)?
        .into_iter()
        .map(|t| t.record)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` strictly ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Equal-width histogram over `[min, max]`.
///
/// Bins are half-open `[lo, hi)` except the last, which also holds `max`.
/// A constant sample is widened to `[v - 0.5, v + 0.5]`.
pub fn make_histogram(lengths: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParams(
            "histogram needs at least one bin".into(),
        ));
    }
    if lengths.is_empty() {
        return Err(Error::EmptyInput("histogram of zero values"));
    }
    if lengths.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(
            "histogram values must be finite".into(),
        ));
    }
    let mut lo = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = hi - lo;
    let mut edges: Vec<f64> = (0..bins)
        .map(|k| lo + width * (k as f64 / bins as f64))
        .collect();
    edges.push(hi);

    let mut counts = vec![0u64; bins];
    for &v in lengths {
        let mut idx = (((v - lo) / width) * bins as f64) as usize;
        idx = idx.min(bins - 1);
        // keep the assignment consistent with the stored edges
        while idx > 0 && v < edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bins && v >= edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Per planner, the share of all its trials that succeeded with
/// `path_length <= threshold`.
pub fn classify_short(records: &[TrialRecord], threshold: f64) -> BTreeMap<PlannerKind, f64> {
    let mut tally: BTreeMap<PlannerKind, (usize, usize)> = BTreeMap::new();
    for r in records {
        let entry = tally.entry(r.planner).or_default();
        entry.1 += 1;
        if r.path_length.is_some_and(|l| l <= threshold) {
            entry.0 += 1;
        }
    }
    tally
        .into_iter()
        .map(|(k, (short, total))| (k, short as f64 / total as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Mean over successful trials; absent without successes.
    pub mean_length: Option<f64>,
    /// Population standard deviation over successful trials.
    pub std_length: Option<f64>,
    pub short_fraction: f64,
    /// Mean over all trials.
    #[serde(rename = "mean_wall_time_s")]
    pub mean_wall_time: f64,
    pub success_count: usize,
    pub histogram: Option<Histogram>,
}

/// Welford accumulator.
#[derive(Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn population(&self) -> Option<(f64, f64)> {
        (self.n > 0).then(|| (self.mean, (self.m2 / self.n as f64).max(0.0).sqrt()))
    }
}

/// Per-planner statistics. Histograms are filled in only when `bins` is
/// given and the planner has at least one success.
pub fn summarize(
    records: &[TrialRecord],
    threshold: f64,
    bins: Option<usize>,
) -> Result<BTreeMap<PlannerKind, SummaryStats>> {
    let fractions = classify_short(records, threshold);
    let mut grouped: BTreeMap<PlannerKind, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.planner).or_default().push(r);
    }
    grouped
        .into_iter()
        .map(|(kind, rs)| {
            let mut moments = Moments::default();
            let lengths: Vec<f64> = rs.iter().filter_map(|r| r.path_length).collect();
            lengths.iter().for_each(|&l| moments.push(l));
            let stats = moments.population();
            let histogram = match bins {
                Some(b) if !lengths.is_empty() => Some(make_histogram(&lengths, b)?),
                Some(0) => {
                    return Err(Error::InvalidParams(
                        "histogram needs at least one bin".into(),
                    ))
                }
                _ => None,
            };
            let wall = rs.iter().map(|r| r.wall_time).sum::<f64>() / rs.len() as f64;
            Ok((
                kind,
                SummaryStats {
                    mean_length: stats.map(|s| s.0),
                    std_length: stats.map(|s| s.1),
                    short_fraction: fractions[&kind],
                    mean_wall_time: wall,
                    success_count: lengths.len(),
                    histogram,
                },
            ))
        })
        .collect()
}

/// Summary document: planner name to stats.
pub fn summary_json(summary: &BTreeMap<PlannerKind, SummaryStats>) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = summary
        .iter()
        .map(|(k, s)| {
            (
                k.as_str().to_owned(),
                serde_json::to_value(s).expect("summary serializes"),
            )
        })
        .collect();
    serde_json::Value::Object(map)
}

/// Formats like C's `%.6g`.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the per-trial CSV.
pub fn write_csv<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.scenario_name),
            r.planner,
            r.seed,
            r.success,
            r.iterations,
            r.path_length.map(format_sig6).unwrap_or_default(),
            format_sig6(r.wall_time),
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn csv_string(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Parses a results CSV; the header must match [`CSV_HEADER`] exactly.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::MalformedResults(format!(
            "unexpected header {:?}; expected {}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER.join(",")
        )));
    }
    let bad = |line: usize, what: &str| Error::MalformedResults(format!("row {line}: {what}"));
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let success: bool = row[3]
            .parse()
            .map_err(|_| bad(line, "success must be true/false"))?;
        let path_length = match &row[5] {
            "" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|_| bad(line, "path_length is not a number"))?,
            ),
        };
        if path_length.is_some() != success {
            return Err(bad(
                line,
                "path_length must be present exactly when success is true",
            ));
        }
        records.push(TrialRecord {
            scenario_name: row[0].to_owned(),
            planner: row[1].parse().map_err(|_| bad(line, "unknown planner"))?,
            seed: row[2]
                .parse()
                .map_err(|_| bad(line, "seed is not an unsigned integer"))?,
            success,
            iterations: row[4]
                .parse()
                .map_err(|_| bad(line, "iterations is not an integer"))?,
            path_length,
            wall_time: row[6]
                .parse()
                .map_err(|_| bad(line, "wall_time_s is not a number"))?,
        });
    }
    Ok(records)
}
