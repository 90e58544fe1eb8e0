use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use xlc_explain::io::{read_dataset, read_heuristics, read_instances, ExplanationRecord, Model};
use xlc_explain::oracle::{all_minimal_explanations, MAX_SUBSET_FEATURES};
use xlc_explain::{
    delay_probe, enumerate, find_one, frequency, hit_score, synth, train as train_nbc, ClassLabel,
    ExplanationProblem, Instance, PiExplanation, XlcModel,
};

use crate::RowArgs;

pub enum Status {
    Ok,
    RowFailures(usize),
}

impl Status {
    fn from_failures(n: usize) -> Self {
        if n == 0 {
            Status::Ok
        } else {
            Status::RowFailures(n)
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_in(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn load_model(path: &Path) -> Result<Model> {
    Model::from_reader(open_in(path)?).with_context(|| format!("reading model {}", path.display()))
}

/// A parsed, valid data row. `id` is the 0-based index among data rows,
/// including rejected ones, so ids stay stable when rows fail.
struct Row {
    id: u64,
    line: usize,
    instance: Instance,
}

/// Runs `each` on every valid row of `--data`, in file order. Rows that fail
/// to parse or whose `each` fails are reported on stderr with their line
/// number and counted.
fn for_each_row(
    args: &RowArgs,
    model: &Model,
    mut each: impl FnMut(&Row) -> Result<()>,
) -> Result<usize> {
    let filter: Option<ClassLabel> = args
        .class
        .as_deref()
        .map(str::parse)
        .transpose()
        .context("--class")?;
    let rows = read_instances(open_in(&args.data)?, model.num_features())
        .with_context(|| format!("reading {}", args.data.display()))?;
    let mut failures = 0;
    for (id, row) in rows.into_iter().enumerate() {
        let result = row
            .instance
            .map_err(anyhow::Error::from)
            .and_then(|instance| {
                let row = Row {
                    id: id as u64,
                    line: row.line,
                    instance,
                };
                if let Some(class) = filter {
                    if model.predict(&row.instance)? != class {
                        return Ok(());
                    }
                }
                each(&row)
            });
        if let Err(e) = result {
            eprintln!("{}:{}: {e:#}", args.data.display(), row.line);
            failures += 1;
        }
    }
    Ok(failures)
}

fn derive(xlc: &XlcModel, row: &Row) -> Result<ExplanationProblem> {
    Ok(ExplanationProblem::derive(xlc, &row.instance)?)
}

/// Compares enumerated explanations with the oracle. Too many features for
/// the oracle is not an error; the row is reported as skipped.
fn oracle_check(
    xlc: &XlcModel,
    row: &Row,
    found: &BTreeSet<Vec<usize>>,
    complete: bool,
) -> Result<bool> {
    if xlc.num_features() > MAX_SUBSET_FEATURES {
        eprintln!(
            "line {}: {} features, oracle check skipped (limit {MAX_SUBSET_FEATURES})",
            row.line,
            xlc.num_features()
        );
        return Ok(false);
    }
    let oracle = all_minimal_explanations(xlc, &row.instance)?;
    let agrees = if complete {
        *found == oracle.all_minimal
    } else {
        found.is_subset(&oracle.all_minimal)
    };
    if !agrees {
        bail!("explanations disagree with the oracle");
    }
    Ok(true)
}

pub fn train(data: &Path, smoothing: f64, out: Option<&Path>) -> Result<Status> {
    let dataset = read_dataset(open_in(data)?, None)
        .with_context(|| format!("reading {}", data.display()))?;
    let model = train_nbc(&dataset, smoothing)?;
    let mut out = open_out(out)?;
    serde_json::to_writer_pretty(&mut out, &model)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(Status::Ok)
}

pub fn predict(args: &RowArgs) -> Result<Status> {
    #[derive(Serialize)]
    struct Prediction {
        instance_id: u64,
        class: ClassLabel,
    }
    let model = load_model(&args.model)?;
    let mut out = open_out(args.out.as_deref())?;
    let failures = for_each_row(args, &model, |row| {
        let class = model.predict(&row.instance)?;
        write_json(
            &mut out,
            &Prediction {
                instance_id: row.id,
                class,
            },
        )
    })?;
    out.flush()?;
    Ok(Status::from_failures(failures))
}

pub fn explain(args: &RowArgs) -> Result<Status> {
    let model = load_model(&args.model)?;
    let xlc = model.to_xlc();
    let mut out = open_out(args.out.as_deref())?;
    let failures = for_each_row(args, &model, |row| {
        let problem = derive(&xlc, row)?;
        let e = find_one(&problem)?;
        if args.verify {
            let first = enumerate(&problem, Some(1)).next();
            if first.as_ref() != Some(&e) || !problem.is_explanation(e.features()) {
                bail!("greedy explanation is not the first enumerated one");
            }
            oracle_check(&xlc, row, &[e.features().to_vec()].into(), false)?;
        }
        write_json(&mut out, &ExplanationRecord::new(row.id, &problem, &e))
    })?;
    out.flush()?;
    Ok(Status::from_failures(failures))
}

pub fn enumerate_rows(args: &RowArgs, limit: usize) -> Result<Status> {
    let model = load_model(&args.model)?;
    let xlc = model.to_xlc();
    let mut out = open_out(args.out.as_deref())?;
    let failures = for_each_row(args, &model, |row| {
        let problem = derive(&xlc, row)?;
        let mut it = enumerate(&problem, Some(limit));
        let mut found = BTreeSet::new();
        for e in it.by_ref() {
            write_json(&mut out, &ExplanationRecord::new(row.id, &problem, &e))?;
            if args.verify {
                found.insert(e.into_features());
            }
        }
        if !it.is_exhausted() {
            eprintln!(
                "{}:{}: stopped at --limit {limit}",
                args.data.display(),
                row.line
            );
        }
        if args.verify {
            oracle_check(&xlc, row, &found, it.is_exhausted())?;
        }
        Ok(())
    })?;
    out.flush()?;
    Ok(Status::from_failures(failures))
}

pub fn assess(args: &RowArgs, heuristic: &Path, limit: usize, k: Option<usize>) -> Result<Status> {
    #[derive(Serialize)]
    struct Assessment {
        instance_id: u64,
        score: f64,
        explanations: usize,
        partial: bool,
    }
    let model = load_model(&args.model)?;
    let xlc = model.to_xlc();
    let heuristics: HashMap<u64, Vec<usize>> = read_heuristics(open_in(heuristic)?)
        .with_context(|| format!("reading {}", heuristic.display()))?
        .into_iter()
        .map(|h| Ok((h.instance_id, h.zero_based()?)))
        .collect::<Result<_>>()?;
    let mut out = open_out(args.out.as_deref())?;
    // score bucket of width 10 -> count, 100 in its own bucket
    let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
    let mut scores = Vec::new();
    let failures = for_each_row(args, &model, |row| {
        let Some(h) = heuristics.get(&row.id) else {
            return Ok(());
        };
        let problem = derive(&xlc, row)?;
        let mut it = enumerate(&problem, Some(limit));
        let freq = frequency(it.by_ref(), xlc.num_features())?;
        let partial = !it.is_exhausted();
        if let Some(&bad) = h.iter().find(|&&j| j >= xlc.num_features()) {
            bail!("heuristic feature {} out of range", bad + 1);
        }
        let score = hit_score(h, &freq, k)?;
        *histogram.entry((score / 10.0).floor() as u32).or_default() += 1;
        scores.push(score);
        write_json(
            &mut out,
            &Assessment {
                instance_id: row.id,
                score,
                explanations: freq.total_explanations,
                partial,
            },
        )
    })?;
    out.flush()?;
    if !scores.is_empty() {
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        eprintln!(
            "assessed {} instances, mean hit score {mean:.2}",
            scores.len()
        );
        for (bucket, count) in &histogram {
            let label = if *bucket >= 10 {
                "100".to_string()
            } else {
                format!("{:>3}-{:<3}", bucket * 10, bucket * 10 + 10)
            };
            eprintln!("{label:>7} | {} {count}", "#".repeat((*count).min(60)));
        }
    }
    Ok(Status::from_failures(failures))
}

pub fn verify(args: &RowArgs) -> Result<Status> {
    #[derive(Serialize)]
    struct Verification {
        instance_id: u64,
        explanations: usize,
        min_size: usize,
        agrees: bool,
    }
    let model = load_model(&args.model)?;
    let xlc = model.to_xlc();
    if xlc.num_features() > MAX_SUBSET_FEATURES {
        bail!(
            "model has {} features; the oracle handles at most {MAX_SUBSET_FEATURES}",
            xlc.num_features()
        );
    }
    let mut out = open_out(args.out.as_deref())?;
    let failures = for_each_row(args, &model, |row| {
        let problem = derive(&xlc, row)?;
        let list: Vec<Vec<usize>> = enumerate(&problem, None)
            .map(PiExplanation::into_features)
            .collect();
        let set: BTreeSet<Vec<usize>> = list.iter().cloned().collect();
        let oracle = all_minimal_explanations(&xlc, &row.instance)?;
        let agrees = set.len() == list.len()
            && set == oracle.all_minimal
            && list.first().map(Vec::len) == Some(oracle.min_cardinality);
        write_json(
            &mut out,
            &Verification {
                instance_id: row.id,
                explanations: list.len(),
                min_size: oracle.min_cardinality,
                agrees,
            },
        )?;
        if !agrees {
            bail!("enumeration disagrees with the oracle");
        }
        Ok(())
    })?;
    out.flush()?;
    Ok(Status::from_failures(failures))
}

pub fn bench(
    features: usize,
    picks: usize,
    limit: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<Status> {
    #[derive(Serialize)]
    struct Report {
        features: usize,
        picks: usize,
        seed: u64,
        explanations: usize,
        total_ms: f64,
        mean_delay_ns: f64,
        p50_delay_ns: u128,
        p99_delay_ns: u128,
        max_delay_ns: u128,
        find_one_ns: u128,
    }
    if picks == 0 || picks > features {
        bail!("--picks must be between 1 and --features");
    }
    let (model, instance) = synth::equal_delta(features, picks, seed);
    let problem = ExplanationProblem::derive(&model, &instance)?;

    let t = Instant::now();
    find_one(&problem)?;
    let find_one_ns = t.elapsed().as_nanos();

    let stamps = delay_probe(&problem, Some(limit));
    let total = stamps.last().copied().unwrap_or_default();
    let mut gaps: Vec<Duration> = std::iter::once(stamps.first().copied().unwrap_or_default())
        .chain(stamps.windows(2).map(|w| w[1] - w[0]))
        .collect();
    gaps.sort_unstable();
    let pct = |q: f64| {
        gaps.get(((gaps.len() as f64 - 1.0) * q).round() as usize)
            .map_or(0, Duration::as_nanos)
    };
    let report = Report {
        features,
        picks,
        seed,
        explanations: stamps.len(),
        total_ms: total.as_secs_f64() * 1e3,
        mean_delay_ns: total.as_secs_f64() * 1e9 / stamps.len().max(1) as f64,
        p50_delay_ns: pct(0.5),
        p99_delay_ns: pct(0.99),
        max_delay_ns: gaps.last().map_or(0, Duration::as_nanos),
        find_one_ns,
    };
    let mut out = open_out(out)?;
    write_json(&mut out, &report)?;
    out.flush()?;
    Ok(Status::Ok)
}
