use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use opst::baseline::{ba_cp, ba_mp, brute_force_mine, feature_matrix, FragmentGroup};
use opst::check::{run_check, CheckConfig};
use opst::codes::{PrefCode, Series};
use opst::input::{parse_csv, parse_plain, Column, ParsedSeries};
use opst::lca::LcaIndex;
use opst::miner::{decode_report, Miner, MiningParams, PatternReport};
use opst::oracle::WaveletOracle;
use opst::tree::{build_opst, Opst};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Engine, Format, InputArgs, Mode};

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
    })
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("cannot read standard input")?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn infer_format(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension() {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Plain,
    })
}

fn parse_file(path: &Path, format: Option<Format>, column: &Column) -> Result<ParsedSeries> {
    let text = read_text(path)?;
    let parsed = match infer_format(path, format) {
        Format::Plain => parse_plain(&text),
        Format::Csv => parse_csv(&text, column),
    };
    parsed.with_context(|| format!("cannot parse {}", path.display()))
}

fn read_input(args: &InputArgs) -> Result<ParsedSeries> {
    let Some(path) = &args.input else {
        bail!("--input is required");
    };
    parse_file(path, args.format, &args.column)
}

fn millis(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

pub fn build(args: &InputArgs, index: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let parsed = read_input(args)?;
    let start = Instant::now();
    let t = build_opst(parsed.series.clone());
    let elapsed = start.elapsed();
    let bytes = opst::io::encode(&t);
    fs::write(index, &bytes).with_context(|| format!("cannot write {}", index.display()))?;

    let branching = t.nodes().iter().filter(|v| v.is_branching()).count();
    let mut out = open_output(output)?;
    writeln!(out, "n={}", t.len())?;
    writeln!(out, "sigma={}", t.sigma())?;
    writeln!(out, "value_span={}", parsed.raw_span())?;
    writeln!(out, "explicit_nodes={}", t.node_count())?;
    writeln!(out, "branching_nodes={branching}")?;
    writeln!(out, "peak_memory_bytes={}", t.heap_bytes() + t.oracle().heap_bytes())?;
    writeln!(out, "index_bytes={}", bytes.len())?;
    out.flush()?;
    eprintln!("build time: {}", millis(elapsed));
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Record<'a> {
    witness_start: usize,
    length: usize,
    frequency: usize,
    prefcode: String,
    ranks: &'a [u32],
}

fn group_report(g: &FragmentGroup) -> PatternReport {
    PatternReport {
        witness_start: g.starts[0],
        length: g.length,
        frequency: g.frequency(),
        node: None,
    }
}

fn load_tree(args: &InputArgs, index: Option<&Path>) -> Result<Opst> {
    match index {
        Some(path) => {
            let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
            opst::io::decode(&bytes).with_context(|| format!("cannot load index {}", path.display()))
        }
        None => Ok(build_opst(read_input(args)?.series)),
    }
}

fn run_engine(t: &Opst, mode: Mode, params: MiningParams, engine: Engine, cap: usize) -> Result<Vec<PatternReport>> {
    let mut reports = match engine {
        Engine::Opst => {
            let miner = Miner::new(t);
            match mode {
                Mode::Maximal => miner.maximal(params).reports,
                Mode::Closed => miner.closed(&LcaIndex::build(t), params).reports,
            }
        }
        Engine::Apriori => match mode {
            Mode::Maximal => ba_mp(t.oracle(), params),
            Mode::Closed => ba_cp(t.oracle(), params),
        },
        Engine::BruteForce => {
            let found = brute_force_mine(t.series(), params, cap)?;
            let groups = match mode {
                Mode::Maximal => found.maximal,
                Mode::Closed => found.closed,
            };
            groups.iter().map(group_report).collect()
        }
    };
    reports.sort_by_key(|r| (r.witness_start, r.length));
    Ok(reports)
}

pub fn mine(
    args: &InputArgs,
    index: Option<&Path>,
    mode: Mode,
    tau: usize,
    engine: Engine,
    cap: usize,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let params = MiningParams::new(tau)?;
    if index.is_none() && args.input.is_none() {
        bail!("either --input or --index is required");
    }
    let start = Instant::now();
    let t = load_tree(args, index)?;
    let built = start.elapsed();
    let start = Instant::now();
    let reports = run_engine(&t, mode, params, engine, cap)?;
    let mined = start.elapsed();

    let mut out = open_output(output)?;
    for r in &reports {
        let (code, ranks) = decode_report(&t, r)?;
        let record = Record {
            witness_start: r.witness_start,
            length: r.length,
            frequency: r.frequency,
            prefcode: code.to_string(),
            ranks: &ranks.0,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    let total = (built + mined).as_secs_f64();
    let share = if total > 0.0 { 100.0 * mined.as_secs_f64() / total } else { 0.0 };
    eprintln!(
        "{} patterns; {}: {}, mining: {} ({share:.1}% of total)",
        reports.len(),
        if index.is_some() { "index load" } else { "build" },
        millis(built),
        millis(mined),
    );
    Ok(ExitCode::SUCCESS)
}

pub fn check(cfg: &CheckConfig, output: Option<&Path>) -> Result<ExitCode> {
    let report = run_check(cfg)?;
    let mut out = open_output(output)?;
    let code = match &report.divergence {
        None => {
            writeln!(
                out,
                "all equivalent: {} instances (seed {})",
                report.instances_run, cfg.seed
            )?;
            ExitCode::SUCCESS
        }
        Some(d) => {
            writeln!(out, "divergence at instance {} (seed {})", d.index, cfg.seed)?;
            writeln!(out, "instance: {}", d.instance)?;
            writeln!(out, "mismatch: {}", d.mismatch)?;
            writeln!(out, "reproducer: {}", d.reproducer)?;
            eprintln!("error: miners diverge on instance {}", d.index);
            ExitCode::FAILURE
        }
    };
    out.flush()?;
    Ok(code)
}

fn series_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        bail!("no series files in {}", dir.display());
    }
    Ok(files)
}

fn read_patterns(path: &Path) -> Result<Vec<PrefCode>> {
    let text = read_text(path)?;
    let mut seen = BTreeSet::new();
    let mut patterns = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let code: PrefCode = line
            .parse()
            .with_context(|| format!("{}:{}: bad pattern", path.display(), k + 1))?;
        if seen.insert(code.clone()) {
            patterns.push(code);
        }
    }
    Ok(patterns)
}

/// Union of the patterns mined from every series, in canonical order.
fn mined_patterns(series: &[Series], mode: Mode, params: MiningParams) -> Result<Vec<PrefCode>> {
    let mut all = BTreeSet::new();
    for s in series {
        let t = build_opst(s.clone());
        for r in run_engine(&t, mode, params, Engine::Opst, 0)? {
            all.insert(s.pref_code(r.witness_start, r.witness_end())?);
        }
    }
    Ok(all.into_iter().collect())
}

pub fn features(
    dir: &Path,
    format: Option<Format>,
    column: &Column,
    patterns: Option<&Path>,
    tau: Option<usize>,
    mode: Mode,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let files = series_files(dir)?;
    let series = files
        .iter()
        .map(|p| Ok(parse_file(p, format, column)?.series))
        .collect::<Result<Vec<_>>>()?;
    let patterns = match (patterns, tau) {
        (Some(path), _) => read_patterns(path)?,
        (None, Some(tau)) => mined_patterns(&series, mode, MiningParams::new(tau)?)?,
        (None, None) => bail!("either --patterns or --tau is required"),
    };
    if patterns.is_empty() {
        bail!("empty pattern set");
    }
    let oracles: Vec<WaveletOracle> = series.into_iter().map(WaveletOracle::build).collect();
    let matrix = feature_matrix(&oracles, &patterns)?;

    let mut csv = csv::Writer::from_writer(open_output(output)?);
    let mut header = vec!["series".to_string()];
    header.extend(patterns.iter().map(|p| p.to_string()));
    csv.write_record(&header)?;
    for (file, row) in files.iter().zip(&matrix) {
        let name = file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let mut record = vec![name];
        record.extend(row.iter().map(|c| c.to_string()));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn bench(
    sizes: &[usize],
    sigmas: &[u32],
    seed: u64,
    tau: usize,
    mode: Mode,
    reps: usize,
    output: Option<&Path>,
) -> Result<ExitCode> {
    let params = MiningParams::new(tau)?;
    let reps = reps.max(1);
    let mut csv = csv::Writer::from_writer(open_output(output)?);
    csv.write_record(["n", "sigma", "build_seconds", "mine_seconds", "peak_memory_bytes"])?;
    for &sigma in sigmas {
        for &n in sizes {
            if n == 0 || sigma == 0 {
                bail!("sizes and alphabet sizes must be positive");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 20) ^ sigma as u64);
            let letters: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let series = Series::from_letters(&letters)?;
            let (mut build_best, mut mine_best) = (f64::INFINITY, f64::INFINITY);
            let mut memory = 0;
            for _ in 0..reps {
                let start = Instant::now();
                let t = build_opst(series.clone());
                build_best = build_best.min(start.elapsed().as_secs_f64());
                let start = Instant::now();
                let miner = Miner::new(&t);
                let mut extra = 0;
                let found = match mode {
                    Mode::Maximal => miner.maximal(params).reports.len(),
                    Mode::Closed => {
                        let lca = LcaIndex::build(&t);
                        extra = lca.heap_bytes();
                        miner.closed(&lca, params).reports.len()
                    }
                };
                mine_best = mine_best.min(start.elapsed().as_secs_f64());
                std::hint::black_box(found);
                memory = t.heap_bytes() + t.oracle().heap_bytes() + extra;
            }
            csv.write_record([
                n.to_string(),
                sigma.to_string(),
                format!("{build_best:.6}"),
                format!("{mine_best:.6}"),
                memory.to_string(),
            ])?;
            csv.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
