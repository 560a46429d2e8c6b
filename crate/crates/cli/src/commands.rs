use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use storynet::classify::{midpoint_variant, train_discriminant, MidpointMode};
use storynet::corpus::{load_manifest_with, CorpusManifest};
use storynet::experiment::{
    evaluate_table, outcomes_to_table, sweep_csv, sweep_length, sweep_m, zipf_baseline, Corpus, EvalReport,
    PipelineConfig, SampleOutcome, SweepPoint, ZipfBaseline,
};
use storynet::measures::{self, SMALL_WORLD_BAND};
use storynet::semnet::SemanticNetwork;
use storynet::table::{FeatureColumn, FeatureTable};
use storynet::tokenize::make_stream;
use storynet::{DiscriminantModel, Error};

use crate::args::{Command, GlobalArgs};

pub fn run(command: &Command, g: &GlobalArgs) -> Result<()> {
    match command {
        Command::BuildNet { text } => build_net(text, g),
        Command::Features => features(g),
        Command::Train(t) => train(t.table.as_deref(), g),
        Command::Classify { table, model } => classify(table, model, g),
        Command::Eval(t) => eval(t.table.as_deref(), g),
        Command::SweepM(s) => sweep(g, "m", &s.values),
        Command::SweepLength(s) => sweep(g, "window", &s.values),
        Command::BaselineZipf => baseline_zipf(g),
    }
}

/// Machine-readable output goes to `--out` with the summary on stdout, or to
/// stdout with the summary on stderr.
fn emit(g: &GlobalArgs, machine: &str, summary: &str) -> Result<()> {
    match &g.out {
        Some(path) => {
            fs::write(path, machine).with_context(|| format!("writing {}", path.display()))?;
            print!("{summary}");
        }
        None => {
            print!("{machine}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn manifest(g: &GlobalArgs) -> Result<CorpusManifest> {
    let path = g
        .manifest
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--manifest is required for this command".into()))?;
    Ok(load_manifest_with(path, g.categories()?)?)
}

fn corpus(g: &GlobalArgs) -> Result<Corpus> {
    let m = manifest(g)?;
    log::info!("tokenizing {} samples", m.len());
    Ok(Corpus::load(m, g.lemmatizer))
}

fn build_net(text: &Path, g: &GlobalArgs) -> Result<()> {
    if g.m < 1 {
        return Err(Error::InvalidParameter(format!("word distance m must be >= 1, got {}", g.m)).into());
    }
    let raw = fs::read_to_string(text).with_context(|| format!("reading {}", text.display()))?;
    let id = text.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let stream = make_stream(&raw, id, &*g.lemmatizer.build());
    let net = SemanticNetwork::build(&stream, g.m).with_context(|| format!("building {}", text.display()))?;

    let mut summary = String::new();
    writeln!(summary, "vertices: {}", net.n_vertices())?;
    writeln!(summary, "words: {}", net.n_words())?;
    writeln!(summary, "edges: {}", net.edge_count())?;
    writeln!(summary, "m: {}", net.m())?;
    if g.with_geodesic && net.n_vertices() >= 2 {
        let geo = measures::mean_geodesic::<f64>(net.graph());
        let sw = measures::small_world_check(&geo, SMALL_WORLD_BAND)?;
        writeln!(summary, "mean_geodesic: {:.4}", geo.mean_geodesic)?;
        writeln!(summary, "l_over_log10_n: {:.4}", sw.ratio)?;
        writeln!(summary, "small_world: {}", sw.small_world)?;
    }
    emit(g, &net.edge_list_string(), &summary)
}

fn write_distributions(dir: &Path, corpus: &Corpus, cfg: &PipelineConfig, outcomes: &[SampleOutcome]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, o) in outcomes.iter().enumerate() {
        let Ok(x) = &o.result else { continue };
        let net = corpus.network(i, cfg)?;
        let dist = measures::degree_distribution(net.graph());
        let mut s = String::new();
        writeln!(s, "# id: {}", o.entry.id)?;
        writeln!(s, "# split_k: {}", x.split_k)?;
        writeln!(s, "# gamma1: {}", x.features.gamma1)?;
        writeln!(s, "# gamma2: {}", x.features.gamma2)?;
        writeln!(s, "# gamma3: {}", x.features.gamma3)?;
        writeln!(s, "series,k,value")?;
        for (&k, &c) in &dist.counts {
            writeln!(s, "pk,{k},{c}")?;
        }
        for (name, region) in [("pk_binned_lower", &x.lower), ("pk_binned_upper", &x.upper)] {
            for &(k, v) in &region.binned.points {
                writeln!(s, "{name},{k},{v}")?;
            }
        }
        for (k, c) in measures::clustering_by_degree::<f64>(net.graph()).series() {
            writeln!(s, "ck,{k},{c}")?;
        }
        let path = dir.join(format!("{}.csv", sanitize(&o.entry.id)));
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

fn table_summary(table: &FeatureTable) -> Result<String> {
    let mut s = String::new();
    let ok: Vec<_> = table.rows.iter().filter(|r| r.is_ok()).collect();
    writeln!(s, "samples: {} ({} fitted, {} failed)", table.rows.len(), ok.len(), table.rows.len() - ok.len())?;
    for r in table.rows.iter().filter(|r| !r.is_ok()) {
        writeln!(s, "  failed {}: {}", r.id, r.error.as_deref().unwrap_or("missing exponents"))?;
    }
    let below = ok.iter().filter(|r| r.gamma2 < r.gamma1).count();
    writeln!(s, "gamma2 < gamma1: {below} of {}", ok.len())?;
    let with_l: Vec<_> = ok.iter().filter_map(|r| Some((r.l?, r.n_vertices?))).collect();
    if !with_l.is_empty() {
        let small = with_l
            .iter()
            .filter(|&&(l, n)| {
                let ratio = l / (n as f64).log10();
                ratio >= SMALL_WORLD_BAND.0 && ratio <= SMALL_WORLD_BAND.1
            })
            .count();
        writeln!(
            s,
            "small world (l / log10 N in [{}, {}]): {small} of {}",
            SMALL_WORLD_BAND.0,
            SMALL_WORLD_BAND.1,
            with_l.len()
        )?;
    }
    Ok(s)
}

fn features(g: &GlobalArgs) -> Result<()> {
    let cfg = g.pipeline()?;
    let corpus = corpus(g)?;
    let outcomes = corpus.extract(&cfg)?;
    if let Some(dir) = &g.dump_distributions {
        write_distributions(dir, &corpus, &cfg, &outcomes)?;
    }
    let table = outcomes_to_table(&outcomes, &cfg);
    emit(g, &table.to_csv_string()?, &table_summary(&table)?)
}

/// A feature table from a file, or extracted from the manifest.
fn feature_table(path: Option<&Path>, g: &GlobalArgs) -> Result<FeatureTable> {
    match path {
        Some(p) => Ok(FeatureTable::load(p)?),
        None => {
            let cfg = g.pipeline()?;
            Ok(corpus(g)?.feature_table(&cfg)?)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: DiscriminantModel,
    pub columns: Vec<FeatureColumn>,
    pub plane: String,
    pub config: BTreeMap<String, String>,
}

fn plane(model: &DiscriminantModel, columns: &[FeatureColumn]) -> String {
    let names: Vec<String> = columns
        .iter()
        .map(|c| match c {
            FeatureColumn::Gamma1 => "γ'1".to_owned(),
            FeatureColumn::Gamma2 => "γ'2".to_owned(),
            FeatureColumn::Gamma3 => "γ'3".to_owned(),
            FeatureColumn::L => "l'".to_owned(),
        })
        .collect();
    model.plane_equation_named(1, &names)
}

fn train(path: Option<&Path>, g: &GlobalArgs) -> Result<()> {
    let table = feature_table(path, g)?;
    let columns = g.columns()?;
    let opts = g.eval_options()?;
    let [a, b] = &opts.lda.labels;
    let (g1, g2) = (table.group(a, &columns), table.group(b, &columns));
    let mut model = train_discriminant(&g1, &g2, &opts.lda)?;
    if opts.midpoint != MidpointMode::Mean {
        let w = midpoint_variant(&model, opts.midpoint, &g1, &g2)?;
        model = model.with_midpoint(w);
    }
    let mut config: BTreeMap<String, String> = table.config.iter().cloned().collect();
    config.extend(g.eval_echo(&opts, &columns));
    config.insert("n_train".into(), format!("{},{}", g1.len(), g2.len()));
    let file = ModelFile {
        plane: plane(&model, &columns),
        model,
        columns,
        config,
    };

    let mut s = String::new();
    writeln!(s, "trained on {} {a} and {} {b} samples", g1.len(), g2.len())?;
    writeln!(s, "direction: {:?}", file.model.direction)?;
    writeln!(s, "midpoint w: {}", file.model.midpoint)?;
    writeln!(s, "condition number: {:.3e}", file.model.condition_number)?;
    writeln!(s, "plane: {}", file.plane)?;
    emit(g, &to_json(&file)?, &s)
}

fn classify(table_path: &Path, model_path: &Path, g: &GlobalArgs) -> Result<()> {
    let text = fs::read_to_string(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(Error::from)
        .with_context(|| format!("parsing {}", model_path.display()))?;
    if file.columns.len() != file.model.dim() {
        return Err(Error::DimensionMismatch {
            expected: file.model.dim(),
            found: file.columns.len(),
        })
        .context("model file lists the wrong number of columns");
    }
    let table = FeatureTable::load(table_path)?;
    for key in ["m", "split_basis", "lemmatizer", "window"] {
        if let (Some(t), Some(m)) = (table.config_value(key), file.config.get(key)) {
            if t != m {
                log::warn!("{key} differs: table has {t}, model was trained with {m}");
            }
        }
    }

    let mut out = String::new();
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for row in &table.rows {
        let label = match row.select(&file.columns) {
            Some(x) => file.model.classify_label(&x)?,
            None => "unclassified",
        };
        writeln!(out, "{}\t{label}", row.id)?;
        if file.model.labels.contains(&row.label) {
            let t = tally.entry(row.label.as_str()).or_default();
            t.1 += 1;
            t.0 += usize::from(label == row.label);
        }
    }
    let mut s = String::new();
    writeln!(s, "classified {} rows", table.rows.len())?;
    for (label, (hit, total)) in tally {
        writeln!(s, "  {label}: {hit} of {total} match the table label")?;
    }
    emit(g, &out, &s)
}

fn report_summary(r: &EvalReport) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "pool sizes: {} / {}", r.pool_sizes[0], r.pool_sizes[1])?;
    writeln!(s, "{:<10} {:>9} {:>9} {:>18}", "category", "training", "held-out", "bootstrap")?;
    for label in &r.model.labels {
        let fmt = |a: Option<f64>| a.map_or_else(|| "-".to_owned(), |a| format!("{:.1}%", 100.0 * a));
        let boot = r
            .bootstrap
            .category(label)
            .map_or_else(|| "-".to_owned(), |c| format!("{:.1} ± {:.1}%", 100.0 * c.mean, 100.0 * c.error));
        writeln!(
            s,
            "{label:<10} {:>9} {:>9} {boot:>18}",
            fmt(r.training.accuracy(label)),
            fmt(r.held_out.accuracy(label))
        )?;
    }
    if r.bootstrap.failed_iterations > 0 {
        writeln!(
            s,
            "{} of {} bootstrap iterations failed",
            r.bootstrap.failed_iterations, r.bootstrap.iterations
        )?;
    }
    Ok(s)
}

#[derive(Serialize)]
struct EvalFile<'a> {
    config: BTreeMap<String, String>,
    columns: &'a [FeatureColumn],
    plane: String,
    report: &'a EvalReport,
}

fn eval(path: Option<&Path>, g: &GlobalArgs) -> Result<()> {
    let table = feature_table(path, g)?;
    let columns = g.columns()?;
    let opts = g.eval_options()?;
    let report = evaluate_table(&table, &columns, &opts)?;
    let mut config: BTreeMap<String, String> = table.config.iter().cloned().collect();
    config.extend(g.eval_echo(&opts, &columns));
    let file = EvalFile {
        config,
        columns: &columns,
        plane: plane(&report.model, &columns),
        report: &report,
    };
    let mut s = report_summary(&report)?;
    writeln!(s, "plane: {}", file.plane)?;
    emit(g, &to_json(&file)?, &s)
}

fn sweep(g: &GlobalArgs, parameter: &str, values: &[usize]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("--values needs at least one value".into()).into());
    }
    let cfg = g.pipeline()?;
    let columns = g.columns()?;
    let opts = g.eval_options()?;
    let corpus = corpus(g)?;
    let points: Vec<SweepPoint> = match parameter {
        "m" => sweep_m(&corpus, values, &cfg, &columns, &opts)?,
        _ => sweep_length(&corpus, values, &cfg, &columns, &opts)?,
    };
    let mut echo: Vec<(String, String)> = cfg.echo().into_iter().filter(|(k, _)| k != parameter).collect();
    if parameter == "m" && g.bin_width.is_none() {
        for (k, v) in &mut echo {
            if k == "bin_width" {
                *v = "2m".into();
            }
        }
    }
    echo.extend(g.eval_echo(&opts, &columns));
    let csv = sweep_csv(parameter, &points, &echo, &opts.lda.labels)?;

    let labels = &opts.lda.labels;
    let mut s = String::new();
    writeln!(s, "{parameter:>8} {:>18} {:>18} {:>7}", labels[0], labels[1], "failed")?;
    for p in &points {
        match &p.report {
            Ok(r) => {
                let cell = |l: &String| {
                    r.bootstrap
                        .category(l)
                        .map_or_else(|| "-".to_owned(), |c| format!("{:.1} ± {:.1}%", 100.0 * c.mean, 100.0 * c.error))
                };
                writeln!(s, "{:>8} {:>18} {:>18} {:>7}", p.value, cell(&labels[0]), cell(&labels[1]), p.failed_samples)?;
            }
            Err(e) => writeln!(s, "{:>8} error: {e}", p.value)?,
        }
    }
    emit(g, &csv, &s)
}

#[derive(Serialize)]
struct Comparison {
    network_mean_accuracy: f64,
    zipf_mean_accuracy: f64,
    zipf_median_midpoint_mean_accuracy: f64,
    network_minus_zipf: f64,
}

#[derive(Serialize)]
struct BaselineFile<'a> {
    config: BTreeMap<String, String>,
    comparison: Comparison,
    zipf: &'a ZipfBaseline,
    network: &'a EvalReport,
}

fn baseline_zipf(g: &GlobalArgs) -> Result<()> {
    let cfg = g.pipeline()?;
    let columns = g.columns()?;
    let opts = g.eval_options()?;
    let corpus = corpus(g)?;
    let zipf = zipf_baseline(&corpus, cfg.window, cfg.placement, &opts)?;
    let network = evaluate_table(&corpus.feature_table(&cfg)?, &columns, &opts)?;
    let comparison = Comparison {
        network_mean_accuracy: network.bootstrap.mean_accuracy(),
        zipf_mean_accuracy: zipf.mean_midpoint.bootstrap.mean_accuracy(),
        zipf_median_midpoint_mean_accuracy: zipf.median_midpoint.bootstrap.mean_accuracy(),
        network_minus_zipf: network.bootstrap.mean_accuracy() - zipf.mean_midpoint.bootstrap.mean_accuracy(),
    };
    let mut config: BTreeMap<String, String> = cfg.echo().into_iter().collect();
    config.extend(g.eval_echo(&opts, &columns));
    config.remove("midpoint");

    let mut s = String::new();
    writeln!(s, "network features ({}):", columns.iter().map(|c| c.name()).collect::<Vec<_>>().join(","))?;
    s.push_str(&report_summary(&network)?);
    writeln!(s, "\nzipf exponent, mean midpoint:")?;
    s.push_str(&report_summary(&zipf.mean_midpoint)?);
    writeln!(s, "\nzipf exponent, median midpoint:")?;
    s.push_str(&report_summary(&zipf.median_midpoint)?);
    writeln!(
        s,
        "\nmean accuracy: network {:.1}%, zipf {:.1}% (difference {:+.1} points)",
        100.0 * comparison.network_mean_accuracy,
        100.0 * comparison.zipf_mean_accuracy,
        100.0 * comparison.network_minus_zipf
    )?;
    let file = BaselineFile {
        config,
        comparison,
        zipf: &zipf,
        network: &network,
    };
    emit(g, &to_json(&file)?, &s)
}
