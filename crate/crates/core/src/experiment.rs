//! End-to-end runs: corpus → windows → networks → features → discriminant,
//! plus the `m` and window-length sweeps and the Zipf baseline.
//!
//! Per-sample work runs on the current rayon pool; results always come back in
//! manifest order, so outputs do not depend on the number of threads.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    bootstrap_accuracy, evaluate, midpoint_variant, train_discriminant, zipf_exponent, BootstrapMode,
    BootstrapOptions, BootstrapReport, DiscriminantModel, Evaluation, LdaOptions, MidpointMode, Sampling,
};
use crate::corpus::{extract_window, place_window, CorpusManifest, ManifestEntry, WindowPlacement};
use crate::error::{Error, Result};
use crate::fitting::{extract_features, FeatureExtraction, FeatureOptions};
use crate::semnet::SemanticNetwork;
use crate::table::{FeatureColumn, FeatureRow, FeatureTable};
use crate::tokenize::{make_stream, LemmatizerKind, TokenStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub m: usize,
    /// Words per sample window.
    pub window: usize,
    pub placement: WindowPlacement,
    pub lemmatizer: LemmatizerKind,
    pub features: FeatureOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            m: 4,
            window: 500,
            placement: WindowPlacement::Start,
            lemmatizer: LemmatizerKind::Stemmer,
            features: FeatureOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidParameter("window length must be at least 1".into()));
        }
        Ok(())
    }

    /// `(key, value)` pairs sufficient to reproduce a feature run.
    pub fn echo(&self) -> Vec<(String, String)> {
        let placement = match self.placement {
            WindowPlacement::Start => "start".to_owned(),
            WindowPlacement::Random(seed) => format!("random(seed={seed})"),
        };
        let f = &self.features;
        vec![
            ("m".into(), self.m.to_string()),
            ("window".into(), self.window.to_string()),
            ("window_placement".into(), placement),
            ("lemmatizer".into(), self.lemmatizer.to_string()),
            ("split_basis".into(), f.split_basis.to_string()),
            (
                "bin_width".into(),
                f.bin_width.map_or_else(|| format!("2m={}", 2 * self.m), |w| w.to_string()),
            ),
            ("shrink_bins".into(), f.shrink_bins.to_string()),
            ("min_fit_points".into(), f.min_fit_points.to_string()),
        ]
    }
}

/// A manifest with every text tokenized once, ready for repeated windowing.
#[derive(Debug, Clone)]
pub struct Corpus {
    manifest: CorpusManifest,
    lemmatizer: LemmatizerKind,
    streams: Vec<std::result::Result<TokenStream, String>>,
}

impl Corpus {
    /// Reads and tokenizes every entry. Unreadable texts are kept as per-sample
    /// failures.
    pub fn load(manifest: CorpusManifest, lemmatizer: LemmatizerKind) -> Self {
        let lem = lemmatizer.build();
        let streams = manifest
            .entries()
            .par_iter()
            .map(|e| {
                manifest
                    .read_text(e)
                    .map(|text| make_stream(&text, e.id.clone(), lem.as_ref()))
                    .map_err(|err| err.to_string())
            })
            .collect();
        Corpus {
            manifest,
            lemmatizer,
            streams,
        }
    }

    pub fn manifest(&self) -> &CorpusManifest {
        &self.manifest
    }

    pub fn lemmatizer(&self) -> LemmatizerKind {
        self.lemmatizer
    }

    pub fn labels(&self) -> &[String; 2] {
        self.manifest.categories()
    }

    pub fn stream(&self, index: usize) -> Result<&TokenStream> {
        self.streams[index]
            .as_ref()
            .map_err(|msg| Error::TooFewSamples(format!("text unavailable: {msg}")))
    }

    /// The configured window of sample `index`.
    pub fn window(&self, index: usize, length: usize, placement: WindowPlacement) -> Result<TokenStream> {
        let stream = self.stream(index)?;
        let id = &self.manifest.entries()[index].id;
        if stream.is_empty() {
            return Err(Error::EmptyStream);
        }
        extract_window(stream, &place_window(id, stream.n_words(), length, placement))
    }

    /// Network of one sample under `config`.
    pub fn network(&self, index: usize, config: &PipelineConfig) -> Result<SemanticNetwork> {
        let w = self.window(index, config.window, config.placement)?;
        SemanticNetwork::build(&w, config.m)
    }

    /// Features of every sample, in manifest order.
    pub fn extract(&self, config: &PipelineConfig) -> Result<Vec<SampleOutcome>> {
        config.validate()?;
        if config.lemmatizer != self.lemmatizer {
            return Err(Error::InvalidParameter(format!(
                "corpus was tokenized with the {} lemmatizer, config asks for {}",
                self.lemmatizer, config.lemmatizer
            )));
        }
        Ok((0..self.manifest.len())
            .into_par_iter()
            .map(|i| {
                let entry = &self.manifest.entries()[i];
                let result = self
                    .network(i, config)
                    .and_then(|net| extract_features::<f64>(&net, &entry.id, &config.features));
                if let Err(e) = &result {
                    log::debug!("{}: {e}", entry.id);
                }
                SampleOutcome {
                    entry: entry.clone(),
                    result,
                }
            })
            .collect())
    }

    pub fn feature_table(&self, config: &PipelineConfig) -> Result<FeatureTable> {
        Ok(outcomes_to_table(&self.extract(config)?, config))
    }

    /// Zipf exponent of every sample's window, in manifest order.
    pub fn zipf_exponents(&self, window: usize, placement: WindowPlacement) -> Vec<(ManifestEntry, Result<f64>)> {
        (0..self.manifest.len())
            .into_par_iter()
            .map(|i| {
                let r = self
                    .window(i, window, placement)
                    .and_then(|w| zipf_exponent::<f64>(&w))
                    .map(|fit| fit.gamma);
                (self.manifest.entries()[i].clone(), r)
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct SampleOutcome {
    pub entry: ManifestEntry,
    pub result: Result<FeatureExtraction<f64>>,
}

pub fn outcomes_to_table(outcomes: &[SampleOutcome], config: &PipelineConfig) -> FeatureTable {
    FeatureTable {
        config: config.echo(),
        rows: outcomes
            .iter()
            .map(|o| match &o.result {
                Ok(x) => FeatureRow::from_features(o.entry.label.clone(), &x.features),
                Err(e) => FeatureRow::failed(o.entry.id.clone(), o.entry.label.clone(), config.m, e),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub control_fraction: f64,
    pub seed: u64,
    pub iterations: usize,
    pub sampling: Sampling,
    pub mode: BootstrapMode,
    pub midpoint: MidpointMode,
    pub lda: LdaOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            control_fraction: 0.5,
            seed: 0,
            iterations: 200,
            sampling: Sampling::WithoutReplacement,
            mode: BootstrapMode::Retrain,
            midpoint: MidpointMode::Mean,
            lda: LdaOptions::default().with_labels("novel", "news"),
        }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.control_fraction > 0.0 && self.control_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "control fraction must lie in (0, 1), got {}",
                self.control_fraction
            )));
        }
        if self.iterations < 2 {
            return Err(Error::InvalidParameter("bootstrap needs at least 2 iterations".into()));
        }
        if self.lda.ridge.is_nan() || self.lda.ridge < 0.0 {
            return Err(Error::InvalidParameter("ridge must be non-negative".into()));
        }
        Ok(())
    }
}

/// One control/evaluation split plus the bootstrap over the whole pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: DiscriminantModel<f64>,
    /// Accuracy on the samples the model was trained on.
    pub training: Evaluation<f64>,
    /// Accuracy on the held-out samples.
    pub held_out: Evaluation<f64>,
    pub bootstrap: BootstrapReport<f64>,
    /// Usable samples per category.
    pub pool_sizes: [usize; 2],
    pub options: EvalOptions,
}

fn split_pool<'a>(pool: &'a [Vec<f64>], n_control: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<&'a Vec<f64>>) {
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    idx.shuffle(rng);
    let control = idx[..n_control].iter().map(|&i| pool[i].clone()).collect();
    let eval = idx[n_control..].iter().map(|&i| &pool[i]).collect();
    (control, eval)
}

/// Trains on a seeded control split, reports training and held-out accuracy,
/// and bootstraps `iterations` resampled control sets of
/// `floor(control_fraction · min(n1, n2))` samples per category.
pub fn evaluate_groups(pool1: &[Vec<f64>], pool2: &[Vec<f64>], options: &EvalOptions) -> Result<EvalReport> {
    options.validate()?;
    let labels = &options.lda.labels;
    let n_min = pool1.len().min(pool2.len());
    let subset = (options.control_fraction * n_min as f64).floor() as usize;
    if subset == 0 || subset >= n_min {
        let (label, count) = if pool1.len() <= pool2.len() {
            (&labels[0], pool1.len())
        } else {
            (&labels[1], pool2.len())
        };
        return Err(Error::CategoryTooSmall {
            label: label.clone(),
            count,
            fraction: options.control_fraction,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let (c1, e1) = split_pool(pool1, subset, &mut rng);
    let (c2, e2) = split_pool(pool2, subset, &mut rng);
    let mut model = train_discriminant(&c1, &c2, &options.lda)?;
    if options.midpoint != MidpointMode::Mean {
        let w = midpoint_variant(&model, options.midpoint, &c1, &c2)?;
        model = model.with_midpoint(w);
    }
    let tag = |g: Vec<&Vec<f64>>, label: &String| -> Vec<(Vec<f64>, String)> {
        g.into_iter().map(|x| (x.clone(), label.clone())).collect()
    };
    let training: Vec<_> = tag(c1.iter().collect(), &labels[0])
        .into_iter()
        .chain(tag(c2.iter().collect(), &labels[1]))
        .collect();
    let held: Vec<_> = tag(e1, &labels[0]).into_iter().chain(tag(e2, &labels[1])).collect();

    let boot = BootstrapOptions {
        subset_size: subset,
        iterations: options.iterations,
        seed: options.seed,
        sampling: options.sampling,
        mode: options.mode,
        midpoint: options.midpoint,
        lda: options.lda.clone(),
    };
    Ok(EvalReport {
        training: evaluate(&model, &training)?,
        held_out: evaluate(&model, &held)?,
        bootstrap: bootstrap_accuracy(pool1, pool2, &boot)?,
        model,
        pool_sizes: [pool1.len(), pool2.len()],
        options: options.clone(),
    })
}

/// [`evaluate_groups`] on the usable rows of a feature table.
pub fn evaluate_table(table: &FeatureTable, columns: &[FeatureColumn], options: &EvalOptions) -> Result<EvalReport> {
    let labels = &options.lda.labels;
    evaluate_groups(&table.group(&labels[0], columns), &table.group(&labels[1], columns), options)
}

/// One row of a sweep table; `report` is `Err` when that setting failed.
#[derive(Debug)]
pub struct SweepPoint {
    pub value: usize,
    pub failed_samples: usize,
    pub report: Result<EvalReport>,
}

fn sweep<F>(corpus: &Corpus, values: &[usize], base: &PipelineConfig, columns: &[FeatureColumn], options: &EvalOptions, set: F) -> Result<Vec<SweepPoint>>
where
    F: Fn(&mut PipelineConfig, usize),
{
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    options.validate()?;
    values
        .iter()
        .map(|&v| {
            let mut config = base.clone();
            set(&mut config, v);
            let table = corpus.feature_table(&config)?;
            let failed_samples = table.rows.iter().filter(|r| r.error.is_some()).count();
            let report = evaluate_table(&table, columns, options);
            if let Err(e) = &report {
                log::warn!("sweep value {v}: {e}");
            }
            Ok(SweepPoint {
                value: v,
                failed_samples,
                report,
            })
        })
        .collect()
}

/// Accuracy as a function of the word distance `m`.
pub fn sweep_m(corpus: &Corpus, ms: &[usize], base: &PipelineConfig, columns: &[FeatureColumn], options: &EvalOptions) -> Result<Vec<SweepPoint>> {
    if ms.contains(&0) {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    sweep(corpus, ms, base, columns, options, |c, m| c.m = m)
}

/// Accuracy as a function of the window length `N_words`.
pub fn sweep_length(corpus: &Corpus, lengths: &[usize], base: &PipelineConfig, columns: &[FeatureColumn], options: &EvalOptions) -> Result<Vec<SweepPoint>> {
    if lengths.contains(&0) {
        return Err(Error::InvalidParameter("window length must be at least 1".into()));
    }
    sweep(corpus, lengths, base, columns, options, |c, n| c.window = n)
}

/// CSV for plotting: one row per sweep value.
pub fn sweep_csv(parameter: &str, points: &[SweepPoint], echo: &[(String, String)], labels: &[String; 2]) -> Result<String> {
    let mut out = String::new();
    for (k, v) in echo {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![parameter.to_owned()];
    for l in labels {
        header.push(format!("{l}_accuracy"));
        header.push(format!("{l}_error"));
        header.push(format!("{l}_held_out"));
    }
    header.extend(["n_pool1", "n_pool2", "failed_samples", "failed_iterations", "error"].map(String::from));
    w.write_record(&header)?;
    for p in points {
        let mut rec = vec![p.value.to_string()];
        match &p.report {
            Ok(r) => {
                for l in labels {
                    let c = r.bootstrap.category(l);
                    rec.push(c.map_or(String::new(), |c| c.mean.to_string()));
                    rec.push(c.map_or(String::new(), |c| c.error.to_string()));
                    rec.push(r.held_out.accuracy(l).map_or(String::new(), |a| a.to_string()));
                }
                rec.push(r.pool_sizes[0].to_string());
                rec.push(r.pool_sizes[1].to_string());
                rec.push(p.failed_samples.to_string());
                rec.push(r.bootstrap.failed_iterations.to_string());
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 3 * labels.len() + 2));
                rec.push(p.failed_samples.to_string());
                rec.push(String::new());
                rec.push(e.to_string());
            }
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<sweep table>", e.into_error()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}

/// The Zipf-exponent baseline under both midpoint rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfBaseline {
    pub exponents: Vec<ZipfSample>,
    pub mean_midpoint: EvalReport,
    pub median_midpoint: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfSample {
    pub id: String,
    pub label: String,
    pub exponent: Option<f64>,
    pub error: Option<String>,
}

pub fn zipf_baseline(corpus: &Corpus, window: usize, placement: WindowPlacement, options: &EvalOptions) -> Result<ZipfBaseline> {
    let raw = corpus.zipf_exponents(window, placement);
    let labels = &options.lda.labels;
    let pool = |label: &String| -> Vec<Vec<f64>> {
        raw.iter()
            .filter(|(e, _)| &e.label == label)
            .filter_map(|(_, r)| r.as_ref().ok().map(|&g| vec![g]))
            .collect()
    };
    let (p1, p2) = (pool(&labels[0]), pool(&labels[1]));
    let with = |midpoint| EvalOptions {
        midpoint,
        ..options.clone()
    };
    Ok(ZipfBaseline {
        mean_midpoint: evaluate_groups(&p1, &p2, &with(MidpointMode::Mean))?,
        median_midpoint: evaluate_groups(&p1, &p2, &with(MidpointMode::Median))?,
        exponents: raw
            .into_iter()
            .map(|(e, r)| ZipfSample {
                id: e.id,
                label: e.label,
                exponent: r.as_ref().ok().copied(),
                error: r.err().map(|e| e.to_string()),
            })
            .collect(),
    })
}
