use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use storynet::classify::{BootstrapMode, LdaOptions, MidpointMode, Sampling};
use storynet::corpus::WindowPlacement;
use storynet::experiment::{EvalOptions, PipelineConfig};
use storynet::fitting::{FeatureOptions, SplitBasis, DEFAULT_MIN_FIT_POINTS};
use storynet::table::FeatureColumn;
use storynet::tokenize::LemmatizerKind;
use storynet::Error;

/// Fiction-versus-news classification from word co-occurrence networks.
#[derive(Debug, Parser)]
#[command(name = "storynet", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the network of one text file and write its edge list.
    BuildNet {
        /// Plain-text input.
        text: PathBuf,
    },
    /// Extract (γ1, γ2, γ3) for every manifest sample into a feature CSV.
    Features,
    /// Train a discriminant on a feature CSV and write the model JSON.
    Train(TableArgs),
    /// Label every row of a feature CSV with a trained model.
    Classify {
        /// Feature CSV to label.
        table: PathBuf,
        /// Model JSON written by `train`.
        #[arg(long)]
        model: PathBuf,
    },
    /// Training and held-out accuracy plus bootstrap error bars.
    Eval(TableArgs),
    /// Bootstrap accuracy as a function of the word distance m.
    SweepM(SweepArgs),
    /// Bootstrap accuracy as a function of the window length.
    SweepLength(SweepArgs),
    /// Zipf-exponent baseline next to the network-feature classifier.
    BaselineZipf,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Feature CSV; features are extracted from --manifest when omitted.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Midpoint {
    Mean,
    Median,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSONL corpus manifest.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Word distance: positions up to m apart are linked.
    #[arg(long, global = true, default_value_t = 4)]
    pub m: usize,
    /// Words per sample window.
    #[arg(long, global = true, default_value_t = 500)]
    pub window: usize,
    /// N in the √N split between the two degree regions.
    #[arg(long, global = true, default_value_t = SplitBasis::Words)]
    pub split_basis: SplitBasis,
    #[arg(long, global = true, default_value_t = LemmatizerKind::Stemmer)]
    pub lemmatizer: LemmatizerKind,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Per-category fraction of the pool used as the control set.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub control_fraction: f64,
    /// Bootstrap iterations.
    #[arg(long, global = true, default_value_t = 200)]
    pub iterations: usize,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Machine-readable output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for per-sample P(k) and C(k) series (features only).
    #[arg(long, global = true)]
    pub dump_distributions: Option<PathBuf>,
    /// Place each window at a seeded random offset instead of the start.
    #[arg(long, global = true)]
    pub random_offset: bool,
    /// λ added to the pooled covariance diagonal.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub ridge: f64,
    /// Feature columns, e.g. gamma1,gamma2,gamma3,l.
    #[arg(long, global = true, default_value = "gamma1,gamma2,gamma3")]
    pub features: String,
    /// P(k) bin width; 2m when omitted.
    #[arg(long, global = true)]
    pub bin_width: Option<usize>,
    /// Fail a sample instead of narrowing its bins.
    #[arg(long, global = true)]
    pub no_shrink_bins: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_MIN_FIT_POINTS)]
    pub min_fit_points: usize,
    /// Also compute the mean geodesic distance l.
    #[arg(long, global = true)]
    pub with_geodesic: bool,
    #[arg(long, global = true, value_enum, default_value_t = Midpoint::Mean)]
    pub midpoint: Midpoint,
    /// Classical bootstrap with out-of-bag evaluation.
    #[arg(long, global = true)]
    pub with_replacement: bool,
    /// Train once and resample only the evaluation set.
    #[arg(long, global = true)]
    pub evaluate_only: bool,
    /// Category labels, first then second.
    #[arg(long, global = true, default_value = "novel,news")]
    pub categories: String,
    /// More logging; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl GlobalArgs {
    pub fn pipeline(&self) -> Result<PipelineConfig, Error> {
        let cfg = PipelineConfig {
            m: self.m,
            window: self.window,
            placement: if self.random_offset {
                WindowPlacement::Random(self.seed)
            } else {
                WindowPlacement::Start
            },
            lemmatizer: self.lemmatizer,
            features: FeatureOptions {
                split_basis: self.split_basis,
                bin_width: self.bin_width,
                shrink_bins: !self.no_shrink_bins,
                min_fit_points: self.min_fit_points,
                with_geodesic: self.with_geodesic || self.columns()?.contains(&FeatureColumn::L),
            },
        };
        cfg.validate()?;
        if self.bin_width == Some(0) {
            return Err(Error::InvalidParameter("bin width must be at least 1".into()));
        }
        if self.min_fit_points < 2 {
            return Err(Error::InvalidParameter("a fit needs at least 2 points".into()));
        }
        Ok(cfg)
    }

    pub fn categories(&self) -> Result<[String; 2], Error> {
        let parts: Vec<&str> = self.categories.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() && a != b => Ok([a.to_string(), b.to_string()]),
            _ => Err(Error::InvalidParameter(format!(
                "--categories needs two distinct labels, got {:?}",
                self.categories
            ))),
        }
    }

    pub fn columns(&self) -> Result<Vec<FeatureColumn>, Error> {
        FeatureColumn::parse_list(&self.features)
    }

    pub fn eval_options(&self) -> Result<EvalOptions, Error> {
        let [a, b] = self.categories()?;
        let opts = EvalOptions {
            control_fraction: self.control_fraction,
            seed: self.seed,
            iterations: self.iterations,
            sampling: if self.with_replacement {
                Sampling::WithReplacement
            } else {
                Sampling::WithoutReplacement
            },
            mode: if self.evaluate_only {
                BootstrapMode::EvaluateOnly
            } else {
                BootstrapMode::Retrain
            },
            midpoint: match self.midpoint {
                Midpoint::Mean => MidpointMode::Mean,
                Midpoint::Median => MidpointMode::Median,
            },
            lda: LdaOptions {
                ridge: self.ridge,
                ..LdaOptions::default()
            }
            .with_labels(a, b),
        };
        opts.validate()?;
        Ok(opts)
    }

    /// `(key, value)` pairs of the evaluation settings.
    pub fn eval_echo(&self, opts: &EvalOptions, columns: &[FeatureColumn]) -> Vec<(String, String)> {
        let names: Vec<&str> = columns.iter().map(|c| c.name()).collect();
        vec![
            ("features".into(), names.join(",")),
            ("categories".into(), opts.lda.labels.join(",")),
            ("seed".into(), opts.seed.to_string()),
            ("control_fraction".into(), opts.control_fraction.to_string()),
            ("iterations".into(), opts.iterations.to_string()),
            ("sampling".into(), enum_name(&opts.sampling)),
            ("bootstrap_mode".into(), enum_name(&opts.mode)),
            ("midpoint".into(), enum_name(&opts.midpoint)),
            ("ridge".into(), opts.lda.ridge.to_string()),
        ]
    }
}

fn enum_name<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_owned))
        .unwrap_or_default()
}
