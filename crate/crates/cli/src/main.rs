//! CLI for the cause-effect pair toolkit: feature extraction, ensemble
//! training and prediction over the challenge CSV formats, bidirectional AUC
//! evaluation, cross-validation, and synthetic dataset generation.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use paircause_core::cv::kfold_cv;
use paircause_core::ensemble::{augmented_features, train_on_matrix, EnsembleModel, TrainConfig};
use paircause_core::features::extract_batch;
use paircause_core::gbm::GbmConfig;
use paircause_core::io;
use paircause_core::metrics::{bidirectional_auc, join_by_id, Prediction};
use paircause_core::preprocess::QuantizerConfig;
use paircause_core::synth::{generate_synthetic, SynthConfig};

#[derive(Parser)]
#[command(
    name = "paircause",
    version,
    about = "Cause-effect pair classification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Pairs CSV (SampleID,A,B with quoted space-separated values)
    #[arg(long)]
    pairs: PathBuf,
    /// Public info CSV (SampleID,A type,B type)
    #[arg(long)]
    publicinfo: PathBuf,
}

#[derive(Args)]
struct GbmArgs {
    /// Boosting stages per model
    #[arg(long, default_value_t = 500)]
    stages: usize,
    /// Maximum tree depth
    #[arg(long, default_value_t = 9)]
    depth: usize,
    /// Shrinkage applied to each tree
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    /// Random seed (fold assignment; other steps are deterministic)
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GbmArgs {
    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            quantizer: QuantizerConfig::default(),
            gbm: GbmConfig {
                n_stages: self.stages,
                max_depth: self.depth,
                learning_rate: self.learning_rate,
                ..GbmConfig::default()
            },
            weights: [1.0 / 3.0; 3],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the three-scheme ensemble on labeled pairs
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Target CSV (SampleID,Target)
        #[arg(long)]
        target: PathBuf,
        /// Where to write the trained model (JSON)
        #[arg(long)]
        model_out: PathBuf,
        #[command(flatten)]
        gbm: GbmArgs,
    },
    /// Score pairs with a trained model; writes SampleID,Target predictions
    Predict {
        #[command(flatten)]
        data: DataArgs,
        /// Trained model file
        #[arg(long)]
        model: PathBuf,
        /// Output predictions CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the 43 features per pair to CSV
    Extract {
        #[command(flatten)]
        data: DataArgs,
        /// Output features CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Bidirectional AUC of predictions against ground truth
    Evaluate {
        /// Predictions CSV (SampleID,Target score)
        #[arg(long)]
        predictions: PathBuf,
        /// Target CSV (SampleID,Target in {-1,0,1})
        #[arg(long)]
        target: PathBuf,
    },
    /// Stratified k-fold cross-validation on labeled pairs
    Cv {
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        gbm: GbmArgs,
    },
    /// Generate a synthetic labeled dataset (writes <prefix>_pairs.csv,
    /// <prefix>_publicinfo.csv, <prefix>_target.csv)
    Synth {
        /// Output path prefix
        #[arg(long)]
        out_prefix: String,
        /// Number of pairs
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Samples per pair
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0.4)]
        frac_causal: f64,
        #[arg(long, default_value_t = 0.4)]
        frac_anticausal: f64,
        #[arg(long, default_value_t = 0.1)]
        frac_independent: f64,
        #[arg(long, default_value_t = 0.1)]
        frac_confounded: f64,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train {
            data,
            target,
            model_out,
            gbm,
        } => {
            let ds = io::load_labeled_dataset(&data.pairs, &data.publicinfo, &target)?;
            let cfg = gbm.train_config();
            eprintln!(
                "training on {} pairs ({} augmented rows)",
                ds.len(),
                ds.len() * 2
            );
            let (features, labels) = augmented_features(&ds, &cfg.quantizer)?;
            let model = train_on_matrix(&features, &labels, &cfg)?;
            let y1: Vec<usize> = labels.iter().map(|l| l.class_index()).collect();
            let deviance = model.scheme1.staged_deviance(&features, &y1)?;
            if let (Some(first), Some(last)) = (deviance.first(), deviance.last()) {
                println!(
                    "ternary model training deviance: {first:.5} after stage 1, {last:.5} after stage {}",
                    deviance.len()
                );
            }
            model.save(&model_out)?;
            println!("model written to {}", model_out.display());
        }
        Command::Predict { data, model, out } => {
            let (pairs, _) = io::load_dataset(&data.pairs, &data.publicinfo, None)?;
            let model = EnsembleModel::load(&model)?;
            let features = extract_batch(&pairs, &model.quantizer)?;
            let scores = model.score_matrix(&features)?;
            let preds: Vec<Prediction> = pairs
                .iter()
                .zip(&scores)
                .map(|(p, &score)| Prediction {
                    id: p.id.clone(),
                    score,
                })
                .collect();
            io::write_predictions_file(&out, &preds)?;
            println!("{} predictions written to {}", preds.len(), out.display());
        }
        Command::Extract { data, out } => {
            let (pairs, _) = io::load_dataset(&data.pairs, &data.publicinfo, None)?;
            let features = extract_batch(&pairs, &QuantizerConfig::default())?;
            io::write_features_file(&out, &features)?;
            println!(
                "{} feature rows written to {}",
                features.n_rows(),
                out.display()
            );
        }
        Command::Evaluate {
            predictions,
            target,
        } => {
            let preds = io::read_predictions_file(&predictions)?;
            let targets = io::read_target_file(&target)?;
            let (scores, labels) = join_by_id(&preds, &targets)?;
            let auc = bidirectional_auc(&scores, &labels)?;
            println!("forward AUC (+1 vs rest):  {:.5}", auc.forward);
            println!("backward AUC (-1 vs rest): {:.5}", auc.backward);
            println!("bidirectional AUC:         {:.5}", auc.mean);
        }
        Command::Cv {
            folds,
            data,
            target,
            gbm,
        } => {
            let ds = io::load_labeled_dataset(&data.pairs, &data.publicinfo, &target)?;
            let cfg = gbm.train_config();
            let report = kfold_cv(&ds, folds, &cfg, gbm.seed, None)?;
            for (i, fold) in report.folds.iter().enumerate() {
                println!(
                    "fold {:2}: bidirectional AUC {:.5} (fwd {:.5}, bwd {:.5}, {} test pairs)",
                    i + 1,
                    fold.combined.mean,
                    fold.combined.forward,
                    fold.combined.backward,
                    fold.test_size
                );
            }
            for (s, auc) in report.mean_schemes.iter().enumerate() {
                println!("scheme {} mean bidirectional AUC: {:.5}", s + 1, auc.mean);
            }
            println!(
                "combined mean bidirectional AUC: {:.5}",
                report.mean_combined.mean
            );
        }
        Command::Synth {
            out_prefix,
            n,
            seed,
            samples,
            frac_causal,
            frac_anticausal,
            frac_independent,
            frac_confounded,
        } => {
            let cfg = SynthConfig {
                n_pairs: n,
                frac_causal,
                frac_anticausal,
                frac_independent,
                frac_confounded,
                samples_min: samples,
                samples_max: samples,
                seed,
                ..SynthConfig::default()
            };
            let ds = generate_synthetic(&cfg)?;
            let pairs_path = PathBuf::from(format!("{out_prefix}_pairs.csv"));
            let info_path = PathBuf::from(format!("{out_prefix}_publicinfo.csv"));
            let target_path = PathBuf::from(format!("{out_prefix}_target.csv"));
            io::write_pairs_file(&pairs_path, &ds.pairs)?;
            io::write_publicinfo_file(&info_path, &ds.pairs)?;
            io::write_target_file(&target_path, &ds.pairs, &ds.labels)?;
            println!(
                "wrote {} pairs to {}, {}, {}",
                ds.len(),
                pairs_path.display(),
                info_path.display(),
                target_path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("command failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
