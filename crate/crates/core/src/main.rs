use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use iconicity::assign::{assign_batch, render_records, AssignmentRecord, Target};
use iconicity::config::PipelineConfig;
use iconicity::corpus::{load_corpus, parse_embeddings, save_corpus, Corpus, GestureRecord};
use iconicity::eval::{parse_manual, score, DEFAULT_TOLERANCE};
use iconicity::grammar::{parse_expression, render_expression, Alphabets};
use iconicity::keypoint::{normalize, parse_sequence};
use iconicity::neighbors::rank_all;
use iconicity::sublexical::extract_profile;
use iconicity::wordvec::load_table;

#[derive(Parser)]
#[command(name = "iconicity", version, about = "Assign iconicity ratings to new gestures from a rated corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract sub-lexical profiles from gesture keypoint files into an unrated corpus file.
    Extract {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Assign ratings to every record of a targets file.
    Assign {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        wordvec: Option<PathBuf>,
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare assigned ratings with manual ratings.
    Evaluate {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        manual: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the ranked neighbor lists of each target.
    Neighbors {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        targets: PathBuf,
        /// Only this target.
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Replace corpus descriptors with externally computed embeddings.
    ImportEmbeddings {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge records into a corpus, optionally attaching ratings.
    AddRecords {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        records: PathBuf,
        /// `gesture_id rating` lines applied to the added records.
        #[arg(long)]
        ratings: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a gesture expression such as `h1 b0 m2 h3 b1 | empty`.
    CheckExpression {
        expression: String,
        #[arg(long)]
        alphabets: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn pick_path(flag: Option<PathBuf>, from_config: Option<&PathBuf>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| from_config.cloned())
        .ok_or_else(|| anyhow!("no {what} path: pass --{what} or set {what}_path in the config"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Extract { files, out, config } => cmd_extract(&files, &out, config.as_deref()),
        Command::Assign { corpus, wordvec, targets, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let corpus_path = pick_path(corpus, cfg.corpus_path.as_ref(), "corpus")?;
            let wordvec_path = pick_path(wordvec, cfg.wordvec_path.as_ref(), "wordvec")?;
            let corpus = load_corpus(&corpus_path)?;
            let table = load_table(&wordvec_path)?;
            let targets = load_corpus(&targets)?;
            let targets: Vec<Target> = targets.records().map(Target::from).collect();
            let results = assign_batch(&targets, &corpus, &table, &cfg.assign_config());
            let records: Vec<AssignmentRecord> =
                targets.iter().zip(&results).map(|(t, (_, r))| AssignmentRecord::new(t, r)).collect();
            write_file(&out, &render_records(&records))?;
            let failed: Vec<_> = results.iter().filter_map(|(id, r)| r.as_ref().err().map(|e| (id, e))).collect();
            for (id, e) in &failed {
                eprintln!("{id}: {e}");
            }
            Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Evaluate { assignments, manual, tolerance, json } => {
            let text =
                std::fs::read_to_string(&assignments).with_context(|| format!("reading {}", assignments.display()))?;
            let records: Vec<AssignmentRecord> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", assignments.display()))?;
            let manual_text =
                std::fs::read_to_string(&manual).with_context(|| format!("reading {}", manual.display()))?;
            let manual = parse_manual(&manual_text)?;
            let report = score(&records, &manual, tolerance)?;
            print!("{}", report.render_table());
            if let Some(p) = json {
                write_file(&p, &report.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Neighbors { corpus, targets, id, config } => {
            let cfg = load_config(config.as_deref())?;
            let corpus = load_corpus(&pick_path(corpus, cfg.corpus_path.as_ref(), "corpus")?)?;
            let targets = load_corpus(&targets)?;
            let rounds = cfg.round_config();
            let mut out = Vec::new();
            for t in targets.records().filter(|t| id.as_deref().is_none_or(|i| i == t.id)) {
                let lists = rank_all(&t.profile, &corpus, &rounds)?;
                out.push(serde_json::json!({ "gesture_id": t.id, "rounds": lists }));
            }
            if let Some(i) = id {
                if out.is_empty() {
                    bail!("no target `{i}`");
                }
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::ImportEmbeddings { corpus, embeddings, out } => {
            let corpus = load_corpus(&corpus)?;
            let text =
                std::fs::read_to_string(&embeddings).with_context(|| format!("reading {}", embeddings.display()))?;
            let updated = corpus.with_embeddings(&parse_embeddings(&text)?)?;
            save_corpus(&updated, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::AddRecords { corpus, records, ratings, out } => {
            let mut base = match corpus {
                Some(p) => load_corpus(&p)?,
                None => Corpus::new(),
            };
            let ratings = match ratings {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    parse_manual(&text)?
                }
                None => Default::default(),
            };
            for r in load_corpus(&records)?.records() {
                let mut r: GestureRecord = r.clone();
                if let Some(&rating) = ratings.get(&r.id) {
                    r.iconicity_rating = Some(rating);
                }
                base = base.add_record(r)?;
            }
            save_corpus(&base, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckExpression { expression, alphabets } => {
            let alphabets = match alphabets {
                Some(p) => Alphabets::load(&p)?,
                None => Alphabets::default(),
            };
            let e = parse_expression(&expression, &alphabets)?;
            println!("{}", render_expression(&e));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_extract(files: &[PathBuf], out: &Path, config: Option<&Path>) -> Result<ExitCode> {
    let cfg = load_config(config)?.extract_config();
    let mut corpus = Corpus::new();
    let mut failures = 0;
    for path in files {
        let result = (|| -> Result<GestureRecord> {
            let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let seq = parse_sequence(&raw)?;
            let profile = extract_profile(&normalize(&seq)?, &cfg)?;
            Ok(GestureRecord {
                id: seq.gesture_id,
                word: seq.word,
                profile,
                iconicity_rating: None,
                source: "keypoints".into(),
            })
        })()
        .and_then(|r| Ok(corpus.add_record(r)?));
        match result {
            Ok(next) => corpus = next,
            Err(e) => {
                failures += 1;
                eprintln!("{}: {e:#}", path.display());
            }
        }
    }
    save_corpus(&corpus, out)?;
    if failures > 0 {
        eprintln!("{failures} of {} files failed", files.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
