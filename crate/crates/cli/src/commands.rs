use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use tweetiment::eval::{baseline_report, corpus_stats, evaluate};
use tweetiment::features::{
    bigram_distribution, rank_frequency, unigram_distribution, write_rank_frequency, FeatureMode,
    DEFAULT_BIGRAMS, DEFAULT_UNIGRAMS,
};
use tweetiment::io::dataset::{LabeledReader, UnlabeledReader};
use tweetiment::io::split::{DEFAULT_RATIO, DEFAULT_SEED};
use tweetiment::io::{
    deserialize_model, parse_normalized_csv, serialize_model, split_dataset, write_labeled_csv,
    write_normalized_csv, write_predictions, write_unlabeled_csv, Config, CsvOptions,
    ModelArtifact, NormalizedRecord,
};
use tweetiment::models::naive_bayes::DEFAULT_ALPHA;
use tweetiment::models::{OpinionLexicon, Sentiment, TrainerAlgorithm, TrainerConfig};
use tweetiment::{train_artifact, Classifier, EmoticonTable, NormalizedTweet, Normalizer, TrainOptions};

use crate::error::CliError;
use crate::{
    Cli, Command, EvalArgs, InputArgs, ModelChoice, PredictArgs, PreprocessArgs, SplitArgs,
    StatsArgs, TrainArgs,
};

/// Settings shared by every subcommand.
struct Context {
    config: Config,
    normalizer: Normalizer,
    csv: CsvOptions,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::from_env()?,
    };
    let emoticons = match cli.emoticons.as_deref() {
        Some([pos, neg]) => EmoticonTable::load(pos, neg)?,
        _ => EmoticonTable::default(),
    };
    let ctx = Context {
        config,
        normalizer: Normalizer::new(emoticons),
        csv: CsvOptions { lenient: cli.lenient },
    };
    match cli.command {
        Command::Preprocess(args) => preprocess(&ctx, args),
        Command::Stats(args) => stats(&ctx, args),
        Command::Train(args) => train(&ctx, args),
        Command::Predict(args) => predict(&ctx, args),
        Command::Eval(args) => eval(&ctx, args),
        Command::Split(args) => split(&ctx, args),
    }
}

fn open_input(path: &Path) -> Result<Box<dyn Read>, CliError> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path).map_err(|e| CliError::data(path.display(), e))?;
    Ok(Box::new(BufReader::new(file)))
}

fn create_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::data(path.display(), e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

fn write_failed(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::data(path.map_or("stdout".into(), |p| p.display().to_string()), e)
}

struct Row {
    id: u64,
    label: Option<Sentiment>,
    tweet: NormalizedTweet,
}

/// Reads raw or preprocessed rows, normalizing raw text on the way in.
fn load_rows(ctx: &Context, input: &InputArgs, labeled: bool) -> Result<Vec<Row>, CliError> {
    let source = open_input(&input.input)?;
    let context = input.input.display();
    if input.normalized {
        let records = parse_normalized_csv(source).map_err(|e| CliError::data(&context, e))?;
        return records
            .into_iter()
            .map(|r| match (labeled, r.sentiment) {
                (true, None) => Err(CliError::Data(format!(
                    "{context}: tweet {} has no sentiment label",
                    r.tweet_id
                ))),
                _ => Ok(Row { id: r.tweet_id, label: r.sentiment, tweet: r.tweet }),
            })
            .collect();
    }
    let rows = if labeled {
        LabeledReader::new(source, ctx.csv)
            .map(|r| {
                r.map(|r| Row {
                    id: r.tweet_id,
                    label: Some(r.sentiment),
                    tweet: ctx.normalizer.normalize(&r.text),
                })
            })
            .collect::<Result<Vec<_>, _>>()
    } else {
        UnlabeledReader::new(source, ctx.csv)
            .map(|r| {
                r.map(|r| Row { id: r.tweet_id, label: None, tweet: ctx.normalizer.normalize(&r.text) })
            })
            .collect()
    };
    rows.map_err(|e| CliError::data(&context, e))
}

fn labeled_corpus(rows: Vec<Row>) -> Vec<(NormalizedTweet, Sentiment)> {
    rows.into_iter()
        .map(|r| (r.tweet, r.label.expect("labeled rows carry a sentiment")))
        .collect()
}

fn load_lexicon(paths: &[PathBuf]) -> Result<OpinionLexicon, CliError> {
    match paths {
        [pos, neg] => Ok(OpinionLexicon::load(pos, neg)?),
        _ => Err(CliError::Usage("a lexicon needs exactly two files: POS NEG".into())),
    }
}

fn load_model(path: &Path) -> Result<ModelArtifact, CliError> {
    let file = File::open(path).map_err(|e| CliError::data(path.display(), e))?;
    deserialize_model(BufReader::new(file))
        .map_err(|e| CliError::ModelFormat(format!("{}: {e}", path.display())))
}

fn preprocess(ctx: &Context, args: PreprocessArgs) -> Result<(), CliError> {
    let input = InputArgs { input: args.input, normalized: false };
    let records: Vec<NormalizedRecord> = load_rows(ctx, &input, !args.unlabeled)?
        .into_iter()
        .map(|r| NormalizedRecord { tweet_id: r.id, sentiment: r.label, tweet: r.tweet })
        .collect();
    let sink = create_output(args.output.as_deref())?;
    write_normalized_csv(&records, sink)?;
    eprintln!("normalized {} tweets", records.len());
    Ok(())
}

fn stats(ctx: &Context, args: StatsArgs) -> Result<(), CliError> {
    let rows = load_rows(ctx, &args.input, !args.unlabeled)?;
    let stats = corpus_stats(rows.iter().map(|r| (&r.tweet, r.label)));
    println!("{stats}");
    if let Some(path) = &args.report_csv {
        stats
            .write_csv(create_output(Some(path))?)
            .map_err(|e| CliError::data(path.display(), e))?;
    }
    if let Some(path) = &args.unigram_ranks {
        let ranks = rank_frequency(&unigram_distribution(rows.iter().map(|r| &r.tweet)));
        write_rank_frequency(&ranks, create_output(Some(path))?)
            .map_err(|e| CliError::data(path.display(), e))?;
    }
    if let Some(path) = &args.bigram_ranks {
        let ranks = rank_frequency(&bigram_distribution(rows.iter().map(|r| &r.tweet)));
        write_rank_frequency(&ranks, create_output(Some(path))?)
            .map_err(|e| CliError::data(path.display(), e))?;
    }
    Ok(())
}

fn resolve_model(ctx: &Context, explicit: Option<ModelChoice>) -> Result<ModelChoice, CliError> {
    if let Some(choice) = explicit {
        return Ok(choice);
    }
    match ctx.config.raw("model") {
        None => Ok(ModelChoice::Nb),
        Some(value) => ModelChoice::from_str(value, true)
            .map_err(|_| CliError::Usage(format!("config key `model`: unknown model `{value}`"))),
    }
}

fn train(ctx: &Context, args: TrainArgs) -> Result<(), CliError> {
    let config = &ctx.config;
    let model = resolve_model(ctx, args.model)?;
    let classifier = match model {
        ModelChoice::Nb => Classifier::NaiveBayes {
            alpha: config.resolve(args.alpha, "alpha", DEFAULT_ALPHA)?,
        },
        ModelChoice::Maxent => Classifier::MaxEnt(TrainerConfig::new(
            config.resolve(args.trainer, "trainer", TrainerAlgorithm::default())?,
            config.resolve(args.max_iter, "max_iter", TrainerConfig::DEFAULT_MAX_ITERATIONS)?,
            config.resolve(args.tol, "tol", TrainerConfig::DEFAULT_LL_TOLERANCE)?,
        )?),
        ModelChoice::Baseline => {
            let paths = args
                .lexicon
                .as_deref()
                .ok_or_else(|| CliError::Usage("--model baseline requires --lexicon POS NEG".into()))?;
            Classifier::Baseline(load_lexicon(paths)?)
        }
    };
    if args.lexicon.is_some() && model != ModelChoice::Baseline {
        return Err(CliError::Usage("--lexicon only applies to --model baseline".into()));
    }
    let options = TrainOptions {
        classifier,
        features: config.resolve(args.features, "features", FeatureMode::default())?,
        unigrams: config.resolve(args.unigrams, "unigrams", DEFAULT_UNIGRAMS)?,
        bigrams: config.resolve(args.bigrams, "bigrams", DEFAULT_BIGRAMS)?,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    let corpus = labeled_corpus(load_rows(ctx, &args.input, true)?);
    let artifact = train_artifact(&corpus, &options)?;

    let mut sink = create_output(Some(&args.output))?;
    serialize_model(&artifact, &mut sink)
        .and_then(|()| sink.flush())
        .map_err(write_failed(Some(&args.output)))?;
    eprintln!(
        "trained {} on {} tweets ({} unigrams, {} bigrams, {} features) -> {}",
        artifact.kind(),
        corpus.len(),
        artifact.vocabulary.num_unigrams(),
        artifact.vocabulary.num_bigrams(),
        options.features,
        args.output.display()
    );
    Ok(())
}

fn predict(ctx: &Context, args: PredictArgs) -> Result<(), CliError> {
    let artifact = load_model(&args.model)?;
    let rows = load_rows(ctx, &args.input, false)?;
    let predictions: Vec<(u64, Sentiment)> =
        rows.iter().map(|r| (r.id, artifact.predict(&r.tweet))).collect();
    let sink = create_output(args.output.as_deref())?;
    write_predictions(&predictions, sink)?;
    Ok(())
}

fn eval(ctx: &Context, args: EvalArgs) -> Result<(), CliError> {
    let artifact = load_model(&args.model)?;
    let corpus = labeled_corpus(load_rows(ctx, &args.input, true)?);
    let predictions: Vec<Sentiment> = corpus.iter().map(|(t, _)| artifact.predict(t)).collect();
    let report = match args.baseline_lexicon.as_deref() {
        Some(paths) => baseline_report(&corpus, &load_lexicon(paths)?, &predictions),
        None => {
            let gold: Vec<Sentiment> = corpus.iter().map(|(_, s)| *s).collect();
            evaluate(&predictions, &gold)
        }
    }
    .map_err(|e| CliError::data(args.input.input.display(), e))?
    .with_model_name(artifact.kind().as_str());
    println!("{report}");
    if let Some(path) = &args.report_csv {
        report
            .write_csv(create_output(Some(path))?)
            .map_err(|e| CliError::data(path.display(), e))?;
    }
    Ok(())
}

fn split(ctx: &Context, args: SplitArgs) -> Result<(), CliError> {
    let ratio = ctx.config.resolve(args.ratio, "ratio", DEFAULT_RATIO)?;
    let seed = ctx.config.resolve(args.seed, "seed", DEFAULT_SEED)?;
    let source = open_input(&args.input)?;
    let context = args.input.display();
    let (n_train, n_test) = if args.unlabeled {
        let records = UnlabeledReader::new(source, ctx.csv)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::data(&context, e))?;
        let (train, test) = split_dataset(records, ratio, seed)?;
        write_unlabeled_csv(&train, create_output(Some(&args.train))?)?;
        write_unlabeled_csv(&test, create_output(Some(&args.test))?)?;
        (train.len(), test.len())
    } else {
        let records = LabeledReader::new(source, ctx.csv)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::data(&context, e))?;
        let (train, test) = split_dataset(records, ratio, seed)?;
        write_labeled_csv(&train, create_output(Some(&args.train))?)?;
        write_labeled_csv(&test, create_output(Some(&args.test))?)?;
        (train.len(), test.len())
    };
    eprintln!("split {} records: {n_train} train, {n_test} test (seed {seed})", n_train + n_test);
    Ok(())
}
