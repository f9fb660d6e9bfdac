//! Accuracy reports and corpus statistics.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::features::{extract_bigrams, Bigram};
use crate::models::{baseline_classify, OpinionLexicon, Sentiment};
use crate::normalizer::{NormalizedTweet, SpecialToken};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("nothing to evaluate")]
    Empty,
    #[error("{predictions} predictions for {gold} gold labels")]
    LengthMismatch { predictions: usize, gold: usize },
}

/// 2x2 confusion counts with positive as the reference class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: Sentiment, gold: Sentiment) {
        match (predicted, gold) {
            (Sentiment::Positive, Sentiment::Positive) => self.true_positive += 1,
            (Sentiment::Positive, Sentiment::Negative) => self.false_positive += 1,
            (Sentiment::Negative, Sentiment::Negative) => self.true_negative += 1,
            (Sentiment::Negative, Sentiment::Positive) => self.false_negative += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub model_name: String,
    pub n_docs: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
    pub baseline_accuracy: Option<f64>,
}

impl EvaluationReport {
    pub fn with_model_name(mut self, name: impl Into<String>) -> Self {
        self.model_name = name.into();
        self
    }

    /// Writes the report as a two-column `metric,value` CSV.
    pub fn write_csv<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(["metric", "value"])?;
        let c = &self.confusion;
        let mut rows = vec![
            ("model", self.model_name.clone()),
            ("n_docs", self.n_docs.to_string()),
            ("accuracy", self.accuracy.to_string()),
            ("true_positive", c.true_positive.to_string()),
            ("false_positive", c.false_positive.to_string()),
            ("true_negative", c.true_negative.to_string()),
            ("false_negative", c.false_negative.to_string()),
        ];
        if let Some(baseline) = self.baseline_accuracy {
            rows.push(("baseline_accuracy", baseline.to_string()));
        }
        for (metric, value) in rows {
            writer.write_record([metric, value.as_str()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.confusion;
        writeln!(f, "model      {}", self.model_name)?;
        writeln!(f, "documents  {}", self.n_docs)?;
        writeln!(f, "accuracy   {:.4}", self.accuracy)?;
        if let Some(baseline) = self.baseline_accuracy {
            writeln!(f, "baseline   {baseline:.4}")?;
        }
        writeln!(f)?;
        writeln!(f, "{:<14}{:>10}{:>10}", "gold \\ pred", "positive", "negative")?;
        writeln!(f, "{:<14}{:>10}{:>10}", "positive", c.true_positive, c.false_negative)?;
        write!(f, "{:<14}{:>10}{:>10}", "negative", c.false_positive, c.true_negative)
    }
}

pub fn evaluate(predictions: &[Sentiment], gold: &[Sentiment]) -> Result<EvaluationReport, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut confusion = Confusion::default();
    for (&p, &g) in predictions.iter().zip(gold) {
        confusion.record(p, g);
    }
    Ok(EvaluationReport {
        model_name: String::new(),
        n_docs: gold.len(),
        accuracy: confusion.correct() as f64 / gold.len() as f64,
        confusion,
        baseline_accuracy: None,
    })
}

/// Evaluates `model_predictions` and the lexicon baseline on the same corpus.
pub fn baseline_report(
    corpus: &[(NormalizedTweet, Sentiment)],
    lexicon: &OpinionLexicon,
    model_predictions: &[Sentiment],
) -> Result<EvaluationReport, EvalError> {
    let gold: Vec<Sentiment> = corpus.iter().map(|(_, label)| *label).collect();
    let baseline: Vec<Sentiment> = corpus
        .iter()
        .map(|(tweet, _)| baseline_classify(tweet, lexicon))
        .collect();
    let baseline_accuracy = evaluate(&baseline, &gold)?.accuracy;
    let mut report = evaluate(model_predictions, &gold)?;
    report.baseline_accuracy = Some(baseline_accuracy);
    Ok(report)
}

/// Total, per-tweet average and per-tweet maximum of one count.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CountSummary {
    pub total: u64,
    pub average: f64,
    pub max: u64,
}

impl CountSummary {
    fn from_counts(counts: impl Iterator<Item = u64>, n_tweets: usize) -> CountSummary {
        let (total, max) = counts.fold((0, 0), |(t, m), c| (t + c, m.max(c)));
        CountSummary {
            total,
            average: average(total, n_tweets),
            max,
        }
    }
}

fn average(total: u64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmoticonStats {
    pub summary: CountSummary,
    pub positive: u64,
    pub negative: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NgramStats {
    pub summary: CountSummary,
    pub unique: usize,
}

/// Corpus statistics laid out like the dataset tables: tweets, user
/// mentions, emoticons, URLs, unigrams and bigrams.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub n_tweets: usize,
    /// Present only when every tweet carries a label.
    pub n_positive: Option<usize>,
    pub n_negative: Option<usize>,
    pub user_mentions: CountSummary,
    pub emoticons: EmoticonStats,
    pub urls: CountSummary,
    pub unigrams: NgramStats,
    pub bigrams: NgramStats,
}

pub fn corpus_stats<'a, I>(corpus: I) -> CorpusStats
where
    I: IntoIterator<Item = (&'a NormalizedTweet, Option<Sentiment>)>,
{
    let mut n_tweets = 0;
    let mut labels = [0usize; 2];
    let mut all_labeled = true;
    let mut mentions = Vec::new();
    let mut urls = Vec::new();
    let mut emoticons = Vec::new();
    let (mut emo_pos, mut emo_neg) = (0u64, 0u64);
    let mut unigram_counts = Vec::new();
    let mut bigram_counts = Vec::new();
    let mut unique_unigrams: HashSet<&str> = HashSet::new();
    let mut unique_bigrams: HashSet<Bigram> = HashSet::new();

    for (tweet, label) in corpus {
        n_tweets += 1;
        match label {
            Some(label) => labels[label.index()] += 1,
            None => all_labeled = false,
        }
        let count = |kind| tweet.count_special(kind) as u64;
        mentions.push(count(SpecialToken::UserMention));
        urls.push(count(SpecialToken::Url));
        let (pos, neg) = (count(SpecialToken::EmoPos), count(SpecialToken::EmoNeg));
        emo_pos += pos;
        emo_neg += neg;
        emoticons.push(pos + neg);
        unigram_counts.push(tweet.len() as u64);
        unique_unigrams.extend(tweet.terms());
        let bigrams = extract_bigrams(tweet);
        bigram_counts.push(bigrams.len() as u64);
        unique_bigrams.extend(bigrams);
    }

    let labeled = all_labeled && n_tweets > 0;
    CorpusStats {
        n_tweets,
        n_positive: labeled.then_some(labels[Sentiment::Positive.index()]),
        n_negative: labeled.then_some(labels[Sentiment::Negative.index()]),
        user_mentions: CountSummary::from_counts(mentions.into_iter(), n_tweets),
        emoticons: EmoticonStats {
            summary: CountSummary::from_counts(emoticons.into_iter(), n_tweets),
            positive: emo_pos,
            negative: emo_neg,
        },
        urls: CountSummary::from_counts(urls.into_iter(), n_tweets),
        unigrams: NgramStats {
            summary: CountSummary::from_counts(unigram_counts.into_iter(), n_tweets),
            unique: unique_unigrams.len(),
        },
        bigrams: NgramStats {
            summary: CountSummary::from_counts(bigram_counts.into_iter(), n_tweets),
            unique: unique_bigrams.len(),
        },
    }
}

/// One table row; `None` cells render as `N/A`.
struct StatsRow {
    name: &'static str,
    total: Option<String>,
    unique: Option<String>,
    average: Option<String>,
    maximum: Option<String>,
    positive: Option<String>,
    negative: Option<String>,
}

const STATS_COLUMNS: [&str; 7] = ["", "Total", "Unique", "Average", "Maximum", "Positive", "Negative"];

impl CorpusStats {
    fn rows(&self) -> Vec<StatsRow> {
        let avg = |v: f64| Some(format!("{v:.4}"));
        let int = |v: u64| Some(v.to_string());
        vec![
            StatsRow {
                name: "Tweets",
                total: int(self.n_tweets as u64),
                unique: None,
                average: None,
                maximum: None,
                positive: self.n_positive.map(|v| v.to_string()),
                negative: self.n_negative.map(|v| v.to_string()),
            },
            StatsRow {
                name: "User Mentions",
                total: int(self.user_mentions.total),
                unique: None,
                average: avg(self.user_mentions.average),
                maximum: int(self.user_mentions.max),
                positive: None,
                negative: None,
            },
            StatsRow {
                name: "Emoticons",
                total: int(self.emoticons.summary.total),
                unique: None,
                average: avg(self.emoticons.summary.average),
                maximum: int(self.emoticons.summary.max),
                positive: int(self.emoticons.positive),
                negative: int(self.emoticons.negative),
            },
            StatsRow {
                name: "URLs",
                total: int(self.urls.total),
                unique: None,
                average: avg(self.urls.average),
                maximum: int(self.urls.max),
                positive: None,
                negative: None,
            },
            StatsRow {
                name: "Unigrams",
                total: int(self.unigrams.summary.total),
                unique: int(self.unigrams.unique as u64),
                average: avg(self.unigrams.summary.average),
                maximum: int(self.unigrams.summary.max),
                positive: None,
                negative: None,
            },
            StatsRow {
                name: "Bigrams",
                total: int(self.bigrams.summary.total),
                unique: int(self.bigrams.unique as u64),
                average: avg(self.bigrams.summary.average),
                maximum: None,
                positive: None,
                negative: None,
            },
        ]
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(STATS_COLUMNS)?;
        for row in self.rows() {
            let cells = [
                row.total, row.unique, row.average, row.maximum, row.positive, row.negative,
            ];
            let mut record = vec![row.name.to_string()];
            record.extend(cells.into_iter().map(|c| c.unwrap_or_else(|| "N/A".to_string())));
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14}", STATS_COLUMNS[0])?;
        for column in &STATS_COLUMNS[1..] {
            write!(f, "{column:>12}")?;
        }
        for row in self.rows() {
            writeln!(f)?;
            write!(f, "{:<14}", row.name)?;
            for cell in [row.total, row.unique, row.average, row.maximum, row.positive, row.negative] {
                write!(f, "{:>12}", cell.as_deref().unwrap_or("N/A"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Sentiment::{Negative as N, Positive as P};

    fn tweet(text: &str) -> NormalizedTweet {
        text.parse().unwrap()
    }

    #[test]
    fn accuracy_and_confusion() {
        assert_eq!(evaluate(&[P, N], &[P, N]).unwrap().accuracy, 1.0);
        let report = evaluate(&[P, P], &[P, N]).unwrap();
        assert_eq!(report.accuracy, 0.5);
        assert_eq!(report.confusion.true_positive, 1);
        assert_eq!(report.confusion.false_positive, 1);
        assert_eq!(evaluate(&[N, N, N, P], &[P, N, N, P]).unwrap().accuracy, 0.75);
        assert_eq!(evaluate(&[], &[]), Err(EvalError::Empty));
        assert_eq!(
            evaluate(&[P], &[P, N]),
            Err(EvalError::LengthMismatch { predictions: 1, gold: 2 })
        );
    }

    #[test]
    fn report_rendering() {
        let report = evaluate(&[P, N, N], &[P, P, N]).unwrap().with_model_name("nb");
        let text = report.to_string();
        assert!(text.contains("accuracy   0.6667"));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.contains("model,nb\n"));
        assert!(csv.contains("false_negative,1\n"));
    }

    #[test]
    fn single_tweet_stats() {
        let t = tweet("USER_MENTION hi EMO_POS");
        let stats = corpus_stats([(&t, Some(P))]);
        assert_eq!(stats.user_mentions, CountSummary { total: 1, average: 1.0, max: 1 });
        assert_eq!(stats.emoticons.summary.total, 1);
        assert_eq!((stats.emoticons.positive, stats.emoticons.negative), (1, 0));
        assert_eq!(stats.unigrams.summary.total, 3);
        assert_eq!(stats.unigrams.unique, 3);
        assert_eq!(stats.bigrams.summary.total, 2);
        assert_eq!((stats.n_positive, stats.n_negative), (Some(1), Some(0)));
    }

    #[test]
    fn empty_corpus_stats() {
        let stats = corpus_stats(std::iter::empty());
        assert_eq!(stats, CorpusStats::default());
        assert_eq!(stats.unigrams.summary.average, 0.0);
    }

    #[test]
    fn duplicated_corpus_doubles_totals() {
        let t = tweet("USER_MENTION hi hi EMO_NEG URL");
        let once = corpus_stats([(&t, Some(N))]);
        let twice = corpus_stats([(&t, Some(N)), (&t, Some(N))]);
        assert_eq!(twice.unigrams.summary.total, 2 * once.unigrams.summary.total);
        assert_eq!(twice.unigrams.summary.average, once.unigrams.summary.average);
        assert_eq!(twice.unigrams.unique, once.unigrams.unique);
        assert_eq!(twice.urls.average, once.urls.average);
        assert_eq!(twice.n_negative, Some(2));
    }

    #[test]
    fn unlabeled_tweets_hide_class_counts() {
        let t = tweet("hi");
        let stats = corpus_stats([(&t, Some(P)), (&t, None)]);
        assert_eq!(stats.n_positive, None);
        let table = stats.to_string();
        assert!(table.lines().next().unwrap().contains("Maximum"));
        assert!(table.contains("N/A"));
    }

    #[test]
    fn baseline_comparison() {
        let lexicon = OpinionLexicon::new(["good"], ["bad"]).unwrap();
        let corpus = vec![(tweet("good day"), P), (tweet("bad day"), N), (tweet("meh"), N)];
        let report = baseline_report(&corpus, &lexicon, &[P, N, N]).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.baseline_accuracy, Some(2.0 / 3.0));

        let empty = OpinionLexicon::default();
        let report = baseline_report(&corpus, &empty, &[P, P, P]).unwrap();
        assert_eq!(report.baseline_accuracy, Some(1.0 / 3.0));
        assert_eq!(report.accuracy, 1.0 / 3.0);
    }

    fn arb_labels() -> impl Strategy<Value = Vec<(Sentiment, Sentiment)>> {
        let s = prop_oneof![Just(P), Just(N)];
        proptest::collection::vec((s.clone(), s), 1..40)
    }

    proptest! {
        #[test]
        fn self_evaluation_is_perfect(pairs in arb_labels()) {
            let p: Vec<_> = pairs.iter().map(|x| x.0).collect();
            prop_assert_eq!(evaluate(&p, &p).unwrap().accuracy, 1.0);
        }

        #[test]
        fn accuracy_ignores_order(mut pairs in arb_labels(), rotate in 0usize..40) {
            let split = |v: &[(Sentiment, Sentiment)]| -> (Vec<_>, Vec<_>) { v.iter().copied().unzip() };
            let (p, g) = split(&pairs);
            let before = evaluate(&p, &g).unwrap();
            let n = pairs.len();
            pairs.rotate_left(rotate % n);
            pairs.reverse();
            let (p, g) = split(&pairs);
            let after = evaluate(&p, &g).unwrap();
            prop_assert_eq!(before.accuracy, after.accuracy);
            prop_assert_eq!(before.confusion, after.confusion);
            prop_assert_eq!(before.confusion.total(), n);
        }

        #[test]
        fn stats_are_additive(
            a in proptest::collection::vec("(hi|yo|URL|EMO_POS|USER_MENTION)( (hi|yo|URL|EMO_NEG)){0,4}", 0..5),
            b in proptest::collection::vec("(hi|yo|URL|EMO_POS|USER_MENTION)( (hi|yo|URL|EMO_NEG)){0,4}", 0..5),
        ) {
            let ta: Vec<NormalizedTweet> = a.iter().map(|s| tweet(s)).collect();
            let tb: Vec<NormalizedTweet> = b.iter().map(|s| tweet(s)).collect();
            let sa = corpus_stats(ta.iter().map(|t| (t, None)));
            let sb = corpus_stats(tb.iter().map(|t| (t, None)));
            let sab = corpus_stats(ta.iter().chain(&tb).map(|t| (t, None)));
            prop_assert_eq!(sab.n_tweets, sa.n_tweets + sb.n_tweets);
            prop_assert_eq!(sab.unigrams.summary.total, sa.unigrams.summary.total + sb.unigrams.summary.total);
            prop_assert_eq!(sab.bigrams.summary.total, sa.bigrams.summary.total + sb.bigrams.summary.total);
            prop_assert_eq!(sab.user_mentions.total, sa.user_mentions.total + sb.user_mentions.total);
            prop_assert_eq!(sab.urls.total, sa.urls.total + sb.urls.total);
            prop_assert_eq!(sab.emoticons.positive, sa.emoticons.positive + sb.emoticons.positive);
            prop_assert_eq!(sab.emoticons.negative, sa.emoticons.negative + sb.emoticons.negative);
            prop_assert!(sab.unigrams.unique as u64 <= sab.unigrams.summary.total);
            if sab.n_tweets > 0 {
                let avg = sab.unigrams.summary.total as f64 / sab.n_tweets as f64;
                prop_assert!((sab.unigrams.summary.average - avg).abs() < 1e-9);
            }
        }
    }
}
