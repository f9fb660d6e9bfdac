//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p tweetiment --test acceptance`. Criterion 11 needs
//! a full-size labeled dataset; point `TWEETIMENT_FULL_DATA` at one to run it.

use std::collections::BTreeMap;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tweetiment::eval::corpus_stats;
use tweetiment::features::{FeatureMode, FeatureVector, Vocabulary};
use tweetiment::io::{deserialize_model, serialize_model, CsvOptions, ModelArtifact};
use tweetiment::models::maxent::{self, empirical_expectations, model_expectations};
use tweetiment::models::{
    baseline_classify, maxent_prob, nb_predict, nb_train, MaxEntModel, OpinionLexicon, Sentiment,
    TrainerAlgorithm, TrainerConfig,
};
use tweetiment::normalizer::{normalize_tweet, normalize_word, EmoticonTable, NormalizedTweet};
use tweetiment::{train_artifact, Classifier, TrainOptions};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn tweet(text: &str) -> NormalizedTweet {
    text.parse().unwrap()
}

fn c1_normalization_goldens() -> Outcome {
    let table = EmoticonTable::default();
    let pairs = [
        ("misses Swimming Class. http://plurk.com/p/12nt0b", "misses swimming class URL"),
        (
            "@98PXYRochester HEYYYYYYYYY!! its Fer from Chile again",
            "USER_MENTION heyy its fer from chile again",
        ),
        ("Sometimes, You gotta hate #Windows updates.", "sometimes you gotta hate windows updates"),
        (
            "@Santiago_Steph hii come talk to me i got candy :)",
            "USER_MENTION hii come talk to me i got candy EMO_POS",
        ),
        ("@bolly47 oh no :(r.i.p. your bella", "USER_MENTION oh no EMO_NEG r.i.p your bella"),
        ("@bolly47 oh no :( r.i.p. your bella", "USER_MENTION oh no EMO_NEG r.i.p your bella"),
    ];
    let failures: Vec<String> = pairs
        .iter()
        .filter_map(|(raw, expected)| {
            let got = normalize_tweet(raw, &table).to_string();
            (got != *expected).then(|| format!("{raw:?} -> {got:?}"))
        })
        .collect();
    ensure(failures.is_empty(), format!("{} pairs, mismatches: {failures:?}", pairs.len()))
}

fn c2_word_rules() -> Outcome {
    let table = EmoticonTable::default();
    let sentence = normalize_tweet("sooooo happpppy", &table).to_string();
    let shirt = normalize_word("t-shirt");
    ensure(
        sentence == "soo happy" && shirt.as_deref() == Some("tshirt"),
        format!("sooooo happpppy -> {sentence:?}, t-shirt -> {shirt:?}"),
    )
}

/// Plain-arithmetic Laplace naive Bayes score: ln(P(c) * prod P(f_i|c)^v_i).
fn brute_force_nb(corpus: &[([u32; 3], Sentiment)], query: [u32; 3]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for class in Sentiment::ALL {
        let docs: Vec<&[u32; 3]> = corpus.iter().filter(|(_, c)| *c == class).map(|(d, _)| d).collect();
        let prior = docs.len() as f64 / corpus.len() as f64;
        let counts: Vec<u32> = (0..3).map(|i| docs.iter().map(|d| d[i]).sum()).collect();
        let total: u32 = counts.iter().sum();
        let mut product = prior;
        for i in 0..3 {
            let p = (counts[i] as f64 + 1.0) / (total as f64 + 3.0);
            for _ in 0..query[i] {
                product *= p;
            }
        }
        out[class.index()] = product.ln();
    }
    out
}

fn c3_nb_oracle() -> Outcome {
    let mut vectors = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                vectors.push([a, b, c]);
            }
        }
    }
    let docs: Vec<([u32; 3], Sentiment)> = vectors
        .iter()
        .flat_map(|v| Sentiment::ALL.map(|s| (*v, s)))
        .collect();
    let as_vector = |v: &[u32; 3]| {
        FeatureVector::from_entries(v.iter().enumerate().map(|(i, &x)| (i, x)), FeatureMode::Frequency)
    };
    let queries: Vec<FeatureVector> = vectors.iter().map(as_vector).collect();

    let mut corpora = 0usize;
    let mut comparisons = 0usize;
    let mut worst = 0.0f64;
    let mut rejected_single_class = 0usize;
    // multisets of 1..=4 documents (naive Bayes is order independent)
    let n = docs.len();
    let mut stack: Vec<usize> = Vec::new();
    fn next_multiset(stack: &mut Vec<usize>, n: usize, max_len: usize) -> bool {
        if stack.len() < max_len {
            let start = stack.last().copied().unwrap_or(0);
            stack.push(start);
            return true;
        }
        while let Some(top) = stack.pop() {
            if top + 1 < n {
                stack.push(top + 1);
                return true;
            }
        }
        false
    }
    while next_multiset(&mut stack, n, 4) {
        let corpus: Vec<([u32; 3], Sentiment)> = stack.iter().map(|&i| docs[i]).collect();
        let training: Vec<(FeatureVector, Sentiment)> =
            corpus.iter().map(|(v, s)| (as_vector(v), *s)).collect();
        let model = match nb_train(&training, 3, 1.0) {
            Ok(model) => model,
            Err(_) => {
                rejected_single_class += 1;
                continue;
            }
        };
        corpora += 1;
        for (query, raw) in queries.iter().zip(&vectors) {
            let (_, scores) = nb_predict(&model, query);
            let oracle = brute_force_nb(&corpus, *raw);
            for k in 0..2 {
                worst = worst.max((scores[k] - oracle[k]).abs());
            }
            comparisons += 1;
        }
    }
    ensure(
        worst < 1e-9 && corpora > 0,
        format!(
            "{corpora} corpora x 27 docs ({comparisons} queries), {rejected_single_class} single-class corpora rejected, max |diff| = {worst:.3e}"
        ),
    )
}

fn c4_nb_worked_example() -> Outcome {
    let docs = vec![
        (FeatureVector::from_entries([(0, 2)], FeatureMode::Frequency), Sentiment::Positive),
        (FeatureVector::from_entries([(1, 1)], FeatureMode::Frequency), Sentiment::Negative),
    ];
    let model = nb_train(&docs, 2, 1.0).unwrap();
    let pos = model.feature_log_likelihood(Sentiment::Positive)[0];
    let neg = model.feature_log_likelihood(Sentiment::Negative)[0];
    let prior = model.class_log_prior();
    ensure(
        pos == 0.75f64.ln() && neg == (1.0f64 / 3.0).ln() && prior == [0.5f64.ln(); 2],
        format!("P(good|pos) = {}, P(good|neg) = {}", pos.exp(), neg.exp()),
    )
}

/// Non-separable: the only weak separator is w = 0, so the optimum is finite.
fn maxent_corpus() -> Vec<(FeatureVector, Sentiment)> {
    let doc = |e: &[(usize, u32)]| FeatureVector::from_entries(e.iter().copied(), FeatureMode::Frequency);
    vec![
        (doc(&[(0, 2), (1, 1)]), Sentiment::Positive),
        (doc(&[(0, 1), (1, 1)]), Sentiment::Negative),
        (doc(&[(1, 1), (2, 2)]), Sentiment::Negative),
        (doc(&[(1, 1), (2, 1)]), Sentiment::Positive),
    ]
}

fn c5_maxent_constraints() -> Outcome {
    let corpus = maxent_corpus();
    let empirical = empirical_expectations(&corpus, 3);
    let gis_config = TrainerConfig::new(TrainerAlgorithm::Gis, 100_000, 1e-15).unwrap();
    let iis_config = TrainerConfig::new(TrainerAlgorithm::Iis, 100_000, 1e-15).unwrap();
    let gis = maxent::train(&corpus, 3, &gis_config).unwrap();
    let iis = maxent::train(&corpus, 3, &iis_config).unwrap();

    let expected = model_expectations(&gis.model, &corpus);
    let gap = expected
        .iter()
        .zip(&empirical)
        .map(|(m, e)| (m - e).abs())
        .fold(0.0, f64::max);
    let monotone = |trace: &[f64]| trace.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let gis_ll = *gis.log_likelihoods.last().unwrap();
    let iis_ll = *iis.log_likelihoods.last().unwrap();
    ensure(
        gap < 1e-3 && monotone(&gis.log_likelihoods) && monotone(&iis.log_likelihoods) && iis_ll >= gis_ll - 1e-6,
        format!(
            "GIS {} iters, max |E_model - E_emp| = {gap:.2e}, LL GIS {gis_ll:.9} IIS {iis_ll:.9} ({} iters), monotone GIS {} IIS {}",
            gis.iterations,
            iis.iterations,
            monotone(&gis.log_likelihoods),
            monotone(&iis.log_likelihoods)
        ),
    )
}

fn c6_maxent_spot_values() -> Outcome {
    let zero = MaxEntModel::zeros(4);
    let doc = FeatureVector::from_entries([(0, 1), (3, 2)], FeatureMode::Frequency);
    let uniform = maxent_prob(&zero, &doc) == [0.5, 0.5]
        && maxent_prob(&zero, &FeatureVector::empty(FeatureMode::Presence)) == [0.5, 0.5];
    let mut single = MaxEntModel::zeros(1);
    single.set_weight(0, Sentiment::Positive, 1.0);
    let p = maxent_prob(&single, &FeatureVector::from_entries([(0, 1)], FeatureMode::Presence));
    let e = std::f64::consts::E;
    let err = (p[1] - e / (e + 1.0)).abs();
    ensure(uniform && err < 1e-12, format!("zero weights uniform: {uniform}, |P - e/(e+1)| = {err:.2e}"))
}

fn c7_baseline_tie() -> Outcome {
    static POSITIVE: [&str; 5] = ["good", "great", "happy", "love", "nice"];
    static NEGATIVE: [&str; 5] = ["bad", "awful", "sad", "hate", "ugly"];
    static NEUTRAL: [&str; 7] = ["the", "day", "is", "it", "USER_MENTION", "URL", "EMO_POS"];
    let lexicon = OpinionLexicon::new(POSITIVE, NEGATIVE).unwrap();
    let strategy = (
        0usize..6,
        proptest::collection::vec(proptest::sample::select(&NEUTRAL[..]), 0..8),
        any::<u64>(),
    )
        .prop_flat_map(|(k, neutral, seed)| {
            (
                proptest::collection::vec(proptest::sample::select(&POSITIVE[..]), k),
                proptest::collection::vec(proptest::sample::select(&NEGATIVE[..]), k),
                Just(neutral),
                Just(seed),
            )
        });
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    let result = runner.run(&strategy, |(pos, neg, neutral, seed)| {
        let mut words: Vec<&str> = pos.into_iter().chain(neg).chain(neutral).collect();
        words.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = tweet(&words.join(" "));
        prop_assert_eq!(baseline_classify(&t, &lexicon), Sentiment::Positive);
        Ok(())
    });
    match result {
        Ok(()) => Outcome::Pass("2000 randomized balanced tweets classified positive".into()),
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn synthetic_corpus(n: usize, seed: u64) -> Vec<NormalizedTweet> {
    let words = [
        "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "URL", "EMO_POS", "USER_MENTION",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..10);
            let tokens: Vec<&str> = (0..len)
                .map(|_| {
                    // skewed so counts repeat and the budget cuts through ties
                    let r: f64 = rng.gen();
                    words[((r * r) * words.len() as f64) as usize]
                })
                .collect();
            tweet(&tokens.join(" "))
        })
        .collect()
}

fn c8_vocabulary_determinism() -> Outcome {
    let corpus = synthetic_corpus(200, 42);
    let reference = Vocabulary::build(&corpus, 8, 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut shuffled = corpus.clone();
    let mut identical = 0;
    for _ in 0..1000 {
        shuffled.shuffle(&mut rng);
        if Vocabulary::build(&shuffled, 8, 20).unwrap() == reference {
            identical += 1;
        }
    }
    ensure(
        identical == 1000,
        format!(
            "{identical}/1000 shuffles identical ({} unigrams, {} bigrams kept)",
            reference.num_unigrams(),
            reference.num_bigrams()
        ),
    )
}

fn c9_stats_shape() -> Outcome {
    use Sentiment::{Negative as N, Positive as P};
    let corpus: Vec<(NormalizedTweet, Sentiment)> = [
        ("USER_MENTION hi EMO_POS", P),
        ("love it URL", P),
        ("USER_MENTION USER_MENTION sad EMO_NEG", N),
        ("", N),
        ("good good good day", P),
        ("URL URL", N),
        ("EMO_POS EMO_POS EMO_NEG", P),
        ("hi", N),
        ("USER_MENTION love URL EMO_POS", P),
        ("bad day", N),
    ]
    .iter()
    .map(|(t, s)| (tweet(t), *s))
    .collect();
    let s = corpus_stats(corpus.iter().map(|(t, l)| (t, Some(*l))));
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let mut mismatches = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            mismatches.push(name.to_string());
        }
    };
    check("tweets", s.n_tweets == 10 && s.n_positive == Some(5) && s.n_negative == Some(5));
    check(
        "mentions",
        s.user_mentions.total == 4 && close(s.user_mentions.average, 0.4) && s.user_mentions.max == 2,
    );
    check(
        "emoticons",
        s.emoticons.summary.total == 6
            && s.emoticons.positive == 4
            && s.emoticons.negative == 2
            && close(s.emoticons.summary.average, 0.6)
            && s.emoticons.summary.max == 3,
    );
    check("urls", s.urls.total == 4 && close(s.urls.average, 0.4) && s.urls.max == 2);
    check(
        "unigrams",
        s.unigrams.summary.total == 26
            && s.unigrams.unique == 11
            && close(s.unigrams.summary.average, 2.6)
            && s.unigrams.summary.max == 4,
    );
    check(
        "bigrams",
        s.bigrams.summary.total == 17 && s.bigrams.unique == 16 && close(s.bigrams.summary.average, 1.7),
    );
    ensure(mismatches.is_empty(), format!("mismatched rows: {mismatches:?}"))
}

fn c10_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let texts = synthetic_corpus(300, 3);
    let labeled: Vec<(NormalizedTweet, Sentiment)> = texts
        .into_iter()
        .map(|t| {
            let positive = t.terms().filter(|w| ["a", "c", "e", "EMO_POS"].contains(w)).count();
            let label = if positive * 2 + rng.gen_range(0..2) > t.len() {
                Sentiment::Positive
            } else {
                Sentiment::Negative
            };
            (t, label)
        })
        .collect();
    let suite = synthetic_corpus(100, 99);
    let mut report = Vec::new();
    let mut all_equal = true;
    for (name, classifier, features) in [
        ("nb/presence", Classifier::NaiveBayes { alpha: 1.0 }, FeatureMode::Presence),
        ("nb/frequency", Classifier::NaiveBayes { alpha: 1.0 }, FeatureMode::Frequency),
        ("maxent/gis", Classifier::MaxEnt(TrainerConfig::new(TrainerAlgorithm::Gis, 50, 1e-8).unwrap()), FeatureMode::Presence),
        ("maxent/iis", Classifier::MaxEnt(TrainerConfig::new(TrainerAlgorithm::Iis, 50, 1e-8).unwrap()), FeatureMode::Frequency),
    ] {
        let options = TrainOptions { classifier, features, unigrams: 12, bigrams: 30, timestamp: 1 };
        let artifact = train_artifact(&labeled, &options).unwrap();
        let mut buf = Vec::new();
        serialize_model(&artifact, &mut buf).unwrap();
        let back: ModelArtifact = deserialize_model(buf.as_slice()).unwrap();
        let same_predictions = suite.iter().all(|t| artifact.predict(t) == back.predict(t));
        let same_params = back == artifact;
        all_equal &= same_predictions && same_params;
        report.push(format!("{name}: predictions {same_predictions}, parameters {same_params}"));
    }
    ensure(all_equal, format!("100-doc suite; {}", report.join("; ")))
}

fn c11_full_scale() -> Outcome {
    let Some(path) = std::env::var_os("TWEETIMENT_FULL_DATA") else {
        return Outcome::Skip("set TWEETIMENT_FULL_DATA to a labeled 800k-tweet CSV to run".into());
    };
    let file = match std::fs::File::open(&path) {
        Ok(f) => std::io::BufReader::new(f),
        Err(e) => return Outcome::Fail(format!("cannot open {path:?}: {e}")),
    };
    let table = EmoticonTable::default();
    let mut tweets = Vec::new();
    for record in tweetiment::io::dataset::LabeledReader::new(file, CsvOptions { lenient: true }) {
        match record {
            Ok(r) => tweets.push((normalize_tweet(&r.text, &table), r.sentiment)),
            Err(e) => return Outcome::Fail(e.to_string()),
        }
    }
    let stats = corpus_stats(tweets.iter().map(|(t, s)| (t, Some(*s))));
    let avg = stats.unigrams.summary.average;
    let unique = stats.unigrams.unique as f64;
    ensure(
        (avg - 12.279).abs() <= 0.5 && (unique - 181_232.0).abs() <= 0.1 * 181_232.0,
        format!("{} tweets, avg unigrams {avg:.3}, unique unigrams {unique}", stats.n_tweets),
    )
}

fn main() {
    let checks: BTreeMap<u32, (&str, Check)> = BTreeMap::from([
        (1, ("normalization goldens", c1_normalization_goldens as Check)),
        (2, ("word-level rules", c2_word_rules as Check)),
        (3, ("naive Bayes brute-force oracle", c3_nb_oracle as Check)),
        (4, ("naive Bayes worked example", c4_nb_worked_example as Check)),
        (5, ("maxent constraint satisfaction", c5_maxent_constraints as Check)),
        (6, ("maxent spot values", c6_maxent_spot_values as Check)),
        (7, ("baseline tie rule", c7_baseline_tie as Check)),
        (8, ("vocabulary determinism", c8_vocabulary_determinism as Check)),
        (9, ("corpus statistics", c9_stats_shape as Check)),
        (10, ("model round trip", c10_round_trip as Check)),
        (11, ("full-scale statistics (optional)", c11_full_scale as Check)),
    ]);
    let started = Instant::now();
    let mut failed = 0;
    for (id, (name, check)) in checks {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] criterion {id:>2} {name} ({:.2}s): {detail}", t.elapsed().as_secs_f64());
    }
    println!("acceptance finished in {:.2}s, {failed} failing", started.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
