//! Tweet CSV datasets: `tweet_id,sentiment,tweet` (labeled) and
//! `tweet_id,tweet` (unlabeled). A header row is optional and detected by a
//! non-numeric first field.

use std::collections::HashSet;
use std::io::{Read, Write};

use thiserror::Error;

use crate::models::Sentiment;
use crate::normalizer::NormalizedTweet;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: malformed CSV: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount { line: u64, expected: usize, found: usize },
    #[error("line {line}: tweet_id `{value}` is not an integer")]
    BadId { line: u64, value: String },
    #[error("line {line}: sentiment must be 0 or 1, got `{value}`")]
    BadSentiment { line: u64, value: String },
    #[error("line {line}: duplicate tweet_id {id}")]
    DuplicateId { line: u64, id: u64 },
    #[error("line {line}: {message}")]
    BadTokens { line: u64, message: String },
    #[error("CSV write failed: {0}")]
    Write(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub tweet_id: u64,
    pub sentiment: Sentiment,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnlabeledRecord {
    pub tweet_id: u64,
    pub text: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Rejoin surplus fields with commas instead of rejecting the row, for
    /// tweets written without quoting.
    pub lenient: bool,
}

/// Row layout shared by both dataset kinds.
trait Schema: Sized {
    const FIELDS: usize;
    fn id(&self) -> u64;
    fn from_fields(line: u64, fields: &[&str]) -> Result<Self, DatasetError>;
}

fn parse_id(line: u64, value: &str) -> Result<u64, DatasetError> {
    value.trim().parse().map_err(|_| DatasetError::BadId {
        line,
        value: value.to_string(),
    })
}

impl Schema for LabeledRecord {
    const FIELDS: usize = 3;

    fn id(&self) -> u64 {
        self.tweet_id
    }

    fn from_fields(line: u64, fields: &[&str]) -> Result<Self, DatasetError> {
        let tweet_id = parse_id(line, fields[0])?;
        let sentiment = fields[1].parse().map_err(|_| DatasetError::BadSentiment {
            line,
            value: fields[1].to_string(),
        })?;
        Ok(LabeledRecord {
            tweet_id,
            sentiment,
            text: fields[2].to_string(),
        })
    }
}

impl Schema for UnlabeledRecord {
    const FIELDS: usize = 2;

    fn id(&self) -> u64 {
        self.tweet_id
    }

    fn from_fields(line: u64, fields: &[&str]) -> Result<Self, DatasetError> {
        Ok(UnlabeledRecord {
            tweet_id: parse_id(line, fields[0])?,
            text: fields[1].to_string(),
        })
    }
}

/// Streaming record reader that rejects duplicate ids.
pub struct RecordReader<R, T> {
    records: csv::StringRecordsIntoIter<R>,
    options: CsvOptions,
    seen: HashSet<u64>,
    first: bool,
    failed: bool,
    _schema: std::marker::PhantomData<T>,
}

pub type LabeledReader<R> = RecordReader<R, LabeledRecord>;
pub type UnlabeledReader<R> = RecordReader<R, UnlabeledRecord>;

impl<R: Read, T> RecordReader<R, T> {
    pub fn new(source: R, options: CsvOptions) -> Self {
        let reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);
        RecordReader {
            records: reader.into_records(),
            options,
            seen: HashSet::new(),
            first: true,
            failed: false,
            _schema: std::marker::PhantomData,
        }
    }
}

#[allow(private_bounds)]
impl<R: Read, T: Schema> Iterator for RecordReader<R, T> {
    type Item = Result<T, DatasetError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let record = match self.records.next()? {
                Ok(record) => record,
                Err(err) => {
                    self.failed = true;
                    let line = err.position().map_or(0, |p| p.line());
                    return Some(Err(DatasetError::Malformed {
                        line,
                        message: err.to_string(),
                    }));
                }
            };
            let line = record.position().map_or(0, |p| p.line());
            let first = std::mem::replace(&mut self.first, false);
            if first && record.get(0).is_some_and(|f| f.trim().parse::<u64>().is_err()) {
                continue;
            }
            // blank lines
            if record.len() == 1 && record.get(0).is_some_and(|f| f.trim().is_empty()) {
                continue;
            }
            let result = self.parse(line, &record);
            if result.is_err() {
                self.failed = true;
            }
            return Some(result);
        }
    }
}

#[allow(private_bounds)]
impl<R: Read, T: Schema> RecordReader<R, T> {
    fn parse(&mut self, line: u64, record: &csv::StringRecord) -> Result<T, DatasetError> {
        let fields: Vec<&str> = record.iter().collect();
        let joined;
        let fields: Vec<&str> = if fields.len() > T::FIELDS && self.options.lenient {
            joined = fields[T::FIELDS - 1..].join(",");
            fields[..T::FIELDS - 1]
                .iter()
                .copied()
                .chain(std::iter::once(joined.as_str()))
                .collect()
        } else {
            fields
        };
        if fields.len() != T::FIELDS {
            return Err(DatasetError::FieldCount {
                line,
                expected: T::FIELDS,
                found: fields.len(),
            });
        }
        let parsed = T::from_fields(line, &fields)?;
        if !self.seen.insert(parsed.id()) {
            return Err(DatasetError::DuplicateId {
                line,
                id: parsed.id(),
            });
        }
        Ok(parsed)
    }
}

pub fn parse_labeled_csv<R: Read>(
    source: R,
    options: CsvOptions,
) -> Result<Vec<LabeledRecord>, DatasetError> {
    LabeledReader::new(source, options).collect()
}

pub fn parse_unlabeled_csv<R: Read>(
    source: R,
    options: CsvOptions,
) -> Result<Vec<UnlabeledRecord>, DatasetError> {
    UnlabeledReader::new(source, options).collect()
}

pub fn write_labeled_csv<W: Write>(records: &[LabeledRecord], sink: W) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["tweet_id", "sentiment", "tweet"])?;
    for r in records {
        writer.write_record([
            r.tweet_id.to_string().as_str(),
            &r.sentiment.to_string(),
            &r.text,
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_unlabeled_csv<W: Write>(
    records: &[UnlabeledRecord],
    sink: W,
) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["tweet_id", "tweet"])?;
    for r in records {
        writer.write_record([r.tweet_id.to_string().as_str(), &r.text])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `tweet_id,sentiment` prediction rows.
pub fn write_predictions<W: Write>(
    predictions: &[(u64, Sentiment)],
    sink: W,
) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["tweet_id", "sentiment"])?;
    for (id, sentiment) in predictions {
        writer.write_record([id.to_string(), sentiment.to_string()])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A preprocessed tweet: `tweet_id[,sentiment],tokens`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedRecord {
    pub tweet_id: u64,
    pub sentiment: Option<Sentiment>,
    pub tweet: NormalizedTweet,
}

pub fn write_normalized_csv<W: Write>(
    records: &[NormalizedRecord],
    sink: W,
) -> Result<(), DatasetError> {
    let labeled = records.first().is_some_and(|r| r.sentiment.is_some());
    let mut writer = csv::Writer::from_writer(sink);
    if labeled {
        writer.write_record(["tweet_id", "sentiment", "tweet"])?;
    } else {
        writer.write_record(["tweet_id", "tweet"])?;
    }
    for r in records {
        let mut row = vec![r.tweet_id.to_string()];
        if labeled {
            row.push(r.sentiment.map_or_else(String::new, |s| s.to_string()));
        }
        row.push(r.tweet.to_string());
        writer.write_record(&row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads the output of [`write_normalized_csv`] back; labels are optional.
pub fn parse_normalized_csv<R: Read>(source: R) -> Result<Vec<NormalizedRecord>, DatasetError> {
    let rows: Vec<(u64, u64, Option<Sentiment>, String)> = {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for (n, record) in reader.records().enumerate() {
            let record = record.map_err(|err| DatasetError::Malformed {
                line: err.position().map_or(0, |p| p.line()),
                message: err.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if n == 0 && record.get(0).is_some_and(|f| f.trim().parse::<u64>().is_err()) {
                continue;
            }
            let fields: Vec<&str> = record.iter().collect();
            let (id, label, tokens) = match fields.as_slice() {
                [id, tokens] => (*id, None, *tokens),
                [id, label, tokens] => (*id, Some(*label), *tokens),
                _ => {
                    return Err(DatasetError::FieldCount {
                        line,
                        expected: 3,
                        found: fields.len(),
                    })
                }
            };
            let id = parse_id(line, id)?;
            let label = label
                .map(|l| {
                    l.parse().map_err(|_| DatasetError::BadSentiment {
                        line,
                        value: l.to_string(),
                    })
                })
                .transpose()?;
            if !seen.insert(id) {
                return Err(DatasetError::DuplicateId { line, id });
            }
            rows.push((line, id, label, tokens.to_string()));
        }
        rows
    };
    rows.into_iter()
        .map(|(line, tweet_id, sentiment, tokens)| {
            let tweet = tokens.parse().map_err(|e: crate::normalizer::InvalidToken| {
                DatasetError::BadTokens {
                    line,
                    message: e.to_string(),
                }
            })?;
            Ok(NormalizedRecord {
                tweet_id,
                sentiment,
                tweet,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labeled(text: &str) -> Result<Vec<LabeledRecord>, DatasetError> {
        parse_labeled_csv(text.as_bytes(), CsvOptions::default())
    }

    #[test]
    fn labeled_rows() {
        let rows = labeled("17,1,\"loving this\"\n19,0,\"a, b :(\"\n").unwrap();
        assert_eq!(
            rows,
            vec![
                LabeledRecord { tweet_id: 17, sentiment: Sentiment::Positive, text: "loving this".into() },
                LabeledRecord { tweet_id: 19, sentiment: Sentiment::Negative, text: "a, b :(".into() },
            ]
        );
        let with_header = labeled("tweet_id,sentiment,tweet\n17,1,hi\n").unwrap();
        assert_eq!(with_header.len(), 1);
    }

    #[test]
    fn labeled_errors() {
        assert!(matches!(
            labeled("18,2,\"bad label\"\n"),
            Err(DatasetError::BadSentiment { line: 1, .. })
        ));
        assert!(matches!(
            labeled("1,1,a\n1,0,b\n"),
            Err(DatasetError::DuplicateId { line: 2, id: 1 })
        ));
        assert!(matches!(
            labeled("1,1,a\n2,0,b,c\n"),
            Err(DatasetError::FieldCount { line: 2, expected: 3, found: 4 })
        ));
        assert!(matches!(labeled("1,1,a\nx,0,b\n"), Err(DatasetError::BadId { line: 2, .. })));
    }

    #[test]
    fn lenient_rejoins_commas() {
        let rows = parse_labeled_csv("2,0,oh no, again\n".as_bytes(), CsvOptions { lenient: true }).unwrap();
        assert_eq!(rows[0].text, "oh no, again");
    }

    #[test]
    fn unlabeled_rows() {
        let rows = parse_unlabeled_csv("5,\"hello\"\n".as_bytes(), CsvOptions::default()).unwrap();
        assert_eq!(rows, vec![UnlabeledRecord { tweet_id: 5, text: "hello".into() }]);
        assert!(matches!(
            parse_unlabeled_csv("5,a\n5,b\n".as_bytes(), CsvOptions::default()),
            Err(DatasetError::DuplicateId { .. })
        ));
        assert!(parse_unlabeled_csv("".as_bytes(), CsvOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn streaming_stops_after_error() {
        let mut reader = LabeledReader::new("1,1,a\n1,1,b\n3,1,c\n".as_bytes(), CsvOptions::default());
        assert!(reader.next().unwrap().is_ok());
        assert!(reader.next().unwrap().is_err());
        assert!(reader.next().is_none());
    }

    #[test]
    fn predictions_format() {
        let mut out = Vec::new();
        write_predictions(&[(3, Sentiment::Positive), (4, Sentiment::Negative)], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "tweet_id,sentiment\n3,1\n4,0\n");
    }

    #[test]
    fn normalized_round_trip() {
        let records = vec![
            NormalizedRecord { tweet_id: 1, sentiment: Some(Sentiment::Positive), tweet: "USER_MENTION hi EMO_POS".parse().unwrap() },
            NormalizedRecord { tweet_id: 2, sentiment: Some(Sentiment::Negative), tweet: NormalizedTweet::default() },
        ];
        let mut out = Vec::new();
        write_normalized_csv(&records, &mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert_eq!(text, "tweet_id,sentiment,tweet\n1,1,USER_MENTION hi EMO_POS\n2,0,\n");
        assert_eq!(parse_normalized_csv(out.as_slice()).unwrap(), records);
    }

    fn arb_record() -> impl Strategy<Value = (u64, bool, String)> {
        (any::<u64>(), any::<bool>(), "[ -~\n\"]{0,30}")
    }

    proptest! {
        #[test]
        fn write_then_parse_preserves_records(rows in proptest::collection::vec(arb_record(), 0..10)) {
            let mut seen = HashSet::new();
            let records: Vec<LabeledRecord> = rows
                .into_iter()
                .filter(|(id, _, _)| seen.insert(*id))
                .map(|(tweet_id, pos, text)| LabeledRecord {
                    tweet_id,
                    sentiment: if pos { Sentiment::Positive } else { Sentiment::Negative },
                    text,
                })
                .collect();
            let mut out = Vec::new();
            write_labeled_csv(&records, &mut out).unwrap();
            prop_assert_eq!(labeled(std::str::from_utf8(&out).unwrap()).unwrap(), records);
        }
    }
}
