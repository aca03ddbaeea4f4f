//! Retweet networks from archived, stance-labeled tweets.
//!
//! Input is JSON lines, one original tweet per line:
//!
//! ```text
//! {"tweet_id": "1", "author": "u", "stance": "favor", "retweeters": ["v", "w"]}
//! ```
//!
//! Every retweet inherits the stance of the tweet it shares. A user's
//! stance score is `(F - A) / (F + A + N)` over the tweets they wrote and
//! the retweets they made, and is discretized at `±0.2`.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::graph::{GraphBuilder, GraphError, LabeledGraph, NodeId, Opinion};

#[derive(Debug, Error)]
pub enum StanceError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Favor,
    Against,
    Neutral,
}

impl Stance {
    /// Opinion index in networks built here: against 0, neutral 1, favor 2.
    pub fn opinion(self) -> Opinion {
        match self {
            Stance::Against => Opinion(0),
            Stance::Neutral => Opinion(1),
            Stance::Favor => Opinion(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stance::Favor => "favor",
            Stance::Against => "against",
            Stance::Neutral => "neutral",
        }
    }

    /// Discretized stance score.
    pub fn from_score(score: f64) -> Stance {
        if score > 0.2 {
            Stance::Favor
        } else if score < -0.2 {
            Stance::Against
        } else {
            Stance::Neutral
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct StanceRecord {
    pub tweet_id: String,
    pub author: String,
    pub stance: Stance,
    #[serde(default)]
    pub retweeters: Vec<String>,
}

/// Parsed records plus the number of rows skipped with a warning.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StanceRecordSet {
    pub records: Vec<StanceRecord>,
    pub empty_retweeters_skipped: usize,
}

impl StanceRecordSet {
    /// Parses JSON lines. Blank lines are ignored; a malformed line or a
    /// repeated `tweet_id` is an error naming the line. Empty retweeter ids
    /// are dropped and counted.
    pub fn parse<R: BufRead>(reader: R, path: &Path) -> Result<StanceRecordSet, StanceError> {
        let mut set = StanceRecordSet::default();
        let mut seen = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let err = |message: String| StanceError::Parse {
                path: path.to_owned(),
                line: i + 1,
                message,
            };
            let line = line.map_err(|e| err(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut record: StanceRecord = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
            if record.author.trim().is_empty() {
                return Err(err("record has an empty author".into()));
            }
            if !seen.insert(record.tweet_id.clone()) {
                return Err(err(format!("duplicate tweet_id `{}`", record.tweet_id)));
            }
            let before = record.retweeters.len();
            record.retweeters.retain(|r| !r.trim().is_empty());
            set.empty_retweeters_skipped += before - record.retweeters.len();
            set.records.push(record);
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<StanceRecordSet, StanceError> {
        let file = std::fs::File::open(path).map_err(|source| StanceError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(std::io::BufReader::new(file), path)
    }

    /// Retweet events whose retweeter is not the author.
    pub fn retweet_events(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.retweeters.iter().filter(|u| **u != r.author).count())
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StanceCounts {
    pub favor: u64,
    pub against: u64,
    pub neutral: u64,
}

impl StanceCounts {
    fn add(&mut self, s: Stance) {
        match s {
            Stance::Favor => self.favor += 1,
            Stance::Against => self.against += 1,
            Stance::Neutral => self.neutral += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.favor + self.against + self.neutral
    }

    /// `(F - A) / (F + A + N)`, or `None` without any items.
    pub fn score(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| (self.favor as f64 - self.against as f64) / total as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UserStance {
    pub counts: StanceCounts,
    pub score: f64,
    pub stance: Stance,
}

impl UserStance {
    /// Users without any stance items fall back to neutral.
    pub fn from_counts(counts: StanceCounts) -> UserStance {
        let score = counts.score().unwrap_or(0.0);
        UserStance {
            counts,
            score,
            stance: Stance::from_score(score),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserScores {
    pub users: BTreeMap<NodeId, UserStance>,
    /// Users whose stance fell back to neutral for lack of items.
    pub unscored: usize,
}

/// Stance counts and discretized opinions for every author and retweeter.
pub fn score_users(records: &StanceRecordSet) -> UserScores {
    let mut counts: BTreeMap<NodeId, StanceCounts> = BTreeMap::new();
    for r in &records.records {
        counts.entry(NodeId::from(r.author.as_str())).or_default().add(r.stance);
        for u in &r.retweeters {
            let entry = counts.entry(NodeId::from(u.as_str())).or_default();
            if *u != r.author {
                entry.add(r.stance);
            }
        }
    }
    let unscored = counts.values().filter(|c| c.total() == 0).count();
    UserScores {
        users: counts.into_iter().map(|(u, c)| (u, UserStance::from_counts(c))).collect(),
        unscored,
    }
}

#[derive(Clone, Debug)]
pub struct RetweetNetwork {
    pub graph: LabeledGraph,
    pub scores: UserScores,
    pub self_retweets_dropped: usize,
    pub empty_retweeters_skipped: usize,
}

/// Undirected user graph whose edge weights count retweets in either
/// direction, labeled with each user's discretized stance.
pub fn build_retweet_network(records: &StanceRecordSet) -> Result<RetweetNetwork, StanceError> {
    let scores = score_users(records);
    let mut b = GraphBuilder::new();
    for (user, s) in &scores.users {
        b.set_label(user.clone(), s.stance.opinion())?;
    }
    for r in &records.records {
        for u in &r.retweeters {
            b.add_edge(u.as_str(), r.author.as_str(), 1.0)?;
        }
    }
    let self_retweets_dropped = b.self_loops_dropped();
    let graph = b.build(Some(3))?;
    Ok(RetweetNetwork {
        graph,
        scores,
        self_retweets_dropped,
        empty_retweeters_skipped: records.empty_retweeters_skipped,
    })
}

/// Name map for the opinion indices used by [`build_retweet_network`].
pub fn write_name_map<W: Write>(mut out: W) -> std::io::Result<()> {
    for s in [Stance::Against, Stance::Neutral, Stance::Favor] {
        writeln!(out, "{}\t{}", s.opinion().0, s.name())?;
    }
    Ok(())
}

/// Writes `<prefix>.edges.tsv`, `<prefix>.labels.tsv` and
/// `<prefix>.names.tsv`, returning the three paths.
pub fn write_network(net: &RetweetNetwork, prefix: &Path) -> std::io::Result<[PathBuf; 3]> {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let paths = [with(".edges.tsv"), with(".labels.tsv"), with(".names.tsv")];
    let create = |p: &Path| std::fs::File::create(p).map(std::io::BufWriter::new);
    net.graph.write_edge_list(create(&paths[0])?)?;
    net.graph.write_labels(create(&paths[1])?)?;
    write_name_map(create(&paths[2])?)?;
    Ok(paths)
}
