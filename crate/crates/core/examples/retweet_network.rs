// Builds a three-opinion retweet network from stance-labeled tweets and
// scores it. Each user's stance comes from the stances of the tweets they
// wrote or retweeted.
//
// Run with `cargo run --example retweet_network`.

use std::path::Path;

use polarimeter::metric::{analyze, AnalyzeOptions};
use polarimeter::stance::{build_retweet_network, StanceRecordSet};
use polarimeter::LouvainConfig;

const RECORDS: &str = r#"{"tweet_id":"1","author":"ana","stance":"favor","retweeters":["bo","cy","di"]}
{"tweet_id":"2","author":"bo","stance":"favor","retweeters":["ana","cy"]}
{"tweet_id":"3","author":"cy","stance":"favor","retweeters":["di"]}
{"tweet_id":"4","author":"eve","stance":"against","retweeters":["fay","gus","hal"]}
{"tweet_id":"5","author":"fay","stance":"against","retweeters":["eve","gus"]}
{"tweet_id":"6","author":"gus","stance":"against","retweeters":["hal"]}
{"tweet_id":"7","author":"ivy","stance":"neutral","retweeters":["di","hal"]}
"#;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let records = StanceRecordSet::parse(RECORDS.as_bytes(), Path::new("<inline>"))?;
    let net = build_retweet_network(&records)?;
    let mut out = String::new();
    for (user, s) in &net.scores.users {
        out.push_str(&format!("{user}: {}\n", s.stance.name()));
    }
    let report = analyze(
        &net.graph,
        &AnalyzeOptions {
            louvain: LouvainConfig::with_seed(3),
            runs: 20,
            threads: None,
        },
    )?;
    out.push_str(&format!(
        "{} users, {} edges, P = {:.4} (sd {:.4})\n",
        report.nodes, report.edges, report.polarization.mean, report.polarization.std
    ));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
