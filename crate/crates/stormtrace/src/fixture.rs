//! Deterministic synthetic corpus generator.
//!
//! Thirty posts over an eleven-day span with two planted topics on disjoint
//! vocabularies, a planted viral URL (outside the corpus, referenced by six
//! of the eight first-window posts of its topic and never elsewhere), an
//! in-corpus key post per topic, one cross-topic-free citation edge between
//! key posts, and reference timings that produce non-trivial boost scores.
//! The structure is fixed; the seed only varies the sampled word content.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The planted out-of-corpus viral URL: the expected top-1 key post of the
/// weather topic's first windows.
pub const VIRAL_URL: &str = "http://news.example.org/viral-story";

/// The in-corpus key post of the weather topic (overtakes the viral story in
/// the final window and cites it, producing the key-post graph edge).
pub const WEATHER_HUB_URL: &str = "http://blog.example.com/storm/p0";

/// The in-corpus key post of the database topic.
pub const DB_HUB_URL: &str = "http://forum.example.net/db/q0";

const WEATHER_WORDS: [&str; 30] = [
    "storm",
    "rain",
    "wind",
    "flood",
    "thunder",
    "lightning",
    "cloud",
    "hail",
    "gust",
    "downpour",
    "forecast",
    "barometer",
    "cyclone",
    "drizzle",
    "humidity",
    "blizzard",
    "snowfall",
    "frost",
    "tempest",
    "squall",
    "monsoon",
    "tornado",
    "hurricane",
    "overcast",
    "raincoat",
    "umbrella",
    "puddle",
    "thermometer",
    "meteorology",
    "windchill",
];

const DB_WORDS: [&str; 30] = [
    "database",
    "query",
    "index",
    "schema",
    "transaction",
    "shard",
    "replica",
    "latency",
    "throughput",
    "cache",
    "btree",
    "join",
    "commit",
    "rollback",
    "cursor",
    "partition",
    "vacuum",
    "checkpoint",
    "snapshot",
    "durability",
    "isolation",
    "consistency",
    "backup",
    "restore",
    "migration",
    "tablespace",
    "deadlock",
    "lockfile",
    "planner",
    "optimizer",
];

const AUTHORS: [&str; 30] = [
    "amy", "alan", "abby", "adam", "aria", "axel", "anna", "aldo", "ahmed", "alice", "ana", "ava",
    "amos", "asha", "arlo", "frank", "grace", "heidi", "ivan", "judy", "kim", "liam", "mona",
    "nils", "omar", "pia", "quinn", "rosa", "sven", "tara",
];

struct Plan {
    url: String,
    author_index: usize,
    /// Days (possibly fractional) after the corpus start.
    day: f64,
    refs: Vec<String>,
    weather: bool,
}

fn plan() -> Vec<Plan> {
    let weather_url = |i: usize| format!("http://blog.example.com/storm/p{i}");
    let db_url = |i: usize| format!("http://forum.example.net/db/q{i}");
    let mut posts = Vec::new();

    // Weather topic. p0 is the in-corpus hub: it cites the viral story and
    // is itself cited by the late posts p7..p11, overtaking the story once
    // the early viral references slide out of the window.
    posts.push(Plan {
        url: weather_url(0),
        author_index: 0,
        day: 0.0,
        refs: vec![VIRAL_URL.to_string()],
        weather: true,
    });
    for i in 1..=6 {
        posts.push(Plan {
            url: weather_url(i),
            author_index: i,
            day: i as f64,
            refs: vec![VIRAL_URL.to_string()],
            weather: true,
        });
    }
    for (i, day) in [(7, 7.0), (8, 7.75), (9, 8.75), (10, 10.0), (11, 9.9)] {
        posts.push(Plan {
            url: weather_url(i),
            author_index: i,
            day,
            refs: vec![weather_url(0)],
            weather: true,
        });
    }
    for (i, day) in [(12, 2.5), (13, 4.5), (14, 6.5)] {
        posts.push(Plan {
            url: weather_url(i),
            author_index: i,
            day,
            refs: Vec::new(),
            weather: true,
        });
    }

    // Database topic. q0 is the hub; q1..q7 cite it inside the first
    // window, q8..q10 in successive later windows (new distinct adopters,
    // which is what gives the early referencing authors a boost).
    posts.push(Plan {
        url: db_url(0),
        author_index: 15,
        day: 0.0,
        refs: Vec::new(),
        weather: false,
    });
    for i in 1..=7 {
        posts.push(Plan {
            url: db_url(i),
            author_index: 15 + i,
            day: i as f64,
            refs: vec![db_url(0)],
            weather: false,
        });
    }
    for (i, day) in [(8, 7.5), (9, 8.5), (10, 9.5)] {
        posts.push(Plan {
            url: db_url(i),
            author_index: 15 + i,
            day,
            refs: vec![db_url(0)],
            weather: false,
        });
    }
    for (i, day) in [(11, 1.5), (12, 3.5), (13, 5.5), (14, 9.0)] {
        posts.push(Plan {
            url: db_url(i),
            author_index: 15 + i,
            day,
            refs: Vec::new(),
            weather: false,
        });
    }
    posts
}

/// Generate the corpus as line-delimited JSON, one record per post.
///
/// Deterministic for a given seed; ids and refs are written with mixed-case
/// hosts and `utm_*` noise so ingest normalization is exercised end to end.
pub fn generate(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: chrono::DateTime<chrono::Utc> = "2024-03-01T00:00:00Z".parse().expect("valid date");
    let mut lines = Vec::new();
    for (idx, plan) in plan().iter().enumerate() {
        let vocab: &[&str] = if plan.weather {
            &WEATHER_WORDS
        } else {
            &DB_WORDS
        };
        let n_words = rng.random_range(14..=22);
        let mut words: Vec<&str> = (0..n_words)
            .map(|_| vocab[rng.random_range(0..vocab.len())])
            .collect();
        // sprinkle the refs into the text; cleaning must drop them
        for r in &plan.refs {
            words.push("see");
            words.push(r.as_str());
        }
        let content = words.join(" ");

        let published = base + chrono::Duration::seconds((plan.day * 86_400.0).round() as i64);
        // every third record carries ingest noise in its URLs
        let noisy = idx % 3 == 0;
        let id = if noisy {
            plan.url.replacen("http://", "HTTP://", 1)
        } else {
            plan.url.clone()
        };
        let refs: Vec<String> = plan
            .refs
            .iter()
            .map(|r| {
                if noisy {
                    format!("{r}?utm_source=fixture&utm_medium=test")
                } else {
                    r.clone()
                }
            })
            .collect();
        lines.push(
            serde_json::json!({
                "id": id,
                "content": content,
                "author": AUTHORS[plan.author_index],
                "date": published.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                "refs": refs,
            })
            .to_string(),
        );
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
