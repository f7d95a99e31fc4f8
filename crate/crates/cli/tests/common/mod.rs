//! Shared helpers for the CLI test suites: deterministic keyword-separable
//! corpus generation, prediction-file fixtures, and a runner for the
//! compiled binary.
#![allow(dead_code)] // each test crate uses a different subset

use hiertext_core::data::Dataset;
use hiertext_core::model::ProbabilityVector;
use hiertext_core::predictions::PredictionSet;
use hiertext_core::rng::SplitMix64;
use hiertext_core::taxonomy::Taxonomy;
use std::path::Path;
use std::process::Command;

pub const NOT_POOL: [&str; 6] = ["meadow", "river", "willow", "lantern", "breeze", "orchard"];
pub const CAT_POOLS: [[&str; 3]; 4] = [
    ["granite", "ember", "falcon"],
    ["cobalt", "thistle", "raven"],
    ["amber", "juniper", "heron"],
    ["umber", "bramble", "osprey"],
];
pub const FILLER: [&str; 8] = ["the", "a", "of", "and", "post", "comment", "thread", "reply"];
/// (category, sub) codes of the eleven fine-grained classes, in order.
pub const VECTOR_CODES: [(u8, u8); 11] = [
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 1),
    (3, 2),
    (3, 3),
    (3, 4),
    (4, 1),
    (4, 2),
];

fn pick<'a>(pool: &[&'a str], rng: &mut SplitMix64) -> &'a str {
    pool[rng.next_below(pool.len() as u64) as usize]
}

fn not_sexist_row(id: usize, rng: &mut SplitMix64) -> String {
    format!(
        "r-{id},{} {} {} {} {},not sexist,none,none",
        pick(&NOT_POOL, rng),
        pick(&FILLER, rng),
        pick(&NOT_POOL, rng),
        pick(&FILLER, rng),
        pick(&NOT_POOL, rng),
    )
}

fn sexist_row(id: usize, c: u8, s: u8, rng: &mut SplitMix64) -> String {
    let pool = CAT_POOLS[c as usize - 1];
    format!(
        "r-{id},{} sigil{c}{s} {} {} sigil{c}{s} {},sexist,{c}. x,{c}.{s} x",
        pick(&pool, rng),
        pick(&FILLER, rng),
        pick(&pool, rng),
        pick(&FILLER, rng),
    )
}

/// Writes a hierarchical corpus CSV: `n_not` not-sexist rows followed by
/// `cat_counts[c]` sexist rows for category c+1, spread round-robin over
/// that category's vectors. Every row carries consistent labels at all
/// levels, and every class at every level is keyword-separable.
pub fn hier_corpus(path: &Path, n_not: usize, cat_counts: [usize; 4], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    let mut lines =
        vec!["rewire_id,text,label_sexist,label_category,label_vector".to_string()];
    let mut id = 0;
    for _ in 0..n_not {
        lines.push(not_sexist_row(id, &mut rng));
        id += 1;
    }
    for (cat_idx, &count) in cat_counts.iter().enumerate() {
        let c = cat_idx as u8 + 1;
        let subs: Vec<u8> = VECTOR_CODES
            .iter()
            .filter(|&&(vc, _)| vc == c)
            .map(|&(_, s)| s)
            .collect();
        for i in 0..count {
            lines.push(sexist_row(id, c, subs[i % subs.len()], &mut rng));
            id += 1;
        }
    }
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    pub fn expect_success(self, what: &str) -> Self {
        assert_eq!(
            self.code, 0,
            "{what} failed (exit {})\nstdout:\n{}\nstderr:\n{}",
            self.code, self.stdout, self.stderr
        );
        self
    }
}

/// Runs the compiled `hiertext` binary with the given arguments.
pub fn hiertext(args: &[&str]) -> RunOutput {
    let output = Command::new(env!("CARGO_BIN_EXE_hiertext"))
        .args(args)
        .output()
        .expect("the hiertext binary spawns");
    RunOutput {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

/// Label indices of a dataset's gold labels within the canonical class
/// list of its level.
pub fn gold_indices(ds: &Dataset) -> Vec<usize> {
    let class_list = Taxonomy::class_list(ds.level());
    ds.labels()
        .iter()
        .map(|l| class_list.iter().position(|x| x == l).unwrap())
        .collect()
}

/// A prediction set that reproduces the dataset's gold labels, with
/// probability `peak` on the gold class and the rest spread evenly.
pub fn gold_predictions(ds: &Dataset, model_id: &str, peak: f64) -> PredictionSet {
    let k = Taxonomy::class_list(ds.level()).len();
    let labels = gold_indices(ds);
    let rest = (1.0 - peak) / (k as f64 - 1.0);
    let probs = labels
        .iter()
        .map(|&l| {
            let mut p = vec![rest; k];
            p[l] = peak;
            ProbabilityVector::new(p).unwrap()
        })
        .collect();
    PredictionSet::new(
        model_id.to_string(),
        ds.level(),
        ds.ids().map(str::to_string).collect(),
        labels,
        probs,
    )
    .unwrap()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// The `macro_f1` field of a metrics JSON file.
pub fn macro_f1_of(path: &Path) -> f64 {
    read_json(path)["macro_f1"]
        .as_f64()
        .unwrap_or_else(|| panic!("{}: no macro_f1", path.display()))
}
