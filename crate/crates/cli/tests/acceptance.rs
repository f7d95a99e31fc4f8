//! Acceptance suite: one test per numbered release criterion. Each test
//! checks its criterion at the stated tolerance and prints a single
//! `criterion N: PASS` line (visible with `--nocapture`) describing what
//! held. Criteria 1–7 exercise the library against independent oracles;
//! criteria 8–10 drive the compiled binary end to end.
//!
//! Criterion 10 additionally accepts a real EDOS-format corpus through the
//! `EDOS_CSV` environment variable; without it, the full gated pipeline
//! runs on a synthetic corpus instead.

mod common;

use common::{hier_corpus, hiertext, macro_f1_of};
use hiertext_core::data::{
    class_weights, stratified_kfold, stratified_split, Dataset, DatasetStats, Example, SplitSpec,
};
use hiertext_core::ensemble::{grid_search_weights, majority_vote};
use hiertext_core::eval::{confusion_matrix, evaluate_run, metrics};
use hiertext_core::features::FeatureVector;
use hiertext_core::model::{
    cross_entropy, focal_loss, loss_and_gradient, Alpha, FocalLossConfig, LossSpec, ModelParams,
    ProbabilityVector, TrainConfig,
};
use hiertext_core::predictions::PredictionSet;
use hiertext_core::rng::SplitMix64;
use hiertext_core::taxonomy::{Label, TaskLevel, Taxonomy};
use std::path::Path;
use std::time::{Duration, Instant};
use tempfile::TempDir;

fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// A strictly positive random probability vector (Dirichlet(1) via
/// exponential draws), so log-losses stay finite without clamping.
fn random_probs(k: usize, rng: &mut SplitMix64) -> ProbabilityVector {
    let draws: Vec<f64> = (0..k).map(|_| -(1.0 - unit(rng)).ln() + 1e-9).collect();
    let total: f64 = draws.iter().sum();
    ProbabilityVector::new(draws.iter().map(|d| d / total).collect()).unwrap()
}

/// A dataset with `counts[c]` examples of canonical class c, in shuffled
/// order with unique ids.
fn random_dataset(level: TaskLevel, counts: &[usize], rng: &mut SplitMix64) -> Dataset {
    let classes = Taxonomy::class_list(level);
    assert_eq!(counts.len(), classes.len());
    let mut class_seq: Vec<usize> = Vec::new();
    for (c, &count) in counts.iter().enumerate() {
        class_seq.extend(std::iter::repeat(c).take(count));
    }
    rng.shuffle(&mut class_seq);
    let examples = class_seq
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let label: Label = classes[c];
            Example {
                id: format!("e-{i}"),
                text: format!("text {i}"),
                label_a: label.as_a(),
                label_b: label.as_b(),
                label_c: label.as_c(),
            }
        })
        .collect();
    Dataset::new(level, examples).unwrap()
}

/// A prediction set with random probability rows, aligned with `ds`.
fn random_predictions(model_id: &str, ds: &Dataset, rng: &mut SplitMix64) -> PredictionSet {
    let k = Taxonomy::class_list(ds.level()).len();
    let probs: Vec<ProbabilityVector> = (0..ds.len()).map(|_| random_probs(k, rng)).collect();
    let labels = probs.iter().map(ProbabilityVector::argmax).collect();
    PredictionSet::new(
        model_id.to_string(),
        ds.level(),
        ds.ids().map(str::to_string).collect(),
        labels,
        probs,
    )
    .unwrap()
}

#[test]
fn criterion_01_focal_gamma_zero_equals_cross_entropy() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(1001);
    let cfg = FocalLossConfig {
        alpha: Alpha::Scalar(1.0),
        gamma: 0.0,
    };
    let mut max_err = 0.0f64;
    for i in 0..1000 {
        let (p, t) = if i % 10 == 9 {
            // Stress the clamp region with a nearly-degenerate row.
            let spike = ProbabilityVector::new(vec![1e-14, 1.0 - 1e-14]).unwrap();
            (spike, i % 2)
        } else {
            let k = [2, 4, 11][i % 3];
            let p = random_probs(k, &mut rng);
            let t = rng.next_below(k as u64) as usize;
            (p, t)
        };
        let w = if i % 2 == 0 {
            None
        } else {
            Some(0.25 + 4.0 * unit(&mut rng))
        };
        let err = (focal_loss(&p, t, &cfg, w) - cross_entropy(&p, t, w)).abs();
        max_err = max_err.max(err);
    }
    let elapsed = start.elapsed();
    assert!(max_err < 1e-12, "max abs error {max_err:e}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1: PASS — max |focal(γ=0, α=1) − cross-entropy| = {max_err:.2e} \
         over 1000 draws (tolerance 1e-12) in {elapsed:?}"
    );
}

#[test]
fn criterion_02_analytic_gradient_matches_central_differences() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(2002);
    let dim = 16;
    let h = 1e-5;
    let mut checked = 0usize;
    let mut max_rel = 0.0f64;

    for case in 0..50 {
        let level = if case % 2 == 0 { TaskLevel::A } else { TaskLevel::B };
        let class_list = Taxonomy::class_list(level);
        let k = class_list.len();
        // Moderate parameter and feature scales keep every probability
        // far from the clamp bounds, where the loss is smooth.
        let weights: Vec<f64> = (0..k * dim).map(|_| unit(&mut rng) - 0.5).collect();
        let bias: Vec<f64> = (0..k).map(|_| unit(&mut rng) - 0.5).collect();
        let params =
            ModelParams::from_parts(class_list.clone(), dim, weights.clone(), bias.clone())
                .unwrap();

        let n_examples = 1 + case % 3;
        let feats: Vec<FeatureVector> = (0..n_examples)
            .map(|_| {
                let mut idx: Vec<u32> = Vec::new();
                while idx.len() < 5 {
                    let i = rng.next_below(dim as u64) as u32;
                    if !idx.contains(&i) {
                        idx.push(i);
                    }
                }
                idx.sort_unstable();
                let pairs: Vec<(u32, f64)> =
                    idx.iter().map(|&i| (i, 0.5 + unit(&mut rng))).collect();
                FeatureVector::from_pairs(dim, &pairs).unwrap()
            })
            .collect();
        let targets: Vec<usize> = (0..n_examples)
            .map(|_| rng.next_below(k as u64) as usize)
            .collect();
        let batch: Vec<(&FeatureVector, usize)> =
            feats.iter().zip(targets.iter().copied()).collect();

        let loss = match case % 5 {
            0 => LossSpec::CrossEntropy,
            1 => LossSpec::Focal(FocalLossConfig {
                alpha: Alpha::Scalar(1.0),
                gamma: 0.0,
            }),
            2 => LossSpec::Focal(FocalLossConfig {
                alpha: Alpha::Scalar(0.5 + unit(&mut rng)),
                gamma: 0.5,
            }),
            3 => LossSpec::Focal(FocalLossConfig {
                alpha: Alpha::PerClass((0..k).map(|_| 0.3 + unit(&mut rng)).collect()),
                gamma: 2.0,
            }),
            _ => LossSpec::Focal(FocalLossConfig {
                alpha: Alpha::Scalar(1.3),
                gamma: 3.7,
            }),
        };
        let class_weights = if case % 3 == 0 {
            Some((0..k).map(|_| 0.3 + 2.0 * unit(&mut rng)).collect())
        } else {
            None
        };
        let cfg = TrainConfig {
            loss,
            class_weights,
            ..TrainConfig::default()
        };

        let (_, grad) = loss_and_gradient(&params, &batch, &cfg).unwrap();
        let loss_at = |w: &[f64], b: &[f64]| -> f64 {
            let p = ModelParams::from_parts(class_list.clone(), dim, w.to_vec(), b.to_vec())
                .unwrap();
            loss_and_gradient(&p, &batch, &cfg).unwrap().0
        };

        let mut check = |analytic: f64, fd: f64, what: String| {
            if analytic.abs() < 1e-10 && fd.abs() < 1e-10 {
                return;
            }
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs());
            assert!(
                rel < 1e-5,
                "{what}: analytic {analytic:e} vs central difference {fd:e} (rel {rel:e})"
            );
            max_rel = max_rel.max(rel);
            checked += 1;
        };
        for i in 0..weights.len() {
            let mut plus = weights.clone();
            let mut minus = weights.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (loss_at(&plus, &bias) - loss_at(&minus, &bias)) / (2.0 * h);
            check(grad.weights[i], fd, format!("case {case} weight {i}"));
        }
        for j in 0..bias.len() {
            let mut plus = bias.clone();
            let mut minus = bias.clone();
            plus[j] += h;
            minus[j] -= h;
            let fd = (loss_at(&weights, &plus) - loss_at(&weights, &minus)) / (2.0 * h);
            check(grad.bias[j], fd, format!("case {case} bias {j}"));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "criterion 2: PASS — {checked} gradient coordinates across 50 losses within \
         rel 1e-5 of central differences (worst {max_rel:.2e}) in {elapsed:?}"
    );
}

#[test]
fn criterion_03_balanced_class_weights_match_the_reference_counts() {
    // 3398 positives and 10602 negatives, canonical order [sexist, not].
    let stats = DatasetStats {
        n_samples: 14000,
        n_classes: 2,
        class_list: Taxonomy::class_list(TaskLevel::A),
        counts: vec![3398, 10602],
    };
    let w = class_weights(&stats).unwrap();
    assert!((w[0] - 2.060035).abs() < 1e-5, "sexist weight {}", w[0]);
    assert!((w[1] - 0.660253).abs() < 1e-5, "not-sexist weight {}", w[1]);
    let recovered: f64 = w
        .iter()
        .zip(&stats.counts)
        .map(|(wi, &c)| wi * c as f64)
        .sum();
    assert!((recovered - 14000.0).abs() < 1e-6, "Σ w·count = {recovered}");
    println!(
        "criterion 3: PASS — class weights [{:.6}, {:.6}] within 1e-5 of the reference \
         values and Σ weight·count = {recovered:.9} (tolerance 1e-6)",
        w[0], w[1]
    );
}

/// Direct-definition metrics: per-class F1 over all `full_k` classes,
/// macro F1, and accuracy, computed by scanning the pairs.
fn oracle_metrics(truth: &[usize], pred: &[usize], full_k: usize) -> (Vec<f64>, f64, f64) {
    let mut f1s = Vec::with_capacity(full_k);
    for c in 0..full_k {
        let tp = truth.iter().zip(pred).filter(|(t, p)| **t == c && **p == c).count() as f64;
        let fp = truth.iter().zip(pred).filter(|(t, p)| **t != c && **p == c).count() as f64;
        let fn_ = truth.iter().zip(pred).filter(|(t, p)| **t == c && **p != c).count() as f64;
        let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let recall = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        f1s.push(f1);
    }
    let macro_f1 = f1s.iter().sum::<f64>() / full_k as f64;
    let correct = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    let accuracy = if truth.is_empty() {
        0.0
    } else {
        correct as f64 / truth.len() as f64
    };
    (f1s, macro_f1, accuracy)
}

#[test]
fn criterion_04_metrics_match_the_oracle_on_every_small_assignment() {
    let start = Instant::now();
    let mut cases = 0usize;
    // The 2-class level in full, and the 4-class level restricted to an
    // alphabet of its first three classes (alphabet size ≤ 3 keeps the
    // enumeration exhaustive within the time budget).
    for (level, alphabet) in [(TaskLevel::A, 2usize), (TaskLevel::B, 3usize)] {
        let classes = Taxonomy::class_list(level);
        let full_k = classes.len();
        for n in 1..=6usize {
            let combos = alphabet.pow(2 * n as u32);
            let mut truth_idx = vec![0usize; n];
            let mut pred_idx = vec![0usize; n];
            let mut truth: Vec<Label> = Vec::with_capacity(n);
            let mut pred: Vec<Label> = Vec::with_capacity(n);
            for code in 0..combos {
                let mut c = code;
                for slot in 0..n {
                    truth_idx[slot] = c % alphabet;
                    c /= alphabet;
                    pred_idx[slot] = c % alphabet;
                    c /= alphabet;
                }
                truth.clear();
                truth.extend(truth_idx.iter().map(|&i| classes[i]));
                pred.clear();
                pred.extend(pred_idx.iter().map(|&i| classes[i]));

                let report = metrics(&confusion_matrix(&truth, &pred, level).unwrap());
                let (f1s, macro_f1, accuracy) = oracle_metrics(&truth_idx, &pred_idx, full_k);
                for (got, want) in report.per_class.iter().zip(&f1s) {
                    assert!(
                        got.f1 == *want,
                        "f1 mismatch at truth {truth_idx:?} pred {pred_idx:?}: {} vs {want}",
                        got.f1
                    );
                }
                assert!(report.macro_f1 == macro_f1, "macro mismatch");
                assert!(report.accuracy == accuracy, "accuracy mismatch");
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 4: PASS — {cases} exhaustive assignments (n ≤ 6, alphabet ≤ 3) \
         matched the direct-count oracle exactly in {elapsed:?}"
    );
}

#[test]
fn criterion_05_majority_class_baseline_macro_f1() {
    // 10602 negatives and 3398 positives, everything predicted negative.
    let classes = Taxonomy::class_list(TaskLevel::A);
    let mut truth = vec![classes[1]; 10602];
    truth.extend(vec![classes[0]; 3398]);
    let pred = vec![classes[1]; 14000];
    let report = metrics(&confusion_matrix(&truth, &pred, TaskLevel::A).unwrap());

    // The majority class scores F1 = 2p/(p+1) at prevalence p, the
    // minority class scores 0, and the macro averages the two.
    let p = 10602.0 / 14000.0;
    let derived = (2.0 * p / (p + 1.0)) / 2.0;
    assert!((report.macro_f1 - derived).abs() < 1e-12);
    assert!(
        (report.macro_f1 - 0.4309).abs() < 1e-4,
        "macro F1 {}",
        report.macro_f1
    );
    println!(
        "criterion 5: PASS — all-majority baseline macro F1 = {:.6}, equal to the \
         closed form (2p/(p+1))/2 at p = 10602/14000 (tolerance 1e-4 around 0.4309)",
        report.macro_f1
    );
}

#[test]
fn criterion_06_grid_ensemble_dominates_members_and_vote_ignores_order() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(6006);

    // Part 1: on 20 random member sets, the grid-searched weighted
    // ensemble scores at least as well as every individual member.
    for round in 0..20 {
        let n_pos = 8 + (round % 5) * 3;
        let ds = random_dataset(TaskLevel::A, &[n_pos, 40 - n_pos], &mut rng);
        let members: Vec<PredictionSet> = (0..3)
            .map(|m| random_predictions(&format!("m{m}"), &ds, &mut rng))
            .collect();
        let (_, best) = grid_search_weights(&members, &ds, 0.25).unwrap();
        for member in &members {
            let own = evaluate_run(member, &ds).unwrap().macro_f1;
            assert!(
                best >= own - 1e-12,
                "round {round}: ensemble {best} below member {own}"
            );
        }
    }

    // Part 2: on 100 random cases, majority voting is invariant under
    // every permutation of its members.
    const ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for case in 0..100 {
        let level = [TaskLevel::A, TaskLevel::B, TaskLevel::C][case % 3];
        let k = Taxonomy::class_list(level).len();
        let mut counts = vec![0usize; k];
        for slot in counts.iter_mut() {
            *slot = 2 + rng.next_below(4) as usize;
        }
        let ds = random_dataset(level, &counts, &mut rng);
        let members: Vec<PredictionSet> = (0..3)
            .map(|m| random_predictions(&format!("m{m}"), &ds, &mut rng))
            .collect();
        let baseline = majority_vote(&members).unwrap();
        for order in &ORDERS[1..] {
            let permuted: Vec<PredictionSet> =
                order.iter().map(|&i| members[i].clone()).collect();
            assert_eq!(
                majority_vote(&permuted).unwrap(),
                baseline,
                "case {case}: vote changed under member order {order:?}"
            );
        }
    }
    println!(
        "criterion 6: PASS — grid ensemble ≥ every member on 20 random sets; majority \
         vote identical under all member orders on 100 cases in {:?}",
        start.elapsed()
    );
}

/// Largest-remainder apportionment of train seats over the non-empty
/// classes, mirrored independently: floor(fraction·count) each, remaining
/// seats to the largest fractional remainders (earliest class on ties).
fn apportion_oracle(present_counts: &[usize], fraction: f64) -> Vec<usize> {
    let n: usize = present_counts.iter().sum();
    let target = (fraction * n as f64).round() as usize;
    let mut takes: Vec<usize> = Vec::with_capacity(present_counts.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(present_counts.len());
    for (i, &count) in present_counts.iter().enumerate() {
        let exact = fraction * count as f64;
        takes.push(exact.floor() as usize);
        remainders.push((i, exact - exact.floor()));
    }
    let extras = target.saturating_sub(takes.iter().sum::<usize>());
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(i, _) in remainders.iter().take(extras) {
        takes[i] += 1;
    }
    takes
}

#[test]
fn criterion_07_partitioners_cover_exactly_and_balance_within_one() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(7007);
    for case in 0..100u64 {
        let level = [TaskLevel::A, TaskLevel::B, TaskLevel::C][case as usize % 3];
        let full_k = Taxonomy::class_list(level).len();
        // Each class is either absent or has 2–25 examples; at least two
        // classes are always present.
        let mut counts = vec![0usize; full_k];
        loop {
            for slot in counts.iter_mut() {
                *slot = if rng.next_below(4) == 0 {
                    0
                } else {
                    2 + rng.next_below(24) as usize
                };
            }
            if counts.iter().filter(|&&c| c > 0).count() >= 2 {
                break;
            }
        }
        let ds = random_dataset(level, &counts, &mut rng);
        let n = ds.len();
        let labels = ds.labels();

        // k-fold: an exact partition, fold sizes within ±1 globally and
        // per class, and deterministic under the same seed.
        let k = 2 + (case as usize % 4).min(n - 2);
        let folds = stratified_kfold(&ds, k, 900 + case).unwrap();
        assert_eq!(folds.fold_of().len(), n);
        assert!(folds.fold_of().iter().all(|&f| f < k));
        let sizes = folds.fold_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), n);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for class in Taxonomy::class_list(level) {
            let mut per_fold = vec![0usize; k];
            for (i, label) in labels.iter().enumerate() {
                if *label == class {
                    per_fold[folds.fold_of()[i]] += 1;
                }
            }
            let (lo, hi) = (per_fold.iter().min().unwrap(), per_fold.iter().max().unwrap());
            assert!(hi - lo <= 1, "class {} spread {per_fold:?}", class.render());
        }
        assert_eq!(stratified_kfold(&ds, k, 900 + case).unwrap(), folds);

        // Split: disjoint cover, order preservation, and per-class train
        // counts equal to the independent apportionment oracle.
        let fraction = [0.5, 0.7, 0.8, 0.9][case as usize % 4];
        let spec = SplitSpec {
            train_fraction: fraction,
            seed: 1700 + case,
            stratify: true,
        };
        let (train, val) = stratified_split(&ds, &spec).unwrap();
        assert_eq!(train.len() + val.len(), n);
        let mut all_ids: Vec<&str> = train.ids().chain(val.ids()).collect();
        all_ids.sort_unstable();
        let mut expected: Vec<&str> = ds.ids().collect();
        expected.sort_unstable();
        assert_eq!(all_ids, expected, "split must cover each id exactly once");

        let present: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
        let takes = apportion_oracle(&present, fraction);
        let train_labels = train.labels();
        let mut gi = 0;
        for (c, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let class = Taxonomy::class_list(level)[c];
            let got = train_labels.iter().filter(|l| **l == class).count();
            assert_eq!(
                got, takes[gi],
                "case {case}: class {} train count",
                class.render()
            );
            gi += 1;
        }
    }
    println!(
        "criterion 7: PASS — 100 random datasets: fold partitions exact and balanced \
         within ±1; splits disjointly cover and match the largest-remainder oracle \
         in {:?}",
        start.elapsed()
    );
}

fn s(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

/// Runs `train` on `data` at `level` with the desk profile, returning the
/// holdout macro F1 and the wall time.
fn desk_train(data: &Path, level: &str, out: &Path) -> (f64, Duration) {
    let t0 = Instant::now();
    hiertext(&[
        "train",
        "--level",
        level,
        "--data",
        &s(data),
        "--profile",
        "desk",
        "--out-dir",
        &s(out),
    ])
    .expect_success("train");
    (macro_f1_of(&out.join("metrics.json")), t0.elapsed())
}

#[test]
fn criterion_08_synthetic_corpora_train_accurately_within_budget() {
    let dir = TempDir::new().unwrap();
    let binary = dir.path().join("binary.csv");
    let fourclass = dir.path().join("fourclass.csv");
    hier_corpus(&binary, 1400, [200, 160, 140, 100], 808);
    hier_corpus(&fourclass, 0, [800, 500, 400, 300], 809);

    let (macro_a, time_a) = desk_train(&binary, "A", &dir.path().join("run_a"));
    assert!(time_a < Duration::from_secs(60), "binary training took {time_a:?}");
    assert!(macro_a >= 0.95, "binary holdout macro F1 {macro_a}");

    let (macro_b, time_b) = desk_train(&fourclass, "B", &dir.path().join("run_b"));
    assert!(time_b < Duration::from_secs(60), "4-class training took {time_b:?}");
    assert!(macro_b >= 0.90, "4-class holdout macro F1 {macro_b}");

    let cv_out = dir.path().join("run_cv");
    hiertext(&[
        "cv",
        "--level",
        "A",
        "--data",
        &s(&binary),
        "--profile",
        "desk",
        "--k",
        "5",
        "--out-dir",
        &s(&cv_out),
    ])
    .expect_success("cv");
    let pooled = common::read_json(&cv_out.join("cv_metrics.json"))["pooled"]["macro_f1"]
        .as_f64()
        .expect("cv_metrics.json has a pooled macro_f1");
    assert!(
        (pooled - macro_a).abs() <= 0.05,
        "pooled out-of-fold macro F1 {pooled} vs holdout {macro_a}"
    );
    println!(
        "criterion 8: PASS — 2000-row corpora: binary holdout macro F1 {macro_a:.4} \
         (≥ 0.95) in {time_a:?}; 4-class {macro_b:.4} (≥ 0.90) in {time_b:?}; 5-fold \
         pooled {pooled:.4} within 0.05 of holdout"
    );
}

#[test]
fn criterion_09_identical_seeds_reproduce_artifacts_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let binary = dir.path().join("binary.csv");
    hier_corpus(&binary, 1400, [200, 160, 140, 100], 808);

    let run1 = dir.path().join("t1");
    let run2 = dir.path().join("t2");
    for out in [&run1, &run2] {
        hiertext(&[
            "train", "--level", "A", "--data", &s(&binary), "--profile", "desk",
            "--out-dir", &s(out),
        ])
        .expect_success("train");
    }
    for name in ["model.htxm", "predictions.csv", "metrics.json"] {
        assert_eq!(
            std::fs::read(run1.join(name)).unwrap(),
            std::fs::read(run2.join(name)).unwrap(),
            "{name} differs between identically-seeded runs"
        );
    }

    let cv1 = dir.path().join("c1");
    let cv2 = dir.path().join("c2");
    for out in [&cv1, &cv2] {
        hiertext(&[
            "cv", "--level", "A", "--data", &s(&binary), "--profile", "desk",
            "--k", "5", "--out-dir", &s(out),
        ])
        .expect_success("cv");
    }
    for name in [
        "oof_predictions.csv",
        "cv_metrics.json",
        "folds.csv",
        "model_fold0.htxm",
        "model_fold1.htxm",
        "model_fold2.htxm",
        "model_fold3.htxm",
        "model_fold4.htxm",
    ] {
        assert_eq!(
            std::fs::read(cv1.join(name)).unwrap(),
            std::fs::read(cv2.join(name)).unwrap(),
            "{name} differs between identically-seeded runs"
        );
    }
    println!(
        "criterion 9: PASS — repeated same-seed train and 5-fold runs reproduced every \
         model file and prediction CSV byte for byte"
    );
}

/// Trains all three levels on `corpus`, runs the gated predict chain, and
/// returns the evaluate output that includes the hierarchy check.
fn gated_chain(corpus: &Path, work: &Path) -> String {
    for level in ["A", "B", "C"] {
        hiertext(&[
            "train", "--level", level, "--data", &s(corpus), "--profile", "desk",
            "--out-dir", &s(&work.join(format!("run_{level}"))),
        ])
        .expect_success("train");
    }
    let model = |l: &str| s(&work.join(format!("run_{l}/model.htxm")));
    let preds = |l: &str| s(&work.join(format!("preds_{l}.csv")));
    hiertext(&[
        "predict", "--model", &model("A"), "--input", &s(corpus), "--output", &preds("A"),
    ])
    .expect_success("predict A");
    hiertext(&[
        "predict", "--model", &model("B"), "--input", &s(corpus),
        "--gate-on", &preds("A"), "--output", &preds("B"),
    ])
    .expect_success("predict B");
    hiertext(&[
        "predict", "--model", &model("C"), "--input", &s(corpus),
        "--gate-on", &preds("B"), "--output", &preds("C"),
    ])
    .expect_success("predict C");
    hiertext(&[
        "evaluate",
        "--predictions", &preds("C"),
        "--gold", &s(corpus),
        "--level", "C",
        "--check-hierarchy",
        "--task-a", &preds("A"),
        "--task-b", &preds("B"),
        "--task-c", &preds("C"),
    ])
    .expect_success("evaluate")
    .stdout
}

#[test]
fn criterion_10_full_pipeline_runs_gated_with_zero_violations() {
    println!(
        "criterion 10: NOTE — headline scores reported for large fine-tuned transformer \
         ensembles on the original shared-task splits (macro F1 0.8392 binary / 0.6092 \
         category / 0.4319 fine-grained on test; 0.8411 / 0.6592 / 0.4469 on dev) need \
         pretrained language models and GPU fine-tuning. They are stated for context \
         only and are not asserted by this suite."
    );
    let dir = TempDir::new().unwrap();
    let (corpus, source) = match std::env::var("EDOS_CSV") {
        Ok(path) => (std::path::PathBuf::from(path), "EDOS_CSV corpus"),
        Err(_) => {
            let path = dir.path().join("synthetic.csv");
            hier_corpus(&path, 268, [40, 36, 32, 24], 1010);
            (path, "synthetic corpus (EDOS_CSV not set)")
        }
    };
    let stdout = gated_chain(&corpus, dir.path());
    assert!(
        stdout.contains("hierarchy_violations 0"),
        "gated pipeline reported violations:\n{stdout}"
    );
    println!(
        "criterion 10: PASS — full gated three-level pipeline on the {source} finished \
         with hierarchy_violations 0"
    );
}
