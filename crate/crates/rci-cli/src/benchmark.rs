//! Full benchmark loop: simulate, score with every selected method, evaluate
//! against the generated ground truth, aggregate over replications, and
//! optionally time the four-way extraction ablation.
//!
//! Computed results (`report.json`, `summary.json`) are deterministic
//! functions of the configuration; measured wall-clock values live in
//! `timings.json`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use rci_core::data::DataMatrix;
use rci_core::eval::{ground_truth_ranking, mse_scores, rbo_unweighted, rbo_weighted};
use rci_core::io::{write_json_pretty, MetricReport};
use rci_core::lingam::{direct_lingam, local_direct_lingam, RootFinder};
use rci_core::rci::{rank_row, Ranking, ShapleyMatrix};
use rci_core::rng::{derive_seed, Stream};
use rci_core::sem::{generate_sem, sample_cohort, true_shapley, SampledCohort};
use rci_core::{Error, Result};
use serde::Serialize;

use crate::config::{
    parse_methods, validate_alpha, validate_en, validate_n, validate_p, validate_reps,
    validate_test_frac, Method, ModeArg,
};
use crate::methods::{make_split, run_method};

pub struct BenchmarkArgs {
    pub n: usize,
    pub p: usize,
    pub en: f64,
    pub reps: usize,
    pub alpha: f64,
    pub methods: String,
    pub mode: ModeArg,
    pub seed: u64,
    pub test_frac: f64,
    pub workers: usize,
    pub ablation: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
struct RepRow {
    method: String,
    n: usize,
    p: usize,
    replication: usize,
    rbo_weighted: f64,
    rbo_unweighted: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kept: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure_evals: Option<u64>,
}

#[derive(Serialize)]
struct Aggregate {
    mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci95_half_width: Option<f64>,
}

#[derive(Serialize)]
struct MethodAggregate {
    method: String,
    replications: usize,
    rbo_weighted: Aggregate,
    rbo_unweighted: Aggregate,
    #[serde(skip_serializing_if = "Option::is_none")]
    mse: Option<Aggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_kept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_measure_evals: Option<f64>,
}

#[derive(Serialize, Clone)]
struct ConfigEcho {
    n: usize,
    p: usize,
    en: f64,
    reps: usize,
    alpha: f64,
    seed: u64,
    test_frac: f64,
    methods: Vec<String>,
    ablation: bool,
}

#[derive(Serialize)]
struct Report {
    config: ConfigEcho,
    replications: Vec<RepRow>,
}

#[derive(Serialize)]
struct AblationEvals {
    variant: String,
    mean_measure_evals: f64,
}

#[derive(Serialize)]
struct Summary {
    config: ConfigEcho,
    methods: Vec<MethodAggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ablation_measure_evals: Option<Vec<AblationEvals>>,
}

#[derive(Serialize)]
struct AblationTiming {
    variant: String,
    mean_seconds: f64,
    speedup_vs_original: f64,
    seconds: Vec<f64>,
}

#[derive(Serialize)]
struct Timings {
    replications: Vec<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ablation: Option<Vec<AblationTiming>>,
}

const ABLATION_VARIANTS: [&str; 4] = ["local_plus", "local", "plus", "original"];

fn make_cohort(args: &BenchmarkArgs, rep: usize) -> Result<(SampledCohort, rci_core::sem::GroundTruthSem)> {
    let rep_seed = derive_seed(args.seed, Stream::Replication, rep as u64);
    let sem = generate_sem(args.p, args.en, rep_seed)?;
    let cohort = sample_cohort(&sem, args.n, rep_seed)?;
    Ok((cohort, sem))
}

struct RepOutcome {
    rows: Vec<RepRow>,
    timed: Vec<MetricReport>,
}

fn run_replication(args: &BenchmarkArgs, methods: &[Method], rep: usize) -> Result<RepOutcome> {
    let (cohort, sem) = make_cohort(args, rep)?;
    let data = DataMatrix::from_values(cohort.data.clone());
    let split = make_split(&data, &cohort.labels, args.test_frac, sem.seed);

    // ground truth on the eval rows
    let mut eval_errors = ndarray::Array2::zeros((split.eval_rows.len(), args.p));
    for (k, &r) in split.eval_rows.iter().enumerate() {
        for j in 0..args.p {
            eval_errors[[k, j]] = cohort.errors[[r, j]];
        }
    }
    let truth_scores = true_shapley(&sem, &eval_errors)?;
    let truth = ground_truth_ranking(&truth_scores);

    let mut rows = Vec::new();
    let mut timed = Vec::new();
    for &method in methods {
        let out = run_method(method, &split, args.alpha)?;
        let rankings: Result<Vec<Ranking>> = (0..out.scores.nrows())
            .map(|k| {
                let row: Vec<f64> = out.scores.row(k).iter().copied().collect();
                rank_row(&row)
            })
            .collect();
        let rankings = rankings?;
        let rbo_w = rbo_weighted(&rankings, &truth)?;
        let rbo_u = rbo_unweighted(&rankings, &truth)?;
        // MSE is meaningful for methods that estimate the scores themselves
        let mse = match method {
            Method::RciFull | Method::RciLocalPlus | Method::AdaptiveLasso => {
                let estimated = ShapleyMatrix {
                    scores: out.scores.clone(),
                    sample_ids: split.eval_ids.clone(),
                };
                Some(mse_scores(&estimated, &truth_scores)?)
            }
            _ => None,
        };
        rows.push(RepRow {
            method: method.name().to_string(),
            n: args.n,
            p: args.p,
            replication: rep,
            rbo_weighted: rbo_w,
            rbo_unweighted: rbo_u,
            mse,
            kept: out.extraction.as_ref().map(|e| e.kept()),
            measure_evals: out.extraction.as_ref().map(|e| e.measure_evals),
        });
        timed.push(MetricReport {
            method: method.name().to_string(),
            n: args.n,
            p: args.p,
            replication: rep,
            rbo_weighted: rbo_w,
            rbo_unweighted: rbo_u,
            mse,
            wall_clock_seconds: Some(out.wall_seconds),
        });
    }
    Ok(RepOutcome { rows, timed })
}

/// Times the four extraction variants on one replication's cohort.
/// Returns (seconds, measure_evals) per variant in `ABLATION_VARIANTS` order.
pub fn ablation_once(
    data: &ndarray::Array2<f64>,
    labels: &[u8],
    alpha: f64,
) -> Result<Vec<(f64, u64)>> {
    let mut results = Vec::with_capacity(4);
    for variant in ABLATION_VARIANTS {
        let start = Instant::now();
        let extraction = match variant {
            "local_plus" => local_direct_lingam(data, labels, alpha, RootFinder::Plus)?,
            "local" => local_direct_lingam(data, labels, alpha, RootFinder::Plain)?,
            "plus" => direct_lingam(data, RootFinder::Plus)?,
            "original" => direct_lingam(data, RootFinder::Plain)?,
            _ => unreachable!(),
        };
        results.push((start.elapsed().as_secs_f64(), extraction.measure_evals));
    }
    Ok(results)
}

fn aggregate(values: &[f64]) -> Aggregate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Aggregate {
            mean,
            ci95_half_width: None,
        };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Aggregate {
        mean,
        ci95_half_width: Some(1.96 * (var / n).sqrt()),
    }
}

pub fn run(args: &BenchmarkArgs) -> Result<()> {
    validate_n(args.n)?;
    validate_p(args.p)?;
    validate_en(args.en, args.p)?;
    validate_reps(args.reps)?;
    validate_alpha(args.alpha)?;
    validate_test_frac(args.test_frac)?;
    let methods = parse_methods(&args.methods, args.mode)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })?;

    let outcomes: Result<Vec<RepOutcome>> = pool.install(|| {
        (0..args.reps)
            .into_par_iter()
            .map(|rep| run_replication(args, &methods, rep))
            .collect()
    });
    let outcomes = outcomes?;

    let mut rows = Vec::new();
    let mut timed_rows = Vec::new();
    for outcome in outcomes {
        rows.extend(outcome.rows);
        timed_rows.extend(outcome.timed);
    }
    rows.sort_by(|a, b| (a.replication, &a.method).cmp(&(b.replication, &b.method)));
    timed_rows.sort_by(|a, b| (a.replication, &a.method).cmp(&(b.replication, &b.method)));

    // per-method aggregates
    let mut aggregates = Vec::new();
    for &method in &methods {
        let name = method.name();
        let of = |f: &dyn Fn(&RepRow) -> Option<f64>| -> Vec<f64> {
            rows.iter()
                .filter(|r| r.method == name)
                .filter_map(|r| f(r))
                .collect()
        };
        let rbo_w = of(&|r| Some(r.rbo_weighted));
        let rbo_u = of(&|r| Some(r.rbo_unweighted));
        let mses = of(&|r| r.mse);
        let kept = of(&|r| r.kept.map(|k| k as f64));
        let evals = of(&|r| r.measure_evals.map(|e| e as f64));
        aggregates.push(MethodAggregate {
            method: name.to_string(),
            replications: rbo_w.len(),
            rbo_weighted: aggregate(&rbo_w),
            rbo_unweighted: aggregate(&rbo_u),
            mse: if mses.is_empty() {
                None
            } else {
                Some(aggregate(&mses))
            },
            mean_kept: if kept.is_empty() {
                None
            } else {
                Some(kept.iter().sum::<f64>() / kept.len() as f64)
            },
            mean_measure_evals: if evals.is_empty() {
                None
            } else {
                Some(evals.iter().sum::<f64>() / evals.len() as f64)
            },
        });
    }

    // the ablation is timed sequentially so the clock is not polluted by
    // worker contention; one timed run per replication
    let mut ablation_secs: Option<Vec<Vec<f64>>> = None;
    let mut ablation_evals: Option<Vec<Vec<u64>>> = None;
    if args.ablation {
        let mut secs = vec![Vec::with_capacity(args.reps); 4];
        let mut evals = vec![Vec::with_capacity(args.reps); 4];
        for rep in 0..args.reps {
            let (cohort, _) = make_cohort(args, rep)?;
            for (v, (s, e)) in ablation_once(&cohort.data, &cohort.labels, args.alpha)?
                .into_iter()
                .enumerate()
            {
                secs[v].push(s);
                evals[v].push(e);
            }
        }
        ablation_secs = Some(secs);
        ablation_evals = Some(evals);
    }

    fs::create_dir_all(&args.out)?;
    let config = ConfigEcho {
        n: args.n,
        p: args.p,
        en: args.en,
        reps: args.reps,
        alpha: args.alpha,
        seed: args.seed,
        test_frac: args.test_frac,
        methods: methods.iter().map(|m| m.name().to_string()).collect(),
        ablation: args.ablation,
    };

    write_json_pretty(
        &args.out.join("report.json"),
        &Report {
            config: config.clone(),
            replications: rows,
        },
    )?;

    write_json_pretty(
        &args.out.join("summary.json"),
        &Summary {
            config: config.clone(),
            methods: aggregates,
            ablation_measure_evals: ablation_evals.as_ref().map(|evals| {
                ABLATION_VARIANTS
                    .iter()
                    .zip(evals)
                    .map(|(v, e)| AblationEvals {
                        variant: v.to_string(),
                        mean_measure_evals: e.iter().sum::<u64>() as f64 / e.len() as f64,
                    })
                    .collect()
            }),
        },
    )?;

    let ablation_timing = ablation_secs.map(|secs| {
        let means: Vec<f64> = secs
            .iter()
            .map(|s| s.iter().sum::<f64>() / s.len() as f64)
            .collect();
        let original = means[3];
        ABLATION_VARIANTS
            .iter()
            .zip(secs)
            .zip(&means)
            .map(|((v, s), &m)| AblationTiming {
                variant: v.to_string(),
                mean_seconds: m,
                speedup_vs_original: original / m,
                seconds: s,
            })
            .collect::<Vec<_>>()
    });
    write_json_pretty(
        &args.out.join("timings.json"),
        &Timings {
            replications: timed_rows,
            ablation: ablation_timing,
        },
    )?;

    println!(
        "benchmark: {} replication(s), {} method(s) -> {}",
        args.reps,
        methods.len(),
        args.out.display()
    );
    Ok(())
}
