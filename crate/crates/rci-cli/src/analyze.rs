use std::fs;
use std::path::PathBuf;

use rci_core::data::validate_labels;
use rci_core::io::{
    read_cohort_csv, write_extraction_json, write_json_pretty, write_model_json,
    write_rankings_csv, write_scores_csv,
};
use rci_core::rci::{rank_row, Ranking, ShapleyMatrix};
use rci_core::{Error, Result};
use serde::Serialize;

use crate::config::{parse_methods, validate_alpha, validate_test_frac, ModeArg};
use crate::methods::{make_split, run_method};

pub struct AnalyzeArgs {
    pub input: PathBuf,
    pub label_col: String,
    pub methods: String,
    pub mode: ModeArg,
    pub alpha: f64,
    pub seed: u64,
    pub test_frac: f64,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct AnalyzeSummary {
    input: String,
    label_col: String,
    n: usize,
    p: usize,
    n_eval: usize,
    test_frac: f64,
    alpha: f64,
    seed: u64,
    methods: Vec<MethodSummary>,
}

#[derive(Serialize)]
struct MethodSummary {
    method: String,
    kept: Option<usize>,
    kept_empty: bool,
    converged: Option<bool>,
}

pub fn run(args: &AnalyzeArgs) -> Result<()> {
    validate_alpha(args.alpha)?;
    validate_test_frac(args.test_frac)?;
    let methods = parse_methods(&args.methods, args.mode)?;

    let (data, labels) = read_cohort_csv(&args.input, &args.label_col)?;
    validate_labels(&labels, data.nrows()).map_err(|e| match e {
        Error::SingleClassLabels => {
            Error::Input(format!("label column `{}` has a single class", args.label_col))
        }
        other => other,
    })?;

    let split = make_split(&data, &labels, args.test_frac, args.seed);
    if args.test_frac > 0.0 {
        validate_labels(&split.train_labels, split.train.nrows()).map_err(|_| {
            Error::Input("train split lost one of the label classes; lower test-frac".into())
        })?;
    }

    fs::create_dir_all(&args.out)?;
    let mut summaries = Vec::new();
    for &method in &methods {
        let out = run_method(method, &split, args.alpha)?;
        let shapley = ShapleyMatrix {
            scores: out.scores.clone(),
            sample_ids: split.eval_ids.clone(),
        };
        let name = method.name();
        write_scores_csv(
            &args.out.join(format!("{name}_scores.csv")),
            &shapley,
            &data.names,
        )?;
        let rankings: Result<Vec<Ranking>> = (0..out.scores.nrows())
            .map(|k| {
                let row: Vec<f64> = out.scores.row(k).iter().copied().collect();
                rank_row(&row)
            })
            .collect();
        write_rankings_csv(
            &args.out.join(format!("{name}_rankings.csv")),
            &rankings?,
            &split.eval_ids,
            &data.names,
        )?;
        if let Some(model) = &out.model {
            let kept = out.extraction.as_ref().map(|e| e.order.clone()).unwrap_or_default();
            write_model_json(&args.out.join(format!("{name}_model.json")), model, &kept)?;
        }
        if let Some(extraction) = &out.extraction {
            write_extraction_json(
                &args.out.join(format!("{name}_extraction.json")),
                extraction,
            )?;
        }
        if out.kept_empty {
            eprintln!("warning: {name}: screened kept set is empty; scores are all zero");
        }
        summaries.push(MethodSummary {
            method: name.to_string(),
            kept: out.extraction.as_ref().map(|e| e.kept()),
            kept_empty: out.kept_empty,
            converged: out.model.as_ref().map(|m| m.converged),
        });
    }

    write_json_pretty(
        &args.out.join("summary.json"),
        &AnalyzeSummary {
            input: args.input.display().to_string(),
            label_col: args.label_col.clone(),
            n: data.nrows(),
            p: data.ncols(),
            n_eval: split.eval.nrows(),
            test_frac: args.test_frac,
            alpha: args.alpha,
            seed: args.seed,
            methods: summaries,
        },
    )?;
    println!(
        "analyze: {} method(s) on {} eval row(s) -> {}",
        methods.len(),
        split.eval.nrows(),
        args.out.display()
    );
    Ok(())
}
