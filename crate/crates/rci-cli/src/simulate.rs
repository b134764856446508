use std::fs;
use std::path::{Path, PathBuf};

use rci_core::data::DataMatrix;
use rci_core::io::{write_cohort_csv, write_sem_json};
use rci_core::rng::{derive_seed, Stream};
use rci_core::sem::{generate_sem, sample_cohort};
use rci_core::Result;

use crate::config::{validate_en, validate_n, validate_p, validate_reps};

pub struct SimulateArgs {
    pub n: usize,
    pub p: usize,
    pub en: f64,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Directory for one replication under the seed-derived layout.
pub fn replication_dir(out: &Path, seed: u64, rep: usize) -> PathBuf {
    out.join(format!("seed_{seed}")).join(format!("rep_{rep:04}"))
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    validate_n(args.n)?;
    validate_p(args.p)?;
    validate_en(args.en, args.p)?;
    validate_reps(args.reps)?;

    for rep in 0..args.reps {
        let rep_seed = derive_seed(args.seed, Stream::Replication, rep as u64);
        let sem = generate_sem(args.p, args.en, rep_seed)?;
        let cohort = sample_cohort(&sem, args.n, rep_seed)?;

        let dir = replication_dir(&args.out, args.seed, rep);
        fs::create_dir_all(&dir)?;
        let data = DataMatrix::from_values(cohort.data);
        write_cohort_csv(&dir.join("cohort.csv"), &data, &cohort.labels)?;
        write_sem_json(&dir.join("ground_truth.json"), &sem)?;
    }
    println!(
        "simulate: wrote {} replication(s) under {}",
        args.reps,
        args.out.join(format!("seed_{}", args.seed)).display()
    );
    Ok(())
}
