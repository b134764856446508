use clap::ValueEnum;
use rci_core::{Error, Result};

/// Which scoring methods a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    RciFull,
    RciLocalPlus,
    TTest,
    AdaptiveLasso,
    ConditionalOutlier,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RciFull => "rci_full",
            Method::RciLocalPlus => "rci_local_plus",
            Method::TTest => "tt",
            Method::AdaptiveLasso => "lr",
            Method::ConditionalOutlier => "co",
        }
    }
}

/// `--mode` choices for the rci pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    LocalPlus,
}

/// Parses a comma-separated method list; the bare name `rci` resolves through
/// the `--mode` flag.
pub fn parse_methods(spec: &str, mode: ModeArg) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        let method = match token {
            "rci" => match mode {
                ModeArg::Full => Method::RciFull,
                ModeArg::LocalPlus => Method::RciLocalPlus,
            },
            "rci_full" => Method::RciFull,
            "rci_local_plus" => Method::RciLocalPlus,
            "tt" => Method::TTest,
            "lr" => Method::AdaptiveLasso,
            "co" => Method::ConditionalOutlier,
            other => {
                return Err(Error::InvalidParameter {
                    name: "methods",
                    reason: format!(
                        "unknown method `{other}` (expected rci, rci_full, rci_local_plus, tt, lr, co)"
                    ),
                })
            }
        };
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter {
            name: "methods",
            reason: "empty method list".into(),
        });
    }
    Ok(methods)
}

pub fn validate_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need n >= 1".into(),
        });
    }
    Ok(())
}

pub fn validate_p(p: usize) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("need p >= 2, got {p}"),
        });
    }
    Ok(())
}

pub fn validate_en(en: f64, p: usize) -> Result<()> {
    if !(en > 0.0) || en > (p - 1) as f64 {
        return Err(Error::InvalidParameter {
            name: "en",
            reason: format!("need 0 < en <= p-1, got {en}"),
        });
    }
    Ok(())
}

pub fn validate_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::InvalidParameter {
            name: "reps",
            reason: "need reps >= 1".into(),
        });
    }
    Ok(())
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("need 0 < alpha <= 1, got {alpha}"),
        });
    }
    Ok(())
}

pub fn validate_test_frac(f: f64) -> Result<()> {
    if !(0.0..1.0).contains(&f) {
        return Err(Error::InvalidParameter {
            name: "test-frac",
            reason: format!("need 0 <= test-frac < 1, got {f}"),
        });
    }
    Ok(())
}
