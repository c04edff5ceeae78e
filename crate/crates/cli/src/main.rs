use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qdca_core::attack::{
    run_attack, run_scaling_report, write_scale_csv, AttackConfig, RegisterWidths, ScaleSweep,
};
use qdca_core::counting::{counting_error_bound, quantum_count, within_bound, CountingParams};
use qdca_core::selftest::{self, ALL_CRITERIA};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

#[derive(Parser)]
#[command(
    name = "qdca",
    version,
    about = "Simulated quantum differential cryptanalysis of a toy SPN cipher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover the planted last-round subkey classically and/or with the quantum attack.
    Attack(ConfigArgs),
    /// Run quantum counting once for one candidate subkey.
    Count {
        #[command(flatten)]
        config: ConfigArgs,
        /// Candidate subkey to count right pairs for.
        #[arg(long, default_value_t = 0)]
        subkey: u64,
    },
    /// Print the counting accuracy interval around a true count.
    Bound {
        /// True number of marked items; accepts fractions such as 1/512.
        #[arg(long = "m-true")]
        m_true: String,
        #[arg(long, default_value_t = 6)]
        n: u32,
        /// Accuracy bits (default ceil(n/2) + 1).
        #[arg(long)]
        m: Option<u32>,
    },
    /// Sweep subkey and pair-index widths and report step growth.
    Scale {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 6, 8])]
        k_values: Vec<u32>,
        #[arg(long, default_value_t = 6)]
        fixed_n: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 6, 8])]
        n_values: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        fixed_k: u32,
        /// Trials per size.
        #[arg(long = "sweep-trials", default_value_t = 50)]
        sweep_trials: u32,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Flags for every configuration field. Values in `--config` win.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    m0: Option<u64>,
    /// Master key, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_u64)]
    master_key: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    trials: Option<u32>,
    /// classical, quantum or both.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn parse_u64(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

/// Parses `a`, `a.b` or `p/q`.
fn parse_number(s: &str) -> anyhow::Result<f64> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let q: f64 = q.trim().parse()?;
            if q == 0.0 {
                bail!("zero denominator in `{s}`");
            }
            p.trim().parse::<f64>()? / q
        }
        None => s.trim().parse()?,
    };
    Ok(value)
}

/// `v` as `p/q` with a power-of-two `q`, when it is one.
fn dyadic(v: f64) -> Option<String> {
    (0..=30).find_map(|e| {
        let scaled = v * f64::from(1u32 << e);
        (scaled.fract() == 0.0 && scaled.abs() < 1e15).then(|| {
            if e == 0 {
                format!("{scaled}")
            } else {
                format!("{scaled}/{}", 1u32 << e)
            }
        })
    })
}

impl ConfigArgs {
    fn flag_values(&self) -> Map<String, Value> {
        let mut map = Map::new();
        let mut put = |key: &str, value: Option<Value>| {
            if let Some(v) = value {
                map.insert(key.to_owned(), v);
            }
        };
        put("k", self.k.map(Value::from));
        put("n", self.n.map(Value::from));
        put("m", self.m.map(Value::from));
        put("epsilon", self.epsilon.map(Value::from));
        put("c", self.c.map(Value::from));
        put("m0", self.m0.map(Value::from));
        put("master_key", self.master_key.map(Value::from));
        put("master_seed", self.master_seed.map(Value::from));
        put("trials", self.trials.map(Value::from));
        put("mode", self.mode.clone().map(Value::from));
        put(
            "output_dir",
            self.output_dir
                .as_ref()
                .map(|p| Value::from(p.display().to_string())),
        );
        map
    }

    fn resolve(&self) -> anyhow::Result<AttackConfig> {
        let mut values = self.flag_values();
        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let Value::Object(file) = doc else {
                bail!("{} is not a JSON object", path.display());
            };
            values.extend(file);
        }
        Ok(AttackConfig::from_json(&Value::Object(values).to_string())?)
    }
}

fn attack(args: &ConfigArgs) -> anyhow::Result<()> {
    let config = args.resolve()?;
    let params = config.counting_params()?;
    println!("{}", RegisterWidths::new(config.k, &params));
    let report = run_attack(&config)?;
    println!("setup (characteristic and pairs): {:?}", report.setup_time);
    if let Some(r) = &report.classical {
        println!(
            "classical: recovered {:#x}, planted {:#x}, {} pair evaluations, {:?}",
            r.recovered_subkey, r.true_subkey, r.pair_evaluations, r.wall_time
        );
    }
    if let Some(rate) = report.quantum_success_rate() {
        let n = report.quantum.len();
        let steps: u64 = report.quantum.iter().map(|t| t.result.steps_spent).sum();
        println!(
            "quantum: {n} trials, success rate {rate:.3}, mean steps {:.1}",
            steps as f64 / n as f64
        );
    }
    if let Some(dir) = &config.output_dir {
        report.write_csvs(dir)?;
        println!("wrote CSVs to {}", dir.display());
    }
    Ok(())
}

fn count(args: &ConfigArgs, subkey: u64) -> anyhow::Result<()> {
    let config = args.resolve()?;
    let instance = config.build_instance()?;
    let params = config.counting_params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    let estimate = quantum_count(subkey, &params, &instance, &mut rng)?;
    let exact = instance.count_table().get(subkey);
    println!(
        "subkey {subkey:#x}: outcome b={} theta={:.6}",
        estimate.raw_outcome, estimate.theta
    );
    println!(
        "estimate F(theta)={:.4}, R={}, exact={exact}",
        estimate.m_est, estimate.r
    );
    println!(
        "within bound: {}; G applications {}; inverse QFT gates {}",
        within_bound(estimate.m_est, exact as f64, &params),
        estimate.g_gate_count,
        estimate.qft_gate_count
    );
    Ok(())
}

fn bound(m_true: &str, n: u32, m: Option<u32>) -> anyhow::Result<()> {
    let m_true = parse_number(m_true)?;
    let params = match m {
        Some(m) => CountingParams::new(n, m, 0.1)?,
        None => CountingParams::default_profile(n)?,
    };
    let half = counting_error_bound(m_true, params.pair_count() as f64, params.m());
    let (lo, hi) = (m_true - half, m_true + half);
    let show = |v: f64| dyadic(v).map_or_else(|| format!("{v}"), |q| format!("{v} ({q})"));
    println!(
        "N={} m={}: M in ({}, {})",
        params.pair_count(),
        params.m(),
        show(lo),
        show(hi)
    );
    Ok(())
}

fn scale(args: &ConfigArgs, sweep: ScaleSweep) -> anyhow::Result<()> {
    let config = args.resolve()?;
    let rows = run_scaling_report(&config, &sweep)?;
    for r in &rows {
        println!(
            "{}-sweep k={} n={} t={}: search to max {:.2} (ratio {}), G per count {} of {}",
            r.sweep,
            r.k,
            r.n,
            r.t,
            r.mean_search_to_max,
            r.search_ratio
                .map_or_else(|| "-".into(), |x| format!("{x:.2}")),
            r.g_gates_per_count
                .map_or_else(|| "mixed".into(), |g| g.to_string()),
            r.expected_g_gates
        );
    }
    let dir = config.output_dir.as_deref().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let path = dir.join("scale.csv");
    write_scale_csv(&rows, fs::File::create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn selftest(only: &[u8]) -> anyhow::Result<bool> {
    let ids = if only.is_empty() {
        &ALL_CRITERIA[..]
    } else {
        only
    };
    let mut all = true;
    for &id in ids {
        let o = selftest::run_criterion(id)?;
        println!("{o}");
        all &= o.passed;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Attack(args) => attack(args).map(|_| true),
        Command::Count { config, subkey } => count(config, *subkey).map(|_| true),
        Command::Bound { m_true, n, m } => bound(m_true, *n, *m).map(|_| true),
        Command::Scale {
            config,
            k_values,
            fixed_n,
            n_values,
            fixed_k,
            sweep_trials,
        } => scale(
            config,
            ScaleSweep {
                k_values: k_values.clone(),
                fixed_n: *fixed_n,
                n_values: n_values.clone(),
                fixed_k: *fixed_k,
                trials: *sweep_trials,
            },
        )
        .map(|_| true),
        Command::Selftest { only } => selftest(only),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_fractions() {
        assert_eq!(parse_number("8").unwrap(), 8.0);
        assert_eq!(parse_number(" 1 / 512 ").unwrap(), 1.0 / 512.0);
        assert!(parse_number("3/0").is_err());
        assert_eq!(parse_u64("0x6A").unwrap(), 106);
        assert_eq!(parse_u64("106").unwrap(), 106);
    }

    #[test]
    fn dyadic_rendering() {
        assert_eq!(dyadic(5.875).as_deref(), Some("47/8"));
        assert_eq!(dyadic(-79.0 / 512.0).as_deref(), Some("-79/512"));
        assert_eq!(dyadic(3.0).as_deref(), Some("3"));
        assert_eq!(dyadic(0.1), None);
    }

    #[test]
    fn flags_become_config_fields() {
        let args = ConfigArgs {
            k: Some(2),
            mode: Some("quantum".into()),
            ..ConfigArgs::default()
        };
        let config = args.resolve().unwrap();
        assert_eq!(config.k, 2);
        assert_eq!(config.mode, qdca_core::Mode::Quantum);
        assert_eq!(config.n, 6);
    }
}
