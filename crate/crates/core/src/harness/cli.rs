//! Command-line and config-file parsing.
//!
//! A config file holds one `key = value` pair per line, using the long flag
//! names without dashes (`n = 128`, `cr = 0.8, 1.2`, `filter-order = 4`).
//! Blank lines and `#` comments are ignored. Flags given on the command line
//! override the file.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};

use crate::clipfilter::{Chain, FilterMode, FilterPhase, FilterSpec};
use crate::harness::config::ExperimentConfig;
use crate::spectral::OfdmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// PAPR CCDF curves only.
    Ccdf,
    /// BER over AWGN only.
    Ber,
    /// Both experiments.
    All,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ccdf => "ccdf",
            Mode::Ber => "ber",
            Mode::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "papr-lab",
    version,
    about = "Clipping-and-filtering PAPR reduction for OFDM: CCDF and BER experiments",
    after_help = "Defaults: N=128, L=8, BW=1 MHz, fc=2 MHz, QPSK, CR in {0.8,1.0,1.2,1.4,1.6}, \
                  Eb/N0 in {0,2,4,6,8} dB, Chebyshev Type I order 4 with 0.5 dB ripple."
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum, default_value_t = Mode::All)]
    mode: Mode,

    /// Key-value config file; command-line flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_name = "COUNT")]
    threads: Option<usize>,

    #[command(flatten)]
    settings: Settings,
}

/// Experiment settings shared by the command line and config files.
#[derive(Debug, Default, Clone, Args)]
struct Settings {
    /// Number of subcarriers N (power of two).
    #[arg(long = "n", value_name = "N")]
    n: Option<usize>,

    /// Oversampling factor L (power of two).
    #[arg(long = "l", value_name = "L")]
    l: Option<usize>,

    /// Signal bandwidth in Hz; the sample rate is BW * L.
    #[arg(long, value_name = "HZ", allow_hyphen_values = true)]
    bw: Option<f64>,

    /// Carrier frequency in Hz.
    #[arg(long, value_name = "HZ", allow_hyphen_values = true)]
    fc: Option<f64>,

    /// Clipping ratio A/sigma (repeatable or comma-separated).
    #[arg(long, value_name = "RATIO", value_delimiter = ',', allow_hyphen_values = true)]
    cr: Vec<f64>,

    /// Chain: unclipped, clip_only, existing, proposed (repeatable).
    #[arg(long, value_name = "CHAIN", value_delimiter = ',')]
    chain: Vec<String>,

    /// Symbols per CCDF curve; minimum symbols per BER point.
    #[arg(long, value_name = "COUNT")]
    symbols: Option<usize>,

    /// Symbol cap per BER point.
    #[arg(long, value_name = "COUNT")]
    max_symbols: Option<usize>,

    /// Errors to collect per BER point before stopping.
    #[arg(long, value_name = "COUNT")]
    min_errors: Option<u64>,

    /// Eb/N0 in dB: values, or START:STEP:STOP ranges (repeatable or comma-separated).
    #[arg(long, value_name = "DB", value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Vec<String>,

    /// Master RNG seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Chebyshev Type I prototype order.
    #[arg(long, value_name = "ORDER")]
    filter_order: Option<usize>,

    /// Chebyshev passband ripple in dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    filter_ripple_db: Option<f64>,

    /// Apply the Chebyshev response with its phase (complex) or magnitude only (zero).
    #[arg(long, value_name = "PHASE")]
    filter_phase: Option<String>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Settings {
    fn or(self, fallback: Settings) -> Settings {
        fn pick<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Settings {
            n: self.n.or(fallback.n),
            l: self.l.or(fallback.l),
            bw: self.bw.or(fallback.bw),
            fc: self.fc.or(fallback.fc),
            cr: pick(self.cr, fallback.cr),
            chain: pick(self.chain, fallback.chain),
            symbols: self.symbols.or(fallback.symbols),
            max_symbols: self.max_symbols.or(fallback.max_symbols),
            min_errors: self.min_errors.or(fallback.min_errors),
            ebn0: pick(self.ebn0, fallback.ebn0),
            seed: self.seed.or(fallback.seed),
            filter_order: self.filter_order.or(fallback.filter_order),
            filter_ripple_db: self.filter_ripple_db.or(fallback.filter_ripple_db),
            filter_phase: self.filter_phase.or(fallback.filter_phase),
            out: self.out.or(fallback.out),
        }
    }

    fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::default();
        let base = cfg.ofdm;

        let n = self.n.unwrap_or(base.num_subcarriers());
        if n < 2 || !n.is_power_of_two() {
            return Err(CliError::flag("n", format!("{n} is not a power of two >= 2")));
        }
        let l = self.l.unwrap_or(base.oversample());
        if l == 0 || !l.is_power_of_two() {
            return Err(CliError::flag("l", format!("{l} is not a power of two >= 1")));
        }
        let bw = self.bw.unwrap_or(base.bandwidth());
        if !(bw > 0.0 && bw.is_finite()) {
            return Err(CliError::flag("bw", format!("{bw} must be positive")));
        }
        let fc = self.fc.unwrap_or(base.carrier());
        cfg.ofdm = OfdmConfig::new(n, l, bw, fc)
            .and_then(|c| c.check_passband().map(|_| c))
            .map_err(|e| CliError::flag("fc", e.to_string()))?;

        if !self.cr.is_empty() {
            if let Some(bad) = self.cr.iter().find(|&&cr| !(cr > 0.0 && cr.is_finite())) {
                return Err(CliError::flag("cr", format!("{bad} must be positive")));
            }
            cfg.cr_list = self.cr;
        }
        if !self.chain.is_empty() {
            let mut chains = Vec::new();
            for name in &self.chain {
                let chain: Chain = name.parse().map_err(|e: crate::Error| CliError::flag("chain", e.to_string()))?;
                if !chains.contains(&chain) {
                    chains.push(chain);
                }
            }
            cfg.chains = chains;
        }
        if let Some(s) = self.symbols {
            if s == 0 {
                return Err(CliError::flag("symbols", "must be at least 1".into()));
            }
            cfg.num_symbols = s;
            cfg.max_symbols = cfg.max_symbols.max(s);
        }
        if let Some(m) = self.max_symbols {
            if m < cfg.num_symbols {
                return Err(CliError::flag(
                    "max-symbols",
                    format!("{m} is below the symbol count {}", cfg.num_symbols),
                ));
            }
            cfg.max_symbols = m;
        }
        if let Some(e) = self.min_errors {
            cfg.min_errors = e;
        }
        if !self.ebn0.is_empty() {
            let mut list = Vec::new();
            for item in &self.ebn0 {
                list.extend(parse_ebn0(item).map_err(|m| CliError::flag("ebn0", m))?);
            }
            cfg.ebn0_list = list;
        }
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }

        let order = self.filter_order.unwrap_or(cfg.filter.order);
        let ripple = self.filter_ripple_db.unwrap_or(cfg.filter.passband_ripple_db);
        let phase = match self.filter_phase {
            Some(p) => p
                .parse::<FilterPhase>()
                .map_err(|e| CliError::flag("filter-phase", e.to_string()))?,
            None => cfg.filter.phase,
        };
        if order < 1 {
            return Err(CliError::flag("filter-order", "must be at least 1".into()));
        }
        if !(ripple > 0.0 && ripple.is_finite()) {
            return Err(CliError::flag("filter-ripple-db", format!("{ripple} must be positive")));
        }
        cfg.filter = FilterSpec::for_config(&cfg.ofdm, FilterMode::Cheby1Bandpass, order, ripple)
            .map_err(|e| CliError::Invalid(e.to_string()))?
            .with_phase(phase);

        if let Some(out) = self.out {
            cfg.output_dir = out;
        }
        cfg.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

/// Parses `6`, `-2.5` or an inclusive `START:STEP:STOP` range.
fn parse_ebn0(item: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number"))
            .and_then(|v| if v.is_nan() { Err("NaN is not allowed".to_string()) } else { Ok(v) })
    };
    let parts: Vec<&str> = item.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0 && step.is_finite()) || stop < start {
                return Err(format!("range '{item}' needs a positive step and STOP >= START"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(format!("'{item}' is neither a value nor START:STEP:STOP")),
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Argument syntax error, or a help/version request.
    Clap(clap::Error),
    /// A flag value is malformed or violates a constraint.
    Flag { flag: String, message: String },
    /// The config file could not be read or parsed.
    File { path: PathBuf, message: String },
    Invalid(String),
}

impl CliError {
    fn flag(flag: &str, message: String) -> Self {
        CliError::Flag {
            flag: flag.to_string(),
            message,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Flag { flag, message } => write!(f, "invalid value for --{flag}: {message}"),
            CliError::File { path, message } => write!(f, "config file {}: {message}", path.display()),
            CliError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub mode: Mode,
    pub threads: Option<usize>,
    pub config: ExperimentConfig,
}

/// Turns config-file lines into `--key value` arguments.
fn file_args(text: &str, path: &Path) -> Result<Vec<String>, CliError> {
    let mut args = vec!["papr-lab".to_string()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::File {
            path: path.to_path_buf(),
            message: format!("line {}: expected 'key = value'", lineno + 1),
        })?;
        let key = key.trim();
        if matches!(key, "config" | "threads") || key.is_empty() {
            return Err(CliError::File {
                path: path.to_path_buf(),
                message: format!("line {}: key '{key}' is not allowed in a config file", lineno + 1),
            });
        }
        args.push(format!("--{key}"));
        let value: Vec<&str> = value.split(',').map(str::trim).collect();
        args.push(value.join(","));
    }
    Ok(args)
}

fn settings_from_file(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let args = file_args(&text, path)?;
    #[derive(Parser)]
    #[command(name = "config")]
    struct FileCli {
        #[command(flatten)]
        settings: Settings,
    }
    let parsed = FileCli::try_parse_from(args).map_err(|e| CliError::File {
        path: path.to_path_buf(),
        message: e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""),
    })?;
    Ok(parsed.settings)
}

/// Parses arguments (including the program name) into a validated run.
pub fn parse_cli<I, T>(args: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let settings = match &cli.config {
        Some(path) => cli.settings.or(settings_from_file(path)?),
        None => cli.settings,
    };
    if cli.threads == Some(0) {
        return Err(CliError::flag("threads", "must be at least 1".into()));
    }
    Ok(Invocation {
        mode: cli.mode,
        threads: cli.threads,
        config: settings.into_config()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{DEFAULT_CR_LIST, DEFAULT_EBN0_DB};

    fn parse(args: &[&str]) -> Result<Invocation, CliError> {
        parse_cli(std::iter::once("papr-lab").chain(args.iter().copied()))
    }

    #[test]
    fn no_args_gives_reference_defaults() {
        let inv = parse(&[]).unwrap();
        assert_eq!(inv.mode, Mode::All);
        let cfg = inv.config;
        assert_eq!(cfg.ofdm, OfdmConfig::default());
        assert_eq!(cfg.ofdm.sample_rate(), 8e6);
        assert_eq!(cfg.cr_list, DEFAULT_CR_LIST.to_vec());
        assert_eq!(cfg.ebn0_list, DEFAULT_EBN0_DB.to_vec());
        assert_eq!((cfg.filter.order, cfg.filter.passband_ripple_db), (4, 0.5));
        assert_eq!(cfg.filter.phase, FilterPhase::Complex);
    }

    #[test]
    fn non_power_of_two_rejected() {
        let err = parse(&["--n", "96"]).unwrap_err();
        assert!(err.to_string().contains("--n"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn single_chain_run() {
        let inv = parse(&["ccdf", "--chain", "proposed", "--cr", "1.2", "--seed", "42"]).unwrap();
        assert_eq!(inv.mode, Mode::Ccdf);
        assert_eq!(inv.config.chains, vec![Chain::Proposed]);
        assert_eq!(inv.config.cr_list, vec![1.2]);
        assert_eq!(inv.config.master_seed, 42);
    }

    #[test]
    fn repeatable_and_range_flags() {
        let inv = parse(&["--cr", "0.8", "--cr", "1.6", "--ebn0", "0:2:8", "--ebn0", "-3"]).unwrap();
        assert_eq!(inv.config.cr_list, vec![0.8, 1.6]);
        assert_eq!(inv.config.ebn0_list, vec![0.0, 2.0, 4.0, 6.0, 8.0, -3.0]);
        let inv = parse(&["--cr", "1.0,1.2"]).unwrap();
        assert_eq!(inv.config.cr_list, vec![1.0, 1.2]);
    }

    #[test]
    fn malformed_values_name_the_flag() {
        for (args, flag) in [
            (vec!["--cr", "-1"], "--cr"),
            (vec!["--chain", "fancy"], "--chain"),
            (vec!["--ebn0", "8:2:0"], "--ebn0"),
            (vec!["--filter-ripple-db", "0"], "--filter-ripple-db"),
            (vec!["--filter-order", "0"], "--filter-order"),
            (vec!["--filter-phase", "linear"], "--filter-phase"),
            (vec!["--symbols", "0"], "--symbols"),
            (vec!["--l", "3"], "--l"),
            (vec!["--fc", "3.9e6"], "--fc"),
        ] {
            let err = parse(&args).unwrap_err();
            assert!(err.to_string().contains(flag), "{args:?}: {err}");
        }
        let err = parse(&["--n", "abc"]).unwrap_err();
        assert!(err.to_string().contains("--n"), "{err}");
    }

    #[test]
    fn unknown_flag_rejected() {
        assert!(matches!(parse(&["--bogus", "1"]), Err(CliError::Clap(_))));
    }

    #[test]
    fn help_documents_every_flag() {
        let err = parse(&["--help"]).unwrap_err();
        assert_eq!(err.exit_code(), 0);
        let help = err.to_string();
        for flag in [
            "--n", "--l", "--bw", "--fc", "--cr", "--chain", "--symbols", "--ebn0", "--seed",
            "--filter-order", "--filter-ripple-db", "--out", "--config",
        ] {
            assert!(help.contains(flag), "missing {flag}");
        }
    }

    #[test]
    fn config_file_with_cli_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(
            &path,
            "# reference run\nn = 64\ncr = 0.8, 1.0\nseed = 7\nfilter-order = 3\nchain = existing\n",
        )
        .unwrap();
        let inv = parse(&["--config", path.to_str().unwrap(), "--seed", "9"]).unwrap();
        assert_eq!(inv.config.ofdm.num_subcarriers(), 64);
        assert_eq!(inv.config.cr_list, vec![0.8, 1.0]);
        assert_eq!(inv.config.master_seed, 9);
        assert_eq!(inv.config.filter.order, 3);
        assert_eq!(inv.config.chains, vec![Chain::Existing]);

        fs::write(&path, "colour = blue\n").unwrap();
        assert!(matches!(
            parse(&["--config", path.to_str().unwrap()]),
            Err(CliError::File { .. })
        ));
        fs::write(&path, "just words\n").unwrap();
        assert!(parse(&["--config", path.to_str().unwrap()]).is_err());
    }
}
