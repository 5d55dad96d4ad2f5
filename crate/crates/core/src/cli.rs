//! Command-line front end. `run` parses arguments, executes one command and returns the exit code:
//! 0 on success, 1 when a mathematical check fails, 2 on usage or I/O errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde_json::{json, Value};

use crate::cache::{DensityCache, Validation, CACHE_ENV};
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::hierarchy::{densities, perturbative_eigenvalues, reduced_densities, DensityTable, Mode};
use crate::json;
use crate::numbers::Rat;
use crate::quantization::quantize;
use crate::quasimodular::{recognize, QSeries, VerifyReport};
use crate::scalar::{ParamKey, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Value of the central charge `c`: kept as a formal variable or specialized to a rational.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum CMode {
    #[default]
    Formal,
    Value(Rat),
}

impl FromStr for CMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "formal" {
            return Ok(CMode::Formal);
        }
        parse_rat(s).map(CMode::Value)
    }
}

fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    Rat::from_str(s.trim()).map_err(|_| format!("expected a rational such as 3/2, got {s:?}"))
}

impl CMode {
    fn value(&self) -> Option<&Rat> {
        match self {
            CMode::Formal => None,
            CMode::Value(r) => Some(r),
        }
    }

    fn apply(&self, s: &Scalar) -> Scalar {
        match self {
            CMode::Formal => s.clone(),
            CMode::Value(r) => s.eval_c(r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Kdv,
    Ilw,
}

#[derive(Debug, Parser)]
#[command(name = "qkdv", version, about = "Quantum KdV / ILW Hamiltonians and their quasimodular q-series")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct Config {
    /// Truncation order N of q-series.
    #[arg(long = "qorder", global = true, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..))]
    pub qorder: u32,
    /// ILW genus cutoff G: computations are modulo (eps mu)^G.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub genus: u32,
    /// Central charge: `formal` or a rational value.
    #[arg(long = "c", global = true, default_value = "formal")]
    pub c: CMode,
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Density cache directory (default: $QKDV_CACHE; without either, densities are not cached).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
}

impl Config {
    fn mode(&self, m: ModeArg) -> Mode {
        match m {
            ModeArg::Kdv => Mode::Kdv,
            ModeArg::Ilw => Mode::Ilw { genus: self.genus },
        }
    }

    /// The cache named by the flag or the environment, if any.
    fn configured_cache(&self) -> Option<DensityCache> {
        if self.cache.is_some() || std::env::var_os(CACHE_ENV).is_some() {
            Some(DensityCache::resolve(self.cache.as_deref()))
        } else {
            None
        }
    }

    fn table(&self, mode: Mode, k: i32) -> Result<DensityTable> {
        match self.configured_cache() {
            Some(cache) => cache.get_or_build(mode, k),
            None => densities(mode, k),
        }
    }

    fn density(&self, mode: Mode, k: i32) -> Result<DiffPoly> {
        Ok(self.table(mode, k)?.get(k).expect("table covers k").clone())
    }
}

#[derive(Debug, Subcommand)]
#[command(args_conflicts_with_subcommands = false)]
pub enum Command {
    /// Print the Hamiltonian density g_k (or its reduced form).
    #[command(allow_negative_numbers = true)]
    Density {
        mode: ModeArg,
        k: i32,
        /// Print the reduced density instead.
        #[arg(long)]
        reduced: bool,
        /// Specialize eps to a rational value.
        #[arg(long, value_parser = parse_rat)]
        eps: Option<Rat>,
        /// Specialize mu to a rational value.
        #[arg(long, value_parser = parse_rat)]
        mu: Option<Rat>,
    },
    /// Print the q-series {G_k}_q to order N.
    #[command(allow_negative_numbers = true)]
    Qseries { mode: ModeArg, k: i32 },
    /// Recognize {G_k}_q as a quasimodular form.
    #[command(allow_negative_numbers = true)]
    Recognize {
        mode: ModeArg,
        k: i32,
        /// Largest weight searched (default k+2).
        #[arg(long)]
        max_weight: Option<i64>,
    },
    /// Recognize {G_k}_q for every -2 <= k <= K_MAX and check homogeneity of weight k+2.
    #[command(allow_negative_numbers = true)]
    Verify { mode: ModeArg, k_max: i32 },
    /// Print the matrix of the quantized G_k on the degree-n component.
    #[command(allow_negative_numbers = true)]
    Matrix {
        k: i32,
        n: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Kdv)]
        mode: ModeArg,
    },
    /// Perturbative eigenvalues of the quantized KdV G_k on the degree-n component, labelled by Schur functions.
    #[command(allow_negative_numbers = true)]
    Eigenvalues {
        k: i32,
        n: u32,
        /// Highest power of eps kept.
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Manage the density cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Debug, Subcommand)]
pub enum CacheCommand {
    /// Compute densities for -2 <= k <= K_MAX and store them.
    #[command(allow_negative_numbers = true)]
    Build { mode: ModeArg, k_max: i32 },
    /// Re-derive every recursion step of a stored table.
    Validate { mode: ModeArg },
    /// Remove the stored table for a mode, or all tables.
    Clear { mode: Option<ModeArg> },
}

/// Outcome of a command that completed: text to print and the exit code.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Parses `args` (including the program name), runs the command and writes to `out` / `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            if out.write_all(o.text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn render(config: &Config, value: Value, text: String) -> String {
    if config.json {
        json::to_string_pretty(&value)
    } else {
        text
    }
}

fn check_k(k: i32) -> Result<()> {
    if k < -2 {
        return Err(Error::InvalidInput(format!("k must be at least -2, got {k}")));
    }
    Ok(())
}

fn specialize(g: &DiffPoly, config: &Config, eps: Option<&Rat>, mu: Option<&Rat>) -> DiffPoly {
    g.map_scalars(|s| {
        let s = config.c.apply(s);
        let value_at = |v: &Rat, e: u32| num_traits::pow(v.clone(), e as usize);
        s.map_keys(|k| {
            let mut key = *k;
            let mut factor = Rat::one();
            if let Some(v) = eps {
                factor *= value_at(v, key.eps);
                key = ParamKey::new(key.c, 0, key.mu);
            }
            if let Some(v) = mu {
                factor *= value_at(v, key.mu);
                key = ParamKey::new(key.c, key.eps, 0);
            }
            Some((key, factor))
        })
    })
}

fn series(config: &Config, mode: Mode, k: i32) -> Result<QSeries> {
    let g = config.density(mode, k)?;
    Ok(quantize(&g).q_series(config.qorder as usize).map_scalars(|s| config.c.apply(s)))
}

fn verify_one(config: &Config, table: &DensityTable, k: i32) -> Result<VerifyReport> {
    let order = config.qorder as usize;
    let s = quantize(table.get(k).expect("table covers k")).q_series(order).map_scalars(|x| config.c.apply(x));
    let weight = k as i64 + 2;
    let recognized = recognize(&s, weight)?;
    let weights = recognized.weights();
    let homogeneous = recognized.is_homogeneous(weight);
    Ok(VerifyReport { mode: table.mode, k, order, recognized, weights, homogeneous })
}

fn execute(cli: &Cli) -> Result<Output> {
    let config = &cli.config;
    match &cli.command {
        Command::Density { mode, k, reduced, eps, mu } => {
            check_k(*k)?;
            let mode = config.mode(*mode);
            let g = if *reduced {
                reduced_densities(mode, *k)?.get(*k).expect("table covers k").clone()
            } else {
                config.density(mode, *k)?
            };
            let g = specialize(&g, config, eps.as_ref(), mu.as_ref());
            let value = json!({"mode": mode.name(), "genus": mode.trunc(), "k": k, "reduced": reduced, "density": json::diffpoly_to_json(&g)});
            Ok(Output::ok(render(config, value, format!("{}\n", g.render_grouped()))))
        }
        Command::Qseries { mode, k } => {
            check_k(*k)?;
            let s = series(config, config.mode(*mode), *k)?;
            let text: String = s.coeffs().iter().enumerate().map(|(n, x)| format!("q^{n}: {x}\n")).collect();
            Ok(Output::ok(render(config, json::qseries_to_json(&s), text)))
        }
        Command::Recognize { mode, k, max_weight } => {
            check_k(*k)?;
            let s = series(config, config.mode(*mode), *k)?;
            let f = recognize(&s, max_weight.unwrap_or(*k as i64 + 2))?;
            let value = json!({"form": json::qmpoly_to_json(&f), "weights": f.weights()});
            let text = format!("{}\nweights: {:?}\n", f.render_grouped(), f.weights());
            Ok(Output::ok(render(config, value, text)))
        }
        Command::Verify { mode, k_max } => {
            check_k(*k_max)?;
            let mode = config.mode(*mode);
            let table = config.table(mode, *k_max)?;
            let mut lines = String::new();
            let mut reports = Vec::new();
            let mut failed = false;
            for k in -2..=*k_max {
                match verify_one(config, &table, k) {
                    Ok(r) => {
                        failed |= !r.passed();
                        lines.push_str(&format!("{r}\n"));
                        reports.push(json::report_to_json(&r));
                    }
                    Err(e @ (Error::NotRecognized { .. } | Error::InsufficientOrder { .. })) => {
                        failed = true;
                        lines.push_str(&format!("FAIL {mode} k={k} weight={} : {e}\n", k + 2));
                        reports.push(json!({
                            "input": {"mode": mode.name(), "genus": mode.trunc(), "k": k, "order": config.qorder},
                            "recognized": Value::Null,
                            "weights": [],
                            "homogeneous": false,
                            "checks": [{"name": "recognized", "passed": false, "error": e.to_string()}],
                        }));
                    }
                    Err(e) => return Err(e),
                }
            }
            let text = render(config, Value::Array(reports), lines);
            Ok(Output { text, code: if failed { EXIT_CHECK_FAILED } else { EXIT_OK } })
        }
        Command::Matrix { k, n, mode } => {
            check_k(*k)?;
            let g = config.density(config.mode(*mode), *k)?;
            let m = quantize(&g).matrix_on(*n).map_scalars(|s| config.c.apply(s));
            let mut text = format!("basis: {}\n", m.basis().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
            for ((row, col), s) in m.entries() {
                text.push_str(&format!("{row} -> {col}: {s}\n"));
            }
            Ok(Output::ok(render(config, json::matrix_to_json(&m), text)))
        }
        Command::Eigenvalues { k, n, order } => {
            check_k(*k)?;
            let values: BTreeMap<_, _> = perturbative_eigenvalues(*k, *n, *order, config.c.value())?;
            let text: String = values.iter().map(|(p, v)| format!("s{p}: {v}\n")).collect();
            Ok(Output::ok(render(config, json::eigenvalues_to_json(&values), text)))
        }
        Command::Cache(action) => {
            let cache = DensityCache::resolve(config.cache.as_deref());
            match action {
                CacheCommand::Build { mode, k_max } => {
                    check_k(*k_max)?;
                    let path = cache.build(config.mode(*mode), *k_max)?;
                    let value = json!({"status": "built", "path": path.display().to_string()});
                    Ok(Output::ok(render(config, value, format!("built {}\n", path.display()))))
                }
                CacheCommand::Validate { mode } => {
                    let mode = config.mode(*mode);
                    match cache.load(mode, Validation::Full)? {
                        Some(t) => {
                            let value = json!({"status": "ok", "mode": mode.name(), "genus": mode.trunc(), "k_max": t.k_max()});
                            Ok(Output::ok(render(config, value, format!("OK {} k_max={}\n", cache.path(mode).display(), t.k_max()))))
                        }
                        None => Err(Error::Io(std::io::Error::new(
                            std::io::ErrorKind::NotFound,
                            format!("no cache file {}", cache.path(mode).display()),
                        ))),
                    }
                }
                CacheCommand::Clear { mode } => {
                    let removed = cache.clear(mode.map(|m| config.mode(m)))?;
                    let names: Vec<String> = removed.iter().map(|p| p.display().to_string()).collect();
                    let text: String = names.iter().map(|p| format!("removed {p}\n")).collect();
                    Ok(Output::ok(render(config, json!({"removed": names}), text)))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qkdv").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn density_examples() {
        assert_eq!(call(&["density", "kdv", "0"]), (0, "u0^2/2 - 1/24 + (eps/24) u2\n".into(), String::new()));
        assert_eq!(call(&["density", "kdv", "-1"]).1, "u0\n");
        assert_eq!(call(&["density", "kdv", "0", "--eps", "0"]).1, "u0^2/2 - 1/24\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["density", "kdv", "-3"]).0, EXIT_USAGE);
        assert_eq!(call(&["density", "sine", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["--qorder", "0", "verify", "kdv", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["--c", "x", "verify", "kdv", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_lowest() {
        let (code, out, _) = call(&["verify", "kdv", "-2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "PASS kdv k=-2 weight=0 : 1\n");
    }

    #[test]
    fn verify_fails_on_low_order() {
        let (code, out, _) = call(&["--qorder", "3", "verify", "kdv", "0"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(out.contains("FAIL kdv k=0"));
    }

    #[test]
    fn matrix_on_empty_partition() {
        let (code, out, _) = call(&["matrix", "1", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2, "{out}");
        assert!(out.starts_with("basis: ()\n() -> (): "));
    }

    #[test]
    fn eigenvalues_specialized_c() {
        let (code, out, _) = call(&["--c", "2", "eigenvalues", "0", "3", "--order", "2"]);
        assert_eq!(code, 0);
        // c^2/2 + 3 - 1/24 at c = 2
        assert_eq!(out, "s(3): 119/24\ns(2,1): 119/24\ns(1,1,1): 119/24\n");
    }

    #[test]
    fn json_is_canonical() {
        let (_, a, _) = call(&["--json", "density", "kdv", "1"]);
        let (_, b, _) = call(&["--json", "density", "kdv", "1"]);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["k"], 1);
        assert_eq!(json::to_string_pretty(&v), a);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(call(&["--cache", d, "cache", "validate", "kdv"]).0, EXIT_USAGE);
        assert_eq!(call(&["--cache", d, "cache", "build", "kdv", "3"]).0, 0);
        assert_eq!(call(&["--cache", d, "cache", "validate", "kdv"]).0, 0);
        assert_eq!(call(&["--cache", d, "density", "kdv", "2"]).1, call(&["density", "kdv", "2"]).1);
        let path = dir.path().join("kdv.json");
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replacen("\"1/2\"", "\"1/3\"", 1)).unwrap();
        let (code, _, err) = call(&["--cache", d, "cache", "validate", "kdv"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(err.contains("cache validation failed"));
        assert_eq!(call(&["--cache", d, "cache", "clear"]).1, format!("removed {}\n", path.display()));
    }
}
