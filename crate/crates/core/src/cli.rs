//! Command-line front end: `generate`, `count`, `fit`, `dim` and `probe`.
//!
//! Options may also come from a `key=value` file passed with `--config`;
//! flags on the command line win.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analysis::{box_count_dimension, fit_area_law, fit_power_law, regularity_probe, PowerFit};
use crate::counting::{count_curvature, count_geodesic, count_hyparea, CountSeries, Region};
use crate::error::{Error, Result};
use crate::formats::{
    circle_csv, config_digest, load_circle_set, load_series, series_csv, write_with_sidecar, AnySet, Sidecar,
};
use crate::mobius::{Circle, Motion, Rational, Scalar};
use crate::packing::{
    enumerate_orbit, ideal_triangle_packing, strip_apollonian_spec, CircleSet, EnumConfig, MotionRecord, PackingSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

const VERBS: [&str; 5] = ["generate", "count", "fit", "dim", "probe"];

#[derive(Debug, Parser)]
#[command(name = "kleincount", version, about = "Circle counting for Kleinian circle packings")]
struct Cli {
    /// Worker threads for enumeration (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Enumerate a packing into a circle-set file.
    Generate(GenerateArgs),
    /// Count circles of a circle-set file along a ladder.
    Count(CountArgs),
    /// Fit a power law to a count series.
    Fit(FitArgs),
    /// Box-counting dimension of a circle set.
    Dim(DimArgs),
    /// Boundary-collar decay of a region.
    Probe(ProbeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Curvature,
    Geodesic,
    Hyparea,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct GenerateArgs {
    /// `strip-apollonian` or `ideal-triangle`.
    #[arg(long, conflicts_with = "generators")]
    packing: Option<String>,
    /// JSON file describing seeds and generators.
    #[arg(long)]
    generators: Option<PathBuf>,
    #[arg(long, required_unless_present = "min_area")]
    max_curv: Option<f64>,
    /// `x0,y0,x1,y1` or a region expression.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "min_area")]
    window: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Smallest hyperbolic area to cover (`ideal-triangle` only).
    #[arg(long)]
    min_area: Option<f64>,
    #[arg(long)]
    max_word_length: Option<usize>,
    #[arg(long)]
    max_circles: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct CountArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "curvature")]
    mode: Mode,
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Curvature ladder: `pow2:a:b` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    ladder: Option<String>,
    /// Area ladder: `pow2neg:a:b` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    t_ladder: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    drop_low: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct DimArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value = "pow2neg:4:9")]
    scales: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ProbeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    region: String,
    #[arg(long, allow_hyphen_values = true)]
    eps_ladder: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `pow2:a:b` (2^a..2^b), `pow2neg:a:b` (2^-b..2^-a) or a comma
/// list, returned in increasing order.
pub fn parse_ladder(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad ladder {spec:?}"));
    let mut out: Vec<f64> = if let Some(rest) = spec.strip_prefix("pow2neg:").or_else(|| spec.strip_prefix("pow2:")) {
        let (a, b) = rest.split_once(':').ok_or_else(bad)?;
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        let sign = if spec.starts_with("pow2neg:") { -1 } else { 1 };
        (a..=b).map(|k| 2f64.powi(sign * k)).collect()
    } else {
        spec.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?
    };
    out.sort_by(f64::total_cmp);
    if out.is_empty() || out.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_window(spec: &str) -> Result<Region> {
    let nums: Vec<f64> = spec.split(',').filter_map(|v| v.trim().parse().ok()).collect();
    if nums.len() == 4 && spec.split(',').count() == 4 {
        Region::rect(nums[0], nums[1], nums[2], nums[3])
    } else {
        spec.parse()
    }
}

/// Reads a `key=value` file; `#` starts a comment line.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

/// Splices config-file options in front of the command-line flags so that
/// the latter override them.
fn expand_args(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    if let Some(prog) = it.next() {
        rest.push(prog);
    }
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| Error::InvalidArgument("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(config) = config else { return Ok(rest) };
    let mut entries = read_config_file(Path::new(&config))?;
    let verb_pos = rest.iter().position(|a| VERBS.contains(&a.as_str()));
    let verb_pos = match (verb_pos, entries.iter().position(|(k, _)| k == "verb")) {
        (Some(p), _) => p,
        (None, Some(i)) => {
            let verb = entries[i].1.clone();
            rest.insert(1, verb);
            1
        }
        (None, None) => return Err(Error::InvalidArgument("no verb given on the command line or in the config".into())),
    };
    entries.retain(|(k, _)| k != "verb");
    let mut flags = Vec::new();
    for (k, v) in entries {
        flags.push(format!("--{k}"));
        flags.push(v);
    }
    rest.splice(verb_pos + 1..verb_pos + 1, flags);
    Ok(rest)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Incomplete(_) => EXIT_INCOMPLETE,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let args = match expand_args(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.verb)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => dispatch(cli.verb),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(verb: Verb) -> Result<()> {
    match verb {
        Verb::Generate(a) => generate(a),
        Verb::Count(a) => count(a),
        Verb::Fit(a) => fit(a),
        Verb::Dim(a) => dim(a),
        Verb::Probe(a) => probe(a),
    }
}

fn base_config(verb: &str) -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert("verb".to_string(), verb.to_string());
    c.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
    c
}

fn put<T: ToString>(c: &mut BTreeMap<String, String>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        c.insert(key.to_string(), v.to_string());
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

// generate

#[derive(Debug, Deserialize)]
struct GeneratorFile {
    #[serde(default = "custom_name")]
    name: String,
    #[serde(default)]
    monotone: bool,
    /// `[bbar, b, wx, wy]` per seed.
    seeds: Vec<[String; 4]>,
    /// Reflections, given by their mirror circles.
    #[serde(default)]
    mirrors: Vec<[String; 4]>,
    #[serde(default)]
    motions: Vec<MotionRecord>,
    #[serde(default)]
    period: Option<MotionRecord>,
}

fn custom_name() -> String {
    "custom".into()
}

fn parse_circle<S: Scalar>(v: &[String; 4]) -> Result<Circle<S>> {
    Circle::from_coords(S::parse(&v[0])?, S::parse(&v[1])?, S::parse(&v[2])?, S::parse(&v[3])?)
}

fn custom_spec<S: Scalar>(file: &GeneratorFile) -> Result<PackingSpec<S>> {
    let seeds = file.seeds.iter().map(parse_circle).collect::<Result<Vec<Circle<S>>>>()?;
    let mut generators = Vec::new();
    for m in &file.mirrors {
        generators.push(Motion::reflection(&parse_circle::<S>(m)?));
    }
    for m in &file.motions {
        generators.push(m.to_motion()?);
    }
    if seeds.is_empty() || generators.is_empty() {
        return Err(Error::InvalidArgument("generator file needs seeds and at least one generator".into()));
    }
    Ok(PackingSpec {
        name: file.name.clone(),
        seeds,
        generators,
        period: file.period.as_ref().map(|p| p.to_motion()).transpose()?,
        monotone: file.monotone,
        support: None,
    })
}

fn enumerate_spec<S: Scalar>(spec: &PackingSpec<S>, a: &GenerateArgs) -> Result<CircleSet<S>> {
    let max = a.max_curv.ok_or_else(|| Error::InvalidArgument("--max-curv is required".into()))?;
    let window = a.window.as_deref().ok_or_else(|| Error::InvalidArgument("--window is required".into()))?;
    let mut config = EnumConfig::new(max, parse_window(window)?);
    config.max_word_length = a.max_word_length;
    config.max_circles = a.max_circles;
    enumerate_orbit(spec, &config)
}

fn write_set<S: Scalar>(set: &CircleSet<S>, out: &Path, config: BTreeMap<String, String>) -> Result<()> {
    let side = Sidecar {
        format: "circle-set/1".into(),
        content_sha256: String::new(),
        input_digest: config_digest(&config),
        config,
        provenance: Some(set.provenance.clone()),
        metadata: None,
    };
    write_with_sidecar(out, &circle_csv(&set.circles)?, side)?;
    println!(
        "wrote {} circles to {} (complete: {}, stop: {:?})",
        set.len(),
        out.display(),
        set.provenance.complete,
        set.provenance.stop_reason
    );
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let mut config = base_config("generate");
    put(&mut config, "packing", a.packing.clone());
    put(&mut config, "max-curv", a.max_curv);
    put(&mut config, "window", a.window.clone());
    put(&mut config, "backend", Some(format!("{:?}", a.backend).to_lowercase()));
    put(&mut config, "min-area", a.min_area);
    put(&mut config, "max-word-length", a.max_word_length);
    put(&mut config, "max-circles", a.max_circles);
    let exact = a.backend == BackendArg::Exact;
    if let Some(path) = &a.generators {
        let text = fs::read_to_string(path)?;
        config.insert("generators-sha256".into(), crate::formats::sha256_hex(text.as_bytes()));
        let file: GeneratorFile = serde_json::from_str(&text)?;
        return if exact {
            write_set(&enumerate_spec(&custom_spec::<Rational>(&file)?, &a)?, &a.out, config)
        } else {
            write_set(&enumerate_spec(&custom_spec::<f64>(&file)?, &a)?, &a.out, config)
        };
    }
    match a.packing.as_deref() {
        Some("strip-apollonian") => {
            if exact {
                write_set(&enumerate_spec(&strip_apollonian_spec::<Rational>()?, &a)?, &a.out, config)
            } else {
                write_set(&enumerate_spec(&strip_apollonian_spec::<f64>()?, &a)?, &a.out, config)
            }
        }
        Some("ideal-triangle") => {
            let t = a.min_area.ok_or_else(|| Error::InvalidArgument("ideal-triangle needs --min-area".into()))?;
            let set = ideal_triangle_packing(t)?;
            if exact {
                write_set(&set, &a.out, config)
            } else {
                write_set(&set.to_float(), &a.out, config)
            }
        }
        Some(other) => Err(Error::InvalidArgument(format!("unknown packing {other:?}"))),
        None => Err(Error::InvalidArgument("give --packing or --generators".into())),
    }
}

// count

fn count_on<S: Scalar>(set: &CircleSet<S>, a: &CountArgs) -> Result<CountSeries> {
    let region = || -> Result<Region> {
        a.region.as_deref().ok_or_else(|| Error::InvalidArgument("--region is required".into()))?.parse()
    };
    let ladder = || parse_ladder(a.ladder.as_deref().ok_or_else(|| Error::InvalidArgument("--ladder is required".into()))?);
    match a.mode {
        Mode::Curvature => count_curvature(set, &region()?, &ladder()?),
        Mode::Geodesic => count_geodesic(set, &region()?, &ladder()?),
        Mode::Hyparea => {
            if set.provenance.area_floor.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "hyparea counts need an ideal-triangle set, got {}",
                    set.provenance.packing
                )));
            }
            let t = a.t_ladder.as_deref().ok_or_else(|| Error::InvalidArgument("--t-ladder is required".into()))?;
            count_hyparea(set, &parse_ladder(t)?)
        }
    }
}

fn count(a: CountArgs) -> Result<()> {
    let (set, input_side) = load_circle_set(&a.input)?;
    let mut config = base_config("count");
    config.insert("input-sha256".into(), input_side.content_sha256.clone());
    put(&mut config, "mode", Some(format!("{:?}", a.mode).to_lowercase()));
    put(&mut config, "region", a.region.clone());
    put(&mut config, "ladder", a.ladder.clone());
    put(&mut config, "t-ladder", a.t_ladder.clone());
    let mut series = match &set {
        AnySet::Exact(s) => count_on(s, &a)?,
        AnySet::Float(s) => count_on(s, &a)?,
    };
    let digest = config_digest(&config);
    series.metadata.digest = Some(digest.clone());
    let text = series_csv(&series)?;
    match &a.out {
        Some(out) => {
            let side = Sidecar {
                format: "count-series/1".into(),
                content_sha256: String::new(),
                input_digest: digest,
                config,
                provenance: None,
                metadata: Some(series.metadata.clone()),
            };
            write_with_sidecar(out, &text, side)?;
            eprintln!("wrote {} rows to {}", series.ladder.len(), out.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

// reports

fn fit_json(fit: &PowerFit) -> Value {
    json!({
        "exponent": fit.exponent,
        "stderr": fit.stderr_exponent,
        "r2": fit.r_squared,
        "window": [fit.window.0, fit.window.1],
        "n_points": fit.n_points,
        "coefficient": fit.coefficient(),
    })
}

/// Target band for series with a known exponent.
fn target_band(series: &CountSeries) -> Option<(f64, f64)> {
    match (series.metadata.quantity.as_str(), series.metadata.packing.as_str()) {
        ("curvature", "strip-apollonian") => Some((1.25, 1.36)),
        ("hyparea", "ideal-triangle") => Some((0.61, 0.70)),
        _ => None,
    }
}

fn fit(a: FitArgs) -> Result<()> {
    let (series, side) = load_series(&a.input)?;
    let mut config = base_config("fit");
    config.insert("input-sha256".into(), side.content_sha256.clone());
    config.insert("drop-low".into(), a.drop_low.to_string());
    let fit = match series.param.as_str() {
        "T" => fit_power_law(&series, a.drop_low)?,
        "t" => fit_area_law(&series, a.drop_low)?,
        p => return Err(Error::InvalidArgument(format!("unknown series parameter {p:?}"))),
    };
    let mut report = fit_json(&fit);
    report["quantity"] = json!(series.metadata.quantity);
    report["packing"] = json!(series.metadata.packing);
    report["region"] = json!(series.metadata.region);
    report["digest"] = json!(config_digest(&config));
    emit(a.out.as_deref(), &json_text(&report)?)?;
    if let Some((lo, hi)) = target_band(&series) {
        let pass = (lo..=hi).contains(&fit.exponent) && fit.r_squared >= 0.999;
        let line = format!(
            "verdict: {} exponent {:.4} (target band [{lo}, {hi}]), R² {:.5}",
            if pass { "PASS" } else { "FAIL" },
            fit.exponent,
            fit.r_squared
        );
        if a.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn dim(a: DimArgs) -> Result<()> {
    let (set, side) = load_circle_set(&a.input)?;
    let mut config = base_config("dim");
    config.insert("input-sha256".into(), side.content_sha256.clone());
    config.insert("scales".into(), a.scales.clone());
    let scales = parse_ladder(&a.scales)?;
    let est = match &set {
        AnySet::Exact(s) => box_count_dimension(s, &scales)?,
        AnySet::Float(s) => box_count_dimension(s, &scales)?,
    };
    let report = json!({
        "alpha_hat": est.alpha_hat,
        "guard_failure_rate": est.guard_failure_rate,
        "scales": est.scales,
        "fit": fit_json(&est.fit),
        "digest": config_digest(&config),
    });
    emit(a.out.as_deref(), &json_text(&report)?)
}

fn probe(a: ProbeArgs) -> Result<()> {
    let (set, side) = load_circle_set(&a.input)?;
    let mut config = base_config("probe");
    config.insert("input-sha256".into(), side.content_sha256.clone());
    config.insert("region".into(), a.region.clone());
    config.insert("eps-ladder".into(), a.eps_ladder.clone());
    let region: Region = a.region.parse()?;
    let eps = parse_ladder(&a.eps_ladder)?;
    let outcome = match &set {
        AnySet::Exact(s) => regularity_probe(s, &region, &eps)?,
        AnySet::Float(s) => regularity_probe(s, &region, &eps)?,
    };
    let mut report = serde_json::to_value(&outcome)?;
    if let crate::analysis::ProbeOutcome::Fitted { fit, .. } = &outcome {
        report["fit"] = fit_json(fit);
    }
    report["digest"] = json!(config_digest(&config));
    emit(a.out.as_deref(), &json_text(&report)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        assert_eq!(parse_ladder("pow2:3:14").unwrap().len(), 12);
        let t = parse_ladder("pow2neg:2:4").unwrap();
        assert_eq!(t, vec![0.0625, 0.125, 0.25]);
        assert_eq!(parse_ladder("4, 2,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(parse_ladder("pow2:5:3").is_err());
        assert!(parse_ladder("2,2").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("-1,0,1,2").unwrap(), Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap());
        assert!(matches!(parse_window("disk:0,1,0.5").unwrap(), Region::Disk { .. }));
    }

    #[test]
    fn config_flags_are_overridden() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# run\nverb = generate\nmax_curv = 10\nwindow = -1,0,1,2\nout = a.csv\n").unwrap();
        let args = vec!["k".into(), "--config".into(), cfg.display().to_string(), "--max-curv".into(), "20".into()];
        let expanded = expand_args(args).unwrap();
        assert_eq!(expanded, vec!["k", "generate", "--max-curv", "10", "--window", "-1,0,1,2", "--out", "a.csv", "--max-curv", "20"]);
        let cli = Cli::try_parse_from(expanded).unwrap();
        match cli.verb {
            Verb::Generate(g) => assert_eq!(g.max_curv, Some(20.0)),
            _ => panic!("wrong verb"),
        }
    }
}
