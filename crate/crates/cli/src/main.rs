//! `hypbounds`: verification suites, formula evaluation and length spectra
//! from the command line.
//!
//! Every subcommand prints one JSON document (or a tab-separated table for
//! `spectrum`). Exit status is 0 when every check passes, 1 when a check
//! fails and 2 on a usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use hypbounds::collar::{self, CollarProfile, SHORT_CORE_LIMIT};
use hypbounds::enumerator::{self, CacheKey, SpectrumConfig, SpectrumEntry, MAX_SPECTRUM_LEN};
use hypbounds::hyp2::PointUHP;
use hypbounds::pants::{self, CurveClass, PantsBoundary};
use hypbounds::report::{Check, Report};
use hypbounds::verifier::{self, ConstantsTable};
use hypbounds::winding::{self, CollarArcQuery, CuspArcQuery};

const THREADS_VAR: &str = "HYPBOUNDS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "hypbounds",
    version,
    about = "Length bounds for closed geodesics with few self-intersections"
)]
struct Cli {
    /// File of `key = value` lines supplying flag defaults; flags given on
    /// the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of the sharp constants and the loop-length threshold.
    #[command(args_override_self = true)]
    Constants,
    /// Collar widths about a geodesic of the given length.
    #[command(args_override_self = true)]
    Collar(CollarArgs),
    /// Length of the curve winding m and n times around two boundaries.
    #[command(name = "pants-length", args_override_self = true)]
    PantsLength(PantsLengthArgs),
    /// Minimise the curve length over boundary lengths and winding numbers.
    #[command(name = "pants-min", args_override_self = true)]
    PantsMin(PantsMinArgs),
    /// Arc length of a winding arc in a collar or a cusp.
    #[command(args_override_self = true)]
    Winding(WindingArgs),
    /// Run every verification suite.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Closed geodesics on the thrice-punctured sphere with self-intersection counts.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
}

#[derive(Args, Debug)]
struct CollarArgs {
    #[arg(long, allow_negative_numbers = true)]
    length: f64,
    /// Also scan the width inequalities on a grid.
    #[arg(long)]
    scan: bool,
    #[arg(long, default_value_t = 20.0)]
    scan_upper: f64,
    #[arg(long, default_value_t = 10_000)]
    scan_points: usize,
}

#[derive(Args, Debug)]
struct PantsLengthArgs {
    #[arg(long, allow_negative_numbers = true)]
    l1: f64,
    #[arg(long, allow_negative_numbers = true)]
    l2: f64,
    #[arg(long, allow_negative_numbers = true)]
    l3: f64,
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    /// Compare with the length read off the holonomy trace.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct PantsMinArgs {
    /// Largest admissible product m·n.
    #[arg(long, allow_negative_numbers = true, default_value_t = 6)]
    cap: i64,
    /// Boundary lengths range over [0, lmax].
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
    lmax: f64,
    /// Grid points per boundary length.
    #[arg(long, default_value_t = 16)]
    grid: usize,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("kind").required(true).args(["collar", "cusp"])))]
struct WindingArgs {
    #[arg(long)]
    collar: bool,
    #[arg(long)]
    cusp: bool,
    /// Winding number.
    #[arg(long, allow_negative_numbers = true)]
    w: f64,
    /// Core length (collar only).
    #[arg(long, allow_negative_numbers = true)]
    core: Option<f64>,
    /// Collar width (collar only).
    #[arg(long, allow_negative_numbers = true)]
    width: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Points of the log-spaced t grid used by the inequality chains.
    #[arg(long, default_value_t = 10_000)]
    t_grid: usize,
    /// Random pants instances compared against the holonomy oracle.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    max_word_len: usize,
    /// Largest geodesic length listed.
    #[arg(long, allow_negative_numbers = true)]
    cap: f64,
    /// Smallest self-intersection count listed.
    #[arg(long, default_value_t = 0)]
    k: u64,
    /// Reuse (or create) a cache of counted classes.
    #[arg(long, value_name = "FILE")]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = enumerator::DEFAULT_CUTOFF_EXTRA)]
    cutoff_extra: usize,
    #[arg(long, default_value_t = enumerator::DEFAULT_TRACER_TOL)]
    tol: f64,
}

/// How a run ended, mapped onto the exit status.
enum Failure {
    Usage(anyhow::Error),
    Checks,
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{msg}"))
}

struct Output {
    text: String,
    pass: bool,
}

impl Output {
    fn report(mut r: Report, config: BTreeMap<String, String>) -> Output {
        r.versions.config = config;
        Output { pass: r.passed(), text: r.to_json() }
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(argv: Vec<OsString>) -> Result<(), Failure> {
    let argv = with_config(argv).map_err(Failure::Usage)?;
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    configure_threads()?;

    let out = match &cli.command {
        Command::Constants => constants(),
        Command::Collar(a) => collar_cmd(a)?,
        Command::PantsLength(a) => pants_length(a)?,
        Command::PantsMin(a) => pants_min(a)?,
        Command::Winding(a) => winding_cmd(a)?,
        Command::Verify(a) => verify(a)?,
        Command::Spectrum(a) => spectrum(a)?,
    };

    match &cli.out {
        Some(path) => {
            fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", out.text),
    }
    if out.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Splices the flags from `--config FILE` in right after the subcommand
/// name, so that anything given on the command line overrides them.
fn with_config(mut argv: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let extra = config_flags(&path)?;

    let names: Vec<String> =
        Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let Some(pos) = argv.iter().position(|a| names.iter().any(|n| a == n.as_str())) else {
        return Ok(argv);
    };
    argv.splice(pos + 1..pos + 1, extra);
    Ok(argv)
}

fn config_flags(path: &Path) -> anyhow::Result<Vec<OsString>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut flags = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), no + 1))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" || key == "out" {
            return Err(anyhow!(
                "{}:{}: `{key}` cannot be set from a config file",
                path.display(),
                no + 1
            ));
        }
        match value {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            v => {
                flags.push(format!("--{key}").into());
                flags.push(v.into());
            }
        }
    }
    Ok(flags)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.into()))
}

fn echo(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn require_finite(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be finite, got {x}")))
    }
}

fn constants() -> Output {
    Output::report(ConstantsTable::compute().report(), BTreeMap::new())
}

fn collar_cmd(a: &CollarArgs) -> Result<Output, Failure> {
    let x = require_finite("length", a.length)?;
    let profile = CollarProfile::new(x).map_err(usage)?;
    let (_, narrow) = collar::generalized_width(x).map_err(usage)?;
    let gap = collar::hexagon_gap(x).map_err(usage)?;
    let residual = (gap - 2.0 * profile.w1).abs();

    let mut r = Report::new("collar");
    r.value("profile", profile)
        .value("narrow_unclamped", narrow)
        .value("hexagon_gap", gap)
        .value("hexagon_gap_residual", residual);
    r.check(Check::from_margin("hexagon_gap_is_2w1", 1e-12 - residual, None));
    r.check(Check::from_margin("w1_exceeds_w", profile.w1 - profile.w, None));
    if x <= SHORT_CORE_LIMIT {
        r.check(Check::from_margin("narrow_side_positive", narrow, None));
    }
    if a.scan {
        if !(a.scan_upper > 0.0 && a.scan_upper.is_finite()) || a.scan_points == 0 {
            return Err(usage("--scan-upper must be positive and --scan-points non-zero"));
        }
        r.absorb(collar::scan_widths(a.scan_upper, a.scan_points).report());
    }
    let mut cfg = vec![("length", x.to_string()), ("scan", a.scan.to_string())];
    if a.scan {
        cfg.push(("scan_upper", a.scan_upper.to_string()));
        cfg.push(("scan_points", a.scan_points.to_string()));
    }
    Ok(Output::report(r, echo(&cfg)))
}

fn pants_length(a: &PantsLengthArgs) -> Result<Output, Failure> {
    let p = PantsBoundary::new(a.l1, a.l2, a.l3).map_err(usage)?;
    let c = CurveClass::new(a.m, a.n).map_err(usage)?;
    let cosh_half = pants::gamma_mn_cosh_half(&p, &c);
    let length = pants::gamma_mn_length(&p, &c);

    let mut r = Report::new("pants_length");
    r.value("boundary", p)
        .value("class", c)
        .value("cosh_half_length", cosh_half)
        .value("length", length);
    r.check(Check::from_margin(
        "corkscrew_lower_bound",
        cosh_half - (2 * c.m * c.n + 1) as f64 + 1e-12,
        None,
    ));
    if a.oracle {
        let oracle = pants::trace_length_oracle(&p, &c).context("holonomy oracle")?;
        let residual = (length - oracle).abs();
        r.value("oracle_length", oracle).value("oracle_residual", residual);
        r.check(Check::from_margin("formula_matches_oracle", 1e-9 - residual, None));
    }
    let cfg = echo(&[
        ("l1", a.l1.to_string()),
        ("l2", a.l2.to_string()),
        ("l3", a.l3.to_string()),
        ("m", a.m.to_string()),
        ("n", a.n.to_string()),
        ("oracle", a.oracle.to_string()),
    ]);
    Ok(Output::report(r, cfg))
}

fn pants_min(a: &PantsMinArgs) -> Result<Output, Failure> {
    if a.cap < 3 {
        return Err(usage(format!("--cap must be at least 3, got {}", a.cap)));
    }
    if a.grid < 2 {
        return Err(usage(format!("--grid must be at least 2, got {}", a.grid)));
    }
    if !(require_finite("lmax", a.lmax)? > 0.0) {
        return Err(usage(format!("--lmax must be positive, got {}", a.lmax)));
    }
    let min = pants::minimize_over_moduli(a.cap, a.lmax, a.grid);
    let target = verifier::corkscrew(2);
    let b = min.boundary;
    let corkscrew_classes = [CurveClass { m: 1, n: 2 }, CurveClass { m: 2, n: 1 }];
    let only_corkscrews = min.minimizing_classes.iter().all(|c| corkscrew_classes.contains(c));

    let mut r = Report::new("pants_min");
    r.value("minimum", &min).value("corkscrew_length", target);
    r.check(Check::from_margin("bound_holds_on_every_cell", min.min_bound_margin + 1e-12, None));
    r.check(Check::from_margin(
        "minimum_is_corkscrew_length",
        1e-9 - (min.length - target).abs(),
        Some(json!({"length": min.length})),
    ));
    r.check(Check::from_margin(
        "minimum_at_ideal_pants",
        1e-12 - b.l1.max(b.l2).max(b.l3),
        Some(json!(b)),
    ));
    r.check(Check::from_margin(
        "minimizers_are_corkscrews",
        if only_corkscrews { 1.0 } else { -1.0 },
        Some(json!(min.minimizing_classes)),
    ));
    r.check(Check::from_margin(
        "increasing_away_from_minimum",
        min.forward_differences.iter().copied().fold(f64::INFINITY, f64::min),
        None,
    ));
    let cfg = echo(&[
        ("cap", a.cap.to_string()),
        ("lmax", a.lmax.to_string()),
        ("grid", a.grid.to_string()),
    ]);
    Ok(Output::report(r, cfg))
}

fn winding_cmd(a: &WindingArgs) -> Result<Output, Failure> {
    let w = require_finite("w", a.w)?;
    if w < 0.0 {
        return Err(usage(format!("--w must be non-negative, got {w}")));
    }
    let mut r = Report::new("winding");
    let mut cfg = vec![("w", w.to_string())];
    if a.collar {
        let (Some(core), Some(width)) = (a.core, a.width) else {
            return Err(usage("--collar needs --core and --width"));
        };
        let (core, width) = (require_finite("core", core)?, require_finite("width", width)?);
        if core <= 0.0 || width < 0.0 {
            return Err(usage("--core must be positive and --width non-negative"));
        }
        let q = CollarArcQuery { winding: w, core_length: core, width };
        let length = winding::collar_arc_length(&q);
        let back = winding::winding_from_length(length, core, width);
        let oracle = winding::saccheri_summit(&q);
        r.value("kind", "collar").value("query", q).value("length", length);
        round_trip_checks(&mut r, w, back, length, oracle, 1e-9);
        cfg.extend([
            ("kind", "collar".to_string()),
            ("core", core.to_string()),
            ("width", width.to_string()),
        ]);
    } else {
        if a.core.is_some() || a.width.is_some() {
            return Err(usage("--core and --width only apply to --collar"));
        }
        let length = winding::cusp_arc_length(&CuspArcQuery { winding: w });
        let back = winding::cusp_winding_from_length(length);
        // endpoints on the horocycle y = 1, where the cusp has period 4
        let oracle = PointUHP { x: -2.0 * w, y: 1.0 }.dist(&PointUHP { x: 2.0 * w, y: 1.0 });
        r.value("kind", "cusp").value("length", length);
        round_trip_checks(&mut r, w, back, length, oracle, 1e-12);
        cfg.push(("kind", "cusp".to_string()));
    }
    Ok(Output::report(r, echo(&cfg)))
}

/// `oracle_tol` is relative to the arc length once it exceeds 1.
fn round_trip_checks(r: &mut Report, w: f64, back: f64, length: f64, oracle: f64, oracle_tol: f64) {
    let round_trip = (back - w).abs();
    let oracle_residual = (oracle - length).abs();
    r.value("winding_from_length", back)
        .value("round_trip_residual", round_trip)
        .value("oracle_length", oracle)
        .value("oracle_residual", oracle_residual);
    r.check(Check::from_margin("round_trip", 1e-9 * w.max(1.0) - round_trip, None));
    r.check(Check::from_margin(
        "formula_matches_geometry",
        oracle_tol * length.max(1.0) - oracle_residual,
        None,
    ));
}

/// Random pants instances with boundary lengths in `[0, 4]` and winding
/// numbers up to 5.
fn random_pants(n: usize, seed: u64) -> Vec<(PantsBoundary, CurveClass)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p = PantsBoundary {
                l1: rng.gen_range(0.0..=4.0),
                l2: rng.gen_range(0.0..=4.0),
                l3: rng.gen_range(0.0..=4.0),
            };
            (p, CurveClass { m: rng.gen_range(1..=5), n: rng.gen_range(1..=5) })
        })
        .collect()
}

fn random_collar_arcs(n: usize, seed: u64) -> Vec<CollarArcQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| CollarArcQuery {
            winding: rng.gen_range(0.05..5.0),
            core_length: rng.gen_range(0.05..3.0),
            width: rng.gen_range(0.0..3.0),
        })
        .collect()
}

/// A suite that could not run shows up as a single failing check.
fn absorb_or_fail(into: &mut Report, suite: &str, r: Result<Report, verifier::VerifierError>) {
    match r {
        Ok(r) => into.absorb(r),
        Err(e) => {
            into.check(Check {
                id: format!("{suite}.error"),
                pass: false,
                margin: f64::NAN,
                witness: Some(json!(e.to_string())),
            });
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<Output, Failure> {
    if a.t_grid < 100 {
        return Err(usage(format!("--t-grid must be at least 100, got {}", a.t_grid)));
    }
    if a.cases == 0 {
        return Err(usage("--cases must be positive"));
    }
    let mut r = Report::new("verify");
    r.absorb(ConstantsTable::compute().report());
    absorb_or_fail(&mut r, "h_analysis", verifier::verify_h_analysis());
    absorb_or_fail(&mut r, "case1_chain", verifier::verify_case1_chain(a.t_grid));
    r.absorb(verifier::verify_concavity_chain(a.t_grid));
    r.absorb(collar::scan_widths(20.0, 10_000).report());
    r.absorb(winding::lemma_report(
        &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
        &random_collar_arcs(100, a.seed.wrapping_add(1)),
    ));

    let mut p = Report::new("pants_oracle");
    let agreement =
        pants::oracle_agreement(&random_pants(a.cases, a.seed)).context("holonomy oracle")?;
    p.value("agreement", &agreement);
    p.check(Check::from_margin("formula_matches_oracle", 1e-9 - agreement.max_residual, None));
    r.absorb(p);

    let cfg = echo(&[
        ("t_grid", a.t_grid.to_string()),
        ("cases", a.cases.to_string()),
        ("seed", a.seed.to_string()),
    ]);
    Ok(Output::report(r, cfg))
}

fn spectrum(a: &SpectrumArgs) -> Result<Output, Failure> {
    if !(1..=MAX_SPECTRUM_LEN).contains(&a.max_word_len) {
        return Err(usage(format!(
            "--max-word-len must lie in 1..={MAX_SPECTRUM_LEN}, got {}",
            a.max_word_len
        )));
    }
    let cap = require_finite("cap", a.cap)?;
    if cap <= 0.0 {
        return Err(usage(format!("--cap must be positive, got {cap}")));
    }
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let key = CacheKey {
        max_len: a.max_word_len,
        cutoff_extra: a.cutoff_extra,
        tol: a.tol,
        length_cap: cap,
    };
    let cfg =
        SpectrumConfig { cutoff_extra: a.cutoff_extra, tol: a.tol, ..SpectrumConfig::default() };

    let cached = a.cache.as_deref().and_then(|p| load_cache(p, &key));
    let entries = match cached {
        Some(entries) => entries,
        None => {
            let entries = enumerator::spectrum_entries(a.max_word_len, cap, &cfg)
                .context("counting self-intersections")?;
            if let Some(path) = &a.cache {
                let mut f = fs::File::create(path)
                    .with_context(|| format!("creating cache {}", path.display()))?;
                enumerator::write_cache(&mut f, &key, &entries)
                    .with_context(|| format!("writing cache {}", path.display()))?;
            }
            entries
        }
    };

    let mut text = String::from("word\ttrace\tlength\tcount\tmethod\n");
    for e in entries.iter().filter(|e| e.length <= cap && e.self_intersections >= a.k) {
        text.push_str(&format!(
            "{}\t{}\t{:.15e}\t{}\t{}\n",
            e.word, e.trace, e.length, e.self_intersections, e.count_method
        ));
    }
    Ok(Output { text, pass: true })
}

/// Entries from a cache file that can answer `key`; stale or unreadable
/// caches are reported and ignored.
fn load_cache(path: &Path, key: &CacheKey) -> Option<Vec<SpectrumEntry>> {
    let file = fs::File::open(path).ok()?;
    match enumerator::read_cache(BufReader::new(file)) {
        Ok((stored, entries)) if stored.serves(key) => Some(entries),
        Ok(_) => None,
        Err(e) => {
            eprintln!("ignoring cache {}: {e}", path.display());
            None
        }
    }
}
