//! Command-line front end behind the `hotplug` binary.
//!
//! Exit codes: 0 pass, 1 usage or parameter error, 2 decode failure,
//! 3 privacy failure, 4 accounting mismatch (loads, side information or a
//! violated gap claim).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{self, achievable_curve, bound_value, memory_grid, BOUND_NAMES, DEFAULT_GRID};
use crate::model::{fmt_rat, to_f64, Rational, SystemParams, TradeoffPoint};
use crate::schemes::t_range;
use crate::verify::{self, VerificationReport, VerifyPlan, EXIT_ACCOUNTING, EXIT_OK};

pub const EXIT_USAGE: i32 = 1;

pub const CSV_HEADER: &str = "scheme,M_num,M_den,R_num,R_den,M_float,R_float,is_corner";

#[derive(Debug, Parser)]
#[command(name = "hotplug", about = "Hotplug coded caching: curves, verification and gaps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit achievable curves and converse bounds.
    Tradeoff(TradeoffArgs),
    /// Run a scheme exhaustively and check decoding, loads and privacy.
    Verify(VerifyArgs),
    /// Multiplicative gaps between achievable loads and converses.
    Gap(GapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Active users K'.
    #[arg(long)]
    pub ka: Option<usize>,
    /// Total users K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Files N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Field size; 0 or absent picks the smallest suitable prime.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub b_factor: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `key=value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated curve names.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Comma-separated bound names.
    #[arg(long)]
    pub bounds: Option<String>,
    /// Interior grid points for sampled curves.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub scheme: Option<String>,
    /// Memory parameter, or `sweep` for every valid value.
    #[arg(long)]
    pub t: Option<String>,
    /// Also run the exact privacy check.
    #[arg(long)]
    pub privacy: bool,
    /// Corrupt one cached symbol before decoding.
    #[arg(long, hide = true)]
    pub sabotage: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Flags merged with an optional config file.
struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    fn load(common: &Common) -> Result<Self> {
        let mut values = HashMap::new();
        if let Some(path) = &common.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
                values.insert(k.trim().replace('_', "-"), v.trim().to_string());
            }
        }
        let mut s = Settings { values };
        s.set("ka", common.ka);
        s.set("k", common.k);
        s.set("n", common.n);
        s.set("q", common.q);
        s.set("b-factor", common.b_factor);
        s.set("seed", common.seed);
        if let Some(f) = common.format {
            s.values.insert("format".into(), if f == Format::Csv { "csv" } else { "json" }.into());
        }
        if let Some(o) = &common.out {
            s.values.insert("out".into(), o.display().to_string());
        }
        Ok(s)
    }

    fn set<T: ToString>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.values.insert(key.into(), v.to_string());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| anyhow!("--{key}: cannot parse {v:?}")))
            .transpose()
    }

    fn params(&self) -> Result<SystemParams> {
        let need = |key: &str| -> Result<usize> { self.num(key)?.ok_or_else(|| anyhow!("missing --{key}")) };
        let mut p = SystemParams::new(need("ka")?, need("k")?, need("n")?);
        p.q = self.num("q")?.unwrap_or(0);
        p.b_factor = self.num("b-factor")?.unwrap_or(1);
        p.validate()?;
        Ok(p)
    }

    fn seed(&self) -> Result<u64> {
        Ok(self.num("seed")?.unwrap_or(0))
    }

    fn format(&self, default: Format) -> Result<Format> {
        match self.get("format") {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => bail!("--format: unknown format {other:?}"),
        }
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    }

    fn emit(&self, text: &str) -> Result<()> {
        match self.get("out") {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Outcome of one command: text to emit and the process exit code.
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub label: String,
    pub point: TradeoffPoint,
    pub is_corner: bool,
}

#[derive(Serialize)]
struct CurveJson<'a> {
    label: &'a str,
    kind: &'a str,
    points: Vec<PointJson>,
}

#[derive(Serialize)]
struct PointJson {
    #[serde(rename = "M")]
    m: String,
    #[serde(rename = "R")]
    r: String,
    #[serde(rename = "M_float")]
    m_float: f64,
    #[serde(rename = "R_float")]
    r_float: f64,
    is_corner: bool,
}

/// Rows for the requested curves and bounds. Closed-form points are all
/// listed, flagged when they are envelope corners; bounds are sampled on
/// the memory grid extended by every scheme corner.
pub fn tradeoff_rows(
    params: &SystemParams,
    schemes: &[String],
    bound_names: &[String],
    grid: usize,
) -> Result<Vec<(String, &'static str, Vec<CurveRow>)>> {
    if schemes.is_empty() {
        bail!("no schemes given; pass --schemes with one or more of {}", bounds::CURVE_NAMES.join(", "));
    }
    let mut out = Vec::new();
    let mut corners: Vec<Rational> = Vec::new();
    for name in schemes {
        let curve = achievable_curve(name, params)?;
        let env = curve.envelope();
        let mut pts = curve.points.clone();
        pts.sort_by(|a, b| a.m.cmp(&b.m).then(a.r.cmp(&b.r)));
        pts.dedup();
        let sampled = bounds::is_sampled(name);
        let rows = pts
            .into_iter()
            .map(|p| CurveRow {
                label: name.clone(),
                is_corner: !sampled && env.contains(&p),
                point: p,
            })
            .collect();
        corners.extend(env.iter().map(|p| p.m.clone()));
        out.push((name.clone(), "scheme", rows));
    }
    let n = Rational::from_integer(params.n_files.into());
    let mut xs = vec![Rational::from_integer(0.into())];
    xs.extend(memory_grid(params, grid, &corners));
    xs.push(n);
    for name in bound_names {
        if !BOUND_NAMES.contains(&name.as_str()) {
            bail!("unknown bound {name:?}; expected one of {}", BOUND_NAMES.join(", "));
        }
        let rows: Option<Vec<CurveRow>> = xs
            .iter()
            .map(|m| {
                bound_value(name, params, m).map(|r| CurveRow {
                    label: name.clone(),
                    point: TradeoffPoint::new(m.clone(), r),
                    is_corner: false,
                })
            })
            .collect();
        match rows {
            Some(rows) => out.push((name.clone(), "bound", rows)),
            None => eprintln!("warning: bound {name} does not apply to K'={}, skipped", params.k_active),
        }
    }
    Ok(out)
}

pub fn render_csv(curves: &[(String, &'static str, Vec<CurveRow>)]) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (_, _, rows) in curves {
        for row in rows {
            let p = &row.point;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                row.label,
                p.m.numer(),
                p.m.denom(),
                p.r.numer(),
                p.r.denom(),
                to_f64(&p.m),
                to_f64(&p.r),
                row.is_corner
            );
        }
    }
    s
}

fn render_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn cmd_tradeoff(args: &TradeoffArgs) -> Result<Outcome> {
    let mut st = Settings::load(&args.common)?;
    st.set("schemes", args.schemes.clone());
    st.set("bounds", args.bounds.clone());
    st.set("grid", args.grid);
    let params = st.params()?;
    let grid = st.num("grid")?.unwrap_or(DEFAULT_GRID);
    let curves = tradeoff_rows(&params, &st.list("schemes"), &st.list("bounds"), grid)?;
    let output = match st.format(Format::Csv)? {
        Format::Csv => render_csv(&curves),
        Format::Json => {
            let body: Vec<CurveJson> = curves
                .iter()
                .map(|(label, kind, rows)| CurveJson {
                    label,
                    kind,
                    points: rows
                        .iter()
                        .map(|r| PointJson {
                            m: fmt_rat(&r.point.m),
                            r: fmt_rat(&r.point.r),
                            m_float: to_f64(&r.point.m),
                            r_float: to_f64(&r.point.r),
                            is_corner: r.is_corner,
                        })
                        .collect(),
                })
                .collect();
            render_json(&serde_json::json!({ "schema": 1, "params": params, "curves": body }))?
        }
    };
    st.emit(&output)?;
    Ok(Outcome { output, code: EXIT_OK })
}

#[derive(Serialize)]
struct VerifyJson {
    schema: u32,
    reports: Vec<VerificationReport>,
    /// Checks refused by a guard rail, with the reason.
    skipped: Vec<String>,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut st = Settings::load(&args.common)?;
    st.set("scheme", args.scheme.clone());
    st.set("t", args.t.clone());
    let params = st.params()?;
    let name = st.get("scheme").ok_or_else(|| anyhow!("missing --scheme"))?.to_string();
    let privacy = args.privacy || st.get("privacy") == Some("true");
    if st.format(Format::Json)? == Format::Csv {
        bail!("verify reports are JSON only");
    }
    let ts: Vec<usize> = match st.get("t") {
        Some("sweep") => t_range(&name, &params),
        Some(v) => vec![v.parse().map_err(|_| anyhow!("--t: expected a number or `sweep`, got {v:?}"))?],
        None => vec![params.t],
    };
    let seed = st.seed()?;
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for t in ts {
        let p = params.clone().with_t(t);
        let plan = VerifyPlan {
            seed,
            correctness: true,
            privacy: false,
            side_info: true,
            mds: true,
            sabotage: args.sabotage,
        };
        let mut report = verify::verify_scheme(&name, &p, plan)?;
        if privacy {
            let scheme = crate::schemes::build_scheme(&name, &p)?;
            match verify::verify_privacy(scheme.as_ref(), seed) {
                Ok(r) => report.privacy = Some(r),
                Err(e @ verify::VerifyError::TooLarge { .. }) => {
                    let msg = format!("{} t={t}: privacy check rejected: {e}", report.scheme);
                    eprintln!("{msg}");
                    skipped.push(msg);
                }
                Err(e) => return Err(e.into()),
            }
        }
        eprintln!("{}", report.summary());
        reports.push(report);
    }
    let code = reports.iter().map(VerificationReport::exit_code).filter(|&c| c != 0).min().unwrap_or(EXIT_OK);
    let output = render_json(&VerifyJson {
        schema: 1,
        reports,
        skipped,
    })?;
    st.emit(&output)?;
    Ok(Outcome { output, code })
}

#[derive(Serialize)]
struct GapJson {
    schema: u32,
    params: SystemParams,
    grid: usize,
    reports: Vec<bounds::GapReport>,
    ok: bool,
}

/// All gap checks for one parameter set.
pub fn gap_reports(params: &SystemParams, grid: usize) -> Result<Vec<bounds::GapReport>> {
    let mut reports = vec![bounds::nonprivate_gap(params, grid)];
    let env = achievable_curve("yma_plus", params)?.envelope();
    let corners: Vec<Rational> = env.iter().map(|p| p.m.clone()).collect();
    let g = memory_grid(params, grid, &corners);
    reports.push(bounds::gap_report(
        "yma_plus / converse",
        &g,
        |m| crate::model::eval_envelope(&env, m).unwrap_or_else(|| Rational::from_integer(0.into())),
        |m| bounds::nonprivate_converse(params, m),
        Rational::from_integer(2.into()),
    ));
    if params.n_files >= 2 {
        reports.push(bounds::private_gap(params, grid)?);
    }
    Ok(reports)
}

pub fn cmd_gap(args: &GapArgs) -> Result<Outcome> {
    let mut st = Settings::load(&args.common)?;
    st.set("grid", args.grid);
    let params = st.params()?;
    let grid = st.num("grid")?.unwrap_or(DEFAULT_GRID);
    if st.format(Format::Json)? == Format::Csv {
        bail!("gap reports are JSON only");
    }
    let reports = gap_reports(&params, grid)?;
    let ok = reports.iter().all(|r| r.ok);
    for r in &reports {
        eprintln!(
            "{}: max ratio {:.5} at M in {:?} ({})",
            r.label,
            r.max_ratio_float,
            r.arg_max,
            if r.ok { "ok" } else { "VIOLATED" }
        );
    }
    let output = render_json(&GapJson {
        schema: 1,
        params,
        grid,
        reports,
        ok,
    })?;
    st.emit(&output)?;
    Ok(Outcome {
        output,
        code: if ok { EXIT_OK } else { EXIT_ACCOUNTING },
    })
}

/// Parse `argv` and run; usage errors come back as `Err`.
pub fn run<I, T>(argv: I) -> Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    match &cli.command {
        Command::Tradeoff(a) => cmd_tradeoff(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gap(a) => cmd_gap(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_user_corner_rows() {
        let p = SystemParams::new(3, 4, 3);
        let curves = tradeoff_rows(&p, &["ht".into()], &["cutset".into()], 8).unwrap();
        let csv = render_csv(&curves);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("ht,1,1,1,1,1,1,true"));
        assert!(csv.contains("ht,2,1,1,3,"));
    }

    #[test]
    fn empty_scheme_list_is_an_error() {
        let p = SystemParams::new(2, 3, 2);
        assert!(tradeoff_rows(&p, &[], &["cutset".into()], 8).is_err());
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = std::env::temp_dir().join(format!("hotplug-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        let out = dir.join("out.csv");
        std::fs::write(&cfg, "ka=2\nk=3\nn=5\nschemes=ht1\n").unwrap();
        let o = run([
            "hotplug",
            "tradeoff",
            "--config",
            cfg.to_str().unwrap(),
            "--n",
            "2",
            "--out",
            out.to_str().unwrap(),
        ])
        .unwrap();
        assert_eq!(o.code, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("ht1,2,1,0,1,2,0,true"));
    }
}
