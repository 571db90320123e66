//! The four subcommands.

use std::path::{Path, PathBuf};

use mreg_core::form::form_regularity;
use mreg_core::MregError;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{sha256_hex, Bundle};
use crate::config::{load, ReportSpec, SolveSpec, SweepSpec, VerifyConfig};
use crate::error::{CliError, CliResult};
use crate::pipeline::{build_problem, solve_point, Solved};
use crate::suite::{run_checks, unknown_ids, CheckResult};
use crate::svg::{line_plot, Axes, Series};

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub verbose: bool,
}

impl Common {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn config_path(&self) -> CliResult<&Path> {
        self.config
            .as_deref()
            .ok_or_else(|| CliError::Config("--config is required for this command".into()))
    }

    fn pool(&self) -> CliResult<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            if j == 0 {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError::Config(e.to_string()))
    }
}

// ---------------------------------------------------------------- verify

pub fn verify(c: &Common) -> CliResult<Vec<CheckResult>> {
    let (cfg, sha) = match &c.config {
        Some(p) => {
            let l = load::<VerifyConfig>(p)?;
            (l.value, sha256_hex(&l.bytes))
        }
        None => {
            let cfg = VerifyConfig::default();
            let sha = sha256_hex(&serde_json::to_vec(&cfg)?);
            (cfg, sha)
        }
    };
    let unknown = unknown_ids(&cfg);
    if !unknown.is_empty() {
        return Err(CliError::Config(format!("unknown check ids: {}", unknown.join(", "))));
    }
    if let Some((id, t)) = cfg.tolerances.iter().find(|(_, t)| !t.is_finite()) {
        return Err(CliError::Config(format!("tolerance of {id} is {t}")));
    }
    c.log(format!("verify: scale {:?}, seed {}", cfg.scale, c.seed));
    let rows = c.pool()?.install(|| run_checks(&cfg, c.seed));

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["check_id", "anchor", "measured", "tolerance", "pass", "note"])
            .map_err(MregError::from)?;
        for r in &rows {
            w.write_record([
                r.id.clone(),
                r.anchor.clone(),
                format!("{:e}", r.measured),
                format!("{:e}", r.tolerance),
                r.pass.to_string(),
                r.note.clone(),
            ])
            .map_err(MregError::from)?;
        }
        w.flush()?;
    }
    let mut b = Bundle::create(&c.out)?;
    b.write("verify.csv", &buf)?;
    b.finish("verify", sha, c.seed)?;

    Ok(rows)
}

/// One line per check.
pub fn print_checks(rows: &[CheckResult]) {
    for r in rows {
        println!(
            "{} {:<18} measured {:.3e} tolerance {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.measured,
            r.tolerance
        );
    }
}

/// `ChecksFailed` naming each failing check and its anchor.
pub fn check_verdict(rows: &[CheckResult]) -> CliResult<()> {
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} ({})", r.id, r.anchor))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}

// ---------------------------------------------------------------- solve

const NORM_HEADER: [&str; 12] = [
    "n", "alpha", "l2_v", "l2_h", "half_h", "alpha_v", "half_alpha_h", "half_v", "du", "au", "mr", "residual",
];

fn norm_row(n: usize, s: &Solved) -> Vec<f64> {
    let m = &s.solution.norms;
    vec![
        n as f64,
        m.alpha,
        m.l2_v,
        m.l2_h,
        m.half_h,
        m.alpha_v,
        m.half_alpha_h,
        m.half_v,
        m.du,
        m.au,
        m.mr(),
        s.solution.residual,
    ]
}

#[derive(Serialize)]
struct SolveReport<'a> {
    label: String,
    dimension: usize,
    eigenvalue: Option<f64>,
    trace: &'a Option<mreg_core::solver::TraceReport>,
    constants: mreg_core::form::FormConstants,
    delta: f64,
    residual: f64,
    stats: &'a mreg_core::solver::SolveStats,
    oracle: Option<mreg_core::solver::OracleReport>,
    warnings: &'a [String],
    analytic_notes: &'a [String],
}

/// Writes `residual_history.csv` for a failed solve.
fn record_failure(b: &mut Bundle, e: &CliError) -> CliResult<()> {
    if let CliError::Core(MregError::Numerical { residual_history, .. }) = e {
        let rows: Vec<Vec<f64>> = residual_history
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_finite())
            .map(|(k, &r)| vec![k as f64, r])
            .collect();
        b.write_table("residual_history.csv", &["iteration", "relative_residual"], &rows)?;
    }
    Ok(())
}

pub fn solve(c: &Common) -> CliResult<Solved> {
    let loaded = load::<SolveSpec>(c.config_path()?)?;
    let spec = loaded.value;
    let sha = sha256_hex(&loaded.bytes);
    let mut b = Bundle::create(&c.out)?;
    c.log(format!("solve: n = {}", spec.grid.n));
    let s = match c.pool()?.install(|| solve_point(&spec, spec.grid.n)) {
        Ok(s) => s,
        Err(e) => {
            record_failure(&mut b, &e)?;
            b.finish("solve", sha, c.seed)?;
            return Err(e);
        }
    };
    let w = *s.grid.window().expect("solve grids carry a window");

    // nodal solution on the window, long format
    let per = s.problem.nodes.len();
    let mut rows = vec![];
    let mut h_norm = vec![];
    for j in w.first..=w.last {
        let t = s.grid.time(j);
        let u = mreg_core::CVector::from_column_slice(s.solution.u.at(j));
        h_norm.push((t, u.norm()));
        let re = &s.problem.to_nodal * u.map(|z| z.re);
        let im = &s.problem.to_nodal * u.map(|z| z.im);
        for k in 0..re.len() {
            rows.push(vec![t, (k / per) as f64, s.problem.nodes[k % per], re[k], im[k]]);
        }
    }
    b.write_table("solution.csv", &["t", "component", "x", "re", "im"], &rows)?;

    let mut norms = vec![norm_row(spec.grid.n, &s)];
    for &n in &spec.refinement {
        c.log(format!("solve: refinement n = {n}"));
        let r = c.pool()?.install(|| solve_point(&spec, n))?;
        norms.push(norm_row(n, &r));
    }
    norms.sort_by(|a, b| a[0].total_cmp(&b[0]));
    norms.dedup_by(|a, b| a[0] == b[0]);
    b.write_table("norms.csv", &NORM_HEADER, &norms)?;

    b.write_json(
        "trace.json",
        &SolveReport {
            label: format!("{:?}", s.problem.label),
            dimension: s.problem.dim(),
            eigenvalue: s.eigenvalue,
            trace: &s.solution.trace,
            constants: s.solution.constants,
            delta: s.solution.delta,
            residual: s.solution.residual,
            stats: &s.solution.stats,
            oracle: s.solution.oracle,
            warnings: &s.solution.warnings,
            analytic_notes: &s.problem.analytic_notes,
        },
    )?;

    if let (true, true, Some(lambda)) = (s.autonomous, s.zero_forcing, s.eigenvalue) {
        let t0 = spec.grid.window.0;
        let scale: f64 = s.u0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rows: Vec<Vec<f64>> = h_norm
            .iter()
            .map(|&(t, m)| {
                let p = scale * (-lambda * (t - t0)).exp();
                vec![t, m, p, (m - p).abs()]
            })
            .collect();
        b.write_table("decay.csv", &["t", "norm_h", "predicted", "abs_error"], &rows)?;
    }

    let series = vec![Series {
        label: "‖u(t)‖_H".into(),
        points: h_norm,
    }];
    b.write(
        "solution.svg",
        line_plot("solution norm", "t", "‖u(t)‖_H", &series, Axes::default()).as_bytes(),
    )?;

    let form = s.problem.form.clone().on_interval(spec.grid.window.0, spec.grid.window.1)?;
    let reg = form_regularity(&form, 0.5, 2.0, &s.grid)?;
    let band_rows: Vec<Vec<f64>> = reg
        .bands
        .iter()
        .enumerate()
        .map(|(j, &v)| vec![j as f64, (1u64 << j) as f64, v])
        .collect();
    b.write_table("bands.csv", &["band", "lag_steps", "contribution"], &band_rows)?;
    b.write("bands.svg", bands_svg(&band_rows).as_bytes())?;

    b.finish("solve", sha, c.seed)?;
    Ok(s)
}

fn bands_svg(rows: &[Vec<f64>]) -> String {
    let series = vec![Series {
        label: "W^{1/2,2} band".into(),
        points: rows.iter().map(|r| (r[1], r[2])).collect(),
    }];
    line_plot(
        "time-regularity bands of the form",
        "lag (grid steps)",
        "contribution",
        &series,
        Axes { log_x: true, log_y: true },
    )
}

// ---------------------------------------------------------------- sweep

pub const THRESHOLD_HEADER: [&str; 6] = ["s_target", "n", "du", "half_v", "mr", "slope"];

pub fn sweep(c: &Common) -> CliResult<SweepOutcome> {
    let loaded = load::<SweepSpec>(c.config_path()?)?;
    let spec = loaded.value;
    spec.validate()?;
    let sha = sha256_hex(&loaded.bytes);
    let points: Vec<(f64, usize)> = spec
        .s_targets
        .iter()
        .flat_map(|&s| spec.grids.iter().map(move |&n| (s, n)))
        .collect();
    c.log(format!("sweep: {} points", points.len()));
    let rows = c.pool()?.install(|| {
        points
            .par_iter()
            .map(|&(s, n)| -> CliResult<Vec<f64>> {
                let p = spec.point(s, n);
                let solved = solve_point(&p, n)?;
                let problem = build_problem(&p.problem)?;
                let form = problem.form.on_interval(spec.window.0, spec.window.1)?;
                let slope = form_regularity(&form, 0.5, 2.0, &solved.grid)?.fine_scale_slope();
                c.log(format!("sweep: s = {s}, n = {n} done"));
                let m = &solved.solution.norms;
                Ok(vec![s, n as f64, m.du, m.half_v, m.mr(), slope])
            })
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut b = Bundle::create(&c.out)?;
    b.write_table("threshold.csv", &THRESHOLD_HEADER, &rows)?;
    b.write("threshold.svg", threshold_svg(&rows).as_bytes())?;
    b.finish("sweep", sha, c.seed)?;

    let gate = 0.5 + spec.smooth_margin;
    let targets = spec
        .s_targets
        .iter()
        .map(|&s| TargetSpread {
            s_target: s,
            spread: spread_at(&rows, s),
            gated: s >= gate,
            pass: s < gate || spread_at(&rows, s) <= spec.tolerance,
        })
        .collect();
    Ok(SweepOutcome { rows, targets })
}

pub struct TargetSpread {
    pub s_target: f64,
    pub spread: f64,
    pub gated: bool,
    pub pass: bool,
}

pub struct SweepOutcome {
    /// Rows of threshold.csv.
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<TargetSpread>,
}

impl SweepOutcome {
    pub fn print(&self) {
        for t in &self.targets {
            let verdict = match (t.gated, t.pass) {
                (false, _) => "not gated",
                (true, true) => "PASS",
                (true, false) => "FAIL",
            };
            println!("s_target {:.3}: spread {:.3e} {verdict}", t.s_target, t.spread);
        }
    }

    pub fn verdict(&self) -> CliResult<()> {
        let failed: Vec<String> = self
            .targets
            .iter()
            .filter(|t| !t.pass)
            .map(|t| format!("s_target={}", t.s_target))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::ChecksFailed(failed))
        }
    }
}

/// Largest `max/min − 1` of `du` and `half_v` over the grids at one target.
pub fn spread_at(rows: &[Vec<f64>], s: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for col in [2, 3] {
        let v: Vec<f64> = rows.iter().filter(|r| r[0] == s).map(|r| r[col]).collect();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        if !v.is_empty() {
            worst = worst.max(hi / lo - 1.0);
        }
    }
    worst
}

fn threshold_svg(rows: &[Vec<f64>]) -> String {
    let mut grids: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    grids.sort_by(f64::total_cmp);
    grids.dedup();
    let series: Vec<Series> = grids
        .iter()
        .map(|&n| Series {
            label: format!("‖u′‖, n = {n}"),
            points: rows.iter().filter(|r| r[1] == n).map(|r| (r[0], r[2])).collect(),
        })
        .collect();
    line_plot(
        "maximal regularity against time regularity",
        "s_target",
        "‖u′‖_L²(H)",
        &series,
        Axes { log_x: false, log_y: true },
    )
}

// ---------------------------------------------------------------- report

fn read_table(path: &Path) -> CliResult<Option<(Vec<String>, Vec<Vec<f64>>)>> {
    if !path.exists() {
        return Ok(None);
    }
    let f = std::fs::File::open(path)?;
    Ok(Some(mreg_core::io::read_table_csv(f)?))
}

fn column(header: &[String], name: &str) -> CliResult<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("column {name} missing")))
}

pub fn report(c: &Common) -> CliResult<()> {
    let path = c.config_path()?;
    let loaded = load::<ReportSpec>(path)?;
    let sha = sha256_hex(&loaded.bytes);
    let base = path.parent().unwrap_or(Path::new("."));
    let dir = base.join(&loaded.value.bundle);
    if !dir.is_dir() {
        return Err(CliError::Config(format!("bundle {} is not a directory", dir.display())));
    }
    let mut b = Bundle::create(&c.out)?;
    let mut md = format!("# Report for {}\n\n", loaded.value.bundle);
    let mut found = false;

    if let Some((h, rows)) = read_table(&dir.join("norms.csv"))? {
        found = true;
        let (n, du, hv, mr) = (column(&h, "n")?, column(&h, "du")?, column(&h, "half_v")?, column(&h, "mr")?);
        md.push_str("## Norms\n\n| n | ‖u′‖ | ‖u‖_H1/2(V) | MR norm |\n|---|---|---|---|\n");
        for r in &rows {
            md.push_str(&format!("| {} | {:.6e} | {:.6e} | {:.6e} |\n", r[n], r[du], r[hv], r[mr]));
        }
        md.push('\n');
        let series = vec![
            Series {
                label: "‖u′‖".into(),
                points: rows.iter().map(|r| (r[n], r[du])).collect(),
            },
            Series {
                label: "‖u‖_H1/2(V)".into(),
                points: rows.iter().map(|r| (r[n], r[hv])).collect(),
            },
        ];
        b.write(
            "norms.svg",
            line_plot("norms under refinement", "n", "norm", &series, Axes { log_x: true, log_y: true }).as_bytes(),
        )?;
    }
    if let Some((h, rows)) = read_table(&dir.join("threshold.csv"))? {
        found = true;
        if h.len() != THRESHOLD_HEADER.len() || h.iter().zip(THRESHOLD_HEADER).any(|(a, b)| a != b) {
            return Err(CliError::Config(format!("threshold.csv header {h:?} is not {THRESHOLD_HEADER:?}")));
        }
        let mut targets: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        targets.dedup();
        md.push_str("## Threshold sweep\n\n| s_target | spread over grids | fine-scale slope |\n|---|---|---|\n");
        for s in targets {
            let slope = rows.iter().filter(|r| r[0] == s).map(|r| r[5]).last().unwrap_or(f64::NAN);
            md.push_str(&format!("| {s} | {:.3e} | {slope:.3} |\n", spread_at(&rows, s)));
        }
        md.push('\n');
        b.write("threshold.svg", threshold_svg(&rows).as_bytes())?;
    }
    if let Some((_, rows)) = read_table(&dir.join("bands.csv"))? {
        found = true;
        md.push_str(&format!("## Regularity bands\n\n{} bands, see bands.svg.\n\n", rows.len()));
        b.write("bands.svg", bands_svg(&rows).as_bytes())?;
    }
    if !found {
        return Err(CliError::Config(format!(
            "{} holds none of norms.csv, threshold.csv, bands.csv",
            dir.display()
        )));
    }
    b.write("summary.md", md.as_bytes())?;
    b.finish("report", sha, c.seed)?;
    Ok(())
}
