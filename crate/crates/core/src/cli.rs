//! The `drsc` command-line front end.
//!
//! Every file written carries the crate version, the seed (where one is
//! used) and the command line, so each artifact can be regenerated.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constraints::{ConstraintFile, ConstraintSet, Relation};
use crate::drs::BoundsSpec;
use crate::drsc::{compute_thetas, compute_thetas_ordered, InducedSimplexFamily};
use crate::error::{Error, Result};
use crate::geometry::{to_plane, ConvexPolygon, Point};
use crate::gof::{build_grid, default_bins, sample_counts, BinGrid, GofReport, ProjectedPolytope, DEFAULT_TARGET_E};
use crate::sampler::{DrsSampler, DrscSampler, RejectionSampler, Sampler, SamplingStats};
use crate::svg;
use crate::tiling::{TilingAudit, DEFAULT_DEPTH};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "drsc", version, about = "Uniform sampling on the constrained simplex")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw vectors and write them as CSV (plus a JSON sidecar with --out).
    Sample(SampleArgs),
    /// Exact tiling audit of the simplified DRS sampler on the 3-simplex.
    Tile(TileArgs),
    /// Chi-squared uniformity test on a fresh sample.
    Gof(GofArgs),
    /// Scatter plot of a 3-D sample file.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Drs,
    Drsc,
    Reject,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// JSON constraint file.
    #[arg(long, conflicts_with_all = ["upper", "lower"])]
    pub constraints: Option<PathBuf>,
    /// Comma-separated upper bounds.
    #[arg(long, value_delimiter = ',')]
    pub upper: Option<Vec<f64>>,
    /// Comma-separated lower bounds.
    #[arg(long, value_delimiter = ',')]
    pub lower: Option<Vec<f64>>,
    /// Coordinate processing order for the DRSC thresholds (default ascending).
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value = "drsc")]
    pub algo: Algo,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Output CSV; the sidecar goes next to it with a `.json` extension.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TileArgs {
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,1")]
    pub upper: Vec<f64>,
    /// Directory for report.json, tiling.svg, shapes.svg and delta.svg.
    /// Without it the report JSON goes to stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[arg(long, value_enum, default_value = "drsc")]
    pub algo: Algo,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Bins per projected axis; chosen from the region volume when omitted.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Also write the report JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Sample CSV as written by `sample`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command_line = args.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &command_line, &mut out) {
        Ok(()) => 0,
        // A closed downstream pipe (`drsc sample | head`) is not a failure.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, command_line: &str, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Sample(a) => cmd_sample(a, command_line, out),
        Command::Tile(a) => cmd_tile(a, command_line, out),
        Command::Gof(a) => cmd_gof(a, command_line, out),
        Command::Render(a) => cmd_render(a, command_line),
    }
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    version: &'static str,
    seed: Option<u64>,
    command: &'a str,
}

fn provenance_line(seed: Option<u64>, command_line: &str) -> String {
    match seed {
        Some(s) => format!("drsc {VERSION} seed={s} command={command_line:?}"),
        None => format!("drsc {VERSION} command={command_line:?}"),
    }
}

fn bounds_from(upper: Option<&Vec<f64>>, lower: Option<&Vec<f64>>) -> Result<BoundsSpec> {
    match (upper, lower) {
        (Some(u), Some(l)) => BoundsSpec::new(l.clone(), u.clone()),
        (Some(u), None) => BoundsSpec::upper_only(u.clone()),
        (None, Some(l)) => BoundsSpec::new(l.clone(), vec![1.0; l.len()]),
        (None, None) => Err(Error::Input("need --constraints or --upper/--lower".into())),
    }
}

impl InstanceArgs {
    fn constraint_set(&self) -> Result<ConstraintSet> {
        match &self.constraints {
            Some(path) => ConstraintSet::from_path(path),
            None => {
                let b = bounds_from(self.upper.as_ref(), self.lower.as_ref())?;
                ConstraintSet::from_bounds(b.lower(), b.upper())
            }
        }
    }

    fn family(&self, cs: &ConstraintSet) -> Result<InducedSimplexFamily> {
        match &self.order {
            Some(o) => compute_thetas_ordered(cs, o),
            None => compute_thetas(cs),
        }
    }

    fn is_given(&self) -> bool {
        self.constraints.is_some() || self.upper.is_some() || self.lower.is_some()
    }
}

/// The sampler for `algo`, the constraint set its output must satisfy, and
/// the DRSC thresholds when used.
fn build_sampler(
    algo: Algo,
    inst: &InstanceArgs,
) -> Result<(Box<dyn Sampler>, ConstraintSet, Option<InducedSimplexFamily>)> {
    match algo {
        Algo::Drs => {
            if inst.constraints.is_some() {
                return Err(Error::Input("--algo drs takes --upper/--lower, not a constraint file".into()));
            }
            let b = bounds_from(inst.upper.as_ref(), inst.lower.as_ref())?;
            let cs = ConstraintSet::from_bounds(b.lower(), b.upper())?;
            Ok((Box::new(DrsSampler::new(b)), cs, None))
        }
        Algo::Drsc => {
            let cs = inst.constraint_set()?;
            let fam = inst.family(&cs)?;
            Ok((Box::new(DrscSampler::with_family(cs.clone(), fam.clone())), cs, Some(fam)))
        }
        Algo::Reject => {
            let cs = inst.constraint_set()?;
            Ok((Box::new(RejectionSampler::new(cs.clone())), cs, None))
        }
    }
}

#[derive(Debug, Serialize)]
struct StatsJson {
    samples: usize,
    restarts: usize,
    rescales: usize,
    acceptance_rate: f64,
    rescales_per_sample: f64,
}

impl From<&SamplingStats> for StatsJson {
    fn from(s: &SamplingStats) -> Self {
        StatsJson {
            samples: s.samples,
            restarts: s.restarts,
            rescales: s.rescales,
            acceptance_rate: s.acceptance_rate(),
            rescales_per_sample: s.rescales_per_sample(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ThetaJson<'a> {
    theta: &'a [f64],
    order: &'a [usize],
    empty: Vec<bool>,
}

#[derive(Debug, Serialize)]
struct SampleSidecar<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    sampler: Algo,
    n: usize,
    threads: usize,
    constraints: ConstraintFile,
    stats: StatsJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    thetas: Option<ThetaJson<'a>>,
}

fn theta_json(f: &InducedSimplexFamily) -> ThetaJson<'_> {
    ThetaJson { theta: f.thetas(), order: f.order(), empty: f.empty_flags() }
}

fn cmd_sample(a: &SampleArgs, command_line: &str, stdout: &mut dyn Write) -> Result<()> {
    let (sampler, cs, family) = build_sampler(a.algo, &a.instance)?;
    let (vectors, stats) = crate::sampler::sample_vectors(sampler.as_ref(), a.n, a.seed, a.threads)?;
    let dim = sampler.dim();
    let write_csv = |w: &mut dyn Write| -> Result<()> {
        writeln!(w, "# {}", provenance_line(Some(a.seed), command_line))?;
        let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut line = String::new();
        for v in &vectors {
            line.clear();
            for (i, x) in v.as_slice().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&x.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    };
    match &a.out {
        None => write_csv(stdout)?,
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(path)?);
            write_csv(&mut w)?;
            w.flush()?;
            let sidecar = SampleSidecar {
                provenance: Provenance { version: VERSION, seed: Some(a.seed), command: command_line },
                sampler: a.algo,
                n: a.n,
                threads: a.threads,
                constraints: cs.to_file(),
                stats: (&stats).into(),
                thetas: family.as_ref().map(theta_json),
            };
            fs::write(path.with_extension("json"), serde_json::to_string_pretty(&sidecar)? + "\n")?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TileReportJson<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    upper: [f64; 3],
    #[serde(flatten)]
    report: &'a crate::tiling::RegionReport,
}

fn svg_with_provenance(svg: String, command_line: &str, seed: Option<u64>) -> String {
    let comment = format!("<!-- {} -->\n", provenance_line(seed, command_line).replace("--", "- -"));
    match svg.find('\n') {
        Some(i) => format!("{}{}{}", &svg[..=i], comment, &svg[i + 1..]),
        None => svg + &comment,
    }
}

fn cmd_tile(a: &TileArgs, command_line: &str, stdout: &mut dyn Write) -> Result<()> {
    let audit = TilingAudit::run(&a.upper, a.depth)?;
    let json = serde_json::to_string_pretty(&TileReportJson {
        provenance: Provenance { version: VERSION, seed: None, command: command_line },
        upper: audit.family.upper,
        report: &audit.report,
    })? + "\n";
    match &a.out_dir {
        None => stdout.write_all(json.as_bytes())?,
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.json"), json)?;
            for (name, body) in [
                ("tiling.svg", svg::tiling_svg(&audit)),
                ("shapes.svg", svg::shapes_svg(&audit)),
                ("delta.svg", svg::delta_svg(&audit)),
            ] {
                fs::write(dir.join(name), svg_with_provenance(body, command_line, None))?;
            }
            write_tile_table(&audit, stdout)?;
        }
    }
    Ok(())
}

fn write_tile_table(audit: &TilingAudit, w: &mut dyn Write) -> Result<()> {
    let r = &audit.report;
    writeln!(w, "region  realised  target   delta")?;
    for row in &r.rows {
        writeln!(w, "{:>6} {:>9.2} {:>7.2} {:>7.2}", row.region, row.realised, row.target, row.delta)?;
    }
    writeln!(w, "total  {:>9.2} {:>7.2}", r.total_realised, r.total_target)?;
    writeln!(w, "residual {:>7.2}", r.residual)?;
    writeln!(w, "sum |delta| {:>11.2}", r.sum_abs_delta)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct GofJson<'a> {
    #[serde(flatten)]
    provenance: Provenance<'a>,
    sampler: Algo,
    bins_per_dim: usize,
    #[serde(flatten)]
    report: GofReport,
    infeasible: u64,
    stats: StatsJson,
}

fn cmd_gof(a: &GofArgs, command_line: &str, stdout: &mut dyn Write) -> Result<()> {
    let (sampler, cs, _) = build_sampler(a.algo, &a.instance)?;
    let n_b = match a.bins {
        Some(b) => b,
        None => default_bins(&cs, a.n, DEFAULT_TARGET_E)?,
    };
    let poly = ProjectedPolytope::new(&cs);
    let mut grid: BinGrid = build_grid(&poly, n_b)?;
    let run = sample_counts(&grid, &poly, sampler.as_ref(), a.n, a.seed, a.threads)?;
    grid.absorb(&run.counts, run.seen);
    let report = grid.report()?;
    let json = serde_json::to_string_pretty(&GofJson {
        provenance: Provenance { version: VERSION, seed: Some(a.seed), command: command_line },
        sampler: a.algo,
        bins_per_dim: n_b,
        report,
        infeasible: run.infeasible,
        stats: (&run.stats).into(),
    })? + "\n";
    stdout.write_all(json.as_bytes())?;
    if let Some(path) = &a.out {
        fs::write(path, &json)?;
    }
    Ok(())
}

/// Reads a sample CSV: `#` lines and a non-numeric header are skipped.
pub fn read_sample_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if rows.is_empty() => continue,
            Err(e) => return Err(Error::Input(format!("{}:{}: {e}", path.display(), lineno + 1))),
        }
    }
    Ok(rows)
}

/// Segment where the line `w . x = b` crosses the simplex, if it does.
fn boundary_segment(w: &[f64], b: f64) -> Option<(Point, Point)> {
    let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let f = |x: &[f64; 3]| w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b;
    let mut hits: Vec<Point> = Vec::new();
    for k in 0..3 {
        let (p, q) = (corners[k], corners[(k + 1) % 3]);
        let (fp, fq) = (f(&p), f(&q));
        if fp == 0.0 {
            hits.push(to_plane(&p));
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            let x: Vec<f64> = p.iter().zip(&q).map(|(a, c)| a + t * (c - a)).collect();
            hits.push(to_plane(&x));
        }
    }
    hits.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    match hits.as_slice() {
        [p, .., q] => Some((*p, *q)),
        _ => None,
    }
}

fn cmd_render(a: &RenderArgs, command_line: &str) -> Result<()> {
    let rows = read_sample_csv(&a.input)?;
    if let Some(bad) = rows.iter().find(|r| r.len() != 3) {
        return Err(Error::Dimension(format!("render needs 3-D vectors, found a row with {} entries", bad.len())));
    }
    let points: Vec<Point> = rows.iter().map(|r| to_plane(r)).collect();
    let mut regions = Vec::new();
    let mut lines = Vec::new();
    if a.instance.is_given() {
        let cs = a.instance.constraint_set()?;
        if cs.dim() != 3 {
            return Err(Error::Dimension(format!("render needs a 3-D constraint set, got n = {}", cs.dim())));
        }
        let mut half = Vec::new();
        for c in &cs.linear {
            let w = [c.coeffs[0], c.coeffs[1], c.coeffs[2]];
            half.push((w, c.rhs));
            if c.relation == Relation::Eq {
                half.push(([-w[0], -w[1], -w[2]], -c.rhs));
            }
            lines.extend(boundary_segment(&c.coeffs, c.rhs));
        }
        let feasible = ConvexPolygon::from_barycentric_constraints(&half);
        if !feasible.is_empty() {
            regions.push(feasible);
        }
    }
    let body = svg::scatter_svg_with_lines(&points, &regions, &lines);
    fs::write(&a.out, svg_with_provenance(body, command_line, None))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_of_a_bound() {
        let (p, q) = boundary_segment(&[1.0, 0.0, 0.0], 0.5).unwrap();
        for s in [p, q] {
            let x = crate::simplex::unproject(s);
            assert!((x[0] - 0.5).abs() < 1e-12);
        }
        assert!(boundary_segment(&[1.0, 1.0, 1.0], 2.0).is_none());
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(main_with_args(["drsc", "bogus"]), 2);
        assert_eq!(main_with_args(["drsc", "sample", "--n", "3"]), 2);
        assert_eq!(main_with_args(["drsc", "tile", "--upper", "0.5,0.5,1"]), 2);
    }

    #[test]
    fn sample_to_writer() {
        let cli = Cli::try_parse_from(["drsc", "sample", "--algo", "drs", "--upper", "0.5,0.25,1", "--n", "5"]).unwrap();
        let mut buf = Vec::new();
        execute(&cli, "drsc sample", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# drsc"));
        assert!(lines[0].contains("seed=0"));
        assert_eq!(lines[1], "x1,x2,x3");
        assert_eq!(lines.len(), 7);
    }
}
