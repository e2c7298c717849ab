//! Command-line front end. Every subcommand produces one table that is
//! written as CSV (with `#` metadata comments) or JSON.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wamlab::arith::{factor_with_budget, Factorization, DEFAULT_RHO_BUDGET};
use wamlab::triples::{acrit_scan, mersenne_family, DEFAULT_HEATMAP_CAP, DEFAULT_MIN_QUALITY};
use wamlab::wamcore::mersenne_abc;
use wamlab::zeros::DEFAULT_GRID_STEP;
use wamlab::{
    argument_principle_count, critical_abscissa, critical_line_probe, cyclotomic_wam_formula, em_histogram, find_zeros,
    generate_triples, mersenne_lower_bound_check, parse_dataset, pigeonhole_triple, wam_at, AbcTriple, ComplexPoint,
    Error, SearchRegion, WamValue,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "wamlab", version, about = "Weighted average multiplicities of integers and ABC triples")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Recorded in the metadata; randomized steps derive from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pollard-rho iterations allowed per composite before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_RHO_BUDGET)]
    rho_budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prime factorization of N.
    Factor { n: u128 },
    /// wam(N, s).
    Wam {
        n: u128,
        /// RE[,IM]
        #[arg(long = "s", allow_hyphen_values = true)]
        s: String,
    },
    /// Critical abscissa of N.
    Acrit { n: u128 },
    /// Zeros of the denominator in a rectangle.
    Zeros {
        n: u128,
        /// LO:HI
        #[arg(long, allow_hyphen_values = true)]
        re: String,
        /// LO:HI
        #[arg(long, allow_hyphen_values = true)]
        im: String,
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        step: f64,
        /// Also count zeros with the argument principle.
        #[arg(long)]
        verify: bool,
    },
    /// log10 of the largest |wam| over a triple set on a grid.
    Heatmap {
        #[command(flatten)]
        source: TripleSource,
        #[arg(long, allow_hyphen_values = true, default_value = "-6:6")]
        re: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-6:6")]
        im: String,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_HEATMAP_CAP)]
        cap: f64,
    },
    /// Histogram of e_m over a triple set.
    EmHist {
        #[command(flatten)]
        source: TripleSource,
    },
    /// Smallest |f| sampled on the line Re(s) = a_crit.
    CriticalLine {
        n: u128,
        #[arg(long)]
        bmax: f64,
        #[arg(long, default_value_t = 10)]
        samples_per_unit: u32,
    },
    /// a_crit and p_m for every triple in a set.
    AcritScan {
        #[command(flatten)]
        source: TripleSource,
    },
    /// wam of 2^n (2^n - 1) and the lower-bound checks for 2 <= n <= NMAX.
    Mersenne {
        #[arg(long, default_value_t = 63)]
        nmax: u32,
        #[arg(long = "s", allow_hyphen_values = true)]
        s: String,
    },
    /// Pigeonhole polynomial triple of degree N over F_Q.
    PolyTriple {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: u32,
    },
    /// (p + p^s + 1) / (p^s + 2).
    Cyclo {
        #[arg(long)]
        p: u64,
        #[arg(long = "s", allow_hyphen_values = true)]
        s: String,
    },
    /// Sweep of the Mersenne inequalities over n and a fixed set of s.
    BoundsCheck {
        #[arg(long, default_value_t = 63)]
        nmax: u32,
        /// Comma-separated real parts, each below 1.
        #[arg(long, allow_hyphen_values = true, default_value = "-1,0,0.5,0.9")]
        re_values: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,1,5")]
        im_values: String,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TripleSource {
    /// Dataset with one "a b c" triple per line.
    #[arg(long)]
    triples: Option<PathBuf>,
    /// Generate all triples with c <= CMAX instead.
    #[arg(long)]
    gen: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MIN_QUALITY)]
    min_quality: f64,
}

/// A cell of the output table.
#[derive(Clone, Debug)]
enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // Shortest round-trip form, switching to exponents for tiny and
            // huge magnitudes.
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON numbers cannot hold all of u128.
            Cell::Int(v) if *v <= u128::from(u64::MAX) => json!(*v as u64),
            Cell::Int(v) => json!(v.to_string()),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(t) => json!(t),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

struct Table {
    metadata: Vec<(String, Cell)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { metadata: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                for (k, v) in &self.metadata {
                    writeln!(out, "# {k}={}", v.csv())?;
                }
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let metadata: serde_json::Map<String, Value> =
                    self.metadata.iter().map(|(k, v)| (k.clone(), v.json())).collect();
                let rows: Vec<Value> =
                    self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let doc = json!({ "metadata": metadata, "columns": self.columns, "rows": rows });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Library(e) if e.is_budget() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn parse_point(text: &str) -> Outcome<ComplexPoint> {
    let mut parts = text.split(',');
    let parse = |p: Option<&str>| -> Outcome<f64> {
        p.map(str::trim)
            .unwrap_or("0")
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("invalid complex number {text:?}, expected RE[,IM]")))
    };
    let re = parse(parts.next())?;
    let im = parse(parts.next())?;
    if parts.next().is_some() {
        return Err(Failure::Usage(format!("invalid complex number {text:?}, expected RE[,IM]")));
    }
    Ok(ComplexPoint::new(re, im)?)
}

fn parse_range(text: &str) -> Outcome<(f64, f64)> {
    let bad = || Failure::Usage(format!("invalid range {text:?}, expected LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_list(text: &str) -> Outcome<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("invalid number list {text:?}"))))
        .collect()
}

fn load_triples(source: &TripleSource, table: &mut Table, err: &mut dyn Write) -> Outcome<Vec<AbcTriple>> {
    if let Some(c_max) = source.gen {
        table.meta("source", format!("generated c_max={c_max}"));
        table.meta("min_quality", source.min_quality);
        return Ok(generate_triples(c_max, source.min_quality)?);
    }
    let path = source.triples.as_ref().expect("clap requires one source");
    let report = parse_dataset(path)?;
    for e in &report.errors {
        writeln!(err, "warning: {}:{}: {} ({:?})", path.display(), e.line, e.error, e.text)?;
    }
    table.meta("source", path.display().to_string());
    table.meta("skipped_lines", report.errors.len());
    Ok(report.triples)
}

fn value_cells(v: WamValue) -> Vec<Cell> {
    match v {
        WamValue::Finite(z) => vec![z.re.into(), z.im.into(), z.norm().into(), false.into()],
        WamValue::Pole => vec![Cell::Empty, Cell::Empty, f64::INFINITY.into(), true.into()],
    }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Outcome<Table> {
    let factor = |n: u128| -> Outcome<Factorization> { Ok(factor_with_budget(n, cli.rho_budget)?) };
    let mut table;
    match &cli.command {
        Command::Factor { n } => {
            let f = factor(*n)?;
            table = Table::new(&["prime", "exponent"]);
            table.meta("n", *n);
            table.meta("radical", f.radical()?);
            table.meta("omega", f.omega());
            table.meta("big_omega", f.big_omega());
            for (p, e) in f.iter() {
                table.push(vec![p.into(), e.into()]);
            }
        }
        Command::Wam { n, s } => {
            let s = parse_point(s)?;
            let eval = wam_at(&factor(*n)?, s)?;
            table = Table::new(&["n", "s_re", "s_im", "wam_re", "wam_im", "abs", "pole"]);
            let mut row = vec![(*n).into(), s.re().into(), s.im().into()];
            row.extend(value_cells(eval.value));
            table.push(row);
        }
        Command::Acrit { n } => {
            let p = critical_abscissa(&factor(*n)?)?;
            table = Table::new(&["n", "m", "largest_prime", "e_m", "a_crit", "is_constant"]);
            table.push(vec![
                (*n).into(),
                p.m.into(),
                p.largest_prime.into(),
                p.e_m.into(),
                p.a_crit.into(),
                p.is_constant.into(),
            ]);
        }
        Command::Zeros { n, re, im, step, verify } => {
            let f = factor(*n)?;
            let region = SearchRegion::new(parse_range(re)?, parse_range(im)?)?.with_step(*step)?;
            let search = find_zeros(&f, &region)?;
            table = Table::new(&["re", "im", "residual", "numerator_abs", "classification"]);
            table.meta("n", *n);
            table.meta("step", *step);
            let d = search.diagnostics;
            table.meta("seeds", d.seeds);
            table.meta("converged", d.converged);
            table.meta("no_convergence", d.no_convergence);
            table.meta("outside_region", d.outside_region);
            table.meta("duplicates", d.duplicates);
            if *verify {
                table.meta("argument_principle_count", argument_principle_count(&f, &region)?);
            }
            for z in search.zeros {
                table.push(vec![
                    z.location.re().into(),
                    z.location.im().into(),
                    z.residual.into(),
                    z.numerator_magnitude.into(),
                    z.classification.as_str().to_string().into(),
                ]);
            }
        }
        Command::Heatmap { source, re, im, step, cap } => {
            table = Table::new(&["re", "im", "log10_max_abs_wam"]);
            table.meta("cap", *cap);
            let triples = load_triples(source, &mut table, err)?;
            table.meta("triples", triples.len());
            let grid = wamlab::max_wam_heatmap(&triples, parse_range(re)?, parse_range(im)?, *step, *cap)?;
            for (j, &y) in grid.im_axis.iter().enumerate() {
                for (i, &x) in grid.re_axis.iter().enumerate() {
                    table.push(vec![x.into(), y.into(), grid.cells[j][i].into()]);
                }
            }
        }
        Command::EmHist { source } => {
            table = Table::new(&["e_m", "count"]);
            let triples = load_triples(source, &mut table, err)?;
            table.meta("triples", triples.len());
            for (e, count) in em_histogram(&triples) {
                table.push(vec![e.into(), count.into()]);
            }
        }
        Command::CriticalLine { n, bmax, samples_per_unit } => {
            let r = critical_line_probe(&factor(*n)?, *bmax, *samples_per_unit)?;
            table = Table::new(&["n", "a_crit", "b_max", "samples_per_unit", "evaluations", "min_abs_f", "argmin_b"]);
            table.push(vec![
                (*n).into(),
                r.a_crit.into(),
                r.b_max.into(),
                r.samples_per_unit.into(),
                r.evaluations.into(),
                r.min_magnitude.into(),
                r.argmin_b.into(),
            ]);
        }
        Command::AcritScan { source } => {
            table = Table::new(&["a", "b", "c", "quality", "m", "largest_prime", "a_crit"]);
            let triples = load_triples(source, &mut table, err)?;
            for (t, row) in triples.iter().zip(acrit_scan(&triples)) {
                table.push(vec![
                    row.a.into(),
                    row.b.into(),
                    row.c.into(),
                    t.quality.into(),
                    row.m.into(),
                    row.largest_prime.into(),
                    row.a_crit.into(),
                ]);
            }
        }
        Command::Mersenne { nmax, s } => {
            let s = parse_point(s)?;
            let (family, skipped) = mersenne_family(*nmax)?;
            for (n, e) in &skipped {
                writeln!(err, "warning: skipped n = {n}: {e}")?;
            }
            table = Table::new(&[
                "n",
                "c",
                "quality",
                "e_m",
                "wam_re",
                "wam_im",
                "abs",
                "pole",
                "lemma_lhs",
                "lemma_rhs",
                "wam_lower_bound",
                "holds",
            ]);
            table.meta("s", format!("{},{}", s.re(), s.im()));
            table.meta("skipped", skipped.len());
            for t in &family {
                let n = t.c.trailing_zeros();
                let (abc, _) = mersenne_abc(n)?;
                let mut row = vec![n.into(), t.c.into(), t.quality.into(), abc.largest_exponent().unwrap().into()];
                row.extend(value_cells(wam_at(&abc, s)?.value));
                if s.re() < 1.0 {
                    let r = mersenne_lower_bound_check(n, s)?;
                    row.extend([r.lemma_lhs.into(), r.lemma_rhs.into(), r.wam_lower_bound.into(), r.holds().into()]);
                } else {
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                }
                table.push(row);
            }
        }
        Command::PolyTriple { q, n } => {
            let r = pigeonhole_triple(*q, *n)?;
            let wam_one = r.wam(ComplexPoint::real(1.0)?)?.finite().map(|z| z.re);
            table = Table::new(&[
                "q",
                "n",
                "k",
                "a",
                "b",
                "c",
                "r",
                "r_degree",
                "formula_count",
                "irreducible_count",
                "lower_parts",
                "occupied_buckets",
                "colliding_buckets",
                "max_bucket",
                "wam_one",
            ]);
            let t = &r.triple;
            table.push(vec![
                r.q.into(),
                r.n.into(),
                r.k.into(),
                t.a().to_string().into(),
                t.b().to_string().into(),
                t.c().to_string().into(),
                r.r.to_string().into(),
                r.r.degree().unwrap_or(0).into(),
                r.formula_count.into(),
                r.irreducible_count.into(),
                r.lower_parts.into(),
                r.occupied_buckets.into(),
                r.colliding_buckets.into(),
                r.max_bucket.into(),
                wam_one.into(),
            ]);
        }
        Command::Cyclo { p, s } => {
            let s = parse_point(s)?;
            let v = cyclotomic_wam_formula(*p, s)?;
            table = Table::new(&["p", "s_re", "s_im", "wam_re", "wam_im", "abs", "pole"]);
            let mut row = vec![(*p).into(), s.re().into(), s.im().into()];
            row.extend(value_cells(v));
            table.push(row);
        }
        Command::BoundsCheck { nmax, re_values, im_values } => {
            if !(2..=63).contains(nmax) {
                return Err(Error::InvalidArgument(format!("nmax = {nmax} outside [2, 63]")).into());
            }
            let res = parse_list(re_values)?;
            let ims = parse_list(im_values)?;
            table = Table::new(&["n", "s_re", "s_im", "lemma_margin", "wam_margin", "holds"]);
            let mut failures = 0usize;
            for n in 2..=*nmax {
                for &re in &res {
                    for &im in &ims {
                        let r = mersenne_lower_bound_check(n, ComplexPoint::new(re, im)?)?;
                        failures += usize::from(!r.holds());
                        table.push(vec![
                            n.into(),
                            re.into(),
                            im.into(),
                            r.lemma_margin().into(),
                            r.wam_margin().into(),
                            r.holds().into(),
                        ]);
                    }
                }
            }
            table.meta("failures", failures);
        }
    }
    Ok(table)
}

fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var("WAMLAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("WAMLAB_THREADS={raw:?} is not a positive integer")))?;
    // A pool may already exist when run() is called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run_parsed(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome<()> {
    configure_threads()?;
    let body = execute(cli, err)?;
    let mut table = Table::new(&[]);
    table.meta("version", VERSION);
    table.meta("log_base", "natural");
    table.meta("seed", cli.seed);
    table.meta("rho_budget", cli.rho_budget);
    if !body.metadata.iter().any(|(k, _)| k == "cap") {
        table.meta("cap", DEFAULT_HEATMAP_CAP);
    }
    table.metadata.extend(body.metadata);
    table.columns = body.columns;
    table.rows = body.rows;
    match &cli.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            table.write(cli.format, &mut file)?;
            file.flush()?;
        }
        None => table.write(cli.format, out)?,
    }
    Ok(())
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code: 0 on success, 1 on usage or validation errors, 2 when
/// a budget or convergence limit was hit.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match run_parsed(&cli, out, err) {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            failure.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_points() {
        let s = parse_point("0.5").unwrap();
        assert_eq!((s.re(), s.im()), (0.5, 0.0));
        let s = parse_point("-1, 2.5").unwrap();
        assert_eq!((s.re(), s.im()), (-1.0, 2.5));
        assert!(parse_point("").is_err());
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_point("nan").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-6:6").unwrap(), (-6.0, 6.0));
        assert!(parse_range("6:-6").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:b").is_err());
        assert_eq!(parse_list("-1, 0,0.5").unwrap(), vec![-1.0, 0.0, 0.5]);
    }

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Text("1,2@3".into()).csv(), "\"1,2@3\"");
        assert_eq!(Cell::Text("say \"hi\", ok".into()).csv(), "\"say \"\"hi\"\", ok\"");
        assert_eq!(Cell::Float(1e-20).csv(), "1e-20");
        assert_eq!(Cell::Float(2.5).csv(), "2.5");
        assert_eq!(Cell::Int(u128::MAX).json(), json!(u128::MAX.to_string()));
        assert_eq!(Cell::Float(f64::INFINITY).json(), json!("inf"));
        assert_eq!(Cell::from(None::<f64>).csv(), "");
    }
}
