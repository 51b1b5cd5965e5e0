mod input;
mod manifest;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tsf_core::drift::haar::haar_average;
use tsf_core::export::{cylinder_table, format_float, report_table, series_table, Cell, Table};
use tsf_core::origami::{format_cycles, origami_orbit, DEFAULT_ORBIT_CAP};
use tsf_core::{
    act, area, billiard_count, count_series, cylinders, drift_check, normalize_area, periods, recurrence_fraction,
    scheme_average, stratum_of, systole, torus_reduce, unfold, validate_surface, write_origami, write_polygon,
    write_sheet, write_surface, CatalogItem, DriftConfig, DriftFn, Error, Evaluator, GroupElement, Observable, Scheme,
    SchemeOptions, CATALOG_NAMES,
};

use input::{load, load_sheets, surface_of, Loaded};
use manifest::{config_hash, now_ms, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "tsf", version, about = "Translation surfaces, cylinder counting and drift experiments")]
struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stratum, genus, area, basis tag and periods of an input.
    Info { input: String },
    /// Apply a matrix of determinant 1 to a surface.
    Act {
        #[arg(long, value_delimiter = ',', num_args = 1, required = true, allow_negative_numbers = true)]
        matrix: Vec<f64>,
        input: String,
        /// Reduce the image back to the fundamental domain (flat tori only).
        #[arg(long)]
        reduce: bool,
    },
    /// Length of the shortest saddle connection.
    Systole { input: String },
    /// Cylinders with waist at most the given length.
    Cylinders {
        input: String,
        #[arg(long)]
        max_length: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// SL(2,Z)-orbit of an origami, one canonical representative per line.
    Orbit {
        input: String,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
    },
    /// Rational billiard tables: unfolding, cylinder counts and Cesàro series.
    #[command(subcommand)]
    Billiard(BilliardCommand),
    /// Averaging-inequality report for u or the Margulis function.
    Drift(DriftArgs),
    /// Sector, Følner or random-walk average of a systole observable.
    Average(AverageArgs),
    /// Share of directions that spend at most half the time in the thick part.
    Recurrence {
        #[arg(long)]
        surface: String,
        /// Comma-separated list of times.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long = "epsK")]
        eps_k: f64,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
    },
    /// List catalog entries, or print one in its file format.
    Catalog { name: Option<String> },
}

#[derive(Subcommand, Debug)]
enum BilliardCommand {
    /// Print the translation surface obtained by unfolding.
    Unfold { input: String },
    /// Number of cylinders of waist at most `T` on the unfolding.
    Count {
        input: String,
        #[arg(long = "T")]
        t: f64,
    },
    /// Cesàro series of N(e^s)e^{-2s} (polygons are unfolded first).
    Sv {
        input: String,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        /// Emit the raw counts N(e^s) instead.
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum FnKind {
    U,
    #[value(name = "fM")]
    Margulis,
}

#[derive(Args, Debug)]
struct DriftArgs {
    #[arg(long)]
    surface: String,
    #[arg(long = "fn", value_enum)]
    func: FnKind,
    /// Comma-separated list of times.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    /// Sheet catalog file (any number of `format sheet 1` blocks).
    #[arg(long)]
    catalog: Option<String>,
    /// Push the base point along the geodesic flow first.
    #[arg(long, default_value_t = 0.0)]
    base_t: f64,
    #[arg(long, default_value_t = 1.0)]
    target_c: f64,
    #[arg(long, default_value_t = 0.0)]
    target_b: f64,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 0.5)]
    u_exponent: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum SchemeKind {
    Sector,
    Folner,
    Rw,
}

#[derive(Args, Debug)]
struct AverageArgs {
    #[arg(long, value_enum)]
    scheme: SchemeKind,
    #[arg(long, default_value = "sys_bump:0.3:0.5")]
    obs: String,
    #[arg(long, default_value = "torus")]
    surface: String,
    /// Time horizon (sector and Følner).
    #[arg(long, default_value_t = 15.0)]
    t: f64,
    /// Horocycle length (Følner).
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Walk length (random walk).
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Sector bounds (sector).
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = TAU)]
    hi: f64,
    #[arg(long, default_value_t = 256)]
    angle_nodes: usize,
    #[arg(long, default_value_t = 301)]
    time_nodes: usize,
    #[arg(long, default_value_t = 256)]
    horocycle_nodes: usize,
    #[arg(long, default_value_t = 2048)]
    paths: usize,
    /// Also report the Haar Monte Carlo value with this many samples (flat tori).
    #[arg(long, default_value_t = 0)]
    haar_samples: usize,
}

struct Ctx {
    args: Vec<String>,
    seed: u64,
    out: Option<PathBuf>,
    inputs: Vec<(String, Vec<u8>)>,
    started: u128,
}

impl Ctx {
    fn load(&mut self, arg: &str) -> tsf_core::Result<Loaded> {
        let l = load(arg)?;
        self.inputs.push(l.source.clone());
        Ok(l)
    }

    /// Writes `text` to `--out` (with a manifest) or stdout.
    fn emit(&self, text: &str) -> tsf_core::Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text)?;
                let m = RunManifest {
                    command_line: self.args.clone(),
                    seed: self.seed,
                    config_hash: config_hash(&self.args, &self.inputs),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    started_unix_ms: self.started,
                    finished_unix_ms: now_ms(),
                    outputs: vec![path.display().to_string()],
                };
                m.write(path)?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let mut ctx = Ctx { args: std::env::args().collect(), seed: cli.seed, out: cli.out, inputs: Vec::new(), started: now_ms() };
    match run(cli.command, &mut ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command, ctx: &mut Ctx) -> tsf_core::Result<()> {
    match cmd {
        Command::Info { input } => {
            let l = ctx.load(&input)?;
            ctx.emit(&info(&l)?)
        }
        Command::Act { matrix, input, reduce } => {
            if matrix.len() != 4 {
                return Err(Error::Invalid(format!("--matrix needs 4 entries, got {}", matrix.len())));
            }
            let g = GroupElement::new(matrix[0], matrix[1], matrix[2], matrix[3])?;
            let s = surface_of(&ctx.load(&input)?)?;
            let image = act(&g, &s);
            if reduce {
                let (red, rec) = torus_reduce(&image)?;
                let m = rec.torus_matrix().expect("torus record");
                let text = format!("# cocycle {} {} {} {}\n{}", m[0][0], m[0][1], m[1][0], m[1][1], write_surface(&red));
                ctx.emit(&text)
            } else {
                ctx.emit(&write_surface(&image))
            }
        }
        Command::Systole { input } => {
            let s = surface_of(&ctx.load(&input)?)?;
            ctx.emit(&format!("{}\n", format_float(systole(&s)?)))
        }
        Command::Cylinders { input, max_length, format } => {
            let s = surface_of(&ctx.load(&input)?)?;
            let cyls = cylinders(&s, max_length)?;
            match format {
                Format::Csv => ctx.emit(&cylinder_table(&cyls).to_csv()),
                Format::Text => {
                    let mut text = String::new();
                    for c in &cyls {
                        text.push_str(&format!(
                            "direction ({:.6}, {:.6}) waist {:.9} height {:.9} boundary {}\n",
                            c.direction().x,
                            c.direction().y,
                            c.waist,
                            c.height,
                            c.boundary.len()
                        ));
                    }
                    ctx.emit(&text)
                }
            }
        }
        Command::Orbit { input, cap } => {
            let l = ctx.load(&input)?;
            let CatalogItem::Origami(o) = &l.item else {
                return Err(Error::Invalid(format!("{input} is not an origami")));
            };
            let orbit = origami_orbit(o, cap);
            let mut text = String::new();
            for m in &orbit.members {
                text.push_str(&format!("{} {} {}\n", m.n(), format_cycles(m.h()), format_cycles(m.v())));
            }
            ctx.emit(&text)?;
            if orbit.complete {
                Ok(())
            } else {
                Err(Error::CapExceeded { what: "orbit size", cap })
            }
        }
        Command::Billiard(b) => billiard(b, ctx),
        Command::Drift(d) => drift(d, ctx),
        Command::Average(a) => average(a, ctx),
        Command::Recurrence { surface, t, eps_k, nodes } => {
            let s = normalize_area(&surface_of(&ctx.load(&surface)?)?);
            let cfg = DriftConfig { nodes, ..DriftConfig::default() };
            cfg.validate()?;
            let ev = Evaluator::with_reach(&s, &cfg, t.iter().copied().fold(0.0, f64::max))?;
            let mut table = Table::new(&["t", "eps_k", "fraction"]);
            for &ti in &t {
                let f = recurrence_fraction(&ev, &GroupElement::IDENTITY, ti, eps_k, nodes)?;
                table.push(vec![ti.into(), eps_k.into(), f.into()]);
            }
            ctx.emit(&table.to_csv())
        }
        Command::Catalog { name } => match name {
            None => ctx.emit(&CATALOG_NAMES.iter().map(|n| format!("{n}\n")).collect::<String>()),
            Some(n) => {
                let l = ctx.load(&n)?;
                let text = match &l.item {
                    CatalogItem::Surface(s) => write_surface(s),
                    CatalogItem::Origami(o) => write_origami(o),
                    CatalogItem::Polygon(q) => write_polygon(q),
                    CatalogItem::Sheet(sh) => write_sheet(sh),
                };
                ctx.emit(&text)
            }
        },
    }
}

fn info(l: &Loaded) -> tsf_core::Result<String> {
    let mut text = format!("kind {}\n", l.item.kind());
    if let CatalogItem::Sheet(sh) = &l.item {
        text.push_str(&format!("basis {}\nequations {}\ncoordinates {}\n", sh.basis_tag, sh.equations.len(), sh.k()));
        return Ok(text);
    }
    if let CatalogItem::Polygon(q) = &l.item {
        let fr: Vec<String> = q.angle_fractions().iter().map(|f| f.to_string()).collect();
        text.push_str(&format!("angles {}\ngroup_order {}\n", fr.join(" "), 2 * q.denominator_lcm()));
    }
    let s = surface_of(l)?;
    validate_surface(&s).into_result()?;
    let st = stratum_of(&s)?;
    let p = periods(&s)?;
    text.push_str(&format!(
        "label {}\npolygons {}\nstratum {}\ngenus {}\nzeros {}\nmarked_points {}\narea {}\nbasis {}\n",
        s.label(),
        s.polygons().len(),
        st,
        st.genus,
        st.zero_count,
        st.marked_points,
        format_float(area(&s)),
        p.basis_tag
    ));
    let mask = p.absolute_mask();
    for j in 0..p.k() {
        let c = p.column(j);
        let kind = if mask[j] { "absolute" } else { "relative" };
        text.push_str(&format!("period {j} {kind} {} {}\n", format_float(c.x), format_float(c.y)));
    }
    Ok(text)
}

fn billiard(cmd: BilliardCommand, ctx: &mut Ctx) -> tsf_core::Result<()> {
    match cmd {
        BilliardCommand::Unfold { input } => {
            let l = ctx.load(&input)?;
            let CatalogItem::Polygon(q) = &l.item else {
                return Err(Error::Invalid(format!("{input} is not a polygon")));
            };
            ctx.emit(&write_surface(&unfold(q)?))
        }
        BilliardCommand::Count { input, t } => {
            let l = ctx.load(&input)?;
            let n = match &l.item {
                CatalogItem::Polygon(q) => billiard_count(q, t)?,
                _ => cylinders(&surface_of(&l)?, t)?.len(),
            };
            ctx.emit(&format!("{n}\n"))
        }
        BilliardCommand::Sv { input, t_max, steps, raw } => {
            let s = surface_of(&ctx.load(&input)?)?;
            let (raw_series, cesaro) = count_series(&s, t_max, steps)?;
            ctx.emit(&series_table(if raw { &raw_series } else { &cesaro }).to_csv())
        }
    }
}

fn drift(d: DriftArgs, ctx: &mut Ctx) -> tsf_core::Result<()> {
    let s = normalize_area(&surface_of(&ctx.load(&d.surface)?)?);
    let cfg = DriftConfig {
        delta: d.cfg.delta,
        eps: d.cfg.eps,
        lambda: d.cfg.lambda,
        k: d.cfg.k,
        u_exponent: d.cfg.u_exponent,
        nodes: d.nodes,
    };
    cfg.validate()?;
    if d.t.is_empty() {
        return Err(Error::Invalid("at least one --t is required".into()));
    }
    let func = match d.func {
        FnKind::U => DriftFn::U,
        FnKind::Margulis => {
            let sheets = match &d.catalog {
                Some(c) => {
                    let (sheets, source) = load_sheets(c)?;
                    ctx.inputs.push(source);
                    sheets
                }
                None => Vec::new(),
            };
            DriftFn::Margulis(sheets)
        }
    };
    let reach = d.base_t.abs() + d.t.iter().copied().fold(0.0, f64::max) + 1.0;
    let ev = Evaluator::with_reach(&s, &cfg, reach)?;
    let base = GroupElement::geodesic(d.base_t);
    let reports = d
        .t
        .iter()
        .map(|&t| drift_check(&func, &ev, &base, t, d.nodes, d.target_c, d.target_b))
        .collect::<tsf_core::Result<Vec<_>>>()?;
    ctx.emit(&report_table(&reports).to_csv())
}

fn average(a: AverageArgs, ctx: &mut Ctx) -> tsf_core::Result<()> {
    let obs: Observable = a.obs.parse()?;
    let s = normalize_area(&surface_of(&ctx.load(&a.surface)?)?);
    let cfg = DriftConfig::default();
    let (scheme, param) = match a.scheme {
        SchemeKind::Sector => (Scheme::Sector { t: a.t, lo: a.lo, hi: a.hi }, a.t),
        SchemeKind::Folner => (Scheme::Folner { t: a.t, r: a.r }, a.t),
        SchemeKind::Rw => (Scheme::RandomWalk { n: a.n }, a.n as f64),
    };
    let reach = match a.scheme {
        SchemeKind::Rw => a.n as f64,
        _ => a.t + a.r.max(1.0).ln() + 1.0,
    };
    let ev = Evaluator::with_reach(&s, &cfg, reach)?;
    let opts = SchemeOptions {
        angle_nodes: a.angle_nodes,
        time_nodes: a.time_nodes,
        horocycle_nodes: a.horocycle_nodes,
        walk_paths: a.paths,
    };
    let value = scheme_average(scheme, &DriftFn::Observable(obs.clone()), &ev, ctx.seed, &opts)?;
    let name = format!("{:?}", a.scheme).to_lowercase();
    if a.haar_samples > 0 {
        let mut table = Table::new(&["scheme", "parameter", "value", "haar_value"]);
        let h = haar_average(&obs, a.haar_samples, ctx.seed);
        table.push(vec![Cell::Text(name), param.into(), value.into(), h.into()]);
        ctx.emit(&table.to_csv())
    } else {
        let mut table = Table::new(&["scheme", "parameter", "value"]);
        table.push(vec![Cell::Text(name), param.into(), value.into()]);
        ctx.emit(&table.to_csv())
    }
}
