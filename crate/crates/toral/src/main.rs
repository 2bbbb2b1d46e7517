use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use toral::adams::{self, ChartFormat, ConnVal, VanishingError};
use toral::cells::NamedObject;
use toral::lattice::{is_cotoral, Representation, Subgroup};
use toral::ofmod::euler_component;
use toral::resolve::{self, Resolution};
use toral::selfcheck;

const SCHEMA: u32 = adams::SCHEMA;

#[derive(Parser)]
#[command(name = "toral", version, about = "Hom and Ext for sheaves over the subgroups of a torus")]
struct Cli {
    /// JSON file with defaults for rank, window, universe, output_dir and format.
    #[arg(long, global = true, env = "TORAL_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    rank: Option<usize>,
    /// Degree window `a:b`, or a single bound `w` meaning `-w:w`.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a subgroup given by annihilator generators such as `2,0;0,1`.
    Subgroup {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ann: String,
    },
    /// Euler class of a representation at a subgroup.
    Euler {
        #[command(flatten)]
        common: Common,
        /// Characters separated by `;`, e.g. `1,0;0,2`.
        #[arg(long)]
        rep: String,
        #[arg(long)]
        at: String,
    },
    /// Realize a named object and print its summands.
    Object {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: String,
    },
    /// Build a resolution and record its exactness checks.
    Resolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: Option<String>,
        #[arg(long, value_parser = ["injective", "koszul", "codim"], default_value = "injective")]
        kind: String,
        /// JSON list of annihilator strings.
        #[arg(long)]
        universe: Option<PathBuf>,
        /// Re-read a saved resolution instead of computing one.
        #[arg(long, conflicts_with = "object")]
        load: Option<PathBuf>,
    },
    /// The E2 chart of the Adams spectral sequence.
    Ext {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        format: Option<String>,
    },
    /// Algebraic connectivity of an object at the given subgroups.
    Conn {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        object: String,
        #[arg(long, required = true, num_args = 1..)]
        at: Vec<String>,
    },
    /// Degree-zero Hom between basic cells against cotorality.
    Homtable {
        #[command(flatten)]
        common: Common,
        /// JSON list of `[ann, ann]` pairs; defaults to all pairs of the rank-two list.
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Render a saved chart.
    Chart {
        file: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
    /// Run an invariant suite.
    Selfcheck {
        #[arg(long, default_value = "acceptance")]
        suite: String,
    },
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    rank: Option<usize>,
    window: Option<String>,
    universe: Option<Vec<String>>,
    output_dir: Option<PathBuf>,
    format: Option<String>,
}

/// Failures mapped to exit codes: computation errors exit 1, falsified invariants exit 2.
enum Failure {
    Error(String),
    Falsified(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    config: Config,
}

impl Ctx {
    fn rank(&self, c: &Common) -> Result<usize, Failure> {
        c.rank.or(self.config.rank).ok_or_else(|| Failure::Error("--rank is required".into()))
    }

    fn window(&self, c: &Common, default: i64) -> Result<(i64, i64), Failure> {
        match c.window.as_ref().or(self.config.window.as_ref()) {
            None => Ok((-default, default)),
            Some(w) => parse_window(w).map_err(Failure::Error),
        }
    }

    fn format(&self, given: Option<&String>, default: &str) -> Result<ChartFormat, Failure> {
        let f = given.or(self.config.format.as_ref()).map(String::as_str).unwrap_or(default);
        f.parse::<ChartFormat>().map_err(Failure::from)
    }

    /// Writes to `output_dir/name` when configured, otherwise to stdout.
    fn emit(&self, name: &str, body: &str) -> Outcome {
        match &self.config.output_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                eprintln!("wrote {}", path.display());
            }
            None => println!("{body}"),
        }
        Ok(())
    }
}

fn parse_window(w: &str) -> Result<(i64, i64), String> {
    let bad = |e: std::num::ParseIntError| format!("bad window {w:?}: {e}");
    match w.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
            if a > b {
                return Err(format!("window {w:?} is empty"));
            }
            Ok((a, b))
        }
        None => {
            let n: i64 = w.trim().parse().map_err(bad)?;
            Ok((-n.abs(), n.abs()))
        }
    }
}

fn subgroup(rank: usize, ann: &str) -> Result<Subgroup, Failure> {
    Subgroup::parse_ann(rank, ann).map_err(|e| Failure::Error(format!("subgroup {ann:?}: {e}")))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)?)
}

#[derive(Serialize, Deserialize)]
struct SavedResolution {
    schema: u32,
    resolution: Resolution,
}

fn universe(ctx: &Ctx, rank: usize, file: Option<&PathBuf>) -> Result<Vec<Subgroup>, Failure> {
    let anns: Vec<String> = match file {
        Some(p) => read_json(p)?,
        None => ctx.config.universe.clone().unwrap_or_default(),
    };
    anns.iter().map(|a| subgroup(rank, a)).collect()
}

fn resolve_cmd(ctx: &Ctx, common: &Common, object: Option<&String>, kind: &str, uni: Option<&PathBuf>, load: Option<&PathBuf>) -> Outcome {
    if let Some(path) = load {
        let raw: serde_json::Value = read_json(path)?;
        let found = raw.get("schema").and_then(serde_json::Value::as_u64);
        if found != Some(u64::from(SCHEMA)) {
            return Err(Failure::Error(format!("schema {found:?} in {}, expected {SCHEMA}", path.display())));
        }
        let saved: SavedResolution = serde_json::from_value(raw)?;
        let res = saved.resolution;
        let summary = json!({ "schema": SCHEMA, "length": res.length(), "multiplicities": res.multiplicities(), "exact": res.exact(), "certified": res.certified() });
        return ctx.emit("resolution-summary.json", &to_json(&summary)?);
    }
    let rank = ctx.rank(common)?;
    let expr = object.ok_or_else(|| Failure::Error("--object or --load is required".into()))?;
    let obj = NamedObject::parse(rank, expr)?;
    let (_, hi) = ctx.window(common, 6)?;
    let window = hi.abs();
    eprintln!("resolving {obj} ({kind})");
    let res = match kind {
        "koszul" | "codim" => {
            let k = obj.subgroup().ok_or_else(|| Failure::Error(format!("{obj} names no subgroup")))?.clone();
            if kind == "koszul" {
                resolve::koszul_resolution(&k, window)?
            } else {
                let realized = obj.realize()?;
                resolve::codim_resolution(&k, &universe(ctx, rank, uni)?, Some(&realized), window)?
            }
        }
        _ => resolve::injective_resolution(&obj.realize()?, window)?,
    };
    eprintln!("length {} multiplicities {:?} exact {}", res.length(), res.multiplicities(), res.exact());
    let exact = res.exact();
    ctx.emit("resolution.json", &to_json(&SavedResolution { schema: SCHEMA, resolution: res })?)?;
    if exact {
        Ok(())
    } else {
        Err(Failure::Falsified("a recorded exactness check failed".into()))
    }
}

fn ext_cmd(ctx: &Ctx, common: &Common, source: &str, target: &str, format: Option<&String>) -> Outcome {
    let rank = ctx.rank(common)?;
    let (src, tgt) = (NamedObject::parse(rank, source)?, NamedObject::parse(rank, target)?);
    let (lo, hi) = ctx.window(common, 6)?;
    let format = ctx.format(format, "ascii")?;
    eprintln!("computing E2({src}, {tgt}) for t in {lo}:{hi}");
    let chart = adams::ext_in(&src, &tgt, lo, hi)?;
    let ext = match format {
        ChartFormat::Ascii => "txt",
        ChartFormat::Json => "json",
        ChartFormat::Svg => "svg",
    };
    ctx.emit(&format!("chart.{ext}"), &adams::emit_chart(&chart, format))?;
    if src == tgt {
        if let Err(VanishingError::Falsified { s, t, dim }) = adams::vanishing_check(&chart) {
            return Err(Failure::Falsified(format!("E2^({s},{t}) = {dim} lies below the vanishing line")));
        }
    }
    Ok(())
}

fn homtable_cmd(ctx: &Ctx, common: &Common, pairs: Option<&PathBuf>) -> Outcome {
    let rank = common.rank.or(ctx.config.rank).unwrap_or(2);
    let pairs: Vec<(Subgroup, Subgroup)> = match pairs {
        Some(p) => {
            let raw: Vec<(String, String)> = read_json(p)?;
            raw.iter().map(|(a, b)| Ok((subgroup(rank, a)?, subgroup(rank, b)?))).collect::<Result<_, Failure>>()?
        }
        None if rank == 2 => {
            let list = selfcheck::rank_two_list();
            list.iter().flat_map(|k| list.iter().map(move |l| (k.clone(), l.clone()))).collect()
        }
        None => return Err(Failure::Error("--pairs is required outside rank 2".into())),
    };
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for (k, l) in &pairs {
        let cotoral = is_cotoral(k, l)?;
        let chart = adams::ext(&NamedObject::BasicCell { h: k.clone() }, &NamedObject::BasicCell { h: l.clone() }, 6)?;
        let hom = chart.get(0, 0);
        mismatches += usize::from(hom != usize::from(cotoral));
        rows.push(json!({ "source": k.to_string(), "target": l.to_string(), "cotoral": cotoral, "hom00": hom, "column0": chart.column_total(0), "exact": chart.exact }));
    }
    ctx.emit("homtable.json", &to_json(&json!({ "schema": SCHEMA, "rows": rows, "mismatches": mismatches }))?)?;
    if mismatches > 0 {
        Err(Failure::Falsified(format!("{mismatches} pairs disagree with cotorality at (0,0)")))
    } else {
        Ok(())
    }
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(p) => read_json(p)?,
        None => Config::default(),
    };
    let ctx = Ctx { config };
    match &cli.cmd {
        Command::Subgroup { common, ann } => {
            let rank = ctx.rank(common)?;
            let h = subgroup(rank, ann)?;
            let info = json!({
                "schema": SCHEMA,
                "subgroup": h.to_string(),
                "dim": h.dim(),
                "codim": h.codim(),
                "identity_component": h.identity_component().to_string(),
                "component_group": h.component_group().invariant_factors(),
                "subgroups_between": h.subgroups_between().iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            ctx.emit("subgroup.json", &to_json(&info)?)
        }
        Command::Euler { common, rep, at } => {
            let rank = ctx.rank(common)?;
            let v = Representation::parse(rank, rep).map_err(Failure::Error)?;
            let k = subgroup(rank, at)?;
            let e = euler_component(&v, &k);
            let info = json!({ "schema": SCHEMA, "rep": v.render(), "at": k.to_string(), "euler": e.render(), "degree": e.degree() });
            ctx.emit("euler.json", &to_json(&info)?)
        }
        Command::Object { common, object } => {
            let rank = ctx.rank(common)?;
            let obj = NamedObject::parse(rank, object)?;
            let m = obj.realize()?;
            ctx.emit("object.json", &to_json(&json!({ "schema": SCHEMA, "name": obj.to_string(), "object": m }))?)
        }
        Command::Resolve { common, object, kind, universe, load } => resolve_cmd(&ctx, common, object.as_ref(), kind, universe.as_ref(), load.as_ref()),
        Command::Ext { common, source, target, format } => ext_cmd(&ctx, common, source, target, format.as_ref()),
        Command::Conn { common, object, at } => {
            let rank = ctx.rank(common)?;
            let obj = NamedObject::parse(rank, object)?;
            let at = at.iter().map(|a| subgroup(rank, a)).collect::<Result<Vec<_>, _>>()?;
            let record = adams::connectivity_record(&obj, &at)?;
            let undetermined = record.values.iter().filter(|(_, v)| *v == ConnVal::Undetermined).count();
            if undetermined > 0 {
                eprintln!("{undetermined} values undetermined");
            }
            let values: Vec<_> = record.values.iter().map(|(h, v)| json!({ "at": h.to_string(), "algconn": v.to_string() })).collect();
            let body = json!({ "schema": SCHEMA, "object": record.object, "values": values, "slope_one": record.slope_one });
            ctx.emit("connectivity.json", &to_json(&body)?)
        }
        Command::Homtable { common, pairs } => homtable_cmd(&ctx, common, pairs.as_ref()),
        Command::Chart { file, format } => {
            let text = std::fs::read_to_string(file).map_err(|e| Failure::Error(format!("{}: {e}", file.display())))?;
            let chart = adams::load_chart(&text)?;
            let format = ctx.format(format.as_ref(), "ascii")?;
            ctx.emit("chart.out", &adams::emit_chart(&chart, format))
        }
        Command::Selfcheck { suite } => {
            let results = selfcheck::run_suite(suite)?;
            let mut falsified = false;
            let mut failed = false;
            for r in &results {
                println!("{r}");
                failed |= !r.passed;
                falsified |= r.falsification;
            }
            match (failed, falsified) {
                (_, true) => Err(Failure::Falsified("an invariant was falsified".into())),
                (true, false) => Err(Failure::Error("some criteria failed".into())),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Falsified(msg)) => {
            eprintln!("falsified: {msg}");
            ExitCode::from(2)
        }
    }
}
