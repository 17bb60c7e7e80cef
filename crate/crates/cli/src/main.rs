use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use mukai_cli::job::{parse_batch, CliError, Command, EXIT_INPUT};
use mukai_cli::render::{render_csv, render_table, ColorMode};
use mukai_cli::run::{envelope, run_value};

#[derive(Parser)]
#[command(
    name = "mukai",
    version,
    about = "Mukai lattices, Fourier-Mukai isometries and moduli spaces on abelian and K3 surfaces"
)]
struct Cli {
    /// Output format; tables and CSV need results of one kind.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args, Default)]
struct SurfaceArgs {
    /// Job file; inline flags are ignored when given.
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long, default_value = "k3")]
    kind: String,
    /// Rows separated by `;`, entries by `,`, e.g. "-2,-1;-1,2".
    #[arg(long, allow_hyphen_values = true)]
    gram: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ample: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mukai pairing of two vectors.
    Pair {
        #[command(flatten)]
        s: SurfaceArgs,
        /// Flat list r,c1...,a.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Orthogonal complement of a vector.
    Perp {
        #[command(flatten)]
        s: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Apply a Fourier-Mukai isometry.
    Fm {
        #[command(flatten)]
        s: SurfaceArgs,
        #[arg(long)]
        map: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Isotropic parameters r0,d0,k with an optional Bézout pair d1,l.
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<String>,
    },
    /// Walls for a destabilising class.
    Walls {
        #[command(flatten)]
        s: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        c1e: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        chie: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        l0: Option<String>,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        #[arg(long, allow_hyphen_values = true)]
        polarisation: Option<String>,
    },
    /// Which isomorphism results apply to a vector.
    Classify {
        #[command(flatten)]
        s: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        isotropic: Option<String>,
        #[arg(long)]
        assume_star: bool,
        #[arg(long)]
        assume_general: bool,
    },
    /// Beauville lattice and reduction data for generalised Kummers.
    Kummer {
        #[command(flatten)]
        s: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Group vectors by deformation class.
    Deform {
        #[command(flatten)]
        s: SurfaceArgs,
        /// Repeat for each vector.
        #[arg(long, allow_hyphen_values = true)]
        v: Vec<String>,
    },
    /// Check the quasi-section identity.
    AlbaneseCheck {
        #[arg(long)]
        job: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<String>,
    },
    /// Check the Fujiki relation on a generalised Kummer.
    Fujiki {
        #[arg(long)]
        job: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        l2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lx: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<String>,
        /// One of top, one-x, two-x, two-e, mixed.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Tabulate saved results (envelopes or lists of envelopes).
    Report {
        files: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Run a batch of jobs in parallel; output keeps input order.
    Run {
        #[arg(long)]
        job: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input("io", format!("cannot read {}: {e}", path.display()), None))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::input("malformed-json", format!("{}: {e}", path.display()), None))
}

fn ints(flag: &str, text: &str) -> Result<Value, CliError> {
    let parts: Vec<Value> = text.split(',').map(|x| Value::String(x.trim().to_string())).collect();
    if parts.iter().any(|p| p.as_str() == Some("")) {
        return Err(CliError::input("bad-flag", format!("--{flag}: empty entry in {text:?}"), None));
    }
    Ok(Value::Array(parts))
}

fn scalar(text: &str) -> Value {
    Value::String(text.trim().to_string())
}

struct Inputs(Map<String, Value>);

impl Inputs {
    fn new() -> Self {
        Inputs(Map::new())
    }
    fn list(mut self, key: &str, v: &Option<String>) -> Result<Self, CliError> {
        if let Some(t) = v {
            self.0.insert(key.into(), ints(key, t)?);
        }
        Ok(self)
    }
    fn scalar(mut self, key: &str, v: &Option<String>) -> Self {
        if let Some(t) = v {
            self.0.insert(key.into(), scalar(t));
        }
        self
    }
    fn flag(mut self, key: &str, on: bool) -> Self {
        if on {
            self.0.insert(key.into(), Value::Bool(true));
        }
        self
    }
    fn done(self) -> Value {
        Value::Object(self.0)
    }
}

/// `r0,d0,k` or `r0,d0,k,d1,l`.
fn iso_params(flag: &str, text: &str) -> Result<Value, CliError> {
    let xs = ints(flag, text)?;
    let xs = xs.as_array().expect("a list");
    match xs.len() {
        3 => Ok(json!({ "r0": xs[0], "d0": xs[1], "k": xs[2] })),
        5 => Ok(json!({ "r0": xs[0], "d0": xs[1], "k": xs[2], "d1": xs[3], "l": xs[4] })),
        _ => Err(CliError::input("bad-flag", format!("--{flag} takes r0,d0,k or r0,d0,k,d1,l"), None)),
    }
}

fn surface(s: &SurfaceArgs) -> Result<Option<Value>, CliError> {
    let Some(gram) = &s.gram else { return Ok(None) };
    let rows = gram.split(';').map(|r| ints("gram", r)).collect::<Result<Vec<_>, _>>()?;
    let mut out = json!({ "kind": s.kind, "gram": rows });
    if let Some(a) = &s.ample {
        out["ample"] = ints("ample", a)?;
    }
    Ok(Some(out))
}

fn job_value(command: Command, s: Option<&SurfaceArgs>, inputs: Value) -> Result<Value, CliError> {
    let mut job = json!({ "command": command.as_str(), "inputs": inputs });
    if let Some(sf) = s.map(surface).transpose()?.flatten() {
        job["surface"] = sf;
    }
    Ok(job)
}

/// A job file given to a subcommand must name that subcommand.
fn from_file(command: Command, path: &Path) -> Result<Value, CliError> {
    let job = read_json(path)?;
    match job.get("command").and_then(Value::as_str) {
        Some(c) if c != command.as_str() => Err(CliError::input(
            "command-mismatch",
            format!("{} holds a `{c}` job, not `{}`", path.display(), command.as_str()),
            Some("command".into()),
        )),
        _ => Ok(job),
    }
}

fn single(
    command: Command,
    s: Option<&SurfaceArgs>,
    job: &Option<PathBuf>,
    inputs: impl FnOnce() -> Result<Value, CliError>,
) -> Result<Value, CliError> {
    match job.as_ref().or(s.and_then(|s| s.job.as_ref())) {
        Some(p) => from_file(command, p),
        None => job_value(command, s, inputs()?),
    }
}

fn build(cmd: &Cmd) -> Result<Value, CliError> {
    let none = None;
    match cmd {
        Cmd::Pair { s, v, w } => {
            single(Command::Pair, Some(s), &none, || Ok(Inputs::new().list("v", v)?.list("w", w)?.done()))
        }
        Cmd::Perp { s, v } => single(Command::Perp, Some(s), &none, || Ok(Inputs::new().list("v", v)?.done())),
        Cmd::Kummer { s, v } => single(Command::Kummer, Some(s), &none, || Ok(Inputs::new().list("v", v)?.done())),
        Cmd::Fm { s, map, v, params, twist } => single(Command::Fm, Some(s), &none, || {
            let mut i = Inputs::new().scalar("map", map).list("v", v)?.list("twist", twist)?;
            if let Some(p) = params {
                i.0.insert("params".into(), iso_params("params", p)?);
            }
            Ok(i.done())
        }),
        Cmd::Walls { s, c1e, chie, l0, oracle, polarisation } => single(Command::Walls, Some(s), &none, || {
            Ok(Inputs::new()
                .list("c1e", c1e)?
                .scalar("chie", chie)
                .list("l0", l0)?
                .flag("oracle", *oracle)
                .list("polarisation", polarisation)?
                .done())
        }),
        Cmd::Classify { s, v, isotropic, assume_star, assume_general } => {
            single(Command::Classify, Some(s), &none, || {
                let mut ctx = Map::new();
                if let Some(p) = isotropic {
                    ctx.insert("isotropic".into(), iso_params("isotropic", p)?);
                }
                ctx.insert("assume_star".into(), Value::Bool(*assume_star));
                ctx.insert("assume_general".into(), Value::Bool(*assume_general));
                let mut i = Inputs::new().list("v", v)?;
                i.0.insert("context".into(), Value::Object(ctx));
                Ok(i.done())
            })
        }
        Cmd::Deform { s, v } => single(Command::Deform, Some(s), &none, || {
            let vs = v.iter().map(|t| ints("v", t)).collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "vectors": vs }))
        }),
        Cmd::AlbaneseCheck { job, r, a, chi } => single(Command::AlbaneseCheck, None, job, || {
            Ok(Inputs::new().scalar("r", r).scalar("a", a).scalar("chi", chi).done())
        }),
        Cmd::Fujiki { job, n, l2, lx, x2, shape } => single(Command::Fujiki, None, job, || {
            let mut i = Inputs::new().scalar("l2", l2).scalar("lx", lx).scalar("x2", x2).scalar("shape", shape);
            if let Some(n) = n {
                i.0.insert("n".into(), json!(n));
            }
            Ok(i.done())
        }),
        Cmd::Report { .. } | Cmd::Run { .. } => unreachable!("handled separately"),
    }
}

/// Writes to stdout, treating a closed pipe as a normal end of output.
fn out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn print_json(v: &Value) {
    out(&(serde_json::to_string_pretty(v).expect("JSON values serialise") + "\n"));
}

/// Prints envelopes in the chosen format; errors always come out as JSON.
fn emit(format: Format, envelopes: &[Value], as_list: bool) -> u8 {
    if format == Format::Json || envelopes.iter().any(|e| e["ok"] != Value::Bool(true)) {
        if as_list {
            print_json(&Value::Array(envelopes.to_vec()));
        } else {
            print_json(&envelopes[0]);
        }
        return 0;
    }
    let rendered = match ColorMode::from_env() {
        Err(e) => Err(e),
        Ok(mode) if format == Format::Table => render_table(envelopes, mode.enabled()),
        Ok(_) => render_csv(envelopes),
    };
    match rendered {
        Ok(text) => {
            out(&text);
            0
        }
        Err(e) => {
            let (env, code) = envelope(None, Err(e));
            print_json(&env);
            code
        }
    }
}

fn report(files: &[PathBuf], csv: bool, format: Format) -> (Value, u8) {
    let gathered: Result<Vec<Value>, CliError> = files.iter().try_fold(Vec::new(), |mut acc, f| {
        match read_json(f)? {
            Value::Array(xs) => acc.extend(xs),
            one => acc.push(one),
        }
        Ok(acc)
    });
    let outcome = gathered.and_then(|results| {
        if files.is_empty() {
            return Err(CliError::input("empty-report", "give at least one result file", None));
        }
        if format == Format::Json {
            let fmt = if csv { "csv" } else { "table" };
            return Ok(json!({ "format": fmt, "text": if csv { render_csv(&results)? } else { render_table(&results, false)? } }));
        }
        let text = if csv || format == Format::Csv {
            render_csv(&results)?
        } else {
            render_table(&results, ColorMode::from_env()?.enabled())?
        };
        Ok(Value::String(text))
    });
    envelope(Some(Command::Report), outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Report { files, csv } => {
            let (env, code) = report(files, *csv, cli.format);
            match (&env["result"], cli.format) {
                (Value::String(text), f) if f != Format::Json => out(text),
                _ => print_json(&env),
            }
            code
        }
        Cmd::Run { job } => {
            let batch = read(job).and_then(|t| parse_batch(&t));
            match batch {
                Err(e) => {
                    let (env, code) = envelope(None, Err(e));
                    print_json(&env);
                    code
                }
                Ok(jobs) => {
                    let results: Vec<(Value, u8)> = jobs.into_par_iter().map(run_value).collect();
                    let worst = results.iter().map(|r| r.1).max().unwrap_or(0);
                    let envs: Vec<Value> = results.into_iter().map(|r| r.0).collect();
                    worst.max(emit(cli.format, &envs, true))
                }
            }
        }
        other => {
            let (env, code) = match build(other) {
                Ok(job) => run_value(job),
                Err(e) => envelope(None, Err(e)),
            };
            code.max(emit(cli.format, &[env], false))
        }
    };
    if code >= EXIT_INPUT {
        eprintln!("mukai: finished with exit code {code}");
    }
    ExitCode::from(code)
}
