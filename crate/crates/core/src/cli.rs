//! Command-line front end. Every command prints a single document to
//! stdout; failures map to the exit codes in [`ExitCode`].

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::diagrams::{path_sum, paths, render_dot, Diagram};
use crate::error::Error;
use crate::growth::{
    exponent_estimate, homogeneous_certificate, module_certificate, GrowthSeries,
};
use crate::qoperators::equal_on_window;
use crate::repsoq::{rep_table, verify_braid_independence, verify_frt, verify_orthogonality, RepSpec};
use crate::weylb::{
    classical_dimensions, longest_element, longest_quotient_element, normal_form, parabolic_decompose,
    ParabolicSubset, SignedPermutation, Word,
};

pub const SCHEMA: &str = "bqdim/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Usage = 2,
    Budget = 3,
    Certificate = 4,
}

#[derive(Debug, Parser)]
#[command(name = "bqdim", version, about = "Growth certificates for quantized function algebras of SO(2n+1)")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, global = true, default_value_t = 6)]
    pub cutoff: i32,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 8)]
    pub rmax: usize,
    #[arg(long = "probe-cutoff", global = true, default_value_t = 4)]
    pub probe_cutoff: i32,
    #[arg(long = "basis-cap", global = true, default_value_t = 20000)]
    pub basis_cap: usize,
    #[arg(long, global = true, env = "BQDIM_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Parse(format!("q must lie in (0,1), got {}", self.q)));
        }
        if self.tol <= 0.0 || self.cutoff < 0 || self.probe_cutoff < 0 || self.basis_cap == 0 {
            return Err(Error::Parse("tolerances and caps must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Parse("threads must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl group computations.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Representation tables and their checks.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Diagram rendering and path enumeration.
    #[command(subcommand)]
    Diagram(DiagramCmd),
    /// Growth series and certificates.
    #[command(subcommand)]
    Gkdim(GkdimCmd),
}

#[derive(Debug, Clone, Args)]
pub struct WordArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated 1-based generator indices.
    #[arg(long, default_value = "")]
    pub word: String,
}

#[derive(Debug, Subcommand)]
pub enum WeylCmd {
    NormalForm(WordArgs),
    Decompose {
        #[command(flatten)]
        w: WordArgs,
        /// Parabolic family `R_m`.
        #[arg(long, conflicts_with = "k")]
        m: Option<usize>,
        /// Parabolic chain `R_k = {n-k+1..n}`.
        #[arg(long)]
        k: Option<usize>,
    },
    Longest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    Dims {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    Verify {
        #[command(flatten)]
        w: WordArgs,
        #[arg(long)]
        word2: Option<String>,
        /// Torus point as `re,im;re,im;...`.
        #[arg(long)]
        torus: Option<String>,
        #[arg(long)]
        frt: bool,
    },
    Entry {
        #[command(flatten)]
        w: WordArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        torus: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DiagramCmd {
    Dot(WordArgs),
    Paths {
        #[command(flatten)]
        w: WordArgs,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum GkdimCmd {
    Module {
        #[command(flatten)]
        w: WordArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    Homogeneous {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Largest length for the fingerprint rank of witness words.
        #[arg(long, default_value_t = 3)]
        witness_r: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Rendered output and exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: ExitCode,
}

fn doc(mut v: Value) -> String {
    if let Value::Object(ref mut m) = v {
        m.insert("schema".into(), json!(SCHEMA));
    }
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn element(a: &WordArgs) -> Result<(Word, SignedPermutation), Error> {
    if a.n == 0 {
        return Err(Error::ZeroRank);
    }
    let w = Word::parse(&a.word)?;
    let p = SignedPermutation::from_word(a.n, &w)?;
    Ok((w, p))
}

pub fn parse_torus(s: Option<&str>, n: usize) -> Result<Vec<Complex64>, Error> {
    let Some(s) = s else {
        return Ok(vec![Complex64::new(1.0, 0.0); n]);
    };
    let t: Vec<Complex64> = s
        .split(';')
        .map(|p| {
            let xs: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad torus entry {p:?}"))))
                .collect::<Result<_, _>>()?;
            match xs[..] {
                [re, im] => Ok(Complex64::new(re, im)),
                _ => Err(Error::Parse(format!("torus entry {p:?} is not re,im"))),
            }
        })
        .collect::<Result<_, _>>()?;
    if t.len() != n {
        return Err(Error::Parse(format!("torus has {} entries, expected {n}", t.len())));
    }
    for (i, c) in t.iter().enumerate() {
        if (c.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitTorus {
                index: i + 1,
                modulus: c.norm(),
            });
        }
    }
    Ok(t)
}

fn psi_json(p: &SignedPermutation) -> Value {
    let nf = normal_form(p);
    let psi: Vec<Value> = nf
        .psi
        .iter()
        .rev()
        .map(|f| {
            if f.eps == 0 {
                json!({"r": f.r, "eps": 0, "k": null})
            } else {
                json!({"r": f.r, "eps": f.eps, "k": f.k})
            }
        })
        .collect();
    let parts: Vec<String> = nf.parts().iter().map(|w| w.to_string()).collect();
    json!({"psi": psi, "parts": parts, "word": nf.word().to_string()})
}

fn weyl(cmd: &WeylCmd) -> Result<Outcome, Error> {
    let v = match cmd {
        WeylCmd::NormalForm(a) => {
            let (w, p) = element(a)?;
            json!({
                "command": "weyl normal-form",
                "input": w.to_string(),
                "element": p.to_string(),
                "length": p.length(),
                "normal_form": psi_json(&p),
            })
        }
        WeylCmd::Decompose { w: a, m, k } => {
            let (w, p) = element(a)?;
            let r = match (m, k) {
                (_, Some(k)) => ParabolicSubset::r_k(a.n, *k),
                (Some(m), None) => ParabolicSubset::r_m(a.n, *m)?,
                (None, None) => return Err(Error::Parse("decompose needs --m or --k".into())),
            };
            let (sub, quot) = parabolic_decompose(&p, &r);
            json!({
                "command": "weyl decompose",
                "input": w.to_string(),
                "subset": r.indices,
                "length": p.length(),
                "subgroup": {"element": sub.to_string(), "length": sub.length(), "word": normal_form(&sub).word().to_string()},
                "quotient": {"element": quot.to_string(), "length": quot.length(), "word": normal_form(&quot).word().to_string()},
            })
        }
        WeylCmd::Longest { n, m } => {
            if *n == 0 {
                return Err(Error::ZeroRank);
            }
            let p = match m {
                Some(m) => longest_quotient_element(*n, &ParabolicSubset::r_m(*n, *m)?),
                None => longest_element(*n),
            };
            json!({
                "command": "weyl longest",
                "n": n,
                "m": m,
                "element": p.to_string(),
                "length": p.length(),
                "normal_form": psi_json(&p),
            })
        }
        WeylCmd::Dims { n, m } => {
            let d = classical_dimensions(*n, *m)?;
            json!({"command": "weyl dims", "n": n, "m": m, "dimensions": d})
        }
    };
    Ok(Outcome {
        stdout: doc(v),
        code: ExitCode::Ok,
    })
}

fn rep(cmd: &RepCmd, cfg: &RunConfig) -> Result<Outcome, Error> {
    let v = match cmd {
        RepCmd::Verify { w: a, word2, torus, frt } => {
            let (w, _) = element(a)?;
            let t = parse_torus(torus.as_deref(), a.n)?;
            let table = rep_table(&RepSpec {
                n: a.n,
                t: t.clone(),
                word: w.clone(),
            })?;
            let orth = verify_orthogonality(&table, cfg.cutoff, cfg.q, cfg.tol)?;
            let braid = match word2 {
                Some(w2) => {
                    let w2 = Word::parse(w2)?;
                    Some(verify_braid_independence(&w, &w2, &t, a.n, cfg.cutoff, cfg.q, cfg.tol)?)
                }
                None => None,
            };
            let frt = if *frt {
                Some(verify_frt(&table, cfg.cutoff, cfg.q, cfg.tol)?)
            } else {
                None
            };
            json!({
                "command": "rep verify",
                "n": a.n,
                "word": w.to_string(),
                "cutoff": cfg.cutoff,
                "q": cfg.q,
                "orthogonality": orth,
                "braid": braid,
                "frt": frt,
            })
        }
        RepCmd::Entry { w: a, k, l, torus } => {
            let (w, _) = element(a)?;
            let d = 2 * a.n + 1;
            for node in [*k, *l] {
                if node == 0 || node > d {
                    return Err(Error::NodeOutOfRange { node, max: d });
                }
            }
            let t = parse_torus(torus.as_deref(), a.n)?;
            let table = rep_table(&RepSpec {
                n: a.n,
                t,
                word: w.clone(),
            })?;
            let op = table.get(*k, *l);
            json!({
                "command": "rep entry",
                "n": a.n,
                "word": w.to_string(),
                "k": k,
                "l": l,
                "operator": op.to_string(),
                "summands": op.summands.len(),
            })
        }
    };
    Ok(Outcome {
        stdout: doc(v),
        code: ExitCode::Ok,
    })
}

fn diagram(cmd: &DiagramCmd, cfg: &RunConfig) -> Result<Outcome, Error> {
    match cmd {
        DiagramCmd::Dot(a) => {
            let (w, _) = element(a)?;
            Ok(Outcome {
                stdout: render_dot(&Diagram::for_word(a.n, &w)?),
                code: ExitCode::Ok,
            })
        }
        DiagramCmd::Paths { w: a, from, to } => {
            let (w, _) = element(a)?;
            let d = Diagram::for_word(a.n, &w)?;
            let ps = paths(&d, *from, *to)?;
            let listed: Vec<Value> = ps
                .iter()
                .map(|p| {
                    let nodes: Vec<usize> = std::iter::once(*from).chain(p.iter().map(|e| e.right)).collect();
                    let edges: Vec<&str> = p.iter().map(|e| e.prim.tag()).collect();
                    json!({"nodes": nodes, "edges": edges})
                })
                .collect();
            let sum = path_sum(&d, *from, *to)?;
            let table = rep_table(&RepSpec::new(a.n, w.clone()))?;
            let agrees = equal_on_window(&sum, table.get(*from, *to), cfg.cutoff, cfg.q, cfg.tol)?;
            Ok(Outcome {
                stdout: doc(json!({
                    "command": "diagram paths",
                    "n": a.n,
                    "word": w.to_string(),
                    "from": from,
                    "to": to,
                    "count": ps.len(),
                    "paths": listed,
                    "path_sum": sum.to_string(),
                    "matches_rep_table": agrees,
                })),
                code: ExitCode::Ok,
            })
        }
    }
}

fn series_csv(rows: &[(usize, usize, String, String)]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["r", "d", "lower", "upper"]).expect("in-memory write");
    for (r, d, lo, up) in rows {
        w.write_record([r.to_string(), d.to_string(), lo.clone(), up.clone()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn estimate_json(s: &GrowthSeries) -> Value {
    match exponent_estimate(s) {
        Ok(e) => json!(e),
        Err(e) => json!({"error": e.to_string()}),
    }
}

fn gkdim(cmd: &GkdimCmd, cfg: &RunConfig) -> Result<Outcome, Error> {
    match cmd {
        GkdimCmd::Module { w: a, format } => {
            let (w, _) = element(a)?;
            let spec = RepSpec::new(a.n, w.clone());
            let cert = module_certificate(&spec, cfg.rmax, cfg.q, cfg.tol, cfg.basis_cap)?;
            let code = if cert.truncated {
                ExitCode::Budget
            } else if !cert.pass {
                ExitCode::Certificate
            } else {
                ExitCode::Ok
            };
            let stdout = match format {
                Format::Csv => series_csv(
                    &cert
                        .rows
                        .iter()
                        .map(|r| (r.r, r.d, r.lower.to_string(), r.upper.to_string()))
                        .collect::<Vec<_>>(),
                ),
                Format::Json => {
                    doc(json!({
                        "command": "gkdim module",
                        "n": a.n,
                        "word": w.to_string(),
                        "rmax": cfg.rmax,
                        "q": cfg.q,
                        "certificate": cert,
                    }))
                }
            };
            Ok(Outcome { stdout, code })
        }
        GkdimCmd::Homogeneous { n, m, witness_r, format } => {
            let cert = homogeneous_certificate(
                *n,
                *m,
                cfg.rmax,
                *witness_r,
                cfg.probe_cutoff,
                cfg.q,
                cfg.tol,
                cfg.basis_cap,
            )?;
            let code = if cert.growth.series.truncated {
                ExitCode::Budget
            } else if !cert.pass {
                ExitCode::Certificate
            } else {
                ExitCode::Ok
            };
            let stdout = match format {
                Format::Csv => series_csv(
                    &cert
                        .rows
                        .iter()
                        .filter_map(|r| r.d.map(|d| (r.r, d, r.lower.to_string(), r.upper.to_string())))
                        .collect::<Vec<_>>(),
                ),
                Format::Json => doc(json!({
                    "command": "gkdim homogeneous",
                    "n": n,
                    "m": m,
                    "rmax": cfg.rmax,
                    "q": cfg.q,
                    "estimate": estimate_json(&cert.growth.series),
                    "certificate": cert,
                })),
            };
            Ok(Outcome { stdout, code })
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Error> {
    cli.config.validate()?;
    match &cli.command {
        Command::Weyl(c) => weyl(c),
        Command::Rep(c) => rep(c, &cli.config),
        Command::Diagram(c) => diagram(c, &cli.config),
        Command::Gkdim(c) => gkdim(c, &cli.config),
    }
}

/// Runs a parsed command on a pool of the requested size.
pub fn run(cli: &Cli) -> (Outcome, Option<Error>) {
    let result = match cli.config.threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(Error::Parse(e.to_string())),
        },
        _ => dispatch(cli),
    };
    match result {
        Ok(o) => (o, None),
        Err(e) => {
            let code = match e {
                Error::Budget { .. } => ExitCode::Budget,
                Error::Witness(_) => ExitCode::Certificate,
                _ => ExitCode::Usage,
            };
            (
                Outcome {
                    stdout: String::new(),
                    code,
                },
                Some(e),
            )
        }
    }
}
