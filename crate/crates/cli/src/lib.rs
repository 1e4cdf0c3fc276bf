//! Surface syntax and command dispatch for the `lft` tool.

pub mod parse;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use lftransport::formula::{check_formula, Formula, WfEnv};
use lftransport::lf::{check_signature, Ident, Signature};
use lftransport::oracle::{
    bounded_validity, ill_formed_contexts, sample_permutations, verify_atoms, verify_ill_formed, verify_minimization,
    verify_transport, verify_variants, AtomBounds, Bounds, MinBounds, Report, Verdict,
};
use lftransport::schema::{check_schema, schema_instance, ContextSchema, MatchOptions};
use lftransport::subordination::{compute_subordination, SubordRel};
use lftransport::subsumption::{schema_subsumes, transport_check, SearchConfig, TransportCertificate, TransportFailure};

pub use parse::ParseError;

/// Anything that stops a command from reaching a verdict. Always exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Input(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// A checked signature with its subordination relation, the schemas defined
/// against it and any formulas loaded so far.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub sig: Signature,
    pub rel: SubordRel,
    pub schemas: BTreeMap<String, Arc<ContextSchema>>,
    pub formulas: BTreeMap<String, Formula>,
}

impl Workspace {
    pub fn from_signature(sig: Signature) -> Result<Self, CliError> {
        check_signature(&sig).map_err(|e| CliError::Input(format!("signature: {}", e)))?;
        let rel = compute_subordination(&sig);
        Ok(Workspace { sig, rel, schemas: BTreeMap::new(), formulas: BTreeMap::new() })
    }

    pub fn load(sig_path: &Path, schema_path: Option<&Path>) -> Result<Self, CliError> {
        let text = read(sig_path)?;
        let sig = parse::parse_signature(&text).map_err(|source| CliError::Parse { path: sig_path.into(), source })?;
        let mut ws = Workspace::from_signature(sig)?;
        if let Some(p) = schema_path {
            let text = read(p)?;
            ws.add_schemas(&text).map_err(|e| match e {
                CliError::Parse { source, .. } => CliError::Parse { path: p.into(), source },
                other => other,
            })?;
        }
        Ok(ws)
    }

    /// Parse and check schema definitions; later definitions of a name
    /// replace earlier ones.
    pub fn add_schemas(&mut self, text: &str) -> Result<Vec<Arc<ContextSchema>>, CliError> {
        let parsed = parse::parse_schemas(text, &self.sig)
            .map_err(|source| CliError::Parse { path: PathBuf::from("<schemas>"), source })?;
        let mut out = Vec::new();
        for c in parsed {
            check_schema(&self.sig, &c).map_err(|e| CliError::Input(format!("schema {}: {}", c.name, e)))?;
            let c = Arc::new(c);
            self.schemas.insert(c.name.to_string(), c.clone());
            out.push(c);
        }
        Ok(out)
    }

    pub fn schema(&self, name: &str) -> Result<Arc<ContextSchema>, CliError> {
        self.schemas.get(name).cloned().ok_or_else(|| CliError::Input(format!("no schema named `{}`", name)))
    }

    /// Parse a formula and check it is closed and well-formed.
    pub fn add_formula(&mut self, name: &str, text: &str) -> Result<Formula, CliError> {
        let f = parse::parse_formula(text, &self.sig, &self.schemas)
            .map_err(|source| CliError::Parse { path: PathBuf::from(name), source })?;
        check_formula(&self.sig, &f, &WfEnv::new()).map_err(|e| CliError::Input(format!("{}: {}", name, e)))?;
        self.formulas.insert(name.to_string(), f.clone());
        Ok(f)
    }

    /// The body of a formula about `gamma`, checked with `gamma` ranging
    /// over `schema`. A leading `ctx gamma:_.` binder in the text is
    /// dropped, whatever schema it names.
    pub fn formula_about(
        &mut self,
        name: &str,
        text: &str,
        gamma: &Ident,
        schema: &Arc<ContextSchema>,
    ) -> Result<Formula, CliError> {
        let f = parse::parse_formula(text, &self.sig, &self.schemas)
            .map_err(|source| CliError::Parse { path: PathBuf::from(name), source })?;
        let body = match f {
            Formula::CtxPi(g, _, body) if &g == gamma => *body,
            other => other,
        };
        let env = WfEnv::new().with_ctx(gamma.as_str(), schema.clone());
        check_formula(&self.sig, &body, &env).map_err(|e| CliError::Input(format!("{}: {}", name, e)))?;
        self.formulas.insert(name.to_string(), body.clone());
        Ok(body)
    }
}

#[derive(Debug, Parser)]
#[command(name = "lft", version, about = "Check LF signatures, context schemas and schema transport")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    pub sig: PathBuf,
    pub schemas: PathBuf,
    /// Schema the formula is stated for.
    #[arg(long)]
    pub from: String,
    /// Schema to move the formula to.
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub formula: PathBuf,
    /// Context variable the formula quantifies over.
    #[arg(long, default_value = "G")]
    pub var: String,
    /// Give up after trying this many alignments for one block.
    #[arg(long, default_value_t = SearchConfig::default().max_alignments)]
    pub max_alignments: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a signature is well-formed.
    Check { sig: PathBuf },
    /// Print the subordination relation, one `a <= b` pair per line.
    Subord { sig: PathBuf },
    /// Drop the bindings of a context that cannot matter to a type.
    Minimize {
        sig: PathBuf,
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long = "type")]
        ty: String,
    },
    /// Check every schema in a file.
    SchemaCheck { sig: PathBuf, schemas: PathBuf },
    /// Decide whether a closed context is an instance of a schema.
    Instance {
        sig: PathBuf,
        schemas: PathBuf,
        #[arg(long)]
        schema: String,
        #[arg(long)]
        ctx: PathBuf,
    },
    /// Decide schema subsumption relative to a formula.
    Subsumes(TransportArgs),
    /// Check both side conditions of transport and print the certificate.
    Transport(TransportArgs),
    /// Bounded validity of a closed formula.
    Validate {
        sig: PathBuf,
        #[arg(long)]
        schemas: Option<PathBuf>,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 2)]
        term_size: usize,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        /// Fresh nominals added to each quantifier's range.
        #[arg(long, default_value_t = 0)]
        fresh_nominals: usize,
    },
    /// Run the bounded checks of minimization, transport, atom preservation,
    /// ill-formed instances and variants.
    Oracle {
        #[command(flatten)]
        t: TransportArgs,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[arg(long, default_value_t = 2)]
        term_size: usize,
        /// Longest context enumerated for the context-level checks.
        #[arg(long, default_value_t = 3)]
        ctx_max: usize,
        #[arg(long, default_value_t = 50)]
        perms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit codes: 0 when the checked property holds, 1 when it does not, 2
/// when the input could not be read, parsed or checked.
pub const HOLDS: i32 = 0;
pub const FAILS: i32 = 1;
pub const ERROR: i32 = 2;

/// Run one command line, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ERROR } else { HOLDS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(holds) => {
            if holds {
                HOLDS
            } else {
                FAILS
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            ERROR
        }
    }
}

fn emit(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), CliError> {
    let text = text.to_string();
    let nl = if text.ends_with('\n') { "" } else { "\n" };
    write!(out, "{}{}", text, nl).map_err(|e| CliError::Input(format!("cannot write output: {}", e)))
}

struct Loaded {
    ws: Workspace,
    source: Arc<ContextSchema>,
    target: Arc<ContextSchema>,
    gamma: Ident,
    f: Formula,
}

fn load_transport(t: &TransportArgs) -> Result<Loaded, CliError> {
    let mut ws = Workspace::load(&t.sig, Some(&t.schemas))?;
    let source = ws.schema(&t.from)?;
    let target = ws.schema(&t.to)?;
    let gamma = Ident::new(&t.var);
    let text = read(&t.formula)?;
    let name = t.formula.display().to_string();
    let f = ws.formula_about(&name, &text, &gamma, &source)?;
    Ok(Loaded { ws, source, target, gamma, f })
}

fn certificate(l: &Loaded, cfg: SearchConfig, out: &mut dyn Write) -> Result<Option<TransportCertificate>, CliError> {
    match transport_check(&l.ws.sig, &l.ws.rel, &l.source, &l.target, &l.gamma, &l.f, cfg) {
        Ok(c) => Ok(Some(c)),
        Err(TransportFailure::IllFormedInput(e)) => Err(CliError::Input(e)),
        Err(e) => {
            emit(out, format!("transport fails: {}", e))?;
            Ok(None)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match cmd {
        Command::Check { sig } => {
            let text = read(&sig)?;
            let parsed = parse::parse_signature(&text).map_err(|source| CliError::Parse { path: sig, source })?;
            match check_signature(&parsed) {
                Ok(()) => {
                    emit(out, format!("ok: {} declarations", parsed.len()))?;
                    Ok(true)
                }
                Err(e) => {
                    emit(out, format!("ill-formed: {}", e))?;
                    Ok(false)
                }
            }
        }
        Command::Subord { sig } => {
            let ws = Workspace::load(&sig, None)?;
            let mut pairs: Vec<(&Ident, &Ident)> = ws.rel.pairs().collect();
            pairs.sort();
            for (a, b) in pairs {
                emit(out, format!("{} <= {}", a, b))?;
            }
            Ok(true)
        }
        Command::Minimize { sig, ctx, ty } => {
            let ws = Workspace::load(&sig, None)?;
            let text = read(&ctx)?;
            let g = parse::parse_ctx(&text, &ws.sig).map_err(|source| CliError::Parse { path: ctx, source })?;
            let a = parse::parse_type(&ty, &ws.sig)
                .map_err(|source| CliError::Parse { path: PathBuf::from("--type"), source })?;
            let min = ws.rel.minimize(&g.to_lf(), &a).map_err(|e| CliError::Input(e.to_string()))?;
            emit(out, min)?;
            Ok(true)
        }
        Command::SchemaCheck { sig, schemas } => {
            let ws = Workspace::load(&sig, None)?;
            let text = read(&schemas)?;
            let parsed =
                parse::parse_schemas(&text, &ws.sig).map_err(|source| CliError::Parse { path: schemas, source })?;
            let mut all = true;
            for c in &parsed {
                match check_schema(&ws.sig, c) {
                    Ok(()) => emit(out, format!("{}: ok", c.name))?,
                    Err(e) => {
                        all = false;
                        emit(out, format!("{}: {}", c.name, e))?;
                    }
                }
            }
            Ok(all)
        }
        Command::Instance { sig, schemas, schema, ctx } => {
            let ws = Workspace::load(&sig, Some(&schemas))?;
            let c = ws.schema(&schema)?;
            let text = read(&ctx)?;
            let g = parse::parse_ctx(&text, &ws.sig).map_err(|source| CliError::Parse { path: ctx, source })?;
            let seg = schema_instance(&ws.sig, &c, &g, MatchOptions::default())
                .map_err(|e| CliError::Input(e.to_string()))?;
            match seg {
                Some(segs) => {
                    emit(out, format!("instance of {}", c.name))?;
                    for s in segs {
                        let names: Vec<String> =
                            s.matched.decl_map.iter().map(|(x, n)| format!("{}:={}", x, n)).collect();
                        let params: Vec<String> =
                            s.matched.params.iter().map(|(x, e)| format!("{}:={}", x, e.term)).collect();
                        emit(
                            out,
                            format!(
                                "  block {} at {}: {} [{}]",
                                s.block + 1,
                                s.start + 1,
                                names.join(", "),
                                params.join(", ")
                            ),
                        )?;
                    }
                    Ok(true)
                }
                None => {
                    emit(out, format!("not an instance of {}", c.name))?;
                    Ok(false)
                }
            }
        }
        Command::Subsumes(t) => {
            let l = load_transport(&t)?;
            let cfg = SearchConfig { max_alignments: t.max_alignments };
            match schema_subsumes(&l.ws.rel, &l.source, &l.f, &l.gamma, &l.target, cfg) {
                Ok(records) => {
                    emit(out, format!("{} subsumes {} relative to {}", l.source.name, l.target.name, l.f))?;
                    for r in records {
                        emit(
                            out,
                            format!(
                                "  block {} from source block {} by {}",
                                r.target_block + 1,
                                r.source_block + 1,
                                r.permutation
                            ),
                        )?;
                    }
                    Ok(true)
                }
                Err(e) => {
                    emit(out, format!("{} does not subsume {}: {}", l.source.name, l.target.name, e))?;
                    Ok(false)
                }
            }
        }
        Command::Transport(t) => {
            let l = load_transport(&t)?;
            let cfg = SearchConfig { max_alignments: t.max_alignments };
            match certificate(&l, cfg, out)? {
                Some(c) => {
                    emit(out, c)?;
                    Ok(true)
                }
                None => Ok(false),
            }
        }
        Command::Validate { sig, schemas, formula, term_size, blocks, fresh_nominals } => {
            let mut ws = Workspace::load(&sig, schemas.as_deref())?;
            let text = read(&formula)?;
            let f = ws.add_formula(&formula.display().to_string(), &text)?;
            let b = Bounds { term_size_max: term_size, blocks_max: blocks, fresh_nominals };
            let v = bounded_validity(&ws.sig, &f, b);
            emit(out, v.verdict)?;
            for line in &v.trace {
                emit(out, format!("  {}", line))?;
            }
            Ok(v.verdict == Verdict::Valid)
        }
        Command::Oracle { t, blocks, term_size, ctx_max, perms, seed } => {
            let l = load_transport(&t)?;
            let cfg = SearchConfig { max_alignments: t.max_alignments };
            let Some(cert) = certificate(&l, cfg, out)? else {
                emit(out, "no certificate, so nothing to check")?;
                return Ok(false);
            };
            let report = oracle_report(&l.ws, &cert, blocks, term_size, ctx_max, perms, seed);
            emit(out, &report)?;
            Ok(report.passed())
        }
    }
}

fn oracle_report(
    ws: &Workspace,
    cert: &TransportCertificate,
    blocks: usize,
    term_size: usize,
    ctx_max: usize,
    perms: usize,
    seed: u64,
) -> Report {
    let b = Bounds { term_size_max: term_size, blocks_max: blocks, fresh_nominals: 0 };
    let mut report = verify_minimization(
        &ws.sig,
        &ws.rel,
        MinBounds { ctx_max, arg_size: 1, term_size_max: term_size },
    );
    report.extend(verify_transport(&ws.sig, &ws.rel, cert, b, Some(b)));
    let ab = AtomBounds { ctx_max, arg_size: 1, term_size_max: term_size };
    report.extend(verify_atoms(&ws.sig, &ws.rel, &cert.gamma, &cert.formula, ab));
    let ill = ill_formed_contexts(&ws.sig, ctx_max.min(2), 1);
    report.extend(verify_ill_formed(&ws.sig, &cert.gamma, &cert.formula, &ill, b));
    for c in [&cert.source, &cert.target] {
        let mut names: Vec<Ident> = c.blocks.iter().flat_map(|blk| blk.blkctx().into_iter().map(|(x, _)| x)).collect();
        names.extend(["u", "v"].map(Ident::new));
        names.sort();
        names.dedup();
        let ps = sample_permutations(&names, perms, seed);
        report.extend(verify_variants(&ws.sig, c, &ps, b));
    }
    report
}
