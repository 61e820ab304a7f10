//! `cremona`: command-line front end for the `cremona` library.
//!
//! Exit status is 0 on success, 1 when the input is well formed but the
//! requested property fails (not an automorphism, not locally nilpotent, ...)
//! and 2 on unreadable or malformed input.

use std::fmt::Write as _;
use std::io::Read as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cremona::automorphism::invert_map;
use cremona::derivation::exp_aut;
use cremona::lie::{lie_closure, Closure, ClosureBounds};
use cremona::poly::set_max_terms;
use cremona::tame::jung_vdk_decompose;
use cremona::torus::{
    conjugate_generic_torus, conjugate_generic_torus_map, enumerate_monomial_root_vectors,
    format_root_vectors_tsv, group_by_root, is_centralizing, is_normalizing, is_root_vector,
};
use cremona::{
    check_locally_nilpotent, nagata, parse_poly, parse_scalar, sl_decompose, Derivation, Factor,
    FactoredAut, Lnd, Matrix, Nilpotency, NilpotencyBounds, PolyMap,
};

const DEFAULT_MAX_TERMS: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "cremona",
    version,
    about = "Exact computations in the affine Cremona group"
)]
struct Cli {
    /// Number of variables; inferred from the inputs when omitted.
    #[arg(short = 'n', long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    /// Treat INPUT arguments as inline text instead of file paths. Lines may
    /// be separated by ';' (maps, derivations) or '|' (factored words).
    #[arg(short = 'e', long = "expr", global = true)]
    expr: bool,
    /// Worker threads for parallel steps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct NilpotencyArgs {
    /// Maximum iterates per variable when testing local nilpotency.
    #[arg(long = "iter", default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    iter: u32,
    /// Degree at which the nilpotency test gives up.
    #[arg(long = "deg", default_value_t = 10000, value_parser = clap::value_parser!(u32).range(1..))]
    deg: u32,
}

impl From<NilpotencyArgs> for NilpotencyBounds {
    fn from(a: NilpotencyArgs) -> Self {
        NilpotencyBounds {
            iter: a.iter,
            deg: a.deg,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a map, factored word or derivation to a polynomial.
    Eval { target: String, poly: String },
    /// Composite `a ∘ b`, i.e. x_i -> b_i(a_1, ..., a_n).
    Compose {
        a: String,
        b: String,
        /// Print the concatenated word when both inputs are factored words.
        #[arg(long)]
        factored: bool,
    },
    /// Inverse of a map (ansatz) or of a factored word (factor by factor).
    Invert {
        input: String,
        /// Degree bound for the ansatz; defaults to deg^(n-1).
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Jacobian determinant.
    Jacobian { input: String },
    /// Decide local nilpotency of a derivation.
    CheckLnd {
        input: String,
        #[command(flatten)]
        bounds: NilpotencyArgs,
    },
    /// The automorphism exp(t f D) of a locally nilpotent derivation D.
    Exp {
        input: String,
        #[arg(short = 't', long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        /// Kernel element multiplying D.
        #[arg(short = 'f', long)]
        f: Option<String>,
        /// Print the expanded map instead of the factor.
        #[arg(long)]
        expand: bool,
        #[command(flatten)]
        bounds: NilpotencyArgs,
    },
    /// Root vectors of the diagonal torus.
    #[command(subcommand)]
    Roots(RootsCommand),
    /// Conjugation of the diagonal torus.
    #[command(subcommand)]
    Torus(TorusCommand),
    /// Tame decompositions.
    #[command(subcommand)]
    Tame(TameCommand),
    /// The Nagata automorphism as a single exponential factor.
    Nagata {
        /// Print the expanded components.
        #[arg(long)]
        show: bool,
    },
    /// Lie algebra generated by two derivations, up to bounds.
    LieClosure {
        p: String,
        q: String,
        #[arg(long, default_value_t = 64)]
        max_dim: usize,
        #[arg(long, default_value_t = 32)]
        max_deg: u32,
        #[arg(long)]
        tsv: bool,
    },
}

#[derive(Subcommand, Debug)]
enum RootsCommand {
    /// Monomial root vectors x^a D_i with |a| <= max-deg.
    Enumerate {
        #[arg(long, default_value_t = 1)]
        max_deg: u32,
        #[arg(long)]
        tsv: bool,
    },
    /// Test whether a derivation is a root vector.
    Check {
        input: String,
        #[command(flatten)]
        bounds: NilpotencyArgs,
    },
}

#[derive(Subcommand, Debug)]
enum TorusCommand {
    /// Whether the automorphism commutes with every torus element.
    Centralizes { input: String },
    /// Whether conjugation maps the torus into itself.
    Normalizes { input: String },
}

#[derive(Subcommand, Debug)]
enum TameCommand {
    /// Write a determinant-one matrix as a word of transvections.
    SlDecompose {
        matrix: String,
        #[arg(long)]
        verify: bool,
    },
    /// Decompose a plane automorphism into affine and elementary factors.
    VdkDecompose {
        input: String,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] cremona::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !e.is_input_error() => 1,
            _ => 2,
        }
    }
}

/// Printed text plus exit status.
struct Outcome {
    out: String,
    code: u8,
}

impl Outcome {
    fn ok(out: String) -> Self {
        Outcome { out, code: 0 }
    }
}

fn line(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

struct Inputs {
    expr: bool,
    n: Option<usize>,
}

impl Inputs {
    fn read(&self, arg: &str) -> Result<String, CliError> {
        if self.expr {
            return Ok(arg.replace('|', "\n"));
        }
        let io = |source| CliError::Io {
            path: arg.to_string(),
            source,
        };
        if arg == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(io)?;
            Ok(s)
        } else {
            std::fs::read_to_string(arg).map_err(io)
        }
    }

    /// The explicit `-n`, else the largest variable index in `texts`.
    fn arity(&self, texts: &[&str]) -> usize {
        self.n.unwrap_or_else(|| {
            texts
                .iter()
                .map(|t| max_var_index(t))
                .max()
                .unwrap_or(1)
                .max(1)
        })
    }
}

fn max_var_index(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    for (k, &b) in bytes.iter().enumerate() {
        if b != b'x' {
            continue;
        }
        let digits: String = text[k + 1..]
            .chars()
            .take_while(char::is_ascii_digit)
            .collect();
        if let Ok(i) = digits.parse::<usize>() {
            best = best.max(i);
        }
    }
    best
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.split(['\n', ';'])
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn is_derivation_text(text: &str) -> bool {
    content_lines(text)
        .next()
        .is_some_and(|l| l.starts_with('D'))
}

fn is_map_text(text: &str) -> bool {
    content_lines(text).any(|l| l.contains("->"))
}

enum Aut {
    Map(PolyMap),
    Word(FactoredAut),
}

impl Aut {
    fn parse(text: &str, n: usize) -> cremona::Result<Aut> {
        if is_map_text(text) {
            PolyMap::parse(text, n).map(Aut::Map)
        } else {
            FactoredAut::parse(text, n).map(Aut::Word)
        }
    }

    fn map(&self) -> cremona::Result<PolyMap> {
        match self {
            Aut::Map(m) => Ok(m.clone()),
            Aut::Word(w) => w.expand().cloned(),
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let inputs = Inputs {
        expr: cli.expr,
        n: cli.n.map(|n| n as usize),
    };
    match cli.command {
        Command::Eval { target, poly } => {
            let (t, p) = (inputs.read(&target)?, inputs.read(&poly)?);
            let n = inputs.arity(&[&t, &p]);
            let f = parse_poly(p.trim(), n)?;
            let image = if is_derivation_text(&t) {
                Derivation::parse(&t, n)?.apply(&f)?
            } else {
                Aut::parse(&t, n)?.map()?.apply(&f)?
            };
            Ok(Outcome::ok(line(image.to_string())))
        }
        Command::Compose { a, b, factored } => {
            let (ta, tb) = (inputs.read(&a)?, inputs.read(&b)?);
            let n = inputs.arity(&[&ta, &tb]);
            let (a, b) = (Aut::parse(&ta, n)?, Aut::parse(&tb, n)?);
            let out = match (&a, &b, factored) {
                (Aut::Word(x), Aut::Word(y), true) => x.compose(y)?.to_string(),
                (_, _, true) => {
                    return Err(CliError::Usage(
                        "--factored needs two factored words".to_string(),
                    ))
                }
                _ => a.map()?.compose(&b.map()?)?.to_string(),
            };
            Ok(Outcome::ok(line(out)))
        }
        Command::Invert { input, bound } => {
            let text = inputs.read(&input)?;
            let n = inputs.arity(&[&text]);
            let out = match Aut::parse(&text, n)? {
                Aut::Map(m) => invert_map(&m, bound)?.to_string(),
                Aut::Word(w) => w.inverse().to_string(),
            };
            Ok(Outcome::ok(line(out)))
        }
        Command::Jacobian { input } => {
            let text = inputs.read(&input)?;
            let n = inputs.arity(&[&text]);
            let det = Aut::parse(&text, n)?.map()?.jacobian_det();
            Ok(Outcome::ok(line(det.to_string())))
        }
        Command::CheckLnd { input, bounds } => {
            let text = inputs.read(&input)?;
            let d = Derivation::parse(&text, inputs.arity(&[&text]))?;
            let verdict = check_locally_nilpotent(&d, bounds.into());
            let mut out = String::new();
            if let Nilpotency::Unknown(_) = verdict {
                out.push_str("# caveat: undecided within the iteration and degree bounds\n");
            }
            let code = u8::from(matches!(verdict, Nilpotency::Disproven { .. }));
            out.push_str(&line(verdict.to_string()));
            Ok(Outcome { out, code })
        }
        Command::Exp {
            input,
            t,
            f,
            expand,
            bounds,
        } => {
            let text = inputs.read(&input)?;
            let f_text = f.as_deref().map(|f| inputs.read(f)).transpose()?;
            let mut texts = vec![text.as_str()];
            texts.extend(f_text.as_deref());
            let n = inputs.arity(&texts);
            let t = parse_scalar(t.trim())?;
            let lnd = Lnd::certify(Derivation::parse(&text, n)?, bounds.into())?;
            let word = match f_text {
                None => exp_aut(&lnd, t),
                Some(f) => {
                    let factor = Factor::exp_scaled(t, lnd, parse_poly(f.trim(), n)?)?;
                    FactoredAut::from_factors(n, vec![factor])?
                }
            };
            let out = if expand {
                word.expand()?.to_string()
            } else {
                word.to_string()
            };
            Ok(Outcome::ok(line(out)))
        }
        Command::Roots(RootsCommand::Enumerate { max_deg, tsv }) => {
            let n = inputs
                .n
                .ok_or_else(|| CliError::Usage("roots enumerate needs -n".to_string()))?;
            let found = enumerate_monomial_root_vectors(n, max_deg);
            let out = if tsv {
                format_root_vectors_tsv(&found)
            } else {
                let mut out = String::new();
                for (weight, ds) in group_by_root(&found) {
                    writeln!(out, "root {weight}").unwrap();
                    for d in ds {
                        writeln!(out, "  {}", d.to_string().replace('\n', "; ")).unwrap();
                    }
                }
                out
            };
            Ok(Outcome::ok(out))
        }
        Command::Roots(RootsCommand::Check { input, bounds }) => {
            let text = inputs.read(&input)?;
            let d = Derivation::parse(&text, inputs.arity(&[&text]))?;
            Ok(match is_root_vector(&d, bounds.into()) {
                Ok(weight) => Outcome::ok(format!("root {weight}\n")),
                Err(rejection) => {
                    let mut out = String::new();
                    if rejection == cremona::torus::Rejection::NilpotencyUnknown {
                        out.push_str(
                            "# caveat: undecided within the iteration and degree bounds\n",
                        );
                    }
                    writeln!(out, "rejected: {rejection}").unwrap();
                    Outcome { out, code: 1 }
                }
            })
        }
        Command::Torus(cmd) => {
            let (input, centralize) = match &cmd {
                TorusCommand::Centralizes { input } => (input, true),
                TorusCommand::Normalizes { input } => (input, false),
            };
            let text = inputs.read(input)?;
            let n = inputs.arity(&[&text]);
            let conj = match Aut::parse(&text, n)? {
                Aut::Map(m) => conjugate_generic_torus_map(&m)?,
                Aut::Word(w) => conjugate_generic_torus(&w)?,
            };
            let yes = if centralize {
                is_centralizing(&conj)
            } else {
                is_normalizing(&conj)
            };
            Ok(Outcome::ok(format!("{yes}\n")))
        }
        Command::Tame(TameCommand::SlDecompose { matrix, verify }) => {
            let text = inputs.read(&matrix)?;
            let m = Matrix::parse(text.trim())?;
            let word = sl_decompose(&m)?;
            if verify {
                let target = FactoredAut::from_factors(m.n(), vec![Factor::linear(m.clone())?])?;
                check_verified(&word, target.expand()?)?;
            }
            Ok(Outcome::ok(word_text(&word)))
        }
        Command::Tame(TameCommand::VdkDecompose { input, verify }) => {
            let text = inputs.read(&input)?;
            let sigma = Aut::parse(&text, inputs.n.unwrap_or(2))?.map()?;
            let word = jung_vdk_decompose(&sigma)?;
            if verify {
                check_verified(&word, &sigma)?;
            }
            Ok(Outcome::ok(word_text(&word)))
        }
        Command::Nagata { show } => {
            let word = nagata();
            let out = if show {
                word.expand()?.to_string()
            } else {
                word.to_string()
            };
            Ok(Outcome::ok(line(out)))
        }
        Command::LieClosure {
            p,
            q,
            max_dim,
            max_deg,
            tsv,
        } => {
            if max_dim == 0 || max_deg == 0 {
                return Err(CliError::Usage(
                    "closure bounds must be positive".to_string(),
                ));
            }
            let (tp, tq) = (inputs.read(&p)?, inputs.read(&q)?);
            let n = inputs.arity(&[&tp, &tq]);
            let (p, q) = (Derivation::parse(&tp, n)?, Derivation::parse(&tq, n)?);
            let closure = lie_closure(&p, &q, ClosureBounds { max_dim, max_deg })?;
            let mut out = String::from(
                "# caveat: Lie algebra proxy; says nothing proven about the generated group\n",
            );
            match closure {
                Closure::FiniteDim(span) if tsv => {
                    out.push_str("index\tdegree\tderivation\n");
                    for (k, d) in span.basis().iter().enumerate() {
                        let text = d.to_string().replace('\n', "; ");
                        writeln!(out, "{}\t{}\t{}", k + 1, d.degree(), text).unwrap();
                    }
                }
                Closure::FiniteDim(span) => {
                    writeln!(out, "finite-dimensional\ndimension {}", span.dim()).unwrap();
                    for d in span.basis() {
                        writeln!(out, "{}", d.to_string().replace('\n', "; ")).unwrap();
                    }
                }
                Closure::Exceeded(reason) => {
                    writeln!(
                        out,
                        "# caveat: inconclusive, bounds do not decide dimension"
                    )
                    .unwrap();
                    writeln!(out, "exceeded: {reason}").unwrap();
                }
            }
            Ok(Outcome::ok(out))
        }
    }
}

fn word_text(word: &FactoredAut) -> String {
    if word.is_empty() {
        "# identity\n".to_string()
    } else {
        line(word.to_string())
    }
}

fn check_verified(word: &FactoredAut, target: &PolyMap) -> Result<(), CliError> {
    if word.expand()? == target {
        Ok(())
    } else {
        Err(cremona::Error::NotAnAutomorphism(
            "decomposition does not recompose to the input".to_string(),
        )
        .into())
    }
}

fn max_terms_from_env() -> Result<usize, CliError> {
    match std::env::var("CREMONA_MAX_TERMS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| CliError::Usage(format!("CREMONA_MAX_TERMS: invalid value {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_TERMS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let setup = max_terms_from_env().and_then(|limit| {
        set_max_terms(limit);
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))
    });
    match setup.and_then(|()| run(cli)) {
        Ok(outcome) => {
            print!("{}", outcome.out);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
