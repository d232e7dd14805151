//! `subprod`: load subspace and matrix files, run one analysis, print a
//! report.
//!
//! Exit codes: 0 when the command ran and (for checks) the verdict is
//! positive, 2 when a check ran but came out negative, 1 when the inputs
//! could not be used.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use subprod_core::bilinear::{
    extract_bilinear, factor_via_inverse_closed, nullstellensatz_degree_bound, solve_bilinear,
    FactorOptions, SolveOptions,
};
use subprod_core::catalog::{make_subspace, CatalogKind, CatalogSpec};
use subprod_core::geometry::{curvature_q, factorizability_check, flatness_test, sample_point};
use subprod_core::io::{read_matrix, read_subspace, MatrixFile, SubspaceFile};
use subprod_core::pencil::{
    closedness_certificate, craig_sakamoto_check, glft_check, minrank, ClosednessOptions,
    ClosednessStatus, MinrankOptions, PencilOptions,
};
use subprod_core::{Error, Field, Mat64, MatrixSubspace64, Tolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NEGATIVE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "subprod", version, about = "Analyze products of matrix subspaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Base seed; trial `i` uses `seed + i`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of sampled points for randomized checks.
    #[arg(long, global = true, default_value_t = 5)]
    pub trials: usize,
    /// Relative rank threshold.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute floor on the largest singular value.
    #[arg(long, global = true)]
    pub abs_floor: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Linearization, flatness and closedness of S1·S2; with --target also
    /// whether W is the closure of S1·S2.
    Analyze {
        s1: PathBuf,
        s2: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
    /// Compare the rank of Ψ at sampled points with the linearization
    /// dimension (exit 2 unless flat).
    Flatness { s1: PathBuf, s2: PathBuf },
    /// Norm of the curvature measure Q at sampled points and directions.
    Curvature { s1: PathBuf, s2: PathBuf },
    /// Minimum rank over nonzero members.
    Minrank {
        s: PathBuf,
        #[arg(long, default_value_t = 10)]
        starts: usize,
    },
    /// Zero product versus determinant factorization for real symmetric
    /// X1, X2 (exit 2 if the two disagree).
    Cs {
        x1: PathBuf,
        x2: PathBuf,
        /// Grid points per axis; defaults to n + 3.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Linear dependence of {I, X1, X2, X1·X2} (exit 2 without a witness).
    Glft { x1: PathBuf, x2: PathBuf },
    /// Factor A = V1·V2 over S1 × S2 with S2 inverse-closed (exit 2 when no
    /// factorization is found).
    Factor {
        a: PathBuf,
        s1: PathBuf,
        s2: PathBuf,
        #[arg(long, default_value_t = 25)]
        samples: usize,
    },
    /// Solve the bilinear system for A in the linearization of S1·S2
    /// (exit 2 if no restart converges).
    Solve {
        s1: PathBuf,
        s2: PathBuf,
        a: PathBuf,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Emit the subspace file of a structured family.
    Catalog(CatalogArgs),
    /// Sufficient conditions for closedness of S1·S2 (exit 2 on Unknown).
    Closedness {
        s1: PathBuf,
        s2: PathBuf,
        #[arg(long, default_value_t = 100)]
        budget: usize,
    },
    /// Degree bound of the effective Nullstellensatz.
    Bound {
        #[arg(long = "D")]
        degree: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CatalogArgs {
    /// Family name, e.g. lower_triangular, band_lower, rank_cols, krylov.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    pub field: FieldArg,
    /// Bandwidth for band_* and k for rank_*.
    #[arg(long)]
    pub param: Option<usize>,
    /// Matrix file generating a Krylov space.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub max_power: usize,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Flatness { .. } => "flatness",
            Command::Curvature { .. } => "curvature",
            Command::Minrank { .. } => "minrank",
            Command::Cs { .. } => "cs",
            Command::Glft { .. } => "glft",
            Command::Factor { .. } => "factor",
            Command::Solve { .. } => "solve",
            Command::Catalog(_) => "catalog",
            Command::Closedness { .. } => "closedness",
            Command::Bound { .. } => "bound",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Analyze { s1, s2, target, .. } => {
                let mut v = vec![s1.as_path(), s2.as_path()];
                v.extend(target.as_deref());
                v
            }
            Command::Flatness { s1, s2 }
            | Command::Curvature { s1, s2 }
            | Command::Closedness { s1, s2, .. } => vec![s1, s2],
            Command::Minrank { s, .. } => vec![s],
            Command::Cs { x1, x2, .. } | Command::Glft { x1, x2 } => vec![x1, x2],
            Command::Factor { a, s1, s2, .. } => vec![a, s1, s2],
            Command::Solve { s1, s2, a, .. } => vec![s1, s2, a],
            Command::Catalog(c) => c.matrix.iter().map(PathBuf::as_path).collect(),
            Command::Bound { .. } => vec![],
        }
    }
}

/// What a command produced: the exit code and the rendered output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub body: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    inputs: Vec<String>,
    seed: u64,
    trials: usize,
    tolerances: Tolerances,
    result: &'a Value,
}

struct Verdict {
    code: u8,
    result: Value,
    text: String,
}

fn positive(result: Value, text: String) -> Verdict {
    Verdict {
        code: EXIT_OK,
        result,
        text,
    }
}

fn check(ok: bool, result: Value, text: String) -> Verdict {
    Verdict {
        code: if ok { EXIT_OK } else { EXIT_NEGATIVE },
        result,
        text,
    }
}

#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = std::result::Result<Verdict, InputError>;

fn read_text(path: &Path) -> std::result::Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_subspace(path: &Path, tols: Tolerances) -> std::result::Result<MatrixSubspace64, InputError> {
    read_subspace(&read_text(path)?, tols).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> std::result::Result<Mat64, InputError> {
    read_matrix(&read_text(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Serialized name of a unit enum variant.
fn name<S: Serialize>(x: &S) -> String {
    to_value(x).as_str().unwrap_or_default().to_owned()
}

fn to_value<S: Serialize>(x: &S) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn tolerances(g: &GlobalOpts) -> std::result::Result<Tolerances, InputError> {
    let d = Tolerances::default();
    Ok(Tolerances::new(
        g.rel_tol.unwrap_or(d.rel_rank_tol),
        g.abs_floor.unwrap_or(d.abs_floor),
    )?)
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let verdict = tolerances(g).and_then(|tols| dispatch(&cli.command, g, tols));
    match verdict {
        Err(InputError(msg)) => Outcome {
            code: EXIT_INPUT,
            body: format!("error: {msg}\n"),
        },
        Ok(v) => {
            let body = match (g.format, &cli.command) {
                (Format::Text, _) => v.text,
                // the catalog output is itself a subspace file
                (Format::Json, Command::Catalog(_)) => {
                    serde_json::to_string_pretty(&v.result).expect("json") + "\n"
                }
                (Format::Json, cmd) => {
                    let env = Envelope {
                        tool: "subprod",
                        version: env!("CARGO_PKG_VERSION"),
                        command: cmd.name(),
                        inputs: cmd.inputs().iter().map(|p| p.display().to_string()).collect(),
                        seed: g.seed,
                        trials: g.trials,
                        tolerances: tolerances(g).expect("validated above"),
                        result: &v.result,
                    };
                    serde_json::to_string_pretty(&env).expect("json") + "\n"
                }
            };
            Outcome { code: v.code, body }
        }
    }
}

fn dispatch(cmd: &Command, g: &GlobalOpts, tols: Tolerances) -> CmdResult {
    match cmd {
        Command::Analyze {
            s1,
            s2,
            target,
            budget,
        } => analyze(s1, s2, target.as_deref(), *budget, g, tols),
        Command::Flatness { s1, s2 } => {
            let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
            let a = flatness_test(&s1, &s2, g.trials, g.seed)?;
            let text = format!(
                "lin_dim {}\ngeneric_rank {}\nverdict {}\n",
                a.lin_dim,
                a.generic_rank,
                name(&a.verdict)
            );
            Ok(check(a.flat, to_value(&a), text))
        }
        Command::Curvature { s1, s2 } => curvature(s1, s2, g, tols),
        Command::Minrank { s, starts } => {
            let s = load_subspace(s, tols)?;
            let opts = MinrankOptions {
                starts: *starts,
                seed: g.seed,
                pencil: PencilOptions {
                    seed: g.seed,
                    ..PencilOptions::default()
                },
                ..MinrankOptions::default()
            };
            let r = minrank(&s, &opts)?;
            let text = format!(
                "minrank {}\ncertified {}\nmethod {}\n",
                r.value,
                r.certified,
                name(&r.method)
            );
            Ok(positive(to_value(&r), text))
        }
        Command::Cs { x1, x2, grid } => {
            let (x1, x2) = (load_matrix(x1)?, load_matrix(x2)?);
            let grid = grid.unwrap_or(x1.nrows() + 3);
            let cs = craig_sakamoto_check(&x1, &x2, grid, &tols)?;
            let mut result = to_value(&cs);
            result["grid"] = json!(grid);
            let text = format!(
                "zero_product {}\ndet_identity {}\nmax_gap {:e}\n",
                cs.zero_product, cs.det_identity, cs.max_gap
            );
            Ok(check(cs.zero_product == cs.det_identity, result, text))
        }
        Command::Glft { x1, x2 } => {
            let (x1, x2) = (load_matrix(x1)?, load_matrix(x2)?);
            match glft_check(&x1, &x2, &tols)? {
                Some(w) => {
                    let text = format!(
                        "witness (a, b, c, d) = ({}, {}, {}, {})\nresidual {:e}\n",
                        w.a, w.b, w.c, w.d, w.residual
                    );
                    Ok(positive(json!({ "witness": w }), text))
                }
                None => Ok(check(false, json!({ "witness": null }), "no witness\n".into())),
            }
        }
        Command::Factor { a, s1, s2, samples } => {
            let a = load_matrix(a)?;
            let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
            let opts = FactorOptions {
                samples: *samples,
                seed: g.seed,
            };
            match factor_via_inverse_closed(&a, &s1, &s2, &opts) {
                Ok(f) => {
                    let text = format!(
                        "factored true\nrelative_error {:e}\nnullity {}\n",
                        f.relative_error, f.nullity
                    );
                    let mut result = to_value(&f);
                    result["factored"] = json!(true);
                    Ok(positive(result, text))
                }
                Err(
                    e @ (Error::NoFactorization
                    | Error::SingularWitness { .. }
                    | Error::NotInverseClosed { .. }),
                ) => Ok(check(
                    false,
                    json!({ "factored": false, "reason": e.to_string() }),
                    format!("factored false\nreason {e}\n"),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Solve {
            s1,
            s2,
            a,
            restarts,
            max_iter,
        } => solve(s1, s2, a, *restarts, *max_iter, g, tols),
        Command::Catalog(c) => catalog(c, tols),
        Command::Closedness { s1, s2, budget } => {
            let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
            let cert = closedness_certificate(&s1, &s2, &closedness_opts(*budget, g))?;
            let text = format!("status {:?}\n", cert.status);
            Ok(check(
                cert.status != ClosednessStatus::Unknown,
                to_value(&cert),
                text,
            ))
        }
        Command::Bound { degree, n, k } => {
            let b = nullstellensatz_degree_bound(*degree, *n, *k)?;
            // u128 exceeds JSON's integer range in some readers; emit a string past u64
            let value = u64::try_from(b).map(|x| json!(x)).unwrap_or_else(|_| json!(b.to_string()));
            Ok(positive(
                json!({ "D": degree, "n": n, "k": k, "bound": value }),
                format!("{b}\n"),
            ))
        }
    }
}

fn closedness_opts(budget: usize, g: &GlobalOpts) -> ClosednessOptions {
    ClosednessOptions {
        budget,
        seed: g.seed,
        minrank: MinrankOptions {
            seed: g.seed,
            pencil: PencilOptions {
                seed: g.seed,
                ..PencilOptions::default()
            },
            ..MinrankOptions::default()
        },
        ..ClosednessOptions::default()
    }
}

fn analyze(
    s1: &Path,
    s2: &Path,
    target: Option<&Path>,
    budget: usize,
    g: &GlobalOpts,
    tols: Tolerances,
) -> CmdResult {
    let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
    let a = flatness_test(&s1, &s2, g.trials, g.seed)?;
    let cert = closedness_certificate(&s1, &s2, &closedness_opts(budget, g))?;
    let mut result = json!({
        "dim1": s1.dim(),
        "dim2": s2.dim(),
        "analysis": a,
        "closedness": cert,
    });
    let mut text = String::new();
    let _ = writeln!(text, "dims {} x {}", s1.dim(), s2.dim());
    let _ = writeln!(text, "lin_dim {}", a.lin_dim);
    let _ = writeln!(text, "generic_rank {}", a.generic_rank);
    let _ = writeln!(text, "verdict {}", name(&a.verdict));
    let _ = writeln!(text, "closedness {:?}", cert.status);
    if let Some(t) = target {
        let w = load_subspace(t, tols)?;
        let f = factorizability_check(&w, &s1, &s2, g.trials, g.seed)?;
        let _ = writeln!(text, "factorizable {}", f.verdict);
        result["factorizability"] = to_value(&f);
    }
    Ok(positive(result, text))
}

fn curvature(s1: &Path, s2: &Path, g: &GlobalOpts, tols: Tolerances) -> CmdResult {
    // directions come from a stream decorrelated from the base point's
    const DIRECTION_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
    let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
    if g.trials == 0 {
        return Err(InputError("trials must be at least 1".into()));
    }
    let mut samples = Vec::with_capacity(g.trials);
    let mut text = String::new();
    for i in 0..g.trials as u64 {
        let seed = g.seed.wrapping_add(i);
        let (v1, v2) = sample_point(&s1, &s2, seed)?;
        let (w1, w2) = sample_point(&s1, &s2, seed ^ DIRECTION_SALT)?;
        let q = curvature_q(&s1, &s2, &v1, &v2, &w1, &w2)?;
        let _ = writeln!(text, "seed {seed} tangent_dim {} q_norm {:e}", q.tangent_dim, q.q_norm);
        samples.push(json!({
            "seed": seed,
            "tangent_dim": q.tangent_dim,
            "q_norm": q.q_norm,
            "q": MatrixFile::from_mat(&q.q_value),
        }));
    }
    Ok(positive(json!({ "samples": samples }), text))
}

fn solve(
    s1: &Path,
    s2: &Path,
    a: &Path,
    restarts: usize,
    max_iter: usize,
    g: &GlobalOpts,
    tols: Tolerances,
) -> CmdResult {
    let (s1, s2) = (load_subspace(s1, tols)?, load_subspace(s2, tols)?);
    let a = load_matrix(a)?;
    let model = extract_bilinear(&s1, &s2)?;
    let lin = subprod_core::geometry::linearization(&s1, &s2)?;
    let m = lin.membership(&a)?;
    if !m.inside {
        return Err(Error::NotMember {
            what: "A (linearization)",
            residual: m.residual,
        }
        .into());
    }
    let b = lin.coordinates(&a)?;
    let opts = SolveOptions {
        restarts,
        max_iter,
        seed: g.seed,
        ..SolveOptions::default()
    };
    let rep = solve_bilinear(&model, &b, &opts)?;
    let v1 = s1.element(&rep.z)?;
    let v2 = s2.element(&rep.w)?;
    let mut result = to_value(&rep);
    result["v1"] = to_value(&MatrixFile::from_mat(&v1));
    result["v2"] = to_value(&MatrixFile::from_mat(&v2));
    let text = format!(
        "converged {}\nresidual {:e}\nrestarts_used {}\n",
        rep.converged, rep.residual, rep.restarts_used
    );
    Ok(check(rep.converged, result, text))
}

fn catalog(c: &CatalogArgs, tols: Tolerances) -> CmdResult {
    let need_param = || {
        c.param
            .ok_or_else(|| InputError(format!("--param is required for {}", c.kind)))
    };
    let kind = match c.kind.as_str() {
        "diagonal" => CatalogKind::Diagonal,
        "circulant" => CatalogKind::Circulant,
        "lower_triangular" => CatalogKind::LowerTriangular,
        "upper_triangular" => CatalogKind::UpperTriangular,
        "unit_upper_constant_diagonal" => CatalogKind::UnitUpperConstantDiagonal,
        "unit_lower_constant_diagonal" => CatalogKind::UnitLowerConstantDiagonal,
        "band_lower" => CatalogKind::BandLower(need_param()?),
        "band_upper" => CatalogKind::BandUpper(need_param()?),
        "toeplitz_upper_triangular" => CatalogKind::ToeplitzUpperTriangular,
        "toeplitz_lower_triangular" => CatalogKind::ToeplitzLowerTriangular,
        "symmetric" => CatalogKind::Symmetric,
        "persymmetric_constant_antidiagonal" => CatalogKind::PersymmetricConstantAntidiagonal,
        "rank_cols" => CatalogKind::RankCols(need_param()?),
        "rank_rows" => CatalogKind::RankRows(need_param()?),
        "hurwitz_radon_2" => CatalogKind::HurwitzRadon2,
        "krylov" => {
            let path = c
                .matrix
                .as_deref()
                .ok_or_else(|| InputError("--matrix is required for krylov".into()))?;
            CatalogKind::Krylov {
                a: load_matrix(path)?,
                max_power: c.max_power,
            }
        }
        other => return Err(InputError(format!("unknown catalog kind `{other}`"))),
    };
    let spec = CatalogSpec::new(kind, c.n, c.field.into());
    let (s, flags) = make_subspace(&spec, tols)?;
    let text = format!(
        "{} n={} dim={}\ninverse_closed {}\ncontains_identity {}\n",
        c.kind,
        c.n,
        s.dim(),
        flags.inverse_closed,
        flags.contains_identity
    );
    Ok(positive(to_value(&SubspaceFile::from_subspace(&s)), text))
}

/// Runs the command and writes the body to `--output` or stdout; returns
/// the process exit code.
pub fn main_with(cli: &Cli) -> u8 {
    let out = run(cli);
    if out.code == EXIT_INPUT {
        eprint!("{}", out.body);
        return out.code;
    }
    match &cli.global.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.body) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", out.body),
    }
    out.code
}
