//! Command line front end.
//!
//! Every command prints a human summary by default and a stable JSON document
//! under `--json`; given the same configuration and seed the JSON output is
//! byte-identical across runs. Exit codes: 0 on success, 1 when a verification
//! command finds a failing check, 2 for unusable arguments or inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bases::{self, Basis, BasisJson, PairDeviation};
use crate::bell::{self, CheckOutcome};
use crate::galois::{self, FiniteStructure, StructureJson};
use crate::tomography::{DensityMatrix, DofReport, TomographyScheme};
use crate::weyl;
use crate::{parallel, Error, Result, DEFAULT_SEED, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "mubkit",
    version,
    about = "Mutually unbiased bases and generalized Pauli algebra over finite rings and fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Size of the label structure.
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,

    /// Label arithmetic: integers mod N or a Galois field.
    #[arg(long, global = true, value_enum, default_value_t = Construction::ModN)]
    construction: Construction,

    /// Absolute tolerance; falls back to MUBKIT_TOL, then 1e-10.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for every randomized step (eigenbases, sampling, demo states).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Emit JSON instead of a human summary.
    #[arg(long, global = true)]
    json: bool,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    /// Integers with addition and multiplication mod N.
    ModN,
    /// GF(p^m); the dimension must be a prime power.
    Galois,
}

impl Construction {
    fn name(self) -> &'static str {
        match self {
            Construction::ModN => "mod-n",
            Construction::Galois => "galois",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the finite structure itself.
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    /// Generate or verify the basis family.
    Mub {
        #[command(subcommand)]
        cmd: MubCmd,
    },
    /// Work with the clock-and-shift operator group.
    Pauli {
        #[command(subcommand)]
        cmd: PauliCmd,
    },
    /// Verify the entangled-pair identities.
    Bell {
        #[command(subcommand)]
        cmd: BellCmd,
    },
    /// State tomography from subgroup measurements.
    Tomo {
        #[command(subcommand)]
        cmd: TomoCmd,
    },
    /// Run every check suite for the chosen structure.
    All,
}

#[derive(Debug, Subcommand)]
enum FieldCmd {
    /// Print size, kind and the addition and multiplication tables.
    Show,
}

#[derive(Debug, Subcommand)]
enum MubCmd {
    /// Emit the family of N+1 bases.
    Generate,
    /// Check pairwise unbiasedness of a family.
    Verify {
        /// Read the family from a file written by `mub generate` instead of
        /// rebuilding it from --dim/--construction.
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum PauliCmd {
    /// Enumerate the maximal commuting subgroups and their eigenbases.
    Subgroups,
    /// Verify the operator group law, closure and conjugation identities.
    Check,
}

#[derive(Debug, Subcommand)]
enum BellCmd {
    /// Sweep duality, shift invariance, collapse and re-pairing.
    Verify,
}

#[derive(Debug, Subcommand)]
enum TomoCmd {
    /// Measure a state in every subgroup eigenbasis and rebuild it.
    Demo {
        /// "random", "mixed", or a path to a density-matrix JSON file.
        #[arg(long, default_value = "random")]
        state: String,
        /// Simulate this many shots per subgroup; omit for exact statistics.
        #[arg(long)]
        shots: Option<u64>,
    },
}

/// Family file written by `mub generate` and read back by `mub verify`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub construction: String,
    pub bases: Vec<BasisJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MubVerifyJson {
    pub dim: usize,
    pub construction: String,
    pub tol: f64,
    pub source: String,
    pub overall_max: f64,
    pub is_complete_mub: bool,
    pub pairs: Vec<PairDeviation>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubgroupsJson {
    pub dim: usize,
    pub construction: String,
    pub count: usize,
    pub subgroups: Vec<Vec<[usize; 2]>>,
    pub family_indices: Vec<Option<usize>>,
    pub eigenbases: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckSuiteJson {
    pub dim: usize,
    pub construction: String,
    pub tol: f64,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TomoJson {
    pub dim: usize,
    pub construction: String,
    pub tol: f64,
    pub seed: u64,
    pub state: String,
    pub shots: Option<u64>,
    pub residual: f64,
    pub dof: DofReport,
    pub rows: Vec<Vec<f64>>,
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidDimension(_)
        | Error::InvalidCharacteristic(_)
        | Error::TooLarge(..)
        | Error::Index { .. }
        | Error::Shape(_)
        | Error::Domain(_)
        | Error::Parse(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn resolve_tol(flag: Option<f64>) -> Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("MUBKIT_TOL") {
            Ok(text) => text
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("MUBKIT_TOL {text:?} is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    Ok(tol)
}

fn build_structure(construction: Construction, dim: usize) -> Result<FiniteStructure> {
    match construction {
        Construction::ModN => FiniteStructure::ring_mod_n(dim),
        Construction::Galois => match galois::prime_power(dim) {
            Some((p, m)) => FiniteStructure::galois_field(p, m),
            None => Err(Error::Domain(format!(
                "dimension {dim} is not a prime power, so no Galois field exists"
            ))),
        },
    }
}

fn emit(cli: &Cli, json: String, text: String) -> Result<()> {
    let body = if cli.json {
        json
    } else {
        text.trim_end().to_string()
    };
    match &cli.output {
        Some(path) => fs::write(path, body + "\n")
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable outputs")
}

fn execute(cli: &Cli) -> Result<i32> {
    let tol = resolve_tol(cli.tol)?;
    match &cli.command {
        Command::Field {
            cmd: FieldCmd::Show,
        } => {
            let s = build_structure(cli.construction, cli.dim)?;
            let json = to_pretty(&s.to_json());
            emit(cli, json, render_structure(&s))?;
            Ok(0)
        }
        Command::Mub {
            cmd: MubCmd::Generate,
        } => {
            let s = build_structure(cli.construction, cli.dim)?;
            let family = bases::mub_family(&s);
            let file = FamilyJson {
                dim: s.size(),
                construction: cli.construction.name().to_string(),
                bases: family.iter().map(Basis::to_json).collect(),
            };
            let mut text = format!(
                "{} bases of dimension {} ({})\n",
                family.len(),
                s.size(),
                cli.construction.name()
            );
            for b in &family {
                let _ = writeln!(
                    text,
                    "  basis {:>3}: orthonormality deviation {:.2e}",
                    b.construction_index(),
                    b.orthonormality_deviation()
                );
            }
            emit(cli, to_pretty(&file), text)?;
            Ok(0)
        }
        Command::Mub {
            cmd: MubCmd::Verify { input },
        } => {
            let (family, dim, construction, source) = match input {
                Some(path) => {
                    let file: FamilyJson = read_json_file(path)?;
                    let family = file
                        .bases
                        .iter()
                        .map(Basis::from_json)
                        .collect::<Result<Vec<_>>>()?;
                    (
                        family,
                        file.dim,
                        file.construction,
                        path.display().to_string(),
                    )
                }
                None => {
                    let s = build_structure(cli.construction, cli.dim)?;
                    (
                        bases::mub_family(&s),
                        s.size(),
                        cli.construction.name().to_string(),
                        "generated".to_string(),
                    )
                }
            };
            let report = bases::unbiasedness(&family, tol)?;
            let json = MubVerifyJson {
                dim,
                construction,
                tol,
                source,
                overall_max: report.overall_max,
                is_complete_mub: report.is_complete_mub,
                pairs: report.pairs.clone(),
            };
            let mut text = format!(
                "{} bases of dimension {} from {}\n",
                family.len(),
                dim,
                json.source
            );
            for p in &report.pairs {
                let _ = writeln!(
                    text,
                    "  pair ({:>2}, {:>2}): deviation {:.3e}{}",
                    p.first,
                    p.second,
                    p.deviation,
                    if p.deviation <= tol {
                        ""
                    } else {
                        "  <-- not unbiased"
                    }
                );
            }
            let _ = writeln!(
                text,
                "overall max {:.3e}; complete MUB: {}",
                report.overall_max,
                if report.is_complete_mub { "yes" } else { "no" }
            );
            emit(cli, to_pretty(&json), text)?;
            Ok(if report.is_complete_mub { 0 } else { 1 })
        }
        Command::Pauli {
            cmd: PauliCmd::Subgroups,
        } => {
            let s = Arc::new(build_structure(cli.construction, cli.dim)?);
            let subs = weyl::enumerate_subgroups(&s);
            let eigenbases = weyl::all_joint_eigenbases(&s, &subs, cli.seed, tol)?;
            let json = SubgroupsJson {
                dim: s.size(),
                construction: cli.construction.name().to_string(),
                count: subs.len(),
                subgroups: subs
                    .iter()
                    .map(|g| g.labels().iter().map(|&(j, i)| [j, i]).collect())
                    .collect(),
                family_indices: subs.iter().map(|g| g.family_index()).collect(),
                eigenbases: eigenbases
                    .iter()
                    .map(|b| {
                        b.states()
                            .iter()
                            .map(|st| st.iter().map(|z| [z.re, z.im]).collect())
                            .collect()
                    })
                    .collect(),
            };
            let mut text = format!(
                "{} maximal commuting subgroups for dimension {} ({})\n",
                subs.len(),
                s.size(),
                cli.construction.name()
            );
            for sub in &subs {
                let labels: Vec<String> = sub
                    .labels()
                    .iter()
                    .map(|&(j, i)| format!("({j},{i})"))
                    .collect();
                let family = match sub.family_index() {
                    Some(k) => format!("family basis {k}"),
                    None => "no family basis".to_string(),
                };
                let _ = writeln!(text, "  {{{}}}  [{}]", labels.join(", "), family);
            }
            emit(cli, to_pretty(&json), text)?;
            Ok(0)
        }
        Command::Pauli {
            cmd: PauliCmd::Check,
        } => {
            let s = Arc::new(build_structure(cli.construction, cli.dim)?);
            let checks = operator_checks(&s, tol, cli.seed)?;
            finish_suite(cli, tol, checks, "operator group checks")
        }
        Command::Bell {
            cmd: BellCmd::Verify,
        } => {
            let s = Arc::new(build_structure(cli.construction, cli.dim)?);
            let checks = bell::verify_identities(&s, tol, cli.seed)?;
            finish_suite(cli, tol, checks, "entangled-pair checks")
        }
        Command::Tomo {
            cmd: TomoCmd::Demo { state, shots },
        } => {
            let s = Arc::new(build_structure(cli.construction, cli.dim)?);
            let n = s.size();
            let scheme = TomographyScheme::new(&s, cli.seed, tol)?;
            let rho = match state.as_str() {
                "random" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed ^ 0x00D1_5EA5_E000_0001);
                    DensityMatrix::random(n, &mut rng)
                }
                "mixed" => DensityMatrix::maximally_mixed(n),
                path => DensityMatrix::from_json(&read_json_file(Path::new(path))?)?,
            };
            let (rows, spread_tol) = match shots {
                None => (scheme.measure(&rho)?, tol.max(1e-8)),
                Some(k) => (
                    scheme.measure_sampled(&rho, *k, cli.seed ^ 0x5A5A)?,
                    20.0 * (n as f64).sqrt() / (*k as f64).sqrt(),
                ),
            };
            let rec = scheme.reconstruct(&rows, spread_tol)?;
            let residual = rec.max_abs_diff(rho.matrix())?;
            let dof = scheme.degrees_of_freedom();
            let json = TomoJson {
                dim: n,
                construction: cli.construction.name().to_string(),
                tol,
                seed: cli.seed,
                state: state.clone(),
                shots: *shots,
                residual,
                dof: dof.clone(),
                rows: rows.clone(),
            };
            let mut text = format!(
                "tomography of a {state} state, dimension {} ({})\n",
                n,
                cli.construction.name()
            );
            let _ = writeln!(
                text,
                "  {} subgroups, {} measured values for {} coefficients (excess {})",
                dof.subgroup_count, dof.measured_values, dof.independent_coefficients, dof.excess
            );
            match shots {
                None => {
                    let _ = writeln!(
                        text,
                        "  exact statistics; reconstruction residual {residual:.3e}"
                    );
                }
                Some(k) => {
                    let _ = writeln!(
                        text,
                        "  {k} shots per subgroup; reconstruction residual {residual:.3e}"
                    );
                }
            }
            emit(cli, to_pretty(&json), text)?;
            Ok(0)
        }
        Command::All => {
            let s = Arc::new(build_structure(cli.construction, cli.dim)?);
            let mut checks = structure_checks(&s, tol);
            checks.extend(family_checks(&s, tol)?);
            checks.extend(operator_checks(&s, tol, cli.seed)?);
            checks.extend(bell::verify_identities(&s, tol, cli.seed)?);
            checks.push(tomography_check(&s, tol, cli.seed)?);
            finish_suite(cli, tol, checks, "full check suite")
        }
    }
}

fn finish_suite(cli: &Cli, tol: f64, checks: Vec<CheckOutcome>, title: &str) -> Result<i32> {
    let pass = checks.iter().all(|c| c.pass);
    let json = CheckSuiteJson {
        dim: cli.dim,
        construction: cli.construction.name().to_string(),
        tol,
        seed: cli.seed,
        checks,
        pass,
    };
    let mut text = format!(
        "{title} for dimension {} ({})\n",
        cli.dim,
        cli.construction.name()
    );
    for c in &json.checks {
        let _ = writeln!(
            text,
            "  {:<28} max residual {:>11.3e}   {}",
            c.name,
            c.max_residual,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(text, "overall: {}", if pass { "PASS" } else { "FAIL" });
    emit(cli, to_pretty(&json), text)?;
    Ok(if pass { 0 } else { 1 })
}

fn render_structure(s: &FiniteStructure) -> String {
    let json: StructureJson = s.to_json();
    let n = s.size();
    let width = format!("{}", n - 1).len();
    let mut text = format!("size {} ({})\n", n, json.kind);
    if let (Some(p), Some(m)) = (json.p, json.m) {
        let modulus = json
            .modulus
            .as_ref()
            .map(|c| format!("{c:?}"))
            .unwrap_or_default();
        let _ = writeln!(
            text,
            "p = {p}, m = {m}, modulus coefficients {modulus} (constant term first)"
        );
    }
    let table = |name: &str, data: &[Vec<usize>], text: &mut String| {
        let _ = writeln!(text, "{name}:");
        for row in data {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            let _ = writeln!(text, "  {}", cells.join(" "));
        }
    };
    table("addition", &json.add, &mut text);
    table("multiplication", &json.mul, &mut text);
    text
}

fn structure_checks(s: &FiniteStructure, tol: f64) -> Vec<CheckOutcome> {
    let n = s.size();
    let chi = s.character();
    let mut hom = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            hom = hom.max((chi.value(s.add(a, b)) - chi.value(a) * chi.value(b)).norm());
        }
    }
    let mut delta = 0.0_f64;
    for q in 0..n {
        let sum: num_complex::Complex64 = (0..n).map(|x| chi.value(s.mul(x, q))).sum();
        let target = if q == 0 { n as f64 } else { 0.0 };
        delta = delta.max((sum - num_complex::Complex64::new(target, 0.0)).norm());
    }
    vec![
        CheckOutcome::new("character_homomorphism", hom, tol),
        CheckOutcome::new("character_delta_sum", delta, tol),
    ]
}

fn family_checks(s: &FiniteStructure, tol: f64) -> Result<Vec<CheckOutcome>> {
    let family = bases::mub_family(s);
    let ortho = family
        .iter()
        .map(Basis::orthonormality_deviation)
        .fold(0.0, f64::max);
    let report = bases::unbiasedness(&family, tol)?;
    let computational = report
        .pairs
        .iter()
        .filter(|p| p.first == 0)
        .map(|p| p.deviation)
        .fold(0.0, f64::max);
    let mut out = vec![
        CheckOutcome::new("basis_orthonormality", ortho, tol),
        CheckOutcome::new("unbiased_vs_computational", computational, tol),
    ];
    if s.is_field() {
        out.push(CheckOutcome::new("complete_mub", report.overall_max, tol));
    }
    Ok(out)
}

fn operator_checks(s: &Arc<FiniteStructure>, tol: f64, seed: u64) -> Result<Vec<CheckOutcome>> {
    let n = s.size();
    let chi = s.character();

    let mut quads = Vec::with_capacity(n * n * n * n);
    for ja in 0..n {
        for ia in 0..n {
            for jb in 0..n {
                for ib in 0..n {
                    quads.push((ja, ia, jb, ib));
                }
            }
        }
    }
    let shared = Arc::clone(s);
    let compose = parallel::max_over(quads, move |&(ja, ia, jb, ib)| {
        let a = weyl::v_op(&shared, ja, ia).expect("labels in range");
        let b = weyl::v_op(&shared, jb, ib).expect("labels in range");
        let prod = a.compose(&b).expect("same structure");
        a.matrix()
            .matmul(&b.matrix())
            .expect("square")
            .max_abs_diff(&prod.matrix())
            .expect("same shape")
    });

    let mut exchange = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let ab = weyl::shift_op(s, i)?.compose(&weyl::clock_op(s, j)?)?;
            let ba = weyl::clock_op(s, j)?.compose(&weyl::shift_op(s, i)?)?;
            let swap = chi.value(s.neg(s.mul(i, j)));
            exchange = exchange.max((ab.phase() - swap * ba.phase()).norm());
        }
    }

    let shared = Arc::clone(s);
    let closure = parallel::max_over((0..=n).collect::<Vec<_>>(), move |&k| {
        let mut worst = 0.0_f64;
        for l1 in 0..shared.size() {
            for l2 in 0..shared.size() {
                let prod = weyl::u_op(&shared, k, l1)
                    .and_then(|a| a.compose(&weyl::u_op(&shared, k, l2)?))
                    .expect("labels in range");
                let direct = weyl::u_op(&shared, k, shared.add(l1, l2)).expect("labels in range");
                if (prod.clock(), prod.shift()) != (direct.clock(), direct.shift()) {
                    worst = worst.max(1.0);
                } else {
                    worst = worst.max((prod.phase() - direct.phase()).norm());
                }
            }
        }
        worst
    });

    let subs = weyl::enumerate_subgroups(s);
    let eigenbases = weyl::all_joint_eigenbases(s, &subs, seed, tol)?;
    let mut diagonal = 0.0_f64;
    for (sub, basis) in subs.iter().zip(&eigenbases) {
        let w = basis.as_matrix();
        let wh = w.adjoint();
        for op in sub.members(s)? {
            let d = wh.matmul(&op.matrix())?.matmul(&w)?;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        diagonal = diagonal.max(d[(r, c)].norm());
                    }
                }
            }
        }
    }

    let shared = Arc::clone(s);
    let intertwine = parallel::max_over((0..=n).collect::<Vec<_>>(), move |&k| {
        let w = weyl::basis_change(&shared, k).expect("k in range");
        let wh = w.adjoint();
        let mut worst = 0.0_f64;
        for m in 0..shared.size() {
            for l in 0..shared.size() {
                let op = weyl::v_op(&shared, m, l).expect("labels in range");
                let closed = weyl::intertwined(&op, k).expect("k in range");
                let num = wh
                    .matmul(&op.matrix())
                    .expect("square")
                    .matmul(&w)
                    .expect("square");
                worst = worst.max(num.max_abs_diff(&closed.matrix()).expect("same shape"));
            }
        }
        worst
    });

    Ok(vec![
        CheckOutcome::new("compose_law", compose, tol),
        CheckOutcome::new("exchange_rule", exchange, tol),
        CheckOutcome::new("u_closure", closure, tol),
        CheckOutcome::new("subgroup_eigenbases", diagonal, tol.max(1e-8)),
        CheckOutcome::new("intertwining", intertwine, tol),
    ])
}

fn tomography_check(s: &Arc<FiniteStructure>, tol: f64, seed: u64) -> Result<CheckOutcome> {
    let scheme = TomographyScheme::new(s, seed, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_5A5A_0000_0001);
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let rho = DensityMatrix::random(s.size(), &mut rng);
        let rows = scheme.measure(&rho)?;
        let rec = scheme.reconstruct(&rows, tol.max(1e-8))?;
        worst = worst.max(rec.max_abs_diff(rho.matrix())?);
    }
    Ok(CheckOutcome::new(
        "tomography_roundtrip",
        worst,
        tol.max(1e-9),
    ))
}
