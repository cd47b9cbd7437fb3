//! Command-line front end: verification, closures, coloring algorithms,
//! amalgams, the forge, independence checks, and forking certificates over
//! the plain-text structure format.
//!
//! Exit codes: 0 on success or an affirmative answer, 1 on a negative
//! result (violations, dependence, refuted certificate, empty enumeration),
//! 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use copacetic::axioms::{check_completeness, verify_copacetic};
use copacetic::closure::closure_of;
use copacetic::coloring::{brute_force_colorings_capped, extend_coloring, interpolate_colorings};
use copacetic::construct::{forge, free_amalgam, triple_amalgam, PairData};
use copacetic::format::{
    parse_certificate, parse_structure, parse_structure_with, serialize_certificate,
    serialize_structure,
};
use copacetic::independence::{
    existence_failure_certificate_capped, independent, verify_certificate,
};
use copacetic::{C4Coloring, Color, Embedding, ParamId, Structure, SubsetHandle, VertexId};

#[derive(Parser)]
#[command(
    name = "copacetic",
    about = "Workbench for capacity-constrained colorings of edge-colored forests",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure axioms; print violations if any.
    Verify {
        file: PathBuf,
        /// Also report completeness deficits (informational).
        #[arg(long)]
        completeness: bool,
    },
    /// Compute the closure of a subset.
    Close {
        file: PathBuf,
        /// Seed subset: comma-separated identifiers, empty for the empty
        /// set. Prefix with `o:`/`p:` to disambiguate.
        #[arg(long, default_value = "")]
        set: String,
        /// Closure params overriding the seed's own (comma-separated).
        #[arg(long)]
        filter: Option<String>,
    },
    /// Extend a valid coloring from a path-closed domain over the forest.
    ColorExtend {
        file: PathBuf,
        #[arg(long, default_value = "")]
        domain: String,
        /// Assignments `vertex=color`, comma-separated.
        #[arg(long, default_value = "")]
        colors: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolate several distant colored sets into one valid coloring.
    Interpolate {
        file: PathBuf,
        /// Vertex set, repeatable; pairs up with --colors by position.
        #[arg(long)]
        set: Vec<String>,
        /// Assignments for the matching --set.
        #[arg(long)]
        colors: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Free amalgam of two structures over a common closed base.
    Amalgam {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Base subset (in both files), comma-separated.
        #[arg(long, default_value = "")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three-way amalgam over a base, with the full report.
    TripleAmalgam {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        ab: PathBuf,
        #[arg(long)]
        ab_left: String,
        #[arg(long)]
        ab_right: String,
        #[arg(long)]
        ac: PathBuf,
        #[arg(long)]
        ac_left: String,
        #[arg(long)]
        ac_right: String,
        #[arg(long)]
        bc: PathBuf,
        #[arg(long)]
        bc_left: String,
        #[arg(long)]
        bc_right: String,
        /// Isomorphism pairs `from=to` between the two a-parts; identity on
        /// the base is implied. Empty means the identity.
        #[arg(long, default_value = "")]
        iso: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded construction schedule.
    Forge {
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        rng: u64,
        /// Starting structure; empty two-color structure when absent.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Independence of two subsets over a base.
    Indep {
        file: PathBuf,
        #[arg(long, default_value = "")]
        base: String,
        #[arg(long, default_value = "")]
        left: String,
        #[arg(long, default_value = "")]
        right: String,
        /// Defensive completion budget before closure computation.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Certify that the unique parameter type forks over the empty set.
    CertifyNoexistence {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Neighborhood radius documented in the certificate.
        #[arg(long, default_value_t = 2)]
        radius: u32,
        /// Vertex cap for the exhaustive enumeration.
        #[arg(long, default_value_t = 14)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive-search oracle services.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate all valid total colorings extending the constraints.
    Colorings(ColoringsArgs),
    /// Re-verify a forking certificate against a structure.
    CheckCert {
        file: PathBuf,
        cert: PathBuf,
        #[arg(long, default_value_t = 14)]
        cap: usize,
    },
}

#[derive(Args)]
struct ColoringsArgs {
    file: PathBuf,
    /// Constraint `vertex=color`, repeatable.
    #[arg(long)]
    constrain: Vec<String>,
    /// Vertex cap for the enumeration.
    #[arg(long, default_value_t = 14)]
    cap: usize,
    /// Print each coloring, not just the count.
    #[arg(long)]
    list: bool,
    /// Worker threads for the enumeration (split over the first vertex's
    /// colors; output order is independent of the split).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_structure(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_lenient(path: &Path) -> Result<Structure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_structure_with(&text, Some(false)).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Comma-separated identifiers classified against the structure; `o:`/`p:`
/// prefixes disambiguate when an identifier names both a vertex and a
/// param. The empty string is the empty subset.
fn parse_handle(s: &Structure, spec: &str) -> Result<SubsetHandle> {
    let mut handle = SubsetHandle::empty();
    for raw in spec.split(',') {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        if let Some(id) = token.strip_prefix("o:") {
            let v = VertexId::new(id);
            if !s.forest().contains(&v) {
                bail!("unknown vertex `{id}`");
            }
            handle.o_part.insert(v);
        } else if let Some(id) = token.strip_prefix("p:") {
            let p = ParamId::new(id);
            if !s.params().contains(&p) {
                bail!("unknown param `{id}`");
            }
            handle.p_part.insert(p);
        } else {
            let v = VertexId::new(token);
            let p = ParamId::new(token);
            match (s.forest().contains(&v), s.params().contains(&p)) {
                (true, true) => bail!(
                    "`{token}` names both a vertex and a param; use o:{token} or p:{token}"
                ),
                (true, false) => {
                    handle.o_part.insert(v);
                }
                (false, true) => {
                    handle.p_part.insert(p);
                }
                (false, false) => bail!("unknown identifier `{token}`"),
            }
        }
    }
    Ok(handle)
}

/// Assignments `vertex=color`, comma-separated.
fn parse_coloring(s: &Structure, spec: &str) -> Result<C4Coloring> {
    let mut col = C4Coloring::new();
    for raw in spec.split(',') {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        let (vertex, color) = token
            .split_once('=')
            .ok_or_else(|| anyhow!("expected `vertex=color`, got `{token}`"))?;
        let v = VertexId::new(vertex.trim());
        if !s.forest().contains(&v) {
            bail!("unknown vertex `{vertex}`");
        }
        let value: u8 = color.trim().parse().context("bad color")?;
        col.set(v, Color::new(value).map_err(|e| anyhow!("{e}"))?);
    }
    Ok(col)
}

fn parse_iso(
    from: &Structure,
    to: &Structure,
    base: &Structure,
    spec: &str,
    default_domain: &SubsetHandle,
) -> Result<Embedding> {
    let mut emb = Embedding::identity(&base.full_handle());
    if spec.trim().is_empty() {
        return Ok(Embedding::identity(default_domain));
    }
    for raw in spec.split(',') {
        let token = raw.trim();
        if token.is_empty() {
            continue;
        }
        let (a, b) = token
            .split_once('=')
            .ok_or_else(|| anyhow!("expected `from=to`, got `{token}`"))?;
        let (a, b) = (a.trim(), b.trim());
        let (va, vb) = (VertexId::new(a), VertexId::new(b));
        let (pa, pb) = (ParamId::new(a), ParamId::new(b));
        if from.forest().contains(&va) && to.forest().contains(&vb) {
            emb.vertex_map.insert(va, vb);
        } else if from.params().contains(&pa) && to.params().contains(&pb) {
            emb.param_map.insert(pa, pb);
        } else {
            bail!("`{token}` does not pair a vertex with a vertex or a param with a param");
        }
    }
    Ok(emb)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn coloring_lines(col: &C4Coloring) -> String {
    let mut out = String::new();
    for (v, c) in col.iter() {
        out.push_str(&format!("color {c} {v}\n"));
    }
    out
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Verify { file, completeness } => {
            let s = load_lenient(&file)?;
            let report = verify_copacetic(&s);
            if completeness {
                let deficits = check_completeness(&s);
                println!("deficits: {}", deficits.len());
                print!("{deficits}");
            }
            if report.is_empty() {
                println!("copacetic");
                Ok(0)
            } else {
                print!("{report}");
                Ok(1)
            }
        }
        Command::Close { file, set, filter } => {
            let s = load(&file)?;
            let seed = parse_handle(&s, &set)?;
            let filter_params = match &filter {
                Some(spec) => {
                    let handle = parse_handle(&s, spec)?;
                    if !handle.o_part.is_empty() {
                        bail!("--filter takes params only");
                    }
                    Some(handle.p_part)
                }
                None => None,
            };
            let closure = closure_of(&s, &seed, filter_params.as_ref())?;
            for v in &closure.o_part {
                println!("vertex {v}");
            }
            for p in &closure.p_part {
                println!("param {p}");
            }
            Ok(0)
        }
        Command::ColorExtend {
            file,
            domain,
            colors,
            out,
        } => {
            let s = load(&file)?;
            let domain = parse_handle(&s, &domain)?;
            if !domain.p_part.is_empty() {
                bail!("--domain takes vertices only");
            }
            let col = parse_coloring(&s, &colors)?;
            let extended = extend_coloring(s.forest(), &domain.o_part, &col, s.variant())?;
            write_or_print(&out, &coloring_lines(&extended))?;
            Ok(0)
        }
        Command::Interpolate {
            file,
            set,
            colors,
            out,
        } => {
            let s = load(&file)?;
            if set.len() != colors.len() {
                bail!(
                    "{} --set flags but {} --colors flags; they pair by position",
                    set.len(),
                    colors.len()
                );
            }
            let mut sets = Vec::new();
            for (set_spec, color_spec) in set.iter().zip(&colors) {
                let handle = parse_handle(&s, set_spec)?;
                if !handle.p_part.is_empty() {
                    bail!("--set takes vertices only");
                }
                let col = parse_coloring(&s, color_spec)?;
                sets.push((handle.o_part, col));
            }
            let (merged_set, merged) = interpolate_colorings(s.forest(), &sets, s.variant())?;
            let mut text = String::new();
            for v in &merged_set {
                text.push_str(&format!("vertex {v}\n"));
            }
            text.push_str(&coloring_lines(&merged));
            write_or_print(&out, &text)?;
            Ok(0)
        }
        Command::Amalgam {
            left,
            right,
            base,
            out,
        } => {
            let a = load(&left)?;
            let b = load(&right)?;
            let base = parse_handle(&a, &base)?;
            let (result, _, _) = free_amalgam(&a, &base, &b)?;
            write_or_print(&out, &serialize_structure(&result))?;
            Ok(0)
        }
        Command::TripleAmalgam {
            base,
            ab,
            ab_left,
            ab_right,
            ac,
            ac_left,
            ac_right,
            bc,
            bc_left,
            bc_right,
            iso,
            depth,
            out,
        } => {
            let m = load(&base)?;
            let ab_s = load(&ab)?;
            let ac_s = load(&ac)?;
            let bc_s = load(&bc)?;
            let ab = PairData {
                left: parse_handle(&ab_s, &ab_left)?,
                right: parse_handle(&ab_s, &ab_right)?,
                structure: ab_s,
            };
            let ac = PairData {
                left: parse_handle(&ac_s, &ac_left)?,
                right: parse_handle(&ac_s, &ac_right)?,
                structure: ac_s,
            };
            let bc = PairData {
                left: parse_handle(&bc_s, &bc_left)?,
                right: parse_handle(&bc_s, &bc_right)?,
                structure: bc_s,
            };
            let iso = parse_iso(&ab.structure, &ac.structure, &m, &iso, &ab.left)?;
            let result = triple_amalgam(&m, &ab, &ac, &bc, &iso, depth)?;
            println!("{}", result.report.summary());
            if let Some(path) = &out {
                fs::write(path, serialize_structure(&result.structure))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if result.report.all_green() { 0 } else { 1 })
        }
        Command::Forge {
            steps,
            rng,
            seed_file,
            out,
        } => {
            let seed = match &seed_file {
                Some(path) => load(path)?,
                None => Structure::empty(copacetic::TheoryVariant::standard()),
            };
            let result = forge(&seed, steps, rng)?;
            println!(
                "forged: {} vertices, {} edges, {} params",
                result.vertex_count(),
                result.forest().edge_count(),
                result.param_count()
            );
            if let Some(path) = &out {
                fs::write(path, serialize_structure(&result))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
        Command::Indep {
            file,
            base,
            left,
            right,
            depth,
        } => {
            let s = load(&file)?;
            let base = parse_handle(&s, &base)?;
            let left = parse_handle(&s, &left)?;
            let right = parse_handle(&s, &right)?;
            let (ok, witness) = independent(&s, &base, &left, &right, depth)?;
            if ok {
                println!("independent");
                Ok(0)
            } else {
                println!("dependent: {}", witness.unwrap());
                Ok(1)
            }
        }
        Command::CertifyNoexistence {
            file,
            vertex,
            radius,
            cap,
            out,
        } => {
            let s = load(&file)?;
            let target = VertexId::new(vertex);
            match existence_failure_certificate_capped(&s, &target, radius, cap) {
                Ok(cert) => {
                    let text = serialize_certificate(&cert);
                    print!("{text}");
                    if let Some(path) = &out {
                        fs::write(path, &text)
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    Ok(0)
                }
                Err(e) => {
                    println!("no certificate: {e}");
                    Ok(1)
                }
            }
        }
        Command::Oracle(oracle) => run_oracle(oracle),
    }
}

fn run_oracle(command: OracleCommand) -> Result<u8> {
    match command {
        OracleCommand::Colorings(args) => {
            let s = load(&args.file)?;
            let mut constraints = C4Coloring::new();
            for spec in &args.constrain {
                constraints = constraints
                    .merge(&parse_coloring(&s, spec)?)
                    .map_err(|e| anyhow!("{e}"))?;
            }
            let colorings = enumerate(&s, &constraints, args.cap, args.jobs)?;
            println!("colorings: {}", colorings.len());
            if args.list {
                for col in &colorings {
                    let parts: Vec<String> =
                        col.iter().map(|(v, c)| format!("{v}={c}")).collect();
                    println!("{}", parts.join(","));
                }
            }
            Ok(if colorings.is_empty() { 1 } else { 0 })
        }
        OracleCommand::CheckCert { file, cert, cap } => {
            let s = load(&file)?;
            let text = fs::read_to_string(&cert)
                .with_context(|| format!("reading {}", cert.display()))?;
            let cert = parse_certificate(&text).map_err(|e| anyhow!("{e}"))?;
            match verify_certificate(&s, &cert, cap) {
                Ok(()) => {
                    println!("verified");
                    Ok(0)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(1)
                }
            }
        }
    }
}

/// Enumerate valid colorings, optionally splitting the first unconstrained
/// vertex's colors across threads. Branches run in ascending color order of
/// the least unconstrained vertex, which the sequential search branches on
/// first, so the concatenated output equals the sequential order.
fn enumerate(
    s: &Structure,
    constraints: &C4Coloring,
    cap: usize,
    jobs: usize,
) -> Result<Vec<C4Coloring>> {
    if jobs <= 1 {
        return Ok(brute_force_colorings_capped(
            s.forest(),
            constraints,
            s.variant(),
            cap,
        )?);
    }
    let first = s
        .forest()
        .vertices()
        .find(|v| constraints.get(v).is_none())
        .cloned();
    let Some(first) = first else {
        return Ok(brute_force_colorings_capped(
            s.forest(),
            constraints,
            s.variant(),
            cap,
        )?);
    };
    let branches: Vec<C4Coloring> = s
        .variant()
        .colors()
        .map(|c| {
            let mut branch = constraints.clone();
            branch.set(first.clone(), c);
            branch
        })
        .collect();
    let mut results: Vec<Result<Vec<C4Coloring>>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = branches
            .iter()
            .map(|branch| {
                scope.spawn(move || {
                    brute_force_colorings_capped(s.forest(), branch, s.variant(), cap)
                        .map_err(anyhow::Error::from)
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("enumeration worker panicked"));
        }
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
