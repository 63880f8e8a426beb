use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scott_core::classical::{
    abelian_aut_presentation, det_oracle, nielsen_aut_presentation, nielsen_oracle, FWord, FreeAbelian, FreeGroup,
};
use scott_core::config::{LoadedStructure, StructureConfig};
use scott_core::graph_product::{gp_aut_presentation, GPGraph, GraphProduct};
use scott_core::orbit::{AutPresentation, AutomorphismWord, Letter, OrbitEngine};
use scott_core::plane::{plane_aut_presentation, FreePlane};
use scott_core::scott::{
    assemble_scott, build_theta, check_bounded, check_finite, read_document, scott_metadata, theta_metadata,
    write_document, DEFAULT_TERM_TUPLES,
};
use scott_core::structure::{parse_tuple, satisfies_psi, Structure};
use scott_core::Error;

const DEFAULT_SEED: u64 = 0x5eed_2024;
const DEFAULT_NODE_CAP: usize = 4_000_000;

#[derive(Parser, Debug)]
#[command(name = "scottbench", version, about = "Orbit search and Scott-sentence workbench")]
struct Cli {
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form and length of a word.
    Wp {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Bounded orbit decision for a tuple.
    Orbit {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        tuple: String,
        /// Largest number of orbit nodes to store.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        budget: usize,
    },
    /// Emit a prefix of the orbit formula.
    Theta {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 16)]
        conjuncts: usize,
        /// Extend an earlier theta document by `--conjuncts` more.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the assembled sentence.
    Scott {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 16)]
        conjuncts: usize,
        #[arg(long, default_value_t = DEFAULT_TERM_TUPLES)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a formula document on a target structure at a tuple.
    Check {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Quantify over the whole (finite) target.
        #[arg(long)]
        exact: bool,
    },
    /// Stage, incidence and census queries on the rank-4 free plane.
    Plane {
        #[arg(long)]
        query: String,
    },
    /// Seeded oracle-equivalence runs.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(String),
    Selftest(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: cannot start {} workers: {e}", cli.jobs);
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) if e.is_budget() => {
            eprintln!("budget exhausted: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Selftest(n)) => {
            eprintln!("selftest: {n} suite(s) failed");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> std::result::Result<(StructureConfig, LoadedStructure), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let config = StructureConfig::parse(&text)?;
    let loaded = config.build()?;
    info!("loaded {} from {} (hash {})", loaded.kind(), path.display(), config.hash());
    Ok((config, loaded))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs `$body` with `$s` bound to the concrete structure and `$ap` to its
/// automorphism presentation.
macro_rules! with_structure {
    ($loaded:expr, |$s:ident, $ap:ident| $body:expr) => {
        match $loaded {
            LoadedStructure::GraphProduct($s) => {
                let $ap = gp_aut_presentation($s)?;
                $body
            }
            LoadedStructure::FreeAbelian($s) => {
                let $ap = abelian_aut_presentation($s)?;
                $body
            }
            LoadedStructure::FreeGroup($s) => {
                let $ap = nielsen_aut_presentation($s)?;
                $body
            }
            LoadedStructure::Plane($s) => {
                let $ap = plane_aut_presentation($s)?;
                $body
            }
        }
    };
}

/// As `with_structure!` without building automorphisms.
macro_rules! with_target {
    ($loaded:expr, |$s:ident| $body:expr) => {
        match $loaded {
            LoadedStructure::GraphProduct($s) => $body,
            LoadedStructure::FreeAbelian($s) => $body,
            LoadedStructure::FreeGroup($s) => $body,
            LoadedStructure::Plane($s) => $body,
        }
    };
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Wp { structure, word } => {
            let (_, loaded) = load(&structure)?;
            with_target!(&loaded, |s| {
                let e = s.parse_element(&word)?;
                println!("{}, length {}", s.format(&e), s.element_length(&e));
            });
            Ok(())
        }
        Command::Orbit { structure, tuple, budget } => {
            let (_, loaded) = load(&structure)?;
            with_structure!(&loaded, |s, ap| {
                let t = parse_tuple(s, &tuple)?;
                let verdict = OrbitEngine::with_cap(s, &ap, budget).decide(&t)?;
                println!("{}", verdict.render(&ap));
            });
            Ok(())
        }
        Command::Theta { structure, conjuncts, resume, out } => {
            let (config, loaded) = load(&structure)?;
            let hash = config.hash();
            let start = match &resume {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    let (meta, _) = read_document(&text)?;
                    if meta.config_hash != hash {
                        return Err(Failure::Domain(Error::Document(format!(
                            "{} was built from config {}, not {hash}",
                            p.display(),
                            meta.config_hash
                        ))));
                    }
                    meta.conjuncts.len()
                }
                None => 0,
            };
            let text = with_structure!(&loaded, |s, ap| {
                let th = build_theta(s, &ap, start + conjuncts)?;
                let mut meta = theta_metadata(s, &th, &hash);
                meta.presentation_note = loaded.presentation_note().map(str::to_string);
                debug!("theta prefix has {} conjuncts, cursor {}", th.conjuncts.len(), th.cursor);
                write_document(&meta, &th.formula())
            });
            emit(out.as_deref(), &text)
        }
        Command::Scott { structure, conjuncts, terms, out } => {
            let (config, loaded) = load(&structure)?;
            let hash = config.hash();
            let text = with_structure!(&loaded, |s, ap| {
                let sc = assemble_scott(s, &ap, conjuncts, terms)?;
                let mut meta = scott_metadata(s, &sc, &hash);
                meta.presentation_note = loaded.presentation_note().map(str::to_string);
                write_document(&meta, &sc.formula())
            });
            emit(out.as_deref(), &text)
        }
        Command::Check { formula, target, tuple, depth, exact } => {
            let text = fs::read_to_string(&formula).map_err(|e| Failure::Io(format!("{}: {e}", formula.display())))?;
            let (meta, f) = read_document(&text)?;
            let (config, loaded) = load(&target)?;
            if meta.config_hash != config.hash() {
                info!("checking a {} document from config {} on another structure", meta.kind, meta.config_hash);
            }
            with_target!(&loaded, |s| {
                let t = parse_tuple(s, &tuple)?;
                let verdict = if exact { check_finite(&f, s, &t)? } else { check_bounded(&f, s, &t, depth)? };
                println!("{}", verdict.render(s));
            });
            Ok(())
        }
        Command::Plane { query } => {
            println!("{}", plane_query(&FreePlane::new(), &query)?);
            Ok(())
        }
        Command::Selftest { seed, samples } => selftest(seed, samples),
    }
}

fn plane_query(pl: &FreePlane, query: &str) -> scott_core::Result<String> {
    let q = query.trim();
    let (head, rest) = q
        .split_once('(')
        .ok_or_else(|| Error::Precondition(format!("query `{q}` is not of the form name(args)")))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::Precondition(format!("query `{q}` is missing a closing parenthesis")))?;
    match head.trim() {
        "stage" => Ok(pl.stage(pl.parse(args)?).to_string()),
        "kind" => {
            let x = pl.parse(args)?;
            Ok(if pl.is_point(x) { "point" } else if pl.is_line(x) { "line" } else { "bound" }.to_string())
        }
        "incident" => {
            let (p, l) = split_top_level(args)?;
            Ok(pl.incident(pl.parse(p)?, pl.parse(l)?).to_string())
        }
        "census" => {
            let k: u32 = args
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("census needs a stage number, got `{args}`")))?;
            let rows: Vec<String> = pl
                .census(k)
                .into_iter()
                .map(|(stage, points, lines)| format!("stage {stage}: {points} points, {lines} lines"))
                .collect();
            Ok(rows.join("\n"))
        }
        other => Err(Error::UnknownSymbol(other.to_string())),
    }
}

fn split_top_level(args: &str) -> scott_core::Result<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in args.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Ok((&args[..i], &args[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Precondition(format!("expected two arguments in `{args}`")))
}

fn random_word<E>(rng: &mut ChaCha8Rng, ap: &AutPresentation<E>, max_len: usize) -> AutomorphismWord {
    let len = rng.gen_range(0..=max_len);
    AutomorphismWord {
        letters: (0..len)
            .map(|_| Letter {
                gen: rng.gen_range(0..ap.gens.len()),
                inverse: rng.gen(),
            })
            .collect(),
    }
}

/// Images of random automorphism words must be recovered in-orbit.
fn recovers<S: Structure>(s: &S, ap: &AutPresentation<S::Elem>, rng: &mut ChaCha8Rng, samples: usize, max_len: usize) -> scott_core::Result<(usize, usize)> {
    let engine = OrbitEngine::new(s, ap);
    let mut agree = 0;
    for _ in 0..samples {
        let image = random_word(rng, ap, max_len).apply(s, ap)?;
        if engine.decide(&image)?.in_orbit() {
            agree += 1;
        }
    }
    Ok((agree, samples))
}

fn selftest(seed: u64, samples: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = 0;
    let mut report = |name: &str, (agree, total): (usize, usize)| {
        let status = if agree == total { "PASS" } else { "FAIL" };
        if agree != total {
            failed += 1;
        }
        println!("{status} {name} {agree}/{total}");
    };

    let z = FreeAbelian::new(2)?;
    let zap = abelian_aut_presentation(&z)?;
    let engine = OrbitEngine::new(&z, &zap);
    let (mut agree, mut total) = (0, 0);
    while total < samples {
        let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        let t = vec![z.vector(&c[..2])?, z.vector(&c[2..])?];
        if !satisfies_psi(&z, &t)? {
            continue;
        }
        total += 1;
        if engine.decide(&t)?.in_orbit() == det_oracle(&t) {
            agree += 1;
        }
    }
    report("z2-orbit-vs-det", (agree, total));

    let f = FreeGroup::new(2)?;
    let fap = nielsen_aut_presentation(&f)?;
    let engine = OrbitEngine::new(&f, &fap);
    let (mut agree, mut total) = (0, 0);
    while total < samples {
        let mut word = |max: usize| {
            let len = rng.gen_range(0..=max);
            FWord::reduced((0..len).map(|_| [1i8, -1, 2, -2][rng.gen_range(0..4)]))
        };
        let t = vec![word(3), word(3)];
        if !satisfies_psi(&f, &t)? {
            continue;
        }
        total += 1;
        if engine.decide(&t)?.in_orbit() == nielsen_oracle(&t, 2) {
            agree += 1;
        }
    }
    report("f2-orbit-vs-nielsen", (agree, total));

    let d = GraphProduct::new(GPGraph::infinite_dihedral())?;
    let dap = gp_aut_presentation(&d)?;
    report("dinf-recovery", recovers(&d, &dap, &mut rng, samples, 3)?);

    let pl = FreePlane::new();
    let pap = plane_aut_presentation(&pl)?;
    report("plane-recovery", recovers(&pl, &pap, &mut rng, samples.min(50), 2)?);

    if failed > 0 {
        return Err(Failure::Selftest(failed));
    }
    Ok(())
}
