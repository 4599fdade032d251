use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use varietal::models::{refuter_model, refuter_models};
use varietal::nfb::default_bounds;
use varietal::{
    basis, classify, derive, oracle, phi_system, satisfies, shape_experiment, template_experiment, u_word, w_family,
    Bounds, DeriveOutcome, FiniteMonoid, Identity, IdentitySystem, Letter, Permutation, VarietyId, Verdict, Word,
};

const EXIT_FAILS: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;

#[derive(Parser)]
#[command(name = "varietal", version, about = "Word problems and deduction for the monoid variety J and its subvarieties")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Maximum derivation depth.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    /// Maximum word length during searches.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    len: u64,
    /// Largest n with w_n pairs in the basis of J.
    #[arg(long, global = true, default_value_t = 3)]
    trunc: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

impl Config {
    fn bounds(&self) -> Bounds {
        Bounds::new(self.steps as usize, self.len as usize)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Block/divider decomposition and the h/t table of a word.
    Decompose { word: String },
    /// Decide or semi-decide an identity in one variety.
    Check { variety: VarietyId, identity: String },
    /// Verdicts for an identity in all twelve varieties.
    Classify { identity: String },
    /// Search for a derivation from a named system or a system file.
    Derive {
        identity: String,
        /// A variety token, `Phi`, or a path to an identity-per-line file.
        #[arg(long)]
        system: String,
    },
    /// Exhaustive satisfaction in a built-in model or a Cayley-table JSON file.
    ModelCheck { model: String, identity: String },
    /// List the built-in models with their tables and tags.
    Models,
    /// Members of the w_n[π] and u_n families.
    Family {
        kind: FamilyKind,
        #[arg(long)]
        n: usize,
        /// One-line images, e.g. `2,1`; identity permutation if omitted.
        #[arg(long)]
        perm: Option<String>,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Exponents ℓ_1..ℓ_n, comma separated; all 1 if omitted.
        #[arg(long)]
        l: Option<String>,
    },
    /// Shape-preservation experiments.
    Nfb {
        #[command(subcommand)]
        experiment: Nfb,
    },
    /// Seeded random identities checked for antitone verdicts.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Longest side.
        #[arg(long, default_value_t = 6)]
        side: usize,
        /// Number of distinct letters.
        #[arg(long, default_value_t = 4)]
        letters: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    W,
    U,
}

#[derive(Subcommand)]
enum Nfb {
    /// Closure of u_n[1, 1…1] under basis(J, m).
    Shape {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Closure of a template instance under basis(V, trunc).
    Template { variety: VarietyId, seed: String },
}

fn parse_identity(text: &str) -> Result<Identity> {
    Identity::parse(text).map_err(|e| anyhow!("identity {e}"))
}

fn parse_word(text: &str) -> Result<Word> {
    Word::parse(text).map_err(|e| anyhow!("word {e}"))
}

fn emit(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
}

fn decompose(text: &str, cfg: &Config) -> Result<u8> {
    let w = parse_word(text)?;
    let d = w.decompose();
    let classes = w.classes();
    let mut rows = Vec::new();
    for (x, n) in w.counts() {
        let hs: Vec<String> = (1..=n).map(|i| w.h(x, i).map(|t| t.to_string())).collect::<Result<_, _>>()?;
        rows.push((x, hs, w.t_divider(x)?.to_string()));
    }
    if cfg.json {
        let table: Vec<_> = rows
            .iter()
            .map(|(x, hs, t)| json!({"letter": x.to_string(), "h": hs, "t": t}))
            .collect();
        emit(json!({
            "word": w,
            "decomposition": d.to_string(),
            "dividers": d.dividers(),
            "blocks": d.blocks(),
            "simple": classes.simple(),
            "multiple": classes.multiple(),
            "letters": table,
        }));
        return Ok(0);
    }
    let names = |s: std::collections::BTreeSet<Letter>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    println!("word:          {}", w.compact());
    println!("decomposition: {d}");
    println!("simple:        {}", names(classes.simple()));
    println!("multiple:      {}", names(classes.multiple()));
    for (x, hs, t) in &rows {
        let parts: Vec<String> = hs.iter().enumerate().map(|(i, h)| format!("h_{}={h}", i + 1)).collect();
        println!("  {x}: {}  t={t}", parts.join("  "));
    }
    Ok(0)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => EXIT_FAILS,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn check(v: VarietyId, text: &str, cfg: &Config) -> Result<u8> {
    let id = parse_identity(text)?;
    let s = oracle::status(v, &id, &cfg.bounds(), cfg.trunc);
    if cfg.json {
        emit(json!({
            "identity": id.to_string(),
            "variety": v.token(),
            "verdict": s.verdict,
            "evidence": s.evidence.to_string(),
        }));
    } else {
        println!("{}", id.pretty());
        println!("{v}: {} ({})", s.verdict, s.evidence);
        if let oracle::Evidence::Derived { derivation, .. } = &s.evidence {
            println!("  {}", derivation.chain());
        }
    }
    Ok(verdict_code(s.verdict))
}

fn classify_cmd(text: &str, cfg: &Config) -> Result<u8> {
    let id = parse_identity(text)?;
    let c = classify(&id, &cfg.bounds(), cfg.trunc);
    if cfg.json {
        emit(c.to_json());
    } else {
        println!("{}", id.pretty());
        for (v, s) in &c.statuses {
            println!("  {:<5} {:<8} {}", v.token(), s.verdict.to_string(), s.evidence);
        }
    }
    let unknown = c.statuses.values().any(|s| s.verdict == Verdict::Unknown);
    Ok(if unknown { EXIT_UNKNOWN } else { 0 })
}

fn load_system(source: &str, trunc: usize) -> Result<IdentitySystem> {
    if source.eq_ignore_ascii_case("phi") {
        return Ok(phi_system());
    }
    if let Ok(v) = source.parse::<VarietyId>() {
        return Ok(basis(v, trunc));
    }
    let path = Path::new(source);
    if !path.exists() {
        bail!("{source} is neither a variety token, Phi, nor a file");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    IdentitySystem::parse(name, &text).map_err(|e| anyhow!("{source}:{e}"))
}

fn derive_cmd(text: &str, system: &str, cfg: &Config) -> Result<u8> {
    let id = parse_identity(text)?;
    let sys = load_system(system, cfg.trunc)?;
    let b = cfg.bounds();
    let outcome = derive(&id.lhs, &id.rhs, &sys, &b);
    match &outcome {
        DeriveOutcome::Found(d) => {
            d.verify(&sys).map_err(|e| anyhow!("certificate failed to replay: {e}"))?;
            if cfg.json {
                emit(json!({"identity": id.to_string(), "system": sys.name, "found": true, "derivation": d.to_json()}));
            } else {
                println!("{} from {} in {} step(s)", id.pretty(), sys.name, d.len());
                println!("  {}", d.chain());
            }
            Ok(0)
        }
        DeriveOutcome::NotFound { explored, .. } => {
            if cfg.json {
                emit(json!({
                    "identity": id.to_string(),
                    "system": sys.name,
                    "found": false,
                    "bounds": b,
                    "explored": explored,
                }));
            } else {
                println!("{}: no derivation from {} within {b} ({explored} words explored)", id.pretty(), sys.name);
            }
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn load_model(source: &str) -> Result<FiniteMonoid> {
    if let Some(m) = refuter_model(source) {
        return Ok(m.monoid.clone());
    }
    let path = Path::new(source);
    if !path.exists() {
        let names: Vec<&str> = refuter_models().iter().map(|m| m.name).collect();
        bail!("{source} is neither a built-in model ({}) nor a file", names.join(", "));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
    FiniteMonoid::from_json(&text).with_context(|| format!("loading {source}"))
}

fn model_check(model: &str, text: &str, cfg: &Config) -> Result<u8> {
    let m = load_model(model)?;
    let id = parse_identity(text)?;
    let r = satisfies(&m, &id);
    if cfg.json {
        emit(r.to_json(&m));
    } else {
        println!("{}", r.describe(&m));
    }
    Ok(if r.verdict { 0 } else { EXIT_FAILS })
}

fn models(cfg: &Config) -> Result<u8> {
    if cfg.json {
        let all: Vec<_> = refuter_models()
            .iter()
            .map(|m| {
                let tags: Vec<&str> = m.tags.iter().map(|v| v.token()).collect();
                json!({"name": m.name, "description": m.description, "tags": tags, "monoid": m.monoid.to_json()})
            })
            .collect();
        emit(json!(all));
        return Ok(0);
    }
    for m in refuter_models() {
        let tags: Vec<&str> = m.tags.iter().map(|v| v.token()).collect();
        println!("{}: {}", m.name, m.description);
        println!("lies in: {}", tags.join(" "));
        println!("{}", m.monoid);
    }
    Ok(0)
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("{s} is not a natural number")))
        .collect()
}

fn family(kind: FamilyKind, n: usize, perm: Option<&str>, p: usize, l: Option<&str>, cfg: &Config) -> Result<u8> {
    match kind {
        FamilyKind::W => {
            let pi = match perm {
                Some(text) => Permutation::parse(text).map_err(|e| anyhow!("permutation {e}"))?,
                None => Permutation::identity(n),
            };
            let id = w_family(n, &pi)?;
            if cfg.json {
                emit(json!({"name": id.label(), "identity": id.to_string()}));
            } else {
                println!("{}: {}", id.label(), id.pretty());
            }
        }
        FamilyKind::U => {
            let ell = match l {
                Some(text) => parse_list(text)?,
                None => vec![1; n],
            };
            let w = u_word(n, p, &ell)?;
            if cfg.json {
                emit(json!({"n": n, "p": p, "ell": ell, "word": w}));
            } else {
                println!("{}", w.compact());
            }
        }
    }
    Ok(0)
}

fn nfb(experiment: &Nfb, cfg: &Config, explicit_bounds: bool) -> Result<u8> {
    let report = match experiment {
        Nfb::Shape { n, m } => {
            let b = if explicit_bounds {
                cfg.bounds()
            } else {
                default_bounds(&u_word((*n).max(1), 1, &vec![1; (*n).max(1)])?)
            };
            shape_experiment(*n, *m, &b)?
        }
        Nfb::Template { variety, seed } => {
            let seed = parse_word(seed)?;
            let b = if explicit_bounds { cfg.bounds() } else { default_bounds(&seed) };
            template_experiment(*variety, &seed, &b, cfg.trunc)?
        }
    };
    // For m ≥ n the target is expected to be reachable.
    let expect_target = matches!(experiment, Nfb::Shape { n, m } if m >= n);
    let passed = if expect_target {
        report.filter_failures.is_empty() && report.target_reached().is_some()
    } else {
        report.passed() && report.target_reached().is_none()
    };
    if cfg.json {
        let mut j = report.to_json();
        j["expect_target"] = json!(expect_target);
        j["passed"] = json!(passed);
        emit(j);
    } else {
        let what = match experiment {
            Nfb::Shape { n, m } => format!("shape n={n} m={m}"),
            Nfb::Template { variety, .. } => format!("template {variety}"),
        };
        let target = match &report.target {
            Some((w, Some(d))) => format!(", target {} reached at depth {d}", w.compact()),
            Some((w, None)) => format!(", target {} not reached", w.compact()),
            None => String::new(),
        };
        println!(
            "{} {what}: {} words under {} within {}, {} violation(s){target}",
            if passed { "PASS" } else { "FAIL" },
            report.reachable_count,
            report.system,
            report.bounds,
            report.violations.len(),
        );
        for v in report.violations.iter().take(5) {
            println!("  {} ≈_{{{}}} {}", v.from.compact(), v.step.rule, v.word.compact());
        }
        println!("  scope: {}", varietal::nfb::SCOPE_NOTE);
    }
    Ok(if passed { 0 } else { EXIT_FAILS })
}

fn sweep(seed: u64, count: usize, side: usize, letters: usize, cfg: &Config) -> Result<u8> {
    const NAMES: [&str; 8] = ["x", "y", "z", "t", "s", "r", "q", "p"];
    if letters == 0 || letters > NAMES.len() {
        bail!("--letters must be between 1 and {}", NAMES.len());
    }
    let alphabet: Vec<Letter> = NAMES[..letters].iter().map(|n| varietal::letter(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_word = |rng: &mut ChaCha8Rng| -> Word {
        let len = rng.gen_range(0..=side);
        (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    };
    let b = cfg.bounds();
    let mut violations = Vec::new();
    let mut tally = std::collections::BTreeMap::<VarietyId, [usize; 3]>::new();
    for _ in 0..count {
        let id = Identity::new(random_word(&mut rng), random_word(&mut rng));
        let c = classify(&id, &b, cfg.trunc);
        for (v, s) in &c.statuses {
            let slot = match s.verdict {
                Verdict::Holds => 0,
                Verdict::Fails => 1,
                Verdict::Unknown => 2,
            };
            tally.entry(*v).or_default()[slot] += 1;
        }
        for (v, w) in c.antitonicity_violations() {
            violations.push((id.clone(), v, w));
        }
    }
    if cfg.json {
        let counts: serde_json::Map<_, _> = tally
            .iter()
            .map(|(v, [h, f, u])| (v.token().to_string(), json!({"Holds": h, "Fails": f, "Unknown": u})))
            .collect();
        let bad: Vec<_> = violations
            .iter()
            .map(|(id, v, w)| json!({"identity": id.to_string(), "below": v.token(), "above": w.token()}))
            .collect();
        emit(json!({"seed": seed, "count": count, "bounds": b, "trunc": cfg.trunc, "verdicts": counts, "violations": bad}));
    } else {
        println!("{count} identities, seed {seed}, {b}, trunc {}", cfg.trunc);
        for (v, [h, f, u]) in &tally {
            println!("  {:<5} holds {h:>5}  fails {f:>5}  unknown {u:>5}", v.token());
        }
        println!("{} antitonicity violation(s)", violations.len());
        for (id, v, w) in &violations {
            println!("  {}: Holds at {w} but not at {v}", id.pretty());
        }
    }
    Ok(if violations.is_empty() { 0 } else { EXIT_FAILS })
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("VARIETAL_THREADS") {
        let n: usize = value.parse().with_context(|| format!("VARIETAL_THREADS={value} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    configure_threads()?;
    let cfg = &cli.config;
    let explicit_bounds = std::env::args().any(|a| a.starts_with("--steps") || a.starts_with("--len"));
    match &cli.command {
        Command::Decompose { word } => decompose(word, cfg),
        Command::Check { variety, identity } => check(*variety, identity, cfg),
        Command::Classify { identity } => classify_cmd(identity, cfg),
        Command::Derive { identity, system } => derive_cmd(identity, system, cfg),
        Command::ModelCheck { model, identity } => model_check(model, identity, cfg),
        Command::Models => models(cfg),
        Command::Family { kind, n, perm, p, l } => family(*kind, *n, perm.as_deref(), *p, l.as_deref(), cfg),
        Command::Nfb { experiment } => nfb(experiment, cfg, explicit_bounds),
        Command::Sweep { seed, count, side, letters } => sweep(*seed, *count, *side, *letters, cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILS)
        }
    }
}
