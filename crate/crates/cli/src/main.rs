use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cdtk::analysis::{self, AnalysisOptions, Budget, Concordance};
use cdtk::formats::corpus::{parse_corpus, print_corpus, Corpus};
use cdtk::formats::json::{proof_from_json, proof_to_json};
use cdtk::formats::tptp::{parse_tptp_cd, print_tptp_cd};
use cdtk::formats::{dnotation, polish};
use cdtk::levels::{count_upto, Measure};
use cdtk::prover::{self, Dedup, EnumPolicy, PolicyKind, ProveOutcome};
use cdtk::reduce::{normalize, NormalizeOptions, ReductionKind};
use cdtk::semantics::{check_proof, lemma_mgts, mgt};
use cdtk::{AxiomAssignment, DTerm, Error, FTerm, PrimLabel, Problem};

const EXIT_NOT_PROVEN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "cdtk", version, about = "Condensed detachment proofs: theorems, reductions, analysis and search")]
struct Cli {
    /// Worker threads for analysis and search (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Most general theorem of a D-term.
    Mgt {
        /// Axiom in Polish notation, as `label=FORMULA` or just `FORMULA`
        /// (numbered from 1). Repeatable.
        #[arg(long = "axiom", required_unless_present = "corpus")]
        axioms: Vec<String>,
        /// Take axioms and labels from a corpus file.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// D-term in D-notation.
        #[arg(long)]
        d: String,
    },
    /// Check the roots of a proof, optionally against a problem's goal.
    Check { proof: PathBuf, problem: Option<PathBuf> },
    /// Property table of all subproofs.
    Analyze {
        proof: PathBuf,
        /// Skip the S- and C-regularity columns.
        #[arg(long)]
        no_regularity: bool,
        /// Exhaustive search bound for minimal compacted size.
        #[arg(long, default_value_t = 6)]
        max_csize: usize,
        /// Exhaustive search bound for minimal tree size.
        #[arg(long, default_value_t = 9)]
        max_tsize: usize,
    },
    /// Normalize every root under the given reductions.
    Reduce {
        proof: PathBuf,
        /// Comma-separated reduction kinds: n, IS, MS, S, MC, C.
        #[arg(long, default_value = "S,C", value_delimiter = ',')]
        kinds: Vec<ReductionKind>,
        /// Re-run n-simplification at the end.
        #[arg(long)]
        restore_n: bool,
        #[arg(long, env = "CDTK_MAX_STEPS", default_value_t = 100_000)]
        max_steps: usize,
        /// Only report regularity; exit 1 if some root is reducible.
        #[arg(long)]
        check: bool,
    },
    /// Search for a proof of a TPTP problem.
    Prove {
        problem: PathBuf,
        #[arg(long, default_value = "psp")]
        policy: PolicyKind,
        #[arg(long, default_value_t = 40)]
        max_level: usize,
        #[arg(long)]
        max_ft: Option<u64>,
        #[arg(long)]
        max_fh: Option<u32>,
        #[arg(long)]
        max_fv: Option<usize>,
        #[arg(long, default_value = "subsumption")]
        dedup: Dedup,
        #[arg(long, env = "CDTK_CACHE_CAP")]
        cache_cap: Option<usize>,
        /// Try `n` as minor premise.
        #[arg(long)]
        use_n: bool,
        /// Time limit in seconds.
        #[arg(long, env = "CDTK_TIMEOUT")]
        timeout: Option<f64>,
    },
    /// Number of D-terms per level.
    Count {
        #[arg(long)]
        measure: Measure,
        #[arg(long)]
        upto: usize,
    },
    /// Convert between notations.
    Convert {
        #[arg(long)]
        from: Notation,
        #[arg(long)]
        to: Notation,
        /// Input text, or a file path for corpus, json and tptp.
        input: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Notation {
    /// Formula in Polish notation.
    Polish,
    /// Formula as a first-order term `i(p,q)`.
    Term,
    /// D-term in D-notation.
    Dnotation,
    /// D-term as nested `D(a,b)`.
    Functional,
    Corpus,
    Json,
    Tptp,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit(_) => EXIT_LIMIT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<cdtk::ParseError> for Failure {
    fn from(e: cdtk::ParseError) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

// A closed pipe (`cdtk ... | head`) ends the run quietly.
fn write_failure(e: std::io::Error) -> Failure {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        Failure { code: 0, message: String::new() }
    } else {
        usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_proof(path: &Path) -> Result<Corpus, Failure> {
    let src = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let j = proof_from_json(&src)?;
        let goals = if j.roots.is_empty() { j.proof.roots() } else { j.roots };
        Ok(Corpus {
            axioms: j.axioms,
            proof: j.proof,
            goals,
            formulas: Default::default(),
        })
    } else {
        Ok(parse_corpus(&src)?)
    }
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    let src = read(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(parse_tptp_cd(&src, &name)?)
}

fn parse_axioms(specs: &[String]) -> Result<AxiomAssignment, Failure> {
    let mut alpha = AxiomAssignment::new();
    for (k, s) in specs.iter().enumerate() {
        let (label, formula) = match s.split_once('=') {
            Some((l, f)) => (PrimLabel::new(l.trim()), f.trim()),
            None => (PrimLabel::from(k as u32 + 1), s.trim()),
        };
        alpha.insert(label, &polish::parse_formula(formula, &HashSet::new())?);
    }
    Ok(alpha)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    let w = |out: &mut dyn Write, s: &str| out.write_all(s.as_bytes()).map_err(write_failure);
    match cli.command {
        Command::Mgt { axioms, corpus, d } => {
            let mut alpha = match &corpus {
                Some(p) => load_proof(p)?.axioms,
                None => AxiomAssignment::new(),
            };
            let given = parse_axioms(&axioms)?;
            for l in given.labels() {
                alpha.insert(l.clone(), given.formula(l).expect("axiom"));
            }
            let mut term = dnotation::parse(&d)?;
            if let Some(p) = &corpus {
                // Labels of the corpus may be used inside the D-term.
                let c = load_proof(p)?;
                let expanded = c.proof.expand_all()?;
                term = term.substitute_prims(&|l| expanded.get(l).cloned());
            }
            match mgt(&term, &alpha)? {
                Some(f) => {
                    let text = match cli.format {
                        Format::Json => json!({"dterm": dnotation::print(&term), "mgt": polish::print_polish(&f), "term": f.to_string()}).to_string(),
                        _ => polish::print_polish(&f),
                    };
                    w(out, &format!("{text}\n"))?;
                    Ok(0)
                }
                None => {
                    w(out, "undefined\n")?;
                    Ok(EXIT_NOT_PROVEN)
                }
            }
        }
        Command::Check { proof, problem } => {
            let c = load_proof(&proof)?;
            let problem = match &problem {
                Some(p) => load_problem(p)?,
                None => Problem::new("proof", c.axioms.clone(), None)?,
            };
            let verdicts = check_proof(&c.proof, &problem)?;
            let expanded = c.proof.expanded_roots()?;
            let mut any = problem.goal.is_none();
            let mut rows = Vec::new();
            for (v, (_, d)) in verdicts.iter().zip(&expanded) {
                let s = d.measure();
                any |= v.proves_goal == Some(true);
                rows.push((v, s));
            }
            match cli.format {
                Format::Json => {
                    let arr: Vec<_> = rows
                        .iter()
                        .map(|(v, s)| {
                            json!({"root": v.label.to_string(), "mgt": v.mgt.as_ref().map(polish::print_polish),
                                   "proves_goal": v.proves_goal, "c_size": s.c_size, "t_size": s.t_size, "height": s.height})
                        })
                        .collect();
                    w(out, &format!("{}\n", serde_json::Value::Array(arr)))?;
                }
                Format::Csv => {
                    w(out, "root,mgt,proves_goal,c_size,t_size,height\n")?;
                    for (v, s) in &rows {
                        let m = v.mgt.as_ref().map(polish::print_polish).unwrap_or_default();
                        let p = v.proves_goal.map(|b| b.to_string()).unwrap_or_default();
                        w(out, &format!("{},{m},{p},{},{},{}\n", v.label, s.c_size, s.t_size, s.height))?;
                    }
                }
                Format::Text => {
                    for (v, s) in &rows {
                        let m = v.mgt.as_ref().map(polish::print_polish).unwrap_or_else(|| "undefined".into());
                        let status = match v.proves_goal {
                            Some(true) => "proven ",
                            Some(false) => "not proven ",
                            None => "",
                        };
                        w(out, &format!("{}: {status}{m} sizes {}/{}/{}\n", v.label, s.c_size, s.t_size, s.height))?;
                    }
                }
            }
            Ok(if any { 0 } else { EXIT_NOT_PROVEN })
        }
        Command::Analyze {
            proof,
            no_regularity,
            max_csize,
            max_tsize,
        } => {
            let c = load_proof(&proof)?;
            let concordance = Concordance::standard();
            let opts = AnalysisOptions {
                budget: Budget { max_csize, max_tsize },
                concordance: Some(&concordance),
                skip_regularity: no_regularity,
                ..Default::default()
            };
            let rows = analysis::analyze(&c.proof, &c.axioms, &opts)?;
            let text = match cli.format {
                Format::Text => analysis::to_text(&rows),
                Format::Csv => analysis::to_csv(&rows)?,
                Format::Json => format!("{}\n", analysis::to_json(&rows)),
            };
            w(out, &text)?;
            Ok(0)
        }
        Command::Reduce {
            proof,
            kinds,
            restore_n,
            max_steps,
            check,
        } => {
            let c = load_proof(&proof)?;
            let opts = NormalizeOptions {
                kinds,
                restore_n,
                max_steps,
            };
            let mut roots = Vec::new();
            let mut trace = Vec::new();
            let mut reducible = false;
            for (l, d) in c.proof.expanded_roots()? {
                let (nf, steps) = normalize(&d, &c.axioms, &opts)?;
                reducible |= !steps.is_empty();
                for s in &steps {
                    trace.push(json!({"root": l.to_string(), "kind": s.kind.to_string(),
                        "replacement": dnotation::print(&s.replacement), "before": s.before, "after": s.after}));
                }
                roots.push((l, d, nf, steps.len()));
            }
            if check {
                for (l, _, _, n) in &roots {
                    w(out, &format!("{l}: {}\n", if *n == 0 { "regular" } else { "reducible" }))?;
                }
                return Ok(if reducible { EXIT_NOT_PROVEN } else { 0 });
            }
            let pairs: Vec<(PrimLabel, DTerm)> = roots.iter().map(|(l, _, nf, _)| (l.clone(), nf.clone())).collect();
            let start = c.axioms.labels().filter_map(|l| l.as_number()).max().unwrap_or(0) + 1;
            let delta = cdtk::compacted::compact_numbered(&pairs, start);
            let formulas = lemma_mgts(&delta, &c.axioms)?
                .into_iter()
                .filter_map(|(l, m)| m.map(|m| (l, m)))
                .collect();
            let reduced = Corpus {
                axioms: c.axioms.clone(),
                goals: pairs.iter().map(|p| p.0.clone()).collect(),
                proof: delta,
                formulas,
            };
            match cli.format {
                Format::Json => {
                    let mut v = proof_to_json(&reduced.axioms, &reduced.proof, &reduced.goals);
                    v["trace"] = serde_json::Value::Array(trace);
                    w(out, &format!("{v}\n"))?;
                }
                _ => {
                    for (l, d, nf, n) in &roots {
                        let (a, b) = (d.measure(), nf.measure());
                        w(out, &format!(
                            "# {l}: {n} steps, sizes {}/{}/{} -> {}/{}/{}\n",
                            a.c_size, a.t_size, a.height, b.c_size, b.t_size, b.height
                        ))?;
                    }
                    w(out, &print_corpus(&reduced))?;
                }
            }
            Ok(0)
        }
        Command::Prove {
            problem,
            policy,
            max_level,
            max_ft,
            max_fh,
            max_fv,
            dedup,
            cache_cap,
            use_n,
            timeout,
        } => {
            let p = load_problem(&problem)?;
            if timeout.is_some_and(|t| !(t > 0.0)) {
                return Err(usage("--timeout must be positive"));
            }
            let mut pol = EnumPolicy::new(policy, max_level);
            pol.thresholds.max_ft = max_ft;
            pol.thresholds.max_fh = max_fh;
            pol.thresholds.max_fv = max_fv;
            pol.dedup = dedup;
            pol.cache_cap = cache_cap;
            pol.use_n = use_n;
            pol.timeout = timeout.map(Duration::from_secs_f64);
            match prover::prove(&p, &pol)? {
                ProveOutcome::Proved(r) => {
                    let root = r.delta.roots();
                    let formulas = lemma_mgts(&r.delta, &p.axioms)?
                        .into_iter()
                        .filter_map(|(l, m)| m.map(|m| (l, m)))
                        .collect();
                    let c = Corpus {
                        axioms: p.axioms.clone(),
                        proof: r.delta.clone(),
                        goals: root.clone(),
                        formulas,
                    };
                    match cli.format {
                        Format::Json => {
                            let mut v = proof_to_json(&c.axioms, &c.proof, &root);
                            v["sizes"] = json!(r.sizes);
                            v["level"] = json!(r.level);
                            v["stats"] = json!(r.stats);
                            w(out, &format!("{v}\n"))?;
                        }
                        _ => {
                            w(out, &format!(
                                "# {}: proved at level {}, sizes {}/{}/{}\n",
                                p.name, r.level, r.sizes.c_size, r.sizes.t_size, r.sizes.height
                            ))?;
                            w(out, &print_corpus(&c))?;
                        }
                    }
                    Ok(0)
                }
                ProveOutcome::Exhausted(stats) => {
                    eprintln!("no proof found within {} levels", stats.len().saturating_sub(1));
                    Ok(EXIT_NOT_PROVEN)
                }
            }
        }
        Command::Count { measure, upto } => {
            let counts = count_upto(measure, upto)?;
            let text: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            match cli.format {
                Format::Json => w(out, &format!("{}\n", json!(text)))?,
                Format::Csv => {
                    w(out, "n,count\n")?;
                    for (n, c) in text.iter().enumerate() {
                        w(out, &format!("{n},{c}\n"))?;
                    }
                }
                Format::Text => w(out, &format!("{}\n", text.join(" ")))?,
            }
            Ok(0)
        }
        Command::Convert { from, to, input } => {
            let none = HashSet::new();
            let text = match (from, to) {
                (Notation::Polish | Notation::Term, Notation::Polish | Notation::Term) => {
                    let f: FTerm = polish::parse_formula(&input, &none)?;
                    if to == Notation::Polish {
                        polish::print_polish(&f)
                    } else {
                        f.to_string()
                    }
                }
                (Notation::Dnotation | Notation::Functional, Notation::Dnotation | Notation::Functional) => {
                    let d = dnotation::parse(&input)?;
                    if to == Notation::Dnotation {
                        dnotation::print(&d)
                    } else {
                        dnotation::print_functional(&d)
                    }
                }
                (Notation::Corpus | Notation::Json, Notation::Corpus | Notation::Json) => {
                    let c = load_proof(Path::new(&input))?;
                    if to == Notation::Json {
                        proof_to_json(&c.axioms, &c.proof, &c.goals).to_string()
                    } else {
                        print_corpus(&c).trim_end().to_string()
                    }
                }
                (Notation::Tptp, Notation::Tptp) => print_tptp_cd(&load_problem(Path::new(&input))?).trim_end().to_string(),
                (Notation::Tptp, Notation::Json) => {
                    let p = load_problem(Path::new(&input))?;
                    let ax: serde_json::Map<String, serde_json::Value> = p
                        .axioms
                        .labels()
                        .map(|l| (l.to_string(), json!(polish::print_polish(p.axioms.formula(l).expect("axiom")))))
                        .collect();
                    json!({"name": p.name, "axioms": ax, "goal": p.goal.as_ref().map(|g| g.to_string())}).to_string()
                }
                _ => return Err(usage("unsupported conversion")),
            };
            w(out, &format!("{text}\n"))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("thread pool");
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
