use amalgam_engine::{check_amalgamation, fill_shell, reduce_cycle, EngineError, Site};
use clap::{Parser, Subcommand};
use homology_solver::{bounded_homology, HomologyError, DEFAULT_CAP};
use hurewicz::{epsilon2, h2, noncomm_check, EdgeSelection};
use instances::{parity_epsilon, RelKind, SiteHandle};
use serde_json::{json, Value};
use simplex_core::json::chain_to_value;
use simplex_core::{classify, validate_simplex, Convention, Kind};

use crate::fuzz;
use crate::io::{self, cert_from_value, cert_to_value, emit, input, shell_to_value, Failure};
use crate::suite;

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser, Debug)]
#[command(name = "amhom", version, about = "Homology of amalgamation functors on finite sites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// site descriptor: parity:4, tetra, dlo, groupoid:S3, tower:Z8>Z4>Z2, JSON, or a file
    #[arg(long, global = true)]
    pub site: Option<String>,
    /// input chain or certificate (JSON file, `-` for stdin)
    #[arg(long = "in", global = true)]
    pub input: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "unreduced", value_parser = parse_convention)]
    pub convention: Convention,
    /// most simplices enumerated per dimension
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// suite rows to run, by number or tag (h0, boundary, certificates, h2, tower, parity, tetra, dlo, oracle, noncomm)
    #[arg(long, global = true, value_delimiter = ',')]
    pub only: Vec<String>,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse::<Convention>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every simplex of a chain against the site's axioms.
    Validate,
    /// Print the boundary of a chain.
    Boundary,
    /// Name the shape of a chain: shell, fan, pocket, cycle, …
    Classify,
    /// Reduce a cycle to one shell on {0, …, n+1} with a certificate.
    Reduce,
    /// Homology of the normalized complex on a bounded universe.
    Homology {
        #[arg(long)]
        dim: i32,
        #[arg(long, default_value_t = 5)]
        universe: usize,
    },
    /// H₂ of a groupoid or tower site, with witnesses.
    H2,
    /// Hom-set automorphism report for a groupoid site.
    Noncomm {
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, default_value_t = 1)]
        b: u32,
    },
    /// Fuzz k-amalgamation.
    CheckAmalg {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Re-check ∂(bounding) = target for a certificate file.
    VerifyCertificate,
    /// Run the acceptance matrix.
    VerifySuite,
}

fn need<'a>(x: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    x.as_deref().ok_or_else(|| Failure::Input(format!("--{flag} is required")))
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::Obstruction(o) => Failure::Property(format!("obstruction: {o}")),
        EngineError::Precondition(m) => Failure::Input(m),
        other => Failure::Property(other.to_string()),
    }
}

fn homology_failure(e: HomologyError) -> Failure {
    match e {
        HomologyError::CapExceeded { .. } => Failure::Cap(e.to_string()),
        HomologyError::Engine(e) => engine_failure(e),
        other => Failure::Input(other.to_string()),
    }
}

/// Short invariant of a cycle where the site has one.
fn invariant(h: &SiteHandle, c: &simplex_core::Chain) -> Value {
    match h {
        SiteHandle::Tower(t) if c.dim() == 2 => match epsilon2(c, t, EdgeSelection::Least) {
            Ok(e) => json!({ "epsilon": e.levels }),
            Err(e) => json!({ "epsilon_error": e.to_string() }),
        },
        SiteHandle::Rel(r) if matches!(r.kind, RelKind::Parity(k) if k as i32 == c.dim() + 1) => json!({ "parity": parity_epsilon(c) }),
        _ => Value::Null,
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Validate => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let c = io::read_chain(need(&cli.input, "in")?)?;
            let s: &dyn Site = h.site();
            let mut bad = 0;
            let mut rows = Vec::new();
            for (i, (f, k)) in c.terms().enumerate() {
                let rep = validate_simplex(f, s);
                bad += usize::from(!rep.ok());
                rows.push(json!({ "term": i, "coef": k, "ok": rep.ok(), "violations": rep.violations }));
            }
            emit(out, &json!({ "kind": classify(&c, cli.convention).to_string(), "terms": rows }))?;
            if bad > 0 {
                return Err(Failure::Property(format!("{bad} simplices violate the site axioms")));
            }
            Ok(())
        }
        Command::Boundary => {
            let c = io::read_chain(need(&cli.input, "in")?)?;
            emit(out, &chain_to_value(&c.boundary(cli.convention)))
        }
        Command::Classify => {
            let c = io::read_chain(need(&cli.input, "in")?)?;
            emit(out, &json!({ "kind": classify(&c, cli.convention).to_string(), "dim": c.dim(), "terms": c.len() }))
        }
        Command::Reduce => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let c = io::read_chain(need(&cli.input, "in")?)?;
            if classify(&c, Convention::Unreduced) != Kind::Cycle && !c.boundary(Convention::Unreduced).is_zero() {
                return Err(Failure::Input("input is not a cycle".into()));
            }
            let s = h.site();
            let r = reduce_cycle(s, &c).map_err(engine_failure)?;
            let (trivial, witness) = match &r.shell {
                None => (true, Value::Null),
                Some(sh) => match fill_shell(s, sh) {
                    Ok((_, cert)) => (true, cert_to_value(&cert)),
                    Err(EngineError::Obstruction(o)) => (false, json!({ "obstruction": o.reason })),
                    Err(e) => return Err(engine_failure(e)),
                },
            };
            let shell = r.shell.as_ref().map_or(Value::Null, shell_to_value);
            let inv = r.shell.as_ref().map_or(Value::Null, |sh| invariant(&h, &sh.chain()));
            eprintln!("trivial class: {trivial}");
            if !inv.is_null() {
                eprintln!("invariant: {inv}");
            }
            emit(out, &json!({ "shell": shell, "certificate": cert_to_value(&r.cert), "trivial": trivial, "fill": witness, "invariant": inv }))
        }
        Command::Homology { dim, universe } => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let g = bounded_homology(h.site(), *universe, *dim, cli.convention, cli.cap).map_err(homology_failure)?;
            emit(out, &json!({ "dim": dim, "universe": universe, "convention": format!("{:?}", cli.convention).to_lowercase(), "group": g.to_string(), "presentation": g }))
        }
        Command::H2 => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let t = h.tower().ok_or_else(|| Failure::Input("h2 needs a groupoid or tower site".into()))?;
            let r = h2(t).map_err(|e| Failure::Property(e.to_string()))?;
            println!("H2 = {}", r.group);
            let witnesses: Vec<Value> = r
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "value": w.value.levels,
                        "pocket_epsilon": w.pocket_epsilon.levels,
                        "shell": shell_to_value(&w.shell),
                        "shell_certificate": cert_to_value(&w.shell_cert),
                        "fill": w.fill.as_ref().map(cert_to_value),
                        "obstruction": w.obstruction,
                        "consistent": w.is_consistent(),
                    })
                })
                .collect();
            if let Some(p) = out {
                emit(Some(p), &json!({ "group": r.group.to_string(), "presentation": r.group, "witnesses": witnesses }))?;
            }
            if !r.all_consistent() {
                return Err(Failure::Property("some witness disagrees with its class".into()));
            }
            Ok(())
        }
        Command::Noncomm { a, b } => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let t = h.tower().ok_or_else(|| Failure::Input("noncomm needs a groupoid site".into()))?;
            let r = noncomm_check(t, *a, *b).map_err(input)?;
            println!("{r}");
            if let Some(p) = out {
                emit(Some(p), &serde_json::to_value(&r).expect("report serializes"))?;
            }
            if !r.passes() {
                return Err(Failure::Property("report has a failing column".into()));
            }
            Ok(())
        }
        Command::CheckAmalg { k, trials } => {
            let h = io::load_site(need(&cli.site, "site")?)?;
            let mut rng = fuzz::rng(cli.seed, 0);
            let r = check_amalgamation(h.site(), *k, *trials, &mut rng).map_err(engine_failure)?;
            let ce = r.counterexample.as_ref().map_or(Value::Null, shell_to_value);
            emit(out, &json!({ "k": r.k, "trials": r.trials, "filled": r.filled, "counterexample": ce }))
        }
        Command::VerifyCertificate => {
            let cert = cert_from_value(&io::read_json(need(&cli.input, "in")?)?)?;
            let ok = cert.check() && fuzz::oracle_check(&cert);
            println!("{}", if ok { "certificate verified" } else { "certificate FAILS" });
            if ok {
                Ok(())
            } else {
                Err(Failure::Property("∂(bounding) ≠ target".into()))
            }
        }
        Command::VerifySuite => {
            let rows = suite::run_suite(cli.seed, &cli.only);
            for r in &rows {
                println!("criterion {:>2} [{}] {}: {}", r.id, if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
                eprintln!("criterion {:>2} took {} ms", r.id, r.millis);
            }
            let summary: Vec<Value> = rows.iter().map(|r| json!({ "id": r.id, "name": r.name, "pass": r.pass, "detail": r.detail })).collect();
            let all = rows.iter().all(|r| r.pass);
            emit(out, &json!({ "seed": cli.seed, "all_pass": all, "rows": summary }))?;
            if !all {
                return Err(Failure::Property("some criteria failed".into()));
            }
            Ok(())
        }
    }
}
