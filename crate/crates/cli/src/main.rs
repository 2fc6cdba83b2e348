use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use algmod::algebra::{make_bullet, make_monogenic, make_split};
use algmod::bounds::{bound_reports, bounds_csv};
use algmod::deform::{lift_obstruction, make_pi_example, singularity_report, LiftOutcome, Space};
use algmod::enumerate::{census, classes_to_csv, classify, CellOrder, ClassifyOptions};
use algmod::exactla::MatrixJson;
use algmod::localstruct::{extract_canonical, reconstruct, CanonicalData};
use algmod::ringlift::{bound_check, check_injectivity, enumerate_rings, to_fp_algebra};
use algmod::symmetry::{act, automorphisms, isomorphic, InvertibleMatrix};
use algmod::{validate, BasedAlgebra, Budget, Error, StructureTable, Zn};

#[derive(Parser)]
#[command(
    name = "algmod",
    version,
    about = "Based commutative algebras of finite rank over F_p"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    B,
    B1,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedOrder {
    Lex,
    Reversed,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining identities of a table.
    Validate { algebra: String },
    /// Discriminant of the trace form.
    Disc { algebra: String },
    /// Apply an invertible matrix to a table.
    Act {
        #[arg(long)]
        matrix: PathBuf,
        algebra: String,
    },
    /// Search for an isomorphism between two tables.
    Iso { first: String, second: String },
    /// Automorphism group of a table.
    Aut {
        algebra: String,
        /// Print every automorphism, not only the count.
        #[arg(long)]
        list: bool,
    },
    /// Isomorphism classes of rank-n algebras over F_q.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        full_sweep: bool,
        #[arg(long, value_enum, default_value_t = SeedOrder::Lex)]
        seed_order: SeedOrder,
    },
    /// Counts of tables and classes.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
    /// Tangent space dimension at a point.
    Tangent {
        /// `bullet`, `split` or a table file.
        #[arg(long)]
        point: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = SpaceArg::B1)]
        space: SpaceArg,
    },
    /// Lift a table from Z/p^2 to Z/p^3.
    LiftCheck {
        #[arg(long)]
        p: u64,
        /// `pi`, `split:N` or a table file over Z/p^2.
        #[arg(long, default_value = "pi")]
        point: String,
    },
    /// Dimension lower bounds for 1 <= n <= n_max.
    Bounds {
        #[arg(long)]
        n_max: u64,
    },
    /// Canonical data of a local algebra, or the table rebuilt from it.
    Canonical {
        input: String,
        #[arg(long)]
        reconstruct: bool,
    },
    /// Commutative rings of order p^n.
    Rings {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        /// Also run the injectivity and counting checks.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type Outcome = Result<(String, bool), Failure>;

fn prime_field(q: u64) -> Result<Zn, Failure> {
    Ok(Zn::prime_field(q)?)
}

/// A table file, or `bullet:N:Q`, `split:N:Q`, `mono:Q:f0,f1,...`.
fn load_table(spec: &str) -> Result<StructureTable, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| Failure::Usage(format!("bad number '{s}' in '{spec}'")))
    };
    match parts.as_slice() {
        ["bullet", n, q] => Ok(make_bullet(prime_field(num(q)?)?, num(n)? as usize)?.into_table()),
        ["split", n, q] => Ok(make_split(prime_field(num(q)?)?, num(n)? as usize)?.into_table()),
        ["mono", q, f] => {
            let coeffs = f.split(',').map(num).collect::<Result<Vec<u64>, _>>()?;
            Ok(make_monogenic(prime_field(num(q)?)?, &coeffs)?.into_table())
        }
        _ => {
            let text = fs::read_to_string(spec)
                .map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
            Ok(StructureTable::from_json(&text)?)
        }
    }
}

fn load_algebra(spec: &str) -> Result<BasedAlgebra, Failure> {
    Ok(BasedAlgebra::new(load_table(spec)?)?)
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn matrix_json(m: &InvertibleMatrix) -> Value {
    serde_json::to_value(m.matrix().to_serde()).expect("serializable")
}

fn run(cli: &Cli, budget: Budget) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { algebra } => {
            let t = load_table(algebra)?;
            match validate(t) {
                Ok(_) => Ok(("valid".into(), true)),
                Err(v) => Ok((
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join("\n"),
                    false,
                )),
            }
        }
        Command::Disc { algebra } => {
            let a = load_algebra(algebra)?;
            let d = a.discriminant();
            Ok((
                match fmt {
                    Format::Json => pretty(
                        &json!({"discriminant": d.value(), "modulus": d.modulus(), "etale": a.is_etale()}),
                    ),
                    Format::Csv => format!("discriminant,etale\n{},{}", d.value(), a.is_etale()),
                    Format::Text => d.value().to_string(),
                },
                true,
            ))
        }
        Command::Act { matrix, algebra } => {
            let a = load_algebra(algebra)?;
            let rows: MatrixJson = serde_json::from_str(&read_file(&matrix.to_string_lossy())?)
                .map_err(Error::from)?;
            let m = InvertibleMatrix::new(rows.into_matrix(a.ring())?)?;
            Ok((act(&m, &a)?.table().to_json(), true))
        }
        Command::Iso { first, second } => {
            let (a, b) = (load_algebra(first)?, load_algebra(second)?);
            match isomorphic(&a, &b, budget)? {
                Some(m) => Ok((
                    serde_json::to_string(&matrix_json(&m)).expect("serializable"),
                    true,
                )),
                None => Ok(("not isomorphic".into(), false)),
            }
        }
        Command::Aut { algebra, list } => {
            let a = load_algebra(algebra)?;
            let auts = automorphisms(&a, budget)?;
            let out = match (fmt, list) {
                (Format::Json, _) => pretty(&json!({
                    "order": auts.len(),
                    "automorphisms": if *list { auts.iter().map(matrix_json).collect::<Vec<_>>() } else { Vec::new() },
                })),
                (_, true) => {
                    let mut lines = vec![auts.len().to_string()];
                    lines
                        .extend(auts.iter().map(|m| {
                            serde_json::to_string(&matrix_json(m)).expect("serializable")
                        }));
                    lines.join("\n")
                }
                (_, false) => auts.len().to_string(),
            };
            Ok((out, true))
        }
        Command::Classify {
            n,
            q,
            full_sweep,
            seed_order,
        } => {
            let opts = ClassifyOptions {
                order: match seed_order {
                    SeedOrder::Lex => CellOrder::Lexicographic,
                    SeedOrder::Reversed => CellOrder::Reversed,
                },
                full_sweep: *full_sweep,
            };
            let classes = classify(*n, *q, &opts, budget)?;
            let out = match fmt {
                Format::Json => pretty(&Value::Array(
                    classes
                        .iter()
                        .map(|c| {
                            json!({
                                "class_id": c.class_id,
                                "aut_order": c.aut_order.to_string(),
                                "orbit_size": c.orbit_size.to_string(),
                                "delta_nonzero": c.signature.delta_nonzero,
                                "is_local": c.signature.is_local,
                                "filtration": c.signature.filtration,
                                "idempotents": c.signature.idempotents,
                                "representative": c.representative.table().to_json_value(),
                            })
                        })
                        .collect(),
                )),
                _ => classes_to_csv(*n, *q, &classes).trim_end().to_string(),
            };
            Ok((out, true))
        }
        Command::Census { n, q } => {
            let classes = classify(*n, *q, &ClassifyOptions::default(), budget)?;
            let c = census(*n, *q, &classes);
            let out = match fmt {
                Format::Json => pretty(&json!({
                    "n": c.n, "q": c.q, "valid_tables": c.valid_tables.to_string(), "h_order": c.h_order.to_string(),
                    "classes": c.classes, "etale_classes": c.etale_classes, "local_classes": c.local_classes,
                })),
                _ => format!(
                    "n,q,valid_tables,h_order,classes,etale_classes,local_classes\n{},{},{},{},{},{},{}",
                    c.n, c.q, c.valid_tables, c.h_order, c.classes, c.etale_classes, c.local_classes
                ),
            };
            Ok((out, true))
        }
        Command::Tangent { point, n, q, space } => {
            let a = match point.as_str() {
                "bullet" | "split" => {
                    let (Some(n), Some(q)) = (n, q) else {
                        return Err(Failure::Usage(format!("--point {point} needs --n and --q")));
                    };
                    load_algebra(&format!("{point}:{n}:{q}"))?
                }
                file => load_algebra(file)?,
            };
            let space = match space {
                SpaceArg::B => Space::B,
                SpaceArg::B1 => Space::B1,
            };
            let r = singularity_report(&a, space)?;
            let verdict = format!("{:?}", r.verdict);
            let out = match fmt {
                Format::Json => pretty(&json!({
                    "n": r.n, "tangent_dim": r.tangent_dim, "component_floor": r.component_floor,
                    "known_dimension": r.known_dimension, "verdict": verdict,
                })),
                Format::Csv => format!(
                    "n,tangent_dim,component_floor,known_dimension,verdict\n{},{},{},{},{}",
                    r.n,
                    r.tangent_dim,
                    r.component_floor,
                    r.known_dimension.map(|d| d.to_string()).unwrap_or_default(),
                    verdict
                ),
                Format::Text => r.tangent_dim.to_string(),
            };
            Ok((out, true))
        }
        Command::LiftCheck { p, point } => {
            let t = match point.split(':').collect::<Vec<_>>().as_slice() {
                ["pi"] => make_pi_example(*p)?,
                ["split", n] => {
                    let n = n
                        .parse()
                        .map_err(|_| Failure::Usage(format!("bad rank in '{point}'")))?;
                    make_split(Zn::new(p * p)?, n)?.into_table()
                }
                _ => load_table(point)?,
            };
            match lift_obstruction(&t)? {
                LiftOutcome::Feasible(w) => Ok((
                    match fmt {
                        Format::Json => {
                            pretty(&json!({"feasible": true, "witness": w.to_json_value()}))
                        }
                        _ => format!("feasible\n{}", w.to_json()),
                    },
                    true,
                )),
                LiftOutcome::Infeasible { certificate } => {
                    let cert: Vec<(String, u64)> = certificate
                        .iter()
                        .map(|(e, y)| (e.to_string(), *y))
                        .collect();
                    Ok((
                        match fmt {
                            Format::Json => {
                                pretty(&json!({"feasible": false, "certificate": cert}))
                            }
                            _ => {
                                let mut lines = vec!["infeasible".to_string()];
                                lines.extend(cert.iter().map(|(e, y)| format!("{y} * {e}")));
                                lines.join("\n")
                            }
                        },
                        false,
                    ))
                }
            }
        }
        Command::Bounds { n_max } => {
            let reports = bound_reports(*n_max)?;
            let out = match fmt {
                Format::Json => pretty(&Value::Array(
                    reports
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n, "branch": r.branch, "lower_bound": r.lower_bound.to_string(),
                                "optimal_d": r.optimal_d, "etale_floor": r.etale_floor().to_string(),
                                "max_of": r.max_of().to_string(),
                            })
                        })
                        .collect(),
                )),
                _ => bounds_csv(&reports).trim_end().to_string(),
            };
            Ok((out, true))
        }
        Command::Canonical {
            input,
            reconstruct: rebuild,
        } => {
            if *rebuild {
                let data = CanonicalData::from_json(&read_file(input)?)?;
                Ok((reconstruct(&data)?.table().to_json(), true))
            } else {
                let a = load_algebra(input)?;
                Ok((extract_canonical(&a, budget)?.to_json(), true))
            }
        }
        Command::Rings { p, n, check } => {
            let rings = enumerate_rings(*p, *n, budget)?;
            let mut out = match fmt {
                Format::Csv => {
                    let mut lines = vec!["p,n,index,a,characteristic".to_string()];
                    for (k, r) in rings.iter().enumerate() {
                        let a: Vec<String> = r.invariants().iter().map(|x| x.to_string()).collect();
                        lines.push(format!(
                            "{p},{n},{},{},{}",
                            k + 1,
                            a.join("-"),
                            r.characteristic()
                        ));
                    }
                    lines.join("\n")
                }
                Format::Json => pretty(&Value::Array(
                    rings
                        .iter()
                        .map(|r| serde_json::to_value(r.to_json_value()).expect("serializable"))
                        .collect(),
                )),
                Format::Text => {
                    let mut lines = vec![rings.len().to_string()];
                    lines.extend(rings.iter().map(|r| r.to_json()));
                    lines.join("\n")
                }
            };
            if !*check {
                return Ok((out, true));
            }
            for r in &rings {
                to_fp_algebra(r)?;
            }
            let injective = check_injectivity(&rings, budget)?;
            let b = bound_check(*p, *n, budget)?;
            out.push_str(&format!(
                "\ninjective {injective}\nbound {} <= {} * {} {}",
                b.rings, b.factor, b.algebra_classes, b.holds
            ));
            Ok((out, injective && b.holds))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli, Budget::from_env()) {
        Ok((out, positive)) => {
            println!("{out}");
            ExitCode::from(if positive { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
