//! Command line front end for the rooted-tree Hopf algebra library.
//!
//! Every verb maps to one library operation or invariant suite. Plain
//! text output uses the same grammars the library parses; `--format
//! json` emits stable records tagged `"format": "treehopf/1"` instead.
//! Exit codes: 0 on success, 1 when an invariant suite or verification
//! fails, 2 on parse or usage errors.

mod io;
mod suites;

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;
use treehopf::comodule::{self, ComoduleError};
use treehopf::growth::{self, ChainKey, PrimRef};
use treehopf::hopf;
use treehopf::lie::{self, LieElement};
use treehopf::morphisms::{self, GrElement, MorphismError};
use treehopf::primitives;
use treehopf::renorm::{self, RenormExpression};
use treehopf::{AlgebraElement, ParseError, RootedTree, TensorElement};

use crate::io::FORMAT;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Comodule(#[from] ComoduleError),
    #[error("{0}")]
    Morphism(#[from] MorphismError),
    #[error("{0}")]
    Input(String),
}

#[derive(Parser)]
#[command(name = "treehopf", version, about = "Exact computations in the Hopf algebra of rooted trees")]
struct Cli {
    /// Output format: plain text, or versioned JSON records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Coproduct of an element, as a sum of two-slot tensors.
    Coproduct { element: String },
    /// Antipode of an element.
    Antipode { element: String },
    /// Natural growth of the first element along the second.
    Graft { scion: String, stock: String },
    /// Projection onto the totally primitive component.
    Pi1 { element: String },
    /// Least k killing the element under k-fold reduced coproducts.
    Degp { element: String },
    /// Scalar part plus components by grafting-chain length.
    Decompose { element: String },
    /// Basis of the totally primitive elements of one weight.
    PrimBasis {
        #[arg(default_value_t = 8)]
        weight: usize,
    },
    /// Table of forest counts and chain dimensions per weight.
    Dims {
        #[arg(default_value_t = 29)]
        max_weight: usize,
    },
    /// Lie bracket of two single-tree generators.
    Bracket { left: String, right: String },
    /// Duality pairing of a word of trees (joined by '.') with an element.
    Pair { word: String, element: String },
    /// Shuffle product of two chain keys like "1:0>2:0".
    Shuffle { left: String, right: String },
    /// Comodule constructions over JSON records.
    #[command(subcommand)]
    Comodule(ComoduleCmd),
    /// Coalgebra endomorphisms attached to primitive tree families.
    #[command(subcommand)]
    Endo(EndoCmd),
    /// The graded isomorphism onto the shuffle model.
    Xi {
        #[arg(long, default_value_t = 4)]
        max_weight: usize,
        /// Also verify invertibility, gradings, and the coproduct square.
        #[arg(long)]
        verify: bool,
    },
    /// Toy-model counterterm or renormalized expression of a tree.
    Renorm {
        tree: String,
        #[arg(long, value_enum, default_value_t = RenormForm::Renormalized)]
        form: RenormForm,
    },
    /// Run an invariant suite: hopf-axioms, roundtrip, tables, comodules, lie.
    Check {
        suite: String,
        #[arg(long)]
        max_weight: Option<usize>,
        /// Seed for randomized suites; printed for reproducibility.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ComoduleCmd {
    /// Structure matrix of a primitive family record (path or '-').
    Build { family: String },
    /// Check a structure matrix for coassociativity.
    Verify { structure: String },
    /// Recover the primitive family of a structure matrix.
    Extract { structure: String },
    /// Coinvariant flag dimensions, type, and adapted basis.
    Flag { structure: String },
    /// Block profile of a reduced family.
    Type { family: String },
    /// Act by a group record on a primitive family.
    Act { group: String, family: String },
}

#[derive(Subcommand)]
enum EndoCmd {
    /// Apply the endomorphism of a tree-family record to an element.
    Apply { family: String, element: String },
    /// Recover a tree family from a morphism record of tree images.
    Recover { images: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenormForm {
    Counterterm,
    Renormalized,
}

struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

impl Outcome {
    fn new(text: String, json: Value) -> Self {
        Outcome { text, json, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout();
            let written = match cli.format {
                Format::Text => writeln!(stdout, "{}", out.text),
                Format::Json => writeln!(stdout, "{}", out.json),
            };
            if let Err(e) = written {
                // A closed pipe (output into `head` etc) is not a failure.
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, CliError> {
    Ok(match command {
        Command::Coproduct { element } => {
            let d = hopf::coproduct(&element.parse()?);
            Outcome::new(d.to_string(), tensor_json(&d))
        }
        Command::Antipode { element } => element_out(&hopf::antipode(&element.parse()?)),
        Command::Graft { scion, stock } => {
            element_out(&growth::graft(&scion.parse()?, &stock.parse()?))
        }
        Command::Pi1 { element } => element_out(&growth::pi1(&element.parse()?)),
        Command::Degp { element } => {
            let d = growth::deg_p(&element.parse()?);
            let text = match d {
                Some(k) => k.to_string(),
                None => "undefined".into(),
            };
            Outcome::new(text, json!({ "format": FORMAT, "kind": "degp", "value": d }))
        }
        Command::Decompose { element } => {
            let dec = growth::decompose(&element.parse()?);
            let mut lines = vec![format!("scalar: {}", dec.scalar)];
            let mut parts = Map::new();
            for (len, part) in &dec.components {
                lines.push(format!("{len}: {part}"));
                parts.insert(len.to_string(), Value::String(part.to_string()));
            }
            Outcome::new(
                lines.join("\n"),
                json!({
                    "format": FORMAT,
                    "kind": "decomposition",
                    "scalar": dec.scalar.to_string(),
                    "components": parts,
                }),
            )
        }
        Command::PrimBasis { weight } => {
            let basis = primitives::primitive_basis(weight);
            let mut lines = vec![format!("weight {weight}: {} elements", basis.len())];
            let mut items = Vec::new();
            for (f, e) in basis.iter() {
                lines.push(format!("{f} => {e}"));
                items.push(json!({ "provenance": f.to_string(), "element": e.to_string() }));
            }
            Outcome::new(
                lines.join("\n"),
                json!({
                    "format": FORMAT,
                    "kind": "primitive-basis",
                    "weight": weight,
                    "elements": items,
                }),
            )
        }
        Command::Dims { max_weight } => {
            let table = primitives::dimension_table(max_weight);
            let mut rows = Vec::new();
            for n in 1..=max_weight {
                let chains: Vec<String> =
                    table.row(n).iter().map(|v| v.to_string()).collect();
                rows.push(json!({
                    "weight": n,
                    "forests": table.forests(n).to_string(),
                    "chains": chains,
                }));
            }
            Outcome::new(
                table.render().trim_end().to_string(),
                json!({
                    "format": FORMAT,
                    "kind": "dimension-table",
                    "max_weight": max_weight,
                    "rows": rows,
                }),
            )
        }
        Command::Bracket { left, right } => {
            let b = lie::bracket(
                &LieElement::from_tree(left.parse()?),
                &LieElement::from_tree(right.parse()?),
            );
            let terms: Vec<Value> = b
                .terms()
                .map(|(t, c)| json!({ "tree": t.to_string(), "coefficient": c.to_string() }))
                .collect();
            Outcome::new(
                b.to_string(),
                json!({
                    "format": FORMAT,
                    "kind": "lie-element",
                    "value": b.to_string(),
                    "terms": terms,
                }),
            )
        }
        Command::Pair { word, element } => {
            let r = lie::pair(&parse_word(&word)?, &element.parse()?);
            Outcome::new(
                r.to_string(),
                json!({ "format": FORMAT, "kind": "scalar", "value": r.to_string() }),
            )
        }
        Command::Shuffle { left, right } => {
            let s = morphisms::shuffle_product(
                &GrElement::from_chain(parse_chain_key(&left)?),
                &GrElement::from_chain(parse_chain_key(&right)?),
            );
            Outcome::new(s.to_string(), gr_json(&s))
        }
        Command::Comodule(cmd) => run_comodule(cmd)?,
        Command::Endo(cmd) => run_endo(cmd)?,
        Command::Xi { max_weight, verify } => {
            let xi = morphisms::xi_isomorphism(max_weight)?;
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            for w in 1..=max_weight {
                let dims = xi.v_dimensions(w);
                let shown: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                lines.push(format!("weight {w}: complement dimensions {}", shown.join(" ")));
                rows.push(json!({ "weight": w, "dims": dims }));
            }
            let mut ok = true;
            let report = if verify {
                let r = xi.verify();
                ok = r.all_ok();
                lines.push(format!("invertible: {}", r.invertible));
                lines.push(format!("weight preserved: {}", r.weight_preserved));
                lines.push(format!("primitive degree preserved: {}", r.degp_preserved));
                lines.push(format!("coproduct commutes: {}", r.coproduct_commutes));
                json!({
                    "invertible": r.invertible,
                    "weight_preserved": r.weight_preserved,
                    "degp_preserved": r.degp_preserved,
                    "coproduct_commutes": r.coproduct_commutes,
                })
            } else {
                Value::Null
            };
            Outcome {
                text: lines.join("\n"),
                json: json!({
                    "format": FORMAT,
                    "kind": "xi",
                    "max_weight": max_weight,
                    "complements": rows,
                    "report": report,
                }),
                ok,
            }
        }
        Command::Renorm { tree, form } => {
            let t: RootedTree = tree.parse()?;
            let (name, expr) = match form {
                RenormForm::Counterterm => ("counterterm", renorm::counterterm(&t)),
                RenormForm::Renormalized => ("renormalized", renorm::renormalized(&t)),
            };
            Outcome::new(expr.to_string(), renorm_json(&t, name, &expr))
        }
        Command::Check { suite, max_weight, seed } => {
            let seed = seed.unwrap_or(suites::DEFAULT_SEED);
            match panic::catch_unwind(AssertUnwindSafe(|| suites::run(&suite, max_weight, seed))) {
                Ok(result) => {
                    let outcome = result?;
                    let ok = outcome.ok();
                    Outcome { text: outcome.text(), json: outcome.json(), ok }
                }
                Err(payload) => {
                    let msg = panic_message(payload);
                    Outcome {
                        text: format!("suite {suite}: FAILED ({msg})"),
                        json: json!({
                            "format": FORMAT,
                            "kind": "check",
                            "suite": suite,
                            "ok": false,
                            "error": msg,
                        }),
                        ok: false,
                    }
                }
            }
        }
    })
}

fn run_comodule(cmd: ComoduleCmd) -> Result<Outcome, CliError> {
    Ok(match cmd {
        ComoduleCmd::Build { family } => {
            let p = io::family_from_json(&io::read_source(&family)?)?;
            let q = comodule::build_comodule(&p);
            Outcome::new(io::structure_text(&q), io::structure_to_json(&q))
        }
        ComoduleCmd::Verify { structure } => {
            let q = io::structure_from_json(&io::read_source(&structure)?)?;
            let ok = comodule::verify_coassociative(&q);
            Outcome {
                text: (if ok { "coassociative" } else { "not coassociative" }).into(),
                json: json!({ "format": FORMAT, "kind": "verify", "coassociative": ok }),
                ok,
            }
        }
        ComoduleCmd::Extract { structure } => {
            let q = io::structure_from_json(&io::read_source(&structure)?)?;
            let p = comodule::extract_family(&q)?;
            Outcome::new(io::family_text(&p), io::family_to_json(&p))
        }
        ComoduleCmd::Flag { structure } => {
            let q = io::structure_from_json(&io::read_source(&structure)?)?;
            // The flag computation rejects non-comodules by panicking;
            // surface that as an input error instead of aborting.
            let f = panic::catch_unwind(AssertUnwindSafe(|| comodule::flag(&q)))
                .map_err(|p| CliError::Input(panic_message(p)))?;
            let dims: Vec<String> = f.dims.iter().map(|d| d.to_string()).collect();
            let profile: Vec<String> =
                f.type_profile().iter().map(|d| d.to_string()).collect();
            let basis: Vec<Vec<String>> = f
                .basis
                .iter()
                .map(|row| row.iter().map(|c| c.to_string()).collect())
                .collect();
            Outcome::new(
                format!("dims: {}\ntype: {}", dims.join(" "), profile.join(" ")),
                json!({
                    "format": FORMAT,
                    "kind": "flag",
                    "dims": f.dims,
                    "type": f.type_profile(),
                    "basis": basis,
                }),
            )
        }
        ComoduleCmd::Type { family } => {
            let p = io::family_from_json(&io::read_source(&family)?)?;
            match comodule::is_reduced(&p) {
                Some(profile) => {
                    let shown: Vec<String> = profile.iter().map(|d| d.to_string()).collect();
                    Outcome::new(
                        shown.join(" "),
                        json!({
                            "format": FORMAT,
                            "kind": "type",
                            "reduced": true,
                            "profile": profile,
                        }),
                    )
                }
                None => Outcome::new(
                    "not reduced".into(),
                    json!({
                        "format": FORMAT,
                        "kind": "type",
                        "reduced": false,
                        "profile": Value::Null,
                    }),
                ),
            }
        }
        ComoduleCmd::Act { group, family } => {
            let g = io::group_from_json(&io::read_source(&group)?)?;
            let p = io::family_from_json(&io::read_source(&family)?)?;
            let moved = comodule::act(&g, &p)?;
            Outcome::new(io::family_text(&moved), io::family_to_json(&moved))
        }
    })
}

fn run_endo(cmd: EndoCmd) -> Result<Outcome, CliError> {
    Ok(match cmd {
        EndoCmd::Apply { family, element } => {
            let fam = io::tree_family_from_json(&io::read_source(&family)?)?;
            let x: AlgebraElement = element.parse()?;
            element_out(&morphisms::phi_family(&fam, &x)?)
        }
        EndoCmd::Recover { images } => {
            let (bound, map) = io::morphism_from_json(&io::read_source(&images)?)?;
            // Extend tree images multiplicatively to whole elements.
            let oracle = |x: &AlgebraElement| -> AlgebraElement {
                let mut out = AlgebraElement::zero();
                for (f, c) in x.terms() {
                    let mut term = AlgebraElement::scalar(c.clone());
                    for t in f.trees() {
                        term = term.mul(&map[t]);
                    }
                    out.add_assign(&term);
                }
                out
            };
            let fam = morphisms::recover_family(oracle, bound)?;
            Outcome::new(io::tree_family_text(&fam), io::tree_family_to_json(&fam))
        }
    })
}

fn element_out(x: &AlgebraElement) -> Outcome {
    let terms: Vec<Value> = x
        .terms()
        .map(|(f, c)| json!({ "forest": f.to_string(), "coefficient": c.to_string() }))
        .collect();
    Outcome::new(
        x.to_string(),
        json!({ "format": FORMAT, "kind": "element", "value": x.to_string(), "terms": terms }),
    )
}

fn tensor_json(d: &TensorElement) -> Value {
    let terms: Vec<Value> = d
        .terms()
        .map(|(key, c)| {
            let slots: Vec<String> = key.iter().map(|f| f.to_string()).collect();
            json!({ "slots": slots, "coefficient": c.to_string() })
        })
        .collect();
    json!({ "format": FORMAT, "kind": "tensor", "value": d.to_string(), "terms": terms })
}

fn gr_json(a: &GrElement) -> Value {
    let terms: Vec<Value> = a
        .terms()
        .map(|(k, c)| json!({ "chain": key_string(k), "coefficient": c.to_string() }))
        .collect();
    json!({
        "format": FORMAT,
        "kind": "graded-element",
        "value": a.to_string(),
        "scalar": a.scalar_part().to_string(),
        "terms": terms,
    })
}

fn renorm_json(t: &RootedTree, form: &str, expr: &RenormExpression) -> Value {
    let terms: Vec<Value> = expr
        .terms()
        .map(|(term, c)| json!({ "term": term.to_string(), "coefficient": c.to_string() }))
        .collect();
    json!({
        "format": FORMAT,
        "kind": "renorm",
        "tree": t.to_string(),
        "form": form,
        "value": expr.to_string(),
        "terms": terms,
    })
}

fn key_string(key: &[PrimRef]) -> String {
    let parts: Vec<String> = key.iter().map(|r| format!("{}:{}", r.weight, r.index)).collect();
    parts.join(">")
}

fn parse_chain_key(s: &str) -> Result<ChainKey, CliError> {
    let mut key = Vec::new();
    for part in s.split('>') {
        let (w, i) = part.split_once(':').ok_or_else(|| {
            CliError::Input(format!("bad chain key part \"{part}\"; expected weight:index"))
        })?;
        let weight = w
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("bad weight \"{w}\" in chain key")))?;
        let index = i
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("bad index \"{i}\" in chain key")))?;
        if weight == 0 {
            return Err(CliError::Input("chain key weights must be positive".into()));
        }
        key.push(PrimRef { weight, index });
    }
    Ok(key)
}

/// A word is a '.'-joined list of trees; "1" denotes the empty word.
fn parse_word(s: &str) -> Result<Vec<RootedTree>, CliError> {
    if s == "1" {
        return Ok(Vec::new());
    }
    s.split('.').map(|part| Ok(part.parse::<RootedTree>()?)).collect()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "internal check panicked".into()
    }
}
