//! The `gcdissect` command line.
//!
//! Every command prints JSON (or writes a file) and exits with 0 on success,
//! 1 when the request is refused or a check fails, and 2 on usage errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::affine_types::{
    affine_quotient, canonicalize, classify_quadrangle_with, flip, is_affine_kite, parse_points,
    AffineClass, NearParallel,
};
use crate::composition::{combine, ClassSet, ClassTerm, Member, Op};
use crate::document::{class_doc, plan_from_json, plan_to_json};
use crate::families::{family_beta, family_membership, family_residual, isolate_iv, FamilyId};
use crate::ratio::{Ratio, DEFAULT_FLOAT_TOL};
use crate::realizer::{
    dissect_even_general, dissect_fan, dissect_odd, dissect_por5, realize_tree, DissectionPlan,
    RealizeError,
};
use crate::svg::render_svg;
use crate::treesearch::{configured_cap, parity_table, search_with, SearchOptions};
use crate::verifier::verify_plan;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "gcdissect",
    version,
    about = "Glass-cut self-affine dissections of convex quadrangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Affine class of four points given in cyclic order.
    Classify {
        /// "x,y;x,y;x,y;x,y" with rationals or decimals.
        #[arg(long)]
        points: String,
    },
    /// The other parametrization of a non-trapezoid.
    Flip {
        #[arg(long)]
        class: String,
    },
    /// Classes obtained by glueing two classes.
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// dot or colon.
        #[arg(long)]
        op: String,
        #[arg(long)]
        flip_left: bool,
        #[arg(long)]
        flip_right: bool,
    },
    /// Extended trees with n leaves whose root contains the leaf class.
    Search {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        /// Membership tolerance (default 0 for rational classes, 1e-9 otherwise).
        #[arg(long)]
        tol: Option<String>,
        /// Enumerate all trees instead of the reduced candidate set.
        #[arg(long)]
        no_prune: bool,
    },
    /// How many n-leaf trees reach each quotient exponent.
    Parity {
        #[arg(long)]
        n: usize,
    },
    /// Larger parameter of a family member.
    Family {
        #[arg(long)]
        id: String,
        #[arg(long)]
        alpha: String,
    },
    /// Glass-cut dissection of a class into n copies of itself.
    Dissect {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dissection that need not be glass-cut (n = 5 or even n >= 6).
    Selfaffine {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a plan document; exits 0 iff every check passes.
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Draw a plan document as SVG.
    Render {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

/// A failed command: exit code and message.
struct Failure(i32, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn refused(msg: impl ToString) -> Failure {
    Failure(EXIT_REFUSED, msg.to_string())
}

impl From<RealizeError> for Failure {
    fn from(e: RealizeError) -> Self {
        refused(e)
    }
}

type Outcome = Result<(i32, String), Failure>;

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain JSON")
}

fn ok(v: Value) -> Outcome {
    Ok((EXIT_OK, pretty(&v)))
}

fn parse_class(s: &str) -> Result<AffineClass, Failure> {
    AffineClass::parse_with_tol(s, DEFAULT_FLOAT_TOL).map_err(usage)
}

fn parse_ratio(s: &str) -> Result<Ratio, Failure> {
    Ratio::parse_with_tol(s, 0.0).map_err(usage)
}

fn class_json(c: &AffineClass) -> Value {
    let mut v = serde_json::to_value(class_doc(c)).expect("plain data");
    v["class"] = json!(c.to_string());
    v
}

fn member_json(m: &Member) -> Value {
    match m {
        Member::Q { ratio, beta } => {
            json!({"kind": "Q", "ratio": ratio.to_string(), "beta": beta.to_string()})
        }
        Member::T(j) => json!({"kind": "T", "gamma": j.to_string()}),
        Member::P => json!({"kind": "P"}),
    }
}

fn set_json(s: &ClassSet) -> Value {
    json!({
        "set": s.to_string(),
        "members": s.members().iter().map(member_json).collect::<Vec<_>>(),
    })
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_plan(path: &PathBuf) -> Result<DissectionPlan, Failure> {
    plan_from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_plan(plan: &DissectionPlan, out: &Option<PathBuf>) -> Outcome {
    let doc = plan_to_json(plan);
    if let Some(p) = out {
        std::fs::write(p, &doc).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok((EXIT_OK, doc.trim_end().to_string()))
}

fn cmd_classify(points: &str) -> Outcome {
    let pts = parse_points(points, DEFAULT_FLOAT_TOL).map_err(usage)?;
    let exact = pts.iter().all(|p| p.is_exact());
    let mode = if exact {
        NearParallel::Reject
    } else {
        NearParallel::Accept
    };
    let c = classify_quadrangle_with(&pts, mode).map_err(refused)?;
    let class = c.class.class();
    let mut v = class_json(class);
    v["labeling"] = json!(c.labeling);
    v["quotient"] = json!(affine_quotient(class).to_string());
    v["kite"] = json!(is_affine_kite(class));
    ok(v)
}

fn cmd_flip(class: &str) -> Outcome {
    let c = parse_class(class)?;
    let f = flip(&c).map_err(refused)?;
    ok(json!({
        "input": class_json(&c),
        "flipped": class_json(&f),
        "canonical": class_json(canonicalize(&c).class()),
    }))
}

fn cmd_compose(left: &str, right: &str, op: &str, fl: bool, fr: bool) -> Outcome {
    let op = Op::parse(op).ok_or_else(|| usage(format!("unknown op {op:?}; use dot or colon")))?;
    let l = ClassTerm::new(parse_class(left)?, fl);
    let r = ClassTerm::new(parse_class(right)?, fr);
    let s = combine(&l, &r, op).map_err(refused)?;
    ok(set_json(&s))
}

fn default_tol(c: &AffineClass) -> Ratio {
    if c.is_exact() {
        Ratio::zero()
    } else {
        Ratio::approx(DEFAULT_FLOAT_TOL, 0.0)
    }
}

fn cmd_search(class: &str, n: usize, tol: Option<&str>, no_prune: bool) -> Outcome {
    let leaf = parse_class(class)?;
    let tol = match tol {
        Some(t) => parse_ratio(t)?,
        None => default_tol(&leaf),
    };
    let opts = SearchOptions {
        tol,
        prune: !no_prune,
        cap: configured_cap(),
    };
    let hits = search_with(&leaf, n, &opts).map_err(refused)?;
    let list: Vec<Value> = hits
        .iter()
        .map(|h| {
            json!({
                "tree": h.tree.to_string(),
                "witness": h.witness.to_string(),
                "witness_flipped": h.witness_flipped,
                "root_set": h.root_set.to_string(),
            })
        })
        .collect();
    ok(json!({
        "class": leaf.to_string(),
        "n": n,
        "pruned": !no_prune,
        "count": list.len(),
        "hits": list,
    }))
}

fn cmd_parity(n: usize) -> Outcome {
    let table = parity_table(n, configured_cap()).map_err(refused)?;
    let rows: Vec<Value> = table
        .iter()
        .map(|(k, c)| json!({"exponent": k, "trees": c}))
        .collect();
    let parity_holds = table
        .iter()
        .all(|(k, _)| (*k as usize) <= n && (*k as usize) % 2 == n % 2);
    ok(json!({"n": n, "table": rows, "parity_holds": parity_holds}))
}

fn cmd_family(id: &str, alpha: &str) -> Outcome {
    let id: FamilyId = id.parse().map_err(usage)?;
    let alpha = parse_ratio(alpha)?;
    let beta = family_beta(id, &alpha).map_err(refused)?;
    let residual = family_residual(id, &alpha, &beta).map_err(refused)?;
    let mut v = json!({
        "id": id.to_string(),
        "alpha": alpha.to_string(),
        "beta": beta.to_string(),
        "residual": residual.to_f64(),
    });
    if id == FamilyId::IV {
        let r = isolate_iv(&alpha).map_err(refused)?;
        v["bracket"] = json!([r.lo, r.hi]);
        v["iterations"] = json!(r.iterations);
    }
    ok(v)
}

/// Glass-cut plans: fans for trapezoids and `P`, the tree search for `n = 3`,
/// and the odd constructions for `n >= 5`.
pub fn gc_plan(c: &AffineClass, n: usize) -> Result<DissectionPlan, RealizeError> {
    let refuse = |m: String| Err(RealizeError::Refused(m));
    if !c.is_q() {
        return dissect_fan(c, n);
    }
    if n < 2 {
        return refuse(format!("n must be at least 2, got {n}"));
    }
    if n.is_multiple_of(2) {
        return refuse(format!(
            "{c} is not a trapezoid, and non-trapezoids are never {n}-gc-self-affine for even n"
        ));
    }
    if n == 3 {
        let tol = default_tol(c);
        let opts = SearchOptions {
            tol,
            prune: true,
            cap: configured_cap(),
        };
        let hits = search_with(c, 3, &opts).map_err(|e| RealizeError::Refused(e.to_string()))?;
        let mut last = None;
        for h in &hits {
            match realize_tree(&h.tree, c, Some(&h.witness)) {
                Ok(plan) => return Ok(plan),
                Err(e) => last = Some(e),
            }
        }
        if let Some(e) = last {
            return Err(e);
        }
        let fams = family_membership(c, &Ratio::approx(DEFAULT_FLOAT_TOL, 0.0));
        return refuse(format!(
            "{c} is not 3-gc-self-affine: no tree with 3 leaves produces it (family check: {fams:?})"
        ));
    }
    dissect_odd(c, n)
}

fn cmd_dissect(class: &str, n: usize, out: &Option<PathBuf>) -> Outcome {
    let c = parse_class(class)?;
    emit_plan(&gc_plan(&c, n)?, out)
}

/// Plans without the glass-cut requirement.
pub fn self_affine_plan(c: &AffineClass, n: usize) -> Result<DissectionPlan, RealizeError> {
    if !c.is_q() {
        return dissect_fan(c, n);
    }
    match n {
        5 => dissect_por5(c),
        n if n >= 6 && n % 2 == 0 => dissect_even_general(c, n),
        _ => Err(RealizeError::Refused(format!(
            "selfaffine builds n = 5 or even n >= 6 for non-trapezoids, got n = {n}; use dissect for glass-cut plans"
        ))),
    }
}

fn cmd_selfaffine(class: &str, n: usize, out: &Option<PathBuf>) -> Outcome {
    let c = parse_class(class)?;
    emit_plan(&self_affine_plan(&c, n)?, out)
}

fn cmd_verify(path: &PathBuf, tol: Option<&str>) -> Outcome {
    let plan = load_plan(path)?;
    let tol = match tol {
        Some(t) => parse_ratio(t)?,
        None => plan.tol.clone(),
    };
    let r = verify_plan(&plan, &tol).map_err(usage)?;
    let v = json!({
        "ok": r.ok,
        "tiles": r.tiles,
        "tol": tol.to_string(),
        "root_area": r.root_area.to_string(),
        "area_defect": r.area_defect.to_string(),
        "max_overlap": r.max_overlap.to_string(),
        "failures": r.failures,
    });
    Ok((if r.ok { EXIT_OK } else { EXIT_REFUSED }, pretty(&v)))
}

fn cmd_render(plan: &PathBuf, svg: &PathBuf) -> Outcome {
    let p = load_plan(plan)?;
    let s = render_svg(&p);
    std::fs::write(svg, &s).map_err(|e| usage(format!("cannot write {}: {e}", svg.display())))?;
    ok(json!({"svg": svg.display().to_string(), "bytes": s.len()}))
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Classify { points } => cmd_classify(&points),
        Command::Flip { class } => cmd_flip(&class),
        Command::Compose {
            left,
            right,
            op,
            flip_left,
            flip_right,
        } => cmd_compose(&left, &right, &op, flip_left, flip_right),
        Command::Search {
            class,
            n,
            tol,
            no_prune,
        } => cmd_search(&class, n, tol.as_deref(), no_prune),
        Command::Parity { n } => cmd_parity(n),
        Command::Family { id, alpha } => cmd_family(&id, &alpha),
        Command::Dissect { class, n, out } => cmd_dissect(&class, n, &out),
        Command::Selfaffine { class, n, out } => cmd_selfaffine(&class, n, &out),
        Command::Verify { plan, tol } => cmd_verify(&plan, tol.as_deref()),
        Command::Render { plan, svg } => cmd_render(&plan, &svg),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code with the text for stdout.
pub fn run(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    (EXIT_OK, e.to_string().trim_end().to_string())
                }
                _ => (
                    EXIT_USAGE,
                    pretty(&json!({"error": e.to_string().trim_end()})),
                ),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(Failure(code, msg)) => (code, pretty(&json!({"error": msg}))),
    }
}
