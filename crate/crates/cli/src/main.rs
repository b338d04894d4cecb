use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use torhyp::casebook::run_case;
use torhyp::config::{build_configuration, check_embedding_conditions, check_strength, check_subset};
use torhyp::deformation::{exception_set, multiplicative_rank, plan_similar_deformation, verify_single_coefficient_deformation};
use torhyp::hyperbolicity::{bounded_subtorus_oracle, certify_embedding_with, check_membership, Locus};
use torhyp::io::{
    coefficients_from_json, numbers_from_json, parse_json, pencil_from_json, point_from_str, points_from_json,
    polytope_from_json, REPORT_SCHEMA,
};
use torhyp::polytope::{format_rational_point, LatticePolytope};
use torhyp::Error;

#[derive(Parser)]
#[command(name = "torhyp", version, about = "Exact certificates for hyperbolically embedded torus complements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Compact single-line JSON instead of pretty-printed output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Polytope summary, conditions and certificate in one report.
    Analyze(CertifyArgs),
    /// Combinatorial conditions on every face for a point set.
    Conditions(ConditionsArgs),
    /// Decide membership of a coefficient vector in Y or Y'.
    Membership(MembershipArgs),
    /// Certify that the complement of the divisor is hyperbolically embedded.
    Certify(CertifyArgs),
    /// Exception sets of pencils, single-coefficient and similar deformations.
    Deform(DeformArgs),
    /// Multiplicative rank of positive rationals.
    Multrank(MultrankArgs),
    /// Run a worked example.
    Casebook(CasebookArgs),
}

#[derive(Args)]
struct CertifyArgs {
    /// Polytope JSON (file path or inline).
    #[arg(long)]
    polytope: String,
    /// Coefficient JSON (file path or inline).
    #[arg(long)]
    coeffs: String,
    #[arg(long, default_value_t = 1)]
    strength: u8,
    /// Report every witness instead of stopping at the first.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct ConditionsArgs {
    #[arg(long)]
    polytope: String,
    /// Explicit point set S as a JSON array of points.
    #[arg(long, conflicts_with = "coeffs")]
    set: Option<String>,
    /// Take S from the keys of a coefficient vector.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long, default_value_t = 1)]
    strength: u8,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocusArg {
    Y,
    Yprime,
}

#[derive(Args)]
struct MembershipArgs {
    #[arg(long)]
    coeffs: String,
    #[arg(long, value_enum, default_value_t = LocusArg::Y)]
    locus: LocusArg,
    #[arg(long)]
    exhaustive: bool,
    /// Also run the bounded one-parameter-subtorus oracle with this weight bound.
    #[arg(long)]
    weight_bound: Option<i64>,
}

#[derive(Args)]
struct DeformArgs {
    #[arg(long)]
    polytope: String,
    /// Pencil JSON {"base": ..., "direction": ...}.
    #[arg(long, conflicts_with_all = ["spare_index", "lambda"])]
    pencil: Option<String>,
    #[arg(long)]
    coeffs: Option<String>,
    /// Lattice point I0 whose coefficient varies, e.g. "1,1".
    #[arg(long, requires = "coeffs", conflicts_with = "lambda")]
    spare_index: Option<String>,
    /// Torus scaling λ as a JSON array of exact positive rationals.
    #[arg(long, requires = "coeffs")]
    lambda: Option<String>,
}

#[derive(Args)]
struct MultrankArgs {
    #[arg(long)]
    lambda: String,
}

#[derive(Args)]
struct CasebookArgs {
    /// p2-2h, p2-3h, p3-3h-small, p3-3h-full or hirzebruch:<l>.
    name: String,
    /// Narrow the report to one quantity (hyperplanes).
    #[arg(long)]
    check: Option<String>,
}

fn load(arg: &str) -> Result<Value, Error> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return parse_json(arg);
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
    parse_json(&text)
}

fn report(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(REPORT_SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn polytope_summary(p: &LatticePolytope) -> Value {
    let mut by_dim = vec![0usize; p.rank() + 1];
    for f in p.enumerate_faces() {
        by_dim[f.dim] += 1;
    }
    json!({
        "rank": p.rank(),
        "vertices": p.vertices().iter().map(|v| format_rational_point(v)).collect::<Vec<_>>(),
        "integral": p.is_integral(),
        "lattice_points": p.lattice_points().len(),
        "faces_by_dimension": by_dim,
    })
}

/// Unmet preconditions are completed analyses with a FAIL verdict.
fn precondition_failure(e: &Error) -> Option<String> {
    match e {
        Error::ConditionsNotMet(_) => Some("FAIL(conditions)".into()),
        Error::StrengthConditionsNotMet(_) => Some("FAIL(strength-2 conditions)".into()),
        Error::BaseInBadLocus(_) => Some("FAIL(base in Y)".into()),
        Error::BaseInYprime(_) => Some("FAIL(base in Y')".into()),
        _ => None,
    }
}

fn certify(args: &CertifyArgs, analyze: bool) -> Result<Value, Error> {
    let p = polytope_from_json(&load(&args.polytope)?)?;
    let a = coefficients_from_json(&load(&args.coeffs)?)?;
    check_strength(args.strength)?;
    let mut m = report(if analyze { "analyze" } else { "certify" });
    if analyze {
        m.insert("polytope".into(), polytope_summary(&p));
        check_subset(&p, &a.support())?;
        let cfg = build_configuration(&a.support(), p.rank())?;
        m.insert("conditions".into(), to_value(&check_embedding_conditions(&p, &cfg, args.strength)?));
    }
    match certify_embedding_with(&p, &a, args.strength, args.exhaustive) {
        Ok(cert) => {
            m.insert("overall".into(), to_value(&cert.overall));
            m.insert("certificate".into(), to_value(&cert));
        }
        Err(e) => {
            let verdict = precondition_failure(&e).ok_or(e.clone())?;
            m.insert("overall".into(), json!("NOT_CERTIFIED"));
            m.insert("verdict".into(), json!(verdict));
            m.insert("reason".into(), json!(e.to_string()));
        }
    }
    Ok(Value::Object(m))
}

fn conditions(args: &ConditionsArgs) -> Result<Value, Error> {
    let p = polytope_from_json(&load(&args.polytope)?)?;
    check_strength(args.strength)?;
    let points = match (&args.set, &args.coeffs) {
        (Some(s), _) => points_from_json(&load(s)?)?,
        (None, Some(c)) => coefficients_from_json(&load(c)?)?.support(),
        (None, None) => p.lattice_points(),
    };
    check_subset(&p, &points)?;
    let cfg = build_configuration(&points, p.rank())?;
    let cond = check_embedding_conditions(&p, &cfg, args.strength)?;
    let mut m = report("conditions");
    let verdict = match cond.first_failure() {
        None => "PASS".to_string(),
        Some(f) => format!("FAIL({})", f.description),
    };
    m.insert("verdict".into(), json!(verdict));
    m.insert("conditions".into(), to_value(&cond));
    Ok(Value::Object(m))
}

fn membership(args: &MembershipArgs) -> Result<Value, Error> {
    let a = coefficients_from_json(&load(&args.coeffs)?)?;
    let locus = match args.locus {
        LocusArg::Y => Locus::Y,
        LocusArg::Yprime => Locus::YPrime,
    };
    let r = check_membership(&a, locus, args.exhaustive)?;
    let mut m = report("membership");
    m.insert("verdict".into(), to_value(&r.verdict));
    m.insert("report".into(), to_value(&r));
    if let Some(bound) = args.weight_bound {
        let o = bounded_subtorus_oracle(&a, bound)?;
        m.insert("oracle".into(), json!({ "weight_bound": bound, "verdict": o.verdict, "agrees": o.verdict == r.verdict }));
    }
    Ok(Value::Object(m))
}

fn deform(args: &DeformArgs) -> Result<Value, Error> {
    let p = polytope_from_json(&load(&args.polytope)?)?;
    let mut m = report("deform");
    let outcome = if let Some(pen) = &args.pencil {
        let pencil = pencil_from_json(&load(pen)?)?;
        m.insert("mode".into(), json!("pencil"));
        exception_set(&p, &pencil).map(|e| {
            m.insert("exceptions".into(), json!(e.count_with_multiplicity));
            m.insert("exception_set".into(), to_value(&e));
        })
    } else {
        let coeffs = args.coeffs.as_ref().ok_or_else(|| Error::Parse("deform needs --pencil or --coeffs".into()))?;
        let a = coefficients_from_json(&load(coeffs)?)?;
        if let Some(i0) = &args.spare_index {
            m.insert("mode".into(), json!("single-coefficient"));
            verify_single_coefficient_deformation(&p, &a, &point_from_str(i0)?).map(|c| {
                m.insert("verdict".into(), json!(c.verdict));
                m.insert("certificate".into(), to_value(&c));
            })
        } else if let Some(l) = &args.lambda {
            m.insert("mode".into(), json!("similar"));
            let plan = plan_similar_deformation(&a, &numbers_from_json(&load(l)?)?)?;
            m.insert("exception_count".into(), json!(plan.exception_count));
            m.insert("plan".into(), to_value(&plan));
            Ok(())
        } else {
            return Err(Error::Parse("deform needs --pencil, --spare-index or --lambda".into()));
        }
    };
    if let Err(e) = outcome {
        let verdict = precondition_failure(&e).ok_or(e.clone())?;
        m.insert("verdict".into(), json!(verdict));
        m.insert("reason".into(), json!(e.to_string()));
    }
    Ok(Value::Object(m))
}

fn multrank(args: &MultrankArgs) -> Result<Value, Error> {
    let profile = multiplicative_rank(&numbers_from_json(&load(&args.lambda)?)?)?;
    let mut m = report("multrank");
    m.insert("rank".into(), json!(profile.rank));
    m.insert("profile".into(), to_value(&profile));
    Ok(Value::Object(m))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedRank(_) | Error::DimensionTooHigh(_) => 3,
        Error::SolverFailure(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => certify(a, true),
        Command::Certify(a) => certify(a, false),
        Command::Conditions(a) => conditions(a),
        Command::Membership(a) => membership(a),
        Command::Deform(a) => deform(a),
        Command::Multrank(a) => multrank(a),
        Command::Casebook(a) => run_case(&a.name, a.check.as_deref()),
    };
    match result {
        Ok(v) => {
            let text = if cli.json { serde_json::to_string(&v) } else { serde_json::to_string_pretty(&v) };
            println!("{}", text.expect("reports serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
