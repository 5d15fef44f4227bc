use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use egrq_core::density::{self, CountReport};
use egrq_core::reduction::{self, ReductionError};
use egrq_core::setzer::{self, SetzerError};
use egrq_core::{CurveModel, EgrVerdict, LocalReduction, Status, Witness};
use serde_json::{json, Value};

use crate::Format;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Internal(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(s) => write!(f, "{s}"),
            Failure::Internal(s) => write!(f, "internal: {s}"),
        }
    }
}

impl From<SetzerError> for Failure {
    fn from(e: SetzerError) -> Self {
        match e {
            SetzerError::Construction { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Singular | ReductionError::Field(_) => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type Output = Result<(String, ExitCode), Failure>;

fn ok(s: String) -> Output {
    Ok((s, ExitCode::SUCCESS))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn parse_m(s: &str) -> Result<i64, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Input(format!("m must be an integer, got {s:?}")))
}

fn table(a_max: u64) -> Result<setzer::GoodTable, Failure> {
    Ok(setzer::scan_good_d(a_max)?)
}

pub fn good_d(a_max: u64, fmt: Format) -> Output {
    let t = table(a_max)?;
    let recs = t.records();
    let s = match fmt {
        Format::Csv => t.to_csv(),
        Format::Json => pretty(&json!({ "a_max": a_max, "rows": recs })),
        Format::Text => {
            let mut s = format!(
                "# good D with |A| <= {a_max}: {} rows, {} distinct D\n",
                recs.len(),
                t.len()
            );
            writeln!(
                s,
                "{:>8} {:>22} {:>12} {:>8} {:>8} {:>4}",
                "A", "D", "t", "d1", "d2", "eps"
            )
            .unwrap();
            for r in &recs {
                writeln!(
                    s,
                    "{:>8} {:>22} {:>12} {:>8} {:>8} {:>4}",
                    r.a, r.d, r.t, r.d1, r.d2, r.epsilon
                )
                .unwrap();
            }
            s
        }
    };
    ok(s)
}

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Unknown => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    }
}

fn reports_json(reports: &[LocalReduction]) -> Value {
    json!(reports)
}

fn witness_json(w: &Witness) -> Value {
    json!({
        "A": w.record.a,
        "D": w.record.d,
        "q": w.q,
        "t": w.record.t,
        "d1": w.record.d1,
        "d2": w.record.d2,
        "conic": w.conic,
        "beta": w.beta.to_string(),
        "n": w.n.to_string(),
        "u": w.u.to_string(),
        "branch": w.branch,
        "attempts": w.attempts,
        "curve": w.curve.record(),
        "j": w.curve.j_invariant().to_string(),
        "discriminant": w.curve.discriminant().to_string(),
        "reports": reports_json(&w.reports),
    })
}

fn write_reports(s: &mut String, reports: &[LocalReduction]) {
    if reports.is_empty() {
        writeln!(s, "  no prime divides the discriminant").unwrap();
    }
    for r in reports {
        writeln!(s, "  {r}").unwrap();
    }
}

fn write_witness(s: &mut String, w: &Witness) {
    let r = &w.record;
    writeln!(
        s,
        "witness: D = {}, q = {}, A = {}, t = {}, d1 = {}, d2 = {}",
        r.d, w.q, r.a, r.t, r.d1, r.d2
    )
    .unwrap();
    let c = &w.conic;
    writeln!(
        s,
        "conic: x^2 - ({}) y^2 = ({}) z^2 at (x, y, z) = ({}, {}, {}), alpha = {}",
        c.m, c.c, c.x, c.y, c.z, c.alpha
    )
    .unwrap();
    writeln!(s, "beta = {} (n = {})", w.beta, w.n).unwrap();
    writeln!(
        s,
        "u = {} ({}, conic solutions tried: {})",
        w.u, w.branch, w.attempts
    )
    .unwrap();
    writeln!(s, "E: {}", w.curve).unwrap();
    writeln!(s, "j = {}", w.curve.j_invariant()).unwrap();
    writeln!(s, "reduction:").unwrap();
    write_reports(s, &w.reports);
}

fn candidate_rows(v: &EgrVerdict) -> Result<Vec<(setzer::ConditionReport, &'static str)>, Failure> {
    let mut rows = Vec::new();
    for (d, q) in setzer::candidates(v.m)? {
        let rep = setzer::check_conditions(d, q)?;
        let outcome = if !rep.pass() {
            "fails"
        } else if v.unresolved.contains(&(d, q)) {
            "unresolved"
        } else {
            "good"
        };
        rows.push((rep, outcome));
    }
    Ok(rows)
}

fn render_verdict(v: &EgrVerdict, fmt: Format) -> Result<String, Failure> {
    Ok(match fmt {
        Format::Json => pretty(&json!({
            "m": v.m,
            "status": v.status,
            "a_max": v.a_max,
            "witness": v.witness.as_ref().map(witness_json),
            "failures": v.failures,
            "unresolved": v.unresolved.iter().map(|&(d, q)| json!({"D": d, "q": q})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("m,D,q,a,b,c,d,e,outcome\n");
            for (rep, outcome) in candidate_rows(v)? {
                write!(s, "{},{},{}", v.m, rep.d, rep.q).unwrap();
                for r in &rep.results {
                    s.push_str(if r.pass { ",ok" } else { ",fail" });
                }
                writeln!(s, ",{outcome}").unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "m = {}\nstatus: {} (good D scanned with |A| <= {})\n",
                v.m, v.status, v.a_max
            );
            if let Some(w) = &v.witness {
                write_witness(&mut s, w);
            }
            if !v.unresolved.is_empty() {
                writeln!(
                    s,
                    "passing (a)-(e) but D not found good with |A| <= {}:",
                    v.a_max
                )
                .unwrap();
                for (d, q) in &v.unresolved {
                    writeln!(s, "  D={d} q={q}").unwrap();
                }
            }
            if !v.failures.is_empty() {
                writeln!(s, "failing candidates:").unwrap();
                for f in &v.failures {
                    writeln!(s, "  {f}").unwrap();
                }
            }
            s
        }
    })
}

pub fn decide(m: i64, a_max: u64, retry_cap: usize, fmt: Format) -> Output {
    let t = table(a_max)?;
    let v = setzer::decide_with(m, &t, retry_cap)?;
    Ok((render_verdict(&v, fmt)?, status_code(v.status)))
}

fn render_reports_csv(reports: &[LocalReduction]) -> String {
    let mut s = String::from("P,p,root,type,v_min_delta\n");
    for r in reports {
        let root = r.prime.root().map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            s,
            "\"{}\",{},{},{},{}",
            r.prime,
            r.prime.p(),
            root,
            r.kodaira,
            r.v_min_delta
        )
        .unwrap();
    }
    s
}

pub fn construct(m: i64, a_max: u64, retry_cap: usize, fmt: Format) -> Output {
    let t = table(a_max)?;
    let v = setzer::decide_with(m, &t, retry_cap)?;
    let w = match (&v.status, &v.witness) {
        (Status::Yes, Some(w)) => w,
        (Status::No, _) => return Err(Failure::Input(format!(
            "Q(sqrt({m})) has no curve with everywhere good reduction and rational j (verdict NO)"
        ))),
        (Status::Unknown, _) => {
            let msg = format!("verdict UNKNOWN for m = {m}: no good D found with |A| <= {a_max}\n");
            let body = match fmt {
                Format::Text => format!("{msg}{}", render_verdict(&v, Format::Text)?),
                _ => render_verdict(&v, fmt)?,
            };
            return Ok((body, ExitCode::from(3)));
        }
        (Status::Yes, None) => return Err(Failure::Internal("YES without a witness".into())),
    };
    let s = match fmt {
        Format::Json => pretty(&witness_json(w)),
        Format::Csv => render_reports_csv(&w.reports),
        Format::Text => {
            let mut s = format!("m = {m}\n");
            write_witness(&mut s, w);
            s.push_str("curve file:\n");
            s.push_str(&w.curve.to_file_string());
            s
        }
    };
    ok(s)
}

pub fn verify(path: &Path, fmt: Format) -> Output {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let curve: CurveModel = text
        .parse()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let (egr, reports) = reduction::verify_egr(&curve)?;
    let s = match fmt {
        Format::Json => pretty(&json!({
            "egr": egr,
            "curve": curve.record(),
            "j": curve.j_invariant().to_string(),
            "discriminant": curve.discriminant().to_string(),
            "norm_discriminant": curve.discriminant().norm().to_string(),
            "reports": reports_json(&reports),
        })),
        Format::Csv => render_reports_csv(&reports),
        Format::Text => {
            let mut s = format!("E: {curve}\n");
            writeln!(s, "discriminant = {}", curve.discriminant()).unwrap();
            writeln!(s, "norm(discriminant) = {}", curve.discriminant().norm()).unwrap();
            writeln!(s, "j = {}", curve.j_invariant()).unwrap();
            writeln!(s, "reduction:").unwrap();
            write_reports(&mut s, &reports);
            writeln!(s, "EGR {egr}").unwrap();
            s
        }
    };
    ok(s)
}

fn render_count(report: &CountReport, header: &str, long: bool, fmt: Format) -> String {
    match fmt {
        Format::Json => pretty(&json!(report)),
        Format::Csv if long => format!("{}{}", density::LONG_HEADER, report.to_long_rows()),
        Format::Csv => report.to_csv(),
        Format::Text => {
            let body = if long {
                format!("{}{}", density::LONG_HEADER, report.to_long_rows())
            } else {
                report.to_csv()
            };
            format!("# {header}; counting {}\n{body}", report.convention)
        }
    }
}

pub fn count(family: &str, x: u64, a_max: u64, long: bool, fmt: Format) -> Output {
    if x < 10 {
        return Err(Failure::Input(format!(
            "bound must be at least 10, got {x}"
        )));
    }
    let (report, header) = match family.trim() {
        "R" | "r" => (
            density::aggregate_rx(x).map_err(|e| Failure::Input(e.to_string()))?,
            "real fields Q(sqrt(2q)) from the D=2 family, alpha=1/2".to_string(),
        ),
        "I" | "i" => (
            density::aggregate_ix(x).map_err(|e| Failure::Input(e.to_string()))?,
            "imaginary fields Q(sqrt(37q)) from the D=37 family, alpha=1/2".to_string(),
        ),
        other => {
            let d: i64 = other.parse().map_err(|_| {
                Failure::Input(format!(
                    "family must be an integer D, R or I, got {other:?}"
                ))
            })?;
            let spec = density::family_for(d).map_err(|e| Failure::Input(e.to_string()))?;
            if !table(a_max)?.contains(d) {
                return Err(Failure::Input(format!(
                    "D = {d} is not known to be good with |A| <= {a_max}"
                )));
            }
            let report =
                density::count_family(&spec, x).map_err(|e| Failure::Input(e.to_string()))?;
            (report, spec.to_string())
        }
    };
    ok(render_count(&report, &header, long, fmt))
}
