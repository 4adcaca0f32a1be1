use std::fmt::Write;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use hmcreal::exact::{ceil_pos, factorial, format_rational, from_biguint, parse_rational};
use hmcreal::fps::{self, newton_improper_polyexp, quasi_shift, shift_poly_exact};
use hmcreal::northeast::build_stage;
use hmcreal::quadrature::integrate_improper_polyexp;
use hmcreal::series::e;
use hmcreal::transcendence::{
    a_bound, convergents, hilbert_report, lambda_approx, lambda_error_certified, lambda_witness, largest_real_root,
    liouville_check, liouville_constant, CandidateRelation, Route, SampleStatus, Verdict,
};
use hmcreal::{CReal, Check, Error};

use crate::{Mode, Output, RouteArg};

pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const USAGE: u8 = 2;
pub const INCONCLUSIVE: u8 = 3;
pub const RESOURCE: u8 = 4;

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub struct Failure {
    pub message: String,
    pub code: u8,
}

type Res = std::result::Result<Outcome, Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Resource(_) => RESOURCE,
            Error::PrecisionExhausted(_) => INCONCLUSIVE,
            _ => USAGE,
        };
        Failure { message: e.to_string(), code }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { message: msg.into(), code: USAGE }
}

fn resource(msg: impl Into<String>) -> Failure {
    Failure { message: msg.into(), code: RESOURCE }
}

fn emit(out: Output, text: String, value: Value, code: u8) -> Res {
    let stdout = if out.json { format!("{}\n", serde_json::to_string_pretty(&value).expect("json")) } else { text };
    Ok(Outcome { stdout, code })
}

fn parse_ints(s: &str) -> std::result::Result<Vec<BigInt>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| usage(format!("not an integer: {t:?}"))))
        .collect()
}

/// `1/k` (or any positive rational) to the integer `k = ceil(1/tol)`.
fn parse_tol(s: &str) -> std::result::Result<(BigRational, u64), Failure> {
    let t = parse_rational(s)?;
    if !t.is_positive() {
        return Err(usage("tolerance must be positive"));
    }
    let k = ceil_pos(&t.recip()).to_u64().ok_or_else(|| resource("tolerance too small"))?;
    Ok((t, k))
}

fn digits_for(k: u64) -> usize {
    k.to_string().len() + 1
}

pub fn edigits(d: u64, out: Output) -> Res {
    if !(1..=10_000).contains(&d) {
        return Err(usage("--precision must lie in 1..=10000"));
    }
    let digits = e().render_digits(d as usize);
    let marker = format!("1e-{d}");
    let text = format!("{digits} ±{marker}\n");
    emit(out, text, json!({ "command": "edigits", "precision": d, "digits": digits, "error": marker }), OK)
}

pub fn euler(k_max: u64, mode: Mode, tol: &str, out: Output) -> Res {
    if k_max > 8 {
        return Err(usage("--k-max must be at most 8"));
    }
    let (tol, tk) = parse_tol(tol)?;
    let kk = tk.checked_mul(4).ok_or_else(|| resource("tolerance too small"))?;
    let d = digits_for(tk);
    // the integral is within 1/kk and the digits are a floor at 10^-d
    let err = BigRational::new(BigInt::one(), BigInt::from(kk)) + BigRational::new(BigInt::one(), BigInt::from(10u32).pow(d as u32));
    let routes: &[&str] = match mode {
        Mode::Riemann => &["riemann"],
        Mode::Newton => &["newton"],
        Mode::Both => &["riemann", "newton"],
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for k in 0..=k_max {
        let mut p = vec![CReal::zero(); k as usize];
        p.push(CReal::one());
        let fact = CReal::from_rational(from_biguint(&factorial(k)));
        let mut values = Vec::new();
        for route in routes {
            let v = match *route {
                "riemann" => integrate_improper_polyexp(&p, kk)?,
                _ => newton_improper_polyexp(&p, kk),
            };
            let c = Check::identity(format!("I_{k}"), &v, &fact, tol.clone());
            all_ok &= c.ok;
            let shown = v.render_digits(d);
            writeln!(
                text,
                "{k} {route} {shown} ±{} {} residual={} ok={}",
                format_rational(&err),
                factorial(k),
                format_rational(&c.residual),
                c.ok
            )
            .expect("write");
            rows.push(json!({
                "k": k,
                "route": route,
                "value": shown,
                "error": format_rational(&err),
                "factorial": factorial(k).to_string(),
                "residual": format_rational(&c.residual),
                "tolerance": format_rational(&tol),
                "ok": c.ok,
            }));
            values.push(v);
        }
        if values.len() == 2 {
            let agree = Check::identity(format!("I_{k} routes"), &values[0], &values[1], &tol * BigRational::from_integer(2.into()));
            all_ok &= agree.ok;
            writeln!(text, "{k} agreement residual={} ok={}", format_rational(&agree.residual), agree.ok).expect("write");
            rows.push(json!({
                "k": k,
                "route": "agreement",
                "residual": format_rational(&agree.residual),
                "tolerance": format_rational(&agree.tolerance),
                "ok": agree.ok,
            }));
        }
    }
    let code = if all_ok { OK } else { FAILED };
    emit(out, text, json!({ "command": "euler", "k_max": k_max, "tolerance": format_rational(&tol), "rows": rows, "ok": all_ok }), code)
}

pub fn hilbert(coeffs: &str, m_max: usize, route: RouteArg, out: Output) -> Res {
    if m_max == 0 {
        return Err(usage("--m-max must be at least 1"));
    }
    if m_max > 16 {
        return Err(resource("--m-max is capped at 16"));
    }
    let rel = CandidateRelation::new(parse_ints(coeffs)?)?;
    if matches!(route, RouteArg::Riemann) && (rel.degree() > 1 && m_max > 2 || m_max > 6) {
        return Err(resource("the Riemann route is capped at m <= 6 for degree 1 and m <= 2 otherwise"));
    }
    let (route, route_name) = match route {
        RouteArg::Newton => (Route::Newton, "newton"),
        RouteArg::Riemann => (Route::Riemann, "riemann"),
    };
    let report = hilbert_report(&rel, m_max, route)?;
    let rel_s: Vec<String> = rel.coeffs().iter().map(|c| c.to_string()).collect();
    let mut text = format!("relation {}\nroute {route_name}\n", rel_s.join(","));
    text.push_str("m B B_mod_mfact congruence_ok A_lo A_hi bound_ok verdict\n");
    let mut rows = Vec::new();
    for r in &report.rows {
        writeln!(text, "{}", r.record()).expect("write");
        rows.push(json!({
            "m": r.m,
            "b": r.b.to_string(),
            "b_mod_mfact": r.b_mod_mfact.to_string(),
            "congruence_ok": r.congruence_ok,
            "coprime": r.coprime,
            "a_lo": format_rational(&r.a_enclosure.lo),
            "a_hi": format_rational(&r.a_enclosure.hi),
            "a_bound": a_bound(&rel, r.m).to_string(),
            "bound_ok": r.bound_ok,
            "verdict": r.verdict,
        }));
    }
    let (verdict, witness, code) = match report.overall {
        Verdict::Refuted { m } => ("refuted", Some(m), OK),
        Verdict::Inconclusive => ("inconclusive", None, INCONCLUSIVE),
    };
    match witness {
        Some(m) => writeln!(text, "refuted m={m}").expect("write"),
        None => writeln!(text, "inconclusive").expect("write"),
    }
    let value = json!({
        "command": "hilbert",
        "relation": rel_s,
        "route": route_name,
        "m_max": m_max,
        "rows": rows,
        "verdict": verdict,
        "witness_m": witness,
    });
    emit(out, text, value, code)
}

pub fn liouville(poly: &str, samples: &str, out: Output) -> Res {
    let mut p = parse_ints(poly)?;
    p.reverse();
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let root = largest_real_root(&p)?;
    let y = liouville_constant(&p, &root, 1 << 20)?;
    let fracs: Vec<BigRational> = match samples.strip_prefix("convergents:") {
        Some(n) => {
            let n: usize = n.parse().map_err(|_| usage("convergents:N needs an integer N"))?;
            if n == 0 {
                return Err(usage("convergents:N needs N >= 1"));
            }
            if n > 200 {
                return Err(resource("at most 200 convergents"));
            }
            convergents(&root, n, 64 + 8 * n as u32)
        }
        None => samples.split(',').map(|s| parse_rational(s.trim())).collect::<hmcreal::Result<_>>()?,
    };
    let w = liouville_check(&p, &root, &y, &fracs);
    let root_s = root.render(30);
    let mut text = format!("degree {}\nroot {root_s}\ny {}\n", w.degree, format_rational(&w.y));
    text.push_str("p/q |x-p/q| y/q^n status\n");
    let mut rows = Vec::new();
    for s in &w.samples {
        let status = match s.status {
            SampleStatus::Pass => "pass",
            SampleStatus::Undecided => "undecided",
            SampleStatus::Violation => "violation",
        };
        let lhs = hmcreal::exact::format_decimal_floor(&s.lhs, 30);
        writeln!(text, "{} {lhs} {} {status}", format_rational(&s.q), format_rational(&s.rhs)).expect("write");
        rows.push(json!({ "q": format_rational(&s.q), "lhs": lhs, "rhs": format_rational(&s.rhs), "status": status }));
    }
    let code = if w.samples.iter().any(|s| s.status == SampleStatus::Violation) {
        FAILED
    } else if w.all_pass() {
        OK
    } else {
        INCONCLUSIVE
    };
    let mut hf: Vec<String> = w.poly.iter().map(|c| c.to_string()).collect();
    hf.reverse();
    let value = json!({
        "command": "liouville",
        "poly": hf,
        "degree": w.degree,
        "root": root_s,
        "y": format_rational(&w.y),
        "samples": rows,
        "all_pass": w.all_pass(),
    });
    emit(out, text, value, code)
}

pub fn lambda(d: u32, y: &str, out: Output) -> Res {
    let y = parse_rational(y)?;
    let m = lambda_witness(d, &y)?;
    let (k, l) = lambda_approx(m)?;
    let lq = from_biguint(&l);
    // |lambda - k/l| <= 1/l^m < y / l^d
    let err_bound = BigRational::one() / num::pow(lq.clone(), m as usize);
    let threshold = &y / num::pow(lq, d as usize);
    let certified = lambda_error_certified(m);
    let violates = err_bound < threshold;
    let text = format!(
        "degree {d}\ny {}\nwitness m={m}\nk_m {k}\nl_m {l}\n|lambda - k_m/l_m| <= 1/l_m^m = {} certified={certified}\ny/l_m^d = {}\n1/l_m^m < y/l_m^d {violates}\n",
        format_rational(&y),
        format_rational(&err_bound),
        format_rational(&threshold),
    );
    let value = json!({
        "command": "lambda",
        "degree": d,
        "y": format_rational(&y),
        "m": m,
        "k_m": k.to_string(),
        "l_m": l.to_string(),
        "error_bound": format_rational(&err_bound),
        "error_certified": certified,
        "threshold": format_rational(&threshold),
        "violates": violates,
    });
    emit(out, text, value, if certified && violates { OK } else { FAILED })
}

pub fn fps(series: &str, shift: Option<&str>, terms: usize, digits: usize, out: Output) -> Res {
    if terms == 0 || digits == 0 {
        return Err(usage("--terms and --digits must be positive"));
    }
    if terms > 200 || digits > 1000 {
        return Err(resource("at most 200 terms and 1000 digits"));
    }
    let shift = shift.map(parse_rational).transpose()?;
    let f = if series == "exp" {
        match &shift {
            Some(x) => quasi_shift(&fps::exp(), &CReal::from_rational(x.clone())),
            None => fps::exp(),
        }
    } else if let Some(cs) = series.strip_prefix("poly:") {
        let cs: Vec<BigRational> = cs.split(',').map(|s| parse_rational(s.trim())).collect::<hmcreal::Result<_>>()?;
        // the quasi-shift of a polynomial is its Taylor shift, kept exact
        match &shift {
            Some(x) => fps::polynomial_rat(&shift_poly_exact(&cs, x)),
            None => fps::polynomial_rat(&cs),
        }
    } else {
        return Err(usage("--series must be exp or poly:c0,c1,..."));
    };
    let mut rows = Vec::new();
    for (n, x) in f.coeffs(terms).iter().enumerate() {
        rows.push(match x.as_rational() {
            Some(q) => json!({ "n": n, "exact": format_rational(q), "value": null, "error": null }),
            None => json!({ "n": n, "exact": null, "value": x.render_digits(digits), "error": format!("1e-{digits}") }),
        });
    }
    let value = json!({
        "command": "fps",
        "series": series,
        "shift": shift.as_ref().map(format_rational),
        "coefficients": rows,
    });
    emit(out, f.dump(terms, digits), value, OK)
}

pub fn northeast(stage: u64, out: Output) -> Res {
    if stage == 0 {
        return Err(usage("--stage must be at least 1"));
    }
    let s = build_stage(stage)?;
    let inv = s.check_invariants();
    let ok = inv.iter().all(|(_, b)| *b);
    let mut text = s.dump();
    for (name, b) in &inv {
        writeln!(text, "invariant {name} {}", if *b { "ok" } else { "FAIL" }).expect("write");
    }
    let segments: Vec<Value> = s
        .segments
        .iter()
        .map(|g| {
            json!({
                "left": g.left.to_string(),
                "right": g.right.to_string(),
                "offset": g.offset.to_string(),
                "blue": if g.blue_is_empty() { None } else { Some(g.blue.to_string()) },
            })
        })
        .collect();
    let invariants: serde_json::Map<String, Value> = inv.iter().map(|(n, b)| (n.to_string(), Value::Bool(*b))).collect();
    let value = json!({
        "command": "northeast",
        "stage": stage,
        "c": format_rational(&s.c),
        "jump": s.jump().to_string(),
        "segments": segments,
        "invariants": invariants,
    });
    emit(out, text, value, if ok { OK } else { FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_parsing() {
        assert_eq!(parse_tol("1/100").ok().map(|t| t.1), Some(100));
        assert_eq!(parse_tol("3/1000").ok().map(|t| t.1), Some(334));
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("-1/2").is_err());
        assert!(parse_tol("x").is_err());
    }

    #[test]
    fn integer_lists() {
        assert_eq!(parse_ints("-3, 1").ok(), Some(vec![BigInt::from(-3), BigInt::one()]));
        assert!(parse_ints("1,,2").is_err());
    }
}
