//! Line-oriented scenario scripts.
//!
//! ```text
//! # comments start with '#'
//! curve Q: a=0 b=-2; t=(3,5)      # optional concrete curve
//! bind A (3,5)                     # point for orbit A
//! relate B = A + 3                 # B is tau^3 of A
//! algebra 9*[M:0] smooth sklyanin-veronese
//! line L right [P:2]
//! blowup [P:0] pdim finite
//! blowdown E1
//! intersect E1 L C=s^-1
//! facts add line:E1 self-intersection-minus-one true
//! facts load extra.facts
//! expect degree 9
//! expect initial
//! report
//! ```
//!
//! Curve commands must precede `algebra`. Each command either succeeds as a
//! whole or leaves the state untouched.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::curve::{CurvePoint, Divisor, GenericityContext};
use crate::error::{Error, ParseError, Result};
use crate::exec::ExecutionMode;
use crate::facts::{parse_fact_line, Literal, Predicate, Subject};
use crate::hilbert::HilbertSeries;
use crate::intersection::{coverage, dot, infer_pair, ledger, PairRelation, ReportRecord};
use crate::surface::{AlgebraDescriptor, Family, LineModuleRef, PdimStatus, Smoothness};
use crate::tcr::{Side, TcrDescriptor};
use crate::weierstrass::OracleBinding;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Curve(Option<String>),
    Bind {
        orbit: String,
        coords: String,
    },
    Relate {
        b: String,
        a: String,
        k: i64,
    },
    Horizon(u64),
    Algebra {
        m: Divisor,
        smoothness: Smoothness,
        family: Family,
    },
    Line(LineModuleRef),
    Blowup {
        point: CurvePoint,
        pdim: PdimStatus,
    },
    Blowdown(String),
    Intersect {
        a: String,
        b: String,
        c: Option<HilbertSeries>,
    },
    FactAdd(String),
    FactLoad(PathBuf),
    Expect(Expectation),
    Report,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    Degree(i64),
    Smoothness(Smoothness),
    Initial,
    Fact(Literal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub line: usize,
    pub text: String,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Scenario {
    pub steps: Vec<Step>,
    /// Directory for relative `facts load` paths.
    pub base_dir: Option<PathBuf>,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(ParseError::new(format!("line {line}: {msg}")))
}

fn parse_command(line: usize, text: &str) -> Result<Command> {
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let words: Vec<&str> = rest.split_whitespace().collect();
    let perr = |m: String| parse_err(line, m);
    let cmd = match head {
        "curve" => {
            if rest == "generic" || rest.is_empty() {
                Command::Curve(None)
            } else {
                Command::Curve(Some(rest.to_string()))
            }
        }
        "bind" => match words.as_slice() {
            [orbit, coords] => Command::Bind {
                orbit: orbit.to_string(),
                coords: coords.to_string(),
            },
            _ => return Err(perr("expected `bind <orbit> (x,y)`".into())),
        },
        "relate" => {
            let compact: String = rest.split_whitespace().collect();
            let (b, rhs) = compact
                .split_once('=')
                .ok_or_else(|| perr("expected `relate B = A + k`".into()))?;
            let (a, k) = match rhs.find(['+', '-']) {
                Some(i) => (
                    &rhs[..i],
                    rhs[i..]
                        .trim_start_matches('+')
                        .parse::<i64>()
                        .map_err(|e| perr(e.to_string()))?,
                ),
                None => (rhs, 0),
            };
            Command::Relate {
                b: b.to_string(),
                a: a.to_string(),
                k,
            }
        }
        "horizon" => Command::Horizon(
            rest.parse()
                .map_err(|_| perr(format!("bad horizon `{rest}`")))?,
        ),
        "algebra" => {
            let mut m_text = Vec::new();
            let mut smoothness = Smoothness::Unknown;
            let mut family = Family::Generic;
            for w in &words {
                if let Ok(s) = w.parse::<Smoothness>() {
                    smoothness = s;
                } else if let Ok(f) = w.parse::<Family>() {
                    family = f;
                } else {
                    m_text.push(*w);
                }
            }
            let m: Divisor = m_text
                .join(" ")
                .parse()
                .map_err(|e: ParseError| perr(e.to_string()))?;
            Command::Algebra {
                m,
                smoothness,
                family,
            }
        }
        "line" => match words.as_slice() {
            [label, side, point] => {
                let side = match *side {
                    "right" => Side::Right,
                    "left" => Side::Left,
                    s => return Err(perr(format!("bad side `{s}`"))),
                };
                let p: CurvePoint = point.parse().map_err(|e: ParseError| perr(e.to_string()))?;
                Command::Line(LineModuleRef {
                    label: label.to_string(),
                    side,
                    div_point: p,
                    shift: 0,
                })
            }
            _ => return Err(perr("expected `line <label> right|left [X:k]`".into())),
        },
        "blowup" => {
            let (point, pdim) = match words.as_slice() {
                [p] => (p, PdimStatus::Unknown),
                [p, "pdim", status] => (
                    p,
                    status
                        .parse()
                        .map_err(|e: ParseError| perr(e.to_string()))?,
                ),
                _ => {
                    return Err(perr(
                        "expected `blowup [X:k] [pdim finite|infinite|unknown]`".into(),
                    ))
                }
            };
            Command::Blowup {
                point: point.parse().map_err(|e: ParseError| perr(e.to_string()))?,
                pdim,
            }
        }
        "blowdown" => match words.as_slice() {
            [label] => Command::Blowdown(label.to_string()),
            _ => return Err(perr("expected `blowdown <line>`".into())),
        },
        "intersect" => {
            let (names, c) = match rest.split_once("C=") {
                Some((names, c)) => (names, Some(c)),
                None => (rest, None),
            };
            let names: Vec<&str> = names.split_whitespace().collect();
            let [a, b] = names.as_slice() else {
                return Err(perr(
                    "expected `intersect <line> <line> [C=<series>]`".into(),
                ));
            };
            let c = c
                .map(|t| HilbertSeries::parse(t.trim()))
                .transpose()
                .map_err(|e| perr(e.to_string()))?;
            Command::Intersect {
                a: a.to_string(),
                b: b.to_string(),
                c,
            }
        }
        "facts" => match words.first() {
            Some(&"add") => {
                let fact = rest["add".len()..].trim();
                parse_fact_line(fact).map_err(|e| perr(e.to_string()))?;
                Command::FactAdd(fact.to_string())
            }
            Some(&"load") if words.len() == 2 => Command::FactLoad(PathBuf::from(words[1])),
            _ => {
                return Err(perr(
                    "expected `facts add <fact>` or `facts load <file>`".into(),
                ))
            }
        },
        "expect" => Command::Expect(match words.as_slice() {
            ["degree", d] => {
                Expectation::Degree(d.parse().map_err(|_| perr(format!("bad degree `{d}`")))?)
            }
            ["smoothness", s] => {
                Expectation::Smoothness(s.parse().map_err(|e: ParseError| perr(e.to_string()))?)
            }
            ["initial"] => Expectation::Initial,
            ["fact", ..] => {
                let (lit, _) = parse_fact_line(rest["fact".len()..].trim())
                    .map_err(|e| perr(e.to_string()))?;
                Expectation::Fact(lit)
            }
            _ => {
                return Err(perr(
                    "expected `expect degree|smoothness|initial|fact ...`".into(),
                ))
            }
        }),
        "report" if rest.is_empty() => Command::Report,
        other => return Err(perr(format!("unknown command `{other}`"))),
    };
    Ok(cmd)
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            steps.push(Step {
                line,
                text: body.to_string(),
                command: parse_command(line, body)?,
            });
        }
        Ok(Self {
            steps,
            base_dir: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Parse(ParseError::new(format!(
                "cannot read {}: {e}",
                path.display()
            )))
        })?;
        let mut s = Self::parse(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub window: i64,
    pub trace: bool,
    pub mode: ExecutionMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            window: 64,
            trace: false,
            mode: ExecutionMode::default(),
        }
    }
}

#[derive(Clone, Debug, Default)]
struct State {
    context: GenericityContext,
    horizon: Option<u64>,
    algebra: Option<AlgebraDescriptor>,
    initial: Option<AlgebraDescriptor>,
}

/// Records emitted so far and the final algebra, also on failure.
#[derive(Clone, Debug, Default)]
pub struct Run {
    pub records: Vec<ReportRecord>,
    pub algebra: Option<AlgebraDescriptor>,
    pub initial: Option<AlgebraDescriptor>,
}

fn algebra_mut<'a>(state: &'a mut State, what: &str) -> Result<&'a mut AlgebraDescriptor> {
    state
        .algebra
        .as_mut()
        .ok_or_else(|| Error::precondition(format!("`{what}` needs an `algebra` line first")))
}

fn check_subject(a: &AlgebraDescriptor, lit: &Literal) -> Result<()> {
    let labels: Vec<&String> = match &lit.subject {
        Subject::Algebra => vec![],
        Subject::Line(l) => vec![l],
        Subject::Pair(x, y) => vec![x, y],
    };
    for l in labels {
        a.line(l)?;
    }
    Ok(())
}

fn describe(step: &str, a: &AlgebraDescriptor, out: &mut Vec<ReportRecord>) {
    out.push(ReportRecord::new(step, "degree", a.mu(), "derived"));
    out.push(ReportRecord::new(step, "M", a.m(), "derived"));
    out.push(ReportRecord::new(
        step,
        "smoothness",
        a.smoothness(),
        "derived",
    ));
}

fn trace_rows(step: &str, a: &AlgebraDescriptor, opts: &RunOptions, out: &mut Vec<ReportRecord>) {
    if !opts.trace {
        return;
    }
    for row in a.tcr().hilb_b_rows(opts.window, opts.mode) {
        out.push(ReportRecord::new(
            step,
            &format!("h0 at degree {}", row.n),
            format!("{} for {}", row.h0, row.divisor),
            "derived:riemann-roch",
        ));
    }
}

fn execute(
    state: &mut State,
    step: &Step,
    base_dir: Option<&Path>,
    opts: &RunOptions,
) -> Result<Vec<ReportRecord>> {
    let mut out = Vec::new();
    let tag = step.text.as_str();
    let before_algebra = |state: &State, what: &str| -> Result<()> {
        if state.algebra.is_some() {
            return Err(Error::precondition(format!(
                "`{what}` must come before `algebra`"
            )));
        }
        Ok(())
    };
    match &step.command {
        Command::Curve(literal) => {
            before_algebra(state, "curve")?;
            match literal {
                None => state.context = GenericityContext::generic(),
                Some(text) => state.context.set_binding(OracleBinding::parse(text)?),
            }
        }
        Command::Bind { orbit, coords } => {
            before_algebra(state, "bind")?;
            state
                .context
                .binding_mut()
                .ok_or_else(|| Error::precondition("`bind` needs a concrete `curve` first"))?
                .bind_literal(orbit, coords)?;
        }
        Command::Relate { b, a, k } => {
            before_algebra(state, "relate")?;
            state.context.relate(b, a, *k)?;
        }
        Command::Horizon(h) => {
            before_algebra(state, "horizon")?;
            state.horizon = Some(*h);
        }
        Command::Algebra {
            m,
            smoothness,
            family,
        } => {
            if state.algebra.is_some() {
                return Err(Error::precondition("only one `algebra` line is allowed"));
            }
            let horizon = state
                .horizon
                .unwrap_or(crate::hilbert::DEFAULT_HORIZON as u64);
            state.context.check_binding(horizon)?;
            let tcr = TcrDescriptor::new(m.clone(), Arc::new(state.context.clone()))?;
            let a = AlgebraDescriptor::new(tcr, *smoothness, *family)?;
            describe(tag, &a, &mut out);
            trace_rows(tag, &a, opts, &mut out);
            state.initial = Some(a.clone());
            state.algebra = Some(a);
        }
        Command::Line(l) => {
            let a = algebra_mut(state, "line")?;
            a.add_line(l.clone())?;
            out.push(ReportRecord::new(tag, "line", l, "declared"));
        }
        Command::Blowup { point, pdim } => {
            let a = algebra_mut(state, "blowup")?;
            let up = a.blowup(point, *pdim)?;
            out.push(ReportRecord::new(
                tag,
                "exceptional line",
                &up.exceptional,
                "established",
            ));
            describe(tag, &up.algebra, &mut out);
            trace_rows(tag, &up.algebra, opts, &mut out);
            *a = up.algebra;
        }
        Command::Blowdown(label) => {
            let a = algebra_mut(state, "blowdown")?;
            let down = a.blowdown(label)?;
            out.push(ReportRecord::new(
                tag,
                "hilb R~ - hilb R",
                &down.series_delta,
                "derived",
            ));
            if down.series_delta != HilbertSeries::monomial_over(1, 3) {
                return Err(Error::inconsistency(format!(
                    "blowdown changed hilb R by {} rather than s/(1-s)^3",
                    down.series_delta
                )));
            }
            out.push(ReportRecord::new(
                tag,
                "undoes last blowup",
                down.undid_blowup,
                "derived",
            ));
            describe(tag, &down.algebra, &mut out);
            trace_rows(tag, &down.algebra, opts, &mut out);
            *a = down.algebra;
        }
        Command::Intersect { a: la, b: lb, c } => {
            let a = algebra_mut(state, "intersect")?;
            let l1 = a.line(la)?.clone();
            let l2 = a.line(lb)?.clone();
            if l1.side != l2.side {
                return Err(Error::precondition(
                    "intersect takes two lines on the same side",
                ));
            }
            let rel = if la == lb {
                PairRelation::SameLine
            } else {
                PairRelation::classify(a.tcr().context(), &l1.div_point, &l2.div_point)
            };
            out.push(ReportRecord::new(tag, "relation", rel, "derived"));
            let iso = a.closure().status(
                &Subject::Pair(la.clone(), lb.clone()),
                Predicate::Isomorphic,
            );
            out.push(ReportRecord::new(
                tag,
                "coverage",
                format!("{:?}", coverage(rel, iso)),
                "derived",
            ));
            let l = ledger(rel);
            out.push(ReportRecord::new(
                tag,
                "H",
                &l.h,
                "derived:point-module-hom",
            ));
            out.push(ReportRecord::new(
                tag,
                "E",
                &l.e,
                "derived:point-module-ext",
            ));
            for cand in &l.candidates {
                out.push(ReportRecord::new(
                    tag,
                    "candidate",
                    format!("C = {}, X = {}, dot = {}", cand.c, cand.x, cand.dot),
                    "derived:ledger",
                ));
            }
            if let Some(c) = c {
                let v = dot(rel, c)?;
                out.push(ReportRecord::new(
                    tag,
                    "(L . L')",
                    v,
                    "derived:coefficient-sum",
                ));
            }
            if la != lb {
                let closure = infer_pair(a.facts(), la, lb, rel);
                for (lit, prov) in closure.derived() {
                    if matches!(&lit.subject, Subject::Pair(x, y) if x == la && y == lb) {
                        out.push(ReportRecord::new(tag, "pair fact", lit, &prov.to_string()));
                    }
                }
            }
        }
        Command::FactAdd(text) => {
            let (lit, prov) = parse_fact_line(text)?;
            let a = algebra_mut(state, "facts add")?;
            check_subject(a, &lit)?;
            a.add_fact(lit.clone(), prov.clone());
            out.push(ReportRecord::new(tag, "fact", lit, &prov.to_string()));
        }
        Command::FactLoad(path) => {
            let full = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            let text = std::fs::read_to_string(&full).map_err(|e| {
                Error::Parse(ParseError::new(format!(
                    "cannot read {}: {e}",
                    full.display()
                )))
            })?;
            let a = algebra_mut(state, "facts load")?;
            for (i, raw) in text.lines().enumerate() {
                let body = raw.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let (lit, prov) = parse_fact_line(body).map_err(|e| {
                    ParseError::new(format!("{} line {}: {e}", full.display(), i + 1))
                })?;
                check_subject(a, &lit)?;
                a.add_fact(lit.clone(), prov.clone());
                out.push(ReportRecord::new(tag, "fact", lit, &prov.to_string()));
            }
        }
        Command::Expect(e) => {
            let a = algebra_mut(state, "expect")?;
            let ok = match e {
                Expectation::Degree(d) => a.mu() == *d,
                Expectation::Smoothness(s) => a.smoothness() == *s,
                Expectation::Initial => state.initial.as_ref() == state.algebra.as_ref(),
                Expectation::Fact(lit) => a.closure().facts.contains(lit),
            };
            if !ok {
                return Err(Error::inconsistency(format!("expectation failed: {tag}")));
            }
            out.push(ReportRecord::new(tag, "expectation", "holds", "derived"));
        }
        Command::Report => {
            let a = algebra_mut(state, "report")?;
            describe(tag, a, &mut out);
            out.push(ReportRecord::new(tag, "hilb R", a.hilb_r(), "derived"));
            for ev in a.history() {
                out.push(ReportRecord::new(tag, "history", ev, "derived"));
            }
            for l in a.lines().values() {
                out.push(ReportRecord::new(tag, "line", l, "derived"));
            }
            let closure = a.closure();
            for (lit, prov) in closure.facts.iter() {
                out.push(ReportRecord::new(tag, "fact", lit, &prov.to_string()));
            }
            for (x, y) in &closure.uncovered_pairs {
                out.push(ReportRecord::new(
                    tag,
                    "outside rule coverage",
                    format!("{x}, {y}: equal divisors, isomorphism unknown"),
                    "derived",
                ));
            }
            if !closure.is_consistent() {
                let names: Vec<String> = closure
                    .contradictions
                    .iter()
                    .map(|l| l.to_string())
                    .collect();
                return Err(Error::inconsistency(format!(
                    "contradictory facts: {}",
                    names.join(", ")
                )));
            }
        }
    }
    Ok(out)
}

/// Run every step in order; stops at the first failure, returning the
/// records so far along with the error.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> (Run, Option<(usize, Error)>) {
    let mut state = State::default();
    let mut result = Run::default();
    for step in &scenario.steps {
        let mut next = state.clone();
        match execute(&mut next, step, scenario.base_dir.as_deref(), opts) {
            Ok(records) => {
                result.records.extend(records);
                state = next;
            }
            Err(e) => {
                result.algebra = state.algebra;
                result.initial = state.initial;
                return (result, Some((step.line, e)));
            }
        }
    }
    result.algebra = state.algebra;
    result.initial = state.initial;
    (result, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str) -> (Run, Option<(usize, Error)>) {
        run(&Scenario::parse(text).unwrap(), &RunOptions::default())
    }

    #[test]
    fn roundtrip_scenario() {
        let (r, err) = run_text(
            "algebra 9*[M:0] smooth\nblowup [P:0] pdim finite\nexpect degree 8\nblowdown E1\nexpect initial\nreport\n",
        );
        assert!(err.is_none(), "{err:?}");
        assert_eq!(r.algebra, r.initial);
    }

    #[test]
    fn degree_floor_is_a_precondition() {
        let (_, err) = run_text("algebra 3*[M:0]\nblowup [P:0]\n");
        let (line, e) = err.unwrap();
        assert_eq!(line, 2);
        assert!(matches!(e, Error::Precondition(m) if m.contains("degree at least 4")));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Scenario::parse("algebra 9*[M:0]\n\nfrobnicate\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
        assert!(Scenario::parse("relate B A").is_err());
        assert!(Scenario::parse("facts add line:L nonsense").is_err());
    }

    #[test]
    fn failed_steps_leave_state() {
        let (r, err) = run_text("algebra 9*[M:0]\nline L right [P:0]\nblowdown L\n");
        assert!(matches!(err, Some((3, Error::Precondition(_)))));
        assert_eq!(r.algebra.unwrap().mu(), 9);
    }

    #[test]
    fn relations_and_intersections() {
        let (r, err) = run_text(
            "relate B = A + 2\nalgebra 5*[M:0]\nline L right [B:0]\nline K right [A:0]\nintersect L K C=s^-1\nintersect L L C=0\n",
        );
        assert!(err.is_none(), "{err:?}");
        let rel = r.records.iter().find(|x| x.anchor == "relation").unwrap();
        assert_eq!(rel.value, "on_orbit(2)");
        let dots: Vec<_> = r
            .records
            .iter()
            .filter(|x| x.anchor == "(L . L')")
            .map(|x| x.value.clone())
            .collect();
        assert_eq!(dots, vec!["0", "-1"]);
    }

    #[test]
    fn oracle_binding_checks() {
        let ok = "curve Q: a=0 b=-2; t=(3,5)\nbind A (3,5)\nalgebra 4*[A:0]\nreport\n";
        assert!(run_text(ok).1.is_none());
        // A and B coincide up to translation but no relation is declared
        let bad = "curve Q: a=0 b=-2; t=(3,5)\nbind A (3,5)\nbind B (3,5)\nalgebra 4*[A:0]\n";
        assert!(matches!(
            run_text(bad).1,
            Some((4, Error::Inconsistency(_)))
        ));
        let late = "algebra 4*[A:0]\nrelate B = A + 1\n";
        assert!(matches!(
            run_text(late).1,
            Some((2, Error::Precondition(_)))
        ));
    }

    #[test]
    fn expectations_and_facts() {
        let text = "algebra 8*[M:0] smooth\nline L right [P:0]\nfacts add line:L self-intersection-minus-one\nexpect fact line:L ext1-LL-zero true\nblowdown L\nexpect degree 9\nexpect smoothness smooth\n";
        let (_, err) = run_text(text);
        assert!(err.is_none(), "{err:?}");
        let (_, err) = run_text("algebra 8*[M:0]\nexpect degree 7\n");
        assert!(matches!(err, Some((2, Error::Inconsistency(_)))));
        let (_, err) = run_text("algebra 8*[M:0]\nfacts add line:Z exceptional\n");
        assert!(matches!(err, Some((2, Error::Precondition(_)))));
    }

    #[test]
    fn trace_rows_are_emitted() {
        let s = Scenario::parse("algebra 3*[M:0]\n").unwrap();
        let (r, _) = run(
            &s,
            &RunOptions {
                window: 5,
                trace: true,
                mode: ExecutionMode::Sequential,
            },
        );
        assert_eq!(
            r.records
                .iter()
                .filter(|x| x.anchor.starts_with("h0"))
                .count(),
            6
        );
    }
}
