//! Facts about lines, pairs of lines and the ambient algebra, and a
//! forward-chaining engine over a fixed set of implications.
//!
//! Every rule is either an implication proved for elliptic algebras or one
//! of its contrapositives. Converses are never added.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subject {
    Algebra,
    Line(String),
    /// Ordered pair `(L, L')`.
    Pair(String, String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Algebra => write!(f, "algebra"),
            Subject::Line(l) => write!(f, "line:{l}"),
            Subject::Pair(a, b) => write!(f, "pair:{a},{b}"),
        }
    }
}

impl FromStr for Subject {
    type Err = ParseError;
    fn from_str(text: &str) -> Result<Self, ParseError> {
        let t = text.trim();
        if t == "algebra" {
            return Ok(Subject::Algebra);
        }
        if let Some(l) = t.strip_prefix("line:") {
            if valid_label(l) {
                return Ok(Subject::Line(l.to_string()));
            }
        }
        if let Some(rest) = t.strip_prefix("pair:") {
            if let Some((a, b)) = rest.split_once(',') {
                if valid_label(a) && valid_label(b) && a != b {
                    return Ok(Subject::Pair(a.to_string(), b.to_string()));
                }
            }
        }
        Err(ParseError::new(format!(
            "bad subject `{t}`; use algebra, line:<id> or pair:<id>,<id>"
        )))
    }
}

pub(crate) fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

macro_rules! predicates {
    ($( $(#[$doc:meta])* $variant:ident => $name:literal ),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Predicate {
            $( $(#[$doc])* $variant, )*
        }

        impl Predicate {
            pub const ALL: &'static [Predicate] = &[$(Predicate::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Predicate::$variant => $name,)* }
            }
        }

        impl FromStr for Predicate {
            type Err = ParseError;
            fn from_str(text: &str) -> Result<Self, ParseError> {
                match text.trim() {
                    $($name => Ok(Predicate::$variant),)*
                    other => Err(ParseError::new(format!("unknown predicate `{other}`"))),
                }
            }
        }
    };
}

predicates! {
    // A single line L = R/J.
    /// `Ext^1_R(J, J) = 0`
    SelfExtJJZero => "ext1-JJ-zero",
    /// `Ext^1_R(L, L) = 0`
    SelfExtLLZero => "ext1-LL-zero",
    /// `hilb End_R(J) = hilb R`: the line can be blown down.
    Contractible => "contractible",
    /// `hilb Hom_R(J, L) = s/(1-s)^2`
    SelfHomJL => "hom-JL-self-series",
    /// `(L . L) = -1`
    SelfDotMinusOne => "self-intersection-minus-one",
    /// `J°` is projective over `R°`.
    LineIdealProjective => "line-ideal-projective",
    /// `pdim L° < infinity`
    PdimFinite => "pdim-finite",
    /// L is the exceptional line of a blowup.
    Exceptional => "exceptional",
    /// `L°` has a nonsplit self-extension.
    NonsplitSelfExtension => "nonsplit-self-extension",

    // A pair with distinct divisors p != p'.
    /// `Ext^1_R(J, J') = 0`
    DistinctExtJJZero => "ext1-JJ'-zero",
    /// `hilb Ext^1_R(L, L') = hilb Hom_R(L, L')`
    DistinctExtEqualsHom => "ext1-LL'-equals-hom",
    /// `hilb R - hilb Hom_R(J, J') = 1/(1-s)`
    DistinctHomDeficit => "hom-JJ'-deficit-simple",
    /// `hilb Hom_R(J, L') = 1/(1-s)^2`
    DistinctHomJL => "hom-JL'-series-plain",
    /// `(L . L') = 0`
    DotZero => "intersection-zero",

    // A pair of non-isomorphic lines.
    /// `hilb Ext^1_R(J, J') = s^-1 + 1`
    TransverseExtJJ => "ext1-JJ'-two-terms",
    /// `X(L, L') = s^-1/(1-s)`
    TransverseX => "X-simple-pole",
    /// `hilb R - hilb Hom_R(J, J') = (1+s)/(1-s)`
    TransverseHomDeficit => "hom-JJ'-deficit-double",
    /// `hilb Hom_R(J, L') = s^-1/(1-s)^2`
    TransverseHomJL => "hom-JL'-series-shifted",
    /// `(L . L') = 1`
    DotOne => "intersection-one",
    Isomorphic => "isomorphic",

    // The algebra.
    /// `qgr R` is smooth, equivalently `R°` has finite global dimension.
    QgrSmooth => "qgr-smooth",
    /// `R°` is a simple ring.
    LocalizationSimple => "localization-simple",

    // Open statements, only ever declared.
    /// Smooth `qgr R` forces every self-intersection to be -1.
    ConjectureSmoothMinusOne => "conjecture-smooth-minus-one",
    /// No line of the unblown algebra has divisor `tau(p)`.
    ConjectureNoLineAtTauP => "conjecture-no-line-at-tau-p",
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A predicate about a subject, asserted or denied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub subject: Subject,
    pub predicate: Predicate,
    pub holds: bool,
}

impl Literal {
    pub fn new(subject: Subject, predicate: Predicate, holds: bool) -> Self {
        Self {
            subject,
            predicate,
            holds,
        }
    }

    pub fn line(label: &str, predicate: Predicate, holds: bool) -> Self {
        Self::new(Subject::Line(label.to_string()), predicate, holds)
    }

    pub fn pair(a: &str, b: &str, predicate: Predicate, holds: bool) -> Self {
        Self::new(
            Subject::Pair(a.to_string(), b.to_string()),
            predicate,
            holds,
        )
    }

    pub fn algebra(predicate: Predicate, holds: bool) -> Self {
        Self::new(Subject::Algebra, predicate, holds)
    }

    pub fn negated(&self) -> Self {
        Self {
            holds: !self.holds,
            ..self.clone()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.holds)
    }
}

/// Where a fact came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Follows from a known result; the anchor names it.
    Established(String),
    /// Supplied by the user.
    Declared,
    Derived {
        rule: String,
        premises: Vec<Literal>,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Established(a) => write!(f, "established:{a}"),
            Provenance::Declared => write!(f, "declared"),
            Provenance::Derived { rule, .. } => write!(f, "derived:{rule}"),
        }
    }
}

impl FromStr for Provenance {
    type Err = ParseError;
    fn from_str(text: &str) -> Result<Self, ParseError> {
        match text.trim() {
            "declared" => Ok(Provenance::Declared),
            t => t
                .strip_prefix("established:")
                .filter(|a| !a.is_empty())
                .map(|a| Provenance::Established(a.to_string()))
                .ok_or_else(|| ParseError::new(format!("bad provenance `{t}`"))),
        }
    }
}

/// One entry of a fact file: `<subject> <predicate> [true|false] [provenance]`.
pub fn parse_fact_line(line: &str) -> Result<(Literal, Provenance), ParseError> {
    let mut toks = line.split_whitespace();
    let subject: Subject = toks
        .next()
        .ok_or_else(|| ParseError::new("empty fact"))?
        .parse()?;
    let predicate: Predicate = toks
        .next()
        .ok_or_else(|| ParseError::new("fact is missing its predicate"))?
        .parse()?;
    let mut holds = true;
    let mut provenance = Provenance::Declared;
    for tok in toks {
        match tok {
            "true" => holds = true,
            "false" => holds = false,
            other => provenance = other.parse()?,
        }
    }
    check_subject_kind(&subject, predicate)?;
    Ok((Literal::new(subject, predicate, holds), provenance))
}

fn check_subject_kind(subject: &Subject, predicate: Predicate) -> Result<(), ParseError> {
    use Predicate::*;
    let ok = match predicate {
        SelfExtJJZero
        | SelfExtLLZero
        | Contractible
        | SelfHomJL
        | SelfDotMinusOne
        | LineIdealProjective
        | PdimFinite
        | Exceptional
        | NonsplitSelfExtension
        | ConjectureNoLineAtTauP => matches!(subject, Subject::Line(_)),
        DistinctExtJJZero | DistinctExtEqualsHom | DistinctHomDeficit | DistinctHomJL | DotZero
        | TransverseExtJJ | TransverseX | TransverseHomDeficit | TransverseHomJL | DotOne
        | Isomorphic => matches!(subject, Subject::Pair(..)),
        QgrSmooth | LocalizationSimple | ConjectureSmoothMinusOne => {
            matches!(subject, Subject::Algebra)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(ParseError::new(format!(
            "predicate {predicate} does not apply to {subject}"
        )))
    }
}

/// Facts with provenance; the first reason recorded for a literal wins.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FactBase {
    #[serde(with = "entries")]
    facts: BTreeMap<Literal, Provenance>,
}

/// Literal keys are structs, so the map travels as a list of pairs.
mod entries {
    use super::{Literal, Provenance};
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Literal, Provenance>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Literal, Provenance>, D::Error> {
        Ok(Vec::<(Literal, Provenance)>::deserialize(d)?
            .into_iter()
            .collect())
    }
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the literal was already present.
    pub fn insert(&mut self, lit: Literal, provenance: Provenance) -> bool {
        if self.facts.contains_key(&lit) {
            return false;
        }
        self.facts.insert(lit, provenance);
        true
    }

    pub fn declare(&mut self, lit: Literal) -> bool {
        self.insert(lit, Provenance::Declared)
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.facts.contains_key(lit)
    }

    /// `Some(true/false)` when known either way, `None` when open.
    pub fn status(&self, subject: &Subject, predicate: Predicate) -> Option<bool> {
        let pos = Literal::new(subject.clone(), predicate, true);
        let neg = pos.negated();
        match (self.contains(&pos), self.contains(&neg)) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    }

    pub fn provenance(&self, lit: &Literal) -> Option<&Provenance> {
        self.facts.get(lit)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Literal, &Provenance)> {
        self.facts.iter()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn lines(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for lit in self.facts.keys() {
            match &lit.subject {
                Subject::Line(l) => {
                    out.insert(l.clone());
                }
                Subject::Pair(a, b) => {
                    out.insert(a.clone());
                    out.insert(b.clone());
                }
                Subject::Algebra => {}
            }
        }
        out
    }

    /// Literals whose negation is also present.
    pub fn contradictions(&self) -> Vec<Literal> {
        self.facts
            .keys()
            .filter(|l| l.holds && self.contains(&l.negated()))
            .cloned()
            .collect()
    }

    /// Facts only in `self`, not in `base`.
    pub fn difference(&self, base: &FactBase) -> Vec<(Literal, Provenance)> {
        self.facts
            .iter()
            .filter(|(l, _)| !base.contains(l))
            .map(|(l, p)| (l.clone(), p.clone()))
            .collect()
    }

    /// Keep only facts about the given subjects.
    pub fn retain_subjects(&mut self, keep: impl Fn(&Subject) -> bool) {
        self.facts.retain(|l, _| keep(&l.subject));
    }
}

/// How the divisors of an ordered pair of distinct lines compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairDivisors {
    /// `Div L != Div L'`.
    Distinct,
    /// `Div L = Div L'`; the lines may or may not be isomorphic.
    Equal,
}

/// Pairs known to the engine; a pair's rules only fire when listed here.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairContext {
    pairs: BTreeMap<(String, String), PairDivisors>,
}

impl PairContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, a: &str, b: &str, divisors: PairDivisors) {
        self.pairs.insert((a.to_string(), b.to_string()), divisors);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<PairDivisors> {
        self.pairs.get(&(a.to_string(), b.to_string())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &PairDivisors)> {
        self.pairs.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub premises: Vec<Literal>,
    pub conclusion: Literal,
}

/// Result of running the engine to its fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Closure {
    pub facts: FactBase,
    pub contradictions: Vec<Literal>,
    /// Pairs with equal divisors but not known to be non-isomorphic: the
    /// distinct-divisor rules do not cover them.
    pub uncovered_pairs: Vec<(String, String)>,
}

impl Closure {
    pub fn derived(&self) -> impl Iterator<Item = (&Literal, &Provenance)> {
        self.facts
            .iter()
            .filter(|(_, p)| matches!(p, Provenance::Derived { .. }))
    }

    pub fn is_consistent(&self) -> bool {
        self.contradictions.is_empty()
    }

    pub fn status(&self, subject: &Subject, predicate: Predicate) -> Option<bool> {
        self.facts.status(subject, predicate)
    }
}

struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    fn new() -> Self {
        Self { rules: Vec::new() }
    }

    /// Add `premises => conclusion` and every contrapositive
    /// `(premises - {a}) + {not conclusion} => not a`.
    fn implication(&mut self, id: &str, premises: Vec<Literal>, conclusion: Literal) {
        for (i, p) in premises.iter().enumerate() {
            let mut others: Vec<Literal> = premises
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, l)| l.clone())
                .collect();
            others.push(conclusion.negated());
            self.rules.push(Rule {
                id: format!("{id} (contrapositive)"),
                premises: others,
                conclusion: p.negated(),
            });
        }
        self.rules.push(Rule {
            id: id.to_string(),
            premises,
            conclusion,
        });
    }

    /// `guard + a => b` for every ordered pair of distinct members.
    fn equivalent(&mut self, id: &str, guard: &[Literal], members: &[Literal]) {
        for a in members {
            for b in members {
                if a != b {
                    let mut prem = guard.to_vec();
                    prem.push(a.clone());
                    self.implication(id, prem, b.clone());
                }
            }
        }
    }
}

/// Ground rules for the given lines and pairs.
pub fn ground_rules(lines: &BTreeSet<String>, pairs: &PairContext) -> Vec<Rule> {
    use Predicate::*;
    let mut rs = RuleSet::new();
    let smooth = Literal::algebra(QgrSmooth, true);

    for l in lines {
        let lit = |p| Literal::line(l, p, true);
        let core = [
            lit(SelfExtJJZero),
            lit(SelfExtLLZero),
            lit(SelfHomJL),
            lit(SelfDotMinusOne),
        ];
        rs.equivalent("self-conditions-equivalent", &[], &core);
        for c in &core {
            rs.implication(
                "self-conditions-imply-contractible",
                vec![c.clone()],
                lit(Contractible),
            );
            rs.implication(
                "contractible-projective-upgrade",
                vec![lit(Contractible), lit(LineIdealProjective)],
                c.clone(),
            );
        }
        rs.implication(
            "smooth-gives-projective-line-ideal",
            vec![smooth.clone()],
            lit(LineIdealProjective),
        );
        rs.implication(
            "smooth-gives-finite-pdim",
            vec![smooth.clone()],
            lit(PdimFinite),
        );
        // J° projective <=> pdim L° <= 1 <=> pdim L° finite
        rs.implication(
            "finite-pdim-is-one",
            vec![lit(PdimFinite)],
            lit(LineIdealProjective),
        );
        rs.implication(
            "projective-ideal-bounds-pdim",
            vec![lit(LineIdealProjective)],
            lit(PdimFinite),
        );
        rs.implication(
            "exceptional-lines-contract",
            vec![lit(Exceptional)],
            lit(Contractible),
        );
        rs.implication(
            "nonsplit-self-extension-obstructs",
            vec![lit(NonsplitSelfExtension)],
            Literal::line(l, SelfExtLLZero, false),
        );
    }

    for ((a, b), divisors) in pairs.iter() {
        let lit = |p| Literal::pair(a, b, p, true);
        let proj_a = Literal::line(a, LineIdealProjective, true);
        let proj_b = Literal::line(b, LineIdealProjective, true);
        let minus_a = Literal::line(a, SelfDotMinusOne, true);
        let minus_b = Literal::line(b, SelfDotMinusOne, true);
        // non-isomorphism is automatic for distinct divisors
        let non_iso: Vec<Literal> = match divisors {
            PairDivisors::Distinct => vec![],
            PairDivisors::Equal => vec![lit(Isomorphic).negated()],
        };

        if *divisors == PairDivisors::Distinct {
            let core = [
                lit(DistinctExtJJZero),
                lit(DistinctExtEqualsHom),
                lit(DistinctHomJL),
                lit(DotZero),
            ];
            rs.equivalent("distinct-divisor-conditions-equivalent", &[], &core);
            for c in &core {
                rs.implication(
                    "distinct-divisor-conditions-imply-hom-deficit",
                    vec![c.clone()],
                    lit(DistinctHomDeficit),
                );
                for proj in [&proj_a, &proj_b] {
                    rs.implication(
                        "distinct-divisor-projective-upgrade",
                        vec![lit(DistinctHomDeficit), proj.clone()],
                        c.clone(),
                    );
                }
            }
        }

        // transverse conditions: (1) => (2) <=> (4) <=> (5), (1) => (3)
        let eq = [lit(TransverseX), lit(TransverseHomJL), lit(DotOne)];
        rs.equivalent("transverse-conditions-equivalent", &non_iso, &eq);
        let mut prem = non_iso.clone();
        prem.push(lit(TransverseExtJJ));
        rs.implication("transverse-ext-gives-pole", prem.clone(), lit(TransverseX));
        rs.implication(
            "transverse-ext-gives-hom-deficit",
            prem,
            lit(TransverseHomDeficit),
        );
        let all = [
            lit(TransverseExtJJ),
            lit(TransverseX),
            lit(TransverseHomDeficit),
            lit(TransverseHomJL),
            lit(DotOne),
        ];
        for hyp in [
            [proj_a.clone(), minus_a.clone()],
            [proj_b.clone(), minus_b.clone()],
        ] {
            let mut guard = non_iso.clone();
            guard.extend(hyp);
            rs.equivalent("transverse-projective-upgrade", &guard, &all);
        }

        // non-isomorphic lines meet with multiplicity 0 or 1
        let mut prem = non_iso.clone();
        prem.push(lit(DotZero).negated());
        rs.implication("intersection-range-non-isomorphic", prem, lit(DotOne));
        let mut prem = non_iso.clone();
        prem.push(lit(DotZero));
        rs.implication(
            "intersection-range-non-isomorphic",
            prem,
            lit(DotOne).negated(),
        );
    }

    let mut rules = rs.rules;
    rules.dedup();
    rules
}

/// Forward-chain from `facts` to the fixed point of the ground rules.
///
/// Semi-naive: each newly added literal only wakes the rules that mention it
/// as a premise. The agenda is processed in a fixed order, so the closure
/// and the recorded derivations are deterministic.
pub fn infer(facts: &FactBase, pairs: &PairContext) -> Closure {
    let mut lines = facts.lines();
    for ((a, b), _) in pairs.iter() {
        lines.insert(a.clone());
        lines.insert(b.clone());
    }
    let rules = ground_rules(&lines, pairs);

    let mut by_premise: BTreeMap<&Literal, Vec<usize>> = BTreeMap::new();
    for (i, r) in rules.iter().enumerate() {
        for p in &r.premises {
            by_premise.entry(p).or_default().push(i);
        }
    }

    let mut out = facts.clone();
    let mut agenda: VecDeque<Literal> = facts.iter().map(|(l, _)| l.clone()).collect();
    while let Some(lit) = agenda.pop_front() {
        let Some(candidates) = by_premise.get(&lit) else {
            continue;
        };
        for &i in candidates {
            let rule = &rules[i];
            if out.contains(&rule.conclusion) {
                continue;
            }
            if rule.premises.iter().all(|p| out.contains(p)) {
                out.insert(
                    rule.conclusion.clone(),
                    Provenance::Derived {
                        rule: rule.id.clone(),
                        premises: rule.premises.clone(),
                    },
                );
                agenda.push_back(rule.conclusion.clone());
            }
        }
    }

    let uncovered_pairs = pairs
        .iter()
        .filter(|(_, d)| **d == PairDivisors::Equal)
        .filter(|((a, b), _)| {
            out.status(&Subject::Pair(a.clone(), b.clone()), Predicate::Isomorphic) != Some(false)
        })
        .map(|(k, _)| k.clone())
        .collect();

    Closure {
        contradictions: out.contradictions(),
        facts: out,
        uncovered_pairs,
    }
}
