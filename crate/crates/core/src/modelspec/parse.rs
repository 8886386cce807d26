use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{DensityDecl, EvidenceDecl, Generator, ModelDocument, Prior, QuestionDecl};
use crate::dese::Measuring;
use crate::genprob::SufficiencyRule;
use crate::normality::KnowledgeVariant;
use crate::scalar::{parse_rational, Rational};
use crate::scenarios::racing::RacingQuestion;

/// Largest state range a single `a..b` may expand to.
const MAX_RANGE: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

/// A positioned message; lines and columns start at 1 and count characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into(), severity: Severity::Error }
    }

    fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into(), severity: Severity::Warning }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Characters that cannot appear in a name or value.
pub(crate) fn is_special(c: char) -> bool {
    c.is_whitespace() || matches!(c, '{' | '}' | ',' | '=' | ':' | '#' | '@')
}

/// Whether `s` can be written as a bare name.
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(is_special) && int_range(s).is_none()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Comma,
    Eq,
    Colon,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "{w:?}"),
            Tok::Open => f.write_str("'{'"),
            Tok::Close => f.write_str("'}'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eq => f.write_str("'='"),
            Tok::Colon => f.write_str("':'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned<T> {
    value: T,
    line: usize,
    col: usize,
}

fn lex(line: &str, ln: usize) -> Vec<Spanned<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '#' => break,
            '{' => Some(Tok::Open),
            '}' => Some(Tok::Close),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Spanned { value: t, line: ln, col });
            i += 1;
        } else if c.is_whitespace() || c == '@' {
            if c == '@' {
                out.push(Spanned { value: Tok::Word("@".into()), line: ln, col });
            }
            i += 1;
        } else {
            let start = i;
            while i < chars.len() && !is_special(chars[i]) {
                i += 1;
            }
            out.push(Spanned { value: Tok::Word(chars[start..i].iter().collect()), line: ln, col });
        }
    }
    out
}

/// `"3..7"` as `(3, 7)`.
fn int_range(s: &str) -> Option<(u64, u64)> {
    let (a, b) = s.split_once("..")?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

struct Cursor<'a> {
    toks: &'a [Spanned<Tok>],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Spanned<Tok>> {
        self.toks.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or((self.line, self.end_col), |t| (t.line, t.col))
    }

    fn err(&self, msg: impl Into<String>) -> Diagnostic {
        let (l, c) = self.here();
        Diagnostic::error(l, c, msg)
    }

    fn word(&mut self, what: &str) -> Result<Spanned<String>, Diagnostic> {
        match self.peek() {
            Some(Spanned { value: Tok::Word(w), line, col }) if w != "@" => {
                self.pos += 1;
                Ok(Spanned { value: w.clone(), line: *line, col: *col })
            }
            Some(t) => Err(self.err(format!("expected {what}, found {}", t.value))),
            None => Err(self.err(format!("expected {what}, found end of line"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), Diagnostic> {
        match self.peek() {
            Some(t) if t.value == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {tok}, found {}", t.value))),
            None => Err(self.err(format!("expected {tok}, found end of line"))),
        }
    }

    fn skip_comma(&mut self) {
        if matches!(self.peek(), Some(Spanned { value: Tok::Comma, .. })) {
            self.pos += 1;
        }
    }

    fn finish(&mut self) -> Result<(), Diagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected {}", t.value))),
        }
    }

    /// `name=value` pairs up to the end of the line.
    fn pairs(&mut self) -> Result<Vec<(Spanned<String>, Spanned<String>)>, Diagnostic> {
        let mut out = Vec::new();
        while !self.at_end() {
            let k = self.word("a name")?;
            self.expect(Tok::Eq)?;
            let v = self.word("a value")?;
            out.push((k, v));
            self.skip_comma();
        }
        Ok(out)
    }

    /// Names up to `}` (consumed) or the end of the line, with `a..b` ranges
    /// expanded.
    fn names(&mut self, braced: bool) -> Result<Vec<Spanned<String>>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None if braced => return Err(self.err("expected '}', found end of line")),
                None => return Ok(out),
                Some(Spanned { value: Tok::Close, .. }) if braced => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(Spanned { value: Tok::Comma, .. }) => self.pos += 1,
                _ => {
                    let w = self.word("a state name")?;
                    match int_range(&w.value) {
                        Some((a, b)) if a > b => {
                            return Err(Diagnostic::error(w.line, w.col, format!("empty range {}", w.value)))
                        }
                        Some((a, b)) if b - a >= MAX_RANGE => {
                            return Err(Diagnostic::error(w.line, w.col, format!("range {} is too long", w.value)))
                        }
                        Some((a, b)) => {
                            out.extend((a..=b).map(|n| Spanned { value: n.to_string(), line: w.line, col: w.col }))
                        }
                        None => out.push(w),
                    }
                }
            }
        }
    }
}

#[derive(Default)]
struct Draft {
    states: Vec<Spanned<String>>,
    evidence: Vec<(Spanned<String>, Vec<Spanned<String>>)>,
    prior_uniform: Option<(usize, usize)>,
    prior: Vec<(Spanned<String>, Spanned<Rational>)>,
    question: Option<Spanned<QuestionDraft>>,
    threshold: Option<Spanned<Rational>>,
    rule: Option<Spanned<SufficiencyRule>>,
    variant: Option<Spanned<KnowledgeVariant>>,
    generator: Option<Spanned<Generator>>,
    density: Option<Spanned<DensityDecl>>,
    measuring: Option<Spanned<Measuring>>,
}

enum QuestionDraft {
    Finest,
    Partition(Vec<Vec<Spanned<String>>>),
    Labels(Vec<(Spanned<String>, Spanned<String>)>),
}

fn number(w: &Spanned<String>) -> Result<Spanned<Rational>, Diagnostic> {
    parse_rational(&w.value)
        .map(|r| Spanned { value: r, line: w.line, col: w.col })
        .ok_or_else(|| Diagnostic::error(w.line, w.col, format!("{:?} is not a number", w.value)))
}

fn count(w: &Spanned<String>, what: &str) -> Result<u32, Diagnostic> {
    match w.value.parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Diagnostic::error(w.line, w.col, format!("{what} must be a positive integer"))),
    }
}

fn set_once<T>(slot: &mut Option<Spanned<T>>, v: T, line: usize, col: usize, key: &str) -> Result<(), Diagnostic> {
    if slot.is_some() {
        return Err(Diagnostic::error(line, col, format!("duplicate {key}")));
    }
    *slot = Some(Spanned { value: v, line, col });
    Ok(())
}

/// Named parameters, each allowed once, from a fixed list.
fn params<'a>(
    pairs: &'a [(Spanned<String>, Spanned<String>)],
    allowed: &[&str],
) -> Result<HashMap<&'a str, &'a Spanned<String>>, Diagnostic> {
    let mut out = HashMap::new();
    for (k, v) in pairs {
        if !allowed.contains(&k.value.as_str()) {
            return Err(Diagnostic::error(
                k.line,
                k.col,
                format!("unknown parameter {:?} (expected one of {})", k.value, allowed.join(", ")),
            ));
        }
        if out.insert(k.value.as_str(), v).is_some() {
            return Err(Diagnostic::error(k.line, k.col, format!("duplicate parameter {:?}", k.value)));
        }
    }
    Ok(out)
}

fn required<'a>(
    p: &HashMap<&str, &'a Spanned<String>>,
    key: &str,
    line: usize,
    col: usize,
) -> Result<&'a Spanned<String>, Diagnostic> {
    p.get(key).copied().ok_or_else(|| Diagnostic::error(line, col, format!("missing parameter {key}")))
}

fn parse_generator(kind: &Spanned<String>, pairs: &[(Spanned<String>, Spanned<String>)]) -> Result<Generator, Diagnostic> {
    let (l, c) = (kind.line, kind.col);
    match kind.value.as_str() {
        "geometric" => {
            let p = params(pairs, &["depth", "bounded"])?;
            let depth = p.get("depth").map(|w| count(w, "depth")).transpose()?;
            let mut bounded = Vec::new();
            if let Some(w) = p.get("bounded") {
                for part in w.value.split(';') {
                    match int_range(part) {
                        Some((a, b)) if a >= 1 && a <= b && b <= u32::MAX as u64 => bounded.push((a as u32, b as u32)),
                        _ => return Err(Diagnostic::error(w.line, w.col, format!("bad bounded range {part:?}"))),
                    }
                }
            }
            Ok(Generator::Geometric { depth, bounded })
        }
        "racing" => {
            let p = params(pairs, &["coins", "question", "depth"])?;
            let coins = p.get("coins").map(|w| count(w, "coins")).transpose()?.unwrap_or(10);
            let q = required(&p, "question", l, c)?;
            let question = RacingQuestion::parse(&q.value)
                .ok_or_else(|| Diagnostic::error(q.line, q.col, format!("unknown racing question {:?}", q.value)))?;
            let depth = p.get("depth").map(|w| count(w, "depth")).transpose()?;
            Ok(Generator::Racing { coins, question, depth })
        }
        "decay" => {
            let p = params(pairs, &["rate", "now"])?;
            let rate = p.get("rate").map(|w| number(w)).transpose()?.map_or_else(Rational::one, |s| s.value);
            let now = p.get("now").map(|w| number(w)).transpose()?.map_or_else(Rational::one, |s| s.value);
            if !rate.is_positive() || now.is_negative() {
                return Err(Diagnostic::error(l, c, "decay needs rate > 0 and now >= 0"));
            }
            Ok(Generator::Decay { rate, now })
        }
        other => Err(Diagnostic::error(l, c, format!("unknown generator {other:?} (expected geometric, racing or decay)"))),
    }
}

fn parse_density(kind: &Spanned<String>, pairs: &[(Spanned<String>, Spanned<String>)]) -> Result<DensityDecl, Diagnostic> {
    let (l, c) = (kind.line, kind.col);
    let get = |p: &HashMap<&str, &Spanned<String>>, k: &str| -> Result<Rational, Diagnostic> {
        Ok(number(required(p, k, l, c)?)?.value)
    };
    let positive = |r: Rational, what: &str| {
        if r.is_positive() {
            Ok(r)
        } else {
            Err(Diagnostic::error(l, c, format!("{what} must be positive")))
        }
    };
    match kind.value.as_str() {
        "gaussian" => {
            let p = params(pairs, &["mu", "sigma"])?;
            Ok(DensityDecl::Gaussian { mu: get(&p, "mu")?, sigma: positive(get(&p, "sigma")?, "sigma")? })
        }
        "uniform" => {
            let p = params(pairs, &["lo", "hi"])?;
            let (lo, hi) = (get(&p, "lo")?, get(&p, "hi")?);
            if lo >= hi {
                return Err(Diagnostic::error(l, c, "uniform needs lo < hi"));
            }
            Ok(DensityDecl::Uniform { lo, hi })
        }
        "exponential" => {
            let p = params(pairs, &["rate"])?;
            Ok(DensityDecl::Exponential { rate: positive(get(&p, "rate")?, "rate")? })
        }
        "wrapped-normal" => {
            let p = params(pairs, &["center", "sigma"])?;
            Ok(DensityDecl::WrappedNormal { center: get(&p, "center")?, sigma: positive(get(&p, "sigma")?, "sigma")? })
        }
        other => Err(Diagnostic::error(
            l,
            c,
            format!("unknown density {other:?} (expected gaussian, uniform, exponential or wrapped-normal)"),
        )),
    }
}

fn parse_line(cur: &mut Cursor, draft: &mut Draft) -> Result<(), Diagnostic> {
    let key = cur.word("a key")?;
    let (l, c) = (key.line, key.col);
    if key.value == "evidence" {
        let name = cur.word("an evidence name")?;
        cur.expect(Tok::Eq)?;
        cur.expect(Tok::Open)?;
        let members = cur.names(true)?;
        cur.finish()?;
        draft.evidence.push((name, members));
        return Ok(());
    }
    cur.expect(Tok::Colon)?;
    match key.value.as_str() {
        "states" => draft.states.extend(cur.names(false)?),
        "prior" => {
            if let Some(Spanned { value: Tok::Word(w), line, col }) = cur.peek() {
                if w == "uniform" {
                    cur.pos += 1;
                    cur.finish()?;
                    if draft.prior_uniform.is_some() || !draft.prior.is_empty() {
                        return Err(Diagnostic::error(*line, *col, "duplicate prior"));
                    }
                    draft.prior_uniform = Some((*line, *col));
                    return Ok(());
                }
            }
            if let Some((pl, pc)) = draft.prior_uniform {
                return Err(Diagnostic::error(l, c, format!("prior already declared uniform at {pl}:{pc}")));
            }
            for (k, v) in cur.pairs()? {
                let p = number(&v)?;
                draft.prior.push((k, p));
            }
        }
        "question" => {
            let q = match cur.peek() {
                None => QuestionDraft::Finest,
                Some(Spanned { value: Tok::Word(w), .. }) if w == "finest" => {
                    cur.pos += 1;
                    QuestionDraft::Finest
                }
                Some(Spanned { value: Tok::Open, .. }) => {
                    let mut blocks = Vec::new();
                    while !cur.at_end() {
                        cur.expect(Tok::Open)?;
                        blocks.push(cur.names(true)?);
                        cur.skip_comma();
                    }
                    QuestionDraft::Partition(blocks)
                }
                _ => QuestionDraft::Labels(cur.pairs()?),
            };
            cur.finish()?;
            set_once(&mut draft.question, q, l, c, "question")?;
        }
        "threshold" => {
            let w = cur.word("a threshold")?;
            cur.finish()?;
            let t = number(&w)?;
            if !t.value.is_positive() || t.value > Rational::one() {
                return Err(Diagnostic::error(w.line, w.col, format!("threshold {} is not in (0, 1]", w.value)));
            }
            set_once(&mut draft.threshold, t.value, l, c, "threshold")?;
        }
        "rule" => {
            let w = cur.word("a rule")?;
            cur.finish()?;
            let r = match w.value.as_str() {
                "sufficiency" => SufficiencyRule::Sufficiency,
                "sufficiency-plus" | "sufficiency+" => SufficiencyRule::SufficiencyPlus,
                other => {
                    return Err(Diagnostic::error(
                        w.line,
                        w.col,
                        format!("unknown rule {other:?} (expected sufficiency or sufficiency-plus)"),
                    ))
                }
            };
            set_once(&mut draft.rule, r, l, c, "rule")?;
        }
        "variant" => {
            let w = cur.word("a knowledge variant")?;
            cur.finish()?;
            let v = parse_variant(&w.value).ok_or_else(|| {
                Diagnostic::error(w.line, w.col, format!("unknown variant {:?} (expected stalnaker or williamson)", w.value))
            })?;
            set_once(&mut draft.variant, v, l, c, "variant")?;
        }
        "generator" => {
            let kind = cur.word("a generator name")?;
            let g = parse_generator(&kind, &cur.pairs()?)?;
            set_once(&mut draft.generator, g, l, c, "generator")?;
        }
        "density" => {
            let kind = cur.word("a density name")?;
            let d = parse_density(&kind, &cur.pairs()?)?;
            set_once(&mut draft.density, d, l, c, "density")?;
        }
        "measuring" => {
            let w = cur.word("a measuring function")?;
            cur.finish()?;
            let m = match w.value.as_str() {
                "index" => Measuring::Index,
                "log" | "logarithmic" => Measuring::Logarithmic,
                other => {
                    return Err(Diagnostic::error(w.line, w.col, format!("unknown measuring {other:?} (expected index or log)")))
                }
            };
            set_once(&mut draft.measuring, m, l, c, "measuring")?;
        }
        other => return Err(Diagnostic::error(l, c, format!("unknown key {other:?}"))),
    }
    Ok(())
}

pub fn parse_variant(s: &str) -> Option<KnowledgeVariant> {
    match s {
        "stalnaker" | "stalnakerian" => Some(KnowledgeVariant::Stalnakerian),
        "williamson" | "williamsonian" => Some(KnowledgeVariant::Williamsonian),
        _ => None,
    }
}

fn check(draft: Draft, diags: &mut Vec<Diagnostic>) -> Option<ModelDocument> {
    let before = diags.iter().filter(|d| d.severity == Severity::Error).count();
    let mut err = |l: usize, c: usize, m: String| diags.push(Diagnostic::error(l, c, m));

    let mut known: HashSet<&str> = HashSet::new();
    for s in &draft.states {
        if !known.insert(&s.value) {
            err(s.line, s.col, format!("duplicate state id {:?}", s.value));
        }
    }
    let enumerated = !draft.states.is_empty() || !draft.evidence.is_empty();
    let kinds = [
        draft.generator.as_ref().map(|g| (g.line, g.col, "generator")),
        draft.density.as_ref().map(|d| (d.line, d.col, "density")),
    ];
    let mut explicit = kinds.iter().flatten();
    if let (Some(a), Some(b)) = (explicit.next(), explicit.next()) {
        err(b.0, b.1, format!("a model cannot have both a {} and a {}", a.2, b.2));
    }
    if let Some(&(l, c, what)) = kinds.iter().flatten().next() {
        if enumerated {
            err(l, c, format!("a {what} model cannot also list states or evidence"));
        }
        if !draft.prior.is_empty() {
            err(draft.prior[0].0.line, draft.prior[0].0.col, format!("a {what} model takes no prior"));
        }
    } else if draft.states.is_empty() {
        err(1, 1, "no states declared".into());
    }

    let mut evidence_names = HashSet::new();
    for (name, members) in &draft.evidence {
        if !is_valid_name(&name.value) {
            err(name.line, name.col, format!("{:?} cannot name evidence", name.value));
        }
        if !evidence_names.insert(name.value.as_str()) {
            err(name.line, name.col, format!("duplicate evidence name {:?}", name.value));
        }
        if members.is_empty() {
            err(name.line, name.col, format!("evidence {} is empty", name.value));
        }
        let mut seen = HashSet::new();
        for m in members {
            if !known.contains(m.value.as_str()) {
                err(m.line, m.col, format!("state {:?} in evidence {} is not declared", m.value, name.value));
            } else if !seen.insert(m.value.as_str()) {
                err(m.line, m.col, format!("state {:?} listed twice in evidence {}", m.value, name.value));
            }
        }
    }

    let mut prior_of: HashMap<&str, &Rational> = HashMap::new();
    for (k, v) in &draft.prior {
        if !known.contains(k.value.as_str()) {
            err(k.line, k.col, format!("prior for undeclared state {:?}", k.value));
        } else if prior_of.insert(&k.value, &v.value).is_some() {
            err(k.line, k.col, format!("duplicate prior for state {:?}", k.value));
        }
        if v.value.is_negative() {
            err(v.line, v.col, format!("negative prior for state {:?}", k.value));
        }
    }
    if let Some((first, _)) = draft.prior.first() {
        let mut missing = draft.states.iter().filter(|s| !prior_of.contains_key(s.value.as_str()));
        if let Some(s) = missing.next() {
            err(s.line, s.col, format!("no prior for state {:?}", s.value));
        }
        let total: Rational = draft.prior.iter().map(|(_, v)| v.value.clone()).sum();
        if total != Rational::one() {
            err(first.line, first.col, format!("prior mass {total} ≠ 1"));
        }
        for (k, v) in &draft.prior {
            if v.value.is_zero() {
                diags.push(Diagnostic::warning(k.line, k.col, format!("state {:?} has zero prior", k.value)));
            }
        }
    }
    let mut err = |l: usize, c: usize, m: String| diags.push(Diagnostic::error(l, c, m));

    let question = match draft.question.as_ref().map(|q| &q.value) {
        None | Some(QuestionDraft::Finest) => QuestionDecl::Finest,
        Some(QuestionDraft::Partition(blocks)) => {
            let mut seen = HashSet::new();
            for m in blocks.iter().flatten() {
                if !known.contains(m.value.as_str()) {
                    err(m.line, m.col, format!("question mentions undeclared state {:?}", m.value));
                } else if !seen.insert(m.value.as_str()) {
                    err(m.line, m.col, format!("state {:?} is in two answers", m.value));
                }
            }
            if let Some(q) = &draft.question {
                if blocks.iter().any(|b| b.is_empty()) {
                    err(q.line, q.col, "question has an empty answer".into());
                }
                if let Some(s) = draft.states.iter().find(|s| !seen.contains(s.value.as_str())) {
                    err(q.line, q.col, format!("state {:?} is in no answer", s.value));
                }
            }
            QuestionDecl::Partition(blocks.iter().map(|b| b.iter().map(|s| s.value.clone()).collect()).collect())
        }
        Some(QuestionDraft::Labels(pairs)) => {
            let mut seen = HashSet::new();
            for (k, _) in pairs {
                if !known.contains(k.value.as_str()) {
                    err(k.line, k.col, format!("question labels undeclared state {:?}", k.value));
                } else if !seen.insert(k.value.as_str()) {
                    err(k.line, k.col, format!("state {:?} is labelled twice", k.value));
                }
            }
            if let Some(q) = &draft.question {
                if let Some(s) = draft.states.iter().find(|s| !seen.contains(s.value.as_str())) {
                    err(q.line, q.col, format!("state {:?} has no label", s.value));
                }
            }
            QuestionDecl::Labels(pairs.iter().map(|(k, v)| (k.value.clone(), v.value.clone())).collect())
        }
    };
    if let (Some(q), false) = (&draft.question, enumerated) {
        if !matches!(q.value, QuestionDraft::Finest) {
            err(q.line, q.col, "only enumerated models take a question".into());
        }
    }
    if draft.threshold.is_none() {
        err(1, 1, "missing threshold".into());
    }
    if let Some(m) = &draft.measuring {
        if !matches!(draft.generator.as_ref().map(|g| &g.value), Some(Generator::Decay { .. })) {
            diags.push(Diagnostic::warning(m.line, m.col, "measuring only applies to decay models"));
        }
    }

    if diags.iter().filter(|d| d.severity == Severity::Error).count() > before {
        return None;
    }
    Some(ModelDocument {
        states: draft.states.into_iter().map(|s| s.value).collect(),
        evidence: draft
            .evidence
            .into_iter()
            .map(|(n, m)| EvidenceDecl { name: n.value, members: m.into_iter().map(|s| s.value).collect() })
            .collect(),
        prior: if draft.prior.is_empty() {
            Prior::Uniform
        } else {
            Prior::Explicit(draft.prior.into_iter().map(|(k, v)| (k.value, v.value)).collect())
        },
        question,
        threshold: draft.threshold.map(|t| t.value),
        rule: draft.rule.map(|r| r.value),
        variant: draft.variant.map(|v| v.value),
        generator: draft.generator.map(|g| g.value),
        density: draft.density.map(|d| d.value),
        measuring: draft.measuring.map(|m| m.value),
    })
}

/// Parses a document, returning it (when there are no errors) together with
/// every diagnostic, warnings included.
pub fn parse_with_diagnostics(text: &str) -> (Option<ModelDocument>, Vec<Diagnostic>) {
    let mut draft = Draft::default();
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = lex(raw, i + 1);
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, line: i + 1, end_col: raw.chars().count() + 1 };
        if let Err(d) = parse_line(&mut cur, &mut draft) {
            diags.push(d);
        }
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return (None, diags);
    }
    let doc = check(draft, &mut diags);
    diags.sort_by_key(|d| (d.line, d.column));
    (doc, diags)
}

/// Parses a document; on failure returns all diagnostics (at least one error).
pub fn parse(text: &str) -> Result<ModelDocument, Vec<Diagnostic>> {
    match parse_with_diagnostics(text) {
        (Some(doc), _) => Ok(doc),
        (None, diags) => Err(diags),
    }
}

/// Like [`parse`], for raw bytes that may not be UTF-8.
pub fn parse_bytes(bytes: &[u8]) -> Result<ModelDocument, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
            let start = good.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = String::from_utf8_lossy(&good[start..]).chars().count() + 1;
            Err(vec![Diagnostic::error(line, column, "input is not valid UTF-8")])
        }
    }
}
