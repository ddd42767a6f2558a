//! Lexical data: aspect classes, temporal adverb readings, proper-name and
//! noun classes, and calendar arithmetic on integer time points.
//!
//! The lexicon is a declarative data file (see `data/lexicon.lex`), loaded
//! once and shared read-only. Aspect assignments ("write" is an activity,
//! "be in" is stative) are data, not code: coverage grows by editing the
//! file.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::syntax::Category;

/// A point on the discrete timeline: days since 1970-01-01 (day 0).
///
/// The semantics only needs a totally ordered integer timeline; anchoring it
/// at a standard epoch makes constants easy to debug. Calendar dates convert
/// injectively and monotonically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint {
    pub day: i64,
}

impl TimePoint {
    pub fn new(day: i64) -> TimePoint {
        TimePoint { day }
    }

    /// Convert a proleptic Gregorian civil date to a day number.
    ///
    /// Uses the standard era-based civil-calendar day count; the test suite
    /// cross-checks it against a day-by-day counting loop from the epoch.
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<TimePoint, LexiconError> {
        if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
            return Err(LexiconError::InvalidDate { year, month, day });
        }
        let y = year as i64 - if month <= 2 { 1 } else { 0 };
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let mp = if month > 2 { month - 3 } else { month + 9 } as i64;
        let doy = (153 * mp + 2) / 5 + day as i64 - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        Ok(TimePoint::new(era * 146097 + doe - 719468))
    }

    /// Inverse of [`TimePoint::from_ymd`].
    pub fn to_ymd(self) -> (i32, u32, u32) {
        let z = self.day + 719468;
        let era = if z >= 0 { z } else { z - 146096 } / 146097;
        let doe = z - era * 146097;
        let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        let y = yoe + era * 400;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
        let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
        ((y + if m <= 2 { 1 } else { 0 }) as i32, m, d)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = self.to_ymd();
        write!(f, "{:04}-{:02}-{:02}", y, m, d)
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if year % 4 == 0 && (year % 100 != 0 || year % 400 == 0) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// Days-since-epoch for a civil date. Convenience wrapper over
/// [`TimePoint::from_ymd`].
pub fn date_to_day(year: i32, month: u32, day: u32) -> Result<TimePoint, LexiconError> {
    TimePoint::from_ymd(year, month, day)
}

/// Aspect class of a temporal predicate.
///
/// `Activity` collapses the classical activity/achievement/accomplishment
/// triple: all three license unicity of action. `Stative` predicates license
/// interval subsumption instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AspectClass {
    Activity,
    Stative,
}

/// A verb entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub lemma: String,
    pub category: Category,
    pub aspect: AspectClass,
    /// The progressive form denotes a distinct `PROG_` predicate (stative).
    pub has_progressive_variant: bool,
    /// Simple and progressive forms are logically interchangeable ("run").
    pub prog_equivalent: bool,
    /// Whether the simple form implies the `PROG_` form on the same interval.
    /// Accomplishment-like verbs ("write") license it; achievement-like verbs
    /// ("find") do not.
    pub licenses_prog_implication: bool,
}

/// A bound or duration restriction on a quantified timespan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanConstraint {
    /// lo <= start and stop <= hi.
    SubsetOf { lo: TimePoint, hi: TimePoint },
    /// stop < t.
    EndsBefore(TimePoint),
    /// t <= start.
    StartsAtOrAfter(TimePoint),
    /// lo <= start <= hi ("since 1992": the span opens within that year).
    StartsWithin { lo: TimePoint, hi: TimePoint },
    /// stop = now (perfect readings: the span reaches the utterance time).
    EndsAtNow,
    /// stop - start = n days.
    DurationEquals(i64),
    /// stop - start >= n days.
    DurationAtLeast(i64),
}

/// How an exact-point adverb fixes its time point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointSpec {
    Absolute(TimePoint),
    /// Offset in days from the per-problem `now` ("yesterday" = -1).
    RelativeToNow(i64),
}

/// The interpretation category of a temporal adverb.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdverbKind {
    /// Provides the interval outright, start = stop ("on May 5th, 1995").
    ExactPoint(TimePoint),
    /// Existentially quantifies a span subject to the listed constraints
    /// ("in 1992", "since 1992", "for more than a week").
    ExistentialSpan(Vec<SpanConstraint>),
    /// Universally quantifies over sub-spans of the context ("always",
    /// "never"). `negated` wraps the body in negation; `ignores_context`
    /// quantifies unboundedly even when a context span is present (the
    /// lexicalised modal "would never").
    UniversalSpan { negated: bool, ignores_context: bool },
    /// Pins the duration and locally disables subsumption
    /// ("for exactly a year").
    ClassModifier(SpanConstraint),
    /// Anaphoric stative extension ("still"): the span runs from the most
    /// recent discourse event with the same participants up to `now`.
    Still,
}

/// A temporal adverb with its resolved interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdverbEntry {
    pub lemma: String,
    pub kind: AdverbKind,
}

/// Referent class of a name or noun, used by pronoun resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferentClass {
    Human,
    Thing,
    Place,
}

/// Action-modification verbs ("finish", "start").
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VvKind {
    Finish,
    Start,
}

/// Temporal subordinators heading adverbial clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubordKind {
    After,
    Before,
    When,
}

#[derive(Clone, Debug)]
enum AdverbRecord {
    Temporal(StoredAdverb),
    Manner,
}

#[derive(Clone, Debug)]
enum StoredAdverb {
    Point(PointSpec),
    Existential(Vec<SpanConstraint>),
    Universal { negated: bool, ignores_context: bool },
    ClassModifier(SpanConstraint),
    Still,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("unknown lexeme: {0}")]
    UnknownLexeme(String),
    #[error("adverb has no temporal reading: {0}")]
    NonTemporalAdverb(String),
    #[error("invalid date: {year:04}-{month:02}-{day:02}")]
    InvalidDate { year: i32, month: u32, day: u32 },
    #[error("adverb {0} is relative to `now`, but the problem fixes no date")]
    NowRequired(String),
    #[error("lexicon line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The loaded lexicon. Immutable after load; shared read access is safe.
#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    verbs: BTreeMap<(String, Category), LexEntry>,
    adverbs: BTreeMap<String, AdverbRecord>,
    names: BTreeMap<String, ReferentClass>,
    nouns: BTreeMap<String, ReferentClass>,
    vvs: BTreeMap<String, VvKind>,
    subjs: BTreeMap<String, SubordKind>,
}

static BUILTIN: OnceLock<Lexicon> = OnceLock::new();

impl Lexicon {
    /// The lexicon shipped with the crate (`data/lexicon.lex`).
    pub fn builtin() -> &'static Lexicon {
        BUILTIN.get_or_init(|| {
            Lexicon::parse(include_str!("../data/lexicon.lex"))
                .expect("embedded lexicon must parse")
        })
    }

    /// Parse the record-oriented lexicon format.
    ///
    /// One entry per line: `lemma category class-or-kind constants...`.
    /// `#` starts a comment. Field order and the kind vocabulary are
    /// documented at the top of `data/lexicon.lex`.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let err = |msg: String| LexiconError::Parse { line, msg };
            if fields.len() < 2 {
                return Err(err("expected: lemma category ...".into()));
            }
            let lemma = fields[0].to_string();
            let category: Category = fields[1]
                .parse()
                .map_err(|e: String| err(e))?;
            let rest = &fields[2..];
            match category {
                Category::V | Category::V2 => {
                    let entry = parse_verb(&lemma, category, rest).map_err(err)?;
                    lex.verbs.insert((lemma, category), entry);
                }
                Category::Adv => {
                    let record = parse_adverb(rest).map_err(err)?;
                    lex.adverbs.insert(lemma, record);
                }
                Category::PN => {
                    let class = parse_class(rest).map_err(err)?;
                    lex.names.insert(lemma, class);
                }
                Category::N => {
                    let class = parse_class(rest).map_err(err)?;
                    lex.nouns.insert(lemma, class);
                }
                Category::VV => {
                    let kind = match rest.first().copied() {
                        Some("finish") => VvKind::Finish,
                        Some("start") => VvKind::Start,
                        other => {
                            return Err(err(format!("bad VV kind: {:?}", other)));
                        }
                    };
                    lex.vvs.insert(lemma, kind);
                }
                Category::Subj => {
                    let kind = match rest.first().copied() {
                        Some("after") => SubordKind::After,
                        Some("before") => SubordKind::Before,
                        Some("when") => SubordKind::When,
                        other => {
                            return Err(err(format!("bad Subj kind: {:?}", other)));
                        }
                    };
                    lex.subjs.insert(lemma, kind);
                }
                other => {
                    return Err(err(format!("category {other} takes no lexicon entries")));
                }
            }
        }
        Ok(lex)
    }

    /// Look up a verb by lemma and category.
    pub fn lookup(&self, lemma: &str, category: Category) -> Result<&LexEntry, LexiconError> {
        self.verbs
            .get(&(lemma.to_string(), category))
            .ok_or_else(|| LexiconError::UnknownLexeme(lemma.to_string()))
    }

    /// The temporal reading of an adverb, with relative points resolved
    /// against the per-problem `now`.
    ///
    /// Manner adverbs return [`LexiconError::NonTemporalAdverb`], signalling
    /// the caller to treat them as ordinary predicate modifiers.
    pub fn adverb_semantics(
        &self,
        lemma: &str,
        now: Option<TimePoint>,
    ) -> Result<AdverbEntry, LexiconError> {
        match self.adverbs.get(lemma) {
            None => Err(LexiconError::UnknownLexeme(lemma.to_string())),
            Some(AdverbRecord::Manner) => {
                Err(LexiconError::NonTemporalAdverb(lemma.to_string()))
            }
            Some(AdverbRecord::Temporal(stored)) => {
                let kind = match stored {
                    StoredAdverb::Point(PointSpec::Absolute(t)) => AdverbKind::ExactPoint(*t),
                    StoredAdverb::Point(PointSpec::RelativeToNow(offset)) => {
                        let base = now.ok_or_else(|| {
                            LexiconError::NowRequired(lemma.to_string())
                        })?;
                        AdverbKind::ExactPoint(TimePoint::new(base.day + offset))
                    }
                    StoredAdverb::Existential(cs) => AdverbKind::ExistentialSpan(cs.clone()),
                    StoredAdverb::Universal { negated, ignores_context } => {
                        AdverbKind::UniversalSpan {
                            negated: *negated,
                            ignores_context: *ignores_context,
                        }
                    }
                    StoredAdverb::ClassModifier(c) => AdverbKind::ClassModifier(*c),
                    StoredAdverb::Still => AdverbKind::Still,
                };
                Ok(AdverbEntry { lemma: lemma.to_string(), kind })
            }
        }
    }

    pub fn name_class(&self, lemma: &str) -> Result<ReferentClass, LexiconError> {
        self.names
            .get(lemma)
            .copied()
            .ok_or_else(|| LexiconError::UnknownLexeme(lemma.to_string()))
    }

    pub fn noun_class(&self, lemma: &str) -> Result<ReferentClass, LexiconError> {
        self.nouns
            .get(lemma)
            .copied()
            .ok_or_else(|| LexiconError::UnknownLexeme(lemma.to_string()))
    }

    pub fn vv_kind(&self, lemma: &str) -> Result<VvKind, LexiconError> {
        self.vvs
            .get(lemma)
            .copied()
            .ok_or_else(|| LexiconError::UnknownLexeme(lemma.to_string()))
    }

    pub fn subord_kind(&self, lemma: &str) -> Result<SubordKind, LexiconError> {
        self.subjs
            .get(lemma)
            .copied()
            .ok_or_else(|| LexiconError::UnknownLexeme(lemma.to_string()))
    }

    /// Whether a lemma is known under the given category (used by the
    /// typechecker to reject unknown lexemes early).
    pub fn has(&self, lemma: &str, category: Category) -> bool {
        match category {
            Category::V | Category::V2 => {
                self.verbs.contains_key(&(lemma.to_string(), category))
            }
            Category::Adv => self.adverbs.contains_key(lemma),
            Category::PN => self.names.contains_key(lemma),
            Category::N => self.nouns.contains_key(lemma),
            Category::VV => self.vvs.contains_key(lemma),
            Category::Subj => self.subjs.contains_key(lemma),
            _ => false,
        }
    }
}

fn parse_verb(
    lemma: &str,
    category: Category,
    rest: &[&str],
) -> Result<LexEntry, String> {
    let aspect = match rest.first().copied() {
        Some("activity") => AspectClass::Activity,
        Some("stative") => AspectClass::Stative,
        other => return Err(format!("bad aspect class: {:?}", other)),
    };
    let mut entry = LexEntry {
        lemma: lemma.to_string(),
        category,
        aspect,
        has_progressive_variant: false,
        prog_equivalent: false,
        licenses_prog_implication: false,
    };
    for flag in &rest[1..] {
        match *flag {
            "prog" => entry.has_progressive_variant = true,
            "progequiv" => entry.prog_equivalent = true,
            "impl" => entry.licenses_prog_implication = true,
            other => return Err(format!("bad verb flag: {other}")),
        }
    }
    if entry.has_progressive_variant && entry.aspect != AspectClass::Activity {
        return Err(format!("{lemma}: only activities split off a PROG_ form"));
    }
    if entry.has_progressive_variant && entry.prog_equivalent {
        return Err(format!("{lemma}: prog and progequiv are mutually exclusive"));
    }
    if entry.licenses_prog_implication && !entry.has_progressive_variant {
        return Err(format!("{lemma}: impl requires prog"));
    }
    Ok(entry)
}

fn parse_date(field: &str) -> Result<TimePoint, String> {
    let parts: Vec<&str> = field.split('-').collect();
    if parts.len() != 3 {
        return Err(format!("bad date: {field}"));
    }
    let y: i32 = parts[0].parse().map_err(|_| format!("bad date: {field}"))?;
    let m: u32 = parts[1].parse().map_err(|_| format!("bad date: {field}"))?;
    let d: u32 = parts[2].parse().map_err(|_| format!("bad date: {field}"))?;
    TimePoint::from_ymd(y, m, d).map_err(|e| e.to_string())
}

fn parse_point(field: &str) -> Result<PointSpec, String> {
    if let Some(rest) = field.strip_prefix("now") {
        let offset: i64 = if rest.is_empty() {
            0
        } else {
            rest.parse().map_err(|_| format!("bad relative point: {field}"))?
        };
        return Ok(PointSpec::RelativeToNow(offset));
    }
    Ok(PointSpec::Absolute(parse_date(field)?))
}

fn parse_adverb(rest: &[&str]) -> Result<AdverbRecord, String> {
    let kind = match rest.first().copied() {
        Some(k) => k,
        None => return Err("adverb needs a kind".into()),
    };
    let record = match kind {
        "manner" => AdverbRecord::Manner,
        "point" => {
            let spec = parse_point(rest.get(1).ok_or("point needs a date")?)?;
            AdverbRecord::Temporal(StoredAdverb::Point(spec))
        }
        "within" => {
            let lo = parse_date(rest.get(1).ok_or("within needs two dates")?)?;
            let hi = parse_date(rest.get(2).ok_or("within needs two dates")?)?;
            if lo > hi {
                return Err("within: lo must be <= hi".into());
            }
            AdverbRecord::Temporal(StoredAdverb::Existential(vec![SpanConstraint::SubsetOf {
                lo,
                hi,
            }]))
        }
        "since" => {
            let lo = parse_date(rest.get(1).ok_or("since needs two dates")?)?;
            let hi = parse_date(rest.get(2).ok_or("since needs two dates")?)?;
            if lo > hi {
                return Err("since: lo must be <= hi".into());
            }
            AdverbRecord::Temporal(StoredAdverb::Existential(vec![
                SpanConstraint::StartsWithin { lo, hi },
                SpanConstraint::EndsAtNow,
            ]))
        }
        "atleast" => {
            let n: i64 = rest
                .get(1)
                .ok_or("atleast needs a day count")?
                .parse()
                .map_err(|_| "atleast: bad day count".to_string())?;
            AdverbRecord::Temporal(StoredAdverb::Existential(vec![
                SpanConstraint::DurationAtLeast(n),
            ]))
        }
        "exactly" => {
            let n: i64 = rest
                .get(1)
                .ok_or("exactly needs a day count")?
                .parse()
                .map_err(|_| "exactly: bad day count".to_string())?;
            AdverbRecord::Temporal(StoredAdverb::ClassModifier(SpanConstraint::DurationEquals(
                n,
            )))
        }
        "forall" => {
            let mut negated = false;
            let mut ignores_context = false;
            for flag in &rest[1..] {
                match *flag {
                    "negated" => negated = true,
                    "unscoped" => ignores_context = true,
                    other => return Err(format!("bad forall flag: {other}")),
                }
            }
            AdverbRecord::Temporal(StoredAdverb::Universal { negated, ignores_context })
        }
        "still" => AdverbRecord::Temporal(StoredAdverb::Still),
        other => return Err(format!("unknown adverb kind: {other}")),
    };
    Ok(record)
}

fn parse_class(rest: &[&str]) -> Result<ReferentClass, String> {
    match rest.first().copied() {
        Some("human") => Ok(ReferentClass::Human),
        Some("thing") => Ok(ReferentClass::Thing),
        Some("place") => Ok(ReferentClass::Place),
        other => Err(format!("bad referent class: {:?}", other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent day-count oracle: walk the calendar one day at a time.
    fn day_count_loop(year: i32, month: u32, day: u32) -> i64 {
        let (mut y, mut m, mut d) = (1970, 1, 1);
        let mut count: i64 = 0;
        while (y, m, d) != (year, month, day) {
            d += 1;
            if d > days_in_month(y, m) {
                d = 1;
                m += 1;
                if m > 12 {
                    m = 1;
                    y += 1;
                }
            }
            count += 1;
        }
        count
    }

    #[test]
    fn epoch_is_day_zero() {
        assert_eq!(date_to_day(1970, 1, 1).unwrap().day, 0);
    }

    #[test]
    fn day_numbers_match_the_counting_oracle() {
        // Frozen from the oracle below.
        assert_eq!(day_count_loop(1991, 1, 1), 7670);
        assert_eq!(date_to_day(1991, 1, 1).unwrap().day, 7670);
        for (y, m, d) in [(1992, 2, 29), (1995, 5, 15), (1996, 12, 31), (1990, 7, 14)] {
            assert_eq!(
                date_to_day(y, m, d).unwrap().day,
                day_count_loop(y, m, d),
                "{y}-{m}-{d}"
            );
        }
    }

    #[test]
    fn consecutive_days_differ_by_one() {
        let a = date_to_day(1991, 12, 31).unwrap();
        let b = date_to_day(1992, 1, 1).unwrap();
        assert!(a < b);
        assert_eq!(b.day - a.day, 1);
    }

    #[test]
    fn enumerated_range_is_strictly_monotone() {
        // 1990-01-01 .. 1996-12-31, day by day.
        let mut prev = date_to_day(1990, 1, 1).unwrap().day;
        let (mut y, mut m, mut d) = (1990, 1, 1);
        loop {
            d += 1;
            if d > days_in_month(y, m) {
                d = 1;
                m += 1;
                if m > 12 {
                    m = 1;
                    y += 1;
                }
            }
            if y > 1996 {
                break;
            }
            let cur = date_to_day(y, m, d).unwrap().day;
            assert_eq!(cur - prev, 1, "{y}-{m}-{d}");
            prev = cur;
        }
    }

    #[test]
    fn ymd_round_trips() {
        for day in [-1000, -1, 0, 1, 7670, 9999, 80000] {
            let t = TimePoint::new(day);
            let (y, m, d) = t.to_ymd();
            assert_eq!(TimePoint::from_ymd(y, m, d).unwrap(), t);
        }
    }

    #[test]
    fn invalid_dates_are_rejected() {
        assert!(matches!(
            date_to_day(1991, 13, 1),
            Err(LexiconError::InvalidDate { .. })
        ));
        assert!(matches!(
            date_to_day(1991, 2, 30),
            Err(LexiconError::InvalidDate { .. })
        ));
        assert!(date_to_day(1992, 2, 29).is_ok());
        assert!(date_to_day(1993, 2, 29).is_err());
    }

    #[test]
    fn verb_lookup_matches_the_aspect_table() {
        let lex = Lexicon::builtin();
        let write = lex.lookup("write_V2", Category::V2).unwrap();
        assert_eq!(write.aspect, AspectClass::Activity);
        assert!(write.has_progressive_variant);
        assert!(write.licenses_prog_implication);

        let be_in = lex.lookup("be_in_V2", Category::V2).unwrap();
        assert_eq!(be_in.aspect, AspectClass::Stative);
        assert!(!be_in.has_progressive_variant);

        let run = lex.lookup("run_V", Category::V).unwrap();
        assert_eq!(run.aspect, AspectClass::Activity);
        assert!(run.prog_equivalent);

        let find = lex.lookup("find_V2", Category::V2).unwrap();
        assert!(find.has_progressive_variant);
        assert!(!find.licenses_prog_implication);
    }

    #[test]
    fn unknown_lexeme_is_an_error() {
        let lex = Lexicon::builtin();
        assert!(matches!(
            lex.lookup("swim_V2", Category::V2),
            Err(LexiconError::UnknownLexeme(l)) if l == "swim_V2"
        ));
    }

    #[test]
    fn adverb_readings() {
        let lex = Lexicon::builtin();
        let in_1992 = lex.adverb_semantics("in_1992_Adv", None).unwrap();
        assert_eq!(
            in_1992.kind,
            AdverbKind::ExistentialSpan(vec![SpanConstraint::SubsetOf {
                lo: date_to_day(1992, 1, 1).unwrap(),
                hi: date_to_day(1992, 12, 31).unwrap(),
            }])
        );

        let always = lex.adverb_semantics("always_Adv", None).unwrap();
        assert_eq!(
            always.kind,
            AdverbKind::UniversalSpan { negated: false, ignores_context: false }
        );

        let year = lex.adverb_semantics("for_exactly_a_year_Adv", None).unwrap();
        assert_eq!(
            year.kind,
            AdverbKind::ClassModifier(SpanConstraint::DurationEquals(365))
        );
    }

    #[test]
    fn relative_points_resolve_against_now() {
        let lex = Lexicon::builtin();
        let now = date_to_day(1990, 7, 14).unwrap();
        let yesterday = lex.adverb_semantics("yesterday_Adv", Some(now)).unwrap();
        assert_eq!(
            yesterday.kind,
            AdverbKind::ExactPoint(date_to_day(1990, 7, 13).unwrap())
        );
        assert!(matches!(
            lex.adverb_semantics("yesterday_Adv", None),
            Err(LexiconError::NowRequired(_))
        ));
    }

    #[test]
    fn custom_lexicons_parse_from_text() {
        let lex = Lexicon::parse(
            "# test entries\n\
             swim_V V activity\n\
             at_5_pm_Adv Adv point 1996-03-01\n\
             museum_N N thing\n",
        )
        .unwrap();
        assert!(lex.lookup("swim_V", Category::V).is_ok());
        assert!(lex.has("at_5_pm_Adv", Category::Adv));
        assert!(lex.has("museum_N", Category::N));

        let err = Lexicon::parse("walk_V V sideways").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 1, .. }));
    }

    #[test]
    fn manner_adverbs_have_no_temporal_reading() {
        let lex = Lexicon::builtin();
        assert!(matches!(
            lex.adverb_semantics("late_Adv", None),
            Err(LexiconError::NonTemporalAdverb(l)) if l == "late_Adv"
        ));
    }
}
