//! Extraction of structured values from free-text completions. Never fails;
//! absence is a value.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Money;

const NUM: &str = r"(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?";

static COST_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)\$\s*(?P<a>{n})|\bUSD\s*\$?\s*(?P<b>{n})|\b(?P<c>{n})\s*USD\b",
        n = NUM
    ))
    .expect("cost regex")
});

static TOTAL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\btotal").expect("total regex"));

static RANGE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\d+(?:\.\d+)?)\s*%?\s*(?:-|–|—|to)\s*(\d+(?:\.\d+)?)\s*%").expect("range regex"));

static LIST_ITEM_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:\(?\d+[.):]|[-*•+])\s*(.+?)\s*$").expect("list regex"));

static POSITIVE_HEAD_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\W*(?:positives?|positive aspects?|pros|strengths?|advantages?)\b[^:]*:?\s*\W*$")
        .expect("positive header regex")
});

static ISSUE_HEAD_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)^\W*(?:issues?|potential issues?|negatives?|cons|weaknesses?|problems?|concerns?|drawbacks?)\b[^:]*:?\s*\W*$",
    )
    .expect("issue header regex")
});

fn number(text: &str) -> Option<f64> {
    text.replace(',', "").parse::<f64>().ok().filter(|v| v.is_finite())
}

/// First currency-tagged amount; the first one after "total" wins when present.
pub fn parse_cost(text: &str) -> Option<Money> {
    let hits: Vec<(usize, f64)> = COST_RE
        .captures_iter(text)
        .filter_map(|c| {
            let m = c.name("a").or_else(|| c.name("b")).or_else(|| c.name("c"))?;
            Some((c.get(0)?.start(), number(m.as_str())?))
        })
        .collect();
    let total_at = TOTAL_RE.find(text).map(|m| m.start());
    let chosen = total_at
        .and_then(|t| hits.iter().find(|(pos, _)| *pos >= t))
        .or_else(|| hits.first())?;
    Money::from_dollars(chosen.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

/// First number written directly before `expected_unit` (one optional space,
/// case-insensitive). In a range such as "10-15 lumens" the first number is taken.
pub fn parse_performance(text: &str, expected_unit: &str) -> Option<Quantity> {
    let unit = expected_unit.trim();
    if unit.is_empty() {
        return None;
    }
    let re = Regex::new(&format!(
        r"(?i)(?:^|[^\w.,])(\d+(?:,\d{{3}})*(?:\.\d+)?)(?:\s*(?:-|–|to)\s*\d+(?:,\d{{3}})*(?:\.\d+)?)?\s?{}",
        regex::escape(unit)
    ))
    .ok()?;
    let needs_boundary = unit.chars().last().is_some_and(char::is_alphanumeric);
    let mut start = 0;
    while let Some(c) = re.captures_at(text, start) {
        let whole = c.get(0)?;
        let after = text[whole.end()..].chars().next();
        if !needs_boundary || !after.is_some_and(|ch| ch.is_alphanumeric() || ch == '/') {
            return Some(Quantity {
                value: number(c.get(1)?.as_str())?,
                unit: unit.to_owned(),
            });
        }
        start = c.get(1)?.end();
    }
    None
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsabilityAnswer {
    pub positives: Vec<String>,
    pub issues: Vec<String>,
    pub parseable: bool,
}

/// Up to three list items under each of the positive and issue headers.
/// Parseable when at least one header is followed by at least one item.
pub fn parse_usability(text: &str) -> UsabilityAnswer {
    #[derive(PartialEq)]
    enum Section {
        None,
        Pos,
        Iss,
    }
    let mut sec = Section::None;
    let mut out = UsabilityAnswer::default();
    for line in text.lines() {
        if POSITIVE_HEAD_RE.is_match(line) {
            sec = Section::Pos;
            continue;
        }
        if ISSUE_HEAD_RE.is_match(line) {
            sec = Section::Iss;
            continue;
        }
        let Some(item) = LIST_ITEM_RE.captures(line).and_then(|c| c.get(1)) else {
            continue;
        };
        let item = item.as_str().trim_end_matches(['.', ';']).trim().to_owned();
        if item.is_empty() {
            continue;
        }
        match sec {
            Section::Pos if out.positives.len() < 3 => out.positives.push(item),
            Section::Iss if out.issues.len() < 3 => out.issues.push(item),
            _ => {}
        }
    }
    out.parseable = !(out.positives.is_empty() && out.issues.is_empty());
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementRange {
    pub low_pct: f64,
    pub high_pct: f64,
    /// Canonical "low-high%" rendering.
    pub text: String,
}

/// First percentage range such as "10-15%" or "10% to 15%".
pub fn parse_improvement_range(text: &str) -> Option<ImprovementRange> {
    let c = RANGE_RE.captures(text)?;
    let (ls, hs) = (c.get(1)?.as_str(), c.get(2)?.as_str());
    Some(ImprovementRange {
        low_pct: number(ls)?,
        high_pct: number(hs)?,
        text: format!("{ls}-{hs}%"),
    })
}
