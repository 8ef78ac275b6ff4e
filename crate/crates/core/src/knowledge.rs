//! Text knowledge bases, lexical retrieval and parameter extraction.
//!
//! A knowledge base is a sequence of blocks:
//!
//! ```text
//! [POLICY: RETAILER_STABLE]
//! description: Policy for retailers facing customer demand.
//! entity: Retailer
//! order_up_to_level: 100
//!
//! [STRATEGY: REROUTE_PARTIAL]
//! description: A balanced option. Reroute shipments through a less
//! congested but slightly longer route.
//! parameters: {'extra_lead_time': 2, 'transport_cost_premium': 75}
//! ```
//!
//! Description text may continue over several lines. Every other `key: value`
//! line, and every entry of a `parameters:` map, becomes an integer parameter.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entity::Role;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Order-up-to policy base shipped with the crate.
pub const POLICIES_KB: &str = include_str!("../kb/policies.kb");
/// Transport-disruption strategy base shipped with the crate.
pub const STRATEGIES_KB: &str = include_str!("../kb/strategies.kb");
/// Reactive base consulted by the selfish Manufacturer after a stockout.
pub const REACTIVE_KB: &str = include_str!("../kb/reactive.kb");

pub const LEAD_KEY: &str = "extra_lead_time";
pub const PREMIUM_KEY: &str = "transport_cost_premium";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DocKind {
    Policy,
    Strategy,
}

impl DocKind {
    fn tag(self) -> &'static str {
        match self {
            DocKind::Policy => "POLICY",
            DocKind::Strategy => "STRATEGY",
        }
    }

    fn label(self) -> &'static str {
        match self {
            DocKind::Policy => "policy",
            DocKind::Strategy => "strategy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeDocument {
    pub kind: DocKind,
    pub name: String,
    pub description: String,
    pub entity: Option<Role>,
    pub parameters: BTreeMap<String, i64>,
}

impl KnowledgeDocument {
    /// Text that retrieval matches against: name, description and entity.
    fn searchable_text(&self) -> String {
        let mut text = format!("{} {}", self.name, self.description);
        if let Some(role) = self.entity {
            text.push(' ');
            text.push_str(role.name());
        }
        text
    }

    pub fn parameter(&self, key: &str) -> Option<i64> {
        self.parameters.get(key).copied()
    }
}

/// Term-frequency multiset.
pub type TermCounts = BTreeMap<String, u32>;

/// Lowercase alphanumeric runs; everything else separates tokens.
pub fn tokenize(text: &str) -> TermCounts {
    let mut counts = TermCounts::new();
    for token in text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
    {
        *counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    counts
}

/// Cosine similarity of two term-frequency vectors; 0 if either is empty.
pub fn similarity<T: Scalar>(query: &TermCounts, doc: &TermCounts) -> T {
    let dot: u64 = query
        .iter()
        .filter_map(|(term, &q)| doc.get(term).map(|&d| q as u64 * d as u64))
        .sum();
    if dot == 0 {
        return T::zero();
    }
    let sq = |m: &TermCounts| m.values().map(|&c| c as u64 * c as u64).sum::<u64>();
    let denom = (T::from_units(sq(query)) * T::from_units(sq(doc))).sqrt();
    (T::from_units(dot) / denom).min(T::one()).max(T::zero())
}

/// Parsed, immutable knowledge base with its token index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    documents: Vec<KnowledgeDocument>,
    token_index: Vec<TermCounts>,
}

impl KnowledgeBase {
    pub fn new(documents: Vec<KnowledgeDocument>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.name.as_str()) {
                return Err(Error::config(format!(
                    "duplicate document name {}",
                    doc.name
                )));
            }
        }
        let token_index = documents
            .iter()
            .map(|d| tokenize(&d.searchable_text()))
            .collect();
        Ok(KnowledgeBase {
            documents,
            token_index,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_knowledge_base(&text)
    }

    pub fn documents(&self) -> &[KnowledgeDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&KnowledgeDocument> {
        self.documents.iter().find(|d| d.name == name)
    }

    fn scored(&self, query: &str, kind: Option<DocKind>) -> Vec<(f64, &KnowledgeDocument)> {
        let q = tokenize(query);
        let mut scored: Vec<_> = self
            .documents
            .iter()
            .zip(&self.token_index)
            .filter(|(d, _)| kind.is_none_or(|k| d.kind == k))
            .map(|(d, tokens)| (similarity::<f64>(&q, tokens), d))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.name.cmp(&b.1.name)));
        scored
    }
}

/// Serializes back into the block grammar accepted by [`parse_knowledge_base`].
impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, doc) in self.documents.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{}: {}]", doc.kind.tag(), doc.name)?;
            writeln!(f, "description: {}", doc.description)?;
            if let Some(role) = doc.entity {
                writeln!(f, "entity: {role}")?;
            }
            match doc.kind {
                DocKind::Policy => {
                    for (k, v) in &doc.parameters {
                        writeln!(f, "{k}: {v}")?;
                    }
                }
                DocKind::Strategy => {
                    let mut map = String::new();
                    for (j, (k, v)) in doc.parameters.iter().enumerate() {
                        if j > 0 {
                            map.push_str(", ");
                        }
                        let _ = write!(map, "'{k}': {v}");
                    }
                    writeln!(f, "parameters: {{{map}}}")?;
                }
            }
        }
        Ok(())
    }
}

struct Draft {
    line: usize,
    kind: DocKind,
    name: String,
    description: Option<String>,
    entity: Option<Role>,
    parameters: BTreeMap<String, i64>,
}

impl Draft {
    fn finish(mut self) -> KnowledgeDocument {
        if self.kind == DocKind::Strategy {
            self.parameters.entry(PREMIUM_KEY.to_string()).or_insert(0);
        }
        KnowledgeDocument {
            kind: self.kind,
            name: self.name,
            description: self.description.unwrap_or_default(),
            entity: self.entity,
            parameters: self.parameters,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn split_key(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once(':')?;
    let key = key.trim();
    let valid = !key.is_empty()
        && key.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    valid.then(|| (key, value.trim()))
}

fn parse_int(line: usize, key: &str, value: &str) -> Result<i64> {
    value.trim().parse().map_err(|_| {
        parse_err(
            line,
            format!("value of {key:?} is not an integer: {value:?}"),
        )
    })
}

fn parse_map(line: usize, body: &str) -> Result<BTreeMap<String, i64>> {
    let inner = body
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| parse_err(line, "parameter map must be enclosed in braces"))?;
    let mut map = BTreeMap::new();
    for entry in inner.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (key, value) = entry
            .split_once(':')
            .ok_or_else(|| parse_err(line, format!("malformed map entry {entry:?}")))?;
        let key = key.trim();
        let key = key
            .strip_prefix('\'')
            .and_then(|k| k.strip_suffix('\''))
            .filter(|k| !k.is_empty())
            .ok_or_else(|| parse_err(line, format!("map key must be single-quoted: {key:?}")))?;
        let value = parse_int(line, key, value)?;
        if map.insert(key.to_string(), value).is_some() {
            return Err(parse_err(line, format!("duplicate map key {key:?}")));
        }
    }
    Ok(map)
}

/// Parses a knowledge base written in the block grammar.
pub fn parse_knowledge_base(text: &str) -> Result<KnowledgeBase> {
    let mut docs: Vec<KnowledgeDocument> = Vec::new();
    let mut names: HashSet<String> = HashSet::new();
    let mut current: Option<Draft> = None;
    let mut last_key: Option<String> = None;
    // (start line, accumulated text) of a parameter map still open
    let mut open_map: Option<(usize, String)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();

        if let Some((start, mut acc)) = open_map.take() {
            acc.push(' ');
            acc.push_str(line);
            if line.ends_with('}') {
                let draft = current.as_mut().expect("map opened inside a document");
                draft.parameters.extend(parse_map(start, &acc)?);
            } else {
                open_map = Some((start, acc));
            }
            continue;
        }

        if line.is_empty() {
            last_key = None;
            continue;
        }

        if line.starts_with('[') || line.ends_with(']') {
            let header = line
                .strip_prefix('[')
                .and_then(|h| h.strip_suffix(']'))
                .ok_or_else(|| parse_err(lineno, format!("malformed header {line:?}")))?;
            let (kind, name) = header
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, "header must read [KIND: NAME]"))?;
            let kind = match kind.trim().to_ascii_uppercase().as_str() {
                "POLICY" => DocKind::Policy,
                "STRATEGY" => DocKind::Strategy,
                other => {
                    return Err(parse_err(
                        lineno,
                        format!("unknown document kind {other:?}"),
                    ))
                }
            };
            let name = name.trim();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(parse_err(lineno, format!("invalid document name {name:?}")));
            }
            if !names.insert(name.to_string()) {
                return Err(parse_err(lineno, format!("duplicate document name {name}")));
            }
            if let Some(done) = current.take() {
                docs.push(done.finish());
            }
            current = Some(Draft {
                line: lineno,
                kind,
                name: name.to_string(),
                description: None,
                entity: None,
                parameters: BTreeMap::new(),
            });
            last_key = None;
            continue;
        }

        let draft = current
            .as_mut()
            .ok_or_else(|| parse_err(lineno, "content before the first [KIND: NAME] header"))?;

        match split_key(line) {
            Some((key, value)) => {
                match key {
                    "description" => {
                        if draft.description.is_some() {
                            return Err(parse_err(lineno, "duplicate description"));
                        }
                        draft.description = Some(value.to_string());
                    }
                    "entity" => {
                        let role = value
                            .parse::<Role>()
                            .map_err(|_| parse_err(lineno, format!("unknown entity {value:?}")))?;
                        draft.entity = Some(role);
                    }
                    "parameters" => {
                        if !value.starts_with('{') {
                            return Err(parse_err(lineno, "parameter map must start with '{'"));
                        }
                        if value.ends_with('}') {
                            draft.parameters.extend(parse_map(lineno, value)?);
                        } else {
                            open_map = Some((lineno, value.to_string()));
                        }
                    }
                    other => {
                        let v = parse_int(lineno, other, value)?;
                        draft.parameters.insert(other.to_string(), v);
                    }
                }
                last_key = Some(key.to_string());
            }
            None if last_key.as_deref() == Some("description") => {
                let desc = draft.description.get_or_insert_with(String::new);
                if !desc.is_empty() {
                    desc.push(' ');
                }
                desc.push_str(line);
            }
            None => return Err(parse_err(lineno, format!("unexpected line {line:?}"))),
        }
    }

    if let Some((start, _)) = open_map {
        return Err(parse_err(start, "unterminated parameter map"));
    }
    if let Some(done) = current.take() {
        if done.description.is_none() {
            log::debug!(
                "document {} (line {}) has no description",
                done.name,
                done.line
            );
        }
        docs.push(done.finish());
    }
    KnowledgeBase::new(docs)
}

/// Best match for `query`, optionally restricted to one document kind.
///
/// Ties go to the lexicographically smallest name. Fails with
/// [`Error::NoMatch`] when nothing shares a token with the query.
pub fn retrieve<'a>(
    kb: &'a KnowledgeBase,
    query: &str,
    kind_filter: Option<DocKind>,
) -> Result<&'a KnowledgeDocument> {
    match kb.scored(query, kind_filter).first() {
        Some(&(score, doc)) if score > 0.0 => Ok(doc),
        _ => Err(Error::NoMatch {
            query: query.to_string(),
        }),
    }
}

/// Every strategy document, most relevant first.
pub fn retrieve_portfolio<'a>(
    kb: &'a KnowledgeBase,
    query: &str,
) -> Result<Vec<&'a KnowledgeDocument>> {
    let ranked: Vec<_> = kb
        .scored(query, Some(DocKind::Strategy))
        .into_iter()
        .map(|(_, d)| d)
        .collect();
    if ranked.is_empty() {
        return Err(Error::NoMatch {
            query: query.to_string(),
        });
    }
    Ok(ranked)
}

/// Machine-readable parameters of a mitigation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParameters<T> {
    pub extra_lead_time: u32,
    pub transport_cost_premium: T,
}

pub fn extract_parameters<T: Scalar>(doc: &KnowledgeDocument) -> Result<StrategyParameters<T>> {
    if doc.kind != DocKind::Strategy {
        return Err(Error::WrongKind {
            name: doc.name.clone(),
            found: doc.kind.label(),
            expected: DocKind::Strategy.label(),
        });
    }
    let lead = doc.parameter(LEAD_KEY).unwrap_or(0);
    let premium = doc.parameter(PREMIUM_KEY).unwrap_or(0);
    if lead < 0 || premium < 0 {
        return Err(Error::config(format!(
            "strategy {} has negative parameters",
            doc.name
        )));
    }
    Ok(StrategyParameters {
        extra_lead_time: u32::try_from(lead)
            .map_err(|_| Error::config(format!("lead time of {} out of range", doc.name)))?,
        transport_cost_premium: T::from_units(premium as u64),
    })
}
