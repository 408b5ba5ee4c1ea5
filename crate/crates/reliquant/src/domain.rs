//! Finite cartesian input domains with exact mixed-radix indexing.
//!
//! A domain is an ordered list of fields (integer ranges, flags, enums).
//! Every point has a global index in `[0, cardinality)`: the mixed-radix
//! encoding in field order with the **last declared field varying fastest**.
//! Indices are arbitrary-precision so oversized declarations fail loudly
//! instead of overflowing; enumeration itself is streaming and never
//! materializes the domain.
//!
//! Point values are plain `i64`s: integer fields carry the integer itself,
//! flags carry 0/1, enum fields carry the label position.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldKind {
    IntRange { lo: i64, hi: i64 },
    Flag,
    Enum { labels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: String,
    pub kind: FieldKind,
}

impl FieldSpec {
    pub fn int(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        FieldSpec { name: name.into(), kind: FieldKind::IntRange { lo, hi } }
    }

    pub fn flag(name: impl Into<String>) -> Self {
        FieldSpec { name: name.into(), kind: FieldKind::Flag }
    }

    pub fn enumeration(name: impl Into<String>, labels: &[&str]) -> Self {
        FieldSpec {
            name: name.into(),
            kind: FieldKind::Enum { labels: labels.iter().map(|s| s.to_string()).collect() },
        }
    }

    /// Number of values this field can take.
    pub fn size(&self) -> u64 {
        match &self.kind {
            FieldKind::IntRange { lo, hi } => (*hi as i128 - *lo as i128 + 1) as u64,
            FieldKind::Flag => 2,
            FieldKind::Enum { labels } => labels.len() as u64,
        }
    }

    /// Lowest point value (position 0).
    fn first_value(&self) -> i64 {
        match &self.kind {
            FieldKind::IntRange { lo, .. } => *lo,
            _ => 0,
        }
    }

    fn last_value(&self) -> i64 {
        self.first_value() + (self.size() - 1) as i64
    }

    pub fn contains_value(&self, value: i64) -> bool {
        value >= self.first_value() && value <= self.last_value()
    }

    fn position_of(&self, value: i64) -> Option<u64> {
        self.contains_value(value).then(|| (value - self.first_value()) as u64)
    }

    pub(crate) fn value_at(&self, position: u64) -> i64 {
        self.first_value() + position as i64
    }

    /// Render a point value the way the wire protocol expects it:
    /// integers in decimal, flags as 0/1, enum labels verbatim.
    pub fn render_value(&self, value: i64) -> String {
        match &self.kind {
            FieldKind::Enum { labels } => labels[value as usize].clone(),
            _ => value.to_string(),
        }
    }
}

/// One concrete input: one value per field, in field order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputPoint {
    pub values: Vec<i64>,
}

/// Half-open slice `[start, end)` of a domain's index space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRange {
    pub start: BigUint,
    pub end: BigUint,
}

impl IndexRange {
    pub fn len(&self) -> BigUint {
        &self.end - &self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate field name `{name}`")]
    DuplicateField { name: String },
    #[error("a domain needs at least one field")]
    EmptyDomain,
    #[error("field `{field}`: invalid integer range {lo}..{hi}")]
    InvalidIntRange { field: String, lo: i64, hi: i64 },
    #[error("field `{field}`: enum needs at least one label")]
    EmptyEnum { field: String },
    #[error("field `{field}`: duplicate label `{label}`")]
    DuplicateLabel { field: String, label: String },
    #[error("field `{field}`: label `{label}` may not contain commas or quotes")]
    InvalidLabel { field: String, label: String },
    #[error("field `{field}` has more than 2^64 - 1 values")]
    FieldTooLarge { field: String },
    #[error("index {index} is outside [0, {cardinality})")]
    IndexOutOfRange { index: BigUint, cardinality: BigUint },
    #[error("point has {actual} values but the domain has {expected} fields")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("field `{field}`: value {value} is out of range")]
    ValueOutOfRange { field: String, value: i64 },
    #[error("invalid index range [{start}, {end}) for cardinality {cardinality}")]
    InvalidRange { start: BigUint, end: BigUint, cardinality: BigUint },
    #[error("index range is too long to enumerate (more than 2^128 points)")]
    RangeTooLong,
    #[error("predicate failed: {message}")]
    PredicateFailed { message: String },
}

/// An ordered, validated collection of fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDomain {
    fields: Vec<FieldSpec>,
}

impl InputDomain {
    pub fn new(fields: Vec<FieldSpec>) -> Result<Self, DomainError> {
        if fields.is_empty() {
            return Err(DomainError::EmptyDomain);
        }
        let mut names = std::collections::BTreeSet::new();
        for f in &fields {
            if !names.insert(f.name.clone()) {
                return Err(DomainError::DuplicateField { name: f.name.clone() });
            }
            match &f.kind {
                FieldKind::IntRange { lo, hi } => {
                    if lo > hi {
                        return Err(DomainError::InvalidIntRange {
                            field: f.name.clone(),
                            lo: *lo,
                            hi: *hi,
                        });
                    }
                    if (*hi as i128 - *lo as i128 + 1) > u64::MAX as i128 {
                        return Err(DomainError::FieldTooLarge { field: f.name.clone() });
                    }
                }
                FieldKind::Flag => {}
                FieldKind::Enum { labels } => {
                    if labels.is_empty() {
                        return Err(DomainError::EmptyEnum { field: f.name.clone() });
                    }
                    let mut seen = std::collections::BTreeSet::new();
                    for l in labels {
                        if l.contains(',') || l.contains('"') || l.contains('#') {
                            return Err(DomainError::InvalidLabel {
                                field: f.name.clone(),
                                label: l.clone(),
                            });
                        }
                        if !seen.insert(l) {
                            return Err(DomainError::DuplicateLabel {
                                field: f.name.clone(),
                                label: l.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(InputDomain { fields })
    }

    /// Parse the line-oriented domain file format:
    ///
    /// ```text
    /// field <name> int <lo> <hi>
    /// field <name> flag
    /// field <name> enum <label> [...]
    /// ```
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let mut fields = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let mut toks = line.split_whitespace();
            let err = |message: String| DomainError::Syntax { line: lineno, message };
            match toks.next() {
                Some("field") => {
                    let name = toks
                        .next()
                        .ok_or_else(|| err("expected field name".into()))?
                        .to_string();
                    match toks.next() {
                        Some("int") => {
                            let lo: i64 = toks
                                .next()
                                .ok_or_else(|| err("expected <lo>".into()))?
                                .parse()
                                .map_err(|_| err("invalid integer bound".into()))?;
                            let hi: i64 = toks
                                .next()
                                .ok_or_else(|| err("expected <hi>".into()))?
                                .parse()
                                .map_err(|_| err("invalid integer bound".into()))?;
                            if toks.next().is_some() {
                                return Err(err("unexpected trailing tokens".into()));
                            }
                            fields.push(FieldSpec::int(name, lo, hi));
                        }
                        Some("flag") => {
                            if toks.next().is_some() {
                                return Err(err("unexpected trailing tokens".into()));
                            }
                            fields.push(FieldSpec::flag(name));
                        }
                        Some("enum") => {
                            let labels: Vec<String> = toks.map(|s| s.to_string()).collect();
                            fields.push(FieldSpec {
                                name,
                                kind: FieldKind::Enum { labels },
                            });
                        }
                        other => {
                            return Err(err(format!(
                                "unknown field kind `{}` (expected int/flag/enum)",
                                other.unwrap_or("")
                            )))
                        }
                    }
                }
                Some(other) => return Err(err(format!("unknown directive `{other}`"))),
                None => {}
            }
        }
        InputDomain::new(fields)
    }

    /// Canonical text form; parses back to an equal domain.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for f in &self.fields {
            match &f.kind {
                FieldKind::IntRange { lo, hi } => {
                    out.push_str(&format!("field {} int {} {}\n", f.name, lo, hi))
                }
                FieldKind::Flag => out.push_str(&format!("field {} flag\n", f.name)),
                FieldKind::Enum { labels } => {
                    out.push_str(&format!("field {} enum {}\n", f.name, labels.join(" ")))
                }
            }
        }
        out
    }

    /// Content digest used to tie campaign results to the exact domain.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.serialize().as_bytes());
        format!("sha256:{:x}", hasher.finalize())
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    /// Exact number of points: the product of the field sizes.
    pub fn cardinality(&self) -> BigUint {
        let mut card = BigUint::one();
        for f in &self.fields {
            card *= BigUint::from(f.size());
        }
        card
    }

    pub fn validate_point(&self, point: &InputPoint) -> Result<(), DomainError> {
        if point.values.len() != self.fields.len() {
            return Err(DomainError::ArityMismatch {
                expected: self.fields.len(),
                actual: point.values.len(),
            });
        }
        for (f, &v) in self.fields.iter().zip(&point.values) {
            if !f.contains_value(v) {
                return Err(DomainError::ValueOutOfRange { field: f.name.clone(), value: v });
            }
        }
        Ok(())
    }

    /// Decode a global index into a point. Bijective inverse of
    /// [`InputDomain::point_to_index`]; the last field varies fastest.
    pub fn index_to_point(&self, index: &BigUint) -> Result<InputPoint, DomainError> {
        let cardinality = self.cardinality();
        if index >= &cardinality {
            return Err(DomainError::IndexOutOfRange { index: index.clone(), cardinality });
        }
        let mut values = vec![0i64; self.fields.len()];
        let mut rest = index.clone();
        for (f, slot) in self.fields.iter().zip(values.iter_mut()).rev() {
            let size = BigUint::from(f.size());
            let pos = (&rest % &size).to_u64().unwrap();
            rest /= size;
            *slot = f.value_at(pos);
        }
        Ok(InputPoint { values })
    }

    /// Encode a point into its global index.
    pub fn point_to_index(&self, point: &InputPoint) -> Result<BigUint, DomainError> {
        self.validate_point(point)?;
        let mut index = BigUint::zero();
        for (f, &v) in self.fields.iter().zip(&point.values) {
            index *= BigUint::from(f.size());
            index += BigUint::from(f.position_of(v).unwrap());
        }
        Ok(index)
    }

    /// Split the index space into `parts` contiguous ranges whose sizes
    /// differ by at most one. Ranges beyond the cardinality come out empty.
    pub fn partition(&self, parts: usize) -> Vec<IndexRange> {
        assert!(parts >= 1, "partition needs at least one part");
        let cardinality = self.cardinality();
        let parts_big = BigUint::from(parts);
        let base = &cardinality / &parts_big;
        let remainder = (&cardinality % &parts_big).to_usize().unwrap();
        let mut ranges = Vec::with_capacity(parts);
        let mut start = BigUint::zero();
        for i in 0..parts {
            let mut len = base.clone();
            if i < remainder {
                len += BigUint::one();
            }
            let end = &start + &len;
            ranges.push(IndexRange { start: start.clone(), end: end.clone() });
            start = end;
        }
        ranges
    }

    pub fn full_range(&self) -> IndexRange {
        IndexRange { start: BigUint::zero(), end: self.cardinality() }
    }

    /// Streaming cursor over a contiguous index range. Constant memory;
    /// points are exposed as a borrowed value slice.
    pub fn cursor(&self, range: &IndexRange) -> Result<Cursor<'_>, DomainError> {
        let cardinality = self.cardinality();
        if range.start > range.end || range.end > cardinality {
            return Err(DomainError::InvalidRange {
                start: range.start.clone(),
                end: range.end.clone(),
                cardinality,
            });
        }
        let remaining = range.len().to_u128().ok_or(DomainError::RangeTooLong)?;
        let values = if range.is_empty() {
            vec![0; self.fields.len()]
        } else {
            self.index_to_point(&range.start)?.values
        };
        Ok(Cursor {
            domain: self,
            values,
            start: range.start.clone(),
            emitted: 0,
            remaining,
        })
    }

    /// All points in index order, paired with their global index.
    pub fn enumerate(&self) -> Result<Points<'_>, DomainError> {
        Ok(Points { cursor: self.cursor(&self.full_range())? })
    }

    /// Exactly the points satisfying `predicate`, in ascending index order.
    /// A predicate error ends the stream with a distinct error item.
    pub fn enumerate_filtered<P>(&self, predicate: P) -> Result<FilteredPoints<'_, P>, DomainError>
    where
        P: FnMut(&[i64]) -> Result<bool, String>,
    {
        Ok(FilteredPoints {
            cursor: self.cursor(&self.full_range())?,
            predicate,
            dead: false,
        })
    }

    /// Render a point's values with a separator, protocol-style.
    pub fn render_point(&self, values: &[i64], separator: char) -> String {
        let mut out = String::new();
        for (i, (f, &v)) in self.fields.iter().zip(values).enumerate() {
            if i > 0 {
                out.push(separator);
            }
            out.push_str(&f.render_value(v));
        }
        out
    }
}

/// Lending iterator over a range of the domain. `advance` returns the next
/// point as a borrowed slice; `global_index` identifies the point just
/// returned.
pub struct Cursor<'a> {
    domain: &'a InputDomain,
    values: Vec<i64>,
    start: BigUint,
    emitted: u128,
    remaining: u128,
}

impl<'a> Cursor<'a> {
    pub fn advance(&mut self) -> Option<&[i64]> {
        if self.remaining == 0 {
            return None;
        }
        if self.emitted > 0 {
            // Odometer step: bump the last field, carrying leftwards.
            for (f, slot) in self.domain.fields.iter().zip(self.values.iter_mut()).rev() {
                if *slot < f.last_value() {
                    *slot += 1;
                    break;
                }
                *slot = f.first_value();
            }
        }
        self.emitted += 1;
        self.remaining -= 1;
        Some(&self.values)
    }

    /// Global index of the point most recently returned by `advance`.
    pub fn global_index(&self) -> BigUint {
        &self.start + BigUint::from(self.emitted - 1)
    }

    pub fn current(&self) -> &[i64] {
        &self.values
    }
}

/// Owning iterator over `(global index, point)` pairs.
pub struct Points<'a> {
    cursor: Cursor<'a>,
}

impl Iterator for Points<'_> {
    type Item = (BigUint, InputPoint);

    fn next(&mut self) -> Option<Self::Item> {
        let values = self.cursor.advance()?.to_vec();
        Some((self.cursor.global_index(), InputPoint { values }))
    }
}

/// Iterator over the points that satisfy a predicate, in index order.
pub struct FilteredPoints<'a, P> {
    cursor: Cursor<'a>,
    predicate: P,
    dead: bool,
}

impl<P> Iterator for FilteredPoints<'_, P>
where
    P: FnMut(&[i64]) -> Result<bool, String>,
{
    type Item = Result<(BigUint, InputPoint), DomainError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.dead {
            return None;
        }
        loop {
            let values = self.cursor.advance()?;
            match (self.predicate)(values) {
                Ok(true) => {
                    let point = InputPoint { values: values.to_vec() };
                    return Some(Ok((self.cursor.global_index(), point)));
                }
                Ok(false) => continue,
                Err(message) => {
                    self.dead = true;
                    return Some(Err(DomainError::PredicateFailed { message }));
                }
            }
        }
    }
}
