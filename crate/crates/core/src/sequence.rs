//! Degree sequences: graphicality, lay-off, distance and degree sufficiency.
//!
//! A [`DegreeSequence`] is always stored nonincreasing. Zero terms are kept,
//! so `len()` is the number of vertices of any realization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    /// Builds a sequence from arbitrary terms, sorting them nonincreasing.
    pub fn new(mut terms: Vec<usize>) -> Self {
        terms.sort_unstable_by(|a, b| b.cmp(a));
        DegreeSequence(terms)
    }

    /// `value` repeated `count` times.
    pub fn constant(value: usize, count: usize) -> Self {
        DegreeSequence(vec![value; count])
    }

    pub fn terms(&self) -> &[usize] {
        &self.0
    }

    pub fn into_terms(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max_term(&self) -> usize {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn min_term(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    /// The 1-based term `d_j`, zero-padded past the end.
    pub fn padded(&self, j: usize) -> usize {
        if j == 0 {
            return 0;
        }
        self.0.get(j - 1).copied().unwrap_or(0)
    }

    /// Erdős–Gallai test. Trailing zeros are isolated vertices.
    pub fn is_graphic(&self) -> bool {
        let d = &self.0;
        let n = d.len();
        if n == 0 {
            return true;
        }
        if !self.sum().is_multiple_of(2) || d[0] > n - 1 {
            return false;
        }
        let mut prefix = 0usize;
        for p in 1..=n {
            prefix += d[p - 1];
            let tail: usize = d[p..].iter().map(|&x| x.min(p)).sum();
            if prefix > p * (p - 1) + tail {
                return false;
            }
        }
        true
    }

    /// Lays off the term at 1-based position `index`.
    pub fn layoff(&self, index: usize) -> Result<DegreeSequence> {
        self.layoff_traced(index).map(|l| l.result)
    }

    /// Lay-off that also records which positions were reduced and where each
    /// surviving term came from, so a realization of the result can be
    /// extended back to one of `self`.
    pub fn layoff_traced(&self, index: usize) -> Result<Layoff> {
        let n = self.len();
        if index == 0 || index > n {
            return Err(Error::range(
                "lay-off index",
                format!("{index} not in 1..={n}"),
            ));
        }
        let d = &self.0;
        let value = d[index - 1];
        if value + 1 > n {
            return Err(Error::NotGraphic(format!(
                "term {value} at position {index} exceeds n-1 = {}",
                n - 1
            )));
        }
        // 0-based positions that lose one unit.
        let reduced: Vec<usize> = if value < index {
            (0..value).collect()
        } else {
            (0..index - 1).chain(index..value + 1).collect()
        };
        let mut work: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
        let mut r = reduced.iter().peekable();
        for (pos, &term) in d.iter().enumerate() {
            let hit = r.peek() == Some(&&pos);
            if hit {
                r.next();
            }
            if pos == index - 1 {
                continue;
            }
            let v = if hit {
                term.checked_sub(1).ok_or_else(|| {
                    Error::NotGraphic(format!(
                        "lay-off of position {index} drives position {} below zero",
                        pos + 1
                    ))
                })?
            } else {
                term
            };
            work.push((v, pos));
        }
        // Stable: equal values keep their original relative order.
        work.sort_by_key(|&(v, _)| std::cmp::Reverse(v));
        let origin = work.iter().map(|&(_, pos)| pos).collect();
        let result = DegreeSequence(work.into_iter().map(|(v, _)| v).collect());
        Ok(Layoff {
            index: index - 1,
            value,
            reduced,
            origin,
            result,
        })
    }

    /// Repeatedly lays off a minimum term (the rightmost one) while it is
    /// below `threshold`.
    pub fn layoff_batch_below(&self, threshold: usize) -> Result<BatchLayoff> {
        let mut current = self.clone();
        let mut steps = Vec::new();
        let mut laid_off_sum = 0;
        while !current.is_empty() && current.min_term() < threshold {
            let step = current.layoff_traced(current.len())?;
            laid_off_sum += step.value;
            current = step.result.clone();
            steps.push(step);
        }
        Ok(BatchLayoff {
            count: steps.len(),
            laid_off_sum,
            result: current,
            steps,
        })
    }

    /// True iff `d_i >= h_i` for every term of `h`. A sequence shorter than
    /// `h` is never degree-sufficient.
    pub fn is_degree_sufficient_for(&self, h: &DegreeSequence) -> bool {
        h.len() <= self.len() && self.0.iter().zip(h.terms()).all(|(d, hh)| d >= hh)
    }

    /// Appends `count` copies of `value`, keeping the order. Used by the
    /// constructions, which always append no-larger terms.
    pub(crate) fn extended(mut self, value: usize, count: usize) -> Self {
        debug_assert!(self.0.last().is_none_or(|&l| l >= value) || count == 0);
        self.0.extend(std::iter::repeat_n(value, count));
        self
    }
}

/// ℓ¹ distance with the shorter sequence zero-padded.
pub fn l1_distance(a: &DegreeSequence, b: &DegreeSequence) -> usize {
    let n = a.len().max(b.len());
    (1..=n).map(|j| a.padded(j).abs_diff(b.padded(j))).sum()
}

/// Result of laying off one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layoff {
    /// 0-based position of the removed term in the input.
    pub index: usize,
    pub value: usize,
    /// 0-based input positions that were decremented.
    pub reduced: Vec<usize>,
    /// `origin[p]` is the input position of output position `p`.
    pub origin: Vec<usize>,
    pub result: DegreeSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchLayoff {
    pub result: DegreeSequence,
    pub count: usize,
    /// Sum of the laid-off values, each taken when it was laid off.
    pub laid_off_sum: usize,
    pub steps: Vec<Layoff>,
}

impl From<Vec<usize>> for DegreeSequence {
    fn from(v: Vec<usize>) -> Self {
        DegreeSequence::new(v)
    }
}

impl fmt::Display for DegreeSequence {
    /// Run-length form, e.g. `4,4,1^6`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let v = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == v {
                j += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            // Runs of three or more are compressed; shorter runs are spelled out.
            if j - i >= 3 {
                write!(f, "{v}^{}", j - i)?;
            } else {
                let parts: Vec<String> = (i..j).map(|_| v.to_string()).collect();
                f.write_str(&parts.join(","))?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for DegreeSequence {
    type Err = Error;

    /// Accepts comma-separated terms with optional `v^m` repeats.
    /// Whitespace is ignored; unsorted input is sorted.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let compact: Vec<(usize, char)> = s
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        if compact.is_empty() {
            return Ok(DegreeSequence::default());
        }
        let mut items: Vec<Vec<(usize, char)>> = vec![Vec::new()];
        for &(pos, c) in &compact {
            if c == ',' {
                items.push(Vec::new());
            } else {
                items.last_mut().unwrap().push((pos, c));
            }
        }
        for (n, item) in items.iter().enumerate() {
            let start = item.first().map(|p| p.0).unwrap_or_else(|| {
                // empty item: point at the offending comma
                compact
                    .iter()
                    .filter(|(_, c)| *c == ',')
                    .nth(n.saturating_sub(1))
                    .map_or(0, |p| p.0)
            });
            if item.is_empty() {
                return Err(Error::parse(start, "empty term"));
            }
            let text: String = item.iter().map(|p| p.1).collect();
            let (value, count) = match text.split_once('^') {
                Some((v, m)) => (parse_num(v, start)?, parse_num(m, start)?),
                None => (parse_num(&text, start)?, 1),
            };
            if count == 0 {
                return Err(Error::parse(start, "repeat count must be positive"));
            }
            terms.extend(std::iter::repeat_n(value, count));
        }
        Ok(DegreeSequence::new(terms))
    }
}

fn parse_num(s: &str, pos: usize) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(
            pos,
            format!("expected a nonnegative integer, found {s:?}"),
        ));
    }
    s.parse()
        .map_err(|_| Error::parse(pos, format!("integer {s} overflows")))
}

impl Serialize for DegreeSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DegreeSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> DegreeSequence {
        s.parse().unwrap()
    }

    #[test]
    fn sums() {
        assert_eq!(seq("7,1^7").sum(), 14);
        assert_eq!(seq("").sum(), 0);
        assert_eq!(seq("4,4,1^6").sum(), 14);
    }

    #[test]
    fn graphicality() {
        assert!(seq("3,3,3,3").is_graphic());
        assert!(!seq("3,3,1,1").is_graphic());
        assert!(seq("7,1^7").is_graphic());
        assert!(seq("").is_graphic());
        assert!(seq("0,0,0").is_graphic());
        assert!(!seq("1").is_graphic());
        assert!(!seq("3,1,1").is_graphic());
    }

    #[test]
    fn layoff_cases() {
        assert_eq!(seq("2,2,2,2").layoff(4).unwrap(), seq("2,1,1"));
        assert_eq!(seq("3,3,3,3").layoff(1).unwrap(), seq("2,2,2"));
        assert_eq!(seq("7,1^7").layoff(1).unwrap(), seq("0^7"));
        // d_i >= i branch from the middle: d_2 = 3 reduces positions 1,3,4
        assert_eq!(seq("3,3,2,2,2").layoff(2).unwrap(), seq("2,2,1,1"));
    }

    #[test]
    fn layoff_errors() {
        assert!(matches!(
            seq("2,2").layoff(3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            seq("2,2").layoff(0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(seq("5,1").layoff(1), Err(Error::NotGraphic(_))));
        assert_eq!(seq("1,1,0").layoff(1).unwrap(), seq("0,0"));
        assert!(matches!(seq("2,0,0").layoff(1), Err(Error::NotGraphic(_))));
    }

    #[test]
    fn layoff_origin_tracks_positions() {
        let l = seq("3,3,2,1,1").layoff_traced(5).unwrap();
        // d_5 = 1 < 5: position 1 drops to 2; others keep their values.
        assert_eq!(l.reduced, vec![0]);
        assert_eq!(l.result, seq("3,2,2,1"));
        assert_eq!(l.origin, vec![1, 0, 2, 3]);
    }

    #[test]
    fn batch_layoff() {
        let s = seq("7,1^7");
        let b = s.layoff_batch_below(1).unwrap();
        assert_eq!((b.result.clone(), b.count, b.laid_off_sum), (s, 0, 0));

        let s = seq("3,3,2,1,1");
        let b = s.layoff_batch_below(2).unwrap();
        assert_eq!(b.count, 2);
        assert!(b.laid_off_sum <= 2);
        assert!(b.result.min_term() >= 2);
        assert_eq!(b.result.sum(), s.sum() - 2 * b.laid_off_sum);

        let s = seq("2,2,2,2");
        let b = s.layoff_batch_below(3).unwrap();
        assert!(b.result.is_empty() || b.result.terms().iter().all(|&x| x == 0));
        assert_eq!(b.count, 4);
        assert_eq!(b.laid_off_sum, 4);
        assert!(b.laid_off_sum <= b.count * 2);
        assert_eq!(b.result.sum(), s.sum() - 2 * b.laid_off_sum);
    }

    #[test]
    fn distances() {
        assert_eq!(l1_distance(&seq("4,4,1^6"), &seq("7,1^7")), 6);
        assert_eq!(l1_distance(&seq("3,2,1"), &seq("3,2,1")), 0);
        assert_eq!(l1_distance(&seq("2,2"), &seq("2")), 2);
        assert_eq!(l1_distance(&seq("2"), &seq("2,2")), 2);
    }

    #[test]
    fn degree_sufficiency() {
        let k3 = seq("2,2,2");
        assert!(seq("3,3,3,3").is_degree_sufficient_for(&seq("3,3,3,3")));
        assert!(!seq("4,4,1^6").is_degree_sufficient_for(&k3));
        assert!(seq("3,2,2,2,1").is_degree_sufficient_for(&k3));
        assert!(!seq("2,2").is_degree_sufficient_for(&k3));
    }

    #[test]
    fn text_format() {
        assert_eq!(seq("7, 1 ^ 7").to_string(), "7,1^7");
        assert_eq!(seq("1,7,1,1,1,1,1,1").to_string(), "7,1^7");
        assert_eq!(seq("").to_string(), "");
        assert_eq!(seq("0^3").terms(), &[0, 0, 0]);
        assert!(matches!(
            "1,,2".parse::<DegreeSequence>(),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            "1,x".parse::<DegreeSequence>(),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            "3^0".parse::<DegreeSequence>(),
            Err(Error::Parse { .. })
        ));
        assert!("99999999999999999999999".parse::<DegreeSequence>().is_err());
    }

    #[test]
    fn serde_uses_text_form() {
        let s = seq("4,4,1^6");
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "\"4,4,1^6\"");
        let back: DegreeSequence = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
