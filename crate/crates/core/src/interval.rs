//! Finite unions of real intervals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_open: bool, hi: f64, hi_open: bool) -> Self {
        // infinite ends are always open
        Interval {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, false, hi, false)
    }

    pub fn full() -> Self {
        Interval::new(f64::NEG_INFINITY, true, f64::INFINITY, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        above && below
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint. For unbounded components: one unit inside the finite end,
    /// or 0 for the whole line.
    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + (self.hi - self.lo) / 2.0,
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        let (lo, lo_open) = match self.lo.partial_cmp(&o.lo) {
            Some(std::cmp::Ordering::Greater) => (self.lo, self.lo_open),
            Some(std::cmp::Ordering::Less) => (o.lo, o.lo_open),
            _ => (self.lo, self.lo_open || o.lo_open),
        };
        let (hi, hi_open) = match self.hi.partial_cmp(&o.hi) {
            Some(std::cmp::Ordering::Less) => (self.hi, self.hi_open),
            Some(std::cmp::Ordering::Greater) => (o.hi, o.hi_open),
            _ => (self.hi, self.hi_open || o.hi_open),
        };
        Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |x: f64| {
            if x == f64::INFINITY {
                "inf".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            num(self.lo),
            num(self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Sorted, disjoint, non-touching intervals.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalSet {
            parts: vec![Interval::full()],
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_parts(vec![Interval::closed(lo, hi)])
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        // closed lower ends sort first on ties
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = out.last_mut() {
                let joins = p.lo < last.hi || (p.lo == last.hi && !(last.hi_open && p.lo_open));
                if joins {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                        last.hi_open = p.hi_open;
                    } else if p.hi == last.hi {
                        last.hi_open = last.hi_open && p.hi_open;
                    }
                    continue;
                }
            }
            out.push(p);
        }
        IntervalSet { parts: out }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Membership after widening every component by `eps` on both sides.
    pub fn contains_within(&self, x: f64, eps: f64) -> bool {
        self.parts
            .iter()
            .any(|p| x >= p.lo - eps && x <= p.hi + eps)
    }

    pub fn union(&self, o: &IntervalSet) -> IntervalSet {
        let mut all = self.parts.clone();
        all.extend_from_slice(&o.parts);
        Self::from_parts(all)
    }

    pub fn intersect(&self, o: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &o.parts {
                out.push(a.intersect(b));
            }
        }
        Self::from_parts(out)
    }

    /// Total length; `inf` if any component is unbounded.
    pub fn volume(&self) -> f64 {
        self.parts.iter().map(Interval::width).sum()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.parts.iter().map(Interval::midpoint).collect()
    }

    /// The widest component; the first one on ties.
    pub fn largest(&self) -> Option<&Interval> {
        let mut best: Option<&Interval> = None;
        for p in &self.parts {
            if best.is_none_or(|b| p.width() > b.width()) {
                best = Some(p);
            }
        }
        best
    }

    /// Applies a monotonically increasing map to every endpoint.
    pub fn map_monotone<E>(
        &self,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<IntervalSet, E> {
        let mut out = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            let lo = if p.lo.is_finite() { f(p.lo)? } else { p.lo };
            let hi = if p.hi.is_finite() { f(p.hi)? } else { p.hi };
            let (lo, hi, lo_open, hi_open) = if lo <= hi {
                (lo, hi, p.lo_open, p.hi_open)
            } else {
                (hi, lo, p.hi_open, p.lo_open)
            };
            out.push(Interval::new(lo, lo_open, hi, hi_open));
        }
        Ok(Self::from_parts(out))
    }

    /// Same shape with every finite endpoint within `tol`.
    pub fn approx_eq(&self, o: &IntervalSet, tol: f64) -> bool {
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= tol;
        self.parts.len() == o.parts.len()
            && self
                .parts
                .iter()
                .zip(&o.parts)
                .all(|(a, b)| close(a.lo, b.lo) && close(a.hi, b.hi))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("empty");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed interval set `{text}`: {reason}")]
pub struct IntervalParseError {
    pub text: String,
    pub reason: String,
}

fn parse_bound(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => {
            let v: f64 = t.parse().ok()?;
            v.is_finite().then_some(v)
        }
    }
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let lo_open = match s.chars().next() {
            Some('[') => false,
            Some('(') => true,
            _ => return Err("expected `[` or `(`".into()),
        };
        let hi_open = match s.chars().last() {
            Some(']') => false,
            Some(')') => true,
            _ => return Err("expected `]` or `)`".into()),
        };
        let inner = &s[1..s.len() - 1];
        let (a, b) = inner.split_once(',').ok_or("expected `lo, hi`")?;
        let lo = parse_bound(a).ok_or_else(|| format!("bad bound `{}`", a.trim()))?;
        let hi = parse_bound(b).ok_or_else(|| format!("bad bound `{}`", b.trim()))?;
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err("lower bound cannot be +inf, upper bound cannot be -inf".into());
        }
        if (lo.is_infinite() && !lo_open) || (hi.is_infinite() && !hi_open) {
            return Err("infinite bounds must be open".into());
        }
        Ok(Interval::new(lo, lo_open, hi, hi_open))
    }
}

impl FromStr for IntervalSet {
    type Err = IntervalParseError;

    /// `empty`, or components like `[0, 1]`, `(-inf, 2)` joined by `|`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| IntervalParseError {
            text: s.to_string(),
            reason,
        };
        if s.trim() == "empty" {
            return Ok(IntervalSet::empty());
        }
        let parts = s
            .split('|')
            .map(|p| p.parse::<Interval>().map_err(err))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntervalSet::from_parts(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    #[test]
    fn set_algebra() {
        assert_eq!(set("[0, 1]").intersect(&set("[0.8, inf)")), set("[0.8, 1]"));
        assert_eq!(set("[1.4, 1.5]").union(&set("[1, 1.5]")), set("[1, 1.5]"));
        assert_eq!(set("[1, 1.5] | [1.75, 1.875]").volume(), 0.625);
        assert_eq!(set("[0, 1) | (1, 2]").parts().len(), 2);
        assert_eq!(set("[0, 1) | [1, 2]"), set("[0, 2]"));
        assert!(set("[0, 1)").intersect(&set("[1, 2]")).is_empty());
        assert_eq!(set("(-inf, 1.2)").volume(), f64::INFINITY);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["empty", "[0, 1]", "(-inf, 1.2)", "[-0.2, 0.05) | (3, inf)"] {
            assert_eq!(set(s).to_string(), s);
        }
        assert!("[1, inf]".parse::<IntervalSet>().is_err());
        assert!("[1 2]".parse::<IntervalSet>().is_err());
    }

    #[test]
    fn largest_and_midpoint() {
        let s = set("[0, 1] | [2, 4]");
        assert_eq!(s.largest().unwrap().midpoint(), 3.0);
        assert_eq!(set("(-inf, inf)").largest().unwrap().midpoint(), 0.0);
        assert_eq!(set("[1, inf)").largest().unwrap().midpoint(), 2.0);
    }
}
