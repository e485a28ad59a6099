//! Integer interval domains with a bounded set of interior holes.

use std::fmt;

/// Smallest value of the default integer range.
pub const DEFAULT_MIN: i64 = -2_147_483_647;
/// Largest value of the default integer range.
pub const DEFAULT_MAX: i64 = 2_147_483_646;

/// Maximum number of interior exclusions kept per domain. Removals beyond the
/// cap are dropped (the domain keeps its bounds only), which is weaker but sound.
pub const HOLE_CAP: usize = 256;

/// Raised when an update would leave a domain without values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Empty;

/// A non-empty set of integers: `[min, max]` minus `holes`.
///
/// `holes` is sorted, strictly inside `(min, max)`, and never longer than
/// [`HOLE_CAP`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    min: i64,
    max: i64,
    holes: Vec<i64>,
}

impl Domain {
    pub fn new(min: i64, max: i64) -> Option<Self> {
        (min <= max).then(|| Domain { min, max, holes: Vec::new() })
    }

    pub fn singleton(v: i64) -> Self {
        Domain { min: v, max: v, holes: Vec::new() }
    }

    pub fn default_range() -> Self {
        Domain { min: DEFAULT_MIN, max: DEFAULT_MAX, holes: Vec::new() }
    }

    #[inline]
    pub fn min(&self) -> i64 {
        self.min
    }

    #[inline]
    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn holes(&self) -> &[i64] {
        &self.holes
    }

    #[inline]
    pub fn is_fixed(&self) -> bool {
        self.min == self.max
    }

    pub fn value(&self) -> Option<i64> {
        self.is_fixed().then_some(self.min)
    }

    /// Number of values in the domain.
    pub fn size(&self) -> u64 {
        (self.max as i128 - self.min as i128 + 1 - self.holes.len() as i128) as u64
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.min && v <= self.max && self.holes.binary_search(&v).is_err()
    }

    /// Smallest member `>= v`, if any.
    pub fn next_at_least(&self, v: i64) -> Option<i64> {
        let mut v = v.max(self.min);
        if v > self.max {
            return None;
        }
        let Ok(mut pos) = self.holes.binary_search(&v) else {
            return Some(v);
        };
        // walk past a run of consecutive holes
        while pos < self.holes.len() && self.holes[pos] == v {
            v += 1;
            pos += 1;
        }
        (v <= self.max).then_some(v)
    }

    /// Largest member `<= v`, if any.
    pub fn prev_at_most(&self, v: i64) -> Option<i64> {
        let mut v = v.min(self.max);
        if v < self.min {
            return None;
        }
        let Ok(mut pos) = self.holes.binary_search(&v) else {
            return Some(v);
        };
        loop {
            if self.holes[pos] != v {
                break;
            }
            v -= 1;
            if pos == 0 {
                break;
            }
            pos -= 1;
        }
        (v >= self.min).then_some(v)
    }

    /// Iterate the members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let mut holes = self.holes.iter().peekable();
        (self.min..=self.max).filter(move |v| {
            while let Some(&&h) = holes.peek() {
                if h < *v {
                    holes.next();
                } else {
                    return h != *v;
                }
            }
            true
        })
    }

    fn normalize(&mut self) -> Result<(), Empty> {
        if self.min > self.max {
            return Err(Empty);
        }
        // drop holes outside the (new) bounds
        if !self.holes.is_empty() {
            let (min, max) = (self.min, self.max);
            self.holes.retain(|&h| h >= min && h <= max);
        }
        // bounds must not sit on a hole
        while self.holes.first() == Some(&self.min) {
            self.holes.remove(0);
            self.min += 1;
            if self.min > self.max {
                return Err(Empty);
            }
        }
        while self.holes.last() == Some(&self.max) {
            self.holes.pop();
            self.max -= 1;
            if self.min > self.max {
                return Err(Empty);
            }
        }
        Ok(())
    }

    /// Raise the lower bound. Returns whether the domain changed.
    pub fn set_min(&mut self, v: i64) -> Result<bool, Empty> {
        if v <= self.min {
            return Ok(false);
        }
        if v > self.max {
            return Err(Empty);
        }
        self.min = v;
        self.normalize()?;
        Ok(true)
    }

    /// Lower the upper bound. Returns whether the domain changed.
    pub fn set_max(&mut self, v: i64) -> Result<bool, Empty> {
        if v >= self.max {
            return Ok(false);
        }
        if v < self.min {
            return Err(Empty);
        }
        self.max = v;
        self.normalize()?;
        Ok(true)
    }

    pub fn assign(&mut self, v: i64) -> Result<bool, Empty> {
        if !self.contains(v) {
            return Err(Empty);
        }
        if self.is_fixed() {
            return Ok(false);
        }
        self.min = v;
        self.max = v;
        self.holes.clear();
        Ok(true)
    }

    /// Remove a single value. Interior removals beyond [`HOLE_CAP`] are ignored.
    pub fn remove(&mut self, v: i64) -> Result<bool, Empty> {
        if v < self.min || v > self.max {
            return Ok(false);
        }
        if v == self.min {
            return self.set_min(v + 1);
        }
        if v == self.max {
            return self.set_max(v - 1);
        }
        match self.holes.binary_search(&v) {
            Ok(_) => Ok(false),
            Err(_) if self.holes.len() >= HOLE_CAP => Ok(false),
            Err(pos) => {
                self.holes.insert(pos, v);
                Ok(true)
            }
        }
    }

    /// Intersect with another domain. Returns whether `self` changed.
    pub fn intersect(&mut self, other: &Domain) -> Result<bool, Empty> {
        let mut changed = self.set_min(other.min)?;
        changed |= self.set_max(other.max)?;
        for &h in &other.holes {
            changed |= self.remove(h)?;
        }
        Ok(changed)
    }

    /// Whether the two domains share at least one value.
    pub fn intersects(&self, other: &Domain) -> bool {
        let lo = self.min.max(other.min);
        let hi = self.max.min(other.max);
        if lo > hi {
            return false;
        }
        if self.holes.is_empty() && other.holes.is_empty() {
            return true;
        }
        // bounded walk; domains with holes are small in practice
        let mut v = lo;
        for _ in 0..=(HOLE_CAP * 2 + 1) {
            match self.next_at_least(v) {
                Some(a) if a <= hi => {
                    if other.contains(a) {
                        return true;
                    }
                    match other.next_at_least(a) {
                        Some(b) if b <= hi => v = b,
                        _ => return false,
                    }
                }
                _ => return false,
            }
        }
        true
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.min, self.max)?;
        if !self.holes.is_empty() {
            write!(f, "\\{:?}", self.holes)?;
        }
        Ok(())
    }
}
