//! Families of grid-aligned intervals over which suprema are taken.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyKind {
    /// Every interval `[i..=j]`.
    All,
    /// Lengths `2^m` at every grid position.
    Dyadic,
    /// Every interval of at most `max_len` cells.
    Windowed { max_len: usize },
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    /// `all`, `dyadic` or `windowed:L`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(':') {
            None if s.trim() == "all" => Ok(FamilyKind::All),
            None if s.trim() == "dyadic" => Ok(FamilyKind::Dyadic),
            Some(("windowed", l)) => {
                let max_len = l
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::param("family", format!("`{l}` is not a window length")))?;
                if max_len == 0 {
                    return Err(Error::param("family", "window length must be at least 1"));
                }
                Ok(FamilyKind::Windowed { max_len })
            }
            _ => Err(Error::param("family", format!("unknown family `{s}`"))),
        }
    }
}

/// A family of cell-index intervals `[i..=j]` on a grid of `n_cells` cells.
/// Members are enumerated lazily; [`IntervalFamily::resolve`] materializes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFamily {
    pub kind: FamilyKind,
    pub n_cells: usize,
}

impl IntervalFamily {
    pub fn new(kind: FamilyKind, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::param("family.n_cells", "must be at least 1"));
        }
        if let FamilyKind::Windowed { max_len } = kind {
            if max_len == 0 {
                return Err(Error::param("family.max_len", "must be at least 1"));
            }
        }
        Ok(IntervalFamily { kind, n_cells })
    }

    pub fn all(n_cells: usize) -> Self {
        IntervalFamily {
            kind: FamilyKind::All,
            n_cells: n_cells.max(1),
        }
    }

    pub fn dyadic(n_cells: usize) -> Self {
        IntervalFamily {
            kind: FamilyKind::Dyadic,
            n_cells: n_cells.max(1),
        }
    }

    pub fn windowed(n_cells: usize, max_len: usize) -> Self {
        IntervalFamily {
            kind: FamilyKind::Windowed {
                max_len: max_len.max(1),
            },
            n_cells: n_cells.max(1),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::All => "all".into(),
            FamilyKind::Dyadic => "dyadic".into(),
            FamilyKind::Windowed { max_len } => format!("windowed:{max_len}"),
        }
    }

    /// Admissible lengths, in increasing order.
    fn lengths(&self) -> Box<dyn Iterator<Item = usize>> {
        let n = self.n_cells;
        match self.kind {
            FamilyKind::All => Box::new(1..=n),
            FamilyKind::Windowed { max_len } => Box::new(1..=max_len.min(n)),
            FamilyKind::Dyadic => Box::new((0..usize::BITS).map(|m| 1usize << m).take_while(move |&l| l <= n)),
        }
    }

    pub fn contains_length(&self, len: usize) -> bool {
        len >= 1
            && len <= self.n_cells
            && match self.kind {
                FamilyKind::All => true,
                FamilyKind::Windowed { max_len } => len <= max_len,
                FamilyKind::Dyadic => len.is_power_of_two(),
            }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i <= j && j < self.n_cells && self.contains_length(j - i + 1)
    }

    pub fn len(&self) -> usize {
        self.lengths().map(|l| self.n_cells - l + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members ordered by length, then by left endpoint.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_cells;
        self.lengths()
            .flat_map(move |l| (0..=n - l).map(move |i| (i, i + l - 1)))
    }

    pub fn resolve(&self) -> Vec<(usize, usize)> {
        self.iter().collect()
    }

    /// A family of the same kind on a sub-range of `len` cells.
    pub fn on_len(&self, len: usize) -> IntervalFamily {
        IntervalFamily {
            kind: self.kind,
            n_cells: len.max(1),
        }
    }

    /// Whether every family of `self` is also in `other` (same grid).
    pub fn is_subfamily_of(&self, other: &IntervalFamily) -> bool {
        self.n_cells == other.n_cells && self.lengths().all(|l| other.contains_length(l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let n = 37;
        assert_eq!(IntervalFamily::all(n).len(), n * (n + 1) / 2);
        assert_eq!(IntervalFamily::all(n).resolve().len(), n * (n + 1) / 2);
        let d = IntervalFamily::dyadic(n);
        // lengths 1, 2, 4, 8, 16, 32
        let expected: usize = [1, 2, 4, 8, 16, 32].iter().map(|l| n - l + 1).sum();
        assert_eq!(d.len(), expected);
        assert!(d.resolve().iter().all(|&(i, j)| (j - i + 1).is_power_of_two() && j < n));
        assert_eq!(IntervalFamily::windowed(n, 3).len(), n + (n - 1) + (n - 2));
    }

    #[test]
    fn members_are_valid_pairs() {
        for fam in [IntervalFamily::all(9), IntervalFamily::dyadic(9), IntervalFamily::windowed(9, 4)] {
            for (i, j) in fam.iter() {
                assert!(i <= j && j < 9);
                assert!(fam.contains(i, j));
            }
        }
    }

    #[test]
    fn subfamily_order() {
        let n = 20;
        assert!(IntervalFamily::dyadic(n).is_subfamily_of(&IntervalFamily::all(n)));
        assert!(IntervalFamily::windowed(n, 5).is_subfamily_of(&IntervalFamily::all(n)));
        assert!(!IntervalFamily::all(n).is_subfamily_of(&IntervalFamily::dyadic(n)));
    }
}
