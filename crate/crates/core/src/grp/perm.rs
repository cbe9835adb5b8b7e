use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::validation(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Parse cycle notation such as `"(0 1)(2 3)"`, `"(0,1,2)"` or `"()"`.
    /// The result acts on `0..max(n, largest point + 1)`.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::validation(format!("expected `(` in cycle string {s:?}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::validation(format!(
                    "stray text in cycle string {s:?}"
                )));
            }
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::validation(format!("unclosed cycle in {s:?}")))?
                + open;
            let body = &rest[open + 1..close];
            let mut cycle = Vec::new();
            for tok in body.split(|ch: char| ch == ',' || ch.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::validation(format!("bad point {tok:?} in {s:?}")))?;
                cycle.push(p);
            }
            cycles.push(cycle);
            rest = rest[close + 1..].trim_start();
        }
        let top = cycles.iter().flatten().map(|&p| p + 1).max().unwrap_or(0);
        let n = n.max(top);
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in &cycles {
            for &p in cycle {
                if used[p] {
                    return Err(Error::validation(format!(
                        "point {p} repeated in cycle string {s:?}"
                    )));
                }
                used[p] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(i)
    }

    /// Extend to act on `0..n` (fixing the new points).
    pub fn padded(&self, n: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(self.0.len()..n);
        Permutation(v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let n = self.degree().max(other.degree());
        Permutation((0..n).map(|i| self.apply(other.apply(i))).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, fixed points omitted; `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
                first = false;
                i = self.0[i];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}
