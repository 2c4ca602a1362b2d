//! Comparison data: duels over a deduplicated point list.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{check_dim, Error, Result};

/// Outcome of a duel, encoded as in the comparison model: `0` means the
/// first point was preferred, `1` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Preference {
    First,
    Second,
}

impl Preference {
    pub fn as_bit(self) -> u8 {
        match self {
            Preference::First => 0,
            Preference::Second => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Preference::First => Preference::Second,
            Preference::Second => Preference::First,
        }
    }
}

impl From<Preference> for u8 {
    fn from(p: Preference) -> u8 {
        p.as_bit()
    }
}

impl TryFrom<u8> for Preference {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Preference::First),
            1 => Ok(Preference::Second),
            other => Err(format!("preference bit must be 0 or 1, got {other}")),
        }
    }
}

/// A duel between two points of a [`ComparisonDataset`], by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedDuel {
    pub a: usize,
    pub b: usize,
    pub pi: Preference,
}

impl IndexedDuel {
    /// Index of the preferred point and of the other one.
    pub fn winner_loser(&self) -> (usize, usize) {
        match self.pi {
            Preference::First => (self.a, self.b),
            Preference::Second => (self.b, self.a),
        }
    }
}

/// A duel carrying its points by value, as produced by feedback processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Duel {
    pub x_a: Vec<f64>,
    pub x_b: Vec<f64>,
    pub pi: Preference,
}

impl Duel {
    pub fn new(x_a: Vec<f64>, x_b: Vec<f64>, pi: Preference) -> Self {
        Duel { x_a, x_b, pi }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDataset {
    points: Vec<Vec<f64>>,
    duels: Vec<IndexedDuel>,
}

impl ComparisonDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_duels(duels: impl IntoIterator<Item = Duel>) -> Result<Self> {
        let mut data = Self::new();
        for d in duels {
            data.push(d)?;
        }
        Ok(data)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn duels(&self) -> &[IndexedDuel] {
        &self.duels
    }

    pub fn len(&self) -> usize {
        self.duels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.duels.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }

    /// Position of `x` in the point list, by exact coordinate equality.
    pub fn index_of(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == x)
    }

    fn intern(&mut self, x: Vec<f64>) -> usize {
        match self.index_of(&x) {
            Some(i) => i,
            None => {
                self.points.push(x);
                self.points.len() - 1
            }
        }
    }

    pub fn push(&mut self, duel: Duel) -> Result<()> {
        if let Some(d) = self.dim() {
            check_dim(d, duel.x_a.len())?;
        }
        check_dim(duel.x_a.len(), duel.x_b.len())?;
        if duel.x_a.is_empty() {
            return Err(Error::input("duel points must have at least one coordinate"));
        }
        if duel.x_a.iter().chain(&duel.x_b).any(|v| !v.is_finite()) {
            return Err(Error::input("duel points must be finite"));
        }
        if duel.x_a == duel.x_b {
            return Err(Error::input("a duel must compare two distinct points"));
        }
        let a = self.intern(duel.x_a);
        let b = self.intern(duel.x_b);
        self.duels.push(IndexedDuel { a, b, pi: duel.pi });
        Ok(())
    }

    pub fn extend(&mut self, duels: impl IntoIterator<Item = Duel>) -> Result<()> {
        for d in duels {
            self.push(d)?;
        }
        Ok(())
    }

    /// Duel `k` with its points materialized.
    pub fn duel(&self, k: usize) -> Duel {
        let d = self.duels[k];
        Duel::new(self.points[d.a].clone(), self.points[d.b].clone(), d.pi)
    }

    /// SHA-256 over the exact bit patterns of points and duels, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.points.len() as u64).to_le_bytes());
        for p in &self.points {
            h.update((p.len() as u64).to_le_bytes());
            for v in p {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.update((self.duels.len() as u64).to_le_bytes());
        for d in &self.duels {
            h.update((d.a as u64).to_le_bytes());
            h.update((d.b as u64).to_le_bytes());
            h.update([d.pi.as_bit()]);
        }
        hex::encode(h.finalize())
    }
}
