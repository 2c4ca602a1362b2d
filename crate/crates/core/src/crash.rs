//! Crash feedback: the crashed / non-crashed point sets and the virtual
//! comparisons that rank every crashed point below every non-crashed one.
//!
//! Points of a duel are processed in order `x_a`, then `x_b`:
//!
//! - a crashed point is compared against every point currently in the
//!   non-crashed set, losing each comparison, and then joins the crashed set;
//! - a non-crashed point is compared against every point currently in the
//!   crashed set, winning each comparison, and then joins the non-crashed set;
//! - when both points are non-crashed, the observed preference is appended last.

use serde::{Deserialize, Serialize};

use crate::dataset::{ComparisonDataset, Duel, Preference};
use crate::error::{check_dim, Error, Result};
use crate::Point;

/// Feedback on one duel: satisfaction of each point and, when both are
/// satisfied, the preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFeedback")]
pub struct DuelFeedback {
    x_a: Point,
    x_b: Point,
    s_a: bool,
    s_b: bool,
    pi: Option<Preference>,
}

#[derive(Deserialize)]
struct RawFeedback {
    x_a: Point,
    x_b: Point,
    s_a: bool,
    s_b: bool,
    pi: Option<Preference>,
}

impl TryFrom<RawFeedback> for DuelFeedback {
    type Error = Error;

    fn try_from(r: RawFeedback) -> Result<Self> {
        if r.pi.is_some() && !(r.s_a && r.s_b) {
            return Err(Error::input("a preference is only recorded when neither point crashed"));
        }
        DuelFeedback::new(r.x_a, r.x_b, r.s_a, r.s_b, r.pi)
    }
}

impl DuelFeedback {
    /// Builds feedback. A preference supplied alongside a crash is dropped;
    /// a missing preference when both points are satisfied is an error.
    pub fn new(x_a: Point, x_b: Point, s_a: bool, s_b: bool, pi: Option<Preference>) -> Result<Self> {
        check_dim(x_a.len(), x_b.len())?;
        if x_a == x_b {
            return Err(Error::input("a duel must compare two distinct points"));
        }
        let pi = if s_a && s_b {
            Some(pi.ok_or_else(|| Error::input("a preference is required when neither point crashed"))?)
        } else {
            None
        };
        Ok(DuelFeedback { x_a, x_b, s_a, s_b, pi })
    }

    /// Both satisfied, `x_a` preferred or not.
    pub fn preference(x_a: Point, x_b: Point, pi: Preference) -> Result<Self> {
        Self::new(x_a, x_b, true, true, Some(pi))
    }

    pub fn x_a(&self) -> &[f64] {
        &self.x_a
    }

    pub fn x_b(&self) -> &[f64] {
        &self.x_b
    }

    pub fn s_a(&self) -> bool {
        self.s_a
    }

    pub fn s_b(&self) -> bool {
        self.s_b
    }

    pub fn pi(&self) -> Option<Preference> {
        self.pi
    }

    pub fn crash_count(&self) -> usize {
        usize::from(!self.s_a) + usize::from(!self.s_b)
    }

    fn entries(&self) -> [(&Point, bool); 2] {
        [(&self.x_a, self.s_a), (&self.x_b, self.s_b)]
    }
}

/// Ordered sets of non-crashed (`feasible`) and crashed points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeedbackLedger {
    feasible: Vec<Point>,
    crashed: Vec<Point>,
}

impl FeedbackLedger {
    pub fn feasible(&self) -> &[Point] {
        &self.feasible
    }

    pub fn crashed(&self) -> &[Point] {
        &self.crashed
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.feasible.iter().any(|p| p.as_slice() == x)
    }

    pub fn is_crashed(&self, x: &[f64]) -> bool {
        self.crashed.iter().any(|p| p.as_slice() == x)
    }

    fn check_consistent(&self, fb: &DuelFeedback) -> Result<()> {
        for (x, s) in fb.entries() {
            let contradicted = if s { self.is_crashed(x) } else { self.is_feasible(x) };
            if contradicted {
                let (was, now) = if s { ("crashed", "non-crashed") } else { ("non-crashed", "crashed") };
                return Err(Error::Consistency(format!(
                    "point {x:?} was reported {was} earlier and is now reported {now}"
                )));
            }
        }
        Ok(())
    }

    fn check_dim(&self, fb: &DuelFeedback) -> Result<()> {
        if let Some(p) = self.feasible.first().or(self.crashed.first()) {
            check_dim(p.len(), fb.x_a.len())?;
        }
        Ok(())
    }

    fn insert(set: &mut Vec<Point>, x: &[f64]) {
        if !set.iter().any(|p| p.as_slice() == x) {
            set.push(x.to_vec());
        }
    }

    /// Validated, atomic version of the augmentation: on error the ledger is untouched.
    fn apply_checked(&mut self, fb: &DuelFeedback, require_feasible: bool) -> Result<Vec<Duel>> {
        self.check_dim(fb)?;
        if require_feasible && self.feasible.is_empty() && !fb.s_a && !fb.s_b {
            return Err(Error::NoFeasiblePoint(
                "both points crashed and no non-crashed point is known yet".into(),
            ));
        }
        self.check_consistent(fb)?;

        let mut added = Vec::new();
        for (x, satisfied) in fb.entries() {
            if satisfied {
                for c in &self.crashed {
                    added.push(Duel::new(x.clone(), c.clone(), Preference::First));
                }
                Self::insert(&mut self.feasible, x);
            } else {
                for s in &self.feasible {
                    added.push(Duel::new(x.clone(), s.clone(), Preference::Second));
                }
                Self::insert(&mut self.crashed, x);
            }
        }
        if let Some(pi) = fb.pi {
            added.push(Duel::new(fb.x_a.clone(), fb.x_b.clone(), pi));
        }
        Ok(added)
    }

    /// Applies feedback in place, returning the comparisons to add to the dataset.
    pub fn apply(&mut self, fb: &DuelFeedback) -> Result<Vec<Duel>> {
        self.apply_checked(fb, true)
    }

    /// Functional form of [`Self::apply`]: the added comparisons and the updated ledger.
    pub fn augment(&self, fb: &DuelFeedback) -> Result<(Vec<Duel>, FeedbackLedger)> {
        let mut next = self.clone();
        let added = next.apply(fb)?;
        Ok((added, next))
    }

    /// Plain comparison handling with the crash mechanism disabled: sets are
    /// still tracked, but no virtual comparisons are generated and a crashed
    /// point simply loses the duel. Two crashed points add nothing.
    pub fn apply_without_virtuals(&mut self, fb: &DuelFeedback) -> Result<Vec<Duel>> {
        self.check_dim(fb)?;
        self.check_consistent(fb)?;
        for (x, satisfied) in fb.entries() {
            let set = if satisfied { &mut self.feasible } else { &mut self.crashed };
            Self::insert(set, x);
        }
        let pi = match (fb.s_a, fb.s_b) {
            (true, true) => fb.pi,
            (true, false) => Some(Preference::First),
            (false, true) => Some(Preference::Second),
            (false, false) => None,
        };
        Ok(pi.map(|pi| Duel::new(fb.x_a.clone(), fb.x_b.clone(), pi)).into_iter().collect())
    }

    /// Builds a ledger from initial feedback, processed in order. Only the
    /// whole initial set needs a non-crashed point, not each duel.
    pub fn initialize(initial: &[DuelFeedback]) -> Result<(Vec<Duel>, FeedbackLedger)> {
        if !initial.iter().any(|fb| fb.s_a || fb.s_b) {
            return Err(Error::NoFeasiblePoint("every initial point crashed".into()));
        }
        let mut ledger = FeedbackLedger::default();
        let mut added = Vec::new();
        for fb in initial {
            added.extend(ledger.apply_checked(fb, false)?);
        }
        Ok((added, ledger))
    }
}

/// Initializes a ledger from an initial comparison dataset and a satisfaction
/// flag per dataset point (aligned with `data.points()`).
pub fn initialize_ledger(
    data: &ComparisonDataset,
    satisfactions: &[bool],
) -> Result<(Vec<Duel>, FeedbackLedger)> {
    check_dim(data.points().len(), satisfactions.len())?;
    let feedback = data
        .duels()
        .iter()
        .map(|d| {
            DuelFeedback::new(
                data.points()[d.a].clone(),
                data.points()[d.b].clone(),
                satisfactions[d.a],
                satisfactions[d.b],
                Some(d.pi),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    FeedbackLedger::initialize(&feedback)
}
