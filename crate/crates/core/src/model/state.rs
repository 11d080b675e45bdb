use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};

use super::{DefaultedSpins, TopBoundary, UpdateRules};

/// Effective credit rating grade: 7 is the safest grade, 0 is default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct RatingGrade(u8);

impl RatingGrade {
    pub const DEFAULT: RatingGrade = RatingGrade(0);
    pub const MAX: RatingGrade = RatingGrade(7);

    pub fn new(value: u8) -> Result<Self> {
        if value <= Self::MAX.0 {
            Ok(RatingGrade(value))
        } else {
            Err(CascadeError::InvalidInput(format!("rating {value} outside [0, 7]")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_default(self) -> bool {
        self.0 == 0
    }

    pub fn is_top(self) -> bool {
        self == Self::MAX
    }
}

/// One-step rating change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum Spin {
    Down = -1,
    Flat = 0,
    Up = 1,
}

impl Spin {
    pub const ALL: [Spin; 3] = [Spin::Down, Spin::Flat, Spin::Up];

    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn from_value(value: i8) -> Result<Self> {
        match value {
            -1 => Ok(Spin::Down),
            0 => Ok(Spin::Flat),
            1 => Ok(Spin::Up),
            other => Err(CascadeError::InvalidInput(format!("spin {other} outside {{-1, 0, 1}}"))),
        }
    }
}

/// Ratings, last rating changes and the global panic latch of one economy.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyState {
    ratings: Vec<RatingGrade>,
    spins: Vec<Spin>,
    panic_latched: bool,
    rescues_used: usize,
    defaults: usize,
}

impl EconomyState {
    /// A state with the given ratings and spins, panic off and no rescues.
    pub fn new(ratings: Vec<RatingGrade>, spins: Vec<Spin>) -> Result<Self> {
        if ratings.len() != spins.len() {
            return Err(CascadeError::InvalidInput(format!(
                "{} ratings but {} spins",
                ratings.len(),
                spins.len()
            )));
        }
        if ratings.is_empty() {
            return Err(CascadeError::InvalidInput("economy has no firms".into()));
        }
        let defaults = ratings.iter().filter(|r| r.is_default()).count();
        Ok(EconomyState {
            ratings,
            spins,
            panic_latched: false,
            rescues_used: 0,
            defaults,
        })
    }

    /// Convenience constructor from raw grades and spin values.
    pub fn from_values(ratings: &[u8], spins: &[i8]) -> Result<Self> {
        let ratings = ratings.iter().map(|&r| RatingGrade::new(r)).collect::<Result<_>>()?;
        let spins = spins.iter().map(|&s| Spin::from_value(s)).collect::<Result<_>>()?;
        Self::new(ratings, spins)
    }

    pub fn with_panic(mut self, latched: bool) -> Self {
        self.panic_latched = latched;
        self
    }

    pub fn n(&self) -> usize {
        self.ratings.len()
    }

    pub fn ratings(&self) -> &[RatingGrade] {
        &self.ratings
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn panic_latched(&self) -> bool {
        self.panic_latched
    }

    pub fn rescues_used(&self) -> usize {
        self.rescues_used
    }

    /// Number of firms currently at rating 0.
    pub fn defaults(&self) -> usize {
        self.defaults
    }

    /// Number of firms per grade, indexed by grade value.
    pub fn grade_counts(&self) -> [usize; 8] {
        let mut counts = [0; 8];
        for r in &self.ratings {
            counts[r.value() as usize] += 1;
        }
        counts
    }

    pub(crate) fn latch_panic(&mut self) {
        self.panic_latched = true;
    }

    /// Puts a just-defaulted firm back into a healthy state.
    pub(crate) fn rescue(&mut self, i: usize, rating: RatingGrade, spin: Spin) {
        debug_assert!(self.ratings[i].is_default() && !rating.is_default());
        self.ratings[i] = rating;
        self.spins[i] = spin;
        self.defaults -= 1;
        self.rescues_used += 1;
    }
}

/// True iff at least one firm sits at rating 0.
pub fn panic_field_active(ratings: &[RatingGrade]) -> bool {
    ratings.iter().any(|r| r.is_default())
}

/// Records the draw `s` for firm `i` and moves its rating accordingly.
///
/// The rating moves by `s` and is absorbed at 0. Under
/// [`TopBoundary::HoldRating`] a `+1` at the top grade leaves the rating in
/// place; under [`TopBoundary::RestrictSpin`] it is a contract violation.
/// Under [`DefaultedSpins::Frozen`] a firm that lands on 0 gets spin 0 and
/// only `s = 0` may be applied to it afterwards; under
/// [`DefaultedSpins::Active`] it keeps whatever spin it draws.
pub fn apply_spin(i: usize, s: Spin, state: &mut EconomyState, rules: UpdateRules) -> Result<()> {
    let current = *state
        .ratings
        .get(i)
        .ok_or_else(|| CascadeError::ContractViolation(format!("firm index {i} out of range")))?;
    if current.is_default() {
        match rules.defaulted {
            DefaultedSpins::Active => state.spins[i] = s,
            DefaultedSpins::Frozen if s == Spin::Flat => state.spins[i] = Spin::Flat,
            DefaultedSpins::Frozen => {
                return Err(CascadeError::ContractViolation(format!(
                    "defaulted firm {i} is frozen at s = 0"
                )))
            }
        }
        return Ok(());
    }
    if current.is_top() && s == Spin::Up {
        return match rules.top {
            TopBoundary::HoldRating => {
                state.spins[i] = Spin::Up;
                Ok(())
            }
            TopBoundary::RestrictSpin => Err(CascadeError::ContractViolation(format!(
                "firm {i} is at the top grade and cannot move up"
            ))),
        };
    }
    let next = RatingGrade((current.value() as i8 + s.value()) as u8);
    state.ratings[i] = next;
    state.spins[i] = s;
    if next.is_default() {
        state.defaults += 1;
        if rules.defaulted == DefaultedSpins::Frozen {
            state.spins[i] = Spin::Flat;
        }
    }
    Ok(())
}
