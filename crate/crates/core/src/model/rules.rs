use serde::{Deserialize, Serialize};

/// What happens when a firm at the top grade draws `s = +1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopBoundary {
    /// The spin is drawn from all three states; a `+1` is recorded as the
    /// firm's spin but its rating stays at the top grade.
    #[default]
    HoldRating,
    /// The draw is restricted to `{-1, 0}` with renormalized weights.
    RestrictSpin,
}

/// How defaulted firms take part in the spin dynamics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultedSpins {
    /// Defaulted firms keep resampling their spin; only the rating is absorbed.
    #[default]
    Active,
    /// A defaulted firm's spin is set to 0 and never updated again.
    Frozen,
}

/// Boundary treatment of the single-firm update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpdateRules {
    #[serde(default)]
    pub top: TopBoundary,
    #[serde(default)]
    pub defaulted: DefaultedSpins,
}

impl UpdateRules {
    /// Rating changes restricted at the top grade; defaulted firms frozen at `s = 0`.
    pub const RESTRICTED: UpdateRules = UpdateRules {
        top: TopBoundary::RestrictSpin,
        defaulted: DefaultedSpins::Frozen,
    };
}

impl std::str::FromStr for TopBoundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hold_rating" => Ok(TopBoundary::HoldRating),
            "restrict_spin" => Ok(TopBoundary::RestrictSpin),
            other => Err(format!("unknown top boundary `{other}` (hold_rating | restrict_spin)")),
        }
    }
}

impl std::str::FromStr for DefaultedSpins {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "active" => Ok(DefaultedSpins::Active),
            "frozen" => Ok(DefaultedSpins::Frozen),
            other => Err(format!("unknown defaulted-spin rule `{other}` (active | frozen)")),
        }
    }
}

impl TopBoundary {
    pub fn name(self) -> &'static str {
        match self {
            TopBoundary::HoldRating => "hold_rating",
            TopBoundary::RestrictSpin => "restrict_spin",
        }
    }
}

impl DefaultedSpins {
    pub fn name(self) -> &'static str {
        match self {
            DefaultedSpins::Active => "active",
            DefaultedSpins::Frozen => "frozen",
        }
    }
}
