use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Five-level rating band, lowest to highest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Belt {
    Gray,
    Green,
    Blue,
    Yellow,
    Red,
}

impl Belt {
    pub const ALL: [Belt; 5] = [Belt::Gray, Belt::Green, Belt::Blue, Belt::Yellow, Belt::Red];
    /// Belts reported in per-belt tables; Red is too rare to aggregate.
    pub const REPORTED: [Belt; 4] = [Belt::Gray, Belt::Green, Belt::Blue, Belt::Yellow];

    /// Half-open rating interval `[lo, hi)`. Red is unbounded above.
    pub fn rating_range(self) -> (f64, f64) {
        match self {
            Belt::Gray => (0.0, 900.0),
            Belt::Green => (900.0, 1200.0),
            Belt::Blue => (1200.0, 1500.0),
            Belt::Yellow => (1500.0, 2200.0),
            Belt::Red => (2200.0, f64::INFINITY),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Belt::Gray => "Gray",
            Belt::Green => "Green",
            Belt::Blue => "Blue",
            Belt::Yellow => "Yellow",
            Belt::Red => "Red",
        }
    }
}

impl fmt::Display for Belt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Map a rating onto its belt. Boundary ratings belong to the upper belt.
pub fn assign_belt(rating: f64) -> Result<Belt> {
    if rating.is_nan() || rating < 0.0 {
        return Err(Error::NegativeRating(rating));
    }
    Ok(match rating {
        r if r < 900.0 => Belt::Gray,
        r if r < 1200.0 => Belt::Green,
        r if r < 1500.0 => Belt::Blue,
        r if r < 2200.0 => Belt::Yellow,
        _ => Belt::Red,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(assign_belt(1250.0).unwrap(), Belt::Blue);
        assert_eq!(assign_belt(0.0).unwrap(), Belt::Gray);
    }

    #[test]
    fn boundaries_go_up() {
        assert_eq!(assign_belt(900.0).unwrap(), Belt::Green);
        assert_eq!(assign_belt(1200.0).unwrap(), Belt::Blue);
        assert_eq!(assign_belt(1500.0).unwrap(), Belt::Yellow);
        assert_eq!(assign_belt(2200.0).unwrap(), Belt::Red);
        assert_eq!(assign_belt(899.999).unwrap(), Belt::Gray);
    }

    #[test]
    fn negative_is_error() {
        assert!(matches!(assign_belt(-1.0), Err(Error::NegativeRating(_))));
    }

    #[test]
    fn total_order() {
        assert!(Belt::Gray < Belt::Green && Belt::Green < Belt::Blue);
        assert!(Belt::Blue < Belt::Yellow && Belt::Yellow < Belt::Red);
    }

    #[test]
    fn ranges_agree_with_assignment() {
        for b in Belt::ALL {
            let (lo, _) = b.rating_range();
            assert_eq!(assign_belt(lo).unwrap(), b);
        }
    }
}
