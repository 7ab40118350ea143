use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::data::RegistrationEvent;
use crate::error::{Error, Result};

/// Inclusive range of calendar months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityWindow {
    pub first: Month,
    pub last: Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Month {
    pub year: i32,
    pub month: u32,
}

impl Month {
    pub fn of(date: NaiveDate) -> Self {
        Month { year: date.year(), month: date.month() }
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
            .map(Month::of)
            .map_err(|_| Error::InvalidConfig(format!("expected YYYY-MM, got {s:?}")))
    }
}

impl ActivityWindow {
    pub fn new(first: Month, last: Month) -> Result<Self> {
        if last < first {
            return Err(Error::InvalidConfig(format!("activity window ends ({last}) before it starts ({first})")));
        }
        Ok(ActivityWindow { first, last })
    }

    /// Smallest window covering every registration, or `None` without events.
    pub fn spanning(events: &[RegistrationEvent]) -> Option<Self> {
        let months = events.iter().map(|e| Month::of(e.registration_date));
        let first = months.clone().min()?;
        let last = months.max()?;
        Some(ActivityWindow { first, last })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        (self.first..=self.last).contains(&Month::of(date))
    }
}

/// Workers with at least one registration inside `window`; the whole history
/// when `window` is `None`.
pub fn active_workers(events: &[RegistrationEvent], window: Option<&ActivityWindow>) -> BTreeSet<String> {
    events
        .iter()
        .filter(|e| window.is_none_or(|w| w.contains(e.registration_date)))
        .map(|e| e.worker_id.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivitySummary {
    pub window: Option<ActivityWindow>,
    pub total_workers: usize,
    pub active_workers: usize,
    /// Active workers per month, keyed `YYYY-MM`.
    pub monthly: BTreeMap<String, usize>,
}

impl ActivitySummary {
    pub fn compute(events: &[RegistrationEvent], total_workers: usize, window: Option<&ActivityWindow>) -> Self {
        let mut monthly: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
        for e in events.iter().filter(|e| window.is_none_or(|w| w.contains(e.registration_date))) {
            monthly.entry(Month::of(e.registration_date).to_string()).or_default().insert(&e.worker_id);
        }
        ActivitySummary {
            window: window.copied().or_else(|| ActivityWindow::spanning(events)),
            total_workers,
            active_workers: active_workers(events, window).len(),
            monthly: monthly.into_iter().map(|(k, v)| (k, v.len())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::fixtures::f1;

    #[test]
    fn month_parsing() {
        assert_eq!("2014-03".parse::<Month>().unwrap(), Month { year: 2014, month: 3 });
        assert!("2014-13".parse::<Month>().is_err());
        assert!("March".parse::<Month>().is_err());
    }

    #[test]
    fn window_filters_by_month() {
        let d = f1();
        let all = active_workers(&d.events, None);
        assert_eq!(all.len(), 4);
        let march = ActivityWindow::new("2014-03".parse().unwrap(), "2014-03".parse().unwrap()).unwrap();
        assert_eq!(active_workers(&d.events, Some(&march)), all);
        let april = ActivityWindow::new("2014-04".parse().unwrap(), "2014-06".parse().unwrap()).unwrap();
        assert!(active_workers(&d.events, Some(&april)).is_empty());
        assert!(ActivityWindow::new(april.last, april.first).is_err());
    }

    #[test]
    fn summary_counts() {
        let d = f1();
        let s = ActivitySummary::compute(&d.events, 4, None);
        assert_eq!(s.active_workers, 4);
        assert_eq!(s.monthly.get("2014-03"), Some(&4));
        assert_eq!(s.window.unwrap().first, Month { year: 2014, month: 3 });
    }
}
