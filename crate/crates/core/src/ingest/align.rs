use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

/// Inclusive year bounds, written `FIRST:LAST` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub first: i32,
    pub last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Result<Self> {
        if first > last {
            return Err(Error::Validation(format!(
                "year range {first}:{last} is empty"
            )));
        }
        Ok(YearRange { first, last })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn overlaps(&self, other: &YearRange) -> bool {
        self.first <= other.last && other.first <= self.last
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.first, self.last)
    }
}

impl FromStr for YearRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("expected FIRST:LAST, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i32>()
                .map_err(|_| Error::Validation(format!("invalid year `{v}` in `{s}`")))
        };
        YearRange::new(parse(a)?, parse(b)?)
    }
}

/// Killer and victim values observed in the same years.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub years: Vec<i32>,
    pub killer: Vec<f64>,
    pub victim: Vec<f64>,
    /// Killer years with no usable victim counterpart.
    pub dropped_killer: usize,
    /// Victim years with no usable killer counterpart.
    pub dropped_victim: usize,
}

impl AlignedPair {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }
}

/// Inner join on year, restricted to `bounds` when given.
pub fn align_pair(
    killer: &TimeSeries,
    victim: &TimeSeries,
    bounds: Option<YearRange>,
) -> Result<AlignedPair> {
    let (kp, vp) = (killer.points(), victim.points());
    let (mut i, mut j) = (0, 0);
    let mut out = AlignedPair {
        years: Vec::new(),
        killer: Vec::new(),
        victim: Vec::new(),
        dropped_killer: 0,
        dropped_victim: 0,
    };
    while i < kp.len() && j < vp.len() {
        let (ky, vy) = (kp[i].year, vp[j].year);
        if ky < vy {
            i += 1;
        } else if vy < ky {
            j += 1;
        } else {
            if bounds.is_none_or(|b| b.contains(ky)) {
                out.years.push(ky);
                out.killer.push(kp[i].value);
                out.victim.push(vp[j].value);
            }
            i += 1;
            j += 1;
        }
    }
    out.dropped_killer = kp.len() - out.len();
    out.dropped_victim = vp.len() - out.len();
    if out.is_empty() {
        let scope = bounds.map(|b| format!(" within {b}")).unwrap_or_default();
        return Err(Error::Validation(format!(
            "`{}` and `{}` share no years{scope}",
            killer.name(),
            victim.name()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat(name: &str, years: std::ops::RangeInclusive<i32>) -> TimeSeries {
        TimeSeries::from_pairs(name, years.map(|y| (y, y as f64))).unwrap()
    }

    #[test]
    fn full_overlap() {
        let pair = align_pair(&flat("k", 1955..=1971), &flat("v", 1955..=1971), None).unwrap();
        assert_eq!(pair.len(), 17);
        assert_eq!(pair.dropped_killer, 0);
        assert_eq!(pair.dropped_victim, 0);
    }

    #[test]
    fn disjoint_is_error() {
        assert!(align_pair(&flat("k", 1900..=1910), &flat("v", 1950..=1960), None).is_err());
    }

    #[test]
    fn bounded_overlap() {
        let bounds = Some(YearRange::new(2004, 2018).unwrap());
        let pair = align_pair(&flat("k", 2004..=2018), &flat("v", 1983..=2018), bounds).unwrap();
        assert_eq!(pair.len(), 15);
        assert_eq!(pair.years.first(), Some(&2004));
        assert_eq!(pair.dropped_victim, 21);
    }

    #[test]
    fn year_range_parsing() {
        assert_eq!(
            "1920:1960".parse::<YearRange>().unwrap(),
            YearRange {
                first: 1920,
                last: 1960
            }
        );
        assert!("1960:1920".parse::<YearRange>().is_err());
        assert!("1960".parse::<YearRange>().is_err());
        assert!("a:b".parse::<YearRange>().is_err());
    }

    fn arb_years() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::btree_set(1900i32..1960, 0..40).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn output_is_subset(ky in arb_years(), vy in arb_years(), lo in 1900i32..1960, span in 0i32..60) {
            let k = TimeSeries::from_pairs("k", ky.iter().map(|&y| (y, 1.0))).unwrap();
            let v = TimeSeries::from_pairs("v", vy.iter().map(|&y| (y, 2.0))).unwrap();
            let bounds = YearRange::new(lo, lo + span).unwrap();
            match align_pair(&k, &v, Some(bounds)) {
                Ok(pair) => {
                    prop_assert!(pair.len() <= k.len().min(v.len()));
                    prop_assert!(pair.years.windows(2).all(|w| w[0] < w[1]));
                    for y in &pair.years {
                        prop_assert!(ky.contains(y) && vy.contains(y) && bounds.contains(*y));
                    }
                    prop_assert_eq!(pair.dropped_killer, k.len() - pair.len());
                }
                Err(_) => {
                    prop_assert!(!ky.iter().any(|y| vy.contains(y) && bounds.contains(*y)));
                }
            }
        }
    }
}
