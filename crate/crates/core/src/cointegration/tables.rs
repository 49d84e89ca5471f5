//! Embedded critical values for the trace and Saikkonen–Lütkepohl tests.
//!
//! Rows are indexed by `K − r = 1..=10`; each entry is `(5%, 1%)`.

use super::{CointegrationError, Deterministic};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPair {
    pub five: f64,
    pub one: f64,
}

impl CriticalPair {
    const fn new(five: f64, one: f64) -> Self {
        Self { five, one }
    }

    pub fn at(&self, level: SignificanceLevel) -> f64 {
        match level {
            SignificanceLevel::Five => self.five,
            SignificanceLevel::One => self.one,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceLevel {
    Five,
    One,
}

/// Unrestricted constant. K−r = 2..5 are the finite-sample values used for
/// the five-variable unemployment system; the remaining rows are the
/// asymptotic MacKinnon–Haug–Michelis quantiles.
const TRACE_UNRESTRICTED: [CriticalPair; 10] = [
    CriticalPair::new(3.8415, 6.6349),
    CriticalPair::new(15.41, 19.62),
    CriticalPair::new(29.80, 35.21),
    CriticalPair::new(47.71, 54.23),
    CriticalPair::new(69.61, 77.29),
    CriticalPair::new(95.7542, 104.9637),
    CriticalPair::new(125.6185, 135.9825),
    CriticalPair::new(159.5290, 171.0905),
    CriticalPair::new(197.3772, 210.0366),
    CriticalPair::new(239.2468, 253.2526),
];

/// Constant restricted to the cointegration space (Osterwald-Lenum).
const TRACE_RESTRICTED: [CriticalPair; 10] = [
    CriticalPair::new(9.24, 12.97),
    CriticalPair::new(19.96, 24.60),
    CriticalPair::new(34.91, 41.07),
    CriticalPair::new(53.12, 60.16),
    CriticalPair::new(76.07, 84.45),
    CriticalPair::new(102.14, 111.01),
    CriticalPair::new(131.70, 143.09),
    CriticalPair::new(165.58, 177.20),
    CriticalPair::new(202.92, 215.74),
    CriticalPair::new(244.15, 257.68),
];

/// No deterministic terms (MacKinnon–Haug–Michelis).
const TRACE_NONE: [CriticalPair; 10] = [
    CriticalPair::new(4.1296, 6.9406),
    CriticalPair::new(12.3212, 16.3640),
    CriticalPair::new(24.2761, 29.5147),
    CriticalPair::new(40.1749, 46.5716),
    CriticalPair::new(60.0627, 67.6367),
    CriticalPair::new(83.9383, 92.7136),
    CriticalPair::new(111.7797, 121.7375),
    CriticalPair::new(143.6691, 154.7977),
    CriticalPair::new(179.5199, 191.8122),
    CriticalPair::new(219.4051, 232.8291),
];

/// Saikkonen–Lütkepohl test with an intercept. K−r = 2..5 are finite-sample
/// values for the five-variable system; other rows use the asymptotic
/// intercept-only distribution, which coincides with the trace test without
/// deterministic terms.
const SL_INTERCEPT: [CriticalPair; 10] = [
    CriticalPair::new(4.1296, 6.9406),
    CriticalPair::new(9.84, 13.48),
    CriticalPair::new(20.96, 25.71),
    CriticalPair::new(35.76, 41.58),
    CriticalPair::new(54.59, 61.53),
    CriticalPair::new(83.9383, 92.7136),
    CriticalPair::new(111.7797, 121.7375),
    CriticalPair::new(143.6691, 154.7977),
    CriticalPair::new(179.5199, 191.8122),
    CriticalPair::new(219.4051, 232.8291),
];

fn lookup(table: &[CriticalPair; 10], k_minus_r: usize) -> Result<CriticalPair, CointegrationError> {
    if !(1..=10).contains(&k_minus_r) {
        return Err(CointegrationError::OutOfTable { k_minus_r });
    }
    Ok(table[k_minus_r - 1])
}

/// Trace-test critical values for `K − r` common trends.
pub fn trace_critical_values(
    k_minus_r: usize,
    deterministic: Deterministic,
) -> Result<CriticalPair, CointegrationError> {
    let table = match deterministic {
        Deterministic::UnrestrictedConstant => &TRACE_UNRESTRICTED,
        Deterministic::RestrictedConstant => &TRACE_RESTRICTED,
        Deterministic::None => &TRACE_NONE,
    };
    lookup(table, k_minus_r)
}

pub fn sl_critical_values(k_minus_r: usize) -> Result<CriticalPair, CointegrationError> {
    lookup(&SL_INTERCEPT, k_minus_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_increase_in_k_minus_r() {
        for det in [
            Deterministic::UnrestrictedConstant,
            Deterministic::RestrictedConstant,
            Deterministic::None,
        ] {
            let mut prev = CriticalPair::new(0.0, 0.0);
            for k in 1..=10 {
                let cv = trace_critical_values(k, det).unwrap();
                assert!(cv.five < cv.one);
                assert!(cv.five > prev.five && cv.one > prev.one);
                prev = cv;
            }
        }
        let mut prev = 0.0;
        for k in 1..=10 {
            let cv = sl_critical_values(k).unwrap();
            assert!(cv.five < cv.one && cv.five > prev);
            prev = cv.five;
        }
    }

    #[test]
    fn out_of_table() {
        assert!(matches!(
            trace_critical_values(0, Deterministic::UnrestrictedConstant),
            Err(CointegrationError::OutOfTable { k_minus_r: 0 })
        ));
        assert!(sl_critical_values(11).is_err());
    }
}
