use crate::error::{Error, Result};

/// Reset date `T_0` and fixed-leg payment dates `T_1 < … < T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSchedule {
    t0: f64,
    dates: Vec<f64>,
}

impl SwapSchedule {
    pub fn new(t0: f64, dates: Vec<f64>) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::InvalidDates("swap without payment dates".into()));
        }
        let mut prev = t0;
        for &d in &dates {
            if !(d > prev) || !d.is_finite() {
                return Err(Error::InvalidDates(format!(
                    "payment dates must increase strictly from the reset date {t0}, got {d} after {prev}"
                )));
            }
            prev = d;
        }
        Ok(SwapSchedule { t0, dates })
    }

    /// Regular schedule starting at `t0` with `tenor` years of payments every
    /// `period` years.
    pub fn regular(t0: f64, tenor: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && tenor > 0.0) {
            return Err(Error::InvalidDates("tenor and period must be positive".into()));
        }
        let n = (tenor / period).round().max(1.0) as usize;
        let dates = (1..=n).map(|k| t0 + tenor * k as f64 / n as f64).collect();
        SwapSchedule::new(t0, dates)
    }

    pub fn reset(&self) -> f64 {
        self.t0
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().unwrap()
    }

    /// Accrual fractions `δ_k = T_k − T_{k−1}`.
    pub fn accruals(&self) -> Vec<f64> {
        let mut prev = self.t0;
        self.dates
            .iter()
            .map(|&d| {
                let a = d - prev;
                prev = d;
                a
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_semiannual() {
        let s = SwapSchedule::regular(0.25, 10.0, 0.5).unwrap();
        assert_eq!(s.dates().len(), 20);
        assert!((s.maturity() - 10.25).abs() < 1e-14);
        assert!(s.accruals().iter().all(|a| (a - 0.5).abs() < 1e-12));
    }

    #[test]
    fn rejects_unordered_dates() {
        assert!(SwapSchedule::new(1.0, vec![2.0, 1.5]).is_err());
        assert!(SwapSchedule::new(1.0, vec![1.0]).is_err());
    }
}
