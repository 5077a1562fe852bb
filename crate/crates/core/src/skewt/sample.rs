use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A non-empty sample of finite observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = crate::Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.values
    }
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("sample is empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("sample contains a non-finite value ({bad})")));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation with the `n - 1` divisor (0 for `n = 1`).
    pub fn sd(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|x| (x - m).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Linear-interpolation quantile (type 7).
    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.sorted(), p)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn iqr(&self) -> f64 {
        let s = self.sorted();
        quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
    }

    /// Moment skewness `m₃ / m₂^{3/2}`; zero for constant data.
    pub fn skewness(&self) -> f64 {
        let m = self.mean();
        let n = self.len() as f64;
        let m2 = self.values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3 = self.values.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        if m2 > 0.0 {
            m3 / m2.powf(1.5)
        } else {
            0.0
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|&x| f(x)).collect())
    }
}

pub(crate) fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let h = (s.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    if i + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[i] + (h - i as f64) * (s[i + 1] - s[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries() {
        let s = Sample::new(vec![3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(s.median(), 2.5);
        assert_eq!(s.iqr(), 1.5);
        assert!((s.sd() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.skewness(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(serde_json::from_str::<Sample>("[]").is_err());
        let s: Sample = serde_json::from_str("[1.5, 2]").unwrap();
        assert_eq!(s.len(), 2);
    }
}
