use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Coefficients a_1..a_N. Position `i` of the backing vectors holds a_{i+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    name: String,
    values: Vec<f64>,
    ints: Option<Vec<i64>>,
}

impl Sequence {
    pub fn from_reals(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sequence must have at least one term"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("a_{} is not finite", i + 1)));
        }
        Ok(Self {
            name: name.into(),
            values,
            ints: None,
        })
    }

    pub fn from_ints(name: impl Into<String>, ints: Vec<i64>) -> Result<Self> {
        if ints.is_empty() {
            return Err(invalid("sequence must have at least one term"));
        }
        let values = ints.iter().map(|&v| v as f64).collect();
        Ok(Self {
            name: name.into(),
            values,
            ints: Some(ints),
        })
    }

    /// Real coefficients that happen to be integers are promoted to the exact path.
    pub fn from_reals_detect(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let integral = values.iter().all(|v| v.fract() == 0.0 && v.abs() < 9.0e15);
        if integral && !values.is_empty() {
            Self::from_ints(name, values.iter().map(|&v| v as i64).collect())
        } else {
            Self::from_reals(name, values)
        }
    }

    pub fn zeros(name: impl Into<String>, n: usize) -> Result<Self> {
        Self::from_ints(name, vec![0; n])
    }

    /// Reads `n,a_n` rows. Missing indices are zero; a header line is allowed.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',').map(str::trim);
            let (Some(n), Some(v)) = (it.next(), it.next()) else {
                return Err(invalid(format!("line {}: expected `n,a_n`", lineno + 1)));
            };
            let Ok(n) = n.parse::<usize>() else {
                if lineno == 0 {
                    continue; // header
                }
                return Err(invalid(format!("line {}: bad index {n:?}", lineno + 1)));
            };
            let v: f64 = v
                .parse()
                .map_err(|_| invalid(format!("line {}: bad value {v:?}", lineno + 1)))?;
            if n == 0 {
                return Err(invalid(format!(
                    "line {}: index 0 is not allowed",
                    lineno + 1
                )));
            }
            pairs.push((n, v));
        }
        let len = pairs.iter().map(|&(n, _)| n).max().ok_or_else(|| {
            Error::InvalidParameter(format!("{} contains no terms", path.display()))
        })?;
        let mut values = vec![0.0; len];
        for (n, v) in pairs {
            values[n - 1] = v;
        }
        let name = format!("file:{}", path.display());
        Self::from_reals_detect(name, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_integer_valued(&self) -> bool {
        self.ints.is_some()
    }

    /// a_n for 1 ≤ n ≤ N.
    pub fn get(&self, n: usize) -> f64 {
        assert!(
            n >= 1 && n <= self.values.len(),
            "index {n} outside 1..={}",
            self.len()
        );
        self.values[n - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ints(&self) -> Option<&[i64]> {
        self.ints.as_deref()
    }

    /// `(n, a_n)` over the nonzero terms.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i + 1, v))
    }

    pub fn count_nonzero(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn sum_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Σ a_n b_n over the common range.
    pub fn dot(&self, other: &Sequence) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn map(&self, name: impl Into<String>, f: impl Fn(usize, f64) -> f64) -> Result<Sequence> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i + 1, v))
            .collect();
        Sequence::from_reals(name, values)
    }

    /// Same coefficients with the first `n` terms only.
    pub fn truncate(&self, n: usize) -> Result<Sequence> {
        let n = n.min(self.len());
        match &self.ints {
            Some(ints) => Sequence::from_ints(self.name.clone(), ints[..n].to_vec()),
            None => Sequence::from_reals(self.name.clone(), self.values[..n].to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_starts_at_one() {
        let s = Sequence::from_ints("t", vec![5, 0, 7]).unwrap();
        assert_eq!(s.get(1), 5.0);
        assert_eq!(s.get(3), 7.0);
        assert_eq!(s.nonzero().collect::<Vec<_>>(), vec![(1, 5.0), (3, 7.0)]);
        assert!(s.is_integer_valued());
    }

    #[test]
    #[should_panic]
    fn index_zero_panics() {
        let s = Sequence::from_ints("t", vec![1]).unwrap();
        s.get(0);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(Sequence::from_ints("t", vec![]).is_err());
        assert!(Sequence::from_reals("t", vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn detects_integer_values() {
        assert!(Sequence::from_reals_detect("t", vec![1.0, -2.0])
            .unwrap()
            .is_integer_valued());
        assert!(!Sequence::from_reals_detect("t", vec![1.5])
            .unwrap()
            .is_integer_valued());
    }

    #[test]
    fn csv_roundtrip() {
        let dir = std::env::temp_dir().join(format!("apvar-seq-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.csv");
        std::fs::write(&path, "n,a_n\n1,3\n4,-1\n").unwrap();
        let s = Sequence::from_csv(&path).unwrap();
        assert_eq!(s.values(), &[3.0, 0.0, 0.0, -1.0]);
        assert!(s.is_integer_valued());
        std::fs::write(&path, "1,0.5\n0,1\n").unwrap();
        assert!(Sequence::from_csv(&path).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
