//! Grid arguments: `start:stop:step` (inclusive), a comma list, or one value.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [start, stop, step] => {
                let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
                if !(h > 0.0) {
                    return Err(format!("grid step must be positive, got {h}"));
                }
                if b < a {
                    return Err(format!("grid stop {b} is below start {a}"));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                if n > 1_000_000 {
                    return Err(format!("grid has {} points; limit is 1000000", n + 1));
                }
                (0..=n).map(|i| a + i as f64 * h).collect()
            }
            [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            _ => return Err(format!("expected `start:stop:step` or a comma list, got `{s}`")),
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(Grid(values))
    }
}

/// `lo:hi` interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
        let lo: f64 = a.trim().parse().map_err(|_| format!("`{a}` is not a number"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("`{b}` is not a number"))?;
        Ok(Range(lo, hi))
    }
}
