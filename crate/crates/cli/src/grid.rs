//! Parameter grids: `key=value` pairs separated by commas, where a value is a number,
//! `start:stop:*factor`, `start:stop:+step`, or a `;`-separated list of numbers.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, ensure, Context, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    axes: BTreeMap<String, Vec<f64>>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self> {
        let mut axes = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("grid entry `{part}` is not key=value"))?;
            let key = key.trim().to_string();
            let values = parse_axis(value.trim()).with_context(|| format!("grid axis `{key}`"))?;
            if axes.insert(key.clone(), values).is_some() {
                bail!("grid axis `{key}` given twice");
            }
        }
        Ok(Self { axes })
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.axes.get(key).map(Vec::as_slice)
    }

    pub fn require(&self, key: &str) -> Result<&[f64]> {
        self.get(key).ok_or_else(|| anyhow!("grid needs an axis `{key}`"))
    }

    /// Fails on axes outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.axes.keys() {
            ensure!(
                allowed.contains(&key.as_str()),
                "unexpected grid axis `{key}` (expected one of {})",
                allowed.join(", ")
            );
        }
        Ok(())
    }
}

fn number(text: &str) -> Result<f64> {
    let v: f64 = text.parse().with_context(|| format!("`{text}` is not a number"))?;
    ensure!(v.is_finite(), "`{text}` is not finite");
    Ok(v)
}

fn parse_axis(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(';').map(|v| number(v.trim())).collect(),
        [start, stop, step] => {
            let (start, stop) = (number(start)?, number(stop)?);
            ensure!(start <= stop, "range start {start} exceeds stop {stop}");
            let slack = 1e-9 * stop.abs().max(1.0);
            let mut values = Vec::new();
            if let Some(factor) = step.strip_prefix('*') {
                let factor = number(factor)?;
                ensure!(factor > 1.0 && start > 0.0, "geometric ranges need start > 0 and factor > 1");
                let mut v = start;
                while v <= stop + slack {
                    values.push(v);
                    v *= factor;
                }
            } else if let Some(step) = step.strip_prefix('+') {
                let step = number(step)?;
                ensure!(step > 0.0, "arithmetic ranges need a positive step");
                let mut k = 0.0;
                while start + k * step <= stop + slack {
                    values.push(start + k * step);
                    k += 1.0;
                }
            } else {
                bail!("range step `{step}` must start with `*` or `+`");
            }
            Ok(values)
        }
        _ => bail!("`{text}` is neither a number list nor start:stop:step"),
    }
}
