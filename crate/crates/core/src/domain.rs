//! Axis-aligned boxes with rational endpoints, grids over them, and
//! reproducible sampling.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Vars, Q};

/// `Π [lo_i, hi_i]` over named variables, in the order of those variables.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    names: Vec<String>,
    lo: Vec<Q>,
    hi: Vec<Q>,
}

/// Reads `3`, `-1/4` or `0.25` as an exact rational.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("`{text}` is not a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let whole = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f = Q::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        let w = Q::from_integer(whole);
        return Ok(if negative { w - f } else { w + f });
    }
    BigInt::from_str(t).map(Q::from_integer).map_err(|_| bad())
}

/// Nearest double, rounding the exact value once.
pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl DomainBox {
    pub fn new(names: Vec<String>, lo: Vec<Q>, hi: Vec<Q>) -> Result<Self> {
        if names.len() != lo.len() || lo.len() != hi.len() {
            return Err(Error::dim("box needs one interval per variable"));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if a > b {
                return Err(Error::Invalid(format!("empty interval for {}", names[i])));
            }
        }
        Ok(DomainBox { names, lo, hi })
    }

    /// Parses `x1:1:2,x2:0:1` and orders the intervals like `vars`; every
    /// variable must be covered exactly once.
    pub fn parse(text: &str, vars: &Vars) -> Result<Self> {
        let mut found: Vec<Option<(Q, Q)>> = vec![None; vars.len()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err(Error::Invalid(format!("box entry `{part}` is not name:lo:hi")));
            }
            let name = fields[0].trim();
            let i = vars
                .index_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if found[i].is_some() {
                return Err(Error::Invalid(format!("{name} appears twice in the box")));
            }
            found[i] = Some((parse_rational(fields[1])?, parse_rational(fields[2])?));
        }
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (i, f) in found.into_iter().enumerate() {
            let (a, b) = f.ok_or_else(|| Error::Invalid(format!("box misses {}", vars.names()[i])))?;
            lo.push(a);
            hi.push(b);
        }
        DomainBox::new(vars.names().to_vec(), lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lo(&self) -> &[Q] {
        &self.lo
    }

    pub fn hi(&self) -> &[Q] {
        &self.hi
    }

    /// Point at fractions `t_i ∈ [0,1]` along each axis.
    pub fn at(&self, t: &[Q]) -> Vec<Q> {
        (0..self.dim())
            .map(|i| &self.lo[i] + (&self.hi[i] - &self.lo[i]) * &t[i])
            .collect()
    }

    /// Tensor grid with `points` points per axis, endpoints included.
    pub fn grid(&self, points: usize) -> Vec<Vec<Q>> {
        let steps: Vec<Q> = if points <= 1 {
            vec![Q::new(1.into(), 2.into())]
        } else {
            (0..points)
                .map(|i| Q::new(BigInt::from(i), BigInt::from(points - 1)))
                .collect()
        };
        self.tensor(&steps)
    }

    /// Cell-centre grid with `points` points per axis (interior only).
    pub fn centres(&self, points: usize) -> Vec<Vec<Q>> {
        let points = points.max(1);
        let steps: Vec<Q> = (0..points)
            .map(|i| Q::new(BigInt::from(2 * i + 1), BigInt::from(2 * points)))
            .collect();
        self.tensor(&steps)
    }

    fn tensor(&self, steps: &[Q]) -> Vec<Vec<Q>> {
        let mut out: Vec<Vec<Q>> = vec![Vec::new()];
        for _ in 0..self.dim() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    steps.iter().map(move |s| {
                        let mut q = p.clone();
                        q.push(s.clone());
                        q
                    })
                })
                .collect();
        }
        out.iter().map(|t| self.at(t)).collect()
    }

    /// Draws `lo + (hi − lo)·k/2⁵³` per axis with `k` uniform in `[0, 2⁵³)`.
    pub fn sample(&self, rng: &mut impl RngCore) -> Vec<Q> {
        let denom: BigInt = BigInt::one() << 53usize;
        let t: Vec<Q> = (0..self.dim())
            .map(|_| Q::new(BigInt::from(rng.next_u64() >> 11), denom.clone()))
            .collect();
        self.at(&t)
    }

    /// Whether `p` lies in the box, allowing a slack of `rel` times each
    /// axis width.
    pub fn contains_f64(&self, p: &[f64], rel: f64) -> bool {
        p.iter().enumerate().all(|(i, &v)| {
            let a = q_to_f64(&self.lo[i]);
            let b = q_to_f64(&self.hi[i]);
            let slack = rel * (b - a).abs().max(1.0);
            v >= a - slack && v <= b + slack
        })
    }

    /// Restriction to the first `k` axes.
    pub fn leading(&self, k: usize) -> DomainBox {
        DomainBox {
            names: self.names[..k].to_vec(),
            lo: self.lo[..k].to_vec(),
            hi: self.hi[..k].to_vec(),
        }
    }

    pub fn to_spec(&self) -> BoxSpec {
        BoxSpec(
            self.names
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(n, (a, b))| (n.clone(), a.to_string(), b.to_string()))
                .collect(),
        )
    }
}

impl fmt::Display for DomainBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .names
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(n, (a, b))| format!("{n}:{a}:{b}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Serializable view of a box: `[name, lo, hi]` triples with exact endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxSpec(pub Vec<(String, String, String)>);

/// Stream `stream` of the ChaCha20 generator seeded with `seed`. Each sample
/// row draws from its own stream, so results do not depend on scheduling.
pub fn row_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `|a − b| ≤ max(rel·max(|a|,|b|), abs)`
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let d = (a - b).abs();
    d <= abs || d <= rel * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("0.25").unwrap(), Q::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), Q::new((-3).into(), 2.into()));
        assert_eq!(parse_rational("-1/4").unwrap(), Q::new((-1).into(), 4.into()));
        assert_eq!(parse_rational(" 7 ").unwrap(), Q::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn parses_boxes_in_variable_order() {
        let vars = Vars::new(["x1", "x2"]);
        let b = DomainBox::parse("x2:0:1, x1:1:2", &vars).unwrap();
        assert_eq!(b.lo()[0], Q::from_integer(1.into()));
        assert_eq!(b.to_string(), "x1:1:2,x2:0:1");
        assert!(DomainBox::parse("x1:1:2", &vars).is_err());
        assert!(DomainBox::parse("x1:2:1,x2:0:1", &vars).is_err());
        assert!(DomainBox::parse("x1:1:2,x2:0:1,x3:0:1", &vars).is_err());
    }

    #[test]
    fn grid_and_sampling() {
        let vars = Vars::new(["a", "b"]);
        let b = DomainBox::parse("a:0:1,b:1/4:2", &vars).unwrap();
        let g = b.grid(9);
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], vec![Q::zero(), Q::new(1.into(), 4.into())]);
        let mut r1 = row_rng(7, 3);
        let mut r2 = row_rng(7, 3);
        let p = b.sample(&mut r1);
        assert_eq!(p, b.sample(&mut r2));
        assert!(p[0] >= Q::zero() && p[0] < Q::one());
        assert_ne!(p, b.sample(&mut row_rng(7, 4)));
    }

    #[test]
    fn tolerance_comparison() {
        assert!(close(1.0, 1.0 + 1e-10, 1e-9, 1e-12));
        assert!(!close(1.0, 1.0 + 1e-8, 1e-9, 1e-12));
        assert!(close(0.0, 1e-13, 1e-9, 1e-12));
    }
}
