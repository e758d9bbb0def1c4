//! Sets of allowed digits, finite or lazily enumerated in norm order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gaussian::{LatticePoint, NormOrderedLattice};
use crate::ifs::MobiusBranch;

type Predicate = Arc<dyn Fn(LatticePoint) -> bool + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// Sorted in norm order, duplicate-free.
    Finite(Vec<LatticePoint>),
    /// All lattice points with `min ≤ |i|² ≤ max`.
    Norms { min: u64, max: Option<u64> },
    /// Points with `|i|² ≥ min` accepted by the predicate; assumed infinite.
    Predicate { min: u64, pred: Predicate },
}

/// A subset `S ⊂ ℤ[i]` with membership test and norm-ordered iteration
/// (ties by `(re, im)`).
#[derive(Clone)]
pub struct DigitSet {
    kind: Kind,
    label: String,
}

impl DigitSet {
    pub fn finite(points: impl IntoIterator<Item = LatticePoint>) -> Self {
        let mut v: Vec<_> = points.into_iter().collect();
        v.sort_by(LatticePoint::norm_order);
        v.dedup();
        let label = v.iter().map(|p| format!("{},{}", p.re, p.im)).collect::<Vec<_>>().join(";");
        DigitSet {
            kind: Kind::Finite(v),
            label,
        }
    }

    pub fn from_branches(branches: &[MobiusBranch]) -> Self {
        DigitSet::finite(branches.iter().map(MobiusBranch::lattice))
    }

    /// `D₂ = {|i|² ≥ 8}`.
    pub fn d2() -> Self {
        DigitSet::norm_at_least(8)
    }

    /// All of `ℤ[i]`, optionally without 0.
    pub fn all_lattice(include_zero: bool) -> Self {
        let mut s = DigitSet::norm_at_least(u64::from(!include_zero));
        s.label = if include_zero { "all" } else { "nonzero" }.into();
        s
    }

    pub fn norm_at_least(min_norm_sq: u64) -> Self {
        DigitSet {
            kind: Kind::Norms {
                min: min_norm_sq,
                max: None,
            },
            label: if min_norm_sq == 8 {
                "d2".into()
            } else {
                format!("norm>={min_norm_sq}")
            },
        }
    }

    /// `{lo ≤ |i|² ≤ hi}`, finite.
    pub fn annulus(lo: u64, hi: u64) -> Self {
        DigitSet {
            kind: Kind::Norms {
                min: lo,
                max: Some(hi),
            },
            label: format!("annulus:{lo}:{hi}"),
        }
    }

    /// An infinite set given by a membership predicate on `{|i|² ≥ min_norm_sq}`.
    pub fn from_predicate(
        label: impl Into<String>,
        min_norm_sq: u64,
        pred: impl Fn(LatticePoint) -> bool + Send + Sync + 'static,
    ) -> Self {
        DigitSet {
            kind: Kind::Predicate {
                min: min_norm_sq,
                pred: Arc::new(pred),
            },
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            Kind::Finite(_) => true,
            Kind::Norms { max, .. } => max.is_some(),
            Kind::Predicate { .. } => false,
        }
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        match &self.kind {
            Kind::Finite(v) => v.binary_search_by(|q| q.norm_order(&p)).is_ok(),
            Kind::Norms { min, max } => {
                let n = p.norm_sq();
                n >= *min && max.is_none_or(|m| n <= m)
            }
            Kind::Predicate { min, pred } => p.norm_sq() >= *min && pred(p),
        }
    }

    /// If every lattice point with `|i|² ≥ n₀` belongs to the set, the least such `n₀`
    /// (used for two-sided integral tail bounds).
    pub fn full_tail_from(&self) -> Option<u64> {
        match &self.kind {
            Kind::Norms { min, max: None } => Some(*min),
            _ => None,
        }
    }

    /// Members in norm order, starting at the smallest norm `≥ min_norm_sq`.
    pub fn iter_from(&self, min_norm_sq: u64) -> Box<dyn Iterator<Item = LatticePoint> + '_> {
        match &self.kind {
            Kind::Finite(v) => Box::new(v.iter().copied().filter(move |p| p.norm_sq() >= min_norm_sq)),
            Kind::Norms { min, max } => {
                let it = NormOrderedLattice::starting_at(min_norm_sq.max(*min));
                match max {
                    Some(m) => {
                        let m = *m;
                        Box::new(it.take_while(move |p| p.norm_sq() <= m))
                    }
                    None => Box::new(it),
                }
            }
            Kind::Predicate { min, pred } => Box::new(
                NormOrderedLattice::starting_at(min_norm_sq.max(*min)).filter(move |p| pred(*p)),
            ),
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = LatticePoint> + '_> {
        self.iter_from(0)
    }

    pub fn min_norm_sq(&self) -> Option<u64> {
        self.iter().next().map(|p| p.norm_sq())
    }

    /// All members, for finite sets.
    pub fn members(&self) -> Result<Vec<LatticePoint>> {
        if !self.is_finite() {
            return Err(Error::InvalidArgument(format!("digit set {} is infinite", self.label)));
        }
        Ok(self.iter().collect())
    }

    /// The members as IFS branches; every member must lie in `D₂`.
    pub fn to_alphabet(&self) -> Result<Vec<MobiusBranch>> {
        let v = self
            .members()?
            .into_iter()
            .map(MobiusBranch::try_from)
            .collect::<Result<Vec<_>>>()?;
        if v.is_empty() {
            return Err(Error::InvalidArgument("alphabet is empty".into()));
        }
        Ok(v)
    }
}

impl fmt::Debug for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitSet({})", self.label)
    }
}

fn parse_pairs(s: &str) -> Result<Vec<LatticePoint>> {
    let t = s.trim();
    if t.starts_with('[') {
        let v: Vec<[i64; 2]> =
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("alphabet JSON: {e}")))?;
        return Ok(v.into_iter().map(LatticePoint::from).collect());
    }
    t.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected 're,im' in {p:?}")))?;
            let re = a.trim().parse().map_err(|_| Error::Parse(format!("bad integer {a:?}")))?;
            let im = b.trim().parse().map_err(|_| Error::Parse(format!("bad integer {b:?}")))?;
            Ok(LatticePoint::new(re, im))
        })
        .collect()
}

/// Accepted forms: `d2`, `all`, `nonzero`, `norm>=N`, `annulus:LO:HI` (squared
/// norms, inclusive), a JSON list `[[2,2],[-2,-2]]`, or `2,2;-2,-2`.
impl FromStr for DigitSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let num = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad norm bound {v:?}")))
        };
        match t {
            "d2" | "D2" => Ok(DigitSet::d2()),
            "all" => Ok(DigitSet::all_lattice(true)),
            "nonzero" => Ok(DigitSet::all_lattice(false)),
            _ if t.starts_with("norm>=") => Ok(DigitSet::norm_at_least(num(&t[6..])?)),
            _ if t.starts_with("annulus:") => {
                let (lo, hi) = t[8..]
                    .split_once(':')
                    .ok_or_else(|| Error::Parse("annulus needs LO:HI".into()))?;
                Ok(DigitSet::annulus(num(lo)?, num(hi)?))
            }
            _ => {
                let pts = parse_pairs(t)?;
                if pts.is_empty() {
                    return Err(Error::Parse(format!("empty digit set {s:?}")));
                }
                Ok(DigitSet::finite(pts))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2_starts_at_norm_8_in_order() {
        let d2 = DigitSet::d2();
        let first: Vec<_> = d2.iter().take(4).collect();
        assert!(first.iter().all(|p| p.norm_sq() == 8));
        assert_eq!(first[0], LatticePoint::new(-2, -2));
        assert_eq!(d2.min_norm_sq(), Some(8));
        assert!(!d2.is_finite());
        assert!(d2.contains(LatticePoint::new(3, 0)));
        assert!(!d2.contains(LatticePoint::new(2, 1)));
    }

    #[test]
    fn parse_forms() {
        let a: DigitSet = "2,2;-2,-2".parse().unwrap();
        assert_eq!(a.members().unwrap().len(), 2);
        let b: DigitSet = "[[2,2],[-2,-2],[2,2]]".parse().unwrap();
        assert_eq!(b.members().unwrap(), a.members().unwrap());
        let c: DigitSet = "annulus:8:10".parse().unwrap();
        assert_eq!(c.to_alphabet().unwrap().len(), 16);
        assert!("norm>=x".parse::<DigitSet>().is_err());
        assert!("1,1".parse::<DigitSet>().unwrap().to_alphabet().is_err());
    }

    #[test]
    fn predicate_sets_filter() {
        let even = DigitSet::from_predicate("even", 8, |p| p.re % 2 == 0);
        assert!(even.iter().take(50).all(|p| p.re % 2 == 0 && p.norm_sq() >= 8));
        assert!(!even.is_finite());
    }
}
