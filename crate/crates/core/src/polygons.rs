//! Polygons given by ascending multisets of exact rational slopes.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    slopes: Vec<Q>,
}

impl Polygon {
    pub fn from_slopes(mut values: Vec<Q>) -> Polygon {
        values.sort();
        Polygon { slopes: values }
    }

    pub fn from_ints(values: &[i64]) -> Polygon {
        Polygon::from_slopes(values.iter().map(|&v| qi(v)).collect())
    }

    pub fn empty() -> Polygon {
        Polygon { slopes: Vec::new() }
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    pub fn width(&self) -> usize {
        self.slopes.len()
    }

    /// Sum of the k smallest slopes.
    pub fn ordinate(&self, k: usize) -> Q {
        self.slopes[..k].iter().fold(Q::zero(), |a, s| a + s)
    }

    pub fn endpoint(&self) -> (usize, Q) {
        (self.width(), self.ordinate(self.width()))
    }

    /// Points (k, s_1 + … + s_k) for k = 0..=d.
    pub fn vertices(&self) -> Vec<(usize, Q)> {
        (0..=self.width()).map(|k| (k, self.ordinate(k))).collect()
    }

    /// Break points only (where the slope changes), endpoints included.
    pub fn corners(&self) -> Vec<(usize, Q)> {
        let v = self.vertices();
        v.iter()
            .enumerate()
            .filter(|(k, _)| {
                *k == 0 || *k == self.width() || self.slopes[*k - 1] != self.slopes[*k]
            })
            .map(|(_, x)| x.clone())
            .collect()
    }

    fn check_width(&self, other: &Polygon) -> Result<()> {
        if self.width() != other.width() {
            return Err(Error::WidthMismatch(self.width(), other.width()));
        }
        Ok(())
    }

    /// True iff `self` is on or above `other` at every abscissa.
    pub fn lies_above(&self, other: &Polygon) -> Result<bool> {
        self.check_width(other)?;
        Ok((1..=self.width()).all(|k| self.ordinate(k) >= other.ordinate(k)))
    }

    /// True iff `self` is strictly above `other` at abscissa k.
    pub fn strictly_above_at(&self, other: &Polygon, k: usize) -> Result<bool> {
        self.check_width(other)?;
        Ok(self.ordinate(k) > other.ordinate(k))
    }

    pub fn same_endpoint(&self, other: &Polygon) -> Result<bool> {
        self.check_width(other)?;
        Ok(self.ordinate(self.width()) == other.ordinate(other.width()))
    }

    /// Polygon of the concatenated slope multisets.
    pub fn merge(&self, other: &Polygon) -> Polygon {
        let mut s = self.slopes.clone();
        s.extend(other.slopes.iter().cloned());
        Polygon::from_slopes(s)
    }

    /// Slopes multiplied by a constant (e.g. passing between i_k and i_k/e).
    pub fn scaled(&self, factor: &Q) -> Polygon {
        Polygon::from_slopes(self.slopes.iter().map(|s| s * factor).collect())
    }
}

impl fmt::Display for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.slopes.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

/// Newton polygon of `Σ a_i X^i` from the valuations `v_i` (`None` for a
/// zero coefficient). Slopes are the valuations of the roots, ascending.
pub fn newton_polygon(valuations: &[Option<Q>]) -> Result<Polygon> {
    let pts: Vec<(i64, Q)> = valuations
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.clone().map(|v| (i as i64, v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::Invalid("all coefficients vanish".into()));
    }
    let d = valuations.len() as i64 - 1;
    if pts.last().unwrap().0 != d {
        return Err(Error::Invalid("leading coefficient vanishes".into()));
    }
    if pts[0].0 != 0 {
        return Err(Error::Unsupported("zero root (infinite slope)".into()));
    }
    let hull = lower_hull(&pts);
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (i, vi) = &w[0];
        let (j, vj) = &w[1];
        let s = (vi - vj) / qi(j - i);
        for _ in 0..(j - i) {
            slopes.push(s.clone());
        }
    }
    Ok(Polygon::from_slopes(slopes))
}

fn cross(o: &(i64, Q), a: &(i64, Q), b: &(i64, Q)) -> Q {
    qi(a.0 - o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * qi(b.0 - o.0)
}

/// Lower convex hull of points sorted by abscissa.
fn lower_hull(pts: &[(i64, Q)]) -> Vec<(i64, Q)> {
    let mut hull: Vec<(i64, Q)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= Q::zero() {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

/// Ordinate of `merge(a, b)` at k by the min formula over split points.
pub fn merge_min_formula(a: &Polygon, b: &Polygon, k: usize) -> Q {
    let lo = k.saturating_sub(b.width());
    let hi = k.min(a.width());
    (lo..=hi)
        .map(|m| a.ordinate(m) + b.ordinate(k - m))
        .min()
        .expect("k within the merged width")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction() {
        let p = Polygon::from_ints(&[2, 0]);
        assert_eq!(p.vertices(), vec![(0, qi(0)), (1, qi(0)), (2, qi(2))]);
        let h = Polygon::from_slopes(vec![q(3, 2), q(1, 2)]);
        assert_eq!(h.vertices(), vec![(0, qi(0)), (1, q(1, 2)), (2, qi(2))]);
        assert_eq!(Polygon::empty().endpoint(), (0, qi(0)));
    }

    #[test]
    fn newton_examples() {
        for n in 1..4 {
            let vals = vec![Some(qi(2 * n)), Some(qi(1)), Some(qi(0))];
            assert_eq!(newton_polygon(&vals).unwrap(), Polygon::from_ints(&[1, 2 * n - 1]));
        }
        assert_eq!(
            newton_polygon(&[Some(qi(3)), Some(qi(0))]).unwrap(),
            Polygon::from_ints(&[3])
        );
        assert!(newton_polygon(&[None, None]).is_err());
    }

    #[test]
    fn comparisons() {
        let inertia = Polygon::from_slopes(vec![q(1, 2), q(3, 2)]);
        let hodge = Polygon::from_ints(&[0, 2]);
        assert!(inertia.lies_above(&hodge).unwrap());
        assert!(inertia.same_endpoint(&hodge).unwrap());
        assert!(!hodge.lies_above(&Polygon::from_ints(&[1, 1])).unwrap());
        assert!(!hodge.same_endpoint(&Polygon::from_ints(&[1, 2])).unwrap());
        assert!(Polygon::empty().same_endpoint(&Polygon::empty()).unwrap());
        assert!(hodge.lies_above(&Polygon::from_ints(&[1])).is_err());
    }

    #[test]
    fn merge_examples() {
        let m = Polygon::from_ints(&[0, 2]).merge(&Polygon::from_ints(&[1]));
        assert_eq!(m, Polygon::from_ints(&[0, 1, 2]));
        let p = Polygon::from_ints(&[3, 1]);
        assert_eq!(Polygon::empty().merge(&p), p);
    }

    /// Pointwise minimum over all segments between input points, a direct
    /// description of the lower convex hull at integer abscissae.
    fn brute_hull_ordinate(pts: &[(i64, Q)], x: i64) -> Q {
        let mut best: Option<Q> = None;
        for a in pts {
            for b in pts {
                if a.0 <= x && x <= b.0 && a.0 < b.0 {
                    let y = &a.1 + (&b.1 - &a.1) * qi(x - a.0) / qi(b.0 - a.0);
                    best = Some(best.map_or(y.clone(), |c: Q| c.min(y)));
                }
                if a.0 == x {
                    best = Some(best.map_or(a.1.clone(), |c: Q| c.min(a.1.clone())));
                }
            }
        }
        best.unwrap()
    }

    fn slopes_strategy(n: usize) -> impl Strategy<Value = Vec<Q>> {
        prop::collection::vec((-6i64..6, 1i64..4), n).prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
    }

    /// Moves the extreme slopes towards each other by `t/8` of their gap,
    /// which raises the polygon and keeps its endpoint.
    fn pull_extremes(a: &Polygon, t: i64) -> Polygon {
        let mut s = a.slopes().to_vec();
        let n = s.len();
        let delta = (&s[n - 1] - &s[0]) * q(t, 8);
        s[0] = &s[0] + &delta;
        s[n - 1] = &s[n - 1] - &delta;
        Polygon::from_slopes(s)
    }

    proptest! {
        #[test]
        fn newton_matches_brute_hull(vals in prop::collection::vec(0i64..8, 2..6)) {
            let qs: Vec<Option<Q>> = vals.iter().map(|&v| Some(qi(v))).collect();
            let np = newton_polygon(&qs).unwrap();
            let d = vals.len() as i64 - 1;
            let pts: Vec<(i64, Q)> = vals.iter().enumerate().map(|(i, &v)| (i as i64, qi(v))).collect();
            // The polygon read from degree d downwards: ordinate at k is hull(d − k) − hull(d).
            for k in 0..=d {
                let expect = brute_hull_ordinate(&pts, d - k) - brute_hull_ordinate(&pts, d);
                prop_assert_eq!(np.ordinate(k as usize), expect);
            }
        }

        #[test]
        fn newton_of_split_polynomial(roots in prop::collection::vec(0i64..5, 1..5)) {
            // Coefficient valuations of Π (X − p^{a_i}) are generic elementary
            // symmetric minima; the polygon must return the a_i.
            let d = roots.len();
            let mut sorted = roots.clone();
            sorted.sort();
            let vals: Vec<Option<Q>> = (0..=d)
                .map(|i| Some(qi(sorted[..d - i].iter().sum::<i64>())))
                .collect();
            let np = newton_polygon(&vals).unwrap();
            for k in 0..=d {
                let expect: i64 = sorted[..k].iter().sum();
                prop_assert_eq!(np.ordinate(k), qi(expect));
            }
        }

        #[test]
        fn lies_above_is_a_partial_order(a in slopes_strategy(3), b in slopes_strategy(3), c in slopes_strategy(3)) {
            let (a, b, c) = (Polygon::from_slopes(a), Polygon::from_slopes(b), Polygon::from_slopes(c));
            prop_assert!(a.lies_above(&a).unwrap());
            if a.lies_above(&b).unwrap() && b.lies_above(&a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if a.lies_above(&b).unwrap() && b.lies_above(&c).unwrap() {
                prop_assert!(a.lies_above(&c).unwrap());
            }
        }

        #[test]
        fn merge_realizes_min_formula(a in slopes_strategy(3), b in slopes_strategy(2)) {
            let (a, b) = (Polygon::from_slopes(a), Polygon::from_slopes(b));
            let m = a.merge(&b);
            for k in 0..=m.width() {
                prop_assert_eq!(m.ordinate(k), merge_min_formula(&a, &b, k));
            }
        }

        #[test]
        fn merge_is_monotone(a in slopes_strategy(3), b in slopes_strategy(2), ta in 0i64..=4, tb in 0i64..=4) {
            let (a, b) = (Polygon::from_slopes(a), Polygon::from_slopes(b));
            let a2 = pull_extremes(&a, ta);
            let b2 = pull_extremes(&b, tb);
            prop_assert!(a2.lies_above(&a).unwrap() && a2.same_endpoint(&a).unwrap());
            let (m, m2) = (a.merge(&b), a2.merge(&b2));
            prop_assert!(m2.lies_above(&m).unwrap());
            prop_assert!(m2.same_endpoint(&m).unwrap());
        }
    }
}
