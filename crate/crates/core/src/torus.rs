//! The discrete torus `T(m x n) = Z_m x Z_n`, its projections and the
//! determinant tests used to reason about collinearity.

use std::collections::BTreeSet;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{gcd, lcm, mod_floor};
use crate::error::{Error, Result};

/// Dimensions of a torus, with its gcd and lcm cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusDims {
    m: u64,
    n: u64,
    g: u64,
    l: u64,
}

impl TorusDims {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidDims { m, n });
        }
        Ok(TorusDims {
            m,
            n,
            g: gcd(m, n),
            l: lcm(m, n),
        })
    }

    /// Number of columns (range of the x coordinate).
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Number of rows (range of the y coordinate).
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn gcd(&self) -> u64 {
        self.g
    }

    pub fn lcm(&self) -> u64 {
        self.l
    }

    pub fn cells(&self) -> u64 {
        self.m * self.n
    }

    /// The square torus `T(g x g)` that `project_rho` maps onto.
    pub fn gcd_torus(&self) -> Result<TorusDims> {
        TorusDims::new(self.g, self.g).map_err(|_| {
            Error::Precondition(format!(
                "gcd({}, {}) = 1, so there is no T(g x g) to project onto",
                self.m, self.n
            ))
        })
    }

    /// Same torus with the roles of x and y exchanged.
    pub fn transposed(&self) -> TorusDims {
        TorusDims {
            m: self.n,
            n: self.m,
            g: self.g,
            l: self.l,
        }
    }

    pub fn point(&self, x: u64, y: u64) -> Result<TorusPoint> {
        if x >= self.m || y >= self.n {
            return Err(Error::PointOutOfRange {
                x,
                y,
                m: self.m,
                n: self.n,
            });
        }
        Ok(TorusPoint { x, y })
    }

    pub fn contains(&self, p: TorusPoint) -> bool {
        p.x < self.m && p.y < self.n
    }

    /// Row-major index with x as the major key, so index order is
    /// lexicographic order on `(x, y)`.
    pub fn index_of(&self, p: TorusPoint) -> usize {
        (p.x * self.n + p.y) as usize
    }

    pub fn point_at(&self, idx: usize) -> TorusPoint {
        let idx = idx as u64;
        TorusPoint {
            x: idx / self.n,
            y: idx % self.n,
        }
    }

    /// All cells in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        (0..self.m).flat_map(move |x| (0..self.n).map(move |y| TorusPoint { x, y }))
    }

    pub fn add(&self, a: TorusPoint, b: TorusPoint) -> TorusPoint {
        TorusPoint {
            x: (a.x + b.x) % self.m,
            y: (a.y + b.y) % self.n,
        }
    }

    pub fn sub(&self, a: TorusPoint, b: TorusPoint) -> TorusPoint {
        TorusPoint {
            x: (a.x + self.m - b.x) % self.m,
            y: (a.y + self.n - b.y) % self.n,
        }
    }

    /// `k * (u, v)` reduced componentwise.
    pub fn scale(&self, k: u64, u: u64, v: u64) -> TorusPoint {
        TorusPoint {
            x: ((k as u128 * u as u128) % self.m as u128) as u64,
            y: ((k as u128 * v as u128) % self.n as u128) as u64,
        }
    }
}

impl fmt::Display for TorusDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({}x{})", self.m, self.n)
    }
}

/// A residue pair; validity is relative to some [`TorusDims`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    pub x: u64,
    pub y: u64,
}

impl TorusPoint {
    pub fn to_plane(self) -> PlanePoint {
        PlanePoint {
            x: self.x as i64,
            y: self.y as i64,
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

/// A point of the integer plane `Z x Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: i64,
    pub y: i64,
}

impl PlanePoint {
    pub fn new(x: i64, y: i64) -> Self {
        PlanePoint { x, y }
    }
}

/// `π(m,n)`: reduce a plane point to the torus.
pub fn project_pi(dims: TorusDims, p: PlanePoint) -> TorusPoint {
    TorusPoint {
        x: mod_floor(p.x, dims.m),
        y: mod_floor(p.y, dims.n),
    }
}

/// `ρ`: reduce a torus point onto `T(g x g)`. Fails when `g = 1`.
pub fn project_rho(dims: TorusDims, p: TorusPoint) -> Result<TorusPoint> {
    let small = dims.gcd_torus()?;
    Ok(TorusPoint {
        x: p.x % small.m,
        y: p.y % small.n,
    })
}

/// The determinant with rows `(1,1,1)`, the x-coordinates and the
/// y-coordinates, or `None` if it does not fit in an `i128`.
pub fn checked_det3(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> Option<i128> {
    // expand as (b - a) x (c - a)
    let bx = (b.x as i128).checked_sub(a.x as i128)?;
    let by = (b.y as i128).checked_sub(a.y as i128)?;
    let cx = (c.x as i128).checked_sub(a.x as i128)?;
    let cy = (c.y as i128).checked_sub(a.y as i128)?;
    bx.checked_mul(cy)?.checked_sub(by.checked_mul(cx)?)
}

/// Collinearity determinant of three plane points; zero iff they are
/// collinear in `Z x Z`.
///
/// Panics if the value overflows `i128`, which needs coordinates
/// beyond `2^62` in magnitude.
pub fn det3(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> i128 {
    checked_det3(a, b, c).expect("collinearity determinant overflows i128")
}

/// `D(a,b,c) ≡ 0 (mod g)`. A necessary condition for collinearity on
/// the torus, never a sufficient one.
pub fn det_mod_test(dims: TorusDims, a: TorusPoint, b: TorusPoint, c: TorusPoint) -> bool {
    det3(a.to_plane(), b.to_plane(), c.to_plane()).rem_euclid(dims.g as i128) == 0
}

/// Index `d` of the diagonal line `L_d` containing `a`: `(x - y) mod g`.
pub fn diagonal_index(dims: TorusDims, a: TorusPoint) -> u64 {
    (a.x as i128 - a.y as i128).rem_euclid(dims.g as i128) as u64
}

/// A finite set of distinct points on a torus, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    dims: TorusDims,
    points: Vec<TorusPoint>,
}

impl Configuration {
    pub fn new(dims: TorusDims, points: impl IntoIterator<Item = TorusPoint>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in points {
            if !dims.contains(p) {
                return Err(Error::PointOutOfRange {
                    x: p.x,
                    y: p.y,
                    m: dims.m,
                    n: dims.n,
                });
            }
            if !set.insert(p) {
                return Err(Error::DuplicatePoint { x: p.x, y: p.y });
            }
        }
        Ok(Configuration {
            dims,
            points: set.into_iter().collect(),
        })
    }

    pub fn from_pairs(dims: TorusDims, pairs: &[(u64, u64)]) -> Result<Self> {
        Configuration::new(dims, pairs.iter().map(|&(x, y)| TorusPoint { x, y }))
    }

    pub fn empty(dims: TorusDims) -> Self {
        Configuration {
            dims,
            points: Vec::new(),
        }
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: TorusPoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Re-reads the same residue pairs on a larger torus.
    pub fn embed(&self, dims: TorusDims) -> Result<Configuration> {
        Configuration::new(dims, self.points.iter().copied())
    }

    /// Exchanges the coordinates of every point.
    pub fn transposed(&self) -> Configuration {
        let dims = self.dims.transposed();
        let mut points: Vec<_> = self
            .points
            .iter()
            .map(|p| TorusPoint { x: p.y, y: p.x })
            .collect();
        points.sort();
        Configuration { dims, points }
    }

    /// One row per y value (top row is `y = 0`), `#` for members.
    pub fn ascii_grid(&self) -> String {
        let mut out = String::new();
        for y in 0..self.dims.n {
            for x in 0..self.dims.m {
                let p = TorusPoint { x, y };
                out.push(if self.contains(p) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Configuration", 3)?;
        st.serialize_field("m", &self.dims.m)?;
        st.serialize_field("n", &self.dims.n)?;
        st.serialize_field("points", &self.points)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims(m: u64, n: u64) -> TorusDims {
        TorusDims::new(m, n).unwrap()
    }

    fn pp(x: i64, y: i64) -> PlanePoint {
        PlanePoint::new(x, y)
    }

    fn tp(x: u64, y: u64) -> TorusPoint {
        TorusPoint { x, y }
    }

    #[test]
    fn dims_validation() {
        assert!(TorusDims::new(1, 5).is_err());
        assert!(TorusDims::new(5, 1).is_err());
        let d = dims(4, 6);
        assert_eq!((d.gcd(), d.lcm()), (2, 12));
        assert_eq!(d.gcd() * d.lcm(), d.m() * d.n());
    }

    #[test]
    fn pi_examples() {
        assert_eq!(project_pi(dims(4, 6), pp(5, -1)), tp(1, 5));
        assert_eq!(project_pi(dims(4, 6), pp(0, 0)), tp(0, 0));
        assert_eq!(project_pi(dims(3, 9), pp(-3, 12)), tp(0, 3));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(project_rho(dims(3, 6), tp(1, 4)).unwrap(), tp(1, 1));
        assert_eq!(project_rho(dims(4, 6), tp(3, 5)).unwrap(), tp(1, 1));
        assert_eq!(project_rho(dims(5, 10), tp(0, 7)).unwrap(), tp(0, 2));
        assert!(matches!(
            project_rho(dims(2, 3), tp(1, 1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rho_after_pi_is_pi_onto_gcd_torus() {
        for (m, n) in [(3, 6), (4, 6), (5, 10), (6, 9), (12, 8)] {
            let d = dims(m, n);
            let small = d.gcd_torus().unwrap();
            let l = d.lcm() as i64;
            for x in -2 * l..=2 * l {
                for y in -2 * l..=2 * l {
                    let p = pp(x, y);
                    assert_eq!(
                        project_rho(d, project_pi(d, p)).unwrap(),
                        project_pi(small, p)
                    );
                }
            }
        }
    }

    #[test]
    fn det3_examples() {
        assert_eq!(det3(pp(0, 0), pp(1, 1), pp(2, 2)), 0);
        assert_eq!(det3(pp(0, 0), pp(1, 0), pp(0, 1)), 1);
        // parabola points (i, 3 i^2): D = 3 (1)(2)(1)
        assert_eq!(det3(pp(0, 0), pp(1, 3), pp(2, 12)), 6);
    }

    #[test]
    fn det3_overflow_is_detected() {
        let big = pp(i64::MAX, i64::MIN);
        assert_eq!(
            checked_det3(pp(0, 0), big, pp(i64::MIN, i64::MAX)),
            Some(-(u64::MAX as i128))
        );
        assert!(checked_det3(
            pp(i64::MIN, i64::MIN),
            pp(i64::MAX, i64::MIN),
            pp(i64::MIN, i64::MAX)
        )
        .is_none());
    }

    #[test]
    fn det_mod_examples() {
        let d = dims(4, 6);
        assert!(det_mod_test(d, tp(0, 0), tp(1, 1), tp(2, 4)));
        assert!(!det_mod_test(d, tp(0, 0), tp(0, 1), tp(1, 0)));
        let d = dims(3, 9);
        for p in d.points() {
            assert!(det_mod_test(d, p, p, p));
        }
    }

    #[test]
    fn diagonal_index_examples() {
        assert_eq!(diagonal_index(dims(4, 6), tp(3, 1)), 0);
        assert_eq!(diagonal_index(dims(7, 5), tp(0, 0)), 0);
        assert_eq!(diagonal_index(dims(3, 6), tp(1, 2)), 2);
    }

    #[test]
    fn configuration_rejects_bad_points() {
        let d = dims(3, 3);
        assert!(matches!(
            Configuration::from_pairs(d, &[(0, 0), (0, 0)]),
            Err(Error::DuplicatePoint { .. })
        ));
        assert!(matches!(
            Configuration::from_pairs(d, &[(3, 0)]),
            Err(Error::PointOutOfRange { .. })
        ));
        let c = Configuration::from_pairs(d, &[(2, 1), (0, 2), (0, 1)]).unwrap();
        assert_eq!(c.points(), &[tp(0, 1), tp(0, 2), tp(2, 1)]);
        assert_eq!(c.ascii_grid(), "...\n#.#\n#..\n");
    }

    proptest! {
        #[test]
        fn det3_antisymmetric_and_translation_invariant(
            ax in -1000i64..1000, ay in -1000i64..1000,
            bx in -1000i64..1000, by in -1000i64..1000,
            cx in -1000i64..1000, cy in -1000i64..1000,
            tx in -100_000i64..100_000, ty in -100_000i64..100_000,
        ) {
            let (a, b, c) = (pp(ax, ay), pp(bx, by), pp(cx, cy));
            let d = det3(a, b, c);
            prop_assert_eq!(det3(b, a, c), -d);
            prop_assert_eq!(det3(a, c, b), -d);
            prop_assert_eq!(det3(c, b, a), -d);
            let t = |p: PlanePoint| pp(p.x + tx, p.y + ty);
            prop_assert_eq!(det3(t(a), t(b), t(c)), d);
        }

        #[test]
        fn det3_matches_cofactor_expansion(
            ax in -1000i64..1000, ay in -1000i64..1000,
            bx in -1000i64..1000, by in -1000i64..1000,
            cx in -1000i64..1000, cy in -1000i64..1000,
        ) {
            // first row of ones, expanded along it
            let expected = (bx * cy - cx * by) - (ax * cy - cx * ay) + (ax * by - bx * ay);
            prop_assert_eq!(det3(pp(ax, ay), pp(bx, by), pp(cx, cy)), expected as i128);
        }
    }
}
