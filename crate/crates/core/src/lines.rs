//! Lines on the torus.
//!
//! A line is the image under `π(m,n)` of an integer line
//! `{(a + Uk, b + Vk)}` with `gcd(U, V) = 1`. On the torus it is the coset
//! `base + <(u, v)>` of the cyclic subgroup generated by the residue
//! direction `(u, v) = (U mod m, V mod n)`. A residue pair is a usable
//! direction exactly when `gcd(u, v, gcd(m, n)) = 1`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{gcd, gcd_i64, is_prime, lcm};
use crate::bits;
use crate::error::{Error, Result};
use crate::torus::{project_pi, project_rho, PlanePoint, TorusDims, TorusPoint};

/// Default upper bound on `m * n` for full line enumeration.
pub const DEFAULT_MAX_CELLS: u64 = 4096;

/// A residue direction `(u, v)` admitting a coprime integer lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    u: u64,
    v: u64,
}

impl Direction {
    pub fn new(dims: TorusDims, u: u64, v: u64) -> Result<Self> {
        let invalid = |reason| Error::InvalidDirection {
            u,
            v,
            m: dims.m(),
            n: dims.n(),
            reason,
        };
        if u >= dims.m() || v >= dims.n() {
            return Err(invalid("components must be reduced residues"));
        }
        if u == 0 && v == 0 {
            return Err(invalid("the zero direction does not move"));
        }
        if gcd(gcd(u, v), dims.gcd()) != 1 {
            return Err(invalid("gcd(u, v, gcd(m, n)) must be 1"));
        }
        Ok(Direction { u, v })
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    /// Least `k > 0` with `k * (u, v) ≡ (0, 0)`.
    pub fn period(&self, dims: TorusDims) -> u64 {
        lcm(
            dims.m() / gcd(self.u, dims.m()),
            dims.n() / gcd(self.v, dims.n()),
        )
    }

    /// A coprime integer pair `(U, V)` with `U ≡ u (mod m)`, `V ≡ v (mod n)`.
    ///
    /// Takes the smallest non-negative `U` that admits a partner, then the
    /// smallest `V = v + jn` coprime to it.
    pub fn lift(&self, dims: TorusDims) -> Result<(i64, i64)> {
        let (m, n) = (dims.m() as i64, dims.n() as i64);
        let max_steps = 4 * dims.n() + 4;
        for i in 0..max_steps as i64 {
            let big_u = self.u as i64 + i * m;
            if big_u == 0 {
                continue;
            }
            // gcd(U, v + jn) is periodic in j with period dividing U
            for j in 0..=big_u {
                let big_v = self.v as i64 + j * n;
                if gcd_i64(big_u, big_v) == 1 {
                    return Ok((big_u, big_v));
                }
            }
        }
        Err(Error::SearchCapExceeded {
            what: "coprime direction lift",
            iterations: max_steps,
        })
    }
}

/// `true` iff `(u, v)` is a usable line direction on `dims`.
pub fn is_valid_direction(dims: TorusDims, u: u64, v: u64) -> bool {
    Direction::new(dims, u, v).is_ok()
}

/// All valid directions in lexicographic order.
pub fn directions(dims: TorusDims) -> impl Iterator<Item = Direction> {
    (0..dims.m())
        .flat_map(move |u| (0..dims.n()).filter_map(move |v| Direction::new(dims, u, v).ok()))
}

/// A line on the torus. Equality, ordering and hashing only look at the
/// torus and the point set; `base` and `dir` record one way to generate it.
#[derive(Debug, Clone)]
pub struct TorusLine {
    dims: TorusDims,
    base: TorusPoint,
    dir: Direction,
    period: u64,
    points: Vec<TorusPoint>,
}

impl TorusLine {
    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    pub fn base(&self) -> TorusPoint {
        self.base
    }

    pub fn dir(&self) -> Direction {
        self.dir
    }

    pub fn period(&self) -> u64 {
        self.period
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

    fn key(&self) -> (TorusDims, &[TorusPoint]) {
        (self.dims, &self.points)
    }
}

impl PartialEq for TorusLine {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for TorusLine {}

impl Hash for TorusLine {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for TorusLine {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusLine {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl Serialize for TorusLine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TorusLine", 4)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("dir", &[self.dir.u, self.dir.v])?;
        st.serialize_field("period", &self.period)?;
        st.serialize_field("points", &self.points)?;
        st.end()
    }
}

/// The line `{π(base + k(U, V))}` for the coprime lift `(U, V)` of `dir`.
pub fn line_through(dims: TorusDims, base: TorusPoint, dir: Direction) -> Result<TorusLine> {
    let dir = Direction::new(dims, dir.u, dir.v)?;
    if !dims.contains(base) {
        return Err(Error::PointOutOfRange {
            x: base.x,
            y: base.y,
            m: dims.m(),
            n: dims.n(),
        });
    }
    let (big_u, big_v) = dir.lift(dims)?;
    let period = dir.period(dims);
    let b = base.to_plane();
    let mut points: Vec<TorusPoint> = (0..period as i64)
        .map(|k| {
            project_pi(
                dims,
                PlanePoint::new(
                    b.x + (k * big_u) % (dims.m() as i64),
                    b.y + (k * big_v) % (dims.n() as i64),
                ),
            )
        })
        .collect();
    points.sort_unstable();
    points.dedup();
    debug_assert_eq!(points.len() as u64, period);
    Ok(TorusLine {
        dims,
        base,
        dir,
        period,
        points,
    })
}

/// `L_s = {π(k, k - s)}`, one of the `g` diagonal lines.
pub fn diagonal_line(dims: TorusDims, s: u64) -> Result<TorusLine> {
    if s >= dims.gcd() {
        return Err(Error::OutOfRange {
            what: "diagonal index",
            value: s,
            expected: format!("0..{}", dims.gcd()),
        });
    }
    let base = project_pi(dims, PlanePoint::new(0, -(s as i64)));
    line_through(dims, base, Direction::new(dims, 1, 1)?)
}

/// Checks that the `g` diagonal lines are pairwise disjoint and cover
/// the torus.
pub fn verify_diagonal_partition(dims: TorusDims) -> bool {
    let mut seen = vec![false; dims.cells() as usize];
    let mut covered = 0u64;
    for s in 0..dims.gcd() {
        let Ok(line) = diagonal_line(dims, s) else {
            return false;
        };
        for &p in line.points() {
            let i = dims.index_of(p);
            if seen[i] {
                return false;
            }
            seen[i] = true;
            covered += 1;
        }
    }
    covered == dims.cells()
}

fn check_cap(dims: TorusDims, cap: u64) -> Result<()> {
    if dims.cells() > cap {
        return Err(Error::CapExceeded {
            cells: dims.cells(),
            cap,
        });
    }
    Ok(())
}

/// Every distinct line on the torus, sorted by point set. Uses
/// [`DEFAULT_MAX_CELLS`] as the size cap.
pub fn enumerate_lines(dims: TorusDims) -> Result<Vec<TorusLine>> {
    enumerate_lines_capped(dims, DEFAULT_MAX_CELLS)
}

pub fn enumerate_lines_capped(dims: TorusDims, max_cells: u64) -> Result<Vec<TorusLine>> {
    Ok(LineSpace::with_cap(dims, max_cells)?.lines())
}

/// `k * (u, v)` for `k` in `0..period`; the cyclic subgroup generated by `dir`.
fn multiples(dims: TorusDims, dir: Direction) -> impl Iterator<Item = TorusPoint> {
    (0..dir.period(dims)).map(move |k| dims.scale(k, dir.u, dir.v))
}

/// Exact collinearity: is there a line through all three points?
///
/// Decided by testing whether `b - a` and `c - a` both lie in the cyclic
/// subgroup of some valid direction.
pub fn torus_collinear(
    dims: TorusDims,
    a: TorusPoint,
    b: TorusPoint,
    c: TorusPoint,
) -> Result<bool> {
    for p in [a, b, c] {
        if !dims.contains(p) {
            return Err(Error::PointOutOfRange {
                x: p.x,
                y: p.y,
                m: dims.m(),
                n: dims.n(),
            });
        }
    }
    if a == b || b == c || a == c {
        return Err(Error::NonDistinctPoints);
    }
    let e1 = dims.sub(b, a);
    let e2 = dims.sub(c, a);
    Ok(directions(dims).any(|dir| {
        let (mut has1, mut has2) = (false, false);
        for q in multiples(dims, dir) {
            has1 |= q == e1;
            has2 |= q == e2;
            if has1 && has2 {
                return true;
            }
        }
        false
    }))
}

/// A member of the origin pencil on `T(p x p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PencilLine {
    /// `{π(k, βk)}`; slope 0 is the horizontal line.
    Slope(u64),
    /// `{π(0, k)}`.
    Vertical,
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// The `p + 1` lines of `T(p x p)` through the origin: slopes `0..p`
/// followed by the vertical line.
pub fn pencil_through_origin(p: u64) -> Result<Vec<TorusLine>> {
    require_odd_prime(p)?;
    let dims = TorusDims::new(p, p)?;
    let origin = TorusPoint { x: 0, y: 0 };
    let mut out = Vec::with_capacity(p as usize + 1);
    for beta in 0..p {
        out.push(line_through(dims, origin, Direction::new(dims, 1, beta)?)?);
    }
    out.push(line_through(dims, origin, Direction::new(dims, 0, 1)?)?);
    Ok(out)
}

/// Smallest `α ≡ β (mod p)` with `gcd(α m, n) = p`, where `p = gcd(m, n)`.
pub fn preimage_alpha(dims: TorusDims, beta: u64) -> Result<u64> {
    let p = dims.gcd();
    let cap = dims.n() * p;
    let mut alpha = beta;
    for _ in 0..cap {
        if alpha > 0 && gcd(alpha * dims.m(), dims.n()) == p {
            return Ok(alpha);
        }
        alpha += p;
    }
    Err(Error::SearchCapExceeded {
        what: "preimage slope alpha",
        iterations: cap,
    })
}

/// A line of `T(m x n)` whose point set is the full `ρ`-preimage of the
/// given pencil line of `T(p x p)`, `p = gcd(m, n)` an odd prime.
///
/// Slopes `1..p` need only that `p` is an odd prime. Slope 0 needs
/// `gcd(pm, n) = p`; the vertical line needs `gcd(m, pn) = p`.
pub fn preimage_line(dims: TorusDims, which: PencilLine) -> Result<TorusLine> {
    let p = dims.gcd();
    require_odd_prime(p).map_err(|_| {
        Error::Precondition(format!(
            "gcd({}, {}) = {p} is not an odd prime",
            dims.m(),
            dims.n()
        ))
    })?;
    let origin = TorusPoint { x: 0, y: 0 };
    match which {
        PencilLine::Slope(0) => {
            let lhs = gcd(p * dims.m(), dims.n());
            if lhs != p {
                return Err(Error::Precondition(format!(
                    "preimage of the slope-0 line needs gcd(pm, n) = {p}, got {lhs}"
                )));
            }
            line_through(dims, origin, Direction::new(dims, 1, p % dims.n())?)
        }
        PencilLine::Slope(beta) => {
            if beta >= p {
                return Err(Error::OutOfRange {
                    what: "slope",
                    value: beta,
                    expected: format!("0..{p}"),
                });
            }
            let alpha = preimage_alpha(dims, beta)?;
            line_through(dims, origin, Direction::new(dims, 1, alpha % dims.n())?)
        }
        PencilLine::Vertical => {
            let lhs = gcd(dims.m(), p * dims.n());
            if lhs != p {
                return Err(Error::Precondition(format!(
                    "preimage of the vertical line needs gcd(m, pn) = {p}, got {lhs}"
                )));
            }
            line_through(dims, origin, Direction::new(dims, p % dims.m(), 1)?)
        }
    }
}

/// Pointwise preimage `{t : ρ(t) ∈ ℓ}` of a pencil line, sorted.
pub fn pointwise_preimage(dims: TorusDims, which: PencilLine) -> Result<Vec<TorusPoint>> {
    let p = dims.gcd();
    let mut out = Vec::new();
    for t in dims.points() {
        let r = project_rho(dims, t)?;
        let on = match which {
            PencilLine::Slope(beta) => r.y == (beta * r.x) % p,
            PencilLine::Vertical => r.x == 0,
        };
        if on {
            out.push(t);
        }
    }
    Ok(out)
}

/// A valid cyclic subgroup of `Z_m x Z_n`; its cosets are the lines with
/// this direction class.
#[derive(Debug, Clone)]
pub struct Subgroup {
    generator: Direction,
    members: Vec<usize>,
    mask: Vec<u64>,
    maximal: bool,
}

impl Subgroup {
    /// Lexicographically smallest valid direction generating it.
    pub fn generator(&self) -> Direction {
        self.generator
    }

    /// Cell indices of the members, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Not contained in any other valid subgroup.
    pub fn is_maximal(&self) -> bool {
        self.maximal
    }
}

/// Precomputed line structure of one torus, for repeated queries.
#[derive(Debug, Clone)]
pub struct LineSpace {
    dims: TorusDims,
    subgroups: Vec<Subgroup>,
    maximal: Vec<usize>,
}

impl LineSpace {
    pub fn new(dims: TorusDims) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_MAX_CELLS)
    }

    pub fn with_cap(dims: TorusDims, max_cells: u64) -> Result<Self> {
        check_cap(dims, max_cells)?;
        let cells = dims.cells() as usize;
        let mut by_members: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subgroups: Vec<Subgroup> = Vec::new();
        for dir in directions(dims) {
            let mut members: Vec<usize> = multiples(dims, dir).map(|q| dims.index_of(q)).collect();
            members.sort_unstable();
            if by_members.contains_key(&members) {
                continue;
            }
            by_members.insert(members.clone(), subgroups.len());
            subgroups.push(Subgroup {
                generator: dir,
                mask: bits::from_indices(cells, members.iter().copied()),
                members,
                maximal: true,
            });
        }
        for i in 0..subgroups.len() {
            let contained = subgroups.iter().enumerate().any(|(j, other)| {
                j != i
                    && other.order() > subgroups[i].order()
                    && bits::is_subset(&subgroups[i].mask, &other.mask)
            });
            subgroups[i].maximal = !contained;
        }
        let maximal = (0..subgroups.len())
            .filter(|&i| subgroups[i].maximal)
            .collect();
        Ok(LineSpace {
            dims,
            subgroups,
            maximal,
        })
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    /// All distinct valid subgroups, in order of their smallest generator.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn maximal_subgroups(&self) -> impl Iterator<Item = &Subgroup> {
        self.maximal.iter().map(|&i| &self.subgroups[i])
    }

    /// Cosets of a subgroup as ascending cell-index lists, ordered by
    /// their smallest cell.
    pub fn cosets(&self, subgroup: &Subgroup) -> Vec<Vec<usize>> {
        let dims = self.dims;
        let cells = dims.cells() as usize;
        let mut assigned = vec![false; cells];
        let mut out = Vec::with_capacity(cells / subgroup.order());
        for start in 0..cells {
            if assigned[start] {
                continue;
            }
            let base = dims.point_at(start);
            let mut coset: Vec<usize> = subgroup
                .members
                .iter()
                .map(|&h| dims.index_of(dims.add(base, dims.point_at(h))))
                .collect();
            coset.sort_unstable();
            for &c in &coset {
                assigned[c] = true;
            }
            out.push(coset);
        }
        out
    }

    /// Every line, sorted by point set.
    pub fn lines(&self) -> Vec<TorusLine> {
        let dims = self.dims;
        let mut out = BTreeSet::new();
        for sg in &self.subgroups {
            for coset in self.cosets(sg) {
                let points: Vec<TorusPoint> = coset.iter().map(|&i| dims.point_at(i)).collect();
                out.insert(TorusLine {
                    dims,
                    base: points[0],
                    dir: sg.generator,
                    period: sg.order() as u64,
                    points,
                });
            }
        }
        out.into_iter().collect()
    }

    /// Same predicate as [`torus_collinear`], answered from the maximal
    /// subgroup masks.
    pub fn collinear(&self, a: TorusPoint, b: TorusPoint, c: TorusPoint) -> bool {
        let e1 = self.dims.index_of(self.dims.sub(b, a));
        let e2 = self.dims.index_of(self.dims.sub(c, a));
        self.maximal_subgroups()
            .any(|sg| bits::test(&sg.mask, e1) && bits::test(&sg.mask, e2))
    }
}
