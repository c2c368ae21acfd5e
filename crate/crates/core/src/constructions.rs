//! Explicit extremal configurations and the dispatcher that certifies
//! `τ(T(m x n))` whenever `gcd(m, n)` is 1, 2 or an odd prime.
//!
//! | `g = gcd(m, n)`                            | `τ`     | witness                      |
//! |--------------------------------------------|---------|------------------------------|
//! | 1                                          | 2       | `{(0,0), (0,1)}`             |
//! | 2                                          | 4       | the unit square              |
//! | odd prime `p`, `gcd(pm, n) = p²` (or swap) | `2p`    | two stacked parabolas        |
//! | odd prime `p`, `gcd(pm, n) = gcd(m, pn) = p` | `p + 1` | conic on `T(p x p)`, embedded |
//!
//! Any other `g` is composite and only gets a lower bound, lifted from
//! the best closed-form case on a quotient torus.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{gcd, is_prime, pow_mod};
use crate::error::{Error, Result};
use crate::solver::{verify_no3il, SearchStats};
use crate::torus::{Configuration, TorusDims, TorusPoint};

/// A value of `τ`, or a certified lower bound on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Exact(usize),
    LowerBound(usize),
}

impl Tau {
    pub fn value(&self) -> usize {
        match *self {
            Tau::Exact(v) | Tau::LowerBound(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Tau::Exact(_))
    }
}

/// Where a [`TauResult`] comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// `g = 1`: any two points.
    GcdOne,
    /// `g = 2`: the unit square.
    GcdTwo,
    /// `g = p` odd prime with a `p²` gcd pattern: `2p` parabola points.
    ParabolaPair,
    /// `g = p` odd prime with the `(p, p)` pattern: the `p + 1` conic.
    ConicLift,
    /// Branch-and-bound search.
    ExactSearch,
    /// Composite `g`: a closed-form set from a quotient torus.
    LiftLowerBound,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::GcdOne => "gcd-one",
            Provenance::GcdTwo => "gcd-two",
            Provenance::ParabolaPair => "parabola-pair",
            Provenance::ConicLift => "conic-lift",
            Provenance::ExactSearch => "exact-search",
            Provenance::LiftLowerBound => "lift-lower-bound",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauResult {
    pub dims: TorusDims,
    pub tau: Tau,
    pub witness: Configuration,
    pub provenance: Provenance,
    pub stats: SearchStats,
}

impl Serialize for TauResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TauResult", 9)?;
        st.serialize_field("m", &self.dims.m())?;
        st.serialize_field("n", &self.dims.n())?;
        st.serialize_field("tau", &self.tau.value())?;
        st.serialize_field("exact", &self.tau.is_exact())?;
        st.serialize_field("provenance", self.provenance.as_str())?;
        st.serialize_field("witness", self.witness.points())?;
        st.serialize_field("nodes", &self.stats.nodes)?;
        st.serialize_field("prunes", &self.stats.prunes)?;
        st.serialize_field("elapsed_ms", &(self.stats.elapsed.as_millis() as u64))?;
        st.end()
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// Euler's criterion: `q^((p-1)/2) ≡ 1 (mod p)`.
pub fn is_quadratic_residue(q: u64, p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    if q.is_multiple_of(p) {
        return Err(Error::OutOfRange {
            what: "residue",
            value: q,
            expected: format!("a value not divisible by {p}"),
        });
    }
    Ok(pow_mod(q % p, (p - 1) / 2, p) == 1)
}

/// The `q` used in `x² + q y² ≡ 1`: the smallest non-residue when
/// `p ≡ 1 (mod 4)`, and `1` when `p ≡ 3 (mod 4)`. Either way `-q` is a
/// non-residue, which makes the conic have `p + 1` points.
pub fn conic_parameter(p: u64) -> Result<u64> {
    require_odd_prime(p)?;
    if p % 4 == 3 {
        return Ok(1);
    }
    for q in 2..p {
        if !is_quadratic_residue(q, p)? {
            return Ok(q);
        }
    }
    unreachable!("every odd prime has a quadratic non-residue")
}

/// `{(x, y) ∈ T(p x p) : x² + q y² ≡ 1 (mod p)}` with `q` from
/// [`conic_parameter`].
pub fn conic_points(p: u64) -> Result<Configuration> {
    let q = conic_parameter(p)?;
    let dims = TorusDims::new(p, p)?;
    let pts = dims
        .points()
        .filter(|t| (t.x * t.x + q * (t.y * t.y % p)) % p == 1 % p);
    Configuration::new(dims, pts)
}

fn expect_gcd(dims: TorusDims, g: u64) -> Result<()> {
    if dims.gcd() != g {
        return Err(Error::Precondition(format!(
            "needs gcd(m, n) = {g}, but gcd({}, {}) = {}",
            dims.m(),
            dims.n(),
            dims.gcd()
        )));
    }
    Ok(())
}

/// `{(0,0), (0,1)}` for coprime `m`, `n`.
pub fn construct_gcd1(dims: TorusDims) -> Result<Configuration> {
    expect_gcd(dims, 1)?;
    Configuration::from_pairs(dims, &[(0, 0), (0, 1)])
}

/// The unit square `{(0,0), (0,1), (1,0), (1,1)}` for `gcd(m, n) = 2`.
pub fn construct_gcd2(dims: TorusDims) -> Result<Configuration> {
    expect_gcd(dims, 2)?;
    Configuration::from_pairs(dims, &[(0, 0), (0, 1), (1, 0), (1, 1)])
}

/// Which orientation of the `2p` construction applies, if any.
fn parabola_orientation(dims: TorusDims) -> Result<bool> {
    let p = dims.gcd();
    require_odd_prime(p).map_err(|_| {
        Error::Precondition(format!(
            "gcd({}, {}) = {p} is not an odd prime",
            dims.m(),
            dims.n()
        ))
    })?;
    let row = gcd(p * dims.m(), dims.n());
    let col = gcd(dims.m(), p * dims.n());
    if row == p * p {
        Ok(false)
    } else if col == p * p {
        Ok(true)
    } else {
        Err(Error::Precondition(format!(
            "needs gcd(pm, n) = {pp} or gcd(m, pn) = {pp}, got gcd(pm, n) = {row} and gcd(m, pn) = {col}",
            pp = p * p
        )))
    }
}

/// `{(i, i²p)} ∪ {(i, i²p + 1)}`, `i < p`, reduced mod `n`; coordinates
/// swapped when the `p²` pattern is `gcd(m, pn)`.
pub fn construct_parabola_pair(dims: TorusDims) -> Result<Configuration> {
    let transposed = parabola_orientation(dims)?;
    let p = dims.gcd();
    let target = if transposed { dims.transposed() } else { dims };
    let n = target.n();
    let pts = (0..p).flat_map(|i| {
        let y = i * i * p % n;
        [
            TorusPoint { x: i, y },
            TorusPoint {
                x: i,
                y: (y + 1) % n,
            },
        ]
    });
    let cfg = Configuration::new(target, pts)?;
    Ok(if transposed { cfg.transposed() } else { cfg })
}

/// Embeds a configuration of a quotient torus `T(a x b)`, `a | m`,
/// `b | n`, by reading its residues on `T(m x n)`. Collinear triples
/// project to collinear triples, so validity is preserved.
pub fn lift_set(dims: TorusDims, small: &Configuration) -> Result<Configuration> {
    let s = small.dims();
    if !dims.m().is_multiple_of(s.m()) || !dims.n().is_multiple_of(s.n()) {
        return Err(Error::Precondition(format!(
            "{s} is not a quotient of {dims}"
        )));
    }
    small.embed(dims)
}

/// Closed-form case for `dims`, without verification.
fn closed_form(dims: TorusDims) -> Option<(Configuration, Provenance)> {
    let g = dims.gcd();
    match g {
        1 => Some((construct_gcd1(dims).ok()?, Provenance::GcdOne)),
        2 => Some((construct_gcd2(dims).ok()?, Provenance::GcdTwo)),
        p if p % 2 == 1 && is_prime(p) => {
            if let Ok(cfg) = construct_parabola_pair(dims) {
                return Some((cfg, Provenance::ParabolaPair));
            }
            // with g = p an odd prime, gcd(pm, n) and gcd(m, pn) are each p or p²
            let conic = conic_points(p).ok()?;
            Some((lift_set(dims, &conic).ok()?, Provenance::ConicLift))
        }
        _ => None,
    }
}

fn divisors(n: u64) -> impl Iterator<Item = u64> {
    (2..=n).filter(move |d| n.is_multiple_of(*d))
}

/// `τ` with a witness, from the closed form when one applies.
///
/// For composite `g` the result is [`Tau::LowerBound`] with provenance
/// [`Provenance::LiftLowerBound`]; the largest closed-form set over all
/// quotient tori `T(a x b)` is embedded. Exactness is then up to
/// [`crate::solver::max_no3il`].
pub fn construct_max(dims: TorusDims) -> TauResult {
    let (witness, provenance, tau) = match closed_form(dims) {
        Some((cfg, prov)) => {
            let t = Tau::Exact(cfg.len());
            (cfg, prov, t)
        }
        None => {
            let mut best: Option<Configuration> = None;
            for a in divisors(dims.m()) {
                for b in divisors(dims.n()) {
                    let small = TorusDims::new(a, b).expect("divisors exceed 1");
                    if let Some((cfg, _)) = closed_form(small) {
                        if best.as_ref().is_none_or(|c| cfg.len() > c.len()) {
                            best = Some(cfg);
                        }
                    }
                }
            }
            let small = best.expect("T(2x2)-type quotients always have a closed form");
            let cfg = lift_set(dims, &small).expect("quotient residues fit");
            let t = Tau::LowerBound(cfg.len());
            (cfg, Provenance::LiftLowerBound, t)
        }
    };
    assert!(
        verify_no3il(dims, &witness).is_ok(),
        "{provenance} witness fails on {dims}"
    );
    assert!(tau.value() <= 2 * dims.gcd() as usize);
    TauResult {
        dims,
        tau,
        witness,
        provenance,
        stats: SearchStats::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::enumerate_lines;

    fn dims(m: u64, n: u64) -> TorusDims {
        TorusDims::new(m, n).unwrap()
    }

    fn pairs(cfg: &Configuration) -> Vec<(u64, u64)> {
        cfg.points().iter().map(|p| (p.x, p.y)).collect()
    }

    fn sorted(mut v: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
        v.sort();
        v
    }

    #[test]
    fn quadratic_residue_examples() {
        assert!(is_quadratic_residue(1, 3).unwrap());
        assert!(!is_quadratic_residue(2, 5).unwrap());
        assert!(is_quadratic_residue(2, 7).unwrap());
        assert!(is_quadratic_residue(0, 7).is_err());
        assert_eq!(is_quadratic_residue(1, 9), Err(Error::NotOddPrime(9)));
    }

    #[test]
    fn euler_criterion_matches_squaring_scan() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let squares: std::collections::BTreeSet<u64> = (1..p).map(|x| x * x % p).collect();
            for q in 1..p {
                assert_eq!(
                    is_quadratic_residue(q, p).unwrap(),
                    squares.contains(&q),
                    "{q} mod {p}"
                );
            }
        }
    }

    #[test]
    fn conic_examples() {
        assert_eq!(
            pairs(&conic_points(3).unwrap()),
            sorted(vec![(0, 1), (0, 2), (1, 0), (2, 0)])
        );
        assert_eq!(conic_parameter(5).unwrap(), 2);
        assert_eq!(
            pairs(&conic_points(5).unwrap()),
            sorted(vec![(1, 0), (4, 0), (2, 1), (3, 1), (2, 4), (3, 4)])
        );
        let c7 = conic_points(7).unwrap();
        assert_eq!(conic_parameter(7).unwrap(), 1);
        assert_eq!(c7.len(), 8);
        for (x, y) in [(0, 1), (1, 0), (2, 2), (5, 5)] {
            assert!(c7.contains(TorusPoint { x, y }));
        }
        assert_eq!(conic_points(2), Err(Error::NotOddPrime(2)));
    }

    #[test]
    fn conic_meets_lines_at_most_twice() {
        for p in [3u64, 5, 7, 11, 13] {
            let conic = conic_points(p).unwrap();
            for line in enumerate_lines(dims(p, p)).unwrap() {
                let hits = line.points().iter().filter(|&&t| conic.contains(t)).count();
                assert!(hits <= 2, "p={p}");
            }
        }
    }

    #[test]
    fn gcd1_and_gcd2_examples() {
        for (m, n) in [(2, 3), (4, 9), (5, 7)] {
            let d = dims(m, n);
            assert_eq!(pairs(&construct_gcd1(d).unwrap()), vec![(0, 0), (0, 1)]);
        }
        for (m, n) in [(2, 2), (4, 6), (2, 8)] {
            let d = dims(m, n);
            let cfg = construct_gcd2(d).unwrap();
            assert_eq!(pairs(&cfg), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
            assert!(verify_no3il(d, &cfg).is_ok());
        }
        assert!(construct_gcd1(dims(4, 6)).is_err());
        assert!(construct_gcd2(dims(3, 9)).is_err());
    }

    #[test]
    fn parabola_examples() {
        let d = dims(3, 9);
        let cfg = construct_parabola_pair(d).unwrap();
        assert_eq!(
            pairs(&cfg),
            sorted(vec![(0, 0), (1, 3), (2, 3), (0, 1), (1, 4), (2, 4)])
        );
        let swapped = construct_parabola_pair(dims(9, 3)).unwrap();
        assert_eq!(pairs(&swapped), pairs(&cfg.transposed()));
        let d = dims(6, 9);
        let cfg = construct_parabola_pair(d).unwrap();
        assert_eq!(cfg.len(), 6);
        assert!(verify_no3il(d, &cfg).is_ok());
    }

    #[test]
    fn parabola_precondition_names_failed_test() {
        let err = construct_parabola_pair(dims(3, 6)).unwrap_err().to_string();
        assert!(
            err.contains("gcd(pm, n) = 3") && err.contains("gcd(m, pn) = 3"),
            "{err}"
        );
        let err = construct_parabola_pair(dims(4, 6)).unwrap_err().to_string();
        assert!(err.contains("not an odd prime"), "{err}");
    }

    #[test]
    fn lift_examples() {
        let d = dims(3, 6);
        let cfg = lift_set(d, &conic_points(3).unwrap()).unwrap();
        assert_eq!(pairs(&cfg), sorted(vec![(0, 1), (0, 2), (1, 0), (2, 0)]));
        assert!(verify_no3il(d, &cfg).is_ok());

        let d = dims(5, 10);
        let cfg = lift_set(d, &conic_points(5).unwrap()).unwrap();
        assert_eq!(cfg.len(), 6);
        assert!(verify_no3il(d, &cfg).is_ok());

        let same = conic_points(7).unwrap();
        assert_eq!(lift_set(dims(7, 7), &same).unwrap(), same);
        assert!(lift_set(dims(6, 9), &conic_points(5).unwrap()).is_err());
    }

    #[test]
    fn dispatch_examples() {
        let r = construct_max(dims(3, 9));
        assert_eq!(
            (r.tau, r.provenance),
            (Tau::Exact(6), Provenance::ParabolaPair)
        );
        let r = construct_max(dims(3, 6));
        assert_eq!(
            (r.tau, r.provenance),
            (Tau::Exact(4), Provenance::ConicLift)
        );
        let r = construct_max(dims(4, 6));
        assert_eq!((r.tau, r.provenance), (Tau::Exact(4), Provenance::GcdTwo));
        let r = construct_max(dims(5, 7));
        assert_eq!((r.tau, r.provenance), (Tau::Exact(2), Provenance::GcdOne));
    }

    #[test]
    fn composite_gcd_gets_lifted_lower_bound() {
        // T(3x9) is a quotient of T(9x9) and carries six points
        let r = construct_max(dims(9, 9));
        assert_eq!(
            (r.tau, r.provenance),
            (Tau::LowerBound(6), Provenance::LiftLowerBound)
        );
        let r = construct_max(dims(4, 4));
        assert_eq!(r.tau, Tau::LowerBound(4));
        let r = construct_max(dims(15, 15));
        assert!(r.tau.value() >= 6);
    }

    #[test]
    fn tau_result_json_shape() {
        let r = construct_max(dims(3, 9));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"m":3,"n":9,"tau":6,"exact":true,"provenance":"parabola-pair","witness":[[0,0],[0,1],[1,3],[1,4],[2,3],[2,4]],"nodes":0,"prunes":0,"elapsed_ms":0}"#
        );
    }
}
