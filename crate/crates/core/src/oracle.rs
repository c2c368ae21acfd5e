//! Slow reference computations that work straight from the definition:
//! a line is the projection of an integer line `{(a + Uk, b + Vk)}` with
//! `gcd(U, V) = 1`. Nothing here uses the residue-direction criterion or
//! the subgroup machinery in [`crate::lines`], so the two can be checked
//! against each other.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::arith::{gcd_i64, mod_floor};
use crate::torus::{project_pi, PlanePoint, TorusDims, TorusPoint};

/// Residue classes `(U mod m, V mod n)` of coprime pairs with
/// `|U|, |V| <= window`, each with the first such pair found.
pub fn window_directions(dims: TorusDims, window: i64) -> BTreeMap<(u64, u64), (i64, i64)> {
    let mut out = BTreeMap::new();
    for u in -window..=window {
        for v in -window..=window {
            if gcd_i64(u, v) != 1 {
                continue;
            }
            out.entry((mod_floor(u, dims.m()), mod_floor(v, dims.n())))
                .or_insert((u, v));
        }
    }
    out
}

/// Point sets of all projected integer lines with direction in the window,
/// dropping the one-point images of directions that vanish on the torus.
pub fn window_lines(dims: TorusDims, window: i64) -> BTreeSet<Vec<TorusPoint>> {
    let mut out = BTreeSet::new();
    // the projected sequence is periodic with period dividing lcm(m, n)
    let steps = dims.lcm() as i64;
    for &(u, v) in window_directions(dims, window).values() {
        for a in 0..dims.m() as i64 {
            for b in 0..dims.n() as i64 {
                let pts: BTreeSet<TorusPoint> = (0..steps)
                    .map(|k| project_pi(dims, PlanePoint::new(a + u * k, b + v * k)))
                    .collect();
                if pts.len() >= 2 {
                    out.insert(pts.into_iter().collect());
                }
            }
        }
    }
    out
}

/// All collinear triples `i < j < k` of cell indices, read off
/// [`window_lines`].
pub fn window_collinear_triples(dims: TorusDims, window: i64) -> HashSet<[usize; 3]> {
    let mut out = HashSet::new();
    for line in window_lines(dims, window) {
        let idx: Vec<usize> = line.iter().map(|&p| dims.index_of(p)).collect();
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                for k in j + 1..idx.len() {
                    let mut t = [idx[i], idx[j], idx[k]];
                    t.sort_unstable();
                    out.insert(t);
                }
            }
        }
    }
    out
}
