//! Verification of point sets, exact branch-and-bound for `τ(T(m x n))`
//! and a subset-enumeration oracle for tiny tori.
//!
//! The search branches on the lexicographically smallest undecided cell
//! (include first, then exclude). State per line is the number of chosen
//! points on it; a line reaching two chosen points removes its remaining
//! cells from the candidate set. Only maximal lines are tracked: a line
//! contained in a longer line is capped by it.
//!
//! Upper bounds used for pruning, all valid for any torus:
//! - `2 gcd(m, n)`, and more generally, for every parallel class of
//!   maximal lines (the diagonal class first), the sum over its lines of
//!   `min(2, chosen + available)`;
//! - for every chosen point `P`: `1 +` the number of maximal lines
//!   through `P` that still hold, or can still receive, a second point.
//!   Every other point lies on one of them and each takes at most one.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bits;
use crate::constructions::{Provenance, Tau, TauResult};
use crate::error::{Error, Result};
use crate::lines::{torus_collinear, LineSpace, DEFAULT_MAX_CELLS};
use crate::torus::{det_mod_test, Configuration, TorusDims, TorusPoint};

/// Largest torus (in cells) accepted by [`brute_force_tau`].
pub const BRUTE_FORCE_MAX_CELLS: u64 = 16;

/// Outcome of [`verify_no3il`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// Lexicographically first collinear triple.
    Violation([TorusPoint; 3]),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Checks every 3-subset of `cfg` for collinearity on `dims`.
///
/// Triples whose determinant is nonzero mod `g` cannot be collinear and
/// skip the exact predicate.
pub fn verify_no3il(dims: TorusDims, cfg: &Configuration) -> Verdict {
    let pts = cfg.points();
    assert!(
        pts.iter().all(|&p| dims.contains(p)),
        "configuration does not fit on {dims}"
    );
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let (a, b, c) = (pts[i], pts[j], pts[k]);
                if !det_mod_test(dims, a, b, c) {
                    continue;
                }
                if torus_collinear(dims, a, b, c).expect("distinct in-range points") {
                    return Verdict::Violation([a, b, c]);
                }
            }
        }
    }
    Verdict::Ok
}

/// Caps for [`max_no3il`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: u64,
    pub time_budget: Duration,
    /// Number of worker threads; 1 gives a fully deterministic run.
    pub parallel_width: usize,
    /// Fix the origin as the first chosen point. Sound because translations
    /// map lines to lines.
    pub translation_symmetry: bool,
    /// Enumeration cap on `m * n`.
    pub max_cells: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 1_000_000_000_000,
            time_budget: Duration::from_secs(3600),
            parallel_width: 1,
            translation_symmetry: false,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_ms")]
    pub elapsed: Duration,
}

fn ser_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

/// Precomputed incidence structure for the search.
struct Model {
    cells: usize,
    words: usize,
    masks: Vec<u64>,
    through: Vec<Vec<u32>>,
    families: Vec<Vec<u32>>,
    upper: usize,
}

impl Model {
    fn build(dims: TorusDims, max_cells: u64) -> Result<Model> {
        let space = LineSpace::with_cap(dims, max_cells)?;
        let cells = dims.cells() as usize;
        let words = bits::words_for(cells);
        let mut masks = Vec::new();
        let mut through = vec![Vec::new(); cells];
        let mut families = Vec::new();
        let diagonal = dims.index_of(TorusPoint { x: 1, y: 1 });
        let mut maximal: Vec<_> = space.maximal_subgroups().collect();
        // diagonal class first: it realises the 2g bound directly
        maximal.sort_by_key(|sg| !sg.members().contains(&diagonal));
        for sg in maximal {
            let mut family = Vec::new();
            for coset in space.cosets(sg) {
                let id = (masks.len() / words) as u32;
                masks.extend(bits::from_indices(cells, coset.iter().copied()));
                for &c in &coset {
                    through[c].push(id);
                }
                family.push(id);
            }
            if sg.order() >= 3 {
                families.push(family);
            }
        }
        Ok(Model {
            cells,
            words,
            masks,
            through,
            families,
            upper: (2 * dims.gcd() as usize).min(cells),
        })
    }

    fn mask(&self, line: u32) -> &[u64] {
        let s = line as usize * self.words;
        &self.masks[s..s + self.words]
    }
}

struct Shared {
    best: AtomicUsize,
    witness: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    prunes: AtomicU64,
    next_root: AtomicUsize,
    stop: AtomicBool,
    exhausted: AtomicBool,
    deadline: Instant,
    max_nodes: u64,
}

struct Worker<'a> {
    model: &'a Model,
    shared: &'a Shared,
    counts: Vec<u8>,
    chosen: Vec<usize>,
    frames: Vec<u64>,
    nodes: u64,
    prunes: u64,
}

const FLUSH_EVERY: u64 = 1 << 12;

impl<'a> Worker<'a> {
    fn new(model: &'a Model, shared: &'a Shared) -> Self {
        let depth = model.upper + 2;
        Worker {
            model,
            shared,
            counts: vec![0; model.masks.len() / model.words.max(1)],
            chosen: Vec::with_capacity(depth),
            frames: vec![0; depth * model.words],
            nodes: 0,
            prunes: 0,
        }
    }

    fn frame(&self, depth: usize) -> &[u64] {
        let w = self.model.words;
        &self.frames[depth * w..(depth + 1) * w]
    }

    fn flush(&mut self) {
        self.shared.nodes.fetch_add(self.nodes, Ordering::Relaxed);
        self.shared.prunes.fetch_add(self.prunes, Ordering::Relaxed);
        self.nodes = 0;
        self.prunes = 0;
    }

    /// Counts a node; returns `true` when the search must stop.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        let total = self.shared.nodes.load(Ordering::Relaxed) + self.nodes;
        let mut out_of_budget = total >= self.shared.max_nodes;
        if self.nodes >= FLUSH_EVERY {
            self.flush();
            out_of_budget |= Instant::now() >= self.shared.deadline;
        }
        if out_of_budget {
            self.shared.exhausted.store(true, Ordering::Relaxed);
            self.shared.stop.store(true, Ordering::Relaxed);
        }
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn record(&mut self) {
        let size = self.chosen.len();
        if size <= self.shared.best.load(Ordering::Relaxed) {
            return;
        }
        let mut witness = self.shared.witness.lock().expect("witness lock poisoned");
        if size > self.shared.best.load(Ordering::Relaxed) {
            *witness = self.chosen.clone();
            self.shared.best.store(size, Ordering::Relaxed);
            if size >= self.model.upper {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    fn bound(&self, depth: usize, best: usize) -> usize {
        let m = self.model;
        let cand = self.frame(depth);
        let chosen = self.chosen.len();
        let mut bound = (chosen + bits::count(cand) as usize).min(m.upper);
        if bound <= best {
            return bound;
        }
        for family in &m.families {
            let mut s = 0usize;
            for &l in family {
                let c = self.counts[l as usize] as usize;
                s += c + (2 - c).min(bits::count_and(cand, m.mask(l)) as usize);
                if s >= bound {
                    break;
                }
            }
            bound = bound.min(s);
            if bound <= best {
                return bound;
            }
        }
        for &p in &self.chosen {
            let alive = m.through[p]
                .iter()
                .filter(|&&l| self.counts[l as usize] >= 2 || bits::intersects(cand, m.mask(l)))
                .count();
            bound = bound.min(1 + alive);
            if bound <= best {
                return bound;
            }
        }
        bound
    }

    /// Includes cell `v`, building `frames[depth + 1]` from `frames[depth]`
    /// (which must no longer contain `v`), and searches below it.
    fn include(&mut self, depth: usize, v: usize) {
        let w = self.model.words;
        let (lo, hi) = self.frames.split_at_mut((depth + 1) * w);
        hi[..w].copy_from_slice(&lo[depth * w..]);
        self.chosen.push(v);
        for &l in &self.model.through[v] {
            let c = &mut self.counts[l as usize];
            *c += 1;
            if *c == 2 {
                let mask = self.model.mask(l);
                for (f, m) in hi[..w].iter_mut().zip(mask) {
                    *f &= !m;
                }
            }
        }
        self.record();
        self.search(depth + 1);
        for &l in &self.model.through[v] {
            self.counts[l as usize] -= 1;
        }
        self.chosen.pop();
    }

    fn search(&mut self, depth: usize) {
        loop {
            if self.tick() {
                return;
            }
            let best = self.shared.best.load(Ordering::Relaxed);
            if self.bound(depth, best) <= best {
                self.prunes += 1;
                return;
            }
            let Some(v) = bits::first(self.frame(depth)) else {
                return;
            };
            let w = self.model.words;
            bits::clear(&mut self.frames[depth * w..(depth + 1) * w], v);
            self.include(depth, v);
        }
    }

    /// Top-level branches: "the smallest chosen cell is `v`".
    fn run_roots(&mut self, only_origin: bool) {
        let cells = self.model.cells;
        let w = self.model.words;
        loop {
            let v = self.shared.next_root.fetch_add(1, Ordering::Relaxed);
            if v >= cells || (only_origin && v > 0) || self.tick() {
                break;
            }
            let root = &mut self.frames[..w];
            root.fill(0);
            for c in v + 1..cells {
                bits::set(root, c);
            }
            // candidates with v itself still included, for the bound
            bits::set(root, v);
            let best = self.shared.best.load(Ordering::Relaxed);
            if self.bound(0, best) <= best {
                self.prunes += 1;
                continue;
            }
            bits::clear(&mut self.frames[..w], v);
            self.include(0, v);
        }
        self.flush();
    }
}

/// Exact `τ(T(m x n))` with a witness, by branch and bound.
///
/// On budget exhaustion the incumbent is returned as a lower bound.
pub fn max_no3il(dims: TorusDims, limits: &SearchLimits) -> Result<TauResult> {
    if limits.max_nodes == 0 || limits.parallel_width == 0 || limits.time_budget.is_zero() {
        return Err(Error::Precondition("search limits must be positive".into()));
    }
    let start = Instant::now();
    let model = Model::build(dims, limits.max_cells)?;
    let shared = Shared {
        best: AtomicUsize::new(0),
        witness: Mutex::new(Vec::new()),
        nodes: AtomicU64::new(0),
        prunes: AtomicU64::new(0),
        next_root: AtomicUsize::new(0),
        stop: AtomicBool::new(false),
        exhausted: AtomicBool::new(false),
        deadline: start + limits.time_budget,
        max_nodes: limits.max_nodes,
    };
    let workers = limits.parallel_width.min(model.cells);
    if workers <= 1 {
        Worker::new(&model, &shared).run_roots(limits.translation_symmetry);
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| Worker::new(&model, &shared).run_roots(limits.translation_symmetry));
            }
        });
    }

    let best = shared.best.load(Ordering::Relaxed);
    let witness_idx = shared.witness.into_inner().expect("witness lock poisoned");
    let witness = Configuration::new(dims, witness_idx.iter().map(|&i| dims.point_at(i)))?;
    assert_eq!(witness.len(), best);
    assert!(
        verify_no3il(dims, &witness).is_ok(),
        "search produced an invalid witness on {dims}"
    );
    let tau = if shared.exhausted.load(Ordering::Relaxed) && best < model.upper {
        Tau::LowerBound(best)
    } else {
        Tau::Exact(best)
    };
    Ok(TauResult {
        dims,
        tau,
        witness,
        provenance: Provenance::ExactSearch,
        stats: SearchStats {
            nodes: shared.nodes.load(Ordering::Relaxed),
            prunes: shared.prunes.load(Ordering::Relaxed),
            elapsed: start.elapsed(),
        },
    })
}

/// `τ` by checking every subset of a torus with at most 16 cells.
pub fn brute_force_tau(dims: TorusDims) -> Result<usize> {
    if dims.cells() > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::CapExceeded {
            cells: dims.cells(),
            cap: BRUTE_FORCE_MAX_CELLS,
        });
    }
    let cells = dims.cells() as usize;
    let pts: Vec<TorusPoint> = dims.points().collect();
    let mut triples: Vec<u32> = Vec::new();
    for i in 0..cells {
        for j in i + 1..cells {
            for k in j + 1..cells {
                if torus_collinear(dims, pts[i], pts[j], pts[k])? {
                    triples.push(1 << i | 1 << j | 1 << k);
                }
            }
        }
    }
    Ok((0u32..1 << cells)
        .filter(|&set| triples.iter().all(|&t| set & t != t))
        .map(|set| set.count_ones() as usize)
        .max()
        .unwrap_or(0))
}
