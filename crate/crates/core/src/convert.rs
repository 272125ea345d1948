//! Compiling a quadtree IFS into a fat-pixel automaton.
//!
//! Every state stands for the sub-image at one cell: the whole image (the
//! root), each domain cell, every cell on the way down to a range, plus one
//! constant state. Descending from a cell into its quadrant `q` either lands
//! on a range (the sub-image is `alpha · domain + beta`), on a cell that still
//! contains ranges (its own state), or on a region no map writes (zero).
//!
//! The constant state carries a power-of-two value `K` instead of 1 so that
//! offsets are stored as `beta / K` and affine rows keep `|alpha| + |beta|/K <= 1`.
//! Because `K` is a power of two the rescaling is exact in floating point.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::address::{QuadAddress, Quadrant};
use crate::error::{Error, Result};
use crate::ifs::{ifs_decode, GainCheck, QuadIfs};
use crate::matrix::ProjectionMatrix;
use crate::wfa::Wfa;

/// Ordered automaton states: root, retained cell addresses, then the constant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCatalog {
    addresses: Vec<QuadAddress>,
    lookup: HashMap<QuadAddress, usize>,
}

impl StateCatalog {
    /// Number of automaton states, the constant included.
    pub fn len(&self) -> usize {
        self.addresses.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&self) -> usize {
        self.addresses.len()
    }

    pub fn state(&self, addr: &QuadAddress) -> Option<usize> {
        self.lookup.get(addr).copied()
    }

    /// Cell addresses of the non-constant states, root first.
    pub fn addresses(&self) -> &[QuadAddress] {
        &self.addresses
    }
}

/// Canonical order: shorter addresses first, then lexicographic digits.
fn canonical_key(a: &QuadAddress) -> (usize, Vec<u8>) {
    (a.depth(), a.digits().collect())
}

pub fn build_state_set(ifs: &QuadIfs) -> Result<StateCatalog> {
    ifs.ensure_valid(GainCheck::Lenient)?;
    let mut retained: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
    let mut pending = vec![QuadAddress::root()];
    pending.extend(ifs.maps.iter().map(|m| m.domain.clone()));
    while let Some(w) = pending.pop() {
        if !retained.insert(canonical_key(&w)) {
            continue;
        }
        for q in Quadrant::ALL {
            let wq = w.child(q);
            if ifs.splits(&wq) {
                pending.push(wq);
            }
        }
    }
    let addresses: Vec<QuadAddress> = retained
        .into_iter()
        .map(|(_, digits)| QuadAddress::from_digits(&digits).expect("digits came from addresses"))
        .collect();
    let lookup = addresses
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    Ok(StateCatalog { addresses, lookup })
}

/// A converted automaton together with the bookkeeping used to build it.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub catalog: StateCatalog,
    pub wfa: Wfa,
    /// Value held by the constant state.
    pub constant_scale: f64,
}

pub fn convert(ifs: &QuadIfs, y0: f64) -> Result<Wfa> {
    compile(ifs, y0).map(|c| c.wfa)
}

pub fn compile(ifs: &QuadIfs, y0: f64) -> Result<Compiled> {
    let catalog = build_state_set(ifs)?;
    let n = catalog.len();
    let konst = catalog.constant();
    let scale = constant_scale(ifs);

    let mut matrices: [ProjectionMatrix; 4] = std::array::from_fn(|_| ProjectionMatrix::zeros(n));
    for (s, w) in catalog.addresses().iter().enumerate() {
        for q in Quadrant::ALL {
            let wq = w.child(q);
            let m = &mut matrices[q.index()];
            if let Some(map) = ifs.maps.iter().find(|m| m.range == wq) {
                let d = catalog
                    .state(&map.domain)
                    .expect("every domain is a retained state");
                m.insert(s, d, map.alpha);
                m.insert(s, konst, map.beta / scale);
            } else if ifs.splits(&wq) {
                let next = catalog
                    .state(&wq)
                    .expect("closure keeps every proper prefix of a range");
                m.insert(s, next, 1.0);
            }
        }
    }
    for m in &mut matrices {
        m.insert(konst, konst, 1.0);
    }

    let mut means = HashMap::new();
    let mut initial: Vec<f64> = catalog
        .addresses()
        .iter()
        .map(|w| iterate_cell_mean(ifs, w.depth(), w, y0, &mut means))
        .collect();
    initial.push(scale);

    let wfa = Wfa::with_visible_first(initial, matrices)?;
    Ok(Compiled {
        catalog,
        wfa,
        constant_scale: scale,
    })
}

/// Automaton whose renders are the exact cell means of the attractor.
///
/// The state values solve `x = ¼ Σ_q C_q x` with the constant state pinned, so
/// every render depth shows the fixed point itself rather than an iterate.
/// Needs `|alpha| < 1` for every map.
pub fn convert_attractor(ifs: &QuadIfs) -> Result<Wfa> {
    if ifs.max_abs_alpha() >= 1.0 {
        return Err(Error::Precondition(format!(
            "attractor needs every |alpha| < 1 (max is {})",
            ifs.max_abs_alpha()
        )));
    }
    let compiled = compile(ifs, 0.0)?;
    let n = compiled.catalog.len();
    let konst = compiled.catalog.constant();
    let scale = compiled.constant_scale;
    let free = n - 1;
    let mut system = DMatrix::<f64>::identity(free, free);
    let mut rhs = DVector::<f64>::zeros(free);
    for m in compiled.wfa.matrices() {
        for (r, c, v) in m.entries().filter(|&(r, _, _)| r != konst) {
            if c == konst {
                rhs[r] += 0.25 * v * scale;
            } else {
                system[(r, c)] -= 0.25 * v;
            }
        }
    }
    let means = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Precondition("attractor mean system is singular".into()))?;
    let mut initial: Vec<f64> = means.iter().copied().collect();
    initial.push(scale);
    let wfa = compiled.wfa;
    Wfa::new(initial, wfa.matrices().clone(), wfa.output().to_vec())
}

/// Smallest power of two `K >= 1` with `|alpha| + |beta| / K <= 1` for every
/// map where that is achievable (`|alpha| < 1`).
fn constant_scale(ifs: &QuadIfs) -> f64 {
    let need = ifs
        .maps
        .iter()
        .filter(|m| m.alpha.abs() < 1.0)
        .map(|m| m.beta.abs() / (1.0 - m.alpha.abs()))
        .fold(1.0, f64::max);
    let exp = need.log2().ceil().clamp(0.0, 1000.0) as i32;
    let mut k = 2f64.powi(exp);
    // log2 rounding can land one power short
    if k < need && k < f64::MAX / 2.0 {
        k *= 2.0;
    }
    k
}

/// Mean over cell `v` of the `k`-th grid iterate started from uniform `y0`.
///
/// This is what a state must hold when it is the last state reached: the
/// automaton's descent and the grid iteration both peel one level per map
/// application, so a state at address `w` always terminates at iteration `|w|`.
fn iterate_cell_mean(
    ifs: &QuadIfs,
    k: usize,
    v: &QuadAddress,
    y0: f64,
    memo: &mut HashMap<(usize, QuadAddress), f64>,
) -> f64 {
    if k == 0 {
        return y0;
    }
    if let Some(&hit) = memo.get(&(k, v.clone())) {
        return hit;
    }
    let value = if let Some(map) = ifs.covering_map(v) {
        let tail = v
            .strip_prefix(&map.range)
            .expect("covering range is a prefix");
        let source = map.domain.join(&tail);
        map.alpha * iterate_cell_mean(ifs, k - 1, &source, y0, memo) + map.beta
    } else if ifs.splits(v) {
        let [ll, ul, lr, ur] =
            Quadrant::ALL.map(|q| iterate_cell_mean(ifs, k, &v.child(q), y0, memo));
        // same summation order as the grid downsampler: top row, then bottom row
        (ul + ur + ll + lr) / 4.0
    } else {
        0.0
    };
    memo.insert((k, v.clone()), value);
    value
}

/// Appends duplicate constant states until the automaton has `2(k+1)` states.
///
/// The converted automaton keeps its constant state last; the copies get
/// identity rows in all four matrices and the same initial value. Automata
/// already at or above that size are returned unchanged.
pub fn pad_with_constant_copies(wfa: &Wfa, maps: usize) -> Result<Wfa> {
    let target = 2 * (maps + 1);
    let n = wfa.states();
    if n >= target {
        return Ok(wfa.clone());
    }
    let konst_value = *wfa.initial().last().expect("non-empty automaton");
    let mut initial = wfa.initial().to_vec();
    initial.resize(target, konst_value);
    let mut output = wfa.output().to_vec();
    output.resize(target, 0.0);
    let matrices = std::array::from_fn(|q| {
        let src = &wfa.matrices()[q];
        let entries = src.entries().chain((n..target).map(|s| (s, s, 1.0)));
        ProjectionMatrix::from_triplets(target, entries).expect("entries stay in range")
    });
    Wfa::new(initial, matrices, output)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub max_deviation: f64,
    /// First iteration and pixel whose deviation equals the maximum, if nonzero.
    pub worst: Option<(usize, QuadAddress)>,
    pub compared: Vec<usize>,
    /// Iterations not compared: 0 by definition, and levels where some range is sub-pixel.
    pub skipped: Vec<usize>,
}

pub fn equivalence_check(ifs: &QuadIfs, m: usize, y0: f64) -> Result<EquivalenceReport> {
    let wfa = convert(ifs, y0)?;
    equivalence_check_against(&wfa, ifs, m, y0)
}

/// Compares `wfa.render(t)` with `ifs_decode(ifs, t, t, y0)` for every `t` in `1..=m`
/// at which all ranges are at least one pixel.
pub fn equivalence_check_against(
    wfa: &Wfa,
    ifs: &QuadIfs,
    m: usize,
    y0: f64,
) -> Result<EquivalenceReport> {
    let finest = ifs.max_range_depth();
    if m < finest {
        return Err(Error::Precondition(format!(
            "depth {m} is below the deepest range ({finest})"
        )));
    }
    let mut report = EquivalenceReport {
        max_deviation: 0.0,
        worst: None,
        compared: Vec::new(),
        skipped: Vec::new(),
    };
    for t in 0..=m {
        if t == 0 || t < finest {
            report.skipped.push(t);
            continue;
        }
        let automaton = wfa.render(t)?;
        let grid = ifs_decode(ifs, t, t, y0)?;
        for row in 0..grid.side() {
            for col in 0..grid.side() {
                let dev = (automaton.get(row, col) - grid.get(row, col)).abs();
                if dev > report.max_deviation || dev.is_nan() {
                    report.max_deviation = if dev.is_nan() { f64::INFINITY } else { dev };
                    report.worst = Some((t, QuadAddress::from_pixel(row, col, t)));
                }
            }
        }
        report.compared.push(t);
    }
    Ok(report)
}
