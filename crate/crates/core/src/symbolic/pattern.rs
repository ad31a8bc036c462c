//! Rectangular patterns, window constraints and the admissibility machinery shared by
//! every symbolic model.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Shape;

pub type Symbol = u16;

/// A `V`-valued assignment on `[0,m) × [0,n)`, stored row-major (`index = j·m + i`).
///
/// The derived order compares shapes first and then the row-major symbol sequence, which is
/// the deterministic order used for every pattern listing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RectPattern {
    shape: Shape,
    cells: Vec<Symbol>,
}

impl RectPattern {
    pub fn new(shape: Shape, cells: Vec<Symbol>) -> Result<Self> {
        if cells.len() != shape.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} cells given for shape {shape}",
                cells.len()
            )));
        }
        Ok(RectPattern { shape, cells })
    }

    /// Builds a pattern from rows listed bottom-up (`rows[j][i] = x(i,j)`).
    pub fn from_rows(rows: &[Vec<Symbol>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        RectPattern::new(Shape(m, n), rows.concat())
    }

    pub fn empty(shape: Shape) -> Self {
        debug_assert!(shape.is_empty());
        RectPattern {
            shape,
            cells: Vec::new(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> Symbol {
        self.cells[j * self.shape.0 + i]
    }

    /// The sub-rectangle of `shape` whose lower-left corner sits at `origin`.
    pub fn window(&self, origin: Shape, shape: Shape) -> RectPattern {
        debug_assert!(origin.add(shape).le(self.shape));
        let mut cells = Vec::with_capacity(shape.cells());
        for j in 0..shape.1 {
            let row = (origin.1 + j) * self.shape.0 + origin.0;
            cells.extend_from_slice(&self.cells[row..row + shape.0]);
        }
        RectPattern { shape, cells }
    }

    /// Restriction to the lower-left box of `shape`.
    pub fn restrict(&self, shape: Shape) -> RectPattern {
        self.window(Shape::ZERO, shape)
    }

    /// `x(· + k)` restricted to the part still inside the rectangle. `k` may equal the shape,
    /// which yields an empty pattern.
    pub fn shifted(&self, k: Shape) -> Result<RectPattern> {
        let rest = self.shape.checked_sub(k).ok_or(Error::ShapeUnderflow {
            shape: self.shape,
            by: k,
        })?;
        Ok(self.window(k, rest))
    }

    pub fn transpose(&self) -> RectPattern {
        let Shape(m, n) = self.shape;
        let mut cells = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                cells.push(self.get(i, j));
            }
        }
        RectPattern {
            shape: Shape(n, m),
            cells,
        }
    }

    pub fn render(&self, alphabet: &[String]) -> String {
        let sep = if alphabet.iter().all(|s| s.chars().count() == 1) {
            ""
        } else {
            " "
        };
        if self.shape.is_empty() {
            return "·".to_string();
        }
        (0..self.shape.1)
            .map(|j| {
                (0..self.shape.0)
                    .map(|i| alphabet[self.get(i, j) as usize].as_str())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

impl fmt::Display for RectPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.shape.1)
            .map(|j| {
                (0..self.shape.0)
                    .map(|i| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "[{}]", rows.join(" / "))
    }
}

/// One window `F` (anchored so its bounding box starts at the origin) with its admissible
/// assignments `P ⊂ V^F`, encoded as base-`|V|` integers in window order.
#[derive(Debug, Clone)]
pub struct Constraint {
    window: Vec<(usize, usize)>,
    bbox: Shape,
    radix: u64,
    allowed: HashSet<u64>,
}

impl Constraint {
    pub fn new(
        window: &[(usize, usize)],
        allowed: &[Vec<Symbol>],
        alphabet_len: usize,
    ) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::InvalidModel("window is empty".into()));
        }
        if allowed.is_empty() {
            return Err(Error::InvalidModel("no admissible patterns given".into()));
        }
        let mut seen = HashSet::new();
        if window.iter().any(|c| !seen.insert(*c)) {
            return Err(Error::InvalidModel("window repeats a cell".into()));
        }
        let min_i = window.iter().map(|c| c.0).min().unwrap_or(0);
        let min_j = window.iter().map(|c| c.1).min().unwrap_or(0);
        let window: Vec<_> = window.iter().map(|&(i, j)| (i - min_i, j - min_j)).collect();
        let bbox = Shape(
            window.iter().map(|c| c.0).max().unwrap_or(0) + 1,
            window.iter().map(|c| c.1).max().unwrap_or(0) + 1,
        );
        let radix = alphabet_len as u64;
        if (radix as f64).powi(window.len() as i32) >= u64::MAX as f64 {
            return Err(Error::Unsupported("window too large to encode".into()));
        }
        let mut codes = HashSet::new();
        for a in allowed {
            if a.len() != window.len() {
                return Err(Error::InvalidModel(format!(
                    "admissible pattern has {} entries, window has {}",
                    a.len(),
                    window.len()
                )));
            }
            if let Some(s) = a.iter().find(|&&s| s as usize >= alphabet_len) {
                return Err(Error::SymbolOutOfAlphabet {
                    symbol: s.to_string(),
                });
            }
            codes.insert(a.iter().fold(0u64, |acc, &s| acc * radix + s as u64));
        }
        Ok(Constraint {
            window,
            bbox,
            radix,
            allowed: codes,
        })
    }

    pub fn window(&self) -> &[(usize, usize)] {
        &self.window
    }

    pub fn bbox(&self) -> Shape {
        self.bbox
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.len()
    }

    /// Admissible assignments decoded back to symbol tuples, sorted.
    pub fn allowed(&self) -> Vec<Vec<Symbol>> {
        let k = self.window.len();
        let mut out: Vec<Vec<Symbol>> = self
            .allowed
            .iter()
            .map(|&code| {
                let mut t = vec![0; k];
                let mut c = code;
                for slot in t.iter_mut().rev() {
                    *slot = (c % self.radix) as Symbol;
                    c /= self.radix;
                }
                t
            })
            .collect();
        out.sort();
        out
    }

    fn accepts(&self, get: impl Fn(usize, usize) -> Symbol, origin: (usize, usize)) -> bool {
        let code = self.window.iter().fold(0u64, |acc, &(di, dj)| {
            acc * self.radix + get(origin.0 + di, origin.1 + dj) as u64
        });
        self.allowed.contains(&code)
    }

    fn transposed(&self) -> Constraint {
        let mut c = self.clone();
        for cell in c.window.iter_mut() {
            *cell = (cell.1, cell.0);
        }
        c.bbox = c.bbox.transpose();
        c
    }
}

/// Check list for one rectangle shape: for every cell in row-major order, the window translates
/// whose last row-major cell is that cell.
struct Plan {
    shape: Shape,
    checks: Vec<Vec<(usize, (usize, usize))>>,
}

/// Locally admissible patterns of a finite family of window constraints, with free boundary
/// conditions: a translate is only checked when it lies fully inside the rectangle.
#[derive(Debug, Clone)]
pub struct PatternSystem {
    alphabet: Vec<String>,
    constraints: Vec<Constraint>,
}

impl PatternSystem {
    pub fn new(alphabet: Vec<String>, constraints: Vec<Constraint>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidModel("alphabet is empty".into()));
        }
        if alphabet.len() > Symbol::MAX as usize {
            return Err(Error::Unsupported("alphabet too large".into()));
        }
        Ok(PatternSystem {
            alphabet,
            constraints,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Bounding box of the union of all windows.
    pub fn window_bbox(&self) -> Shape {
        self.constraints
            .iter()
            .fold(Shape(1, 1), |acc, c| acc.max(c.bbox))
    }

    pub fn transpose(&self) -> PatternSystem {
        PatternSystem {
            alphabet: self.alphabet.clone(),
            constraints: self.constraints.iter().map(Constraint::transposed).collect(),
        }
    }

    pub fn is_admissible(&self, p: &RectPattern) -> bool {
        self.first_violation(p).is_none()
    }

    /// The first `(constraint, origin)` whose translate rejects `p`.
    pub fn first_violation(&self, p: &RectPattern) -> Option<(usize, (usize, usize))> {
        if p.cells.iter().any(|&s| s as usize >= self.alphabet.len()) {
            return Some((usize::MAX, (0, 0)));
        }
        let Shape(m, n) = p.shape;
        for (ci, c) in self.constraints.iter().enumerate() {
            if c.bbox.0 > m || c.bbox.1 > n {
                continue;
            }
            for j in 0..=n - c.bbox.1 {
                for i in 0..=m - c.bbox.0 {
                    if !c.accepts(|a, b| p.get(a, b), (i, j)) {
                        return Some((ci, (i, j)));
                    }
                }
            }
        }
        None
    }

    fn plan(&self, shape: Shape) -> Plan {
        let Shape(m, n) = shape;
        let mut checks = vec![Vec::new(); m * n];
        for (ci, c) in self.constraints.iter().enumerate() {
            if c.bbox.0 > m || c.bbox.1 > n {
                continue;
            }
            let last = c
                .window
                .iter()
                .max_by_key(|&&(i, j)| (j, i))
                .copied()
                .unwrap_or((0, 0));
            for j in 0..=n - c.bbox.1 {
                for i in 0..=m - c.bbox.0 {
                    let cell = (j + last.1) * m + i + last.0;
                    checks[cell].push((ci, (i, j)));
                }
            }
        }
        Plan { shape, checks }
    }

    fn check_cell(&self, plan: &Plan, cell: usize, vals: &[Symbol]) -> bool {
        let m = plan.shape.0;
        plan.checks[cell].iter().all(|&(ci, origin)| {
            self.constraints[ci].accepts(|a, b| vals[b * m + a], origin)
        })
    }

    /// Every admissible completion of a partial assignment, in lexicographic row-major order.
    /// `visit` returns `false` to stop early.
    pub fn for_each_completion(
        &self,
        shape: Shape,
        fixed: &[Option<Symbol>],
        mut visit: impl FnMut(&[Symbol]) -> bool,
    ) {
        debug_assert_eq!(fixed.len(), shape.cells());
        let plan = self.plan(shape);
        let k = self.alphabet.len() as Symbol;
        let total = shape.cells();
        let mut vals = vec![0 as Symbol; total];
        if total == 0 {
            visit(&vals);
            return;
        }
        // iterative DFS; `next[c]` is the next value to try at cell c
        let mut next = vec![0 as Symbol; total];
        let mut pos = 0usize;
        next[0] = fixed[0].unwrap_or(0);
        loop {
            let limit = fixed[pos].map_or(k, |v| v + 1);
            let mut advanced = false;
            while next[pos] < limit {
                vals[pos] = next[pos];
                next[pos] += 1;
                if self.check_cell(&plan, pos, &vals) {
                    advanced = true;
                    break;
                }
            }
            if advanced {
                if pos + 1 == total {
                    if !visit(&vals) {
                        return;
                    }
                } else {
                    pos += 1;
                    next[pos] = fixed[pos].unwrap_or(0);
                }
            } else {
                if pos == 0 {
                    return;
                }
                pos -= 1;
            }
        }
    }

    /// Pairs `(y, z)` of admissible patterns of `shape` agreeing wherever `tied` is set and
    /// matching `fixed` where given. `visit` returns `false` to stop early.
    pub fn for_each_pair(
        &self,
        shape: Shape,
        tied: &[bool],
        fixed: &[Option<(Symbol, Symbol)>],
        mut visit: impl FnMut(&[Symbol], &[Symbol]) -> bool,
    ) {
        debug_assert_eq!(tied.len(), shape.cells());
        debug_assert_eq!(fixed.len(), shape.cells());
        let plan = self.plan(shape);
        let k = self.alphabet.len();
        let total = shape.cells();
        let mut ys = vec![0 as Symbol; total];
        let mut zs = vec![0 as Symbol; total];
        if total == 0 {
            visit(&ys, &zs);
            return;
        }
        let choices = |c: usize| match (fixed[c], tied[c]) {
            (Some(_), _) => 1,
            (None, true) => k,
            (None, false) => k * k,
        };
        let decode = |c: usize, v: usize| match (fixed[c], tied[c]) {
            (Some(pair), _) => pair,
            (None, true) => (v as Symbol, v as Symbol),
            (None, false) => ((v / k) as Symbol, (v % k) as Symbol),
        };
        let mut next = vec![0usize; total];
        let mut pos = 0usize;
        loop {
            let limit = choices(pos);
            let mut advanced = false;
            while next[pos] < limit {
                let (a, b) = decode(pos, next[pos]);
                next[pos] += 1;
                ys[pos] = a;
                zs[pos] = b;
                if self.check_cell(&plan, pos, &ys) && self.check_cell(&plan, pos, &zs) {
                    advanced = true;
                    break;
                }
            }
            if advanced {
                if pos + 1 == total {
                    if !visit(&ys, &zs) {
                        return;
                    }
                } else {
                    pos += 1;
                    next[pos] = 0;
                }
            } else {
                if pos == 0 {
                    return;
                }
                pos -= 1;
            }
        }
    }

    /// Admissible patterns of `shape`, lexicographically ordered. Fails with `ShapeOverflow`
    /// when more than `bound` patterns exist.
    pub fn enumerate(&self, shape: Shape, bound: u128) -> Result<Vec<RectPattern>> {
        if shape.is_empty() {
            return Ok(vec![RectPattern::empty(shape)]);
        }
        let count = self.count(shape)?;
        if count > bound {
            return Err(Error::ShapeOverflow { shape, bound });
        }
        let mut out = Vec::with_capacity(count as usize);
        self.for_each_completion(shape, &vec![None; shape.cells()], |v| {
            out.push(RectPattern {
                shape,
                cells: v.to_vec(),
            });
            true
        });
        Ok(out)
    }

    /// Admissible patterns of `shape` that restrict to `base` on the lower-left corner.
    pub fn extensions(&self, base: &RectPattern, shape: Shape) -> Vec<RectPattern> {
        let mut fixed = vec![None; shape.cells()];
        for (i, j) in base.shape.points() {
            fixed[j * shape.0 + i] = Some(base.get(i, j));
        }
        let mut out = Vec::new();
        self.for_each_completion(shape, &fixed, |v| {
            out.push(RectPattern {
                shape,
                cells: v.to_vec(),
            });
            true
        });
        out
    }

    pub fn has_extension(&self, base: &RectPattern, shape: Shape) -> bool {
        let mut fixed = vec![None; shape.cells()];
        for (i, j) in base.shape.points() {
            fixed[j * shape.0 + i] = Some(base.get(i, j));
        }
        let mut found = false;
        self.for_each_completion(shape, &fixed, |_| {
            found = true;
            false
        });
        found
    }

    /// Number of admissible patterns of `shape`, by row-by-row transfer: the states are the
    /// admissible strips of `h − 1` rows (`h` the window height) and a state may be followed by
    /// another when the stacked `h`-row strip is admissible.
    pub fn count(&self, shape: Shape) -> Result<u128> {
        let Shape(m, n) = shape;
        if shape.is_empty() {
            return Ok(1);
        }
        let h = self.window_bbox().1;
        let direct = |s: Shape| {
            let mut c = 0u128;
            self.for_each_completion(s, &vec![None; s.cells()], |_| {
                c += 1;
                true
            });
            c
        };
        if n < h {
            return Ok(direct(shape));
        }
        let mut states: HashMap<Vec<Symbol>, usize> = HashMap::new();
        let mut transitions: Vec<(usize, usize)> = Vec::new();
        let strip = Shape(m, h);
        let low = m * (h - 1);
        self.for_each_completion(strip, &vec![None; strip.cells()], |v| {
            let next_id = states.len();
            let a = *states.entry(v[..low].to_vec()).or_insert(next_id);
            let next_id = states.len();
            let b = *states.entry(v[m..].to_vec()).or_insert(next_id);
            transitions.push((a, b));
            true
        });
        // counts[b]: admissible patterns of the current height whose top h-1 rows are state b
        let mut counts = vec![0u128; states.len()];
        for &(_, b) in &transitions {
            counts[b] += 1;
        }
        for _ in h..n {
            let mut next = vec![0u128; counts.len()];
            for &(a, b) in &transitions {
                next[b] = next[b]
                    .checked_add(counts[a])
                    .ok_or(Error::Overflow("pattern count"))?;
            }
            counts = next;
        }
        counts.into_iter().try_fold(0u128, |acc, c| {
            acc.checked_add(c).ok_or(Error::Overflow("pattern count"))
        })
    }
}
