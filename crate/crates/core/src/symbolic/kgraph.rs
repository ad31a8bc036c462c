//! Rank-2 graphs given by two edge sets over a common vertex set and a factorization
//! bijection `ρ : G₁∗G₂ → G₂∗G₁`.
//!
//! Orientation: a path of degree `(m,n)` is drawn in the first quadrant with its range at the
//! origin. A horizontal edge from lattice point `(i,j)` to `(i+1,j)` has its range at `(i,j)` and
//! its source at `(i+1,j)`; vertical edges likewise point from `(i,j+1)` back to `(i,j)`. A unit
//! square is the pair (bottom `e`, right `f`) with `s(e) = r(f)`, and `ρ(e,f) = (f', e')` gives
//! its left edge `f'` and top edge `e'`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Shape;
use crate::ktheory::IntMatrix;
use crate::symbolic::pattern::{Constraint, PatternSystem, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub name: String,
    pub source: usize,
    pub range: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank2Graph {
    vertices: Vec<String>,
    h_edges: Vec<Edge>,
    v_edges: Vec<Edge>,
    /// `(h, v) ↦ (v', h')` on edge indices.
    rho: HashMap<(usize, usize), (usize, usize)>,
}

/// `(name, source, range)` by names.
pub type EdgeSpec<'a> = (&'a str, &'a str, &'a str);

impl Rank2Graph {
    /// Resolves names; `rho` lists `((e, f), (f', e'))` with `e, e'` horizontal.
    pub fn new(
        vertices: &[&str],
        h_edges: &[EdgeSpec],
        v_edges: &[EdgeSpec],
        rho: &[((&str, &str), (&str, &str))],
    ) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
        let mut seen = HashSet::new();
        if let Some(d) = vertices.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::InvalidModel(format!("duplicate vertex `{d}`")));
        }
        let vid = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVertex(name.to_string()))
        };
        let edges = |list: &[EdgeSpec]| -> Result<Vec<Edge>> {
            list.iter()
                .map(|&(n, s, r)| {
                    Ok(Edge {
                        name: n.to_string(),
                        source: vid(s)?,
                        range: vid(r)?,
                    })
                })
                .collect()
        };
        let h_edges = edges(h_edges)?;
        let v_edges = edges(v_edges)?;
        let mut names = HashSet::new();
        for e in h_edges.iter().chain(&v_edges) {
            if !names.insert(e.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate edge `{}`", e.name)));
            }
        }
        let hid = |n: &str| {
            h_edges
                .iter()
                .position(|e| e.name == n)
                .ok_or_else(|| Error::UnknownEdge(n.to_string()))
        };
        let vid_e = |n: &str| {
            v_edges
                .iter()
                .position(|e| e.name == n)
                .ok_or_else(|| Error::UnknownEdge(n.to_string()))
        };
        let mut map = HashMap::new();
        for &((e, f), (f2, e2)) in rho {
            let key = (hid(e)?, vid_e(f)?);
            let val = (vid_e(f2)?, hid(e2)?);
            if map.insert(key, val).is_some() {
                return Err(Error::RhoNotBijective(format!("({e},{f}) listed twice")));
            }
        }
        Ok(Rank2Graph {
            vertices,
            h_edges,
            v_edges,
            rho: map,
        })
    }

    /// One vertex with `h` horizontal loops `a0..`, `v` vertical loops `b0..`, and the
    /// factorization `(aᵢ, bⱼ) ↦ (bⱼ, aᵢ)`.
    pub fn single_vertex(h: usize, v: usize) -> Self {
        let hn: Vec<String> = (0..h).map(|i| format!("a{i}")).collect();
        let vn: Vec<String> = (0..v).map(|j| format!("b{j}")).collect();
        let he: Vec<EdgeSpec> = hn.iter().map(|n| (n.as_str(), "v", "v")).collect();
        let ve: Vec<EdgeSpec> = vn.iter().map(|n| (n.as_str(), "v", "v")).collect();
        let mut rho = Vec::new();
        for a in &hn {
            for b in &vn {
                rho.push(((a.as_str(), b.as_str()), (b.as_str(), a.as_str())));
            }
        }
        Rank2Graph::new(&["v"], &he, &ve, &rho).expect("well-formed single-vertex graph")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn h_edges(&self) -> &[Edge] {
        &self.h_edges
    }

    pub fn v_edges(&self) -> &[Edge] {
        &self.v_edges
    }

    pub fn rho(&self, e: usize, f: usize) -> Option<(usize, usize)> {
        self.rho.get(&(e, f)).copied()
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn h_index(&self, name: &str) -> Result<usize> {
        self.h_edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn v_index(&self, name: &str) -> Result<usize> {
        self.v_edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    fn vertex_matrix(&self, edges: &[Edge]) -> IntMatrix {
        let k = self.vertices.len();
        let mut m = IntMatrix::zeros(k, k);
        for e in edges {
            m[(e.range, e.source)] += 1;
        }
        m
    }

    /// `M₁[u][w]` = number of horizontal edges with range `u` and source `w`.
    pub fn m1(&self) -> IntMatrix {
        self.vertex_matrix(&self.h_edges)
    }

    /// `M₂[u][w]` = number of vertical edges with range `u` and source `w`.
    pub fn m2(&self) -> IntMatrix {
        self.vertex_matrix(&self.v_edges)
    }

    /// Composable pairs `(e, f)` with `s(e) = r(f)`, sorted. These are the unit squares.
    pub fn squares(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (ei, e) in self.h_edges.iter().enumerate() {
            for (fi, f) in self.v_edges.iter().enumerate() {
                if e.source == f.range {
                    out.push((ei, fi));
                }
            }
        }
        out
    }

    /// The 2D SFT whose symbols are unit squares and whose patterns of shape `(m,n)` are the
    /// paths of degree `(m,n)`.
    pub fn square_system(&self) -> Result<PatternSystem> {
        let squares = self.squares();
        if squares.is_empty() {
            return Err(Error::InvalidModel("graph has no unit squares".into()));
        }
        let names: Vec<String> = squares
            .iter()
            .map(|&(e, f)| format!("{}|{}", self.h_edges[e].name, self.v_edges[f].name))
            .collect();
        let mut horiz = Vec::new();
        let mut vert = Vec::new();
        for (a, &(ea, fa)) in squares.iter().enumerate() {
            let (_, top_a) = self.rho(ea, fa).ok_or(Error::CompletionConflict(0, 0))?;
            for (b, &(eb, fb)) in squares.iter().enumerate() {
                let (left_b, _) = self.rho(eb, fb).ok_or(Error::CompletionConflict(0, 0))?;
                if fa == left_b {
                    horiz.push(vec![a as Symbol, b as Symbol]);
                }
                if top_a == eb {
                    vert.push(vec![a as Symbol, b as Symbol]);
                }
            }
        }
        let mut constraints = Vec::new();
        if !horiz.is_empty() {
            constraints.push(Constraint::new(&[(0, 0), (1, 0)], &horiz, names.len())?);
        } else {
            return Err(Error::InvalidModel("no horizontally adjacent squares".into()));
        }
        if !vert.is_empty() {
            constraints.push(Constraint::new(&[(0, 0), (0, 1)], &vert, names.len())?);
        } else {
            return Err(Error::InvalidModel("no vertically adjacent squares".into()));
        }
        PatternSystem::new(names, constraints)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KGraphReport {
    pub vertices: usize,
    pub h_edges: usize,
    pub v_edges: usize,
    pub squares: usize,
    pub m1: IntMatrix,
    pub m2: IntMatrix,
    pub matrices_commute: bool,
}

/// Checks commutation of the vertex matrices, then that `ρ` is an endpoint-preserving
/// bijection `G₁∗G₂ → G₂∗G₁`.
pub fn validate_rank2_graph(g: &Rank2Graph) -> Result<KGraphReport> {
    let m1 = g.m1();
    let m2 = g.m2();
    let commute = m1.mul(&m2)? == m2.mul(&m1)?;
    if !commute {
        return Err(Error::NoncommutingVertexMatrices);
    }
    let domain: HashSet<(usize, usize)> = g.squares().into_iter().collect();
    for key in g.rho.keys() {
        if !domain.contains(key) {
            let (e, f) = *key;
            return Err(Error::RhoNotBijective(format!(
                "({},{}) is not composable",
                g.h_edges[e].name, g.v_edges[f].name
            )));
        }
    }
    for &(e, f) in &domain {
        if !g.rho.contains_key(&(e, f)) {
            return Err(Error::RhoNotBijective(format!(
                "({},{}) has no image",
                g.h_edges[e].name, g.v_edges[f].name
            )));
        }
    }
    let mut image = HashSet::new();
    for (&(e, f), &(f2, e2)) in &g.rho {
        let (he, vf, vf2, he2) = (&g.h_edges[e], &g.v_edges[f], &g.v_edges[f2], &g.h_edges[e2]);
        if vf2.range != he.range || he2.source != vf.source || vf2.source != he2.range {
            return Err(Error::EndpointMismatch(format!(
                "ρ({},{}) = ({},{})",
                he.name, vf.name, vf2.name, he2.name
            )));
        }
        if !image.insert((f2, e2)) {
            return Err(Error::RhoNotBijective(format!(
                "({},{}) is hit twice",
                vf2.name, he2.name
            )));
        }
    }
    let codomain = g
        .v_edges
        .iter()
        .map(|f| g.h_edges.iter().filter(|e| f.source == e.range).count())
        .sum::<usize>();
    if image.len() != codomain {
        return Err(Error::RhoNotBijective("ρ is not onto G₂∗G₁".into()));
    }
    Ok(KGraphReport {
        vertices: g.vertices.len(),
        h_edges: g.h_edges.len(),
        v_edges: g.v_edges.len(),
        squares: domain.len(),
        m1,
        m2,
        matrices_commute: commute,
    })
}

/// A completed rectangle. `h[j][i]` is the horizontal edge from `(i,j)` to `(i+1,j)`
/// (`j ≤ n`); `v[j][i]` the vertical edge between `(i,j)` and `(i,j+1)` (`i ≤ m`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridRectangle {
    pub shape: Shape,
    pub h: Vec<Vec<usize>>,
    pub v: Vec<Vec<usize>>,
}

impl GridRectangle {
    pub fn bottom_row(&self) -> Vec<usize> {
        self.h[0].clone()
    }

    pub fn top_row(&self) -> Vec<usize> {
        self.h[self.shape.1].clone()
    }

    pub fn left_column(&self) -> Vec<usize> {
        self.v.iter().map(|row| row[0]).collect()
    }

    pub fn right_column(&self) -> Vec<usize> {
        self.v.iter().map(|row| row[self.shape.0]).collect()
    }

    /// Every unit square related by ρ.
    pub fn is_consistent(&self, g: &Rank2Graph) -> bool {
        let Shape(m, n) = self.shape;
        (0..n).all(|j| {
            (0..m).all(|i| {
                g.rho(self.h[j][i], self.v[j][i + 1]) == Some((self.v[j][i], self.h[j + 1][i]))
            })
        })
    }

    pub fn render(&self, g: &Rank2Graph) -> String {
        let rows: Vec<String> = (0..=self.shape.1)
            .map(|j| {
                self.h[j]
                    .iter()
                    .map(|&e| g.h_edges[e].name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let cols: Vec<String> = (0..=self.shape.0)
            .map(|i| {
                self.v
                    .iter()
                    .map(|row| g.v_edges[row[i]].name.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("h[{}] v[{}]", rows.join(" / "), cols.join(" / "))
    }
}

fn check_path(edges: &[Edge], path: &[usize], what: &str) -> Result<()> {
    for w in path.windows(2) {
        if edges[w[0]].source != edges[w[1]].range {
            return Err(Error::IncomposableSides(format!(
                "{what}: {} then {}",
                edges[w[0]].name, edges[w[1]].name
            )));
        }
    }
    Ok(())
}

/// The unique ρ-consistent grid with bottom side `h_side` (starting at the origin) and right
/// side `v_side` (starting at the end of `h_side`), completed row by row from the bottom,
/// right to left within a row.
pub fn complete_grid(g: &Rank2Graph, h_side: &[usize], v_side: &[usize]) -> Result<GridRectangle> {
    let (m, n) = (h_side.len(), v_side.len());
    check_path(&g.h_edges, h_side, "horizontal side")?;
    check_path(&g.v_edges, v_side, "vertical side")?;
    if m > 0 && n > 0 && g.h_edges[h_side[m - 1]].source != g.v_edges[v_side[0]].range {
        return Err(Error::IncomposableSides(
            "horizontal side does not end where the vertical side starts".into(),
        ));
    }
    if m == 0 || n == 0 {
        return Err(Error::IncomposableSides(
            "both sides must be nonempty to determine a grid".into(),
        ));
    }
    let mut h = vec![vec![usize::MAX; m]; n + 1];
    let mut v = vec![vec![usize::MAX; m + 1]; n];
    h[0].copy_from_slice(h_side);
    for j in 0..n {
        v[j][m] = v_side[j];
    }
    for j in 0..n {
        for i in (0..m).rev() {
            let (left, top) = g
                .rho(h[j][i], v[j][i + 1])
                .ok_or(Error::CompletionConflict(i, j))?;
            v[j][i] = left;
            h[j + 1][i] = top;
        }
    }
    let grid = GridRectangle {
        shape: Shape(m, n),
        h,
        v,
    };
    Ok(grid)
}

/// The grid with left side `v_side` (from the origin) and top side `h_side` (from the top of the
/// left side), completed with `ρ⁻¹` from the top row down.
pub fn complete_grid_from_left_top(
    g: &Rank2Graph,
    v_side: &[usize],
    h_side: &[usize],
) -> Result<GridRectangle> {
    let (m, n) = (h_side.len(), v_side.len());
    if m == 0 || n == 0 {
        return Err(Error::IncomposableSides(
            "both sides must be nonempty to determine a grid".into(),
        ));
    }
    check_path(&g.h_edges, h_side, "horizontal side")?;
    check_path(&g.v_edges, v_side, "vertical side")?;
    if g.v_edges[v_side[n - 1]].source != g.h_edges[h_side[0]].range {
        return Err(Error::IncomposableSides(
            "vertical side does not end where the horizontal side starts".into(),
        ));
    }
    let inverse: HashMap<(usize, usize), (usize, usize)> =
        g.rho.iter().map(|(&k, &v)| (v, k)).collect();
    let mut h = vec![vec![usize::MAX; m]; n + 1];
    let mut v = vec![vec![usize::MAX; m + 1]; n];
    h[n].copy_from_slice(h_side);
    for j in 0..n {
        v[j][0] = v_side[j];
    }
    for j in (0..n).rev() {
        for i in 0..m {
            let (bottom, right) = *inverse
                .get(&(v[j][i], h[j + 1][i]))
                .ok_or(Error::CompletionConflict(i, j))?;
            h[j][i] = bottom;
            v[j][i + 1] = right;
        }
    }
    Ok(GridRectangle {
        shape: Shape(m, n),
        h,
        v,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCount {
    pub shape: Shape,
    pub range_vertex: String,
    pub count: u64,
    pub grids: Option<Vec<GridRectangle>>,
}

/// Paths of degree `shape` with range `range_vertex`: `Σ_w (M₁^m M₂^n)[v][w]`, optionally
/// listing the completed grids (for `m, n ≥ 1`).
pub fn paths_of_shape(
    g: &Rank2Graph,
    shape: Shape,
    range_vertex: &str,
    list: bool,
) -> Result<PathCount> {
    let v = g.vertex_index(range_vertex)?;
    let power = g.m1().pow(shape.0 as u32)?.mul(&g.m2().pow(shape.1 as u32)?)?;
    let count = power.row_sum(v)?;
    let grids = if list && shape.0 > 0 && shape.1 > 0 {
        let mut out = Vec::new();
        for hp in paths_from(&g.h_edges, v, shape.0) {
            let end = g.h_edges[*hp.last().unwrap()].source;
            for vp in paths_from(&g.v_edges, end, shape.1) {
                out.push(complete_grid(g, &hp, &vp)?);
            }
        }
        Some(out)
    } else {
        None
    };
    Ok(PathCount {
        shape,
        range_vertex: range_vertex.to_string(),
        count,
        grids,
    })
}

/// Edge paths of length `len` starting (by range) at vertex `from`.
fn paths_from(edges: &[Edge], from: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &out {
            let at = p.last().map_or(from, |&e: &usize| edges[e].source);
            for (ei, e) in edges.iter().enumerate() {
                if e.range == at {
                    let mut q = p.clone();
                    q.push(ei);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_valid() {
        let g = Rank2Graph::single_vertex(2, 3);
        let r = validate_rank2_graph(&g).unwrap();
        assert_eq!(r.squares, 6);
        assert!(r.matrices_commute);
    }

    #[test]
    fn noncommuting_matrices() {
        // M₁ = [[1,0],[0,0]], M₂ = [[0,0],[1,0]]
        let g = Rank2Graph::new(&["u", "w"], &[("e", "u", "u")], &[("f", "u", "w")], &[]).unwrap();
        assert_eq!(g.m1().rows(), vec![vec![1, 0], vec![0, 0]]);
        assert_eq!(g.m2().rows(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(validate_rank2_graph(&g), Err(Error::NoncommutingVertexMatrices));
    }

    #[test]
    fn flip_loops_valid() {
        let g = Rank2Graph::new(
            &["v"],
            &[("e", "v", "v")],
            &[("f", "v", "v")],
            &[(("e", "f"), ("f", "e"))],
        )
        .unwrap();
        assert!(validate_rank2_graph(&g).is_ok());
    }

    #[test]
    fn non_bijective_rho() {
        let g = Rank2Graph::new(
            &["v"],
            &[("a", "v", "v"), ("b", "v", "v")],
            &[("x", "v", "v")],
            &[(("a", "x"), ("x", "a")), (("b", "x"), ("x", "a"))],
        )
        .unwrap();
        assert!(matches!(validate_rank2_graph(&g), Err(Error::RhoNotBijective(_))));
        let g = Rank2Graph::new(
            &["v"],
            &[("a", "v", "v")],
            &[("x", "v", "v")],
            &[],
        )
        .unwrap();
        assert!(matches!(validate_rank2_graph(&g), Err(Error::RhoNotBijective(_))));
    }

    #[test]
    fn endpoint_mismatch() {
        // two vertices, loops at each; ρ sends the square at u to the square at w
        let g = Rank2Graph::new(
            &["u", "w"],
            &[("a", "u", "u"), ("b", "w", "w")],
            &[("x", "u", "u"), ("y", "w", "w")],
            &[(("a", "x"), ("y", "b")), (("b", "y"), ("x", "a"))],
        )
        .unwrap();
        assert!(matches!(validate_rank2_graph(&g), Err(Error::EndpointMismatch(_))));
    }

    #[test]
    fn complete_flip_grid() {
        let g = Rank2Graph::new(
            &["v"],
            &[("e", "v", "v")],
            &[("f", "v", "v")],
            &[(("e", "f"), ("f", "e"))],
        )
        .unwrap();
        let grid = complete_grid(&g, &[0, 0], &[0]).unwrap();
        assert_eq!(grid.shape, Shape(2, 1));
        assert!(grid.h.iter().flatten().all(|&e| e == 0));
        assert!(grid.v.iter().flatten().all(|&f| f == 0));
    }

    #[test]
    fn swap_rule_preserves_top_row() {
        let g = Rank2Graph::new(
            &["v"],
            &[("a", "v", "v"), ("b", "v", "v")],
            &[("x", "v", "v"), ("y", "v", "v"), ("z", "v", "v")],
            &[
                (("a", "x"), ("x", "a")),
                (("a", "y"), ("y", "a")),
                (("a", "z"), ("z", "a")),
                (("b", "x"), ("x", "b")),
                (("b", "y"), ("y", "b")),
                (("b", "z"), ("z", "b")),
            ],
        )
        .unwrap();
        let (a, b, x) = (g.h_index("a").unwrap(), g.h_index("b").unwrap(), g.v_index("x").unwrap());
        let grid = complete_grid(&g, &[a, b], &[x]).unwrap();
        assert_eq!(grid.top_row(), vec![a, b]);
        assert_eq!(grid.left_column(), vec![x]);
        assert!(grid.is_consistent(&g));
    }

    #[test]
    fn single_square_is_rho() {
        let g = Rank2Graph::single_vertex(2, 3);
        let grid = complete_grid(&g, &[1], &[2]).unwrap();
        assert_eq!(g.rho(1, 2), Some((grid.v[0][0], grid.h[1][0])));
    }

    #[test]
    fn incomposable_sides() {
        let g = Rank2Graph::new(
            &["u", "w"],
            &[("a", "w", "u")],
            &[("x", "u", "u"), ("y", "w", "w")],
            &[(("a", "y"), ("x", "a"))],
        )
        .unwrap();
        validate_rank2_graph(&g).unwrap();
        let x = g.v_index("x").unwrap();
        assert!(matches!(complete_grid(&g, &[0], &[x]), Err(Error::IncomposableSides(_))));
        assert!(matches!(complete_grid(&g, &[0, 0], &[1]), Err(Error::IncomposableSides(_))));
    }

    /// Brute force: every labelling of a grid's edges, kept when ρ-consistent.
    fn brute_grids(g: &Rank2Graph, shape: Shape) -> usize {
        let Shape(m, n) = shape;
        let nh = m * (n + 1);
        let nv = (m + 1) * n;
        let (kh, kv) = (g.h_edges.len(), g.v_edges.len());
        let total = kh.pow(nh as u32) * kv.pow(nv as u32);
        let mut count = 0;
        for mut code in 0..total {
            let mut h = vec![vec![0; m]; n + 1];
            let mut v = vec![vec![0; m + 1]; n];
            for row in h.iter_mut() {
                for e in row.iter_mut() {
                    *e = code % kh;
                    code /= kh;
                }
            }
            for row in v.iter_mut() {
                for f in row.iter_mut() {
                    *f = code % kv;
                    code /= kv;
                }
            }
            if (GridRectangle { shape, h, v }).is_consistent(g) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn path_counts_match_brute_force() {
        let g = Rank2Graph::single_vertex(2, 3);
        assert_eq!(paths_of_shape(&g, Shape(2, 1), "v", false).unwrap().count, 12);
        assert_eq!(brute_grids(&g, Shape(2, 1)), 12);
        assert_eq!(paths_of_shape(&g, Shape(0, 0), "v", false).unwrap().count, 1);
        for m in 1..=2 {
            for n in 1..=2 {
                let c = paths_of_shape(&g, Shape(m, n), "v", true).unwrap();
                assert_eq!(c.count, 2u64.pow(m as u32) * 3u64.pow(n as u32));
                assert_eq!(c.grids.unwrap().len() as u64, c.count);
                assert_eq!(brute_grids(&g, Shape(m, n)) as u64, c.count);
            }
        }
        for (m, n) in [(3, 1), (1, 3), (3, 3), (2, 3)] {
            let c = paths_of_shape(&g, Shape(m, n), "v", true).unwrap();
            assert_eq!(c.count, 2u64.pow(m as u32) * 3u64.pow(n as u32));
            let grids = c.grids.unwrap();
            let distinct: HashSet<_> = grids.iter().map(|gr| (gr.h.clone(), gr.v.clone())).collect();
            assert_eq!(distinct.len() as u64, c.count);
        }
        assert!(matches!(
            paths_of_shape(&g, Shape(1, 1), "nope", false),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn square_system_counts_paths() {
        let g = Rank2Graph::single_vertex(2, 3);
        let sys = g.square_system().unwrap();
        for m in 1..=3 {
            for n in 1..=3 {
                assert_eq!(
                    sys.count(Shape(m, n)).unwrap(),
                    2u128.pow(m as u32) * 3u128.pow(n as u32)
                );
            }
        }
    }
}
