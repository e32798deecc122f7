use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FlowError;

/// Closed oriented triangulated surface. Triangles may repeat vertices (as in
/// one-vertex triangulations), so edges are counted through half-edges rather
/// than vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriMesh {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VertexSpec {
    Count(usize),
    Positions(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: VertexSpec,
    triangles: Vec<[usize; 3]>,
}

impl Serialize for TriMesh {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MeshFile { vertices: VertexSpec::Count(self.vertex_count), triangles: self.triangles.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriMesh {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = MeshFile::deserialize(d)?;
        let n = match f.vertices {
            VertexSpec::Count(n) => n,
            VertexSpec::Positions(p) => p.len(),
        };
        TriMesh::new(n, f.triangles).map_err(D::Error::custom)
    }
}

impl TriMesh {
    /// Checks that every half-edge `(u, v)` is matched by a `(v, u)`, i.e. the
    /// surface is closed and consistently oriented, and that every vertex is
    /// used.
    pub fn new(vertex_count: usize, triangles: Vec<[usize; 3]>) -> Result<Self, FlowError> {
        if triangles.is_empty() {
            return Err(FlowError::Mesh("no triangles".into()));
        }
        let mut used = vec![false; vertex_count];
        let mut half: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                if u >= vertex_count {
                    return Err(FlowError::Mesh(format!("triangle {t} references vertex {u} of {vertex_count}")));
                }
                used[u] = true;
                *half.entry((u, v)).or_insert(0) += 1;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(FlowError::Mesh(format!("vertex {v} is not in any triangle")));
        }
        for (&(u, v), &n) in &half {
            if half.get(&(v, u)).copied().unwrap_or(0) != n {
                return Err(FlowError::Mesh(format!("edge ({u}, {v}) is not shared by two oppositely oriented triangles")));
            }
        }
        Ok(Self { vertex_count, triangles })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.triangles.len() * 3 / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    /// Distinct neighbours of each vertex (self-loops dropped).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![BTreeSet::new(); self.vertex_count];
        for tri in &self.triangles {
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                if u != v {
                    sets[u].insert(v);
                    sets[v].insert(u);
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Genus-2 surface with a single vertex: the octagon with side pairing
    /// `a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹`, fan-triangulated into 6 triangles.
    pub fn genus2_one_vertex() -> Self {
        Self::new(1, vec![[0, 0, 0]; 6]).expect("valid by construction")
    }

    /// `m × n` grid on the torus, each square split along one diagonal.
    pub fn torus_grid(m: usize, n: usize) -> Result<Self, FlowError> {
        if m < 3 || n < 3 {
            return Err(FlowError::Mesh("torus grid needs m, n >= 3".into()));
        }
        Self::new(m * n, torus_triangles(m, n, |i, j| i * n + j, None, false))
    }

    /// Two `m × n` torus grids, each with one square removed, glued along the
    /// boundary of the holes. `V = 2mn − 4`, `χ = −2`.
    pub fn genus2_grid(m: usize, n: usize) -> Result<Self, FlowError> {
        if m < 3 || n < 3 {
            return Err(FlowError::Mesh("genus-2 grid needs m, n >= 3".into()));
        }
        let hole = (0usize, 0usize);
        let corners = [(0, 0), (1, 0), (0, 1), (1, 1)];
        let mut tris = torus_triangles(m, n, |i, j| i * n + j, Some(hole), false);
        // second copy: the four hole corners are shared, the remaining
        // vertices get fresh labels after the first torus
        let mut extra = BTreeMap::new();
        for i in 0..m {
            for j in 0..n {
                if !corners.contains(&(i, j)) {
                    let next = m * n + extra.len();
                    extra.insert((i, j), next);
                }
            }
        }
        let label = |i: usize, j: usize| extra.get(&(i, j)).copied().unwrap_or(i * n + j);
        tris.extend(torus_triangles(m, n, label, Some(hole), true));
        Self::new(2 * m * n - 4, tris)
    }
}

fn torus_triangles(
    m: usize,
    n: usize,
    label: impl Fn(usize, usize) -> usize,
    skip: Option<(usize, usize)>,
    reversed: bool,
) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            if skip == Some((i, j)) {
                continue;
            }
            let (i1, j1) = ((i + 1) % m, (j + 1) % n);
            let (v00, v10, v01, v11) = (label(i, j), label(i1, j), label(i, j1), label(i1, j1));
            let (t1, t2) = ([v00, v10, v11], [v00, v11, v01]);
            if reversed {
                out.push([t1[0], t1[2], t1[1]]);
                out.push([t2[0], t2[2], t2[1]]);
            } else {
                out.push(t1);
                out.push(t2);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_characteristics() {
        assert_eq!(TriMesh::genus2_one_vertex().euler_characteristic(), -2);
        assert_eq!(TriMesh::torus_grid(4, 5).unwrap().euler_characteristic(), 0);
        let g2 = TriMesh::genus2_grid(5, 5).unwrap();
        assert_eq!(g2.euler_characteristic(), -2);
        assert_eq!(g2.vertex_count(), 46);
        assert_eq!(g2.genus(), 2);
    }

    #[test]
    fn open_meshes_rejected() {
        assert!(TriMesh::new(3, vec![[0, 1, 2]]).is_err());
        assert!(TriMesh::new(4, vec![[0, 1, 2], [0, 2, 1]]).is_err());
        assert!(TriMesh::new(3, vec![[0, 1, 2], [0, 1, 2]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = TriMesh::torus_grid(3, 3).unwrap();
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(serde_json::from_value::<TriMesh>(v).unwrap(), m);
        let with_positions = serde_json::json!({
            "vertices": [[0.0], [0.0], [0.0], [0.0]],
            "triangles": [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]
        });
        let tet: TriMesh = serde_json::from_value(with_positions).unwrap();
        assert_eq!(tet.euler_characteristic(), 2);
    }
}
