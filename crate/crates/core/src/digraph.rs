//! Directed-graph matrices of a mechanism: incidence, reduced incidence,
//! path, spanning-tree and cycle-basis matrices, all with exact ±1/0
//! entries.
//!
//! Row and column orderings are fixed (links ascending; turning joints
//! ascending, then meshes ascending) so that dumps are byte-stable.

use thiserror::Error;

use crate::algebra::matrix::{rank, Matrix};
use crate::mechanism::{JointId, LinkId, Mechanism};

#[derive(Debug, Error)]
pub enum DigraphError {
    #[error("cycle-basis matrix is rank deficient (rank {rank}, expected {expected}); this indicates a bug, not bad input")]
    RankDeficientCycleBasis { rank: usize, expected: usize },
}

/// The matrix bundle derived from a mechanism's digraph.
#[derive(Debug, Clone)]
pub struct GraphMatrices {
    /// (n+1) x k incidence matrix: +1 at each joint's head link, -1 at its
    /// tail link.
    pub incidence: Matrix<i64>,
    /// n x k reduced incidence (ground row deleted).
    pub reduced: Matrix<i64>,
    /// n x t turning-pair block of the reduced incidence.
    pub tree_incidence: Matrix<i64>,
    /// n x c mesh block of the reduced incidence.
    pub mesh_incidence: Matrix<i64>,
    /// t x n path matrix: signed membership of each tree edge on each
    /// link's path toward ground.
    pub path: Matrix<i64>,
    /// c x t spanning-tree matrix.
    pub spanning_tree: Matrix<i64>,
    /// c x k cycle basis `[spanning_tree | identity]`.
    pub cycle_basis: Matrix<i64>,
    /// Row labels of `incidence`: all links ascending.
    pub links: Vec<LinkId>,
    /// Column labels of `incidence` and `cycle_basis`: turning joints
    /// ascending, then meshes ascending.
    pub joints: Vec<JointId>,
    pub turning: Vec<JointId>,
    pub mesh_cycles: Vec<JointId>,
}

/// Incidence matrix over all links (rows) and all joints (columns).
pub fn incidence_matrix(m: &Mechanism) -> Matrix<i64> {
    let rows = m.link_count() + 1;
    let t = m.turning_count();
    let cols = t + m.mesh_count();
    let mut out = Matrix::filled(rows, cols, 0i64);
    for (c, j) in m.turning_joints().iter().enumerate() {
        out.set(j.head.0 as usize, c, 1);
        out.set(j.tail.0 as usize, c, -1);
    }
    for (c, g) in m.meshes().iter().enumerate() {
        out.set(g.head.0 as usize, t + c, 1);
        out.set(g.tail.0 as usize, t + c, -1);
    }
    out
}

/// Path matrix: rows are tree edges, columns are non-ground links; the entry
/// is +1 when the edge lies on the link's path toward ground with matching
/// orientation, -1 when opposite, 0 when off the path.
pub fn path_matrix(m: &Mechanism) -> Matrix<i64> {
    let t = m.turning_count();
    let n = m.link_count();
    let mut out = Matrix::filled(t, n, 0i64);
    let row_of: std::collections::BTreeMap<JointId, usize> = m
        .turning_joints()
        .iter()
        .enumerate()
        .map(|(i, j)| (j.id, i))
        .collect();
    for link in 1..=n {
        for (joint, sign) in m.tree_path(LinkId(link as u32), Mechanism::ground()) {
            out.set(row_of[&joint], link - 1, sign as i64);
        }
    }
    out
}

/// Spanning-tree matrix: the product of the transposed mesh-incidence block
/// with the transposed path matrix.
pub fn spanning_tree_matrix(mesh_incidence: &Matrix<i64>, path: &Matrix<i64>) -> Matrix<i64> {
    mesh_incidence.transpose().matmul(&path.transpose())
}

/// Cycle basis `[T | U]` with the identity on the mesh columns. The rank
/// must equal the mesh count; a deficiency is an internal-consistency trap.
pub fn cycle_basis(spanning_tree: &Matrix<i64>) -> Result<Matrix<i64>, DigraphError> {
    let c = spanning_tree.rows();
    let t = spanning_tree.cols();
    let mut out = Matrix::filled(c, t + c, 0i64);
    for r in 0..c {
        for col in 0..t {
            out.set(r, col, *spanning_tree.at(r, col));
        }
        out.set(r, t + r, 1);
    }
    let got = rank(&out.to_scalar());
    if got != c {
        return Err(DigraphError::RankDeficientCycleBasis {
            rank: got,
            expected: c,
        });
    }
    Ok(out)
}

impl GraphMatrices {
    pub fn build(m: &Mechanism) -> Result<Self, DigraphError> {
        let incidence = incidence_matrix(m);
        let n = m.link_count();
        let t = m.turning_count();
        let c = m.mesh_count();
        let mut reduced = Matrix::filled(n, t + c, 0i64);
        for r in 0..n {
            for col in 0..t + c {
                reduced.set(r, col, *incidence.at(r + 1, col));
            }
        }
        let tree_incidence = reduced.select_columns(&(0..t).collect::<Vec<_>>());
        let mesh_incidence = reduced.select_columns(&(t..t + c).collect::<Vec<_>>());
        let path = path_matrix(m);
        let spanning_tree = spanning_tree_matrix(&mesh_incidence, &path);
        let cycle = cycle_basis(&spanning_tree)?;
        Ok(GraphMatrices {
            incidence,
            reduced,
            tree_incidence,
            mesh_incidence,
            path,
            spanning_tree,
            cycle_basis: cycle,
            links: (0..=n as u32).map(LinkId).collect(),
            joints: m
                .turning_joints()
                .iter()
                .map(|j| j.id)
                .chain(m.meshes().iter().map(|g| g.id))
                .collect(),
            turning: m.turning_joints().iter().map(|j| j.id).collect(),
            mesh_cycles: m.meshes().iter().map(|g| g.id).collect(),
        })
    }

    /// Rank of the cycle basis (the number of independent cycles).
    pub fn cycle_rank(&self) -> usize {
        rank(&self.cycle_basis.to_scalar())
    }

    /// Column index of a turning joint within the tree blocks.
    pub fn tree_column(&self, id: JointId) -> Option<usize> {
        self.turning.iter().position(|&j| j == id)
    }

    /// Row index of a mesh cycle.
    pub fn cycle_row(&self, id: JointId) -> Option<usize> {
        self.mesh_cycles.iter().position(|&g| g == id)
    }

    /// Plain-text dump of the matrix bundle, bit-exact across platforms.
    pub fn render_dump(&self) -> String {
        let link_labels: Vec<String> = self.links.iter().map(|l| format!("l{l}")).collect();
        let joint_labels: Vec<String> = self.joints.iter().map(|j| format!("j{j}")).collect();
        let turning_labels: Vec<String> = self.turning.iter().map(|j| format!("j{j}")).collect();
        let nonground: Vec<String> = link_labels[1..].to_vec();

        let mut out = String::new();
        dump_block(&mut out, "incidence", &self.incidence, &joint_labels);
        dump_block(&mut out, "reduced_incidence", &self.reduced, &joint_labels);
        dump_block(&mut out, "path", &self.path, &nonground);
        dump_block(&mut out, "spanning_tree", &self.spanning_tree, &turning_labels);
        dump_block(&mut out, "cycle_basis", &self.cycle_basis, &joint_labels);
        out
    }
}

fn dump_block(out: &mut String, name: &str, m: &Matrix<i64>, col_labels: &[String]) {
    use std::fmt::Write;
    writeln!(out, "#{name} rows={} cols={}", m.rows(), m.cols()).unwrap();
    writeln!(out, "# cols: {}", col_labels.join(" ")).unwrap();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out.push('\n');
}
