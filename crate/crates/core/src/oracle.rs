//! Independent brute-force transfer-matrix checker.
//!
//! Assembles the full cycle constraint system from first principles — its
//! own tree walk, its own coefficient formula, its own dense elimination
//! with a largest-entry pivot rule — sharing only the exact arithmetic with
//! the main solvers. Numeric only: every symbol must be bound.

use num::{Signed, Zero};
use thiserror::Error;

use crate::algebra::matrix::Matrix;
use crate::algebra::{AlgebraError, Bindings, Rational};
use crate::mechanism::{JointId, LinkId, Mechanism};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("cycle system rank {rank} != mesh count {meshes}")]
    RankMismatch { rank: usize, meshes: usize },
    #[error("input count {got} != degrees of freedom {expected}")]
    DofMismatch { got: usize, expected: usize },
    #[error("P_r singular at the given binding")]
    Singular,
    #[error("solution fails the defining equations")]
    ResidualNonzero,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Numeric transfer matrix with independently re-derived rank and dof.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub entries: Matrix<Rational>,
    pub outputs: Vec<JointId>,
    pub inputs: Vec<JointId>,
    pub rank: usize,
    pub dof: usize,
}

/// Solves the whole cycle system at a numeric binding by dense exact
/// elimination with full row pivoting on the largest entry.
pub fn brute_force_transfer(
    m: &Mechanism,
    bindings: &Bindings,
) -> Result<OracleResult, OracleError> {
    let t = m.turning_count();
    let c = m.mesh_count();

    // Own tree adjacency and parent walk (BFS from ground).
    let n_links = m.link_count() + 1;
    let mut adjacency: Vec<Vec<(usize, JointId, i8)>> = vec![Vec::new(); n_links];
    for j in m.turning_joints() {
        adjacency[j.tail.0 as usize].push((j.head.0 as usize, j.id, 1));
        adjacency[j.head.0 as usize].push((j.tail.0 as usize, j.id, -1));
    }
    let mut parent: Vec<Option<(usize, JointId, i8)>> = vec![None; n_links];
    let mut order = std::collections::VecDeque::from([0usize]);
    let mut seen = vec![false; n_links];
    seen[0] = true;
    while let Some(x) = order.pop_front() {
        for &(next, joint, sign_from_x) in &adjacency[x] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((x, joint, sign_from_x));
                order.push_back(next);
            }
        }
    }

    // Signed tree edges along head -> tail of a mesh, via root chains.
    let chain = |mut x: usize| {
        let mut out = vec![x];
        while let Some((p, _, _)) = parent[x] {
            x = p;
            out.push(p);
        }
        out
    };
    let signed_path = |from: LinkId, to: LinkId| {
        let up_a = chain(from.0 as usize);
        let up_b = chain(to.0 as usize);
        let lca = *up_a.iter().find(|l| up_b.contains(l)).expect("connected");
        let mut hops: Vec<(JointId, i8)> = Vec::new();
        let mut x = from.0 as usize;
        while x != lca {
            let (p, joint, sign_from_parent) = parent[x].unwrap();
            // Traveling x -> p: orientation matches when the edge points
            // x -> p, i.e. when the stored parent->x sign is -1.
            hops.push((joint, -sign_from_parent));
            x = p;
        }
        let mut down: Vec<(JointId, i8)> = Vec::new();
        let mut y = to.0 as usize;
        while y != lca {
            let (p, joint, sign_from_parent) = parent[y].unwrap();
            down.push((joint, sign_from_parent));
            y = p;
        }
        down.reverse();
        hops.extend(down);
        hops
    };

    // Numeric geometry.
    let joint_col: std::collections::BTreeMap<JointId, usize> = m
        .turning_joints()
        .iter()
        .enumerate()
        .map(|(i, j)| (j.id, i))
        .collect();
    let mut system: Vec<Vec<Rational>> = vec![vec![Rational::zero(); t]; c];
    for (row, mesh) in m.meshes().iter().enumerate() {
        let my = mesh.y.eval(bindings)?;
        let mz = mesh.z.eval(bindings)?;
        for (joint, sign) in signed_path(mesh.head, mesh.tail) {
            let j = m.turning_by_id(joint).expect("tree joint");
            let coeff = (j.z.eval(bindings)? - &mz) * j.phi.sin()
                + (j.y.eval(bindings)? - &my) * j.phi.cos();
            system[row][joint_col[&joint]] = Rational::from_integer(sign.into()) * coeff;
        }
    }

    // Independent rank of the assembled system.
    let rank = gauss_full_pivot(&mut system.clone(), t);
    if rank != c {
        return Err(OracleError::RankMismatch { rank, meshes: c });
    }
    let dof = t - rank;
    let inputs = m.input_joints();
    let outputs = m.output_joints();
    if inputs.len() != dof {
        return Err(OracleError::DofMismatch {
            got: inputs.len(),
            expected: dof,
        });
    }

    // Augment [P_r | -P_E] and solve column by column.
    let out_cols: Vec<usize> = outputs.iter().map(|j| joint_col[j]).collect();
    let in_cols: Vec<usize> = inputs.iter().map(|j| joint_col[j]).collect();
    let r = outputs.len();
    let e = inputs.len();
    let mut aug: Vec<Vec<Rational>> = (0..c)
        .map(|row| {
            let mut v: Vec<Rational> = out_cols.iter().map(|&cx| system[row][cx].clone()).collect();
            v.extend(in_cols.iter().map(|&cx| -system[row][cx].clone()));
            v
        })
        .collect();
    if gauss_full_pivot(&mut aug, r) != r {
        return Err(OracleError::Singular);
    }
    let mut entries = Matrix::filled(r, e, Rational::zero());
    for rhs in 0..e {
        for row in (0..r).rev() {
            let mut acc = aug[row][r + rhs].clone();
            for k in row + 1..r {
                acc -= &aug[row][k] * entries.at(k, rhs);
            }
            entries.set(row, rhs, acc / &aug[row][row]);
        }
    }

    // Defining-equation residual: P · (inputs stacked with outputs) = 0 for
    // every input basis vector.
    for basis in 0..e {
        for row in 0..c {
            let mut acc = system[row][in_cols[basis]].clone();
            for (k, &cx) in out_cols.iter().enumerate() {
                acc += &system[row][cx] * entries.at(k, basis);
            }
            if !acc.is_zero() {
                return Err(OracleError::ResidualNonzero);
            }
        }
    }

    Ok(OracleResult {
        entries,
        outputs,
        inputs,
        rank,
        dof,
    })
}

/// Row echelon with largest-entry pivoting; returns the rank. Only the
/// first `width` columns are eligible for pivots.
fn gauss_full_pivot(rows: &mut [Vec<Rational>], width: usize) -> usize {
    let n = rows.len();
    let mut next = 0usize;
    for col in 0..width {
        if next == n {
            break;
        }
        let pivot_row = (next..n)
            .filter(|&r| !rows[r][col].is_zero())
            .max_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
        let Some(pivot_row) = pivot_row else {
            continue;
        };
        rows.swap(next, pivot_row);
        for r in next + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[next][col];
            for cx in col..rows[r].len() {
                let v = &rows[r][cx] - &factor * &rows[next][cx];
                rows[r][cx] = v;
            }
        }
        next += 1;
    }
    next
}
