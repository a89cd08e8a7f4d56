//! Screw-theoretic velocity analysis on the mechanism digraph.
//!
//! Every turning joint carries a screw: its axis direction in the base frame
//! and, per cycle, the moment of that axis about the cycle's pitch point.
//! Under the y-z-plane model the moment has a single nonzero component, the
//! scalar coefficient `P = Δz·sinφ + Δy·cosφ`, so each fundamental cycle
//! contributes one linear equation over the turning-pair rates. Partitioning
//! those equations by the declared inputs and solving exactly yields the
//! transfer matrix.

use thiserror::Error;

use crate::algebra::matrix::{pivot_columns_in_order, solve_linear, Matrix};
use crate::algebra::trig::Angle;
use crate::algebra::{AlgebraError, Scalar, SymbolId, SymbolTable};
use crate::digraph::GraphMatrices;
use crate::mechanism::{GearMesh, JointId, Mechanism, MechanismError, TurningJoint};

use std::collections::BTreeMap;

#[derive(Debug, Error)]
pub enum MatroidError {
    #[error("P_r singular: chosen inputs do not determine the mechanism (dependent output joints: {joints:?})")]
    SingularInputs { joints: Vec<u32> },
    #[error("cycle {cycle}, joint {joint}: moment coefficient is not ± a pitch radius of the mesh; gear-ratio form unavailable")]
    NotRatioExpressible { cycle: u32, joint: u32 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

/// Screw of a joint axis relative to one cycle's pitch point:
/// direction `(L, M, N) = (0, -sinφ, cosφ)` and moment `(P, Q, R)` with
/// `Q = R = 0` under the y-z-plane model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScrewAxis {
    pub direction: [Scalar; 3],
    pub moment: [Scalar; 3],
}

/// Axis direction of a joint in the base frame.
pub fn joint_unit_vector(phi: &Angle) -> [Scalar; 3] {
    [
        Scalar::zero(),
        Scalar::from_rational(-phi.sin().clone()),
        Scalar::from_rational(phi.cos().clone()),
    ]
}

/// Moment coefficient of a joint axis about a mesh's pitch point:
/// `(z_k - z_c)·sinφ_k + (y_k - y_c)·cosφ_k`.
pub fn moment_coefficient(mesh: &GearMesh, joint: &TurningJoint) -> Scalar {
    let dy = joint.y.sub(&mesh.y);
    let dz = joint.z.sub(&mesh.z);
    let sin = Scalar::from_rational(joint.phi.sin().clone());
    let cos = Scalar::from_rational(joint.phi.cos().clone());
    dz.mul(&sin).add(&dy.mul(&cos))
}

/// Full screw of a joint relative to a cycle, moment computed as the cross
/// product of the distance vector with the axis direction.
pub fn screw_axis(mesh: &GearMesh, joint: &TurningJoint) -> ScrewAxis {
    let direction = joint_unit_vector(&joint.phi);
    let l = [
        Scalar::zero(), // both points lie in the y-z plane
        joint.y.sub(&mesh.y),
        joint.z.sub(&mesh.z),
    ];
    ScrewAxis {
        moment: cross(&l, &direction),
        direction,
    }
}

fn cross(a: &[Scalar; 3], b: &[Scalar; 3]) -> [Scalar; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// The cycle moment equations: one row per mesh cycle, one column per
/// turning joint; nonzero exactly where the spanning-tree matrix is.
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub entries: Matrix<Scalar>,
    /// Row labels: mesh ids, ascending.
    pub cycles: Vec<JointId>,
    /// Column labels: turning-joint ids, ascending.
    pub joints: Vec<JointId>,
}

pub fn coefficient_matrix(m: &Mechanism, gm: &GraphMatrices) -> CoefficientMatrix {
    let c = m.mesh_count();
    let t = m.turning_count();
    let mut entries = Matrix::zeros(c, t);
    for (row, mesh) in m.meshes().iter().enumerate() {
        for (col, joint) in m.turning_joints().iter().enumerate() {
            let tree_sign = *gm.spanning_tree.at(row, col);
            if tree_sign == 0 {
                continue;
            }
            let p = moment_coefficient(mesh, joint);
            entries.set(row, col, Scalar::from_integer(tree_sign).mul(&p));
        }
    }
    CoefficientMatrix {
        entries,
        cycles: gm.mesh_cycles.clone(),
        joints: gm.turning.clone(),
    }
}

/// Exact linear map from input joint velocities to output joint velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: Matrix<Scalar>,
    /// Row labels: output turning joints.
    pub outputs: Vec<JointId>,
    /// Column labels: input turning joints.
    pub inputs: Vec<JointId>,
}

impl TransferMatrix {
    /// Row of a given output joint.
    pub fn row_for(&self, output: JointId) -> Option<&[Scalar]> {
        self.outputs
            .iter()
            .position(|&j| j == output)
            .map(|r| self.entries.row(r))
    }
}

/// Solves the partitioned cycle equations for the output velocities.
pub fn solve_transfer(
    m: &Mechanism,
    pm: &CoefficientMatrix,
) -> Result<TransferMatrix, MatroidError> {
    let inputs = m.input_joints();
    let outputs = m.output_joints();
    let col_of = |id: JointId| pm.joints.iter().position(|&j| j == id).expect("known joint");
    let input_cols: Vec<usize> = inputs.iter().map(|&j| col_of(j)).collect();
    let output_cols: Vec<usize> = outputs.iter().map(|&j| col_of(j)).collect();
    let p_r = pm.entries.select_columns(&output_cols);
    let p_e = pm.entries.select_columns(&input_cols);
    let x = solve_linear(&p_r, &p_e.neg()).map_err(|e| match e {
        AlgebraError::SingularSystem(_) => singular_inputs(&p_r, &outputs),
        other => MatroidError::Algebra(other),
    })?;
    Ok(TransferMatrix {
        entries: x,
        outputs,
        inputs,
    })
}

fn singular_inputs(p_r: &Matrix<Scalar>, outputs: &[JointId]) -> MatroidError {
    let order: Vec<usize> = (0..p_r.cols()).collect();
    let pivots = pivot_columns_in_order(p_r, &order);
    let joints: Vec<u32> = (0..p_r.cols())
        .filter(|c| !pivots.contains(c))
        .map(|c| outputs[c].0)
        .collect();
    MatroidError::SingularInputs { joints }
}

/// The cycle equations rewritten over per-mesh gear-ratio symbols
/// `i<mesh>`: each row is scaled by the head pitch radius, turning every
/// entry into 0, ±1 or ±i. Columns are reordered inputs-first.
#[derive(Debug, Clone)]
pub struct RatioSystem {
    pub entries: Matrix<Scalar>,
    pub cycles: Vec<JointId>,
    /// Column labels: input joints ascending, then output joints ascending.
    pub joints: Vec<JointId>,
    pub table: SymbolTable,
    /// Gear-ratio symbol of each mesh, ascending mesh id.
    pub mesh_symbols: Vec<(JointId, SymbolId)>,
}

/// Whether two joints share one axis line in space (directions parallel and
/// the connecting vector along them).
fn same_axis_line(a: &TurningJoint, b: &TurningJoint) -> bool {
    let sin_a = Scalar::from_rational(a.phi.sin().clone());
    let cos_a = Scalar::from_rational(a.phi.cos().clone());
    let sin_b = Scalar::from_rational(b.phi.sin().clone());
    let cos_b = Scalar::from_rational(b.phi.cos().clone());
    if !sin_a.mul(&cos_b).sub(&cos_a.mul(&sin_b)).is_zero() {
        return false;
    }
    let dy = b.y.sub(&a.y);
    let dz = b.z.sub(&a.z);
    dy.mul(&cos_a).add(&dz.mul(&sin_a)).is_zero()
}

pub fn ratio_system(
    m: &Mechanism,
    gm: &GraphMatrices,
    pm: &CoefficientMatrix,
) -> Result<RatioSystem, MatroidError> {
    let mut table = SymbolTable::new();
    let mut mesh_symbols = Vec::with_capacity(m.mesh_count());
    for mesh in m.meshes() {
        let sym = table
            .intern(&format!("i{}", mesh.id))
            .expect("generated ratio symbol");
        mesh_symbols.push((mesh.id, sym));
    }

    let inputs = m.input_joints();
    let outputs = m.output_joints();
    let joints: Vec<JointId> = inputs.iter().chain(outputs.iter()).copied().collect();
    let column_of: std::collections::BTreeMap<JointId, usize> = joints
        .iter()
        .enumerate()
        .map(|(i, &j)| (j, i))
        .collect();
    let half = Scalar::from_rational(crate::algebra::Rational::new(1.into(), 2.into()));

    let mut entries = Matrix::zeros(m.mesh_count(), joints.len());
    for (row, mesh) in m.meshes().iter().enumerate() {
        let radius_tail = mesh.diameter_tail.mul(&half);
        let radius_head = mesh.diameter_head.mul(&half);
        let ratio = Scalar::symbol(mesh_symbols[row].1);

        // Walk the tree path tail -> head and split it where the axis line
        // changes: the prefix is coaxial with the tail gear, the rest must
        // be coaxial with the head gear. The split is topological, so equal
        // tail/head diameters cannot confuse the side assignment.
        let path: Vec<&TurningJoint> = m
            .tree_path(mesh.tail, mesh.head)
            .into_iter()
            .map(|(j, _)| m.turning_by_id(j).expect("tree joint"))
            .collect();
        let first = path[0];
        let last = *path.last().expect("nonempty cycle path");
        let mut split = 1;
        while split < path.len() && same_axis_line(first, path[split]) {
            split += 1;
        }
        if split == path.len() && path.len() > 1 {
            // Both gears sit on one axis line, so geometry cannot place the
            // boundary; a single axis-label change does.
            let changes: Vec<usize> = (1..path.len())
                .filter(|&i| path[i].axis != path[i - 1].axis)
                .collect();
            if let [k] = changes.as_slice() {
                split = *k;
            }
        }
        for joint in path.iter().skip(split) {
            if !same_axis_line(last, joint) {
                return Err(MatroidError::NotRatioExpressible {
                    cycle: mesh.id.0,
                    joint: joint.id.0,
                });
            }
        }

        for (idx, joint) in path.iter().enumerate() {
            let col = gm.tree_column(joint.id).expect("known joint");
            let tree_sign = *gm.spanning_tree.at(row, col);
            debug_assert_ne!(tree_sign, 0);
            // Recover P from the coefficient entry (tree_sign is ±1).
            let p = Scalar::from_integer(tree_sign).mul(pm.entries.at(row, col));
            let (expected, scaled) = if idx < split {
                (&radius_tail, ratio.clone())
            } else {
                (&radius_head, Scalar::one())
            };
            let factor = if p == *expected {
                scaled
            } else if p == expected.neg() {
                scaled.neg()
            } else {
                return Err(MatroidError::NotRatioExpressible {
                    cycle: mesh.id.0,
                    joint: joint.id.0,
                });
            };
            entries.set(
                row,
                column_of[&joint.id],
                Scalar::from_integer(tree_sign).mul(&factor),
            );
        }
    }
    Ok(RatioSystem {
        entries,
        cycles: gm.mesh_cycles.clone(),
        joints,
        table,
        mesh_symbols,
    })
}

/// Solves the gear-ratio form of the system; entries of the result live in
/// `rs.table`.
pub fn solve_transfer_ratios(
    m: &Mechanism,
    rs: &RatioSystem,
) -> Result<TransferMatrix, MatroidError> {
    let inputs = m.input_joints();
    let outputs = m.output_joints();
    let e = inputs.len();
    let p_e = rs.entries.select_columns(&(0..e).collect::<Vec<_>>());
    let p_r = rs
        .entries
        .select_columns(&(e..rs.joints.len()).collect::<Vec<_>>());
    let x = solve_linear(&p_r, &p_e.neg()).map_err(|err| match err {
        AlgebraError::SingularSystem(_) => singular_inputs(&p_r, &outputs),
        other => MatroidError::Algebra(other),
    })?;
    Ok(TransferMatrix {
        entries: x,
        outputs,
        inputs,
    })
}

/// A full rate assignment: scalar rates for turning joints, base-frame
/// angular-velocity vectors for mesh pairs.
#[derive(Debug, Clone, Default)]
pub struct JointRates {
    pub turning: BTreeMap<JointId, Scalar>,
    pub mesh: BTreeMap<JointId, [Scalar; 3]>,
}

/// Relative angular velocity of a mesh pair as a base-frame vector:
/// `-Σ_k T(cycle, k) · u_k · θ̇_k`. Missing rates are treated as zero.
pub fn mesh_relative_velocity(
    m: &Mechanism,
    gm: &GraphMatrices,
    mesh_id: JointId,
    rates: &BTreeMap<JointId, Scalar>,
) -> [Scalar; 3] {
    let row = gm.cycle_row(mesh_id).expect("known mesh");
    let mut out = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for (col, joint) in m.turning_joints().iter().enumerate() {
        let sign = *gm.spanning_tree.at(row, col);
        if sign == 0 {
            continue;
        }
        let Some(rate) = rates.get(&joint.id) else {
            continue;
        };
        let u = joint_unit_vector(&joint.phi);
        let factor = Scalar::from_integer(sign).mul(rate);
        for (o, u_i) in out.iter_mut().zip(u.iter()) {
            *o = o.sub(&factor.mul(u_i));
        }
    }
    out
}

/// Per-cycle sum of signed twists: six components each, exactly zero iff the
/// rate assignment is kinematically consistent.
pub fn closure_residual(m: &Mechanism, gm: &GraphMatrices, rates: &JointRates) -> Vec<[Scalar; 6]> {
    let mut residuals = Vec::with_capacity(m.mesh_count());
    for (row, mesh) in m.meshes().iter().enumerate() {
        let mut res = std::array::from_fn::<Scalar, 6, _>(|_| Scalar::zero());
        for (col, joint) in m.turning_joints().iter().enumerate() {
            let sign = *gm.spanning_tree.at(row, col);
            if sign == 0 {
                continue;
            }
            let Some(rate) = rates.turning.get(&joint.id) else {
                continue;
            };
            let screw = screw_axis(mesh, joint);
            let factor = Scalar::from_integer(sign).mul(rate);
            for i in 0..3 {
                res[i] = res[i].add(&factor.mul(&screw.direction[i]));
                res[i + 3] = res[i + 3].add(&factor.mul(&screw.moment[i]));
            }
        }
        // The mesh edge itself: cycle entry +1, moment zero about its own
        // pitch point.
        if let Some(w) = rates.mesh.get(&mesh.id) {
            for i in 0..3 {
                res[i] = res[i].add(&w[i]);
            }
        }
        residuals.push(res);
    }
    residuals
}

/// Completes an input-rate assignment into a full consistent assignment:
/// outputs through the transfer matrix, mesh rates through the cycle sums.
pub fn consistent_rates(
    m: &Mechanism,
    gm: &GraphMatrices,
    transfer: &TransferMatrix,
    input_rates: &BTreeMap<JointId, Scalar>,
) -> JointRates {
    let mut turning = input_rates.clone();
    for (r, &out) in transfer.outputs.iter().enumerate() {
        let mut acc = Scalar::zero();
        for (c, inp) in transfer.inputs.iter().enumerate() {
            let rate = input_rates.get(inp).cloned().unwrap_or_else(Scalar::zero);
            acc = acc.add(&transfer.entries.at(r, c).mul(&rate));
        }
        turning.insert(out, acc);
    }
    let mesh = m
        .meshes()
        .iter()
        .map(|g| (g.id, mesh_relative_velocity(m, gm, g.id, &turning)))
        .collect();
    JointRates { turning, mesh }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use crate::mechanism::load_mechanism;

    fn fixture(name: &str) -> String {
        let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
    }

    fn grm() -> (Mechanism, GraphMatrices) {
        let m = load_mechanism(&fixture("grm.json")).unwrap();
        let gm = GraphMatrices::build(&m).unwrap();
        (m, gm)
    }

    fn half() -> Scalar {
        Scalar::from_rational(Rational::new(1.into(), 2.into()))
    }

    #[test]
    fn unit_vectors_for_exact_angles() {
        let zero = Scalar::zero();
        let one = Scalar::one();
        assert_eq!(
            joint_unit_vector(&Angle::from_integer_degrees(0)),
            [zero.clone(), zero.clone(), one.clone()]
        );
        assert_eq!(
            joint_unit_vector(&Angle::from_integer_degrees(-90)),
            [zero.clone(), one.clone(), zero.clone()]
        );
        assert_eq!(
            joint_unit_vector(&Angle::from_integer_degrees(180)),
            [zero.clone(), zero.clone(), one.neg()]
        );
    }

    #[test]
    fn grm_moment_coefficients() {
        let (m, _) = grm();
        let sym = |n: &str| Scalar::symbol(m.symbols().get(n).unwrap());
        let p = |mesh: u32, joint: u32| {
            moment_coefficient(
                m.mesh_by_id(JointId(mesh)).unwrap(),
                m.turning_by_id(JointId(joint)).unwrap(),
            )
        };
        assert_eq!(p(15, 8), sym("d4").mul(&half()).neg());
        assert_eq!(p(15, 10), sym("d1").mul(&half()));
        assert_eq!(p(16, 9), sym("d5").mul(&half()));
        assert_eq!(p(16, 10), sym("d5").mul(&half()));
        assert_eq!(p(16, 12), sym("d2").mul(&half()).neg());
        assert_eq!(p(17, 11), sym("d6").mul(&half()));
        assert_eq!(p(17, 12), sym("d6").mul(&half()));
        assert_eq!(p(17, 13), sym("d7p").mul(&half()).neg());
        assert_eq!(p(18, 13), sym("d7pp").mul(&half()).neg());
        assert_eq!(p(18, 14), sym("d3").mul(&half()).neg());
    }

    #[test]
    fn coincident_joint_has_zero_moment() {
        let (m, _) = grm();
        let mesh = m.mesh_by_id(JointId(15)).unwrap();
        let mut joint = m.turning_by_id(JointId(8)).unwrap().clone();
        joint.y = mesh.y.clone();
        joint.z = mesh.z.clone();
        assert!(moment_coefficient(mesh, &joint).is_zero());
    }

    #[test]
    fn screw_moment_is_first_component_only() {
        let (m, _) = grm();
        let mesh = m.mesh_by_id(JointId(16)).unwrap();
        let joint = m.turning_by_id(JointId(12)).unwrap();
        let screw = screw_axis(mesh, joint);
        assert_eq!(screw.moment[0], moment_coefficient(mesh, joint));
        assert!(screw.moment[1].is_zero());
        assert!(screw.moment[2].is_zero());
        // direction components for phi = -90
        assert_eq!(
            screw.direction,
            [Scalar::zero(), Scalar::one(), Scalar::zero()]
        );
    }

    #[test]
    fn grm_coefficient_matrix_structure_and_values() {
        let (m, gm) = grm();
        let pm = coefficient_matrix(&m, &gm);
        let sym = |n: &str| Scalar::symbol(m.symbols().get(n).unwrap());
        let rad = |n: &str| sym(n).mul(&half());
        let z = Scalar::zero;
        let expected = [
            [rad("d4").neg(), z(), rad("d1").neg(), z(), z(), z(), z()],
            [z(), rad("d5"), rad("d5").neg(), z(), rad("d2"), z(), z()],
            [z(), z(), z(), rad("d6"), rad("d6").neg(), rad("d7p"), z()],
            [z(), z(), z(), z(), z(), rad("d7pp").neg(), rad("d3")],
        ];
        for r in 0..4 {
            for c in 0..7 {
                assert_eq!(
                    *pm.entries.at(r, c),
                    expected[r][c],
                    "entry ({r}, {c})"
                );
            }
        }
        // Structure inherited from the spanning tree.
        for r in 0..4 {
            for c in 0..7 {
                assert_eq!(
                    pm.entries.at(r, c).is_zero(),
                    *gm.spanning_tree.at(r, c) == 0,
                    "sparsity at ({r}, {c})"
                );
            }
        }
    }

    #[test]
    fn one_mesh_coefficient_row() {
        let m = load_mechanism(&fixture("minimal_pair.json")).unwrap();
        let gm = GraphMatrices::build(&m).unwrap();
        let pm = coefficient_matrix(&m, &gm);
        let sym = |n: &str| Scalar::symbol(m.symbols().get(n).unwrap());
        assert_eq!(*pm.entries.at(0, 0), sym("dA").mul(&half()).neg());
        assert_eq!(*pm.entries.at(0, 1), sym("dB").mul(&half()).neg());
    }

    #[test]
    fn grm_ratio_system_matches_partitioned_form() {
        let (m, gm) = grm();
        let pm = coefficient_matrix(&m, &gm);
        let rs = ratio_system(&m, &gm, &pm).unwrap();
        assert_eq!(
            rs.joints,
            [8, 9, 11, 10, 12, 13, 14].map(JointId).to_vec()
        );
        let i = |n: &str| Scalar::symbol(rs.table.get(n).unwrap());
        let one = Scalar::one;
        let z = Scalar::zero;
        let expected = [
            [i("i15").neg(), z(), z(), one().neg(), z(), z(), z()],
            [z(), i("i16"), z(), i("i16").neg(), one(), z(), z()],
            [z(), z(), i("i17"), z(), i("i17").neg(), one(), z()],
            [z(), z(), z(), z(), z(), i("i18").neg(), one()],
        ];
        for r in 0..4 {
            for c in 0..7 {
                assert_eq!(*rs.entries.at(r, c), expected[r][c], "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn grm_symbolic_transfer_in_diameters() {
        let (m, gm) = grm();
        let pm = coefficient_matrix(&m, &gm);
        let x = solve_transfer(&m, &pm).unwrap();
        assert_eq!(x.outputs, [10, 12, 13, 14].map(JointId).to_vec());
        assert_eq!(x.inputs, [8, 9, 11].map(JointId).to_vec());
        let sym = |n: &str| Scalar::symbol(m.symbols().get(n).unwrap());
        let ratio = |a: &str, b: &str| sym(a).checked_div(&sym(b)).unwrap();
        let i15 = ratio("d4", "d1");
        let i16 = ratio("d5", "d2");
        let i17 = ratio("d6", "d7p");
        let i18 = ratio("d7pp", "d3");
        let z = Scalar::zero;
        let expected = [
            [i15.neg(), z(), z()],
            [i16.mul(&i15).neg(), i16.neg(), z()],
            [
                i17.mul(&i16).mul(&i15).neg(),
                i17.mul(&i16).neg(),
                i17.neg(),
            ],
            [
                i18.mul(&i17).mul(&i16).mul(&i15).neg(),
                i18.mul(&i17).mul(&i16).neg(),
                i18.mul(&i17).neg(),
            ],
        ];
        for r in 0..4 {
            for c in 0..3 {
                assert_eq!(*x.entries.at(r, c), expected[r][c], "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn grm_numeric_evaluation_matches_hand_values() {
        let (m, gm) = grm();
        let pm = coefficient_matrix(&m, &gm);
        let x = solve_transfer(&m, &pm).unwrap();
        let mut b = crate::algebra::Bindings::new(m.symbols());
        for (name, val) in [
            ("d1", 2),
            ("d2", 3),
            ("d3", 4),
            ("d4", 5),
            ("d5", 6),
            ("d6", 7),
            ("d7p", 8),
            ("d7pp", 9),
        ] {
            b.set_by_name(name, Rational::from_integer(val.into())).unwrap();
        }
        let rat = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let expected = [
            [rat(-5, 2), rat(0, 1), rat(0, 1)],
            [rat(-5, 1), rat(-2, 1), rat(0, 1)],
            [rat(-35, 8), rat(-7, 4), rat(-7, 8)],
            [rat(-315, 32), rat(-63, 16), rat(-63, 32)],
        ];
        for r in 0..4 {
            for c in 0..3 {
                assert_eq!(
                    x.entries.at(r, c).eval(&b).unwrap(),
                    expected[r][c],
                    "entry ({r}, {c})"
                );
            }
        }
    }

    #[test]
    fn one_mesh_transfer_is_minus_ratio() {
        let m = load_mechanism(&fixture("minimal_pair.json")).unwrap();
        let gm = GraphMatrices::build(&m).unwrap();
        let pm = coefficient_matrix(&m, &gm);
        let x = solve_transfer(&m, &pm).unwrap();
        let sym = |n: &str| Scalar::symbol(m.symbols().get(n).unwrap());
        assert_eq!(
            *x.entries.at(0, 0),
            sym("dA").checked_div(&sym("dB")).unwrap().neg()
        );
    }

    #[test]
    fn singular_input_choice_is_reported() {
        let (m, _) = grm();
        let bad = m
            .with_inputs([8, 9, 10].map(JointId).to_vec())
            .unwrap();
        let gm = GraphMatrices::build(&bad).unwrap();
        let pm = coefficient_matrix(&bad, &gm);
        match solve_transfer(&bad, &pm) {
            Err(MatroidError::SingularInputs { joints }) => {
                assert!(!joints.is_empty());
                assert!(joints.iter().all(|j| [11, 12, 13, 14].contains(j)));
            }
            other => panic!("expected singular-inputs error, got {other:?}"),
        }
    }

    #[test]
    fn mesh_velocity_single_term() {
        let (m, gm) = grm();
        let mut rates = BTreeMap::new();
        rates.insert(JointId(8), Scalar::one());
        let w = mesh_relative_velocity(&m, &gm, JointId(15), &rates);
        assert_eq!(w, [Scalar::zero(), Scalar::zero(), Scalar::one().neg()]);
    }

    #[test]
    fn mesh_velocity_matches_direct_cycle_sum() {
        // One-mesh fixture, arbitrary rates: the cycle sum is
        // -(θ̇3·(+1) + θ̇4·(-1))·(0,0,1) evaluated by hand.
        let m = load_mechanism(&fixture("minimal_pair.json")).unwrap();
        let gm = GraphMatrices::build(&m).unwrap();
        let r3 = Scalar::from_rational(Rational::new(2.into(), 3.into()));
        let r4 = Scalar::from_integer(-5);
        let mut rates = BTreeMap::new();
        rates.insert(JointId(3), r3.clone());
        rates.insert(JointId(4), r4.clone());
        let w = mesh_relative_velocity(&m, &gm, JointId(5), &rates);
        let expected_z = r3.sub(&r4).neg(); // -(2/3 + 5) = -17/3
        assert_eq!(w, [Scalar::zero(), Scalar::zero(), expected_z]);
    }

    #[test]
    fn mesh_velocity_zero_rates() {
        let (m, gm) = grm();
        let rates = BTreeMap::new();
        for mesh in m.meshes() {
            let w = mesh_relative_velocity(&m, &gm, mesh.id, &rates);
            assert!(w.iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn closure_holds_on_solved_rates_and_breaks_when_perturbed() {
        let (m, gm) = grm();
        let pm = coefficient_matrix(&m, &gm);
        let x = solve_transfer(&m, &pm).unwrap();
        let mut inputs = BTreeMap::new();
        inputs.insert(JointId(8), Scalar::one());
        inputs.insert(JointId(9), Scalar::zero());
        inputs.insert(JointId(11), Scalar::zero());
        let rates = consistent_rates(&m, &gm, &x, &inputs);
        for res in closure_residual(&m, &gm, &rates) {
            assert!(res.iter().all(Scalar::is_zero), "residual {res:?}");
        }
        // Perturbing one output must break at least one cycle.
        let mut broken = rates.clone();
        let r12 = broken.turning.get_mut(&JointId(12)).unwrap();
        *r12 = r12.add(&Scalar::one());
        let any_nonzero = closure_residual(&m, &gm, &broken)
            .iter()
            .any(|res| res.iter().any(|v| !v.is_zero()));
        assert!(any_nonzero);
    }

    #[test]
    fn all_zero_rates_close_trivially() {
        let (m, gm) = grm();
        let rates = JointRates::default();
        for res in closure_residual(&m, &gm, &rates) {
            assert!(res.iter().all(Scalar::is_zero));
        }
    }
}
