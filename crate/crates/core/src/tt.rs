//! T-T oriented-graph velocity analysis.
//!
//! Turning pairs form the tree; every gear pair closes one fundamental
//! circuit. For each mesh the carrier (transfer vertex) is the single
//! interior vertex of the tree path between the two gears where the axis
//! label changes. One terminal equation per mesh relates the two gears'
//! velocities about the carrier; f-circuit equations expand those port
//! velocities into signed sums of tree-edge velocities. The resulting
//! system is solved exactly over the gear-ratio symbols `n<tail><head>`.
//!
//! The graph alone does not carry the rotation-sense sign of a mesh: it is
//! taken from the file when declared, and otherwise derived from the mesh
//! geometry through the moment-coefficient construction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::matrix::{solve_linear, Matrix};
use crate::algebra::{AlgebraError, Bindings, Scalar, SymbolId, SymbolTable};
use crate::matroid::{moment_coefficient, TransferMatrix};
use crate::mechanism::{gear_ratio, GearMesh, JointId, LinkId, Mechanism, MechanismError, Sign};

#[derive(Debug, Error)]
pub enum TtError {
    #[error("degenerate mesh {mesh}: both gears on one axis (path {path})")]
    DegenerateMesh { mesh: u32, path: String },
    #[error("ambiguous carrier for mesh {mesh}: axis label changes more than once (path {path})")]
    AmbiguousCarrier { mesh: u32, path: String },
    #[error("mesh {mesh}: sign underivable; declare it ({detail})")]
    SignUnderivable { mesh: u32, detail: String },
    #[error("inputs do not determine the T-T network (dependent equations for meshes {meshes:?})")]
    Singular { meshes: Vec<u32> },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

/// A mesh with its carrier, axis labels, ratio symbol and resolved sign.
#[derive(Debug, Clone)]
pub struct MeshAssignment {
    pub mesh: JointId,
    pub tail_gear: LinkId,
    pub head_gear: LinkId,
    pub carrier: LinkId,
    /// Axis label of the tree edges between carrier and tail gear.
    pub tail_axis: String,
    /// Axis label of the tree edges between carrier and head gear.
    pub head_axis: String,
    /// The ratio symbol `n<tail><head>` as a scalar over the T-T table.
    pub ratio_symbol: Scalar,
    /// The same ratio over the mechanism's own symbols (tail diameter over
    /// head diameter), used to bind numeric values.
    pub ratio_value: Scalar,
    pub sign: Sign,
}

/// Velocity row of the terminal equation of one gear pair:
/// `ω(tail, carrier) = sign · n_head_over_tail · ω(head, carrier)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalEquation {
    pub mesh: JointId,
    /// (gear, carrier) of the left-hand port.
    pub tail_port: (LinkId, LinkId),
    /// (gear, carrier) of the right-hand port.
    pub head_port: (LinkId, LinkId),
    pub sign: Sign,
    pub ratio_head_over_tail: Scalar,
}

/// One mesh port's relative velocity expanded into signed tree-edge
/// velocities along the tree path carrier -> gear.
#[derive(Debug, Clone, PartialEq)]
pub struct FCircuitEquation {
    pub gear: LinkId,
    pub carrier: LinkId,
    pub terms: Vec<(JointId, i8)>,
}

/// Walks the tree path between a mesh's gears and returns the carrier: the
/// single interior vertex whose two incident path edges carry different axis
/// labels.
pub fn find_transfer_vertex(
    m: &Mechanism,
    mesh: &GearMesh,
) -> Result<(LinkId, String, String), TtError> {
    let hops = m.tree_path(mesh.tail, mesh.head);
    let mut links = vec![mesh.tail];
    let mut labels = Vec::with_capacity(hops.len());
    let mut current = mesh.tail;
    for (joint_id, sign) in &hops {
        let joint = m.turning_by_id(*joint_id).expect("tree joint");
        let next = if *sign > 0 { joint.head } else { joint.tail };
        debug_assert_ne!(next, current);
        links.push(next);
        labels.push(joint.axis.clone());
        current = next;
    }
    let path_str = render_path(&links, &labels);

    let mut changes: Vec<(LinkId, usize)> = Vec::new();
    for i in 1..labels.len() {
        if labels[i] != labels[i - 1] {
            changes.push((links[i], i));
        }
    }
    match changes.as_slice() {
        [] => Err(TtError::DegenerateMesh {
            mesh: mesh.id.0,
            path: path_str,
        }),
        [(carrier, i)] => Ok((*carrier, labels[i - 1].clone(), labels[*i].clone())),
        _ => Err(TtError::AmbiguousCarrier {
            mesh: mesh.id.0,
            path: path_str,
        }),
    }
}

fn render_path(links: &[LinkId], labels: &[String]) -> String {
    let mut out = String::new();
    for (i, link) in links.iter().enumerate() {
        if i > 0 {
            out.push_str(&format!(" -{}-> ", labels[i - 1]));
        }
        out.push_str(&link.to_string());
    }
    out
}

/// Sign of a mesh from its geometry: run the moment-coefficient
/// construction for the mesh's cycle and compare the signs of the
/// coefficients on the two sides of the carrier.
pub fn derive_mesh_sign(m: &Mechanism, mesh: &GearMesh) -> Result<Sign, TtError> {
    let (carrier, _, _) = find_transfer_vertex(m, mesh)?;
    let side_sign = |gear: LinkId| -> Result<i8, TtError> {
        let mut rep: Option<Scalar> = None;
        for (joint_id, _) in m.tree_path(carrier, gear) {
            let joint = m.turning_by_id(joint_id).expect("tree joint");
            let p = moment_coefficient(mesh, joint);
            match &rep {
                None => rep = Some(p),
                Some(first) if *first == p => {}
                Some(first) => {
                    return Err(TtError::SignUnderivable {
                        mesh: mesh.id.0,
                        detail: format!(
                            "coaxial joints disagree on the moment coefficient ({} vs {})",
                            first.render(m.symbols()),
                            p.render(m.symbols())
                        ),
                    })
                }
            }
        }
        let rep = rep.expect("carrier differs from gear");
        match rep.monomial_sign() {
            Some(s) if s != 0 => Ok(s),
            _ => Err(TtError::SignUnderivable {
                mesh: mesh.id.0,
                detail: format!(
                    "moment coefficient {} has no definite sign",
                    rep.render(m.symbols())
                ),
            }),
        }
    };
    let tail_side = side_sign(mesh.tail)?;
    let head_side = side_sign(mesh.head)?;
    Ok(if tail_side == head_side {
        Sign::Plus
    } else {
        Sign::Minus
    })
}

/// Declared sign when present, otherwise derived from geometry.
pub fn resolved_sign(m: &Mechanism, mesh: &GearMesh) -> Result<Sign, TtError> {
    match mesh.declared_sign {
        Some(s) => Ok(s),
        None => derive_mesh_sign(m, mesh),
    }
}

/// Carrier, ratio symbol and sign for every mesh, plus the fresh T-T symbol
/// table the ratio symbols live in.
pub fn mesh_assignments(m: &Mechanism) -> Result<(Vec<MeshAssignment>, SymbolTable), TtError> {
    let mut table = SymbolTable::new();
    let mut out = Vec::with_capacity(m.mesh_count());
    for mesh in m.meshes() {
        let (carrier, tail_axis, head_axis) = find_transfer_vertex(m, mesh)?;
        let base = format!("n{}{}", mesh.tail, mesh.head);
        let name = if table.contains(&base) {
            format!("{base}_{}", mesh.id)
        } else {
            base
        };
        let sym = table.intern(&name).expect("generated ratio symbol");
        out.push(MeshAssignment {
            mesh: mesh.id,
            tail_gear: mesh.tail,
            head_gear: mesh.head,
            carrier,
            tail_axis,
            head_axis,
            ratio_symbol: Scalar::symbol(sym),
            ratio_value: gear_ratio(mesh)?,
            sign: resolved_sign(m, mesh)?,
        });
    }
    Ok((out, table))
}

/// Velocity row of the terminal equation for one assignment.
pub fn terminal_equation(a: &MeshAssignment) -> Result<TerminalEquation, TtError> {
    Ok(TerminalEquation {
        mesh: a.mesh,
        tail_port: (a.tail_gear, a.carrier),
        head_port: (a.head_gear, a.carrier),
        sign: a.sign,
        ratio_head_over_tail: Scalar::one().checked_div(&a.ratio_symbol)?,
    })
}

/// F-circuit equations for both ports of every mesh, in mesh order
/// (tail port first).
pub fn f_circuit_equations(m: &Mechanism) -> Result<Vec<FCircuitEquation>, TtError> {
    let mut out = Vec::with_capacity(2 * m.mesh_count());
    for mesh in m.meshes() {
        let (carrier, _, _) = find_transfer_vertex(m, mesh)?;
        for gear in [mesh.tail, mesh.head] {
            out.push(FCircuitEquation {
                gear,
                carrier,
                terms: m.tree_path(carrier, gear),
            });
        }
    }
    Ok(out)
}

/// Solution of the T-T network: the transfer matrix over the ratio symbols,
/// with rows and columns ordered by the (head, tail) link pair of each
/// tree-edge velocity.
#[derive(Debug, Clone)]
pub struct TtSolution {
    pub transfer: TransferMatrix,
    pub table: SymbolTable,
    pub mesh_symbols: Vec<(JointId, SymbolId)>,
    pub assignments: Vec<MeshAssignment>,
}

impl TtSolution {
    /// Bindings for the ratio symbols, evaluated from the mechanism's own
    /// bindings (which may be empty when all diameters are numeric).
    pub fn ratio_bindings(&self, mech: &Bindings) -> Result<Bindings, AlgebraError> {
        let mut b = Bindings::new(&self.table);
        for ((_, sym), a) in self.mesh_symbols.iter().zip(&self.assignments) {
            b.set(*sym, a.ratio_value.eval(mech)?);
        }
        Ok(b)
    }
}

/// Assembles one linear equation per mesh (terminal equation with both
/// ports expanded by f-circuits) and solves exactly for the non-input
/// tree-edge velocities.
pub fn solve_tt(m: &Mechanism) -> Result<TtSolution, TtError> {
    let (assignments, table) = mesh_assignments(m)?;
    let joints = m.turning_joints();
    let col_of: BTreeMap<JointId, usize> =
        joints.iter().enumerate().map(|(i, j)| (j.id, i)).collect();

    // rows: ratio·ω(tail, carrier) - sign·ω(head, carrier) = 0, expanded
    // over tree-edge velocities.
    let mut system = Matrix::zeros(assignments.len(), joints.len());
    for (row, a) in assignments.iter().enumerate() {
        for (joint, s) in m.tree_path(a.carrier, a.tail_gear) {
            let c = col_of[&joint];
            let v = system
                .at(row, c)
                .add(&a.ratio_symbol.mul(&Scalar::from_integer(s as i64)));
            system.set(row, c, v);
        }
        let sign = Scalar::from_integer(a.sign.value());
        for (joint, s) in m.tree_path(a.carrier, a.head_gear) {
            let c = col_of[&joint];
            let v = system
                .at(row, c)
                .sub(&sign.mul(&Scalar::from_integer(s as i64)));
            system.set(row, c, v);
        }
    }

    // Order both variable groups by the (head, tail) link pair, the natural
    // key of a tree-edge velocity.
    let pair_key = |id: JointId| {
        let j = m.turning_by_id(id).expect("turning joint");
        (j.head.0, j.tail.0)
    };
    let mut inputs = m.input_joints();
    inputs.sort_by_key(|&id| pair_key(id));
    let mut outputs = m.output_joints();
    outputs.sort_by_key(|&id| pair_key(id));

    let input_cols: Vec<usize> = inputs.iter().map(|id| col_of[id]).collect();
    let output_cols: Vec<usize> = outputs.iter().map(|id| col_of[id]).collect();
    let a_mat = system.select_columns(&output_cols);
    let b_mat = system.select_columns(&input_cols);
    let x = solve_linear(&a_mat, &b_mat.neg()).map_err(|e| match e {
        AlgebraError::SingularSystem(rows) => TtError::Singular {
            meshes: rows.iter().map(|&r| assignments[r].mesh.0).collect(),
        },
        other => TtError::Algebra(other),
    })?;

    let mesh_symbols = assignments
        .iter()
        .map(|a| {
            let sym = match &a.ratio_symbol {
                Scalar::Symbolic(rf) => rf.symbols()[0],
                Scalar::Rational(_) => unreachable!("ratio symbols are symbolic"),
            };
            (a.mesh, sym)
        })
        .collect();

    Ok(TtSolution {
        transfer: TransferMatrix {
            entries: x,
            outputs,
            inputs,
        },
        table,
        mesh_symbols,
        assignments,
    })
}

/// `w<head><tail>` display label of a tree-edge velocity.
pub fn velocity_label(m: &Mechanism, id: JointId) -> String {
    let j = m.turning_by_id(id).expect("turning joint");
    format!("w{}{}", j.head, j.tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::load_mechanism;

    fn fixture(name: &str) -> String {
        let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
    }

    fn grm() -> Mechanism {
        load_mechanism(&fixture("grm.json")).unwrap()
    }

    #[test]
    fn grm_transfer_vertices() {
        let m = grm();
        let expected = [
            (15, 0, "a", "b"),
            (16, 1, "b", "c"),
            (17, 2, "c", "d"),
            (18, 2, "d", "e"),
        ];
        for (mesh_id, carrier, tail_axis, head_axis) in expected {
            let mesh = m.mesh_by_id(JointId(mesh_id)).unwrap();
            let (c, ta, ha) = find_transfer_vertex(&m, mesh).unwrap();
            assert_eq!(c, LinkId(carrier), "mesh {mesh_id} carrier");
            assert_eq!(ta, tail_axis, "mesh {mesh_id} tail axis");
            assert_eq!(ha, head_axis, "mesh {mesh_id} head axis");
        }
    }

    #[test]
    fn coaxial_mesh_is_degenerate() {
        let m = load_mechanism(&fixture("minimal_coaxial.json")).unwrap();
        let mesh = m.mesh_by_id(JointId(5)).unwrap();
        match find_transfer_vertex(&m, mesh) {
            Err(TtError::DegenerateMesh { mesh: 5, path }) => {
                assert!(path.contains("-a->"), "path rendering: {path}");
            }
            other => panic!("expected degenerate mesh, got {other:?}"),
        }
    }

    #[test]
    fn two_label_changes_are_ambiguous() {
        // 1 -a- 0 -b- 2 -c- 3 with a mesh (1, 3): labels change twice.
        let text = r#"{
            "name": "ambiguous",
            "links": [{"id": 0}, {"id": 1}, {"id": 2}, {"id": 3}],
            "turning_joints": [
                {"id": 4, "tail": 0, "head": 1, "axis": "a", "phi_deg": 0, "y": 0, "z": 0},
                {"id": 5, "tail": 0, "head": 2, "axis": "b", "phi_deg": 0, "y": 4, "z": 0},
                {"id": 6, "tail": 2, "head": 3, "axis": "c", "phi_deg": 0, "y": 8, "z": 0}
            ],
            "gear_meshes": [
                {"id": 7, "tail": 1, "head": 3, "d_tail": 2, "d_head": 2, "phi_deg": 0, "y": 1, "z": 0}
            ],
            "inputs": [4, 5]
        }"#;
        let m = load_mechanism(text).unwrap();
        let mesh = m.mesh_by_id(JointId(7)).unwrap();
        assert!(matches!(
            find_transfer_vertex(&m, mesh),
            Err(TtError::AmbiguousCarrier { mesh: 7, .. })
        ));
    }

    #[test]
    fn grm_derived_signs() {
        let m = grm();
        let expected = [
            (15, Sign::Minus),
            (16, Sign::Minus),
            (17, Sign::Minus),
            (18, Sign::Plus),
        ];
        for (mesh_id, sign) in expected {
            let mesh = m.mesh_by_id(JointId(mesh_id)).unwrap();
            assert_eq!(derive_mesh_sign(&m, mesh).unwrap(), sign, "mesh {mesh_id}");
        }
    }

    #[test]
    fn declared_sign_takes_precedence() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["gear_meshes"][0]["sign"] = serde_json::json!(1);
        let m = load_mechanism(&doc.to_string()).unwrap();
        let mesh = m.mesh_by_id(JointId(15)).unwrap();
        // geometry says Minus, the declaration says Plus; declaration wins
        assert_eq!(derive_mesh_sign(&m, mesh).unwrap(), Sign::Minus);
        assert_eq!(resolved_sign(&m, mesh).unwrap(), Sign::Plus);
    }

    #[test]
    fn grm_terminal_equations() {
        let m = grm();
        let (assignments, table) = mesh_assignments(&m).unwrap();
        let names: Vec<_> = table.names().collect();
        assert_eq!(names, vec!["n41", "n52", "n67", "n73"]);

        let eq15 = terminal_equation(&assignments[0]).unwrap();
        assert_eq!(eq15.tail_port, (LinkId(4), LinkId(0)));
        assert_eq!(eq15.head_port, (LinkId(1), LinkId(0)));
        assert_eq!(eq15.sign, Sign::Minus);
        assert_eq!(
            eq15.ratio_head_over_tail,
            Scalar::one()
                .checked_div(&Scalar::symbol(table.get("n41").unwrap()))
                .unwrap()
        );

        let eq18 = terminal_equation(&assignments[3]).unwrap();
        assert_eq!(eq18.tail_port, (LinkId(7), LinkId(2)));
        assert_eq!(eq18.head_port, (LinkId(3), LinkId(2)));
        assert_eq!(eq18.sign, Sign::Plus);
    }

    #[test]
    fn unit_ratio_couples_ports_identically() {
        let m = grm();
        let (assignments, _) = mesh_assignments(&m).unwrap();
        let mut a = assignments[3].clone();
        a.ratio_symbol = Scalar::one();
        a.sign = Sign::Plus;
        let eq = terminal_equation(&a).unwrap();
        assert_eq!(eq.ratio_head_over_tail, Scalar::one());
        assert_eq!(eq.sign, Sign::Plus);
    }

    #[test]
    fn grm_f_circuit_equations() {
        let m = grm();
        let eqs = f_circuit_equations(&m).unwrap();
        assert_eq!(eqs.len(), 8);
        let find = |gear: u32, carrier: u32| {
            eqs.iter()
                .find(|e| e.gear == LinkId(gear) && e.carrier == LinkId(carrier))
                .unwrap_or_else(|| panic!("port ({gear}, {carrier})"))
        };
        // two-term expansions
        assert_eq!(find(5, 1).terms, vec![(JointId(10), -1), (JointId(9), 1)]);
        assert_eq!(find(6, 2).terms, vec![(JointId(12), -1), (JointId(11), 1)]);
        // single-edge identities
        assert_eq!(find(4, 0).terms, vec![(JointId(8), 1)]);
        assert_eq!(find(1, 0).terms, vec![(JointId(10), 1)]);
        assert_eq!(find(2, 1).terms, vec![(JointId(12), 1)]);
        assert_eq!(find(7, 2).terms, vec![(JointId(13), 1)]);
        assert_eq!(find(3, 2).terms, vec![(JointId(14), 1)]);
    }

    #[test]
    fn grm_tt_transfer_matrix() {
        let m = grm();
        let sol = solve_tt(&m).unwrap();
        // rows in (head, tail) order: w10, w21, w32, w72
        assert_eq!(
            sol.transfer.outputs,
            [10, 12, 14, 13].map(JointId).to_vec()
        );
        assert_eq!(sol.transfer.inputs, [8, 9, 11].map(JointId).to_vec());
        let n = |name: &str| Scalar::symbol(sol.table.get(name).unwrap());
        let (n41, n52, n67, n73) = (n("n41"), n("n52"), n("n67"), n("n73"));
        let z = Scalar::zero;
        let expected = [
            [n41.neg(), z(), z()],
            [n52.mul(&n41).neg(), n52.neg(), z()],
            [
                n73.mul(&n67).mul(&n52).mul(&n41).neg(),
                n73.mul(&n67).mul(&n52).neg(),
                n73.mul(&n67).neg(),
            ],
            [
                n67.mul(&n52).mul(&n41).neg(),
                n67.mul(&n52).neg(),
                n67.neg(),
            ],
        ];
        for r in 0..4 {
            for c in 0..3 {
                assert_eq!(
                    *sol.transfer.entries.at(r, c),
                    expected[r][c],
                    "entry ({r}, {c})"
                );
            }
        }
    }

    #[test]
    fn one_mesh_tt_solution() {
        let m = load_mechanism(&fixture("minimal_pair.json")).unwrap();
        let sol = solve_tt(&m).unwrap();
        assert_eq!(sol.transfer.outputs, vec![JointId(4)]);
        let n12 = Scalar::symbol(sol.table.get("n12").unwrap());
        assert_eq!(*sol.transfer.entries.at(0, 0), n12.neg());
        assert_eq!(sol.assignments[0].sign, Sign::Minus);
    }

    #[test]
    fn velocity_labels() {
        let m = grm();
        assert_eq!(velocity_label(&m, JointId(10)), "w10");
        assert_eq!(velocity_label(&m, JointId(13)), "w72");
        assert_eq!(velocity_label(&m, JointId(14)), "w32");
    }
}
