//! The validated mechanism model: links, turning pairs (the spanning tree)
//! and gear meshes (the co-tree), with exact geometry.

mod schema;

use std::collections::BTreeSet;
use std::fmt;

use num::Signed;
use thiserror::Error;

use crate::algebra::expr::ExprError;
use crate::algebra::trig::Angle;
use crate::algebra::{AlgebraError, Scalar, SymbolTable};

pub use schema::load_mechanism;

/// Link index; 0 is always the ground link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

/// Joint index, shared between turning pairs and gear meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointId(pub u32);

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rotation-sense sign of a gear pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Link {
    pub id: LinkId,
    pub name: Option<String>,
}

/// A revolute joint; its axis lies in the base y-z plane, offset about the
/// base x-axis by `phi` and passing through `(0, y, z)`.
#[derive(Debug, Clone)]
pub struct TurningJoint {
    pub id: JointId,
    pub tail: LinkId,
    pub head: LinkId,
    pub axis: String,
    pub phi: Angle,
    pub y: Scalar,
    pub z: Scalar,
}

/// A gear-tooth contact between two links. Pitch diameters are per mesh, not
/// per link: a compound gear carries a different diameter at each mesh.
#[derive(Debug, Clone)]
pub struct GearMesh {
    pub id: JointId,
    pub tail: LinkId,
    pub head: LinkId,
    pub diameter_tail: Scalar,
    pub diameter_head: Scalar,
    pub teeth: Option<(u64, u64)>,
    pub phi: Angle,
    /// Pitch-point coordinates in the base y-z plane.
    pub y: Scalar,
    pub z: Scalar,
    pub declared_sign: Option<Sign>,
}

#[derive(Debug, Error)]
pub enum MechanismError {
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Expr { field: String, source: ExprError },
    #[error("{field}: invalid number")]
    BadNumber { field: String },
    #[error("duplicate link id {0}")]
    DuplicateLink(u32),
    #[error("link ids must be contiguous from 0 (ground)")]
    LinksNotContiguous,
    #[error("duplicate joint id {0}")]
    DuplicateJoint(u32),
    #[error("duplicate input {0}")]
    DuplicateInput(u32),
    #[error("turning-joint ids must form one contiguous block after the link ids ({start}..={end})")]
    TurningIdsNotContiguous { start: u32, end: u32 },
    #[error("joint {joint}: unknown link {link}")]
    UnknownLink { joint: u32, link: u32 },
    #[error("joint {0}: tail and head are the same link")]
    SelfLoop(u32),
    #[error("turning pairs do not form a spanning tree")]
    NotSpanningTree,
    #[error("input count != degrees of freedom (got {got}, expected {expected})")]
    InputCountMismatch { got: usize, expected: usize },
    #[error("more gear meshes than turning pairs; no valid input set exists")]
    NegativeDof,
    #[error("input {0} is not a turning joint")]
    UnknownInput(u32),
    #[error("joint {0} off the y-z plane (x must be 0)")]
    OffPlane(u32),
    #[error("mesh {0}: pitch diameters must be strictly positive")]
    NonPositiveDiameter(u32),
    #[error("mesh {0}: needs pitch diameters or teeth counts")]
    MissingDiameter(u32),
    #[error("mesh {0}: teeth counts require both teeth_tail and teeth_head")]
    TeethPartial(u32),
    #[error("mesh {0}: teeth ratio does not match diameter ratio")]
    TeethMismatch(u32),
    #[error("mesh {0}: sign must be 1 or -1")]
    BadSign(u32),
    #[error("mesh {0}: zero head diameter")]
    ZeroHeadDiameter(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone)]
struct TreeEdge {
    parent: LinkId,
    joint: JointId,
    /// +1 when the joint's tail->head orientation points from this link up
    /// to its parent (i.e. matches the walk toward ground).
    up_sign: i8,
}

/// A validated mechanism. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Mechanism {
    pub name: String,
    links: Vec<Link>,
    turning: Vec<TurningJoint>,
    meshes: Vec<GearMesh>,
    inputs: BTreeSet<JointId>,
    symbols: SymbolTable,
    parents: Vec<Option<TreeEdge>>,
}

impl Mechanism {
    /// Builds and fully validates a mechanism.
    pub fn new(
        name: String,
        links: Vec<Link>,
        turning: Vec<TurningJoint>,
        meshes: Vec<GearMesh>,
        inputs: Vec<JointId>,
        symbols: SymbolTable,
    ) -> Result<Self, MechanismError> {
        let mut links = links;
        links.sort_by_key(|l| l.id);
        for (i, l) in links.iter().enumerate() {
            if l.id.0 as usize != i {
                if links.iter().filter(|o| o.id == l.id).count() > 1 {
                    return Err(MechanismError::DuplicateLink(l.id.0));
                }
                return Err(MechanismError::LinksNotContiguous);
            }
        }
        if links.is_empty() {
            return Err(MechanismError::LinksNotContiguous);
        }
        let n = links.len() - 1;

        let mut turning = turning;
        let mut meshes = meshes;
        turning.sort_by_key(|j| j.id);
        meshes.sort_by_key(|j| j.id);

        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for id in turning
            .iter()
            .map(|j| j.id.0)
            .chain(meshes.iter().map(|j| j.id.0))
        {
            if !seen.insert(id) {
                return Err(MechanismError::DuplicateJoint(id));
            }
        }

        let t = turning.len();
        if t != n {
            return Err(MechanismError::NotSpanningTree);
        }
        let start = n as u32 + 1;
        let end = (n + t) as u32;
        for (i, j) in turning.iter().enumerate() {
            if j.id.0 != start + i as u32 {
                return Err(MechanismError::TurningIdsNotContiguous { start, end });
            }
        }

        let link_exists = |id: LinkId| (id.0 as usize) < links.len();
        for j in &turning {
            if j.tail == j.head {
                return Err(MechanismError::SelfLoop(j.id.0));
            }
            for l in [j.tail, j.head] {
                if !link_exists(l) {
                    return Err(MechanismError::UnknownLink {
                        joint: j.id.0,
                        link: l.0,
                    });
                }
            }
        }
        for g in &meshes {
            if g.tail == g.head {
                return Err(MechanismError::SelfLoop(g.id.0));
            }
            for l in [g.tail, g.head] {
                if !link_exists(l) {
                    return Err(MechanismError::UnknownLink {
                        joint: g.id.0,
                        link: l.0,
                    });
                }
            }
            for d in [&g.diameter_tail, &g.diameter_head] {
                if let Some(r) = d.as_rational() {
                    if !r.is_positive() {
                        return Err(MechanismError::NonPositiveDiameter(g.id.0));
                    }
                }
            }
            if let Some((nt, nh)) = g.teeth {
                if nt == 0 || nh == 0 {
                    return Err(MechanismError::NonPositiveDiameter(g.id.0));
                }
                // Proportionality N_tail/N_head = d_tail/d_head, cross-multiplied.
                let lhs = g.diameter_head.mul(&Scalar::from_integer(nt as i64));
                let rhs = g.diameter_tail.mul(&Scalar::from_integer(nh as i64));
                if lhs != rhs {
                    return Err(MechanismError::TeethMismatch(g.id.0));
                }
            }
        }

        let parents = build_tree(&links, &turning)?;

        let c = meshes.len();
        if c > t {
            return Err(MechanismError::NegativeDof);
        }
        let expected_inputs = t - c;
        let mut input_set: BTreeSet<JointId> = BTreeSet::new();
        for id in inputs {
            if !turning.iter().any(|j| j.id == id) {
                return Err(MechanismError::UnknownInput(id.0));
            }
            if !input_set.insert(id) {
                return Err(MechanismError::DuplicateInput(id.0));
            }
        }
        if input_set.len() != expected_inputs {
            return Err(MechanismError::InputCountMismatch {
                got: input_set.len(),
                expected: expected_inputs,
            });
        }

        Ok(Mechanism {
            name,
            links,
            turning,
            meshes,
            inputs: input_set,
            symbols,
            parents,
        })
    }

    /// Same mechanism with a different input set (revalidated).
    pub fn with_inputs(&self, inputs: Vec<JointId>) -> Result<Self, MechanismError> {
        Mechanism::new(
            self.name.clone(),
            self.links.clone(),
            self.turning.clone(),
            self.meshes.clone(),
            inputs,
            self.symbols.clone(),
        )
    }

    pub fn ground() -> LinkId {
        LinkId(0)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Number of links excluding ground.
    pub fn link_count(&self) -> usize {
        self.links.len() - 1
    }

    pub fn turning_joints(&self) -> &[TurningJoint] {
        &self.turning
    }

    pub fn turning_count(&self) -> usize {
        self.turning.len()
    }

    pub fn meshes(&self) -> &[GearMesh] {
        &self.meshes
    }

    pub fn mesh_count(&self) -> usize {
        self.meshes.len()
    }

    pub fn inputs(&self) -> &BTreeSet<JointId> {
        &self.inputs
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn turning_by_id(&self, id: JointId) -> Option<&TurningJoint> {
        self.turning.iter().find(|j| j.id == id)
    }

    pub fn mesh_by_id(&self, id: JointId) -> Option<&GearMesh> {
        self.meshes.iter().find(|g| g.id == id)
    }

    /// Output (non-input) turning joints in ascending id order.
    pub fn output_joints(&self) -> Vec<JointId> {
        self.turning
            .iter()
            .map(|j| j.id)
            .filter(|id| !self.inputs.contains(id))
            .collect()
    }

    pub fn input_joints(&self) -> Vec<JointId> {
        self.inputs.iter().copied().collect()
    }

    pub fn has_inexact_angles(&self) -> bool {
        self.turning.iter().any(|j| !j.phi.is_exact())
            || self.meshes.iter().any(|g| !g.phi.is_exact())
    }

    /// Signed tree edges along the unique path `from -> to`: +1 when the
    /// joint's tail->head orientation matches the direction of travel.
    pub fn tree_path(&self, from: LinkId, to: LinkId) -> Vec<(JointId, i8)> {
        let chain = |mut x: LinkId| {
            let mut out = vec![x];
            while let Some(e) = &self.parents[x.0 as usize] {
                x = e.parent;
                out.push(x);
            }
            out
        };
        let up_from = chain(from);
        let up_to = chain(to);
        // Lowest common ancestor: deepest link present in both chains.
        let lca = *up_from
            .iter()
            .find(|l| up_to.contains(l))
            .expect("tree is connected");

        let mut path = Vec::new();
        let mut x = from;
        while x != lca {
            let e = self.parents[x.0 as usize].as_ref().unwrap();
            path.push((e.joint, e.up_sign));
            x = e.parent;
        }
        let mut down = Vec::new();
        let mut y = to;
        while y != lca {
            let e = self.parents[y.0 as usize].as_ref().unwrap();
            down.push((e.joint, -e.up_sign));
            y = e.parent;
        }
        down.reverse();
        path.extend(down);
        path
    }

    /// Serializes back to the mechanism description JSON.
    pub fn to_json(&self) -> String {
        schema::to_json(self)
    }
}

fn build_tree(
    links: &[Link],
    turning: &[TurningJoint],
) -> Result<Vec<Option<TreeEdge>>, MechanismError> {
    let n = links.len();
    let mut adjacency: Vec<Vec<(LinkId, JointId, i8)>> = vec![Vec::new(); n];
    for j in turning {
        // up_sign seen from each endpoint: +1 if the edge points toward the
        // other endpoint's side we travel to.
        adjacency[j.tail.0 as usize].push((j.head, j.id, 1));
        adjacency[j.head.0 as usize].push((j.tail, j.id, -1));
    }
    let mut parents: Vec<Option<TreeEdge>> = vec![None; n];
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut queue = std::collections::VecDeque::from([LinkId(0)]);
    while let Some(x) = queue.pop_front() {
        for &(next, joint, sign_from_x) in &adjacency[x.0 as usize] {
            if visited[next.0 as usize] {
                continue;
            }
            visited[next.0 as usize] = true;
            // Traveling next -> x (up): the orientation matches when the edge
            // points from next to x, i.e. the opposite of sign_from_x.
            parents[next.0 as usize] = Some(TreeEdge {
                parent: x,
                joint,
                up_sign: -sign_from_x,
            });
            queue.push_back(next);
        }
    }
    if visited.iter().any(|&v| !v) {
        return Err(MechanismError::NotSpanningTree);
    }
    Ok(parents)
}

/// Degrees of freedom `E = t - r`, with `r` the number of independent
/// cycles. Each mesh contributes one cycle; the equality of mesh count and
/// cycle-basis rank is re-checked from the actual matrices.
pub fn kutzbach_dof(m: &Mechanism) -> usize {
    let r = m.mesh_count();
    let gm = crate::digraph::GraphMatrices::build(m)
        .expect("valid mechanism has a full-rank cycle basis");
    debug_assert_eq!(gm.cycle_rank(), r);
    m.turning_count() - r
}

/// Pitch-diameter ratio of a mesh, tail over head (symbolic when the
/// diameters are symbolic).
pub fn gear_ratio(mesh: &GearMesh) -> Result<Scalar, MechanismError> {
    mesh.diameter_tail
        .checked_div(&mesh.diameter_head)
        .map_err(|_| MechanismError::ZeroHeadDiameter(mesh.id.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    fn fixture(name: &str) -> String {
        let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
    }

    fn grm() -> Mechanism {
        load_mechanism(&fixture("grm.json")).expect("GRM fixture loads")
    }

    #[test]
    fn grm_counts() {
        let m = grm();
        assert_eq!(m.link_count(), 7);
        assert_eq!(m.turning_count(), 7);
        assert_eq!(m.mesh_count(), 4);
        assert_eq!(
            m.input_joints(),
            vec![JointId(8), JointId(9), JointId(11)]
        );
    }

    #[test]
    fn grm_dof_is_three() {
        assert_eq!(kutzbach_dof(&grm()), 3);
    }

    #[test]
    fn minimal_two_link_train() {
        let m = load_mechanism(&fixture("minimal_coaxial.json")).unwrap();
        assert_eq!(m.link_count(), 2);
        assert_eq!(m.turning_count(), 2);
        assert_eq!(m.mesh_count(), 1);
        assert_eq!(kutzbach_dof(&m), 1);
    }

    #[test]
    fn two_stage_train_dof() {
        let m = load_mechanism(&fixture("two_stage.json")).unwrap();
        assert_eq!(m.turning_count(), 3);
        assert_eq!(m.mesh_count(), 2);
        assert_eq!(kutzbach_dof(&m), 1);
    }

    #[test]
    fn deleting_a_tree_joint_breaks_the_tree() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let joints = doc["turning_joints"].as_array_mut().unwrap();
        joints.retain(|j| j["id"] != 10);
        let err = load_mechanism(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MechanismError::NotSpanningTree));
    }

    #[test]
    fn input_count_must_match_dof() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["inputs"] = serde_json::json!([8, 9]);
        let err = load_mechanism(&doc.to_string()).unwrap_err();
        assert!(matches!(
            err,
            MechanismError::InputCountMismatch {
                got: 2,
                expected: 3
            }
        ));
    }

    #[test]
    fn off_plane_joint_is_rejected() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["turning_joints"][0]["x"] = serde_json::json!(1);
        let err = load_mechanism(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MechanismError::OffPlane(8)));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["gear_meshes"][1]["id"] = serde_json::json!(15);
        let err = load_mechanism(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MechanismError::DuplicateJoint(15)));
    }

    #[test]
    fn gear_ratio_examples() {
        let m = grm();
        let t = m.symbols();
        let sym = |n: &str| Scalar::symbol(t.get(n).unwrap());
        // mesh 15: tail gear on link 4 (d4), head gear on link 1 (d1)
        let g15 = m.mesh_by_id(JointId(15)).unwrap();
        assert_eq!(
            gear_ratio(g15).unwrap(),
            sym("d4").checked_div(&sym("d1")).unwrap()
        );
        // mesh 18: tail 7 (d7pp), head 3 (d3)
        let g18 = m.mesh_by_id(JointId(18)).unwrap();
        assert_eq!(
            gear_ratio(g18).unwrap(),
            sym("d7pp").checked_div(&sym("d3")).unwrap()
        );
    }

    #[test]
    fn unit_gear_ratio() {
        let mesh = GearMesh {
            id: JointId(3),
            tail: LinkId(1),
            head: LinkId(2),
            diameter_tail: Scalar::from_integer(5),
            diameter_head: Scalar::from_integer(5),
            teeth: None,
            phi: Angle::from_integer_degrees(0),
            y: Scalar::zero(),
            z: Scalar::zero(),
            declared_sign: None,
        };
        assert_eq!(gear_ratio(&mesh).unwrap(), Scalar::one());
    }

    #[test]
    fn teeth_proportionality_checked() {
        let text = fixture("two_stage.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        // two_stage mesh 7 has numeric diameters 2 and 4: teeth 10/20 match,
        // 10/21 do not.
        doc["gear_meshes"][0]["teeth_tail"] = serde_json::json!(10);
        doc["gear_meshes"][0]["teeth_head"] = serde_json::json!(20);
        assert!(load_mechanism(&doc.to_string()).is_ok());
        doc["gear_meshes"][0]["teeth_head"] = serde_json::json!(21);
        let err = load_mechanism(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MechanismError::TeethMismatch(7)));
    }

    #[test]
    fn teeth_alone_define_the_ratio() {
        let text = fixture("two_stage.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mesh = &mut doc["gear_meshes"][0];
        mesh.as_object_mut().unwrap().remove("d_tail");
        mesh.as_object_mut().unwrap().remove("d_head");
        mesh["teeth_tail"] = serde_json::json!(10);
        mesh["teeth_head"] = serde_json::json!(20);
        let m = load_mechanism(&doc.to_string()).unwrap();
        let g = m.mesh_by_id(JointId(7)).unwrap();
        assert_eq!(g.diameter_tail, Scalar::from_integer(10));
        assert_eq!(g.diameter_head, Scalar::from_integer(20));
    }

    #[test]
    fn load_serialize_load_roundtrip() {
        let m = grm();
        let text = m.to_json();
        let m2 = load_mechanism(&text).unwrap();
        assert_eq!(m2.name, m.name);
        assert_eq!(m2.link_count(), m.link_count());
        for (a, b) in m.turning_joints().iter().zip(m2.turning_joints()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.axis, b.axis);
            assert_eq!(a.phi.degrees(), b.phi.degrees());
            assert_eq!(a.y.render(m.symbols()), b.y.render(m2.symbols()));
            assert_eq!(a.z.render(m.symbols()), b.z.render(m2.symbols()));
        }
        for (a, b) in m.meshes().iter().zip(m2.meshes()) {
            assert_eq!(a.id, b.id);
            assert_eq!((a.tail, a.head), (b.tail, b.head));
            assert_eq!(a.declared_sign, b.declared_sign);
            assert_eq!(
                a.diameter_tail.render(m.symbols()),
                b.diameter_tail.render(m2.symbols())
            );
        }
        assert_eq!(m.inputs(), m2.inputs());
    }

    #[test]
    fn tree_path_signs() {
        let m = grm();
        // Path 1 -> 0 is the single edge of joint 10 (oriented 0 -> 1),
        // traversed against its orientation.
        assert_eq!(
            m.tree_path(LinkId(1), LinkId(0)),
            vec![(JointId(10), -1)]
        );
        // Path 1 -> 4 crosses ground: joint 10 against, joint 8 with.
        assert_eq!(
            m.tree_path(LinkId(1), LinkId(4)),
            vec![(JointId(10), -1), (JointId(8), 1)]
        );
        // Path 3 -> 7: up to link 2 against joint 14, down with joint 13.
        assert_eq!(
            m.tree_path(LinkId(3), LinkId(7)),
            vec![(JointId(14), -1), (JointId(13), 1)]
        );
    }

    #[test]
    fn inexact_angles_are_detected() {
        let text = fixture("grm.json");
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(!grm().has_inexact_angles());
        doc["turning_joints"][0]["phi_deg"] = serde_json::json!(30.0);
        let m = load_mechanism(&doc.to_string()).unwrap();
        assert!(m.has_inexact_angles());
    }

    #[test]
    fn phi_degrees_convert_exactly() {
        let m = grm();
        let j11 = m.turning_by_id(JointId(11)).unwrap();
        assert_eq!(
            j11.phi.degrees(),
            &Rational::from_integer((-90).into())
        );
        assert!(j11.phi.is_exact());
    }
}
