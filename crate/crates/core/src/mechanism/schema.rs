//! The mechanism description file: UTF-8 JSON. Numeric positions accept
//! either a JSON number or an expression string over named symbols
//! (`"d1"`, `"-d1/2"`, `"A1 - d2/2"`).

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::trig::Angle;
use crate::algebra::{expr, Rational, Scalar, SymbolTable};

use super::{GearMesh, JointId, Link, LinkId, Mechanism, MechanismError, Sign, TurningJoint};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MechanismDoc {
    name: String,
    links: Vec<LinkDoc>,
    turning_joints: Vec<TurningJointDoc>,
    gear_meshes: Vec<GearMeshDoc>,
    inputs: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TurningJointDoc {
    id: u32,
    tail: u32,
    head: u32,
    axis: String,
    phi_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<NumOrExpr>,
    y: NumOrExpr,
    z: NumOrExpr,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GearMeshDoc {
    id: u32,
    tail: u32,
    head: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_tail: Option<NumOrExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_head: Option<NumOrExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    teeth_tail: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    teeth_head: Option<u64>,
    phi_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<NumOrExpr>,
    y: NumOrExpr,
    z: NumOrExpr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NumOrExpr {
    Num(f64),
    Expr(String),
}

fn to_scalar(
    v: &NumOrExpr,
    field: &str,
    table: &mut SymbolTable,
) -> Result<Scalar, MechanismError> {
    match v {
        NumOrExpr::Num(f) => Rational::from_float(*f)
            .map(Scalar::from_rational)
            .ok_or_else(|| MechanismError::BadNumber {
                field: field.to_string(),
            }),
        NumOrExpr::Expr(s) => expr::parse(s, table).map_err(|source| MechanismError::Expr {
            field: field.to_string(),
            source,
        }),
    }
}

fn to_angle(deg: f64, field: &str) -> Result<Angle, MechanismError> {
    let r = Rational::from_float(deg).ok_or_else(|| MechanismError::BadNumber {
        field: field.to_string(),
    })?;
    Ok(Angle::from_degrees(r))
}

/// Parses and fully validates a mechanism description document.
pub fn load_mechanism(text: &str) -> Result<Mechanism, MechanismError> {
    let doc: MechanismDoc = serde_json::from_str(text)?;
    let mut table = SymbolTable::new();

    let links = doc
        .links
        .iter()
        .map(|l| Link {
            id: LinkId(l.id),
            name: l.name.clone(),
        })
        .collect();

    let mut turning = Vec::with_capacity(doc.turning_joints.len());
    for j in &doc.turning_joints {
        let field = |f: &str| format!("turning joint {}, field `{f}`", j.id);
        if let Some(x) = &j.x {
            let x = to_scalar(x, &field("x"), &mut table)?;
            if !x.is_zero() {
                return Err(MechanismError::OffPlane(j.id));
            }
        }
        turning.push(TurningJoint {
            id: JointId(j.id),
            tail: LinkId(j.tail),
            head: LinkId(j.head),
            axis: j.axis.clone(),
            phi: to_angle(j.phi_deg, &field("phi_deg"))?,
            y: to_scalar(&j.y, &field("y"), &mut table)?,
            z: to_scalar(&j.z, &field("z"), &mut table)?,
        });
    }

    let mut meshes = Vec::with_capacity(doc.gear_meshes.len());
    for g in &doc.gear_meshes {
        let field = |f: &str| format!("gear mesh {}, field `{f}`", g.id);
        if let Some(x) = &g.x {
            let x = to_scalar(x, &field("x"), &mut table)?;
            if !x.is_zero() {
                return Err(MechanismError::OffPlane(g.id));
            }
        }
        let teeth = match (g.teeth_tail, g.teeth_head) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(MechanismError::TeethPartial(g.id)),
        };
        // Teeth counts are an accepted alias for diameters: when diameters
        // are absent the teeth numbers stand in for them (ratios of pitch
        // diameters equal teeth ratios).
        let diameter = |d: &Option<NumOrExpr>,
                        teeth_count: Option<u64>,
                        name: &str,
                        table: &mut SymbolTable|
         -> Result<Scalar, MechanismError> {
            match d {
                Some(v) => to_scalar(v, &field(name), table),
                None => match teeth_count {
                    Some(n) => Ok(Scalar::from_integer(n as i64)),
                    None => Err(MechanismError::MissingDiameter(g.id)),
                },
            }
        };
        let diameter_tail = diameter(&g.d_tail, teeth.map(|t| t.0), "d_tail", &mut table)?;
        let diameter_head = diameter(&g.d_head, teeth.map(|t| t.1), "d_head", &mut table)?;
        let declared_sign = match g.sign {
            None => None,
            Some(v) => Some(Sign::from_value(v).ok_or(MechanismError::BadSign(g.id))?),
        };
        meshes.push(GearMesh {
            id: JointId(g.id),
            tail: LinkId(g.tail),
            head: LinkId(g.head),
            diameter_tail,
            diameter_head,
            teeth,
            phi: to_angle(g.phi_deg, &field("phi_deg"))?,
            y: to_scalar(&g.y, &field("y"), &mut table)?,
            z: to_scalar(&g.z, &field("z"), &mut table)?,
            declared_sign,
        });
    }

    let inputs = doc.inputs.iter().map(|&i| JointId(i)).collect();
    Mechanism::new(doc.name, links, turning, meshes, inputs, table)
}

fn from_scalar(s: &Scalar, table: &SymbolTable) -> NumOrExpr {
    if let Some(r) = s.as_rational() {
        if r.is_integer() {
            if let Some(f) = r.to_f64() {
                if f.abs() <= 2f64.powi(53) && Rational::from_float(f).as_ref() == Some(r) {
                    return NumOrExpr::Num(f);
                }
            }
        }
    }
    NumOrExpr::Expr(s.render(table))
}

/// Serializes a mechanism back into the description format; reloading the
/// result yields a structurally equal mechanism.
pub fn to_json(m: &Mechanism) -> String {
    let table = m.symbols();
    let doc = MechanismDoc {
        name: m.name.clone(),
        links: m
            .links()
            .iter()
            .map(|l| LinkDoc {
                id: l.id.0,
                name: l.name.clone(),
            })
            .collect(),
        turning_joints: m
            .turning_joints()
            .iter()
            .map(|j| TurningJointDoc {
                id: j.id.0,
                tail: j.tail.0,
                head: j.head.0,
                axis: j.axis.clone(),
                phi_deg: j.phi.degrees().to_f64().expect("degrees fit in f64"),
                x: None,
                y: from_scalar(&j.y, table),
                z: from_scalar(&j.z, table),
            })
            .collect(),
        gear_meshes: m
            .meshes()
            .iter()
            .map(|g| GearMeshDoc {
                id: g.id.0,
                tail: g.tail.0,
                head: g.head.0,
                d_tail: Some(from_scalar(&g.diameter_tail, table)),
                d_head: Some(from_scalar(&g.diameter_head, table)),
                teeth_tail: g.teeth.map(|t| t.0),
                teeth_head: g.teeth.map(|t| t.1),
                phi_deg: g.phi.degrees().to_f64().expect("degrees fit in f64"),
                x: None,
                y: from_scalar(&g.y, table),
                z: from_scalar(&g.z, table),
                sign: g.declared_sign.map(Sign::value),
            })
            .collect(),
        inputs: m.inputs().iter().map(|j| j.0).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("mechanism document serializes")
}
