//! Random valid mechanisms for differential testing.
//!
//! Generates numeric mechanisms: a random spanning tree with axes in the
//! y-z plane (exact angles only), then gear meshes whose pitch points are
//! placed consistently with the derived diameters, and finally an input set
//! chosen so the output block of the cycle system is nonsingular.

use num::{Signed, Zero};
use rand::Rng;

use crate::algebra::matrix::pivot_columns_in_order;
use crate::algebra::trig::Angle;
use crate::algebra::{Rational, Scalar, SymbolTable};
use crate::digraph::GraphMatrices;
use crate::matroid;
use crate::mechanism::{GearMesh, JointId, Link, LinkId, Mechanism, TurningJoint};

#[derive(Debug, Clone)]
pub struct SampleParams {
    /// Maximum number of non-ground links.
    pub max_links: usize,
    /// Maximum number of gear meshes.
    pub max_meshes: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_links: 10,
            max_meshes: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Line {
    /// Axis direction ±z: the line y = offset.
    Vertical(Rational),
    /// Axis direction ±y: the line z = offset.
    Horizontal(Rational),
}

#[derive(Debug, Clone)]
struct Axis {
    label: String,
    phi_deg: i64,
    line: Line,
}

fn axis_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

fn half_integer<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi).into(), 2.into())
}

fn new_axis<R: Rng>(rng: &mut R, index: usize) -> Axis {
    let phi_deg = *[0i64, 90, -90, 180].get(rng.gen_range(0..4)).unwrap();
    let offset = half_integer(rng, -12, 12);
    let line = if phi_deg == 0 || phi_deg == 180 {
        Line::Vertical(offset)
    } else {
        Line::Horizontal(offset)
    };
    Axis {
        label: axis_label(index),
        phi_deg,
        line,
    }
}

/// Radius in [1/2, 10], giving diameters in [1, 20].
fn radius<R: Rng>(rng: &mut R) -> Rational {
    half_integer(rng, 1, 20)
}

fn in_radius_range(r: &Rational) -> bool {
    let lo = Rational::new(1.into(), 2.into());
    let hi = Rational::from_integer(10.into());
    !r.is_zero() && *r >= lo && *r <= hi
}

/// Draws a random valid mechanism. Retries internally until the cycle
/// system has full rank for some input choice.
pub fn random_mechanism<R: Rng>(rng: &mut R, params: &SampleParams) -> Mechanism {
    loop {
        if let Some(m) = try_random(rng, params) {
            return m;
        }
    }
}

fn try_random<R: Rng>(rng: &mut R, params: &SampleParams) -> Option<Mechanism> {
    let n = rng.gen_range(2..=params.max_links.max(2));
    let links: Vec<Link> = (0..=n as u32)
        .map(|id| Link {
            id: LinkId(id),
            name: None,
        })
        .collect();

    // Spanning tree with axis assignments; edge axes are reused with some
    // probability so coaxial chains (and thus longer mesh paths) occur.
    let mut axes: Vec<Axis> = Vec::new();
    let mut edge_axis: Vec<usize> = Vec::new(); // per non-ground link
    let mut turning = Vec::new();
    for j in 1..=n {
        let parent = rng.gen_range(0..j);
        let axis_index = if !axes.is_empty() && rng.gen_bool(0.45) {
            rng.gen_range(0..axes.len())
        } else {
            axes.push(new_axis(rng, axes.len()));
            axes.len() - 1
        };
        edge_axis.push(axis_index);
        let axis = &axes[axis_index];
        let (y, z) = match &axis.line {
            Line::Vertical(c) => (c.clone(), half_integer(rng, -12, 12)),
            Line::Horizontal(c) => (half_integer(rng, -12, 12), c.clone()),
        };
        let (tail, head) = if rng.gen_bool(0.5) {
            (parent as u32, j as u32)
        } else {
            (j as u32, parent as u32)
        };
        turning.push(TurningJoint {
            id: JointId((n + j) as u32),
            tail: LinkId(tail),
            head: LinkId(head),
            axis: axis.label.clone(),
            phi: Angle::from_integer_degrees(axis.phi_deg),
            y: Scalar::from_rational(y),
            z: Scalar::from_rational(z),
        });
    }

    // Provisional mechanism without meshes gives us tree paths.
    let skeleton = Mechanism::new(
        "sample".to_string(),
        links.clone(),
        turning.clone(),
        Vec::new(),
        turning.iter().map(|j| j.id).collect(),
        SymbolTable::new(),
    )
    .ok()?;

    let want_meshes = rng.gen_range(1..=params.max_meshes.min(n - 1).max(1));
    let mut meshes = Vec::new();
    let mut next_mesh_id = (2 * n + 1) as u32;
    for _ in 0..300 {
        if meshes.len() == want_meshes {
            break;
        }
        let a = rng.gen_range(0..=n) as u32;
        let b = rng.gen_range(0..=n) as u32;
        if a == b {
            continue;
        }
        let path = skeleton.tree_path(LinkId(a), LinkId(b));
        if path.len() < 2 {
            continue;
        }
        let labels: Vec<&str> = path
            .iter()
            .map(|(j, _)| skeleton.turning_by_id(*j).unwrap().axis.as_str())
            .collect();
        let changes = labels.windows(2).filter(|w| w[0] != w[1]).count();
        if changes != 1 {
            continue;
        }
        let tail_axis = &axes[edge_axis[(path[0].0 .0 as usize) - n - 1]];
        let head_axis = &axes[edge_axis[(path.last().unwrap().0 .0 as usize) - n - 1]];
        let Some((y, z, d_tail, d_head)) = place_mesh(rng, &tail_axis.line, &head_axis.line)
        else {
            continue;
        };
        meshes.push(GearMesh {
            id: JointId(next_mesh_id),
            tail: LinkId(a),
            head: LinkId(b),
            diameter_tail: Scalar::from_rational(d_tail),
            diameter_head: Scalar::from_rational(d_head),
            teeth: None,
            phi: Angle::from_integer_degrees(0),
            y: Scalar::from_rational(y),
            z: Scalar::from_rational(z),
            declared_sign: None,
        });
        next_mesh_id += 1;
    }
    if meshes.is_empty() {
        return None;
    }

    // Placeholder inputs, then pick outputs as independent columns of the
    // cycle system (preferring high joint ids as outputs).
    let c = meshes.len();
    let placeholder: Vec<JointId> = turning.iter().take(n - c).map(|j| j.id).collect();
    let provisional = Mechanism::new(
        "sample".to_string(),
        links,
        turning,
        meshes,
        placeholder,
        SymbolTable::new(),
    )
    .ok()?;
    let gm = GraphMatrices::build(&provisional).ok()?;
    let pm = matroid::coefficient_matrix(&provisional, &gm);
    let order: Vec<usize> = (0..pm.joints.len()).rev().collect();
    let pivots = pivot_columns_in_order(&pm.entries, &order);
    if pivots.len() != c {
        return None;
    }
    let inputs: Vec<JointId> = pm
        .joints
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivots.contains(i))
        .map(|(_, &j)| j)
        .collect();
    provisional.with_inputs(inputs).ok()
}

fn place_mesh<R: Rng>(
    rng: &mut R,
    tail_line: &Line,
    head_line: &Line,
) -> Option<(Rational, Rational, Rational, Rational)> {
    let two = Rational::from_integer(2.into());
    let side = |rng: &mut R| {
        if rng.gen_bool(0.5) {
            Rational::from_integer(1.into())
        } else {
            Rational::from_integer((-1).into())
        }
    };
    match (tail_line, head_line) {
        (Line::Vertical(ct), Line::Horizontal(ch)) => {
            let rt = radius(rng);
            let rh = radius(rng);
            let y = ct + side(rng) * &rt;
            let z = ch + side(rng) * &rh;
            Some((y, z, &rt * &two, &rh * &two))
        }
        (Line::Horizontal(ct), Line::Vertical(ch)) => {
            let rt = radius(rng);
            let rh = radius(rng);
            let z = ct + side(rng) * &rt;
            let y = ch + side(rng) * &rh;
            Some((y, z, &rt * &two, &rh * &two))
        }
        (Line::Vertical(ct), Line::Vertical(ch)) => {
            let rt = radius(rng);
            let y = ct + side(rng) * &rt;
            let rh = (&y - ch).abs();
            if !in_radius_range(&rh) {
                return None;
            }
            let z = half_integer(rng, -12, 12);
            Some((y, z, &rt * &two, &rh * &two))
        }
        (Line::Horizontal(ct), Line::Horizontal(ch)) => {
            let rt = radius(rng);
            let z = ct + side(rng) * &rt;
            let rh = (&z - ch).abs();
            if !in_radius_range(&rh) {
                return None;
            }
            let y = half_integer(rng, -12, 12);
            Some((y, z, &rt * &two, &rh * &two))
        }
    }
}

/// The same mechanism with all coordinates and pitch diameters multiplied
/// by a positive factor. The transfer matrix is invariant under this.
pub fn scale_geometry(m: &Mechanism, factor: &Rational) -> Mechanism {
    let f = Scalar::from_rational(factor.clone());
    let turning = m
        .turning_joints()
        .iter()
        .map(|j| TurningJoint {
            y: j.y.mul(&f),
            z: j.z.mul(&f),
            ..j.clone()
        })
        .collect();
    let meshes = m
        .meshes()
        .iter()
        .map(|g| GearMesh {
            y: g.y.mul(&f),
            z: g.z.mul(&f),
            diameter_tail: g.diameter_tail.mul(&f),
            diameter_head: g.diameter_head.mul(&f),
            teeth: None,
            ..g.clone()
        })
        .collect();
    Mechanism::new(
        m.name.clone(),
        m.links().to_vec(),
        turning,
        meshes,
        m.input_joints(),
        m.symbols().clone(),
    )
    .expect("scaling preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn samples_are_valid_and_varied() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let params = SampleParams::default();
        let mut mesh_counts = std::collections::BTreeSet::new();
        for _ in 0..25 {
            let m = random_mechanism(&mut rng, &params);
            assert_eq!(m.turning_count(), m.link_count());
            assert!(m.mesh_count() >= 1);
            assert_eq!(
                m.inputs().len(),
                m.turning_count() - m.mesh_count()
            );
            mesh_counts.insert(m.mesh_count());
        }
        assert!(mesh_counts.len() > 1, "generator should vary mesh counts");
    }

    #[test]
    fn scaling_keeps_validity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = random_mechanism(&mut rng, &SampleParams::default());
        let scaled = scale_geometry(&m, &Rational::new(7.into(), 3.into()));
        assert_eq!(scaled.mesh_count(), m.mesh_count());
    }
}
