//! Differential validation of the two solvers against each other and
//! against the brute-force oracle.
//!
//! The matroid result in gear-ratio form and the T-T result are the same
//! matrix up to (a) renaming each mesh's `n<tail><head>` symbol to its
//! `i<mesh>` symbol and (b) permuting rows/columns between the joint-id
//! order and the link-pair order. This module performs that reconciliation
//! and reports either an exact match or the first differing entry.

use thiserror::Error;

use crate::algebra::{AlgebraError, Bindings, Scalar, SymbolId};
use crate::digraph::{DigraphError, GraphMatrices};
use crate::matroid::{self, MatroidError, TransferMatrix};
use crate::mechanism::{JointId, Mechanism};
use crate::oracle::{self, OracleError};
use crate::tt::{self, TtError};

#[derive(Debug, Error)]
pub enum CrosscheckError {
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Tt(#[from] TtError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// First differing entry between two methods, rendered for the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub left_method: &'static str,
    pub right_method: &'static str,
    pub output: JointId,
    pub input: JointId,
    pub left_value: String,
    pub right_value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Matched,
    Mismatched(Mismatch),
}

impl Verdict {
    pub fn matched(&self) -> bool {
        matches!(self, Verdict::Matched)
    }
}

/// Exact symbolic comparison: matroid transfer in `i` symbols against the
/// T-T transfer in `n` symbols, reconciled by the mesh correspondence and
/// the joint <-> link-pair row permutation.
pub fn compare_symbolic(m: &Mechanism) -> Result<Verdict, CrosscheckError> {
    let gm = GraphMatrices::build(m)?;
    let pm = matroid::coefficient_matrix(m, &gm);
    let rs = matroid::ratio_system(m, &gm, &pm)?;
    let x_ratio = matroid::solve_transfer_ratios(m, &rs)?;
    let sol = tt::solve_tt(m)?;

    // n<tail><head> -> i<mesh>, mesh by mesh.
    let mut rename: Vec<SymbolId> = vec![SymbolId(0); sol.table.len()];
    for ((mesh_n, n_sym), (mesh_i, i_sym)) in sol.mesh_symbols.iter().zip(&rs.mesh_symbols) {
        debug_assert_eq!(mesh_n, mesh_i);
        rename[n_sym.0 as usize] = *i_sym;
    }

    compare_transfers(
        "matroid",
        &x_ratio,
        |s| s.clone(),
        &rs.table,
        "tt",
        &sol.transfer,
        |s| s.rename(&rename),
        &rs.table,
    )
}

/// Numeric comparison at a full binding: matroid and T-T evaluated exactly,
/// both checked against the brute-force oracle.
pub fn compare_numeric(m: &Mechanism, bindings: &Bindings) -> Result<Verdict, CrosscheckError> {
    let gm = GraphMatrices::build(m)?;
    let pm = matroid::coefficient_matrix(m, &gm);
    let x = matroid::solve_transfer(m, &pm)?;
    let matroid_num = x.entries.eval(bindings)?;

    let sol = tt::solve_tt(m)?;
    let ratio_bindings = sol.ratio_bindings(bindings)?;
    let tt_num = sol.transfer.entries.eval(&ratio_bindings)?;

    let oracle_res = oracle::brute_force_transfer(m, bindings)?;

    // matroid vs oracle: identical orderings (ascending joint ids).
    debug_assert_eq!(x.outputs, oracle_res.outputs);
    for (r, &out) in x.outputs.iter().enumerate() {
        for (c, &inp) in x.inputs.iter().enumerate() {
            if matroid_num.at(r, c) != oracle_res.entries.at(r, c) {
                return Ok(Verdict::Mismatched(Mismatch {
                    left_method: "matroid",
                    right_method: "oracle",
                    output: out,
                    input: inp,
                    left_value: render_rational(matroid_num.at(r, c)),
                    right_value: render_rational(oracle_res.entries.at(r, c)),
                }));
            }
        }
    }

    // tt vs oracle: permute by joint id.
    for (r, &out) in sol.transfer.outputs.iter().enumerate() {
        let or = oracle_res
            .outputs
            .iter()
            .position(|&j| j == out)
            .expect("same output set");
        for (c, &inp) in sol.transfer.inputs.iter().enumerate() {
            let oc = oracle_res
                .inputs
                .iter()
                .position(|&j| j == inp)
                .expect("same input set");
            if tt_num.at(r, c) != oracle_res.entries.at(or, oc) {
                return Ok(Verdict::Mismatched(Mismatch {
                    left_method: "tt",
                    right_method: "oracle",
                    output: out,
                    input: inp,
                    left_value: render_rational(tt_num.at(r, c)),
                    right_value: render_rational(oracle_res.entries.at(or, oc)),
                }));
            }
        }
    }

    Ok(Verdict::Matched)
}

fn render_rational(r: &crate::algebra::Rational) -> String {
    Scalar::from_rational(r.clone()).render(&crate::algebra::SymbolTable::new())
}

#[allow(clippy::too_many_arguments)]
fn compare_transfers(
    left_name: &'static str,
    left: &TransferMatrix,
    left_map: impl Fn(&Scalar) -> Scalar,
    left_table: &crate::algebra::SymbolTable,
    right_name: &'static str,
    right: &TransferMatrix,
    right_map: impl Fn(&Scalar) -> Scalar,
    right_table: &crate::algebra::SymbolTable,
) -> Result<Verdict, CrosscheckError> {
    for (lr, &out) in left.outputs.iter().enumerate() {
        let rr = right
            .outputs
            .iter()
            .position(|&j| j == out)
            .expect("output sets agree");
        for (lc, &inp) in left.inputs.iter().enumerate() {
            let rc = right
                .inputs
                .iter()
                .position(|&j| j == inp)
                .expect("input sets agree");
            let a = left_map(left.entries.at(lr, lc));
            let b = right_map(right.entries.at(rr, rc));
            if a != b {
                return Ok(Verdict::Mismatched(Mismatch {
                    left_method: left_name,
                    right_method: right_name,
                    output: out,
                    input: inp,
                    left_value: a.render(left_table),
                    right_value: b.render(right_table),
                }));
            }
        }
    }
    Ok(Verdict::Matched)
}
