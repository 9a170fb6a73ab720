//! Variable order hint for decision-diagram evaluation.
//!
//! Variables holding the same bit of the same kind of value (a code, an
//! input address, a work address) are kept adjacent across every tuple
//! that can be equated with another, so equalities, increments and
//! renamings between tuples stay small.

use crate::formula::{VarId, VarKind};

use super::params::{RoleClass, ROLE_CLASSES};
use super::{ConfigVars, EncodingParams};

pub fn variable_order(params: &EncodingParams, colors: &[u128]) -> Vec<VarId> {
    let mut instances: Vec<ConfigVars> = colors.iter().map(|&t| ConfigVars::basic(params, t)).collect();
    for level in (1..=params.m as u128).rev() {
        for kind in [VarKind::LadderFrom, VarKind::LadderTo, VarKind::Midpoint] {
            instances.push(ConfigVars::ladder(params, kind, level));
        }
    }
    let n_ins = params.instruction_count;
    let aux = |kind: VarKind, bit: usize| (1..=n_ins).map(move |k| VarId::tagged(kind, k as u128, bit));

    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut push = |v: VarId, out: &mut Vec<VarId>| {
        if seen.insert(v) {
            out.push(v);
        }
    };
    for (class, width) in [
        (RoleClass::Code, params.code_width()),
        (RoleClass::InputAddress, params.input_width()),
        (RoleClass::WorkAddress, params.work_width()),
    ] {
        for bit in 0..width {
            for role in 0..9 {
                if ROLE_CLASSES[role] != class {
                    continue;
                }
                for inst in &instances {
                    push(inst.roles()[role][bit], &mut out);
                }
            }
            let extra: Vec<VarId> = match class {
                RoleClass::Code => aux(VarKind::AuxInputSeen, bit)
                    .chain(aux(VarKind::AuxWorkSeen, bit))
                    .chain(aux(VarKind::CopySymbol, bit))
                    .collect(),
                RoleClass::InputAddress => aux(VarKind::AuxInputHead, bit)
                    .chain(aux(VarKind::AuxInputShift, bit))
                    .collect(),
                RoleClass::WorkAddress => aux(VarKind::AuxWorkHead, bit)
                    .chain(aux(VarKind::AuxWorkShift, bit))
                    .chain(aux(VarKind::CopyCell, bit))
                    .collect(),
            };
            for v in extra {
                push(v, &mut out);
            }
            if class != RoleClass::Code {
                push(VarId::plain(VarKind::TailCell, bit), &mut out);
            }
        }
    }
    out
}
