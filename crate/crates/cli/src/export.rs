//! JSON and CSV serialization of supercharacter theories.
//!
//! The JSON document is self-contained: it records the field (prime,
//! extension degree, modulus polynomial), the ambient matrix size, the
//! group's element codes, the superclass partition, and one value per
//! (supercharacter, superclass) cell as coefficient vectors over a
//! per-character conductor. `import_json` rebuilds a theory that
//! compares equal to the original.
//!
//! Element codes are arc-vector strings in the fixed global arc order
//! (row-major over pairs i < j), entries joined with '.'; this keeps
//! artifacts human-diffable and CSV-safe.

use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use scharc_core::charfun::{ClassFunction, ConjClasses};
use scharc_core::cyclo::Cyclotomic;
use scharc_core::field::Field;
use scharc_core::groups::{Ambient, Code, Group};
use scharc_core::sct::SCTheory;

use crate::job::CliError;

/// Field and element data sufficient to rebuild the carrier group.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupWire {
    /// Ambient matrix size; codes list one entry per arc (i, j), i < j.
    pub n: usize,
    pub p: u64,
    pub degree: usize,
    /// Monic modulus polynomial of the field extension, low-to-high.
    pub modulus: Vec<u64>,
    pub order: usize,
    pub elements: Vec<String>,
}

/// One supercharacter: a conductor m and, per superclass, the
/// coefficient vector of the value in the power basis of Q(zeta_m).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharWire {
    pub conductor: u64,
    pub values: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SCTheoryWire {
    pub group: GroupWire,
    pub provenance: String,
    pub superclasses: Vec<Vec<String>>,
    pub supercharacters: Vec<CharWire>,
}

pub fn code_to_string(code: &Code) -> String {
    code.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

pub fn code_from_string(s: &str) -> Result<Code, CliError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|part| {
            part.parse::<u8>()
                .map_err(|_| CliError::Schema(format!("bad element code entry {part:?}")))
        })
        .collect()
}

fn rational_to_string(r: &BigRational) -> String {
    r.to_string()
}

fn rational_from_string(s: &str) -> Result<BigRational, CliError> {
    BigRational::from_str(s).map_err(|_| CliError::Schema(format!("bad rational {s:?}")))
}

/// The wire form of one character: values at the superclass
/// representatives, rebased to the lcm of their conductors.
fn char_to_wire(c: &ClassFunction, s: &SCTheory) -> CharWire {
    let mut conductor = 1u64;
    let reps: Vec<&Cyclotomic> = s
        .blocks
        .iter()
        .map(|b| {
            let v = c
                .value_at_code(s.group().code(b[0]))
                .expect("block member is a group element");
            conductor = conductor.lcm(&v.m);
            v
        })
        .collect();
    let values = reps
        .iter()
        .map(|v| {
            v.embed(conductor)
                .coeffs
                .iter()
                .map(rational_to_string)
                .collect()
        })
        .collect();
    CharWire { conductor, values }
}

pub fn to_wire(s: &SCTheory) -> SCTheoryWire {
    let g = s.group();
    let amb = g.ambient();
    let field = &amb.field;
    let group = GroupWire {
        n: amb.n,
        p: field.p,
        degree: field.k,
        modulus: field.modulus.clone(),
        order: g.order(),
        elements: g.elems.iter().map(code_to_string).collect(),
    };
    let superclasses = s
        .blocks
        .iter()
        .map(|b| b.iter().map(|&i| code_to_string(g.code(i))).collect())
        .collect();
    let supercharacters = s.chars.iter().map(|c| char_to_wire(c, s)).collect();
    SCTheoryWire {
        group,
        provenance: s.provenance.clone(),
        superclasses,
        supercharacters,
    }
}

/// Serializes a theory as a pretty-printed JSON document.
pub fn export_json(s: &SCTheory) -> String {
    let mut doc = serde_json::to_string_pretty(&to_wire(s)).expect("wire form serializes");
    doc.push('\n');
    doc
}

/// Rebuilds a theory from its JSON document. The result carries a
/// freshly enumerated group and compares equal to the exported theory.
pub fn import_json(doc: &str) -> Result<SCTheory, CliError> {
    let wire: SCTheoryWire =
        serde_json::from_str(doc).map_err(|e| CliError::Schema(format!("bad theory JSON: {e}")))?;
    import_wire(&wire)
}

pub fn import_wire(wire: &SCTheoryWire) -> Result<SCTheory, CliError> {
    let gw = &wire.group;
    let field = Field::new(gw.p, gw.degree, Some(gw.modulus.clone()))
        .map_err(|e| CliError::Schema(format!("bad field: {e}")))?;
    let amb = Ambient::new(gw.n, field);
    let codes: Vec<Code> = gw
        .elements
        .iter()
        .map(|s| {
            let c = code_from_string(s)?;
            if c.len() != amb.arc_count() {
                return Err(CliError::Schema(format!(
                    "element code {s:?} has {} entries, expected {}",
                    c.len(),
                    amb.arc_count()
                )));
            }
            Ok(c)
        })
        .collect::<Result<_, _>>()?;
    if codes.len() != gw.order {
        return Err(CliError::Schema(format!(
            "group order {} does not match {} listed elements",
            gw.order,
            codes.len()
        )));
    }
    let group = Group::from_codes(amb, codes);
    if group.order() != gw.order {
        return Err(CliError::Schema("duplicate element codes".to_string()));
    }
    let classes = ConjClasses::new(group.clone());
    let mut blocks = Vec::with_capacity(wire.superclasses.len());
    let mut block_of = vec![usize::MAX; group.order()];
    for (bi, b) in wire.superclasses.iter().enumerate() {
        if b.is_empty() {
            return Err(CliError::Schema("empty superclass".to_string()));
        }
        let mut idxs = Vec::with_capacity(b.len());
        for cs in b {
            let code = code_from_string(cs)?;
            let i = group.idx(&code).ok_or_else(|| {
                CliError::Schema(format!("superclass member {cs:?} not in group"))
            })?;
            idxs.push(i);
            block_of[i] = bi;
        }
        blocks.push(idxs);
    }
    if block_of.iter().any(|&b| b == usize::MAX) {
        return Err(CliError::Schema(
            "superclasses do not cover the group".to_string(),
        ));
    }
    let mut chars = Vec::with_capacity(wire.supercharacters.len());
    for cw in &wire.supercharacters {
        if cw.values.len() != blocks.len() {
            return Err(CliError::Schema(format!(
                "character lists {} values for {} superclasses",
                cw.values.len(),
                blocks.len()
            )));
        }
        let mut per_block = Vec::with_capacity(cw.values.len());
        for coeffs in &cw.values {
            let coeffs = coeffs
                .iter()
                .map(|s| rational_from_string(s))
                .collect::<Result<Vec<_>, _>>()?;
            per_block.push(Cyclotomic {
                m: cw.conductor,
                coeffs,
            });
        }
        chars.push(ClassFunction::from_elem_fn(classes.clone(), |i| {
            per_block[block_of[i]].clone()
        }));
    }
    let notes = vec!["imported".to_string(); chars.len()];
    Ok(SCTheory::assemble(
        classes,
        blocks,
        chars,
        &wire.provenance,
        notes,
    ))
}

/// Serializes the supercharacter table as CSV: rows are characters,
/// columns are superclass representatives (least element codes),
/// values rendered as polynomial strings in the fixed primitive m-th
/// root z.
pub fn export_csv(s: &SCTheory) -> String {
    let g = s.group();
    let mut out = String::from("character");
    for b in &s.blocks {
        out.push(',');
        out.push_str(&code_to_string(g.code(b[0])));
    }
    out.push('\n');
    for (ci, c) in s.chars.iter().enumerate() {
        out.push_str(&format!("chi{ci}"));
        for b in &s.blocks {
            out.push(',');
            let v = c
                .value_at_code(g.code(b[0]))
                .expect("block member is a group element");
            out.push_str(&v.render());
        }
        out.push('\n');
    }
    out
}
