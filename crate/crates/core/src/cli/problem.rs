//! Problem files: an algebra and two densities in strict JSON.
//!
//! ```json
//! {
//!   "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
//!   "phi":   [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]],
//!   "omega": [[[[0.75, 0], [0, 0]], [[0, 0], [0.25, 0]]]],
//!   "options": {"renormalize": false}
//! }
//! ```
//!
//! `phi` and `omega` are lists of blocks; each block is a list of rows and
//! each entry is a `[re, im]` pair. Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::algebra::{validate_state, AlgebraSpec, CMatrix, Element, State, C64};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDesc {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDesc {
    pub blocks: Vec<BlockDesc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default)]
    pub renormalize: bool,
}

/// A block matrix as rows of `[re, im]` entries.
pub type BlockRows = Vec<Vec<[f64; 2]>>;

/// On-disk layout of a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebra: AlgebraDesc,
    pub phi: Vec<BlockRows>,
    pub omega: Vec<BlockRows>,
    #[serde(default)]
    pub options: ProblemOptions,
}

/// A parsed and validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub algebra: AlgebraSpec,
    pub phi: State,
    pub omega: State,
}

impl ProblemFile {
    /// Serializes two densities into the file layout.
    pub fn from_elements(spec: &AlgebraSpec, phi: &Element, omega: &Element, renormalize: bool) -> Self {
        let rows = |x: &Element| -> Vec<BlockRows> {
            x.blocks()
                .iter()
                .map(|m| m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect())
                .collect()
        };
        ProblemFile {
            algebra: AlgebraDesc {
                blocks: spec.blocks().iter().map(|b| BlockDesc { dim: b.dim, weight: b.weight }).collect(),
            },
            phi: rows(phi),
            omega: rows(omega),
            options: ProblemOptions { renormalize },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }
}

fn element_from_rows(spec: &AlgebraSpec, field: &str, blocks: &[BlockRows]) -> Result<Element, CliError> {
    if blocks.len() != spec.num_blocks() {
        return Err(CliError::parse(field, format!("expected {} blocks, found {}", spec.num_blocks(), blocks.len())));
    }
    let mut out = Vec::with_capacity(blocks.len());
    for (k, (rows, blk)) in blocks.iter().zip(spec.blocks()).enumerate() {
        let n = blk.dim;
        if rows.len() != n {
            return Err(CliError::parse(format!("{field}[{k}]"), format!("expected {n} rows, found {}", rows.len())));
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CliError::parse(
                    format!("{field}[{k}][{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::parse(format!("{field}[{k}][{i}][{j}]"), "entry is not finite"));
                }
                m[(i, j)] = C64::new(re, im);
            }
        }
        out.push(m);
    }
    Ok(Element::from_blocks(spec, out)?)
}

fn state_for(spec: &AlgebraSpec, field: &str, h: &Element, renormalize: bool) -> Result<State, CliError> {
    validate_state(spec, h, renormalize).map_err(|e| CliError::Validation { path: field.to_string(), source: e })
}

/// Strict parse and validation of a problem file.
pub fn parse_problem(bytes: &[u8]) -> Result<Problem, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::parse(path, e.into_inner().to_string())
    })?;

    let algebra = AlgebraSpec::new(file.algebra.blocks.iter().map(|b| (b.dim, b.weight)))
        .map_err(|e| CliError::Validation { path: "algebra.blocks".into(), source: e })?;
    let phi = element_from_rows(&algebra, "phi", &file.phi)?;
    let omega = element_from_rows(&algebra, "omega", &file.omega)?;
    let renormalize = file.options.renormalize;
    Ok(Problem {
        phi: state_for(&algebra, "phi", &phi, renormalize)?,
        omega: state_for(&algebra, "omega", &omega, renormalize)?,
        algebra,
    })
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation { path: String::new(), source: e }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
        "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
        "phi":   [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]],
        "omega": [[[[0.75, 0], [0, 0]], [[0, 0], [0.25, 0]]]],
        "options": {"renormalize": false}
    }"#;

    #[test]
    fn minimal_abelian_file() {
        let p =
            parse_problem(br#"{"algebra":{"blocks":[{"dim":1,"weight":1}]},"phi":[[[[1,0]]]],"omega":[[[[1,0]]]]}"#)
                .unwrap();
        assert_eq!(p.algebra.dims(), vec![1]);
        assert!((p.phi.h().blocks()[0][(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_file() {
        let p = parse_problem(QUBIT.as_bytes()).unwrap();
        assert!((p.omega.h().blocks()[0][(0, 0)].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_names_block() {
        let text = QUBIT.replace(r#"[[[[0.5, 0], [0, 0]]"#, r#"[[[[0.5, 0], [0.3, 0]]"#);
        match parse_problem(text.as_bytes()) {
            Err(CliError::Validation { path, source: Error::NotHermitian { block: 0, .. } }) => assert_eq!(path, "phi"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_weight_is_rejected() {
        let text = QUBIT.replace(r#""weight": 1.0"#, r#""weight": 0"#);
        match parse_problem(text.as_bytes()) {
            Err(CliError::Validation { path, source: Error::InvalidAlgebra(_) }) => assert_eq!(path, "algebra.blocks"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_names_path() {
        let text = QUBIT.replace(r#""renormalize": false"#, r#""renormalize": false, "extra": 1"#);
        match parse_problem(text.as_bytes()) {
            Err(CliError::Parse { path, message }) => {
                assert_eq!(path, "options.extra");
                assert!(message.contains("extra"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_name_path() {
        let text = QUBIT.replace(r#"[[0, 0], [0.5, 0]]]]"#, r#"[[0, 0]]]]"#);
        match parse_problem(text.as_bytes()) {
            Err(CliError::Parse { path, .. }) => assert_eq!(path, "phi[0][1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_entry_names_path() {
        let text = QUBIT.replace(r#"[[[[0.75, 0]"#, r#"[[[[0.75]"#);
        match parse_problem(text.as_bytes()) {
            Err(CliError::Parse { path, .. }) => assert!(path.starts_with("omega[0][0][0]"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unnormalized_needs_flag() {
        let text = QUBIT.replace("0.75", "1.5");
        assert!(matches!(
            parse_problem(text.as_bytes()),
            Err(CliError::Validation { source: Error::NotNormalized { .. }, .. })
        ));
        let text = text.replace(r#""renormalize": false"#, r#""renormalize": true"#);
        let p = parse_problem(text.as_bytes()).unwrap();
        assert!((p.omega.h().blocks()[0][(0, 0)].re - 1.5 / 1.75).abs() < 1e-15);
    }

    #[test]
    fn writer_round_trips() {
        let p = parse_problem(QUBIT.as_bytes()).unwrap();
        let text = ProblemFile::from_elements(&p.algebra, p.phi.h(), p.omega.h(), false).to_json();
        let back = parse_problem(text.as_bytes()).unwrap();
        assert_eq!(back.phi, p.phi);
        assert_eq!(back.omega, p.omega);
    }
}
