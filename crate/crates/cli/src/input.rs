//! JSON input files: forms, operators and adjusted triples.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use diffinv_core::diffop::LinearDiffOp;
use diffinv_core::fnonlinear::FOperator;
use diffinv_core::poly::{MultiIndex, Vars};
use diffinv_core::transvect::NAryForm;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// `{"variables": ["x", "y"], "degree": 4, "polynomial": "x^4 + y^4"}`
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FormFile {
    pub variables: Vec<String>,
    pub degree: u32,
    pub polynomial: String,
}

impl FormFile {
    pub fn from_form(f: &NAryForm) -> Self {
        FormFile {
            variables: f.vars().names().to_vec(),
            degree: f.degree(),
            polynomial: f.format(),
        }
    }

    pub fn form(&self) -> Result<NAryForm, Failure> {
        let vars = Vars::new(self.variables.iter().map(String::as_str));
        NAryForm::parse(vars, self.degree, &self.polynomial).map_err(|e| Failure::data(format!("form: {e}")))
    }
}

/// An operator: coordinate names, order, and coefficients keyed by
/// comma-separated multi-indices such as `"4,0"`. `frame` and `box` are
/// optional defaults for the command-line flags.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub variables: Vec<String>,
    pub order: u32,
    pub coefficients: BTreeMap<String, String>,
    pub frame: Option<String>,
    #[serde(rename = "box")]
    pub domain: Option<String>,
}

impl OperatorFile {
    fn terms(&self) -> Result<Vec<(MultiIndex, &str)>, Failure> {
        let n = self.variables.len();
        self.coefficients
            .iter()
            .map(|(key, c)| {
                let entries = key
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| Failure::data(format!("bad multi-index `{key}`")))?;
                if entries.len() != n {
                    return Err(Failure::data(format!("multi-index `{key}` needs {n} entries")));
                }
                Ok((MultiIndex::from(entries), c.as_str()))
            })
            .collect()
    }

    pub fn linear(&self) -> Result<LinearDiffOp, Failure> {
        let vars = Vars::new(self.variables.iter().map(String::as_str));
        LinearDiffOp::parse(vars, self.variables.len(), self.order, self.terms()?)
            .map_err(|e| Failure::data(format!("operator: {e}")))
    }

    /// Coefficients may also use `u`, the value of the unknown function.
    pub fn nonlinear(&self) -> Result<FOperator, Failure> {
        let coords: Vec<&str> = self.variables.iter().map(String::as_str).collect();
        FOperator::parse(&coords, self.order, self.terms()?).map_err(|e| Failure::data(format!("operator: {e}")))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(coeffs: &[(&str, &str)]) -> OperatorFile {
        OperatorFile {
            variables: vec!["x1".into(), "x2".into()],
            order: 2,
            coefficients: coeffs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            frame: None,
            domain: None,
        }
    }

    #[test]
    fn multi_index_keys() {
        let a = op(&[("2, 0", "x1"), ("0,0", "1")]).linear().unwrap();
        assert_eq!(a.coeffs().len(), 2);
        assert!(op(&[("2", "1")]).linear().is_err());
        assert!(op(&[("a,b", "1")]).linear().is_err());
        assert!(op(&[("3,0", "1")]).linear().is_err());
    }

    #[test]
    fn nonlinear_coefficients_may_use_u() {
        assert!(op(&[("0,0", "x2*u")]).nonlinear().is_ok());
        assert!(op(&[("0,0", "x2*u")]).linear().is_err());
    }

    #[test]
    fn form_round_trip() {
        let f = FormFile {
            variables: vec!["x".into(), "y".into()],
            degree: 2,
            polynomial: "x^2 - 3*x*y".into(),
        };
        let g = FormFile::from_form(&f.form().unwrap());
        assert_eq!(g.form().unwrap(), f.form().unwrap());
        let bad = FormFile { degree: 3, ..f };
        assert!(bad.form().is_err());
    }
}
