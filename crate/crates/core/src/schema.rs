//! Attribute declarations, instances and validated datasets.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttributeKind {
    Nominal { values: Vec<String> },
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

impl AttributeDecl {
    pub fn nominal<S: Into<String>>(name: S, values: impl IntoIterator<Item = S>) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttributeKind::Nominal {
                values: values.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn numeric<S: Into<String>>(name: S) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric)
    }

    /// Declared nominal values, empty for numeric attributes.
    pub fn values(&self) -> &[String] {
        match &self.kind {
            AttributeKind::Nominal { values } => values,
            AttributeKind::Numeric => &[],
        }
    }
}

/// Ordered attribute declarations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AttributeDecl>", into = "Vec<AttributeDecl>")]
pub struct Schema {
    attributes: Vec<AttributeDecl>,
}

impl Schema {
    pub fn new(attributes: Vec<AttributeDecl>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::InvalidSchema(
                "at least one attribute is required".into(),
            ));
        }
        let mut names = HashSet::new();
        for attr in &attributes {
            if attr.name.is_empty() {
                return Err(Error::InvalidSchema(
                    "attribute names must be non-empty".into(),
                ));
            }
            if !names.insert(attr.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if let AttributeKind::Nominal { values } = &attr.kind {
                if values.is_empty() {
                    return Err(Error::InvalidSchema(format!(
                        "nominal attribute `{}` has an empty value set",
                        attr.name
                    )));
                }
                let mut seen = HashSet::new();
                if let Some(dup) = values.iter().find(|v| !seen.insert(v.as_str())) {
                    return Err(Error::InvalidSchema(format!(
                        "nominal attribute `{}` declares `{dup}` twice",
                        attr.name
                    )));
                }
            }
        }
        Ok(Schema { attributes })
    }

    pub fn attributes(&self) -> &[AttributeDecl] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attribute(&self, j: usize) -> &AttributeDecl {
        &self.attributes[j]
    }

    pub fn is_all_nominal(&self) -> bool {
        self.attributes.iter().all(|a| !a.is_numeric())
    }

    pub fn is_all_numeric(&self) -> bool {
        self.attributes.iter().all(AttributeDecl::is_numeric)
    }

    /// Position of `value` in the declared value set of attribute `j`.
    pub fn nominal_index(&self, j: usize, value: &str) -> Option<usize> {
        self.attributes[j].values().iter().position(|v| v == value)
    }
}

impl TryFrom<Vec<AttributeDecl>> for Schema {
    type Error = Error;

    fn try_from(attributes: Vec<AttributeDecl>) -> Result<Self> {
        Schema::new(attributes)
    }
}

impl From<Schema> for Vec<AttributeDecl> {
    fn from(schema: Schema) -> Self {
        schema.attributes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value<T> {
    Numeric(T),
    Nominal(String),
}

impl<T: fmt::Display> fmt::Display for Value<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Numeric(x) => write!(f, "{x}"),
            Value::Nominal(s) => f.write_str(s),
        }
    }
}

/// One observation: a value per schema attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance<T> {
    pub values: Vec<Value<T>>,
}

impl<T> Instance<T> {
    pub fn new(values: Vec<Value<T>>) -> Self {
        Instance { values }
    }

    pub fn numeric(values: impl IntoIterator<Item = T>) -> Self {
        Instance {
            values: values.into_iter().map(Value::Numeric).collect(),
        }
    }

    pub fn nominal<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Self {
        Instance {
            values: values
                .into_iter()
                .map(|s| Value::Nominal(s.into()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T: Copy> Instance<T> {
    /// Numeric value of attribute `j`, if it is one.
    pub fn number(&self, j: usize) -> Option<T> {
        match self.values.get(j) {
            Some(Value::Numeric(x)) => Some(*x),
            _ => None,
        }
    }
}

impl<T> Instance<T> {
    pub fn label(&self, j: usize) -> Option<&str> {
        match self.values.get(j) {
            Some(Value::Nominal(s)) => Some(s),
            _ => None,
        }
    }
}

/// Checks an instance against the schema.
pub fn validate_instance<T: Scalar>(schema: &Schema, inst: &Instance<T>) -> Result<()> {
    if inst.len() != schema.len() {
        return Err(Error::ArityMismatch {
            expected: schema.len(),
            found: inst.len(),
        });
    }
    for (attr, value) in schema.attributes().iter().zip(&inst.values) {
        match (&attr.kind, value) {
            (AttributeKind::Numeric, Value::Numeric(x)) => {
                if !x.to_f64().is_finite() {
                    return Err(Error::NonFiniteNumeric {
                        attribute: attr.name.clone(),
                    });
                }
            }
            (AttributeKind::Nominal { values }, Value::Nominal(s)) => {
                if !values.contains(s) {
                    return Err(Error::UnknownNominalValue {
                        attribute: attr.name.clone(),
                        value: s.clone(),
                    });
                }
            }
            (AttributeKind::Numeric, Value::Nominal(_)) => {
                return Err(Error::KindMismatch {
                    attribute: attr.name.clone(),
                    expected: "numeric",
                })
            }
            (AttributeKind::Nominal { .. }, Value::Numeric(_)) => {
                return Err(Error::KindMismatch {
                    attribute: attr.name.clone(),
                    expected: "nominal",
                })
            }
        }
    }
    Ok(())
}

/// A schema together with instances that all validate against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    schema: Schema,
    instances: Vec<Instance<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(schema: Schema, instances: Vec<Instance<T>>) -> Result<Self> {
        for inst in &instances {
            validate_instance(&schema, inst)?;
        }
        Ok(Dataset { schema, instances })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance<T>] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// All values of numeric attribute `j`, in instance order.
    pub fn column(&self, j: usize) -> Vec<T> {
        self.instances
            .iter()
            .filter_map(|inst| inst.number(j))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn colors() -> Schema {
        Schema::new(vec![AttributeDecl::nominal("A1", ["red", "blue"])]).unwrap()
    }

    #[test]
    fn well_formed_numeric_instance() {
        let schema = Schema::new(vec![AttributeDecl::numeric("A1")]).unwrap();
        assert_eq!(
            validate_instance(&schema, &Instance::numeric([2.0])),
            Ok(())
        );
    }

    #[test]
    fn unknown_nominal_value_names_attribute() {
        let err = validate_instance::<f64>(&colors(), &Instance::nominal(["green"])).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownNominalValue {
                attribute: "A1".into(),
                value: "green".into()
            }
        );
    }

    #[test]
    fn arity_mismatch() {
        let schema = Schema::new(vec![
            AttributeDecl::numeric("A1"),
            AttributeDecl::numeric("A2"),
        ])
        .unwrap();
        let err = validate_instance(&schema, &Instance::numeric([1.0])).unwrap_err();
        assert_eq!(
            err,
            Error::ArityMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn non_finite_numeric() {
        let schema = Schema::new(vec![AttributeDecl::numeric("x")]).unwrap();
        for bad in [f64::NAN, f64::INFINITY] {
            let err = validate_instance(&schema, &Instance::numeric([bad])).unwrap_err();
            assert_eq!(
                err,
                Error::NonFiniteNumeric {
                    attribute: "x".into()
                }
            );
        }
    }

    #[test]
    fn schema_invariants() {
        assert!(Schema::new(vec![]).is_err());
        assert!(Schema::new(vec![AttributeDecl::numeric("")]).is_err());
        assert!(Schema::new(vec![
            AttributeDecl::numeric("a"),
            AttributeDecl::numeric("a")
        ])
        .is_err());
        assert!(Schema::new(vec![AttributeDecl::nominal("a", Vec::<&str>::new())]).is_err());
        assert!(Schema::new(vec![AttributeDecl::nominal("a", ["x", "x"])]).is_err());
    }

    #[test]
    fn schema_serde_validates() {
        let json =
            r#"[{"name":"a","kind":"numeric"},{"name":"b","kind":"nominal","values":["x","y"]}]"#;
        let schema: Schema = serde_json::from_str(json).unwrap();
        assert_eq!(schema.nominal_index(1, "y"), Some(1));
        assert_eq!(serde_json::to_string(&schema).unwrap(), json);
        assert!(serde_json::from_str::<Schema>(r#"[]"#).is_err());
    }
}
