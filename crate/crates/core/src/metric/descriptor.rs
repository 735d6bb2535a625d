use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::ModelMetric;
use crate::error::{FinslerError, Result};

/// JSON selector for a built-in metric:
/// `{"name": "klein", "dim": 2, "params": {}}`.
///
/// Parameters per name: `euclidean` takes `ball` (bool), `sphere` takes
/// `radius` (> 0), `randers` takes `eps` (finite) and `radius` (> 0);
/// `klein` and `funk` take none. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDescriptor {
    pub name: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub params: Map<String, Value>,
}

fn default_dim() -> usize {
    2
}

impl MetricDescriptor {
    pub fn named(name: &str, dim: usize) -> Self {
        MetricDescriptor {
            name: name.to_string(),
            dim,
            params: Map::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FinslerError::InvalidDescriptor(e.to_string()))
    }

    pub fn build(&self) -> Result<ModelMetric> {
        let dim = self.dim;
        if !(2..=4).contains(&dim) {
            return Err(FinslerError::InvalidDescriptor(format!(
                "dim must be in 2..=4, got {dim}"
            )));
        }
        let allowed: &[&str] = match self.name.as_str() {
            "euclidean" => &["ball"],
            "sphere" => &["radius"],
            "klein" | "funk" => &[],
            "randers" => &["eps", "radius"],
            other => {
                return Err(FinslerError::InvalidDescriptor(format!(
                    "unknown metric '{other}'"
                )))
            }
        };
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(FinslerError::InvalidDescriptor(format!(
                "unknown parameter '{k}' for {}",
                self.name
            )));
        }
        let num = |key: &str, default: f64| -> Result<f64> {
            match self.params.get(key) {
                None => Ok(default),
                Some(v) => v.as_f64().filter(|v| v.is_finite()).ok_or_else(|| {
                    FinslerError::InvalidDescriptor(format!("'{key}' must be a finite number"))
                }),
            }
        };
        let positive = |key: &str, default: f64| -> Result<f64> {
            let v = num(key, default)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(FinslerError::InvalidDescriptor(format!("'{key}' must be positive")))
            }
        };
        Ok(match self.name.as_str() {
            "euclidean" => {
                let ball = match self.params.get("ball") {
                    None => false,
                    Some(Value::Bool(b)) => *b,
                    Some(_) => {
                        return Err(FinslerError::InvalidDescriptor(
                            "'ball' must be a boolean".into(),
                        ))
                    }
                };
                ModelMetric::Euclidean { dim, ball }
            }
            "sphere" => ModelMetric::Sphere {
                dim,
                radius: positive("radius", 1.0)?,
            },
            "klein" => ModelMetric::Klein { dim },
            "funk" => ModelMetric::Funk { dim },
            _ => ModelMetric::Randers {
                dim,
                eps: num("eps", 0.3)?,
                radius: positive("radius", 1.0)?,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FinslerMetric;

    #[test]
    fn parses_and_builds() {
        let d = MetricDescriptor::from_json(r#"{"name":"sphere","dim":3,"params":{"radius":2.0}}"#).unwrap();
        let m = d.build().unwrap();
        assert_eq!(m, ModelMetric::Sphere { dim: 3, radius: 2.0 });
        assert_eq!(m.dim(), 3);
        let d = MetricDescriptor::from_json(r#"{"name":"klein"}"#).unwrap();
        assert_eq!(d.build().unwrap(), ModelMetric::klein(2));
    }

    #[test]
    fn rejects_unknown_keys_and_names() {
        assert!(MetricDescriptor::from_json(r#"{"name":"klein","colour":1}"#).is_err());
        let d = MetricDescriptor::from_json(r#"{"name":"klein","params":{"k":1}}"#).unwrap();
        assert!(d.build().is_err());
        assert!(MetricDescriptor::named("poincare", 2).build().is_err());
        assert!(MetricDescriptor::named("klein", 7).build().is_err());
        let d = MetricDescriptor::from_json(r#"{"name":"sphere","params":{"radius":-1}}"#).unwrap();
        assert!(d.build().is_err());
    }
}
