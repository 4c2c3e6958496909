use serde::{Deserialize, Serialize};

use crate::polynewton::{parse_poly, SparsePoly};

/// A normal-form phase with its known decay law |J(t)| ~ t^β log^p t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPhase {
    pub name: String,
    pub expr: String,
    pub beta: f64,
    pub log_power: u32,
}

impl ModelPhase {
    pub fn poly(&self) -> SparsePoly {
        parse_poly(&self.expr).expect("catalog expressions are well formed")
    }
}

pub fn model_phase_catalog() -> Vec<ModelPhase> {
    let entry = |name: &str, expr: &str, beta: f64, log_power: u32| ModelPhase {
        name: name.to_string(),
        expr: expr.to_string(),
        beta,
        log_power,
    };
    vec![
        entry("A1", "x1^2", -1.0 / 2.0, 0),
        entry("A2", "x1^3", -1.0 / 3.0, 0),
        entry("A3", "x1^4", -1.0 / 4.0, 0),
        entry("D4-", "x1^2*x2 - x2^3", -2.0 / 3.0, 0),
        entry("x1x2x3", "x1*x2*x3", -1.0, 1),
        entry("x1^2x2", "x1^2*x2", -1.0 / 2.0, 0),
        entry("x1^2x2^2", "x1^2*x2^2", -1.0 / 2.0, 1),
        entry("z1(z2^2-z3^2)", "x1*x2^2 - x1*x3^2", -1.0, 1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_entries() {
        let c = model_phase_catalog();
        assert_eq!(c.len(), 8);
        let d4 = c.iter().find(|m| m.name == "D4-").unwrap();
        assert_eq!((d4.beta, d4.log_power), (-2.0 / 3.0, 0));
        assert_eq!(d4.poly().len(), 2);
        let x = c.iter().find(|m| m.expr == "x1*x2*x3").unwrap();
        assert_eq!((x.beta, x.log_power), (-1.0, 1));
        assert_eq!(c[0].beta, -0.5);
    }
}
