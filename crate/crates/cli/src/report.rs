//! Text renderings of scores, curves, graphs and bound checks.

use std::fmt::Write as _;

use rcc_core::causal::{CausalDag, DecisionRateCurve};

/// Shortest round-trip decimal, always with a fractional part or exponent.
pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

/// `name,score` rows in input order.
pub fn scores_csv(rows: &[(String, f64)]) -> String {
    let mut out = String::from("name,score\n");
    for (name, score) in rows {
        let _ = writeln!(out, "{},{}", csv_field(name), fmt_float(*score));
    }
    out
}

/// `rate,accuracy` rows at rates `k/N`, ascending and ending at `1.0`.
pub fn decision_rate_csv(curve: &DecisionRateCurve) -> String {
    let mut out = String::from("rate,accuracy\n");
    for (rate, acc) in &curve.points {
        let _ = writeln!(out, "{},{}", fmt_float(*rate), fmt_float(*acc));
    }
    out
}

/// DOT digraph listing every vertex, then every edge with its confidence.
pub fn dag_dot(dag: &CausalDag) -> String {
    let mut out = String::from("digraph causal {\n");
    for name in dag.names() {
        let _ = writeln!(out, "  {};", dot_id(name));
    }
    for e in dag.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{:.6}\"];",
            dot_id(&dag.names()[e.from]),
            dot_id(&dag.names()[e.to]),
            e.confidence
        );
    }
    out.push_str("}\n");
    out
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row of the bounds report.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub check: &'static str,
    pub index: usize,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl BoundCheck {
    pub fn passed(&self) -> bool {
        self.lower.is_none_or(|l| self.value >= l) && self.upper.is_none_or(|u| self.value <= u)
    }
}

/// `check,index,value,lower,upper,pass`; a missing bound is an empty field.
pub fn bounds_csv(rows: &[BoundCheck]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let mut out = String::from("check,index,value,lower,upper,pass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.check,
            r.index,
            fmt_float(r.value),
            opt(r.lower),
            opt(r.upper),
            r.passed()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rcc_core::causal::{CausationScore, Edge};

    #[test]
    fn dot_golden() {
        let names = vec!["X1".to_string(), "X2".to_string(), "X3".to_string()];
        let dag = CausalDag::new(names, vec![Edge { from: 0, to: 1, confidence: 0.8123 }]).unwrap();
        assert_eq!(
            dag_dot(&dag),
            "digraph causal {\n  \"X1\";\n  \"X2\";\n  \"X3\";\n  \"X1\" -> \"X2\" [label=\"0.812300\"];\n}\n"
        );
    }

    #[test]
    fn curve_golden() {
        let scores = [CausationScore { value: 0.9 }, CausationScore { value: -0.2 }];
        let curve = rcc_core::causal::decision_rate_curve(&scores, &[1, 1]).unwrap();
        assert_eq!(decision_rate_csv(&curve), "rate,accuracy\n0.5,1.0\n1.0,0.5\n");
    }

    #[test]
    fn scores_and_bounds_golden() {
        assert_eq!(scores_csv(&[("a,b".into(), -0.25)]), "name,score\n\"a,b\",-0.25\n");
        let rows = [
            BoundCheck { check: "feature_map_error", index: 0, value: 0.01, lower: None, upper: Some(0.5) },
            BoundCheck { check: "rate_slope", index: 0, value: -0.7, lower: Some(-0.6), upper: Some(-0.4) },
        ];
        assert_eq!(
            bounds_csv(&rows),
            "check,index,value,lower,upper,pass\nfeature_map_error,0,0.01,,0.5,true\nrate_slope,0,-0.7,-0.6,-0.4,false\n"
        );
    }
}
