//! JSON report and Graphviz DOT rendering of a selection result.

use std::fmt::Write as _;

use serde::Serialize;

use super::{DecisionBasis, GraphClass, Reduction, SelectionResult};
use crate::error::Result;
use crate::graph::EdgeKind;
use crate::stats::Provenance;
use crate::testing::{AdjustMethod, ErrorRate, MonteCarlo};

#[derive(Serialize)]
struct Report<'a> {
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    ordering: Option<Vec<&'a str>>,
    variables: &'a [String],
    method: AdjustMethod,
    error_rate: ErrorRate,
    alpha: f64,
    decision_basis: DecisionBasis,
    monte_carlo: Option<MonteCarlo>,
    null_covariance: Option<Provenance>,
    reduction: Option<Reduction>,
    selected_edges: Vec<EdgeName<'a>>,
    prior_present: Vec<EdgeName<'a>>,
    tests: Vec<TestRow<'a>>,
}

#[derive(Serialize)]
struct EdgeName<'a> {
    from: &'a str,
    to: &'a str,
}

#[derive(Serialize)]
struct TestRow<'a> {
    from: &'a str,
    to: &'a str,
    given: Vec<&'a str>,
    n_eff: usize,
    r: f64,
    z: f64,
    statistic: f64,
    p_value: f64,
    adjusted: f64,
    selected: bool,
}

impl SelectionResult {
    fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    /// Pretty-printed JSON report naming vertices by variable name.
    pub fn to_json(&self) -> Result<String> {
        let edge = |&(i, j): &(usize, usize)| EdgeName { from: self.name(i), to: self.name(j) };
        let report = Report {
            class: self.class.name(),
            ordering: match &self.class {
                GraphClass::Dag(order) => Some(order.vertices().iter().map(|&v| self.name(v)).collect()),
                _ => None,
            },
            variables: &self.names,
            method: self.method,
            error_rate: self.error.rate,
            alpha: self.error.alpha,
            decision_basis: self.basis,
            monte_carlo: self.monte_carlo,
            null_covariance: self.null_provenance,
            reduction: self.reduction,
            selected_edges: self.graph.edges().iter().map(edge).collect(),
            prior_present: self.prior_present.iter().map(edge).collect(),
            tests: self
                .edges
                .iter()
                .map(|e| TestRow {
                    from: self.name(e.test.i),
                    to: self.name(e.test.j),
                    given: e.test.cond.iter().map(|&v| self.name(v)).collect(),
                    n_eff: e.test.n_eff,
                    r: e.test.r,
                    z: e.test.z,
                    statistic: e.test.statistic,
                    p_value: e.test.p_value,
                    adjusted: e.adjusted,
                    selected: e.selected,
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&report)?;
        out.push('\n');
        Ok(out)
    }

    /// Graphviz DOT: `graph` with `--` edges for undirected graphs, the same
    /// with `dir=both` for bidirected ones, and a `digraph` for DAGs.
    pub fn to_dot(&self) -> String {
        let kind = self.graph.kind();
        let mut out = String::new();
        let (keyword, token) = match kind {
            EdgeKind::Directed => ("digraph", "->"),
            _ => ("graph", "--"),
        };
        let _ = writeln!(out, "{keyword} G {{");
        for name in &self.names {
            let _ = writeln!(out, "  {};", quote(name));
        }
        for (i, j) in self.graph.edges() {
            let style = if kind == EdgeKind::Bidirected { " [dir=both]" } else { "" };
            let _ = writeln!(out, "  {} {token} {}{style};", quote(self.name(i)), quote(self.name(j)));
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
