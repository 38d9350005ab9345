//! Sankey flow graphs built from selected rules.
//!
//! Each rule `A1 & .. & An => C1 & .. & Cm` with fitness `f` contributes the
//! chain `A1 -> A2 -> .. -> An` and the fan-out `An -> Ck` for every
//! consequent, every edge carrying `f`. Edges shared across rules are summed.
//! The JSON shape is the `{nodes: [{name}], links: [{source, target, value}]}`
//! layout that d3-sankey style renderers consume.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::dataset::FeatureCatalog;
use crate::error::{Error, Result};
use crate::rule::AssociationRule;
use crate::selector::RuleSelection;

const RENDERER: &str = include_str!("report.js");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub source: usize,
    pub target: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SankeyGraph {
    nodes: Vec<String>,
    links: Vec<Link>,
}

impl SankeyGraph {
    /// Checks index ranges, positive finite values, absence of self-loops,
    /// unique node names, and that every node is used by some link.
    pub fn new(nodes: Vec<String>, links: Vec<Link>) -> Result<Self> {
        let mut used = vec![false; nodes.len()];
        for (i, l) in links.iter().enumerate() {
            if l.source >= nodes.len() || l.target >= nodes.len() {
                return Err(Error::Graph(format!("link {i} points outside the node list")));
            }
            if l.source == l.target {
                return Err(Error::Graph(format!("link {i} is a self-loop")));
            }
            if !(l.value.is_finite() && l.value > 0.0) {
                return Err(Error::Graph(format!("link {i} has non-positive value {}", l.value)));
            }
            used[l.source] = true;
            used[l.target] = true;
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Graph(format!("node {:?} has no links", nodes[i])));
        }
        let mut names: Vec<&String> = nodes.iter().collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!("duplicate node {:?}", w[0])));
        }
        Ok(SankeyGraph { nodes, links })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, source: &str, target: &str) -> Option<&Link> {
        let s = self.nodes.iter().position(|n| n == source)?;
        let t = self.nodes.iter().position(|n| n == target)?;
        self.links.iter().find(|l| l.source == s && l.target == t)
    }

    /// Builds the flow for rules paired with their fitness, in order.
    pub fn from_rules<'a>(
        rules: impl IntoIterator<Item = (&'a AssociationRule, f64)>,
        catalog: &FeatureCatalog,
    ) -> Result<Self> {
        let mut builder = FlowBuilder::default();
        let mut any = false;
        for (rule, fitness) in rules {
            any = true;
            if !(fitness.is_finite() && fitness > 0.0) {
                return Err(Error::Graph(format!(
                    "rule {} has non-positive fitness {fitness}",
                    rule.format(catalog)
                )));
            }
            let ante: Vec<usize> = rule.antecedent().iter().map(|i| builder.node(i.name(catalog))).collect();
            let cons: Vec<usize> = rule.consequent().iter().map(|i| builder.node(i.name(catalog))).collect();
            let last = *ante.last().expect("antecedent is non-empty");
            for w in ante.windows(2) {
                builder.edge(w[0], w[1], fitness);
            }
            for c in cons {
                builder.edge(last, c, fitness);
            }
        }
        if !any {
            return Err(Error::Graph("cannot build a flow from an empty selection".into()));
        }
        SankeyGraph::new(builder.nodes, builder.links)
    }

    /// Parses the JSON emitted by [`emit_json`] and validates it.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Node {
            name: String,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawLink {
            source: usize,
            target: usize,
            value: f64,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            nodes: Vec<Node>,
            links: Vec<RawLink>,
        }
        let raw: Raw = serde_json::from_slice(bytes)?;
        SankeyGraph::new(
            raw.nodes.into_iter().map(|n| n.name).collect(),
            raw.links
                .into_iter()
                .map(|l| Link {
                    source: l.source,
                    target: l.target,
                    value: l.value,
                })
                .collect(),
        )
    }
}

#[derive(Default)]
struct FlowBuilder {
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    links: Vec<Link>,
    link_index: HashMap<(usize, usize), usize>,
}

impl FlowBuilder {
    fn node(&mut self, name: String) -> usize {
        if let Some(&i) = self.node_index.get(&name) {
            return i;
        }
        self.nodes.push(name.clone());
        self.node_index.insert(name, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn edge(&mut self, source: usize, target: usize, value: f64) {
        match self.link_index.get(&(source, target)) {
            Some(&i) => self.links[i].value += value,
            None => {
                self.link_index.insert((source, target), self.links.len());
                self.links.push(Link { source, target, value });
            }
        }
    }
}

/// Flow graph of a selection, edge widths taken from rule fitness.
pub fn build_flow(selection: &RuleSelection, catalog: &FeatureCatalog) -> Result<SankeyGraph> {
    SankeyGraph::from_rules(selection.chosen.iter().map(|r| (&r.rule, r.fitness)), catalog)
}

/// Numbers are rounded to six decimals with trailing zeros dropped.
fn format_number(v: f64) -> String {
    let fixed = format!("{v:.6}");
    let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "0" && v != 0.0 {
        // Positive but below the rounding step; keep it distinguishable from 0.
        format!("{v:e}")
    } else {
        trimmed.to_owned()
    }
}

/// JSON string literal. `<`, `>` and `&` are escaped too, so the output can
/// be embedded verbatim inside an HTML `<script>` element.
fn json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '<' | '>' | '&' | '\u{2028}' | '\u{2029}' => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Compact JSON: `{"nodes":[{"name":..}],"links":[{"source":..,"target":..,"value":..}]}`.
pub fn emit_json(graph: &SankeyGraph) -> Vec<u8> {
    let mut out = String::from("{\"nodes\":[");
    for (i, name) in graph.nodes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"name\":");
        json_string(&mut out, name);
        out.push('}');
    }
    out.push_str("],\"links\":[");
    for (i, l) in graph.links.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(
            out,
            "{{\"source\":{},\"target\":{},\"value\":{}}}",
            l.source,
            l.target,
            format_number(l.value)
        )
        .unwrap();
    }
    out.push_str("]}");
    out.into_bytes()
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Self-contained HTML page with one titled section per period, each
/// embedding that period's [`emit_json`] output and drawn by an inline script.
pub fn emit_report(graphs: &[(String, SankeyGraph)]) -> Result<Vec<u8>> {
    if graphs.is_empty() {
        return Err(Error::Graph("report needs at least one period".into()));
    }
    let mut out = String::new();
    out.push_str(concat!(
        "<!DOCTYPE html>\n",
        "<html lang=\"en\">\n",
        "<head>\n",
        "<meta charset=\"utf-8\">\n",
        "<title>Association rules over time</title>\n",
        "<style>\n",
        "body { font-family: sans-serif; margin: 2em; color: #222; }\n",
        "section.period { margin-bottom: 3em; }\n",
        "section.period h2 { margin-bottom: 0.2em; }\n",
        "p.label { color: #666; margin-top: 0; }\n",
        "svg.sankey { width: 100%; max-width: 960px; height: 420px; }\n",
        "svg.sankey text { font-size: 12px; }\n",
        "</style>\n",
        "</head>\n",
        "<body>\n",
        "<h1>Association rules over time</h1>\n",
    ));
    for (i, (label, graph)) in graphs.iter().enumerate() {
        let n = i + 1;
        let json = String::from_utf8(emit_json(graph)).expect("emit_json is UTF-8");
        write!(
            out,
            concat!(
                "<section class=\"period\">\n",
                "<h2>Time period {n}</h2>\n",
                "<p class=\"label\">{label}</p>\n",
                "<script type=\"application/json\" id=\"sankey-data-{n}\">{json}</script>\n",
                "<svg class=\"sankey\" data-graph=\"sankey-data-{n}\" viewBox=\"0 0 960 420\"></svg>\n",
                "</section>\n",
            ),
            n = n,
            label = html_escape(label),
            json = json,
        )
        .unwrap();
    }
    out.push_str("<script>\n");
    out.push_str(RENDERER);
    out.push_str("</script>\n</body>\n</html>\n");
    Ok(out.into_bytes())
}

/// Extracts the embedded per-period JSON documents from a report, in order.
pub fn report_graph_json(report: &[u8]) -> Vec<Vec<u8>> {
    let text = String::from_utf8_lossy(report);
    let mut found = Vec::new();
    let mut rest = text.as_ref();
    while let Some(start) = rest.find("<script type=\"application/json\"") {
        let after = &rest[start..];
        let Some(open_end) = after.find('>') else { break };
        let body = &after[open_end + 1..];
        let Some(close) = body.find("</script>") else { break };
        found.push(body.as_bytes()[..close].to_vec());
        rest = &body[close..];
    }
    found
}
