//! File formats: the edge-map JSON document carrying per-link values
//! (probabilities or costs) and the CSV tables the studies emit.
//!
//! CSV reals are printed with 17 significant digits so a parsed file
//! reproduces the computed doubles bit for bit.

use crate::studies::{ComparisonRow, ErRow};
use crate::AppError;
use randcon::{ArcccResult, EdgeProbabilityMatrix, Supergraph, Trajectory};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// One realizable link and its value; vertices are 1-based in files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeMapEntry {
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

/// Edge-map document: vertex count, per-link values, and optional
/// solver metadata attached by `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeMapFile {
    pub n: usize,
    pub edges: Vec<EdgeMapEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connected: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl EdgeMapFile {
    /// Captures a probability matrix, without metadata.
    pub fn from_probabilities(p: &EdgeProbabilityMatrix) -> Self {
        EdgeMapFile {
            n: p.n(),
            edges: p
                .edge_probs()
                .map(|((a, b), value)| EdgeMapEntry {
                    a: a + 1,
                    b: b + 1,
                    value,
                })
                .collect(),
            budget: None,
            lambda2: None,
            expected_cost: None,
            certified_gap: None,
            connected: None,
            iterations: None,
        }
    }

    /// Captures a solver result together with its run metadata.
    pub fn from_arccc(realizable: &Supergraph, budget: f64, result: &ArcccResult) -> Self {
        EdgeMapFile {
            n: realizable.n(),
            edges: realizable
                .edges()
                .iter()
                .zip(result.probabilities())
                .map(|(&(a, b), &value)| EdgeMapEntry {
                    a: a + 1,
                    b: b + 1,
                    value,
                })
                .collect(),
            budget: Some(budget),
            lambda2: Some(result.lambda2()),
            expected_cost: Some(result.expected_cost()),
            certified_gap: Some(result.certified_gap()),
            connected: Some(result.connected()),
            iterations: Some(result.iterations()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            AppError::Config(format!("cannot read edge map {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            AppError::Config(format!("invalid edge map {}: {e}", path.display()))
        })
    }

    /// Rebuilds the probability matrix the document describes.
    ///
    /// Entries may arrive in any order; they are normalized to the
    /// sorted edge order the library uses.
    pub fn to_probability_matrix(&self) -> Result<EdgeProbabilityMatrix, AppError> {
        let bad = |msg: String| AppError::Config(msg);
        let mut entries = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.a < 1 || e.a > self.n || e.b < 1 || e.b > self.n {
                return Err(bad(format!(
                    "edge {}-{} out of range for n = {}",
                    e.a, e.b, self.n
                )));
            }
            let (a, b) = (e.a - 1, e.b - 1);
            entries.push(((a.min(b), a.max(b)), e.value));
        }
        entries.sort_by_key(|x| x.0);
        let graph = Supergraph::new(self.n, entries.iter().map(|&(pair, _)| pair))
            .map_err(|e| bad(format!("invalid edge map: {e}")))?;
        let probs = entries.iter().map(|&(_, v)| v).collect();
        EdgeProbabilityMatrix::new(graph, probs)
            .map_err(|e| bad(format!("invalid edge map: {e}")))
    }

    pub fn write(&self, out: &mut dyn Write) -> Result<(), AppError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| AppError::Config(format!("cannot encode edge map: {e}")))?;
        writeln!(out, "{text}").map_err(|e| AppError::Config(format!("write failed: {e}")))
    }
}

/// 17 significant digits: enough to round-trip any finite double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Opens `--out` as a file, or stdout when no path was given.
pub fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, AppError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| {
                AppError::Config(format!("cannot create {}: {e}", p.display()))
            })?;
            Ok(Box::new(std::io::BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn emit(out: &mut dyn Write, line: &str) -> Result<(), AppError> {
    writeln!(out, "{line}").map_err(|e| AppError::Config(format!("write failed: {e}")))
}

pub fn write_comparison_csv(rows: &[ComparisonRow], out: &mut dyn Write) -> Result<(), AppError> {
    emit(
        out,
        "label,budget_or_radius,expected_cost,lambda2_mean_laplacian,alpha_star,gain,gain_stderr,gain_is_sentinel",
    )?;
    for r in rows {
        emit(
            out,
            &format!(
                "{},{},{},{},{},{},{},{}",
                r.label,
                fmt_f64(r.budget_or_radius),
                fmt_f64(r.expected_cost),
                fmt_f64(r.lambda2_mean),
                fmt_f64(r.alpha_star),
                fmt_f64(r.gain),
                fmt_f64(r.gain_stderr),
                r.gain_is_sentinel
            ),
        )?;
    }
    Ok(())
}

/// One step-size evaluation in the `analyze` table; labeled rows mark
/// the conservative step, the mean-system optimum, and the search
/// result among the plain grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeRow {
    pub label: &'static str,
    pub alpha: f64,
    pub factor: f64,
    pub factor_stderr: f64,
    pub gain: f64,
}

pub fn write_analyze_csv(rows: &[AnalyzeRow], out: &mut dyn Write) -> Result<(), AppError> {
    emit(out, "label,alpha,factor,factor_stderr,gain")?;
    for r in rows {
        emit(
            out,
            &format!(
                "{},{},{},{},{}",
                r.label,
                fmt_f64(r.alpha),
                fmt_f64(r.factor),
                fmt_f64(r.factor_stderr),
                fmt_f64(r.gain)
            ),
        )?;
    }
    Ok(())
}

pub fn write_er_csv(rows: &[ErRow], out: &mut dyn Write) -> Result<(), AppError> {
    emit(
        out,
        "graph,draw,n_vertices,n_edges,lambda2_mean_laplacian,expected_lambda2,expected_lambda2_stderr,alpha_star,factor,factor_stderr,gain",
    )?;
    for r in rows {
        emit(
            out,
            &format!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.graph,
                r.draw,
                r.n_vertices,
                r.n_edges,
                fmt_f64(r.lambda2_mean),
                fmt_f64(r.expected_lambda2),
                fmt_f64(r.expected_lambda2_stderr),
                fmt_f64(r.alpha_star),
                fmt_f64(r.factor),
                fmt_f64(r.factor_stderr),
                fmt_f64(r.gain)
            ),
        )?;
    }
    Ok(())
}

/// Per-iteration error norms and states; one row per iteration, one
/// `node_k` column per sensor.
pub fn write_trajectory_csv(t: &Trajectory, out: &mut dyn Write) -> Result<(), AppError> {
    let states = t
        .states()
        .expect("simulation stores states for its trajectory output");
    let n = states.first().map_or(0, Vec::len);
    let mut header = String::from("iteration,error_norm");
    for k in 1..=n {
        header.push_str(&format!(",node_{k}"));
    }
    emit(out, &header)?;
    for (i, (state, err)) in states.iter().zip(t.error_norms()).enumerate() {
        let mut line = format!("{i},{}", fmt_f64(*err));
        for x in state {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        emit(out, &line)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use randcon::SeededRng;

    #[test]
    fn formatted_reals_round_trip() {
        let mut rng = SeededRng::new(5);
        for _ in 0..200 {
            let x = (rng.next_f64() - 0.5) * 1e6;
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        assert_eq!(fmt_f64(0.5).parse::<f64>().unwrap(), 0.5);
    }

    #[test]
    fn edge_map_round_trips_a_probability_matrix() {
        let g = Supergraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let p = EdgeProbabilityMatrix::new(g, vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let file = EdgeMapFile::from_probabilities(&p);
        assert!(file.edges.iter().all(|e| e.a >= 1 && e.b >= 1));
        let text = serde_json::to_string(&file).unwrap();
        let parsed: EdgeMapFile = serde_json::from_str(&text).unwrap();
        let q = parsed.to_probability_matrix().unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn edge_map_entries_normalize_in_any_order() {
        let doc = r#"{"n": 3, "edges": [
            {"a": 3, "b": 1, "value": 0.9},
            {"a": 1, "b": 2, "value": 0.1}
        ]}"#;
        let parsed: EdgeMapFile = serde_json::from_str(doc).unwrap();
        let p = parsed.to_probability_matrix().unwrap();
        assert_eq!(p.supergraph().edges(), &[(0, 1), (0, 2)]);
        assert_eq!(p.probs(), &[0.1, 0.9]);
    }

    #[test]
    fn edge_map_rejects_bad_documents() {
        let unknown = serde_json::from_str::<EdgeMapFile>(r#"{"n": 2, "links": []}"#);
        assert!(unknown.is_err(), "unknown keys must be rejected");
        let zero_based: EdgeMapFile =
            serde_json::from_str(r#"{"n": 2, "edges": [{"a": 0, "b": 1, "value": 0.5}]}"#).unwrap();
        assert!(zero_based.to_probability_matrix().is_err());
        let bad_prob: EdgeMapFile =
            serde_json::from_str(r#"{"n": 2, "edges": [{"a": 1, "b": 2, "value": 1.5}]}"#).unwrap();
        assert!(bad_prob.to_probability_matrix().is_err());
    }
}
