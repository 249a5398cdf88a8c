//! Per-iteration records of the winning-move algorithms.

use serde::Serialize;

/// One table row. Empty fields render as blank cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    /// Loop index as printed: `""` for the initial row, `"5"`, `"x=4"`, `"y=1"`, ...
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    /// Subscript of `m[0]`.
    pub m_first: usize,
    pub m: Vec<i64>,
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub delta_sum: Option<i64>,
    #[serde(rename = "delta", skip_serializing_if = "Option::is_none")]
    pub delta_me: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u64>>,
}

impl TraceRow {
    pub fn new(label: impl Into<String>) -> Self {
        TraceRow {
            label: label.into(),
            d: None,
            m_first: 2,
            m: Vec::new(),
            delta_sum: None,
            delta_me: None,
            r: None,
        }
    }

    /// `m_i` for the subscript `i`, if this row shows it.
    pub fn m_at(&self, i: usize) -> Option<i64> {
        i.checked_sub(self.m_first).and_then(|j| self.m.get(j).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgorithmTrace {
    pub algorithm: String,
    pub ell: usize,
    pub rows: Vec<TraceRow>,
}

impl AlgorithmTrace {
    pub fn new(algorithm: &str, ell: usize) -> Self {
        AlgorithmTrace {
            algorithm: algorithm.to_string(),
            ell,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    /// Aligned text table with columns index, Δ, m_2.., δ, r.
    pub fn render(&self) -> String {
        let index_head = if self.algorithm == "small-delta" { "x,y" } else { "j" };
        let show_big = self.rows.iter().any(|r| r.delta_sum.is_some());
        let show_small = self.rows.iter().any(|r| r.delta_me.is_some());
        let m_last = self
            .rows
            .iter()
            .filter(|r| !r.m.is_empty())
            .map(|r| r.m_first + r.m.len() - 1)
            .max();

        let mut header = vec![index_head.to_string()];
        if show_big {
            header.push("Δ".into());
        }
        if let Some(last) = m_last {
            header.extend((2..=last).map(|i| format!("m_{i}")));
        }
        if show_small {
            header.push("δ".into());
        }
        header.push("r".into());

        let fmt_pos = |r: &[u64]| {
            let parts: Vec<String> = r.iter().map(u64::to_string).collect();
            format!("({})", parts.join(","))
        };
        let mut table = vec![header];
        for row in &self.rows {
            let mut cells = vec![row.label.clone()];
            if show_big {
                cells.push(row.delta_sum.map(|v| v.to_string()).unwrap_or_default());
            }
            if let Some(last) = m_last {
                cells.extend((2..=last).map(|i| row.m_at(i).map(|v| v.to_string()).unwrap_or_default()));
            }
            if show_small {
                cells.push(row.delta_me.map(|v| v.to_string()).unwrap_or_default());
            }
            cells.push(row.r.as_deref().map(fmt_pos).unwrap_or_default());
            table.push(cells);
        }

        let cols = table[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}", w = *w))
                .collect();
            out.push_str(line.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}
