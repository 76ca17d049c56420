//! MacKay's alist text format.
//!
//! Lines starting with `#` are comments. A PEG-built matrix carries its seed
//! as `# peg seed=<u64>` ahead of the body.

use std::fmt::Write as _;
use std::path::Path;

use super::ParityCheckMatrix;
use crate::error::{Error, Result};

fn parse_err(detail: impl Into<String>) -> Error {
    Error::Parse {
        what: "alist",
        detail: detail.into(),
    }
}

impl ParityCheckMatrix {
    pub fn to_alist(&self) -> String {
        let mut out = String::new();
        if let Some(seed) = self.seed {
            writeln!(out, "# peg seed={seed}").unwrap();
        }
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        writeln!(out, "{} {}", self.n_l, self.rows.len()).unwrap();
        writeln!(out, "{max_col} {max_row}").unwrap();
        let degrees = |lists: &[Vec<usize>]| {
            lists
                .iter()
                .map(|l| l.len().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "{}", degrees(&self.cols)).unwrap();
        writeln!(out, "{}", degrees(&self.rows)).unwrap();
        for list in self.cols.iter().chain(&self.rows) {
            let line: Vec<String> = list.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// Parses an alist body. Zero entries used as padding are skipped; the
    /// column lists must agree with the row lists.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut seed = None;
        let mut body = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("peg seed=") {
                    seed = Some(
                        v.trim()
                            .parse::<u64>()
                            .map_err(|e| parse_err(format!("seed: {e}")))?,
                    );
                }
            } else if !line.is_empty() {
                body.push(line);
            }
        }
        let numbers = |line: &str| -> Result<Vec<usize>> {
            line.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| parse_err(format!("{t:?}: {e}")))
                })
                .collect()
        };
        let mut lines = body.into_iter();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(format!("missing {what}")))
        };

        let dims = numbers(next("dimensions")?)?;
        let [n_l, m] = dims[..] else {
            return Err(parse_err("first line must hold N and M"));
        };
        numbers(next("maximum degrees")?)?;
        let col_deg = numbers(next("column degrees")?)?;
        let row_deg = numbers(next("row degrees")?)?;
        if col_deg.len() != n_l || row_deg.len() != m {
            return Err(parse_err("degree lists do not match the dimensions"));
        }
        let mut read_lists = |count: usize,
                              bound: usize,
                              degrees: &[usize],
                              what: &str|
         -> Result<Vec<Vec<usize>>> {
            (0..count)
                .map(|i| {
                    let list: Vec<usize> = numbers(next(what)?)?
                        .into_iter()
                        .filter(|&x| x != 0)
                        .map(|x| x - 1)
                        .collect();
                    if list.len() != degrees[i] {
                        return Err(parse_err(format!(
                            "{what} {i} has {} entries, expected {}",
                            list.len(),
                            degrees[i]
                        )));
                    }
                    if let Some(&x) = list.iter().find(|&&x| x >= bound) {
                        return Err(parse_err(format!("{what} {i} refers to index {}", x + 1)));
                    }
                    Ok(list)
                })
                .collect()
        };
        let cols = read_lists(n_l, m, &col_deg, "column")?;
        let rows = read_lists(m, n_l, &row_deg, "row")?;
        let h = ParityCheckMatrix::from_rows(n_l, rows, seed)?;
        let mut cols = cols;
        cols.iter_mut().for_each(|c| c.sort_unstable());
        if cols != h.cols {
            return Err(parse_err("column lists disagree with row lists"));
        }
        Ok(h)
    }

    pub fn write_alist(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_alist()).map_err(|e| Error::io(path, e))
    }

    pub fn read_alist(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_alist(&text)
    }
}
