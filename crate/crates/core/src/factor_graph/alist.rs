use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::FactorGraph;

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: neighbor index {index} out of range 1..={max}")]
    OutOfRange { line: usize, index: usize, max: usize },
    #[error("line {line}: check {check} does not list variable {var} (transpose mismatch)")]
    Transpose { line: usize, check: usize, var: usize },
    #[error("unexpected end of file after line {0}")]
    Truncated(usize),
}

/// Line-oriented cursor that skips blank lines and remembers 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self) -> Result<(usize, Vec<usize>), AlistError> {
        for (idx, raw) in self.inner.by_ref() {
            let line = idx + 1;
            self.last = line;
            if raw.trim().is_empty() {
                continue;
            }
            let nums = raw
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError::Parse {
                        line,
                        msg: format!("expected a non-negative integer, found {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((line, nums));
        }
        Err(AlistError::Truncated(self.last))
    }

    fn expect_len(&mut self, len: usize, what: &str) -> Result<(usize, Vec<usize>), AlistError> {
        let (line, nums) = self.next_numbers()?;
        if nums.len() != len {
            return Err(AlistError::Parse {
                line,
                msg: format!("{what}: expected {len} values, found {}", nums.len()),
            });
        }
        Ok((line, nums))
    }
}

/// Parses alist text. Zeros in neighbor lists are padding.
pub fn parse_alist(text: &str) -> Result<FactorGraph, AlistError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (_, header) = lines.expect_len(2, "header \"n m\"")?;
    let (n, m) = (header[0], header[1]);
    let (_, maxdeg) = lines.expect_len(2, "maximum degrees")?;
    let (col_line, col_deg) = lines.expect_len(n, "variable degrees")?;
    let (row_line, row_deg) = lines.expect_len(m, "check degrees")?;
    for (line, degs, cap) in [(col_line, &col_deg, maxdeg[0]), (row_line, &row_deg, maxdeg[1])] {
        if let Some(&d) = degs.iter().find(|&&d| d > cap) {
            return Err(AlistError::Parse {
                line,
                msg: format!("degree {d} exceeds declared maximum {cap}"),
            });
        }
    }

    let mut var_adj = Vec::with_capacity(n);
    for &deg in &col_deg {
        let (line, nums) = lines.next_numbers()?;
        var_adj.push(neighbor_list(line, &nums, deg, m)?);
    }
    let mut check_lists = Vec::with_capacity(m);
    for &deg in &row_deg {
        let (line, nums) = lines.next_numbers()?;
        check_lists.push((line, neighbor_list(line, &nums, deg, n)?));
    }

    let graph = FactorGraph::from_var_adj(m, var_adj).map_err(|e| AlistError::Parse {
        line: col_line,
        msg: e.to_string(),
    })?;
    for (a, (line, mut listed)) in check_lists.into_iter().enumerate() {
        listed.sort_unstable();
        if listed != graph.check_neighbors(a) {
            let var = listed
                .iter()
                .chain(graph.check_neighbors(a))
                .copied()
                .find(|v| listed.contains(v) != graph.check_neighbors(a).contains(v))
                .unwrap_or(0);
            return Err(AlistError::Transpose {
                line,
                check: a + 1,
                var: var + 1,
            });
        }
    }
    Ok(graph)
}

fn neighbor_list(line: usize, nums: &[usize], deg: usize, max: usize) -> Result<Vec<usize>, AlistError> {
    let mut out = Vec::with_capacity(deg);
    for &x in nums {
        if x == 0 {
            continue;
        }
        if x > max {
            return Err(AlistError::OutOfRange { line, index: x, max });
        }
        out.push(x - 1);
    }
    if out.len() != deg {
        return Err(AlistError::Parse {
            line,
            msg: format!("declared degree {deg}, found {} neighbors", out.len()),
        });
    }
    Ok(out)
}

pub fn format_alist(g: &FactorGraph) -> String {
    let dv = g.max_var_degree();
    let dc = g.max_check_degree();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", g.n(), g.m());
    let _ = writeln!(s, "{dv} {dc}");
    let join = |it: &mut dyn Iterator<Item = usize>| it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, "{}", join(&mut g.var_adj().iter().map(Vec::len)));
    let _ = writeln!(s, "{}", join(&mut g.check_adj().iter().map(Vec::len)));
    for (lists, width) in [(g.var_adj(), dv), (g.check_adj(), dc)] {
        for l in lists {
            let padded = l.iter().map(|&x| x + 1).chain(std::iter::repeat(0)).take(width);
            let _ = writeln!(s, "{}", join(&mut padded.into_iter()));
        }
    }
    s
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<FactorGraph, AlistError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| AlistError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_alist(&text)
}

pub fn write_alist(g: &FactorGraph, path: impl AsRef<Path>) -> Result<(), AlistError> {
    let path = path.as_ref();
    fs::write(path, format_alist(g)).map_err(|source| AlistError::Io {
        path: path.to_path_buf(),
        source,
    })
}
