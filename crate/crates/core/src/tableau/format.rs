//! Plain-text tableau files.
//!
//! ```text
//! # sIFRK(2,2)
//! s 2
//! c 0 1/2 1
//! a 1 1/2
//! a 2 0 1
//! ```
//!
//! Shu-Osher tableaus replace the `a` lines by `alpha i ...` and
//! `beta i ...` lines. Optional `name <text>` and `order <p>` lines may
//! appear anywhere. Numbers may be written as decimals or as `p/q`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{lookup_builtin, ButcherTableau, SchemeTableau, ShuOsherTableau};
use crate::error::{Error, Result};

/// Parses a tableau file's contents. `origin` only labels error messages.
pub fn parse_tableau(text: &str, origin: &Path) -> Result<SchemeTableau> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut name: Option<String> = None;
    let mut order = 0usize;
    let mut stages: Option<usize> = None;
    let mut c: Option<Vec<f64>> = None;
    let mut a: Vec<Option<Vec<f64>>> = Vec::new();
    let mut alpha: Vec<Option<Vec<f64>>> = Vec::new();
    let mut beta: Vec<Option<Vec<f64>>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "name" => {
                let rest = line[4..].trim();
                if rest.is_empty() {
                    return Err(err(line_no, "`name` needs a value".into()));
                }
                name = Some(rest.to_string());
            }
            "order" => {
                let v = tokens.next().ok_or_else(|| err(line_no, "`order` needs a value".into()))?;
                order = v
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid order `{v}`")))?;
            }
            "s" => {
                if stages.is_some() {
                    return Err(err(line_no, "duplicate `s` line".into()));
                }
                let v = tokens.next().ok_or_else(|| err(line_no, "`s` needs a value".into()))?;
                let s: usize = v
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid stage count `{v}`")))?;
                if s == 0 {
                    return Err(err(line_no, "stage count must be positive".into()));
                }
                if tokens.next().is_some() {
                    return Err(err(line_no, "trailing tokens after stage count".into()));
                }
                stages = Some(s);
                a = vec![None; s];
                alpha = vec![None; s];
                beta = vec![None; s];
            }
            "c" => {
                let s = stages.ok_or_else(|| err(line_no, "`c` before `s`".into()))?;
                if c.is_some() {
                    return Err(err(line_no, "duplicate `c` line".into()));
                }
                let values = parse_numbers(tokens).map_err(|m| err(line_no, m))?;
                if values.len() != s + 1 {
                    return Err(err(
                        line_no,
                        format!("expected {} abscissas, found {}", s + 1, values.len()),
                    ));
                }
                c = Some(values);
            }
            "a" | "alpha" | "beta" => {
                let s = stages.ok_or_else(|| err(line_no, format!("`{keyword}` before `s`")))?;
                let idx_tok = tokens
                    .next()
                    .ok_or_else(|| err(line_no, "missing row index".into()))?;
                let i: usize = idx_tok
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid row index `{idx_tok}`")))?;
                if i == 0 || i > s {
                    return Err(err(line_no, format!("row index {i} outside 1..={s}")));
                }
                let values = parse_numbers(tokens).map_err(|m| err(line_no, m))?;
                if values.len() != i {
                    return Err(err(
                        line_no,
                        format!("row {i} needs {i} values, found {}", values.len()),
                    ));
                }
                let slot = match keyword {
                    "a" => &mut a[i - 1],
                    "alpha" => &mut alpha[i - 1],
                    _ => &mut beta[i - 1],
                };
                if slot.is_some() {
                    return Err(err(line_no, format!("duplicate `{keyword} {i}` line")));
                }
                *slot = Some(values);
            }
            other => return Err(err(line_no, format!("unknown keyword `{other}`"))),
        }
    }

    let eof = last_line.max(1);
    let s = stages.ok_or_else(|| err(eof, "missing `s` line".into()))?;
    let c = c.ok_or_else(|| err(eof, "missing `c` line".into()))?;
    let name = name.unwrap_or_else(|| {
        origin
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into())
    });

    let has_a = a.iter().any(Option::is_some);
    let has_so = alpha.iter().chain(beta.iter()).any(Option::is_some);
    match (has_a, has_so) {
        (true, true) => Err(err(eof, "mixes `a` rows with `alpha`/`beta` rows".into())),
        (false, false) => Err(err(eof, "no coefficient rows".into())),
        (true, false) => {
            let rows = collect_rows(a, "a").map_err(|m| err(eof, m))?;
            let t = ButcherTableau::new(name, order, rows, c).map_err(|e| err(eof, e.to_string()))?;
            Ok(SchemeTableau::Butcher(t))
        }
        (false, true) => {
            let alpha = collect_rows(alpha, "alpha").map_err(|m| err(eof, m))?;
            let beta = collect_rows(beta, "beta").map_err(|m| err(eof, m))?;
            debug_assert_eq!(alpha.len(), s);
            let t = ShuOsherTableau::new(name, order, alpha, beta, c)
                .map_err(|e| err(eof, e.to_string()))?;
            Ok(SchemeTableau::ShuOsher(t))
        }
    }
}

/// Reads a tableau file from disk.
pub fn read_tableau(path: impl AsRef<Path>) -> Result<SchemeTableau> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_tableau(&text, path)
}

/// Resolves a built-in key (`sifrk22`) or a path to a tableau file.
pub fn resolve_scheme(name_or_path: &str) -> Result<SchemeTableau> {
    if let Some(t) = lookup_builtin(name_or_path) {
        return Ok(t);
    }
    let path = PathBuf::from(name_or_path);
    if path.exists() {
        return read_tableau(&path);
    }
    Err(Error::UnknownScheme(name_or_path.to_string()))
}

/// Serializes a tableau in the text format (round-trips through [`parse_tableau`]).
pub fn write_tableau(t: &SchemeTableau) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", t.name());
    let _ = writeln!(out, "order {}", t.order());
    let _ = writeln!(out, "s {}", t.stages());
    let _ = writeln!(out, "c {}", join(t.abscissas()));
    match t {
        SchemeTableau::Butcher(b) => {
            for (i, row) in b.rows().iter().enumerate() {
                let _ = writeln!(out, "a {} {}", i + 1, join(row));
            }
        }
        SchemeTableau::ShuOsher(so) => {
            for (i, row) in so.alpha_rows().iter().enumerate() {
                let _ = writeln!(out, "alpha {} {}", i + 1, join(row));
            }
            for (i, row) in so.beta_rows().iter().enumerate() {
                let _ = writeln!(out, "beta {} {}", i + 1, join(row));
            }
        }
    }
    out
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn collect_rows(rows: Vec<Option<Vec<f64>>>, label: &str) -> Result<Vec<Vec<f64>>, String> {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| format!("missing `{label} {}` line", i + 1)))
        .collect()
}

fn parse_numbers<'a>(tokens: impl Iterator<Item = &'a str>) -> Result<Vec<f64>, String> {
    tokens.map(parse_number).collect()
}

fn parse_number(tok: &str) -> Result<f64, String> {
    let value = match tok.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.parse().map_err(|_| format!("invalid number `{tok}`"))?;
            let q: f64 = q.parse().map_err(|_| format!("invalid number `{tok}`"))?;
            p / q
        }
        None => tok.parse().map_err(|_| format!("invalid number `{tok}`"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("non-finite number `{tok}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{builtin_tableaus, sifrk_s2};

    fn parse(text: &str) -> Result<SchemeTableau> {
        parse_tableau(text, Path::new("test.tab"))
    }

    #[test]
    fn parses_butcher_with_fractions_and_comments() {
        let t = parse("# two stage\ns 2\nc 0 1/2 1\na 1 1/2   # first\na 2 0 1\n").unwrap();
        match t {
            SchemeTableau::Butcher(b) => {
                assert_eq!(b.rows(), sifrk_s2(2).rows());
                assert_eq!(b.abscissas(), sifrk_s2(2).abscissas());
                assert_eq!(b.name(), "test");
            }
            _ => panic!("expected Butcher form"),
        }
    }

    #[test]
    fn parses_shu_osher() {
        let t = parse("s 2\nc 0 1 1\nalpha 1 1\nalpha 2 1/2 1/2\nbeta 1 1\nbeta 2 0 1/2\n").unwrap();
        assert!(matches!(t, SchemeTableau::ShuOsher(_)));
    }

    #[test]
    fn every_builtin_round_trips() {
        for b in builtin_tableaus() {
            let text = write_tableau(&b.tableau);
            let back = parse(&text).unwrap();
            assert_eq!(back, b.tableau, "{}", b.key);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("s 2\nc 0 1\n", 2),
            ("s 1\nc 0 1\na 1 x\n", 3),
            ("c 0 1\n", 1),
            ("s 1\nc 0 1\na 2 1 1\n", 3),
            ("s 1\nc 0 1\nfoo 1\n", 3),
            ("s 1\n\nc 0 1\na 1 1\nalpha 1 1\n", 5),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn resolve_unknown() {
        assert!(matches!(
            resolve_scheme("definitely-not-a-scheme"),
            Err(Error::UnknownScheme(_))
        ));
        assert!(resolve_scheme("sifrk22").is_ok());
    }
}
