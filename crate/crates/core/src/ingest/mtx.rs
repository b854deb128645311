//! Matrix Market coordinate reader (pattern semantics).

use std::collections::HashSet;

use crate::{Error, Result};

/// Deduplicated nonzero pattern of a sparse matrix, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrixPattern {
    pub rows: usize,
    pub cols: usize,
    /// Sorted by (row, col), no duplicates.
    pub nonzeros: Vec<(u32, u32)>,
}

impl SparseMatrixPattern {
    /// Builds a pattern from raw 0-based coordinates, sorting and
    /// collapsing duplicates.
    pub fn from_coordinates(rows: usize, cols: usize, coords: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut nonzeros: Vec<(u32, u32)> = coords.into_iter().collect();
        if let Some(&(r, c)) = nonzeros
            .iter()
            .find(|&&(r, c)| r as usize >= rows || c as usize >= cols)
        {
            return Err(Error::Input(format!("coordinate ({r}, {c}) outside {rows}x{cols}")));
        }
        nonzeros.sort_unstable();
        nonzeros.dedup();
        Ok(SparseMatrixPattern { rows, cols, nonzeros })
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    /// Writes the pattern as a 1-based `coordinate pattern general` file.
    pub fn write_matrix_market<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate pattern general")?;
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for &(r, c) in &self.nonzeros {
            writeln!(w, "{} {}", r + 1, c + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    // symmetric, skew-symmetric and hermitian share a pattern rule
    Mirrored,
}

/// Parses Matrix Market coordinate text into its nonzero pattern.
///
/// Symmetric-type files are mirrored: a stored `(i, j)` with `i != j` also
/// yields `(j, i)`. Explicit zero values are dropped, all other values are
/// ignored.
pub fn parse_matrix(source: &str) -> Result<SparseMatrixPattern> {
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input, expected %%MatrixMarket header"))?;
    let (field, symmetry) = parse_header(hline, header)?;

    let (size_line, size) = lines
        .by_ref()
        .find(|(_, l)| !is_skippable(l))
        .ok_or_else(|| Error::parse(hline + 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(size_line, "size line must hold rows, cols and entry count"));
    }
    let rows: usize = parse_num(size_line, dims[0], "row count")?;
    let cols: usize = parse_num(size_line, dims[1], "column count")?;
    let declared: usize = parse_num(size_line, dims[2], "entry count")?;
    if rows > u32::MAX as usize || cols > u32::MAX as usize {
        return Err(Error::parse(size_line, "matrix dimensions exceed 32-bit ids"));
    }

    let mut seen = HashSet::with_capacity(declared);
    let mut nonzeros = Vec::with_capacity(declared);
    let mut read = 0usize;
    for (lineno, line) in lines {
        if is_skippable(line) {
            continue;
        }
        read += 1;
        if read > declared {
            return Err(Error::parse(lineno, format!("more entries than the declared {declared}")));
        }
        let mut tok = line.split_whitespace();
        let i: usize = parse_num(lineno, tok.next().unwrap_or(""), "row index")?;
        let j: usize = parse_num(lineno, tok.next().ok_or_else(|| Error::parse(lineno, "missing column index"))?, "column index")?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(Error::parse(lineno, format!("coordinate ({i}, {j}) outside {rows}x{cols}")));
        }
        if is_explicit_zero(lineno, field, &mut tok)? {
            continue;
        }
        let (r, c) = ((i - 1) as u32, (j - 1) as u32);
        if seen.insert((r, c)) {
            nonzeros.push((r, c));
        }
        if symmetry == Symmetry::Mirrored && r != c {
            if c as usize >= rows || r as usize >= cols {
                return Err(Error::parse(lineno, "symmetric storage requires a square matrix"));
            }
            if seen.insert((c, r)) {
                nonzeros.push((c, r));
            }
        }
    }
    if read < declared {
        return Err(Error::parse(
            source.lines().count().max(1),
            format!("expected {declared} entries, found {read}"),
        ));
    }
    nonzeros.sort_unstable();
    Ok(SparseMatrixPattern { rows, cols, nonzeros })
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('%')
}

fn parse_header(lineno: usize, line: &str) -> Result<(Field, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(Error::parse(lineno, "header must start with %%MatrixMarket"));
    }
    if words.len() != 5 {
        return Err(Error::parse(lineno, "header must read: %%MatrixMarket matrix coordinate <field> <symmetry>"));
    }
    if words[1] != "matrix" {
        return Err(Error::parse(lineno, format!("unsupported object '{}'", words[1])));
    }
    if words[2] != "coordinate" {
        return Err(Error::parse(lineno, format!("unsupported format '{}', only coordinate is read", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(Error::parse(lineno, format!("unknown field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" | "skew-symmetric" | "hermitian" => Symmetry::Mirrored,
        other => return Err(Error::parse(lineno, format!("unknown symmetry '{other}'"))),
    };
    Ok((field, symmetry))
}

fn parse_num<T: std::str::FromStr>(lineno: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(lineno, format!("cannot parse {what} from '{tok}'")))
}

fn is_explicit_zero<'a>(lineno: usize, field: Field, tok: &mut impl Iterator<Item = &'a str>) -> Result<bool> {
    let mut value = |what: &str| -> Result<f64> {
        let t = tok
            .next()
            .ok_or_else(|| Error::parse(lineno, format!("missing {what}")))?;
        parse_num(lineno, t, what)
    };
    Ok(match field {
        Field::Pattern => false,
        Field::Real | Field::Integer => value("value")? == 0.0,
        Field::Complex => {
            let re = value("real part")?;
            let im = value("imaginary part")?;
            re == 0.0 && im == 0.0
        }
    })
}
