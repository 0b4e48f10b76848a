//! Plain-text subspace files.
//!
//! ```text
//! # comment
//! k n
//! dim
//! row
//! ...
//! ```
//!
//! With [`Layout::Components`] the file holds `n` blocks, each a subspace of
//! `Q^k`. With [`Layout::Tangent`] it holds a single block, a subspace of
//! `(Q^n)^k` whose rows have `n * k` entries (block `j` first, coordinate `i`
//! second). Entries are integers or `p/q`.

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational, Rational};

use super::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Components,
    Tangent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceFile {
    pub k: usize,
    pub n: usize,
    pub blocks: Vec<Subspace>,
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line}: expected a nonnegative integer, found {tok:?}")))
}

pub fn parse_subspace_file(text: &str, layout: Layout) -> Result<SubspaceFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| Error::Parse("empty subspace file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse(format!("line {hl}: header must be \"k n\"")));
    }
    let k = parse_usize(head[0], hl)?;
    let n = parse_usize(head[1], hl)?;
    if k == 0 || n == 0 {
        return Err(Error::Parse(format!("line {hl}: k and n must be positive")));
    }
    let (count, width) = match layout {
        Layout::Components => (n, k),
        Layout::Tangent => (1, n * k),
    };

    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let (dl, dim_line) = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {count} blocks, found {}", blocks.len())))?;
        let dim = parse_usize(dim_line, dl)?;
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (rl, row) = lines.next().ok_or_else(|| Error::Parse(format!("block ending at line {dl} is short")))?;
            let entries: Vec<Rational> = row
                .split_whitespace()
                .map(parse_rational)
                .collect::<Result<_>>()
                .map_err(|e| Error::Parse(format!("line {rl}: {e}")))?;
            if entries.len() != width {
                return Err(Error::DimensionMismatch { expected: width, found: entries.len() });
            }
            rows.push(entries);
        }
        blocks.push(Subspace::new(width, rows)?);
    }
    if let Some((l, _)) = lines.next() {
        return Err(Error::Parse(format!("line {l}: unexpected content after the last block")));
    }
    Ok(SubspaceFile { k, n, blocks })
}

pub fn format_subspace_file(k: usize, n: usize, blocks: &[Subspace]) -> String {
    let mut out = format!("{k} {n}\n");
    for b in blocks {
        out.push_str(&format!("{}\n", b.dim()));
        for row in b.basis() {
            let cells: Vec<String> = row.iter().map(fmt_rational).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_components() {
        let text = "# pair\n3 2\n1\n1 -1 0\n1\n1 1 -2  # second\n";
        let f = parse_subspace_file(text, Layout::Components).unwrap();
        assert_eq!((f.k, f.n, f.blocks.len()), (3, 2, 2));
        let again = parse_subspace_file(&format_subspace_file(f.k, f.n, &f.blocks), Layout::Components).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn tangent_layout_and_errors() {
        let f = parse_subspace_file("2 2\n1\n1 0 0 1/2\n", Layout::Tangent).unwrap();
        assert_eq!(f.blocks[0].ambient_dim(), 4);
        assert!(matches!(
            parse_subspace_file("2 2\n1\n1 0 0\n", Layout::Tangent),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(parse_subspace_file("3 1\n1\n1 x 0\n", Layout::Components).is_err());
        assert!(parse_subspace_file("3 1\n0\n0\n", Layout::Components).is_err());
        assert!(parse_subspace_file("3 2\n0\n", Layout::Components).is_err());
        assert!(parse_subspace_file("", Layout::Components).is_err());
    }
}
