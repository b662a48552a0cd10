//! Reader and writer for the alist sparse parity-check matrix format.
//!
//! Layout: first line `n m`, second line the maximum column and row degrees,
//! then the per-column degrees, the per-row degrees, one line of (1-based)
//! check indices per column, and one line of variable indices per row.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

pub fn read_alist(text: &str) -> Result<BitMatrix> {
    let mut nums = text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::AlistParse(format!("bad token {t:?}"))));
    let mut next = |what: &str| {
        nums.next().unwrap_or_else(|| Err(Error::AlistParse(format!("missing {what}"))))
    };

    let n = next("n")?;
    let m = next("m")?;
    if n > 64 {
        return Err(Error::AlistParse(format!("block length {n} exceeds 64")));
    }
    let _max_col_deg = next("max column degree")?;
    let _max_row_deg = next("max row degree")?;
    let col_degs: Vec<usize> = (0..n).map(|_| next("column degree")).collect::<Result<_>>()?;
    let row_degs: Vec<usize> = (0..m).map(|_| next("row degree")).collect::<Result<_>>()?;

    let mut h = BitMatrix::zeros(m, n);
    for (v, &deg) in col_degs.iter().enumerate() {
        for _ in 0..deg {
            let c = next("column entry")?;
            if c == 0 || c > m {
                return Err(Error::AlistParse(format!("check index {c} out of range 1..={m}")));
            }
            h.set(c - 1, v, 1);
        }
    }
    // per-row lists are redundant; verify consistency with the column lists
    for (c, &deg) in row_degs.iter().enumerate() {
        for _ in 0..deg {
            let v = next("row entry")?;
            if v == 0 || v > n {
                return Err(Error::AlistParse(format!("variable index {v} out of range 1..={n}")));
            }
            if h.get(c, v - 1) != 1 {
                return Err(Error::AlistParse(format!(
                    "row list places ({c}, {v}) but column list does not"
                )));
            }
        }
        if h.row(c).count_ones() as usize != deg {
            return Err(Error::AlistParse(format!("row {c} degree mismatch")));
        }
    }
    Ok(h)
}

pub fn write_alist(h: &BitMatrix) -> String {
    let n = h.cols();
    let m = h.rows();
    let col_lists: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..m).filter(|&c| h.get(c, v) == 1).collect())
        .collect();
    let row_lists: Vec<Vec<usize>> = (0..m)
        .map(|c| (0..n).filter(|&v| h.get(c, v) == 1).collect())
        .collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);

    let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    out.push_str(&join(&col_lists.iter().map(Vec::len).collect::<Vec<_>>()));
    out.push('\n');
    out.push_str(&join(&row_lists.iter().map(Vec::len).collect::<Vec<_>>()));
    out.push('\n');
    for list in &col_lists {
        out.push_str(&join(&list.iter().map(|c| c + 1).collect::<Vec<_>>()));
        out.push('\n');
    }
    for list in &row_lists {
        out.push_str(&join(&list.iter().map(|v| v + 1).collect::<Vec<_>>()));
        out.push('\n');
    }
    out
}
