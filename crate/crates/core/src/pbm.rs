//! PBM (portable bitmap) encoding of binary grids. A set bit renders black.

use crate::grid::BitGrid;

/// ASCII `P1` encoding, 1 = black. Deterministic: no comments, fixed layout.
pub fn encode_p1(grid: &BitGrid) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", grid.cols(), grid.rows()).into_bytes();
    for r in 0..grid.rows() {
        let mut line = String::with_capacity(2 * grid.cols());
        for c in 0..grid.cols() {
            if c > 0 {
                line.push(' ');
            }
            line.push(if grid.get(r, c) { '1' } else { '0' });
        }
        line.push('\n');
        out.extend_from_slice(line.as_bytes());
    }
    out
}

/// Binary `P4` encoding, rows padded to whole bytes, MSB first.
pub fn encode_p4(grid: &BitGrid) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", grid.cols(), grid.rows()).into_bytes();
    for r in 0..grid.rows() {
        let mut byte = 0u8;
        for c in 0..grid.cols() {
            if grid.get(r, c) {
                byte |= 0x80 >> (c % 8);
            }
            if c % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if grid.cols() % 8 != 0 {
            out.push(byte);
        }
    }
    out
}

/// Parses a `P1` file back into a grid. Used by golden-file tests.
pub fn decode_p1(data: &[u8]) -> Option<BitGrid> {
    let text = std::str::from_utf8(data).ok()?;
    let mut tokens = text.split_whitespace();
    if tokens.next()? != "P1" {
        return None;
    }
    let cols: usize = tokens.next()?.parse().ok()?;
    let rows: usize = tokens.next()?.parse().ok()?;
    let mut g = BitGrid::new(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            match tokens.next()? {
                "1" => g.set(r, c, true),
                "0" => {}
                _ => return None,
            }
        }
    }
    Some(g)
}
