//! Bit-packed F_2 matrices.

/// A dense matrix over F_2, one bit per entry, rows packed into `u64` words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitGrid {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitGrid {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    /// Builds a grid from `'0'`/`'1'` strings, one per row. Test helper and
    /// table constructor.
    pub fn from_rows(rows: &[&str]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut g = BitGrid::new(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, ch) in row.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => g.set(i, j, true),
                    _ => panic!("expected '0' or '1'"),
                }
            }
        }
        g
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    /// Rotates 90 degrees clockwise (rows become columns from the bottom up).
    pub fn rotate_cw(&self) -> BitGrid {
        let mut out = BitGrid::new(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, self.rows - 1 - r, true);
                }
            }
        }
        out
    }

    /// Copies the rectangle of size `rows x cols` with top-left `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> BitGrid {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = BitGrid::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if self.get(r0 + r, c0 + c) {
                    out.set(r, c, true);
                }
            }
        }
        out
    }

    /// Extracts one column as booleans.
    pub fn column(&self, c: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl std::fmt::Debug for BitGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitGrid {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(70) {
            for c in 0..self.cols.min(140) {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_flip() {
        let mut g = BitGrid::new(3, 130);
        g.set(2, 129, true);
        assert!(g.get(2, 129));
        g.flip(2, 129);
        assert!(!g.get(2, 129));
        assert_eq!(g.count_ones(), 0);
    }

    #[test]
    fn rotation_is_order_four() {
        let g = BitGrid::from_rows(&["0100", "0010", "1100"]);
        let r4 = g.rotate_cw().rotate_cw().rotate_cw().rotate_cw();
        assert_eq!(g, r4);
        // One clockwise turn sends the top-left to the top-right.
        let r = g.rotate_cw();
        assert_eq!(r.rows(), 4);
        assert_eq!(r.cols(), 3);
        assert_eq!(g.get(0, 1), r.get(1, 2));
    }
}
