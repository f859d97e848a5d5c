//! Escape of mass: the proportion of a sequence that sits in deep zero
//! runs, in exact rational arithmetic.
//!
//! For a sequence `P` on `[m1, m2]` the height `h(i)` is the distance to
//! the nearest nonzero entry; `E_P(d)` counts the steps `i` with
//! `max(h(i), h(i+1)) > d`, divided by `m2 - m1`. For a Laurent series the
//! same mass is carried by the degrees of its partial quotients, and the
//! two agree along the first column of the diagonally-aligned wall.

use crate::error::Error;
use crate::series::{cf_expand, LaurentPrefix};
use crate::tmtiles::Tile;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational value of an escape mass.
pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Distance from each index to the nearest nonzero entry.
///
/// Errors with [`Error::AllZero`] when the sequence has no nonzero entry.
pub fn heights(nonzero: &[bool]) -> Result<Vec<usize>, Error> {
    let n = nonzero.len();
    if !nonzero.iter().any(|&b| b) {
        return Err(Error::AllZero);
    }
    let mut h = vec![usize::MAX; n];
    let mut last: Option<usize> = None;
    for i in 0..n {
        if nonzero[i] {
            last = Some(i);
        }
        if let Some(j) = last {
            h[i] = i - j;
        }
    }
    last = None;
    for i in (0..n).rev() {
        if nonzero[i] {
            last = Some(i);
        }
        if let Some(j) = last {
            h[i] = h[i].min(j - i);
        }
    }
    Ok(h)
}

/// `E_P(d)` for the sequence whose nonzero mask is given; the interval is
/// the whole slice, so the denominator is `len - 1`.
pub fn escape_mass(nonzero: &[bool], d: usize) -> Result<Rational, Error> {
    assert!(nonzero.len() >= 2, "interval must contain a step");
    let h = heights(nonzero)?;
    let count = h
        .windows(2)
        .filter(|w| w[0].max(w[1]) > d)
        .count();
    Ok(ratio(count as i64, (nonzero.len() - 1) as i64))
}

/// Mass carried by the first `k` entries of a degree sequence:
/// `sum max(d_i - d, 0) / sum d_i`.
pub fn degree_escape(degrees: &[usize], d: usize, k: usize) -> Result<Rational, Error> {
    if k == 0 || k > degrees.len() {
        return Err(Error::InsufficientPrecision {
            needed: k,
            have: degrees.len(),
        });
    }
    let num: usize = degrees[..k].iter().map(|&dk| dk.saturating_sub(d)).sum();
    let den: usize = degrees[..k].iter().sum();
    Ok(ratio(num as i64, den as i64))
}

/// Mass of `theta` above `d` up to the `k`-th partial quotient, requiring
/// `k` to be certified by the prefix.
pub fn theta_escape(theta: &LaurentPrefix, d: usize, k: usize) -> Result<Rational, Error> {
    let cf = cf_expand(theta);
    degree_escape(&cf.degrees[..cf.valid_count], d, k)
}

/// Escape of one full column of the coded `sigma^l(Ra)` block: column
/// `j + 1` over all `2^{l+2} + 1` rows, denominator `2^{l+2}`.
pub fn e_lj(l: usize, j: usize, d: usize) -> Result<Rational, Error> {
    let width = 1usize << (l + 2);
    if j > width {
        return Err(Error::OutOfRange {
            what: "column shift",
            value: j as u64,
            max: width as u64,
        });
    }
    let col = crate::coding::assemble_sigma_column(Tile::Ra, l, j + 1);
    escape_mass(&col, d)
}

/// The same value through the two-scale recursion: columns in the mirrored
/// half are reduced by the reflection symmetry first, levels below 2 fall
/// back to the direct column. The closed-form block term is an escape mass
/// and is clamped at zero.
pub fn e_lj_recursive(l: usize, j: usize, d: usize) -> Result<Rational, Error> {
    let width = 1usize << (l + 2);
    if j > width {
        return Err(Error::OutOfRange {
            what: "column shift",
            value: j as u64,
            max: width as u64,
        });
    }
    let j = if j > width / 2 { width - j } else { j };
    if l < 2 {
        return e_lj(l, j, d);
    }
    let half = 1usize << l;
    if j <= half {
        let a = e_lj_recursive(l - 1, j, d)?;
        let b = e_lj_recursive(l - 2, j, d)?;
        Ok((a + b) / BigRational::from(BigInt::from(2)))
    } else {
        // Past the fold the column carries one deep gap of length
        // 2^{l+1} - 2 + 2(j - 2^l); the closed-form term is its share of
        // the mass, clamped at zero where the gap is too shallow.
        let off = j - half;
        let cut = (d + 1).saturating_sub(off);
        let block = ratio(
            (half.saturating_sub(cut)) as i64,
            (2 * half) as i64,
        );
        let tail = e_lj_recursive(l - 1, off, d)?;
        Ok(block + tail / BigRational::from(BigInt::from(2)))
    }
}

/// Smallest level whose coded block is wide enough for shift `j`.
pub fn level_for_shift(j: usize) -> usize {
    let mut l = 0usize;
    while (1usize << (l + 2)) < j {
        l += 1;
    }
    l
}

/// Limit of the mass of `t^j alpha` above `d`: one third of the level-`l`
/// column escape plus two thirds of the level-`l+1` one, with the smallest
/// valid level. Requires `d >= 5`; asserts the value does not depend on
/// the level choice.
pub fn shift_limit(j: usize, d: usize) -> Rational {
    assert!(d >= 5, "the two-scale limit formula needs d >= 5");
    let l = level_for_shift(j);
    let v = shift_limit_at_level(l, j, d);
    debug_assert_eq!(
        v,
        shift_limit_at_level(l + 1, j, d),
        "limit depends on level at j={j}, d={d}"
    );
    v
}

/// The two-scale combination at an explicit level.
pub fn shift_limit_at_level(l: usize, j: usize, d: usize) -> Rational {
    let a = e_lj(l, j, d).expect("level too small for shift");
    let b = e_lj(l + 1, j, d).expect("level too small for shift");
    (a + BigRational::from(BigInt::from(2)) * b) / BigRational::from(BigInt::from(3))
}

/// One full column of the Thue-Morse wall, synthesised from the periodic
/// block stack: returns rows `0..=max_row` of column `j + 1`.
pub fn alpha_wall_column(l: usize, j: usize, max_row: usize) -> Vec<bool> {
    let p = 1usize << (l + 2);
    assert!(j <= p, "column shift too large for level");
    let blocks: Vec<Vec<bool>> = [Tile::P0, Tile::Ra, Tile::M1]
        .iter()
        .map(|&s| crate::coding::assemble_sigma_column(s, l, j + 1))
        .collect();
    debug_assert_eq!(blocks[0][p], blocks[1][0], "block border mismatch");
    debug_assert_eq!(blocks[1][p], blocks[2][0], "block border mismatch");
    debug_assert_eq!(blocks[2][p], blocks[0][0], "block border mismatch");
    let mut out = Vec::with_capacity(max_row + 1);
    out.push(j == 0); // F_{0, n} = 1 only at n = 1
    for r in 1..=max_row {
        let off = (r - 1) % (3 * p);
        out.push(blocks[off / p][off % p]);
    }
    out
}

/// The limit of `e_{t^j alpha}(d, k)` computed directly: the escape of one
/// full period of the wall column, starting at the nonzero entry in row
/// `j`. Independent check of [`shift_limit`].
pub fn shift_limit_direct(j: usize, d: usize) -> Rational {
    let l = level_for_shift(j);
    let period = 3 * (1usize << (l + 2));
    let col = alpha_wall_column(l, j, j + period);
    escape_mass(&col[j..=j + period], d).expect("period contains nonzero entries")
}

/// The shift sequence along which the escape tends to one:
/// `j_l = sum 2^{max(l - 2l', 0)}` over `0 <= l' <= ceil(l/2)`.
pub fn j_l(l: usize) -> u64 {
    let mut sum = 0u64;
    for lp in 0..=l.div_ceil(2) {
        let e = l.saturating_sub(2 * lp);
        sum += 1u64 << e;
    }
    sum
}

/// Exact values `lim_k e_{t^{j_l} alpha}(d, k)` for `l <= l_max`.
pub fn full_escape_trace(d: usize, l_max: usize) -> Vec<Rational> {
    (0..=l_max).map(|l| shift_limit(j_l(l) as usize, d)).collect()
}

/// Escape of a wall column of an arbitrary prefix: rows `[0, 2 i_k]` of
/// the first column of its diagonally-aligned wall.
pub fn wall_first_column_escape(
    theta: &LaurentPrefix,
    i_k: usize,
    d: usize,
) -> Result<Rational, Error> {
    assert!(i_k >= 1);
    // F rows up to 2 i_k only need wall rows up to i_k - 1.
    let wall = crate::wall::generate_wall(theta, i_k - 1)?;
    let dwall = crate::wall::diagonal_align(&wall);
    let mask: Vec<bool> = (0..=2 * i_k).map(|m| dwall.at(m, 1) != 0).collect();
    escape_mass(&mask, d)
}
