//! A 15-tile alphabet with a 16-element symmetry group and an equivariant
//! 2-substitution.
//!
//! The group is `D x Z/2`, where `D = <rho, eta | rho^4, eta^2, (rho eta)^2>`
//! is the dihedral group of the square (`rho` rotates clockwise, `eta`
//! reflects along the anti-diagonal) and the extra central involution `iota`
//! swaps "positive" and "negative" tiles. Acting on a `2^l`-sided tile
//! matrix twists the entry action by the automorphism `psi^l`, where
//! `psi(rho) = iota rho`, `psi(eta) = iota eta`.

use crate::error::Error;
use std::fmt;
use std::sync::OnceLock;

/// The tile alphabet: the blank `O`, four corner tiles `C0..C3`, the two
/// rhombus tiles `Ra`/`Rb`, four plus tiles `P0..P3` and four minus tiles
/// `M0..M3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Tile {
    O,
    C0,
    C1,
    C2,
    C3,
    Ra,
    Rb,
    P0,
    P1,
    P2,
    P3,
    M0,
    M1,
    M2,
    M3,
}

use Tile::*;

/// All 15 tiles, in a fixed order.
pub const ALL_TILES: [Tile; 15] = [O, C0, C1, C2, C3, Ra, Rb, P0, P1, P2, P3, M0, M1, M2, M3];

impl Tile {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Two-character name used by the text dump.
    pub fn name(self) -> &'static str {
        match self {
            O => "o",
            C0 => "c0",
            C1 => "c1",
            C2 => "c2",
            C3 => "c3",
            Ra => "ra",
            Rb => "rb",
            P0 => "+0",
            P1 => "+1",
            P2 => "+2",
            P3 => "+3",
            M0 => "-0",
            M1 => "-1",
            M2 => "-2",
            M3 => "-3",
        }
    }

    pub fn from_name(s: &str) -> Option<Tile> {
        ALL_TILES.iter().copied().find(|t| t.name() == s)
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// An element `rho^a eta^b iota^c` of the 16-element group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GElem {
    /// Rotation exponent, mod 4.
    pub rot: u8,
    /// Anti-diagonal reflection bit.
    pub flip: bool,
    /// Central involution bit.
    pub iota: bool,
}

pub const G_IDENTITY: GElem = GElem {
    rot: 0,
    flip: false,
    iota: false,
};
pub const G_RHO: GElem = GElem {
    rot: 1,
    flip: false,
    iota: false,
};
pub const G_ETA: GElem = GElem {
    rot: 0,
    flip: true,
    iota: false,
};
pub const G_IOTA: GElem = GElem {
    rot: 0,
    flip: false,
    iota: true,
};

/// All 16 group elements.
pub fn g_all() -> impl Iterator<Item = GElem> {
    (0..16u8).map(|k| GElem {
        rot: k & 3,
        flip: k & 4 != 0,
        iota: k & 8 != 0,
    })
}

/// Group law: `(rho^a eta^b iota^c)(rho^a' eta^b' iota^c')`, using
/// `eta rho^k = rho^{-k} eta` and centrality of `iota`.
pub fn g_mul(g: GElem, h: GElem) -> GElem {
    let rot = if g.flip {
        (g.rot + 4 - h.rot % 4) % 4
    } else {
        (g.rot + h.rot) % 4
    };
    GElem {
        rot,
        flip: g.flip ^ h.flip,
        iota: g.iota ^ h.iota,
    }
}

pub fn g_inv(g: GElem) -> GElem {
    // In a dihedral group reflections are involutions; rotations invert.
    let rot = if g.flip { g.rot } else { (4 - g.rot) % 4 };
    GElem { rot, iota: g.iota, ..g }
}

/// The automorphism with `psi(rho) = iota rho`, `psi(eta) = iota eta`,
/// `psi(iota) = iota`; an involution that toggles `iota` on odd words.
pub fn g_psi(g: GElem) -> GElem {
    let toggles = (g.rot + g.flip as u8) % 2 == 1;
    GElem {
        iota: g.iota ^ toggles,
        ..g
    }
}

/// `psi^l`.
pub fn g_psi_pow(g: GElem, l: usize) -> GElem {
    if l % 2 == 1 {
        g_psi(g)
    } else {
        g
    }
}

/// Action of a generator word on a single tile.
pub fn g_act_tile(g: GElem, s: Tile) -> Tile {
    let mut t = s;
    if g.iota {
        t = iota_tile(t);
    }
    if g.flip {
        t = eta_tile(t);
    }
    for _ in 0..g.rot {
        t = rho_tile(t);
    }
    t
}

fn rho_tile(s: Tile) -> Tile {
    match s {
        O => O,
        C0 => C1,
        C1 => C2,
        C2 => C3,
        C3 => C0,
        Ra => Ra,
        Rb => Rb,
        P0 => P1,
        P1 => P2,
        P2 => P3,
        P3 => P0,
        M0 => M1,
        M1 => M2,
        M2 => M3,
        M3 => M0,
    }
}

fn eta_tile(s: Tile) -> Tile {
    match s {
        O => O,
        C0 => C0,
        C1 => C3,
        C2 => C2,
        C3 => C1,
        Ra => Rb,
        Rb => Ra,
        P0 => P0,
        P1 => P3,
        P2 => P2,
        P3 => P1,
        M0 => M0,
        M1 => M3,
        M2 => M2,
        M3 => M1,
    }
}

fn iota_tile(s: Tile) -> Tile {
    match s {
        O => O,
        C0 => C0,
        C1 => C1,
        C2 => C2,
        C3 => C3,
        Ra => Rb,
        Rb => Ra,
        P0 => M0,
        P1 => M1,
        P2 => M2,
        P3 => M3,
        M0 => P0,
        M1 => P1,
        M2 => P2,
        M3 => P3,
    }
}

/// A square tile matrix of side `2^l`, row-major, row index growing
/// downward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileMat {
    side: usize,
    cells: Vec<Tile>,
}

impl TileMat {
    pub fn single(s: Tile) -> TileMat {
        TileMat {
            side: 1,
            cells: vec![s],
        }
    }

    pub fn from_rows(rows: &[&[Tile]]) -> TileMat {
        let side = rows.len();
        assert!(side.is_power_of_two());
        let mut cells = Vec::with_capacity(side * side);
        for r in rows {
            assert_eq!(r.len(), side);
            cells.extend_from_slice(r);
        }
        TileMat { side, cells }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn level(&self) -> usize {
        self.side.trailing_zeros() as usize
    }

    /// Cell at `(row, col)`, 1-indexed.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Tile {
        debug_assert!(row >= 1 && row <= self.side && col >= 1 && col <= self.side);
        self.cells[(row - 1) * self.side + col - 1]
    }

    pub fn set(&mut self, row: usize, col: usize, t: Tile) {
        self.cells[(row - 1) * self.side + col - 1] = t;
    }

    pub fn row(&self, row: usize) -> &[Tile] {
        &self.cells[(row - 1) * self.side..row * self.side]
    }

    pub fn column(&self, col: usize) -> Vec<Tile> {
        (1..=self.side).map(|r| self.at(r, col)).collect()
    }

    pub fn main_diagonal(&self) -> Vec<Tile> {
        (1..=self.side).map(|i| self.at(i, i)).collect()
    }

    /// Text dump, one two-character symbol per cell.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 1..=self.side {
            for (c, t) in self.row(r).iter().enumerate() {
                if c > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{:<2}", t.name()));
            }
            out.push('\n');
        }
        out
    }
}

/// The twisted action of `g` on a tile matrix: the isometry of the square
/// given by the dihedral part of `g`, with `psi^l(g)` applied to every
/// entry (`l` the level of the matrix).
pub fn g_act_mat(g: GElem, mat: &TileMat) -> TileMat {
    let level = mat.level();
    let entry_g = g_psi_pow(g, level);
    let side = mat.side;
    let mut out = TileMat {
        side,
        cells: vec![O; side * side],
    };
    for r in 1..=side {
        for c in 1..=side {
            // Geometric moves: eta reflects along the anti-diagonal, rho
            // rotates clockwise; apply eta first, then the rotations, in
            // agreement with the word rho^a eta^b.
            let (mut rr, mut cc) = (r, c);
            if g.flip {
                let (r2, c2) = (side + 1 - cc, side + 1 - rr);
                rr = r2;
                cc = c2;
            }
            for _ in 0..g.rot {
                let (r2, c2) = (cc, side + 1 - rr);
                rr = r2;
                cc = c2;
            }
            out.set(rr, cc, g_act_tile(entry_g, mat.at(r, c)));
        }
    }
    out
}

/// The substitution table on all 15 tiles, materialised once: the four
/// defining images on the orbit representatives `P0`, `C0`, `Ra`, `O`, the
/// rest carried over by equivariance and checked against it.
fn sigma_table() -> &'static [[Tile; 4]; 15] {
    static TABLE: OnceLock<[[Tile; 4]; 15]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let base: [(Tile, [Tile; 4]); 4] = [
            (P0, [P0, C0, Ra, M0]),
            (C0, [O, O, C0, O]),
            (Ra, [M1, P2, P0, M3]),
            (O, [O, O, O, O]),
        ];
        let mut table = [[O; 4]; 15];
        let mut filled = [false; 15];
        for (rep, img) in base {
            for g in g_all() {
                let s = g_act_tile(g, rep);
                let mat = g_act_mat(
                    g,
                    &TileMat::from_rows(&[&img[0..2], &img[2..4]]),
                );
                let entry = [mat.at(1, 1), mat.at(1, 2), mat.at(2, 1), mat.at(2, 2)];
                if filled[s.index()] {
                    assert_eq!(
                        table[s.index()],
                        entry,
                        "substitution not well defined at {s}"
                    );
                } else {
                    table[s.index()] = entry;
                    filled[s.index()] = true;
                }
            }
        }
        assert!(filled.iter().all(|&f| f));
        table
    })
}

/// The 2-substitution: a tile expands to a 2x2 tile matrix.
pub fn sigma(s: Tile) -> TileMat {
    let row = &sigma_table()[s.index()];
    TileMat {
        side: 2,
        cells: row.to_vec(),
    }
}

/// Applies the substitution to every cell of a matrix, doubling the side.
pub fn sigma_mat(mat: &TileMat) -> TileMat {
    let side = mat.side * 2;
    let table = sigma_table();
    let mut cells = vec![O; side * side];
    for r in 1..=mat.side {
        for c in 1..=mat.side {
            let img = &table[mat.at(r, c).index()];
            let (r0, c0) = (2 * r - 2, 2 * c - 2);
            cells[r0 * side + c0] = img[0];
            cells[r0 * side + c0 + 1] = img[1];
            cells[(r0 + 1) * side + c0] = img[2];
            cells[(r0 + 1) * side + c0 + 1] = img[3];
        }
    }
    TileMat { side, cells }
}

/// Maximum level accepted by [`sigma_iter`]; `4^13` tiles is ~67 MB.
pub const MAX_SIGMA_LEVEL: usize = 13;

/// `sigma^l(s)` as a `2^l`-sided matrix.
pub fn sigma_iter(s: Tile, l: usize) -> Result<TileMat, Error> {
    if l > MAX_SIGMA_LEVEL {
        return Err(Error::SizeLimit {
            cells: 1u128 << (2 * l),
            max: 1u128 << (2 * MAX_SIGMA_LEVEL),
        });
    }
    let mut mat = TileMat::single(s);
    for _ in 0..l {
        mat = sigma_mat(&mat);
    }
    Ok(mat)
}

/// Single cell of `sigma^l(s)` at `(row, col)` (1-indexed) without
/// materialising the matrix: radix-2 descent through the quadrants.
pub fn sigma_tile_at(s: Tile, l: usize, row: usize, col: usize) -> Tile {
    debug_assert!(row >= 1 && row <= 1 << l && col >= 1 && col <= 1 << l);
    let table = sigma_table();
    let mut t = s;
    for level in (0..l).rev() {
        let r_bit = ((row - 1) >> level) & 1;
        let c_bit = ((col - 1) >> level) & 1;
        t = table[t.index()][2 * r_bit + c_bit];
    }
    t
}

/// One full tile column of `sigma^l(s)`.
pub fn sigma_tile_column(s: Tile, l: usize, col: usize) -> Vec<Tile> {
    (1..=1usize << l)
        .map(|r| sigma_tile_at(s, l, r, col))
        .collect()
}

/// Checks `sigma^l(g s) = g sigma^l(s)` for every group element and tile.
pub fn verify_equivariance(l: usize) -> bool {
    for s in ALL_TILES {
        let sig_s = sigma_iter(s, l).unwrap();
        for g in g_all() {
            let lhs = sigma_iter(g_act_tile(g, s), l).unwrap();
            let rhs = g_act_mat(g, &sig_s);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Structural facts about `sigma^l(P0)` and `sigma^{l+1}(Ra)`.
#[derive(Debug, Clone, Default)]
pub struct StructureReport {
    pub diagonal_is_thue_morse: bool,
    pub superdiagonal_all_c0: bool,
    pub above_all_blank: bool,
    pub first_column_periodic: bool,
    pub last_row_periodic: bool,
    pub ra_first_row_periodic: bool,
    pub ra_last_column_periodic: bool,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.diagonal_is_thue_morse
            && self.superdiagonal_all_c0
            && self.above_all_blank
            && self.first_column_periodic
            && self.last_row_periodic
            && self.ra_first_row_periodic
            && self.ra_last_column_periodic
    }
}

fn is_periodic(seq: &[Tile], period: &[Tile]) -> bool {
    !seq.is_empty() && seq.iter().enumerate().all(|(i, &t)| t == period[i % period.len()])
}

/// Verifies the diagonal, first-column and last-row periods of
/// `sigma^l(P0)` and the border periods of `sigma^{l+1}(Ra)`.
pub fn structure_checks(l: usize) -> Result<StructureReport, Error> {
    let mat = sigma_iter(P0, l)?;
    let side = mat.side();
    let tm = crate::series::thue_morse_prefix(side.max(1));
    let mut report = StructureReport {
        diagonal_is_thue_morse: true,
        superdiagonal_all_c0: true,
        above_all_blank: true,
        ..Default::default()
    };
    for i in 1..=side {
        let expect = if tm.coeff(i) == 0 { P0 } else { M0 };
        if mat.at(i, i) != expect {
            report.diagonal_is_thue_morse = false;
        }
        for j in i + 1..=side {
            if j == i + 1 {
                if mat.at(i, j) != C0 {
                    report.superdiagonal_all_c0 = false;
                }
            } else if mat.at(i, j) != O {
                report.above_all_blank = false;
            }
        }
    }
    report.first_column_periodic = is_periodic(&mat.column(1), &[P0, Ra, M1]);
    let last_row_period: [Tile; 3] = if l % 2 == 0 {
        [P0, M3, Rb]
    } else {
        [Ra, M0, P3]
    };
    report.last_row_periodic = is_periodic(mat.row(side), &last_row_period);

    let ra = sigma_iter(Ra, l + 1)?;
    let ra_side = ra.side();
    let (row_period, col_period): ([Tile; 3], [Tile; 3]) = if l % 2 == 0 {
        // stated for sigma^{l+1}(Ra) with this parity of l
        ([M1, P2, Rb], [P2, M3, Ra])
    } else {
        ([Ra, P1, M2], [Ra, P2, M3])
    };
    report.ra_first_row_periodic = is_periodic(ra.row(1), &row_period);
    report.ra_last_column_periodic = is_periodic(&ra.column(ra_side), &col_period);
    Ok(report)
}

/// Orbit decomposition of the alphabet under the full group.
pub fn g_orbits() -> Vec<Vec<Tile>> {
    let mut seen = [false; 15];
    let mut orbits = Vec::new();
    for s in ALL_TILES {
        if seen[s.index()] {
            continue;
        }
        let mut orbit: Vec<Tile> = g_all().map(|g| g_act_tile(g, s)).collect();
        orbit.sort();
        orbit.dedup();
        for t in &orbit {
            seen[t.index()] = true;
        }
        orbits.push(orbit);
    }
    orbits
}

/// Stabiliser of a tile.
pub fn stabilizer(s: Tile) -> Vec<GElem> {
    g_all().filter(|&g| g_act_tile(g, s) == s).collect()
}
