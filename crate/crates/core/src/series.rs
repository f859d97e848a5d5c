//! Laurent-series prefixes, polynomials over F_p, and continued fractions.
//!
//! A `LaurentPrefix` holds the first `N` coefficients `b_1..b_N` of a series
//! with no polynomial part. Continued-fraction expansion works on truncated
//! series; each partial quotient is certified only while the prefix provably
//! determines it (see [`cf_expand`]).

use crate::error::Error;
use crate::field::PrimeField;

/// A polynomial over F_p, lowest-degree coefficient first, trimmed so the
/// leading coefficient is nonzero (the zero polynomial has no coefficients).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn new(field: PrimeField, mut coeffs: Vec<u32>) -> Self {
        for c in &mut coeffs {
            *c %= field.modulus();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u32; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.field.add(self.coeff(i), other.coeff(i));
        }
        Poly::new(self.field, out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(a, b));
            }
        }
        Poly::new(self.field, out)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}*t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// The first `N` coefficients `b_1..b_N` of a Laurent series in `t^{-1}`
/// with no polynomial part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPrefix {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl LaurentPrefix {
    pub fn new(field: PrimeField, mut coeffs: Vec<u32>) -> Self {
        for c in &mut coeffs {
            *c %= field.modulus();
        }
        LaurentPrefix { field, coeffs }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `b_n` (1-indexed).
    #[inline]
    pub fn coeff(&self, n: usize) -> u32 {
        debug_assert!(n >= 1 && n <= self.coeffs.len());
        self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// First `n` Thue-Morse bits as a Laurent prefix over F_2.
///
/// Built by iterating the doubling step `w -> w | complement(w)` from the
/// one-bit word `0`, then truncating.
pub fn thue_morse_prefix(n: usize) -> LaurentPrefix {
    assert!(n >= 1, "prefix length must be positive");
    let f2 = PrimeField::new(2).unwrap();
    let mut bits = vec![0u32];
    while bits.len() < n {
        let flipped: Vec<u32> = bits.iter().map(|&b| 1 - b).collect();
        bits.extend(flipped);
    }
    bits.truncate(n);
    LaurentPrefix::new(f2, bits)
}

/// Drops the first `j` coefficients: the prefix of `t^j * theta` with the
/// polynomial part discarded.
pub fn shift(theta: &LaurentPrefix, j: usize) -> Result<LaurentPrefix, Error> {
    if j >= theta.precision() {
        return Err(Error::InsufficientPrecision {
            needed: j + 1,
            have: theta.precision(),
        });
    }
    Ok(LaurentPrefix {
        field: theta.field,
        coeffs: theta.coeffs[j..].to_vec(),
    })
}

/// A continued-fraction expansion computed from a finite prefix.
///
/// `quotients[k]` is the partial quotient `a_{k+1}`; `degrees[k]` its degree
/// `d_{k+1} >= 1`, and `convergent_degrees[k]` the running sum `i_{k+1}`.
/// Only the first `valid_count` quotients are certified by the available
/// precision; later entries are artifacts of truncation and are not emitted.
#[derive(Debug, Clone)]
pub struct CFExpansion {
    pub quotients: Vec<Poly>,
    pub degrees: Vec<usize>,
    pub convergent_degrees: Vec<usize>,
    pub valid_count: usize,
}

impl CFExpansion {
    /// Numerator/denominator polynomials `(p_k, q_k)` of the `k`-th
    /// convergent, `k` 1-indexed up to `valid_count`.
    pub fn convergent(&self, field: PrimeField, k: usize) -> (Poly, Poly) {
        assert!(k >= 1 && k <= self.quotients.len());
        // p_{-1} = 1, p_0 = a_0 = 0; q_{-1} = 0, q_0 = 1.
        let mut p_prev = Poly::new(field, vec![1]);
        let mut p = Poly::zero(field);
        let mut q_prev = Poly::zero(field);
        let mut q = Poly::new(field, vec![1]);
        for a in &self.quotients[..k] {
            let p_next = a.mul(&p).add(&p_prev);
            let q_next = a.mul(&q).add(&q_prev);
            p_prev = p;
            p = p_next;
            q_prev = q;
            q = q_next;
        }
        (p, q)
    }
}

/// Reciprocal of a power series `u` in `s` with `u_0 != 0`, to `len` terms.
fn series_recip(field: PrimeField, u: &[u32], len: usize) -> Vec<u32> {
    let u0_inv = field.inv(u[0]).expect("unit constant term");
    let mut inv = Vec::with_capacity(len);
    inv.push(u0_inv);
    for n in 1..len {
        let mut acc = 0u32;
        for j in 1..=n.min(u.len() - 1) {
            acc = field.add(acc, field.mul(u[j], inv[n - j]));
        }
        inv.push(field.mul(field.neg(acc), u0_inv));
    }
    inv
}

/// Expands `theta` into partial quotients by iterated inversion of the
/// truncated series.
///
/// Each step inverts the remainder, splits off the polynomial part as the
/// next quotient, and keeps the fractional tail; a step of degree `d` costs
/// `2d` coefficients of precision. The `k`-th quotient is certified while
/// `2*i_k - 1 <= N`: the degree data up to `i_k` is exactly determined by
/// the first `2*i_k - 1` coefficients. Quotient coefficients that would
/// depend on coefficients past the prefix are taken as zero, which keeps
/// every certified convergent accurate to `t^{-(2*i_k - 1)}`.
pub fn cf_expand(theta: &LaurentPrefix) -> CFExpansion {
    let field = theta.field();
    let n_total = theta.precision();
    let mut rem: Vec<u32> = theta.coeffs.clone();
    let mut quotients = Vec::new();
    let mut degrees = Vec::new();
    let mut convergent_degrees = Vec::new();
    let mut i_k = 0usize;
    let mut valid_count = 0usize;

    loop {
        let Some(v) = rem.iter().position(|&c| c != 0).map(|z| z + 1) else {
            break; // remainder vanishes within precision
        };
        i_k += v;
        if 2 * i_k - 1 > n_total {
            break; // not certified; stop rather than emit junk
        }
        // rem = t^{-v} * u(t^{-1}); recip(u) gives the quotient (s^0..s^v)
        // and the next remainder (s^{v+1}..).
        let u = &rem[v - 1..];
        let want = (u.len()).min(rem.len());
        let inv = series_recip(field, u, want.max(v + 1));
        let mut q_coeffs = vec![0u32; v + 1];
        for (i, qc) in q_coeffs.iter_mut().enumerate() {
            // coefficient of t^{v-i} is inv[i]; entries beyond the known
            // range stay zero
            if i < inv.len() {
                *qc = inv[i];
            }
        }
        q_coeffs.reverse();
        let quotient = Poly::new(field, q_coeffs);
        debug_assert_eq!(quotient.degree(), Some(v));
        quotients.push(quotient);
        degrees.push(v);
        convergent_degrees.push(i_k);
        valid_count += 1;

        let new_len = rem.len().saturating_sub(2 * v);
        if new_len == 0 {
            break;
        }
        let mut next = Vec::with_capacity(new_len);
        for i in 0..new_len {
            next.push(*inv.get(v + 1 + i).unwrap_or(&0));
        }
        rem = next;
    }

    CFExpansion {
        quotients,
        degrees,
        convergent_degrees,
        valid_count,
    }
}

/// Re-expands the rational function `p/q` (with `deg p < deg q`) as a
/// Laurent prefix of length `n`. Used to check convergents against the
/// original series.
pub fn rational_to_prefix(p: &Poly, q: &Poly, n: usize) -> LaurentPrefix {
    let field = q.field();
    let dq = q.degree().expect("nonzero denominator");
    // theta = p/q: long division of p * t^n by q, reading off negative powers.
    // Work with the reversed series in s = t^{-1}: p/q = s^{dq-dp} * ...
    // Simpler: synthetic division producing b_1, b_2, ... directly.
    let mut coeffs = Vec::with_capacity(n);
    // state: current numerator as coefficients of t^{dq-1}..t^0 then extend
    let mut num = vec![0u32; dq];
    for i in 0..dq {
        num[i] = p.coeff(dq - 1 - i); // num[0] is the t^{dq-1} coefficient
    }
    let lead_inv = field.inv(q.coeff(dq)).unwrap();
    for _ in 0..n {
        let b = field.mul(num[0], lead_inv);
        coeffs.push(b);
        // num = (num - b * q) * t, dropping the vanished leading term
        let mut next = vec![0u32; dq];
        for (i, nx) in next.iter_mut().enumerate() {
            let cur = if i + 1 < dq { num[i + 1] } else { 0 };
            let qc = q.coeff(dq - 1 - i);
            *nx = field.sub(cur, field.mul(b, qc));
        }
        num = next;
    }
    LaurentPrefix::new(field, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    #[test]
    fn thue_morse_small_prefixes() {
        assert_eq!(thue_morse_prefix(4).coeffs(), &[0, 1, 1, 0]);
        assert_eq!(
            thue_morse_prefix(16).coeffs(),
            &[0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]
        );
    }

    #[test]
    fn thue_morse_matches_popcount_parity() {
        let tm = thue_morse_prefix(64);
        for n in 1..=64usize {
            let expected = ((n - 1).count_ones() & 1) as u32;
            assert_eq!(tm.coeff(n), expected, "index {n}");
        }
    }

    #[test]
    fn shift_drops_leading_coefficients() {
        let tm = thue_morse_prefix(16);
        assert_eq!(shift(&tm, 0).unwrap(), tm);
        let s = shift(&tm, 1).unwrap();
        assert_eq!(s.coeffs(), &[1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
        assert!(shift(&tm, 16).is_err());
    }

    #[test]
    fn shift_composes() {
        let tm = thue_morse_prefix(40);
        for a in 0..5 {
            for b in 0..5 {
                let lhs = shift(&shift(&tm, a).unwrap(), b).unwrap();
                let rhs = shift(&tm, a + b).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn cf_of_t_inverse() {
        // theta = t^{-1}: 1/theta = t exactly.
        let mut coeffs = vec![0u32; 12];
        coeffs[0] = 1;
        let theta = LaurentPrefix::new(f2(), coeffs);
        let cf = cf_expand(&theta);
        assert_eq!(cf.valid_count, 1);
        assert_eq!(cf.degrees, vec![1]);
        assert_eq!(cf.quotients[0], Poly::new(f2(), vec![0, 1]));
    }

    #[test]
    fn cf_of_geometric_series() {
        // theta = sum t^{-n} = 1/(t+1) over F_2.
        let theta = LaurentPrefix::new(f2(), vec![1; 12]);
        let cf = cf_expand(&theta);
        assert_eq!(cf.valid_count, 1);
        assert_eq!(cf.degrees, vec![1]);
        assert_eq!(cf.quotients[0], Poly::new(f2(), vec![1, 1]));
    }

    #[test]
    fn cf_certification_rule() {
        // Certified k satisfy 2*i_k - 1 <= N.
        let tm = thue_morse_prefix(64);
        let cf = cf_expand(&tm);
        assert!(cf.valid_count > 0);
        for k in 0..cf.valid_count {
            assert!(2 * cf.convergent_degrees[k] - 1 <= 64);
            assert!(cf.degrees[k] >= 1);
        }
        // Degrees of convergent denominators equal the running degree sums.
        for k in 1..=cf.valid_count {
            let (_, q) = cf.convergent(f2(), k);
            assert_eq!(q.degree(), Some(cf.convergent_degrees[k - 1]));
        }
    }

    #[test]
    fn convergents_reconstruct_prefix() {
        let tm = thue_morse_prefix(64);
        let cf = cf_expand(&tm);
        for k in 1..=cf.valid_count {
            let (p, q) = cf.convergent(f2(), k);
            let ik = cf.convergent_degrees[k - 1];
            let back = rational_to_prefix(&p, &q, 2 * ik - 1);
            assert_eq!(
                back.coeffs(),
                &tm.coeffs()[..2 * ik - 1],
                "convergent {k} disagrees before t^-{}",
                2 * ik
            );
        }
    }

    #[test]
    fn cf_zero_series_has_no_quotients() {
        let theta = LaurentPrefix::new(f2(), vec![0; 8]);
        let cf = cf_expand(&theta);
        assert_eq!(cf.valid_count, 0);
        assert!(cf.quotients.is_empty());
    }

    #[test]
    fn cf_over_f3() {
        // theta = 1/(t - 1) over F_3: coefficients 1,1,1,...
        let f3 = PrimeField::new(3).unwrap();
        let theta = LaurentPrefix::new(f3, vec![1; 10]);
        let cf = cf_expand(&theta);
        assert_eq!(cf.degrees[0], 1);
        let (p, q) = cf.convergent(f3, 1);
        let back = rational_to_prefix(&p, &q, 10);
        assert_eq!(back.coeffs(), theta.coeffs());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Every certified convergent reconstructs the prefix through
            // coefficient 2 i_k - 1, over any small prime field.
            #[test]
            fn convergents_reconstruct(
                p in prop::sample::select(vec![2u32, 3, 5]),
                coeffs in prop::collection::vec(0u32..5, 8..48),
            ) {
                let field = PrimeField::new(p).unwrap();
                let theta = LaurentPrefix::new(field, coeffs);
                let cf = cf_expand(&theta);
                for k in 1..=cf.valid_count {
                    let (pk, qk) = cf.convergent(field, k);
                    prop_assert_eq!(qk.degree(), Some(cf.convergent_degrees[k - 1]));
                    let ik = cf.convergent_degrees[k - 1];
                    let back = rational_to_prefix(&pk, &qk, 2 * ik - 1);
                    prop_assert_eq!(back.coeffs(), &theta.coeffs()[..2 * ik - 1]);
                }
            }

            // Shifting is index arithmetic: any split of the shift agrees.
            #[test]
            fn shifts_compose(
                coeffs in prop::collection::vec(0u32..2, 4..64),
                a in 0usize..8,
                b in 0usize..8,
            ) {
                let theta = LaurentPrefix::new(PrimeField::new(2).unwrap(), coeffs);
                prop_assume!(a + b < theta.precision());
                let lhs = shift(&shift(&theta, a).unwrap(), b).unwrap();
                let rhs = shift(&theta, a + b).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
