//! Expansion of a polynomial in an integer register into products of bits.
//!
//! With `k = Σ_s b_s w_s`, `w_s = 2^{m−1−s}` (qubit 0 most significant) and
//! `b_s² = b_s`, every power `k^j` collapses to `Σ_S c_{S,j} Π_{s∈S} b_s` over
//! bit subsets `S` with `|S| ≤ j`.

/// Bit subset as a mask over register positions: position `s` is bit `1 << s`.
pub type Subset = u32;

/// Rotation angle attached to one bit subset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsetAngle {
    pub subset: Subset,
    pub angle: f64,
}

/// Positions (qubit offsets) contained in `subset`, ascending.
pub fn subset_positions(subset: Subset) -> impl Iterator<Item = usize> {
    (0..32).filter(move |s| subset & (1 << s) != 0)
}

/// Subsets of `0..m` with at most `p` elements, ordered by size then mask.
pub fn subsets_up_to(m: usize, p: usize) -> Vec<Subset> {
    assert!(m <= 31, "register too wide for subset masks");
    let mut out: Vec<Subset> = (0..1u32 << m)
        .filter(|s| s.count_ones() as usize <= p)
        .collect();
    out.sort_by_key(|s| (s.count_ones(), *s));
    out
}

fn weight(m: usize, s: usize) -> i128 {
    1i128 << (m - 1 - s)
}

/// `c_{S,j}` by inclusion–exclusion: `Σ_{T⊆S} (−1)^{|S|−|T|} (Σ_{s∈T} w_s)^j`.
///
/// Exact in integer arithmetic; zero whenever `|S| > j`.
pub fn multinomial_coefficient(m: usize, subset: Subset, j: usize) -> i128 {
    let size = subset.count_ones() as usize;
    if size > j {
        return 0;
    }
    if size == 0 {
        return i128::from(j == 0);
    }
    let pos: Vec<usize> = subset_positions(subset).collect();
    let mut total = 0i128;
    for t in 0..1u32 << size {
        let sum: i128 = (0..size)
            .filter(|i| t & (1 << i) != 0)
            .map(|i| weight(m, pos[i]))
            .sum();
        let term = sum.pow(j as u32);
        if (size - t.count_ones() as usize).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Table `c[S][j]` for the given subsets and `j = 0..=p`.
pub fn coefficient_table(m: usize, subsets: &[Subset], p: usize) -> Vec<Vec<i128>> {
    subsets
        .iter()
        .map(|&s| (0..=p).map(|j| multinomial_coefficient(m, s, j)).collect())
        .collect()
}

/// Angles `θ_S = Σ_j α_j c_{S,j}` such that `Σ_{S ⊆ bits(k)} θ_S = Σ_j α_j k^j`
/// for every `k` in `[0, 2^m)`. Subsets are indexed by qubit offset within the
/// `m`-qubit register.
pub fn multinomial_angles(coeffs: &[f64], m: usize) -> Vec<SubsetAngle> {
    assert!(m >= 1, "register needs at least one qubit");
    let p = coeffs.len().saturating_sub(1);
    let subsets = subsets_up_to(m, p);
    let table = coefficient_table(m, &subsets, p);
    subsets
        .iter()
        .zip(&table)
        .map(|(&subset, c)| SubsetAngle {
            subset,
            angle: coeffs.iter().zip(c).map(|(a, &c)| a * c as f64).sum(),
        })
        .collect()
}

/// Bivariate form: `α[a][b]` multiplies `k0^a k1^b`. Returned subsets are pairs
/// `(S0, S1)` over the two `m`-qubit registers.
pub fn multinomial_angles_2d(
    coeffs: &nalgebra::DMatrix<f64>,
    m: usize,
) -> Vec<(Subset, Subset, f64)> {
    let p0 = coeffs.nrows() - 1;
    let p1 = coeffs.ncols() - 1;
    let s0 = subsets_up_to(m, p0);
    let s1 = subsets_up_to(m, p1);
    let t0 = coefficient_table(m, &s0, p0);
    let t1 = coefficient_table(m, &s1, p1);
    let mut out = Vec::new();
    for (a, c0) in s0.iter().zip(&t0) {
        // Inner sums over k1 powers first: Σ_b α_ab c1_b for each a.
        for (b, c1) in s1.iter().zip(&t1) {
            let mut angle = 0.0;
            for i in 0..=p0 {
                if c0[i] == 0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..=p1 {
                    row += coeffs[(i, j)] * c1[j] as f64;
                }
                angle += c0[i] as f64 * row;
            }
            out.push((*a, *b, angle));
        }
    }
    out
}

/// `Σ_{S ⊆ bits(k)} θ_S` with `k` read most significant bit first.
pub fn subset_sum(angles: &[SubsetAngle], m: usize, k: usize) -> f64 {
    let mask = bit_mask(m, k);
    angles
        .iter()
        .filter(|a| a.subset & !mask == 0)
        .map(|a| a.angle)
        .sum()
}

/// Register positions set in `k`: position `s` carries weight `2^{m−1−s}`.
pub fn bit_mask(m: usize, k: usize) -> Subset {
    (0..m)
        .filter(|&s| k >> (m - 1 - s) & 1 == 1)
        .fold(0, |acc, s| acc | 1 << s)
}
