//! Exact elimination over the rationals, with a prime-field fast path for large sparse systems.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::{int, Rational};

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Rank of a rational matrix given by rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = Rational::one() / &m[r][col];
        for i in (r + 1)..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] * &inv;
            for c in col..ncols {
                if m[r][c].is_zero() {
                    continue;
                }
                let t = &f * &m[r][c];
                m[i][c] -= t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Outcome of [`solve_canonical`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// Unique solution once every free column is set to zero; `nullity` counts the free columns.
    Found { x: Vec<Rational>, nullity: usize },
    Inconsistent,
}

/// Solves `A x = b` (A given column-wise as sparse `(row, value)` lists) by reduced elimination
/// that takes pivots in column order; free columns are fixed at zero.
pub fn solve_canonical(cols: &[Vec<(usize, i64)>], nrows: usize, b: &[i64]) -> Solution {
    if let Some(sol) = solve_mod_p_then_verify(cols, nrows, b) {
        return sol;
    }
    solve_rational(cols, nrows, b)
}

fn dense_rows(cols: &[Vec<(usize, i64)>], nrows: usize) -> Vec<Vec<Rational>> {
    let mut rows = vec![vec![Rational::zero(); cols.len()]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            rows[i][j] = int(v);
        }
    }
    rows
}

fn solve_rational(cols: &[Vec<(usize, i64)>], nrows: usize, b: &[i64]) -> Solution {
    let n = cols.len();
    let mut rows = dense_rows(cols, nrows);
    for (i, r) in rows.iter_mut().enumerate() {
        r.push(int(b[i]));
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = Rational::one() / &rows[r][col];
        for c in col..=n {
            rows[r][c] = &rows[r][c] * &inv;
        }
        for i in 0..nrows {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for c in col..=n {
                if rows[r][c].is_zero() {
                    continue;
                }
                let t = &f * &rows[r][c];
                rows[i][c] -= t;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n].clone();
    }
    Solution::Found {
        x,
        nullity: n - pivots.len(),
    }
}

const P: u64 = (1 << 61) - 1;

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn subm(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powm(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a);
        }
        a = mulm(a, a);
        e >>= 1;
    }
    r
}

fn to_field(v: i64) -> u64 {
    if v >= 0 {
        v as u64 % P
    } else {
        P - ((-v) as u64 % P)
    }
}

fn from_field_symmetric(v: u64) -> i64 {
    if v > P / 2 {
        -((P - v) as i64)
    } else {
        v as i64
    }
}

/// Field elimination; the result is accepted only when it is an exact integer solution.
/// `None` leaves the decision to the rational path.
fn solve_mod_p_then_verify(cols: &[Vec<(usize, i64)>], nrows: usize, b: &[i64]) -> Option<Solution> {
    let n = cols.len();
    // Row-major sparse rows with the right-hand side as the last entry.
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![Default::default(); nrows];
    for (j, col) in cols.iter().enumerate() {
        for &(i, v) in col {
            let f = to_field(v);
            if f != 0 {
                rows[i].insert(j, f);
            }
        }
    }
    for (i, &v) in b.iter().enumerate() {
        let f = to_field(v);
        if f != 0 {
            rows[i].insert(n, f);
        }
    }
    let mut pivot_rows: Vec<(usize, BTreeMap<usize, u64>)> = Vec::new();
    let mut remaining: Vec<_> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    for col in 0..n {
        let Some(pos) = remaining.iter().position(|r| r.contains_key(&col)) else {
            continue;
        };
        let mut prow = remaining.swap_remove(pos);
        let inv = powm(prow[&col], P - 2);
        for v in prow.values_mut() {
            *v = mulm(*v, inv);
        }
        for r in remaining.iter_mut() {
            if let Some(&f) = r.get(&col) {
                for (&c, &v) in &prow {
                    let e = r.entry(c).or_insert(0);
                    *e = subm(*e, mulm(f, v));
                    if *e == 0 {
                        r.remove(&c);
                    }
                }
            }
        }
        remaining.retain(|r| !r.is_empty());
        pivot_rows.push((col, prow));
    }
    if remaining.iter().any(|r| r.contains_key(&n)) {
        // Possibly a field artifact; confirm over the rationals.
        return None;
    }
    // Back substitution with free columns at zero.
    let mut x = vec![0u64; n];
    for (col, row) in pivot_rows.iter().rev() {
        let mut v = row.get(&n).copied().unwrap_or(0);
        for (&c, &a) in row.range((col + 1)..n) {
            v = subm(v, mulm(a, x[c]));
        }
        x[*col] = v;
    }
    let xi: Vec<i64> = x.iter().map(|&v| from_field_symmetric(v)).collect();
    if xi.iter().any(|v| v.unsigned_abs() > 1 << 40) {
        return None;
    }
    let mut lhs = vec![0i128; nrows];
    for (j, col) in cols.iter().enumerate() {
        if xi[j] == 0 {
            continue;
        }
        for &(i, v) in col {
            lhs[i] += v as i128 * xi[j] as i128;
        }
    }
    if lhs.iter().zip(b).any(|(l, r)| *l != *r as i128) {
        return None;
    }
    Some(Solution::Found {
        x: xi.into_iter().map(int).collect(),
        nullity: n - pivot_rows.len(),
    })
}

/// Echelon basis over a prime field, grown one vector at a time. Membership over the field
/// is implied by membership over the rationals, so a negative answer is exact.
pub struct SpanModP {
    dim: usize,
    /// Indexed by leading position; each row is normalized to 1 there.
    rows: Vec<Option<Vec<u64>>>,
    rank: usize,
}

const Q: u64 = (1 << 31) - 1;

impl SpanModP {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![None; dim],
            rank: 0,
        }
    }

    fn reduce(&self, v: &[(usize, i64)]) -> Vec<u64> {
        let mut r = vec![0u64; self.dim];
        for &(i, x) in v {
            r[i] = (r[i] + x.rem_euclid(Q as i64) as u64) % Q;
        }
        for lead in 0..self.dim {
            let f = r[lead];
            if f == 0 {
                continue;
            }
            if let Some(row) = &self.rows[lead] {
                let g = Q - f;
                for (x, a) in r[lead..].iter_mut().zip(&row[lead..]) {
                    if *a != 0 {
                        *x = (*x + g * a) % Q;
                    }
                }
            }
        }
        r
    }

    /// Adds `v`; returns `false` when it was already in the span.
    pub fn insert(&mut self, v: &[(usize, i64)]) -> bool {
        let mut r = self.reduce(v);
        let Some(lead) = r.iter().position(|x| *x != 0) else {
            return false;
        };
        let inv = pow_q(r[lead], Q - 2);
        for x in r[lead..].iter_mut() {
            *x = *x * inv % Q;
        }
        self.rows[lead] = Some(r);
        self.rank += 1;
        true
    }

    pub fn contains(&self, v: &[(usize, i64)]) -> bool {
        self.reduce(v).iter().all(|x| *x == 0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

fn pow_q(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % Q;
        }
        a = a * a % Q;
        e >>= 1;
    }
    r
}

/// Rank over the prime field; a lower bound for the rational rank.
pub fn rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| to_field(v)).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = powm(m[r][col], P - 2);
        for i in (r + 1)..m.len() {
            let f = mulm(m[i][col], inv);
            if f == 0 {
                continue;
            }
            for c in col..ncols {
                let t = mulm(f, m[r][c]);
                m[i][c] = subm(m[i][c], t);
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn square_solve() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve_square(a, vec![int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let sing = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_square(sing, vec![int(1), int(1)]).is_none());
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![int(1), int(2), int(3)],
            vec![int(2), int(4), int(6)],
            vec![int(0), int(1), int(1)],
        ];
        assert_eq!(rank(&rows), 2);
        let irows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank_mod_p(&irows), 2);
        let mut span = SpanModP::new(3);
        assert!(span.insert(&[(0, 1), (1, 2)]));
        assert!(!span.insert(&[(0, 2), (1, 4)]));
        assert!(span.insert(&[(1, 1), (2, 1)]));
        assert!(span.contains(&[(0, 1), (1, 1), (2, -1)]));
        assert!(!span.contains(&[(2, 1)]));
        assert_eq!(span.rank(), 2);
    }

    #[test]
    fn canonical_solution_sets_free_columns_to_zero() {
        // Columns: e0, e0 (duplicate), e1.
        let cols = vec![vec![(0, 1)], vec![(0, 1)], vec![(1, 1)]];
        match solve_canonical(&cols, 2, &[3, -2]) {
            Solution::Found { x, nullity } => {
                assert_eq!(x, vec![int(3), int(0), int(-2)]);
                assert_eq!(nullity, 1);
            }
            s => panic!("{s:?}"),
        }
        assert_eq!(
            solve_canonical(&[vec![(0, 1)]], 2, &[0, 1]),
            Solution::Inconsistent
        );
    }

    #[test]
    fn rational_path_reports_fractions() {
        let cols = vec![vec![(0, 2)]];
        match solve_canonical(&cols, 1, &[1]) {
            Solution::Found { x, .. } => assert_eq!(x, vec![rat(1, 2)]),
            s => panic!("{s:?}"),
        }
    }
}
