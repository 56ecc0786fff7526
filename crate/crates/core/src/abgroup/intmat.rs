//! Exact integer linear algebra: Smith normal form with transforms, integer
//! system solving, and triangular lattice bases for membership tests.

use crate::error::{Error, Result};

pub(crate) type IntMatrix = Vec<Vec<i128>>;

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("integer matrix"))
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow("integer matrix"))
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("integer matrix"))
}

pub(crate) fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

/// Extended gcd: returns (g, s, t) with g = s*a + t*b and g >= 0.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Smith normal form `S = U * A * V` with `U`, `V` unimodular.
#[derive(Debug, Clone)]
pub(crate) struct Smith {
    /// Diagonal of `S`, length `min(rows, cols)`; the first `rank` entries are
    /// positive and each divides the next.
    pub diag: Vec<i128>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, q: i128) -> Result<()> {
    // m[target] -= q * m[source]
    for j in 0..m[target].len() {
        let delta = mul(q, m[source][j])?;
        m[target][j] = sub(m[target][j], delta)?;
    }
    Ok(())
}

fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, q: i128) -> Result<()> {
    for row in m.iter_mut() {
        let delta = mul(q, row[source])?;
        row[target] = sub(row[target], delta)?;
    }
    Ok(())
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub(crate) fn smith(a: &[Vec<i128>], cols: usize) -> Result<Smith> {
    let rows = a.len();
    let mut s: IntMatrix = a.to_vec();
    for r in &s {
        if r.len() != cols {
            return Err(Error::MalformedSystem(format!(
                "ragged matrix row of length {} (expected {cols})",
                r.len()
            )));
        }
    }
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        // smallest non-zero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in s.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < s[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut s, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if s[i][t] != 0 {
                    let q = s[i][t] / s[t][t];
                    row_axpy(&mut s, i, t, q)?;
                    row_axpy(&mut u, i, t, q)?;
                    if s[i][t] != 0 {
                        s.swap(t, i);
                        u.swap(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if s[t][j] != 0 {
                    let q = s[t][j] / s[t][t];
                    col_axpy(&mut s, j, t, q)?;
                    col_axpy(&mut v, j, t, q)?;
                    if s[t][j] != 0 {
                        swap_cols(&mut s, t, j);
                        swap_cols(&mut v, t, j);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let pivot = s[t][t];
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| s[i][j] % pivot != 0));
            match offender {
                Some(i) => {
                    // fold the offending row into the pivot row and retry
                    row_axpy(&mut s, t, i, -1)?;
                    row_axpy(&mut u, t, i, -1)?;
                }
                None => break,
            }
        }
        if s[t][t] < 0 {
            for x in s[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag: Vec<i128> = (0..steps).map(|i| s[i][i]).collect();
    let rank = diag.iter().take_while(|&&d| d != 0).count();
    Ok(Smith { diag, rank, u, v })
}

pub(crate) fn mat_vec(a: &[Vec<i128>], x: &[i128]) -> Result<Vec<i128>> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .try_fold(0i128, |acc, (&p, &q)| add(acc, mul(p, q)?))
        })
        .collect()
}

/// Integer solution set of `A x = b`: a particular solution plus a basis of
/// the integer kernel of `A`.
#[derive(Debug, Clone)]
pub(crate) struct IntSolution {
    pub particular: Vec<i128>,
    pub kernel: Vec<Vec<i128>>,
}

/// Solves `A x = b` over the integers. `None` means no integer solution.
///
/// When unsolvable, the returned certificate (second element) is a rational
/// row combination `y = row_i(U) / s_i` with `y^T A` integral and `y^T b`
/// non-integral, encoded as `(row_i(U), s_i)`; `s_i = 0` means `y^T A = 0`
/// exactly.
pub(crate) fn solve_integer(
    a: &[Vec<i128>],
    cols: usize,
    b: &[i128],
) -> Result<std::result::Result<IntSolution, (Vec<i128>, i128)>> {
    if a.len() != b.len() {
        return Err(Error::MalformedSystem(format!(
            "{} equations but {} right-hand sides",
            a.len(),
            b.len()
        )));
    }
    let sm = smith(a, cols)?;
    let c = mat_vec(&sm.u, b)?;
    let mut y = vec![0i128; cols];
    for i in 0..a.len() {
        if i < sm.rank {
            let d = sm.diag[i];
            if c[i] % d != 0 {
                return Ok(Err((sm.u[i].clone(), d)));
            }
            y[i] = c[i] / d;
        } else if c[i] != 0 {
            return Ok(Err((sm.u[i].clone(), 0)));
        }
    }
    let particular = mat_vec(&sm.v, &y)?;
    let kernel = (sm.rank..cols)
        .map(|j| sm.v.iter().map(|row| row[j]).collect())
        .collect();
    Ok(Ok(IntSolution { particular, kernel }))
}

/// Full-rank lattice in `Z^k` stored as an upper-triangular (Hermite) basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Lattice {
    basis: IntMatrix,
}

impl Lattice {
    /// The lattice `diag(moduli) Z^k`.
    pub fn diagonal(moduli: &[u64]) -> Self {
        let k = moduli.len();
        let basis = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { i128::from(moduli[i]) } else { 0 })
                    .collect()
            })
            .collect();
        Lattice { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Adds a vector to the lattice, keeping the basis triangular.
    pub fn insert(&mut self, v: &[i128]) -> Result<()> {
        let k = self.dim();
        let mut v = v.to_vec();
        for i in 0..k {
            if v[i] == 0 {
                continue;
            }
            let p = self.basis[i][i];
            let (g, s, t) = ext_gcd(p, v[i]);
            let (pa, va) = (p / g, v[i] / g);
            let mut new_row = vec![0i128; k];
            let mut rest = vec![0i128; k];
            for j in 0..k {
                new_row[j] = add(mul(s, self.basis[i][j])?, mul(t, v[j])?)?;
                rest[j] = sub(mul(va, self.basis[i][j])?, mul(pa, v[j])?)?;
            }
            self.basis[i] = new_row;
            v = rest;
        }
        debug_assert!(v.iter().all(|&x| x == 0));
        self.reduce()
    }

    fn reduce(&mut self) -> Result<()> {
        let k = self.dim();
        for j in 0..k {
            if self.basis[j][j] < 0 {
                for x in self.basis[j].iter_mut() {
                    *x = -*x;
                }
            }
            let p = self.basis[j][j];
            for i in 0..j {
                let q = self.basis[i][j].div_euclid(p);
                if q != 0 {
                    for c in 0..k {
                        let delta = mul(q, self.basis[j][c])?;
                        self.basis[i][c] = sub(self.basis[i][c], delta)?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        let mut v = v.to_vec();
        for i in 0..self.dim() {
            let p = self.basis[i][i];
            if v[i] % p != 0 {
                return false;
            }
            let q = v[i] / p;
            if q != 0 {
                for (x, b) in v.iter_mut().zip(&self.basis[i]) {
                    *x -= q * b;
                }
            }
        }
        true
    }

    /// Product of the pivots, i.e. the index `[Z^k : L]`.
    pub fn covolume(&self) -> u128 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, r)| r[i].unsigned_abs())
            .product()
    }
}
