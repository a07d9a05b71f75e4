//! Linear algebra over the field with `ℓ` elements.

use crate::modular::inv_mod;

/// Reduced row echelon form of `mat` mod `ell`; returns the nonzero rows and
/// their pivot columns.
pub fn rref(mat: &[Vec<i64>], ell: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = mat
        .iter()
        .map(|row| row.iter().map(|&v| v.rem_euclid(ell as i64) as u64).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut pr = 0;
    for col in 0..cols {
        let Some(piv) = (pr..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(pr, piv);
        let inv = inv_mod(a[pr][col], ell).expect("nonzero element of a field");
        for v in a[pr].iter_mut() {
            *v = *v * inv % ell;
        }
        for i in 0..a.len() {
            if i != pr && a[i][col] != 0 {
                let factor = a[i][col];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + (ell - factor) * a[pr][j]) % ell;
                }
            }
        }
        pivots.push(col);
        pr += 1;
    }
    a.truncate(pr);
    (a, pivots)
}

pub fn rank(mat: &[Vec<i64>], ell: u64) -> usize {
    rref(mat, ell).1.len()
}

/// Basis of `{d : E d ≡ 0 (mod ℓ)}` for `E` with `m` columns, one vector per
/// free column.
pub fn kernel(mat: &[Vec<i64>], m: usize, ell: u64) -> Vec<Vec<u64>> {
    let (rows, pivots) = rref(mat, ell);
    (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u64; m];
            v[free] = 1;
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = (ell - row[free]) % ell;
            }
            v
        })
        .collect()
}

/// Basis of the row space of `E` mod `ℓ`.
pub fn row_space(mat: &[Vec<i64>], ell: u64) -> Vec<Vec<u64>> {
    rref(mat, ell).0
}

/// Every vector in the span of `basis` (vectors of length `len`).
pub fn span(basis: &[Vec<u64>], len: usize, ell: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; len]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * ell as usize);
        for v in &out {
            for t in 0..ell {
                next.push(v.iter().zip(b).map(|(&x, &y)| (x + t * y) % ell).collect());
            }
        }
        out = next;
    }
    out
}
