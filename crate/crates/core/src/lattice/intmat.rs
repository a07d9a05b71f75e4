//! Exact integer matrix routines over `i128`: row Hermite normal form,
//! integer kernels, Bareiss determinants and maximal minors.
//!
//! Every arithmetic step is checked; overflow surfaces as an error rather
//! than a wrong answer.

use super::LatticeError;

pub type Matrix = Vec<Vec<i128>>;

fn add(a: i128, b: i128) -> Result<i128, LatticeError> {
    a.checked_add(b).ok_or(LatticeError::Overflow)
}

fn mul(a: i128, b: i128) -> Result<i128, LatticeError> {
    a.checked_mul(b).ok_or(LatticeError::Overflow)
}

pub fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

// row[i] -= q * row[k]
fn sub_multiple(a: &mut Matrix, i: usize, k: usize, q: i128) -> Result<(), LatticeError> {
    if q == 0 {
        return Ok(());
    }
    for j in 0..a[i].len() {
        let t = mul(q, a[k][j])?;
        a[i][j] = add(a[i][j], t.checked_neg().ok_or(LatticeError::Overflow)?)?;
    }
    Ok(())
}

/// Row-style Hermite normal form: the nonzero rows, echelon with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf_rows(mat: &Matrix) -> Result<Matrix, LatticeError> {
    let mut a = mat.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pr = 0;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let Some(piv) = (pr..rows)
                .filter(|&i| a[i][col] != 0)
                .min_by_key(|&i| a[i][col].unsigned_abs())
            else {
                break;
            };
            a.swap(pr, piv);
            let mut cleared = true;
            for i in pr + 1..rows {
                if a[i][col] != 0 {
                    let q = a[i][col] / a[pr][col];
                    sub_multiple(&mut a, i, pr, q)?;
                    cleared &= a[i][col] == 0;
                }
            }
            if cleared {
                break;
            }
        }
        if a[pr][col] == 0 {
            continue;
        }
        if a[pr][col] < 0 {
            for v in a[pr].iter_mut() {
                *v = v.checked_neg().ok_or(LatticeError::Overflow)?;
            }
        }
        for i in 0..pr {
            let q = a[i][col].div_euclid(a[pr][col]);
            sub_multiple(&mut a, i, pr, q)?;
        }
        pr += 1;
    }
    a.truncate(pr);
    Ok(a)
}

/// Basis of `{n ∈ Z^m : E n = 0}` for an `r × m` matrix `E`, in Hermite
/// normal form (so each vector is primitive with positive leading entry).
pub fn integer_kernel(e: &Matrix, m: usize) -> Result<Matrix, LatticeError> {
    let r = e.len();
    // rows [E^T | I_m]; unimodular row operations keep the I-part tracking
    // the combination, and rows whose E-part vanishes span the kernel
    let augmented: Matrix = (0..m)
        .map(|j| {
            let mut row: Vec<i128> = (0..r).map(|i| e[i][j]).collect();
            row.extend((0..m).map(|k| i128::from(k == j)));
            row
        })
        .collect();
    let h = hnf_rows(&augmented)?;
    Ok(h.into_iter()
        .filter(|row| row[..r].iter().all(|&v| v == 0))
        .map(|row| row[r..].to_vec())
        .collect())
}

/// Determinant by fraction-free elimination.
pub fn bareiss_det(square: &Matrix) -> Result<i128, LatticeError> {
    let n = square.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a = square.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(i) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = mul(a[i][j], a[k][k])?
                    .checked_sub(mul(a[i][k], a[k][j])?)
                    .ok_or(LatticeError::Overflow)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    mul(sign, a[n - 1][n - 1])
}

/// Number of `m`-subsets of `r` rows, saturating.
pub fn binomial(r: usize, m: usize) -> u128 {
    if m > r {
        return 0;
    }
    let m = m.min(r - m);
    let mut acc = 1u128;
    for i in 0..m {
        acc = acc.saturating_mul((r - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All `m × m` minors of an `r × m` matrix, row subsets in lexicographic order.
pub fn maximal_minors(e: &Matrix, m: usize) -> Result<Vec<i128>, LatticeError> {
    let r = e.len();
    let mut out = Vec::new();
    if m > r {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let sub: Matrix = idx.iter().map(|&i| e[i].clone()).collect();
        out.push(bareiss_det(&sub)?);
        // next combination
        let Some(pos) = (0..m).rev().find(|&k| idx[k] < r - m + k) else {
            break;
        };
        idx[pos] += 1;
        for k in pos + 1..m {
            idx[k] = idx[k - 1] + 1;
        }
    }
    Ok(out)
}

/// Gcd of the maximal minors of an `r × m` matrix, via the Hermite form
/// (0 when the rank is below `m`).
pub fn minor_gcd_via_hnf(e: &Matrix, m: usize) -> Result<i128, LatticeError> {
    let h = hnf_rows(e)?;
    if h.len() < m {
        return Ok(0);
    }
    (0..m).try_fold(1i128, |acc, i| mul(acc, h[i][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i128]]) -> Matrix {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    fn cofactor_det(a: &Matrix) -> i128 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Matrix = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf_rows(&mat(&[&[2, 3]])).unwrap(), mat(&[&[2, 3]]));
        assert_eq!(hnf_rows(&mat(&[&[2, 1], &[1, 2]])).unwrap(), mat(&[&[1, 2], &[0, 3]]));
        assert_eq!(hnf_rows(&mat(&[&[0, 0], &[4, 6], &[6, 9]])).unwrap(), mat(&[&[2, 3]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(integer_kernel(&mat(&[&[2, 3]]), 2).unwrap(), mat(&[&[3, -2]]));
        assert!(integer_kernel(&mat(&[&[1, 0], &[0, 1]]), 2).unwrap().is_empty());
        let k = integer_kernel(&mat(&[&[1, 0, 2], &[0, 1, 0]]), 3).unwrap();
        assert_eq!(k, mat(&[&[2, 0, -1]]));
    }

    #[test]
    fn minors_examples() {
        assert_eq!(maximal_minors(&mat(&[&[2, 1], &[1, 2]]), 2).unwrap(), vec![3]);
        let e = mat(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(maximal_minors(&e, 2).unwrap(), vec![1, 1, -1]);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
    }

    fn small_matrix(max_rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(prop::collection::vec(-6i128..=6, cols), 1..=max_rows)
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(a in (1usize..=5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-9i128..=9, n), n))) {
            prop_assert_eq!(bareiss_det(&a).unwrap(), cofactor_det(&a));
        }

        #[test]
        fn kernel_vectors_are_annihilated_and_primitive(e in small_matrix(4, 4)) {
            let basis = integer_kernel(&e, 4).unwrap();
            let rank = hnf_rows(&e).unwrap().len();
            prop_assert_eq!(basis.len(), 4 - rank);
            for v in &basis {
                for row in &e {
                    prop_assert_eq!(row.iter().zip(v).map(|(a, b)| a * b).sum::<i128>(), 0);
                }
                prop_assert_eq!(v.iter().fold(0, |g, &x| gcd(g, x)), 1);
                prop_assert!(*v.iter().find(|&&x| x != 0).unwrap() > 0);
            }
        }

        #[test]
        fn hnf_gcd_equals_minor_gcd(e in small_matrix(6, 3)) {
            let minors = maximal_minors(&e, 3).unwrap();
            let g = minors.iter().fold(0, |g, &x| gcd(g, x));
            prop_assert_eq!(minor_gcd_via_hnf(&e, 3).unwrap(), g);
        }
    }
}
