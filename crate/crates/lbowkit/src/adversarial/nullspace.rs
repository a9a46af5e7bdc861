//! Exact kernel computation over the rationals.
//!
//! Gauss–Jordan elimination on `BigRational` entries: every pivot step is an
//! exact field operation, so the resulting reduced row-echelon form — and the
//! kernel basis read off its free columns — is exact, with no tolerance
//! anywhere. Matrices here are tiny (one row per embedding dimension), so
//! bignum growth is a non-issue.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A basis of `{ v : M·v = 0 }` for the `rows.len() x cols` matrix `M`.
///
/// Basis vectors are produced in ascending free-column order; each has a 1 in
/// its free column, which keeps the output deterministic.
pub(crate) fn kernel_basis(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let height = a.len();

    // Reduced row echelon form, tracking pivot columns.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..height).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..height {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in 0..cols {
                    let scaled = &a[r][j] * &factor;
                    a[i][j] = &a[i][j] - &scaled;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == height {
            break;
        }
    }

    // One basis vector per free column: v[free] = 1, v[pivot] read from RREF.
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (pr, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[pr][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Scales a rational vector to coprime integers with a canonical sign.
///
/// Multiplies by the LCM of the denominators, divides by the GCD of the
/// results, and flips the global sign so the first nonzero entry is positive.
/// Zero vectors come back as all-zero.
pub(crate) fn integerize(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for r in v {
        if !r.is_zero() {
            lcm = lcm.lcm(r.denom());
        }
    }
    let scale = BigRational::from_integer(lcm);
    // Exact: every denominator divides the LCM.
    let mut ints: Vec<BigInt> = v.iter().map(|r| (r * &scale).to_integer()).collect();

    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for x in ints.iter_mut() {
            *x = &*x / &gcd;
        }
    }

    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
    }
    ints
}
