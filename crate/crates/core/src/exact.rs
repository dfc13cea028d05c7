//! Exact rank, kernel and lattice computations over ℤ and ℚ.

pub use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `v` as machine integers, if every entry fits.
pub fn to_small(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

/// Rank over ℚ of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank_exact(m: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigInt>> = m.iter().map(|r| to_big(r)).collect();
    rank_big(&rows)
}

/// [`rank_exact`] for arbitrary-precision entries.
pub fn rank_big(m: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(m: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &f * p;
            }
        }
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

fn rationals(m: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Scales a rational vector to the primitive integer vector on its ray.
pub fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Basis of the rational kernel `{x : M x = 0}` of an integer matrix with
/// `ncols` columns, as primitive integer vectors.
pub fn kernel_basis(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let (red, pivots) = rref(&rationals(m));
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in red.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            primitive(&v)
        })
        .collect()
}

/// Whether `v` lies in the ℚ-span of `gens`.
pub fn in_span(gens: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut with = gens.to_vec();
    with.push(v.to_vec());
    rank_big(gens) == rank_big(&with)
}

/// Whether `M v = 0` holds exactly.
pub fn annihilates(m: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    m.iter()
        .all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<BigInt>().is_zero())
}

/// Whether `v` lies in the ℤ-lattice generated by `gens`, by integer row
/// echelon reduction.
pub fn lattice_contains(gens: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let ncols = v.len();
    let mut rows: Vec<Vec<BigInt>> = gens
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for col in 0..ncols {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    echelon.push((col, rows.swap_remove(i)));
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let prow = rows[piv].clone();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = rows[i][col].div_floor(&prow[col]);
                for (x, p) in rows[i].iter_mut().zip(&prow) {
                    *x -= &q * p;
                }
            }
        }
    }
    let mut rest = v.to_vec();
    for (col, row) in &echelon {
        let (q, r) = rest[*col].div_rem(&row[*col]);
        if !r.is_zero() {
            return false;
        }
        for (x, p) in rest.iter_mut().zip(row) {
            *x -= &q * p;
        }
    }
    rest.iter().all(Zero::is_zero)
}
