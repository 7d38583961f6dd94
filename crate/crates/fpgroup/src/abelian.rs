//! Abelian invariants of a presentation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::snf::{diagonal_only, IntMatrix};
use crate::Presentation;

/// `Z^free_rank x Z_{d1} x ... x Z_{dk}` with `d1 | d2 | ... | dk`, `di >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    /// Builds invariants from arbitrary diagonal entries: zeros count as free
    /// rank, units are dropped and the rest are sorted into a divisor chain.
    pub fn from_diagonal(entries: &[BigInt], extra_free: usize) -> Self {
        let mut free_rank = extra_free;
        let mut torsion = Vec::new();
        for d in entries {
            let d = d.abs();
            if d.is_zero() {
                free_rank += 1;
            } else if !d.is_one() {
                torsion.push(d);
            }
        }
        torsion.sort();
        AbelianInvariants { free_rank, torsion }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
    }

    /// Elementary abelian `Z_p^r` with `r >= 1`, if this is one.
    pub fn elementary_abelian(&self) -> Option<(u64, usize)> {
        if self.free_rank != 0 || self.torsion.is_empty() {
            return None;
        }
        let p = self.torsion[0].to_u64()?;
        let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        (prime && self.torsion.iter().all(|d| d.to_u64() == Some(p))).then_some((p, self.torsion.len()))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            let k = j - i;
            parts.push(if k == 1 {
                format!("Z{}", self.torsion[i])
            } else {
                format!("Z{}^{}", self.torsion[i], k)
            });
            i = j;
        }
        f.write_str(&parts.join(" x "))
    }
}

/// Abelianization through the relator exponent matrix.
///
/// A sparse pass first eliminates generators that occur with exponent sum
/// `±1` in some relator; the remaining block goes through a dense Smith
/// normal form.
pub fn abelianization(p: &Presentation) -> AbelianInvariants {
    let ncols = p.generator_count();
    let rows: Vec<Vec<(u32, i64)>> = p
        .relators()
        .iter()
        .map(|r| {
            r.exponent_vector(ncols)
                .into_iter()
                .enumerate()
                .filter(|&(_, v)| v != 0)
                .map(|(j, v)| (j as u32, v))
                .collect::<Vec<_>>()
        })
        .filter(|r: &Vec<(u32, i64)>| !r.is_empty())
        .collect();
    let (rows, alive) = eliminate_units(rows, ncols);
    let col_index: Vec<Option<usize>> = {
        let mut next = 0;
        alive
            .iter()
            .map(|&a| {
                a.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let width = alive.iter().filter(|&&a| a).count();
    let rows: Vec<&Vec<(u32, i64)>> = rows.iter().filter(|r| !r.is_empty()).collect();
    if width == 0 {
        return AbelianInvariants { free_rank: 0, torsion: Vec::new() };
    }
    if rows.is_empty() {
        return AbelianInvariants { free_rank: width, torsion: Vec::new() };
    }
    let mut data: Vec<BigInt> = vec![BigInt::zero(); rows.len() * width];
    for (i, r) in rows.iter().enumerate() {
        for &(j, v) in r.iter() {
            let c = col_index[j as usize].expect("eliminated column survived");
            data[i * width + c] = BigInt::from(v);
        }
    }
    let m = IntMatrix::from_rows(rows.len(), width, data);
    let diag = diagonal_only(&m);
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    AbelianInvariants::from_diagonal(
        &diag.into_iter().filter(|d| !d.is_zero()).collect::<Vec<_>>(),
        width - nonzero,
    )
}

fn coeff(row: &[(u32, i64)], col: u32) -> i64 {
    row.binary_search_by_key(&col, |e| e.0).map(|i| row[i].1).unwrap_or(0)
}

/// `target - q * pivot`, or `None` on overflow.
fn combine(target: &[(u32, i64)], pivot: &[(u32, i64)], q: i64) -> Option<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let take_t = j >= pivot.len() || (i < target.len() && target[i].0 < pivot[j].0);
        let take_p = i >= target.len() || (j < pivot.len() && pivot[j].0 < target[i].0);
        if take_t {
            out.push(target[i]);
            i += 1;
        } else if take_p {
            out.push((pivot[j].0, pivot[j].1.checked_mul(q)?.checked_neg()?));
            j += 1;
        } else {
            let v = target[i].1.checked_sub(pivot[j].1.checked_mul(q)?)?;
            if v != 0 {
                out.push((target[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn eliminate_units(mut rows: Vec<Vec<(u32, i64)>>, ncols: usize) -> (Vec<Vec<(u32, i64)>>, Vec<bool>) {
    let mut alive = vec![true; ncols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(j, _) in r {
            col_rows[j as usize].push(i as u32);
        }
    }
    let mut queue: Vec<u32> = (0..rows.len() as u32).rev().collect();
    while let Some(r) = queue.pop() {
        let r = r as usize;
        if rows[r].is_empty() {
            continue;
        }
        let pivot = rows[r]
            .iter()
            .filter(|e| e.1.abs() == 1)
            .min_by_key(|e| col_rows[e.0 as usize].len())
            .copied();
        let Some((j, v)) = pivot else { continue };
        let mut users = std::mem::take(&mut col_rows[j as usize]);
        users.sort_unstable();
        users.dedup();
        let pivot_row = std::mem::take(&mut rows[r]);
        let mut failed = Vec::new();
        for &s in &users {
            let s = s as usize;
            if s == r {
                continue;
            }
            let a = coeff(&rows[s], j);
            if a == 0 {
                continue;
            }
            match combine(&rows[s], &pivot_row, a * v) {
                Some(new_row) => {
                    for &(c, _) in &new_row {
                        if coeff(&rows[s], c) == 0 {
                            col_rows[c as usize].push(s as u32);
                        }
                    }
                    rows[s] = new_row;
                    queue.push(s as u32);
                }
                None => failed.push(s as u32),
            }
        }
        if failed.is_empty() {
            alive[j as usize] = false;
        } else {
            rows[r] = pivot_row;
            failed.push(r as u32);
            col_rows[j as usize] = failed;
        }
    }
    (rows, alive)
}
