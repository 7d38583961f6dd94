//! Free-group words.
//!
//! A letter is a non-zero `i32`: `k > 0` is generator `k - 1`, `-k` its
//! inverse. Words are kept freely reduced by every public constructor.

use std::cmp::Ordering;
use std::fmt;

use crate::FpError;

pub type Letter = i32;

/// Generator index of a letter (0-based).
#[inline]
pub fn generator_of(letter: Letter) -> usize {
    (letter.unsigned_abs() - 1) as usize
}

/// Letter for generator `g` with the given sign.
#[inline]
pub fn letter(g: usize, inverse: bool) -> Letter {
    let l = g as i32 + 1;
    if inverse {
        -l
    } else {
        l
    }
}

/// Column of a letter in a coset table: `2g` for the generator, `2g + 1`
/// for its inverse. The inverse column is `col ^ 1`.
#[inline]
pub fn column_of(letter: Letter) -> usize {
    let g = generator_of(letter);
    if letter > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

#[inline]
pub fn letter_of_column(col: usize) -> Letter {
    letter(col / 2, col % 2 == 1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from raw letters, freely reducing them.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator symbol");
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![letter(g, false)])
    }

    /// `g^e` for a generator `g` and any integer exponent.
    pub fn power_of_generator(g: usize, e: i64) -> Self {
        let l = letter(g, e < 0);
        Word(vec![l; e.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self * other * self^-1`.
    pub fn conjugate_by(&self, conjugator: &Word) -> Word {
        conjugator.mul(self).mul(&conjugator.inverse())
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Largest generator index used, plus one.
    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|&l| generator_of(l) + 1).max().unwrap_or(0)
    }

    /// Replaces every generator `g` by `images[g]` (inverse letters by the
    /// inverse image).
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for &l in &self.0 {
            let img = &images[generator_of(l)];
            if l > 0 {
                for &m in &img.0 {
                    push_reduced(&mut out, m);
                }
            } else {
                for &m in img.0.iter().rev() {
                    push_reduced(&mut out, -m);
                }
            }
        }
        Word(out)
    }

    /// Shifts every generator index by `offset`.
    pub fn shifted(&self, offset: usize) -> Word {
        let o = offset as i32;
        Word(self.0.iter().map(|&l| if l > 0 { l + o } else { l - o }).collect())
    }

    /// Exponent sum of each generator.
    pub fn exponent_vector(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for &l in &self.0 {
            v[generator_of(l)] += l.signum() as i64;
        }
        v
    }

    /// Strips matching letters from both ends (`x w x^-1 -> w`).
    pub fn cyclically_reduced(&self) -> Word {
        let s = &self.0;
        let (mut i, mut j) = (0usize, s.len());
        while j - i >= 2 && s[i] == -s[j - 1] {
            i += 1;
            j -= 1;
        }
        Word(s[i..j].to_vec())
    }

    /// Canonical representative of the cyclic class of this word and of its
    /// inverse: the lexicographically least rotation among both, after
    /// cyclic reduction. Two relators define the same normal closure
    /// contribution if their canonical forms agree.
    pub fn canonical_relator(&self) -> Word {
        let w = self.cyclically_reduced();
        if w.is_empty() {
            return w;
        }
        let a = least_rotation(&w.0);
        let inv = w.inverse();
        let b = least_rotation(&inv.0);
        if cmp_letters(&a, &b) == Ordering::Greater {
            Word(b)
        } else {
            Word(a)
        }
    }
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// Letter order used by canonical forms: by generator, generator before
/// its inverse.
#[inline]
fn letter_key(l: Letter) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

fn cmp_letters(a: &[Letter], b: &[Letter]) -> Ordering {
    a.iter()
        .map(|&l| letter_key(l))
        .cmp(b.iter().map(|&l| letter_key(l)))
}

/// Least rotation by Booth's algorithm.
fn least_rotation(s: &[Letter]) -> Vec<Letter> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let key = |i: usize| letter_key(s[i % n]);
    let mut f = vec![-1i64; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = key(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != key(k + i as usize + 1) {
            if sj < key(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if sj != key(k + (i + 1) as usize) {
            if sj < key(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    (0..n).map(|t| s[(k + t) % n]).collect()
}

impl fmt::Display for Word {
    /// Displays with `x1, x2, ...` names; see [`crate::Presentation`] for
    /// named output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<String> = (0..self.rank_needed()).map(|g| format!("x{}", g + 1)).collect();
        f.write_str(&crate::presentation::format_word(self, &names))
    }
}

/// A free group of fixed rank; its operations validate the alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    pub rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        FreeGroup { rank }
    }

    pub fn check(&self, w: &Word) -> Result<(), FpError> {
        match w.0.iter().find(|&&l| generator_of(l) >= self.rank) {
            Some(&letter) => Err(FpError::AlphabetMismatch { letter, rank: self.rank }),
            None => Ok(()),
        }
    }

    pub fn word(&self, letters: impl IntoIterator<Item = Letter>) -> Result<Word, FpError> {
        let w = Word::new(letters);
        self.check(&w)?;
        Ok(w)
    }

    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word, FpError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.mul(b))
    }

    pub fn invert(&self, a: &Word) -> Result<Word, FpError> {
        self.check(a)?;
        Ok(a.inverse())
    }

    pub fn free_reduce(&self, letters: &[Letter]) -> Result<Word, FpError> {
        self.word(letters.iter().copied())
    }
}
