//! Todd-Coxeter coset enumeration.
//!
//! HLT strategy: cosets are processed in order and every relator is traced
//! at each one, defining new cosets to close gaps. Deductions are pushed on a
//! bounded stack and checked against all cyclic conjugates of the relators
//! (Felsch-style consequences); coincidences are merged with a union-find
//! forwarding array and a queue. When the live coset count hits the limit
//! a lookahead pass (tracing without defining) is tried before giving up.

use crate::coset::{CosetTable, SubgroupDescriptor};
use crate::word::column_of;
use crate::{FpError, FreeGroup, Presentation, Word};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Maximum number of simultaneously live cosets.
    pub max_cosets: usize,
    /// Capacity of the deduction stack; overflowing it only costs speed.
    pub max_deductions: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_cosets: 2_000_000, max_deductions: 200_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub total_defined: usize,
    pub max_live: usize,
    pub coincidences: usize,
    pub lookaheads: usize,
    pub deduction_overflows: usize,
}

#[derive(Clone, Debug)]
pub enum Enumeration {
    Complete(CosetTable, EnumerationStats),
    /// Limits were exhausted; nothing is claimed about the index.
    Undetermined(EnumerationStats),
}

impl Enumeration {
    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            Enumeration::Complete(t, _) => Some(t),
            Enumeration::Undetermined(_) => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        self.table().map(CosetTable::len)
    }

    pub fn stats(&self) -> &EnumerationStats {
        match self {
            Enumeration::Complete(_, s) | Enumeration::Undetermined(s) => s,
        }
    }
}

/// Enumerates the cosets of `<subgroup_generators>` in the group presented by `p`.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup_generators: &[Word],
    limits: EnumerationLimits,
) -> Result<Enumeration, FpError> {
    assert!(limits.max_cosets > 0 && limits.max_deductions > 0, "limits must be positive");
    let free = FreeGroup::new(p.generator_count());
    for w in subgroup_generators {
        free.check(w)?;
    }
    let rels = Relators::new(p, subgroup_generators);
    let mut e = Enumerator::new(2 * p.generator_count(), limits);
    let outcome = e.run(&rels);
    let stats = e.stats.clone();
    match outcome {
        Err(LimitHit) => Ok(Enumeration::Undetermined(stats)),
        Ok(()) => {
            let table = e.compact();
            let order: Vec<usize> = (0..2 * p.generator_count()).collect();
            let t = CosetTable::from_entries(
                p.clone(),
                SubgroupDescriptor::Generated(subgroup_generators.to_vec()),
                table,
                &order,
            )?;
            for w in subgroup_generators {
                if !t.contains(w) {
                    return Err(FpError::NotInSubgroup { coset: t.trace(0, w) });
                }
            }
            Ok(Enumeration::Complete(t, stats))
        }
    }
}

struct LimitHit;

struct Relators {
    /// Column sequences of the relators followed by their inverses.
    words: Vec<Vec<u32>>,
    base: usize,
    subgroup: Vec<Vec<u32>>,
    /// For each column, the `(word, rotation)` pairs whose first letter is it.
    by_first: Vec<Vec<(u32, u32)>>,
}

impl Relators {
    fn new(p: &Presentation, subgroup: &[Word]) -> Self {
        let cols = |w: &Word| w.letters().iter().map(|&l| column_of(l) as u32).collect::<Vec<u32>>();
        let mut words: Vec<Vec<u32>> = p.relators().iter().map(|r| cols(&r.cyclically_reduced())).collect();
        words.retain(|w| !w.is_empty());
        let base = words.len();
        for i in 0..base {
            let inv: Vec<u32> = words[i].iter().rev().map(|&c| c ^ 1).collect();
            words.push(inv);
        }
        let width = 2 * p.generator_count();
        let mut by_first = vec![Vec::new(); width];
        for (wi, w) in words.iter().enumerate() {
            for (s, &c) in w.iter().enumerate() {
                by_first[c as usize].push((wi as u32, s as u32));
            }
        }
        Relators { words, base, subgroup: subgroup.iter().map(cols).collect(), by_first }
    }
}

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    fwd: Vec<u32>,
    live: usize,
    deductions: Vec<(u32, u32)>,
    queue: Vec<u32>,
    limits: EnumerationLimits,
    stats: EnumerationStats,
}

impl Enumerator {
    fn new(width: usize, limits: EnumerationLimits) -> Self {
        let mut e = Enumerator {
            width,
            table: Vec::new(),
            fwd: Vec::new(),
            live: 0,
            deductions: Vec::new(),
            queue: Vec::new(),
            limits,
            stats: EnumerationStats::default(),
        };
        e.fwd.push(0);
        e.table.resize(width, NONE);
        e.live = 1;
        e.stats.total_defined = 1;
        e.stats.max_live = 1;
        e
    }

    #[inline]
    fn at(&self, c: u32, col: u32) -> u32 {
        self.table[c as usize * self.width + col as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, col: u32, d: u32) {
        self.table[c as usize * self.width + col as usize] = d;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.fwd[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.fwd[root as usize] != root {
            root = self.fwd[root as usize];
        }
        let mut x = c;
        while self.fwd[x as usize] != root {
            let next = self.fwd[x as usize];
            self.fwd[x as usize] = root;
            x = next;
        }
        root
    }

    fn push_deduction(&mut self, c: u32, col: u32) {
        if self.deductions.len() >= self.limits.max_deductions {
            self.deductions.clear();
            self.stats.deduction_overflows += 1;
        }
        self.deductions.push((c, col));
    }

    fn define(&mut self, c: u32, col: u32) -> Result<(), LimitHit> {
        if self.live >= self.limits.max_cosets {
            return Err(LimitHit);
        }
        let d = self.fwd.len() as u32;
        self.fwd.push(d);
        self.table.resize(self.table.len() + self.width, NONE);
        self.live += 1;
        self.stats.total_defined += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.push_deduction(c, col);
        Ok(())
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (x, y) = (self.rep(a), self.rep(b));
        if x != y {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            self.fwd[hi as usize] = lo;
            self.live -= 1;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.stats.coincidences += 1;
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for col in 0..self.width as u32 {
                let d = self.at(g, col);
                if d == NONE {
                    continue;
                }
                self.set(d, col ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let m_entry = self.at(mu, col);
                if m_entry != NONE {
                    self.merge(nu, m_entry);
                } else {
                    let n_entry = self.at(nu, col ^ 1);
                    if n_entry != NONE {
                        self.merge(mu, n_entry);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, col ^ 1, mu);
                        self.push_deduction(mu, col);
                    }
                }
            }
        }
    }

    /// Traces `word` (rotated by `start`) at `alpha`, closing a one-letter
    /// gap by deduction. With `fill`, longer gaps are closed by defining new
    /// cosets.
    fn scan(&mut self, alpha: u32, word: &[u32], start: usize, fill: bool) -> Result<(), LimitHit> {
        let len = word.len();
        if len == 0 {
            return Ok(());
        }
        let at = |k: usize| word[(start + k) % len];
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0isize;
        let mut j = len as isize - 1;
        loop {
            while i <= j {
                let n = self.at(f, at(i as usize));
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                let n = self.at(b, at(j as usize) ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let col = at(i as usize);
                self.set(f, col, b);
                self.set(b, col ^ 1, f);
                self.push_deduction(f, col);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, at(i as usize))?;
        }
    }

    fn process_deductions(&mut self, rels: &Relators) {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            for &(wi, s) in &rels.by_first[col as usize] {
                let _ = self.scan(c, &rels.words[wi as usize], s as usize, false);
                if !self.is_live(c) {
                    break;
                }
            }
            if !self.is_live(c) {
                continue;
            }
            let d = self.at(c, col);
            if d != NONE && self.is_live(d) {
                for &(wi, s) in &rels.by_first[(col ^ 1) as usize] {
                    let _ = self.scan(d, &rels.words[wi as usize], s as usize, false);
                    if !self.is_live(d) {
                        break;
                    }
                }
            }
        }
    }

    /// Traces every relator at every live coset without defining.
    fn lookahead(&mut self, rels: &Relators) {
        self.stats.lookaheads += 1;
        let mut c = 0u32;
        while (c as usize) < self.fwd.len() {
            if self.is_live(c) {
                for wi in 0..rels.base {
                    let _ = self.scan(c, &rels.words[wi], 0, false);
                    if !self.is_live(c) {
                        break;
                    }
                }
                self.process_deductions(rels);
            }
            c += 1;
        }
    }

    /// Runs `step` and, if it hits the coset limit, tries a lookahead and
    /// retries while that frees enough cosets.
    fn with_lookahead(
        &mut self,
        rels: &Relators,
        mut step: impl FnMut(&mut Self) -> Result<(), LimitHit>,
    ) -> Result<(), LimitHit> {
        loop {
            match step(self) {
                Ok(()) => return Ok(()),
                Err(LimitHit) => {
                    let before = self.live;
                    self.lookahead(rels);
                    let freed = before - self.live;
                    if freed < (self.limits.max_cosets / 100).max(1) {
                        return Err(LimitHit);
                    }
                }
            }
        }
    }

    fn run(&mut self, rels: &Relators) -> Result<(), LimitHit> {
        for si in 0..rels.subgroup.len() {
            self.with_lookahead(rels, |e| e.scan(0, &rels.subgroup[si], 0, true))?;
            self.process_deductions(rels);
        }
        let mut alpha = 0u32;
        while (alpha as usize) < self.fwd.len() {
            if self.is_live(alpha) {
                for wi in 0..rels.base {
                    self.with_lookahead(rels, |e| {
                        if e.is_live(alpha) {
                            e.scan(alpha, &rels.words[wi], 0, true)
                        } else {
                            Ok(())
                        }
                    })?;
                    self.process_deductions(rels);
                    if !self.is_live(alpha) {
                        break;
                    }
                }
                if self.is_live(alpha) {
                    for col in 0..self.width as u32 {
                        if self.is_live(alpha) && self.at(alpha, col) == NONE {
                            self.with_lookahead(rels, |e| {
                                if e.is_live(alpha) && e.at(alpha, col) == NONE {
                                    e.define(alpha, col)
                                } else {
                                    Ok(())
                                }
                            })?;
                            self.process_deductions(rels);
                        }
                    }
                }
            }
            alpha += 1;
            if self.fwd.len() > 4096 && self.fwd.len() > 3 * self.live {
                alpha = self.compact_in_place(alpha);
            }
        }
        Ok(())
    }

    /// Renumbers live cosets `0..live` preserving order; returns the new
    /// position of `alpha`.
    fn compact_in_place(&mut self, alpha: u32) -> u32 {
        let n = self.fwd.len();
        let mut new_index = vec![NONE; n];
        let mut next = 0u32;
        let mut new_alpha = None;
        for (c, slot) in new_index.iter_mut().enumerate() {
            if c as u32 >= alpha && new_alpha.is_none() {
                new_alpha = Some(next);
            }
            if self.fwd[c] == c as u32 {
                *slot = next;
                next += 1;
            }
        }
        let new_alpha = new_alpha.unwrap_or(next);
        let mut table = Vec::with_capacity(next as usize * self.width);
        for c in 0..n {
            if new_index[c] == NONE {
                continue;
            }
            for col in 0..self.width {
                let d = self.table[c * self.width + col];
                table.push(if d == NONE { NONE } else { new_index[d as usize] });
            }
        }
        self.table = table;
        self.fwd = (0..next).collect();
        let deductions = std::mem::take(&mut self.deductions);
        self.deductions = deductions
            .into_iter()
            .filter(|&(c, _)| new_index[c as usize] != NONE)
            .map(|(c, col)| (new_index[c as usize], col))
            .collect();
        new_alpha
    }

    fn compact(&mut self) -> Vec<u32> {
        self.compact_in_place(0);
        std::mem::take(&mut self.table)
    }
}
