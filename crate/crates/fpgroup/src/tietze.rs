//! Tietze simplification.
//!
//! Relators are cyclically reduced and deduplicated by canonical form; then
//! generators occurring exactly once in some relator are solved for and
//! substituted everywhere, shortest relators first. Eliminations through
//! relators of length at most two never lengthen the presentation and are
//! always done; longer ones are bounded by a growth budget.

use std::collections::HashSet;

use crate::word::{generator_of, letter, Letter};
use crate::{Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplifyLimits {
    /// Longest relator used to eliminate a generator.
    pub max_elimination_length: usize,
    /// The total relator length may grow to this multiple of the starting
    /// total (plus a small constant slack).
    pub max_growth_factor: f64,
}

impl Default for SimplifyLimits {
    fn default() -> Self {
        SimplifyLimits { max_elimination_length: 24, max_growth_factor: 1.5 }
    }
}

/// Result of a simplification: the new presentation and the record of
/// eliminations, which expresses every original generator in the new ones.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub presentation: Presentation,
    /// New index of each surviving original generator.
    pub survivors: Vec<Option<usize>>,
    /// `(original generator, its value in original generators alive at the
    /// time)`, in elimination order.
    pub eliminations: Vec<(usize, Word)>,
}

impl Simplified {
    /// Images of all original generators as words in the new generators.
    /// Returns `None` if an image would exceed `max_len` letters.
    pub fn images(&self, max_len: usize) -> Option<Vec<Word>> {
        let n = self.survivors.len();
        let mut img: Vec<Option<Word>> = self
            .survivors
            .iter()
            .map(|s| s.map(Word::generator))
            .collect();
        for (x, w) in self.eliminations.iter().rev() {
            let mut out = Vec::new();
            for &l in w.letters() {
                let g = img[generator_of(l)].as_ref().expect("eliminated before its dependants");
                if l > 0 {
                    out.extend_from_slice(g.letters());
                } else {
                    out.extend(g.letters().iter().rev().map(|&m| -m));
                }
                if out.len() > max_len {
                    return None;
                }
            }
            img[*x] = Some(Word::new(out));
        }
        debug_assert_eq!(img.len(), n);
        Some(img.into_iter().map(|w| w.expect("every generator has an image")).collect())
    }
}

pub fn simplify(p: &Presentation) -> Presentation {
    simplify_with_limits(p, SimplifyLimits::default()).presentation
}

pub fn simplify_with_limits(p: &Presentation, limits: SimplifyLimits) -> Simplified {
    let mut tz = Tietze::new(p);
    let budget = (tz.total_len() as f64 * limits.max_growth_factor) as usize + 1000;
    loop {
        let mut changed = tz.eliminate_pass(2, usize::MAX);
        changed |= tz.eliminate_pass(limits.max_elimination_length, budget);
        tz.deduplicate();
        if !changed {
            break;
        }
    }
    tz.finish(p)
}

struct Tietze {
    rels: Vec<Vec<Letter>>,
    dead: Vec<bool>,
    occ: Vec<Vec<u32>>,
    alive: Vec<bool>,
    eliminations: Vec<(usize, Word)>,
}

fn cyclic_reduce(mut w: Vec<Letter>) -> Vec<Letter> {
    let mut i = 0;
    let mut j = w.len();
    while j - i >= 2 && w[i] == -w[j - 1] {
        i += 1;
        j -= 1;
    }
    w.truncate(j);
    w.drain(..i);
    w
}

impl Tietze {
    fn new(p: &Presentation) -> Self {
        let n = p.generator_count();
        let mut tz = Tietze {
            rels: Vec::new(),
            dead: Vec::new(),
            occ: vec![Vec::new(); n],
            alive: vec![true; n],
            eliminations: Vec::new(),
        };
        let mut seen = HashSet::new();
        for r in p.relators() {
            let c = r.canonical_relator();
            if !c.is_empty() && seen.insert(c.clone()) {
                tz.push(c.into_letters());
            }
        }
        tz
    }

    fn push(&mut self, r: Vec<Letter>) {
        let id = self.rels.len() as u32;
        let mut gens: Vec<usize> = r.iter().map(|&l| generator_of(l)).collect();
        gens.sort_unstable();
        gens.dedup();
        for g in gens {
            self.occ[g].push(id);
        }
        self.rels.push(r);
        self.dead.push(false);
    }

    fn total_len(&self) -> usize {
        self.rels.iter().zip(&self.dead).filter(|(_, &d)| !d).map(|(r, _)| r.len()).sum()
    }

    /// Live relators containing generator `g`; prunes the occurrence list.
    fn users(&mut self, g: usize) -> Vec<u32> {
        let rels = &self.rels;
        let dead = &self.dead;
        let list = &mut self.occ[g];
        list.sort_unstable();
        list.dedup();
        list.retain(|&id| !dead[id as usize] && rels[id as usize].iter().any(|&l| generator_of(l) == g));
        list.clone()
    }

    fn eliminate_pass(&mut self, max_len: usize, budget: usize) -> bool {
        let mut order: Vec<u32> = (0..self.rels.len() as u32)
            .filter(|&i| !self.dead[i as usize] && self.rels[i as usize].len() <= max_len)
            .collect();
        order.sort_by_key(|&i| (self.rels[i as usize].len(), i));
        let mut total = self.total_len();
        let mut changed = false;
        for rid in order {
            let rid = rid as usize;
            if self.dead[rid] {
                continue;
            }
            let len = self.rels[rid].len();
            if len > max_len {
                continue;
            }
            let r = &self.rels[rid];
            let mut counts: Vec<(usize, usize)> = Vec::new();
            for &l in r {
                let g = generator_of(l);
                match counts.iter_mut().find(|(h, _)| *h == g) {
                    Some(e) => e.1 += 1,
                    None => counts.push((g, 1)),
                }
            }
            let Some(x) = counts
                .iter()
                .filter(|&&(_, k)| k == 1)
                .map(|&(g, _)| g)
                .min_by_key(|&g| (self.occ[g].len(), g))
            else {
                continue;
            };
            let users = self.users(x);
            if len > 2 {
                let growth = (users.len().saturating_sub(1)) * (len - 2);
                if total + growth > budget {
                    continue;
                }
            }
            total = self.eliminate(x, rid, &users, total);
            changed = true;
        }
        changed
    }

    /// Solves relator `rid` for `x` and substitutes. Returns the new total length.
    fn eliminate(&mut self, x: usize, rid: usize, users: &[u32], mut total: usize) -> usize {
        let r = std::mem::take(&mut self.rels[rid]);
        self.dead[rid] = true;
        total -= r.len();
        let pos = r.iter().position(|&l| generator_of(l) == x).expect("x occurs in r");
        let rotated: Vec<Letter> = r[pos..].iter().chain(&r[..pos]).copied().collect();
        // rotated = x^e · rest
        let rest = &rotated[1..];
        let value: Vec<Letter> = if rotated[0] > 0 {
            rest.iter().rev().map(|&l| -l).collect()
        } else {
            rest.to_vec()
        };
        let value_inv: Vec<Letter> = value.iter().rev().map(|&l| -l).collect();
        let xl = letter(x, false);
        for &s in users {
            let s = s as usize;
            if s == rid || self.dead[s] {
                continue;
            }
            let old = std::mem::take(&mut self.rels[s]);
            total -= old.len();
            let mut out: Vec<Letter> = Vec::with_capacity(old.len() + value.len());
            for l in old {
                let piece: &[Letter] = if l == xl {
                    &value
                } else if l == -xl {
                    &value_inv
                } else {
                    std::slice::from_ref(&l)
                };
                for &m in piece {
                    if out.last() == Some(&-m) {
                        out.pop();
                    } else {
                        out.push(m);
                    }
                }
            }
            let out = cyclic_reduce(out);
            total += out.len();
            if out.is_empty() {
                self.dead[s] = true;
            } else {
                for &l in &value {
                    self.occ[generator_of(l)].push(s as u32);
                }
            }
            self.rels[s] = out;
        }
        self.occ[x].clear();
        self.alive[x] = false;
        self.eliminations.push((x, Word::new(value)));
        total
    }

    fn deduplicate(&mut self) {
        let mut seen = HashSet::new();
        for i in 0..self.rels.len() {
            if self.dead[i] {
                continue;
            }
            let c = Word::new(self.rels[i].iter().copied()).canonical_relator();
            if c.is_empty() || !seen.insert(c.clone()) {
                self.dead[i] = true;
                self.rels[i].clear();
            } else {
                self.rels[i] = c.into_letters();
            }
        }
    }

    fn finish(self, p: &Presentation) -> Simplified {
        let mut survivors = vec![None; self.alive.len()];
        let mut names = Vec::new();
        for (g, &a) in self.alive.iter().enumerate() {
            if a {
                survivors[g] = Some(names.len());
                names.push(p.generator_names()[g].clone());
            }
        }
        let mut rels: Vec<Word> = self
            .rels
            .iter()
            .zip(&self.dead)
            .filter(|(_, &d)| !d)
            .map(|(r, _)| {
                Word::new(r.iter().map(|&l| {
                    let g = survivors[generator_of(l)].expect("relator uses an eliminated generator");
                    letter(g, l < 0)
                }))
                .canonical_relator()
            })
            .collect();
        rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        rels.dedup();
        let mut presentation = Presentation::new(names, rels).expect("renumbered relators are in range");
        presentation.label = p.label.clone();
        Simplified { presentation, survivors, eliminations: self.eliminations }
    }
}
