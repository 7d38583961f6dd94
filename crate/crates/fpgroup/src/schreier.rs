//! Reidemeister-Schreier presentations of finite-index subgroups.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::word::{column_of, generator_of, letter};
use crate::{CosetTable, FpError, Presentation, Word};

const TREE: u32 = u32::MAX;

/// Column order used for the BFS that picks Schreier representatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TransversalOrder {
    #[default]
    Natural,
    /// A seeded shuffle of the columns.
    Shuffled(u64),
}

impl TransversalOrder {
    pub fn columns(self, width: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = (0..width).collect();
        if let TransversalOrder::Shuffled(seed) = self {
            cols.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        cols
    }
}

/// Rewrites words of the ambient group that lie in the subgroup into words
/// over the Schreier generators.
#[derive(Clone, Debug)]
pub struct Rewriter {
    width: usize,
    table: Vec<u32>,
    /// Schreier generator of the positive edge `(coset, generator)`, or
    /// `TREE` for spanning-tree edges.
    edge_generator: Vec<u32>,
    ambient_rank: usize,
    /// `(coset, ambient generator)` of each Schreier generator.
    origins: Vec<(usize, usize)>,
}

impl Rewriter {
    /// Rewrites `w` starting at `start`; returns the rewritten word and the
    /// coset where the trace ends.
    pub fn rewrite_from(&self, start: usize, w: &Word) -> (Word, usize) {
        let mut out = Vec::new();
        let mut c = start;
        let ngens = self.ambient_rank;
        for &l in w.letters() {
            let g = generator_of(l);
            if l > 0 {
                let s = self.edge_generator[c * ngens + g];
                if s != TREE {
                    out.push(letter(s as usize, false));
                }
                c = self.table[c * self.width + column_of(l)] as usize;
            } else {
                let d = self.table[c * self.width + column_of(l)] as usize;
                let s = self.edge_generator[d * ngens + g];
                if s != TREE {
                    out.push(letter(s as usize, true));
                }
                c = d;
            }
        }
        (Word::new(out), c)
    }

    /// Rewrites a subgroup element.
    pub fn rewrite(&self, w: &Word) -> Result<Word, FpError> {
        let (r, end) = self.rewrite_from(0, w);
        if end != 0 {
            return Err(FpError::NotInSubgroup { coset: end });
        }
        Ok(r)
    }

    pub fn generator_count(&self) -> usize {
        self.origins.len()
    }

    /// `(coset, ambient generator)` the Schreier generator comes from.
    pub fn origin(&self, s: usize) -> (usize, usize) {
        self.origins[s]
    }
}

#[derive(Clone, Debug)]
pub struct SchreierPresentation {
    pub presentation: Presentation,
    pub rewriter: Rewriter,
    /// Relators produced before deduplication.
    pub raw_relator_count: usize,
}

impl SchreierPresentation {
    /// Word in the ambient generators representing Schreier generator `s`:
    /// `t_c · x · t_{cx}^-1`.
    pub fn generator_word(&self, table: &CosetTable, s: usize) -> Word {
        let (c, g) = self.rewriter.origin(s);
        let d = table.get(c, 2 * g);
        table.transversal()[c].mul(&Word::generator(g)).mul(&table.transversal()[d].inverse())
    }
}

/// Subgroup presentation from a complete coset table.
pub fn reidemeister_schreier(table: &CosetTable) -> SchreierPresentation {
    reidemeister_schreier_capped(table, usize::MAX).expect("uncapped rewriting cannot exceed its cap")
}

/// As [`reidemeister_schreier`], failing once more than `max_relators`
/// distinct relators have been produced.
pub fn reidemeister_schreier_capped(table: &CosetTable, max_relators: usize) -> Result<SchreierPresentation, FpError> {
    let ambient = table.presentation();
    let ngens = ambient.generator_count();
    let cosets = table.len();
    let width = table.width();

    let mut edge_generator = vec![0u32; cosets * ngens];
    for d in 1..cosets {
        let (c, col) = table.tree_edge(d).expect("non-base coset has a tree edge");
        let g = col / 2;
        if col % 2 == 0 {
            edge_generator[c * ngens + g] = TREE;
        } else {
            // d = c·g^-1, so the positive edge is d --g--> c.
            edge_generator[d * ngens + g] = TREE;
        }
    }
    let mut origins = Vec::new();
    let mut names = Vec::new();
    for c in 0..cosets {
        for g in 0..ngens {
            if edge_generator[c * ngens + g] != TREE {
                edge_generator[c * ngens + g] = origins.len() as u32;
                origins.push((c, g));
                names.push(format!("{}_{}", ambient.generator_names()[g], c));
            }
        }
    }
    let mut flat = Vec::with_capacity(cosets * width);
    for c in 0..cosets {
        for col in 0..width {
            flat.push(table.get(c, col) as u32);
        }
    }
    let rewriter = Rewriter { width, table: flat, edge_generator, ambient_rank: ngens, origins };

    let mut seen = HashSet::new();
    let mut relators = Vec::new();
    let mut raw = 0usize;
    for c in 0..cosets {
        for r in ambient.relators() {
            let (w, end) = rewriter.rewrite_from(c, r);
            debug_assert_eq!(end, c, "relator must close at every coset");
            raw += 1;
            let canon = w.canonical_relator();
            if !canon.is_empty() && seen.insert(canon.clone()) {
                if relators.len() >= max_relators {
                    return Err(FpError::TooManyRelators { limit: max_relators });
                }
                relators.push(canon);
            }
        }
    }
    let presentation = Presentation::new(names, relators).expect("Schreier generators cover every symbol");
    Ok(SchreierPresentation { presentation, rewriter, raw_relator_count: raw })
}
