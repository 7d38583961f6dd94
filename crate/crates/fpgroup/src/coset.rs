//! Complete coset tables.

use std::collections::VecDeque;

use crate::word::{column_of, letter_of_column, Word};
use crate::{FpError, Presentation};

/// What the table's base coset is the coset of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupDescriptor {
    /// The subgroup generated by these words.
    Generated(Vec<Word>),
    /// Stabilizer of a base state of a finite action; free-text description.
    Stabilizer(String),
}

/// A complete coset table: `cosets × 2·generators` with every entry defined,
/// every column a permutation and every relator closed at every coset.
///
/// Column `2g` is generator `g`, column `2g + 1` its inverse.
#[derive(Clone, Debug)]
pub struct CosetTable {
    presentation: Presentation,
    subgroup: SubgroupDescriptor,
    width: usize,
    table: Vec<u32>,
    transversal: Vec<Word>,
    /// `(parent coset, column)` of the spanning-tree edge reaching each
    /// coset; `None` for coset 0.
    tree: Vec<Option<(u32, u32)>>,
}

impl CosetTable {
    /// Builds the table from raw entries, rejecting incomplete or
    /// inconsistent data, and computes a BFS Schreier transversal using the
    /// given column order.
    pub fn from_entries(
        presentation: Presentation,
        subgroup: SubgroupDescriptor,
        table: Vec<u32>,
        column_order: &[usize],
    ) -> Result<Self, FpError> {
        let width = 2 * presentation.generator_count();
        let cosets = table.len().checked_div(width).unwrap_or(1);
        let mut t = CosetTable {
            presentation,
            subgroup,
            width,
            table,
            transversal: Vec::new(),
            tree: Vec::new(),
        };
        for c in 0..cosets {
            for col in 0..width {
                let d = t.table[c * width + col];
                if d as usize >= cosets {
                    return Err(FpError::IncompleteTable { coset: c, column: col });
                }
                if t.table[d as usize * width + (col ^ 1)] as usize != c {
                    return Err(FpError::IncompleteTable { coset: d as usize, column: col ^ 1 });
                }
            }
        }
        t.verify_relators()?;
        t.build_transversal(column_order, cosets);
        Ok(t)
    }

    fn build_transversal(&mut self, column_order: &[usize], cosets: usize) {
        let mut transversal = vec![None; cosets];
        let mut tree = vec![None; cosets];
        transversal[0] = Some(Word::empty());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for &col in column_order {
                let d = self.table[c * self.width + col] as usize;
                if transversal[d].is_none() {
                    let w = transversal[c].as_ref().unwrap().mul(&Word::new([letter_of_column(col)]));
                    transversal[d] = Some(w);
                    tree[d] = Some((c as u32, col as u32));
                    queue.push_back(d);
                }
            }
        }
        self.transversal = transversal.into_iter().map(|w| w.expect("table is not transitive")).collect();
        self.tree = tree;
    }

    pub fn verify_relators(&self) -> Result<(), FpError> {
        for (ri, r) in self.presentation.relators().iter().enumerate() {
            for c in 0..self.len() {
                if self.trace(c, r) != c {
                    return Err(FpError::RelatorFails { relator: ri, coset: c });
                }
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn subgroup(&self) -> &SubgroupDescriptor {
        &self.subgroup
    }

    /// Number of cosets (the subgroup index).
    pub fn len(&self) -> usize {
        self.table.len().checked_div(self.width).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, coset: usize, col: usize) -> usize {
        self.table[coset * self.width + col] as usize
    }

    pub fn trace(&self, start: usize, w: &Word) -> usize {
        w.letters().iter().fold(start, |c, &l| self.get(c, column_of(l)))
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub(crate) fn tree_edge(&self, coset: usize) -> Option<(usize, usize)> {
        self.tree[coset].map(|(c, col)| (c as usize, col as usize))
    }

    /// Image of every coset under generator `g`.
    pub fn permutation(&self, g: usize) -> Vec<usize> {
        (0..self.len()).map(|c| self.get(c, 2 * g)).collect()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.trace(0, w) == 0
    }
}
