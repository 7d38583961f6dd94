//! Coset tables read off a known finite action.
//!
//! When the subgroup is the stabilizer of a point under an action of the
//! group on a finite set (for instance the preimage of a subgroup under a
//! homomorphism to a finite group), its cosets are exactly the orbit of that
//! point, so the table comes from a breadth-first search instead of an
//! enumeration.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::coset::{CosetTable, SubgroupDescriptor};
use crate::word::letter_of_column;
use crate::{FpError, Letter, Presentation};

/// Builds the coset table of the stabilizer of `start`.
///
/// `act(state, letter)` is the right action of a generator or inverse
/// letter. It must define a genuine action of the presented group: every
/// relator has to fix every reachable state, otherwise
/// [`FpError::RelatorFails`] is returned. Cosets are numbered in BFS order
/// following `column_order` (pass `None` for the natural order).
pub fn coset_table_from_action<S, F>(
    p: &Presentation,
    start: S,
    mut act: F,
    description: impl Into<String>,
    column_order: Option<&[usize]>,
    max_states: usize,
) -> Result<CosetTable, FpError>
where
    S: Clone + Eq + Hash,
    F: FnMut(&S, Letter) -> S,
{
    let width = 2 * p.generator_count();
    let natural: Vec<usize> = (0..width).collect();
    let order = column_order.unwrap_or(&natural);
    assert_eq!(order.len(), width, "column order must list every column");

    let mut index: HashMap<S, u32> = HashMap::new();
    let mut states: Vec<S> = vec![start.clone()];
    index.insert(start, 0);
    let mut table: Vec<u32> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    // Rows are filled in BFS order, which is also the numbering order.
    while let Some(c) = queue.pop_front() {
        debug_assert_eq!(table.len(), c * width);
        let mut row = vec![0u32; width];
        let mut images: Vec<(usize, S)> = Vec::with_capacity(width);
        for &col in order {
            images.push((col, act(&states[c], letter_of_column(col))));
        }
        for (col, s) in images {
            let next = match index.get(&s) {
                Some(&i) => i,
                None => {
                    let i = states.len();
                    if i >= max_states {
                        return Err(FpError::ActionTooLarge { states: i + 1, limit: max_states });
                    }
                    index.insert(s.clone(), i as u32);
                    states.push(s);
                    queue.push_back(i);
                    i as u32
                }
            };
            row[col] = next;
        }
        table.extend_from_slice(&row);
    }
    CosetTable::from_entries(p.clone(), SubgroupDescriptor::Stabilizer(description.into()), table, order)
}
