//! Group presentations and their text format.
//!
//! ```text
//! gens: a b c
//! rel: a^4
//! rel: a b -c^2
//! ```
//!
//! Syllables are whitespace separated; `^k` is a positive exponent and a
//! leading `-` inverts the syllable. Printing merges runs of one letter into
//! a single syllable, so `parse(print(p)) == p` and `print(parse(s)) == s`
//! for any `s` produced by the printer.

use std::collections::HashSet;
use std::fmt;

use crate::word::{generator_of, Word};
use crate::FpError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
    /// Free-form type tag, e.g. the orbifold signature `[0; 4,4,4]`.
    pub label: Option<String>,
}

impl Presentation {
    /// Relators are freely reduced on entry; empty ones are dropped.
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self, FpError> {
        let rank = names.len();
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            let r = Word::new(r.into_letters());
            if let Some(&letter) = r.letters().iter().find(|&&l| generator_of(l) >= rank) {
                return Err(FpError::AlphabetMismatch { letter, rank });
            }
            if !r.is_empty() {
                rels.push(r);
            }
        }
        Ok(Presentation { names, relators: rels, label: None })
    }

    /// Generators named `x1 .. xn`.
    pub fn with_default_names(rank: usize, relators: Vec<Word>) -> Result<Self, FpError> {
        Self::new(default_names(rank), relators)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Adds relators (reduced, empties dropped).
    pub fn add_relators(&mut self, extra: impl IntoIterator<Item = Word>) -> Result<(), FpError> {
        let rank = self.names.len();
        for r in extra {
            let r = Word::new(r.into_letters());
            if let Some(&letter) = r.letters().iter().find(|&&l| generator_of(l) >= rank) {
                return Err(FpError::AlphabetMismatch { letter, rank });
            }
            if !r.is_empty() {
                self.relators.push(r);
            }
        }
        Ok(())
    }

    /// Removes relators whose canonical cyclic form repeats an earlier one,
    /// replacing each survivor by its canonical form.
    pub fn deduplicated(&self) -> Presentation {
        let mut seen = HashSet::new();
        let mut rels = Vec::new();
        for r in &self.relators {
            let c = r.canonical_relator();
            if !c.is_empty() && seen.insert(c.clone()) {
                rels.push(c);
            }
        }
        Presentation { names: self.names.clone(), relators: rels, label: self.label.clone() }
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(w, &self.names)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("gens:");
        for n in &self.names {
            s.push(' ');
            s.push_str(n);
        }
        s.push('\n');
        for r in &self.relators {
            s.push_str("rel: ");
            s.push_str(&format_word(r, &self.names));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, FpError> {
        let mut names: Option<Vec<String>> = None;
        let mut relators = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| FpError::Parse { line: line_no, message };
            if let Some(rest) = line.strip_prefix("gens:") {
                if names.is_some() {
                    return Err(err("duplicate gens line".into()));
                }
                let list: Vec<String> = rest.split_whitespace().map(str::to_owned).collect();
                for n in &list {
                    if !valid_name(n) {
                        return Err(err(format!("invalid generator name `{n}`")));
                    }
                }
                let unique: HashSet<&String> = list.iter().collect();
                if unique.len() != list.len() {
                    return Err(err("repeated generator name".into()));
                }
                names = Some(list);
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let names = names.as_ref().ok_or_else(|| err("rel before gens".into()))?;
                let w = parse_word(rest, names).map_err(err)?;
                if !w.is_empty() {
                    relators.push(w);
                }
            } else {
                return Err(err(format!("unrecognised line `{line}`")));
            }
        }
        let names = names.ok_or(FpError::Parse { line: 0, message: "missing gens line".into() })?;
        Presentation::new(names, relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn default_names(rank: usize) -> Vec<String> {
    (0..rank).map(|g| format!("x{}", g + 1)).collect()
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

pub(crate) fn format_word(w: &Word, names: &[String]) -> String {
    let letters = w.letters();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut j = i + 1;
        while j < letters.len() && letters[j] == l {
            j += 1;
        }
        let run = j - i;
        let mut s = String::new();
        if l < 0 {
            s.push('-');
        }
        s.push_str(&names[generator_of(l)]);
        if run > 1 {
            s.push('^');
            s.push_str(&run.to_string());
        }
        parts.push(s);
        i = j;
    }
    parts.join(" ")
}

fn parse_word(text: &str, names: &[String]) -> Result<Word, String> {
    let mut letters = Vec::new();
    for syl in text.split_whitespace() {
        let (inverse, body) = match syl.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, syl),
        };
        let (name, exp) = match body.split_once('^') {
            Some((n, e)) => {
                let e: usize = e.parse().map_err(|_| format!("bad exponent in `{syl}`"))?;
                if e == 0 {
                    return Err(format!("zero exponent in `{syl}`"));
                }
                (n, e)
            }
            None => (body, 1),
        };
        let g = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| format!("unknown generator `{name}`"))?;
        let l = crate::word::letter(g, inverse);
        letters.extend(std::iter::repeat_n(l, exp));
    }
    Ok(Word::new(letters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_the_documented_format() {
        let p = Presentation::parse("gens: a b c\nrel: a^4\nrel: a b c\n").unwrap();
        assert_eq!(p.generator_count(), 3);
        assert_eq!(p.relators()[0].letters(), &[1, 1, 1, 1]);
        assert_eq!(p.relators()[1].letters(), &[1, 2, 3]);
        assert_eq!(p.to_text(), "gens: a b c\nrel: a^4\nrel: a b c\n");
    }

    #[test]
    fn inverse_syllables() {
        let p = Presentation::parse("gens: a b\nrel: -a^2 b -a\n").unwrap();
        assert_eq!(p.relators()[0].letters(), &[-1, -1, 2, -1]);
        assert_eq!(p.to_text(), "gens: a b\nrel: -a^2 b -a\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Presentation::parse("gens: a\nrel: a b\n") {
            Err(FpError::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(Presentation::parse("rel: a\n").is_err());
        assert!(Presentation::parse("gens: a a\n").is_err());
        assert!(Presentation::parse("gens: a\nrel: a^0\n").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(rels in prop::collection::vec(
            prop::collection::vec(prop_oneof![1..4i32, -3..0i32], 1..10), 0..6)) {
            let words: Vec<Word> = rels.into_iter().map(Word::new).collect();
            let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
            let p = Presentation::new(names, words).unwrap();
            let text = p.to_text();
            let q = Presentation::parse(&text).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(q.to_text(), text);
        }
    }
}
