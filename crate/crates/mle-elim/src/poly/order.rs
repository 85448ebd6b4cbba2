//! Monomial orders: lex, grevlex, and block elimination orders.

use super::{Monomial, VarSet};
use std::cmp::Ordering;

/// A monomial order described by variable names, compiled against a
/// concrete universe before use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Lexicographic; ranking lists variables most significant first.
    Lex { ranking: Vec<String> },
    /// Graded reverse lexicographic; ranking most significant first.
    Grevlex { ranking: Vec<String> },
    /// Block elimination order: the `high` block dominates, grevlex within
    /// each block. Monomials free of `high` variables are exactly those in
    /// the subring on the `low` block.
    Block { high: Vec<String>, low: Vec<String> },
}

impl MonomialOrder {
    pub fn lex<S: Into<String>>(ranking: Vec<S>) -> Self {
        MonomialOrder::Lex {
            ranking: ranking.into_iter().map(Into::into).collect(),
        }
    }

    pub fn grevlex<S: Into<String>>(ranking: Vec<S>) -> Self {
        MonomialOrder::Grevlex {
            ranking: ranking.into_iter().map(Into::into).collect(),
        }
    }

    pub fn elimination<S: Into<String>, T: Into<String>>(high: Vec<S>, low: Vec<T>) -> Self {
        MonomialOrder::Block {
            high: high.into_iter().map(Into::into).collect(),
            low: low.into_iter().map(Into::into).collect(),
        }
    }

    /// Resolves names to positions in `vars`. Every named variable must be
    /// present, and every universe variable must be ranked.
    pub fn compile(&self, vars: &VarSet) -> CompiledOrder {
        let resolve = |names: &[String]| -> Vec<usize> {
            names
                .iter()
                .map(|n| {
                    vars.index_of(n)
                        .unwrap_or_else(|| panic!("order variable `{n}` not in universe"))
                })
                .collect()
        };
        let (blocks, kind) = match self {
            MonomialOrder::Lex { ranking } => (vec![resolve(ranking)], CmpKind::Lex),
            MonomialOrder::Grevlex { ranking } => (vec![resolve(ranking)], CmpKind::Grevlex),
            MonomialOrder::Block { high, low } => {
                (vec![resolve(high), resolve(low)], CmpKind::Grevlex)
            }
        };
        let ranked: usize = blocks.iter().map(Vec::len).sum();
        assert_eq!(ranked, vars.len(), "order must rank every universe variable");
        CompiledOrder { blocks, kind }
    }
}

#[derive(Clone, Copy, Debug)]
enum CmpKind {
    Lex,
    Grevlex,
}

/// A monomial order bound to universe positions.
#[derive(Clone, Debug)]
pub struct CompiledOrder {
    blocks: Vec<Vec<usize>>,
    kind: CmpKind,
}

impl CompiledOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for block in &self.blocks {
            let o = match self.kind {
                CmpKind::Lex => cmp_lex(a, b, block),
                CmpKind::Grevlex => cmp_grevlex(a, b, block),
            };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    /// Sort key: comparing keys lexicographically agrees with `cmp`.
    pub fn key(&self, m: &Monomial) -> Vec<u32> {
        let mut key = Vec::new();
        for block in &self.blocks {
            match self.kind {
                CmpKind::Lex => key.extend(block.iter().map(|&i| m.exponent(i))),
                CmpKind::Grevlex => {
                    key.push(block.iter().map(|&i| m.exponent(i)).sum());
                    key.extend(block.iter().rev().map(|&i| u32::MAX - m.exponent(i)));
                }
            }
        }
        key
    }
}

fn cmp_lex(a: &Monomial, b: &Monomial, ranking: &[usize]) -> Ordering {
    for &i in ranking {
        match a.exponent(i).cmp(&b.exponent(i)) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn cmp_grevlex(a: &Monomial, b: &Monomial, ranking: &[usize]) -> Ordering {
    let da: u32 = ranking.iter().map(|&i| a.exponent(i)).sum();
    let db: u32 = ranking.iter().map(|&i| b.exponent(i)).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    // Tie: scan from the least significant variable; the monomial with the
    // smaller exponent there is the larger one.
    for &i in ranking.iter().rev() {
        match a.exponent(i).cmp(&b.exponent(i)) {
            Ordering::Equal => {}
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}
