use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::{Monomial, Var};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct OrderBlock {
    pub vars: Vec<Var>,
    pub kind: OrderKind,
}

/// Monomial order over named variables.
///
/// Listed variables take precedence in the given sequence (first is
/// greatest). Variables that are not listed follow in descending canonical
/// order; for block orders they form a trailing degrevlex block.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum TermOrder {
    Lex(Vec<Var>),
    DegRevLex(Vec<Var>),
    Block(Vec<OrderBlock>),
}

impl TermOrder {
    pub fn lex() -> TermOrder {
        TermOrder::Lex(Vec::new())
    }

    pub fn degrevlex() -> TermOrder {
        TermOrder::DegRevLex(Vec::new())
    }

    /// Block order with `elim` (degrevlex) above everything else (degrevlex).
    pub fn elimination<I: IntoIterator<Item = Var>>(elim: I) -> TermOrder {
        let set: BTreeSet<Var> = elim.into_iter().collect();
        TermOrder::Block(vec![OrderBlock { vars: set.into_iter().rev().collect(), kind: OrderKind::DegRevLex }])
    }

    /// Arranges `vars` by precedence and splits them into blocks.
    pub fn layout<'a, I: IntoIterator<Item = &'a Var>>(&self, vars: I) -> Layout {
        let present: BTreeSet<Var> = vars.into_iter().cloned().collect();
        let mut placed: BTreeSet<Var> = BTreeSet::new();
        let mut order: Vec<Var> = Vec::with_capacity(present.len());
        let mut blocks = Vec::new();
        let take = |listed: &[Var], order: &mut Vec<Var>, placed: &mut BTreeSet<Var>| {
            for v in listed {
                if present.contains(v) && placed.insert(v.clone()) {
                    order.push(v.clone());
                }
            }
        };
        let rest_kind = match self {
            TermOrder::Lex(prec) => {
                take(prec, &mut order, &mut placed);
                OrderKind::Lex
            }
            TermOrder::DegRevLex(prec) => {
                take(prec, &mut order, &mut placed);
                OrderKind::DegRevLex
            }
            TermOrder::Block(bs) => {
                for b in bs {
                    let start = order.len();
                    take(&b.vars, &mut order, &mut placed);
                    if order.len() > start {
                        blocks.push((start, order.len(), b.kind));
                    }
                }
                OrderKind::DegRevLex
            }
        };
        let start = order.len();
        for v in present.iter().rev() {
            if !placed.contains(v) {
                order.push(v.clone());
            }
        }
        match self {
            TermOrder::Block(_) => {
                if order.len() > start {
                    blocks.push((start, order.len(), rest_kind));
                }
            }
            _ => blocks.push((0, order.len(), rest_kind)),
        }
        Layout { vars: order, blocks }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let layout = self.layout(a.vars().chain(b.vars()));
        layout.cmp_exps(&layout.exponents(a), &layout.exponents(b))
    }
}

/// Compare two monomials under `order`.
pub fn mono_cmp(order: &TermOrder, a: &Monomial, b: &Monomial) -> Ordering {
    order.cmp(a, b)
}

/// Concrete variable sequence (index 0 is the greatest variable) and block
/// ranges derived from a [`TermOrder`].
#[derive(Clone, Debug)]
pub struct Layout {
    pub vars: Vec<Var>,
    pub blocks: Vec<(usize, usize, OrderKind)>,
}

impl Layout {
    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn exponents(&self, m: &Monomial) -> Vec<u32> {
        let mut e = vec![0; self.vars.len()];
        for (v, k) in m.pairs() {
            let i = self.index_of(v).expect("variable missing from layout");
            e[i] = *k;
        }
        e
    }

    pub fn cmp_exps(&self, a: &[u32], b: &[u32]) -> Ordering {
        for &(s, t, kind) in &self.blocks {
            let ord = match kind {
                OrderKind::Lex => a[s..t].cmp(&b[s..t]),
                OrderKind::DegRevLex => {
                    let da: u32 = a[s..t].iter().sum();
                    let db: u32 = b[s..t].iter().sum();
                    da.cmp(&db).then_with(|| {
                        for i in (s..t).rev() {
                            if a[i] != b[i] {
                                return b[i].cmp(&a[i]);
                            }
                        }
                        Ordering::Equal
                    })
                }
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}
