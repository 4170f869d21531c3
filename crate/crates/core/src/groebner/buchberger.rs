use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Layout, Monomial, Poly, Rational, TermOrder, Var};

use super::{GbConfig, GroebnerError};

#[derive(Clone, Debug)]
struct Term {
    m: Vec<u32>,
    c: BigInt,
}

/// Dense-exponent polynomial with integer coefficients, terms sorted descending.
type DPoly = Vec<Term>;

/// Fixed variable layout plus the arithmetic Buchberger needs on top of it.
pub(crate) struct Ring {
    layout: Layout,
}

impl Ring {
    pub(crate) fn new<'a, I: IntoIterator<Item = &'a Var>>(order: &TermOrder, vars: I) -> Ring {
        Ring { layout: order.layout(vars) }
    }

    fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.layout.cmp_exps(a, b)
    }

    /// Integer primitive representative of `p` plus the factor `f` with `dense = f * p`.
    fn to_dense(&self, p: &Poly) -> (DPoly, Rational) {
        let mut den = BigInt::one();
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
        }
        let mut out: DPoly =
            p.terms().map(|(m, c)| Term { m: self.layout.exponents(m), c: c.numer() * (&den / c.denom()) }).collect();
        out.sort_by(|a, b| self.cmp(&b.m, &a.m));
        let g = content(&out);
        let mut factor = Rational::from_integer(den);
        if !g.is_one() && !g.is_zero() {
            for t in out.iter_mut() {
                t.c = &t.c / &g;
            }
            factor /= Rational::from_integer(g);
        }
        (out, factor)
    }

    fn to_poly(&self, p: &DPoly, scale: &Rational) -> Poly {
        Poly::from_terms(p.iter().map(|t| {
            let m = Monomial::from_pairs(t.m.iter().enumerate().map(|(i, e)| (self.layout.vars[i].clone(), *e)));
            (m, Rational::from_integer(t.c.clone()) * scale)
        }))
    }

    fn to_monic_poly(&self, p: &DPoly) -> Poly {
        let lc = Rational::from_integer(p[0].c.clone());
        self.to_poly(p, &lc.recip())
    }

    fn sub_mul(&self, p: &[Term], pmul: &BigInt, g: &[Term], gmul: &BigInt, shift: &[u32]) -> DPoly {
        let mut out = Vec::with_capacity(p.len() + g.len());
        let (mut i, mut j) = (0, 0);
        let shifted = |t: &Term| -> Vec<u32> { t.m.iter().zip(shift).map(|(a, b)| a + b).collect() };
        let mut gm = g.first().map(shifted);
        while i < p.len() || j < g.len() {
            let ord = match (p.get(i), &gm) {
                (Some(a), Some(b)) => self.cmp(&a.m, b),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Greater => {
                    out.push(Term { m: p[i].m.clone(), c: &p[i].c * pmul });
                    i += 1;
                }
                Ordering::Less => {
                    out.push(Term { m: gm.take().unwrap(), c: -(&g[j].c * gmul) });
                    j += 1;
                    gm = g.get(j).map(shifted);
                }
                Ordering::Equal => {
                    let c = &p[i].c * pmul - &g[j].c * gmul;
                    if !c.is_zero() {
                        out.push(Term { m: gm.take().unwrap(), c });
                    }
                    i += 1;
                    j += 1;
                    gm = g.get(j).map(shifted);
                }
            }
        }
        out
    }

    /// Full reduction of `p` by the polynomials `basis[k]` for `k` in `reducers`.
    /// Returns the primitive remainder `r` and the rational `s` with
    /// `p = (sum of multiples of reducers + r) / s`.
    fn reduce(&self, p: DPoly, basis: &[DPoly], reducers: &[usize]) -> (DPoly, Rational) {
        let mut p = p;
        let mut pos = 0;
        let mut rem: DPoly = Vec::new();
        let mut scale = Rational::one();
        let mut steps = 0usize;
        while pos < p.len() {
            let head = &p[pos];
            let found = reducers.iter().map(|&k| &basis[k]).find(|g| divides(&g[0].m, &head.m));
            match found {
                None => {
                    rem.push(p[pos].clone());
                    pos += 1;
                }
                Some(g) => {
                    let a = &g[0].c;
                    let c = &head.c;
                    let h = a.gcd(c);
                    let mut pmul = a / &h;
                    let mut gmul = c / &h;
                    if pmul.is_negative() {
                        pmul = -pmul;
                        gmul = -gmul;
                    }
                    let shift: Vec<u32> = head.m.iter().zip(&g[0].m).map(|(x, y)| x - y).collect();
                    if !pmul.is_one() {
                        for t in rem.iter_mut() {
                            t.c *= &pmul;
                        }
                        scale *= Rational::from_integer(pmul.clone());
                    }
                    p = self.sub_mul(&p[pos..], &pmul, g, &gmul, &shift);
                    pos = 0;
                    steps += 1;
                    if steps.is_multiple_of(8) {
                        let g = content(&rem).gcd(&content(&p));
                        if !g.is_one() && !g.is_zero() {
                            for t in rem.iter_mut().chain(p.iter_mut()) {
                                t.c = &t.c / &g;
                            }
                            scale /= Rational::from_integer(g);
                        }
                    }
                }
            }
        }
        let g = content(&rem);
        if !g.is_zero() {
            let g = if rem[0].c.is_negative() { -g } else { g };
            if !g.is_one() {
                for t in rem.iter_mut() {
                    t.c = &t.c / &g;
                }
                scale /= Rational::from_integer(g);
            }
        }
        (rem, scale)
    }

    fn spoly(&self, f: &DPoly, g: &DPoly) -> DPoly {
        let l = lcm(&f[0].m, &g[0].m);
        let sf: Vec<u32> = l.iter().zip(&f[0].m).map(|(a, b)| a - b).collect();
        let sg: Vec<u32> = l.iter().zip(&g[0].m).map(|(a, b)| a - b).collect();
        let h = f[0].c.gcd(&g[0].c);
        let fmul = &g[0].c / &h;
        let gmul = &f[0].c / &h;
        let fs: DPoly = f[1..]
            .iter()
            .map(|t| Term { m: t.m.iter().zip(&sf).map(|(a, b)| a + b).collect(), c: t.c.clone() })
            .collect();
        self.sub_mul(&fs, &fmul, &g[1..], &gmul, &sg)
    }
}

fn content(p: &[Term]) -> BigInt {
    let mut g = BigInt::zero();
    for t in p {
        g = g.gcd(&t.c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Vec<u32>,
}

/// Statistics of one Buchberger run.
#[derive(Clone, Debug, Default)]
pub struct GbStats {
    pub pairs_processed: usize,
    pub zero_reductions: usize,
    pub basis_size: usize,
}

struct Buchberger<'a> {
    ring: &'a Ring,
    cfg: &'a GbConfig,
    polys: Vec<DPoly>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    stats: GbStats,
}

impl<'a> Buchberger<'a> {
    fn active_indices(&self) -> Vec<usize> {
        (0..self.polys.len()).filter(|&k| self.active[k]).collect()
    }

    /// Gebauer-Moeller update with the new element `h`.
    fn update(&mut self, h: usize) {
        let lm_h = self.polys[h][0].m.clone();
        let mut cands: Vec<(usize, Vec<u32>)> =
            self.active_indices().into_iter().map(|g| (g, lcm(&lm_h, &self.polys[g][0].m))).collect();
        let mut kept: Vec<(usize, Vec<u32>)> = Vec::new();
        while !cands.is_empty() {
            let (g1, l1) = cands.remove(0);
            let keep = coprime(&lm_h, &self.polys[g1][0].m)
                || (!cands.iter().any(|(_, l2)| divides(l2, &l1)) && !kept.iter().any(|(_, l2)| divides(l2, &l1)));
            if keep {
                kept.push((g1, l1));
            }
        }
        kept.retain(|(g, _)| !coprime(&lm_h, &self.polys[*g][0].m));

        let polys = &self.polys;
        self.pairs.retain(|p| {
            !(divides(&lm_h, &p.lcm) && lcm(&polys[p.i][0].m, &lm_h) != p.lcm && lcm(&polys[p.j][0].m, &lm_h) != p.lcm)
        });
        for (g, l) in kept {
            self.pairs.push(Pair { i: g, j: h, lcm: l });
        }
        for g in 0..self.polys.len() {
            if self.active[g] && g != h && divides(&lm_h, &self.polys[g][0].m) {
                self.active[g] = false;
            }
        }
        self.active[h] = true;
    }

    fn insert(&mut self, p: DPoly) -> Result<bool, GroebnerError> {
        let deg: u32 = p[0].m.iter().sum();
        if deg > self.cfg.max_degree {
            return Err(GroebnerError::ResourceLimit(format!(
                "basis element of degree {deg} exceeds the degree cap {}",
                self.cfg.max_degree
            )));
        }
        let unit = p[0].m.iter().all(|e| *e == 0);
        self.polys.push(p);
        self.active.push(false);
        let h = self.polys.len() - 1;
        self.update(h);
        Ok(unit)
    }

    fn check_budget(&self) -> Result<(), GroebnerError> {
        if self.stats.pairs_processed > self.cfg.max_pairs {
            return Err(GroebnerError::ResourceLimit(format!("S-pair budget of {} exhausted", self.cfg.max_pairs)));
        }
        if let Some(deadline) = self.cfg.deadline {
            if Instant::now() > deadline {
                return Err(GroebnerError::ResourceLimit("time limit reached".into()));
            }
        }
        Ok(())
    }

    fn select(&mut self) -> Option<Pair> {
        let ring = self.ring;
        let best = (0..self.pairs.len()).min_by(|&a, &b| {
            let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
            ring.cmp(&pa.lcm, &pb.lcm).then_with(|| (pa.j, pa.i).cmp(&(pb.j, pb.i)))
        })?;
        Some(self.pairs.swap_remove(best))
    }

    fn run(&mut self, input: Vec<DPoly>) -> Result<Vec<DPoly>, GroebnerError> {
        let mut input = input;
        input.sort_by(|a, b| self.ring.cmp(&a[0].m, &b[0].m));
        for p in input {
            let reducers = self.active_indices();
            let (r, _) = self.ring.reduce(p, &self.polys, &reducers);
            if !r.is_empty() && self.insert(r)? {
                return Ok(vec![unit_poly(self.ring)]);
            }
        }
        while let Some(pair) = self.select() {
            self.stats.pairs_processed += 1;
            self.check_budget()?;
            let s = self.ring.spoly(&self.polys[pair.i], &self.polys[pair.j]);
            let reducers = self.active_indices();
            let (r, _) = self.ring.reduce(s, &self.polys, &reducers);
            if r.is_empty() {
                self.stats.zero_reductions += 1;
                continue;
            }
            if self.insert(r)? {
                return Ok(vec![unit_poly(self.ring)]);
            }
        }
        // inter-reduction of the minimal basis
        let mut basis: Vec<usize> = self.active_indices();
        basis.sort_by(|&a, &b| self.ring.cmp(&self.polys[a][0].m, &self.polys[b][0].m));
        let mut out = Vec::with_capacity(basis.len());
        for &k in &basis {
            let p = &self.polys[k];
            let others: Vec<usize> = basis.iter().copied().filter(|&o| o != k).collect();
            let (tail, tail_scale) = self.ring.reduce(p[1..].to_vec(), &self.polys, &others);
            // tail_scale * p is congruent to tail_scale * lead + tail
            let lead_c = Rational::from_integer(p[0].c.clone()) * &tail_scale;
            let den = lead_c.denom().clone();
            let mut full = vec![Term { m: p[0].m.clone(), c: lead_c.numer().clone() }];
            for t in tail {
                full.push(Term { m: t.m, c: t.c * &den });
            }
            out.push(full);
        }
        self.stats.basis_size = out.len();
        Ok(out)
    }
}

fn unit_poly(ring: &Ring) -> DPoly {
    vec![Term { m: vec![0; ring.layout.vars.len()], c: BigInt::one() }]
}

/// Reduced Groebner basis of `gens` under `order`; elements are monic and
/// sorted by ascending leading monomial.
pub(crate) fn reduced_basis(
    gens: &[Poly],
    order: &TermOrder,
    cfg: &GbConfig,
) -> Result<(Vec<Poly>, GbStats), GroebnerError> {
    let vars: std::collections::BTreeSet<Var> = gens.iter().flat_map(|g| g.vars()).collect();
    let ring = Ring::new(order, vars.iter());
    let input: Vec<DPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| ring.to_dense(g).0).collect();
    if input.is_empty() {
        return Ok((Vec::new(), GbStats::default()));
    }
    let mut bb = Buchberger {
        ring: &ring,
        cfg,
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GbStats::default(),
    };
    let basis = bb.run(input)?;
    let polys = basis.iter().map(|p| ring.to_monic_poly(p)).collect();
    Ok((polys, bb.stats))
}

/// Remainder of `p` modulo the Groebner basis `basis` (exact, not rescaled).
pub(crate) fn normal_form(p: &Poly, basis: &[Poly], order: &TermOrder) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let mut vars = p.vars();
    for g in basis {
        vars.extend(g.vars());
    }
    let ring = Ring::new(order, vars.iter());
    let dense: Vec<DPoly> = basis.iter().filter(|g| !g.is_zero()).map(|g| ring.to_dense(g).0).collect();
    let (dp, f) = ring.to_dense(p);
    let reducers: Vec<usize> = (0..dense.len()).collect();
    let (r, s) = ring.reduce(dp, &dense, &reducers);
    if r.is_empty() {
        return Poly::zero();
    }
    // dense(p) = f * p and s * dense(p) = (multiples) + r
    ring.to_poly(&r, &(s * f).recip())
}
