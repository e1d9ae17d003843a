//! Test-only reference implementation.
//!
//! Shares nothing with the kernel except the rational type. Brackets are a
//! hard-coded `match` and normal ordering is a plain bubble sort on words.
//! Kernel results are converted into this representation before comparing.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use stringyang::rational::{frac, q};
use stringyang::{Element, Generator, Q, TensorElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum L {
    H,
    A(i64),
    B(i64),
}

pub type Word = Vec<L>;
pub type Elem = BTreeMap<Word, Q>;
pub type Tens = BTreeMap<(Word, Word), Q>;

pub struct Oracle {
    pub eps: Box<dyn Fn(i64) -> Q + Sync>,
    pub alpha: Q,
    pub beta: Q,
    /// `F = alpha a0 + f/3 a0^3`.
    pub f: Q,
    /// `G = beta a0 + g/3 a0^3`.
    pub g: Q,
}

impl Oracle {
    /// Constant ε with `F = α a0 - ε²/3 a0³`, `G = β a0`.
    pub fn example(eps: Q, alpha: Q, beta: Q) -> Self {
        let f = -(&eps * &eps);
        Oracle { eps: Box::new(move |_| eps.clone()), alpha, beta, f, g: Q::zero() }
    }

    pub fn general(eps: BTreeMap<i64, Q>, f: Q, g: Q) -> Self {
        Oracle {
            eps: Box::new(move |m| eps.get(&m.abs()).cloned().unwrap_or_else(Q::zero)),
            alpha: Q::zero(),
            beta: Q::zero(),
            f,
            g,
        }
    }

    /// `[x, y]` as a list of `(coefficient, word)`.
    pub fn bracket(&self, x: L, y: L) -> Vec<(Q, Word)> {
        use L::*;
        let a0 = A(0);
        match (x, y) {
            (A(m), A(n)) if m + n == 0 => vec![(q(m), vec![a0])],
            (A(_), A(_)) | (H, H) => vec![],
            (H, A(m)) => vec![(q(m), vec![A(m)])],
            (A(m), H) => vec![(q(-m), vec![A(m)])],
            (A(m), B(n)) => vec![(q(m), vec![A(m + n)])],
            (B(n), A(m)) => vec![(q(-m), vec![A(m + n)])],
            (H, B(m)) => vec![(q(m), vec![B(m)])],
            (B(m), H) => vec![(q(-m), vec![B(m)])],
            (B(m), B(n)) => {
                let mut out = vec![(q(m - n), vec![B(m + n)])];
                if m + n == 0 {
                    let (m1, m3) = (q(m), q(m * m * m));
                    out.push((&m3 * &self.alpha + &m1 * &self.beta, vec![a0]));
                    out.push(((&m3 * &self.f + &m1 * &self.g) * frac(1, 3), vec![a0, a0, a0]));
                }
                out
            }
        }
    }

    pub fn normal_order(&self, word: Word, coefficient: Q) -> Elem {
        let mut out = Elem::new();
        let mut todo = vec![(word, coefficient)];
        while let Some((w, c)) = todo.pop() {
            match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
                None => add(&mut out, w, c),
                Some(i) => {
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    todo.push((swapped, c.clone()));
                    for (k, letters) in self.bracket(w[i], w[i + 1]) {
                        let mut next = w[..i].to_vec();
                        next.extend(letters);
                        next.extend_from_slice(&w[i + 2..]);
                        todo.push((next, &c * k));
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (wx, cx) in x {
            for (wy, cy) in y {
                let word = wx.iter().chain(wy).copied().collect();
                for (w, c) in self.normal_order(word, cx * cy) {
                    add(&mut out, w, c);
                }
            }
        }
        out
    }

    pub fn comm(&self, x: &Elem, y: &Elem) -> Elem {
        sub(&self.mul(x, y), &self.mul(y, x))
    }

    pub fn tmul(&self, x: &Tens, y: &Tens) -> Tens {
        let mut out = Tens::new();
        for ((l1, r1), c1) in x {
            for ((l2, r2), c2) in y {
                let left = self.normal_order(l1.iter().chain(l2).copied().collect(), q(1));
                let right = self.normal_order(r1.iter().chain(r2).copied().collect(), q(1));
                for (wl, cl) in &left {
                    for (wr, cr) in &right {
                        add(&mut out, (wl.clone(), wr.clone()), c1 * c2 * cl * cr);
                    }
                }
            }
        }
        out
    }

    pub fn tcomm(&self, x: &Tens, y: &Tens) -> Tens {
        sub(&self.tmul(x, y), &self.tmul(y, x))
    }

    pub fn coproduct_letter(&self, x: L) -> Tens {
        let mut out = Tens::new();
        add(&mut out, (vec![x], vec![]), q(1));
        add(&mut out, (vec![], vec![x]), q(1));
        if let L::B(m) = x {
            let k = (self.eps)(m) * q(m);
            add(&mut out, (vec![L::A(m)], vec![L::A(0)]), k.clone());
            add(&mut out, (vec![L::A(0)], vec![L::A(m)]), -k);
        }
        out
    }

    pub fn coproduct(&self, x: &Elem) -> Tens {
        let mut out = Tens::new();
        for (w, c) in x {
            let mut t = Tens::new();
            t.insert((vec![], vec![]), c.clone());
            for &letter in w {
                t = self.tmul(&t, &self.coproduct_letter(letter));
            }
            for (k, v) in t {
                add(&mut out, k, v);
            }
        }
        out
    }

    /// `[Δx, Δy] - Δ([x, y])` for letters.
    pub fn homomorphism_residual(&self, x: L, y: L) -> Tens {
        let lhs = self.tcomm(&self.coproduct_letter(x), &self.coproduct_letter(y));
        let rhs = self.coproduct(&self.comm(&letter(x), &letter(y)));
        sub(&lhs, &rhs)
    }
}

pub fn add<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, value: Q) {
    let entry = map.entry(key).or_insert_with(Q::zero);
    *entry += value;
    map.retain(|_, v| !v.is_zero());
}

pub fn sub<K: Ord + Clone>(x: &BTreeMap<K, Q>, y: &BTreeMap<K, Q>) -> BTreeMap<K, Q> {
    let mut out = x.clone();
    for (k, v) in y {
        add(&mut out, k.clone(), -v);
    }
    out
}

pub fn letter(x: L) -> Elem {
    BTreeMap::from([(vec![x], q(1))])
}

pub fn from_generator(g: Generator) -> L {
    match g {
        Generator::Ham => L::H,
        Generator::OscA(m) => L::A(m),
        Generator::YangB(m) => L::B(m),
    }
}

pub fn to_generator(x: L) -> Generator {
    match x {
        L::H => Generator::Ham,
        L::A(m) => Generator::a(m),
        L::B(m) => Generator::b(m),
    }
}

pub fn from_element(x: &Element) -> Elem {
    x.terms()
        .map(|(m, c)| (m.letters().iter().map(|&g| from_generator(g)).collect(), c.clone()))
        .collect()
}

pub fn from_tensor(t: &TensorElement) -> Tens {
    t.terms()
        .map(|([l, r], c)| {
            let conv = |m: &stringyang::Monomial| m.letters().iter().map(|&g| from_generator(g)).collect();
            ((conv(l), conv(r)), c.clone())
        })
        .collect()
}

/// `a[m+n] (x) a[0] - a[0] (x) a[m+n]` scaled by `k`.
pub fn d_direction(mode: i64, k: Q) -> Tens {
    let mut out = Tens::new();
    add(&mut out, (vec![L::A(mode)], vec![L::A(0)]), k.clone());
    add(&mut out, (vec![L::A(0)], vec![L::A(mode)]), -k);
    out
}
