//! Expanded multivariate polynomials over the rationals.
//!
//! This is the normal-form backend: expressions in the rational fragment are
//! flattened to `Poly` pairs to decide equality exactly and to produce
//! canonical printed forms.  The monomial order is graded lexicographic with
//! the kernel symbol order deciding ties, so leading terms are well defined
//! and division terminates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use super::expr::Expr;
use super::symbol::Symbol;

/// A power product of symbols.  Exponents are strictly positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(BTreeMap<Symbol, u32>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(s: Symbol) -> Monomial {
        let mut m = BTreeMap::new();
        m.insert(s, 1);
        Monomial(m)
    }

    pub fn var_pow(s: Symbol, e: u32) -> Monomial {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(s, e);
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&Symbol, &u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (s, e) in &other.0 {
            *m.entry(*s).or_insert(0) += e;
        }
        Monomial(m)
    }

    /// Exact monomial quotient, `None` when some exponent would go negative.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = self.0.clone();
        for (s, e) in &other.0 {
            let slot = m.get_mut(s)?;
            if *slot < *e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                m.remove(s);
            }
        }
        Some(Monomial(m))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first; ties broken at the first
    /// symbol (in ascending symbol order) where the exponents differ, the
    /// higher exponent on that symbol winning.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => {
                    // A positive exponent on a smaller symbol dominates.
                    match sa.cmp(sb) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        },
                    }
                }
            }
        }
    }
}

/// A polynomial with rational coefficients, kept fully expanded.  Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly(BTreeMap<Monomial, BigRational>);

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Poly(m)
    }

    pub fn var(s: Symbol) -> Poly {
        Poly::term(Monomial::var(s), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Poly {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Poly(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty() || (self.0.len() == 1 && self.0.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.0.is_empty() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.0.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    /// Leading term in the monomial order.  Panics on the zero polynomial.
    pub fn leading(&self) -> (&Monomial, &BigRational) {
        self.0.iter().next_back().expect("leading term of zero polynomial")
    }

    fn insert_add(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Split off the rational content: returns `(unit, primitive)` with
    /// `self == unit * primitive`, the primitive part having coprime integer
    /// coefficients and a positive leading coefficient.  The zero polynomial
    /// returns `(1, 0)`.
    pub fn normalized(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::one(), Poly::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.0.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut unit = BigRational::new(num_gcd, den_lcm);
        if self.leading().1.is_negative() {
            unit = -unit;
        }
        let inv = unit.recip();
        (unit, self.scale(&inv))
    }

    /// Exact polynomial quotient, `None` when the division leaves a
    /// remainder.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading();
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading();
                (m.clone(), c.clone())
            };
            let qm = rm.try_div(dm)?;
            let qc = rc / dc;
            let t = Poly::term(qm, qc);
            rem = &rem - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    pub fn to_expr(&self) -> Expr {
        let terms = self
            .0
            .iter()
            .map(|(m, c)| {
                let mut fs = vec![Expr::rat(c.clone())];
                for (s, e) in m.exponents() {
                    fs.push(Expr::pow(Expr::sym(*s), *e as i32));
                }
                Expr::prod(fs)
            })
            .collect();
        Expr::sum(terms)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.insert_add(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &rhs.0 {
                out.insert_add(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_expr())
    }
}
