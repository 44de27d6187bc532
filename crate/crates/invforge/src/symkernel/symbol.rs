//! Interned symbols and their fixed total order.
//!
//! The order is: `u < v < f_ij (graded by (i+j, i)) < C0..C3 < phi^(k) by k
//! < c0..c3 < derived invariants I^ij (graded) < user symbols (registration
//! order)`.  It is stable across runs and is the tie-breaker everywhere a
//! deterministic arrangement is needed (monomial order, printing, term
//! collection).

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Direction of a total or invariant derivative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Dir {
    U,
    V,
}

/// Composition word for derived invariant symbols, outermost operator first.
///
/// `word = [a, b]` names the invariant `D_a(D_b(I))`.  The word is packed into
/// sixteen bits (one bit per step, `V = 1`), which caps the length at 16 —
/// far beyond anything the structure layer produces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct DerivWord {
    len: u8,
    bits: u16,
}

impl DerivWord {
    pub const EMPTY: DerivWord = DerivWord { len: 0, bits: 0 };

    /// Prepend one more derivative on the outside.
    pub fn push_outer(self, dir: Dir) -> DerivWord {
        assert!(self.len < 16, "derivative word too long");
        let bit = match dir {
            Dir::U => 0,
            Dir::V => 1,
        };
        DerivWord {
            len: self.len + 1,
            bits: (self.bits << 1) | bit,
        }
    }

    pub fn from_steps(steps: &[Dir]) -> DerivWord {
        let mut w = DerivWord::EMPTY;
        for d in steps.iter().rev() {
            w = w.push_outer(*d);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Steps from the outermost operator inwards.
    pub fn steps(&self) -> Vec<Dir> {
        (0..self.len)
            .map(|t| {
                if (self.bits >> t) & 1 == 1 {
                    Dir::V
                } else {
                    Dir::U
                }
            })
            .collect()
    }
}

impl PartialOrd for DerivWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DerivWord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len, self.bits).cmp(&(other.len, other.bits))
    }
}

/// A symbol of the computation universe.  `Copy`, structurally interned: two
/// symbols with equal kind and indices are identical.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Symbol {
    /// Base variable u.
    U,
    /// Base variable v = u_x.
    V,
    /// Jet coordinate f_ij = d^i_u d^j_v f.
    Jet { i: u8, j: u8 },
    /// Group parameter C0..C3.
    GroupC(u8),
    /// k-th derivative of the group function phi (k = 0 is phi itself).
    Phi(u8),
    /// Algebra parameter c0..c3.
    AlgC(u8),
    /// Derived invariant symbol: `word` applied to the normalized invariant
    /// I^ij, outermost operator first.
    Inv { i: u8, j: u8, word: DerivWord },
    /// Registered auxiliary symbol (t, x, u_t, u_xx, ...).
    User(u16),
}

impl Symbol {
    pub fn jet(i: u8, j: u8) -> Symbol {
        assert!(i <= 30 && j <= 30, "jet order out of range");
        Symbol::Jet { i, j }
    }

    pub fn group_c(k: u8) -> Symbol {
        assert!(k <= 3, "group parameters are C0..C3");
        Symbol::GroupC(k)
    }

    pub fn phi(k: u8) -> Symbol {
        assert!(k <= 40, "phi derivative order out of range");
        Symbol::Phi(k)
    }

    pub fn alg_c(k: u8) -> Symbol {
        assert!(k <= 3, "algebra parameters are c0..c3");
        Symbol::AlgC(k)
    }

    pub fn inv(i: u8, j: u8) -> Symbol {
        Symbol::Inv {
            i,
            j,
            word: DerivWord::EMPTY,
        }
    }

    pub fn inv_derived(i: u8, j: u8, word: DerivWord) -> Symbol {
        Symbol::Inv { i, j, word }
    }

    fn sort_key(&self) -> (u8, u16, u16, u16, u16) {
        match *self {
            Symbol::U => (0, 0, 0, 0, 0),
            Symbol::V => (1, 0, 0, 0, 0),
            Symbol::Jet { i, j } => (2, (i + j) as u16, i as u16, 0, 0),
            Symbol::GroupC(k) => (3, k as u16, 0, 0, 0),
            Symbol::Phi(k) => (4, k as u16, 0, 0, 0),
            Symbol::AlgC(k) => (5, k as u16, 0, 0, 0),
            Symbol::Inv { i, j, word } => {
                (6, (i + j) as u16, i as u16, word.len as u16, word.bits)
            }
            Symbol::User(id) => (7, id, 0, 0, 0),
        }
    }

    /// Plain-text name, also used by the JSON serialization.
    pub fn name(&self) -> String {
        match *self {
            Symbol::U => "u".into(),
            Symbol::V => "v".into(),
            Symbol::Jet { i, j } => {
                if i == 0 && j == 0 {
                    "f".into()
                } else {
                    let mut s = String::from("f_");
                    s.extend(std::iter::repeat('u').take(i as usize));
                    s.extend(std::iter::repeat('v').take(j as usize));
                    s
                }
            }
            Symbol::GroupC(k) => format!("C{k}"),
            Symbol::Phi(k) => match k {
                0 => "phi".into(),
                1..=3 => format!("phi{}", "'".repeat(k as usize)),
                _ => format!("phi^({k})"),
            },
            Symbol::AlgC(k) => format!("c{k}"),
            Symbol::Inv { i, j, word } => {
                let mut s = format!("I{i}{j}");
                for d in word.steps().iter().rev() {
                    let op = match d {
                        Dir::U => "Du",
                        Dir::V => "Dv",
                    };
                    s = format!("{op}[{s}]");
                }
                s
            }
            Symbol::User(id) => user_name(id),
        }
    }

    /// LaTeX rendering of the symbol.
    pub fn latex(&self) -> String {
        match *self {
            Symbol::U => "u".into(),
            Symbol::V => "v".into(),
            Symbol::Jet { i, j } => {
                if i == 0 && j == 0 {
                    "f".into()
                } else {
                    let mut sub = String::new();
                    sub.extend(std::iter::repeat('u').take(i as usize));
                    sub.extend(std::iter::repeat('v').take(j as usize));
                    format!("f_{{{sub}}}")
                }
            }
            Symbol::GroupC(k) => format!("C_{{{k}}}"),
            Symbol::Phi(k) => match k {
                0 => "\\varphi".into(),
                1..=3 => format!("\\varphi{}", "'".repeat(k as usize)),
                _ => format!("\\varphi^{{({k})}}"),
            },
            Symbol::AlgC(k) => format!("c_{{{k}}}"),
            Symbol::Inv { i, j, word } => {
                let mut s = format!("I^{{{i}{j}}}");
                for d in word.steps().iter().rev() {
                    let op = match d {
                        Dir::U => "\\mathrm{D}^{\\mathrm{i}}_{u}",
                        Dir::V => "\\mathrm{D}^{\\mathrm{i}}_{v}",
                    };
                    s = format!("{op}\\,{s}");
                }
                s
            }
            Symbol::User(id) => format!("\\mathit{{{}}}", user_name(id)),
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

// Auxiliary symbols are interned by name.  A few are pre-registered so their
// relative order never depends on call order.
static USER_NAMES: OnceLock<Mutex<Vec<String>>> = OnceLock::new();

fn user_registry() -> &'static Mutex<Vec<String>> {
    USER_NAMES.get_or_init(|| {
        Mutex::new(vec![
            "t".to_string(),
            "x".to_string(),
            "u_t".to_string(),
            "u_xx".to_string(),
        ])
    })
}

/// Intern an auxiliary symbol by name.
pub fn user_symbol(name: &str) -> Symbol {
    let mut reg = user_registry().lock().unwrap();
    if let Some(pos) = reg.iter().position(|n| n == name) {
        Symbol::User(pos as u16)
    } else {
        assert!(reg.len() < u16::MAX as usize);
        reg.push(name.to_string());
        Symbol::User((reg.len() - 1) as u16)
    }
}

pub(crate) fn user_name(id: u16) -> String {
    user_registry().lock().unwrap()[id as usize].clone()
}

/// Inverse of [`Symbol::name`], used when reading serialized expressions.
pub(crate) fn symbol_from_name(name: &str) -> Option<Symbol> {
    match name {
        "u" => return Some(Symbol::U),
        "v" | "ux" => return Some(Symbol::V),
        "f" => return Some(Symbol::jet(0, 0)),
        "phi" => return Some(Symbol::phi(0)),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("f_") {
        let i = rest.chars().take_while(|c| *c == 'u').count();
        let j = rest.chars().skip(i).take_while(|c| *c == 'v').count();
        if i + j == rest.len() && !rest.is_empty() {
            return Some(Symbol::jet(i as u8, j as u8));
        }
        return None;
    }
    if let Some(rest) = name.strip_prefix("phi^(") {
        let digits = rest.strip_suffix(')')?;
        return digits.parse::<u8>().ok().map(Symbol::phi);
    }
    if let Some(rest) = name.strip_prefix("phi") {
        if !rest.is_empty() && rest.chars().all(|c| c == '\'') {
            return Some(Symbol::phi(rest.len() as u8));
        }
        return None;
    }
    if let Some(rest) = name.strip_prefix('C') {
        if let Ok(k) = rest.parse::<u8>() {
            if k <= 3 {
                return Some(Symbol::group_c(k));
            }
        }
        return None;
    }
    if let Some(rest) = name.strip_prefix('c') {
        if let Ok(k) = rest.parse::<u8>() {
            if k <= 3 {
                return Some(Symbol::alg_c(k));
            }
        }
        return None;
    }
    if name.starts_with('I') || name.starts_with("Du[") || name.starts_with("Dv[") {
        return parse_inv_name(name);
    }
    // Fall back to the auxiliary registry (registers unknown names).
    Some(user_symbol(name))
}

fn parse_inv_name(name: &str) -> Option<Symbol> {
    let mut steps = Vec::new();
    let mut rest = name;
    loop {
        if let Some(inner) = rest.strip_prefix("Du[").and_then(|r| r.strip_suffix(']')) {
            steps.push(Dir::U);
            rest = inner;
        } else if let Some(inner) = rest.strip_prefix("Dv[").and_then(|r| r.strip_suffix(']')) {
            steps.push(Dir::V);
            rest = inner;
        } else {
            break;
        }
    }
    let digits = rest.strip_prefix('I')?;
    if digits.len() != 2 {
        return None;
    }
    let i = digits[0..1].parse::<u8>().ok()?;
    let j = digits[1..2].parse::<u8>().ok()?;
    Some(Symbol::inv_derived(i, j, DerivWord::from_steps(&steps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_follows_the_documented_chain() {
        let mut syms = vec![
            Symbol::alg_c(0),
            Symbol::phi(2),
            Symbol::jet(1, 1),
            Symbol::jet(0, 2),
            Symbol::V,
            Symbol::U,
            Symbol::group_c(1),
            Symbol::jet(0, 0),
        ];
        syms.sort();
        assert_eq!(
            syms,
            vec![
                Symbol::U,
                Symbol::V,
                Symbol::jet(0, 0),
                Symbol::jet(0, 2),
                Symbol::jet(1, 1),
                Symbol::group_c(1),
                Symbol::phi(2),
                Symbol::alg_c(0),
            ]
        );
    }

    #[test]
    fn jets_are_graded_by_total_order_then_u_count() {
        assert!(Symbol::jet(0, 1) < Symbol::jet(1, 0));
        assert!(Symbol::jet(1, 0) < Symbol::jet(0, 2));
        assert!(Symbol::jet(0, 3) < Symbol::jet(1, 2));
    }

    #[test]
    fn names_round_trip() {
        for s in [
            Symbol::U,
            Symbol::V,
            Symbol::jet(0, 0),
            Symbol::jet(2, 1),
            Symbol::group_c(2),
            Symbol::phi(0),
            Symbol::phi(3),
            Symbol::phi(5),
            Symbol::alg_c(1),
            Symbol::inv(1, 1),
            Symbol::inv_derived(1, 1, DerivWord::from_steps(&[Dir::V, Dir::U])),
        ] {
            assert_eq!(symbol_from_name(&s.name()), Some(s), "name {}", s.name());
        }
    }

    #[test]
    fn deriv_words_apply_outermost_first() {
        let w = DerivWord::from_steps(&[Dir::U, Dir::V]);
        assert_eq!(w.steps(), vec![Dir::U, Dir::V]);
        let w2 = w.push_outer(Dir::V);
        assert_eq!(w2.steps(), vec![Dir::V, Dir::U, Dir::V]);
    }

    #[test]
    fn user_symbols_are_interned() {
        assert_eq!(user_symbol("u_t"), user_symbol("u_t"));
        assert_ne!(user_symbol("u_t"), user_symbol("u_xx"));
    }
}
