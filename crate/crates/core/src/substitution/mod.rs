//! Symbolic substitutions: expansion, letter-count matrix, eigen data,
//! tile-length deformations and geometric realization.

mod eigen;
mod realize;
mod section7;

pub use eigen::{EigenClass, EigenData, EigenEntry, EigenValue, EigenVector};
pub use realize::{Realization, RealizedPoint};
pub use section7::{section7_experiment, BranchReport, GapRow, Section7Options, Section7Report};

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Alphabet, rules and the letter-count matrix `M[i][j]` = number of
/// letter `i` in the image of letter `j`.
#[derive(Debug)]
pub struct SubstitutionSystem {
    alphabet: Vec<String>,
    rules: Vec<Vec<usize>>,
    matrix: Vec<Vec<i64>>,
    /// Population vectors of `sigma^n(letter)`, filled on demand.
    memo: RwLock<HashMap<(usize, u32), Vec<BigInt>>>,
}

impl Clone for SubstitutionSystem {
    fn clone(&self) -> Self {
        SubstitutionSystem {
            alphabet: self.alphabet.clone(),
            rules: self.rules.clone(),
            matrix: self.matrix.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl SubstitutionSystem {
    /// `rules[j]` is the image of `alphabet[j]`, written with letter names
    /// (concatenated or space separated).
    pub fn new(alphabet: Vec<String>, rules: &[(String, String)]) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidSubstitution("empty alphabet".into()));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if a.is_empty() || a.chars().any(char::is_whitespace) {
                return Err(Error::InvalidSubstitution(format!("bad letter name {a:?}")));
            }
            if alphabet[..i].contains(a) {
                return Err(Error::InvalidSubstitution(format!("letter {a} listed twice")));
            }
        }
        let mut images = vec![None; alphabet.len()];
        for (letter, word) in rules {
            let j = alphabet
                .iter()
                .position(|a| a == letter)
                .ok_or_else(|| Error::InvalidSubstitution(format!("rule for unknown letter {letter}")))?;
            if images[j].is_some() {
                return Err(Error::InvalidSubstitution(format!("two rules for {letter}")));
            }
            let w = parse_word(&alphabet, word)?;
            if w.is_empty() {
                return Err(Error::InvalidSubstitution(format!("empty image for {letter}")));
            }
            images[j] = Some(w);
        }
        let rules: Vec<Vec<usize>> = images
            .into_iter()
            .enumerate()
            .map(|(j, w)| w.ok_or_else(|| Error::InvalidSubstitution(format!("no rule for {}", alphabet[j]))))
            .collect::<Result<_>>()?;
        let m = alphabet.len();
        let mut matrix = vec![vec![0i64; m]; m];
        for (j, w) in rules.iter().enumerate() {
            for &i in w {
                matrix[i][j] += 1;
            }
        }
        let sys = SubstitutionSystem { alphabet, rules, matrix, memo: RwLock::new(HashMap::new()) };
        if !sys.is_primitive() {
            return Err(Error::InvalidSubstitution("substitution is not primitive".into()));
        }
        if sys.rules.iter().all(|w| w.len() == 1) {
            return Err(Error::InvalidSubstitution("Perron-Frobenius eigenvalue is 1".into()));
        }
        Ok(sys)
    }

    /// `a1 -> a1 b1 a2, b1 -> a1 b2, a2 -> a1 b2 a2, b2 -> a2 b1`.
    pub fn doubled_fibonacci() -> Self {
        let alphabet: Vec<String> = ["a1", "b1", "a2", "b2"].iter().map(|s| s.to_string()).collect();
        let rules: Vec<(String, String)> = [("a1", "a1b1a2"), ("b1", "a1b2"), ("a2", "a1b2a2"), ("b2", "a2b1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        SubstitutionSystem::new(alphabet, &rules).expect("valid system")
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn letter(&self, name: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Config(format!("unknown letter {name}")))
    }

    pub fn rule(&self, letter: usize) -> &[usize] {
        &self.rules[letter]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Wielandt bound: a primitive `m x m` matrix has `M^k > 0` for
    /// `k = (m-1)^2 + 1`.
    fn is_primitive(&self) -> bool {
        let m = self.size();
        let mut reach: Vec<Vec<bool>> = self.matrix.iter().map(|r| r.iter().map(|&v| v > 0).collect()).collect();
        let step = reach.clone();
        for _ in 0..(m - 1) * (m - 1) {
            let mut next = vec![vec![false; m]; m];
            for i in 0..m {
                for j in 0..m {
                    next[i][j] = (0..m).any(|k| reach[i][k] && step[k][j]);
                }
            }
            reach = next;
        }
        reach.iter().all(|r| r.iter().all(|&v| v))
    }

    /// `sigma^n(letter)` as letter indices.
    pub fn expand(&self, letter: usize, n: u32) -> Vec<usize> {
        let mut w = vec![letter];
        for _ in 0..n {
            w = w.iter().flat_map(|&l| self.rules[l].iter().copied()).collect();
        }
        w
    }

    pub fn word_string(&self, word: &[usize]) -> String {
        word.iter().map(|&l| self.alphabet[l].as_str()).collect()
    }

    /// Letter counts of `sigma^n(letter)`, i.e. `M^n e_letter`.
    pub fn population(&self, letter: usize, n: u32) -> Vec<BigInt> {
        if let Some(v) = self.memo.read().expect("memo lock").get(&(letter, n)) {
            return v.clone();
        }
        let v = if n == 0 {
            let mut e = vec![BigInt::zero(); self.size()];
            e[letter] = BigInt::one();
            e
        } else {
            // sigma^n(l) = concatenation of sigma^(n-1) over the letters of sigma(l)
            let mut acc = vec![BigInt::zero(); self.size()];
            for &c in &self.rules[letter] {
                for (a, b) in acc.iter_mut().zip(self.population(c, n - 1)) {
                    *a += b;
                }
            }
            acc
        };
        self.memo.write().expect("memo lock").insert((letter, n), v.clone());
        v
    }

    /// `det(x I - M)`, highest degree first.
    pub fn characteristic_polynomial(&self) -> Vec<BigInt> {
        eigen::char_poly(&self.matrix)
    }

    pub fn eigen_system(&self) -> Result<EigenData> {
        eigen::eigen_system(&self.matrix)
    }

    /// Whether `sigma^n(x) sigma^n(y)` occurs in the fixed point grown from
    /// `seed` for every `n`: it does when `x y` occurs in `sigma^depth(seed)`,
    /// since applying `sigma^n` to that occurrence gives the pair.
    pub fn pair_occurs(&self, seed: usize, x: usize, y: usize, depth: u32) -> bool {
        self.expand(seed, depth).windows(2).any(|w| w[0] == x && w[1] == y)
    }

    /// `sigma^n(x) sigma^n(y)` occurs in `sigma^(n+3)(seed)`: by direct
    /// search for small `n`, through the pair at depth 3 beyond that.
    pub fn supertile_pair_occurs(&self, seed: usize, x: usize, y: usize, n: u32) -> bool {
        if n > 6 {
            return self.pair_occurs(seed, x, y, 3);
        }
        let text = self.expand(seed, n + 3);
        let mut pat = self.expand(x, n);
        pat.extend(self.expand(y, n));
        text.windows(pat.len()).any(|w| w == pat.as_slice())
    }
}

/// Splits a word into letters by greedy longest match.
pub fn parse_word(alphabet: &[String], word: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for chunk in word.split_whitespace() {
        let mut rest = chunk;
        while !rest.is_empty() {
            let best = alphabet
                .iter()
                .enumerate()
                .filter(|(_, a)| rest.starts_with(a.as_str()))
                .max_by_key(|(_, a)| a.len())
                .ok_or_else(|| Error::InvalidSubstitution(format!("cannot read {rest:?} as letters")))?;
            out.push(best.0);
            rest = &rest[best.1.len()..];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansions() {
        let s = SubstitutionSystem::doubled_fibonacci();
        let a1 = s.letter("a1").unwrap();
        assert_eq!(s.word_string(&s.expand(a1, 0)), "a1");
        assert_eq!(s.word_string(&s.expand(a1, 1)), "a1b1a2");
        assert_eq!(s.word_string(&s.expand(a1, 2)), "a1b1a2a1b2a1b2a2");
    }

    #[test]
    fn matrix_columns() {
        let s = SubstitutionSystem::doubled_fibonacci();
        let cols: Vec<Vec<i64>> = (0..4).map(|j| (0..4).map(|i| s.matrix()[i][j]).collect()).collect();
        assert_eq!(cols, vec![vec![1, 1, 1, 0], vec![1, 0, 0, 1], vec![1, 0, 1, 1], vec![0, 1, 1, 0]]);
    }

    #[test]
    fn population_matches_word_counts() {
        let s = SubstitutionSystem::doubled_fibonacci();
        for l in 0..4 {
            for n in 0..12 {
                let w = s.expand(l, n);
                let counts: Vec<BigInt> = (0..4).map(|i| BigInt::from(w.iter().filter(|&&c| c == i).count())).collect();
                assert_eq!(s.population(l, n), counts);
            }
        }
    }

    #[test]
    fn population_is_matrix_power_column() {
        let s = SubstitutionSystem::doubled_fibonacci();
        let m = s.matrix();
        for l in 0..4 {
            let mut v: Vec<BigInt> = (0..4).map(|i| BigInt::from((i == l) as i64)).collect();
            for n in 0..=20 {
                assert_eq!(s.population(l, n), v);
                v = (0..4).map(|i| (0..4).map(|j| BigInt::from(m[i][j]) * &v[j]).sum()).collect();
            }
        }
    }

    #[test]
    fn invalid_systems() {
        let ab = vec!["a".to_string(), "b".to_string()];
        let r = |x: &str, y: &str| vec![("a".to_string(), x.to_string()), ("b".to_string(), y.to_string())];
        assert!(SubstitutionSystem::new(ab.clone(), &r("ab", "a")).is_ok());
        assert!(SubstitutionSystem::new(ab.clone(), &r("aa", "bb")).is_err());
        assert!(SubstitutionSystem::new(ab.clone(), &r("b", "a")).is_err());
        assert!(SubstitutionSystem::new(ab.clone(), &r("ac", "a")).is_err());
        assert!(SubstitutionSystem::new(ab, &[("a".into(), "ab".into())]).is_err());
    }

    #[test]
    fn supertile_pairs_occur() {
        let s = SubstitutionSystem::doubled_fibonacci();
        let (a1, b1, a2) = (0, 1, 2);
        assert!(s.pair_occurs(a1, a1, b1, 3));
        assert!(s.pair_occurs(a1, a2, b1, 3));
        for n in 0..=6 {
            assert!(s.supertile_pair_occurs(a1, a1, b1, n));
            assert!(s.supertile_pair_occurs(a1, a2, b1, n));
        }
        // every b is followed by an a
        assert!(!s.supertile_pair_occurs(a1, b1, b1, 0));
    }
}
