use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A finite, ordered set of token names. Tokens are referred to by their
/// index everywhere else in the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    tokens: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut seen = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if let Some(j) = seen.insert(t.as_str(), i) {
                return Err(Error::Invariant(format!(
                    "alphabet token `{t}` is declared twice (positions {j} and {i})"
                )));
            }
        }
        Ok(Self { tokens })
    }

    /// Alphabet with tokens `"0"`, `"1"`, ..., `"n-1"`.
    pub fn numbered(n: usize) -> Self {
        Self {
            tokens: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.tokens
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::UnknownToken(name.to_string()))
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn render(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.tokens[i].clone()).collect()
    }

    /// Errors unless `other` lists exactly the same tokens in the same order.
    pub fn expect_same(&self, what: &str, other: &Alphabet, other_what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: what.to_string(),
                left_tokens: self.tokens.clone(),
                right: other_what.to_string(),
                right_tokens: other.tokens.clone(),
            })
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.tokens).finish()
    }
}

/// All words of length `n` over an alphabet of the given size, in
/// lexicographic order.
pub fn words(size: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if size == 0 && n > 0 { 0 } else { size.pow(n as u32) };
    (0..total).map(move |mut code| {
        let mut w = vec![0; n];
        for slot in w.iter_mut().rev() {
            *slot = code % size;
            code /= size;
        }
        w
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_tokens_rejected() {
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn words_enumerates_in_order() {
        let all: Vec<_> = words(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(words(3, 0).count(), 1);
    }
}
