use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("invalid character {0:?} in activation pattern")]
    InvalidChar(char),
    #[error("empty layer in activation pattern")]
    EmptyLayer,
    #[error("pattern widths {got:?} do not match network widths {expected:?}")]
    Shape { expected: Vec<usize>, got: Vec<usize> },
}

/// One active/inactive bit per hidden neuron, grouped by layer.
///
/// `true` means active (pre-activation `>= 0`). The canonical string joins
/// the layers' bit strings with `|`, e.g. `"11|01"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivationPattern {
    layers: Vec<Vec<bool>>,
}

impl ActivationPattern {
    pub fn new(layers: Vec<Vec<bool>>) -> Self {
        ActivationPattern { layers }
    }

    pub fn layers(&self) -> &[Vec<bool>] {
        &self.layers
    }

    pub fn layer(&self, index: usize) -> &[bool] {
        &self.layers[index]
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn total_bits(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn check_widths(&self, widths: &[usize]) -> Result<(), PatternError> {
        if self.widths() != widths {
            return Err(PatternError::Shape {
                expected: widths.to_vec(),
                got: self.widths(),
            });
        }
        Ok(())
    }

    /// Sign vectors in the `{-1, +1}` convention: `+1` is inactive, `-1` active.
    pub fn sign_vectors(&self) -> Vec<Vec<i8>> {
        self.layers
            .iter()
            .map(|l| l.iter().map(|&active| if active { -1 } else { 1 }).collect())
            .collect()
    }

    /// Pattern with all `widths` layers expanded from the bits of `index`,
    /// most significant bit first (so index order equals string order).
    pub fn from_index(widths: &[usize], mut index: u64) -> Self {
        let total: usize = widths.iter().sum();
        let mut bits = vec![false; total];
        for slot in bits.iter_mut().rev() {
            *slot = index & 1 == 1;
            index >>= 1;
        }
        let mut layers = Vec::with_capacity(widths.len());
        let mut rest = bits.as_slice();
        for &w in widths {
            let (head, tail) = rest.split_at(w);
            layers.push(head.to_vec());
            rest = tail;
        }
        ActivationPattern { layers }
    }
}

impl fmt::Display for ActivationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for &bit in layer {
                f.write_str(if bit { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for ActivationPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let layers = s
            .split('|')
            .map(|layer| {
                if layer.is_empty() {
                    return Err(PatternError::EmptyLayer);
                }
                layer
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        other => Err(PatternError::InvalidChar(other)),
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ActivationPattern { layers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_string() {
        let p = ActivationPattern::new(vec![vec![true, true], vec![false, true]]);
        assert_eq!(p.to_string(), "11|01");
        assert_eq!("11|01".parse::<ActivationPattern>().unwrap(), p);
        assert_eq!(p.sign_vectors(), vec![vec![-1, -1], vec![1, -1]]);
        assert_eq!(p.total_bits(), 4);
    }

    #[test]
    fn parse_errors() {
        assert_eq!("1|".parse::<ActivationPattern>(), Err(PatternError::EmptyLayer));
        assert_eq!("12".parse::<ActivationPattern>(), Err(PatternError::InvalidChar('2')));
    }

    #[test]
    fn index_order_is_string_order() {
        let widths = [2, 1];
        let strings: Vec<String> = (0..8)
            .map(|i| ActivationPattern::from_index(&widths, i).to_string())
            .collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted);
        assert_eq!(strings[0], "00|0");
        assert_eq!(strings[5], "10|1");
    }
}
