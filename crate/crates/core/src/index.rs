//! Flat enumeration of joint spaces.
//!
//! Every flat index in this crate is little-endian mixed radix: the first
//! coordinate varies fastest. A state-action pair for one agent is packed
//! with the action fastest, `z_i = a_i + s_i * |A_i|`.

use crate::error::{Error, Result};

/// Mixed-radix codec over an ordered list of coordinate cardinalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadixIndex {
    radices: Vec<usize>,
}

impl MixedRadixIndex {
    pub fn new(radices: Vec<usize>) -> Self {
        debug_assert!(radices.iter().all(|&r| r >= 1));
        Self { radices }
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Total number of flat indices. Checked in `u128` so oversized joint
    /// spaces are reported instead of silently wrapping.
    pub fn len_u128(&self) -> u128 {
        self.radices.iter().map(|&r| r as u128).product()
    }

    pub fn len(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.radices.len() {
            return Err(Error::Dimension(format!(
                "tuple has {} coordinates, expected {}",
                tuple.len(),
                self.radices.len()
            )));
        }
        let mut index = 0usize;
        let mut stride = 1usize;
        for (k, (&t, &r)) in tuple.iter().zip(&self.radices).enumerate() {
            if t >= r {
                return Err(Error::IndexRange(format!(
                    "coordinate {k} is {t}, radix {r}"
                )));
            }
            index += t * stride;
            stride *= r;
        }
        Ok(index)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = Vec::with_capacity(self.radices.len());
        for &r in &self.radices {
            tuple.push(index % r);
            index /= r;
        }
        tuple
    }

    /// Stride of coordinate `k` in the flat index.
    pub fn stride(&self, k: usize) -> usize {
        self.radices[..k].iter().product()
    }
}

/// Pack a local state-action pair: action varies fastest.
#[inline]
pub fn pack_pair(s: usize, a: usize, action_count: usize) -> usize {
    a + s * action_count
}

/// Unpack a local state-action pair into `(s, a)`.
#[inline]
pub fn unpack_pair(z: usize, action_count: usize) -> (usize, usize) {
    (z / action_count, z % action_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_example() {
        let ix = MixedRadixIndex::new(vec![2, 3]);
        assert_eq!(ix.encode(&[1, 2]).unwrap(), 5);
    }

    #[test]
    fn round_trip_2_3_2() {
        let ix = MixedRadixIndex::new(vec![2, 3, 2]);
        for k in 0..ix.len() {
            assert_eq!(ix.encode(&ix.decode(k)).unwrap(), k);
        }
    }

    #[test]
    fn three_dice_enumerate_216() {
        let ix = MixedRadixIndex::new(vec![6, 6, 6]);
        assert_eq!(ix.len(), 216);
        assert_eq!(ix.len_u128(), 216);
    }

    #[test]
    fn out_of_range_coordinate_rejected() {
        let ix = MixedRadixIndex::new(vec![2, 3]);
        assert!(ix.encode(&[2, 0]).is_err());
        assert!(ix.encode(&[0, 0, 0]).is_err());
    }

    #[test]
    fn pair_packing_is_action_fastest() {
        // s is the slower coordinate
        assert_eq!(pack_pair(0, 0, 3), 0);
        assert_eq!(pack_pair(0, 2, 3), 2);
        assert_eq!(pack_pair(1, 0, 3), 3);
        assert_eq!(unpack_pair(5, 3), (1, 2));
    }
}
