//! Mixed-radix codecs mapping tuples of local values over an agent subset to
//! flat table indices. The first member is the least significant digit, so a
//! codec over all agents reproduces the global state (or action) index.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetCodec {
    members: Vec<usize>,
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl SubsetCodec {
    /// `sizes[k]` is the local cardinality of agent `k` (indexed globally).
    /// Fails when the product space does not fit in `cap` entries.
    pub fn new(members: &[usize], sizes: &[usize], cap: usize) -> Result<Self> {
        let mut strides = Vec::with_capacity(members.len());
        let mut radices = Vec::with_capacity(members.len());
        let mut size: u128 = 1;
        for &m in members {
            strides.push(size as usize);
            radices.push(sizes[m]);
            size *= sizes[m] as u128;
            if size > cap as u128 {
                return Err(Error::CapExceeded {
                    what: "subset product space",
                    size,
                    cap: cap as u128,
                });
            }
        }
        Ok(Self {
            members: members.to_vec(),
            radices,
            strides,
            size: size as usize,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Position of `agent` within the member list.
    pub fn position(&self, agent: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == agent)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.members.len());
        tuple.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        self.radices
            .iter()
            .map(|&r| {
                let v = index % r;
                index /= r;
                v
            })
            .collect()
    }

    /// Encodes the restriction of a full global tuple to the members.
    pub fn encode_global(&self, global: &[usize]) -> usize {
        self.members
            .iter()
            .zip(&self.strides)
            .map(|(&m, s)| global[m] * s)
            .sum()
    }

    /// Writes the decoded tuple into the member slots of `global`.
    pub fn scatter(&self, mut index: usize, global: &mut [usize]) {
        for (&m, &r) in self.members.iter().zip(&self.radices) {
            global[m] = index % r;
            index /= r;
        }
    }

    /// Digit of `agent` inside an encoded index.
    pub fn digit(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.radices[pos]
    }

    pub fn stride(&self, pos: usize) -> usize {
        self.strides[pos]
    }

    pub fn radix(&self, pos: usize) -> usize {
        self.radices[pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_codec_matches_little_endian_global_index() {
        let c = SubsetCodec::new(&[0, 1, 2], &[2, 3, 2], 1 << 20).unwrap();
        assert_eq!(c.size(), 12);
        assert_eq!(c.encode(&[1, 2, 1]), 1 + 2 * 2 + 6);
        assert_eq!(c.decode(11), vec![1, 2, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(SubsetCodec::new(&[0, 1], &[1024, 1024], 1000).is_err());
    }

    proptest! {
        #[test]
        fn encode_decode_bijection(sizes in prop::collection::vec(1usize..5, 1..6), seed in 0usize..10_000) {
            let members: Vec<usize> = (0..sizes.len()).collect();
            let c = SubsetCodec::new(&members, &sizes, 1 << 20).unwrap();
            let idx = seed % c.size();
            let t = c.decode(idx);
            prop_assert_eq!(c.encode(&t), idx);
            let mut g = vec![0; sizes.len()];
            c.scatter(idx, &mut g);
            prop_assert_eq!(c.encode_global(&g), idx);
        }
    }
}
