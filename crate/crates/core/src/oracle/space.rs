//! Flat indexing of the joint state-action space `Z` and of local joint
//! spaces `Z_{N_i^κ}`.

use crate::error::{Error, Result};
use crate::index::{pack_pair, unpack_pair};
use crate::mdp::FactoredMdp;

/// The full joint pair space. Index little-endian over agents ascending,
/// each agent contributing `z_i = a_i + s_i |A_i|`.
#[derive(Debug, Clone)]
pub struct JointSpace {
    zdims: Vec<usize>,
    strides: Vec<usize>,
    action_counts: Vec<usize>,
    size: usize,
}

impl JointSpace {
    pub fn of(mdp: &FactoredMdp, guard: u128) -> Result<Self> {
        let total = mdp.joint_pair_count();
        if total > guard {
            return Err(Error::SizeGuard {
                size: total,
                limit: guard,
            });
        }
        let zdims: Vec<usize> = mdp.spaces().iter().map(|sp| sp.pair_count()).collect();
        let mut strides = Vec::with_capacity(zdims.len());
        let mut acc = 1usize;
        for &d in &zdims {
            strides.push(acc);
            acc *= d;
        }
        Ok(Self {
            zdims,
            strides,
            action_counts: mdp.spaces().iter().map(|sp| sp.action_count).collect(),
            size: acc,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_agents(&self) -> usize {
        self.zdims.len()
    }

    pub fn zdims(&self) -> &[usize] {
        &self.zdims
    }

    #[inline]
    pub fn agent_pair(&self, z: usize, i: usize) -> usize {
        (z / self.strides[i]) % self.zdims[i]
    }

    #[inline]
    pub fn state_action(&self, z: usize, i: usize) -> (usize, usize) {
        unpack_pair(self.agent_pair(z, i), self.action_counts[i])
    }

    pub fn index_of(&self, state: &[usize], action: &[usize]) -> usize {
        let mut z = 0;
        for i in 0..self.num_agents() {
            z += self.strides[i] * pack_pair(state[i], action[i], self.action_counts[i]);
        }
        z
    }

    pub fn decode(&self, z: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.num_agents();
        let mut s = Vec::with_capacity(n);
        let mut a = Vec::with_capacity(n);
        for i in 0..n {
            let (si, ai) = self.state_action(z, i);
            s.push(si);
            a.push(ai);
        }
        (s, a)
    }

    /// Splice: take the coordinates of `members` from `inside` and the rest
    /// from `outside`.
    pub fn overwrite(&self, outside: usize, inside: usize, members: &[usize]) -> usize {
        let mut z = outside;
        for &j in members {
            let old = self.agent_pair(z, j);
            let new = self.agent_pair(inside, j);
            z = z - old * self.strides[j] + new * self.strides[j];
        }
        z
    }
}

/// Flat space over a sorted member subset's joint pairs, little-endian with
/// the lowest-numbered member varying fastest.
#[derive(Debug, Clone)]
pub struct LocalPairSpace {
    members: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl LocalPairSpace {
    pub fn new(space: &JointSpace, members: &[usize]) -> Self {
        let mut strides = Vec::with_capacity(members.len());
        let mut acc = 1usize;
        for &j in members {
            strides.push(acc);
            acc *= space.zdims()[j];
        }
        Self {
            members: members.to_vec(),
            strides,
            size: acc,
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Project a global joint index onto the member subset.
    #[inline]
    pub fn project(&self, space: &JointSpace, z: usize) -> usize {
        let mut u = 0;
        for (m, &j) in self.members.iter().enumerate() {
            u += self.strides[m] * space.agent_pair(z, j);
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{random_instance, Topology};

    #[test]
    fn round_trip_and_projection() {
        let (mdp, _) = random_instance(3, Topology::Line, 2, 3, 1).unwrap();
        let space = JointSpace::of(&mdp, 1 << 20).unwrap();
        assert_eq!(space.size(), 6 * 6 * 6);
        for z in 0..space.size() {
            let (s, a) = space.decode(z);
            assert_eq!(space.index_of(&s, &a), z);
        }
        let local = LocalPairSpace::new(&space, &[0, 1]);
        assert_eq!(local.size(), 36);
        // projection keeps the member coordinates
        for z in 0..space.size() {
            let u = local.project(&space, z);
            assert_eq!(u % 6, space.agent_pair(z, 0));
            assert_eq!(u / 6, space.agent_pair(z, 1));
        }
    }

    #[test]
    fn overwrite_splices_members() {
        let (mdp, _) = random_instance(4, Topology::Line, 2, 2, 2).unwrap();
        let space = JointSpace::of(&mdp, 1 << 20).unwrap();
        let members = [1usize, 2];
        for &(z1, z2) in &[(37usize, 200usize), (0, 255), (101, 77)] {
            let z = space.overwrite(z2, z1, &members);
            for i in 0..4 {
                let expected = if members.contains(&i) {
                    space.agent_pair(z1, i)
                } else {
                    space.agent_pair(z2, i)
                };
                assert_eq!(space.agent_pair(z, i), expected);
            }
        }
    }

    #[test]
    fn guard_rejects_oversized() {
        let (mdp, _) = random_instance(3, Topology::Line, 2, 3, 1).unwrap();
        assert!(JointSpace::of(&mdp, 100).is_err());
    }
}
