use crate::field::NodeId;

/// Dense membership mask over the node ids of one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    members: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet { members: vec![false; n], len: 0 }
    }

    pub fn full(n: usize) -> Self {
        NodeSet { members: vec![true; n], len: n }
    }

    pub fn from_fn(n: usize, f: impl Fn(NodeId) -> bool) -> Self {
        let members: Vec<bool> = (0..n).map(|i| f(NodeId::from(i))).collect();
        let len = members.iter().filter(|&&b| b).count();
        NodeSet { members, len }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = NodeId>) -> Self {
        let mut s = NodeSet::empty(n);
        for id in ids {
            s.insert(id);
        }
        s
    }

    /// Size of the id universe, not the member count.
    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members[id.index()]
    }

    pub fn insert(&mut self, id: NodeId) -> bool {
        let slot = &mut self.members[id.index()];
        let added = !*slot;
        *slot = true;
        self.len += added as usize;
        added
    }

    pub fn remove(&mut self, id: NodeId) -> bool {
        let slot = &mut self.members[id.index()];
        let removed = *slot;
        *slot = false;
        self.len -= removed as usize;
        removed
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| NodeId::from(i))
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        for id in other.iter() {
            self.insert(id);
        }
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        self.members.iter().zip(&other.members).filter(|(a, b)| **a && **b).count()
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_track_mutation() {
        let mut s = NodeSet::empty(5);
        assert!(s.insert(NodeId(2)));
        assert!(!s.insert(NodeId(2)));
        s.insert(NodeId(4));
        assert_eq!(s.len(), 2);
        assert!(s.remove(NodeId(2)));
        assert!(!s.remove(NodeId(2)));
        assert_eq!(s.to_vec(), vec![NodeId(4)]);
    }
}
