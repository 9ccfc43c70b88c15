/// Disjoint sets with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    /// Like [`UnionFind::new`] but each element starts with the given weight.
    pub fn with_sizes(sizes: Vec<u32>) -> Self {
        UnionFind {
            parent: (0..sizes.len() as u32).collect(),
            size: sizes,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merges the sets containing `a` and `b`. Returns the new root, or
    /// `None` when they were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> Option<u32> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        Some(ra)
    }

    pub fn set_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }

    /// Component label of every element, canonicalized to the smallest
    /// member of its set.
    pub fn canonical_labels(&mut self) -> Vec<u32> {
        let n = self.len();
        let mut min_of_root = vec![u32::MAX; n];
        let mut roots = Vec::with_capacity(n);
        for x in 0..n as u32 {
            let r = self.find(x);
            roots.push(r);
            let m = &mut min_of_root[r as usize];
            if x < *m {
                *m = x;
            }
        }
        roots.into_iter().map(|r| min_of_root[r as usize]).collect()
    }
}
