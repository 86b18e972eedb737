//! Union-find over torus points with per-node displacement bookkeeping: every
//! node stores its unwrapped displacement to its parent, so merging an edge
//! whose endpoints are already connected reveals whether the cycle winds
//! around the torus (the stored and observed displacements differ by ~L).

pub struct WindingUf {
    parent: Vec<u32>,
    rank: Vec<u8>,
    size: Vec<u32>,
    /// Flattened d-vectors: displacement from node to its parent.
    offset: Vec<f64>,
    d: usize,
    side: f64,
    pub wrapped: bool,
}

impl WindingUf {
    pub fn new(n: usize, d: usize, side: f64) -> Self {
        WindingUf {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            size: vec![1; n],
            offset: vec![0.0; n * d],
            d,
            side,
            wrapped: false,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of x with full path compression; offsets become root-relative.
    pub fn find(&mut self, x: usize) -> usize {
        let mut path: Vec<usize> = Vec::new();
        let mut cur = x;
        while self.parent[cur] as usize != cur {
            path.push(cur);
            cur = self.parent[cur] as usize;
        }
        let root = cur;
        // nodes nearest the root first, so parent offsets are already absolute
        for &node in path.iter().rev() {
            let p = self.parent[node] as usize;
            if p != root {
                for j in 0..self.d {
                    self.offset[node * self.d + j] += self.offset[p * self.d + j];
                }
            }
            self.parent[node] = root as u32;
        }
        root
    }

    /// Join a and b through an edge of minimum-image displacement
    /// delta = x_b - x_a; detects winding when the edge closes a cycle.
    pub fn union(&mut self, a: usize, b: usize, delta: &[f64]) {
        let ra = self.find(a);
        let rb = self.find(b);
        let d = self.d;
        if ra == rb {
            for j in 0..d {
                let diff = self.offset[b * d + j] - self.offset[a * d + j] - delta[j];
                if diff.abs() > self.side / 2.0 {
                    self.wrapped = true;
                }
            }
            return;
        }
        // attach the lower-rank root; new offset keeps v(b) = v(a) + delta
        let (child, parent_root, sign) = if self.rank[ra] < self.rank[rb] {
            (ra, rb, -1.0)
        } else {
            (rb, ra, 1.0)
        };
        for j in 0..d {
            let rel = self.offset[a * d + j] + delta[j] - self.offset[b * d + j];
            self.offset[child * d + j] = sign * rel;
        }
        self.parent[child] = parent_root as u32;
        self.size[parent_root] += self.size[child];
        if self.rank[ra] == self.rank[rb] {
            self.rank[parent_root] += 1;
        }
    }

    pub fn cluster_sizes(&mut self) -> Vec<u32> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            if self.parent[i] as usize == i {
                out.push(self.size[i]);
            }
        }
        out
    }

    pub fn largest_cluster(&mut self) -> u32 {
        let n = self.len();
        (0..n)
            .filter(|&i| self.parent[i] as usize == i)
            .map(|i| self.size[i])
            .max()
            .unwrap_or(0)
    }
}
