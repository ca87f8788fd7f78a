//! Two-pass connected-component labeling with union-find, 8-connectivity
//! (the all-ones 3x3 structuring element).

use super::{BinaryImage, LabelImage};

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is background
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// The smaller root survives.
    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Labels 8-connected foreground components `1..=k`, numbered in raster
/// order of each component's first pixel.
pub fn label(b: &BinaryImage) -> LabelImage {
    let (w, h) = (b.width() as usize, b.height() as usize);
    let mut prov = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            if !b.pixels()[y * w + x] {
                continue;
            }
            // already-visited neighbors: W, NW, N, NE
            let mut current = 0u32;
            let mut neighbors = [None; 4];
            if x > 0 {
                neighbors[0] = Some(y * w + x - 1);
            }
            if y > 0 {
                let up = (y - 1) * w;
                if x > 0 {
                    neighbors[1] = Some(up + x - 1);
                }
                neighbors[2] = Some(up + x);
                if x + 1 < w {
                    neighbors[3] = Some(up + x + 1);
                }
            }
            for n in neighbors.into_iter().flatten() {
                let l = prov[n];
                if l == 0 {
                    continue;
                }
                current = if current == 0 {
                    l
                } else {
                    sets.union(current, l)
                };
            }
            if current == 0 {
                current = sets.make();
            }
            prov[y * w + x] = current;
        }
    }

    let mut remap = vec![0u32; sets.parent.len()];
    let mut next = 0u32;
    for l in prov.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = sets.find(*l);
        if remap[root as usize] == 0 {
            next += 1;
            remap[root as usize] = next;
        }
        *l = remap[root as usize];
    }

    LabelImage {
        width: b.width(),
        height: b.height(),
        labels: prov,
        region_count: next,
    }
}
