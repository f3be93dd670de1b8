//! Static kd-tree for nearest-point queries with lowest-index tie breaking.

use crate::geometry::{Point, Rect};

const LEAF: usize = 8;

#[derive(Clone, Debug)]
struct Node {
    bbox: Rect,
    /// Range into `perm`.
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Point>,
    perm: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: Vec<Point>) -> Self {
        let mut perm: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        if !points.is_empty() {
            build(&points, &mut perm, 0, points.len(), &mut nodes);
        }
        Self { points, perm, nodes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Nearest point to `x` and its distance.
    pub fn nearest(&self, x: &Point) -> Option<(usize, f64)> {
        self.search(|b| b.distance(x), |p| p.dist(x))
    }

    /// Point nearest to the closed box `r`, with its distance.
    pub fn nearest_to_rect(&self, r: &Rect) -> Option<(usize, f64)> {
        self.search(|b| b.distance_to_rect(r), |p| r.distance(p))
    }

    fn search(&self, bound: impl Fn(&Rect) -> f64, dist: impl Fn(&Point) -> f64) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = [0usize; 128];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let id = stack[top];
            let node = &self.nodes[id];
            if bound(&node.bbox) > best.1 {
                continue;
            }
            match node.children {
                None => {
                    for &i in &self.perm[node.start..node.end] {
                        let d = dist(&self.points[i]);
                        if d < best.1 || (d == best.1 && i < best.0) {
                            best = (i, d);
                        }
                    }
                }
                Some((a, b)) => {
                    let (da, db) = (bound(&self.nodes[a].bbox), bound(&self.nodes[b].bbox));
                    let (first, second) = if da <= db { (a, b) } else { (b, a) };
                    stack[top] = second;
                    stack[top + 1] = first;
                    top += 2;
                }
            }
        }
        Some(best)
    }
}

fn build(points: &[Point], perm: &mut [usize], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let dim = points[0].dim();
    let mut lo = points[perm[start]];
    let mut hi = lo;
    for &i in &perm[start..end] {
        for a in 0..dim {
            lo[a] = lo[a].min(points[i][a]);
            hi[a] = hi[a].max(points[i][a]);
        }
    }
    let id = nodes.len();
    nodes.push(Node { bbox: Rect { lo, hi }, start, end, children: None });
    if end - start > LEAF {
        let axis = (0..dim).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
        let mid = (start + end) / 2;
        perm[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            points[i][axis].total_cmp(&points[j][axis]).then(i.cmp(&j))
        });
        let a = build(points, perm, start, mid, nodes);
        let b = build(points, perm, mid, end, nodes);
        nodes[id].children = Some((a, b));
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..500).map(|_| Point::from_f64(&[rng.gen(), rng.gen(), rng.gen()])).collect();
        let tree = KdTree::new(pts.clone());
        for _ in 0..200 {
            let x = Point::from_f64(&[rng.gen(), rng.gen(), rng.gen()]);
            let (i, d) = tree.nearest(&x).unwrap();
            let bf = pts.iter().map(|p| p.dist(&x)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, bf);
            assert_eq!(pts[i].dist(&x), d);
            let r = Rect::new(x, x + Point::from_f64(&[0.05, 0.1, 0.02])).unwrap();
            let (_, d) = tree.nearest_to_rect(&r).unwrap();
            let bf = pts.iter().map(|p| r.distance(p)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, bf);
        }
    }

    #[test]
    fn ties_prefer_lowest_index() {
        let pts = vec![
            Point::from_f64(&[1.0, 0.0]),
            Point::from_f64(&[-1.0, 0.0]),
            Point::from_f64(&[0.0, 1.0]),
            Point::from_f64(&[1.0, 0.0]),
        ];
        let tree = KdTree::new(pts);
        assert_eq!(tree.nearest(&Point::from_f64(&[0.0, 0.0])).unwrap().0, 0);
        assert_eq!(tree.nearest(&Point::from_f64(&[1.0, 0.0])).unwrap(), (0, 0.0));
        assert!(KdTree::new(vec![]).nearest(&Point::from_f64(&[0.0, 0.0])).is_none());
    }
}
