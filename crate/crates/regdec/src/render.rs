//! Adjacency heatmaps as binary greyscale PGM.

use regdec_core::{LinkData, Partition};

use crate::error::{Error, Result};

pub const MAX_SIDE: usize = 1 << 14;
pub const LINK: u8 = 0;
pub const NON_LINK: u8 = 255;
pub const MISSING: u8 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heatmap {
    pub side: usize,
    /// Original node id of each row (and column).
    pub order: Vec<usize>,
    pub pixels: Vec<u8>,
}

impl Heatmap {
    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.side + col]
    }

    pub fn to_pgm(&self, comments: &[String]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() + 64);
        out.extend_from_slice(b"P5\n");
        for c in comments {
            out.extend_from_slice(format!("# {c}\n").as_bytes());
        }
        out.extend_from_slice(format!("{} {}\n255\n", self.side, self.side).as_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Nodes sorted by block, then by id. Beyond `max_side` nodes every
/// `ceil(n / max_side)`-th node of that order is kept.
pub fn render<G: LinkData + ?Sized>(
    graph: &G,
    partition: &Partition,
    max_side: usize,
) -> Result<Heatmap> {
    let n = graph.node_count();
    if partition.n() != n {
        return Err(Error::Usage(format!(
            "labels cover {} nodes, graph has {n}",
            partition.n()
        )));
    }
    if max_side == 0 {
        return Err(Error::Usage("image side must be positive".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (partition.label(v), v));
    let stride = n.div_ceil(max_side).max(1);
    let order: Vec<usize> = order.into_iter().step_by(stride).collect();

    let side = order.len();
    let links = graph.links();
    let observed = graph.observed();
    let mut pixels = vec![NON_LINK; side * side];
    for (r, &u) in order.iter().enumerate() {
        for (c, &v) in order.iter().enumerate() {
            pixels[r * side + c] = if observed.is_some_and(|b| !b.get(u, v)) {
                MISSING
            } else if links.get(u, v) {
                LINK
            } else {
                NON_LINK
            };
        }
    }
    Ok(Heatmap {
        side,
        order,
        pixels,
    })
}

/// Number of diagonal blocks of a sorted clique-union image: consecutive rows
/// `r` and `r + 1` are in the same block exactly when they are linked.
pub fn diagonal_runs(image: &Heatmap) -> usize {
    if image.side == 0 {
        return 0;
    }
    1 + (0..image.side - 1)
        .filter(|&r| image.pixel(r, r + 1) != LINK)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use regdec_core::{Graph, MaskedGraph};

    fn two_k4() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    edges.push((base + u, base + v));
                }
            }
        }
        Graph::from_edges(8, edges).unwrap()
    }

    #[test]
    fn planted_labels_give_two_black_squares() {
        let img = render(
            &two_k4(),
            &Partition::new(2, vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap(),
            MAX_SIDE,
        )
        .unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let same = r / 4 == c / 4 && r != c;
                assert_eq!(
                    img.pixel(r, c),
                    if same { LINK } else { NON_LINK },
                    "({r},{c})"
                );
            }
        }
        assert_eq!(diagonal_runs(&img), 2);
        let pgm = img.to_pgm(&["m".into()]);
        assert!(pgm.starts_with(b"P5\n# m\n8 8\n255\n"));
        assert_eq!(pgm.len(), b"P5\n# m\n8 8\n255\n".len() + 64);
    }

    #[test]
    fn interleaved_labels_change_the_layout() {
        let g = two_k4();
        let sorted = render(
            &g,
            &Partition::new(2, vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap(),
            MAX_SIDE,
        )
        .unwrap();
        let mixed = render(
            &g,
            &Partition::new(2, vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap(),
            MAX_SIDE,
        )
        .unwrap();
        assert_ne!(sorted.pixels, mixed.pixels);
        assert_eq!(mixed.order, vec![0, 2, 4, 6, 1, 3, 5, 7]);
    }

    #[test]
    fn missing_pairs_are_grey() {
        let m =
            MaskedGraph::from_ternary(&[vec![-1, 1, -1], vec![1, -1, 0], vec![-1, 0, -1]]).unwrap();
        let img = render(&m, &Partition::single_block(3), MAX_SIDE).unwrap();
        assert_eq!(
            img.pixels,
            vec![MISSING, LINK, MISSING, LINK, MISSING, NON_LINK, MISSING, NON_LINK, MISSING]
        );
    }

    #[test]
    fn large_graphs_are_subsampled() {
        let g = Graph::edgeless(10);
        let img = render(&g, &Partition::single_block(10), 4).unwrap();
        assert_eq!(img.order, vec![0, 3, 6, 9]);
        assert!(render(&g, &Partition::single_block(9), 4).is_err());
    }
}
