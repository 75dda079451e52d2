//! Finite orders by exhaustion: enumeration of all labeled posets,
//! interval representations by backtracking over endpoint arrangements, and
//! minimax isotonic fits by dynamic programming or branch and bound.

use std::collections::HashMap;

/// Strict order on `0..n` as a relation matrix, `less[i][j]` meaning i < j.
pub type Relation = Vec<Vec<bool>>;

/// All strict partial orders on `n` labeled elements (1, 1, 3, 19, 219,
/// 4231, 130023 for n = 0..6).
///
/// Built by adding element `n-1` to each order on `n-1` elements with a
/// down-set D and an up-set U that are disjoint and satisfy d < u for all
/// d in D, u in U.
pub fn enumerate_posets(n: usize) -> Vec<Relation> {
    let mut level: Vec<Relation> = vec![vec![]];
    for k in 0..n {
        let mut next = vec![];
        for p in &level {
            for down in 0u32..1 << k {
                if !is_down_closed(p, down, k) {
                    continue;
                }
                for up in 0u32..1 << k {
                    if up & down != 0 || !is_up_closed(p, up, k) {
                        continue;
                    }
                    let compatible = (0..k).all(|d| down >> d & 1 == 0 || (0..k).all(|u| up >> u & 1 == 0 || p[d][u]));
                    if !compatible {
                        continue;
                    }
                    let mut q: Relation = p
                        .iter()
                        .map(|row| {
                            let mut r = row.clone();
                            r.push(false);
                            r
                        })
                        .collect();
                    let mut last = vec![false; k + 1];
                    for i in 0..k {
                        q[i][k] = down >> i & 1 == 1;
                        last[i] = up >> i & 1 == 1;
                    }
                    q.push(last);
                    next.push(q);
                }
            }
        }
        level = next;
    }
    level
}

fn is_down_closed(p: &Relation, set: u32, k: usize) -> bool {
    (0..k).all(|x| set >> x & 1 == 0 || (0..k).all(|y| !p[y][x] || set >> y & 1 == 1))
}

fn is_up_closed(p: &Relation, set: u32, k: usize) -> bool {
    (0..k).all(|x| set >> x & 1 == 0 || (0..k).all(|y| !p[x][y] || set >> y & 1 == 1))
}

/// Interval endpoints `(l, r)`, integers in `0..2n`, with `i < j` iff
/// `r_i < l_j`, found by inserting each element's two endpoints into an
/// arrangement of distinct endpoints (every interval order has such a
/// representation). `None` when no arrangement exists.
pub fn interval_representation(less: &Relation) -> Option<Vec<(usize, usize)>> {
    let n = less.len();
    // sequence of (element, is_right) endpoint events
    let mut seq: Vec<(usize, bool)> = Vec::with_capacity(2 * n);
    if !place(less, 0, &mut seq) {
        return None;
    }
    let mut ends = vec![(0, 0); n];
    for (pos, &(e, right)) in seq.iter().enumerate() {
        if right {
            ends[e].1 = pos;
        } else {
            ends[e].0 = pos;
        }
    }
    Some(ends)
}

fn place(less: &Relation, i: usize, seq: &mut Vec<(usize, bool)>) -> bool {
    let n = less.len();
    if i == n {
        return true;
    }
    let len = seq.len();
    for p in 0..=len {
        for q in p..=len {
            // l_i goes before old index p, r_i before old index q
            let mut cand = Vec::with_capacity(len + 2);
            cand.extend_from_slice(&seq[..p]);
            cand.push((i, false));
            cand.extend_from_slice(&seq[p..q]);
            cand.push((i, true));
            cand.extend_from_slice(&seq[q..]);
            if consistent(less, i, &cand) {
                let saved = std::mem::replace(seq, cand);
                if place(less, i + 1, seq) {
                    return true;
                }
                *seq = saved;
            }
        }
    }
    false
}

fn consistent(less: &Relation, i: usize, seq: &[(usize, bool)]) -> bool {
    let pos = |e: usize, right: bool| seq.iter().position(|&s| s == (e, right)).unwrap();
    let (li, ri) = (pos(i, false), pos(i, true));
    (0..i).all(|j| {
        let (lj, rj) = (pos(j, false), pos(j, true));
        (less[i][j] == (ri < lj)) && (less[j][i] == (rj < li))
    })
}

/// Canonical form of a relation up to relabeling: the smallest bit encoding
/// over all permutations that sort elements by (down-degree, up-degree).
pub fn canonical_key(less: &Relation) -> u64 {
    let n = less.len();
    let sig = |i: usize| {
        let down = (0..n).filter(|&j| less[j][i]).count();
        let up = (0..n).filter(|&j| less[i][j]).count();
        (down, up)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| sig(i));
    let mut blocks: Vec<Vec<usize>> = vec![];
    for &i in &order {
        match blocks.last_mut() {
            Some(b) if sig(b[0]) == sig(i) => b.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(n);
    permute_blocks(&blocks, 0, &mut perm, &mut |perm| {
        let mut key = n as u64;
        for &a in perm {
            for &b in perm {
                key = key << 1 | less[a][b] as u64;
            }
        }
        best = best.min(key);
    });
    best
}

fn permute_blocks(blocks: &[Vec<usize>], k: usize, perm: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if k == blocks.len() {
        f(perm);
        return;
    }
    let mut b = blocks[k].clone();
    let len = b.len();
    heap_permutations(&mut b, len, &mut |p| {
        let base = perm.len();
        perm.extend_from_slice(p);
        permute_blocks(blocks, k + 1, perm, f);
        perm.truncate(base);
    });
}

fn heap_permutations(a: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(a);
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, f);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        a.swap(j, k - 1);
    }
}

/// Interval-representation existence with results shared across
/// isomorphic relations.
#[derive(Default)]
pub struct RepresentabilityCache {
    seen: HashMap<u64, bool>,
}

impl RepresentabilityCache {
    pub fn representable(&mut self, less: &Relation) -> bool {
        let key = canonical_key(less);
        *self
            .seen
            .entry(key)
            .or_insert_with(|| interval_representation(less).is_some())
    }

    pub fn classes(&self) -> usize {
        self.seen.len()
    }
}

/// Values `k * step` in `[lo, hi]`.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let a = (lo / step).ceil() as i64;
    let b = (hi / step).floor() as i64;
    (a..=b).map(|k| k as f64 * step).collect()
}

/// Smallest `max_i |g_i - s_i|` over nondecreasing `s` with values on the
/// grid of spacing `step`, by dynamic programming along the chain.
pub fn minimax_isotonic_chain(g: &[f64], step: f64) -> f64 {
    let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vals = grid(lo - step, hi + step, step);
    let mut dp: Vec<f64> = vals.iter().map(|v| (g[0] - v).abs()).collect();
    for &gi in &g[1..] {
        let mut run = f64::INFINITY;
        dp = vals
            .iter()
            .zip(&dp)
            .map(|(v, &prev)| {
                run = run.min(prev);
                run.max((gi - v).abs())
            })
            .collect();
    }
    dp.into_iter().fold(f64::INFINITY, f64::min)
}

/// Smallest `max_i |g_i - s_i|` over grid-valued `s` with `s_a <= s_b` for
/// every pair in `edges`, by exhaustive branch and bound over elements in
/// the given (topological) order.
pub fn minimax_isotonic_dag(g: &[f64], edges: &[(usize, usize)], topo: &[usize], step: f64) -> f64 {
    let n = g.len();
    let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vals = grid(lo - step, hi + step, step);
    // Every element above i must take a value >= s_i, so choosing v at i
    // costs at least v - min g over that up-set.
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let up_min: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| reach[i][j])
                .map(|j| g[j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut assign: Vec<Option<f64>> = vec![None; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        cur: f64,
        g: &[f64],
        edges: &[(usize, usize)],
        topo: &[usize],
        vals: &[f64],
        up_min: &[f64],
        assign: &mut Vec<Option<f64>>,
        best: &mut f64,
    ) {
        if cur >= *best {
            return;
        }
        if k == topo.len() {
            *best = cur;
            return;
        }
        let i = topo[k];
        let floor = edges
            .iter()
            .filter(|e| e.1 == i)
            .filter_map(|e| assign[e.0])
            .fold(f64::NEG_INFINITY, f64::max);
        // Nearest values first, so the first leaf is already a good bound and
        // the scan can stop as soon as the deviation reaches it.
        let mut cands: Vec<f64> = vals.iter().copied().filter(|&v| v >= floor).collect();
        cands.sort_by(|a, b| (g[i] - a).abs().total_cmp(&(g[i] - b).abs()));
        for v in cands {
            let dev = (g[i] - v).abs();
            if dev.max(cur) >= *best {
                break;
            }
            let bound = cur.max(dev).max(v - up_min[i]);
            if bound >= *best {
                continue;
            }
            assign[i] = Some(v);
            rec(k + 1, bound, g, edges, topo, vals, up_min, assign, best);
            assign[i] = None;
        }
    }
    rec(0, 0.0, g, edges, topo, &vals, &up_min, &mut assign, &mut best);
    best
}

/// Whether grid values `s_i in [lo_i, hi_i]` exist with `s_a <= s_b` for
/// every pair in `edges`; exhaustive over the grid of spacing `step`
/// (exact when all interval endpoints lie on that grid).
pub fn monotone_selection_exists(lo: &[f64], hi: &[f64], edges: &[(usize, usize)], step: f64) -> bool {
    let n = lo.len();
    let choices: Vec<Vec<f64>> = (0..n).map(|i| grid(lo[i], hi[i], step)).collect();
    let mut s = vec![0.0; n];
    fn rec(k: usize, choices: &[Vec<f64>], edges: &[(usize, usize)], s: &mut Vec<f64>) -> bool {
        if k == choices.len() {
            return edges.iter().all(|&(a, b)| s[a] <= s[b]);
        }
        for &v in &choices[k] {
            s[k] = v;
            let ok = edges.iter().filter(|e| e.0.max(e.1) == k).all(|&(a, b)| s[a] <= s[b]);
            if ok && rec(k + 1, choices, edges, s) {
                return true;
            }
        }
        false
    }
    rec(0, &choices, edges, &mut s)
}
