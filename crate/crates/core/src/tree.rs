//! Oriented binary trees stored as preorder arenas, with their canonical
//! bit encodings and the extension / compression transforms.
//!
//! A [`TreeShape`] keeps its nodes in preorder: the root is node 0, a left
//! child (when present) immediately follows its parent, and every subtree
//! occupies a contiguous index range. All traversals below are loops over
//! that array, so arbitrarily deep trees never touch the call stack.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{FringeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    left: Option<u32>,
    right: Option<u32>,
}

impl Node {
    fn outdegree(&self) -> u8 {
        self.left.is_some() as u8 + self.right.is_some() as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A non-empty oriented binary tree (full or general).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeShape {
    nodes: Vec<Node>,
}

impl TreeShape {
    /// The single-node tree.
    pub fn leaf() -> Self {
        TreeShape {
            nodes: vec![Node {
                left: None,
                right: None,
            }],
        }
    }

    /// A new root with the given (optional) left and right subtrees.
    pub fn join(left: Option<&TreeShape>, right: Option<&TreeShape>) -> Self {
        let total = 1 + left.map_or(0, |t| t.len()) + right.map_or(0, |t| t.len());
        let mut nodes = Vec::with_capacity(total);
        nodes.push(Node {
            left: None,
            right: None,
        });
        if let Some(l) = left {
            nodes[0].left = Some(1);
            append_shifted(&mut nodes, l);
        }
        if let Some(r) = right {
            nodes[0].right = Some(nodes.len() as u32);
            append_shifted(&mut nodes, r);
        }
        TreeShape { nodes }
    }

    /// The cherry `(*,*)`.
    pub fn cherry() -> Self {
        let leaf = TreeShape::leaf();
        TreeShape::join(Some(&leaf), Some(&leaf))
    }

    /// Builds a tree top-down from an abstract root task.
    ///
    /// `expand` maps a task to the tasks of its left and right children
    /// (`None` meaning the child is absent). Tasks are processed with an
    /// explicit stack, left before right, so nodes come out in preorder.
    pub fn build<T, F>(root: T, mut expand: F) -> Self
    where
        F: FnMut(T) -> (Option<T>, Option<T>),
    {
        let mut nodes: Vec<Node> = Vec::new();
        let mut stack: Vec<(T, Option<(u32, Side)>)> = vec![(root, None)];
        while let Some((task, parent)) = stack.pop() {
            let idx = nodes.len() as u32;
            nodes.push(Node {
                left: None,
                right: None,
            });
            if let Some((p, side)) = parent {
                match side {
                    Side::Left => nodes[p as usize].left = Some(idx),
                    Side::Right => nodes[p as usize].right = Some(idx),
                }
            }
            let (l, r) = expand(task);
            if let Some(r) = r {
                stack.push((r, Some((idx, Side::Right))));
            }
            if let Some(l) = l {
                stack.push((l, Some((idx, Side::Left))));
            }
        }
        TreeShape { nodes }
    }

    /// Number of nodes `|T|`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; trees are non-empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn leafcount(&self) -> usize {
        self.nodes.iter().filter(|n| n.outdegree() == 0).count()
    }

    pub fn internal_count(&self) -> usize {
        self.len() - self.leafcount()
    }

    pub fn is_leaf(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Every node has outdegree 0 or 2.
    pub fn is_full(&self) -> bool {
        self.nodes.iter().all(|n| n.outdegree() != 1)
    }

    pub fn ensure_full(&self) -> Result<()> {
        if self.is_full() {
            Ok(())
        } else {
            Err(FringeError::NotFull)
        }
    }

    /// Children of node `i` as preorder indices.
    pub fn children(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let n = &self.nodes[i];
        (n.left.map(|x| x as usize), n.right.map(|x| x as usize))
    }

    pub fn outdegree(&self, i: usize) -> u8 {
        self.nodes[i].outdegree()
    }

    /// Left and right subtrees of the root.
    pub fn root_subtrees(&self) -> (Option<TreeShape>, Option<TreeShape>) {
        let (l, r) = self.children(0);
        (l.map(|i| self.subtree(i)), r.map(|i| self.subtree(i)))
    }

    /// Subtree sizes for every node.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let mut size = vec![1u32; self.len()];
        for i in (0..self.len()).rev() {
            let n = self.nodes[i];
            if let Some(l) = n.left {
                size[i] += size[l as usize];
            }
            if let Some(r) = n.right {
                size[i] += size[r as usize];
            }
        }
        size
    }

    /// Leaf counts of the fringe tree at every node.
    pub fn subtree_leafcounts(&self) -> Vec<u32> {
        let mut leaves = vec![0u32; self.len()];
        for i in (0..self.len()).rev() {
            let n = self.nodes[i];
            if n.outdegree() == 0 {
                leaves[i] = 1;
            } else {
                leaves[i] = n.left.map_or(0, |l| leaves[l as usize])
                    + n.right.map_or(0, |r| leaves[r as usize]);
            }
        }
        leaves
    }

    /// The fringe tree rooted at node `i`.
    pub fn subtree(&self, i: usize) -> TreeShape {
        let end = i + self.subtree_size(i);
        let off = i as u32;
        let nodes = self.nodes[i..end]
            .iter()
            .map(|n| Node {
                left: n.left.map(|x| x - off),
                right: n.right.map(|x| x - off),
            })
            .collect();
        TreeShape { nodes }
    }

    fn subtree_size(&self, i: usize) -> usize {
        // The subtree of `i` ends where the nearest following node that is
        // not a descendant starts; walk down the rightmost-available spine.
        let mut j = i;
        loop {
            let n = self.nodes[j];
            match (n.right, n.left) {
                (Some(r), _) => j = r as usize,
                (None, Some(l)) => j = l as usize,
                (None, None) => return j + 1 - i,
            }
        }
    }

    /// The mirror image (left and right swapped at every node).
    pub fn mirror(&self) -> TreeShape {
        TreeShape::build(0usize, |i| {
            let (l, r) = self.children(i);
            (r, l)
        })
    }

    /// Extension: attach a new leaf at every vacant child slot.
    pub fn extend(&self) -> TreeShape {
        #[derive(Clone, Copy)]
        enum Task {
            Orig(usize),
            NewLeaf,
        }
        TreeShape::build(Task::Orig(0), |task| match task {
            Task::NewLeaf => (None, None),
            Task::Orig(i) => {
                let (l, r) = self.children(i);
                (
                    Some(l.map_or(Task::NewLeaf, Task::Orig)),
                    Some(r.map_or(Task::NewLeaf, Task::Orig)),
                )
            }
        })
    }

    /// Inverse of [`extend`](Self::extend): delete every leaf.
    /// Returns `None` for the single leaf (the result would be empty).
    pub fn delete_leaves(&self) -> Option<TreeShape> {
        if self.is_leaf() {
            return None;
        }
        let internal = |c: Option<usize>| c.filter(|&j| self.outdegree(j) > 0);
        Some(TreeShape::build(0usize, |i| {
            let (l, r) = self.children(i);
            (internal(l), internal(r))
        }))
    }

    /// Compression: delete every node of outdegree 1, splicing its only
    /// child into its place. The result is full and has the same leaves.
    pub fn compress(&self) -> TreeShape {
        let rep = self.compression_representatives();
        TreeShape::build(rep[0] as usize, |i| {
            let (l, r) = self.children(i);
            match (l, r) {
                (Some(l), Some(r)) => (Some(rep[l] as usize), Some(rep[r] as usize)),
                _ => (None, None),
            }
        })
    }

    /// For every node, the first node of outdegree 0 or 2 reached by
    /// following unary links downward.
    pub(crate) fn compression_representatives(&self) -> Vec<u32> {
        let mut rep: Vec<u32> = (0..self.len() as u32).collect();
        for i in (0..self.len()).rev() {
            let n = self.nodes[i];
            match (n.left, n.right) {
                (Some(c), None) | (None, Some(c)) => rep[i] = rep[c as usize],
                _ => {}
            }
        }
        rep
    }

    /// Preorder code of a full tree (internal = 1, leaf = 0).
    pub fn code(&self) -> Result<ShapeCode> {
        self.ensure_full()?;
        Ok(self.code_of_subtree(0, self.len()))
    }

    /// Code of the full fringe tree occupying `start..start + size`.
    pub(crate) fn code_of_subtree(&self, start: usize, size: usize) -> ShapeCode {
        ShapeCode::from_bits(
            self.nodes[start..start + size]
                .iter()
                .map(|n| n.outdegree() != 0),
        )
    }

    /// Canonical code of a general binary tree: the code of its extension.
    pub fn extended_code(&self) -> ShapeCode {
        let mut code = ShapeCode::new();
        let mut stack = vec![Some(0usize)];
        while let Some(item) = stack.pop() {
            match item {
                None => code.push(false),
                Some(i) => {
                    code.push(true);
                    let (l, r) = self.children(i);
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        code
    }

    /// Orientation-free code: each node's children are ordered by
    /// [`ShapeCode`]'s total order (shorter first, then lexicographic).
    pub fn cladogram_code(&self) -> Result<ShapeCode> {
        self.ensure_full()?;
        let mut codes: Vec<Option<ShapeCode>> = vec![None; self.len()];
        for i in (0..self.len()).rev() {
            let code = match self.children(i) {
                (Some(l), Some(r)) => {
                    let a = codes[l].take().expect("child code");
                    let b = codes[r].take().expect("child code");
                    let (first, second) = if a <= b { (a, b) } else { (b, a) };
                    let mut c = ShapeCode::with_capacity(1 + first.len() + second.len());
                    c.push(true);
                    c.extend_from(&first);
                    c.extend_from(&second);
                    c
                }
                _ => ShapeCode::from_bits(core::iter::once(false)),
            };
            codes[i] = Some(code);
        }
        Ok(codes[0].take().expect("root code"))
    }

    /// Left and right external path lengths.
    pub fn path_lengths(&self) -> (u64, u64) {
        let mut ld = vec![0u32; self.len()];
        let mut rd = vec![0u32; self.len()];
        let (mut lpl, mut rpl) = (0u64, 0u64);
        for i in 0..self.len() {
            let n = self.nodes[i];
            if let Some(l) = n.left {
                ld[l as usize] = ld[i] + 1;
                rd[l as usize] = rd[i];
            }
            if let Some(r) = n.right {
                ld[r as usize] = ld[i];
                rd[r as usize] = rd[i] + 1;
            }
            if n.outdegree() == 0 {
                lpl += ld[i] as u64;
                rpl += rd[i] as u64;
            }
        }
        (lpl, rpl)
    }

    /// Height (edges on the longest root-to-leaf path).
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        let mut h = 0;
        for i in 0..self.len() {
            let n = self.nodes[i];
            for c in [n.left, n.right].into_iter().flatten() {
                depth[c as usize] = depth[i] + 1;
                h = h.max(depth[i] + 1);
            }
        }
        h
    }

    /// Parses `S ::= "*" | "(" C "," C ")"` where a child `C` is either `S`
    /// or `_` (absent child). Full trees never need `_`. Whitespace is
    /// ignored. `(_,_)` is rejected; a leaf is written `*`.
    pub fn parse(text: &str) -> Result<TreeShape> {
        struct Frame {
            idx: u32,
            side: Side,
            left_done: bool,
            right_done: bool,
        }
        let err = |pos: usize, msg: &str| FringeError::Parse {
            pos,
            msg: String::from(msg),
        };
        let mut nodes: Vec<Node> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut done = false;

        for (pos, ch) in text.char_indices() {
            if ch.is_whitespace() {
                continue;
            }
            if done {
                return Err(err(pos, "trailing input"));
            }
            if ch == ',' {
                match stack.last_mut() {
                    Some(top) if top.side == Side::Left && top.left_done => top.side = Side::Right,
                    _ => return Err(err(pos, "unexpected ','")),
                }
                continue;
            }
            if ch == ')' {
                let top = stack.pop().ok_or_else(|| err(pos, "unbalanced ')'"))?;
                if top.side != Side::Right || !top.right_done {
                    return Err(err(pos, "incomplete node"));
                }
                if nodes[top.idx as usize].outdegree() == 0 {
                    return Err(err(pos, "node with two absent children; write '*'"));
                }
                done = stack.is_empty();
                continue;
            }
            let child = match ch {
                '*' | '(' => {
                    nodes.push(Node {
                        left: None,
                        right: None,
                    });
                    Some(nodes.len() as u32 - 1)
                }
                '_' => None,
                _ => return Err(err(pos, "unexpected character")),
            };
            match stack.last_mut() {
                None if child.is_none() => return Err(err(pos, "'_' is only allowed as a child")),
                None => {}
                Some(top) => match top.side {
                    Side::Left if top.left_done => return Err(err(pos, "expected ','")),
                    Side::Left => {
                        nodes[top.idx as usize].left = child;
                        top.left_done = true;
                    }
                    Side::Right if top.right_done => return Err(err(pos, "expected ')'")),
                    Side::Right => {
                        nodes[top.idx as usize].right = child;
                        top.right_done = true;
                    }
                },
            }
            match (ch, child) {
                ('(', Some(idx)) => stack.push(Frame {
                    idx,
                    side: Side::Left,
                    left_done: false,
                    right_done: false,
                }),
                ('*', _) if stack.is_empty() => done = true,
                _ => {}
            }
        }
        if !done {
            return Err(err(text.len(), "unexpected end of input"));
        }
        Ok(TreeShape { nodes })
    }

    /// Inverse of [`parse`](Self::parse).
    pub fn format(&self) -> String {
        enum Item {
            Node(usize),
            Absent,
            Text(&'static str),
        }
        let mut out = String::with_capacity(self.len() * 3);
        let mut stack = vec![Item::Node(0)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Text(s) => out.push_str(s),
                Item::Absent => out.push('_'),
                Item::Node(i) => {
                    let (l, r) = self.children(i);
                    if l.is_none() && r.is_none() {
                        out.push('*');
                        continue;
                    }
                    out.push('(');
                    stack.push(Item::Text(")"));
                    stack.push(r.map_or(Item::Absent, Item::Node));
                    stack.push(Item::Text(","));
                    stack.push(l.map_or(Item::Absent, Item::Node));
                }
            }
        }
        out
    }

    /// All full binary trees with `m` leaves, in a fixed order.
    pub fn all_full(m: usize) -> Vec<TreeShape> {
        let mut table: Vec<Vec<TreeShape>> = vec![Vec::new(), vec![TreeShape::leaf()]];
        for k in 2..=m {
            let mut shapes = Vec::new();
            for i in 1..k {
                for l in &table[i] {
                    for r in &table[k - i] {
                        shapes.push(TreeShape::join(Some(l), Some(r)));
                    }
                }
            }
            table.push(shapes);
        }
        if m == 0 {
            return Vec::new();
        }
        table.swap_remove(m)
    }

    /// All binary trees with `n` nodes, in a fixed order.
    pub fn all_binary(n: usize) -> Vec<TreeShape> {
        // table[k] holds trees of size k; index 0 stands for the empty tree.
        let mut table: Vec<Vec<Option<TreeShape>>> = vec![vec![None]];
        for k in 1..=n {
            let mut shapes = Vec::new();
            for i in 0..k {
                for l in &table[i] {
                    for r in &table[k - 1 - i] {
                        shapes.push(Some(TreeShape::join(l.as_ref(), r.as_ref())));
                    }
                }
            }
            table.push(shapes);
        }
        if n == 0 {
            return Vec::new();
        }
        table.swap_remove(n).into_iter().flatten().collect()
    }
}

fn append_shifted(nodes: &mut Vec<Node>, t: &TreeShape) {
    let off = nodes.len() as u32;
    nodes.extend(t.nodes.iter().map(|n| Node {
        left: n.left.map(|x| x + off),
        right: n.right.map(|x| x + off),
    }));
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeShape({})", self.format())
    }
}

impl core::str::FromStr for TreeShape {
    type Err = FringeError;

    fn from_str(s: &str) -> Result<Self> {
        TreeShape::parse(s)
    }
}

/// Preorder bit code of a full binary tree: internal node = 1, leaf = 0.
///
/// Ordered shorter-first, then lexicographically on the bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ShapeCode {
    len: u32,
    // MSB-first packing; unused low bits of the last word are zero.
    words: Vec<u64>,
}

impl ShapeCode {
    pub fn new() -> Self {
        Self::default()
    }

    fn with_capacity(bits: usize) -> Self {
        ShapeCode {
            len: 0,
            words: Vec::with_capacity(bits.div_ceil(64)),
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut c = ShapeCode::new();
        for b in bits {
            c.push(b);
        }
        c
    }

    /// The code of a single leaf, `0`.
    pub fn leaf() -> Self {
        Self::from_bits([false])
    }

    pub fn push(&mut self, bit: bool) {
        let pos = self.len as usize;
        if pos.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[pos / 64] |= 1u64 << (63 - pos % 64);
        }
        self.len += 1;
    }

    fn extend_from(&mut self, other: &ShapeCode) {
        let shift = self.len as usize % 64;
        if shift == 0 {
            self.words.extend_from_slice(&other.words);
        } else {
            for &w in &other.words {
                *self.words.last_mut().expect("partial word") |= w >> shift;
                self.words.push(w << (64 - shift));
            }
        }
        self.len += other.len;
        self.words.truncate((self.len as usize).div_ceil(64));
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }

    /// Number of zeros, i.e. leaves of the encoded tree.
    pub fn leafcount(&self) -> usize {
        self.len() - self.words.iter().map(|w| w.count_ones() as usize).sum::<usize>()
    }

    /// Decodes a preorder code back into a full tree.
    pub fn decode(&self) -> Result<TreeShape> {
        let mut pos = 0usize;
        let mut bad = false;
        let tree = TreeShape::build((), |()| {
            if pos >= self.len() {
                bad = true;
                return (None, None);
            }
            let b = self.bit(pos);
            pos += 1;
            if b {
                (Some(()), Some(()))
            } else {
                (None, None)
            }
        });
        if bad || pos != self.len() {
            return Err(FringeError::Parse {
                pos,
                msg: String::from("not a valid preorder code"),
            });
        }
        Ok(tree)
    }

    /// Parses a `0`/`1` string.
    pub fn parse(text: &str) -> Result<ShapeCode> {
        let mut c = ShapeCode::new();
        for (pos, ch) in text.char_indices() {
            match ch {
                '0' => c.push(false),
                '1' => c.push(true),
                _ => {
                    return Err(FringeError::Parse {
                        pos,
                        msg: String::from("expected '0' or '1'"),
                    })
                }
            }
        }
        c.decode()?;
        Ok(c)
    }
}

impl Ord for ShapeCode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.cmp(&other.words))
    }
}

impl PartialOrd for ShapeCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for ShapeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShapeCode({self})")
    }
}

/// Per-tree statistics used by the trie fringe probability formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeMetrics {
    pub leafcount: u64,
    pub size: u64,
    pub internal_count: u64,
    /// Left external path length.
    pub lpl: u64,
    /// Right external path length.
    pub rpl: u64,
    /// Number of nodes whose fringe tree has `k` leaves, for `2 <= k <= m-1`.
    pub nu: alloc::collections::BTreeMap<u32, u32>,
}

/// Computes [`TreeMetrics`] for a full tree.
pub fn metrics(t: &TreeShape) -> Result<TreeMetrics> {
    t.ensure_full()?;
    let leaves = t.subtree_leafcounts();
    let m = leaves[0];
    let mut nu = alloc::collections::BTreeMap::new();
    for &k in &leaves {
        if k >= 2 && k < m {
            *nu.entry(k).or_insert(0) += 1;
        }
    }
    let (lpl, rpl) = t.path_lengths();
    Ok(TreeMetrics {
        leafcount: m as u64,
        size: t.len() as u64,
        internal_count: t.internal_count() as u64,
        lpl,
        rpl,
        nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn parse_small_shapes() {
        let leaf = t("*");
        assert_eq!(leaf.len(), 1);
        assert_eq!(leaf.leafcount(), 1);

        let t2 = t("(*,*)");
        assert_eq!((t2.len(), t2.leafcount()), (3, 2));

        let t4a = t("(*,(*,(*,*)))");
        assert_eq!(t4a.path_lengths(), (3, 6));
        assert_eq!(t(" ( * , ( *,*) ) ").format(), "(*,(*,*))");
    }

    #[test]
    fn parse_errors_report_position() {
        for (bad, pos) in [
            ("", 0),
            ("(*,*", 4),
            ("(*)", 2),
            ("(*,*))", 5),
            ("x", 0),
            ("(_,_)", 4),
            ("_", 0),
            ("**", 1),
            ("(*,*,*)", 4),
        ] {
            match TreeShape::parse(bad) {
                Err(FringeError::Parse { pos: p, .. }) => assert_eq!(p, pos, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn general_trees_round_trip() {
        for s in ["(*,_)", "(_,(*,_))", "((*,*),_)", "(_,(_,(_,*)))"] {
            assert_eq!(t(s).format(), s);
            assert!(!t(s).is_full());
        }
    }

    #[test]
    fn compress_examples() {
        assert_eq!(t("*").compress(), t("*"));
        // path of three nodes ending in a leaf
        assert_eq!(t("(_,(*,_))").compress(), t("*"));
        // cherry with each edge subdivided once
        assert_eq!(t("((*,_),(_,*))").compress(), t("(*,*)"));
        let g = t("(_,((*,_),(*,(*,*))))");
        let c = g.compress();
        assert!(c.is_full());
        assert_eq!(c.leafcount(), g.leafcount());
        assert_eq!(c, t("(*,(*,(*,*)))"));
    }

    #[test]
    fn extend_examples() {
        assert_eq!(t("*").extend(), t("(*,*)"));
        // root with a left child
        assert_eq!(t("(*,_)").extend(), t("((*,*),*)"));
        assert_eq!(t("(*,*)").extend().len(), 7);
        assert_eq!(t("(*,*)").extend().delete_leaves().unwrap(), t("(*,*)"));
    }

    #[test]
    fn metrics_examples() {
        let m2 = metrics(&t("(*,*)")).unwrap();
        assert_eq!((m2.lpl, m2.rpl), (1, 1));
        assert!(m2.nu.is_empty());

        let m3 = metrics(&t("(*,(*,*))")).unwrap();
        assert_eq!((m3.lpl, m3.rpl), (2, 3));
        assert_eq!(m3.nu.get(&2), Some(&1));

        let m4c = metrics(&t("((*,*),(*,*))")).unwrap();
        assert_eq!((m4c.lpl, m4c.rpl), (4, 4));
        assert_eq!(m4c.nu.get(&2), Some(&2));
        assert_eq!(m4c.nu.len(), 1);

        assert_eq!(metrics(&t("(*,_)")), Err(FringeError::NotFull));
    }

    #[test]
    fn codes_and_cladograms() {
        let t3 = t("(*,(*,*))");
        assert_eq!(t3.code().unwrap().to_string(), "10100");
        assert_eq!(t3.code().unwrap().decode().unwrap(), t3);
        assert_eq!(t3.cladogram_code().unwrap(), t3.mirror().cladogram_code().unwrap());
        let t4c = t("((*,*),(*,*))");
        assert_eq!(t4c.cladogram_code().unwrap(), t4c.code().unwrap());

        let mut three: Vec<_> = TreeShape::all_full(3)
            .iter()
            .map(|s| s.cladogram_code().unwrap())
            .collect();
        three.sort();
        three.dedup();
        assert_eq!(three.len(), 1);
        let mut four: Vec<_> = TreeShape::all_full(4)
            .iter()
            .map(|s| s.cladogram_code().unwrap())
            .collect();
        assert_eq!(four.len(), 5);
        four.sort();
        four.dedup();
        assert_eq!(four.len(), 2);
    }

    #[test]
    fn code_order_is_shorter_first() {
        let a = ShapeCode::parse("0").unwrap();
        let b = ShapeCode::parse("100").unwrap();
        let c = ShapeCode::parse("10100").unwrap();
        let d = ShapeCode::parse("11000").unwrap();
        assert!(a < b && b < c && c < d);
        assert!(ShapeCode::parse("10").is_err());
        assert!(ShapeCode::parse("0a").is_err());
    }

    #[test]
    fn enumeration_counts_are_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132];
        for m in 1..=7 {
            assert_eq!(TreeShape::all_full(m).len(), catalan[m - 1]);
        }
        for (n, &c) in catalan.iter().enumerate().skip(1) {
            assert_eq!(TreeShape::all_binary(n).len(), c);
        }
    }

    #[test]
    fn subtree_extracts_fringe() {
        let t4a = t("(*,(*,(*,*)))");
        assert_eq!(t4a.subtree(2), t("(*,(*,*))"));
        assert_eq!(t4a.subtree(4), t("(*,*)"));
        assert_eq!(t4a.subtree(6), t("*"));
        assert_eq!(t4a.subtree_sizes(), vec![7, 1, 5, 1, 3, 1, 1]);
    }

    #[test]
    fn deep_caterpillar_does_not_overflow() {
        let depth = 200_000usize;
        let tree = TreeShape::build(depth, |k| {
            if k == 0 {
                (None, None)
            } else {
                (Some(0), Some(k - 1))
            }
        });
        assert_eq!(tree.leafcount(), depth + 1);
        let s = tree.format();
        assert_eq!(TreeShape::parse(&s).unwrap(), tree);
        assert_eq!(tree.code().unwrap().decode().unwrap(), tree);
        assert_eq!(tree.extend().delete_leaves().unwrap(), tree);
        // Explicit codes of every spine subtree are quadratic in total length.
        let shallow = TreeShape::build(20_000usize, |k| {
            if k == 0 { (None, None) } else { (Some(0), Some(k - 1)) }
        });
        let mirrored = shallow.mirror();
        assert_eq!(shallow.cladogram_code().unwrap(), mirrored.cladogram_code().unwrap());
    }
}
