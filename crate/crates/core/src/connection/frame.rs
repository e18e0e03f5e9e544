//! Path-frames over a pole and covariant path-frame systems.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::causet::{CausalPoset, ElemId, SymmetryAction};
use crate::error::{Error, Result};
use crate::loopgrp::{apply_morphism, is_path, PathEnds, Word};
use crate::simplex::{morphism_image, tangent_simplices, Simplex1};

/// Order in which breadth-first search tries letters; the two orders give
/// different, equally valid frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FrameOrder {
    #[default]
    Ascending,
    Descending,
}

/// A path `p_(o,a)` from the pole `o` to each reachable element `a`, with
/// `p_(o,o)` empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFrame {
    pub pole: ElemId,
    pub paths: BTreeMap<ElemId, Word>,
}

impl PathFrame {
    pub fn path(&self, a: ElemId) -> Option<&Word> {
        self.paths.get(&a)
    }

    /// `p_(o,a)`, or `NotConnected` when the frame does not reach `a`.
    pub fn require(&self, a: ElemId) -> Result<&Word> {
        self.path(a).ok_or(Error::NotConnected { from: self.pole, to: a })
    }

    /// Every stored word is a tangent path from the pole to its key, and
    /// the pole's own path is empty.
    pub fn validate(&self, p: &CausalPoset) -> bool {
        self.paths.get(&self.pole).is_some_and(Word::is_empty)
            && self.paths.iter().all(|(&a, w)| {
                w.letters().iter().all(|b| b.is_valid(p) && b.is_tangent(p))
                    && match is_path(w) {
                        Some(PathEnds::Everywhere) => a == self.pole,
                        Some(PathEnds::Span { start, end }) => start == self.pole && end == a,
                        None => false,
                    }
            })
    }

    /// `s(P_o)`, a frame over `s(o)`.
    pub fn image(&self, act: &SymmetryAction, s: usize) -> PathFrame {
        let psi = act.morphism(s);
        PathFrame {
            pole: act.act(s, self.pole),
            paths: self.paths.iter().map(|(&a, w)| (act.act(s, a), apply_morphism(&psi, w))).collect(),
        }
    }
}

/// Elements that are faces of tangent simplices.
fn frame_targets(p: &CausalPoset) -> Vec<ElemId> {
    p.elements().filter(|&a| !p.is_maximal(a)).collect()
}

/// Shortest paths from `from` along `letters`, keyed by end point.
fn bfs(from: ElemId, letters: &[Simplex1], order: FrameOrder, max_len: usize) -> BTreeMap<ElemId, Word> {
    let mut by_d1: HashMap<ElemId, Vec<Simplex1>> = HashMap::new();
    for &b in letters {
        by_d1.entry(b.d1).or_default().push(b);
    }
    if order == FrameOrder::Descending {
        by_d1.values_mut().for_each(|v| v.reverse());
    }
    let mut paths = BTreeMap::from([(from, Vec::new())]);
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        let path: Vec<Simplex1> = paths[&a].clone();
        if path.len() >= max_len {
            continue;
        }
        for &b in by_d1.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
            if !paths.contains_key(&b.d0) {
                let mut next = Vec::with_capacity(path.len() + 1);
                next.push(b);
                next.extend_from_slice(&path);
                paths.insert(b.d0, next);
                queue.push_back(b.d0);
            }
        }
    }
    paths.into_iter().map(|(a, l)| (a, Word::new(l))).collect()
}

/// A frame over `pole` of shortest tangent paths, trying letters in
/// `(support, d0, d1)` order.
pub fn build_path_frame(p: &CausalPoset, pole: ElemId) -> Result<PathFrame> {
    build_path_frame_with(p, pole, FrameOrder::Ascending)
}

pub fn build_path_frame_with(p: &CausalPoset, pole: ElemId, order: FrameOrder) -> Result<PathFrame> {
    p.check(pole)?;
    let paths = bfs(pole, &tangent_simplices(p), order, usize::MAX);
    if let Some(&to) = frame_targets(p).iter().find(|a| !paths.contains_key(a)) {
        return Err(Error::NotConnected { from: pole, to });
    }
    Ok(PathFrame { pole, paths })
}

fn fixes(act: &SymmetryAction, group: &[usize], b: Simplex1) -> bool {
    group.iter().all(|&s| morphism_image(&act.morphism(s), b) == b)
}

fn joint_stabilizer(act: &SymmetryAction, o: ElemId, a: ElemId) -> Vec<usize> {
    act.stabilizer(o).into_iter().filter(|&s| act.act(s, a) == a).collect()
}

/// A shortest path from `o` to `a`, of length at most `max_len`, whose
/// letters are all fixed by the joint stabilizer `S_o ∩ S_a`.
pub fn check_obstruction(p: &CausalPoset, act: &SymmetryAction, o: ElemId, a: ElemId, max_len: usize) -> Option<Word> {
    check_obstruction_with(p, act, o, a, max_len, FrameOrder::Ascending)
}

fn check_obstruction_with(
    p: &CausalPoset,
    act: &SymmetryAction,
    o: ElemId,
    a: ElemId,
    max_len: usize,
    order: FrameOrder,
) -> Option<Word> {
    let joint = joint_stabilizer(act, o, a);
    let letters: Vec<Simplex1> = tangent_simplices(p).into_iter().filter(|&b| fixes(act, &joint, b)).collect();
    bfs(o, &letters, order, max_len).remove(&a)
}

/// One path-frame over every non-maximal element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFrameSystem {
    pub frames: BTreeMap<ElemId, PathFrame>,
}

impl PathFrameSystem {
    pub fn frame(&self, o: ElemId) -> Option<&PathFrame> {
        self.frames.get(&o)
    }

    pub fn poles(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.frames.keys().copied()
    }

    /// Pairs `(s, o)` with `s(P_o) ≠ P_{s(o)}`.
    pub fn covariance_violations(&self, act: &SymmetryAction) -> Vec<(usize, ElemId)> {
        let mut out = Vec::new();
        for s in act.group() {
            for (&o, frame) in &self.frames {
                if self.frames.get(&act.act(s, o)) != Some(&frame.image(act, s)) {
                    out.push((s, o));
                }
            }
        }
        out
    }

    pub fn is_covariant(&self, act: &SymmetryAction) -> bool {
        self.covariance_violations(act).is_empty()
    }

    pub fn validate(&self, p: &CausalPoset) -> bool {
        self.frames.iter().all(|(&o, f)| f.pole == o && f.validate(p))
    }
}

/// A covariant path-frame system: on each orbit representative `a`, paths
/// to representatives `y` of the `S_a`-orbits fixed letterwise by
/// `S_a ∩ S_y`, carried to the rest of the `S_a`-orbit and then to the
/// orbit of `a` by the action.
pub fn build_covariant_system(p: &CausalPoset, act: &SymmetryAction, max_len: usize) -> Result<PathFrameSystem> {
    build_covariant_system_with(p, act, max_len, FrameOrder::Ascending)
}

pub fn build_covariant_system_with(
    p: &CausalPoset,
    act: &SymmetryAction,
    max_len: usize,
    order: FrameOrder,
) -> Result<PathFrameSystem> {
    let targets = frame_targets(p);
    let mut frames: BTreeMap<ElemId, PathFrame> = BTreeMap::new();
    for &a in &targets {
        if frames.contains_key(&a) {
            continue;
        }
        let stab = act.stabilizer(a);
        let mut paths: BTreeMap<ElemId, Word> = BTreeMap::new();
        for &y in &targets {
            if paths.contains_key(&y) {
                continue;
            }
            let path = check_obstruction_with(p, act, a, y, max_len, order).ok_or_else(|| {
                let joint = joint_stabilizer(act, a, y).len();
                if joint > 1 {
                    Error::Obstructed { from: a, to: y, stabilizer: joint }
                } else {
                    Error::NotConnected { from: a, to: y }
                }
            })?;
            for &s in &stab {
                paths.entry(act.act(s, y)).or_insert_with(|| apply_morphism(&act.morphism(s), &path));
            }
        }
        let rep = PathFrame { pole: a, paths };
        for s in act.group() {
            let image = act.act(s, a);
            if !frames.contains_key(&image) {
                frames.insert(image, rep.image(act, s));
            }
        }
    }
    Ok(PathFrameSystem { frames })
}

/// Frames built independently over each pole, covariant only under the
/// trivial group.
pub fn build_frame_system(p: &CausalPoset, order: FrameOrder) -> Result<PathFrameSystem> {
    let frames = frame_targets(p)
        .into_iter()
        .map(|o| build_path_frame_with(p, o, order).map(|f| (o, f)))
        .collect::<Result<_>>()?;
    Ok(PathFrameSystem { frames })
}
