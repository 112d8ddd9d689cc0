//! Backtracking with propagation over equal-count constraints.

use super::Constraints;

const UNSET: u8 = u8::MAX;

#[derive(Clone, Copy)]
enum Event {
    Removed { perm: u32, label: u8 },
    Assigned { perm: u32, label: u8, old: u128 },
    Target { group: u32 },
    Ceiling { label: u8 },
}

#[derive(Clone, Copy)]
enum Action {
    Assign(u32, u8),
    Remove(u32, u8),
}

/// Mutable search state for one constraint system and one label count.
pub(crate) struct Engine<'c> {
    c: &'c Constraints,
    k: usize,
    mask: Vec<u128>,
    value: Vec<u8>,
    cnt: Vec<u16>,
    cap: Vec<u16>,
    open: Vec<u16>,
    target: Vec<Option<Vec<u16>>>,
    label_ceiling: Vec<Option<u32>>,
    trail: Vec<Event>,
    actions: Vec<Action>,
    queue: Vec<u32>,
    queued: Vec<bool>,
}

/// Outcome of visiting a node of the search tree.
pub(crate) enum Visit {
    Solution(Vec<u32>),
    Frontier(Vec<u8>),
}

impl<'c> Engine<'c> {
    /// `targets` fixes per-group counts up front; `None` entries are
    /// learned from the first completed set of the group.
    pub(crate) fn new(c: &'c Constraints, k: usize, targets: Vec<Option<Vec<u16>>>) -> Self {
        assert!((1..=128).contains(&k));
        let full = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
        let perms = c.perm_sets.len();
        let sets = c.sets.len();
        let mut cap = vec![0u16; sets * k];
        for (s, members) in c.sets.iter().enumerate() {
            for l in 0..k {
                cap[s * k + l] = members.len() as u16;
            }
        }
        Engine {
            c,
            k,
            mask: vec![full; perms],
            value: vec![UNSET; perms],
            cnt: vec![0; sets * k],
            cap,
            open: c.sets.iter().map(|s| s.len() as u16).collect(),
            target: targets,
            label_ceiling: vec![None; k],
            trail: Vec::new(),
            actions: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; sets],
        }
    }

    /// Propagates the initial constraints; false if already infeasible.
    pub(crate) fn start(&mut self) -> bool {
        for s in 0..self.c.sets.len() as u32 {
            self.enqueue(s);
        }
        self.propagate()
    }

    fn enqueue(&mut self, s: u32) {
        if !self.queued[s as usize] {
            self.queued[s as usize] = true;
            self.queue.push(s);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("nonempty trail") {
                Event::Removed { perm, label } => {
                    self.mask[perm as usize] |= 1 << label;
                    for &s in &self.c.perm_sets[perm as usize] {
                        self.cap[s as usize * self.k + label as usize] += 1;
                    }
                }
                Event::Assigned { perm, label, old } => {
                    self.mask[perm as usize] = old;
                    self.value[perm as usize] = UNSET;
                    for &s in &self.c.perm_sets[perm as usize] {
                        let base = s as usize * self.k;
                        self.cnt[base + label as usize] -= 1;
                        self.open[s as usize] += 1;
                        for l in bits(old) {
                            self.cap[base + l] += 1;
                        }
                    }
                }
                Event::Target { group } => self.target[group as usize] = None,
                Event::Ceiling { label } => self.label_ceiling[label as usize] = None,
            }
        }
    }

    fn clear_queues(&mut self) {
        self.actions.clear();
        for &s in &self.queue {
            self.queued[s as usize] = false;
        }
        self.queue.clear();
    }

    fn apply(&mut self, action: Action) -> bool {
        match action {
            Action::Remove(p, l) => {
                let pi = p as usize;
                if self.value[pi] != UNSET {
                    return self.value[pi] != l;
                }
                let bit = 1u128 << l;
                if self.mask[pi] & bit == 0 {
                    return true;
                }
                self.mask[pi] &= !bit;
                self.trail.push(Event::Removed { perm: p, label: l });
                for i in 0..self.c.perm_sets[pi].len() {
                    let s = self.c.perm_sets[pi][i];
                    self.cap[s as usize * self.k + l as usize] -= 1;
                    self.enqueue(s);
                }
                match self.mask[pi].count_ones() {
                    0 => false,
                    1 => {
                        self.actions.push(Action::Assign(p, self.mask[pi].trailing_zeros() as u8));
                        true
                    }
                    _ => true,
                }
            }
            Action::Assign(p, l) => {
                let pi = p as usize;
                if self.value[pi] != UNSET {
                    return self.value[pi] == l;
                }
                let old = self.mask[pi];
                if old & (1u128 << l) == 0 {
                    return false;
                }
                self.mask[pi] = 1 << l;
                self.value[pi] = l;
                self.trail.push(Event::Assigned { perm: p, label: l, old });
                for i in 0..self.c.perm_sets[pi].len() {
                    let s = self.c.perm_sets[pi][i];
                    let base = s as usize * self.k;
                    self.cnt[base + l as usize] += 1;
                    self.open[s as usize] -= 1;
                    for m in bits(old) {
                        self.cap[base + m] -= 1;
                    }
                    self.enqueue(s);
                }
                if let Some(ceiling) = &self.c.ceiling {
                    let class = ceiling[pi];
                    match self.label_ceiling[l as usize] {
                        Some(bound) => return bound == class,
                        None => {
                            self.label_ceiling[l as usize] = Some(class);
                            self.trail.push(Event::Ceiling { label: l });
                            for (q, &other) in ceiling.iter().enumerate() {
                                if other != class && self.mask[q] & (1u128 << l) != 0 {
                                    self.actions.push(Action::Remove(q as u32, l));
                                }
                            }
                        }
                    }
                }
                true
            }
        }
    }

    fn check_set(&mut self, s: u32) -> bool {
        let su = s as usize;
        let g = self.c.set_group[su] as usize;
        let base = su * self.k;
        if self.target[g].is_none() {
            if self.open[su] == 0 {
                self.target[g] = Some(self.cnt[base..base + self.k].to_vec());
                self.trail.push(Event::Target { group: g as u32 });
                for i in 0..self.c.group_sets[g].len() {
                    let other = self.c.group_sets[g][i];
                    self.enqueue(other);
                }
            }
            return true;
        }
        let target = self.target[g].as_ref().expect("target set");
        for (l, &t) in target.iter().enumerate() {
            let (c, f) = (self.cnt[base + l], self.cap[base + l]);
            if c > t || c + f < t {
                return false;
            }
            if f == 0 {
                continue;
            }
            let bit = 1u128 << l;
            if c == t {
                for &p in &self.c.sets[su] {
                    if self.value[p as usize] == UNSET && self.mask[p as usize] & bit != 0 {
                        self.actions.push(Action::Remove(p, l as u8));
                    }
                }
            } else if c + f == t {
                for &p in &self.c.sets[su] {
                    if self.value[p as usize] == UNSET && self.mask[p as usize] & bit != 0 {
                        self.actions.push(Action::Assign(p, l as u8));
                    }
                }
            }
        }
        true
    }

    fn propagate(&mut self) -> bool {
        loop {
            if let Some(a) = self.actions.pop() {
                if !self.apply(a) {
                    self.clear_queues();
                    return false;
                }
            } else if let Some(s) = self.queue.pop() {
                self.queued[s as usize] = false;
                if !self.check_set(s) {
                    self.clear_queues();
                    return false;
                }
            } else {
                return true;
            }
        }
    }

    fn decide(&mut self, p: u32, l: u8) -> bool {
        self.actions.push(Action::Assign(p, l));
        self.propagate()
    }

    /// Depth-first search in lexicographic position order with value
    /// precedence. Decisions in `prefix` are replayed first; with
    /// `frontier_depth` set, nodes at that depth are reported instead of
    /// explored.
    pub(crate) fn search(&mut self, prefix: &[u8], frontier_depth: Option<usize>, visit: &mut impl FnMut(Visit)) {
        let mut path = Vec::new();
        self.dfs(0, -1, prefix, frontier_depth, &mut path, visit);
    }

    fn dfs(
        &mut self,
        mut cursor: usize,
        mut max_label: i32,
        prefix: &[u8],
        frontier_depth: Option<usize>,
        path: &mut Vec<u8>,
        visit: &mut impl FnMut(Visit),
    ) {
        let n = self.value.len();
        while cursor < n && self.value[cursor] != UNSET {
            let v = self.value[cursor] as i32;
            if v > max_label + 1 {
                return;
            }
            max_label = max_label.max(v);
            cursor += 1;
        }
        if cursor == n {
            if path.len() >= prefix.len() {
                visit(Visit::Solution(self.value.iter().map(|&v| v as u32).collect()));
            }
            return;
        }
        if path.len() < prefix.len() {
            let l = prefix[path.len()];
            let mark = self.trail.len();
            if (l as i32) <= max_label + 1 && self.decide(cursor as u32, l) {
                path.push(l);
                self.dfs(cursor + 1, max_label.max(l as i32), prefix, frontier_depth, path, visit);
                path.pop();
            }
            self.undo_to(mark);
            return;
        }
        if frontier_depth == Some(path.len()) {
            visit(Visit::Frontier(path.clone()));
            return;
        }
        let limit = ((max_label + 1) as usize).min(self.k - 1);
        let options = self.mask[cursor] & (u128::MAX >> (127 - limit));
        for l in bits(options) {
            let mark = self.trail.len();
            if self.decide(cursor as u32, l as u8) {
                path.push(l as u8);
                self.dfs(cursor + 1, max_label.max(l as i32), prefix, frontier_depth, path, visit);
                path.pop();
            }
            self.undo_to(mark);
        }
    }
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}
