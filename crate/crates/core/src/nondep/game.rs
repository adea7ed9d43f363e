//! Max-parity games and Zielonka's recursive algorithm.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    /// The system; wins when the largest priority seen infinitely often is even.
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    fn idx(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }
}

/// Every node must have at least one successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For each node won by its owner, the index into `succ` of a winning move.
    pub strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn num_nodes(&self) -> usize {
        self.owner.len()
    }

    fn pred(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.num_nodes()];
        for (v, ss) in self.succ.iter().enumerate() {
            for &w in ss {
                p[w].push(v);
            }
        }
        p
    }

    /// Attractor of `target` for `player` inside `mask`, recording attracting moves.
    fn attractor(
        &self,
        pred: &[Vec<usize>],
        mask: &[bool],
        target: &[bool],
        player: Player,
        strategy: &mut [Option<usize>],
    ) -> Vec<bool> {
        let n = self.num_nodes();
        let mut attr = target.to_vec();
        let mut count: Vec<usize> = (0..n)
            .map(|v| self.succ[v].iter().filter(|&&w| mask[w]).count())
            .collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| attr[v]).collect();
        while let Some(w) = queue.pop() {
            for &v in &pred[w] {
                if !mask[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == player {
                    attr[v] = true;
                    strategy[v] = self.succ[v].iter().position(|&x| x == w);
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    fn solve_rec(&self, pred: &[Vec<usize>], mask: &[bool], strategy: &mut [Option<usize>]) -> [Vec<bool>; 2] {
        let n = self.num_nodes();
        let Some(p) = (0..n).filter(|&v| mask[v]).map(|v| self.priority[v]).max() else {
            return [vec![false; n], vec![false; n]];
        };
        let i = Player::of_priority(p);
        let top: Vec<bool> = (0..n).map(|v| mask[v] && self.priority[v] == p).collect();
        let a = self.attractor(pred, mask, &top, i, strategy);
        let rest: Vec<bool> = (0..n).map(|v| mask[v] && !a[v]).collect();
        let sub = self.solve_rec(pred, &rest, strategy);
        let opp = i.opponent();
        if !sub[opp.idx()].iter().any(|&b| b) {
            for v in 0..n {
                if top[v] && self.owner[v] == i {
                    strategy[v] = self.succ[v].iter().position(|&w| mask[w]);
                }
            }
            let mut win = [vec![false; n], vec![false; n]];
            win[i.idx()] = mask.to_vec();
            return win;
        }
        let b = self.attractor(pred, mask, &sub[opp.idx()], opp, strategy);
        let rest2: Vec<bool> = (0..n).map(|v| mask[v] && !b[v]).collect();
        let mut win = self.solve_rec(pred, &rest2, strategy);
        for v in 0..n {
            if b[v] {
                win[opp.idx()][v] = true;
            }
        }
        win
    }

    pub fn solve(&self) -> Solution {
        let n = self.num_nodes();
        assert!(self.succ.iter().all(|s| !s.is_empty()), "dead end in parity game");
        let pred = self.pred();
        let mut strategy = vec![None; n];
        let mask = vec![true; n];
        let win = self.solve_rec(&pred, &mask, &mut strategy);
        let winner: Vec<Player> = (0..n)
            .map(|v| if win[0][v] { Player::Even } else { Player::Odd })
            .collect();
        for v in 0..n {
            if winner[v] != self.owner[v] {
                strategy[v] = None;
            }
        }
        Solution { winner, strategy }
    }
}

/// Zielonka's algorithm on the whole game.
pub fn zielonka(game: &ParityGame) -> Solution {
    game.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: u32) -> ParityGame {
        ParityGame {
            owner: vec![Player::Even],
            priority: vec![p],
            succ: vec![vec![0]],
        }
    }

    #[test]
    fn self_loops() {
        assert_eq!(zielonka(&single(2)).winner, vec![Player::Even]);
        assert_eq!(zielonka(&single(1)).winner, vec![Player::Odd]);
    }

    #[test]
    fn even_escapes_to_good_cycle() {
        // 0 (Even, 1) -> 1 (3, self-loop) or 2 (4, self-loop)
        let g = ParityGame {
            owner: vec![Player::Even, Player::Odd, Player::Odd],
            priority: vec![1, 3, 4],
            succ: vec![vec![1, 2], vec![1], vec![2]],
        };
        let s = zielonka(&g);
        assert_eq!(s.winner, vec![Player::Odd.opponent(), Player::Odd, Player::Even]);
        assert_eq!(s.strategy[0], Some(1));
    }
}
