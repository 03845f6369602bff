//! The exact solver against an independent brute force on a cell grid.
//!
//! With every side a multiple of `1/8` and bin sides multiples of `1/8`, some
//! optimal packing has every corner on the `1/8` grid (push each square down
//! and left until it touches the bin or another square). The reference search
//! below fills the lowest, leftmost empty cell with either a square anchored
//! there or a wasted cell, which visits every grid packing.

use proptest::prelude::*;
use squareknap::oracle::{solve_exact, solve_exact_corner};
use squareknap::{Bin, Scalar, Square};

const GRID: i64 = 8;

struct Board {
    w: usize,
    h: usize,
}

impl Board {
    fn mask(&self, x: usize, y: usize, side: usize) -> Option<u128> {
        if x + side > self.w || y + side > self.h {
            return None;
        }
        let mut m = 0u128;
        for dy in 0..side {
            for dx in 0..side {
                m |= 1 << ((y + dy) * self.w + x + dx);
            }
        }
        Some(m)
    }

    /// Whether every side in `sides` fits without overlap.
    fn fits(&self, sides: &[usize]) -> bool {
        let area: usize = sides.iter().map(|s| s * s).sum();
        if area > self.w * self.h {
            return false;
        }
        let mut used = vec![false; sides.len()];
        self.fill(0, sides, &mut used, self.w * self.h - area)
    }

    fn fill(&self, occupied: u128, sides: &[usize], used: &mut [bool], waste: usize) -> bool {
        if used.iter().all(|&u| u) {
            return true;
        }
        let cells = self.w * self.h;
        let first = (0..cells).find(|&c| occupied & (1 << c) == 0);
        let Some(c) = first else {
            return false;
        };
        let (x, y) = (c % self.w, c / self.w);
        for i in 0..sides.len() {
            if used[i] || (i > 0 && !used[i - 1] && sides[i - 1] == sides[i]) {
                continue;
            }
            if let Some(m) = self.mask(x, y, sides[i]) {
                if occupied & m == 0 {
                    used[i] = true;
                    let ok = self.fill(occupied | m, sides, used, waste);
                    used[i] = false;
                    if ok {
                        return true;
                    }
                }
            }
        }
        waste > 0 && self.fill(occupied | (1 << c), sides, used, waste - 1)
    }
}

fn brute_force(sides: &[usize], profits: &[i64], w: usize, h: usize) -> i64 {
    let board = Board { w, h };
    let n = sides.len();
    let mut best = 0;
    for subset in 0u32..(1 << n) {
        let chosen: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
        let profit: i64 = chosen.iter().map(|&i| profits[i]).sum();
        if profit <= best {
            continue;
        }
        let mut s: Vec<usize> = chosen.iter().map(|&i| sides[i]).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        if board.fits(&s) {
            best = profit;
        }
    }
    best
}

fn squares(sides: &[usize], profits: &[i64]) -> Vec<Square> {
    sides
        .iter()
        .zip(profits)
        .enumerate()
        .map(|(i, (&s, &p))| Square::new(format!("s{i}"), Scalar::ratio(s as i64, GRID), Scalar::from_int(p)).unwrap())
        .collect()
}

fn bin(w: usize, h: usize) -> Bin {
    Bin::new(Scalar::ratio(w as i64, GRID), Scalar::ratio(h as i64, GRID)).unwrap()
}

#[test]
fn reference_search_known_cases() {
    // four quarter squares tile the unit bin, a fifth cannot join
    assert_eq!(brute_force(&[4, 4, 4, 4, 4], &[1, 1, 1, 1, 1], 8, 8), 4);
    // 5/8 blocks every 1/2
    assert_eq!(brute_force(&[5, 4, 4], &[10, 6, 6], 8, 8), 12);
    assert_eq!(brute_force(&[5, 3, 3, 3], &[5, 1, 1, 1], 8, 8), 8);
}

#[test]
fn oracle_matches_reference_on_known_cases() {
    for (sides, profits, w, h) in [
        (vec![5, 4, 4], vec![10, 6, 6], 8, 8),
        (vec![5, 3, 3, 3], vec![5, 1, 1, 1], 8, 8),
        (vec![6, 3, 3, 2], vec![9, 4, 4, 1], 8, 12),
        (vec![7, 2, 2, 2, 2], vec![3, 1, 1, 1, 1], 8, 8),
    ] {
        let r = solve_exact(&squares(&sides, &profits), &bin(w, h), 10_000_000).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.optimal_profit, Scalar::from_int(brute_force(&sides, &profits, w, h)), "{sides:?}");
    }
}

fn case() -> impl Strategy<Value = (Vec<usize>, Vec<i64>, usize, usize)> {
    (1usize..=5, prop_oneof![Just((8usize, 8usize)), Just((8, 12)), Just((12, 8)), Just((6, 10))]).prop_flat_map(
        |(n, (w, h))| {
            let max = w.min(h);
            (prop::collection::vec(1..=max, n), prop::collection::vec(1i64..=20, n), Just(w), Just(h))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_equals_grid_brute_force((sides, profits, w, h) in case()) {
        let items = squares(&sides, &profits);
        let b = bin(w, h);
        let r = solve_exact(&items, &b, 10_000_000).unwrap();
        prop_assert!(r.is_complete());
        prop_assert!(r.witness.is_feasible());
        prop_assert_eq!(r.witness.profit(), r.optimal_profit.clone());
        prop_assert_eq!(r.optimal_profit.clone(), Scalar::from_int(brute_force(&sides, &profits, w, h)));
    }

    #[test]
    fn corner_solver_never_beats_oracle((sides, profits, w, h) in case()) {
        let items = squares(&sides, &profits);
        let b = bin(w, h);
        let exact = solve_exact(&items, &b, 10_000_000).unwrap();
        let corner = solve_exact_corner(&items, &b, 50_000).unwrap();
        prop_assert!(corner.witness.is_feasible());
        prop_assert!(corner.optimal_profit <= exact.optimal_profit);
    }
}
