//! The six-dimensional isospectral triplet, compiled in so that every check
//! can run without external data.
//!
//! `A_i` are basis matrices (columns generate, lower triangular with
//! modulus 5 in the last three pivots); `Q_i = A_iᵀ A_i` are their Gram
//! forms. `REP_2Q` lists `R(2Q_i, t)` for even `t` from 0 to 92.

use crate::lattice::{GramForm, Lattice};
use crate::numeric::Mat;

pub const MODULUS: u64 = 5;

pub const A: [[[i64; 6]; 6]; 3] = [
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [1, 1, 0, 5, 0, 0],
        [2, 0, 1, 0, 5, 0],
        [1, 2, 1, 0, 0, 5],
    ],
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [2, 1, 0, 5, 0, 0],
        [0, 1, 1, 0, 5, 0],
        [3, 2, 1, 0, 0, 5],
    ],
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [2, 1, 0, 5, 0, 0],
        [0, 1, 1, 0, 5, 0],
        [2, 3, 1, 0, 0, 5],
    ],
];

pub const Q: [[[i64; 6]; 6]; 3] = [
    [
        [7, 3, 3, 5, 10, 5],
        [3, 6, 2, 5, 0, 10],
        [3, 2, 3, 0, 5, 5],
        [5, 5, 0, 25, 0, 0],
        [10, 0, 5, 0, 25, 0],
        [5, 10, 5, 0, 0, 25],
    ],
    [
        [14, 8, 3, 10, 0, 15],
        [8, 7, 3, 5, 5, 10],
        [3, 3, 3, 0, 5, 5],
        [10, 5, 0, 25, 0, 0],
        [0, 5, 5, 0, 25, 0],
        [15, 10, 5, 0, 0, 25],
    ],
    [
        [9, 8, 2, 10, 0, 10],
        [8, 12, 4, 5, 5, 15],
        [2, 4, 3, 0, 5, 5],
        [10, 5, 0, 25, 0, 0],
        [0, 5, 5, 0, 25, 0],
        [10, 15, 5, 0, 0, 25],
    ],
];

/// `(t, R(2Q_i, t))` for t = 0, 2, ..., 92; identical for i = 1, 2, 3.
pub const REP_2Q: [(u64, u64); 47] = [
    (0, 1),
    (2, 0),
    (4, 0),
    (6, 2),
    (8, 2),
    (10, 2),
    (12, 2),
    (14, 10),
    (16, 8),
    (18, 4),
    (20, 12),
    (22, 16),
    (24, 22),
    (26, 18),
    (28, 20),
    (30, 32),
    (32, 30),
    (34, 34),
    (36, 46),
    (38, 52),
    (40, 48),
    (42, 28),
    (44, 78),
    (46, 102),
    (48, 54),
    (50, 70),
    (52, 68),
    (54, 120),
    (56, 124),
    (58, 64),
    (60, 104),
    (62, 124),
    (64, 160),
    (66, 112),
    (68, 110),
    (70, 184),
    (72, 108),
    (74, 162),
    (76, 230),
    (78, 164),
    (80, 200),
    (82, 132),
    (84, 220),
    (86, 366),
    (88, 202),
    (90, 170),
    (92, 236),
];

/// Shortest-vector ladder of `L_1` in ambient coordinates, stage by stage.
/// The norm 8 stage is `(0,1,1,1,1,-2)`; `(1,0,1,2,1,-1)` has the same norm
/// but belongs to `L_2`, not `L_1`.
pub const LADDER_L1: [(u64, &[[i64; 6]]); 6] = [
    (3, &[[0, 0, 1, 0, 1, 1]]),
    (4, &[[1, 0, -1, 1, 1, 0]]),
    (5, &[[0, 1, -1, 1, -1, 1]]),
    (7, &[[2, -1, 0, 1, -1, 0], [1, -1, 1, 0, -2, 0]]),
    (8, &[[0, 1, 1, 1, 1, -2]]),
    (10, &[[2, 1, 1, -2, 0, 0]]),
];

/// Lower bound on the smallest eigenvalue of `Q_1` used in the printed
/// column-norm caps (263/400).
pub const PRINTED_LAMBDA: (i64, i64) = (263, 400);

pub fn basis(i: usize) -> Mat {
    Mat::from_ints(&A[i])
}

pub fn lattice(i: usize) -> Lattice {
    Lattice::new(basis(i)).expect("corpus bases are invertible")
}

pub fn form(i: usize) -> GramForm {
    GramForm::new(Mat::from_ints(&Q[i])).expect("corpus forms are positive definite")
}

pub fn lattices() -> [Lattice; 3] {
    [lattice(0), lattice(1), lattice(2)]
}

pub fn forms() -> [GramForm; 3] {
    [form(0), form(1), form(2)]
}
