//! Integer 2×2 matrices and words in the generators of SL2(Z).

pub type IntMat2 = [[i64; 2]; 2];

pub const IDENTITY: IntMat2 = [[1, 0], [0, 1]];
pub const S: IntMat2 = [[0, -1], [1, 0]];
pub const T: IntMat2 = [[1, 1], [0, 1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    S,
    T,
}

pub fn mul(a: &IntMat2, b: &IntMat2) -> IntMat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn det(a: &IntMat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn is_sl2(a: &IntMat2) -> bool {
    det(a) == 1
}

/// Inverse of an SL2(Z) element.
pub fn inv(a: &IntMat2) -> IntMat2 {
    debug_assert!(is_sl2(a));
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn t_pow(k: i64) -> IntMat2 {
    [[1, k], [0, 1]]
}

/// Writes `g ∈ SL2(Z)` as an ordered product `Π gen^exp`.
///
/// Only `T` ever carries a negative exponent; `S` appears with exponent 1 or 2.
pub fn word(g: &IntMat2) -> Vec<(Generator, i64)> {
    assert!(is_sl2(g), "not in SL2(Z): {g:?}");
    let mut g = *g;
    let mut out = Vec::new();
    while g[1][0] != 0 {
        let (a, b, c, d) = (g[0][0], g[0][1], g[1][0], g[1][1]);
        let k = a.div_euclid(c);
        let (a1, b1) = (a - k * c, b - k * d);
        if k != 0 {
            out.push((Generator::T, k));
        }
        out.push((Generator::S, 1));
        // S^{-1} (a1 b1; c d)
        g = [[c, d], [-a1, -b1]];
    }
    if g[0][0] == 1 {
        if g[0][1] != 0 {
            out.push((Generator::T, g[0][1]));
        }
    } else {
        // (-1 b; 0 -1) = S^2 T^{-b}
        out.push((Generator::S, 2));
        if g[0][1] != 0 {
            out.push((Generator::T, -g[0][1]));
        }
    }
    out
}

pub fn eval_word(w: &[(Generator, i64)]) -> IntMat2 {
    w.iter().fold(IDENTITY, |acc, &(gen, e)| {
        let m = match gen {
            Generator::T => t_pow(e),
            Generator::S => (0..e).fold(IDENTITY, |x, _| mul(&x, &S)),
        };
        mul(&acc, &m)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_reconstructs() {
        let samples: [IntMat2; 6] = [
            IDENTITY,
            S,
            T,
            [[-1, 0], [0, -1]],
            [[2, 1], [7, 4]],
            [[-5, 3], [-12, 7]],
        ];
        for g in samples {
            assert_eq!(eval_word(&word(&g)), g, "{g:?}");
        }
    }

    #[test]
    fn inverse() {
        let g = [[2, 1], [7, 4]];
        assert_eq!(mul(&g, &inv(&g)), IDENTITY);
    }
}
