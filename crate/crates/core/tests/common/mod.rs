#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vvmf::ahol::raise_times;
use vvmf::forms::eisenstein;
use vvmf::sl2::{self, IntMat2};
use vvmf::{AholForm, CycNum, Rep};

/// Monomials `E_4^a E_6^b` of weight `w`.
pub fn monomials(w: i64, prec: u64) -> Vec<AholForm> {
    let e4 = eisenstein(4, prec).unwrap();
    let e6 = eisenstein(6, prec).unwrap();
    let mut out = Vec::new();
    let mut b = 0;
    while 6 * b <= w {
        if (w - 6 * b) % 4 == 0 {
            let a = (w - 6 * b) / 4;
            let mut f = AholForm::holomorphic(
                0,
                Rep::trivial(),
                vec![vvmf::QExp::constant(
                    CycNum::one(),
                    vvmf::exactnum::rat_int(prec as i64),
                )],
            )
            .unwrap();
            for _ in 0..a {
                f = f.mul(&e4);
            }
            for _ in 0..b {
                f = f.mul(&e6);
            }
            out.push(f);
        }
        b += 1;
    }
    out
}

/// A random holomorphic level-one form of weight `w` (integer combination of monomials).
pub fn random_holomorphic(rng: &mut ChaCha8Rng, w: i64, prec: u64) -> AholForm {
    let ms = monomials(w, prec);
    let mut f = AholForm::zero(w, Rep::trivial(), vvmf::exactnum::rat_int(prec as i64));
    for m in ms {
        let c = rng.gen_range(-5i64..=5);
        f = f.add(&m.scale(&CycNum::from_int(c))).unwrap();
    }
    if f.is_zero() {
        return monomials(w, prec).swap_remove(0);
    }
    f
}

/// `Σ_t R̂^t h_t` with random `h_t`; returns the form and its parts.
pub fn random_ahol(
    rng: &mut ChaCha8Rng,
    k: i64,
    depth: usize,
    prec: u64,
) -> (AholForm, Vec<AholForm>) {
    let parts: Vec<AholForm> = (0..=depth)
        .map(|t| random_holomorphic(rng, k - 2 * t as i64, prec))
        .collect();
    let mut f = AholForm::zero(k, Rep::trivial(), vvmf::exactnum::rat_int(prec as i64));
    for (t, h) in parts.iter().enumerate() {
        f = f.add(&raise_times(h, t)).unwrap();
    }
    (f, parts)
}

pub fn random_sl2(rng: &mut ChaCha8Rng, len: usize) -> IntMat2 {
    (0..len).fold(sl2::IDENTITY, |g, _| {
        let e = rng.gen_range(-3i64..=3);
        let step = if rng.gen_bool(0.5) {
            sl2::S
        } else {
            sl2::t_pow(e)
        };
        sl2::mul(&g, &step)
    })
}
