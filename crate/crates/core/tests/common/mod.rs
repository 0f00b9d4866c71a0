//! Random presented instances shared by the integration targets.
#![allow(dead_code)]

use rand::Rng;
use wct::exactla::{Int, IntMat};
use wct::groups::{validate_instance, Ambient, DirectSumInstance, GroupElem, PresentedGroup, Subgroup};

/// A generated instance together with the cyclic orders of its ambient coordinates
/// before the change of basis (0 for a free coordinate).
pub struct Generated {
    pub instance: DirectSumInstance,
    pub orders: Vec<i64>,
}

type Mat = Vec<Vec<i64>>;

fn identity(m: usize) -> Mat {
    (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect()
}

/// An automorphism of `⊕ Z/d_i`, as the images of the coordinate vectors.
fn random_automorphism(rng: &mut impl Rng, d: &[i64], steps: usize) -> Mat {
    let m = d.len();
    let mut phi = identity(m);
    if m < 2 {
        if rng.gen_bool(0.5) {
            phi[0][0] = -1;
        }
        return phi;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i == j {
            if rng.gen_bool(0.3) {
                phi[i].iter_mut().for_each(|x| *x = -*x);
            }
            continue;
        }
        let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
        // e_i ↦ e_i + c·e_j respects relations iff d_i·c·e_j = 0
        let ok = d[i] == 0 || (d[j] != 0 && (d[i] * c) % d[j] == 0);
        if ok {
            let row_j = phi[j].clone();
            for (x, y) in phi[i].iter_mut().zip(row_j) {
                *x += c * y;
            }
        }
    }
    for row in &mut phi {
        for (x, &dj) in row.iter_mut().zip(d) {
            if dj != 0 {
                *x = x.rem_euclid(dj);
                if *x > dj / 2 {
                    *x -= dj;
                }
            }
        }
    }
    phi
}

fn random_unimodular(rng: &mut impl Rng, m: usize) -> Mat {
    let mut p = identity(m);
    if m < 2 {
        return p;
    }
    for _ in 0..rng.gen_range(0..4) {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        if i != j {
            let c = if rng.gen_bool(0.5) { 1 } else { -1 };
            for row in &mut p {
                row[i] += c * row[j];
            }
        }
    }
    if p.iter().flatten().any(|x| x.abs() > 2) {
        return identity(m);
    }
    p
}

fn times(x: &[i64], p: &Mat) -> Vec<i64> {
    (0..p.len())
        .map(|j| x.iter().zip(p).map(|(a, row)| a * row[j]).sum())
        .collect()
}

fn to_ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn presented(d: &[i64], p: &Mat) -> PresentedGroup {
    let m = d.len();
    let cols: Vec<Vec<i64>> = d
        .iter()
        .enumerate()
        .filter(|(_, &di)| di != 0)
        .map(|(i, &di)| p[i].iter().map(|x| di * x).collect())
        .collect();
    if cols.is_empty() {
        return PresentedGroup::free(m);
    }
    let rows: Vec<Vec<Int>> = (0..m).map(|r| cols.iter().map(|c| Int::from(c[r])).collect()).collect();
    PresentedGroup::new(m, IntMat::from_rows(&rows, cols.len()).unwrap()).unwrap()
}

/// A valid instance with ambient rank ≤ 4, generator entries in [−5, 5], torsion orders
/// ≤ 12 and `rank ∈ {0, 1, 2}`.
pub fn random_instance(rng: &mut impl Rng) -> Generated {
    loop {
        let r = rng.gen_range(0..=2usize);
        let ta = rng.gen_range(usize::from(r == 0)..=(2 - r / 2));
        let gn = rng.gen_range(0..=(4 - r - ta));
        let mut d = vec![0i64; r];
        d.extend((0..ta).map(|_| rng.gen_range(2..=12)));
        d.extend((0..gn).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(2..=12) }));
        let m = d.len();
        let psi = random_automorphism(rng, &d, 6);
        let phi = random_automorphism(rng, &d, 6);
        let p = random_unimodular(rng, m);
        let rows =
            |aut: &Mat, idx: std::ops::Range<usize>| -> Vec<Vec<i64>> { idx.map(|i| times(&aut[i], &p)).collect() };
        let (ai, gi) = (0..r + ta, r + ta..m);
        let parts = [
            rows(&psi, ai.clone()),
            rows(&psi, gi.clone()),
            rows(&phi, ai),
            rows(&phi, gi),
        ];
        if parts.iter().flatten().flatten().any(|x| x.abs() > 5) {
            continue;
        }
        let pg = presented(&d, &p);
        let sub = |gens: &Vec<Vec<i64>>| Subgroup::presented(&pg, gens.iter().map(|g| to_ints(g)).collect()).unwrap();
        let [a, g, b, h] = [sub(&parts[0]), sub(&parts[1]), sub(&parts[2]), sub(&parts[3])];
        let instance = DirectSumInstance {
            ambient: Ambient::Presented(pg.clone()),
            e: Subgroup::whole(&pg),
            a,
            b,
            g,
            h,
            rank: r,
            generators: None,
        };
        assert!(
            validate_instance(&instance).is_valid(),
            "generator produced an invalid instance: {d:?}"
        );
        return Generated { instance, orders: d };
    }
}

/// Exponent of the torsion part of the ambient (1 when free).
pub fn exponent(orders: &[i64]) -> i64 {
    orders
        .iter()
        .filter(|&&d| d != 0)
        .fold(1, |acc, &d| num_integer::lcm(acc, d))
}

/// Order of `x` in the ambient by repeated addition up to `limit`; `None` when not reached.
pub fn brute_order(amb: &Ambient, x: &GroupElem, limit: i64) -> Option<i64> {
    let mut acc = x.clone();
    for n in 1..=limit {
        if amb.is_zero(&acc) {
            return Some(n);
        }
        acc = amb.add(&acc, x).unwrap();
    }
    None
}
