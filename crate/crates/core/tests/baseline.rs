mod common;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::Rng;

use common::rng;
use ringtraj::baseline::{fitted_values, polyeval, polyfit, PolyTrajectory};

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

/// Exact least-squares residual `Σ (s − V·c)²` for monomials in
/// `u_i = 2i/(m−1) − 1`, from the normal equations in rational arithmetic.
fn exact_residual(signal: &[f64], degree: usize) -> f64 {
    let m = signal.len();
    let p = degree + 1;
    let u: Vec<BigRational> = (0..m)
        .map(|i| BigRational::new(BigInt::from(2 * i), BigInt::from(m - 1)) - BigRational::one())
        .collect();
    let s: Vec<BigRational> = signal.iter().map(|&v| rat(v)).collect();
    let powers: Vec<Vec<BigRational>> = u
        .iter()
        .map(|ui| {
            let mut row = vec![BigRational::one()];
            for _ in 1..p {
                let next = row.last().unwrap() * ui;
                row.push(next);
            }
            row
        })
        .collect();
    // augmented [VᵀV | Vᵀs]
    let mut a: Vec<Vec<BigRational>> = (0..p)
        .map(|r| {
            let mut row: Vec<BigRational> = (0..p)
                .map(|c| powers.iter().map(|pw| &pw[r] * &pw[c]).fold(BigRational::zero(), |acc, v| acc + v))
                .collect();
            row.push(powers.iter().zip(&s).map(|(pw, si)| &pw[r] * si).fold(BigRational::zero(), |acc, v| acc + v));
            row
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p).find(|&r| !a[r][col].is_zero()).expect("full rank");
        a.swap(col, pivot);
        for r in 0..p {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..=p {
                    let v = &f * &a[col][c];
                    a[r][c] = &a[r][c] - v;
                }
            }
        }
    }
    let coef: Vec<BigRational> = (0..p).map(|r| &a[r][p] / &a[r][r]).collect();
    let mut total = BigRational::zero();
    for (pw, si) in powers.iter().zip(&s) {
        let fit = pw.iter().zip(&coef).fold(BigRational::zero(), |acc, (x, c)| acc + x * c);
        let e = si - fit;
        total += &e * &e;
    }
    total.to_f64().expect("representable")
}

#[test]
fn degree_five_matches_normal_equations() {
    let mut r = rng(31);
    for _ in 0..3 {
        let s: Vec<f64> = (0..100).map(|_| r.gen_range(-1.0..1.0)).collect();
        let fit = fitted_values(&polyfit(&s, 5).unwrap(), 100);
        let got: f64 = fit.iter().zip(&s).map(|(a, b)| (a - b).powi(2)).sum();
        let want = exact_residual(&s, 5);
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
    }
}

#[test]
fn horner_matches_power_sum_oracle() {
    let mut r = rng(32);
    for _ in 0..50 {
        let c: Vec<f64> = (0..r.gen_range(1..9)).map(|_| r.gen_range(-3.0..3.0)).collect();
        let p = PolyTrajectory::from_monomial(c.clone(), -2.0, 6.0).unwrap();
        let t = r.gen_range(-2.0..6.0);
        let u = (t + 2.0) / 4.0 - 1.0;
        let want: f64 = c.iter().enumerate().map(|(k, ck)| ck * f64::powi(u, k as i32)).sum();
        assert!((polyeval(&p, t) - want).abs() < 1e-12);
        assert_eq!(p.coefficient_count(), c.len());
    }
}

#[test]
fn constant_polynomial() {
    let p = PolyTrajectory::from_monomial(vec![-1.25], 0.0, 10.0).unwrap();
    assert!((0..10).all(|i| polyeval(&p, i as f64) == -1.25));
}

#[test]
fn interpolation_reproduces_points() {
    let mut r = rng(33);
    for q in [10, 37, 100] {
        let s: Vec<f64> = (0..q).map(|_| r.gen_range(-1.0..1.0)).collect();
        let p = polyfit(&s, q - 1).unwrap();
        assert!(p.interpolating);
        let fit = fitted_values(&p, q);
        let scale = s.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(fit.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-6 * scale));
    }
}
