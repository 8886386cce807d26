//! Adaptive quadrature and bracketing root finding.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

use crate::error::{Error, Result};

/// Floating point type usable for densities.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable")
    }
}

impl Real for f64 {}
impl Real for f32 {}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate on `[a, b]` with the embedded 7-point Gauss error.
fn gk15<F: Real>(f: &dyn Fn(F) -> F, a: F, b: F) -> (F, F) {
    let half = (b - a) / F::c(2.0);
    let mid = (a + b) / F::c(2.0);
    let fc = f(mid);
    let mut kron = fc * F::c(WGK[7]);
    let mut gauss = fc * F::c(WG[3]);
    for j in 0..7 {
        let dx = half * F::c(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * F::c(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * F::c(WG[j / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`; either bound may be infinite.
pub fn integrate<F: Real>(f: impl Fn(F) -> F, a: F, b: F, tol: F) -> Result<F> {
    integrate_dyn(&f, a, b, tol)
}

fn integrate_dyn<F: Real>(f: &dyn Fn(F) -> F, a: F, b: F, tol: F) -> Result<F> {
    if a == b {
        return Ok(F::zero());
    }
    if a > b {
        return integrate_dyn(f, b, a, tol).map(|v| -v);
    }
    let one = F::one();
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(f, a, b, tol),
        // x = a + u/(1-u)
        (true, false) => adaptive(
            &|u: F| {
                let v = one - u;
                let y = f(a + u / v) / (v * v);
                if y.is_finite() { y } else { F::zero() }
            },
            F::zero(),
            one,
            tol,
        ),
        (false, true) => adaptive(
            &|u: F| {
                let v = one - u;
                let y = f(b - u / v) / (v * v);
                if y.is_finite() { y } else { F::zero() }
            },
            F::zero(),
            one,
            tol,
        ),
        (false, false) => {
            let left = integrate_dyn(f, F::neg_infinity(), F::zero(), tol / F::c(2.0))?;
            let right = integrate_dyn(f, F::zero(), F::infinity(), tol / F::c(2.0))?;
            Ok(left + right)
        }
    }
}

fn adaptive<F: Real>(f: &dyn Fn(F) -> F, a: F, b: F, tol: F) -> Result<F> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total = parts.iter().fold(F::zero(), |s, p| s + p.2);
        let err = parts.iter().fold(F::zero(), |s, p| s + p.3);
        if !total.is_finite() {
            return Err(Error::Numeric(format!("non-finite integral on [{a:?}, {b:?}]")));
        }
        if err <= tol {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature on [{a:?}, {b:?}] did not converge: error estimate {err:?} > {tol:?}"
            )));
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = (lo + hi) / F::c(2.0);
        if mid <= lo || mid >= hi {
            return Err(Error::Numeric(format!("quadrature interval collapsed near {mid:?}")));
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Finds `x` in `[lo, hi]` with `pred(x)` switching from `true` (at `lo`) to
/// `false` (at `hi`); returns the last `true` point once the bracket is
/// narrower than `xtol`.
pub fn bisect_predicate<F: Real>(mut lo: F, mut hi: F, xtol: F, pred: impl Fn(F) -> bool) -> F {
    for _ in 0..400 {
        let mid = (lo + hi) / F::c(2.0);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Root of a continuous `g` on `[lo, hi]` where `g(lo)` and `g(hi)` differ in sign.
pub fn bisect_root<F: Real>(g: impl Fn(F) -> F, lo: F, hi: F, xtol: F) -> Result<F> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo == F::zero() {
        return Ok(lo);
    }
    if ghi == F::zero() {
        return Ok(hi);
    }
    if (glo > F::zero()) == (ghi > F::zero()) {
        return Err(Error::Numeric(format!("no sign change on [{lo:?}, {hi:?}]")));
    }
    let positive_low = glo > F::zero();
    let x = bisect_predicate(lo, hi, xtol, |x| (g(x) > F::zero()) == positive_low);
    Ok(x)
}
