//! Central finite-difference helpers shared by expression-defined laws and
//! the quadratic-form assembly.
//!
//! Steps are relative: `h_i = step * max(1, |x_i|)`. First derivatives use
//! `step = 1e-6`, second derivatives the four-point cross formula with
//! `step = 1e-4`; both sit near the truncation/roundoff crossover for f64.

use nalgebra::Matrix3;

/// Scalar and vector functions of three variables, as used by the
/// differencing helpers.
pub type ScalarFn3<'a, E> = &'a dyn Fn(&[f64; 3]) -> Result<f64, E>;
pub type VectorFn3<'a, E> = &'a dyn Fn(&[f64; 3]) -> Result<[f64; 3], E>;

pub const FIRST_ORDER_STEP: f64 = 1e-6;
pub const SECOND_ORDER_STEP: f64 = 1e-4;

fn step(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1.0)
}

/// Gradient of a scalar function of three variables.
pub fn gradient3<E>(f: ScalarFn3<E>, x: &[f64; 3], rel_step: f64) -> Result<[f64; 3], E> {
    let mut g = [0.0; 3];
    for i in 0..3 {
        let h = step(x[i], rel_step);
        let mut xp = *x;
        xp[i] += h;
        let mut xm = *x;
        xm[i] -= h;
        g[i] = (f(&xp)? - f(&xm)?) / (2.0 * h);
    }
    Ok(g)
}

/// Jacobian of a vector function of three variables, column by column.
pub fn jacobian3<E>(f: VectorFn3<E>, x: &[f64; 3], rel_step: f64) -> Result<Matrix3<f64>, E> {
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let h = step(x[j], rel_step);
        let mut xp = *x;
        xp[j] += h;
        let mut xm = *x;
        xm[j] -= h;
        let fp = f(&xp)?;
        let fm = f(&xm)?;
        for i in 0..3 {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Hessian of a scalar function by the four-point cross formula,
/// symmetric in (i, j) by construction.
pub fn hessian3<E>(f: ScalarFn3<E>, x: &[f64; 3], rel_step: f64) -> Result<Matrix3<f64>, E> {
    let mut hess = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let hi = step(x[i], rel_step);
            let hj = step(x[j], rel_step);
            let probe = |si: f64, sj: f64| -> Result<f64, E> {
                let mut p = *x;
                p[i] += si * hi;
                p[j] += sj * hj;
                f(&p)
            };
            let value = (probe(1.0, 1.0)? - probe(1.0, -1.0)? - probe(-1.0, 1.0)?
                + probe(-1.0, -1.0)?)
                / (4.0 * hi * hj);
            hess[(i, j)] = value;
            hess[(j, i)] = value;
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_quadratic() {
        let f = |x: &[f64; 3]| -> Result<f64, ()> { Ok(x[0] * x[0] + 2.0 * x[1] * x[2]) };
        let g = gradient3(&f, &[1.0, 2.0, 3.0], FIRST_ORDER_STEP).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8);
        assert!((g[1] - 6.0).abs() < 1e-8);
        assert!((g[2] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn hessian_of_cubic() {
        let f = |x: &[f64; 3]| -> Result<f64, ()> { Ok(x[0].powi(3) + x[0] * x[1] * x[2]) };
        let x = [0.7, -0.3, 1.1];
        let h = hessian3(&f, &x, SECOND_ORDER_STEP).unwrap();
        assert!((h[(0, 0)] - 6.0 * x[0]).abs() < 1e-6);
        assert!((h[(0, 1)] - x[2]).abs() < 1e-6);
        assert!((h[(1, 2)] - x[0]).abs() < 1e-6);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }
}
