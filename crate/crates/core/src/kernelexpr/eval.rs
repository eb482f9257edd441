use super::ExprNode::{self, *};
use crate::error::{Error, Result};
use crate::jet::{HermJet, HoloJet};
use crate::linalg::C64;

fn check_dim(e: &ExprNode, m: usize) -> Result<()> {
    if e.min_dim() > m {
        return Err(Error::Range(format!(
            "expression uses z{} but the center has dimension {m}",
            e.min_dim()
        )));
    }
    Ok(())
}

fn herm(e: &ExprNode, c: &[C64], p: usize, q: usize) -> Result<HermJet> {
    Ok(match e {
        Var(k) => HermJet::holo_var(c, p, q, *k),
        ConjVar(k) => HermJet::anti_var(c, p, q, *k),
        Literal(v) => HermJet::scalar_constant(c, p, q, *v),
        Sum(a, b) => herm(a, c, p, q)?.add(&herm(b, c, p, q)?)?,
        Product(a, b) => herm(a, c, p, q)?.mul(&herm(b, c, p, q)?)?,
        Quotient(a, b) => {
            let den = herm(b, c, p, q)?;
            if den.scalar_value().norm() == 0.0 {
                return Err(Error::Singular(format!("denominator {b} vanishes at the center")));
            }
            herm(a, c, p, q)?.mul(&den.inverse()?)?
        }
        IntPow(a, k) => herm(a, c, p, q)?.powi(*k)?,
        RealPow(a, r) => herm(a, c, p, q)?.powf(*r)?,
        Exp(a) => herm(a, c, p, q)?.exp()?,
        Log(a) => herm(a, c, p, q)?.ln()?,
        Neg(a) => herm(a, c, p, q)?.neg(),
    })
}

/// Taylor coefficients of a scalar expression in `(z - c, zbar - conj c)`.
pub fn eval_herm_jet(e: &ExprNode, center: &[C64], holo: usize, anti: usize) -> Result<HermJet> {
    check_dim(e, center.len())?;
    herm(e, center, holo, anti)
}

/// Taylor coefficients of a holomorphic scalar expression.
pub fn eval_holo_jet(e: &ExprNode, center: &[C64], order: usize) -> Result<HoloJet> {
    if e.has_conj() {
        return Err(Error::Type(format!("holomorphic expression expected, found conjugate variable in {e}")));
    }
    HoloJet::from_herm(eval_herm_jet(e, center, order, 0)?)
}

/// Value with `z = z` and `zb = wbar` taken independently.
pub fn eval_point(e: &ExprNode, z: &[C64], wbar: &[C64]) -> Result<C64> {
    check_dim(e, z.len().min(wbar.len()))?;
    point(e, z, wbar)
}

fn point(e: &ExprNode, z: &[C64], w: &[C64]) -> Result<C64> {
    Ok(match e {
        Var(k) => z[*k],
        ConjVar(k) => w[*k],
        Literal(v) => *v,
        Sum(a, b) => point(a, z, w)? + point(b, z, w)?,
        Product(a, b) => point(a, z, w)? * point(b, z, w)?,
        Quotient(a, b) => {
            let d = point(b, z, w)?;
            if d.norm() == 0.0 {
                return Err(Error::Singular(format!("denominator {b} vanishes")));
            }
            point(a, z, w)? / d
        }
        IntPow(a, k) => {
            let v = point(a, z, w)?;
            if *k < 0 && v.norm() == 0.0 {
                return Err(Error::Singular("negative power of zero".into()));
            }
            v.powi(*k as i32)
        }
        RealPow(a, r) => {
            let v = point(a, z, w)?;
            if r.fract() == 0.0 {
                v.powi(*r as i32)
            } else {
                v.powf(*r)
            }
        }
        Exp(a) => point(a, z, w)?.exp(),
        Log(a) => point(a, z, w)?.ln(),
        Neg(a) => -point(a, z, w)?,
    })
}
