//! Seeded generators for Gram expressions used by tests, benches and the CLI.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::kernelexpr::{BundleSpec, ExprNode};
use crate::linalg::{CMat, C64};

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> C64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// Entries uniform in the unit square `[0,1) + i[0,1)`.
pub fn unit_square_matrix(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>(), rng.random::<f64>()))
}

fn lit(v: C64) -> String {
    ExprNode::Literal(v).to_string()
}

/// Monomials `z^a` with `1 <= |a| <= degree` in `m` variables, as `(var, power)` lists.
fn monomials(m: usize, degree: usize) -> Vec<Vec<(usize, usize)>> {
    let t = crate::jet::table(m, degree);
    t.indices
        .iter()
        .skip(1)
        .map(|a| a.0.iter().enumerate().filter(|(_, &p)| p > 0).map(|(k, &p)| (k, p)).collect())
        .collect()
}

fn monomial_text(mono: &[(usize, usize)], conj: bool) -> String {
    mono.iter()
        .map(|&(k, p)| {
            let v = if conj { format!("zb{}", k + 1) } else { format!("z{}", k + 1) };
            if p == 1 {
                v
            } else {
                format!("{v}^{p}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Random holomorphic polynomial matrix `B(z)`, as coefficient lists per entry.
pub struct PolyMatrix {
    pub m: usize,
    pub rank: usize,
    monos: Vec<Vec<(usize, usize)>>,
    /// `coeffs[r][c][k]` multiplies monomial `k`; constant terms separate.
    coeffs: Vec<Vec<Vec<C64>>>,
    constants: Vec<Vec<C64>>,
}

impl PolyMatrix {
    pub fn random(rng: &mut impl Rng, m: usize, rank: usize, degree: usize, scale: f64) -> Self {
        let monos = monomials(m, degree);
        let coeffs = (0..rank)
            .map(|_| (0..rank).map(|_| monos.iter().map(|_| random_complex(rng, scale)).collect()).collect())
            .collect();
        let constants = (0..rank).map(|_| (0..rank).map(|_| random_complex(rng, scale)).collect()).collect();
        PolyMatrix { m, rank, monos, coeffs, constants }
    }

    /// Entry `(r, c)` of `B(z)` (`conj = false`) or of `conj(B(z))` in `zb` variables.
    pub fn entry(&self, r: usize, c: usize, conj: bool) -> String {
        let fix = |v: C64| if conj { v.conj() } else { v };
        let mut parts = vec![lit(fix(self.constants[r][c]))];
        for (k, mono) in self.monos.iter().enumerate() {
            parts.push(format!("{}*{}", lit(fix(self.coeffs[r][c][k])), monomial_text(mono, conj)));
        }
        format!("({})", parts.join(" + "))
    }
}

/// `H = I + B B^*` for a random holomorphic polynomial matrix `B`.
pub fn random_polynomial_gram(rng: &mut impl Rng, m: usize, rank: usize, degree: usize) -> Result<BundleSpec> {
    let b = PolyMatrix::random(rng, m, rank, degree, 0.6);
    let gram: Vec<Vec<String>> = (0..rank)
        .map(|r| {
            (0..rank)
                .map(|c| {
                    let mut terms: Vec<String> = (0..rank)
                        .map(|k| format!("{}*{}", b.entry(r, k, false), b.entry(c, k, true)))
                        .collect();
                    if r == c {
                        terms.insert(0, "1".into());
                    }
                    terms.join(" + ")
                })
                .collect()
        })
        .collect();
    BundleSpec::parse(&format!("random-poly(m={m},l={rank})"), m, &gram)
}

/// Random point with every coordinate inside a disc of radius `radius`.
pub fn random_point(rng: &mut impl Rng, m: usize, radius: f64) -> Vec<C64> {
    (0..m).map(|_| random_complex(rng, radius / std::f64::consts::SQRT_2)).collect()
}

fn bx(e: ExprNode) -> Box<ExprNode> {
    Box::new(e)
}

fn e_mul(a: ExprNode, b: ExprNode) -> ExprNode {
    ExprNode::Product(bx(a), bx(b))
}

fn e_add(a: ExprNode, b: ExprNode) -> ExprNode {
    ExprNode::Sum(bx(a), bx(b))
}

fn e_neg(a: ExprNode) -> ExprNode {
    ExprNode::Neg(bx(a))
}

fn e_sum(terms: Vec<ExprNode>) -> ExprNode {
    terms.into_iter().reduce(e_add).unwrap_or_else(|| ExprNode::lit(0.0))
}

/// Random holomorphic matrix `A(z) = I + C0 + sum_k z_k C_k + z_1 z_m C'`,
/// with small coefficients so that `A` stays invertible near the origin.
pub fn random_holomorphic_matrix(rng: &mut impl Rng, m: usize, l: usize, scale: f64) -> Vec<Vec<ExprNode>> {
    (0..l)
        .map(|r| {
            (0..l)
                .map(|c| {
                    let base = if r == c { 1.0 } else { 0.0 };
                    let mut terms = vec![ExprNode::Literal(C64::new(base, 0.0) + random_complex(rng, scale))];
                    for k in 0..m {
                        terms.push(e_mul(ExprNode::Literal(random_complex(rng, scale)), ExprNode::Var(k)));
                    }
                    terms.push(e_mul(
                        ExprNode::Literal(random_complex(rng, scale)),
                        e_mul(ExprNode::Var(0), ExprNode::Var(m - 1)),
                    ));
                    e_sum(terms)
                })
                .collect()
        })
        .collect()
}

fn minor(a: &[Vec<ExprNode>], skip_r: usize, skip_c: usize) -> Vec<Vec<ExprNode>> {
    a.iter()
        .enumerate()
        .filter(|(r, _)| *r != skip_r)
        .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != skip_c).map(|(_, e)| e.clone()).collect())
        .collect()
}

fn det(a: &[Vec<ExprNode>]) -> ExprNode {
    match a.len() {
        1 => a[0][0].clone(),
        n => e_sum(
            (0..n)
                .map(|c| {
                    let t = e_mul(a[0][c].clone(), det(&minor(a, 0, c)));
                    if c % 2 == 0 {
                        t
                    } else {
                        e_neg(t)
                    }
                })
                .collect(),
        ),
    }
}

/// Adjugate and determinant, so that `A^{-1} = adj / det`.
pub fn adjugate(a: &[Vec<ExprNode>]) -> (Vec<Vec<ExprNode>>, ExprNode) {
    let n = a.len();
    let adj = if n == 1 {
        vec![vec![ExprNode::lit(1.0)]]
    } else {
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let m = det(&minor(a, c, r));
                        if (r + c) % 2 == 0 {
                            m
                        } else {
                            e_neg(m)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    (adj, det(a))
}

/// Gram `A^{-1} H A^{-*}` of the frame changed by a holomorphic `A`.
pub fn pulled_back(h: &BundleSpec, a: &[Vec<ExprNode>], label: &str) -> Result<BundleSpec> {
    let l = h.rank;
    let (adj, d) = adjugate(a);
    let denom = e_mul(d.clone(), d.conjugate());
    let entries = (0..l)
        .map(|r| {
            (0..l)
                .map(|c| {
                    let mut terms = Vec::new();
                    for k in 0..l {
                        for s in 0..l {
                            terms.push(e_mul(
                                e_mul(adj[r][k].clone(), h.entries[k][s].clone()),
                                adj[c][s].conjugate(),
                            ));
                        }
                    }
                    ExprNode::Quotient(bx(e_sum(terms)), bx(denom.clone()))
                })
                .collect()
        })
        .collect();
    BundleSpec::new(label, h.dim, entries)
}

/// `H + amount * z1 zb1 I`: unchanged on `z1 = 0`, different curvature across it.
pub fn perturbed(h: &BundleSpec, amount: f64, label: &str) -> Result<BundleSpec> {
    let bump = e_mul(ExprNode::lit(amount), e_mul(ExprNode::Var(0), ExprNode::ConjVar(0)));
    let entries = h
        .entries
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, e)| if r == c { e_add(e.clone(), bump.clone()) } else { e.clone() })
                .collect()
        })
        .collect();
    BundleSpec::new(label, h.dim, entries)
}

/// `count` points on `z1 = 0` with the other coordinates in a disc of radius `radius`.
pub fn slice_points(rng: &mut impl Rng, m: usize, count: usize, radius: f64) -> Vec<Vec<C64>> {
    (0..count)
        .map(|_| {
            let mut p = random_point(rng, m, radius);
            p[0] = C64::new(0.0, 0.0);
            p
        })
        .collect()
}
