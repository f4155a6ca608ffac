use num_bigint::BigUint;
use serde::Serialize;

use crate::{error::domain, Result};

/// One side-by-side comparison, with both sides as exact decimal integers.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// Both combinatorial inequalities at `(q, p)`.
#[derive(Debug, Clone, Serialize)]
pub struct FacileReport {
    pub q: u32,
    pub p: u32,
    /// `Σ_{r=1}^{2q} ((r-1)!)² C(2q,r-1)⁴ (2(2q+1)-2r)! <= ((2q)!)² 3^{4q}`
    pub first: InequalityCheck,
    /// `Σ_{r=1}^{2q+1} ((r-1)!)² C(2q,r-1)² C(2p,r-1)² (2q+2p+2-2r)! <= (2q)!(2p)! 3^{2q+2p}`
    pub second: InequalityCheck,
}

impl FacileReport {
    pub fn holds(&self) -> bool {
        self.first.holds && self.second.holds
    }
}

/// Exact evaluation of both inequalities for `1 <= q <= p <= 8`.
pub fn facile_check(q: u32, p: u32) -> Result<FacileReport> {
    if q == 0 || q > p || p > 8 {
        return domain(format!(
            "facile check needs 1 <= q <= p <= 8, got q = {q}, p = {p}"
        ));
    }
    let (q2, p2) = (2 * q, 2 * p);
    let three = BigUint::from(3u32);

    let first_lhs: BigUint = (1..=q2)
        .map(|r| {
            let f = factorial(r - 1);
            &f * &f * binomial(q2, r - 1).pow(4) * factorial(2 * (q2 + 1) - 2 * r)
        })
        .sum();
    let first_rhs = factorial(q2).pow(2) * three.pow(4 * q);

    let second_lhs: BigUint = (1..=q2 + 1)
        .map(|r| {
            let f = factorial(r - 1);
            &f * &f
                * binomial(q2, r - 1).pow(2)
                * binomial(p2, r - 1).pow(2)
                * factorial(q2 + p2 + 2 - 2 * r)
        })
        .sum();
    let second_rhs = factorial(q2) * factorial(p2) * three.pow(q2 + p2);

    Ok(FacileReport {
        q,
        p,
        first: check(first_lhs, first_rhs),
        second: check(second_lhs, second_rhs),
    })
}

fn check(lhs: BigUint, rhs: BigUint) -> InequalityCheck {
    InequalityCheck {
        holds: lhs <= rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}
