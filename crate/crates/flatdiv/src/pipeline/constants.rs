//! The constant recipe evaluated in log form, and how a practical
//! profile compares with it.

use crate::census::{nu_for, ConstantsProfile};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsInput {
    pub genus: usize,
    /// Number of zeros and marked points.
    pub sigma: usize,
    pub systole: f64,
    pub profile: ConstantsProfile,
    /// Constants the recipe leaves implicit; `None` keeps them symbolic.
    pub d4: Option<f64>,
    pub c3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Set when the right side is only a bound on an implicit constant.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Identity {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperConstants {
    pub t1: i64,
    pub log2_log2_t0: f64,
    pub ln_t0: f64,
    pub ln_r0_prime: f64,
    pub ln_d1: f64,
    pub d2: f64,
    pub ln_d3: f64,
    pub d4: Option<f64>,
    pub c3: Option<f64>,
    /// `log D`, known only when `d4` is.
    pub ln_big_d: Option<f64>,
    pub theta2: f64,
    /// Every term of the maximum defining `R0''`, as logarithms.
    pub r0_double_prime_terms: Vec<(String, f64)>,
    pub ln_r0_double_prime: f64,
    /// Lower bound for `log R0`; exact when `c3` is known.
    pub ln_r0: f64,
    pub requirements: Vec<Requirement>,
    pub identities: Vec<Identity>,
    pub desk_feasible: bool,
    pub verdict: String,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

/// Evaluate the constant recipe for a surface of genus `g` with `sigma`
/// singular or marked points and flat systole `systole`.
pub fn paper_constants(input: &ConstantsInput) -> PaperConstants {
    let k = &input.profile;
    let g = input.genus as f64;
    let t1 = 2 * input.genus as i64 + input.sigma as i64 - 2;
    let log2_log2_t0 = 4.0 * t1 as f64;
    let ln_t0 = 2f64.powf(log2_log2_t0) * LN_2;
    let ln_r0_prime = 0.5 * LN_2 + 2.0 * ln_t0 - input.systole.ln();
    let ln_d1 = -log_add_exp((16.0 * 3f64.sqrt()).ln() + 2.0 * ln_r0_prime, 20f64.ln());
    let d2 = 1.0 / t1 as f64;
    let ln_d3 = log_add_exp((4.0 * 3f64.sqrt()).ln() + 2.0 * ln_r0_prime, 6f64.ln());
    let ln_big_d = input.d4.map(|d4| LN_2.max(0.5 * ((2.0 * d4).ln() - ln_d1)));
    let cot1 = 1.0 / k.theta1.tan();
    let theta2 = (k.theta1.tan() / 10.0).atan();

    let mut terms = vec![
        ("R0'".to_string(), ln_r0_prime),
        ("exp(4/d3)".to_string(), 4.0 * (-ln_d3).exp()),
        ("1/Sys".to_string(), -input.systole.ln()),
        ("exp(4/C)".to_string(), 4.0 / k.big_c),
        ("exp(M)".to_string(), k.big_m),
        ("exp(4/(delta cot theta1))".to_string(), 4.0 / (k.delta * cot1)),
        ("sqrt(12 L^2 cot theta1 / pi)".to_string(), 0.5 * (12.0 * k.big_l * k.big_l * cot1 / PI).ln()),
        ("exp(1/cot theta1)".to_string(), 1.0 / cot1),
        ("sqrt(4L / (pi sin theta2))".to_string(), 0.5 * (4.0 * k.big_l / (PI * theta2.sin())).ln()),
        ("sqrt(8 / (delta pi))".to_string(), 0.5 * (8.0 / (k.delta * PI)).ln()),
    ];
    if let Some(ld) = ln_big_d {
        terms.push(("D".to_string(), ld));
    }
    let ln_r0_double_prime = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut ln_r0 = ln_r0_double_prime;
    if let Some(c3) = input.c3 {
        ln_r0 = ln_r0
            .max(c3 / (2.0 * 2f64.sqrt() * k.delta * k.delta * k.theta0.sin()))
            .max((2.0 * c3 / k.delta).ln());
    }

    let mut req = Vec::new();
    let mut push = |name: &str, lhs: f64, rhs: f64, note: Option<&str>| {
        req.push(Requirement { name: name.into(), lhs, rhs, holds: lhs < rhs, note: note.map(str::to_string) });
    };
    match ln_big_d {
        Some(ld) => push("delta < c / (512 D^4)", k.delta, k.c / 512.0 * (-4.0 * ld).exp(), None),
        None => push("delta < c / (512 D^4)", k.delta, k.c / (512.0 * 16.0), Some("D unknown; uses D >= 2")),
    }
    if input.genus >= 2 {
        push("delta < c / (576 sqrt2 (g - 1))", k.delta, k.c / (576.0 * 2f64.sqrt() * (g - 1.0)), None);
    }
    push("delta < Sys", k.delta, input.systole, None);
    push("c < d2", k.c, d2, None);
    push("c < 1 / (2 g T1)", k.c, 1.0 / (2.0 * g * t1 as f64), None);
    let nu = nu_for(k.delta, k.c, input.genus);
    let m_need = 6.0 * k.big_l / (2.0 / (1.0 + 2.0 * nu)).ln();
    if 1.0 + 2.0 * nu < 2.0 {
        push("6 L / log(2 / (1 + 2 nu)) < m", m_need, k.m as f64, None);
    } else {
        push("6 L / log(2 / (1 + 2 nu)) < m", f64::INFINITY, k.m as f64, Some("nu >= 1/2 leaves no admissible m"));
    }
    push("21 < M", 21.0, k.big_m, None);

    let identities = vec![
        Identity {
            name: "C = L c / (16 M)".into(),
            value: k.big_c,
            expected: k.big_l * k.c / (16.0 * k.big_m),
            ok: close(k.big_c, k.big_l * k.c / (16.0 * k.big_m)),
        },
        Identity { name: "nu = delta 192 sqrt2 (g - 1) / c".into(), value: k.nu, expected: nu, ok: close(k.nu, nu) },
        Identity {
            name: "M = 2^(m+2) L / delta".into(),
            value: k.big_m,
            expected: 2f64.powi(k.m as i32 + 2) * k.big_l / k.delta,
            ok: close(k.big_m, 2f64.powi(k.m as i32 + 2) * k.big_l / k.delta),
        },
    ];

    let ln_limit = 52.0 * LN_2;
    let all_hold = req.iter().all(|r| r.holds);
    let desk_feasible = all_hold && ln_r0 < ln_limit;
    let verdict = if desk_feasible {
        "the recipe's starting length fits in double precision and the profile meets every requirement".to_string()
    } else if ln_r0 >= ln_limit {
        format!(
            "infeasible at desk scale: log R0 >= {:.4e}, far beyond log 2^52 = {:.2}; {} of {} requirements hold for the supplied profile",
            ln_r0,
            ln_limit,
            req.iter().filter(|r| r.holds).count(),
            req.len()
        )
    } else {
        "the supplied profile violates at least one requirement".to_string()
    };

    PaperConstants {
        t1,
        log2_log2_t0,
        ln_t0,
        ln_r0_prime,
        ln_d1,
        d2,
        ln_d3,
        d4: input.d4,
        c3: input.c3,
        ln_big_d,
        theta2,
        r0_double_prime_terms: terms,
        ln_r0_double_prime,
        ln_r0,
        requirements: req,
        identities,
        desk_feasible,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_one_zero() {
        let r = paper_constants(&ConstantsInput {
            genus: 2,
            sigma: 1,
            systole: 0.5,
            profile: ConstantsProfile::default_h2(),
            d4: None,
            c3: None,
        });
        assert_eq!(r.t1, 3);
        assert_eq!(r.log2_log2_t0, 12.0);
        assert!(r.identities.iter().all(|i| i.ok));
        assert!(!r.desk_feasible);
    }

    #[test]
    fn log_add_exp_is_stable() {
        assert!((log_add_exp(1000.0, 0.0) - 1000.0).abs() < 1e-12);
        assert!((log_add_exp(2f64.ln(), 3f64.ln()) - 5f64.ln()).abs() < 1e-15);
    }
}
