//! Exact-algebra property checks run by `qss verify`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::adversary::bell_resend_ensemble;
use crate::belltest::{
    chsh2_exact, chsh4_exact, default_settings, optimal_pair_settings, violation_threshold_check, Verdict, SMOLIN_VALUE,
};
use crate::measurement::{bell_probabilities, bell_project};
use crate::qstate::{depolarize, partial_trace, partial_transpose, smolin_state, BellLabel, ALGEBRA_TOL, PSD_TOL};

/// Minimum partial-transpose eigenvalue expected across a 1|3 cut.
pub const NPT_MARGIN: f64 = -1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

/// The three ways to split four qubits into two pairs, given by the pair
/// containing qubit 0's partner.
pub const TWO_TWO_CUTS: [[usize; 2]; 3] = [[2, 3], [1, 3], [1, 2]];

pub fn run_all() -> Vec<CheckResult> {
    let s = smolin_state();
    let table = default_settings();
    let mut out = Vec::new();

    let ev = s.eigenvalues();
    let (zeros, quarters) = ev.split_at(12);
    let ok = zeros.iter().all(|e| e.abs() < ALGEBRA_TOL) && quarters.iter().all(|e| (e - 0.25).abs() < ALGEBRA_TOL);
    out.push(CheckResult::new("smolin-eigenvalues", ok, format!("min={:.3e} max={:.12}", ev[0], ev[15])));

    let purity = s.purity();
    out.push(CheckResult::new("smolin-purity", (purity - 0.25).abs() < ALGEBRA_TOL, format!("tr(rho^2)={purity:.12}")));

    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            let mut order = [0, 1, 2, 3];
            order.swap(a, b);
            worst = worst.max(s.permute_qubits(&order).expect("valid permutation").max_abs_diff(&s));
        }
    }
    out.push(CheckResult::new(
        "smolin-permutation-symmetry",
        worst < ALGEBRA_TOL,
        format!("max deviation={worst:.3e}"),
    ));

    for cut in TWO_TWO_CUTS {
        let min = partial_transpose(&s, &cut).expect("valid cut").min_eigenvalue();
        let label = format!("{}{}|{}{}", 1, other_of(cut, 0) + 1, cut[0] + 1, cut[1] + 1);
        out.push(CheckResult::new(format!("smolin-ppt-{label}"), min >= -PSD_TOL, format!("min eigenvalue={min:.3e}")));
    }
    for q in 0..4 {
        let min = partial_transpose(&s, &[q]).expect("valid cut").min_eigenvalue();
        out.push(CheckResult::new(
            format!("smolin-npt-{}|rest", q + 1),
            min < NPT_MARGIN,
            format!("min eigenvalue={min:.6}"),
        ));
    }

    let v = chsh4_exact(&s, &table).expect("4 qubits").value;
    out.push(CheckResult::new(
        "chsh4-smolin-2sqrt2",
        (v - SMOLIN_VALUE).abs() < ALGEBRA_TOL,
        format!("value={v:.12} expected={SMOLIN_VALUE:.12}"),
    ));

    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let v = chsh4_exact(&depolarize(&s, p).expect("p in range"), &table).expect("4 qubits").value;
        worst = worst.max((v - SMOLIN_VALUE * p).abs());
    }
    out.push(CheckResult::new(
        "chsh4-noise-linear",
        worst < ALGEBRA_TOL,
        format!("max |value - 2sqrt2 p|={worst:.3e}"),
    ));

    let at = |p: f64| {
        let r = chsh4_exact(&depolarize(&s, p).expect("p in range"), &table).expect("4 qubits");
        violation_threshold_check(&r, 0.0)
    };
    let boundary = FRAC_1_SQRT_2;
    let ok = at(boundary) == Verdict::Insecure
        && at(boundary + 1e-9) == Verdict::Secure
        && at(2.0 / 3.0) == Verdict::Insecure;
    out.push(CheckResult::new("verdict-boundary-1/sqrt2", ok, "secure iff p > 1/sqrt2; p = 2/3 insecure"));

    let mut worst: f64 = 0.0;
    for a in BellLabel::ALL {
        let (pa, rest) = bell_project(&s, (0, 1), a).expect("every label occurs");
        let pb = bell_probabilities(&rest, (0, 1)).expect("2 qubits");
        for b in BellLabel::ALL {
            let joint = pa * pb[b.index()];
            let expect = if a == b { 0.25 } else { 0.0 };
            worst = worst.max((joint - expect).abs());
        }
    }
    out.push(CheckResult::new(
        "bell-outcome-agreement",
        worst < ALGEBRA_TOL,
        format!("max |P(a,b) - delta/4|={worst:.3e}"),
    ));

    let avg = bell_resend_ensemble(&s).expect("4 qubits");
    let dev = avg.max_abs_diff(&s);
    let v = chsh4_exact(&avg, &table).expect("4 qubits").value;
    out.push(CheckResult::new(
        "bell-resend-invisible-to-chsh4",
        dev < ALGEBRA_TOL && (v - SMOLIN_VALUE).abs() < ALGEBRA_TOL,
        format!("state deviation={dev:.3e} chsh4={v:.12}"),
    ));

    let pair = optimal_pair_settings();
    let clean = chsh2_exact(&partial_trace(&s, &[0, 1]).expect("valid"), &pair).expect("2 qubits");
    let attacked = chsh2_exact(&partial_trace(&avg, &[0, 1]).expect("valid"), &pair).expect("2 qubits");
    out.push(CheckResult::new(
        "pair-chsh-discrepancy",
        clean.abs() < ALGEBRA_TOL && attacked.abs() < ALGEBRA_TOL,
        format!(
            "qubits 1,2 chsh without attack={clean:.3e} with bell-resend={attacked:.3e}; \
             both below 2, so the two-qubit test does not flag the bell-resend attack"
        ),
    ));

    out
}

fn other_of(cut: [usize; 2], q: usize) -> usize {
    (1..4).find(|x| !cut.contains(x) && *x != q).expect("four qubits")
}
