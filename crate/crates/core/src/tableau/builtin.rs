use super::{ButcherTableau, SchemeTableau, ShuOsherTableau};

/// A named scheme shipped with the crate.
#[derive(Clone, Debug)]
pub struct BuiltinScheme {
    /// Short lookup key used by configs and the command line (`sifrk22`).
    pub key: &'static str,
    pub tableau: SchemeTableau,
}

/// First-order scheme: `u^{n+1} = e^{tau L}(u^n + tau N[u^n])`.
pub fn sifrk11() -> ButcherTableau {
    ButcherTableau::new("sIFRK(1,1)", 1, vec![vec![1.0]], vec![0.0, 1.0]).unwrap()
}

/// The second-order family with `s` equal substeps of length `tau/s`
/// followed by a final averaged stage.
///
/// Rows `1..s-1` carry `1/s` in every column; the last row has weight `0`
/// on `u^n` and `1/(s-1)` on every interior stage.
pub fn sifrk_s2(s: usize) -> ButcherTableau {
    assert!(s >= 2, "sIFRK(s,2) needs at least two stages");
    let inv_s = 1.0 / s as f64;
    let mut a: Vec<Vec<f64>> = (1..s).map(|i| vec![inv_s; i]).collect();
    let mut last = vec![1.0 / (s - 1) as f64; s];
    last[0] = 0.0;
    a.push(last);
    let mut c: Vec<f64> = (0..s).map(|i| i as f64 / s as f64).collect();
    c.push(1.0);
    ButcherTableau::new(format!("sIFRK({s},2)"), 2, a, c).unwrap()
}

/// Third-order Heun scheme with abscissas `[0, 1/3, 2/3, 1]`.
pub fn heun_sifrk33() -> ButcherTableau {
    ButcherTableau::new(
        "Heun-sIFRK(3,3)",
        3,
        vec![
            vec![1.0 / 3.0],
            vec![0.0, 2.0 / 3.0],
            vec![0.25, 0.0, 0.75],
        ],
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
    )
    .unwrap()
}

/// SSP second-order family in Shu-Osher form.
///
/// `s - 1` forward-Euler substeps of length `tau/(s-1)`, then
/// `u^{n+1} = (1/s) e^{tau L} u^n + ((s-1)/s)(u^{(s-1)} + tau/(s-1) N[u^{(s-1)}])`.
/// Abscissas are `[0, 1/(s-1), ..., 1, 1]`.
pub fn ssp_sifrk_s2(s: usize) -> ShuOsherTableau {
    assert!(s >= 2, "SSP-sIFRK(s,2) needs at least two stages");
    let m = (s - 1) as f64;
    let mut alpha = Vec::with_capacity(s);
    let mut beta = Vec::with_capacity(s);
    for i in 1..s {
        let mut a_row = vec![0.0; i];
        let mut b_row = vec![0.0; i];
        a_row[i - 1] = 1.0;
        b_row[i - 1] = 1.0 / m;
        alpha.push(a_row);
        beta.push(b_row);
    }
    let mut a_last = vec![0.0; s];
    let mut b_last = vec![0.0; s];
    a_last[0] = 1.0 / s as f64;
    a_last[s - 1] = m / s as f64;
    b_last[s - 1] = 1.0 / s as f64;
    alpha.push(a_last);
    beta.push(b_last);
    let mut c: Vec<f64> = (0..s).map(|i| i as f64 / m).collect();
    c.push(1.0);
    ShuOsherTableau::new(format!("SSP-sIFRK({s},2)"), 2, alpha, beta, c).unwrap()
}

/// SSP third-order scheme in Shu-Osher form, abscissas `[0, 2/3, 2/3, 1]`.
///
/// The two `u^n` terms of the last stage (weights 59/128 and 15/128, both
/// behind `e^{tau L}`) are merged into a single `alpha[3][0] = 37/64`.
pub fn ssp_sifrk33() -> ShuOsherTableau {
    let alpha = vec![
        vec![1.0],
        vec![2.0 / 3.0, 1.0 / 3.0],
        vec![37.0 / 64.0, 0.0, 27.0 / 64.0],
    ];
    let beta = vec![
        vec![2.0 / 3.0],
        vec![0.0, 4.0 / 9.0],
        vec![5.0 / 32.0, 0.0, 9.0 / 16.0],
    ];
    ShuOsherTableau::new(
        "SSP-sIFRK(3,3)",
        3,
        alpha,
        beta,
        vec![0.0, 2.0 / 3.0, 2.0 / 3.0, 1.0],
    )
    .unwrap()
}

/// All schemes shipped with the crate, in a fixed order.
pub fn builtin_tableaus() -> Vec<BuiltinScheme> {
    vec![
        BuiltinScheme {
            key: "sifrk11",
            tableau: sifrk11().into(),
        },
        BuiltinScheme {
            key: "sifrk22",
            tableau: sifrk_s2(2).into(),
        },
        BuiltinScheme {
            key: "sifrk32",
            tableau: sifrk_s2(3).into(),
        },
        BuiltinScheme {
            key: "sifrk42",
            tableau: sifrk_s2(4).into(),
        },
        BuiltinScheme {
            key: "heun33",
            tableau: heun_sifrk33().into(),
        },
        BuiltinScheme {
            key: "ssp-sifrk22",
            tableau: ssp_sifrk_s2(2).into(),
        },
        BuiltinScheme {
            key: "ssp-sifrk33",
            tableau: ssp_sifrk33().into(),
        },
    ]
}

/// Looks up a built-in scheme by key (case-insensitive, `_` and `-` interchangeable).
pub fn lookup_builtin(key: &str) -> Option<SchemeTableau> {
    let wanted = key.trim().to_ascii_lowercase().replace('_', "-");
    builtin_tableaus()
        .into_iter()
        .find(|b| b.key == wanted)
        .map(|b| b.tableau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{shu_osher_to_butcher, validate_butcher, Verdict};

    #[test]
    fn sifrk32_abscissas() {
        let c = sifrk_s2(3).abscissas().to_vec();
        assert_eq!(c, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn sifrk42_final_row_weights() {
        let t = sifrk_s2(4);
        assert_eq!(t.row(4), &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        // gaps of the final row are 3/4, 1/2, 1/4
        let gaps: Vec<f64> = (1..4).map(|j| t.c(4) - t.c(j)).collect();
        assert_eq!(gaps, vec![0.75, 0.5, 0.25]);
    }

    #[test]
    fn heun_final_row() {
        assert_eq!(heun_sifrk33().row(3), &[0.25, 0.0, 0.75]);
    }

    #[test]
    fn every_builtin_passes_structural_validation() {
        for b in builtin_tableaus() {
            let t = b.tableau.to_butcher();
            assert_eq!(validate_butcher(&t).verdict, Verdict::Certified, "{}", b.key);
            for i in 1..=t.stages() {
                let sum: f64 = t.row(i).iter().sum();
                assert!((sum - t.c(i)).abs() <= 1e-14, "{} row {i}", b.key);
            }
        }
    }

    #[test]
    fn ssp_s2_matches_ssp22_for_s_equal_two() {
        let so = ssp_sifrk_s2(2);
        assert_eq!(so.alpha_rows(), &[vec![1.0], vec![0.5, 0.5]]);
        assert_eq!(so.beta_rows(), &[vec![1.0], vec![0.0, 0.5]]);
        let b = shu_osher_to_butcher(&so);
        assert_eq!(b.abscissas(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn lookup_is_forgiving_about_case_and_separator() {
        assert!(lookup_builtin("SSP_sIFRK22").is_some());
        assert!(lookup_builtin("Heun33").is_some());
        assert!(lookup_builtin("rk4").is_none());
    }
}
