//! Function sets used by the verification suites.

use crate::functions::{Atom, FunctionSpec, IntegralRep, TableSpec};

use super::sampling::{random_al_rep, trial_rng};

/// Stream offset for catalog randomness, disjoint from trial streams.
const CATALOG_STREAM: u64 = 1 << 48;

/// Known anti-Löwner functions: identity, reciprocal, `sqrt`, `log1p`, the
/// constant 1, and `al_samples` random atomic `al_rep` instances.
pub fn anti_loewner_catalog(seed: u64, al_samples: usize) -> Vec<FunctionSpec> {
    let mut out = vec![
        FunctionSpec::identity(),
        FunctionSpec::reciprocal(),
        FunctionSpec::power(0.5).expect("valid exponent"),
        FunctionSpec::log1p(),
        FunctionSpec::constant(1.0).expect("valid constant"),
    ];
    let mut rng = trial_rng(seed, CATALOG_STREAM);
    out.extend((0..al_samples).map(|_| random_al_rep(&mut rng)));
    out
}

/// Positive functions that are not anti-Löwner of order 2.
pub fn non_anti_loewner_catalog() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::power(2.0).expect("valid exponent"),
        FunctionSpec::power(3.0).expect("valid exponent"),
    ]
}

/// `sqrt` tabulated at five knots on `[0.5, 8]`.
pub fn sqrt_table() -> FunctionSpec {
    let knots = vec![0.5, 1.0, 2.0, 4.0, 8.0];
    let values = knots.iter().map(|k: &f64| k.sqrt()).collect();
    FunctionSpec::table(TableSpec::new(knots, values).expect("valid table")).expect("valid table")
}

/// One representative of every kind.
pub fn full_catalog(seed: u64) -> Vec<FunctionSpec> {
    let mut out = anti_loewner_catalog(seed, 2);
    out.extend(non_anti_loewner_catalog());
    out.push(FunctionSpec::om_rep(
        IntegralRep::new(0.5, 1.0, vec![Atom { t: 2.0, w: 1.5 }, Atom { t: 0.1, w: 0.3 }]).expect("valid rep"),
    ));
    out.push(sqrt_table());
    out.push(
        FunctionSpec::sum(vec![
            (0.5, FunctionSpec::power(0.5).expect("valid exponent")),
            (2.0, FunctionSpec::log1p()),
        ])
        .expect("valid sum"),
    );
    out
}
