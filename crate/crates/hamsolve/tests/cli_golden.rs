//! Golden-file checks of the batch front-end: expression listings, CSV
//! bytes and determinism.

use hamsolve::cli::{parse_config, render_config, run_spec};

/// Second-order benchmark, all five schemes sharing the three-way split and
/// the `1 + t` initial guess, stopped after two iterations (three-term sums).
const FIVE_METHOD_CONFIG: &str = "\
[problem]
p = 2
a = 0
b = 1
alphas = 1, 1
lambda2 = 1
kernel2 = t | t
F2 = 1*u^1
split = 0 ; 1*exp(t), -3/4*t ; -1/4*t

[method.nd]
variant = NDHAM
hbar = -1
iterations = 2

[method.standard]
variant = HAM
hbar = -1
iterations = 2
initial_guess = 1, 1*t

[method.expansion]
variant = MHAM
hbar = -1
iterations = 2
initial_guess = 1, 1*t

[method.staged]
variant = mHAM
hbar = -1
iterations = 2

[method.embedded]
variant = QHAM
hbar = -2
n = 2
iterations = 2
initial_guess = 1, 1*t

[output]
expressions = true
exact = exp(t)
";

const QUADRATIC_CONFIG: &str = "\
[problem]
p = 1
a = 0
b = 1
alphas = 0
lambda1 = 1
kernel1 = 1 | 1
F1 = 1*u^2
split = -1 ; 0

[method.ndham]
variant = NDHAM
hbar = -1
iterations = 5

[output]
grid = 0, 0.0938, 0.3125, 0.5, 0.7188, 0.9062, 1
csv = unused.csv
";

/// The quadratic benchmark's CSV on the published grid; the value column
/// agrees with tabulated results to all nine printed decimals.
const QUADRATIC_GOLDEN_CSV: &str = "\
s,ndham
0.000000000,0.000000000
0.093800000,-0.093793549
0.312500000,-0.311706425
0.500000000,-0.494822508
0.718800000,-0.696941464
0.906200000,-0.851934173
1.000000000,-0.920475703
";

#[test]
fn five_method_listing_contains_exact_defects() {
    let spec = parse_config(FIVE_METHOD_CONFIG).unwrap();
    let output = run_spec(&spec).unwrap();

    // three-term defect monomials, exact per scheme
    let expect = [
        ("[nd]", "defect[2] = (1/2160)*t^3"),
        ("[standard]", "defect[2] = -(1/1080)*t^3"),
        // the expansion scheme subtracts x_0 = 0 at its first step, so the
        // shared split sends it down a different (coarser) trajectory
        ("[expansion]", "defect[2] = (1/54)*t^3"),
        ("[staged]", "defect[2] = (1/2160)*t^3"),
        ("[embedded]", "defect[2] = -(1/1080)*t^3"),
    ];
    let mut cursor = 0;
    for (header, defect_line) in expect {
        let section = output.listing[cursor..]
            .find(header)
            .unwrap_or_else(|| panic!("missing section {header}"));
        cursor += section;
        let rest = &output.listing[cursor..];
        let end = rest.find("\n\n").unwrap_or(rest.len());
        assert!(
            rest[..end].contains(defect_line),
            "{header} should contain '{defect_line}', got:\n{}",
            &rest[..end]
        );
    }
    assert!(output.listing.contains("u[0] = 1 + t"));
}

#[test]
fn quadratic_csv_matches_golden_bytes() {
    let spec = parse_config(QUADRATIC_CONFIG).unwrap();
    let output = run_spec(&spec).unwrap();
    assert_eq!(output.csv.as_deref(), Some(QUADRATIC_GOLDEN_CSV));
}

#[test]
fn outputs_are_deterministic() {
    for config in [FIVE_METHOD_CONFIG, QUADRATIC_CONFIG] {
        let spec = parse_config(config).unwrap();
        let first = run_spec(&spec).unwrap();
        let second = run_spec(&parse_config(config).unwrap()).unwrap();
        assert_eq!(first, second);
    }
}

#[test]
fn renderer_round_trips_both_configs() {
    for config in [FIVE_METHOD_CONFIG, QUADRATIC_CONFIG] {
        let spec = parse_config(config).unwrap();
        let reparsed = parse_config(&render_config(&spec)).unwrap();
        assert_eq!(spec, reparsed);
    }
}
