//! Metric formulas and worst-case interval propagation.
//!
//! ```sh
//! cargo run --example expressions_and_intervals
//! ```

use std::collections::BTreeMap;

use usat::uncertainty::{parse_expression, propagate_interval, Interval};

fn main() {
    // The phase-error formula from the distributed-test campaign.
    let expr = parse_expression("18*lat + 30*gain + 4000*step").unwrap();
    println!("expression: {expr}");

    let point: BTreeMap<String, f64> = [
        ("lat".to_string(), 12.45),
        ("gain".to_string(), 1.0),
        ("step".to_string(), 7.5e-5),
    ]
    .into();
    println!("at nominal point: {}", expr.eval(&point).unwrap());

    let env: BTreeMap<String, Interval> = [
        ("lat".to_string(), Interval::new(12.18, 13.2).unwrap()),
        ("gain".to_string(), Interval::new(0.9, 1.2).unwrap()),
        ("step".to_string(), Interval::new(5e-5, 1.25e-4).unwrap()),
    ]
    .into();
    let bounds = propagate_interval(&expr, &env).unwrap();
    println!("worst-case bounds: {bounds}");

    // Interval arithmetic is naive: it treats every occurrence of a variable
    // as independent, so `a - a` is not zero.
    let cancel = parse_expression("a - a").unwrap();
    let env: BTreeMap<String, Interval> =
        [("a".to_string(), Interval::new(0.0, 1.0).unwrap())].into();
    println!(
        "dependency problem: a - a over [0, 1] = {}",
        propagate_interval(&cancel, &env).unwrap()
    );

    // Division by an interval containing zero has no finite enclosure.
    let div = parse_expression("1 / a").unwrap();
    let env: BTreeMap<String, Interval> =
        [("a".to_string(), Interval::new(-1.0, 1.0).unwrap())].into();
    println!(
        "division across zero: {}",
        propagate_interval(&div, &env).unwrap_err()
    );
}
