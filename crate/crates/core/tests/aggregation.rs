mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use cobperturb::metrics::{aggregate, change_indicator, change_rows, group_sizes, ChangeRow, ComparisonPolicy};
use cobperturb::{MetricValue, MetricVector, Rate, RngStream};
use common::{brute_force, max_discrepancy, random_rows, example_result_table, EXAMPLE_IDS, EXAMPLE_PRINTED};

fn ids(m: usize) -> Vec<String> {
    (0..m).map(|k| format!("m{k}")).collect()
}

fn agg(rows: &[ChangeRow], m: usize) -> cobperturb::RobustnessAggregate {
    aggregate(rows, &ids(m), &group_sizes(rows)).unwrap()
}

fn vector(values: [MetricValue; 3]) -> MetricVector {
    MetricVector(EXAMPLE_IDS.iter().map(|s| s.to_string()).zip(values).collect())
}

#[test]
fn example_table_first_two_rows_from_values() {
    use MetricValue::*;
    let base = vector([Num(1.0), Num(5.0), Bool(true)]);
    let p = ComparisonPolicy::default();
    assert_eq!(
        change_indicator(&base, &vector([Num(1.0), Num(5.0), Bool(true)]), &p).unwrap(),
        (vec![false, false, false], false)
    );
    assert_eq!(
        change_indicator(&base, &vector([Num(2.0), Num(5.0), Bool(false)]), &p).unwrap(),
        (vec![true, false, true], true)
    );
}

#[test]
fn example_table_any_column_from_values() {
    let rows = change_rows(&example_result_table(), &ComparisonPolicy::default()).unwrap();
    let any: Vec<bool> = rows.iter().map(|r| r.any).collect();
    let printed: Vec<bool> = EXAMPLE_PRINTED.iter().map(|r| r.3).collect();
    assert_eq!(any, printed);
    // Every printed row except (1, 3) agrees metric by metric. That row
    // lists mu = (1, 4, True) against (1, 5, True), i.e. only mu_2 moved.
    for (r, p) in rows.iter().zip(EXAMPLE_PRINTED) {
        if (r.i, r.j) == (1, 3) {
            assert_eq!(r.deltas, [false, true, false]);
            assert_eq!(p.2, [true, false, false]);
        } else {
            assert_eq!(r.deltas, p.2, "row ({}, {})", r.i, r.j);
        }
    }
}

#[test]
fn example_table_aggregates_from_printed_deltas() {
    let rows: Vec<ChangeRow> = EXAMPLE_PRINTED
        .iter()
        .map(|(i, j, d, any)| ChangeRow {
            i: *i,
            j: *j,
            method_id: format!("method_{j}"),
            category: "cat".into(),
            deltas: d.to_vec(),
            any: *any,
        })
        .collect();
    let a = agg(&rows, 3);
    assert_eq!(a.any.exact(), "2/3");
    for r in &a.per_metric {
        assert_eq!(r.exact(), "1/3");
    }
}

#[test]
fn example_table_aggregates_from_values() {
    let rows = change_rows(&example_result_table(), &ComparisonPolicy::default()).unwrap();
    let a = agg(&rows, 3);
    assert_eq!(a.any.exact(), "2/3");
    let per: Vec<String> = a.per_metric.iter().map(Rate::exact).collect();
    assert_eq!(per, ["1/6", "1/2", "1/3"]);
}

#[test]
fn all_zero_rows_aggregate_to_zero() {
    let mut rng = RngStream::new(3);
    let mut rows = random_rows(&mut rng, 10, 5, 4);
    for r in &mut rows {
        r.deltas.iter_mut().for_each(|d| *d = false);
        r.any = false;
    }
    let a = agg(&rows, 4);
    assert_eq!(a.any, Rate::zero());
    assert!(a.per_method.iter().chain(&a.per_category).all(|c| c.any == Rate::zero()));
}

#[test]
fn empty_dataset_is_an_error() {
    assert!(aggregate(&[], &ids(2), &BTreeMap::new()).is_err());
}

#[test]
fn declared_group_size_dilutes_rates() {
    // A variant that failed generation still counts in n(i) when the
    // manifest says so.
    let rows = vec![ChangeRow {
        i: 0,
        j: 1,
        method_id: "m".into(),
        category: "c".into(),
        deltas: vec![true],
        any: true,
    }];
    let sizes = BTreeMap::from([(0, 2)]);
    assert_eq!(aggregate(&rows, &ids(1), &sizes).unwrap().any.exact(), "1/2");
}

fn rows_strategy() -> impl Strategy<Value = (Vec<ChangeRow>, usize)> {
    (any::<u64>(), 1usize..=6).prop_map(|(seed, m)| (random_rows(&mut RngStream::new(seed), 20, 10, m), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_brute_force((rows, m) in rows_strategy()) {
        let a = agg(&rows, m);
        let d = max_discrepancy(&a, &brute_force(&rows, m));
        prop_assert!(d <= 1e-12, "discrepancy {d}");
    }

    #[test]
    fn rates_are_bounded((rows, m) in rows_strategy()) {
        let a = agg(&rows, m);
        let one = Rate::ratio(1, 1);
        let all = a.per_metric.iter().chain(std::iter::once(&a.any))
            .chain(a.per_method.iter().chain(&a.per_category).flat_map(|c| c.per_metric.iter().chain(std::iter::once(&c.any))));
        for r in all {
            prop_assert!(*r >= Rate::zero() && *r <= one);
        }
        for r in &a.per_metric {
            prop_assert!(a.any >= *r);
        }
    }

    #[test]
    fn row_order_is_irrelevant((rows, m) in rows_strategy(), seed in any::<u64>()) {
        let mut shuffled = rows.clone();
        RngStream::new(seed).shuffle(&mut shuffled);
        prop_assert_eq!(agg(&rows, m), agg(&shuffled, m));
    }

    #[test]
    fn dropping_a_metric_never_raises_any((rows, m) in rows_strategy()) {
        prop_assume!(m >= 2);
        let fewer: Vec<ChangeRow> = rows.iter().cloned().map(|mut r| {
            r.deltas.pop();
            r.any = r.deltas.iter().any(|d| *d);
            r
        }).collect();
        prop_assert!(agg(&fewer, m - 1).any <= agg(&rows, m).any);
    }

    #[test]
    fn single_use_methods_reduce_to_plain_means(seed in any::<u64>(), m in 1usize..=4) {
        // Each method at most once per input: v(i) in {0, 1}.
        let mut rng = RngStream::new(seed);
        let mut rows = Vec::new();
        for i in 0..rng.between(1, 12) {
            let mut pool: Vec<usize> = (0..common::METHOD_POOL.len()).collect();
            rng.shuffle(&mut pool);
            for (j, k) in pool.into_iter().take(rng.between(1, 6)).enumerate() {
                let deltas: Vec<bool> = (0..m).map(|_| rng.coin()).collect();
                rows.push(ChangeRow {
                    i,
                    j: j + 1,
                    method_id: common::METHOD_POOL[k].0.into(),
                    category: common::METHOD_POOL[k].1.into(),
                    any: deltas.iter().any(|d| *d),
                    deltas,
                });
            }
        }
        let a = agg(&rows, m);
        for c in &a.per_method {
            let mine: Vec<&ChangeRow> = rows.iter().filter(|r| r.method_id == c.key).collect();
            prop_assert_eq!(c.any.clone(), Rate::ratio(mine.iter().filter(|r| r.any).count(), mine.len()));
        }
    }
}
