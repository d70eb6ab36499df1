//! Sequential against parallel execution on the three data-parallel paths.
//!
//! Run with `cargo bench -p colstd-core`. Without the `parallel` feature both
//! variants take the sequential path.

use std::hint::black_box;

use colstd_core::annotate::{infer_types_rules_with, RuleSettings};
use colstd_core::eval::{cell_match_rate_with, Normalization};
use colstd_core::standardize::clean_column_with;
use colstd_core::{CandidateTypes, Cell, ColumnType, Execution, StandardizeOptions, Table};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const DATES: [&str; 6] = [
    "Thu Sep 25 10:36:28 2003",
    "2011-12-08 3:50:00 PM",
    "06:45 AM Sun 25-Dec-2011",
    "1996.07.10 AD at 15:08:56",
    "12/01/2011 07:10:00",
    "little cat",
];
const ADDRESSES: [&str; 3] = [
    "123 Main St Apt 4B, Baton Rouge, LA 70802, USA",
    "456 Oak Avenue, Springfield, IL 62704",
    "!!!",
];
const COLORS: [&str; 4] = ["rgb(161, 178, 195)", "#A1B2C3", "red", "reddish"];

fn table(rows: usize) -> Table {
    let data = (0..rows)
        .map(|i| {
            vec![
                Cell::text(DATES[i % DATES.len()]),
                Cell::text(ADDRESSES[i % ADDRESSES.len()]),
                Cell::text(COLORS[i % COLORS.len()]),
                Cell::text(format!("{}h {}m", i % 24, i % 60)),
            ]
        })
        .collect();
    Table::new(vec!["date".into(), "address".into(), "color".into(), "duration".into()], data).unwrap()
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];
const SIZES: [usize; 2] = [1_000, 20_000];

fn clean_column(c: &mut Criterion) {
    let options = StandardizeOptions::default();
    let mut group = c.benchmark_group("clean_column/date");
    for rows in SIZES {
        let t = table(rows);
        group.throughput(Throughput::Elements(rows as u64));
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, rows), &t, |b, t| {
                b.iter(|| clean_column_with(black_box(t), "date", ColumnType::Date, None, &options, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn match_rate(c: &mut Criterion) {
    let mut group = c.benchmark_group("cell_match_rate");
    for rows in SIZES {
        let a = table(rows);
        let b = clean_column_with(&a, "color", ColumnType::Color, None, &StandardizeOptions::default(), Execution::Sequential)
            .unwrap();
        group.throughput(Throughput::Elements((rows * a.column_count()) as u64));
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, rows), &(&a, &b), |bench, (a, b)| {
                bench.iter(|| cell_match_rate_with(black_box(a), black_box(b), Normalization::Cells, mode).unwrap())
            });
        }
    }
    group.finish();
}

fn rule_inference(c: &mut Criterion) {
    let mut group = c.benchmark_group("infer_types_rules");
    let t = table(1_000);
    let candidates = CandidateTypes::default();
    for sample_size in [100, 1_000] {
        for (name, mode) in MODES {
            let settings = RuleSettings { sample_size, threshold: 0.8, options: StandardizeOptions::default(), execution: mode };
            group.bench_with_input(BenchmarkId::new(name, sample_size), &t, |b, t| {
                b.iter(|| infer_types_rules_with(black_box(t), &candidates, &settings).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, clean_column, match_rate, rule_inference);
criterion_main!(benches);
